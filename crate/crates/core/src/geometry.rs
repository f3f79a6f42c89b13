/// Axis-aligned rectangle, `[xl, xh] x [yl, yh]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub xl: f64,
    pub yl: f64,
    pub xh: f64,
    pub yh: f64,
}

impl Rect {
    pub fn new(xl: f64, yl: f64, xh: f64, yh: f64) -> Self {
        Rect { xl, yl, xh, yh }
    }

    pub fn centered(cx: f64, cy: f64, w: f64, h: f64) -> Self {
        Rect {
            xl: cx - w / 2.0,
            yl: cy - h / 2.0,
            xh: cx + w / 2.0,
            yh: cy + h / 2.0,
        }
    }

    pub fn width(&self) -> f64 {
        self.xh - self.xl
    }

    pub fn height(&self) -> f64 {
        self.yh - self.yl
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Overlap extents along x and y; either may be non-positive.
    pub fn overlap_extents(&self, other: &Rect) -> (f64, f64) {
        (
            self.xh.min(other.xh) - self.xl.max(other.xl),
            self.yh.min(other.yh) - self.yl.max(other.yl),
        )
    }

    pub fn overlap_area(&self, other: &Rect) -> f64 {
        let (w, h) = self.overlap_extents(other);
        if w > 0.0 && h > 0.0 {
            w * h
        } else {
            0.0
        }
    }

    /// True when the intersection has positive area (touching edges do not count).
    pub fn overlaps(&self, other: &Rect) -> bool {
        let (w, h) = self.overlap_extents(other);
        w > 0.0 && h > 0.0
    }

    /// Like [`Rect::overlaps`] but ignores slivers thinner than `eps`.
    pub fn overlaps_eps(&self, other: &Rect, eps: f64) -> bool {
        let (w, h) = self.overlap_extents(other);
        w > eps && h > eps
    }

    pub fn inside(&self, outer: &Rect, eps: f64) -> bool {
        self.xl >= outer.xl - eps && self.yl >= outer.yl - eps && self.xh <= outer.xh + eps && self.yh <= outer.yh + eps
    }
}
