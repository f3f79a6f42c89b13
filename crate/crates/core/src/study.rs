//! Seed-stability statistics, weight sweeps and rank correlation.

use std::fmt::Write as _;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::cluster::ClusteredNetlist;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::netlist::Netlist;
use crate::placement::Placement;
use crate::proxy::{proxy_cost, total_hpwl, ProxyBreakdown, ProxyConfig, ProxyWeights};
use crate::sa::{run_parallel, SaConfig};

/// Kendall tau-b between two equal-length lists, in O(n log n).
pub fn kendall_tau(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::DegenerateInput(format!("need at least 2 values, got {n}")));
    }
    if xs.iter().chain(ys).any(|v| v.is_nan()) {
        return Err(Error::DegenerateInput("NaN in input".into()));
    }

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]).then(ys[a].total_cmp(&ys[b])));

    let n0 = pairs(n as u64);
    let mut n1 = 0u64;
    let mut n3 = 0u64;
    let (mut run_x, mut run_xy) = (1u64, 1u64);
    for w in idx.windows(2) {
        let (a, b) = (w[0], w[1]);
        if xs[a] == xs[b] {
            run_x += 1;
            if ys[a] == ys[b] {
                run_xy += 1;
            } else {
                n3 += pairs(run_xy);
                run_xy = 1;
            }
        } else {
            n1 += pairs(run_x);
            n3 += pairs(run_xy);
            run_x = 1;
            run_xy = 1;
        }
    }
    n1 += pairs(run_x);
    n3 += pairs(run_xy);

    let mut seq: Vec<f64> = idx.iter().map(|&i| ys[i]).collect();
    let mut buf = seq.clone();
    let swaps = merge_count(&mut seq, &mut buf);

    let mut n2 = 0u64;
    let mut run_y = 1u64;
    for w in seq.windows(2) {
        if w[0] == w[1] {
            run_y += 1;
        } else {
            n2 += pairs(run_y);
            run_y = 1;
        }
    }
    n2 += pairs(run_y);

    if n0 == n1 {
        return Err(Error::DegenerateInput("first list is constant".into()));
    }
    if n0 == n2 {
        return Err(Error::DegenerateInput("second list is constant".into()));
    }
    let s = n0 as i64 - n1 as i64 - n2 as i64 + n3 as i64 - 2 * swaps as i64;
    Ok(tau_b(s, n0, n1, n2))
}

/// `(concordant - discordant) / sqrt((n0 - n1)(n0 - n2))`.
pub fn tau_b(concordant_minus_discordant: i64, n0: u64, n1: u64, n2: u64) -> f64 {
    concordant_minus_discordant as f64 / (((n0 - n1) as f64) * ((n0 - n2) as f64)).sqrt()
}

fn pairs(t: u64) -> u64 {
    t * (t - 1) / 2
}

/// Sorts ascending and returns the number of strict inversions.
fn merge_count(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut count = merge_count(&mut v[..mid], &mut buf[..mid]) + merge_count(&mut v[mid..], &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf[k] = v[j];
            count += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    count
}

/// Mean and sample standard deviation; the deviation is NaN below two values.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, f64::NAN);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

/// Columns reported per run.
pub const METRICS: [&str; 5] = ["total", "wirelength", "density", "congestion", "hpwl"];

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub run_id: String,
    pub group: String,
    pub seeds: Vec<u64>,
    pub breakdown: ProxyBreakdown,
    pub hpwl: f64,
}

impl RunRecord {
    pub fn metric(&self, name: &str) -> Option<f64> {
        match name {
            "total" => Some(self.breakdown.total),
            "wirelength" => Some(self.breakdown.wirelength),
            "density" => Some(self.breakdown.density),
            "congestion" => Some(self.breakdown.congestion),
            "hpwl" => Some(self.hpwl),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityRow {
    pub group: String,
    pub runs: usize,
    /// `(mean, std)` per entry of [`METRICS`].
    pub stats: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport {
    pub runs: Vec<RunRecord>,
    /// One row per group in first-seen order, then `AGGR` over all runs.
    pub rows: Vec<StabilityRow>,
}

impl StabilityReport {
    pub fn from_runs(runs: Vec<RunRecord>) -> Self {
        let mut groups: Vec<String> = Vec::new();
        for r in &runs {
            if !groups.contains(&r.group) {
                groups.push(r.group.clone());
            }
        }
        let row = |label: &str, members: Vec<&RunRecord>| StabilityRow {
            group: label.to_string(),
            runs: members.len(),
            stats: METRICS
                .iter()
                .map(|m| mean_std(&members.iter().map(|r| r.metric(m).unwrap()).collect::<Vec<_>>()))
                .collect(),
        };
        let mut rows: Vec<StabilityRow> = groups
            .iter()
            .map(|g| row(g, runs.iter().filter(|r| &r.group == g).collect()))
            .collect();
        rows.push(row("AGGR", runs.iter().collect()));
        StabilityReport { runs, rows }
    }

    /// Aligned table, cells as `mean (std)`.
    pub fn to_text_table(&self) -> String {
        let mut header = vec!["group".to_string(), "runs".to_string()];
        header.extend(METRICS.iter().map(|m| m.to_string()));
        let body: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                let mut cells = vec![r.group.clone(), r.runs.to_string()];
                cells.extend(r.stats.iter().map(|(m, s)| format!("{m:.6} ({s:.6})")));
                cells
            })
            .collect();
        let widths: Vec<usize> = (0..header.len())
            .map(|c| body.iter().map(|r| r[c].len()).chain([header[c].len()]).max().unwrap())
            .collect();
        let mut out = String::new();
        for line in std::iter::once(&header).chain(body.iter()) {
            let cells: Vec<String> = line.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            let _ = writeln!(out, "{}", cells.join("  ").trim_end());
        }
        out
    }

    /// `group,runs,<metric>_mean,<metric>_std,...`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("group,runs");
        for m in METRICS {
            let _ = write!(out, ",{m}_mean,{m}_std");
        }
        out.push('\n');
        for r in &self.rows {
            let _ = write!(out, "{},{}", r.group, r.runs);
            for (m, s) in &r.stats {
                let _ = write!(out, ",{m},{s}");
            }
            out.push('\n');
        }
        out
    }

    /// One line per run: `run_id,group,seeds,<metrics>`; seeds are `:`-joined.
    pub fn runs_csv(&self) -> String {
        let mut out = String::from("run_id,group,seeds");
        for m in METRICS {
            let _ = write!(out, ",{m}");
        }
        out.push('\n');
        for r in &self.runs {
            let seeds: Vec<String> = r.seeds.iter().map(u64::to_string).collect();
            let _ = write!(out, "{},{},{}", r.run_id, r.group, seeds.join(":"));
            for m in METRICS {
                let _ = write!(out, ",{}", r.metric(m).unwrap());
            }
            out.push('\n');
        }
        out
    }
}

/// How seeds vary across the repeated runs of one group.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RunSeeding {
    /// Every run reuses the group's seeds.
    Repeat,
    /// Run `j` uses `derive_seed(s, j)` for each group seed `s`.
    #[default]
    Derive,
}

/// Seed for repetition `run`; repetition 0 keeps the seed.
pub fn derive_seed(seed: u64, run: usize) -> u64 {
    if run == 0 {
        return seed;
    }
    let mut z = seed ^ (run as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug)]
pub struct StudyGroup {
    pub label: String,
    /// Workers are split evenly across these seeds.
    pub seeds: Vec<u64>,
    pub config: SaConfig,
    pub workers: usize,
}

pub fn stability_study(
    cnl: &ClusteredNetlist,
    grid: &Grid,
    groups: &[StudyGroup],
    runs_per_group: usize,
    seeding: RunSeeding,
) -> Result<StabilityReport> {
    if runs_per_group < 2 {
        return Err(Error::InvalidConfig("stability needs at least 2 runs per group".into()));
    }
    let mut runs = Vec::new();
    for g in groups {
        for j in 0..runs_per_group {
            let seeds: Vec<u64> = match seeding {
                RunSeeding::Repeat => g.seeds.clone(),
                RunSeeding::Derive => g.seeds.iter().map(|&s| derive_seed(s, j)).collect(),
            };
            let result = run_parallel(cnl, grid, &g.config, g.workers, &seeds, None)?;
            let hpwl = total_hpwl(&cnl.netlist, &result.best.best_placement)?;
            runs.push(RunRecord {
                run_id: format!("{}#{j}", g.label),
                group: g.label.clone(),
                seeds,
                breakdown: result.best.best_cost,
                hpwl,
            });
        }
    }
    Ok(StabilityReport::from_runs(runs))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub weights: ProxyWeights,
    pub breakdown: ProxyBreakdown,
}

/// Evaluates the placement once and recombines the components per weight pair.
pub fn weight_sweep(
    netlist: &Netlist,
    placement: &Placement,
    grid: &Grid,
    config: &ProxyConfig,
    combos: &[ProxyWeights],
) -> Result<Vec<SweepRow>> {
    let base = proxy_cost(netlist, placement, grid, config)?;
    Ok(combos
        .iter()
        .map(|&w| SweepRow {
            weights: w,
            breakdown: base.reweighted(w),
        })
        .collect())
}

/// Numeric columns keyed by a `run_id` column.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricTable {
    pub run_ids: Vec<String>,
    pub columns: Vec<String>,
    /// `values[row][col]`
    pub values: Vec<Vec<f64>>,
}

impl MetricTable {
    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = crate::io::read_to_string(path)?;
        Self::parse_csv(&text, &path.display().to_string())
    }

    /// Non-numeric columns other than `run_id` are skipped.
    pub fn parse_csv(text: &str, file: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let headers = rdr
            .headers()
            .map_err(|e| Error::malformed(file, 1, e.to_string()))?
            .clone();
        let id_col = headers
            .iter()
            .position(|h| h == "run_id")
            .ok_or_else(|| Error::malformed(file, 1, "no run_id column"))?;
        let records: Vec<csv::StringRecord> = rdr
            .records()
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::malformed(file, e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
        let numeric: Vec<usize> = (0..headers.len())
            .filter(|&c| c != id_col && records.iter().all(|r| r.get(c).is_some_and(|v| v.parse::<f64>().is_ok())))
            .collect();
        Ok(MetricTable {
            run_ids: records.iter().map(|r| r[id_col].to_string()).collect(),
            columns: numeric.iter().map(|&c| headers[c].to_string()).collect(),
            values: records
                .iter()
                .map(|r| numeric.iter().map(|&c| r[c].parse::<f64>().unwrap()).collect())
                .collect(),
        })
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let c = self.columns.iter().position(|h| h == name)?;
        Some(self.values.iter().map(|row| row[c]).collect())
    }

    /// Inner join on `run_id`, keeping this table's row order. Clashing
    /// column names from `other` get an `ext_` prefix.
    pub fn join(&self, other: &MetricTable) -> MetricTable {
        let mut columns = self.columns.clone();
        for c in &other.columns {
            columns.push(if self.columns.contains(c) { format!("ext_{c}") } else { c.clone() });
        }
        let mut run_ids = Vec::new();
        let mut values = Vec::new();
        for (i, id) in self.run_ids.iter().enumerate() {
            if let Some(j) = other.run_ids.iter().position(|o| o == id) {
                run_ids.push(id.clone());
                values.push(self.values[i].iter().chain(&other.values[j]).copied().collect());
            }
        }
        MetricTable { run_ids, columns, values }
    }
}

/// Tau for every `(x, y)` column pair.
pub fn kendall_table(table: &MetricTable, xs: &[String], ys: &[String]) -> Vec<(String, String, Result<f64>)> {
    let mut out = Vec::new();
    for x in xs {
        for y in ys {
            let r = match (table.column(x), table.column(y)) {
                (Some(a), Some(b)) => kendall_tau(&a, &b),
                _ => Err(Error::InvalidConfig(format!("unknown column `{x}` or `{y}`"))),
            };
            out.push((x.clone(), y.clone(), r));
        }
    }
    out
}

/// Ordered `key=value` record of everything needed to rerun a command.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunManifest {
    pub entries: Vec<(String, String)>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        let mut m = RunManifest::default();
        m.push("command", command);
        m.push("tool_version", env!("CARGO_PKG_VERSION"));
        let ts = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        m.push("timestamp", ts);
        m
    }

    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        crate::io::write_string(path, &self.render())
    }
}
