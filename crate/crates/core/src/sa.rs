//! Simulated annealing over macro grid locations.
//!
//! Macros sit on grid-cell centers. Each step samples one of five actions
//! (swap, shift, mirror, move, shuffle), rejects and resamples illegal
//! proposals up to [`MAX_RESAMPLES`] times, and applies Metropolis
//! acceptance to the change in proxy cost. Soft clusters are refreshed with
//! force-directed placement every `k * n` steps (`n` = number of movable
//! macros); between refreshes the cost is evaluated with stale cluster
//! positions.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cluster::ClusteredNetlist;
use crate::error::{Error, Result};
use crate::fd::{fd_place, FdParams};
use crate::grid::{fits_at, Grid};
use crate::netlist::{Netlist, NodeKind};
use crate::placement::{Location, Orientation, Placement};
use crate::proxy::{proxy_cost, ProxyBreakdown, ProxyConfig};

/// Illegal proposals are redrawn at most this many times per step.
pub const MAX_RESAMPLES: usize = 10;
/// Number of macros permuted by one shuffle action.
pub const SHUFFLE_SIZE: usize = 4;
/// Random probe actions used to pick the automatic starting temperature.
pub const AUTO_TEMP_PROBES: usize = 100;
/// FD cadence multipliers cycled across parallel workers.
pub const FD_MULTIPLIERS: [usize; 4] = [2, 3, 4, 5];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InitMethod {
    /// Counterclockwise inward spiral from the lower-left cell.
    #[default]
    Spiral,
    /// Largest first, row-major from the lower-left cell.
    GreedyPack,
}

impl FromStr for InitMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "spiral" => Ok(InitMethod::Spiral),
            "greedy" | "greedy-pack" => Ok(InitMethod::GreedyPack),
            other => Err(format!("expected `spiral` or `greedy`, got `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ActionKind {
    Swap,
    Shift,
    Mirror,
    Move,
    Shuffle,
}

impl ActionKind {
    pub const ALL: [ActionKind; 5] = [
        ActionKind::Swap,
        ActionKind::Shift,
        ActionKind::Mirror,
        ActionKind::Move,
        ActionKind::Shuffle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ActionKind::Swap => "swap",
            ActionKind::Shift => "shift",
            ActionKind::Mirror => "mirror",
            ActionKind::Move => "move",
            ActionKind::Shuffle => "shuffle",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sampling probabilities, indexed like [`ActionKind::ALL`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ActionWeights(pub [f64; 5]);

impl Default for ActionWeights {
    fn default() -> Self {
        ActionWeights([0.2; 5])
    }
}

impl ActionWeights {
    pub fn get(&self, kind: ActionKind) -> f64 {
        self.0[kind.index()]
    }

    pub fn validate(&self) -> Result<()> {
        if self.0.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidConfig("action weights must be nonnegative".into()));
        }
        let sum: f64 = self.0.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!("action weights sum to {sum}, expected 1")));
        }
        Ok(())
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ActionKind {
        let r = rng.random::<f64>();
        let mut acc = 0.0;
        let mut last = None;
        for kind in ActionKind::ALL {
            let w = self.get(kind);
            if w <= 0.0 {
                continue;
            }
            acc += w;
            last = Some(kind);
            if r < acc {
                return kind;
            }
        }
        last.expect("validated weights have a positive entry")
    }
}

impl FromStr for ActionWeights {
    type Err = String;

    /// Accepts `swap=0.3,move=0.7` (unnamed kinds get 0) or five bare
    /// numbers in swap, shift, mirror, move, shuffle order.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let mut w = [0.0; 5];
        let parts: Vec<&str> = s.split(',').map(str::trim).filter(|p| !p.is_empty()).collect();
        if parts.iter().all(|p| p.contains('=')) {
            for p in parts {
                let (k, v) = p.split_once('=').unwrap();
                let kind = ActionKind::ALL
                    .into_iter()
                    .find(|a| a.as_str() == k.trim())
                    .ok_or_else(|| format!("unknown action `{k}`"))?;
                w[kind.index()] = v.trim().parse::<f64>().map_err(|e| e.to_string())?;
            }
        } else if parts.len() == 5 {
            for (slot, p) in w.iter_mut().zip(parts) {
                *slot = p.parse::<f64>().map_err(|e| e.to_string())?;
            }
        } else {
            return Err(format!("expected five weights or name=value pairs, got `{s}`"));
        }
        let aw = ActionWeights(w);
        aw.validate().map_err(|e| e.to_string())?;
        Ok(aw)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Temperature {
    /// Chosen so the median uphill probe delta is accepted with probability 1/2.
    Auto,
    Fixed(f64),
}

impl FromStr for Temperature {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(Temperature::Auto);
        }
        let t = s.parse::<f64>().map_err(|e| e.to_string())?;
        if !(t >= 0.0 && t.is_finite()) {
            return Err(format!("temperature must be >= 0, got {t}"));
        }
        Ok(Temperature::Fixed(t))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SaConfig {
    pub seed: u64,
    pub init: InitMethod,
    pub action_weights: ActionWeights,
    pub max_steps: usize,
    pub t_init: Temperature,
    pub cooling_ratio: f64,
    /// Steps per temperature level; `None` means `10 * n`.
    pub epoch_len: Option<usize>,
    /// FD every `k * n` steps; `None` cycles [`FD_MULTIPLIERS`] by worker index.
    pub fd_interval_multiplier: Option<usize>,
    pub fd_params: FdParams,
    pub proxy: ProxyConfig,
    /// Wall-clock cap, measured from the start of the run. Parallel workers
    /// share one deadline.
    pub budget: Option<Duration>,
}

impl Default for SaConfig {
    fn default() -> Self {
        SaConfig {
            seed: 0,
            init: InitMethod::Spiral,
            action_weights: ActionWeights::default(),
            max_steps: 10_000,
            t_init: Temperature::Auto,
            cooling_ratio: 0.95,
            epoch_len: None,
            fd_interval_multiplier: None,
            fd_params: FdParams::default(),
            proxy: ProxyConfig::default(),
            budget: None,
        }
    }
}

impl SaConfig {
    pub fn validate(&self) -> Result<()> {
        self.action_weights.validate()?;
        self.fd_params.validate()?;
        if !(self.cooling_ratio > 0.0 && self.cooling_ratio < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "cooling ratio must lie in (0, 1), got {}",
                self.cooling_ratio
            )));
        }
        if self.epoch_len == Some(0) {
            return Err(Error::InvalidConfig("epoch length must be >= 1".into()));
        }
        if let Some(k) = self.fd_interval_multiplier {
            if !FD_MULTIPLIERS.contains(&k) {
                return Err(Error::InvalidConfig(format!("FD interval multiplier must be 2..=5, got {k}")));
            }
        }
        Ok(())
    }
}

/// Per-kind action counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ActionCounts(pub [usize; 5]);

impl ActionCounts {
    pub fn get(&self, kind: ActionKind) -> usize {
        self.0[kind.index()]
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SaResult {
    pub best_placement: Placement,
    pub best_cost: ProxyBreakdown,
    pub initial_placement: Placement,
    pub initial_cost: ProxyBreakdown,
    /// `(step, cost)` for the initial state, every accepted state and every
    /// FD refresh.
    pub cost_trace: Vec<(usize, f64)>,
    pub actions_taken: ActionCounts,
    /// Steps whose proposals were all illegal.
    pub noop_steps: usize,
    pub steps: usize,
    pub seed: u64,
    pub t_init: f64,
}

impl SaResult {
    /// Trace as `step,cost` CSV with shortest round-trip float formatting.
    pub fn trace_csv(&self) -> String {
        let mut s = String::from("step,cost\n");
        for (step, cost) in &self.cost_trace {
            s.push_str(&format!("{step},{cost}\n"));
        }
        s
    }
}

/// One macro's new grid cell and orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MacroMove {
    /// Index into the annealer's macro list.
    pub slot: usize,
    pub cell: (usize, usize),
    pub orient: Orientation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Action {
    pub kind: ActionKind,
    pub moves: Vec<MacroMove>,
}

/// Macro grid assignment plus the full placement it lives in.
#[derive(Clone, Debug)]
pub struct SaState<'a> {
    pub netlist: &'a Netlist,
    pub grid: &'a Grid,
    /// Node indices of the movable macros.
    pub macros: Vec<usize>,
    pub cells: Vec<(usize, usize)>,
    pub placement: Placement,
}

impl<'a> SaState<'a> {
    /// Builds state from a placement whose movable macros sit on cell centers.
    pub fn new(netlist: &'a Netlist, grid: &'a Grid, placement: Placement) -> Result<Self> {
        let macros = netlist.movable_macros();
        let mut cells = Vec::with_capacity(macros.len());
        for &m in &macros {
            let loc = placement.loc(netlist, m)?;
            cells.push(grid.cell_of(loc.x, loc.y));
        }
        Ok(SaState {
            netlist,
            grid,
            macros,
            cells,
            placement,
        })
    }

    fn orient(&self, slot: usize) -> Orientation {
        self.placement.get(self.macros[slot]).map(|l| l.orient).unwrap_or_default()
    }

    fn center(&self, cell: (usize, usize)) -> (f64, f64) {
        self.grid.cell_center(cell.0, cell.1).expect("cell in range")
    }

    /// Whether applying `moves` keeps every macro inside the canvas and
    /// overlap-free.
    pub fn is_legal(&self, moves: &[MacroMove]) -> bool {
        let moved: Vec<usize> = moves.iter().map(|m| self.macros[m.slot]).collect();
        for (k, mv) in moves.iter().enumerate() {
            if mv.cell.0 >= self.grid.n_cols || mv.cell.1 >= self.grid.n_rows {
                return false;
            }
            let (x, y) = self.center(mv.cell);
            if !fits_at(self.netlist, &self.placement, self.grid, moved[k], x, y, &moved) {
                return false;
            }
            let nk = &self.netlist.nodes[moved[k]];
            let bk = crate::geometry::Rect::centered(x, y, nk.width, nk.height);
            for (j, other) in moves.iter().enumerate().skip(k + 1) {
                let (ox, oy) = self.center(other.cell);
                let nj = &self.netlist.nodes[moved[j]];
                let bj = crate::geometry::Rect::centered(ox, oy, nj.width, nj.height);
                if bk.overlaps_eps(&bj, self.grid.eps()) {
                    return false;
                }
            }
        }
        true
    }

    /// Applies moves and returns the inverse moves.
    pub fn apply(&mut self, moves: &[MacroMove]) -> Vec<MacroMove> {
        let undo: Vec<MacroMove> = moves
            .iter()
            .map(|m| MacroMove {
                slot: m.slot,
                cell: self.cells[m.slot],
                orient: self.orient(m.slot),
            })
            .collect();
        for m in moves {
            let (x, y) = self.center(m.cell);
            self.cells[m.slot] = m.cell;
            self.placement.set(self.macros[m.slot], Location::with_orient(x, y, m.orient));
        }
        undo
    }
}

fn random_parameters<R: Rng + ?Sized>(state: &SaState<'_>, kind: ActionKind, rng: &mut R) -> Option<Vec<MacroMove>> {
    let n = state.macros.len();
    if n == 0 {
        return None;
    }
    let grid = state.grid;
    match kind {
        ActionKind::Swap => {
            if n < 2 {
                return None;
            }
            let a = rng.random_range(0..n);
            let mut b = rng.random_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            Some(vec![
                MacroMove {
                    slot: a,
                    cell: state.cells[b],
                    orient: state.orient(a),
                },
                MacroMove {
                    slot: b,
                    cell: state.cells[a],
                    orient: state.orient(b),
                },
            ])
        }
        ActionKind::Shift => {
            let m = rng.random_range(0..n);
            let (c, r) = state.cells[m];
            let (c, r) = (c as isize, r as isize);
            let (nc, nr) = [(c + 1, r), (c - 1, r), (c, r + 1), (c, r - 1)][rng.random_range(0..4)];
            if nc < 0 || nr < 0 || nc >= grid.n_cols as isize || nr >= grid.n_rows as isize {
                return None;
            }
            Some(vec![MacroMove {
                slot: m,
                cell: (nc as usize, nr as usize),
                orient: state.orient(m),
            }])
        }
        ActionKind::Mirror => {
            let m = rng.random_range(0..n);
            let axis = if rng.random::<bool>() { Orientation::FN } else { Orientation::FS };
            Some(vec![MacroMove {
                slot: m,
                cell: state.cells[m],
                orient: state.orient(m).compose(axis),
            }])
        }
        ActionKind::Move => {
            let m = rng.random_range(0..n);
            let cell = (rng.random_range(0..grid.n_cols), rng.random_range(0..grid.n_rows));
            Some(vec![MacroMove {
                slot: m,
                cell,
                orient: state.orient(m),
            }])
        }
        ActionKind::Shuffle => {
            let k = n.min(SHUFFLE_SIZE);
            let picked = rand::seq::index::sample(rng, n, k).into_vec();
            let mut targets: Vec<(usize, usize)> = picked.iter().map(|&s| state.cells[s]).collect();
            targets.shuffle(rng);
            Some(
                picked
                    .iter()
                    .zip(targets)
                    .map(|(&slot, cell)| MacroMove {
                        slot,
                        cell,
                        orient: state.orient(slot),
                    })
                    .collect(),
            )
        }
    }
}

/// Samples an action kind, then draws legal parameters for it with up to
/// [`MAX_RESAMPLES`] attempts. `moves` is empty when every attempt failed.
pub fn propose_action<R: Rng + ?Sized>(state: &SaState<'_>, weights: &ActionWeights, rng: &mut R) -> Action {
    let kind = weights.sample(rng);
    for _ in 0..MAX_RESAMPLES {
        if let Some(moves) = random_parameters(state, kind, rng) {
            if state.is_legal(&moves) {
                return Action { kind, moves };
            }
        }
    }
    Action { kind, moves: Vec::new() }
}

/// Grid cells in counterclockwise inward spiral order from the lower-left.
pub fn spiral_order(n_cols: usize, n_rows: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n_cols * n_rows);
    if n_cols == 0 || n_rows == 0 {
        return out;
    }
    let (mut left, mut right, mut bottom, mut top) = (0isize, n_cols as isize - 1, 0isize, n_rows as isize - 1);
    while left <= right && bottom <= top {
        for c in left..=right {
            out.push((c as usize, bottom as usize));
        }
        for r in bottom + 1..=top {
            out.push((right as usize, r as usize));
        }
        if top > bottom {
            for c in (left..right).rev() {
                out.push((c as usize, top as usize));
            }
        }
        if left < right {
            for r in (bottom + 1..top).rev() {
                out.push((left as usize, r as usize));
            }
        }
        left += 1;
        right -= 1;
        bottom += 1;
        top -= 1;
    }
    out
}

fn place_in_order(
    netlist: &Netlist,
    base: &Placement,
    macros: &[usize],
    grid: &Grid,
    cells: &[(usize, usize)],
) -> Result<Placement> {
    let mut p = base.clone();
    for &m in macros {
        p.clear(m);
    }
    for &m in macros {
        let node = &netlist.nodes[m];
        if !node.movable {
            return Err(Error::NotMovable(node.id.clone()));
        }
        let spot = cells.iter().find_map(|&(c, r)| {
            let (x, y) = grid.cell_center(c, r).ok()?;
            fits_at(netlist, &p, grid, m, x, y, &[]).then_some((x, y))
        });
        let (x, y) = spot.ok_or_else(|| Error::Unplaceable(node.id.clone()))?;
        p.set(m, Location::new(x, y));
    }
    Ok(p)
}

/// Places `macros` in the given order at the first legal cell of a
/// counterclockwise inward spiral. `base` supplies every other node.
pub fn init_spiral(netlist: &Netlist, base: &Placement, macros: &[usize], grid: &Grid) -> Result<Placement> {
    place_in_order(netlist, base, macros, grid, &spiral_order(grid.n_cols, grid.n_rows))
}

/// Places macros largest-area first at the first legal cell in row-major
/// order from the lower-left.
pub fn init_greedy_pack(netlist: &Netlist, base: &Placement, macros: &[usize], grid: &Grid) -> Result<Placement> {
    let mut order = macros.to_vec();
    order.sort_by(|&a, &b| netlist.nodes[b].area().total_cmp(&netlist.nodes[a].area()).then(a.cmp(&b)));
    let cells: Vec<(usize, usize)> = (0..grid.n_rows)
        .flat_map(|r| (0..grid.n_cols).map(move |c| (c, r)))
        .collect();
    place_in_order(netlist, base, &order, grid, &cells)
}

fn has_soft_nodes(netlist: &Netlist) -> bool {
    netlist.nodes.iter().any(|n| n.kind.is_soft() && n.movable)
}

fn refresh_clusters(cnl: &ClusteredNetlist, placement: &Placement, params: &FdParams) -> Result<Placement> {
    fd_place(cnl, placement, params)
}

fn auto_temperature<R: Rng + ?Sized>(
    state: &mut SaState<'_>,
    config: &SaConfig,
    current: f64,
    deadline: Option<Instant>,
    rng: &mut R,
) -> Result<f64> {
    let mut uphill = Vec::new();
    for _ in 0..AUTO_TEMP_PROBES {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
        let action = propose_action(state, &config.action_weights, rng);
        if action.moves.is_empty() {
            continue;
        }
        let undo = state.apply(&action.moves);
        let cost = proxy_cost(state.netlist, &state.placement, state.grid, &config.proxy)?;
        state.apply(&undo);
        let delta = cost.total - current;
        if delta > 0.0 {
            uphill.push(delta);
        }
    }
    if uphill.is_empty() {
        return Ok(0.0);
    }
    uphill.sort_by(f64::total_cmp);
    let mid = uphill.len() / 2;
    let median = if uphill.len() % 2 == 1 {
        uphill[mid]
    } else {
        (uphill[mid - 1] + uphill[mid]) / 2.0
    };
    Ok(median / std::f64::consts::LN_2)
}

/// Runs one annealing worker.
pub fn anneal(cnl: &ClusteredNetlist, grid: &Grid, config: &SaConfig) -> Result<SaResult> {
    let deadline = config.budget.map(|b| Instant::now() + b);
    anneal_worker(cnl, grid, config, 0, deadline, |_, _, _| {})
}

/// [`anneal`] with a callback on every accepted state (step, placement, cost).
pub fn anneal_observed<F>(cnl: &ClusteredNetlist, grid: &Grid, config: &SaConfig, observer: F) -> Result<SaResult>
where
    F: FnMut(usize, &Placement, &ProxyBreakdown),
{
    let deadline = config.budget.map(|b| Instant::now() + b);
    anneal_worker(cnl, grid, config, 0, deadline, observer)
}

fn anneal_worker<F>(
    cnl: &ClusteredNetlist,
    grid: &Grid,
    config: &SaConfig,
    worker: usize,
    deadline: Option<Instant>,
    mut observer: F,
) -> Result<SaResult>
where
    F: FnMut(usize, &Placement, &ProxyBreakdown),
{
    config.validate()?;
    let netlist = &cnl.netlist;
    let macros = netlist.movable_macros();
    let n = macros.len().max(1);
    let init = match config.init {
        InitMethod::Spiral => init_spiral(netlist, &cnl.initial, &macros, grid),
        InitMethod::GreedyPack => init_greedy_pack(netlist, &cnl.initial, &macros, grid),
    }
    .map_err(|e| Error::InitFailed(e.to_string()))?;
    init.ensure_complete(netlist).map_err(|e| Error::InitFailed(e.to_string()))?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut state = SaState::new(netlist, grid, init.clone())?;
    let initial_cost = proxy_cost(netlist, &state.placement, grid, &config.proxy)?;
    let mut current = initial_cost;
    let mut best = (initial_cost, state.placement.clone());
    let mut trace = vec![(0usize, current.total)];
    observer(0, &state.placement, &current);

    let mut temperature = match config.t_init {
        Temperature::Fixed(t) => t,
        Temperature::Auto => auto_temperature(&mut state, config, current.total, deadline, &mut rng)?,
    };
    let t_init = temperature;
    let epoch_len = config.epoch_len.unwrap_or(10 * n);
    let multiplier = config
        .fd_interval_multiplier
        .unwrap_or(FD_MULTIPLIERS[worker % FD_MULTIPLIERS.len()]);
    let fd_interval = multiplier * n;
    let refresh = has_soft_nodes(netlist);

    let mut counts = ActionCounts::default();
    let mut noops = 0;
    let mut steps = 0;
    for step in 1..=config.max_steps {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
        steps = step;
        let action = propose_action(&state, &config.action_weights, &mut rng);
        counts.0[action.kind.index()] += 1;
        if action.moves.is_empty() {
            noops += 1;
        } else {
            let undo = state.apply(&action.moves);
            let candidate = proxy_cost(netlist, &state.placement, grid, &config.proxy)?;
            let delta = candidate.total - current.total;
            let accept = delta <= 0.0 || (temperature > 0.0 && rng.random::<f64>() < (-delta / temperature).exp());
            if accept {
                current = candidate;
                trace.push((step, current.total));
                observer(step, &state.placement, &current);
                if current.total < best.0.total {
                    best = (current, state.placement.clone());
                }
            } else {
                state.apply(&undo);
            }
        }
        if step % epoch_len == 0 {
            temperature *= config.cooling_ratio;
        }
        if refresh && step % fd_interval == 0 {
            state.placement = refresh_clusters(cnl, &state.placement, &config.fd_params)?;
            current = proxy_cost(netlist, &state.placement, grid, &config.proxy)?;
            trace.push((step, current.total));
            observer(step, &state.placement, &current);
            if current.total < best.0.total {
                best = (current, state.placement.clone());
            }
        }
    }

    let started_late = steps == 0 && deadline.is_some_and(|d| Instant::now() >= d);
    if refresh && !started_late {
        let refreshed = refresh_clusters(cnl, &best.1, &config.fd_params)?;
        let cost = proxy_cost(netlist, &refreshed, grid, &config.proxy)?;
        if cost.total <= best.0.total {
            best = (cost, refreshed);
        }
    }

    Ok(SaResult {
        best_placement: best.1,
        best_cost: best.0,
        initial_placement: init,
        initial_cost,
        cost_trace: trace,
        actions_taken: counts,
        noop_steps: noops,
        steps,
        seed: config.seed,
        t_init,
    })
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for `worker` out of `n_workers`. With at least one seed per worker
/// each worker takes its own seed; otherwise workers are split into equal
/// contiguous groups per seed, the first of each group using the seed as-is
/// and the rest a derived stream.
pub fn worker_seed(seeds: &[u64], n_workers: usize, worker: usize) -> u64 {
    assert!(!seeds.is_empty());
    if seeds.len() >= n_workers {
        return seeds[worker];
    }
    let group = worker * seeds.len() / n_workers;
    let first = (0..n_workers).find(|&w| w * seeds.len() / n_workers == group).unwrap();
    let rank = (worker - first) as u64;
    if rank == 0 {
        seeds[group]
    } else {
        splitmix64(seeds[group] ^ splitmix64(rank))
    }
}

#[derive(Debug)]
pub struct ParallelResult {
    pub best: SaResult,
    pub best_worker: usize,
    pub workers: Vec<Result<SaResult>>,
}

/// Independent workers over a shared netlist; returns the lowest-cost result
/// (ties go to the lower worker index). `budget` (else `base.budget`) is one
/// deadline for the whole run, so on fewer cores than workers the later
/// workers may get few or no steps.
pub fn run_parallel(
    cnl: &ClusteredNetlist,
    grid: &Grid,
    base: &SaConfig,
    n_workers: usize,
    seeds: &[u64],
    budget: Option<Duration>,
) -> Result<ParallelResult> {
    if n_workers == 0 {
        return Err(Error::InvalidConfig("need at least one worker".into()));
    }
    if seeds.is_empty() {
        return Err(Error::InvalidConfig("need at least one seed".into()));
    }
    base.validate()?;
    let deadline = budget.or(base.budget).map(|b| Instant::now() + b);
    let workers: Vec<Result<SaResult>> = (0..n_workers)
        .into_par_iter()
        .map(|w| {
            let config = SaConfig {
                seed: worker_seed(seeds, n_workers, w),
                ..base.clone()
            };
            anneal_worker(cnl, grid, &config, w, deadline, |_, _, _| {})
        })
        .collect();
    let mut best: Option<(usize, f64)> = None;
    for (w, r) in workers.iter().enumerate() {
        if let Ok(r) = r {
            if best.is_none_or(|(_, c)| r.best_cost.total < c) {
                best = Some((w, r.best_cost.total));
            }
        }
    }
    let Some((best_worker, _)) = best else {
        let mut workers = workers;
        let first = workers.swap_remove(0).unwrap_err();
        return Err(Error::AllWorkersFailed(n_workers, Box::new(first)));
    };
    let best = workers[best_worker].as_ref().unwrap().clone();
    Ok(ParallelResult {
        best,
        best_worker,
        workers,
    })
}

/// Permutes `(location, orientation)` among movable macros of identical size.
pub fn shuffle_same_size(netlist: &Netlist, placement: &Placement, seed: u64) -> Placement {
    let mut classes: Vec<((u64, u64), Vec<usize>)> = Vec::new();
    for (i, node) in netlist.nodes.iter().enumerate() {
        if node.kind != NodeKind::Macro || !node.movable || placement.get(i).is_none() {
            continue;
        }
        let key = (node.width.to_bits(), node.height.to_bits());
        match classes.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push(i),
            None => classes.push((key, vec![i])),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = placement.clone();
    for (_, members) in classes.iter().filter(|(_, m)| m.len() > 1) {
        let mut tuples: Vec<Location> = members.iter().map(|&m| placement.get(m).unwrap()).collect();
        tuples.shuffle(&mut rng);
        for (&m, loc) in members.iter().zip(tuples) {
            out.set(m, loc);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{Canvas, NetlistBuilder, Node, PinSpec};

    fn grid(n: usize, size: f64) -> Grid {
        Grid::with_default_capacity(Canvas::new(size, size).unwrap(), n, n).unwrap()
    }

    fn macro_netlist(size: f64, macros: &[(f64, f64)]) -> Netlist {
        let mut b = NetlistBuilder::new(Canvas::new(size, size).unwrap());
        for (i, &(w, h)) in macros.iter().enumerate() {
            b.add_node(Node::new(format!("m{i}"), NodeKind::Macro, w, h, true)).unwrap();
        }
        b.build().0
    }

    #[test]
    fn spiral_order_is_ccw_inward() {
        assert_eq!(spiral_order(2, 2), vec![(0, 0), (1, 0), (1, 1), (0, 1)]);
        let s = spiral_order(3, 3);
        assert_eq!(
            s,
            vec![(0, 0), (1, 0), (2, 0), (2, 1), (2, 2), (1, 2), (0, 2), (0, 1), (1, 1)]
        );
        let s = spiral_order(4, 1);
        assert_eq!(s, vec![(0, 0), (1, 0), (2, 0), (3, 0)]);
        let mut all = spiral_order(5, 4);
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 20);
    }

    #[test]
    fn spiral_fills_corners() {
        let nl = macro_netlist(20.0, &[(10.0, 10.0); 4]);
        let g = grid(2, 20.0);
        let p = init_spiral(&nl, &Placement::new(4), &[0, 1, 2, 3], &g).unwrap();
        let centers: Vec<_> = (0..4).map(|i| (p.get(i).unwrap().x, p.get(i).unwrap().y)).collect();
        assert_eq!(centers, vec![(5.0, 5.0), (15.0, 5.0), (15.0, 15.0), (5.0, 15.0)]);
    }

    #[test]
    fn single_macro_goes_lower_left() {
        let nl = macro_netlist(100.0, &[(15.0, 15.0)]);
        let g = grid(10, 100.0);
        // 15-wide macro does not fit in cell (0,0); first legal is (1,1)
        for p in [
            init_spiral(&nl, &Placement::new(1), &[0], &g).unwrap(),
            init_greedy_pack(&nl, &Placement::new(1), &[0], &g).unwrap(),
        ] {
            let l = p.get(0).unwrap();
            assert_eq!((l.x, l.y), (15.0, 15.0));
        }
    }

    #[test]
    fn oversized_macro_is_unplaceable() {
        let nl = macro_netlist(100.0, &[(120.0, 10.0)]);
        let g = grid(10, 100.0);
        assert!(matches!(
            init_spiral(&nl, &Placement::new(1), &[0], &g),
            Err(Error::Unplaceable(id)) if id == "m0"
        ));
        assert!(init_greedy_pack(&nl, &Placement::new(1), &[0], &g).is_err());
    }

    #[test]
    fn greedy_places_equal_macros_side_by_side() {
        let nl = macro_netlist(100.0, &[(10.0, 10.0), (10.0, 10.0)]);
        let g = grid(10, 100.0);
        let p = init_greedy_pack(&nl, &Placement::new(2), &[0, 1], &g).unwrap();
        assert_eq!((p.get(0).unwrap().x, p.get(0).unwrap().y), (5.0, 5.0));
        assert_eq!((p.get(1).unwrap().x, p.get(1).unwrap().y), (15.0, 5.0));
    }

    #[test]
    fn greedy_sorts_by_area() {
        let nl = macro_netlist(100.0, &[(10.0, 10.0), (30.0, 30.0)]);
        let g = grid(10, 100.0);
        let p = init_greedy_pack(&nl, &Placement::new(2), &[0, 1], &g).unwrap();
        assert_eq!((p.get(1).unwrap().x, p.get(1).unwrap().y), (15.0, 15.0));
        assert_eq!((p.get(0).unwrap().x, p.get(0).unwrap().y), (35.0, 5.0));
    }

    #[test]
    fn action_weights_parse() {
        let w: ActionWeights = "swap=0.5,move=0.5".parse().unwrap();
        assert_eq!(w.0, [0.5, 0.0, 0.0, 0.5, 0.0]);
        let w: ActionWeights = "0.2,0.2,0.2,0.2,0.2".parse().unwrap();
        assert_eq!(w, ActionWeights::default());
        assert!("swap=0.5".parse::<ActionWeights>().is_err());
        assert!("jump=1".parse::<ActionWeights>().is_err());
    }

    #[test]
    fn sampling_skips_zero_weights() {
        let w: ActionWeights = "mirror=1".parse().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            assert_eq!(w.sample(&mut rng), ActionKind::Mirror);
        }
    }

    fn state_fixture(nl: &Netlist, g: &Grid) -> Placement {
        let macros = nl.movable_macros();
        init_spiral(nl, &Placement::new(nl.nodes.len()), &macros, g).unwrap()
    }

    #[test]
    fn mirror_twice_is_identity() {
        let nl = macro_netlist(100.0, &[(10.0, 10.0), (20.0, 10.0)]);
        let g = grid(10, 100.0);
        let mut st = SaState::new(&nl, &g, state_fixture(&nl, &g)).unwrap();
        let before = st.placement.clone();
        let flip = |st: &SaState<'_>| MacroMove {
            slot: 1,
            cell: st.cells[1],
            orient: st.orient(1).compose(Orientation::FS),
        };
        let m = flip(&st);
        st.apply(&[m]);
        assert_ne!(st.placement, before);
        let m = flip(&st);
        st.apply(&[m]);
        assert_eq!(st.placement, before);
    }

    #[test]
    fn swap_and_shuffle_preserve_occupied_cells() {
        let nl = macro_netlist(100.0, &[(10.0, 10.0); 6]);
        let g = grid(10, 100.0);
        let mut st = SaState::new(&nl, &g, state_fixture(&nl, &g)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for kind in [ActionKind::Swap, ActionKind::Shuffle] {
            for _ in 0..50 {
                let mut before = st.cells.clone();
                before.sort();
                let moves = random_parameters(&st, kind, &mut rng).unwrap();
                assert!(st.is_legal(&moves));
                st.apply(&moves);
                let mut after = st.cells.clone();
                after.sort();
                assert_eq!(before, after);
            }
        }
    }

    #[test]
    fn illegal_moves_are_detected() {
        let nl = macro_netlist(100.0, &[(10.0, 10.0), (10.0, 10.0)]);
        let g = grid(10, 100.0);
        let st = SaState::new(&nl, &g, state_fixture(&nl, &g)).unwrap();
        let onto_other = MacroMove {
            slot: 0,
            cell: st.cells[1],
            orient: Orientation::N,
        };
        assert!(!st.is_legal(&[onto_other]));
        let out_of_grid = MacroMove {
            slot: 0,
            cell: (10, 0),
            orient: Orientation::N,
        };
        assert!(!st.is_legal(&[out_of_grid]));
    }

    /// Two macros joined to two ports on opposite sides, initially crossed.
    fn crossed_instance() -> (ClusteredNetlist, Grid) {
        let mut b = NetlistBuilder::new(Canvas::new(40.0, 10.0).unwrap());
        b.add_node(Node::new("a", NodeKind::Macro, 10.0, 10.0, true)).unwrap();
        b.add_node(Node::new("b", NodeKind::Macro, 10.0, 10.0, true)).unwrap();
        b.add_node(Node::new("pl", NodeKind::Port, 0.0, 0.0, false)).unwrap();
        b.add_node(Node::new("pr", NodeKind::Port, 0.0, 0.0, false)).unwrap();
        // spiral puts a left and b right, so tie a to the right port
        b.add_net("n0", 1.0, &[PinSpec::new("pr", 0.0, 0.0, true), PinSpec::new("a", 0.0, 0.0, false)])
            .unwrap();
        b.add_net("n1", 1.0, &[PinSpec::new("pl", 0.0, 0.0, true), PinSpec::new("b", 0.0, 0.0, false)])
            .unwrap();
        let nl = b.build().0;
        let mut p = Placement::new(4);
        p.set(2, Location::new(0.0, 5.0));
        p.set(3, Location::new(40.0, 5.0));
        let g = Grid::with_default_capacity(nl.canvas, 2, 1).unwrap();
        (ClusteredNetlist::unclustered(nl, p), g)
    }

    #[test]
    fn greedy_anneal_finds_the_improving_swap() {
        let (cnl, g) = crossed_instance();
        let config = SaConfig {
            max_steps: 50,
            t_init: Temperature::Fixed(0.0),
            action_weights: "swap=1".parse().unwrap(),
            ..Default::default()
        };
        let r = anneal(&cnl, &g, &config).unwrap();
        assert!(r.best_cost.total < r.initial_cost.total);
        assert!(r.best_cost.wirelength < r.initial_cost.wirelength);
    }

    #[test]
    fn zero_steps_returns_initialization() {
        let (cnl, g) = crossed_instance();
        let config = SaConfig {
            max_steps: 0,
            ..Default::default()
        };
        let r = anneal(&cnl, &g, &config).unwrap();
        assert_eq!(r.best_cost, r.initial_cost);
        assert_eq!(r.best_placement, r.initial_placement);
        assert_eq!(r.cost_trace, vec![(0, r.initial_cost.total)]);
        assert_eq!(r.actions_taken.total(), 0);
    }

    #[test]
    fn action_counts_match_steps() {
        let (cnl, g) = crossed_instance();
        let config = SaConfig {
            max_steps: 137,
            ..Default::default()
        };
        let r = anneal(&cnl, &g, &config).unwrap();
        assert_eq!(r.actions_taken.total(), 137);
        assert_eq!(r.steps, 137);
        assert!(r.cost_trace.windows(2).all(|w| w[0].0 <= w[1].0));
    }

    #[test]
    fn worker_seed_splits_pairs() {
        let seeds = [7, 9];
        let s: Vec<u64> = (0..4).map(|w| worker_seed(&seeds, 4, w)).collect();
        assert_eq!(s[0], 7);
        assert_eq!(s[2], 9);
        assert_ne!(s[1], 7);
        assert_ne!(s[1], s[3]);
        assert_eq!(worker_seed(&[1, 2, 3], 3, 2), 3);
        assert_eq!(worker_seed(&[5], 1, 0), 5);
    }

    #[test]
    fn parallel_best_is_min_and_matches_single() {
        let (cnl, g) = crossed_instance();
        let config = SaConfig {
            max_steps: 40,
            ..Default::default()
        };
        let single = anneal(&cnl, &g, &SaConfig { seed: 4, ..config.clone() }).unwrap();
        let one = run_parallel(&cnl, &g, &config, 1, &[4], None).unwrap();
        assert_eq!(one.best, single);

        let same = run_parallel(&cnl, &g, &config, 2, &[4, 4], None).unwrap();
        let a = same.workers[0].as_ref().unwrap();
        let b = same.workers[1].as_ref().unwrap();
        assert_eq!(a, b);

        let many = run_parallel(&cnl, &g, &config, 5, &[1, 2, 3, 4, 5], None).unwrap();
        for w in many.workers.iter().flatten() {
            assert!(many.best.best_cost.total <= w.best_cost.total);
        }
    }

    #[test]
    fn expired_budget_returns_untouched_initialization() {
        let mut b = NetlistBuilder::new(Canvas::new(40.0, 40.0).unwrap());
        b.add_node(Node::new("a", NodeKind::Macro, 10.0, 10.0, true)).unwrap();
        b.add_node(Node::new("c", NodeKind::Cluster, 4.0, 4.0, true)).unwrap();
        b.add_node(Node::new("p", NodeKind::Port, 0.0, 0.0, false)).unwrap();
        b.add_net("n0", 1.0, &[PinSpec::new("p", 0.0, 0.0, true), PinSpec::new("c", 0.0, 0.0, false)])
            .unwrap();
        b.add_net("n1", 1.0, &[PinSpec::new("a", 0.0, 0.0, true), PinSpec::new("c", 0.0, 0.0, false)])
            .unwrap();
        let nl = b.build().0;
        let mut p = Placement::new(3);
        p.set(1, Location::new(3.0, 37.0));
        p.set(2, Location::new(40.0, 0.0));
        let g = Grid::with_default_capacity(nl.canvas, 4, 4).unwrap();
        let cnl = ClusteredNetlist::unclustered(nl, p);
        let r = run_parallel(&cnl, &g, &SaConfig::default(), 3, &[1], Some(Duration::ZERO)).unwrap();
        for w in r.workers.iter().flatten() {
            assert_eq!(w.steps, 0);
            assert_eq!(w.best_placement, w.initial_placement);
            assert_eq!(w.best_cost, w.initial_cost);
        }
    }

    #[test]
    fn shuffle_identity_for_distinct_sizes() {
        let nl = macro_netlist(100.0, &[(10.0, 10.0), (20.0, 10.0), (10.0, 20.0)]);
        let g = grid(10, 100.0);
        let p = state_fixture(&nl, &g);
        assert_eq!(shuffle_same_size(&nl, &p, 99), p);
    }
}
