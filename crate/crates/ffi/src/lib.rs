//! C ABI over the macroplace library.
//!
//! Designs and annealing runs are opaque handles owned by the caller and
//! released with their `*_free` function. Every fallible call returns an
//! [`MpStatus`]; on failure `mp_last_error_message` describes the cause.

#![allow(clippy::missing_safety_doc)]

mod error;

use std::ffi::{c_char, CStr};
use std::path::Path;
use std::time::Duration;

use macroplace::cluster::{cluster_by_grid, ClusteredNetlist};
use macroplace::fd::FdParams;
use macroplace::grid::{build_grid, Grid};
use macroplace::io::{load_design, parse_native_str, read_placement, write_placement, Design, ParseStats};
use macroplace::netlist::NodeKind;
use macroplace::placement::Placement;
use macroplace::proxy::{proxy_cost, ProxyBreakdown, ProxyConfig, ProxyWeights};
use macroplace::sa::{run_parallel, ActionWeights, InitMethod, SaConfig, Temperature};

use error::{guard, Failure};
pub use error::{mp_clear_last_error, mp_last_error_message, mp_status_name, mp_string_free, MpStatus};

/// A parsed netlist and its current node locations.
pub struct MpDesign {
    design: Design,
}

/// Outcome of an annealing run.
pub struct MpSaRun {
    best: ProxyBreakdown,
    initial: ProxyBreakdown,
    trace: Vec<(usize, f64)>,
    placement: Placement,
    best_worker: usize,
    steps: usize,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MpDesignCounts {
    pub nodes: usize,
    pub macros: usize,
    pub movable_macros: usize,
    pub std_cells: usize,
    pub ports: usize,
    pub nets: usize,
    pub pins: usize,
}

/// Grid shape and routing capacity. A capacity `<= 0` selects the default of
/// ten tracks per unit of cell boundary.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MpGridSpec {
    pub cols: u32,
    pub rows: u32,
    pub h_capacity: f64,
    pub v_capacity: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MpProxyOptions {
    pub gamma: f64,
    pub lambda: f64,
    pub smooth_radius: u32,
    pub macro_h_usage: f64,
    pub macro_v_usage: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MpBreakdown {
    pub wirelength: f64,
    pub density: f64,
    pub congestion: f64,
    pub total: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MpInit {
    Spiral = 0,
    GreedyPack = 1,
}

/// Annealing options. Zero selects the automatic value for `t_init`,
/// `epoch_len` and `fd_every`; `budget_seconds <= 0` means no time limit.
/// Action weights are ordered swap, shift, mirror, move, shuffle.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MpSaOptions {
    pub seed: u64,
    pub workers: u32,
    pub max_steps: u64,
    pub t_init: f64,
    pub cooling_ratio: f64,
    pub epoch_len: u64,
    pub fd_every: u32,
    pub fd_iters: u32,
    pub budget_seconds: f64,
    pub action_weights: [f64; 5],
    /// An `MpInit` value.
    pub init: u32,
    /// Group std cells into per-grid-cell clusters before annealing.
    pub cluster: bool,
}

impl From<ProxyBreakdown> for MpBreakdown {
    fn from(b: ProxyBreakdown) -> Self {
        MpBreakdown {
            wirelength: b.wirelength,
            density: b.density,
            congestion: b.congestion,
            total: b.total,
        }
    }
}

#[no_mangle]
pub extern "C" fn mp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn mp_grid_spec_default() -> MpGridSpec {
    MpGridSpec {
        cols: macroplace::grid::DEFAULT_GRID_COLS as u32,
        rows: macroplace::grid::DEFAULT_GRID_ROWS as u32,
        h_capacity: 0.0,
        v_capacity: 0.0,
    }
}

#[no_mangle]
pub extern "C" fn mp_proxy_options_default() -> MpProxyOptions {
    let d = ProxyConfig::default();
    MpProxyOptions {
        gamma: d.weights.gamma,
        lambda: d.weights.lambda,
        smooth_radius: d.smooth_radius as u32,
        macro_h_usage: d.macro_h_usage,
        macro_v_usage: d.macro_v_usage,
    }
}

#[no_mangle]
pub extern "C" fn mp_sa_options_default() -> MpSaOptions {
    let d = SaConfig::default();
    MpSaOptions {
        seed: d.seed,
        workers: 1,
        max_steps: d.max_steps as u64,
        t_init: 0.0,
        cooling_ratio: d.cooling_ratio,
        epoch_len: 0,
        fd_every: 0,
        fd_iters: d.fd_params.num_iters as u32,
        budget_seconds: 0.0,
        action_weights: d.action_weights.0,
        init: MpInit::Spiral as u32,
        cluster: true,
    }
}

fn null(name: &str) -> Failure {
    Failure::new(MpStatus::NullArgument, format!("`{name}` is null"))
}

unsafe fn arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn arg_mut<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(name))
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure::new(MpStatus::InvalidArgument, format!("`{name}` is not UTF-8: {e}")))
}

fn grid_of(design: &Design, spec: &MpGridSpec) -> Result<Grid, Failure> {
    let canvas = design.netlist.canvas;
    let (cols, rows) = (spec.cols as usize, spec.rows as usize);
    let d = Grid::with_default_capacity(canvas, cols.max(1), rows.max(1))?;
    let pick = |given: f64, default: f64| if given > 0.0 { given } else { default };
    Ok(build_grid(
        canvas,
        cols,
        rows,
        pick(spec.h_capacity, d.h_capacity),
        pick(spec.v_capacity, d.v_capacity),
    )?)
}

fn proxy_of(o: &MpProxyOptions) -> Result<ProxyConfig, Failure> {
    Ok(ProxyConfig {
        weights: ProxyWeights::new(o.gamma, o.lambda)?,
        smooth_radius: o.smooth_radius as usize,
        macro_h_usage: o.macro_h_usage,
        macro_v_usage: o.macro_v_usage,
    })
}

fn clustered(design: &Design, grid: &Grid, cluster: bool) -> Result<ClusteredNetlist, Failure> {
    if cluster {
        Ok(cluster_by_grid(&design.netlist, &design.placement, grid)?)
    } else {
        Ok(ClusteredNetlist::unclustered(design.netlist.clone(), design.placement.clone()))
    }
}

unsafe fn emit_design(out: *mut *mut MpDesign, design: Design) -> Result<(), Failure> {
    let out = arg_mut(out, "out")?;
    *out = Box::into_raw(Box::new(MpDesign { design }));
    Ok(())
}

/// Loads a `.aux` Bookshelf set or a native netlist file. `pl_path` may be
/// null; otherwise its locations are applied on top.
#[no_mangle]
pub unsafe extern "C" fn mp_design_load(path: *const c_char, pl_path: *const c_char, out: *mut *mut MpDesign) -> MpStatus {
    guard(|| {
        let path = text(path, "path")?;
        let pl = if pl_path.is_null() { None } else { Some(text(pl_path, "pl_path")?) };
        let design = load_design(Path::new(path), pl.map(Path::new))?;
        emit_design(out, design)
    })
}

/// Parses native netlist text held in memory. Nodes start without locations.
#[no_mangle]
pub unsafe extern "C" fn mp_design_parse_native(source: *const c_char, out: *mut *mut MpDesign) -> MpStatus {
    guard(|| {
        let netlist = parse_native_str(text(source, "source")?, "<memory>")?;
        let stats = ParseStats::from_netlist(&netlist);
        let placement = Placement::new(netlist.nodes.len());
        emit_design(
            out,
            Design {
                netlist,
                placement,
                stats,
            },
        )
    })
}

#[no_mangle]
pub unsafe extern "C" fn mp_design_free(design: *mut MpDesign) {
    if !design.is_null() {
        drop(Box::from_raw(design));
    }
}

#[no_mangle]
pub unsafe extern "C" fn mp_design_counts(design: *const MpDesign, out: *mut MpDesignCounts) -> MpStatus {
    guard(|| {
        let nl = &arg(design, "design")?.design.netlist;
        *arg_mut(out, "out")? = MpDesignCounts {
            nodes: nl.nodes.len(),
            macros: nl.count_kind(NodeKind::Macro),
            movable_macros: nl.movable_macros().len(),
            std_cells: nl.count_kind(NodeKind::StdCell),
            ports: nl.count_kind(NodeKind::Port),
            nets: nl.nets.len(),
            pins: nl.num_pins(),
        };
        Ok(())
    })
}

/// Applies the locations in a `.pl` file to the design.
#[no_mangle]
pub unsafe extern "C" fn mp_design_read_placement(design: *mut MpDesign, pl_path: *const c_char) -> MpStatus {
    guard(|| {
        let path = text(pl_path, "pl_path")?;
        let d = &mut arg_mut(design, "design")?.design;
        let extra = read_placement(&d.netlist, Path::new(path))?;
        for (i, loc) in extra.iter() {
            d.placement.set(i, loc);
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mp_design_write_placement(design: *const MpDesign, pl_path: *const c_char) -> MpStatus {
    guard(|| {
        let path = text(pl_path, "pl_path")?;
        let d = &arg(design, "design")?.design;
        Ok(write_placement(&d.netlist, &d.placement, Path::new(path))?)
    })
}

/// Proxy cost of the design's current placement, optionally after grouping
/// std cells into grid clusters.
#[no_mangle]
pub unsafe extern "C" fn mp_evaluate(
    design: *const MpDesign,
    grid: *const MpGridSpec,
    proxy: *const MpProxyOptions,
    cluster: bool,
    out: *mut MpBreakdown,
) -> MpStatus {
    guard(|| {
        let d = &arg(design, "design")?.design;
        let grid = grid_of(d, arg(grid, "grid")?)?;
        let proxy = proxy_of(arg(proxy, "proxy")?)?;
        let cnl = clustered(d, &grid, cluster)?;
        let b = proxy_cost(&cnl.netlist, &cnl.initial, &grid, &proxy)?;
        *arg_mut(out, "out")? = b.into();
        Ok(())
    })
}

fn sa_config(o: &MpSaOptions, proxy: ProxyConfig) -> Result<SaConfig, Failure> {
    let invalid = |m: &str| Failure::new(MpStatus::InvalidArgument, m.to_string());
    if o.workers == 0 {
        return Err(invalid("`workers` must be at least 1"));
    }
    if o.t_init < 0.0 || o.t_init.is_nan() {
        return Err(invalid("`t_init` must be 0 (automatic) or positive"));
    }
    let init = match o.init {
        0 => InitMethod::Spiral,
        1 => InitMethod::GreedyPack,
        v => return Err(invalid(&format!("unknown init method {v}"))),
    };
    let config = SaConfig {
        seed: o.seed,
        init,
        action_weights: ActionWeights(o.action_weights),
        max_steps: usize::try_from(o.max_steps).unwrap_or(usize::MAX),
        t_init: if o.t_init > 0.0 { Temperature::Fixed(o.t_init) } else { Temperature::Auto },
        cooling_ratio: o.cooling_ratio,
        epoch_len: (o.epoch_len > 0).then_some(o.epoch_len as usize),
        fd_interval_multiplier: (o.fd_every > 0).then_some(o.fd_every as usize),
        fd_params: FdParams {
            num_iters: o.fd_iters as usize,
            seed: o.seed,
            ..FdParams::default()
        },
        proxy,
        budget: (o.budget_seconds > 0.0).then(|| Duration::from_secs_f64(o.budget_seconds)),
    };
    config.validate()?;
    Ok(config)
}

/// Anneals the design's movable macros. The design itself is left untouched;
/// use `mp_sa_run_apply` to copy the best placement back.
#[no_mangle]
pub unsafe extern "C" fn mp_anneal(
    design: *const MpDesign,
    grid: *const MpGridSpec,
    proxy: *const MpProxyOptions,
    options: *const MpSaOptions,
    out: *mut *mut MpSaRun,
) -> MpStatus {
    guard(|| {
        let d = &arg(design, "design")?.design;
        let grid = grid_of(d, arg(grid, "grid")?)?;
        let options = arg(options, "options")?;
        let config = sa_config(options, proxy_of(arg(proxy, "proxy")?)?)?;
        let out = arg_mut(out, "out")?;
        let cnl = clustered(d, &grid, options.cluster)?;
        let result = run_parallel(&cnl, &grid, &config, options.workers as usize, &[options.seed], None)?;
        let best = result.best;
        let run = MpSaRun {
            best: best.best_cost,
            initial: best.initial_cost,
            placement: cnl.lift(&d.netlist, &d.placement, &best.best_placement),
            trace: best.cost_trace,
            best_worker: result.best_worker,
            steps: best.steps,
        };
        *out = Box::into_raw(Box::new(run));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mp_sa_run_free(run: *mut MpSaRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Best and initial costs of the winning worker.
#[no_mangle]
pub unsafe extern "C" fn mp_sa_run_costs(run: *const MpSaRun, best: *mut MpBreakdown, initial: *mut MpBreakdown) -> MpStatus {
    guard(|| {
        let run = arg(run, "run")?;
        *arg_mut(best, "best")? = run.best.into();
        if let Some(initial) = initial.as_mut() {
            *initial = run.initial.into();
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mp_sa_run_best_worker(run: *const MpSaRun) -> usize {
    run.as_ref().map_or(0, |r| r.best_worker)
}

#[no_mangle]
pub unsafe extern "C" fn mp_sa_run_steps(run: *const MpSaRun) -> usize {
    run.as_ref().map_or(0, |r| r.steps)
}

#[no_mangle]
pub unsafe extern "C" fn mp_sa_run_trace_len(run: *const MpSaRun) -> usize {
    run.as_ref().map_or(0, |r| r.trace.len())
}

/// Copies up to `capacity` trace points of the winning worker into `steps`
/// and `costs` and returns how many were written.
#[no_mangle]
pub unsafe extern "C" fn mp_sa_run_trace(run: *const MpSaRun, steps: *mut u64, costs: *mut f64, capacity: usize) -> usize {
    let Some(run) = run.as_ref() else { return 0 };
    if steps.is_null() || costs.is_null() {
        return 0;
    }
    let n = capacity.min(run.trace.len());
    let steps = std::slice::from_raw_parts_mut(steps, n);
    let costs = std::slice::from_raw_parts_mut(costs, n);
    for (k, &(s, c)) in run.trace[..n].iter().enumerate() {
        steps[k] = s as u64;
        costs[k] = c;
    }
    n
}

/// Moves the design's nodes to the run's best placement. Std cells that were
/// clustered keep their locations.
#[no_mangle]
pub unsafe extern "C" fn mp_sa_run_apply(run: *const MpSaRun, design: *mut MpDesign) -> MpStatus {
    guard(|| {
        let run = arg(run, "run")?;
        let d = &mut arg_mut(design, "design")?.design;
        if run.placement.len() != d.netlist.nodes.len() {
            return Err(macroplace::Error::LengthMismatch(run.placement.len(), d.netlist.nodes.len()).into());
        }
        d.placement = run.placement.clone();
        Ok(())
    })
}

/// Kendall tau-b of two equal-length samples.
#[no_mangle]
pub unsafe extern "C" fn mp_kendall_tau(xs: *const f64, ys: *const f64, n: usize, out: *mut f64) -> MpStatus {
    guard(|| {
        if xs.is_null() || ys.is_null() {
            return Err(null(if xs.is_null() { "xs" } else { "ys" }));
        }
        let xs = std::slice::from_raw_parts(xs, n);
        let ys = std::slice::from_raw_parts(ys, n);
        *arg_mut(out, "out")? = macroplace::study::kendall_tau(xs, ys)?;
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_into_config() {
        let o = mp_sa_options_default();
        let c = sa_config(&o, ProxyConfig::default()).ok().unwrap();
        let d = SaConfig::default();
        assert_eq!(c.max_steps, d.max_steps);
        assert_eq!(c.t_init, Temperature::Auto);
        assert_eq!(c.action_weights, d.action_weights);
        assert!(c.budget.is_none());
    }

    #[test]
    fn zero_workers_rejected() {
        let mut o = mp_sa_options_default();
        o.workers = 0;
        assert!(sa_config(&o, ProxyConfig::default()).is_err());
    }

    #[test]
    fn version_is_terminated() {
        let v = unsafe { CStr::from_ptr(mp_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
