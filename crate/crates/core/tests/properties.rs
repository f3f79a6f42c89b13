mod common;

use common::gen::{placement_instance, proxy_instance};
use common::oracle;
use macroplace::cluster::cluster_by_grid;
use macroplace::fd::FdParams;
use macroplace::grid::Grid;
use macroplace::netlist::{Canvas, NodeKind};
use macroplace::proxy::{proxy_cost, route_net, smooth_congestion, Demand, Direction, ProxyConfig, ProxyWeights};
use macroplace::sa::{anneal, SaConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn proxy_terms_match_oracle(
        seed in any::<u64>(),
        radius in 0usize..4,
        mh in 0.25f64..2.0,
        mv in 0.25f64..2.0,
    ) {
        let inst = proxy_instance(&mut ChaCha8Rng::seed_from_u64(seed));
        let cfg = ProxyConfig { smooth_radius: radius, macro_h_usage: mh, macro_v_usage: mv, ..Default::default() };
        let got = proxy_cost(&inst.netlist, &inst.placement, &inst.grid, &cfg).unwrap();
        prop_assert!(close(got.wirelength, oracle::wirelength(&inst.netlist, &inst.placement)));
        prop_assert!(close(got.density, oracle::density(&inst.netlist, &inst.placement, &inst.grid)));
        let want = oracle::congestion(&inst.netlist, &inst.placement, &inst.grid, radius, mh, mv);
        prop_assert!(close(got.congestion, want), "{} vs {}", got.congestion, want);
    }

    #[test]
    fn total_is_weighted_sum(seed in any::<u64>(), gamma in 0.0f64..4.0, lambda in 0.0f64..4.0) {
        let inst = proxy_instance(&mut ChaCha8Rng::seed_from_u64(seed));
        let w = ProxyWeights::new(gamma, lambda).unwrap();
        let cfg = ProxyConfig { weights: w, ..Default::default() };
        let b = proxy_cost(&inst.netlist, &inst.placement, &inst.grid, &cfg).unwrap();
        prop_assert!(close(b.total, b.wirelength + gamma * b.density + lambda * b.congestion));
        let base = proxy_cost(&inst.netlist, &inst.placement, &inst.grid, &ProxyConfig::default()).unwrap();
        prop_assert!(close(base.reweighted(w).total, b.total));
    }

    #[test]
    fn routed_demand_matches_oracle(
        cells in prop::collection::vec((0usize..6, 0usize..6), 1..7),
        weight in 0.1f64..3.0,
        src in 0usize..6,
    ) {
        let mut distinct: Vec<(usize, usize)> = Vec::new();
        for c in cells {
            if !distinct.contains(&c) {
                distinct.push(c);
            }
        }
        let src = src % distinct.len();
        let grid = Grid::with_default_capacity(Canvas::new(60.0, 60.0).unwrap(), 6, 6).unwrap();
        let mut d = Demand::zeros(&grid);
        route_net(&distinct, src, weight, &mut d).unwrap();

        // the oracle routes pins in the order [source, others...]
        let mut ordered = vec![distinct[src]];
        ordered.extend(distinct.iter().copied().filter(|&c| c != distinct[src]));
        let mut segs = Vec::new();
        let l = |a: (usize, usize), b: (usize, usize), out: &mut Vec<oracle::Segment>| {
            out.push(oracle::Segment::Horizontal(a.1, a.0, b.0, weight));
            out.push(oracle::Segment::Vertical(b.0, a.1, b.1, weight));
        };
        let dist = |a: (usize, usize), b: (usize, usize)| a.0.abs_diff(b.0) + a.1.abs_diff(b.1);
        match ordered.len() {
            1 => {}
            3 => {
                let t = &ordered;
                match [(0, 1, 2), (0, 2, 1), (1, 2, 0)]
                    .into_iter()
                    .find(|&(a, b, _)| t[a].0 == t[b].0 || t[a].1 == t[b].1)
                {
                    Some((a, b, c)) => {
                        l(t[a], t[b], &mut segs);
                        let from = if dist(t[b], t[c]) < dist(t[a], t[c]) { t[b] } else { t[a] };
                        l(from, t[c], &mut segs);
                    }
                    None => {
                        l(t[0], t[1], &mut segs);
                        l(t[0], t[2], &mut segs);
                    }
                }
            }
            _ => {
                for &o in &ordered[1..] {
                    l(ordered[0], o, &mut segs);
                }
            }
        }
        let (h, v) = oracle::demand(&grid, &segs);
        prop_assert_eq!(d.h, h);
        prop_assert_eq!(d.v, v);
    }

    #[test]
    fn smoothing_conserves_each_line(
        values in prop::collection::vec(0.0f64..10.0, 30),
        radius in 0usize..5,
        horizontal in any::<bool>(),
    ) {
        let (n_cols, n_rows) = (6, 5);
        let dir = if horizontal { Direction::H } else { Direction::V };
        let out = smooth_congestion(&values, n_cols, n_rows, dir, radius);
        let want = oracle::smooth(&values, n_cols, n_rows, horizontal, radius);
        for (a, b) in out.iter().zip(&want) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        let (lines, len) = if horizontal { (n_rows, n_cols) } else { (n_cols, n_rows) };
        for line in 0..lines {
            let at = |k: usize| if horizontal { line * n_cols + k } else { k * n_cols + line };
            let before: f64 = (0..len).map(|k| values[at(k)]).sum();
            let after: f64 = (0..len).map(|k| out[at(k)]).sum();
            prop_assert!((before - after).abs() < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn annealed_macros_stay_legal(seed in any::<u64>(), n_macros in 2usize..6, n_fixed in 0usize..3) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let inst = placement_instance(&mut r, n_macros, n_fixed, 20);
        let cnl = cluster_by_grid(&inst.netlist, &inst.placement, &inst.grid).unwrap();
        let config = SaConfig {
            seed,
            max_steps: 150,
            fd_params: FdParams { num_iters: 10, ..Default::default() },
            ..Default::default()
        };
        let res = anneal(&cnl, &inst.grid, &config).unwrap();
        prop_assert!(res.best_cost.total <= res.initial_cost.total);
        let canvas = inst.grid.canvas_rect();
        let eps = inst.grid.eps();
        let nl = &cnl.netlist;
        let mut boxes = Vec::new();
        for (i, node) in nl.nodes.iter().enumerate() {
            if node.kind != NodeKind::Macro {
                continue;
            }
            let loc = res.best_placement.get(i).unwrap();
            if !node.movable {
                prop_assert_eq!(Some(loc), cnl.initial.get(i));
            } else {
                let (col, row) = inst.grid.cell_of(loc.x, loc.y);
                let (cx, cy) = inst.grid.cell_center(col, row).unwrap();
                prop_assert!((loc.x - cx).abs() < eps && (loc.y - cy).abs() < eps);
            }
            let bb = res.best_placement.bbox(nl, i);
            if node.movable {
                prop_assert!(bb.inside(&canvas, eps));
            }
            boxes.push((bb, node.movable));
        }
        for (a, &(ba, ma)) in boxes.iter().enumerate() {
            for &(bb, mb) in &boxes[a + 1..] {
                prop_assert!(!((ma || mb) && ba.overlaps_eps(&bb, eps)));
            }
        }
    }
}
