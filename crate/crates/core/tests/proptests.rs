//! Property tests for the structural invariants of the library.

use plap_core::closed_forms::*;
use plap_core::elliptic::*;
use plap_core::parabolic::*;
use plap_core::principles::*;
use plap_core::scenarios::{run_scenario, Overrides};
use plap_core::*;
use proptest::prelude::*;

fn ulps_apart(a: f64, b: f64) -> u64 {
    (a.to_bits() as i64 - b.to_bits() as i64).unsigned_abs()
}

fn sine_field(g: &Grid, coeffs: &[f64]) -> Field {
    let (lo, hi) = (g.node(0), g.node(g.n() - 1));
    sample(g, |x| {
        let s = (x - lo) / (hi - lo);
        coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c * ((j + 1) as f64 * std::f64::consts::PI * s).sin())
            .sum()
    })
    .unwrap()
}

fn stf_from(g: &Grid, tm: &TimeMesh, data: &[f64]) -> SpaceTimeField {
    let n = g.n();
    let slices = (0..=tm.steps())
        .map(|k| Field::new(*g, data[k * n..(k + 1) * n].to_vec()).unwrap())
        .collect();
    SpaceTimeField::new(*g, *tm, slices).unwrap()
}

fn space_time_data(n: usize, steps: usize, lo: f64, hi: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(lo..hi, n * (steps + 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn grid_nodes_are_uniform(a in -10.0f64..10.0, len in 1e-3f64..20.0, n in 3usize..5000) {
        let b = a + len;
        let g = Grid::interval(a, b, n).unwrap();
        prop_assert_eq!(g.nodes().len(), n);
        prop_assert_eq!(g.node(0), a);
        prop_assert!(ulps_apart(g.node(n - 1), b) <= 4);
        prop_assert!(g.h() > 0.0);
        prop_assert!(ulps_apart(g.h() * (n - 1) as f64, b - a) <= 4);
    }

    #[test]
    fn radial_grid_spans_zero_to_radius(r in 1e-2f64..10.0, dim in 1usize..5, n in 3usize..2000) {
        let g = Grid::radial(r, dim, n).unwrap();
        prop_assert_eq!(g.radius_of(0), 0.0);
        prop_assert!(ulps_apart(g.radius_of(n - 1), r) <= 4);
    }

    #[test]
    fn time_mesh_covers_final_time(t in 1e-3f64..100.0, steps in 1usize..100_000) {
        let tm = TimeMesh::new(t, steps).unwrap();
        prop_assert!(tm.dt() > 0.0);
        prop_assert!((tm.dt() * steps as f64 - t).abs() <= 4.0 * f64::EPSILON * t);
        prop_assert_eq!(tm.time(steps), t);
    }

    #[test]
    fn sampling_a_constant(c in -1e3f64..1e3, n in 3usize..500) {
        let g = Grid::interval(-1.0, 2.0, n).unwrap();
        let f = sample(&g, |_| c).unwrap();
        prop_assert!(f.values().iter().all(|v| *v == c));
    }

    #[test]
    fn sup_diff_is_a_metric(
        a in prop::collection::vec(-5.0f64..5.0, 40),
        b in prop::collection::vec(-5.0f64..5.0, 40),
        c in prop::collection::vec(-5.0f64..5.0, 40),
    ) {
        let g = Grid::interval(0.0, 1.0, 40).unwrap();
        let (u, v, w) = (
            Field::new(g, a).unwrap(),
            Field::new(g, b).unwrap(),
            Field::new(g, c).unwrap(),
        );
        prop_assert_eq!(sup_diff(&u, &v).unwrap(), sup_diff(&v, &u).unwrap());
        prop_assert_eq!(sup_diff(&u, &u).unwrap(), 0.0);
        prop_assert!(sup_diff(&u, &w).unwrap() <= sup_diff(&u, &v).unwrap() + sup_diff(&v, &w).unwrap() + 1e-12);
    }

    #[test]
    fn p_laplacian_is_monotone(
        p in 1.1f64..4.0,
        a in prop::collection::vec(-2.0f64..2.0, 6),
        b in prop::collection::vec(-2.0f64..2.0, 6),
        radial in any::<bool>(),
    ) {
        // ⟨−Δp u + Δp v, u − v⟩ ≥ 0 for u = v on the boundary
        let g = if radial { Grid::radial(1.0, 3, 129).unwrap() } else { Grid::interval(-1.0, 1.0, 129).unwrap() };
        let u = sine_field(&g, &a);
        let v = sine_field(&g, &b);
        let eps = 1e-3;
        let lu = discrete_p_laplacian(&u, p, eps).unwrap();
        let lv = discrete_p_laplacian(&v, p, eps).unwrap();
        let pairing: f64 = g
            .interior()
            .map(|i| g.volume(i) * (lv.values()[i] - lu.values()[i]) * (u.values()[i] - v.values()[i]))
            .sum();
        let boundary_i = g.boundary_nodes();
        let pinned = boundary_i.iter().all(|&i| (u.values()[i] - v.values()[i]).abs() < 1e-12);
        prop_assume!(pinned);
        prop_assert!(pairing >= -1e-10, "pairing {}", pairing);
    }

    #[test]
    fn energy_gradient_is_its_derivative(
        p in 1.2f64..4.0,
        lambda in -2.0f64..2.0,
        a in prop::collection::vec(-1.0f64..1.0, 4),
        z in prop::collection::vec(-1.0f64..1.0, 4),
        hs in prop::collection::vec(-1.0f64..1.0, 4),
    ) {
        let g = Grid::interval(-1.0, 1.0, 101).unwrap();
        let spec = EnergySpec::new(p, lambda, sine_field(&g, &hs)).unwrap();
        let w = sine_field(&g, &a);
        let dz = sine_field(&g, &z);
        let grad = energy_gradient(&w, &spec).unwrap();
        let pair: f64 = grad.values().iter().zip(dz.values()).map(|(x, y)| x * y).sum();
        let tau = 1e-6;
        let shift = |s: f64| Field::new(g, w.values().iter().zip(dz.values()).map(|(x, y)| x + s * y).collect()).unwrap();
        let fd = (energy(&shift(tau), &spec).unwrap() - energy(&shift(-tau), &spec).unwrap()) / (2.0 * tau);
        prop_assert!((fd - pair).abs() <= 1e-6 * pair.abs().max(1.0), "{} vs {}", fd, pair);
    }

    #[test]
    fn linearization_bounds(
        p in 1.01f64..6.0,
        dim in 1usize..5,
        a in prop::collection::vec(-10.0f64..10.0, 4),
        xi in prop::collection::vec(-10.0f64..10.0, 4),
    ) {
        let a = &a[..dim];
        let xi = &xi[..dim];
        prop_assume!(a.iter().any(|x| x.abs() > 1e-6));
        let m = linearization_matrix(a, p).unwrap();
        let q = m.quadratic_form(xi);
        let n2: f64 = xi.iter().map(|x| x * x).sum();
        let lo = (p - 1.0).min(1.0) * n2;
        let hi = (p - 1.0).max(1.0) * n2;
        let slack = 8.0 * f64::EPSILON * hi;
        prop_assert!(q >= lo - slack && q <= hi + slack, "{} not in [{}, {}]", q, lo, hi);
        for i in 0..dim {
            for j in 0..dim {
                prop_assert_eq!(m.entries[i][j], m.entries[j][i]);
            }
        }
    }

    #[test]
    fn hopf_barrier_bounded_by_eps(
        eps in 1e-3f64..5.0,
        alpha in 1e-2f64..10.0,
        radius in 0.1f64..3.0,
        x in prop::collection::vec(-5.0f64..5.0, 2),
        t in -3.0f64..3.0,
    ) {
        let params = BarrierParams { eps, alpha, radius, x0: vec![0.0, 0.0], t0: 0.0 };
        prop_assert!(hopf_barrier(&x, t, &params) <= eps);
    }

    #[test]
    fn barenblatt_nonnegative_and_compact(r in 0.0f64..20.0, t in 0.0f64..10.0, p in 2.1f64..5.0, dim in 1usize..4) {
        let b = BarenblattParams::new(p, dim, 1.0, 1.0).unwrap();
        let u = barenblatt(r, t, &b);
        prop_assert!(u >= 0.0);
        if r >= barenblatt_support_radius(t, &b) * (1.0 + 1e-12) {
            prop_assert_eq!(u, 0.0);
        }
    }

    #[test]
    fn self_comparison_has_zero_margin(data in space_time_data(12, 3, -2.0, 2.0)) {
        let g = Grid::interval(0.0, 1.0, 12).unwrap();
        let tm = TimeMesh::new(1.0, 3).unwrap();
        let u = stf_from(&g, &tm, &data);
        let r = check_wcp(&u, &u, 1e-9).unwrap();
        prop_assert_eq!(r.margin, 0.0);
        prop_assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn weak_reports_are_consistent(data in space_time_data(10, 4, -1.0, 3.0), tol in 0.0f64..0.5) {
        let g = Grid::interval(0.0, 1.0, 10).unwrap();
        let tm = TimeMesh::new(1.0, 4).unwrap();
        let u = stf_from(&g, &tm, &data);
        let r = check_wmp(&u, tol);
        match r.verdict {
            Verdict::Violated => prop_assert!(r.margin < -tol),
            Verdict::Holds => prop_assert!(r.margin >= -tol),
            Verdict::Inconclusive => prop_assert!(false, "weak checks always decide"),
        }
        let zero = SpaceTimeField::zeros(&g, &tm);
        let c = check_wcp(&zero, &u, tol).unwrap();
        prop_assert_eq!(c.margin, r.margin);
        prop_assert_eq!(c.verdict, r.verdict);
    }

    #[test]
    fn strong_comparison_implies_weak(
        data_u in space_time_data(10, 4, -1.0, 1.0),
        data_v in space_time_data(10, 4, 0.0, 2.0),
        burn_in in 0usize..3,
    ) {
        let g = Grid::interval(0.0, 1.0, 10).unwrap();
        let tm = TimeMesh::new(1.0, 4).unwrap();
        let u = stf_from(&g, &tm, &data_u);
        let v = stf_from(&g, &tm, &data_v);
        let tol = 1e-3;
        if check_scp(&u, &v, tol, burn_in).unwrap().verdict == Verdict::Holds {
            prop_assert_eq!(check_wcp(&u, &v, tol).unwrap().verdict, Verdict::Holds);
        }
        if check_strong_comparison(&u, &v, tol).unwrap().verdict == Verdict::Holds {
            prop_assert_eq!(check_wcp(&u, &v, tol).unwrap().verdict, Verdict::Holds);
        }
    }

    #[test]
    fn positivity_times_are_ordered(data in space_time_data(10, 6, 0.0, 1.0), tol in 0.0f64..0.5) {
        let g = Grid::interval(0.0, 1.0, 10).unwrap();
        let tm = TimeMesh::new(1.0, 6).unwrap();
        let u = stf_from(&g, &tm, &data);
        let (tb, ts) = positivity_time(&u, tol);
        prop_assert!(tb <= ts);
        prop_assert!((0.0..=1.0).contains(&tb) && (0.0..=1.0).contains(&ts));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn weak_comparison_for_solved_pairs(
        p_idx in 0usize..3,
        lambda_neg in any::<bool>(),
        a in prop::collection::vec(-0.5f64..0.5, 3),
        gap in 0.0f64..0.5,
        f in -1.0f64..1.0,
        df in 0.0f64..1.0,
    ) {
        let p = [1.5, 2.0, 3.0][p_idx];
        let lambda = if lambda_neg { -1.0 } else { 0.0 };
        let g = Grid::interval(-1.0, 1.0, 65).unwrap();
        let tm = TimeMesh::new(0.2, 40).unwrap();
        let u0 = sine_field(&g, &a);
        let v0 = Field::new(g, u0.values().iter().enumerate().map(|(i, u)| u + gap * (1.0 - g.node(i).powi(2))).collect()).unwrap();
        let u = solve_parabolic(&ProblemSpec::new(p, lambda, u0, Source::Constant(f)).unwrap(), &tm).unwrap();
        let v = solve_parabolic(&ProblemSpec::new(p, lambda, v0, Source::Constant(f + df)).unwrap(), &tm).unwrap();
        let r = check_wcp(&u.field, &v.field, 10.0 * problem::DEFAULT_NEWTON_TOL).unwrap();
        prop_assert_eq!(r.verdict, Verdict::Holds, "margin {}", r.margin);
    }

    #[test]
    fn nonnegative_data_stay_nonnegative(
        p_idx in 0usize..3,
        a in prop::collection::vec(-1.0f64..1.0, 3),
        f in 0.0f64..1.0,
    ) {
        let p = [1.5, 2.0, 3.0][p_idx];
        let g = Grid::interval(-1.0, 1.0, 65).unwrap();
        let tm = TimeMesh::new(0.2, 40).unwrap();
        let u0 = sine_field(&g, &a).map(f64::abs).unwrap();
        let u = solve_parabolic(&ProblemSpec::new(p, 0.0, u0, Source::Constant(f)).unwrap(), &tm).unwrap();
        prop_assert_eq!(check_wmp(&u.field, 10.0 * problem::DEFAULT_NEWTON_TOL).verdict, Verdict::Holds);
    }
}

#[test]
fn scenario_runs_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let o = Overrides {
            n: Some(65),
            mt: Some(20),
            out: Some(dir.path().join(sub)),
            ..Default::default()
        };
        run_scenario("wcp-regimes", &o).unwrap()
    };
    let a = run("a");
    let b = run("b");
    assert_eq!(a.reports, b.reports);
    assert_eq!(a.pass, b.pass);
    for (x, y) in a.artifacts.iter().zip(&b.artifacts) {
        if x.extension().is_some_and(|e| e == "csv") {
            assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap(), "{}", x.display());
        }
    }
}
