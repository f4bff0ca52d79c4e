use bilinear_calculus::asym::{make_cutoff, select_epsilons, SeriesTerm, SumOptions};
use bilinear_calculus::bounds::{leibniz_split, phi, reconstruction_residual, sample_points};
use bilinear_calculus::fourier::{
    forward_transform, inverse_transform, lp_norm, random_trig_polynomial,
};
use bilinear_calculus::kernel::s_metric;
use bilinear_calculus::operator::{apply_frozen, DiscreteBilinearOp};
use bilinear_calculus::symbol::families::{builtin_family, elliptic, frequency_bump, FAMILY_NAMES};
use bilinear_calculus::symbol::tape::Point;
use bilinear_calculus::symbol::{class_report, ClassParams, SeminormConfig, SymbolExpr};
use bilinear_calculus::transpose::{extract_symbol, transpose_adjoint_oracle, TransposeIndex};
use bilinear_calculus::{GridFunction, GridSpec, MultiIndex, C64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

fn family(i: usize) -> SymbolExpr {
    let name = FAMILY_NAMES[i % FAMILY_NAMES.len()];
    let params: BTreeMap<String, f64> = match name {
        "elliptic" | "x_modulated" => [("m".to_string(), 1.0)].into(),
        "frequency_bump" => [("width".to_string(), 3.0)].into(),
        "chirp" => [("delta".to_string(), 0.5), ("amplitude".to_string(), 1.0)].into(),
        _ => BTreeMap::new(),
    };
    builtin_family(name, &params).unwrap().0
}

fn trig_pair(grid: GridSpec, seed: u64) -> (GridFunction, GridFunction) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let band = grid.points_per_axis() / 4;
    let f = random_trig_polynomial(grid, band, false, &mut rng);
    let g = random_trig_polynomial(grid, band, false, &mut rng);
    (f, g)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fourier_round_trip_and_parseval(log_n in 3u32..7, seed in any::<u64>(), half in 0.5f64..4.0) {
        let grid = GridSpec::new(1, half, 1 << log_n).unwrap();
        let f = trig_pair(grid, seed).0;
        let back = inverse_transform(&forward_transform(&f));
        prop_assert!(back.max_abs_diff(&f) <= 1e-12 * f.sup_norm().max(1.0));
        let s = forward_transform(&f);
        let weighted: f64 = s.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() * 2.0 * std::f64::consts::PI * grid.dual_cell_volume();
        let l2 = lp_norm(&f, 2.0);
        prop_assert!((l2 * l2 - weighted).abs() <= 1e-10 * weighted.max(1.0));
    }

    #[test]
    fn apply_is_bilinear(i in 0usize..7, seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let grid = GridSpec::standard(16).unwrap();
        let op = DiscreteBilinearOp::from_symbol(&family(i), grid);
        let (f, g) = trig_pair(grid, seed);
        let (h, _) = trig_pair(grid, seed ^ 0x55);
        let (ca, cb) = (C64::new(a, 0.3), C64::new(b, -0.7));
        let lhs = op.apply(&f.scale(ca).add(&h.scale(cb)).unwrap(), &g).unwrap();
        let rhs = op.apply(&f, &g).unwrap().scale(ca).add(&op.apply(&h, &g).unwrap().scale(cb)).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-10 * rhs.sup_norm().max(1.0));
    }

    #[test]
    fn identity_symbol_multiplies(seed in any::<u64>()) {
        let grid = GridSpec::standard(32).unwrap();
        let (f, g) = trig_pair(grid, seed);
        let t = DiscreteBilinearOp::from_symbol(&SymbolExpr::one(), grid).apply(&f, &g).unwrap();
        prop_assert!(t.max_abs_diff(&f.mul(&g).unwrap()) < 1e-10);
    }

    #[test]
    fn frozen_route_matches_direct(i in 0usize..7, seed in any::<u64>()) {
        let grid = GridSpec::standard(16).unwrap();
        let sigma = family(i);
        let (f, g) = trig_pair(grid, seed);
        let direct = DiscreteBilinearOp::from_symbol(&sigma, grid).apply(&f, &g).unwrap();
        let frozen = apply_frozen(&sigma, &f, &g).unwrap();
        prop_assert!(direct.max_abs_diff(&frozen) <= 1e-10 * direct.sup_norm().max(1.0));
    }

    #[test]
    fn mixed_partials_commute(i in 0usize..7, x in -3.0f64..3.0, xi in -20.0f64..20.0, eta in -20.0f64..20.0) {
        let sigma = family(i);
        let (a, b, z) = (MultiIndex::d1(1), MultiIndex::d1(1), MultiIndex::d1(0));
        let p = Point::d1(x, xi, eta);
        let stepwise = sigma.derivative(&a, &z, &z).derivative(&z, &b, &z).eval(1, &p);
        let joint = sigma.derivative(&a, &b, &z).eval(1, &p);
        prop_assert!((stepwise - joint).norm() <= 1e-10 * joint.norm().max(1.0));
    }

    #[test]
    fn leibniz_split_reconstructs(i in 0usize..7, m in 0.0f64..2.0, seed in any::<u64>()) {
        let sigma = family(i);
        let split = leibniz_split(&sigma, m).unwrap();
        let pts = sample_points(200, 64.0, seed);
        prop_assert!(reconstruction_residual(&sigma, &split, &pts) < 1e-12);
    }

    #[test]
    fn phi_partitions_unity(t in -40.0f64..40.0) {
        let r = t.exp();
        prop_assert!((phi(r) + phi(1.0 / r) - 1.0).abs() < 1e-14);
        prop_assert!((0.0..=1.0).contains(&phi(r)));
    }

    #[test]
    fn s_metric_is_symmetric(x in -5.0f64..5.0, y in -5.0f64..5.0, z in -5.0f64..5.0) {
        let s = s_metric(x, y, z);
        prop_assert!(s >= 0.0);
        prop_assert_eq!(s, s_metric(x, z, y));
        prop_assert_eq!(s_metric(x, x, x), 0.0);
        prop_assert!((s - ((x - y).abs() + (x - z).abs() + (y - z).abs())).abs() < 1e-15);
    }

    #[test]
    fn cutoff_stays_in_unit_interval(xi in -4.0f64..4.0, eta in -4.0f64..4.0) {
        let psi = make_cutoff(1.0, 2.0).unwrap().expr();
        let v = psi.eval(1, &Point::d1(0.0, xi, eta));
        let r = xi.hypot(eta);
        prop_assert!(v.im == 0.0 && (0.0..=1.0).contains(&v.re));
        if r <= 1.0 { prop_assert_eq!(v.re, 0.0); }
        if r >= 2.0 { prop_assert_eq!(v.re, 1.0); }
    }

    #[test]
    fn schedules_satisfy_invariants(scale in 0.1f64..50.0, terms in 2usize..5) {
        let series: Vec<SeriesTerm> = (0..=terms)
            .map(|j| SeriesTerm::new(elliptic(-(j as f64)) * scale, -(j as f64)))
            .collect();
        let s = select_epsilons(&series, terms, &SumOptions::default()).unwrap();
        prop_assert!(s.validate().is_ok());
        for w in s.epsilons.windows(2) {
            prop_assert!(w[1] <= w[0] / 2.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn transpose_is_an_involution(width in 1.5f64..4.0, shift in 0.0f64..2.0) {
        let grid = GridSpec::standard(16).unwrap();
        let sigma = (SymbolExpr::x().cos() + 2.0 + shift) * frequency_bump(width);
        let op = DiscreteBilinearOp::from_symbol(&sigma, grid);
        for which in [TransposeIndex::First, TransposeIndex::Second] {
            let twice = transpose_adjoint_oracle(&transpose_adjoint_oracle(&op, which).unwrap(), which).unwrap();
            let d = extract_symbol(&twice).unwrap().max_abs_diff(&extract_symbol(&op).unwrap());
            prop_assert!(d < 1e-10);
        }
    }

    #[test]
    fn x_independent_symbols_have_no_x_seminorms(m in -2.0f64..2.0) {
        let report = class_report(&elliptic(m), &ClassParams::new(m, 1.0, 0.0), 2, 4, &SeminormConfig::default()).unwrap();
        for e in &report.entries {
            prop_assert!(e.value.is_finite() && e.value >= 0.0);
            if e.alpha.order() >= 1 {
                prop_assert_eq!(e.value, 0.0);
            }
        }
    }
}
