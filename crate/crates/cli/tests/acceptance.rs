//! The twelve acceptance criteria at their stated tolerances.
//! Run with `cargo test -p bsym --test acceptance`; prints one line per criterion.

use bilinear_calculus::asym::{
    borel_sum, check_expansion_criterion, select_epsilons, shell_decay, CriterionOptions,
    SeriesTerm, SumOptions,
};
use bilinear_calculus::bounds::{
    estimate_norm, l2_wsinf_check, leibniz_ratio_sweep, leibniz_split, phi_partition_error,
    reconstruction_residual, sample_points, sobolev_threshold, Exponents, SweepOptions,
};
use bilinear_calculus::fourier::random_trig_polynomial;
use bilinear_calculus::kernel::{decay_fit, kernel_cut, refinement_check, KernelOptions};
use bilinear_calculus::operator::DiscreteBilinearOp;
use bilinear_calculus::symbol::families::{elliptic, frequency_bump, localize};
use bilinear_calculus::symbol::{
    class_report, ClassParams, SeminormConfig, SymbolExpr, SymbolSpec,
};
use bilinear_calculus::transpose::{
    duality_residual, remainder_order_fit, route_agreement, transpose_class_report,
    RemainderFitOptions, TransposeIndex,
};
use bilinear_calculus::GridSpec;
use bsym::commands::{builtin_specs, cz_order_zero, modulated_order_zero, spec_name};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::FRAC_PI_2;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

/// Name, optional runtime budget in seconds, check.
type Criterion = (&'static str, Option<u64>, fn() -> Outcome);

const BOTH: [TransposeIndex; 2] = [TransposeIndex::First, TransposeIndex::Second];

fn builtins(bump_width: f64) -> Vec<(String, bilinear_calculus::symbol::LoadedSymbol)> {
    builtin_specs(bump_width)
        .iter()
        .map(|s| (spec_name(s), s.resolve().expect("built-in resolves")))
        .collect()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn identity_multiplication() -> Outcome {
    let grid = GridSpec::standard(64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let f = random_trig_polynomial(grid, 12, false, &mut rng);
    let g = random_trig_polynomial(grid, 12, false, &mut rng);
    let t = DiscreteBilinearOp::from_symbol(&SymbolExpr::one(), grid)
        .apply(&f, &g)
        .unwrap();
    let err = t.max_abs_diff(&f.mul(&g).unwrap());
    check(err < 1e-10, format!("max error {err:.2e}"))
}

fn duality_exactness() -> Outcome {
    let grid = GridSpec::standard(32).unwrap();
    let mut worst = (0.0f64, String::new());
    for (name, s) in builtins(4.0) {
        let op = DiscreteBilinearOp::from_symbol(&s.expr, grid);
        for which in BOTH {
            let r = duality_residual(&op, which, 50, 2).unwrap();
            if r >= worst.0 {
                worst = (r, format!("{name} {which:?}"));
            }
        }
    }
    check(
        worst.0 < 1e-10,
        format!("worst residual {:.2e} ({})", worst.0, worst.1),
    )
}

fn route_agreement_all() -> Outcome {
    let grid = GridSpec::standard(32).unwrap();
    let mut worst = (0.0f64, String::new());
    for (name, s) in builtins(4.0) {
        let local = localize(&s.expr, &grid);
        for which in BOTH {
            let r = route_agreement(&local, which, &grid).unwrap();
            if r.measured() >= worst.0 {
                let scope = if r.band_limited {
                    "trusted band"
                } else {
                    "all samples"
                };
                worst = (r.measured(), format!("{name} {which:?}, {scope}"));
            }
        }
    }
    check(
        worst.0 < 1e-8,
        format!("worst difference {:.2e} ({})", worst.0, worst.1),
    )
}

fn class_invariance() -> Outcome {
    let grid = GridSpec::standard(128).unwrap();
    let mut worst = (0.0f64, String::new());
    for (name, s) in builtins(2.0) {
        let rep = transpose_class_report(&s.expr, &s.class, TransposeIndex::First, &grid, 2, 0.25)
            .unwrap();
        if rep.worst_growth() >= worst.0 {
            worst = (rep.worst_growth(), name);
        }
    }
    check(
        worst.0 <= 0.25,
        format!("worst top-shell growth {:.3} ({})", worst.0, worst.1),
    )
}

fn remainder_orders() -> Outcome {
    let s = modulated_order_zero();
    let grid = GridSpec::standard(256).unwrap();
    let options = RemainderFitOptions::default();
    let mut parts = Vec::new();
    let mut ok = true;
    for (n, slack) in [(1usize, 0.35), (2, 0.5)] {
        let fit = remainder_order_fit(&s.expr, &s.class, TransposeIndex::First, n, &grid, &options)
            .unwrap();
        let bound = -(n as f64) + slack;
        ok &= fit.degenerate_zero || (fit.exponent <= bound && fit.r_squared >= 0.9);
        parts.push(format!(
            "N={n}: {:.3} (<= {bound}, r^2 {:.3})",
            fit.exponent, fit.r_squared
        ));
    }
    check(ok, parts.join(", "))
}

struct Construction {
    series: Vec<SeriesTerm>,
    schedule: bilinear_calculus::asym::SumSchedule,
    options: SumOptions,
    sum: SymbolExpr,
}

fn construction() -> Construction {
    let series: Vec<SeriesTerm> = (0..=4)
        .map(|j| SeriesTerm::new(elliptic(-(j as f64)), -(j as f64)))
        .collect();
    let options = SumOptions::default();
    let schedule = select_epsilons(&series, 4, &options).unwrap();
    let sum = borel_sum(&series, &schedule, &options.cutoff);
    Construction {
        series,
        schedule,
        options,
        sum,
    }
}

fn borel_construction() -> Outcome {
    let c = construction();
    let rep = class_report(
        &c.sum,
        &ClassParams::new(0.0, 1.0, 0.0),
        2,
        6,
        &SeminormConfig::default(),
    )
    .unwrap();
    let mut ok = rep.worst_growth() <= 0.25;
    let mut parts = vec![format!("class growth {:.3}", rep.worst_growth())];
    let co = CriterionOptions::default();
    for n in 1..=2usize {
        let partial = SymbolExpr::sum(c.series.iter().take(n).map(|t| t.expr.clone()).collect());
        let scale = c.schedule.window_scale(n, &c.options.cutoff, co.radii[0]);
        let radii: Vec<f64> = co.radii.iter().map(|r| r * scale).collect();
        let fit = shell_decay(&(c.sum.clone() - partial), &radii, &co).unwrap();
        ok &= fit.degenerate_zero || fit.exponent <= c.series[n].order + 0.35;
        parts.push(format!("N={n}: {:.3}", fit.exponent));
    }
    let other = borel_sum(&c.series, &c.schedule.shrunk(0.5), &c.options.cutoff);
    let dyadic: Vec<f64> = (0..12).map(|k| 8.0 * 2f64.powi(k)).collect();
    let diff = shell_decay(&(c.sum.clone() - other), &dyadic, &co).unwrap();
    ok &= diff.degenerate_zero || diff.exponent <= c.series[2].order + 0.35;
    parts.push(format!("schedule difference {:.3}", diff.exponent));
    check(ok, parts.join(", "))
}

fn expansion_criterion() -> Outcome {
    let c = construction();
    let mut co = CriterionOptions::default();
    co.step_scales = c
        .schedule
        .criterion_scales(2, &c.options.cutoff, co.radii[0]);
    let mus = [1.0, 2.0];
    let good = check_expansion_criterion(&c.sum, &c.series, &mus, &co).unwrap();
    let bad =
        check_expansion_criterion(&(c.sum.clone() + elliptic(0.0)), &c.series, &mus, &co).unwrap();
    check(
        good.passed && !bad.passed,
        format!(
            "construction passes: {}, spurious tail rejected: {}",
            good.passed, !bad.passed
        ),
    )
}

fn kernel_regimes() -> Outcome {
    let options = KernelOptions {
        fit_window: Some((0.05, 0.5)),
        ..KernelOptions::default()
    };
    let mut ok = true;
    let mut parts = Vec::new();
    let coarse = GridSpec::new(1, FRAC_PI_2, 128).unwrap();
    let rc =
        refinement_check(&(elliptic(-5.0) * kernel_cut(&coarse)), &coarse, 0, 0, 0.05).unwrap();
    ok &= rc.relative_change <= 0.05;
    parts.push(format!("(iii) change {:.4}", rc.relative_change));

    let cz = cz_order_zero();
    let fine = GridSpec::new(1, FRAC_PI_2, 512).unwrap();
    let p = cz.expr.clone() * kernel_cut(&fine);
    for (order, expected, tol) in [(0u32, -2.0, 0.4), (1, -3.0, 0.5)] {
        let e = decay_fit(&p, &fine, 0.0, 1.0, order, false, &options)
            .unwrap()
            .power
            .exponent;
        ok &= (e - expected).abs() <= tol;
        parts.push(format!("(v) M={order}: {e:.3}"));
    }

    let bump = frequency_bump(8.0);
    let mut worst = 0.0f64;
    for weight in 0..=6 {
        worst = worst.max(
            refinement_check(&bump, &coarse, 0, weight, 0.05)
                .unwrap()
                .relative_change,
        );
    }
    ok &= worst <= 0.05;
    parts.push(format!("(ii) worst change {worst:.2e}"));
    check(ok, parts.join(", "))
}

fn sweep() -> SweepOptions {
    SweepOptions::default()
}

fn leibniz() -> Outcome {
    let pts = sample_points(2000, 64.0, 3);
    let mut worst = 0.0f64;
    for (_, s) in builtins(4.0) {
        for m in [0.0, 1.0, 2.0] {
            let split = leibniz_split(&s.expr, m).unwrap();
            worst = worst.max(reconstruction_residual(&s.expr, &split, &pts));
        }
    }
    let phi = phi_partition_error(10_000, 3);
    let trend = leibniz_ratio_sweep(&elliptic(1.0), 1.0, 0.0, &sweep())
        .unwrap()
        .trend_slope;
    check(
        worst < 1e-9 && phi < 1e-14 && trend < 0.1,
        format!("reconstruction {worst:.2e}, phi partition {phi:.2e}, trend slope {trend:.3}"),
    )
}

fn l2_wsinf() -> Outcome {
    let s0 = sobolev_threshold(1, 0.0).unwrap();
    let s_half = sobolev_threshold(1, 0.5).unwrap();
    let mut ok = s0 == 3 && s_half == 4;
    let mut parts = vec![format!("s = {s0}, {s_half}")];
    for spec in [
        SymbolSpec::family("identity", &[]),
        SymbolSpec::family("frequency_bump", &[("width", 4.0)]),
        SymbolSpec::family("chirp", &[("delta", 0.5), ("amplitude", 1.0)]),
    ] {
        let s = spec.resolve().unwrap();
        let rep = l2_wsinf_check(&s.expr, s.class.rho, s.class.delta, 3, &sweep()).unwrap();
        ok &= !rep.sweep.unbounded_trend;
        if s.expr.is_one() {
            ok &= rep.sweep.ratio_max <= 1.0 + 1e-9;
            parts.push(format!("identity ratio {:.6}", rep.sweep.ratio_max));
        }
        parts.push(format!(
            "{} slope {:.3}",
            spec_name(&spec),
            rep.sweep.trend_slope
        ));
    }
    check(ok, parts.join(", "))
}

fn positive_control() -> Outcome {
    let est = estimate_norm(
        &elliptic(1.0),
        Exponents::new(4.0, 4.0, 2.0).unwrap(),
        &sweep(),
    )
    .unwrap();
    check(
        est.unbounded_trend,
        format!("elliptic(1) trend slope {:.3}", est.trend_slope),
    )
}

fn determinism() -> Outcome {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let code = bsym::run([
            "bsym",
            "--seed",
            "11",
            "--output-dir",
            d.path().to_str().unwrap(),
            "full-suite",
        ]);
        if code != 0 {
            return Err(format!("full-suite exited {code}"));
        }
    }
    let mut names: Vec<_> = std::fs::read_dir(dirs[0].path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    for name in &names {
        let a = std::fs::read(dirs[0].path().join(name)).unwrap();
        let b = std::fs::read(dirs[1].path().join(name)).map_err(|e| format!("{name:?}: {e}"))?;
        if a != b {
            return Err(format!("{name:?} differs"));
        }
    }
    Ok(format!("{} files byte-identical", names.len()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("identity multiplication", Some(1), identity_multiplication),
        ("duality exactness", Some(30), duality_exactness),
        ("route agreement", None, route_agreement_all),
        ("transpose class invariance", None, class_invariance),
        ("remainder orders", Some(120), remainder_orders),
        ("asymptotic sum construction", None, borel_construction),
        ("expansion criterion", None, expansion_criterion),
        ("kernel regimes", Some(180), kernel_regimes),
        ("Leibniz identity", None, leibniz),
        ("L2 x W^{s,inf} bound", None, l2_wsinf),
        ("positive control", None, positive_control),
        ("determinism", None, determinism),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let over = budget.is_some_and(|b| elapsed > Duration::from_secs(b));
        let (tag, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; over the {}s budget", budget.unwrap())),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!(
            "{tag} {:>2} {name:<28} {detail} [{:.2}s]",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
