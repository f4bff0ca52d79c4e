//! One pipeline per command; `full-suite` strings them together on the built-ins.

use crate::report::{CsvTable, Report, Verdict};
use crate::{load_symbol, CliError, Command, Subject};
use bilinear_calculus::asym::{
    borel_sum, check_expansion_criterion, select_epsilons, shell_decay, CriterionOptions,
    SeriesTerm, SumOptions,
};
use bilinear_calculus::bounds::{
    estimate_norm, evidence_triples, l2_wsinf_check, leibniz_identity_check, leibniz_ratio_sweep,
    leibniz_split, phi_partition_error, reconstruction_residual, sample_points, sobolev_threshold,
    Exponents, SweepOptions, SweepReport,
};
use bilinear_calculus::fit::FitPoint;
use bilinear_calculus::fourier::random_trig_polynomial;
use bilinear_calculus::kernel::{
    decay_fit, kernel_cut, kernel_shell_profile, predict_regime, refinement_check, KernelOptions,
    Regime,
};
use bilinear_calculus::operator::{apply_frozen, sample_symbol, DiscreteBilinearOp};
use bilinear_calculus::symbol::families::{elliptic, in_trusted_band, localize, x_modulated};
use bilinear_calculus::symbol::{
    class_report, ClassParams, LoadedSymbol, SeminormConfig, SymbolExpr, SymbolSpec,
};
use bilinear_calculus::tolerances::Tolerances;
use bilinear_calculus::transpose::{
    adjoint_samples, duality_residual, expansion_truncation, remainder_order_fit, route_agreement,
    transpose_class_report, RemainderFitOptions, TransposeIndex,
};
use bilinear_calculus::{Error, GridSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

/// Shared run state. `detail` keeps full payloads and per-command CSV files;
/// the full suite turns it off and keeps one verdict table instead.
pub struct Ctx<'a> {
    pub tol: &'a Tolerances,
    pub seed: u64,
    pub detail: bool,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn which_index(which: u8) -> Result<TransposeIndex, CliError> {
    TransposeIndex::from_number(which).map_err(|e| usage(e.to_string()))
}

fn standard_grid(points: usize) -> Result<GridSpec, CliError> {
    GridSpec::standard(points).map_err(|e| usage(e.to_string()))
}

fn points_table(name: &str, key: &str, groups: &[(String, Vec<FitPoint>)]) -> CsvTable {
    let mut t = CsvTable::new(name, &[key, "radius", "value"]);
    for (label, pts) in groups {
        for p in pts {
            t.push([label.clone(), p.radius.to_string(), p.value.to_string()]);
        }
    }
    t
}

pub fn dispatch(cmd: &Command, tol: &Tolerances, seed: u64) -> Result<Report, CliError> {
    let ctx = Ctx {
        tol,
        seed,
        detail: true,
    };
    let config = serde_json::to_value(cmd).expect("command serializes");
    let mut r = Report::new(cmd.name(), seed, config, tol.clone());
    match cmd {
        Command::VerifyClass {
            symbol,
            max_order,
            shells,
        } => {
            let s = load_into(&mut r, &symbol.symbol)?;
            verify_class(&mut r, &ctx, &s.name, &s.symbol, *max_order, *shells)?;
        }
        Command::Apply {
            symbol,
            points,
            band,
        } => {
            let s = load_into(&mut r, &symbol.symbol)?;
            apply(&mut r, &ctx, &s.name, &s.symbol, *points, *band)?;
        }
        Command::Transpose {
            symbol,
            which,
            expand,
            points,
            trials,
        } => {
            let s = load_into(&mut r, &symbol.symbol)?;
            let which = which_index(*which)?;
            transpose(
                &mut r,
                &ctx,
                &s.name,
                &s.symbol,
                which,
                *expand,
                *points,
                *trials,
                *points >= 128,
            )?;
        }
        Command::Expand {
            symbol,
            which,
            order,
            points,
        } => {
            let s = load_into(&mut r, &symbol.symbol)?;
            expand(
                &mut r,
                &ctx,
                &s.name,
                &s.symbol,
                which_index(*which)?,
                *order,
                *points,
            )?;
        }
        Command::AsymSum { symbol, terms } => {
            let base = match symbol {
                Some(p) => Some(load_into(&mut r, p)?.symbol),
                None => None,
            };
            asym_sum(&mut r, &ctx, base.as_ref(), *terms)?;
        }
        Command::KernelDecay {
            symbol,
            order,
            points,
            half_period,
            compact,
        } => {
            let s = load_into(&mut r, &symbol.symbol)?;
            kernel_decay(
                &mut r,
                &ctx,
                &s.name,
                &s.symbol,
                *order,
                *points,
                *half_period,
                *compact,
            )?;
        }
        Command::Bounds { symbol, trials } => {
            let s = load_into(&mut r, &symbol.symbol)?;
            bounds(&mut r, &ctx, &s.name, &s.symbol, *trials)?;
        }
        Command::Leibniz { symbol, m } => {
            let s = load_into(&mut r, &symbol.symbol)?;
            leibniz(&mut r, &ctx, &s.name, &s.symbol, *m)?;
        }
        Command::FullSuite => full_suite(&mut r, tol, seed)?,
    }
    Ok(r)
}

fn load_into(r: &mut Report, path: &std::path::Path) -> Result<Subject, CliError> {
    let s = load_symbol(path)?;
    if let serde_json::Value::Object(map) = &mut r.config {
        map.insert(
            "symbol_spec".into(),
            serde_json::to_value(&s.spec).expect("spec serializes"),
        );
        map.insert(
            "declared_class".into(),
            serde_json::to_value(s.symbol.class).expect("class serializes"),
        );
    }
    Ok(s)
}

pub fn verify_class(
    r: &mut Report,
    ctx: &Ctx,
    name: &str,
    s: &LoadedSymbol,
    max_order: usize,
    shells: usize,
) -> Result<(), CliError> {
    let cfg = SeminormConfig {
        stabilization: ctx.tol.stabilization,
        ..SeminormConfig::default()
    };
    let rep = class_report(&s.expr, &s.class, max_order, shells, &cfg).map_err(|e| match e {
        Error::OrderCap { .. } | Error::InvalidArgument(_) => usage(e.to_string()),
        other => other.into(),
    })?;
    r.verdict(Verdict::at_most(
        "seminorm_stabilization",
        name,
        rep.worst_growth(),
        ctx.tol.stabilization,
    ));
    if ctx.detail {
        let mut t = CsvTable::new(
            "seminorms.csv",
            &["alpha", "beta", "gamma", "value", "previous"],
        );
        for e in &rep.entries {
            t.push([
                e.alpha.0[0].to_string(),
                e.beta.0[0].to_string(),
                e.gamma.0[0].to_string(),
                e.value.to_string(),
                e.previous.to_string(),
            ]);
        }
        r.table(t);
        r.result("class_report", &rep);
    } else {
        r.result(
            &format!("class:{name}"),
            json!({ "max_value": rep.max_value(), "worst_growth": rep.worst_growth() }),
        );
    }
    Ok(())
}

pub fn apply(
    r: &mut Report,
    ctx: &Ctx,
    name: &str,
    s: &LoadedSymbol,
    points: usize,
    band: usize,
) -> Result<(), CliError> {
    let grid = standard_grid(points)?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let f = random_trig_polynomial(grid, band, false, &mut rng);
    let g = random_trig_polynomial(grid, band, false, &mut rng);
    let t = DiscreteBilinearOp::from_symbol(&s.expr, grid).apply(&f, &g)?;
    let frozen = apply_frozen(&s.expr, &f, &g)?;
    let scale = t.sup_norm().max(1.0);
    r.verdict(Verdict::at_most(
        "apply_route_agreement",
        name,
        t.max_abs_diff(&frozen) / scale,
        ctx.tol.route_agreement,
    ));
    if s.expr.is_one() {
        r.verdict(Verdict::at_most(
            "identity_multiplication",
            name,
            t.max_abs_diff(&f.mul(&g)?),
            ctx.tol.identity_apply,
        ));
    }
    r.result(
        &format!("apply:{name}"),
        json!({ "sup_norm": t.sup_norm(), "points": points, "band": band }),
    );
    if ctx.detail {
        let mut tab = CsvTable::new(
            "apply.csv",
            &["x", "f_re", "f_im", "g_re", "g_im", "t_re", "t_im"],
        );
        for j in 0..grid.len() {
            let (a, b, c) = (f.values[j], g.values[j], t.values[j]);
            tab.push([grid.node(j)[0], a.re, a.im, b.re, b.im, c.re, c.im].map(|v| v.to_string()));
        }
        r.table(tab);
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn transpose(
    r: &mut Report,
    ctx: &Ctx,
    name: &str,
    s: &LoadedSymbol,
    which: TransposeIndex,
    expand: Option<usize>,
    points: usize,
    trials: usize,
    class_check: bool,
) -> Result<(), CliError> {
    let grid = standard_grid(points)?;
    let label = format!(
        "{name} T{}",
        if which == TransposeIndex::First { 1 } else { 2 }
    );
    let op = DiscreteBilinearOp::from_symbol(&s.expr, grid);
    let residual = duality_residual(&op, which, trials, ctx.seed)?;
    r.verdict(Verdict::at_most(
        "duality_residual",
        &label,
        residual,
        ctx.tol.duality_residual,
    ));
    let local = localize(&s.expr, &grid);
    let exact = adjoint_samples(&sample_symbol(&local, &grid)?, which)?;
    let route = route_agreement(&local, which, &grid)?;
    let mut v = Verdict::at_most(
        "route_agreement",
        &label,
        route.measured(),
        ctx.tol.route_agreement,
    );
    if route.band_limited {
        v = v.with_note("x-dependent symbol: compared inside the trusted band");
    }
    r.verdict(v);
    let mut payload =
        json!({ "duality_residual": residual, "route": route, "points": points, "trials": trials });
    if class_check {
        let rep =
            transpose_class_report(&s.expr, &s.class, which, &grid, 2, ctx.tol.stabilization)?;
        r.verdict(Verdict::at_most(
            "transpose_class_invariance",
            &label,
            rep.worst_growth(),
            ctx.tol.stabilization,
        ));
        payload["class_worst_growth"] = json!(rep.worst_growth());
    }
    let mut truncated = None;
    if let Some(order) = expand {
        let cap = 2 * order.max(3);
        let trunc =
            expansion_truncation(&local, which, order, 1, cap).map_err(|e| usage(e.to_string()))?;
        let next = expansion_truncation(&local, which, order + 1, 1, cap + 2)?;
        let exact_in_theory = next
            .terms
            .iter()
            .filter(|t| t.alpha.order() == order)
            .all(|t| t.expr.is_zero());
        let tape = trunc.sum().compile(1);
        let m = grid.len();
        let mut worst = 0.0f64;
        let mut approx = vec![bilinear_calculus::C64::new(0.0, 0.0); m * m * m];
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    let (xi, eta) = (grid.frequency(k), grid.frequency(l));
                    let v = tape.eval(&bilinear_calculus::symbol::Point::new(
                        grid.node(j),
                        xi,
                        eta,
                    ));
                    approx[(j * m + k) * m + l] = v;
                    if in_trusted_band(&grid, xi, eta) {
                        worst = worst.max((exact.at(j, k, l) - v).norm());
                    }
                }
            }
        }
        payload["expansion"] = json!({
            "order": order,
            "truncation": trunc.sum().to_string(),
            "remainder_sup_trusted_band": worst,
            "exact_by_construction": exact_in_theory,
        });
        if exact_in_theory {
            r.verdict(
                Verdict::at_most("expansion_exact", &label, worst, ctx.tol.route_agreement)
                    .with_note("the next expansion term vanishes identically"),
            );
        }
        truncated = Some(approx);
    }
    if ctx.detail {
        let mut t = CsvTable::new(
            "transpose_samples.csv",
            &[
                "x",
                "xi",
                "eta",
                "exact_re",
                "exact_im",
                "truncation_re",
                "truncation_im",
                "trusted",
            ],
        );
        let m = grid.len();
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    let (xi, eta) = (grid.frequency(k), grid.frequency(l));
                    let e = exact.at(j, k, l);
                    let (tr, ti) = truncated
                        .as_ref()
                        .map_or((String::new(), String::new()), |a| {
                            let v = a[(j * m + k) * m + l];
                            (v.re.to_string(), v.im.to_string())
                        });
                    t.push([
                        grid.node(j)[0].to_string(),
                        xi[0].to_string(),
                        eta[0].to_string(),
                        e.re.to_string(),
                        e.im.to_string(),
                        tr,
                        ti,
                        in_trusted_band(&grid, xi, eta).to_string(),
                    ]);
                }
            }
        }
        r.table(t);
    }
    r.result(&format!("transpose:{label}"), payload);
    Ok(())
}

pub fn expand(
    r: &mut Report,
    ctx: &Ctx,
    name: &str,
    s: &LoadedSymbol,
    which: TransposeIndex,
    order: usize,
    points: usize,
) -> Result<(), CliError> {
    if order == 0 {
        return Err(usage("--order must be at least 1"));
    }
    let grid = standard_grid(points)?;
    let options = RemainderFitOptions {
        zero_tol: ctx.tol.remainder_zero,
        order_cap: (2 * order).max(6),
        ..RemainderFitOptions::default()
    };
    let c = s.class;
    let mut groups = Vec::new();
    let mut fits = Vec::new();
    for n in 1..=order {
        let expected = c.m - (c.rho - c.delta) * n as f64;
        let slack = if n == 1 {
            ctx.tol.remainder_slack_first
        } else {
            ctx.tol.remainder_slack_second
        };
        let label = format!("{name} N={n}");
        match remainder_order_fit(&s.expr, &c, which, n, &grid, &options) {
            Ok(fit) => {
                let measured = if fit.degenerate_zero {
                    f64::NEG_INFINITY
                } else {
                    fit.exponent
                };
                let mut v = Verdict::below("remainder_order", &label, measured, expected, slack);
                if fit.degenerate_zero {
                    v = v.with_note("degenerate zero: remainder below tolerance on every shell");
                } else if fit.r_squared < ctx.tol.remainder_min_r2 {
                    v.status = crate::report::Status::Fail;
                    v = v.with_note(format!(
                        "r^2 = {:.4} below {}",
                        fit.r_squared, ctx.tol.remainder_min_r2
                    ));
                } else {
                    v = v.with_note(format!("r^2 = {:.4}", fit.r_squared));
                }
                r.verdict(v);
                groups.push((n.to_string(), fit.points.clone()));
                fits.push(json!({ "order": n, "fit": fit }));
            }
            Err(Error::InsufficientRange { usable, required }) => {
                r.verdict(Verdict::indeterminate(
                    "remainder_order",
                    &label,
                    expected,
                    slack,
                    format!("{usable} usable shells, {required} required"),
                ))
            }
            Err(e @ (Error::Hypothesis(_) | Error::OrderCap { .. })) => {
                return Err(usage(e.to_string()))
            }
            Err(e) => return Err(e.into()),
        }
    }
    r.result(
        &format!("expand:{name}"),
        json!({ "points": points, "fits": fits }),
    );
    if ctx.detail {
        r.table(points_table("remainder_shells.csv", "order", &groups));
    }
    Ok(())
}

pub fn asym_sum(
    r: &mut Report,
    ctx: &Ctx,
    base: Option<&LoadedSymbol>,
    terms: usize,
) -> Result<(), CliError> {
    if terms < 2 {
        return Err(usage("--terms must be at least 2"));
    }
    let (a0, class) = match base {
        Some(b) => (b.expr.clone(), b.class),
        None => (SymbolExpr::one(), ClassParams::new(0.0, 1.0, 0.0)),
    };
    let name = if base.is_some() {
        "a0 <xi,eta>^-j"
    } else {
        "<xi,eta>^-j"
    };
    let series: Vec<SeriesTerm> = (0..=terms)
        .map(|j| SeriesTerm::new(a0.clone() * elliptic(-(j as f64)), class.m - j as f64))
        .collect();
    let opts = SumOptions {
        rho: class.rho,
        delta: class.delta,
        ..SumOptions::default()
    };
    let schedule = select_epsilons(&series, terms, &opts)?;
    let a = borel_sum(&series, &schedule, &opts.cutoff);
    let cfg = SeminormConfig {
        stabilization: ctx.tol.stabilization,
        ..SeminormConfig::default()
    };
    let rep = class_report(&a, &class, 2, 6, &cfg)?;
    r.verdict(Verdict::at_most(
        "borel_class",
        name,
        rep.worst_growth(),
        ctx.tol.stabilization,
    ));

    let co = CriterionOptions {
        tolerance: ctx.tol.criterion_slack,
        ..CriterionOptions::default()
    };
    let mut groups = Vec::new();
    let mut remainders = Vec::new();
    for n in 1..=2usize {
        let partial = SymbolExpr::sum(series.iter().take(n).map(|t| t.expr.clone()).collect());
        let scale = schedule.window_scale(n, &opts.cutoff, co.radii[0]);
        let radii: Vec<f64> = co.radii.iter().map(|x| x * scale).collect();
        let label = format!("{name} N={n}");
        let expected = series[n].order;
        match shell_decay(&(a.clone() - partial), &radii, &co) {
            Ok(fit) => {
                let measured = if fit.degenerate_zero {
                    f64::NEG_INFINITY
                } else {
                    fit.exponent
                };
                r.verdict(
                    Verdict::below(
                        "borel_remainder",
                        &label,
                        measured,
                        expected,
                        ctx.tol.criterion_slack,
                    )
                    .with_note(format!(
                        "shells {:.0}..{:.0}, r^2 = {:.4}",
                        radii[0],
                        radii[radii.len() - 1],
                        fit.r_squared
                    )),
                );
                groups.push((format!("N={n}"), fit.points.clone()));
                remainders.push(json!({ "n": n, "window_scale": scale, "fit": fit }));
            }
            Err(Error::InsufficientRange { usable, required }) => {
                r.verdict(Verdict::indeterminate(
                    "borel_remainder",
                    &label,
                    expected,
                    ctx.tol.criterion_slack,
                    format!("{usable} usable shells, {required} required"),
                ))
            }
            Err(e) => return Err(e.into()),
        }
    }

    let other = schedule.shrunk(0.5);
    let b = borel_sum(&series, &other, &opts.cutoff);
    let dyadic: Vec<f64> = (0..12).map(|k| 8.0 * 2f64.powi(k)).collect();
    let diff = shell_decay(&(a.clone() - b), &dyadic, &co)?;
    let measured = if diff.degenerate_zero {
        f64::NEG_INFINITY
    } else {
        diff.exponent
    };
    r.verdict(
        Verdict::below(
            "schedule_independence",
            name,
            measured,
            series[2].order,
            ctx.tol.criterion_slack,
        )
        .with_note(format!("r^2 = {:.4} (not gated)", diff.r_squared)),
    );
    groups.push(("schedule_difference".into(), diff.points.clone()));

    let mut cc = co.clone();
    cc.step_scales = schedule.criterion_scales(2, &opts.cutoff, co.radii[0]);
    let mus = [-series[1].order, -series[2].order];
    let good = check_expansion_criterion(&a, &series, &mus, &cc)?;
    r.verdict(Verdict::holds("expansion_criterion", name, good.passed));
    let tail = a.clone() + elliptic(class.m);
    let bad = check_expansion_criterion(&tail, &series, &mus, &cc)?;
    r.verdict(Verdict::holds(
        "spurious_tail_detected",
        &format!("{name} + <xi,eta>^m0"),
        !bad.passed,
    ));

    let mut payload = json!({
        "schedule": schedule,
        "remainders": remainders,
        "schedule_difference": diff,
    });
    if ctx.detail {
        payload["criterion"] = json!(good);
        payload["spurious_tail"] = json!(bad);
        r.table(points_table("borel_remainders.csv", "series", &groups));
    }
    r.result("asym_sum", payload);
    Ok(())
}

fn kernel_options() -> KernelOptions {
    KernelOptions {
        fit_window: Some((0.05, 0.5)),
        ..KernelOptions::default()
    }
}

#[allow(clippy::too_many_arguments)]
pub fn kernel_decay(
    r: &mut Report,
    ctx: &Ctx,
    name: &str,
    s: &LoadedSymbol,
    order: u32,
    points: Option<usize>,
    half_period: f64,
    compact: bool,
) -> Result<(), CliError> {
    let regime = predict_regime(s.class.m, order, 1, s.class.rho, compact);
    let n = points.unwrap_or(
        if matches!(regime, Regime::PowerLaw { .. } | Regime::LogBlowup) {
            512
        } else {
            128
        },
    );
    let grid = GridSpec::new(1, half_period, n).map_err(|e| usage(e.to_string()))?;
    let p = if compact {
        s.expr.clone()
    } else {
        s.expr.clone() * kernel_cut(&grid)
    };
    let label = format!("{name} M={order}");
    let options = kernel_options();
    let mut payload = json!({ "regime": regime, "points": n, "half_period": half_period });
    match regime {
        Regime::PowerLaw { exponent } => {
            let fit = decay_fit(&p, &grid, s.class.m, s.class.rho, order, compact, &options)?;
            let tol = if order == 0 {
                ctx.tol.kernel_size_exponent
            } else {
                ctx.tol.kernel_gradient_exponent
            };
            r.verdict(
                Verdict::within("kernel_exponent", &label, fit.power.exponent, exponent, tol)
                    .with_note(format!("r^2 = {:.4}", fit.power.r_squared)),
            );
            if ctx.detail {
                let mut t = CsvTable::new(
                    "kernel_profile.csv",
                    &[
                        "s_shell_center",
                        "sup_abs_kernel",
                        "derivative_order",
                        "predicted_exponent",
                        "fitted_exponent",
                        "r_squared",
                    ],
                );
                let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
                for row in fit.rows() {
                    t.push([
                        row.s_shell_center.to_string(),
                        row.sup_abs_kernel.to_string(),
                        row.derivative_order.to_string(),
                        opt(row.predicted_exponent),
                        opt(row.fitted_exponent),
                        opt(row.r_squared),
                    ]);
                }
                r.table(t);
            }
            payload["fit"] = json!(fit.power);
        }
        Regime::LogBlowup => {
            let fit = decay_fit(&p, &grid, s.class.m, s.class.rho, order, compact, &options)?;
            let (slope, r2) = fit.log_fit.unwrap_or((f64::NAN, f64::NAN));
            r.verdict(
                Verdict::holds(
                    "kernel_log_blowup",
                    &label,
                    slope > 0.0 && r2 >= ctx.tol.remainder_min_r2,
                )
                .with_note(format!("sup vs |log S|: slope {slope:.4}, r^2 {r2:.4}")),
            );
            payload["log_fit"] = json!({ "slope": slope, "r_squared": r2 });
        }
        Regime::Bounded | Regime::RapidDecay => {
            let weights: &[i32] = if regime == Regime::Bounded {
                &[0]
            } else {
                &[0, 2, 4, 6]
            };
            let mut checks = Vec::new();
            for &w in weights {
                let rc = refinement_check(&p, &grid, order, w, ctx.tol.kernel_refinement)?;
                r.verdict(Verdict::at_most(
                    "kernel_refinement",
                    &format!("{label} weight={w}"),
                    rc.relative_change,
                    ctx.tol.kernel_refinement,
                ));
                checks.push(rc);
            }
            if ctx.detail {
                let profile = kernel_shell_profile(&p, &grid, order, &options)?;
                let pts = profile.points(None);
                r.table(points_table(
                    "kernel_profile.csv",
                    "derivative_order",
                    &[(order.to_string(), pts)],
                ));
            }
            payload["refinement"] = json!(checks);
        }
    }
    r.result(&format!("kernel:{label}"), payload);
    Ok(())
}

fn sweep_options(ctx: &Ctx, trials: usize) -> SweepOptions {
    SweepOptions {
        trials_per_level: trials,
        seed: ctx.seed,
        trend_tolerance: ctx.tol.trend_slope,
        ..SweepOptions::default()
    }
}

fn sweep_rows(t: &mut CsvTable, label: &str, e: Option<&Exponents>, sweep: &[FitPoint]) {
    let ex = |f: fn(&Exponents) -> f64| e.map_or(String::new(), |e| f(e).to_string());
    for p in sweep {
        t.push([
            label.to_string(),
            ex(|e| e.p),
            ex(|e| e.q),
            ex(|e| e.r),
            p.radius.to_string(),
            p.value.to_string(),
        ]);
    }
}

pub fn bounds(
    r: &mut Report,
    ctx: &Ctx,
    name: &str,
    s: &LoadedSymbol,
    trials: usize,
) -> Result<(), CliError> {
    if trials == 0 {
        return Err(usage("--trials must be positive"));
    }
    let opts = sweep_options(ctx, trials);
    let mut table = CsvTable::new(
        "bounds_levels.csv",
        &["sweep", "p", "q", "r", "level", "ratio_sup"],
    );
    let mut estimates = Vec::new();
    for e in evidence_triples() {
        let est = estimate_norm(&s.expr, e, &opts)?;
        let label = format!("{name} ({},{},{:.4})", e.p, e.q, e.r);
        let mut v = Verdict::at_most(
            "norm_no_growth",
            &label,
            est.trend_slope,
            ctx.tol.trend_slope,
        );
        if e.endpoint_proxy {
            v = v.with_note("q = infinity approximated by a large finite q");
        }
        r.verdict(v);
        if s.expr.is_one() {
            r.verdict(Verdict::below(
                "holder_bound",
                &label,
                est.ratio_max,
                1.0,
                ctx.tol.holder_slack,
            ));
        }
        sweep_rows(&mut table, "norm", Some(&e), &est.level_sups);
        estimates.push(est);
    }
    let mut payload = json!({ "estimates": estimates });
    if s.class.delta < 1.0 {
        let rep = l2_wsinf_check(&s.expr, s.class.rho, s.class.delta, 3, &opts)?;
        let expected = sobolev_threshold(1, s.class.delta)?;
        r.verdict(Verdict::within(
            "sobolev_threshold",
            name,
            rep.s as f64,
            expected as f64,
            0.0,
        ));
        r.verdict(Verdict::at_most(
            "l2_wsinf_no_growth",
            name,
            rep.sweep.trend_slope,
            ctx.tol.trend_slope,
        ));
        if s.expr.is_one() {
            r.verdict(Verdict::below(
                "l2_wsinf_identity",
                name,
                rep.sweep.ratio_max,
                1.0,
                ctx.tol.holder_slack,
            ));
        }
        sweep_rows(&mut table, "l2_wsinf", None, &rep.sweep.level_sups);
        payload["l2_wsinf"] = json!(rep);
    }
    if ctx.detail {
        r.table(table);
    }
    r.result(&format!("bounds:{name}"), payload);
    Ok(())
}

pub fn leibniz(
    r: &mut Report,
    ctx: &Ctx,
    name: &str,
    s: &LoadedSymbol,
    m: f64,
) -> Result<(), CliError> {
    if m.is_nan() || m < 0.0 {
        return Err(usage("--m must be nonnegative"));
    }
    let label = format!("{name} m={m}");
    let split = leibniz_split(&s.expr, m)?;
    let pts = sample_points(2000, 64.0, ctx.seed);
    let rec = reconstruction_residual(&s.expr, &split, &pts);
    r.verdict(Verdict::at_most(
        "leibniz_reconstruction",
        &label,
        rec,
        ctx.tol.reconstruction,
    ));
    let grid = standard_grid(32)?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let f = random_trig_polynomial(grid, 8, false, &mut rng);
    let g = random_trig_polynomial(grid, 8, false, &mut rng);
    let id = leibniz_identity_check(&s.expr, m, &f, &g)?;
    r.verdict(Verdict::at_most(
        "leibniz_identity",
        &label,
        id.residual,
        ctx.tol.leibniz_residual,
    ));
    let mut payload = json!({ "reconstruction": rec, "identity": id, "phi": split.phi });
    if ctx.detail {
        let phi = phi_partition_error(10_000, ctx.seed);
        r.verdict(Verdict::at_most(
            "phi_partition",
            "phi",
            phi,
            ctx.tol.phi_partition,
        ));
        let sweep = leibniz_ratio_sweep(&s.expr, m, s.class.delta, &sweep_options(ctx, 4))?;
        r.verdict(Verdict::at_most(
            "leibniz_ratio_no_growth",
            &label,
            sweep.trend_slope,
            ctx.tol.trend_slope,
        ));
        let mut t = CsvTable::new(
            "leibniz_sweep.csv",
            &["sweep", "p", "q", "r", "level", "ratio_sup"],
        );
        sweep_rows(&mut t, "leibniz", None, &sweep.level_sups);
        r.table(t);
        payload["phi_partition_error"] = json!(phi);
        payload["sweep"] = json!(sweep);
    }
    r.result(&format!("leibniz:{label}"), payload);
    Ok(())
}

/// Built-in families with the parameters the suite uses.
pub fn builtin_specs(bump_width: f64) -> Vec<SymbolSpec> {
    vec![
        SymbolSpec::family("identity", &[]),
        SymbolSpec::family("elliptic", &[("m", 1.0)]),
        SymbolSpec::family("frequency_bump", &[("width", bump_width)]),
        SymbolSpec::family("derivative_xi", &[]),
        SymbolSpec::family("derivative_eta", &[]),
        SymbolSpec::family("chirp", &[("delta", 0.5), ("amplitude", 1.0)]),
        SymbolSpec::family("x_modulated", &[("m", 1.0)]),
    ]
}

pub fn spec_name(spec: &SymbolSpec) -> String {
    match (&spec.family, &spec.expr) {
        (Some(f), _) if spec.params.is_empty() => f.clone(),
        (Some(f), _) => {
            let ps: Vec<String> = spec
                .params
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            format!("{f}({})", ps.join(","))
        }
        (None, Some(e)) => e.clone(),
        _ => "symbol".into(),
    }
}

fn resolved(spec: &SymbolSpec) -> Result<(String, LoadedSymbol), CliError> {
    Ok((spec_name(spec), spec.resolve()?))
}

fn with_class(expr: SymbolExpr, m: f64, rho: f64, delta: f64) -> LoadedSymbol {
    LoadedSymbol {
        expr,
        class: ClassParams::new(m, rho, delta),
    }
}

/// `(1 + sin^2 x) xi <xi,eta>^{-1}`, class `(0, 1, 0)`, for the remainder-order check.
pub fn modulated_order_zero() -> LoadedSymbol {
    with_class(
        x_modulated(0.0) * SymbolExpr::xi() * elliptic(-1.0),
        0.0,
        1.0,
        0.0,
    )
}

/// `(xi^2 - eta^2) <xi,eta>^{-2}`, an order-0 symbol with a genuinely singular kernel.
pub fn cz_order_zero() -> LoadedSymbol {
    with_class(
        (SymbolExpr::xi().powi(2) - SymbolExpr::eta().powi(2)) * elliptic(-2.0),
        0.0,
        1.0,
        0.0,
    )
}

fn full_suite(r: &mut Report, tol: &Tolerances, seed: u64) -> Result<(), CliError> {
    let ctx = Ctx {
        tol,
        seed,
        detail: false,
    };
    let class_specs = builtin_specs(4.0);
    for spec in &class_specs {
        let (name, s) = resolved(spec)?;
        verify_class(r, &ctx, &name, &s, 2, 6)?;
    }
    let (_, identity) = resolved(&SymbolSpec::family("identity", &[]))?;
    apply(r, &ctx, "identity", &identity, 64, 16)?;
    for spec in &class_specs {
        let (name, s) = resolved(spec)?;
        for which in [TransposeIndex::First, TransposeIndex::Second] {
            transpose(r, &ctx, &name, &s, which, None, 32, 50, false)?;
        }
    }
    for spec in builtin_specs(2.0) {
        let (name, s) = resolved(&spec)?;
        let grid = standard_grid(128)?;
        let rep = transpose_class_report(
            &s.expr,
            &s.class,
            TransposeIndex::First,
            &grid,
            2,
            tol.stabilization,
        )?;
        r.verdict(Verdict::at_most(
            "transpose_class_invariance",
            &format!("{name} T1"),
            rep.worst_growth(),
            tol.stabilization,
        ));
    }
    expand(
        r,
        &ctx,
        "(1+sin^2 x) xi <xi,eta>^-1",
        &modulated_order_zero(),
        TransposeIndex::First,
        2,
        256,
    )?;
    asym_sum(r, &ctx, None, 4)?;
    let cz = cz_order_zero();
    kernel_decay(
        r,
        &ctx,
        "(xi^2-eta^2)<xi,eta>^-2",
        &cz,
        0,
        None,
        std::f64::consts::FRAC_PI_2,
        false,
    )?;
    kernel_decay(
        r,
        &ctx,
        "(xi^2-eta^2)<xi,eta>^-2",
        &cz,
        1,
        None,
        std::f64::consts::FRAC_PI_2,
        false,
    )?;
    let smooth = with_class(elliptic(-5.0), -5.0, 1.0, 0.0);
    kernel_decay(
        r,
        &ctx,
        "<xi,eta>^-5",
        &smooth,
        0,
        None,
        std::f64::consts::FRAC_PI_2,
        false,
    )?;
    let (_, bump) = resolved(&SymbolSpec::family("frequency_bump", &[("width", 8.0)]))?;
    kernel_decay(
        r,
        &ctx,
        "frequency_bump(width=8)",
        &bump,
        0,
        None,
        std::f64::consts::FRAC_PI_2,
        true,
    )?;
    for spec in [
        SymbolSpec::family("identity", &[]),
        SymbolSpec::family("frequency_bump", &[("width", 4.0)]),
    ] {
        let (name, s) = resolved(&spec)?;
        bounds(r, &ctx, &name, &s, 4)?;
    }
    let (_, e1) = resolved(&SymbolSpec::family("elliptic", &[("m", 1.0)]))?;
    let control = estimate_norm(
        &e1.expr,
        Exponents::new(4.0, 4.0, 2.0)?,
        &sweep_options(&ctx, 4),
    )?;
    r.verdict(
        Verdict::holds(
            "unbounded_trend_detected",
            "elliptic(m=1) (4,4,2)",
            control.unbounded_trend,
        )
        .with_note(format!("trend slope {:.4}", control.trend_slope)),
    );
    r.result("bounds:positive_control", &control);
    for spec in &class_specs {
        let (name, s) = resolved(spec)?;
        for m in [0.0, 1.0, 2.0] {
            leibniz(r, &ctx, &name, &s, m)?;
        }
    }
    let phi = phi_partition_error(10_000, seed);
    r.verdict(Verdict::at_most(
        "phi_partition",
        "phi",
        phi,
        tol.phi_partition,
    ));
    let sweep: SweepReport = leibniz_ratio_sweep(&e1.expr, 1.0, 0.0, &sweep_options(&ctx, 4))?;
    r.verdict(Verdict::at_most(
        "leibniz_ratio_no_growth",
        "elliptic(m=1) m=1",
        sweep.trend_slope,
        tol.trend_slope,
    ));

    let mut t = CsvTable::new(
        "verdicts.csv",
        &[
            "check",
            "module",
            "subject",
            "status",
            "measured",
            "expected",
            "tolerance",
        ],
    );
    for v in &r.verdicts {
        t.push([
            v.check.clone(),
            v.module.clone(),
            v.subject.clone(),
            format!("{:?}", v.status).to_lowercase(),
            v.measured.map_or(String::new(), |x| x.to_string()),
            v.expected.to_string(),
            v.tolerance.to_string(),
        ]);
    }
    r.table(t);
    Ok(())
}
