//! Symbols realizing a prescribed asymptotic series, and the converse test.

use crate::error::{Error, Result};
use crate::fit::{fit_power_law, DecayFit};
use crate::multiindex::{triples_up_to, MultiIndex};
use crate::symbol::families::radius_sq;
use crate::symbol::seminorm::{class_report, hormander_seminorm, radial_shell_sups};
use crate::symbol::{ClassParams, SeminormConfig, SymbolExpr};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Smooth radial cutoff: 0 for `|(xi, eta)| <= inner`, 1 for `|(xi, eta)| >= outer`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffPsi {
    pub inner_radius: f64,
    pub outer_radius: f64,
}

pub fn make_cutoff(inner: f64, outer: f64) -> Result<CutoffPsi> {
    if !(inner > 0.0 && outer > inner && outer.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "cutoff radii must satisfy 0 < inner < outer, got {inner} and {outer}"
        )));
    }
    Ok(CutoffPsi {
        inner_radius: inner,
        outer_radius: outer,
    })
}

impl Default for CutoffPsi {
    fn default() -> Self {
        CutoffPsi {
            inner_radius: 1.0,
            outer_radius: 2.0,
        }
    }
}

impl CutoffPsi {
    pub fn expr(&self) -> SymbolExpr {
        self.scaled(1.0)
    }

    /// `psi(eps xi, eps eta)`.
    pub fn scaled(&self, eps: f64) -> SymbolExpr {
        let (a2, b2) = (self.inner_radius.powi(2), self.outer_radius.powi(2));
        ((radius_sq() * (eps * eps) + (-a2)) * (1.0 / (b2 - a2))).smooth_step()
    }

    /// Squared radius inside which `psi(eps .)` vanishes identically.
    pub fn dead_radius_sq(&self, eps: f64) -> f64 {
        (self.inner_radius / eps).powi(2)
    }
}

/// One term `a_j` of an asymptotic series together with its order `m_j`.
#[derive(Clone, Debug)]
pub struct SeriesTerm {
    pub expr: SymbolExpr,
    pub order: f64,
}

impl SeriesTerm {
    pub fn new(expr: SymbolExpr, order: f64) -> Self {
        SeriesTerm { expr, order }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumOptions {
    pub cutoff: CutoffPsi,
    pub rho: f64,
    pub delta: f64,
    /// Dyadic shells used for every measured seminorm.
    pub shells: usize,
    pub seminorm: SeminormConfig,
}

impl Default for SumOptions {
    fn default() -> Self {
        SumOptions {
            cutoff: CutoffPsi::default(),
            rho: 1.0,
            delta: 0.0,
            shells: 6,
            seminorm: SeminormConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumSchedule {
    pub epsilons: Vec<f64>,
    pub orders: Vec<f64>,
    /// `C_j`, the Leibniz bound for `psi(eps .) a_j` through order `j`.
    pub measured_constants: Vec<f64>,
    /// Derivative order each constant was measured through.
    pub measured_orders: Vec<usize>,
}

impl SumSchedule {
    /// Check `eps_j C_j <= 2^-j`, `eps_{j+1} <= eps_j / 2` and `0 < eps_j < 1`.
    pub fn validate(&self) -> Result<()> {
        for (j, (&e, &c)) in self
            .epsilons
            .iter()
            .zip(&self.measured_constants)
            .enumerate()
        {
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "eps_{j} = {e} is outside (0, 1)"
                )));
            }
            if e * c > 0.5f64.powi(j as i32) {
                return Err(Error::InvalidArgument(format!(
                    "eps_{j} C_{j} = {} exceeds 2^-{j}",
                    e * c
                )));
            }
        }
        for (j, w) in self.epsilons.windows(2).enumerate() {
            if w[1] > 0.5 * w[0] {
                return Err(Error::InvalidArgument(format!(
                    "eps_{} exceeds eps_{j} / 2",
                    j + 1
                )));
            }
        }
        Ok(())
    }

    /// Power-of-two multiplier for base shells starting at `base_min` so that every
    /// shell lies where `psi(eps_j .)` is identically 1.
    pub fn window_scale(&self, j: usize, cutoff: &CutoffPsi, base_min: f64) -> f64 {
        let Some(&eps) = self.epsilons.get(j) else {
            return 1.0;
        };
        // rho_2 >= (|xi| + |eta|) / sqrt 2 and the shell floor is r / sqrt 2.
        let need =
            (std::f64::consts::SQRT_2 * cutoff.outer_radius / eps + 1.0) * std::f64::consts::SQRT_2;
        (need / base_min).log2().ceil().max(0.0).exp2()
    }

    /// Scales placing step `N` of the expansion criterion past the switch-on of term `N + 1`.
    pub fn criterion_scales(&self, steps: usize, cutoff: &CutoffPsi, base_min: f64) -> Vec<f64> {
        (0..steps)
            .map(|n| self.window_scale(n + 1, cutoff, base_min))
            .collect()
    }

    /// Every epsilon multiplied by `factor` in `(0, 1]`; still a valid schedule.
    pub fn shrunk(&self, factor: f64) -> SumSchedule {
        SumSchedule {
            epsilons: self.epsilons.iter().map(|e| e * factor).collect(),
            ..self.clone()
        }
    }
}

type PsiTable = BTreeMap<(MultiIndex, MultiIndex), f64>;

/// Uniform bounds of `|d^beta_xi d^gamma_eta psi(eps .)| (1 + |xi| + |eta|)^{|beta|+|gamma|}`,
/// sampled over `eps` in `{1, 1/2, 1/4, 1/8}`.
pub fn cutoff_derivative_bounds(
    cutoff: &CutoffPsi,
    max_order: usize,
    options: &SumOptions,
) -> Result<PsiTable> {
    let dim = options.seminorm.dim;
    let unit = ClassParams::new(0.0, 1.0, 0.0);
    let zero = MultiIndex::ZERO;
    let mut table = BTreeMap::new();
    for (a, b, c) in triples_up_to(dim, max_order) {
        if !a.is_zero() {
            continue;
        }
        let mut sup = 0.0f64;
        for k in 0..4 {
            let psi = cutoff.scaled(0.5f64.powi(k));
            // The finest scale transitions near radius 16.
            let v = hormander_seminorm(
                &psi,
                &unit,
                &zero,
                &b,
                &c,
                options.shells.max(5),
                &options.seminorm,
            )?;
            sup = sup.max(v);
        }
        table.insert((b, c), sup);
    }
    Ok(table)
}

/// Choose `eps_0 > eps_1 > ...` so that `psi(eps_j .) a_j` has its order-`m_j + 1`
/// seminorms through order `j` bounded by `2^-j`.
pub fn select_epsilons(
    terms: &[SeriesTerm],
    j_max: usize,
    options: &SumOptions,
) -> Result<SumSchedule> {
    if terms.is_empty() {
        return Err(Error::InvalidArgument(
            "the series needs at least one term".into(),
        ));
    }
    let terms = &terms[..terms.len().min(j_max + 1)];
    for w in terms.windows(2) {
        if w[1].order > w[0].order {
            return Err(Error::Hypothesis("orders m_j must be nonincreasing".into()));
        }
    }
    let cap = options.seminorm.order_cap;
    let top = (terms.len() - 1).min(cap);
    let psi = cutoff_derivative_bounds(&options.cutoff, top, options)?;
    let mut schedule = SumSchedule {
        epsilons: Vec::new(),
        orders: Vec::new(),
        measured_constants: Vec::new(),
        measured_orders: Vec::new(),
    };
    let mut prev = 1.0f64;
    for (j, term) in terms.iter().enumerate() {
        let class = ClassParams::new(term.order, options.rho, options.delta);
        let order = j.min(cap);
        let report = class_report(
            &term.expr,
            &class,
            order.max(2).min(cap),
            options.shells,
            &options.seminorm,
        )?;
        if !report.consistent {
            return Err(Error::Hypothesis(format!(
                "term {j} is not consistent with order {}: {} unstable seminorms",
                term.order,
                report.unstable().len()
            )));
        }
        let mut c_j = 0.0f64;
        for e in report
            .entries
            .iter()
            .filter(|e| e.alpha.order() + e.beta.order() + e.gamma.order() <= order)
        {
            let mut bound = 0.0;
            for b1 in e.beta.below() {
                for g1 in e.gamma.below() {
                    let rest = report
                        .entry(&e.alpha, &e.beta.sub(&b1), &e.gamma.sub(&g1))
                        .map_or(0.0, |r| r.value);
                    let c_psi = psi.get(&(b1, g1)).copied().unwrap_or(0.0);
                    bound += e.beta.binomial(&b1) * e.gamma.binomial(&g1) * c_psi * rest;
                }
            }
            c_j = c_j.max(bound);
        }
        let eps = (0.5 * prev).min(0.5f64.powi(j as i32) / (1.0 + c_j));
        schedule.epsilons.push(eps);
        schedule.orders.push(term.order);
        schedule.measured_constants.push(c_j);
        schedule.measured_orders.push(order);
        prev = eps;
    }
    schedule.validate()?;
    Ok(schedule)
}

/// `sum_j psi(eps_j .) a_j`, each term gated off inside its dead radius.
pub fn borel_sum(terms: &[SeriesTerm], schedule: &SumSchedule, cutoff: &CutoffPsi) -> SymbolExpr {
    SymbolExpr::sum(
        terms
            .iter()
            .zip(&schedule.epsilons)
            .map(|(t, &eps)| {
                (cutoff.scaled(eps) * t.expr.clone()).gated(cutoff.dead_radius_sq(eps))
            })
            .collect(),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionOptions {
    /// Shell upper radii in `1 + |xi| + |eta|`.
    pub radii: Vec<f64>,
    pub tolerance: f64,
    /// Misses within this much of the threshold are reported separately.
    pub near_miss: f64,
    pub zero_tol: f64,
    pub min_shells: usize,
    /// Maximum derivative order in the growth spot-check.
    pub growth_order: usize,
    /// Per-step multiplier of `radii`; missing entries mean 1.
    pub step_scales: Vec<f64>,
    pub seminorm: SeminormConfig,
}

impl CriterionOptions {
    pub fn radii_for_step(&self, n: usize) -> Vec<f64> {
        let s = self.step_scales.get(n).copied().unwrap_or(1.0);
        self.radii.iter().map(|r| r * s).collect()
    }
}

impl Default for CriterionOptions {
    fn default() -> Self {
        CriterionOptions {
            radii: vec![8.0, 11.3137, 16.0, 22.6274, 32.0, 45.2548, 64.0],
            tolerance: 0.35,
            near_miss: 1.0,
            zero_tol: 1e-12,
            min_shells: 3,
            growth_order: 2,
            step_scales: Vec::new(),
            seminorm: SeminormConfig {
                directions: 256,
                ..SeminormConfig::default()
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionStep {
    pub n: usize,
    pub mu: f64,
    pub threshold: f64,
    pub fit: Option<DecayFit>,
    /// Set when too few shells carried a nonzero remainder to fit.
    pub fit_error: Option<String>,
    pub passed: bool,
    pub near_miss: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthCap {
    pub alpha: MultiIndex,
    pub beta: MultiIndex,
    pub gamma: MultiIndex,
    /// Fitted growth exponent `mu(alpha, beta, gamma)`; `None` for a vanishing derivative.
    pub exponent: Option<f64>,
    pub finite: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub steps: Vec<CriterionStep>,
    pub growth: Vec<GrowthCap>,
    pub growth_ok: bool,
    pub passed: bool,
}

/// Fit `sup |sigma|` over radial shells with upper radii `radii`.
pub fn shell_decay(
    sigma: &SymbolExpr,
    radii: &[f64],
    options: &CriterionOptions,
) -> Result<DecayFit> {
    let points = radial_shell_sups(sigma, radii, &options.seminorm)?;
    fit_power_law(&points, options.zero_tol, options.min_shells)
}

/// Test `|a - sum_{j<=N} a_j| <= C_N (1 + |xi| + |eta|)^{-mu_N}` for each `N`
/// and spot-check polynomial growth of the derivatives of `a`.
pub fn check_expansion_criterion(
    a: &SymbolExpr,
    terms: &[SeriesTerm],
    mus: &[f64],
    options: &CriterionOptions,
) -> Result<CriterionVerdict> {
    if terms.is_empty() || mus.is_empty() {
        return Err(Error::InvalidArgument(
            "terms and exponents must be nonempty".into(),
        ));
    }
    if mus.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "exponents mu_N must be increasing".into(),
        ));
    }
    let mut steps = Vec::new();
    for (n, &mu) in mus.iter().enumerate() {
        let partial = SymbolExpr::sum(terms.iter().take(n + 1).map(|t| t.expr.clone()).collect());
        let remainder = a.clone() - partial;
        let threshold = -mu + options.tolerance;
        let (fit, fit_error) = match shell_decay(&remainder, &options.radii_for_step(n), options) {
            Ok(f) => (Some(f), None),
            Err(Error::InsufficientRange { usable, required }) => (
                None,
                Some(format!("{usable} nonzero shells, {required} required")),
            ),
            Err(e) => return Err(e),
        };
        let exponent = fit.as_ref().map(|f| {
            if f.degenerate_zero {
                f64::NEG_INFINITY
            } else {
                f.exponent
            }
        });
        let passed = exponent.is_some_and(|e| e <= threshold);
        let near_miss = !passed && exponent.is_some_and(|e| e <= threshold + options.near_miss);
        steps.push(CriterionStep {
            n,
            mu,
            threshold,
            fit,
            fit_error,
            passed,
            near_miss,
        });
    }
    let mut growth = Vec::new();
    for (al, be, ga) in triples_up_to(options.seminorm.dim, options.growth_order) {
        let d = a.derivative(&al, &be, &ga);
        let points = radial_shell_sups(&d, &options.radii, &options.seminorm)?;
        let finite = points.iter().all(|p| p.value.is_finite());
        let exponent = match fit_power_law(&points, options.zero_tol, 2) {
            Ok(f) if !f.degenerate_zero => Some(f.exponent),
            _ => None,
        };
        growth.push(GrowthCap {
            alpha: al,
            beta: be,
            gamma: ga,
            exponent,
            finite,
        });
    }
    let growth_ok = growth.iter().all(|g| g.finite);
    let passed = growth_ok && steps.iter().all(|s| s.passed);
    Ok(CriterionVerdict {
        steps,
        growth,
        growth_ok,
        passed,
    })
}
