//! Empirical boundedness evidence and the Leibniz-type symbol splitting.
//!
//! Norm ratios measured here are lower bounds on operator norms. Boundedness
//! is judged by the absence of a growth trend across a dyadic sweep of
//! witness frequencies, never by the size of a single ratio.

use crate::error::{Error, Result};
use crate::fit::{linear_regression, FitPoint};
use crate::fourier::{
    bessel_potential, lp_norm, random_trig_polynomial, w_m2_norm, w_s_inf_norm, GridFunction,
    GridSpec, C64,
};
use crate::operator::{freeze_second_argument, frozen_seminorm, DiscreteBilinearOp};
use crate::symbol::expr::{Bracket, SymbolExpr};
use crate::symbol::smooth::smooth_step;
use crate::symbol::tape::Point;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

/// Lebesgue exponents `(p, q, r)` with `1/p + 1/q = 1/r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    /// Set when a large finite `q` stands in for `q = infinity`.
    pub endpoint_proxy: bool,
}

impl Exponents {
    pub fn new(p: f64, q: f64, r: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite() && q > 1.0 && q.is_finite()) {
            return Err(Error::Exponents(format!(
                "need 1 < p, q < infinity, got p = {p}, q = {q}"
            )));
        }
        if r.is_nan() || r <= 0.0 || (1.0 / p + 1.0 / q - 1.0 / r).abs() > 1e-12 {
            return Err(Error::Exponents(format!("1/{p} + 1/{q} != 1/{r}")));
        }
        Ok(Exponents {
            p,
            q,
            r,
            endpoint_proxy: false,
        })
    }

    /// Exponents with `r` given by the Hölder relation.
    pub fn holder(p: f64, q: f64) -> Result<Self> {
        Self::new(p, q, 1.0 / (1.0 / p + 1.0 / q))
    }

    /// `(p, infinity)` approximated by `(p, q_large)`, flagged as a proxy.
    pub fn endpoint(p: f64, q_large: f64) -> Result<Self> {
        let mut e = Self::holder(p, q_large)?;
        e.endpoint_proxy = true;
        Ok(e)
    }
}

/// The exponent triples used as boundedness evidence for order-zero symbols.
pub fn evidence_triples() -> Vec<Exponents> {
    vec![
        Exponents::new(2.0, 2.0, 1.0).expect("valid"),
        Exponents::new(4.0, 4.0, 2.0).expect("valid"),
        Exponents::endpoint(2.0, 64.0).expect("valid"),
    ]
}

/// How one witness function was built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessFn {
    /// Seeded random trigonometric polynomial.
    Trig { band: usize, seed: u64 },
    /// Periodized Gaussian `exp(-d^2 / 2 w^2) e^{i k x}` centred at `center`.
    Bump {
        center: f64,
        width: f64,
        wavenumber: i64,
    },
}

impl WitnessFn {
    pub fn build(&self, grid: GridSpec) -> GridFunction {
        match *self {
            WitnessFn::Trig { band, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                random_trig_polynomial(grid, band, false, &mut rng)
            }
            WitnessFn::Bump {
                center,
                width,
                wavenumber,
            } => {
                let freq = wavenumber as f64 * grid.freq_spacing();
                GridFunction::from_fn(grid, |x| {
                    let d = grid.periodic_distance(x[0], center);
                    C64::from_polar((-0.5 * (d / width).powi(2)).exp(), freq * x[0])
                })
            }
        }
    }
}

/// A witness pair and the sweep level that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub seed: u64,
    pub level: f64,
    pub trial: usize,
    pub f: WitnessFn,
    pub g: WitnessFn,
}

/// Dyadic frequency sweep shared by every ratio estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub grid: GridSpec,
    /// Witness modulation levels (wavenumbers), a dilation sweep in frequency.
    pub levels: Vec<f64>,
    pub trials_per_level: usize,
    /// Extra random trigonometric pairs, which count towards the maximum only.
    pub random_trials: usize,
    pub random_band: usize,
    pub bump_width: f64,
    pub seed: u64,
    /// Log-log slope of the level maxima at or above which growth is reported.
    pub trend_tolerance: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            grid: GridSpec::standard(128).expect("valid grid"),
            levels: vec![2.0, 4.0, 8.0, 16.0, 32.0],
            trials_per_level: 4,
            random_trials: 8,
            random_band: 8,
            bump_width: 0.5,
            seed: 0x51D3,
            trend_tolerance: 0.1,
        }
    }
}

impl SweepOptions {
    fn trial_seed(&self, slot: usize) -> u64 {
        self.seed
            ^ (slot as u64)
                .wrapping_add(1)
                .wrapping_mul(0x9E37_79B9_7F4A_7C15)
    }

    fn validate(&self) -> Result<()> {
        if self.grid.dim() != 1 {
            return Err(Error::InvalidArgument(
                "boundedness sweeps run in one dimension".into(),
            ));
        }
        if self.levels.len() < 2 || self.levels.iter().any(|&k| k.is_nan() || k <= 0.0) {
            return Err(Error::InvalidArgument(
                "need at least two positive sweep levels".into(),
            ));
        }
        if self.trials_per_level == 0 {
            return Err(Error::InvalidArgument(
                "trials_per_level must be positive".into(),
            ));
        }
        let top = self.levels.iter().fold(0.0f64, |a, &b| a.max(b));
        if top + 4.0 / self.bump_width >= self.grid.points_per_axis() as f64 / 2.0 {
            return Err(Error::InvalidArgument(format!(
                "sweep level {top} does not fit below the grid Nyquist wavenumber"
            )));
        }
        Ok(())
    }

    fn bump(&self, rng: &mut ChaCha8Rng, level: f64) -> WitnessFn {
        let l = self.grid.half_period();
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        WitnessFn::Bump {
            center: rng.random_range(-l..l),
            width: self.bump_width,
            wavenumber: (sign * level * rng.random_range(0.75..1.25)).round() as i64,
        }
    }
}

/// Level maxima, overall maximum and growth verdict of one sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub ratio_max: f64,
    pub trials: usize,
    pub witness: Option<Witness>,
    pub level_sups: Vec<FitPoint>,
    pub trend_slope: f64,
    /// `trend_slope >= trend_tolerance`.
    pub unbounded_trend: bool,
}

/// The witness pair for a given slot: bump pairs on the levels, then random pairs.
type PairMaker<'a> =
    dyn Fn(&mut ChaCha8Rng, Option<f64>, u64) -> (WitnessFn, WitnessFn) + Sync + 'a;

fn run_sweep(
    options: &SweepOptions,
    make: &PairMaker<'_>,
    ratio: &(dyn Fn(&GridFunction, &GridFunction) -> Result<f64> + Sync),
) -> Result<SweepReport> {
    options.validate()?;
    let per = options.trials_per_level;
    let leveled = options.levels.len() * per;
    let total = leveled + options.random_trials;
    let results = crate::par::map(total, |slot| -> Result<(f64, Witness)> {
        // Trial t reuses its seed at every level, so the sweep only moves the modulation.
        let level = (slot < leveled).then(|| options.levels[slot / per]);
        let seed = options.trial_seed(if slot < leveled { slot % per } else { slot });
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, g) = make(&mut rng, level, seed);
        let r = ratio(&f.build(options.grid), &g.build(options.grid))?;
        let witness = Witness {
            seed,
            level: level.unwrap_or(0.0),
            trial: slot,
            f,
            g,
        };
        Ok((r, witness))
    });
    let mut best: Option<(f64, Witness)> = None;
    let mut sups = vec![0.0f64; options.levels.len()];
    for (slot, res) in results.into_iter().enumerate() {
        let (r, w) = res?;
        if slot < leveled {
            sups[slot / per] = sups[slot / per].max(r);
        }
        if best.as_ref().is_none_or(|(b, _)| r > *b) {
            best = Some((r, w));
        }
    }
    let xs: Vec<f64> = options.levels.iter().map(|k| k.ln()).collect();
    let ys: Vec<f64> = sups.iter().map(|s| s.max(f64::MIN_POSITIVE).ln()).collect();
    let (_, slope, _) = linear_regression(&xs, &ys);
    let (ratio_max, witness) = match best {
        Some((r, w)) => (r, Some(w)),
        None => (0.0, None),
    };
    Ok(SweepReport {
        ratio_max,
        trials: total,
        witness,
        level_sups: options
            .levels
            .iter()
            .zip(&sups)
            .map(|(&radius, &value)| FitPoint { radius, value })
            .collect(),
        trend_slope: slope,
        unbounded_trend: slope >= options.trend_tolerance,
    })
}

/// Operator with the symbol tabulated once when it depends on `x`.
fn prepared_operator(sigma: &SymbolExpr, grid: GridSpec) -> Result<DiscreteBilinearOp> {
    let op = DiscreteBilinearOp::from_symbol(sigma, grid);
    if sigma.free_vars().has_x() {
        if let Ok(samples) = op.materialize() {
            return Ok(DiscreteBilinearOp::from_samples(samples));
        }
    }
    Ok(op)
}

fn safe_ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Empirical `L^p x L^q -> L^r` norm with its maximizing witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub exponents: Exponents,
    pub trials: usize,
    /// Lower bound on the operator norm.
    pub ratio_max: f64,
    pub trend_slope: f64,
    pub unbounded_trend: bool,
    pub witness_seed: u64,
    pub witness: Option<Witness>,
    pub level_sups: Vec<FitPoint>,
}

/// `max ||T(f, g)||_r / (||f||_p ||g||_q)` over modulated-bump pairs at each
/// sweep level plus random trigonometric pairs.
pub fn estimate_norm(
    sigma: &SymbolExpr,
    exponents: Exponents,
    options: &SweepOptions,
) -> Result<NormEstimate> {
    let op = prepared_operator(sigma, options.grid)?;
    let make = |rng: &mut ChaCha8Rng, level: Option<f64>, seed: u64| match level {
        Some(k) => (options.bump(rng, k), options.bump(rng, k)),
        None => (
            WitnessFn::Trig {
                band: options.random_band,
                seed,
            },
            WitnessFn::Trig {
                band: options.random_band,
                seed: seed.rotate_left(29),
            },
        ),
    };
    let ratio = |f: &GridFunction, g: &GridFunction| {
        let t = op.apply(f, g)?;
        Ok(safe_ratio(
            lp_norm(&t, exponents.r),
            lp_norm(f, exponents.p) * lp_norm(g, exponents.q),
        ))
    };
    let sweep = run_sweep(options, &make, &ratio)?;
    Ok(NormEstimate {
        exponents,
        trials: sweep.trials,
        ratio_max: sweep.ratio_max,
        trend_slope: sweep.trend_slope,
        unbounded_trend: sweep.unbounded_trend,
        witness_seed: sweep.witness.as_ref().map_or(options.seed, |w| w.seed),
        witness: sweep.witness,
        level_sups: sweep.level_sups,
    })
}

/// Smallest integer `s > ([n/2] + 1)/(1 - delta) + n`.
pub fn sobolev_threshold(n: usize, delta: f64) -> Result<usize> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::Hypothesis(format!(
            "delta = {delta} must lie in [0, 1)"
        )));
    }
    let bound = (n / 2 + 1) as f64 / (1.0 - delta) + n as f64;
    Ok(bound.floor() as usize + 1)
}

/// Evidence for `L^2 x W^{s,inf} -> L^2` boundedness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct L2WsInfReport {
    pub s: usize,
    /// Order `[n/2] + 1` of the frozen-symbol seminorm.
    pub frozen_order: usize,
    pub sweep: SweepReport,
    /// `max |sigma_g|_k / ||g||_{W^{s,inf}}` over the frozen-route witnesses.
    pub frozen_ratio_max: f64,
}

/// Sweep `||T(f, g)||_2 / (||f||_2 ||g||_{W^{s,inf}})` with `f` carried up the
/// frequency levels and `g` smooth, then measure the frozen route on a few `g`.
pub fn l2_wsinf_check(
    sigma: &SymbolExpr,
    rho: f64,
    delta: f64,
    frozen_trials: usize,
    options: &SweepOptions,
) -> Result<L2WsInfReport> {
    let n = options.grid.dim();
    let s = sobolev_threshold(n, delta)?;
    let frozen_order = n / 2 + 1;
    let op = prepared_operator(sigma, options.grid)?;
    let smooth_g = |rng: &mut ChaCha8Rng, seed: u64| {
        if rng.random::<bool>() {
            WitnessFn::Trig { band: 4, seed }
        } else {
            let l = options.grid.half_period();
            WitnessFn::Bump {
                center: rng.random_range(-l..l),
                width: 1.0,
                wavenumber: rng.random_range(-3..=3),
            }
        }
    };
    let make = |rng: &mut ChaCha8Rng, level: Option<f64>, seed: u64| match level {
        Some(k) => {
            let f = options.bump(rng, k);
            (f, smooth_g(rng, seed.rotate_left(11)))
        }
        None => (
            WitnessFn::Trig {
                band: options.random_band,
                seed,
            },
            smooth_g(rng, seed.rotate_left(11)),
        ),
    };
    let ratio = |f: &GridFunction, g: &GridFunction| {
        let t = op.apply(f, g)?;
        Ok(safe_ratio(
            lp_norm(&t, 2.0),
            lp_norm(f, 2.0) * w_s_inf_norm(g, s),
        ))
    };
    let sweep = run_sweep(options, &make, &ratio)?;
    let mut frozen_ratio_max = 0.0f64;
    for t in 0..frozen_trials {
        let seed = options.trial_seed(usize::MAX - t);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = smooth_g(&mut rng, seed).build(options.grid);
        let sg = freeze_second_argument(sigma, &g)?;
        let semi = frozen_seminorm(&sg, rho, delta, frozen_order, frozen_order)?;
        frozen_ratio_max = frozen_ratio_max.max(safe_ratio(semi, w_s_inf_norm(&g, s)));
    }
    Ok(L2WsInfReport {
        s,
        frozen_order,
        sweep,
        frozen_ratio_max,
    })
}

/// `phi(r) = s((ln 2 - ln r) / (2 ln 2))`: 1 for `r <= 1/2`, 0 for `r >= 2`,
/// and `phi(r) + phi(1/r) = 1` because `s(t) + s(1 - t) = 1`.
pub fn phi(r: f64) -> f64 {
    smooth_step((LN_2 - r.ln()) / (2.0 * LN_2), 0)
}

/// Partition transition used by [`leibniz_split`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiDescriptor {
    /// `phi = 1` for `r <= flat_below`.
    pub flat_below: f64,
    /// `phi = 0` for `r >= zero_above`.
    pub zero_above: f64,
    pub construction: String,
}

impl Default for PhiDescriptor {
    fn default() -> Self {
        PhiDescriptor {
            flat_below: 0.5,
            zero_above: 2.0,
            construction: "exp(-1/t) smooth step in ln r, odd about r = 1".into(),
        }
    }
}

/// `sigma = sigma_1 <xi>^m + sigma_2 <eta>^m` with `sigma_1 = sigma phi(1/R) <xi>^{-m}`,
/// `sigma_2 = sigma phi(R) <eta>^{-m}`, `R = <xi>^2 / <eta>^2`.
///
/// Each piece lives where the bracket it divides by dominates, so both are
/// of order 0 when `sigma` has order `m`.
#[derive(Clone, Debug)]
pub struct LeibnizSplit {
    pub sigma1: SymbolExpr,
    pub sigma2: SymbolExpr,
    pub m: f64,
    pub phi: PhiDescriptor,
}

pub fn leibniz_split(sigma: &SymbolExpr, m: f64) -> Result<LeibnizSplit> {
    if !(m >= 0.0 && m.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "Leibniz order m = {m} must be nonnegative"
        )));
    }
    let bx = SymbolExpr::bracket(Bracket::Xi);
    let be = SymbolExpr::bracket(Bracket::Eta);
    let ln_ratio = (bx.ln() - be.ln()) * 2.0;
    let scale = 1.0 / (2.0 * LN_2);
    let phi_r = ((ln_ratio.clone() * -1.0 + LN_2) * scale).smooth_step();
    let phi_inv = ((ln_ratio + LN_2) * scale).smooth_step();
    Ok(LeibnizSplit {
        sigma1: sigma.clone() * phi_inv * bx.powf(-m),
        sigma2: sigma.clone() * phi_r * be.powf(-m),
        m,
        phi: PhiDescriptor::default(),
    })
}

/// `max |phi(r) + phi(1/r) - 1|` over `samples` log-uniform `r` in `[1e-6, 1e6]`.
pub fn phi_partition_error(samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let r = (rng.random_range(-6.0..6.0f64) * std::f64::consts::LN_10).exp();
            (phi(r) + phi(1.0 / r) - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// Pointwise `|sigma_1 <xi>^m + sigma_2 <eta>^m - sigma| / max(1, |sigma|)` at
/// the given points.
pub fn reconstruction_residual(sigma: &SymbolExpr, split: &LeibnizSplit, points: &[Point]) -> f64 {
    let (s, s1, s2) = (
        sigma.compile(1),
        split.sigma1.compile(1),
        split.sigma2.compile(1),
    );
    points
        .iter()
        .map(|p| {
            let bx = (1.0 + p.xi[0] * p.xi[0]).powf(split.m / 2.0);
            let be = (1.0 + p.eta[0] * p.eta[0]).powf(split.m / 2.0);
            let v = s.eval(p);
            (s1.eval(p) * bx + s2.eval(p) * be - v).norm() / v.norm().max(1.0)
        })
        .fold(0.0, f64::max)
}

/// Random sample points with `x` in `[-pi, pi)` and frequencies up to `radius`.
pub fn sample_points(count: usize, radius: f64, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pi = std::f64::consts::PI;
    (0..count)
        .map(|_| {
            let (x, xi, eta) = (
                rng.random_range(-pi..pi),
                rng.random_range(-radius..radius),
                rng.random_range(-radius..radius),
            );
            Point::d1(x, xi, eta)
        })
        .collect()
}

/// Both sides of `T_sigma(f, g) = T_{sigma_1}(J^m f, g) + T_{sigma_2}(f, J^m g)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeibnizResidual {
    pub m: f64,
    /// Max-node absolute residual.
    pub residual: f64,
    pub lhs_sup: f64,
}

pub fn leibniz_identity_check(
    sigma: &SymbolExpr,
    m: f64,
    f: &GridFunction,
    g: &GridFunction,
) -> Result<LeibnizResidual> {
    f.grid.ensure_same(&g.grid)?;
    let grid = f.grid;
    let split = leibniz_split(sigma, m)?;
    let lhs = DiscreteBilinearOp::from_symbol(sigma, grid).apply(f, g)?;
    let a =
        DiscreteBilinearOp::from_symbol(&split.sigma1, grid).apply(&bessel_potential(f, m), g)?;
    let b =
        DiscreteBilinearOp::from_symbol(&split.sigma2, grid).apply(f, &bessel_potential(g, m))?;
    let rhs = a.add(&b)?;
    Ok(LeibnizResidual {
        m,
        residual: lhs.max_abs_diff(&rhs),
        lhs_sup: lhs.sup_norm(),
    })
}

/// Sweep `||T(f, g)||_2 / (||f||_{W^{m,2}} ||g||_{W^{s,inf}} + ||f||_{W^{s,inf}} ||g||_{W^{m,2}})`
/// for an order-`m` symbol of class `(m, 1, delta)`.
pub fn leibniz_ratio_sweep(
    sigma: &SymbolExpr,
    m: f64,
    delta: f64,
    options: &SweepOptions,
) -> Result<SweepReport> {
    let s = sobolev_threshold(options.grid.dim(), delta)?;
    let op = prepared_operator(sigma, options.grid)?;
    let make = |rng: &mut ChaCha8Rng, level: Option<f64>, seed: u64| {
        let g = WitnessFn::Trig {
            band: 4,
            seed: seed.rotate_left(7),
        };
        match level {
            Some(k) => (options.bump(rng, k), g),
            None => (
                WitnessFn::Trig {
                    band: options.random_band,
                    seed,
                },
                g,
            ),
        }
    };
    let ratio = |f: &GridFunction, g: &GridFunction| {
        let t = op.apply(f, g)?;
        let den = w_m2_norm(f, m) * w_s_inf_norm(g, s) + w_s_inf_norm(f, s) * w_m2_norm(g, m);
        Ok(safe_ratio(lp_norm(&t, 2.0), den))
    };
    run_sweep(options, &make, &ratio)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::families::{elliptic, frequency_bump};

    fn quick() -> SweepOptions {
        SweepOptions {
            grid: GridSpec::standard(64).unwrap(),
            levels: vec![1.0, 2.0, 4.0, 8.0, 16.0],
            trials_per_level: 2,
            random_trials: 2,
            ..SweepOptions::default()
        }
    }

    #[test]
    fn exponent_validation() {
        assert!(Exponents::new(4.0, 4.0, 2.0).is_ok());
        assert!(matches!(
            Exponents::new(2.0, 2.0, 2.0),
            Err(Error::Exponents(_))
        ));
        assert!(Exponents::new(1.0, 2.0, 2.0 / 3.0).is_err());
        assert!(Exponents::endpoint(2.0, 64.0).unwrap().endpoint_proxy);
    }

    #[test]
    fn thresholds() {
        assert_eq!(sobolev_threshold(1, 0.0).unwrap(), 3);
        assert_eq!(sobolev_threshold(1, 0.5).unwrap(), 4);
        assert_eq!(sobolev_threshold(2, 0.0).unwrap(), 5);
        assert!(matches!(
            sobolev_threshold(1, 1.0),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn multiplication_obeys_holder() {
        let e = estimate_norm(
            &SymbolExpr::one(),
            Exponents::new(4.0, 4.0, 2.0).unwrap(),
            &quick(),
        )
        .unwrap();
        assert!(
            e.ratio_max <= 1.0 + 1e-9 && e.ratio_max > 0.1,
            "{}",
            e.ratio_max
        );
        assert!(!e.unbounded_trend);
    }

    #[test]
    fn order_one_symbol_grows() {
        let e = estimate_norm(
            &elliptic(1.0),
            Exponents::new(4.0, 4.0, 2.0).unwrap(),
            &quick(),
        )
        .unwrap();
        assert!(
            e.unbounded_trend && e.trend_slope > 0.7,
            "{}",
            e.trend_slope
        );
        let b = estimate_norm(
            &frequency_bump(4.0),
            Exponents::new(4.0, 4.0, 2.0).unwrap(),
            &quick(),
        )
        .unwrap();
        assert!(!b.unbounded_trend, "{}", b.trend_slope);
    }

    #[test]
    fn estimates_are_deterministic() {
        let e = Exponents::new(2.0, 2.0, 1.0).unwrap();
        let a = estimate_norm(&frequency_bump(4.0), e, &quick()).unwrap();
        let b = estimate_norm(&frequency_bump(4.0), e, &quick()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sweep_levels_must_fit_the_grid() {
        let mut o = quick();
        o.levels = vec![4.0, 40.0];
        assert!(estimate_norm(
            &SymbolExpr::one(),
            Exponents::new(4.0, 4.0, 2.0).unwrap(),
            &o
        )
        .is_err());
    }

    #[test]
    fn identity_in_l2_wsinf() {
        let r = l2_wsinf_check(&SymbolExpr::one(), 1.0, 0.0, 2, &quick()).unwrap();
        assert_eq!(r.s, 3);
        assert!(r.sweep.ratio_max <= 1.0 + 1e-9, "{}", r.sweep.ratio_max);
        assert!(!r.sweep.unbounded_trend, "{:?}", r.sweep.level_sups);
        assert!(r.frozen_ratio_max > 0.0 && r.frozen_ratio_max.is_finite());
    }

    #[test]
    fn phi_partitions_unity() {
        assert_eq!(phi(0.25), 1.0);
        assert_eq!(phi(4.0), 0.0);
        assert!((phi(1.0) - 0.5).abs() < 1e-15);
        assert!(phi_partition_error(10_000, 3) < 1e-14);
    }

    #[test]
    fn split_reconstructs() {
        let pts = sample_points(500, 40.0, 9);
        for m in [0.0, 1.0, 2.0] {
            let split = leibniz_split(&SymbolExpr::one(), m).unwrap();
            assert!(reconstruction_residual(&SymbolExpr::one(), &split, &pts) < 1e-12);
        }
        assert!(leibniz_split(&SymbolExpr::one(), -1.0).is_err());
    }

    #[test]
    fn identity_leibniz_on_trig() {
        let grid = GridSpec::standard(32).unwrap();
        let f = GridFunction::from_real_fn(grid, |x| x[0].sin());
        let g = GridFunction::from_real_fn(grid, |x| x[0].cos());
        let r = leibniz_identity_check(&SymbolExpr::one(), 2.0, &f, &g).unwrap();
        assert!(r.residual < 1e-9, "{}", r.residual);
    }

    #[test]
    fn split_pieces_have_order_zero() {
        use crate::symbol::{class_report, ClassParams, SeminormConfig};
        let cfg = SeminormConfig::default();
        let zero = ClassParams::new(0.0, 1.0, 0.0);
        for m in [1.0, 2.0] {
            let split = leibniz_split(&elliptic(m), m).unwrap();
            assert!(
                class_report(&split.sigma1, &zero, 2, 6, &cfg)
                    .unwrap()
                    .consistent
            );
            assert!(
                class_report(&split.sigma2, &zero, 2, 6, &cfg)
                    .unwrap()
                    .consistent
            );
        }
        let wrong = elliptic(1.0) * SymbolExpr::bracket(Bracket::Xi).powf(-1.0);
        assert!(!class_report(&wrong, &zero, 0, 6, &cfg).unwrap().consistent);
    }
}
