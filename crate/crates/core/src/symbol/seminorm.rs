use super::expr::{differentiate, SymbolExpr};
use super::tape::{Point, Scratch};
use crate::error::{Error, Result};
use crate::fit::FitPoint;
use crate::fourier::GridSpec;
use crate::multiindex::{triples_up_to, MultiIndex};
use crate::par;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Order and type `(m, rho, delta)` of a class `BS^m_{rho, delta}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassParams {
    pub m: f64,
    pub rho: f64,
    pub delta: f64,
}

impl ClassParams {
    pub fn new(m: f64, rho: f64, delta: f64) -> Self {
        ClassParams { m, rho, delta }
    }

    /// Exponent `m + delta |alpha| - rho (|beta| + |gamma|)`.
    pub fn exponent(&self, alpha: &MultiIndex, beta: &MultiIndex, gamma: &MultiIndex) -> f64 {
        self.m + self.delta * alpha.order() as f64
            - self.rho * (beta.order() + gamma.order()) as f64
    }

    /// `(1 + |xi| + |eta|)^{-exponent}`.
    pub fn weight(
        &self,
        alpha: &MultiIndex,
        beta: &MultiIndex,
        gamma: &MultiIndex,
        xi: &[f64],
        eta: &[f64],
    ) -> f64 {
        (1.0 + norm(xi) + norm(eta)).powf(-self.exponent(alpha, beta, gamma))
    }

    /// Reject parameters outside `0 <= delta <= rho <= 1`.
    pub fn require_transpose_range(&self) -> Result<()> {
        if !(0.0 <= self.delta && self.delta <= self.rho && self.rho <= 1.0) {
            return Err(Error::Hypothesis(format!(
                "need 0 <= delta <= rho <= 1, got rho = {}, delta = {}",
                self.rho, self.delta
            )));
        }
        Ok(())
    }

    /// Reject parameters outside `0 <= delta < rho <= 1`.
    pub fn require_expansion_range(&self) -> Result<()> {
        self.require_transpose_range()?;
        if self.delta >= self.rho {
            return Err(Error::Hypothesis(format!(
                "asymptotic expansion needs delta < rho, got rho = {}, delta = {}",
                self.rho, self.delta
            )));
        }
        Ok(())
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Sampling parameters for the measured seminorms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeminormConfig {
    pub dim: usize,
    /// Spatial sample nodes per axis (on the standard grid of half period `pi`).
    pub x_points: usize,
    pub directions: usize,
    pub seed: u64,
    pub order_cap: usize,
    /// Allowed relative growth between the sups through shells `J - 1` and `J`.
    pub stabilization: f64,
}

impl Default for SeminormConfig {
    fn default() -> Self {
        SeminormConfig {
            dim: 1,
            x_points: 16,
            directions: 64,
            seed: 0xB5D0,
            order_cap: 6,
            stabilization: 0.25,
        }
    }
}

/// Frequency sample points grouped by dyadic shell plus the spatial nodes.
#[derive(Clone, Debug)]
pub struct SampleCloud {
    pub dim: usize,
    pub xs: Vec<[f64; 2]>,
    pub shells: Vec<Vec<([f64; 2], [f64; 2])>>,
    /// Random directions per shell; the axis points come on top.
    pub directions: usize,
}

impl SampleCloud {
    /// Shell 0 covers radii in `[0, 2)`, shell `j >= 1` radii in `[2^j, 2^{j+1})`.
    /// Each shell has its own seed, so the cloud through shell `J` extends the
    /// cloud through shell `J - 1`.
    pub fn new(dim: usize, shells: usize, config: &SeminormConfig) -> Result<Self> {
        let grid = GridSpec::new(dim, std::f64::consts::PI, config.x_points)?;
        let xs = (0..grid.len()).map(|i| grid.node(i)).collect();
        let shells = (0..=shells)
            .map(|j| {
                let mut rng = ChaCha8Rng::seed_from_u64(
                    config.seed ^ (j as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15),
                );
                let mut pts: Vec<([f64; 2], [f64; 2])> = (0..config.directions)
                    .map(|_| {
                        let mut d = [0.0f64; 4];
                        for v in d.iter_mut().take(2 * dim) {
                            *v = rng.sample(StandardNormal);
                        }
                        let len = norm(&d[..2 * dim]).max(1e-300);
                        let u: f64 = rng.random();
                        let r = if j == 0 {
                            2.0 * u
                        } else {
                            (j as f64 + u).exp2()
                        };
                        let mut xi = [0.0; 2];
                        let mut eta = [0.0; 2];
                        for c in 0..dim {
                            xi[c] = r * d[c] / len;
                            eta[c] = r * d[dim + c] / len;
                        }
                        (xi, eta)
                    })
                    .collect();
                // The axes xi = 0, eta = 0 and xi + eta = 0 are where symbols of
                // bilinear type degenerate; random directions almost never hit them.
                let r = if j == 0 { 1.0 } else { (j as f64 + 0.5).exp2() };
                let a = r / std::f64::consts::SQRT_2;
                for c in 0..dim {
                    for sign in [1.0, -1.0] {
                        let mut axis = [([0.0; 2], [0.0; 2]); 3];
                        axis[0].0[c] = sign * r;
                        axis[1].1[c] = sign * r;
                        axis[2].0[c] = sign * a;
                        axis[2].1[c] = -sign * a;
                        pts.extend(axis);
                    }
                }
                pts
            })
            .collect();
        Ok(SampleCloud {
            dim,
            xs,
            shells,
            directions: config.directions,
        })
    }

    pub fn describe(&self) -> String {
        format!(
            "n={}; x: {} grid nodes on [-pi, pi)^n; (xi, eta): {} dyadic shells (shell 0: radius < 2, shell j: 2^j <= radius < 2^(j+1)) x {} seeded directions plus the degenerate axes",
            self.dim,
            self.xs.len(),
            self.shells.len(),
            self.directions
        )
    }
}

/// Per-shell sup of the weighted derivative `|d sigma| (1 + |xi| + |eta|)^{-exponent}`.
pub fn shell_profile(
    sigma: &SymbolExpr,
    class: &ClassParams,
    idx: (&MultiIndex, &MultiIndex, &MultiIndex),
    cloud: &SampleCloud,
    cap: usize,
) -> Result<Vec<f64>> {
    let (alpha, beta, gamma) = idx;
    let d = differentiate(sigma, alpha, beta, gamma, cap)?;
    if d.is_zero() {
        return Ok(vec![0.0; cloud.shells.len()]);
    }
    let tape = d.compile(cloud.dim);
    let dim = cloud.dim;
    let out = par::map(cloud.shells.len(), |j| {
        let mut scratch: Scratch = tape.scratch();
        let mut sup = 0.0f64;
        for (xi, eta) in &cloud.shells[j] {
            let w = class.weight(alpha, beta, gamma, &xi[..dim], &eta[..dim]);
            for x in &cloud.xs {
                let v = tape
                    .eval_with(&Point::new(*x, *xi, *eta), &mut scratch)
                    .norm()
                    * w;
                sup = if v.is_nan() { f64::NAN } else { sup.max(v) };
            }
        }
        sup
    });
    Ok(out)
}

/// Measured Hormander seminorm over shells `0..=shells`.
pub fn hormander_seminorm(
    sigma: &SymbolExpr,
    class: &ClassParams,
    alpha: &MultiIndex,
    beta: &MultiIndex,
    gamma: &MultiIndex,
    shells: usize,
    config: &SeminormConfig,
) -> Result<f64> {
    if shells < 3 {
        return Err(Error::InvalidArgument(
            "the shell cap must be at least 3".into(),
        ));
    }
    let cloud = SampleCloud::new(config.dim, shells, config)?;
    let profile = shell_profile(sigma, class, (alpha, beta, gamma), &cloud, config.order_cap)?;
    Ok(profile.into_iter().fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeminormEntry {
    pub alpha: MultiIndex,
    pub beta: MultiIndex,
    pub gamma: MultiIndex,
    /// Sup through the top shell.
    pub value: f64,
    /// Sup through the shell below the top.
    pub previous: f64,
}

impl SeminormEntry {
    fn stable(&self, ratio: f64, floor: f64) -> bool {
        self.value.is_finite() && self.value <= (1.0 + ratio) * self.previous + floor
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeminormReport {
    pub class: ClassParams,
    pub max_order: usize,
    pub shells: usize,
    pub entries: Vec<SeminormEntry>,
    pub consistent: bool,
    pub stabilization: f64,
    pub sample_spec: String,
}

impl SeminormReport {
    pub fn entry(
        &self,
        alpha: &MultiIndex,
        beta: &MultiIndex,
        gamma: &MultiIndex,
    ) -> Option<&SeminormEntry> {
        self.entries
            .iter()
            .find(|e| e.alpha == *alpha && e.beta == *beta && e.gamma == *gamma)
    }

    /// Largest relative growth `(value - floor)/previous - 1` over the entries,
    /// clamped at 0; the report is consistent iff this is at most `stabilization`.
    pub fn worst_growth(&self) -> f64 {
        let floor = stability_floor(&self.entries);
        self.entries
            .iter()
            .map(|e| {
                if !e.value.is_finite() {
                    f64::INFINITY
                } else if e.value - floor <= e.previous {
                    0.0
                } else if e.previous > 0.0 {
                    (e.value - floor) / e.previous - 1.0
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0, f64::max)
    }

    /// Largest entry value, the constant bounding every measured derivative.
    pub fn max_value(&self) -> f64 {
        self.entries.iter().map(|e| e.value).fold(0.0, f64::max)
    }

    /// Entries that grew beyond the stabilization ratio.
    pub fn unstable(&self) -> Vec<&SeminormEntry> {
        let floor = stability_floor(&self.entries);
        self.entries
            .iter()
            .filter(|e| !e.stable(self.stabilization, floor))
            .collect()
    }
}

/// Values below this are rounding noise relative to the zeroth-order entry.
fn stability_floor(entries: &[SeminormEntry]) -> f64 {
    let scale = entries
        .iter()
        .find(|e| e.alpha.is_zero() && e.beta.is_zero() && e.gamma.is_zero())
        .map_or(1.0, |e| e.value);
    1e-9 * scale.max(1.0)
}

pub(crate) fn assemble_report(
    class: ClassParams,
    max_order: usize,
    shells: usize,
    entries: Vec<SeminormEntry>,
    ratio: f64,
    sample_spec: String,
) -> SeminormReport {
    let floor = stability_floor(&entries);
    let consistent = entries.iter().all(|e| e.stable(ratio, floor));
    SeminormReport {
        class,
        max_order,
        shells,
        entries,
        consistent,
        stabilization: ratio,
        sample_spec,
    }
}

/// One seminorm per multi-index triple of total order `<= max_order`.
pub fn class_report(
    sigma: &SymbolExpr,
    class: &ClassParams,
    max_order: usize,
    shells: usize,
    config: &SeminormConfig,
) -> Result<SeminormReport> {
    if max_order > config.order_cap {
        return Err(Error::OrderCap {
            requested: max_order,
            cap: config.order_cap,
        });
    }
    if shells < 3 {
        return Err(Error::InvalidArgument(
            "the shell cap must be at least 3".into(),
        ));
    }
    let dim = config.dim;
    let cloud = SampleCloud::new(dim, shells, config)?;
    let mut entries = Vec::new();
    for (a, b, c) in triples_up_to(dim, max_order) {
        let profile = shell_profile(sigma, class, (&a, &b, &c), &cloud, config.order_cap)?;
        let value = profile.iter().copied().fold(0.0, f64::max);
        let previous = profile[..shells].iter().copied().fold(0.0, f64::max);
        entries.push(SeminormEntry {
            alpha: a,
            beta: b,
            gamma: c,
            value,
            previous,
        });
    }
    Ok(assemble_report(
        *class,
        max_order,
        shells,
        entries,
        config.stabilization,
        cloud.describe(),
    ))
}

/// Unweighted sup of `|sigma|` over radial shells `r / sqrt 2 < 1 + |xi| + |eta| <= r`
/// and the spatial nodes, one point per radius.
pub fn radial_shell_sups(
    sigma: &SymbolExpr,
    radii: &[f64],
    config: &SeminormConfig,
) -> Result<Vec<FitPoint>> {
    let dim = config.dim;
    let grid = GridSpec::new(dim, std::f64::consts::PI, config.x_points)?;
    let xs: Vec<[f64; 2]> = (0..grid.len()).map(|i| grid.node(i)).collect();
    let tape = sigma.compile(dim);
    let out = par::map(radii.len(), |s| {
        let r = radii[s];
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ (r.to_bits()).rotate_left(17));
        let mut scratch = tape.scratch();
        let mut sup = 0.0f64;
        for _ in 0..config.directions {
            let mut d = [0.0f64; 4];
            for v in d.iter_mut().take(2 * dim) {
                *v = rng.sample(StandardNormal);
            }
            let gauge = (norm(&d[..dim]) + norm(&d[dim..2 * dim])).max(1e-300);
            let u: f64 = rng.random();
            let t = r / std::f64::consts::SQRT_2 + u * r * (1.0 - std::f64::consts::FRAC_1_SQRT_2);
            let scale = (t - 1.0) / gauge;
            let mut xi = [0.0; 2];
            let mut eta = [0.0; 2];
            for c in 0..dim {
                xi[c] = scale * d[c];
                eta[c] = scale * d[dim + c];
            }
            for x in &xs {
                let v = tape
                    .eval_with(&Point::new(*x, xi, eta), &mut scratch)
                    .norm();
                sup = if v.is_nan() { f64::NAN } else { sup.max(v) };
            }
        }
        FitPoint {
            radius: r,
            value: sup,
        }
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::families::{chirp, elliptic};

    const Z: MultiIndex = MultiIndex::ZERO;

    #[test]
    fn identity_seminorm_is_one() {
        let cfg = SeminormConfig::default();
        let v = hormander_seminorm(
            &SymbolExpr::one(),
            &ClassParams::new(0.0, 1.0, 0.0),
            &Z,
            &Z,
            &Z,
            6,
            &cfg,
        )
        .unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn bracket_seminorm_bounds() {
        let cfg = SeminormConfig::default();
        let v = hormander_seminorm(
            &elliptic(1.0),
            &ClassParams::new(1.0, 1.0, 0.0),
            &Z,
            &Z,
            &Z,
            8,
            &cfg,
        )
        .unwrap();
        assert!((0.5..=1.0).contains(&v), "{v}");
        let d = MultiIndex::d1(1);
        let v = hormander_seminorm(
            &elliptic(2.0),
            &ClassParams::new(2.0, 1.0, 0.0),
            &Z,
            &d,
            &Z,
            8,
            &cfg,
        )
        .unwrap();
        assert!(v <= 2.0 && v > 1.0, "{v}");
    }

    #[test]
    fn wrong_order_is_flagged() {
        let cfg = SeminormConfig::default();
        let rep = class_report(
            &elliptic(1.0),
            &ClassParams::new(0.0, 1.0, 0.0),
            1,
            10,
            &cfg,
        )
        .unwrap();
        assert!(!rep.consistent);
        let rep = class_report(
            &SymbolExpr::one(),
            &ClassParams::new(0.0, 1.0, 0.0),
            2,
            10,
            &cfg,
        )
        .unwrap();
        assert!(rep.consistent);
        assert!(rep.entries.iter().all(|e| e.value <= 1.0));
        assert_eq!(rep.entries.len(), 10);
    }

    #[test]
    fn chirp_is_consistent_with_declared_class() {
        let cfg = SeminormConfig::default();
        let rep = class_report(
            &chirp(0.5, 1.0),
            &ClassParams::new(0.0, 0.5, 0.5),
            2,
            10,
            &cfg,
        )
        .unwrap();
        assert!(rep.consistent, "{:?}", rep.entries);
    }

    #[test]
    fn cap_is_enforced() {
        let cfg = SeminormConfig::default();
        assert!(matches!(
            class_report(
                &SymbolExpr::one(),
                &ClassParams::new(0.0, 1.0, 0.0),
                7,
                5,
                &cfg
            ),
            Err(Error::OrderCap { .. })
        ));
    }
}
