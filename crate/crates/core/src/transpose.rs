//! Transposes `T^{*1}`, `T^{*2}` of bilinear operators: exact discrete adjoints,
//! the oscillatory-integral route through the compound symbol, and the
//! asymptotic expansion with its remainder fit.

use crate::error::{Error, Result};
use crate::fit::{fit_power_law, DecayFit, FitPoint};
use crate::fourier::{freq_to_space, random_trig_polynomial, space_to_freq, GridSpec, C64};
use crate::multiindex::MultiIndex;
use crate::operator::{sample_symbol, sampled_class_report, DiscreteBilinearOp, SymbolSamples};
use crate::par;
use crate::symbol::expr::{SymbolExpr, Var};
use crate::symbol::families::{in_trusted_band, localize};
use crate::symbol::seminorm::{ClassParams, SeminormReport};
use crate::symbol::tape::Point;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Which argument the transpose pairs against: `First` swaps `f` and `h`,
/// `Second` swaps `g` and `h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransposeIndex {
    First,
    Second,
}

impl TransposeIndex {
    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(TransposeIndex::First),
            2 => Ok(TransposeIndex::Second),
            _ => Err(Error::InvalidArgument(format!(
                "transpose index must be 1 or 2, got {n}"
            ))),
        }
    }
}

/// `c(y, xi, eta) = sigma(y, -xi - eta, eta)` for `First`, `sigma(y, xi, -xi - eta)` for `Second`.
pub fn compound_symbol(sigma: &SymbolExpr, which: TransposeIndex) -> SymbolExpr {
    sigma.substitute(2, &|v| {
        let flip = |c: u8| Some(-(SymbolExpr::var(Var::Xi(c)) + SymbolExpr::var(Var::Eta(c))));
        match (which, v) {
            (TransposeIndex::First, Var::Xi(c)) => flip(c),
            (TransposeIndex::Second, Var::Eta(c)) => flip(c),
            _ => None,
        }
    })
}

/// Exact discrete first transpose of sampled symbol values:
/// `W*[p, k', l] = N^{-n} sum_{j,k} W[j,k,l] e^{i (x_j - x_p)(xi_k + xi_k' + eta_l)}`.
fn adjoint_first(w: &SymbolSamples) -> Result<SymbolSamples> {
    let grid = w.grid;
    let m = grid.len();
    let norm = 1.0 / m as f64;
    let slabs = par::map(m, |l| {
        let lk = grid.wavenumber(l);
        // a[k][t] = sum_j W[j,k,l] e^{i x_j xi_t}
        let a: Vec<Vec<C64>> = (0..m)
            .map(|k| {
                let col: Vec<C64> = (0..m).map(|j| w.at(j, k, l)).collect();
                space_to_freq(&grid, &col, 1.0)
            })
            .collect();
        let mut out = vec![C64::new(0.0, 0.0); m * m];
        for kp in 0..m {
            let kw = grid.wavenumber(kp);
            let s = [kw[0] + lk[0], kw[1] + lk[1]];
            let b: Vec<C64> = (0..m)
                .map(|k| {
                    let kk = grid.wavenumber(k);
                    a[k][grid.wrap_wavenumber([kk[0] + s[0], kk[1] + s[1]])]
                })
                .collect();
            let r = freq_to_space(&grid, &b, -1.0);
            let xi_s = [
                s[0] as f64 * grid.freq_spacing(),
                s[1] as f64 * grid.freq_spacing(),
            ];
            for q in 0..m {
                let x = grid.node(q);
                let ph = C64::from_polar(norm, -(x[0] * xi_s[0] + x[1] * xi_s[1]));
                out[q * m + kp] = r[q] * ph;
            }
        }
        out
    });
    let mut result = SymbolSamples::zeros(grid)?;
    for (l, slab) in slabs.into_iter().enumerate() {
        for (qk, v) in slab.into_iter().enumerate() {
            result.values[qk * m + l] = v;
        }
    }
    Ok(result)
}

/// Exact discrete transpose of a sampled symbol.
pub fn adjoint_samples(w: &SymbolSamples, which: TransposeIndex) -> Result<SymbolSamples> {
    match which {
        TransposeIndex::First => adjoint_first(w),
        TransposeIndex::Second => Ok(adjoint_first(&w.swap_frequencies())?.swap_frequencies()),
    }
}

/// The unique discrete operator with `<T(f,g), h> = <T^{*1}(h,g), f>`
/// (resp. `<T^{*2}(f,h), g>`) for all grid functions.
pub fn transpose_adjoint_oracle(
    op: &DiscreteBilinearOp,
    which: TransposeIndex,
) -> Result<DiscreteBilinearOp> {
    let w = op.materialize()?;
    Ok(DiscreteBilinearOp::from_samples(adjoint_samples(
        &w, which,
    )?))
}

/// Symbol samples `sigma(x_j, xi_k, eta_l)` of a discrete operator.
///
/// By construction the operator maps the plane-wave pair `(e^{i xi_k x}, e^{i eta_l x})`
/// to `sigma(x, xi_k, eta_l) e^{i x (xi_k + eta_l)}`, so the samples are read off directly.
pub fn extract_symbol(op: &DiscreteBilinearOp) -> Result<SymbolSamples> {
    op.materialize()
}

/// Boundary and peak magnitudes used by [`check_localized`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Localization {
    pub boundary: f64,
    pub peak: f64,
}

/// Measure `|sigma|` where some of `|k|, |l|, |k + l|` reaches `7N/16` wavenumbers
/// (including frequencies beyond the grid in one dimension), against its peak.
pub fn localization(sigma: &SymbolExpr, grid: &GridSpec) -> Localization {
    let n = grid.points_per_axis() as i64;
    let tape = sigma.compile(grid.dim());
    let stride = (grid.points_per_axis() / 8).max(1);
    let xs: Vec<[f64; 2]> = (0..grid.len())
        .filter(|&j| {
            grid.split(j)
                .iter()
                .take(grid.dim())
                .all(|&p| p % stride == 0)
        })
        .map(|j| grid.node(j))
        .collect();
    let threshold = 7 * n / 16;
    let dk = grid.freq_spacing();
    let span: Vec<i64> = if grid.dim() == 1 {
        (-n..n).collect()
    } else {
        (-n / 2..n / 2).collect()
    };
    let mut scratch = tape.scratch();
    let (mut boundary, mut peak) = (0.0f64, 0.0f64);
    let mut visit = |k: [i64; 2], l: [i64; 2]| {
        let far = (0..grid.dim())
            .any(|c| k[c].abs().max(l[c].abs()).max((k[c] + l[c]).abs()) >= threshold);
        let xi = [k[0] as f64 * dk, k[1] as f64 * dk];
        let eta = [l[0] as f64 * dk, l[1] as f64 * dk];
        for x in &xs {
            let v = tape
                .eval_with(&Point::new(*x, xi, eta), &mut scratch)
                .norm();
            peak = peak.max(v);
            if far {
                boundary = boundary.max(v);
            }
        }
    };
    if grid.dim() == 1 {
        for &k in &span {
            for &l in &span {
                visit([k, 0], [l, 0]);
            }
        }
    } else {
        for &k0 in &span {
            for &k1 in &span {
                for &l0 in &span {
                    for &l1 in &span {
                        visit([k0, k1], [l0, l1]);
                    }
                }
            }
        }
    }
    Localization { boundary, peak }
}

/// Refuse symbols with relative magnitude above `1e-8` near the frequency boundary.
pub fn check_localized(sigma: &SymbolExpr, grid: &GridSpec) -> Result<Localization> {
    let loc = localization(sigma, grid);
    if loc.boundary > 1e-8 * loc.peak {
        return Err(Error::NotLocalized {
            boundary: loc.boundary,
            peak: loc.peak,
        });
    }
    Ok(loc)
}

/// Transpose samples through the oscillatory integral of the compound symbol,
/// `a(x, xi, eta) = (2 pi)^{-n} int int c(x + y, z + xi, eta) e^{-i z y} dy dz`,
/// discretized exactly on the periodic `y` and dual `z` lattices.
pub fn transpose_symbol_oscillatory(
    sigma: &SymbolExpr,
    which: TransposeIndex,
    grid: &GridSpec,
) -> Result<SymbolSamples> {
    check_localized(sigma, grid)?;
    let c = compound_symbol(sigma, which);
    let m = grid.len();
    let mut out = SymbolSamples::zeros(*grid)?;
    let tape = c.compile(grid.dim());
    let shift = |a: [f64; 2], b: [f64; 2]| [a[0] + b[0], a[1] + b[1]];
    let point = |x: [f64; 2], fixed: [f64; 2], moving: [f64; 2]| match which {
        TransposeIndex::First => Point::new(x, moving, fixed),
        TransposeIndex::Second => Point::new(x, fixed, moving),
    };
    if !c.free_vars().has_x() {
        let mut scratch = tape.scratch();
        for k in 0..m {
            for l in 0..m {
                let v = tape.eval_with(
                    &Point::new([0.0; 2], grid.frequency(k), grid.frequency(l)),
                    &mut scratch,
                );
                for p in 0..m {
                    let i = out.index(p, k, l);
                    out.values[i] = v;
                }
            }
        }
        return Ok(out);
    }
    // phase[q][j] = e^{-i xi_q . x_j}
    let phase: Vec<Vec<C64>> = (0..m)
        .map(|q| {
            let xi = grid.frequency(q);
            (0..m)
                .map(|j| {
                    let x = grid.node(j);
                    C64::from_polar(1.0, -(x[0] * xi[0] + x[1] * xi[1]))
                })
                .collect()
        })
        .collect();
    let norm = 1.0 / m as f64;
    // Index the pair as (moving, fixed): moving is xi for First, eta for Second.
    let rows = par::map(m * m, |pair| {
        let (mv, fx) = (pair / m, pair % m);
        let (base, fixed) = (grid.frequency(mv), grid.frequency(fx));
        let mut scratch = tape.scratch();
        let coeffs: Vec<C64> = (0..m)
            .map(|q| {
                let moving = shift(base, grid.frequency(q));
                (0..m)
                    .map(|j| {
                        tape.eval_with(&point(grid.node(j), fixed, moving), &mut scratch)
                            * phase[q][j]
                    })
                    .sum::<C64>()
            })
            .collect();
        freq_to_space(grid, &coeffs, 1.0)
            .into_iter()
            .map(|v| v * norm)
            .collect::<Vec<_>>()
    });
    for (pair, vals) in rows.into_iter().enumerate() {
        let (mv, fx) = (pair / m, pair % m);
        let (k, l) = match which {
            TransposeIndex::First => (mv, fx),
            TransposeIndex::Second => (fx, mv),
        };
        for (p, v) in vals.into_iter().enumerate() {
            let i = out.index(p, k, l);
            out.values[i] = v;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct ExpansionTerm {
    pub alpha: MultiIndex,
    pub coefficient: C64,
    pub expr: SymbolExpr,
}

/// Terms `|alpha| < order` of the transpose expansion
/// `sum_alpha ((-i)^{|alpha|} / alpha!) d_x^alpha d_xi^alpha c(x, xi, eta)`
/// with `c` the compound symbol (`d_eta` for the second transpose).
#[derive(Clone, Debug)]
pub struct ExpansionTruncation {
    pub which: TransposeIndex,
    pub order: usize,
    pub terms: Vec<ExpansionTerm>,
}

impl ExpansionTruncation {
    pub fn sum(&self) -> SymbolExpr {
        SymbolExpr::sum(self.terms.iter().map(|t| t.expr.clone()).collect())
    }
}

pub fn expansion_truncation(
    sigma: &SymbolExpr,
    which: TransposeIndex,
    order: usize,
    dim: usize,
    cap: usize,
) -> Result<ExpansionTruncation> {
    if order == 0 {
        return Err(Error::InvalidArgument(
            "truncation order must be at least 1".into(),
        ));
    }
    let needed = 2 * (order - 1);
    if needed > cap {
        return Err(Error::OrderCap {
            requested: needed,
            cap,
        });
    }
    let c = compound_symbol(sigma, which);
    let mut terms = Vec::new();
    for k in 0..order {
        for alpha in MultiIndex::of_order(dim, k) {
            let coefficient = C64::new(0.0, -1.0).powu(k as u32) / alpha.factorial();
            let d = match which {
                TransposeIndex::First => c.derivative(&alpha, &alpha, &MultiIndex::ZERO),
                TransposeIndex::Second => c.derivative(&alpha, &MultiIndex::ZERO, &alpha),
            };
            terms.push(ExpansionTerm {
                alpha,
                coefficient,
                expr: d.scale(coefficient),
            });
        }
    }
    Ok(ExpansionTruncation {
        which,
        order,
        terms,
    })
}

/// Options for [`remainder_order_fit`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemainderFitOptions {
    /// Shell upper radii `r`; shell `r` holds `r / sqrt 2 < 1 + |xi| + |eta| <= r`.
    pub radii: Vec<f64>,
    pub zero_tol: f64,
    pub min_shells: usize,
    pub order_cap: usize,
}

impl Default for RemainderFitOptions {
    fn default() -> Self {
        RemainderFitOptions {
            radii: vec![8.0, 16.0, 32.0, 64.0],
            zero_tol: 1e-9,
            min_shells: 4,
            order_cap: 6,
        }
    }
}

/// Shell sups of `|exact - approx|` over the trusted band, one per radius.
pub fn shell_sups(exact: &SymbolSamples, approx: &SymbolExpr, radii: &[f64]) -> Vec<FitPoint> {
    let grid = exact.grid;
    let m = grid.len();
    let tape = approx.compile(grid.dim());
    let r_max = radii.iter().copied().fold(0.0, f64::max);
    let r_min = radii.iter().copied().fold(f64::INFINITY, f64::min) / std::f64::consts::SQRT_2;
    let mut pairs = Vec::new();
    for k in 0..m {
        for l in 0..m {
            let (xi, eta) = (grid.frequency(k), grid.frequency(l));
            let t = 1.0 + norm2(xi) + norm2(eta);
            if t > r_min && t <= r_max && in_trusted_band(&grid, xi, eta) {
                pairs.push((k, l, t));
            }
        }
    }
    let per_pair = par::map(pairs.len(), |i| {
        let (k, l, _) = pairs[i];
        let mut scratch = tape.scratch();
        let (xi, eta) = (grid.frequency(k), grid.frequency(l));
        (0..m)
            .map(|j| {
                (exact.at(j, k, l)
                    - tape.eval_with(&Point::new(grid.node(j), xi, eta), &mut scratch))
                .norm()
            })
            .fold(0.0, f64::max)
    });
    radii
        .iter()
        .map(|&r| {
            let value = pairs
                .iter()
                .zip(&per_pair)
                .filter(|((_, _, t), _)| *t > r / std::f64::consts::SQRT_2 && *t <= r)
                .map(|(_, v)| *v)
                .fold(0.0, f64::max);
            FitPoint { radius: r, value }
        })
        .collect()
}

pub(crate) fn norm2(v: [f64; 2]) -> f64 {
    (v[0] * v[0] + v[1] * v[1]).sqrt()
}

/// Fit the decay of `sigma^{*j} - (truncation of order N)` over dyadic shells.
///
/// The symbol is multiplied by the grid's frequency cut, the exact transpose
/// comes from the discrete adjoint, and only frequencies where the cut is flat
/// enter the shells.
pub fn remainder_order_fit(
    sigma: &SymbolExpr,
    class: &ClassParams,
    which: TransposeIndex,
    order: usize,
    grid: &GridSpec,
    options: &RemainderFitOptions,
) -> Result<DecayFit> {
    class.require_expansion_range()?;
    let local = localize(sigma, grid);
    let exact = adjoint_samples(&sample_symbol(&local, grid)?, which)?;
    let approx = expansion_truncation(&local, which, order, grid.dim(), options.order_cap)?.sum();
    let points = shell_sups(&exact, &approx, &options.radii);
    fit_power_law(&points, options.zero_tol, options.min_shells)
}

/// Oscillatory route versus the adjoint oracle for an already localized symbol.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RouteAgreement {
    /// Max difference over every grid sample.
    pub full: f64,
    /// Max difference over [`in_trusted_band`] samples.
    pub trusted_band: f64,
    /// Whether `trusted_band` is the comparison that counts.
    pub band_limited: bool,
}

impl RouteAgreement {
    pub fn measured(&self) -> f64 {
        if self.band_limited {
            self.trusted_band
        } else {
            self.full
        }
    }
}

/// Compare the two transpose routes. An `x`-dependent symbol carries spatial
/// modes that alias across the periodic frequency edge, so there the oscillatory
/// route is only meaningful inside the trusted band.
pub fn route_agreement(
    local: &SymbolExpr,
    which: TransposeIndex,
    grid: &GridSpec,
) -> Result<RouteAgreement> {
    let exact = adjoint_samples(&sample_symbol(local, grid)?, which)?;
    let osc = transpose_symbol_oscillatory(local, which, grid)?;
    let m = grid.len();
    let (mut full, mut trusted_band) = (0.0f64, 0.0f64);
    for k in 0..m {
        for l in 0..m {
            let inside = in_trusted_band(grid, grid.frequency(k), grid.frequency(l));
            for j in 0..m {
                let d = (exact.at(j, k, l) - osc.at(j, k, l)).norm();
                full = full.max(d);
                if inside {
                    trusted_band = trusted_band.max(d);
                }
            }
        }
    }
    Ok(RouteAgreement {
        full,
        trusted_band,
        band_limited: local.free_vars().has_x(),
    })
}

/// Worst relative duality residual `|<T(f,g),h> - <T*(h,g),f>| / (1 + |<T(f,g),h>|)`
/// (and the analogue for the second transpose) over seeded band-limited triples.
pub fn duality_residual(
    op: &DiscreteBilinearOp,
    which: TransposeIndex,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    let grid = *op.grid();
    let t = transpose_adjoint_oracle(op, which)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let band = grid.points_per_axis() / 2 - 1;
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let f = random_trig_polynomial(grid, band, false, &mut rng);
        let g = random_trig_polynomial(grid, band, false, &mut rng);
        let h = random_trig_polynomial(grid, band, false, &mut rng);
        let lhs = op.trilinear_pairing(&f, &g, &h)?;
        let rhs = match which {
            TransposeIndex::First => t.trilinear_pairing(&h, &g, &f)?,
            TransposeIndex::Second => t.trilinear_pairing(&f, &h, &g)?,
        };
        worst = worst.max((lhs - rhs).norm() / (1.0 + lhs.norm()));
    }
    Ok(worst)
}

/// Class report of the exact transpose symbol, measured on its grid samples.
///
/// `sigma` is localized first; the report checks the same class `(m, rho, delta)`.
pub fn transpose_class_report(
    sigma: &SymbolExpr,
    class: &ClassParams,
    which: TransposeIndex,
    grid: &GridSpec,
    max_order: usize,
    stabilization: f64,
) -> Result<SeminormReport> {
    class.require_transpose_range()?;
    let local = localize(sigma, grid);
    let exact = adjoint_samples(&sample_symbol(&local, grid)?, which)?;
    sampled_class_report(&exact, class, max_order, stabilization)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{random_trig_polynomial, GridFunction};
    use crate::symbol::families::{elliptic, frequency_bump, frequency_cut};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dxi() -> SymbolExpr {
        SymbolExpr::i() * SymbolExpr::xi()
    }

    #[test]
    fn compound_of_derivative() {
        let c = compound_symbol(&dxi(), TransposeIndex::First);
        let v = c.eval(1, &Point::d1(0.3, 2.0, 5.0));
        assert!((v - C64::new(0.0, -7.0)).norm() < 1e-14);
        assert!(compound_symbol(&SymbolExpr::one(), TransposeIndex::Second).is_one());
    }

    #[test]
    fn chirp_routes_agree_inside_band() {
        let grid = GridSpec::standard(32).unwrap();
        let local = localize(&crate::symbol::families::chirp(0.5, 1.0), &grid);
        let r = route_agreement(&local, TransposeIndex::First, &grid).unwrap();
        assert!(r.band_limited);
        assert!(r.trusted_band < 1e-8, "{r:?}");
        assert!(r.full > r.trusted_band);
        let r = route_agreement(&localize(&dxi(), &grid), TransposeIndex::Second, &grid).unwrap();
        assert!(!r.band_limited && r.full < 1e-8, "{r:?}");
    }

    #[test]
    fn duality_holds_for_bump() {
        let g = GridSpec::standard(16).unwrap();
        let sigma = (SymbolExpr::x().cos() + 2.0) * frequency_bump(3.0);
        let op = DiscreteBilinearOp::from_symbol(&sigma, g);
        let t1 = transpose_adjoint_oracle(&op, TransposeIndex::First).unwrap();
        let t2 = transpose_adjoint_oracle(&op, TransposeIndex::Second).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let f = random_trig_polynomial(g, 8, false, &mut rng);
            let h = random_trig_polynomial(g, 8, false, &mut rng);
            let k = random_trig_polynomial(g, 8, false, &mut rng);
            let lhs = op.trilinear_pairing(&f, &h, &k).unwrap();
            let r1 = t1.trilinear_pairing(&k, &h, &f).unwrap();
            let r2 = t2.trilinear_pairing(&f, &k, &h).unwrap();
            assert!((lhs - r1).norm() < 1e-10 * (1.0 + lhs.norm()));
            assert!((lhs - r2).norm() < 1e-10 * (1.0 + lhs.norm()));
        }
    }

    #[test]
    fn transpose_of_derivative_is_minus_derivative_of_product() {
        let g = GridSpec::standard(32).unwrap();
        let op = DiscreteBilinearOp::from_symbol(&dxi(), g);
        let t = transpose_adjoint_oracle(&op, TransposeIndex::First).unwrap();
        let h = GridFunction::from_real_fn(g, |x| x[0].sin() + 0.5 * (2.0 * x[0]).cos());
        let k = GridFunction::from_real_fn(g, |x| (3.0 * x[0]).cos());
        let out = t.apply(&h, &k).unwrap();
        let prod = h.mul(&k).unwrap();
        let want = crate::fourier::spectral_derivative(&prod, &MultiIndex::d1(1))
            .scale(C64::new(-1.0, 0.0));
        assert!(out.max_abs_diff(&want) < 1e-10);
    }

    #[test]
    fn oscillatory_route_matches_oracle() {
        let g = GridSpec::standard(16).unwrap();
        let sigma = ((SymbolExpr::x().sin().powi(2) + 1.0) * SymbolExpr::xi()) * frequency_cut(&g);
        let op = DiscreteBilinearOp::from_symbol(&sigma, g);
        for which in [TransposeIndex::First, TransposeIndex::Second] {
            let exact = extract_symbol(&transpose_adjoint_oracle(&op, which).unwrap()).unwrap();
            let osc = transpose_symbol_oscillatory(&sigma, which, &g).unwrap();
            assert!(
                exact.max_abs_diff(&osc) < 1e-8,
                "{which:?}: {}",
                exact.max_abs_diff(&osc)
            );
        }
    }

    #[test]
    fn unlocalized_symbols_are_refused() {
        let g = GridSpec::standard(16).unwrap();
        assert!(matches!(
            transpose_symbol_oscillatory(&dxi(), TransposeIndex::First, &g),
            Err(Error::NotLocalized { .. })
        ));
    }

    #[test]
    fn truncation_examples() {
        let t = expansion_truncation(&SymbolExpr::one(), TransposeIndex::First, 3, 1, 6).unwrap();
        assert_eq!(t.terms.len(), 3);
        assert!(t.terms[0].expr.is_one() && t.terms[1].expr.is_zero() && t.terms[2].expr.is_zero());
        let t = expansion_truncation(&dxi(), TransposeIndex::First, 2, 1, 6).unwrap();
        assert!(t.terms[1].expr.is_zero());
        assert!(matches!(
            expansion_truncation(&dxi(), TransposeIndex::First, 5, 1, 6),
            Err(Error::OrderCap { .. })
        ));
    }

    #[test]
    fn expansion_refuses_delta_equal_rho() {
        let g = GridSpec::standard(16).unwrap();
        let r = remainder_order_fit(
            &SymbolExpr::one(),
            &ClassParams::new(0.0, 0.5, 0.5),
            TransposeIndex::First,
            1,
            &g,
            &RemainderFitOptions::default(),
        );
        assert!(matches!(r, Err(Error::Hypothesis(_))));
    }

    #[test]
    fn transposed_bump_stays_in_class() {
        let grid = GridSpec::standard(128).unwrap();
        let class = ClassParams::new(0.0, 1.0, 0.0);
        for which in [TransposeIndex::First, TransposeIndex::Second] {
            let r =
                transpose_class_report(&frequency_bump(2.0), &class, which, &grid, 2, 0.0).unwrap();
            assert!(r.consistent, "{which:?}");
        }
    }

    #[test]
    fn transpose_report_detects_wrong_order() {
        let grid = GridSpec::standard(64).unwrap();
        let low = ClassParams::new(0.0, 1.0, 0.0);
        let r = transpose_class_report(&elliptic(1.0), &low, TransposeIndex::First, &grid, 1, 0.0)
            .unwrap();
        assert!(!r.consistent);
    }
}
