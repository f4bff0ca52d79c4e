//! Discrete bilinear operators `T_sigma(f, g)` on a periodic grid.

use crate::error::{Error, Result};
use crate::fourier::{
    forward_transform, fourier_multiplier, pairing, spectral_derivative, GridFunction, GridSpec,
    C64,
};
use crate::multiindex::{triples_up_to, MultiIndex};
use crate::par;
use crate::symbol::expr::SymbolExpr;
use crate::symbol::seminorm::{assemble_report, ClassParams, SeminormEntry, SeminormReport};
use crate::symbol::separable::SeparableSymbol;
use crate::symbol::tape::{CompiledSymbol, Point};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Largest tensor (in complex entries) that may be materialized.
pub const TENSOR_LIMIT: usize = 1 << 28;

/// Grid samples `sigma(x_j, xi_k, eta_l)`, flat index `(j M + k) M + l` with `M = N^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolSamples {
    pub grid: GridSpec,
    pub values: Vec<C64>,
}

impl SymbolSamples {
    pub fn zeros(grid: GridSpec) -> Result<Self> {
        let entries = tensor_entries(&grid)?;
        Ok(SymbolSamples {
            grid,
            values: vec![C64::new(0.0, 0.0); entries],
        })
    }

    #[inline]
    pub fn index(&self, j: usize, k: usize, l: usize) -> usize {
        let m = self.grid.len();
        (j * m + k) * m + l
    }

    #[inline]
    pub fn at(&self, j: usize, k: usize, l: usize) -> C64 {
        self.values[self.index(j, k, l)]
    }

    /// Slab `W[:, :, l]` as a row-major `(j, k)` array.
    pub fn slab_l(&self, l: usize) -> Vec<C64> {
        let m = self.grid.len();
        let mut out = Vec::with_capacity(m * m);
        for j in 0..m {
            for k in 0..m {
                out.push(self.at(j, k, l));
            }
        }
        out
    }

    /// Exchange the roles of `xi` and `eta`.
    pub fn swap_frequencies(&self) -> SymbolSamples {
        let m = self.grid.len();
        let mut values = vec![C64::new(0.0, 0.0); self.values.len()];
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    values[(j * m + l) * m + k] = self.at(j, k, l);
                }
            }
        }
        SymbolSamples {
            grid: self.grid,
            values,
        }
    }

    pub fn max_abs_diff(&self, other: &SymbolSamples) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

pub(crate) fn tensor_entries(grid: &GridSpec) -> Result<usize> {
    let m = grid.len();
    let entries = m
        .checked_mul(m)
        .and_then(|v| v.checked_mul(m))
        .unwrap_or(usize::MAX);
    if entries > TENSOR_LIMIT {
        return Err(Error::TensorTooLarge {
            entries,
            limit: TENSOR_LIMIT,
        });
    }
    Ok(entries)
}

/// Evaluate a compiled symbol on the `(j, k, l)` lattice, one x-slab per call of `row`.
pub(crate) fn symbol_slab(tape: &CompiledSymbol, grid: &GridSpec, j: usize, out: &mut [C64]) {
    let m = grid.len();
    let x = grid.node(j);
    let mut scratch = tape.scratch();
    for k in 0..m {
        let xi = grid.frequency(k);
        for l in 0..m {
            out[k * m + l] = tape.eval_with(&Point::new(x, xi, grid.frequency(l)), &mut scratch);
        }
    }
}

/// Sample `sigma` on the full `(x, xi, eta)` lattice.
pub fn sample_symbol(sigma: &SymbolExpr, grid: &GridSpec) -> Result<SymbolSamples> {
    let mut out = SymbolSamples::zeros(*grid)?;
    let m = grid.len();
    let tape = sigma.compile(grid.dim());
    if !sigma.free_vars().has_x() {
        let mut slab = vec![C64::new(0.0, 0.0); m * m];
        symbol_slab(&tape, grid, 0, &mut slab);
        for chunk in out.values.chunks_mut(m * m) {
            chunk.copy_from_slice(&slab);
        }
    } else {
        par::for_chunks(&mut out.values, m * m, |j, chunk| {
            symbol_slab(&tape, grid, j, chunk)
        });
    }
    Ok(out)
}

#[derive(Clone, Debug)]
enum Source {
    Symbol {
        expr: SymbolExpr,
        tape: Arc<CompiledSymbol>,
        x_free: bool,
    },
    Tensor(Arc<SymbolSamples>),
}

/// A trilinear form on one grid, driven by a symbol or by explicit samples.
#[derive(Clone, Debug)]
pub struct DiscreteBilinearOp {
    grid: GridSpec,
    source: Source,
}

impl DiscreteBilinearOp {
    pub fn from_symbol(sigma: &SymbolExpr, grid: GridSpec) -> Self {
        DiscreteBilinearOp {
            grid,
            source: Source::Symbol {
                expr: sigma.clone(),
                tape: Arc::new(sigma.compile(grid.dim())),
                x_free: !sigma.free_vars().has_x(),
            },
        }
    }

    pub fn from_samples(samples: SymbolSamples) -> Self {
        DiscreteBilinearOp {
            grid: samples.grid,
            source: Source::Tensor(Arc::new(samples)),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn symbol(&self) -> Option<&SymbolExpr> {
        match &self.source {
            Source::Symbol { expr, .. } => Some(expr),
            Source::Tensor(_) => None,
        }
    }

    /// The symbol samples `W[j, k, l]`, evaluating the symbol if needed.
    pub fn materialize(&self) -> Result<SymbolSamples> {
        match &self.source {
            Source::Symbol { expr, .. } => sample_symbol(expr, &self.grid),
            Source::Tensor(t) => Ok((**t).clone()),
        }
    }

    /// Fill `out` with the `(k, l)` slab at node `j`.
    pub(crate) fn slab(&self, j: usize, out: &mut [C64]) {
        match &self.source {
            Source::Symbol { tape, .. } => symbol_slab(tape, &self.grid, j, out),
            Source::Tensor(t) => {
                let mm = self.grid.len() * self.grid.len();
                out.copy_from_slice(&t.values[j * mm..(j + 1) * mm]);
            }
        }
    }

    /// `T(f, g)(x_j) = w^2 sum_{k,l} W[j,k,l] F_k G_l e^{i x_j (xi_k + eta_l)}`,
    /// `w` the dual cell volume.
    pub fn apply(&self, f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
        self.grid.ensure_same(&f.grid)?;
        self.grid.ensure_same(&g.grid)?;
        let grid = self.grid;
        let m = grid.len();
        let w = grid.dual_cell_volume();
        let fc = forward_transform(f).coeffs;
        let gc = forward_transform(g).coeffs;
        let shared = match &self.source {
            Source::Symbol {
                tape, x_free: true, ..
            } => {
                let mut slab = vec![C64::new(0.0, 0.0); m * m];
                symbol_slab(tape, &grid, 0, &mut slab);
                Some(slab)
            }
            _ => None,
        };
        let values = par::map(m, |j| {
            let x = grid.node(j);
            let a: Vec<C64> = (0..m)
                .map(|k| fc[k] * w * phase(x, grid.frequency(k)))
                .collect();
            let b: Vec<C64> = (0..m)
                .map(|l| gc[l] * w * phase(x, grid.frequency(l)))
                .collect();
            let mut local;
            let slab: &[C64] = match (&shared, &self.source) {
                (Some(s), _) => s,
                (None, Source::Tensor(t)) => &t.values[j * m * m..(j + 1) * m * m],
                (None, _) => {
                    local = vec![C64::new(0.0, 0.0); m * m];
                    self.slab(j, &mut local);
                    &local
                }
            };
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..m {
                if a[k] == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = &slab[k * m..(k + 1) * m];
                let inner: C64 = row.iter().zip(&b).map(|(s, bv)| s * bv).sum();
                acc += a[k] * inner;
            }
            acc
        });
        GridFunction::new(grid, values)
    }

    /// `<T(f, g), h>` under the real bilinear pairing.
    pub fn trilinear_pairing(
        &self,
        f: &GridFunction,
        g: &GridFunction,
        h: &GridFunction,
    ) -> Result<C64> {
        pairing(&self.apply(f, g)?, h)
    }
}

#[inline]
pub(crate) fn phase(x: [f64; 2], xi: [f64; 2]) -> C64 {
    C64::from_polar(1.0, x[0] * xi[0] + x[1] * xi[1])
}

/// Pairing via explicit contraction of the sampled tensor, independent of [`DiscreteBilinearOp::apply`].
pub fn tensor_pairing(
    samples: &SymbolSamples,
    f: &GridFunction,
    g: &GridFunction,
    h: &GridFunction,
) -> Result<C64> {
    let grid = samples.grid;
    grid.ensure_same(&f.grid)?;
    grid.ensure_same(&g.grid)?;
    grid.ensure_same(&h.grid)?;
    let m = grid.len();
    let w = grid.dual_cell_volume();
    let fc = forward_transform(f).coeffs;
    let gc = forward_transform(g).coeffs;
    let mut total = C64::new(0.0, 0.0);
    for j in 0..m {
        let x = grid.node(j);
        for (k, &fk) in fc.iter().enumerate() {
            for (l, &gl) in gc.iter().enumerate() {
                let e = phase(x, add(grid.frequency(k), grid.frequency(l)));
                total += h.values[j] * samples.at(j, k, l) * fk * gl * e;
            }
        }
    }
    Ok(total * w * w * grid.cell_volume())
}

fn add(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] + b[0], a[1] + b[1]]
}

/// `sum_r a_r(x) (b_r(D) f)(x) (c_r(D) g)(x)` in `O(R N^n log N)`.
pub fn apply_separable(
    sigma: &SeparableSymbol,
    f: &GridFunction,
    g: &GridFunction,
) -> Result<GridFunction> {
    f.grid.ensure_same(&g.grid)?;
    let grid = f.grid;
    let dim = grid.dim();
    let mut out = GridFunction::zeros(grid);
    for term in sigma.terms() {
        let (ta, tb, tc) = (
            term.a.compile(dim),
            term.b.compile(dim),
            term.c.compile(dim),
        );
        let bf = fourier_multiplier(f, |xi| tb.eval(&Point::new([0.0; 2], xi, [0.0; 2])));
        let cg = fourier_multiplier(g, |eta| tc.eval(&Point::new([0.0; 2], [0.0; 2], eta)));
        for (j, v) in out.values.iter_mut().enumerate() {
            let a = ta.eval(&Point::new(grid.node(j), [0.0; 2], [0.0; 2]));
            *v += a * bf.values[j] * cg.values[j];
        }
    }
    Ok(out)
}

/// Linear symbol `sigma_g(x_j, xi_k)` sampled on the grid, flat index `j M + k`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrozenSymbol {
    pub grid: GridSpec,
    pub values: Vec<C64>,
}

impl FrozenSymbol {
    pub fn at(&self, j: usize, k: usize) -> C64 {
        self.values[j * self.grid.len() + k]
    }

    /// The linear operator `sigma_g(x, D) f`.
    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        self.grid.ensure_same(&f.grid)?;
        let grid = self.grid;
        let m = grid.len();
        let w = grid.dual_cell_volume();
        let fc = forward_transform(f).coeffs;
        let values = (0..m)
            .map(|j| {
                let x = grid.node(j);
                (0..m)
                    .map(|k| self.at(j, k) * fc[k] * phase(x, grid.frequency(k)))
                    .sum::<C64>()
                    * w
            })
            .collect();
        GridFunction::new(grid, values)
    }
}

/// `sigma_g(x, xi) = sum_l sigma(x, xi, eta_l) G_l e^{i eta_l x}` (with the dual weight).
pub fn freeze_second_argument(sigma: &SymbolExpr, g: &GridFunction) -> Result<FrozenSymbol> {
    let grid = g.grid;
    let m = grid.len();
    let w = grid.dual_cell_volume();
    let op = DiscreteBilinearOp::from_symbol(sigma, grid);
    let gc = forward_transform(g).coeffs;
    let rows = par::map(m, |j| {
        let x = grid.node(j);
        let mut slab = vec![C64::new(0.0, 0.0); m * m];
        op.slab(j, &mut slab);
        let b: Vec<C64> = (0..m)
            .map(|l| gc[l] * w * phase(x, grid.frequency(l)))
            .collect();
        (0..m)
            .map(|k| {
                slab[k * m..(k + 1) * m]
                    .iter()
                    .zip(&b)
                    .map(|(s, bv)| s * bv)
                    .sum::<C64>()
            })
            .collect::<Vec<_>>()
    });
    Ok(FrozenSymbol {
        grid,
        values: rows.into_iter().flatten().collect(),
    })
}

/// Central difference along the frequency index, or `None` at the lattice edge.
fn central_difference(col: &[Option<C64>], step: f64) -> Vec<Option<C64>> {
    (0..col.len())
        .map(|k| {
            if k == 0 || k + 1 == col.len() {
                return None;
            }
            match (col[k - 1], col[k + 1]) {
                (Some(a), Some(b)) => Some((b - a) / (2.0 * step)),
                _ => None,
            }
        })
        .collect()
}

/// Measured `|sigma_g|_k = max_{|alpha|, |beta| <= k} sup |d_x^alpha d_xi^beta sigma_g| (1+|xi|)^{-delta|alpha| + rho|beta|}`.
///
/// x-derivatives are spectral (exact for the grid-band-limited `sigma_g`),
/// xi-derivatives are central differences on the frequency lattice.
pub fn frozen_seminorm(
    sg: &FrozenSymbol,
    rho: f64,
    delta: f64,
    k: usize,
    cap: usize,
) -> Result<f64> {
    if k > cap {
        return Err(Error::OrderCap {
            requested: 2 * k,
            cap,
        });
    }
    let grid = sg.grid;
    if grid.dim() != 1 {
        return Err(Error::InvalidArgument(
            "frozen seminorms are measured in one dimension".into(),
        ));
    }
    let m = grid.len();
    let step = grid.freq_spacing();
    let mut best = 0.0f64;
    for a in 0..=k {
        // Column k of sigma_g differentiated a times in x.
        let mut dx = vec![C64::new(0.0, 0.0); m * m];
        for kk in 0..m {
            let col = GridFunction::new(grid, (0..m).map(|j| sg.at(j, kk)).collect())?;
            let d = spectral_derivative(&col, &MultiIndex::d1(a as u32));
            for j in 0..m {
                dx[j * m + kk] = d.values[j];
            }
        }
        for j in 0..m {
            let mut row: Vec<Option<C64>> = (0..m).map(|kk| Some(dx[j * m + kk])).collect();
            for b in 0..=k {
                if b > 0 {
                    row = central_difference(&row, step);
                }
                for (kk, v) in row.iter().enumerate() {
                    if let Some(v) = v {
                        let xi = grid.axis_frequency(kk).abs();
                        let wgt = (1.0 + xi).powf(-delta * a as f64 + rho * b as f64);
                        best = best.max(v.norm() * wgt);
                    }
                }
            }
        }
    }
    Ok(best)
}

/// Central-difference stencil `(offset, weight)` for a derivative of order `n` at step `h`.
fn difference_stencil(n: usize, h: f64) -> Vec<(i64, f64)> {
    let conv = |a: &[(i64, f64)], b: &[(i64, f64)]| {
        let mut out: BTreeMap<i64, f64> = BTreeMap::new();
        for &(i, u) in a {
            for &(j, v) in b {
                *out.entry(i + j).or_default() += u * v;
            }
        }
        out.into_iter().collect::<Vec<_>>()
    };
    let first = [(-1, -0.5 / h), (1, 0.5 / h)];
    let second = [(-1, 1.0 / (h * h)), (0, -2.0 / (h * h)), (1, 1.0 / (h * h))];
    let mut st = vec![(0, 1.0)];
    for _ in 0..n / 2 {
        st = conv(&st, &second);
    }
    if n % 2 == 1 {
        st = conv(&st, &first);
    }
    st
}

/// Seminorm stabilization report measured directly on grid samples (`n = 1`).
///
/// x-derivatives are spectral, xi- and eta-derivatives central differences.
/// Only frequencies in the disc that fits inside the trusted band are used, and
/// the top dyadic shell is the largest one that disc covers completely.
pub fn sampled_class_report(
    samples: &SymbolSamples,
    class: &ClassParams,
    max_order: usize,
    stabilization: f64,
) -> Result<SeminormReport> {
    let grid = samples.grid;
    if grid.dim() != 1 {
        return Err(Error::InvalidArgument(
            "sampled seminorms are measured in one dimension".into(),
        ));
    }
    let m = grid.len();
    let h = grid.freq_spacing();
    let disc = 0.375 * grid.nyquist() / std::f64::consts::SQRT_2;
    let top = disc.log2().floor() as i64 - 1;
    if top < 2 {
        return Err(Error::InsufficientRange {
            usable: top.max(0) as usize + 1,
            required: 3,
        });
    }
    let shells = top as usize;
    let reach = (max_order as i64 + 1) / 2;
    let shell_of = |r: f64| {
        if r < 2.0 {
            0
        } else {
            r.log2().floor() as usize
        }
    };
    let mut points = Vec::new();
    for k in 0..m {
        for l in 0..m {
            let (xi, eta) = (grid.axis_frequency(k), grid.axis_frequency(l));
            let r = xi.hypot(eta);
            let interior = (k as i64 - reach) >= 0
                && (k as i64 + reach) < m as i64
                && (l as i64 - reach) >= 0
                && (l as i64 + reach) < m as i64;
            if interior && r < (1u64 << (shells + 1)) as f64 {
                points.push((k, l, shell_of(r)));
            }
        }
    }
    let derived: Vec<Vec<C64>> = (0..=max_order)
        .map(|a| {
            let cols = par::map(m * m, |kl| {
                let col = GridFunction {
                    grid,
                    values: (0..m).map(|j| samples.values[j * m * m + kl]).collect(),
                };
                spectral_derivative(&col, &MultiIndex::d1(a as u32)).values
            });
            let mut out = vec![C64::new(0.0, 0.0); m * m * m];
            for (kl, col) in cols.into_iter().enumerate() {
                for (j, v) in col.into_iter().enumerate() {
                    out[j * m * m + kl] = v;
                }
            }
            out
        })
        .collect();
    let mut entries = Vec::new();
    for (a, b, c) in triples_up_to(1, max_order) {
        let d = &derived[a.order()];
        let (sb, sc) = (
            difference_stencil(b.order(), h),
            difference_stencil(c.order(), h),
        );
        let per_point = par::map(points.len(), |p| {
            let (k, l, _) = points[p];
            let (xi, eta) = (grid.axis_frequency(k), grid.axis_frequency(l));
            let w = class.weight(&a, &b, &c, &[xi], &[eta]);
            (0..m)
                .map(|j| {
                    let mut v = C64::new(0.0, 0.0);
                    for &(dk, u) in &sb {
                        for &(dl, t) in &sc {
                            let kk = (k as i64 + dk) as usize;
                            let ll = (l as i64 + dl) as usize;
                            v += d[(j * m + kk) * m + ll] * (u * t);
                        }
                    }
                    v.norm() * w
                })
                .fold(0.0, f64::max)
        });
        let mut profile = vec![0.0f64; shells + 1];
        for ((_, _, sh), v) in points.iter().zip(per_point) {
            profile[*sh] = profile[*sh].max(v);
        }
        entries.push(SeminormEntry {
            alpha: a,
            beta: b,
            gamma: c,
            value: profile.iter().copied().fold(0.0, f64::max),
            previous: profile[..shells].iter().copied().fold(0.0, f64::max),
        });
    }
    let spec = format!(
        "n=1; x: {m} grid nodes, spectral derivatives; (xi, eta): grid frequencies with radius < {} in {} dyadic shells, central differences of step {h}",
        1u64 << (shells + 1),
        shells + 1
    );
    Ok(assemble_report(
        *class,
        max_order,
        shells,
        entries,
        stabilization,
        spec,
    ))
}

/// Apply `T_sigma` through the frozen linear symbol.
pub fn apply_frozen(
    sigma: &SymbolExpr,
    f: &GridFunction,
    g: &GridFunction,
) -> Result<GridFunction> {
    f.grid.ensure_same(&g.grid)?;
    freeze_second_argument(sigma, g)?.apply(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::random_trig_polynomial;
    use crate::symbol::families::{builtin_family, elliptic, frequency_bump};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn grid64() -> GridSpec {
        GridSpec::standard(64).unwrap()
    }

    fn family(name: &str) -> SymbolExpr {
        builtin_family(name, &BTreeMap::new()).unwrap().0
    }

    #[test]
    fn identity_symbol_multiplies() {
        let g = grid64();
        let f = GridFunction::from_real_fn(g, |x| x[0].sin());
        let h = GridFunction::from_real_fn(g, |x| x[0].cos());
        let op = DiscreteBilinearOp::from_symbol(&SymbolExpr::one(), g);
        let out = op.apply(&f, &h).unwrap();
        let want = f.mul(&h).unwrap();
        assert!(out.max_abs_diff(&want) < 1e-10);
    }

    #[test]
    fn derivative_symbol_differentiates_first_argument() {
        let g = grid64();
        let f = GridFunction::from_real_fn(g, |x| x[0].sin());
        let h = GridFunction::from_real_fn(g, |x| x[0].cos());
        let op = DiscreteBilinearOp::from_symbol(&family("derivative_xi"), g);
        let out = op.apply(&f, &h).unwrap();
        let want = GridFunction::from_real_fn(g, |x| x[0].cos().powi(2));
        assert!(out.max_abs_diff(&want) < 1e-10);
    }

    #[test]
    fn pairing_examples() {
        let g = grid64();
        let one = GridFunction::constant(g, C64::new(1.0, 0.0));
        let op = DiscreteBilinearOp::from_symbol(&SymbolExpr::one(), g);
        let p = op.trilinear_pairing(&one, &one, &one).unwrap();
        assert!((p - C64::new(2.0 * std::f64::consts::PI, 0.0)).norm() < 1e-12);
        let sin = GridFunction::from_real_fn(g, |x| x[0].sin());
        let op = DiscreteBilinearOp::from_symbol(&family("derivative_xi"), g);
        assert!(op.trilinear_pairing(&sin, &one, &one).unwrap().norm() < 1e-12);
    }

    #[test]
    fn tensor_and_symbol_routes_agree() {
        let g = GridSpec::standard(32).unwrap();
        let sigma = elliptic(-4.0) * frequency_bump(6.0);
        let op = DiscreteBilinearOp::from_symbol(&sigma, g);
        let dense = DiscreteBilinearOp::from_samples(op.materialize().unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = random_trig_polynomial(g, 8, false, &mut rng);
        let h = random_trig_polynomial(g, 8, false, &mut rng);
        let k = random_trig_polynomial(g, 8, false, &mut rng);
        let a = op.apply(&f, &h).unwrap();
        let b = dense.apply(&f, &h).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);
        let p1 = op.trilinear_pairing(&f, &h, &k).unwrap();
        let p2 = tensor_pairing(&dense.materialize().unwrap(), &f, &h, &k).unwrap();
        assert!((p1 - p2).norm() < 1e-10 * (1.0 + p1.norm()));
    }

    #[test]
    fn frozen_route_examples() {
        let g = grid64();
        let gf = GridFunction::from_real_fn(g, |x| x[0].sin());
        let one = freeze_second_argument(&SymbolExpr::one(), &gf).unwrap();
        for j in [0, 7, 33] {
            for k in [0, 10, 63] {
                assert!((one.at(j, k) - gf.values[j]).norm() < 1e-12);
            }
        }
        let d = freeze_second_argument(&family("derivative_eta"), &gf).unwrap();
        let cos = GridFunction::from_real_fn(g, |x| x[0].cos());
        for j in [0, 5, 40] {
            assert!((d.at(j, 3) - cos.values[j]).norm() < 1e-12);
        }
        assert!((frozen_seminorm(&one, 1.0, 0.0, 1, 6).unwrap() - 1.0).abs() < 1e-10);
        let c1 = GridFunction::constant(g, C64::new(1.0, 0.0));
        let c = freeze_second_argument(&SymbolExpr::one(), &c1).unwrap();
        assert!((frozen_seminorm(&c, 1.0, 0.0, 2, 6).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn oversized_tensor_is_refused() {
        let g = GridSpec::new(2, 1.0, 1024).unwrap();
        assert!(matches!(
            sample_symbol(&SymbolExpr::one(), &g),
            Err(Error::TensorTooLarge { .. })
        ));
    }
}
