//! Periodic grids, discrete Fourier transforms and the norms used by every
//! verification.
//!
//! Spatial nodes are `x_j = -L + 2Lj/N` along each axis and frequency nodes are
//! `xi_k = pi k / L` for `k` in `-N/2 .. N/2`. Coefficient arrays are stored in
//! centered order (`c = k + N/2`), row-major over axes.
//!
//! The forward transform approximates `f^(xi) = (2pi)^-n \int f(x) e^{-ix.xi} dx`
//! by a Riemann sum, and the inverse integrates over frequency with the dual
//! cell volume `(pi/L)^n`, so the two are exact inverses on the grid.

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use num_complex::Complex64;
use rand::Rng;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

pub type C64 = Complex64;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, sign: f64) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if sign < 0.0 {
            p.plan_fft_forward(len)
        } else {
            p.plan_fft_inverse(len)
        }
    })
}

/// Periodic grid on `[-L, L)^n` with `N` points per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    half_period: f64,
    points_per_axis: usize,
}

impl GridSpec {
    pub fn new(dim: usize, half_period: f64, points_per_axis: usize) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::InvalidGrid(format!("dim must be 1 or 2, got {dim}")));
        }
        if !(half_period.is_finite() && half_period > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half period must be positive, got {half_period}"
            )));
        }
        if points_per_axis < 8 || !points_per_axis.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= 8, got {points_per_axis}"
            )));
        }
        Ok(GridSpec {
            dim,
            half_period,
            points_per_axis,
        })
    }

    /// One-dimensional grid on `[-pi, pi)`, where frequency nodes are the integers.
    pub fn standard(points_per_axis: usize) -> Result<Self> {
        GridSpec::new(1, PI, points_per_axis)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_period(&self) -> f64 {
        self.half_period
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    /// Total number of nodes, `N^n`.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node spacing `2L/N`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_period / self.points_per_axis as f64
    }

    /// Frequency spacing `pi/L`.
    pub fn freq_spacing(&self) -> f64 {
        PI / self.half_period
    }

    /// Spatial quadrature weight `(2L/N)^n`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Frequency quadrature weight `(pi/L)^n`.
    pub fn dual_cell_volume(&self) -> f64 {
        self.freq_spacing().powi(self.dim as i32)
    }

    /// Largest representable frequency magnitude per axis, `pi N / (2L)`.
    pub fn nyquist(&self) -> f64 {
        self.freq_spacing() * (self.points_per_axis / 2) as f64
    }

    /// Spatial coordinate of axis index `i`.
    pub fn axis_node(&self, i: usize) -> f64 {
        -self.half_period + self.spacing() * i as f64
    }

    /// Signed frequency index of centered axis index `c`.
    pub fn axis_wavenumber(&self, c: usize) -> i64 {
        c as i64 - (self.points_per_axis / 2) as i64
    }

    /// Frequency of centered axis index `c`.
    pub fn axis_frequency(&self, c: usize) -> f64 {
        self.freq_spacing() * self.axis_wavenumber(c) as f64
    }

    /// Per-axis indices of a flat row-major index.
    pub fn split(&self, flat: usize) -> [usize; 2] {
        let n = self.points_per_axis;
        match self.dim {
            1 => [flat, 0],
            _ => [flat / n, flat % n],
        }
    }

    pub fn join(&self, parts: [usize; 2]) -> usize {
        match self.dim {
            1 => parts[0],
            _ => parts[0] * self.points_per_axis + parts[1],
        }
    }

    /// Coordinates of node `flat`; unused components are zero.
    pub fn node(&self, flat: usize) -> [f64; 2] {
        let p = self.split(flat);
        let mut out = [0.0; 2];
        for (d, o) in out.iter_mut().enumerate().take(self.dim) {
            *o = self.axis_node(p[d]);
        }
        out
    }

    /// Frequency vector of centered index `flat`.
    pub fn frequency(&self, flat: usize) -> [f64; 2] {
        let p = self.split(flat);
        let mut out = [0.0; 2];
        for (d, o) in out.iter_mut().enumerate().take(self.dim) {
            *o = self.axis_frequency(p[d]);
        }
        out
    }

    /// Signed wavenumber vector of centered index `flat`.
    pub fn wavenumber(&self, flat: usize) -> [i64; 2] {
        let p = self.split(flat);
        let mut out = [0; 2];
        for (d, o) in out.iter_mut().enumerate().take(self.dim) {
            *o = self.axis_wavenumber(p[d]);
        }
        out
    }

    /// Centered flat index of a wavenumber vector, wrapped into range.
    pub fn wrap_wavenumber(&self, k: [i64; 2]) -> usize {
        let n = self.points_per_axis as i64;
        let mut parts = [0usize; 2];
        for d in 0..self.dim {
            parts[d] = (k[d] + n / 2).rem_euclid(n) as usize;
        }
        self.join(parts)
    }

    /// Centered flat index of a wavenumber vector if it lies in range.
    pub fn wavenumber_index(&self, k: [i64; 2]) -> Option<usize> {
        let half = (self.points_per_axis / 2) as i64;
        if (0..self.dim).all(|d| k[d] >= -half && k[d] < half) {
            Some(self.wrap_wavenumber(k))
        } else {
            None
        }
    }

    /// Index of node `flat` shifted by `offset` node steps (periodic).
    pub fn shift_node(&self, flat: usize, offset: usize) -> usize {
        let n = self.points_per_axis;
        let a = self.split(flat);
        let b = self.split(offset);
        let mut parts = [0usize; 2];
        for d in 0..self.dim {
            parts[d] = (a[d] + b[d]) % n;
        }
        self.join(parts)
    }

    /// Periodic distance between two spatial coordinates along one axis.
    pub fn periodic_distance(&self, a: f64, b: f64) -> f64 {
        let period = 2.0 * self.half_period;
        let d = (a - b).rem_euclid(period);
        d.min(period - d)
    }

    /// Periodic Euclidean distance between nodes `a` and `b`.
    pub fn node_distance(&self, a: usize, b: usize) -> f64 {
        let (pa, pb) = (self.node(a), self.node(b));
        (0..self.dim)
            .map(|d| self.periodic_distance(pa[d], pb[d]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub(crate) fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

/// Complex node values on a grid, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    pub grid: GridSpec,
    pub values: Vec<C64>,
}

/// Fourier coefficients in centered order.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub grid: GridSpec,
    pub coeffs: Vec<C64>,
}

impl GridFunction {
    pub fn new(grid: GridSpec, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} node values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 2]) -> C64) -> Self {
        let values = (0..grid.len()).map(|j| f(grid.node(j))).collect();
        GridFunction { grid, values }
    }

    pub fn from_real_fn(grid: GridSpec, f: impl Fn([f64; 2]) -> f64) -> Self {
        GridFunction::from_fn(grid, |x| C64::new(f(x), 0.0))
    }

    pub fn constant(grid: GridSpec, c: C64) -> Self {
        GridFunction {
            grid,
            values: vec![c; grid.len()],
        }
    }

    /// Plane wave `e^{i xi_k . x}` for centered frequency index `k`.
    pub fn plane_wave(grid: GridSpec, k: usize) -> Self {
        let xi = grid.frequency(k);
        GridFunction::from_fn(grid, |x| C64::from_polar(1.0, x[0] * xi[0] + x[1] * xi[1]))
    }

    pub fn zeros(grid: GridSpec) -> Self {
        GridFunction::constant(grid, C64::new(0.0, 0.0))
    }

    pub fn mul(&self, other: &GridFunction) -> Result<GridFunction> {
        self.grid.ensure_same(&other.grid)?;
        Ok(GridFunction {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        self.grid.ensure_same(&other.grid)?;
        Ok(GridFunction {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, c: C64) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Largest pointwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &GridFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Apply an in-place 1-d FFT along every axis of a row-major array.
fn fft_axes(grid: &GridSpec, data: &mut [C64], sign: f64) {
    let n = grid.points_per_axis();
    let fft = plan(n, sign);
    match grid.dim() {
        1 => fft.process(data),
        _ => {
            for row in data.chunks_mut(n) {
                fft.process(row);
            }
            let mut col = vec![C64::new(0.0, 0.0); n];
            for c in 0..n {
                for r in 0..n {
                    col[r] = data[r * n + c];
                }
                fft.process(&mut col);
                for r in 0..n {
                    data[r * n + c] = col[r];
                }
            }
        }
    }
}

/// Parity factor `(-1)^{|k|}` of a centered index.
fn parity(grid: &GridSpec, flat: usize) -> f64 {
    let k = grid.wavenumber(flat);
    if (k[0] + k[1]).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Map between standard FFT ordering and centered ordering.
fn standard_to_centered(grid: &GridSpec, std_flat: usize) -> usize {
    let n = grid.points_per_axis();
    let p = grid.split(std_flat);
    let mut parts = [0; 2];
    for d in 0..grid.dim() {
        parts[d] = (p[d] + n / 2) % n;
    }
    grid.join(parts)
}

/// Unweighted sum `out[m] = sum_j v_j e^{sign i x_j . xi_m}` over nodes.
pub fn space_to_freq(grid: &GridSpec, values: &[C64], sign: f64) -> Vec<C64> {
    let mut work = values.to_vec();
    fft_axes(grid, &mut work, sign);
    let mut out = vec![C64::new(0.0, 0.0); grid.len()];
    for (s, v) in work.into_iter().enumerate() {
        let c = standard_to_centered(grid, s);
        out[c] = v * parity(grid, c);
    }
    out
}

/// Unweighted sum `out[p] = sum_k v_k e^{sign i x_p . xi_k}` over frequencies.
pub fn freq_to_space(grid: &GridSpec, coeffs: &[C64], sign: f64) -> Vec<C64> {
    let mut work = vec![C64::new(0.0, 0.0); grid.len()];
    for (s, w) in work.iter_mut().enumerate() {
        let c = standard_to_centered(grid, s);
        *w = coeffs[c] * parity(grid, c);
    }
    fft_axes(grid, &mut work, sign);
    work
}

/// Forward transform with the `(2pi)^-n` Riemann-sum convention.
pub fn forward_transform(f: &GridFunction) -> Spectrum {
    let g = f.grid;
    let weight = (g.spacing() / (2.0 * PI)).powi(g.dim() as i32);
    let coeffs = space_to_freq(&g, &f.values, -1.0)
        .into_iter()
        .map(|c| c * weight)
        .collect();
    Spectrum { grid: g, coeffs }
}

/// Inverse of [`forward_transform`].
pub fn inverse_transform(s: &Spectrum) -> GridFunction {
    let g = s.grid;
    let weight = g.dual_cell_volume();
    let values = freq_to_space(&g, &s.coeffs, 1.0)
        .into_iter()
        .map(|v| v * weight)
        .collect();
    GridFunction { grid: g, values }
}

/// Apply the Fourier multiplier `m(xi)` to `f`.
pub fn fourier_multiplier(f: &GridFunction, m: impl Fn([f64; 2]) -> C64) -> GridFunction {
    let mut s = forward_transform(f);
    for (k, c) in s.coeffs.iter_mut().enumerate() {
        *c *= m(s.grid.frequency(k));
    }
    inverse_transform(&s)
}

/// Bessel potential `J^m f`, the multiplier `(1+|xi|^2)^{m/2}`.
pub fn bessel_potential(f: &GridFunction, m: f64) -> GridFunction {
    fourier_multiplier(f, |xi| {
        C64::new((1.0 + xi[0] * xi[0] + xi[1] * xi[1]).powf(m / 2.0), 0.0)
    })
}

/// `(i xi)^gamma` for a multi-index `gamma`.
pub fn derivative_factor(xi: [f64; 2], gamma: &MultiIndex) -> C64 {
    let i = C64::new(0.0, 1.0);
    (0..2).fold(C64::new(1.0, 0.0), |acc, d| {
        acc * (i * xi[d]).powu(gamma.0[d])
    })
}

/// Spectral derivative `D^gamma f`.
pub fn spectral_derivative(f: &GridFunction, gamma: &MultiIndex) -> GridFunction {
    if gamma.is_zero() {
        return f.clone();
    }
    fourier_multiplier(f, |xi| derivative_factor(xi, gamma))
}

/// Quadrature-weighted `L^p` norm; `p = f64::INFINITY` gives the sup norm.
pub fn lp_norm(f: &GridFunction, p: f64) -> f64 {
    if p.is_infinite() {
        return f.sup_norm();
    }
    let w = f.grid.cell_volume();
    let s: f64 = f.values.iter().map(|v| v.norm().powf(p)).sum();
    (s * w).powf(1.0 / p)
}

/// Real bilinear pairing `<u, v> = sum u(x_j) v(x_j) (2L/N)^n`, no conjugation.
pub fn pairing(u: &GridFunction, v: &GridFunction) -> Result<C64> {
    u.grid.ensure_same(&v.grid)?;
    let w = u.grid.cell_volume();
    Ok(u.values
        .iter()
        .zip(&v.values)
        .map(|(a, b)| a * b)
        .sum::<C64>()
        * w)
}

/// Norms used by the boundedness checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SobolevNorms {
    pub l2: f64,
    /// Bessel-potential norm `||J^m f||_2`.
    pub w_m2: f64,
    /// `max_{|gamma| <= s} ||D^gamma f||_inf`.
    pub w_s_inf: f64,
}

pub fn w_m2_norm(f: &GridFunction, m: f64) -> f64 {
    lp_norm(&bessel_potential(f, m), 2.0)
}

pub fn w_s_inf_norm(f: &GridFunction, s: usize) -> f64 {
    let spec = forward_transform(f);
    MultiIndex::up_to(f.grid.dim(), s)
        .iter()
        .map(|gamma| {
            let mut d = spec.clone();
            for (k, c) in d.coeffs.iter_mut().enumerate() {
                *c *= derivative_factor(d.grid.frequency(k), gamma);
            }
            inverse_transform(&d).sup_norm()
        })
        .fold(0.0, f64::max)
}

pub fn norms(f: &GridFunction, m: u32, s: u32) -> SobolevNorms {
    SobolevNorms {
        l2: lp_norm(f, 2.0),
        w_m2: w_m2_norm(f, f64::from(m)),
        w_s_inf: w_s_inf_norm(f, s as usize),
    }
}

/// Random trigonometric polynomial with wavenumbers `|k_d| <= band`.
///
/// With `real = true` the coefficients are Hermitian so the node values are real.
pub fn random_trig_polynomial<R: Rng + ?Sized>(
    grid: GridSpec,
    band: usize,
    real: bool,
    rng: &mut R,
) -> GridFunction {
    let band = band.min(grid.points_per_axis() / 2 - 1) as i64;
    let mut coeffs = vec![C64::new(0.0, 0.0); grid.len()];
    for (c, v) in coeffs.iter_mut().enumerate() {
        let k = grid.wavenumber(c);
        if (0..grid.dim()).all(|d| k[d].abs() <= band) {
            *v = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        }
    }
    if real {
        let mut sym = coeffs.clone();
        for (c, v) in sym.iter_mut().enumerate() {
            let k = grid.wavenumber(c);
            if let Some(mirror) = grid.wavenumber_index([-k[0], -k[1]]) {
                *v = 0.5 * (coeffs[c] + coeffs[mirror].conj());
            } else {
                *v = C64::new(0.0, 0.0);
            }
        }
        coeffs = sym;
    }
    inverse_transform(&Spectrum { grid, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid64() -> GridSpec {
        GridSpec::standard(64).unwrap()
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::new(3, PI, 64).is_err());
        assert!(GridSpec::new(1, PI, 48).is_err());
        assert!(GridSpec::new(1, PI, 4).is_err());
        assert!(GridSpec::new(1, -1.0, 64).is_err());
    }

    #[test]
    fn node_and_frequency_layout() {
        let g = GridSpec::new(1, 2.0, 8).unwrap();
        assert_eq!(g.axis_node(0), -2.0);
        assert_eq!(g.axis_node(4), 0.0);
        assert_eq!(g.axis_wavenumber(0), -4);
        assert!((g.axis_frequency(5) - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn constant_maps_to_zero_mode() {
        let g = grid64();
        let s = forward_transform(&GridFunction::constant(g, C64::new(1.0, 0.0)));
        for (k, c) in s.coeffs.iter().enumerate() {
            let expect = if g.axis_wavenumber(k) == 0 { 1.0 } else { 0.0 };
            assert!((c - expect).norm() < 1e-12, "k={k} c={c}");
        }
    }

    #[test]
    fn pure_mode_maps_to_single_coefficient() {
        let g = grid64();
        let f = GridFunction::from_fn(g, |x| C64::from_polar(1.0, x[0]));
        let s = forward_transform(&f);
        for (k, c) in s.coeffs.iter().enumerate() {
            let expect = if g.axis_wavenumber(k) == 1 { 1.0 } else { 0.0 };
            assert!((c - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn round_trip_one_and_two_dimensions() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for g in [
            grid64(),
            GridSpec::new(1, 5.0, 128).unwrap(),
            GridSpec::new(2, PI, 16).unwrap(),
        ] {
            let f = random_trig_polynomial(g, g.points_per_axis() / 4, false, &mut rng);
            let back = inverse_transform(&forward_transform(&f));
            let scale = f.sup_norm();
            assert!(back.max_abs_diff(&f) / scale < 1e-12);
        }
    }

    #[test]
    fn bessel_potential_examples() {
        let g = grid64();
        let f = GridFunction::from_fn(g, |x| C64::from_polar(1.0, x[0]));
        assert!(bessel_potential(&f, 0.0).max_abs_diff(&f) < 1e-12);
        let twice = f.scale(C64::new(2.0, 0.0));
        assert!(bessel_potential(&f, 2.0).max_abs_diff(&twice) < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random_trig_polynomial(g, 16, true, &mut rng);
        let back = bessel_potential(&bessel_potential(&h, 1.5), -1.5);
        assert!(back.max_abs_diff(&h) < 1e-12);
    }

    #[test]
    fn norm_examples() {
        let g = grid64();
        let one = GridFunction::constant(g, C64::new(1.0, 0.0));
        let n = norms(&one, 2, 4);
        assert!((n.l2 - (2.0 * PI).sqrt()).abs() < 1e-12);
        assert!((n.w_s_inf - 1.0).abs() < 1e-12);
        assert!((lp_norm(&one, f64::INFINITY) - 1.0).abs() < 1e-15);
        let sin = GridFunction::from_real_fn(g, |x| x[0].sin());
        for s in 0..5 {
            let v = w_s_inf_norm(&sin, s);
            // Rounding noise in high modes is amplified by |xi|^s.
            assert!((v - 1.0).abs() < 1e-10, "s={s} v={v}");
        }
    }

    #[test]
    fn parseval_two_ways() {
        let g = GridSpec::new(1, 3.0, 64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = random_trig_polynomial(g, 12, false, &mut rng);
        let spec = forward_transform(&f);
        // ||J^m f||^2 = (2pi)^n (pi/L)^n sum (1+|xi|^2)^m |F_k|^2
        let m = 2.0;
        let mode_sum: f64 = spec
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| (1.0 + g.frequency(k)[0].powi(2)).powf(m) * c.norm_sqr())
            .sum::<f64>()
            * 2.0
            * PI
            * g.dual_cell_volume();
        let direct = w_m2_norm(&f, m);
        assert!((mode_sum.sqrt() - direct).abs() / direct < 1e-10);
    }

    #[test]
    fn spectral_derivative_of_plane_wave_is_exact() {
        let g = GridSpec::new(1, 2.5, 32).unwrap();
        for k in [0usize, 3, 16, 31] {
            let e = GridFunction::plane_wave(g, k);
            let d = spectral_derivative(&e, &MultiIndex::d1(1));
            let expect = e.scale(C64::new(0.0, g.axis_frequency(k)));
            assert!(d.max_abs_diff(&expect) < 1e-12);
        }
    }

    #[test]
    fn holder_inequality_holds() {
        let g = grid64();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let f = random_trig_polynomial(g, 10, true, &mut rng);
            let h = random_trig_polynomial(g, 10, true, &mut rng);
            let fg = f.mul(&h).unwrap();
            for (p, q) in [(2.0, 2.0), (4.0, 4.0), (3.0, 6.0)] {
                let r = 1.0 / (1.0 / p + 1.0 / q);
                assert!(lp_norm(&fg, r) <= lp_norm(&f, p) * lp_norm(&h, q) * (1.0 + 1e-12));
            }
        }
    }
}
