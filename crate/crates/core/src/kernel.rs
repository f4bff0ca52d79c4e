//! Trilinear kernels `k(x, y, z)` of frequency-localized symbols and their
//! size and smoothness estimates in terms of `S = |x-y| + |x-z| + |y-z|`.

use crate::error::{Error, Result};
use crate::fit::{fit_power_law, linear_regression, DecayFit, FitPoint};
use crate::fourier::{freq_to_space, GridFunction, GridSpec, C64};
use crate::multiindex::MultiIndex;
use crate::operator::tensor_entries;
use crate::par;
use crate::symbol::expr::{SymbolExpr, Var};
use crate::symbol::families::frequency_bump;
use crate::symbol::tape::{CompiledSymbol, Point};
use crate::transpose::check_localized;
use serde::{Deserialize, Serialize};

/// `|x-y| + |x-z| + |y-z|`.
pub fn s_metric(x: f64, y: f64, z: f64) -> f64 {
    (x - y).abs() + (x - z).abs() + (y - z).abs()
}

/// `P(X, zeta) = p((x1 + x2)/2, xi, eta)` as a linear symbol on `R^2`:
/// `X = (x1, x2)` in the x slots, `zeta = (xi, eta)` in the xi slots.
pub fn lift_symbol(p: &SymbolExpr) -> SymbolExpr {
    p.substitute(1, &|v| match v {
        Var::X(0) => Some((SymbolExpr::var(Var::X(0)) + SymbolExpr::var(Var::X(1))) * 0.5),
        Var::Xi(0) => Some(SymbolExpr::var(Var::Xi(0))),
        Var::Eta(0) => Some(SymbolExpr::var(Var::Xi(1))),
        _ => None,
    })
}

/// Kernel samples `k(x_j, y_a, z_b)`, flat index `(j N + a) N + b` (`n = 1`).
#[derive(Clone, Debug, PartialEq)]
pub struct KernelSlice {
    pub grid: GridSpec,
    pub values: Vec<C64>,
}

impl KernelSlice {
    pub fn at(&self, j: usize, a: usize, b: usize) -> C64 {
        let m = self.grid.len();
        self.values[(j * m + a) * m + b]
    }

    pub fn max_abs_diff(&self, other: &KernelSlice) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `int int k(x, y, z) f(y) g(z) dy dz` by the node quadrature.
    pub fn apply(&self, f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
        self.grid.ensure_same(&f.grid)?;
        self.grid.ensure_same(&g.grid)?;
        let m = self.grid.len();
        let w = self.grid.cell_volume().powi(2);
        let values = par::map(m, |j| {
            let mut acc = C64::new(0.0, 0.0);
            for a in 0..m {
                let mut row = C64::new(0.0, 0.0);
                for b in 0..m {
                    row += self.at(j, a, b) * g.values[b];
                }
                acc += row * f.values[a];
            }
            acc * w
        });
        Ok(GridFunction {
            grid: self.grid,
            values,
        })
    }
}

fn require_1d(grid: &GridSpec) -> Result<()> {
    if grid.dim() != 1 {
        return Err(Error::InvalidArgument(
            "kernels are synthesized in one dimension".into(),
        ));
    }
    Ok(())
}

/// The two-dimensional lattice of `(x - y, x - z)` offsets and `(xi, eta)` frequencies.
fn offset_grid(grid: &GridSpec) -> GridSpec {
    GridSpec::new(2, grid.half_period(), grid.points_per_axis()).expect("valid source grid")
}

/// Offsets `(x - y, x - z)` for slice `j`: `k(x_j, ., .)` in offset coordinates,
/// `out[c1 N + c2]` at offsets `(-L + h c1, -L + h c2)`.
fn offset_slice(tape: &CompiledSymbol, grid: &GridSpec, x: f64) -> Vec<C64> {
    let g2 = offset_grid(grid);
    let mut scratch = tape.scratch();
    let norm = (2.0 * grid.half_period()).powi(-2);
    let coeffs: Vec<C64> = (0..g2.len())
        .map(|kl| {
            let f = g2.frequency(kl);
            tape.eval_with(&Point::d1(x, f[0], f[1]), &mut scratch) * norm
        })
        .collect();
    freq_to_space(&g2, &coeffs, 1.0)
}

fn offset_index(n: usize, j: usize, a: usize) -> usize {
    (j + n + n / 2 - a) % n
}

/// Kernel by a two-dimensional inverse transform of `p(x_j, ., .)` per slice.
pub fn compute_kernel(p: &SymbolExpr, grid: &GridSpec) -> Result<KernelSlice> {
    require_1d(grid)?;
    check_localized(p, grid)?;
    let m = grid.len();
    tensor_entries(grid)?;
    let tape = p.compile(1);
    let x_free = !p.free_vars().has_x();
    let shared = x_free.then(|| offset_slice(&tape, grid, 0.0));
    let slices = par::map(m, |j| {
        let off = match &shared {
            Some(s) => s.clone(),
            None => offset_slice(&tape, grid, grid.axis_node(j)),
        };
        let mut out = Vec::with_capacity(m * m);
        for a in 0..m {
            let ca = offset_index(m, j, a);
            for b in 0..m {
                out.push(off[ca * m + offset_index(m, j, b)]);
            }
        }
        out
    });
    Ok(KernelSlice {
        grid: *grid,
        values: slices.into_iter().flatten().collect(),
    })
}

/// Kernel through the lifted linear symbol, `k(x, y, z) = K((x, x), (y, z))`,
/// with `K(X, Y)` summed directly axis by axis.
pub fn compute_kernel_lifted(p: &SymbolExpr, grid: &GridSpec) -> Result<KernelSlice> {
    require_1d(grid)?;
    check_localized(p, grid)?;
    let m = grid.len();
    tensor_entries(grid)?;
    let tape = lift_symbol(p).compile(2);
    let norm = (2.0 * grid.half_period()).powi(-2);
    let slices = par::map(m, |j| {
        let x = grid.axis_node(j);
        let mut scratch = tape.scratch();
        let big = Point::new([x, x], [0.0; 2], [0.0; 2]);
        let sym: Vec<C64> = (0..m * m)
            .map(|kl| {
                let (k, l) = (kl / m, kl % m);
                let pt = Point {
                    xi: [grid.axis_frequency(k), grid.axis_frequency(l)],
                    ..big
                };
                tape.eval_with(&pt, &mut scratch)
            })
            .collect();
        // e[i][c] = exp(i (x - node_c) freq_i)
        let e: Vec<C64> = (0..m * m)
            .map(|ic| {
                let (i, c) = (ic / m, ic % m);
                C64::from_polar(1.0, (x - grid.axis_node(c)) * grid.axis_frequency(i))
            })
            .collect();
        let mut partial = vec![C64::new(0.0, 0.0); m * m];
        for k in 0..m {
            for b in 0..m {
                let mut acc = C64::new(0.0, 0.0);
                for l in 0..m {
                    acc += sym[k * m + l] * e[l * m + b];
                }
                partial[k * m + b] = acc;
            }
        }
        let mut out = vec![C64::new(0.0, 0.0); m * m];
        for a in 0..m {
            for b in 0..m {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..m {
                    acc += partial[k * m + b] * e[k * m + a];
                }
                out[a * m + b] = acc * norm;
            }
        }
        out
    });
    Ok(KernelSlice {
        grid: *grid,
        values: slices.into_iter().flatten().collect(),
    })
}

/// Symbol whose kernel is `d_x^alpha d_y^beta d_z^gamma k`:
/// `sum_a binom(alpha, a) d_x^a p (i(xi+eta))^{alpha-a} (-i xi)^beta (-i eta)^gamma`.
pub fn derivative_symbol(p: &SymbolExpr, alpha: u32, beta: u32, gamma: u32) -> SymbolExpr {
    let i = SymbolExpr::i();
    let total = i.clone() * (SymbolExpr::xi() + SymbolExpr::eta());
    let mono = (i.clone() * SymbolExpr::xi() * -1.0).powi(beta as i32)
        * (i * SymbolExpr::eta() * -1.0).powi(gamma as i32);
    let al = MultiIndex::d1(alpha);
    let terms = (0..=alpha)
        .map(|a| {
            let d = p.derivative(&MultiIndex::d1(a), &MultiIndex::ZERO, &MultiIndex::ZERO);
            d * total.powi((alpha - a) as i32) * al.binomial(&MultiIndex::d1(a))
        })
        .collect();
    SymbolExpr::sum(terms) * mono
}

/// All `(alpha, beta, gamma)` with `alpha + beta + gamma = order` (`n = 1`).
pub fn derivative_triples(order: u32) -> Vec<(u32, u32, u32)> {
    let mut out = Vec::new();
    for a in 0..=order {
        for b in 0..=order - a {
            out.push((a, b, order - a - b));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelOptions {
    pub shells: usize,
    /// Smallest `S`, in node spacings.
    pub s_min_spacings: f64,
    /// Largest `S` as a fraction of the half period.
    pub s_max_fraction: f64,
    /// Only shells with centers inside this window enter the fit.
    pub fit_window: Option<(f64, f64)>,
    pub min_shells: usize,
}

impl Default for KernelOptions {
    fn default() -> Self {
        KernelOptions {
            shells: 8,
            s_min_spacings: 2.0,
            s_max_fraction: 0.5,
            fit_window: None,
            min_shells: 4,
        }
    }
}

/// Per-shell sups of a kernel magnitude over logarithmic `S` shells.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellProfile {
    pub edges: Vec<f64>,
    pub centers: Vec<f64>,
    pub sups: Vec<f64>,
}

impl ShellProfile {
    pub fn points(&self, window: Option<(f64, f64)>) -> Vec<FitPoint> {
        self.centers
            .iter()
            .zip(&self.sups)
            .filter(|(c, _)| window.is_none_or(|(lo, hi)| **c >= lo && **c <= hi))
            .map(|(&radius, &value)| FitPoint { radius, value })
            .collect()
    }
}

fn shell_edges(grid: &GridSpec, options: &KernelOptions) -> Vec<f64> {
    let lo = options.s_min_spacings * grid.spacing();
    let hi = options.s_max_fraction * grid.half_period();
    (0..=options.shells)
        .map(|i| lo * (hi / lo).powf(i as f64 / options.shells as f64))
        .collect()
}

/// Visit every kernel sample of each symbol in `symbols` with its `S` value,
/// folding `|k|` through `f(S, |k|)` into a per-slice accumulator.
fn scan_kernels<A: Send, F>(
    symbols: &[SymbolExpr],
    grid: &GridSpec,
    init: impl Fn() -> A + Sync,
    f: F,
) -> Vec<A>
where
    F: Fn(&mut A, f64, f64) + Sync,
{
    let m = grid.len();
    let h = grid.spacing();
    let l = grid.half_period();
    let offset = |c: usize| -l + h * c as f64;
    let tapes: Vec<CompiledSymbol> = symbols.iter().map(|s| s.compile(1)).collect();
    let x_free = symbols.iter().all(|s| !s.free_vars().has_x());
    let slices = if x_free { 1 } else { m };
    par::map(slices, |j| {
        let mut acc = init();
        let x = grid.axis_node(j);
        let offs: Vec<Vec<C64>> = tapes.iter().map(|t| offset_slice(t, grid, x)).collect();
        for c1 in 0..m {
            for c2 in 0..m {
                let (u, v) = (offset(c1), offset(c2));
                let s = s_metric(0.0, u, v);
                let mag = offs
                    .iter()
                    .map(|o| o[c1 * m + c2].norm())
                    .fold(0.0, f64::max);
                f(&mut acc, s, mag);
            }
        }
        acc
    })
}

/// Shell sups of `max_{|alpha+beta+gamma| = order} |D k|` over logarithmic `S` shells.
pub fn kernel_shell_profile(
    p: &SymbolExpr,
    grid: &GridSpec,
    order: u32,
    options: &KernelOptions,
) -> Result<ShellProfile> {
    require_1d(grid)?;
    check_localized(p, grid)?;
    let edges = shell_edges(grid, options);
    let symbols: Vec<SymbolExpr> = derivative_triples(order)
        .into_iter()
        .map(|(a, b, c)| derivative_symbol(p, a, b, c))
        .collect();
    let n_shells = options.shells;
    let per = scan_kernels(
        &symbols,
        grid,
        || vec![0.0f64; n_shells],
        |acc, s, mag| {
            if s >= edges[0] && s < edges[n_shells] {
                let i = edges.partition_point(|e| *e <= s) - 1;
                acc[i] = acc[i].max(mag);
            }
        },
    );
    let sups = (0..n_shells)
        .map(|i| per.iter().map(|v| v[i]).fold(0.0, f64::max))
        .collect();
    let centers = edges.windows(2).map(|w| (w[0] * w[1]).sqrt()).collect();
    Ok(ShellProfile {
        edges,
        centers,
        sups,
    })
}

/// `sup_{S > 0} (1 + S)^weight max_{|alpha+beta+gamma| = order} |D k|`.
pub fn weighted_kernel_sup(
    p: &SymbolExpr,
    grid: &GridSpec,
    order: u32,
    weight: i32,
) -> Result<f64> {
    require_1d(grid)?;
    check_localized(p, grid)?;
    let symbols: Vec<SymbolExpr> = derivative_triples(order)
        .into_iter()
        .map(|(a, b, c)| derivative_symbol(p, a, b, c))
        .collect();
    let per = scan_kernels(
        &symbols,
        grid,
        || 0.0f64,
        |acc, s, mag| {
            *acc = acc.max((1.0 + s).powi(weight) * mag);
        },
    );
    Ok(per.into_iter().fold(0.0, f64::max))
}

/// Regimes of the kernel estimates, keyed on the sign of `m + M + 2n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "regime")]
pub enum Regime {
    /// Compact frequency support: faster than any power of `1 + S`.
    RapidDecay,
    /// `m + M + 2n < 0`: bounded continuous derivatives of order `M`.
    Bounded,
    /// `m + M + 2n = 0`: at most logarithmic blow-up.
    LogBlowup,
    /// `m + M + 2n > 0`: `S^{-(m + M + 2n)/rho}`.
    PowerLaw { exponent: f64 },
}

pub fn predict_regime(m: f64, order: u32, n: usize, rho: f64, compact: bool) -> Regime {
    if compact {
        return Regime::RapidDecay;
    }
    let t = m + order as f64 + 2.0 * n as f64;
    if t < 0.0 {
        Regime::Bounded
    } else if t == 0.0 {
        Regime::LogBlowup
    } else {
        Regime::PowerLaw { exponent: -t / rho }
    }
}

/// One CSV row of a kernel fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelRow {
    pub s_shell_center: f64,
    pub sup_abs_kernel: f64,
    pub derivative_order: u32,
    pub predicted_exponent: Option<f64>,
    pub fitted_exponent: Option<f64>,
    pub r_squared: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeFit {
    pub order: u32,
    pub regime: Regime,
    pub profile: ShellProfile,
    /// Log-log power fit of the shell sups.
    pub power: DecayFit,
    /// For the logarithmic regime: `(slope, r^2)` of sup against `|log S|`.
    pub log_fit: Option<(f64, f64)>,
}

impl RegimeFit {
    pub fn predicted_exponent(&self) -> Option<f64> {
        match self.regime {
            Regime::PowerLaw { exponent } => Some(exponent),
            Regime::Bounded | Regime::LogBlowup => Some(0.0),
            Regime::RapidDecay => None,
        }
    }

    pub fn rows(&self) -> Vec<KernelRow> {
        self.profile
            .centers
            .iter()
            .zip(&self.profile.sups)
            .map(|(&c, &s)| KernelRow {
                s_shell_center: c,
                sup_abs_kernel: s,
                derivative_order: self.order,
                predicted_exponent: self.predicted_exponent(),
                fitted_exponent: Some(self.power.exponent).filter(|e| e.is_finite()),
                r_squared: Some(self.power.r_squared),
            })
            .collect()
    }
}

/// Shell-fit the order-`order` kernel derivatives and classify against the predicted regime.
pub fn decay_fit(
    p: &SymbolExpr,
    grid: &GridSpec,
    m: f64,
    rho: f64,
    order: u32,
    compact: bool,
    options: &KernelOptions,
) -> Result<RegimeFit> {
    let profile = kernel_shell_profile(p, grid, order, options)?;
    let points = profile.points(options.fit_window);
    let peak = points.iter().map(|p| p.value).fold(0.0, f64::max);
    let power = fit_power_law(&points, 1e-9 * peak, options.min_shells)?;
    let regime = predict_regime(m, order, grid.dim(), rho, compact);
    let log_fit = (regime == Regime::LogBlowup).then(|| {
        let xs: Vec<f64> = points.iter().map(|p| p.radius.ln().abs()).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.value).collect();
        let (_, slope, r2) = linear_regression(&xs, &ys);
        (slope, r2)
    });
    Ok(RegimeFit {
        order,
        regime,
        profile,
        power,
        log_fit,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementCheck {
    pub order: u32,
    pub weight: i32,
    pub coarse: f64,
    pub fine: f64,
    pub relative_change: f64,
    pub stable: bool,
}

/// Compare `weighted_kernel_sup` on `grid` and on the grid with twice the nodes.
pub fn refinement_check(
    p: &SymbolExpr,
    grid: &GridSpec,
    order: u32,
    weight: i32,
    tolerance: f64,
) -> Result<RefinementCheck> {
    let fine_grid = GridSpec::new(grid.dim(), grid.half_period(), 2 * grid.points_per_axis())?;
    let coarse = weighted_kernel_sup(p, grid, order, weight)?;
    let fine = weighted_kernel_sup(p, &fine_grid, order, weight)?;
    let relative_change = (fine - coarse).abs() / coarse.max(f64::MIN_POSITIVE);
    Ok(RefinementCheck {
        order,
        weight,
        coarse,
        fine,
        relative_change,
        stable: relative_change <= tolerance,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CzkReport {
    pub size: RegimeFit,
    pub gradient: RegimeFit,
    pub size_ok: bool,
    pub gradient_ok: bool,
    /// The shell sups fall faster than any tested power: rapid-decay regime.
    pub super_polynomial: bool,
    pub localized_by_cut: bool,
}

/// Wide smooth frequency cut for kernel work: `frequency_bump(0.3 Nyquist)`.
///
/// Its transition is broad, so the cut's own kernel tail stays far below the
/// power laws being fitted.
pub fn kernel_cut(grid: &GridSpec) -> SymbolExpr {
    frequency_bump(0.3 * grid.nyquist())
}

/// Log-log slopes of the inner and outer halves of a shell profile.
fn half_slopes(profile: &ShellProfile, window: Option<(f64, f64)>) -> Option<(f64, f64)> {
    let pts: Vec<FitPoint> = profile
        .points(window)
        .into_iter()
        .filter(|p| p.value > 0.0)
        .collect();
    let half = pts.len() / 2;
    if half < 2 {
        return None;
    }
    let slope = |ps: &[FitPoint]| {
        let xs: Vec<f64> = ps.iter().map(|p| p.radius.ln()).collect();
        let ys: Vec<f64> = ps.iter().map(|p| p.value.ln()).collect();
        linear_regression(&xs, &ys).1
    };
    Some((slope(&pts[..half]), slope(&pts[pts.len() - half..])))
}

/// Calderon-Zygmund size and gradient evidence for an order-0 symbol:
/// `|k| <~ S^{-2n}` and `|grad k| <~ S^{-2n-1}`.
pub fn czk_report(
    p: &SymbolExpr,
    grid: &GridSpec,
    cut: bool,
    options: &KernelOptions,
) -> Result<CzkReport> {
    let sym = if cut {
        p.clone() * kernel_cut(grid)
    } else {
        p.clone()
    };
    let size = decay_fit(&sym, grid, 0.0, 1.0, 0, false, options)?;
    let gradient = decay_fit(&sym, grid, 0.0, 1.0, 1, false, options)?;
    let n = grid.dim() as f64;
    let size_ok = (size.power.exponent + 2.0 * n).abs() <= 0.4;
    let gradient_ok = (gradient.power.exponent + 2.0 * n + 1.0).abs() <= 0.5;
    // Bounded near the diagonal and steepening outward.
    let super_polynomial = half_slopes(&size.profile, options.fit_window)
        .is_some_and(|(inner, outer)| inner > -1.0 && outer < inner - 1.0);
    Ok(CzkReport {
        size,
        gradient,
        size_ok,
        gradient_ok,
        super_polynomial,
        localized_by_cut: cut,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::random_trig_polynomial;
    use crate::operator::DiscreteBilinearOp;
    use crate::symbol::families::{elliptic, frequency_bump};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small() -> GridSpec {
        GridSpec::new(1, std::f64::consts::FRAC_PI_2, 32).unwrap()
    }

    #[test]
    fn s_metric_basics() {
        assert_eq!(s_metric(1.0, 1.0, 1.0), 0.0);
        assert_eq!(s_metric(0.0, 1.0, -1.0), 4.0);
        assert_eq!(s_metric(0.5, 1.0, 2.0), s_metric(0.5, 2.0, 1.0));
    }

    #[test]
    fn lift_substitutes_midpoint() {
        assert!(lift_symbol(&SymbolExpr::one()).is_one());
        let p = SymbolExpr::x().sin();
        let v = lift_symbol(&p).eval(2, &Point::new([0.2, 0.6], [1.0, 2.0], [0.0; 2]));
        assert!((v.re - 0.4f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn routes_agree_and_reproduce_apply() {
        let g = small();
        let p = (SymbolExpr::x().cos() * 0.5 + 1.0) * elliptic(-1.0) * frequency_bump(6.0);
        let direct = compute_kernel(&p, &g).unwrap();
        let lifted = compute_kernel_lifted(&p, &g).unwrap();
        assert!(direct.max_abs_diff(&lifted) < 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_trig_polynomial(g, 10, false, &mut rng);
        let h = random_trig_polynomial(g, 10, false, &mut rng);
        let via_kernel = direct.apply(&f, &h).unwrap();
        let via_op = DiscreteBilinearOp::from_symbol(&p, g)
            .apply(&f, &h)
            .unwrap();
        assert!(via_kernel.max_abs_diff(&via_op) < 1e-8);
    }

    #[test]
    fn separable_kernel_factorizes() {
        let g = small();
        let b = frequency_bump(5.0).substitute(1, &|v| (v == Var::Eta(0)).then(SymbolExpr::zero));
        let c = b.substitute(1, &|v| (v == Var::Xi(0)).then(SymbolExpr::eta));
        let k = compute_kernel(&(b.clone() * c.clone()), &g).unwrap();
        let m = g.len();
        let inv = |s: &SymbolExpr, u: f64| -> C64 {
            (0..m)
                .map(|i| {
                    let f = g.axis_frequency(i);
                    s.eval(1, &Point::d1(0.0, f, f)) * C64::from_polar(1.0, u * f)
                })
                .sum::<C64>()
                / (2.0 * g.half_period())
        };
        let mut err = 0.0f64;
        for (j, a, bb) in [(0, 3, 7), (5, 5, 5), (11, 30, 2), (31, 0, 16)] {
            let (x, y, z) = (g.axis_node(j), g.axis_node(a), g.axis_node(bb));
            err = err.max((k.at(j, a, bb) - inv(&b, x - y) * inv(&c, x - z)).norm());
        }
        assert!(err < 1e-9, "{err}");
        for j in 0..m {
            for a in 0..m {
                for bb in 0..m {
                    assert!((k.at(j, a, bb) - k.at(j, bb, a)).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn regime_prediction() {
        assert_eq!(predict_regime(-5.0, 0, 1, 1.0, false), Regime::Bounded);
        assert_eq!(predict_regime(-2.0, 0, 1, 1.0, false), Regime::LogBlowup);
        assert_eq!(
            predict_regime(0.0, 1, 1, 1.0, false),
            Regime::PowerLaw { exponent: -3.0 }
        );
        assert_eq!(predict_regime(0.0, 1, 1, 0.5, true), Regime::RapidDecay);
    }

    #[test]
    fn unlocalized_kernel_refused() {
        assert!(matches!(
            compute_kernel(&elliptic(0.0), &small()),
            Err(Error::NotLocalized { .. })
        ));
    }

    #[test]
    fn bump_kernel_concentrates_near_diagonal() {
        let g = GridSpec::new(1, std::f64::consts::FRAC_PI_2, 64).unwrap();
        let k = compute_kernel(&frequency_bump(16.0), &g).unwrap();
        let m = g.points_per_axis();
        let per = 2.0 * g.half_period();
        let wrap = |d: f64| d - per * (d / per).round();
        let (mut peak, mut far1, mut far2) = (0.0f64, 0.0f64, 0.0f64);
        for j in 0..m {
            for a in 0..m {
                for b in 0..m {
                    let (x, y, z) = (g.axis_node(j), g.axis_node(a), g.axis_node(b));
                    let s = s_metric(0.0, wrap(x - y), wrap(x - z));
                    let v = k.at(j, a, b).norm();
                    peak = peak.max(v);
                    if s >= 1.0 {
                        far1 = far1.max(v);
                    }
                    if s >= 2.0 {
                        far2 = far2.max(v);
                    }
                }
            }
        }
        assert!((k.at(0, 0, 0).norm() - peak).abs() < 1e-9 * peak);
        assert!(far1 < 3e-2 * peak, "{}", far1 / peak);
        assert!(far2 < 2e-3 * peak, "{}", far2 / peak);
    }

    #[test]
    fn czk_flags_compact_symbol_only() {
        let g = GridSpec::new(1, std::f64::consts::FRAC_PI_2, 512).unwrap();
        let o = KernelOptions {
            fit_window: Some((0.05, 0.5)),
            ..KernelOptions::default()
        };
        let cz = (SymbolExpr::xi().powi(2) - SymbolExpr::eta().powi(2)) * elliptic(-2.0);
        let r = czk_report(&cz, &g, true, &o).unwrap();
        assert!(
            r.size_ok && !r.super_polynomial,
            "{}",
            r.size.power.exponent
        );
        let r = czk_report(&frequency_bump(16.0), &g, false, &o).unwrap();
        assert!(r.super_polynomial);
    }
}
