use super::expr::{SymbolExpr, Var};
use super::seminorm::ClassParams;
use crate::error::{Error, Result};
use crate::fourier::GridSpec;
use std::collections::BTreeMap;

/// Names accepted by [`builtin_family`].
pub const FAMILY_NAMES: [&str; 7] = [
    "identity",
    "elliptic",
    "frequency_bump",
    "derivative_xi",
    "derivative_eta",
    "chirp",
    "x_modulated",
];

fn param(family: &str, params: &BTreeMap<String, f64>, name: &str) -> Result<f64> {
    params
        .get(name)
        .copied()
        .ok_or_else(|| Error::MissingParam {
            family: family.to_string(),
            param: name.to_string(),
        })
}

/// `|xi|^2 + |eta|^2` expressed through the bracket.
pub fn radius_sq() -> SymbolExpr {
    SymbolExpr::bracket_xi_eta().powi(2) + (-1.0)
}

/// Smooth cutoff equal to 1 for `|(xi, eta)| <= width` and 0 for `|(xi, eta)| >= 2 width`.
pub fn frequency_bump(width: f64) -> SymbolExpr {
    let w2 = width * width;
    ((SymbolExpr::real(4.0 * w2) - radius_sq()) * (1.0 / (3.0 * w2))).smooth_step()
}

/// `<xi, eta>^m`.
pub fn elliptic(m: f64) -> SymbolExpr {
    SymbolExpr::bracket_xi_eta().powf(m)
}

/// `exp(i A sin(x1) <xi, eta>^delta)`.
pub fn chirp(delta: f64, amplitude: f64) -> SymbolExpr {
    (SymbolExpr::i() * SymbolExpr::x().sin() * elliptic(delta) * amplitude).exp()
}

/// `(1 + sin^2 x1) <xi, eta>^m`.
pub fn x_modulated(m: f64) -> SymbolExpr {
    (SymbolExpr::x().sin().powi(2) + 1.0) * elliptic(m)
}

/// Built-in symbol family together with its declared class.
pub fn builtin_family(
    name: &str,
    params: &BTreeMap<String, f64>,
) -> Result<(SymbolExpr, ClassParams)> {
    let out = match name {
        "identity" => (SymbolExpr::one(), ClassParams::new(0.0, 1.0, 0.0)),
        "elliptic" => {
            let m = param(name, params, "m")?;
            (elliptic(m), ClassParams::new(m, 1.0, 0.0))
        }
        "frequency_bump" => {
            let w = param(name, params, "width")?;
            if w.is_nan() || w <= 0.0 {
                return Err(Error::InvalidArgument(
                    "frequency_bump width must be positive".into(),
                ));
            }
            (frequency_bump(w), ClassParams::new(0.0, 1.0, 0.0))
        }
        "derivative_xi" => (
            SymbolExpr::i() * SymbolExpr::var(Var::Xi(0)),
            ClassParams::new(1.0, 1.0, 0.0),
        ),
        "derivative_eta" => (
            SymbolExpr::i() * SymbolExpr::var(Var::Eta(0)),
            ClassParams::new(1.0, 1.0, 0.0),
        ),
        "chirp" => {
            let delta = param(name, params, "delta")?;
            let amplitude = param(name, params, "amplitude")?;
            if !(0.0..1.0).contains(&delta) {
                return Err(Error::InvalidArgument(
                    "chirp delta must lie in [0, 1)".into(),
                ));
            }
            (
                chirp(delta, amplitude),
                ClassParams::new(0.0, 1.0 - delta, delta),
            )
        }
        "x_modulated" => {
            let m = param(name, params, "m")?;
            (x_modulated(m), ClassParams::new(m, 1.0, 0.0))
        }
        other => return Err(Error::UnknownFamily(other.to_string())),
    };
    Ok(out)
}

fn one_sided_cut(t: SymbolExpr, inner: f64, outer: f64) -> SymbolExpr {
    let (a2, b2) = (inner * inner, outer * outer);
    ((SymbolExpr::real(b2) - t.powi(2)) * (1.0 / (b2 - a2))).smooth_step()
}

/// Frequency localization `chi(xi) chi(eta) chi(xi + eta)` per component,
/// flat up to half the Nyquist frequency and zero beyond three quarters of it.
///
/// Multiplying by this cut keeps every class `BS^m_{rho, delta}` while making
/// the discrete transpose and kernel computations alias-free.
pub fn frequency_cut(grid: &GridSpec) -> SymbolExpr {
    let nyq = grid.nyquist();
    let (a, b) = (0.5 * nyq, 0.75 * nyq);
    let mut factors = Vec::new();
    for c in 0..grid.dim() as u8 {
        let xi = SymbolExpr::var(Var::Xi(c));
        let eta = SymbolExpr::var(Var::Eta(c));
        factors.push(one_sided_cut(xi.clone(), a, b));
        factors.push(one_sided_cut(eta.clone(), a, b));
        factors.push(one_sided_cut(xi + eta, a, b));
    }
    SymbolExpr::product(factors)
}

/// Multiply by [`frequency_cut`].
pub fn localize(sigma: &SymbolExpr, grid: &GridSpec) -> SymbolExpr {
    sigma.clone() * frequency_cut(grid)
}

/// Frequencies where [`frequency_cut`] is identically 1 with a margin of
/// `Nyquist / 8` to spare, so spatial modulation of the symbol cannot reach
/// the transition band.
pub fn in_trusted_band(grid: &GridSpec, xi: [f64; 2], eta: [f64; 2]) -> bool {
    let lim = 0.375 * grid.nyquist() + 1e-9;
    (0..grid.dim())
        .all(|c| xi[c].abs() <= lim && eta[c].abs() <= lim && (xi[c] + eta[c]).abs() <= lim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::tape::Point;

    fn no_params() -> BTreeMap<String, f64> {
        BTreeMap::new()
    }

    #[test]
    fn trivial_families() {
        let (one, class) = builtin_family("identity", &no_params()).unwrap();
        assert!(one.is_one());
        assert_eq!(class, ClassParams::new(0.0, 1.0, 0.0));
        let mut p = no_params();
        p.insert("m".into(), 0.0);
        let (e, _) = builtin_family("elliptic", &p).unwrap();
        assert!(e.is_one());
    }

    #[test]
    fn unknown_and_missing() {
        assert!(matches!(
            builtin_family("nope", &no_params()),
            Err(Error::UnknownFamily(_))
        ));
        assert!(matches!(
            builtin_family("chirp", &no_params()),
            Err(Error::MissingParam { .. })
        ));
    }

    #[test]
    fn bump_support() {
        let b = frequency_bump(3.0).compile(1);
        assert_eq!(b.eval(&Point::d1(0.0, 1.0, 2.0)).re, 1.0);
        assert_eq!(b.eval(&Point::d1(0.0, 3.0, 0.0)).re, 1.0);
        assert_eq!(b.eval(&Point::d1(0.0, 4.3, 4.3)).re, 0.0);
        let mid = b.eval(&Point::d1(0.0, 4.5, 0.0)).re;
        assert!(mid > 0.0 && mid < 1.0);
    }

    #[test]
    fn cut_is_flat_then_zero() {
        let grid = GridSpec::standard(32).unwrap();
        let cut = frequency_cut(&grid).compile(1);
        assert_eq!(cut.eval(&Point::d1(0.0, 8.0, -8.0)).re, 1.0);
        assert_eq!(cut.eval(&Point::d1(0.0, 4.0, 4.0)).re, 1.0);
        assert_eq!(cut.eval(&Point::d1(0.0, 6.0, 6.0)).re, 0.0);
        assert_eq!(cut.eval(&Point::d1(0.0, 12.0, 0.0)).re, 0.0);
    }
}
