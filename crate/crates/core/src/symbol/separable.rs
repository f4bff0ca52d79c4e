use super::expr::{SymbolExpr, VarSet};
use super::tape::Point;
use crate::error::{Error, Result};
use crate::fourier::C64;

/// One rank-one term `a(x) b(xi) c(eta)`.
#[derive(Clone, Debug)]
pub struct SeparableTerm {
    pub a: SymbolExpr,
    pub b: SymbolExpr,
    pub c: SymbolExpr,
}

/// Low-rank symbol `sum_r a_r(x) b_r(xi) c_r(eta)`.
#[derive(Clone, Debug)]
pub struct SeparableSymbol {
    terms: Vec<SeparableTerm>,
}

fn only(v: VarSet, x: bool, xi: bool, eta: bool) -> bool {
    (x || !v.has_x()) && (xi || !v.has_xi()) && (eta || !v.has_eta())
}

impl SeparableSymbol {
    pub fn new(terms: Vec<SeparableTerm>) -> Result<Self> {
        for (r, t) in terms.iter().enumerate() {
            if !only(t.a.free_vars(), true, false, false)
                || !only(t.b.free_vars(), false, true, false)
                || !only(t.c.free_vars(), false, false, true)
            {
                return Err(Error::InvalidArgument(format!(
                    "separable term {r} mixes variables across its x, xi and eta factors"
                )));
            }
        }
        Ok(SeparableSymbol { terms })
    }

    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[SeparableTerm] {
        &self.terms
    }

    pub fn flatten(&self) -> SymbolExpr {
        SymbolExpr::sum(
            self.terms
                .iter()
                .map(|t| SymbolExpr::product(vec![t.a.clone(), t.b.clone(), t.c.clone()]))
                .collect(),
        )
    }

    pub fn eval(&self, dim: usize, p: &Point) -> C64 {
        self.terms
            .iter()
            .map(|t| t.a.eval(dim, p) * t.b.eval(dim, p) * t.c.eval(dim, p))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::expr::Bracket;

    #[test]
    fn rejects_mixed_factors() {
        let bad = SeparableTerm {
            a: SymbolExpr::x() * SymbolExpr::xi(),
            b: SymbolExpr::one(),
            c: SymbolExpr::one(),
        };
        assert!(SeparableSymbol::new(vec![bad]).is_err());
    }

    #[test]
    fn flattened_form_agrees() {
        let s = SeparableSymbol::new(vec![
            SeparableTerm {
                a: SymbolExpr::x().sin(),
                b: SymbolExpr::bracket(Bracket::Xi).powf(-0.5),
                c: SymbolExpr::eta(),
            },
            SeparableTerm {
                a: SymbolExpr::one(),
                b: SymbolExpr::i() * SymbolExpr::xi(),
                c: SymbolExpr::bracket(Bracket::Eta),
            },
        ])
        .unwrap();
        let flat = s.flatten();
        for &(x, xi, eta) in &[(0.1, 2.0, -3.0), (-2.0, 0.5, 7.0)] {
            let p = Point::d1(x, xi, eta);
            assert!((s.eval(1, &p) - flat.eval(1, &p)).norm() < 1e-12);
        }
    }
}
