use crate::error::{Error, Result};
use crate::fourier::C64;
use crate::multiindex::MultiIndex;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

/// A coordinate variable of a bilinear symbol `sigma(x, xi, eta)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X(u8),
    Xi(u8),
    Eta(u8),
}

impl Var {
    fn bit(self) -> u8 {
        match self {
            Var::X(c) => c,
            Var::Xi(c) => 2 + c,
            Var::Eta(c) => 4 + c,
        }
    }

    /// Slot of this variable in a flattened `[x0, x1, xi0, xi1, eta0, eta1]` point.
    pub fn slot(self) -> usize {
        self.bit() as usize
    }
}

/// Japanese brackets `<xi>`, `<eta>` and `<xi, eta>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bracket {
    Xi,
    Eta,
    XiEta,
}

impl Bracket {
    fn vars(self) -> &'static [Var] {
        match self {
            Bracket::Xi => &[Var::Xi(0), Var::Xi(1)],
            Bracket::Eta => &[Var::Eta(0), Var::Eta(1)],
            Bracket::XiEta => &[Var::Xi(0), Var::Xi(1), Var::Eta(0), Var::Eta(1)],
        }
    }
}

#[derive(Debug)]
pub(crate) enum Node {
    Const(C64),
    Var(Var),
    Sum(Vec<SymbolExpr>),
    Product(Vec<SymbolExpr>),
    Pow(SymbolExpr, i32),
    /// Real power of a strictly positive subexpression.
    RealPow(SymbolExpr, f64),
    Exp(SymbolExpr),
    Sin(SymbolExpr),
    Cos(SymbolExpr),
    /// Natural logarithm of a strictly positive subexpression.
    Ln(SymbolExpr),
    /// `order`-th derivative of the smooth step built from `exp(-1/t)`.
    SmoothStep {
        order: u32,
        arg: SymbolExpr,
    },
    Bracket(Bracket),
    /// `body` where `|xi|^2 + |eta|^2 > radius_sq`, zero elsewhere.
    ///
    /// Only valid when `body` and all its derivatives vanish inside the gate,
    /// so the gate never changes the value, only skips work.
    Gated {
        radius_sq: f64,
        body: SymbolExpr,
    },
}

/// Immutable, shareable expression tree for a symbol `sigma(x, xi, eta)`.
#[derive(Clone, Debug)]
pub struct SymbolExpr(pub(crate) Arc<Node>);

/// Set of free variables as a bitmask over [`Var::slot`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VarSet(u8);

impl VarSet {
    pub fn contains(self, v: Var) -> bool {
        self.0 & (1 << v.bit()) != 0
    }

    pub fn has_x(self) -> bool {
        self.0 & 0b000011 != 0
    }

    pub fn has_xi(self) -> bool {
        self.0 & 0b001100 != 0
    }

    pub fn has_eta(self) -> bool {
        self.0 & 0b110000 != 0
    }

    fn with(self, v: Var) -> VarSet {
        VarSet(self.0 | (1 << v.bit()))
    }

    fn union(self, other: VarSet) -> VarSet {
        VarSet(self.0 | other.0)
    }
}

impl SymbolExpr {
    fn node(n: Node) -> Self {
        SymbolExpr(Arc::new(n))
    }

    pub(crate) fn kind(&self) -> &Node {
        &self.0
    }

    pub(crate) fn ptr(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn constant(c: C64) -> Self {
        Self::node(Node::Const(c))
    }

    pub fn real(v: f64) -> Self {
        Self::constant(C64::new(v, 0.0))
    }

    pub fn zero() -> Self {
        Self::real(0.0)
    }

    pub fn one() -> Self {
        Self::real(1.0)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::constant(C64::new(0.0, 1.0))
    }

    pub fn var(v: Var) -> Self {
        Self::node(Node::Var(v))
    }

    pub fn x() -> Self {
        Self::var(Var::X(0))
    }

    pub fn xi() -> Self {
        Self::var(Var::Xi(0))
    }

    pub fn eta() -> Self {
        Self::var(Var::Eta(0))
    }

    pub fn bracket(b: Bracket) -> Self {
        Self::node(Node::Bracket(b))
    }

    /// `<xi, eta> = (1 + |xi|^2 + |eta|^2)^{1/2}`.
    pub fn bracket_xi_eta() -> Self {
        Self::bracket(Bracket::XiEta)
    }

    pub fn as_const(&self) -> Option<C64> {
        match self.kind() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const().is_some_and(|c| c == C64::new(0.0, 0.0))
    }

    pub fn is_one(&self) -> bool {
        self.as_const().is_some_and(|c| c == C64::new(1.0, 0.0))
    }

    pub fn sum(terms: Vec<SymbolExpr>) -> Self {
        let mut acc = C64::new(0.0, 0.0);
        let mut flat = Vec::with_capacity(terms.len());
        for t in terms {
            match t.kind() {
                Node::Const(c) => acc += c,
                Node::Sum(inner) => {
                    for u in inner {
                        match u.kind() {
                            Node::Const(c) => acc += c,
                            _ => flat.push(u.clone()),
                        }
                    }
                }
                _ => flat.push(t),
            }
        }
        if acc != C64::new(0.0, 0.0) {
            flat.push(Self::constant(acc));
        }
        match flat.len() {
            0 => Self::zero(),
            1 => flat.pop().unwrap(),
            _ => Self::node(Node::Sum(flat)),
        }
    }

    pub fn product(factors: Vec<SymbolExpr>) -> Self {
        let mut acc = C64::new(1.0, 0.0);
        let mut flat = Vec::with_capacity(factors.len());
        for f in factors {
            match f.kind() {
                Node::Const(c) => acc *= c,
                Node::Product(inner) => {
                    for u in inner {
                        match u.kind() {
                            Node::Const(c) => acc *= c,
                            _ => flat.push(u.clone()),
                        }
                    }
                }
                _ => flat.push(f),
            }
        }
        if acc == C64::new(0.0, 0.0) {
            return Self::zero();
        }
        if acc != C64::new(1.0, 0.0) {
            flat.insert(0, Self::constant(acc));
        }
        match flat.len() {
            0 => Self::one(),
            1 => flat.pop().unwrap(),
            _ => Self::node(Node::Product(flat)),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::product(vec![Self::constant(c), self.clone()])
    }

    pub fn powi(&self, k: i32) -> Self {
        match (k, self.kind()) {
            (0, _) => Self::one(),
            (1, _) => self.clone(),
            (_, Node::Const(c)) => Self::constant(c.powi(k)),
            (_, Node::Pow(base, j)) => base.powi(j * k),
            _ => Self::node(Node::Pow(self.clone(), k)),
        }
    }

    /// Real power; the base must be strictly positive wherever it is evaluated.
    pub fn powf(&self, r: f64) -> Self {
        if r == 0.0 {
            return Self::one();
        }
        if r == 1.0 {
            return self.clone();
        }
        if r.fract() == 0.0 && r.abs() < 64.0 {
            return self.powi(r as i32);
        }
        match self.kind() {
            Node::Const(c) if c.im == 0.0 && c.re > 0.0 => Self::real(c.re.powf(r)),
            Node::RealPow(base, s) => base.powf(s * r),
            _ => Self::node(Node::RealPow(self.clone(), r)),
        }
    }

    pub fn exp(&self) -> Self {
        match self.kind() {
            Node::Const(c) => Self::constant(c.exp()),
            _ => Self::node(Node::Exp(self.clone())),
        }
    }

    pub fn sin(&self) -> Self {
        match self.kind() {
            Node::Const(c) => Self::constant(c.sin()),
            _ => Self::node(Node::Sin(self.clone())),
        }
    }

    pub fn cos(&self) -> Self {
        match self.kind() {
            Node::Const(c) => Self::constant(c.cos()),
            _ => Self::node(Node::Cos(self.clone())),
        }
    }

    pub fn ln(&self) -> Self {
        match self.kind() {
            Node::Const(c) => Self::constant(c.ln()),
            _ => Self::node(Node::Ln(self.clone())),
        }
    }

    /// Smooth step `s(t)`: `0` for `t <= 0`, `1` for `t >= 1`, `C^infinity`.
    pub fn smooth_step(&self) -> Self {
        self.smooth_step_derivative(0)
    }

    pub(crate) fn smooth_step_derivative(&self, order: u32) -> Self {
        match self.kind() {
            Node::Const(c) => Self::real(super::smooth::smooth_step(c.re, order)),
            _ => Self::node(Node::SmoothStep {
                order,
                arg: self.clone(),
            }),
        }
    }

    /// Skip evaluation where `|xi|^2 + |eta|^2 <= radius_sq`; see [`Node::Gated`].
    pub(crate) fn gated(&self, radius_sq: f64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Self::node(Node::Gated {
            radius_sq,
            body: self.clone(),
        })
    }

    pub fn free_vars(&self) -> VarSet {
        fn go(e: &SymbolExpr, memo: &mut HashMap<usize, VarSet>) -> VarSet {
            if let Some(v) = memo.get(&e.ptr()) {
                return *v;
            }
            let out = match e.kind() {
                Node::Const(_) => VarSet::default(),
                Node::Var(v) => VarSet::default().with(*v),
                Node::Bracket(b) => b.vars().iter().fold(VarSet::default(), |s, v| s.with(*v)),
                Node::Sum(ts) | Node::Product(ts) => ts
                    .iter()
                    .fold(VarSet::default(), |s, t| s.union(go(t, memo))),
                Node::Pow(a, _)
                | Node::RealPow(a, _)
                | Node::Exp(a)
                | Node::Sin(a)
                | Node::Cos(a)
                | Node::Ln(a)
                | Node::SmoothStep { arg: a, .. }
                | Node::Gated { body: a, .. } => go(a, memo),
            };
            memo.insert(e.ptr(), out);
            out
        }
        go(self, &mut HashMap::new())
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.free_vars().contains(v)
    }

    /// Exact partial derivative with respect to one variable.
    pub fn diff(&self, v: Var) -> SymbolExpr {
        let mut memo = HashMap::new();
        let mut free = HashMap::new();
        diff_node(self, v, &mut memo, &mut free)
    }

    /// `d_x^alpha d_xi^beta d_eta^gamma` applied in sequence.
    pub fn derivative(
        &self,
        alpha: &MultiIndex,
        beta: &MultiIndex,
        gamma: &MultiIndex,
    ) -> SymbolExpr {
        let mut out = self.clone();
        for (idx, mk) in [
            (alpha, Var::X as fn(u8) -> Var),
            (beta, Var::Xi),
            (gamma, Var::Eta),
        ] {
            for c in 0..2u8 {
                for _ in 0..idx.0[c as usize] {
                    out = out.diff(mk(c));
                }
            }
        }
        out
    }

    /// Replace variables by expressions. `dim` fixes the components that the
    /// bracket nodes sum over when their variables are substituted.
    pub fn substitute(&self, dim: usize, map: &dyn Fn(Var) -> Option<SymbolExpr>) -> SymbolExpr {
        fn go(
            e: &SymbolExpr,
            dim: usize,
            map: &dyn Fn(Var) -> Option<SymbolExpr>,
            memo: &mut HashMap<usize, SymbolExpr>,
        ) -> SymbolExpr {
            if let Some(v) = memo.get(&e.ptr()) {
                return v.clone();
            }
            let out = match e.kind() {
                Node::Const(_) => e.clone(),
                Node::Var(v) => map(*v).unwrap_or_else(|| e.clone()),
                Node::Bracket(b) => {
                    let vars: Vec<Var> = b
                        .vars()
                        .iter()
                        .copied()
                        .filter(|v| (v.bit() % 2) < dim as u8)
                        .collect();
                    if vars.iter().all(|v| map(*v).is_none()) {
                        e.clone()
                    } else {
                        let mut terms = vec![SymbolExpr::one()];
                        for v in vars {
                            let s = map(v).unwrap_or_else(|| SymbolExpr::var(v));
                            terms.push(s.powi(2));
                        }
                        SymbolExpr::sum(terms).powf(0.5)
                    }
                }
                Node::Sum(ts) => {
                    SymbolExpr::sum(ts.iter().map(|t| go(t, dim, map, memo)).collect())
                }
                Node::Product(ts) => {
                    SymbolExpr::product(ts.iter().map(|t| go(t, dim, map, memo)).collect())
                }
                Node::Pow(a, k) => go(a, dim, map, memo).powi(*k),
                Node::RealPow(a, r) => go(a, dim, map, memo).powf(*r),
                Node::Exp(a) => go(a, dim, map, memo).exp(),
                Node::Sin(a) => go(a, dim, map, memo).sin(),
                Node::Cos(a) => go(a, dim, map, memo).cos(),
                Node::Ln(a) => go(a, dim, map, memo).ln(),
                Node::SmoothStep { order, arg } => {
                    go(arg, dim, map, memo).smooth_step_derivative(*order)
                }
                // The gate is value-neutral, so dropping it is exact.
                Node::Gated { body, .. } => go(body, dim, map, memo),
            };
            memo.insert(e.ptr(), out.clone());
            out
        }
        go(self, dim, map, &mut HashMap::new())
    }

    /// Number of distinct nodes in the expression DAG.
    pub fn node_count(&self) -> usize {
        fn go(e: &SymbolExpr, seen: &mut std::collections::HashSet<usize>) {
            if !seen.insert(e.ptr()) {
                return;
            }
            match e.kind() {
                Node::Sum(ts) | Node::Product(ts) => ts.iter().for_each(|t| go(t, seen)),
                Node::Pow(a, _)
                | Node::RealPow(a, _)
                | Node::Exp(a)
                | Node::Sin(a)
                | Node::Cos(a)
                | Node::Ln(a)
                | Node::SmoothStep { arg: a, .. }
                | Node::Gated { body: a, .. } => go(a, seen),
                _ => {}
            }
        }
        let mut seen = std::collections::HashSet::new();
        go(self, &mut seen);
        seen.len()
    }
}

fn diff_node(
    e: &SymbolExpr,
    v: Var,
    memo: &mut HashMap<usize, SymbolExpr>,
    free: &mut HashMap<usize, bool>,
) -> SymbolExpr {
    if let Some(d) = memo.get(&e.ptr()) {
        return d.clone();
    }
    let depends = *free.entry(e.ptr()).or_insert_with(|| e.depends_on(v));
    if !depends {
        return SymbolExpr::zero();
    }
    let out = match e.kind() {
        Node::Const(_) => SymbolExpr::zero(),
        Node::Var(w) => {
            if *w == v {
                SymbolExpr::one()
            } else {
                SymbolExpr::zero()
            }
        }
        Node::Bracket(_) => {
            // d <.> / dv = v <.>^{-1}
            SymbolExpr::product(vec![SymbolExpr::var(v), e.powi(-1)])
        }
        Node::Sum(ts) => SymbolExpr::sum(ts.iter().map(|t| diff_node(t, v, memo, free)).collect()),
        Node::Product(ts) => {
            let mut terms = Vec::new();
            for (i, t) in ts.iter().enumerate() {
                let dt = diff_node(t, v, memo, free);
                if dt.is_zero() {
                    continue;
                }
                let mut factors: Vec<SymbolExpr> = ts
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, u)| u.clone())
                    .collect();
                factors.push(dt);
                terms.push(SymbolExpr::product(factors));
            }
            SymbolExpr::sum(terms)
        }
        Node::Pow(a, k) => SymbolExpr::product(vec![
            SymbolExpr::real(f64::from(*k)),
            a.powi(k - 1),
            diff_node(a, v, memo, free),
        ]),
        Node::RealPow(a, r) => SymbolExpr::product(vec![
            SymbolExpr::real(*r),
            a.powf(r - 1.0),
            diff_node(a, v, memo, free),
        ]),
        Node::Exp(a) => SymbolExpr::product(vec![e.clone(), diff_node(a, v, memo, free)]),
        Node::Sin(a) => SymbolExpr::product(vec![a.cos(), diff_node(a, v, memo, free)]),
        Node::Cos(a) => SymbolExpr::product(vec![
            SymbolExpr::real(-1.0),
            a.sin(),
            diff_node(a, v, memo, free),
        ]),
        Node::Ln(a) => SymbolExpr::product(vec![a.powi(-1), diff_node(a, v, memo, free)]),
        Node::SmoothStep { order, arg } => SymbolExpr::product(vec![
            arg.smooth_step_derivative(order + 1),
            diff_node(arg, v, memo, free),
        ]),
        Node::Gated { radius_sq, body } => diff_node(body, v, memo, free).gated(*radius_sq),
    };
    memo.insert(e.ptr(), out.clone());
    out
}

/// Exact derivative `d_x^alpha d_xi^beta d_eta^gamma sigma`, refusing orders above `cap`.
pub fn differentiate(
    sigma: &SymbolExpr,
    alpha: &MultiIndex,
    beta: &MultiIndex,
    gamma: &MultiIndex,
    cap: usize,
) -> Result<SymbolExpr> {
    let requested = alpha.order() + beta.order() + gamma.order();
    if requested > cap {
        return Err(Error::OrderCap { requested, cap });
    }
    Ok(sigma.derivative(alpha, beta, gamma))
}

impl Add for SymbolExpr {
    type Output = SymbolExpr;
    fn add(self, rhs: SymbolExpr) -> SymbolExpr {
        SymbolExpr::sum(vec![self, rhs])
    }
}

impl Sub for SymbolExpr {
    type Output = SymbolExpr;
    fn sub(self, rhs: SymbolExpr) -> SymbolExpr {
        SymbolExpr::sum(vec![self, -rhs])
    }
}

impl Mul for SymbolExpr {
    type Output = SymbolExpr;
    fn mul(self, rhs: SymbolExpr) -> SymbolExpr {
        SymbolExpr::product(vec![self, rhs])
    }
}

impl Neg for SymbolExpr {
    type Output = SymbolExpr;
    fn neg(self) -> SymbolExpr {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Add<f64> for SymbolExpr {
    type Output = SymbolExpr;
    fn add(self, rhs: f64) -> SymbolExpr {
        self + SymbolExpr::real(rhs)
    }
}

impl Mul<f64> for SymbolExpr {
    type Output = SymbolExpr;
    fn mul(self, rhs: f64) -> SymbolExpr {
        self.scale(C64::new(rhs, 0.0))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(c) => write!(f, "x{}", c + 1),
            Var::Xi(c) => write!(f, "xi{}", c + 1),
            Var::Eta(c) => write!(f, "eta{}", c + 1),
        }
    }
}

/// Prefix (s-expression) rendering, readable back by [`super::parse::parse_expr`]
/// except for internal gate nodes, which print as their body.
impl fmt::Display for SymbolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            Node::Const(c) => {
                if c.im == 0.0 {
                    write!(f, "{}", c.re)
                } else {
                    write!(f, "(+ {} (* {} i))", c.re, c.im)
                }
            }
            Node::Var(v) => write!(f, "{v}"),
            Node::Bracket(Bracket::Xi) => write!(f, "bxi"),
            Node::Bracket(Bracket::Eta) => write!(f, "beta"),
            Node::Bracket(Bracket::XiEta) => write!(f, "bxieta"),
            Node::Sum(ts) | Node::Product(ts) => {
                let op = if matches!(self.kind(), Node::Sum(_)) {
                    "+"
                } else {
                    "*"
                };
                write!(f, "({op}")?;
                for t in ts {
                    write!(f, " {t}")?;
                }
                write!(f, ")")
            }
            Node::Pow(a, k) => write!(f, "(pow {a} {k})"),
            Node::RealPow(a, r) => write!(f, "(rpow {a} {r})"),
            Node::Exp(a) => write!(f, "(exp {a})"),
            Node::Sin(a) => write!(f, "(sin {a})"),
            Node::Cos(a) => write!(f, "(cos {a})"),
            Node::Ln(a) => write!(f, "(ln {a})"),
            Node::SmoothStep { order: 0, arg } => write!(f, "(step {arg})"),
            Node::SmoothStep { order, arg } => write!(f, "(dstep {order} {arg})"),
            Node::Gated { body, .. } => write!(f, "{body}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::families::{chirp, elliptic};
    use crate::symbol::tape::Point;

    #[test]
    fn polynomial_rule() {
        let d = elliptic(2.0).diff(Var::Xi(0));
        for &(xi, eta) in &[(0.5, 1.0), (-3.0, 2.0)] {
            let v = d.eval(1, &Point::d1(0.0, xi, eta));
            assert!((v - C64::new(2.0 * xi, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn constants_differentiate_to_zero() {
        let one = SymbolExpr::one();
        for v in [Var::X(0), Var::Xi(0), Var::Eta(0)] {
            assert!(one.diff(v).is_zero());
        }
        assert!(elliptic(3.0).diff(Var::X(0)).is_zero());
    }

    #[test]
    fn cap_refuses_high_orders() {
        let a = MultiIndex::d1(4);
        assert!(matches!(
            differentiate(&SymbolExpr::one(), &a, &a, &MultiIndex::ZERO, 6),
            Err(Error::OrderCap {
                requested: 8,
                cap: 6
            })
        ));
    }

    #[test]
    fn substitution_expands_brackets() {
        let s = elliptic(1.0);
        let c = s.substitute(1, &|v| match v {
            Var::Xi(0) => Some(-(SymbolExpr::xi() + SymbolExpr::eta())),
            _ => None,
        });
        let p = Point::d1(0.0, 2.0, 1.0);
        assert!((c.eval(1, &p).re - (1.0f64 + 9.0 + 1.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn free_variables() {
        let c = chirp(0.5, 1.0);
        let v = c.free_vars();
        assert!(v.has_x() && v.has_xi() && v.has_eta());
        assert!(!SymbolExpr::x().sin().free_vars().has_xi());
    }
}
