use super::expr::{Bracket, Node, SymbolExpr, Var};
use super::smooth::smooth_step;
use crate::fourier::C64;
use std::collections::HashMap;

/// An evaluation point `(x, xi, eta)`; components beyond the dimension are ignored.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point {
    pub x: [f64; 2],
    pub xi: [f64; 2],
    pub eta: [f64; 2],
}

impl Point {
    pub fn new(x: [f64; 2], xi: [f64; 2], eta: [f64; 2]) -> Self {
        Point { x, xi, eta }
    }

    /// One-dimensional point.
    pub fn d1(x: f64, xi: f64, eta: f64) -> Self {
        Point {
            x: [x, 0.0],
            xi: [xi, 0.0],
            eta: [eta, 0.0],
        }
    }

    fn slot(&self, s: usize) -> f64 {
        match s {
            0 | 1 => self.x[s],
            2 | 3 => self.xi[s - 2],
            _ => self.eta[s - 4],
        }
    }
}

#[derive(Debug)]
enum Op {
    Const(C64),
    Var(usize),
    Sum(Vec<u32>),
    Product(Vec<u32>),
    Pow(u32, i32),
    RealPow(u32, f64),
    Exp(u32),
    Sin(u32),
    Cos(u32),
    Ln(u32),
    Step(u32, u32),
    Bracket(Bracket),
    Gated(f64, Box<CompiledSymbol>),
}

/// A symbol flattened into a straight-line program for fast repeated evaluation.
#[derive(Debug)]
pub struct CompiledSymbol {
    ops: Vec<Op>,
    dim: usize,
}

/// Reusable work space for [`CompiledSymbol::eval_with`].
#[derive(Debug, Default)]
pub struct Scratch {
    buf: Vec<C64>,
    nested: Vec<Scratch>,
}

impl SymbolExpr {
    /// Compile for evaluation in dimension `dim`.
    pub fn compile(&self, dim: usize) -> CompiledSymbol {
        CompiledSymbol::new(self, dim)
    }

    /// One-off evaluation; prefer [`SymbolExpr::compile`] inside loops.
    pub fn eval(&self, dim: usize, p: &Point) -> C64 {
        self.compile(dim).eval(p)
    }
}

impl CompiledSymbol {
    fn new(e: &SymbolExpr, dim: usize) -> Self {
        let mut ops = Vec::new();
        let mut index = HashMap::new();
        push(e, dim, &mut ops, &mut index);
        CompiledSymbol { ops, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn scratch(&self) -> Scratch {
        Scratch {
            buf: vec![C64::new(0.0, 0.0); self.ops.len()],
            nested: self
                .ops
                .iter()
                .filter_map(|op| match op {
                    Op::Gated(_, t) => Some(t.scratch()),
                    _ => None,
                })
                .collect(),
        }
    }

    pub fn eval(&self, p: &Point) -> C64 {
        self.eval_with(p, &mut self.scratch())
    }

    pub fn eval_with(&self, p: &Point, scratch: &mut Scratch) -> C64 {
        let d = self.dim;
        let freq_sq = |v: &[f64; 2]| v[..d].iter().map(|a| a * a).sum::<f64>();
        let buf = &mut scratch.buf;
        let mut gate = 0;
        for (i, op) in self.ops.iter().enumerate() {
            let v = match op {
                Op::Const(c) => *c,
                Op::Var(s) => C64::new(p.slot(*s), 0.0),
                Op::Sum(args) => args.iter().map(|&a| buf[a as usize]).sum(),
                Op::Product(args) => args.iter().map(|&a| buf[a as usize]).product(),
                Op::Pow(a, k) => buf[*a as usize].powi(*k),
                Op::RealPow(a, r) => {
                    let b = buf[*a as usize];
                    if b.im == 0.0 && b.re > 0.0 {
                        C64::new(b.re.powf(*r), 0.0)
                    } else {
                        b.powf(*r)
                    }
                }
                Op::Exp(a) => buf[*a as usize].exp(),
                Op::Sin(a) => buf[*a as usize].sin(),
                Op::Cos(a) => buf[*a as usize].cos(),
                Op::Ln(a) => buf[*a as usize].ln(),
                Op::Step(a, order) => C64::new(smooth_step(buf[*a as usize].re, *order), 0.0),
                Op::Bracket(b) => {
                    let s = match b {
                        Bracket::Xi => freq_sq(&p.xi),
                        Bracket::Eta => freq_sq(&p.eta),
                        Bracket::XiEta => freq_sq(&p.xi) + freq_sq(&p.eta),
                    };
                    C64::new((1.0 + s).sqrt(), 0.0)
                }
                Op::Gated(radius_sq, body) => {
                    let nested = &mut scratch.nested[gate];
                    gate += 1;
                    if freq_sq(&p.xi) + freq_sq(&p.eta) > *radius_sq {
                        body.eval_with(p, nested)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                }
            };
            buf[i] = v;
        }
        buf[self.ops.len() - 1]
    }
}

fn push(e: &SymbolExpr, dim: usize, ops: &mut Vec<Op>, index: &mut HashMap<usize, u32>) -> u32 {
    if let Some(&i) = index.get(&e.ptr()) {
        return i;
    }
    let mut arg = |a: &SymbolExpr, ops: &mut Vec<Op>| push(a, dim, ops, index);
    let op = match e.kind() {
        Node::Const(c) => Op::Const(*c),
        Node::Var(v) => Op::Var(Var::slot(*v)),
        Node::Sum(ts) => Op::Sum(ts.iter().map(|t| arg(t, ops)).collect()),
        Node::Product(ts) => Op::Product(ts.iter().map(|t| arg(t, ops)).collect()),
        Node::Pow(a, k) => Op::Pow(arg(a, ops), *k),
        Node::RealPow(a, r) => Op::RealPow(arg(a, ops), *r),
        Node::Exp(a) => Op::Exp(arg(a, ops)),
        Node::Sin(a) => Op::Sin(arg(a, ops)),
        Node::Cos(a) => Op::Cos(arg(a, ops)),
        Node::Ln(a) => Op::Ln(arg(a, ops)),
        Node::SmoothStep { order, arg: a } => Op::Step(arg(a, ops), *order),
        Node::Bracket(b) => Op::Bracket(*b),
        Node::Gated { radius_sq, body } => {
            Op::Gated(*radius_sq, Box::new(CompiledSymbol::new(body, dim)))
        }
    };
    ops.push(op);
    let i = (ops.len() - 1) as u32;
    index.insert(e.ptr(), i);
    i
}
