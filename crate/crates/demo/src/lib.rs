//! Browser demo: apply a built-in symbol to two signals, inspect the Leibniz
//! partition, and run a small norm sweep. Each export returns a JSON string.

use bilinear_calculus::bounds::{
    estimate_norm, leibniz_split, phi, reconstruction_residual, sample_points, Exponents,
    SweepOptions,
};
use bilinear_calculus::fourier::GridFunction;
use bilinear_calculus::operator::DiscreteBilinearOp;
use bilinear_calculus::symbol::families::{builtin_family, localize};
use bilinear_calculus::symbol::SymbolExpr;
use bilinear_calculus::{GridSpec, C64};
use serde::Serialize;
use std::collections::BTreeMap;
use wasm_bindgen::prelude::*;

fn family(name: &str, param: f64) -> Result<SymbolExpr, String> {
    let params: BTreeMap<String, f64> = match name {
        "elliptic" | "x_modulated" => [("m".to_string(), param)].into(),
        "frequency_bump" => [("width".to_string(), param)].into(),
        "chirp" => [("delta".to_string(), param), ("amplitude".to_string(), 1.0)].into(),
        _ => BTreeMap::new(),
    };
    builtin_family(name, &params)
        .map(|(e, _)| e)
        .map_err(|e| e.to_string())
}

#[derive(Serialize)]
pub struct Applied {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    /// `max |T(f,g) - f g|`, the distance from plain multiplication.
    pub product_gap: f64,
}

/// `T_sigma(f, g)` on a 64-point grid with `f = cos(a x)` and `g = sin(b x) + 1/2`.
pub fn apply_demo(name: &str, param: f64, a: i32, b: i32) -> Result<Applied, String> {
    let grid = GridSpec::standard(64).map_err(|e| e.to_string())?;
    let sigma = localize(&family(name, param)?, &grid);
    let f = GridFunction::from_real_fn(grid, |x| (a as f64 * x[0]).cos());
    let g = GridFunction::from_real_fn(grid, |x| (b as f64 * x[0]).sin() + 0.5);
    let t = DiscreteBilinearOp::from_symbol(&sigma, grid)
        .apply(&f, &g)
        .map_err(|e| e.to_string())?;
    let product_gap = t.max_abs_diff(&f.mul(&g).map_err(|e| e.to_string())?);
    let re = |v: &[C64]| v.iter().map(|c| c.re).collect::<Vec<_>>();
    Ok(Applied {
        x: (0..grid.len()).map(|j| grid.node(j)[0]).collect(),
        f: re(&f.values),
        g: re(&g.values),
        re: re(&t.values),
        im: t.values.iter().map(|c| c.im).collect(),
        product_gap,
    })
}

#[derive(Serialize)]
pub struct Partition {
    pub log_r: Vec<f64>,
    pub phi: Vec<f64>,
    pub phi_inv: Vec<f64>,
    pub reconstruction: f64,
}

/// `phi(r)` and `phi(1/r)` on `log r in [-2, 2]`, plus the split residual for the symbol.
pub fn partition_demo(name: &str, param: f64, m: f64) -> Result<Partition, String> {
    let sigma = family(name, param)?;
    let split = leibniz_split(&sigma, m).map_err(|e| e.to_string())?;
    let log_r: Vec<f64> = (0..=200).map(|i| -2.0 + 4.0 * i as f64 / 200.0).collect();
    Ok(Partition {
        phi: log_r.iter().map(|t| phi(t.exp())).collect(),
        phi_inv: log_r.iter().map(|t| phi((-t).exp())).collect(),
        log_r,
        reconstruction: reconstruction_residual(&sigma, &split, &sample_points(500, 64.0, 1)),
    })
}

#[derive(Serialize)]
pub struct Sweep {
    pub levels: Vec<f64>,
    pub sups: Vec<f64>,
    pub trend_slope: f64,
    pub unbounded_trend: bool,
    pub ratio_max: f64,
}

/// Modulated-bump sweep of `||T(f,g)||_r / (||f||_p ||g||_q)` with `1/r = 1/p + 1/q`.
pub fn sweep_demo(name: &str, param: f64, p: f64, q: f64, seed: u64) -> Result<Sweep, String> {
    let sigma = family(name, param)?;
    let exps = Exponents::holder(p, q).map_err(|e| e.to_string())?;
    let options = SweepOptions {
        trials_per_level: 2,
        random_trials: 2,
        seed,
        ..SweepOptions::default()
    };
    let est = estimate_norm(&sigma, exps, &options).map_err(|e| e.to_string())?;
    Ok(Sweep {
        levels: est.level_sups.iter().map(|p| p.radius).collect(),
        sups: est.level_sups.iter().map(|p| p.value).collect(),
        trend_slope: est.trend_slope,
        unbounded_trend: est.unbounded_trend,
        ratio_max: est.ratio_max,
    })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.map(|v| serde_json::to_string(&v).expect("serializes"))
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn apply_symbol(name: &str, param: f64, a: i32, b: i32) -> Result<String, JsValue> {
    to_js(apply_demo(name, param, a, b))
}

#[wasm_bindgen]
pub fn leibniz_partition(name: &str, param: f64, m: f64) -> Result<String, JsValue> {
    to_js(partition_demo(name, param, m))
}

#[wasm_bindgen]
pub fn norm_sweep(name: &str, param: f64, p: f64, q: f64, seed: u32) -> Result<String, JsValue> {
    to_js(sweep_demo(name, param, p, q, seed as u64))
}
