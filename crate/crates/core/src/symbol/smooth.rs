//! The C-infinity step `s(t) = e(t) / (e(t) + e(1 - t))`, `e(t) = exp(-1/t)`,
//! and its derivatives of any order via truncated Taylor series.

/// Truncated power series in `h` around a base point.
#[derive(Clone, Debug)]
struct Jet(Vec<f64>);

impl Jet {
    fn len(&self) -> usize {
        self.0.len()
    }

    fn mul(&self, other: &Jet) -> Jet {
        let n = self.len();
        let mut out = vec![0.0; n];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().take(n - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        Jet(out)
    }

    fn exp(&self) -> Jet {
        let n = self.len();
        let mut out = vec![0.0; n];
        out[0] = self.0[0].exp();
        for k in 1..n {
            let mut acc = 0.0;
            for i in 1..=k {
                acc += i as f64 * self.0[i] * out[k - i];
            }
            out[k] = acc / k as f64;
        }
        Jet(out)
    }

    fn recip(&self) -> Jet {
        let n = self.len();
        let mut out = vec![0.0; n];
        let inv = 1.0 / self.0[0];
        out[0] = inv;
        for k in 1..n {
            let mut acc = 0.0;
            for i in 1..=k {
                acc += self.0[i] * out[k - i];
            }
            out[k] = -inv * acc;
        }
        Jet(out)
    }

    fn add_const(mut self, c: f64) -> Jet {
        self.0[0] += c;
        self
    }

    fn neg(mut self) -> Jet {
        self.0.iter_mut().for_each(|v| *v = -*v);
        self
    }
}

/// `order`-th derivative of the smooth step at `t`.
pub fn smooth_step(t: f64, order: u32) -> f64 {
    if t <= 0.0 || t >= 1.0 || !t.is_finite() {
        return if order == 0 && t >= 1.0 { 1.0 } else { 0.0 };
    }
    let n = order as usize + 1;
    let u = 1.0 - t;
    // g(t + h) = 1/(t + h) - 1/(u - h), so s = 1 / (1 + exp(g)).
    let mut g = vec![0.0; n];
    let (mut pt, mut pu) = (1.0 / t, 1.0 / u);
    for (k, gk) in g.iter_mut().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        *gk = sign * pt - pu;
        pt /= t;
        pu /= u;
    }
    let g = Jet(g);
    let s = if g.0[0] <= 0.0 {
        g.exp().add_const(1.0).recip()
    } else {
        let e = g.neg().exp();
        e.mul(&e.clone().add_const(1.0).recip())
    };
    let factorial: f64 = (1..=order).map(f64::from).product();
    s.0[order as usize] * factorial
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_values_and_symmetry() {
        assert_eq!(smooth_step(-0.5, 0), 0.0);
        assert_eq!(smooth_step(0.0, 0), 0.0);
        assert_eq!(smooth_step(1.0, 0), 1.0);
        assert_eq!(smooth_step(3.0, 0), 1.0);
        assert!((smooth_step(0.5, 0) - 0.5).abs() < 1e-15);
        for &t in &[0.01, 0.2, 0.37, 0.9] {
            assert!((smooth_step(t, 0) + smooth_step(1.0 - t, 0) - 1.0).abs() < 1e-14);
            assert!((0.0..=1.0).contains(&smooth_step(t, 0)));
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-5;
        for &t in &[0.1, 0.3, 0.5, 0.75] {
            for order in 0..5 {
                let fd = (smooth_step(t + h, order) - smooth_step(t - h, order)) / (2.0 * h);
                let exact = smooth_step(t, order + 1);
                assert!(
                    (fd - exact).abs() < 1e-5 * (1.0 + exact.abs()),
                    "t={t} order={order}: {fd} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn derivatives_vanish_outside_transition() {
        for order in 1..6 {
            assert_eq!(smooth_step(-0.1, order), 0.0);
            assert_eq!(smooth_step(1.1, order), 0.0);
            assert!(smooth_step(1e-3, order).abs() < 1e-200);
        }
    }
}
