//! Finite-difference oracles with Richardson extrapolation.

/// Weights and offsets (in units of `h`) of the central stencil for the
/// `n`-th derivative: `Σ (-1)^k C(n,k) g(x + (n/2 - k)h) / hⁿ`.
fn stencil(n: usize) -> Vec<(f64, f64)> {
    let mut binom = 1.0;
    (0..=n)
        .map(|k| {
            let w = if k % 2 == 0 { binom } else { -binom };
            let offset = n as f64 / 2.0 - k as f64;
            binom = binom * (n - k) as f64 / (k + 1) as f64;
            (w, offset)
        })
        .collect()
}

/// Central-difference estimate of `∂^{i+j} g / ∂uⁱ ∂vʲ` with step `h`.
/// The error expands in even powers of `h`.
pub fn central_partial(g: impl Fn(f64, f64) -> f64, p: (f64, f64), ij: (usize, usize), h: f64) -> f64 {
    let (su, sv) = (stencil(ij.0), stencil(ij.1));
    let mut acc = 0.0;
    for &(wu, ou) in &su {
        for &(wv, ov) in &sv {
            acc += wu * wv * g(p.0 + ou * h, p.1 + ov * h);
        }
    }
    acc / h.powi((ij.0 + ij.1) as i32)
}

/// Richardson table over steps `h, h/2, …, h/2^(levels-1)` for a sequence
/// whose error expands in powers `p, 2p, 3p, …` of the step.
pub fn richardson(estimate: impl Fn(f64) -> f64, h: f64, levels: usize, p: u32) -> f64 {
    assert!(levels > 0, "at least one level");
    let mut row: Vec<f64> = (0..levels).map(|k| estimate(h / 2f64.powi(k as i32))).collect();
    for m in 1..levels {
        let factor = 2f64.powi((p * m as u32) as i32);
        row = row
            .windows(2)
            .map(|w| (factor * w[1] - w[0]) / (factor - 1.0))
            .collect();
    }
    row[0]
}

/// Partial derivative by central differences extrapolated over three steps.
pub fn richardson_partial(g: impl Fn(f64, f64) -> f64, p: (f64, f64), ij: (usize, usize), h: f64) -> f64 {
    richardson(|s| central_partial(&g, p, ij, s), h, 3, 2)
}

/// `lim_{x→0⁺} g(x)` assuming `g(x) = L + c₁x + c₂x² + …`.
pub fn richardson_limit(g: impl Fn(f64) -> f64, h: f64, levels: usize) -> f64 {
    richardson(g, h, levels, 1)
}

/// `|a - b| ≤ tol · max(1, |b|)`.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencils_differentiate_polynomials() {
        let g = |u: f64, v: f64| u.powi(4) * v.powi(2) + 3.0 * u * v.powi(3);
        let exact = 12.0 * 0.09 * 2.0 * -0.7;
        let plain = central_partial(g, (0.3, -0.7), (2, 1), 0.1);
        assert!((plain - exact - 0.02 * -1.4).abs() < 1e-9, "{plain}");
        let d = richardson_partial(g, (0.3, -0.7), (2, 1), 0.1);
        assert!((d - exact).abs() < 1e-9, "{d} vs {exact}");
    }

    #[test]
    fn extrapolated_partials_of_transcendentals() {
        let g = |u: f64, v: f64| (u + 2.0 * v).sin() * v.exp();
        let p = (0.4, 0.1);
        let d = richardson_partial(g, p, (3, 1), 0.05);
        let (s, c, e) = ((p.0 + 2.0 * p.1).sin(), (p.0 + 2.0 * p.1).cos(), p.1.exp());
        let exact = -(-2.0 * s + c) * e;
        assert!((d - exact).abs() < 1e-7, "{d} vs {exact}");
    }

    #[test]
    fn limits() {
        let l = richardson_limit(|x| (x.sin() / x) + 0.5 * x, 0.2, 5);
        assert!((l - 1.0).abs() < 1e-7, "{l}");
    }
}
