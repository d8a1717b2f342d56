//! Deterministic quadrature building blocks: adaptive Simpson on an
//! interval, cached Gauss-Legendre rules, composite panels for oscillatory
//! integrands, and small tensor-product helpers for dimensions two and
//! three. Everything here is also used by the independent test oracles, so
//! the routines stay deliberately simple.

use std::sync::OnceLock;

/// Adaptive Simpson with absolute tolerance `tol`. The depth cap bounds
/// the worst case on non-smooth integrands; round-off noise can otherwise
/// force both children to split at every level.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 24)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-based initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn gl64() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(64))
}

/// 64-point Gauss-Legendre on [a, b].
pub fn gl64_integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gl64();
    let c = 0.5 * (a + b);
    let hw = 0.5 * (b - a);
    let mut sum = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        sum += w * f(c + hw * x);
    }
    sum * hw
}

/// Composite 64-point Gauss-Legendre over `panels` equal panels of [a, b].
/// Suited to oscillatory integrands once the panel width resolves the
/// oscillation scale.
pub fn composite_gl(f: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let panels = panels.max(1);
    let step = (b - a) / panels as f64;
    let mut sum = 0.0;
    for k in 0..panels {
        let lo = a + k as f64 * step;
        sum += gl64_integrate(f, lo, lo + step);
    }
    sum
}

/// Tensor-product Gauss-Legendre integral over the box
/// `[a0,b0] x [a1,b1]` with `n` points per axis.
pub fn tensor_gl_2d(f: &dyn Fn(f64, f64) -> f64, bounds: [(f64, f64); 2], n: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(n);
    let (a0, b0) = bounds[0];
    let (a1, b1) = bounds[1];
    let (c0, h0) = (0.5 * (a0 + b0), 0.5 * (b0 - a0));
    let (c1, h1) = (0.5 * (a1 + b1), 0.5 * (b1 - a1));
    let mut sum = 0.0;
    for (x, wx) in nodes.iter().zip(&weights) {
        let xm = c0 + h0 * x;
        let mut inner = 0.0;
        for (y, wy) in nodes.iter().zip(&weights) {
            inner += wy * f(xm, c1 + h1 * y);
        }
        sum += wx * inner;
    }
    sum * h0 * h1
}

/// Tensor-product Gauss-Legendre integral over a box in dimension three.
pub fn tensor_gl_3d(f: &dyn Fn(f64, f64, f64) -> f64, bounds: [(f64, f64); 3], n: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(n);
    let centers: Vec<f64> = bounds.iter().map(|(a, b)| 0.5 * (a + b)).collect();
    let halves: Vec<f64> = bounds.iter().map(|(a, b)| 0.5 * (b - a)).collect();
    let mut sum = 0.0;
    for (x, wx) in nodes.iter().zip(&weights) {
        let xv = centers[0] + halves[0] * x;
        for (y, wy) in nodes.iter().zip(&weights) {
            let yv = centers[1] + halves[1] * y;
            let mut inner = 0.0;
            for (z, wz) in nodes.iter().zip(&weights) {
                inner += wz * f(xv, yv, centers[2] + halves[2] * z);
            }
            sum += wx * wy * inner;
        }
    }
    sum * halves[0] * halves[1] * halves[2]
}

/// Least-squares slope and intercept of y against x, with the standard
/// error of the slope. Used for log-log rate fits.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    assert!(n >= 2.0);
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let dof = (n - 2.0).max(1.0);
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let stderr = (ss_res / dof / sxx).sqrt();
    (slope, intercept, stderr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn simpson_smooth() {
        let v = adaptive_simpson(&|x: f64| x.exp(), 0.0, 1.0, 1e-12);
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-11);
    }

    #[test]
    fn simpson_oscillatory() {
        let v = adaptive_simpson(&|x: f64| (10.0 * x).sin(), 0.0, PI, 1e-12);
        let exact = (1.0 - (10.0 * PI).cos()) / 10.0;
        assert!((v - exact).abs() < 1e-10);
    }

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        // n-point rule is exact through degree 2n-1.
        let (nodes, weights) = gauss_legendre(8);
        let integral: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(x, w)| w * x.powi(14))
            .sum();
        assert!((integral - 2.0 / 15.0).abs() < 1e-14);
        let total: f64 = weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn composite_gl_long_oscillatory_range() {
        // int_0^100 sin(x)/x dx = Si(100) = 1.5622254668890562...
        let v = composite_gl(&|x: f64| if x == 0.0 { 1.0 } else { x.sin() / x }, 0.0, 100.0, 64);
        assert!((v - 1.5622254668890562).abs() < 1e-12);
    }

    #[test]
    fn tensor_2d_gaussian_mass() {
        let f = |x: f64, y: f64| (-0.5 * (x * x + y * y)).exp() / (2.0 * PI);
        let v = tensor_gl_2d(&f, [(-9.0, 9.0), (-9.0, 9.0)], 96);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fit_recovers_slope() {
        let xs: Vec<f64> = (1..=6).map(|k| (k as f64).ln()).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 - 1.5 * x).collect();
        let (slope, intercept, stderr) = linear_fit(&xs, &ys);
        assert!((slope + 1.5).abs() < 1e-12);
        assert!((intercept - 2.5).abs() < 1e-12);
        assert!(stderr < 1e-12);
    }
}
