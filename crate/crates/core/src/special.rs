//! Special functions needed by the catalog: Bessel functions of integer
//! order (radial characteristic functions of uniform balls), stable sinc
//! variants, and thin wrappers over `libm` for erf/Gamma.

use std::f64::consts::{FRAC_PI_4, PI};

/// sin(x)/x with the removable singularity handled by series.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// 2 J1(x) / x — the radial CF profile of the uniform distribution on a
/// disk of unit radius. Series near zero, exact elsewhere.
pub fn disk_cf_profile(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1e-3 {
        let x2 = x * x;
        // sum_k (-1)^k x^{2k} / (4^k k! (k+1)!)
        1.0 - x2 / 8.0 + x2 * x2 / 192.0
    } else {
        2.0 * bessel_j1(ax) / ax
    }
}

/// 3 (sin x - x cos x) / x^3 — radial CF profile of the uniform
/// distribution on a unit ball in dimension three.
pub fn ball3_cf_profile(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1e-2 {
        let x2 = x * x;
        1.0 - x2 / 10.0 + x2 * x2 / 280.0
    } else {
        3.0 * (ax.sin() - ax * ax.cos()) / (ax * ax * ax)
    }
}

/// Bessel J0. Trapezoid evaluation of the integral representation for
/// moderate arguments (spectrally accurate for periodic integrands),
/// Hankel asymptotic expansion beyond.
pub fn bessel_j0(x: f64) -> f64 {
    bessel_jn(0, x)
}

/// Bessel J1 on the same scheme as [`bessel_j0`].
pub fn bessel_j1(x: f64) -> f64 {
    bessel_jn(1, x)
}

const ASYMPTOTIC_CUTOFF: f64 = 35.0;

fn bessel_jn(order: u32, x: f64) -> f64 {
    let ax = x.abs();
    let value = if ax < ASYMPTOTIC_CUTOFF {
        bessel_integral(order, ax)
    } else {
        bessel_hankel_asymptotic(order, ax)
    };
    if x < 0.0 && order % 2 == 1 {
        -value
    } else {
        value
    }
}

/// J_n(x) = (1/pi) \int_0^pi cos(n t - x sin t) dt by the trapezoid rule.
/// The integrand extends to a smooth 2*pi-periodic function, so the rule
/// converges geometrically once the node count exceeds ~x + 40.
fn bessel_integral(order: u32, x: f64) -> f64 {
    let nodes = (x as usize + 48).next_power_of_two().max(64);
    let h = PI / nodes as f64;
    let n = order as f64;
    // Half-weight endpoints: t = 0 and t = pi.
    let mut sum = 0.5 * ((x * 0.0f64.sin() - 0.0).cos() + (n * PI - x * PI.sin()).cos());
    for j in 1..nodes {
        let t = j as f64 * h;
        sum += (n * t - x * t.sin()).cos();
    }
    sum * h / PI
}

/// Hankel expansion J_n(x) ~ sqrt(2/(pi x)) [P cos w - Q sin w],
/// w = x - n pi/2 - pi/4, with coefficients a_k(n) summed until they
/// stop improving.
fn bessel_hankel_asymptotic(order: u32, x: f64) -> f64 {
    let mu = 4.0 * (order as f64) * (order as f64);
    let omega = x - (order as f64) * 0.5 * PI - FRAC_PI_4;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut term = 1.0_f64; // a_k / x^k
    let mut k = 0u32;
    loop {
        let contribution = term;
        match k % 4 {
            0 => p += contribution,
            1 => q += contribution,
            2 => p -= contribution,
            _ => q -= contribution,
        }
        let next = term * (mu - ((2 * k + 1) as f64).powi(2)) / (8.0 * x * (k + 1) as f64);
        if next.abs() >= term.abs() || next.abs() < 1e-18 || k > 20 {
            break;
        }
        term = next;
        k += 1;
    }
    (2.0 / (PI * x)).sqrt() * (p * omega.cos() - q * omega.sin())
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Gamma function.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j0_reference_values() {
        // Abramowitz & Stegun table values.
        assert!((bessel_j0(0.0) - 1.0).abs() < 1e-15);
        assert!((bessel_j0(1.0) - 0.7651976865579666).abs() < 1e-13);
        assert!((bessel_j0(5.0) - (-0.17759677131433830)).abs() < 1e-13);
        assert!((bessel_j0(10.0) - (-0.24593576445134835)).abs() < 1e-13);
    }

    #[test]
    fn j1_reference_values() {
        assert!((bessel_j1(0.0)).abs() < 1e-15);
        assert!((bessel_j1(1.0) - 0.44005058574493355).abs() < 1e-13);
        assert!((bessel_j1(5.0) - (-0.32757913759146523)).abs() < 1e-13);
        assert!((bessel_j1(3.8317059702075123)).abs() < 1e-10); // first zero
        assert!((bessel_j1(-1.0) + 0.44005058574493355).abs() < 1e-13);
    }

    #[test]
    fn asymptotic_branch_agrees_with_integral_branch() {
        // Both branches are valid near the cutoff; they must agree tightly.
        for &x in &[30.0, 33.0, 34.9, 35.1, 40.0, 60.0] {
            let by_integral = bessel_integral(1, x);
            let by_asymptotic = bessel_hankel_asymptotic(1, x);
            assert!(
                (by_integral - by_asymptotic).abs() < 1e-11,
                "x={x}: {by_integral} vs {by_asymptotic}"
            );
        }
    }

    #[test]
    fn disk_profile_series_matches_exact_at_switch() {
        // The 2 J1(x)/x division amplifies absolute J1 error by 2/x, so
        // the comparison is only meaningful to ~1e-13 here.
        for &x in &[9.9e-4_f64, 1.1e-3] {
            let series = 1.0 - x * x / 8.0 + x.powi(4) / 192.0;
            let exact = 2.0 * bessel_j1(x) / x;
            assert!((series - exact).abs() < 5e-13);
        }
    }

    #[test]
    fn ball3_profile_small_and_moderate() {
        assert!((ball3_cf_profile(0.0) - 1.0).abs() < 1e-15);
        let x: f64 = 2.0;
        let exact = 3.0 * (x.sin() - x * x.cos()) / x.powi(3);
        assert!((ball3_cf_profile(2.0) - exact).abs() < 1e-15);
    }

    #[test]
    fn erf_and_gamma_sanity() {
        assert!((erf(1.0) - 0.8427007929497149).abs() < 1e-14);
        assert!((gamma(0.5) - std::f64::consts::PI.sqrt()).abs() < 1e-14);
        assert!((gamma(4.0) - 6.0).abs() < 1e-13);
    }
}
