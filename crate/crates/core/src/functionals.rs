//! Scalar functionals of summand laws: the maximum of density `M(X)`,
//! directional Lyapunov ratios `beta_p`, Lyapunov coefficients `L_p`,
//! Euclidean ball volumes, and the isotropic-constant lower bounds.

use crate::distributions::{DistributionSpec, Family};
use crate::error::{Error, Result};
use crate::quad;
use crate::special;
use std::f64::consts::PI;

/// Volume of the unit Euclidean ball in dimension `d`.
pub fn ball_volume(d: usize) -> f64 {
    PI.powf(d as f64 / 2.0) / special::gamma(d as f64 / 2.0 + 1.0)
}

/// `M(X) = ess sup p(x)`: closed form when the catalog carries one,
/// otherwise a scan of the density closure with parabolic refinement.
pub fn max_density(dist: &DistributionSpec) -> Result<f64> {
    if let Some(m) = dist.max_density_closed_form {
        return Ok(m);
    }
    match dist.dim {
        1 => {
            let b = dist.numerical_support();
            Ok(scan_max_1d(&|x| dist.density(&[x]), -b, b, 4097))
        }
        2 => {
            let b = dist.numerical_support();
            let n = 257;
            let mut best = 0.0f64;
            let mut at = (0.0, 0.0);
            for i in 0..n {
                let x = -b + 2.0 * b * i as f64 / (n - 1) as f64;
                for j in 0..n {
                    let y = -b + 2.0 * b * j as f64 / (n - 1) as f64;
                    let v = dist.density(&[x, y]);
                    if v > best {
                        best = v;
                        at = (x, y);
                    }
                }
            }
            let h = 2.0 * b / (n - 1) as f64;
            let fine = scan_max_1d(&|x| dist.density(&[x, at.1]), at.0 - h, at.0 + h, 65)
                .max(scan_max_1d(&|y| dist.density(&[at.0, y]), at.1 - h, at.1 + h, 65));
            Ok(best.max(fine))
        }
        d => Err(Error::UnsupportedDimension {
            dim: d,
            supported: "1..=2 for scanned maxima",
        }),
    }
}

/// Maximum of the density of the projection `<theta, X>`. Errors when the
/// law is flagged as having unbounded one-dimensional projections.
pub fn max_density_projection(dist: &DistributionSpec, theta: &[f64]) -> Result<f64> {
    if dist.projections_unbounded {
        return Err(Error::UnboundedDensity {
            context: format!(
                "{}: one-dimensional projections have unbounded densities",
                dist.label
            ),
        });
    }
    if dist.dim == 1 {
        return max_density(dist);
    }
    let b = dist.numerical_support();
    Ok(scan_max_1d(
        &|u| projected_density(dist, theta, u),
        -b,
        b,
        1025,
    ))
}

fn scan_max_1d(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / (n - 1) as f64;
    let mut best = f64::NEG_INFINITY;
    let mut best_i = 0;
    let values: Vec<f64> = (0..n).map(|i| f(lo + i as f64 * h)).collect();
    for (i, v) in values.iter().enumerate() {
        if *v > best {
            best = *v;
            best_i = i;
        }
    }
    // Parabolic refinement at an interior strict maximum.
    if best_i > 0 && best_i + 1 < n {
        let (gm, g0, gp) = (values[best_i - 1], values[best_i], values[best_i + 1]);
        let denom = gm - 2.0 * g0 + gp;
        if denom < 0.0 {
            let delta = 0.5 * (gm - gp) / denom;
            if delta.abs() <= 1.0 {
                best = best.max(g0 - 0.25 * (gm - gp) * delta);
            }
        }
    }
    best
}

/// Density of `<theta, X>` at `u`, by quadrature over the orthogonal
/// direction (dimension two only; the catalog needs no more).
fn projected_density(dist: &DistributionSpec, theta: &[f64], u: f64) -> f64 {
    assert_eq!(dist.dim, 2);
    let b = dist.numerical_support();
    let perp = [-theta[1], theta[0]];
    quad::adaptive_simpson(
        &|v: f64| dist.density(&[u * theta[0] + v * perp[0], u * theta[1] + v * perp[1]]),
        -b,
        b,
        1e-10,
    )
}

/// `E |<theta, X>|^p` for one summand: closed form where available,
/// otherwise an adapted quadrature.
pub fn proj_abs_moment(dist: &DistributionSpec, theta: &[f64], p: u32) -> f64 {
    if dist.rotation_invariant() || dist.dim == 1 {
        if let Some(v) = dist.proj_abs_moment_closed(p) {
            return v;
        }
    }
    match &dist.family {
        Family::Product2 { a, b } => {
            let (ta, tb) = (theta[0], theta[1]);
            let ba = a.numerical_support();
            let bb = b.numerical_support();
            quad::tensor_gl_2d(
                &|x, y| a.density(&[x]) * b.density(&[y]) * (ta * x + tb * y).abs().powi(p as i32),
                [(-ba, ba), (-bb, bb)],
                160,
            )
        }
        Family::UnboundedMarginal { c } => {
            // x2-slice reduction with the inner |t1 x + t2 u|^p integral in
            // closed form.
            let c = *c;
            let upper = 50.0 / c;
            let inner = |u: f64| {
                let w = (-c * u.abs()).exp();
                int_abs_affine_pow(theta[0], theta[1] * u, -w, w, p)
            };
            (c / 4.0) * quad::adaptive_simpson(&|u: f64| inner(u) + inner(-u), 0.0, upper, 1e-12)
        }
        _ if dist.dim == 1 => {
            let b = dist.numerical_support();
            quad::adaptive_simpson(
                &|x: f64| dist.density(&[x]) * x.abs().powi(p as i32),
                -b,
                b,
                1e-11,
            )
        }
        _ => unimplemented!("projected moment for {}", dist.label),
    }
}

/// `int_{lo}^{hi} |a x + b|^p dx` in closed form (`p` a positive integer).
pub(crate) fn int_abs_affine_pow(a: f64, b: f64, lo: f64, hi: f64, p: u32) -> f64 {
    // When |a| (hi - lo) << |b| the antiderivative difference cancels to
    // round-off noise; the integrand is then smooth and nearly constant,
    // and a single Simpson panel is accurate to O((a span / b)^4).
    if a.abs() * (hi - lo) <= 1e-6 * b.abs() {
        let f = |x: f64| (a * x + b).abs().powi(p as i32);
        return (hi - lo) / 6.0 * (f(lo) + 4.0 * f(0.5 * (lo + hi)) + f(hi));
    }
    let anti = |v: f64| -> f64 {
        let q = p as i32 + 1;
        if p % 2 == 1 {
            // |v|^p integrates to sign(v) |v|^{p+1} / (p+1)
            v.abs().powi(q) / q as f64 * v.signum()
        } else {
            v.powi(q) / q as f64
        }
    };
    (anti(a * hi + b) - anti(a * lo + b)) / a
}

/// Directional Lyapunov ratio `(1/n) sum_k E |<theta, X_k>|^p`, cycling
/// `dists` when shorter than `n`.
pub fn beta_p_directional(
    dists: &[DistributionSpec],
    n: usize,
    theta: &[f64],
    p: u32,
) -> Result<f64> {
    if !(p == 3 || p == 4) {
        return Err(Error::UnsupportedOrder { p });
    }
    if dists.is_empty() || n == 0 {
        return Err(Error::invalid("dists", "need at least one summand"));
    }
    let dim = dists[0].dim;
    for d in dists {
        if d.dim != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: d.dim,
            });
        }
    }
    let mut acc = 0.0;
    for (i, d) in dists.iter().enumerate() {
        // Number of k in 0..n with k mod len == i.
        let count = n / dists.len() + usize::from(i < n % dists.len());
        if count > 0 {
            acc += count as f64 * proj_abs_moment(d, theta, p);
        }
    }
    Ok(acc / n as f64)
}

/// Unit directions used for sphere scans: the two signs in dimension one,
/// a uniform half-circle lattice in dimension two, a Fibonacci spiral in
/// dimension three.
pub fn sphere_lattice(dim: usize, count: usize) -> Vec<[f64; 3]> {
    match dim {
        1 => vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]],
        2 => (0..count)
            .map(|i| {
                let ang = PI * i as f64 / count as f64;
                [ang.cos(), ang.sin(), 0.0]
            })
            .collect(),
        3 => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let ang = golden * i as f64;
                    [r * ang.cos(), r * ang.sin(), z]
                })
                .collect()
        }
        _ => unreachable!("dimension validated upstream"),
    }
}

/// `beta_p = sup_{|theta| = 1} beta_p(theta)` with the achieving direction.
/// Exact in dimension one; coarse lattice plus local ascent otherwise.
pub fn beta_p_sup(dists: &[DistributionSpec], n: usize, p: u32) -> Result<(f64, Vec<f64>)> {
    let dim = dists
        .first()
        .ok_or_else(|| Error::invalid("dists", "need at least one summand"))?
        .dim;
    match dim {
        1 => {
            let v = beta_p_directional(dists, n, &[1.0], p)?;
            Ok((v, vec![1.0]))
        }
        2 => {
            let eval =
                |ang: f64| -> Result<f64> { beta_p_directional(dists, n, &[ang.cos(), ang.sin()], p) };
            let lattice = 512usize;
            let mut best = (f64::NEG_INFINITY, 0.0);
            for i in 0..lattice {
                let ang = PI * i as f64 / lattice as f64;
                let v = eval(ang)?;
                if v > best.0 {
                    best = (v, ang);
                }
            }
            // Golden-section ascent around the lattice winner.
            let gr = (5f64.sqrt() - 1.0) / 2.0;
            let (mut lo, mut hi) = (best.1 - PI / lattice as f64, best.1 + PI / lattice as f64);
            let mut x1 = hi - gr * (hi - lo);
            let mut x2 = lo + gr * (hi - lo);
            let (mut f1, mut f2) = (eval(x1)?, eval(x2)?);
            for _ in 0..48 {
                if f1 < f2 {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + gr * (hi - lo);
                    f2 = eval(x2)?;
                } else {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - gr * (hi - lo);
                    f1 = eval(x1)?;
                }
            }
            let ang = if f1 > f2 { x1 } else { x2 };
            let v = eval(ang)?.max(best.0);
            Ok((v, vec![ang.cos(), ang.sin()]))
        }
        3 => {
            let eval = |th: &[f64; 3]| beta_p_directional(dists, n, th, p);
            let mut best_v = f64::NEG_INFINITY;
            let mut best_dir = [1.0, 0.0, 0.0];
            for th in sphere_lattice(3, 512) {
                let v = eval(&th)?;
                if v > best_v {
                    best_v = v;
                    best_dir = th;
                }
            }
            // Compass ascent in the tangent plane with shrinking step.
            let mut step = PI / 32.0;
            while step > 1e-7 {
                let (e1, e2) = tangent_basis(&best_dir);
                let mut moved = false;
                for (s1, s2) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
                    let cand = normalize(&[
                        best_dir[0] + step * (s1 * e1[0] + s2 * e2[0]),
                        best_dir[1] + step * (s1 * e1[1] + s2 * e2[1]),
                        best_dir[2] + step * (s1 * e1[2] + s2 * e2[2]),
                    ]);
                    let v = eval(&cand)?;
                    if v > best_v {
                        best_v = v;
                        best_dir = cand;
                        moved = true;
                    }
                }
                if !moved {
                    step *= 0.5;
                }
            }
            Ok((best_v, best_dir.to_vec()))
        }
        d => Err(Error::UnsupportedDimension {
            dim: d,
            supported: "1..=3",
        }),
    }
}

fn tangent_basis(theta: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let pick = if theta[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let dot = pick[0] * theta[0] + pick[1] * theta[1] + pick[2] * theta[2];
    let e1 = normalize(&[
        pick[0] - dot * theta[0],
        pick[1] - dot * theta[1],
        pick[2] - dot * theta[2],
    ]);
    let e2 = [
        theta[1] * e1[2] - theta[2] * e1[1],
        theta[2] * e1[0] - theta[0] * e1[2],
        theta[0] * e1[1] - theta[1] * e1[0],
    ];
    (e1, e2)
}

fn normalize(v: &[f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Lyapunov coefficient `L_p = n^{-(p-2)/2} beta_p`.
pub fn lyapunov_coefficient(dists: &[DistributionSpec], n: usize, p: u32) -> Result<f64> {
    let (beta, _) = beta_p_sup(dists, n, p)?;
    Ok((n as f64).powf(-((p as f64) - 2.0) / 2.0) * beta)
}

/// Margins of the three isotropic-constant lower bounds; all must be
/// nonnegative (up to round-off) for any isotropic law.
#[derive(Debug, Clone)]
pub struct IsotropicMargins {
    /// `M^2 sigma^2 - 1/12` (dimension one only).
    pub one_dim: Option<f64>,
    /// `M^{2/d} sigma^2 - (1/(d+2)) omega_d^{-2/d}` (ball equality case).
    pub ball: f64,
    /// `M^{2/d} sigma^2 - 1/(2 pi e)` (dimension-free).
    pub dimension_free: f64,
}

/// Evaluate the isotropic-constant margins for one law.
pub fn check_isotropic_bounds(dist: &DistributionSpec) -> Result<IsotropicMargins> {
    let m = max_density(dist)?;
    let d = dist.dim as f64;
    let iso2 = m.powf(2.0 / d) * dist.sigma2;
    Ok(IsotropicMargins {
        one_dim: (dist.dim == 1).then(|| m * m * dist.sigma2 - 1.0 / 12.0),
        ball: iso2 - ball_volume(dist.dim).powf(-2.0 / d) / (d + 2.0),
        dimension_free: iso2 - 1.0 / (2.0 * PI * std::f64::consts::E),
    })
}

/// The scalar functionals of one experiment's summand list.
#[derive(Debug, Clone)]
pub struct FunctionalReport {
    pub label: String,
    pub dim: usize,
    /// `max_k M(X_k)`.
    pub m_max: f64,
    /// `max_k sigma_k`.
    pub sigma: f64,
    pub beta3: f64,
    pub beta4: f64,
    /// `M^{1/d} sigma` for the worst summand.
    pub isotropic_const: f64,
    pub l3: f64,
    pub l4: f64,
    pub theta_star3: Vec<f64>,
    pub theta_star4: Vec<f64>,
}

/// Assemble the report for `n` summands cycled from `dists`.
pub fn functional_report(dists: &[DistributionSpec], n: usize) -> Result<FunctionalReport> {
    let first = dists
        .first()
        .ok_or_else(|| Error::invalid("dists", "need at least one summand"))?;
    let mut m_max = 0.0f64;
    let mut sigma = 0.0f64;
    for d in dists {
        m_max = m_max.max(max_density(d)?);
        sigma = sigma.max(d.sigma());
    }
    let (beta3, theta_star3) = beta_p_sup(dists, n, 3)?;
    let (beta4, theta_star4) = beta_p_sup(dists, n, 4)?;
    let nf = n as f64;
    Ok(FunctionalReport {
        label: dists
            .iter()
            .map(|d| d.label.as_str())
            .collect::<Vec<_>>()
            .join("+"),
        dim: first.dim,
        m_max,
        sigma,
        beta3,
        beta4,
        isotropic_const: m_max.powf(1.0 / first.dim as f64) * sigma,
        l3: nf.powf(-0.5) * beta3,
        l4: nf.powf(-1.0) * beta4,
        theta_star3,
        theta_star4,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{
        make_asymmetric_family, make_gaussian, make_unbounded_marginal_example, make_uniform_ball,
        make_uniform_interval, product2, symmetrize, unbounded_marginal_isotropic_c,
        AsymmetricKind,
    };

    #[test]
    fn ball_volumes() {
        assert!((ball_volume(1) - 2.0).abs() < 1e-14);
        assert!((ball_volume(2) - PI).abs() < 1e-14);
        assert!((ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn max_density_closed_and_error_paths() {
        let u = make_uniform_interval(1.0).unwrap();
        assert!((max_density(&u).unwrap() - 1.0 / (2.0 * 3f64.sqrt())).abs() < 1e-15);
        let g2 = make_gaussian(2, 1.0).unwrap();
        assert!((max_density(&g2).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-15);

        let um = make_unbounded_marginal_example(unbounded_marginal_isotropic_c()).unwrap();
        // Joint maximum is finite...
        assert!(max_density(&um).unwrap().is_finite());
        // ...but the X1 projection is flagged unbounded.
        match max_density_projection(&um, &[1.0, 0.0]) {
            Err(Error::UnboundedDensity { .. }) => {}
            other => panic!("expected UnboundedDensity, got {other:?}"),
        }
    }

    #[test]
    fn max_density_scan_matches_closed_form_for_symmetrized_uniform() {
        // Self-convolution of uniform[-1,1] peaks at 1/2.
        let u = make_uniform_interval(1.0 / 3f64.sqrt()).unwrap();
        let w = symmetrize(&u);
        let m = max_density(&w).unwrap();
        assert!((m - 0.5).abs() < 1e-7, "m = {m}");
    }

    #[test]
    fn beta3_closed_forms() {
        let u = make_uniform_interval(1.0).unwrap();
        let v = beta_p_directional(std::slice::from_ref(&u), 1, &[1.0], 3).unwrap();
        assert!((v - 3.0 * 3f64.sqrt() / 4.0).abs() < 1e-14);

        let g = make_gaussian(1, 1.0).unwrap();
        let v = beta_p_directional(std::slice::from_ref(&g), 1, &[1.0], 3).unwrap();
        assert!((v - 2.0 * (2.0 / PI).sqrt()).abs() < 1e-14);
        let v4 = beta_p_directional(std::slice::from_ref(&g), 4, &[1.0], 4).unwrap();
        assert!((v4 - 3.0).abs() < 1e-8);

        assert!(matches!(
            beta_p_directional(std::slice::from_ref(&g), 1, &[1.0], 5),
            Err(Error::UnsupportedOrder { p: 5 })
        ));
    }

    #[test]
    fn ball_directional_moment_is_rotation_invariant() {
        let b = make_uniform_ball(2, 1.0).unwrap();
        let list = std::slice::from_ref(&b);
        let v0 = beta_p_directional(list, 1, &[1.0, 0.0], 3).unwrap();
        for ang in [0.3, 1.1, 2.9] {
            let v = beta_p_directional(list, 1, &[f64::cos(ang), f64::sin(ang)], 3).unwrap();
            assert!((v - v0).abs() < 1e-8);
        }
        // Closed form 8 r^3 / (15 pi) with r = 2.
        assert!((v0 - 64.0 / (15.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn beta_sup_matches_directional_for_invariant_families() {
        let b = make_uniform_ball(2, 1.0).unwrap();
        let (sup, _) = beta_p_sup(std::slice::from_ref(&b), 1, 3).unwrap();
        let dir = beta_p_directional(std::slice::from_ref(&b), 1, &[0.6, 0.8], 3).unwrap();
        assert!((sup - dir).abs() < 1e-6);
    }

    #[test]
    fn beta_sup_product_matches_dense_scan() {
        let u = make_uniform_interval(1.0).unwrap();
        let g = make_gaussian(1, 1.0).unwrap();
        let p = product2(u, g).unwrap();
        let list = std::slice::from_ref(&p);
        let (sup, theta) = beta_p_sup(list, 1, 3).unwrap();
        // Dense 4096-direction scan as the oracle.
        let mut dense = f64::NEG_INFINITY;
        for i in 0..4096 {
            let ang = PI * i as f64 / 4096.0;
            let v = beta_p_directional(list, 1, &[ang.cos(), ang.sin()], 3).unwrap();
            dense = dense.max(v);
        }
        assert!(
            (sup - dense).abs() < 1e-5,
            "lattice+ascent {sup} vs dense {dense}"
        );
        assert!((theta[0].powi(2) + theta[1].powi(2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lyapunov_values() {
        let g = make_gaussian(1, 1.0).unwrap();
        let l3 = lyapunov_coefficient(std::slice::from_ref(&g), 4, 3).unwrap();
        assert!((l3 - 0.5 * 2.0 * (2.0 / PI).sqrt()).abs() < 1e-12);
        // n = 1: L_p = beta_p.
        let l4 = lyapunov_coefficient(std::slice::from_ref(&g), 1, 4).unwrap();
        assert!((l4 - 3.0).abs() < 1e-12);
        // L_3 >= n^{-1/2} across the catalog (beta_3 >= 1).
        for n in [1usize, 4, 16] {
            let l = lyapunov_coefficient(std::slice::from_ref(&g), n, 3).unwrap();
            assert!(l >= (n as f64).powf(-0.5) - 1e-12);
        }
    }

    #[test]
    fn isotropic_margins() {
        let u = make_uniform_interval(1.0).unwrap();
        let m = check_isotropic_bounds(&u).unwrap();
        assert!(m.one_dim.unwrap().abs() < 1e-12); // equality case
        assert!(m.dimension_free > 0.0);

        let b = make_uniform_ball(2, 1.0).unwrap();
        let m = check_isotropic_bounds(&b).unwrap();
        assert!(m.ball.abs() < 1e-10); // equality case
        assert!(m.dimension_free > 0.0);

        let g = make_gaussian(1, 1.0).unwrap();
        let m = check_isotropic_bounds(&g).unwrap();
        let expect = 1.0 / (2.0 * PI) - 1.0 / (2.0 * PI * std::f64::consts::E);
        assert!((m.dimension_free - expect).abs() < 1e-12);
    }

    #[test]
    fn functional_report_mixed_list() {
        let u = make_uniform_interval(1.0).unwrap();
        let e = make_asymmetric_family(AsymmetricKind::CenteredExponential, 1.0).unwrap();
        let r = functional_report(&[u, e], 4).unwrap();
        // Mixed beta_3: average of the two closed forms (each appears twice).
        let expect = 0.5 * (3.0 * 3f64.sqrt() / 4.0 + (12.0 / std::f64::consts::E - 2.0));
        assert!((r.beta3 - expect).abs() < 1e-12);
        assert!((r.m_max - 1.0).abs() < 1e-15);
        assert!((r.sigma - 1.0).abs() < 1e-15);
        assert!((r.l3 - expect / 2.0).abs() < 1e-12);
    }

    #[test]
    fn homogeneity_of_max_density() {
        // X/lambda has density lambda^d p(lambda x): scale families realize
        // it via sigma / lambda.
        let lambda = 1.7;
        for d in [1usize, 2] {
            let base = make_uniform_ball(d, 1.0).unwrap();
            let scaled = make_uniform_ball(d, 1.0 / lambda).unwrap();
            let ratio = max_density(&scaled).unwrap() / max_density(&base).unwrap();
            assert!((ratio - lambda.powi(d as i32)).abs() < 1e-8);
        }
    }
}
