//! Catalog of analytically specified distribution families, normalized to
//! mean zero and isotropic covariance `sigma^2 I_d`.
//!
//! Each family carries a closed-form density, a characteristic function
//! (closed-form where one exists, a converged quadrature closure
//! otherwise), and closed-form moments where available. Families cover the
//! equality cases of the isotropic-constant bounds (uniform interval and
//! ball), the fixed point of normal approximation (Gaussian), genuinely
//! asymmetric laws, and a two-dimensional example whose one-dimensional
//! projections have unbounded densities.

use crate::error::{Error, Result};
use crate::quad;
use crate::special;
use crate::Complex;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Shape parameters of one catalog family. The enclosing
/// [`DistributionSpec`] caches the derived metadata.
#[derive(Debug, Clone)]
pub enum Family {
    /// Uniform on `[-a, a]`.
    UniformInterval { half_width: f64 },
    /// Uniform on the centered Euclidean ball of the given radius.
    UniformBall { dim: usize, radius: f64 },
    /// Isotropic normal law.
    Gaussian { dim: usize, sigma: f64 },
    /// `scale * (E - 1)` with `E` standard exponential; support `[-scale, inf)`.
    CenteredExponential { scale: f64 },
    /// Decreasing triangular density on `[-s, 2s]`; mean zero, skewed.
    SkewedTriangle { s: f64 },
    /// Uniform on the region `|x1| <= exp(-c |x2|)`; the `X1` marginal is
    /// unbounded near zero.
    UnboundedMarginal { c: f64 },
    /// Product of two independent one-dimensional laws with equal variance.
    Product2 {
        a: Box<DistributionSpec>,
        b: Box<DistributionSpec>,
    },
    /// Law of `X - X'` for an independent copy `X'`.
    Symmetrized { base: Box<DistributionSpec> },
}

/// Asymmetric catalog entries for [`make_asymmetric_family`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymmetricKind {
    CenteredExponential,
    SkewedTriangle,
}

/// Provenance of characteristic-function values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfKind {
    /// Closed-form expression evaluated pointwise.
    ClosedForm,
    /// Converged one-dimensional quadrature of an exact reduction.
    Quadrature,
}

/// An analytic description of one summand's law.
#[derive(Debug, Clone)]
pub struct DistributionSpec {
    pub family: Family,
    pub label: String,
    pub dim: usize,
    /// Per-coordinate variance (covariance matrix is `sigma2 * I_d`).
    pub sigma2: f64,
    /// Law of `X` equals law of `-X`.
    pub symmetric: bool,
    /// `E <theta, X>^3 = 0` for every direction.
    pub third_moments_vanish: bool,
    /// Radius `R` with `P(|X| <= R) = 1`, when the support is bounded.
    pub support_radius: Option<f64>,
    pub max_density_closed_form: Option<f64>,
    pub log_concave: bool,
    /// One-dimensional projections have unbounded densities.
    pub projections_unbounded: bool,
}

impl DistributionSpec {
    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    /// Density at `x`. Jump points use the mid-value convention so that
    /// sampled transforms match the continuous Fourier integral.
    pub fn density(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        match &self.family {
            Family::UniformInterval { half_width: a } => {
                let level = 1.0 / (2.0 * a);
                jump_indicator(x[0].abs(), *a) * level
            }
            Family::UniformBall { dim, radius } => {
                let level = 1.0 / (ball_volume_closed(*dim) * radius.powi(*dim as i32));
                jump_indicator(norm(x), *radius) * level
            }
            Family::Gaussian { dim, sigma } => {
                let q: f64 = x.iter().map(|v| v * v).sum();
                (2.0 * PI * sigma * sigma).powf(-(*dim as f64) / 2.0)
                    * (-q / (2.0 * sigma * sigma)).exp()
            }
            Family::CenteredExponential { scale } => {
                let u = x[0] / scale;
                if u < -1.0 {
                    0.0
                } else if u == -1.0 {
                    0.5 / scale
                } else {
                    (-(u + 1.0)).exp() / scale
                }
            }
            Family::SkewedTriangle { s } => {
                let amp = 2.0 / (9.0 * s * s);
                let v = x[0];
                if v < -s || v > 2.0 * s {
                    0.0
                } else if v == -s {
                    0.5 * amp * 3.0 * s
                } else {
                    amp * (2.0 * s - v)
                }
            }
            Family::UnboundedMarginal { c } => {
                let w = (-c * x[1].abs()).exp();
                jump_indicator(x[0].abs(), w) * c / 4.0
            }
            Family::Product2 { a, b } => a.density(&x[..1]) * b.density(&x[1..]),
            Family::Symmetrized { base } => symmetrized_density(base, x),
        }
    }

    /// Characteristic function `E exp(i <t, X>)`.
    pub fn cf(&self, t: &[f64]) -> Complex {
        debug_assert_eq!(t.len(), self.dim);
        match &self.family {
            Family::UniformInterval { half_width: a } => {
                Complex::new(special::sinc(a * t[0]), 0.0)
            }
            Family::UniformBall { dim, radius } => {
                let rho = radius * norm(t);
                Complex::new(ball_cf_profile(*dim, rho), 0.0)
            }
            Family::Gaussian { sigma, .. } => {
                let q: f64 = t.iter().map(|v| v * v).sum();
                Complex::new((-0.5 * sigma * sigma * q).exp(), 0.0)
            }
            Family::CenteredExponential { scale } => {
                let st = scale * t[0];
                if st.abs() < 1e-5 {
                    // Moment series: E X^k for X = scale (E - 1).
                    // m2 = s^2, m3 = 2 s^3, m4 = 9 s^4, m5 = 44 s^5, m6 = 265 s^6.
                    let it = Complex::new(0.0, st);
                    let mut acc = Complex::new(1.0, 0.0);
                    let central = [1.0, 2.0, 9.0, 44.0, 265.0];
                    let mut pow = it * it;
                    let mut fact = 2.0;
                    for (k, m) in central.iter().enumerate() {
                        acc += pow * *m / fact;
                        pow *= it;
                        fact *= (k + 3) as f64;
                    }
                    acc
                } else {
                    Complex::new(0.0, -st).exp() / Complex::new(1.0, -st)
                }
            }
            Family::SkewedTriangle { s } => skewed_triangle_cf(*s, t[0]),
            Family::UnboundedMarginal { c } => {
                Complex::new(unbounded_marginal_cf(*c, t[0], t[1]), 0.0)
            }
            Family::Product2 { a, b } => a.cf(&t[..1]) * b.cf(&t[1..]),
            Family::Symmetrized { base } => {
                let f = base.cf(t);
                Complex::new(f.norm_sqr(), 0.0)
            }
        }
    }

    pub fn cf_abs(&self, t: &[f64]) -> f64 {
        self.cf(t).norm()
    }

    pub fn cf_kind(&self) -> CfKind {
        match &self.family {
            Family::UnboundedMarginal { .. } => CfKind::Quadrature,
            Family::Product2 { a, b } => {
                if a.cf_kind() == CfKind::ClosedForm && b.cf_kind() == CfKind::ClosedForm {
                    CfKind::ClosedForm
                } else {
                    CfKind::Quadrature
                }
            }
            Family::Symmetrized { base } => base.cf_kind(),
            _ => CfKind::ClosedForm,
        }
    }

    /// `|f|` depends on `|t|` only.
    pub fn rotation_invariant(&self) -> bool {
        matches!(
            &self.family,
            Family::UniformBall { .. } | Family::Gaussian { .. }
        ) || (self.dim == 1 && self.symmetric)
    }

    /// Closed-form `E |<theta, X>|^p` when the value does not depend on the
    /// direction (rotation-invariant laws and dimension one).
    pub fn proj_abs_moment_closed(&self, p: u32) -> Option<f64> {
        let s2 = self.sigma2;
        match &self.family {
            Family::UniformInterval { half_width: a } => Some(a.powi(p as i32) / (p as f64 + 1.0)),
            Family::Gaussian { sigma, .. } => Some(match p {
                2 => sigma * sigma,
                3 => 2.0 * (2.0 / PI).sqrt() * sigma.powi(3),
                4 => 3.0 * sigma.powi(4),
                _ => return None,
            }),
            Family::UniformBall { dim, radius } => {
                let r = *radius;
                Some(match (dim, p) {
                    (1, _) => r.powi(p as i32) / (p as f64 + 1.0),
                    (2, 2) => r * r / 4.0,
                    (2, 3) => 8.0 * r.powi(3) / (15.0 * PI),
                    (2, 4) => r.powi(4) / 8.0,
                    (3, 2) => r * r / 5.0,
                    (3, 3) => r.powi(3) / 8.0,
                    (3, 4) => 3.0 * r.powi(4) / 35.0,
                    _ => return None,
                })
            }
            Family::CenteredExponential { scale } => Some(match p {
                2 => s2,
                3 => (12.0 / std::f64::consts::E - 2.0) * scale.powi(3),
                4 => 9.0 * scale.powi(4),
                _ => return None,
            }),
            Family::SkewedTriangle { s } => Some(match p {
                2 => s2,
                3 => 23.0 * s.powi(3) / 45.0,
                4 => 3.0 * s.powi(4) / 5.0,
                _ => return None,
            }),
            _ => None,
        }
    }

    /// Signed third moment `E X^3` (dimension one), closed form.
    pub fn third_moment_signed(&self) -> Option<f64> {
        match &self.family {
            Family::UniformInterval { .. } => Some(0.0),
            Family::Gaussian { dim: 1, .. } => Some(0.0),
            Family::CenteredExponential { scale } => Some(2.0 * scale.powi(3)),
            Family::SkewedTriangle { s } => Some(s.powi(3) / 5.0),
            _ => None,
        }
    }

    /// Closed-form `int p^2` where available.
    pub fn l2_closed_form(&self) -> Option<f64> {
        match &self.family {
            Family::UniformInterval { half_width: a } => Some(1.0 / (2.0 * a)),
            Family::UniformBall { .. } => self.max_density_closed_form,
            Family::Gaussian { dim, sigma } => {
                Some((4.0 * PI * sigma * sigma).powf(-(*dim as f64) / 2.0))
            }
            Family::CenteredExponential { scale } => Some(0.5 / scale),
            Family::SkewedTriangle { s } => Some(4.0 / (9.0 * s)),
            Family::UnboundedMarginal { c } => Some(c / 4.0),
            Family::Product2 { a, b } => Some(a.l2_closed_form()? * b.l2_closed_form()?),
            Family::Symmetrized { .. } => None,
        }
    }

    /// Decay exponent `gamma` with `|f(t)| ~ |t|^{-gamma}` at large
    /// frequencies, used to size quadrature windows. `None` when the CF
    /// decays faster than any power.
    pub fn cf_decay_exponent(&self) -> Option<f64> {
        match &self.family {
            Family::UniformInterval { .. } => Some(1.0),
            Family::UniformBall { dim, .. } => Some((*dim as f64 + 1.0) / 2.0),
            Family::Gaussian { .. } => None,
            Family::CenteredExponential { .. } => Some(1.0),
            Family::SkewedTriangle { .. } => Some(1.0),
            Family::UnboundedMarginal { .. } => Some(1.0),
            Family::Product2 { a, b } => Some(
                a.cf_decay_exponent()
                    .unwrap_or(f64::INFINITY)
                    .min(b.cf_decay_exponent().unwrap_or(f64::INFINITY)),
            ),
            Family::Symmetrized { base } => base.cf_decay_exponent().map(|g| 2.0 * g),
        }
    }

    /// Characteristic oscillation scale of the CF (roughly the support
    /// radius); quadrature panels must resolve it.
    pub fn cf_osc_scale(&self) -> f64 {
        self.support_radius
            .unwrap_or_else(|| self.numerical_support().min(8.0 * self.sigma()).max(1.0))
    }

    /// Radius beyond which the density is negligible for quadrature and
    /// grid sizing (exact for compact supports).
    pub fn numerical_support(&self) -> f64 {
        match &self.family {
            Family::Gaussian { sigma, .. } => 12.0 * sigma,
            Family::CenteredExponential { scale } => 45.0 * scale,
            Family::UnboundedMarginal { c } => (45.0 / c).max(1.5),
            Family::Product2 { a, b } => {
                (a.numerical_support().powi(2) + b.numerical_support().powi(2)).sqrt()
            }
            Family::Symmetrized { base } => 2.0 * base.numerical_support(),
            _ => self.support_radius.unwrap_or(12.0 * self.sigma()),
        }
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Indicator of `value < edge` with the mid-value convention at the jump.
fn jump_indicator(value: f64, edge: f64) -> f64 {
    if value < edge {
        1.0
    } else if value == edge {
        0.5
    } else {
        0.0
    }
}

fn ball_cf_profile(dim: usize, rho: f64) -> f64 {
    match dim {
        1 => special::sinc(rho),
        2 => special::disk_cf_profile(rho),
        3 => special::ball3_cf_profile(rho),
        _ => unreachable!("ball dimension validated at construction"),
    }
}

/// CF of the decreasing triangle on `[-s, 2s]` with density
/// `A (2s - x)`, `A = 2 / (9 s^2)`. Integration by parts for moderate
/// arguments, a moment series near zero.
fn skewed_triangle_cf(s: f64, t: f64) -> Complex {
    let st = s * t;
    if st.abs() < 0.05 {
        // Raw moments m_k = (2 s^k / 9) [ 2 (2^{k+1} - (-1)^{k+1})/(k+1)
        //                                 - (2^{k+2} - (-1)^{k+2})/(k+2) ].
        let mut acc = Complex::new(0.0, 0.0);
        let it = Complex::new(0.0, t);
        let mut pow = Complex::new(1.0, 0.0);
        let mut fact = 1.0;
        for k in 0..=12u32 {
            let kf = k as f64;
            let sign_k1 = if (k + 1) % 2 == 0 { 1.0 } else { -1.0 };
            let sign_k2 = if (k + 2) % 2 == 0 { 1.0 } else { -1.0 };
            let m = 2.0 * s.powi(k as i32) / 9.0
                * (2.0 * (2f64.powi(k as i32 + 1) - sign_k1) / (kf + 1.0)
                    - (2f64.powi(k as i32 + 2) - sign_k2) / (kf + 2.0));
            acc += pow * m / fact;
            pow *= it;
            fact *= kf + 1.0;
        }
        acc
    } else {
        let amp = 2.0 / (9.0 * s * s);
        let e_minus = Complex::new(0.0, -st).exp();
        let e_plus2 = Complex::new(0.0, 2.0 * st).exp();
        let i = Complex::new(0.0, 1.0);
        amp * (3.0 * s * i * e_minus / t - (e_plus2 - e_minus) / (t * t))
    }
}

/// CF of the uniform law on `|x1| <= exp(-c |x2|)`:
/// `f(t) = c * int_0^inf cos(t2 u) e^{-cu} sinc(t1 e^{-cu}) du`
/// (real by symmetry). The integrand decays like `e^{-cu}`, and the
/// cosine oscillation is resolved by panel refinement.
fn unbounded_marginal_cf(c: f64, t1: f64, t2: f64) -> f64 {
    let upper = 42.0 / c;
    let g = move |u: f64| {
        let w = (-c * u).exp();
        (t2 * u).cos() * w * special::sinc(t1 * w)
    };
    let panels = ((upper * (t2.abs() + c) / 3.0).ceil() as usize).clamp(8, 4096);
    c * quad::composite_gl(&g, 0.0, upper, panels)
}

/// Self-convolution density `w(x) = int p(x + y) p(y) dy` for the
/// symmetrized law, by quadrature (Gaussian bases reduce in closed form
/// before reaching this point).
fn symmetrized_density(base: &DistributionSpec, x: &[f64]) -> f64 {
    // Restrict to the overlap of the two support boxes so the quadrature
    // seeds always land inside the integrand's support. The bounds are
    // nudged inward so support-edge jumps (sampled at mid-value) never
    // coincide with a quadrature endpoint.
    let b = base.numerical_support();
    let overlap = |shift: f64| {
        let lo = (-b).max(-b - shift);
        let hi = b.min(b - shift);
        let nudge = 1e-12 * (hi - lo).abs();
        (lo + nudge, hi - nudge)
    };
    match base.dim {
        1 => {
            let (lo, hi) = overlap(x[0]);
            if hi <= lo {
                return 0.0;
            }
            let x0 = x[0];
            quad::adaptive_simpson(
                &|y: f64| base.density(&[x0 + y]) * base.density(&[y]),
                lo,
                hi,
                1e-11,
            )
        }
        2 => {
            let (lo0, hi0) = overlap(x[0]);
            let (lo1, hi1) = overlap(x[1]);
            if hi0 <= lo0 || hi1 <= lo1 {
                return 0.0;
            }
            let (x0, x1) = (x[0], x[1]);
            quad::tensor_gl_2d(
                &|y0: f64, y1: f64| base.density(&[x0 + y0, x1 + y1]) * base.density(&[y0, y1]),
                [(lo0, hi0), (lo1, hi1)],
                128,
            )
        }
        d => unimplemented!("symmetrized density in dimension {d}"),
    }
}

/// Marginal density of `X1` for the unbounded-marginal example:
/// `(1/2) log(1/|x1|)` on `(-1, 1)`, independent of `c`.
pub fn unbounded_marginal_x1_density(x1: f64) -> f64 {
    if x1.abs() >= 1.0 || x1 == 0.0 {
        0.0
    } else {
        0.5 * (1.0 / x1.abs()).ln()
    }
}

/// Uniform law on `[-a, a]` with `a = sigma * sqrt(3)`.
pub fn make_uniform_interval(sigma: f64) -> Result<DistributionSpec> {
    if !(sigma > 0.0) {
        return Err(Error::invalid("sigma", format!("must be > 0, got {sigma}")));
    }
    let a = sigma * 3f64.sqrt();
    Ok(DistributionSpec {
        family: Family::UniformInterval { half_width: a },
        label: format!("uniform(sigma={sigma})"),
        dim: 1,
        sigma2: sigma * sigma,
        symmetric: true,
        third_moments_vanish: true,
        support_radius: Some(a),
        max_density_closed_form: Some(1.0 / (2.0 * a)),
        log_concave: true,
        projections_unbounded: false,
    })
}

/// Uniform law on the centered ball with per-coordinate variance
/// `sigma^2`; the radius solves `E X_1^2 = r^2 / (d + 2)`.
pub fn make_uniform_ball(dim: usize, sigma: f64) -> Result<DistributionSpec> {
    if !(1..=3).contains(&dim) {
        return Err(Error::UnsupportedDimension {
            dim,
            supported: "1..=3",
        });
    }
    if !(sigma > 0.0) {
        return Err(Error::invalid("sigma", format!("must be > 0, got {sigma}")));
    }
    let r = sigma * ((dim + 2) as f64).sqrt();
    let omega = ball_volume_closed(dim);
    Ok(DistributionSpec {
        family: Family::UniformBall { dim, radius: r },
        label: format!("ball(d={dim},sigma={sigma})"),
        dim,
        sigma2: sigma * sigma,
        symmetric: true,
        third_moments_vanish: true,
        support_radius: Some(r),
        max_density_closed_form: Some(1.0 / (omega * r.powi(dim as i32))),
        log_concave: true,
        projections_unbounded: false,
    })
}

/// Isotropic Gaussian.
pub fn make_gaussian(dim: usize, sigma: f64) -> Result<DistributionSpec> {
    if dim == 0 {
        return Err(Error::UnsupportedDimension {
            dim,
            supported: "1..=3",
        });
    }
    if dim > 3 {
        return Err(Error::UnsupportedDimension {
            dim,
            supported: "1..=3",
        });
    }
    if !(sigma > 0.0) {
        return Err(Error::invalid("sigma", format!("must be > 0, got {sigma}")));
    }
    Ok(DistributionSpec {
        family: Family::Gaussian { dim, sigma },
        label: format!("gaussian(d={dim},sigma={sigma})"),
        dim,
        sigma2: sigma * sigma,
        symmetric: true,
        third_moments_vanish: true,
        support_radius: None,
        max_density_closed_form: Some((2.0 * PI * sigma * sigma).powf(-(dim as f64) / 2.0)),
        log_concave: true,
        projections_unbounded: false,
    })
}

/// Mean-zero asymmetric families with known maximum of density.
pub fn make_asymmetric_family(kind: AsymmetricKind, sigma: f64) -> Result<DistributionSpec> {
    if !(sigma > 0.0) {
        return Err(Error::invalid("sigma", format!("must be > 0, got {sigma}")));
    }
    match kind {
        AsymmetricKind::CenteredExponential => Ok(DistributionSpec {
            family: Family::CenteredExponential { scale: sigma },
            label: format!("centered-exponential(sigma={sigma})"),
            dim: 1,
            sigma2: sigma * sigma,
            symmetric: false,
            third_moments_vanish: false,
            support_radius: None,
            max_density_closed_form: Some(1.0 / sigma),
            log_concave: true,
            projections_unbounded: false,
        }),
        AsymmetricKind::SkewedTriangle => {
            let s = sigma * 2f64.sqrt();
            Ok(DistributionSpec {
                family: Family::SkewedTriangle { s },
                label: format!("skewed-triangle(sigma={sigma})"),
                dim: 1,
                sigma2: sigma * sigma,
                symmetric: false,
                third_moments_vanish: false,
                support_radius: Some(2.0 * s),
                max_density_closed_form: Some(2.0 / (3.0 * s)),
                log_concave: true,
                projections_unbounded: false,
            })
        }
    }
}

/// The shape constant making the unbounded-marginal example isotropic,
/// found by bisection on `E X1^2 - E X2^2` with both moments evaluated by
/// quadrature over slice reductions.
pub fn unbounded_marginal_isotropic_c() -> f64 {
    static CACHE: OnceLock<f64> = OnceLock::new();
    *CACHE.get_or_init(|| {
        let imbalance = |c: f64| {
            // E X1^2 = (c/4) int 2 w(u)^3 / 3 du,  E X2^2 = (c/4) int 2 u^2 w(u) du,
            // w(u) = exp(-c u), integrals over u >= 0 doubled by symmetry.
            let upper = 60.0 / c;
            let ex1 = quad::adaptive_simpson(
                &|u: f64| (c / 4.0) * 4.0 / 3.0 * (-3.0 * c * u).exp(),
                0.0,
                upper,
                1e-13,
            );
            let ex2 = quad::adaptive_simpson(
                &|u: f64| (c / 4.0) * 4.0 * u * u * (-c * u).exp(),
                0.0,
                upper,
                1e-13,
            );
            ex1 - ex2
        };
        let mut lo = 1.0;
        let mut hi = 10.0;
        // imbalance is increasing in c (EX2^2 = 2/c^2 falls, EX1^2 stays 1/9).
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if imbalance(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    })
}

/// Uniform law on `|x1| <= exp(-c |x2|)`. The constructor checks that the
/// supplied `c` actually makes the law isotropic.
pub fn make_unbounded_marginal_example(c: f64) -> Result<DistributionSpec> {
    if !(c > 0.0) {
        return Err(Error::invalid("c", format!("must be > 0, got {c}")));
    }
    let ex1 = 1.0 / 9.0; // int x^2 (1/2) log(1/|x|) dx over (-1, 1)
    let ex2 = 2.0 / (c * c);
    if (ex1 - ex2).abs() > 1e-6 {
        return Err(Error::invalid(
            "c",
            format!(
                "law is not isotropic at c={c}: E X1^2 = {ex1:.9}, E X2^2 = {ex2:.9}; \
                 use unbounded_marginal_isotropic_c()"
            ),
        ));
    }
    Ok(DistributionSpec {
        family: Family::UnboundedMarginal { c },
        label: format!("unbounded-marginal(c={c:.6})"),
        dim: 2,
        sigma2: ex1,
        symmetric: true,
        third_moments_vanish: true,
        support_radius: None,
        max_density_closed_form: Some(c / 4.0),
        log_concave: false,
        projections_unbounded: true,
    })
}

/// Product of two independent one-dimensional laws with equal variance
/// (keeps the joint law isotropic without rotation invariance).
pub fn product2(a: DistributionSpec, b: DistributionSpec) -> Result<DistributionSpec> {
    if a.dim != 1 || b.dim != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: a.dim.max(b.dim),
        });
    }
    if (a.sigma2 - b.sigma2).abs() > 1e-12 * a.sigma2.max(b.sigma2) {
        return Err(Error::invalid(
            "sigma",
            "component variances must match for isotropy",
        ));
    }
    let support = match (a.support_radius, b.support_radius) {
        (Some(ra), Some(rb)) => Some((ra * ra + rb * rb).sqrt()),
        _ => None,
    };
    let max_density = match (a.max_density_closed_form, b.max_density_closed_form) {
        (Some(ma), Some(mb)) => Some(ma * mb),
        _ => None,
    };
    Ok(DistributionSpec {
        label: format!("product({} x {})", a.label, b.label),
        dim: 2,
        sigma2: a.sigma2,
        symmetric: a.symmetric && b.symmetric,
        third_moments_vanish: a.third_moments_vanish && b.third_moments_vanish,
        support_radius: support,
        max_density_closed_form: max_density,
        log_concave: a.log_concave && b.log_concave,
        projections_unbounded: false,
        family: Family::Product2 {
            a: Box::new(a),
            b: Box::new(b),
        },
    })
}

fn ball_volume_closed(dim: usize) -> f64 {
    PI.powf(dim as f64 / 2.0) / special::gamma(dim as f64 / 2.0 + 1.0)
}

/// String-keyed access to the catalog, as referenced by experiment
/// configurations.
pub struct FamilyCatalog;

impl FamilyCatalog {
    pub fn ids() -> &'static [&'static str] {
        &[
            "uniform",
            "ball",
            "gaussian",
            "centered-exponential",
            "skewed-triangle",
            "unbounded-marginal",
        ]
    }

    pub fn describe(id: &str) -> Option<&'static str> {
        Some(match id {
            "uniform" => "uniform on [-sigma*sqrt(3), sigma*sqrt(3)] (d = 1, symmetric)",
            "ball" => "uniform on the centered ball with per-coordinate variance sigma^2 (d <= 3)",
            "gaussian" => "isotropic normal law (d <= 3)",
            "centered-exponential" => "sigma*(E - 1), E standard exponential (d = 1, skewed)",
            "skewed-triangle" => "decreasing triangle on [-s, 2s], s = sigma*sqrt(2) (d = 1, skewed)",
            "unbounded-marginal" => {
                "uniform on |x1| <= exp(-c|x2|) with the isotropy-calibrated c (d = 2)"
            }
            _ => return None,
        })
    }

    /// Build a catalog entry. `dim` is ignored by families of fixed
    /// dimension; `sigma` is ignored by the unbounded-marginal example
    /// (its scale is pinned by the isotropy constraint).
    pub fn build(id: &str, dim: usize, sigma: f64) -> Result<DistributionSpec> {
        match id {
            "uniform" => {
                if dim != 1 {
                    return Err(Error::UnsupportedDimension { dim, supported: "1" });
                }
                make_uniform_interval(sigma)
            }
            "ball" => make_uniform_ball(dim, sigma),
            "gaussian" => make_gaussian(dim, sigma),
            "centered-exponential" => {
                make_asymmetric_family(AsymmetricKind::CenteredExponential, sigma)
            }
            "skewed-triangle" => make_asymmetric_family(AsymmetricKind::SkewedTriangle, sigma),
            "unbounded-marginal" => {
                make_unbounded_marginal_example(unbounded_marginal_isotropic_c())
            }
            other => Err(Error::invalid("family", format!("unknown family id `{other}`"))),
        }
    }
}

/// Symmetrization `X - X'`. Gaussian bases stay Gaussian; everything else
/// carries a quadrature density and the squared-modulus CF.
pub fn symmetrize(dist: &DistributionSpec) -> DistributionSpec {
    if let Family::Gaussian { dim, sigma } = &dist.family {
        let mut g = make_gaussian(*dim, sigma * 2f64.sqrt()).expect("valid parameters");
        g.label = format!("symmetrized({})", dist.label);
        return g;
    }
    DistributionSpec {
        label: format!("symmetrized({})", dist.label),
        dim: dist.dim,
        sigma2: 2.0 * dist.sigma2,
        symmetric: true,
        third_moments_vanish: true,
        support_radius: dist.support_radius.map(|r| 2.0 * r),
        max_density_closed_form: None,
        log_concave: dist.log_concave,
        projections_unbounded: dist.projections_unbounded,
        family: Family::Symmetrized {
            base: Box::new(dist.clone()),
        },
    }
}
