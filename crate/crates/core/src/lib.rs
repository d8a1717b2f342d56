//! Numerical laboratory for densities of normalized sums of independent
//! random vectors.
//!
//! The crate computes the density `p_n` of `Z_n = (X_1 + ... + X_n) / sqrt(n)`
//! through characteristic-function products and discrete Fourier inversion,
//! and verifies quantitative inequalities relating the uniform distance
//! `sup |p_n - phi|` to the Lyapunov ratios `beta_3`, `beta_4`, the variance
//! `sigma^2`, and the maximum-of-density functional `M(X)`.
//!
//! Module map:
//!
//! * [`distributions`] — catalog of analytically specified summand laws,
//!   normalized to mean zero and isotropic covariance.
//! * [`grid`] — uniform tensor grids, CF products, Fourier inversion,
//!   sup-distance to the standard normal density.
//! * [`functionals`] — `M`, `sigma`, directional `beta_p`, Lyapunov
//!   coefficients, ball volumes, isotropic-constant margins.
//! * [`cf_analysis`] — separation of `|f(t)|` from 1, density truncation,
//!   symmetrization, `L^{2m}` norms and tail integrals of CF powers.
//! * [`bounds`] — end-to-end inequality verification: subadditivity of the
//!   maximum of density, CF-product normal approximation, the main
//!   sup-distance bounds, and convergence-rate regression.
//! * [`oracle`] — independent brute-force oracles and the frozen fixture
//!   table they regenerate.

pub mod bounds;
pub mod cf_analysis;
pub mod distributions;
pub mod error;
pub mod functionals;
pub mod grid;
pub mod oracle;
pub mod quad;
pub mod special;

pub use error::{Error, Result};

/// Complex scalar used throughout the frequency-domain code.
pub type Complex = num_complex::Complex64;
