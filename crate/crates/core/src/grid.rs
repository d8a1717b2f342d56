//! Uniform tensor grids and the discrete Fourier machinery connecting
//! densities to characteristic functions.
//!
//! Conventions: `f(t) = int exp(i <t, x>) p(x) dx` and
//! `p(x) = (2 pi)^{-d} int exp(-i <t, x>) f(t) dt`. A grid couples the
//! spatial box `[-L, L]^d` sampled at `N` points per axis (step
//! `h = 2L/N`) with the frequency box of step `pi / L` and half-width
//! `T_max = pi N / (2 L)`. On that pairing the centered DFT reproduces
//! both integrals up to aliasing, with no residual phase factors once
//! `N` is a multiple of four.

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::Complex;
use rustfft::FftPlanner;
use std::f64::consts::PI;
use std::io::{Read, Write};

/// Default ceiling for the estimated sup-norm error induced by the
/// neglected CF tail outside the frequency window.
pub const DEFAULT_TAIL_TOL: f64 = 1e-6;

/// Geometry of one uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    dim: usize,
    half_width: f64,
    points_per_axis: usize,
}

impl GridSpec {
    pub fn new(dim: usize, half_width: f64, points_per_axis: usize) -> Result<Self> {
        if dim == 0 || dim > 3 {
            return Err(Error::UnsupportedDimension {
                dim,
                supported: "1..=3",
            });
        }
        if !(half_width > 0.0) {
            return Err(Error::invalid(
                "half_width",
                format!("must be > 0, got {half_width}"),
            ));
        }
        if points_per_axis < 64 || !points_per_axis.is_power_of_two() {
            return Err(Error::invalid(
                "points_per_axis",
                format!("must be a power of two >= 64, got {points_per_axis}"),
            ));
        }
        let spec = GridSpec {
            dim,
            half_width,
            points_per_axis,
        };
        spec.check_budget()?;
        Ok(spec)
    }

    /// As [`GridSpec::new`], additionally requiring the frequency window to
    /// cover `min_window`.
    pub fn with_window(
        dim: usize,
        half_width: f64,
        points_per_axis: usize,
        min_window: f64,
    ) -> Result<Self> {
        let spec = Self::new(dim, half_width, points_per_axis)?;
        if spec.t_max() < min_window {
            return Err(Error::WindowTooSmall {
                context: format!(
                    "frequency window {:.3e} below the requested {:.3e} (raise N or shrink L)",
                    spec.t_max(),
                    min_window
                ),
            });
        }
        Ok(spec)
    }

    fn check_budget(&self) -> Result<()> {
        // Complex grid plus one scratch copy.
        let requested = (self.len() as u64) * 16 * 2;
        let cap = std::env::var("LLT_LAB_MAX_GRID_BYTES")
            .ok()
            .and_then(|v| v.parse::<u64>().ok())
            .unwrap_or(4 << 30);
        if requested > cap {
            return Err(Error::GridBudget { requested, cap });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    /// Spatial step `h = 2L / N`.
    pub fn step(&self) -> f64 {
        2.0 * self.half_width / self.points_per_axis as f64
    }

    /// Frequency step `pi / L`.
    pub fn freq_step(&self) -> f64 {
        PI / self.half_width
    }

    /// Frequency half-width `pi N / (2 L)`.
    pub fn t_max(&self) -> f64 {
        PI * self.points_per_axis as f64 / (2.0 * self.half_width)
    }

    /// Total number of grid points `N^d`.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Spatial coordinate along one axis.
    pub fn x_at(&self, index: usize) -> f64 {
        (index as f64 - self.points_per_axis as f64 / 2.0) * self.step()
    }

    /// Frequency coordinate along one axis.
    pub fn t_at(&self, index: usize) -> f64 {
        (index as f64 - self.points_per_axis as f64 / 2.0) * self.freq_step()
    }

    /// Decompose a flat row-major index into per-axis indices.
    pub fn unravel(&self, mut flat: usize) -> [usize; 3] {
        let n = self.points_per_axis;
        let mut idx = [0usize; 3];
        for axis in (0..self.dim).rev() {
            idx[axis] = flat % n;
            flat /= n;
        }
        idx
    }

    /// Spatial point for a flat index (first `dim` entries meaningful).
    pub fn x_point(&self, flat: usize) -> [f64; 3] {
        let idx = self.unravel(flat);
        let mut out = [0.0; 3];
        for axis in 0..self.dim {
            out[axis] = self.x_at(idx[axis]);
        }
        out
    }

    /// Frequency point for a flat index.
    pub fn t_point(&self, flat: usize) -> [f64; 3] {
        let idx = self.unravel(flat);
        let mut out = [0.0; 3];
        for axis in 0..self.dim {
            out[axis] = self.t_at(idx[axis]);
        }
        out
    }

    fn center_flat(&self) -> usize {
        let n = self.points_per_axis;
        let mut flat = 0;
        for _ in 0..self.dim {
            flat = flat * n + n / 2;
        }
        flat
    }
}

/// Provenance of CF values on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfSource {
    Analytic,
    Transformed,
}

/// Sampled complex CF values on the frequency grid of `spec`.
#[derive(Debug, Clone)]
pub struct CharFnGrid {
    pub spec: GridSpec,
    pub values: Vec<Complex>,
    pub source: CfSource,
}

impl CharFnGrid {
    /// Wrap values, enforcing `f(0) = 1` and Hermitian symmetry within
    /// 1e-10.
    pub fn new(spec: GridSpec, values: Vec<Complex>, source: CfSource) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::invalid("values", "length does not match grid"));
        }
        let at_zero = values[spec.center_flat()];
        if (at_zero - Complex::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::Numeric(format!(
                "CF value at t = 0 is {at_zero} (must be 1 within 1e-10)"
            )));
        }
        let grid = CharFnGrid {
            spec,
            values,
            source,
        };
        let herm = grid.hermitian_defect();
        if herm > 1e-10 {
            return Err(Error::Numeric(format!(
                "CF grid breaks Hermitian symmetry by {herm:.3e}"
            )));
        }
        Ok(grid)
    }

    /// Largest deviation `|f(t) - conj(f(-t))|` over mirrored index pairs
    /// (Nyquist rows have no mirror and are skipped).
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.spec.points_per_axis;
        let mut worst = 0.0f64;
        for flat in 0..self.spec.len() {
            let idx = self.spec.unravel(flat);
            if idx[..self.spec.dim].iter().any(|&i| i == 0) {
                continue;
            }
            let mut mirror = 0usize;
            for axis in 0..self.spec.dim {
                mirror = mirror * n + (n - idx[axis]);
            }
            let d = (self.values[flat] - self.values[mirror].conj()).norm();
            worst = worst.max(d);
        }
        worst
    }

    /// `|f|` at the flat index.
    pub fn abs_at(&self, flat: usize) -> f64 {
        self.values[flat].norm()
    }
}

/// Sampled density values on the spatial grid of `spec`.
#[derive(Debug, Clone)]
pub struct DensityGrid {
    pub spec: GridSpec,
    pub values: Vec<f64>,
    /// `|1 - h^d sum values|`.
    pub mass_defect: f64,
    /// Most negative sampled value (inversion ringing), `<= 0`.
    pub min_value: f64,
}

impl DensityGrid {
    pub fn from_values(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::invalid("values", "length does not match grid"));
        }
        let cell = spec.step().powi(spec.dim() as i32);
        let mass: f64 = values.iter().sum::<f64>() * cell;
        let min_value = values.iter().copied().fold(f64::INFINITY, f64::min).min(0.0);
        Ok(DensityGrid {
            spec,
            values,
            mass_defect: (1.0 - mass).abs(),
            min_value,
        })
    }

    /// Values with negative ringing clamped to zero (for reports only;
    /// Plancherel and mass bookkeeping use the raw values).
    pub fn clamped_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.max(0.0)).collect()
    }

    /// `int p^2` by the grid sum.
    pub fn l2_norm_sq(&self) -> f64 {
        let cell = self.spec.step().powi(self.spec.dim() as i32);
        self.values.iter().map(|v| v * v).sum::<f64>() * cell
    }
}

/// Standard normal density in dimension `d`.
pub fn std_normal_density(d: usize, x: &[f64]) -> f64 {
    let q: f64 = x[..d].iter().map(|v| v * v).sum();
    (2.0 * PI).powf(-(d as f64) / 2.0) * (-0.5 * q).exp()
}

enum TransformDir {
    SpaceToFreq,
    FreqToSpace,
}

/// Centered DFT along every axis. Forward approximates
/// `int exp(i t x) s(x) dx`, inverse approximates
/// `(2 pi)^{-d} int exp(-i t x) F(t) dt`, both on the grid coordinates.
fn centered_transform(values: &mut [Complex], spec: &GridSpec, dir: TransformDir) {
    let n = spec.points_per_axis();
    let mut planner = FftPlanner::<f64>::new();
    let fft = match dir {
        TransformDir::SpaceToFreq => planner.plan_fft_inverse(n),
        TransformDir::FreqToSpace => planner.plan_fft_forward(n),
    };
    let scale = match dir {
        TransformDir::SpaceToFreq => spec.step(),
        TransformDir::FreqToSpace => 1.0 / (n as f64 * spec.step()),
    };
    let total = spec.len();
    let mut line = vec![Complex::new(0.0, 0.0); n];
    for axis in 0..spec.dim() {
        let stride = n.pow((spec.dim() - 1 - axis) as u32);
        let lines = total / n;
        for l in 0..lines {
            let base = (l / stride) * stride * n + (l % stride);
            for (j, slot) in line.iter_mut().enumerate() {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                *slot = values[base + j * stride] * sign;
            }
            fft.process(&mut line);
            for (k, v) in line.iter().enumerate() {
                let sign = if k % 2 == 0 { scale } else { -scale };
                values[base + k * stride] = v * sign;
            }
        }
    }
}

/// CF of `dist` on the frequency grid, evaluated from its analytic
/// (or quadrature-backed) expression.
pub fn cf_on_grid(dist: &DistributionSpec, spec: &GridSpec) -> Result<CharFnGrid> {
    if dist.dim != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: dist.dim,
        });
    }
    let mut values = Vec::with_capacity(spec.len());
    for flat in 0..spec.len() {
        let t = spec.t_point(flat);
        values.push(dist.cf(&t[..spec.dim()]));
    }
    CharFnGrid::new(spec.clone(), values, CfSource::Analytic)
}

/// CF obtained by the discrete transform of the sampled density of `dist`.
pub fn cf_on_grid_transformed(dist: &DistributionSpec, spec: &GridSpec) -> Result<CharFnGrid> {
    if dist.dim != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: dist.dim,
        });
    }
    let d = spec.dim();
    cf_on_grid_transformed_fn(|x| dist.density(&x[..d]), spec)
}

/// CF by discrete transform of an arbitrary sampled density closure
/// (jump points should follow the mid-value convention for full accuracy).
pub fn cf_on_grid_transformed_fn(
    density: impl Fn(&[f64]) -> f64,
    spec: &GridSpec,
) -> Result<CharFnGrid> {
    let mut values = Vec::with_capacity(spec.len());
    for flat in 0..spec.len() {
        let x = spec.x_point(flat);
        values.push(Complex::new(density(&x[..spec.dim()]), 0.0));
    }
    centered_transform(&mut values, spec, TransformDir::SpaceToFreq);
    CharFnGrid::new(spec.clone(), values, CfSource::Transformed)
}

/// CF of `Z_n = (X_1 + ... + X_n)/sqrt(n)`: the pointwise product of
/// `v_k(t / sqrt(n))`, cycling `dists` when it is shorter than `n`.
pub fn product_cf(dists: &[DistributionSpec], n: usize, spec: &GridSpec) -> Result<CharFnGrid> {
    if dists.is_empty() {
        return Err(Error::invalid("dists", "empty distribution list"));
    }
    if n == 0 {
        return Err(Error::invalid("n", "need n >= 1"));
    }
    for d in dists {
        if d.dim != spec.dim() {
            return Err(Error::DimensionMismatch {
                expected: spec.dim(),
                got: d.dim,
            });
        }
    }
    let scale = 1.0 / (n as f64).sqrt();
    let dim = spec.dim();
    let mut values = Vec::with_capacity(spec.len());
    let mut arg = [0.0f64; 3];
    for flat in 0..spec.len() {
        let t = spec.t_point(flat);
        for a in 0..dim {
            arg[a] = t[a] * scale;
        }
        let v = if dists.len() == 1 {
            dists[0].cf(&arg[..dim]).powi(n as i32)
        } else {
            let mut acc = Complex::new(1.0, 0.0);
            for k in 0..n {
                acc *= dists[k % dists.len()].cf(&arg[..dim]);
            }
            acc
        };
        values.push(v);
    }
    CharFnGrid::new(spec.clone(), values, CfSource::Analytic)
}

/// Pointwise product of two CF grids — the CF of the sum of independent
/// vectors (no normalization).
pub fn multiply_cfs(a: &CharFnGrid, b: &CharFnGrid) -> Result<CharFnGrid> {
    if a.spec != b.spec {
        return Err(Error::invalid("spec", "CF grids live on different grids"));
    }
    let values = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| x * y)
        .collect();
    CharFnGrid::new(a.spec.clone(), values, CfSource::Analytic)
}

/// Estimated sup-norm error from the CF mass outside the frequency window,
/// by power-law extrapolation of the outer-shell decay.
pub fn tail_supremum_error(cf: &CharFnGrid) -> f64 {
    let spec = &cf.spec;
    let d = spec.dim() as f64;
    let t_max = spec.t_max();
    let (mut sum1, mut cnt1) = (0.0f64, 0usize);
    let (mut sum2, mut cnt2) = (0.0f64, 0usize);
    for flat in 0..spec.len() {
        let t = spec.t_point(flat);
        let r = t[..spec.dim()].iter().map(|v| v * v).sum::<f64>().sqrt();
        if r >= 0.70 * t_max && r < 0.85 * t_max {
            sum1 += cf.abs_at(flat);
            cnt1 += 1;
        } else if r >= 0.85 * t_max && r <= t_max {
            sum2 += cf.abs_at(flat);
            cnt2 += 1;
        }
    }
    if cnt1 == 0 || cnt2 == 0 {
        return f64::INFINITY;
    }
    let m1 = sum1 / cnt1 as f64;
    let m2 = sum2 / cnt2 as f64;
    if m2 < 1e-300 {
        return 0.0;
    }
    if m1 <= m2 {
        return f64::INFINITY;
    }
    let r1 = 0.775 * t_max;
    let r2 = 0.925 * t_max;
    let gamma = (m1 / m2).ln() / (r2 / r1).ln();
    if gamma <= d + 0.05 {
        // Tail integral diverges (or nearly so): the CF is not integrable
        // on this evidence. Single summands with 1/t decay land here.
        return f64::INFINITY;
    }
    let surface = d * PI.powf(d / 2.0) / crate::special::gamma(d / 2.0 + 1.0);
    let tail_integral = surface * m2 * t_max.powf(d) / (gamma - d);
    tail_integral / (2.0 * PI).powf(d)
}

/// Fourier inversion of a CF grid into a density grid. Refuses when the
/// estimated out-of-window tail would corrupt the result beyond
/// `tail_tol` in sup norm.
pub fn invert_to_density(cf: &CharFnGrid, tail_tol: f64) -> Result<DensityGrid> {
    let est = tail_supremum_error(cf);
    if !(est <= tail_tol) {
        return Err(Error::InsufficientWindow {
            estimate: est,
            tolerance: tail_tol,
        });
    }
    let mut values = cf.values.clone();
    centered_transform(&mut values, &cf.spec, TransformDir::FreqToSpace);
    let real: Vec<f64> = values.iter().map(|v| v.re).collect();
    DensityGrid::from_values(cf.spec.clone(), real)
}

/// Result of a sup-distance evaluation.
#[derive(Debug, Clone)]
pub struct SupDistance {
    /// Refined maximum of `|p - q|`.
    pub value: f64,
    /// Raw grid maximum before parabolic refinement.
    pub grid_value: f64,
    /// Location of the maximum (refined along each axis).
    pub location: Vec<f64>,
}

/// `sup |p - q|` over the grid with three-point parabolic refinement at
/// the argmax, which removes the O(h^2) sampling bias of a smooth
/// extremum.
pub fn sup_distance(p: &DensityGrid, q: impl Fn(&[f64]) -> f64) -> SupDistance {
    let spec = &p.spec;
    let d = spec.dim();
    let n = spec.points_per_axis();
    let mut best_flat = 0usize;
    let mut best = -1.0f64;
    for flat in 0..spec.len() {
        let x = spec.x_point(flat);
        let g = (p.values[flat] - q(&x[..d])).abs();
        if g > best {
            best = g;
            best_flat = flat;
        }
    }
    let idx = spec.unravel(best_flat);
    let x0 = spec.x_point(best_flat);
    let mut location: Vec<f64> = x0[..d].to_vec();
    let mut refined = best;
    let diff_at = |flat: usize| {
        let x = spec.x_point(flat);
        (p.values[flat] - q(&x[..d])).abs()
    };
    for axis in 0..d {
        if idx[axis] == 0 || idx[axis] == n - 1 {
            continue;
        }
        let stride = n.pow((d - 1 - axis) as u32);
        let g_minus = diff_at(best_flat - stride);
        let g_plus = diff_at(best_flat + stride);
        let denom = g_minus - 2.0 * best + g_plus;
        if denom < 0.0 {
            let delta = 0.5 * (g_minus - g_plus) / denom;
            if delta.abs() <= 1.0 {
                let gain = -0.25 * (g_minus - g_plus) * delta;
                if gain > 0.0 {
                    refined += gain;
                }
                location[axis] += delta * spec.step();
            }
        }
    }
    SupDistance {
        value: refined,
        grid_value: best,
        location,
    }
}

/// Discrete Parseval comparison `(2 pi)^{-d} sum |f|^2 dt` versus
/// `sum p^2 dx` for independently sampled grids; the difference measures
/// aliasing, not identity bookkeeping.
pub fn plancherel_gap(cf: &CharFnGrid, density: &DensityGrid) -> f64 {
    let d = cf.spec.dim();
    let lhs = cf.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
        * cf.spec.freq_step().powi(d as i32)
        / (2.0 * PI).powi(d as i32);
    let rhs = density.l2_norm_sq();
    (lhs - rhs).abs()
}

const MAGIC: &[u8; 4] = b"LLTG";

fn write_header<W: Write>(w: &mut W, kind: u8, dtype: u8, spec: &GridSpec) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&[1u8, kind, dtype, spec.dim() as u8])?;
    w.write_all(&(spec.points_per_axis() as u32).to_le_bytes())?;
    w.write_all(&spec.half_width().to_le_bytes())?;
    Ok(())
}

fn read_header<R: Read>(r: &mut R) -> Result<(u8, u8, GridSpec)> {
    let mut head = [0u8; 8];
    r.read_exact(&mut head).map_err(io_err)?;
    if &head[..4] != MAGIC || head[4] != 1 {
        return Err(Error::Numeric("bad grid file header".into()));
    }
    let mut nb = [0u8; 4];
    r.read_exact(&mut nb).map_err(io_err)?;
    let mut lb = [0u8; 8];
    r.read_exact(&mut lb).map_err(io_err)?;
    let spec = GridSpec::new(
        head[7] as usize,
        f64::from_le_bytes(lb),
        u32::from_le_bytes(nb) as usize,
    )?;
    Ok((head[5], head[6], spec))
}

fn io_err(e: std::io::Error) -> Error {
    Error::Numeric(format!("i/o error: {e}"))
}

impl DensityGrid {
    /// Flat binary layout: header (magic, version, kind, dtype, dim, N, L),
    /// then row-major little-endian values.
    pub fn write_binary<W: Write>(&self, w: &mut W) -> Result<()> {
        write_header(w, 0, 0, &self.spec).map_err(io_err)?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes()).map_err(io_err)?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(r: &mut R) -> Result<Self> {
        let (kind, dtype, spec) = read_header(r)?;
        if kind != 0 || dtype != 0 {
            return Err(Error::Numeric("not a density grid file".into()));
        }
        let mut values = vec![0.0f64; spec.len()];
        let mut buf = [0u8; 8];
        for v in values.iter_mut() {
            r.read_exact(&mut buf).map_err(io_err)?;
            *v = f64::from_le_bytes(buf);
        }
        DensityGrid::from_values(spec, values)
    }

    /// CSV rows `x1[,x2[,x3]],density` with negative ringing clamped.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        let d = self.spec.dim();
        let mut header: Vec<String> = (1..=d).map(|a| format!("x{a}")).collect();
        header.push("density".into());
        writeln!(w, "{}", header.join(",")).map_err(io_err)?;
        for flat in 0..self.spec.len() {
            let x = self.spec.x_point(flat);
            let mut row: Vec<String> = x[..d].iter().map(|v| format_sig(*v)).collect();
            row.push(format_sig(self.values[flat].max(0.0)));
            writeln!(w, "{}", row.join(",")).map_err(io_err)?;
        }
        Ok(())
    }
}

impl CharFnGrid {
    pub fn write_binary<W: Write>(&self, w: &mut W) -> Result<()> {
        write_header(w, 1, 1, &self.spec).map_err(io_err)?;
        for v in &self.values {
            w.write_all(&v.re.to_le_bytes()).map_err(io_err)?;
            w.write_all(&v.im.to_le_bytes()).map_err(io_err)?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(r: &mut R) -> Result<Self> {
        let (kind, dtype, spec) = read_header(r)?;
        if kind != 1 || dtype != 1 {
            return Err(Error::Numeric("not a CF grid file".into()));
        }
        let mut values = vec![Complex::new(0.0, 0.0); spec.len()];
        let mut buf = [0u8; 8];
        for v in values.iter_mut() {
            r.read_exact(&mut buf).map_err(io_err)?;
            let re = f64::from_le_bytes(buf);
            r.read_exact(&mut buf).map_err(io_err)?;
            let im = f64::from_le_bytes(buf);
            *v = Complex::new(re, im);
        }
        CharFnGrid::new(spec, values, CfSource::Transformed)
    }

    /// CSV rows `t1[,t2[,t3]],re,im`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        let d = self.spec.dim();
        let mut header: Vec<String> = (1..=d).map(|a| format!("t{a}")).collect();
        header.push("re".into());
        header.push("im".into());
        writeln!(w, "{}", header.join(",")).map_err(io_err)?;
        for flat in 0..self.spec.len() {
            let t = self.spec.t_point(flat);
            let mut row: Vec<String> = t[..d].iter().map(|v| format_sig(*v)).collect();
            row.push(format_sig(self.values[flat].re));
            row.push(format_sig(self.values[flat].im));
            writeln!(w, "{}", row.join(",")).map_err(io_err)?;
        }
        Ok(())
    }
}

/// 12-significant-digit scientific formatting shared by every CSV writer;
/// fixed formatting keeps suite outputs byte-identical across runs.
pub fn format_sig(v: f64) -> String {
    format!("{v:.11e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{make_gaussian, make_uniform_interval};

    fn gaussian_spec() -> GridSpec {
        GridSpec::new(1, 12.0, 4096).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(GridSpec::new(1, 12.0, 1000).is_err()); // not a power of two
        assert!(GridSpec::new(1, 12.0, 32).is_err()); // too small
        assert!(GridSpec::new(1, -1.0, 128).is_err());
        assert!(GridSpec::new(4, 12.0, 128).is_err());
        assert!(GridSpec::with_window(1, 12.0, 64, 100.0).is_err());
        let s = GridSpec::new(1, 12.0, 4096).unwrap();
        assert!((s.t_max() - PI * 4096.0 / 24.0).abs() < 1e-12);
        assert!((s.freq_step() - PI / 12.0).abs() < 1e-15);
    }

    #[test]
    fn analytic_gaussian_cf_grid() {
        let g = make_gaussian(1, 1.0).unwrap();
        let cf = cf_on_grid(&g, &gaussian_spec()).unwrap();
        for flat in (0..cf.spec.len()).step_by(97) {
            let t = cf.spec.t_point(flat)[0];
            assert!((cf.values[flat].re - (-0.5 * t * t).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn transformed_gaussian_matches_analytic() {
        let g = make_gaussian(1, 1.0).unwrap();
        let spec = gaussian_spec();
        let analytic = cf_on_grid(&g, &spec).unwrap();
        let transformed = cf_on_grid_transformed(&g, &spec).unwrap();
        assert_eq!(transformed.source, CfSource::Transformed);
        let worst = analytic
            .values
            .iter()
            .zip(&transformed.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-10, "max branch discrepancy {worst}");
    }

    #[test]
    fn transformed_uniform_on_aligned_grid() {
        // Support endpoint sqrt(3) placed exactly on a grid node, where the
        // density reports its mid-value; discrepancy is the O(h^2)
        // endpoint term only.
        let u = make_uniform_interval(1.0).unwrap();
        let a = 3f64.sqrt();
        let spec = GridSpec::new(1, 2.0 * a, 16384).unwrap();
        let analytic = cf_on_grid(&u, &spec).unwrap();
        let transformed = cf_on_grid_transformed(&u, &spec).unwrap();
        let mut worst = 0.0f64;
        for flat in 0..spec.len() {
            let t = spec.t_point(flat)[0];
            if t.abs() <= 20.0 {
                worst = worst.max((analytic.values[flat] - transformed.values[flat]).norm());
            }
        }
        assert!(worst < 1e-6, "max |t|<=20 branch discrepancy {worst}");
    }

    #[test]
    fn product_cf_single_factor_is_cf() {
        let u = make_uniform_interval(1.0).unwrap();
        let spec = gaussian_spec();
        let single = product_cf(std::slice::from_ref(&u), 1, &spec).unwrap();
        let direct = cf_on_grid(&u, &spec).unwrap();
        for (a, b) in single.values.iter().zip(&direct.values) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn product_cf_gaussian_stability() {
        let g = make_gaussian(1, 1.0).unwrap();
        let spec = gaussian_spec();
        for n in [2usize, 7, 64] {
            let cf = product_cf(std::slice::from_ref(&g), n, &spec).unwrap();
            for flat in (0..spec.len()).step_by(211) {
                let t = spec.t_point(flat)[0];
                assert!((cf.values[flat].re - (-0.5 * t * t).exp()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn product_cf_two_uniform_closed_form() {
        let u = make_uniform_interval(1.0).unwrap();
        let spec = gaussian_spec();
        let cf = product_cf(std::slice::from_ref(&u), 2, &spec).unwrap();
        let a = 3f64.sqrt();
        for flat in (0..spec.len()).step_by(131) {
            let t = spec.t_point(flat)[0];
            let expect = crate::special::sinc(a * t / 2f64.sqrt()).powi(2);
            assert!((cf.values[flat].re - expect).abs() < 1e-8);
        }
    }

    #[test]
    fn inversion_recovers_gaussian() {
        let g = make_gaussian(1, 1.0).unwrap();
        let cf = cf_on_grid(&g, &gaussian_spec()).unwrap();
        let p = invert_to_density(&cf, DEFAULT_TAIL_TOL).unwrap();
        assert!(p.mass_defect < 1e-12);
        let mut worst = 0.0f64;
        for flat in 0..p.spec.len() {
            let x = p.spec.x_point(flat)[0];
            worst = worst.max((p.values[flat] - std_normal_density(1, &[x])).abs());
        }
        assert!(worst < 1e-8, "sup inversion error {worst}");
    }

    #[test]
    fn single_uniform_inversion_is_refused() {
        // sinc decays like 1/t: not integrable, the window can never hold it.
        let u = make_uniform_interval(1.0).unwrap();
        let cf = cf_on_grid(&u, &gaussian_spec()).unwrap();
        match invert_to_density(&cf, DEFAULT_TAIL_TOL) {
            Err(Error::InsufficientWindow { .. }) => {}
            other => panic!("expected InsufficientWindow, got {other:?}"),
        }
    }

    #[test]
    fn sup_distance_identity_is_zero() {
        let g = make_gaussian(1, 1.0).unwrap();
        let cf = cf_on_grid(&g, &gaussian_spec()).unwrap();
        let p = invert_to_density(&cf, DEFAULT_TAIL_TOL).unwrap();
        let spec = p.spec.clone();
        let sampled = DensityGrid::from_values(
            spec.clone(),
            (0..spec.len())
                .map(|f| std_normal_density(1, &spec.x_point(f)[..1]))
                .collect(),
        )
        .unwrap();
        let d = sup_distance(&sampled, |x| std_normal_density(1, x));
        assert!(d.value < 1e-12);
        let d2 = sup_distance(&p, |x| std_normal_density(1, x));
        assert!(d2.value < 1e-8);
    }

    #[test]
    fn plancherel_gap_small_for_gaussian() {
        let g = make_gaussian(1, 1.0).unwrap();
        let spec = gaussian_spec();
        let cf = cf_on_grid(&g, &spec).unwrap();
        let sampled = DensityGrid::from_values(
            spec.clone(),
            (0..spec.len())
                .map(|f| g.density(&spec.x_point(f)[..1]))
                .collect(),
        )
        .unwrap();
        assert!(plancherel_gap(&cf, &sampled) < 1e-10);
    }

    #[test]
    fn gaussian_2d_roundtrip() {
        let g = make_gaussian(2, 1.0).unwrap();
        let spec = GridSpec::new(2, 10.0, 256).unwrap();
        let cf = cf_on_grid(&g, &spec).unwrap();
        let p = invert_to_density(&cf, DEFAULT_TAIL_TOL).unwrap();
        assert!(p.mass_defect < 1e-10);
        let mut worst = 0.0f64;
        for flat in 0..p.spec.len() {
            let x = p.spec.x_point(flat);
            worst = worst.max((p.values[flat] - std_normal_density(2, &x[..2])).abs());
        }
        assert!(worst < 1e-8, "2d inversion error {worst}");
    }

    #[test]
    fn binary_roundtrip() {
        let g = make_gaussian(1, 1.0).unwrap();
        let spec = GridSpec::new(1, 12.0, 64).unwrap();
        let cf = cf_on_grid(&g, &spec).unwrap();
        let mut buf = Vec::new();
        cf.write_binary(&mut buf).unwrap();
        let back = CharFnGrid::read_binary(&mut buf.as_slice()).unwrap();
        assert_eq!(back.spec, cf.spec);
        for (a, b) in back.values.iter().zip(&cf.values) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn csv_is_deterministic() {
        let g = make_gaussian(1, 1.0).unwrap();
        let spec = GridSpec::new(1, 12.0, 64).unwrap();
        let cf = cf_on_grid(&g, &spec).unwrap();
        let p = invert_to_density(&cf, DEFAULT_TAIL_TOL).unwrap();
        let mut one = Vec::new();
        let mut two = Vec::new();
        p.write_csv(&mut one).unwrap();
        p.write_csv(&mut two).unwrap();
        assert_eq!(one, two);
        assert!(one.starts_with(b"x1,density\n"));
    }
}
