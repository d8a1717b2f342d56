//! Deterministic report writers: fixed-format CSV tables and plot-ready
//! data series. All floats go through the shared 12-significant-digit
//! scientific formatter so identical configs produce byte-identical
//! files.

use anyhow::{bail, Context};
use llt_core::bounds::{BoundReport, Experiment, Mode};
use llt_core::grid::format_sig;
use std::fs;
use std::path::Path;

pub fn fmt(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format_sig(v)
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

pub fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// `bounds.csv`: one row per (experiment, n).
pub fn bounds_csv(reports: &[BoundReport]) -> String {
    let mut out =
        String::from("family,d,n,mode,delta_n,rhs_11,rhs_12,rhs_71,rhs_72,ratio,feasible,C_min\n");
    for rep in reports {
        for row in &rep.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                rep.label,
                rep.dim,
                row.n,
                rep.mode.as_str(),
                fmt(row.delta_n),
                fmt(row.rhs_11),
                fmt_opt(row.rhs_12),
                fmt(row.rhs_71),
                fmt_opt(row.rhs_72),
                fmt(row.ratio),
                row.feasible,
                fmt(row.c_min_11),
            ));
        }
    }
    out
}

/// One functionals row per experiment.
pub struct FunctionalsRow {
    pub family: String,
    pub dim: usize,
    pub m_max: f64,
    pub sigma: f64,
    pub beta3: f64,
    pub beta4: f64,
    pub isotropic_const: f64,
    pub l3: f64,
    pub l4: f64,
    pub margin_one_dim: Option<f64>,
    pub margin_ball: f64,
    pub margin_dimension_free: f64,
}

pub fn functionals_csv(rows: &[FunctionalsRow]) -> String {
    let mut out = String::from(
        "family,d,M,sigma,beta3,beta4,isotropic_const,L3,L4,margin_1d,margin_ball,margin_dimfree\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.family,
            r.dim,
            fmt(r.m_max),
            fmt(r.sigma),
            fmt(r.beta3),
            fmt(r.beta4),
            fmt(r.isotropic_const),
            fmt(r.l3),
            fmt(r.l4),
            fmt_opt(r.margin_one_dim),
            fmt(r.margin_ball),
            fmt(r.margin_dimension_free),
        ));
    }
    out
}

/// One separation row per family scan.
pub struct SeparationRow {
    pub family: String,
    pub dim: usize,
    pub eps: f64,
    pub delta_f: f64,
    pub c_empirical: f64,
    pub t_critical: f64,
    pub certified: bool,
}

pub fn separation_csv(rows: &[SeparationRow]) -> String {
    let mut out = String::from("family,d,eps,delta_f,c_empirical,t_critical,certified\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.family,
            r.dim,
            fmt(r.eps),
            fmt(r.delta_f),
            fmt(r.c_empirical),
            fmt(r.t_critical),
            r.certified,
        ));
    }
    out
}

pub struct SubadditivityRow {
    pub members: String,
    pub dim: usize,
    pub m_sum: f64,
    pub harmonic_lhs: f64,
    pub harmonic_rhs: f64,
    pub harmonic_rhs_half: Option<f64>,
    pub geometric_rhs: f64,
    pub ok: bool,
}

pub fn subadditivity_csv(rows: &[SubadditivityRow]) -> String {
    let mut out = String::from(
        "members,d,M_sum,harmonic_lhs,harmonic_rhs_e,harmonic_rhs_half,geometric_rhs,ok\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.members,
            r.dim,
            fmt(r.m_sum),
            fmt(r.harmonic_lhs),
            fmt(r.harmonic_rhs),
            fmt_opt(r.harmonic_rhs_half),
            fmt(r.geometric_rhs),
            r.ok,
        ));
    }
    out
}

pub struct CfNormRow {
    pub family: String,
    pub dim: usize,
    pub m: u32,
    pub value: f64,
    pub envelope: f64,
    pub ok: bool,
}

pub fn cf_norms_csv(rows: &[CfNormRow]) -> String {
    let mut out = String::from("family,d,m,value,envelope,ok\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.family,
            r.dim,
            r.m,
            fmt(r.value),
            fmt(r.envelope),
            r.ok,
        ));
    }
    out
}

/// Rate plot series: `(log n, log Delta_n)` rows. Refuses reports with no
/// successful rows.
pub fn rate_series(report: &BoundReport) -> anyhow::Result<String> {
    let rows: Vec<(f64, f64)> = report
        .rows
        .iter()
        .filter(|r| r.error.is_none() && r.delta_n > 0.0)
        .map(|r| ((r.n as f64).ln(), r.delta_n.ln()))
        .collect();
    if rows.is_empty() {
        bail!("no successful (n, delta_n) records to plot for {}", report.label);
    }
    let mut out = String::from("log_n,log_delta_n\n");
    for (x, y) in rows {
        out.push_str(&format!("{},{}\n", fmt(x), fmt(y)));
    }
    Ok(out)
}

/// CF-error plot series `t, |f_n(t) - e^{-t^2/2}|`, truncated at the
/// approximation interval endpoint (`sqrt(n)/beta_3` in general mode,
/// `sqrt(n)/sqrt(beta_4)` in symmetric mode).
pub fn cf_error_series(exp: &Experiment, n: usize, points: usize) -> anyhow::Result<String> {
    let rep = llt_core::functionals::functional_report(&exp.dists, n)?;
    let interval = match exp.mode {
        Mode::General => (n as f64).sqrt() / rep.beta3,
        Mode::Symmetric => (n as f64).sqrt() / rep.beta4.sqrt(),
    };
    let scale = (n as f64).sqrt();
    let dim = exp.dim;
    let mut out = String::from("t,cf_error\n");
    for i in 1..=points {
        let s = interval * i as f64 / points as f64;
        // Probe along the first coordinate axis for d >= 2.
        let arg = [s / scale, 0.0, 0.0];
        let mut f = llt_core::Complex::new(1.0, 0.0);
        for k in 0..n {
            f *= exp.dists[k % exp.dists.len()].cf(&arg[..dim]);
        }
        let err = (f - llt_core::Complex::new((-0.5 * s * s).exp(), 0.0)).norm();
        out.push_str(&format!("{},{}\n", fmt(s), fmt(err)));
    }
    Ok(out)
}
