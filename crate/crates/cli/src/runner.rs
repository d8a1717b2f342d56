//! Executes the enabled check groups over the configured experiments and
//! writes the report files. Per-check failures are collected, not fatal;
//! I/O problems abort the run.

use crate::config::{CheckGroup, RunConfig};
use crate::output::{self, CfNormRow, FunctionalsRow, SeparationRow, SubadditivityRow};
use anyhow::Context;
use llt_core::bounds::{self, subadditivity_check, verify_bound, BoundReport};
use llt_core::cf_analysis::{
    lp_norm_cf, separation_scan, separation_scan_with_resolution, truncate, truncation_ray_margin,
};
use llt_core::distributions::{DistributionSpec, Family};
use llt_core::functionals::{check_isotropic_bounds, functional_report};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

/// One failed check with its context.
#[derive(Debug, Clone, Serialize)]
pub struct FailureDetail {
    pub family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub check: String,
    pub observed: f64,
    pub required: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RateSummary {
    pub slope: f64,
    pub stderr: f64,
    pub dropped_smallest: bool,
}

/// Run outcome: counts, the binding constants over the whole suite, and
/// wall time per stage.
#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub passed: usize,
    pub failed: usize,
    pub total: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_min_global: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_feasible: Option<f64>,
    pub rates: BTreeMap<String, RateSummary>,
    pub stage_ms: BTreeMap<String, u128>,
    pub failures: Vec<FailureDetail>,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        if self.failed == 0 {
            0
        } else {
            1
        }
    }
}

#[derive(Default)]
struct Checker {
    passed: usize,
    failed: usize,
    failures: Vec<FailureDetail>,
}

impl Checker {
    /// Record one check: `observed` must satisfy the caller's comparison
    /// against `required` (already folded into `ok`).
    fn check(&mut self, family: &str, n: Option<usize>, name: &str, observed: f64, required: f64, ok: bool) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            self.failures.push(FailureDetail {
                family: family.to_string(),
                n,
                check: name.to_string(),
                observed,
                required,
            });
        }
    }
}

/// Comparing `Z_n` with the standard normal density requires unit
/// per-coordinate variance; experiments violating it are skipped by the
/// normal-approximation stages (the family still joins the pool checks).
fn unit_variance(exp: &llt_core::bounds::Experiment) -> bool {
    exp.dists.iter().all(|d| (d.sigma2 - 1.0).abs() <= 1e-12)
}

/// Distinct summand laws across all experiments (by label), the pool for
/// catalog-wide checks.
fn distinct_dists(config: &RunConfig) -> Vec<DistributionSpec> {
    let mut seen = Vec::<DistributionSpec>::new();
    for exp in &config.experiments {
        for d in &exp.dists {
            if !seen.iter().any(|s| s.label == d.label) {
                seen.push(d.clone());
            }
        }
    }
    seen
}

/// Execute the run and write all report files under `out_dir`.
pub fn run(config: &RunConfig, out_dir: &Path) -> anyhow::Result<RunSummary> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output dir {}", out_dir.display()))?;
    // Probe writability up front so I/O problems are fatal and early.
    let probe = out_dir.join(".write-probe");
    std::fs::write(&probe, b"ok").with_context(|| format!("output dir {} not writable", out_dir.display()))?;
    std::fs::remove_file(&probe).ok();

    let mut checker = Checker::default();
    let mut stage_ms = BTreeMap::new();
    let mut rates = BTreeMap::new();
    let mut c_feasible: Option<f64> = None;
    let mut c_min_global: Option<f64> = None;
    let pool = distinct_dists(config);
    let tol = &config.tolerances;

    // ---- functionals + isotropy -------------------------------------
    if config.checks.contains(&CheckGroup::Isotropy) {
        let t0 = Instant::now();
        let mut rows = Vec::new();
        for dist in &pool {
            let margins = check_isotropic_bounds(dist)?;
            let rep = functional_report(std::slice::from_ref(dist), 1)?;
            checker.check(
                &dist.label,
                None,
                "isotropy_ball_margin",
                margins.ball,
                -tol.isotropy_slack,
                margins.ball >= -tol.isotropy_slack,
            );
            checker.check(
                &dist.label,
                None,
                "isotropy_dimension_free_margin",
                margins.dimension_free,
                -tol.isotropy_slack,
                margins.dimension_free >= -tol.isotropy_slack,
            );
            if let Some(m1) = margins.one_dim {
                checker.check(
                    &dist.label,
                    None,
                    "isotropy_one_dim_margin",
                    m1,
                    -tol.isotropy_slack,
                    m1 >= -tol.isotropy_slack,
                );
            }
            // Moment-chain sanity: 1 <= beta3 <= sqrt(beta4).
            checker.check(
                &dist.label,
                None,
                "beta3_at_least_one",
                rep.beta3,
                1.0,
                rep.beta3 >= 1.0 - 1e-9,
            );
            checker.check(
                &dist.label,
                None,
                "beta3_le_sqrt_beta4",
                rep.beta3,
                rep.beta4.sqrt(),
                rep.beta3 <= rep.beta4.sqrt() + 1e-9,
            );
            rows.push(FunctionalsRow {
                family: dist.label.clone(),
                dim: dist.dim,
                m_max: rep.m_max,
                sigma: rep.sigma,
                beta3: rep.beta3,
                beta4: rep.beta4,
                isotropic_const: rep.isotropic_const,
                l3: rep.l3,
                l4: rep.l4,
                margin_one_dim: margins.one_dim,
                margin_ball: margins.ball,
                margin_dimension_free: margins.dimension_free,
            });
        }
        output::write_file(&out_dir.join("functionals.csv"), &output::functionals_csv(&rows))?;
        stage_ms.insert("isotropy".into(), t0.elapsed().as_millis());
    }

    // ---- separation (+ truncation for d >= 2) ------------------------
    if config.checks.contains(&CheckGroup::Separation) {
        let t0 = Instant::now();
        let mut rows = Vec::new();
        for dist in &pool {
            let eps = 1e-3;
            let t_max = 40.0;
            let rep = separation_scan(dist, eps, t_max)?;
            // Strict separation everywhere on the scan.
            let worst_abs = rep
                .samples
                .iter()
                .map(|s| s.worst_abs)
                .fold(0.0f64, f64::max);
            checker.check(
                &dist.label,
                None,
                "separation_strictly_below_one",
                worst_abs,
                1.0,
                worst_abs < 1.0,
            );
            checker.check(
                &dist.label,
                None,
                "separation_c_empirical_positive",
                rep.c_empirical,
                0.0,
                rep.c_empirical > 0.0,
            );
            // Stability under scan-resolution doubling.
            let (radii, dirs) = llt_core::cf_analysis::default_scan_resolution(dist.dim);
            let fine = separation_scan_with_resolution(dist, eps, t_max, radii * 2, dirs.max(2) * 2)?;
            let drift = (fine.c_empirical - rep.c_empirical).abs() / rep.c_empirical.max(1e-300);
            checker.check(
                &dist.label,
                None,
                "separation_stability_10pct",
                drift,
                0.10,
                drift <= 0.10,
            );
            // Proof-derived floor where sigma |t| >= pi/2.
            let m = llt_core::functionals::max_density(dist)?;
            let m2s2 = m * m * dist.sigma2;
            let floor_ok = rep
                .samples
                .iter()
                .filter(|s| dist.sigma() * s.rho >= std::f64::consts::FRAC_PI_2)
                .all(|s| (1.0 - s.worst_abs) * m2s2 >= 1.0 / 3456.0 - 1e-12);
            checker.check(
                &dist.label,
                None,
                "separation_proof_floor",
                if floor_ok { 1.0 } else { 0.0 },
                1.0,
                floor_ok,
            );
            c_feasible = Some(match c_feasible {
                None => rep.c_empirical,
                Some(v) => v.min(rep.c_empirical),
            });
            rows.push(SeparationRow {
                family: dist.label.clone(),
                dim: dist.dim,
                eps,
                delta_f: rep.delta_f,
                c_empirical: rep.c_empirical,
                t_critical: rep.t_critical,
                certified: rep.certified,
            });

            // Truncation block at the default radius for d >= 2.
            if dist.dim >= 2 {
                let trunc = truncate(dist, None)?;
                checker.check(
                    &dist.label,
                    None,
                    "truncation_mass_at_least_half",
                    trunc.b_r,
                    0.5,
                    trunc.b_r >= 0.5,
                );
                checker.check(
                    &dist.label,
                    None,
                    "truncation_projected_variance",
                    trunc.worst_variance,
                    4.0 * dist.sigma2,
                    trunc.variance_bound_ok,
                );
                if let Some(worst) = trunc.worst_marginal_max {
                    checker.check(
                        &dist.label,
                        None,
                        "truncation_marginal_max_bound",
                        worst,
                        trunc.marginal_m_bound,
                        trunc.marginal_bound_ok,
                    );
                }
                let rhos: Vec<f64> = (1..=24).map(|i| t_max * i as f64 / 24.0).collect();
                let margin = truncation_ray_margin(dist, &trunc, &rhos, 8);
                checker.check(
                    &dist.label,
                    None,
                    "truncation_halving_inequality",
                    margin,
                    -1e-9,
                    margin >= -1e-9,
                );
            }
        }
        output::write_file(&out_dir.join("separation.csv"), &output::separation_csv(&rows))?;
        stage_ms.insert("separation".into(), t0.elapsed().as_millis());
    }

    // ---- subadditivity over catalog pairs and triples ----------------
    if config.checks.contains(&CheckGroup::Subadditivity) {
        let t0 = Instant::now();
        let mut rows = Vec::new();
        for dim in [1usize, 2, 3] {
            let members: Vec<&DistributionSpec> =
                pool.iter().filter(|d| d.dim == dim).collect();
            let k = members.len();
            // Unordered multisets of sizes two and three. Mixed tuples
            // with a quadrature-backed CF (the unbounded-marginal law)
            // are skipped in d >= 2: their pointwise CF is too expensive
            // on tensor grids, and the self-pair is covered exactly by
            // the Parseval identity inside subadditivity_check.
            let quadrature_cf = |d: &DistributionSpec| {
                d.cf_kind() == llt_core::distributions::CfKind::Quadrature
            };
            let mut tuples: Vec<Vec<&DistributionSpec>> = Vec::new();
            for i in 0..k {
                for j in i..k {
                    let tuple = [members[i], members[j]];
                    if dim >= 2 && tuple.iter().any(|d| quadrature_cf(d)) && i != j {
                        continue;
                    }
                    tuples.push(tuple.to_vec());
                }
            }
            for i in 0..k {
                for j in i..k {
                    for l in j..k {
                        let tuple = [members[i], members[j], members[l]];
                        if dim >= 2 && tuple.iter().any(|d| quadrature_cf(d)) {
                            continue;
                        }
                        tuples.push(tuple.to_vec());
                    }
                }
            }
            for tuple in tuples {
                let dists: Vec<DistributionSpec> = tuple.iter().map(|d| (*d).clone()).collect();
                eprintln!(
                    "SUBADD {}",
                    dists.iter().map(|d| d.label.as_str()).collect::<Vec<_>>().join("+")
                );
                let rec = subadditivity_check(&dists, None)?;
                let members_label = rec.labels.join("+");
                checker.check(
                    &members_label,
                    None,
                    "subadditivity_harmonic_1_over_e",
                    rec.harmonic_lhs,
                    rec.harmonic_rhs,
                    rec.harmonic_ok,
                );
                if rec.harmonic_rhs_half.is_some() {
                    checker.check(
                        &members_label,
                        None,
                        "subadditivity_harmonic_half_d1",
                        rec.harmonic_lhs,
                        rec.harmonic_rhs_half.unwrap(),
                        rec.harmonic_half_ok,
                    );
                }
                checker.check(
                    &members_label,
                    None,
                    "subadditivity_geometric_mean",
                    rec.m_sum,
                    rec.geometric_rhs,
                    rec.geometric_ok,
                );
                rows.push(SubadditivityRow {
                    members: members_label,
                    dim,
                    m_sum: rec.m_sum,
                    harmonic_lhs: rec.harmonic_lhs,
                    harmonic_rhs: rec.harmonic_rhs,
                    harmonic_rhs_half: rec.harmonic_rhs_half,
                    geometric_rhs: rec.geometric_rhs,
                    ok: rec.harmonic_ok && rec.harmonic_half_ok && rec.geometric_ok,
                });
            }
        }
        output::write_file(
            &out_dir.join("subadditivity.csv"),
            &output::subadditivity_csv(&rows),
        )?;
        stage_ms.insert("subadditivity".into(), t0.elapsed().as_millis());
    }

    // ---- CF L^{2m} norms ---------------------------------------------
    if config.checks.contains(&CheckGroup::CfNorms) {
        let t0 = Instant::now();
        let mut rows = Vec::new();
        for dist in &pool {
            for m in [1u32, 2, 4, 8, 16] {
                let r = lp_norm_cf(dist, m)?;
                let ok = r.value <= r.envelope + tol.envelope_slack;
                checker.check(
                    &dist.label,
                    None,
                    &format!("cf_norm_envelope_m{m}"),
                    r.value,
                    r.envelope,
                    ok,
                );
                rows.push(CfNormRow {
                    family: dist.label.clone(),
                    dim: dist.dim,
                    m,
                    value: r.value,
                    envelope: r.envelope,
                    ok,
                });
            }
            // Plancherel cross-check where int p^2 is in closed form.
            if let Some(l2) = dist.l2_closed_form() {
                let r = lp_norm_cf(dist, 1)?;
                let tol_p = if dist.dim == 1 { 1e-6 } else { 1e-5 };
                checker.check(
                    &dist.label,
                    None,
                    "plancherel_m1",
                    r.value,
                    l2,
                    (r.value - l2).abs() <= tol_p,
                );
            }
        }
        output::write_file(&out_dir.join("cf_norms.csv"), &output::cf_norms_csv(&rows))?;
        stage_ms.insert("cf_norms".into(), t0.elapsed().as_millis());
    }

    // ---- CF-product normal approximation -----------------------------
    if config.checks.contains(&CheckGroup::CfProduct) {
        let t0 = Instant::now();
        for exp in &config.experiments {
            if !unit_variance(exp) {
                continue;
            }
            let mut c_mins = Vec::new();
            for &n in &exp.n_list {
                let rec = bounds::cf_product_error_check(exp, n)?;
                checker.check(
                    &exp.label,
                    Some(n),
                    "cf_product_c_min_finite",
                    rec.c_min,
                    f64::INFINITY,
                    rec.c_min.is_finite(),
                );
                if exp
                    .dists
                    .iter()
                    .all(|d| matches!(d.family, Family::Gaussian { .. }))
                {
                    checker.check(
                        &exp.label,
                        Some(n),
                        "cf_product_gaussian_noise_floor",
                        rec.c_min,
                        1e-7,
                        rec.c_min <= 1e-7,
                    );
                }
                c_mins.push((n, rec.c_min));
                let series = output::cf_error_series(exp, n, 512)?;
                output::write_file(
                    &out_dir.join(format!("cferr_{}_n{}.csv", exp.label, n)),
                    &series,
                )?;
            }
            if c_mins.len() >= 2 && c_mins.first().unwrap().1 > 1e-7 {
                let first = c_mins.first().unwrap().1;
                let last = c_mins.last().unwrap().1;
                let ratio = last / first;
                checker.check(
                    &exp.label,
                    None,
                    "cf_product_c_min_stability",
                    ratio,
                    2.0,
                    (0.5..=2.0).contains(&ratio),
                );
            }
        }
        stage_ms.insert("cf_product".into(), t0.elapsed().as_millis());
    }

    // ---- main bounds + rates -----------------------------------------
    let run_theorems = config.checks.contains(&CheckGroup::Theorems);
    let run_rates = config.checks.contains(&CheckGroup::Rates);
    let mut reports: Vec<BoundReport> = Vec::new();
    if run_theorems || run_rates {
        let t0 = Instant::now();
        // Per-experiment pipelines are independent; order is preserved by
        // the indexed collect, so the output stays deterministic.
        let eligible: Vec<&llt_core::bounds::Experiment> = config
            .experiments
            .iter()
            .filter(|e| unit_variance(e))
            .collect();
        let results: Vec<llt_core::Result<BoundReport>> = {
            use rayon::prelude::*;
            eligible.par_iter().map(|e| verify_bound(e)).collect()
        };
        for (exp, res) in eligible.iter().zip(results) {
            let report = res?;
            if run_theorems {
                for row in &report.rows {
                    if let Some(err) = &row.error {
                        checker.check(&exp.label, Some(row.n), &format!("grid:{err}"), f64::NAN, 0.0, false);
                        continue;
                    }
                    checker.check(
                        &exp.label,
                        Some(row.n),
                        "bound_feasible_at_default_C",
                        row.ratio,
                        1.0,
                        row.feasible,
                    );
                }
                c_min_global = Some(match c_min_global {
                    None => report.c_min_11,
                    Some(v) => v.max(report.c_min_11),
                });
            }
            if run_rates {
                if let Some(rate) = &report.rate {
                    rates.insert(
                        exp.label.clone(),
                        RateSummary {
                            slope: rate.slope,
                            stderr: rate.stderr,
                            dropped_smallest: rate.dropped_smallest,
                        },
                    );
                    let series = output::rate_series(&report)?;
                    output::write_file(&out_dir.join(format!("rate_{}.csv", exp.label)), &series)?;
                }
            }
            reports.push(report);
        }
        output::write_file(&out_dir.join("bounds.csv"), &output::bounds_csv(&reports))?;
        stage_ms.insert("bounds".into(), t0.elapsed().as_millis());
    }

    // ---- log-concave corollary ---------------------------------------
    if config.checks.contains(&CheckGroup::Corollary) {
        let t0 = Instant::now();
        let mut lines =
            String::from("family,beta3,beta4,caps_ok,C_d_sqrt,C_d_linear,k_d\n");
        for exp in &config.experiments {
            let eligible = exp
                .dists
                .iter()
                .all(|d| d.log_concave && (d.sigma2 - 1.0).abs() <= 1e-9);
            if !eligible {
                continue;
            }
            let rec = bounds::corollary12_check(
                exp,
                config.constants.beta3_cap,
                config.constants.beta4_cap,
                config.constants.k_d,
            )?;
            checker.check(
                &exp.label,
                None,
                "corollary_beta_caps",
                rec.beta3.max(rec.beta4 / 4.0),
                rec.beta3_cap,
                rec.caps_ok,
            );
            checker.check(
                &exp.label,
                None,
                "corollary_sqrt_constant_finite",
                rec.c_d_sqrt,
                f64::INFINITY,
                rec.c_d_sqrt.is_finite() && rec.c_d_sqrt > 0.0,
            );
            lines.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                rec.label,
                output::fmt(rec.beta3),
                output::fmt(rec.beta4),
                rec.caps_ok,
                output::fmt(rec.c_d_sqrt),
                rec.c_d_linear.map(output::fmt).unwrap_or_default(),
                output::fmt(rec.k_d),
            ));
        }
        output::write_file(&out_dir.join("corollary.csv"), &lines)?;
        stage_ms.insert("corollary".into(), t0.elapsed().as_millis());
    }

    let summary = RunSummary {
        passed: checker.passed,
        failed: checker.failed,
        total: checker.passed + checker.failed,
        c_min_global,
        c_feasible,
        rates,
        stage_ms,
        failures: checker.failures,
    };
    let json = serde_json::to_string_pretty(&summary).context("serializing summary")?;
    output::write_file(&out_dir.join("summary.json"), &json)?;
    Ok(summary)
}
