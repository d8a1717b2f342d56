//! TOML experiment configuration: parsing, defaults, and validation.
//!
//! ```toml
//! output_dir = "out"                 # optional, default "out"
//! checks = ["isotropy", "rates"]     # optional, default: all groups
//! jobs = 4                           # optional worker cap
//!
//! [constants]
//! C = 3.0                            # candidate absolute constant
//! c = 0.1                            # envelope exponent constant
//! beta3_cap = 3.0                    # log-concave moment caps
//! beta4_cap = 12.0
//! k_d = 1.0                          # recorded stand-in constant
//!
//! [tolerances]
//! mass_defect = 1e-6
//! isotropy_slack = 1e-9
//! envelope_slack = 1e-8
//!
//! [[experiment]]
//! family = "uniform"                 # or families = ["uniform", "gaussian"]
//! dim = 1                            # default 1
//! sigma = 1.0                        # default 1.0
//! n_list = [4, 8, 16, 32, 64]        # required, ascending
//! mode = "symmetric"                 # default "general"
//! label = "uniform-rates"            # optional
//! [experiment.grid]                  # optional grid override
//! points = 8192                      # power of two
//! half_width = 12.0
//! ```

use anyhow::{anyhow, bail, Context};
use llt_core::bounds::{Experiment, Mode, DEFAULT_BIG_C, DEFAULT_SMALL_C};
use llt_core::distributions::FamilyCatalog;
use llt_core::grid::GridSpec;
use serde::Deserialize;
use std::collections::BTreeSet;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CheckGroup {
    Isotropy,
    Separation,
    Subadditivity,
    CfNorms,
    CfProduct,
    Theorems,
    Corollary,
    Rates,
}

impl CheckGroup {
    pub const ALL: [CheckGroup; 8] = [
        CheckGroup::Isotropy,
        CheckGroup::Separation,
        CheckGroup::Subadditivity,
        CheckGroup::CfNorms,
        CheckGroup::CfProduct,
        CheckGroup::Theorems,
        CheckGroup::Corollary,
        CheckGroup::Rates,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckGroup::Isotropy => "isotropy",
            CheckGroup::Separation => "separation",
            CheckGroup::Subadditivity => "subadditivity",
            CheckGroup::CfNorms => "cf_norms",
            CheckGroup::CfProduct => "cf_product",
            CheckGroup::Theorems => "theorems",
            CheckGroup::Corollary => "corollary",
            CheckGroup::Rates => "rates",
        }
    }

    pub fn parse(s: &str) -> anyhow::Result<Self> {
        Self::ALL
            .into_iter()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| {
                anyhow!(
                    "unknown check group `{s}` (known: {})",
                    Self::ALL.map(|g| g.as_str()).join(", ")
                )
            })
    }
}

/// Tolerance overrides for the run.
#[derive(Debug, Clone)]
pub struct Tolerances {
    pub mass_defect: f64,
    pub isotropy_slack: f64,
    pub envelope_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            mass_defect: 1e-6,
            isotropy_slack: 1e-9,
            envelope_slack: 1e-8,
        }
    }
}

/// Candidate constants for feasibility checks and caps.
#[derive(Debug, Clone)]
pub struct Constants {
    pub big_c: f64,
    pub small_c: f64,
    pub beta3_cap: f64,
    pub beta4_cap: f64,
    pub k_d: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            big_c: DEFAULT_BIG_C,
            small_c: DEFAULT_SMALL_C,
            beta3_cap: 3.0,
            beta4_cap: 12.0,
            k_d: 1.0,
        }
    }
}

/// A fully validated run configuration.
#[derive(Debug)]
pub struct RunConfig {
    pub output_dir: PathBuf,
    pub checks: BTreeSet<CheckGroup>,
    pub jobs: Option<usize>,
    pub tolerances: Tolerances,
    pub constants: Constants,
    pub experiments: Vec<Experiment>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    output_dir: Option<String>,
    checks: Option<Vec<String>>,
    jobs: Option<usize>,
    tolerances: Option<RawTolerances>,
    constants: Option<RawConstants>,
    #[serde(rename = "experiment")]
    experiments: Option<Vec<RawExperiment>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    mass_defect: Option<f64>,
    isotropy_slack: Option<f64>,
    envelope_slack: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstants {
    #[serde(rename = "C")]
    big_c: Option<f64>,
    c: Option<f64>,
    beta3_cap: Option<f64>,
    beta4_cap: Option<f64>,
    k_d: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    label: Option<String>,
    family: Option<String>,
    families: Option<Vec<String>>,
    dim: Option<usize>,
    sigma: Option<f64>,
    n_list: Vec<usize>,
    mode: Option<String>,
    grid: Option<RawGrid>,
    constants: Option<RawConstants>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    points: usize,
    half_width: Option<f64>,
}

/// Parse and validate a TOML configuration. Unknown keys, unknown family
/// ids, non-power-of-two grids, empty `n_list`s, and mode/family
/// mismatches are all rejected here with the parser's line information.
pub fn parse_config(text: &str) -> anyhow::Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| anyhow!("config parse error: {e}"))?;
    let experiments_raw = raw
        .experiments
        .ok_or_else(|| anyhow!("config needs at least one [[experiment]]"))?;
    if experiments_raw.is_empty() {
        bail!("config needs at least one [[experiment]]");
    }

    let checks: BTreeSet<CheckGroup> = match raw.checks {
        None => CheckGroup::ALL.into_iter().collect(),
        Some(list) => list
            .iter()
            .map(|s| CheckGroup::parse(s))
            .collect::<anyhow::Result<_>>()?,
    };

    let mut tolerances = Tolerances::default();
    if let Some(t) = raw.tolerances {
        if let Some(v) = t.mass_defect {
            tolerances.mass_defect = v;
        }
        if let Some(v) = t.isotropy_slack {
            tolerances.isotropy_slack = v;
        }
        if let Some(v) = t.envelope_slack {
            tolerances.envelope_slack = v;
        }
    }

    let mut constants = Constants::default();
    if let Some(c) = &raw.constants {
        apply_constants(&mut constants, c);
    }

    let mut experiments = Vec::with_capacity(experiments_raw.len());
    for (idx, e) in experiments_raw.iter().enumerate() {
        let dim = e.dim.unwrap_or(1);
        let sigma = e.sigma.unwrap_or(1.0);
        let ids: Vec<String> = match (&e.family, &e.families) {
            (Some(f), None) => vec![f.clone()],
            (None, Some(fs)) if !fs.is_empty() => fs.clone(),
            _ => bail!("experiment #{}: give `family` or a non-empty `families`", idx + 1),
        };
        let mut dists = Vec::with_capacity(ids.len());
        for id in &ids {
            let d = FamilyCatalog::build(id, dim, sigma)
                .with_context(|| format!("experiment #{} family `{id}`", idx + 1))?;
            dists.push(d);
        }
        let mode = match e.mode.as_deref() {
            None | Some("general") => Mode::General,
            Some("symmetric") => Mode::Symmetric,
            Some(other) => bail!(
                "experiment #{}: unknown mode `{other}` (general | symmetric)",
                idx + 1
            ),
        };
        let label = e.label.clone().unwrap_or_else(|| {
            if ids.len() == 1 {
                format!("{}-d{dim}", ids[0])
            } else {
                format!("{}-d{dim}", ids.join("+"))
            }
        });
        let mut exp = Experiment::new(label, dists, e.n_list.clone(), mode)
            .map_err(|err| anyhow!("experiment #{}: {err}", idx + 1))?;
        if let Some(g) = &e.grid {
            let half_width = g
                .half_width
                .unwrap_or(12.0 * sigma * (dim as f64).sqrt());
            exp.grid = Some(
                GridSpec::new(dim, half_width, g.points)
                    .map_err(|err| anyhow!("experiment #{}: {err}", idx + 1))?,
            );
        }
        exp.big_c = constants.big_c;
        exp.small_c = constants.small_c;
        if let Some(c) = &e.constants {
            let mut local = constants.clone();
            apply_constants(&mut local, c);
            exp.big_c = local.big_c;
            exp.small_c = local.small_c;
        }
        experiments.push(exp);
    }

    Ok(RunConfig {
        output_dir: PathBuf::from(raw.output_dir.unwrap_or_else(|| "out".into())),
        checks,
        jobs: raw.jobs,
        tolerances,
        constants,
        experiments,
    })
}

fn apply_constants(target: &mut Constants, raw: &RawConstants) {
    if let Some(v) = raw.big_c {
        target.big_c = v;
    }
    if let Some(v) = raw.c {
        target.small_c = v;
    }
    if let Some(v) = raw.beta3_cap {
        target.beta3_cap = v;
    }
    if let Some(v) = raw.beta4_cap {
        target.beta4_cap = v;
    }
    if let Some(v) = raw.k_d {
        target.k_d = v;
    }
}
