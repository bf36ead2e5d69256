//! Suite orchestration: scenario configuration, model-id parsing, the case
//! runner, and the disk twist experiment. A scenario names a model, a seed,
//! and a sample budget; running it produces a [`report::Report`] whose cases
//! are evaluated concurrently but assembled in a fixed order, so the same
//! scenario always serializes to the same bytes.

pub mod report;
mod suites;

pub use report::{CaseReport, CaseStatus, Report, Summary, SCHEMA_VERSION};
pub use suites::disk_experiment;

use crate::error::{Error, Result};
use crate::model::{make_disk, make_r2n, product_model, ChartModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::sync::Arc;

/// What to run: a model id, a seed for the random draws, a sample budget,
/// an optional basepoint override, and optional per-suite tolerance
/// overrides keyed by case-id prefix.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub model: String,
    pub seed: u64,
    pub samples: usize,
    /// Override for the model's basepoint (chart coordinates).
    pub basepoint: Option<Vec<f64>>,
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            model: "r2n:1".to_string(),
            seed: 0,
            samples: 50,
            basepoint: None,
            tolerances: BTreeMap::new(),
        }
    }
}

/// Parsed model identifier. Grammar:
/// `r2n:<n>` | `h2` | `disk` | `torus` | `product:<chart>,<chart>`
/// where the product factors are chart models (no nested products, no torus).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelSpec {
    R2n(usize),
    HalfPlane,
    Disk,
    Torus,
    Product(Box<ModelSpec>, Box<ModelSpec>),
}

impl ModelSpec {
    pub fn parse(id: &str) -> Result<ModelSpec> {
        Self::parse_inner(id.trim(), true)
    }

    fn parse_inner(id: &str, top_level: bool) -> Result<ModelSpec> {
        if let Some(arg) = id.strip_prefix("r2n:") {
            let n: usize = arg
                .parse()
                .map_err(|_| Error::invalid(format!("bad pair count in model id '{id}'")))?;
            if !(1..=8).contains(&n) {
                return Err(Error::invalid(format!(
                    "model '{id}': pair count must be between 1 and 8"
                )));
            }
            return Ok(ModelSpec::R2n(n));
        }
        if let Some(args) = id.strip_prefix("product:") {
            if !top_level {
                return Err(Error::invalid("product factors must be plain chart models"));
            }
            let (a, b) = args.split_once(',').ok_or_else(|| {
                Error::invalid(format!(
                    "model '{id}': product needs two comma-separated factors"
                ))
            })?;
            let left = Self::parse_inner(a.trim(), false)?;
            let right = Self::parse_inner(b.trim(), false)?;
            return Ok(ModelSpec::Product(Box::new(left), Box::new(right)));
        }
        match id {
            "h2" => Ok(ModelSpec::HalfPlane),
            "disk" => Ok(ModelSpec::Disk),
            "torus" => {
                if top_level {
                    Ok(ModelSpec::Torus)
                } else {
                    Err(Error::invalid("the torus model cannot be a product factor"))
                }
            }
            _ => Err(Error::invalid(format!(
                "unknown model id '{id}' (expected r2n:<n>, h2, disk, torus, or product:<a>,<b>)"
            ))),
        }
    }

    /// Normalized form of the id (whitespace stripped).
    pub fn id(&self) -> String {
        match self {
            ModelSpec::R2n(n) => format!("r2n:{n}"),
            ModelSpec::HalfPlane => "h2".to_string(),
            ModelSpec::Disk => "disk".to_string(),
            ModelSpec::Torus => "torus".to_string(),
            ModelSpec::Product(a, b) => format!("product:{},{}", a.id(), b.id()),
        }
    }

    /// Realize the model. Chart models share one construction path; the
    /// torus has no global chart and is handled by its own suite.
    pub fn build(&self) -> Result<BuiltModel> {
        Ok(match self {
            ModelSpec::Torus => BuiltModel::Torus,
            other => BuiltModel::Chart(other.build_chart()?),
        })
    }

    fn build_chart(&self) -> Result<Arc<ChartModel>> {
        Ok(match self {
            ModelSpec::R2n(n) => Arc::new(make_r2n(*n)),
            ModelSpec::HalfPlane => Arc::new(crate::model::hyperbolic::make_h2()),
            ModelSpec::Disk => Arc::new(make_disk()),
            ModelSpec::Product(a, b) => Arc::new(product_model(a.build_chart()?, b.build_chart()?)),
            ModelSpec::Torus => return Err(Error::invalid("the torus model has no global chart")),
        })
    }
}

/// A realized model: either a chart model or the (chartless) torus.
pub enum BuiltModel {
    Chart(Arc<ChartModel>),
    Torus,
}

/// FNV-1a over bytes; stable case-id hashing for digests and seed derivation.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Mix two words into one (splitmix-style diffusion) so per-case streams
/// derived from (scenario seed, case id) stay decorrelated.
fn mix(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.rotate_left(29);
    z = z.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z ^= z >> 31;
    z = z.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z ^ (z >> 27)
}

/// What one case produced: named values, the residual to gate on, and a
/// human-oriented note. `info` marks exploratory cases that never fail.
pub(crate) struct CaseOutcome {
    pub values: BTreeMap<String, f64>,
    pub residual: f64,
    pub note: String,
    pub info: bool,
}

impl CaseOutcome {
    pub fn new(residual: f64, note: impl Into<String>) -> Self {
        CaseOutcome {
            values: BTreeMap::new(),
            residual,
            note: note.into(),
            info: false,
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.values.insert(key.to_string(), value);
        self
    }

    pub fn info(mut self) -> Self {
        self.info = true;
        self
    }
}

type CaseFn = Box<dyn Fn(&mut ChaCha8Rng) -> Result<CaseOutcome> + Send + Sync>;

/// A named check with a default tolerance and a closure that runs it against
/// a case-local deterministic RNG.
pub(crate) struct Case {
    pub id: String,
    pub tolerance: f64,
    pub run: CaseFn,
}

impl Case {
    pub fn new(
        id: &str,
        tolerance: f64,
        run: impl Fn(&mut ChaCha8Rng) -> Result<CaseOutcome> + Send + Sync + 'static,
    ) -> Self {
        Case {
            id: id.to_string(),
            tolerance,
            run: Box::new(run),
        }
    }

    fn suite_prefix(&self) -> &str {
        self.id.split('/').next().unwrap_or(&self.id)
    }
}

/// Run one scenario: build the model, assemble its case list, apply
/// tolerance overrides, evaluate every case (concurrently; each case owns a
/// ChaCha stream seeded from the scenario seed and its id), and assemble the
/// report in case-id order.
///
/// Returns `Err` only for usage-level problems (unknown model, override for
/// a suite that does not exist); evaluation failures inside a case are
/// captured as `error`-status rows.
pub fn run_suite(scenario: &Scenario) -> Result<Report> {
    let spec = ModelSpec::parse(&scenario.model)?;
    if scenario.samples == 0 {
        return Err(Error::invalid("sample budget must be positive"));
    }
    let built = spec.build()?;
    let mut cases = suites::verify_cases(&built, &spec, scenario)?;

    for (key, value) in &scenario.tolerances {
        if !value.is_finite() || *value < 0.0 {
            return Err(Error::invalid(format!(
                "tolerance override '{key}' must be a nonnegative number"
            )));
        }
        let mut hit = false;
        for case in &mut cases {
            if case.suite_prefix() == key || case.id == *key {
                case.tolerance = *value;
                hit = true;
            }
        }
        if !hit {
            return Err(Error::invalid(format!(
                "tolerance override '{key}' matches no suite or case in this scenario"
            )));
        }
    }

    cases.sort_by(|a, b| a.id.cmp(&b.id));
    let mut report = Report::new("verify", &spec.id(), scenario.seed, scenario.samples);
    let rows: Vec<CaseReport> = cases
        .par_iter()
        .map(|case| evaluate_case(case, scenario))
        .collect();
    report.set_cases(rows);
    Ok(report)
}

pub(crate) fn evaluate_case(case: &Case, scenario: &Scenario) -> CaseReport {
    let stream = mix(scenario.seed, fnv1a(case.id.as_bytes()));
    let digest = format!("{:016x}", mix(stream, scenario.samples as u64));
    let mut rng = ChaCha8Rng::seed_from_u64(stream);
    match (case.run)(&mut rng) {
        Ok(outcome) => {
            let status = if !outcome.residual.is_finite() {
                CaseStatus::Error
            } else if outcome.info {
                CaseStatus::Info
            } else if outcome.residual.abs() <= case.tolerance {
                CaseStatus::Pass
            } else {
                CaseStatus::Fail
            };
            let note = if status == CaseStatus::Error {
                format!("residual is not finite; {}", outcome.note)
            } else {
                outcome.note
            };
            CaseReport {
                id: case.id.clone(),
                digest,
                values: outcome.values,
                residual: outcome.residual.is_finite().then_some(outcome.residual),
                tolerance: case.tolerance,
                status,
                note,
            }
        }
        Err(err) => CaseReport {
            id: case.id.clone(),
            digest,
            values: BTreeMap::new(),
            residual: None,
            tolerance: case.tolerance,
            status: CaseStatus::Error,
            note: err.to_string(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_ids_round_trip() {
        for id in ["r2n:1", "r2n:3", "h2", "disk", "torus", "product:r2n:1,h2"] {
            let spec = ModelSpec::parse(id).unwrap();
            assert_eq!(spec.id(), id);
        }
        assert_eq!(
            ModelSpec::parse(" product:r2n:2 , disk ").unwrap().id(),
            "product:r2n:2,disk"
        );
    }

    #[test]
    fn bad_model_ids_are_usage_errors() {
        for id in [
            "r2n:0",
            "r2n:99",
            "r2n:x",
            "plane",
            "product:torus,h2",
            "product:r2n:1",
            "product:product:r2n:1,r2n:1,h2",
        ] {
            assert!(ModelSpec::parse(id).is_err(), "{id} should not parse");
        }
    }

    #[test]
    fn unknown_tolerance_override_is_rejected() {
        let scenario = Scenario {
            model: "r2n:1".into(),
            tolerances: [("nope".to_string(), 1.0)].into_iter().collect(),
            samples: 3,
            ..Scenario::default()
        };
        let err = run_suite(&scenario).unwrap_err();
        assert!(err.to_string().contains("nope"));
    }

    #[test]
    fn case_streams_differ_by_id() {
        assert_ne!(
            mix(7, fnv1a(b"cocycle/identity")),
            mix(7, fnv1a(b"cocycle/normalized"))
        );
        assert_ne!(mix(7, fnv1a(b"a")), mix(8, fnv1a(b"a")));
    }
}
