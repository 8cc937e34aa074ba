//! The JSON each subcommand prints. These types are the output contract:
//! the shipped schemas are generated from them and every output must
//! deserialize back into its type.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct PosetSummary {
    pub lower_sets: usize,
    pub distance_increasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ValidateOut {
    pub valid: bool,
    pub points: usize,
    pub base: usize,
    pub diameter: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poset: Option<PosetSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct W1Out {
    pub w1: f64,
    pub plan: Vec<Vec<f64>>,
    pub potential: Vec<f64>,
    pub dual_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct KrNormOut {
    pub kr_norm: f64,
    pub kr_norm_dual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub enum Comparison {
    StrictBetter,
    Indifferent,
    Incomparable,
    StrictWorse,
}

impl From<krorder::preorder::ComparisonResult> for Comparison {
    fn from(c: krorder::preorder::ComparisonResult) -> Self {
        use krorder::preorder::ComparisonResult as C;
        match c {
            C::StrictBetter => Comparison::StrictBetter,
            C::Indifferent => Comparison::Indifferent,
            C::Incomparable => Comparison::Incomparable,
            C::StrictWorse => Comparison::StrictWorse,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct CompareOut {
    pub result: Comparison,
    /// `∫u d(p - q)` per member.
    pub margins: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct MarginOut {
    pub margin: f64,
    pub member: usize,
    pub adversarial_p: Vec<f64>,
    pub adversarial_q: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ViolationOut {
    pub trial: usize,
    pub lambda: f64,
    pub bound: f64,
    pub w1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct CertifyOut {
    pub margin: f64,
    pub trials: usize,
    pub checked: usize,
    pub skipped: usize,
    pub boundary: usize,
    pub violations: Vec<ViolationOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct WitnessOut {
    pub witness: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<bool>,
    pub optimum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct MembershipOut {
    pub member: bool,
    pub coefficients: Option<Vec<f64>>,
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RepresentOut {
    pub members: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum DominanceMethod {
    Univariate,
    Poset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct DominanceOut {
    pub dominates: bool,
    pub violating_set: Option<Vec<usize>>,
    pub method: DominanceMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct MaxsetOut {
    pub maximal: Vec<usize>,
    pub lower: Vec<usize>,
    pub upper: Vec<usize>,
    pub upper_members: Vec<usize>,
    pub truncation: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct FailingProbe {
    pub probe: usize,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct AffineCoreOut {
    pub oracle_prefers: bool,
    pub holds: bool,
    pub approximate: bool,
    pub failing_probe: Option<FailingProbe>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct PriorOut {
    pub prior: Vec<f64>,
    pub base_utilities: Vec<Vec<f64>>,
    /// Present with `--act`: whether the act is indifferent to its reduction
    /// under some prior.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub act_sophisticated: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub act_prior: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct PortfolioOut {
    pub alpha: Vec<f64>,
    pub value: f64,
    pub certificate_norm: f64,
    pub certified: bool,
    pub lipschitz_bound: f64,
    pub concave: bool,
    pub best_start: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct CriterionOut {
    pub id: String,
    pub title: String,
    pub passed: bool,
    pub trials: usize,
    pub failures: usize,
    pub excluded: usize,
    pub worst: f64,
    pub tolerance: f64,
    pub note: String,
}

impl From<krorder::selftest::CriterionReport> for CriterionOut {
    fn from(c: krorder::selftest::CriterionReport) -> Self {
        CriterionOut {
            id: c.id,
            title: c.title,
            passed: c.passed,
            trials: c.trials,
            failures: c.failures,
            excluded: c.excluded,
            worst: c.worst,
            tolerance: c.tolerance,
            note: c.note,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SelftestOut {
    pub seed: u64,
    pub passed: usize,
    pub total: usize,
    pub criteria: Vec<CriterionOut>,
    pub supplementary: Vec<CriterionOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ErrorOut {
    pub error: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub command: String,
    pub arguments: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub tolerances: serde_json::Value,
    pub seed: u64,
    pub version: String,
    pub output_sha256: String,
}

/// Schema name and generated schema for every output type.
pub fn schemas() -> Vec<(&'static str, schemars::schema::RootSchema)> {
    use schemars::schema_for;
    vec![
        ("validate", schema_for!(ValidateOut)),
        ("w1", schema_for!(W1Out)),
        ("krnorm", schema_for!(KrNormOut)),
        ("compare", schema_for!(CompareOut)),
        ("margin", schema_for!(MarginOut)),
        ("certify", schema_for!(CertifyOut)),
        ("witness", schema_for!(WitnessOut)),
        ("membership", schema_for!(MembershipOut)),
        ("represent", schema_for!(RepresentOut)),
        ("dominance", schema_for!(DominanceOut)),
        ("maxset", schema_for!(MaxsetOut)),
        ("affinecore", schema_for!(AffineCoreOut)),
        ("prior", schema_for!(PriorOut)),
        ("portfolio", schema_for!(PortfolioOut)),
        ("selftest", schema_for!(SelftestOut)),
        ("error", schema_for!(ErrorOut)),
        ("manifest", schema_for!(RunManifest)),
    ]
}

/// Deserialize `json` as the output type of `command`, rejecting unknown
/// fields.
pub fn validate_output(command: &str, json: &str) -> Result<(), String> {
    fn check<T: serde::de::DeserializeOwned>(json: &str) -> Result<(), String> {
        serde_json::from_str::<T>(json).map(|_| ()).map_err(|e| e.to_string())
    }
    match command {
        "validate" => check::<ValidateOut>(json),
        "w1" => check::<W1Out>(json),
        "krnorm" => check::<KrNormOut>(json),
        "compare" => check::<CompareOut>(json),
        "margin" => check::<MarginOut>(json),
        "certify" => check::<CertifyOut>(json),
        "witness" => check::<WitnessOut>(json),
        "membership" => check::<MembershipOut>(json),
        "represent" => check::<RepresentOut>(json),
        "dominance" => check::<DominanceOut>(json),
        "maxset" => check::<MaxsetOut>(json),
        "affinecore" => check::<AffineCoreOut>(json),
        "prior" => check::<PriorOut>(json),
        "portfolio" => check::<PortfolioOut>(json),
        "selftest" => check::<SelftestOut>(json),
        "error" => check::<ErrorOut>(json),
        "manifest" => check::<RunManifest>(json),
        other => Err(format!("no schema for `{other}`")),
    }
}
