//! The single tolerance record every numerical routine reads.
//!
//! The process-wide record starts at [`Tolerances::default`] and may be
//! replaced once at startup (the CLI does this for `--tol-file`). Library code
//! reads it through [`tolerances`]; nothing else in the crate hard-codes a
//! threshold.

use std::sync::RwLock;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Primal/dual feasibility of LP iterates and of reduced costs.
    pub feasibility: f64,
    /// Smallest pivot accepted when refactorizing a basis.
    pub pivot: f64,
    /// Relative duality gap accepted at an LP optimum.
    pub gap: f64,
    /// Base of the comparison slack `comparison * (1 + L(u) * diam)`.
    pub comparison: f64,
    /// Mass-balance slack for probability vectors and KR elements.
    pub mass: f64,
    /// Relative slack on the triangle inequality.
    pub metric: f64,
    /// Separating-witness margins at or below this are not strict.
    pub witness: f64,
    /// Lower edge of the witness "boundary" band.
    pub boundary: f64,
    /// Slack on cumulative/lower-set mass comparisons.
    pub dominance: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            feasibility: 1e-9,
            pivot: 1e-13,
            gap: 1e-8,
            comparison: 1e-9,
            mass: 1e-12,
            metric: 1e-12,
            witness: 1e-9,
            boundary: 1e-12,
            dominance: 1e-12,
        }
    }
}

static GLOBAL: RwLock<Option<Tolerances>> = RwLock::new(None);

/// The tolerance record currently in force.
pub fn tolerances() -> Tolerances {
    GLOBAL
        .read()
        .map(|g| g.unwrap_or_default())
        .unwrap_or_default()
}

/// Replace the process-wide tolerance record.
pub fn set_tolerances(t: Tolerances) {
    if let Ok(mut g) = GLOBAL.write() {
        *g = Some(t);
    }
}
