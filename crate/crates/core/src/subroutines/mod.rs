//! Classical clustering algorithms run on the sample.

mod charikar;
mod gonzalez;
mod lloyd;
mod median;
mod seeding;

pub use charikar::{charikar_kcenter_outliers, MAX_POINTS as MAX_CHARIKAR_POINTS};
pub use gonzalez::{gonzalez_kcenter, gonzalez_kcenter_from};
pub use lloyd::{lloyd, trimmed_lloyd, LloydOutcome};
pub use median::geometric_median;
pub use seeding::kmeanspp_seed;

use serde::{Deserialize, Serialize};

use crate::types::CenterSet;

/// Centers covering a point set with the given radius.
#[derive(Debug, Clone, PartialEq)]
pub struct KCenterSolution {
    pub centers: CenterSet,
    /// Indices into the input of the points chosen as centers.
    pub center_indices: Vec<usize>,
    /// Max distance of the covered points to their nearest center.
    pub radius: f64,
}

/// Stopping rule for Lloyd-style iterations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterConfig {
    pub max_iters: usize,
    /// Stop once the relative objective improvement falls below this.
    pub tol: f64,
    /// Snap every updated center to its nearest input point.
    #[serde(default)]
    pub restrict_centers_to_input: bool,
}

impl Default for IterConfig {
    fn default() -> Self {
        IterConfig { max_iters: 100, tol: 1e-6, restrict_centers_to_input: false }
    }
}
