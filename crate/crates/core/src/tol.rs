//! Numerical tolerances shared by all stages.

use serde::{Deserialize, Serialize};

/// Distance of `I(+L)/pi` from the nearest integer accepted as quantized.
pub const EPS_TOPO: f64 = 1e-6;
/// Largest `|rho|` allowed at the grid edges.
pub const EPS_DECAY: f64 = 1e-10;
/// `|cos(I+ + I-)|` below which a node is marked as a cusp.
pub const EPS_CUSP: f64 = 1e-7;
/// Bisection tolerance for cusp roots in `xi1`.
pub const EPS_ROOT: f64 = 1e-10;
/// Gap in embedding space below which a crossing is a degeneracy.
pub const EPS_BRAID: f64 = 1e-6;
/// Light-likeness and gauge identities, relative to `kappa^2`.
pub const EPS_GEOM: f64 = 1e-8;

/// Overridable set of the tolerances above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub topo: f64,
    pub decay: f64,
    pub cusp: f64,
    pub root: f64,
    pub braid: f64,
    pub geom: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            topo: EPS_TOPO,
            decay: EPS_DECAY,
            cusp: EPS_CUSP,
            root: EPS_ROOT,
            braid: EPS_BRAID,
            geom: EPS_GEOM,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> crate::Result<()> {
        let all = [
            ("topo", self.topo),
            ("decay", self.decay),
            ("cusp", self.cusp),
            ("root", self.root),
            ("braid", self.braid),
            ("geom", self.geom),
        ];
        for (name, v) in all {
            if !(v.is_finite() && v > 0.0) {
                return Err(crate::Error::InvalidParameter(format!(
                    "tolerance {name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}
