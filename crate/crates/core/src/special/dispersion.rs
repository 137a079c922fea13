use serde::{Deserialize, Serialize};

/// Linear dispersion relations of the BO-type family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DispersionKind {
    #[serde(rename = "KdV")]
    Kdv,
    #[serde(rename = "BO")]
    Bo,
    #[serde(rename = "ILW")]
    Ilw,
    /// The inter-channel coupling `k^2 / sinh(k delta)`.
    #[serde(rename = "ncILW-coupling")]
    NcIlwCoupling,
}

impl std::str::FromStr for DispersionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "kdv" => Ok(Self::Kdv),
            "bo" => Ok(Self::Bo),
            "ilw" => Ok(Self::Ilw),
            "ncilw-coupling" | "coupling" | "ncilw" => Ok(Self::NcIlwCoupling),
            other => Err(format!("unknown dispersion kind `{other}`")),
        }
    }
}

/// `Omega(k)` for the given kind; extended continuously to `k = 0`.
pub fn dispersion(kind: DispersionKind, k: f64, delta: f64) -> f64 {
    match kind {
        DispersionKind::Kdv => k * k * k * delta / 3.0,
        DispersionKind::Bo => {
            if k == 0.0 {
                0.0
            } else {
                k * k * k.signum()
            }
        }
        DispersionKind::Ilw => {
            if k == 0.0 {
                0.0
            } else {
                k * k / (k * delta).tanh()
            }
        }
        DispersionKind::NcIlwCoupling => {
            if k == 0.0 {
                0.0
            } else {
                k * k / (k * delta).sinh()
            }
        }
    }
}
