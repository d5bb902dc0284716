use serde::{Deserialize, Serialize};
use tablebench_core::BoundingBox;

use crate::error::ScoringError;

/// Rule for the per-object upper error bound, in centimeters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum UebPolicy {
    /// Five times the mean bounding-box dimension of the object.
    #[serde(rename = "size_based_2020")]
    SizeBased2020,
    /// A single fixed bound shared by every object.
    #[serde(rename = "constant_2021")]
    Constant2021 { constant_value: f64 },
}

impl UebPolicy {
    /// Builds the constant-bound policy, rejecting non-positive values.
    pub fn constant(constant_value: f64) -> Result<Self, ScoringError> {
        if !constant_value.is_finite() || constant_value <= 0.0 {
            return Err(ScoringError::NonPositiveConstant(constant_value));
        }
        Ok(UebPolicy::Constant2021 { constant_value })
    }

    /// Re-checks the invariants after deserialization.
    pub fn validate(&self) -> Result<(), ScoringError> {
        match *self {
            UebPolicy::SizeBased2020 => Ok(()),
            UebPolicy::Constant2021 { constant_value } => {
                Self::constant(constant_value).map(|_| ())
            }
        }
    }
}

/// Upper error bound for one object under the given policy.
pub fn ueb(bbox: &BoundingBox, policy: &UebPolicy) -> f64 {
    match *policy {
        UebPolicy::SizeBased2020 => 5.0 * bbox.mean_dimension(),
        UebPolicy::Constant2021 { constant_value } => constant_value,
    }
}
