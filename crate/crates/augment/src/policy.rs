//! Sub-policy tables in the AutoAugment style: a list of sub-policies, each
//! holding two point operations with their own probability and magnitude.
//! One sub-policy is chosen uniformly per image.

use imgcore::{Image, RngStream};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::params::PointOpKind;
use crate::pointops::point_op;
use crate::{AugError, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolicyOp {
    pub kind: PointOpKind,
    pub prob: f64,
    #[serde(default)]
    pub magnitude: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Policy {
    pub sub_policies: Vec<(PolicyOp, PolicyOp)>,
}

impl Policy {
    pub fn from_json(text: &str) -> Result<Self> {
        let policy: Policy =
            serde_json::from_str(text).map_err(|e| AugError::Spec(e.to_string()))?;
        policy.validate()?;
        Ok(policy)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sub_policies.is_empty() {
            return Err(AugError::InvalidInput("policy has no sub-policies".into()));
        }
        for (i, (a, b)) in self.sub_policies.iter().enumerate() {
            for op in [a, b] {
                if !(0.0..=1.0).contains(&op.prob) {
                    return Err(AugError::InvalidInput(format!(
                        "sub-policy {i}: probability {} outside [0, 1]",
                        op.prob
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Apply one uniformly chosen sub-policy. Draw order: the sub-policy index,
/// then one Bernoulli gate per op (both gates are always drawn so stream
/// positions do not depend on the first op's outcome).
pub fn apply_policy(policy: &Policy, img: &Image, rng: &mut RngStream) -> Result<(Image, Value)> {
    policy.validate()?;
    let idx = rng.index(policy.sub_policies.len());
    let (op1, op2) = &policy.sub_policies[idx];
    let fire1 = rng.bernoulli(op1.prob);
    let fire2 = rng.bernoulli(op2.prob);
    let mut out = img.clone();
    if fire1 {
        out = point_op(&out, op1.kind, op1.magnitude)?;
    }
    if fire2 {
        out = point_op(&out, op2.kind, op2.magnitude)?;
    }
    Ok((
        out,
        json!({
            "sub_policy": idx,
            "ops": [
                { "kind": op1.kind.as_str(), "fired": fire1 },
                { "kind": op2.kind.as_str(), "fired": fire2 },
            ],
        }),
    ))
}
