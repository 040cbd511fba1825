//! Yes/no tests, their outcome probabilities, and the predicates that decide
//! whether two tests are compatible, separated or classical.
//!
//! A pair of tests is described by an [`ExperimentTriple`]: the outcome
//! distribution of each test performed alone in the given state, plus the
//! four-outcome distribution of the joint test. Compatibility asks that the
//! stand-alone distributions are the marginals of the joint one; separability
//! asks that the joint distribution is the product of the stand-alone ones.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Absolute tolerance on probability residuals.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Tolerance(f64);

impl Tolerance {
    /// Default for analytically computed probabilities.
    pub const ANALYTIC: Tolerance = Tolerance(1e-9);

    pub fn new(eps_prob: f64) -> Result<Self> {
        if eps_prob.is_finite() && eps_prob > 0.0 {
            Ok(Tolerance(eps_prob))
        } else {
            Err(Error::InvalidTolerance(eps_prob))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::ANALYTIC
    }
}

fn check_probabilities(what: &str, ps: &[f64], tol: f64) -> Result<()> {
    for &p in ps {
        if !p.is_finite() || p < -tol || p > 1.0 + tol {
            return Err(Error::InvalidDistribution(format!(
                "{what}: component {p} is not a probability"
            )));
        }
    }
    let sum: f64 = ps.iter().sum();
    if (sum - 1.0).abs() > tol {
        return Err(Error::InvalidDistribution(format!(
            "{what}: components sum to {sum}"
        )));
    }
    Ok(())
}

/// Distribution of a single yes/no test in one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeProb {
    pub p_yes: f64,
    pub p_no: f64,
}

impl OutcomeProb {
    pub fn new(p_yes: f64, p_no: f64) -> Result<Self> {
        let o = OutcomeProb { p_yes, p_no };
        o.validate(Tolerance::default())?;
        Ok(o)
    }

    /// Distribution with `p_no = 1 - p_yes`.
    pub fn from_yes(p_yes: f64) -> Result<Self> {
        OutcomeProb::new(p_yes, 1.0 - p_yes)
    }

    pub fn certain_yes() -> Self {
        OutcomeProb {
            p_yes: 1.0,
            p_no: 0.0,
        }
    }

    pub fn certain_no() -> Self {
        OutcomeProb {
            p_yes: 0.0,
            p_no: 1.0,
        }
    }

    pub fn uniform() -> Self {
        OutcomeProb {
            p_yes: 0.5,
            p_no: 0.5,
        }
    }

    pub fn validate(&self, tol: Tolerance) -> Result<()> {
        check_probabilities(
            "outcome distribution",
            &[self.p_yes, self.p_no],
            tol.value(),
        )
    }
}

/// Distribution over the four outcomes of a joint test.
///
/// `p1` is (yes, yes), `p2` is (yes, no), `p3` is (no, yes) and `p4` is
/// (no, no), with the left test listed first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointOutcomeProb {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
}

impl JointOutcomeProb {
    pub fn new(p1: f64, p2: f64, p3: f64, p4: f64) -> Result<Self> {
        let j = JointOutcomeProb { p1, p2, p3, p4 };
        j.validate(Tolerance::default())?;
        Ok(j)
    }

    pub fn from_array(p: [f64; 4]) -> Result<Self> {
        JointOutcomeProb::new(p[0], p[1], p[2], p[3])
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.p1, self.p2, self.p3, self.p4]
    }

    pub fn validate(&self, tol: Tolerance) -> Result<()> {
        check_probabilities("joint distribution", &self.to_array(), tol.value())
    }

    /// Distribution of the left test read off the joint test.
    pub fn left_marginal(&self) -> OutcomeProb {
        OutcomeProb {
            p_yes: self.p1 + self.p2,
            p_no: self.p3 + self.p4,
        }
    }

    /// Distribution of the right test read off the joint test.
    pub fn right_marginal(&self) -> OutcomeProb {
        OutcomeProb {
            p_yes: self.p1 + self.p3,
            p_no: self.p2 + self.p4,
        }
    }

    /// Product distribution of two independent tests.
    pub fn product(left: OutcomeProb, right: OutcomeProb) -> Self {
        JointOutcomeProb {
            p1: left.p_yes * right.p_yes,
            p2: left.p_yes * right.p_no,
            p3: left.p_no * right.p_yes,
            p4: left.p_no * right.p_no,
        }
    }
}

/// Stand-alone distributions of two tests together with their joint test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentTriple {
    pub left: OutcomeProb,
    pub right: OutcomeProb,
    pub joint: JointOutcomeProb,
}

impl ExperimentTriple {
    pub fn new(left: OutcomeProb, right: OutcomeProb, joint: JointOutcomeProb) -> Self {
        ExperimentTriple { left, right, joint }
    }

    pub fn validate(&self, tol: Tolerance) -> Result<()> {
        self.left.validate(tol)?;
        self.right.validate(tol)?;
        self.joint.validate(tol)
    }
}

/// Outcome of one of the defining-equation checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub holds: bool,
    /// `|lhs - rhs|` for each of the four defining equations.
    pub residuals: [f64; 4],
}

impl Check {
    fn from_residuals(residuals: [f64; 4], tol: Tolerance) -> Self {
        Check {
            holds: residuals.iter().all(|&r| r <= tol.value()),
            residuals,
        }
    }
}

/// Do the stand-alone distributions coincide with the marginals of the joint
/// test?
pub fn check_compatibility(t: &ExperimentTriple, tol: Tolerance) -> Result<Check> {
    t.validate(tol)?;
    let j = &t.joint;
    let residuals = [
        (t.left.p_yes - (j.p1 + j.p2)).abs(),
        (t.left.p_no - (j.p3 + j.p4)).abs(),
        (t.right.p_yes - (j.p1 + j.p3)).abs(),
        (t.right.p_no - (j.p2 + j.p4)).abs(),
    ];
    Ok(Check::from_residuals(residuals, tol))
}

/// Does the joint distribution factor into the stand-alone distributions?
pub fn check_separability(t: &ExperimentTriple, tol: Tolerance) -> Result<Check> {
    t.validate(tol)?;
    let product = JointOutcomeProb::product(t.left, t.right).to_array();
    let joint = t.joint.to_array();
    let mut residuals = [0.0; 4];
    for (r, (p, q)) in residuals.iter_mut().zip(joint.iter().zip(product.iter())) {
        *r = (p - q).abs();
    }
    Ok(Check::from_residuals(residuals, tol))
}

/// `p1·p4 = p2·p3`: for a joint test compatible with its marginals this is
/// equivalent to separability.
pub fn check_product_criterion(j: &JointOutcomeProb, tol: Tolerance) -> Result<bool> {
    j.validate(tol)?;
    Ok((j.p1 * j.p4 - j.p2 * j.p3).abs() <= tol.value())
}

/// A test is classical in a state when exactly one outcome is possible.
pub fn is_classical_test(o: &OutcomeProb, tol: Tolerance) -> bool {
    let certain = 1.0 - tol.value();
    o.p_yes >= certain || o.p_no >= certain
}

pub fn is_classical_joint(j: &JointOutcomeProb, tol: Tolerance) -> bool {
    let certain = 1.0 - tol.value();
    j.to_array().iter().any(|&p| p >= certain)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub compatible: bool,
    pub separated: bool,
    pub classical_left: bool,
    pub classical_right: bool,
    pub classical_joint: bool,
    pub compatibility_residuals: [f64; 4],
    pub separability_residuals: [f64; 4],
}

pub fn classify(t: &ExperimentTriple, tol: Tolerance) -> Result<ClassificationReport> {
    let compatibility = check_compatibility(t, tol)?;
    let separability = check_separability(t, tol)?;
    Ok(ClassificationReport {
        compatible: compatibility.holds,
        // Separated tests are in particular compatible.
        separated: compatibility.holds && separability.holds,
        classical_left: is_classical_test(&t.left, tol),
        classical_right: is_classical_test(&t.right, tol),
        classical_joint: is_classical_joint(&t.joint, tol),
        compatibility_residuals: compatibility.residuals,
        separability_residuals: separability.residuals,
    })
}

/// The two joint experiments on a pair of connected water vessels holding
/// 20 liters in total.
///
/// Each vessel test asks "can more than 10 liters be taken out here?" and is
/// answered yes with certainty when performed alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VesselsKind {
    /// The same question asked at both vessels.
    AlphaAlpha,
    /// The question at the left vessel combined with the right-vessel test
    /// that answers yes when the water drawn is transparent.
    AlphaBeta,
}

pub fn vessels_scenario(kind: VesselsKind) -> ExperimentTriple {
    let yes = OutcomeProb::certain_yes();
    let joint = match kind {
        // Both sides cannot deliver more than 10 liters at once; which side
        // wins is symmetric.
        VesselsKind::AlphaAlpha => JointOutcomeProb {
            p1: 0.0,
            p2: 0.5,
            p3: 0.5,
            p4: 0.0,
        },
        VesselsKind::AlphaBeta => JointOutcomeProb {
            p1: 0.5,
            p2: 0.0,
            p3: 0.5,
            p4: 0.0,
        },
    };
    ExperimentTriple::new(yes, yes, joint)
}
