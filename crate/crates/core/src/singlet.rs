//! Two sphere models whose particles are joined by a rigid rod, prepared in
//! the singlet state (both particles at the centre of their sphere).
//!
//! A joint test measures one side first with the elastic procedure. The rod
//! then drags the other particle to the point diametrically opposite the
//! eigenstate just reached and disengages, and the second side is measured
//! as an ordinary single sphere.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::operational::{ExperimentTriple, JointOutcomeProb};
use crate::sphere::{
    outcome_probability, sample_measurement, yes_no_at, BlochState, Direction, Epsilon,
    MeasurementOutcome,
};
use crate::{Error, Result};

/// Trials per independently seeded block in [`simulate`].
pub const BLOCK_SIZE: u64 = 16_384;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoupledState {
    pub left: BlochState,
    pub right: BlochState,
    pub rod_engaged: bool,
}

impl CoupledState {
    pub fn singlet() -> Self {
        CoupledState {
            left: BlochState::center(),
            right: BlochState::center(),
            rod_engaged: true,
        }
    }

    pub fn is_singlet(&self) -> bool {
        self.rod_engaged && self.left.is_center() && self.right.is_center()
    }

    /// Runs one joint test. Only the singlet preparation has defined rod
    /// dynamics; any other state is rejected.
    pub fn run_joint_test<R: Rng + ?Sized>(
        &self,
        spec: &JointTestSpec,
        rng: &mut R,
    ) -> Result<TrialRecord> {
        if !self.is_singlet() {
            return Err(Error::NotSinglet);
        }
        Ok(run_joint_trial(spec, rng))
    }
}

/// Which side of the compound system is measured first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Order {
    #[default]
    LeftFirst,
    RightFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointTestSpec {
    pub u1: Direction,
    pub u2: Direction,
    pub epsilon: Epsilon,
    pub order: Order,
}

impl JointTestSpec {
    pub fn new(u1: Direction, u2: Direction, epsilon: Epsilon) -> Self {
        JointTestSpec {
            u1,
            u2,
            epsilon,
            order: Order::LeftFirst,
        }
    }

    pub fn with_order(self, order: Order) -> Self {
        JointTestSpec { order, ..self }
    }
}

/// One of the four outcomes of a joint test, left result first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JointOutcome {
    /// (yes, yes)
    X1,
    /// (yes, no)
    X2,
    /// (no, yes)
    X3,
    /// (no, no)
    X4,
}

impl JointOutcome {
    pub const ALL: [JointOutcome; 4] = [
        JointOutcome::X1,
        JointOutcome::X2,
        JointOutcome::X3,
        JointOutcome::X4,
    ];

    pub fn from_pair(left: MeasurementOutcome, right: MeasurementOutcome) -> Self {
        use MeasurementOutcome::{No, Yes};
        match (left, right) {
            (Yes, Yes) => JointOutcome::X1,
            (Yes, No) => JointOutcome::X2,
            (No, Yes) => JointOutcome::X3,
            (No, No) => JointOutcome::X4,
        }
    }

    pub fn pair(self) -> (MeasurementOutcome, MeasurementOutcome) {
        use MeasurementOutcome::{No, Yes};
        match self {
            JointOutcome::X1 => (Yes, Yes),
            JointOutcome::X2 => (Yes, No),
            JointOutcome::X3 => (No, Yes),
            JointOutcome::X4 => (No, No),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            JointOutcome::X1 => "x1",
            JointOutcome::X2 => "x2",
            JointOutcome::X3 => "x3",
            JointOutcome::X4 => "x4",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub outcome: JointOutcome,
    pub post_left: BlochState,
    pub post_right: BlochState,
}

/// Point diametrically opposite a surface state.
fn antipode(s: &BlochState) -> BlochState {
    let [x, y, z] = s.vector();
    BlochState::from_vector([-x, -y, -z]).expect("antipode of a valid state is valid")
}

/// Joint distribution of the left-first joint test on the singlet.
///
/// With `c = u1·u2` and `ε > 0`: inside `|c| < ε` the (yes, yes) and (no, no)
/// cells carry `½(ε − c)/(2ε)` and the mixed cells `½(ε + c)/(2ε)`; for
/// `c ≥ ε` only the mixed cells occur, for `c ≤ −ε` only the equal ones. At
/// `ε = 0` the first test always answers yes, leaving (yes, no) for `c > 0`
/// and (yes, yes) otherwise.
pub fn joint_distribution_analytic(
    u1: &Direction,
    u2: &Direction,
    eps: Epsilon,
) -> JointOutcomeProb {
    let c = u1.dot(u2);
    let e = eps.value();
    if e == 0.0 {
        return if c > 0.0 {
            JointOutcomeProb {
                p1: 0.0,
                p2: 1.0,
                p3: 0.0,
                p4: 0.0,
            }
        } else {
            JointOutcomeProb {
                p1: 1.0,
                p2: 0.0,
                p3: 0.0,
                p4: 0.0,
            }
        };
    }
    if c >= e {
        JointOutcomeProb {
            p1: 0.0,
            p2: 0.5,
            p3: 0.5,
            p4: 0.0,
        }
    } else if c <= -e {
        JointOutcomeProb {
            p1: 0.5,
            p2: 0.0,
            p3: 0.0,
            p4: 0.5,
        }
    } else {
        let equal = 0.5 * ((e - c) / (2.0 * e));
        let mixed = 0.5 * ((e + c) / (2.0 * e));
        JointOutcomeProb {
            p1: equal,
            p2: mixed,
            p3: mixed,
            p4: equal,
        }
    }
}

/// Joint distribution obtained by chaining the single-sphere probabilities
/// through the rod, in the requested order.
///
/// For `ε > 0` both orders agree with [`joint_distribution_analytic`]. At
/// `ε = 0` the side measured first always answers yes, so the orders differ
/// whenever `u1·u2 > 0`.
pub fn sequential_joint_distribution(spec: &JointTestSpec) -> JointOutcomeProb {
    let e = spec.epsilon.value();
    let c = spec.u1.dot(&spec.u2);
    let (first_yes, first_no) = yes_no_at(0.0, e);
    // Second particle sits at -u_first after yes, +u_first after no.
    let (yes_after_yes, no_after_yes) = yes_no_at(-c, e);
    let (yes_after_no, no_after_no) = yes_no_at(c, e);
    match spec.order {
        Order::LeftFirst => JointOutcomeProb {
            p1: first_yes * yes_after_yes,
            p2: first_yes * no_after_yes,
            p3: first_no * yes_after_no,
            p4: first_no * no_after_no,
        },
        Order::RightFirst => JointOutcomeProb {
            p1: first_yes * yes_after_yes,
            p2: first_no * yes_after_no,
            p3: first_yes * no_after_yes,
            p4: first_no * no_after_no,
        },
    }
}

/// One joint test on a fresh singlet.
pub fn run_joint_trial<R: Rng + ?Sized>(spec: &JointTestSpec, rng: &mut R) -> TrialRecord {
    let (first_dir, second_dir) = match spec.order {
        Order::LeftFirst => (spec.u1, spec.u2),
        Order::RightFirst => (spec.u2, spec.u1),
    };
    let (first, first_post) =
        sample_measurement(&BlochState::center(), &first_dir, spec.epsilon, rng);
    // The rod drags the partner to the antipode, then lets go.
    let dragged = antipode(&first_post);
    let (second, second_post) = sample_measurement(&dragged, &second_dir, spec.epsilon, rng);
    match spec.order {
        Order::LeftFirst => TrialRecord {
            outcome: JointOutcome::from_pair(first, second),
            post_left: first_post,
            post_right: second_post,
        },
        Order::RightFirst => TrialRecord {
            outcome: JointOutcome::from_pair(second, first),
            post_left: second_post,
            post_right: first_post,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Simulation {
    pub trials: u64,
    pub counts: [u64; 4],
    pub frequencies: JointOutcomeProb,
}

fn run_block(spec: &JointTestSpec, seed: u64, block: u64, len: u64) -> [u64; 4] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    let mut counts = [0u64; 4];
    for _ in 0..len {
        counts[run_joint_trial(spec, &mut rng).outcome.index()] += 1;
    }
    counts
}

/// Monte Carlo estimate of the joint distribution.
///
/// Trials are split into blocks of [`BLOCK_SIZE`]; block `k` draws from the
/// ChaCha stream `k` of `seed`, so results depend only on `(seed, trials)`.
pub fn simulate(spec: &JointTestSpec, trials: u64, seed: u64) -> Result<Simulation> {
    if trials == 0 {
        return Err(Error::ZeroTrials);
    }
    let blocks = trials.div_ceil(BLOCK_SIZE);
    let per_block: Vec<[u64; 4]> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let len = BLOCK_SIZE.min(trials - b * BLOCK_SIZE);
            run_block(spec, seed, b, len)
        })
        .collect();
    let mut counts = [0u64; 4];
    for block in &per_block {
        for (total, n) in counts.iter_mut().zip(block) {
            *total += n;
        }
    }
    let n = trials as f64;
    let frequencies = JointOutcomeProb {
        p1: counts[0] as f64 / n,
        p2: counts[1] as f64 / n,
        p3: counts[2] as f64 / n,
        p4: counts[3] as f64 / n,
    };
    Ok(Simulation {
        trials,
        counts,
        frequencies,
    })
}

/// Stand-alone and joint distributions of the two tests on the singlet.
///
/// Each stand-alone test is the single-sphere test on a centre state:
/// `(½, ½)` for `ε > 0`, certain yes at `ε = 0`.
pub fn experiment_triple(u1: &Direction, u2: &Direction, eps: Epsilon) -> ExperimentTriple {
    let center = BlochState::center();
    ExperimentTriple {
        left: outcome_probability(&center, u1, eps),
        right: outcome_probability(&center, u2, eps),
        joint: joint_distribution_analytic(u1, u2, eps),
    }
}
