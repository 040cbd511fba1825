//! Correlation functions, CHSH values and (ε, θ) classification scans for the
//! rod-coupled singlet.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::operational::{classify, JointOutcomeProb, Tolerance};
use crate::singlet::{experiment_triple, joint_distribution_analytic};
use crate::sphere::{Direction, Epsilon};
use crate::{Error, Result};

/// `p1 + p4 − p2 − p3`.
pub fn correlation_from_joint(j: &JointOutcomeProb) -> f64 {
    (j.p1 + j.p4) - (j.p2 + j.p3)
}

/// Expectation of the product of the two ±1 outcomes on the singlet.
///
/// Closed form `clamp(−u1·u2 / ε, −1, 1)` for `ε > 0`; at `ε = 0` it is `+1`
/// when `u1·u2 ≤ 0` and `−1` otherwise.
pub fn correlation(u1: &Direction, u2: &Direction, eps: Epsilon) -> f64 {
    let c = u1.dot(u2);
    let e = eps.value();
    if e == 0.0 {
        if c <= 0.0 {
            1.0
        } else {
            -1.0
        }
    } else {
        (-c / e).clamp(-1.0, 1.0)
    }
}

/// Two settings per side and the elastic parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshSetup {
    pub a: Direction,
    pub a_prime: Direction,
    pub b: Direction,
    pub b_prime: Direction,
    pub epsilon: Epsilon,
}

impl ChshSetup {
    /// Polar angles of `a, a′, b, b′` used by [`ChshSetup::canonical`].
    pub const CANONICAL_ANGLES: [f64; 4] = [0.0, FRAC_PI_2, FRAC_PI_4, 3.0 * FRAC_PI_4];

    /// Settings in the `φ = 0` plane at the given polar angles.
    pub fn coplanar(angles: [f64; 4], epsilon: Epsilon) -> Result<Self> {
        Ok(ChshSetup {
            a: Direction::in_plane(angles[0])?,
            a_prime: Direction::in_plane(angles[1])?,
            b: Direction::in_plane(angles[2])?,
            b_prime: Direction::in_plane(angles[3])?,
            epsilon,
        })
    }

    /// `a = 0, a′ = π/2, b = π/4, b′ = 3π/4`.
    pub fn canonical(epsilon: Epsilon) -> Self {
        ChshSetup::coplanar(Self::CANONICAL_ANGLES, epsilon).expect("canonical angles are in range")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshResult {
    pub e_ab: f64,
    pub e_ab_prime: f64,
    pub e_a_prime_b: f64,
    pub e_a_prime_b_prime: f64,
    /// `|E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′)|`
    pub s: f64,
}

pub fn chsh(setup: &ChshSetup) -> ChshResult {
    let e = |u: &Direction, v: &Direction| correlation(u, v, setup.epsilon);
    let e_ab = e(&setup.a, &setup.b);
    let e_ab_prime = e(&setup.a, &setup.b_prime);
    let e_a_prime_b = e(&setup.a_prime, &setup.b);
    let e_a_prime_b_prime = e(&setup.a_prime, &setup.b_prime);
    ChshResult {
        e_ab,
        e_ab_prime,
        e_a_prime_b,
        e_a_prime_b_prime,
        s: (e_ab - e_ab_prime + e_a_prime_b + e_a_prime_b_prime).abs(),
    }
}

/// One (ε, θ) grid point of a scan. Field order is the CSV column order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub epsilon: f64,
    pub theta: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
    #[serde(rename = "E")]
    pub correlation: f64,
    pub compatible: bool,
    pub separated: bool,
    pub classical_joint: bool,
}

/// `points` equally spaced angles from 0 to π inclusive.
pub fn theta_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        n => (0..n).map(|k| k as f64 * PI / (n - 1) as f64).collect(),
    }
}

fn scan_row(eps: Epsilon, theta: f64, tol: Tolerance) -> Result<ScanRow> {
    let u1 = Direction::in_plane(0.0)?;
    let u2 = Direction::in_plane(theta)?;
    let joint = joint_distribution_analytic(&u1, &u2, eps);
    let report = classify(&experiment_triple(&u1, &u2, eps), tol)?;
    Ok(ScanRow {
        epsilon: eps.value(),
        theta,
        p1: joint.p1,
        p2: joint.p2,
        p3: joint.p3,
        p4: joint.p4,
        correlation: correlation_from_joint(&joint),
        compatible: report.compatible,
        separated: report.separated,
        classical_joint: report.classical_joint,
    })
}

/// Classifies the singlet joint test over every (ε, θ) pair, with the two
/// settings coplanar and `θ` apart. Rows come out ε-major, in input order.
pub fn scan(epsilons: &[f64], thetas: &[f64], tol: Tolerance) -> Result<Vec<ScanRow>> {
    let epsilons = epsilons
        .iter()
        .map(|&e| Epsilon::new(e))
        .collect::<Result<Vec<_>>>()?;
    for &theta in thetas {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::OutOfRange {
                name: "theta",
                value: theta,
                min: 0.0,
                max: PI,
            });
        }
    }
    let grid: Vec<(Epsilon, f64)> = epsilons
        .iter()
        .flat_map(|&e| thetas.iter().map(move |&t| (e, t)))
        .collect();
    grid.into_par_iter()
        .map(|(e, t)| scan_row(e, t, tol))
        .collect()
}
