//! Single spin-1/2 on the Poincaré (Bloch) sphere with the elastic-band
//! measurement.
//!
//! A state is a point of the unit ball; the surface holds the pure states.
//! The test along a direction `u` places an elastic of length `2ε` through
//! the centre, lets the particle fall orthogonally onto it at the projection
//! `a = v·u`, and breaks the elastic at a uniformly random point `λ` of
//! `[-ε, ε]`. The particle is pulled to `u` (outcome yes) when `λ ≤ a` and to
//! `-u` (outcome no) otherwise. At `ε = 1` this reproduces the quantum
//! transition probabilities; at `ε = 0` every test is deterministic.

use std::fmt;
use std::ops::Neg;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::operational::OutcomeProb;
use crate::{Error, Result};

const NORM_TOL: f64 = 1e-12;
const DENSITY_TOL: f64 = 1e-10;

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(v: &[f64; 3]) -> f64 {
    dot(v, v).sqrt()
}

fn check_polar(theta: f64, phi: f64) -> Result<()> {
    use std::f64::consts::PI;
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta,
            min: 0.0,
            max: PI,
        });
    }
    if !(0.0..2.0 * PI).contains(&phi) {
        return Err(Error::OutOfRange {
            name: "phi",
            value: phi,
            min: 0.0,
            max: 2.0 * PI,
        });
    }
    Ok(())
}

fn unit_vector(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

/// Unit measurement axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction([f64; 3]);

impl Direction {
    /// Direction `(sin θ cos φ, sin θ sin φ, cos θ)` with `θ ∈ [0, π]`,
    /// `φ ∈ [0, 2π)`.
    pub fn from_angles(theta: f64, phi: f64) -> Result<Self> {
        check_polar(theta, phi)?;
        Ok(Direction(unit_vector(theta, phi)))
    }

    /// Direction in the `φ = 0` plane at polar angle `theta`.
    pub fn in_plane(theta: f64) -> Result<Self> {
        Direction::from_angles(theta, 0.0)
    }

    pub fn new(v: [f64; 3]) -> Result<Self> {
        let n = norm(&v);
        if !n.is_finite() || (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidDirection(format!("norm {n} is not 1")));
        }
        Ok(Direction(v))
    }

    /// Rescales a non-zero vector to unit length.
    pub fn normalized(v: [f64; 3]) -> Result<Self> {
        let n = norm(&v);
        if !n.is_finite() || n == 0.0 {
            return Err(Error::InvalidDirection(
                "cannot normalize zero vector".into(),
            ));
        }
        Ok(Direction([v[0] / n, v[1] / n, v[2] / n]))
    }

    pub fn north() -> Self {
        Direction([0.0, 0.0, 1.0])
    }

    pub fn vector(&self) -> [f64; 3] {
        self.0
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        dot(&self.0, &other.0)
    }
}

impl Neg for Direction {
    type Output = Direction;

    fn neg(self) -> Direction {
        Direction([-self.0[0], -self.0[1], -self.0[2]])
    }
}

/// Point of the unit ball: `r · u(θ, φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochState([f64; 3]);

impl BlochState {
    pub fn from_polar(r: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::OutOfRange {
                name: "r",
                value: r,
                min: 0.0,
                max: 1.0,
            });
        }
        check_polar(theta, phi)?;
        let u = unit_vector(theta, phi);
        Ok(BlochState([r * u[0], r * u[1], r * u[2]]))
    }

    pub fn from_vector(v: [f64; 3]) -> Result<Self> {
        let n = norm(&v);
        if !n.is_finite() || n > 1.0 + NORM_TOL {
            return Err(Error::InvalidState(format!("norm {n} exceeds 1")));
        }
        Ok(BlochState(v))
    }

    /// Maximally mixed state.
    pub fn center() -> Self {
        BlochState([0.0; 3])
    }

    /// Pure state (eigenstate of the test along `u` with outcome yes).
    pub fn surface(u: Direction) -> Self {
        BlochState(u.0)
    }

    pub fn vector(&self) -> [f64; 3] {
        self.0
    }

    pub fn radius(&self) -> f64 {
        norm(&self.0)
    }

    pub fn is_pure(&self) -> bool {
        (self.radius() - 1.0).abs() <= NORM_TOL
    }

    pub fn is_center(&self) -> bool {
        self.0 == [0.0; 3]
    }

    /// Polar angles `(θ, φ)`; both zero at the centre.
    pub fn angles(&self) -> (f64, f64) {
        let r = self.radius();
        if r == 0.0 {
            return (0.0, 0.0);
        }
        let [x, y, z] = self.0;
        let theta = (z / r).clamp(-1.0, 1.0).acos();
        let mut phi = y.atan2(x);
        if phi < 0.0 {
            phi += 2.0 * std::f64::consts::PI;
        }
        (theta, phi)
    }
}

/// Half-length of the breakable part of the elastic.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Epsilon(f64);

impl Epsilon {
    pub const QUANTUM: Epsilon = Epsilon(1.0);
    pub const CLASSICAL: Epsilon = Epsilon(0.0);

    pub fn new(eps: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&eps) {
            Ok(Epsilon(eps))
        } else {
            Err(Error::InvalidEpsilon(eps))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_classical(self) -> bool {
        self.0 == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasurementOutcome {
    Yes,
    No,
}

impl MeasurementOutcome {
    pub fn is_yes(self) -> bool {
        self == MeasurementOutcome::Yes
    }
}

impl fmt::Display for MeasurementOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasurementOutcome::Yes => f.write_str("yes"),
            MeasurementOutcome::No => f.write_str("no"),
        }
    }
}

/// Landing point of the particle on the elastic.
pub fn projection(s: &BlochState, u: &Direction) -> f64 {
    dot(&s.0, &u.0)
}

/// `(p_yes, p_no)` for a particle landing at `a` on an elastic of half-length
/// `eps`. At `eps = 0` the break point coincides with the origin and the tie
/// rule makes `a = 0` a yes.
pub(crate) fn yes_no_at(a: f64, eps: f64) -> (f64, f64) {
    if a >= eps {
        (1.0, 0.0)
    } else if a <= -eps {
        (0.0, 1.0)
    } else {
        ((eps + a) / (2.0 * eps), (eps - a) / (2.0 * eps))
    }
}

pub fn outcome_probability(s: &BlochState, u: &Direction, eps: Epsilon) -> OutcomeProb {
    let (p_yes, p_no) = yes_no_at(projection(s, u), eps.value());
    OutcomeProb { p_yes, p_no }
}

/// Performs the elastic test once, returning the outcome and the collapsed
/// state (`u` on yes, `-u` on no).
pub fn sample_measurement<R: Rng + ?Sized>(
    s: &BlochState,
    u: &Direction,
    eps: Epsilon,
    rng: &mut R,
) -> (MeasurementOutcome, BlochState) {
    let a = projection(s, u);
    let e = eps.value();
    let yes = if a >= e {
        true
    } else if a <= -e {
        false
    } else {
        let lambda: f64 = rng.random_range(-e..=e);
        // A break exactly at the particle counts as yes.
        lambda <= a
    };
    if yes {
        (MeasurementOutcome::Yes, BlochState::surface(*u))
    } else {
        (MeasurementOutcome::No, BlochState::surface(-*u))
    }
}

/// Two-component state vector `(c₀, c₁)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor {
    pub c0: Complex64,
    pub c1: Complex64,
}

impl Spinor {
    pub fn new(c0: Complex64, c1: Complex64) -> Result<Self> {
        let n = c0.norm_sqr() + c1.norm_sqr();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("spinor norm² is {n}")));
        }
        Ok(Spinor { c0, c1 })
    }

    /// `(cos(θ/2) e^{-iφ/2}, sin(θ/2) e^{iφ/2})`.
    pub fn from_angles(theta: f64, phi: f64) -> Result<Self> {
        check_polar(theta, phi)?;
        let half = theta / 2.0;
        Ok(Spinor {
            c0: Complex64::from_polar(half.cos(), -phi / 2.0),
            c1: Complex64::from_polar(half.sin(), phi / 2.0),
        })
    }

    /// Surface point of the sphere, independent of the global phase.
    pub fn to_bloch(&self) -> BlochState {
        let cross = self.c0.conj() * self.c1;
        let z = self.c0.norm_sqr() - self.c1.norm_sqr();
        BlochState([2.0 * cross.re, 2.0 * cross.im, z])
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> DensityMatrix {
        let c = [self.c0, self.c1];
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = c[i] * c[j].conj();
            }
        }
        DensityMatrix(m)
    }
}

/// 2×2 density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(pub [[Complex64; 2]; 2]);

impl DensityMatrix {
    pub fn entries(&self) -> &[[Complex64; 2]; 2] {
        &self.0
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let m = &self.0;
        m[0][0].im.abs() <= tol
            && m[1][1].im.abs() <= tol
            && (m[0][1] - m[1][0].conj()).norm() <= tol
    }

    /// Eigenvalues in ascending order, from the Hermitian part of the matrix.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let m = &self.0;
        let a = m[0][0].re;
        let d = m[1][1].re;
        let b = (m[0][1] + m[1][0].conj()) * 0.5;
        let mean = 0.5 * (a + d);
        let spread = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        [mean - spread, mean + spread]
    }

    pub fn mul(&self, other: &DensityMatrix) -> DensityMatrix {
        let (a, b) = (&self.0, &other.0);
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        DensityMatrix(m)
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        worst
    }

    /// `D² = D`, which holds exactly for the pure states.
    pub fn is_idempotent(&self, tol: f64) -> bool {
        self.mul(self).max_abs_diff(self) <= tol
    }
}

/// `½ [[1 + z, x − iy], [x + iy, 1 − z]]` for the state point `(x, y, z)`.
pub fn to_density_matrix(s: &BlochState) -> DensityMatrix {
    let [x, y, z] = s.0;
    DensityMatrix([
        [
            Complex64::new(0.5 * (1.0 + z), 0.0),
            Complex64::new(0.5 * x, -0.5 * y),
        ],
        [
            Complex64::new(0.5 * x, 0.5 * y),
            Complex64::new(0.5 * (1.0 - z), 0.0),
        ],
    ])
}

pub fn from_density_matrix(d: &DensityMatrix) -> Result<BlochState> {
    if !d.is_hermitian(DENSITY_TOL) {
        return Err(Error::InvalidDensityMatrix("not Hermitian".into()));
    }
    let tr = d.trace();
    if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
        return Err(Error::InvalidDensityMatrix(format!("trace is {tr}")));
    }
    let [low, _] = d.eigenvalues();
    if low < -DENSITY_TOL {
        return Err(Error::InvalidDensityMatrix(format!(
            "negative eigenvalue {low}"
        )));
    }
    let m = &d.0;
    let off = (m[0][1].conj() + m[1][0]) * 0.5;
    let v = [2.0 * off.re, 2.0 * off.im, m[0][0].re - m[1][1].re];
    let n = norm(&v);
    if n > 1.0 {
        // Within DENSITY_TOL of the surface.
        return Ok(BlochState([v[0] / n, v[1] / n, v[2] / n]));
    }
    Ok(BlochState(v))
}
