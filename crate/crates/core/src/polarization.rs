//! Linear-polarization state algebra for one and two photons.
//!
//! All amplitudes are real. A single photon is a unit vector `(ax, ay)` on the
//! horizontal/vertical basis `{|x⟩, |y⟩}`, and a filter at angle θ transmits the
//! state `|θ⟩ = cos θ |x⟩ + sin θ |y⟩`. A two-photon state is a unit 4-vector in
//! the fixed product order `[xx, xy, yx, yy]` (photon 1's letter first).
//!
//! Expansions in a rotated basis use the order `[bb, b⊥, ⊥b, ⊥⊥]`, where
//! `|⊥⟩ = -sin b |x⟩ + cos b |y⟩` is the basis vector rotated 90° counterclockwise.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance for exact algebraic identities.
pub const TOLERANCE: f64 = 1e-12;

/// Maximum deviation of a state's norm from 1 before it is rejected.
pub const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolarizationError {
    #[error("state is not normalized (squared norm {norm_sq})")]
    NotNormalized { norm_sq: f64 },
    #[error("outcome has probability {probability:e}, cannot project onto it")]
    ZeroProbabilityOutcome { probability: f64 },
    #[error("amplitude is not finite")]
    NonFinite,
}

/// Orientation of a polarizing filter in degrees, canonicalized to `[0, 180)`.
///
/// A filter at θ and θ + 180° is the same physical filter.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(into = "f64", from = "f64")]
pub struct Angle(f64);

impl Angle {
    pub fn from_degrees(degrees: f64) -> Self {
        let mut d = degrees.rem_euclid(180.0);
        // rem_euclid can round up to the modulus for tiny negative inputs
        if d >= 180.0 {
            d = 0.0;
        }
        Angle(d)
    }

    pub fn degrees(self) -> f64 {
        self.0
    }

    pub fn radians(self) -> f64 {
        self.0.to_radians()
    }

    /// The filter rotated by 90°, which transmits exactly what this one absorbs.
    pub fn perpendicular(self) -> Angle {
        Angle::from_degrees(self.0 + 90.0)
    }

    /// Distance on the 180°-periodic circle, in `[0, 90]`.
    pub fn distance(self, other: Angle) -> f64 {
        let d = (self.0 - other.0).abs().rem_euclid(180.0);
        d.min(180.0 - d)
    }

    /// `(cos θ, sin θ)`: the state this filter transmits with certainty.
    pub(crate) fn unit(self) -> [f64; 2] {
        let r = self.radians();
        [r.cos(), r.sin()]
    }

    /// `(-sin θ, cos θ)`: the state this filter absorbs with certainty.
    pub(crate) fn unit_perp(self) -> [f64; 2] {
        let r = self.radians();
        [-r.sin(), r.cos()]
    }

    fn outcome_vector(self, outcome: Outcome) -> [f64; 2] {
        match outcome {
            Outcome::Transmitted => self.unit(),
            Outcome::Absorbed => self.unit_perp(),
        }
    }
}

impl From<f64> for Angle {
    fn from(degrees: f64) -> Self {
        Angle::from_degrees(degrees)
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> f64 {
        a.0
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}°", self.0)
    }
}

/// Result of a single filter measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Outcome {
    #[serde(rename = "T")]
    Transmitted,
    #[serde(rename = "A")]
    Absorbed,
}

impl Outcome {
    pub const ALL: [Outcome; 2] = [Outcome::Transmitted, Outcome::Absorbed];

    pub fn symbol(self) -> char {
        match self {
            Outcome::Transmitted => 'T',
            Outcome::Absorbed => 'A',
        }
    }

    pub(crate) fn index(self) -> usize {
        match self {
            Outcome::Transmitted => 0,
            Outcome::Absorbed => 1,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Which photon of the pair (or equivalently which station).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Photon {
    #[serde(rename = "1")]
    First,
    #[serde(rename = "2")]
    Second,
}

impl Photon {
    pub fn number(self) -> u8 {
        match self {
            Photon::First => 1,
            Photon::Second => 2,
        }
    }

    pub fn other(self) -> Photon {
        match self {
            Photon::First => Photon::Second,
            Photon::Second => Photon::First,
        }
    }

    pub(crate) fn index(self) -> usize {
        self.number() as usize - 1
    }
}

impl fmt::Display for Photon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinglePhotonState {
    ax: f64,
    ay: f64,
}

impl SinglePhotonState {
    pub fn new(ax: f64, ay: f64) -> Result<Self, PolarizationError> {
        check_norm(&[ax, ay])?;
        Ok(SinglePhotonState { ax, ay })
    }

    /// Linear polarization along `angle`.
    pub fn polarized(angle: Angle) -> Self {
        let [ax, ay] = angle.unit();
        SinglePhotonState { ax, ay }
    }

    pub fn amplitudes(&self) -> [f64; 2] {
        [self.ax, self.ay]
    }
}

/// Two-photon polarization state, amplitudes in `[xx, xy, yx, yy]` order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhotonState {
    amps: [f64; 4],
}

impl TwoPhotonState {
    /// Rejects (rather than renormalizes) vectors whose squared norm is off by more
    /// than [`NORM_TOLERANCE`].
    pub fn new(amps: [f64; 4]) -> Result<Self, PolarizationError> {
        check_norm(&amps)?;
        Ok(TwoPhotonState { amps })
    }

    pub fn product(first: SinglePhotonState, second: SinglePhotonState) -> Self {
        let [a, b] = first.amplitudes();
        let [c, d] = second.amplitudes();
        TwoPhotonState {
            amps: [a * c, a * d, b * c, b * d],
        }
    }

    /// `|θ₁⟩₁|θ₂⟩₂`, using the canonical angles (so `|−30°⟩` comes out as
    /// `|150°⟩ = −|−30°⟩`; only the overall sign differs).
    pub fn polarized_pair(theta1: Angle, theta2: Angle) -> Self {
        Self::product(
            SinglePhotonState::polarized(theta1),
            SinglePhotonState::polarized(theta2),
        )
    }

    pub fn amplitudes(&self) -> [f64; 4] {
        self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a * a).sum()
    }

    /// `(⟨u|₁ ⊗ ⟨v|₂) |ψ⟩`.
    fn overlap(&self, u: [f64; 2], v: [f64; 2]) -> f64 {
        let [xx, xy, yx, yy] = self.amps;
        u[0] * (v[0] * xx + v[1] * xy) + u[1] * (v[0] * yx + v[1] * yy)
    }
}

fn check_norm(amps: &[f64]) -> Result<(), PolarizationError> {
    if amps.iter().any(|a| !a.is_finite()) {
        return Err(PolarizationError::NonFinite);
    }
    let norm_sq: f64 = amps.iter().map(|a| a * a).sum();
    if (norm_sq - 1.0).abs() > NORM_TOLERANCE {
        return Err(PolarizationError::NotNormalized { norm_sq });
    }
    Ok(())
}

/// Born-rule probabilities for the four joint outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    pub tt: f64,
    pub ta: f64,
    pub at: f64,
    pub aa: f64,
}

impl JointDistribution {
    pub fn get(&self, first: Outcome, second: Outcome) -> f64 {
        use Outcome::*;
        match (first, second) {
            (Transmitted, Transmitted) => self.tt,
            (Transmitted, Absorbed) => self.ta,
            (Absorbed, Transmitted) => self.at,
            (Absorbed, Absorbed) => self.aa,
        }
    }

    /// Entries in `[TT, TA, AT, AA]` order.
    pub fn to_array(&self) -> [f64; 4] {
        [self.tt, self.ta, self.at, self.aa]
    }

    pub fn from_array(p: [f64; 4]) -> Self {
        JointDistribution {
            tt: p[0],
            ta: p[1],
            at: p[2],
            aa: p[3],
        }
    }

    pub fn mismatch(&self) -> f64 {
        self.ta + self.at
    }

    pub fn coincidence(&self) -> f64 {
        self.tt + self.aa
    }

    /// Probability that the given photon is transmitted.
    pub fn marginal_transmitted(&self, photon: Photon) -> f64 {
        match photon {
            Photon::First => self.tt + self.ta,
            Photon::Second => self.tt + self.at,
        }
    }
}

/// `(|x⟩₁|x⟩₂ + |y⟩₁|y⟩₂)/√2`, the rotationally symmetric twin state.
pub fn twin_state() -> TwoPhotonState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    TwoPhotonState {
        amps: [h, 0.0, 0.0, h],
    }
}

/// Re-express `state` on the basis `{|x′⟩, |y′⟩}` rotated counterclockwise by
/// `theta`, substituting `|x⟩ = |x′⟩cos θ − |y′⟩sin θ` and
/// `|y⟩ = |y′⟩cos θ + |x′⟩sin θ` for both photons.
pub fn rotate_basis(state: &TwoPhotonState, theta: Angle) -> TwoPhotonState {
    let (s, c) = theta.radians().sin_cos();
    // coefficients of |x⟩ and |y⟩ on the primed basis
    let x = [c, -s];
    let y = [s, c];
    let mut out = [0.0; 4];
    let a = state.amps;
    let basis = [x, y];
    for i in 0..2 {
        for j in 0..2 {
            let amp = a[2 * i + j];
            if amp == 0.0 {
                continue;
            }
            for k in 0..2 {
                for l in 0..2 {
                    out[2 * k + l] += amp * basis[i][k] * basis[j][l];
                }
            }
        }
    }
    TwoPhotonState { amps: out }
}

/// Malus's law for a single photon: `(ax cos θ + ay sin θ)²`.
pub fn transmission_prob(state: &SinglePhotonState, filter: Angle) -> f64 {
    let [c, s] = filter.unit();
    let amp = state.ax * c + state.ay * s;
    (amp * amp).min(1.0)
}

/// Joint outcome probabilities for filters at `theta1` (photon 1) and `theta2`
/// (photon 2), by projecting onto the four product outcome states.
pub fn joint_distribution(state: &TwoPhotonState, theta1: Angle, theta2: Angle) -> JointDistribution {
    let mut p = [0.0; 4];
    for o1 in Outcome::ALL {
        for o2 in Outcome::ALL {
            let amp = state.overlap(theta1.outcome_vector(o1), theta2.outcome_vector(o2));
            p[2 * o1.index() + o2.index()] = amp * amp;
        }
    }
    JointDistribution::from_array(p)
}

/// Probability that measuring `photon` with a filter at `filter` yields `outcome`.
pub fn outcome_probability(state: &TwoPhotonState, photon: Photon, filter: Angle, outcome: Outcome) -> f64 {
    let (_, p) = apply_projector(state, photon, filter.outcome_vector(outcome));
    p
}

/// Unnormalized projection of one photon onto `e`, with its squared norm.
fn apply_projector(state: &TwoPhotonState, photon: Photon, e: [f64; 2]) -> ([f64; 4], f64) {
    let a = state.amps;
    let mut out = [0.0; 4];
    match photon {
        Photon::First => {
            // component of photon 2 left after contracting photon 1 with e
            let rest = [e[0] * a[0] + e[1] * a[2], e[0] * a[1] + e[1] * a[3]];
            for i in 0..2 {
                for j in 0..2 {
                    out[2 * i + j] = e[i] * rest[j];
                }
            }
        }
        Photon::Second => {
            let rest = [e[0] * a[0] + e[1] * a[1], e[0] * a[2] + e[1] * a[3]];
            for i in 0..2 {
                for j in 0..2 {
                    out[2 * i + j] = rest[i] * e[j];
                }
            }
        }
    }
    let p = out.iter().map(|v| v * v).sum();
    (out, p)
}

/// Normalized post-measurement state after `photon` gives `outcome` at `filter`.
///
/// Fails with [`PolarizationError::ZeroProbabilityOutcome`] when the outcome has
/// probability at most [`TOLERANCE`].
pub fn project(
    state: &TwoPhotonState,
    photon: Photon,
    filter: Angle,
    outcome: Outcome,
) -> Result<TwoPhotonState, PolarizationError> {
    let (mut amps, p) = apply_projector(state, photon, filter.outcome_vector(outcome));
    if p <= TOLERANCE {
        return Err(PolarizationError::ZeroProbabilityOutcome { probability: p });
    }
    let norm = p.sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    Ok(TwoPhotonState { amps })
}

/// Amplitudes of `state` on `{|b⟩, |b⊥⟩} ⊗ {|b⟩, |b⊥⟩}` in `[bb, b⊥, ⊥b, ⊥⊥]` order.
pub fn expand_in_basis(state: &TwoPhotonState, basis: Angle) -> [f64; 4] {
    let b = basis.unit();
    let p = basis.unit_perp();
    [
        state.overlap(b, b),
        state.overlap(b, p),
        state.overlap(p, b),
        state.overlap(p, p),
    ]
}

/// Inverse of [`expand_in_basis`]: rebuild the `[xx, xy, yx, yy]` amplitudes.
pub fn assemble_from_basis(coefficients: [f64; 4], basis: Angle) -> Result<TwoPhotonState, PolarizationError> {
    let vecs = [basis.unit(), basis.unit_perp()];
    let mut amps = [0.0; 4];
    for k in 0..2 {
        for l in 0..2 {
            let c = coefficients[2 * k + l];
            for i in 0..2 {
                for j in 0..2 {
                    amps[2 * i + j] += c * vecs[k][i] * vecs[l][j];
                }
            }
        }
    }
    TwoPhotonState::new(amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn deg(d: f64) -> Angle {
        Angle::from_degrees(d)
    }

    fn assert_amps(actual: [f64; 4], expected: [f64; 4]) {
        for (a, e) in actual.iter().zip(expected) {
            assert_abs_diff_eq!(*a, e, epsilon = TOLERANCE);
        }
    }

    #[test]
    fn canonical_angles() {
        assert_eq!(deg(-30.0).degrees(), 150.0);
        assert_eq!(deg(180.0).degrees(), 0.0);
        assert_eq!(deg(-1e-300).degrees(), 0.0);
        assert_eq!(deg(390.0).degrees(), 30.0);
        assert_eq!(deg(10.0).distance(deg(170.0)), 20.0);
        assert_eq!(deg(0.0).distance(deg(90.0)), 90.0);
    }

    #[test]
    fn twin_state_values() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_amps(twin_state().amplitudes(), [h, 0.0, 0.0, h]);
        assert_abs_diff_eq!(twin_state().norm_sq(), 1.0, epsilon = TOLERANCE);
        assert_amps(rotate_basis(&twin_state(), deg(17.0)).amplitudes(), twin_state().amplitudes());
        assert_amps(rotate_basis(&twin_state(), deg(30.0)).amplitudes(), [h, 0.0, 0.0, h]);
    }

    #[test]
    fn rotation_identity_and_inverse() {
        let s = TwoPhotonState::new([0.5, 0.5, -0.5, 0.5]).unwrap();
        assert_amps(rotate_basis(&s, deg(0.0)).amplitudes(), s.amplitudes());
        let back = rotate_basis(&rotate_basis(&s, deg(37.0)), deg(-37.0));
        assert_amps(back.amplitudes(), s.amplitudes());
    }

    #[test]
    fn malus_law() {
        let p = SinglePhotonState::polarized(deg(30.0));
        assert_abs_diff_eq!(transmission_prob(&p, deg(30.0)), 1.0, epsilon = TOLERANCE);
        let h = SinglePhotonState::polarized(deg(0.0));
        assert_abs_diff_eq!(transmission_prob(&h, deg(90.0)), 0.0, epsilon = TOLERANCE);
        assert_abs_diff_eq!(transmission_prob(&h, deg(30.0)), 0.75, epsilon = TOLERANCE);
    }

    #[test]
    fn joint_distribution_of_twin() {
        let d = joint_distribution(&twin_state(), deg(0.0), deg(0.0));
        assert_amps(d.to_array(), [0.5, 0.0, 0.0, 0.5]);

        let d = joint_distribution(&twin_state(), deg(-30.0), deg(30.0));
        assert_abs_diff_eq!(d.mismatch(), 0.75, epsilon = TOLERANCE);
        // ⟨θ₁,θ₂|twin⟩ = cos(θ₁−θ₂)/√2, and the perpendicular outcomes follow by ±90°
        let amp = |a: f64, b: f64| (a - b).to_radians().cos() / 2f64.sqrt();
        let oracle = [
            amp(-30.0, 30.0).powi(2),
            amp(-30.0, 120.0).powi(2),
            amp(60.0, 30.0).powi(2),
            amp(60.0, 120.0).powi(2),
        ];
        assert_amps(d.to_array(), oracle);
        assert_amps(d.to_array(), [0.125, 0.375, 0.375, 0.125]);
    }

    #[test]
    fn collapse_to_product_state() {
        let s = project(&twin_state(), Photon::First, deg(30.0), Outcome::Transmitted).unwrap();
        let s = project(&s, Photon::Second, deg(-30.0), Outcome::Transmitted).unwrap();
        // projection is insensitive to the canonical sign of |−30°⟩ = −|150°⟩
        let r3 = 3f64.sqrt();
        assert_amps(s.amplitudes(), [0.75, -r3 / 4.0, r3 / 4.0, -0.25]);
        let pair = TwoPhotonState::polarized_pair(deg(30.0), deg(-30.0)).amplitudes();
        assert_amps(s.amplitudes(), pair.map(|a| -a));
    }

    #[test]
    fn collapse_definite_and_zero_probability() {
        let s = project(&twin_state(), Photon::First, deg(0.0), Outcome::Transmitted).unwrap();
        assert_amps(s.amplitudes(), [1.0, 0.0, 0.0, 0.0]);
        let err = project(&s, Photon::Second, deg(90.0), Outcome::Transmitted).unwrap_err();
        assert!(matches!(err, PolarizationError::ZeroProbabilityOutcome { .. }));
    }

    #[test]
    fn collapsed_state_expansion() {
        let r3 = 3f64.sqrt();
        // |−30°⟩ written out directly: the canonical 150° filter state is its negative
        let s = TwoPhotonState::product(
            SinglePhotonState::new(r3 / 2.0, 0.5).unwrap(),
            SinglePhotonState::new(r3 / 2.0, -0.5).unwrap(),
        );
        assert_amps(expand_in_basis(&s, deg(0.0)), [0.75, -r3 / 4.0, r3 / 4.0, -0.25]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for b in [0.0, 12.5, 45.0, 133.0] {
            assert_amps(expand_in_basis(&twin_state(), deg(b)), [h, 0.0, 0.0, h]);
        }
    }

    #[test]
    fn rejects_unnormalized() {
        assert!(matches!(
            TwoPhotonState::new([1.0, 1.0, 0.0, 0.0]),
            Err(PolarizationError::NotNormalized { .. })
        ));
        assert!(SinglePhotonState::new(0.6, 0.8).is_ok());
        assert!(SinglePhotonState::new(0.6, 0.81).is_err());
        assert_eq!(TwoPhotonState::new([f64::NAN, 0.0, 0.0, 1.0]), Err(PolarizationError::NonFinite));
    }
}
