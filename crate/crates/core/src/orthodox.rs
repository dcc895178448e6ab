//! Orthodox collapse sampler.
//!
//! The first-measured photon's outcome is drawn from its marginal, the pair is
//! collapsed with [`project`], and the second outcome is drawn from the collapsed
//! state. A uniform `u` maps to `T` iff `u < P(T)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::polarization::{
    joint_distribution, outcome_probability, project, Angle, JointDistribution, Outcome, Photon,
    TwoPhotonState, TOLERANCE,
};
use crate::rng::{tally_trials, TrialStream};
use crate::stats::{joint_index, JointCounts};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum MeasurementOrder {
    #[default]
    Photon1First,
    Photon2First,
}

impl MeasurementOrder {
    pub fn first(self) -> Photon {
        match self {
            MeasurementOrder::Photon1First => Photon::First,
            MeasurementOrder::Photon2First => Photon::Second,
        }
    }
}

impl fmt::Display for MeasurementOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeasurementOrder::Photon1First => "photon1-first",
            MeasurementOrder::Photon2First => "photon2-first",
        })
    }
}

impl FromStr for MeasurementOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "photon1-first" | "1" => Ok(MeasurementOrder::Photon1First),
            "photon2-first" | "2" => Ok(MeasurementOrder::Photon2First),
            other => Err(format!("unknown measurement order `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialResult {
    pub outcome1: Outcome,
    pub outcome2: Outcome,
}

/// Probabilities smaller than the projection tolerance are treated as exact zeros
/// so that a zero-probability branch can never be drawn.
fn snap(p: f64) -> f64 {
    if p <= TOLERANCE {
        0.0
    } else if p >= 1.0 - TOLERANCE {
        1.0
    } else {
        p
    }
}

/// Precomputed collapse probabilities for one `(state, θ₁, θ₂, order)` setting.
#[derive(Debug, Clone, Copy)]
pub struct CollapseSampler {
    order: MeasurementOrder,
    first_transmit: f64,
    /// `P(second = T | first outcome)`, indexed by the first outcome.
    second_transmit: [f64; 2],
}

impl CollapseSampler {
    pub fn new(state: &TwoPhotonState, theta1: Angle, theta2: Angle, order: MeasurementOrder) -> Self {
        let first = order.first();
        let second = first.other();
        let (first_angle, second_angle) = match first {
            Photon::First => (theta1, theta2),
            Photon::Second => (theta2, theta1),
        };
        let first_transmit = snap(outcome_probability(state, first, first_angle, Outcome::Transmitted));
        let mut second_transmit = [0.0; 2];
        for outcome in Outcome::ALL {
            // never drawn when the projection has no support
            if let Ok(collapsed) = project(state, first, first_angle, outcome) {
                second_transmit[outcome.index()] =
                    snap(outcome_probability(&collapsed, second, second_angle, Outcome::Transmitted));
            }
        }
        CollapseSampler {
            order,
            first_transmit,
            second_transmit,
        }
    }

    pub fn sample(&self, stream: &mut TrialStream) -> TrialResult {
        let a = draw(stream, self.first_transmit);
        let b = draw(stream, self.second_transmit[a.index()]);
        match self.order {
            MeasurementOrder::Photon1First => TrialResult { outcome1: a, outcome2: b },
            MeasurementOrder::Photon2First => TrialResult { outcome1: b, outcome2: a },
        }
    }

    /// The joint distribution this sampler draws from.
    pub fn distribution(&self) -> JointDistribution {
        let mut p = [0.0; 4];
        for a in Outcome::ALL {
            let pa = prob_of(self.first_transmit, a);
            for b in Outcome::ALL {
                let pb = prob_of(self.second_transmit[a.index()], b);
                let (o1, o2) = match self.order {
                    MeasurementOrder::Photon1First => (a, b),
                    MeasurementOrder::Photon2First => (b, a),
                };
                p[joint_index(o1, o2)] = pa * pb;
            }
        }
        JointDistribution::from_array(p)
    }
}

fn draw(stream: &mut TrialStream, p_transmit: f64) -> Outcome {
    if stream.bernoulli(p_transmit) {
        Outcome::Transmitted
    } else {
        Outcome::Absorbed
    }
}

fn prob_of(p_transmit: f64, outcome: Outcome) -> f64 {
    match outcome {
        Outcome::Transmitted => p_transmit,
        Outcome::Absorbed => 1.0 - p_transmit,
    }
}

/// One measured pair: measure first photon, collapse, measure the second.
pub fn sample_pair(
    state: &TwoPhotonState,
    theta1: Angle,
    theta2: Angle,
    order: MeasurementOrder,
    stream: &mut TrialStream,
) -> TrialResult {
    CollapseSampler::new(state, theta1, theta2, order).sample(stream)
}

/// Exact joint distribution induced by sequential projection, without snapping.
pub fn sequential_distribution(
    state: &TwoPhotonState,
    theta1: Angle,
    theta2: Angle,
    order: MeasurementOrder,
) -> JointDistribution {
    let first = order.first();
    let second = first.other();
    let (first_angle, second_angle) = match first {
        Photon::First => (theta1, theta2),
        Photon::Second => (theta2, theta1),
    };
    let mut p = [0.0; 4];
    for a in Outcome::ALL {
        let pa = outcome_probability(state, first, first_angle, a);
        let Ok(collapsed) = project(state, first, first_angle, a) else {
            continue;
        };
        for b in Outcome::ALL {
            let pb = outcome_probability(&collapsed, second, second_angle, b);
            let (o1, o2) = match first {
                Photon::First => (a, b),
                Photon::Second => (b, a),
            };
            p[joint_index(o1, o2)] = pa * pb;
        }
    }
    JointDistribution::from_array(p)
}

/// `P(T)` for `photon` with its filter at `theta_own` and the distant filter at
/// `theta_other`, summed out of the joint distribution.
pub fn marginal_distribution(state: &TwoPhotonState, photon: Photon, theta_own: Angle, theta_other: Angle) -> f64 {
    let joint = match photon {
        Photon::First => joint_distribution(state, theta_own, theta_other),
        Photon::Second => joint_distribution(state, theta_other, theta_own),
    };
    joint.marginal_transmitted(photon)
}

/// Joint outcome counts over `n` independent trials with per-trial streams.
pub fn run_trials(
    state: &TwoPhotonState,
    theta1: Angle,
    theta2: Angle,
    order: MeasurementOrder,
    n: u64,
    seed: u64,
) -> JointCounts {
    let sampler = CollapseSampler::new(state, theta1, theta2, order);
    JointCounts::from_array(tally_trials(n, seed, |s| {
        let r = sampler.sample(s);
        joint_index(r.outcome1, r.outcome2)
    }))
}
