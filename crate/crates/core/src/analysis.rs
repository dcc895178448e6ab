//! Sequence statistics and the mismatch-form Bell test shared by all three models.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::lhv::{builtin_strategy, LhvSampler, LocalStrategy, StrategyError};
use crate::many_worlds::BranchSampler;
use crate::orthodox::{CollapseSampler, MeasurementOrder};
use crate::polarization::{twin_state, Angle, Outcome};
use crate::rng::{derive_seed, map_trials, tally_trials, TrialStream};
use crate::stats::{binomial_halfwidth, joint_index, JointCounts};

/// Smallest trial count accepted by [`bell_report`].
pub const MIN_BELL_TRIALS: u64 = 1000;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("unknown model `{0}` (expected qm, mwi or lhv:<strategy>)")]
    UnknownModel(String),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error("sequence table is empty")]
    EmptyTable,
    #[error("need at least {min} trials, got {got}")]
    TooFewTrials { min: u64, got: u64 },
}

/// One of the three accounts of the experiment.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Orthodox(MeasurementOrder),
    Lhv(LocalStrategy),
    ManyWorlds,
}

impl Model {
    /// Parse `qm`/`orthodox`, `mwi`, or `lhv:<built-in strategy>`.
    pub fn parse(spec: &str) -> Result<Model, AnalysisError> {
        match spec {
            "qm" | "orthodox" => Ok(Model::Orthodox(MeasurementOrder::default())),
            "mwi" => Ok(Model::ManyWorlds),
            other => match other.strip_prefix("lhv:") {
                Some(name) => Ok(Model::Lhv(builtin_strategy(name)?)),
                None => Err(AnalysisError::UnknownModel(other.to_string())),
            },
        }
    }

    pub fn label(&self) -> String {
        match self {
            Model::Orthodox(_) => "qm".into(),
            Model::Lhv(s) => format!("lhv:{}", s.name),
            Model::ManyWorlds => "mwi".into(),
        }
    }

    fn sampler(&self, theta1: Angle, theta2: Angle) -> PairSampler<'_> {
        match self {
            Model::Orthodox(order) => PairSampler::Collapse(CollapseSampler::new(&twin_state(), theta1, theta2, *order)),
            Model::Lhv(s) => PairSampler::Lhv(LhvSampler::new(s, theta1, theta2)),
            Model::ManyWorlds => PairSampler::Branch(BranchSampler::new(theta1, theta2)),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

enum PairSampler<'a> {
    Collapse(CollapseSampler),
    Lhv(LhvSampler<'a>),
    Branch(BranchSampler),
}

impl PairSampler<'_> {
    fn sample(&self, stream: &mut TrialStream) -> (Outcome, Outcome) {
        match self {
            PairSampler::Collapse(s) => {
                let r = s.sample(stream);
                (r.outcome1, r.outcome2)
            }
            PairSampler::Lhv(s) => s.sample(stream),
            PairSampler::Branch(s) => s.sample(stream),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceTable {
    pub theta1: Angle,
    pub theta2: Angle,
    pub pairs: Vec<(Outcome, Outcome)>,
    pub mismatch_flags: Vec<bool>,
}

impl SequenceTable {
    pub fn from_pairs(theta1: Angle, theta2: Angle, pairs: Vec<(Outcome, Outcome)>) -> Self {
        let mismatch_flags = pairs.iter().map(|(a, b)| a != b).collect();
        SequenceTable {
            theta1,
            theta2,
            pairs,
            mismatch_flags,
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn mismatches(&self) -> u64 {
        self.mismatch_flags.iter().filter(|&&m| m).count() as u64
    }
}

/// `n` outcome pairs under `model`; trial `i` uses stream `(seed, i)`.
pub fn generate_sequence(model: &Model, theta1: Angle, theta2: Angle, n: u64, seed: u64) -> SequenceTable {
    let sampler = model.sampler(theta1, theta2);
    SequenceTable::from_pairs(theta1, theta2, map_trials(n, seed, |s| sampler.sample(s)))
}

/// Joint counts without materializing the sequence; same draws as
/// [`generate_sequence`] for the same seed.
pub fn joint_counts(model: &Model, theta1: Angle, theta2: Angle, n: u64, seed: u64) -> JointCounts {
    let sampler = model.sampler(theta1, theta2);
    JointCounts::from_array(tally_trials(n, seed, |s| {
        let (a, b) = sampler.sample(s);
        joint_index(a, b)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateEstimate {
    pub rate: f64,
    pub ci_halfwidth: f64,
    pub mismatches: u64,
    pub trials: u64,
}

impl RateEstimate {
    pub fn from_counts(mismatches: u64, trials: u64) -> Self {
        let rate = mismatches as f64 / trials as f64;
        RateEstimate {
            rate,
            ci_halfwidth: binomial_halfwidth(rate, trials),
            mismatches,
            trials,
        }
    }
}

/// Mismatch fraction with its 3σ binomial half-width.
pub fn mismatch_rate(table: &SequenceTable) -> Result<RateEstimate, AnalysisError> {
    if table.is_empty() {
        return Err(AnalysisError::EmptyTable);
    }
    Ok(RateEstimate::from_counts(table.mismatches(), table.len() as u64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CiHalfwidths {
    pub m_left: f64,
    pub m_right: f64,
    pub m_wide: f64,
}

/// Serialized with the key order
/// `model, alpha_deg, trials, seed, m_left, m_right, m_wide, bound, ci, violated`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BellReport {
    pub model: String,
    pub alpha_deg: f64,
    pub trials: u64,
    pub seed: u64,
    /// M(−α, 0)
    pub m_left: f64,
    /// M(0, α)
    pub m_right: f64,
    /// M(−α, α)
    pub m_wide: f64,
    pub bound: f64,
    pub ci: CiHalfwidths,
    pub violated: bool,
}

impl BellReport {
    /// Sum of the three half-widths used as the verdict allowance.
    pub fn allowance(&self) -> f64 {
        self.ci.m_left + self.ci.m_right + self.ci.m_wide
    }

    /// `m_wide − bound − allowance`; positive exactly when violated.
    pub fn margin(&self) -> f64 {
        self.m_wide - self.bound - self.allowance()
    }
}

/// Run (−α, 0), (0, α) and (−α, α) for `n` trials each, on seeds derived from
/// `seed` with indices 0, 1 and 2.
///
/// The inequality `M(−α, α) ≤ M(−α, 0) + M(0, α)` counts as violated only when
/// the wide mismatch exceeds the bound by more than the sum of all three
/// half-widths.
pub fn bell_report(model: &Model, alpha_deg: f64, n: u64, seed: u64) -> Result<BellReport, AnalysisError> {
    if n < MIN_BELL_TRIALS {
        return Err(AnalysisError::TooFewTrials {
            min: MIN_BELL_TRIALS,
            got: n,
        });
    }
    let neg = Angle::from_degrees(-alpha_deg);
    let zero = Angle::from_degrees(0.0);
    let pos = Angle::from_degrees(alpha_deg);
    let run = |k: u64, a: Angle, b: Angle| {
        RateEstimate::from_counts(joint_counts(model, a, b, n, derive_seed(seed, k)).mismatches(), n)
    };
    let left = run(0, neg, zero);
    let right = run(1, zero, pos);
    let wide = run(2, neg, pos);
    let bound = left.rate + right.rate;
    let ci = CiHalfwidths {
        m_left: left.ci_halfwidth,
        m_right: right.ci_halfwidth,
        m_wide: wide.ci_halfwidth,
    };
    Ok(BellReport {
        model: model.label(),
        alpha_deg,
        trials: n,
        seed,
        m_left: left.rate,
        m_right: right.rate,
        m_wide: wide.rate,
        bound,
        violated: wide.rate > bound + ci.m_left + ci.m_right + ci.m_wide,
        ci,
    })
}

/// Orthodox mismatch `1 − cos²Δ` for filters separated by Δ degrees.
pub fn quantum_mismatch(delta_deg: f64) -> f64 {
    1.0 - delta_deg.to_radians().cos().powi(2)
}
