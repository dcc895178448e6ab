//! Local hidden-variable strategies.
//!
//! A strategy shares one hidden polarization λ ∈ [0°, 180°) between the two
//! stations. Each station turns its own filter angle and λ into a transmission
//! probability; deterministic strategies only ever return 0 or 1. Because each
//! response sees only its own filter angle, locality holds by construction.
//!
//! Mismatch probabilities are integrated exactly: the λ axis is cut at every
//! bin edge and response discontinuity, pieces on which everything is constant
//! are summed directly, and smooth pieces go through adaptive Simpson.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polarization::{Angle, Outcome};
use crate::rng::{tally_trials, TrialStream};
use crate::stats::{joint_index, JointCounts};

/// Absolute accuracy of [`exact_mismatch`].
pub const QUADRATURE_TOLERANCE: f64 = 1e-9;

/// Slack allowed when checking the Bell bound on exact mismatches.
pub const BELL_TOLERANCE: f64 = 1e-9;

const MAX_SIMPSON_DEPTH: u32 = 48;

#[derive(Debug, Error)]
pub enum StrategyError {
    #[error("unknown strategy `{0}` (expected nearest-axis or malus-stochastic)")]
    UnknownStrategy(String),
    #[error("unknown response formula `{0}`")]
    UnknownFormula(String),
    #[error("invalid strategy: {0}")]
    Invalid(String),
    #[error("could not parse strategy file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("quadrature did not converge on [{from}°, {to}°]")]
    QuadratureNotConverged { from: f64, to: f64 },
    #[error("setting count {0} outside 2..=20")]
    SettingCount(usize),
}

/// Shared hidden variable set at the source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HiddenVariable {
    pub lambda: Angle,
}

/// Distribution of λ over `[0, 180)`.
#[derive(Debug, Clone, PartialEq)]
pub enum LambdaLaw {
    Uniform,
    /// Piecewise-uniform density over equal-width bins; weights sum to 1.
    Binned(Vec<f64>),
}

impl LambdaLaw {
    pub fn binned(weights: Vec<f64>) -> Result<Self, StrategyError> {
        if weights.is_empty() {
            return Err(StrategyError::Invalid("lambda_bins is empty".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(StrategyError::Invalid("lambda_bins must be finite and non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(StrategyError::Invalid("lambda_bins sum to zero".into()));
        }
        Ok(LambdaLaw::Binned(weights.into_iter().map(|w| w / total).collect()))
    }

    fn edges(&self) -> Vec<f64> {
        match self {
            LambdaLaw::Uniform => Vec::new(),
            LambdaLaw::Binned(w) => bin_edges(w.len()),
        }
    }

    /// Density per degree at `lambda`.
    fn density(&self, lambda: f64) -> f64 {
        match self {
            LambdaLaw::Uniform => 1.0 / 180.0,
            LambdaLaw::Binned(w) => {
                let width = 180.0 / w.len() as f64;
                w[bin_of(lambda, w.len())] / width
            }
        }
    }

    /// Inverse-CDF sample from one uniform variate.
    fn sample(&self, u: f64) -> f64 {
        match self {
            LambdaLaw::Uniform => 180.0 * u,
            LambdaLaw::Binned(w) => {
                let width = 180.0 / w.len() as f64;
                let mut acc = 0.0;
                for (k, &wk) in w.iter().enumerate() {
                    if wk > 0.0 && u < acc + wk {
                        let frac = ((u - acc) / wk).clamp(0.0, 1.0);
                        return (k as f64 + frac) * width;
                    }
                    acc += wk;
                }
                // rounding left u past the last cumulative weight
                let last = w.iter().rposition(|&wk| wk > 0.0).unwrap_or(0);
                (last as f64 + 0.5) * width
            }
        }
    }
}

fn bin_edges(n: usize) -> Vec<f64> {
    (1..n).map(|k| 180.0 * k as f64 / n as f64).collect()
}

fn bin_of(degrees: f64, n: usize) -> usize {
    ((degrees / 180.0 * n as f64).floor() as usize).min(n - 1)
}

/// Closed-form response rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formula {
    /// T iff the filter is within 45° of λ (a tie at exactly 45° is absorbed).
    NearestAxis,
    /// T with probability cos²(filter − λ).
    Malus,
}

impl Formula {
    pub fn id(self) -> &'static str {
        match self {
            Formula::NearestAxis => "nearest-axis",
            Formula::Malus => "malus",
        }
    }

    fn parse(id: &str) -> Result<Self, StrategyError> {
        match id {
            "nearest-axis" => Ok(Formula::NearestAxis),
            "malus" | "malus-stochastic" => Ok(Formula::Malus),
            other => Err(StrategyError::UnknownFormula(other.to_string())),
        }
    }
}

/// Transmission probabilities tabulated on a (filter bin × λ bin) grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseTable {
    filter_bins: usize,
    lambda_bins: usize,
    cells: Vec<f64>,
}

impl ResponseTable {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, StrategyError> {
        let filter_bins = rows.len();
        let lambda_bins = rows.first().map_or(0, Vec::len);
        if filter_bins == 0 || lambda_bins == 0 {
            return Err(StrategyError::Invalid("response table is empty".into()));
        }
        if rows.iter().any(|r| r.len() != lambda_bins) {
            return Err(StrategyError::Invalid("response table rows differ in length".into()));
        }
        let cells: Vec<f64> = rows.into_iter().flatten().collect();
        if cells.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(StrategyError::Invalid("response probabilities must lie in [0, 1]".into()));
        }
        Ok(ResponseTable {
            filter_bins,
            lambda_bins,
            cells,
        })
    }

    /// Build from a function of (filter bin centre, λ bin centre) in degrees.
    pub fn from_fn(filter_bins: usize, lambda_bins: usize, f: impl Fn(f64, f64) -> f64) -> Result<Self, StrategyError> {
        let fw = 180.0 / filter_bins as f64;
        let lw = 180.0 / lambda_bins as f64;
        let rows = (0..filter_bins)
            .map(|i| {
                (0..lambda_bins)
                    .map(|j| f((i as f64 + 0.5) * fw, (j as f64 + 0.5) * lw))
                    .collect()
            })
            .collect();
        Self::new(rows)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.cells.chunks(self.lambda_bins).map(<[f64]>::to_vec).collect()
    }

    fn get(&self, filter: Angle, lambda: f64) -> f64 {
        let i = bin_of(filter.degrees(), self.filter_bins);
        let j = bin_of(lambda, self.lambda_bins);
        self.cells[i * self.lambda_bins + j]
    }
}

/// Per-station response rule: `(filter, λ) ↦ P(T)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Response {
    Formula(Formula),
    Table(ResponseTable),
}

impl Response {
    pub fn probability(&self, filter: Angle, lambda: Angle) -> f64 {
        self.eval(filter, lambda.degrees())
    }

    fn eval(&self, filter: Angle, lambda: f64) -> f64 {
        match self {
            Response::Formula(Formula::NearestAxis) => {
                if filter.distance(Angle::from_degrees(lambda)) < 45.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Response::Formula(Formula::Malus) => (filter.radians() - lambda.to_radians()).cos().powi(2),
            Response::Table(t) => t.get(filter, lambda),
        }
    }

    /// λ values where the response may jump for this filter.
    fn breakpoints(&self, filter: Angle) -> Vec<f64> {
        match self {
            Response::Formula(Formula::NearestAxis) => vec![
                Angle::from_degrees(filter.degrees() - 45.0).degrees(),
                Angle::from_degrees(filter.degrees() + 45.0).degrees(),
            ],
            Response::Formula(Formula::Malus) => Vec::new(),
            Response::Table(t) => bin_edges(t.lambda_bins),
        }
    }

    fn piecewise_constant(&self) -> bool {
        !matches!(self, Response::Formula(Formula::Malus))
    }

    pub fn is_deterministic(&self) -> bool {
        match self {
            Response::Formula(f) => *f == Formula::NearestAxis,
            Response::Table(t) => t.cells.iter().all(|&p| p == 0.0 || p == 1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalStrategy {
    pub name: String,
    pub lambda_law: LambdaLaw,
    pub response1: Response,
    pub response2: Response,
}

impl LocalStrategy {
    pub fn is_deterministic(&self) -> bool {
        self.response1.is_deterministic() && self.response2.is_deterministic()
    }

    pub fn sample_hidden(&self, stream: &mut TrialStream) -> HiddenVariable {
        HiddenVariable {
            lambda: Angle::from_degrees(self.lambda_law.sample(stream.uniform())),
        }
    }

    /// Parse the JSON strategy file format.
    pub fn from_json(text: &str) -> Result<Self, StrategyError> {
        serde_json::from_str::<StrategyFile>(text)?.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&StrategyFile::from(self)).expect("strategy serializes")
    }
}

impl fmt::Display for LocalStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// On-disk form of a strategy.
///
/// ```json
/// {
///   "name": "my-strategy",
///   "lambda_bins": [1.0, 2.0, 1.0],
///   "response1": "nearest-axis",
///   "response2": {"table": [[0.0, 1.0, 1.0], [1.0, 0.0, 0.5]]}
/// }
/// ```
///
/// `lambda_bins` is optional (uniform λ when absent) and holds relative weights
/// of equal-width λ bins covering [0°, 180°). A response is either a formula id
/// (`nearest-axis`, `malus`) or a table whose rows are equal-width filter-angle
/// bins and whose columns are equal-width λ bins.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_bins: Option<Vec<f64>>,
    pub response1: ResponseSpec,
    pub response2: ResponseSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ResponseSpec {
    Formula(String),
    Table { table: Vec<Vec<f64>> },
}

impl TryFrom<ResponseSpec> for Response {
    type Error = StrategyError;

    fn try_from(spec: ResponseSpec) -> Result<Self, Self::Error> {
        match spec {
            ResponseSpec::Formula(id) => Ok(Response::Formula(Formula::parse(&id)?)),
            ResponseSpec::Table { table } => Ok(Response::Table(ResponseTable::new(table)?)),
        }
    }
}

impl From<&Response> for ResponseSpec {
    fn from(r: &Response) -> Self {
        match r {
            Response::Formula(f) => ResponseSpec::Formula(f.id().to_string()),
            Response::Table(t) => ResponseSpec::Table { table: t.rows() },
        }
    }
}

impl TryFrom<StrategyFile> for LocalStrategy {
    type Error = StrategyError;

    fn try_from(file: StrategyFile) -> Result<Self, Self::Error> {
        let lambda_law = match file.lambda_bins {
            None => LambdaLaw::Uniform,
            Some(w) => LambdaLaw::binned(w)?,
        };
        Ok(LocalStrategy {
            name: file.name,
            lambda_law,
            response1: file.response1.try_into()?,
            response2: file.response2.try_into()?,
        })
    }
}

impl From<&LocalStrategy> for StrategyFile {
    fn from(s: &LocalStrategy) -> Self {
        StrategyFile {
            name: s.name.clone(),
            lambda_bins: match &s.lambda_law {
                LambdaLaw::Uniform => None,
                LambdaLaw::Binned(w) => Some(w.clone()),
            },
            response1: (&s.response1).into(),
            response2: (&s.response2).into(),
        }
    }
}

pub const BUILTIN_STRATEGIES: [&str; 2] = ["nearest-axis", "malus-stochastic"];

pub fn builtin_strategy(name: &str) -> Result<LocalStrategy, StrategyError> {
    let formula = match name {
        "nearest-axis" => Formula::NearestAxis,
        "malus-stochastic" => Formula::Malus,
        other => return Err(StrategyError::UnknownStrategy(other.to_string())),
    };
    Ok(LocalStrategy {
        name: name.to_string(),
        lambda_law: LambdaLaw::Uniform,
        response1: Response::Formula(formula),
        response2: Response::Formula(formula),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvaluationMethod {
    ExactQuadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrategyEvaluation {
    pub mismatch: f64,
    pub method: EvaluationMethod,
    /// Quadrature pieces, or Monte Carlo trials.
    pub trials_or_nodes: u64,
}

/// Closed forms for the built-in rules under uniform λ, with Δ the filter
/// separation: nearest-axis gives Δ/90, Malus gives 1/2 − cos(2Δ)/4.
pub fn closed_form_mismatch(strategy: &LocalStrategy, theta1: Angle, theta2: Angle) -> Option<f64> {
    if strategy.lambda_law != LambdaLaw::Uniform {
        return None;
    }
    let delta = theta1.distance(theta2);
    match (&strategy.response1, &strategy.response2) {
        (Response::Formula(Formula::NearestAxis), Response::Formula(Formula::NearestAxis)) => Some(delta / 90.0),
        (Response::Formula(Formula::Malus), Response::Formula(Formula::Malus)) => {
            Some(0.5 - (2.0 * delta.to_radians()).cos() / 4.0)
        }
        _ => None,
    }
}

/// `P(outcome₁ ≠ outcome₂) = ∫ [p₁(1−p₂) + (1−p₁)p₂] dλ`.
pub fn exact_mismatch(strategy: &LocalStrategy, theta1: Angle, theta2: Angle) -> Result<StrategyEvaluation, StrategyError> {
    let integrand = |lambda: f64| {
        let p1 = strategy.response1.eval(theta1, lambda);
        let p2 = strategy.response2.eval(theta2, lambda);
        strategy.lambda_law.density(lambda) * (p1 * (1.0 - p2) + (1.0 - p1) * p2)
    };

    let mut cuts = vec![0.0, 180.0];
    cuts.extend(strategy.lambda_law.edges());
    cuts.extend(strategy.response1.breakpoints(theta1));
    cuts.extend(strategy.response2.breakpoints(theta2));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let constant = strategy.response1.piecewise_constant() && strategy.response2.piecewise_constant();
    let mut total = 0.0;
    let mut pieces = 0u64;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a <= 0.0 {
            continue;
        }
        pieces += 1;
        if constant {
            total += (b - a) * integrand(0.5 * (a + b));
        } else {
            let tol = QUADRATURE_TOLERANCE * (b - a) / 180.0;
            total += adaptive_simpson(&integrand, a, b, tol)
                .ok_or(StrategyError::QuadratureNotConverged { from: a, to: b })?;
        }
    }
    Ok(StrategyEvaluation {
        mismatch: total.clamp(0.0, 1.0),
        method: EvaluationMethod::ExactQuadrature,
        trials_or_nodes: pieces,
    })
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Option<f64> {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, MAX_SIMPSON_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Some(left + right + delta / 15.0);
    }
    if depth == 0 {
        return None;
    }
    Some(
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?,
    )
}

/// Per-trial sampler: one shared λ, then an independent local draw per station.
#[derive(Debug, Clone, Copy)]
pub struct LhvSampler<'a> {
    strategy: &'a LocalStrategy,
    theta1: Angle,
    theta2: Angle,
}

impl<'a> LhvSampler<'a> {
    pub fn new(strategy: &'a LocalStrategy, theta1: Angle, theta2: Angle) -> Self {
        LhvSampler {
            strategy,
            theta1,
            theta2,
        }
    }

    pub fn sample(&self, stream: &mut TrialStream) -> (Outcome, Outcome) {
        let lambda = self.strategy.lambda_law.sample(stream.uniform());
        let p1 = self.strategy.response1.eval(self.theta1, lambda);
        let p2 = self.strategy.response2.eval(self.theta2, lambda);
        let o1 = if stream.bernoulli(p1) { Outcome::Transmitted } else { Outcome::Absorbed };
        let o2 = if stream.bernoulli(p2) { Outcome::Transmitted } else { Outcome::Absorbed };
        (o1, o2)
    }
}

pub fn lhv_joint_counts(strategy: &LocalStrategy, theta1: Angle, theta2: Angle, n: u64, seed: u64) -> JointCounts {
    let sampler = LhvSampler::new(strategy, theta1, theta2);
    JointCounts::from_array(tally_trials(n, seed, |s| {
        let (a, b) = sampler.sample(s);
        joint_index(a, b)
    }))
}

/// Number of mismatched pairs in `n` trials.
pub fn run_lhv_trials(strategy: &LocalStrategy, theta1: Angle, theta2: Angle, n: u64, seed: u64) -> u64 {
    lhv_joint_counts(strategy, theta1, theta2, n, seed).mismatches()
}

pub fn monte_carlo_mismatch(strategy: &LocalStrategy, theta1: Angle, theta2: Angle, n: u64, seed: u64) -> StrategyEvaluation {
    StrategyEvaluation {
        mismatch: run_lhv_trials(strategy, theta1, theta2, n, seed) as f64 / n as f64,
        method: EvaluationMethod::MonteCarlo,
        trials_or_nodes: n,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellTriple {
    /// M(−α, 0)
    pub m_left: f64,
    /// M(0, α)
    pub m_right: f64,
    /// M(−α, α)
    pub m_wide: f64,
    pub satisfied: bool,
}

/// Exact mismatches for the three settings and whether
/// `M(−α, α) ≤ M(−α, 0) + M(0, α)` holds to [`BELL_TOLERANCE`].
pub fn bell_triple(strategy: &LocalStrategy, alpha_deg: f64) -> Result<BellTriple, StrategyError> {
    let neg = Angle::from_degrees(-alpha_deg);
    let zero = Angle::from_degrees(0.0);
    let pos = Angle::from_degrees(alpha_deg);
    let m_left = exact_mismatch(strategy, neg, zero)?.mismatch;
    let m_right = exact_mismatch(strategy, zero, pos)?.mismatch;
    let m_wide = exact_mismatch(strategy, neg, pos)?.mismatch;
    Ok(BellTriple {
        m_left,
        m_right,
        m_wide,
        satisfied: m_wide <= m_left + m_right + BELL_TOLERANCE,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CfdBound {
    pub settings: usize,
    pub assignments: u64,
    pub triples: u64,
    pub verified: bool,
    /// First failing `(assignment bits, a, b, c)`, if any.
    pub counterexample: Option<(u32, usize, usize, usize)>,
}

/// Exhaustively check that every definite outcome assignment over `n_settings`
/// filter settings (one T/A per setting, shared by both photons) obeys
/// `[x_a ≠ x_c] ≤ [x_a ≠ x_b] + [x_b ≠ x_c]` for every ordered triple.
///
/// Any counterfactually definite theory is a mixture of such assignments, so the
/// bound then holds for its averages as well.
pub fn cfd_enumeration_bound(n_settings: usize) -> Result<CfdBound, StrategyError> {
    if !(2..=20).contains(&n_settings) {
        return Err(StrategyError::SettingCount(n_settings));
    }
    let n = n_settings;
    let mut counterexample = None;
    'outer: for bits in 0u32..(1u32 << n) {
        let x = |k: usize| (bits >> k) & 1;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let wide = (x(a) != x(c)) as u32;
                    let via = (x(a) != x(b)) as u32 + (x(b) != x(c)) as u32;
                    if wide > via {
                        counterexample = Some((bits, a, b, c));
                        break 'outer;
                    }
                }
            }
        }
    }
    let n64 = n as u64;
    Ok(CfdBound {
        settings: n,
        assignments: 1u64 << n,
        triples: n64 * n64 * n64,
        verified: counterexample.is_none(),
        counterexample,
    })
}

/// Reproducible random strategy with the same response at both stations.
///
/// Cycles through four families on `index % 4`: independent deterministic
/// table cells, independent stochastic cells, and rotation-covariant
/// deterministic/stochastic rules depending only on `filter − λ`. All use a
/// random 360-bin λ histogram.
pub fn random_strategy(seed: u64, index: u64) -> LocalStrategy {
    const LAMBDA_BINS: usize = 360;
    let mut rng = TrialStream::new(seed, index);
    let weights: Vec<f64> = (0..LAMBDA_BINS).map(|_| rng.uniform() + 0.05).collect();
    let family = index % 4;
    let response = match family {
        0 | 1 => {
            let cells = (0..36)
                .map(|_| {
                    (0..LAMBDA_BINS)
                        .map(|_| {
                            let u = rng.uniform();
                            if family == 0 {
                                (u < 0.5) as u8 as f64
                            } else {
                                u
                            }
                        })
                        .collect()
                })
                .collect();
            ResponseTable::new(cells)
        }
        _ => {
            let segments: Vec<f64> = (0..12)
                .map(|_| {
                    let u = rng.uniform();
                    if family == 2 {
                        (u < 0.5) as u8 as f64
                    } else {
                        u
                    }
                })
                .collect();
            let offset = 180.0 * rng.uniform();
            ResponseTable::from_fn(180, LAMBDA_BINS, |filter, lambda| {
                let rel = (filter - lambda + offset).rem_euclid(180.0);
                segments[((rel / 15.0) as usize).min(11)]
            })
        }
    }
    .expect("generated table is valid");
    LocalStrategy {
        name: format!("random-{seed}-{index}"),
        lambda_law: LambdaLaw::binned(weights).expect("positive weights"),
        response1: Response::Table(response.clone()),
        response2: Response::Table(response),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn deg(d: f64) -> Angle {
        Angle::from_degrees(d)
    }

    /// Midpoint Riemann sum over a fine uniform λ grid.
    fn riemann_mismatch(s: &LocalStrategy, t1: Angle, t2: Angle, n: usize) -> f64 {
        let h = 180.0 / n as f64;
        (0..n)
            .map(|k| {
                let l = deg((k as f64 + 0.5) * h);
                let p1 = s.response1.probability(t1, l);
                let p2 = s.response2.probability(t2, l);
                s.lambda_law.density(l.degrees()) * h * (p1 * (1.0 - p2) + (1.0 - p1) * p2)
            })
            .sum()
    }

    #[test]
    fn builtin_responses() {
        let na = builtin_strategy("nearest-axis").unwrap();
        assert_eq!(na.response1.probability(deg(30.0), deg(30.0)), 1.0);
        assert_eq!(na.response1.probability(deg(30.0), deg(120.0)), 0.0);
        // tie resolves to absorbed
        assert_eq!(na.response1.probability(deg(0.0), deg(45.0)), 0.0);
        assert_eq!(na.response1.probability(deg(0.0), deg(135.0)), 0.0);
        let malus = builtin_strategy("malus-stochastic").unwrap();
        assert_abs_diff_eq!(malus.response1.probability(deg(0.0), deg(30.0)), 0.75, epsilon = 1e-12);
        assert!(matches!(builtin_strategy("bohm"), Err(StrategyError::UnknownStrategy(_))));
        assert!(na.is_deterministic());
        assert!(!malus.is_deterministic());
    }

    #[test]
    fn nearest_axis_mismatch() {
        let na = builtin_strategy("nearest-axis").unwrap();
        let m = exact_mismatch(&na, deg(0.0), deg(30.0)).unwrap();
        assert_abs_diff_eq!(m.mismatch, 1.0 / 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(riemann_mismatch(&na, deg(0.0), deg(30.0), 36_000), 1.0 / 3.0, epsilon = 1e-4);
        for theta in [0.0, 12.0, 45.0, 170.0] {
            assert_eq!(exact_mismatch(&na, deg(theta), deg(theta)).unwrap().mismatch, 0.0);
        }
    }

    #[test]
    fn malus_mismatch_against_oracles() {
        let malus = builtin_strategy("malus-stochastic").unwrap();
        // ∫ 2cos²sin² dλ/180 = 1/4
        let m = exact_mismatch(&malus, deg(0.0), deg(0.0)).unwrap();
        assert_abs_diff_eq!(m.mismatch, 0.25, epsilon = 1e-9);
        for (a, b) in [(0.0, 30.0), (-30.0, 30.0), (10.0, 100.0), (5.0, 47.0)] {
            let exact = exact_mismatch(&malus, deg(a), deg(b)).unwrap().mismatch;
            let riemann = riemann_mismatch(&malus, deg(a), deg(b), 20_000);
            assert_abs_diff_eq!(exact, riemann, epsilon = 1e-8);
            assert_abs_diff_eq!(exact, closed_form_mismatch(&malus, deg(a), deg(b)).unwrap(), epsilon = 1e-9);
        }
    }

    #[test]
    fn monte_carlo_matches_exact() {
        let n = 100_000;
        for (name, a, b) in [("nearest-axis", -30.0, 30.0), ("malus-stochastic", 0.0, 0.0)] {
            let s = builtin_strategy(name).unwrap();
            let exact = exact_mismatch(&s, deg(a), deg(b)).unwrap().mismatch;
            let rate = monte_carlo_mismatch(&s, deg(a), deg(b), n, 77).mismatch;
            assert!((rate - exact).abs() <= crate::stats::binomial_halfwidth(exact, n), "{name}: {rate} vs {exact}");
        }
        let na = builtin_strategy("nearest-axis").unwrap();
        assert_eq!(run_lhv_trials(&na, deg(25.0), deg(25.0), 10_000, 1), 0);
    }

    #[test]
    fn bell_triples() {
        let na = builtin_strategy("nearest-axis").unwrap();
        let t = bell_triple(&na, 30.0).unwrap();
        assert_abs_diff_eq!(t.m_left, 1.0 / 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(t.m_right, 1.0 / 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(t.m_wide, 2.0 / 3.0, epsilon = 1e-9);
        assert!(t.satisfied);
        let t = bell_triple(&na, 0.0).unwrap();
        assert_eq!((t.m_left, t.m_right, t.m_wide, t.satisfied), (0.0, 0.0, 0.0, true));
        let malus = builtin_strategy("malus-stochastic").unwrap();
        assert!(bell_triple(&malus, 30.0).unwrap().satisfied);
    }

    #[test]
    fn asymmetric_stations_escape_the_mismatch_bound() {
        // without equal-setting correlation the mismatch form does not bind:
        // station 1 is T at −α and A at 0; station 2 is T at 0 and A at α
        let t1 = ResponseTable::from_fn(4, 1, |f, _| if f < 45.0 { 0.0 } else { 1.0 }).unwrap();
        let t2 = ResponseTable::from_fn(4, 1, |f, _| if f < 45.0 { 1.0 } else { 0.0 }).unwrap();
        let s = LocalStrategy {
            name: "asymmetric".into(),
            lambda_law: LambdaLaw::Uniform,
            response1: Response::Table(t1),
            response2: Response::Table(t2),
        };
        let t = bell_triple(&s, 60.0).unwrap();
        assert_eq!((t.m_left, t.m_right, t.m_wide), (0.0, 0.0, 1.0));
        assert!(!t.satisfied);
    }

    #[test]
    fn cfd_bound() {
        let r = cfd_enumeration_bound(3).unwrap();
        assert!(r.verified);
        assert_eq!(r.assignments, 8);
        assert!(cfd_enumeration_bound(2).unwrap().verified);
        assert!(cfd_enumeration_bound(1).is_err());
        assert!(cfd_enumeration_bound(21).is_err());
        // (T, A, T) on (a, b, c): indicators (1, 1, 0), 0 ≤ 2
        let x = [0u8, 1, 0];
        let ab = (x[0] != x[1]) as u8;
        let bc = (x[1] != x[2]) as u8;
        let ac = (x[0] != x[2]) as u8;
        assert_eq!((ab, bc, ac), (1, 1, 0));
        assert!(ac <= ab + bc);
    }

    #[test]
    fn binned_law_is_exactly_integrable() {
        let s = random_strategy(3, 0);
        let exact = exact_mismatch(&s, deg(-30.0), deg(30.0)).unwrap();
        // every piece is constant, so a midpoint sum on a grid aligned with the
        // bins reproduces the integral up to rounding
        let riemann = riemann_mismatch(&s, deg(-30.0), deg(30.0), 3600);
        assert_abs_diff_eq!(exact.mismatch, riemann, epsilon = 1e-12);
    }

    #[test]
    fn strategy_file_round_trip() {
        let text = r#"{
            "name": "mixed",
            "lambda_bins": [1.0, 3.0],
            "response1": "nearest-axis",
            "response2": {"table": [[0.0, 1.0], [1.0, 0.25]]}
        }"#;
        let s = LocalStrategy::from_json(text).unwrap();
        assert_eq!(s.lambda_law, LambdaLaw::Binned(vec![0.25, 0.75]));
        let again = LocalStrategy::from_json(&s.to_json()).unwrap();
        assert_eq!(s, again);
        assert!(LocalStrategy::from_json(r#"{"name":"x","response1":"bogus","response2":"malus"}"#).is_err());
        assert!(LocalStrategy::from_json(r#"{"name":"x","response1":{"table":[[1.5]]},"response2":"malus"}"#).is_err());
        assert!(LocalStrategy::from_json("not json").is_err());
    }

    #[test]
    fn binned_sampling_covers_support() {
        let law = LambdaLaw::binned(vec![0.0, 1.0, 0.0]).unwrap();
        for u in [0.0, 0.3, 0.999_999] {
            let l = law.sample(u);
            assert!((60.0..120.0).contains(&l), "{l}");
        }
    }
}
