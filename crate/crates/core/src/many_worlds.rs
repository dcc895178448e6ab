//! Collapse-free branch bookkeeping.
//!
//! A [`BranchState`] is a weighted set of branches. Measuring at one station
//! splits every branch by that station's local outcome and writes only that
//! observer's record; the distant observer learns the result only through an
//! explicit communication event. Every event carries the location it happens
//! at, and [`locality_audit`] replays the log to confirm that an observer's
//! distinguishable records only ever change at their own station.
//!
//! Branch amplitudes are the Born amplitudes, so the branch weights reproduce
//! the orthodox joint distribution exactly.

use serde::Serialize;
use thiserror::Error;

use crate::polarization::{
    expand_in_basis, outcome_probability, project, twin_state, Angle, JointDistribution, Outcome, Photon,
    TwoPhotonState,
};
use crate::rng::TrialStream;
use crate::stats::joint_index;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BranchError {
    #[error("observer {0} has already measured")]
    AlreadyMeasured(u8),
    #[error("observer {0} has nothing to communicate yet")]
    SenderHasNotMeasured(u8),
    #[error("an observer cannot send a record to themselves")]
    SelfCommunication,
    #[error("both observers must measure first")]
    NotFullyMeasured,
    #[error("event {0} cannot be replayed: {1}")]
    Replay(usize, String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Location {
    Source,
    Station1,
    Station2,
}

impl Location {
    pub fn station(observer: Photon) -> Location {
        match observer {
            Photon::First => Location::Station1,
            Photon::Second => Location::Station2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EventKind {
    Source,
    Measure {
        #[serde(serialize_with = "ser_photon")]
        observer: Photon,
        #[serde(rename = "theta_deg")]
        theta: Angle,
    },
    Communicate {
        #[serde(serialize_with = "ser_photon")]
        from: Photon,
        #[serde(serialize_with = "ser_photon")]
        to: Photon,
    },
}

fn ser_photon<S: serde::Serializer>(p: &Photon, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u8(p.number())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Event {
    #[serde(flatten)]
    pub kind: EventKind,
    pub location: Location,
}

/// What one observer remembers: their own result and the other's, if told.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct ObserverRecord {
    pub own: Option<Outcome>,
    pub other: Option<Outcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Branch {
    pub amplitude: f64,
    /// Measured outcome per photon; `None` until that photon is measured.
    pub outcomes: [Option<Outcome>; 2],
    #[serde(skip)]
    pub settings: [Option<Angle>; 2],
    #[serde(skip)]
    pub photon_state: TwoPhotonState,
    pub record1: ObserverRecord,
    pub record2: ObserverRecord,
}

impl Branch {
    pub fn weight(&self) -> f64 {
        self.amplitude * self.amplitude
    }

    pub fn record(&self, observer: Photon) -> &ObserverRecord {
        match observer {
            Photon::First => &self.record1,
            Photon::Second => &self.record2,
        }
    }

    fn record_mut(&mut self, observer: Photon) -> &mut ObserverRecord {
        match observer {
            Photon::First => &mut self.record1,
            Photon::Second => &mut self.record2,
        }
    }

    pub fn joint_outcome(&self) -> Option<(Outcome, Outcome)> {
        Some((self.outcomes[0]?, self.outcomes[1]?))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchState {
    branches: Vec<Branch>,
    events: Vec<Event>,
}

/// Source event: one branch holding the twin state, nobody has measured.
pub fn initial_state() -> BranchState {
    BranchState {
        branches: vec![Branch {
            amplitude: 1.0,
            outcomes: [None, None],
            settings: [None, None],
            photon_state: twin_state(),
            record1: ObserverRecord::default(),
            record2: ObserverRecord::default(),
        }],
        events: vec![Event {
            kind: EventKind::Source,
            location: Location::Source,
        }],
    }
}

impl BranchState {
    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn total_weight(&self) -> f64 {
        self.branches.iter().map(Branch::weight).sum()
    }

    fn measure_unlogged(&self, observer: Photon, theta: Angle) -> Result<Vec<Branch>, BranchError> {
        if self.branches.iter().any(|b| b.record(observer).own.is_some()) {
            return Err(BranchError::AlreadyMeasured(observer.number()));
        }
        let i = observer.index();
        let mut out = Vec::with_capacity(2 * self.branches.len());
        for b in &self.branches {
            for outcome in Outcome::ALL {
                // zero-probability children are pruned
                let Ok(state) = project(&b.photon_state, observer, theta, outcome) else {
                    continue;
                };
                let p = outcome_probability(&b.photon_state, observer, theta, outcome);
                let mut child = b.clone();
                child.amplitude = b.amplitude * p.sqrt();
                child.photon_state = state;
                child.outcomes[i] = Some(outcome);
                child.settings[i] = Some(theta);
                child.record_mut(observer).own = Some(outcome);
                out.push(child);
            }
        }
        Ok(out)
    }

    fn communicate_unlogged(&self, from: Photon, to: Photon) -> Result<Vec<Branch>, BranchError> {
        if from == to {
            return Err(BranchError::SelfCommunication);
        }
        let mut out = self.branches.clone();
        for b in &mut out {
            let sent = b
                .record(from)
                .own
                .ok_or(BranchError::SenderHasNotMeasured(from.number()))?;
            b.record_mut(to).other = Some(sent);
        }
        Ok(out)
    }

    fn with(&self, branches: Vec<Branch>, event: Event) -> BranchState {
        let mut events = self.events.clone();
        events.push(event);
        BranchState { branches, events }
    }

    pub fn trace(&self) -> BranchTrace {
        BranchTrace {
            events: self.events.clone(),
            branches: self.branches.clone(),
        }
    }
}

/// Split every branch by `observer`'s local result at `theta`.
pub fn local_measure(bs: &BranchState, observer: Photon, theta: Angle) -> Result<BranchState, BranchError> {
    let branches = bs.measure_unlogged(observer, theta)?;
    Ok(bs.with(
        branches,
        Event {
            kind: EventKind::Measure { observer, theta },
            location: Location::station(observer),
        },
    ))
}

/// Deliver `from_observer`'s result to `to_observer`. Logged at the recipient.
pub fn communicate(bs: &BranchState, from_observer: Photon, to_observer: Photon) -> Result<BranchState, BranchError> {
    let branches = bs.communicate_unlogged(from_observer, to_observer)?;
    Ok(bs.with(
        branches,
        Event {
            kind: EventKind::Communicate {
                from: from_observer,
                to: to_observer,
            },
            location: Location::station(to_observer),
        },
    ))
}

/// Number of distinct record values `observer` holds across branches.
pub fn distinguishable_records(bs: &BranchState, observer: Photon) -> usize {
    let mut seen: Vec<ObserverRecord> = Vec::with_capacity(4);
    for b in &bs.branches {
        let r = *b.record(observer);
        if !seen.contains(&r) {
            seen.push(r);
        }
    }
    seen.len()
}

/// Branch weights summed per joint outcome.
pub fn branch_statistics(bs: &BranchState) -> Result<JointDistribution, BranchError> {
    let mut p = [0.0; 4];
    for b in &bs.branches {
        let (o1, o2) = b.joint_outcome().ok_or(BranchError::NotFullyMeasured)?;
        p[joint_index(o1, o2)] += b.weight();
    }
    Ok(JointDistribution::from_array(p))
}

/// Amplitudes of the branch's post-measurement two-photon state on a product
/// basis, in `[bb, b⊥, ⊥b, ⊥⊥]` order.
pub fn per_branch_expansion(branch: &Branch, basis: Angle) -> Result<[f64; 4], BranchError> {
    branch.joint_outcome().ok_or(BranchError::NotFullyMeasured)?;
    Ok(expand_in_basis(&branch.photon_state, basis))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditViolation {
    pub event_index: usize,
    pub observer: u8,
    pub location: Location,
    pub records_before: usize,
    pub records_after: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub passed: bool,
    pub events_checked: usize,
    pub violation: Option<AuditViolation>,
}

/// Replay `bs`'s event log and check branching locality.
pub fn locality_audit(bs: &BranchState) -> AuditReport {
    audit_events(bs.events()).unwrap_or(AuditReport {
        passed: false,
        events_checked: 0,
        violation: None,
    })
}

/// Replay an arbitrary event log. After each event, an observer's count of
/// distinguishable records may only have changed if the event happened at
/// that observer's station.
pub fn audit_events(events: &[Event]) -> Result<AuditReport, BranchError> {
    let mut state: Option<BranchState> = None;
    for (index, event) in events.iter().enumerate() {
        let next = match (event.kind, &state) {
            (EventKind::Source, None) => initial_state(),
            (EventKind::Source, Some(_)) => {
                return Err(BranchError::Replay(index, "second source event".into()));
            }
            (_, None) => return Err(BranchError::Replay(index, "log does not start at the source".into())),
            (EventKind::Measure { observer, theta }, Some(s)) => s.with(
                s.measure_unlogged(observer, theta)
                    .map_err(|e| BranchError::Replay(index, e.to_string()))?,
                *event,
            ),
            (EventKind::Communicate { from, to }, Some(s)) => s.with(
                s.communicate_unlogged(from, to)
                    .map_err(|e| BranchError::Replay(index, e.to_string()))?,
                *event,
            ),
        };
        if let Some(prev) = &state {
            for observer in [Photon::First, Photon::Second] {
                let before = distinguishable_records(prev, observer);
                let after = distinguishable_records(&next, observer);
                if before != after && event.location != Location::station(observer) {
                    return Ok(AuditReport {
                        passed: false,
                        events_checked: index + 1,
                        violation: Some(AuditViolation {
                            event_index: index,
                            observer: observer.number(),
                            location: event.location,
                            records_before: before,
                            records_after: after,
                        }),
                    });
                }
            }
        }
        state = Some(next);
    }
    Ok(AuditReport {
        passed: true,
        events_checked: events.len(),
        violation: None,
    })
}

/// JSON export: `{events: [...], branches: [{amplitude, outcomes, record1, record2}]}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchTrace {
    pub events: Vec<Event>,
    pub branches: Vec<Branch>,
}

/// Samples one observer lineage per trial, with probability equal to the branch weight.
#[derive(Debug, Clone)]
pub struct BranchSampler {
    /// Cumulative weights and the joint outcome of each branch, in branch order.
    lineages: Vec<(f64, (Outcome, Outcome))>,
}

impl BranchSampler {
    pub fn new(theta1: Angle, theta2: Angle) -> Self {
        let bs = local_measure(&initial_state(), Photon::First, theta1).expect("fresh state");
        let bs = local_measure(&bs, Photon::Second, theta2).expect("fresh observer");
        let mut acc = 0.0;
        let lineages = bs
            .branches
            .iter()
            .map(|b| {
                acc += b.weight();
                (acc, b.joint_outcome().expect("both measured"))
            })
            .collect();
        BranchSampler { lineages }
    }

    pub fn sample(&self, stream: &mut TrialStream) -> (Outcome, Outcome) {
        let total = self.lineages.last().map_or(1.0, |l| l.0);
        let u = stream.uniform() * total;
        self.lineages
            .iter()
            .find(|(c, _)| u < *c)
            .or(self.lineages.last())
            .map(|l| l.1)
            .expect("at least one branch")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polarization::{joint_distribution, TOLERANCE};
    use approx::assert_abs_diff_eq;

    fn deg(d: f64) -> Angle {
        Angle::from_degrees(d)
    }

    fn walkthrough(t1: f64, t2: f64) -> Vec<BranchState> {
        let s0 = initial_state();
        let s1 = local_measure(&s0, Photon::First, deg(t1)).unwrap();
        let s2 = local_measure(&s1, Photon::Second, deg(t2)).unwrap();
        let s3 = communicate(&s2, Photon::First, Photon::Second).unwrap();
        let s4 = communicate(&s3, Photon::Second, Photon::First).unwrap();
        vec![s0, s1, s2, s3, s4]
    }

    #[test]
    fn initial_conditions() {
        let s = initial_state();
        assert_eq!(s.branches().len(), 1);
        assert_eq!(s.total_weight(), 1.0);
        assert_eq!(branch_statistics(&s), Err(BranchError::NotFullyMeasured));
        assert_eq!(s.events().len(), 1);
        assert_eq!(s.events()[0].location, Location::Source);
    }

    #[test]
    fn branching_walkthrough() {
        let states = walkthrough(30.0, -30.0);
        let counts: Vec<usize> = states.iter().map(|s| s.branches().len()).collect();
        assert_eq!(counts, vec![1, 2, 4, 4, 4]);

        let w: Vec<f64> = states[1].branches().iter().map(Branch::weight).collect();
        assert_abs_diff_eq!(w[0], 0.5, epsilon = TOLERANCE);
        assert_abs_diff_eq!(w[1], 0.5, epsilon = TOLERANCE);
        for b in states[1].branches() {
            assert_eq!(b.record2, ObserverRecord::default());
        }

        let weights: Vec<f64> = states[4].branches().iter().map(Branch::weight).collect();
        for (a, e) in weights.iter().zip([0.125, 0.375, 0.375, 0.125]) {
            assert_abs_diff_eq!(*a, e, epsilon = TOLERANCE);
        }
        let labels: Vec<_> = states[2].branches().iter().map(|b| b.joint_outcome().unwrap()).collect();
        use Outcome::*;
        assert_eq!(
            labels,
            vec![
                (Transmitted, Transmitted),
                (Transmitted, Absorbed),
                (Absorbed, Transmitted),
                (Absorbed, Absorbed)
            ]
        );

        let records = |s: &BranchState| {
            (
                distinguishable_records(s, Photon::First),
                distinguishable_records(s, Photon::Second),
            )
        };
        assert_eq!(records(&states[1]), (2, 1));
        assert_eq!(records(&states[2]), (2, 2));
        assert_eq!(records(&states[3]), (2, 4));
        assert_eq!(records(&states[4]), (4, 4));
        for s in &states {
            assert_abs_diff_eq!(s.total_weight(), 1.0, epsilon = TOLERANCE);
            assert!(locality_audit(s).passed);
        }
    }

    #[test]
    fn equal_angles_prune_to_two_branches() {
        let states = walkthrough(40.0, 40.0);
        let counts: Vec<usize> = states.iter().map(|s| s.branches().len()).collect();
        assert_eq!(counts, vec![1, 2, 2, 2, 2]);
        let stats = branch_statistics(&states[4]).unwrap();
        assert_abs_diff_eq!(stats.tt, 0.5, epsilon = TOLERANCE);
        assert_abs_diff_eq!(stats.aa, 0.5, epsilon = TOLERANCE);
        assert_eq!(stats.mismatch(), 0.0);
    }

    #[test]
    fn born_weights() {
        let states = walkthrough(30.0, -30.0);
        let stats = branch_statistics(&states[4]).unwrap();
        let exact = joint_distribution(&twin_state(), deg(30.0), deg(-30.0));
        for (a, e) in stats.to_array().iter().zip(exact.to_array()) {
            assert_abs_diff_eq!(*a, e, epsilon = TOLERANCE);
        }
    }

    #[test]
    fn collapsed_expansion_inside_tt_branch() {
        let states = walkthrough(30.0, -30.0);
        let tt = &states[4].branches()[0];
        let r3 = 3f64.sqrt();
        let e = per_branch_expansion(tt, deg(0.0)).unwrap();
        for (a, x) in e.iter().zip([0.75, -r3 / 4.0, r3 / 4.0, -0.25]) {
            assert_abs_diff_eq!(*a, x, epsilon = TOLERANCE);
        }
        let states = walkthrough(0.0, 0.0);
        let e = per_branch_expansion(&states[4].branches()[0], deg(0.0)).unwrap();
        for (a, x) in e.iter().zip([1.0, 0.0, 0.0, 0.0]) {
            assert_abs_diff_eq!(*a, x, epsilon = TOLERANCE);
        }
        let half = &walkthrough(30.0, -30.0)[1];
        assert_eq!(
            per_branch_expansion(&half.branches()[0], deg(0.0)),
            Err(BranchError::NotFullyMeasured)
        );
    }

    #[test]
    fn errors() {
        let s = initial_state();
        assert_eq!(
            communicate(&s, Photon::First, Photon::Second),
            Err(BranchError::SenderHasNotMeasured(1))
        );
        let s1 = local_measure(&s, Photon::First, deg(10.0)).unwrap();
        assert_eq!(
            local_measure(&s1, Photon::First, deg(20.0)),
            Err(BranchError::AlreadyMeasured(1))
        );
        assert_eq!(
            communicate(&s1, Photon::First, Photon::First),
            Err(BranchError::SelfCommunication)
        );
    }

    #[test]
    fn audit_catches_distant_record_edit() {
        let mut events = walkthrough(30.0, -30.0)[4].events().to_vec();
        // measurement of photon 1 logged as if it happened at station 2
        events[1].location = Location::Station2;
        let report = audit_events(&events).unwrap();
        assert!(!report.passed);
        let v = report.violation.unwrap();
        assert_eq!((v.event_index, v.observer), (1, 1));
        assert!(audit_events(&[]).unwrap().passed);
    }

    #[test]
    fn trace_json_shape() {
        let s = &walkthrough(30.0, -30.0)[4];
        let v = serde_json::to_value(s.trace()).unwrap();
        assert_eq!(v["events"][1]["kind"], "measure");
        assert_eq!(v["events"][1]["observer"], 1);
        assert_eq!(v["events"][1]["location"], "station1");
        assert_eq!(v["events"][3]["kind"], "communicate");
        assert_eq!(v["branches"][1]["outcomes"], serde_json::json!(["T", "A"]));
        assert_eq!(v["branches"][1]["record2"]["other"], "T");
    }
}
