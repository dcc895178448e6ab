//! Counting statistics: binomial confidence half-widths and χ² goodness of fit.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::polarization::{JointDistribution, Outcome};

/// Width multiplier for the binomial confidence intervals (3σ).
pub const CI_SIGMAS: f64 = 3.0;

/// Significance level used by the goodness-of-fit checks.
pub const GOF_SIGNIFICANCE: f64 = 0.001;

/// `3·√(p(1−p)/n)`; zero when `p` is 0 or 1.
pub fn binomial_halfwidth(rate: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    CI_SIGMAS * (rate * (1.0 - rate) / n as f64).max(0.0).sqrt()
}

/// Joint outcome counts in `[TT, TA, AT, AA]` order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct JointCounts {
    pub tt: u64,
    pub ta: u64,
    pub at: u64,
    pub aa: u64,
}

impl JointCounts {
    pub fn from_array(c: [u64; 4]) -> Self {
        JointCounts {
            tt: c[0],
            ta: c[1],
            at: c[2],
            aa: c[3],
        }
    }

    pub fn to_array(&self) -> [u64; 4] {
        [self.tt, self.ta, self.at, self.aa]
    }

    pub fn total(&self) -> u64 {
        self.tt + self.ta + self.at + self.aa
    }

    pub fn mismatches(&self) -> u64 {
        self.ta + self.at
    }

    pub fn record(&mut self, first: Outcome, second: Outcome) {
        match joint_index(first, second) {
            0 => self.tt += 1,
            1 => self.ta += 1,
            2 => self.at += 1,
            _ => self.aa += 1,
        }
    }

    /// Transmission count for photon 1 (`first = true`) or photon 2.
    pub fn transmitted(&self, first: bool) -> u64 {
        if first {
            self.tt + self.ta
        } else {
            self.tt + self.at
        }
    }
}

pub(crate) fn joint_index(first: Outcome, second: Outcome) -> usize {
    2 * first.index() + second.index()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub critical: f64,
    pub passed: bool,
}

/// Pearson χ² test of observed counts against expected probabilities.
///
/// Cells with zero expected probability do not count towards the degrees of
/// freedom, but any observation in such a cell fails the test outright.
pub fn chi_square_gof(observed: &[u64], expected: &[f64], significance: f64) -> ChiSquareTest {
    assert_eq!(observed.len(), expected.len());
    let n: u64 = observed.iter().sum();
    let mut statistic = 0.0;
    let mut cells = 0usize;
    for (&o, &p) in observed.iter().zip(expected) {
        if p <= 1e-12 {
            if o > 0 {
                statistic = f64::INFINITY;
            }
            continue;
        }
        cells += 1;
        let e = p * n as f64;
        statistic += (o as f64 - e).powi(2) / e;
    }
    let dof = cells.saturating_sub(1);
    if dof == 0 {
        return ChiSquareTest {
            statistic,
            dof,
            critical: 0.0,
            passed: statistic.is_finite(),
        };
    }
    let critical = ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(1.0 - significance);
    ChiSquareTest {
        statistic,
        dof,
        critical,
        passed: statistic <= critical,
    }
}

/// χ² test of joint counts against a joint distribution.
pub fn joint_gof(counts: &JointCounts, expected: &JointDistribution) -> ChiSquareTest {
    chi_square_gof(&counts.to_array(), &expected.to_array(), GOF_SIGNIFICANCE)
}
