//! Two-threshold dependency levels from an exact 1-D three-group partition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelThresholds {
    pub t1: f64,
    pub t2: f64,
}

impl LevelThresholds {
    pub fn new(t1: f64, t2: f64) -> Result<Self> {
        if !(t1.is_finite() && t2.is_finite()) || t1 >= t2 {
            return Err(Error::InvalidThresholds(format!(
                "need finite t1 < t2, got {t1}, {t2}"
            )));
        }
        Ok(Self { t1, t2 })
    }

    /// Parses `T1,T2`.
    pub fn parse(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| Error::InvalidThresholds(format!("expected T1,T2, got '{s}'")))?;
        let num = |x: &str| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidThresholds(format!("not a number: '{}'", x.trim())))
        };
        Self::new(num(a)?, num(b)?)
    }

    pub fn level(&self, frequency: u64) -> Level {
        assign_level(frequency, self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Low,
    Medium,
    High,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Low, Level::Medium, Level::High];

    pub fn as_str(self) -> &'static str {
        match self {
            Level::Low => "low",
            Level::Medium => "medium",
            Level::High => "high",
        }
    }
}

/// `Low` up to and including `t1`, `Medium` up to and including `t2`,
/// `High` above.
pub fn assign_level(frequency: u64, th: &LevelThresholds) -> Level {
    let f = frequency as f64;
    if f <= th.t1 {
        Level::Low
    } else if f <= th.t2 {
        Level::Medium
    } else {
        Level::High
    }
}

/// Relative tolerance under which two partition costs count as tied.
pub const SSE_TIE_TOLERANCE: f64 = 1e-9;

/// Fits two thresholds by exhaustive search over every pair of split
/// points between the sorted distinct values, minimizing the total
/// within-group sum of squared deviations (over all observations, with
/// multiplicity). Thresholds are midpoints across the chosen splits; ties
/// go to the lexicographically smallest `(t1, t2)`.
pub fn fit_thresholds(frequencies: &[u64]) -> Result<LevelThresholds> {
    let mut sorted = frequencies.to_vec();
    sorted.sort_unstable();
    let mut values: Vec<u64> = Vec::new();
    let mut counts: Vec<u64> = Vec::new();
    for &f in &sorted {
        if values.last() == Some(&f) {
            *counts.last_mut().expect("non-empty") += 1;
        } else {
            values.push(f);
            counts.push(1);
        }
    }
    let d = values.len();
    if d < 3 {
        return Err(Error::DegenerateDistribution { distinct: d });
    }

    // Prefix sums over distinct values, exact in 128-bit integers while they
    // fit; the f64 copies cover inputs too large for exact arithmetic.
    let mut n = vec![0u128; d + 1];
    let mut s = vec![Some(0u128); d + 1];
    let mut q = vec![Some(0u128); d + 1];
    let mut sf = vec![0f64; d + 1];
    let mut qf = vec![0f64; d + 1];
    for i in 0..d {
        let (v, c) = (values[i] as u128, counts[i] as u128);
        n[i + 1] = n[i] + c;
        s[i + 1] = s[i].and_then(|acc| acc.checked_add(c.checked_mul(v)?));
        q[i + 1] = q[i].and_then(|acc| acc.checked_add(c.checked_mul(v.checked_mul(v)?)?));
        sf[i + 1] = sf[i] + c as f64 * v as f64;
        qf[i + 1] = qf[i] + c as f64 * (v as f64) * (v as f64);
    }
    // SSE of distinct values [lo, hi).
    let sse = |lo: usize, hi: usize| -> f64 {
        let cnt = n[hi] - n[lo];
        let exact = (|| {
            let sum = s[hi]? - s[lo]?;
            let sq = q[hi]? - q[lo]?;
            cnt.checked_mul(sq)?.checked_sub(sum.checked_mul(sum)?)
        })();
        match exact {
            Some(scaled) => scaled as f64 / cnt as f64,
            None => {
                let sum = sf[hi] - sf[lo];
                ((qf[hi] - qf[lo]) - sum * sum / cnt as f64).max(0.0)
            }
        }
    };

    // First group [0, i], second (i, j], third (j, d).
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..d - 2 {
        let first = sse(0, i + 1);
        for j in i + 1..d - 1 {
            let total = first + sse(i + 1, j + 1) + sse(j + 1, d);
            let better = match best {
                None => true,
                Some((b, _, _)) => total < b - SSE_TIE_TOLERANCE * b.abs().max(1.0),
            };
            if better {
                best = Some((total, i, j));
            }
        }
    }
    let (_, i, j) = best.expect("d >= 3 gives at least one split pair");
    let mid = |k: usize| (values[k] as f64 + values[k + 1] as f64) / 2.0;
    LevelThresholds::new(mid(i), mid(j))
}
