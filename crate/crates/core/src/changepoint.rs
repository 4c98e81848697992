//! Exact penalized change-point segmentation.
//!
//! Segments are scored with the within-segment sum of squared errors
//! (Gaussian change in mean). Two solvers minimise
//! `sum(segment costs) + penalty * n_changepoints`:
//!
//! * [`opt_partition`], the quadratic dynamic program without pruning, kept as
//!   the reference solution;
//! * [`pelt`], the same recursion with candidate pruning, which returns the
//!   identical optimum in roughly linear time when change points are frequent.
//!
//! A change point is reported as the index of the *last* element of a
//! segment; the final index of the series is never a change point.

use serde::Serialize;

use crate::error::{Error, Result};

/// Penalties swept by the elbow criterion.
pub const PENALTY_SWEEP: [f64; 9] = [2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];

/// A named, finite time series starting at slice `t0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureSeries {
    pub name: String,
    pub t0: usize,
    values: Vec<f64>,
}

impl FeatureSeries {
    pub fn new(name: impl Into<String>, t0: usize, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(FeatureSeries {
            name: name.into(),
            t0,
            values,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl AsRef<[f64]> for FeatureSeries {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// Sum-of-squared-errors segment cost with O(1) queries.
///
/// Values are centred on the series mean before accumulating, which keeps the
/// prefix sums well conditioned for series with a large offset.
#[derive(Debug, Clone)]
pub struct SseCost {
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
}

impl SseCost {
    pub fn new(y: &[f64]) -> Self {
        let mean = if y.is_empty() {
            0.0
        } else {
            y.iter().sum::<f64>() / y.len() as f64
        };
        let mut sum = Vec::with_capacity(y.len() + 1);
        let mut sum_sq = Vec::with_capacity(y.len() + 1);
        let (mut s, mut s2) = (0.0, 0.0);
        sum.push(0.0);
        sum_sq.push(0.0);
        for &v in y {
            let c = v - mean;
            s += c;
            s2 += c * c;
            sum.push(s);
            sum_sq.push(s2);
        }
        SseCost { sum, sum_sq }
    }

    pub fn len(&self) -> usize {
        self.sum.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cost of the inclusive segment `a..=b`.
    pub fn cost(&self, a: usize, b: usize) -> f64 {
        self.cost_range(a, b + 1)
    }

    /// Cost of the half-open segment `start..end`.
    #[inline]
    fn cost_range(&self, start: usize, end: usize) -> f64 {
        let m = (end - start) as f64;
        let s = self.sum[end] - self.sum[start];
        let s2 = self.sum_sq[end] - self.sum_sq[start];
        (s2 - s * s / m).max(0.0)
    }
}

/// Cost of the inclusive segment `a..=b` of `y`.
pub fn segment_cost(y: &[f64], a: usize, b: usize) -> f64 {
    assert!(a <= b && b < y.len(), "segment {a}..={b} out of range");
    SseCost::new(&y[a..=b]).cost(0, b - a)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChangePointResult {
    /// Strictly increasing last-indices of all segments but the final one.
    pub changepoints: Vec<usize>,
    pub penalty: f64,
    /// Sum of segment costs plus `penalty * changepoints.len()`.
    pub total_cost: f64,
}

impl ChangePointResult {
    pub fn n_segments(&self) -> usize {
        self.changepoints.len() + 1
    }

    /// Inclusive `(first, last)` bounds of every segment of a series of length `n`.
    pub fn segments(&self, n: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.n_segments());
        let mut start = 0;
        for &cp in &self.changepoints {
            out.push((start, cp));
            start = cp + 1;
        }
        out.push((start, n - 1));
        out
    }
}

fn check_inputs(y: &[f64], penalty: f64) -> Result<()> {
    if y.is_empty() {
        return Err(Error::EmptySeries);
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    if !(penalty.is_finite() && penalty > 0.0) {
        return Err(Error::InvalidPenalty(penalty));
    }
    Ok(())
}

fn backtrack(last: &[usize], penalty: f64, total_cost: f64) -> ChangePointResult {
    let mut cps = Vec::new();
    let mut t = last.len() - 1;
    while last[t] > 0 {
        cps.push(last[t] - 1);
        t = last[t];
    }
    cps.reverse();
    ChangePointResult {
        changepoints: cps,
        penalty,
        total_cost,
    }
}

/// Exhaustive optimal partitioning, O(n^2).
#[allow(clippy::needless_range_loop)]
pub fn opt_partition(y: &[f64], penalty: f64) -> Result<ChangePointResult> {
    check_inputs(y, penalty)?;
    let cost = SseCost::new(y);
    let n = y.len();
    let mut f = vec![0.0; n + 1];
    let mut last = vec![0; n + 1];
    f[0] = -penalty;
    for t in 1..=n {
        let mut best = f64::INFINITY;
        let mut arg = 0;
        for s in 0..t {
            let v = f[s] + cost.cost_range(s, t) + penalty;
            if v < best {
                best = v;
                arg = s;
            }
        }
        f[t] = best;
        last[t] = arg;
    }
    Ok(backtrack(&last, penalty, f[n]))
}

/// Candidate-pruning record: `(candidate, t)` means `candidate` was discarded
/// after processing prefix length `t`.
#[derive(Debug, Clone, Default)]
pub struct PruneTrace {
    pub pruned: Vec<(usize, usize)>,
    pub max_candidates: usize,
}

/// PELT with pruning constant K = 0 (valid for the SSE cost).
pub fn pelt(y: &[f64], penalty: f64) -> Result<ChangePointResult> {
    check_inputs(y, penalty)?;
    Ok(pelt_with_cost(&SseCost::new(y), penalty, None))
}

/// [`pelt`] that also records every pruning decision.
pub fn pelt_traced(y: &[f64], penalty: f64) -> Result<(ChangePointResult, PruneTrace)> {
    check_inputs(y, penalty)?;
    let mut trace = PruneTrace::default();
    let r = pelt_with_cost(&SseCost::new(y), penalty, Some(&mut trace));
    Ok((r, trace))
}

fn pelt_with_cost(
    cost: &SseCost,
    penalty: f64,
    mut trace: Option<&mut PruneTrace>,
) -> ChangePointResult {
    let n = cost.len();
    let mut f = vec![0.0; n + 1];
    let mut last = vec![0; n + 1];
    f[0] = -penalty;
    let mut candidates: Vec<usize> = vec![0];
    let mut vals: Vec<f64> = Vec::new();
    for t in 1..=n {
        vals.clear();
        let mut best = f64::INFINITY;
        let mut arg = 0;
        for &s in &candidates {
            let v = f[s] + cost.cost_range(s, t);
            vals.push(v);
            if v + penalty < best {
                best = v + penalty;
                arg = s;
            }
        }
        f[t] = best;
        last[t] = arg;

        if let Some(tr) = trace.as_deref_mut() {
            tr.max_candidates = tr.max_candidates.max(candidates.len());
            for (&s, &v) in candidates.iter().zip(&vals) {
                if v > best {
                    tr.pruned.push((s, t));
                }
            }
        }
        let mut k = 0;
        candidates.retain(|_| {
            let keep = vals[k] <= best;
            k += 1;
            keep
        });
        candidates.push(t);
    }
    backtrack(&last, penalty, f[n])
}

/// Z-score a series with the population standard deviation; a constant
/// series maps to all zeros.
pub fn standardize(y: &[f64]) -> Vec<f64> {
    if y.is_empty() {
        return Vec::new();
    }
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let sd = var.sqrt();
    let scale = y.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || sd <= 64.0 * f64::EPSILON * scale {
        return vec![0.0; y.len()];
    }
    y.iter().map(|v| (v - mean) / sd).collect()
}

/// Outcome of the penalty sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElbowSelection {
    pub penalties: Vec<f64>,
    pub counts: Vec<usize>,
    /// Index into `penalties` of the chosen penalty.
    pub selected: usize,
    /// No interior point has a non-zero second difference.
    pub degenerate: bool,
}

impl ElbowSelection {
    pub fn penalty(&self) -> f64 {
        self.penalties[self.selected]
    }
}

/// Pick the interior index maximising `|c[i+1] + c[i-1] - 2 c[i]|`, ties to
/// the smaller index. Returns `(index, degenerate)`.
pub fn select_elbow(counts: &[usize]) -> Result<(usize, bool)> {
    if counts.len() < 3 {
        return Err(Error::InvalidConfig(
            "elbow selection needs at least three penalties".into(),
        ));
    }
    let mut best = 1;
    let mut best_val = -1_i64;
    for i in 1..counts.len() - 1 {
        let d = (counts[i + 1] as i64 + counts[i - 1] as i64 - 2 * counts[i] as i64).abs();
        if d > best_val {
            best_val = d;
            best = i;
        }
    }
    Ok((best, best_val == 0))
}

/// Run PELT for every penalty and select one by the elbow rule.
///
/// Returns the selection and the result for every penalty.
pub fn elbow_penalty(
    y: &[f64],
    penalties: &[f64],
) -> Result<(ElbowSelection, Vec<ChangePointResult>)> {
    if penalties.len() < 3 {
        return Err(Error::InvalidConfig(
            "elbow selection needs at least three penalties".into(),
        ));
    }
    for &p in penalties {
        check_inputs(y, p)?;
    }
    let cost = SseCost::new(y);
    let results: Vec<ChangePointResult> = penalties
        .iter()
        .map(|&p| pelt_with_cost(&cost, p, None))
        .collect();
    let counts: Vec<usize> = results.iter().map(|r| r.changepoints.len()).collect();
    let (selected, degenerate) = select_elbow(&counts)?;
    Ok((
        ElbowSelection {
            penalties: penalties.to_vec(),
            counts,
            selected,
            degenerate,
        },
        results,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Detection {
    /// Segmentation of the standardized series at the selected penalty.
    pub result: ChangePointResult,
    pub elbow: ElbowSelection,
}

/// Standardize, sweep penalties 2..=10, and segment at the elbow penalty.
/// No smoothing is applied.
pub fn detect(y: &[f64]) -> Result<Detection> {
    if y.len() < 3 {
        return Err(Error::SeriesTooShort {
            needed: 3,
            got: y.len(),
        });
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let z = standardize(y);
    let (elbow, mut results) = elbow_penalty(&z, &PENALTY_SWEEP)?;
    let result = results.swap_remove(elbow.selected);
    Ok(Detection { result, elbow })
}
