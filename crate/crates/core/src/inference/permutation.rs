//! Two-sample permutation tests.
//!
//! A relabeling assigns `m1` of the pooled `m1 + m2` summaries to the first
//! group. Exhaustive mode evaluates every relabeling and reports the exact
//! fraction at least as extreme as the observed one; sampled mode draws
//! relabelings from independent `(seed, index)` streams and reports
//! `(1 + hits) / (1 + draws)`.

use rand::seq::index;
use rayon::prelude::*;

use super::{PermutationsUsed, TestMethod, TestReport};
use crate::distance::{paired_points, wasserstein_points};
use crate::error::{Result, TdaError};
use crate::landscape::{landscape_integral, PersistenceLandscape};
use crate::persistence::PersistenceDiagram;
use crate::rng::stream_rng;

/// Relabeling counts up to this are always enumerated exhaustively.
pub const EXHAUSTIVE_AUTO_LIMIT: u64 = 20_000;
const EXHAUSTIVE_HARD_LIMIT: u64 = 50_000_000;

/// Requested null-distribution size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Permutations {
    Exhaustive,
    /// Random relabelings; enumeration is used instead when there are at
    /// most [`EXHAUSTIVE_AUTO_LIMIT`] relabelings.
    Sampled(usize),
}

/// Which tail of the statistic counts as evidence against the null.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Smaller,
    Larger,
}

/// Number of ways to choose `k` of `n`, saturating at `u64::MAX`.
pub fn split_count(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

fn at_least_as_extreme(value: f64, observed: f64, direction: Direction) -> bool {
    let tol = 1e-12 * observed.abs().max(1.0);
    match direction {
        Direction::Smaller => value <= observed + tol,
        Direction::Larger => value >= observed - tol,
    }
}

/// Advances `combo` to the next `k`-subset of `0..n` in lexicographic order.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Generic permutation p-value. `statistic` receives a membership mask
/// (`true` = first group) over the pooled items, the first `m1` of which
/// form the observed first group.
///
/// Returns `(observed statistic, p-value, mode used, relabelings)`.
pub fn permutation_p_value<F>(
    total: usize,
    m1: usize,
    direction: Direction,
    permutations: Permutations,
    seed: u64,
    statistic: F,
) -> Result<(f64, f64, PermutationsUsed, u64)>
where
    F: Fn(&[bool]) -> f64 + Sync,
{
    if m1 == 0 || m1 >= total {
        return Err(TdaError::invalid("both groups must be non-empty"));
    }
    let mut observed_mask = vec![false; total];
    observed_mask[..m1].iter_mut().for_each(|b| *b = true);
    let observed = statistic(&observed_mask);

    let splits = split_count(total, m1);
    let exhaustive = match permutations {
        Permutations::Exhaustive => true,
        Permutations::Sampled(_) => splits <= EXHAUSTIVE_AUTO_LIMIT,
    };
    if exhaustive {
        if splits > EXHAUSTIVE_HARD_LIMIT {
            return Err(TdaError::invalid(format!(
                "{splits} relabelings are too many to enumerate; request a sampled test"
            )));
        }
        let mut combo: Vec<usize> = (0..m1).collect();
        let mut mask = vec![false; total];
        let mut hits = 0u64;
        let mut seen = 0u64;
        loop {
            mask.iter_mut().for_each(|b| *b = false);
            for &i in &combo {
                mask[i] = true;
            }
            if at_least_as_extreme(statistic(&mask), observed, direction) {
                hits += 1;
            }
            seen += 1;
            if !next_combination(&mut combo, total) {
                break;
            }
        }
        debug_assert_eq!(seen, splits);
        return Ok((
            observed,
            hits as f64 / seen as f64,
            PermutationsUsed::Exhaustive,
            seen,
        ));
    }

    let draws = match permutations {
        Permutations::Sampled(n) if n > 0 => n,
        _ => return Err(TdaError::invalid("permutation count must be positive")),
    };
    let hits: u64 = (0..draws as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            let mut mask = vec![false; total];
            for j in index::sample(&mut rng, total, m1) {
                mask[j] = true;
            }
            u64::from(at_least_as_extreme(statistic(&mask), observed, direction))
        })
        .sum();
    let p = (1 + hits) as f64 / (1 + draws) as f64;
    Ok((
        observed,
        p,
        PermutationsUsed::Sampled(draws),
        draws as u64 + 1,
    ))
}

/// Permutation test on two samples of diagrams using the within-group
/// joint loss
/// `sum_g 1/(2 m_g (m_g - 1)) sum_{i<j in g} W_p(d_i, d_j)^p`.
/// Small losses are evidence that the groups differ.
pub fn diagram_permutation_test(
    group1: &[PersistenceDiagram],
    group2: &[PersistenceDiagram],
    h: usize,
    p: f64,
    permutations: Permutations,
    seed: u64,
) -> Result<TestReport> {
    if group1.len() < 2 || group2.len() < 2 {
        return Err(TdaError::invalid("each group needs at least two diagrams"));
    }
    if !(p >= 1.0) || !p.is_finite() {
        return Err(TdaError::invalid(format!(
            "Wasserstein order must be >= 1, got {p}"
        )));
    }
    let pooled: Vec<&PersistenceDiagram> = group1.iter().chain(group2).collect();
    let points = pooled
        .iter()
        .map(|d| paired_points(pooled[0], d, h).map(|(_, b)| b))
        .collect::<Result<Vec<_>>>()?;
    let n = pooled.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let costs: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| wasserstein_points(&points[i], &points[j], p).cost)
        .collect();
    let mut table = vec![0.0; n * n];
    for (&(i, j), &c) in pairs.iter().zip(&costs) {
        table[i * n + j] = c;
        table[j * n + i] = c;
    }

    let loss = |mask: &[bool]| -> f64 {
        let mut total = 0.0;
        for group in [true, false] {
            let members: Vec<usize> = (0..n).filter(|&i| mask[i] == group).collect();
            let m = members.len() as f64;
            let mut sum = 0.0;
            for (a, &i) in members.iter().enumerate() {
                for &j in &members[a + 1..] {
                    sum += table[i * n + j];
                }
            }
            total += sum / (2.0 * m * (m - 1.0));
        }
        total
    };
    let (observed, p_value, used, relabelings) = permutation_p_value(
        n,
        group1.len(),
        Direction::Smaller,
        permutations,
        seed,
        loss,
    )?;
    Ok(TestReport {
        method: TestMethod::DiagramPermutation,
        p_value,
        observed_statistic: observed,
        permutations_used: used,
        relabelings,
        seed,
        homology_dimension: Some(h),
        group_sizes: [group1.len(), group2.len()],
        tests_run: 1,
    })
}

/// Permutation test on the total landscape area: the statistic is the
/// absolute difference of group means of `landscape_integral`.
pub fn landscape_functional_test(
    group1: &[PersistenceLandscape],
    group2: &[PersistenceLandscape],
    permutations: Permutations,
    seed: u64,
) -> Result<TestReport> {
    let first = group1
        .first()
        .or(group2.first())
        .ok_or_else(|| TdaError::Empty("no landscapes".into()))?;
    if group1.is_empty() || group2.is_empty() {
        return Err(TdaError::invalid("both groups must be non-empty"));
    }
    for l in group1.iter().chain(group2) {
        if l.homology_dimension() != first.homology_dimension() {
            return Err(TdaError::invalid(format!(
                "mixed homology dimensions {} and {}",
                first.homology_dimension(),
                l.homology_dimension()
            )));
        }
        if l.domain_cap() != first.domain_cap() {
            return Err(TdaError::CapMismatch(first.domain_cap(), l.domain_cap()));
        }
    }
    let scalars: Vec<f64> = group1
        .iter()
        .chain(group2)
        .map(landscape_integral)
        .collect();
    let mut report = scalar_permutation_test(&scalars, group1.len(), permutations, seed)?;
    report.homology_dimension = Some(first.homology_dimension());
    Ok(report)
}

/// `|mean(first m1) - mean(rest)|` permutation test on raw scalars.
pub(crate) fn scalar_permutation_test(
    scalars: &[f64],
    m1: usize,
    permutations: Permutations,
    seed: u64,
) -> Result<TestReport> {
    let n = scalars.len();
    let statistic = |mask: &[bool]| -> f64 {
        let (mut s1, mut c1, mut s2, mut c2) = (0.0, 0usize, 0.0, 0usize);
        for (&x, &in_first) in scalars.iter().zip(mask) {
            if in_first {
                s1 += x;
                c1 += 1;
            } else {
                s2 += x;
                c2 += 1;
            }
        }
        (s1 / c1 as f64 - s2 / c2 as f64).abs()
    };
    let (observed, p_value, used, relabelings) =
        permutation_p_value(n, m1, Direction::Larger, permutations, seed, statistic)?;
    Ok(TestReport {
        method: TestMethod::LandscapePermutation,
        p_value,
        observed_statistic: observed,
        permutations_used: used,
        relabelings,
        seed,
        homology_dimension: None,
        group_sizes: [m1, n - m1],
        tests_run: 1,
    })
}
