//! Brute-force reference implementations shared by the integration tests.
//! None of them call into the library's homology or matching code.

#![allow(dead_code)]

use tdakit::metric::DistanceMatrix;

/// Every vertex subset of size `1..=max_size` whose pairwise distances are
/// all `<= epsilon`, grouped by dimension.
pub fn rips_cliques(dm: &DistanceMatrix, epsilon: f64, max_size: usize) -> Vec<Vec<Vec<usize>>> {
    let n = dm.size();
    let mut by_dim: Vec<Vec<Vec<usize>>> = vec![Vec::new(); max_size];
    let mut stack: Vec<usize> = Vec::new();
    fn extend(
        dm: &DistanceMatrix,
        epsilon: f64,
        max_size: usize,
        start: usize,
        stack: &mut Vec<usize>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        for v in start..dm.size() {
            if stack.iter().all(|&u| dm.get(u, v) <= epsilon) {
                stack.push(v);
                out[stack.len() - 1].push(stack.clone());
                if stack.len() < max_size {
                    extend(dm, epsilon, max_size, v + 1, stack, out);
                }
                stack.pop();
            }
        }
    }
    if n > 0 && max_size > 0 {
        extend(dm, epsilon, max_size, 0, &mut stack, &mut by_dim);
    }
    by_dim
}

/// Rank over GF(2) of the boundary map from `upper` simplices to `lower`
/// simplices, by dense bitset elimination.
pub fn boundary_rank(lower: &[Vec<usize>], upper: &[Vec<usize>]) -> usize {
    if lower.is_empty() || upper.is_empty() {
        return 0;
    }
    let index: std::collections::HashMap<&[usize], usize> = lower
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_slice(), i))
        .collect();
    let words = lower.len().div_ceil(64);
    let mut pivots: Vec<Option<Vec<u64>>> = vec![None; lower.len()];
    let mut rank = 0;
    for s in upper {
        let mut row = vec![0u64; words];
        for skip in 0..s.len() {
            let face: Vec<usize> = s
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &v)| v)
                .collect();
            let i = index[face.as_slice()];
            row[i / 64] ^= 1 << (i % 64);
        }
        loop {
            let Some(lead) = highest_bit(&row) else { break };
            match &pivots[lead] {
                Some(p) => {
                    for (a, b) in row.iter_mut().zip(p) {
                        *a ^= b;
                    }
                }
                None => {
                    pivots[lead] = Some(row);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

fn highest_bit(row: &[u64]) -> Option<usize> {
    row.iter()
        .enumerate()
        .rev()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| i * 64 + 63 - w.leading_zeros() as usize)
}

/// Betti numbers `beta_0..=beta_top` of the Rips complex at `epsilon`.
pub fn betti_oracle(dm: &DistanceMatrix, epsilon: f64, top: usize) -> Vec<usize> {
    let cliques = rips_cliques(dm, epsilon, top + 2);
    let ranks: Vec<usize> = (0..=top + 1)
        .map(|k| {
            if k == 0 {
                0
            } else {
                boundary_rank(&cliques[k - 1], &cliques[k])
            }
        })
        .collect();
    (0..=top)
        .map(|h| cliques[h].len() - ranks[h] - ranks[h + 1])
        .collect()
}

fn sup(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

fn to_diagonal(a: (f64, f64)) -> f64 {
    (a.1 - a.0) / 2.0
}

/// Every partial injection from `left` into `right`; unmatched points on
/// either side go to the diagonal. Calls `visit` with the sup costs of
/// each matching.
fn for_each_matching(left: &[(f64, f64)], right: &[(f64, f64)], visit: &mut impl FnMut(&[f64])) {
    fn go(
        i: usize,
        left: &[(f64, f64)],
        right: &[(f64, f64)],
        used: &mut Vec<bool>,
        costs: &mut Vec<f64>,
        visit: &mut impl FnMut(&[f64]),
    ) {
        if i == left.len() {
            let before = costs.len();
            for (j, &r) in right.iter().enumerate() {
                if !used[j] {
                    costs.push(to_diagonal(r));
                }
            }
            visit(costs);
            costs.truncate(before);
            return;
        }
        costs.push(to_diagonal(left[i]));
        go(i + 1, left, right, used, costs, visit);
        costs.pop();
        for j in 0..right.len() {
            if !used[j] {
                used[j] = true;
                costs.push(sup(left[i], right[j]));
                go(i + 1, left, right, used, costs, visit);
                costs.pop();
                used[j] = false;
            }
        }
    }
    go(
        0,
        left,
        right,
        &mut vec![false; right.len()],
        &mut Vec::new(),
        visit,
    );
}

/// `W_p` by exhaustive enumeration of matchings.
pub fn wasserstein_oracle(left: &[(f64, f64)], right: &[(f64, f64)], p: f64) -> f64 {
    let mut best = f64::INFINITY;
    for_each_matching(left, right, &mut |costs| {
        best = best.min(costs.iter().map(|c| c.powf(p)).sum());
    });
    best.powf(1.0 / p)
}

/// Bottleneck distance by exhaustive enumeration of matchings.
pub fn bottleneck_oracle(left: &[(f64, f64)], right: &[(f64, f64)]) -> f64 {
    let mut best = f64::INFINITY;
    for_each_matching(left, right, &mut |costs| {
        best = best.min(costs.iter().copied().fold(0.0, f64::max));
    });
    best
}

/// A diagram point list with births in `[0, 1)` and lifespans in `[0, 1)`.
pub fn random_points<R: rand::Rng>(rng: &mut R, max_len: usize) -> Vec<(f64, f64)> {
    let n = rng.random_range(0..=max_len);
    (0..n)
        .map(|_| {
            let b: f64 = rng.random_range(0.0..1.0);
            (b, b + rng.random_range(0.0..1.0))
        })
        .collect()
}
