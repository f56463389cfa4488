//! Fréchet mean and variance of a sample of diagrams under squared `W_2`.
//!
//! The candidate mean is refined by alternating optimal matchings to every
//! sample diagram with a per-point averaging step. Only a local minimiser
//! is found; the search starts from the sample diagram with the smallest
//! functional value, so the result is never worse than any input.

use rayon::prelude::*;

use crate::distance::{diagonal_projection, paired_points, wasserstein_points, Slot};
use crate::error::{Result, TdaError};
use crate::persistence::{PersistenceDiagram, PersistencePair};

#[derive(Debug, Clone, Copy)]
pub struct FrechetOptions {
    pub max_iterations: usize,
}

impl Default for FrechetOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FrechetResult {
    pub mean: PersistenceDiagram,
    /// Functional value `(1/N) sum W_2(mean, d_i)^2` at `mean`.
    pub variance: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Functional value at the start of each iteration, then the final one.
    pub history: Vec<f64>,
}

/// `(1/N) sum_i W_2(candidate, sample_i)^2` for point lists.
pub fn frechet_functional(candidate: &[(f64, f64)], sample: &[Vec<(f64, f64)>]) -> f64 {
    let total: f64 = sample
        .par_iter()
        .map(|target| wasserstein_points(candidate, target, 2.0).cost)
        .collect::<Vec<_>>()
        .iter()
        .sum();
    total / sample.len() as f64
}

pub fn frechet_mean(sample: &[PersistenceDiagram], h: usize) -> Result<FrechetResult> {
    frechet_mean_with(sample, h, FrechetOptions::default())
}

pub fn frechet_mean_with(
    sample: &[PersistenceDiagram],
    h: usize,
    options: FrechetOptions,
) -> Result<FrechetResult> {
    let first = sample
        .first()
        .ok_or_else(|| TdaError::Empty("Fréchet mean of an empty sample".into()))?;
    let mut points = Vec::with_capacity(sample.len());
    for d in sample {
        let (_, b) = paired_points(first, d, h)?;
        points.push(b);
    }
    let cap = first.max_scale();

    let mut candidate = points
        .iter()
        .map(|c| (frechet_functional(c, &points), c))
        .fold(
            None::<(f64, &Vec<(f64, f64)>)>,
            |best, (value, c)| match best {
                Some((bv, _)) if bv <= value => best,
                _ => Some((value, c)),
            },
        )
        .map(|(_, c)| c.clone())
        .expect("non-empty sample");

    let mut history = Vec::new();
    let mut previous: Option<Vec<Vec<(Slot, Slot)>>> = None;
    let mut converged = false;
    let mut iterations = 0;
    let mut value;

    loop {
        if iterations == options.max_iterations {
            value = frechet_functional(&candidate, &points);
            break;
        }
        iterations += 1;
        let matchings: Vec<_> = points
            .par_iter()
            .map(|target| wasserstein_points(&candidate, target, 2.0))
            .collect();
        value = matchings.iter().map(|m| m.cost).sum::<f64>() / points.len() as f64;
        history.push(value);

        let structure: Vec<Vec<(Slot, Slot)>> = matchings
            .iter()
            .map(|m| m.assignments.iter().map(|a| (a.left, a.right)).collect())
            .collect();
        if value == 0.0 || previous.as_ref() == Some(&structure) {
            converged = true;
            break;
        }

        let mut sums = vec![(0.0, 0.0, 0usize); candidate.len()];
        for (m, target) in matchings.iter().zip(&points) {
            for a in &m.assignments {
                if let Slot::Point(j) = a.left {
                    let t = match a.right {
                        Slot::Point(k) => {
                            sums[j].2 += 1;
                            target[k]
                        }
                        Slot::Diagonal => diagonal_projection(candidate[j]),
                    };
                    sums[j].0 += t.0;
                    sums[j].1 += t.1;
                }
            }
        }
        let n = points.len() as f64;
        let updated: Vec<(f64, f64)> = sums
            .iter()
            .filter(|s| s.2 > 0)
            .map(|&(b, d, _)| (b / n, d / n))
            .filter(|(b, d)| d > b)
            .collect();

        let updated_value = frechet_functional(&updated, &points);
        if updated_value >= value {
            // The averaging step no longer improves the functional.
            converged = true;
            break;
        }
        candidate = updated;
        previous = Some(structure);
    }
    history.push(value);

    let mean = PersistenceDiagram::new(
        candidate
            .iter()
            .map(|&(b, d)| PersistencePair::new(h, b, d))
            .collect(),
        [h],
        cap,
    )?;
    Ok(FrechetResult {
        mean,
        variance: value,
        iterations,
        converged,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diagram(points: &[(f64, f64)]) -> PersistenceDiagram {
        PersistenceDiagram::new(
            points
                .iter()
                .map(|&(b, d)| PersistencePair::new(0, b, d))
                .collect(),
            [0],
            10.0,
        )
        .unwrap()
    }

    #[test]
    fn identical_copies() {
        let d = diagram(&[(0.0, 1.0 / 3.0), (0.1, 2.7), (0.2, 0.9)]);
        let result = frechet_mean(&vec![d.clone(); 5], 0).unwrap();
        assert_eq!(result.mean, d);
        assert_eq!(result.variance, 0.0);
        assert_eq!(result.iterations, 1);
        assert!(result.converged);
    }

    #[test]
    fn two_single_points() {
        let result = frechet_mean(&[diagram(&[(0.0, 2.0)]), diagram(&[(0.0, 4.0)])], 0).unwrap();
        assert_eq!(result.mean.finite_points(0).unwrap(), vec![(0.0, 3.0)]);
        assert_eq!(result.variance, 1.0);
        assert!(result.converged);
        assert!(result.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn empty_sample_is_an_error() {
        assert!(matches!(frechet_mean(&[], 0), Err(TdaError::Empty(_))));
    }

    #[test]
    fn iteration_cap_is_respected() {
        let sample = [diagram(&[(0.0, 2.0)]), diagram(&[(0.0, 4.0)])];
        let result = frechet_mean_with(&sample, 0, FrechetOptions { max_iterations: 1 }).unwrap();
        assert_eq!(result.iterations, 1);
        assert_eq!(result.variance, 1.0);
    }
}
