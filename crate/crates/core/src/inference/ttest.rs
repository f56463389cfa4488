use statrs::distribution::{ContinuousCDF, StudentsT};

use super::{PermutationsUsed, TestMethod, TestReport};
use crate::error::{Result, TdaError};

fn mean_and_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, ss / (n - 1.0))
}

/// Welch's two-sided t-test with Welch–Satterthwaite degrees of freedom.
///
/// When both samples have zero variance the test degenerates: equal means
/// give `p = 1`, unequal means give `p = f64::MIN_POSITIVE` and an infinite
/// statistic.
pub fn two_sample_t_test(scalars1: &[f64], scalars2: &[f64]) -> Result<TestReport> {
    if scalars1.len() < 2 || scalars2.len() < 2 {
        return Err(TdaError::invalid("each group needs at least two values"));
    }
    if scalars1.iter().chain(scalars2).any(|x| !x.is_finite()) {
        return Err(TdaError::invalid("t-test values must be finite"));
    }
    let (n1, n2) = (scalars1.len() as f64, scalars2.len() as f64);
    let (m1, v1) = mean_and_variance(scalars1);
    let (m2, v2) = mean_and_variance(scalars2);
    let (a, b) = (v1 / n1, v2 / n2);
    let se2 = a + b;

    let (t, p) = if se2 == 0.0 {
        if m1 == m2 {
            (0.0, 1.0)
        } else {
            ((m1 - m2).signum() * f64::INFINITY, f64::MIN_POSITIVE)
        }
    } else {
        let t = (m1 - m2) / se2.sqrt();
        let df = se2 * se2 / (a * a / (n1 - 1.0) + b * b / (n2 - 1.0));
        let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| TdaError::invalid(e.to_string()))?;
        let p = (2.0 * dist.sf(t.abs())).clamp(f64::MIN_POSITIVE, 1.0);
        (t, p)
    };
    Ok(TestReport {
        method: TestMethod::TwoSampleT,
        p_value: p,
        observed_statistic: t,
        permutations_used: PermutationsUsed::None,
        relabelings: 0,
        seed: 0,
        homology_dimension: None,
        group_sizes: [scalars1.len(), scalars2.len()],
        tests_run: 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_groups() {
        let r = two_sample_t_test(&[1.0, 2.0, 4.0], &[1.0, 2.0, 4.0]).unwrap();
        assert_eq!(r.observed_statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn degenerate_unequal_means() {
        let r = two_sample_t_test(&[0.0; 4], &[1.0; 4]).unwrap();
        assert_eq!(r.p_value, f64::MIN_POSITIVE);
        assert_eq!(r.observed_statistic, f64::NEG_INFINITY);
        let json = r.to_json();
        assert!(json.contains("\"-inf\""));
        assert_eq!(TestReport::from_json(&json).unwrap(), r);
    }

    #[test]
    fn degenerate_equal_means() {
        let r = two_sample_t_test(&[3.0; 3], &[3.0; 5]).unwrap();
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn known_value() {
        // Reference values from scipy.stats.ttest_ind(equal_var=False).
        let r = two_sample_t_test(&[1.0, 2.0, 3.0], &[3.0, 4.0, 5.0]).unwrap();
        assert!((r.observed_statistic + 2.449489742783178).abs() < 1e-12);
        assert!((r.p_value - 0.07048399691021993).abs() < 1e-9);
    }

    #[test]
    fn too_small() {
        assert!(two_sample_t_test(&[1.0], &[1.0, 2.0]).is_err());
    }
}
