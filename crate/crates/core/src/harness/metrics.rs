//! Evaluation metrics and robust trend summaries.

use crate::error::{Result, SbmError};
use crate::netcore::{expected_profile_log_likelihood, profile_log_likelihood, ClassAssignment, Graph, ProbabilityMatrix};

/// Number of nodes whose true class is not a majority true class within
/// their estimated class. A tied majority counts every tied class as
/// correct.
pub fn misclassification_count(z_true: &ClassAssignment, z_est: &ClassAssignment) -> Result<usize> {
    if z_true.n_nodes() != z_est.n_nodes() {
        return Err(SbmError::DimensionMismatch(format!(
            "true assignment has {} nodes, estimate {}",
            z_true.n_nodes(),
            z_est.n_nodes()
        )));
    }
    let kt = z_true.k();
    let mut counts = vec![0usize; z_est.k() * kt];
    for (&t, &e) in z_true.labels().iter().zip(z_est.labels()) {
        counts[e * kt + t] += 1;
    }
    Ok(counts
        .chunks(kt)
        .map(|row| row.iter().sum::<usize>() - row.iter().copied().max().unwrap_or(0))
        .sum())
}

/// `|L(A; z) - Lbar_P(z)| / M` with `M = sum P_ij`.
pub fn likelihood_error_stat(g: &Graph, p: &ProbabilityMatrix, z: &ClassAssignment) -> Result<f64> {
    let m = p.expected_edges();
    if !(m > 0.0) {
        return Err(SbmError::Domain("expected edge count must be positive".into()));
    }
    Ok((profile_log_likelihood(g, z)? - expected_profile_log_likelihood(p, z)?).abs() / m)
}

/// Median of finite values; `None` when there are none.
pub fn median(values: &[f64]) -> Option<f64> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// Theil-Sen estimator: median of the slopes over all pairs of points with
/// distinct `x`.
pub fn theil_sen_slope(points: &[(f64, f64)]) -> Option<f64> {
    let mut slopes = Vec::new();
    for (i, &(x1, y1)) in points.iter().enumerate() {
        for &(x2, y2) in &points[i + 1..] {
            if x1 != x2 {
                slopes.push((y2 - y1) / (x2 - x1));
            }
        }
    }
    median(&slopes)
}

/// Groups `(x, y)` observations by `x` and returns `(x, median y)` sorted by `x`.
pub fn medians_by_x(obs: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut xs: Vec<f64> = obs.iter().map(|o| o.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs.into_iter()
        .filter_map(|x| {
            let ys: Vec<f64> = obs.iter().filter(|o| o.0 == x).map(|o| o.1).collect();
            median(&ys).map(|m| (x, m))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn za(labels: &[usize]) -> ClassAssignment {
        ClassAssignment::from_one_based(labels, *labels.iter().max().unwrap()).unwrap()
    }

    #[test]
    fn misclassification_examples() {
        assert_eq!(misclassification_count(&za(&[1, 1, 2, 2]), &za(&[1, 1, 2, 2])).unwrap(), 0);
        assert_eq!(misclassification_count(&za(&[1, 1, 2, 2]), &za(&[1, 1, 1, 2])).unwrap(), 1);
        assert_eq!(misclassification_count(&za(&[1, 1, 1, 2]), &za(&[1, 1, 1, 1])).unwrap(), 1);
        // Tie: both members count as majority.
        assert_eq!(misclassification_count(&za(&[1, 2]), &za(&[1, 1])).unwrap(), 1);
        assert!(misclassification_count(&za(&[1, 2]), &za(&[1])).is_err());
    }

    #[test]
    fn label_permutation_invariant() {
        let t = za(&[1, 1, 2, 2, 3, 3]);
        assert_eq!(misclassification_count(&t, &za(&[3, 3, 1, 1, 2, 2])).unwrap(), 0);
    }

    #[test]
    fn theil_sen_basics() {
        assert_relative_eq!(theil_sen_slope(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]).unwrap(), 2.0);
        // One outlier does not flip the sign.
        let s = theil_sen_slope(&[(0.0, 5.0), (1.0, 4.0), (2.0, 3.0), (3.0, 100.0), (4.0, 1.0)]).unwrap();
        assert!(s < 0.0);
        assert_eq!(theil_sen_slope(&[(1.0, 1.0)]), None);
    }

    #[test]
    fn medians_grouped() {
        let m = medians_by_x(&[(2.0, 1.0), (1.0, 5.0), (2.0, 3.0), (1.0, 1.0), (1.0, 2.0)]);
        assert_eq!(m, vec![(1.0, 2.0), (2.0, 2.0)]);
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn constant_p_single_class_direct() {
        let p = ProbabilityMatrix::constant(6, 0.3).unwrap();
        let g = Graph::from_edges(6, [(0, 1), (2, 3), (4, 5), (0, 5)]).unwrap();
        let z = ClassAssignment::single_class(6);
        let h = |t: f64| t * t.ln() + (1.0 - t) * (1.0 - t).ln();
        let expected = (15.0 * (h(4.0 / 15.0) - h(0.3))).abs() / 4.5;
        assert_relative_eq!(likelihood_error_stat(&g, &p, &z).unwrap(), expected, epsilon = 1e-12);
    }
}
