//! Run-level quality metrics.

use crate::error::{param_error, Result};
use crate::objective::SoftAssignment;

/// Soft values strictly above this magnitude count as binarized.
pub const BINARIZATION_THRESHOLD: f64 = 0.9;

/// Fraction of soft values with `|v| > 0.9`; zero for an empty assignment.
pub fn binarization(soft: &SoftAssignment) -> f64 {
    if soft.is_empty() {
        return 0.0;
    }
    let hits = soft
        .values()
        .iter()
        .filter(|v| v.abs() > BINARIZATION_THRESHOLD)
        .count();
    hits as f64 / soft.len() as f64
}

/// Constraint success ratio `N_c / N` over a set of feasibility flags.
pub fn epsilon_c<I: IntoIterator<Item = bool>>(feasible: I) -> Result<f64> {
    let (mut hits, mut total) = (0usize, 0usize);
    for f in feasible {
        total += 1;
        hits += usize::from(f);
    }
    if total == 0 {
        return Err(param_error("constraint success ratio of an empty run set"));
    }
    Ok(hits as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn binarization_examples() {
        let s = SoftAssignment::new(vec![0.95, -0.99, 0.5, -0.91]);
        assert_eq!(binarization(&s), 0.75);
        assert_eq!(
            binarization(&SoftAssignment::new(vec![0.9, -0.9, 0.0])),
            0.0
        );
        assert_eq!(binarization(&SoftAssignment::new(vec![1.0, -0.999])), 1.0);
    }

    #[test]
    fn epsilon_examples() {
        let seven = (0..10).map(|i| i < 7);
        assert_eq!(epsilon_c(seven).unwrap(), 0.7);
        assert_eq!(epsilon_c([true; 4]).unwrap(), 1.0);
        assert_eq!(epsilon_c([false; 3]).unwrap(), 0.0);
        assert!(epsilon_c(core::iter::empty()).is_err());
    }
}
