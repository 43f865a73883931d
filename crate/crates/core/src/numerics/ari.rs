use std::collections::HashMap;

use crate::error::{Error, Result};

fn pairs(n: u64) -> f64 {
    (n * n.saturating_sub(1) / 2) as f64
}

/// Adjusted Rand Index between two labelings of the same items.
///
/// Returns 1 when the index is undefined because both partitions are the
/// same trivial partition (all in one cluster, or all singletons).
pub fn ari(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Input(format!(
            "label vectors differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    let mut cells: HashMap<(usize, usize), u64> = HashMap::new();
    let mut rows: HashMap<usize, u64> = HashMap::new();
    let mut cols: HashMap<usize, u64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *cells.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let index: f64 = cells.values().map(|&c| pairs(c)).sum();
    let sum_a: f64 = rows.values().map(|&c| pairs(c)).sum();
    let sum_b: f64 = cols.values().map(|&c| pairs(c)).sum();
    let total = pairs(a.len() as u64);
    if total == 0.0 {
        return Ok(1.0);
    }
    let expected = sum_a * sum_b / total;
    let max_index = 0.5 * (sum_a + sum_b);
    if max_index == expected {
        return Ok(1.0);
    }
    Ok((index - expected) / (max_index - expected))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// ARI from explicit pair enumeration.
    fn ari_by_pairs(a: &[usize], b: &[usize]) -> f64 {
        let m = a.len();
        let (mut both, mut only_a, mut only_b, mut total) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..m {
            for j in i + 1..m {
                let sa = a[i] == a[j];
                let sb = b[i] == b[j];
                total += 1.0;
                if sa && sb {
                    both += 1.0;
                }
                if sa {
                    only_a += 1.0;
                }
                if sb {
                    only_b += 1.0;
                }
            }
        }
        let expected = only_a * only_b / total;
        (both - expected) / (0.5 * (only_a + only_b) - expected)
    }

    #[test]
    fn identical_partitions() {
        assert_eq!(ari(&[0, 0, 1, 2, 2], &[3, 3, 0, 1, 1]).unwrap(), 1.0);
        assert_eq!(ari(&[0, 0, 0], &[1, 1, 1]).unwrap(), 1.0);
    }

    #[test]
    fn crossed_partitions_match_pair_enumeration() {
        let (a, b) = ([0, 0, 1, 1], [0, 1, 0, 1]);
        let v = ari(&a, &b).unwrap();
        assert_abs_diff_eq!(v, ari_by_pairs(&a, &b), epsilon = 1e-15);
        assert_abs_diff_eq!(v, -0.5, epsilon = 1e-15);
    }

    #[test]
    fn singletons_versus_one_cluster() {
        assert_eq!(ari(&[0, 1, 2, 3], &[0, 0, 0, 0]).unwrap(), 0.0);
    }

    #[test]
    fn symmetric() {
        let a = [0, 0, 1, 1, 2, 2, 2];
        let b = [1, 0, 1, 1, 2, 0, 2];
        assert_abs_diff_eq!(ari(&a, &b).unwrap(), ari(&b, &a).unwrap(), epsilon = 1e-15);
        assert_abs_diff_eq!(ari(&a, &b).unwrap(), ari_by_pairs(&a, &b), epsilon = 1e-12);
    }

    #[test]
    fn length_mismatch() {
        assert!(ari(&[0], &[0, 1]).is_err());
    }
}
