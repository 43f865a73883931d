//! Optimal label matching via the Hungarian method.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Minimum-cost perfect matching on a square cost matrix.
///
/// Returns `assignment[row] = column`. Shortest augmenting paths with
/// potentials, `O(n^3)`.
pub fn min_cost_assignment(cost: &Array2<f64>) -> Result<Vec<usize>> {
    let (rows, cols) = cost.dim();
    if rows != cols {
        return Err(Error::Input(format!(
            "assignment needs a square cost matrix, got {rows}x{cols}"
        )));
    }
    if cost.iter().any(|x| !x.is_finite()) {
        return Err(Error::Input("assignment costs must be finite".into()));
    }
    let n = rows;
    // 1-based bookkeeping; column 0 is the virtual root of each search tree
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        owner[0] = row;
        let mut col0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[col0] = true;
            let r0 = owner[col0];
            let mut delta = f64::INFINITY;
            let mut col1 = 0;
            for col in 1..=n {
                if !used[col] {
                    let reduced = cost[[r0 - 1, col - 1]] - u[r0] - v[col];
                    if reduced < minv[col] {
                        minv[col] = reduced;
                        way[col] = col0;
                    }
                    if minv[col] < delta {
                        delta = minv[col];
                        col1 = col;
                    }
                }
            }
            for col in 0..=n {
                if used[col] {
                    u[owner[col]] += delta;
                    v[col] -= delta;
                } else {
                    minv[col] -= delta;
                }
            }
            col0 = col1;
            if owner[col0] == 0 {
                break;
            }
        }
        loop {
            let col1 = way[col0];
            owner[col0] = owner[col1];
            col0 = col1;
            if col0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for col in 1..=n {
        if owner[col] > 0 {
            assignment[owner[col] - 1] = col - 1;
        }
    }
    Ok(assignment)
}

/// `confusion[t][p]` counts items with true label `t` and predicted label `p`.
pub fn confusion_matrix(true_labels: &[usize], pred_labels: &[usize]) -> Result<Array2<f64>> {
    if true_labels.len() != pred_labels.len() {
        return Err(Error::Input(format!(
            "label vectors differ in length ({} vs {})",
            true_labels.len(),
            pred_labels.len()
        )));
    }
    let k = true_labels
        .iter()
        .chain(pred_labels)
        .max()
        .map_or(0, |&m| m + 1);
    let mut c = Array2::zeros((k, k));
    for (&t, &p) in true_labels.iter().zip(pred_labels) {
        c[[t, p]] += 1.0;
    }
    Ok(c)
}

/// Fraction of misclustered items under the best matching of predicted to true labels.
pub fn hungarian_error(true_labels: &[usize], pred_labels: &[usize]) -> Result<f64> {
    let m = true_labels.len();
    if m == 0 {
        return Ok(0.0);
    }
    Ok(misclustered(true_labels, pred_labels)? as f64 / m as f64)
}

/// Number of items outside the best label matching.
pub fn misclustered(true_labels: &[usize], pred_labels: &[usize]) -> Result<usize> {
    let confusion = confusion_matrix(true_labels, pred_labels)?;
    if true_labels.is_empty() {
        return Ok(0);
    }
    let assignment = min_cost_assignment(&confusion.mapv(|x| -x))?;
    let agreed: f64 = assignment
        .iter()
        .enumerate()
        .map(|(t, &p)| confusion[[t, p]])
        .sum();
    Ok(true_labels.len() - agreed as usize)
}
