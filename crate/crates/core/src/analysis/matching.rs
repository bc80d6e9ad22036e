//! Bottleneck assignment: minimise the largest cost over perfect matchings.
//!
//! Binary search over the sorted distinct costs; each probe asks whether the
//! bipartite graph of edges with cost ≤ threshold has a perfect matching
//! (Kuhn's augmenting paths). Sizes here are eigenvalue counts, so the
//! O(n^3 log n) bound is irrelevant.

/// Returns the optimal bottleneck value and the assignment `row -> column`.
///
/// `cost` must be square; an empty matrix yields `(0.0, [])`.
pub fn bottleneck_assignment(cost: &[Vec<f64>]) -> (f64, Vec<usize>) {
    let n = cost.len();
    if n == 0 {
        return (0.0, Vec::new());
    }
    let mut values: Vec<f64> = cost.iter().flatten().copied().collect();
    values.sort_by(f64::total_cmp);
    values.dedup();

    let (mut lo, mut hi) = (0usize, values.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching(cost, values[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let assignment =
        perfect_matching(cost, values[lo]).expect("largest threshold admits every edge");
    (values[lo], assignment)
}

fn perfect_matching(cost: &[Vec<f64>], threshold: f64) -> Option<Vec<usize>> {
    let n = cost.len();
    let mut col_owner: Vec<Option<usize>> = vec![None; n];
    for row in 0..n {
        let mut seen = vec![false; n];
        if !augment(row, cost, threshold, &mut seen, &mut col_owner) {
            return None;
        }
    }
    let mut assignment = vec![0; n];
    for (col, owner) in col_owner.iter().enumerate() {
        assignment[owner.expect("perfect matching")] = col;
    }
    Some(assignment)
}

fn augment(
    row: usize,
    cost: &[Vec<f64>],
    threshold: f64,
    seen: &mut [bool],
    col_owner: &mut [Option<usize>],
) -> bool {
    for col in 0..cost.len() {
        if cost[row][col] <= threshold && !seen[col] {
            seen[col] = true;
            let free = match col_owner[col] {
                None => true,
                Some(other) => augment(other, cost, threshold, seen, col_owner),
            };
            if free {
                col_owner[col] = Some(row);
                return true;
            }
        }
    }
    false
}
