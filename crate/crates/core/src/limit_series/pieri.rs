//! Products of special Schubert classes by Pieri's rule.
//!
//! Partitions live in a box with `rows` rows and `cols` columns and are
//! stored as non-increasing row lengths padded to `rows` entries.
//! Multiplying by the special class `σ_k` adds a horizontal strip of `k`
//! boxes: `λ'_1 ≥ λ_1 ≥ λ'_2 ≥ λ_2 ≥ …` with `|λ'| = |λ| + k`.

use std::collections::BTreeMap;

pub type Partition = Vec<usize>;

/// Linear combination of Schubert classes with non-negative coefficients.
pub type SchubertSum = BTreeMap<Partition, u128>;

/// Every way to add a horizontal `k`-strip to `lambda` inside the box.
pub fn horizontal_strips(lambda: &[usize], k: usize, cols: usize) -> Vec<Partition> {
    fn go(lambda: &[usize], row: usize, left: usize, cols: usize, cur: &mut Partition, out: &mut Vec<Partition>) {
        if row == lambda.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let cap = if row == 0 { cols } else { lambda[row - 1] };
        let max_add = (cap - lambda[row]).min(left);
        for add in 0..=max_add {
            cur.push(lambda[row] + add);
            go(lambda, row + 1, left - add, cols, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(lambda, 0, k, cols, &mut Vec::with_capacity(lambda.len()), &mut out);
    out
}

/// `σ_{factors[0]} · σ_{factors[1]} · …` in the cohomology of the
/// Grassmannian whose Schubert classes fit in a `rows × cols` box.
pub fn pieri_multiply(rows: usize, cols: usize, factors: &[usize]) -> SchubertSum {
    let mut acc: SchubertSum = BTreeMap::from([(vec![0; rows], 1)]);
    for &k in factors {
        let mut next = SchubertSum::new();
        for (lambda, &c) in &acc {
            for mu in horizontal_strips(lambda, k, cols) {
                *next.entry(mu).or_default() += c;
            }
        }
        acc = next;
    }
    acc
}

/// Coefficient of the full box (the point class) in the product.
pub fn top_coefficient(rows: usize, cols: usize, factors: &[usize]) -> u128 {
    pieri_multiply(rows, cols, factors)
        .get(&vec![cols; rows])
        .copied()
        .unwrap_or(0)
}

/// Every partition in the product has size `Σ factors` and fits the box.
pub fn degrees_conserved(rows: usize, cols: usize, factors: &[usize], sum: &SchubertSum) -> bool {
    let total: usize = factors.iter().sum();
    sum.keys().all(|l| {
        l.len() == rows
            && l.iter().sum::<usize>() == total
            && l.windows(2).all(|w| w[0] >= w[1])
            && l.first().is_none_or(|&x| x <= cols)
    })
}

/// Number of semistandard fillings of the `rows × cols` rectangle with
/// content `content` (value `v` used `content[v]` times), by direct
/// backtracking over cells. Equals the top coefficient of the Pieri
/// product, computed without reference to strips.
pub fn count_rectangular_tableaux(rows: usize, cols: usize, content: &[usize]) -> u128 {
    if content.iter().sum::<usize>() != rows * cols {
        return 0;
    }
    fn go(cell: usize, rows: usize, cols: usize, grid: &mut [usize], left: &mut [usize]) -> u128 {
        if cell == rows * cols {
            return 1;
        }
        let (r, c) = (cell / cols, cell % cols);
        let min_row = if c > 0 { grid[cell - 1] } else { 0 };
        let min_col = if r > 0 { grid[cell - cols] + 1 } else { 0 };
        let lo = min_row.max(min_col);
        let mut total = 0;
        for v in lo..left.len() {
            if left[v] == 0 {
                continue;
            }
            left[v] -= 1;
            grid[cell] = v;
            total += go(cell + 1, rows, cols, grid, left);
            left[v] += 1;
        }
        total
    }
    let mut grid = vec![0; rows * cols];
    let mut left = content.to_vec();
    go(0, rows, cols, &mut grid, &mut left)
}

pub fn catalan(m: u64) -> u128 {
    // C_m = binom(2m, m) / (m + 1), built up multiplicatively.
    let mut c: u128 = 1;
    for k in 0..m as u128 {
        c = c * 2 * (2 * k + 1) / (k + 2);
    }
    c
}
