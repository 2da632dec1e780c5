//! Dense integer matrices, Smith normal form, Bareiss determinant.

use std::fmt;
use std::ops::{Index, IndexMut};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    /// Build from row vectors; `cols` is needed when there are no rows.
    pub fn from_rows(rows: &[Vec<i64>], cols: usize) -> Self {
        let mut m = Matrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            for (j, &v) in r.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    /// Sum of absolute values of all entries.
    pub fn weight(&self) -> i64 {
        self.data.iter().map(|v| v.abs()).sum()
    }

    /// Block sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &Matrix) -> Matrix {
        let mut m = Matrix::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)];
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                m[(self.rows + i, self.cols + j)] = other[(i, j)];
            }
        }
        m
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_rows())
    }
}

/// Nonzero invariant factors `d1 | d2 | ...` (all positive).
pub fn invariant_factors(m: &Matrix) -> Vec<i128> {
    let (r, c) = (m.rows, m.cols);
    let mut a: Vec<Vec<i128>> = (0..r).map(|i| (0..c).map(|j| m[(i, j)] as i128).collect()).collect();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < r && t < c {
        // pivot: smallest nonzero |entry| in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..r {
            for j in t..c {
                if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let p = a[t][t];
            let mut clean = true;
            for i in t + 1..r {
                let q = a[i][t] / p;
                if q != 0 {
                    for j in t..c {
                        a[i][j] -= q * a[t][j];
                    }
                }
                if a[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..c {
                let q = a[t][j] / p;
                if q != 0 {
                    for row in a.iter_mut().skip(t) {
                        row[j] -= q * row[t];
                    }
                }
                if a[t][j] != 0 {
                    clean = false;
                }
            }
            if clean {
                // divisibility of the trailing block
                let bad = (t + 1..r).flat_map(|i| (t + 1..c).map(move |j| (i, j))).find(|&(i, j)| a[i][j] % p != 0);
                match bad {
                    None => break,
                    Some((i, _)) => {
                        for j in t..c {
                            a[t][j] += a[i][j];
                        }
                        continue;
                    }
                }
            }
            // move the new smallest remainder to the pivot
            let mut best = (t, t);
            for i in t..r {
                if a[i][t] != 0 && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..c {
                if a[t][j] != 0 && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            a.swap(t, best.0);
            for row in a.iter_mut() {
                row.swap(t, best.1);
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

pub fn rank(m: &Matrix) -> usize {
    invariant_factors(m).len()
}

/// Exact determinant by fraction-free elimination.
pub fn determinant(m: &Matrix) -> i128 {
    assert_eq!(m.rows, m.cols, "determinant of a non-square matrix");
    let n = m.rows;
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| m[(i, j)] as i128).collect()).collect();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(s) = (k + 1..n).find(|&i| a[i][k] != 0) else { return 0 };
            a.swap(k, s);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Signature of a symmetric integer matrix (positive minus negative eigenvalues).
pub fn signature(m: &Matrix) -> i64 {
    let n = m.rows;
    if n == 0 {
        return 0;
    }
    let r = rank(m);
    let dm = nalgebra::DMatrix::from_fn(n, n, |i, j| m[(i, j)] as f64);
    let mut ev: Vec<f64> = nalgebra::SymmetricEigen::new(dm).eigenvalues.iter().copied().collect();
    // the n - r eigenvalues closest to zero are exactly zero
    ev.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    ev[n - r..].iter().map(|&x| if x > 0.0 { 1 } else { -1 }).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        let c = rows.first().map_or(0, |r| r.len());
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), c)
    }

    #[test]
    fn factors() {
        assert_eq!(invariant_factors(&m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]])), vec![2, 6, 12]);
        assert_eq!(invariant_factors(&m(&[&[0]])), Vec::<i128>::new());
        assert_eq!(invariant_factors(&m(&[&[1]])), vec![1]);
        assert_eq!(invariant_factors(&m(&[&[2, 0], &[0, 3]])), vec![1, 6]);
        assert_eq!(invariant_factors(&Matrix::zeros(0, 3)), Vec::<i128>::new());
    }

    #[test]
    fn dets() {
        assert_eq!(determinant(&m(&[&[0, 1], &[1, 0]])), -1);
        assert_eq!(determinant(&m(&[&[2, 1, 0], &[1, 2, 1], &[0, 1, 2]])), 4);
        assert_eq!(determinant(&Matrix::zeros(0, 0)), 1);
        assert_eq!(determinant(&m(&[&[0, 0], &[0, 5]])), 0);
    }

    #[test]
    fn signatures() {
        assert_eq!(signature(&m(&[&[0, 1], &[1, 0]])), 0);
        assert_eq!(signature(&m(&[&[1]])), 1);
        assert_eq!(signature(&m(&[&[-1, 0], &[0, -2]])), -2);
        assert_eq!(signature(&m(&[&[0]])), 0);
    }

    // brute-force determinant by permutation expansion
    fn det_oracle(a: &Matrix) -> i128 {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for k in 0..n {
                    let mut q = p.clone();
                    q.insert(k, n - 1);
                    out.push(q);
                }
            }
            out
        }
        let n = a.rows();
        perms(n)
            .into_iter()
            .map(|p| {
                let inv = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
                let s: i128 = if inv % 2 == 0 { 1 } else { -1 };
                s * (0..n).map(|i| a[(i, p[i])] as i128).product::<i128>()
            })
            .sum()
    }

    proptest::proptest! {
        #[test]
        fn bareiss_matches_expansion(v in proptest::collection::vec(-4i64..5, 16)) {
            let a = Matrix::from_rows(&v.chunks(4).map(|c| c.to_vec()).collect::<Vec<_>>(), 4);
            proptest::prop_assert_eq!(determinant(&a), det_oracle(&a));
            let f = invariant_factors(&a);
            let prod: i128 = f.iter().product();
            if f.len() == 4 {
                proptest::prop_assert_eq!(prod, det_oracle(&a).abs());
            } else {
                proptest::prop_assert_eq!(det_oracle(&a), 0);
            }
        }
    }
}
