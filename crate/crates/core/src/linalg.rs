//! Small dense matrices: exact over a [`Field`], plus a few high-precision
//! complex helpers (determinant and numerical rank).

use crate::field::Field;
use crate::hp;
use crate::poly::Poly;

#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<F: Field> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![F::zero_f(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, F::one_f());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: F) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> Vec<F> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, o: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, o.rows);
        let mut m = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero_f() {
                    continue;
                }
                for j in 0..o.cols {
                    let v = m.get(i, j).add_f(&a.mul_f(o.get(k, j)));
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    pub fn pow(&self, mut e: usize) -> Matrix<F> {
        assert_eq!(self.rows, self.cols);
        let mut acc = Self::identity(self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Row echelon form by Gaussian elimination; returns the reduced matrix,
    /// the rank and the sign of the row permutation.
    fn echelon(&self) -> (Matrix<F>, usize, bool) {
        let mut m = self.clone();
        let mut rank = 0;
        let mut flipped = false;
        for col in 0..m.cols {
            let Some(p) = (rank..m.rows).find(|&r| !m.get(r, col).is_zero_f()) else {
                continue;
            };
            if p != rank {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, rank * m.cols + j);
                }
                flipped = !flipped;
            }
            let pivot = m.get(rank, col).clone();
            for r in rank + 1..m.rows {
                let f = m.get(r, col).div_f(&pivot);
                if f.is_zero_f() {
                    continue;
                }
                for j in col..m.cols {
                    let v = m.get(r, j).sub_f(&f.mul_f(m.get(rank, j)));
                    m.set(r, j, v);
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        (m, rank, flipped)
    }

    pub fn rank(&self) -> usize {
        self.echelon().1
    }

    pub fn det(&self) -> F {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let (m, rank, flipped) = self.echelon();
        if rank < self.rows {
            return F::zero_f();
        }
        let d = (0..self.rows).fold(F::one_f(), |acc, i| acc.mul_f(m.get(i, i)));
        if flipped {
            d.neg_f()
        } else {
            d
        }
    }

    /// Solves `self · x = b` for square nonsingular `self`.
    pub fn solve(&self, b: &[F]) -> Option<Vec<F>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Self::zeros(n, n + 1);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n, b[i].clone());
        }
        let (m, rank, _) = aug.echelon();
        if rank < n || (0..n).any(|i| m.get(i, i).is_zero_f()) {
            return None;
        }
        let mut x = vec![F::zero_f(); n];
        for i in (0..n).rev() {
            let mut acc = m.get(i, n).clone();
            for j in i + 1..n {
                acc = acc.sub_f(&m.get(i, j).mul_f(&x[j]));
            }
            x[i] = acc.div_f(m.get(i, i));
        }
        Some(x)
    }

    /// Characteristic polynomial `det(x·I - self)` via reduction to upper
    /// Hessenberg form followed by the standard recurrence.
    pub fn charpoly(&self) -> Poly<F> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut h = self.clone();
        for k in 1..n.saturating_sub(1) {
            let Some(p) = (k..n).find(|&r| !h.get(r, k - 1).is_zero_f()) else {
                continue;
            };
            if p != k {
                for j in 0..n {
                    h.data.swap(p * n + j, k * n + j);
                }
                for i in 0..n {
                    h.data.swap(i * n + p, i * n + k);
                }
            }
            let pivot = h.get(k, k - 1).clone();
            for r in k + 1..n {
                let f = h.get(r, k - 1).div_f(&pivot);
                if f.is_zero_f() {
                    continue;
                }
                for j in 0..n {
                    let v = h.get(r, j).sub_f(&f.mul_f(h.get(k, j)));
                    h.set(r, j, v);
                }
                for i in 0..n {
                    let v = h.get(i, k).add_f(&f.mul_f(h.get(i, r)));
                    h.set(i, k, v);
                }
            }
        }
        // p_m(x) = (x - h_mm) p_{m-1} - Σ_{i<m} h_im (Π_{j=i+1..m} h_{j,j-1}) p_{i-1}
        let x = Poly::monomial(1, F::one_f());
        let mut ps: Vec<Poly<F>> = vec![Poly::one()];
        for m in 0..n {
            let mut next = &(&x - &Poly::constant(h.get(m, m).clone())) * &ps[m];
            let mut prod = F::one_f();
            for i in (0..m).rev() {
                prod = prod.mul_f(h.get(i + 1, i));
                let term = ps[i].scale(&h.get(i, m).mul_f(&prod));
                next = &next - &term;
            }
            ps.push(next);
        }
        ps.pop().unwrap()
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

/// Determinant of a square high-precision complex matrix (partial pivoting).
pub fn det_complex(m: &[Vec<hp::Complex>]) -> hp::Complex {
    let n = m.len();
    let prec = m.first().and_then(|r| r.first()).map_or(hp::DEFAULT_PRECISION, |z| z.prec());
    let mut a: Vec<Vec<hp::Complex>> = m.to_vec();
    let mut det = hp::Complex::one(prec);
    for col in 0..n {
        let p = (col..n).max_by(|&x, &y| a[x][col].log2_abs().partial_cmp(&a[y][col].log2_abs()).unwrap()).unwrap();
        if a[p][col].is_zero() {
            return hp::Complex::zero(prec);
        }
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det = &det * &a[col][col];
        for r in col + 1..n {
            let f = &a[r][col] / &a[col][col];
            for j in col..n {
                let v = &a[r][j] - &(&f * &a[col][j]);
                a[r][j] = v;
            }
        }
    }
    det
}

/// Numerical rank with complete pivoting: a pivot counts when its magnitude
/// exceeds `2^rel_log2` times the largest entry of the input.
pub fn rank_complex(m: &[Vec<hp::Complex>], rel_log2: f64) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut a: Vec<Vec<hp::Complex>> = m.to_vec();
    let scale = a.iter().flatten().map(|z| z.log2_abs()).fold(f64::NEG_INFINITY, f64::max);
    if scale == f64::NEG_INFINITY {
        return 0;
    }
    let mut rank = 0;
    let mut used_cols = vec![false; cols];
    for _ in 0..rows.min(cols) {
        let mut best: Option<(usize, usize, f64)> = None;
        for (r, row) in a.iter().enumerate().skip(rank) {
            for (c, z) in row.iter().enumerate() {
                if used_cols[c] {
                    continue;
                }
                let l = z.log2_abs();
                if best.is_none_or(|b| l > b.2) {
                    best = Some((r, c, l));
                }
            }
        }
        let Some((pr, pc, l)) = best else { break };
        if l < scale + rel_log2 {
            break;
        }
        a.swap(pr, rank);
        used_cols[pc] = true;
        for r in rank + 1..rows {
            let f = &a[r][pc] / &a[rank][pc];
            for c in 0..cols {
                let v = &a[r][c] - &(&f * &a[rank][c]);
                a[r][c] = v;
            }
        }
        rank += 1;
    }
    rank
}
