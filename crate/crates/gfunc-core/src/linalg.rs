//! Dense complex linear algebra for the small moment systems (at most a few
//! rows), via LU with partial pivoting.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

/// Row-major square complex matrix.
#[derive(Clone, Debug)]
pub struct CMatrix {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n = rows.len();
        let mut m = CMatrix::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n, "ragged matrix rows");
            m.data[i * n..(i + 1) * n].copy_from_slice(r);
        }
        m
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    fn lu(&self) -> (CMatrix, Vec<usize>, i32) {
        let n = self.n;
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1i32;
        for k in 0..n {
            let mut p = k;
            let mut best = a.at(k, k).norm_sqr();
            for i in k + 1..n {
                let v = a.at(i, k).norm_sqr();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if p != k {
                for j in 0..n {
                    let tmp = a.at(k, j);
                    a.set(k, j, a.at(p, j));
                    a.set(p, j, tmp);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let piv = a.at(k, k);
            if piv.norm_sqr() == 0.0 {
                continue; // singular; determinant will come out zero
            }
            for i in k + 1..n {
                let f = a.at(i, k) / piv;
                a.set(i, k, f);
                for j in k + 1..n {
                    let v = a.at(i, j) - f * a.at(k, j);
                    a.set(i, j, v);
                }
            }
        }
        (a, perm, sign)
    }

    /// Determinant. An empty matrix has determinant one.
    pub fn det(&self) -> Complex64 {
        if self.n == 0 {
            return Complex64::new(1.0, 0.0);
        }
        let (lu, _, sign) = self.lu();
        let mut d = Complex64::new(sign as f64, 0.0);
        for k in 0..self.n {
            d *= lu.at(k, k);
        }
        d
    }

    /// Solve `A x = b`. Returns `None` when a pivot vanishes exactly.
    pub fn solve(&self, b: &[Complex64]) -> Option<Vec<Complex64>> {
        let n = self.n;
        assert_eq!(b.len(), n);
        if n == 0 {
            return Some(Vec::new());
        }
        let (lu, perm, _) = self.lu();
        for k in 0..n {
            if lu.at(k, k).norm_sqr() == 0.0 {
                return None;
            }
        }
        let mut y: Vec<Complex64> = perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let yj = y[j];
                y[i] -= lu.at(i, j) * yj;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let yj = y[j];
                y[i] -= lu.at(i, j) * yj;
            }
            y[i] /= lu.at(i, i);
        }
        Some(y)
    }

    /// 1-norm condition number estimate via the explicit inverse; the
    /// matrices here are tiny so this is cheap and dependable.
    pub fn cond_1(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 1.0;
        }
        let mut inv_cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[j] = Complex64::new(1.0, 0.0);
            match self.solve(&e) {
                Some(col) => inv_cols.push(col),
                None => return f64::INFINITY,
            }
        }
        let norm_a = (0..n)
            .map(|j| (0..n).map(|i| self.at(i, j).norm()).sum::<f64>())
            .fold(0.0f64, f64::max);
        let norm_inv = (0..n)
            .map(|j| inv_cols[j].iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0f64, f64::max);
        norm_a * norm_inv
    }
}
