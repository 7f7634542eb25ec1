//! Smith normal form over Z with transformation matrices and their inverses.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;

/// `u · m · v = d` with `u`, `v` unimodular and `d` diagonal, each diagonal
/// entry dividing the next; zeros come last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Smith {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
}

impl Smith {
    /// Diagonal entries d₁ | d₂ | … (length min(rows, cols)).
    pub fn diagonal(&self) -> Vec<BigInt> {
        let k = self.d.len().min(self.d.first().map_or(0, |r| r.len()));
        (0..k).map(|i| self.d[i][i].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

pub fn to_big(m: &[Vec<i64>]) -> IntMatrix {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            debug_assert_eq!(row.len(), inner);
            (0..cols)
                .map(|j| {
                    let mut s = BigInt::zero();
                    for (k, x) in row.iter().enumerate() {
                        if !x.is_zero() && !b[k][j].is_zero() {
                            s += x * &b[k][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(m: &IntMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

struct State {
    a: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl State {
    /// row_i += k · row_j
    fn add_row(&mut self, i: usize, j: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for rows in [&mut self.a, &mut self.u] {
            let src = rows[j].clone();
            for (x, y) in rows[i].iter_mut().zip(&src) {
                *x += k * y;
            }
        }
        for row in &mut self.u_inv {
            let t = k * &row[i];
            row[j] -= t;
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        self.u.swap(i, j);
        for row in &mut self.u_inv {
            row.swap(i, j);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut().chain(self.u[i].iter_mut()) {
            *x = -&*x;
        }
        for row in &mut self.u_inv {
            row[i] = -&row[i];
        }
    }

    /// col_i += k · col_j
    fn add_col(&mut self, i: usize, j: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for rows in [&mut self.a, &mut self.v] {
            for row in rows.iter_mut() {
                let t = k * &row[j];
                row[i] += t;
            }
        }
        let src = self.v_inv[i].clone();
        for (x, y) in self.v_inv[j].iter_mut().zip(&src) {
            *x -= k * y;
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for rows in [&mut self.a, &mut self.v] {
            for row in rows.iter_mut() {
                row.swap(i, j);
            }
        }
        self.v_inv.swap(i, j);
    }
}

/// Smith normal form of an integer matrix.
pub fn smith_normal_form(m: &IntMatrix) -> Smith {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut st = State {
        a: m.clone(),
        u: identity(rows),
        u_inv: identity(rows),
        v: identity(cols),
        v_inv: identity(cols),
    };
    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = &st.a[i][j];
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < st.a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break;
            };
            st.swap_rows(t, pi);
            st.swap_cols(t, pj);
            let mut clean = true;
            for i in t + 1..rows {
                if st.a[i][t].is_zero() {
                    continue;
                }
                let q = st.a[i][t].div_floor(&st.a[t][t]);
                st.add_row(i, t, &-q);
                clean &= st.a[i][t].is_zero();
            }
            for j in t + 1..cols {
                if st.a[t][j].is_zero() {
                    continue;
                }
                let q = st.a[t][j].div_floor(&st.a[t][t]);
                st.add_col(j, t, &-q);
                clean &= st.a[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            let pivot = st.a[t][t].clone();
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !st.a[i][j].is_multiple_of(&pivot)));
            match bad {
                Some(i) => st.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if st.a[t][t].is_negative() {
            st.negate_row(t);
        }
    }
    let smith = Smith {
        u: st.u,
        d: st.a,
        v: st.v,
        u_inv: st.u_inv,
        v_inv: st.v_inv,
    };
    if cfg!(debug_assertions) {
        assert_eq!(mat_mul(&mat_mul(&smith.u, m), &smith.v), smith.d, "Smith certificate");
        assert!(determinant(&smith.u).abs().is_one(), "U unimodular");
        assert!(determinant(&smith.v).abs().is_one(), "V unimodular");
        assert_eq!(mat_mul(&smith.u, &smith.u_inv), identity(rows));
        assert_eq!(mat_mul(&smith.v, &smith.v_inv), identity(cols));
    }
    smith
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(m: &[Vec<i64>]) -> Vec<i64> {
        smith_normal_form(&to_big(m))
            .diagonal()
            .iter()
            .map(|x| i64::try_from(x).unwrap())
            .collect()
    }

    #[test]
    fn small_examples() {
        assert_eq!(diag(&[vec![2, 4], vec![6, 8]]), vec![2, 4]);
        assert_eq!(diag(&[vec![1, 0], vec![0, 1]]), vec![1, 1]);
        assert_eq!(diag(&[vec![0, 1], vec![1, 0]]), vec![1, 1]);
        assert_eq!(diag(&[vec![2]]), vec![2]);
        assert_eq!(diag(&[vec![0]]), vec![0]);
        assert_eq!(diag(&[vec![4, 0], vec![0, 6]]), vec![2, 12]);
        assert_eq!(diag(&[vec![1, 1, 1]]), vec![1]);
        assert_eq!(diag(&[vec![0, 0], vec![0, 3], vec![0, 0]]), vec![3, 0]);
    }

    #[test]
    fn determinants() {
        assert_eq!(determinant(&to_big(&[vec![2, 4], vec![6, 8]])), BigInt::from(-8));
        assert_eq!(determinant(&to_big(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 5]])), BigInt::from(-5));
        assert_eq!(determinant(&vec![]), BigInt::one());
    }
}
