//! Quadratic exponential sums restricted to the kernel of a homomorphism
//! between products of cyclic groups.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::quadratic::{quadratic_sum, QuadExpWeight};
use super::snf::{smith_normal_form, IntMatrix};
use crate::cyclotomic::CycNum;
use crate::error::{Budget, Error, Result};

/// A homomorphism ⊕_c Z_{source[c]} → ⊕_r Z_{target[r]} given by an integer
/// matrix (rows index the target), entries reduced mod the target order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrixModOrders {
    matrix: Vec<Vec<i64>>,
    source: Vec<u64>,
    target: Vec<u64>,
}

impl IntMatrixModOrders {
    pub fn new(matrix: Vec<Vec<i64>>, source: Vec<u64>, target: Vec<u64>) -> Result<Self> {
        if matrix.len() != target.len() || matrix.iter().any(|r| r.len() != source.len()) {
            return Err(Error::Shape(format!(
                "matrix must be {}×{}",
                target.len(),
                source.len()
            )));
        }
        if source.iter().chain(&target).any(|&n| n == 0) {
            return Err(Error::InvalidData("cyclic orders must be positive".into()));
        }
        let mut reduced = matrix;
        for (r, row) in reduced.iter_mut().enumerate() {
            let b = target[r] as i64;
            for (c, x) in row.iter_mut().enumerate() {
                *x = x.rem_euclid(b);
                if (*x as i128 * source[c] as i128) % b as i128 != 0 {
                    return Err(Error::InvalidData(format!(
                        "entry ({r},{c}) does not define a map Z_{} → Z_{b}",
                        source[c]
                    )));
                }
            }
        }
        Ok(IntMatrixModOrders {
            matrix: reduced,
            source,
            target,
        })
    }

    /// Γⁿ → (Γ′)ᵐ with Γ = Z_a and Γ′ = Z_b.
    pub fn cyclic(matrix: Vec<Vec<i64>>, a: u64, b: u64) -> Result<Self> {
        let (m, n) = (matrix.len(), matrix.first().map_or(0, |r| r.len()));
        Self::new(matrix, vec![a; n], vec![b; m])
    }

    pub fn source(&self) -> &[u64] {
        &self.source
    }

    pub fn target(&self) -> &[u64] {
        &self.target
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        self.matrix
            .iter()
            .zip(&self.target)
            .map(|(row, &b)| {
                let s: i128 = row.iter().zip(x).map(|(&h, &v)| h as i128 * v as i128).sum();
                s.rem_euclid(b as i128) as i64
            })
            .collect()
    }
}

/// Generators of the kernel: x = C·y with y ranging over ⊕ Z_{orders[i]}
/// hits every kernel element exactly once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelParametrization {
    pub generators: Vec<Vec<i64>>,
    pub orders: Vec<u64>,
}

/// Parametrizes ker(H) through two Smith normal forms: one for the lattice
/// L = {x ∈ Zⁿ : Hx ≡ 0}, one for the quotient L / ⊕ source_c Z.
pub fn kernel_parametrization(h: &IntMatrixModOrders) -> KernelParametrization {
    let n = h.source.len();
    let m = h.target.len();
    let big = |x: i64| BigInt::from(x);
    // spanning set of L: x-parts of the integer kernel of [H | diag(target)]
    let spanning: IntMatrix = if m == 0 {
        (0..n).map(|i| (0..n).map(|j| big((i == j) as i64)).collect()).collect()
    } else {
        let a: IntMatrix = (0..m)
            .map(|r| {
                (0..n)
                    .map(|c| big(h.matrix[r][c]))
                    .chain((0..m).map(|s| if s == r { big(h.target[r] as i64) } else { BigInt::zero() }))
                    .collect()
            })
            .collect();
        let snf = smith_normal_form(&a);
        let rank = snf.rank();
        (0..n)
            .map(|i| (rank..n + m).map(|c| snf.v[i][c].clone()).collect())
            .collect()
    };
    // basis of L: P⁻¹·diag(δ) where P·W·Q = [diag δ | 0]
    let w = smith_normal_form(&spanning);
    let delta = w.diagonal();
    assert!(delta.len() == n && delta.iter().all(|d| !d.is_zero()), "kernel lattice has full rank");
    // R = diag(δ)⁻¹ · P · diag(source) expresses the sublattice in that basis
    let r: IntMatrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v = &w.u[i][j] * big(h.source[j] as i64);
                    let (q, rem) = v.div_rem(&delta[i]);
                    assert!(rem.is_zero(), "source relations lie in the kernel lattice");
                    q
                })
                .collect()
        })
        .collect();
    let x = smith_normal_form(&r);
    let orders: Vec<u64> = x.diagonal().iter().map(|d| d.to_u64().expect("finite kernel")).collect();
    // C = P⁻¹ · diag(δ) · X⁻¹, rows reduced mod the source orders
    let generators = (0..n)
        .map(|i| {
            (0..n)
                .map(|a| {
                    let mut s = BigInt::zero();
                    for j in 0..n {
                        s += &w.u_inv[i][j] * &delta[j] * &x.u_inv[j][a];
                    }
                    s.mod_floor(&big(h.source[i] as i64)).to_i64().unwrap()
                })
                .collect()
        })
        .collect();
    KernelParametrization { generators, orders }
}

fn check_shapes(h: &IntMatrixModOrders, q: &QuadExpWeight) -> Result<()> {
    if q.vars() != h.source.len() {
        return Err(Error::Shape(format!(
            "weight has {} variables, map has {} source coordinates",
            q.vars(),
            h.source.len()
        )));
    }
    q.check_orders(&h.source)
}

/// Σ_{x ∈ ker H} ζ_N^{Q(x)} through the kernel parametrization and the
/// decoupling engine.
pub fn kernel_quadratic_sum(h: &IntMatrixModOrders, q: &QuadExpWeight) -> Result<CycNum> {
    check_shapes(h, q)?;
    let k = kernel_parametrization(h);
    let c: Vec<Vec<i128>> = k
        .generators
        .iter()
        .map(|row| row.iter().map(|&v| v as i128).collect())
        .collect();
    let pulled = q.pull_back(&c, k.orders.len());
    quadratic_sum(&pulled, &k.orders)
}

/// The same sum by enumerating the whole source group.
pub fn kernel_quadratic_sum_brute(h: &IntMatrixModOrders, q: &QuadExpWeight, budget: Budget) -> Result<CycNum> {
    check_shapes(h, q)?;
    let size: u128 = h.source.iter().map(|&a| a as u128).product();
    budget.admit(usize::try_from(size).unwrap_or(usize::MAX), 1)?;
    let mut counts = vec![BigInt::zero(); q.modulus() as usize];
    let n = h.source.len();
    let mut x = vec![0i64; n];
    loop {
        if h.apply(&x).iter().all(|&v| v == 0) {
            counts[q.exponent(&x) as usize] += 1;
        }
        let mut t = n;
        loop {
            if t == 0 {
                return Ok(CycNum::from_exponent_counts(q.modulus() as u32, &counts));
            }
            t -= 1;
            x[t] += 1;
            if (x[t] as u64) < h.source[t] {
                break;
            }
            x[t] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_kernel() {
        let h = IntMatrixModOrders::cyclic(vec![vec![1, 1, 1]], 2, 2).unwrap();
        let k = kernel_parametrization(&h);
        assert_eq!(k.orders.iter().product::<u64>(), 4);
        let mut q = QuadExpWeight::zero(2, 3);
        q.add_quad(0, 1, 1);
        assert_eq!(kernel_quadratic_sum(&h, &q).unwrap(), CycNum::from_int(1, 2));
        assert_eq!(kernel_quadratic_sum_brute(&h, &q, Budget::default()).unwrap(), CycNum::from_int(1, 2));
    }

    #[test]
    fn identity_and_zero_maps() {
        let id = IntMatrixModOrders::cyclic(vec![vec![1]], 4, 4).unwrap();
        let mut q = QuadExpWeight::zero(8, 1);
        q.add_quad(0, 0, 1).add_constant(3);
        assert_eq!(kernel_quadratic_sum(&id, &q).unwrap(), CycNum::root(8, 3));
        let zero = IntMatrixModOrders::cyclic(vec![vec![0, 0, 0]], 3, 5).unwrap();
        let q = QuadExpWeight::zero(1, 3);
        assert_eq!(kernel_quadratic_sum(&zero, &q).unwrap(), CycNum::from_int(1, 27));
        let empty = IntMatrixModOrders::new(vec![], vec![2, 2], vec![]).unwrap();
        assert_eq!(kernel_quadratic_sum(&empty, &QuadExpWeight::zero(1, 2)).unwrap(), CycNum::from_int(1, 4));
    }

    #[test]
    fn rejects_ill_defined_maps() {
        assert!(IntMatrixModOrders::cyclic(vec![vec![1]], 2, 4).is_err());
        assert!(IntMatrixModOrders::cyclic(vec![vec![2]], 2, 4).is_ok());
        let h = IntMatrixModOrders::cyclic(vec![vec![1, 1]], 2, 2).unwrap();
        assert!(matches!(kernel_quadratic_sum(&h, &QuadExpWeight::zero(2, 3)), Err(Error::Shape(_))));
    }
}
