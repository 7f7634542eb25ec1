//! Exponential sums Σ_x ζ_N^{P(x)} of integer polynomials of degree ≤ 2 over
//! products of cyclic groups.
//!
//! The sum is split prime by prime (CRT idempotents), each prime part is
//! rescaled to a p-power root of unity, and a unimodular change of variables
//! decouples the form into blocks of one or two variables, which are summed
//! directly.

use num_bigint::BigInt;
use num_rational::BigRational;
use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};

/// Weight x ↦ ζ_N^{P(x)} with P an integer polynomial of degree ≤ 2 whose
/// coefficients are taken mod N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadExpWeight {
    modulus: u64,
    /// Symmetric storage: `quad[i][j] == quad[j][i]` is the coefficient of
    /// x_i x_j (i < j) or x_i² (i == j).
    quad: Vec<Vec<i128>>,
    linear: Vec<i128>,
    constant: i128,
}

impl QuadExpWeight {
    pub fn zero(modulus: u64, vars: usize) -> Self {
        assert!(modulus >= 1, "modulus must be positive");
        QuadExpWeight {
            modulus,
            quad: vec![vec![0; vars]; vars],
            linear: vec![0; vars],
            constant: 0,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn vars(&self) -> usize {
        self.linear.len()
    }

    fn reduce(&self, x: i128) -> i128 {
        x.rem_euclid(self.modulus as i128)
    }

    /// Adds `c` to the coefficient of x_i x_j (of x_i² when i == j).
    pub fn add_quad(&mut self, i: usize, j: usize, c: i64) -> &mut Self {
        self.add_quad_wide(i, j, c as i128);
        self
    }

    fn add_quad_wide(&mut self, i: usize, j: usize, c: i128) {
        let v = self.reduce(self.quad[i][j] + self.reduce(c));
        self.quad[i][j] = v;
        self.quad[j][i] = v;
    }

    pub fn add_linear(&mut self, i: usize, c: i64) -> &mut Self {
        self.linear[i] = self.reduce(self.linear[i] + self.reduce(c as i128));
        self
    }

    pub fn add_constant(&mut self, c: i64) -> &mut Self {
        self.constant = self.reduce(self.constant + self.reduce(c as i128));
        self
    }

    pub fn quad_coeff(&self, i: usize, j: usize) -> u64 {
        self.quad[i][j] as u64
    }

    pub fn linear_coeff(&self, i: usize) -> u64 {
        self.linear[i] as u64
    }

    pub fn constant(&self) -> u64 {
        self.constant as u64
    }

    /// P(x) mod N.
    pub fn exponent(&self, x: &[i64]) -> u64 {
        let n = self.vars();
        let mut e = self.constant;
        for i in 0..n {
            let xi = x[i] as i128;
            if xi == 0 {
                continue;
            }
            e += self.linear[i] * xi;
            e += self.quad[i][i] * self.reduce(xi * xi);
            for j in i + 1..n {
                e += self.reduce(self.quad[i][j] * xi) * x[j] as i128;
            }
            e = self.reduce(e);
        }
        self.reduce(e) as u64
    }

    /// Checks that P mod N depends only on x_i mod orders[i].
    pub fn check_orders(&self, orders: &[u64]) -> Result<()> {
        if orders.len() != self.vars() {
            return Err(Error::Shape(format!(
                "weight has {} variables, group has {} coordinates",
                self.vars(),
                orders.len()
            )));
        }
        for (i, &a) in orders.iter().enumerate() {
            let a = a as i128;
            let fail = |what: &str| {
                Err(Error::InvalidData(format!(
                    "weight is not well defined modulo {a} in variable {i}: {what}"
                )))
            };
            if self.reduce(2 * self.quad[i][i] * a) != 0 {
                return fail("2·c_ii·n_i ≢ 0");
            }
            if let Some(j) = (0..self.vars()).find(|&j| j != i && self.reduce(self.quad[i][j] * a) != 0) {
                return fail(&format!("c_{i}{j}·n_i ≢ 0"));
            }
            if self.reduce(self.reduce(self.quad[i][i] * a) * a + self.linear[i] * a) != 0 {
                return fail("c_ii·n_i² + l_i·n_i ≢ 0");
            }
        }
        Ok(())
    }

    /// Substitutes x_i := x_i + t·x_j (i ≠ j).
    fn substitute(&mut self, i: usize, j: usize, t: i128) {
        let t = self.reduce(t);
        if t == 0 {
            return;
        }
        let (cii, cij) = (self.quad[i][i], self.quad[i][j]);
        for k in 0..self.vars() {
            if k != i && k != j && self.quad[i][k] != 0 {
                let add = self.reduce(t * self.quad[i][k]);
                self.add_quad_wide(j, k, add);
            }
        }
        let tt = self.reduce(t * t);
        let jj = self.reduce(tt * cii) + self.reduce(t * cij);
        self.add_quad_wide(j, j, jj);
        self.add_quad_wide(i, j, self.reduce(2 * t * cii));
        self.linear[j] = self.reduce(self.linear[j] + t * self.linear[i]);
    }

    /// Pulls the weight back along x = C·y, where C is vars × new_vars.
    pub(crate) fn pull_back(&self, c: &[Vec<i128>], new_vars: usize) -> QuadExpWeight {
        let mut out = QuadExpWeight::zero(self.modulus, new_vars);
        out.constant = self.constant;
        let n = self.vars();
        for i in 0..n {
            for a in 0..new_vars {
                if c[i][a] != 0 && self.linear[i] != 0 {
                    out.linear[a] = out.reduce(out.linear[a] + self.linear[i] * out.reduce(c[i][a]));
                }
            }
            for j in i..n {
                let coef = self.quad[i][j];
                if coef == 0 {
                    continue;
                }
                for a in 0..new_vars {
                    let ca = out.reduce(coef * c[i][a]);
                    if ca == 0 {
                        continue;
                    }
                    for b in 0..new_vars {
                        let v = out.reduce(ca * out.reduce(c[j][b]));
                        if v != 0 {
                            // x_i x_j contributes C_ia C_jb y_a y_b; y_a y_b is stored once
                            out.add_quad_wide(a.min(b), a.max(b), v);
                        }
                    }
                }
            }
        }
        out
    }
}

fn inv_mod(a: i128, m: i128) -> i128 {
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    assert_eq!(r0, 1, "{a} is not invertible modulo {m}");
    s0.rem_euclid(m)
}

fn prime_factors(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn valuation(x: i128, p: i128, cap: u32) -> u32 {
    if x == 0 {
        return cap;
    }
    let (mut x, mut v) = (x, 0);
    while x % p == 0 && v < cap {
        x /= p;
        v += 1;
    }
    v
}

/// Σ_{x ∈ ⊕ Z_{orders[i]}} ζ_N^{P(x)}.
///
/// The weight must be well defined on the group (see `check_orders`).
pub fn quadratic_sum(weight: &QuadExpWeight, orders: &[u64]) -> Result<CycNum> {
    weight.check_orders(orders)?;
    let n = weight.modulus;
    // coordinates of order 1 are identically zero
    let keep: Vec<usize> = (0..orders.len()).filter(|&i| orders[i] > 1).collect();
    let sub = restrict(weight, &keep);
    let orders: Vec<u64> = keep.iter().map(|&i| orders[i]).collect();
    let k = orders.len();

    let mut result = CycNum::root(n as u32, sub.constant as i64);
    if k == 0 {
        return Ok(result);
    }
    // lift every coordinate to Z_R with R = lcm of the orders; the sum over
    // Z_R^k counts each group element Π R/d_i times
    let r = orders.iter().fold(1u64, |acc, &d| num_integer::lcm(acc, d));
    let group: BigInt = orders.iter().map(|&d| BigInt::from(d)).product();
    let lifted = num_traits::pow(BigInt::from(r), k);
    let correction = BigRational::new(group, lifted);

    for (p, a) in prime_factors(r) {
        let pa = p.pow(a);
        let rest = r / pa;
        // idempotent of the p-part of Z_R
        let eps = (rest as i128) * inv_mod(rest as i128, pa as i128) % r as i128;
        let local = prime_part(&sub, eps, p, pa);
        result = &result.embed(lcm32(result.order(), local.order()))? * &local.embed(lcm32(result.order(), local.order()))?;
    }
    Ok(result.scale(&correction))
}

fn lcm32(a: u32, b: u32) -> u32 {
    num_integer::lcm(a, b)
}

fn restrict(w: &QuadExpWeight, keep: &[usize]) -> QuadExpWeight {
    let mut out = QuadExpWeight::zero(w.modulus, keep.len());
    out.constant = w.constant;
    for (a, &i) in keep.iter().enumerate() {
        out.linear[a] = w.linear[i];
        for (b, &j) in keep.iter().enumerate() {
            out.quad[a][b] = w.quad[i][j];
        }
    }
    out
}

/// Σ_{y ∈ Z_{p^a}^k} ζ_N^{P(ε·y) − P(0)}, as an element of Q(ζ_{p^K}) where
/// p^K is the p-part of N.
fn prime_part(w: &QuadExpWeight, eps: i128, p: u64, pa: u64) -> CycNum {
    let n = w.modulus;
    let k = w.vars();
    let mut np = 1u64;
    while n.is_multiple_of(np * p) {
        np *= p;
    }
    let other = n / np;
    if np == 1 {
        // values are p-power roots of unity inside μ_N, hence trivial
        return CycNum::from_bigint(1, num_traits::pow(BigInt::from(pa), k));
    }
    // w_crt ≡ 1 mod p^K, ≡ 0 mod the rest
    let w_crt = (other as i128) * inv_mod(other as i128, np as i128) % n as i128;
    let ni = n as i128;
    let scale = |c: i128| -> i128 {
        let v = (w_crt * c).rem_euclid(ni);
        debug_assert_eq!(v % other as i128, 0);
        v / other as i128
    };
    let e2 = (eps * eps).rem_euclid(ni);
    let mut local = QuadExpWeight::zero(np, k);
    for i in 0..k {
        local.linear[i] = scale((w.linear[i] * eps).rem_euclid(ni));
        for j in i..k {
            let v = scale((w.quad[i][j] * e2).rem_euclid(ni));
            local.quad[i][j] = v;
            local.quad[j][i] = v;
        }
    }
    if cfg!(debug_assertions) {
        // the p-part only takes p-power root-of-unity values
        let mut plain = QuadExpWeight::zero(n, k);
        for i in 0..k {
            plain.linear[i] = (w.linear[i] * eps).rem_euclid(ni);
            for j in 0..k {
                plain.quad[i][j] = (w.quad[i][j] * e2).rem_euclid(ni);
            }
        }
        for i in 0..k {
            for j in i..k {
                let mut x = vec![0i64; k];
                x[i] += 1;
                x[j] += 1;
                assert_eq!(plain.exponent(&x) % other, 0);
            }
        }
    }
    decoupled_sum(local, p, pa)
}

/// Decouples a form over Z_{p^a}^k with coefficients mod p^K into blocks of
/// at most two variables and multiplies the block sums.
fn decoupled_sum(mut w: QuadExpWeight, p: u64, pa: u64) -> CycNum {
    let pk = w.modulus as i128;
    let big_k = valuation(pk, p as i128, u32::MAX);
    let pi = p as i128;
    let mut active: Vec<usize> = (0..w.vars()).collect();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    // bilinear matrix entry: 2c_ii on the diagonal, c_ij off it
    let entry = |w: &QuadExpWeight, i: usize, j: usize| -> i128 {
        if i == j {
            (2 * w.quad[i][i]).rem_euclid(pk)
        } else {
            w.quad[i][j]
        }
    };
    while !active.is_empty() {
        let mut best: Option<(u32, usize, usize)> = None;
        for (ai, &i) in active.iter().enumerate() {
            for &j in &active[ai..] {
                let v = valuation(entry(&w, i, j), pi, big_k);
                // prefer diagonal pivots at equal valuation
                let better = match best {
                    None => true,
                    Some((bv, bi, bj)) => v < bv || (v == bv && i == j && bi != bj),
                };
                if better {
                    best = Some((v, i, j));
                }
            }
        }
        let (v, i, j) = best.expect("active set is nonempty");
        if v >= big_k {
            blocks.extend(active.drain(..).map(|i| vec![i]));
            break;
        }
        let pv = pi.pow(v);
        if i == j {
            let unit_inv = inv_mod(entry(&w, i, i) / pv, pk);
            for &l in &active {
                if l != i && w.quad[i][l] != 0 {
                    let t = -(w.quad[i][l] / pv) * unit_inv;
                    w.substitute(i, l, t);
                    debug_assert_eq!(w.quad[i][l], 0);
                }
            }
            active.retain(|&x| x != i);
            blocks.push(vec![i]);
        } else if p != 2 {
            // x_i := x_i + x_j moves the small valuation onto the diagonal
            w.substitute(i, j, 1);
            debug_assert_eq!(valuation(entry(&w, j, j), pi, big_k), v);
        } else {
            let (mii, mjj, mij) = (entry(&w, i, i), entry(&w, j, j), w.quad[i][j]);
            let det = mii * mjj - mij * mij;
            let p2v = pv * pv;
            debug_assert_eq!(valuation(det, 2, u32::MAX), 2 * v);
            let det_inv = inv_mod((det / p2v).rem_euclid(pk), pk);
            for &l in &active {
                if l == i || l == j {
                    continue;
                }
                let (r1, r2) = ((-w.quad[i][l]).rem_euclid(pk), (-w.quad[j][l]).rem_euclid(pk));
                if r1 == 0 && r2 == 0 {
                    continue;
                }
                let s_num = mjj * r1 - mij * r2;
                let u_num = mii * r2 - mij * r1;
                debug_assert!(s_num % p2v == 0 && u_num % p2v == 0);
                let s = (s_num / p2v).rem_euclid(pk) * det_inv;
                let u = (u_num / p2v).rem_euclid(pk) * det_inv;
                w.substitute(i, l, s);
                w.substitute(j, l, u);
                debug_assert!(w.quad[i][l] == 0 && w.quad[j][l] == 0);
            }
            active.retain(|&x| x != i && x != j);
            blocks.push(vec![i.min(j), i.max(j)]);
        }
    }
    let mut total = CycNum::one(pk as u32);
    for b in blocks {
        total = &total * &block_sum(&w, &b, pa);
        if total.is_zero() {
            break;
        }
    }
    total
}

fn block_sum(w: &QuadExpWeight, block: &[usize], pa: u64) -> CycNum {
    let m = w.modulus as usize;
    let mut counts = vec![BigInt::from(0); m];
    let pa = pa as i128;
    let md = w.modulus as i128;
    match *block {
        [i] => {
            for x in 0..pa {
                let e = (w.quad[i][i] * (x * x % md) + w.linear[i] * x).rem_euclid(md);
                counts[e as usize] += 1;
            }
        }
        [i, j] => {
            for x in 0..pa {
                let ex = (w.quad[i][i] * (x * x % md) + w.linear[i] * x).rem_euclid(md);
                for y in 0..pa {
                    let e = ex + w.quad[j][j] * (y * y % md) + w.linear[j] * y + w.quad[i][j] * (x * y % md);
                    counts[e.rem_euclid(md) as usize] += 1;
                }
            }
        }
        _ => unreachable!("blocks have one or two variables"),
    }
    if counts.iter().skip(1).all(|c| *c == BigInt::from(0)) {
        return CycNum::from_bigint(m as u32, counts[0].clone());
    }
    CycNum::from_exponent_counts(m as u32, &counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct enumeration over the group.
    fn brute(w: &QuadExpWeight, orders: &[u64]) -> CycNum {
        let mut counts = vec![BigInt::from(0); w.modulus() as usize];
        let mut x = vec![0i64; orders.len()];
        loop {
            counts[w.exponent(&x) as usize] += 1;
            let mut t = x.len();
            loop {
                if t == 0 {
                    return CycNum::from_exponent_counts(w.modulus() as u32, &counts);
                }
                t -= 1;
                x[t] += 1;
                if (x[t] as u64) < orders[t] {
                    break;
                }
                x[t] = 0;
            }
        }
    }

    #[test]
    fn one_variable_gauss_sums() {
        // Σ_{x mod 2} i^{x²} = 1 + i
        let mut w = QuadExpWeight::zero(4, 1);
        w.add_quad(0, 0, 1);
        assert_eq!(quadratic_sum(&w, &[2]).unwrap(), &CycNum::one(4) + &CycNum::root(4, 1));
        // Σ_{x mod 3} ζ₃^{x²} = i√3
        let mut w = QuadExpWeight::zero(3, 1);
        w.add_quad(0, 0, 1);
        assert_eq!(quadratic_sum(&w, &[3]).unwrap(), brute(&w, &[3]));
    }

    #[test]
    fn mixed_orders_and_extra_primes() {
        let mut w = QuadExpWeight::zero(36, 3);
        w.add_quad(0, 1, 6).add_quad(1, 1, 9).add_quad(2, 2, 2).add_linear(2, 4).add_constant(5);
        let orders = [6, 12, 18];
        w.check_orders(&orders).unwrap();
        assert_eq!(quadratic_sum(&w, &orders).unwrap(), brute(&w, &orders));
        let mut w = QuadExpWeight::zero(24, 3);
        w.add_quad(0, 0, 3).add_quad(0, 1, 6).add_quad(1, 2, 12).add_quad(2, 2, 6).add_linear(0, 3);
        let orders = [8, 4, 6];
        w.check_orders(&orders).unwrap();
        assert_eq!(quadratic_sum(&w, &orders).unwrap(), brute(&w, &orders));
    }

    #[test]
    fn two_adic_block_pivot() {
        // x y over Z_4 with ζ_4: the hyperbolic plane
        let mut w = QuadExpWeight::zero(4, 3);
        w.add_quad(0, 1, 1).add_quad(1, 2, 2).add_quad(0, 2, 3).add_quad(2, 2, 2);
        let orders = [4, 4, 4];
        w.check_orders(&orders).unwrap();
        assert_eq!(quadratic_sum(&w, &orders).unwrap(), brute(&w, &orders));
    }

    #[test]
    fn rejects_ill_defined_weights() {
        let mut w = QuadExpWeight::zero(4, 1);
        w.add_linear(0, 1);
        assert!(w.check_orders(&[2]).is_err());
        assert!(w.check_orders(&[4]).is_ok());
    }

    #[test]
    fn substitution_preserves_values() {
        let mut w = QuadExpWeight::zero(12, 3);
        w.add_quad(0, 0, 5).add_quad(0, 1, 7).add_quad(1, 2, 3).add_linear(0, 2).add_linear(2, 9);
        let mut s = w.clone();
        s.substitute(0, 2, 4);
        for x in -3i64..4 {
            for y in -3i64..4 {
                for z in -3i64..4 {
                    assert_eq!(s.exponent(&[x, y, z]), w.exponent(&[x + 4 * z, y, z]));
                }
            }
        }
    }
}
