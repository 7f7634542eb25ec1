//! Scalar back ends for the brute-force evaluators.
//!
//! Enumeration loops are written against [`Ring`]. [`IntRing`] works in
//! Z[ζ_n] with checked `i128` coordinates and reports overflow by returning
//! `false`; callers then rerun the loop over [`CycRing`], which never fails.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::{field, CycNum, Field};

pub(crate) trait Ring: Sync {
    type Elem: Clone + Send + Sync;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// `acc += a`; false on overflow.
    fn add_to(&self, acc: &mut Self::Elem, a: &Self::Elem) -> bool;
    /// `out = a * b`; false on overflow.
    fn mul_to(&self, a: &Self::Elem, b: &Self::Elem, out: &mut Self::Elem) -> bool;
    /// `acc += a * b`; false on overflow.
    fn mul_add(&self, acc: &mut Self::Elem, a: &Self::Elem, b: &Self::Elem) -> bool;
}

pub(crate) struct CycRing {
    pub order: u32,
}

impl Ring for CycRing {
    type Elem = CycNum;
    fn zero(&self) -> CycNum {
        CycNum::zero(self.order)
    }
    fn one(&self) -> CycNum {
        CycNum::one(self.order)
    }
    fn is_zero(&self, a: &CycNum) -> bool {
        a.is_zero()
    }
    fn add_to(&self, acc: &mut CycNum, a: &CycNum) -> bool {
        *acc += a;
        true
    }
    fn mul_to(&self, a: &CycNum, b: &CycNum, out: &mut CycNum) -> bool {
        *out = a * b;
        true
    }
    fn mul_add(&self, acc: &mut CycNum, a: &CycNum, b: &CycNum) -> bool {
        if !a.is_zero() && !b.is_zero() {
            *acc += &(a * b);
        }
        true
    }
}

/// Largest φ(n) handled by the integer back end (products use a stack buffer).
const MAX_PHI: usize = 32;

pub(crate) struct IntRing {
    f: Arc<Field>,
}

impl IntRing {
    pub fn new(order: u32) -> Option<Self> {
        let f = field(order);
        (f.phi <= MAX_PHI).then_some(IntRing { f })
    }

    /// Scales a table of values to integer coordinates by a common denominator.
    /// Returns the scaled table and the denominator.
    pub fn lift(&self, values: &[CycNum]) -> Option<(Vec<Vec<i128>>, BigInt)> {
        let mut den = BigInt::one();
        for v in values {
            if v.order() != self.f.n {
                return None;
            }
            for c in v.coeffs() {
                den = den.lcm(c.denom());
            }
        }
        let mut out = Vec::with_capacity(values.len());
        for v in values {
            let mut row = Vec::with_capacity(self.f.phi);
            for c in v.coeffs() {
                let scaled = c.numer() * (&den / c.denom());
                // keep headroom: single table entries stay within i64
                row.push(scaled.to_i64()? as i128);
            }
            out.push(row);
        }
        Some((out, den))
    }

    pub fn to_cyc(&self, a: &[i128], den: &BigInt) -> CycNum {
        let coeffs = a
            .iter()
            .map(|&c| BigRational::new(BigInt::from(c), den.clone()))
            .collect();
        CycNum::from_coeffs(self.f.n, coeffs).expect("length matches the field")
    }

    fn product(&self, a: &[i128], b: &[i128], buf: &mut [i128; 2 * MAX_PHI]) -> bool {
        let phi = self.f.phi;
        buf[..2 * phi].iter_mut().for_each(|x| *x = 0);
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if y == 0 {
                    continue;
                }
                match x.checked_mul(y).and_then(|p| buf[i + j].checked_add(p)) {
                    Some(v) => buf[i + j] = v,
                    None => return false,
                }
            }
        }
        let n = self.f.n as usize;
        for k in (phi..2 * phi - 1).rev() {
            let c = buf[k];
            if c == 0 {
                continue;
            }
            buf[k] = 0;
            let row = &self.f.powers[k % n];
            for (j, &p) in row.iter().enumerate() {
                if p == 0 {
                    continue;
                }
                match c.checked_mul(p as i128).and_then(|t| buf[j].checked_add(t)) {
                    Some(v) => buf[j] = v,
                    None => return false,
                }
            }
        }
        true
    }
}

impl Ring for IntRing {
    type Elem = Vec<i128>;
    fn zero(&self) -> Vec<i128> {
        vec![0; self.f.phi]
    }
    fn one(&self) -> Vec<i128> {
        let mut v = vec![0; self.f.phi];
        v[0] = 1;
        v
    }
    fn is_zero(&self, a: &Vec<i128>) -> bool {
        a.iter().all(|&x| x == 0)
    }
    fn add_to(&self, acc: &mut Vec<i128>, a: &Vec<i128>) -> bool {
        for (x, &y) in acc.iter_mut().zip(a) {
            match x.checked_add(y) {
                Some(v) => *x = v,
                None => return false,
            }
        }
        true
    }
    fn mul_to(&self, a: &Vec<i128>, b: &Vec<i128>, out: &mut Vec<i128>) -> bool {
        let mut buf = [0i128; 2 * MAX_PHI];
        if !self.product(a, b, &mut buf) {
            return false;
        }
        out.copy_from_slice(&buf[..self.f.phi]);
        true
    }
    fn mul_add(&self, acc: &mut Vec<i128>, a: &Vec<i128>, b: &Vec<i128>) -> bool {
        let mut buf = [0i128; 2 * MAX_PHI];
        if !self.product(a, b, &mut buf) {
            return false;
        }
        for (x, &y) in acc.iter_mut().zip(&buf[..self.f.phi]) {
            match x.checked_add(y) {
                Some(v) => *x = v,
                None => return false,
            }
        }
        true
    }
}

/// Exact power of a big integer as a rational denominator.
pub(crate) fn den_pow(den: &BigInt, e: usize) -> BigInt {
    num_traits::pow(den.clone(), e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_ring_matches_rational_ring() {
        let n = 12;
        let ring = IntRing::new(n).unwrap();
        let vals: Vec<CycNum> = (0..6)
            .map(|k| {
                let half = BigRational::new(1.into(), 2.into());
                (&CycNum::root(n, k) + &CycNum::root(n, 3 * k + 1)).scale(&half)
            })
            .collect();
        let (table, den) = ring.lift(&vals).unwrap();
        assert_eq!(den, BigInt::from(2));
        for i in 0..6 {
            for j in 0..6 {
                let mut out = ring.zero();
                assert!(ring.mul_to(&table[i], &table[j], &mut out));
                assert_eq!(ring.to_cyc(&out, &den_pow(&den, 2)), &vals[i] * &vals[j]);
            }
        }
    }

    #[test]
    fn overflow_is_reported() {
        let ring = IntRing::new(4).unwrap();
        let big = vec![i128::MAX / 2, 0];
        let mut out = ring.zero();
        assert!(!ring.mul_to(&big, &big, &mut out));
        let mut acc = big.clone();
        assert!(!ring.add_to(&mut acc, &vec![i128::MAX, 0]));
    }
}
