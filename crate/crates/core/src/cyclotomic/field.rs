//! Cached integer data for each conductor: the cyclotomic polynomial and the
//! reduced power table `x^j mod Phi_n` for `0 <= j < n`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

#[derive(Debug)]
pub(crate) struct Field {
    pub n: u32,
    pub phi: usize,
    /// `powers[j]` holds the coordinates of `x^j mod Phi_n` in the power basis.
    pub powers: Vec<Vec<i64>>,
}

static FIELDS: OnceLock<RwLock<HashMap<u32, Arc<Field>>>> = OnceLock::new();
static POLYS: OnceLock<RwLock<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();

pub(crate) fn field(n: u32) -> Arc<Field> {
    assert!(n >= 1, "conductor must be positive");
    let map = FIELDS.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(f) = map.read().unwrap().get(&n) {
        return f.clone();
    }
    let built = Arc::new(build(n));
    map.write().unwrap().entry(n).or_insert(built).clone()
}

fn build(n: u32) -> Field {
    let poly = cyclotomic_poly(n);
    let phi = poly.len() - 1;
    let mut powers = Vec::with_capacity(n as usize);
    let mut cur = vec![0i64; phi];
    if phi > 0 {
        cur[0] = 1;
    }
    for _ in 0..n {
        powers.push(cur.clone());
        // multiply by x, then fold the overflow coefficient back with the monic relation
        let top = cur[phi - 1];
        for j in (1..phi).rev() {
            cur[j] = cur[j - 1];
        }
        cur[0] = 0;
        if top != 0 {
            for j in 0..phi {
                cur[j] -= top * poly[j];
            }
        }
    }
    Field { n, phi, powers }
}

/// Phi_n with integer coefficients, lowest degree first.
pub(crate) fn cyclotomic_poly(n: u32) -> Arc<Vec<i64>> {
    let map = POLYS.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(p) = map.read().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by every Phi_d with d a proper divisor of n
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            num = div_monic(&num, &cyclotomic_poly(d));
        }
    }
    let p = Arc::new(num);
    map.write().unwrap().entry(n).or_insert(p).clone()
}

fn div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut q = vec![0i64; qlen];
    for k in (0..qlen).rev() {
        let c = rem[k + dn];
        q[k] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[k + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0), "inexact cyclotomic division");
    q
}

/// Euler's totient.
pub fn euler_phi(n: u32) -> usize {
    let mut m = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result as usize
}
