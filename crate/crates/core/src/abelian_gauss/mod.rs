//! Finite abelian groups, metric groups (Λ, q), Gauss sums of linking
//! matrices, and the pointed surgery evaluator.
//!
//! A metric group stores q as a full exponent table: q(x) = ζ_N^{qexp[x]}.
//! Two Gauss-sum routes are provided. [`gauss_sum_bracket`] enumerates Λᵐ;
//! [`gauss_sum_fast`] rewrites the summand as ζ_N to an integral quadratic
//! polynomial in the cyclic coordinates and hands it to the decoupling
//! engine in [`quadratic`].

mod kernel;
mod quadratic;
mod snf;

use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;

use crate::cyclotomic::{lcm_order, CycNum};
use crate::error::{Budget, Error, Result};
use crate::graph_manifolds::{plumbing_presentation, rt_graph_manifold, signature_data, SurgeryPresentation};
use crate::graph_partition::Graph;
use crate::modular_data::{fusion_table, is_pointed, ModularData, ModularParts};
use crate::validation::ValidationReport;

pub use kernel::{
    kernel_parametrization, kernel_quadratic_sum, kernel_quadratic_sum_brute, IntMatrixModOrders,
    KernelParametrization,
};
pub use quadratic::{quadratic_sum, QuadExpWeight};
pub use snf::{determinant, identity, mat_mul, smith_normal_form, to_big, IntMatrix, Smith};

/// ⊕_j Z_{n_j}. Elements are indexed in mixed radix with the last coordinate
/// varying fastest.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FinAbGroup {
    orders: Vec<u64>,
}

impl FinAbGroup {
    pub fn new(orders: Vec<u64>) -> Result<Self> {
        if orders.contains(&0) {
            return Err(Error::InvalidData("cyclic orders must be at least 1".into()));
        }
        Ok(FinAbGroup { orders })
    }

    pub fn cyclic(n: u64) -> Self {
        FinAbGroup::new(vec![n]).expect("positive order")
    }

    pub fn trivial() -> Self {
        FinAbGroup { orders: vec![] }
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn size(&self) -> usize {
        self.orders.iter().product::<u64>() as usize
    }

    /// Exponent of the group (lcm of the orders).
    pub fn exponent(&self) -> u64 {
        self.orders.iter().fold(1, |a, &n| a.lcm(&n))
    }

    /// 2·exponent², a modulus in which every quadratic form on the group
    /// takes its values.
    pub fn default_modulus(&self) -> u64 {
        let e = self.exponent();
        2 * e * e
    }

    pub fn coords(&self, mut index: usize) -> Vec<u64> {
        let mut c = vec![0; self.rank()];
        for j in (0..self.rank()).rev() {
            let n = self.orders[j] as usize;
            c[j] = (index % n) as u64;
            index /= n;
        }
        c
    }

    /// Index of the element with the given coordinates (reduced first).
    pub fn index(&self, coords: &[i64]) -> usize {
        coords
            .iter()
            .zip(&self.orders)
            .fold(0, |acc, (&x, &n)| acc * n as usize + x.rem_euclid(n as i64) as usize)
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let (x, y) = (self.coords(a), self.coords(b));
        let s: Vec<i64> = x.iter().zip(&y).map(|(&p, &q)| (p + q) as i64).collect();
        self.index(&s)
    }

    pub fn neg(&self, a: usize) -> usize {
        let s: Vec<i64> = self.coords(a).iter().map(|&p| -(p as i64)).collect();
        self.index(&s)
    }

    /// The j-th standard generator.
    pub fn generator(&self, j: usize) -> usize {
        let mut c = vec![0i64; self.rank()];
        c[j] = 1;
        self.index(&c)
    }

    /// Λ × Λ′ with the coordinates of Λ first.
    pub fn product(&self, other: &FinAbGroup) -> FinAbGroup {
        FinAbGroup {
            orders: self.orders.iter().chain(&other.orders).copied().collect(),
        }
    }

    fn addition_table(&self) -> Vec<Vec<usize>> {
        let n = self.size();
        (0..n).map(|a| (0..n).map(|b| self.add(a, b)).collect()).collect()
    }
}

pub const CHECK_Q_UNIT: &str = "q(0) = 1";
pub const CHECK_Q_EVEN: &str = "q(-x) = q(x)";
pub const CHECK_B_ADDITIVE: &str = "b bi-additive";
pub const CHECK_B_NONDEGENERATE: &str = "b nondegenerate";

/// A finite abelian group with a quadratic form q(x) = ζ_N^{qexp[x]}.
#[derive(Debug, Clone)]
pub struct MetricGroup {
    group: FinAbGroup,
    modulus: u64,
    qexp: Vec<u64>,
}

/// Compares q as a function into the roots of unity, whatever the moduli.
impl PartialEq for MetricGroup {
    fn eq(&self, other: &Self) -> bool {
        let (n, m) = (self.modulus as u128, other.modulus as u128);
        self.group == other.group
            && self
                .qexp
                .iter()
                .zip(&other.qexp)
                .all(|(&a, &b)| (a as u128 * m) % (n * m) == (b as u128 * n) % (n * m))
    }
}

impl Eq for MetricGroup {}

impl MetricGroup {
    /// Checks the table size and reduces exponents; the quadratic-form axioms
    /// are checked by [`MetricGroup::validate`].
    pub fn new(group: FinAbGroup, modulus: u64, qexp: Vec<i64>) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidData("modulus must be positive".into()));
        }
        if qexp.len() != group.size() {
            return Err(Error::Shape(format!(
                "q table has {} entries for a group of order {}",
                qexp.len(),
                group.size()
            )));
        }
        let qexp = qexp.iter().map(|&e| e.rem_euclid(modulus as i64) as u64).collect();
        Ok(MetricGroup { group, modulus, qexp })
    }

    /// Builds the table from a function of the coordinates.
    pub fn from_fn(group: FinAbGroup, modulus: u64, f: impl Fn(&[u64]) -> i64) -> Result<Self> {
        let table = (0..group.size()).map(|x| f(&group.coords(x))).collect();
        MetricGroup::new(group, modulus, table)
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn qexp(&self, x: usize) -> u64 {
        self.qexp[x]
    }

    pub fn qexp_table(&self) -> &[u64] {
        &self.qexp
    }

    /// Exponent of b(x, y) = q(x+y)/(q(x)q(y)).
    pub fn bexp(&self, x: usize, y: usize) -> u64 {
        let n = self.modulus;
        (self.qexp[self.group.add(x, y)] + 2 * n - self.qexp[x] - self.qexp[y]) % n
    }

    pub fn q(&self, x: usize) -> CycNum {
        CycNum::root(self.modulus as u32, self.qexp[x] as i64)
    }

    /// The order of the subgroup of μ_N generated by the values of q.
    pub fn effective_modulus(&self) -> u64 {
        let g = self.qexp.iter().fold(self.modulus, |a, &e| a.gcd(&e));
        self.modulus / g
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let g = &self.group;
        let size = g.size();
        report.push(CHECK_Q_UNIT, (self.qexp[0] != 0).then(|| vec![0]));
        let odd = (0..size).find(|&x| self.qexp[g.neg(x)] != self.qexp[x]);
        report.push(CHECK_Q_EVEN, odd.map(|x| vec![x]));
        let add = g.addition_table();
        let n = self.modulus;
        let b = |x: usize, y: usize| (self.qexp[add[x][y]] + 2 * n - self.qexp[x] - self.qexp[y]) % n;
        let mut additive = None;
        'outer: for j in 0..g.rank() {
            let e = g.generator(j);
            for x in 0..size {
                for y in 0..size {
                    if b(add[x][e], y) != (b(x, y) + b(e, y)) % n {
                        additive = Some(vec![x, y, j]);
                        break 'outer;
                    }
                }
            }
        }
        report.push(CHECK_B_ADDITIVE, additive);
        let degenerate = (1..size).find(|&x| (0..size).all(|y| b(x, y) == 0));
        report.push(CHECK_B_NONDEGENERATE, degenerate.map(|x| vec![x]));
        report
    }

    /// Errors with the first failing check.
    pub fn require_valid(&self) -> Result<()> {
        let report = self.validate();
        let failed = report.failed().next().map(|c| c.name);
        match failed {
            Some(name) => Err(Error::InvalidData(format!("metric group fails: {name}"))),
            None => Ok(()),
        }
    }

    /// Δ± = Σ_x q(x)^{±1}.
    pub fn gauss_pair(&self) -> (CycNum, CycNum) {
        let n = self.modulus as usize;
        let mut plus = vec![BigInt::from(0); n];
        let mut minus = vec![BigInt::from(0); n];
        for &e in &self.qexp {
            plus[e as usize] += 1;
            minus[(n - e as usize) % n] += 1;
        }
        (
            CycNum::from_exponent_counts(n as u32, &plus),
            CycNum::from_exponent_counts(n as u32, &minus),
        )
    }
}

fn check_d_squared(group: &FinAbGroup, d: &CycNum) -> Result<()> {
    if d * d != CycNum::from_int(1, group.size() as i64) {
        return Err(Error::Precondition(format!("normalization: D² ≠ |Λ| = {}", group.size())));
    }
    Ok(())
}

/// Pointed modular data of a metric group: labels are group elements, a* = −a,
/// d ≡ 1, S_ab = b(a, b), θ_a = q(a).
pub fn pointed_modular_from_metric(mg: &MetricGroup, d: &CycNum) -> Result<ModularData> {
    check_d_squared(&mg.group, d)?;
    let eff = mg.effective_modulus();
    let shrink = mg.modulus / eff;
    let conductor = lcm_order(eff as u32, d.order());
    let g = &mg.group;
    let size = g.size();
    let root = |e: u64| CycNum::root(eff as u32, (e / shrink) as i64);
    ModularData::new(ModularParts {
        conductor,
        dual: (0..size).map(|x| g.neg(x)).collect(),
        s: (0..size)
            .map(|x| (0..size).map(|y| root(mg.bexp(x, y))).collect())
            .collect(),
        theta: (0..size).map(|x| root(mg.qexp[x])).collect(),
        global_d: d.clone(),
    })
}

/// Recovers (Λ, q) from pointed modular data. Returns the metric group and,
/// per label, the index of the corresponding group element.
pub fn metric_group_of_pointed(md: &ModularData) -> Result<(MetricGroup, Vec<usize>)> {
    if !is_pointed(md)?.pointed {
        return Err(Error::Precondition("data is not pointed".into()));
    }
    let k = md.rank();
    let fusion = fusion_table(md)?;
    let mult: Vec<Vec<usize>> = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| (0..k).find(|&l| fusion[a][b][l].is_one()).expect("pointed fusion"))
                .collect()
        })
        .collect();
    // greedy generating set
    let mut gens = Vec::new();
    let mut reached = vec![false; k];
    reached[0] = true;
    for a in 0..k {
        if reached[a] {
            continue;
        }
        gens.push(a);
        let mut frontier: Vec<usize> = (0..k).filter(|&x| reached[x]).collect();
        while let Some(x) = frontier.pop() {
            for &s in &gens {
                let y = mult[x][s];
                if !reached[y] {
                    reached[y] = true;
                    frontier.push(y);
                }
            }
        }
    }
    // relations e_x + e_s − e_{xs} and e_0 on the free group over labels
    let mut rel: Vec<Vec<i64>> = Vec::new();
    let mut unit = vec![0i64; k];
    unit[0] = 1;
    rel.push(unit);
    for x in 0..k {
        for &s in &gens {
            let mut row = vec![0i64; k];
            row[x] += 1;
            row[s] += 1;
            row[mult[x][s]] -= 1;
            rel.push(row);
        }
    }
    let snf = smith_normal_form(&to_big(&rel));
    let diag = snf.diagonal();
    let kept: Vec<usize> = (0..diag.len()).filter(|&i| diag[i] != BigInt::from(1)).collect();
    let orders: Vec<u64> = kept
        .iter()
        .map(|&i| u64::try_from(&diag[i]).map_err(|_| Error::Internal("infinite fusion group".into())))
        .collect::<Result<_>>()?;
    let group = FinAbGroup::new(orders)?;
    let label_to_elem: Vec<usize> = (0..k)
        .map(|x| {
            let c: Vec<i64> = kept.iter().map(|&i| i64::try_from(&snf.v[x][i]).expect("small")).collect();
            group.index(&c)
        })
        .collect();
    let mut seen = vec![false; group.size()];
    if group.size() != k || label_to_elem.iter().any(|&e| std::mem::replace(&mut seen[e], true)) {
        return Err(Error::Internal("fusion group decomposition is not a bijection".into()));
    }
    let roots: Vec<(u64, u64)> = (0..k)
        .map(|x| {
            md.theta(x)
                .root_of_unity_exponent()
                .ok_or_else(|| Error::InvalidData(format!("θ_{x} is not a root of unity")))
        })
        .collect::<Result<_>>()?;
    let modulus = roots.iter().fold(1u64, |a, &(m, _)| a.lcm(&m));
    let mut qexp = vec![0i64; k];
    for (x, &(m, e)) in roots.iter().enumerate() {
        qexp[label_to_elem[x]] = (e * (modulus / m)) as i64;
    }
    Ok((MetricGroup::new(group, modulus, qexp)?, label_to_elem))
}

fn check_linking(b: &[Vec<i64>]) -> Result<()> {
    let m = b.len();
    if b.iter().any(|r| r.len() != m) {
        return Err(Error::Shape("linking matrix must be square".into()));
    }
    for i in 0..m {
        for j in 0..i {
            if b[i][j] != b[j][i] {
                return Err(Error::InvalidData(format!("linking matrix not symmetric at ({j},{i})")));
            }
        }
    }
    Ok(())
}

/// 𝒢(B) = Σ_{x ∈ Λᵐ} Π_r q(x_r)^{B_rr} Π_{r<s} b(x_r, x_s)^{B_rs} by
/// enumeration, the first coordinate split across workers.
pub fn gauss_sum_bracket(mg: &MetricGroup, b: &[Vec<i64>], budget: Budget) -> Result<CycNum> {
    check_linking(b)?;
    let m = b.len();
    let size = mg.group.size();
    budget.admit(size, m)?;
    let n = mg.modulus;
    if m == 0 {
        return Ok(CycNum::one(1));
    }
    let add = mg.group.addition_table();
    let q = &mg.qexp;
    let bt: Vec<Vec<u64>> = (0..size)
        .map(|x| (0..size).map(|y| (q[add[x][y]] + 2 * n - q[x] - q[y]) % n).collect())
        .collect();
    let coef: Vec<Vec<u64>> = b
        .iter()
        .map(|r| r.iter().map(|&v| v.rem_euclid(n as i64) as u64).collect())
        .collect();
    let partial: Vec<Vec<u64>> = (0..size)
        .into_par_iter()
        .map(|first| {
            let mut counts = vec![0u64; n as usize];
            let mut xs = vec![0usize; m];
            let mut acc = vec![0u64; m + 1];
            xs[0] = first;
            acc[1] = coef[0][0] * q[first] % n;
            bracket_descend(1, &mut xs, &mut acc, &coef, q, &bt, n, size, &mut counts);
            counts
        })
        .collect();
    let mut totals = vec![BigInt::from(0); n as usize];
    for c in partial {
        for (t, v) in totals.iter_mut().zip(c) {
            *t += v;
        }
    }
    Ok(CycNum::from_exponent_counts(n as u32, &totals))
}

#[allow(clippy::too_many_arguments)]
fn bracket_descend(
    t: usize,
    xs: &mut [usize],
    acc: &mut [u64],
    coef: &[Vec<u64>],
    q: &[u64],
    bt: &[Vec<u64>],
    n: u64,
    size: usize,
    counts: &mut [u64],
) {
    let m = xs.len();
    if t == m {
        counts[acc[m] as usize] += 1;
        return;
    }
    for x in 0..size {
        xs[t] = x;
        let mut e = acc[t] + coef[t][t] * q[x];
        for r in 0..t {
            if coef[r][t] != 0 {
                e += coef[r][t] * bt[xs[r]][x];
            }
        }
        acc[t + 1] = e % n;
        bracket_descend(t + 1, xs, acc, coef, q, bt, n, size, counts);
    }
}

/// The quadratic polynomial in the cyclic coordinates of Λᵐ whose ζ_N-power
/// is the summand of 𝒢(B). Variable (r, j) has index r·rank + j.
pub fn gauss_weight(mg: &MetricGroup, b: &[Vec<i64>]) -> Result<(QuadExpWeight, Vec<u64>)> {
    check_linking(b)?;
    mg.require_valid()?;
    let g = &mg.group;
    let k = g.rank();
    let m = b.len();
    let n = mg.modulus as i64;
    let gens: Vec<usize> = (0..k).map(|j| g.generator(j)).collect();
    let t: Vec<i64> = gens.iter().map(|&e| mg.qexp[e] as i64).collect();
    // bilinear exponent between coordinates: b(e_j, e_l), with 2t_j on the diagonal
    let beta = |j: usize, l: usize| -> i64 {
        if j == l {
            2 * t[j]
        } else {
            mg.bexp(gens[j], gens[l]) as i64
        }
    };
    let mut w = QuadExpWeight::zero(mg.modulus, m * k);
    let var = |r: usize, j: usize| r * k + j;
    for r in 0..m {
        let brr = b[r][r].rem_euclid(n);
        for j in 0..k {
            w.add_quad(var(r, j), var(r, j), brr * t[j] % n);
            for l in j + 1..k {
                w.add_quad(var(r, j), var(r, l), brr * beta(j, l) % n);
            }
        }
        for s in r + 1..m {
            let brs = b[r][s].rem_euclid(n);
            if brs == 0 {
                continue;
            }
            for j in 0..k {
                for l in 0..k {
                    w.add_quad(var(r, j), var(s, l), brs * beta(j, l) % n);
                }
            }
        }
    }
    let orders = (0..m).flat_map(|_| g.orders.iter().copied()).collect();
    Ok((w, orders))
}

/// 𝒢(B) in time polynomial in the size of B.
pub fn gauss_sum_fast(mg: &MetricGroup, b: &[Vec<i64>]) -> Result<CycNum> {
    let (w, orders) = gauss_weight(mg, b)?;
    quadratic_sum(&w, &orders)
}

/// Z(M_L) = D^{−b₀−1} Δ₊^{−b₊} Δ₋^{−b₋} 𝒢(B_L).
pub fn rt_pointed_surgery(mg: &MetricGroup, d: &CycNum, sp: &SurgeryPresentation) -> Result<CycNum> {
    check_d_squared(&mg.group, d)?;
    let (plus, minus) = mg.gauss_pair();
    if plus.is_zero() || minus.is_zero() {
        return Err(Error::InvalidData("Δ± = 0".into()));
    }
    let (bp, bm, b0) = signature_data(sp);
    let bracket = gauss_sum_fast(mg, sp.matrix())?;
    let order = [d.order(), plus.order(), minus.order(), bracket.order()]
        .into_iter()
        .fold(1, lcm_order);
    let up = |v: &CycNum| v.embed(order);
    let z = &(&up(d)?.pow(-(b0 as i64) - 1)? * &up(&plus)?.pow(-(bp as i64))?)
        * &(&up(&minus)?.pow(-(bm as i64))? * &up(&bracket)?);
    Ok(z)
}

/// Metric group of Z(Vec_Λ): Λ × Λ with q(a, χ) = Π_j ζ_{n_j}^{a_j χ_j}.
pub fn hyperbolic_center(group: &FinAbGroup) -> MetricGroup {
    let k = group.rank();
    let id: Vec<Vec<i64>> = (0..k).map(|i| (0..k).map(|j| (i == j) as i64).collect()).collect();
    hyperbolic_center_with_pairing(group, &id).expect("the coordinate pairing is nondegenerate")
}

/// Like [`hyperbolic_center`] with Λ̂ identified with Λ through the integer
/// matrix `phi`: q(a, χ) = Π_j ζ_{n_j}^{a_j (φχ)_j}. `phi` must induce an
/// automorphism of Λ, which validation of the result confirms.
pub fn hyperbolic_center_with_pairing(group: &FinAbGroup, phi: &[Vec<i64>]) -> Result<MetricGroup> {
    let k = group.rank();
    if phi.len() != k || phi.iter().any(|r| r.len() != k) {
        return Err(Error::Shape(format!("pairing must be {k}×{k}")));
    }
    let doubled = group.product(group);
    let e = group.exponent();
    let modulus = 2 * e * e;
    let orders = group.orders.clone();
    let mg = MetricGroup::from_fn(doubled, modulus, |c| {
        let (a, chi) = c.split_at(k);
        let mut total: i128 = 0;
        for j in 0..k {
            let image: i128 = (0..k).map(|l| phi[j][l] as i128 * chi[l] as i128).sum();
            total += a[j] as i128 * image * (modulus / orders[j]) as i128;
        }
        total.rem_euclid(modulus as i128) as i64
    })?;
    mg.require_valid()?;
    Ok(mg)
}

/// Input manifold for [`tv_pointed_trivial`].
#[derive(Debug, Clone, Copy)]
pub enum TvInput<'a> {
    Graph(&'a Graph),
    Presentation(&'a SurgeryPresentation),
}

/// |M|_{Vec_Λ} = Z_{Z(Vec_Λ)}(M) through the hyperbolic center. A graph is
/// evaluated by both the graph formula and the surgery route, which must agree.
pub fn tv_pointed_trivial(group: &FinAbGroup, input: TvInput<'_>, budget: Budget) -> Result<CycNum> {
    let center = hyperbolic_center(group);
    let d = CycNum::from_int(1, group.size() as i64);
    match input {
        TvInput::Presentation(sp) => rt_pointed_surgery(&center, &d, sp),
        TvInput::Graph(g) => {
            let md = pointed_modular_from_metric(&center, &d)?;
            let by_graph = rt_graph_manifold(&md, g, budget)?;
            let by_surgery = rt_pointed_surgery(&center, &d, &plumbing_presentation(g)?)?;
            if by_graph != by_surgery {
                return Err(Error::Internal(format!(
                    "center routes disagree: graph formula {} vs surgery {}",
                    by_graph.to_token(),
                    by_surgery.to_token()
                )));
            }
            Ok(by_graph)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_indexing() {
        let g = FinAbGroup::new(vec![2, 3]).unwrap();
        assert_eq!(g.size(), 6);
        assert_eq!(g.coords(4), vec![1, 1]);
        assert_eq!(g.index(&[1, 1]), 4);
        assert_eq!(g.add(4, 5), g.index(&[0, 0]));
        assert_eq!(g.neg(g.index(&[1, 1])), g.index(&[1, 2]));
        assert_eq!(g.default_modulus(), 72);
        assert_eq!(FinAbGroup::trivial().size(), 1);
    }

    #[test]
    fn semion_metric_group() {
        let mg = MetricGroup::new(FinAbGroup::cyclic(2), 4, vec![0, 1]).unwrap();
        assert!(mg.validate().all_passed());
        let (p, m) = mg.gauss_pair();
        assert_eq!(p, &CycNum::one(4) + &CycNum::root(4, 1));
        assert_eq!(m, &CycNum::one(4) - &CycNum::root(4, 1));
    }

    #[test]
    fn bad_forms_are_reported() {
        let odd = MetricGroup::new(FinAbGroup::cyclic(3), 3, vec![0, 1, 0]).unwrap();
        assert!(!odd.validate().get(CHECK_Q_EVEN).unwrap().passed);
        let flat = MetricGroup::new(FinAbGroup::cyclic(2), 2, vec![0, 0]).unwrap();
        let report = flat.validate();
        assert!(!report.get(CHECK_B_NONDEGENERATE).unwrap().passed);
        assert!(report.get(CHECK_B_ADDITIVE).unwrap().passed);
        assert!(flat.require_valid().is_err());
    }
}
