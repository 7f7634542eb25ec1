//! Graph-homomorphism partition functions Z_A(G) = Σ_σ Π_{uv∈E} A_{σ(u)σ(v)},
//! the edge-weight matrix of modular data, and the multiplicative
//! block-rank-one test.

mod enumerate;
mod graph;
mod mbr1;

use rayon::prelude::*;

use crate::cyclotomic::ring::{den_pow, CycRing, IntRing, Ring};
use crate::cyclotomic::{common_order, CycNum};
use crate::error::{Budget, Error, Result};
use crate::modular_data::ModularData;

pub use enumerate::{connected_graphs, graphs_up_to_isomorphism};
pub(crate) use enumerate::permutations;
pub use graph::Graph;
pub use mbr1::{is_mbr1, rectangular_blocks, Block, Mbr1};

/// A square matrix of cyclotomic weights sharing one conductor.
///
/// Equality compares entries as field elements, so matrices built over
/// different conductors can be equal.
#[derive(Debug, Clone)]
pub struct WeightMatrix {
    order: u32,
    entries: Vec<Vec<CycNum>>,
    symmetric: bool,
}

impl PartialEq for WeightMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl Eq for WeightMatrix {}

impl WeightMatrix {
    /// Entries of different orders are embedded into their lcm.
    pub fn new(entries: Vec<Vec<CycNum>>) -> Result<Self> {
        let k = entries.len();
        if entries.iter().any(|r| r.len() != k) {
            return Err(Error::Shape("weight matrix must be square".into()));
        }
        let all: Vec<&CycNum> = entries.iter().flatten().collect();
        let order = common_order(&all);
        let entries: Vec<Vec<CycNum>> = entries
            .into_iter()
            .map(|r| r.into_iter().map(|v| v.embed(order)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        let symmetric = (0..k).all(|i| (0..i).all(|j| entries[i][j] == entries[j][i]));
        Ok(WeightMatrix {
            order,
            entries,
            symmetric,
        })
    }

    pub fn from_integers(rows: &[&[i64]]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| CycNum::from_int(1, v)).collect())
                .collect(),
        )
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn get(&self, i: usize, j: usize) -> &CycNum {
        &self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<CycNum>] {
        &self.entries
    }

    /// Kronecker product on the index set I×I′, pair (i,i′) ↦ i·|I′| + i′.
    pub fn kronecker(&self, other: &WeightMatrix) -> Result<WeightMatrix> {
        let n = crate::cyclotomic::lcm_order(self.order, other.order);
        let (a, b) = (self.size(), other.size());
        let mut rows = vec![Vec::with_capacity(a * b); a * b];
        for i in 0..a {
            for k in 0..b {
                for j in 0..a {
                    for l in 0..b {
                        let x = self.entries[i][j].embed(n)?;
                        let y = other.entries[k][l].embed(n)?;
                        rows[i * b + k].push(&x * &y);
                    }
                }
            }
        }
        WeightMatrix::new(rows)
    }

    /// Entrywise r-th power A^{∘r}.
    pub fn hadamard_power(&self, r: u32) -> Result<WeightMatrix> {
        WeightMatrix::new(
            self.entries
                .iter()
                .map(|row| row.iter().map(|v| v.pow(r as i64)).collect::<Result<_>>())
                .collect::<Result<_>>()?,
        )
    }

    /// Simultaneous row/column permutation: index `i` moves to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> WeightMatrix {
        let k = self.size();
        let mut inv = vec![0; k];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        WeightMatrix {
            order: self.order,
            entries: (0..k)
                .map(|a| (0..k).map(|b| self.entries[inv[a]][inv[b]].clone()).collect())
                .collect(),
            symmetric: self.symmetric,
        }
    }

    /// Rank over Q(ζ_order) by exact elimination.
    pub fn rank(&self) -> usize {
        rank_of(self.entries.clone())
    }
}

pub(crate) fn rank_of(mut m: Vec<Vec<CycNum>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][c].inv().expect("pivot is nonzero");
        let pivot: Vec<CycNum> = m[rank].iter().map(|v| v * &inv).collect();
        for r in rank + 1..rows {
            if m[r][c].is_zero() {
                continue;
            }
            let f = m[r][c].clone();
            for (x, p) in m[r].iter_mut().zip(&pivot) {
                *x = &*x - &(&f * p);
            }
        }
        rank += 1;
    }
    rank
}

/// A(i,j) = S_{i,j*} / (d_i d_j).
pub fn edge_weight_matrix(md: &ModularData) -> Result<WeightMatrix> {
    let k = md.rank();
    let mut inv_d = Vec::with_capacity(k);
    for i in 0..k {
        if md.dim(i).is_zero() {
            return Err(Error::InvalidData(format!("d_{i} = 0")));
        }
        inv_d.push(md.dim(i).inv()?);
    }
    let rows = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| &(md.s(i, md.dual(j)) * &inv_d[i]) * &inv_d[j])
                .collect()
        })
        .collect();
    WeightMatrix::new(rows)
}

/// Z_A(G) by brute force per connected component, multiplied together.
pub fn partition_function(a: &WeightMatrix, g: &Graph, budget: Budget) -> Result<CycNum> {
    let k = a.size();
    let mut total = CycNum::one(a.order);
    for comp in g.components() {
        budget.admit(k, comp.len())?;
        let part = if comp.len() == 1 {
            CycNum::from_int(a.order, k as i64)
        } else {
            component_sum(a, &g.induced(&comp))
        };
        total = &total * &part;
        if total.is_zero() {
            break;
        }
    }
    Ok(total)
}

/// Sum over labelings of one connected graph; the integer back end is tried
/// first and the rational one takes over on overflow.
fn component_sum(a: &WeightMatrix, g: &Graph) -> CycNum {
    let flat: Vec<CycNum> = a.entries.iter().flatten().cloned().collect();
    if let Some(ring) = IntRing::new(a.order) {
        if let Some((table, den)) = ring.lift(&flat) {
            if let Some(v) = labeling_sum(&ring, &table, a.size(), g) {
                return ring.to_cyc(&v, &den_pow(&den, g.edge_count()));
            }
        }
    }
    let ring = CycRing { order: a.order };
    labeling_sum(&ring, &flat, a.size(), g).expect("rational back end cannot overflow")
}

/// Σ_σ Π_e table[σ(u)·k + σ(v)], vertices assigned in index order (last fastest).
/// The first vertex's label is split across workers; partial sums are added
/// in label order.
pub(crate) fn labeling_sum<R: Ring>(
    ring: &R,
    table: &[R::Elem],
    k: usize,
    g: &Graph,
) -> Option<R::Elem> {
    let n = g.vertex_count();
    if n == 0 {
        return Some(ring.one());
    }
    // back[t] lists earlier neighbours of vertex t
    let mut back = vec![Vec::new(); n];
    for &(u, v) in g.edges() {
        back[v].push(u);
    }
    let partials: Vec<Option<R::Elem>> = (0..k)
        .into_par_iter()
        .map(|first| {
            let mut labels = vec![0usize; n];
            labels[0] = first;
            let mut prefix = vec![ring.one(); n];
            let mut acc = ring.zero();
            if descend(ring, table, k, &back, 1, &mut labels, &mut prefix, &mut acc) {
                Some(acc)
            } else {
                None
            }
        })
        .collect();
    let mut total = ring.zero();
    for p in partials {
        if !ring.add_to(&mut total, &p?) {
            return None;
        }
    }
    Some(total)
}

#[allow(clippy::too_many_arguments)]
fn descend<R: Ring>(
    ring: &R,
    table: &[R::Elem],
    k: usize,
    back: &[Vec<usize>],
    t: usize,
    labels: &mut [usize],
    prefix: &mut [R::Elem],
    acc: &mut R::Elem,
) -> bool {
    let n = labels.len();
    if t == n {
        return ring.add_to(acc, &prefix[n - 1]);
    }
    for c in 0..k {
        labels[t] = c;
        let mut cur = prefix[t - 1].clone();
        let mut tmp = ring.zero();
        for &u in &back[t] {
            if !ring.mul_to(&cur, &table[labels[u] * k + c], &mut tmp) {
                return false;
            }
            std::mem::swap(&mut cur, &mut tmp);
            if ring.is_zero(&cur) {
                break;
            }
        }
        if ring.is_zero(&cur) {
            continue;
        }
        prefix[t] = cur;
        if !descend(ring, table, k, back, t + 1, labels, prefix, acc) {
            return false;
        }
    }
    true
}

/// The same sum over the rational back end only; exposed for cross-checking
/// the integer fast path.
pub fn partition_function_rational(a: &WeightMatrix, g: &Graph, budget: Budget) -> Result<CycNum> {
    let k = a.size();
    let flat: Vec<CycNum> = a.entries.iter().flatten().cloned().collect();
    let ring = CycRing { order: a.order };
    let mut total = CycNum::one(a.order);
    for comp in g.components() {
        budget.admit(k, comp.len())?;
        let part = labeling_sum(&ring, &flat, k, &g.induced(&comp)).expect("no overflow");
        total = &total * &part;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isolated_vertex_counts_labels() {
        let a = WeightMatrix::from_integers(&[&[1, 2, 3], &[2, 0, 1], &[3, 1, 1]]).unwrap();
        let v = partition_function(&a, &Graph::empty(1), Budget::default()).unwrap();
        assert_eq!(v, CycNum::from_int(1, 3));
        let v = partition_function(&a, &Graph::empty(0), Budget::default()).unwrap();
        assert!(v.is_one());
    }

    #[test]
    fn budget_guard() {
        let a = WeightMatrix::from_integers(&[&[1, 1], &[1, 1]]).unwrap();
        let g = Graph::path(5);
        assert!(partition_function(&a, &g, Budget(4)).is_err());
        assert_eq!(
            partition_function(&a, &g, Budget(5)).unwrap(),
            CycNum::from_int(1, 32)
        );
    }

    #[test]
    fn rank_and_powers() {
        let a = WeightMatrix::from_integers(&[&[1, 1], &[1, -1]]).unwrap();
        assert_eq!(a.rank(), 2);
        assert_eq!(a.hadamard_power(2).unwrap().rank(), 1);
        assert!(a.is_symmetric());
    }
}
