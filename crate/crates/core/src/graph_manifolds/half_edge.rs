//! Vertex coefficients A_r and the half-edge state sum.
//!
//! The state sum runs over labelings of half-edges. The literal enumeration
//! visits |I|^{2|E|} labelings and is only usable on tiny graphs; the default
//! route contracts the same tensor network exactly, vertex by vertex.

use rayon::prelude::*;

use crate::cyclotomic::ring::{CycRing, IntRing, Ring};
use crate::cyclotomic::{lcm_order, CycNum};
use crate::error::{Budget, Error, Result};
use crate::graph_partition::Graph;
use crate::modular_data::{require_anomaly_free, ModularData};

use super::require_family_graph;

/// Half-edges (vertex, edge id) of a graph, with per-vertex incidence lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfEdgeStructure {
    pub half_edges: Vec<(usize, usize)>,
    /// Indices into `half_edges`, per vertex.
    pub at_vertex: Vec<Vec<usize>>,
}

impl HalfEdgeStructure {
    /// Edge e = {u, v} with u < v yields half-edges 2e (at u) and 2e+1 (at v).
    pub fn new(g: &Graph) -> Self {
        let mut half_edges = Vec::with_capacity(2 * g.edge_count());
        let mut at_vertex = vec![Vec::new(); g.vertex_count()];
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            at_vertex[u].push(half_edges.len());
            half_edges.push((u, e));
            at_vertex[v].push(half_edges.len());
            half_edges.push((v, e));
        }
        HalfEdgeStructure { half_edges, at_vertex }
    }
}

/// A_r(a₁,…,a_r) = Σ_i d_i^{−r} Π_j S_{i a_j}.
pub fn vertex_coefficient(md: &ModularData, colors: &[usize]) -> Result<CycNum> {
    let r = colors.len();
    if r == 0 {
        return Err(Error::Unsupported("vertex coefficient needs at least one color".into()));
    }
    if let Some(&c) = colors.iter().find(|&&c| c >= md.rank()) {
        return Err(Error::Shape(format!("label {c} out of range")));
    }
    let mut acc = CycNum::zero(md.conductor());
    for i in 0..md.rank() {
        let mut term = md.dim(i).pow(-(r as i64))?;
        for &a in colors {
            term = &term * md.s(i, a);
        }
        acc += &term;
    }
    Ok(acc)
}

/// Table of A_r over all color tuples, first color slowest.
fn vertex_table(md: &ModularData, r: usize) -> Result<Vec<CycNum>> {
    let k = md.rank();
    let inv: Vec<CycNum> = (0..k).map(|i| md.dim(i).pow(-(r as i64))).collect::<Result<_>>()?;
    let total = k.pow(r as u32);
    Ok((0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut colors = vec![0; r];
            for slot in colors.iter_mut().rev() {
                *slot = idx % k;
                idx /= k;
            }
            let mut acc = CycNum::zero(md.conductor());
            for (i, w) in inv.iter().enumerate() {
                let mut term = w.clone();
                for &a in &colors {
                    term = &term * md.s(i, a);
                    if term.is_zero() {
                        break;
                    }
                }
                acc += &term;
            }
            acc
        })
        .collect())
}

fn checks(md: &ModularData, g: &Graph) -> Result<()> {
    require_anomaly_free(md)?;
    require_family_graph(g)
}

fn d_power(md: &ModularData, value: CycNum, e: i64) -> Result<CycNum> {
    let order = lcm_order(md.global_d().order(), value.order());
    Ok(&md.global_d().embed(order)?.pow(e)? * &value.embed(order)?)
}

/// 𝒟^{−|E|} Σ_ℓ Π_v A_{deg v}(ℓ|H(v)) Π_e S_{ℓ(h_u), ℓ(h_v)} by visiting every
/// half-edge labeling. The budget bounds |I|^{2|E|}.
pub fn rt_half_edge_sum_enumerated(md: &ModularData, g: &Graph, budget: Budget) -> Result<CycNum> {
    checks(md, g)?;
    let k = md.rank();
    let h = HalfEdgeStructure::new(g);
    let slots = h.half_edges.len();
    budget.admit(k, slots)?;
    let degrees = g.degrees();
    let mut tables = vec![Vec::new(); g.max_degree() + 1];
    for &d in &degrees {
        if tables[d].is_empty() {
            tables[d] = vertex_table(md, d)?;
        }
    }
    let mut total = CycNum::zero(md.conductor());
    let mut label = vec![0usize; slots];
    'outer: loop {
        let mut term = CycNum::one(md.conductor());
        for e in 0..g.edge_count() {
            term = &term * md.s(label[2 * e], label[2 * e + 1]);
            if term.is_zero() {
                break;
            }
        }
        if !term.is_zero() {
            for (v, hs) in h.at_vertex.iter().enumerate() {
                let idx = hs.iter().fold(0, |acc, &x| acc * k + label[x]);
                term = &term * &tables[degrees[v]][idx];
                if term.is_zero() {
                    break;
                }
            }
            total += &term;
        }
        let mut t = slots;
        loop {
            if t == 0 {
                break 'outer;
            }
            t -= 1;
            label[t] += 1;
            if label[t] < k {
                break;
            }
            label[t] = 0;
        }
    }
    d_power(md, total, -(g.edge_count() as i64))
}

/// A tensor over a list of edge variables, first variable slowest.
struct Tensor<E> {
    vars: Vec<usize>,
    data: Vec<E>,
}

/// Order in which vertices join the contracted cluster, minimizing the
/// largest loop (exponent of |I|); exhaustive for up to eight vertices.
fn contraction_order(g: &Graph) -> (Vec<usize>, usize) {
    let inc = g.incidence();
    let n = g.vertex_count();
    let cost = |order: &[usize]| -> usize {
        let mut inside = vec![false; n];
        let mut open = 0usize;
        let mut worst = 0;
        for &v in order {
            let closing = inc[v].iter().filter(|&&e| {
                let (a, b) = g.edges()[e];
                inside[if a == v { b } else { a }]
            });
            let c = closing.count();
            let fresh = inc[v].len() - c;
            worst = worst.max(open + fresh);
            open = open - c + fresh;
            inside[v] = true;
        }
        worst
    };
    if n <= 8 {
        let mut best: Option<(usize, Vec<usize>)> = None;
        for p in crate::graph_partition::permutations(n) {
            let c = cost(&p);
            if best.as_ref().is_none_or(|(bc, _)| c < *bc) {
                best = Some((c, p));
            }
        }
        let (c, p) = best.expect("at least one vertex");
        return (p, c);
    }
    let mut order = Vec::with_capacity(n);
    let mut used = vec![false; n];
    for _ in 0..n {
        let next = (0..n)
            .filter(|&v| !used[v])
            .min_by_key(|&v| {
                let mut trial = order.clone();
                trial.push(v);
                cost(&trial)
            })
            .expect("unused vertex remains");
        used[next] = true;
        order.push(next);
    }
    let c = cost(&order);
    (order, c)
}

/// Contracts the vertex tensors (S already absorbed) in the given order.
/// Returns `None` on integer overflow.
fn contract<R: Ring>(ring: &R, k: usize, tensors: Vec<Tensor<R::Elem>>, order: &[usize]) -> Option<R::Elem> {
    let mut cluster = Tensor {
        vars: vec![],
        data: vec![ring.one()],
    };
    let mut tensors: Vec<Option<Tensor<R::Elem>>> = tensors.into_iter().map(Some).collect();
    for &v in order {
        let t = tensors[v].take().expect("each vertex joins once");
        let closing: Vec<usize> = t.vars.iter().copied().filter(|e| cluster.vars.contains(e)).collect();
        let out_vars: Vec<usize> = cluster
            .vars
            .iter()
            .copied()
            .filter(|e| !closing.contains(e))
            .chain(t.vars.iter().copied().filter(|e| !closing.contains(e)))
            .collect();
        let stride = |vars: &[usize], e: usize| -> usize {
            let p = vars.iter().position(|&x| x == e).expect("variable present");
            k.pow((vars.len() - 1 - p) as u32)
        };
        // offsets contributed by the summed variables
        let inner = k.pow(closing.len() as u32);
        let mut off_c = vec![0usize; inner];
        let mut off_t = vec![0usize; inner];
        for (c, (oc, ot)) in off_c.iter_mut().zip(off_t.iter_mut()).enumerate() {
            let mut rest = c;
            for &e in closing.iter().rev() {
                let lab = rest % k;
                rest /= k;
                *oc += lab * stride(&cluster.vars, e);
                *ot += lab * stride(&t.vars, e);
            }
        }
        let out_strides: Vec<(usize, usize)> = out_vars
            .iter()
            .map(|&e| {
                let sc = if cluster.vars.contains(&e) { stride(&cluster.vars, e) } else { 0 };
                let st = if t.vars.contains(&e) { stride(&t.vars, e) } else { 0 };
                (sc, st)
            })
            .collect();
        let total = k.pow(out_vars.len() as u32);
        let cluster_data = &cluster.data;
        let data: Option<Vec<R::Elem>> = (0..total)
            .into_par_iter()
            .map(|o| {
                let (mut base_c, mut base_t) = (0, 0);
                let mut rest = o;
                for &(sc, st) in out_strides.iter().rev() {
                    let lab = rest % k;
                    rest /= k;
                    base_c += lab * sc;
                    base_t += lab * st;
                }
                let mut acc = ring.zero();
                for c in 0..inner {
                    let x = &cluster_data[base_c + off_c[c]];
                    if ring.is_zero(x) {
                        continue;
                    }
                    if !ring.mul_add(&mut acc, x, &t.data[base_t + off_t[c]]) {
                        return None;
                    }
                }
                Some(acc)
            })
            .collect();
        cluster = Tensor { vars: out_vars, data: data? };
    }
    debug_assert!(cluster.vars.is_empty());
    cluster.data.pop()
}

/// Builds each vertex's tensor over its incident edges. The edge matrix S is
/// absorbed at the larger endpoint, so an edge variable carries the label of
/// the half-edge at the smaller endpoint.
fn vertex_tensors(md: &ModularData, g: &Graph, tables: &[Vec<CycNum>]) -> Vec<Tensor<CycNum>> {
    let k = md.rank();
    let inc = g.incidence();
    (0..g.vertex_count())
        .map(|v| {
            let vars = inc[v].clone();
            let mut data = tables[vars.len()].clone();
            for (pos, &e) in vars.iter().enumerate() {
                if g.edges()[e].1 != v {
                    continue;
                }
                // replace index at `pos` (label b at v) by a: Σ_b T(..b..) S_{a,b}
                let stride = k.pow((vars.len() - 1 - pos) as u32);
                let mut next = vec![CycNum::zero(md.conductor()); data.len()];
                for (idx, slot) in next.iter_mut().enumerate() {
                    let a = idx / stride % k;
                    let base = idx - a * stride;
                    for b in 0..k {
                        let s = md.s(a, b);
                        let x = &data[base + b * stride];
                        if !s.is_zero() && !x.is_zero() {
                            *slot += &(x * s);
                        }
                    }
                }
                data = next;
            }
            Tensor { vars, data }
        })
        .collect()
}

/// The half-edge state sum by exact contraction of its tensor network. The
/// budget bounds the largest contraction loop, |I| to the number of edge
/// variables touched in one step.
pub fn rt_half_edge_sum(md: &ModularData, g: &Graph, budget: Budget) -> Result<CycNum> {
    checks(md, g)?;
    let k = md.rank();
    let (order, loop_exp) = contraction_order(g);
    budget.admit(k, loop_exp.max(g.max_degree() + 1))?;
    let mut tables = vec![Vec::new(); g.max_degree() + 1];
    for d in g.degrees() {
        if tables[d].is_empty() {
            tables[d] = vertex_table(md, d)?;
        }
    }
    let tensors = vertex_tensors(md, g, &tables);
    let n = md.conductor();
    let sum = match IntRing::new(n).and_then(|ring| {
        let mut den = num_bigint::BigInt::from(1);
        let mut lifted = Vec::with_capacity(tensors.len());
        for t in &tensors {
            let (data, d) = ring.lift(&t.data)?;
            den *= d;
            lifted.push(Tensor { vars: t.vars.clone(), data });
        }
        let v = contract(&ring, k, lifted, &order)?;
        Some(ring.to_cyc(&v, &den))
    }) {
        Some(v) => v,
        None => contract(&CycRing { order: n }, k, tensors, &order).expect("rational contraction cannot overflow"),
    };
    d_power(md, sum, -(g.edge_count() as i64))
}
