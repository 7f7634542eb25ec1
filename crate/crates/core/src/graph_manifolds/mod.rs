//! The graph manifolds M_G: their plumbing surgery presentations and three
//! evaluators of Z_C(M_G).

mod half_edge;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::abelian_gauss::{metric_group_of_pointed, rt_pointed_surgery, smith_normal_form, to_big};
use crate::cyclotomic::CycNum;
use crate::error::{Budget, Error, Result};
use crate::graph_partition::{edge_weight_matrix, partition_function, Graph};
use crate::modular_data::{center_of_modular, is_pointed, require_anomaly_free, ModularData};

pub use half_edge::{rt_half_edge_sum, rt_half_edge_sum_enumerated, vertex_coefficient, HalfEdgeStructure};

/// What a link component stands for in a plumbing presentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    /// Vertex circle K_v.
    Vertex(usize),
    /// First genus circle a_v.
    GenusA(usize),
    /// Second genus circle b_v.
    GenusB(usize),
    /// Unknot closing the cycle through the given non-tree edge.
    Cycle(usize),
    /// No annotation.
    Plain,
}

/// A framed-link surgery presentation kept at linking-matrix level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurgeryPresentation {
    matrix: Vec<Vec<i64>>,
    roles: Vec<Role>,
    source: Option<Graph>,
}

impl SurgeryPresentation {
    pub fn new(matrix: Vec<Vec<i64>>, roles: Vec<Role>) -> Result<Self> {
        let m = matrix.len();
        if matrix.iter().any(|r| r.len() != m) {
            return Err(Error::Shape("linking matrix must be square".into()));
        }
        if roles.len() != m {
            return Err(Error::Shape(format!("{} roles for {m} components", roles.len())));
        }
        for i in 0..m {
            for j in 0..i {
                if matrix[i][j] != matrix[j][i] {
                    return Err(Error::InvalidData(format!("linking matrix not symmetric at ({j},{i})")));
                }
            }
        }
        Ok(SurgeryPresentation {
            matrix,
            roles,
            source: None,
        })
    }

    /// Unannotated presentation.
    pub fn from_matrix(matrix: Vec<Vec<i64>>) -> Result<Self> {
        let m = matrix.len();
        Self::new(matrix, vec![Role::Plain; m])
    }

    pub fn empty() -> Self {
        SurgeryPresentation {
            matrix: vec![],
            roles: vec![],
            source: None,
        }
    }

    pub fn size(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn source(&self) -> Option<&Graph> {
        self.source.as_ref()
    }
}

fn require_family_graph(g: &Graph) -> Result<()> {
    if g.edge_count() == 0 {
        return Err(Error::Unsupported("graph must have at least one edge".into()));
    }
    if !g.is_connected() {
        return Err(Error::Unsupported("graph must be connected".into()));
    }
    Ok(())
}

/// Linking matrix of M_G. Per vertex v three 0-framed components K_v, a_v, b_v
/// (indices 3v, 3v+1, 3v+2) with no linking inside the block; per edge {u,v}
/// linking 1 between K_u and K_v; and one 0-framed unlinked unknot for each
/// edge outside a BFS spanning tree, accounting for the 1-handles of the
/// graph's cycles.
pub fn plumbing_presentation(g: &Graph) -> Result<SurgeryPresentation> {
    require_family_graph(g)?;
    let n = g.vertex_count();
    let cycles = g.cotree_edges();
    let m = 3 * n + cycles.len();
    let mut matrix = vec![vec![0i64; m]; m];
    for &(u, v) in g.edges() {
        matrix[3 * u][3 * v] = 1;
        matrix[3 * v][3 * u] = 1;
    }
    let mut roles = Vec::with_capacity(m);
    for v in 0..n {
        roles.extend([Role::Vertex(v), Role::GenusA(v), Role::GenusB(v)]);
    }
    roles.extend(cycles.iter().map(|&e| Role::Cycle(e)));
    Ok(SurgeryPresentation {
        matrix,
        roles,
        source: Some(g.clone()),
    })
}

/// Mirror image: B ↦ −B.
pub fn reverse_presentation(sp: &SurgeryPresentation) -> SurgeryPresentation {
    SurgeryPresentation {
        matrix: sp.matrix.iter().map(|r| r.iter().map(|&x| -x).collect()).collect(),
        roles: sp.roles.clone(),
        source: sp.source.clone(),
    }
}

/// Inertia (b₊, b₋, b₀) of the linking matrix by congruence diagonalization
/// over Q.
pub fn signature_data(sp: &SurgeryPresentation) -> (usize, usize, usize) {
    let n = sp.size();
    let mut a: Vec<Vec<BigRational>> = sp
        .matrix
        .iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect();
    let (mut plus, mut minus, mut zero) = (0, 0, 0);
    for t in 0..n {
        if a[t][t].is_zero() {
            if let Some(j) = (t + 1..n).find(|&j| !a[j][j].is_zero()) {
                a.swap(t, j);
                for row in a.iter_mut() {
                    row.swap(t, j);
                }
            } else if let Some(j) = (t + 1..n).find(|&j| !a[t][j].is_zero()) {
                // x_t := x_t + x_j makes the diagonal 2a_tj ≠ 0
                for c in 0..n {
                    let v = a[j][c].clone();
                    a[t][c] += v;
                }
                for r in 0..n {
                    let v = a[r][j].clone();
                    a[r][t] += v;
                }
            }
        }
        let p = a[t][t].clone();
        if p.is_zero() {
            zero += 1;
            continue;
        }
        if p.is_positive() {
            plus += 1;
        } else {
            minus += 1;
        }
        for i in t + 1..n {
            if a[i][t].is_zero() {
                continue;
            }
            let f = &a[i][t] / &p;
            for c in t..n {
                let v = &f * &a[t][c];
                a[i][c] -= v;
            }
            for r in t..n {
                let v = &f * &a[r][t];
                a[r][i] -= v;
            }
        }
    }
    (plus, minus, zero)
}

/// H₁ = coker(B) as free rank plus invariant factors greater than 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homology {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

pub fn first_homology(sp: &SurgeryPresentation) -> Homology {
    let snf = smith_normal_form(&to_big(&sp.matrix));
    let diag = snf.diagonal();
    Homology {
        free_rank: diag.iter().filter(|d| d.is_zero()).count(),
        torsion: diag.into_iter().filter(|d| !d.is_zero() && !d.is_one()).collect(),
    }
}

/// Z_C(M_G) = D^{|E|} · Z_A(G) with A the edge-weight matrix.
pub fn rt_graph_manifold(md: &ModularData, g: &Graph, budget: Budget) -> Result<CycNum> {
    require_anomaly_free(md)?;
    require_family_graph(g)?;
    let a = edge_weight_matrix(md)?;
    let z = partition_function(&a, g, budget)?;
    let d = md.global_d();
    let order = crate::cyclotomic::lcm_order(d.order(), z.order());
    Ok(&d.embed(order)?.pow(g.edge_count() as i64)? * &z.embed(order)?)
}

/// Z_{Z(C)}(M_G) through the center's graph formula. For pointed C the value
/// is also computed as Z_C(M_G)·Z_C(−M_G) by surgery; a mismatch is reported
/// as an internal error.
pub fn rt_center_product(md: &ModularData, g: &Graph, budget: Budget) -> Result<CycNum> {
    require_family_graph(g)?;
    let center = center_of_modular(md)?;
    let value = rt_graph_manifold(&center, g, budget)?;
    if is_pointed(md)?.pointed {
        let (mg, _) = metric_group_of_pointed(md)?;
        let sp = plumbing_presentation(g)?;
        let front = rt_pointed_surgery(&mg, md.global_d(), &sp)?;
        let back = rt_pointed_surgery(&mg, md.global_d(), &reverse_presentation(&sp))?;
        let order = crate::cyclotomic::lcm_order(front.order(), back.order());
        let product = &front.embed(order)? * &back.embed(order)?;
        if product != value {
            return Err(Error::Internal(format!(
                "center product mismatch: graph formula {} vs surgery product {}",
                value.to_token(),
                product.to_token()
            )));
        }
    }
    Ok(value)
}
