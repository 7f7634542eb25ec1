use crate::error::{Error, Result};

/// A finite simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    /// Sorted, each pair with `u < v`. An edge's id is its position here.
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidData(format!(
                    "edge {{{u},{v}}} outside vertex range 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidData(format!("loop at vertex {u}")));
            }
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidData(format!(
                "repeated edge {{{},{}}}",
                w[0].0, w[0].1
            )));
        }
        Ok(Graph { n, edges: list })
    }

    pub fn empty(n: usize) -> Self {
        Graph { n, edges: vec![] }
    }

    pub fn complete(n: usize) -> Self {
        Self::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|v| (v - 1, v))).unwrap()
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycles need three vertices");
        Self::new(n, (0..n).map(|v| (v, (v + 1) % n))).unwrap()
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(u, v) in &self.edges {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Incident edge ids per vertex, in increasing id order.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n];
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            inc[u].push(e);
            inc[v].push(e);
        }
        inc
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    /// Connected components as sorted vertex lists, ordered by least vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adj = self.neighbors();
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                for &w in &adj[comp[i]] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// First Betti number |E| − |V| + (#components).
    pub fn cycle_rank(&self) -> usize {
        self.edges.len() + self.components().len() - self.n
    }

    /// The subgraph induced on `vertices`, renumbered in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            pos[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| pos[u] != usize::MAX && pos[v] != usize::MAX)
            .map(|&(u, v)| (pos[u], pos[v]));
        Graph::new(vertices.len(), edges).expect("induced subgraph of a simple graph")
    }

    /// Vertices of `other` are shifted past those of `self`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.n;
        let edges = self
            .edges
            .iter()
            .copied()
            .chain(other.edges.iter().map(|&(u, v)| (u + shift, v + shift)));
        Graph::new(self.n + other.n, edges).expect("disjoint union is simple")
    }

    /// Image under a vertex permutation: vertex `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        Graph::new(self.n, self.edges.iter().map(|&(u, v)| (perm[u], perm[v])))
            .expect("permutation preserves simplicity")
    }

    /// Non-tree edges of the BFS spanning forest, in increasing id order.
    pub fn cotree_edges(&self) -> Vec<usize> {
        let inc = self.incidence();
        let mut seen = vec![false; self.n];
        let mut tree = vec![false; self.edges.len()];
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut queue = vec![s];
            let mut i = 0;
            while i < queue.len() {
                let u = queue[i];
                for &e in &inc[u] {
                    let (a, b) = self.edges[e];
                    let w = if a == u { b } else { a };
                    if !seen[w] {
                        seen[w] = true;
                        tree[e] = true;
                        queue.push(w);
                    }
                }
                i += 1;
            }
        }
        (0..self.edges.len()).filter(|&e| !tree[e]).collect()
    }
}
