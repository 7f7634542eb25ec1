use std::collections::BTreeSet;

use super::Graph;

/// All simple graphs on `n` vertices up to isomorphism, each in the form
/// whose edge bitmask is least over vertex relabelings.
pub fn graphs_up_to_isomorphism(n: usize) -> Vec<Graph> {
    assert!(n <= 6, "exhaustive enumeration is meant for tiny graphs");
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut index = vec![vec![0usize; n]; n];
    for (e, &(u, v)) in pairs.iter().enumerate() {
        index[u][v] = e;
        index[v][u] = e;
    }
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    for mask in 0u32..(1 << pairs.len()) {
        let canon = perms
            .iter()
            .map(|p| {
                pairs
                    .iter()
                    .enumerate()
                    .filter(|&(e, _)| mask >> e & 1 == 1)
                    .fold(0u32, |acc, (_, &(u, v))| acc | 1 << index[p[u]][p[v]])
            })
            .min()
            .unwrap_or(mask);
        seen.insert(canon);
    }
    seen.into_iter()
        .map(|mask| {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|&(e, _)| mask >> e & 1 == 1)
                .map(|(_, &p)| p);
            Graph::new(n, edges).expect("pairs are distinct")
        })
        .collect()
}

/// Connected graphs on 1..=max_vertices vertices up to isomorphism.
pub fn connected_graphs(max_vertices: usize) -> Vec<Graph> {
    (1..=max_vertices)
        .flat_map(graphs_up_to_isomorphism)
        .filter(Graph::is_connected)
        .collect()
}

pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    heap(n, &mut cur, &mut out);
    out.sort();
    out
}

fn heap(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(cur.clone());
        return;
    }
    for i in 0..k - 1 {
        heap(k - 1, cur, out);
        if k.is_multiple_of(2) {
            cur.swap(i, k - 1);
        } else {
            cur.swap(0, k - 1);
        }
    }
    heap(k - 1, cur, out);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_counts() {
        let counts: Vec<usize> = (1..=5).map(|n| graphs_up_to_isomorphism(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 4, 11, 34]);
        let connected: Vec<usize> = (1..=5)
            .map(|n| connected_graphs(n).iter().filter(|g| g.vertex_count() == n).count())
            .collect();
        assert_eq!(connected, vec![1, 1, 2, 6, 21]);
        assert_eq!(permutations(4).len(), 24);
    }
}
