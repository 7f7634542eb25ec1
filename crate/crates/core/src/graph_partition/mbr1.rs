use super::WeightMatrix;

/// One full rectangle R×C of the support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

/// Outcome of the multiplicative block-rank-one test.
///
/// `violation` is `(i, j, i', j')` with `i < i'`, `j < j'`: either a 2×2
/// submatrix whose support has exactly three entries (support not
/// rectangular) or one whose cross-ratio is not a root of unity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mbr1 {
    pub mbr1: bool,
    pub witness_r: Option<u64>,
    pub violation: Option<(usize, usize, usize, usize)>,
}

/// Splits the support into full rectangles, or `None` if it is not a
/// disjoint union of them. Blocks come from the connected components of the
/// bipartite row/column support graph, ordered by least row.
pub fn rectangular_blocks(a: &WeightMatrix) -> Option<Vec<Block>> {
    let k = a.size();
    let nz = |i: usize, j: usize| !a.get(i, j).is_zero();
    // union-find over rows 0..k and columns k..2k
    let mut parent: Vec<usize> = (0..2 * k).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..k {
        for j in 0..k {
            if nz(i, j) {
                let (x, y) = (find(&mut parent, i), find(&mut parent, k + j));
                parent[x] = y;
            }
        }
    }
    let mut blocks: Vec<(usize, Block)> = Vec::new();
    for i in 0..k {
        if !(0..k).any(|j| nz(i, j)) {
            continue;
        }
        let root = find(&mut parent, i);
        match blocks.iter_mut().find(|(r, _)| *r == root) {
            Some((_, b)) => b.rows.push(i),
            None => blocks.push((
                root,
                Block {
                    rows: vec![i],
                    cols: vec![],
                },
            )),
        }
    }
    for j in 0..k {
        if !(0..k).any(|i| nz(i, j)) {
            continue;
        }
        let root = find(&mut parent, k + j);
        let (_, b) = blocks.iter_mut().find(|(r, _)| *r == root)?;
        b.cols.push(j);
    }
    let blocks: Vec<Block> = blocks.into_iter().map(|(_, b)| b).collect();
    let full = blocks
        .iter()
        .all(|b| b.rows.iter().all(|&i| b.cols.iter().all(|&j| nz(i, j))));
    full.then_some(blocks)
}

/// Decides whether some Hadamard power A^{∘r} is block-rank-one.
///
/// Over a field A^{∘r} has the support of A, so the support must already be
/// rectangular. Inside a block with all entries nonzero, a matrix has rank
/// one iff every 2×2 minor vanishes, i.e. every cross-ratio
/// A_ij A_i'j' / (A_ij' A_i'j) equals 1. The cross-ratios of A^{∘r} are the
/// r-th powers of those of A, so a suitable r exists iff every cross-ratio is
/// a root of unity, and the least one is the lcm of their orders.
pub fn is_mbr1(a: &WeightMatrix) -> Mbr1 {
    let k = a.size();
    let Some(blocks) = rectangular_blocks(a) else {
        return Mbr1 {
            mbr1: false,
            witness_r: None,
            violation: Some(first_three_entry_minor(a)),
        };
    };
    let mut block_of_row = vec![usize::MAX; k];
    for (b, blk) in blocks.iter().enumerate() {
        for &i in &blk.rows {
            block_of_row[i] = b;
        }
    }
    let mut r: u64 = 1;
    for_each_quad(k, |i, j, i2, j2| {
        let b = block_of_row[i];
        if b == usize::MAX || b != block_of_row[i2] || a.get(i, j).is_zero() || a.get(i, j2).is_zero() {
            return None;
        }
        let num = a.get(i, j) * a.get(i2, j2);
        let den = a.get(i, j2) * a.get(i2, j);
        let ratio = &num * &den.inv().expect("in-block entries are nonzero");
        match ratio.root_of_unity_order() {
            Some(o) => {
                r = num_integer::lcm(r, o);
                None
            }
            None => Some((i, j, i2, j2)),
        }
    })
    .map_or(
        Mbr1 {
            mbr1: true,
            witness_r: Some(r),
            violation: None,
        },
        |v| Mbr1 {
            mbr1: false,
            witness_r: None,
            violation: Some(v),
        },
    )
}

/// Visits (i, j, i', j') with i < i', j < j' lexicographically; stops at the
/// first `Some`.
fn for_each_quad<T>(k: usize, mut f: impl FnMut(usize, usize, usize, usize) -> Option<T>) -> Option<T> {
    for i in 0..k {
        for j in 0..k {
            for i2 in i + 1..k {
                for j2 in j + 1..k {
                    if let Some(v) = f(i, j, i2, j2) {
                        return Some(v);
                    }
                }
            }
        }
    }
    None
}

/// A support that is not a union of full rectangles always contains a 2×2
/// submatrix with exactly three nonzero entries.
fn first_three_entry_minor(a: &WeightMatrix) -> (usize, usize, usize, usize) {
    for_each_quad(a.size(), |i, j, i2, j2| {
        let count = [(i, j), (i, j2), (i2, j), (i2, j2)]
            .iter()
            .filter(|&&(x, y)| !a.get(x, y).is_zero())
            .count();
        (count == 3).then_some((i, j, i2, j2))
    })
    .expect("non-rectangular support has an L-shaped minor")
}

#[cfg(test)]
fn is_rank_one_block(a: &WeightMatrix, blk: &Block) -> bool {
    let rows: Vec<Vec<crate::CycNum>> = blk
        .rows
        .iter()
        .map(|&i| blk.cols.iter().map(|&j| a.get(i, j).clone()).collect())
        .collect();
    super::rank_of(rows) <= 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> WeightMatrix {
        WeightMatrix::from_integers(rows).unwrap()
    }

    #[test]
    fn blocks() {
        let full = rectangular_blocks(&m(&[&[1, 1], &[1, -1]])).unwrap();
        assert_eq!(full, vec![Block { rows: vec![0, 1], cols: vec![0, 1] }]);
        let diag = rectangular_blocks(&m(&[&[1, 0], &[0, 1]])).unwrap();
        assert_eq!(diag.len(), 2);
        assert!(rectangular_blocks(&m(&[&[1, 1], &[1, 0]])).is_none());
        assert_eq!(rectangular_blocks(&m(&[&[0, 0], &[0, 0]])).unwrap(), vec![]);
    }

    #[test]
    fn decisions() {
        let semion = is_mbr1(&m(&[&[1, 1], &[1, -1]]));
        assert_eq!((semion.mbr1, semion.witness_r), (true, Some(2)));
        let ones = is_mbr1(&m(&[&[1, 1], &[1, 1]]));
        assert_eq!(ones.witness_r, Some(1));
        let ell = is_mbr1(&m(&[&[1, 1], &[1, 0]]));
        assert_eq!(ell.violation, Some((0, 0, 1, 1)));
        let two = is_mbr1(&m(&[&[1, 1], &[1, 2]]));
        assert!(!two.mbr1);
        assert_eq!(is_mbr1(&m(&[&[0, 0], &[0, 0]])).witness_r, Some(1));
    }

    #[test]
    fn rank_one_blocks_after_power() {
        let a = m(&[&[1, 1, 0], &[1, -1, 0], &[0, 0, 3]]);
        let res = is_mbr1(&a);
        assert_eq!(res.witness_r, Some(2));
        let p = a.hadamard_power(2).unwrap();
        for blk in rectangular_blocks(&p).unwrap() {
            assert!(is_rank_one_block(&p, &blk));
        }
    }
}
