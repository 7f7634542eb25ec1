use proptest::prelude::*;
use rtdich::graph_partition::*;
use rtdich::modular_data::bundled::*;
use rtdich::modular_data::{deligne_product, is_pointed, reverse_data};
use rtdich::{Budget, CycNum};

fn int(v: i64) -> CycNum {
    CycNum::from_int(1, v)
}

/// Literal sum over all |I|^|V| assignments of the whole graph, no
/// component splitting and no pruning.
fn naive_partition(a: &WeightMatrix, g: &Graph) -> CycNum {
    let k = a.size();
    let n = g.vertex_count();
    let mut total = CycNum::zero(a.order());
    let mut sigma = vec![0usize; n];
    loop {
        let mut term = CycNum::one(a.order());
        for &(u, v) in g.edges() {
            term = &term * a.get(sigma[u], sigma[v]);
        }
        total = &total + &term;
        let mut t = n;
        loop {
            if t == 0 {
                return total;
            }
            t -= 1;
            sigma[t] += 1;
            if sigma[t] < k {
                break;
            }
            sigma[t] = 0;
        }
    }
}

#[test]
fn weight_matrices_of_bundled_data() {
    let semion = edge_weight_matrix(&semion()).unwrap();
    assert_eq!(semion, WeightMatrix::from_integers(&[&[1, 1], &[1, -1]]).unwrap());

    let toric = edge_weight_matrix(&toric_code()).unwrap();
    for x in 0..4usize {
        for y in 0..4usize {
            let e = (x / 2) * (y % 2) + (x % 2) * (y / 2);
            assert_eq!(toric.get(x, y), &int(if e % 2 == 0 { 1 } else { -1 }));
        }
    }

    let fib = edge_weight_matrix(&fibonacci()).unwrap();
    let golden = &(&CycNum::one(20) + &CycNum::root(20, 4)) + &CycNum::root(20, 16);
    let expected = &golden - &CycNum::from_int(20, 2);
    assert_eq!(fib.get(1, 1), &expected);
    // φ − 2 = −1/φ²
    assert_eq!(&(&expected * &golden) * &golden, CycNum::from_int(20, -1));
    assert_eq!(fib.get(0, 1), &int(1));

    for (name, md) in all() {
        let a = edge_weight_matrix(&md).unwrap();
        assert!(a.is_symmetric(), "{name}");
        for j in 0..a.size() {
            assert!(a.get(0, j).is_one() && a.get(j, 0).is_one(), "{name}");
        }
    }
}

#[test]
fn small_partition_functions() {
    let semion = edge_weight_matrix(&semion()).unwrap();
    let b = Budget::default();
    assert!(partition_function(&semion, &Graph::complete(3), b).unwrap().is_zero());
    let toric = edge_weight_matrix(&toric_code()).unwrap();
    assert_eq!(partition_function(&toric, &Graph::complete(2), b).unwrap(), int(4));
    for (_, md) in all() {
        let a = edge_weight_matrix(&md).unwrap();
        let v = partition_function(&a, &Graph::empty(1), b).unwrap();
        assert_eq!(v, int(a.size() as i64));
        assert!(partition_function(&a, &Graph::empty(0), b).unwrap().is_one());
    }
}

#[test]
fn fast_paths_agree_with_naive_sum() {
    let mut weights: Vec<WeightMatrix> = all().iter().map(|(_, md)| edge_weight_matrix(md).unwrap()).collect();
    weights.push(WeightMatrix::from_integers(&[&[3, -1, 0], &[-1, 2, 5], &[0, 5, -4]]).unwrap());
    for a in &weights {
        for g in connected_graphs(4) {
            let expected = naive_partition(a, &g);
            assert_eq!(partition_function(a, &g, Budget::default()).unwrap(), expected);
            assert_eq!(partition_function_rational(a, &g, Budget::default()).unwrap(), expected);
        }
    }
}

#[test]
fn integer_overflow_falls_back_to_rationals() {
    let big = 1i64 << 40;
    let a = WeightMatrix::from_integers(&[&[big, 1], &[1, big]]).unwrap();
    let g = Graph::complete(4);
    assert_eq!(partition_function(&a, &g, Budget::default()).unwrap(), naive_partition(&a, &g));
}

#[test]
fn budget_counts_the_largest_component() {
    let a = WeightMatrix::from_integers(&[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]]).unwrap();
    let g = Graph::path(3).disjoint_union(&Graph::path(3));
    // 3^3 = 27 per component fits in 2^5 even though 3^6 does not
    assert_eq!(partition_function(&a, &g, Budget(5)).unwrap(), int(729));
    assert!(partition_function(&a, &Graph::path(4), Budget(5)).is_err());
}

#[test]
fn mbr1_examples() {
    let semion = is_mbr1(&edge_weight_matrix(&semion()).unwrap());
    assert_eq!(semion, Mbr1 { mbr1: true, witness_r: Some(2), violation: None });
    let fib = is_mbr1(&edge_weight_matrix(&fibonacci()).unwrap());
    assert_eq!(fib, Mbr1 { mbr1: false, witness_r: None, violation: Some((0, 0, 1, 1)) });
    let ising_a = edge_weight_matrix(&ising()).unwrap();
    assert!(rectangular_blocks(&ising_a).is_none());
    let ising = is_mbr1(&ising_a);
    assert_eq!(ising.violation, Some((0, 0, 1, 1)));
    assert!(!ising.mbr1);
    let ones = WeightMatrix::from_integers(&[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]]).unwrap();
    assert_eq!(is_mbr1(&ones).witness_r, Some(1));
}

#[test]
fn mbr1_matches_pointedness() {
    let mut sets = all();
    sets.push(("doubled-fibonacci", doubled_fibonacci()));
    for (name, md) in sets {
        let a = edge_weight_matrix(&md).unwrap();
        assert_eq!(is_mbr1(&a).mbr1, is_pointed(&md).unwrap().pointed, "{name}");
    }
}

/// Block-rank-one checked directly: each support block of A^{∘r} has rank one.
fn block_rank_one(a: &WeightMatrix) -> bool {
    let Some(blocks) = rectangular_blocks(a) else {
        return false;
    };
    blocks.iter().all(|b| {
        let rows = b
            .rows
            .iter()
            .map(|&i| b.cols.iter().map(|&j| a.get(i, j).clone()).collect())
            .collect();
        WeightMatrix::new(rows).is_ok_and(|m| m.rank() <= 1)
    })
}

#[test]
fn witness_r_matches_explicit_hadamard_powers() {
    for (name, md) in all() {
        let a = edge_weight_matrix(&md).unwrap();
        let res = is_mbr1(&a);
        let first = (1..=24u32).find(|&r| block_rank_one(&a.hadamard_power(r).unwrap()));
        assert_eq!(first.map(u64::from), res.witness_r, "{name}");
    }
}

#[test]
fn deligne_weights_are_kronecker_products() {
    let (s, f) = (semion(), fibonacci());
    let prod = edge_weight_matrix(&deligne_product(&s, &f).unwrap()).unwrap();
    let kron = edge_weight_matrix(&s).unwrap().kronecker(&edge_weight_matrix(&f).unwrap()).unwrap();
    assert_eq!(prod, kron);
    let rev = reverse_data(&f).unwrap();
    let prod = edge_weight_matrix(&deligne_product(&f, &rev).unwrap()).unwrap();
    let kron = edge_weight_matrix(&f).unwrap().kronecker(&edge_weight_matrix(&rev).unwrap()).unwrap();
    assert_eq!(prod, kron);
}

fn small_graph() -> impl Strategy<Value = Graph> {
    (1usize..=5).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        proptest::sample::subsequence(pairs.clone(), 0..=pairs.len()).prop_map(move |e| Graph::new(n, e).unwrap())
    })
}

fn bundled_weights() -> impl Strategy<Value = WeightMatrix> {
    (0usize..5).prop_map(|i| edge_weight_matrix(&all()[i].1).unwrap())
}

fn int_weights() -> impl Strategy<Value = WeightMatrix> {
    (1usize..=3).prop_flat_map(|k| {
        proptest::collection::vec(-3i64..=3, k * (k + 1) / 2).prop_map(move |upper| {
            let mut rows = vec![vec![0i64; k]; k];
            let mut it = upper.into_iter();
            for i in 0..k {
                for j in i..k {
                    let v = it.next().unwrap();
                    rows[i][j] = v;
                    rows[j][i] = v;
                }
            }
            let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
            WeightMatrix::from_integers(&refs).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn multiplicative_over_disjoint_union(a in bundled_weights(), g in small_graph(), h in small_graph()) {
        let b = Budget::default();
        let whole = partition_function(&a, &g.disjoint_union(&h), b).unwrap();
        let parts = &partition_function(&a, &g, b).unwrap() * &partition_function(&a, &h, b).unwrap();
        prop_assert_eq!(whole, parts);
    }

    #[test]
    fn kronecker_factorizes(a in int_weights(), c in int_weights(), g in small_graph()) {
        let b = Budget::default();
        let kron = partition_function(&a.kronecker(&c).unwrap(), &g, b).unwrap();
        let product = &partition_function(&a, &g, b).unwrap() * &partition_function(&c, &g, b).unwrap();
        prop_assert_eq!(kron, product);
    }

    #[test]
    fn relabeling_invariance(a in int_weights(), g in small_graph(), seed in any::<u64>()) {
        let n = g.vertex_count();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let b = Budget::default();
        prop_assert_eq!(
            partition_function(&a, &g, b).unwrap(),
            partition_function(&a, &g.permuted(&perm), b).unwrap()
        );
        let mut lp: Vec<usize> = (0..a.size()).collect();
        lp.reverse();
        prop_assert_eq!(
            partition_function(&a, &g, b).unwrap(),
            partition_function(&a.permuted(&lp), &g, b).unwrap()
        );
    }

    #[test]
    fn mbr1_is_permutation_invariant(a in int_weights(), which in 0usize..5, flip in any::<bool>()) {
        let a = if flip { edge_weight_matrix(&all()[which].1).unwrap() } else { a };
        let mut perm: Vec<usize> = (0..a.size()).collect();
        perm.rotate_left(1);
        let (x, y) = (is_mbr1(&a), is_mbr1(&a.permuted(&perm)));
        prop_assert_eq!(x.mbr1, y.mbr1);
        prop_assert_eq!(x.witness_r, y.witness_r);
    }
}
