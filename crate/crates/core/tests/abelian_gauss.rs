use num_bigint::BigInt;
use proptest::prelude::*;
use rtdich::abelian_gauss::*;
use rtdich::graph_manifolds::{plumbing_presentation, SurgeryPresentation};
use rtdich::graph_partition::Graph;
use rtdich::modular_data::bundled::{semion, toric_code};
use rtdich::{Budget, CycNum};

fn int(n: i64) -> CycNum {
    CycNum::from_int(1, n)
}

/// Σ_{x ∈ Λᵐ} Π_i q(x_i)^{B_ii} Π_{i<j} b(x_i, x_j)^{B_ij}, straight from the table.
fn naive_gauss(mg: &MetricGroup, b: &[Vec<i64>]) -> CycNum {
    let g = mg.group();
    let n = mg.modulus() as i64;
    let size = g.size();
    let m = b.len();
    let mut counts = vec![BigInt::from(0); n as usize];
    let mut x = vec![0usize; m];
    loop {
        let mut e: i64 = 0;
        for i in 0..m {
            e += b[i][i] * mg.qexp(x[i]) as i64;
            for j in i + 1..m {
                let bij = mg.qexp(g.add(x[i], x[j])) as i64 - mg.qexp(x[i]) as i64 - mg.qexp(x[j]) as i64;
                e += b[i][j] * bij;
            }
        }
        counts[e.rem_euclid(n) as usize] += 1;
        let mut t = m;
        loop {
            if t == 0 {
                return CycNum::from_exponent_counts(n as u32, &counts);
            }
            t -= 1;
            x[t] += 1;
            if x[t] < size {
                break;
            }
            x[t] = 0;
        }
    }
}

fn semion_mg() -> MetricGroup {
    MetricGroup::new(FinAbGroup::cyclic(2), 4, vec![0, 1]).unwrap()
}

fn toric_mg() -> MetricGroup {
    hyperbolic_center(&FinAbGroup::cyclic(2))
}

fn hyp3() -> MetricGroup {
    hyperbolic_center(&FinAbGroup::cyclic(3))
}

#[test]
fn smith_form_examples() {
    let s = smith_normal_form(&to_big(&[vec![2, 4], vec![6, 8]]));
    assert_eq!(s.diagonal(), vec![BigInt::from(2), BigInt::from(4)]);
    let s = smith_normal_form(&to_big(&[vec![4, 0], vec![0, 6]]));
    assert_eq!(s.diagonal(), vec![BigInt::from(2), BigInt::from(12)]);
    let m = to_big(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 0]]);
    let s = smith_normal_form(&m);
    assert_eq!(s.rank(), 2);
    assert_eq!(mat_mul(&mat_mul(&s.u, &m), &s.v), s.d);
}

#[test]
fn semion_gauss_sums() {
    let mg = semion_mg();
    assert_eq!(gauss_sum_fast(&mg, &[vec![1]]).unwrap(), &CycNum::one(4) + &CycNum::root(4, 1));
    assert_eq!(gauss_sum_fast(&mg, &[vec![0]]).unwrap(), int(2));
    assert_eq!(gauss_sum_bracket(&mg, &[vec![1]], Budget::default()).unwrap(), naive_gauss(&mg, &[vec![1]]));
}

#[test]
fn toric_plumbing_of_k2_gives_1024() {
    let sp = plumbing_presentation(&Graph::complete(2)).unwrap();
    let mg = toric_mg();
    assert_eq!(gauss_sum_fast(&mg, sp.matrix()).unwrap(), int(1024));
    assert_eq!(gauss_sum_bracket(&mg, sp.matrix(), Budget::default()).unwrap(), int(1024));
}

#[test]
fn hyp3_routes_agree() {
    let mg = hyp3();
    assert_eq!(mg.modulus(), 18);
    let (plus, minus) = mg.gauss_pair();
    assert_eq!((plus, minus), (int(3), int(3)));
    for b in [
        vec![vec![1]],
        vec![vec![2, 1], vec![1, -1]],
        vec![vec![0, 1, 0], vec![1, 0, 1], vec![0, 1, 3]],
    ] {
        let fast = gauss_sum_fast(&mg, &b).unwrap();
        assert_eq!(fast, gauss_sum_bracket(&mg, &b, Budget::default()).unwrap());
        assert_eq!(fast, naive_gauss(&mg, &b));
    }
}

#[test]
fn surgery_values() {
    let d_semion = semion().global_d().clone();
    let mg = semion_mg();
    let inv_d = d_semion.inv().unwrap();
    assert_eq!(rt_pointed_surgery(&mg, &d_semion, &SurgeryPresentation::empty()).unwrap(), inv_d);
    let unknot = SurgeryPresentation::from_matrix(vec![vec![1]]).unwrap();
    assert_eq!(rt_pointed_surgery(&mg, &d_semion, &unknot).unwrap(), inv_d);
    let unknot = SurgeryPresentation::from_matrix(vec![vec![-1]]).unwrap();
    assert_eq!(rt_pointed_surgery(&mg, &d_semion, &unknot).unwrap(), inv_d);
    let sp = plumbing_presentation(&Graph::complete(2)).unwrap();
    assert_eq!(rt_pointed_surgery(&toric_mg(), &int(2), &sp).unwrap(), int(8));
}

#[test]
fn surgery_rejects_wrong_normalization() {
    let sp = SurgeryPresentation::empty();
    assert!(matches!(
        rt_pointed_surgery(&toric_mg(), &int(3), &sp),
        Err(rtdich::Error::Precondition(_))
    ));
}

#[test]
fn pointed_data_round_trip() {
    let md = pointed_modular_from_metric(&semion_mg(), semion().global_d()).unwrap();
    assert_eq!(md, semion());
    let md = pointed_modular_from_metric(&toric_mg(), &int(2)).unwrap();
    assert_eq!(md, toric_code());
    for md in [semion(), toric_code()] {
        let (mg, labels) = metric_group_of_pointed(&md).unwrap();
        assert!(mg.validate().all_passed());
        assert_eq!(labels[0], 0);
        for (i, &x) in labels.iter().enumerate() {
            assert_eq!(&mg.q(x), md.theta(i));
        }
    }
}

#[test]
fn hyperbolic_centers() {
    assert_eq!(toric_mg().group().orders(), &[2, 2]);
    let t = hyperbolic_center(&FinAbGroup::trivial());
    assert_eq!(t.group().size(), 1);
    assert_eq!(t.gauss_pair(), (int(1), int(1)));
    // another identification of the dual group gives isomorphic data with equal invariants
    let alt = hyperbolic_center_with_pairing(&FinAbGroup::cyclic(3), &[vec![2]]).unwrap();
    assert_eq!(alt.gauss_pair(), hyp3().gauss_pair());
    let swap = hyperbolic_center_with_pairing(&FinAbGroup::new(vec![2, 2]).unwrap(), &[vec![0, 1], vec![1, 0]]).unwrap();
    let plain = hyperbolic_center(&FinAbGroup::new(vec![2, 2]).unwrap());
    assert_eq!(swap.gauss_pair(), plain.gauss_pair());
    let sp = plumbing_presentation(&Graph::path(3)).unwrap();
    assert_eq!(
        rt_pointed_surgery(&alt, &int(3), &sp).unwrap(),
        rt_pointed_surgery(&hyp3(), &int(3), &sp).unwrap()
    );
    assert!(hyperbolic_center_with_pairing(&FinAbGroup::cyclic(2), &[vec![0]]).is_err());
}

#[test]
fn turaev_viro_of_trivial_cocycle() {
    let z2 = FinAbGroup::cyclic(2);
    let k2 = Graph::complete(2);
    assert_eq!(tv_pointed_trivial(&z2, TvInput::Graph(&k2), Budget::default()).unwrap(), int(8));
    let empty = SurgeryPresentation::empty();
    let half = CycNum::from_coeffs(1, vec![num_rational::BigRational::new(1.into(), 2.into())]).unwrap();
    assert_eq!(tv_pointed_trivial(&z2, TvInput::Presentation(&empty), Budget::default()).unwrap(), half);
    let t = FinAbGroup::trivial();
    assert_eq!(tv_pointed_trivial(&t, TvInput::Graph(&k2), Budget::default()).unwrap(), int(1));
}

#[test]
fn kernel_examples() {
    // x + y ≡ 0 mod 2 on Z_2², weight i^{x²}
    let h = IntMatrixModOrders::cyclic(vec![vec![1, 1]], 2, 2).unwrap();
    let mut q = QuadExpWeight::zero(4, 2);
    q.add_quad(0, 0, 1);
    let fast = kernel_quadratic_sum(&h, &q).unwrap();
    assert_eq!(fast, kernel_quadratic_sum_brute(&h, &q, Budget::default()).unwrap());
    assert_eq!(fast, &CycNum::one(4) + &CycNum::root(4, 1));
    let k = kernel_parametrization(&h);
    assert_eq!(k.orders.iter().product::<u64>(), 2);
}

// random metric groups: orthogonal sums of cyclic forms u·x² mod 2n and the
// anisotropic form on Z_2² taking -1 on every nonzero element

#[derive(Debug, Clone)]
enum Factor {
    Cyclic { n: u64, u: u64 },
    Anisotropic,
}

fn factor() -> impl Strategy<Value = Factor> {
    prop_oneof![
        (1u64..=8, 1u64..16).prop_filter_map("unit multiplier", |(n, u)| {
            let u = u % (2 * n);
            (num_integer::gcd(u, n) == 1 && (u * n) % 2 == 0).then_some(Factor::Cyclic { n, u })
        }),
        Just(Factor::Anisotropic),
    ]
}

fn build_metric(factors: &[Factor]) -> MetricGroup {
    let mut orders = Vec::new();
    let mut modulus = 1u64;
    for f in factors {
        match *f {
            Factor::Cyclic { n, .. } => {
                orders.push(n);
                modulus = num_integer::lcm(modulus, 2 * n);
            }
            Factor::Anisotropic => {
                orders.extend([2, 2]);
                modulus = num_integer::lcm(modulus, 2);
            }
        }
    }
    let group = FinAbGroup::new(orders).unwrap();
    MetricGroup::from_fn(group, modulus, |c| {
        let mut e = 0i64;
        let mut at = 0;
        for f in factors {
            match *f {
                Factor::Cyclic { n, u } => {
                    e += (modulus / (2 * n)) as i64 * (u * c[at] * c[at]) as i64;
                    at += 1;
                }
                Factor::Anisotropic => {
                    if c[at] != 0 || c[at + 1] != 0 {
                        e += (modulus / 2) as i64;
                    }
                    at += 2;
                }
            }
        }
        e
    })
    .unwrap()
}

fn metric_group() -> impl Strategy<Value = MetricGroup> {
    prop::collection::vec(factor(), 1..=3)
        .prop_map(|fs| build_metric(&fs))
        .prop_filter("order at most 16", |mg| mg.group().size() <= 16)
}

fn symmetric_matrix(max: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max).prop_flat_map(|m| {
        prop::collection::vec(-3i64..=3, m * (m + 1) / 2).prop_map(move |v| {
            let mut b = vec![vec![0; m]; m];
            let mut it = v.into_iter();
            for i in 0..m {
                for j in i..m {
                    let x = it.next().unwrap();
                    b[i][j] = x;
                    b[j][i] = x;
                }
            }
            b
        })
    })
}

/// A well-defined weight and map on random cyclic source/target orders.
fn kernel_instance() -> impl Strategy<Value = (IntMatrixModOrders, QuadExpWeight)> {
    (
        prop::collection::vec(1u64..=6, 1..=4),
        prop::collection::vec(1u64..=6, 0..=3),
        prop::collection::vec(-8i64..=8, 64),
    )
        .prop_filter("source at most 2^16", |(a, _, _)| a.iter().product::<u64>() <= 1 << 16)
        .prop_map(|(a, b, noise)| {
            let mut r = noise.into_iter().cycle();
            let matrix: Vec<Vec<i64>> = b
                .iter()
                .map(|&br| {
                    a.iter()
                        .map(|&ac| r.next().unwrap() * (br / num_integer::gcd(ac, br)) as i64)
                        .collect()
                })
                .collect();
            let h = IntMatrixModOrders::new(matrix, a.clone(), b).unwrap();
            let l = a.iter().fold(1u64, |x, &y| num_integer::lcm(x, y));
            let mut q = QuadExpWeight::zero(2 * l, a.len());
            for i in 0..a.len() {
                let k = r.next().unwrap();
                q.add_quad(i, i, k * (l / a[i]) as i64);
                let m = r.next().unwrap() * 2 + (k * a[i] as i64).rem_euclid(2);
                q.add_linear(i, m * (l / a[i]) as i64);
                for j in i + 1..a.len() {
                    let step = 2 * l / num_integer::gcd(a[i], a[j]);
                    q.add_quad(i, j, r.next().unwrap() * step as i64);
                }
            }
            q.add_constant(r.next().unwrap());
            (h, q)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn random_metric_groups_are_valid(mg in metric_group()) {
        prop_assert!(mg.validate().all_passed());
    }

    #[test]
    fn fast_gauss_matches_bracket(mg in metric_group(), b in symmetric_matrix(4)) {
        let size = mg.group().size();
        prop_assume!(size.pow(b.len() as u32) <= 1 << 16);
        let fast = gauss_sum_fast(&mg, &b).unwrap();
        prop_assert_eq!(&fast, &gauss_sum_bracket(&mg, &b, Budget::default()).unwrap());
        prop_assert_eq!(&fast, &naive_gauss(&mg, &b));
    }

    #[test]
    fn kernel_fast_matches_brute((h, q) in kernel_instance()) {
        q.check_orders(h.source()).unwrap();
        let fast = kernel_quadratic_sum(&h, &q).unwrap();
        prop_assert_eq!(fast, kernel_quadratic_sum_brute(&h, &q, Budget::default()).unwrap());
    }

    #[test]
    fn kernel_parametrization_spans_kernel((h, _q) in kernel_instance()) {
        let k = kernel_parametrization(&h);
        let kernel_size = {
            let mut count = 0u64;
            let n = h.source().len();
            let mut x = vec![0i64; n];
            'outer: loop {
                if h.apply(&x).iter().all(|&v| v == 0) {
                    count += 1;
                }
                let mut t = n;
                loop {
                    if t == 0 {
                        break 'outer;
                    }
                    t -= 1;
                    x[t] += 1;
                    if (x[t] as u64) < h.source()[t] {
                        break;
                    }
                    x[t] = 0;
                }
            }
            count
        };
        prop_assert_eq!(k.orders.iter().product::<u64>(), kernel_size);
        for col in 0..k.orders.len() {
            let g: Vec<i64> = k.generators.iter().map(|row| row[col]).collect();
            prop_assert!(h.apply(&g).iter().all(|&v| v == 0));
        }
    }

    #[test]
    fn orthogonal_sum_multiplies_gauss_pairs(a in metric_group(), b in metric_group()) {
        prop_assume!(a.group().size() * b.group().size() <= 64);
        // q on the product, with the last coordinates belonging to b
        let ra = a.group().rank();
        let group = a.group().product(b.group());
        let modulus = num_integer::lcm(a.modulus(), b.modulus());
        let (sa, sb) = (modulus / a.modulus(), modulus / b.modulus());
        let ga = a.group().clone();
        let gb = b.group().clone();
        let sum = MetricGroup::from_fn(group, modulus, |c| {
            let ca: Vec<i64> = c[..ra].iter().map(|&v| v as i64).collect();
            let cb: Vec<i64> = c[ra..].iter().map(|&v| v as i64).collect();
            (sa * a.qexp(ga.index(&ca)) + sb * b.qexp(gb.index(&cb))) as i64
        }).unwrap();
        let (pa, ma) = a.gauss_pair();
        let (pb, mb) = b.gauss_pair();
        let (ps, ms) = sum.gauss_pair();
        let n = ps.order();
        prop_assert_eq!(ps, &pa.embed(n).unwrap() * &pb.embed(n).unwrap());
        prop_assert_eq!(ms, &ma.embed(n).unwrap() * &mb.embed(n).unwrap());
    }
}
