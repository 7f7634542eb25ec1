//! Reference datasets: semion, toric code, Fibonacci, Ising, doubled semion.

use super::{center_of_modular, ModularData, ModularParts};
use crate::cyclotomic::CycNum;

fn z(n: u32, k: i64) -> CycNum {
    CycNum::root(n, k)
}

fn int(n: u32, v: i64) -> CycNum {
    CycNum::from_int(n, v)
}

fn build(conductor: u32, dual: Vec<usize>, s: Vec<Vec<CycNum>>, theta: Vec<CycNum>, d: CycNum) -> ModularData {
    ModularData::new(ModularParts {
        conductor,
        dual,
        s,
        theta,
        global_d: d,
    })
    .expect("bundled data is well-formed")
}

/// Semion: S = [[1,1],[1,-1]], θ = (1, i), D = √2 over Q(ζ₈).
pub fn semion() -> ModularData {
    let n = 8;
    build(
        n,
        vec![0, 1],
        vec![vec![int(n, 1), int(n, 1)], vec![int(n, 1), int(n, -1)]],
        vec![int(n, 1), z(n, 2)],
        &z(n, 1) - &z(n, 3),
    )
}

/// Toric code on Z₂×Z₂ with label 2a+b for (a,b).
pub fn toric_code() -> ModularData {
    let n = 2;
    let sign = |e: usize| int(n, if e.is_multiple_of(2) { 1 } else { -1 });
    let coords = |x: usize| (x / 2, x % 2);
    let s = (0..4)
        .map(|x| {
            (0..4)
                .map(|y| {
                    let ((a, b), (c, d)) = (coords(x), coords(y));
                    sign(a * d + b * c)
                })
                .collect()
        })
        .collect();
    let theta = (0..4)
        .map(|x| {
            let (a, b) = coords(x);
            sign(a * b)
        })
        .collect();
    build(n, vec![0, 1, 2, 3], s, theta, int(n, 2))
}

/// Fibonacci over Q(ζ₂₀): φ = 1+ζ₅+ζ₅⁴, θ_τ = ζ₅², D = 2cos(π/10).
pub fn fibonacci() -> ModularData {
    let n = 20;
    let golden = &(&int(n, 1) + &z(n, 4)) + &z(n, 16);
    build(
        n,
        vec![0, 1],
        vec![vec![int(n, 1), golden.clone()], vec![golden, int(n, -1)]],
        vec![int(n, 1), z(n, 8)],
        &z(n, 1) + &z(n, 19),
    )
}

/// Ising over Q(ζ₁₆) with labels 1, σ, ψ.
pub fn ising() -> ModularData {
    let n = 16;
    let r2 = &z(n, 2) + &z(n, 14);
    let zero = CycNum::zero(n);
    build(
        n,
        vec![0, 1, 2],
        vec![
            vec![int(n, 1), r2.clone(), int(n, 1)],
            vec![r2.clone(), zero, -&r2],
            vec![int(n, 1), -&r2, int(n, 1)],
        ],
        vec![int(n, 1), z(n, 1), int(n, -1)],
        int(n, 2),
    )
}

/// Semion ⊠ semion^rev.
pub fn doubled_semion() -> ModularData {
    center_of_modular(&semion()).expect("semion is valid")
}

/// Fibonacci ⊠ Fibonacci^rev.
pub fn doubled_fibonacci() -> ModularData {
    center_of_modular(&fibonacci()).expect("Fibonacci is valid")
}

/// The five reference datasets with their names.
pub fn all() -> Vec<(&'static str, ModularData)> {
    vec![
        ("semion", semion()),
        ("toric", toric_code()),
        ("fibonacci", fibonacci()),
        ("ising", ising()),
        ("doubled-semion", doubled_semion()),
    ]
}
