//! Normalized 3-cocycles ω: Λ³ → μ_N on finite abelian groups, the
//! alternating form ψ(ω), and the tractability classifiers.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::abelian_gauss::FinAbGroup;
use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};
use crate::graph_partition::{edge_weight_matrix, is_mbr1, Mbr1};
use crate::modular_data::{is_pointed, ModularData, Pointedness};
use crate::validation::ValidationReport;

pub const CHECK_NORMALIZED: &str = "omega normalized";
pub const CHECK_COCYCLE: &str = "3-cocycle identity";

/// Largest |Λ|⁴ for which the cocycle identity is checked on every quadruple.
const EXHAUSTIVE_LIMIT: usize = 1 << 16;
const SAMPLES: usize = 1 << 16;
const SAMPLE_SEED: u64 = 0x5eed_c0c1;

/// ω(x, y, z) = ζ_N^{table[x, y, z]} with elements indexed as in [`FinAbGroup`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cocycle {
    group: FinAbGroup,
    modulus: u64,
    table: Vec<u64>,
}

impl Cocycle {
    /// `table[(x·|Λ| + y)·|Λ| + z]` is the exponent of ω(x, y, z).
    pub fn new(group: FinAbGroup, modulus: u64, table: Vec<i64>) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidData("modulus must be positive".into()));
        }
        let s = group.size();
        if table.len() != s * s * s {
            return Err(Error::Shape(format!(
                "cocycle table has {} entries, expected {}",
                table.len(),
                s * s * s
            )));
        }
        let table = table.iter().map(|&e| e.rem_euclid(modulus as i64) as u64).collect();
        Ok(Cocycle { group, modulus, table })
    }

    pub fn from_fn(group: FinAbGroup, modulus: u64, f: impl Fn(&[u64], &[u64], &[u64]) -> i64) -> Result<Self> {
        let s = group.size();
        let coords: Vec<Vec<u64>> = (0..s).map(|x| group.coords(x)).collect();
        let mut table = Vec::with_capacity(s * s * s);
        for x in &coords {
            for y in &coords {
                for z in &coords {
                    table.push(f(x, y, z));
                }
            }
        }
        Cocycle::new(group, modulus, table)
    }

    /// ω ≡ 1.
    pub fn trivial(group: FinAbGroup) -> Self {
        let s = group.size();
        Cocycle {
            group,
            modulus: 1,
            table: vec![0; s * s * s],
        }
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    fn at(&self, x: usize, y: usize, z: usize) -> u64 {
        let s = self.group.size();
        self.table[(x * s + y) * s + z]
    }

    pub fn exponent(&self, x: usize, y: usize, z: usize) -> u64 {
        self.at(x, y, z)
    }

    pub fn value(&self, x: usize, y: usize, z: usize) -> CycNum {
        CycNum::root(self.modulus as u32, self.at(x, y, z) as i64)
    }

    /// Triples with nonzero exponent, in index order.
    pub fn nonzero_entries(&self) -> Vec<([usize; 3], u64)> {
        let s = self.group.size();
        let mut out = Vec::new();
        for x in 0..s {
            for y in 0..s {
                for z in 0..s {
                    let e = self.at(x, y, z);
                    if e != 0 {
                        out.push(([x, y, z], e));
                    }
                }
            }
        }
        out
    }

    /// ω · δη for a 2-cochain η(x, y) = ζ_N^{eta[x·|Λ| + y]}, where
    /// δη(x, y, z) = η(y, z) η(x, y+z) / (η(x+y, z) η(x, y)).
    pub fn times_coboundary(&self, eta: &[i64]) -> Result<Cocycle> {
        let g = &self.group;
        let s = g.size();
        if eta.len() != s * s {
            return Err(Error::Shape(format!("2-cochain has {} entries, expected {}", eta.len(), s * s)));
        }
        let n = self.modulus as i64;
        let h = |a: usize, b: usize| eta[a * s + b];
        let mut table = Vec::with_capacity(s * s * s);
        for x in 0..s {
            for y in 0..s {
                for z in 0..s {
                    let d = h(y, z) + h(x, g.add(y, z)) - h(g.add(x, y), z) - h(x, y);
                    table.push((self.at(x, y, z) as i64 + d).rem_euclid(n));
                }
            }
        }
        Cocycle::new(g.clone(), self.modulus, table)
    }
}

/// Exponent of ω(y,z,t)·ω(x,y+z,t)·ω(x,y,z) / (ω(x+y,z,t)·ω(x,y,z+t)).
fn defect(c: &Cocycle, x: usize, y: usize, z: usize, t: usize) -> u64 {
    let g = &c.group;
    let n = c.modulus;
    let lhs = c.at(y, z, t) + c.at(x, g.add(y, z), t) + c.at(x, y, z);
    let rhs = c.at(g.add(x, y), z, t) + c.at(x, y, g.add(z, t));
    (lhs + 2 * n - rhs) % n
}

/// Checks normalization exhaustively and the cocycle identity exhaustively up
/// to |Λ|⁴ = 65536 quadruples, by seeded random sampling beyond.
pub fn validate_cocycle(c: &Cocycle) -> ValidationReport {
    let mut report = ValidationReport::default();
    let s = c.group.size();
    let mut unnormalized = None;
    'norm: for a in 0..s {
        for b in 0..s {
            for (x, y, z) in [(0, a, b), (a, 0, b), (a, b, 0)] {
                if c.at(x, y, z) != 0 {
                    unnormalized = Some(vec![x, y, z]);
                    break 'norm;
                }
            }
        }
    }
    report.push(CHECK_NORMALIZED, unnormalized);
    let quadruples = s.checked_pow(4).unwrap_or(usize::MAX);
    let mut broken = None;
    if quadruples <= EXHAUSTIVE_LIMIT {
        'all: for x in 0..s {
            for y in 0..s {
                for z in 0..s {
                    for t in 0..s {
                        if defect(c, x, y, z, t) != 0 {
                            broken = Some(vec![x, y, z, t]);
                            break 'all;
                        }
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
        for _ in 0..SAMPLES {
            let q: [usize; 4] = std::array::from_fn(|_| rng.gen_range(0..s));
            if defect(c, q[0], q[1], q[2], q[3]) != 0 {
                broken = Some(q.to_vec());
                break;
            }
        }
        report
            .warnings
            .push(format!("cocycle identity sampled on {SAMPLES} of {s}^4 quadruples"));
    }
    report.push(CHECK_COCYCLE, broken);
    report
}

fn require_cocycle(c: &Cocycle) -> Result<()> {
    let report = validate_cocycle(c);
    let failed = report.failed().next().map(|check| check.name);
    match failed {
        Some(name) => Err(Error::InvalidData(format!("not a normalized 3-cocycle: {name} fails"))),
        None => Ok(()),
    }
}

/// Exponent (mod N) of ψ(ω)(x₁, x₂, x₃) = Π_σ ω(x_σ1, x_σ2, x_σ3)^{sgn σ}.
pub fn psi_exponent(c: &Cocycle, x1: usize, x2: usize, x3: usize) -> u64 {
    let n = c.modulus;
    let even = c.at(x1, x2, x3) + c.at(x2, x3, x1) + c.at(x3, x1, x2);
    let odd = c.at(x2, x1, x3) + c.at(x1, x3, x2) + c.at(x3, x2, x1);
    (even + 3 * n - odd) % n
}

pub fn psi_trilinear(c: &Cocycle, x1: usize, x2: usize, x3: usize) -> CycNum {
    CycNum::root(c.modulus as u32, psi_exponent(c, x1, x2, x3) as i64)
}

/// Largest |Λ|³ for which ψ is also checked on every triple.
const FULL_PSI_LIMIT: usize = 1 << 18;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trivializability {
    pub trivializable: bool,
    /// Element indices (x₁, x₂, x₃) with ψ ≠ 1.
    pub witness: Option<[usize; 3]>,
}

/// ψ ≡ 1 on all triples of generators; for small groups every triple is
/// checked as well and the first failure found is reported.
pub fn is_trivializable(c: &Cocycle) -> Trivializability {
    let g = &c.group;
    let gens: Vec<usize> = (0..g.rank()).map(|j| g.generator(j)).collect();
    for &a in &gens {
        for &b in &gens {
            for &d in &gens {
                if psi_exponent(c, a, b, d) != 0 {
                    return Trivializability {
                        trivializable: false,
                        witness: Some([a, b, d]),
                    };
                }
            }
        }
    }
    let s = g.size();
    if s.checked_pow(3).is_some_and(|n| n <= FULL_PSI_LIMIT) {
        for a in 0..s {
            for b in 0..s {
                for d in 0..s {
                    if psi_exponent(c, a, b, d) != 0 {
                        return Trivializability {
                            trivializable: false,
                            witness: Some([a, b, d]),
                        };
                    }
                }
            }
        }
    }
    Trivializability {
        trivializable: true,
        witness: None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Complexity {
    Fp,
    SharpPHard,
}

impl fmt::Display for Complexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Complexity::Fp => "FP",
            Complexity::SharpPHard => "#P-hard",
        })
    }
}

/// What the label was read off from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evidence {
    Modular { pointedness: Pointedness, mbr1: Mbr1 },
    Cocycle { trivializability: Trivializability, coords: Option<[Vec<u64>; 3]> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    /// `"RT"` or `"TV"`.
    pub invariant: &'static str,
    pub complexity: Complexity,
    pub theorem: &'static str,
    pub evidence: Evidence,
}

pub const RT_THEOREM: &str = "RT dichotomy: Z_C on graph manifolds is in FP if C is pointed and #P-hard otherwise";
pub const TV_THEOREM: &str =
    "TV dichotomy: |-|_A is in FP if and only if A is pointed with trivializable associator, #P-hard otherwise";

impl Classification {
    /// `"RT: FP"`, `"TV: #P-hard"`, ...
    pub fn label(&self) -> String {
        format!("{}: {}", self.invariant, self.complexity)
    }

    pub fn reason(&self) -> String {
        match &self.evidence {
            Evidence::Modular { pointedness, mbr1 } => {
                if pointedness.pointed {
                    let r = mbr1.witness_r.map_or(String::from("?"), |r| r.to_string());
                    format!("pointed; MBR1 with r = {r}")
                } else {
                    match mbr1.violation {
                        Some((i, j, i2, j2)) => {
                            format!("non-pointed; MBR1 violation at rows {{{i},{i2}}} cols {{{j},{j2}}}")
                        }
                        None => "non-pointed".to_string(),
                    }
                }
            }
            Evidence::Cocycle { coords, .. } => match coords {
                None => "trivializable; psi = 1 on all generator triples".to_string(),
                Some([a, b, c]) => format!(
                    "not trivializable; psi({}, {}, {}) != 1",
                    tuple(a),
                    tuple(b),
                    tuple(c)
                ),
            },
        }
    }
}

fn tuple(c: &[u64]) -> String {
    let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(","))
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.label(), self.reason())
    }
}

/// Input to [`classify_dichotomy`].
#[derive(Debug, Clone, Copy)]
pub enum DichotomyInput<'a> {
    Modular(&'a ModularData),
    Pointed(&'a Cocycle),
}

/// Labels the input FP or #P-hard. For modular data the label follows
/// pointedness, and the block-rank-one test on the edge weights must agree
/// with it; a disagreement is reported as an internal error.
pub fn classify_dichotomy(input: DichotomyInput<'_>) -> Result<Classification> {
    match input {
        DichotomyInput::Modular(md) => {
            let pointedness = is_pointed(md)?;
            let mbr1 = is_mbr1(&edge_weight_matrix(md)?);
            if mbr1.mbr1 != pointedness.pointed {
                return Err(Error::Internal(format!(
                    "pointed = {} but MBR1 = {}",
                    pointedness.pointed, mbr1.mbr1
                )));
            }
            Ok(Classification {
                invariant: "RT",
                complexity: if pointedness.pointed { Complexity::Fp } else { Complexity::SharpPHard },
                theorem: RT_THEOREM,
                evidence: Evidence::Modular { pointedness, mbr1 },
            })
        }
        DichotomyInput::Pointed(c) => {
            require_cocycle(c)?;
            let trivializability = is_trivializable(c);
            let coords = trivializability
                .witness
                .map(|w| w.map(|x| c.group.coords(x)));
            Ok(Classification {
                invariant: "TV",
                complexity: if trivializability.trivializable { Complexity::Fp } else { Complexity::SharpPHard },
                theorem: TV_THEOREM,
                evidence: Evidence::Cocycle { trivializability, coords },
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2_cubed() -> Cocycle {
        let g = FinAbGroup::new(vec![2, 2, 2]).unwrap();
        Cocycle::from_fn(g, 2, |x, y, z| (x[0] * y[1] * z[2]) as i64).unwrap()
    }

    #[test]
    fn trivial_cocycle() {
        let c = Cocycle::trivial(FinAbGroup::new(vec![2, 3]).unwrap());
        assert!(validate_cocycle(&c).all_passed());
        assert!(psi_trilinear(&c, 1, 2, 3).is_one());
        assert!(is_trivializable(&c).trivializable);
    }

    #[test]
    fn sign_cocycle_on_z2_cubed() {
        let c = z2_cubed();
        assert!(validate_cocycle(&c).all_passed());
        let g = c.group();
        let (e1, e2, e3) = (g.generator(0), g.generator(1), g.generator(2));
        assert_eq!(psi_trilinear(&c, e1, e2, e3), CycNum::from_int(2, -1));
        assert_eq!(
            is_trivializable(&c),
            Trivializability {
                trivializable: false,
                witness: Some([e1, e2, e3])
            }
        );
    }

    #[test]
    fn single_entry_tables_on_z2() {
        // ω(1,1,1) = −1 is the sign cocycle (−1)^{xyz}
        let mut table = vec![0; 8];
        table[7] = 2;
        let c = Cocycle::new(FinAbGroup::cyclic(2), 4, table.clone()).unwrap();
        assert!(validate_cocycle(&c).all_passed());
        assert!(is_trivializable(&c).trivializable);
        // ω(1,1,1) = i is not a cocycle
        table[7] = 1;
        let c = Cocycle::new(FinAbGroup::cyclic(2), 4, table).unwrap();
        let report = validate_cocycle(&c);
        assert!(report.get(CHECK_NORMALIZED).unwrap().passed);
        assert_eq!(report.get(CHECK_COCYCLE).unwrap().witness, Some(vec![1, 1, 1, 1]));
    }

    #[test]
    fn unnormalized_entry_is_reported() {
        let mut table = vec![0; 8];
        table[1] = 1;
        let c = Cocycle::new(FinAbGroup::cyclic(2), 2, table).unwrap();
        assert_eq!(validate_cocycle(&c).get(CHECK_NORMALIZED).unwrap().witness, Some(vec![0, 0, 1]));
    }

    #[test]
    fn large_groups_are_sampled() {
        let c = Cocycle::trivial(FinAbGroup::cyclic(17));
        let report = validate_cocycle(&c);
        assert!(report.all_passed());
        assert_eq!(report.warnings.len(), 1);
    }
}
