//! Numerical data of a modular category: labels `0..k`, duality, S-matrix,
//! twists, and a chosen square root `D` of the global dimension.

pub mod bundled;

use num_rational::BigRational;
use num_traits::Signed;

use crate::cyclotomic::{lcm_order, CycNum};
use crate::error::{Error, Result};
use crate::validation::ValidationReport;

/// Equality compares the data as field elements and ignores the conductor.
#[derive(Debug, Clone)]
pub struct ModularData {
    conductor: u32,
    dual: Vec<usize>,
    s: Vec<Vec<CycNum>>,
    theta: Vec<CycNum>,
    global_d: CycNum,
}

impl PartialEq for ModularData {
    fn eq(&self, other: &Self) -> bool {
        self.dual == other.dual
            && self.s == other.s
            && self.theta == other.theta
            && self.global_d == other.global_d
    }
}

impl Eq for ModularData {}

/// Components of [`ModularData`], for building modified copies.
#[derive(Debug, Clone)]
pub struct ModularParts {
    pub conductor: u32,
    pub dual: Vec<usize>,
    pub s: Vec<Vec<CycNum>>,
    pub theta: Vec<CycNum>,
    pub global_d: CycNum,
}

impl ModularData {
    /// Checks shapes and embeds every scalar into Q(ζ_conductor). The algebraic
    /// identities are left to [`validate_modular_data`].
    pub fn new(parts: ModularParts) -> Result<Self> {
        let ModularParts {
            conductor,
            dual,
            s,
            theta,
            global_d,
        } = parts;
        let k = dual.len();
        if k == 0 {
            return Err(Error::Shape("at least one label is required".into()));
        }
        if s.len() != k || s.iter().any(|row| row.len() != k) {
            return Err(Error::Shape(format!("S must be {k}x{k}")));
        }
        if theta.len() != k {
            return Err(Error::Shape(format!("expected {k} twists")));
        }
        if let Some(&bad) = dual.iter().find(|&&p| p >= k) {
            return Err(Error::Shape(format!("dual label {bad} out of range")));
        }
        let up = |v: CycNum| v.embed(conductor);
        Ok(ModularData {
            conductor,
            dual,
            s: s.into_iter()
                .map(|row| row.into_iter().map(up).collect::<Result<Vec<_>>>())
                .collect::<Result<_>>()?,
            theta: theta.into_iter().map(up).collect::<Result<_>>()?,
            global_d: up(global_d)?,
        })
    }

    pub fn into_parts(self) -> ModularParts {
        ModularParts {
            conductor: self.conductor,
            dual: self.dual,
            s: self.s,
            theta: self.theta,
            global_d: self.global_d,
        }
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    /// Number of labels.
    pub fn rank(&self) -> usize {
        self.dual.len()
    }

    pub fn dual(&self, i: usize) -> usize {
        self.dual[i]
    }

    pub fn duals(&self) -> &[usize] {
        &self.dual
    }

    pub fn s(&self, i: usize, j: usize) -> &CycNum {
        &self.s[i][j]
    }

    pub fn theta(&self, i: usize) -> &CycNum {
        &self.theta[i]
    }

    /// The chosen square root D of the global dimension.
    pub fn global_d(&self) -> &CycNum {
        &self.global_d
    }

    /// Quantum dimension d_i = S_{0i}.
    pub fn dim(&self, i: usize) -> &CycNum {
        &self.s[0][i]
    }

    /// Dim = Σ d_i².
    pub fn total_dim(&self) -> CycNum {
        let mut acc = CycNum::zero(self.conductor);
        for i in 0..self.rank() {
            acc += &(self.dim(i) * self.dim(i));
        }
        acc
    }

    /// Same data over a larger conductor.
    pub fn embed(&self, conductor: u32) -> Result<Self> {
        ModularData::new(ModularParts {
            conductor,
            ..self.clone().into_parts()
        })
    }

    /// Relabels by a permutation fixing 0: new label `perm[i]` carries old label `i`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let k = self.rank();
        if perm.len() != k || perm[0] != 0 {
            return Err(Error::Shape("relabeling must fix the unit".into()));
        }
        let mut inv = vec![usize::MAX; k];
        for (i, &p) in perm.iter().enumerate() {
            if p >= k || inv[p] != usize::MAX {
                return Err(Error::Shape("relabeling is not a permutation".into()));
            }
            inv[p] = i;
        }
        ModularData::new(ModularParts {
            conductor: self.conductor,
            dual: (0..k).map(|a| perm[self.dual[inv[a]]]).collect(),
            s: (0..k)
                .map(|a| (0..k).map(|b| self.s[inv[a]][inv[b]].clone()).collect())
                .collect(),
            theta: (0..k).map(|a| self.theta[inv[a]].clone()).collect(),
            global_d: self.global_d.clone(),
        })
    }
}

/// The one-label data of the trivial category.
pub fn trivial_data() -> ModularData {
    ModularData::new(ModularParts {
        conductor: 1,
        dual: vec![0],
        s: vec![vec![CycNum::one(1)]],
        theta: vec![CycNum::one(1)],
        global_d: CycNum::one(1),
    })
    .expect("well-formed")
}

/// Quantities derived from the twists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussSums {
    pub plus: CycNum,
    pub minus: CycNum,
    pub anomaly: CycNum,
    pub anomaly_free: bool,
}

fn signed_gauss_sum(md: &ModularData, sign: i64) -> Result<CycNum> {
    let mut acc = CycNum::zero(md.conductor);
    for i in 0..md.rank() {
        let d = md.dim(i);
        acc += &(&md.theta[i].pow(sign)? * &(d * d));
    }
    Ok(acc)
}

/// Δ± = Σ θ_i^{±1} d_i², the anomaly Δ₊/Δ₋, and whether it equals 1.
pub fn gauss_sums(md: &ModularData) -> Result<GaussSums> {
    let plus = signed_gauss_sum(md, 1)?;
    let minus = signed_gauss_sum(md, -1)?;
    if minus.is_zero() {
        return Err(Error::InvalidData("Δ₋ = 0".into()));
    }
    let anomaly = plus.try_div(&minus)?;
    Ok(GaussSums {
        anomaly_free: plus == minus,
        plus,
        minus,
        anomaly,
    })
}

/// Requires the anomaly-free normalization D = Δ₊ = Δ₋.
pub fn require_anomaly_free(md: &ModularData) -> Result<GaussSums> {
    let g = gauss_sums(md)?;
    if !g.anomaly_free {
        return Err(Error::Precondition("not anomaly-free: Δ₊ ≠ Δ₋".into()));
    }
    if md.global_d != g.plus {
        return Err(Error::Precondition(
            "normalization: D ≠ Δ₊ for anomaly-free data".into(),
        ));
    }
    Ok(g)
}

/// Table of all fusion coefficients `n[i][j][l]` as field elements.
pub fn fusion_table(md: &ModularData) -> Result<Vec<Vec<Vec<CycNum>>>> {
    let k = md.rank();
    let dim = md.total_dim();
    if dim.is_zero() {
        return Err(Error::InvalidData("global dimension is zero".into()));
    }
    let inv_dim = dim.inv()?;
    let mut inv_d = Vec::with_capacity(k);
    for a in 0..k {
        let d = md.dim(a);
        if d.is_zero() {
            return Err(Error::InvalidData(format!("d_{a} = 0")));
        }
        inv_d.push(d.inv()?);
    }
    // u[j][a] = S_{ja} / (d_a Dim)
    let u: Vec<Vec<CycNum>> = (0..k)
        .map(|j| (0..k).map(|a| &(&md.s[j][a] * &inv_d[a]) * &inv_dim).collect())
        .collect();
    let mut out = vec![vec![Vec::with_capacity(k); k]; k];
    for i in 0..k {
        for j in 0..k {
            let v: Vec<CycNum> = (0..k).map(|a| &md.s[i][a] * &u[j][a]).collect();
            for l in 0..k {
                let ld = md.dual[l];
                let mut acc = CycNum::zero(md.conductor);
                for (a, va) in v.iter().enumerate() {
                    acc += &(va * &md.s[ld][a]);
                }
                out[i][j].push(acc);
            }
        }
    }
    Ok(out)
}

/// N_{ij}^l = (1/Dim) Σ_a S_{ia} S_{ja} S_{l* a} / d_a.
pub fn verlinde_fusion(md: &ModularData, i: usize, j: usize, l: usize) -> Result<BigRational> {
    let k = md.rank();
    if i >= k || j >= k || l >= k {
        return Err(Error::Shape("label out of range".into()));
    }
    let mut acc = CycNum::zero(md.conductor);
    let ld = md.dual[l];
    for a in 0..k {
        let d = md.dim(a);
        if d.is_zero() {
            return Err(Error::InvalidData(format!("d_{a} = 0")));
        }
        let term = &(&md.s[i][a] * &md.s[j][a]) * &md.s[ld][a];
        acc += &term.try_div(d)?;
    }
    let n = acc.try_div(&md.total_dim())?;
    n.to_rational()
        .ok_or_else(|| Error::InvalidData(format!("N_{{{i}{j}}}^{l} is irrational")))
}

pub const CHECK_DUAL: &str = "dual is an involution fixing 0";
pub const CHECK_S_SYMMETRIC: &str = "S symmetric";
pub const CHECK_D_NONZERO: &str = "d_i nonzero";
pub const CHECK_D_UNIT: &str = "d_0 = 1";
pub const CHECK_D_DUAL: &str = "d_i* = d_i";
pub const CHECK_S_CHARGE: &str = "S_{i,j*} = S_{i*,j}";
pub const CHECK_S_SQUARE: &str = "S^2 = Dim*C";
pub const CHECK_THETA_UNIT: &str = "theta_0 = 1";
pub const CHECK_THETA_DUAL: &str = "theta_i* = theta_i";
pub const CHECK_THETA_ROOTS: &str = "theta_i roots of unity";
pub const CHECK_GAUSS_PRODUCT: &str = "Delta+ Delta- = Dim";
pub const CHECK_D_SQUARE: &str = "D^2 = Dim";
pub const CHECK_VERLINDE: &str = "Verlinde integrality";

/// Runs every identity check on `md`; failures are report entries.
pub fn validate_modular_data(md: &ModularData) -> ValidationReport {
    let k = md.rank();
    let mut r = ValidationReport::default();
    let pairs = || (0..k).flat_map(move |i| (0..k).map(move |j| (i, j)));

    let dual_bad = (0..k).find(|&i| md.dual[md.dual[i]] != i).or(if md.dual[0] != 0 {
        Some(0)
    } else {
        None
    });
    r.push(CHECK_DUAL, dual_bad.map(|i| vec![i]));

    r.push(
        CHECK_S_SYMMETRIC,
        pairs()
            .find(|&(i, j)| md.s[i][j] != md.s[j][i])
            .map(|(i, j)| vec![i, j]),
    );
    r.push(
        CHECK_D_NONZERO,
        (0..k).find(|&i| md.dim(i).is_zero()).map(|i| vec![i]),
    );
    r.push(
        CHECK_D_UNIT,
        (!md.dim(0).is_one()).then(|| vec![0]),
    );
    r.push(
        CHECK_D_DUAL,
        (0..k)
            .find(|&i| md.dim(md.dual[i]) != md.dim(i))
            .map(|i| vec![i]),
    );
    r.push(
        CHECK_S_CHARGE,
        pairs()
            .find(|&(i, j)| md.s[i][md.dual[j]] != md.s[md.dual[i]][j])
            .map(|(i, j)| vec![i, j]),
    );

    let dim = md.total_dim();
    let s_square_bad = pairs().find(|&(i, j)| {
        let mut acc = CycNum::zero(md.conductor);
        for a in 0..k {
            acc += &(&md.s[i][a] * &md.s[a][j]);
        }
        let expected = if md.dual[i] == j {
            dim.clone()
        } else {
            CycNum::zero(md.conductor)
        };
        acc != expected
    });
    r.push(CHECK_S_SQUARE, s_square_bad.map(|(i, j)| vec![i, j]));

    r.push(
        CHECK_THETA_UNIT,
        (!md.theta[0].is_one()).then(|| vec![0]),
    );
    r.push(
        CHECK_THETA_DUAL,
        (0..k)
            .find(|&i| md.theta[md.dual[i]] != md.theta[i])
            .map(|i| vec![i]),
    );
    r.push(
        CHECK_THETA_ROOTS,
        (0..k)
            .find(|&i| md.theta[i].root_of_unity_order().is_none())
            .map(|i| vec![i]),
    );

    let gauss = match (signed_gauss_sum(md, 1), signed_gauss_sum(md, -1)) {
        (Ok(p), Ok(m)) => Some((p, m)),
        _ => None,
    };
    let product_ok = gauss.as_ref().is_some_and(|(p, m)| p * m == dim);
    r.push(CHECK_GAUSS_PRODUCT, (!product_ok).then(Vec::new));

    r.push(
        CHECK_D_SQUARE,
        (&md.global_d * &md.global_d != dim).then(Vec::new),
    );

    let verlinde_bad = match fusion_table(md) {
        Err(_) => Some(vec![]),
        Ok(n) => {
            let mut bad = None;
            'outer: for i in 0..k {
                for j in 0..k {
                    for l in 0..k {
                        let ok = n[i][j][l]
                            .to_rational()
                            .is_some_and(|q| q.is_integer() && !q.is_negative());
                        if !ok {
                            bad = Some(vec![i, j, l]);
                            break 'outer;
                        }
                    }
                }
            }
            bad
        }
    };
    r.push(CHECK_VERLINDE, verlinde_bad);

    if let Some((p, m)) = &gauss {
        if p == m && &md.global_d != p {
            r.warnings
                .push("anomaly-free data with D ≠ Δ₊; graph evaluators require D = Δ₊".into());
        }
    }
    r
}

/// Whether each fusion matrix is a permutation matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pointedness {
    pub pointed: bool,
    /// A label whose fusion row is not a permutation.
    pub witness: Option<usize>,
}

pub fn is_pointed(md: &ModularData) -> Result<Pointedness> {
    let n = fusion_table(md)?;
    let k = md.rank();
    for i in 0..k {
        for j in 0..k {
            let mut ones = 0;
            let mut other = false;
            for l in 0..k {
                let v = &n[i][j][l];
                if v.is_one() {
                    ones += 1;
                } else if !v.is_zero() {
                    other = true;
                }
            }
            if ones != 1 || other {
                return Ok(Pointedness {
                    pointed: false,
                    witness: Some(i),
                });
            }
        }
    }
    Ok(Pointedness {
        pointed: true,
        witness: None,
    })
}

/// C^rev: S_{i,j*}, inverse twists, same duality and the same D.
pub fn reverse_data(md: &ModularData) -> Result<ModularData> {
    let k = md.rank();
    ModularData::new(ModularParts {
        conductor: md.conductor,
        dual: md.dual.clone(),
        s: (0..k)
            .map(|i| (0..k).map(|j| md.s[i][md.dual[j]].clone()).collect())
            .collect(),
        theta: md
            .theta
            .iter()
            .map(|t| t.inv())
            .collect::<Result<_>>()?,
        global_d: md.global_d.clone(),
    })
}

/// Labels (i, j) are encoded as `i * k2 + j`.
pub fn deligne_product(a: &ModularData, b: &ModularData) -> Result<ModularData> {
    let n = lcm_order(a.conductor, b.conductor);
    let a = a.embed(n)?;
    let b = b.embed(n)?;
    let (ka, kb) = (a.rank(), b.rank());
    let idx = |i: usize, j: usize| i * kb + j;
    let mut dual = vec![0; ka * kb];
    let mut theta = Vec::with_capacity(ka * kb);
    for i in 0..ka {
        for j in 0..kb {
            dual[idx(i, j)] = idx(a.dual[i], b.dual[j]);
            theta.push(&a.theta[i] * &b.theta[j]);
        }
    }
    let mut s = vec![Vec::with_capacity(ka * kb); ka * kb];
    for i in 0..ka {
        for j in 0..kb {
            for k in 0..ka {
                for l in 0..kb {
                    s[idx(i, j)].push(&a.s[i][k] * &b.s[j][l]);
                }
            }
        }
    }
    ModularData::new(ModularParts {
        conductor: n,
        dual,
        s,
        theta,
        global_d: &a.global_d * &b.global_d,
    })
}

/// Z(C) = C ⊠ C^rev; its D is D² = Dim(C), which equals Δ₊ of the center.
pub fn center_of_modular(md: &ModularData) -> Result<ModularData> {
    deligne_product(md, &reverse_data(md)?)
}

#[cfg(test)]
mod tests {
    use super::bundled::*;
    use super::*;

    #[test]
    fn trivial_is_valid_and_unit_for_product() {
        let t = trivial_data();
        assert!(validate_modular_data(&t).all_passed());
        let s = semion();
        let p = deligne_product(&s, &t).unwrap();
        assert_eq!(p, s);
    }

    #[test]
    fn anomaly_checks() {
        let g = gauss_sums(&semion()).unwrap();
        assert!(!g.anomaly_free);
        assert_eq!(
            require_anomaly_free(&semion()),
            Err(Error::Precondition("not anomaly-free: Δ₊ ≠ Δ₋".into()))
        );
        assert!(require_anomaly_free(&toric_code()).is_ok());
    }

    #[test]
    fn relabel_identity() {
        let t = toric_code();
        assert_eq!(t.relabel(&[0, 1, 2, 3]).unwrap(), t);
        assert!(t.relabel(&[1, 0, 2, 3]).is_err());
    }

    #[test]
    fn shape_errors() {
        let mut p = semion().into_parts();
        p.theta.pop();
        assert!(matches!(ModularData::new(p), Err(Error::Shape(_))));
    }
}
