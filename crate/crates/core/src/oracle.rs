//! Truncated free product of two-state vector spaces with left and right lifts.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bnc::Face;
use crate::dist::{random_small_q, words_over, Generator, TwoStateDistribution};
use crate::error::{Error, Result};
use crate::scalar::{format_q, parse_q, Q};

/// Dense square matrix acting on column vectors, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    dim: usize,
    data: Vec<Q>,
}

impl QMatrix {
    pub fn from_rows(rows: Vec<Vec<Q>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidModel("matrix must be square and nonempty".into()));
        }
        Ok(QMatrix {
            dim,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Q::zero(); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Q::one();
        }
        QMatrix { dim, data }
    }

    pub fn random<R: Rng>(dim: usize, rng: &mut R) -> Self {
        QMatrix {
            dim,
            data: (0..dim * dim).map(|_| random_small_q(rng)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.data[i * self.dim + j]
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        let d = self.dim;
        let mut data = vec![Q::zero(); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    data[i * d + j] += a * other.get(k, j);
                }
            }
        }
        QMatrix { dim: d, data }
    }

    pub fn add(&self, other: &QMatrix) -> QMatrix {
        QMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        (0..self.dim)
            .map(|i| {
                let mut s = Q::zero();
                for (j, x) in v.iter().enumerate() {
                    if !x.is_zero() {
                        s += self.get(i, j) * x;
                    }
                }
                s
            })
            .collect()
    }

    /// Column `j`, i.e. the image of basis vector `e_j`.
    pub fn column(&self, j: usize) -> Vec<Q> {
        (0..self.dim).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn rows(&self) -> Vec<Vec<Q>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }
}

/// `C^d` with state-vector `e_0`, `psi` the `e_0` coordinate and `phi` a covector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoStateSpace {
    phi: Vec<Q>,
}

impl TwoStateSpace {
    pub fn new(phi_covector: Vec<Q>) -> Result<Self> {
        match phi_covector.first() {
            Some(x) if x.is_one() => Ok(TwoStateSpace { phi: phi_covector }),
            _ => Err(Error::InvalidModel("phi covector must start with 1".into())),
        }
    }

    pub fn dim(&self) -> usize {
        self.phi.len()
    }

    pub fn phi_covector(&self) -> &[Q] {
        &self.phi
    }

    pub fn phi(&self, v: &[Q]) -> Q {
        v.iter().zip(&self.phi).map(|(a, b)| a * b).sum()
    }

    pub fn psi(&self, v: &[Q]) -> Q {
        v[0].clone()
    }
}

/// Alternating tensor word: `(family, basis index >= 1)` per factor.
pub type TensorWord = Vec<(usize, usize)>;

/// Sparse vector on the free product basis.
pub type FpVector = BTreeMap<TensorWord, Q>;

#[derive(Clone, Debug)]
pub struct FreeProductSpace {
    factors: Vec<TwoStateSpace>,
    max_len: usize,
    basis: Vec<TensorWord>,
    index: HashMap<TensorWord, usize>,
}

pub fn build_free_product(factors: Vec<TwoStateSpace>, max_len: usize) -> Result<FreeProductSpace> {
    if max_len == 0 {
        return Err(Error::InvalidModel("truncation length must be at least 1".into()));
    }
    let mut basis: Vec<TensorWord> = vec![Vec::new()];
    let mut layer: Vec<TensorWord> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for (k, f) in factors.iter().enumerate() {
                if w.last().map(|&(c, _)| c) == Some(k) {
                    continue;
                }
                for i in 1..f.dim() {
                    let mut v = w.clone();
                    v.push((k, i));
                    next.push(v);
                }
            }
        }
        basis.extend(next.iter().cloned());
        layer = next;
    }
    let index = basis.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    Ok(FreeProductSpace {
        factors,
        max_len,
        basis,
        index,
    })
}

impl FreeProductSpace {
    pub fn factors(&self) -> &[TwoStateSpace] {
        &self.factors
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn basis(&self) -> &[TensorWord] {
        &self.basis
    }

    pub fn basis_index(&self, w: &TensorWord) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// The state-vector.
    pub fn xi(&self) -> FpVector {
        let mut v = FpVector::new();
        v.insert(Vec::new(), Q::one());
        v
    }

    pub fn phi(&self, v: &FpVector) -> Q {
        v.iter()
            .map(|(w, c)| {
                let mut p = c.clone();
                for &(k, i) in w {
                    p *= &self.factors[k].phi[i];
                }
                p
            })
            .sum()
    }

    pub fn psi(&self, v: &FpVector) -> Q {
        v.get(&Vec::new()).cloned().unwrap_or_else(Q::zero)
    }
}

/// `lambda_k(T)` or `rho_k(T)` for a local matrix `T` on factor `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedOperator {
    family: usize,
    side: Face,
    local: QMatrix,
}

pub fn lift(space: &FreeProductSpace, family: usize, side: Face, local: QMatrix) -> Result<LiftedOperator> {
    let f = space
        .factors
        .get(family)
        .ok_or_else(|| Error::InvalidModel(format!("no factor {family}")))?;
    if f.dim() != local.dim() {
        return Err(Error::InvalidModel(format!(
            "matrix dimension {} does not match factor dimension {}",
            local.dim(),
            f.dim()
        )));
    }
    Ok(LiftedOperator { family, side, local })
}

impl LiftedOperator {
    pub fn family(&self) -> usize {
        self.family
    }

    pub fn side(&self) -> Face {
        self.side
    }

    pub fn local(&self) -> &QMatrix {
        &self.local
    }

    /// Image of one basis word; errors if a nonzero term would exceed the truncation.
    pub fn apply_word(&self, space: &FreeProductSpace, w: &TensorWord) -> Result<FpVector> {
        let k = self.family;
        let (end, rest): (Option<usize>, TensorWord) = match self.side {
            Face::L => match w.first() {
                Some(&(c, i)) if c == k => (Some(i), w[1..].to_vec()),
                _ => (None, w.clone()),
            },
            Face::R => match w.last() {
                Some(&(c, i)) if c == k => (Some(i), w[..w.len() - 1].to_vec()),
                _ => (None, w.clone()),
            },
        };
        let col = self.local.column(end.unwrap_or(0));
        let mut out = FpVector::new();
        for (i, c) in col.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let word = if i == 0 {
                rest.clone()
            } else {
                let mut v = rest.clone();
                match self.side {
                    Face::L => v.insert(0, (k, i)),
                    Face::R => v.push((k, i)),
                }
                v
            };
            if word.len() > space.max_len {
                return Err(Error::TruncationOverflow(space.max_len));
            }
            *out.entry(word).or_insert_with(Q::zero) += c;
        }
        Ok(out)
    }

    pub fn apply(&self, space: &FreeProductSpace, v: &FpVector) -> Result<FpVector> {
        let mut out = FpVector::new();
        for (w, c) in v {
            if c.is_zero() {
                continue;
            }
            for (u, d) in self.apply_word(space, w)? {
                *out.entry(u).or_insert_with(Q::zero) += c * d;
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    /// Full matrix on the truncated basis; fails if any column overflows.
    pub fn matrix(&self, space: &FreeProductSpace) -> Result<Vec<Vec<Q>>> {
        let n = space.basis.len();
        let mut m = vec![vec![Q::zero(); n]; n];
        for (j, w) in space.basis.iter().enumerate() {
            for (u, c) in self.apply_word(space, w)? {
                m[space.index[&u]][j] = c;
            }
        }
        Ok(m)
    }
}

/// Applies `ops` right to left to the state-vector and reads off `(phi, psi)`.
pub fn oracle_moment(space: &FreeProductSpace, ops: &[&LiftedOperator]) -> Result<(Q, Q)> {
    let mut v = space.xi();
    for op in ops.iter().rev() {
        v = op.apply(space, &v)?;
    }
    Ok((space.phi(&v), space.psi(&v)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyModel {
    pub space: TwoStateSpace,
    pub left: Vec<(String, QMatrix)>,
    pub right: Vec<(String, QMatrix)>,
}

/// Families of left/right matrices, one two-state space per family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixModel {
    families: Vec<FamilyModel>,
}

impl MatrixModel {
    pub fn new(families: Vec<FamilyModel>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for f in &families {
            for (s, m) in f.left.iter().chain(&f.right) {
                if !seen.insert(s.clone()) {
                    return Err(Error::AlphabetCollision(s.clone()));
                }
                if m.dim() != f.space.dim() {
                    return Err(Error::InvalidModel(format!(
                        "generator `{s}` has the wrong dimension"
                    )));
                }
            }
        }
        Ok(MatrixModel { families })
    }

    /// `families` families of dimension `2..=max_dim`, one left and one right generator each.
    /// Covectors are random, so `ker(phi)` usually differs from the complement of `e_0`.
    pub fn random<R: Rng>(families: usize, max_dim: usize, rng: &mut R) -> Self {
        let fams = (0..families)
            .map(|k| {
                let dim = rng.gen_range(2..=max_dim.max(2));
                let mut phi = vec![Q::one()];
                phi.extend((1..dim).map(|_| random_small_q(rng)));
                FamilyModel {
                    space: TwoStateSpace::new(phi).unwrap(),
                    left: vec![(format!("a{k}"), QMatrix::random(dim, rng))],
                    right: vec![(format!("b{k}"), QMatrix::random(dim, rng))],
                }
            })
            .collect();
        MatrixModel { families: fams }
    }

    pub fn families(&self) -> &[FamilyModel] {
        &self.families
    }

    pub fn families_mut(&mut self) -> &mut [FamilyModel] {
        &mut self.families
    }

    /// Generators in family order, lefts before rights within a family.
    pub fn alphabet(&self) -> Vec<Generator> {
        self.generators().map(|(k, face, s, _)| Generator::new(s, k as u32, face)).collect()
    }

    fn generators(&self) -> impl Iterator<Item = (usize, Face, String, &QMatrix)> {
        self.families.iter().enumerate().flat_map(|(k, f)| {
            f.left
                .iter()
                .map(move |(s, m)| (k, Face::L, s.clone(), m))
                .chain(f.right.iter().map(move |(s, m)| (k, Face::R, s.clone(), m)))
        })
    }

    /// Pair-distribution of family `k` computed on its own space.
    pub fn local_distribution(&self, k: usize, degree: usize) -> Result<TwoStateDistribution> {
        let f = &self.families[k];
        let mats: Vec<&QMatrix> = f.left.iter().chain(&f.right).map(|(_, m)| m).collect();
        let alphabet: Vec<Generator> = self.alphabet().into_iter().filter(|g| g.family == k as u32).collect();
        TwoStateDistribution::from_fn(alphabet, degree, |w| {
            let mut v = vec![Q::zero(); f.space.dim()];
            v[0] = Q::one();
            for &l in w.iter().rev() {
                v = mats[l].apply(&v);
            }
            Ok((f.space.phi(&v), f.space.psi(&v)))
        })
    }

    pub fn space(&self, max_len: usize) -> Result<FreeProductSpace> {
        build_free_product(self.families.iter().map(|f| f.space.clone()).collect(), max_len)
    }

    /// Lifted operators aligned with [`alphabet`](Self::alphabet).
    pub fn lifted(&self, space: &FreeProductSpace) -> Result<Vec<LiftedOperator>> {
        self.generators()
            .map(|(k, face, _, m)| lift(space, k, face, m.clone()))
            .collect()
    }

    /// Joint distribution of all generators evaluated on the free product.
    pub fn oracle_distribution(&self, degree: usize) -> Result<TwoStateDistribution> {
        let space = self.space(degree.max(1))?;
        let ops = self.lifted(&space)?;
        let letters: Vec<usize> = (0..ops.len()).collect();
        let mut moments = HashMap::new();
        for w in words_over(&letters, degree) {
            let seq: Vec<&LiftedOperator> = w.iter().map(|&l| &ops[l]).collect();
            moments.insert(w, oracle_moment(&space, &seq)?);
        }
        TwoStateDistribution::new(self.alphabet(), degree, moments)
    }

    pub fn to_json(&self) -> ModelJson {
        let mat = |m: &QMatrix| -> Vec<Vec<String>> {
            m.rows().iter().map(|r| r.iter().map(format_q).collect()).collect()
        };
        ModelJson {
            families: self
                .families
                .iter()
                .map(|f| FamilyJson {
                    dim: f.space.dim(),
                    phi_covector: f.space.phi.iter().map(format_q).collect(),
                    left_generators: f.left.iter().map(|(s, m)| (s.clone(), mat(m))).collect(),
                    right_generators: f.right.iter().map(|(s, m)| (s.clone(), mat(m))).collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(raw: ModelJson) -> Result<Self> {
        let mat = |rows: &Vec<Vec<String>>| -> Result<QMatrix> {
            QMatrix::from_rows(
                rows.iter()
                    .map(|r| r.iter().map(|x| parse_q(x)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?,
            )
        };
        let mut fams = Vec::new();
        for (k, f) in raw.families.iter().enumerate() {
            let phi = f
                .phi_covector
                .iter()
                .map(|x| parse_q(x))
                .collect::<Result<Vec<_>>>()?;
            if phi.len() != f.dim {
                return Err(Error::Schema(format!("family {k}: covector length differs from dim")));
            }
            let gens = |m: &BTreeMap<String, Vec<Vec<String>>>| -> Result<Vec<(String, QMatrix)>> {
                m.iter().map(|(s, rows)| Ok((s.clone(), mat(rows)?))).collect()
            };
            fams.push(FamilyModel {
                space: TwoStateSpace::new(phi)?,
                left: gens(&f.left_generators)?,
                right: gens(&f.right_generators)?,
            });
        }
        MatrixModel::new(fams)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyJson {
    pub dim: usize,
    pub phi_covector: Vec<String>,
    #[serde(default)]
    pub left_generators: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    pub right_generators: BTreeMap<String, Vec<Vec<String>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelJson {
    pub families: Vec<FamilyJson>,
}
