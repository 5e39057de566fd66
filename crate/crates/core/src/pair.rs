//! Commuting two-faced pairs: `(m, n)`-indexed moment and cumulant tables.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bnc::{shared_lattice, BlockClass, ChiMap, Face};
use crate::dist::{random_small_q, Generator, TwoStateDistribution};
use crate::error::{Error, Result};
use crate::scalar::{parse_q, Scalar, Q};

/// Triangular table `t[m][n]` for `m + n <= degree`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T> {
    degree: usize,
    cells: Vec<Vec<T>>,
}

impl<T: Scalar> Grid<T> {
    pub fn from_fn<F: FnMut(usize, usize) -> T>(degree: usize, mut f: F) -> Self {
        Grid {
            degree,
            cells: (0..=degree)
                .map(|m| (0..=degree - m).map(|n| f(m, n)).collect())
                .collect(),
        }
    }

    pub fn zero(degree: usize) -> Self {
        Grid::from_fn(degree, |_, _| T::zero())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn get(&self, m: usize, n: usize) -> &T {
        &self.cells[m][n]
    }

    pub fn set(&mut self, m: usize, n: usize, v: T) {
        self.cells[m][n] = v;
    }

    /// Index pairs ordered by total degree, then by `m`.
    pub fn indices(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for d in 0..=self.degree {
            for m in (0..=d).rev() {
                out.push((m, d - m));
            }
        }
        out
    }

    pub fn map<U: Scalar, F: Fn(&T) -> U>(&self, f: F) -> Grid<U> {
        Grid::from_fn(self.degree, |m, n| f(self.get(m, n)))
    }

    pub fn zip<F: Fn(&T, &T) -> T>(&self, other: &Grid<T>, f: F) -> Result<Grid<T>> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        Ok(Grid::from_fn(self.degree, |m, n| f(self.get(m, n), other.get(m, n))))
    }

    pub fn to_map(&self, skip_origin: bool) -> BTreeMap<String, String> {
        self.indices()
            .into_iter()
            .filter(|&(m, n)| !(skip_origin && m == 0 && n == 0))
            .map(|(m, n)| (format!("{m},{n}"), self.get(m, n).render()))
            .collect()
    }
}

fn parse_grid(degree: usize, map: &BTreeMap<String, String>, what: &str, origin: Option<Q>) -> Result<Grid<Q>> {
    let mut grid = Grid::<Q>::zero(degree);
    let mut seen = Grid::<Q>::zero(degree);
    for (key, value) in map {
        let (m, n) = key
            .split_once(',')
            .and_then(|(a, b)| Some((a.trim().parse::<usize>().ok()?, b.trim().parse::<usize>().ok()?)))
            .ok_or_else(|| Error::Schema(format!("{what}: bad index `{key}`")))?;
        if m + n > degree {
            continue;
        }
        let v = parse_q(value).map_err(|e| e.within(format_args!("{what} at {key}")))?;
        grid.set(m, n, v);
        seen.set(m, n, Q::from_i64(1));
    }
    if let Some(o) = origin {
        if seen.get(0, 0) == &Q::from_i64(1) && grid.get(0, 0) != &o {
            return Err(Error::Schema(format!("{what}: entry 0,0 must be {o}")));
        }
        grid.set(0, 0, o);
        seen.set(0, 0, Q::from_i64(1));
    }
    for (m, n) in grid.indices() {
        if (m, n) != (0, 0) && seen.get(m, n) != &Q::from_i64(1) {
            return Err(Error::IncompleteTable(format!("{what} {m},{n}")));
        }
    }
    Ok(grid)
}

/// `phi(x^m y^n)` and `psi(x^m y^n)` for a commuting pair `(x, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairMomentTable<T> {
    pub phi: Grid<T>,
    pub psi: Grid<T>,
}

impl<T: Scalar> PairMomentTable<T> {
    /// Moments at `(0, 0)` are forced to 1.
    pub fn from_fn<F, G>(degree: usize, mut phi: F, mut psi: G) -> Self
    where
        F: FnMut(usize, usize) -> T,
        G: FnMut(usize, usize) -> T,
    {
        let one = || T::one();
        PairMomentTable {
            phi: Grid::from_fn(degree, |m, n| if m + n == 0 { one() } else { phi(m, n) }),
            psi: Grid::from_fn(degree, |m, n| if m + n == 0 { one() } else { psi(m, n) }),
        }
    }

    pub fn degree(&self) -> usize {
        self.phi.degree()
    }

    pub fn map<U: Scalar, F: Fn(&T) -> U>(&self, f: F) -> PairMomentTable<U> {
        PairMomentTable {
            phi: self.phi.map(&f),
            psi: self.psi.map(&f),
        }
    }

    /// Same phi-moments with psi replaced by the delta state.
    pub fn with_delta_psi(&self) -> Self {
        PairMomentTable {
            phi: self.phi.clone(),
            psi: Grid::from_fn(self.degree(), |m, n| if m + n == 0 { T::one() } else { T::zero() }),
        }
    }
}

impl PairMomentTable<Q> {
    pub fn random<R: Rng>(degree: usize, rng: &mut R) -> Self {
        let mut phi = Vec::new();
        let mut psi = Vec::new();
        for _ in 0..(degree + 1) * (degree + 2) {
            phi.push(random_small_q(rng));
            psi.push(random_small_q(rng));
        }
        let mut i = 0;
        let mut j = 0;
        PairMomentTable::from_fn(
            degree,
            |_, _| {
                i += 1;
                phi[i].clone()
            },
            |_, _| {
                j += 1;
                psi[j].clone()
            },
        )
    }

    /// Word distribution of the pair on letters `x` (left) and `y` (right).
    pub fn to_distribution(&self) -> Result<TwoStateDistribution> {
        self.to_distribution_as("x", "y", 0)
    }

    pub fn to_distribution_as(&self, left: &str, right: &str, family: u32) -> Result<TwoStateDistribution> {
        let alphabet = vec![Generator::new(left, family, Face::L), Generator::new(right, family, Face::R)];
        TwoStateDistribution::from_fn(alphabet, self.degree(), |w| {
            let m = w.iter().filter(|&&l| l == 0).count();
            let n = w.len() - m;
            Ok((self.phi.get(m, n).clone(), self.psi.get(m, n).clone()))
        })
    }

    pub fn to_json(&self) -> PairTableJson {
        PairTableJson {
            degree: self.degree(),
            phi: self.phi.to_map(true),
            psi: self.psi.to_map(true),
        }
    }

    pub fn from_json(raw: &PairTableJson) -> Result<Self> {
        let one = Some(Q::from_i64(1));
        Ok(PairMomentTable {
            phi: parse_grid(raw.degree, &raw.phi, "phi", one.clone())?,
            psi: parse_grid(raw.degree, &raw.psi, "psi", one)?,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairTableJson {
    pub degree: usize,
    pub phi: BTreeMap<String, String>,
    pub psi: BTreeMap<String, String>,
}

/// `kappa_{m,n}` and `K_{m,n}` for `1 <= m + n <= degree`; the `(0, 0)` cell is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct CumulantData<T> {
    pub kappa: Grid<T>,
    pub cond: Grid<T>,
}

impl<T: Scalar> CumulantData<T> {
    pub fn zero(degree: usize) -> Self {
        CumulantData {
            kappa: Grid::zero(degree),
            cond: Grid::zero(degree),
        }
    }

    pub fn from_fn<F, G>(degree: usize, mut kappa: F, mut cond: G) -> Self
    where
        F: FnMut(usize, usize) -> T,
        G: FnMut(usize, usize) -> T,
    {
        CumulantData {
            kappa: Grid::from_fn(degree, |m, n| if m + n == 0 { T::zero() } else { kappa(m, n) }),
            cond: Grid::from_fn(degree, |m, n| if m + n == 0 { T::zero() } else { cond(m, n) }),
        }
    }

    pub fn degree(&self) -> usize {
        self.kappa.degree()
    }

    pub fn map<U: Scalar, F: Fn(&T) -> U>(&self, f: F) -> CumulantData<U> {
        CumulantData {
            kappa: self.kappa.map(&f),
            cond: self.cond.map(&f),
        }
    }
}

impl CumulantData<Q> {
    pub fn to_json(&self) -> CumulantDataJson {
        CumulantDataJson {
            degree: self.degree(),
            kappa: self.kappa.to_map(true),
            cond: self.cond.to_map(true),
        }
    }

    pub fn from_json(raw: &CumulantDataJson) -> Result<Self> {
        let zero = Some(Q::from_i64(0));
        Ok(CumulantData {
            kappa: parse_grid(raw.degree, &raw.kappa, "kappa", zero.clone())?,
            cond: parse_grid(raw.degree, &raw.cond, "K", zero)?,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CumulantDataJson {
    pub degree: usize,
    pub kappa: BTreeMap<String, String>,
    #[serde(rename = "K")]
    pub cond: BTreeMap<String, String>,
}

fn pair_chi(m: usize, n: usize) -> Result<ChiMap> {
    let mut faces = vec![Face::L; m];
    faces.extend(std::iter::repeat_n(Face::R, n));
    ChiMap::new(faces)
}

/// Left and right counts of a block of `chi_{m,n}`.
fn block_content(block: &[usize], m: usize) -> (usize, usize) {
    let s = block.iter().filter(|&&i| i < m).count();
    (s, block.len() - s)
}

/// Cumulants of the pair from its left-then-right moments.
pub fn pair_cumulants<T: Scalar>(table: &PairMomentTable<T>) -> Result<CumulantData<T>> {
    let degree = table.degree();
    let mut out = CumulantData::<T>::zero(degree);
    for d in 1..=degree {
        for m in (0..=d).rev() {
            let n = d - m;
            let lattice = shared_lattice(&pair_chi(m, n)?)?;
            let mut kappa = T::zero();
            let mut cond = table.phi.get(m, n).clone();
            for (i, part) in lattice.partitions().iter().enumerate() {
                let mu = lattice.mobius_to_top(i);
                let mut k_term = T::from_i64(mu);
                for b in part.blocks() {
                    let (s, t) = block_content(b, m);
                    k_term = k_term * table.psi.get(s, t).clone();
                }
                kappa = kappa + k_term;
                if i == lattice.top_index() {
                    continue;
                }
                let mut c_term = T::one();
                for (b, class) in part.blocks().iter().zip(lattice.classes(i)) {
                    let (s, t) = block_content(b, m);
                    c_term = c_term
                        * match class {
                            BlockClass::Interior => out.kappa.get(s, t).clone(),
                            BlockClass::Exterior => out.cond.get(s, t).clone(),
                        };
                }
                cond = cond - c_term;
            }
            out.kappa.set(m, n, kappa);
            out.cond.set(m, n, cond);
        }
    }
    Ok(out)
}

/// Left-then-right moments from cumulants.
pub fn pair_moments<T: Scalar>(data: &CumulantData<T>) -> Result<PairMomentTable<T>> {
    let degree = data.degree();
    let mut phi = Grid::<T>::zero(degree);
    let mut psi = Grid::<T>::zero(degree);
    phi.set(0, 0, T::one());
    psi.set(0, 0, T::one());
    for d in 1..=degree {
        for m in 0..=d {
            let n = d - m;
            let lattice = shared_lattice(&pair_chi(m, n)?)?;
            let mut p = T::zero();
            let mut s = T::zero();
            for (i, part) in lattice.partitions().iter().enumerate() {
                let mut c_term = T::one();
                let mut k_term = T::one();
                for (b, class) in part.blocks().iter().zip(lattice.classes(i)) {
                    let (bs, bt) = block_content(b, m);
                    let k = data.kappa.get(bs, bt).clone();
                    k_term = k_term * k.clone();
                    c_term = c_term
                        * match class {
                            BlockClass::Interior => k,
                            BlockClass::Exterior => data.cond.get(bs, bt).clone(),
                        };
                }
                p = p + c_term;
                s = s + k_term;
            }
            phi.set(m, n, p);
            psi.set(m, n, s);
        }
    }
    Ok(PairMomentTable { phi, psi })
}
