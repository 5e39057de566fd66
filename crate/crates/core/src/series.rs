//! Truncated power series in one and two variables, and the transform identities built on them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pair::{pair_cumulants, CumulantData, Grid, PairMomentTable};
use crate::scalar::{parse_q, Scalar, Q};

/// `c_0 + c_1 z + ... + c_D z^D` modulo `z^{D+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series1<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Series1<T> {
    pub fn new(order: usize, mut coeffs: Vec<T>) -> Self {
        coeffs.resize(order + 1, T::zero());
        Series1 { coeffs }
    }

    pub fn from_fn<F: FnMut(usize) -> T>(order: usize, f: F) -> Self {
        Series1 {
            coeffs: (0..=order).map(f).collect(),
        }
    }

    pub fn zero(order: usize) -> Self {
        Series1::from_fn(order, |_| T::zero())
    }

    pub fn constant(order: usize, c: T) -> Self {
        Series1::from_fn(order, |k| if k == 0 { c.clone() } else { T::zero() })
    }

    pub fn one(order: usize) -> Self {
        Series1::constant(order, T::one())
    }

    /// The series `z`.
    pub fn var(order: usize) -> Self {
        Series1::from_fn(order, |k| if k == 1 { T::one() } else { T::zero() })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::DegreeMismatch(self.order(), other.order()));
        }
        Ok(())
    }

    pub fn with_order(&self, order: usize) -> Self {
        Series1::from_fn(order, |k| self.coeff(k))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Series1::from_fn(self.order(), |k| self.coeffs[k].clone() + other.coeffs[k].clone()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Series1::from_fn(self.order(), |k| self.coeffs[k].clone() - other.coeffs[k].clone()))
    }

    pub fn scale(&self, c: &T) -> Self {
        Series1::from_fn(self.order(), |k| self.coeffs[k].clone() * c.clone())
    }

    /// Multiply by `z`, dropping the top coefficient.
    pub fn shift_up(&self) -> Self {
        Series1::from_fn(self.order(), |k| if k == 0 { T::zero() } else { self.coeffs[k - 1].clone() })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let d = self.order();
        let mut out = vec![T::zero(); d + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(d + 1 - i) {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Ok(Series1 { coeffs: out })
    }

    pub fn inv(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::NonUnit);
        }
        let inv0 = T::one() / c0.clone();
        let mut out = vec![T::zero(); self.order() + 1];
        out[0] = inv0.clone();
        for k in 1..=self.order() {
            let mut acc = T::zero();
            for j in 1..=k {
                acc = acc + self.coeffs[j].clone() * out[k - j].clone();
            }
            out[k] = -(acc * inv0.clone());
        }
        Ok(Series1 { coeffs: out })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inv()?)
    }

    /// `self(g(z))` for `g` without constant term.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        self.check(g)?;
        if !g.coeffs[0].is_zero() {
            return Err(Error::Precondition("inner series must vanish at 0".into()));
        }
        let mut out = Series1::constant(self.order(), self.coeffs[self.order()].clone());
        for k in (0..self.order()).rev() {
            out = out.mul(g)?;
            out.coeffs[0] = out.coeffs[0].clone() + self.coeffs[k].clone();
        }
        Ok(out)
    }

    /// Compositional inverse of a series `c_1 z + ...` with `c_1` a unit.
    pub fn reversion(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::Precondition("series must vanish at 0".into()));
        }
        let d = self.order();
        if d == 0 {
            return Ok(Series1::zero(0));
        }
        let c1 = self.coeffs[1].clone();
        if c1.is_zero() {
            return Err(Error::NonUnit);
        }
        let z = Series1::var(d);
        let inv1 = T::one() / c1;
        let mut g = z.scale(&inv1);
        for _ in 1..d {
            let err = z.sub(&self.compose(&g)?)?;
            g = g.add(&err.scale(&inv1))?;
        }
        Ok(g)
    }

    pub fn map<U: Scalar, F: Fn(&T) -> U>(&self, f: F) -> Series1<U> {
        Series1 {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn is_negligible(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.is_negligible(tol))
    }
}

/// `Σ c_{m,n} z^m w^n` modulo total degree `D + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series2<T> {
    grid: Grid<T>,
}

impl<T: Scalar> Series2<T> {
    pub fn from_grid(grid: Grid<T>) -> Self {
        Series2 { grid }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> T>(order: usize, f: F) -> Self {
        Series2 {
            grid: Grid::from_fn(order, f),
        }
    }

    pub fn zero(order: usize) -> Self {
        Series2::from_fn(order, |_, _| T::zero())
    }

    pub fn constant(order: usize, c: T) -> Self {
        Series2::from_fn(order, |m, n| if m + n == 0 { c.clone() } else { T::zero() })
    }

    pub fn one(order: usize) -> Self {
        Series2::constant(order, T::one())
    }

    /// A series in `z` alone.
    pub fn from_z(s: &Series1<T>) -> Self {
        Series2::from_fn(s.order(), |m, n| if n == 0 { s.coeff(m) } else { T::zero() })
    }

    /// A series in `w` alone.
    pub fn from_w(s: &Series1<T>) -> Self {
        Series2::from_fn(s.order(), |m, n| if m == 0 { s.coeff(n) } else { T::zero() })
    }

    pub fn order(&self) -> usize {
        self.grid.degree()
    }

    pub fn coeff(&self, m: usize, n: usize) -> T {
        if m + n > self.order() {
            T::zero()
        } else {
            self.grid.get(m, n).clone()
        }
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Series2 {
            grid: self.grid.zip(&other.grid, |a, b| a.clone() + b.clone())?,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Series2 {
            grid: self.grid.zip(&other.grid, |a, b| a.clone() - b.clone())?,
        })
    }

    pub fn scale(&self, c: &T) -> Self {
        Series2 {
            grid: self.grid.map(|a| a.clone() * c.clone()),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.order() != other.order() {
            return Err(Error::DegreeMismatch(self.order(), other.order()));
        }
        let d = self.order();
        let mut out = Grid::<T>::zero(d);
        for (i, j) in self.grid.indices() {
            let a = self.grid.get(i, j);
            if a.is_zero() {
                continue;
            }
            for k in 0..=d - i - j {
                for l in 0..=d - i - j - k {
                    let v = out.get(i + k, j + l).clone() + a.clone() * other.grid.get(k, l).clone();
                    out.set(i + k, j + l, v);
                }
            }
        }
        Ok(Series2 { grid: out })
    }

    pub fn inv(&self) -> Result<Self> {
        let c0 = self.grid.get(0, 0).clone();
        if c0.is_zero() {
            return Err(Error::NonUnit);
        }
        let inv0 = T::one() / c0;
        let mut out = Grid::<T>::zero(self.order());
        out.set(0, 0, inv0.clone());
        for (i, j) in self.grid.indices().into_iter().skip(1) {
            let mut acc = T::zero();
            for k in 0..=i {
                for l in 0..=j {
                    if k + l == 0 {
                        continue;
                    }
                    acc = acc + self.grid.get(k, l).clone() * out.get(i - k, j - l).clone();
                }
            }
            out.set(i, j, -(acc * inv0.clone()));
        }
        Ok(Series2 { grid: out })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inv()?)
    }

    /// `self(u(z), v(w))` for `u`, `v` without constant terms.
    pub fn substitute(&self, u: &Series1<T>, v: &Series1<T>) -> Result<Self> {
        let d = self.order();
        if u.order() != d || v.order() != d {
            return Err(Error::DegreeMismatch(d, u.order().min(v.order())));
        }
        if !u.coeff(0).is_zero() || !v.coeff(0).is_zero() {
            return Err(Error::Precondition("substituted series must vanish at 0".into()));
        }
        let mut upow = vec![Series1::one(d)];
        let mut vpow = vec![Series1::one(d)];
        for k in 1..=d {
            upow.push(upow[k - 1].mul(u)?);
            vpow.push(vpow[k - 1].mul(v)?);
        }
        let mut out = Grid::<T>::zero(d);
        for (m, n) in self.grid.indices() {
            let c = self.grid.get(m, n);
            if c.is_zero() {
                continue;
            }
            for i in m..=d {
                let ui = upow[m].coeff(i);
                if ui.is_zero() {
                    continue;
                }
                for j in n..=d - i {
                    let val = out.get(i, j).clone() + c.clone() * ui.clone() * vpow[n].coeff(j);
                    out.set(i, j, val);
                }
            }
        }
        Ok(Series2 { grid: out })
    }

    /// Coefficients with `w^0`.
    pub fn z_part(&self) -> Series1<T> {
        Series1::from_fn(self.order(), |m| self.coeff(m, 0))
    }

    /// Coefficients with `z^0`.
    pub fn w_part(&self) -> Series1<T> {
        Series1::from_fn(self.order(), |n| self.coeff(0, n))
    }

    pub fn map<U: Scalar, F: Fn(&T) -> U>(&self, f: F) -> Series2<U> {
        Series2 { grid: self.grid.map(f) }
    }

    pub fn is_negligible(&self, tol: f64) -> bool {
        self.grid.indices().iter().all(|&(m, n)| self.grid.get(m, n).is_negligible(tol))
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            order: self.order(),
            coeffs: self.grid.to_map(false),
        }
    }
}

impl Series2<f64> {
    pub fn eval(&self, z: f64, w: f64) -> f64 {
        self.grid
            .indices()
            .into_iter()
            .map(|(m, n)| self.grid.get(m, n) * z.powi(m as i32) * w.powi(n as i32))
            .sum()
    }
}

impl Series2<Q> {
    /// Missing coefficients are zero.
    pub fn from_json(raw: &SeriesJson) -> Result<Self> {
        let mut grid = Grid::<Q>::zero(raw.order);
        for (key, value) in &raw.coeffs {
            let (m, n) = parse_index(key)?;
            if m + n > raw.order {
                return Err(Error::Schema(format!("coefficient {key} beyond order {}", raw.order)));
            }
            grid.set(m, n, parse_q(value)?);
        }
        Ok(Series2 { grid })
    }
}

fn parse_index(key: &str) -> Result<(usize, usize)> {
    key.split_once(',')
        .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
        .ok_or_else(|| Error::Schema(format!("bad index `{key}`")))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesJson {
    pub order: usize,
    pub coeffs: BTreeMap<String, String>,
}

/// `Σ c_{m,n} z^{-(m+shift)} w^{-(n+shift)}`, a formal object in reciprocal variables.
#[derive(Clone, Debug, PartialEq)]
pub struct ReciprocalSeries2<T> {
    pub shift: usize,
    pub coeffs: Series2<T>,
}

impl<T: Scalar> ReciprocalSeries2<T> {
    /// `(1/zw) M(1/z, 1/w)`.
    pub fn cauchy(moments: &Series2<T>) -> Self {
        ReciprocalSeries2 {
            shift: 1,
            coeffs: moments.clone(),
        }
    }

    /// Coefficient of `z^{-a} w^{-b}`.
    pub fn coeff_at(&self, a: usize, b: usize) -> T {
        if a < self.shift || b < self.shift {
            return T::zero();
        }
        self.coeffs.coeff(a - self.shift, b - self.shift)
    }

    pub fn to_json(&self) -> ReciprocalJson {
        ReciprocalJson {
            shift: self.shift,
            order: self.coeffs.order(),
            coeffs: self.coeffs.grid.to_map(false),
        }
    }
}

impl ReciprocalSeries2<f64> {
    pub fn eval(&self, z: f64, w: f64) -> f64 {
        self.coeffs.eval(1.0 / z, 1.0 / w) / (z * w).powi(self.shift as i32)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReciprocalJson {
    pub shift: usize,
    pub order: usize,
    pub coeffs: BTreeMap<String, String>,
}

/// Univariate series of one face of a pair.
#[derive(Clone, Debug, PartialEq)]
pub struct MarginalSeries<T> {
    pub m_psi: Series1<T>,
    pub m_phi: Series1<T>,
    /// `Σ kappa_{k+1} z^k`, order `D - 1`.
    pub r: Series1<T>,
    /// `Σ K_{k+1} z^k`, order `D - 1`.
    pub rc: Series1<T>,
    /// `1 + z r`.
    pub c: Series1<T>,
    /// `1 + z rc`.
    pub cc: Series1<T>,
}

/// Moment and cumulant series of a commuting pair.
#[derive(Clone, Debug, PartialEq)]
pub struct PairSeries<T> {
    pub left: MarginalSeries<T>,
    pub right: MarginalSeries<T>,
    pub m_psi: Series2<T>,
    pub m_phi: Series2<T>,
    /// `Σ kappa_{m,n} z^m w^n` over `m + n >= 1`.
    pub r: Series2<T>,
    /// `Σ K_{m,n} z^m w^n` over `m + n >= 1`.
    pub rc: Series2<T>,
}

fn marginal<T: Scalar>(
    table: &PairMomentTable<T>,
    data: &CumulantData<T>,
    pick: impl Fn(usize) -> (usize, usize),
) -> MarginalSeries<T> {
    let d = table.degree();
    let at = |g: &Grid<T>, k: usize| {
        let (m, n) = pick(k);
        g.get(m, n).clone()
    };
    let r = Series1::from_fn(d.saturating_sub(1), |k| at(&data.kappa, k + 1));
    let rc = Series1::from_fn(d.saturating_sub(1), |k| at(&data.cond, k + 1));
    let lift = |s: &Series1<T>| Series1::from_fn(d, |k| if k == 0 { T::one() } else { s.coeff(k - 1) });
    MarginalSeries {
        m_psi: Series1::from_fn(d, |k| at(&table.psi, k)),
        m_phi: Series1::from_fn(d, |k| at(&table.phi, k)),
        c: lift(&r),
        cc: lift(&rc),
        r,
        rc,
    }
}

pub fn series_from_pair<T: Scalar>(table: &PairMomentTable<T>) -> Result<PairSeries<T>> {
    let data = pair_cumulants(table)?;
    Ok(series_from_parts(table, &data))
}

pub fn series_from_parts<T: Scalar>(table: &PairMomentTable<T>, data: &CumulantData<T>) -> PairSeries<T> {
    PairSeries {
        left: marginal(table, data, |k| (k, 0)),
        right: marginal(table, data, |k| (0, k)),
        m_psi: Series2::from_grid(table.psi.clone()),
        m_phi: Series2::from_grid(table.phi.clone()),
        r: Series2::from_grid(data.kappa.clone()),
        rc: Series2::from_grid(data.cond.clone()),
    }
}

/// Residuals of `C^c(z M^psi) = 1 + M^psi - M^psi/M^phi` and `M^phi(z/C) = C/(1 + C - C^c)`.
pub fn marginal_residuals<T: Scalar>(s: &MarginalSeries<T>) -> Result<(Series1<T>, Series1<T>)> {
    let d = s.m_psi.order();
    let one = Series1::one(d);
    let z = Series1::var(d);
    let zm = z.mul(&s.m_psi)?;
    let lhs = s.cc.compose(&zm)?;
    let rhs = one.add(&s.m_psi)?.sub(&s.m_psi.div(&s.m_phi)?)?;
    let first = lhs.sub(&rhs)?;
    let lhs = s.m_phi.compose(&z.div(&s.c)?)?;
    let rhs = s.c.div(&one.add(&s.c)?.sub(&s.cc)?)?;
    Ok((first, lhs.sub(&rhs)?))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CfreeResiduals<T> {
    pub left: (Series1<T>, Series1<T>),
    pub right: (Series1<T>, Series1<T>),
}

impl<T: Scalar> CfreeResiduals<T> {
    pub fn is_negligible(&self, tol: f64) -> bool {
        [&self.left.0, &self.left.1, &self.right.0, &self.right.1]
            .iter()
            .all(|s| s.is_negligible(tol))
    }
}

pub fn check_cfree_series_relations<T: Scalar>(table: &PairMomentTable<T>) -> Result<CfreeResiduals<T>> {
    if table.degree() < 1 {
        return Err(Error::Precondition("degree must be at least 1".into()));
    }
    let s = series_from_pair(table)?;
    Ok(CfreeResiduals {
        left: marginal_residuals(&s.left)?,
        right: marginal_residuals(&s.right)?,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartialResiduals<T> {
    /// Functional equation linking `C^c` of the pair to the moment series.
    pub functional: Series2<T>,
    /// `R^c - (C^c_l - 1) - (C^c_r - 1) - R~` with `R~` from the reduced-transform formula.
    pub decomposition: Series2<T>,
    /// The same decomposition for the free cumulants alone.
    pub bifree: Series2<T>,
}

impl<T: Scalar> PartialResiduals<T> {
    pub fn is_negligible(&self, tol: f64) -> bool {
        self.functional.is_negligible(tol) && self.decomposition.is_negligible(tol) && self.bifree.is_negligible(tol)
    }
}

/// The mixed part `R~` of the conditional cumulant series.
pub fn reduced_transform<T: Scalar>(s: &PairSeries<T>) -> Result<Series2<T>> {
    let d = s.m_psi.order();
    let one = Series1::one(d);
    let z = Series1::var(d);
    let u = z.div(&s.left.c)?;
    let v = z.div(&s.right.c)?;
    let mpsi = s.m_psi.substitute(&u, &v)?;
    let mphi = s.m_phi.substitute(&u, &v)?;
    let cl = Series2::from_z(&s.left.c);
    let cr = Series2::from_w(&s.right.c);
    let ccl = cl.mul(&cr)?;
    let fl = Series2::from_z(&one.add(&s.left.c)?.sub(&s.left.cc)?);
    let fr = Series2::from_w(&one.add(&s.right.c)?.sub(&s.right.cc)?);
    let inner = fl.mul(&fr)?.mul(&mphi)?.div(&ccl)?.sub(&Series2::one(d))?;
    ccl.div(&mpsi)?.mul(&inner)
}

pub fn check_partial_functional_equation<T: Scalar>(table: &PairMomentTable<T>) -> Result<PartialResiduals<T>> {
    if table.degree() < 2 {
        return Err(Error::Precondition("degree must be at least 2".into()));
    }
    let s = series_from_pair(table)?;
    let d = table.degree();
    let one1 = Series1::one(d);
    let one = Series2::one(d);
    let z = Series1::var(d);

    let ml = Series2::from_z(&s.left.m_psi);
    let mr = Series2::from_w(&s.right.m_psi);
    let fl = Series2::from_z(&s.left.m_phi);
    let fr = Series2::from_w(&s.right.m_phi);
    let cc_pair = one.add(&s.rc)?;
    let lhs = cc_pair
        .substitute(&z.mul(&s.left.m_psi)?, &z.mul(&s.right.m_psi)?)?
        .add(&one)?;
    let two = one.add(&one)?;
    let rhs = ml
        .add(&mr)?
        .add(&two.sub(&ml.div(&fl)?)?.sub(&mr.div(&fr)?)?)?
        .sub(&ml.mul(&mr)?.div(&s.m_psi)?.mul(&one.sub(&s.m_phi.div(&fl.mul(&fr)?)?)?)?)?;
    let functional = lhs.sub(&rhs)?;

    let marg = |a: &Series1<T>, b: &Series1<T>| -> Result<Series2<T>> {
        Series2::from_z(&a.sub(&one1)?).add(&Series2::from_w(&b.sub(&one1)?))
    };
    let decomposition = s
        .rc
        .sub(&marg(&s.left.cc, &s.right.cc)?)?
        .sub(&reduced_transform(&s)?)?;

    let u = z.div(&s.left.c)?;
    let v = z.div(&s.right.c)?;
    let cl_cr = Series2::from_z(&s.left.c).mul(&Series2::from_w(&s.right.c))?;
    let free_mixed = one.sub(&cl_cr.div(&s.m_psi.substitute(&u, &v)?)?)?;
    let bifree = s.r.sub(&marg(&s.left.c, &s.right.c)?)?.sub(&free_mixed)?;

    Ok(PartialResiduals {
        functional,
        decomposition,
        bifree,
    })
}

/// `1 - 1/M_1 - 1/M_2 + M/(M_1 M_2)` in the reciprocal variables `1/z`, `1/w`.
///
/// The coefficient of `z^{-m} w^{-n}` is the conditional cumulant `K_{m,n}` of the pair
/// paired with the delta state.
pub fn boolean_self_energy<T: Scalar>(table: &PairMomentTable<T>) -> Result<ReciprocalSeries2<T>> {
    let d = table.degree();
    let one = Series2::one(d);
    let m = Series2::from_grid(table.phi.clone());
    let m1 = Series2::from_z(&m.z_part());
    let m2 = Series2::from_w(&m.w_part());
    let e = one
        .sub(&m1.inv()?)?
        .sub(&m2.inv()?)?
        .add(&m.div(&m1.mul(&m2)?)?)?;
    Ok(ReciprocalSeries2 { shift: 0, coeffs: e })
}

/// `Σ K_{m,n} z^{-m} w^{-n}` over `m + n >= 1`.
pub fn partial_voiculescu_series<T: Scalar>(data: &CumulantData<T>) -> ReciprocalSeries2<T> {
    ReciprocalSeries2 {
        shift: 0,
        coeffs: Series2::from_grid(data.cond.clone()),
    }
}
