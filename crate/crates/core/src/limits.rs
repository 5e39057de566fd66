//! Infinitely divisible families at the cumulant level and finite-`N` limit experiments.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pair::{pair_cumulants, CumulantData, Grid, PairMomentTable};
use crate::scalar::{parse_q, pow_q, sqrt_q, Scalar, Q};

/// Finitely many weighted points of the plane.
///
/// Serialized as a list of `[s, t, weight]` string triples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<[String; 3]>", try_from = "Vec<[String; 3]>")]
pub struct AtomicMeasure2D {
    atoms: Vec<(Q, Q, Q)>,
}

impl AtomicMeasure2D {
    pub fn new(atoms: Vec<(Q, Q, Q)>) -> Result<Self> {
        let mut seen = BTreeMap::new();
        for (s, t, _) in &atoms {
            if seen.insert((s.clone(), t.clone()), ()).is_some() {
                return Err(Error::InvalidModel(format!("repeated atom at ({s}, {t})")));
            }
        }
        Ok(AtomicMeasure2D { atoms })
    }

    pub fn zero() -> Self {
        AtomicMeasure2D { atoms: Vec::new() }
    }

    pub fn dirac(s: Q, t: Q, weight: Q) -> Self {
        AtomicMeasure2D {
            atoms: vec![(s, t, weight)],
        }
    }

    pub fn atoms(&self) -> &[(Q, Q, Q)] {
        &self.atoms
    }

    pub fn mass_at(&self, s: &Q, t: &Q) -> Q {
        self.atoms
            .iter()
            .find(|(a, b, _)| a == s && b == t)
            .map(|a| a.2.clone())
            .unwrap_or_else(Q::zero)
    }

    /// `∫ f(s, t) dρ`.
    pub fn integrate<F: Fn(&Q, &Q) -> Q>(&self, f: F) -> Q {
        self.atoms.iter().fold(Q::zero(), |acc, (s, t, w)| acc + w * f(s, t))
    }

    /// `∫ s^m t^n`, with `0^0 = 1`.
    pub fn moment(&self, m: usize, n: usize) -> Q {
        self.integrate(|s, t| pow_q(s, m) * pow_q(t, n))
    }

    pub fn total_mass(&self) -> Q {
        self.moment(0, 0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.atoms.iter().all(|a| !a.2.is_negative())
    }

    pub fn is_probability(&self) -> bool {
        self.is_nonnegative() && self.total_mass().is_one()
    }

    /// Pushforward to the first coordinate.
    pub fn left_marginal(&self) -> Vec<(Q, Q)> {
        marginal(self.atoms.iter().map(|(s, _, w)| (s.clone(), w.clone())))
    }

    /// Pushforward to the second coordinate.
    pub fn right_marginal(&self) -> Vec<(Q, Q)> {
        marginal(self.atoms.iter().map(|(_, t, w)| (t.clone(), w.clone())))
    }

    /// The measure `f(s, t) dρ`.
    pub fn reweight<F: Fn(&Q, &Q) -> Q>(&self, f: F) -> Self {
        AtomicMeasure2D {
            atoms: self
                .atoms
                .iter()
                .map(|(s, t, w)| (s.clone(), t.clone(), w * f(s, t)))
                .collect(),
        }
    }

    fn points(&self) -> impl Iterator<Item = (&Q, &Q)> {
        self.atoms.iter().map(|(s, t, _)| (s, t))
    }
}

impl From<AtomicMeasure2D> for Vec<[String; 3]> {
    fn from(m: AtomicMeasure2D) -> Self {
        m.atoms
            .iter()
            .map(|(s, t, w)| [s.to_string(), t.to_string(), w.to_string()])
            .collect()
    }
}

impl TryFrom<Vec<[String; 3]>> for AtomicMeasure2D {
    type Error = Error;

    fn try_from(raw: Vec<[String; 3]>) -> Result<Self> {
        let atoms = raw
            .iter()
            .map(|[s, t, w]| Ok((parse_q(s)?, parse_q(t)?, parse_q(w)?)))
            .collect::<Result<Vec<_>>>()?;
        AtomicMeasure2D::new(atoms)
    }
}

fn marginal(it: impl Iterator<Item = (Q, Q)>) -> Vec<(Q, Q)> {
    let mut acc: BTreeMap<Q, Q> = BTreeMap::new();
    for (x, w) in it {
        *acc.entry(x).or_insert_with(Q::zero) += w;
    }
    acc.into_iter().collect()
}

/// Drift and jump data `(η₁, η₂, ρ₁, ρ₂, ρ)` of a compactly supported infinitely divisible pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevyHincinQuintuple {
    #[serde(with = "crate::scalar::q_str")]
    pub eta1: Q,
    #[serde(with = "crate::scalar::q_str")]
    pub eta2: Q,
    pub rho1: AtomicMeasure2D,
    pub rho2: AtomicMeasure2D,
    pub rho: AtomicMeasure2D,
}

impl LevyHincinQuintuple {
    pub fn new(eta1: Q, eta2: Q, rho1: AtomicMeasure2D, rho2: AtomicMeasure2D, rho: AtomicMeasure2D) -> Result<Self> {
        let out = LevyHincinQuintuple {
            eta1,
            eta2,
            rho1,
            rho2,
            rho,
        };
        out.validate()?;
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvariantViolation(msg));
        if !self.rho1.is_nonnegative() || !self.rho2.is_nonnegative() {
            return bad("rho1 and rho2 must be nonnegative".into());
        }
        let points: Vec<(Q, Q)> = self
            .rho1
            .points()
            .chain(self.rho2.points())
            .chain(self.rho.points())
            .map(|(s, t)| (s.clone(), t.clone()))
            .collect();
        for (s, t) in &points {
            let r1 = self.rho1.mass_at(s, t);
            let r2 = self.rho2.mass_at(s, t);
            let r = self.rho.mass_at(s, t);
            if t * &r1 != s * &r {
                return bad(format!("t rho1 != s rho at ({s}, {t})"));
            }
            if s * &r2 != t * &r {
                return bad(format!("s rho2 != t rho at ({s}, {t})"));
            }
        }
        let (z0, z1) = (Q::zero(), Q::zero());
        let r = self.rho.mass_at(&z0, &z1);
        if &r * &r > self.rho1.mass_at(&z0, &z1) * self.rho2.mass_at(&z0, &z1) {
            return bad("|rho(0,0)|^2 exceeds rho1(0,0) rho2(0,0)".into());
        }
        Ok(())
    }

    /// Centred-plus-drift Gaussian data: all jump measures concentrated at the origin.
    pub fn gaussian(eta1: Q, eta2: Q, a: Q, b: Q, c: Q) -> Result<Self> {
        let at0 = |w: Q| AtomicMeasure2D::dirac(Q::zero(), Q::zero(), w);
        LevyHincinQuintuple::new(eta1, eta2, at0(a), at0(b), at0(c))
    }

    /// Data of a compound Poisson pair with rate `λ` and jump law `σ`.
    pub fn compound_poisson(lambda: &Q, sigma: &AtomicMeasure2D) -> Result<Self> {
        let l = lambda.clone();
        LevyHincinQuintuple::new(
            sigma.integrate(|s, _| &l * s),
            sigma.integrate(|_, t| &l * t),
            sigma.reweight(|s, _| &l * s * s),
            sigma.reweight(|_, t| &l * t * t),
            sigma.reweight(|s, t| &l * s * t),
        )
    }

    /// Converts the `(1 + s²)`-weighted normalization to the compact one.
    ///
    /// Every atom of `rho_w` must make `(1 + s²)(1 + t²)` a rational square.
    pub fn from_weighted(
        eta1: Q,
        eta2: Q,
        rho1_w: &AtomicMeasure2D,
        rho2_w: &AtomicMeasure2D,
        rho_w: &AtomicMeasure2D,
    ) -> Result<Self> {
        let one = Q::one();
        let mut rho = Vec::new();
        for (s, t, w) in rho_w.atoms() {
            let f = (&one + s * s) * (&one + t * t);
            let root = sqrt_q(&f).ok_or_else(|| {
                Error::InvalidModel(format!("(1+s^2)(1+t^2) is not a rational square at ({s}, {t})"))
            })?;
            rho.push((s.clone(), t.clone(), w * root));
        }
        LevyHincinQuintuple::new(
            eta1 + rho1_w.integrate(|s, _| s.clone()),
            eta2 + rho2_w.integrate(|_, t| t.clone()),
            rho1_w.reweight(|s, _| &one + s * s),
            rho2_w.reweight(|_, t| &one + t * t),
            AtomicMeasure2D::new(rho)?,
        )
    }

    /// `K_{m,n}` of the pair, by expanding the integral representation.
    pub fn cumulant(&self, m: usize, n: usize) -> Q {
        match (m, n) {
            (0, 0) => Q::zero(),
            (1, 0) => self.eta1.clone(),
            (0, 1) => self.eta2.clone(),
            (m, 0) => self.rho1.moment(m - 2, 0),
            (0, n) => self.rho2.moment(0, n - 2),
            (m, n) => self.rho.moment(m - 1, n - 1),
        }
    }
}

/// Conditional cumulants from `q`; free cumulants from the optional companion data, else zero.
pub fn lh_to_cumulants(
    q: &LevyHincinQuintuple,
    companion: Option<&LevyHincinQuintuple>,
    degree: usize,
) -> Result<CumulantData<Q>> {
    q.validate()?;
    if let Some(c) = companion {
        c.validate()?;
    }
    Ok(CumulantData::from_fn(
        degree,
        |m, n| companion.map(|c| c.cumulant(m, n)).unwrap_or_else(Q::zero),
        |m, n| q.cumulant(m, n),
    ))
}

/// Gaussian cumulants from `[η₁, η₂, a, b, c]` on each side.
pub fn gaussian_cumulants(cond: &[Q; 5], kappa: &[Q; 5], degree: usize) -> CumulantData<Q> {
    let pick = |p: &[Q; 5], m: usize, n: usize| match (m, n) {
        (1, 0) => p[0].clone(),
        (0, 1) => p[1].clone(),
        (2, 0) => p[2].clone(),
        (0, 2) => p[3].clone(),
        (1, 1) => p[4].clone(),
        _ => Q::zero(),
    };
    CumulantData::from_fn(degree, |m, n| pick(kappa, m, n), |m, n| pick(cond, m, n))
}

/// `K_{m,n} = λ 𝕄_{m,n}(σ)` and `κ_{m,n} = λ′ 𝕄_{m,n}(σ′)`.
pub fn compound_poisson_cumulants(
    lambda: &Q,
    sigma: &AtomicMeasure2D,
    lambda_free: &Q,
    sigma_free: &AtomicMeasure2D,
    degree: usize,
) -> CumulantData<Q> {
    CumulantData::from_fn(
        degree,
        |m, n| lambda_free * sigma_free.moment(m, n),
        |m, n| lambda * sigma.moment(m, n),
    )
}

/// Jumps of fixed size `(α, β)`.
pub fn poisson_cumulants(lambda: &Q, alpha: &Q, beta: &Q, lambda_free: &Q, degree: usize) -> CumulantData<Q> {
    let sigma = AtomicMeasure2D::dirac(alpha.clone(), beta.clone(), Q::one());
    compound_poisson_cumulants(lambda, &sigma, lambda_free, &sigma, degree)
}

/// Additive convolution: cumulants add.
pub fn convolve<T: Scalar>(x: &CumulantData<T>, y: &CumulantData<T>) -> Result<CumulantData<T>> {
    Ok(CumulantData {
        kappa: x.kappa.zip(&y.kappa, |a, b| a.clone() + b.clone())?,
        cond: x.cond.zip(&y.cond, |a, b| a.clone() + b.clone())?,
    })
}

/// Time-`t` member of the convolution semigroup through `x`.
pub fn semigroup_power<T: Scalar>(x: &CumulantData<T>, t: &Q) -> Result<CumulantData<T>> {
    if t.is_negative() {
        return Err(Error::NegativeTime);
    }
    let t = T::from_q(t);
    Ok(x.map(|v| v.clone() * t.clone()))
}

/// Scales order-`(m, n)` cumulants by `c^{m+n}`.
pub fn dilate<T: Scalar>(x: &CumulantData<T>, c: &T) -> CumulantData<T> {
    let scale = |g: &Grid<T>| {
        Grid::from_fn(g.degree(), |m, n| {
            let mut v = g.get(m, n).clone();
            for _ in 0..m + n {
                v = v * c.clone();
            }
            v
        })
    };
    CumulantData {
        kappa: scale(&x.kappa),
        cond: scale(&x.cond),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "K")]
    Conditional,
    #[serde(rename = "kappa")]
    Free,
}

impl Side {
    pub fn label(self) -> &'static str {
        match self {
            Side::Conditional => "K",
            Side::Free => "kappa",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub side: Side,
    pub m: usize,
    pub n: usize,
    pub steps: u64,
    pub target: f64,
    pub observed: f64,
    pub abs_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub side: Side,
    pub m: usize,
    pub n: usize,
    /// Least-squares slope of `ln error` against `ln N`; absent with fewer than two nonzero errors.
    pub exponent: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub rows: Vec<LimitRow>,
    pub fits: Vec<ExponentFit>,
}

impl LimitReport {
    fn build(rows: Vec<LimitRow>) -> Self {
        let mut groups: BTreeMap<(Side, usize, usize), Vec<(f64, f64)>> = BTreeMap::new();
        for r in &rows {
            let g = groups.entry((r.side, r.m, r.n)).or_default();
            if r.abs_error > 0.0 && r.abs_error.is_finite() {
                g.push(((r.steps as f64).ln(), r.abs_error.ln()));
            }
        }
        let fits = groups
            .into_iter()
            .map(|((side, m, n), pts)| ExponentFit {
                side,
                m,
                n,
                exponent: slope(&pts),
            })
            .collect();
        LimitReport { rows, fits }
    }

    pub fn fit(&self, side: Side, m: usize, n: usize) -> Option<f64> {
        self.fits
            .iter()
            .find(|f| (f.side, f.m, f.n) == (side, m, n))
            .and_then(|f| f.exponent)
    }

    pub fn max_error(&self) -> f64 {
        self.rows.iter().map(|r| r.abs_error).fold(0.0, f64::max)
    }
}

fn slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

fn push_rows(rows: &mut Vec<LimitRow>, steps: u64, observed: &CumulantData<f64>, target: &CumulantData<f64>) {
    for (side, obs, tgt) in [
        (Side::Conditional, &observed.cond, &target.cond),
        (Side::Free, &observed.kappa, &target.kappa),
    ] {
        for (m, n) in obs.indices().into_iter().skip(1) {
            let (o, t) = (*obs.get(m, n), *tgt.get(m, n));
            rows.push(LimitRow {
                side,
                m,
                n,
                steps,
                target: t,
                observed: o,
                abs_error: (o - t).abs(),
            });
        }
    }
}

/// Cumulants of the `N`-fold convolution of `x` dilated by `1/√N`.
pub fn clt_cumulants(x: &CumulantData<Q>, steps: u64) -> Result<CumulantData<f64>> {
    let zero = Q::zero();
    let d = x.degree();
    if d >= 1 && [x.kappa.get(1, 0), x.kappa.get(0, 1), x.cond.get(1, 0), x.cond.get(0, 1)]
        .iter()
        .any(|v| **v != zero)
    {
        return Err(Error::NonzeroMean);
    }
    if steps == 0 {
        return Err(Error::Precondition("N must be positive".into()));
    }
    let n = steps as f64;
    let scaled = dilate(&x.map(f64::from_q), &(1.0 / n.sqrt()));
    Ok(scaled.map(|v| v * n))
}

/// Deviation of [`clt_cumulants`] from the Gaussian limit over a grid of `N`.
pub fn clt_experiment(x: &CumulantData<Q>, steps: &[u64]) -> Result<LimitReport> {
    let xf = x.map(f64::from_q);
    let target = CumulantData::from_fn(
        x.degree(),
        |m, n| if m + n == 2 { *xf.kappa.get(m, n) } else { 0.0 },
        |m, n| if m + n == 2 { *xf.cond.get(m, n) } else { 0.0 },
    );
    let mut rows = Vec::new();
    for &n in steps {
        push_rows(&mut rows, n, &clt_cumulants(x, n)?, &target);
    }
    Ok(LimitReport::build(rows))
}

/// `N` times the exact cumulants of `((1 − λ/N)δ + (λ/N)σ, (1 − λ′/N)δ + (λ′/N)σ′)`.
pub fn poisson_step_cumulants(
    lambda: &Q,
    sigma: &AtomicMeasure2D,
    lambda_free: &Q,
    sigma_free: &AtomicMeasure2D,
    steps: u64,
    degree: usize,
) -> Result<CumulantData<Q>> {
    let n = Q::from_i64(steps as i64);
    for (l, s) in [(lambda, sigma), (lambda_free, sigma_free)] {
        if l.is_negative() || l >= &n {
            return Err(Error::Precondition(format!("need 0 <= lambda < N, got {l} and {steps}")));
        }
        if !s.is_probability() {
            return Err(Error::Precondition("jump law must be a probability measure".into()));
        }
        if s.atoms().iter().all(|(a, b, w)| w.is_zero() || (a.is_zero() && b.is_zero())) {
            return Err(Error::Precondition("jump law must not be the point mass at the origin".into()));
        }
    }
    let p = lambda / &n;
    let pf = lambda_free / &n;
    let table = PairMomentTable::from_fn(degree, |m, k| &p * sigma.moment(m, k), |m, k| &pf * sigma_free.moment(m, k));
    Ok(pair_cumulants(&table)?.map(|v| v * &n))
}

/// Deviation of [`poisson_step_cumulants`] from the compound Poisson limit over a grid of `N`.
pub fn poisson_limit_experiment(
    lambda: &Q,
    sigma: &AtomicMeasure2D,
    lambda_free: &Q,
    sigma_free: &AtomicMeasure2D,
    steps: &[u64],
    degree: usize,
) -> Result<LimitReport> {
    let target = compound_poisson_cumulants(lambda, sigma, lambda_free, sigma_free, degree).map(f64::from_q);
    let mut rows = Vec::new();
    for &n in steps {
        let obs = poisson_step_cumulants(lambda, sigma, lambda_free, sigma_free, n, degree)?;
        push_rows(&mut rows, n, &obs.map(f64::from_q), &target);
    }
    Ok(LimitReport::build(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    #[test]
    fn gaussian_quintuple() {
        let lh = LevyHincinQuintuple::gaussian(q(1, 2), qi(-1), qi(2), qi(3), qi(1)).unwrap();
        let data = lh_to_cumulants(&lh, None, 5).unwrap();
        let g = gaussian_cumulants(&[q(1, 2), qi(-1), qi(2), qi(3), qi(1)], &std::array::from_fn(|_| qi(0)), 5);
        assert_eq!(data.cond, g.cond);
        assert!(LevyHincinQuintuple::gaussian(qi(0), qi(0), qi(1), qi(1), qi(2)).is_err());
    }

    #[test]
    fn compound_poisson_quintuple() {
        let sigma = AtomicMeasure2D::new(vec![(qi(1), qi(2), q(1, 3)), (qi(-1), q(1, 2), q(2, 3))]).unwrap();
        let lambda = q(3, 2);
        let lh = LevyHincinQuintuple::compound_poisson(&lambda, &sigma).unwrap();
        let data = lh_to_cumulants(&lh, None, 5).unwrap();
        for (m, n) in data.cond.indices().into_iter().skip(1) {
            assert_eq!(data.cond.get(m, n), &(&lambda * sigma.moment(m, n)));
        }
        assert_eq!(lh.rho.total_mass(), *data.cond.get(1, 1));
    }

    #[test]
    fn compatibility_violations() {
        let rho1 = AtomicMeasure2D::dirac(qi(1), qi(1), qi(1));
        let bad = LevyHincinQuintuple::new(qi(0), qi(0), rho1, AtomicMeasure2D::zero(), AtomicMeasure2D::zero());
        assert!(matches!(bad, Err(Error::InvariantViolation(_))));
        assert!(AtomicMeasure2D::new(vec![(qi(0), qi(0), qi(1)), (qi(0), qi(0), qi(2))]).is_err());
    }

    #[test]
    fn weighted_form() {
        let at = |s: Q, t: Q, w: Q| AtomicMeasure2D::dirac(s, t, w);
        let lh = LevyHincinQuintuple::from_weighted(
            qi(1),
            qi(2),
            &at(q(3, 4), q(4, 3), qi(1)),
            &at(q(3, 4), q(4, 3), q(16, 9)),
            &at(q(3, 4), q(4, 3), q(4, 3)),
        )
        .unwrap();
        assert_eq!(lh.eta1, qi(1) + q(3, 4));
        assert_eq!(lh.rho.mass_at(&q(3, 4), &q(4, 3)), q(25, 9));
        let g = LevyHincinQuintuple::from_weighted(
            qi(1),
            qi(2),
            &at(qi(0), qi(0), qi(1)),
            &at(qi(0), qi(0), qi(1)),
            &at(qi(0), qi(0), q(1, 2)),
        )
        .unwrap();
        assert_eq!(g, LevyHincinQuintuple::gaussian(qi(1), qi(2), qi(1), qi(1), q(1, 2)).unwrap());
    }

    #[test]
    fn semigroup() {
        let x = poisson_cumulants(&qi(2), &qi(1), &q(1, 2), &qi(1), 4);
        let half = semigroup_power(&x, &q(1, 2)).unwrap();
        assert_eq!(convolve(&half, &half).unwrap(), x);
        assert_eq!(semigroup_power(&x, &qi(0)).unwrap(), CumulantData::zero(4));
        assert_eq!(semigroup_power(&x, &qi(-1)), Err(Error::NegativeTime));
    }

    #[test]
    fn clt_rates() {
        let x = gaussian_cumulants(&[qi(0), qi(0), qi(1), qi(2), q(1, 2)], &std::array::from_fn(|_| qi(0)), 4);
        let x = convolve(&x, &poisson_cumulants(&qi(1), &qi(1), &qi(-1), &qi(1), 4)).unwrap();
        let x = CumulantData::from_fn(4, |m, n| if m + n == 1 { qi(0) } else { x.kappa.get(m, n).clone() }, |m, n| {
            if m + n == 1 {
                qi(0)
            } else {
                x.cond.get(m, n).clone()
            }
        });
        let r = clt_experiment(&x, &[100, 400, 1600]).unwrap();
        assert!((r.fit(Side::Conditional, 2, 1).unwrap() + 0.5).abs() < 0.05);
        assert!((r.fit(Side::Conditional, 2, 2).unwrap() + 1.0).abs() < 0.05);
        assert!(r.rows.iter().filter(|r| r.m + r.n == 2).all(|r| r.abs_error < 1e-12));
        assert_eq!(clt_experiment(&poisson_cumulants(&qi(1), &qi(1), &qi(1), &qi(1), 3), &[4]), Err(Error::NonzeroMean));
    }

    #[test]
    fn poisson_rates() {
        let sigma = AtomicMeasure2D::dirac(qi(1), q(1, 2), qi(1));
        let r = poisson_limit_experiment(&qi(2), &sigma, &qi(1), &sigma, &[100, 1000, 10000], 4).unwrap();
        for f in &r.fits {
            if let Some(e) = f.exponent {
                assert!((e + 1.0).abs() < 0.1, "{f:?}");
            }
        }
        let z = poisson_limit_experiment(&qi(0), &sigma, &qi(0), &sigma, &[10, 20], 3).unwrap();
        assert_eq!(z.max_error(), 0.0);
    }
}
