use cbifree::limits::{convolve, lh_to_cumulants, semigroup_power, AtomicMeasure2D, LevyHincinQuintuple};
use cbifree::pair::{pair_cumulants, pair_moments, CumulantData, PairMomentTable};
use cbifree::scalar::{pow_q, q, qi, Q};
use cbifree::series::{boolean_self_energy, partial_voiculescu_series, series_from_pair, Series1};
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_q() -> impl Strategy<Value = Q> {
    (-4i64..=4, 1i64..=4).prop_map(|(n, d)| q(n, d))
}

/// Boolean cumulants by `M_n = Σ_k B_k M_{n-k}`.
fn boolean_cumulants(moments: &[Q]) -> Vec<Q> {
    let mut b = vec![Q::zero(); moments.len()];
    for n in 1..moments.len() {
        let mut acc = moments[n].clone();
        for k in 1..n {
            acc -= &b[k] * &moments[n - k];
        }
        b[n] = acc;
    }
    b
}

fn delta_data(t: &PairMomentTable<Q>) -> CumulantData<Q> {
    pair_cumulants(&t.with_delta_psi()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn reversion_inverts(c1 in small_q().prop_filter("unit", |c| !c.is_zero()), rest in prop::collection::vec(small_q(), 5)) {
        let mut coeffs = vec![qi(0), c1];
        coeffs.extend(rest);
        let f = Series1::new(6, coeffs);
        let g = f.reversion().unwrap();
        prop_assert_eq!(f.compose(&g).unwrap(), Series1::var(6));
        prop_assert_eq!(g.compose(&f).unwrap(), Series1::var(6));
    }

    #[test]
    fn transforms_add_under_convolution(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (PairMomentTable::random(5, &mut rng), PairMomentTable::random(5, &mut rng));
        let sum = convolve(&pair_cumulants(&a).unwrap(), &pair_cumulants(&b).unwrap()).unwrap();
        let (sa, sb) = (series_from_pair(&a).unwrap(), series_from_pair(&b).unwrap());
        let s = series_from_pair(&pair_moments(&sum).unwrap()).unwrap();
        prop_assert_eq!(s.rc, sa.rc.add(&sb.rc).unwrap());
        prop_assert_eq!(s.r, sa.r.add(&sb.r).unwrap());
        prop_assert_eq!(s.left.rc, sa.left.rc.add(&sb.left.rc).unwrap());
        prop_assert_eq!(s.right.r, sa.right.r.add(&sb.right.r).unwrap());
        let voic = partial_voiculescu_series(&sum);
        prop_assert_eq!(voic.coeffs, partial_voiculescu_series(&pair_cumulants(&a).unwrap()).coeffs.add(&partial_voiculescu_series(&pair_cumulants(&b).unwrap()).coeffs).unwrap());
    }

    #[test]
    fn self_energy_adds_under_boolean_convolution(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (PairMomentTable::random(5, &mut rng), PairMomentTable::random(5, &mut rng));
        let joined = pair_moments(&convolve(&delta_data(&a), &delta_data(&b)).unwrap()).unwrap();
        let e = boolean_self_energy(&joined).unwrap().coeffs;
        let ea = boolean_self_energy(&a).unwrap().coeffs;
        let eb = boolean_self_energy(&b).unwrap().coeffs;
        prop_assert_eq!(e, ea.add(&eb).unwrap());
    }

    #[test]
    fn self_energy_marginal_is_boolean(seed in any::<u64>()) {
        let t = PairMomentTable::random(6, &mut ChaCha8Rng::seed_from_u64(seed));
        let e = boolean_self_energy(&t).unwrap();
        let left: Vec<Q> = (0..=6).map(|m| t.phi.get(m, 0).clone()).collect();
        let right: Vec<Q> = (0..=6).map(|n| t.phi.get(0, n).clone()).collect();
        let (bl, br) = (boolean_cumulants(&left), boolean_cumulants(&right));
        for k in 1..=6 {
            prop_assert_eq!(&e.coeff_at(k, 0), &bl[k]);
            prop_assert_eq!(&e.coeff_at(0, k), &br[k]);
        }
    }

    #[test]
    fn semigroup_integer_powers_are_repeated_convolution(seed in any::<u64>(), n in 1u32..6) {
        let x = pair_cumulants(&PairMomentTable::random(4, &mut ChaCha8Rng::seed_from_u64(seed))).unwrap();
        let mut acc = x.clone();
        for _ in 1..n {
            acc = convolve(&acc, &x).unwrap();
        }
        prop_assert_eq!(semigroup_power(&x, &qi(n as i64)).unwrap(), acc);
    }

    #[test]
    fn levy_hincin_marginals_match_univariate_data(
        lambda in (1i64..=5).prop_map(|n| q(n, 2)),
        pts in prop::collection::btree_map((-3i64..=3, -3i64..=3), 1i64..=4, 1..4),
    ) {
        let total: i64 = pts.values().sum();
        let sigma = AtomicMeasure2D::new(pts.iter().map(|(&(s, t), &w)| (qi(s), qi(t), q(w, total))).collect()).unwrap();
        let lh = LevyHincinQuintuple::compound_poisson(&lambda, &sigma).unwrap();
        let data = lh_to_cumulants(&lh, None, 6).unwrap();
        let rho1 = lh.rho1.left_marginal();
        let rho2 = lh.rho2.right_marginal();
        prop_assert_eq!(data.cond.get(1, 0), &lh.eta1);
        for m in 2..=6 {
            let expect: Q = rho1.iter().map(|(s, w)| w * pow_q(s, m - 2)).sum();
            prop_assert_eq!(data.cond.get(m, 0), &expect);
            let expect: Q = rho2.iter().map(|(t, w)| w * pow_q(t, m - 2)).sum();
            prop_assert_eq!(data.cond.get(0, m), &expect);
            prop_assert_eq!(data.cond.get(m, 0), &(&lambda * sigma.moment(m, 0)));
        }
    }
}
