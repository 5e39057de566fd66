use std::collections::BTreeMap;

use cbifree::bnc::Face;
use cbifree::cumulants::CumulantEngine;
use cbifree::dist::{random_small_q, words_over, Generator, MomentSource, TwoStateDistribution};
use cbifree::independence::{cbf_join, is_cbf_independent, FamilyAssignment};
use cbifree::pair::{pair_cumulants, PairMomentTable};
use cbifree::scalar::{pow_q, q, qi, Q};
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pair(family: u32, seed: u64, degree: usize) -> TwoStateDistribution {
    let alphabet = vec![
        Generator::new(format!("x{family}"), family, Face::L),
        Generator::new(format!("y{family}"), family, Face::R),
    ];
    TwoStateDistribution::random(alphabet, degree, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn by_key(d: &TwoStateDistribution) -> BTreeMap<String, (Q, Q)> {
    d.entries().into_iter().map(|(w, m)| (d.word_key(w), m.clone())).collect()
}

#[test]
fn opposite_faces_of_different_families_factor() {
    let left = TwoStateDistribution::random(
        vec![Generator::new("b", 0, Face::L), Generator::new("b'", 0, Face::L)],
        6,
        &mut ChaCha8Rng::seed_from_u64(1),
    );
    let right = TwoStateDistribution::random(
        vec![Generator::new("c", 1, Face::R), Generator::new("c'", 1, Face::R)],
        6,
        &mut ChaCha8Rng::seed_from_u64(2),
    );
    let joint = cbf_join(&[left, right], 6).unwrap();
    let ix = |s: &str| joint.symbol_index(s).unwrap();
    let (bs, cs) = ([ix("b"), ix("b'")], [ix("c"), ix("c'")]);
    for n in 1..=3 {
        for mask in 0..1u32 << (2 * n) {
            let b: Vec<usize> = (0..n).map(|i| bs[(mask >> i & 1) as usize]).collect();
            let c: Vec<usize> = (0..n).map(|i| cs[(mask >> (n + i) & 1) as usize]).collect();
            let w: Vec<usize> = (0..n).flat_map(|i| [b[i], c[i]]).collect();
            let (pb, sb) = joint.moments(&b).unwrap();
            let (pc, sc) = joint.moments(&c).unwrap();
            assert_eq!(joint.moments(&w).unwrap(), (pb * pc, sb * sc), "{}", joint.word_key(&w));
        }
    }
}

#[test]
fn commuting_partners_with_cfree_lefts_are_cbifree() {
    // Family 0 is the scalar 3/2; family 1 is a commuting pair whose right letter copies the left.
    let alpha = q(3, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let h: Vec<(Q, Q)> = (0..=4).map(|k| if k == 0 { (qi(1), qi(1)) } else { (random_small_q(&mut rng), random_small_q(&mut rng)) }).collect();
    let alphabet = vec![
        Generator::new("x0", 0, Face::L),
        Generator::new("y0", 0, Face::R),
        Generator::new("x1", 1, Face::L),
        Generator::new("y1", 1, Face::R),
    ];
    let joint = TwoStateDistribution::from_fn(alphabet, 4, |w| {
        let k0 = w.iter().filter(|&&l| l < 2).count();
        let (p, s) = &h[w.len() - k0];
        let a = pow_q(&alpha, k0);
        Ok((&a * p, a * s))
    })
    .unwrap();
    let groups = FamilyAssignment::from_alphabet(joint.alphabet());
    let mut engine = CumulantEngine::new(&joint);
    for w in words_over(&[0, 2], 4).into_iter().filter(|w| groups.is_mixed(w)) {
        assert!(engine.kappa(&w).unwrap().is_zero() && engine.conditional(&w).unwrap().is_zero());
    }
    let report = is_cbf_independent(&joint, &groups, 4).unwrap();
    assert!(report.independent, "{:?}", report.witness);
}

#[test]
fn tensor_products_are_not_cbifree() {
    for seed in 0..5 {
        let (a, b) = (pair(0, 10 + seed, 4), pair(1, 20 + seed, 4));
        let mut alphabet = a.alphabet().to_vec();
        alphabet.extend(b.alphabet().iter().cloned());
        let joint = TwoStateDistribution::from_fn(alphabet, 4, |w| {
            let wa: Vec<usize> = w.iter().copied().filter(|&l| l < 2).collect();
            let wb: Vec<usize> = w.iter().filter(|&&l| l >= 2).map(|l| l - 2).collect();
            let (pa, sa) = a.moments(&wa)?;
            let (pb, sb) = b.moments(&wb)?;
            Ok((pa * pb, sa * sb))
        })
        .unwrap();
        let groups = FamilyAssignment::from_alphabet(joint.alphabet());
        let report = is_cbf_independent(&joint, &groups, 4).unwrap();
        assert!(!report.independent);
        let witness = report.witness.unwrap();
        let w = joint.parse_word(&witness.word).unwrap();
        assert!(groups.is_mixed(&w));
        assert!(!witness.value.is_zero(), "{}", witness.describe());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn join_is_associative_and_commutative(seed in any::<u64>()) {
        let (a, b, c) = (pair(0, seed, 3), pair(1, seed ^ 1, 3), pair(2, seed ^ 2, 3));
        let flat = by_key(&cbf_join(&[a.clone(), b.clone(), c.clone()], 3).unwrap());
        let ab = cbf_join(&[a.clone(), b.clone()], 3).unwrap();
        let bc = cbf_join(&[b.clone(), c.clone()], 3).unwrap();
        prop_assert_eq!(&by_key(&cbf_join(&[ab, c.clone()], 3).unwrap()), &flat);
        prop_assert_eq!(&by_key(&cbf_join(&[a.clone(), bc], 3).unwrap()), &flat);
        prop_assert_eq!(&by_key(&cbf_join(&[c, b, a], 3).unwrap()), &flat);
    }

    #[test]
    fn sums_of_cbifree_copies_add_cumulants(seed in any::<u64>(), copies in 2usize..=3) {
        let table = PairMomentTable::random(4, &mut ChaCha8Rng::seed_from_u64(seed));
        let base = pair_cumulants(&table).unwrap();
        let inputs: Vec<TwoStateDistribution> = (0..copies)
            .map(|k| table.to_distribution_as(&format!("x{k}"), &format!("y{k}"), k as u32).unwrap())
            .collect();
        let joint = cbf_join(&inputs, 4).unwrap();
        let ix = |s: String| joint.symbol_index(&s).unwrap();
        let combos = vec![
            (0..copies).map(|k| (ix(format!("x{k}")), qi(1))).collect(),
            (0..copies).map(|k| (ix(format!("y{k}")), qi(1))).collect(),
        ];
        let sum = joint
            .linear_image(vec![Generator::new("X", 0, Face::L), Generator::new("Y", 0, Face::R)], &combos)
            .unwrap();
        let n = qi(copies as i64);
        let mut engine = CumulantEngine::new(&sum);
        for w in words_over(&[0, 1], 4) {
            let m = w.iter().filter(|&&l| l == 0).count();
            prop_assert_eq!(engine.kappa(&w).unwrap(), &n * base.kappa.get(m, w.len() - m));
            prop_assert_eq!(engine.conditional(&w).unwrap(), &n * base.cond.get(m, w.len() - m));
        }
    }
}
