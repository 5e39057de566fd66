use cbifree::bnc::{shared_lattice, BlockClass, BncPartition, ChiMap, Face};
use proptest::prelude::*;

fn chi_from(n: usize, mask: u32) -> ChiMap {
    ChiMap::new((0..n).map(|i| if mask >> i & 1 == 1 { Face::R } else { Face::L }).collect()).unwrap()
}

/// Position of each node when lefts are read downwards and then rights upwards.
fn positions(chi: &ChiMap) -> Vec<usize> {
    let n = chi.len();
    let mut order: Vec<usize> = (0..n).filter(|&i| chi.face(i) == Face::L).collect();
    order.extend((0..n).rev().filter(|&i| chi.face(i) == Face::R));
    let mut pos = vec![0; n];
    for (p, &i) in order.iter().enumerate() {
        pos[i] = p;
    }
    pos
}

fn relabel(p: &BncPartition, pos: &[usize]) -> BncPartition {
    let n = pos.len();
    let blocks = p.blocks().iter().map(|b| b.iter().map(|&i| pos[i]).collect()).collect();
    BncPartition::from_blocks(ChiMap::constant(n, Face::L).unwrap(), blocks).unwrap()
}

fn crossing(a: &[usize], b: &[usize]) -> bool {
    a.iter().any(|&p| {
        a.iter()
            .any(|&r| p < r && b.iter().any(|&q| p < q && q < r) && b.iter().any(|&s| s < p || s > r))
    })
}

/// Kreweras complement block sizes: points `i'` sit just after `i`; join them greedily while
/// the union with `pi` stays non-crossing on the doubled circle.
fn kreweras_sizes(pi: &[Vec<usize>], n: usize) -> Vec<usize> {
    let lifted: Vec<Vec<usize>> = pi.iter().map(|b| b.iter().map(|&i| 2 * i).collect()).collect();
    let mut label: Vec<usize> = (0..n).collect();
    let blocks_of = |label: &[usize]| -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        for l in 0..n {
            let b: Vec<usize> = (0..n).filter(|&i| label[i] == l).map(|i| 2 * i + 1).collect();
            if !b.is_empty() {
                out.push(b);
            }
        }
        out
    };
    loop {
        let mut merged = false;
        'outer: for a in 0..n {
            for b in a + 1..n {
                if label[a] == label[b] {
                    continue;
                }
                let mut trial = label.clone();
                let (from, to) = (label[b], label[a]);
                for l in trial.iter_mut() {
                    if *l == from {
                        *l = to;
                    }
                }
                let comp = blocks_of(&trial);
                let mut all = lifted.clone();
                all.extend(comp.iter().cloned());
                let ok = (0..all.len()).all(|x| (0..all.len()).all(|y| x == y || !crossing(&all[x], &all[y])));
                if ok {
                    label = trial;
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            break;
        }
    }
    blocks_of(&label).iter().map(|b| b.len()).collect()
}

fn catalan(n: usize) -> i64 {
    (0..n).fold(1i64, |c, k| c * 2 * (2 * k as i64 + 1) / (k as i64 + 2))
}

fn arb_case() -> impl Strategy<Value = (usize, u32, usize, usize, usize)> {
    (1usize..=6).prop_flat_map(|n| (Just(n), 0u32..(1 << n), any::<usize>(), any::<usize>(), any::<usize>()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn join_is_a_lattice_join((n, mask, a, b, c) in arb_case()) {
        let chi = chi_from(n, mask);
        let lat = shared_lattice(&chi).unwrap();
        let ps = lat.partitions();
        let (x, y, z) = (&ps[a % ps.len()], &ps[b % ps.len()], &ps[c % ps.len()]);
        let xy = x.join(y).unwrap();
        prop_assert_eq!(&x.join(x).unwrap(), x);
        prop_assert_eq!(&xy, &y.join(x).unwrap());
        prop_assert_eq!(xy.join(z).unwrap(), x.join(&y.join(z).unwrap()).unwrap());
        prop_assert!(x.leq(&xy) && y.leq(&xy));
        for u in ps.iter().filter(|u| x.leq(u) && y.leq(u)) {
            prop_assert!(xy.leq(u));
        }
        if x.leq(z) {
            prop_assert!(xy.leq(&z.join(y).unwrap()));
        }
    }

    #[test]
    fn mobius_is_pushed_forward_from_nc((n, mask, a, b, _c) in arb_case()) {
        let chi = chi_from(n, mask);
        let lat = shared_lattice(&chi).unwrap();
        let nc = shared_lattice(&ChiMap::constant(n, Face::L).unwrap()).unwrap();
        let pos = positions(&chi);
        let ps = lat.partitions();
        let (i, j) = (a % ps.len(), b % ps.len());
        let (ri, rj) = (nc.index_of(&relabel(&ps[i], &pos)).unwrap(), nc.index_of(&relabel(&ps[j], &pos)).unwrap());
        prop_assert_eq!(lat.leq(i, j), nc.leq(ri, rj));
        if lat.leq(i, j) {
            prop_assert_eq!(lat.mobius(i, j).unwrap(), nc.mobius(ri, rj).unwrap());
        }
        let nc_blocks = relabel(&ps[i], &pos).blocks().to_vec();
        let closed: i64 = kreweras_sizes(&nc_blocks, n)
            .iter()
            .map(|&k| if k % 2 == 1 { catalan(k - 1) } else { -catalan(k - 1) })
            .product();
        prop_assert_eq!(lat.mobius_to_top(i), closed);
    }

    #[test]
    fn constant_classification_is_linear_nesting((n, right, a) in (1usize..=6, any::<bool>(), any::<usize>())) {
        let chi = ChiMap::constant(n, if right { Face::R } else { Face::L }).unwrap();
        let lat = shared_lattice(&chi).unwrap();
        let i = a % lat.len();
        let p = &lat.partitions()[i];
        for (v, class) in p.blocks().iter().zip(lat.classes(i)) {
            let nested = p.blocks().iter().any(|w| {
                w != v && w.iter().any(|&lo| lo < v[0]) && w.iter().any(|&hi| hi > v[0])
            });
            prop_assert_eq!(*class == BlockClass::Interior, nested);
        }
        prop_assert_eq!(&p.classify_blocks(), lat.classes(i));
    }
}
