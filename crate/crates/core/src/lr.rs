//! Shaded LR-diagrams, lateral refinements, cappings and the C' coefficients.

use std::collections::HashMap;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::bnc::{canonicalize, labels_of, shared_lattice, BncPartition, ChiMap, Face};
use crate::dist::MomentSource;
use crate::error::{Error, Result};
use crate::scalar::Q;

pub const DEFAULT_LR_CAP: usize = 8;

/// Family colouring of word positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OmegaMap(Vec<u32>);

impl OmegaMap {
    pub fn new(colours: Vec<u32>) -> Self {
        OmegaMap(colours)
    }

    pub fn constant(n: usize) -> Self {
        OmegaMap(vec![0; n])
    }

    /// Colourings of length `n` with at most `k` colours, up to relabelling
    /// (first occurrences appear in increasing order).
    pub fn canonical_all(n: usize, k: u32) -> Vec<OmegaMap> {
        fn rec(n: usize, k: u32, cur: &mut Vec<u32>, used: u32, out: &mut Vec<OmegaMap>) {
            if cur.len() == n {
                out.push(OmegaMap(cur.clone()));
                return;
            }
            for c in 0..(used + 1).min(k) {
                cur.push(c);
                rec(n, k, cur, used.max(c + 1), out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, k, &mut Vec::new(), 0, &mut out);
        out
    }

    /// Every colouring of length `n` by `0..k`.
    pub fn all(n: usize, k: u32) -> Vec<OmegaMap> {
        let total = (k as usize).pow(n as u32);
        (0..total)
            .map(|mut code| {
                let mut v = vec![0; n];
                for slot in v.iter_mut().rev() {
                    *slot = (code % k as usize) as u32;
                    code /= k as usize;
                }
                OmegaMap(v)
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn colour(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn colours(&self) -> &[u32] {
        &self.0
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&c| c == self.0[0])
    }

    /// Every block of `blocks` is monochromatic.
    pub fn admits(&self, blocks: &[Vec<usize>]) -> bool {
        blocks
            .iter()
            .all(|b| b.iter().all(|&i| self.0[i] == self.0[b[0]]))
    }
}

/// A diagram reduced to its partition and its top blocks in left-to-right order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LrDiagram {
    chi: ChiMap,
    omega: OmegaMap,
    blocks: Vec<Vec<usize>>,
    top: Vec<usize>,
}

/// Identity of a diagram up to top order: blocks plus sorted top indices.
pub type DiagramKey = (Vec<Vec<usize>>, Vec<usize>);

impl LrDiagram {
    /// Canonicalizes blocks and remaps `top` (indices into `blocks`) accordingly.
    fn assemble(chi: ChiMap, omega: OmegaMap, blocks: Vec<Vec<usize>>, top: Vec<usize>) -> Self {
        let top_sets: Vec<Vec<usize>> = top
            .iter()
            .map(|&t| {
                let mut b = blocks[t].clone();
                b.sort_unstable();
                b
            })
            .collect();
        let blocks = canonicalize(blocks);
        let top = top_sets
            .iter()
            .map(|b| blocks.iter().position(|c| c == b).expect("top block present"))
            .collect();
        LrDiagram {
            chi,
            omega,
            blocks,
            top,
        }
    }

    /// Builds and validates a diagram from 0-based blocks and top block sets.
    pub fn new(
        chi: ChiMap,
        omega: OmegaMap,
        blocks: Vec<Vec<usize>>,
        top: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if omega.len() != chi.len() {
            return Err(Error::OmegaLength {
                expected: chi.len(),
                got: omega.len(),
            });
        }
        let part = BncPartition::from_blocks(chi.clone(), blocks)?;
        if !omega.admits(part.blocks()) {
            return Err(Error::Precondition("blocks must be monochromatic".into()));
        }
        let mut idx = Vec::new();
        for t in top {
            let mut t = t;
            t.sort_unstable();
            let i = part
                .blocks()
                .iter()
                .position(|b| *b == t)
                .ok_or_else(|| Error::Precondition("top entry is not a block".into()))?;
            if idx.contains(&i) {
                return Err(Error::Precondition("repeated top block".into()));
            }
            idx.push(i);
        }
        Ok(LrDiagram {
            chi,
            omega,
            blocks: part.blocks().to_vec(),
            top: idx,
        })
    }

    pub fn chi(&self) -> &ChiMap {
        &self.chi
    }

    pub fn omega(&self) -> &OmegaMap {
        &self.omega
    }

    pub fn len(&self) -> usize {
        self.chi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chi.is_empty()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Indices of top blocks, left to right.
    pub fn top(&self) -> &[usize] {
        &self.top
    }

    pub fn num_top(&self) -> usize {
        self.top.len()
    }

    pub fn is_top(&self, block: usize) -> bool {
        self.top.contains(&block)
    }

    /// Number of blocks plus number of top blocks.
    pub fn size(&self) -> usize {
        self.blocks.len() + self.top.len()
    }

    pub fn key(&self) -> DiagramKey {
        let mut t = self.top.clone();
        t.sort_unstable();
        (self.blocks.clone(), t)
    }

    pub fn partition(&self) -> BncPartition {
        BncPartition::from_canonical_unchecked(self.chi.clone(), self.blocks.clone())
    }

    /// All ways of cutting blocks into runs of consecutive nodes.
    /// For a top block the run holding its smallest node keeps the top.
    pub fn lateral_refinements(&self) -> Vec<LrDiagram> {
        let options: Vec<Vec<Vec<Vec<usize>>>> =
            self.blocks.iter().map(|b| interval_decompositions(b)).collect();
        let mut out = Vec::new();
        let mut chosen: Vec<usize> = vec![0; options.len()];
        loop {
            let mut blocks = Vec::new();
            let mut first_piece = vec![0; options.len()];
            for (i, opt) in options.iter().enumerate() {
                first_piece[i] = blocks.len();
                blocks.extend(opt[chosen[i]].iter().cloned());
            }
            let order: Vec<usize> = self.top.iter().map(|&t| first_piece[t]).collect();
            out.push(LrDiagram::assemble(self.chi.clone(), self.omega.clone(), blocks, order));
            let mut k = 0;
            while k < chosen.len() {
                chosen[k] += 1;
                if chosen[k] < options[k].len() {
                    break;
                }
                chosen[k] = 0;
                k += 1;
            }
            if k == chosen.len() {
                break;
            }
        }
        out
    }

    /// All `2^t` diagrams obtained by clearing subsets of top flags.
    pub fn cappings(&self) -> Vec<LrDiagram> {
        let t = self.top.len();
        (0..1usize << t)
            .map(|mask| LrDiagram {
                chi: self.chi.clone(),
                omega: self.omega.clone(),
                blocks: self.blocks.clone(),
                top: (0..t)
                    .filter(|k| mask >> k & 1 == 0)
                    .map(|k| self.top[k])
                    .collect(),
            })
            .collect()
    }

    /// Some lateral refinement of `self` caps to `other`.
    pub fn latcap_geq(&self, other: &LrDiagram) -> bool {
        if self.chi != other.chi || self.omega != other.omega {
            return false;
        }
        let labels = labels_of(self.len(), &other.blocks);
        for (i, b) in self.blocks.iter().enumerate() {
            let top = self.is_top(i);
            let mut pos = 0;
            while pos < b.len() {
                let lab = labels[b[pos]];
                let piece = &other.blocks[lab];
                // The piece must be a run of consecutive nodes of `b`.
                if pos + piece.len() > b.len() || b[pos..pos + piece.len()] != piece[..] {
                    return false;
                }
                // Only the upper run of a top block may still reach the top.
                if other.is_top(lab) && !(top && pos == 0) {
                    return false;
                }
                pos += piece.len();
            }
        }
        true
    }

    /// `other` is a lateral refinement of `self` with the same top blocks.
    pub fn lat_geq(&self, other: &LrDiagram) -> bool {
        self.top.len() == other.top.len() && self.latcap_geq(other)
    }

    /// Same partition and `top(other)` contained in `top(self)`.
    pub fn cap_geq(&self, other: &LrDiagram) -> bool {
        self.chi == other.chi
            && self.omega == other.omega
            && self.blocks == other.blocks
            && other.top.iter().all(|t| self.top.contains(t))
    }

    /// psi over non-top blocks times phi over top blocks.
    pub fn phi_d<S: MomentSource>(&self, src: &S, word: &[usize]) -> Result<Q> {
        if word.len() != self.len() {
            return Err(Error::Precondition("word length differs from diagram size".into()));
        }
        let mut acc = Q::one();
        for (i, b) in self.blocks.iter().enumerate() {
            let sub: Vec<usize> = b.iter().map(|&k| word[k]).collect();
            let (phi, psi) = src.moments(&sub)?;
            acc *= if self.is_top(i) { phi } else { psi };
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> DiagramJson {
        DiagramJson {
            blocks: self
                .blocks
                .iter()
                .map(|b| b.iter().map(|i| i + 1).collect())
                .collect(),
            top: self.top.clone(),
            chi: self.chi.to_string(),
            omega: self.omega.0.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagramJson {
    pub blocks: Vec<Vec<usize>>,
    pub top: Vec<usize>,
    pub chi: String,
    pub omega: Vec<u32>,
}

impl BncPartition {
    pub(crate) fn from_canonical_unchecked(chi: ChiMap, blocks: Vec<Vec<usize>>) -> Self {
        BncPartition::from_canonical(chi, blocks)
    }
}

/// Splits a sorted list into consecutive runs in all `2^(k-1)` ways.
pub fn interval_decompositions(block: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let k = block.len();
    (0..1usize << (k - 1))
        .map(|cuts| {
            let mut pieces = vec![vec![block[0]]];
            for (j, &node) in block.iter().enumerate().skip(1) {
                if cuts >> (j - 1) & 1 == 1 {
                    pieces.push(Vec::new());
                }
                pieces.last_mut().unwrap().push(node);
            }
            pieces
        })
        .collect()
}

fn check_shape(chi: &ChiMap, omega: &OmegaMap) -> Result<()> {
    if omega.len() != chi.len() {
        return Err(Error::OmegaLength {
            expected: chi.len(),
            got: omega.len(),
        });
    }
    Ok(())
}

pub fn enumerate_lr(chi: &ChiMap, omega: &OmegaMap) -> Result<Vec<LrDiagram>> {
    enumerate_lr_capped(chi, omega, DEFAULT_LR_CAP)
}

/// `LR(chi, omega)`, grown from node `n` up to node `1` with an ordered list of open spines.
pub fn enumerate_lr_capped(chi: &ChiMap, omega: &OmegaMap, cap: usize) -> Result<Vec<LrDiagram>> {
    check_shape(chi, omega)?;
    let n = chi.len();
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    struct State {
        blocks: Vec<Vec<usize>>,
        open: Vec<usize>,
    }
    fn rec(chi: &ChiMap, omega: &OmegaMap, node: usize, st: &mut State, out: &mut Vec<LrDiagram>) {
        let left = chi.face(node) == Face::L;
        let nearest = if left { st.open.first() } else { st.open.last() }.copied();
        let shade = omega.colour(node);
        match nearest {
            Some(b) if omega.colour(st.blocks[b][0]) == shade => {
                st.blocks[b].push(node);
                // Spine continues upward.
                step(chi, omega, node, st, out);
                // Spine stops at this node.
                let pos = st.open.iter().position(|&x| x == b).unwrap();
                st.open.remove(pos);
                step(chi, omega, node, st, out);
                st.open.insert(pos, b);
                st.blocks[b].pop();
            }
            _ => {
                st.blocks.push(vec![node]);
                let b = st.blocks.len() - 1;
                // Isolated node.
                step(chi, omega, node, st, out);
                // Fresh spine at the near end.
                if left {
                    st.open.insert(0, b);
                } else {
                    st.open.push(b);
                }
                step(chi, omega, node, st, out);
                if left {
                    st.open.remove(0);
                } else {
                    st.open.pop();
                }
                st.blocks.pop();
            }
        }
    }
    fn step(chi: &ChiMap, omega: &OmegaMap, node: usize, st: &mut State, out: &mut Vec<LrDiagram>) {
        if node == 0 {
            out.push(LrDiagram::assemble(
                chi.clone(),
                omega.clone(),
                st.blocks.clone(),
                st.open.clone(),
            ));
        } else {
            rec(chi, omega, node - 1, st, out);
        }
    }
    let mut out = Vec::with_capacity(1 << n);
    let mut st = State {
        blocks: Vec::new(),
        open: Vec::new(),
    };
    rec(chi, omega, n - 1, &mut st, &mut out);
    Ok(out)
}

/// `LR`, `LR^lat` and `LR^latcap` for one `(chi, omega)`, deduplicated by key.
#[derive(Clone, Debug)]
pub struct DiagramSystem {
    chi: ChiMap,
    omega: OmegaMap,
    lr: Vec<LrDiagram>,
    lat: Vec<LrDiagram>,
    latcap: Vec<LrDiagram>,
    lat_index: HashMap<DiagramKey, usize>,
    latcap_index: HashMap<DiagramKey, usize>,
    order_conflicts: usize,
}

fn insert_unique(
    list: &mut Vec<LrDiagram>,
    index: &mut HashMap<DiagramKey, usize>,
    d: LrDiagram,
) -> bool {
    let key = d.key();
    match index.get(&key) {
        Some(&i) => list[i].top != d.top,
        None => {
            index.insert(key, list.len());
            list.push(d);
            false
        }
    }
}

impl DiagramSystem {
    pub fn build(chi: &ChiMap, omega: &OmegaMap) -> Result<Self> {
        let lr = enumerate_lr(chi, omega)?;
        let mut lat = Vec::new();
        let mut lat_index = HashMap::new();
        let mut conflicts = 0;
        for d in &lr {
            for r in d.lateral_refinements() {
                conflicts += insert_unique(&mut lat, &mut lat_index, r) as usize;
            }
        }
        let mut latcap = Vec::new();
        let mut latcap_index = HashMap::new();
        for d in &lat {
            for c in d.cappings() {
                conflicts += insert_unique(&mut latcap, &mut latcap_index, c) as usize;
            }
        }
        Ok(DiagramSystem {
            chi: chi.clone(),
            omega: omega.clone(),
            lr,
            lat,
            latcap,
            lat_index,
            latcap_index,
            order_conflicts: conflicts,
        })
    }

    pub fn chi(&self) -> &ChiMap {
        &self.chi
    }

    pub fn omega(&self) -> &OmegaMap {
        &self.omega
    }

    pub fn lr(&self) -> &[LrDiagram] {
        &self.lr
    }

    pub fn lat(&self) -> &[LrDiagram] {
        &self.lat
    }

    pub fn latcap(&self) -> &[LrDiagram] {
        &self.latcap
    }

    /// Keys reached twice with different top orders; expected to be zero.
    pub fn order_conflicts(&self) -> usize {
        self.order_conflicts
    }

    pub fn in_lat(&self, d: &LrDiagram) -> bool {
        self.lat_index.contains_key(&d.key())
    }

    pub fn in_latcap(&self, d: &LrDiagram) -> bool {
        self.latcap_index.contains_key(&d.key())
    }

    /// Closed form: signed count of `D' in LR` with `D' >=_latcap D`.
    pub fn cprime(&self, d: &LrDiagram) -> Result<i64> {
        if !self.in_latcap(d) {
            return Err(Error::NotInLatcap);
        }
        Ok(self
            .lr
            .iter()
            .filter(|dp| dp.latcap_geq(d))
            .map(|dp| sign(d.size(), dp.size()))
            .sum())
    }

    /// `C_D`: signed count over `LR_t` with `D' >=_lat D`, or 0 outside `LR^lat_t`.
    pub fn c_coefficient(&self, d: &LrDiagram) -> i64 {
        if !self.in_lat(d) {
            return 0;
        }
        self.lr
            .iter()
            .filter(|dp| dp.lat_geq(d))
            .map(|dp| sign(d.size(), dp.size()))
            .sum()
    }

    /// `C'_D` for every latcap diagram by the downward recursion on the number of tops.
    pub fn cprime_recursive(&self) -> HashMap<DiagramKey, i64> {
        let mut out: HashMap<DiagramKey, i64> = HashMap::new();
        let max_t = self.latcap.iter().map(|d| d.num_top()).max().unwrap_or(0);
        for t in (0..=max_t).rev() {
            for d in self.latcap.iter().filter(|d| d.num_top() == t) {
                let mut v = self.c_coefficient(d);
                for dp in self.latcap.iter().filter(|dp| dp.num_top() > t) {
                    if dp.cap_geq(d) {
                        v -= out[&dp.key()];
                    }
                }
                out.insert(d.key(), v);
            }
        }
        out
    }
}

fn sign(a: usize, b: usize) -> i64 {
    if (a + b).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `sum over sigma in LR_0 with sigma >=_lat pi of (-1)^(|pi|-|sigma|)`.
pub fn lateral_sum(pi: &BncPartition, omega: &OmegaMap) -> Result<i64> {
    check_shape(pi.chi(), omega)?;
    if !omega.admits(pi.blocks()) {
        return Err(Error::Precondition("partition is not below the colouring".into()));
    }
    let d = LrDiagram {
        chi: pi.chi().clone(),
        omega: omega.clone(),
        blocks: pi.blocks().to_vec(),
        top: Vec::new(),
    };
    Ok(enumerate_lr(pi.chi(), omega)?
        .iter()
        .filter(|s| s.num_top() == 0 && s.lat_geq(&d))
        .map(|s| sign(d.size(), s.size()))
        .sum())
}

/// `sum over pi <= sigma <= omega of mu(pi, sigma)` in `BNC(chi)`.
pub fn mobius_sum(pi: &BncPartition, omega: &OmegaMap) -> Result<i64> {
    check_shape(pi.chi(), omega)?;
    if !omega.admits(pi.blocks()) {
        return Err(Error::Precondition("partition is not below the colouring".into()));
    }
    let lattice = shared_lattice(pi.chi())?;
    let i = lattice.index_of(pi).ok_or(Error::ShapeMismatch)?;
    let mut total = 0;
    for (j, sigma) in lattice.partitions().iter().enumerate() {
        if omega.admits(sigma.blocks()) && lattice.leq(i, j) {
            total += lattice.mobius(i, j)?;
        }
    }
    Ok(total)
}

/// Both sides of the lateral-sum / Möbius-sum identity agree.
pub fn mobius_lateral_identity(pi: &BncPartition, omega: &OmegaMap) -> Result<bool> {
    Ok(lateral_sum(pi, omega)? == mobius_sum(pi, omega)?)
}

/// Partitions of the ground diagrams for a single colour; these are the interval partitions.
pub fn lr0_partitions(chi: &ChiMap) -> Result<Vec<BncPartition>> {
    let omega = OmegaMap::constant(chi.len());
    let mut parts: Vec<BncPartition> = enumerate_lr(chi, &omega)?
        .into_iter()
        .filter(|d| d.num_top() == 0)
        .map(|d| d.partition())
        .collect();
    parts.sort_by(|a, b| a.blocks().cmp(b.blocks()));
    parts.dedup();
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(chi: &str, omega: Vec<u32>, blocks: &[&[usize]], top: &[&[usize]]) -> LrDiagram {
        let z = |b: &[usize]| b.iter().map(|i| i - 1).collect::<Vec<_>>();
        LrDiagram::new(
            ChiMap::parse(chi).unwrap(),
            OmegaMap::new(omega),
            blocks.iter().map(|b| z(b)).collect(),
            top.iter().map(|b| z(b)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_node() {
        let chi = ChiMap::parse("L").unwrap();
        let lr = enumerate_lr(&chi, &OmegaMap::constant(1)).unwrap();
        assert_eq!(lr.len(), 2);
        let sys = DiagramSystem::build(&chi, &OmegaMap::constant(1)).unwrap();
        let iso = diag("L", vec![0], &[&[1]], &[]);
        let spine = diag("L", vec![0], &[&[1]], &[&[1]]);
        assert_eq!(sys.cprime(&iso).unwrap(), 0);
        assert_eq!(sys.cprime(&spine).unwrap(), 1);
    }

    #[test]
    fn two_left_nodes() {
        let chi = ChiMap::parse("LL").unwrap();
        let lr = enumerate_lr(&chi, &OmegaMap::constant(2)).unwrap();
        assert_eq!(lr.len(), 4);
        let mut lr0: Vec<_> = lr.iter().filter(|d| d.num_top() == 0).map(|d| d.blocks().to_vec()).collect();
        lr0.sort();
        assert_eq!(lr0, vec![vec![vec![0], vec![1]], vec![vec![0, 1]]]);

        let two = OmegaMap::new(vec![1, 2]);
        let lr = enumerate_lr(&chi, &two).unwrap();
        assert!(lr.iter().all(|d| d.blocks().len() == 2));
        assert!(lr.contains(&diag("LL", vec![1, 2], &[&[1], &[2]], &[&[1], &[2]])));
    }

    #[test]
    fn refinement_counts() {
        let d = diag("LLL", vec![0; 3], &[&[1, 2, 3]], &[]);
        assert_eq!(d.lateral_refinements().len(), 4);
        let d = diag("LLL", vec![0; 3], &[&[1, 2, 3]], &[&[1, 2, 3]]);
        let refs = d.lateral_refinements();
        assert_eq!(refs.len(), 4);
        assert!(refs.iter().all(|r| r.num_top() == 1 && r.blocks()[r.top()[0]].contains(&0)));
        let d = diag("LL", vec![0, 1], &[&[1], &[2]], &[&[1], &[2]]);
        let caps = d.cappings();
        assert_eq!(caps.len(), 4);
        assert!(caps.iter().any(|c| c.num_top() == 1 && c.size() == d.size() - 1));
    }

    #[test]
    fn phi_d_reads_blocks() {
        use crate::dist::{Generator, TwoStateDistribution};
        use crate::scalar::qi;
        let alpha = vec![Generator::new("a", 0, Face::L), Generator::new("b", 0, Face::L)];
        let dist = TwoStateDistribution::from_fn(alpha, 2, |w| {
            Ok((qi(10 + w.iter().sum::<usize>() as i64), qi(2 + w.len() as i64)))
        })
        .unwrap();
        let d = diag("LL", vec![0, 0], &[&[1], &[2]], &[&[2]]);
        assert_eq!(d.phi_d(&dist, &[0, 1]).unwrap(), qi(3) * qi(11));
    }

    #[test]
    fn top_only_matches_c() {
        let chi = ChiMap::parse("LRL").unwrap();
        let sys = DiagramSystem::build(&chi, &OmegaMap::constant(3)).unwrap();
        for d in sys.lr().iter().filter(|d| d.num_top() == d.blocks().len()) {
            assert_eq!(sys.cprime(d).unwrap(), sys.c_coefficient(d));
        }
    }
}
