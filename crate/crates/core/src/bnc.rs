//! Bi-non-crossing partitions of `[n]` under a face map.
//!
//! Elements are 0-based internally; JSON and `Display` use 1-based indices.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_BNC_CAP: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Face {
    L,
    R,
}

impl Face {
    pub fn flip(self) -> Face {
        match self {
            Face::L => Face::R,
            Face::R => Face::L,
        }
    }
}

/// Face assignment of word positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChiMap(Vec<Face>);

impl ChiMap {
    pub fn new(faces: Vec<Face>) -> Result<Self> {
        if faces.is_empty() {
            return Err(Error::InvalidChi("empty face map".into()));
        }
        Ok(ChiMap(faces))
    }

    pub fn constant(n: usize, face: Face) -> Result<Self> {
        ChiMap::new(vec![face; n])
    }

    /// Parses strings like `"LLRL"`.
    pub fn parse(s: &str) -> Result<Self> {
        let faces = s
            .chars()
            .map(|c| match c {
                'L' | 'l' => Ok(Face::L),
                'R' | 'r' => Ok(Face::R),
                other => Err(Error::InvalidChi(format!("unexpected character `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        ChiMap::new(faces)
    }

    /// All face maps of length `n`, in binary order with `L < R`.
    pub fn all(n: usize) -> Vec<ChiMap> {
        (0..1usize << n)
            .map(|mask| {
                ChiMap(
                    (0..n)
                        .map(|i| if mask >> (n - 1 - i) & 1 == 1 { Face::R } else { Face::L })
                        .collect(),
                )
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn faces(&self) -> &[Face] {
        &self.0
    }

    pub fn face(&self, i: usize) -> Face {
        self.0[i]
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&f| f == self.0[0])
    }

    /// `s_chi` as a 0-based list: position `k` holds element `s(k)`.
    /// Left elements ascending, then right elements descending.
    pub fn permutation(&self) -> Vec<usize> {
        let n = self.len();
        let mut out: Vec<usize> = (0..n).filter(|&i| self.0[i] == Face::L).collect();
        out.extend((0..n).rev().filter(|&i| self.0[i] == Face::R));
        out
    }

    /// Inverse of [`permutation`](Self::permutation): rank of each element in the order.
    pub fn ranks(&self) -> Vec<usize> {
        let perm = self.permutation();
        let mut rank = vec![0; perm.len()];
        for (k, &i) in perm.iter().enumerate() {
            rank[i] = k;
        }
        rank
    }

    /// `a` strictly precedes `b` in the induced total order.
    pub fn precedes(&self, a: usize, b: usize) -> bool {
        let rank = self.ranks();
        rank[a] < rank[b]
    }

    pub fn restrict(&self, elems: &[usize]) -> ChiMap {
        ChiMap(elems.iter().map(|&i| self.0[i]).collect())
    }
}

impl fmt::Display for ChiMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for face in &self.0 {
            f.write_str(match face {
                Face::L => "L",
                Face::R => "R",
            })?;
        }
        Ok(())
    }
}

/// A partition in `BNC(chi)` in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BncPartition {
    chi: ChiMap,
    blocks: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockClass {
    Interior,
    Exterior,
}

pub(crate) fn canonicalize(mut blocks: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for b in &mut blocks {
        b.sort_unstable();
    }
    blocks.retain(|b| !b.is_empty());
    blocks.sort_unstable_by_key(|b| b[0]);
    blocks
}

pub(crate) fn labels_of(n: usize, blocks: &[Vec<usize>]) -> Vec<usize> {
    let mut labels = vec![0; n];
    for (k, b) in blocks.iter().enumerate() {
        for &i in b {
            labels[i] = k;
        }
    }
    labels
}

/// Non-crossing test for labels listed in a linear order.
fn noncrossing_in_order(seq: &[usize], nblocks: usize) -> bool {
    let mut first = vec![usize::MAX; nblocks];
    let mut last = vec![0; nblocks];
    for (p, &b) in seq.iter().enumerate() {
        first[b] = first[b].min(p);
        last[b] = p;
    }
    let mut prev = vec![usize::MAX; nblocks];
    for (p, &b) in seq.iter().enumerate() {
        if prev[b] != usize::MAX {
            for &c in &seq[prev[b] + 1..p] {
                if first[c] < prev[b] || last[c] > p {
                    return false;
                }
            }
        }
        prev[b] = p;
    }
    true
}

fn blocks_noncrossing(chi: &ChiMap, blocks: &[Vec<usize>]) -> bool {
    let labels = labels_of(chi.len(), blocks);
    let seq: Vec<usize> = chi.permutation().iter().map(|&i| labels[i]).collect();
    noncrossing_in_order(&seq, blocks.len())
}

impl BncPartition {
    /// Validates coverage, disjointness and bi-non-crossing under `chi`.
    pub fn from_blocks(chi: ChiMap, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let n = chi.len();
        let blocks = canonicalize(blocks);
        let mut seen = vec![false; n];
        for &i in blocks.iter().flatten() {
            if i >= n || seen[i] {
                return Err(Error::Precondition(format!(
                    "blocks do not partition 1..{n}"
                )));
            }
            seen[i] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Precondition(format!("blocks do not cover 1..{n}")));
        }
        if !blocks_noncrossing(&chi, &blocks) {
            return Err(Error::Precondition("partition crosses under the face order".into()));
        }
        Ok(BncPartition { chi, blocks })
    }

    /// Same as [`from_blocks`](Self::from_blocks) with 1-based input.
    pub fn from_one_based(chi: ChiMap, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut zero = Vec::with_capacity(blocks.len());
        for b in blocks {
            let mut v = Vec::with_capacity(b.len());
            for &i in b {
                if i == 0 {
                    return Err(Error::Precondition("indices are 1-based".into()));
                }
                v.push(i - 1);
            }
            zero.push(v);
        }
        BncPartition::from_blocks(chi, zero)
    }

    pub(crate) fn from_canonical(chi: ChiMap, blocks: Vec<Vec<usize>>) -> Self {
        BncPartition { chi, blocks }
    }

    pub fn zero(chi: &ChiMap) -> Self {
        BncPartition {
            chi: chi.clone(),
            blocks: (0..chi.len()).map(|i| vec![i]).collect(),
        }
    }

    pub fn one(chi: &ChiMap) -> Self {
        BncPartition {
            chi: chi.clone(),
            blocks: vec![(0..chi.len()).collect()],
        }
    }

    pub fn chi(&self) -> &ChiMap {
        &self.chi
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

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn labels(&self) -> Vec<usize> {
        labels_of(self.len(), &self.blocks)
    }

    pub fn blocks_one_based(&self) -> Vec<Vec<usize>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|i| i + 1).collect())
            .collect()
    }

    /// Refinement order: every block of `self` lies inside a block of `other`.
    pub fn leq(&self, other: &BncPartition) -> bool {
        self.chi == other.chi && refines(&self.blocks, &other.labels())
    }

    /// Interior/exterior label of each block, aligned with [`blocks`](Self::blocks).
    pub fn classify_blocks(&self) -> Vec<BlockClass> {
        classify(&self.chi, &self.blocks)
    }

    /// Every block lies within one face.
    pub fn vertically_split(&self) -> bool {
        self.blocks
            .iter()
            .all(|b| b.iter().all(|&i| self.chi.face(i) == self.chi.face(b[0])))
    }

    /// Smallest element of `BNC(chi)` above both partitions.
    pub fn join(&self, other: &BncPartition) -> Result<BncPartition> {
        if self.chi != other.chi {
            return Err(Error::ShapeMismatch);
        }
        let n = self.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for b in self.blocks.iter().chain(other.blocks.iter()) {
            for w in b.windows(2) {
                let (a, c) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                parent[a] = c;
            }
        }
        let order = self.chi.permutation();
        loop {
            let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
            let seq: Vec<usize> = order.iter().map(|&i| roots[i]).collect();
            match find_crossing(&seq) {
                Some((a, b)) => {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    parent[ra] = rb;
                }
                None => break,
            }
        }
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for i in 0..n {
            groups.entry(find(&mut parent, i)).or_default().push(i);
        }
        Ok(BncPartition {
            chi: self.chi.clone(),
            blocks: canonicalize(groups.into_values().collect()),
        })
    }
}

/// Two labels whose occurrences interleave as `a b a b`, if any.
fn find_crossing(seq: &[usize]) -> Option<(usize, usize)> {
    let n = seq.len();
    for i in 0..n {
        for j in i + 1..n {
            if seq[j] == seq[i] {
                continue;
            }
            for k in j + 1..n {
                if seq[k] != seq[i] {
                    continue;
                }
                for l in k + 1..n {
                    if seq[l] == seq[j] {
                        return Some((seq[i], seq[j]));
                    }
                }
            }
        }
    }
    None
}

pub(crate) fn refines(blocks: &[Vec<usize>], coarse_labels: &[usize]) -> bool {
    blocks
        .iter()
        .all(|b| b.iter().all(|&i| coarse_labels[i] == coarse_labels[b[0]]))
}

pub(crate) fn classify(chi: &ChiMap, blocks: &[Vec<usize>]) -> Vec<BlockClass> {
    let rank = chi.ranks();
    let span: Vec<(usize, usize)> = blocks
        .iter()
        .map(|b| {
            let lo = b.iter().map(|&i| rank[i]).min().unwrap();
            let hi = b.iter().map(|&i| rank[i]).max().unwrap();
            (lo, hi)
        })
        .collect();
    span.iter()
        .enumerate()
        .map(|(v, &(lo, hi))| {
            let nested = span
                .iter()
                .enumerate()
                .any(|(w, &(wlo, whi))| w != v && wlo < lo && hi < whi);
            if nested {
                BlockClass::Interior
            } else {
                BlockClass::Exterior
            }
        })
        .collect()
}

impl fmt::Display for BncPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.blocks {
            let items: Vec<String> = b.iter().map(|i| (i + 1).to_string()).collect();
            write!(f, "{{{}}}", items.join(","))?;
        }
        write!(f, " [{}]", self.chi)
    }
}

#[derive(Serialize, Deserialize)]
struct PartitionJson {
    chi: String,
    blocks: Vec<Vec<usize>>,
}

impl Serialize for BncPartition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PartitionJson {
            chi: self.chi.to_string(),
            blocks: self.blocks_one_based(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BncPartition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PartitionJson::deserialize(d)?;
        let chi = ChiMap::parse(&raw.chi).map_err(serde::de::Error::custom)?;
        BncPartition::from_one_based(chi, &raw.blocks).map_err(serde::de::Error::custom)
    }
}

/// Non-crossing partitions of `0..n` in the natural order, as block lists.
pub fn enumerate_nc(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(
        p: usize,
        n: usize,
        blocks: &mut Vec<Vec<usize>>,
        stack: &mut Vec<usize>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if p == n {
            out.push(blocks.clone());
            return;
        }
        // Open a new block.
        blocks.push(vec![p]);
        stack.push(blocks.len() - 1);
        rec(p + 1, n, blocks, stack, out);
        stack.pop();
        blocks.pop();
        // Join an open block; blocks above it close for good.
        for depth in (0..stack.len()).rev() {
            let b = stack[depth];
            let closed: Vec<usize> = stack.drain(depth + 1..).collect();
            blocks[b].push(p);
            rec(p + 1, n, blocks, stack, out);
            blocks[b].pop();
            stack.extend(closed);
        }
    }
    let mut out = Vec::new();
    rec(0, n, &mut Vec::new(), &mut Vec::new(), &mut out);
    out
}

pub fn enumerate_bnc(chi: &ChiMap) -> Result<Vec<BncPartition>> {
    enumerate_bnc_capped(chi, DEFAULT_BNC_CAP)
}

/// All of `BNC(chi)`, canonically sorted.
pub fn enumerate_bnc_capped(chi: &ChiMap, cap: usize) -> Result<Vec<BncPartition>> {
    let n = chi.len();
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let perm = chi.permutation();
    let mut out: Vec<BncPartition> = enumerate_nc(n)
        .into_iter()
        .map(|blocks| {
            let pushed = blocks
                .into_iter()
                .map(|b| b.into_iter().map(|k| perm[k]).collect())
                .collect();
            BncPartition::from_canonical(chi.clone(), canonicalize(pushed))
        })
        .collect();
    out.sort_by(|a, b| a.blocks.cmp(&b.blocks));
    Ok(out)
}

/// `BNC(chi)` with refinement tests and memoized Möbius values.
#[derive(Debug)]
pub struct BncLattice {
    chi: ChiMap,
    parts: Vec<BncPartition>,
    labels: Vec<Vec<usize>>,
    classes: Vec<Vec<BlockClass>>,
    index: HashMap<Vec<Vec<usize>>, usize>,
    top: usize,
    mobius_to: Mutex<HashMap<usize, Arc<HashMap<usize, i64>>>>,
}

impl BncLattice {
    pub fn new(chi: &ChiMap) -> Result<Self> {
        BncLattice::with_cap(chi, DEFAULT_BNC_CAP)
    }

    pub fn with_cap(chi: &ChiMap, cap: usize) -> Result<Self> {
        let parts = enumerate_bnc_capped(chi, cap)?;
        let labels = parts.iter().map(|p| p.labels()).collect();
        let classes = parts.iter().map(|p| p.classify_blocks()).collect();
        let index: HashMap<_, _> = parts
            .iter()
            .enumerate()
            .map(|(i, p)| (p.blocks.clone(), i))
            .collect();
        let top = index[&BncPartition::one(chi).blocks];
        Ok(BncLattice {
            chi: chi.clone(),
            parts,
            labels,
            classes,
            index,
            top,
            mobius_to: Mutex::new(HashMap::new()),
        })
    }

    pub fn chi(&self) -> &ChiMap {
        &self.chi
    }

    pub fn partitions(&self) -> &[BncPartition] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn top_index(&self) -> usize {
        self.top
    }

    pub fn index_of(&self, p: &BncPartition) -> Option<usize> {
        if p.chi != self.chi {
            return None;
        }
        self.index.get(&p.blocks).copied()
    }

    pub fn classes(&self, i: usize) -> &[BlockClass] {
        &self.classes[i]
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        refines(&self.parts[i].blocks, &self.labels[j])
    }

    /// Möbius values `mu(s, j)` for every `s <= j`.
    pub fn mobius_column(&self, j: usize) -> Arc<HashMap<usize, i64>> {
        if let Some(col) = self.mobius_to.lock().unwrap().get(&j) {
            return col.clone();
        }
        let mut below: Vec<usize> = (0..self.len()).filter(|&s| self.leq(s, j)).collect();
        below.sort_by_key(|&s| self.parts[s].num_blocks());
        let mut col: HashMap<usize, i64> = HashMap::with_capacity(below.len());
        for (pos, &s) in below.iter().enumerate() {
            if s == j {
                col.insert(s, 1);
                continue;
            }
            let sum: i64 = below[..pos]
                .iter()
                .filter(|&&t| self.parts[t].num_blocks() < self.parts[s].num_blocks() && self.leq(s, t))
                .map(|t| col[t])
                .sum();
            col.insert(s, -sum);
        }
        let col = Arc::new(col);
        self.mobius_to.lock().unwrap().insert(j, col.clone());
        col
    }

    pub fn mobius(&self, i: usize, j: usize) -> Result<i64> {
        if !self.leq(i, j) {
            return Err(Error::NotComparable);
        }
        Ok(self.mobius_column(j)[&i])
    }

    pub fn mobius_to_top(&self, i: usize) -> i64 {
        self.mobius_column(self.top)[&i]
    }
}

/// Möbius function of `BNC(chi)` on the interval `[sigma, pi]`.
pub fn mobius_bnc(sigma: &BncPartition, pi: &BncPartition) -> Result<i64> {
    if sigma.chi != pi.chi {
        return Err(Error::ShapeMismatch);
    }
    if !sigma.leq(pi) {
        return Err(Error::NotComparable);
    }
    let lattice = shared_lattice(&sigma.chi)?;
    let i = lattice.index_of(sigma).expect("validated partition");
    let j = lattice.index_of(pi).expect("validated partition");
    lattice.mobius(i, j)
}

/// Process-wide lattice cache keyed by face map.
pub fn shared_lattice(chi: &ChiMap) -> Result<Arc<BncLattice>> {
    static CACHE: OnceLock<Mutex<HashMap<ChiMap, Arc<BncLattice>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(l) = cache.lock().unwrap().get(chi) {
        return Ok(l.clone());
    }
    let l = Arc::new(BncLattice::new(chi)?);
    cache.lock().unwrap().entry(chi.clone()).or_insert(l.clone());
    Ok(l)
}
