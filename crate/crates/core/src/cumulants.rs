//! (l,r)-cumulants from psi and conditional cumulants from (phi, psi).

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::bnc::{shared_lattice, BlockClass, BncLattice, BncPartition, ChiMap, Face};
use crate::dist::{parse_word, word_key, words_over, Generator, MomentSource, TwoStateDistribution, Word};
use crate::error::{Error, Result};
use crate::scalar::{format_q, parse_q, qi, Q};

fn subword(word: &[usize], block: &[usize]) -> Word {
    block.iter().map(|&i| word[i]).collect()
}

/// Memoizing evaluator of both cumulant families over one moment source.
pub struct CumulantEngine<S: MomentSource> {
    src: S,
    kappa: HashMap<Word, Q>,
    cond: HashMap<Word, Q>,
}

impl<S: MomentSource> CumulantEngine<S> {
    pub fn new(src: S) -> Self {
        CumulantEngine {
            src,
            kappa: HashMap::new(),
            cond: HashMap::new(),
        }
    }

    pub fn source(&self) -> &S {
        &self.src
    }

    fn lattice(&self, word: &[usize]) -> Result<std::sync::Arc<BncLattice>> {
        if word.is_empty() {
            return Err(Error::Precondition("cumulants need a nonempty word".into()));
        }
        shared_lattice(&self.src.chi(word)?)
    }

    /// `kappa_chi(word)` by Möbius inversion of psi over `BNC(chi)`.
    pub fn kappa(&mut self, word: &[usize]) -> Result<Q> {
        if let Some(v) = self.kappa.get(word) {
            return Ok(v.clone());
        }
        let lattice = self.lattice(word)?;
        let mut total = Q::zero();
        for (i, part) in lattice.partitions().iter().enumerate() {
            let mu = lattice.mobius_to_top(i);
            if mu == 0 {
                continue;
            }
            let mut term = qi(mu);
            for b in part.blocks() {
                term *= self.src.moments(&subword(word, b))?.1;
                if term.is_zero() {
                    break;
                }
            }
            total += term;
        }
        self.kappa.insert(word.to_vec(), total.clone());
        Ok(total)
    }

    /// `K_chi(word)` by the defining recursion.
    pub fn conditional(&mut self, word: &[usize]) -> Result<Q> {
        if let Some(v) = self.cond.get(word) {
            return Ok(v.clone());
        }
        let lattice = self.lattice(word)?;
        let mut total = self.src.moments(word)?.0;
        let top = lattice.top_index();
        for (i, part) in lattice.partitions().iter().enumerate() {
            if i == top {
                continue;
            }
            total -= self.product(word, part, lattice.classes(i), false)?;
        }
        self.cond.insert(word.to_vec(), total.clone());
        Ok(total)
    }

    /// `K_pi` (or `kappa_pi` when `psi_only`) on the sub-words of `word`.
    fn product(
        &mut self,
        word: &[usize],
        part: &BncPartition,
        classes: &[BlockClass],
        psi_only: bool,
    ) -> Result<Q> {
        let mut term = Q::one();
        for (b, class) in part.blocks().iter().zip(classes) {
            let sub = subword(word, b);
            let v = if psi_only || *class == BlockClass::Interior {
                self.kappa(&sub)?
            } else {
                self.conditional(&sub)?
            };
            term *= v;
            if term.is_zero() {
                break;
            }
        }
        Ok(term)
    }

    /// `K_pi(word)` for any partition of the word's face map.
    pub fn conditional_of(&mut self, word: &[usize], part: &BncPartition) -> Result<Q> {
        let classes = part.classify_blocks();
        self.product(word, part, &classes, false)
    }

    /// `kappa_pi(word)` for any partition of the word's face map.
    pub fn kappa_of(&mut self, word: &[usize], part: &BncPartition) -> Result<Q> {
        let classes = part.classify_blocks();
        self.product(word, part, &classes, true)
    }
}

pub fn lr_cumulant<S: MomentSource>(src: &S, word: &[usize]) -> Result<Q> {
    CumulantEngine::new(src).kappa(word)
}

pub fn c_cumulant<S: MomentSource>(src: &S, word: &[usize]) -> Result<Q> {
    CumulantEngine::new(src).conditional(word)
}

/// `(kappa, K)` for every word of length `1..=degree`.
#[derive(Clone, Debug, PartialEq)]
pub struct CumulantTable {
    alphabet: Vec<Generator>,
    degree: usize,
    entries: HashMap<Word, (Q, Q)>,
}

impl CumulantTable {
    pub fn from_distribution(dist: &TwoStateDistribution, degree: usize) -> Result<Self> {
        if degree > dist.degree() {
            return Err(Error::DegreeExceeded {
                len: degree,
                degree: dist.degree(),
            });
        }
        let mut engine = CumulantEngine::new(dist);
        let mut entries = HashMap::new();
        for w in words_over(&dist.proper_letters(), degree) {
            let k = engine.kappa(&w)?;
            let c = engine.conditional(&w)?;
            entries.insert(w, (k, c));
        }
        Ok(CumulantTable {
            alphabet: dist.alphabet().to_vec(),
            degree,
            entries,
        })
    }

    /// Fills every word up to `degree` from `f`, which returns `(kappa, K)`.
    pub fn from_fn<F>(alphabet: Vec<Generator>, degree: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(&[usize]) -> Result<(Q, Q)>,
    {
        let letters: Vec<usize> = (0..alphabet.len()).filter(|&i| !alphabet[i].unit).collect();
        let mut entries = HashMap::new();
        for w in words_over(&letters, degree) {
            let v = f(&w)?;
            entries.insert(w, v);
        }
        Ok(CumulantTable {
            alphabet,
            degree,
            entries,
        })
    }

    pub fn alphabet(&self) -> &[Generator] {
        &self.alphabet
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn get(&self, word: &[usize]) -> Result<&(Q, Q)> {
        self.entries
            .get(word)
            .ok_or_else(|| Error::IncompleteTable(word_key(&self.alphabet, word)))
    }

    pub fn entries(&self) -> Vec<(&Word, &(Q, Q))> {
        let mut v: Vec<_> = self.entries.iter().collect();
        v.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then(a.0.cmp(b.0)));
        v
    }

    /// Moments of every word up to the table degree.
    pub fn to_distribution(&self) -> Result<TwoStateDistribution> {
        TwoStateDistribution::from_fn(self.alphabet.clone(), self.degree, |w| {
            cumulants_to_moments(self, w)
        })
    }

    pub fn to_json(&self) -> CumulantTableJson {
        CumulantTableJson {
            alphabet: self.alphabet.clone(),
            degree: self.degree,
            cumulants: self
                .entries
                .iter()
                .map(|(w, (k, c))| {
                    (
                        word_key(&self.alphabet, w),
                        CumulantJson {
                            kappa: format_q(k),
                            cond: format_q(c),
                        },
                    )
                })
                .collect(),
        }
    }

    pub fn from_json(raw: CumulantTableJson) -> Result<Self> {
        let mut entries = HashMap::new();
        for (key, v) in &raw.cumulants {
            let w = parse_word(&raw.alphabet, key)?;
            entries.insert(w, (parse_q(&v.kappa)?, parse_q(&v.cond)?));
        }
        let table = CumulantTable {
            alphabet: raw.alphabet,
            degree: raw.degree,
            entries,
        };
        let letters: Vec<usize> = (0..table.alphabet.len()).collect();
        for w in words_over(&letters, table.degree) {
            table.get(&w)?;
        }
        Ok(table)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CumulantJson {
    pub kappa: String,
    #[serde(rename = "K")]
    pub cond: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CumulantTableJson {
    pub alphabet: Vec<Generator>,
    pub degree: usize,
    pub cumulants: BTreeMap<String, CumulantJson>,
}

/// `(phi, psi)` of `word` from a cumulant table.
pub fn cumulants_to_moments(table: &CumulantTable, word: &[usize]) -> Result<(Q, Q)> {
    if word.is_empty() {
        return Ok((Q::one(), Q::one()));
    }
    let chi = ChiMap::new(word.iter().map(|&l| table.alphabet[l].face).collect())?;
    let lattice = shared_lattice(&chi)?;
    let mut phi = Q::zero();
    let mut psi = Q::zero();
    for (i, part) in lattice.partitions().iter().enumerate() {
        let mut k_term = Q::one();
        let mut c_term = Q::one();
        for (b, class) in part.blocks().iter().zip(lattice.classes(i)) {
            let (k, c) = table.get(&subword(word, b))?;
            k_term *= k;
            c_term *= if *class == BlockClass::Interior { k } else { c };
        }
        phi += c_term;
        psi += k_term;
    }
    Ok((phi, psi))
}

/// Products of consecutive letters treated as single letters.
pub struct ProductSource<S: MomentSource> {
    src: S,
    groups: Vec<Word>,
}

impl<S: MomentSource> ProductSource<S> {
    pub fn new(src: S, groups: Vec<Word>) -> Result<Self> {
        for (g, word) in groups.iter().enumerate() {
            let Some(&first) = word.first() else {
                return Err(Error::InvalidGrouping("empty group".into()));
            };
            if word.iter().any(|&l| src.face(l) != src.face(first)) {
                return Err(Error::MixedFaceGroup(g));
            }
        }
        Ok(ProductSource { src, groups })
    }
}

impl<S: MomentSource> MomentSource for ProductSource<S> {
    fn face(&self, letter: usize) -> Face {
        self.src.face(self.groups[letter][0])
    }
    fn family(&self, letter: usize) -> u32 {
        self.src.family(self.groups[letter][0])
    }
    fn moments(&self, word: &[usize]) -> Result<(Q, Q)> {
        let flat: Word = word.iter().flat_map(|&l| self.groups[l].iter().copied()).collect();
        self.src.moments(&flat)
    }
}

/// Interval partition of `[n]` given by `boundaries = [0, k1, ..., n]`.
fn grouping_partition(chi: &ChiMap, boundaries: &[usize]) -> Result<BncPartition> {
    let n = chi.len();
    if boundaries.first() != Some(&0)
        || boundaries.last() != Some(&n)
        || boundaries.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(Error::InvalidGrouping(format!(
            "boundaries must increase strictly from 0 to {n}"
        )));
    }
    let blocks: Vec<Vec<usize>> = boundaries.windows(2).map(|w| (w[0]..w[1]).collect()).collect();
    for (g, b) in blocks.iter().enumerate() {
        if b.iter().any(|&i| chi.face(i) != chi.face(b[0])) {
            return Err(Error::MixedFaceGroup(g));
        }
    }
    BncPartition::from_blocks(chi.clone(), blocks)
}

fn products_sum<S: MomentSource>(
    src: &S,
    boundaries: &[usize],
    word: &[usize],
    psi_only: bool,
) -> Result<Q> {
    let chi = src.chi(word)?;
    let groups = grouping_partition(&chi, boundaries)?;
    let lattice = shared_lattice(&chi)?;
    let one = BncPartition::one(&chi);
    let mut engine = CumulantEngine::new(src);
    let mut total = Q::zero();
    for part in lattice.partitions() {
        if part.join(&groups)? != one {
            continue;
        }
        total += if psi_only {
            engine.kappa_of(word, part)?
        } else {
            engine.conditional_of(word, part)?
        };
    }
    Ok(total)
}

/// `K` of the grouped products `(a_1..a_k1)(..)...(..a_n)` via the join formula.
pub fn cumulant_of_products<S: MomentSource>(
    src: &S,
    boundaries: &[usize],
    word: &[usize],
) -> Result<Q> {
    products_sum(src, boundaries, word, false)
}

/// The `kappa` analogue of [`cumulant_of_products`].
pub fn kappa_of_products<S: MomentSource>(
    src: &S,
    boundaries: &[usize],
    word: &[usize],
) -> Result<Q> {
    products_sum(src, boundaries, word, true)
}
