//! Joint distributions of c-bi-free families and the three equivalent descriptions.

use std::collections::{BTreeMap, HashSet};

use num_traits::Zero;
use serde::Serialize;

use crate::bnc::{shared_lattice, Face};
use crate::cumulants::{CumulantEngine, CumulantTable};
use crate::dist::{words_over, Generator, MomentSource, TwoStateDistribution, Word};
use crate::error::{Error, Result};
use crate::lr::{DiagramSystem, OmegaMap};
use crate::scalar::{format_q, qi, Q};

/// Family index of each letter of an alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyAssignment {
    families: Vec<u32>,
}

impl FamilyAssignment {
    pub fn from_alphabet(alphabet: &[Generator]) -> Self {
        FamilyAssignment {
            families: alphabet.iter().map(|g| g.family).collect(),
        }
    }

    /// Every symbol must be mapped.
    pub fn from_symbols(alphabet: &[Generator], map: &BTreeMap<String, u32>) -> Result<Self> {
        let families = alphabet
            .iter()
            .map(|g| {
                map.get(&g.symbol)
                    .copied()
                    .ok_or_else(|| Error::UnknownGenerator(g.symbol.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FamilyAssignment { families })
    }

    pub fn family(&self, letter: usize) -> u32 {
        self.families[letter]
    }

    /// The word meets at least two families.
    pub fn is_mixed(&self, word: &[usize]) -> bool {
        word.iter().any(|&l| self.families[l] != self.families[word[0]])
    }
}

/// Several distributions over disjoint alphabets viewed on the union alphabet.
/// Only words inside a single input have moments.
#[derive(Clone, Debug)]
pub struct JointSource<'a> {
    alphabet: Vec<Generator>,
    owner: Vec<(usize, usize)>,
    dists: &'a [TwoStateDistribution],
}

impl<'a> JointSource<'a> {
    pub fn new(dists: &'a [TwoStateDistribution]) -> Result<Self> {
        let mut alphabet = Vec::new();
        let mut owner = Vec::new();
        let mut symbols = HashSet::new();
        let mut family_owner: BTreeMap<u32, usize> = BTreeMap::new();
        for (d, dist) in dists.iter().enumerate() {
            for (i, g) in dist.alphabet().iter().enumerate() {
                if g.unit {
                    continue;
                }
                if !symbols.insert(g.symbol.clone()) {
                    return Err(Error::AlphabetCollision(g.symbol.clone()));
                }
                if *family_owner.entry(g.family).or_insert(d) != d {
                    return Err(Error::Precondition(format!(
                        "family {} appears in two inputs",
                        g.family
                    )));
                }
                alphabet.push(g.clone());
                owner.push((d, i));
            }
        }
        Ok(JointSource {
            alphabet,
            owner,
            dists,
        })
    }

    pub fn alphabet(&self) -> &[Generator] {
        &self.alphabet
    }

    /// Input index and local word, if the word lies in one input.
    pub fn localize(&self, word: &[usize]) -> Option<(usize, Word)> {
        let d = self.owner[*word.first()?].0;
        if word.iter().any(|&l| self.owner[l].0 != d) {
            return None;
        }
        Some((d, word.iter().map(|&l| self.owner[l].1).collect()))
    }

    pub fn omega(&self, word: &[usize]) -> OmegaMap {
        OmegaMap::new(word.iter().map(|&l| self.alphabet[l].family).collect())
    }

    pub fn symbol_index(&self, symbol: &str) -> Option<usize> {
        self.alphabet.iter().position(|g| g.symbol == symbol)
    }
}

impl MomentSource for JointSource<'_> {
    fn face(&self, letter: usize) -> Face {
        self.alphabet[letter].face
    }

    fn family(&self, letter: usize) -> u32 {
        self.alphabet[letter].family
    }

    fn moments(&self, word: &[usize]) -> Result<(Q, Q)> {
        if word.is_empty() {
            return Ok((qi(1), qi(1)));
        }
        let (d, local) = self
            .localize(word)
            .ok_or_else(|| Error::Precondition("word mixes inputs".into()))?;
        self.dists[d].moments(&local)
    }
}

/// Joint distribution whose mixed cumulants vanish and whose pure cumulants are the inputs'.
pub fn cbf_join(dists: &[TwoStateDistribution], degree: usize) -> Result<TwoStateDistribution> {
    if let [single] = dists {
        if single.degree() == degree {
            return Ok(single.clone());
        }
    }
    let joint = JointSource::new(dists)?;
    let tables = dists
        .iter()
        .map(|d| CumulantTable::from_distribution(d, degree))
        .collect::<Result<Vec<_>>>()?;
    let table = CumulantTable::from_fn(joint.alphabet().to_vec(), degree, |w| {
        Ok(match joint.localize(w) {
            Some((d, local)) => tables[d].get(&local)?.clone(),
            None => (Q::zero(), Q::zero()),
        })
    })?;
    table.to_distribution()
}

/// psi-moment as a sum over `BNC(chi)` weighted by Möbius sums below the colouring.
pub fn psi_moment_formula(word: &[usize], src: &JointSource<'_>) -> Result<Q> {
    if word.is_empty() {
        return Ok(qi(1));
    }
    let omega = src.omega(word);
    let lattice = shared_lattice(&src.chi(word)?)?;
    let below: Vec<usize> = (0..lattice.len())
        .filter(|&j| omega.admits(lattice.partitions()[j].blocks()))
        .collect();
    let mut total = Q::zero();
    for &i in &below {
        let weight: i64 = below
            .iter()
            .filter(|&&j| lattice.leq(i, j))
            .map(|&j| lattice.mobius(i, j))
            .sum::<Result<i64>>()?;
        if weight == 0 {
            continue;
        }
        let mut term = qi(weight);
        for b in lattice.partitions()[i].blocks() {
            let sub: Word = b.iter().map(|&k| word[k]).collect();
            term *= src.moments(&sub)?.1;
        }
        total += term;
    }
    Ok(total)
}

/// phi-moment as a sum of `C'_D phi_D` over the laterally refined capped diagrams.
pub fn phi_moment_formula(word: &[usize], src: &JointSource<'_>) -> Result<Q> {
    if word.is_empty() {
        return Ok(qi(1));
    }
    let sys = DiagramSystem::build(&src.chi(word)?, &src.omega(word))?;
    let mut total = Q::zero();
    for d in sys.latcap() {
        let c = sys.cprime(d)?;
        if c != 0 {
            total += qi(c) * d.phi_d(src, word)?;
        }
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CumulantKind {
    #[serde(rename = "kappa")]
    Kappa,
    #[serde(rename = "K")]
    Conditional,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub word: String,
    pub kind: CumulantKind,
    pub value: Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndependenceReport {
    pub independent: bool,
    pub witness: Option<Witness>,
}

impl Witness {
    pub fn describe(&self) -> String {
        let kind = match self.kind {
            CumulantKind::Kappa => "kappa",
            CumulantKind::Conditional => "K",
        };
        format!("{kind}({}) = {}", self.word, format_q(&self.value))
    }
}

/// Checks that every mixed cumulant up to `degree` vanishes; reports the first that does not.
pub fn is_cbf_independent(
    joint: &TwoStateDistribution,
    grouping: &FamilyAssignment,
    degree: usize,
) -> Result<IndependenceReport> {
    let mut engine = CumulantEngine::new(joint);
    for w in words_over(&joint.proper_letters(), degree.min(joint.degree())) {
        if !grouping.is_mixed(&w) {
            continue;
        }
        for kind in [CumulantKind::Kappa, CumulantKind::Conditional] {
            let value = match kind {
                CumulantKind::Kappa => engine.kappa(&w)?,
                CumulantKind::Conditional => engine.conditional(&w)?,
            };
            if !value.is_zero() {
                return Ok(IndependenceReport {
                    independent: false,
                    witness: Some(Witness {
                        word: joint.word_key(&w),
                        kind,
                        value,
                    }),
                });
            }
        }
    }
    Ok(IndependenceReport {
        independent: true,
        witness: None,
    })
}
