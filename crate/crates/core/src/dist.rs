//! Two-state distributions stored extensionally on words.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bnc::{ChiMap, Face};
use crate::error::{Error, Result};
use crate::scalar::{format_q, parse_q, q, Q};

/// A word is a sequence of indices into an alphabet.
pub type Word = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Generator {
    pub symbol: String,
    pub family: u32,
    pub face: Face,
    /// Unit generators leave every moment unchanged and are never stored in words.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub unit: bool,
}

impl Generator {
    pub fn new(symbol: impl Into<String>, family: u32, face: Face) -> Self {
        Generator {
            symbol: symbol.into(),
            family,
            face,
            unit: false,
        }
    }
}

/// Anything that can answer `(phi, psi)` for words over an indexed alphabet.
pub trait MomentSource {
    fn face(&self, letter: usize) -> Face;
    fn family(&self, letter: usize) -> u32;
    fn moments(&self, word: &[usize]) -> Result<(Q, Q)>;

    fn chi(&self, word: &[usize]) -> Result<ChiMap> {
        ChiMap::new(word.iter().map(|&l| self.face(l)).collect())
    }
}

impl<S: MomentSource + ?Sized> MomentSource for &S {
    fn face(&self, letter: usize) -> Face {
        (**self).face(letter)
    }
    fn family(&self, letter: usize) -> u32 {
        (**self).family(letter)
    }
    fn moments(&self, word: &[usize]) -> Result<(Q, Q)> {
        (**self).moments(word)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoStateDistribution {
    alphabet: Vec<Generator>,
    degree: usize,
    moments: HashMap<Word, (Q, Q)>,
}

/// All words of length `1..=degree` over `letters`, shortest first.
pub fn words_over(letters: &[usize], degree: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut layer: Vec<Word> = vec![Vec::new()];
    for _ in 0..degree {
        let mut next = Vec::with_capacity(layer.len() * letters.len());
        for w in &layer {
            for &l in letters {
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

impl TwoStateDistribution {
    /// Validates symbol uniqueness, unitality and totality to `degree`.
    pub fn new(
        alphabet: Vec<Generator>,
        degree: usize,
        mut moments: HashMap<Word, (Q, Q)>,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        for g in &alphabet {
            if !seen.insert(g.symbol.as_str()) {
                return Err(Error::AlphabetCollision(g.symbol.clone()));
            }
        }
        match moments.get(&Vec::new()) {
            Some((p, s)) if !(p.is_one() && s.is_one()) => {
                return Err(Error::Schema("empty word must map to (1, 1)".into()))
            }
            _ => {
                moments.insert(Vec::new(), (Q::one(), Q::one()));
            }
        }
        let dist = TwoStateDistribution {
            alphabet,
            degree,
            moments,
        };
        for w in words_over(&dist.proper_letters(), degree) {
            if !dist.moments.contains_key(&w) {
                return Err(Error::MissingMoment(dist.word_key(&w)));
            }
        }
        Ok(dist)
    }

    /// Fills every word up to `degree` from `f`.
    pub fn from_fn<F>(alphabet: Vec<Generator>, degree: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(&[usize]) -> Result<(Q, Q)>,
    {
        let letters: Vec<usize> = (0..alphabet.len()).filter(|&i| !alphabet[i].unit).collect();
        let mut moments = HashMap::new();
        for w in words_over(&letters, degree) {
            let m = f(&w)?;
            moments.insert(w, m);
        }
        TwoStateDistribution::new(alphabet, degree, moments)
    }

    /// Distribution of new letters, each a linear combination `Σ c_i x_i` of old proper letters.
    pub fn linear_image(&self, alphabet: Vec<Generator>, combos: &[Vec<(usize, Q)>]) -> Result<Self> {
        if combos.len() != alphabet.len() {
            return Err(Error::Precondition("one combination per new letter".into()));
        }
        TwoStateDistribution::from_fn(alphabet, self.degree, |w| {
            let mut phi = Q::zero();
            let mut psi = Q::zero();
            let mut stack: Vec<(Word, Q)> = vec![(Vec::new(), Q::one())];
            for &letter in w {
                let mut next = Vec::new();
                for (prefix, c) in &stack {
                    for (old, a) in &combos[letter] {
                        let mut p = prefix.clone();
                        p.push(*old);
                        next.push((p, c * a));
                    }
                }
                stack = next;
            }
            for (old, c) in stack {
                let (p, s) = self.moments(&old)?;
                phi += &c * p;
                psi += c * s;
            }
            Ok((phi, psi))
        })
    }

    /// Random small rationals for every word.
    pub fn random<R: Rng>(alphabet: Vec<Generator>, degree: usize, rng: &mut R) -> Self {
        TwoStateDistribution::from_fn(alphabet, degree, |_| {
            Ok((random_small_q(rng), random_small_q(rng)))
        })
        .expect("generated table is total")
    }

    pub fn alphabet(&self) -> &[Generator] {
        &self.alphabet
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Letters that are not units.
    pub fn proper_letters(&self) -> Vec<usize> {
        (0..self.alphabet.len())
            .filter(|&i| !self.alphabet[i].unit)
            .collect()
    }

    pub fn symbol_index(&self, symbol: &str) -> Option<usize> {
        self.alphabet.iter().position(|g| g.symbol == symbol)
    }

    pub fn word_key(&self, word: &[usize]) -> String {
        word_key(&self.alphabet, word)
    }

    pub fn parse_word(&self, key: &str) -> Result<Word> {
        parse_word(&self.alphabet, key)
    }

    /// Copy with one unit generator per face appended.
    pub fn with_units(&self) -> TwoStateDistribution {
        let mut out = self.clone();
        for (sym, face) in [("1_L", Face::L), ("1_R", Face::R)] {
            out.alphabet.push(Generator {
                symbol: sym.into(),
                family: 0,
                face,
                unit: true,
            });
        }
        out
    }

    /// Stored words with their moments, shortest first then lexicographic.
    pub fn entries(&self) -> Vec<(&Word, &(Q, Q))> {
        let mut v: Vec<_> = self.moments.iter().collect();
        v.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then(a.0.cmp(b.0)));
        v
    }

    /// Replaces the moments of one stored word.
    pub fn set_moment(&mut self, word: &[usize], value: (Q, Q)) -> Result<()> {
        match self.moments.get_mut(word) {
            Some(slot) if !word.is_empty() => {
                *slot = value;
                Ok(())
            }
            _ => Err(Error::MissingMoment(self.word_key(word))),
        }
    }

    /// Restriction to a degree no larger than the stored one.
    pub fn truncate(&self, degree: usize) -> TwoStateDistribution {
        let mut out = self.clone();
        out.moments.retain(|w, _| w.len() <= degree);
        out.degree = degree.min(self.degree);
        out
    }

    pub fn to_json(&self) -> DistributionJson {
        DistributionJson {
            alphabet: self.alphabet.clone(),
            degree: self.degree,
            moments: self
                .moments
                .iter()
                .filter(|(w, _)| !w.is_empty())
                .map(|(w, (p, s))| {
                    (
                        self.word_key(w),
                        MomentJson {
                            phi: format_q(p),
                            psi: format_q(s),
                        },
                    )
                })
                .collect(),
        }
    }

    pub fn from_json(raw: DistributionJson) -> Result<Self> {
        let mut moments = HashMap::new();
        for (key, m) in &raw.moments {
            let w = parse_word(&raw.alphabet, key)?;
            if w.len() > raw.degree {
                continue;
            }
            let p = parse_q(&m.phi).map_err(|e| e.within(format_args!("word `{key}`, phi")))?;
            let s = parse_q(&m.psi).map_err(|e| e.within(format_args!("word `{key}`, psi")))?;
            moments.insert(w, (p, s));
        }
        TwoStateDistribution::new(raw.alphabet, raw.degree, moments)
    }
}

impl MomentSource for TwoStateDistribution {
    fn face(&self, letter: usize) -> Face {
        self.alphabet[letter].face
    }

    fn family(&self, letter: usize) -> u32 {
        self.alphabet[letter].family
    }

    fn moments(&self, word: &[usize]) -> Result<(Q, Q)> {
        let stripped: Word;
        let key = if word.iter().any(|&l| self.alphabet[l].unit) {
            stripped = word.iter().copied().filter(|&l| !self.alphabet[l].unit).collect();
            &stripped[..]
        } else {
            word
        };
        if key.len() > self.degree {
            return Err(Error::DegreeExceeded {
                len: key.len(),
                degree: self.degree,
            });
        }
        self.moments
            .get(key)
            .cloned()
            .ok_or_else(|| Error::MissingMoment(self.word_key(key)))
    }
}

pub fn word_key(alphabet: &[Generator], word: &[usize]) -> String {
    word.iter()
        .map(|&l| alphabet[l].symbol.as_str())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn parse_word(alphabet: &[Generator], key: &str) -> Result<Word> {
    if key.trim().is_empty() {
        return Ok(Vec::new());
    }
    key.split(',')
        .map(|s| {
            let s = s.trim();
            alphabet
                .iter()
                .position(|g| g.symbol == s)
                .ok_or_else(|| Error::UnknownGenerator(s.to_string()))
        })
        .collect()
}

/// Numerator in `-3..=3`, denominator in `1..=3`.
pub fn random_small_q<R: Rng>(rng: &mut R) -> Q {
    let n = rng.gen_range(-3..=3);
    let d = rng.gen_range(1..=3);
    if n == 0 {
        Q::zero()
    } else {
        q(n, d)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MomentJson {
    pub phi: String,
    pub psi: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionJson {
    pub alphabet: Vec<Generator>,
    pub degree: usize,
    pub moments: BTreeMap<String, MomentJson>,
}
