use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A generator or its inverse, tagged with the factor it belongs to.
///
/// The derived order (factor, generator, inverse-last) is the alphabet order
/// used for lexicographic enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub factor: usize,
    pub gen: usize,
    pub inverse: bool,
}

impl Letter {
    pub const fn new(factor: usize, gen: usize, inverse: bool) -> Self {
        Self { factor, gen, inverse }
    }

    pub fn inv(self) -> Self {
        Self { inverse: !self.inverse, ..self }
    }

    pub fn cancels(self, other: Letter) -> bool {
        self.factor == other.factor && self.gen == other.gen && self.inverse != other.inverse
    }
}

/// Reduced word in a free product whose factors are treated as free groups.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

/// Maximal run of letters from a single factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Syllable<'a> {
    pub factor: usize,
    pub letters: &'a [Letter],
}

impl Word {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Freely reduces a raw letter sequence. Stack-based reduction is
    /// confluent, so the result does not depend on cancellation order.
    pub fn reduce<I: IntoIterator<Item = Letter>>(raw: I) -> Self {
        let mut stack: Vec<Letter> = Vec::new();
        for l in raw {
            match stack.last() {
                Some(&top) if top.cancels(l) => {
                    stack.pop();
                }
                _ => stack.push(l),
            }
        }
        Self { letters: stack }
    }

    /// Wraps letters already known to be reduced.
    pub(crate) fn from_reduced(letters: Vec<Letter>) -> Self {
        debug_assert!(letters.windows(2).all(|w| !w[0].cancels(w[1])));
        Self { letters }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    /// `self * other`, reduced.
    pub fn concat(&self, other: &Word) -> Word {
        Word::reduce(self.letters.iter().chain(other.letters.iter()).copied())
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|l| l.inv()).collect() }
    }

    /// Appends a letter that does not cancel the last one.
    pub(crate) fn extended(&self, l: Letter) -> Word {
        let mut letters = Vec::with_capacity(self.letters.len() + 1);
        letters.extend_from_slice(&self.letters);
        letters.push(l);
        Word { letters }
    }

    pub fn syllables(&self) -> Vec<Syllable<'_>> {
        let mut out = Vec::new();
        let mut start = 0;
        for i in 1..=self.letters.len() {
            if i == self.letters.len() || self.letters[i].factor != self.letters[start].factor {
                if i > start {
                    out.push(Syllable { factor: self.letters[start].factor, letters: &self.letters[start..i] });
                }
                start = i;
            }
        }
        out
    }

    /// True when every letter belongs to `factor`.
    pub fn in_factor(&self, factor: usize) -> bool {
        self.letters.iter().all(|l| l.factor == factor)
    }
}

/// Name and generator labels of one free factor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorSpec {
    pub name: String,
    pub generators: Vec<String>,
}

/// Free product of factors, each regarded as free on its declared generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeProduct {
    factors: Vec<FactorSpec>,
}

impl FreeProduct {
    pub fn new(factors: Vec<FactorSpec>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Invalid("a free product needs at least one factor".into()));
        }
        for (i, f) in factors.iter().enumerate() {
            if f.generators.is_empty() {
                return Err(Error::Invalid(format!("factor {:?} has no generators", f.name)));
            }
            if factors[..i].iter().any(|g| g.name == f.name) {
                return Err(Error::Invalid(format!("duplicate factor name {:?}", f.name)));
            }
            for (j, label) in f.generators.iter().enumerate() {
                if label.is_empty() || label.contains(char::is_whitespace) || label.contains('^') {
                    return Err(Error::Invalid(format!("bad generator label {label:?}")));
                }
                if f.generators[..j].contains(label) {
                    return Err(Error::Invalid(format!(
                        "duplicate generator {label:?} in factor {:?}",
                        f.name
                    )));
                }
            }
        }
        Ok(Self { factors })
    }

    /// `k` cyclic factors named `F1..Fk` with generators `g1..gk`.
    pub fn cyclic(k: usize) -> Self {
        let factors = (1..=k)
            .map(|i| FactorSpec { name: format!("F{i}"), generators: vec![format!("g{i}")] })
            .collect();
        Self { factors }
    }

    pub fn factors(&self) -> &[FactorSpec] {
        &self.factors
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    /// All letters in alphabet order.
    pub fn alphabet(&self) -> Vec<Letter> {
        let mut out = Vec::new();
        for (f, spec) in self.factors.iter().enumerate() {
            for g in 0..spec.generators.len() {
                out.push(Letter::new(f, g, false));
                out.push(Letter::new(f, g, true));
            }
        }
        out
    }

    /// Letters of a single factor in alphabet order.
    pub fn factor_alphabet(&self, factor: usize) -> Vec<Letter> {
        self.alphabet().into_iter().filter(|l| l.factor == factor).collect()
    }

    fn label_is_unique(&self, label: &str) -> bool {
        self.factors.iter().filter(|f| f.generators.iter().any(|g| g == label)).count() == 1
    }

    /// Resolves `label` or `factor.label`.
    pub fn lookup(&self, token: &str) -> Result<(usize, usize)> {
        if let Some((fname, label)) = token.split_once('.') {
            if let Some(f) = self.factors.iter().position(|f| f.name == fname) {
                if let Some(g) = self.factors[f].generators.iter().position(|g| g == label) {
                    return Ok((f, g));
                }
            }
        }
        let hits: Vec<(usize, usize)> = self
            .factors
            .iter()
            .enumerate()
            .filter_map(|(f, spec)| spec.generators.iter().position(|g| g == token).map(|g| (f, g)))
            .collect();
        match hits.len() {
            0 => Err(Error::UnknownGenerator(token.to_string())),
            1 => Ok(hits[0]),
            _ => Err(Error::AmbiguousGenerator(token.to_string())),
        }
    }

    /// Parses whitespace-separated letters such as `a b^-1 F2.c⁻¹` and reduces.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut raw = Vec::new();
        for tok in text.split_whitespace() {
            let (base, inverse) = if let Some(b) = tok.strip_suffix("^-1") {
                (b, true)
            } else if let Some(b) = tok.strip_suffix("⁻¹") {
                (b, true)
            } else {
                (tok, false)
            };
            if base == "1" {
                continue;
            }
            let (f, g) = self.lookup(base)?;
            raw.push(Letter::new(f, g, inverse));
        }
        Ok(Word::reduce(raw))
    }

    pub fn letter_name(&self, l: Letter) -> String {
        let spec = &self.factors[l.factor];
        let label = &spec.generators[l.gen];
        let base = if self.label_is_unique(label) { label.clone() } else { format!("{}.{}", spec.name, label) };
        if l.inverse {
            format!("{base}^-1")
        } else {
            base
        }
    }

    /// Inverse of [`FreeProduct::parse_word`]; the identity prints as `1`.
    pub fn format_word(&self, w: &Word) -> String {
        if w.is_identity() {
            return "1".into();
        }
        w.letters().iter().map(|&l| self.letter_name(l)).collect::<Vec<_>>().join(" ")
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        for l in w.letters() {
            let ok = self.factors.get(l.factor).is_some_and(|f| l.gen < f.generators.len());
            if !ok {
                return Err(Error::UnknownGenerator(format!("factor {} generator {}", l.factor, l.gen)));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}{}", self.factor, self.gen, if self.inverse { "^-1" } else { "" })
    }
}
