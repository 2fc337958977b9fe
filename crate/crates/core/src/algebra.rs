//! Free unital noncommutative DGAs over F2.
//!
//! Generators carry a Z/2 degree, an exact rational action and the pair of
//! link components their chord runs between. Elements are finite sets of
//! words: a word is present with coefficient 1 or absent, so adding the same
//! word twice cancels it.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_rational::Ratio;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Exact chord length.
pub type Action = Ratio<i64>;

/// Parses `"num/den"` or a bare integer.
pub fn parse_action(s: &str) -> Result<Action> {
    let bad = || Error::BadRational(s.to_string());
    let t = s.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: i64 = n.parse().map_err(|_| bad())?;
    let d: i64 = d.parse().map_err(|_| bad())?;
    if d == 0 {
        return Err(bad());
    }
    Ok(Ratio::new(n, d))
}

/// Canonical `"num/den"` rendering (reduced, positive denominator).
pub fn format_action(a: &Action) -> String {
    format!("{}/{}", a.numer(), a.denom())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    /// 0 or 1.
    pub degree: u8,
    pub action: Action,
    /// Component index of the chord's lower endpoint.
    pub from: usize,
    /// Component index of the chord's upper endpoint.
    pub to: usize,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: u8, action: Action, from: usize, to: usize) -> Self {
        Generator { name: name.into(), degree: degree % 2, action, from, to }
    }

    pub fn is_pure(&self) -> bool {
        self.from == self.to
    }

    pub fn is_mixed(&self) -> bool {
        !self.is_pure()
    }
}

/// A monomial; the empty word is the unit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(pub Vec<GenId>);

impl Word {
    pub fn unit() -> Self {
        Word(Vec::new())
    }

    pub fn single(g: GenId) -> Self {
        Word(vec![g])
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[GenId] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

/// F2-linear combination of words.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Element(BTreeSet<Word>);

impl Element {
    pub fn zero() -> Self {
        Element(BTreeSet::new())
    }

    pub fn one() -> Self {
        Element::from_word(Word::unit())
    }

    pub fn from_word(w: Word) -> Self {
        let mut s = BTreeSet::new();
        s.insert(w);
        Element(s)
    }

    pub fn generator(g: GenId) -> Self {
        Element::from_word(Word::single(g))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.0.contains(w)
    }

    /// Words in canonical (lexicographic on generator ids) order.
    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.0.iter()
    }

    /// Adds a single word mod 2.
    pub fn toggle(&mut self, w: Word) {
        if !self.0.remove(&w) {
            self.0.insert(w);
        }
    }

    pub fn add_assign(&mut self, other: &Element) {
        for w in &other.0 {
            self.toggle(w.clone());
        }
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn mul(&self, other: &Element) -> Element {
        let mut out = Element::zero();
        for a in &self.0 {
            for b in &other.0 {
                out.toggle(a.concat(b));
            }
        }
        out
    }

    pub fn left_mul_word(&self, w: &Word) -> Element {
        let mut out = Element::zero();
        for b in &self.0 {
            out.toggle(w.concat(b));
        }
        out
    }

    pub fn right_mul_word(&self, w: &Word) -> Element {
        let mut out = Element::zero();
        for a in &self.0 {
            out.toggle(a.concat(w));
        }
        out
    }
}

impl FromIterator<Word> for Element {
    fn from_iter<I: IntoIterator<Item = Word>>(iter: I) -> Self {
        let mut e = Element::zero();
        for w in iter {
            e.toggle(w);
        }
        e
    }
}

/// A validated DGA: generators, their differentials, and the ordered list
/// of link components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeDga {
    components: Vec<String>,
    generators: Vec<Generator>,
    diff: Vec<Element>,
    index: HashMap<String, GenId>,
}

impl FreeDga {
    /// Validates names, actions, references and grading coherence.
    /// Does not check d^2 = 0; see [`FreeDga::check_d_squared`].
    pub fn new(components: Vec<String>, generators: Vec<Generator>, diff: Vec<Element>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for c in &components {
            if !seen.insert(c.clone()) {
                return Err(Error::DuplicateName(c.clone()));
            }
        }
        let mut index = HashMap::with_capacity(generators.len());
        for (i, g) in generators.iter().enumerate() {
            if index.insert(g.name.clone(), GenId(i)).is_some() {
                return Err(Error::DuplicateName(g.name.clone()));
            }
            if g.action <= Action::zero() {
                return Err(Error::NonpositiveAction(g.name.clone()));
            }
            for c in [g.from, g.to] {
                if c >= components.len() {
                    return Err(Error::UnknownComponent(format!("{} (index {c})", g.name)));
                }
            }
        }
        if diff.len() != generators.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} differentials for {} generators",
                diff.len(),
                generators.len()
            )));
        }
        let dga = FreeDga { components, generators, diff, index };
        for (i, image) in dga.diff.iter().enumerate() {
            let g = &dga.generators[i];
            for w in image.words() {
                for f in w.factors() {
                    if f.0 >= dga.generators.len() {
                        return Err(Error::UnknownGenerator(format!("#{}", f.0)));
                    }
                }
                if dga.word_degree(w) != (g.degree + 1) % 2 {
                    return Err(Error::GradingMismatch {
                        generator: g.name.clone(),
                        word: dga.format_word(w),
                    });
                }
            }
        }
        Ok(dga)
    }

    /// The DGA with no generators: just the unit.
    pub fn trivial() -> Self {
        FreeDga { components: Vec::new(), generators: Vec::new(), diff: Vec::new(), index: HashMap::new() }
    }

    pub fn components(&self) -> &[String] {
        &self.components
    }

    pub fn component_index(&self, name: &str) -> Result<usize> {
        self.components
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::UnknownComponent(name.to_string()))
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = GenId> {
        (0..self.generators.len()).map(GenId)
    }

    pub fn generator(&self, id: GenId) -> &Generator {
        &self.generators[id.0]
    }

    pub fn id(&self, name: &str) -> Result<GenId> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn name(&self, id: GenId) -> &str {
        &self.generators[id.0].name
    }

    pub fn diff(&self, id: GenId) -> &Element {
        &self.diff[id.0]
    }

    fn check_element(&self, e: &Element) -> Result<()> {
        for w in e.words() {
            self.check_word(w)?;
        }
        Ok(())
    }

    fn check_word(&self, w: &Word) -> Result<()> {
        match w.factors().iter().find(|f| f.0 >= self.generators.len()) {
            Some(f) => Err(Error::UnknownGenerator(format!("#{}", f.0))),
            None => Ok(()),
        }
    }

    fn word_degree(&self, w: &Word) -> u8 {
        w.factors().iter().map(|f| self.generators[f.0].degree).sum::<u8>() % 2
    }

    /// Degree mod 2 and total action of a word; the unit measures (0, 0).
    pub fn word_measurements(&self, w: &Word) -> Result<(u8, Action)> {
        self.check_word(w)?;
        let action = w.factors().iter().fold(Action::zero(), |acc, f| acc + self.generators[f.0].action);
        Ok((self.word_degree(w), action))
    }

    fn diff_word_unchecked(&self, w: &Word) -> Element {
        let mut out = Element::zero();
        let f = w.factors();
        for (i, g) in f.iter().enumerate() {
            let image = &self.diff[g.0];
            if image.is_zero() {
                continue;
            }
            for mid in image.words() {
                let mut v = Vec::with_capacity(f.len() - 1 + mid.len());
                v.extend_from_slice(&f[..i]);
                v.extend_from_slice(mid.factors());
                v.extend_from_slice(&f[i + 1..]);
                out.toggle(Word(v));
            }
        }
        out
    }

    /// Extends the differential to arbitrary elements by linearity and the
    /// Leibniz rule (no signs in characteristic 2).
    pub fn apply_differential(&self, e: &Element) -> Result<Element> {
        self.check_element(e)?;
        let mut out = Element::zero();
        for w in e.words() {
            out.add_assign(&self.diff_word_unchecked(w));
        }
        Ok(out)
    }

    /// Generators whose d(d(g)) is nonzero, with the residual.
    pub fn check_d_squared(&self) -> DSquaredReport {
        let failures = self
            .ids()
            .filter_map(|g| {
                let mut r = Element::zero();
                for w in self.diff[g.0].words() {
                    r.add_assign(&self.diff_word_unchecked(w));
                }
                (!r.is_zero()).then_some((g, r))
            })
            .collect();
        DSquaredReport { failures }
    }

    /// A generator with a differential word of action at least its own.
    pub fn energy_failure(&self) -> Option<(GenId, Word)> {
        self.ids().find_map(|g| {
            let a = self.generators[g.0].action;
            self.diff[g.0]
                .words()
                .find(|w| w.factors().iter().fold(Action::zero(), |acc, f| acc + self.generators[f.0].action) >= a)
                .map(|w| (g, w.clone()))
        })
    }

    pub fn format_word(&self, w: &Word) -> String {
        if w.is_unit() {
            return "1".to_string();
        }
        w.factors().iter().map(|f| self.name(*f)).collect::<Vec<_>>().join("·")
    }

    pub fn format_element(&self, e: &Element) -> String {
        if e.is_zero() {
            return "0".to_string();
        }
        e.words().map(|w| self.format_word(w)).collect::<Vec<_>>().join(" + ")
    }

    /// Parses a word given as generator names.
    pub fn word<S: AsRef<str>>(&self, names: &[S]) -> Result<Word> {
        names.iter().map(|n| self.id(n.as_ref())).collect::<Result<Vec<_>>>().map(Word)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DSquaredReport {
    pub failures: Vec<(GenId, Element)>,
}

impl DSquaredReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (deg {}, action {})", self.name, self.degree, format_action(&self.action))
    }
}

/// Name-based construction, mirroring the JSON schema.
#[derive(Debug, Clone, Default)]
pub struct DgaBuilder {
    components: Vec<String>,
    generators: Vec<(String, u8, Action, String, String)>,
    diff: Vec<(String, Vec<Vec<String>>)>,
}

impl DgaBuilder {
    pub fn new<S: Into<String>>(components: impl IntoIterator<Item = S>) -> Self {
        DgaBuilder { components: components.into_iter().map(Into::into).collect(), ..Default::default() }
    }

    pub fn generator(mut self, name: &str, degree: u8, action: Action, from: &str, to: &str) -> Self {
        self.generators.push((name.into(), degree, action, from.into(), to.into()));
        self
    }

    /// Shorthand for a pure generator on the first component.
    pub fn pure(self, name: &str, degree: u8, action: Action) -> Self {
        let c = self.components.first().cloned().unwrap_or_default();
        self.generator(name, degree, action, &c, &c)
    }

    /// `words` is the F2 sum; each inner slice is one word, `&[]` the unit.
    pub fn diff(mut self, name: &str, words: &[&[&str]]) -> Self {
        self.diff
            .push((name.into(), words.iter().map(|w| w.iter().map(|s| s.to_string()).collect()).collect()));
        self
    }

    pub fn diff_owned(mut self, name: String, words: Vec<Vec<String>>) -> Self {
        self.diff.push((name, words));
        self
    }

    pub fn build(self) -> Result<FreeDga> {
        let comp = |name: &str| {
            self.components
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| Error::UnknownComponent(name.to_string()))
        };
        let mut gens = Vec::with_capacity(self.generators.len());
        let mut index = HashMap::new();
        for (i, (n, d, a, f, t)) in self.generators.iter().enumerate() {
            if index.insert(n.clone(), GenId(i)).is_some() {
                return Err(Error::DuplicateName(n.clone()));
            }
            if *d > 1 {
                return Err(Error::Json(format!("degree of `{n}` must be 0 or 1")));
            }
            gens.push(Generator::new(n.clone(), *d, *a, comp(f)?, comp(t)?));
        }
        let mut diff = vec![Element::zero(); gens.len()];
        for (n, words) in &self.diff {
            let g = *index.get(n).ok_or_else(|| Error::UnknownGenerator(n.clone()))?;
            let mut e = Element::zero();
            for w in words {
                let w = w
                    .iter()
                    .map(|s| index.get(s).copied().ok_or_else(|| Error::UnknownGenerator(s.clone())))
                    .collect::<Result<Vec<_>>>()?;
                e.toggle(Word(w));
            }
            diff[g.0].add_assign(&e);
        }
        FreeDga::new(self.components, gens, diff)
    }
}
