//! Augmentations: checking, enumeration, the action-filtered inductive
//! construction for triangle-structured differentials, and surgery quotients.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::algebra::{Element, FreeDga, GenId, Generator, Word};
use crate::error::{Error, Result};

/// Default cap on the number of degree-0 generators for enumeration.
pub const DEFAULT_AUGMENTATION_CAP: usize = 24;

/// A map from generators to F2, extended multiplicatively with 1 ↦ 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Augmentation {
    values: Vec<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AugmentationFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
    pub values: BTreeMap<String, u8>,
}

impl Augmentation {
    pub fn zero(dga: &FreeDga) -> Self {
        Augmentation { values: vec![false; dga.len()] }
    }

    pub fn from_values(values: Vec<bool>) -> Self {
        Augmentation { values }
    }

    /// Generators absent from the map take the value 0.
    pub fn from_file(dga: &FreeDga, file: &AugmentationFile) -> Result<Self> {
        let mut aug = Augmentation::zero(dga);
        for (name, &v) in &file.values {
            let g = dga.id(name)?;
            if v > 1 {
                return Err(Error::Malformed(format!("augmentation value {v} for `{name}` is not 0 or 1")));
            }
            aug.values[g.0] = v == 1;
        }
        Ok(aug)
    }

    pub fn from_json(dga: &FreeDga, s: &str) -> Result<Self> {
        Self::from_file(dga, &serde_json::from_str(s)?)
    }

    /// Every generator is listed, in name order.
    pub fn to_file(&self, dga: &FreeDga) -> AugmentationFile {
        AugmentationFile {
            comment: None,
            values: dga.ids().map(|g| (dga.name(g).to_string(), self.values[g.0] as u8)).collect(),
        }
    }

    pub fn to_json(&self, dga: &FreeDga) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_file(dga)).expect("augmentation serializes");
        s.push('\n');
        s
    }

    pub fn value(&self, g: GenId) -> bool {
        self.values[g.0]
    }

    pub fn set(&mut self, g: GenId, v: bool) {
        self.values[g.0] = v;
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn support(&self) -> impl Iterator<Item = GenId> + '_ {
        self.values.iter().enumerate().filter(|(_, &v)| v).map(|(i, _)| GenId(i))
    }

    pub fn eval_word(&self, w: &Word) -> bool {
        w.factors().iter().all(|g| self.values[g.0])
    }

    pub fn eval(&self, e: &Element) -> bool {
        e.words().fold(false, |acc, w| acc ^ self.eval_word(w))
    }
}

/// Why a candidate map fails to be an augmentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Witness {
    /// Nonzero on a generator of odd degree.
    Grading(GenId),
    /// ε(d(g)) = 1.
    Chain(GenId),
}

impl Witness {
    pub fn generator(&self) -> GenId {
        match *self {
            Witness::Grading(g) | Witness::Chain(g) => g,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AugmentationCheck {
    pub witness: Option<Witness>,
}

impl AugmentationCheck {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

pub fn is_augmentation(dga: &FreeDga, aug: &Augmentation) -> Result<AugmentationCheck> {
    let all: Vec<usize> = (0..dga.components().len()).collect();
    is_augmentation_on(dga, aug, &all)
}

/// Checks `aug` as an augmentation of the sub-DGA of chords with both ends
/// on `group`: only those generators are tested, and the map is taken to
/// vanish on every other generator.
pub fn is_augmentation_on(dga: &FreeDga, aug: &Augmentation, group: &[usize]) -> Result<AugmentationCheck> {
    if aug.values.len() != dga.len() {
        return Err(Error::UnknownGenerator(format!(
            "augmentation has {} values for {} generators",
            aug.values.len(),
            dga.len()
        )));
    }
    let inside = |g: &Generator| group.contains(&g.from) && group.contains(&g.to);
    let restricted = Augmentation {
        values: dga.ids().map(|g| aug.value(g) && inside(dga.generator(g))).collect(),
    };
    for g in dga.ids() {
        if inside(dga.generator(g)) && restricted.value(g) && dga.generator(g).degree != 0 {
            return Ok(AugmentationCheck { witness: Some(Witness::Grading(g)) });
        }
    }
    for g in dga.ids() {
        if inside(dga.generator(g)) && restricted.eval(dga.diff(g)) {
            return Ok(AugmentationCheck { witness: Some(Witness::Chain(g)) });
        }
    }
    Ok(AugmentationCheck { witness: None })
}

/// All augmentations, in lexicographic order of their value vectors with
/// generators sorted by name.
pub fn enumerate_augmentations(dga: &FreeDga, cap: usize) -> Result<Vec<Augmentation>> {
    let mut free: Vec<GenId> = dga.ids().filter(|&g| dga.generator(g).degree == 0).collect();
    if free.len() > cap {
        return Err(Error::BudgetExceeded { needed: free.len(), cap });
    }
    free.sort_by(|&a, &b| dga.name(a).cmp(dga.name(b)));
    // A generator's constraint is checked as soon as everything in its
    // differential is decided; odd generators are fixed at 0 up front.
    let position: BTreeMap<GenId, usize> = free.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let mut ready: Vec<Vec<GenId>> = vec![Vec::new(); free.len() + 1];
    for g in dga.ids() {
        let mut last = position.get(&g).map_or(0, |&i| i + 1);
        for w in dga.diff(g).words() {
            for f in w.factors() {
                if let Some(&i) = position.get(f) {
                    last = last.max(i + 1);
                }
            }
        }
        ready[last].push(g);
    }
    let mut out = Vec::new();
    let mut aug = Augmentation::zero(dga);
    search(dga, &free, &ready, 0, &mut aug, &mut out);
    Ok(out)
}

fn search(dga: &FreeDga, free: &[GenId], ready: &[Vec<GenId>], depth: usize, aug: &mut Augmentation, out: &mut Vec<Augmentation>) {
    if ready[depth].iter().any(|&g| aug.eval(dga.diff(g))) {
        return;
    }
    if depth == free.len() {
        out.push(aug.clone());
        return;
    }
    for v in [false, true] {
        aug.set(free[depth], v);
        search(dga, free, ready, depth + 1, aug, out);
    }
    aug.set(free[depth], false);
}

// ------------------------------------------------------------ triangle structure

/// Classification of the chords of a link `L ∪ D_1 ∪ … ∪ D_k`: for each
/// disc `D_i` a chord `a_i` from `D_i` to `L`, and pairs `(b, c)` where
/// `b` runs from `D_i` to `L` and `c` from `D_i` to `D_j` with `i < j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriangleStructureFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
    pub lagrangian: String,
    /// Disc components `D_1, …, D_k`.
    pub discs: Vec<String>,
    /// `a[i]` is the chord of `D_{i+1}`.
    pub a: Vec<String>,
    #[serde(default)]
    pub pairs: Vec<ChordPair>,
    /// Values on pure chords.
    #[serde(default)]
    pub pure_augmentation: AugmentationFile,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChordPair {
    pub b: String,
    pub c: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChordKind {
    Pure,
    A(usize),
    /// Index `i` and the paired c-chord.
    B(usize, GenId),
    /// Indices `i < j` and the paired b-chord.
    C(usize, usize, GenId),
    OrderReversing,
}

#[derive(Debug, Clone)]
pub struct TriangleStructure {
    /// Component of `L`.
    pub lagrangian: usize,
    /// `disc[i - 1]` is the component of `D_i`.
    pub discs: Vec<usize>,
    pub kind: Vec<ChordKind>,
    pub pure: Augmentation,
}

impl TriangleStructure {
    pub fn from_file(dga: &FreeDga, f: &TriangleStructureFile) -> Result<Self> {
        let lagrangian = dga.component_index(&f.lagrangian)?;
        let discs = f.discs.iter().map(|d| dga.component_index(d)).collect::<Result<Vec<_>>>()?;
        let index_of = |comp: usize| discs.iter().position(|&d| d == comp).map(|i| i + 1);
        let mut seen = BTreeSet::from([lagrangian]);
        for &d in &discs {
            if !seen.insert(d) {
                return Err(Error::ShapeViolation("components of the structure must be distinct".into()));
            }
        }
        if f.a.len() != discs.len() {
            return Err(Error::ShapeViolation(format!("{} discs but {} a-chords", discs.len(), f.a.len())));
        }
        let mut kind: Vec<Option<ChordKind>> = vec![None; dga.len()];
        let mut assign = |g: GenId, k: ChordKind| -> Result<()> {
            if kind[g.0].is_some() {
                return Err(Error::ShapeViolation(format!("chord `{}` is classified twice", dga.name(g))));
            }
            kind[g.0] = Some(k);
            Ok(())
        };
        for (i, name) in f.a.iter().enumerate() {
            let g = dga.id(name)?;
            let gen = dga.generator(g);
            if gen.from != discs[i] || gen.to != lagrangian {
                return Err(Error::ShapeViolation(format!("a-chord `{name}` must run from `{}` to `{}`", f.discs[i], f.lagrangian)));
            }
            assign(g, ChordKind::A(i + 1))?;
        }
        for p in &f.pairs {
            let (b, c) = (dga.id(&p.b)?, dga.id(&p.c)?);
            let (gb, gc) = (dga.generator(b), dga.generator(c));
            let i = index_of(gc.from);
            let j = index_of(gc.to);
            match (i, j) {
                (Some(i), Some(j)) if i < j && gb.from == gc.from && gb.to == lagrangian => {
                    assign(b, ChordKind::B(i, c))?;
                    assign(c, ChordKind::C(i, j, b))?;
                }
                _ => {
                    return Err(Error::ShapeViolation(format!(
                        "pair ({}, {}) must be a chord D_i → L and a chord D_i → D_j with i < j",
                        p.b, p.c
                    )))
                }
            }
        }
        let mut kinds = Vec::with_capacity(dga.len());
        for g in dga.ids() {
            let gen = dga.generator(g);
            let k = match kind[g.0].take() {
                Some(k) => k,
                None if gen.is_pure() => ChordKind::Pure,
                None => {
                    let from = if gen.from == lagrangian { Some(discs.len() + 1) } else { index_of(gen.from) };
                    let to = if gen.to == lagrangian { Some(discs.len() + 1) } else { index_of(gen.to) };
                    match (from, to) {
                        (Some(i), Some(j)) if i > j => ChordKind::OrderReversing,
                        (Some(_), Some(_)) => {
                            return Err(Error::ShapeViolation(format!(
                                "chord `{}` is forward but not classified as a, b or c",
                                dga.name(g)
                            )))
                        }
                        _ => {
                            return Err(Error::ShapeViolation(format!(
                                "chord `{}` touches a component outside the structure",
                                dga.name(g)
                            )))
                        }
                    }
                }
            };
            kinds.push(k);
        }
        let pure = Augmentation::from_file(dga, &f.pure_augmentation)?;
        for g in pure.support() {
            if kinds[g.0] != ChordKind::Pure {
                return Err(Error::ShapeViolation(format!("pure augmentation is nonzero on mixed chord `{}`", dga.name(g))));
            }
        }
        Ok(TriangleStructure { lagrangian, discs, kind: kinds, pure })
    }

    pub fn from_json(dga: &FreeDga, s: &str) -> Result<Self> {
        Self::from_file(dga, &serde_json::from_str(s)?)
    }

    pub fn k(&self) -> usize {
        self.discs.len()
    }

    /// Filtration level of a chord: the disc index of its source, `k + 1`
    /// for chords leaving `L`; pure chords are level `∞`.
    fn level(&self, dga: &FreeDga, g: GenId) -> usize {
        match self.kind[g.0] {
            ChordKind::A(i) | ChordKind::B(i, _) | ChordKind::C(i, _, _) => i,
            ChordKind::Pure | ChordKind::OrderReversing => {
                let from = dga.generator(g).from;
                self.discs.iter().position(|&d| d == from).map_or(usize::MAX, |i| i + 1)
            }
        }
    }

    /// Object order `[L, D_k, …, D_1]` in which the structure is directed.
    pub fn object_order(&self) -> Vec<usize> {
        std::iter::once(self.lagrangian).chain(self.discs.iter().rev().copied()).collect()
    }
}

/// Augmentation with ε(a_i) = 1, ε(b) = 0, ε = 0 on order-reversing chords,
/// the given values on pure chords, and ε(c) solved from ε(d b) = 0 in
/// increasing action order, for i = k down to 1.
pub fn filtered_induction(dga: &FreeDga, s: &TriangleStructure) -> Result<Augmentation> {
    let mut eps = s.pure.clone();
    let mut assigned: Vec<bool> = s.kind.iter().map(|k| matches!(k, ChordKind::Pure | ChordKind::OrderReversing)).collect();
    let is_rev = |g: &GenId| s.kind[g.0] == ChordKind::OrderReversing;
    // Mixed skeleton of the words of d(g) in the quotient by order-reversing chords.
    let forward_words = |g: GenId| -> Vec<&Word> { dga.diff(g).words().filter(|w| !w.factors().iter().any(is_rev)).collect() };
    let skeleton = |w: &Word| -> Vec<GenId> { w.factors().iter().copied().filter(|f| s.kind[f.0] != ChordKind::Pure).collect() };

    for i in (1..=s.k()).rev() {
        let a_i = dga.ids().find(|g| s.kind[g.0] == ChordKind::A(i)).expect("one a-chord per disc");
        if forward_words(a_i).iter().any(|w| !skeleton(w).is_empty()) {
            return Err(Error::ShapeViolation(format!("d({}) must vanish modulo order-reversing chords", dga.name(a_i))));
        }
        eps.set(a_i, true);
        assigned[a_i.0] = true;

        let mut cs: Vec<(GenId, GenId)> = dga
            .ids()
            .filter_map(|g| match s.kind[g.0] {
                ChordKind::C(ci, _, b) if ci == i => Some((g, b)),
                _ => None,
            })
            .collect();
        cs.sort_by_key(|x| dga.generator(x.0).action);
        for w in cs.windows(2) {
            if dga.generator(w[0].0).action == dga.generator(w[1].0).action {
                return Err(Error::DistinctActionsRequired(dga.name(w[0].0).to_string(), dga.name(w[1].0).to_string()));
            }
        }
        for &(_, b) in &cs {
            eps.set(b, false);
            assigned[b.0] = true;
        }
        let rank: BTreeMap<GenId, usize> = cs.iter().enumerate().map(|(r, &(c, _))| (c, r)).collect();
        let lower_c = |f: GenId, r: usize| rank.get(&f).is_some_and(|&q| q < r);
        let in_higher = |f: GenId| s.level(dga, f) > i;

        for (r, &(c, b)) in cs.iter().enumerate() {
            let j = match s.kind[c.0] {
                ChordKind::C(_, j, _) => j,
                _ => unreachable!(),
            };
            let a_j = dga.ids().find(|g| s.kind[g.0] == ChordKind::A(j)).expect("one a-chord per disc");
            // Shape of d(b): a_i, lower b's, a_j·c, w·(lower c) with w above level i.
            let mut has_ajc = false;
            for w in forward_words(b) {
                let sk = skeleton(w);
                let ok = match sk.as_slice() {
                    [x] if *x == a_i => true,
                    [x] if matches!(s.kind[x.0], ChordKind::B(bi, bc) if bi == i && lower_c(bc, r)) => true,
                    [x, y] if *x == a_j && *y == c => {
                        has_ajc = true;
                        true
                    }
                    [rest @ .., last] if lower_c(*last, r) => rest.iter().all(|&f| in_higher(f)),
                    _ => false,
                };
                if !ok {
                    return Err(Error::ShapeViolation(format!(
                        "word {} of d({}) does not fit the triangle structure",
                        dga.format_word(w),
                        dga.name(b)
                    )));
                }
            }
            if !has_ajc {
                return Err(Error::ShapeViolation(format!(
                    "d({}) lacks the word {}·{}",
                    dga.name(b),
                    dga.name(a_j),
                    dga.name(c)
                )));
            }
            for w in forward_words(c) {
                let sk = skeleton(w);
                let ok = matches!(sk.as_slice(), [rest @ .., last] if lower_c(*last, r) && rest.iter().all(|&f| in_higher(f)));
                if !ok {
                    return Err(Error::ShapeViolation(format!(
                        "word {} of d({}) does not fit the triangle structure",
                        dga.format_word(w),
                        dga.name(c)
                    )));
                }
            }

            // Solve ε(d b) = 0 for ε(c): the constraint is affine in ε(c).
            let (mut constant, mut coefficient) = (false, false);
            for w in forward_words(b) {
                if w.factors().contains(&c) {
                    let rest_ready = w.factors().iter().filter(|&&f| f != c).all(|f| assigned[f.0]);
                    debug_assert!(rest_ready, "read of an unassigned chord");
                    if !rest_ready {
                        return Err(Error::ShapeViolation(format!("d({}) depends on undetermined chords", dga.name(b))));
                    }
                    coefficient ^= w.factors().iter().filter(|&&f| f != c).all(|f| eps.value(*f));
                } else {
                    debug_assert!(w.factors().iter().all(|f| assigned[f.0]), "read of an unassigned chord");
                    constant ^= eps.eval_word(w);
                }
            }
            if coefficient {
                eps.set(c, constant);
            } else if constant {
                return Err(Error::Inconsistent(format!(
                    "ε(d({})) = 1 regardless of ε({})",
                    dga.name(b),
                    dga.name(c)
                )));
            } else {
                eps.set(c, false);
            }
            assigned[c.0] = true;
        }
    }
    match is_augmentation(dga, &eps)?.witness {
        None => Ok(eps),
        Some(Witness::Grading(g)) => Err(Error::Inconsistent(format!("ε is nonzero on odd generator `{}`", dga.name(g)))),
        Some(Witness::Chain(g)) => Err(Error::Inconsistent(format!("ε(d({})) = 1", dga.name(g)))),
    }
}

// ------------------------------------------------------------ surgery quotient

/// The quotient by the two-sided ideal generated by `a - 1` for each
/// surgered chord, realized as the substitution `a ↦ 1`.
#[derive(Debug, Clone)]
pub struct SurgeryQuotient {
    pub dga: FreeDga,
    pub augmentation: Augmentation,
    /// `projection[g]` is the image generator of `g`, or `None` for a
    /// surgered chord (which maps to 1).
    pub projection: Vec<Option<GenId>>,
    /// Component of the quotient containing each old component.
    pub component_map: Vec<usize>,
}

impl SurgeryQuotient {
    /// Image of a word under the substitution.
    pub fn project_word(&self, w: &Word) -> Word {
        Word(w.factors().iter().filter_map(|g| self.projection[g.0]).collect())
    }

    pub fn project(&self, e: &Element) -> Element {
        let mut out = Element::zero();
        for w in e.words() {
            out.toggle(self.project_word(w));
        }
        out
    }

    /// Checks ε = ε̄ ∘ π generator by generator.
    pub fn pushforward_holds(&self, eps: &Augmentation) -> bool {
        self.projection.iter().enumerate().all(|(g, p)| {
            let image = p.is_none_or(|q| self.augmentation.value(q));
            image == eps.value(GenId(g))
        })
    }
}

pub fn surgery_quotient(dga: &FreeDga, chords: &[GenId], eps: &Augmentation) -> Result<SurgeryQuotient> {
    let cut: BTreeSet<GenId> = chords.iter().copied().collect();
    for &a in &cut {
        if dga.generator(a).degree != 0 {
            return Err(Error::DegreeObstruction(dga.name(a).to_string()));
        }
        if !eps.value(a) {
            return Err(Error::NotUnitValued(dga.name(a).to_string()));
        }
    }
    let subst = |w: &Word| Word(w.factors().iter().copied().filter(|f| !cut.contains(f)).collect());
    let substitute = |e: &Element| {
        let mut out = Element::zero();
        for w in e.words() {
            out.toggle(subst(w));
        }
        out
    };
    for &a in &cut {
        let image = substitute(dga.diff(a));
        if !image.is_zero() {
            return Err(Error::QuotientNotClosed(format!("{} ↦ {}", dga.name(a), dga.format_element(&image))));
        }
    }

    // Components joined by a surgered chord merge.
    let n = dga.components().len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for &a in &cut {
        let g = dga.generator(a);
        let (x, y) = (find(&mut parent, g.from), find(&mut parent, g.to));
        parent[x.max(y)] = x.min(y);
    }
    let roots: Vec<usize> = (0..n).map(|k| find(&mut parent, k)).collect();
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (k, &r) in roots.iter().enumerate() {
        classes.entry(r).or_default().push(k);
    }
    let class_index: BTreeMap<usize, usize> = classes.keys().enumerate().map(|(i, &r)| (r, i)).collect();
    let components: Vec<String> = classes
        .values()
        .map(|ks| ks.iter().map(|&k| dga.components()[k].as_str()).collect::<Vec<_>>().join("+"))
        .collect();
    let component_map: Vec<usize> = roots.iter().map(|r| class_index[r]).collect();

    let mut projection = vec![None; dga.len()];
    let mut generators = Vec::new();
    let mut kept = Vec::new();
    for g in dga.ids() {
        if cut.contains(&g) {
            continue;
        }
        projection[g.0] = Some(GenId(generators.len()));
        let old = dga.generator(g);
        generators.push(Generator::new(
            old.name.clone(),
            old.degree,
            old.action,
            component_map[old.from],
            component_map[old.to],
        ));
        kept.push(g);
    }
    let renumber = |e: &Element| -> Element {
        e.words().map(|w| Word(subst(w).factors().iter().map(|f| projection[f.0].unwrap()).collect())).fold(
            Element::zero(),
            |mut acc, w| {
                acc.toggle(w);
                acc
            },
        )
    };
    let diff = kept.iter().map(|&g| renumber(dga.diff(g))).collect();
    let quotient = FreeDga::new(components, generators, diff)?;
    let augmentation = Augmentation { values: kept.iter().map(|&g| eps.value(g)).collect() };
    Ok(SurgeryQuotient { dga: quotient, augmentation, projection, component_map })
}
