//! The surgery formula as a rank check.
//!
//! For a link T ∪ L_1 ∪ ⋯ ∪ L_n with an augmentation ε that is 1 on the
//! surgery chords, the homology of hom_Tw(T, 𝔏) for the twisted complex
//! built from ε is compared with the bilinearized homology of T against the
//! surgered link. The surgered side is computed twice: from the algebraic
//! quotient of the DGA, and (when a diagram is given) by smoothing the
//! crossings and recomputing the DGA from the new diagram.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::algebra::{Action, Element, FreeDga, GenId, Word};
use crate::augment::{surgery_quotient, Augmentation, AugmentationFile};
use crate::diagram::{diagram_to_dga, resolve_crossing, DiscSearch, LinkDiagram};
use crate::error::{Error, Result};
use crate::io::dga_from_json;
use crate::linearized::{bilinearized_complex, homology_f2, Ranks};
use crate::twisted::{ainf_from_link, build_mc_from_aug, tw_hom_complex};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormulaFixture {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
    /// Diagram file, relative to the fixture file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagram: Option<String>,
    /// DGA file, relative to the fixture file; used when there is no diagram.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dga: Option<String>,
    pub test: String,
    /// Objects of the twisted complex, in order.
    pub order: Vec<String>,
    pub chords: Vec<String>,
    pub augmentation: BTreeMap<String, u8>,
}

/// A fixture with its files read and parsed.
#[derive(Debug, Clone)]
pub struct LoadedFixture {
    pub fixture: FormulaFixture,
    pub diagram: Option<LinkDiagram>,
    pub dga: FreeDga,
    pub eps: Augmentation,
}

impl LoadedFixture {
    pub fn from_file(path: &Path, search: &DiscSearch) -> Result<Self> {
        let fixture: FormulaFixture = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::new(fixture, &base, search)
    }

    pub fn new(fixture: FormulaFixture, base: &Path, search: &DiscSearch) -> Result<Self> {
        let read = |rel: &str| -> Result<String> { Ok(std::fs::read_to_string(PathBuf::from(base).join(rel))?) };
        let (diagram, dga) = match (&fixture.diagram, &fixture.dga) {
            (Some(d), None) => {
                let diagram = LinkDiagram::from_file(serde_json::from_str(&read(d)?).map_err(|e| Error::Malformed(e.to_string()))?)?;
                let dga = diagram_to_dga(&diagram, search)?;
                (Some(diagram), dga)
            }
            (None, Some(a)) => (None, dga_from_json(&read(a)?)?),
            _ => return Err(Error::ShapeMismatch("fixture needs exactly one of `diagram` and `dga`".into())),
        };
        let eps = Augmentation::from_file(&dga, &AugmentationFile { comment: None, values: fixture.augmentation.clone() })?;
        Ok(LoadedFixture { fixture, diagram, dga, eps })
    }
}

/// Cap on candidate correction words per generator.
pub const DEFAULT_CORRECTION_BUDGET: usize = 200_000;

/// An isomorphism ψ(g) = g + w_g between DGAs on the same generators. Each
/// w_g has action at most that of g and uses only generators that come
/// before g in the order by (action, index), so ψ is unitriangular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangularMap {
    /// Image of each source generator, in target ids.
    pub images: Vec<Element>,
}

impl TriangularMap {
    /// Number of generators with a nonzero correction.
    pub fn corrections(&self, source: &FreeDga, target: &FreeDga) -> usize {
        source
            .ids()
            .filter(|&g| self.images[g.0] != Element::generator(target.id(source.name(g)).unwrap()))
            .count()
    }

    pub fn apply(&self, e: &Element) -> Element {
        let mut out = Element::zero();
        for w in e.words() {
            let mut prod = Element::one();
            for f in w.factors() {
                prod = prod.mul(&self.images[f.0]);
            }
            out.add_assign(&prod);
        }
        out
    }
}

/// Words in the `letters` with action at most `bound`, the given degree,
/// and endpoints `(to, from)`.
fn candidate_words(
    dga: &FreeDga,
    letters: &[GenId],
    (to, from): (usize, usize),
    degree: u8,
    bound: Action,
    budget: usize,
) -> Result<Vec<Word>> {
    let mut out = Vec::new();
    if to == from && degree == 0 {
        out.push(Word::unit());
    }
    let mut stack: Vec<(Vec<GenId>, usize, Action, u8)> = vec![(Vec::new(), to, Action::from(0), 0)];
    let mut visited = 0usize;
    while let Some((w, end, action, deg)) = stack.pop() {
        for &g in letters {
            let x = dga.generator(g);
            let a = action + x.action;
            if x.to != end || a > bound {
                continue;
            }
            visited += 1;
            if visited > budget {
                return Err(Error::SearchBudgetExceeded(budget as u64));
            }
            let mut next = w.clone();
            next.push(g);
            let d = (deg + x.degree) % 2;
            if x.from == from && d == degree {
                out.push(Word(next.clone()));
            }
            stack.push((next, x.from, a, d));
        }
    }
    out.sort();
    Ok(out)
}

/// Solves d(w) = r for w in the span of a fixed list of words.
struct BoundarySolver {
    words: Vec<Word>,
    /// Reduced differentials keyed by leading word, with the word indices
    /// they combine.
    basis: BTreeMap<Word, (Element, BTreeSet<usize>)>,
    /// Combinations of the words that are cycles.
    cycles: Vec<Element>,
}

impl BoundarySolver {
    fn new(dga: &FreeDga, words: Vec<Word>) -> Result<Self> {
        let mut solver = BoundarySolver { words, basis: BTreeMap::new(), cycles: Vec::new() };
        for i in 0..solver.words.len() {
            let dw = dga.apply_differential(&Element::from_word(solver.words[i].clone()))?;
            let (v, combo) = solver.reduce(dw, BTreeSet::from([i]));
            match v.words().last().cloned() {
                Some(p) => {
                    solver.basis.insert(p, (v, combo));
                }
                None => {
                    let z = solver.element(&combo);
                    solver.cycles.push(z);
                }
            }
        }
        Ok(solver)
    }

    fn reduce(&self, mut v: Element, mut combo: BTreeSet<usize>) -> (Element, BTreeSet<usize>) {
        while let Some(p) = v.words().last().cloned() {
            let Some((bv, bc)) = self.basis.get(&p) else { break };
            v.add_assign(bv);
            combo = combo.symmetric_difference(bc).copied().collect();
        }
        (v, combo)
    }

    fn element(&self, combo: &BTreeSet<usize>) -> Element {
        combo.iter().map(|&i| self.words[i].clone()).collect()
    }

    /// One solution; all others differ from it by a sum of `cycles`.
    fn solve(&self, r: &Element) -> Option<Element> {
        let (rest, combo) = self.reduce(r.clone(), BTreeSet::new());
        rest.is_zero().then(|| self.element(&combo))
    }
}

fn action_order(dga: &FreeDga) -> Vec<GenId> {
    let mut order: Vec<GenId> = dga.ids().collect();
    order.sort_by(|a, b| dga.generator(*a).action.cmp(&dga.generator(*b).action).then(a.cmp(b)));
    order
}

struct Search<'a> {
    source: &'a FreeDga,
    target: &'a FreeDga,
    order: Vec<(GenId, GenId)>,
    solvers: Vec<BoundarySolver>,
    map: TriangularMap,
    steps: usize,
    budget: usize,
    deepest: usize,
}

impl Search<'_> {
    fn run(&mut self, i: usize) -> Result<bool> {
        if i == self.order.len() {
            return Ok(true);
        }
        self.deepest = self.deepest.max(i);
        let (g, t) = self.order[i];
        let mut r = self.map.apply(self.source.diff(g));
        r.add_assign(self.target.diff(t));
        let Some(w) = self.solvers[i].solve(&r) else { return Ok(false) };
        let k = self.solvers[i].cycles.len();
        if k >= 32 {
            return Err(Error::SearchBudgetExceeded(self.budget as u64));
        }
        for mask in 0u64..1 << k {
            self.steps += 1;
            if self.steps > self.budget {
                return Err(Error::SearchBudgetExceeded(self.budget as u64));
            }
            let mut image = Element::generator(t);
            image.add_assign(&w);
            for (bit, z) in self.solvers[i].cycles.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    image.add_assign(z);
                }
            }
            self.map.images[g.0] = image;
            if self.run(i + 1)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Finds ψ: source → target with ψ(g) = g + w_g and d ψ = ψ d, generators
/// matched by name. Corrections are chosen in order of action; when a later
/// generator cannot be matched, earlier choices are revised by cycles.
pub fn triangular_isomorphism(source: &FreeDga, target: &FreeDga, budget: usize) -> Result<TriangularMap> {
    if source.len() != target.len() {
        return Err(Error::ShapeMismatch("the two DGAs have different generators".into()));
    }
    let mut order = Vec::with_capacity(source.len());
    for g in action_order(source) {
        let (x, t) = (source.generator(g), target.id(source.name(g))?);
        let y = target.generator(t);
        if x.degree != y.degree || x.action != y.action {
            return Err(Error::ShapeMismatch(format!("generator `{}` differs between the two DGAs", x.name)));
        }
        order.push((g, t));
    }
    let mut solvers = Vec::with_capacity(order.len());
    let mut earlier = Vec::new();
    for &(_, t) in &order {
        let y = target.generator(t);
        let words = candidate_words(target, &earlier, (y.to, y.from), y.degree, y.action, budget)?;
        solvers.push(BoundarySolver::new(target, words)?);
        earlier.push(t);
    }
    let mut search = Search {
        source,
        target,
        order,
        solvers,
        map: TriangularMap { images: vec![Element::zero(); source.len()] },
        steps: 0,
        budget,
        deepest: 0,
    };
    if search.run(0)? {
        Ok(search.map)
    } else {
        Err(Error::NotTriangular(source.name(search.order[search.deepest].0).to_string()))
    }
}

/// The augmentation ε' of the target with ε' ∘ ψ = ε.
pub fn transport_augmentation(source: &FreeDga, target: &FreeDga, map: &TriangularMap, eps: &Augmentation) -> Result<Augmentation> {
    let mut out = Augmentation::zero(target);
    for g in action_order(source) {
        let t = target.id(source.name(g))?;
        let mut rest = map.images[g.0].clone();
        rest.toggle(Word::single(t));
        out.set(t, eps.value(g) ^ out.eval(&rest));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FormulaReport {
    /// H hom_Tw(T, 𝔏).
    pub twisted: Ranks,
    /// Bilinearized homology against the algebraic quotient.
    pub quotient: Ranks,
    /// Bilinearized homology against the smoothed diagram, and the number of
    /// generators whose identification with the quotient needed a correction.
    pub resolved: Option<(Ranks, usize)>,
}

impl FormulaReport {
    pub fn holds(&self) -> bool {
        let t = self.twisted.total();
        self.quotient.total() == t && self.resolved.is_none_or(|(r, _)| r.total() == t)
    }
}

/// Bilinearized homology of `test` against every other component.
fn against_rest(dga: &FreeDga, test: &str, eps: &Augmentation) -> Result<Ranks> {
    let t = dga.component_index(test)?;
    let rest: Vec<usize> = (0..dga.components().len()).filter(|&c| c != t).collect();
    homology_f2(&bilinearized_complex(dga, &[t], &rest, eps, eps)?)
}

pub fn twisted_side(dga: &FreeDga, test: &str, order: &[String], eps: &Augmentation) -> Result<Ranks> {
    let t = dga.component_index(test)?;
    let tw_order = order.iter().map(|o| dga.component_index(o)).collect::<Result<Vec<_>>>()?;
    let all: Vec<usize> = std::iter::once(t).chain(tw_order.iter().copied()).collect();
    let ainf = ainf_from_link(dga, &all, eps)?;
    let tw = build_mc_from_aug(dga, &tw_order, eps)?;
    homology_f2(&tw_hom_complex(&ainf, test, &tw)?)
}

fn quotient(dga: &FreeDga, test: &str, chords: &[String], eps: &Augmentation) -> Result<crate::augment::SurgeryQuotient> {
    let ids = chords.iter().map(|c| dga.id(c)).collect::<Result<Vec<_>>>()?;
    let t = dga.component_index(test)?;
    for &g in &ids {
        let x = dga.generator(g);
        if x.from == t || x.to == t {
            return Err(Error::ShapeMismatch(format!("surgery chord `{}` touches the test object", dga.name(g))));
        }
    }
    surgery_quotient(dga, &ids, eps)
}

pub fn quotient_side(dga: &FreeDga, test: &str, chords: &[String], eps: &Augmentation) -> Result<Ranks> {
    let q = quotient(dga, test, chords, eps)?;
    against_rest(&q.dga, test, &q.augmentation)
}

/// Smooths the chords, rederives the DGA, identifies it with the quotient
/// through a triangular isomorphism and transports the augmentation.
pub fn resolved_side(
    diagram: &LinkDiagram,
    dga: &FreeDga,
    test: &str,
    chords: &[String],
    eps: &Augmentation,
    search: &DiscSearch,
) -> Result<(Ranks, usize)> {
    let q = quotient(dga, test, chords, eps)?;
    let mut d = diagram.clone();
    for c in chords {
        d = resolve_crossing(&d, c)?;
    }
    let smoothed = diagram_to_dga(&d, search)?;
    let psi = triangular_isomorphism(&q.dga, &smoothed, DEFAULT_CORRECTION_BUDGET)?;
    let bar = transport_augmentation(&q.dga, &smoothed, &psi, &q.augmentation)?;
    Ok((against_rest(&smoothed, test, &bar)?, psi.corrections(&q.dga, &smoothed)))
}

pub fn surgery_formula(fx: &LoadedFixture, search: &DiscSearch) -> Result<FormulaReport> {
    let f = &fx.fixture;
    let twisted = twisted_side(&fx.dga, &f.test, &f.order, &fx.eps)?;
    let quotient = quotient_side(&fx.dga, &f.test, &f.chords, &fx.eps)?;
    let resolved = match &fx.diagram {
        Some(d) => Some(resolved_side(d, &fx.dga, &f.test, &f.chords, &fx.eps, search)?),
        None => None,
    };
    Ok(FormulaReport { twisted, quotient, resolved })
}
