//! Directed A∞ data from a link DGA, twisted complexes and their hom
//! complexes.
//!
//! Objects are link components in a fixed order. A chord from component
//! `j` to component `i` is a morphism in `hom(i, j)`; only `i < j` is kept
//! (forward chords), the rest are order-reversing and generate a
//! differential ideal that is divided out. For a forward chord `q₀`, every
//! word of d(q₀) of the form `p⁰·q₁·p¹·q₂ ⋯ q_d·p^d` with forward `q_s` and
//! pure blocks `p^s` contributes `ε(p⁰)⋯ε(p^d)` to the coefficient of `q₀` in
//! μ^d. Inputs are stored in word order, so `q₁ ∈ hom(o₀, o₁)`,
//! `q₂ ∈ hom(o₁, o₂)`, … and the output lies in `hom(o₀, o_d)`.

use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::algebra::{FreeDga, GenId};
use crate::augment::{is_augmentation_on, Augmentation};
use crate::error::{Error, Result};
use crate::linearized::{homology_f2, F2Complex, Ranks};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Morphism {
    pub name: String,
    pub degree: u8,
    /// `(i, j)` for a morphism in `hom(i, j)`, object indices with `i < j`.
    pub hom: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AInfData {
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    /// Inputs in word order ↦ outputs with coefficient 1.
    ops: BTreeMap<Vec<usize>, BTreeSet<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismRecord {
    pub name: String,
    pub degree: u8,
    pub hom: (String, String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AInfFile {
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismRecord>,
    /// Arity ↦ list of `[output, [inputs in word order]]`.
    pub ops: IndexMap<String, Vec<(String, Vec<String>)>>,
}

impl AInfData {
    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn object_index(&self, name: &str) -> Result<usize> {
        self.objects.iter().position(|o| o == name).ok_or_else(|| Error::UnknownComponent(name.to_string()))
    }

    pub fn morphism_index(&self, name: &str) -> Result<usize> {
        self.morphisms.iter().position(|m| m.name == name).ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    /// Outputs of μ on the given inputs (word order).
    pub fn mu(&self, inputs: &[usize]) -> BTreeSet<usize> {
        self.ops.get(inputs).cloned().unwrap_or_default()
    }

    pub fn ops(&self) -> impl Iterator<Item = (&Vec<usize>, &BTreeSet<usize>)> {
        self.ops.iter()
    }

    pub fn max_arity(&self) -> usize {
        self.ops.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn to_file(&self) -> AInfFile {
        let name = |m: usize| self.morphisms[m].name.clone();
        let mut ops: BTreeMap<usize, Vec<(String, Vec<String>)>> = BTreeMap::new();
        for (inputs, outs) in &self.ops {
            for &o in outs {
                ops.entry(inputs.len()).or_default().push((name(o), inputs.iter().map(|&m| name(m)).collect()));
            }
        }
        AInfFile {
            objects: self.objects.clone(),
            morphisms: self
                .morphisms
                .iter()
                .map(|m| MorphismRecord {
                    name: m.name.clone(),
                    degree: m.degree,
                    hom: (self.objects[m.hom.0].clone(), self.objects[m.hom.1].clone()),
                })
                .collect(),
            ops: ops.into_iter().map(|(k, mut v)| {
                v.sort();
                (k.to_string(), v)
            }).collect(),
        }
    }

    pub fn from_file(f: AInfFile) -> Result<Self> {
        let obj = |n: &str| f.objects.iter().position(|o| o == n).ok_or_else(|| Error::UnknownComponent(n.to_string()));
        let mut morphisms = Vec::new();
        for m in &f.morphisms {
            let hom = (obj(&m.hom.0)?, obj(&m.hom.1)?);
            if hom.0 >= hom.1 {
                return Err(Error::DirectednessViolation { generator: m.name.clone(), word: format!("hom({}, {})", m.hom.0, m.hom.1) });
            }
            morphisms.push(Morphism { name: m.name.clone(), degree: m.degree, hom });
        }
        let data = AInfData { objects: f.objects.clone(), morphisms, ops: BTreeMap::new() };
        let mut ops: BTreeMap<Vec<usize>, BTreeSet<usize>> = BTreeMap::new();
        for (arity, entries) in &f.ops {
            for (out, inputs) in entries {
                if inputs.len().to_string() != *arity {
                    return Err(Error::ShapeMismatch(format!("entry for `{out}` listed under arity {arity}")));
                }
                let inputs = inputs.iter().map(|n| data.morphism_index(n)).collect::<Result<Vec<_>>>()?;
                let out = data.morphism_index(out)?;
                data.check_composable(&inputs, out)?;
                let set = ops.entry(inputs).or_default();
                if !set.insert(out) {
                    set.remove(&out);
                }
            }
        }
        ops.retain(|_, v| !v.is_empty());
        Ok(AInfData { ops, ..data })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_file()).expect("A-infinity data serializes");
        s.push('\n');
        s
    }

    fn check_composable(&self, inputs: &[usize], out: usize) -> Result<()> {
        let bad = || Error::DirectednessViolation {
            generator: self.morphisms[out].name.clone(),
            word: inputs.iter().map(|&m| self.morphisms[m].name.as_str()).collect::<Vec<_>>().join("·"),
        };
        let (first, last) = match (inputs.first(), inputs.last()) {
            (Some(&f), Some(&l)) => (f, l),
            _ => return Err(bad()),
        };
        if self.morphisms[first].hom.0 != self.morphisms[out].hom.0 || self.morphisms[last].hom.1 != self.morphisms[out].hom.1 {
            return Err(bad());
        }
        if inputs.windows(2).any(|w| self.morphisms[w[0]].hom.1 != self.morphisms[w[1]].hom.0) {
            return Err(bad());
        }
        Ok(())
    }

    /// Composable chains of morphisms of length `1..=max_len`.
    pub fn chains(&self, max_len: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack: Vec<Vec<usize>> = (0..self.morphisms.len()).map(|m| vec![m]).collect();
        while let Some(chain) = stack.pop() {
            if chain.len() < max_len {
                let end = self.morphisms[*chain.last().unwrap()].hom.1;
                for (m, mor) in self.morphisms.iter().enumerate() {
                    if mor.hom.0 == end {
                        let mut next = chain.clone();
                        next.push(m);
                        stack.push(next);
                    }
                }
            }
            out.push(chain);
        }
        out.sort();
        out
    }

    /// A chain and output at which an A∞ relation fails, if any.
    pub fn a_infinity_failure(&self) -> Option<(Vec<usize>, usize)> {
        for chain in self.chains(self.objects.len()) {
            let n = chain.len();
            let mut acc: BTreeSet<usize> = BTreeSet::new();
            for s in 0..n {
                for t in s..n {
                    for r in self.mu(&chain[s..=t]) {
                        let mut outer = chain[..s].to_vec();
                        outer.push(r);
                        outer.extend_from_slice(&chain[t + 1..]);
                        for o in self.mu(&outer) {
                            if !acc.insert(o) {
                                acc.remove(&o);
                            }
                        }
                    }
                }
            }
            if let Some(&o) = acc.iter().next() {
                return Some((chain, o));
            }
        }
        None
    }
}

/// A∞ data on the components `order`, with pure blocks weighted by `pure`.
pub fn ainf_from_link(dga: &FreeDga, order: &[usize], pure: &Augmentation) -> Result<AInfData> {
    let mut object_of = vec![None; dga.components().len()];
    for (i, &c) in order.iter().enumerate() {
        if c >= object_of.len() || object_of[c].replace(i).is_some() {
            return Err(Error::ShapeMismatch("object order must list distinct components".into()));
        }
    }
    for &c in order {
        if let Some(w) = is_augmentation_on(dga, pure, &[c])?.witness {
            return Err(Error::NotAnAugmentation(dga.name(w.generator()).to_string()));
        }
    }
    // (to, from) object indices of chords between objects.
    let ends = |g: GenId| {
        let x = dga.generator(g);
        Some((object_of[x.to]?, object_of[x.from]?))
    };
    let reversing = |g: GenId| ends(g).is_some_and(|(i, j)| i > j);
    for r in dga.ids().filter(|&g| reversing(g)) {
        for w in dga.diff(r).words() {
            let among_objects = w.factors().iter().all(|&f| ends(f).is_some());
            if among_objects && !w.factors().iter().any(|&f| reversing(f)) {
                return Err(Error::DirectednessViolation { generator: dga.name(r).to_string(), word: dga.format_word(w) });
            }
        }
    }

    let forward: Vec<GenId> = dga.ids().filter(|&g| ends(g).is_some_and(|(i, j)| i < j)).collect();
    let index: BTreeMap<GenId, usize> = forward.iter().enumerate().map(|(m, &g)| (g, m)).collect();
    let morphisms = forward
        .iter()
        .map(|&g| Morphism { name: dga.name(g).to_string(), degree: dga.generator(g).degree, hom: ends(g).unwrap() })
        .collect();
    let mut data = AInfData { objects: order.iter().map(|&c| dga.components()[c].clone()).collect(), morphisms, ops: BTreeMap::new() };

    for (out, &q0) in forward.iter().enumerate() {
        for w in dga.diff(q0).words() {
            let f = w.factors();
            if f.iter().any(|&g| ends(g).is_none() || reversing(g)) {
                continue;
            }
            let inputs: Vec<usize> = f.iter().filter_map(|g| index.get(g).copied()).collect();
            if inputs.is_empty() {
                continue;
            }
            data.check_composable(&inputs, out).map_err(|_| Error::DirectednessViolation {
                generator: dga.name(q0).to_string(),
                word: dga.format_word(w),
            })?;
            let weight = f.iter().filter(|g| !index.contains_key(g)).all(|&g| pure.value(g));
            if weight {
                let set = data.ops.entry(inputs).or_default();
                if !set.insert(out) {
                    set.remove(&out);
                }
            }
        }
    }
    data.ops.retain(|_, v| !v.is_empty());
    Ok(data)
}

/// A one-sided twisted complex: objects in increasing order and a strictly
/// upper-triangular matrix, given by the morphisms with coefficient 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistedComplex {
    pub objects: Vec<String>,
    pub x: Vec<String>,
}

impl TwistedComplex {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("twisted complex serializes");
        s.push('\n');
        s
    }

    /// The complex on the objects from position `from` on, with the
    /// entries between them.
    pub fn tail(&self, ainf: &AInfData, from: usize) -> Result<TwistedComplex> {
        let (objects, _) = self.resolve(ainf)?;
        let keep: BTreeSet<usize> = objects[from..].iter().copied().collect();
        let x = self
            .x
            .iter()
            .filter(|n| {
                let m = &ainf.morphisms[ainf.morphism_index(n).unwrap()];
                keep.contains(&m.hom.0) && keep.contains(&m.hom.1)
            })
            .cloned()
            .collect();
        Ok(TwistedComplex { objects: self.objects[from..].to_vec(), x })
    }

    /// Object indices and matrix entries in `ainf`.
    fn resolve(&self, ainf: &AInfData) -> Result<(Vec<usize>, BTreeSet<usize>)> {
        let objects = self.objects.iter().map(|o| ainf.object_index(o)).collect::<Result<Vec<_>>>()?;
        if objects.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::ShapeMismatch("twisted complex objects must be increasing".into()));
        }
        let mut x = BTreeSet::new();
        for n in &self.x {
            let m = ainf.morphism_index(n)?;
            let (i, j) = ainf.morphisms[m].hom;
            if !objects.contains(&i) || !objects.contains(&j) {
                return Err(Error::ShapeMismatch(format!("entry `{n}` is not between objects of the complex")));
            }
            x.insert(m);
        }
        Ok((objects, x))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McCheck {
    /// Σ_d μ^d(X, …, X), as morphism names.
    pub residual: Vec<String>,
}

impl McCheck {
    pub fn holds(&self) -> bool {
        self.residual.is_empty()
    }
}

pub fn check_maurer_cartan(ainf: &AInfData, tw: &TwistedComplex) -> Result<McCheck> {
    let (objects, x) = tw.resolve(ainf)?;
    let mut acc: BTreeSet<usize> = BTreeSet::new();
    for (inputs, outs) in ainf.ops() {
        if inputs.iter().all(|m| x.contains(m)) {
            // A chain of d entries visits d + 1 distinct objects.
            debug_assert!(inputs.len() < objects.len());
            for &o in outs {
                if !acc.insert(o) {
                    acc.remove(&o);
                }
            }
        }
    }
    Ok(McCheck { residual: acc.into_iter().map(|m| ainf.morphisms[m].name.clone()).collect() })
}

/// X = Σ ε(a)·a over forward chords between the components of `order`.
pub fn build_mc_from_aug(dga: &FreeDga, order: &[usize], eps: &Augmentation) -> Result<TwistedComplex> {
    if let Some(w) = is_augmentation_on(dga, eps, order)?.witness {
        return Err(Error::NotAnAugmentation(dga.name(w.generator()).to_string()));
    }
    let pos = |c: usize| order.iter().position(|&o| o == c);
    let mut x = Vec::new();
    for g in eps.support() {
        let gen = dga.generator(g);
        if let (Some(i), Some(j)) = (pos(gen.to), pos(gen.from)) {
            if i > j {
                return Err(Error::OrderReversingNonzero(dga.name(g).to_string()));
            }
            if i < j {
                x.push(dga.name(g).to_string());
            }
        }
    }
    Ok(TwistedComplex { objects: order.iter().map(|&c| dga.components()[c].clone()).collect(), x })
}

/// hom(T, 𝔏) = ⊕ hom(T, L_i) with μ¹_Tw(q) = Σ_k μ^{k+1}(q, X, …, X) in
/// word order.
pub fn tw_hom_complex(ainf: &AInfData, test: &str, tw: &TwistedComplex) -> Result<F2Complex> {
    if !check_maurer_cartan(ainf, tw)?.holds() {
        return Err(Error::MaurerCartanViolated);
    }
    let t = ainf.object_index(test)?;
    let (objects, x) = tw.resolve(ainf)?;
    if objects.contains(&t) {
        return Err(Error::ShapeMismatch(format!("test object `{test}` is part of the twisted complex")));
    }
    let mut module = Vec::new();
    for &o in &objects {
        for (m, mor) in ainf.morphisms.iter().enumerate() {
            if mor.hom == (t, o) {
                module.push(m);
            }
        }
    }
    let row: BTreeMap<usize, usize> = module.iter().enumerate().map(|(r, &m)| (m, r)).collect();
    let mut d = vec![BTreeSet::new(); module.len()];
    for (inputs, outs) in ainf.ops() {
        let Some(&col) = row.get(&inputs[0]) else { continue };
        if !inputs[1..].iter().all(|m| x.contains(m)) {
            continue;
        }
        for o in outs {
            let r = row[o];
            if !d[col].insert(r) {
                d[col].remove(&r);
            }
        }
    }
    let gens = module.iter().map(|&m| (ainf.morphisms[m].name.clone(), ainf.morphisms[m].degree)).collect();
    F2Complex::new(gens, d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChopReport {
    pub full: Ranks,
    /// H hom(T, L_0).
    pub first: Ranks,
    /// H hom_Tw(T, 𝔏') for the complex on the remaining objects.
    pub rest: Ranks,
}

impl ChopReport {
    pub fn holds(&self) -> bool {
        self.first.total() == self.rest.total()
    }
}

/// When hom_Tw(T, 𝔏) is acyclic, the cone sequence forces
/// H hom(T, L_0) ≅ H hom_Tw(T, 𝔏') up to a shift of one.
pub fn chop_rank_check(ainf: &AInfData, test: &str, tw: &TwistedComplex) -> Result<ChopReport> {
    let full = homology_f2(&tw_hom_complex(ainf, test, tw)?)?;
    if full.total() != 0 {
        return Err(Error::NotAcyclic(full.total()));
    }
    let first = TwistedComplex { objects: tw.objects[..1].to_vec(), x: Vec::new() };
    let first = homology_f2(&tw_hom_complex(ainf, test, &first)?)?;
    let rest = homology_f2(&tw_hom_complex(ainf, test, &tw.tail(ainf, 1)?)?)?;
    Ok(ChopReport { full, first, rest })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Action, DgaBuilder};

    /// T, L0, L1 with hom(T, L0) = {q0}, hom(T, L1) = {q1}, x ∈ hom(L0, L1)
    /// and d(q1) = q0·x.
    fn cone() -> FreeDga {
        DgaBuilder::new(["T", "L0", "L1"])
            .generator("q0", 0, Action::from(1), "L0", "T")
            .generator("x", 0, Action::from(1), "L1", "L0")
            .generator("q1", 1, Action::from(3), "L1", "T")
            .diff("q1", &[&["q0", "x"]])
            .build()
            .unwrap()
    }

    #[test]
    fn zero_matrix_satisfies_mc() {
        let dga = cone();
        let ainf = ainf_from_link(&dga, &[0, 1, 2], &Augmentation::zero(&dga)).unwrap();
        let tw = TwistedComplex { objects: vec!["L0".into(), "L1".into()], x: vec![] };
        assert!(check_maurer_cartan(&ainf, &tw).unwrap().holds());
        let c = tw_hom_complex(&ainf, "T", &tw).unwrap();
        assert_eq!(homology_f2(&c).unwrap(), Ranks { h0: 1, h1: 1 });
    }

    #[test]
    fn two_objects_have_no_higher_products() {
        let dga = cone();
        let ainf = ainf_from_link(&dga, &[1, 2], &Augmentation::zero(&dga)).unwrap();
        assert_eq!(ainf.max_arity(), 0);
        let ainf = ainf_from_link(&dga, &[0, 1, 2], &Augmentation::zero(&dga)).unwrap();
        assert_eq!(ainf.max_arity(), 2);
        assert!(ainf.a_infinity_failure().is_none());
    }

    #[test]
    fn cone_over_x_is_acyclic_and_chops() {
        let dga = cone();
        let mut eps = Augmentation::zero(&dga);
        eps.set(dga.id("x").unwrap(), true);
        let ainf = ainf_from_link(&dga, &[0, 1, 2], &eps).unwrap();
        let tw = build_mc_from_aug(&dga, &[1, 2], &eps).unwrap();
        assert_eq!(tw.x, vec!["x".to_string()]);
        let c = tw_hom_complex(&ainf, "T", &tw).unwrap();
        assert_eq!(homology_f2(&c).unwrap(), Ranks::default());
        let r = chop_rank_check(&ainf, "T", &tw).unwrap();
        assert!(r.holds());
        assert_eq!(r.first.total(), 1);
    }

    #[test]
    fn order_reversing_value_is_refused() {
        let dga = cone();
        let mut eps = Augmentation::zero(&dga);
        eps.set(dga.id("x").unwrap(), true);
        assert!(matches!(build_mc_from_aug(&dga, &[2, 1], &eps), Err(Error::OrderReversingNonzero(_))));
    }

    #[test]
    fn not_acyclic_is_reported() {
        let dga = cone();
        let ainf = ainf_from_link(&dga, &[0, 1, 2], &Augmentation::zero(&dga)).unwrap();
        let tw = TwistedComplex { objects: vec!["L0".into(), "L1".into()], x: vec![] };
        assert_eq!(chop_rank_check(&ainf, "T", &tw), Err(Error::NotAcyclic(2)));
    }

    #[test]
    fn induced_augmentations_solve_mc() {
        use crate::augment::{filtered_induction, TriangleStructure};
        use crate::io::dga_from_json;
        let read = |f: &str| std::fs::read_to_string(format!("{}/../../fixtures/triangle/{f}", env!("CARGO_MANIFEST_DIR"))).unwrap();
        for name in ["single", "empty", "chain3", "pure_reversing", "two_pairs", "wide3"] {
            let dga = dga_from_json(&read(&format!("{name}.dga.json"))).unwrap();
            let s = TriangleStructure::from_json(&dga, &read(&format!("{name}.structure.json"))).unwrap();
            let eps = filtered_induction(&dga, &s).unwrap();
            let order = s.object_order();
            let ainf = ainf_from_link(&dga, &order, &eps).unwrap();
            assert_eq!(ainf.a_infinity_failure(), None, "{name}");
            let tw = build_mc_from_aug(&dga, &order, &eps).unwrap();
            assert!(check_maurer_cartan(&ainf, &tw).unwrap().holds(), "{name}");
        }
    }

    #[test]
    fn json_round_trip() {
        let dga = cone();
        let ainf = ainf_from_link(&dga, &[0, 1, 2], &Augmentation::zero(&dga)).unwrap();
        assert_eq!(AInfData::from_json(&ainf.to_json()).unwrap(), ainf);
    }
}
