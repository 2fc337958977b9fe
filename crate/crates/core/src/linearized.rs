//! Bilinearized complexes on mixed chords and their homology over F2.

use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::algebra::{FreeDga, GenId};
use crate::augment::{is_augmentation_on, Augmentation};
use crate::error::{Error, Result};

/// A finite Z/2-graded complex over F2. `d[j]` lists the rows hit by
/// column `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct F2Complex {
    gens: Vec<(String, u8)>,
    d: Vec<BTreeSet<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexFile {
    pub gens: Vec<(String, u8)>,
    #[serde(default)]
    pub d: IndexMap<String, Vec<String>>,
}

impl F2Complex {
    pub fn new(gens: Vec<(String, u8)>, d: Vec<BTreeSet<usize>>) -> Result<Self> {
        if d.len() != gens.len() {
            return Err(Error::ShapeMismatch(format!("{} columns for {} generators", d.len(), gens.len())));
        }
        let mut seen = BTreeSet::new();
        for (name, deg) in &gens {
            if !seen.insert(name) {
                return Err(Error::DuplicateName(name.clone()));
            }
            if *deg > 1 {
                return Err(Error::Malformed(format!("degree {deg} of `{name}` is not 0 or 1")));
            }
        }
        for (j, col) in d.iter().enumerate() {
            for &i in col {
                let target = gens.get(i).ok_or_else(|| Error::UnknownGenerator(format!("row {i}")))?;
                if target.1 == gens[j].1 {
                    return Err(Error::GradingMismatch { generator: gens[j].0.clone(), word: target.0.clone() });
                }
            }
        }
        Ok(F2Complex { gens, d })
    }

    pub fn zero() -> Self {
        F2Complex { gens: Vec::new(), d: Vec::new() }
    }

    pub fn from_file(f: ComplexFile) -> Result<Self> {
        let index: BTreeMap<&str, usize> = f.gens.iter().enumerate().map(|(i, g)| (g.0.as_str(), i)).collect();
        let mut d = vec![BTreeSet::new(); f.gens.len()];
        for (src, targets) in &f.d {
            let j = *index.get(src.as_str()).ok_or_else(|| Error::UnknownGenerator(src.clone()))?;
            for t in targets {
                let i = *index.get(t.as_str()).ok_or_else(|| Error::UnknownGenerator(t.clone()))?;
                if !d[j].insert(i) {
                    d[j].remove(&i);
                }
            }
        }
        F2Complex::new(f.gens, d)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(s)?)
    }

    /// Every generator gets an entry in `d`, targets in generator order.
    pub fn to_file(&self) -> ComplexFile {
        ComplexFile {
            gens: self.gens.clone(),
            d: self
                .gens
                .iter()
                .zip(&self.d)
                .map(|((name, _), col)| (name.clone(), col.iter().map(|&i| self.gens[i].0.clone()).collect()))
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_file()).expect("complex serializes");
        s.push('\n');
        s
    }

    pub fn gens(&self) -> &[(String, u8)] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn column(&self, j: usize) -> &BTreeSet<usize> {
        &self.d[j]
    }

    pub fn count_in_degree(&self, deg: u8) -> usize {
        self.gens.iter().filter(|g| g.1 == deg).count()
    }

    /// Renames generators; the matrix is unchanged.
    pub fn renamed(&self, f: impl Fn(&str) -> String) -> Self {
        F2Complex { gens: self.gens.iter().map(|(n, d)| (f(n), *d)).collect(), d: self.d.clone() }
    }

    /// First column `j` with d(d(e_j)) ≠ 0.
    pub fn d_squared_failure(&self) -> Option<usize> {
        (0..self.len()).find(|&j| {
            let mut acc = BTreeSet::new();
            for &i in &self.d[j] {
                for &k in &self.d[i] {
                    if !acc.insert(k) {
                        acc.remove(&k);
                    }
                }
            }
            !acc.is_empty()
        })
    }
}

/// Ranks of homology in degrees 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Ranks {
    pub h0: usize,
    pub h1: usize,
}

impl Ranks {
    pub fn total(&self) -> usize {
        self.h0 + self.h1
    }

    /// Ranks with the degrees exchanged.
    pub fn shifted(&self) -> Ranks {
        Ranks { h0: self.h1, h1: self.h0 }
    }
}

/// Rank of a set of F2 columns by elimination on the lowest row index.
pub fn column_rank(columns: impl IntoIterator<Item = BTreeSet<usize>>) -> usize {
    let mut pivots: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    let mut rank = 0;
    for mut col in columns {
        while let Some(&low) = col.iter().next() {
            match pivots.get(&low) {
                Some(p) => {
                    for &i in p {
                        if !col.insert(i) {
                            col.remove(&i);
                        }
                    }
                }
                None => {
                    pivots.insert(low, col);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

pub fn homology_f2(c: &F2Complex) -> Result<Ranks> {
    if let Some(j) = c.d_squared_failure() {
        return Err(Error::NotAComplex(c.gens[j].0.clone()));
    }
    let rank_from = |deg: u8| column_rank((0..c.len()).filter(|&j| c.gens[j].1 == deg).map(|j| c.d[j].clone()));
    let (r0, r1) = (rank_from(0), rank_from(1));
    // d maps degree k to degree k + 1, so image and kernel split by degree.
    Ok(Ranks { h0: c.count_in_degree(0) - r0 - r1, h1: c.count_in_degree(1) - r1 - r0 })
}

/// The complex on chords from `group1` to `group0`: the coefficient of
/// `q⁺` in ∂(q⁻) counts words `p⁰·q⁻·p¹` of d(q⁺), weighted by `eps0` on the
/// block of chords within `group0` and `eps1` on the block within `group1`.
/// Words through any other component do not contribute.
pub fn bilinearized_complex(
    dga: &FreeDga,
    group0: &[usize],
    group1: &[usize],
    eps0: &Augmentation,
    eps1: &Augmentation,
) -> Result<F2Complex> {
    if group0.iter().any(|c| group1.contains(c)) {
        return Err(Error::ShapeMismatch("the two component groups overlap".into()));
    }
    for (eps, group) in [(eps0, group0), (eps1, group1)] {
        if let Some(w) = is_augmentation_on(dga, eps, group)?.witness {
            return Err(Error::NotAnAugmentation(dga.name(w.generator()).to_string()));
        }
    }
    let in0 = |c: usize| group0.contains(&c);
    let in1 = |c: usize| group1.contains(&c);
    let cross = |g: GenId| {
        let x = dga.generator(g);
        (in1(x.from) && in0(x.to)) || (in0(x.from) && in1(x.to))
    };
    let mixed: Vec<GenId> = dga.ids().filter(|&g| in1(dga.generator(g).from) && in0(dga.generator(g).to)).collect();
    let index: BTreeMap<GenId, usize> = mixed.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let mut d = vec![BTreeSet::new(); mixed.len()];
    for (row, &qp) in mixed.iter().enumerate() {
        for w in dga.diff(qp).words() {
            let f = w.factors();
            let outside = f.iter().any(|&g| {
                let x = dga.generator(g);
                !(in0(x.from) || in1(x.from)) || !(in0(x.to) || in1(x.to))
            });
            if outside {
                continue;
            }
            let crossings: Vec<usize> = (0..f.len()).filter(|&i| cross(f[i])).collect();
            if crossings.is_empty() {
                continue;
            }
            if crossings.len() > 1 {
                return Err(Error::MixedWordViolation {
                    generator: dga.name(qp).to_string(),
                    word: dga.format_word(w),
                    count: crossings.len(),
                });
            }
            let at = crossings[0];
            let Some(&col) = index.get(&f[at]) else {
                // A chord from group0 to group1 cannot sit alone in a word
                // from group1 to group0.
                continue;
            };
            let left = f[..at].iter().all(|&g| eps0.value(g));
            let right = f[at + 1..].iter().all(|&g| eps1.value(g));
            if left && right && !d[col].insert(row) {
                d[col].remove(&row);
            }
        }
    }
    let gens = mixed.iter().map(|&g| (dga.name(g).to_string(), dga.generator(g).degree)).collect();
    F2Complex::new(gens, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Action, DgaBuilder};

    fn dense_rank(c: &F2Complex, deg: u8) -> usize {
        let cols: Vec<usize> = (0..c.len()).filter(|&j| c.gens()[j].1 == deg).collect();
        let mut m: Vec<Vec<bool>> = (0..c.len()).map(|i| cols.iter().map(|&j| c.column(j).contains(&i)).collect()).collect();
        let mut rank = 0;
        for col in 0..cols.len() {
            if let Some(p) = (rank..m.len()).find(|&r| m[r][col]) {
                m.swap(rank, p);
                for r in 0..m.len() {
                    if r != rank && m[r][col] {
                        let pivot = m[rank].clone();
                        for (x, y) in m[r].iter_mut().zip(pivot) {
                            *x ^= y;
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    #[test]
    fn zero_differential() {
        let c = F2Complex::from_json(r#"{"gens":[["x",0],["y",0],["z",1]],"d":{}}"#).unwrap();
        assert_eq!(homology_f2(&c).unwrap(), Ranks { h0: 2, h1: 1 });
    }

    #[test]
    fn acyclic_pair() {
        let c = F2Complex::from_json(r#"{"gens":[["qm",0],["qp",1]],"d":{"qm":["qp"]}}"#).unwrap();
        assert_eq!(homology_f2(&c).unwrap(), Ranks { h0: 0, h1: 0 });
    }

    #[test]
    fn d_squared_nonzero_is_rejected() {
        let c = F2Complex::from_json(r#"{"gens":[["x",0],["y",1],["z",0]],"d":{"x":["y"],"y":["z"]}}"#).unwrap();
        assert_eq!(homology_f2(&c), Err(Error::NotAComplex("x".into())));
    }

    #[test]
    fn json_round_trip() {
        let s = r#"{"gens":[["x",0],["y",1]],"d":{"x":["y"]}}"#;
        let c = F2Complex::from_json(s).unwrap();
        assert_eq!(F2Complex::from_json(&c.to_json()).unwrap(), c);
    }

    fn two_component(word: &[&str]) -> FreeDga {
        DgaBuilder::new(["T", "L"])
            .generator("p", 0, Action::from(1), "T", "T")
            .generator("qm", 0, Action::from(1), "L", "T")
            .generator("qp", 1, Action::from(3), "L", "T")
            .diff("qp", &[word])
            .build()
            .unwrap()
    }

    #[test]
    fn no_mixed_chords_gives_zero_complex() {
        let dga = DgaBuilder::new(["T", "L"]).pure("p", 0, Action::from(1)).build().unwrap();
        let z = Augmentation::zero(&dga);
        let c = bilinearized_complex(&dga, &[0], &[1], &z, &z).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn single_cancelling_pair() {
        let dga = two_component(&["qm"]);
        let z = Augmentation::zero(&dga);
        let c = bilinearized_complex(&dga, &[0], &[1], &z, &z).unwrap();
        assert_eq!(c.column(0), &BTreeSet::from([1]));
        assert_eq!(homology_f2(&c).unwrap(), Ranks::default());
    }

    #[test]
    fn pure_block_is_weighted() {
        let dga = two_component(&["p", "qm"]);
        let z = Augmentation::zero(&dga);
        let mut e = z.clone();
        e.set(dga.id("p").unwrap(), true);
        let on = bilinearized_complex(&dga, &[0], &[1], &e, &z).unwrap();
        let off = bilinearized_complex(&dga, &[0], &[1], &z, &z).unwrap();
        assert_eq!(on.column(0), &BTreeSet::from([1]));
        assert!(off.column(0).is_empty());
    }

    #[test]
    fn dense_oracle_agrees_on_random_complexes() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n0 = rng.gen_range(0..6);
            let n1 = rng.gen_range(0..6);
            let mut gens: Vec<(String, u8)> = (0..n0).map(|i| (format!("x{i}"), 0)).collect();
            gens.extend((0..n1).map(|i| (format!("y{i}"), 1)));
            // d = A on degree 0 with zero on degree 1 keeps d^2 = 0.
            let d = (0..n0 + n1)
                .map(|j| if j < n0 { (n0..n0 + n1).filter(|_| rng.gen_bool(0.4)).collect() } else { BTreeSet::new() })
                .collect();
            let c = F2Complex::new(gens, d).unwrap();
            let r = homology_f2(&c).unwrap();
            let dr = dense_rank(&c, 0);
            assert_eq!(r.h0, n0 - dr);
            assert_eq!(r.h1, n1 - dr);
        }
    }
}
