//! JSON schemas for DGAs.
//!
//! ```json
//! {"components": ["K"],
//!  "generators": [{"name": "a", "degree": 1, "action": "1/1", "from": "K", "to": "K"}],
//!  "differential": {"a": []}}
//! ```
//! The differential maps a generator name to the F2 sum of its words, each
//! word a list of generator names; `[]` inside the outer list is the unit.
//! Emission is canonical: generators in declaration order, words sorted,
//! actions reduced.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::algebra::{format_action, parse_action, DgaBuilder, FreeDga};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorRecord {
    pub name: String,
    pub degree: u8,
    pub action: String,
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DgaFile {
    /// Free-form provenance note; ignored by the engine.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
    pub components: Vec<String>,
    pub generators: Vec<GeneratorRecord>,
    #[serde(default)]
    pub differential: IndexMap<String, Vec<Vec<String>>>,
}

impl DgaFile {
    pub fn into_dga(self) -> Result<FreeDga> {
        let mut b = DgaBuilder::new(self.components);
        for g in &self.generators {
            b = b.generator(&g.name, g.degree, parse_action(&g.action)?, &g.from, &g.to);
        }
        for (name, words) in self.differential {
            b = b.diff_owned(name, words);
        }
        b.build()
    }

    pub fn from_dga(dga: &FreeDga) -> Self {
        let comps = dga.components();
        let generators = dga
            .generators()
            .iter()
            .map(|g| GeneratorRecord {
                name: g.name.clone(),
                degree: g.degree,
                action: format_action(&g.action),
                from: comps[g.from].clone(),
                to: comps[g.to].clone(),
            })
            .collect();
        let differential = dga
            .ids()
            .map(|g| {
                let words = dga
                    .diff(g)
                    .words()
                    .map(|w| w.factors().iter().map(|f| dga.name(*f).to_string()).collect())
                    .collect();
                (dga.name(g).to_string(), words)
            })
            .collect();
        DgaFile { comment: None, components: comps.to_vec(), generators, differential }
    }
}

pub fn dga_from_json(s: &str) -> Result<FreeDga> {
    serde_json::from_str::<DgaFile>(s)?.into_dga()
}

pub fn dga_to_json(dga: &FreeDga) -> String {
    let mut s = serde_json::to_string_pretty(&DgaFile::from_dga(dga)).expect("dga serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    const UNKNOT: &str = r#"{"components":["K"],
        "generators":[{"name":"a","degree":1,"action":"1","from":"K","to":"K"}],
        "differential":{"a":[]}}"#;

    #[test]
    fn parse_and_reemit_is_stable() {
        let dga = dga_from_json(UNKNOT).unwrap();
        let once = dga_to_json(&dga);
        let again = dga_to_json(&dga_from_json(&once).unwrap());
        assert_eq!(once, again);
        assert!(once.contains("\"1/1\""));
    }

    #[test]
    fn unit_word_round_trips() {
        let s = r#"{"components":["K"],
            "generators":[{"name":"b","degree":1,"action":"1","from":"K","to":"K"}],
            "differential":{"b":[[]]}}"#;
        let dga = dga_from_json(s).unwrap();
        let b = dga.id("b").unwrap();
        assert_eq!(dga.diff(b), &crate::algebra::Element::one());
        assert!(dga_to_json(&dga).contains("[]"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let s = r#"{"components":[],"generators":[],"differential":{},"extra":1}"#;
        assert!(matches!(dga_from_json(s), Err(Error::Json(_))));
    }
}
