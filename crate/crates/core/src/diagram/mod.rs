//! Combinatorial Lagrangian projections of Legendrian links in R^3.
//!
//! A diagram is a 4-valent planar graph given by a rotation system: every
//! crossing has four ports numbered counterclockwise, ports `p` and `p + 2`
//! carry the same strand, and each edge runs from an exit port to an entry
//! port following the link orientation. Quadrant `k` of a crossing is the
//! sector between ports `k` and `k + 1`.
//!
//! Each crossing carries the height of its Reeb chord and the Reeb signs of
//! its quadrants. Positive quadrants are the two swept when the upper strand
//! is rotated counterclockwise onto the lower one, so the upper strand is the
//! one through ports `k` and `k + 2` for a positive quadrant `k`.
//!
//! A face's area is the signed sum of the heights at its corners (plus for a
//! positive quadrant, minus for a negative one). Heights are realizable when
//! every bounded face gets positive area; the unbounded face of each
//! connected piece is then the unique face of nonpositive area. Separate
//! connected pieces are taken to lie side by side, never nested.

mod discs;
mod resolve;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::{format_action, parse_action, Action, Element, FreeDga, Generator, Word};
use crate::error::{Error, Result};

pub use discs::{enumerate_admissible_discs, AdmissibleDisc, DiscSearch, Visit};

/// One end of an edge: a crossing index and a port in `0..4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Port {
    pub crossing: usize,
    pub port: u8,
}

impl Port {
    pub fn new(crossing: usize, port: u8) -> Self {
        Port { crossing, port: port % 4 }
    }

    /// The port `k` steps counterclockwise at the same crossing.
    pub fn rotate(self, k: u8) -> Port {
        Port::new(self.crossing, (self.port + k) % 4)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Crossing {
    pub id: String,
    pub height: Action,
    /// Parity of the ports carrying the upper strand.
    pub upper: u8,
    /// Explicit degree overriding the crossing-sign rule.
    pub degree_override: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    /// Quadrants `(crossing, k)` in boundary order.
    pub corners: Vec<(usize, u8)>,
    pub area: Action,
    pub outer: bool,
    /// Connected piece of the graph the face belongs to.
    pub piece: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkDiagram {
    components: Vec<String>,
    crossings: Vec<Crossing>,
    /// `partner[c][p]` is the other end of the edge at port `p` of `c`.
    partner: Vec<[Port; 4]>,
    /// Whether the edge at `(c, p)` leaves `c` there.
    exit: Vec<[bool; 4]>,
    /// Component of the strand through each port.
    port_component: Vec<[usize; 4]>,
    /// Components drawn as crossingless closed curves.
    loops: Vec<usize>,
    contractible: BTreeSet<usize>,
    faces: Vec<Face>,
    /// `face_of[c][k]`: the face containing quadrant `k` of crossing `c`.
    face_of: Vec<[usize; 4]>,
    comment: Option<String>,
}

// ---------------------------------------------------------------- file format

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossingRecord {
    pub id: String,
    pub height: String,
    /// Optional explicit Z/2 degree; otherwise the crossing sign decides.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_data: Option<u8>,
    /// Reeb signs of quadrants 0..4, each `"+"` or `"-"`.
    pub quadrants: [String; 4],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub from: (String, u8),
    pub to: (String, u8),
    pub component: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
    /// Component order; defaults to order of first appearance in `edges`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<String>,
    pub crossings: Vec<CrossingRecord>,
    pub edges: Vec<EdgeRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub loops: Vec<String>,
    #[serde(default)]
    pub contractible: Vec<String>,
}

pub fn parse_diagram(s: &str) -> Result<LinkDiagram> {
    let file: DiagramFile = serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))?;
    LinkDiagram::from_file(file)
}

impl LinkDiagram {
    pub fn from_file(file: DiagramFile) -> Result<Self> {
        if file.crossings.is_empty() && file.loops.is_empty() {
            return Err(Error::BadValence("diagram has no crossings".into()));
        }
        let mut cindex = HashMap::new();
        let mut crossings = Vec::with_capacity(file.crossings.len());
        for (i, c) in file.crossings.iter().enumerate() {
            if cindex.insert(c.id.clone(), i).is_some() {
                return Err(Error::Malformed(format!("duplicate crossing `{}`", c.id)));
            }
            let height = parse_action(&c.height).map_err(|_| Error::Malformed(format!("bad height `{}`", c.height)))?;
            if height <= Action::zero() {
                return Err(Error::Malformed(format!("crossing `{}` has nonpositive height", c.id)));
            }
            let signs = c
                .quadrants
                .iter()
                .map(|q| match q.as_str() {
                    "+" => Ok(true),
                    "-" => Ok(false),
                    other => Err(Error::Malformed(format!("quadrant sign `{other}` at `{}`", c.id))),
                })
                .collect::<Result<Vec<_>>>()?;
            if signs[0] != signs[2] || signs[1] != signs[3] || signs[0] == signs[1] {
                return Err(Error::Malformed(format!("quadrant signs at `{}` must alternate", c.id)));
            }
            if let Some(d) = c.degree_data {
                if d > 1 {
                    return Err(Error::Malformed(format!("degree_data at `{}` must be 0 or 1", c.id)));
                }
            }
            crossings.push(Crossing {
                id: c.id.clone(),
                height,
                upper: if signs[0] { 0 } else { 1 },
                degree_override: c.degree_data,
            });
        }

        let mut components = file.components.clone();
        let comp_of = |name: &str, components: &mut Vec<String>| -> usize {
            match components.iter().position(|c| c == name) {
                Some(i) => i,
                None => {
                    components.push(name.to_string());
                    components.len() - 1
                }
            }
        };
        let declared = !file.components.is_empty();

        let n = crossings.len();
        let none = Port::new(usize::MAX, 0);
        let mut partner = vec![[none; 4]; n];
        let mut exit = vec![[false; 4]; n];
        let mut port_component = vec![[usize::MAX; 4]; n];
        let lookup = |end: &(String, u8)| -> Result<Port> {
            let c = *cindex.get(&end.0).ok_or_else(|| Error::Malformed(format!("unknown crossing `{}`", end.0)))?;
            if end.1 > 3 {
                return Err(Error::BadValence(format!("port {} at `{}`", end.1, end.0)));
            }
            Ok(Port::new(c, end.1))
        };
        for e in &file.edges {
            if declared && !file.components.contains(&e.component) {
                return Err(Error::Malformed(format!("undeclared component `{}`", e.component)));
            }
            let k = comp_of(&e.component, &mut components);
            let (a, b) = (lookup(&e.from)?, lookup(&e.to)?);
            for (p, q, out) in [(a, b, true), (b, a, false)] {
                if partner[p.crossing][p.port as usize] != none {
                    return Err(Error::BadValence(format!(
                        "port {} of `{}` used twice",
                        p.port, crossings[p.crossing].id
                    )));
                }
                partner[p.crossing][p.port as usize] = q;
                exit[p.crossing][p.port as usize] = out;
                port_component[p.crossing][p.port as usize] = k;
            }
        }
        for (c, ps) in partner.iter().enumerate() {
            if let Some(p) = ps.iter().position(|q| *q == none) {
                return Err(Error::BadValence(format!("port {p} of `{}` is unused", crossings[c].id)));
            }
            for p in 0..2 {
                if exit[c][p] == exit[c][p + 2] {
                    return Err(Error::Malformed(format!(
                        "strand through ports {p},{} of `{}` must enter on one and leave on the other",
                        p + 2,
                        crossings[c].id
                    )));
                }
                if port_component[c][p] != port_component[c][p + 2] {
                    return Err(Error::Malformed(format!(
                        "strand through ports {p},{} of `{}` changes component",
                        p + 2,
                        crossings[c].id
                    )));
                }
            }
        }

        let mut loops = Vec::new();
        for l in &file.loops {
            if declared && !file.components.contains(l) {
                return Err(Error::Malformed(format!("undeclared component `{l}`")));
            }
            let k = comp_of(l, &mut components);
            if loops.contains(&k) {
                return Err(Error::Malformed(format!("loop `{l}` listed twice")));
            }
            loops.push(k);
        }

        let mut contractible = BTreeSet::new();
        for id in &file.contractible {
            contractible.insert(*cindex.get(id).ok_or_else(|| Error::UnknownCrossing(id.clone()))?);
        }

        let mut d = LinkDiagram {
            components,
            crossings,
            partner,
            exit,
            port_component,
            loops,
            contractible,
            faces: Vec::new(),
            face_of: Vec::new(),
            comment: file.comment,
        };
        d.check_components()?;
        d.trace_faces()?;
        Ok(d)
    }

    /// Every component is one closed cycle of strands (or a declared loop).
    fn check_components(&self) -> Result<()> {
        let n = self.crossings.len();
        let mut seen = vec![[false; 4]; n];
        let mut cycles_per_comp: BTreeMap<usize, usize> = BTreeMap::new();
        for c in 0..n {
            for p in 0..4u8 {
                if !self.exit[c][p as usize] || seen[c][p as usize] {
                    continue;
                }
                let start = Port::new(c, p);
                let comp = self.port_component[c][p as usize];
                let mut cur = start;
                loop {
                    seen[cur.crossing][cur.port as usize] = true;
                    let arrive = self.partner_of(cur);
                    let next = arrive.rotate(2);
                    if next == start {
                        break;
                    }
                    cur = next;
                }
                *cycles_per_comp.entry(comp).or_default() += 1;
            }
        }
        for (comp, cycles) in &cycles_per_comp {
            if *cycles != 1 || self.loops.contains(comp) {
                return Err(Error::Malformed(format!(
                    "component `{}` is not a single closed curve",
                    self.components[*comp]
                )));
            }
        }
        for (k, name) in self.components.iter().enumerate() {
            if !cycles_per_comp.contains_key(&k) && !self.loops.contains(&k) {
                return Err(Error::BadValence(format!("component `{name}` has no crossings")));
            }
        }
        Ok(())
    }

    fn trace_faces(&mut self) -> Result<()> {
        let n = self.crossings.len();
        // Connected pieces.
        let mut piece = vec![usize::MAX; n];
        let mut pieces = 0;
        for s in 0..n {
            if piece[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            piece[s] = pieces;
            while let Some(c) = stack.pop() {
                for q in self.partner[c] {
                    if piece[q.crossing] == usize::MAX {
                        piece[q.crossing] = pieces;
                        stack.push(q.crossing);
                    }
                }
            }
            pieces += 1;
        }

        let mut face_of = vec![[usize::MAX; 4]; n];
        let mut faces: Vec<Face> = Vec::new();
        for c in 0..n {
            for k in 0..4u8 {
                if face_of[c][k as usize] != usize::MAX {
                    continue;
                }
                // Walk with the face on the left: leave through port k, so the
                // face's corner here is quadrant k.
                let id = faces.len();
                let mut corners = Vec::new();
                let mut cur = Port::new(c, k);
                loop {
                    if face_of[cur.crossing][cur.port as usize] != usize::MAX {
                        if cur == Port::new(c, k) {
                            break;
                        }
                        return Err(Error::NonPlanar("face tracing is inconsistent".into()));
                    }
                    face_of[cur.crossing][cur.port as usize] = id;
                    corners.push((cur.crossing, cur.port));
                    let arrive = self.partner_of(cur);
                    cur = arrive.rotate(3);
                }
                let area = corners.iter().fold(Action::zero(), |acc, &(c, k)| acc + self.corner_weight(c, k));
                faces.push(Face { corners, area, outer: false, piece: piece[c] });
            }
        }

        for p in 0..pieces {
            let v = piece.iter().filter(|&&x| x == p).count();
            let f: Vec<usize> = (0..faces.len()).filter(|&i| faces[i].piece == p).collect();
            if f.len() != v + 2 {
                return Err(Error::NonPlanar(format!(
                    "piece with {v} crossings has {} faces, Euler's formula needs {}",
                    f.len(),
                    v + 2
                )));
            }
            let nonpos: Vec<usize> = f.iter().copied().filter(|&i| faces[i].area <= Action::zero()).collect();
            if nonpos.len() != 1 {
                return Err(Error::Malformed(format!(
                    "heights are not realizable: {} faces of nonpositive area in one piece",
                    nonpos.len()
                )));
            }
            faces[nonpos[0]].outer = true;
        }
        self.faces = faces;
        self.face_of = face_of;
        Ok(())
    }

    pub fn to_file(&self) -> DiagramFile {
        let mut edges = Vec::new();
        for c in 0..self.crossings.len() {
            for p in 0..4u8 {
                if self.exit[c][p as usize] {
                    let to = self.partner[c][p as usize];
                    edges.push(EdgeRecord {
                        from: (self.crossings[c].id.clone(), p),
                        to: (self.crossings[to.crossing].id.clone(), to.port),
                        component: self.components[self.port_component[c][p as usize]].clone(),
                    });
                }
            }
        }
        DiagramFile {
            comment: self.comment.clone(),
            components: self.components.clone(),
            crossings: self
                .crossings
                .iter()
                .map(|c| CrossingRecord {
                    id: c.id.clone(),
                    height: format_action(&c.height),
                    degree_data: c.degree_override,
                    quadrants: std::array::from_fn(|k| if k as u8 % 2 == c.upper { "+" } else { "-" }.to_string()),
                })
                .collect(),
            edges,
            loops: self.loops.iter().map(|&k| self.components[k].clone()).collect(),
            contractible: self.contractible.iter().map(|&c| self.crossings[c].id.clone()).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_file()).expect("diagram serializes");
        s.push('\n');
        s
    }

    // ------------------------------------------------------------ accessors

    pub fn components(&self) -> &[String] {
        &self.components
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn crossing_index(&self, id: &str) -> Result<usize> {
        self.crossings.iter().position(|c| c.id == id).ok_or_else(|| Error::UnknownCrossing(id.to_string()))
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn bounded_face_count(&self) -> usize {
        self.faces.iter().filter(|f| !f.outer).count()
    }

    pub fn face_of(&self, crossing: usize, quadrant: u8) -> usize {
        self.face_of[crossing][(quadrant % 4) as usize]
    }

    /// The other end of the edge at `p`.
    pub fn partner_of(&self, p: Port) -> Port {
        self.partner[p.crossing][p.port as usize]
    }

    /// Whether the edge at `p` leaves the crossing there.
    pub fn is_exit(&self, p: Port) -> bool {
        self.exit[p.crossing][p.port as usize]
    }

    pub fn port_component(&self, p: Port) -> usize {
        self.port_component[p.crossing][p.port as usize]
    }

    pub fn loops(&self) -> &[usize] {
        &self.loops
    }

    pub fn is_contractible(&self, crossing: usize) -> bool {
        self.contractible.contains(&crossing)
    }

    pub fn is_positive_quadrant(&self, crossing: usize, quadrant: u8) -> bool {
        quadrant % 2 == self.crossings[crossing].upper
    }

    /// Signed height contributed by a corner in the given quadrant.
    pub fn corner_weight(&self, crossing: usize, quadrant: u8) -> Action {
        let h = self.crossings[crossing].height;
        if self.is_positive_quadrant(crossing, quadrant) {
            h
        } else {
            -h
        }
    }

    fn exit_port_of_strand(&self, crossing: usize, parity: u8) -> u8 {
        if self.exit[crossing][parity as usize] {
            parity
        } else {
            parity + 2
        }
    }

    /// Writhe sign: +1 when the lower strand's direction is the upper
    /// strand's direction turned a quarter counterclockwise.
    pub fn crossing_sign(&self, crossing: usize) -> i8 {
        let upper = self.crossings[crossing].upper;
        let up_out = self.exit_port_of_strand(crossing, upper);
        let low_out = self.exit_port_of_strand(crossing, 1 - upper);
        if low_out == (up_out + 1) % 4 {
            1
        } else {
            -1
        }
    }

    /// Z/2 degree of the chord: even exactly at positive crossings, unless
    /// overridden in the file.
    pub fn crossing_degree(&self, crossing: usize) -> u8 {
        self.crossings[crossing]
            .degree_override
            .unwrap_or(if self.crossing_sign(crossing) > 0 { 0 } else { 1 })
    }

    /// Component of the lower (`from`) and upper (`to`) strand.
    pub fn chord_components(&self, crossing: usize) -> (usize, usize) {
        let upper = self.crossings[crossing].upper;
        (self.port_component[crossing][(1 - upper) as usize], self.port_component[crossing][upper as usize])
    }

    // ------------------------------------------------------------ DGA

    /// Generators are the crossings, in file order.
    pub fn generators(&self) -> Vec<Generator> {
        (0..self.crossings.len())
            .map(|c| {
                let (from, to) = self.chord_components(c);
                Generator::new(self.crossings[c].id.clone(), self.crossing_degree(c), self.crossings[c].height, from, to)
            })
            .collect()
    }
}

/// Chekanov-Eliashberg DGA of the diagram: d(g) sums the negative-corner
/// words of the admissible discs with positive corner at g.
pub fn diagram_to_dga(diagram: &LinkDiagram, search: &DiscSearch) -> Result<FreeDga> {
    let discs = enumerate_admissible_discs(diagram, search)?;
    let mut diff = vec![Element::zero(); diagram.crossing_count()];
    for d in &discs {
        diff[d.positive].toggle(Word(d.negatives.iter().map(|&(c, _)| crate::algebra::GenId(c)).collect()));
    }
    FreeDga::new(diagram.components().to_vec(), diagram.generators(), diff)
}

pub use resolve::resolve_crossing;
