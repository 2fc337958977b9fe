//! Admissible immersed polygons: one convex positive corner, all other
//! corners convex and negative.
//!
//! The search walks the disc boundary counterclockwise from its positive
//! corner. At each crossing the walk either continues along the strand or
//! turns left into a negative quadrant, paying that crossing's height out of
//! the area budget set by the positive corner. A dart can be traversed at
//! most `floor(h / area)` times, where `area` is that of the face on its
//! left, since every traversal is a separate sheet over that face; darts
//! with the unbounded face on their left are never used.
//!
//! A closed walk is accepted when its winding numbers are nonnegative, the
//! sheets it induces at every crossing are consistent with them, and the
//! resulting cell complex has Euler characteristic 1.

use num_traits::{ToPrimitive, Zero};

use super::{LinkDiagram, Port};
use crate::algebra::Action;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiscSearch {
    /// Maximum number of dart steps explored over the whole enumeration.
    pub budget: u64,
}

impl Default for DiscSearch {
    fn default() -> Self {
        DiscSearch { budget: 5_000_000 }
    }
}

/// A boundary point of the disc mapping to a crossing: the port the
/// boundary arrives on, and whether it turns (a corner) or goes straight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Visit {
    pub crossing: usize,
    pub arrival: u8,
    pub turn: bool,
}

impl Visit {
    /// Quadrants of the crossing covered by the local sheet at this visit.
    pub fn covered(&self) -> impl Iterator<Item = u8> {
        let p = self.arrival;
        let q: &'static [u8] = if self.turn { &[3] } else { &[2, 3] };
        q.iter().map(move |d| (p + d) % 4)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AdmissibleDisc {
    /// Crossing of the positive corner.
    pub positive: usize,
    pub positive_quadrant: u8,
    /// Negative corners `(crossing, quadrant)` in counterclockwise order
    /// starting after the positive corner.
    pub negatives: Vec<(usize, u8)>,
    /// Multiplicity of every face (unbounded faces are 0).
    pub face_multiplicities: Vec<u32>,
    /// Boundary visits, ending with the return to the positive corner.
    pub boundary: Vec<Visit>,
}

impl AdmissibleDisc {
    pub fn area(&self, d: &LinkDiagram) -> Action {
        self.face_multiplicities
            .iter()
            .zip(d.faces())
            .fold(Action::zero(), |acc, (&m, f)| acc + f.area * Action::from(m as i64))
    }
}

/// All admissible discs of the diagram, sorted.
pub fn enumerate_admissible_discs(d: &LinkDiagram, search: &DiscSearch) -> Result<Vec<AdmissibleDisc>> {
    let mut states = 0u64;
    let mut out = Vec::new();
    if d.crossing_count() > 0 && search.budget == 0 {
        return Err(Error::SearchBudgetExceeded(0));
    }
    for a in 0..d.crossing_count() {
        for k in 0..4u8 {
            if !d.is_positive_quadrant(a, k) {
                continue;
            }
            let mut s = Walker::new(d, a, k, search.budget, &mut states);
            s.step(Port::new(a, k))?;
            out.extend(s.found);
        }
    }
    out.sort();
    Ok(out)
}

struct Walker<'a> {
    d: &'a LinkDiagram,
    start: usize,
    quadrant: u8,
    cap: Vec<[u32; 4]>,
    used: Vec<[u32; 4]>,
    visits: Vec<Visit>,
    remaining: Action,
    states: &'a mut u64,
    budget: u64,
    found: Vec<AdmissibleDisc>,
}

impl<'a> Walker<'a> {
    fn new(d: &'a LinkDiagram, start: usize, quadrant: u8, budget: u64, states: &'a mut u64) -> Self {
        let h = d.crossings()[start].height;
        let cap = (0..d.crossing_count())
            .map(|c| {
                std::array::from_fn(|p| {
                    let f = &d.faces()[d.face_of(c, p as u8)];
                    if f.outer {
                        0
                    } else {
                        (h / f.area).floor().to_integer().to_u32().unwrap_or(u32::MAX)
                    }
                })
            })
            .collect();
        Walker {
            d,
            start,
            quadrant,
            cap,
            used: vec![[0; 4]; d.crossing_count()],
            visits: Vec::new(),
            remaining: h,
            states,
            budget,
            found: Vec::new(),
        }
    }

    /// Leave through `dart` and continue the walk.
    fn step(&mut self, dart: Port) -> Result<()> {
        let (c, p) = (dart.crossing, dart.port as usize);
        if self.used[c][p] >= self.cap[c][p] {
            return Ok(());
        }
        *self.states += 1;
        if *self.states > self.budget {
            return Err(Error::SearchBudgetExceeded(self.budget));
        }
        self.used[c][p] += 1;
        let arrive = self.d.partner_of(dart);
        let here = arrive.crossing;

        if here == self.start && arrive.port == (self.quadrant + 1) % 4 {
            self.visits.push(Visit { crossing: here, arrival: arrive.port, turn: true });
            self.close();
            self.visits.pop();
        }

        self.visits.push(Visit { crossing: here, arrival: arrive.port, turn: false });
        self.step(arrive.rotate(2))?;
        self.visits.pop();

        let q = (arrive.port + 3) % 4;
        let h = self.d.crossings()[here].height;
        if !self.d.is_positive_quadrant(here, q) && self.remaining > h {
            self.remaining -= h;
            self.visits.push(Visit { crossing: here, arrival: arrive.port, turn: true });
            self.step(Port::new(here, q))?;
            self.visits.pop();
            self.remaining += h;
        }

        self.used[c][p] -= 1;
        Ok(())
    }

    fn close(&mut self) {
        if let Some(mult) = immersed_disc_chain(self.d, &self.visits, &self.used) {
            let negatives = self.visits[..self.visits.len() - 1]
                .iter()
                .filter(|v| v.turn)
                .map(|v| (v.crossing, (v.arrival + 3) % 4))
                .collect();
            let disc = AdmissibleDisc {
                positive: self.start,
                positive_quadrant: self.quadrant,
                negatives,
                face_multiplicities: mult,
                boundary: self.visits.clone(),
            };
            debug_assert_eq!(disc.area(self.d), self.remaining);
            self.found.push(disc);
        }
    }
}

/// Face multiplicities of the closed boundary walk, or `None` when the walk
/// does not bound an immersed disc. `used[c][p]` counts traversals of the
/// dart leaving `c` through port `p`.
fn immersed_disc_chain(d: &LinkDiagram, visits: &[Visit], used: &[[u32; 4]]) -> Option<Vec<u32>> {
    let nf = d.faces().len();
    let piece = d.faces()[d.face_of(visits[0].crossing, 0)].piece;
    let mut n: Vec<Option<i64>> = vec![None; nf];
    for (i, f) in d.faces().iter().enumerate() {
        if f.piece != piece || f.outer {
            n[i] = Some(0);
        }
    }
    // Propagate winding numbers across edges from the unbounded face:
    // n(left of dart) - n(left of reverse dart) = net traversals.
    let mut changed = true;
    while changed {
        changed = false;
        for c in 0..d.crossing_count() {
            for p in 0..4u8 {
                let fwd = Port::new(c, p);
                let rev = d.partner_of(fwd);
                let (lf, rf) = (d.face_of(c, p), d.face_of(rev.crossing, rev.port));
                let jump = used[c][p as usize] as i64 - used[rev.crossing][rev.port as usize] as i64;
                match (n[lf], n[rf]) {
                    (Some(x), None) => {
                        n[rf] = Some(x - jump);
                        changed = true;
                    }
                    (None, Some(y)) => {
                        n[lf] = Some(y + jump);
                        changed = true;
                    }
                    (Some(x), Some(y)) if x - y != jump => return None,
                    _ => {}
                }
            }
        }
    }
    let n: Vec<i64> = n.into_iter().map(|x| x.unwrap_or(0)).collect();
    if n.iter().any(|&x| x < 0) {
        return None;
    }

    let mut chi: i64 = 0;
    let mut visits_at = vec![0i64; d.crossing_count()];
    let mut sheets = vec![[0i64; 4]; d.crossing_count()];
    for v in visits {
        visits_at[v.crossing] += 1;
        for q in v.covered() {
            sheets[v.crossing][q as usize] += 1;
        }
    }
    for c in 0..d.crossing_count() {
        let m0 = n[d.face_of(c, 0)] - sheets[c][0];
        if m0 < 0 {
            return None;
        }
        for k in 1..4u8 {
            if n[d.face_of(c, k)] - sheets[c][k as usize] != m0 {
                return None;
            }
        }
        chi += visits_at[c] + m0;
    }
    for c in 0..d.crossing_count() {
        for p in 0..4u8 {
            let fwd = Port::new(c, p);
            if !d.is_exit(fwd) {
                continue;
            }
            let rev = d.partner_of(fwd);
            let t = used[c][p as usize] as i64 + used[rev.crossing][rev.port as usize] as i64;
            let sides = n[d.face_of(c, p)] + n[d.face_of(rev.crossing, rev.port)] + t;
            if sides % 2 != 0 {
                return None;
            }
            chi -= sides / 2;
        }
    }
    chi += n.iter().sum::<i64>();
    (chi == 1).then(|| n.into_iter().map(|x| x as u32).collect())
}
