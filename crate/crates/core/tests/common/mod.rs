//! Oracles and fixture helpers shared by the integration tests. Nothing here
//! calls the library's own enumeration, evaluation or reduction routines.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use lch_core::algebra::{Action, FreeDga, GenId};
use lch_core::diagram::{parse_diagram, LinkDiagram, Port, Visit};
use lch_core::io::dga_from_json;
use lch_core::linearized::{F2Complex, Ranks};

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture(rel: &str) -> PathBuf {
    fixtures_dir().join(rel)
}

pub fn read(rel: &str) -> String {
    std::fs::read_to_string(fixture(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

pub fn dga(rel: &str) -> FreeDga {
    dga_from_json(&read(rel)).unwrap()
}

fn walk(dir: &Path, out: &mut Vec<PathBuf>) {
    let mut entries: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    entries.sort();
    for p in entries {
        if p.is_dir() {
            walk(&p, out);
        } else if p.extension().is_some_and(|e| e == "json") {
            out.push(p);
        }
    }
}

/// Every JSON file under fixtures/, sorted by path.
pub fn all_json() -> Vec<PathBuf> {
    let mut out = Vec::new();
    walk(&fixtures_dir(), &mut out);
    out
}

fn json_value(p: &Path) -> Option<serde_json::Value> {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).ok()
}

/// Diagram files, recognized by their `crossings` key.
pub fn diagram_fixtures() -> Vec<(PathBuf, LinkDiagram)> {
    all_json()
        .into_iter()
        .filter(|p| json_value(p).is_some_and(|v| v.get("crossings").is_some()))
        .map(|p| {
            let d = parse_diagram(&std::fs::read_to_string(&p).unwrap()).unwrap();
            (p, d)
        })
        .collect()
}

/// DGA files, recognized by their `generators` key.
pub fn dga_fixtures() -> Vec<(PathBuf, FreeDga)> {
    all_json()
        .into_iter()
        .filter(|p| json_value(p).is_some_and(|v| v.get("generators").is_some()))
        .map(|p| {
            let d = dga_from_json(&std::fs::read_to_string(&p).unwrap()).unwrap();
            (p, d)
        })
        .collect()
}

pub fn name(p: &Path) -> String {
    p.strip_prefix(fixtures_dir()).unwrap_or(p).display().to_string()
}

// ------------------------------------------------------------ augmentations

fn eval(dga: &FreeDga, values: &[bool], g: GenId) -> bool {
    dga.diff(g)
        .words()
        .filter(|w| w.factors().iter().all(|f| values[f.0]))
        .count()
        % 2
        == 1
}

/// All augmentations by exhaustive search over the degree-0 generators, as
/// value vectors in lexicographic order of the chosen subset mask.
pub fn brute_force_augmentations(dga: &FreeDga) -> Vec<Vec<bool>> {
    let even: Vec<usize> = dga.ids().filter(|&g| dga.generator(g).degree == 0).map(|g| g.0).collect();
    assert!(even.len() <= 20, "too many degree-0 generators for the oracle");
    let mut out = Vec::new();
    for mask in 0u32..1 << even.len() {
        let mut values = vec![false; dga.len()];
        for (bit, &g) in even.iter().enumerate() {
            values[g] = mask >> bit & 1 == 1;
        }
        if dga.ids().all(|g| !eval(dga, &values, g)) {
            out.push(values);
        }
    }
    out
}

pub fn satisfies(dga: &FreeDga, values: &[bool]) -> bool {
    dga.ids().all(|g| !eval(dga, values, g))
}

// ------------------------------------------------------------------- ranks

/// Rank over F2 of a dense bit matrix given by rows.
pub fn dense_rank(mut rows: Vec<Vec<bool>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c]) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[c] {
                row.iter_mut().zip(&pivot).for_each(|(x, &y)| *x ^= y);
            }
        }
        rank += 1;
    }
    rank
}

/// Homology by dense elimination of the differential restricted to each degree.
pub fn dense_homology(c: &F2Complex) -> Ranks {
    let n = c.len();
    let rank_from = |deg: u8| {
        let cols: Vec<usize> = (0..n).filter(|&j| c.gens()[j].1 == deg).collect();
        let rows = (0..n).map(|i| cols.iter().map(|&j| c.column(j).contains(&i)).collect()).collect();
        dense_rank(rows)
    };
    let (r0, r1) = (rank_from(0), rank_from(1));
    let (n0, n1) = (c.count_in_degree(0), c.count_in_degree(1));
    Ranks { h0: n0 - r0 - r1, h1: n1 - r1 - r0 }
}

// ------------------------------------------------------------------- discs

/// A disc identified by its positive corner, boundary visits and face
/// multiplicities.
pub type DiscKey = (usize, u8, Vec<Visit>, Vec<u32>);

#[derive(Clone, Copy)]
struct Edge {
    c: usize,
    p: u8,
    c2: usize,
    p2: u8,
}

/// Discs found by gluing copies of faces.
///
/// For every positive corner and every vector of face multiplicities within
/// the area bound, each diagram edge gets a partial matching between the
/// copies of the faces on its two sides. A gluing is kept when the star of
/// every crossing is a union of full 4-cycles, straight boundary points and
/// convex corners (one positive corner in total), and the glued surface is
/// connected with Euler characteristic 1.
pub fn gluing_discs(d: &LinkDiagram) -> BTreeSet<DiscKey> {
    let n = d.crossing_count();
    let mut edges = Vec::new();
    for c in 0..n {
        for p in 0..4u8 {
            let q = d.partner_of(Port::new(c, p));
            if (c, p) < (q.crossing, q.port) {
                assert_eq!(d.face_of(c, p), d.face_of(q.crossing, (q.port + 3) % 4));
                assert_eq!(d.face_of(c, (p + 3) % 4), d.face_of(q.crossing, q.port));
                edges.push(Edge { c, p, c2: q.crossing, p2: q.port });
            }
        }
    }
    let bounded: Vec<usize> = (0..d.faces().len()).filter(|&f| !d.faces()[f].outer).collect();
    let mut out = BTreeSet::new();
    for a in 0..n {
        for k in 0..4u8 {
            if !d.is_positive_quadrant(a, k) || d.faces()[d.face_of(a, k)].outer {
                continue;
            }
            let h = d.crossings()[a].height;
            let mut m = vec![0u32; d.faces().len()];
            multiplicities(d, &bounded, 0, h, &mut m, &mut |m| {
                if m[d.face_of(a, k)] > 0 {
                    Gluer::new(d, &edges, m, a, k).search(&mut out);
                }
            });
        }
    }
    out
}

fn multiplicities(d: &LinkDiagram, faces: &[usize], i: usize, left: Action, m: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
    if i == faces.len() {
        f(m);
        return;
    }
    let area = d.faces()[faces[i]].area;
    let mut used = Action::from(0);
    let mut k = 0;
    while used <= left {
        m[faces[i]] = k;
        multiplicities(d, faces, i + 1, left - used, m, f);
        k += 1;
        used += area;
    }
    m[faces[i]] = 0;
}

/// Boundary path through a crossing: covers quadrants `q .. q + len`.
#[derive(Clone, Copy)]
struct Run {
    q: u8,
    copy: usize,
    len: u8,
}

struct Gluer<'a> {
    d: &'a LinkDiagram,
    edges: &'a [Edge],
    m: &'a [u32],
    a: usize,
    k: u8,
    /// Edge order, and for each crossing the number of its edges still open.
    order: Vec<usize>,
    open: Vec<usize>,
    matching: Vec<Option<Vec<Option<usize>>>>,
}

impl<'a> Gluer<'a> {
    fn new(d: &'a LinkDiagram, edges: &'a [Edge], m: &'a [u32], a: usize, k: u8) -> Self {
        let n = d.crossing_count();
        let mut order = Vec::new();
        let mut seen_c = vec![false; n];
        let mut queue = std::collections::VecDeque::from([a]);
        seen_c[a] = true;
        let mut roots = 0..n;
        loop {
            let c = match queue.pop_front() {
                Some(c) => c,
                None => match roots.find(|&c| !seen_c[c]) {
                    Some(c) => {
                        seen_c[c] = true;
                        c
                    }
                    None => break,
                },
            };
            for (i, e) in edges.iter().enumerate() {
                if (e.c == c || e.c2 == c) && !order.contains(&i) {
                    order.push(i);
                    let other = if e.c == c { e.c2 } else { e.c };
                    if !seen_c[other] {
                        seen_c[other] = true;
                        queue.push_back(other);
                    }
                }
            }
        }
        let mut open = vec![0; n];
        for e in edges {
            open[e.c] += 1;
            if e.c2 != e.c {
                open[e.c2] += 1;
            }
        }
        Gluer { d, edges, m, a, k, order, open, matching: vec![None; edges.len()] }
    }

    fn copies(&self, c: usize, q: u8) -> usize {
        let f = self.d.face_of(c, q % 4);
        if self.d.faces()[f].outer {
            0
        } else {
            self.m[f] as usize
        }
    }

    /// Map from copies of quadrant `p` to copies of quadrant `p - 1` across port `p`.
    fn port_link(&self, c: usize, p: u8) -> Vec<Option<usize>> {
        for (i, e) in self.edges.iter().enumerate() {
            if e.c == c && e.p == p {
                return self.matching[i].clone().expect("edge assigned");
            }
            if e.c2 == c && e.p2 == p {
                let m = self.matching[i].as_ref().expect("edge assigned");
                let mut inv = vec![None; self.copies(c, p)];
                for (x, y) in m.iter().enumerate() {
                    if let Some(y) = y {
                        inv[*y] = Some(x);
                    }
                }
                return inv;
            }
        }
        unreachable!("every port lies on an edge")
    }

    /// Paths and cycle count of the star at `c`, or `None` if it is not
    /// locally an immersion with the allowed corners.
    fn star(&self, c: usize) -> Option<(Vec<Run>, usize, usize)> {
        let back: Vec<Vec<Option<usize>>> = (0..4).map(|q| self.port_link(c, q)).collect();
        let mut fwd: Vec<Vec<Option<usize>>> = (0..4u8).map(|q| vec![None; self.copies(c, q)]).collect();
        for q in 0..4u8 {
            for (i, j) in back[q as usize].iter().enumerate() {
                if let Some(j) = j {
                    fwd[((q + 3) % 4) as usize][*j] = Some(i);
                }
            }
        }
        let mut seen: Vec<Vec<bool>> = (0..4u8).map(|q| vec![false; self.copies(c, q)]).collect();
        let (mut paths, mut cycles, mut positive) = (Vec::new(), 0, 0);
        for q in 0..4u8 {
            for (i, link) in back[q as usize].iter().enumerate() {
                if link.is_some() {
                    continue;
                }
                let (mut cq, mut ci, mut len) = (q, i, 1u8);
                seen[cq as usize][ci] = true;
                while let Some(j) = fwd[cq as usize][ci] {
                    cq = (cq + 1) % 4;
                    ci = j;
                    seen[cq as usize][ci] = true;
                    len += 1;
                    if len > 2 {
                        return None;
                    }
                }
                if len == 1 && self.d.is_positive_quadrant(c, q) {
                    if (c, q) != (self.a, self.k) {
                        return None;
                    }
                    positive += 1;
                }
                paths.push(Run { q, copy: i, len });
            }
        }
        for q in 0..4u8 {
            for i in 0..self.copies(c, q) {
                if seen[q as usize][i] {
                    continue;
                }
                let (mut cq, mut ci) = (q, i);
                for _ in 0..4 {
                    seen[cq as usize][ci] = true;
                    ci = fwd[cq as usize][ci]?;
                    cq = (cq + 1) % 4;
                }
                if (cq, ci) != (q, i) {
                    return None;
                }
                cycles += 1;
            }
        }
        Some((paths, cycles, positive))
    }

    fn search(&mut self, out: &mut BTreeSet<DiscKey>) {
        self.assign(0, out);
    }

    fn assign(&mut self, i: usize, out: &mut BTreeSet<DiscKey>) {
        if i == self.order.len() {
            self.finish(out);
            return;
        }
        let e = self.edges[self.order[i]];
        let (ma, mb) = (self.copies(e.c, e.p), self.copies(e.c, e.p + 3));
        let mut all = Vec::new();
        matchings(ma, mb, &mut vec![None; ma], &mut vec![false; mb], 0, &mut all);
        for m in all {
            self.matching[self.order[i]] = Some(m);
            let ends: Vec<usize> = if e.c == e.c2 { vec![e.c] } else { vec![e.c, e.c2] };
            for &c in &ends {
                self.open[c] -= 1;
            }
            let ok = ends.iter().all(|&c| self.open[c] > 0 || self.star(c).is_some());
            if ok {
                self.assign(i + 1, out);
            }
            for &c in &ends {
                self.open[c] += 1;
            }
        }
        self.matching[self.order[i]] = None;
    }

    fn finish(&self, out: &mut BTreeSet<DiscKey>) {
        let d = self.d;
        let n = d.crossing_count();
        let stars: Vec<_> = (0..n).map(|c| self.star(c).expect("checked during assignment")).collect();
        if stars.iter().map(|s| s.2).sum::<usize>() != 1 {
            return;
        }
        let faces = d.faces().len();
        let offset: Vec<usize> = (0..faces).scan(0, |acc, f| {
            let o = *acc;
            *acc += self.m[f] as usize;
            Some(o)
        }).collect();
        let total: usize = self.m.iter().map(|&x| x as usize).sum();
        let mut parent: Vec<usize> = (0..total).collect();
        fn root(p: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut edges_total = 0usize;
        for (i, e) in self.edges.iter().enumerate() {
            let (fa, fb) = (d.face_of(e.c, e.p), d.face_of(e.c, (e.p + 3) % 4));
            let (ma, mb) = (self.copies(e.c, e.p), self.copies(e.c, e.p + 3));
            let m = self.matching[i].as_ref().unwrap();
            let glued = m.iter().flatten().count();
            edges_total += ma + mb - glued;
            for (x, y) in m.iter().enumerate() {
                if let Some(y) = y {
                    let (rx, ry) = (root(&mut parent, offset[fa] + x), root(&mut parent, offset[fb] + y));
                    parent[rx] = ry;
                }
            }
        }
        let r0 = root(&mut parent, 0);
        if (0..total).any(|x| root(&mut parent, x) != r0) {
            return;
        }
        let vertices: usize = stars.iter().map(|s| s.0.len() + s.1).sum();
        if vertices as i64 - edges_total as i64 + total as i64 != 1 {
            return;
        }

        // Walk the boundary counterclockwise from the positive corner.
        let arriving = |c: usize, port: u8, copy: usize| -> Run {
            *stars[c]
                .0
                .iter()
                .find(|p| (p.q + p.len) % 4 == port && {
                    let last = (p.q + p.len - 1) % 4;
                    self.last_copy(c, p) == copy && last == (port + 3) % 4
                })
                .expect("boundary arrives at a path end")
        };
        let start = stars[self.a].0.iter().find(|p| p.len == 1 && p.q == self.k).copied().unwrap();
        let (mut c, mut exit, mut copy) = (self.a, start.q, start.copy);
        let mut visits = Vec::new();
        let mut negatives = Action::from(0);
        loop {
            let to = d.partner_of(Port::new(c, exit));
            let path = arriving(to.crossing, to.port, copy);
            visits.push(Visit { crossing: to.crossing, arrival: to.port, turn: path.len == 1 });
            if path.len == 1 && (to.crossing, path.q) == (self.a, self.k) {
                break;
            }
            if path.len == 1 {
                negatives += d.crossings()[to.crossing].height;
            }
            c = to.crossing;
            exit = path.q;
            copy = path.copy;
            assert!(visits.len() <= 4 * total * n + 4, "boundary walk does not close");
        }
        let area = self.m.iter().zip(d.faces()).fold(Action::from(0), |acc, (&k, f)| acc + f.area * Action::from(k as i64));
        assert_eq!(area, d.crossings()[self.a].height - negatives, "area identity");
        out.insert((self.a, self.k, visits, self.m.to_vec()));
    }

    /// Copy index at the arrival end of a path.
    fn last_copy(&self, c: usize, p: &Run) -> usize {
        let mut copy = p.copy;
        let mut q = p.q;
        for _ in 1..p.len {
            let link = self.port_link(c, (q + 1) % 4);
            copy = link.iter().position(|&x| x == Some(copy)).expect("path is linked");
            q = (q + 1) % 4;
        }
        copy
    }
}

fn matchings(ma: usize, mb: usize, cur: &mut Vec<Option<usize>>, used: &mut Vec<bool>, i: usize, out: &mut Vec<Vec<Option<usize>>>) {
    if i == ma {
        out.push(cur.clone());
        return;
    }
    cur[i] = None;
    matchings(ma, mb, cur, used, i + 1, out);
    for j in 0..mb {
        if !used[j] {
            used[j] = true;
            cur[i] = Some(j);
            matchings(ma, mb, cur, used, i + 1, out);
            used[j] = false;
        }
    }
    cur[i] = None;
}
