//! Surgery on a crossing: replace it by its oriented smoothing.
//!
//! The incoming end of each strand is joined to the outgoing end of the
//! other strand. At a degree-0 crossing these arcs hug the two negative
//! quadrants, so a disc with a negative corner there becomes a disc with a
//! smooth boundary arc.

use std::collections::{BTreeMap, BTreeSet};

use super::{CrossingRecord, DiagramFile, EdgeRecord, LinkDiagram, Port};
use crate::algebra::format_action;
use crate::error::{Error, Result};

pub fn resolve_crossing(d: &LinkDiagram, id: &str) -> Result<LinkDiagram> {
    let x = d.crossing_index(id)?;
    if !d.is_contractible(x) {
        return Err(Error::NotContractible(id.to_string()));
    }
    // Entry port at x -> exit port at x along the smoothing.
    let entry = |parity: u8| if d.is_exit(Port::new(x, parity)) { parity + 2 } else { parity };
    let (s_in, t_in) = (entry(0), entry(1));
    let through = |p: u8| -> u8 {
        if p == s_in {
            (t_in + 2) % 4
        } else {
            (s_in + 2) % 4
        }
    };

    // New edges: (from, to, old components swallowed).
    let mut edges: Vec<(Port, Port, BTreeSet<usize>)> = Vec::new();
    let mut entered = BTreeSet::new();
    for c in 0..d.crossing_count() {
        if c == x {
            continue;
        }
        for p in 0..4u8 {
            let start = Port::new(c, p);
            if !d.is_exit(start) {
                continue;
            }
            let mut comps = BTreeSet::from([d.port_component(start)]);
            let mut q = d.partner_of(start);
            while q.crossing == x {
                entered.insert(q.port);
                let out = Port::new(x, through(q.port));
                comps.insert(d.port_component(out));
                q = d.partner_of(out);
            }
            edges.push((start, q, comps));
        }
    }
    // Arcs through x that never reach another crossing close up into loops.
    let mut loop_comps: Vec<BTreeSet<usize>> = Vec::new();
    for p in [s_in, t_in] {
        if entered.contains(&p) {
            continue;
        }
        let mut comps = BTreeSet::new();
        let mut q = Port::new(x, p);
        loop {
            entered.insert(q.port);
            let out = Port::new(x, through(q.port));
            comps.insert(d.port_component(out));
            q = d.partner_of(out);
            debug_assert_eq!(q.crossing, x);
            if q.port == p {
                break;
            }
        }
        loop_comps.push(comps);
    }

    // Cycles of the new graph.
    let next_edge: BTreeMap<Port, usize> = edges.iter().enumerate().map(|(i, e)| (e.0, i)).collect();
    let mut edge_cycle = vec![usize::MAX; edges.len()];
    let mut cycles: Vec<BTreeSet<usize>> = Vec::new();
    for i in 0..edges.len() {
        if edge_cycle[i] != usize::MAX {
            continue;
        }
        let id = cycles.len();
        let mut comps = BTreeSet::new();
        let mut j = i;
        while edge_cycle[j] == usize::MAX {
            edge_cycle[j] = id;
            comps.extend(edges[j].2.iter().copied());
            j = next_edge[&edges[j].1.rotate(2)];
        }
        cycles.push(comps);
    }
    let loop_base = cycles.len();
    cycles.extend(loop_comps);

    // Names: merged cycles join their old names, split ones get a suffix.
    let old = d.components();
    let mut uses: BTreeMap<usize, usize> = BTreeMap::new();
    for cyc in &cycles {
        if cyc.len() == 1 {
            *uses.entry(*cyc.iter().next().unwrap()).or_default() += 1;
        }
    }
    let mut order: Vec<usize> = (0..cycles.len()).collect();
    order.sort_by_key(|&i| (*cycles[i].iter().next().unwrap(), i));
    let mut names = vec![String::new(); cycles.len()];
    let mut split_counter: BTreeMap<usize, usize> = BTreeMap::new();
    for &i in &order {
        let cyc = &cycles[i];
        names[i] = if cyc.len() > 1 {
            cyc.iter().map(|&k| old[k].as_str()).collect::<Vec<_>>().join("+")
        } else {
            let k = *cyc.iter().next().unwrap();
            if uses[&k] > 1 {
                let n = split_counter.entry(k).or_default();
                *n += 1;
                format!("{}.{}", old[k], n)
            } else {
                old[k].clone()
            }
        };
    }

    let mut components: Vec<String> = order.iter().map(|&i| names[i].clone()).collect();
    // Untouched crossingless loops keep their place after the rest.
    let mut loops: Vec<String> = (loop_base..cycles.len()).map(|i| names[i].clone()).collect();
    for &k in d.loops() {
        components.push(old[k].clone());
        loops.push(old[k].clone());
    }

    let file = d.to_file();
    let crossings: Vec<CrossingRecord> = file.crossings.into_iter().filter(|c| c.id != id).collect();
    let cid = |c: usize| d.crossings()[c].id.clone();
    let edges = edges
        .iter()
        .enumerate()
        .map(|(i, (a, b, _))| EdgeRecord {
            from: (cid(a.crossing), a.port),
            to: (cid(b.crossing), b.port),
            component: names[edge_cycle[i]].clone(),
        })
        .collect();
    let contractible = file.contractible.into_iter().filter(|c| c != id).collect();
    let comment = Some(format!(
        "{}smoothing of crossing `{id}` (height {})",
        file.comment.map(|c| format!("{c}; ")).unwrap_or_default(),
        format_action(&d.crossings()[x].height)
    ));
    LinkDiagram::from_file(DiagramFile { comment, components, crossings, edges, loops, contractible })
}
