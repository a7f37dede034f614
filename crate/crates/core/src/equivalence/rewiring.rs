//! Rewiring: moving the target of one unit-sourced wire while staying
//! correct. Classes are explored by breadth-first search over canonical
//! forms; the state space is finite since sort wires never move.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::formula::Polarity;
use crate::net::{canonical_form, Net, PortRef, WiringMode};

/// Every correct net obtained by retargeting exactly one unit-sourced wire.
pub fn rewiring_moves(n: &Net, mode: &WiringMode) -> Vec<Net> {
    let info = n.port_map();
    let targets: Vec<PortRef> = info
        .iter()
        .filter(|(_, i)| i.polarity == Polarity::Positive)
        .map(|(p, _)| *p)
        .collect();
    let mut out = Vec::new();
    for &(s, t) in &n.wires {
        if info.get(&s).map_or(true, |i| i.sort.is_some()) {
            continue;
        }
        for &p in &targets {
            if p == t || n.wires.contains(&(s, p)) {
                continue;
            }
            let mut m = n.clone();
            m.wires.remove(&(s, t));
            m.wires.insert((s, p));
            if m.is_correct(mode) {
                out.push(m);
            }
        }
    }
    out
}

/// The canonical forms of every net in `n`'s rewiring class.
pub fn rewiring_class(n: &Net, mode: &WiringMode) -> BTreeSet<Net> {
    let start = canonical_form(n);
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        for m in rewiring_moves(&cur, mode) {
            let key = canonical_form(&m);
            if seen.insert(key.clone()) {
                queue.push_back(key);
            }
        }
    }
    seen
}

/// The least canonical form in the rewiring class.
pub fn rewiring_canonical(n: &Net, mode: &WiringMode) -> Net {
    rewiring_class(n, mode).into_iter().next().expect("class contains n")
}

pub fn rewiring_equivalent(f: &Net, g: &Net) -> Result<bool> {
    rewiring_equivalent_in(f, g, &WiringMode::strict())
}

/// Bidirectional search from both nets.
pub fn rewiring_equivalent_in(f: &Net, g: &Net, mode: &WiringMode) -> Result<bool> {
    if f.dom != g.dom || f.cod != g.cod {
        return Err(Error::BoundaryMismatch(format!(
            "{} -> {} versus {} -> {}",
            f.dom, f.cod, g.dom, g.cod
        )));
    }
    if f.op_counts() != g.op_counts() {
        return Ok(false);
    }
    let starts = [canonical_form(f), canonical_form(g)];
    if starts[0] == starts[1] {
        return Ok(true);
    }
    let mut seen = [BTreeSet::from([starts[0].clone()]), BTreeSet::from([starts[1].clone()])];
    let mut queues = [VecDeque::from([starts[0].clone()]), VecDeque::from([starts[1].clone()])];
    loop {
        for side in 0..2 {
            let Some(cur) = queues[side].pop_front() else {
                return Ok(false);
            };
            for m in rewiring_moves(&cur, mode) {
                let key = canonical_form(&m);
                if seen[1 - side].contains(&key) {
                    return Ok(true);
                }
                if seen[side].insert(key.clone()) {
                    queues[side].push_back(key);
                }
            }
        }
    }
}
