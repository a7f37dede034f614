//! Equation occurrences by subnet matching, and their replacement.
//!
//! A pattern (one side of an equation) matches a host when its cells map
//! injectively onto host cells of the same operations, its internal wires
//! are exactly the host wires between those cells, and each boundary leaf
//! of the pattern binds the host ports outside the match it stands for.
//! Patterns with wires running straight from boundary to boundary are not
//! matched.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::net::{CellId, Loc, Net, PortRef, WiringMode};
use crate::signature::Theory;

use super::collapse::assign_units;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    LeftToRight,
    RightToLeft,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationOccurrence {
    pub equation: usize,
    pub direction: Direction,
    /// Pattern cell to host cell.
    pub cells: BTreeMap<CellId, CellId>,
    /// Host ports standing for each boundary leaf of the pattern.
    pub binding: BTreeMap<PortRef, BTreeSet<PortRef>>,
    /// Unit wires entering the match from outside that no leaf accounts for.
    pub strays: BTreeSet<PortRef>,
}

fn sides(t: &Theory, eq: usize, d: Direction) -> (&Net, &Net) {
    let e = &t.equations[eq];
    match d {
        Direction::LeftToRight => (&e.lhs, &e.rhs),
        Direction::RightToLeft => (&e.rhs, &e.lhs),
    }
}

fn map_port(p: PortRef, map: &BTreeMap<CellId, CellId>) -> PortRef {
    match p.loc {
        Loc::CellDom(c) => PortRef::cell_dom(map[&c], p.index),
        Loc::CellCod(c) => PortRef::cell_cod(map[&c], p.index),
        _ => p,
    }
}

fn is_unit(n: &Net, p: PortRef) -> bool {
    n.port_info(p).is_ok_and(|i| i.sort.is_none())
}

/// Checks a complete cell assignment and computes the leaf bindings.
fn bind(host: &Net, pat: &Net, map: &BTreeMap<CellId, CellId>) -> Option<(BTreeMap<PortRef, BTreeSet<PortRef>>, BTreeSet<PortRef>)> {
    let image: BTreeSet<CellId> = map.values().copied().collect();
    let inside = |p: PortRef| p.loc.cell().is_some_and(|c| image.contains(&c));
    let mut binding: BTreeMap<PortRef, BTreeSet<PortRef>> = BTreeMap::new();
    let mut fixed: BTreeSet<PortRef> = BTreeSet::new();
    let mut claimed: BTreeSet<(PortRef, PortRef)> = BTreeSet::new();
    let mut contribute = |leaf: PortRef, set: BTreeSet<PortRef>, exact: bool| -> bool {
        match binding.get_mut(&leaf) {
            Some(old) if exact && fixed.contains(&leaf) => *old == set,
            Some(old) => {
                old.extend(set);
                true
            }
            None => {
                if exact {
                    fixed.insert(leaf);
                }
                binding.insert(leaf, set);
                true
            }
        }
    };
    for &(a, b) in &pat.wires {
        match (a.loc.is_boundary(), b.loc.is_boundary()) {
            (false, false) => {
                let w = (map_port(a, map), map_port(b, map));
                if !host.wires.contains(&w) {
                    return None;
                }
                claimed.insert(w);
            }
            (true, false) => {
                let hb = map_port(b, map);
                let unit = is_unit(pat, a);
                let srcs: BTreeSet<PortRef> = host
                    .wires_into(hb)
                    .filter(|&s| !inside(s) && is_unit(host, s) == unit)
                    .collect();
                if !unit && srcs.is_empty() {
                    return None;
                }
                for &s in &srcs {
                    claimed.insert((s, hb));
                }
                if !contribute(a, srcs, !unit) {
                    return None;
                }
            }
            (false, true) => {
                let ha = map_port(a, map);
                let tgts: BTreeSet<PortRef> = host.wires_from(ha).filter(|&t| !inside(t)).collect();
                if tgts.is_empty() {
                    return None;
                }
                for &t in &tgts {
                    claimed.insert((ha, t));
                }
                if !contribute(b, tgts, false) {
                    return None;
                }
            }
            (true, true) => return None,
        }
    }
    let mut strays = BTreeSet::new();
    for &(s, t) in &host.wires {
        if !(inside(s) || inside(t)) || claimed.contains(&(s, t)) {
            continue;
        }
        if !inside(s) && is_unit(host, s) {
            strays.insert(s);
            continue;
        }
        return None;
    }
    Some((binding, strays))
}

fn search(
    host: &Net,
    pat: &Net,
    order: &[CellId],
    map: &mut BTreeMap<CellId, CellId>,
    used: &mut BTreeSet<CellId>,
    out: &mut Vec<(BTreeMap<CellId, CellId>, BTreeMap<PortRef, BTreeSet<PortRef>>, BTreeSet<PortRef>)>,
) {
    let Some((&pc, rest)) = order.split_first() else {
        if let Some((b, s)) = bind(host, pat, map) {
            out.push((map.clone(), b, s));
        }
        return;
    };
    let op = &pat.cells[&pc].op;
    for (&hc, cell) in &host.cells {
        if used.contains(&hc) || &cell.op != op {
            continue;
        }
        map.insert(pc, hc);
        // Internal wires among assigned cells must be present.
        let ok = pat.wires.iter().all(|&(a, b)| {
            let (Some(ca), Some(cb)) = (a.loc.cell(), b.loc.cell()) else { return true };
            match (map.get(&ca), map.get(&cb)) {
                (Some(_), Some(_)) => host.wires.contains(&(map_port(a, map), map_port(b, map))),
                _ => true,
            }
        });
        if ok {
            used.insert(hc);
            search(host, pat, rest, map, used, out);
            used.remove(&hc);
        }
        map.remove(&pc);
    }
}

/// Every occurrence of every equation side with at least one cell.
pub fn find_occurrences(host: &Net, t: &Theory) -> Vec<EquationOccurrence> {
    let mut out = Vec::new();
    for equation in 0..t.equations.len() {
        for direction in [Direction::LeftToRight, Direction::RightToLeft] {
            let (pat, _) = sides(t, equation, direction);
            if pat.cells.is_empty() {
                continue;
            }
            let order: Vec<CellId> = pat.cells.keys().copied().collect();
            let mut found = Vec::new();
            search(host, pat, &order, &mut BTreeMap::new(), &mut BTreeSet::new(), &mut found);
            for (cells, binding, strays) in found {
                out.push(EquationOccurrence {
                    equation,
                    direction,
                    cells,
                    binding,
                    strays,
                });
            }
        }
    }
    out
}

/// Replaces the matched side by the other one. Unit wires that lose their
/// target are moved to wherever keeps the net correct.
pub fn apply_equation(host: &Net, occ: &EquationOccurrence, t: &Theory, mode: &WiringMode) -> Result<Net> {
    let (pat, rep) = sides(t, occ.equation, occ.direction);
    let stale = || Error::StaleOccurrence(format!("equation {} no longer matches", t.equations[occ.equation].name));
    for (pc, hc) in &occ.cells {
        if host.cells.get(hc).map(|c| &c.op) != Some(&pat.cells[pc].op) {
            return Err(stale());
        }
    }
    match bind(host, pat, &occ.cells) {
        Some((b, s)) if b == occ.binding && s == occ.strays => {}
        _ => return Err(stale()),
    }
    let mut net = host.clone();
    for hc in occ.cells.values() {
        net.remove_cell(*hc);
    }
    let base = net.next_cell_id().max(host.next_cell_id());
    let fresh: BTreeMap<CellId, CellId> = rep.cells.keys().enumerate().map(|(i, &c)| (c, base + i as CellId)).collect();
    for (c, cell) in &rep.cells {
        net.cells.insert(fresh[c], cell.clone());
    }
    let empty = BTreeSet::new();
    let bound = |p: PortRef| -> Vec<PortRef> {
        if p.loc.is_boundary() {
            occ.binding.get(&p).unwrap_or(&empty).iter().copied().collect()
        } else {
            vec![map_port(p, &fresh)]
        }
    };
    for &(a, b) in &rep.wires {
        for s in bound(a) {
            for tg in bound(b) {
                net.wires.insert((s, tg));
            }
        }
    }
    // Unit sources left without a target, and stray unit wires.
    let mut loose: BTreeSet<PortRef> = occ.strays.clone();
    for (p, info) in net.ports() {
        if info.polarity == crate::formula::Polarity::Negative && info.sort.is_none() && net.wires_from(p).next().is_none() {
            loose.insert(p);
        }
    }
    if net.is_correct(mode) {
        return Ok(net);
    }
    let loose: Vec<PortRef> = loose.into_iter().collect();
    net.wires.retain(|(s, _)| !loose.contains(s));
    let targets: Vec<PortRef> = net
        .ports()
        .into_iter()
        .filter(|(_, i)| i.polarity == crate::formula::Polarity::Positive)
        .map(|(p, _)| p)
        .collect();
    assign_units(&net, &loose, &targets, mode)
        .ok_or_else(|| Error::IllFormedNet(format!("replacing by equation {} breaks correctness", t.equations[occ.equation].name)))
}
