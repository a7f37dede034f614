//! Net isomorphism: equality up to renaming of cells.
//!
//! Cells are numbered in the order a traversal from the boundary discovers
//! them. Whenever several undiscovered cells look alike from the current
//! port, every ordering of them is tried; the least relabelled net is the
//! canonical form. The set of labellings explored only depends on the
//! structure, so isomorphic nets get equal canonical forms.

use std::collections::{BTreeMap, BTreeSet};

use super::{CellId, Loc, Net, PortRef};

type Adjacency = BTreeMap<PortRef, Vec<(PortRef, bool)>>;

struct Search<'a> {
    net: &'a Net,
    adj: Adjacency,
    best: Option<Net>,
}

#[derive(Clone)]
struct State {
    order: Vec<CellId>,
    assigned: BTreeMap<CellId, CellId>,
    scan: usize,
}

fn port_list(net: &Net, loc: Loc) -> Vec<PortRef> {
    let n = net.formula_at(loc).map_or(0, |f| f.leaf_count());
    (0..n).map(|index| PortRef { loc, index }).collect()
}

impl<'a> Search<'a> {
    fn scan_ports(&self, st: &State) -> Vec<PortRef> {
        let mut ports = port_list(self.net, Loc::Dom);
        ports.extend(port_list(self.net, Loc::Cod));
        for &c in &st.order {
            ports.extend(port_list(self.net, Loc::CellDom(c)));
            ports.extend(port_list(self.net, Loc::CellCod(c)));
        }
        ports
    }

    /// How a port looks before its cell is numbered.
    fn local_key(&self, p: PortRef, outgoing: bool) -> (String, u8, usize, bool) {
        let (c, side) = match p.loc {
            Loc::CellDom(c) => (c, 0),
            Loc::CellCod(c) => (c, 1),
            _ => unreachable!(),
        };
        (self.net.cells[&c].op.clone(), side, p.index, outgoing)
    }

    fn run(&mut self, st: State) {
        let mut ports = self.scan_ports(&st);
        let mut st = st;
        while st.scan < ports.len() || st.order.len() < self.net.cells.len() {
            if st.scan >= ports.len() {
                // Disconnected remainder: branch on the cells of least op.
                let rest: Vec<CellId> = self
                    .net
                    .cells
                    .keys()
                    .copied()
                    .filter(|c| !st.assigned.contains_key(c))
                    .collect();
                let min_op = rest.iter().map(|c| &self.net.cells[c].op).min().unwrap().clone();
                for c in rest.into_iter().filter(|c| self.net.cells[c].op == min_op) {
                    let mut next = st.clone();
                    assign(&mut next, c);
                    self.run(next);
                }
                return;
            }
            let p = ports[st.scan];
            st.scan += 1;
            let Some(neigh) = self.adj.get(&p) else { continue };
            // Undiscovered neighbour cells, keyed by how they are reached.
            let mut fresh: BTreeMap<(String, u8, usize, bool), BTreeSet<CellId>> = BTreeMap::new();
            let mut seen = BTreeSet::new();
            for &(q, outgoing) in neigh {
                if let Some(c) = q.loc.cell() {
                    if !st.assigned.contains_key(&c) {
                        fresh.entry(self.local_key(q, outgoing)).or_default().insert(c);
                    }
                }
            }
            if fresh.is_empty() {
                continue;
            }
            // Cells reachable under several keys are numbered at their least key.
            let mut groups: Vec<Vec<CellId>> = Vec::new();
            for cells in fresh.values() {
                let g: Vec<CellId> = cells.iter().copied().filter(|c| seen.insert(*c)).collect();
                if !g.is_empty() {
                    groups.push(g);
                }
            }
            if groups.iter().all(|g| g.len() == 1) {
                for g in groups {
                    assign(&mut st, g[0]);
                }
                ports = self.scan_ports(&st);
                continue;
            }
            for perm in group_permutations(&groups) {
                let mut next = st.clone();
                for c in perm {
                    assign(&mut next, c);
                }
                self.run(next);
            }
            return;
        }
        let map: BTreeMap<CellId, CellId> = st.assigned.clone();
        let candidate = self.net.rename_cells(&map);
        if self.best.as_ref().map_or(true, |b| candidate < *b) {
            self.best = Some(candidate);
        }
    }
}

fn assign(st: &mut State, c: CellId) {
    let id = st.order.len() as CellId;
    st.order.push(c);
    st.assigned.insert(c, id);
}

fn permutations(items: &[CellId]) -> Vec<Vec<CellId>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

fn group_permutations(groups: &[Vec<CellId>]) -> Vec<Vec<CellId>> {
    let mut acc: Vec<Vec<CellId>> = vec![Vec::new()];
    for g in groups {
        let perms = permutations(g);
        let mut next = Vec::with_capacity(acc.len() * perms.len());
        for a in &acc {
            for p in &perms {
                let mut v = a.clone();
                v.extend_from_slice(p);
                next.push(v);
            }
        }
        acc = next;
    }
    acc
}

/// The canonical representative of a net's isomorphism class.
pub fn canonical_form(net: &Net) -> Net {
    let mut adj: Adjacency = BTreeMap::new();
    for &(s, t) in &net.wires {
        adj.entry(s).or_default().push((t, true));
        adj.entry(t).or_default().push((s, false));
    }
    let mut search = Search {
        net,
        adj,
        best: None,
    };
    search.run(State {
        order: Vec::new(),
        assigned: BTreeMap::new(),
        scan: 0,
    });
    search.best.expect("search always completes a labelling")
}

/// Equality up to the choice of cells.
pub fn isomorphic(a: &Net, b: &Net) -> bool {
    a.dom == b.dom
        && a.cod == b.cod
        && a.cells.len() == b.cells.len()
        && a.wires.len() == b.wires.len()
        && a.op_counts() == b.op_counts()
        && canonical_form(a) == canonical_form(b)
}
