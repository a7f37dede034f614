//! Exhaustive generation of correct nets, one per rewiring class.
//!
//! Sort wires are laid out first, by a search that always completes the
//! earliest-discovered open port: it is wired to a later open port or to
//! a port of a fresh cell. Every switching is tracked by its own
//! union-find so partial nets with a cycle are dropped early. Comonoid
//! fan-outs are not tracked (only one of their wires is live at a time).
//! Skeletons are deduplicated by canonical form; then unit wires are
//! assigned in every correct way and grouped into rewiring classes.
//!
//! Cells are only discovered through sort wires, so every cell of an
//! enumerated net is connected to the boundary by sort wires.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::formula::{ClassicalFormula, Formula, Polarity, Sort};
use crate::net::{canonical_form, CellId, Net, PortRef, WiringMode};
use crate::signature::Theory;

/// Cell budget: at most `max_counted` cells whose operation is in
/// `counted_ops` (all operations when `None`) and at most `max_total`
/// cells overall.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetBudget {
    pub max_counted: usize,
    pub counted_ops: Option<BTreeSet<String>>,
    pub max_total: usize,
}

impl NetBudget {
    pub fn cells(k: usize) -> Self {
        NetBudget {
            max_counted: k,
            counted_ops: None,
            max_total: k,
        }
    }

    fn counts(&self, op: &str) -> bool {
        self.counted_ops.as_ref().map_or(true, |s| s.contains(op))
    }
}

/// Above this many switchings per partial net the search gives up.
const MAX_SWITCHINGS: usize = 1 << 16;


#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Kind {
    /// Interned sort; `None` for the unit.
    sort: Option<u8>,
    negative: bool,
}

/// The classical tree of a formula (or cell view), in local vertex numbers.
#[derive(Clone, Debug, Default)]
struct Tree {
    size: u32,
    fixed: Vec<(u32, u32)>,
    pars: Vec<(u32, u32, u32)>,
    /// Vertex of each leaf, in leaf order.
    leaves: Vec<u32>,
}

impl Tree {
    fn new(cf: &ClassicalFormula) -> Self {
        fn go(t: &mut Tree, cf: &ClassicalFormula) -> u32 {
            match cf {
                ClassicalFormula::Tensor(a, b) | ClassicalFormula::Par(a, b) => {
                    let l = go(t, a);
                    let r = go(t, b);
                    let v = t.size;
                    t.size += 1;
                    if matches!(cf, ClassicalFormula::Tensor(..)) {
                        t.fixed.push((v, l));
                        t.fixed.push((v, r));
                    } else {
                        t.pars.push((v, l, r));
                    }
                    v
                }
                _ => {
                    let v = t.size;
                    t.size += 1;
                    t.leaves.push(v);
                    v
                }
            }
        }
        let mut t = Tree::default();
        go(&mut t, cf);
        t
    }
}

#[derive(Clone, Debug)]
struct OpShape {
    name: String,
    dom: Formula,
    cod: Formula,
    /// Kinds of the cell's ports, dom leaves first.
    ports: Vec<Kind>,
    tree: Tree,
    counted: bool,
}

impl OpShape {
    fn port_ref(&self, c: CellId, i: usize) -> PortRef {
        let nd = self.dom.leaf_count();
        if i < nd {
            PortRef::cell_dom(c, i)
        } else {
            PortRef::cell_cod(c, i - nd)
        }
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let up = parent[parent[x as usize] as usize];
        parent[x as usize] = up;
        x = up;
    }
    x
}

#[derive(Clone, Debug)]
struct Port {
    at: PortRef,
    kind: Kind,
    vertex: u32,
}

#[derive(Clone, Debug)]
struct State {
    /// Ports in discovery order.
    ports: Vec<Port>,
    closed: Vec<bool>,
    /// Operation index of each cell.
    cells: Vec<usize>,
    /// (source, target) as indices into `ports`.
    wires: Vec<(usize, usize)>,
    counted: usize,
    /// One union-find per switching, `vertices` entries each.
    vertices: u32,
    forests: Vec<u32>,
    /// Open strict sources minus open strict targets, per sort.
    open: Vec<i64>,
}

impl State {
    fn switchings(&self) -> usize {
        if self.vertices == 0 {
            1
        } else {
            self.forests.len() / self.vertices as usize
        }
    }

    fn add_tree(&mut self, tree: &Tree) -> Result<u32> {
        let base = self.vertices;
        let nv = (base + tree.size) as usize;
        let count = self.switchings() << tree.pars.len();
        if count > MAX_SWITCHINGS {
            return Err(Error::BoundExceeded(format!("more than {MAX_SWITCHINGS} switchings")));
        }
        let mut out = Vec::with_capacity(count * nv);
        for s in 0..self.switchings() {
            let old = &self.forests[s * base as usize..(s + 1) * base as usize];
            for choice in 0..1usize << tree.pars.len() {
                let start = out.len();
                out.extend_from_slice(old);
                out.extend(base..nv as u32);
                let g = &mut out[start..];
                let chosen = tree
                    .pars
                    .iter()
                    .enumerate()
                    .map(|(i, &(p, l, r))| (p, if choice >> i & 1 == 0 { l } else { r }));
                for (a, b) in tree.fixed.iter().copied().chain(chosen) {
                    let ra = find(g, base + a);
                    let rb = find(g, base + b);
                    g[ra as usize] = rb;
                }
            }
        }
        self.forests = out;
        self.vertices = nv as u32;
        Ok(base)
    }

    /// Adds an edge to every switching; false if one of them gets a cycle.
    fn add_edge(&mut self, a: usize, b: usize) -> bool {
        let (va, vb) = (self.ports[a].vertex, self.ports[b].vertex);
        let nv = self.vertices as usize;
        for g in self.forests.chunks_mut(nv) {
            let ra = find(g, va);
            let rb = find(g, vb);
            if ra == rb {
                return false;
            }
            g[ra as usize] = rb;
        }
        true
    }

    fn has_wire_from(&self, i: usize) -> bool {
        self.wires.iter().any(|&(s, _)| s == i)
    }
}

struct Search<'a> {
    budget: &'a NetBudget,
    mode: WiringMode,
    /// Interned sorts: whether each is a comonoid and a monoid.
    comonoid: Vec<bool>,
    monoid: Vec<bool>,
    /// Operations that may be added freely, then the discards.
    ops: Vec<OpShape>,
    free_ops: usize,
    /// Discard operation of each comonoid sort.
    discard: BTreeMap<u8, usize>,
    nus: BTreeSet<usize>,
    /// Per strict sort, the least and greatest (sources - targets) a cell adds.
    balance: Vec<Option<(i64, i64)>>,
    dom: Formula,
    cod: Formula,
    skeletons: HashSet<Net>,
    classes: BTreeSet<Net>,
}

impl Search<'_> {
    fn multi(&self, k: Kind) -> bool {
        match k.sort {
            Some(s) if k.negative => self.comonoid[s as usize],
            Some(s) => self.monoid[s as usize],
            None => false,
        }
    }

    fn partners(a: Kind, b: Kind) -> bool {
        a.sort.is_some() && a.sort == b.sort && a.negative != b.negative
    }

    fn strict_delta(&self, k: Kind) -> Option<(usize, i64)> {
        let s = k.sort? as usize;
        if self.comonoid[s] || self.monoid[s] {
            return None;
        }
        Some((s, if k.negative { 1 } else { -1 }))
    }

    fn push_port(&self, st: &mut State, at: PortRef, kind: Kind, vertex: u32) {
        if let Some((s, d)) = self.strict_delta(kind) {
            st.open[s] += d;
        }
        st.ports.push(Port { at, kind, vertex });
        st.closed.push(kind.sort.is_none());
    }

    fn close(&self, st: &mut State, i: usize) {
        if !st.closed[i] {
            st.closed[i] = true;
            if let Some((s, d)) = self.strict_delta(st.ports[i].kind) {
                st.open[s] -= d;
            }
        }
    }

    fn add_cell(&self, st: &mut State, oi: usize) -> Result<usize> {
        let op = &self.ops[oi];
        let c = st.cells.len() as CellId;
        st.cells.push(oi);
        if op.counted {
            st.counted += 1;
        }
        let base = st.add_tree(&op.tree)?;
        let first = st.ports.len();
        for (i, &k) in op.ports.iter().enumerate() {
            self.push_port(st, op.port_ref(c, i), k, base + op.tree.leaves[i]);
        }
        Ok(first)
    }

    fn fits(&self, st: &State, oi: usize) -> bool {
        st.cells.len() < self.budget.max_total && (!self.ops[oi].counted || st.counted < self.budget.max_counted)
    }

    /// Wires ports `a` and `b` (either orientation), closing strict ends.
    fn connect(&self, st: &mut State, a: usize, b: usize) -> bool {
        let (src, tgt) = if st.ports[a].kind.negative { (a, b) } else { (b, a) };
        st.wires.push((src, tgt));
        for p in [src, tgt] {
            if !self.multi(st.ports[p].kind) {
                self.close(st, p);
            }
        }
        let fan = self.multi(st.ports[src].kind);
        fan || st.add_edge(src, tgt)
    }

    fn balanced(&self, st: &State) -> bool {
        let left = self.budget.max_total.saturating_sub(st.cells.len()) as i64;
        self.balance.iter().zip(&st.open).all(|(b, &d)| match b {
            Some((lo, hi)) => -d >= left * lo && -d <= left * hi,
            None => true,
        })
    }

    fn fresh_options(&self, k: Kind) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (oi, op) in self.ops[..self.free_ops].iter().enumerate() {
            for (pi, &pk) in op.ports.iter().enumerate() {
                if Self::partners(k, pk) {
                    out.push((oi, pi));
                }
            }
        }
        out
    }

    fn step(&mut self, st: State) -> Result<()> {
        if !self.balanced(&st) {
            return Ok(());
        }
        let Some(i) = st.closed.iter().position(|c| !c) else {
            return self.finish(&st);
        };
        let kind = st.ports[i].kind;
        let existing: Vec<usize> = (i + 1..st.ports.len())
            .filter(|&j| !st.closed[j] && Self::partners(kind, st.ports[j].kind))
            .collect();
        if self.multi(kind) {
            return self.choose_existing(st, i, &existing, 0);
        }
        for &j in &existing {
            let mut next = st.clone();
            if self.connect(&mut next, i, j) {
                self.step(next)?;
            }
        }
        for (oi, pi) in self.fresh_options(kind) {
            if !self.fits(&st, oi) {
                continue;
            }
            let mut next = st.clone();
            let first = self.add_cell(&mut next, oi)?;
            if self.connect(&mut next, i, first + pi) {
                self.step(next)?;
            }
        }
        Ok(())
    }

    /// Picks a subset of the existing partners of the multi port `i`.
    fn choose_existing(&mut self, st: State, i: usize, existing: &[usize], from: usize) -> Result<()> {
        if from == existing.len() {
            return self.choose_fresh(st, i, 0);
        }
        self.choose_existing(st.clone(), i, existing, from + 1)?;
        let mut next = st;
        if self.connect(&mut next, i, existing[from]) {
            self.choose_existing(next, i, existing, from + 1)?;
        }
        Ok(())
    }

    /// Adds a multiset of fresh partners, in nondecreasing option order.
    fn choose_fresh(&mut self, st: State, i: usize, min_option: usize) -> Result<()> {
        let options = self.fresh_options(st.ports[i].kind);
        self.close_multi(st.clone(), i)?;
        for (n, &(oi, pi)) in options.iter().enumerate() {
            if n < min_option || !self.fits(&st, oi) {
                continue;
            }
            let mut next = st.clone();
            let first = self.add_cell(&mut next, oi)?;
            if self.connect(&mut next, i, first + pi) {
                // Later ports of the same cell may share the wire's end.
                let siblings: Vec<usize> = options[n + 1..]
                    .iter()
                    .take_while(|&&(o, _)| o == oi)
                    .map(|&(_, q)| first + q)
                    .collect();
                self.choose_siblings(next, i, &siblings, n)?;
            }
        }
        Ok(())
    }

    fn choose_siblings(&mut self, st: State, i: usize, siblings: &[usize], option: usize) -> Result<()> {
        self.choose_fresh(st.clone(), i, option)?;
        for (k, &q) in siblings.iter().enumerate() {
            let mut next = st.clone();
            if self.connect(&mut next, i, q) {
                self.choose_siblings(next, i, &siblings[k + 1..], option)?;
            }
        }
        Ok(())
    }

    fn close_multi(&mut self, mut st: State, i: usize) -> Result<()> {
        self.close(&mut st, i);
        let kind = st.ports[i].kind;
        if kind.negative && !st.has_wire_from(i) {
            // An unused comonoid source is discarded; a ν used only by
            // its discard is not in collapsed form.
            if let Some(c) = st.ports[i].at.loc.cell() {
                if self.nus.contains(&st.cells[c as usize]) {
                    return Ok(());
                }
            }
            let Some(&w) = kind.sort.and_then(|s| self.discard.get(&s)) else {
                return Ok(());
            };
            if !self.fits(&st, w) {
                return Ok(());
            }
            let first = self.add_cell(&mut st, w)?;
            st.wires.push((i, first));
            self.close(&mut st, first);
            if !st.add_edge(i, first) {
                return Ok(());
            }
        }
        self.step(st)
    }

    fn build(&self, st: &State, units: &[(usize, usize)]) -> Net {
        let mut net = Net::new(self.dom.clone(), self.cod.clone());
        for &oi in &st.cells {
            let op = &self.ops[oi];
            net.add_cell(&op.name, op.dom.clone(), op.cod.clone());
        }
        for &(s, t) in st.wires.iter().chain(units) {
            net.wire(st.ports[s].at, st.ports[t].at);
        }
        net
    }

    /// All sort wires are placed: assign the unit wires.
    fn finish(&mut self, st: &State) -> Result<()> {
        let skeleton = self.build(st, &[]);
        if !self.skeletons.insert(canonical_form(&skeleton)) {
            return Ok(());
        }
        let sources: Vec<usize> = (0..st.ports.len())
            .filter(|&i| st.ports[i].kind.sort.is_none() && st.ports[i].kind.negative)
            .collect();
        let targets: Vec<usize> = (0..st.ports.len()).filter(|&i| !st.ports[i].kind.negative).collect();
        let mut found = Vec::new();
        let single = sources.len() <= 1;
        self.assign(st, &sources, &targets, &mut Vec::new(), &mut found, single);
        if single {
            // One class at most: any member represents it.
            if let Some(units) = found.first() {
                self.classes.insert(canonical_form(&self.build(st, units)));
            }
            return Ok(());
        }
        // Assignments differing in one position are one rewiring move apart.
        let mut parent: Vec<u32> = (0..found.len() as u32).collect();
        for pos in 0..sources.len() {
            let mut groups: HashMap<Vec<(usize, usize)>, u32> = HashMap::new();
            for (i, t) in found.iter().enumerate() {
                let mut k = t.clone();
                k[pos].1 = usize::MAX;
                match groups.get(&k) {
                    Some(&j) => {
                        let (a, b) = (find(&mut parent, i as u32), find(&mut parent, j));
                        parent[a as usize] = b;
                    }
                    None => {
                        groups.insert(k, i as u32);
                    }
                }
            }
        }
        let mut keys: BTreeMap<u32, Net> = BTreeMap::new();
        for (i, units) in found.iter().enumerate() {
            let n = canonical_form(&self.build(st, units));
            let r = find(&mut parent, i as u32);
            match keys.get(&r) {
                Some(k) if *k <= n => {}
                _ => {
                    keys.insert(r, n);
                }
            }
        }
        self.classes.extend(keys.into_values());
        Ok(())
    }

    fn assign(
        &self,
        st: &State,
        sources: &[usize],
        targets: &[usize],
        units: &mut Vec<(usize, usize)>,
        found: &mut Vec<Vec<(usize, usize)>>,
        first_only: bool,
    ) {
        if first_only && !found.is_empty() {
            return;
        }
        let k = units.len();
        if k == sources.len() {
            if self.build(st, units).is_correct(&self.mode) {
                found.push(units.clone());
            }
            return;
        }
        for &t in targets {
            let mut next = st.clone();
            if next.add_edge(sources[k], t) {
                units.push((sources[k], t));
                self.assign(&next, sources, targets, units, found, first_only);
                units.pop();
            }
        }
    }
}

fn kind_of(sorts: &[Sort], l: &crate::formula::Leaf, flip: bool) -> Kind {
    let pol = if flip { l.polarity.flip() } else { l.polarity };
    Kind {
        sort: l.sort.as_ref().map(|s| sorts.iter().position(|x| x == s).expect("declared sort") as u8),
        negative: pol == Polarity::Negative,
    }
}

/// All correct nets `dom -> cod` over the theory within the budget, one
/// canonical representative per rewiring class of collapsed nets. Copy
/// and monoid operations appear only as multi-wires; discards only on
/// otherwise unused comonoid sources.
pub fn enumerate_nets(theory: &Theory, dom: &Formula, cod: &Formula, budget: &NetBudget) -> Result<Vec<Net>> {
    let mode = theory.wiring_mode();
    let mut sorts: Vec<Sort> = theory.signature.sorts.iter().cloned().collect();
    for s in dom.sorts().into_iter().chain(cod.sorts()) {
        if !sorts.contains(&s) {
            sorts.push(s);
        }
    }
    let shape = |name: &str, d: &Formula, c: &Formula| {
        let ports = d
            .leaves()
            .iter()
            .map(|l| kind_of(&sorts, l, false))
            .chain(c.leaves().iter().map(|l| kind_of(&sorts, l, true)))
            .collect();
        let view = ClassicalFormula::Tensor(Box::new(d.classicalize(false)), Box::new(c.classicalize(true)));
        OpShape {
            name: name.to_string(),
            dom: d.clone(),
            cod: c.clone(),
            ports,
            tree: Tree::new(&view),
            counted: budget.counts(name),
        }
    };
    let collapsed = theory.collapsed_ops();
    let discards: BTreeSet<&String> = theory.comonoids.iter().map(|c| &c.discard).collect();
    let mut ops: Vec<OpShape> = theory
        .signature
        .ops
        .iter()
        .filter(|(name, _)| !collapsed.contains(*name) && !discards.contains(name))
        .map(|(name, ty)| shape(name, &ty.dom, &ty.cod))
        .collect();
    let free_ops = ops.len();
    let mut discard = BTreeMap::new();
    for c in &theory.comonoids {
        let ty = theory.signature.op(&c.discard)?;
        let s = sorts.iter().position(|x| *x == c.sort).expect("declared sort") as u8;
        discard.insert(s, ops.len());
        ops.push(shape(&c.discard, &ty.dom, &ty.cod));
    }
    let nus = theory
        .nus
        .iter()
        .filter_map(|n| ops.iter().position(|o| o.name == n.nu))
        .collect();
    let comonoid: Vec<bool> = sorts.iter().map(|s| mode.comonoid.contains(s)).collect();
    let monoid: Vec<bool> = sorts.iter().map(|s| mode.monoid.contains(s)).collect();
    let balance = (0..sorts.len())
        .map(|s| {
            if comonoid[s] || monoid[s] {
                return None;
            }
            let (mut lo, mut hi) = (0i64, 0i64);
            for op in &ops {
                let d: i64 = op
                    .ports
                    .iter()
                    .filter(|k| k.sort == Some(s as u8))
                    .map(|k| if k.negative { 1 } else { -1 })
                    .sum();
                lo = lo.min(d);
                hi = hi.max(d);
            }
            Some((lo, hi))
        })
        .collect();
    let mut search = Search {
        budget,
        mode,
        comonoid,
        monoid,
        ops,
        free_ops,
        discard,
        nus,
        balance,
        dom: dom.clone(),
        cod: cod.clone(),
        skeletons: HashSet::new(),
        classes: BTreeSet::new(),
    };
    let mut st = State {
        ports: Vec::new(),
        closed: Vec::new(),
        cells: Vec::new(),
        wires: Vec::new(),
        counted: 0,
        vertices: 0,
        forests: Vec::new(),
        open: vec![0; sorts.len()],
    };
    let cod_tree = Tree::new(&cod.classicalize(false));
    let dom_tree = Tree::new(&dom.classicalize(true));
    let cb = st.add_tree(&cod_tree)?;
    let db = st.add_tree(&dom_tree)?;
    for (i, l) in cod.leaves().iter().enumerate() {
        search.push_port(&mut st, PortRef::cod(i), kind_of(&sorts, l, false), cb + cod_tree.leaves[i]);
    }
    for (i, l) in dom.leaves().iter().enumerate() {
        search.push_port(&mut st, PortRef::dom(i), kind_of(&sorts, l, true), db + dom_tree.leaves[i]);
    }
    search.step(st)?;
    Ok(search.classes.into_iter().collect())
}
