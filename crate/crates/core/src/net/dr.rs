//! Switching graphs and the Danos-Regnier check.
//!
//! The glued graph has one vertex per port and per connective node of the
//! classical views of `dom^`, `cod`, and `A * B^` for each cell `A -> B`.
//! Every par keeps exactly one argument edge. In a collapsed net a
//! comonoid port with several outgoing wires stands for a tree of copies,
//! whose switchings keep exactly one of those wires alive; fan-in at a
//! monoid port is a plain star.

use std::collections::BTreeMap;

use super::{Net, PortRef, WiringMode};
use crate::error::{Error, Result};
use crate::formula::ClassicalFormula;

/// Refuse to enumerate more than `2^22` switchings unless told otherwise.
pub const DEFAULT_SWITCHING_LIMIT_LOG2: u32 = 22;

#[derive(Clone, Debug, Default)]
struct Template {
    vertices: usize,
    fixed: Vec<(usize, usize)>,
    /// (par node, left child, right child)
    pars: Vec<(usize, usize, usize)>,
    /// Alternative live wires of each fan-out.
    fans: Vec<Vec<(usize, usize)>>,
}

impl Template {
    fn build(net: &Net, mode: &WiringMode) -> (Template, BTreeMap<PortRef, usize>) {
        let mut t = Template::default();
        let mut port_vertex = BTreeMap::new();
        let mut add_tree = |t: &mut Template, cf: &ClassicalFormula, ports: &mut dyn Iterator<Item = PortRef>| {
            fn go(
                t: &mut Template,
                cf: &ClassicalFormula,
                ports: &mut dyn Iterator<Item = PortRef>,
                pv: &mut BTreeMap<PortRef, usize>,
            ) -> usize {
                match cf {
                    ClassicalFormula::Tensor(a, b) | ClassicalFormula::Par(a, b) => {
                        let l = go(t, a, ports, pv);
                        let r = go(t, b, ports, pv);
                        let v = t.vertices;
                        t.vertices += 1;
                        if matches!(cf, ClassicalFormula::Tensor(..)) {
                            t.fixed.push((v, l));
                            t.fixed.push((v, r));
                        } else {
                            t.pars.push((v, l, r));
                        }
                        v
                    }
                    _ => {
                        let v = t.vertices;
                        t.vertices += 1;
                        pv.insert(ports.next().expect("leaf count mismatch"), v);
                        v
                    }
                }
            }
            go(t, cf, ports, &mut port_vertex)
        };
        let n = net.dom.leaf_count();
        add_tree(&mut t, &net.dom.classicalize(true), &mut (0..n).map(PortRef::dom));
        let n = net.cod.leaf_count();
        add_tree(&mut t, &net.cod.classicalize(false), &mut (0..n).map(PortRef::cod));
        for (&c, cell) in &net.cells {
            let view = ClassicalFormula::Tensor(
                Box::new(cell.dom.classicalize(false)),
                Box::new(cell.cod.classicalize(true)),
            );
            let nd = cell.dom.leaf_count();
            let nc = cell.cod.leaf_count();
            let mut ports = (0..nd)
                .map(move |i| PortRef::cell_dom(c, i))
                .chain((0..nc).map(move |i| PortRef::cell_cod(c, i)));
            add_tree(&mut t, &view, &mut ports);
        }
        let info = net.port_map();
        let mut by_source: BTreeMap<PortRef, Vec<PortRef>> = BTreeMap::new();
        for &(s, tg) in &net.wires {
            by_source.entry(s).or_default().push(tg);
        }
        for (s, targets) in by_source {
            let sv = port_vertex[&s];
            let fan = targets.len() > 1 && info.get(&s).is_some_and(|i| mode.fan_out(&i.sort));
            if fan {
                t.fans
                    .push(targets.iter().map(|tg| (sv, port_vertex[tg])).collect());
            } else {
                for tg in targets {
                    t.fixed.push((sv, port_vertex[&tg]));
                }
            }
        }
        (t, port_vertex)
    }

    fn edge_count(&self) -> usize {
        self.fixed.len() + self.pars.len() + self.fans.len()
    }

    fn log2_switchings(&self) -> f64 {
        self.pars.len() as f64 + self.fans.iter().map(|f| (f.len() as f64).log2()).sum::<f64>()
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Returns false if the edge closes a cycle.
fn union(parent: &mut [usize], a: usize, b: usize) -> bool {
    let ra = find(parent, a);
    let rb = find(parent, b);
    if ra == rb {
        return false;
    }
    parent[ra] = rb;
    true
}

pub(super) fn check(net: &Net, mode: &WiringMode, limit_log2: u32) -> Result<()> {
    let (t, _) = Template::build(net, mode);
    if t.log2_switchings() > limit_log2 as f64 {
        return Err(Error::BoundExceeded(format!(
            "net has 2^{:.1} switchings, above the limit 2^{limit_log2}",
            t.log2_switchings()
        )));
    }
    // A tree on V vertices has V-1 edges; every switching has the same count.
    if t.edge_count() + 1 != t.vertices {
        return Err(Error::IllFormedNet(format!(
            "switchings have {} edges on {} vertices, so none is a tree",
            t.edge_count(),
            t.vertices
        )));
    }
    let mut base: Vec<usize> = (0..t.vertices).collect();
    for &(a, b) in &t.fixed {
        if !union(&mut base, a, b) {
            return Err(Error::IllFormedNet("every switching has a cycle".into()));
        }
    }
    let mut counter = Counter::new(&t);
    let mut index = 0usize;
    loop {
        let mut parent = base.clone();
        for (i, &(p, l, r)) in t.pars.iter().enumerate() {
            let child = if counter.digits[i] == 0 { l } else { r };
            if !union(&mut parent, p, child) {
                return Err(Error::IllFormedNet(format!("switching #{index} has a cycle")));
            }
        }
        for (j, fan) in t.fans.iter().enumerate() {
            let (a, b) = fan[counter.digits[t.pars.len() + j]];
            if !union(&mut parent, a, b) {
                return Err(Error::IllFormedNet(format!("switching #{index} has a cycle")));
            }
        }
        // V-1 edges and no cycle: connected.
        if !counter.advance() {
            return Ok(());
        }
        index += 1;
    }
}

struct Counter {
    digits: Vec<usize>,
    radix: Vec<usize>,
}

impl Counter {
    fn new(t: &Template) -> Self {
        let radix: Vec<usize> = t
            .pars
            .iter()
            .map(|_| 2)
            .chain(t.fans.iter().map(Vec::len))
            .collect();
        Counter {
            digits: vec![0; radix.len()],
            radix,
        }
    }

    fn advance(&mut self) -> bool {
        for i in 0..self.digits.len() {
            self.digits[i] += 1;
            if self.digits[i] < self.radix[i] {
                return true;
            }
            self.digits[i] = 0;
        }
        false
    }
}

/// One switching: the choice made at every par (0 = left, 1 = right) and
/// fan-out, and the resulting undirected graph.
#[derive(Clone, Debug)]
pub struct Switching {
    pub choices: Vec<usize>,
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Switching {
    pub fn is_acyclic(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.vertices).collect();
        self.edges.iter().all(|&(a, b)| union(&mut parent, a, b))
    }

    pub fn is_connected(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.vertices).collect();
        for &(a, b) in &self.edges {
            union(&mut parent, a, b);
        }
        let roots = (0..self.vertices).filter(|&v| find(&mut parent, v) == v).count();
        roots <= 1
    }

    pub fn is_tree(&self) -> bool {
        self.is_acyclic() && self.is_connected()
    }
}

/// Iterator over all switchings of a net.
pub struct Switchings {
    template: Template,
    counter: Counter,
    done: bool,
}

impl Switchings {
    pub(super) fn new(net: &Net, mode: &WiringMode) -> Self {
        let (template, _) = Template::build(net, mode);
        let counter = Counter::new(&template);
        Switchings {
            template,
            counter,
            done: false,
        }
    }

    /// Number of par nodes in the glued views.
    pub fn par_count(&self) -> usize {
        self.template.pars.len()
    }
}

impl Iterator for Switchings {
    type Item = Switching;

    fn next(&mut self) -> Option<Switching> {
        if self.done {
            return None;
        }
        let t = &self.template;
        let mut edges = t.fixed.clone();
        for (i, &(p, l, r)) in t.pars.iter().enumerate() {
            edges.push((p, if self.counter.digits[i] == 0 { l } else { r }));
        }
        for (j, fan) in t.fans.iter().enumerate() {
            edges.push(fan[self.counter.digits[t.pars.len() + j]]);
        }
        let sw = Switching {
            choices: self.counter.digits.clone(),
            vertices: t.vertices,
            edges,
        };
        self.done = !self.counter.advance();
        Some(sw)
    }
}
