//! From bigraphs to nets: signatures become π-style theories, interfaces
//! become formulas, and bigraphs become collapsed nets. Also the
//! desk-scale checks that the translation is faithful and bijective on
//! closed terms.

use std::collections::{BTreeMap, BTreeSet};

use crate::bigraph::{
    enumerate_bigraphs, enumerate_ground_bigraphs, BigSignature, Bigraph, Interface, Link, Locality, Parent, Point,
};
use crate::calculi::{enumerate_nets, NetBudget};
use crate::equivalence::{structural_key, CollapsedNet};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::net::{Net, PortRef};
use crate::signature::{SmcSignature, Theory};

const STRUCTURAL: [&str; 5] = ["par", "zero", "c", "w", "nu"];

fn v_power(n: usize) -> Formula {
    Formula::power("v", n)
}

/// Type of the operation of a control with `binding` binding and `free`
/// free ports: `v^free -> t` when atomic, else `v^free * (v^binding -o t) -> t`.
pub fn control_type(binding: usize, free: usize, atomic: bool) -> (Formula, Formula) {
    let t = Formula::atom("t");
    let dom = if atomic {
        v_power(free)
    } else {
        let mut factors = vec![Formula::atom("v"); free];
        factors.push(Formula::lollipop_normalized(v_power(binding), t.clone()));
        Formula::tensor_all(factors)
    };
    (dom, t)
}

pub fn translate_signature(sig: &BigSignature) -> Result<Theory> {
    sig.validate()?;
    let f = |s: &str| crate::formula::parse_formula(s, None).expect("fixed formula");
    let mut s = SmcSignature::new()
        .with_sort("t")
        .with_sort("v")
        .with_op("par", f("t * t"), f("t"))
        .with_op("zero", Formula::Unit, f("t"))
        .with_op("c", f("v"), f("v * v"))
        .with_op("w", f("v"), Formula::Unit)
        .with_op("nu", Formula::Unit, f("v"));
    for (name, k) in &sig.controls {
        if STRUCTURAL.contains(&name.as_str()) {
            return Err(Error::InvalidTheory(format!(
                "control `{name}` clashes with a structural operation"
            )));
        }
        let (dom, cod) = control_type(k.binding, k.free, k.atomic);
        s = s.with_op(name, dom, cod);
    }
    let t = crate::calculi::pi_structure(Theory::from_signature(s));
    t.validate()?;
    Ok(t)
}

/// `v^g -o ((v^n0 -o t) * ... )` with `g` global and `ni` located names;
/// empty powers and tensors are dropped.
pub fn translate_interface(u: &Interface) -> Formula {
    let roots = (0..u.width)
        .map(|i| Formula::lollipop_normalized(v_power(u.located_at(i).len()), Formula::atom("t")))
        .collect();
    Formula::lollipop_normalized(v_power(u.globals().len()), Formula::tensor_all(roots))
}

/// Where each name and each location's `t` sits among the leaves of the
/// translated interface: global names first, then per location its names
/// and its `t`, names in their order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafAssignment {
    pub names: BTreeMap<String, usize>,
    pub terms: Vec<usize>,
}

pub fn leaf_assignment(u: &Interface) -> LeafAssignment {
    let mut names = BTreeMap::new();
    let mut next = 0;
    for x in u.globals() {
        names.insert(x.to_string(), next);
        next += 1;
    }
    let mut terms = Vec::new();
    for i in 0..u.width {
        for x in u.located_at(i) {
            names.insert(x.to_string(), next);
            next += 1;
        }
        terms.push(next);
        next += 1;
    }
    LeafAssignment { names, terms }
}

/// A bigraphical signature together with its theory.
#[derive(Clone, Debug)]
pub struct TranslationContext {
    pub bigsig: BigSignature,
    pub theory: Theory,
}

impl TranslationContext {
    pub fn new(bigsig: &BigSignature) -> Result<Self> {
        Ok(TranslationContext {
            bigsig: bigsig.clone(),
            theory: translate_signature(bigsig)?,
        })
    }
}

/// Cell ports of a control's operation: free port `j` is dom leaf `j`,
/// binding port `i` is dom leaf `free + i`, the body is the last leaf.
fn port_leaf(binding: usize, free: usize, i: usize) -> usize {
    if i < binding {
        free + i
    } else {
        i - binding
    }
}

/// One cell per node; children feed their parent's body (or the root's
/// `t`) by fan-in; each name has one source fanning out to its uses: the
/// outer name's leaf, the binding port of a bound edge, or a `nu` cell for
/// a free edge. Sources without uses are discarded by a `w` cell.
pub fn translate_bigraph(b: &Bigraph, ctx: &TranslationContext) -> Result<CollapsedNet> {
    crate::bigraph::check_bigraph(b, &ctx.bigsig)?;
    let mode = ctx.theory.wiring_mode();
    let mut net = Net::new(translate_interface(&b.dom), translate_interface(&b.cod));
    let inner = leaf_assignment(&b.dom);
    let outer = leaf_assignment(&b.cod);
    let mut cell = BTreeMap::new();
    for (v, n) in &b.nodes {
        let ty = ctx.theory.signature.op(&n.control)?;
        cell.insert(*v, net.add_cell(&n.control, ty.dom.clone(), ty.cod.clone()));
    }
    let control = |v: usize| ctx.bigsig.controls[&b.nodes[&v].control];
    let body = |p: Parent| match p {
        Parent::Root(r) => PortRef::cod(outer.terms[r]),
        Parent::Node(u) => {
            let k = control(u);
            PortRef::cell_dom(cell[&u], k.free + k.binding)
        }
    };
    for (v, n) in &b.nodes {
        net.wire(PortRef::cell_cod(cell[v], 0), body(n.parent));
    }
    for (s, p) in b.sites.iter().enumerate() {
        net.wire(PortRef::dom(inner.terms[s]), body(*p));
    }
    let mut uses: BTreeMap<&Link, Vec<&Point>> = BTreeMap::new();
    for (p, l) in &b.link {
        uses.entry(l).or_default().push(p);
    }
    let outer_links: Vec<Link> = b.cod.names.keys().map(|y| Link::Outer(y.clone())).collect();
    let edge_links: Vec<Link> = b.edges.iter().map(|&e| Link::Edge(e)).collect();
    for l in outer_links.iter().chain(&edge_links) {
        let points = uses.get(l).cloned().unwrap_or_default();
        let binder = points.iter().find_map(|p| match p {
            Point::Port(v, i) if *i < control(*v).binding => Some((*v, *i)),
            _ => None,
        });
        let source = match (l, binder) {
            (Link::Outer(y), _) => PortRef::cod(outer.names[y]),
            (Link::Edge(_), Some((v, i))) => {
                let k = control(v);
                PortRef::cell_dom(cell[&v], port_leaf(k.binding, k.free, i))
            }
            (Link::Edge(_), None) => {
                let nu = net.add_cell("nu", Formula::Unit, Formula::atom("v"));
                PortRef::cell_cod(nu, 0)
            }
        };
        let mut used = false;
        for p in points {
            let target = match p {
                Point::Port(v, i) => {
                    if Some((*v, *i)) == binder {
                        continue;
                    }
                    let k = control(*v);
                    PortRef::cell_dom(cell[v], port_leaf(k.binding, k.free, *i))
                }
                Point::Inner(x) => PortRef::dom(inner.names[x]),
            };
            net.wire(source, target);
            used = true;
        }
        if !used {
            let w = net.add_cell("w", Formula::atom("v"), Formula::Unit);
            net.wire(source, PortRef::cell_dom(w, 0));
        }
    }
    let net = crate::calculi::lambda::wire_units(&net, &mode)?;
    Ok(CollapsedNet { net, mode })
}

/// Cell budget covering every net a bigraph with `max_nodes` nodes can
/// translate to: the nodes, a `nu` per free port and a `w` per binding port.
pub fn closed_budget(sig: &BigSignature, max_nodes: usize) -> NetBudget {
    let per_node = sig.controls.values().map(|k| 1 + k.arity()).max().unwrap_or(1);
    NetBudget {
        max_counted: max_nodes,
        counted_ops: Some(sig.controls.keys().cloned().collect()),
        max_total: max_nodes * per_node,
    }
}

/// The interfaces the faithfulness check enumerates between.
pub fn faithfulness_interfaces() -> Vec<(Interface, Interface)> {
    let doms = [
        Interface::new(0),
        Interface::new(1),
        Interface::new(1).with_name("x", Locality::At(0)),
        Interface::new(2).with_name("x", Locality::Global),
    ];
    let cods = [Interface::new(1), Interface::new(1).with_name("a", Locality::Global)];
    doms.iter()
        .flat_map(|d| cods.iter().map(move |c| (d.clone(), c.clone())))
        .collect()
}

/// A correct net `v -o (t * t) -> t` in which a get-like cell binds the
/// name both holes see as global. Bound names never reach global inner
/// names of a bigraph, so no bigraph translates to it.
/// Needs a control with one binding and one free port.
pub fn non_fullness_witness(ctx: &TranslationContext) -> Result<(Interface, Interface, Net)> {
    let (name, _) = ctx
        .bigsig
        .controls
        .iter()
        .find(|(_, k)| !k.atomic && k.binding == 1 && k.free == 1)
        .ok_or_else(|| Error::InvalidBigraph("the witness needs a control with arity (1, 1)".into()))?;
    let dom = Interface::new(2).with_name("x", Locality::Global);
    let cod = Interface::new(1);
    let mut n = Net::new(translate_interface(&dom), translate_interface(&cod));
    let ty = ctx.theory.signature.op(name)?;
    let g = n.add_cell(name, ty.dom.clone(), ty.cod.clone());
    let nu = n.add_cell("nu", Formula::Unit, Formula::atom("v"));
    n.wire(PortRef::cell_cod(nu, 0), PortRef::cell_dom(g, 0));
    n.wire(PortRef::cell_dom(g, 1), PortRef::dom(0));
    n.wire(PortRef::dom(1), PortRef::cell_dom(g, 2));
    n.wire(PortRef::dom(2), PortRef::cell_dom(g, 2));
    n.wire(PortRef::cell_cod(g, 0), PortRef::cod(0));
    Ok((dom, cod, n))
}

#[derive(Clone, Debug)]
pub struct FaithfulnessReport {
    pub interface_pairs: usize,
    pub bigraphs: usize,
    pub pairs_checked: usize,
    /// Non-isomorphic bigraphs with equivalent translations.
    pub collisions: Vec<(Bigraph, Bigraph)>,
    pub witness_correct: bool,
    pub witness_unmatched: bool,
}

impl FaithfulnessReport {
    pub fn ok(&self) -> bool {
        self.collisions.is_empty() && self.witness_correct && self.witness_unmatched
    }
}

pub fn check_faithfulness(sig: &BigSignature, max_nodes: usize) -> Result<FaithfulnessReport> {
    let ctx = TranslationContext::new(sig)?;
    let witness = non_fullness_witness(&ctx)?;
    let mut report = FaithfulnessReport {
        interface_pairs: 0,
        bigraphs: 0,
        pairs_checked: 0,
        collisions: Vec::new(),
        witness_correct: witness.2.is_correct(&ctx.theory.wiring_mode()),
        witness_unmatched: true,
    };
    let witness_key = structural_key(&witness.2, &ctx.theory)?;
    let mut pairs = faithfulness_interfaces();
    if !pairs.iter().any(|(d, c)| *d == witness.0 && *c == witness.1) {
        pairs.push((witness.0.clone(), witness.1.clone()));
    }
    for (dom, cod) in pairs {
        let bigraphs = enumerate_bigraphs(sig, &dom, &cod, max_nodes)?;
        report.interface_pairs += 1;
        report.bigraphs += bigraphs.len();
        report.pairs_checked += bigraphs.len() * bigraphs.len().saturating_sub(1) / 2;
        let mut seen: BTreeMap<Net, &Bigraph> = BTreeMap::new();
        for b in &bigraphs {
            let key = structural_key(&translate_bigraph(b, &ctx)?.net, &ctx.theory)?;
            if dom == witness.0 && cod == witness.1 && key == witness_key {
                report.witness_unmatched = false;
            }
            if let Some(prev) = seen.insert(key, b) {
                report.collisions.push((prev.clone(), b.clone()));
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct ClosedTermReport {
    pub bigraphs: usize,
    pub nets: usize,
    pub injective: bool,
    /// A net (in the budget) that no bigraph translates to.
    pub unmatched_net: Option<Net>,
    /// A bigraph whose translation is not among the enumerated nets.
    pub unmatched_bigraph: Option<Bigraph>,
}

impl ClosedTermReport {
    pub fn ok(&self) -> bool {
        self.bigraphs == self.nets && self.injective && self.unmatched_net.is_none() && self.unmatched_bigraph.is_none()
    }
}

/// Compares ground bigraphs with at most `max_nodes` nodes to the closed
/// nets `I -> t` of the translated theory within the matching budget.
pub fn check_closed_term_iso(sig: &BigSignature, max_nodes: usize) -> Result<ClosedTermReport> {
    let ctx = TranslationContext::new(sig)?;
    let bigraphs = enumerate_ground_bigraphs(sig, max_nodes)?;
    let nets = enumerate_nets(&ctx.theory, &Formula::Unit, &Formula::atom("t"), &closed_budget(sig, max_nodes))?;
    let mut images = BTreeMap::new();
    let mut injective = true;
    for b in &bigraphs {
        let key = structural_key(&translate_bigraph(b, &ctx)?.net, &ctx.theory)?;
        if images.insert(key, b).is_some() {
            injective = false;
        }
    }
    let mut net_keys = BTreeSet::new();
    let mut unmatched_net = None;
    for n in &nets {
        let key = structural_key(n, &ctx.theory)?;
        if !images.contains_key(&key) && unmatched_net.is_none() {
            unmatched_net = Some(n.clone());
        }
        net_keys.insert(key);
    }
    let unmatched_bigraph = images
        .iter()
        .find(|(k, _)| !net_keys.contains(*k))
        .map(|(_, b)| (*b).clone());
    Ok(ClosedTermReport {
        bigraphs: bigraphs.len(),
        nets: nets.len(),
        injective,
        unmatched_net,
        unmatched_bigraph,
    })
}

#[cfg(test)]
mod tests;
