//! Brute-force generation of bigraphs between two interfaces.

use std::collections::BTreeSet;

use super::{check_bigraph, support_canonical, BigSignature, Bigraph, Interface, Link, Node, Parent, Point};
use crate::error::{Error, Result};

/// Beyond this many nodes the search is not desk-scale any more.
pub const MAX_ENUM_NODES: usize = 5;

/// All valid lean bigraphs `dom -> cod` with at most `max_nodes` nodes, one
/// per support-isomorphism class, in canonical form and sorted.
pub fn enumerate_bigraphs(
    sig: &BigSignature,
    dom: &Interface,
    cod: &Interface,
    max_nodes: usize,
) -> Result<Vec<Bigraph>> {
    if max_nodes > MAX_ENUM_NODES {
        return Err(Error::BoundExceeded(format!(
            "{max_nodes} nodes requested, the limit is {MAX_ENUM_NODES}"
        )));
    }
    sig.validate()?;
    let controls: Vec<&String> = sig.controls.keys().collect();
    let mut found = BTreeSet::new();
    for n in 0..=max_nodes {
        let mut multiset = Vec::new();
        choose_controls(controls.len(), n, 0, &mut multiset, &mut |ks| {
            let names: Vec<&str> = ks.iter().map(|&k| controls[k].as_str()).collect();
            places(sig, dom, cod, &names, &mut found);
        });
    }
    Ok(found.into_iter().collect())
}

/// Ground bigraphs: from `(0, {})` to `(1, {})`.
pub fn enumerate_ground_bigraphs(sig: &BigSignature, max_nodes: usize) -> Result<Vec<Bigraph>> {
    enumerate_bigraphs(sig, &Interface::new(0), &Interface::new(1), max_nodes)
}

fn choose_controls(k: usize, n: usize, from: usize, acc: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
    if acc.len() == n {
        visit(acc);
        return;
    }
    for c in from..k {
        acc.push(c);
        choose_controls(k, n, c, acc, visit);
        acc.pop();
    }
}

fn places(sig: &BigSignature, dom: &Interface, cod: &Interface, controls: &[&str], found: &mut BTreeSet<Bigraph>) {
    let n = controls.len();
    let holders: Vec<Parent> = (0..cod.width)
        .map(Parent::Root)
        .chain((0..n).filter(|&v| !sig.controls[controls[v]].atomic).map(Parent::Node))
        .collect();
    if holders.is_empty() && n + dom.width > 0 {
        return;
    }
    let slots = n + dom.width;
    let mut choice = vec![0usize; slots];
    loop {
        let mut b = Bigraph::new(dom.clone(), cod.clone());
        for (v, &control) in controls.iter().enumerate() {
            b.nodes.insert(
                v,
                Node {
                    control: control.to_string(),
                    parent: holders[choice[v]],
                },
            );
        }
        b.sites = (0..dom.width).map(|s| holders[choice[n + s]]).collect();
        let forest = (0..n).all(|v| b.nodes[&v].parent != Parent::Node(v) && b.root_of(super::Place::Node(v)).is_some());
        if forest {
            links(sig, &b, found);
        }
        // Next parent assignment.
        let mut i = 0;
        loop {
            if i == slots {
                return;
            }
            choice[i] += 1;
            if choice[i] < holders.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

fn links(sig: &BigSignature, b: &Bigraph, found: &mut BTreeSet<Bigraph>) {
    let mut points = Vec::new();
    for (v, node) in &b.nodes {
        for i in 0..sig.controls[&node.control].arity() {
            points.push((Point::Port(*v, i), i < sig.controls[&node.control].binding));
        }
    }
    for x in b.dom.names.keys() {
        points.push((Point::Inner(x.clone()), false));
    }
    let outer: Vec<String> = b.cod.names.keys().cloned().collect();
    let mut cur = b.clone();
    assign(sig, &points, 0, 0, &outer, &mut cur, found);
}

fn assign(
    sig: &BigSignature,
    points: &[(Point, bool)],
    k: usize,
    edges: usize,
    outer: &[String],
    cur: &mut Bigraph,
    found: &mut BTreeSet<Bigraph>,
) {
    if k == points.len() {
        cur.edges = (0..edges).collect();
        if check_bigraph(cur, sig).is_ok() {
            found.insert(support_canonical(cur));
        }
        return;
    }
    let (p, binding) = &points[k];
    let mut targets: Vec<(Link, usize)> = (0..=edges).map(|e| (Link::Edge(e), edges.max(e + 1))).collect();
    if !binding {
        targets.extend(outer.iter().map(|y| (Link::Outer(y.clone()), edges)));
    }
    for (t, next_edges) in targets {
        cur.link.insert(p.clone(), t);
        assign(sig, points, k + 1, next_edges, outer, cur, found);
    }
    cur.link.remove(p);
}
