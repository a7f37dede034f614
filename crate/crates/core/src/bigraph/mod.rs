//! Abstract binding bigraphs: place forest, link map, binding and scope
//! rules, composition, and lean-support equivalence.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

mod dot;
mod enumerate;
mod text;

pub use dot::bigraph_to_dot;
pub use enumerate::{enumerate_bigraphs, enumerate_ground_bigraphs};
pub use text::{parse_bigraph, parse_bigsig, print_bigraph, print_bigsig, BigraphFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Control {
    pub binding: usize,
    pub free: usize,
    pub atomic: bool,
}

impl Control {
    pub fn arity(&self) -> usize {
        self.binding + self.free
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BigSignature {
    pub controls: BTreeMap<String, Control>,
}

impl BigSignature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_control(mut self, name: &str, binding: usize, free: usize, atomic: bool) -> Self {
        self.controls.insert(name.to_string(), Control { binding, free, atomic });
        self
    }

    pub fn control(&self, name: &str) -> Result<&Control> {
        self.controls
            .get(name)
            .ok_or_else(|| Error::InvalidBigraph(format!("unknown control `{name}`")))
    }

    pub fn validate(&self) -> Result<()> {
        for (name, c) in &self.controls {
            if c.atomic && c.binding > 0 {
                return Err(Error::InvalidBigraph(format!(
                    "atomic control `{name}` has binding arity {}",
                    c.binding
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Locality {
    Global,
    At(usize),
}

impl fmt::Display for Locality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Locality::Global => f.write_str("global"),
            Locality::At(i) => write!(f, "{i}"),
        }
    }
}

/// `(width, names, locality)`; names are ordered as strings.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interface {
    pub width: usize,
    pub names: BTreeMap<String, Locality>,
}

impl Interface {
    pub fn new(width: usize) -> Self {
        Interface {
            width,
            names: BTreeMap::new(),
        }
    }

    pub fn with_name(mut self, name: &str, loc: Locality) -> Self {
        self.names.insert(name.to_string(), loc);
        self
    }

    pub fn globals(&self) -> Vec<&str> {
        self.names
            .iter()
            .filter(|(_, l)| **l == Locality::Global)
            .map(|(n, _)| n.as_str())
            .collect()
    }

    pub fn located_at(&self, i: usize) -> Vec<&str> {
        self.names
            .iter()
            .filter(|(_, l)| **l == Locality::At(i))
            .map(|(n, _)| n.as_str())
            .collect()
    }

    fn check(&self, side: &str) -> Result<()> {
        for (x, l) in &self.names {
            if let Locality::At(i) = l {
                if *i >= self.width {
                    return Err(Error::InvalidBigraph(format!(
                        "{side} name `{x}` is located at {i}, but the width is {}",
                        self.width
                    )));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Interface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {{", self.width)?;
        for (i, (x, l)) in self.names.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}: {l}")?;
        }
        f.write_str("})")
    }
}

pub type NodeId = usize;
pub type EdgeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parent {
    Node(NodeId),
    Root(usize),
}

/// Something the link map is defined on.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    /// Port `i` of a node; binding ports come first.
    Port(NodeId, usize),
    Inner(String),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Link {
    Edge(EdgeId),
    Outer(String),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Node {
    pub control: String,
    pub parent: Parent,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bigraph {
    pub dom: Interface,
    pub cod: Interface,
    pub nodes: BTreeMap<NodeId, Node>,
    /// Parent of each site of `dom`.
    pub sites: Vec<Parent>,
    pub edges: BTreeSet<EdgeId>,
    pub link: BTreeMap<Point, Link>,
}

impl Bigraph {
    pub fn new(dom: Interface, cod: Interface) -> Self {
        Bigraph {
            dom,
            cod,
            nodes: BTreeMap::new(),
            sites: Vec::new(),
            edges: BTreeSet::new(),
            link: BTreeMap::new(),
        }
    }

    pub fn add_node(&mut self, control: &str, parent: Parent) -> NodeId {
        let id = self.nodes.keys().next_back().map_or(0, |n| n + 1);
        self.nodes.insert(
            id,
            Node {
                control: control.to_string(),
                parent,
            },
        );
        id
    }

    pub fn add_edge(&mut self) -> EdgeId {
        let id = self.edges.iter().next_back().map_or(0, |e| e + 1);
        self.edges.insert(id);
        id
    }

    pub fn parent_of(&self, p: Place) -> Option<Parent> {
        match p {
            Place::Node(v) => self.nodes.get(&v).map(|n| n.parent),
            Place::Site(s) => self.sites.get(s).copied(),
        }
    }

    /// Whether `p` lies strictly below node `anc`.
    pub fn below(&self, p: Place, anc: NodeId) -> bool {
        let mut cur = self.parent_of(p);
        let mut steps = 0;
        while let Some(Parent::Node(v)) = cur {
            if v == anc {
                return true;
            }
            steps += 1;
            if steps > self.nodes.len() {
                return false;
            }
            cur = self.parent_of(Place::Node(v));
        }
        false
    }

    /// The root a place hangs from, if the place graph is a forest.
    pub fn root_of(&self, p: Place) -> Option<usize> {
        let mut cur = self.parent_of(p);
        for _ in 0..=self.nodes.len() {
            match cur? {
                Parent::Root(r) => return Some(r),
                Parent::Node(v) => cur = self.parent_of(Place::Node(v)),
            }
        }
        None
    }

    /// All points linked to `l`.
    pub fn peers(&self, l: &Link) -> Vec<&Point> {
        self.link.iter().filter(|(_, t)| *t == l).map(|(p, _)| p).collect()
    }

    /// The binding port on an edge, if any.
    pub fn binder(&self, sig: &BigSignature, e: EdgeId) -> Option<(NodeId, usize)> {
        self.link.iter().find_map(|(p, t)| match (p, t) {
            (Point::Port(v, i), Link::Edge(f)) if *f == e => {
                let k = sig.controls.get(&self.nodes.get(v)?.control)?;
                (*i < k.binding).then_some((*v, *i))
            }
            _ => None,
        })
    }

    pub fn idle_edges(&self) -> Vec<EdgeId> {
        let used: BTreeSet<EdgeId> = self
            .link
            .values()
            .filter_map(|l| match l {
                Link::Edge(e) => Some(*e),
                Link::Outer(_) => None,
            })
            .collect();
        self.edges.difference(&used).copied().collect()
    }

    fn place_of_inner(&self, x: &str) -> Option<Place> {
        match self.dom.names.get(x)? {
            Locality::At(s) => Some(Place::Site(*s)),
            Locality::Global => None,
        }
    }
}

/// A node or a site.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Place {
    Node(NodeId),
    Site(usize),
}

fn bad(msg: String) -> Error {
    Error::InvalidBigraph(msg)
}

/// Checks interfaces, the place forest, totality of the link map, the
/// binding rule, one binder per edge, the scope rule, and leanness.
///
/// Scope also applies to located outer names: every peer of an outer name
/// located at root `r` hangs from `r`, and inner-name peers must be
/// located at a site under `r`.
pub fn check_bigraph(b: &Bigraph, sig: &BigSignature) -> Result<()> {
    check_structure(b, sig)?;
    if let Some(e) = b.idle_edges().first() {
        return Err(bad(format!("edge e{e} is idle (not lean)")));
    }
    Ok(())
}

/// Everything but leanness.
pub fn check_structure(b: &Bigraph, sig: &BigSignature) -> Result<()> {
    b.dom.check("inner")?;
    b.cod.check("outer")?;
    if b.sites.len() != b.dom.width {
        return Err(bad(format!("{} sites for inner width {}", b.sites.len(), b.dom.width)));
    }
    let parent_ok = |p: &Parent, what: String| -> Result<()> {
        match p {
            Parent::Root(r) if *r >= b.cod.width => Err(bad(format!("{what} is under missing root {r}"))),
            Parent::Node(v) => match b.nodes.get(v) {
                None => Err(bad(format!("{what} is under missing node {v}"))),
                Some(n) if sig.control(&n.control)?.atomic => {
                    Err(bad(format!("{what} is under atomic node {v}")))
                }
                Some(_) => Ok(()),
            },
            _ => Ok(()),
        }
    };
    for (v, n) in &b.nodes {
        sig.control(&n.control)?;
        parent_ok(&n.parent, format!("node {v}"))?;
    }
    for (s, p) in b.sites.iter().enumerate() {
        parent_ok(p, format!("site {s}"))?;
    }
    for &v in b.nodes.keys() {
        if b.root_of(Place::Node(v)).is_none() {
            return Err(bad(format!("node {v} is on a cycle of the place graph")));
        }
    }
    // Link map: total on points, into edges and outer names.
    let mut points: BTreeSet<Point> = BTreeSet::new();
    for (v, n) in &b.nodes {
        for i in 0..sig.control(&n.control)?.arity() {
            points.insert(Point::Port(*v, i));
        }
    }
    for x in b.dom.names.keys() {
        points.insert(Point::Inner(x.clone()));
    }
    for (p, l) in &b.link {
        if !points.contains(p) {
            return Err(bad(format!("link from unknown point {p}")));
        }
        match l {
            Link::Edge(e) if !b.edges.contains(e) => return Err(bad(format!("link to unknown edge e{e}"))),
            Link::Outer(y) if !b.cod.names.contains_key(y) => {
                return Err(bad(format!("link to unknown outer name `{y}`")))
            }
            _ => {}
        }
    }
    if let Some(p) = points.iter().find(|p| !b.link.contains_key(p)) {
        return Err(bad(format!("point {p} is not linked")));
    }
    // Binding rule and one binder per edge.
    let mut binders: BTreeMap<EdgeId, (NodeId, usize)> = BTreeMap::new();
    for (p, l) in &b.link {
        let Point::Port(v, i) = p else { continue };
        if *i >= sig.control(&b.nodes[v].control)?.binding {
            continue;
        }
        match l {
            Link::Outer(y) => {
                return Err(bad(format!(
                    "binding port {v}.{i} is linked to outer name `{y}` (binding rule)"
                )))
            }
            Link::Edge(e) => {
                if let Some((w, j)) = binders.insert(*e, (*v, *i)) {
                    return Err(bad(format!("edge e{e} has two binding ports, {w}.{j} and {v}.{i}")));
                }
            }
        }
    }
    // Scope.
    for (p, l) in &b.link {
        let place = match p {
            Point::Port(v, _) => Some(Place::Node(*v)),
            Point::Inner(x) => b.place_of_inner(x),
        };
        match l {
            Link::Edge(e) => {
                let Some(&(bv, bi)) = binders.get(e) else { continue };
                if *p == Point::Port(bv, bi) {
                    continue;
                }
                if !place.is_some_and(|pl| b.below(pl, bv)) {
                    return Err(bad(format!(
                        "{p} uses bound edge e{e} but is not below its binder node {bv} (scope rule)"
                    )));
                }
            }
            Link::Outer(y) => {
                let Locality::At(r) = b.cod.names[y] else { continue };
                if place.and_then(|pl| b.root_of(pl)) != Some(r) {
                    return Err(bad(format!(
                        "{p} uses outer name `{y}` located at root {r} but is not under that root (scope rule)"
                    )));
                }
            }
        }
    }
    Ok(())
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Port(v, i) => write!(f, "{v}.{i}"),
            Point::Inner(x) => write!(f, "{x}"),
        }
    }
}

/// Drops edges no point links to.
pub fn lean_normalize(b: &Bigraph) -> Bigraph {
    let mut out = b.clone();
    for e in b.idle_edges() {
        out.edges.remove(&e);
    }
    out
}

pub fn identity_bigraph(u: &Interface) -> Bigraph {
    let mut b = Bigraph::new(u.clone(), u.clone());
    b.sites = (0..u.width).map(Parent::Root).collect();
    for x in u.names.keys() {
        b.link.insert(Point::Inner(x.clone()), Link::Outer(x.clone()));
    }
    b
}

/// `g ∘ f`: the roots of `f` are plugged into the sites of `g` and the
/// outer names of `f` are joined to the inner names of `g`.
pub fn compose_bigraphs(g: &Bigraph, f: &Bigraph, sig: &BigSignature) -> Result<Bigraph> {
    if f.cod != g.dom {
        return Err(Error::InterfaceMismatch(format!("{} versus {}", f.cod, g.dom)));
    }
    let nf = f.nodes.keys().next_back().map_or(0, |v| v + 1);
    let ef = f.edges.iter().next_back().map_or(0, |e| e + 1);
    let g_parent = |p: Parent| match p {
        Parent::Node(v) => Parent::Node(v + nf),
        r => r,
    };
    let graft = |p: Parent| match p {
        Parent::Root(r) => g_parent(g.sites[r]),
        n => n,
    };
    let g_link = |l: &Link| match l {
        Link::Edge(e) => Link::Edge(e + ef),
        o => o.clone(),
    };
    let mut out = Bigraph::new(f.dom.clone(), g.cod.clone());
    for (v, n) in &f.nodes {
        out.nodes.insert(
            *v,
            Node {
                control: n.control.clone(),
                parent: graft(n.parent),
            },
        );
    }
    for (v, n) in &g.nodes {
        out.nodes.insert(
            v + nf,
            Node {
                control: n.control.clone(),
                parent: g_parent(n.parent),
            },
        );
    }
    out.sites = f.sites.iter().map(|&p| graft(p)).collect();
    out.edges = f.edges.iter().copied().chain(g.edges.iter().map(|e| e + ef)).collect();
    for (p, l) in &f.link {
        let t = match l {
            Link::Outer(y) => g_link(
                g.link
                    .get(&Point::Inner(y.clone()))
                    .ok_or_else(|| Error::Internal(format!("inner name `{y}` unlinked")))?,
            ),
            e => e.clone(),
        };
        out.link.insert(p.clone(), t);
    }
    for (p, l) in &g.link {
        if let Point::Port(v, i) = p {
            out.link.insert(Point::Port(v + nf, *i), g_link(l));
        }
    }
    let out = lean_normalize(&out);
    check_bigraph(&out, sig).map_err(|e| Error::Internal(format!("composite is invalid: {e}")))?;
    Ok(out)
}

/// A canonical representative up to renaming of nodes and edges: nodes
/// are renumbered by every control-preserving permutation, edges by
/// first use, and the least result is kept.
pub fn support_canonical(b: &Bigraph) -> Bigraph {
    let b = lean_normalize(b);
    let nodes: Vec<NodeId> = b.nodes.keys().copied().collect();
    // Candidate orders only permute nodes within the same control.
    let mut by_control: BTreeMap<&str, Vec<NodeId>> = BTreeMap::new();
    for (v, n) in &b.nodes {
        by_control.entry(n.control.as_str()).or_default().push(*v);
    }
    let groups: Vec<Vec<NodeId>> = by_control.into_values().collect();
    let mut best: Option<Bigraph> = None;
    let mut order = Vec::with_capacity(nodes.len());
    permute_groups(&groups, 0, &mut order, &mut |order| {
        let map: BTreeMap<NodeId, NodeId> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let cand = relabel(&b, &map);
        if best.as_ref().map_or(true, |x| cand < *x) {
            best = Some(cand);
        }
    });
    best.unwrap_or(b)
}

fn permute_groups(groups: &[Vec<NodeId>], gi: usize, order: &mut Vec<NodeId>, visit: &mut dyn FnMut(&[NodeId])) {
    if gi == groups.len() {
        visit(order);
        return;
    }
    let mut g = groups[gi].clone();
    permute(&mut g, 0, &mut |perm| {
        let len = order.len();
        order.extend_from_slice(perm);
        permute_groups(groups, gi + 1, order, visit);
        order.truncate(len);
    });
}

fn permute(v: &mut Vec<NodeId>, k: usize, visit: &mut dyn FnMut(&[NodeId])) {
    if k == v.len() {
        visit(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, visit);
        v.swap(k, i);
    }
}

fn relabel(b: &Bigraph, map: &BTreeMap<NodeId, NodeId>) -> Bigraph {
    let par = |p: Parent| match p {
        Parent::Node(v) => Parent::Node(map[&v]),
        r => r,
    };
    let mut out = Bigraph::new(b.dom.clone(), b.cod.clone());
    for (v, n) in &b.nodes {
        out.nodes.insert(
            map[v],
            Node {
                control: n.control.clone(),
                parent: par(n.parent),
            },
        );
    }
    out.sites = b.sites.iter().map(|&p| par(p)).collect();
    let points: BTreeMap<Point, &Link> = b
        .link
        .iter()
        .map(|(p, l)| {
            let p = match p {
                Point::Port(v, i) => Point::Port(map[v], *i),
                x => x.clone(),
            };
            (p, l)
        })
        .collect();
    let mut edge_map: BTreeMap<EdgeId, EdgeId> = BTreeMap::new();
    for (p, l) in points {
        let l = match l {
            Link::Edge(e) => {
                let n = edge_map.len();
                Link::Edge(*edge_map.entry(*e).or_insert(n))
            }
            o => o.clone(),
        };
        out.link.insert(p, l);
    }
    out.edges = edge_map.values().copied().collect();
    out
}

/// Equality up to renaming of nodes and edges, after dropping idle edges.
pub fn support_iso(f: &Bigraph, g: &Bigraph) -> bool {
    f.dom == g.dom
        && f.cod == g.cod
        && f.nodes.len() == g.nodes.len()
        && f.link.len() == g.link.len()
        && support_canonical(f) == support_canonical(g)
}
