//! Graphviz export: nesting as clusters, the link graph as edges.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::{Bigraph, Link, Parent, Point};

pub fn bigraph_to_dot(b: &Bigraph) -> String {
    let mut children: BTreeMap<Parent, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (v, n) in &b.nodes {
        children.entry(n.parent).or_default().0.push(*v);
    }
    for (s, p) in b.sites.iter().enumerate() {
        children.entry(*p).or_default().1.push(s);
    }
    let mut out = String::from("digraph bigraph {\n  compound=true;\n");
    fn place(b: &Bigraph, p: Parent, children: &BTreeMap<Parent, (Vec<usize>, Vec<usize>)>, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        let (nodes, sites) = children.get(&p).cloned().unwrap_or_default();
        for s in sites {
            let _ = writeln!(out, "{pad}site{s} [shape=box, style=dashed, label=\"{s}\"];");
        }
        for v in nodes {
            let _ = writeln!(out, "{pad}subgraph cluster_n{v} {{");
            let _ = writeln!(out, "{pad}  label=\"{} #{v}\";", b.nodes[&v].control);
            let _ = writeln!(out, "{pad}  n{v} [shape=point];");
            place(b, Parent::Node(v), children, depth + 1, out);
            let _ = writeln!(out, "{pad}}}");
        }
    }
    for r in 0..b.cod.width {
        let _ = writeln!(out, "  subgraph cluster_root{r} {{\n    label=\"root {r}\";\n    style=rounded;\n    root{r} [shape=point];");
        place(b, Parent::Root(r), &children, 2, &mut out);
        out.push_str("  }\n");
    }
    for e in &b.edges {
        let _ = writeln!(out, "  e{e} [shape=circle, label=\"\", width=0.15];");
    }
    for (y, l) in &b.cod.names {
        let _ = writeln!(out, "  \"out_{y}\" [shape=plaintext, label=\"{y} ({l})\"];");
    }
    for (x, l) in &b.dom.names {
        let _ = writeln!(out, "  \"in_{x}\" [shape=plaintext, label=\"{x} ({l})\"];");
    }
    for (p, l) in &b.link {
        let from = match p {
            Point::Port(v, _) => format!("n{v}"),
            Point::Inner(x) => format!("\"in_{x}\""),
        };
        let label = match p {
            Point::Port(_, i) => format!(" [label=\"{i}\"]"),
            Point::Inner(_) => String::new(),
        };
        let to = match l {
            Link::Edge(e) => format!("e{e}"),
            Link::Outer(y) => format!("\"out_{y}\""),
        };
        let _ = writeln!(out, "  {from} -> {to}{label};");
    }
    out.push_str("}\n");
    out
}
