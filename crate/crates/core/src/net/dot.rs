//! Graphviz export.

use std::fmt::Write;

use super::{Loc, Net, PortRef};

fn node(p: PortRef) -> String {
    match p.loc {
        Loc::Dom => format!("dom:p{}", p.index),
        Loc::Cod => format!("cod:p{}", p.index),
        Loc::CellDom(c) => format!("c{c}:d{}", p.index),
        Loc::CellCod(c) => format!("c{c}:k{}", p.index),
    }
}

fn record(prefix: char, n: usize, label: &str) -> String {
    (0..n)
        .map(|i| format!("<{prefix}{i}> {label}{i}"))
        .collect::<Vec<_>>()
        .join("|")
}

pub fn net_to_dot(net: &Net) -> String {
    let mut out = String::from("digraph net {\n  rankdir=TB;\n  node [shape=record];\n");
    let nd = net.dom.leaf_count();
    let nc = net.cod.leaf_count();
    let _ = writeln!(out, "  dom [label=\"{{dom: {}|{{{}}}}}\"];", escape(&net.dom.to_string()), record('p', nd, ""));
    for (id, c) in &net.cells {
        let _ = writeln!(
            out,
            "  c{id} [label=\"{{{{{}}}|{} #{id}|{{{}}}}}\"];",
            record('d', c.dom.leaf_count(), ""),
            escape(&c.op),
            record('k', c.cod.leaf_count(), ""),
        );
    }
    let _ = writeln!(out, "  cod [label=\"{{{{{}}}|cod: {}}}\"];", record('p', nc, ""), escape(&net.cod.to_string()));
    for &(s, t) in &net.wires {
        let _ = writeln!(out, "  {} -> {};", node(s), node(t));
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    s.chars()
        .flat_map(|c| match c {
            '{' | '}' | '|' | '<' | '>' | '"' => vec!['\\', c],
            _ => vec![c],
        })
        .collect()
}
