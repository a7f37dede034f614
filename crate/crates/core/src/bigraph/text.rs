//! The `.sbg` bigraph and `.sbs` signature formats.
//!
//! ```text
//! bigsig g : bind 1 free 1
//! bigsig s : bind 0 free 2
//! dom width 1
//! cod width 1
//! name x at 0 in dom
//! name a at global in cod
//! node n0 : g in root.0
//! site 0 in n0
//! edge bound
//! link n0.0 -> bound
//! link x -> bound
//! link n0.1 -> a
//! ```

use std::collections::{BTreeMap, BTreeSet};

use super::{lean_normalize, BigSignature, Bigraph, Control, Interface, Link, Locality, Node, Parent, Point};
use crate::error::{Error, Result};

/// A parsed bigraph, the signature its file declares (merged with any
/// signature given to the parser), and notes such as dropped idle edges.
#[derive(Clone, Debug)]
pub struct BigraphFile {
    pub bigraph: Bigraph,
    pub signature: BigSignature,
    pub warnings: Vec<String>,
}

fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then(|| (i + 1, line.split_whitespace().collect()))
    })
}

fn num(line: usize, s: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::Line {
        line,
        msg: format!("expected a number, found `{s}`"),
    })
}

fn parse_control(line: usize, w: &[&str]) -> Result<(String, Control)> {
    match w {
        ["bigsig", name, ":", "bind", b, "free", f, rest @ ..] => {
            let atomic = match rest {
                [] => false,
                ["atomic"] => true,
                _ => {
                    return Err(Error::Line {
                        line,
                        msg: "expected `atomic` or end of line".into(),
                    })
                }
            };
            Ok((
                name.to_string(),
                Control {
                    binding: num(line, b)?,
                    free: num(line, f)?,
                    atomic,
                },
            ))
        }
        _ => Err(Error::Line {
            line,
            msg: "expected `bigsig <name> : bind <B> free <F> [atomic]`".into(),
        }),
    }
}

pub fn parse_bigsig(text: &str) -> Result<BigSignature> {
    let mut sig = BigSignature::new();
    for (line, w) in lines(text) {
        let (name, c) = parse_control(line, &w)?;
        if sig.controls.insert(name.clone(), c).is_some() {
            return Err(Error::Line {
                line,
                msg: format!("control `{name}` declared twice"),
            });
        }
    }
    sig.validate()?;
    Ok(sig)
}

pub fn print_bigsig(sig: &BigSignature) -> String {
    let mut out = String::new();
    for (name, c) in &sig.controls {
        out.push_str(&format!("bigsig {name} : bind {} free {}", c.binding, c.free));
        if c.atomic {
            out.push_str(" atomic");
        }
        out.push('\n');
    }
    out
}

/// Parses a bigraph. Idle edges are dropped with a warning; all other
/// invariants are left to `check_bigraph`.
pub fn parse_bigraph(text: &str, sig: Option<&BigSignature>) -> Result<BigraphFile> {
    let mut signature = sig.cloned().unwrap_or_default();
    let mut widths = [None, None];
    let mut names: [BTreeMap<String, Locality>; 2] = Default::default();
    let mut nodes: Vec<(usize, String, String, String)> = Vec::new();
    let mut sites: BTreeMap<usize, (usize, String)> = BTreeMap::new();
    let mut edges: Vec<String> = Vec::new();
    let mut links: Vec<(usize, String, String)> = Vec::new();
    for (line, w) in lines(text) {
        let err = |msg: &str| Error::Line { line, msg: msg.into() };
        match w.as_slice() {
            ["bigsig", ..] => {
                let (name, c) = parse_control(line, &w)?;
                signature.controls.insert(name, c);
            }
            [side @ ("dom" | "cod"), "width", n] => {
                widths[usize::from(*side == "cod")] = Some(num(line, n)?);
            }
            ["name", x, "at", loc, "in", side @ ("dom" | "cod")] => {
                let l = if *loc == "global" { Locality::Global } else { Locality::At(num(line, loc)?) };
                if names[usize::from(*side == "cod")].insert(x.to_string(), l).is_some() {
                    return Err(err(&format!("name `{x}` declared twice")));
                }
            }
            ["node", id, ":", control, "in", parent] => {
                if id.contains('.') {
                    return Err(err("node ids may not contain `.`"));
                }
                nodes.push((line, id.to_string(), control.to_string(), parent.to_string()));
            }
            ["site", k, "in", parent] => {
                sites.insert(num(line, k)?, (line, parent.to_string()));
            }
            ["edge", id] => edges.push(id.to_string()),
            ["link", from, "->", to] => links.push((line, from.to_string(), to.to_string())),
            _ => return Err(err(&format!("unrecognised line `{}`", w.join(" ")))),
        }
    }
    signature.validate()?;
    let missing = |what: &str| Error::Line {
        line: 0,
        msg: format!("missing `{what} width`"),
    };
    let [dom_names, cod_names] = names;
    let dom = Interface {
        width: widths[0].ok_or_else(|| missing("dom"))?,
        names: dom_names,
    };
    let cod = Interface {
        width: widths[1].ok_or_else(|| missing("cod"))?,
        names: cod_names,
    };
    let node_ids: BTreeMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (n.1.as_str(), i)).collect();
    let parent = |line: usize, p: &str| -> Result<Parent> {
        if let Some(r) = p.strip_prefix("root.") {
            return Ok(Parent::Root(num(line, r)?));
        }
        node_ids.get(p).map(|&v| Parent::Node(v)).ok_or_else(|| Error::Line {
            line,
            msg: format!("unknown node `{p}`"),
        })
    };
    let mut b = Bigraph::new(dom, cod);
    for (v, (line, _, control, p)) in nodes.iter().enumerate() {
        b.nodes.insert(
            v,
            Node {
                control: control.clone(),
                parent: parent(*line, p)?,
            },
        );
    }
    for s in 0..b.dom.width {
        let (line, p) = sites.get(&s).ok_or_else(|| Error::Line {
            line: 0,
            msg: format!("site {s} has no parent"),
        })?;
        b.sites.push(parent(*line, p)?);
    }
    if let Some((&s, (line, _))) = sites.iter().find(|(&s, _)| s >= b.dom.width) {
        return Err(Error::Line {
            line: *line,
            msg: format!("site {s} is beyond the inner width"),
        });
    }
    let edge_ids: BTreeMap<&str, usize> = edges.iter().enumerate().map(|(i, e)| (e.as_str(), i)).collect();
    b.edges = (0..edges.len()).collect();
    for (line, from, to) in &links {
        let point = match from.split_once('.') {
            Some((v, i)) if node_ids.contains_key(v) => Point::Port(node_ids[v], num(*line, i)?),
            _ => Point::Inner(from.clone()),
        };
        let target = match edge_ids.get(to.as_str()) {
            Some(&e) => Link::Edge(e),
            None => Link::Outer(to.clone()),
        };
        if b.link.insert(point, target).is_some() {
            return Err(Error::Line {
                line: *line,
                msg: format!("`{from}` is linked twice"),
            });
        }
    }
    let mut warnings = Vec::new();
    let idle = b.idle_edges();
    if !idle.is_empty() {
        let names: Vec<&str> = idle.iter().map(|&e| edges[e].as_str()).collect();
        warnings.push(format!("dropped idle edges: {}", names.join(", ")));
        b = lean_normalize(&b);
    }
    Ok(BigraphFile {
        bigraph: b,
        signature,
        warnings,
    })
}

pub fn print_bigraph(b: &Bigraph, sig: Option<&BigSignature>) -> String {
    let mut out = String::new();
    if let Some(sig) = sig {
        out.push_str(&print_bigsig(sig));
    }
    out.push_str(&format!("dom width {}\ncod width {}\n", b.dom.width, b.cod.width));
    for (side, u) in [("dom", &b.dom), ("cod", &b.cod)] {
        for (x, l) in &u.names {
            out.push_str(&format!("name {x} at {l} in {side}\n"));
        }
    }
    let taken: BTreeSet<&str> = b.cod.names.keys().map(String::as_str).collect();
    let mut prefix = "e".to_string();
    while b.edges.iter().any(|e| taken.contains(format!("{prefix}{e}").as_str())) {
        prefix.insert(0, '_');
    }
    let parent = |p: &Parent| match p {
        Parent::Root(r) => format!("root.{r}"),
        Parent::Node(v) => format!("n{v}"),
    };
    for (v, n) in &b.nodes {
        out.push_str(&format!("node n{v} : {} in {}\n", n.control, parent(&n.parent)));
    }
    for (s, p) in b.sites.iter().enumerate() {
        out.push_str(&format!("site {s} in {}\n", parent(p)));
    }
    for e in &b.edges {
        out.push_str(&format!("edge {prefix}{e}\n"));
    }
    for (p, l) in &b.link {
        let from = match p {
            Point::Port(v, i) => format!("n{v}.{i}"),
            Point::Inner(x) => x.clone(),
        };
        let to = match l {
            Link::Edge(e) => format!("{prefix}{e}"),
            Link::Outer(y) => y.clone(),
        };
        out.push_str(&format!("link {from} -> {to}\n"));
    }
    out
}
