//! The `.snet` text format.
//!
//! ```text
//! theory pi.sth
//! dom I
//! cod t
//! cell 0 lam
//! wire cell.0.dom.0 -> cell.0.dom.1
//! wire cell.0.cod.0 -> cod.0
//! wire dom.0 -> cod.0
//! ```

use crate::error::{Error, Result};
use crate::formula::parse_formula;
use crate::net::{CellId, Net, PortRef};
use crate::signature::Theory;

pub fn parse_portref(s: &str) -> Option<PortRef> {
    let parts: Vec<&str> = s.split('.').collect();
    match parts.as_slice() {
        ["dom", k] => Some(PortRef::dom(k.parse().ok()?)),
        ["cod", k] => Some(PortRef::cod(k.parse().ok()?)),
        ["cell", id, "dom", k] => Some(PortRef::cell_dom(id.parse().ok()?, k.parse().ok()?)),
        ["cell", id, "cod", k] => Some(PortRef::cell_cod(id.parse().ok()?, k.parse().ok()?)),
        _ => None,
    }
}

/// A parsed net together with the theory path it names, if any.
pub struct NetFile {
    pub net: Net,
    pub theory_path: Option<String>,
}

/// Parses a net. Cell operations are resolved in `theory` when given,
/// otherwise in the theory named by the file's `theory` line, loaded
/// through `load`.
pub fn parse_net(
    text: &str,
    theory: Option<&Theory>,
    load: &mut dyn FnMut(&str) -> Result<Theory>,
) -> Result<NetFile> {
    let mut loaded: Option<Theory> = None;
    let mut theory_path = None;
    let mut dom = None;
    let mut cod = None;
    let mut cells: Vec<(usize, CellId, String)> = Vec::new();
    let mut wires: Vec<(usize, PortRef, PortRef)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = i + 1;
        let err = |msg: String| Error::Line { line: lineno, msg };
        let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match kw {
            "theory" => {
                theory_path = Some(rest.to_string());
                if theory.is_none() {
                    loaded = Some(load(rest).map_err(|e| err(e.to_string()))?);
                }
            }
            "dom" | "cod" => {
                let th = theory.or(loaded.as_ref());
                let f = parse_formula(rest, th.map(|t| &t.signature.sorts)).map_err(|e| err(e.to_string()))?;
                if kw == "dom" {
                    dom = Some(f);
                } else {
                    cod = Some(f);
                }
            }
            "cell" => {
                let w: Vec<&str> = rest.split_whitespace().collect();
                if w.len() != 2 {
                    return Err(err("expected `cell <id> <op>`".into()));
                }
                let id: CellId = w[0].parse().map_err(|_| err(format!("bad cell id `{}`", w[0])))?;
                cells.push((lineno, id, w[1].to_string()));
            }
            "wire" => {
                let (a, b) = rest
                    .split_once("->")
                    .ok_or_else(|| err("expected `wire <port> -> <port>`".into()))?;
                let pa = parse_portref(a.trim()).ok_or_else(|| err(format!("bad port `{}`", a.trim())))?;
                let pb = parse_portref(b.trim()).ok_or_else(|| err(format!("bad port `{}`", b.trim())))?;
                wires.push((lineno, pa, pb));
            }
            _ => return Err(err(format!("unrecognised line `{line}`"))),
        }
    }
    let th = theory.or(loaded.as_ref());
    let dom = dom.ok_or_else(|| Error::Line { line: 0, msg: "missing `dom`".into() })?;
    let cod = cod.ok_or_else(|| Error::Line { line: 0, msg: "missing `cod`".into() })?;
    let mut net = Net::new(dom, cod);
    for (line, id, op) in cells {
        let th = th.ok_or_else(|| Error::Line {
            line,
            msg: "cells need a theory".into(),
        })?;
        let ty = th.signature.op(&op).map_err(|e| Error::Line { line, msg: e.to_string() })?;
        if net.cells.contains_key(&id) {
            return Err(Error::Line {
                line,
                msg: format!("duplicate cell id {id}"),
            });
        }
        net.cells.insert(
            id,
            crate::net::Cell {
                op,
                dom: ty.dom.clone(),
                cod: ty.cod.clone(),
            },
        );
    }
    for (line, a, b) in wires {
        for p in [a, b] {
            net.port_info(p).map_err(|e| Error::Line { line, msg: e.to_string() })?;
        }
        net.wire(a, b);
    }
    Ok(NetFile { net, theory_path })
}

pub fn print_net(net: &Net, theory_path: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(p) = theory_path {
        out.push_str(&format!("theory {p}\n"));
    }
    out.push_str(&format!("dom {}\ncod {}\n", net.dom, net.cod));
    for (id, c) in &net.cells {
        out.push_str(&format!("cell {id} {}\n", c.op));
    }
    for (s, t) in &net.wires {
        out.push_str(&format!("wire {s} -> {t}\n"));
    }
    out
}
