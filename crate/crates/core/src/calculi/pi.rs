//! π-like process terms with holes, and their nets over the `pi` theory.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::net::{Net, PortRef};

use super::builtin_theory;
use super::lambda::wire_units;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PiTerm {
    Zero,
    Par(Box<PiTerm>, Box<PiTerm>),
    Send { subject: String, payload: String, cont: Box<PiTerm> },
    Get { subject: String, binder: String, cont: Box<PiTerm> },
    Nu { binder: String, cont: Box<PiTerm> },
    Hole(usize),
}

impl PiTerm {
    pub fn par(a: PiTerm, b: PiTerm) -> Self {
        PiTerm::Par(Box::new(a), Box::new(b))
    }

    fn free_names(&self, bound: &mut Vec<String>, acc: &mut BTreeSet<String>) {
        let mut note = |x: &String, bound: &Vec<String>| {
            if !bound.contains(x) {
                acc.insert(x.clone());
            }
        };
        match self {
            PiTerm::Zero | PiTerm::Hole(_) => {}
            PiTerm::Par(a, b) => {
                a.free_names(bound, acc);
                b.free_names(bound, acc);
            }
            PiTerm::Send { subject, payload, cont } => {
                note(subject, bound);
                note(payload, bound);
                cont.free_names(bound, acc);
            }
            PiTerm::Get { subject, binder, cont } => {
                note(subject, bound);
                bound.push(binder.clone());
                cont.free_names(bound, acc);
                bound.pop();
            }
            PiTerm::Nu { binder, cont } => {
                bound.push(binder.clone());
                cont.free_names(bound, acc);
                bound.pop();
            }
        }
    }

    /// Names each hole sees bound around it.
    fn hole_scopes(&self, bound: &mut Vec<String>, acc: &mut BTreeMap<usize, Vec<Vec<String>>>) {
        match self {
            PiTerm::Zero => {}
            PiTerm::Hole(k) => acc.entry(*k).or_default().push(bound.clone()),
            PiTerm::Par(a, b) => {
                a.hole_scopes(bound, acc);
                b.hole_scopes(bound, acc);
            }
            PiTerm::Send { cont, .. } => cont.hole_scopes(bound, acc),
            PiTerm::Get { binder, cont, .. } | PiTerm::Nu { binder, cont } => {
                bound.push(binder.clone());
                cont.hole_scopes(bound, acc);
                bound.pop();
            }
        }
    }
}

impl fmt::Display for PiTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn prefix_body(t: &PiTerm, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if matches!(t, PiTerm::Par(..)) {
                write!(f, "({t})")
            } else {
                write!(f, "{t}")
            }
        }
        match self {
            PiTerm::Zero => f.write_str("0"),
            PiTerm::Hole(k) => write!(f, "[{k}]"),
            PiTerm::Par(a, b) => {
                write!(f, "{a} | ")?;
                prefix_body(b, f)
            }
            PiTerm::Send { subject, payload, cont } => {
                write!(f, "send {subject} {payload}. ")?;
                prefix_body(cont, f)
            }
            PiTerm::Get { subject, binder, cont } => {
                write!(f, "get {subject}({binder}). ")?;
                prefix_body(cont, f)
            }
            PiTerm::Nu { binder, cont } => {
                write!(f, "nu {binder}. ")?;
                prefix_body(cont, f)
            }
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.pos += self.src[self.pos..].len() - self.src[self.pos..].trim_start().len();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.peek();
        let start = self.pos;
        while self.src[self.pos..].starts_with(crate::formula::is_ident_char) {
            self.pos += self.src[self.pos..].chars().next().unwrap().len_utf8();
        }
        if start == self.pos {
            return Err(self.err("expected a name"));
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn process(&mut self) -> Result<PiTerm> {
        let mut t = self.prefixed()?;
        while self.peek() == Some('|') {
            self.eat('|')?;
            t = PiTerm::par(t, self.prefixed()?);
        }
        Ok(t)
    }

    fn cont(&mut self) -> Result<PiTerm> {
        self.eat('.')?;
        self.prefixed()
    }

    fn prefixed(&mut self) -> Result<PiTerm> {
        match self.peek() {
            Some('(') => {
                self.eat('(')?;
                let t = self.process()?;
                self.eat(')')?;
                Ok(t)
            }
            Some('[') => {
                self.eat('[')?;
                self.peek();
                let start = self.pos;
                while self.src[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let k = self.src[start..self.pos].parse().map_err(|_| self.err("expected a hole number"))?;
                self.eat(']')?;
                Ok(PiTerm::Hole(k))
            }
            Some('0') => {
                self.pos += 1;
                Ok(PiTerm::Zero)
            }
            Some(_) => {
                let kw = self.ident()?;
                match kw.as_str() {
                    "send" => {
                        let subject = self.ident()?;
                        let payload = self.ident()?;
                        let cont = if self.peek() == Some('.') { self.cont()? } else { PiTerm::Zero };
                        Ok(PiTerm::Send {
                            subject,
                            payload,
                            cont: Box::new(cont),
                        })
                    }
                    "get" => {
                        let subject = self.ident()?;
                        self.eat('(')?;
                        let binder = self.ident()?;
                        self.eat(')')?;
                        Ok(PiTerm::Get {
                            subject,
                            binder,
                            cont: Box::new(self.cont()?),
                        })
                    }
                    "nu" => {
                        let binder = self.ident()?;
                        Ok(PiTerm::Nu {
                            binder,
                            cont: Box::new(self.cont()?),
                        })
                    }
                    other => Err(self.err(format!("unexpected `{other}`"))),
                }
            }
            None => Err(self.err("unexpected end of process")),
        }
    }
}

/// Parses `send a b. P` (continuation optional), `get a(x). P`, `nu x. P`,
/// `P | Q`, `0` and `[k]`. Prefixes bind tighter than `|`.
pub fn parse_pi(text: &str) -> Result<PiTerm> {
    let mut p = Parser { src: text, pos: 0 };
    let t = p.process()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(t)
}

/// Which names the holes may use: `global` names are available to every
/// hole through one leaf each; `holes[k]` lists the names hole `k` gets
/// on its own leaves.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HoleInterface {
    pub global: Vec<String>,
    pub holes: Vec<Vec<String>>,
}

impl HoleInterface {
    /// `v^g -o ((v^n0 -o t) * ...)`, with empty powers and tensors dropped.
    pub fn formula(&self) -> Formula {
        let factors = self
            .holes
            .iter()
            .map(|names| Formula::lollipop_normalized(Formula::power("v", names.len()), Formula::atom("t")))
            .collect();
        Formula::lollipop_normalized(Formula::power("v", self.global.len()), Formula::tensor_all(factors))
    }
}

struct Encoder<'a> {
    net: Net,
    iface: &'a HoleInterface,
    /// First leaf of each hole in the domain.
    hole_offset: Vec<usize>,
    used_holes: BTreeSet<usize>,
}

impl Encoder<'_> {
    fn name(env: &[(String, PortRef)], x: &str) -> Result<PortRef> {
        env.iter()
            .rev()
            .find(|(n, _)| n == x)
            .map(|(_, p)| *p)
            .ok_or_else(|| Error::InvalidTerm(format!("name `{x}` is not in scope")))
    }

    fn bind_unused(&mut self, src: PortRef) {
        if self.net.wires_from(src).next().is_none() {
            let w = self.net.add_cell("w", Formula::atom("v"), Formula::Unit);
            self.net.wire(src, PortRef::cell_dom(w, 0));
        }
    }

    fn process(&mut self, p: &PiTerm, target: PortRef, env: &mut Vec<(String, PortRef)>) -> Result<()> {
        match p {
            PiTerm::Zero => {}
            PiTerm::Par(a, b) => {
                self.process(a, target, env)?;
                self.process(b, target, env)?;
            }
            PiTerm::Send { subject, payload, cont } => {
                let c = self.net.add_cell("s", parse("v * (v * t)"), Formula::atom("t"));
                self.net.wire(Self::name(env, subject)?, PortRef::cell_dom(c, 0));
                self.net.wire(Self::name(env, payload)?, PortRef::cell_dom(c, 1));
                self.process(cont, PortRef::cell_dom(c, 2), env)?;
                self.net.wire(PortRef::cell_cod(c, 0), target);
            }
            PiTerm::Get { subject, binder, cont } => {
                let c = self.net.add_cell("g", parse("v * (v -o t)"), Formula::atom("t"));
                self.net.wire(Self::name(env, subject)?, PortRef::cell_dom(c, 0));
                let x = PortRef::cell_dom(c, 1);
                env.push((binder.clone(), x));
                let r = self.process(cont, PortRef::cell_dom(c, 2), env);
                env.pop();
                r?;
                self.bind_unused(x);
                self.net.wire(PortRef::cell_cod(c, 0), target);
            }
            PiTerm::Nu { binder, cont } => {
                let c = self.net.add_cell("nu", Formula::Unit, Formula::atom("v"));
                let x = PortRef::cell_cod(c, 0);
                env.push((binder.clone(), x));
                let r = self.process(cont, target, env);
                env.pop();
                r?;
                if self.net.wires_from(x).next().is_none() {
                    self.net.remove_cell(c);
                }
            }
            PiTerm::Hole(k) => {
                let names = self
                    .iface
                    .holes
                    .get(*k)
                    .ok_or_else(|| Error::InvalidTerm(format!("hole [{k}] has no interface")))?;
                if !self.used_holes.insert(*k) {
                    return Err(Error::InvalidTerm(format!("hole [{k}] occurs twice")));
                }
                let off = self.hole_offset[*k];
                for (i, x) in names.iter().enumerate() {
                    self.net.wire(Self::name(env, x)?, PortRef::dom(off + i));
                }
                self.net.wire(PortRef::dom(off + names.len()), target);
            }
        }
        Ok(())
    }
}

fn parse(s: &str) -> Formula {
    crate::formula::parse_formula(s, None).expect("fixed formula")
}

/// The net `iface -> (v^fn -o t)` of a process, where `fn` are its free
/// names (including names only the interface mentions), sorted.
pub fn encode_pi(p: &PiTerm, iface: &HoleInterface) -> Result<Net> {
    let mut free = BTreeSet::new();
    p.free_names(&mut Vec::new(), &mut free);
    free.extend(iface.global.iter().cloned());
    let mut scopes = BTreeMap::new();
    p.hole_scopes(&mut Vec::new(), &mut scopes);
    for (k, names) in iface.holes.iter().enumerate() {
        let Some(s) = scopes.get(&k) else {
            return Err(Error::InvalidTerm(format!("hole [{k}] does not occur in the term")));
        };
        for x in names {
            if iface.global.contains(x) {
                return Err(Error::InvalidTerm(format!("hole [{k}] lists global name `{x}`")));
            }
            if !s[0].contains(x) {
                free.insert(x.clone());
            }
        }
    }
    let free: Vec<String> = free.into_iter().collect();
    let dom = iface.formula();
    let cod = Formula::lollipop_normalized(Formula::power("v", free.len()), Formula::atom("t"));
    let g = iface.global.len();
    let mut hole_offset = Vec::new();
    let mut off = g;
    for names in &iface.holes {
        hole_offset.push(off);
        off += names.len() + 1;
    }
    let mut enc = Encoder {
        net: Net::new(dom, cod),
        iface,
        hole_offset,
        used_holes: BTreeSet::new(),
    };
    let mut env: Vec<(String, PortRef)> = free.iter().enumerate().map(|(i, x)| (x.clone(), PortRef::cod(i))).collect();
    for (i, x) in iface.global.iter().enumerate() {
        let src = Encoder::name(&env, x)?;
        enc.net.wire(src, PortRef::dom(i));
    }
    enc.process(p, PortRef::cod(free.len()), &mut env)?;
    if enc.used_holes.len() != iface.holes.len() {
        return Err(Error::InvalidTerm("every hole in the interface must occur once".into()));
    }
    for i in 0..free.len() {
        enc.bind_unused(PortRef::cod(i));
    }
    let mode = builtin_theory("pi")?.wiring_mode();
    wire_units(&enc.net.compact(), &mode)
}
