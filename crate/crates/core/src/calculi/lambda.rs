//! λ-terms with de Bruijn levels, their nets, and term enumerators.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::formula::{Formula, Polarity};
use crate::net::{Loc, Net, PortRef, WiringMode};

use super::builtin_theory;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LambdaTerm {
    /// De Bruijn level: 0 is the outermost binder.
    Var(usize),
    App(Box<LambdaTerm>, Box<LambdaTerm>),
    Lam(Box<LambdaTerm>),
    /// Context hole `k`, which may use the listed bound variables.
    Hole { index: usize, captured: Vec<usize> },
}

/// Which λ theory a term is encoded in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LambdaCalculus {
    /// `app : t * t -> t`, `lam : (t -o t) -> t`.
    Linear,
    /// Variables of sort `v`, used through `d : v -> t`, shared by fan-out.
    TwoSorted,
}

impl LambdaCalculus {
    pub fn theory_name(self) -> &'static str {
        match self {
            LambdaCalculus::Linear => "linear_lambda",
            LambdaCalculus::TwoSorted => "lambda_two_sorted",
        }
    }

    fn var_sort(self) -> &'static str {
        match self {
            LambdaCalculus::Linear => "t",
            LambdaCalculus::TwoSorted => "v",
        }
    }

    pub fn mode(self) -> WiringMode {
        builtin_theory(self.theory_name()).expect("built-in").wiring_mode()
    }
}

impl LambdaTerm {
    pub fn app(a: LambdaTerm, b: LambdaTerm) -> Self {
        LambdaTerm::App(Box::new(a), Box::new(b))
    }

    pub fn lam(body: LambdaTerm) -> Self {
        LambdaTerm::Lam(Box::new(body))
    }

    /// Number of constructors (holes count one).
    pub fn size(&self) -> usize {
        match self {
            LambdaTerm::Var(_) | LambdaTerm::Hole { .. } => 1,
            LambdaTerm::App(a, b) => 1 + a.size() + b.size(),
            LambdaTerm::Lam(b) => 1 + b.size(),
        }
    }

    pub fn app_count(&self) -> usize {
        match self {
            LambdaTerm::Var(_) | LambdaTerm::Hole { .. } => 0,
            LambdaTerm::App(a, b) => 1 + a.app_count() + b.app_count(),
            LambdaTerm::Lam(b) => b.app_count(),
        }
    }

    /// How often each level is used, counting hole captures.
    fn uses(&self, acc: &mut BTreeMap<usize, usize>) {
        match self {
            LambdaTerm::Var(l) => *acc.entry(*l).or_insert(0) += 1,
            LambdaTerm::Hole { captured, .. } => {
                for l in captured {
                    *acc.entry(*l).or_insert(0) += 1;
                }
            }
            LambdaTerm::App(a, b) => {
                a.uses(acc);
                b.uses(acc);
            }
            LambdaTerm::Lam(b) => b.uses(acc),
        }
    }

    fn hole_count(&self) -> usize {
        let mut h = Vec::new();
        self.holes(&mut h);
        h.len()
    }

    fn binder_count(&self) -> usize {
        match self {
            LambdaTerm::Var(_) | LambdaTerm::Hole { .. } => 0,
            LambdaTerm::App(a, b) => a.binder_count() + b.binder_count(),
            LambdaTerm::Lam(b) => 1 + b.binder_count(),
        }
    }

    fn closed_at(&self, depth: usize) -> bool {
        match self {
            LambdaTerm::Var(l) => *l < depth,
            LambdaTerm::Hole { captured, .. } => captured.iter().all(|l| *l < depth),
            LambdaTerm::App(a, b) => a.closed_at(depth) && b.closed_at(depth),
            LambdaTerm::Lam(b) => b.closed_at(depth + 1),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.closed_at(0)
    }

    /// Every binder is used exactly once.
    pub fn is_linear(&self) -> bool {
        fn check(t: &LambdaTerm, depth: usize) -> bool {
            match t {
                LambdaTerm::Var(_) | LambdaTerm::Hole { .. } => true,
                LambdaTerm::App(a, b) => check(a, depth) && check(b, depth),
                LambdaTerm::Lam(b) => {
                    let mut u = BTreeMap::new();
                    b.uses(&mut u);
                    u.get(&depth) == Some(&1) && check(b, depth + 1)
                }
            }
        }
        check(self, 0)
    }

    fn holes(&self, acc: &mut Vec<(usize, usize)>) {
        match self {
            LambdaTerm::Var(_) => {}
            LambdaTerm::Hole { index, captured } => acc.push((*index, captured.len())),
            LambdaTerm::App(a, b) => {
                a.holes(acc);
                b.holes(acc);
            }
            LambdaTerm::Lam(b) => b.holes(acc),
        }
    }
}

fn var_name(level: usize) -> String {
    const NAMES: [&str; 6] = ["x", "y", "z", "u", "v", "w"];
    NAMES.get(level).map_or_else(|| format!("x{level}"), |s| s.to_string())
}

impl fmt::Display for LambdaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &LambdaTerm, depth: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t {
                LambdaTerm::Var(l) => f.write_str(&var_name(*l)),
                LambdaTerm::Hole { index, captured } => {
                    write!(f, "[{index}")?;
                    if !captured.is_empty() {
                        let names: Vec<String> = captured.iter().map(|l| var_name(*l)).collect();
                        write!(f, ": {}", names.join(", "))?;
                    }
                    f.write_str("]")
                }
                LambdaTerm::Lam(b) => {
                    write!(f, "\\{}. ", var_name(depth))?;
                    go(b, depth + 1, f)
                }
                LambdaTerm::App(a, b) => {
                    if matches!(**a, LambdaTerm::Lam(_)) {
                        f.write_str("(")?;
                        go(a, depth, f)?;
                        f.write_str(")")?;
                    } else {
                        go(a, depth, f)?;
                    }
                    f.write_str(" ")?;
                    if matches!(**b, LambdaTerm::Lam(_) | LambdaTerm::App(..)) {
                        f.write_str("(")?;
                        go(b, depth, f)?;
                        f.write_str(")")
                    } else {
                        go(b, depth, f)
                    }
                }
            }
        }
        go(self, 0, f)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    scope: Vec<String>,
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
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
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !crate::formula::is_ident_char(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        if start == self.pos {
            return Err(self.err("expected an identifier"));
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn level_of(&self, name: &str) -> Result<usize> {
        self.scope
            .iter()
            .rposition(|n| n == name)
            .ok_or_else(|| Error::InvalidTerm(format!("unbound variable `{name}`")))
    }

    fn term(&mut self) -> Result<LambdaTerm> {
        if matches!(self.peek(), Some('\\') | Some('λ')) {
            let c = self.peek().unwrap();
            self.pos += c.len_utf8();
            let x = self.ident()?;
            self.eat('.')?;
            self.scope.push(x);
            let body = self.term();
            self.scope.pop();
            return Ok(LambdaTerm::lam(body?));
        }
        let mut t = self.atom()?;
        while let Some(c) = self.peek() {
            if c == ')' || c == ']' {
                break;
            }
            if c == '\\' || c == 'λ' {
                let arg = self.term()?;
                return Ok(LambdaTerm::app(t, arg));
            }
            t = LambdaTerm::app(t, self.atom()?);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<LambdaTerm> {
        match self.peek() {
            Some('(') => {
                self.eat('(')?;
                let t = self.term()?;
                self.eat(')')?;
                Ok(t)
            }
            Some('[') => {
                self.eat('[')?;
                self.skip_ws();
                let start = self.pos;
                while self.src[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let index = self.src[start..self.pos]
                    .parse()
                    .map_err(|_| self.err("expected a hole number"))?;
                let mut captured = Vec::new();
                if self.peek() == Some(':') {
                    self.eat(':')?;
                    loop {
                        let x = self.ident()?;
                        captured.push(self.level_of(&x)?);
                        if self.peek() != Some(',') {
                            break;
                        }
                        self.eat(',')?;
                    }
                }
                self.eat(']')?;
                Ok(LambdaTerm::Hole { index, captured })
            }
            Some(_) => {
                let x = self.ident()?;
                Ok(LambdaTerm::Var(self.level_of(&x)?))
            }
            None => Err(self.err("unexpected end of term")),
        }
    }
}

/// Parses `\x. e`, application by juxtaposition, and holes `[k]` or
/// `[k: x, y]` (hole `k` may use `x` and `y`). Free variables are rejected.
pub fn parse_lambda(text: &str) -> Result<LambdaTerm> {
    let mut p = Parser {
        src: text,
        pos: 0,
        scope: Vec::new(),
    };
    let t = p.term()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(t)
}

/// Domain of a context: one factor per hole, `x^m -o t` for a hole that
/// may use `m` variables of sort `x`.
fn hole_formula(calc: LambdaCalculus, m: usize) -> Formula {
    Formula::lollipop_normalized(Formula::power(calc.var_sort(), m), Formula::atom("t"))
}

struct Encoder {
    calc: LambdaCalculus,
    net: Net,
    hole_offset: Vec<usize>,
}

impl Encoder {
    fn term(&mut self, t: &LambdaTerm, env: &mut Vec<PortRef>) -> Result<PortRef> {
        Ok(match t {
            LambdaTerm::Var(l) => {
                let bound = env[*l];
                match self.calc {
                    LambdaCalculus::Linear => bound,
                    LambdaCalculus::TwoSorted => {
                        let d = self.net.add_cell("d", Formula::atom("v"), Formula::atom("t"));
                        self.net.wire(bound, PortRef::cell_dom(d, 0));
                        PortRef::cell_cod(d, 0)
                    }
                }
            }
            LambdaTerm::Hole { index, captured } => {
                let off = self.hole_offset[*index];
                for (i, l) in captured.iter().enumerate() {
                    self.net.wire(env[*l], PortRef::dom(off + i));
                }
                PortRef::dom(off + captured.len())
            }
            LambdaTerm::App(a, b) => {
                let c = self.net.add_cell("app", Formula::power("t", 2), Formula::atom("t"));
                let sa = self.term(a, env)?;
                self.net.wire(sa, PortRef::cell_dom(c, 0));
                let sb = self.term(b, env)?;
                self.net.wire(sb, PortRef::cell_dom(c, 1));
                PortRef::cell_cod(c, 0)
            }
            LambdaTerm::Lam(b) => {
                let dom = Formula::lollipop(Formula::atom(self.calc.var_sort()), Formula::atom("t"));
                let c = self.net.add_cell("lam", dom, Formula::atom("t"));
                let bound = PortRef::cell_dom(c, 0);
                env.push(bound);
                let sb = self.term(b, env)?;
                env.pop();
                self.net.wire(sb, PortRef::cell_dom(c, 1));
                if self.net.wires_from(bound).next().is_none() {
                    let w = self.net.add_cell("w", Formula::atom("v"), Formula::Unit);
                    self.net.wire(bound, PortRef::cell_dom(w, 0));
                }
                PortRef::cell_cod(c, 0)
            }
        })
    }
}

/// Targets for the unit sources of `net`, the first correct choice in port
/// order.
pub(crate) fn wire_units(net: &Net, mode: &WiringMode) -> Result<Net> {
    let ports = net.ports();
    let sources: Vec<PortRef> = ports
        .iter()
        .filter(|(p, i)| i.polarity == Polarity::Negative && i.sort.is_none() && net.wires_from(*p).next().is_none())
        .map(|(p, _)| *p)
        .collect();
    let targets: Vec<PortRef> = ports
        .iter()
        .filter(|(_, i)| i.polarity == Polarity::Positive)
        .map(|(p, _)| *p)
        .collect();
    crate::equivalence::assign_units(net, &sources, &targets, mode)
        .ok_or_else(|| Error::IllFormedNet("no unit wiring makes the net correct".into()))
}

/// The net of a closed term or context, `holes -> t`.
pub fn encode_lambda(t: &LambdaTerm, calc: LambdaCalculus) -> Result<Net> {
    if !t.is_closed() {
        return Err(Error::InvalidTerm(format!("{t} is not closed")));
    }
    if calc == LambdaCalculus::Linear && !t.is_linear() {
        return Err(Error::InvalidTerm(format!("{t} is not linear")));
    }
    let mut holes = Vec::new();
    t.holes(&mut holes);
    holes.sort();
    if holes.iter().enumerate().any(|(i, (k, _))| i != *k) {
        return Err(Error::InvalidTerm("holes must be numbered 0..n, each used once".into()));
    }
    let factors: Vec<Formula> = holes.iter().map(|(_, m)| hole_formula(calc, *m)).collect();
    let mut hole_offset = Vec::new();
    let mut off = 0;
    for f in &factors {
        hole_offset.push(off);
        off += f.leaf_count();
    }
    let mut enc = Encoder {
        calc,
        net: Net::new(Formula::tensor_all(factors), Formula::atom("t")),
        hole_offset,
    };
    let src = enc.term(t, &mut Vec::new())?;
    enc.net.wire(src, PortRef::cod(0));
    wire_units(&enc.net, &calc.mode())
}

fn flatten(f: &Formula) -> Vec<Formula> {
    match f {
        Formula::Unit => Vec::new(),
        Formula::Tensor(a, b) => {
            let mut v = vec![(**a).clone()];
            v.extend(flatten(b));
            v
        }
        other => vec![other.clone()],
    }
}

struct Decoder<'a> {
    net: &'a Net,
    calc: LambdaCalculus,
    /// Leaf range of each hole: (offset, captured count).
    holes: Vec<(usize, usize)>,
    binders: HashMap<PortRef, usize>,
    visited: usize,
}

impl Decoder<'_> {
    fn obstruction(msg: impl Into<String>) -> Error {
        Error::NotEncodable(msg.into())
    }

    fn source_into(&self, p: PortRef) -> Result<PortRef> {
        let mut it = self
            .net
            .wires_into(p)
            .filter(|s| self.net.port_info(*s).is_ok_and(|i| i.sort.is_some()));
        let s = it.next().ok_or_else(|| Self::obstruction(format!("{p} receives nothing")))?;
        Ok(s)
    }

    fn level(&self, src: PortRef) -> Result<usize> {
        self.binders
            .get(&src)
            .copied()
            .ok_or_else(|| Self::obstruction(format!("variable {src} used outside its binder")))
    }

    fn term(&mut self, src: PortRef, depth: usize) -> Result<LambdaTerm> {
        match src.loc {
            Loc::CellCod(c) => {
                self.visited += 1;
                let op = self.net.cells[&c].op.as_str();
                match op {
                    "app" => {
                        let a = self.source_into(PortRef::cell_dom(c, 0))?;
                        let b = self.source_into(PortRef::cell_dom(c, 1))?;
                        Ok(LambdaTerm::app(self.term(a, depth)?, self.term(b, depth)?))
                    }
                    "lam" => {
                        self.binders.insert(PortRef::cell_dom(c, 0), depth);
                        let body = self.source_into(PortRef::cell_dom(c, 1))?;
                        let t = self.term(body, depth + 1);
                        self.binders.remove(&PortRef::cell_dom(c, 0));
                        Ok(LambdaTerm::lam(t?))
                    }
                    "d" if self.calc == LambdaCalculus::TwoSorted => {
                        let v = self.source_into(PortRef::cell_dom(c, 0))?;
                        Ok(LambdaTerm::Var(self.level(v)?))
                    }
                    other => Err(Self::obstruction(format!("unexpected operation `{other}`"))),
                }
            }
            Loc::CellDom(_) if self.calc == LambdaCalculus::Linear => Ok(LambdaTerm::Var(self.level(src)?)),
            Loc::Dom => {
                let (index, &(off, m)) = self
                    .holes
                    .iter()
                    .enumerate()
                    .find(|(_, (off, m))| src.index == off + m)
                    .ok_or_else(|| Self::obstruction(format!("{src} is not a hole output")))?;
                let mut captured = Vec::new();
                for i in 0..m {
                    let v = self.source_into(PortRef::dom(off + i))?;
                    captured.push(self.level(v)?);
                }
                Ok(LambdaTerm::Hole { index, captured })
            }
            _ => Err(Self::obstruction(format!("{src} does not produce a term"))),
        }
    }
}

/// Reads a term back from a correct net `holes -> t`.
pub fn decode_net(n: &Net, calc: LambdaCalculus) -> Result<LambdaTerm> {
    n.correctness(&calc.mode())
        .map_err(|e| Error::NotEncodable(format!("not a correct net: {e}")))?;
    if n.cod != Formula::atom("t") {
        return Err(Error::NotEncodable(format!("codomain {} is not t", n.cod)));
    }
    let mut holes = Vec::new();
    let mut off = 0;
    for f in flatten(&n.dom) {
        let m = f.leaf_count() - 1;
        if f != hole_formula(calc, m) {
            return Err(Error::NotEncodable(format!("domain factor {f} is not a hole")));
        }
        holes.push((off, m));
        off += m + 1;
    }
    let mut d = Decoder {
        net: n,
        calc,
        holes,
        binders: HashMap::new(),
        visited: 0,
    };
    let root = d.source_into(PortRef::cod(0))?;
    let t = d.term(root, 0)?;
    let weakenings = n.cells.values().filter(|c| c.op == "w").count();
    if d.visited + weakenings != n.cells.len() {
        return Err(Error::NotEncodable("some cells are not part of the term".into()));
    }
    Ok(t)
}

/// Closed linear terms with exactly `n_apps` applications, in a fixed order.
pub fn enumerate_closed_linear_terms(n_apps: usize) -> Vec<LambdaTerm> {
    // Terms over the free levels in `free` (each used once), with `apps`
    // applications and `lams` abstractions, at binder depth `depth`.
    fn gen(free: &[usize], apps: usize, lams: usize, depth: usize) -> Vec<LambdaTerm> {
        let mut out = Vec::new();
        if free.len() == 1 && apps == 0 && lams == 0 {
            out.push(LambdaTerm::Var(free[0]));
        }
        if lams > 0 {
            let mut inner = free.to_vec();
            inner.push(depth);
            for b in gen(&inner, apps, lams - 1, depth + 1) {
                out.push(LambdaTerm::lam(b));
            }
        }
        if apps > 0 {
            let n = free.len();
            for mask in 0..1u32 << n {
                let left: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| free[i]).collect();
                let right: Vec<usize> = (0..n).filter(|i| mask & (1 << i) == 0).map(|i| free[i]).collect();
                for a1 in 0..apps {
                    let a2 = apps - 1 - a1;
                    for l1 in 0..=lams {
                        let l2 = lams - l1;
                        // Each side needs as many variable uses as binders plus free levels.
                        if a1 + 1 != left.len() + l1 || a2 + 1 != right.len() + l2 {
                            continue;
                        }
                        let ls = gen(&left, a1, l1, depth);
                        if ls.is_empty() {
                            continue;
                        }
                        let rs = gen(&right, a2, l2, depth);
                        for x in &ls {
                            for y in &rs {
                                out.push(LambdaTerm::app(x.clone(), y.clone()));
                            }
                        }
                    }
                }
            }
        }
        out
    }
    gen(&[], n_apps, n_apps + 1, 0)
}

/// Count of closed linear terms with `n_apps` applications, by a recurrence
/// on the number of free variables that is independent of the enumerator.
pub fn count_closed_linear_terms(n_apps: usize) -> u128 {
    fn binom(n: usize, k: usize) -> u128 {
        (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
    }
    // f(m, a): linear terms with m distinguishable free variables, a
    // applications, and therefore a + 1 - m abstractions.
    fn f(m: usize, a: usize, memo: &mut HashMap<(usize, usize), u128>) -> u128 {
        if m > a + 1 {
            return 0;
        }
        if let Some(&v) = memo.get(&(m, a)) {
            return v;
        }
        let mut total = u128::from(m == 1 && a == 0);
        if a + 1 > m {
            total += f(m + 1, a, memo);
        }
        if a > 0 {
            for m1 in 0..=m {
                for a1 in 0..a {
                    let l = f(m1, a1, memo);
                    if l == 0 {
                        continue;
                    }
                    total += binom(m, m1) * l * f(m - m1, a - 1 - a1, memo);
                }
            }
        }
        memo.insert((m, a), total);
        total
    }
    f(0, n_apps, &mut HashMap::new())
}

/// All closed λ-terms with exactly `size` constructors.
pub fn enumerate_closed_terms(size: usize) -> Vec<LambdaTerm> {
    fn gen(size: usize, depth: usize) -> Vec<LambdaTerm> {
        let mut out = Vec::new();
        if size == 1 {
            out.extend((0..depth).map(LambdaTerm::Var));
        }
        if size >= 2 {
            out.extend(gen(size - 1, depth + 1).into_iter().map(LambdaTerm::lam));
        }
        if size >= 3 {
            for s1 in 1..size - 1 {
                let ls = gen(s1, depth);
                let rs = gen(size - 1 - s1, depth);
                for a in &ls {
                    for b in &rs {
                        out.push(LambdaTerm::app(a.clone(), b.clone()));
                    }
                }
            }
        }
        out
    }
    gen(size, 0)
}

impl LambdaTerm {
    /// Cells of the term's net, not counting weakenings.
    pub fn cell_count(&self, calc: LambdaCalculus) -> usize {
        match calc {
            LambdaCalculus::Linear => self.app_count() + self.binder_count(),
            LambdaCalculus::TwoSorted => self.size() - self.hole_count(),
        }
    }
}
