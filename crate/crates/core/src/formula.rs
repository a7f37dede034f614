//! IMLL formulae over a set of sorts.
//!
//! A formula's leaves (atoms and units) are its *ports*. Ports are addressed
//! by their index in left-to-right leaf order, which is the total order used
//! by every downstream structure (nets, file formats, translations).

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// A sort name.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sort(pub String);

impl Sort {
    pub fn new(name: impl Into<String>) -> Self {
        Sort(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub(crate) fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(is_ident_char)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(Sort),
    Unit,
    Tensor(Box<Formula>, Box<Formula>),
    Lollipop(Box<Formula>, Box<Formula>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }

    pub fn is_positive(self) -> bool {
        self == Polarity::Positive
    }
}

/// One leaf of a formula: its sort (`None` for `I`) and its polarity in the
/// formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leaf {
    pub sort: Option<Sort>,
    pub polarity: Polarity,
}

impl Leaf {
    pub fn is_unit(&self) -> bool {
        self.sort.is_none()
    }
}

/// A port of a formula, i.e. a leaf index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Port(pub usize);

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(Sort::new(name))
    }

    pub fn tensor(a: Formula, b: Formula) -> Formula {
        Formula::Tensor(Box::new(a), Box::new(b))
    }

    pub fn lollipop(a: Formula, b: Formula) -> Formula {
        Formula::Lollipop(Box::new(a), Box::new(b))
    }

    /// Right-nested tensor of the given factors; the empty tensor is `I`.
    pub fn tensor_all(factors: Vec<Formula>) -> Formula {
        let mut it = factors.into_iter().rev();
        match it.next() {
            None => Formula::Unit,
            Some(last) => it.fold(last, |acc, f| Formula::tensor(f, acc)),
        }
    }

    /// `n` copies of an atom, right-nested; `I` for zero.
    pub fn power(sort: &str, n: usize) -> Formula {
        Formula::tensor_all((0..n).map(|_| Formula::atom(sort)).collect())
    }

    /// `A -o B`, dropping the implication when `A` is the unit.
    pub fn lollipop_normalized(a: Formula, b: Formula) -> Formula {
        if a == Formula::Unit {
            b
        } else {
            Formula::lollipop(a, b)
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Unit => 1,
            Formula::Tensor(a, b) | Formula::Lollipop(a, b) => a.leaf_count() + b.leaf_count(),
        }
    }

    /// All leaves in left-to-right order with their polarities.
    pub fn leaves(&self) -> Vec<Leaf> {
        let mut out = Vec::with_capacity(self.leaf_count());
        self.collect_leaves(Polarity::Positive, &mut out);
        out
    }

    fn collect_leaves(&self, pol: Polarity, out: &mut Vec<Leaf>) {
        match self {
            Formula::Atom(s) => out.push(Leaf {
                sort: Some(s.clone()),
                polarity: pol,
            }),
            Formula::Unit => out.push(Leaf {
                sort: None,
                polarity: pol,
            }),
            Formula::Tensor(a, b) => {
                a.collect_leaves(pol, out);
                b.collect_leaves(pol, out);
            }
            Formula::Lollipop(a, b) => {
                a.collect_leaves(pol.flip(), out);
                b.collect_leaves(pol, out);
            }
        }
    }

    pub fn polarity(&self, port: Port) -> Result<Polarity> {
        self.leaves()
            .get(port.0)
            .map(|l| l.polarity)
            .ok_or(Error::PortOutOfRange {
                index: port.0,
                leaves: self.leaf_count(),
            })
    }

    pub fn sorts(&self) -> BTreeSet<Sort> {
        self.leaves().into_iter().filter_map(|l| l.sort).collect()
    }

    pub fn is_tensor(&self) -> bool {
        matches!(self, Formula::Tensor(..))
    }

    /// Renames sorts leaf by leaf.
    pub fn map_sorts<E>(&self, f: &mut impl FnMut(&Sort) -> std::result::Result<Sort, E>) -> std::result::Result<Formula, E> {
        Ok(match self {
            Formula::Atom(s) => Formula::Atom(f(s)?),
            Formula::Unit => Formula::Unit,
            Formula::Tensor(a, b) => Formula::tensor(a.map_sorts(f)?, b.map_sorts(f)?),
            Formula::Lollipop(a, b) => Formula::lollipop(a.map_sorts(f)?, b.map_sorts(f)?),
        })
    }

    /// The classical linear logic view, or its de Morgan dual when `negate`.
    pub fn classicalize(&self, negate: bool) -> ClassicalFormula {
        use ClassicalFormula as C;
        match (self, negate) {
            (Formula::Atom(s), false) => C::PosAtom(s.clone()),
            (Formula::Atom(s), true) => C::NegAtom(s.clone()),
            (Formula::Unit, false) => C::One,
            (Formula::Unit, true) => C::Bottom,
            (Formula::Tensor(a, b), false) => {
                C::Tensor(Box::new(a.classicalize(false)), Box::new(b.classicalize(false)))
            }
            (Formula::Tensor(a, b), true) => {
                C::Par(Box::new(a.classicalize(true)), Box::new(b.classicalize(true)))
            }
            (Formula::Lollipop(a, b), false) => {
                C::Par(Box::new(a.classicalize(true)), Box::new(b.classicalize(false)))
            }
            (Formula::Lollipop(a, b), true) => {
                C::Tensor(Box::new(a.classicalize(false)), Box::new(b.classicalize(true)))
            }
        }
    }
}

/// Parses a formula: `F ::= sort | I | F * F | F -o F | ( F )`, with `*`
/// binding tighter than `-o`, `*` left-associative and `-o`
/// right-associative. When `sorts` is given, atoms must belong to it.
pub fn parse_formula(text: &str, sorts: Option<&BTreeSet<Sort>>) -> Result<Formula> {
    let mut p = FormulaParser {
        src: text,
        pos: 0,
        sorts,
    };
    let f = p.lollipop()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

struct FormulaParser<'a> {
    src: &'a str,
    pos: usize,
    sorts: Option<&'a BTreeSet<Sort>>,
}

impl FormulaParser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn lollipop(&mut self) -> Result<Formula> {
        let lhs = self.tensor()?;
        if self.eat("-o") {
            let rhs = self.lollipop()?;
            Ok(Formula::lollipop(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn tensor(&mut self) -> Result<Formula> {
        let mut acc = self.atom()?;
        while self.eat("*") {
            let rhs = self.atom()?;
            acc = Formula::tensor(acc, rhs);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Formula> {
        if self.eat("(") {
            let f = self.lollipop()?;
            if !self.eat(")") {
                return Err(self.error("expected ')'"));
            }
            return Ok(f);
        }
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let len: usize = rest
            .chars()
            .take_while(|&c| is_ident_char(c))
            .map(char::len_utf8)
            .sum();
        if len == 0 {
            return Err(self.error("expected a sort, 'I' or '('"));
        }
        let name = &rest[..len];
        self.pos += len;
        if name == "I" {
            return Ok(Formula::Unit);
        }
        let sort = Sort::new(name);
        if let Some(sorts) = self.sorts {
            if !sorts.contains(&sort) {
                return Err(Error::UnknownSort(name.to_string()));
            }
        }
        Ok(Formula::Atom(sort))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // precedence: 0 = lollipop context, 1 = tensor operand
        fn go(x: &Formula, f: &mut fmt::Formatter<'_>, ctx: u8, right_of_tensor: bool) -> fmt::Result {
            match x {
                Formula::Atom(s) => write!(f, "{s}"),
                Formula::Unit => f.write_str("I"),
                Formula::Tensor(a, b) => {
                    let paren = right_of_tensor;
                    if paren {
                        f.write_str("(")?;
                    }
                    go(a, f, 1, false)?;
                    f.write_str(" * ")?;
                    go(b, f, 1, true)?;
                    if paren {
                        f.write_str(")")?;
                    }
                    Ok(())
                }
                Formula::Lollipop(a, b) => {
                    let paren = ctx >= 1;
                    if paren {
                        f.write_str("(")?;
                    }
                    match **a {
                        Formula::Lollipop(..) => {
                            f.write_str("(")?;
                            go(a, f, 0, false)?;
                            f.write_str(")")?;
                        }
                        _ => go(a, f, 0, false)?,
                    }
                    f.write_str(" -o ")?;
                    go(b, f, 0, false)?;
                    if paren {
                        f.write_str(")")?;
                    }
                    Ok(())
                }
            }
        }
        go(self, f, 0, false)
    }
}

/// Classical multiplicative formulae, used to build switchings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassicalFormula {
    PosAtom(Sort),
    NegAtom(Sort),
    One,
    Bottom,
    Tensor(Box<ClassicalFormula>, Box<ClassicalFormula>),
    Par(Box<ClassicalFormula>, Box<ClassicalFormula>),
}

impl ClassicalFormula {
    pub fn par_count(&self) -> usize {
        match self {
            ClassicalFormula::Tensor(a, b) => a.par_count() + b.par_count(),
            ClassicalFormula::Par(a, b) => 1 + a.par_count() + b.par_count(),
            _ => 0,
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            ClassicalFormula::Tensor(a, b) | ClassicalFormula::Par(a, b) => a.leaf_count() + b.leaf_count(),
            _ => 1,
        }
    }

    /// Leaves in order; `true` for `PosAtom` and `One`.
    pub fn leaf_signs(&self) -> Vec<bool> {
        let mut out = Vec::new();
        fn go(c: &ClassicalFormula, out: &mut Vec<bool>) {
            match c {
                ClassicalFormula::PosAtom(_) | ClassicalFormula::One => out.push(true),
                ClassicalFormula::NegAtom(_) | ClassicalFormula::Bottom => out.push(false),
                ClassicalFormula::Tensor(a, b) | ClassicalFormula::Par(a, b) => {
                    go(a, out);
                    go(b, out);
                }
            }
        }
        go(self, &mut out);
        out
    }
}

impl fmt::Display for ClassicalFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassicalFormula::PosAtom(s) => write!(f, "{s}"),
            ClassicalFormula::NegAtom(s) => write!(f, "{s}^"),
            ClassicalFormula::One => f.write_str("1"),
            ClassicalFormula::Bottom => f.write_str("bot"),
            ClassicalFormula::Tensor(a, b) => write!(f, "({a} * {b})"),
            ClassicalFormula::Par(a, b) => write!(f, "({a} | {b})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Formula {
        parse_formula(s, None).unwrap()
    }

    #[test]
    fn parses_nested_lollipops() {
        let a = Formula::atom("a");
        let expected = Formula::lollipop(
            Formula::lollipop(Formula::lollipop(a, Formula::Unit), Formula::Unit),
            Formula::Unit,
        );
        assert_eq!(p("((a -o I) -o I) -o I"), expected);
        assert_eq!(p("a"), Formula::atom("a"));
        assert_eq!(
            p("v * (v -o t)"),
            Formula::tensor(Formula::atom("v"), Formula::lollipop(Formula::atom("v"), Formula::atom("t")))
        );
    }

    #[test]
    fn associativity_and_precedence() {
        assert_eq!(p("a * b * c"), Formula::tensor(Formula::tensor(p("a"), p("b")), p("c")));
        assert_eq!(p("a -o b -o c"), Formula::lollipop(p("a"), Formula::lollipop(p("b"), p("c"))));
        assert_eq!(p("a * b -o c"), Formula::lollipop(p("a * b"), p("c")));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_formula("a * ", None), Err(Error::Syntax { .. })));
        assert!(matches!(parse_formula("(a", None), Err(Error::Syntax { .. })));
        let sorts: BTreeSet<Sort> = [Sort::new("a")].into();
        assert!(matches!(parse_formula("b", Some(&sorts)), Err(Error::UnknownSort(_))));
    }

    #[test]
    fn polarities_of_the_triple_negation() {
        let f = p("((a -o I) -o I) -o I");
        let pols: Vec<_> = f.leaves().iter().map(|l| l.polarity).collect();
        use Polarity::*;
        assert_eq!(pols, vec![Negative, Positive, Negative, Positive]);
        assert_eq!(p("a").polarity(Port(0)).unwrap(), Positive);
        assert!(f.polarity(Port(4)).is_err());
    }

    #[test]
    fn classical_views() {
        let f = p("((a -o I) -o I) -o I");
        assert_eq!(f.classicalize(false).to_string(), "(((a^ | 1) * bot) | 1)");
        assert_eq!(p("a").classicalize(true), ClassicalFormula::NegAtom(Sort::new("a")));
        assert_eq!(p("v * (v -o t)").classicalize(true).to_string(), "(v^ | (v * t^))");
    }

    pub(crate) fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            Just(Formula::Unit),
            Just(Formula::atom("a")),
            Just(Formula::atom("b")),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::tensor(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| Formula::lollipop(a, b)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_roundtrip(f in arb_formula()) {
            prop_assert_eq!(parse_formula(&f.to_string(), None).unwrap(), f);
        }

        #[test]
        fn polarity_matches_classical_sign(f in arb_formula()) {
            let signs = f.classicalize(false).leaf_signs();
            let pols: Vec<bool> = f.leaves().iter().map(|l| l.polarity.is_positive()).collect();
            prop_assert_eq!(&signs, &pols);
            let neg: Vec<bool> = f.classicalize(true).leaf_signs();
            prop_assert_eq!(neg, pols.iter().map(|b| !b).collect::<Vec<_>>());
            prop_assert_eq!(f.classicalize(true).leaf_count(), f.leaf_count());
        }
    }
}
