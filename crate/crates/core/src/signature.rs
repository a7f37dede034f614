//! SMC signatures, signature morphisms and theories.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::formula::{Formula, Sort};
use crate::net::{Net, WiringMode};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpType {
    pub dom: Formula,
    pub cod: Formula,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SmcSignature {
    pub sorts: BTreeSet<Sort>,
    pub ops: BTreeMap<String, OpType>,
}

impl SmcSignature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_sort(mut self, name: &str) -> Self {
        self.sorts.insert(Sort::new(name));
        self
    }

    pub fn with_op(mut self, name: &str, dom: Formula, cod: Formula) -> Self {
        self.ops.insert(name.to_string(), OpType { dom, cod });
        self
    }

    pub fn op(&self, name: &str) -> Result<&OpType> {
        self.ops
            .get(name)
            .ok_or_else(|| Error::UnknownOperation(name.to_string()))
    }

    fn check_formula(&self, f: &Formula, ctx: &str) -> Result<()> {
        for s in f.sorts() {
            if !self.sorts.contains(&s) {
                return Err(Error::InvalidTheory(format!("{ctx}: sort `{s}` is not declared")));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        for (name, ty) in &self.ops {
            self.check_formula(&ty.dom, &format!("operation `{name}`"))?;
            self.check_formula(&ty.cod, &format!("operation `{name}`"))?;
        }
        Ok(())
    }
}

/// A renaming of sorts together with a renaming of operations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SignatureMorphism {
    pub sort_map: BTreeMap<Sort, Sort>,
    pub op_map: BTreeMap<String, String>,
}

impl SignatureMorphism {
    pub fn identity(sig: &SmcSignature) -> Self {
        SignatureMorphism {
            sort_map: sig.sorts.iter().map(|s| (s.clone(), s.clone())).collect(),
            op_map: sig.ops.keys().map(|k| (k.clone(), k.clone())).collect(),
        }
    }

    /// The action on formulae: rename every atom.
    pub fn apply(&self, f: &Formula) -> Result<Formula> {
        f.map_sorts(&mut |s| {
            self.sort_map
                .get(s)
                .cloned()
                .ok_or_else(|| Error::UnknownSort(s.to_string()))
        })
    }

    /// Checks that every mapped operation lands on an operation of the
    /// renamed type.
    pub fn check(&self, source: &SmcSignature, target: &SmcSignature) -> Result<()> {
        for (name, ty) in &source.ops {
            let image = self
                .op_map
                .get(name)
                .ok_or_else(|| Error::UnknownOperation(name.clone()))?;
            let tty = target.op(image)?;
            if self.apply(&ty.dom)? != tty.dom || self.apply(&ty.cod)? != tty.cod {
                return Err(Error::InvalidTheory(format!(
                    "operation `{name}` is not sent to an operation of the renamed type"
                )));
            }
        }
        Ok(())
    }
}

pub fn apply_signature_morphism(m: &SignatureMorphism, f: &Formula) -> Result<Formula> {
    m.apply(f)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub name: String,
    pub lhs: Net,
    pub rhs: Net,
}

/// A commutative monoid `(mul, unit)` on a sort.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct MonoidDecl {
    pub sort: Sort,
    pub mul: String,
    pub unit: String,
}

/// A commutative comonoid `(copy, discard)` on a sort.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ComonoidDecl {
    pub sort: Sort,
    pub copy: String,
    pub discard: String,
}

/// A name restriction `nu : I -> v` with `discard . nu = id_I`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct NuDecl {
    pub nu: String,
    pub discard: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Theory {
    pub signature: SmcSignature,
    pub equations: Vec<Equation>,
    pub monoids: Vec<MonoidDecl>,
    pub comonoids: Vec<ComonoidDecl>,
    pub nus: Vec<NuDecl>,
}

impl Theory {
    pub fn from_signature(signature: SmcSignature) -> Self {
        Theory {
            signature,
            ..Default::default()
        }
    }

    /// The wiring discipline of collapsed nets over this theory.
    pub fn wiring_mode(&self) -> WiringMode {
        WiringMode {
            monoid: self.monoids.iter().map(|m| m.sort.clone()).collect(),
            comonoid: self.comonoids.iter().map(|c| c.sort.clone()).collect(),
        }
    }

    /// Operations absorbed into multi-wires by the economized representation.
    pub fn collapsed_ops(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for m in &self.monoids {
            out.insert(m.mul.clone());
            out.insert(m.unit.clone());
        }
        for c in &self.comonoids {
            out.insert(c.copy.clone());
        }
        out
    }

    /// Operations mentioned by a monoid, comonoid or restriction declaration.
    pub fn structural_ops(&self) -> BTreeSet<String> {
        let mut out = self.collapsed_ops();
        for c in &self.comonoids {
            out.insert(c.discard.clone());
        }
        for n in &self.nus {
            out.insert(n.nu.clone());
            out.insert(n.discard.clone());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        validate_theory(self)
    }
}

fn expect_shape(sig: &SmcSignature, op: &str, dom: &Formula, cod: &Formula, what: &str) -> Result<()> {
    let ty = sig
        .op(op)
        .map_err(|_| Error::InvalidTheory(format!("{what}: operation `{op}` is not declared")))?;
    if &ty.dom != dom || &ty.cod != cod {
        return Err(Error::InvalidTheory(format!(
            "{what}: operation `{op}` has type {} -> {}, expected {} -> {}",
            ty.dom, ty.cod, dom, cod
        )));
    }
    Ok(())
}

pub fn validate_theory(t: &Theory) -> Result<()> {
    t.signature.validate()?;
    for m in &t.monoids {
        let x = Formula::Atom(m.sort.clone());
        let what = format!("monoid on `{}`", m.sort);
        expect_shape(&t.signature, &m.mul, &Formula::tensor(x.clone(), x.clone()), &x, &what)?;
        expect_shape(&t.signature, &m.unit, &Formula::Unit, &x, &what)?;
    }
    for c in &t.comonoids {
        let x = Formula::Atom(c.sort.clone());
        let what = format!("comonoid on `{}`", c.sort);
        expect_shape(&t.signature, &c.copy, &x, &Formula::tensor(x.clone(), x.clone()), &what)?;
        expect_shape(&t.signature, &c.discard, &x, &Formula::Unit, &what)?;
    }
    for n in &t.nus {
        let what = format!("restriction `{}`", n.nu);
        let ty = t
            .signature
            .op(&n.nu)
            .map_err(|_| Error::InvalidTheory(format!("{what}: operation `{}` is not declared", n.nu)))?;
        let Formula::Atom(v) = &ty.cod else {
            return Err(Error::InvalidTheory(format!("{what}: codomain must be a sort")));
        };
        expect_shape(&t.signature, &n.nu, &Formula::Unit, &Formula::Atom(v.clone()), &what)?;
        expect_shape(&t.signature, &n.discard, &Formula::Atom(v.clone()), &Formula::Unit, &what)?;
    }
    let structural = t.structural_ops();
    for eq in &t.equations {
        if eq.lhs.dom != eq.rhs.dom || eq.lhs.cod != eq.rhs.cod {
            return Err(Error::InvalidTheory(format!(
                "equation `{}`: sides have different boundaries",
                eq.name
            )));
        }
        for side in [&eq.lhs, &eq.rhs] {
            for cell in side.cells.values() {
                if structural.contains(&cell.op) {
                    return Err(Error::InvalidTheory(format!(
                        "equation `{}` mentions `{}`, which is declared structural",
                        eq.name, cell.op
                    )));
                }
                let ty = t.signature.op(&cell.op).map_err(|_| {
                    Error::InvalidTheory(format!("equation `{}`: unknown operation `{}`", eq.name, cell.op))
                })?;
                if ty.dom != cell.dom || ty.cod != cell.cod {
                    return Err(Error::InvalidTheory(format!(
                        "equation `{}`: cell `{}` has the wrong type",
                        eq.name, cell.op
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Parses a `.sth` theory file. `load_net` resolves the net files named by
/// `eq` lines; it receives the path as written and the signature so far.
pub fn parse_theory(
    text: &str,
    load_net: &mut dyn FnMut(&str, &Theory) -> Result<Net>,
) -> Result<Theory> {
    let mut t = Theory::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Line { line: i + 1, msg };
        let words: Vec<&str> = line.split_whitespace().collect();
        match words[0] {
            "sort" if words.len() == 2 => {
                if !crate::formula::is_ident(words[1]) || words[1] == "I" {
                    return Err(err(format!("bad sort name `{}`", words[1])));
                }
                t.signature.sorts.insert(Sort::new(words[1]));
            }
            "op" => {
                let rest = line[2..].trim();
                let (name, ty) = rest
                    .split_once(':')
                    .ok_or_else(|| err("expected `op <name> : <formula> -> <formula>`".into()))?;
                let name = name.trim();
                let (dom, cod) = ty
                    .split_once("->")
                    .ok_or_else(|| err("expected `->` in operation type".into()))?;
                let dom = crate::formula::parse_formula(dom.trim(), Some(&t.signature.sorts))
                    .map_err(|e| err(e.to_string()))?;
                let cod = crate::formula::parse_formula(cod.trim(), Some(&t.signature.sorts))
                    .map_err(|e| err(e.to_string()))?;
                if t.signature.ops.contains_key(name) {
                    return Err(err(format!("duplicate operation `{name}`")));
                }
                t.signature.ops.insert(name.to_string(), OpType { dom, cod });
            }
            "monoid" if words.len() == 4 => t.monoids.push(MonoidDecl {
                sort: Sort::new(words[1]),
                mul: words[2].into(),
                unit: words[3].into(),
            }),
            "comonoid" if words.len() == 4 => t.comonoids.push(ComonoidDecl {
                sort: Sort::new(words[1]),
                copy: words[2].into(),
                discard: words[3].into(),
            }),
            "nu" if words.len() == 3 => t.nus.push(NuDecl {
                nu: words[1].into(),
                discard: words[2].into(),
            }),
            "eq" => {
                // eq <name> : <lhs> = <rhs>
                let rest = line[2..].trim();
                let (name, sides) = rest
                    .split_once(':')
                    .ok_or_else(|| err("expected `eq <name> : <net> = <net>`".into()))?;
                let (l, r) = sides
                    .split_once('=')
                    .ok_or_else(|| err("expected `=` between equation sides".into()))?;
                let lhs = load_net(l.trim(), &t).map_err(|e| err(e.to_string()))?;
                let rhs = load_net(r.trim(), &t).map_err(|e| err(e.to_string()))?;
                t.equations.push(Equation {
                    name: name.trim().to_string(),
                    lhs,
                    rhs,
                });
            }
            _ => return Err(err(format!("unrecognised line `{line}`"))),
        }
    }
    Ok(t)
}

/// Prints the signature part and declarations of a theory. Equations are
/// printed as `eq` lines naming `<name>.lhs.snet` / `<name>.rhs.snet`.
pub fn print_theory(t: &Theory) -> String {
    let mut out = String::new();
    for s in &t.signature.sorts {
        out.push_str(&format!("sort {s}\n"));
    }
    for (name, ty) in &t.signature.ops {
        out.push_str(&format!("op {name} : {} -> {}\n", ty.dom, ty.cod));
    }
    for m in &t.monoids {
        out.push_str(&format!("monoid {} {} {}\n", m.sort, m.mul, m.unit));
    }
    for c in &t.comonoids {
        out.push_str(&format!("comonoid {} {} {}\n", c.sort, c.copy, c.discard));
    }
    for n in &t.nus {
        out.push_str(&format!("nu {} {}\n", n.nu, n.discard));
    }
    for e in &t.equations {
        out.push_str(&format!("eq {0} : {0}.lhs.snet = {0}.rhs.snet\n", e.name));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s, None).unwrap()
    }

    #[test]
    fn morphism_renames_sorts() {
        let mut m = SignatureMorphism::default();
        m.sort_map.insert(Sort::new("a"), Sort::new("b"));
        assert_eq!(m.apply(&f("(a -o I) * a")).unwrap(), f("(b -o I) * b"));
        assert!(matches!(m.apply(&f("c")), Err(Error::UnknownSort(_))));
        let sig = SmcSignature::new().with_sort("v").with_sort("t");
        let id = SignatureMorphism::identity(&sig);
        assert_eq!(id.apply(&f("v * (v -o t)")).unwrap(), f("v * (v -o t)"));
    }

    #[test]
    fn morphism_preserves_polarities() {
        let mut m = SignatureMorphism::default();
        m.sort_map.insert(Sort::new("a"), Sort::new("z"));
        m.sort_map.insert(Sort::new("b"), Sort::new("z"));
        let src = f("((a -o b) -o I) * (b -o a)");
        let img = m.apply(&src).unwrap();
        let p1: Vec<_> = src.leaves().iter().map(|l| l.polarity).collect();
        let p2: Vec<_> = img.leaves().iter().map(|l| l.polarity).collect();
        assert_eq!(p1, p2);
    }

    #[test]
    fn monoid_op_in_equation_is_rejected() {
        let sig = SmcSignature::new()
            .with_sort("t")
            .with_op("m", f("t * t"), f("t"))
            .with_op("e", f("I"), f("t"));
        let mut t = Theory::from_signature(sig.clone());
        t.monoids.push(MonoidDecl {
            sort: Sort::new("t"),
            mul: "m".into(),
            unit: "e".into(),
        });
        assert!(validate_theory(&t).is_ok());
        let lhs = crate::smc::embed_operation(&sig, "m").unwrap();
        t.equations.push(Equation {
            name: "extra".into(),
            lhs: lhs.clone(),
            rhs: lhs,
        });
        let e = validate_theory(&t).unwrap_err();
        assert!(e.to_string().contains("`m`"), "{e}");
    }

    #[test]
    fn wrong_shapes_are_rejected() {
        let sig = SmcSignature::new().with_sort("t").with_op("m", f("t"), f("t"));
        let mut t = Theory::from_signature(sig);
        t.monoids.push(MonoidDecl {
            sort: Sort::new("t"),
            mul: "m".into(),
            unit: "e".into(),
        });
        assert!(validate_theory(&t).is_err());
    }

    #[test]
    fn theory_text_roundtrip() {
        let text = "sort t\nsort v\nop app : t * t -> t\nop lam : v -o t -> t\nop c : v -> v * v\nop w : v -> I\ncomonoid v c w\n";
        let t = parse_theory(text, &mut |_, _| unreachable!()).unwrap();
        assert_eq!(t.signature.ops.len(), 4);
        assert!(t.validate().is_ok());
        let again = parse_theory(&print_theory(&t), &mut |_, _| unreachable!()).unwrap();
        assert_eq!(again, t);
    }
}
