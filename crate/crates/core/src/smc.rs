//! Identities, composition, tensor, structural isomorphisms, currying and
//! the embedding of operations as one-cell nets.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::formula::{Formula, Polarity};
use crate::net::{Cell, CellId, Loc, Net, PortRef, WiringMode};
use crate::signature::SmcSignature;

/// Connects two ports known to have opposite polarities.
fn link(net: &mut Net, a: PortRef, b: PortRef) {
    net.connect(a, b).expect("ports of opposite polarity");
}

pub fn identity(a: &Formula) -> Net {
    let mut net = Net::new(a.clone(), a.clone());
    for i in 0..a.leaf_count() {
        link(&mut net, PortRef::dom(i), PortRef::cod(i));
    }
    net
}

/// The multi-wire sorts some of the nets actually use.
fn observed_mode(nets: &[&Net]) -> WiringMode {
    let mut mode = WiringMode::strict();
    for n in nets {
        let mut outs: BTreeMap<PortRef, usize> = BTreeMap::new();
        let mut ins: BTreeMap<PortRef, usize> = BTreeMap::new();
        for &(s, t) in &n.wires {
            *outs.entry(s).or_default() += 1;
            *ins.entry(t).or_default() += 1;
        }
        for (p, k) in outs {
            if let (true, Ok(Some(sort))) = (k > 1, n.port_info(p).map(|i| i.sort)) {
                mode.comonoid.insert(sort);
            }
        }
        for (p, k) in ins {
            if let (true, Ok(Some(sort))) = (k > 1, n.port_info(p).map(|i| i.sort)) {
                mode.monoid.insert(sort);
            }
        }
    }
    mode
}

/// `g . f`: glues `f`'s codomain to `g`'s domain and collapses paths
/// through the middle ports.
pub fn compose(g: &Net, f: &Net) -> Result<Net> {
    if f.cod != g.dom {
        return Err(Error::BoundaryMismatch(format!(
            "cannot compose: codomain {} is not domain {}",
            f.cod, g.dom
        )));
    }
    let nf = f.cells.len() as CellId;
    let fmap: BTreeMap<CellId, CellId> = f.cells.keys().enumerate().map(|(i, &c)| (c, i as CellId)).collect();
    let gmap: BTreeMap<CellId, CellId> = g.cells.keys().enumerate().map(|(i, &c)| (c, nf + i as CellId)).collect();
    let re = |p: PortRef, map: &BTreeMap<CellId, CellId>| PortRef {
        loc: match p.loc {
            Loc::CellDom(c) => Loc::CellDom(map[&c]),
            Loc::CellCod(c) => Loc::CellCod(map[&c]),
            l => l,
        },
        index: p.index,
    };
    let mut out = Net::new(f.dom.clone(), g.cod.clone());
    for (c, cell) in &f.cells {
        out.cells.insert(fmap[c], cell.clone());
    }
    for (c, cell) in &g.cells {
        out.cells.insert(gmap[c], cell.clone());
    }

    // Side false = f, true = g. A middle port is `f.cod.i` / `g.dom.i`.
    fn ends(
        f: &Net,
        g: &Net,
        side: bool,
        target: PortRef,
        seen: &mut BTreeSet<(bool, usize)>,
        acc: &mut Vec<(bool, PortRef)>,
    ) -> Result<()> {
        let middle = if side { target.loc == Loc::Dom } else { target.loc == Loc::Cod };
        if !middle {
            acc.push((side, target));
            return Ok(());
        }
        if !seen.insert((side, target.index)) {
            return Err(Error::Internal("cycle through the middle of a composite".into()));
        }
        // Continue on the other side, out of the same middle leaf.
        let next: Vec<PortRef> = if side {
            f.wires_from(PortRef::cod(target.index)).collect()
        } else {
            g.wires_from(PortRef::dom(target.index)).collect()
        };
        for t in next {
            ends(f, g, !side, t, seen, acc)?;
        }
        seen.remove(&(side, target.index));
        Ok(())
    }

    let mut jumps = Vec::new();
    for (side, net) in [(false, f), (true, g)] {
        for &(s, t) in &net.wires {
            let s_middle = if side { s.loc == Loc::Dom } else { s.loc == Loc::Cod };
            if s_middle {
                continue;
            }
            let mut acc = Vec::new();
            ends(f, g, side, t, &mut BTreeSet::new(), &mut acc)?;
            let src = re(s, if side { &gmap } else { &fmap });
            // A unit wire into a fanned-out middle port jumps to one copy.
            if acc.len() > 1 && net.port_info(s)?.sort.is_none() {
                acc.truncate(1);
                jumps.push(src);
            }
            for (tside, tp) in acc {
                out.wire(src, re(tp, if tside { &gmap } else { &fmap }));
            }
        }
    }
    let mode = observed_mode(&[f, g]);
    if !jumps.is_empty() && !out.is_correct(&mode) {
        let targets: Vec<PortRef> = out
            .ports()
            .into_iter()
            .filter(|(_, i)| i.polarity.is_positive())
            .map(|(p, _)| p)
            .collect();
        let mut base = out.clone();
        base.wires.retain(|(s, _)| !jumps.contains(s));
        if let Some(n) = crate::equivalence::assign_units(&base, &jumps, &targets, &mode) {
            return Ok(n);
        }
    }
    Ok(out)
}

pub fn tensor(f: &Net, g: &Net) -> Net {
    let fd = f.dom.leaf_count();
    let fc = f.cod.leaf_count();
    let off = f.next_cell_id();
    let mut out = Net::new(
        Formula::tensor(f.dom.clone(), g.dom.clone()),
        Formula::tensor(f.cod.clone(), g.cod.clone()),
    );
    out.cells = f.cells.clone();
    out.wires = f.wires.clone();
    for (c, cell) in &g.cells {
        out.cells.insert(off + c, cell.clone());
    }
    let shift = |p: PortRef| match p.loc {
        Loc::Dom => PortRef::dom(p.index + fd),
        Loc::Cod => PortRef::cod(p.index + fc),
        Loc::CellDom(c) => PortRef::cell_dom(off + c, p.index),
        Loc::CellCod(c) => PortRef::cell_cod(off + c, p.index),
    };
    for &(s, t) in &g.wires {
        out.wire(shift(s), shift(t));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Structural {
    /// `A * B -> B * A`
    Sym(Formula, Formula),
    /// `(A * B) * C -> A * (B * C)`
    Assoc(Formula, Formula, Formula),
    AssocInv(Formula, Formula, Formula),
    /// `I * A -> A`
    LUnit(Formula),
    LUnitInv(Formula),
    /// `A * I -> A`
    RUnit(Formula),
    RUnitInv(Formula),
}

/// The leaf-pairing nets. The orphan unit of a unitor is wired to the first
/// positive leaf of `A` that keeps the net correct.
pub fn structural(kind: &Structural) -> Net {
    use Structural::*;
    let t = Formula::tensor;
    let (dom, cod, pairs, orphan): (Formula, Formula, Vec<(usize, usize)>, Option<usize>) = match kind {
        Sym(a, b) => {
            let (na, nb) = (a.leaf_count(), b.leaf_count());
            let mut pairs: Vec<_> = (0..na).map(|i| (i, nb + i)).collect();
            pairs.extend((0..nb).map(|j| (na + j, j)));
            (t(a.clone(), b.clone()), t(b.clone(), a.clone()), pairs, None)
        }
        Assoc(a, b, c) | AssocInv(a, b, c) => {
            let n = a.leaf_count() + b.leaf_count() + c.leaf_count();
            let left = t(t(a.clone(), b.clone()), c.clone());
            let right = t(a.clone(), t(b.clone(), c.clone()));
            let pairs = (0..n).map(|i| (i, i)).collect();
            if matches!(kind, Assoc(..)) {
                (left, right, pairs, None)
            } else {
                (right, left, pairs, None)
            }
        }
        LUnit(a) => {
            let pairs = (0..a.leaf_count()).map(|i| (i + 1, i)).collect();
            (t(Formula::Unit, a.clone()), a.clone(), pairs, Some(0))
        }
        LUnitInv(a) => {
            let pairs = (0..a.leaf_count()).map(|i| (i, i + 1)).collect();
            (a.clone(), t(Formula::Unit, a.clone()), pairs, None)
        }
        RUnit(a) => {
            let n = a.leaf_count();
            (t(a.clone(), Formula::Unit), a.clone(), (0..n).map(|i| (i, i)).collect(), Some(n))
        }
        RUnitInv(a) => {
            let n = a.leaf_count();
            (a.clone(), t(a.clone(), Formula::Unit), (0..n).map(|i| (i, i)).collect(), None)
        }
    };
    let mut net = Net::new(dom, cod);
    for (d, c) in pairs {
        link(&mut net, PortRef::dom(d), PortRef::cod(c));
    }
    if let Some(o) = orphan {
        let positives: Vec<usize> = net
            .cod
            .leaves()
            .iter()
            .enumerate()
            .filter(|(_, l)| l.polarity == Polarity::Positive)
            .map(|(i, _)| i)
            .collect();
        let mode = WiringMode::strict();
        let chosen = positives
            .iter()
            .copied()
            .find(|&i| {
                let mut cand = net.clone();
                cand.wire(PortRef::dom(o), PortRef::cod(i));
                cand.is_correct(&mode)
            })
            .unwrap_or(positives[0]);
        net.wire(PortRef::dom(o), PortRef::cod(chosen));
    }
    net
}

/// `f : A * B -> C` to `A -> (B -o C)`. Polarities are unchanged, so the
/// wires carry over under reindexing.
pub fn curry(f: &Net) -> Result<Net> {
    let Formula::Tensor(a, b) = &f.dom else {
        return Err(Error::NotATensor(format!("domain {} is not a tensor", f.dom)));
    };
    let na = a.leaf_count();
    let nb = b.leaf_count();
    let cod = Formula::lollipop((**b).clone(), f.cod.clone());
    Ok(f.map_ports((**a).clone(), cod, |p| match p.loc {
        Loc::Dom if p.index >= na => PortRef::cod(p.index - na),
        Loc::Cod => PortRef::cod(p.index + nb),
        _ => p,
    }))
}

/// `g : A -> (B -o C)` to `A * B -> C`.
pub fn uncurry(g: &Net) -> Result<Net> {
    let Formula::Lollipop(b, c) = &g.cod else {
        return Err(Error::NotATensor(format!("codomain {} is not a lollipop", g.cod)));
    };
    let na = g.dom.leaf_count();
    let nb = b.leaf_count();
    let dom = Formula::tensor(g.dom.clone(), (**b).clone());
    Ok(g.map_ports(dom, (**c).clone(), |p| match p.loc {
        Loc::Cod if p.index < nb => PortRef::dom(na + p.index),
        Loc::Cod => PortRef::cod(p.index - nb),
        _ => p,
    }))
}

/// The one-cell net of an operation.
pub fn embed_operation(sig: &SmcSignature, op: &str) -> Result<Net> {
    let ty = sig.op(op)?;
    let mut net = Net::new(ty.dom.clone(), ty.cod.clone());
    let c = net.add_cell(op, ty.dom.clone(), ty.cod.clone());
    for i in 0..ty.dom.leaf_count() {
        link(&mut net, PortRef::dom(i), PortRef::cell_dom(c, i));
    }
    for j in 0..ty.cod.leaf_count() {
        link(&mut net, PortRef::cell_cod(c, j), PortRef::cod(j));
    }
    Ok(net)
}

/// Splits `f` as `f2 . f1` where `f1` holds exactly the cells `c1`.
///
/// `f1 : A -> D` curries each cell of `c1` (in id order) next to the
/// identity on `A`, with `D = ((A1 -o B1) * ...) * A`; `f2 : D -> B` is `f`
/// with those cells replaced by the matching leaves of `D`.
pub fn decompose(f: &Net, c1: &BTreeSet<CellId>) -> Result<(Net, Net)> {
    for c in c1 {
        if !f.cells.contains_key(c) {
            return Err(Error::IllFormedNet(format!("no cell {c} in the net")));
        }
    }
    if c1.is_empty() {
        return Ok((identity(&f.dom), f.clone()));
    }
    if c1.len() == f.cells.len() {
        return Ok((f.clone(), identity(&f.cod)));
    }
    let chosen: Vec<(CellId, &Cell)> = c1.iter().map(|c| (*c, &f.cells[c])).collect();
    let curried = Formula::tensor_all(
        chosen
            .iter()
            .map(|(_, cell)| Formula::lollipop(cell.dom.clone(), cell.cod.clone()))
            .collect(),
    );
    let middle = Formula::tensor(curried.clone(), f.dom.clone());
    let na = f.dom.leaf_count();
    let offset_a = curried.leaf_count();

    // Leaf of D standing for each port of a chosen cell.
    let mut leaf_of: BTreeMap<PortRef, usize> = BTreeMap::new();
    let mut next = 0;
    for (c, cell) in &chosen {
        for i in 0..cell.dom.leaf_count() {
            leaf_of.insert(PortRef::cell_dom(*c, i), next);
            next += 1;
        }
        for j in 0..cell.cod.leaf_count() {
            leaf_of.insert(PortRef::cell_cod(*c, j), next);
            next += 1;
        }
    }

    let mut f1 = Net::new(f.dom.clone(), middle.clone());
    for (c, cell) in &chosen {
        f1.cells.insert(*c, (*cell).clone());
    }
    for (&p, &leaf) in &leaf_of {
        link(&mut f1, p, PortRef::cod(leaf));
    }
    for i in 0..na {
        link(&mut f1, PortRef::dom(i), PortRef::cod(offset_a + i));
    }

    let mut f2 = Net::new(middle, f.cod.clone());
    for (c, cell) in &f.cells {
        if !c1.contains(c) {
            f2.cells.insert(*c, cell.clone());
        }
    }
    let re = |p: PortRef| match p.loc {
        Loc::Dom => PortRef::dom(offset_a + p.index),
        _ => leaf_of.get(&p).map_or(p, |&l| PortRef::dom(l)),
    };
    for &(s, t) in &f.wires {
        f2.wire(re(s), re(t));
    }
    Ok((f1, f2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::net::isomorphic;

    fn fm(s: &str) -> Formula {
        parse_formula(s, None).unwrap()
    }

    fn pi_sig() -> SmcSignature {
        SmcSignature::new()
            .with_sort("v")
            .with_sort("t")
            .with_op("s", fm("v * (v * t)"), fm("t"))
            .with_op("g", fm("v * (v -o t)"), fm("t"))
            .with_op("c", fm("v"), fm("v * v"))
            .with_op("k", Formula::Unit, Formula::Unit)
    }

    #[test]
    fn identity_wires_follow_polarity() {
        let id = identity(&fm("((a -o I) -o I) -o I"));
        assert!(id.is_correct(&WiringMode::strict()));
        // a is negative in the formula, so its codomain copy emits.
        assert!(id.wires.contains(&(PortRef::cod(0), PortRef::dom(0))));
        assert!(id.wires.contains(&(PortRef::dom(3), PortRef::cod(3))));
        let a = identity(&fm("a"));
        assert_eq!(a.wires.iter().copied().collect::<Vec<_>>(), vec![(PortRef::dom(0), PortRef::cod(0))]);
    }

    #[test]
    fn unitor_round_trip_is_not_identity() {
        let a = fm("a");
        let rho = structural(&Structural::RUnit(a.clone()));
        assert!(rho.wires.contains(&(PortRef::dom(1), PortRef::cod(0))));
        let eq1 = compose(&structural(&Structural::RUnitInv(a.clone())), &rho).unwrap();
        let expect: BTreeSet<_> = [(PortRef::dom(0), PortRef::cod(0)), (PortRef::dom(1), PortRef::cod(0))].into();
        assert_eq!(eq1.wires, expect);
        assert!(eq1.is_correct(&WiringMode::strict()));
        assert_ne!(eq1, identity(&fm("a * I")));
        // rho . rho^-1 is the identity on a.
        let back = compose(&rho, &structural(&Structural::RUnitInv(a.clone()))).unwrap();
        assert_eq!(back, identity(&a));
    }

    #[test]
    fn dead_end_unit_paths_are_dropped() {
        let mut f = Net::new(fm("a"), fm("a * I"));
        f.wire(PortRef::dom(0), PortRef::cod(0));
        let rho = structural(&Structural::RUnit(fm("a")));
        assert_eq!(compose(&rho, &f).unwrap(), identity(&fm("a")));
    }

    #[test]
    fn identity_laws() {
        let sig = pi_sig();
        for op in ["s", "g", "c", "k"] {
            let e = embed_operation(&sig, op).unwrap();
            assert!(e.is_correct(&WiringMode::strict()), "{op}");
            assert!(isomorphic(&compose(&identity(&e.cod), &e).unwrap(), &e));
            assert!(isomorphic(&compose(&e, &identity(&e.dom)).unwrap(), &e));
        }
    }

    #[test]
    fn get_cell_binder_flows_out_of_the_cell() {
        let g = embed_operation(&pi_sig(), "g").unwrap();
        assert!(g.wires.contains(&(PortRef::cell_dom(0, 1), PortRef::dom(1))));
    }

    #[test]
    fn tensor_of_identities_and_cells() {
        assert_eq!(tensor(&identity(&fm("a")), &identity(&fm("b"))), identity(&fm("a * b")));
        let sig = pi_sig();
        let sg = tensor(&embed_operation(&sig, "s").unwrap(), &embed_operation(&sig, "g").unwrap());
        assert_eq!(sg.cells.len(), 2);
        assert_eq!(sg.cod, fm("t * t"));
        assert!(sg.is_correct(&WiringMode::strict()));
    }

    #[test]
    fn structural_nets_are_correct() {
        let (a, b, c) = (fm("a -o I"), fm("b"), fm("I * c"));
        for k in [
            Structural::Sym(a.clone(), b.clone()),
            Structural::Assoc(a.clone(), b.clone(), c.clone()),
            Structural::AssocInv(a.clone(), b.clone(), c.clone()),
            Structural::LUnit(a.clone()),
            Structural::LUnitInv(a.clone()),
            Structural::RUnit(c.clone()),
            Structural::RUnitInv(c.clone()),
        ] {
            assert!(structural(&k).is_correct(&WiringMode::strict()), "{k:?}");
        }
    }

    #[test]
    fn curry_and_evaluation() {
        let ev = uncurry(&identity(&fm("a -o b"))).unwrap();
        assert_eq!(ev.dom, fm("(a -o b) * a"));
        assert_eq!(ev.cod, fm("b"));
        assert!(ev.is_correct(&WiringMode::strict()));
        let s = embed_operation(&pi_sig(), "s").unwrap();
        let cs = curry(&s).unwrap();
        assert_eq!(cs.dom, fm("v"));
        assert_eq!(cs.cod, fm("v * t -o t"));
        assert!(cs.is_correct(&WiringMode::strict()));
        assert_eq!(uncurry(&cs).unwrap(), s);
        assert!(matches!(curry(&identity(&fm("a"))), Err(Error::NotATensor(_))));
    }
}
