//! The economized representation: commutative monoids become fan-in,
//! non-empty comonoid trees become fan-out, and `w . nu` cancels.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::formula::Polarity;
use crate::net::{CellId, Net, PortRef, WiringMode};
use crate::signature::Theory;

use super::rewiring::rewiring_canonical;

/// A net in collapsed form, with the wiring discipline it lives in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollapsedNet {
    pub net: Net,
    pub mode: WiringMode,
}

impl CollapsedNet {
    pub fn is_correct(&self) -> bool {
        self.net.is_correct(&self.mode)
    }
}

enum Role {
    Mul,
    Unit,
    Copy,
    Discard,
    Nu(String),
    Other,
}

fn role(t: &Theory, op: &str) -> Role {
    if t.monoids.iter().any(|m| m.mul == op) {
        Role::Mul
    } else if t.monoids.iter().any(|m| m.unit == op) {
        Role::Unit
    } else if t.comonoids.iter().any(|c| c.copy == op) {
        Role::Copy
    } else if t.comonoids.iter().any(|c| c.discard == op) {
        Role::Discard
    } else if let Some(n) = t.nus.iter().find(|n| n.nu == op) {
        Role::Nu(n.discard.clone())
    } else {
        Role::Other
    }
}

struct Collapser<'a> {
    net: Net,
    theory: &'a Theory,
    /// Unit sources whose wires had to be moved.
    touched: BTreeSet<PortRef>,
}

impl Collapser<'_> {
    fn single_target(&self, p: PortRef) -> Result<PortRef> {
        self.net
            .wires_from(p)
            .next()
            .ok_or_else(|| Error::IllFormedNet(format!("{p} has no outgoing wire")))
    }

    /// Moves every wire entering `p` to `to`.
    fn redirect_into(&mut self, p: PortRef, to: PortRef) {
        let sources: Vec<PortRef> = self.net.wires_into(p).collect();
        for s in sources {
            self.net.wires.remove(&(s, p));
            self.net.wires.insert((s, to));
            if self.net.port_info(s).is_ok_and(|i| i.sort.is_none()) {
                self.touched.insert(s);
            }
        }
    }

    fn sort_source(&self, p: PortRef) -> Result<PortRef> {
        self.net
            .wires_into(p)
            .find(|s| self.net.port_info(*s).is_ok_and(|i| i.sort.is_some()))
            .ok_or_else(|| Error::IllFormedNet(format!("{p} receives no wire of its sort")))
    }

    fn is_discard_dom(&self, p: PortRef) -> bool {
        p.loc.cell().is_some_and(|c| {
            matches!(role(self.theory, &self.net.cells[&c].op), Role::Discard) && p == PortRef::cell_dom(c, 0)
        })
    }

    fn step(&mut self, id: CellId) -> Result<bool> {
        let op = self.net.cells[&id].op.clone();
        match role(self.theory, &op) {
            Role::Mul => {
                let target = self.single_target(PortRef::cell_cod(id, 0))?;
                for i in 0..2 {
                    self.redirect_into(PortRef::cell_dom(id, i), target);
                }
                self.net.remove_cell(id);
            }
            Role::Unit => {
                let target = self.single_target(PortRef::cell_cod(id, 0))?;
                self.redirect_into(PortRef::cell_dom(id, 0), target);
                self.net.remove_cell(id);
            }
            Role::Copy => {
                let src = self.sort_source(PortRef::cell_dom(id, 0))?;
                let outs: Vec<PortRef> = (0..2)
                    .flat_map(|j| self.net.wires_from(PortRef::cell_cod(id, j)).collect::<Vec<_>>())
                    .collect();
                let first = *outs
                    .first()
                    .ok_or_else(|| Error::IllFormedNet(format!("copy cell {id} is unused")))?;
                self.net.wires.remove(&(src, PortRef::cell_dom(id, 0)));
                self.redirect_into(PortRef::cell_dom(id, 0), first);
                for x in outs {
                    self.net.wires.insert((src, x));
                }
                self.net.remove_cell(id);
            }
            Role::Discard => {
                let me = PortRef::cell_dom(id, 0);
                let src = self.sort_source(me)?;
                let others: Vec<PortRef> = self.net.wires_from(src).filter(|&p| p != me).collect();
                let redundant = others
                    .iter()
                    .any(|&p| !self.is_discard_dom(p) || p.loc.cell().is_some_and(|c| c < id));
                if !redundant {
                    return Ok(false);
                }
                let target = self.single_target(PortRef::cell_cod(id, 0))?;
                self.net.wires.remove(&(src, me));
                self.redirect_into(me, target);
                self.net.remove_cell(id);
            }
            Role::Nu(discard) => {
                let uses: Vec<PortRef> = self.net.wires_from(PortRef::cell_cod(id, 0)).collect();
                let [only] = uses.as_slice() else { return Ok(false) };
                let Some(w) = only.loc.cell() else { return Ok(false) };
                if self.net.cells[&w].op != discard || *only != PortRef::cell_dom(w, 0) {
                    return Ok(false);
                }
                let target = self.single_target(PortRef::cell_cod(w, 0))?;
                if target.loc.cell() == Some(id) {
                    // The discard's unit wire loops back into the restriction.
                    let tail = self.fallback_target(&[id, w]);
                    self.redirect_into(PortRef::cell_dom(id, 0), tail);
                    self.net.remove_cell(w);
                    self.net.remove_cell(id);
                    return Ok(true);
                }
                self.redirect_into(PortRef::cell_dom(id, 0), target);
                self.redirect_into(PortRef::cell_dom(w, 0), target);
                self.net.remove_cell(w);
                self.net.remove_cell(id);
            }
            Role::Other => return Ok(false),
        }
        Ok(true)
    }

    /// Some positive port not on the given cells, for wires that lose
    /// their target; the final repair moves it if needed.
    fn fallback_target(&self, avoid: &[CellId]) -> PortRef {
        self.net
            .ports()
            .into_iter()
            .find(|(p, i)| i.polarity == Polarity::Positive && !p.loc.cell().is_some_and(|c| avoid.contains(&c)))
            .map(|(p, _)| p)
            .expect("a net has a positive boundary port")
    }

    /// Retargets the touched unit wires until the net is correct.
    fn repair(&mut self, mode: &WiringMode) -> Result<()> {
        if self.net.is_correct(mode) {
            return Ok(());
        }
        let sources: Vec<PortRef> = self
            .touched
            .iter()
            .copied()
            .filter(|s| self.net.port_info(*s).is_ok())
            .collect();
        let targets: Vec<PortRef> = self
            .net
            .ports()
            .into_iter()
            .filter(|(_, i)| i.polarity == Polarity::Positive)
            .map(|(p, _)| p)
            .collect();
        let mut base = self.net.clone();
        base.wires.retain(|(s, _)| !sources.contains(s));
        if let Some(n) = assign_units(&base, &sources, &targets, mode) {
            self.net = n;
            return Ok(());
        }
        Err(Error::Internal("collapsed net admits no correct unit wiring".into()))
    }
}

/// Backtracking search for targets of the given unit sources making the
/// net correct.
pub(crate) fn assign_units(base: &Net, sources: &[PortRef], targets: &[PortRef], mode: &WiringMode) -> Option<Net> {
    let Some((&s, rest)) = sources.split_first() else {
        return base.is_correct(mode).then(|| base.clone());
    };
    for &t in targets {
        let mut n = base.clone();
        n.wire(s, t);
        if let Some(done) = assign_units(&n, rest, targets, mode) {
            return Some(done);
        }
    }
    None
}

/// Collapses a correct net over `t` into its economized form.
pub fn collapse(n: &Net, t: &Theory) -> Result<CollapsedNet> {
    let mode = t.wiring_mode();
    let mut c = Collapser {
        net: n.clone(),
        theory: t,
        touched: BTreeSet::new(),
    };
    loop {
        let mut changed = false;
        let ids: Vec<CellId> = c.net.cells.keys().copied().collect();
        for id in ids {
            if c.net.cells.contains_key(&id) && c.step(id)? {
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    c.repair(&mode)?;
    Ok(CollapsedNet { net: c.net, mode })
}

/// Isomorphism of rewiring-canonical forms.
pub fn collapsed_equal(f: &CollapsedNet, g: &CollapsedNet) -> bool {
    f.net.dom == g.net.dom
        && f.net.cod == g.net.cod
        && f.net.op_counts() == g.net.op_counts()
        && rewiring_canonical(&f.net, &f.mode) == rewiring_canonical(&g.net, &g.mode)
}
