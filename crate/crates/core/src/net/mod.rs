//! Linkings with cells, their well-formedness, and the Danos-Regnier
//! correctness criterion.
//!
//! Wires always run from a globally negative port to a globally positive
//! one. A codomain port keeps its polarity; a domain port flips it. Dually, a
//! cell `c : A -> B` keeps the polarities of `A` and flips those of `B`, so
//! it behaves like an assumption `A -o B`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::formula::{Formula, Leaf, Polarity, Sort};

mod dr;
pub mod dot;
pub mod iso;
pub mod text;

pub use dr::{Switching, Switchings, DEFAULT_SWITCHING_LIMIT_LOG2};
pub use iso::{canonical_form, isomorphic};

pub type CellId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Loc {
    Dom,
    Cod,
    CellDom(CellId),
    CellCod(CellId),
}

impl Loc {
    pub fn cell(self) -> Option<CellId> {
        match self {
            Loc::CellDom(c) | Loc::CellCod(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_boundary(self) -> bool {
        matches!(self, Loc::Dom | Loc::Cod)
    }

    /// Whether the located formula's polarities are flipped globally.
    fn flips(self) -> bool {
        matches!(self, Loc::Dom | Loc::CellCod(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PortRef {
    pub loc: Loc,
    pub index: usize,
}

impl PortRef {
    pub fn dom(index: usize) -> Self {
        PortRef { loc: Loc::Dom, index }
    }
    pub fn cod(index: usize) -> Self {
        PortRef { loc: Loc::Cod, index }
    }
    pub fn cell_dom(cell: CellId, index: usize) -> Self {
        PortRef {
            loc: Loc::CellDom(cell),
            index,
        }
    }
    pub fn cell_cod(cell: CellId, index: usize) -> Self {
        PortRef {
            loc: Loc::CellCod(cell),
            index,
        }
    }
}

impl fmt::Display for PortRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.loc {
            Loc::Dom => write!(f, "dom.{}", self.index),
            Loc::Cod => write!(f, "cod.{}", self.index),
            Loc::CellDom(c) => write!(f, "cell.{c}.dom.{}", self.index),
            Loc::CellCod(c) => write!(f, "cell.{c}.cod.{}", self.index),
        }
    }
}

/// An occurrence of an operation. The type is carried along so that nets
/// are self-contained values.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub op: String,
    pub dom: Formula,
    pub cod: Formula,
}

pub type Wire = (PortRef, PortRef);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Net {
    pub dom: Formula,
    pub cod: Formula,
    pub cells: BTreeMap<CellId, Cell>,
    /// `(source, target)` pairs.
    pub wires: BTreeSet<Wire>,
}

/// Which sorts are represented by multi-wires: fan-in for commutative
/// monoids, fan-out for commutative comonoids. The strict mode has neither.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WiringMode {
    pub monoid: BTreeSet<Sort>,
    pub comonoid: BTreeSet<Sort>,
}

impl WiringMode {
    pub fn strict() -> Self {
        Self::default()
    }

    pub fn is_strict(&self) -> bool {
        self.monoid.is_empty() && self.comonoid.is_empty()
    }

    fn fan_in(&self, sort: &Option<Sort>) -> bool {
        sort.as_ref().is_some_and(|s| self.monoid.contains(s))
    }

    fn fan_out(&self, sort: &Option<Sort>) -> bool {
        sort.as_ref().is_some_and(|s| self.comonoid.contains(s))
    }
}

/// Sort and global polarity of a port.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PortInfo {
    pub sort: Option<Sort>,
    pub polarity: Polarity,
}

impl Net {
    pub fn new(dom: Formula, cod: Formula) -> Self {
        Net {
            dom,
            cod,
            cells: BTreeMap::new(),
            wires: BTreeSet::new(),
        }
    }

    pub fn formula_at(&self, loc: Loc) -> Option<&Formula> {
        match loc {
            Loc::Dom => Some(&self.dom),
            Loc::Cod => Some(&self.cod),
            Loc::CellDom(c) => self.cells.get(&c).map(|c| &c.dom),
            Loc::CellCod(c) => self.cells.get(&c).map(|c| &c.cod),
        }
    }

    /// Every location of the net in canonical order: domain, codomain, then
    /// each cell's domain and codomain.
    pub fn locations(&self) -> Vec<Loc> {
        let mut out = vec![Loc::Dom, Loc::Cod];
        for &c in self.cells.keys() {
            out.push(Loc::CellDom(c));
            out.push(Loc::CellCod(c));
        }
        out
    }

    /// Leaves of a location with their global polarities.
    pub fn leaves_at(&self, loc: Loc) -> Option<Vec<Leaf>> {
        let f = self.formula_at(loc)?;
        let mut leaves = f.leaves();
        if loc.flips() {
            for l in &mut leaves {
                l.polarity = l.polarity.flip();
            }
        }
        Some(leaves)
    }

    pub fn port_info(&self, p: PortRef) -> Result<PortInfo> {
        let f = self
            .formula_at(p.loc)
            .ok_or_else(|| Error::IllFormedNet(format!("dangling port reference {p}")))?;
        let leaves = f.leaves();
        let leaf = leaves.get(p.index).ok_or(Error::PortOutOfRange {
            index: p.index,
            leaves: leaves.len(),
        })?;
        let polarity = if p.loc.flips() {
            leaf.polarity.flip()
        } else {
            leaf.polarity
        };
        Ok(PortInfo {
            sort: leaf.sort.clone(),
            polarity,
        })
    }

    pub fn global_polarity(&self, p: PortRef) -> Result<Polarity> {
        Ok(self.port_info(p)?.polarity)
    }

    /// All ports with their info, in canonical order.
    pub fn ports(&self) -> Vec<(PortRef, PortInfo)> {
        let mut out = Vec::new();
        for loc in self.locations() {
            for (index, leaf) in self.leaves_at(loc).unwrap().into_iter().enumerate() {
                out.push((
                    PortRef { loc, index },
                    PortInfo {
                        sort: leaf.sort,
                        polarity: leaf.polarity,
                    },
                ));
            }
        }
        out
    }

    pub fn port_map(&self) -> BTreeMap<PortRef, PortInfo> {
        self.ports().into_iter().collect()
    }

    pub fn add_cell(&mut self, op: &str, dom: Formula, cod: Formula) -> CellId {
        let id = self.next_cell_id();
        self.cells.insert(
            id,
            Cell {
                op: op.to_string(),
                dom,
                cod,
            },
        );
        id
    }

    pub fn next_cell_id(&self) -> CellId {
        self.cells.keys().next_back().map_or(0, |c| c + 1)
    }

    pub fn wire(&mut self, src: PortRef, tgt: PortRef) {
        self.wires.insert((src, tgt));
    }

    /// Adds a wire between two ports of opposite global polarity, oriented
    /// from the negative one to the positive one.
    pub fn connect(&mut self, a: PortRef, b: PortRef) -> Result<()> {
        let pa = self.global_polarity(a)?;
        let pb = self.global_polarity(b)?;
        match (pa, pb) {
            (Polarity::Negative, Polarity::Positive) => self.wire(a, b),
            (Polarity::Positive, Polarity::Negative) => self.wire(b, a),
            _ => {
                return Err(Error::IllFormedNet(format!(
                    "cannot connect {a} and {b}: same global polarity"
                )))
            }
        }
        Ok(())
    }

    pub fn wires_from(&self, src: PortRef) -> impl Iterator<Item = PortRef> + '_ {
        self.wires
            .range((src, PortRef::dom(0))..)
            .take_while(move |(s, _)| *s == src)
            .map(|&(_, t)| t)
    }

    pub fn wires_into(&self, tgt: PortRef) -> impl Iterator<Item = PortRef> + '_ {
        self.wires.iter().filter(move |(_, t)| *t == tgt).map(|&(s, _)| s)
    }

    /// Applies a port renaming to every wire.
    pub fn map_ports(&self, dom: Formula, cod: Formula, f: impl Fn(PortRef) -> PortRef) -> Net {
        Net {
            dom,
            cod,
            cells: self.cells.clone(),
            wires: self.wires.iter().map(|&(s, t)| (f(s), f(t))).collect(),
        }
    }

    /// Renumbers cells to `0..n` (in their current order).
    pub fn compact(&self) -> Net {
        let map: BTreeMap<CellId, CellId> = self
            .cells
            .keys()
            .enumerate()
            .map(|(i, &c)| (c, i as CellId))
            .collect();
        self.rename_cells(&map)
    }

    pub fn rename_cells(&self, map: &BTreeMap<CellId, CellId>) -> Net {
        let re = |p: PortRef| PortRef {
            loc: match p.loc {
                Loc::CellDom(c) => Loc::CellDom(map[&c]),
                Loc::CellCod(c) => Loc::CellCod(map[&c]),
                l => l,
            },
            index: p.index,
        };
        Net {
            dom: self.dom.clone(),
            cod: self.cod.clone(),
            cells: self.cells.iter().map(|(c, cell)| (map[c], cell.clone())).collect(),
            wires: self.wires.iter().map(|&(s, t)| (re(s), re(t))).collect(),
        }
    }

    /// Removes a cell together with every wire touching it.
    pub fn remove_cell(&mut self, c: CellId) {
        self.cells.remove(&c);
        self.wires
            .retain(|(s, t)| s.loc.cell() != Some(c) && t.loc.cell() != Some(c));
    }

    pub fn op_counts(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for c in self.cells.values() {
            *out.entry(c.op.clone()).or_insert(0) += 1;
        }
        out
    }

    /// Checks the linking invariants: wires run from negative to positive
    /// ports, sort wires preserve sorts, and wires are functional and
    /// injective where the wiring mode requires it. Partiality is allowed.
    pub fn check_wellformed(&self, mode: &WiringMode) -> Result<()> {
        let info = self.port_map();
        let get = |p: &PortRef| {
            info.get(p)
                .ok_or_else(|| Error::IllFormedNet(format!("dangling port reference {p}")))
        };
        let mut out_count: BTreeMap<PortRef, usize> = BTreeMap::new();
        let mut sort_in: BTreeMap<PortRef, usize> = BTreeMap::new();
        for (s, t) in &self.wires {
            let si = get(s)?;
            let ti = get(t)?;
            if si.polarity != Polarity::Negative {
                return Err(Error::IllFormedNet(format!("wire source {s} is not negative")));
            }
            if ti.polarity != Polarity::Positive {
                return Err(Error::IllFormedNet(format!("wire target {t} is not positive")));
            }
            if let Some(sort) = &si.sort {
                if ti.sort.as_ref() != Some(sort) {
                    return Err(Error::IllFormedNet(format!(
                        "sort mismatch: {s} has sort {sort} but {t} has {}",
                        ti.sort.as_ref().map_or("I".to_string(), |x| x.to_string())
                    )));
                }
                *sort_in.entry(*t).or_insert(0) += 1;
            }
            *out_count.entry(*s).or_insert(0) += 1;
        }
        for (p, n) in &out_count {
            if *n > 1 && !mode.fan_out(&info[p].sort) {
                return Err(Error::IllFormedNet(format!("duplicate wire source {p}")));
            }
        }
        for (p, n) in &sort_in {
            if *n > 1 && !mode.fan_in(&info[p].sort) {
                return Err(Error::IllFormedNet(format!(
                    "bijectivity failure: {p} receives {n} wires of its sort"
                )));
            }
        }
        Ok(())
    }

    /// Totality: every negative port emits a wire and every positive port of
    /// a strict sort receives exactly one wire of its sort.
    pub fn check_total(&self, mode: &WiringMode) -> Result<()> {
        let mut outs: BTreeMap<PortRef, usize> = BTreeMap::new();
        let mut sort_in: BTreeMap<PortRef, usize> = BTreeMap::new();
        let info = self.port_map();
        for (s, t) in &self.wires {
            *outs.entry(*s).or_insert(0) += 1;
            if info.get(s).is_some_and(|i| i.sort.is_some()) {
                *sort_in.entry(*t).or_insert(0) += 1;
            }
        }
        for (p, i) in &info {
            match i.polarity {
                Polarity::Negative => {
                    if outs.get(p).copied().unwrap_or(0) == 0 {
                        return Err(Error::IllFormedNet(format!("negative port {p} has no wire")));
                    }
                }
                Polarity::Positive => {
                    if i.sort.is_some() && !mode.fan_in(&i.sort) && sort_in.get(p).copied().unwrap_or(0) != 1 {
                        return Err(Error::IllFormedNet(format!(
                            "positive port {p} does not receive exactly one wire of its sort"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Well-formed, total, and every switching is a tree.
    pub fn correctness(&self, mode: &WiringMode) -> Result<()> {
        self.check_wellformed(mode)?;
        self.check_total(mode)?;
        dr::check(self, mode, DEFAULT_SWITCHING_LIMIT_LOG2)
    }

    pub fn is_correct(&self, mode: &WiringMode) -> bool {
        self.correctness(mode).is_ok()
    }

    /// Danos-Regnier alone, without totality (the net must be well-formed).
    pub fn satisfies_dr(&self, mode: &WiringMode, limit_log2: u32) -> Result<()> {
        dr::check(self, mode, limit_log2)
    }

    /// Enumerates the switchings of a strict net.
    pub fn switchings(&self) -> Switchings {
        Switchings::new(self, &WiringMode::strict())
    }

    pub fn switchings_in(&self, mode: &WiringMode) -> Switchings {
        Switchings::new(self, mode)
    }
}

impl fmt::Display for Net {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::print_net(self, None))
    }
}

#[cfg(test)]
mod tests;
