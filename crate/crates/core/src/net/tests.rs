use super::*;
use crate::formula::parse_formula;
use crate::smc::{identity, structural, Structural};

fn fm(s: &str) -> Formula {
    parse_formula(s, None).unwrap()
}

#[test]
fn domain_ports_flip() {
    let id = identity(&fm("((a -o I) -o I) -o I"));
    assert_eq!(id.global_polarity(PortRef::dom(0)).unwrap(), Polarity::Positive);
    assert_eq!(id.global_polarity(PortRef::cod(0)).unwrap(), Polarity::Negative);
    assert_eq!(id.global_polarity(PortRef::cod(2)).unwrap(), Polarity::Negative);
    assert_eq!(id.global_polarity(PortRef::cod(3)).unwrap(), Polarity::Positive);
    assert!(matches!(id.global_polarity(PortRef::dom(4)), Err(Error::PortOutOfRange { .. })));
    assert!(id.global_polarity(PortRef::cell_dom(0, 0)).is_err());
}

#[test]
fn cell_ports() {
    let mut n = Net::new(Formula::Unit, Formula::Unit);
    let s = n.add_cell("s", fm("v * v * t"), fm("t"));
    let g = n.add_cell("g", fm("v * (v -o t)"), fm("t"));
    for i in 0..3 {
        assert_eq!(n.global_polarity(PortRef::cell_dom(s, i)).unwrap(), Polarity::Positive);
    }
    assert_eq!(n.global_polarity(PortRef::cell_cod(s, 0)).unwrap(), Polarity::Negative);
    assert_eq!(n.global_polarity(PortRef::cell_dom(g, 1)).unwrap(), Polarity::Negative);
}

#[test]
fn both_endomorphisms_are_correct() {
    let f = fm("((a -o I) -o I) -o I");
    let id = identity(&f);
    // The other one rotates the three unit wires.
    let mut other = Net::new(f.clone(), f.clone());
    for (s, t) in [(PortRef::cod(0), PortRef::dom(0)), (PortRef::dom(1), PortRef::dom(2)), (PortRef::cod(2), PortRef::cod(3)), (PortRef::dom(3), PortRef::cod(1))] {
        other.wire(s, t);
    }
    for n in [&id, &other] {
        n.check_wellformed(&WiringMode::strict()).unwrap();
        assert!(n.is_correct(&WiringMode::strict()), "{n}");
    }
    assert_eq!(id.switchings().count(), 8);
    assert_eq!(id.switchings().par_count(), 3);
    assert!(id.switchings().all(|s| s.is_tree()));
}

#[test]
fn sort_mismatch_and_partiality() {
    let mut n = Net::new(fm("a"), fm("b"));
    n.wire(PortRef::dom(0), PortRef::cod(0));
    let e = n.check_wellformed(&WiringMode::strict()).unwrap_err();
    assert!(e.to_string().contains("sort mismatch"), "{e}");

    let empty = Net::new(fm("a"), fm("a"));
    empty.check_wellformed(&WiringMode::strict()).unwrap();
    assert!(!empty.is_correct(&WiringMode::strict()));

    let mut partial = identity(&fm("a * I"));
    partial.wires.remove(&(PortRef::dom(1), PortRef::cod(1)));
    partial.check_wellformed(&WiringMode::strict()).unwrap();
    assert!(!partial.is_correct(&WiringMode::strict()));
}

#[test]
fn bijectivity_and_orientation() {
    let mut n = Net::new(fm("a * a"), fm("a"));
    n.wire(PortRef::dom(0), PortRef::cod(0));
    n.wire(PortRef::dom(1), PortRef::cod(0));
    let e = n.check_wellformed(&WiringMode::strict()).unwrap_err();
    assert!(e.to_string().contains("bijectivity"), "{e}");
    let mut back = Net::new(fm("a"), fm("a"));
    back.wire(PortRef::cod(0), PortRef::dom(0));
    assert!(back.check_wellformed(&WiringMode::strict()).is_err());
}

#[test]
fn eq1_net_is_correct() {
    let a = fm("a");
    let n = crate::smc::compose(&structural(&Structural::RUnitInv(a.clone())), &structural(&Structural::RUnit(a))).unwrap();
    assert!(n.is_correct(&WiringMode::strict()));
}

#[test]
fn contraction_has_two_switchings() {
    let mut n = Net::new(fm("v"), fm("v * v"));
    let c = n.add_cell("c", fm("v"), fm("v * v"));
    n.wire(PortRef::dom(0), PortRef::cell_dom(c, 0));
    n.wire(PortRef::cell_cod(c, 0), PortRef::cod(0));
    n.wire(PortRef::cell_cod(c, 1), PortRef::cod(1));
    assert_eq!(n.switchings().count(), 2);
    assert!(n.is_correct(&WiringMode::strict()));
    // Crossing a cell's output back into its own input makes a cycle.
    let mut bad = Net::new(Formula::Unit, fm("t"));
    let k = bad.add_cell("f", fm("t"), fm("t * t"));
    bad.wire(PortRef::cell_cod(k, 0), PortRef::cell_dom(k, 0));
    bad.wire(PortRef::cell_cod(k, 1), PortRef::cod(0));
    bad.wire(PortRef::dom(0), PortRef::cod(0));
    assert!(!bad.is_correct(&WiringMode::strict()));
}

#[test]
fn collapsed_fan_out() {
    let mode = WiringMode {
        monoid: Default::default(),
        comonoid: [Sort::new("v")].into(),
    };
    let mut n = Net::new(fm("v"), fm("v * v"));
    n.wire(PortRef::dom(0), PortRef::cod(0));
    n.wire(PortRef::dom(0), PortRef::cod(1));
    assert!(n.check_wellformed(&WiringMode::strict()).is_err());
    assert!(n.is_correct(&mode));
    assert_eq!(n.switchings_in(&mode).count(), 2);
}

#[test]
fn text_round_trip() {
    let n = identity(&fm("((a -o I) -o I) -o I"));
    let printed = text::print_net(&n, None);
    let back = text::parse_net(&printed, None, &mut |p| Err(Error::UnknownTheory(p.into()))).unwrap();
    assert_eq!(back.net, n);
    assert!(dot::net_to_dot(&n).contains("cod:p0 -> dom:p0"));
    let err = text::parse_net("dom a\ncod a\nwire dom.0 -> cod.7\n", None, &mut |p| Err(Error::UnknownTheory(p.into())));
    assert!(matches!(err, Err(Error::Line { line: 3, .. })));
}

#[test]
fn canonical_form_ignores_cell_names() {
    let mut a = Net::new(Formula::Unit, fm("t * t"));
    let x = a.add_cell("z", Formula::Unit, fm("t"));
    let y = a.add_cell("z", Formula::Unit, fm("t"));
    a.wire(PortRef::cell_cod(x, 0), PortRef::cod(0));
    a.wire(PortRef::cell_cod(y, 0), PortRef::cod(1));
    a.wire(PortRef::dom(0), PortRef::cell_dom(x, 0));
    let mut map = BTreeMap::new();
    map.insert(x, 7);
    map.insert(y, 3);
    let b = a.rename_cells(&map);
    assert_ne!(a, b);
    assert!(isomorphic(&a, &b));
    assert_eq!(canonical_form(&a), canonical_form(&b));
}
