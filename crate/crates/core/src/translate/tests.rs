use super::*;
use crate::bigraph::{check_bigraph, Node};
use crate::calculi::{builtin_theory, encode_pi, parse_pi, HoleInterface};
use crate::equivalence::{collapse, collapsed_equal};
use crate::formula::parse_formula;

fn fm(s: &str) -> Formula {
    parse_formula(s, None).unwrap()
}

fn pi_sig() -> BigSignature {
    BigSignature::new().with_control("s", 0, 2, false).with_control("g", 1, 1, false)
}

fn example() -> Bigraph {
    let dom = Interface::new(2)
        .with_name("x", Locality::At(0))
        .with_name("b", Locality::At(1));
    let cod = Interface::new(1).with_name("a", Locality::Global);
    let mut b = Bigraph::new(dom, cod);
    let g = b.add_node("g", Parent::Root(0));
    let s = b.add_node("s", Parent::Node(g));
    let t = b.add_node("s", Parent::Root(0));
    b.sites = vec![Parent::Node(g), Parent::Node(t)];
    let x = b.add_edge();
    let nu = b.add_edge();
    for p in [Point::Port(g, 0), Point::Port(s, 0), Point::Port(s, 1), Point::Inner("x".into())] {
        b.link.insert(p, Link::Edge(x));
    }
    b.link.insert(Point::Port(g, 1), Link::Outer("a".into()));
    b.link.insert(Point::Port(t, 0), Link::Outer("a".into()));
    b.link.insert(Point::Port(t, 1), Link::Edge(nu));
    b.link.insert(Point::Inner("b".into()), Link::Edge(nu));
    b
}

#[test]
fn signature_matches_the_pi_theory() {
    let th = translate_signature(&pi_sig()).unwrap();
    let pi = builtin_theory("pi").unwrap();
    for op in ["s", "g", "par", "zero", "c", "w", "nu"] {
        assert_eq!(th.signature.op(op).unwrap(), pi.signature.op(op).unwrap(), "{op}");
    }
    assert_eq!(th.wiring_mode(), pi.wiring_mode());
    let clash = BigSignature::new().with_control("par", 0, 0, false);
    assert!(translate_signature(&clash).is_err());
    let atom = translate_signature(&BigSignature::new().with_control("a", 0, 2, true)).unwrap();
    assert_eq!(atom.signature.op("a").unwrap().dom, fm("v * v"));
    let bare = translate_signature(&BigSignature::new().with_control("k", 0, 0, true)).unwrap();
    assert_eq!(bare.signature.op("k").unwrap().dom, Formula::Unit);
}

#[test]
fn interfaces() {
    let u = Interface::new(2)
        .with_name("y", Locality::At(1))
        .with_name("x", Locality::At(1))
        .with_name("g", Locality::Global);
    assert_eq!(translate_interface(&u), fm("v -o (t * ((v * v) -o t))"));
    let leaves = leaf_assignment(&u);
    assert_eq!(leaves.names["g"], 0);
    assert_eq!(leaves.terms, [1, 4]);
    assert_eq!((leaves.names["x"], leaves.names["y"]), (2, 3));
    assert_eq!(translate_interface(&Interface::new(0)), Formula::Unit);
    assert_eq!(translate_interface(&Interface::new(1)), fm("t"));
}

#[test]
fn example_translates_to_its_process() {
    let ctx = TranslationContext::new(&pi_sig()).unwrap();
    let b = example();
    check_bigraph(&b, &ctx.bigsig).unwrap();
    let net = translate_bigraph(&b, &ctx).unwrap();
    assert!(net.is_correct());
    let p = parse_pi("(get a(x). ([0] | send x x)) | nu b. send a b. [1]").unwrap();
    let iface = HoleInterface {
        global: vec![],
        holes: vec![vec!["x".into()], vec!["b".into()]],
    };
    let encoded = collapse(&encode_pi(&p, &iface).unwrap(), &ctx.theory).unwrap();
    assert_eq!(encoded.net.dom, net.net.dom);
    assert!(collapsed_equal(&net, &encoded));
    assert_eq!(
        structural_key(&net.net, &ctx.theory).unwrap(),
        structural_key(&encoded.net, &ctx.theory).unwrap()
    );
}

#[test]
fn unused_names_are_discarded() {
    let ctx = TranslationContext::new(&pi_sig()).unwrap();
    // get a(x). 0 with an idle outer name z.
    let mut b = Bigraph::new(
        Interface::new(0),
        Interface::new(1)
            .with_name("a", Locality::Global)
            .with_name("z", Locality::Global),
    );
    let g = b.add_node("g", Parent::Root(0));
    let e = b.add_edge();
    b.link.insert(Point::Port(g, 0), Link::Edge(e));
    b.link.insert(Point::Port(g, 1), Link::Outer("a".into()));
    let net = translate_bigraph(&b, &ctx).unwrap();
    assert!(net.is_correct());
    let ops = net.net.op_counts();
    assert_eq!(ops.get("w"), Some(&2));
    assert_eq!(ops.get("nu"), None);
    assert_eq!(net.net.dom, Formula::Unit);
    assert_eq!(net.net.cod, fm("(v * v) -o t"));
}

#[test]
fn invalid_bigraphs_are_not_translated() {
    let ctx = TranslationContext::new(&pi_sig()).unwrap();
    let mut b = example();
    b.nodes.insert(
        7,
        Node {
            control: "s".into(),
            parent: Parent::Root(0),
        },
    );
    assert!(translate_bigraph(&b, &ctx).is_err());
}

#[test]
fn distinct_small_bigraphs_stay_distinct() {
    let report = check_faithfulness(&pi_sig(), 1).unwrap();
    assert!(report.collisions.is_empty());
    assert!(report.witness_correct);
    assert!(report.witness_unmatched);
    assert_eq!(report.interface_pairs, faithfulness_interfaces().len());
    assert!(report.ok());
}

#[test]
fn witness_needs_a_get_like_control() {
    let ctx = TranslationContext::new(&BigSignature::new().with_control("s", 0, 2, false)).unwrap();
    assert!(non_fullness_witness(&ctx).is_err());
}

#[test]
fn closed_terms_correspond() {
    for k in 0..=1 {
        let r = check_closed_term_iso(&pi_sig(), k).unwrap();
        assert!(r.ok(), "k = {k}: {} bigraphs, {} nets", r.bigraphs, r.nets);
    }
    let atoms = BigSignature::new().with_control("a", 0, 1, true);
    let r = check_closed_term_iso(&atoms, 3).unwrap();
    assert_eq!((r.bigraphs, r.nets), (7, 7));
    assert!(r.ok());
}
