use std::collections::BTreeSet;

use super::*;
use crate::equivalence::rewiring_canonical;
use crate::net::WiringMode;
use crate::formula::parse_formula;
use crate::net::PortRef;

fn fm(s: &str) -> Formula {
    parse_formula(s, None).unwrap()
}

#[test]
fn builtin_theories_are_valid() {
    for name in BUILTIN_THEORIES {
        builtin_theory(name).unwrap().validate().unwrap();
    }
    let lin = builtin_theory("linear_lambda").unwrap();
    assert_eq!((lin.signature.sorts.len(), lin.signature.ops.len(), lin.equations.len()), (1, 2, 0));
    let pi = builtin_theory("pi").unwrap();
    assert_eq!(pi.signature.op("s").unwrap().dom, fm("v * (v * t)"));
    assert_eq!(pi.signature.op("g").unwrap().dom, fm("v * (v -o t)"));
    assert_eq!(builtin_theory("lambda_two_sorted").unwrap().signature.op("d").unwrap().cod, fm("t"));
    assert!(builtin_theory("sk").is_err());
}

#[test]
fn lambda_round_trips() {
    for src in ["\\x. x", "\\x. \\y. x y", "\\f. \\x. f (f x)", "\\x. x x"] {
        let t = parse_lambda(src).unwrap();
        assert_eq!(t.to_string(), parse_lambda(&t.to_string()).unwrap().to_string());
        let calcs: &[LambdaCalculus] = if t.is_linear() {
            &[LambdaCalculus::Linear, LambdaCalculus::TwoSorted]
        } else {
            &[LambdaCalculus::TwoSorted]
        };
        for &calc in calcs {
            let n = encode_lambda(&t, calc).unwrap();
            assert!(n.is_correct(&calc.mode()), "{src} in {calc:?}");
            assert_eq!(decode_net(&n, calc).unwrap(), t, "{src} in {calc:?}");
        }
    }
    assert!(encode_lambda(&parse_lambda("\\x. x x").unwrap(), LambdaCalculus::Linear).is_err());
    assert!(parse_lambda("\\x. y").is_err());
}

#[test]
fn identity_term_net() {
    let n = encode_lambda(&parse_lambda("\\x. x").unwrap(), LambdaCalculus::Linear).unwrap();
    assert_eq!(n.cells.len(), 1);
    assert!(n.wires.contains(&(PortRef::cell_dom(0, 0), PortRef::cell_dom(0, 1))));
}

#[test]
fn self_application_fans_out() {
    let n = encode_lambda(&parse_lambda("\\x. x x").unwrap(), LambdaCalculus::TwoSorted).unwrap();
    let d: Vec<_> = n.cells.iter().filter(|(_, c)| c.op == "d").map(|(&id, _)| id).collect();
    assert_eq!(d.len(), 2);
    assert_eq!(n.wires_from(PortRef::cell_dom(0, 0)).count(), 2);
}

#[test]
fn rewired_encoding_decodes_the_same() {
    let t = parse_lambda("\\x. \\y. x y").unwrap();
    let n = encode_lambda(&t, LambdaCalculus::Linear).unwrap();
    for m in crate::equivalence::rewiring_class(&n, &WiringMode::strict()) {
        assert_eq!(decode_net(&m, LambdaCalculus::Linear).unwrap(), t);
    }
}

#[test]
fn context_capture_choices_differ() {
    // λx.([0]·[1]) with x available to the left or to the right hole.
    let left = parse_lambda("\\x. [0: x] [1]").unwrap();
    let right = parse_lambda("\\x. [0] [1: x]").unwrap();
    let nl = encode_lambda(&left, LambdaCalculus::Linear).unwrap();
    let nr = encode_lambda(&right, LambdaCalculus::Linear).unwrap();
    assert_ne!(nl.dom, nr.dom);
    assert_eq!(decode_net(&nl, LambdaCalculus::Linear).unwrap(), left);
    assert_eq!(decode_net(&nr, LambdaCalculus::Linear).unwrap(), right);
}

#[test]
fn linear_term_counts_agree() {
    for k in 0..=4 {
        assert_eq!(enumerate_closed_linear_terms(k).len() as u128, count_closed_linear_terms(k), "k = {k}");
    }
    assert_eq!(enumerate_closed_linear_terms(0), vec![parse_lambda("\\x. x").unwrap()]);
    let counts: Vec<u128> = (0..=4).map(count_closed_linear_terms).collect();
    assert_eq!(counts, [1, 5, 60, 1105, 27120]);
}

#[test]
fn linear_nets_match_terms() {
    let th = builtin_theory("linear_lambda").unwrap();
    let mut total = 0;
    for k in 0..=2 {
        total += count_closed_linear_terms(k) as usize;
        let nets = enumerate_nets(&th, &Formula::Unit, &fm("t"), &NetBudget::cells(2 * k + 1)).unwrap();
        assert_eq!(nets.len(), total, "k = {k}");
        let decoded: BTreeSet<LambdaTerm> =
            nets.iter().map(|n| decode_net(n, LambdaCalculus::Linear).unwrap()).collect();
        assert_eq!(decoded.len(), total);
    }
    assert_eq!(enumerate_nets(&th, &Formula::Unit, &fm("t"), &NetBudget::cells(0)).unwrap().len(), 0);
}

#[test]
fn empty_process_is_the_only_cell_free_pi_net() {
    let th = builtin_theory("pi").unwrap();
    let nets = enumerate_nets(&th, &Formula::Unit, &fm("t"), &NetBudget::cells(0)).unwrap();
    assert_eq!(nets.len(), 1);
    let zero = encode_pi(&PiTerm::Zero, &HoleInterface::default()).unwrap();
    assert_eq!(rewiring_canonical(&zero, &th.wiring_mode()), nets[0]);
}

fn fig2() -> (PiTerm, HoleInterface) {
    let t = parse_pi("(get a(x). ([0] | send x x)) | nu b. send a b. [1]").unwrap();
    let iface = HoleInterface {
        global: vec!["a".into()],
        holes: vec![vec!["x".into()], vec!["b".into()]],
    };
    (t, iface)
}

#[test]
fn figure_two_net() {
    let th = builtin_theory("pi").unwrap();
    let (t, iface) = fig2();
    let n = encode_pi(&t, &iface).unwrap();
    assert_eq!(n.dom, fm("v -o ((v -o t) * (v -o t))"));
    assert_eq!(n.cod, fm("v -o t"));
    assert!(n.is_correct(&th.wiring_mode()));
    // a is used by the global leaf, get's subject and the second send.
    assert_eq!(n.wires_from(PortRef::cod(0)).count(), 3);
    let ops: BTreeSet<&str> = n.cells.values().map(|c| c.op.as_str()).collect();
    assert_eq!(ops, BTreeSet::from(["g", "nu", "s"]));

    let local = HoleInterface {
        global: vec![],
        ..iface.clone()
    };
    let m = encode_pi(&t, &local).unwrap();
    assert_eq!(m.dom, fm("(v -o t) * (v -o t)"));
    assert_eq!(m.wires.len() + 1, n.wires.len());

    let first = HoleInterface {
        global: vec![],
        holes: vec![vec!["a".into(), "x".into()], vec!["b".into()]],
    };
    let k = encode_pi(&t, &first).unwrap();
    assert_eq!(k.dom, fm("((v * v) -o t) * (v -o t)"));
    assert_eq!(k.wires.len(), n.wires.len());
}

#[test]
fn pi_terms_print_and_parse() {
    let (t, _) = fig2();
    assert_eq!(parse_pi(&t.to_string()).unwrap(), t);
    assert!(parse_pi("send a").is_err());
    assert!(encode_pi(&parse_pi("get a(x). send x y").unwrap(), &HoleInterface::default()).is_ok());
    let bad = HoleInterface {
        global: vec![],
        holes: vec![vec!["x".into()]],
    };
    assert!(encode_pi(&parse_pi("[0] | get a(x). 0").unwrap(), &bad).is_ok());
    assert!(encode_pi(&parse_pi("[0] | [0]").unwrap(), &bad).is_err());
}
