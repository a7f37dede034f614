//! The acceptance suite: one PASS/FAIL line per criterion, with timings.
//! Run with `cargo test --test acceptance`.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use smcnets::bigraph::{
    check_bigraph, compose_bigraphs, parse_bigraph, BigSignature, Bigraph, Link, Parent, Point,
};
use smcnets::calculi::{
    builtin_theory, count_closed_linear_terms, decode_net, encode_lambda, encode_pi, enumerate_closed_linear_terms,
    enumerate_closed_terms, enumerate_nets, parse_lambda, parse_pi, HoleInterface, LambdaCalculus, LambdaTerm, NetBudget,
};
use smcnets::equivalence::{collapse, collapsed_equal, rewiring_equivalent, structural_key, theory_equivalent_bounded, Outcome};
use smcnets::net::text::parse_net;
use smcnets::smc::{compose, decompose, embed_operation, identity, structural, tensor, Structural};
use smcnets::translate::{check_closed_term_iso, check_faithfulness, translate_bigraph, TranslationContext};
use smcnets::{Formula, Net, Polarity, Port, PortRef, WiringMode};

use common::{fm, pi_bigsig, BigraphPool, NetPool};

type Outcome_ = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err(e: smcnets::Error) -> String {
    e.to_string()
}

fn polarity() -> Outcome_ {
    let f = fm("((a -o I) -o I) -o I");
    let pols: Vec<Polarity> = (0..4).map(|i| f.polarity(Port(i)).unwrap()).collect();
    use Polarity::*;
    ensure(pols == [Negative, Positive, Negative, Positive], format!("leaf polarities {pols:?}"))?;
    let id = identity(&f);
    ensure(id.global_polarity(PortRef::dom(0)).map_err(err)? == Positive, "dom occurrence of a")?;
    ensure(id.global_polarity(PortRef::cod(0)).map_err(err)? == Negative, "cod occurrence of a")?;
    Ok("a -, I +, I -, I +".into())
}

fn endomorphisms() -> (Net, Net) {
    let f = fm("((a -o I) -o I) -o I");
    let mut other = Net::new(f.clone(), f.clone());
    for (s, t) in [
        (PortRef::cod(0), PortRef::dom(0)),
        (PortRef::dom(1), PortRef::dom(2)),
        (PortRef::cod(2), PortRef::cod(3)),
        (PortRef::dom(3), PortRef::cod(1)),
    ] {
        other.wire(s, t);
    }
    (identity(&f), other)
}

fn dr_golden() -> Outcome_ {
    let strict = WiringMode::strict();
    let (id, other) = endomorphisms();
    ensure(id.is_correct(&strict) && other.is_correct(&strict), "an endomorphism is rejected")?;
    let mut partial = other.clone();
    partial.wires.remove(&(PortRef::dom(3), PortRef::cod(1)));
    ensure(partial.check_wellformed(&strict).is_ok(), "partial linking should be well-formed")?;
    ensure(!partial.is_correct(&strict), "non-total linking accepted")?;
    let mut mismatch = Net::new(fm("a"), fm("b"));
    mismatch.wire(PortRef::dom(0), PortRef::cod(0));
    ensure(mismatch.check_wellformed(&strict).is_err(), "sort mismatch accepted")?;
    ensure(!mismatch.is_correct(&strict), "sort mismatch correct")?;
    Ok("2 correct, 2 broken variants rejected".into())
}

fn eq1() -> Outcome_ {
    let a = fm("a");
    let n = compose(&structural(&Structural::RUnitInv(a.clone())), &structural(&Structural::RUnit(a))).map_err(err)?;
    let expected: BTreeSet<(PortRef, PortRef)> =
        [(PortRef::dom(0), PortRef::cod(0)), (PortRef::dom(1), PortRef::cod(0))].into();
    ensure(n.wires == expected && n.cells.is_empty(), format!("wires {:?}", n.wires))?;
    ensure(n.is_correct(&WiringMode::strict()), "not correct")?;
    let id = identity(&fm("a * I"));
    ensure(n != id, "syntactically the identity")?;
    ensure(rewiring_equivalent(&n, &id).map_err(err)?, "not rewiring-equivalent to the identity")?;
    Ok("unit wired to the atom; rewires to id".into())
}

fn composition_preserves_correctness() -> Outcome_ {
    let mut rng = StdRng::seed_from_u64(4);
    let pools = NetPool::all();
    let mut done = 0;
    while done < 500 {
        let pool = &pools[rng.gen_range(0..pools.len())];
        let Some(p) = pool.path(&mut rng, 2) else { continue };
        let c = compose(&p[1], &p[0]).map_err(err)?;
        ensure(c.is_correct(&pool.theory.wiring_mode()), format!("incorrect composite:\n{c}"))?;
        done += 1;
    }
    Ok(format!("{done} pairs over 4 theories"))
}

fn category_laws() -> Outcome_ {
    let mut rng = StdRng::seed_from_u64(5);
    let pools = NetPool::all();
    let same = |pool: &NetPool, a: &Net, b: &Net| -> Result<bool, String> {
        Ok(structural_key(a, &pool.theory).map_err(err)? == structural_key(b, &pool.theory).map_err(err)?)
    };
    let mut done = 0;
    while done < 200 {
        let pool = &pools[rng.gen_range(0..pools.len())];
        let Some(p) = pool.path(&mut rng, 3) else { continue };
        let (f, g, h) = (&p[0], &p[1], &p[2]);
        let left = compose(&compose(h, g).map_err(err)?, f).map_err(err)?;
        let right = compose(h, &compose(g, f).map_err(err)?).map_err(err)?;
        ensure(same(pool, &left, &right)?, format!("associativity fails for\n{f}\n{g}\n{h}"))?;
        let lid = compose(&identity(&f.cod), f).map_err(err)?;
        let rid = compose(f, &identity(&f.dom)).map_err(err)?;
        ensure(same(pool, &lid, f)? && same(pool, &rid, f)?, format!("identity law fails for\n{f}"))?;
        done += 1;
    }
    Ok(format!("{done} triples"))
}

fn modularity() -> Outcome_ {
    let mut corpus: Vec<(Net, smcnets::Theory)> = Vec::new();
    for src in ["\\x. x", "\\x. \\y. x y", "\\f. \\x. f x", "\\x. x (\\y. y)"] {
        let t = parse_lambda(src).map_err(err)?;
        corpus.push((encode_lambda(&t, LambdaCalculus::Linear).map_err(err)?, builtin_theory("linear_lambda").map_err(err)?));
    }
    for src in ["\\x. x x", "\\x. \\y. x"] {
        let t = parse_lambda(src).map_err(err)?;
        corpus.push((
            encode_lambda(&t, LambdaCalculus::TwoSorted).map_err(err)?,
            builtin_theory("lambda_two_sorted").map_err(err)?,
        ));
    }
    let (p, iface) = fig2_term();
    corpus.push((encode_pi(&p, &iface).map_err(err)?, builtin_theory("pi").map_err(err)?));
    let mut rng = StdRng::seed_from_u64(6);
    for pool in NetPool::all() {
        for _ in 0..4 {
            if let Some(p) = pool.path(&mut rng, 1) {
                corpus.push((p[0].clone(), pool.theory.clone()));
            }
        }
    }
    let mut splits = 0;
    for (n, th) in &corpus {
        ensure(n.cells.len() <= 5, "corpus net too large")?;
        let ids: Vec<u32> = n.cells.keys().copied().collect();
        let key = structural_key(n, th).map_err(err)?;
        for mask in 0..1u32 << ids.len() {
            let c1: BTreeSet<u32> = ids.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &c)| c).collect();
            let (f1, f2) = decompose(n, &c1).map_err(err)?;
            let back = compose(&f2, &f1).map_err(err)?;
            ensure(
                structural_key(&back, th).map_err(err)? == key,
                format!("split {c1:?} of\n{n}\ndoes not recompose"),
            )?;
            splits += 1;
        }
    }
    Ok(format!("{} nets, {splits} splits", corpus.len()))
}

fn linear_bijection() -> Outcome_ {
    let th = builtin_theory("linear_lambda").map_err(err)?;
    let mut terms: BTreeSet<LambdaTerm> = BTreeSet::new();
    let mut counts = Vec::new();
    for k in 0..=4 {
        let new = enumerate_closed_linear_terms(k);
        ensure(new.len() as u128 == count_closed_linear_terms(k), format!("term oracles disagree at {k}"))?;
        for t in &new {
            let n = encode_lambda(t, LambdaCalculus::Linear).map_err(err)?;
            ensure(&decode_net(&n, LambdaCalculus::Linear).map_err(err)? == t, format!("round trip of {t}"))?;
        }
        terms.extend(new);
        let nets = enumerate_nets(&th, &Formula::Unit, &fm("t"), &NetBudget::cells(2 * k + 1)).map_err(err)?;
        let decoded: BTreeSet<LambdaTerm> = nets
            .iter()
            .map(|n| decode_net(n, LambdaCalculus::Linear))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        ensure(nets.len() == terms.len() && decoded == terms, format!("k = {k}: {} nets, {} terms", nets.len(), terms.len()))?;
        counts.push(nets.len());
    }
    Ok(format!("cumulative counts {counts:?}"))
}

fn two_sorted_bijection() -> Outcome_ {
    let th = builtin_theory("lambda_two_sorted").map_err(err)?;
    let size = 4;
    let budget = NetBudget {
        max_counted: size,
        counted_ops: Some(["lam", "app", "d"].iter().map(|s| s.to_string()).collect()),
        max_total: 2 * size,
    };
    let nets = enumerate_nets(&th, &Formula::Unit, &fm("t"), &budget).map_err(err)?;
    let terms: BTreeSet<LambdaTerm> = (1..=size).flat_map(enumerate_closed_terms).collect();
    let decoded: BTreeSet<LambdaTerm> = nets
        .iter()
        .map(|n| decode_net(n, LambdaCalculus::TwoSorted))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    ensure(nets.len() == terms.len() && decoded == terms, format!("{} nets, {} terms", nets.len(), terms.len()))?;
    let plain: Vec<&Net> = nets
        .iter()
        .filter(|n| {
            // Copies are fan-out wires in collapsed form.
            let fans = n.wires.iter().any(|(s, _)| n.wires_from(*s).count() > 1);
            !fans && n.cells.values().all(|c| c.op != "c" && c.op != "w")
        })
        .collect();
    let linear: BTreeSet<&LambdaTerm> = terms.iter().filter(|t| t.is_linear()).collect();
    let plain_terms: BTreeSet<LambdaTerm> = plain
        .iter()
        .map(|n| decode_net(n, LambdaCalculus::TwoSorted))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    ensure(
        plain.len() == linear.len() && plain_terms.iter().collect::<BTreeSet<_>>() == linear,
        format!("{} c/w-free nets, {} linear terms", plain.len(), linear.len()),
    )?;
    Ok(format!("{} terms, {} linear", terms.len(), linear.len()))
}

fn sharing() -> Outcome_ {
    // f = λ-subterm `x (λz. z)` as a net t -> t.
    let th = builtin_theory("lambda_sharing").map_err(err)?;
    let mut f = Net::new(fm("t"), fm("t"));
    let app = f.add_cell("app", fm("t * t"), fm("t"));
    let lam = f.add_cell("lam", fm("t -o t"), fm("t"));
    f.wire(PortRef::cell_dom(lam, 0), PortRef::cell_dom(lam, 1));
    f.wire(PortRef::cell_cod(lam, 0), PortRef::cell_dom(app, 1));
    f.wire(PortRef::dom(0), PortRef::cell_dom(app, 0));
    f.wire(PortRef::cell_cod(app, 0), PortRef::cod(0));
    ensure(f.is_correct(&th.wiring_mode()), "f is not correct")?;
    let c = embed_operation(&th.signature, "c").map_err(err)?;
    let shared = compose(&c, &f).map_err(err)?;
    let twice = compose(&tensor(&f, &f), &c).map_err(err)?;
    let out = theory_equivalent_bounded(&shared, &twice, &th, 10_000).map_err(err)?;
    ensure(out == Outcome::Distinct, format!("reported {out}"))?;
    Ok("distinct".into())
}

fn fig2_term() -> (smcnets::calculi::PiTerm, HoleInterface) {
    let p = parse_pi("(get a(x). ([0] | send x x)) | nu b. send a b. [1]").unwrap();
    let iface = HoleInterface {
        global: vec!["a".into()],
        holes: vec![vec!["x".into()], vec!["b".into()]],
    };
    (p, iface)
}

const EX3: &str = include_str!("../../../fixtures/ex3.sbg");
const FIG2: &str = include_str!("../../../fixtures/fig2.snet");

fn figure_two() -> Outcome_ {
    let file = parse_bigraph(EX3, None).map_err(err)?;
    let ctx = TranslationContext::new(&file.signature).map_err(err)?;
    let net = translate_bigraph(&file.bigraph, &ctx).map_err(err)?;
    let pi = builtin_theory("pi").map_err(err)?;
    let fig2 = parse_net(FIG2, Some(&pi), &mut |_| Ok(pi.clone())).map_err(err)?.net;
    let (p, iface) = fig2_term();
    ensure(encode_pi(&p, &iface).map_err(err)? == fig2, "fixture differs from the encoder")?;
    ensure(collapsed_equal(&net, &collapse(&fig2, &pi).map_err(err)?), "translation differs from the figure")?;
    let local = HoleInterface {
        global: vec![],
        ..iface.clone()
    };
    ensure(encode_pi(&p, &local).map_err(err)?.dom == fm("(v -o t) * (v -o t)"), "holes without a")?;
    let first = HoleInterface {
        global: vec![],
        holes: vec![vec!["a".into(), "x".into()], vec!["b".into()]],
    };
    ensure(encode_pi(&p, &first).map_err(err)?.dom == fm("((v * v) -o t) * (v -o t)"), "only hole 0 with a")?;
    Ok("collapsed_equal; both variants".into())
}

fn faithfulness() -> Outcome_ {
    let r = check_faithfulness(&pi_bigsig(), 2).map_err(err)?;
    ensure(r.collisions.is_empty(), format!("{} collisions", r.collisions.len()))?;
    ensure(r.witness_correct && r.witness_unmatched, "non-fullness witness")?;
    Ok(format!(
        "{} bigraphs over {} interface pairs, {} pairs, 0 collisions, witness ok",
        r.bigraphs, r.interface_pairs, r.pairs_checked
    ))
}

fn closed_terms() -> Outcome_ {
    let atoms = BigSignature::new().with_control("a", 0, 1, true);
    let locked: [(&str, BigSignature, [usize; 3]); 2] = [("{s, g}", pi_bigsig(), [1, 4, 55]), ("{a}", atoms, [1, 2, 4])];
    let mut out = Vec::new();
    for (name, sig, counts) in locked {
        for (k, &expected) in counts.iter().enumerate() {
            let r = check_closed_term_iso(&sig, k).map_err(err)?;
            ensure(r.ok(), format!("{name} at {k}: {} bigraphs, {} nets", r.bigraphs, r.nets))?;
            ensure(r.bigraphs == expected, format!("{name} at {k}: {} instead of {expected}", r.bigraphs))?;
        }
        out.push(format!("{name} {counts:?}"));
    }
    Ok(out.join(", "))
}

fn random_bigraph(rng: &mut impl Rng, sig: &BigSignature) -> Bigraph {
    let objects = common::bigraph_objects();
    let dom = objects[rng.gen_range(0..objects.len())].clone();
    let cod = objects[rng.gen_range(1..objects.len())].clone();
    let controls: Vec<&String> = sig.controls.keys().collect();
    let mut b = Bigraph::new(dom, cod);
    let n = rng.gen_range(0..=3);
    let holder = |rng: &mut dyn rand::RngCore, b: &Bigraph| {
        let k = rng.gen_range(0..b.cod.width + n);
        if k < b.cod.width {
            Parent::Root(k)
        } else {
            Parent::Node(k - b.cod.width)
        }
    };
    for _ in 0..n {
        let c = controls[rng.gen_range(0..controls.len())].clone();
        let p = holder(rng, &b);
        b.add_node(&c, p);
    }
    b.sites = (0..b.dom.width).map(|_| holder(rng, &b)).collect();
    let edges = rng.gen_range(0..=3);
    for _ in 0..edges {
        b.add_edge();
    }
    let outer: Vec<String> = b.cod.names.keys().cloned().collect();
    let mut points: Vec<Point> = Vec::new();
    for (v, node) in &b.nodes {
        for i in 0..sig.controls[&node.control].arity() {
            points.push(Point::Port(*v, i));
        }
    }
    points.extend(b.dom.names.keys().map(|x| Point::Inner(x.clone())));
    for p in points {
        let k = rng.gen_range(0..edges + outer.len().max(1));
        let l = if k < edges {
            Link::Edge(k)
        } else if let Some(y) = outer.get(k - edges) {
            Link::Outer(y.clone())
        } else {
            Link::Edge(0)
        };
        b.link.insert(p, l);
    }
    smcnets::bigraph::lean_normalize(&b)
}

fn bigraph_validity() -> Outcome_ {
    let file = parse_bigraph(EX3, None).map_err(err)?;
    let (b, sig) = (&file.bigraph, &file.signature);
    check_bigraph(b, sig).map_err(err)?;
    let get = 0;
    // Binding rule: a binding port may not link to an outer name.
    let mut m = b.clone();
    m.link.insert(Point::Port(get, 0), Link::Outer("a".into()));
    ensure(check_bigraph(&m, sig).is_err(), "binder on an outer name accepted")?;
    // Scope rule: the bound x used outside the get.
    let mut m = b.clone();
    m.link.insert(Point::Port(2, 1), Link::Edge(0));
    ensure(check_bigraph(&smcnets::bigraph::lean_normalize(&m), sig).is_err(), "scope escape accepted")?;
    // Scope rule: a located inner name at a site outside the binder.
    let mut m = b.clone();
    m.link.insert(Point::Inner("b".into()), Link::Edge(0));
    ensure(check_bigraph(&smcnets::bigraph::lean_normalize(&m), sig).is_err(), "inner name escape accepted")?;
    // At most one binder per edge.
    let mut m = b.clone();
    let h = m.add_node("g", Parent::Node(get));
    m.link.insert(Point::Port(h, 0), Link::Edge(0));
    m.link.insert(Point::Port(h, 1), Link::Outer("a".into()));
    ensure(check_bigraph(&m, sig).is_err(), "two binders accepted")?;

    let full = pi_bigsig().with_control("k", 0, 1, true);
    let mut rng = StdRng::seed_from_u64(13);
    let (mut valid, mut tried) = (0, 0);
    while valid < 1000 {
        tried += 1;
        let r = random_bigraph(&mut rng, &full);
        if check_bigraph(&r, &full).is_err() {
            continue;
        }
        valid += 1;
        let mut binders: BTreeMap<usize, usize> = BTreeMap::new();
        for (p, l) in &r.link {
            if let (Point::Port(v, i), Link::Edge(e)) = (p, l) {
                if *i < full.controls[&r.nodes[v].control].binding {
                    *binders.entry(*e).or_default() += 1;
                }
            }
        }
        ensure(binders.values().all(|&k| k <= 1), format!("edge with two binders:\n{r:?}"))?;
    }
    let pool = BigraphPool::new(pi_bigsig(), 1);
    for _ in 0..200 {
        let (f, g) = pool.pair(&mut rng);
        let c = compose_bigraphs(&g, &f, &pool.sig).map_err(err)?;
        check_bigraph(&c, &pool.sig).map_err(err)?;
    }
    Ok(format!("4 mutants rejected, 1000 random valid ({tried} drawn), 200 composites valid"))
}

fn functoriality() -> Outcome_ {
    let pool = BigraphPool::new(pi_bigsig(), 1);
    let ctx = TranslationContext::new(&pool.sig).map_err(err)?;
    let mut rng = StdRng::seed_from_u64(14);
    for _ in 0..100 {
        let (f, g) = pool.pair(&mut rng);
        let gf = compose_bigraphs(&g, &f, &pool.sig).map_err(err)?;
        let lhs = translate_bigraph(&gf, &ctx).map_err(err)?;
        let tf = translate_bigraph(&f, &ctx).map_err(err)?;
        let tg = translate_bigraph(&g, &ctx).map_err(err)?;
        let rhs = collapse(&compose(&tg.net, &tf.net).map_err(err)?, &ctx.theory).map_err(err)?;
        ensure(collapsed_equal(&lhs, &rhs), format!("T(g . f) differs from T(g) . T(f) for\n{f:?}\n{g:?}"))?;
    }
    Ok("100 pairs".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome_, u64); 14] = [
        ("polarity of ((a -o I) -o I) -o I", polarity, 1),
        ("DR on both endomorphisms and broken variants", dr_golden, 1),
        ("unitor composite rewires to the identity", eq1, 1),
        ("composition preserves correctness", composition_preserves_correctness, 60),
        ("category laws up to equivalence", category_laws, 60),
        ("modularity: decompose then recompose", modularity, 120),
        ("linear lambda terms biject with nets", linear_bijection, 120),
        ("two-sorted lambda terms biject with nets", two_sorted_bijection, 300),
        ("shared versus copied subterm are distinct", sharing, 60),
        ("bigraph example translates to the pi net", figure_two, 5),
        ("translation is faithful, not full", faithfulness, 300),
        ("closed terms: bigraphs biject with nets", closed_terms, 600),
        ("bigraph validity suite", bigraph_validity, 60),
        ("translation is functorial", functoriality, 300),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let took = start.elapsed();
        let result = match result {
            Ok(detail) if took > Duration::from_secs(*limit) => Err(format!("{detail}; over the {limit} s limit")),
            r => r,
        };
        match result {
            Ok(detail) => println!("PASS {:>2} {name} ({took:.2?}): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({took:.2?}): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
