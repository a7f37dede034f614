//! Pools of small correct nets and valid bigraphs for randomized checks.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use smcnets::bigraph::{enumerate_bigraphs, BigSignature, Bigraph, Interface, Locality};
use smcnets::calculi::{builtin_theory, enumerate_nets, NetBudget};
use smcnets::{parse_formula, Formula, Net, Theory};

pub fn fm(s: &str) -> Formula {
    parse_formula(s, None).unwrap()
}

/// Objects and a per-hom cell budget for each built-in theory.
pub fn theory_objects() -> Vec<(&'static str, Vec<&'static str>, usize)> {
    vec![
        ("linear_lambda", vec!["t", "t * t", "t -o t", "I"], 3),
        ("lambda_sharing", vec!["t", "t * t", "I"], 2),
        ("lambda_two_sorted", vec!["t", "v", "v -o t", "I"], 2),
        ("pi", vec!["t", "v", "v -o t", "I"], 2),
    ]
}

/// All enumerated nets between the objects of one theory.
pub struct NetPool {
    pub theory: Theory,
    pub objects: Vec<Formula>,
    pub homs: BTreeMap<(usize, usize), Vec<Net>>,
}

impl NetPool {
    pub fn new(name: &str, objects: &[&str], cells: usize) -> Self {
        let theory = builtin_theory(name).unwrap();
        let objects: Vec<Formula> = objects.iter().map(|s| fm(s)).collect();
        let mut homs = BTreeMap::new();
        for (i, a) in objects.iter().enumerate() {
            for (j, b) in objects.iter().enumerate() {
                let nets = enumerate_nets(&theory, a, b, &NetBudget::cells(cells)).unwrap();
                if !nets.is_empty() {
                    homs.insert((i, j), nets);
                }
            }
        }
        NetPool { theory, objects, homs }
    }

    pub fn all() -> Vec<NetPool> {
        theory_objects()
            .into_iter()
            .map(|(name, objects, cells)| NetPool::new(name, &objects, cells))
            .collect()
    }

    /// A random path of `len` composable nets, first applied first.
    pub fn path(&self, rng: &mut impl Rng, len: usize) -> Option<Vec<Net>> {
        let keys: Vec<&(usize, usize)> = self.homs.keys().collect();
        let &&(mut a, mut b) = keys.choose(rng)?;
        let mut out = vec![self.homs[&(a, b)].choose(rng)?.clone()];
        for _ in 1..len {
            a = b;
            let next: Vec<usize> = (0..self.objects.len()).filter(|c| self.homs.contains_key(&(a, *c))).collect();
            b = *next.choose(rng)?;
            out.push(self.homs[&(a, b)].choose(rng)?.clone());
        }
        Some(out)
    }
}

pub fn pi_bigsig() -> BigSignature {
    BigSignature::new().with_control("s", 0, 2, false).with_control("g", 1, 1, false)
}

/// Interfaces bigraphs are enumerated between.
pub fn bigraph_objects() -> Vec<Interface> {
    vec![
        Interface::new(0),
        Interface::new(1),
        Interface::new(1).with_name("a", Locality::Global),
        Interface::new(1).with_name("x", Locality::At(0)),
        Interface::new(2).with_name("x", Locality::Global),
    ]
}

pub struct BigraphPool {
    pub sig: BigSignature,
    pub objects: Vec<Interface>,
    pub homs: BTreeMap<(usize, usize), Vec<Bigraph>>,
}

impl BigraphPool {
    pub fn new(sig: BigSignature, max_nodes: usize) -> Self {
        let objects = bigraph_objects();
        let mut homs = BTreeMap::new();
        for (i, a) in objects.iter().enumerate() {
            for (j, b) in objects.iter().enumerate() {
                let all = enumerate_bigraphs(&sig, a, b, max_nodes).unwrap();
                if !all.is_empty() {
                    homs.insert((i, j), all);
                }
            }
        }
        BigraphPool { sig, objects, homs }
    }

    pub fn any(&self, rng: &mut impl Rng) -> Bigraph {
        let keys: Vec<&(usize, usize)> = self.homs.keys().collect();
        self.homs[keys.choose(rng).unwrap()].choose(rng).unwrap().clone()
    }

    /// A random composable pair `(f, g)`: `f` runs first.
    pub fn pair(&self, rng: &mut impl Rng) -> (Bigraph, Bigraph) {
        loop {
            let keys: Vec<&(usize, usize)> = self.homs.keys().collect();
            let &&(a, b) = keys.choose(rng).unwrap();
            let next: Vec<usize> = (0..self.objects.len()).filter(|c| self.homs.contains_key(&(b, *c))).collect();
            if let Some(&c) = next.choose(rng) {
                let f = self.homs[&(a, b)].choose(rng).unwrap().clone();
                let g = self.homs[&(b, c)].choose(rng).unwrap().clone();
                return (f, g);
            }
        }
    }
}
