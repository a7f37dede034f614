//! Built-in theories: the linear λ-calculus, λ with sharing, the
//! two-sorted λ-calculus, and a π-like calculus; their term encodings and
//! the enumerators used to check them.

use crate::error::{Error, Result};
use crate::formula::{Formula, Sort};
use crate::signature::{ComonoidDecl, MonoidDecl, NuDecl, SmcSignature, Theory};

mod enumerate;
pub(crate) mod lambda;
mod pi;

pub use enumerate::{enumerate_nets, NetBudget};
pub use lambda::{
    count_closed_linear_terms, decode_net, encode_lambda, enumerate_closed_linear_terms, enumerate_closed_terms,
    parse_lambda, LambdaCalculus, LambdaTerm,
};
pub use pi::{encode_pi, parse_pi, HoleInterface, PiTerm};

pub const BUILTIN_THEORIES: [&str; 4] = ["linear_lambda", "lambda_sharing", "lambda_two_sorted", "pi"];

fn f(s: &str) -> Formula {
    crate::formula::parse_formula(s, None).expect("built-in formula")
}

pub fn builtin_theory(name: &str) -> Result<Theory> {
    let lambda = || {
        SmcSignature::new()
            .with_sort("t")
            .with_op("app", f("t * t"), f("t"))
    };
    let t = match name {
        "linear_lambda" => Theory::from_signature(lambda().with_op("lam", f("t -o t"), f("t"))),
        "lambda_sharing" => {
            let sig = lambda()
                .with_op("lam", f("t -o t"), f("t"))
                .with_op("c", f("t"), f("t * t"))
                .with_op("w", f("t"), Formula::Unit);
            let mut t = Theory::from_signature(sig);
            t.comonoids.push(ComonoidDecl {
                sort: Sort::new("t"),
                copy: "c".into(),
                discard: "w".into(),
            });
            t
        }
        "lambda_two_sorted" => {
            let sig = lambda()
                .with_sort("v")
                .with_op("lam", f("v -o t"), f("t"))
                .with_op("c", f("v"), f("v * v"))
                .with_op("w", f("v"), Formula::Unit)
                .with_op("d", f("v"), f("t"));
            let mut t = Theory::from_signature(sig);
            t.comonoids.push(ComonoidDecl {
                sort: Sort::new("v"),
                copy: "c".into(),
                discard: "w".into(),
            });
            t
        }
        "pi" => {
            let sig = SmcSignature::new()
                .with_sort("v")
                .with_sort("t")
                .with_op("s", f("v * (v * t)"), f("t"))
                .with_op("g", f("v * (v -o t)"), f("t"))
                .with_op("c", f("v"), f("v * v"))
                .with_op("w", f("v"), Formula::Unit)
                .with_op("par", f("t * t"), f("t"))
                .with_op("zero", Formula::Unit, f("t"))
                .with_op("nu", Formula::Unit, f("v"));
            pi_structure(Theory::from_signature(sig))
        }
        other => return Err(Error::UnknownTheory(other.to_string())),
    };
    t.validate()?;
    Ok(t)
}

/// Adds the π-style structure on sorts `v` and `t` — `(par, zero)`,
/// `(c, w)` and `nu` — to a theory whose signature declares those ops.
pub(crate) fn pi_structure(mut t: Theory) -> Theory {
    t.monoids.push(MonoidDecl {
        sort: Sort::new("t"),
        mul: "par".into(),
        unit: "zero".into(),
    });
    t.comonoids.push(ComonoidDecl {
        sort: Sort::new("v"),
        copy: "c".into(),
        discard: "w".into(),
    });
    t.nus.push(NuDecl {
        nu: "nu".into(),
        discard: "w".into(),
    });
    t
}

#[cfg(test)]
mod tests;
