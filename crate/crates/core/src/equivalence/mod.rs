//! The quotients on nets: rewiring, equations of a theory, and the
//! economized treatment of commutative (co)monoids.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::net::Net;
use crate::signature::Theory;

mod collapse;
mod matching;
mod rewiring;

pub(crate) use collapse::assign_units;
pub use collapse::{collapse, collapsed_equal, CollapsedNet};
pub use matching::{apply_equation, find_occurrences, Direction, EquationOccurrence};
pub use rewiring::{rewiring_canonical, rewiring_class, rewiring_equivalent, rewiring_equivalent_in, rewiring_moves};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Equal,
    Distinct,
    Unknown,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Outcome::Equal => "equal",
            Outcome::Distinct => "distinct",
            Outcome::Unknown => "unknown",
        })
    }
}

/// Key of a net's class under the structural laws and rewiring.
pub fn structural_key(n: &Net, t: &Theory) -> Result<Net> {
    let c = collapse(n, t)?;
    Ok(rewiring_canonical(&c.net, &c.mode))
}

/// Bidirectional search through equation applications (both directions)
/// and rewiring, over collapsed forms. `budget` bounds the number of
/// states expanded. `Distinct` means a whole class was exhausted.
pub fn theory_equivalent_bounded(f: &Net, g: &Net, t: &Theory, budget: usize) -> Result<Outcome> {
    if f.dom != g.dom || f.cod != g.cod {
        return Err(Error::BoundaryMismatch(format!(
            "{} -> {} versus {} -> {}",
            f.dom, f.cod, g.dom, g.cod
        )));
    }
    let mode = t.wiring_mode();
    let starts = [structural_key(f, t)?, structural_key(g, t)?];
    if starts[0] == starts[1] {
        return Ok(Outcome::Equal);
    }
    let mut seen = [BTreeSet::from([starts[0].clone()]), BTreeSet::from([starts[1].clone()])];
    let mut queues = [VecDeque::from([starts[0].clone()]), VecDeque::from([starts[1].clone()])];
    let mut expanded = 0;
    loop {
        for side in 0..2 {
            let Some(cur) = queues[side].pop_front() else {
                return Ok(Outcome::Distinct);
            };
            if expanded >= budget {
                return Ok(Outcome::Unknown);
            }
            expanded += 1;
            for member in rewiring_class(&cur, &mode) {
                for occ in find_occurrences(&member, t) {
                    let Ok(next) = apply_equation(&member, &occ, t, &mode) else { continue };
                    let key = structural_key(&next, t)?;
                    if seen[1 - side].contains(&key) {
                        return Ok(Outcome::Equal);
                    }
                    if seen[side].insert(key.clone()) {
                        queues[side].push_back(key);
                    }
                }
            }
        }
    }
}
