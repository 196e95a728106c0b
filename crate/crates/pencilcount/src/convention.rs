//! Real multiplicity rules for markings with conjugate pairs.
//!
//! Two families are implemented.
//!
//! `Elevator` rules look at each pair block on its own: a pair must sit on two
//! elements touching a common floor, a covered bounded elevator of weight `w`
//! contributes `sigma(w) * w`, and an uncovered one contributes
//! `(-1)^((w-1)/2)` (zero for even `w`).
//!
//! The `Swap` rule reads the pair blocks of a marking as a real structure on
//! the diagram. A block is either a floor together with an adjacent edge, or
//! two distinct elements of the same kind that are exchanged by complex
//! conjugation. The exchanges must generate an automorphism of the diagram.
//! Factors:
//! - floor with adjacent bounded elevator of weight `w`: `w` if odd, else 0;
//! - exchanged bounded elevators of weight `w`: `w^2`;
//! - exchanged floors `F`, `F'`: `(-1)^{F.F'}`, the parity of the number of
//!   real intersection points of two conjugate floors (the sum of weights of
//!   all edges at `F`);
//! - fixed bounded elevators outside any block: 1 if odd, 0 if even;
//! - everything else: 1.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diagram::{Element, ElementKind, FloorDiagram};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SigmaRule {
    /// `(-1)^(w+1)`
    Alt,
    /// `(-1)^(w(w-1)/2)`
    Binom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairScope {
    /// Two edges may pair when they share any floor.
    Incident,
    /// Two edges may pair only when they leave the same floor.
    OriginOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Convention {
    Elevator { sigma: SigmaRule, scope: PairScope },
    Swap,
}

/// Result of running the convention fit against the table rows with d <= 9;
/// see `verify::fit_sign_convention`.
pub const FITTED: Convention = Convention::Swap;

impl Convention {
    pub const ALL: [Convention; 5] = [
        Convention::Elevator { sigma: SigmaRule::Alt, scope: PairScope::Incident },
        Convention::Elevator { sigma: SigmaRule::Alt, scope: PairScope::OriginOnly },
        Convention::Elevator { sigma: SigmaRule::Binom, scope: PairScope::Incident },
        Convention::Elevator { sigma: SigmaRule::Binom, scope: PairScope::OriginOnly },
        Convention::Swap,
    ];

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&c| c == self).unwrap()
    }

    pub fn id(self) -> &'static str {
        match self {
            Convention::Elevator { sigma: SigmaRule::Alt, scope: PairScope::Incident } => "alt-incident",
            Convention::Elevator { sigma: SigmaRule::Alt, scope: PairScope::OriginOnly } => "alt-origin",
            Convention::Elevator { sigma: SigmaRule::Binom, scope: PairScope::Incident } => "binom-incident",
            Convention::Elevator { sigma: SigmaRule::Binom, scope: PairScope::OriginOnly } => "binom-origin",
            Convention::Swap => "swap",
        }
    }

    pub fn uses_involutions(self) -> bool {
        matches!(self, Convention::Swap)
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|c| c.id() == s.to_ascii_lowercase())
            .ok_or_else(|| {
                let ids: Vec<&str> = Self::ALL.iter().map(|c| c.id()).collect();
                Error::input(format!("unknown convention {:?}; expected one of {}", s, ids.join(", ")))
            })
    }
}

pub fn sigma(rule: SigmaRule, w: u32) -> i64 {
    let w = w as i64;
    match rule {
        SigmaRule::Alt => if (w + 1) % 2 == 0 { 1 } else { -1 },
        SigmaRule::Binom => if (w * (w - 1) / 2) % 2 == 0 { 1 } else { -1 },
    }
}

/// Factor of a bounded elevator that is not part of any pair block.
pub fn lone_elevator(conv: Convention, w: u32) -> i64 {
    if w % 2 == 0 {
        return 0;
    }
    match conv {
        Convention::Elevator { .. } => if (w - 1) / 2 % 2 == 0 { 1 } else { -1 },
        Convention::Swap => 1,
    }
}

/// Block rule for `Elevator` conventions. `None` if the two elements may not
/// form a block.
pub fn elevator_pair(
    sigma_rule: SigmaRule,
    scope: PairScope,
    d: &FloorDiagram,
    x: &Element,
    y: &Element,
) -> Option<i64> {
    use ElementKind::*;
    let allowed = match (x.kind, y.kind) {
        (Floor(_), Floor(_)) => false,
        (Floor(v), _) => y.touches(d, v),
        (_, Floor(v)) => x.touches(d, v),
        _ => match scope {
            PairScope::Incident => {
                let (p, q) = x.incident_floors(d);
                y.touches(d, p) || q.is_some_and(|q| y.touches(d, q))
            }
            PairScope::OriginOnly => match (source(d, x), source(d, y)) {
                (Some(p), Some(q)) => p == q,
                _ => false,
            },
        },
    };
    if !allowed {
        return None;
    }
    let f = |e: &Element| if e.is_bounded() { sigma(sigma_rule, e.weight) * e.weight as i64 } else { 1 };
    Some(f(x) * f(y))
}

fn source(d: &FloorDiagram, e: &Element) -> Option<usize> {
    match e.kind {
        ElementKind::Elevator(i) => Some(d.elevators[i].src),
        ElementKind::Top(v) => Some(v),
        _ => None,
    }
}

/// Factor of a block made of a floor and an adjacent edge (fixed by
/// conjugation) under the `Swap` rule.
pub fn swap_adjacent(w: u32) -> i64 {
    if w % 2 == 1 {
        w as i64
    } else {
        0
    }
}

/// Factor of a block of two exchanged bounded elevators of weight `w`.
pub fn swap_exchanged_elevators(w: u32) -> i64 {
    (w * w) as i64
}

/// Sign of a block of two exchanged floors.
pub fn swap_exchanged_floors(d: &FloorDiagram, v: usize) -> i64 {
    let touching: u32 = d.bottom[v]
        + d.top[v]
        + d.elevators.iter().filter(|e| e.src == v || e.dst == v).map(|e| e.weight).sum::<u32>();
    if touching % 2 == 0 {
        1
    } else {
        -1
    }
}
