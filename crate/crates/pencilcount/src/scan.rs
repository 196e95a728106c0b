//! Fast counting engine.
//!
//! Positions are scanned from the bottom. For one diagram the state after `k`
//! positions is the down-set of elements already labeled: a mask of placed
//! floors and elevators plus, per floor, how many of its bottom and top edges
//! are placed. Parallel unbounded edges are interchangeable, so they are
//! tracked as counts and placed with a multiplicity equal to the number still
//! free. States are merged per position and carry the signed number of
//! labeled prefixes reaching them; the final count is divided by the
//! automorphism order.
//!
//! Under the `Swap` convention the scan is repeated once per involutive floor
//! automorphism, which fixes in advance what conjugation does to every element.

use std::collections::HashMap;
use std::hash::BuildHasherDefault;

use num_bigint::BigInt;
use rustc_hash::FxHasher;

use crate::canon;
use crate::convention::{self, Convention};
use crate::diagram::{enumerate_diagrams, Bidegree, Element, ElementKind, FloorDiagram};
use crate::error::{Error, Result};
use crate::marking::{LabelLayout, Slot};
use crate::par;

type Map = HashMap<u128, i128, BuildHasherDefault<FxHasher>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    Complex,
    Real { layout_s: usize, conv: Convention },
    RealLayout { layout: LabelLayout, conv: Convention },
}

#[derive(Clone, Copy, Debug)]
pub struct ScanOptions {
    /// Largest number of distinct states allowed at one position.
    pub max_states: usize,
    /// Scan the diagrams one after another on the calling thread.
    pub sequential: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { max_states: 20_000_000, sequential: false }
    }
}

/// Per-position statistics of one or many scans.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct ScanStats {
    pub states_per_position: Vec<u64>,
    pub peak_states: u64,
    pub transitions: u64,
    pub scans: u64,
}

impl ScanStats {
    fn absorb(&mut self, other: &ScanStats) {
        if self.states_per_position.len() < other.states_per_position.len() {
            self.states_per_position.resize(other.states_per_position.len(), 0);
        }
        for (a, b) in self.states_per_position.iter_mut().zip(&other.states_per_position) {
            *a += b;
        }
        self.peak_states = self.peak_states.max(other.peak_states);
        self.transitions += other.transitions;
        self.scans += other.scans;
    }
}

/// Element classes: floors, elevators, then bottom and top edges grouped by
/// floor.
struct Classes<'a> {
    d: &'a FloorDiagram,
    b: usize,
    e: usize,
    bits: u32,
    incoming: Vec<u64>,
}

impl<'a> Classes<'a> {
    fn new(d: &'a FloorDiagram) -> Result<Self> {
        let b = d.floors;
        let e = d.elevators.len();
        let most = d.bottom.iter().chain(&d.top).copied().max().unwrap_or(0);
        let bits = 32 - most.leading_zeros();
        if b + e + 2 * b * bits as usize > 128 {
            return Err(Error::Resource(format!("diagram with {} floors does not fit the 128-bit scan state", b)));
        }
        let mut incoming = vec![0u64; b];
        for (i, el) in d.elevators.iter().enumerate() {
            incoming[el.dst] |= 1 << i;
        }
        Ok(Classes { d, b, e, bits, incoming })
    }

    fn count(&self) -> usize {
        3 * self.b + self.e
    }

    fn kind(&self, c: usize) -> ElementKind {
        let (b, e) = (self.b, self.e);
        if c < b {
            ElementKind::Floor(c)
        } else if c < b + e {
            ElementKind::Elevator(c - b)
        } else if c < 2 * b + e {
            ElementKind::Bottom(c - b - e)
        } else {
            ElementKind::Top(c - 2 * b - e)
        }
    }

    fn element(&self, c: usize) -> Element {
        let kind = self.kind(c);
        let weight = match kind {
            ElementKind::Elevator(i) => self.d.elevators[i].weight,
            _ => 1,
        };
        Element { kind, weight }
    }

    fn bot_shift(&self, v: usize) -> u32 {
        (self.b + self.e) as u32 + v as u32 * self.bits
    }

    fn top_shift(&self, v: usize) -> u32 {
        (self.b + self.e) as u32 + (self.b + v) as u32 * self.bits
    }

    fn field(&self, s: u128, shift: u32) -> u32 {
        ((s >> shift) & ((1u128 << self.bits) - 1)) as u32
    }

    /// Classes that can be labeled next, with the number of interchangeable
    /// elements available in each.
    fn available(&self, s: u128, out: &mut Vec<(usize, u32)>) {
        out.clear();
        let d = self.d;
        let fl = s & ((1u128 << self.b) - 1);
        let el = ((s >> self.b) & ((1u128 << self.e) - 1)) as u64;
        for v in 0..self.b {
            let placed = fl >> v & 1 == 1;
            let bots = self.field(s, self.bot_shift(v));
            if !placed && bots == d.bottom[v] && el & self.incoming[v] == self.incoming[v] {
                out.push((v, 1));
            }
            if bots < d.bottom[v] {
                out.push((self.b + self.e + v, d.bottom[v] - bots));
            }
            if placed {
                let tops = self.field(s, self.top_shift(v));
                if tops < d.top[v] {
                    out.push((2 * self.b + self.e + v, d.top[v] - tops));
                }
            }
        }
        for (i, x) in d.elevators.iter().enumerate() {
            if el >> i & 1 == 0 && fl >> x.src & 1 == 1 {
                out.push((self.b + i, 1));
            }
        }
    }

    fn place(&self, s: u128, c: usize) -> u128 {
        let (b, e) = (self.b, self.e);
        if c < b + e {
            s | 1u128 << c
        } else if c < 2 * b + e {
            s + (1u128 << self.bot_shift(c - b - e))
        } else {
            s + (1u128 << self.top_shift(c - 2 * b - e))
        }
    }
}

/// Factors for single labels and for pair blocks, indexed by class.
struct Rule {
    single: Vec<i64>,
    block: Vec<Vec<i64>>,
}

impl Rule {
    fn complex(cl: &Classes) -> Rule {
        let single = (0..cl.count())
            .map(|c| {
                let e = cl.element(c);
                if e.is_bounded() {
                    (e.weight * e.weight) as i64
                } else {
                    1
                }
            })
            .collect();
        Rule { single, block: Vec::new() }
    }

    fn elevator(cl: &Classes, conv: Convention) -> Rule {
        let Convention::Elevator { sigma, scope } = conv else { unreachable!() };
        let k = cl.count();
        let els: Vec<Element> = (0..k).map(|c| cl.element(c)).collect();
        let single = els
            .iter()
            .map(|e| if e.is_bounded() { convention::lone_elevator(conv, e.weight) } else { 1 })
            .collect();
        let block = (0..k)
            .map(|x| {
                (0..k)
                    .map(|y| convention::elevator_pair(sigma, scope, cl.d, &els[x], &els[y]).unwrap_or(0))
                    .collect()
            })
            .collect();
        Rule { single, block }
    }

    fn swap(cl: &Classes, p: &[usize]) -> Rule {
        let d = cl.d;
        let k = cl.count();
        let b = cl.b;
        let e = cl.e;
        let fixed: Vec<bool> = (0..k)
            .map(|c| match cl.kind(c) {
                ElementKind::Floor(v) | ElementKind::Bottom(v) | ElementKind::Top(v) => p[v] == v,
                ElementKind::Elevator(i) => p[d.elevators[i].src] == d.elevators[i].src && p[d.elevators[i].dst] == d.elevators[i].dst,
            })
            .collect();
        let image: Vec<usize> = (0..k)
            .map(|c| match cl.kind(c) {
                ElementKind::Floor(v) => p[v],
                ElementKind::Elevator(i) => {
                    let x = d.elevators[i];
                    let j = d.elevators.iter().position(|y| y.src == p[x.src] && y.dst == p[x.dst]).unwrap();
                    b + j
                }
                ElementKind::Bottom(v) => b + e + p[v],
                ElementKind::Top(v) => 2 * b + e + p[v],
            })
            .collect();
        let single = (0..k)
            .map(|c| {
                let el = cl.element(c);
                if !fixed[c] {
                    0
                } else if el.is_bounded() {
                    convention::lone_elevator(Convention::Swap, el.weight)
                } else {
                    1
                }
            })
            .collect();
        let block = (0..k)
            .map(|x| {
                (0..k)
                    .map(|y| {
                        let (ex, ey) = (cl.element(x), cl.element(y));
                        match (fixed[x], fixed[y]) {
                            (false, false) => {
                                if image[x] != y {
                                    0
                                } else {
                                    match ex.kind {
                                        ElementKind::Floor(v) => convention::swap_exchanged_floors(d, v),
                                        ElementKind::Elevator(_) => convention::swap_exchanged_elevators(ex.weight),
                                        _ => 1,
                                    }
                                }
                            }
                            (true, true) => match (ex.kind, ey.kind) {
                                (ElementKind::Floor(_), ElementKind::Floor(_)) => 0,
                                (ElementKind::Floor(v), _) | (_, ElementKind::Floor(v)) => {
                                    let other = if ex.is_floor() { ey } else { ex };
                                    if !other.touches(d, v) {
                                        0
                                    } else if other.is_bounded() {
                                        convention::swap_adjacent(other.weight)
                                    } else {
                                        1
                                    }
                                }
                                (ElementKind::Bottom(u), ElementKind::Bottom(v))
                                | (ElementKind::Top(u), ElementKind::Top(v))
                                    if u == v =>
                                {
                                    1
                                }
                                _ => 0,
                            },
                            _ => 0,
                        }
                    })
                    .collect()
            })
            .collect();
        Rule { single, block }
    }
}

fn run(cl: &Classes, rule: &Rule, slots: &[Slot], opts: &ScanOptions, stats: &mut ScanStats) -> Result<i128> {
    let overflow = || Error::Resource(format!("labeled count overflows 128 bits at bidegree {}", cl.d.bidegree()));
    let mut cur = Map::default();
    cur.insert(0, 1);
    let mut avail = Vec::new();
    let mut avail2 = Vec::new();
    let mut pos = 0;
    stats.scans += 1;
    while pos < slots.len() {
        let mut next = Map::default();
        let pair = slots[pos] == Slot::PairFirst;
        for (&s, &val) in &cur {
            cl.available(s, &mut avail);
            for &(x, cx) in &avail {
                if !pair {
                    let f = rule.single[x];
                    if f == 0 {
                        continue;
                    }
                    let add = val.checked_mul(cx as i128 * f as i128).ok_or_else(overflow)?;
                    let slot = next.entry(cl.place(s, x)).or_insert(0);
                    *slot = slot.checked_add(add).ok_or_else(overflow)?;
                    stats.transitions += 1;
                    continue;
                }
                let s1 = cl.place(s, x);
                cl.available(s1, &mut avail2);
                for &(y, cy) in &avail2 {
                    let f = rule.block[x][y];
                    if f == 0 {
                        continue;
                    }
                    let mult = (cx as i128 * cy as i128).checked_mul(f as i128).ok_or_else(overflow)?;
                    let add = val.checked_mul(mult).ok_or_else(overflow)?;
                    let slot = next.entry(cl.place(s1, y)).or_insert(0);
                    *slot = slot.checked_add(add).ok_or_else(overflow)?;
                    stats.transitions += 1;
                }
            }
        }
        next.retain(|_, v| *v != 0);
        if next.len() > opts.max_states {
            return Err(Error::Resource(format!(
                "{} states at one position for bidegree {} (cap {})",
                next.len(),
                cl.d.bidegree(),
                opts.max_states
            )));
        }
        pos += if pair { 2 } else { 1 };
        stats.states_per_position.push(next.len() as u64);
        stats.peak_states = stats.peak_states.max(next.len() as u64);
        cur = next;
    }
    Ok(cur.values().sum())
}

fn layout_for(d: &FloorDiagram, mode: &Mode) -> Result<Option<(LabelLayout, Convention)>> {
    let n = d.element_count();
    match mode {
        Mode::Complex => Ok(None),
        Mode::Real { layout_s, conv } => Ok(Some((LabelLayout::top(n, *layout_s)?, *conv))),
        Mode::RealLayout { layout, conv } => {
            if layout.n() != n {
                return Err(Error::input(format!("layout has {} positions, diagram {} elements", layout.n(), n)));
            }
            Ok(Some((layout.clone(), *conv)))
        }
    }
}

/// Contribution of a single diagram, with statistics.
pub fn diagram_contribution_with_stats(
    d: &FloorDiagram,
    mode: &Mode,
    opts: &ScanOptions,
) -> Result<(i128, ScanStats)> {
    let cl = Classes::new(d)?;
    let mut stats = ScanStats::default();
    let labeled = match layout_for(d, mode)? {
        None => {
            let slots = vec![Slot::Single; d.element_count()];
            run(&cl, &Rule::complex(&cl), &slots, opts, &mut stats)?
        }
        Some((layout, conv)) => {
            let slots = layout.slots();
            if conv.uses_involutions() {
                let mut total = 0i128;
                for p in canon::floor_involutions(d) {
                    let mut st = ScanStats::default();
                    total += run(&cl, &Rule::swap(&cl, &p), &slots, opts, &mut st)?;
                    stats.absorb(&st);
                }
                total
            } else {
                run(&cl, &Rule::elevator(&cl, conv), &slots, opts, &mut stats)?
            }
        }
    };
    let aut = d.automorphism_count() as i128;
    if labeled % aut != 0 {
        return Err(Error::Contract(format!("labeled total {} not divisible by {} for {:?}", labeled, aut, d)));
    }
    Ok((labeled / aut, stats))
}

pub fn diagram_contribution(d: &FloorDiagram, mode: &Mode) -> Result<i128> {
    diagram_contribution_with_stats(d, mode, &ScanOptions::default()).map(|x| x.0)
}

/// Sum of diagram contributions over all diagrams of the bidegree. In complex
/// mode the per-diagram value already includes the complex multiplicity.
pub fn scan_count(bd: Bidegree, mode: &Mode) -> Result<BigInt> {
    scan_count_with(bd, mode, &ScanOptions::default())
}

pub fn scan_count_with(bd: Bidegree, mode: &Mode, opts: &ScanOptions) -> Result<BigInt> {
    if let Mode::Real { layout_s, .. } = mode {
        if 2 * layout_s + 1 > bd.points() {
            return Err(Error::input(format!(
                "{} conjugate pairs need at least {} points; bidegree {} has {}",
                layout_s,
                2 * layout_s + 1,
                bd,
                bd.points()
            )));
        }
    }
    let ds = enumerate_diagrams(bd);
    let parts = par::map_with(&ds, opts.sequential, |d| diagram_contribution_with_stats(d, mode, opts).map(|x| x.0));
    let mut total = BigInt::from(0);
    for p in parts {
        total += p?;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct StateReport {
    pub a: u32,
    pub b: u32,
    pub tree_shapes: u64,
    /// Generator labelings before deduplication, capped at `max_raw + 1`.
    pub raw_labelings: u64,
    /// Every diagram was scanned; otherwise a per-shape sample.
    pub exact: bool,
    pub diagrams_scanned: u64,
    pub peak_states: u64,
    pub transitions: u64,
    /// Summed over the scanned diagrams.
    pub states_per_position: Vec<u64>,
    pub peak_bytes_estimate: u64,
}

/// Bytes per stored state: packed key, accumulator and table overhead.
const STATE_BYTES: u64 = 48;

/// Complex scan statistics. Bidegrees whose generator walk exceeds `max_raw`
/// labelings are covered by up to `per_shape` diagrams per tree shape.
pub fn state_space_report(bd: Bidegree, opts: &ScanOptions, max_raw: u64, per_shape: usize) -> Result<StateReport> {
    let raw = crate::diagram::raw_labelings(bd, max_raw);
    let exact = raw <= max_raw;
    let ds = if exact { enumerate_diagrams(bd) } else { crate::diagram::sample_diagrams(bd, per_shape) };
    let parts = par::map_with(&ds, opts.sequential, |d| diagram_contribution_with_stats(d, &Mode::Complex, opts).map(|x| x.1));
    let mut stats = ScanStats::default();
    for p in parts {
        stats.absorb(&p?);
    }
    Ok(StateReport {
        a: bd.a,
        b: bd.b,
        tree_shapes: if bd.b == 0 { 0 } else { crate::diagram::rooted_trees(bd.b as usize).len() as u64 },
        raw_labelings: raw,
        exact,
        diagrams_scanned: ds.len() as u64,
        peak_states: stats.peak_states,
        transitions: stats.transitions,
        peak_bytes_estimate: stats.peak_states * STATE_BYTES,
        states_per_position: stats.states_per_position,
    })
}
