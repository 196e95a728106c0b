//! Floor diagrams over the rectangle `[0,a] x [0,b]`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::canon;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bidegree {
    pub a: u32,
    pub b: u32,
}

impl Bidegree {
    pub fn new(a: u32, b: u32) -> Result<Self> {
        if a + b == 0 {
            return Err(Error::input("bidegree (0,0) is empty"));
        }
        Ok(Bidegree { a, b })
    }

    /// Number of point constraints, `2(a+b) - 1`.
    pub fn points(self) -> usize {
        2 * (self.a + self.b) as usize - 1
    }

    pub fn swapped(self) -> Self {
        Bidegree { a: self.b, b: self.a }
    }

    /// Largest admissible number of conjugate pairs.
    pub fn max_pairs(self) -> usize {
        (self.points() - 1) / 2
    }
}

impl fmt::Display for Bidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Elevator {
    pub src: usize,
    pub dst: usize,
    pub weight: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementKind {
    Floor(usize),
    /// Index into `FloorDiagram::elevators`.
    Elevator(usize),
    /// Unbounded edge entering the given floor from below.
    Bottom(usize),
    /// Unbounded edge leaving the given floor upwards.
    Top(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Element {
    pub kind: ElementKind,
    pub weight: u32,
}

impl Element {
    /// Floors this element touches. A floor touches itself.
    pub fn incident_floors(&self, d: &FloorDiagram) -> (usize, Option<usize>) {
        match self.kind {
            ElementKind::Floor(v) | ElementKind::Bottom(v) | ElementKind::Top(v) => (v, None),
            ElementKind::Elevator(i) => {
                let e = d.elevators[i];
                (e.src, Some(e.dst))
            }
        }
    }

    pub fn touches(&self, d: &FloorDiagram, v: usize) -> bool {
        let (x, y) = self.incident_floors(d);
        x == v || y == Some(v)
    }

    pub fn is_floor(&self) -> bool {
        matches!(self.kind, ElementKind::Floor(_))
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self.kind, ElementKind::Elevator(_))
    }
}

/// A genus-0 floor diagram. Floors are numbered in a topological order, so
/// every elevator satisfies `src < dst`. Unbounded edges all have weight 1 and
/// are stored as per-floor counts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FloorDiagram {
    pub floors: usize,
    pub elevators: Vec<Elevator>,
    pub bottom: Vec<u32>,
    pub top: Vec<u32>,
}

impl FloorDiagram {
    pub fn new(floors: usize, elevators: Vec<Elevator>, bottom: Vec<u32>, top: Vec<u32>) -> Result<Self> {
        if floors == 0 {
            return Err(Error::input("a diagram needs at least one floor"));
        }
        if bottom.len() != floors || top.len() != floors {
            return Err(Error::input("bottom/top counts must have one entry per floor"));
        }
        if elevators.len() + 1 != floors {
            return Err(Error::input(format!(
                "{} floors need {} elevators, got {}",
                floors,
                floors - 1,
                elevators.len()
            )));
        }
        let mut root: Vec<usize> = (0..floors).collect();
        fn find(r: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while r[x] != x {
                r[x] = r[r[x]];
                x = r[x];
            }
            x
        }
        for e in &elevators {
            if e.src >= e.dst || e.dst >= floors {
                return Err(Error::input(format!("elevator {:?} is not ordered upwards", e)));
            }
            if e.weight == 0 {
                return Err(Error::input("elevator weights are positive"));
            }
            let (x, y) = (find(&mut root, e.src), find(&mut root, e.dst));
            if x == y {
                return Err(Error::input("elevators must form a tree"));
            }
            root[x] = y;
        }
        let d = FloorDiagram { floors, elevators, bottom, top };
        if let Some(v) = (0..floors).find(|&v| d.divergence(v) != 0) {
            return Err(Error::input(format!("floor {} has divergence {}", v, d.divergence(v))));
        }
        if d.bottom.iter().sum::<u32>() != d.top.iter().sum::<u32>() {
            return Err(Error::Contract("bottom and top totals differ".into()));
        }
        Ok(d)
    }

    pub fn bidegree(&self) -> Bidegree {
        Bidegree { a: self.bottom.iter().sum(), b: self.floors as u32 }
    }

    /// Outgoing minus incoming weight at floor `v`, unbounded edges included.
    pub fn divergence(&self, v: usize) -> i64 {
        let mut div = self.top[v] as i64 - self.bottom[v] as i64;
        for e in &self.elevators {
            if e.src == v {
                div += e.weight as i64;
            }
            if e.dst == v {
                div -= e.weight as i64;
            }
        }
        div
    }

    pub fn element_count(&self) -> usize {
        self.floors + self.elevators.len() + (self.bottom.iter().sum::<u32>() + self.top.iter().sum::<u32>()) as usize
    }

    /// Elements in a fixed order: floors, elevators, bottom edges, top edges.
    pub fn elements(&self) -> Vec<Element> {
        let mut out = Vec::with_capacity(self.element_count());
        out.extend((0..self.floors).map(|v| Element { kind: ElementKind::Floor(v), weight: 1 }));
        out.extend(
            self.elevators
                .iter()
                .enumerate()
                .map(|(i, e)| Element { kind: ElementKind::Elevator(i), weight: e.weight }),
        );
        for v in 0..self.floors {
            for _ in 0..self.bottom[v] {
                out.push(Element { kind: ElementKind::Bottom(v), weight: 1 });
            }
        }
        for v in 0..self.floors {
            for _ in 0..self.top[v] {
                out.push(Element { kind: ElementKind::Top(v), weight: 1 });
            }
        }
        out
    }

    pub fn bottom_edges(&self) -> Vec<usize> {
        (0..self.floors).flat_map(|v| std::iter::repeat(v).take(self.bottom[v] as usize)).collect()
    }

    pub fn top_edges(&self) -> Vec<usize> {
        (0..self.floors).flat_map(|v| std::iter::repeat(v).take(self.top[v] as usize)).collect()
    }

    /// Product of squared elevator weights.
    pub fn complex_multiplicity(&self) -> BigUint {
        self.elevators.iter().fold(BigUint::from(1u32), |acc, e| acc * BigUint::from(e.weight * e.weight))
    }

    pub fn has_even_elevator(&self) -> bool {
        self.elevators.iter().any(|e| e.weight % 2 == 0)
    }

    /// Order of the automorphism group, unbounded edges included.
    pub fn automorphism_count(&self) -> u128 {
        canon::floor_automorphisms(self) * self.unbounded_symmetry()
    }

    /// `prod bottom_v! * top_v!`: permutations of parallel unbounded edges.
    pub fn unbounded_symmetry(&self) -> u128 {
        let fact = |k: u32| (1..=k as u128).product::<u128>();
        self.bottom.iter().chain(&self.top).map(|&k| fact(k)).product()
    }

    pub fn canonical_encoding(&self) -> Vec<u8> {
        canon::encoding(self)
    }

    /// Relabel floors so that isomorphic diagrams become identical.
    pub fn canonical_form(&self) -> FloorDiagram {
        let order = canon::canonical_order(self);
        self.relabel(&order)
    }

    /// `order[k]` is the old index of the floor that becomes floor `k`.
    pub fn relabel(&self, order: &[usize]) -> FloorDiagram {
        let mut pos = vec![0; self.floors];
        for (k, &v) in order.iter().enumerate() {
            pos[v] = k;
        }
        let mut elevators: Vec<Elevator> = self
            .elevators
            .iter()
            .map(|e| Elevator { src: pos[e.src], dst: pos[e.dst], weight: e.weight })
            .collect();
        elevators.sort();
        FloorDiagram {
            floors: self.floors,
            elevators,
            bottom: order.iter().map(|&v| self.bottom[v]).collect(),
            top: order.iter().map(|&v| self.top[v]).collect(),
        }
    }

    /// Total weight crossing the horizontal cut above each proper prefix of the
    /// floor order: bounded elevators that span it, top edges from below and
    /// bottom edges into floors above. Always `a` for a valid diagram.
    pub fn cut_flows(&self) -> Vec<u32> {
        (1..self.floors)
            .map(|k| {
                let bounded: u32 = self.elevators.iter().filter(|e| e.src < k && e.dst >= k).map(|e| e.weight).sum();
                let tops: u32 = self.top[..k].iter().sum();
                let bottoms: u32 = self.bottom[k..].iter().sum();
                bounded + tops + bottoms
            })
            .collect()
    }
}

/// Rooted trees on `n` vertices as parent arrays, one per isomorphism class
/// (level sequences in the Beyer-Hedetniemi order). Vertex 0 is the root and
/// every vertex comes after its parent.
pub fn rooted_trees(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return Vec::new();
    }
    let mut level: Vec<usize> = (1..=n).collect();
    let mut out = Vec::new();
    loop {
        let mut parent = vec![usize::MAX; n];
        for i in 1..n {
            parent[i] = (0..i).rev().find(|&j| level[j] + 1 == level[i]).unwrap();
        }
        out.push(parent);
        let p = match (0..n).rev().find(|&i| level[i] > 2) {
            Some(p) => p,
            None => break,
        };
        let q = (0..p).rev().find(|&j| level[j] + 1 == level[p]).unwrap();
        for i in p..n {
            level[i] = level[i - (p - q)];
        }
    }
    out
}

/// All floor diagrams of the given bidegree, deduplicated and sorted by
/// canonical encoding.
///
/// `(1,0)` is treated like `(0,1)`: the single floor with no edges.
pub fn enumerate_diagrams(bd: Bidegree) -> Vec<FloorDiagram> {
    if bd.b == 0 {
        return if bd.a == 1 { vec![single_floor()] } else { Vec::new() };
    }
    let mut seen: BTreeMap<Vec<u8>, FloorDiagram> = BTreeMap::new();
    for parent in rooted_trees(bd.b as usize) {
        for_each_labeling(&parent, bd.a, |bot, top, excess| {
            let d = assemble(&parent, bot, top, excess);
            let d = d.canonical_form();
            seen.entry(d.canonical_encoding()).or_insert(d);
            true
        });
    }
    seen.into_values().collect()
}

/// Number of labeled rooted-tree labelings that the generator walks before
/// deduplication, counted up to `limit`. An upper bound on the diagram count.
pub fn raw_labelings(bd: Bidegree, limit: u64) -> u64 {
    if bd.b == 0 {
        return (bd.a == 1) as u64;
    }
    let mut count = 0u64;
    for parent in rooted_trees(bd.b as usize) {
        for_each_labeling(&parent, bd.a, |_, _, _| {
            count += 1;
            count <= limit
        });
        if count > limit {
            break;
        }
    }
    count.min(limit + 1)
}

/// Up to `per_shape` diagrams for each rooted tree shape, deduplicated and
/// sorted like `enumerate_diagrams`. Deterministic.
pub fn sample_diagrams(bd: Bidegree, per_shape: usize) -> Vec<FloorDiagram> {
    if bd.b == 0 {
        return enumerate_diagrams(bd);
    }
    let mut seen: BTreeMap<Vec<u8>, FloorDiagram> = BTreeMap::new();
    for parent in rooted_trees(bd.b as usize) {
        let mut taken = 0;
        for_each_labeling(&parent, bd.a, |bot, top, excess| {
            let d = assemble(&parent, bot, top, excess).canonical_form();
            seen.entry(d.canonical_encoding()).or_insert(d);
            taken += 1;
            taken < per_shape
        });
    }
    seen.into_values().collect()
}

fn single_floor() -> FloorDiagram {
    FloorDiagram { floors: 1, elevators: Vec::new(), bottom: vec![0], top: vec![0] }
}

/// Distribute `a` bottom and `a` top edges over the vertices of a rooted tree
/// so that every proper subtree has nonzero net inflow. Edge weights and
/// orientations are forced by those net inflows.
/// `f` returns `false` to stop the walk.
fn for_each_labeling<F: FnMut(&[u32], &[u32], &[i64]) -> bool>(parent: &[usize], a: u32, mut f: F) {
    let n = parent.len();
    let mut children = vec![Vec::new(); n];
    for i in 1..n {
        children[parent[i]].push(i);
    }
    let mut bot = vec![0u32; n];
    let mut top = vec![0u32; n];
    let mut excess = vec![0i64; n];

    #[allow(clippy::too_many_arguments)]
    fn rec<F: FnMut(&[u32], &[u32], &[i64]) -> bool>(
        i: usize,
        bot_left: u32,
        top_left: u32,
        children: &[Vec<usize>],
        bot: &mut [u32],
        top: &mut [u32],
        excess: &mut [i64],
        f: &mut F,
    ) -> bool {
        let from_children: i64 = children[i].iter().map(|&c| excess[c]).sum();
        if i == 0 {
            // root takes the remainder; the total excess is then zero
            bot[0] = bot_left;
            top[0] = top_left;
            excess[0] = from_children + bot_left as i64 - top_left as i64;
            debug_assert_eq!(excess[0], 0);
            return f(bot, top, excess);
        }
        for bi in 0..=bot_left {
            for ti in 0..=top_left {
                let ex = from_children + bi as i64 - ti as i64;
                if ex == 0 {
                    continue;
                }
                bot[i] = bi;
                top[i] = ti;
                excess[i] = ex;
                if !rec(i - 1, bot_left - bi, top_left - ti, children, bot, top, excess, f) {
                    return false;
                }
            }
        }
        true
    }

    rec(n - 1, a, a, &children, &mut bot, &mut top, &mut excess, &mut f);
}

fn assemble(parent: &[usize], bot: &[u32], top: &[u32], excess: &[i64]) -> FloorDiagram {
    let n = parent.len();
    // orient: positive excess flows from the subtree up into its parent
    let mut edges = Vec::with_capacity(n - 1);
    for i in 1..n {
        let w = excess[i].unsigned_abs() as u32;
        if excess[i] > 0 {
            edges.push((i, parent[i], w));
        } else {
            edges.push((parent[i], i, w));
        }
    }
    let order = topological_order(n, &edges);
    let mut pos = vec![0; n];
    for (k, &v) in order.iter().enumerate() {
        pos[v] = k;
    }
    let mut elevators: Vec<Elevator> =
        edges.iter().map(|&(s, t, w)| Elevator { src: pos[s], dst: pos[t], weight: w }).collect();
    elevators.sort();
    FloorDiagram {
        floors: n,
        elevators,
        bottom: order.iter().map(|&v| bot[v]).collect(),
        top: order.iter().map(|&v| top[v]).collect(),
    }
}

fn topological_order(n: usize, edges: &[(usize, usize, u32)]) -> Vec<usize> {
    let mut indeg = vec![0; n];
    for &(_, t, _) in edges {
        indeg[t] += 1;
    }
    let mut order = Vec::with_capacity(n);
    let mut ready: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    while let Some(v) = ready.pop() {
        order.push(v);
        for &(s, t, _) in edges {
            if s == v {
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    ready.push(t);
                }
            }
        }
    }
    order
}
