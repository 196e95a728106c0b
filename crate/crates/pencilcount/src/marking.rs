//! Brute-force markings of an explicit diagram.
//!
//! This is the reference engine: every labeled marking is produced one by one
//! and scored on its own. It is exponential and only meant for small
//! bidegrees and for cross-checking `scan`.

use num_bigint::BigInt;

use crate::convention::{self, Convention};
use crate::diagram::{Element, ElementKind, FloorDiagram};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Single,
    PairFirst,
    PairSecond,
}

/// Which positions `0..n` carry single points and which carry conjugate
/// pairs. Pairs always occupy two consecutive positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LabelLayout {
    n: usize,
    starts: Vec<usize>,
}

impl LabelLayout {
    pub fn new(n: usize, mut starts: Vec<usize>) -> Result<Self> {
        starts.sort_unstable();
        for w in starts.windows(2) {
            if w[1] < w[0] + 2 {
                return Err(Error::input(format!("pair blocks at {} and {} overlap", w[0], w[1])));
            }
        }
        if let Some(&last) = starts.last() {
            if last + 1 >= n {
                return Err(Error::input(format!("pair block at {} runs past position {}", last, n - 1)));
            }
        }
        if n < 2 * starts.len() + 1 {
            return Err(Error::input(format!(
                "{} pairs leave no single point among {} positions",
                starts.len(),
                n
            )));
        }
        Ok(LabelLayout { n, starts })
    }

    /// Singles first, pairs at the end.
    pub fn top(n: usize, s: usize) -> Result<Self> {
        if 2 * s + 1 > n {
            return Err(Error::input(format!("{} pairs need at least {} points, have {}", s, 2 * s + 1, n)));
        }
        let r = n - 2 * s;
        Self::new(n, (0..s).map(|k| r + 2 * k).collect())
    }

    /// Pairs first, singles at the end.
    pub fn bottom(n: usize, s: usize) -> Result<Self> {
        if 2 * s + 1 > n {
            return Err(Error::input(format!("{} pairs need at least {} points, have {}", s, 2 * s + 1, n)));
        }
        Self::new(n, (0..s).map(|k| 2 * k).collect())
    }

    /// Pairs spread between the singles: the `i`-th pair comes after
    /// `floor((i+1)(r+1)/(s+1))` singles. Differs from `top` and `bottom`
    /// whenever `s >= 1`.
    pub fn spread(n: usize, s: usize) -> Result<Self> {
        if 2 * s + 1 > n {
            return Err(Error::input(format!("{} pairs need at least {} points, have {}", s, 2 * s + 1, n)));
        }
        let r = n - 2 * s;
        let starts = (0..s).map(|i| 2 * i + ((i + 1) * (r + 1) / (s + 1)).min(r)).collect();
        Self::new(n, starts)
    }

    /// Layout from a bottom-to-top sequence of blocks, `true` for a pair.
    pub fn from_blocks(blocks: &[bool]) -> Result<Self> {
        let mut starts = Vec::new();
        let mut pos = 0;
        for &pair in blocks {
            if pair {
                starts.push(pos);
                pos += 2;
            } else {
                pos += 1;
            }
        }
        Self::new(pos, starts)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.starts.len()
    }

    pub fn r(&self) -> usize {
        self.n - 2 * self.starts.len()
    }

    pub fn starts(&self) -> &[usize] {
        &self.starts
    }

    pub fn slots(&self) -> Vec<Slot> {
        let mut slots = vec![Slot::Single; self.n];
        for &p in &self.starts {
            slots[p] = Slot::PairFirst;
            slots[p + 1] = Slot::PairSecond;
        }
        slots
    }
}

/// Strict predecessors of every element as bitmasks over element indices.
pub fn predecessor_masks(d: &FloorDiagram, els: &[Element]) -> Vec<u64> {
    assert!(els.len() <= 64, "brute force handles at most 64 elements");
    let floor_idx = |v: usize| els.iter().position(|e| e.kind == ElementKind::Floor(v)).unwrap();
    let mut pm = vec![0u64; els.len()];
    for (i, e) in els.iter().enumerate() {
        match e.kind {
            ElementKind::Floor(v) => {
                for (j, f) in els.iter().enumerate() {
                    let below = match f.kind {
                        ElementKind::Bottom(u) => u == v,
                        ElementKind::Elevator(k) => d.elevators[k].dst == v,
                        _ => false,
                    };
                    if below {
                        pm[i] |= 1 << j;
                    }
                }
            }
            ElementKind::Elevator(k) => pm[i] |= 1 << floor_idx(d.elevators[k].src),
            ElementKind::Top(v) => pm[i] |= 1 << floor_idx(v),
            ElementKind::Bottom(_) => {}
        }
    }
    pm
}

/// Calls `f` on every labeled marking: an ordering of the elements (as
/// indices into `els`) compatible with the diagram's partial order. Depth
/// first, smallest available element first.
pub fn for_each_marking<F: FnMut(&[usize])>(d: &FloorDiagram, els: &[Element], mut f: F) {
    let pm = predecessor_masks(d, els);
    let n = els.len();
    let mut order = Vec::with_capacity(n);
    fn rec<F: FnMut(&[usize])>(placed: u64, pm: &[u64], order: &mut Vec<usize>, f: &mut F) {
        if order.len() == pm.len() {
            f(order);
            return;
        }
        for i in 0..pm.len() {
            if placed >> i & 1 == 0 && pm[i] & placed == pm[i] {
                order.push(i);
                rec(placed | 1 << i, pm, order, f);
                order.pop();
            }
        }
    }
    if n > 0 {
        rec(0, &pm, &mut order, &mut f);
    }
}

/// Automorphism orbits of markings.
pub fn count_complex_markings(d: &FloorDiagram) -> Result<u128> {
    let els = d.elements();
    let mut labeled = 0u128;
    for_each_marking(d, &els, |_| labeled += 1);
    divide_exact(labeled as i128, d.automorphism_count()).map(|x| x as u128)
}

/// Complex multiplicity times the number of markings.
pub fn complex_contribution(d: &FloorDiagram) -> Result<BigInt> {
    Ok(BigInt::from(count_complex_markings(d)?) * BigInt::from(d.complex_multiplicity()))
}

fn divide_exact(total: i128, aut: u128) -> Result<i128> {
    let aut = aut as i128;
    if total % aut != 0 {
        return Err(Error::Contract(format!("labeled total {} not divisible by automorphism count {}", total, aut)));
    }
    Ok(total / aut)
}

fn check_marking(d: &FloorDiagram, els: &[Element], order: &[usize], layout: &LabelLayout) -> Result<()> {
    if order.len() != els.len() || layout.n() != els.len() {
        return Err(Error::Contract(format!(
            "marking has {} positions, layout {}, diagram {} elements",
            order.len(),
            layout.n(),
            els.len()
        )));
    }
    let pm = predecessor_masks(d, els);
    let mut placed = 0u64;
    for &i in order {
        if i >= els.len() || placed >> i & 1 == 1 || pm[i] & placed != pm[i] {
            return Err(Error::Contract(format!("marking {:?} is not order compatible", order)));
        }
        placed |= 1 << i;
    }
    Ok(())
}

/// Real multiplicity of one marking. `Ok(None)` means the pair blocks are not
/// admissible for this marking under the convention.
pub fn score(
    d: &FloorDiagram,
    els: &[Element],
    order: &[usize],
    layout: &LabelLayout,
    conv: Convention,
) -> Option<i64> {
    let slots = layout.slots();
    match conv {
        Convention::Elevator { sigma, scope } => {
            let mut m = 1i64;
            for (p, &slot) in slots.iter().enumerate() {
                match slot {
                    Slot::Single => {
                        let e = &els[order[p]];
                        if e.is_bounded() {
                            m *= convention::lone_elevator(conv, e.weight);
                        }
                    }
                    Slot::PairFirst => {
                        m *= convention::elevator_pair(sigma, scope, d, &els[order[p]], &els[order[p + 1]])?;
                    }
                    Slot::PairSecond => {}
                }
            }
            Some(m)
        }
        Convention::Swap => score_swap(d, els, order, &slots),
    }
}

fn same_class(x: &Element, y: &Element) -> bool {
    use ElementKind::*;
    x.weight == y.weight
        && matches!(
            (x.kind, y.kind),
            (Floor(_), Floor(_)) | (Elevator(_), Elevator(_)) | (Bottom(_), Bottom(_)) | (Top(_), Top(_))
        )
}

fn score_swap(d: &FloorDiagram, els: &[Element], order: &[usize], slots: &[Slot]) -> Option<i64> {
    let n = els.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut m = 1i64;
    for (p, &slot) in slots.iter().enumerate() {
        let (i, x) = (order[p], &els[order[p]]);
        match slot {
            Slot::Single => {
                if x.is_bounded() {
                    m *= convention::lone_elevator(Convention::Swap, x.weight);
                }
            }
            Slot::PairFirst => {
                let (j, y) = (order[p + 1], &els[order[p + 1]]);
                match (x.kind, y.kind) {
                    (ElementKind::Floor(_), ElementKind::Floor(v)) => {
                        perm[i] = j;
                        perm[j] = i;
                        m *= convention::swap_exchanged_floors(d, v);
                    }
                    (ElementKind::Floor(v), _) | (_, ElementKind::Floor(v)) => {
                        let e = if x.is_floor() { y } else { x };
                        if !e.touches(d, v) {
                            return None;
                        }
                        if e.is_bounded() {
                            m *= convention::swap_adjacent(e.weight);
                        }
                    }
                    _ => {
                        if !same_class(x, y) {
                            return None;
                        }
                        perm[i] = j;
                        perm[j] = i;
                        if x.is_bounded() {
                            m *= convention::swap_exchanged_elevators(x.weight);
                        }
                    }
                }
            }
            Slot::PairSecond => {}
        }
    }
    if is_automorphism(d, els, &perm) {
        Some(m)
    } else {
        None
    }
}

/// Whether a permutation of element indices preserves kinds, weights and
/// incidences.
pub fn is_automorphism(d: &FloorDiagram, els: &[Element], perm: &[usize]) -> bool {
    let mut fmap = vec![usize::MAX; d.floors];
    for (i, e) in els.iter().enumerate() {
        if let ElementKind::Floor(v) = e.kind {
            match els[perm[i]].kind {
                ElementKind::Floor(u) => fmap[v] = u,
                _ => return false,
            }
        }
    }
    els.iter().enumerate().all(|(i, e)| {
        let f = &els[perm[i]];
        if !same_class(e, f) {
            return false;
        }
        match (e.kind, f.kind) {
            (ElementKind::Elevator(k), ElementKind::Elevator(l)) => {
                let (x, y) = (d.elevators[k], d.elevators[l]);
                fmap[x.src] == y.src && fmap[x.dst] == y.dst
            }
            (ElementKind::Bottom(u), ElementKind::Bottom(v)) | (ElementKind::Top(u), ElementKind::Top(v)) => {
                fmap[u] == v
            }
            _ => true,
        }
    })
}

/// Real multiplicity of a marking that must be admissible for the layout.
pub fn real_multiplicity(
    d: &FloorDiagram,
    order: &[usize],
    layout: &LabelLayout,
    conv: Convention,
) -> Result<i64> {
    let els = d.elements();
    check_marking(d, &els, order, layout)?;
    score(d, &els, order, layout, conv)
        .ok_or_else(|| Error::Contract(format!("pair blocks of {:?} are not admissible under {}", order, conv)))
}

/// Sum of real multiplicities over automorphism orbits of admissible markings.
pub fn real_contribution(d: &FloorDiagram, layout: &LabelLayout, conv: Convention) -> Result<i128> {
    let els = d.elements();
    if layout.n() != els.len() {
        return Err(Error::input(format!("layout has {} positions, diagram {} elements", layout.n(), els.len())));
    }
    let mut total = 0i128;
    for_each_marking(d, &els, |order| {
        if let Some(m) = score(d, &els, order, layout, conv) {
            total += m as i128;
        }
    });
    divide_exact(total, d.automorphism_count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{enumerate_diagrams, Bidegree};

    fn diagrams(a: u32, b: u32) -> Vec<FloorDiagram> {
        enumerate_diagrams(Bidegree { a, b })
    }

    #[test]
    fn layouts() {
        let l = LabelLayout::top(9, 2).unwrap();
        assert_eq!(l.starts(), &[5, 7]);
        assert_eq!(l.r(), 5);
        assert_eq!(LabelLayout::bottom(9, 2).unwrap().starts(), &[0, 2]);
        assert_eq!(LabelLayout::spread(9, 3).unwrap().starts(), &[1, 4, 7]);
        assert_eq!(LabelLayout::spread(13, 6).unwrap().starts(), &[0, 2, 4, 7, 9, 11]);
        assert_eq!(LabelLayout::from_blocks(&[true, false, true]).unwrap().starts(), &[0, 3]);
        assert!(LabelLayout::top(9, 5).is_err());
        assert!(LabelLayout::new(9, vec![1, 2]).is_err());
        assert!(LabelLayout::new(9, vec![8]).is_err());
    }

    #[test]
    fn chain_has_one_marking() {
        let d = &diagrams(1, 2)[0];
        assert_eq!(count_complex_markings(d).unwrap(), 1);
    }

    #[test]
    fn quadric_two_two() {
        let mut counts: Vec<u128> = diagrams(2, 2).iter().map(|d| count_complex_markings(d).unwrap()).collect();
        counts.sort();
        assert_eq!(counts, vec![1, 4, 4]);
        let total: BigInt = diagrams(2, 2).iter().map(|d| complex_contribution(d).unwrap()).sum();
        assert_eq!(total, BigInt::from(12));
    }

    #[test]
    fn two_three_complex_contributions() {
        let mut c: Vec<BigInt> = diagrams(2, 3).iter().map(|d| complex_contribution(d).unwrap()).collect();
        c.sort();
        let want: Vec<BigInt> = [6, 6, 10, 10, 16, 16, 16, 16].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(c, want);
    }

    #[test]
    fn real_totals_two_three() {
        for conv in Convention::ALL {
            let totals: Vec<i128> = (0..5)
                .map(|s| {
                    let layout = LabelLayout::top(9, s).unwrap();
                    diagrams(2, 3).iter().map(|d| real_contribution(d, &layout, conv).unwrap()).sum()
                })
                .collect();
            assert_eq!(totals, vec![48, 32, 20, 12, 8], "{}", conv);
        }
    }

    #[test]
    fn rejects_unordered_marking() {
        let d = &diagrams(1, 2)[0];
        let layout = LabelLayout::top(5, 0).unwrap();
        // the top edge cannot precede its floor
        let els = d.elements();
        let top = els.iter().position(|e| matches!(e.kind, ElementKind::Top(_))).unwrap();
        let mut order: Vec<usize> = vec![top];
        order.extend((0..els.len()).filter(|&i| i != top));
        assert!(real_multiplicity(d, &order, &layout, Convention::Swap).is_err());
    }
}
