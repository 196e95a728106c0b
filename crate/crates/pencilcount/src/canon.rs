//! Canonical forms and automorphisms of floor diagrams.
//!
//! Diagrams are trees, so everything is computed from rooted encodings at the
//! tree center. Floor labels `(bottom, top)` and oriented weighted edges are
//! part of the encoding.

use crate::diagram::FloorDiagram;

const OPEN: u8 = 0xF0;
const CLOSE: u8 = 0xF1;
const NONE: usize = usize::MAX;

struct Tree<'a> {
    d: &'a FloorDiagram,
    // (neighbor, 1 if the edge leaves this floor, weight)
    adj: Vec<Vec<(usize, u8, u8)>>,
}

impl<'a> Tree<'a> {
    fn new(d: &'a FloorDiagram) -> Self {
        let mut adj = vec![Vec::new(); d.floors];
        for e in &d.elevators {
            assert!(e.weight < OPEN as u32, "weight {} too large to encode", e.weight);
            adj[e.src].push((e.dst, 1, e.weight as u8));
            adj[e.dst].push((e.src, 0, e.weight as u8));
        }
        Tree { d, adj }
    }

    fn centers(&self) -> Vec<usize> {
        let n = self.d.floors;
        if n <= 2 {
            return (0..n).collect();
        }
        let mut deg: Vec<usize> = self.adj.iter().map(Vec::len).collect();
        let mut layer: Vec<usize> = (0..n).filter(|&v| deg[v] == 1).collect();
        let mut left = n;
        while left > 2 {
            left -= layer.len();
            let mut next = Vec::new();
            for &v in &layer {
                for &(u, _, _) in &self.adj[v] {
                    deg[u] -= 1;
                    if deg[u] == 1 {
                        next.push(u);
                    }
                }
            }
            layer = next;
        }
        layer.sort_unstable();
        layer
    }

    /// Children of `v` away from `parent`, each tagged with the encoding of the
    /// connecting edge followed by the child's subtree, sorted.
    fn children(&self, v: usize, parent: usize) -> Vec<(Vec<u8>, usize)> {
        let mut kids: Vec<(Vec<u8>, usize)> = self.adj[v]
            .iter()
            .filter(|&&(u, _, _)| u != parent)
            .map(|&(u, dir, w)| {
                let mut s = vec![dir, w];
                s.extend(self.encode(u, v));
                (s, u)
            })
            .collect();
        kids.sort();
        kids
    }

    fn encode(&self, v: usize, parent: usize) -> Vec<u8> {
        let mut out = vec![OPEN, self.d.bottom[v] as u8, self.d.top[v] as u8];
        for (s, _) in self.children(v, parent) {
            out.extend(s);
        }
        out.push(CLOSE);
        out
    }

    fn automorphisms(&self, v: usize, parent: usize) -> u128 {
        let kids = self.children(v, parent);
        let mut total = 1u128;
        let mut run = 0u128;
        for (i, (s, u)) in kids.iter().enumerate() {
            total *= self.automorphisms(*u, v);
            run = if i > 0 && kids[i - 1].0 == *s { run + 1 } else { 1 };
            total *= run;
        }
        total
    }

    fn edge_between(&self, x: usize, y: usize) -> (u8, u8) {
        let &(_, dir, w) = self.adj[x].iter().find(|&&(u, _, _)| u == y).unwrap();
        (dir, w)
    }

    /// Roots in canonical order together with the encoding.
    fn rooted(&self) -> (Vec<(usize, usize)>, Vec<u8>) {
        let c = self.centers();
        let mut enc = vec![self.d.floors as u8];
        if c.len() == 1 {
            enc.push(1);
            enc.extend(self.encode(c[0], NONE));
            return (vec![(c[0], NONE)], enc);
        }
        let (x, y) = (c[0], c[1]);
        let side = |p: usize, q: usize| {
            let (dir, w) = self.edge_between(p, q);
            let mut s = self.encode(p, q);
            s.push(dir);
            s.push(w);
            s.extend(self.encode(q, p));
            s
        };
        let (sx, sy) = (side(x, y), side(y, x));
        enc.push(2);
        if sx <= sy {
            enc.extend(sx);
            (vec![(x, y), (y, x)], enc)
        } else {
            enc.extend(sy);
            (vec![(y, x), (x, y)], enc)
        }
    }
}

pub fn encoding(d: &FloorDiagram) -> Vec<u8> {
    let mut enc = Tree::new(d).rooted().1;
    // the floor count is already the first byte; append a for readability of dumps
    enc.push(d.bottom.iter().sum::<u32>() as u8);
    enc
}

/// Order of the group of floor permutations preserving the weighted oriented
/// tree and the per-floor unbounded edge counts.
pub fn floor_automorphisms(d: &FloorDiagram) -> u128 {
    let t = Tree::new(d);
    let (roots, _) = t.rooted();
    // with two centers the middle edge is oriented, so the halves never swap
    roots.iter().map(|&(r, p)| t.automorphisms(r, p)).product()
}

/// Floors in a canonical topological order: preorder of the canonical rooted
/// tree, then a topological sort breaking ties by preorder rank.
pub fn canonical_order(d: &FloorDiagram) -> Vec<usize> {
    let t = Tree::new(d);
    let (roots, _) = t.rooted();
    let mut pre = Vec::with_capacity(d.floors);
    fn walk(t: &Tree, v: usize, parent: usize, pre: &mut Vec<usize>) {
        pre.push(v);
        for (_, u) in t.children(v, parent) {
            walk(t, u, v, pre);
        }
    }
    for &(r, p) in &roots {
        walk(&t, r, p, &mut pre);
    }
    let mut rank = vec![0; d.floors];
    for (k, &v) in pre.iter().enumerate() {
        rank[v] = k;
    }
    let mut indeg = vec![0; d.floors];
    for e in &d.elevators {
        indeg[e.dst] += 1;
    }
    let mut done = vec![false; d.floors];
    let mut order = Vec::with_capacity(d.floors);
    for _ in 0..d.floors {
        let v = (0..d.floors).filter(|&v| !done[v] && indeg[v] == 0).min_by_key(|&v| rank[v]).unwrap();
        done[v] = true;
        order.push(v);
        for e in &d.elevators {
            if e.src == v {
                indeg[e.dst] -= 1;
            }
        }
    }
    order
}

/// Every floor permutation `p` with `p[p[v]] == v` that is an automorphism of
/// the diagram, identity first.
pub fn floor_involutions(d: &FloorDiagram) -> Vec<Vec<usize>> {
    let n = d.floors;
    let mut w = vec![vec![0u32; n]; n];
    for e in &d.elevators {
        w[e.src][e.dst] = e.weight;
    }
    let sig: Vec<(u32, u32, Vec<(u8, u32)>)> = (0..n)
        .map(|v| {
            let mut s: Vec<(u8, u32)> = d
                .elevators
                .iter()
                .filter_map(|e| {
                    if e.src == v {
                        Some((1, e.weight))
                    } else if e.dst == v {
                        Some((0, e.weight))
                    } else {
                        None
                    }
                })
                .collect();
            s.sort_unstable();
            (d.bottom[v], d.top[v], s)
        })
        .collect();

    let consistent = |p: &[usize], v: usize| {
        (0..n).all(|x| {
            if p[x] == NONE {
                return true;
            }
            w[v][x] == w[p[v]][p[x]] && w[x][v] == w[p[x]][p[v]]
        })
    };

    let mut out = Vec::new();
    let mut p = vec![NONE; n];
    fn rec(
        v: usize,
        p: &mut Vec<usize>,
        sig: &[(u32, u32, Vec<(u8, u32)>)],
        consistent: &dyn Fn(&[usize], usize) -> bool,
        out: &mut Vec<Vec<usize>>,
    ) {
        let n = p.len();
        if v == n {
            out.push(p.clone());
            return;
        }
        if p[v] != NONE {
            rec(v + 1, p, sig, consistent, out);
            return;
        }
        for u in v..n {
            if p[u] != NONE || sig[u] != sig[v] {
                continue;
            }
            p[v] = u;
            p[u] = v;
            if consistent(p, v) && consistent(p, u) {
                rec(v + 1, p, sig, consistent, out);
            }
            p[v] = NONE;
            p[u] = NONE;
        }
    }
    rec(0, &mut p, &sig, &consistent, &mut out);
    out
}
