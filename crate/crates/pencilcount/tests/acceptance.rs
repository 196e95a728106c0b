//! Acceptance criteria, one printed line each. Values are compared as exact
//! integers; the only numeric tolerances are the wall-clock budgets below.
//!
//! Criteria 3 and 7 cannot hold as stated, whatever convention is used; see
//! `KNOWN_FAILURES`. They are still evaluated in full and reported as FAIL.
//! The test asserts that every other criterion passes and that these two fail
//! on exactly the analysed instances and nowhere else.

use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;

use pencilcount::cache::Cache;
use pencilcount::convention::FITTED;
use pencilcount::marking::{self, LabelLayout};
use pencilcount::scan::ScanOptions;
use pencilcount::verify::{self, table_value};
use pencilcount::{enumerate_diagrams, Bidegree, Calculator, Convention, SigmaRule};

const EXACT: i64 = 0;
const TABLE_BUDGET: Duration = Duration::from_secs(5 * 60);
const EXTENDED_BUDGET: Duration = Duration::from_secs(60 * 60);

/// Criterion number and the instances on which it is expected to fail.
/// 3: the forced sum at d = 4 is 4 W((0,4),l) - 2 W((1,3),l) = -2, since
///    (0,4) has no diagram and (1,3) has the single all-weight-1 chain.
/// 7: W((2,2),l) = 8, 6, 4, 2 under every convention while GW(2,2) = 12, so
///    l = 1 and l = 3 break the mod 4 congruence.
const KNOWN_FAILURES: [(u32, &[&str]); 2] = [
    (3, &["forced d=4 l=0 got -2", "forced d=4 l=1 got -2", "forced d=4 l=2 got -2", "forced d=4 l=3 got -2"]),
    (7, &["quadric (2,2) l=1: 12 vs 6", "quadric (2,2) l=3: 12 vs 2"]),
];

struct Line {
    id: u32,
    name: &'static str,
    failures: Vec<String>,
    detail: String,
}

impl Line {
    fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

fn n(x: i64) -> BigInt {
    BigInt::from(x)
}

fn calc(conv: Convention) -> Calculator {
    Calculator::new(conv).with_cache(Arc::new(Cache::memory()))
}

fn table_rows(c: &Calculator, degrees: &[u32]) -> Vec<String> {
    let mut bad = Vec::new();
    for &d in degrees {
        for l in 0..d {
            let want = table_value(d, l).unwrap();
            let got = c.w_rp3(d, l).unwrap();
            if (&got - &want) != n(EXACT) {
                bad.push(format!("d={} l={} want {} got {}", d, l, want, got));
            }
        }
    }
    bad
}

fn criterion_1(c: &Calculator) -> Line {
    let seq = c.clone().with_options(ScanOptions { sequential: true, ..ScanOptions::default() });
    let t = Instant::now();
    let mut failures = table_rows(&seq, &[1, 3, 5, 7, 9]);
    let el = t.elapsed();
    if el > TABLE_BUDGET {
        failures.push(format!("took {:?}", el));
    }
    Line { id: 1, name: "table d<=9", failures, detail: format!("25 values, single thread, {:.1?}", el) }
}

fn criterion_2(c: &Calculator) -> Line {
    let t = Instant::now();
    let mut failures = table_rows(c, &[11]);
    let el = t.elapsed();
    if el > EXTENDED_BUDGET {
        failures.push(format!("took {:?}", el));
    }
    Line { id: 2, name: "table d=11", failures, detail: format!("11 values, {:.1?}", el) }
}

fn criterion_3(c: &Calculator) -> Line {
    let mut failures = Vec::new();
    for d in [2u32, 4, 6] {
        for l in 0..d {
            let v = c.w_rp3(d, l).unwrap();
            if v != n(0) {
                failures.push(format!("d={} l={} got {}", d, l, v));
            }
        }
    }
    for d in [2u32, 4] {
        for l in 0..d {
            let v = c.w_rp3_sum(d, l).unwrap();
            if v != n(0) {
                failures.push(format!("forced d={} l={} got {}", d, l, v));
            }
        }
    }
    Line { id: 3, name: "even vanishing", failures, detail: "d in {2,4,6}; forced sum d in {2,4}".into() }
}

fn criterion_4(c: &Calculator) -> Line {
    let mut failures = Vec::new();
    let explicit = Calculator::explicit(c.convention);
    for (d, want) in [(1, 1), (2, 0), (3, 1), (4, 4), (5, 105)] {
        for (name, k) in [("scan", c), ("explicit", &explicit)] {
            let got = k.gw_cp3(d).unwrap();
            if got != n(want) {
                failures.push(format!("gw_cp3({}) {} got {}", d, name, got));
            }
        }
    }
    for (a, b, want) in [(1, 1, 1), (1, 2, 1), (1, 3, 1), (1, 4, 1), (1, 5, 1), (1, 6, 1), (2, 2, 12), (2, 3, 96)] {
        for (name, k) in [("scan", c), ("explicit", &explicit)] {
            let got = k.gw_quadric(a, b).unwrap();
            if got != n(want) {
                failures.push(format!("gw_quadric({},{}) {} got {}", a, b, name, got));
            }
        }
    }
    Line { id: 4, name: "complex side", failures, detail: "gw_cp3 d=1..5 and gw_quadric, both engines".into() }
}

fn criterion_5() -> Line {
    let recs = verify::cross_engine_check(5, &Convention::ALL).unwrap();
    let failures: Vec<String> = recs.iter().filter(|r| !r.pass).map(|r| format!("{} {} vs {}", r.params, r.expected, r.actual)).collect();
    let variants = Convention::ALL.iter().filter(|c| matches!(c, Convention::Elevator { .. })).count();
    Line {
        id: 5,
        name: "oracle equivalence",
        failures,
        detail: format!("{} comparisons, a+b<=5, {} elevator variants plus swap", recs.len(), variants),
    }
}

fn criterion_6(rows_ok: bool) -> Line {
    let fit = verify::fit_sign_convention(9).unwrap();
    let mut failures = Vec::new();
    let summary: Vec<String> = fit.variants.iter().map(|v| format!("{}:{}", v.convention, v.mismatches.len())).collect();
    match fit.convention() {
        Ok(c) if c == FITTED => {}
        Ok(c) => failures.push(format!("fit selected {} but default is {}", c, FITTED)),
        Err(e) => failures.push(e.to_string()),
    }
    if !rows_ok {
        failures.push("fitted convention does not reproduce criteria 1-2".into());
    }
    Line { id: 6, name: "convention fit", failures, detail: format!("mismatches {}; selected {:?}", summary.join(" "), fit.selected) }
}

fn criterion_7(c: &Calculator) -> Line {
    let mut failures = Vec::new();
    let mut checked = 0;
    for total in 1..=9u32 {
        for a in 0..=total {
            let b = total - a;
            for l in 0..total {
                let w = c.congruence_check(a, b, l).unwrap();
                checked += 1;
                if !w.holds {
                    failures.push(format!("quadric ({},{}) l={}: {} vs {}", a, b, l, w.gw, w.w));
                }
            }
        }
    }
    for d in 1..=9u32 {
        for l in 0..d {
            let w = c.cp3_congruence_check(d, l).unwrap();
            checked += 1;
            if !w.holds {
                failures.push(format!("space d={} l={}: {} vs {}", d, l, w.gw, w.w));
            }
        }
    }
    Line { id: 7, name: "mod 4 congruences", failures, detail: format!("{} instances", checked) }
}

fn criterion_8(c: &Calculator) -> Line {
    let mut failures = Vec::new();
    let mut detail = Vec::new();
    for (a, b) in [(2u32, 3u32), (3, 4)] {
        let np = (2 * (a + b) - 1) as usize;
        for s in 1..(a + b) as usize {
            let ps = verify::standard_placements(np, s).unwrap();
            if ps.len() < 3 {
                failures.push(format!("({},{}) l={} only {} placements", a, b, s, ps.len()));
            }
            for r in verify::pair_placement_invariance(c, a, b, &ps).unwrap() {
                if !r.pass {
                    failures.push(format!("({},{}) l={} {} vs {}", a, b, s, r.expected, r.actual));
                }
            }
        }
        detail.push(format!("({},{}) l=1..{}", a, b, a + b - 1));
    }
    Line { id: 8, name: "pair placement", failures, detail: format!("{} with top/bottom/spread", detail.join(", ")) }
}

fn criterion_9(c: &Calculator) -> Line {
    let mut failures = Vec::new();
    let mut got = Vec::new();
    for (d, want) in [(3, -1), (5, 5), (7, -85), (9, 1993)] {
        let r = c.conjecture_report(d).unwrap();
        got.push(r.computed.clone());
        if r.fixture != Some(want.to_string()) || r.computed != want.to_string() {
            failures.push(format!("d={} computed {} fixture {:?}", d, r.computed, r.fixture));
        }
    }
    Line { id: 9, name: "l=d-1 vs l=d", failures, detail: got.join(", ") }
}

fn criterion_10() -> Line {
    let mut failures = Vec::new();
    let ds = enumerate_diagrams(Bidegree { a: 2, b: 3 });
    let mut contrib: Vec<i64> = ds.iter().map(|d| marking::complex_contribution(d).unwrap().try_into().unwrap()).collect();
    contrib.sort();
    if contrib != [6, 6, 10, 10, 16, 16, 16, 16] {
        failures.push(format!("complex contributions {:?}", contrib));
    }
    let mut totals = Vec::new();
    for s in 0..=4 {
        let layout = LabelLayout::top(9, s).unwrap();
        let t: i128 = ds.iter().map(|d| marking::real_contribution(d, &layout, FITTED).unwrap()).sum();
        totals.push(t);
    }
    if totals != [48, 32, 20, 12, 8] {
        failures.push(format!("real totals {:?}", totals));
    }
    Line { id: 10, name: "micro-oracles (2,3)", failures, detail: format!("{} diagrams, sum {}, real {:?}", ds.len(), contrib.iter().sum::<i64>(), totals) }
}

#[test]
fn acceptance() {
    let c = calc(FITTED);
    let mut lines = vec![criterion_1(&c), criterion_2(&c)];
    let rows_ok = lines.iter().all(Line::pass);
    lines.push(criterion_3(&c));
    lines.push(criterion_4(&c));
    lines.push(criterion_5());
    lines.push(criterion_6(rows_ok));
    lines.push(criterion_7(&c));
    lines.push(criterion_8(&c));
    lines.push(criterion_9(&c));
    lines.push(criterion_10());

    for l in &lines {
        println!("criterion {:>2} {} {}: {}", l.id, if l.pass() { "PASS" } else { "FAIL" }, l.name, l.detail);
        for f in &l.failures {
            println!("    {}", f);
        }
    }

    for l in &lines {
        match KNOWN_FAILURES.iter().find(|(id, _)| *id == l.id) {
            Some((_, expected)) => assert_eq!(l.failures, *expected, "criterion {} failed differently than analysed", l.id),
            None => assert!(l.pass(), "criterion {} failed: {:?}", l.id, l.failures),
        }
    }
}

#[test]
fn per_pair_rules_miss_degree_seven() {
    // the per-pair elevator rules are evaluated too; they already disagree at d = 7
    let c = calc(Convention::Elevator { sigma: SigmaRule::Alt, scope: pencilcount::PairScope::Incident });
    assert_ne!(c.w_rp3(7, 0).unwrap(), table_value(7, 0).unwrap());
}
