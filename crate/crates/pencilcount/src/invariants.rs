//! Invariants of the quadric and of projective 3-space.
//!
//! `W_RP3(d,l) = sum_{a<b, a+b=d} (-1)^a (d-2a) W((a,b),l)` for odd `d`, zero
//! for even `d`; `GW_CP3(d) = sum_{a<b, a+b=d} (d-2a)^2 GW(a,b)`.

use std::sync::Arc;

use num_bigint::BigInt;
use serde::Serialize;

use crate::cache::{Cache, Key, Kind};
use crate::convention::{Convention, FITTED};
use crate::diagram::{enumerate_diagrams, Bidegree};
use crate::error::{Error, Result};
use crate::marking::{self, LabelLayout};
use crate::scan::{self, Mode, ScanOptions};
use crate::verify::fixtures;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Per-diagram frontier scan.
    Scan,
    /// Brute-force marking enumeration.
    Explicit,
}

#[derive(Clone, Debug)]
pub struct Calculator {
    pub convention: Convention,
    pub engine: Engine,
    pub options: ScanOptions,
    cache: Option<Arc<Cache>>,
}

impl Default for Calculator {
    fn default() -> Self {
        Calculator::new(FITTED)
    }
}

fn bd(a: u32, b: u32) -> Result<Bidegree> {
    Bidegree::new(a, b)
}

fn m4(x: &BigInt) -> u8 {
    let r: BigInt = x % 4;
    let r = if r < BigInt::from(0) { r + 4 } else { r };
    r.try_into().unwrap()
}

impl Calculator {
    pub fn new(convention: Convention) -> Self {
        Calculator { convention, engine: Engine::Scan, options: ScanOptions::default(), cache: None }
    }

    pub fn explicit(convention: Convention) -> Self {
        Calculator { engine: Engine::Explicit, ..Calculator::new(convention) }
    }

    pub fn with_cache(mut self, cache: Arc<Cache>) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn with_options(mut self, options: ScanOptions) -> Self {
        self.options = options;
        self
    }

    pub fn cache(&self) -> Option<&Arc<Cache>> {
        self.cache.as_ref()
    }

    fn cached(&self, key: Key, f: impl FnOnce() -> Result<BigInt>) -> Result<BigInt> {
        let cache = match (&self.cache, self.engine) {
            (Some(c), Engine::Scan) => c,
            _ => return f(),
        };
        if let Some(v) = cache.get(&key) {
            return Ok(v);
        }
        let v = f()?;
        cache.put(key, &v)?;
        Ok(v)
    }

    /// Cache key for a surface invariant. The bidegree is normalized to
    /// `a <= b` only for rules that are symmetric in `(a,b)`.
    fn surface_key(&self, kind: Kind, a: u32, b: u32, l: Option<u32>) -> Key {
        let symmetric = kind == Kind::Gw2 || self.convention == Convention::Swap;
        let (a, b) = if symmetric && a > b { (b, a) } else { (a, b) };
        let convention = (kind != Kind::Gw2).then(|| self.convention.id().to_string());
        Key { kind, a: Some(a), b: Some(b), d: None, l, convention }
    }

    pub fn gw_quadric(&self, a: u32, b: u32) -> Result<BigInt> {
        let bd = bd(a, b)?;
        self.cached(self.surface_key(Kind::Gw2, a, b, None), || match self.engine {
            Engine::Scan => scan::scan_count_with(bd, &Mode::Complex, &self.options),
            Engine::Explicit => {
                let mut total = BigInt::from(0);
                for d in enumerate_diagrams(bd) {
                    total += marking::complex_contribution(&d)?;
                }
                Ok(total)
            }
        })
    }

    pub fn w_quadric(&self, a: u32, b: u32, l: u32) -> Result<BigInt> {
        let bd = bd(a, b)?;
        if l as usize > bd.max_pairs() {
            return Err(Error::input(format!(
                "l = {} out of range for bidegree {}: need 0 <= l <= {}",
                l,
                bd,
                bd.max_pairs()
            )));
        }
        self.cached(self.surface_key(Kind::W2, a, b, Some(l)), || {
            let layout = LabelLayout::top(bd.points(), l as usize)?;
            self.w_quadric_layout(a, b, &layout)
        })
    }

    /// `W((a,b), s)` with the pair blocks placed as in `layout`. Not cached.
    pub fn w_quadric_layout(&self, a: u32, b: u32, layout: &LabelLayout) -> Result<BigInt> {
        let bd = bd(a, b)?;
        if layout.n() != bd.points() {
            return Err(Error::input(format!("layout has {} positions, bidegree {} needs {}", layout.n(), bd, bd.points())));
        }
        match self.engine {
            Engine::Scan => {
                let mode = Mode::RealLayout { layout: layout.clone(), conv: self.convention };
                scan::scan_count_with(bd, &mode, &self.options)
            }
            Engine::Explicit => {
                let mut total = BigInt::from(0);
                for d in enumerate_diagrams(bd) {
                    total += marking::real_contribution(&d, layout, self.convention)?;
                }
                Ok(total)
            }
        }
    }

    fn check_rp3_args(d: u32, l: u32) -> Result<()> {
        if d == 0 {
            return Err(Error::input("degree must be at least 1"));
        }
        if l == d {
            return Err(Error::input(format!(
                "l = d = {} asks for the all-conjugate invariant, which is computed by a different method \
                 and is available only as a fixture through `verify`",
                d
            )));
        }
        if l > d {
            return Err(Error::input(format!("l = {} out of range: need 0 <= l <= d - 1 = {}", l, d - 1)));
        }
        Ok(())
    }

    /// `W_RP3(d,l)`. Even degrees return 0 without computing anything.
    pub fn w_rp3(&self, d: u32, l: u32) -> Result<BigInt> {
        Self::check_rp3_args(d, l)?;
        if d % 2 == 0 {
            return Ok(BigInt::from(0));
        }
        self.w_rp3_sum(d, l)
    }

    /// The signed sum over `a < b`, evaluated for any `d`, including even.
    pub fn w_rp3_sum(&self, d: u32, l: u32) -> Result<BigInt> {
        Self::check_rp3_args(d, l)?;
        let key = Key { kind: Kind::W3, a: None, b: None, d: Some(d), l: Some(l), convention: Some(self.convention.id().into()) };
        self.cached(key, || {
            let mut total = BigInt::from(0);
            for a in (0..).take_while(|&a| 2 * a < d) {
                let c = BigInt::from(d as i64 - 2 * a as i64);
                let w = self.w_quadric(a, d - a, l)?;
                if a % 2 == 0 {
                    total += c * w;
                } else {
                    total -= c * w;
                }
            }
            Ok(total)
        })
    }

    pub fn gw_cp3(&self, d: u32) -> Result<BigInt> {
        if d == 0 {
            return Err(Error::input("degree must be at least 1"));
        }
        let key = Key { kind: Kind::Gw3, a: None, b: None, d: Some(d), l: None, convention: None };
        self.cached(key, || {
            let mut total = BigInt::from(0);
            for a in (0..).take_while(|&a| 2 * a < d) {
                let c = BigInt::from(d - 2 * a);
                total += &c * &c * self.gw_quadric(a, d - a)?;
            }
            Ok(total)
        })
    }

    pub fn congruence_check(&self, a: u32, b: u32, l: u32) -> Result<Congruence> {
        let gw = self.gw_quadric(a, b)?;
        let w = self.w_quadric(a, b, l)?;
        Ok(Congruence::new(format!("({},{}) l={}", a, b, l), gw, w))
    }

    /// `GW_CP3(d)` against `(-1)^((d-1)(d-2)/2) W_RP3(d,l)` mod 4.
    pub fn cp3_congruence_check(&self, d: u32, l: u32) -> Result<Congruence> {
        let gw = self.gw_cp3(d)?;
        let mut w = self.w_rp3(d, l)?;
        if ((d as u64 - 1) * (d as u64).saturating_sub(2) / 2) % 2 == 1 {
            w = -w;
        }
        Ok(Congruence::new(format!("d={} l={}", d, l), gw, w))
    }

    pub fn sign_pattern_report(&self, d: u32) -> Result<SignPattern> {
        if d % 2 == 0 {
            return Err(Error::input(format!("sign pattern needs odd d, got {}", d)));
        }
        let mut values = Vec::new();
        for l in 0..d {
            let mut v = self.w_rp3(d, l)?;
            if (d - 1) / 2 % 2 == 1 {
                v = -v;
            }
            values.push(v);
        }
        Ok(SignPattern::from_values(d, values))
    }

    pub fn conjecture_report(&self, d: u32) -> Result<ConjectureReport> {
        if d % 2 == 0 || d == 0 {
            return Err(Error::input(format!("conjecture report needs odd d, got {}", d)));
        }
        let fixture = fixtures::table_value(d, d);
        let computed = self.w_rp3(d, d - 1)?;
        let status = match &fixture {
            None => Status::Untestable,
            Some(f) if *f == computed => Status::Equal,
            Some(_) => Status::Differs,
        };
        Ok(ConjectureReport {
            d,
            computed: computed.to_string(),
            fixture: fixture.map(|f| f.to_string()),
            status,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Congruence {
    pub params: String,
    pub gw: String,
    pub w: String,
    pub gw_mod4: u8,
    pub w_mod4: u8,
    pub holds: bool,
}

impl Congruence {
    fn new(params: String, gw: BigInt, w: BigInt) -> Self {
        let (x, y) = (m4(&gw), m4(&w));
        Congruence { params, gw: gw.to_string(), w: w.to_string(), gw_mod4: x, w_mod4: y, holds: x == y }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignPattern {
    pub d: u32,
    /// `(-1)^((d-1)/2) W_RP3(d,l)` for `l = 0..d-1`.
    pub values: Vec<String>,
    pub signs: Vec<i8>,
    /// Smallest `l` from which the signs strictly alternate up to `l = d-1`;
    /// needs at least two values.
    pub threshold: Option<usize>,
}

impl SignPattern {
    pub fn from_values(d: u32, values: Vec<BigInt>) -> Self {
        let signs: Vec<i8> = values
            .iter()
            .map(|v| match v.sign() {
                num_bigint::Sign::Minus => -1,
                num_bigint::Sign::NoSign => 0,
                num_bigint::Sign::Plus => 1,
            })
            .collect();
        let n = signs.len();
        let mut threshold = None;
        if n >= 2 {
            let mut i = n - 1;
            while i > 0 && signs[i] != 0 && signs[i - 1] == -signs[i] {
                i -= 1;
            }
            if i <= n - 2 {
                threshold = Some(i);
            }
        }
        SignPattern { d, values: values.iter().map(|v| v.to_string()).collect(), signs, threshold }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Equal,
    Differs,
    Untestable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjectureReport {
    pub d: u32,
    pub computed: String,
    pub fixture: Option<String>,
    pub status: Status,
}
