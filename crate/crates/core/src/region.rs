//! Observation regions: finite unions of intervals on the real line.
//!
//! Text form is a comma-separated list of intervals in the usual bracket
//! notation, e.g. `[-1.7951,-1.2712),[-0.22335,0.30055)` or `[1.25,inf)`.
//! A value set such as `{0,1,2,3}` is accepted as shorthand for the union of
//! the corresponding degenerate closed intervals.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::Parse("interval bound is NaN".into()));
        }
        let empty = lo > hi || (lo == hi && !(lo_closed && hi_closed));
        if empty {
            return Err(Error::Parse(format!("empty interval between {lo} and {hi}")));
        }
        // Infinite ends are never attained.
        Ok(Interval {
            lo,
            hi,
            lo_closed: lo_closed && lo.is_finite(),
            hi_closed: hi_closed && hi.is_finite(),
        })
    }

    /// `[lo, hi)`
    pub fn closed_open(lo: f64, hi: f64) -> Result<Self> {
        Interval::new(lo, hi, true, false)
    }

    /// `[lo, hi]`
    pub fn closed(lo: f64, hi: f64) -> Result<Self> {
        Interval::new(lo, hi, true, true)
    }

    /// `[lo, ∞)`
    pub fn at_least(lo: f64) -> Result<Self> {
        Interval::new(lo, f64::INFINITY, true, false)
    }

    pub fn point(v: f64) -> Result<Self> {
        Interval::closed(v, v)
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    fn overlaps(&self, other: &Interval) -> bool {
        let (a, b) = if self.lo <= other.lo { (self, other) } else { (other, self) };
        if a.hi > b.lo {
            return true;
        }
        a.hi == b.lo && a.hi_closed && b.lo_closed
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lo_closed { '[' } else { '(' };
        let close = if self.hi_closed { ']' } else { ')' };
        write!(f, "{open}{},{}{close}", fmt_bound(self.lo), fmt_bound(self.hi))
    }
}

fn fmt_bound(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        v.to_string()
    }
}

/// A union of pairwise disjoint intervals, kept sorted by lower bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Interval>", into = "Vec<Interval>")]
pub struct Region {
    intervals: Vec<Interval>,
}

impl Region {
    pub fn new(mut intervals: Vec<Interval>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::Parse("region has no intervals".into()));
        }
        intervals.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for w in intervals.windows(2) {
            if w[0].overlaps(&w[1]) {
                return Err(Error::Parse(format!("intervals {} and {} overlap", w[0], w[1])));
            }
        }
        Ok(Region { intervals })
    }

    /// The finite value set `{v_1, …, v_m}`.
    pub fn points(values: &[f64]) -> Result<Self> {
        let mut vals = values.to_vec();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        Region::new(vals.into_iter().map(Interval::point).collect::<Result<_>>()?)
    }

    /// The whole real line.
    pub fn everything() -> Self {
        Region {
            intervals: vec![Interval {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
                lo_closed: false,
                hi_closed: false,
            }],
        }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains(x))
    }
}

impl TryFrom<Vec<Interval>> for Region {
    type Error = Error;

    fn try_from(v: Vec<Interval>) -> Result<Self> {
        Region::new(v)
    }
}

impl From<Region> for Vec<Interval> {
    fn from(r: Region) -> Self {
        r.intervals
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, iv) in self.intervals.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}

fn parse_bound(s: &str) -> Result<f64> {
    let t = s.trim();
    match t.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => Ok(f64::INFINITY),
        "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        _ => t
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("not a number: {t:?}"))),
    }
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix('{') {
            let inner = inner
                .strip_suffix('}')
                .ok_or_else(|| Error::Parse("unterminated value set".into()))?;
            let vals = inner.split(',').map(parse_bound).collect::<Result<Vec<_>>>()?;
            return Region::points(&vals);
        }

        let mut intervals = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let lo_closed = match rest.as_bytes()[0] {
                b'[' => true,
                b'(' => false,
                _ => return Err(Error::Parse(format!("expected '[' or '(' at {rest:?}"))),
            };
            let end = rest
                .find([']', ')'])
                .ok_or_else(|| Error::Parse(format!("unterminated interval in {s:?}")))?;
            let hi_closed = rest.as_bytes()[end] == b']';
            let body = &rest[1..end];
            let (a, b) = body
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("interval needs two bounds: {body:?}")))?;
            intervals.push(Interval::new(parse_bound(a)?, parse_bound(b)?, lo_closed, hi_closed)?);
            rest = rest[end + 1..].trim_start();
            if let Some(r) = rest.strip_prefix(',') {
                rest = r.trim_start();
            } else if !rest.is_empty() {
                return Err(Error::Parse(format!("expected ',' between intervals at {rest:?}")));
            }
        }
        Region::new(intervals)
    }
}
