//! Parameter grids: `start:stop:count` (endpoints included) or comma lists.
//! Any number may carry a `pi` suffix, e.g. `0.35pi` or `pi`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    Range { start: f64, stop: f64, count: usize },
    List(Vec<f64>),
}

fn number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let value = match s.strip_suffix("pi") {
        Some("") | Some("+") => PI,
        Some("-") => -PI,
        Some(m) => m.parse::<f64>().map_err(|_| format!("bad number `{s}`"))? * PI,
        None => s.parse::<f64>().map_err(|_| format!("bad number `{s}`"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("non-finite value `{s}`"))
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            let [start, stop, count] = parts[..] else {
                return Err(format!("expected start:stop:count, got `{s}`"));
            };
            let count: usize = count.trim().parse().map_err(|_| format!("bad count `{count}`"))?;
            if count == 0 {
                return Err("grid count must be at least 1".into());
            }
            return Ok(GridSpec::Range { start: number(start)?, stop: number(stop)?, count });
        }
        let values = s.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
        if values.is_empty() {
            return Err("empty grid".into());
        }
        Ok(GridSpec::List(values))
    }
}

impl GridSpec {
    pub fn single(v: f64) -> Self {
        GridSpec::List(vec![v])
    }

    pub fn values(&self) -> Vec<f64> {
        match *self {
            GridSpec::Range { start, count: 1, .. } => vec![start],
            GridSpec::Range { start, stop, count } => {
                let step = (stop - start) / (count - 1) as f64;
                // the last point is set exactly so that `stop` survives rounding
                (0..count).map(|k| if k + 1 == count { stop } else { start + step * k as f64 }).collect()
            }
            GridSpec::List(ref v) => v.clone(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            GridSpec::Range { count, .. } => *count,
            GridSpec::List(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Smallest spacing between grid values, infinite for a single value.
    pub fn min_step(&self) -> f64 {
        let mut v = self.values();
        v.sort_by(f64::total_cmp);
        v.windows(2).map(|w| w[1] - w[0]).filter(|d| *d > 0.0).fold(f64::INFINITY, f64::min)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridSpec::Range { start, stop, count } => write!(f, "{start:?}:{stop:?}:{count}"),
            GridSpec::List(v) => {
                let parts: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

impl Serialize for GridSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Closed interval `lo:hi` (or `lo,hi`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn contains(&self, x: f64) -> bool {
        (self.lo..=self.hi).contains(&x)
    }
}

impl FromStr for Window {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (lo, hi) = s.split_once([':', ',']).ok_or_else(|| format!("expected lo:hi, got `{s}`"))?;
        let (lo, hi) = (number(lo)?, number(hi)?);
        if lo >= hi {
            return Err(format!("empty window {lo}..{hi}"));
        }
        Ok(Window { lo, hi })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_include_endpoints() {
        let g: GridSpec = "0:3:61".parse().unwrap();
        let v = g.values();
        assert_eq!(v.len(), 61);
        assert_eq!((v[0], v[60]), (0.0, 3.0));
        assert!((v[20] - 1.0).abs() < 1e-15);
        assert_eq!("2:5:1".parse::<GridSpec>().unwrap().values(), vec![2.0]);
    }

    #[test]
    fn lists_and_pi() {
        let g: GridSpec = "0,0.35pi,0.75pi,pi".parse().unwrap();
        assert_eq!(g.values(), vec![0.0, 0.35 * PI, 0.75 * PI, PI]);
        assert_eq!("-pi".parse::<GridSpec>().unwrap().values(), vec![-PI]);
        assert_eq!("0:pi:3".parse::<GridSpec>().unwrap().values()[2], PI);
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "1:2", "1:2:0", "a", "1,,2", "1:2:x", "inf"] {
            assert!(bad.parse::<GridSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn windows() {
        let w: Window = "0.9:0.99".parse().unwrap();
        assert!(w.contains(0.9) && w.contains(0.99) && !w.contains(0.991));
        assert!("0.99:0.9".parse::<Window>().is_err());
        assert!("0.9".parse::<Window>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["0:3:61", "0.5,1,2"] {
            let g: GridSpec = s.parse().unwrap();
            assert_eq!(g.to_string().parse::<GridSpec>().unwrap(), g);
        }
    }
}
