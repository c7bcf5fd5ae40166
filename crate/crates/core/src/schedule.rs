//! Slow sequences and the coordinate blocks they induce.
//!
//! A sequence `G` splits the coordinate indices into consecutive blocks
//! `I_0, I_1, ...` with `|I_n| = G(n)`; coordinate `k ∈ I_n` carries weight
//! `r_k = 2^-n` in the torus and code metrics.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::{Error, Result};

/// Parametric description of `G`.
///
/// * `const:<g>` – `G(n) = g`
/// * `poly:<c>,<d>` – `G(n) = max(1, ⌈c·(n+1)^d⌉)`
/// * `list:<g0>,<g1>,...` – explicit values, the last one repeated
///
/// All three families grow at most polynomially, so `log G(n)/n → 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum GSpec {
    Const(usize),
    Poly { c: f64, d: f64 },
    List(Vec<usize>),
}

impl GSpec {
    pub fn value(&self, n: usize) -> usize {
        match self {
            GSpec::Const(g) => *g,
            GSpec::Poly { c, d } => {
                let v = (c * ((n + 1) as f64).powf(*d)).ceil();
                if v.is_finite() && v >= 1.0 {
                    v as usize
                } else {
                    1
                }
            }
            GSpec::List(values) => *values.get(n).or(values.last()).unwrap_or(&0),
        }
    }
}

impl FromStr for GSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("schedule `{s}` lacks a `kind:` prefix")))?;
        let ints = |args: &str| -> Result<Vec<usize>> {
            args.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad integer `{t}` in schedule `{s}`")))
                })
                .collect()
        };
        match kind {
            "const" => {
                let v = ints(args)?;
                if v.len() != 1 {
                    return Err(Error::Parse(format!("`{s}`: const takes one value")));
                }
                Ok(GSpec::Const(v[0]))
            }
            "poly" => {
                let parts: Vec<&str> = args.split(',').collect();
                if parts.len() != 2 {
                    return Err(Error::Parse(format!("`{s}`: poly takes <c>,<d>")));
                }
                let num = |t: &str| -> Result<f64> {
                    t.trim()
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite() && *v >= 0.0)
                        .ok_or_else(|| Error::Parse(format!("bad number `{t}` in schedule `{s}`")))
                };
                Ok(GSpec::Poly {
                    c: num(parts[0])?,
                    d: num(parts[1])?,
                })
            }
            "list" => {
                let v = ints(args)?;
                if v.is_empty() {
                    return Err(Error::Parse(format!("`{s}`: empty list")));
                }
                Ok(GSpec::List(v))
            }
            other => Err(Error::Parse(format!("unknown schedule kind `{other}`"))),
        }
    }
}

impl fmt::Display for GSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GSpec::Const(g) => write!(f, "const:{g}"),
            GSpec::Poly { c, d } => write!(f, "poly:{c},{d}"),
            GSpec::List(v) => {
                let parts: Vec<String> = v.iter().map(|g| g.to_string()).collect();
                write!(f, "list:{}", parts.join(","))
            }
        }
    }
}

impl Serialize for GSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// `G` truncated at level `n_max`, with its block partition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlowSchedule {
    spec: GSpec,
    n_max: usize,
    #[serde(rename = "G")]
    g: Vec<usize>,
    #[serde(skip)]
    block_of: Vec<usize>,
    #[serde(skip)]
    starts: Vec<usize>,
}

impl SlowSchedule {
    pub fn new(spec: GSpec, n_max: usize) -> Result<Self> {
        let g: Vec<usize> = (0..=n_max).map(|n| spec.value(n)).collect();
        if g.iter().all(|&v| v == 0) {
            return Err(Error::Domain(format!(
                "schedule `{spec}` is zero on the whole horizon 0..={n_max}"
            )));
        }
        let mut block_of = Vec::new();
        let mut starts = Vec::with_capacity(g.len());
        for (n, &len) in g.iter().enumerate() {
            starts.push(block_of.len());
            block_of.extend(std::iter::repeat_n(n, len));
        }
        Ok(SlowSchedule {
            spec,
            n_max,
            g,
            block_of,
            starts,
        })
    }

    /// Schedule with the exact values `g[0..]`, horizon `g.len() - 1`.
    pub fn from_values(g: Vec<usize>) -> Result<Self> {
        if g.is_empty() {
            return Err(Error::Domain("empty G".into()));
        }
        let n_max = g.len() - 1;
        Self::new(GSpec::List(g), n_max)
    }

    pub fn spec(&self) -> &GSpec {
        &self.spec
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn g(&self, n: usize) -> usize {
        self.g.get(n).copied().unwrap_or(0)
    }

    pub fn values(&self) -> &[usize] {
        &self.g
    }

    /// Total coordinate count `K`.
    pub fn coords(&self) -> usize {
        self.block_of.len()
    }

    /// Block index `n` with `k ∈ I_n`.
    pub fn block_of(&self, k: usize) -> usize {
        self.block_of[k]
    }

    /// Coordinate range `I_n`.
    pub fn block(&self, n: usize) -> std::ops::Range<usize> {
        let start = self.starts[n];
        start..start + self.g[n]
    }

    /// `r_k = 2^-n` for `k ∈ I_n`.
    pub fn weight(&self, k: usize) -> f64 {
        pow2_neg(self.block_of[k])
    }

    /// `max_{i ≤ n} G(i)` restricted to the horizon.
    pub fn running_max(&self, n: usize) -> usize {
        self.g[..=n.min(self.n_max)].iter().copied().max().unwrap_or(0)
    }
}

/// `2^-n` without going through `powi` rounding.
pub(crate) fn pow2_neg(n: usize) -> f64 {
    f64::from_bits(((1023 - n as i64).max(0) as u64) << 52)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_family() {
        assert_eq!("const:3".parse::<GSpec>().unwrap(), GSpec::Const(3));
        assert_eq!(
            "list:1,2,4".parse::<GSpec>().unwrap(),
            GSpec::List(vec![1, 2, 4])
        );
        let poly: GSpec = "poly:1,1".parse().unwrap();
        assert_eq!((0..4).map(|n| poly.value(n)).collect::<Vec<_>>(), [1, 2, 3, 4]);
        let list: GSpec = "list:2,5".parse().unwrap();
        assert_eq!(list.value(7), 5);
    }

    #[test]
    fn rejects_malformed_specs() {
        for bad in ["pow:1", "const", "const:x", "poly:1", "list:", "list:1,,2"] {
            let err = bad.parse::<GSpec>().unwrap_err();
            assert!(matches!(err, Error::Parse(_)), "{bad}");
        }
    }

    #[test]
    fn blocks_partition_coordinates() {
        let s = SlowSchedule::new("list:2,0,3".parse().unwrap(), 3).unwrap();
        assert_eq!(s.values(), &[2, 0, 3, 3]);
        assert_eq!(s.coords(), 8);
        assert_eq!(s.block(0), 0..2);
        assert!(s.block(1).is_empty());
        assert_eq!(s.block(2), 2..5);
        assert_eq!(s.block_of(4), 2);
        assert_eq!(s.weight(4), 0.25);
        assert_eq!(s.running_max(1), 2);
    }

    #[test]
    fn all_zero_horizon_is_rejected() {
        assert!(SlowSchedule::new(GSpec::Const(0), 4).is_err());
    }

    #[test]
    fn pow2_is_exact() {
        for n in 0..60 {
            assert_eq!(pow2_neg(n), 0.5f64.powi(n as i32));
        }
    }
}
