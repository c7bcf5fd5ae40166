//! Gauges (Hausdorff functions), their order at zero, the hat transform and
//! gauge remetrization.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use serde::{Serialize, Serializer};

use crate::metric::{validate_metric, MetricMode, MetricReport, PointCloud};
use crate::{seeded_rng, Error, Result};

/// Grid density of every geometric grid in this module.
pub const PER_DECADE: usize = 64;
/// Default depth of the hat and ord grids, in base-10 decades.
pub const DEFAULT_DECADES: usize = 40;
/// Slack allowed between `β` and the ord estimate before the hat transform
/// refuses.
pub const ORD_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub enum Gauge {
    /// `coef · r^β`
    Pow { beta: f64, coef: f64 },
    /// `r^β (ln 1/r)^γ` on `(0, 1/e]`, continued linearly above.
    LogPow { beta: f64, gamma: f64 },
    /// Log-linear interpolation of `(r, h)` nodes, ascending in `r`.
    Table { r: Vec<f64>, h: Vec<f64> },
}

fn parse_real(s: &str) -> Result<f64> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((p, q)) => p.trim().parse::<f64>().ok().zip(q.trim().parse::<f64>().ok()).map(|(p, q)| p / q),
        None => s.parse::<f64>().ok(),
    };
    v.filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse(format!("bad number `{s}`")))
}

impl Gauge {
    pub fn pow(beta: f64) -> Result<Gauge> {
        Gauge::pow_scaled(beta, 1.0)
    }

    pub fn pow_scaled(beta: f64, coef: f64) -> Result<Gauge> {
        if !(beta.is_finite() && beta > 0.0 && coef.is_finite() && coef > 0.0) {
            return Err(Error::Domain(format!("pow gauge needs β > 0, c > 0 (got {beta}, {coef})")));
        }
        Ok(Gauge::Pow { beta, coef })
    }

    pub fn logpow(beta: f64, gamma: f64) -> Result<Gauge> {
        if !(beta.is_finite() && beta > 0.0 && gamma.is_finite()) {
            return Err(Error::Domain(format!("logpow gauge needs β > 0 (got {beta})")));
        }
        if gamma > beta {
            return Err(Error::Domain(format!(
                "logpow:{beta},{gamma} decreases near 1/e; needs γ ≤ β"
            )));
        }
        Ok(Gauge::LogPow { beta, gamma })
    }

    pub fn table(r: Vec<f64>, h: Vec<f64>) -> Result<Gauge> {
        if r.len() != h.len() || r.len() < 2 {
            return Err(Error::Domain("table gauge needs at least two (r, h) rows".into()));
        }
        if r.iter().chain(&h).any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Domain("table gauge entries must be positive and finite".into()));
        }
        if r.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("table gauge radii must be strictly ascending".into()));
        }
        if h.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Domain("table gauge values must be nondecreasing".into()));
        }
        Ok(Gauge::Table { r, h })
    }

    /// Rows `r,h` without a header.
    pub fn read_table_csv(path: &Path) -> Result<Gauge> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)?;
        let (mut r, mut h) = (Vec::new(), Vec::new());
        for rec in reader.records() {
            let rec = rec?;
            if rec.len() != 2 {
                return Err(Error::Parse(format!("table rows need two fields, found {}", rec.len())));
            }
            r.push(parse_real(&rec[0])?);
            h.push(parse_real(&rec[1])?);
        }
        Gauge::table(r, h)
    }

    /// Largest admissible argument, if any.
    pub fn r_top(&self) -> Option<f64> {
        match self {
            Gauge::Table { r, .. } => r.last().copied(),
            _ => None,
        }
    }

    /// `h(r)`; `h(0) = 0`.
    pub fn evaluate(&self, r: f64) -> Result<f64> {
        if !(r.is_finite() && r >= 0.0) || self.r_top().is_some_and(|top| r > top) {
            return Err(Error::Domain(format!("r = {r} outside the gauge domain")));
        }
        Ok(self.eval_unchecked(r))
    }

    pub(crate) fn eval_unchecked(&self, r: f64) -> f64 {
        if r == 0.0 {
            return 0.0;
        }
        match self {
            Gauge::Pow { beta, coef } => coef * r.powf(*beta),
            Gauge::LogPow { beta, gamma } => {
                let knee = (-1.0f64).exp();
                if r <= knee {
                    r.powf(*beta) * (1.0 / r).ln().powf(*gamma)
                } else {
                    let value = knee.powf(*beta);
                    let slope = (beta - gamma) * value / knee;
                    value + slope * (r - knee)
                }
            }
            Gauge::Table { r: rs, h } => {
                let i = rs.partition_point(|&x| x < r);
                let (a, b) = match i {
                    0 => (0, 1),
                    i if i >= rs.len() => (rs.len() - 2, rs.len() - 1),
                    i => {
                        if rs[i] == r {
                            return h[i];
                        }
                        (i - 1, i)
                    }
                };
                if h[a] == h[b] {
                    return h[a];
                }
                let t = (r.ln() - rs[a].ln()) / (rs[b].ln() - rs[a].ln());
                let v = (h[a].ln() + t * (h[b].ln() - h[a].ln())).exp();
                if (0.0..=1.0).contains(&t) {
                    v.clamp(h[a], h[b])
                } else {
                    v
                }
            }
        }
    }

    /// `ord h` where it is known in closed form.
    pub fn claimed_ord(&self) -> Option<f64> {
        match self {
            Gauge::Pow { beta, .. } | Gauge::LogPow { beta, .. } => Some(*beta),
            Gauge::Table { .. } => None,
        }
    }
}

impl FromStr for Gauge {
    type Err = Error;

    /// `pow:<β>`, `logpow:<β>,<γ>` or `table:<path.csv>`.
    fn from_str(s: &str) -> Result<Gauge> {
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("gauge `{s}` lacks a `kind:` prefix")))?;
        match kind {
            "pow" => Gauge::pow(parse_real(args)?),
            "logpow" => {
                let (b, g) = args
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("`{s}`: logpow takes <β>,<γ>")))?;
                Gauge::logpow(parse_real(b)?, parse_real(g)?)
            }
            "table" => Gauge::read_table_csv(Path::new(args)),
            other => Err(Error::Parse(format!("unknown gauge kind `{other}`"))),
        }
    }
}

impl fmt::Display for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gauge::Pow { beta, coef } if *coef == 1.0 => write!(f, "pow:{beta}"),
            Gauge::Pow { beta, coef } => write!(f, "{coef}*pow:{beta}"),
            Gauge::LogPow { beta, gamma } => write!(f, "logpow:{beta},{gamma}"),
            Gauge::Table { r, .. } => write!(f, "table[{} rows]", r.len()),
        }
    }
}

impl Serialize for Gauge {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// `r_i = 10^{-i/64}` for `i = 0..=64·decades`, descending from 1.
pub fn geometric_grid(decades: usize) -> Vec<f64> {
    (0..=decades * PER_DECADE)
        .map(|i| 10f64.powf(-(i as f64) / PER_DECADE as f64))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrdEstimate {
    pub decades: usize,
    /// `(r, log h(r) / log r)` for `r < 1`, descending in `r`.
    #[serde(skip)]
    pub grid: Vec<(f64, f64)>,
    /// Minimum of the ratio over the finest decade.
    pub tail_min: f64,
    /// Minimum over the finest eighth of a decade; the liminf surrogate.
    pub estimate: f64,
    pub finest: f64,
    pub claimed_ord: Option<f64>,
}

/// Sample `log h(r)/log r` down to `10^-decades`.
pub fn ord_estimate(h: &Gauge, decades: usize) -> Result<OrdEstimate> {
    if decades < 2 {
        return Err(Error::Domain("ord estimate needs at least two decades".into()));
    }
    let grid: Vec<(f64, f64)> = geometric_grid(decades)[1..]
        .iter()
        .map(|&r| (r, h.eval_unchecked(r).ln() / r.ln()))
        .collect();
    let tail_min = |points: usize| {
        grid[grid.len() - points..]
            .iter()
            .map(|&(_, v)| v)
            .fold(f64::INFINITY, f64::min)
    };
    Ok(OrdEstimate {
        decades,
        tail_min: tail_min(PER_DECADE),
        estimate: tail_min(PER_DECADE / 8),
        finest: grid.last().expect("nonempty grid").1,
        claimed_ord: h.claimed_ord(),
        grid,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HatChecks {
    /// Strictly increasing on the grid.
    pub mono: bool,
    /// `ĥ ≥ h + r^β` on the grid, to 1e-12 relative.
    pub dominates: bool,
    /// `ĥ(r+s)^{1/β} ≤ ĥ(r)^{1/β} + ĥ(s)^{1/β}` on sampled triples, to 1e-9.
    pub subadd: bool,
    /// `ψ(2r) ≤ ψ(r)`, i.e. `ĥ(2r) ≤ 2^β ĥ(r)`, on the grid.
    pub doubling: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HatReport {
    pub beta: f64,
    pub decades: usize,
    pub grid_points: usize,
    pub bounded: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sup_psi: Option<f64>,
    pub checks: HatChecks,
    pub subadd_triples: usize,
    pub worst_subadd_excess: f64,
    pub worst_dominance_gap: f64,
    pub ord_input: f64,
    pub ord_hat: f64,
    pub hat: Gauge,
}

impl HatReport {
    pub fn all_ok(&self) -> bool {
        let c = &self.checks;
        c.mono && c.dominates && c.subadd && c.doubling
    }
}

const SUBADD_TRIPLES: usize = 10_000;
const SUBADD_TOL: f64 = 1e-9;
const DOMINANCE_TOL: f64 = 1e-12;
const BOUNDED_TOL: f64 = 1e-9;

/// The hat transform, refusing when `β` exceeds the ord estimate of `h` by
/// more than [`ORD_TOLERANCE`].
pub fn hat_transform(h: &Gauge, beta: f64, decades: usize) -> Result<HatReport> {
    let ord = ord_estimate(h, decades)?;
    if beta > ord.estimate + ORD_TOLERANCE {
        return Err(Error::Rejected(format!(
            "β = {beta} exceeds the ord estimate {} of {h}",
            ord.estimate
        )));
    }
    hat_transform_unchecked(h, beta, decades)
}

/// The hat transform without the `β ≤ ord h` precondition.
///
/// `h* = h + r^β` and `ψ(r) = sup_{r≤s≤1} s^{-β} h*(s)`, taken as a reverse
/// cumulative maximum on the grid. If `ψ` stays flat to 1e-9 the result is
/// `sup ψ · r^β`, otherwise the table `r^β ψ(r)`.
pub fn hat_transform_unchecked(h: &Gauge, beta: f64, decades: usize) -> Result<HatReport> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::Domain(format!("β = {beta} must be positive")));
    }
    if let Some(top) = h.r_top() {
        if top < 1.0 {
            return Err(Error::Domain(format!("gauge domain ends at {top} < 1")));
        }
    }
    let grid = geometric_grid(decades);
    let h_star: Vec<f64> = grid.iter().map(|&r| h.eval_unchecked(r) + r.powf(beta)).collect();
    let mut psi = Vec::with_capacity(grid.len());
    let mut running = f64::NEG_INFINITY;
    for (&r, &hs) in grid.iter().zip(&h_star) {
        running = running.max(hs / r.powf(beta));
        psi.push(running);
    }
    let sup_psi = *psi.last().expect("nonempty grid");
    let bounded = sup_psi / psi[0] < 1.0 + BOUNDED_TOL;
    let r_asc: Vec<f64> = grid.iter().rev().copied().collect();
    let hat = if bounded {
        Gauge::Pow { beta, coef: sup_psi }
    } else {
        let h_asc: Vec<f64> = grid
            .iter()
            .zip(&psi)
            .rev()
            .map(|(&r, &p)| r.powf(beta) * p)
            .collect();
        Gauge::Table { r: r_asc.clone(), h: h_asc }
    };
    let hat_vals: Vec<f64> = grid.iter().map(|&r| hat.eval_unchecked(r)).collect();

    let mono = hat_vals.windows(2).all(|w| w[1] < w[0]);
    let worst_dominance_gap = hat_vals
        .iter()
        .zip(&h_star)
        .map(|(&hv, &hs)| (hs - hv) / hs)
        .fold(f64::NEG_INFINITY, f64::max);
    let dominates = worst_dominance_gap <= DOMINANCE_TOL;

    // ψ between grid radii: log-linear ĥ at fixed β is log-linear ψ, and
    // interpolating the stored cummax keeps it exactly nonincreasing
    let psi_asc: Vec<f64> = psi.iter().rev().copied().collect();
    let psi_of = |r: f64| -> f64 {
        if bounded {
            return sup_psi;
        }
        let i = r_asc.partition_point(|&x| x < r);
        if i < r_asc.len() && r_asc[i] == r {
            return psi_asc[i];
        }
        let (pa, pb) = (psi_asc[i - 1], psi_asc[i]);
        if pa == pb {
            return pa;
        }
        let t = (r.ln() - r_asc[i - 1].ln()) / (r_asc[i].ln() - r_asc[i - 1].ln());
        (pa.ln() + t * (pb.ln() - pa.ln())).exp().clamp(pb, pa)
    };
    let doubling = grid
        .iter()
        .filter(|&&r| 2.0 * r <= 1.0)
        .all(|&r| psi_of(2.0 * r) <= psi_of(r));

    let mut rng = seeded_rng(0);
    let low = -(decades as f64);
    let mut worst_subadd_excess = f64::NEG_INFINITY;
    let mut triples = 0;
    while triples < SUBADD_TRIPLES {
        let r = 10f64.powf(rng.gen_range(low..0.0));
        // half the samples at comparable scales
        let s = if triples % 2 == 0 {
            10f64.powf(rng.gen_range(low..0.0))
        } else {
            r * 10f64.powf(rng.gen_range(-2.0..2.0))
        };
        if r + s > 1.0 || s < grid[grid.len() - 1] {
            continue;
        }
        triples += 1;
        let root = |v: f64| hat.eval_unchecked(v).powf(1.0 / beta);
        let rhs = root(r) + root(s);
        worst_subadd_excess = worst_subadd_excess.max((root(r + s) - rhs) / rhs);
    }
    let subadd = worst_subadd_excess <= SUBADD_TOL;

    let ord_input = ord_estimate(h, decades)?.estimate;
    let ord_hat = ord_estimate(&hat, decades)?.estimate;
    Ok(HatReport {
        beta,
        decades,
        grid_points: grid.len(),
        bounded,
        sup_psi: bounded.then_some(sup_psi),
        checks: HatChecks {
            mono,
            dominates,
            subadd,
            doubling,
        },
        subadd_triples: triples,
        worst_subadd_excess,
        worst_dominance_gap,
        ord_input,
        ord_hat,
        hat,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Remetrized {
    pub gauge: Gauge,
    pub analytic: bool,
    pub triples_checked: usize,
    pub metric: MetricReport,
    pub ultrametric: MetricReport,
    #[serde(skip)]
    pub cloud: PointCloud,
}

/// Certify that `h` can remetrize distances drawn from `dists` (sorted,
/// deduplicated): `pow:α` with `α ≤ 1` analytically, anything else by
/// monotonicity on `dists` and subadditivity on triples `(a, b, a+b)`.
/// Returns whether the analytic route was taken and the triples checked.
pub fn certify_gauge(h: &Gauge, dists: &[f64]) -> Result<(bool, usize)> {
    if let Some(&top) = dists.last() {
        h.evaluate(top)?;
    }
    if matches!(h, Gauge::Pow { beta, .. } if *beta <= 1.0) {
        return Ok((true, 0));
    }
    let vals: Vec<f64> = dists.iter().map(|&d| h.eval_unchecked(d)).collect();
    if let Some(w) = (1..vals.len()).find(|&i| vals[i] < vals[i - 1]) {
        return Err(Error::Rejected(format!(
            "gauge decreases between r = {} and r = {}",
            dists[w - 1],
            dists[w]
        )));
    }
    let top = h.r_top().unwrap_or(f64::INFINITY);
    let mut triples = 0;
    let mut check = |a: f64, b: f64| -> Result<()> {
        if a + b > top {
            return Ok(());
        }
        triples += 1;
        let lhs = h.eval_unchecked(a + b);
        let rhs = h.eval_unchecked(a) + h.eval_unchecked(b);
        if lhs > rhs * (1.0 + SUBADD_TOL) {
            return Err(Error::Rejected(format!(
                "gauge not subadditive: h({a} + {b}) = {lhs} > {rhs}"
            )));
        }
        Ok(())
    };
    if dists.len() * dists.len() <= SUBADD_TRIPLES {
        for &a in dists {
            for &b in dists {
                check(a, b)?;
            }
        }
    } else {
        let mut rng = seeded_rng(0);
        for _ in 0..SUBADD_TRIPLES {
            let a = dists[rng.gen_range(0..dists.len())];
            let b = dists[rng.gen_range(0..dists.len())];
            check(a, b)?;
        }
    }
    Ok((false, triples))
}

/// Sorted distinct pairwise distances.
pub(crate) fn distinct_distances(cloud: &PointCloud, idx: &[usize]) -> Vec<f64> {
    let mut dists: Vec<f64> = idx
        .iter()
        .enumerate()
        .flat_map(|(a, &i)| idx[a + 1..].iter().map(move |&j| (i, j)))
        .map(|(i, j)| cloud.dist(i, j))
        .collect();
    dists.sort_by(f64::total_cmp);
    dists.dedup();
    dists
}

/// `ρ_ij = h(d_ij)` as a distance matrix, after [`certify_gauge`] on the
/// observed distances.
pub fn remetrize(cloud: &PointCloud, h: &Gauge) -> Result<Remetrized> {
    let n = cloud.len();
    let all: Vec<usize> = (0..n).collect();
    let (analytic, triples_checked) = certify_gauge(h, &distinct_distances(cloud, &all))?;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| h.eval_unchecked(cloud.dist(i, j))).collect())
        .collect();
    let out = PointCloud::from_matrix(rows)?;
    Ok(Remetrized {
        gauge: h.clone(),
        analytic,
        triples_checked,
        metric: validate_metric(&out, MetricMode::Triangle),
        ultrametric: validate_metric(&out, MetricMode::Ultra),
        cloud: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_closed_forms() {
        let g = Gauge::pow(2.0).unwrap();
        assert_eq!(g.evaluate(0.5).unwrap(), 0.25);
        assert_eq!(Gauge::pow(0.37).unwrap().evaluate(1.0).unwrap(), 1.0);
        let lp = Gauge::logpow(1.0, 1.0).unwrap();
        let r = (-2.0f64).exp();
        assert!((lp.evaluate(r).unwrap() - 2.0 * r).abs() < 1e-15);
        assert_eq!(g.evaluate(0.0).unwrap(), 0.0);
        assert!(g.evaluate(-1.0).is_err());
    }

    #[test]
    fn logpow_continues_increasing() {
        let lp = Gauge::logpow(0.8, 0.3).unwrap();
        let mut prev = 0.0;
        for i in 1..400 {
            let v = lp.evaluate(i as f64 / 100.0).unwrap();
            assert!(v > prev);
            prev = v;
        }
        assert!(Gauge::logpow(0.5, 1.0).is_err());
    }

    #[test]
    fn parses_specs() {
        assert_eq!("pow:1/2".parse::<Gauge>().unwrap(), Gauge::pow(0.5).unwrap());
        assert_eq!(
            "logpow:1,0.5".parse::<Gauge>().unwrap(),
            Gauge::logpow(1.0, 0.5).unwrap()
        );
        for bad in ["pow", "pow:x", "exp:1", "logpow:1"] {
            assert!(matches!(bad.parse::<Gauge>(), Err(Error::Parse(_))), "{bad}");
        }
        assert!(matches!("pow:-1".parse::<Gauge>(), Err(Error::Domain(_))));
    }

    #[test]
    fn table_interpolates_power_laws_exactly() {
        let r: Vec<f64> = (0..=20).rev().map(|i| 10f64.powi(-i)).collect();
        let h: Vec<f64> = r.iter().map(|x| x.sqrt()).collect();
        let t = Gauge::table(r, h).unwrap();
        for x in [3e-7, 0.02, 0.5] {
            assert!((t.evaluate(x).unwrap() - x.sqrt()).abs() <= 1e-12 * x.sqrt());
        }
        let ord = ord_estimate(&t, 20).unwrap();
        assert!((ord.estimate - 0.5).abs() < 1e-9);
        assert!(t.evaluate(2.0).is_err());
    }

    #[test]
    fn ord_examples() {
        let ord = ord_estimate(&Gauge::pow(0.7).unwrap(), 10).unwrap();
        assert!(ord.grid.iter().all(|&(_, v)| (v - 0.7).abs() < 1e-14));
        assert_eq!(ord.claimed_ord, Some(0.7));
        let lp = ord_estimate(&Gauge::logpow(1.0, 1.0).unwrap(), 40).unwrap();
        assert!((0.95..=1.0).contains(&lp.estimate), "{}", lp.estimate);
        assert!(ord_estimate(&Gauge::pow(1.0).unwrap(), 1).is_err());
    }

    #[test]
    fn hat_of_square_is_2r() {
        let rep = hat_transform(&Gauge::pow(2.0).unwrap(), 1.0, 40).unwrap();
        assert!(rep.bounded);
        assert!((rep.sup_psi.unwrap() - 2.0).abs() < 1e-12);
        assert!(rep.all_ok());
        for r in geometric_grid(40) {
            assert!((rep.hat.evaluate(r).unwrap() - 2.0 * r).abs() <= 1e-12 * r);
        }
    }

    #[test]
    fn hat_of_sqrt_is_unbounded() {
        let h = Gauge::pow(0.5).unwrap();
        assert!(matches!(hat_transform(&h, 1.0, 40), Err(Error::Rejected(_))));
        let rep = hat_transform_unchecked(&h, 1.0, 40).unwrap();
        assert!(!rep.bounded);
        assert!(rep.all_ok());
        for r in geometric_grid(40) {
            let want = r.sqrt() + r;
            assert!((rep.hat.evaluate(r).unwrap() - want).abs() <= 1e-12 * want);
        }
    }

    #[test]
    fn hat_scaling_case() {
        let rep = hat_transform(&Gauge::pow(0.7).unwrap(), 0.7, 40).unwrap();
        assert!(rep.bounded && rep.all_ok());
        assert!((rep.sup_psi.unwrap() - 2.0).abs() < 1e-12);
        assert!((rep.ord_hat - 0.7).abs() < ORD_TOLERANCE);
    }

    #[test]
    fn remetrize_examples() {
        let tri = PointCloud::from_matrix(vec![
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ])
        .unwrap();
        let out = remetrize(&tri, &Gauge::pow(0.5).unwrap()).unwrap();
        assert!(out.analytic && out.metric.ok);
        assert_eq!(out.cloud.dist(0, 2), 2f64.sqrt());
        let same = remetrize(&tri, &Gauge::pow(1.0).unwrap()).unwrap();
        assert_eq!(same.cloud.distance_matrix(), tri.distance_matrix());
        assert!(matches!(
            remetrize(&tri, &Gauge::pow(2.0).unwrap()),
            Err(Error::Rejected(_))
        ));
    }

    #[test]
    fn remetrized_ultrametric_stays_ultrametric() {
        let u = PointCloud::from_matrix(vec![
            vec![0.0, 0.25, 1.0, 1.0],
            vec![0.25, 0.0, 1.0, 1.0],
            vec![1.0, 1.0, 0.0, 0.5],
            vec![1.0, 1.0, 0.5, 0.0],
        ])
        .unwrap();
        let out = remetrize(&u, &Gauge::pow(0.5).unwrap()).unwrap();
        assert!(out.ultrametric.ok);
        let lp = remetrize(&u, &Gauge::logpow(0.9, 0.2).unwrap()).unwrap();
        assert!(lp.ultrametric.ok && !lp.analytic);
    }
}
