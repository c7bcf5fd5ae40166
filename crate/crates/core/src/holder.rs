//! Empirical moduli and McShane extension.

use serde::Serialize;

use crate::gauge::{certify_gauge, distinct_distances, Gauge};
use crate::metric::PointCloud;
use crate::{Error, Result};

/// Step of the exponent grid searched by [`modulus_fit`].
pub const BETA_STEP: f64 = 1e-3;
/// Largest exponent searched.
pub const BETA_MAX: f64 = 4.0;
pub const MIN_PAIRS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusFit {
    pub pairs: usize,
    /// Pairs with `d_Y > 0`, the only ones that constrain the fit.
    pub used: usize,
    pub beta_hat: f64,
    pub log_c: f64,
    pub c: f64,
    /// `max (log d_Y − β̂ log d_X − log C)`; never positive.
    pub max_residual: f64,
}

/// Upper-envelope power law `d_Y ≤ C d_X^β` through `(d_X, d_Y)` pairs.
///
/// For each `β` on a grid of step [`BETA_STEP`] in `[0, BETA_MAX]` the
/// smallest admissible `log C(β) = max (y − βx)` is taken in log-log
/// coordinates; `β̂` minimizes the envelope height `β x̄ + log C(β)` at the
/// mean `x̄`, i.e. it is the supporting line of the upper hull there. Ties go
/// to the smaller `β`.
pub fn modulus_fit(pairs: &[(f64, f64)]) -> Result<ModulusFit> {
    if pairs.len() < MIN_PAIRS {
        return Err(Error::Domain(format!(
            "modulus fit needs at least {MIN_PAIRS} pairs, got {}",
            pairs.len()
        )));
    }
    let mut pts = Vec::with_capacity(pairs.len());
    for &(dx, dy) in pairs {
        if !(dx.is_finite() && dy.is_finite() && dx >= 0.0 && dy >= 0.0) {
            return Err(Error::Domain(format!("pair ({dx}, {dy}) is not a pair of distances")));
        }
        if dx == 0.0 {
            if dy > 0.0 {
                return Err(Error::Rejected(format!(
                    "d_Y = {dy} at d_X = 0: not a function of the metric quotient"
                )));
            }
            continue;
        }
        if dy > 0.0 {
            pts.push((dx.ln(), dy.ln()));
        }
    }
    if pts.len() < 2 {
        return Err(Error::Domain("fewer than two pairs with d_Y > 0".into()));
    }
    let x_mean = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let log_c_at = |beta: f64| {
        pts.iter()
            .map(|&(x, y)| y - beta * x)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let steps = (BETA_MAX / BETA_STEP).round() as usize;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..=steps {
        let beta = i as f64 * BETA_STEP;
        let log_c = log_c_at(beta);
        let height = beta * x_mean + log_c;
        if height < best.0 {
            best = (height, beta, log_c);
        }
    }
    let (_, beta_hat, log_c) = best;
    let max_residual = pts
        .iter()
        .map(|&(x, y)| y - beta_hat * x - log_c)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(ModulusFit {
        pairs: pairs.len(),
        used: pts.len(),
        beta_hat,
        log_c,
        c: log_c.exp(),
        max_residual,
    })
}

/// Values `f(z) ∈ R^m` at anchor indices of a source cloud.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledMap {
    anchors: Vec<(usize, Vec<f64>)>,
}

impl SampledMap {
    pub fn new(anchors: Vec<(usize, Vec<f64>)>) -> Result<Self> {
        let m = anchors.first().map(|a| a.1.len()).unwrap_or(0);
        if anchors.is_empty() || m == 0 {
            return Err(Error::Domain("a sampled map needs an anchor with a nonempty value".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for (i, v) in &anchors {
            if !seen.insert(*i) {
                return Err(Error::Domain(format!("duplicate anchor index {i}")));
            }
            if v.len() != m {
                return Err(Error::Shape {
                    expected: m,
                    found: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Domain(format!("anchor {i} has a non-finite value")));
            }
        }
        Ok(SampledMap { anchors })
    }

    pub fn anchors(&self) -> &[(usize, Vec<f64>)] {
        &self.anchors
    }

    pub fn target_dim(&self) -> usize {
        self.anchors[0].1.len()
    }

    fn indices(&self) -> Vec<usize> {
        self.anchors.iter().map(|a| a.0).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extension {
    pub gauge: Gauge,
    pub gauge_analytic: bool,
    pub queries: Vec<usize>,
    pub values: Vec<Vec<f64>>,
    /// `f*(z) = f(z)` at every anchor among the queries, compared exactly.
    pub agreement_ok: bool,
    /// `|f*(x) − f*(y)| ≤ h(d(x, y))` per coordinate over all query pairs.
    pub modulus_ok: bool,
    pub modulus_pairs: usize,
    /// Largest `|f*(x) − f*(y)| − h(d(x, y))`; at most zero when the check holds.
    pub worst_excess: f64,
}

/// `f*(x) = min_z f(z) + h(d(x, z))` per coordinate.
///
/// The gauge is certified on the anchor distances and the anchors must
/// satisfy `|f(z) − f(z')| ≤ h(d(z, z'))`; a violation is rejected with the
/// offending pair.
pub fn mcshane_extend(
    map: &SampledMap,
    h: &Gauge,
    source: &PointCloud,
    queries: &[usize],
) -> Result<Extension> {
    let n = source.len();
    if let Some(&bad) = map.indices().iter().chain(queries).find(|&&i| i >= n) {
        return Err(Error::Domain(format!("index {bad} outside a cloud of {n} points")));
    }
    let (gauge_analytic, _) = certify_gauge(h, &distinct_distances(source, &map.indices()))?;
    let anchors = map.anchors();
    for (a, (z, fz)) in anchors.iter().enumerate() {
        for (w, fw) in &anchors[a + 1..] {
            let hd = h.evaluate(source.dist(*z, *w))?;
            for c in 0..fz.len() {
                // the forms the agreement argument needs, without a rounded difference
                if fw[c] + hd < fz[c] || fz[c] + hd < fw[c] {
                    return Err(Error::Rejected(format!(
                        "anchors {z} and {w} violate the modulus in coordinate {c}: \
                         |{} − {}| > h({}) = {hd}",
                        fz[c],
                        fw[c],
                        source.dist(*z, *w)
                    )));
                }
            }
        }
    }
    let m = map.target_dim();
    let extend_one = |x: usize| -> Result<Vec<f64>> {
        let mut out = vec![f64::INFINITY; m];
        for (z, fz) in anchors {
            let hd = h.evaluate(source.dist(x, *z))?;
            for c in 0..m {
                out[c] = out[c].min(fz[c] + hd);
            }
        }
        Ok(out)
    };
    let values = queries.iter().map(|&x| extend_one(x)).collect::<Result<Vec<_>>>()?;
    let agreement_ok = anchors.iter().all(|(z, fz)| {
        queries
            .iter()
            .zip(&values)
            .filter(|(q, _)| *q == z)
            .all(|(_, v)| v == fz)
    });
    let (worst_excess, modulus_pairs) = modulus_excess(source, queries, &values, h)?;
    Ok(Extension {
        gauge: h.clone(),
        gauge_analytic,
        queries: queries.to_vec(),
        values,
        agreement_ok,
        modulus_ok: worst_excess <= 0.0,
        modulus_pairs,
        worst_excess,
    })
}

/// Largest `|f(x) − f(y)| − h(d(x, y))` over query pairs and coordinates.
pub fn modulus_excess(
    source: &PointCloud,
    queries: &[usize],
    values: &[Vec<f64>],
    h: &Gauge,
) -> Result<(f64, usize)> {
    let mut worst = f64::NEG_INFINITY;
    let mut pairs = 0;
    for a in 0..queries.len() {
        for b in a + 1..queries.len() {
            let hd = h.evaluate(source.dist(queries[a], queries[b]))?;
            pairs += 1;
            for (u, v) in values[a].iter().zip(&values[b]) {
                let (hi, lo) = if u >= v { (u, v) } else { (v, u) };
                // hi ≤ lo + h, compared without a rounded difference
                let excess = if *hi <= lo + hd { -(lo + hd - hi) } else { hi - lo - hd };
                worst = worst.max(excess);
            }
        }
    }
    Ok((worst, pairs))
}
