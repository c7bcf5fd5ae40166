//! End-to-end map of a finite metric space onto `[0,1]^m`.
//!
//! Stages: embed the cloud in the weighted torus, fit a dyadic shift that
//! puts as much of the sample as possible inside a Cantor system, read the
//! codes of the captured points, order the codes so that code-metric balls
//! are contiguous, spread the order over `[0,1]` by rank, push it onto the
//! cube with a Hilbert curve when `m ≥ 2`, and McShane-extend to the
//! uncaptured points.
//!
//! The ordering step is a substitute for an abstract monotone-space
//! construction and is flagged as such in every report.

use num_rational::BigRational;
use serde::Serialize;

use crate::cantor::{build_system, shift_fit, CantorSystem, DiscreteMeasure};
use crate::curves::{hilbert_curve, MAX_ORDER};
use crate::embedding::embed_cloud;
use crate::gauge::Gauge;
use crate::holder::{mcshane_extend, modulus_fit, ModulusFit, SampledMap};
use crate::metric::{code_dist, torus_dist, CodePoint, PointCloud, TorusPoint};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct PipelineParams {
    pub m: usize,
    pub n_max: usize,
    /// Exact `ε` of the Cantor system.
    pub epsilon: BigRational,
    pub depth: usize,
    pub grid_depth: usize,
    /// Extension gauge; `None` uses `c·2r^0.9` with `c ≥ 1` just large
    /// enough for the anchors.
    pub gauge: Option<Gauge>,
    /// Largest dyadic level tried in the density check.
    pub max_resolution: usize,
}

impl Default for PipelineParams {
    fn default() -> Self {
        PipelineParams {
            m: 1,
            n_max: 6,
            epsilon: BigRational::new(1.into(), 10.into()),
            depth: 12,
            grid_depth: 6,
            gauge: None,
            max_resolution: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageModuli {
    /// `d` against `d_G` of the embedding.
    pub embed: Option<ModulusFit>,
    /// `d_G` of shifted images against `ρ_G` of their codes.
    pub decode: Option<ModulusFit>,
    /// `ρ_G` against the rank parameter.
    pub order: Option<ModulusFit>,
    /// Rank parameter against the cube.
    pub curve: Option<ModulusFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub points: usize,
    pub m: usize,
    pub diameter: f64,
    pub n_max: usize,
    pub coordinates: usize,
    pub depth: usize,
    pub epsilon: String,
    pub shift_grid_depth: usize,
    pub captured: usize,
    pub captured_fraction: f64,
    pub distinct_codes: usize,
    pub curve_order: Option<u32>,
    pub extension_gauge: Option<Gauge>,
    pub extension_modulus_ok: Option<bool>,
    /// Largest `L` with every dyadic cell of side `2^-L` holding an image point.
    pub grid_resolution: usize,
    pub beta_hat: Option<f64>,
    pub stage_moduli: StageModuli,
    pub substitute_construction: bool,
    pub degenerate: bool,
    #[serde(skip)]
    pub image: Vec<Vec<f64>>,
}

fn pairs_of<F: Fn(usize, usize) -> (f64, f64)>(idx: &[usize], f: F) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for a in 0..idx.len() {
        for b in a + 1..idx.len() {
            out.push(f(idx[a], idx[b]));
        }
    }
    out
}

fn fit(pairs: &[(f64, f64)]) -> Option<ModulusFit> {
    modulus_fit(pairs).ok()
}

fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Key whose lexicographic order makes every `ρ_G` ball an interval: level
/// `j` lists digit `j − n_k` of each coordinate `k` with `n_k ≤ j`.
fn ball_order_key(sys: &CantorSystem, code: &CodePoint) -> Vec<bool> {
    let sched = sys.schedule();
    let levels = sched.n_max() + code.depth();
    let mut key = Vec::new();
    for j in 0..levels {
        for k in 0..code.len() {
            let n = sched.block_of(k);
            if n <= j && j - n < code.depth() {
                key.push(code.digit(k, j - n));
            }
        }
    }
    key
}

/// Largest `L ≤ max_level` such that the points meet every cell of the
/// `2^-L` grid of `[0,1]^m`.
pub fn dense_resolution(points: &[Vec<f64>], m: usize, max_level: usize) -> usize {
    let mut best = 0;
    for level in 1..=max_level {
        let side = 1usize << level;
        let Some(cells) = side.checked_pow(m as u32).filter(|&c| c <= points.len()) else {
            break;
        };
        let mut hit = vec![false; cells];
        for p in points {
            let idx = p.iter().rev().fold(0, |acc, &v| {
                acc * side + ((v * side as f64).floor() as usize).min(side - 1)
            });
            hit[idx] = true;
        }
        if hit.iter().all(|&h| h) {
            best = level;
        } else {
            break;
        }
    }
    best
}

pub fn pipeline_map_onto_cube(cloud: &PointCloud, params: &PipelineParams) -> Result<PipelineReport> {
    let m = params.m;
    if m == 0 {
        return Err(Error::Domain("target dimension must be at least 1".into()));
    }
    if cloud.is_empty() {
        return Err(Error::Domain("empty cloud".into()));
    }
    let (cloud, diameter) = cloud.normalized();
    let n = cloud.len();
    let mut report = PipelineReport {
        points: n,
        m,
        diameter,
        n_max: params.n_max,
        coordinates: 0,
        depth: params.depth,
        epsilon: params.epsilon.to_string(),
        shift_grid_depth: params.grid_depth,
        captured: 0,
        captured_fraction: 0.0,
        distinct_codes: 0,
        curve_order: None,
        extension_gauge: None,
        extension_modulus_ok: None,
        grid_resolution: 0,
        beta_hat: None,
        stage_moduli: StageModuli {
            embed: None,
            decode: None,
            order: None,
            curve: None,
        },
        substitute_construction: true,
        degenerate: false,
        image: vec![vec![0.0; m]; n],
    };
    if n == 1 || diameter == 0.0 {
        report.degenerate = true;
        return Ok(report);
    }
    let all: Vec<usize> = (0..n).collect();

    let emb = embed_cloud(&cloud, 0, params.n_max)?;
    let sched = emb.schedule.clone();
    report.coordinates = sched.coords();
    report.stage_moduli.embed = fit(&pairs_of(&all, |x, y| (cloud.dist(x, y), emb.image_dist(x, y))));

    let sys = build_system(params.epsilon.clone(), sched.clone(), params.depth)?;
    let mu = DiscreteMeasure::new(emb.images.iter().map(|p| (p.clone(), 1.0)).collect())?;
    let shift = shift_fit(&sys, &mu, params.grid_depth)?;
    let captured: Vec<usize> = (0..n).filter(|&i| shift.captured_atoms[i]).collect();
    report.captured = captured.len();
    report.captured_fraction = shift.captured_fraction();
    let codes: Vec<Option<CodePoint>> = shift.codes.clone();
    if captured.is_empty() {
        report.degenerate = true;
        return Ok(report);
    }
    let shift_point = TorusPoint::new(shift.shift.clone())?;
    let shifted: Vec<TorusPoint> = emb
        .images
        .iter()
        .map(|p| p.shifted(&shift_point))
        .collect::<Result<_>>()?;
    let code = |i: usize| codes[i].as_ref().expect("captured points carry codes");
    report.stage_moduli.decode = fit(&pairs_of(&captured, |x, y| {
        (
            torus_dist(&shifted[x], &shifted[y], &sched).expect("same schedule"),
            code_dist(code(x), code(y), &sched).expect("same schedule"),
        )
    }));

    // rank the distinct keys; equal codes share a parameter
    let mut keyed: Vec<(Vec<bool>, usize)> =
        captured.iter().map(|&i| (ball_order_key(&sys, code(i)), i)).collect();
    keyed.sort();
    let mut param = vec![0.0; n];
    let mut ranks = vec![0usize; n];
    let mut distinct = 0;
    for (a, (key, i)) in keyed.iter().enumerate() {
        if a > 0 && *key != keyed[a - 1].0 {
            distinct += 1;
        }
        ranks[*i] = distinct;
    }
    let distinct_codes = distinct + 1;
    report.distinct_codes = distinct_codes;
    for &i in &captured {
        param[i] = if distinct_codes == 1 {
            0.5
        } else {
            ranks[i] as f64 / (distinct_codes - 1) as f64
        };
    }
    report.stage_moduli.order = fit(&pairs_of(&captured, |x, y| {
        (
            code_dist(code(x), code(y), &sched).expect("same schedule"),
            (param[x] - param[y]).abs(),
        )
    }));

    let targets: Vec<Vec<f64>> = if m == 1 {
        captured.iter().map(|&i| vec![param[i]]).collect()
    } else {
        let bits = (usize::BITS - (distinct_codes - 1).leading_zeros()) as usize;
        let order = bits.div_ceil(m).clamp(1, MAX_ORDER as usize) as u32;
        let order = order.min((127 / m) as u32).max(1);
        report.curve_order = Some(order);
        captured
            .iter()
            .map(|&i| hilbert_curve(m, order, param[i]))
            .collect::<Result<_>>()?
    };
    if m >= 2 {
        let rows: Vec<usize> = (0..captured.len()).collect();
        report.stage_moduli.curve = fit(&pairs_of(&rows, |a, b| {
            (
                (param[captured[a]] - param[captured[b]]).abs(),
                sup_dist(&targets[a], &targets[b]),
            )
        }));
    }

    let gauge = match &params.gauge {
        Some(g) => g.clone(),
        None => {
            let mut coef: f64 = 2.0;
            for a in 0..captured.len() {
                for b in a + 1..captured.len() {
                    let d = cloud.dist(captured[a], captured[b]);
                    let jump = sup_dist(&targets[a], &targets[b]);
                    if d > 0.0 {
                        coef = coef.max(jump / d.powf(0.9));
                    }
                }
            }
            // enough headroom that the exact anchor comparison cannot round the wrong way
            Gauge::pow_scaled(0.9, coef * (1.0 + 1e-9))?
        }
    };
    let anchors = SampledMap::new(captured.iter().copied().zip(targets).collect())?;
    let ext = mcshane_extend(&anchors, &gauge, &cloud, &all)?;
    report.extension_modulus_ok = Some(ext.modulus_ok);
    report.extension_gauge = Some(gauge);
    report.image = ext
        .values
        .into_iter()
        .map(|v| v.into_iter().map(|x| x.clamp(0.0, 1.0)).collect())
        .collect();

    report.grid_resolution = dense_resolution(&report.image, m, params.max_resolution);
    let final_pairs = pairs_of(&all, |x, y| (cloud.dist(x, y), sup_dist(&report.image[x], &report.image[y])));
    report.beta_hat = fit(&final_pairs).map(|f| f.beta_hat);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_is_degenerate() {
        let c = PointCloud::from_points(vec![vec![0.2, 0.7]]).unwrap();
        let r = pipeline_map_onto_cube(&c, &PipelineParams::default()).unwrap();
        assert!(r.degenerate && r.substitute_construction);
        assert_eq!(r.image, vec![vec![0.0]]);
    }

    #[test]
    fn small_line_maps_into_the_interval() {
        let xs: Vec<f64> = (0..40).map(|i| (i as f64 / 39.0).powi(2)).collect();
        let c = PointCloud::from_line(&xs).unwrap();
        let params = PipelineParams {
            n_max: 4,
            depth: 10,
            grid_depth: 4,
            ..Default::default()
        };
        let r = pipeline_map_onto_cube(&c, &params).unwrap();
        assert!(!r.degenerate);
        assert!(r.captured > 0);
        assert_eq!(r.extension_modulus_ok, Some(true));
        assert!(r.image.iter().all(|p| (0.0..=1.0).contains(&p[0])));
    }

    #[test]
    fn square_target_uses_the_curve() {
        let pts: Vec<Vec<f64>> = (0..30).map(|i| vec![(i as f64 * 0.37).fract(), (i as f64 * 0.61).fract()]).collect();
        let c = PointCloud::from_points(pts).unwrap();
        let params = PipelineParams {
            m: 2,
            n_max: 3,
            depth: 8,
            grid_depth: 3,
            ..Default::default()
        };
        let r = pipeline_map_onto_cube(&c, &params).unwrap();
        assert!(r.curve_order.is_some());
        assert!(r.image.iter().all(|p| p.len() == 2));
    }

    #[test]
    fn dense_resolution_counts_cells() {
        let pts: Vec<Vec<f64>> = (0..16).map(|i| vec![i as f64 / 16.0 + 0.01]).collect();
        assert_eq!(dense_resolution(&pts, 1, 10), 4);
        assert_eq!(dense_resolution(&pts[..3], 1, 10), 0);
    }
}
