//! Colored multi-scale embedding of a finite metric space into `(T, d_G)`.
//!
//! Stage `n` works at `ε_n = 2^-n`: a maximal `ε_n`-separated net is colored
//! so that members within `8ε_n` differ, and each color `j` yields the
//! coordinate `φ_j(x) = min(dist(x, color class j), 3ε_n/2)`. Rescaled by
//! `2^n/3` the coordinates land in `[0, 1/2]`, and block `n` of the torus
//! metric sees exactly `|Δφ_j|/3`.

use serde::Serialize;

use crate::covering::{local_ball_bound, maximal_separated, SeparatedSet};
use crate::metric::{torus_dist, PointCloud, TorusPoint};
use crate::schedule::{pow2_neg, SlowSchedule};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleStage {
    pub n: usize,
    pub eps: f64,
    pub net: SeparatedSet,
    /// `G(n)`, the palette size.
    pub palette: usize,
    /// Color of each net member, parallel to `net.members`.
    pub colors: Vec<usize>,
}

impl ScaleStage {
    pub fn colors_used(&self) -> usize {
        self.colors.iter().max().map_or(0, |m| m + 1)
    }

    /// No two members within `8ε` share a color, and the palette suffices.
    pub fn coloring_is_valid(&self, cloud: &PointCloud) -> bool {
        let m = &self.net.members;
        let proper = (0..m.len()).all(|a| {
            (a + 1..m.len()).all(|b| {
                cloud.dist(m[a], m[b]) > 8.0 * self.eps || self.colors[a] != self.colors[b]
            })
        });
        proper && self.colors_used() <= self.palette
    }
}

/// Net, `G(n)` and greedy coloring for scale `2^-n`.
///
/// Members are colored in index order with the least color not used by an
/// already-colored member within `8ε_n`. Those neighbours all sit in the
/// member's own `8ε_n`-ball, so at most `G(n) − 1` colors are ever blocked.
pub fn color_stage(cloud: &PointCloud, n: usize) -> ScaleStage {
    let eps = pow2_neg(n);
    let net = maximal_separated(cloud, eps);
    let palette = local_ball_bound(cloud, &net, 8.0 * eps);
    let m = &net.members;
    let mut colors: Vec<usize> = Vec::with_capacity(m.len());
    for a in 0..m.len() {
        let mut blocked = vec![false; palette.max(1)];
        for b in 0..a {
            if cloud.dist(m[a], m[b]) <= 8.0 * eps && colors[b] < blocked.len() {
                blocked[colors[b]] = true;
            }
        }
        let c = blocked.iter().position(|&x| !x).unwrap_or(blocked.len());
        colors.push(c);
    }
    ScaleStage {
        n,
        eps,
        net,
        palette,
        colors,
    }
}

/// `φ_j(x)`, in `[0, 3ε/2]`.
pub fn phi_coordinate(cloud: &PointCloud, x: usize, stage: &ScaleStage, j: usize) -> f64 {
    let cap = 1.5 * stage.eps;
    stage
        .net
        .members
        .iter()
        .zip(&stage.colors)
        .filter(|(_, &c)| c == j)
        .map(|(&s, _)| cloud.dist(x, s))
        .fold(cap, f64::min)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Embedding {
    pub schedule: SlowSchedule,
    pub images: Vec<TorusPoint>,
    #[serde(skip)]
    pub stages: Vec<ScaleStage>,
}

impl Embedding {
    pub fn stage(&self, n: usize) -> Option<&ScaleStage> {
        self.stages.iter().find(|s| s.n == n)
    }

    /// `d_G` between the images of cloud points `x` and `y`.
    pub fn image_dist(&self, x: usize, y: usize) -> f64 {
        torus_dist(&self.images[x], &self.images[y], &self.schedule)
            .expect("images are sized to the schedule")
    }
}

/// Embed a cloud of diameter ≤ 1 using stages `n_min..=n_max`.
pub fn embed_cloud(cloud: &PointCloud, n_min: usize, n_max: usize) -> Result<Embedding> {
    if n_min > n_max {
        return Err(Error::Domain(format!("n_min {n_min} > n_max {n_max}")));
    }
    if cloud.is_empty() {
        return Err(Error::Domain("empty cloud".into()));
    }
    let diameter = cloud.diameter();
    if diameter > 1.0 {
        return Err(Error::Normalization { diameter });
    }
    let ns: Vec<usize> = (n_min..=n_max).collect();
    #[cfg(feature = "parallel")]
    let stages: Vec<ScaleStage> = {
        use rayon::prelude::*;
        ns.par_iter().map(|&n| color_stage(cloud, n)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let stages: Vec<ScaleStage> = ns.iter().map(|&n| color_stage(cloud, n)).collect();

    let mut g = vec![0; n_max + 1];
    for s in &stages {
        g[s.n] = s.palette;
    }
    let schedule = SlowSchedule::from_values(g)?;
    let images = (0..cloud.len())
        .map(|x| {
            let mut coords = Vec::with_capacity(schedule.coords());
            for s in &stages {
                let scale = (1u64 << s.n) as f64 / 3.0;
                coords.extend((0..s.palette).map(|j| scale * phi_coordinate(cloud, x, s, j)));
            }
            TorusPoint::new(coords)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Embedding {
        schedule,
        images,
        stages,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRecord {
    pub x: usize,
    pub y: usize,
    pub d: f64,
    pub d_g: f64,
    pub ratio: f64,
    /// Stage whose band `(5ε/2, 5ε]` holds `d`, if any.
    pub band: Option<usize>,
    /// Color `j` of the net point within `ε` of `x` in the band stage.
    pub witness_color: Option<usize>,
    pub witness_net_point: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistortionReport {
    pub pairs: usize,
    pub lipschitz_ok: bool,
    pub lipschitz_violations: usize,
    pub band_ok: bool,
    pub band_violations: usize,
    pub banded_pairs: usize,
    pub unbanded_pairs: usize,
    /// Coordinate-level checks: `|Δφ_j| ≤ d` for every `j`, and `|Δφ_j| ≥ d/10`
    /// at the witness color of every banded pair.
    pub phi_upper_ok: bool,
    pub phi_lower_ok: bool,
    pub min_band_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
    /// Violations first, then the banded pairs with the smallest ratio.
    pub worst_pairs: Vec<PairRecord>,
    pub note: &'static str,
}

/// Band stage `n` with `5ε_n/2 < d ≤ 5ε_n`, if it lies in the embedding.
fn band_of(d: f64, emb: &Embedding) -> Option<usize> {
    emb.stages
        .iter()
        .find(|s| 2.5 * s.eps < d && d <= 5.0 * s.eps)
        .map(|s| s.n)
}

/// Re-check both distortion bounds on every pair of the cloud.
pub fn distortion_report(cloud: &PointCloud, emb: &Embedding) -> Result<DistortionReport> {
    if emb.images.len() != cloud.len() {
        return Err(Error::Shape {
            expected: cloud.len(),
            found: emb.images.len(),
        });
    }
    // φ values per point, per stage, per color.
    let phis: Vec<Vec<Vec<f64>>> = (0..cloud.len())
        .map(|x| {
            emb.stages
                .iter()
                .map(|s| (0..s.palette).map(|j| phi_coordinate(cloud, x, s, j)).collect())
                .collect()
        })
        .collect();

    struct PairOutcome {
        rec: PairRecord,
        lip_ok: bool,
        band_ok: Option<bool>,
        phi_upper_ok: bool,
        phi_lower_ok: bool,
    }

    let eval = |x: usize, y: usize| -> Option<PairOutcome> {
        let d = cloud.dist(x, y);
        if d == 0.0 {
            return None;
        }
        let d_g = emb.image_dist(x, y);
        let lip_ok = 3.0 * d_g <= d;
        let phi_upper_ok = phis[x]
            .iter()
            .zip(&phis[y])
            .all(|(a, b)| a.iter().zip(b).all(|(u, v)| (u - v).abs() <= d));
        let band = band_of(d, emb);
        let mut rec = PairRecord {
            x,
            y,
            d,
            d_g,
            ratio: d_g / d,
            band,
            witness_color: None,
            witness_net_point: None,
        };
        let mut phi_lower_ok = true;
        let band_ok = band.map(|n| {
            let si = emb.stages.iter().position(|s| s.n == n).expect("band stage");
            let stage = &emb.stages[si];
            let found = stage
                .net
                .members
                .iter()
                .zip(&stage.colors)
                .find(|(&s, _)| cloud.dist(x, s) <= stage.eps);
            if let Some((&s, &j)) = found {
                rec.witness_net_point = Some(s);
                rec.witness_color = Some(j);
                phi_lower_ok = 10.0 * (phis[x][si][j] - phis[y][si][j]).abs() >= d;
            } else {
                phi_lower_ok = false;
            }
            30.0 * d_g >= d
        });
        Some(PairOutcome {
            rec,
            lip_ok,
            band_ok,
            phi_upper_ok,
            phi_lower_ok,
        })
    };

    let pairs: Vec<(usize, usize)> = (0..cloud.len())
        .flat_map(|x| (x + 1..cloud.len()).map(move |y| (x, y)))
        .collect();
    #[cfg(feature = "parallel")]
    let outcomes: Vec<PairOutcome> = {
        use rayon::prelude::*;
        pairs.par_iter().filter_map(|&(x, y)| eval(x, y)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<PairOutcome> = pairs.iter().filter_map(|&(x, y)| eval(x, y)).collect();

    let lipschitz_violations = outcomes.iter().filter(|o| !o.lip_ok).count();
    let band_violations = outcomes.iter().filter(|o| o.band_ok == Some(false)).count();
    let banded_pairs = outcomes.iter().filter(|o| o.band_ok.is_some()).count();
    let min_band_ratio = outcomes
        .iter()
        .filter(|o| o.band_ok.is_some())
        .map(|o| o.rec.ratio)
        .reduce(f64::min);
    let max_ratio = outcomes.iter().map(|o| o.rec.ratio).reduce(f64::max);

    let mut worst: Vec<&PairOutcome> = outcomes
        .iter()
        .filter(|o| !o.lip_ok || o.band_ok == Some(false))
        .collect();
    let mut banded: Vec<&PairOutcome> = outcomes
        .iter()
        .filter(|o| o.band_ok == Some(true))
        .collect();
    banded.sort_by(|a, b| {
        a.rec
            .ratio
            .total_cmp(&b.rec.ratio)
            .then((a.rec.x, a.rec.y).cmp(&(b.rec.x, b.rec.y)))
    });
    worst.extend(banded.into_iter().take(10));
    worst.truncate(20);

    Ok(DistortionReport {
        pairs: outcomes.len(),
        lipschitz_ok: lipschitz_violations == 0,
        lipschitz_violations,
        band_ok: band_violations == 0,
        band_violations,
        banded_pairs,
        unbanded_pairs: outcomes.len() - banded_pairs,
        phi_upper_ok: outcomes.iter().all(|o| o.phi_upper_ok),
        phi_lower_ok: outcomes.iter().all(|o| o.phi_lower_ok),
        min_band_ratio,
        max_ratio,
        worst_pairs: worst.into_iter().map(|o| o.rec.clone()).collect(),
        note: "G(n) is exact for the cloud; if the cloud samples a continuum, the continuum's G may be larger",
    })
}
