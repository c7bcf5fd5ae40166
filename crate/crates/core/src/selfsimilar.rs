//! Self-similar sets: iterated function systems of similarities, their
//! similarity dimension, attractor samples, the open set condition and
//! sample-level dimension estimators.

use std::collections::HashSet;

use num_rational::BigRational;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::gauge::Gauge;
use crate::metric::PointCloud;
use crate::{seeded_rng, Error, Result};

/// Largest attractor sample `attractor_points` will build.
pub const POINT_BUDGET: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orthogonal {
    /// `(Ox)_i = ±x_{|π_i|}`, 1-based signed indices.
    Perm(Vec<i64>),
    /// Orthonormal columns, row-major.
    Matrix(Vec<Vec<f64>>),
}

/// `f(x) = c·O x + t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Similarity {
    pub ratio: f64,
    pub orth: Orthogonal,
    pub translate: Vec<f64>,
}

impl Similarity {
    pub fn new(ratio: f64, orth: Orthogonal, translate: Vec<f64>) -> Result<Self> {
        let d = translate.len();
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::Domain(format!("ratio {ratio} outside (0,1)")));
        }
        if translate.iter().any(|t| !t.is_finite()) {
            return Err(Error::Domain("non-finite translation".into()));
        }
        match &orth {
            Orthogonal::Perm(p) => {
                let mut seen = vec![false; d];
                if p.len() != d {
                    return Err(Error::Shape {
                        expected: d,
                        found: p.len(),
                    });
                }
                for &s in p {
                    let i = s.unsigned_abs() as usize;
                    if i == 0 || i > d || seen[i - 1] {
                        return Err(Error::Domain(format!("{p:?} is not a signed permutation")));
                    }
                    seen[i - 1] = true;
                }
            }
            Orthogonal::Matrix(rows) => {
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return Err(Error::Shape {
                        expected: d,
                        found: rows.len(),
                    });
                }
                for a in 0..d {
                    for b in 0..d {
                        let dot: f64 = (0..d).map(|i| rows[i][a] * rows[i][b]).sum();
                        let want = if a == b { 1.0 } else { 0.0 };
                        if (dot - want).abs() > 1e-12 {
                            return Err(Error::Domain("matrix columns are not orthonormal".into()));
                        }
                    }
                }
            }
        }
        Ok(Similarity {
            ratio,
            orth,
            translate,
        })
    }

    pub fn identity_perm(d: usize) -> Orthogonal {
        Orthogonal::Perm((1..=d as i64).collect())
    }

    pub fn dim(&self) -> usize {
        self.translate.len()
    }

    pub fn orthogonal(&self, x: &[f64]) -> Vec<f64> {
        match &self.orth {
            Orthogonal::Perm(p) => p
                .iter()
                .map(|&s| {
                    let v = x[s.unsigned_abs() as usize - 1];
                    if s < 0 {
                        -v
                    } else {
                        v
                    }
                })
                .collect(),
            Orthogonal::Matrix(rows) => rows
                .iter()
                .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
                .collect(),
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.orthogonal(x)
            .iter()
            .zip(&self.translate)
            .map(|(o, t)| self.ratio * o + t)
            .collect()
    }

    /// Fixed point, from `(I − cO) x = t` by Gaussian elimination.
    pub fn fixed_point(&self) -> Vec<f64> {
        let d = self.dim();
        // columns of O
        let cols: Vec<Vec<f64>> = (0..d)
            .map(|j| {
                let mut e = vec![0.0; d];
                e[j] = 1.0;
                self.orthogonal(&e)
            })
            .collect();
        // rows of I − cO with the right-hand side appended
        let mut m: Vec<Vec<f64>> = (0..d)
            .map(|i| {
                let mut row: Vec<f64> = (0..d)
                    .map(|j| f64::from(u8::from(i == j)) - self.ratio * cols[j][i])
                    .collect();
                row.push(self.translate[i]);
                row
            })
            .collect();
        for col in 0..d {
            let pivot = (col..d)
                .max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))
                .expect("nonempty");
            m.swap(col, pivot);
            for r in 0..d {
                if r != col && m[r][col] != 0.0 {
                    let f = m[r][col] / m[col][col];
                    let pivot_row = m[col].clone();
                    for (v, p) in m[r].iter_mut().zip(&pivot_row).skip(col) {
                        *v -= f * p;
                    }
                }
            }
        }
        (0..d).map(|i| m[i][d] / m[i][i]).collect()
    }

    /// `|f(x) − f(y)| = c |x − y|` to 1e-12 relative on seeded pairs.
    pub fn is_similarity(&self, samples: usize, seed: u64) -> bool {
        let mut rng = seeded_rng(seed);
        let d = self.dim();
        (0..samples).all(|_| {
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let y: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let before = crate::metric::euclid(&x, &y);
            let after = crate::metric::euclid(&self.apply(&x), &self.apply(&y));
            (after - self.ratio * before).abs() <= 1e-12 * self.ratio * before
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ifs {
    pub dim: usize,
    pub maps: Vec<Similarity>,
    pub open_set: Option<AxisBox>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MapFile {
    ratio: f64,
    #[serde(default)]
    perm: Option<Vec<i64>>,
    #[serde(default)]
    matrix: Option<Vec<Vec<f64>>>,
    translate: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IfsFile {
    dim: usize,
    maps: Vec<MapFile>,
    #[serde(default)]
    open_set: Option<AxisBox>,
}

impl Ifs {
    pub fn new(maps: Vec<Similarity>, open_set: Option<AxisBox>) -> Result<Self> {
        if maps.len() < 2 {
            return Err(Error::Domain("an IFS needs at least two maps".into()));
        }
        let dim = maps[0].dim();
        if dim == 0 {
            return Err(Error::Domain("maps act on R^0".into()));
        }
        if let Some(m) = maps.iter().find(|m| m.dim() != dim) {
            return Err(Error::Shape {
                expected: dim,
                found: m.dim(),
            });
        }
        if let Some(b) = &open_set {
            if b.lo.len() != dim || b.hi.len() != dim {
                return Err(Error::Shape {
                    expected: dim,
                    found: b.lo.len().min(b.hi.len()),
                });
            }
            if b.lo.iter().zip(&b.hi).any(|(l, h)| l.partial_cmp(h) != Some(std::cmp::Ordering::Less)) {
                return Err(Error::Domain("open set box is empty".into()));
            }
        }
        Ok(Ifs {
            dim,
            maps,
            open_set,
        })
    }

    /// Parse the JSON file format. Matrix maps need `allow_matrix`.
    pub fn from_json(text: &str, allow_matrix: bool) -> Result<Self> {
        let file: IfsFile = serde_json::from_str(text)?;
        let maps = file
            .maps
            .into_iter()
            .map(|m| {
                let orth = match (m.perm, m.matrix) {
                    (Some(_), Some(_)) => {
                        return Err(Error::Parse("a map has both `perm` and `matrix`".into()))
                    }
                    (None, Some(rows)) if allow_matrix => Orthogonal::Matrix(rows),
                    (None, Some(_)) => {
                        return Err(Error::Rejected(
                            "general orthogonal parts need the matrix flag".into(),
                        ))
                    }
                    (Some(p), None) => Orthogonal::Perm(p),
                    (None, None) => Similarity::identity_perm(m.translate.len()),
                };
                if m.translate.len() != file.dim {
                    return Err(Error::Shape {
                        expected: file.dim,
                        found: m.translate.len(),
                    });
                }
                Similarity::new(m.ratio, orth, m.translate)
            })
            .collect::<Result<Vec<_>>>()?;
        Ifs::new(maps, file.open_set)
    }

    fn unit_box(d: usize) -> AxisBox {
        AxisBox {
            lo: vec![0.0; d],
            hi: vec![1.0; d],
        }
    }

    /// `x/3` and `x/3 + 2/3`.
    pub fn cantor_ternary() -> Ifs {
        let map = |t: f64| Similarity::new(1.0 / 3.0, Similarity::identity_perm(1), vec![t]).expect("valid");
        Ifs::new(vec![map(0.0), map(2.0 / 3.0)], Some(Ifs::unit_box(1))).expect("valid")
    }

    /// Right-angle Sierpinski gasket: ratio 1/2 at `(0,0)`, `(1/2,0)`, `(0,1/2)`.
    pub fn sierpinski() -> Ifs {
        let map = |x: f64, y: f64| {
            Similarity::new(0.5, Similarity::identity_perm(2), vec![x, y]).expect("valid")
        };
        Ifs::new(
            vec![map(0.0, 0.0), map(0.5, 0.0), map(0.0, 0.5)],
            Some(Ifs::unit_box(2)),
        )
        .expect("valid")
    }

    /// The `2^d` corner maps of ratio 1/2 whose attractor is `[0,1]^d`.
    pub fn cube(d: usize) -> Result<Ifs> {
        if d == 0 || d > 16 {
            return Err(Error::Domain(format!("cube dimension {d} outside 1..=16")));
        }
        let maps = (0..1usize << d)
            .map(|c| {
                let t = (0..d).map(|i| if c >> i & 1 == 1 { 0.5 } else { 0.0 }).collect();
                Similarity::new(0.5, Similarity::identity_perm(d), t)
            })
            .collect::<Result<Vec<_>>>()?;
        Ifs::new(maps, Some(Ifs::unit_box(d)))
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.maps.iter().map(|m| m.ratio).collect()
    }

    pub fn is_axis_permutation(&self) -> bool {
        self.maps.iter().all(|m| matches!(m.orth, Orthogonal::Perm(_)))
    }
}

/// The root `s` of `Σ c_i^s = 1`, by bisection to full double precision.
pub fn moran_dimension(ifs: &Ifs) -> f64 {
    moran_root(&ifs.ratios(), ifs.dim)
}

pub fn moran_root(ratios: &[f64], dim: usize) -> f64 {
    let f = |s: f64| ratios.iter().map(|c| c.powf(s)).sum::<f64>() - 1.0;
    let mut lo = 0.0;
    let mut hi = 2.0 * dim as f64;
    while f(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v == 0.0 {
            return mid;
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (flo, fhi) = (f(lo).abs(), f(hi).abs());
    if flo <= fhi {
        lo
    } else {
        hi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttractorSample {
    pub depth: usize,
    pub maps: usize,
    pub base: Vec<f64>,
    pub points: Vec<Vec<f64>>,
}

impl AttractorSample {
    /// Word of the `i`-th point, outermost map first.
    pub fn word(&self, i: usize) -> Vec<usize> {
        let mut w = vec![0; self.depth];
        let mut rest = i;
        for slot in w.iter_mut().rev() {
            *slot = rest % self.maps;
            rest /= self.maps;
        }
        w
    }

    pub fn cloud(&self) -> Result<PointCloud> {
        PointCloud::from_points(self.points.clone())
    }
}

/// `f_{w_1} ∘ … ∘ f_{w_depth}` applied to the fixed point of map 0 for
/// every word, in lexicographic word order.
pub fn attractor_points(ifs: &Ifs, depth: usize) -> Result<AttractorSample> {
    let n = ifs.maps.len();
    let total = (0..depth).try_fold(1usize, |acc, _| acc.checked_mul(n).filter(|&v| v <= POINT_BUDGET));
    if total.is_none() {
        return Err(Error::Rejected(format!(
            "{n}^{depth} points exceed the budget of {POINT_BUDGET}"
        )));
    }
    let base = ifs.maps[0].fixed_point();
    let mut points = vec![base.clone()];
    for _ in 0..depth {
        points = ifs
            .maps
            .iter()
            .flat_map(|f| points.iter().map(|p| f.apply(p)).collect::<Vec<_>>())
            .collect();
    }
    Ok(AttractorSample {
        depth,
        maps: n,
        base,
        points,
    })
}

/// Seeded chaos-game sample: start at the fixed point of map 0, apply
/// uniformly random maps, keep `count` points after `burn_in` steps.
pub fn chaos_game(ifs: &Ifs, count: usize, burn_in: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = seeded_rng(seed);
    let mut x = ifs.maps[0].fixed_point();
    let mut out = Vec::with_capacity(count);
    for step in 0..burn_in + count {
        x = ifs.maps[rng.gen_range(0..ifs.maps.len())].apply(&x);
        if step >= burn_in {
            out.push(x.clone());
        }
    }
    out
}

/// `Some(true/false)` when decided, `None` when the conservative mode
/// cannot tell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscReport {
    pub exact: bool,
    pub contained: Option<bool>,
    pub disjoint: Option<bool>,
    pub overlapping_pair: Option<(usize, usize)>,
}

fn image_box_exact(f: &Similarity, b: &AxisBox) -> (Vec<BigRational>, Vec<BigRational>) {
    let Orthogonal::Perm(p) = &f.orth else {
        unreachable!("exact mode is for permutations")
    };
    let q = |v: f64| BigRational::from_float(v).expect("finite");
    let c = q(f.ratio);
    let mut lo = Vec::with_capacity(p.len());
    let mut hi = Vec::with_capacity(p.len());
    for (i, &s) in p.iter().enumerate() {
        let j = s.unsigned_abs() as usize - 1;
        let (a, z) = if s > 0 {
            (q(b.lo[j]), q(b.hi[j]))
        } else {
            (-q(b.hi[j]), -q(b.lo[j]))
        };
        let t = q(f.translate[i]);
        lo.push(&c * a + &t);
        hi.push(&c * z + t);
    }
    (lo, hi)
}

fn image_box_float(f: &Similarity, b: &AxisBox) -> (Vec<f64>, Vec<f64>) {
    let d = f.dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for corner in 0..1usize << d {
        let x: Vec<f64> = (0..d)
            .map(|i| if corner >> i & 1 == 1 { b.hi[i] } else { b.lo[i] })
            .collect();
        for (i, v) in f.apply(&x).into_iter().enumerate() {
            lo[i] = lo[i].min(v);
            hi[i] = hi[i].max(v);
        }
    }
    (lo, hi)
}

/// Open set condition for an axis-aligned open box: `f_i(U) ⊆ U` for all
/// `i` and pairwise disjoint images. Exact rational arithmetic for signed
/// permutations; bounding boxes with a 1e-12 margin otherwise.
pub fn osc_check(ifs: &Ifs, b: &AxisBox) -> Result<OscReport> {
    if b.lo.len() != ifs.dim || b.hi.len() != ifs.dim {
        return Err(Error::Shape {
            expected: ifs.dim,
            found: b.lo.len(),
        });
    }
    let n = ifs.maps.len();
    if ifs.is_axis_permutation() {
        let q = |v: f64| BigRational::from_float(v).expect("finite");
        let boxes: Vec<_> = ifs.maps.iter().map(|f| image_box_exact(f, b)).collect();
        let contained = boxes.iter().all(|(lo, hi)| {
            (0..ifs.dim).all(|i| lo[i] >= q(b.lo[i]) && hi[i] <= q(b.hi[i]))
        });
        let mut overlapping_pair = None;
        'outer: for a in 0..n {
            for c in a + 1..n {
                let separated = (0..ifs.dim)
                    .any(|i| boxes[a].1[i] <= boxes[c].0[i] || boxes[c].1[i] <= boxes[a].0[i]);
                if !separated {
                    overlapping_pair = Some((a, c));
                    break 'outer;
                }
            }
        }
        return Ok(OscReport {
            exact: true,
            contained: Some(contained),
            disjoint: Some(overlapping_pair.is_none()),
            overlapping_pair,
        });
    }
    const MARGIN: f64 = 1e-12;
    let boxes: Vec<_> = ifs.maps.iter().map(|f| image_box_float(f, b)).collect();
    let inside = boxes.iter().all(|(lo, hi)| {
        (0..ifs.dim).all(|i| lo[i] >= b.lo[i] + MARGIN && hi[i] <= b.hi[i] - MARGIN)
    });
    // corner images are on the true image, so a corner clearly outside decides
    let outside = ifs.maps.iter().any(|f| {
        (0..1usize << ifs.dim).any(|corner| {
            let x: Vec<f64> = (0..ifs.dim)
                .map(|i| if corner >> i & 1 == 1 { b.hi[i] } else { b.lo[i] })
                .collect();
            f.apply(&x)
                .iter()
                .enumerate()
                .any(|(i, &v)| v < b.lo[i] - MARGIN || v > b.hi[i] + MARGIN)
        })
    });
    let separated = (0..n).all(|a| {
        (a + 1..n).all(|c| {
            (0..ifs.dim).any(|i| {
                boxes[a].1[i] + MARGIN <= boxes[c].0[i] || boxes[c].1[i] + MARGIN <= boxes[a].0[i]
            })
        })
    });
    Ok(OscReport {
        exact: false,
        contained: if inside {
            Some(true)
        } else if outside {
            Some(false)
        } else {
            None
        },
        disjoint: separated.then_some(true),
        overlapping_pair: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxDimension {
    pub radii: Vec<f64>,
    pub counts: Vec<usize>,
    pub slope: f64,
    pub intercept: f64,
}

impl BoxDimension {
    /// `r,count` rows.
    pub fn csv(&self) -> String {
        let mut out = String::from("r,count\n");
        for (r, c) in self.radii.iter().zip(&self.counts) {
            out.push_str(&format!("{r},{c}\n"));
        }
        out
    }
}

/// Radii `2^-lo ..= 2^-hi`.
pub fn dyadic_radii(lo: u32, hi: u32) -> Vec<f64> {
    (lo..=hi).map(|k| 0.5f64.powi(k as i32)).collect()
}

/// Occupied axis-aligned cells of side `r` for each radius, and the
/// least-squares slope of `log N(r)` against `log(1/r)`.
pub fn box_dimension(points: &[Vec<f64>], radii: &[f64]) -> Result<BoxDimension> {
    if radii.len() < 2 {
        return Err(Error::Domain("box counting needs at least two radii".into()));
    }
    if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::Domain("radii must be positive".into()));
    }
    if points.is_empty() {
        return Err(Error::Domain("box counting needs points".into()));
    }
    let distinct: HashSet<u64> = radii.iter().map(|r| r.to_bits()).collect();
    if distinct.len() != radii.len() {
        return Err(Error::Domain("radii must be distinct".into()));
    }
    let count = |r: f64| -> usize {
        points
            .iter()
            .map(|p| p.iter().map(|&x| (x / r).floor() as i64).collect::<Vec<_>>())
            .collect::<HashSet<_>>()
            .len()
    };
    #[cfg(feature = "parallel")]
    let counts: Vec<usize> = {
        use rayon::prelude::*;
        radii.par_iter().map(|&r| count(r)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let counts: Vec<usize> = radii.iter().map(|&r| count(r)).collect();
    let xs: Vec<f64> = radii.iter().map(|r| -r.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok(BoxDimension {
        radii: radii.to_vec(),
        counts,
        slope,
        intercept: my - slope * mx,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PremeasureBound {
    pub delta: f64,
    pub sets: usize,
    /// `Σ g(diam E_i)` over a greedy δ-cover; an upper bound on `H^g_δ` of
    /// the sample, not the measure itself.
    pub upper_bound: f64,
}

/// Greedy cover: the lowest-index uncovered point gathers every uncovered
/// point within `δ/2`, and the set contributes `g` of its actual diameter.
pub fn hausdorff_premeasure_upper(cloud: &PointCloud, g: &Gauge, delta: f64) -> Result<PremeasureBound> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::Domain(format!("δ = {delta} must be positive")));
    }
    let n = cloud.len();
    let mut covered = vec![false; n];
    let mut sets = 0;
    let mut total = 0.0;
    for x in 0..n {
        if covered[x] {
            continue;
        }
        let members: Vec<usize> = (x..n)
            .filter(|&y| !covered[y] && cloud.dist(x, y) <= delta / 2.0)
            .collect();
        for &y in &members {
            covered[y] = true;
        }
        let diam = members
            .iter()
            .enumerate()
            .flat_map(|(a, &i)| members[a + 1..].iter().map(move |&j| (i, j)))
            .map(|(i, j)| cloud.dist(i, j))
            .fold(0.0, f64::max);
        sets += 1;
        total += g.evaluate(diam)?;
    }
    Ok(PremeasureBound {
        delta,
        sets,
        upper_bound: total,
    })
}
