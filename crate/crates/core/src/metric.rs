//! Finite metric spaces and the circle, torus and code metrics.

use std::io::Read;

use rand::Rng;
use serde::Serialize;

use crate::schedule::{pow2_neg, SlowSchedule};
use crate::{seeded_rng, Error, Result};

/// A finite metric space: Euclidean points or an explicit distance matrix.
///
/// In matrix mode the point coordinates are the one-element index labels
/// `[i]`; only the matrix defines distances.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Vec<f64>>,
    dim: usize,
    matrix: Option<Vec<f64>>,
}

impl PointCloud {
    pub fn from_points(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map_or(1, Vec::len);
        if dim == 0 {
            return Err(Error::Domain("points must have dimension ≥ 1".into()));
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::Shape {
                    expected: dim,
                    found: p.len(),
                });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::Domain("non-finite coordinate".into()));
            }
        }
        Ok(PointCloud {
            points,
            dim,
            matrix: None,
        })
    }

    /// Points on the real line.
    pub fn from_line(xs: &[f64]) -> Result<Self> {
        Self::from_points(xs.iter().map(|&x| vec![x]).collect())
    }

    /// `rows` must be square, symmetric, nonnegative with zero diagonal.
    pub fn from_matrix(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut flat = Vec::with_capacity(n * n);
        for row in &rows {
            if row.len() != n {
                return Err(Error::Shape {
                    expected: n,
                    found: row.len(),
                });
            }
            flat.extend_from_slice(row);
        }
        for i in 0..n {
            if flat[i * n + i] != 0.0 {
                return Err(Error::Domain(format!("nonzero diagonal entry at {i}")));
            }
            for j in 0..n {
                let v = flat[i * n + j];
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::Domain(format!("entry ({i},{j}) = {v} is not a distance")));
                }
                if v != flat[j * n + i] {
                    return Err(Error::Domain(format!("matrix not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(PointCloud {
            points: (0..n).map(|i| vec![i as f64]).collect(),
            dim: 1,
            matrix: Some(flat),
        })
    }

    /// One point per row, comma-separated reals, no header.
    pub fn read_points_csv<R: Read>(reader: R) -> Result<Self> {
        Self::from_points(read_rows(reader)?)
    }

    /// Square CSV of reals.
    pub fn read_matrix_csv<R: Read>(reader: R) -> Result<Self> {
        Self::from_matrix(read_rows(reader)?)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_matrix(&self) -> bool {
        self.matrix.is_some()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        match &self.matrix {
            Some(m) => m[i * self.len() + j],
            None => euclid(&self.points[i], &self.points[j]),
        }
    }

    pub fn diameter(&self) -> f64 {
        let n = self.len();
        let mut d: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                d = d.max(self.dist(i, j));
            }
        }
        d
    }

    /// Rescaled copy with diameter 1 up to rounding and never above it
    /// (unchanged if the diameter is 0), with the factor that was divided out.
    pub fn normalized(&self) -> (PointCloud, f64) {
        let diam = self.diameter();
        if diam == 0.0 {
            return (self.clone(), 1.0);
        }
        let mut divisor = diam;
        loop {
            let cloud = self.scaled_down(divisor);
            if cloud.diameter() <= 1.0 {
                return (cloud, divisor);
            }
            divisor = divisor.next_up();
        }
    }

    fn scaled_down(&self, divisor: f64) -> PointCloud {
        match &self.matrix {
            Some(m) => {
                let mut flat: Vec<f64> = m.iter().map(|v| v / divisor).collect();
                for i in 0..self.len() {
                    flat[i * self.len() + i] = 0.0;
                }
                PointCloud {
                    points: self.points.clone(),
                    dim: 1,
                    matrix: Some(flat),
                }
            }
            None => PointCloud {
                points: self
                    .points
                    .iter()
                    .map(|p| p.iter().map(|v| v / divisor).collect())
                    .collect(),
                dim: self.dim,
                matrix: None,
            },
        }
    }

    /// Full distance matrix, row-major.
    pub fn distance_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        (0..n)
            .map(|i| (0..n).map(|j| self.dist(i, j)).collect())
            .collect()
    }
}

fn read_rows<R: Read>(reader: R) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        let row = record
            .iter()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("row {}: `{t}` is not a real", line + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Arc-length distance on the circle `[0,1)`.
pub fn circle_dist(x: f64, y: f64) -> Result<f64> {
    for v in [x, y] {
        if !(0.0..1.0).contains(&v) {
            return Err(Error::Domain(format!("{v} is not in [0,1)")));
        }
    }
    Ok(circle_dist_unchecked(x, y))
}

#[inline]
pub(crate) fn circle_dist_unchecked(x: f64, y: f64) -> f64 {
    let z = (x - y).abs();
    z.min(1.0 - z)
}

/// Reduce into `[0,1)`.
pub fn wrap_unit(v: f64) -> f64 {
    let r = v.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// A point of the truncated torus `[0,1)^K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct TorusPoint {
    coords: Vec<f64>,
}

impl TorusPoint {
    /// Coordinates are reduced mod 1 on construction.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite torus coordinate".into()));
        }
        Ok(TorusPoint {
            coords: coords.into_iter().map(wrap_unit).collect(),
        })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Coordinatewise addition mod 1.
    pub fn shifted(&self, by: &TorusPoint) -> Result<TorusPoint> {
        if by.len() != self.len() {
            return Err(Error::Shape {
                expected: self.len(),
                found: by.len(),
            });
        }
        TorusPoint::new(self.coords.iter().zip(&by.coords).map(|(a, b)| a + b).collect())
    }
}

/// `d_G(a, b) = max_k r_k ‖a_k − b_k‖`.
pub fn torus_dist(a: &TorusPoint, b: &TorusPoint, sched: &SlowSchedule) -> Result<f64> {
    let k = sched.coords();
    for p in [a, b] {
        if p.len() != k {
            return Err(Error::Shape {
                expected: k,
                found: p.len(),
            });
        }
    }
    Ok(a.coords
        .iter()
        .zip(&b.coords)
        .enumerate()
        .map(|(k, (x, y))| sched.weight(k) * circle_dist_unchecked(*x, *y))
        .fold(0.0, f64::max))
}

/// Finite binary codes, one per coordinate, all of the same depth (≤ 64).
///
/// Digit `i` of a code sits at bit `63 − i`, so the common prefix length of
/// two codes is the leading-zero count of their xor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CodePoint {
    codes: Vec<u64>,
    depth: usize,
}

impl CodePoint {
    pub const MAX_DEPTH: usize = 64;

    pub fn new(codes: Vec<u64>, depth: usize) -> Result<Self> {
        if depth > Self::MAX_DEPTH {
            return Err(Error::DepthExceeded {
                depth,
                max: Self::MAX_DEPTH,
            });
        }
        let mask = if depth == 0 { 0 } else { u64::MAX << (64 - depth) };
        if codes.iter().any(|c| c & !mask != 0) {
            return Err(Error::Domain(format!("code has digits beyond depth {depth}")));
        }
        Ok(CodePoint { codes, depth })
    }

    /// Parse strings like `"0110"`; all must share one length.
    pub fn from_strs(codes: &[&str]) -> Result<Self> {
        let depth = codes.first().map_or(0, |c| c.len());
        let mut packed = Vec::with_capacity(codes.len());
        for c in codes {
            if c.len() != depth {
                return Err(Error::Shape {
                    expected: depth,
                    found: c.len(),
                });
            }
            let mut word = 0u64;
            for (i, ch) in c.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => word |= 1 << (63 - i),
                    _ => return Err(Error::Parse(format!("`{c}` is not a binary string"))),
                }
            }
            packed.push(word);
        }
        Self::new(packed, depth)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn words(&self) -> &[u64] {
        &self.codes
    }

    pub fn digit(&self, k: usize, i: usize) -> bool {
        (self.codes[k] >> (63 - i)) & 1 == 1
    }

    /// Length of the common prefix of coordinate `k`, `None` if equal.
    pub fn common_prefix(&self, other: &CodePoint, k: usize) -> Option<usize> {
        let x = self.codes[k] ^ other.codes[k];
        if x == 0 {
            None
        } else {
            Some(x.leading_zeros() as usize)
        }
    }

    pub fn code_string(&self, k: usize) -> String {
        (0..self.depth)
            .map(|i| if self.digit(k, i) { '1' } else { '0' })
            .collect()
    }
}

/// `ρ_G(a, b) = max_k r_k 2^-|a_k ∧ b_k|`.
pub fn code_dist(a: &CodePoint, b: &CodePoint, sched: &SlowSchedule) -> Result<f64> {
    check_code_shapes(a, b, sched)?;
    Ok((0..a.len())
        .filter_map(|k| {
            a.common_prefix(b, k)
                .map(|p| pow2_neg(sched.block_of(k) + p))
        })
        .fold(0.0, f64::max))
}

pub(crate) fn check_code_shapes(a: &CodePoint, b: &CodePoint, sched: &SlowSchedule) -> Result<()> {
    if a.depth != b.depth {
        return Err(Error::Shape {
            expected: a.depth,
            found: b.depth,
        });
    }
    for p in [a, b] {
        if p.len() != sched.coords() {
            return Err(Error::Shape {
                expected: sched.coords(),
                found: p.len(),
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricMode {
    Triangle,
    Ultra,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub ok: bool,
    /// `(x, y, z)` maximizing `d(x,z) − bound(d(x,y), d(y,z))`.
    pub worst_triple: Option<(usize, usize, usize)>,
    /// Largest violation margin seen; positive means a failure.
    pub slack: f64,
    pub sampled: bool,
    pub triples_checked: usize,
}

/// Clouds up to this size are checked on every triple.
pub const EXHAUSTIVE_LIMIT: usize = 300;
pub const SAMPLED_TRIPLES: usize = 100_000;

pub fn validate_metric(cloud: &PointCloud, mode: MetricMode) -> MetricReport {
    let n = cloud.len();
    let mut worst: Option<((usize, usize, usize), f64)> = None;
    let mut consider = |x: usize, y: usize, z: usize| {
        let (dxy, dyz, dxz) = (cloud.dist(x, y), cloud.dist(y, z), cloud.dist(x, z));
        let bound = match mode {
            MetricMode::Triangle => dxy + dyz,
            MetricMode::Ultra => dxy.max(dyz),
        };
        let margin = dxz - bound;
        if worst.is_none_or(|(_, w)| margin > w) {
            worst = Some(((x, y, z), margin));
        }
    };
    let sampled = n > EXHAUSTIVE_LIMIT;
    let mut checked = 0;
    if sampled {
        let mut rng = seeded_rng(0);
        for _ in 0..SAMPLED_TRIPLES {
            let (x, y, z) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            consider(x, y, z);
            checked += 1;
        }
    } else {
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    // each side of the triangle in turn plays the long side
                    consider(a, b, c);
                    consider(a, c, b);
                    consider(b, a, c);
                    checked += 1;
                }
            }
        }
    }
    match worst {
        Some((triple, slack)) => MetricReport {
            ok: slack <= 0.0,
            worst_triple: (slack > 0.0).then_some(triple),
            slack,
            sampled,
            triples_checked: checked,
        },
        None => MetricReport {
            ok: true,
            worst_triple: None,
            slack: 0.0,
            sampled,
            triples_checked: 0,
        },
    }
}

/// A ball tree of an ultrametric: leaf distance = diameter of the lowest
/// common ancestor.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum UltrametricTree {
    Leaf(usize),
    Node {
        diameter: f64,
        children: Vec<UltrametricTree>,
    },
}

impl UltrametricTree {
    pub fn min_index(&self) -> usize {
        match self {
            UltrametricTree::Leaf(i) => *i,
            UltrametricTree::Node { children, .. } => children[0].min_index(),
        }
    }

    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            UltrametricTree::Leaf(i) => out.push(*i),
            UltrametricTree::Node { children, .. } => {
                children.iter().for_each(|c| c.collect_leaves(out))
            }
        }
    }

    /// Diameter of the least common ancestor of leaves `i` and `j`.
    pub fn distance(&self, i: usize, j: usize) -> Option<f64> {
        if i == j {
            return Some(0.0);
        }
        match self {
            UltrametricTree::Leaf(_) => None,
            UltrametricTree::Node { diameter, children } => {
                let holder = |x| children.iter().position(|c| c.contains(x));
                match (holder(i), holder(j)) {
                    (Some(a), Some(b)) if a == b => children[a].distance(i, j),
                    (Some(_), Some(_)) => Some(*diameter),
                    _ => None,
                }
            }
        }
    }

    fn contains(&self, x: usize) -> bool {
        match self {
            UltrametricTree::Leaf(i) => *i == x,
            UltrametricTree::Node { children, .. } => children.iter().any(|c| c.contains(x)),
        }
    }

    /// Leaf-distance matrix over indices `0..n`.
    pub fn to_matrix(&self, n: usize) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; n]; n];
        self.fill(&mut m);
        m
    }

    fn fill(&self, m: &mut [Vec<f64>]) {
        if let UltrametricTree::Node { diameter, children } = self {
            let groups: Vec<Vec<usize>> = children.iter().map(|c| c.leaves()).collect();
            for (a, ga) in groups.iter().enumerate() {
                for gb in &groups[a + 1..] {
                    for &i in ga {
                        for &j in gb {
                            m[i][j] = *diameter;
                            m[j][i] = *diameter;
                        }
                    }
                }
            }
            children.iter().for_each(|c| c.fill(m));
        }
    }
}

/// Realize an ultrametric cloud as its ball tree.
///
/// Coincident points (distance 0) end up under a node of diameter 0.
pub fn ultrametric_to_tree(cloud: &PointCloud) -> Result<UltrametricTree> {
    if cloud.is_empty() {
        return Err(Error::Domain("empty cloud".into()));
    }
    let report = validate_metric(cloud, MetricMode::Ultra);
    if !report.ok {
        return Err(Error::NotUltrametric {
            triple: report.worst_triple.unwrap_or((0, 0, 0)),
            slack: report.slack,
        });
    }
    let all: Vec<usize> = (0..cloud.len()).collect();
    Ok(split(cloud, all))
}

fn split(cloud: &PointCloud, members: Vec<usize>) -> UltrametricTree {
    if members.len() == 1 {
        return UltrametricTree::Leaf(members[0]);
    }
    let mut diameter: f64 = 0.0;
    for (a, &i) in members.iter().enumerate() {
        for &j in &members[a + 1..] {
            diameter = diameter.max(cloud.dist(i, j));
        }
    }
    if diameter == 0.0 {
        return UltrametricTree::Node {
            diameter,
            children: members.into_iter().map(UltrametricTree::Leaf).collect(),
        };
    }
    // `d < diameter` is an equivalence relation in an ultrametric; its classes
    // are the child balls. `members` is sorted, so groups come out ordered by
    // their smallest index.
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &members {
        match groups.iter_mut().find(|g| cloud.dist(g[0], i) < diameter) {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    UltrametricTree::Node {
        diameter,
        children: groups.into_iter().map(|g| split(cloud, g)).collect(),
    }
}
