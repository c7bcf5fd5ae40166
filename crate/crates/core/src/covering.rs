//! Separated nets, greedy covers and the non-exploding profile.
//!
//! Balls are closed throughout. Cover counts are greedy upper bounds on the
//! minimum and are named `qhat` everywhere for that reason.

use serde::Serialize;

use crate::metric::PointCloud;
use crate::schedule::pow2_neg;

/// Net at scale `eps`: member distances exceed `eps`, and every cloud point
/// lies within `eps` of some member.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparatedSet {
    pub eps: f64,
    pub members: Vec<usize>,
}

impl SeparatedSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Checks both net predicates exactly.
    pub fn is_valid_for(&self, cloud: &PointCloud) -> bool {
        let separated = self.members.iter().enumerate().all(|(a, &i)| {
            self.members[a + 1..]
                .iter()
                .all(|&j| cloud.dist(i, j) > self.eps)
        });
        let maximal = (0..cloud.len()).all(|x| {
            self.members
                .iter()
                .any(|&s| cloud.dist(x, s) <= self.eps)
        });
        separated && maximal
    }
}

/// Scan in index order, admitting a point iff it is farther than `eps` from
/// everything admitted so far.
pub fn maximal_separated(cloud: &PointCloud, eps: f64) -> SeparatedSet {
    let mut members: Vec<usize> = Vec::new();
    for i in 0..cloud.len() {
        if members.iter().all(|&s| cloud.dist(i, s) > eps) {
            members.push(i);
        }
    }
    SeparatedSet { eps, members }
}

/// Greedy closed-ball cover of the whole cloud by radius-`r` balls centred
/// at the lowest-index uncovered point. An upper bound on the minimum.
pub fn greedy_cover_count(cloud: &PointCloud, r: f64) -> usize {
    let all: Vec<usize> = (0..cloud.len()).collect();
    greedy_cover_subset(cloud, &all, r)
}

fn greedy_cover_subset(cloud: &PointCloud, subset: &[usize], r: f64) -> usize {
    let mut covered = vec![false; subset.len()];
    let mut centres = 0;
    for a in 0..subset.len() {
        if covered[a] {
            continue;
        }
        centres += 1;
        let c = subset[a];
        for (b, &y) in subset.iter().enumerate().skip(a) {
            if !covered[b] && cloud.dist(c, y) <= r {
                covered[b] = true;
            }
        }
    }
    centres
}

/// `max_x |net ∩ B(x, radius)|` over all cloud points, exact.
pub fn local_ball_bound(cloud: &PointCloud, net: &SeparatedSet, radius: f64) -> usize {
    (0..cloud.len())
        .map(|x| {
            net.members
                .iter()
                .filter(|&&s| cloud.dist(x, s) <= radius)
                .count()
        })
        .max()
        .unwrap_or(0)
}

/// Local doubling count at radius `r`: the largest number of greedy
/// radius-`r/2` balls needed to cover any `B(x, r) ∩ cloud`.
///
/// Greedy centres are cloud points inside the ball, so this bounds the true
/// local count from above, which is what the product inequality needs.
pub fn local_cover_qhat(cloud: &PointCloud, r: f64) -> usize {
    (0..cloud.len())
        .map(|x| {
            let ball: Vec<usize> = (0..cloud.len())
                .filter(|&y| cloud.dist(x, y) <= r)
                .collect();
            greedy_cover_subset(cloud, &ball, r / 2.0)
        })
        .max()
        .unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileRow {
    pub n: usize,
    pub eps: f64,
    #[serde(rename = "G")]
    pub g: usize,
    pub qhat8: usize,
    pub qhat4: usize,
    pub qhat2: usize,
    pub qhat1: usize,
    pub claim_ok: bool,
    /// Envelope of the global greedy count: `min` over grid radii ≤ `eps`.
    pub cover_qhat: usize,
    /// `log qhat1 / log(1/eps)`, 0 at `eps = 1`.
    pub log_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringProfile {
    pub rows: Vec<ProfileRow>,
    pub max_log_ratio: f64,
    pub claim_all_ok: bool,
    pub note: &'static str,
}

impl CoveringProfile {
    pub fn csv(&self) -> String {
        let mut out = String::from("n,eps,G,Qhat8,Qhat4,Qhat2,Qhat1,claim_ok\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.n, r.eps, r.g, r.qhat8, r.qhat4, r.qhat2, r.qhat1, r.claim_ok
            ));
        }
        out
    }
}

/// One row per `n`: `G(n)` from the `2^-n` net, the four local cover counts
/// and the check `G(n) ≤ Q̂(8ε)·Q̂(4ε)·Q̂(2ε)·Q̂(ε)`.
pub fn nonexploding_profile(
    cloud: &PointCloud,
    ns: std::ops::RangeInclusive<usize>,
) -> CoveringProfile {
    let ns: Vec<usize> = ns.collect();
    let row = |n: usize| {
        let eps = pow2_neg(n);
        let net = maximal_separated(cloud, eps);
        let g = local_ball_bound(cloud, &net, 8.0 * eps);
        let q = [8.0, 4.0, 2.0, 1.0].map(|f| local_cover_qhat(cloud, f * eps));
        let product: u128 = q.iter().map(|&v| v as u128).product();
        (n, eps, g, q, (g as u128) <= product)
    };
    #[cfg(feature = "parallel")]
    let raw: Vec<_> = {
        use rayon::prelude::*;
        ns.par_iter().map(|&n| row(n)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let raw: Vec<_> = ns.iter().map(|&n| row(n)).collect();

    // Greedy global counts are not monotone in r. A cover at a smaller grid
    // radius also covers at a larger one, so the running minimum over finer
    // radii is still an upper bound, and it is monotone.
    let mut rows = Vec::with_capacity(raw.len());
    let mut envelope = usize::MAX;
    let mut by_radius: Vec<(usize, usize)> = raw
        .iter()
        .map(|&(n, eps, ..)| (n, greedy_cover_count(cloud, eps)))
        .collect();
    by_radius.sort_by_key(|&(n, _)| std::cmp::Reverse(n));
    let mut env_of = std::collections::BTreeMap::new();
    for (n, c) in by_radius {
        envelope = envelope.min(c);
        env_of.insert(n, envelope);
    }
    for (n, eps, g, q, ok) in raw {
        let log_ratio = if n == 0 {
            0.0
        } else {
            (q[3] as f64).ln() / (1.0 / eps).ln()
        };
        rows.push(ProfileRow {
            n,
            eps,
            g,
            qhat8: q[0],
            qhat4: q[1],
            qhat2: q[2],
            qhat1: q[3],
            claim_ok: ok,
            cover_qhat: env_of[&n],
            log_ratio,
        });
    }
    CoveringProfile {
        max_log_ratio: rows.iter().map(|r| r.log_ratio).fold(0.0, f64::max),
        claim_all_ok: rows.iter().all(|r| r.claim_ok),
        rows,
        note: "counts are exact for the sample; for a sampled continuum they only estimate the ball counts",
    }
}
