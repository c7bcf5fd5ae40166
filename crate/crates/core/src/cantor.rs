//! Cantor systems in the weighted torus.
//!
//! For coordinate `k ∈ I_n` the set `C_k ⊂ [0,1)` is built from the nested
//! intervals `J_s`: `J_∅ = [0, 1 − b_k]`, and `J_s0`, `J_s1` are the equal
//! left/right pieces of `J_s` separated by a gap of `2^-|s| a_|s| b_k`, with
//!
//! ```text
//! a_m = 1 / (2 (m+1)^2),     b_k = ε / (4 (n+1)^2 G(n)).
//! ```
//!
//! Interval lengths depend only on the level and the block, so each block
//! stores one length/gap table. Endpoints are kept as integers over a common
//! per-block denominator, which makes every interval, gap and distance exact.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;

use crate::metric::{check_code_shapes, code_dist, CodePoint, TorusPoint};
use crate::schedule::SlowSchedule;
use crate::{seeded_rng, Error, Result};

/// Default construction depth.
pub const DEFAULT_DEPTH: usize = 30;

/// `Σ_m a_m = π²/12`.
pub const SUM_A: f64 = std::f64::consts::PI * std::f64::consts::PI / 12.0;

/// Parse `p/q` or a finite decimal into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("`{s}` is not an exact rational (use p/q or a finite decimal)"));
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let value = BigRational::new(digits, BigInt::from(10u32).pow(frac.len() as u32));
    Ok(if neg { -value } else { value })
}

pub fn a_seq(m: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2 * (m + 1) * (m + 1)))
}

fn pow2(p: usize) -> BigInt {
    BigInt::one() << p
}

fn rat_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Per-block tables, all numerators over `denom`.
#[derive(Debug, Clone)]
struct Block {
    b: BigRational,
    denom: BigInt,
    /// `len_p` for `p = 0..=p_max`
    len: Vec<BigInt>,
    /// gap under a level-`p` node, `p = 0..p_max`
    gap: Vec<BigInt>,
    /// offset of the right child: `len_{p+1} + gap_p`
    step: Vec<BigInt>,
    len_f: Vec<f64>,
    step_f: Vec<f64>,
}

impl Block {
    fn build(b: BigRational, p_max: usize) -> Result<Block> {
        let mut len = vec![BigRational::one() - &b];
        let mut gap = Vec::with_capacity(p_max);
        for p in 0..p_max {
            let g = a_seq(p) * &b / BigRational::from_integer(pow2(p));
            let next = (&len[p] - &g) / BigRational::from_integer(BigInt::from(2));
            if !next.is_positive() {
                return Err(Error::Internal(format!("nonpositive length at depth {}", p + 1)));
            }
            gap.push(g);
            len.push(next);
        }
        let denom = len
            .iter()
            .chain(&gap)
            .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let num = |r: &BigRational| (r * BigRational::from_integer(denom.clone())).to_integer();
        let len_n: Vec<BigInt> = len.iter().map(num).collect();
        let gap_n: Vec<BigInt> = gap.iter().map(num).collect();
        let step: Vec<BigInt> = (0..p_max).map(|p| &len_n[p + 1] + &gap_n[p]).collect();
        let to_f = |v: &BigInt| rat_f64(&BigRational::new(v.clone(), denom.clone()));
        Ok(Block {
            len_f: len_n.iter().map(to_f).collect(),
            step_f: step.iter().map(to_f).collect(),
            b,
            denom,
            len: len_n,
            gap: gap_n,
            step,
        })
    }

    fn rat(&self, num: &BigInt) -> BigRational {
        BigRational::new(num.clone(), self.denom.clone())
    }

    /// Left-endpoint numerator of `J_s` for the first `depth` digits of `word`.
    fn left_num(&self, word: u64, depth: usize) -> BigInt {
        let mut acc = BigInt::zero();
        for i in 0..depth {
            if (word >> (63 - i)) & 1 == 1 {
                acc += &self.step[i];
            }
        }
        acc
    }
}

/// A finite-depth Cantor system over a truncated slow schedule.
#[derive(Debug, Clone)]
pub struct CantorSystem {
    epsilon: BigRational,
    schedule: SlowSchedule,
    p_max: usize,
    /// indexed by block `n`; `None` for empty blocks
    blocks: Vec<Option<Block>>,
}

pub fn build_system(epsilon: BigRational, schedule: SlowSchedule, p_max: usize) -> Result<CantorSystem> {
    if !(epsilon.is_positive() && epsilon < BigRational::one()) {
        return Err(Error::Domain(format!("ε = {epsilon} must lie in (0,1)")));
    }
    if schedule.coords() == 0 {
        return Err(Error::Domain("schedule has no coordinates".into()));
    }
    if p_max > CodePoint::MAX_DEPTH {
        return Err(Error::DepthExceeded {
            depth: p_max,
            max: CodePoint::MAX_DEPTH,
        });
    }
    let blocks = (0..=schedule.n_max())
        .map(|n| {
            let g = schedule.g(n);
            if g == 0 {
                return Ok(None);
            }
            let b = &epsilon / BigRational::from_integer(BigInt::from(4 * (n + 1) * (n + 1) * g));
            Block::build(b, p_max).map(Some)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CantorSystem {
        epsilon,
        schedule,
        p_max,
        blocks,
    })
}

impl CantorSystem {
    pub fn epsilon(&self) -> &BigRational {
        &self.epsilon
    }

    pub fn schedule(&self) -> &SlowSchedule {
        &self.schedule
    }

    pub fn p_max(&self) -> usize {
        self.p_max
    }

    fn block(&self, k: usize) -> &Block {
        self.blocks[self.schedule.block_of(k)]
            .as_ref()
            .expect("coordinates only live in nonempty blocks")
    }

    /// `b_k`.
    pub fn b(&self, k: usize) -> BigRational {
        self.block(k).b.clone()
    }

    /// Exact length of a level-`p` interval at coordinate `k`.
    pub fn len_at(&self, k: usize, p: usize) -> BigRational {
        let blk = self.block(k);
        blk.rat(&blk.len[p])
    }

    /// Exact gap between the two children of a level-`p` node.
    pub fn gap_at(&self, k: usize, p: usize) -> BigRational {
        let blk = self.block(k);
        blk.rat(&blk.gap[p])
    }

    /// Exact endpoints of `J_s` at coordinate `k`.
    pub fn interval(&self, k: usize, s: &[bool]) -> Result<(BigRational, BigRational)> {
        if s.len() > self.p_max {
            return Err(Error::DepthExceeded {
                depth: s.len(),
                max: self.p_max,
            });
        }
        let blk = self.block(k);
        let left: BigInt = s
            .iter()
            .enumerate()
            .filter(|(_, &d)| d)
            .map(|(i, _)| &blk.step[i])
            .sum();
        let right = &left + &blk.len[s.len()];
        Ok((blk.rat(&left), blk.rat(&right)))
    }

    fn check_code(&self, code: &CodePoint) -> Result<()> {
        if code.len() != self.schedule.coords() {
            return Err(Error::Shape {
                expected: self.schedule.coords(),
                found: code.len(),
            });
        }
        if code.depth() > self.p_max {
            return Err(Error::DepthExceeded {
                depth: code.depth(),
                max: self.p_max,
            });
        }
        Ok(())
    }

    /// Exact left endpoints of `J_{code_k}` as block numerators.
    pub fn encode_exact(&self, code: &CodePoint) -> Result<ExactImage> {
        self.check_code(code)?;
        Ok(ExactImage {
            nums: (0..code.len())
                .map(|k| self.block(k).left_num(code.words()[k], code.depth()))
                .collect(),
        })
    }

    /// The coded point, surrogated by the left endpoint of `J_{code_k}`
    /// rounded up to the nearest double so it stays inside the interval.
    pub fn encode(&self, code: &CodePoint) -> Result<TorusPoint> {
        let exact = self.encode_exact(code)?;
        let coords = exact
            .nums
            .iter()
            .enumerate()
            .map(|(k, num)| {
                let r = self.block(k).rat(num);
                let mut f = rat_f64(&r);
                if BigRational::from_float(f).is_some_and(|e| e < r) {
                    f = f.next_up();
                }
                f
            })
            .collect();
        TorusPoint::new(coords)
    }

    /// Exact `d_G` between two exact images.
    pub fn exact_torus_dist(&self, a: &ExactImage, b: &ExactImage) -> BigRational {
        let mut best = BigRational::zero();
        for k in 0..a.nums.len() {
            let blk = self.block(k);
            let diff = (&a.nums[k] - &b.nums[k]).abs();
            let wrap = &blk.denom - &diff;
            let c = if wrap < diff { wrap } else { diff };
            if c.is_zero() {
                continue;
            }
            let v = BigRational::new(c, &blk.denom << self.schedule.block_of(k));
            if v > best {
                best = v;
            }
        }
        best
    }

    /// Code of the level-`p_max` interval holding `v`, or `None` when `v`
    /// falls in a gap or beyond `J_∅`. Comparisons are done in doubles and
    /// redone exactly (with `exact()`) whenever they are too close to call.
    pub fn locate(&self, k: usize, v: f64, exact: impl Fn() -> BigRational) -> Option<u64> {
        const CLOSE: f64 = 1e-12;
        let blk = self.block(k);
        let near = |a: f64, b: f64| (a - b).abs() <= CLOSE;
        if v < -CLOSE || v > blk.len_f[0] + CLOSE {
            return None;
        }
        let mut left = 0.0;
        let mut word = 0u64;
        let mut fast = !near(v, 0.0) && !near(v, blk.len_f[0]);
        if fast {
            for p in 0..self.p_max {
                let left_end = left + blk.len_f[p + 1];
                let right_start = left + blk.step_f[p];
                if near(v, left_end) || near(v, right_start) {
                    fast = false;
                    break;
                }
                if v < left_end {
                    continue;
                } else if v > right_start {
                    left = right_start;
                    word |= 1 << (63 - p);
                } else {
                    return None;
                }
            }
        }
        if fast {
            return Some(word);
        }
        let x = exact() * BigRational::from_integer(blk.denom.clone());
        // numerator-space comparisons: x is v·denom
        let zero = BigRational::zero();
        if x < zero || x > BigRational::from_integer(blk.len[0].clone()) {
            return None;
        }
        let mut left = BigInt::zero();
        let mut word = 0u64;
        for p in 0..self.p_max {
            let left_end = BigRational::from_integer(&left + &blk.len[p + 1]);
            let right_start = BigRational::from_integer(&left + &blk.step[p]);
            if x <= left_end {
                continue;
            } else if x >= right_start {
                left += &blk.step[p];
                word |= 1 << (63 - p);
            } else {
                return None;
            }
        }
        Some(word)
    }

    /// Random code point of full depth.
    pub fn random_code<R: Rng>(&self, rng: &mut R) -> CodePoint {
        let mask = mask(self.p_max);
        let codes = (0..self.schedule.coords())
            .map(|_| rng.gen::<u64>() & mask)
            .collect();
        CodePoint::new(codes, self.p_max).expect("masked to depth")
    }
}

fn mask(depth: usize) -> u64 {
    if depth == 0 {
        0
    } else {
        u64::MAX << (64 - depth)
    }
}

/// Exact image of a code point: block numerators per coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactImage {
    pub nums: Vec<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockAccount {
    pub n: usize,
    #[serde(rename = "G")]
    pub g: usize,
    pub b: String,
    pub b_f64: f64,
    /// `1 − 2^p_max · len_p_max`, from the interval recursion.
    pub omitted_truncated: String,
    pub omitted_truncated_f64: f64,
    /// The recursion agrees with `b (1 + Σ_{p < p_max} a_p)` exactly.
    pub omitted_matches_closed_form: bool,
    /// `b (1 + π²/12)`, the omitted mass of the full construction.
    pub omitted_full_depth: f64,
    /// `1 − 2b`, strictly below `λ(C_k)`.
    pub lambda_lower: f64,
    /// Every gap at every level is at most `b` (exact).
    pub gaps_within_b: bool,
    /// Total gap mass on level `p` is `a_p b` (exact) for every level.
    pub level_gap_mass_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureAccount {
    pub blocks: Vec<BlockAccount>,
    /// `Σ_k b_k` over the horizon.
    pub sum_b: f64,
    /// `ε π²/24`, the infinite-horizon value.
    pub sum_b_closed_form: f64,
    pub product_lower: f64,
    pub one_minus_two_sum_b: f64,
    pub one_minus_eps: f64,
    pub product_bound_ok: bool,
    pub sum_bound_ok: bool,
    /// Mass the construction still removes below the truncation depth.
    pub truncation_slack: f64,
    /// `∏_k (1 − omitted_truncated_k)`: measure of the truncated set.
    pub truncated_measure: f64,
}

/// Exact omitted-mass bookkeeping and the product bound.
pub fn measure_account(sys: &CantorSystem) -> MeasureAccount {
    let p = sys.p_max;
    let sum_a_trunc: BigRational = (0..p).map(a_seq).sum();
    let sum_a_tail = SUM_A - rat_f64(&sum_a_trunc);
    let mut blocks = Vec::new();
    let mut sum_b = 0.0;
    let mut product = 1.0;
    let mut slack = 0.0;
    let mut truncated_measure = 1.0;
    for (n, blk) in sys.blocks.iter().enumerate() {
        let Some(blk) = blk else { continue };
        let g = sys.schedule.g(n);
        let len_p = blk.rat(&blk.len[p]);
        let omitted = BigRational::one() - BigRational::from_integer(pow2(p)) * len_p;
        let closed = &blk.b * (BigRational::one() + &sum_a_trunc);
        let b_f = rat_f64(&blk.b);
        let gaps_within_b = blk.gap.iter().all(|gp| blk.rat(gp) <= blk.b);
        let level_gap_mass_ok = (0..p).all(|q| {
            BigRational::from_integer(pow2(q)) * blk.rat(&blk.gap[q]) == a_seq(q) * &blk.b
        });
        let omitted_f = rat_f64(&omitted);
        for _ in 0..g {
            sum_b += b_f;
            product *= 1.0 - 2.0 * b_f;
            slack += b_f * sum_a_tail;
            truncated_measure *= 1.0 - omitted_f;
        }
        blocks.push(BlockAccount {
            n,
            g,
            b: blk.b.to_string(),
            b_f64: b_f,
            omitted_truncated: omitted.to_string(),
            omitted_truncated_f64: omitted_f,
            omitted_matches_closed_form: omitted == closed,
            omitted_full_depth: b_f * (1.0 + SUM_A),
            lambda_lower: 1.0 - 2.0 * b_f,
            gaps_within_b,
            level_gap_mass_ok,
        });
    }
    let eps = rat_f64(&sys.epsilon);
    let one_minus_two_sum_b = 1.0 - 2.0 * sum_b;
    MeasureAccount {
        blocks,
        sum_b,
        sum_b_closed_form: eps * std::f64::consts::PI * std::f64::consts::PI / 24.0,
        product_lower: product,
        one_minus_two_sum_b,
        one_minus_eps: 1.0 - eps,
        product_bound_ok: product >= one_minus_two_sum_b - 1e-10,
        sum_bound_ok: one_minus_two_sum_b > 1.0 - eps,
        truncation_slack: slack,
        truncated_measure,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusViolation {
    pub pair: usize,
    pub kind: &'static str,
    pub j: usize,
    pub n: usize,
    pub p: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusReport {
    pub pairs: usize,
    pub skipped_equal: usize,
    /// Pairs with `j = 0`; bounds (a) and (b) still apply.
    pub ratio_skipped: usize,
    pub violations: usize,
    pub lipschitz_violations: usize,
    pub lower_violations: usize,
    pub ratio_violations: usize,
    /// Largest `log d_G / log ρ_G` over pairs with `j ≥ 1`.
    pub max_ratio: Option<f64>,
    /// Smallest `bound − ratio` over pairs with `j ≥ 1`.
    pub bound_c_margin: Option<f64>,
    /// Pairs above the uniform-in-`j` envelope using `max_{i≤j} G(i)`.
    pub uniform_envelope_exceeded: usize,
    pub first_violations: Vec<ModulusViolation>,
}

/// Check the two-sided modulus of the coding map on code pairs.
///
/// For each pair with `ρ_G = 2^-j`, realized at coordinate `k ∈ I_n` with
/// common prefix `p` (so `j = n + p`):
/// (a) `d_G(x̂, ŷ) ≤ ρ_G(x, y)`;
/// (b) `d_G(x̂, ŷ) ≥ 2^-j b_k a_p`;
/// (c) `log d_G / log ρ_G ≤ (j + 2log(p+1) + 3 + 2log(n+1) + log G(n) − log ε) / j`
/// with base-2 logs, for `j ≥ 1`.
pub fn verify_modulus(sys: &CantorSystem, pairs: &[(CodePoint, CodePoint)]) -> Result<ModulusReport> {
    for (x, y) in pairs {
        sys.check_code(x)?;
        check_code_shapes(x, y, &sys.schedule)?;
    }
    let log_eps = rat_f64(&sys.epsilon).log2();

    #[derive(Default)]
    struct Outcome {
        equal: bool,
        ratio_skipped: bool,
        lip: bool,
        lower: bool,
        ratio: bool,
        ratio_value: Option<f64>,
        margin: Option<f64>,
        uniform_exceeded: bool,
        where_: (usize, usize, usize),
    }

    let check = |(x, y): &(CodePoint, CodePoint)| -> Outcome {
        // j = min over coordinates of n_k + p_k, first coordinate on ties
        let realized = (0..x.len())
            .filter_map(|k| {
                x.common_prefix(y, k)
                    .map(|p| (sys.schedule.block_of(k) + p, k, p))
            })
            .min_by_key(|&(j, k, _)| (j, k));
        let Some((j, k, p)) = realized else {
            return Outcome {
                equal: true,
                ..Default::default()
            };
        };
        let n = sys.schedule.block_of(k);
        let xe = sys.encode_exact(x).expect("checked");
        let ye = sys.encode_exact(y).expect("checked");
        let d_g = sys.exact_torus_dist(&xe, &ye);
        let rho = BigRational::new(BigInt::one(), pow2(j));
        let lip = d_g <= rho;
        let lower_bound = &rho * sys.b(k) * a_seq(p);
        let lower = d_g >= lower_bound;
        let mut out = Outcome {
            lip,
            lower,
            ratio: true,
            where_: (j, n, p),
            ..Default::default()
        };
        if j == 0 {
            out.ratio_skipped = true;
            return out;
        }
        let jf = j as f64;
        let ratio = -rat_f64(&d_g).log2() / jf;
        let g = sys.schedule.g(n) as f64;
        let bound = (jf + 2.0 * ((p + 1) as f64).log2() + 3.0 + 2.0 * ((n + 1) as f64).log2()
            + g.log2()
            - log_eps)
            / jf;
        let g_tilde = sys.schedule.running_max(j) as f64;
        let uniform = (jf + 4.0 * ((j + 1) as f64).log2() + 3.0 + g_tilde.log2() - log_eps) / jf;
        out.ratio = ratio <= bound;
        out.ratio_value = Some(ratio);
        out.margin = Some(bound - ratio);
        out.uniform_exceeded = ratio > uniform;
        out
    };

    #[cfg(feature = "parallel")]
    let outcomes: Vec<Outcome> = {
        use rayon::prelude::*;
        pairs.par_iter().map(check).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<Outcome> = pairs.iter().map(check).collect();

    let mut report = ModulusReport {
        pairs: pairs.len(),
        skipped_equal: 0,
        ratio_skipped: 0,
        violations: 0,
        lipschitz_violations: 0,
        lower_violations: 0,
        ratio_violations: 0,
        max_ratio: None,
        bound_c_margin: None,
        uniform_envelope_exceeded: 0,
        first_violations: Vec::new(),
    };
    for (i, o) in outcomes.iter().enumerate() {
        if o.equal {
            report.skipped_equal += 1;
            continue;
        }
        report.ratio_skipped += o.ratio_skipped as usize;
        report.uniform_envelope_exceeded += o.uniform_exceeded as usize;
        let (j, n, p) = o.where_;
        for (ok, kind, counter) in [
            (o.lip, "lipschitz", &mut report.lipschitz_violations),
            (o.lower, "lower", &mut report.lower_violations),
            (o.ratio, "ratio", &mut report.ratio_violations),
        ] {
            if !ok {
                *counter += 1;
                if report.first_violations.len() < 10 {
                    report.first_violations.push(ModulusViolation { pair: i, kind, j, n, p });
                }
            }
        }
        if let Some(r) = o.ratio_value {
            report.max_ratio = Some(report.max_ratio.map_or(r, |m: f64| m.max(r)));
        }
        if let Some(m) = o.margin {
            report.bound_c_margin = Some(report.bound_c_margin.map_or(m, |b: f64| b.min(m)));
        }
    }
    report.violations = report.lipschitz_violations + report.lower_violations + report.ratio_violations;
    Ok(report)
}

/// Seeded code pairs at full depth. The second code copies a random prefix
/// of the first in each coordinate (or the whole code, half the time), so
/// the pairs cover many scales `j`.
pub fn random_code_pairs(sys: &CantorSystem, count: usize, seed: u64) -> Vec<(CodePoint, CodePoint)> {
    let mut rng = seeded_rng(seed);
    let depth = sys.p_max;
    let k_total = sys.schedule.coords();
    (0..count)
        .map(|_| {
            let x = sys.random_code(&mut rng);
            let mut words = x.words().to_vec();
            let mut changed = false;
            for w in words.iter_mut() {
                if depth > 0 && rng.gen_bool(0.5) {
                    *w = diverge(*w, rng.gen_range(0..depth), depth, &mut rng);
                    changed = true;
                }
            }
            if !changed && depth > 0 {
                let k = rng.gen_range(0..k_total);
                words[k] = diverge(words[k], rng.gen_range(0..depth), depth, &mut rng);
            }
            let y = CodePoint::new(words, depth).expect("masked to depth");
            (x, y)
        })
        .collect()
}

/// Keep the first `at` digits, flip digit `at`, randomize the rest.
fn diverge<R: Rng>(word: u64, at: usize, depth: usize, rng: &mut R) -> u64 {
    let keep = if at == 0 { 0 } else { u64::MAX << (64 - at) };
    let flip = 1u64 << (63 - at);
    let tail = rng.gen::<u64>() & !keep & !flip & mask(depth);
    (word & keep) | ((word & flip) ^ flip) | tail
}

/// Finitely many weighted atoms in the torus.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    pub atoms: Vec<(TorusPoint, f64)>,
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<(TorusPoint, f64)>) -> Result<Self> {
        if atoms.iter().any(|(_, w)| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Domain("atom weights must be finite and nonnegative".into()));
        }
        Ok(DiscreteMeasure { atoms })
    }

    /// `count` seeded Haar-uniform atoms of unit weight.
    pub fn haar_uniform(coords: usize, count: usize, seed: u64) -> Self {
        let mut rng = seeded_rng(seed);
        let atoms = (0..count)
            .map(|_| {
                let p = TorusPoint::new((0..coords).map(|_| rng.gen::<f64>()).collect())
                    .expect("finite");
                (p, 1.0)
            })
            .collect();
        DiscreteMeasure { atoms }
    }

    pub fn total(&self) -> f64 {
        self.atoms.iter().map(|(_, w)| w).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftFit {
    /// Dyadic shift coordinates `numerator / 2^grid_depth`.
    pub shift: Vec<f64>,
    pub grid_depth: usize,
    pub captured: f64,
    pub total: f64,
    #[serde(skip)]
    pub captured_atoms: Vec<bool>,
    /// Level-`p_max` codes of captured atoms after shifting.
    #[serde(skip)]
    pub codes: Vec<Option<CodePoint>>,
    pub sweeps: usize,
}

impl ShiftFit {
    pub fn captured_fraction(&self) -> f64 {
        if self.total == 0.0 {
            0.0
        } else {
            self.captured / self.total
        }
    }
}

const MAX_SWEEPS: usize = 8;

/// Search dyadic shifts `x` (coordinates `i / 2^grid_depth`) for the largest
/// `μ(C − x)`, where `C` is the depth-`p_max` truncation.
///
/// The product grid is searched by exact coordinate ascent: each coordinate
/// in turn moves to the smallest grid value that maximizes the captured mass
/// with the others fixed, until a sweep changes nothing.
pub fn shift_fit(sys: &CantorSystem, mu: &DiscreteMeasure, grid_depth: usize) -> Result<ShiftFit> {
    if grid_depth > sys.p_max {
        return Err(Error::DepthExceeded {
            depth: grid_depth,
            max: sys.p_max,
        });
    }
    let kdim = sys.schedule.coords();
    for (p, _) in &mu.atoms {
        if p.len() != kdim {
            return Err(Error::Shape {
                expected: kdim,
                found: p.len(),
            });
        }
    }
    let cells = 1u64 << grid_depth;
    let grid = BigRational::from_integer(BigInt::from(cells));
    let member = |k: usize, atom: f64, t: u64| -> Option<u64> {
        let shift = t as f64 / cells as f64;
        let v = crate::metric::wrap_unit(atom + shift);
        sys.locate(k, v, || {
            let x = BigRational::from_float(atom).expect("finite atom")
                + BigRational::new(BigInt::from(t), grid.numer().clone());
            let floor = x.floor();
            x - floor
        })
    };

    let n_atoms = mu.atoms.len();
    let mut shift = vec![0u64; kdim];
    let mut inside: Vec<Vec<bool>> = mu
        .atoms
        .iter()
        .map(|(p, _)| (0..kdim).map(|k| member(k, p.coords()[k], 0).is_some()).collect())
        .collect();
    let mut outside: Vec<usize> = inside.iter().map(|r| r.iter().filter(|&&b| !b).count()).collect();

    let mut sweeps = 0;
    loop {
        sweeps += 1;
        let mut changed = false;
        for k in 0..kdim {
            let eligible: Vec<usize> = (0..n_atoms)
                .filter(|&a| outside[a] - usize::from(!inside[a][k]) == 0)
                .collect();
            let mass_at = |t: u64| -> f64 {
                eligible
                    .iter()
                    .filter(|&&a| member(k, mu.atoms[a].0.coords()[k], t).is_some())
                    .map(|&a| mu.atoms[a].1)
                    .sum()
            };
            let current = mass_at(shift[k]);
            let mut best = (current, shift[k]);
            for t in 0..cells {
                if t == shift[k] {
                    continue;
                }
                let m = mass_at(t);
                if m > best.0 || (m == best.0 && t < best.1) {
                    best = (m, t);
                }
            }
            if best.1 != shift[k] {
                let strictly_better = best.0 > current;
                shift[k] = best.1;
                for a in 0..n_atoms {
                    let now = member(k, mu.atoms[a].0.coords()[k], shift[k]).is_some();
                    if now != inside[a][k] {
                        if now {
                            outside[a] -= 1;
                        } else {
                            outside[a] += 1;
                        }
                        inside[a][k] = now;
                    }
                }
                changed |= strictly_better;
            }
        }
        if !changed || sweeps >= MAX_SWEEPS {
            break;
        }
    }

    let captured_atoms: Vec<bool> = outside.iter().map(|&o| o == 0).collect();
    let captured = mu
        .atoms
        .iter()
        .zip(&captured_atoms)
        .filter(|(_, &c)| c)
        .map(|((_, w), _)| w)
        .sum();
    let codes = mu
        .atoms
        .iter()
        .zip(&captured_atoms)
        .map(|((p, _), &c)| {
            if !c {
                return None;
            }
            let words: Option<Vec<u64>> = (0..kdim)
                .map(|k| member(k, p.coords()[k], shift[k]))
                .collect();
            words.map(|w| CodePoint::new(w, sys.p_max).expect("located codes fit the depth"))
        })
        .collect();
    Ok(ShiftFit {
        shift: shift.iter().map(|&t| t as f64 / cells as f64).collect(),
        grid_depth,
        captured,
        total: mu.total(),
        captured_atoms,
        codes,
        sweeps,
    })
}

/// `ρ_G` for two code points of this system.
pub fn system_code_dist(sys: &CantorSystem, x: &CodePoint, y: &CodePoint) -> Result<f64> {
    code_dist(x, y, &sys.schedule)
}

/// Compare two exact rationals; exposed for report code.
pub fn cmp_rational(a: &BigRational, b: &BigRational) -> Ordering {
    a.cmp(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::GSpec;

    fn q(p: i64, r: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(r))
    }

    fn half_system(depth: usize) -> CantorSystem {
        let s = SlowSchedule::new(GSpec::List(vec![1]), 0).unwrap();
        build_system(q(1, 2), s, depth).unwrap()
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("1/2").unwrap(), q(1, 2));
        assert_eq!(parse_rational("0.1").unwrap(), q(1, 10));
        assert_eq!(parse_rational("3").unwrap(), q(3, 1));
        for bad in ["1/0", "pi", "", "0.1.2", "1e-3"] {
            assert!(matches!(parse_rational(bad), Err(Error::Parse(_))), "{bad}");
        }
    }

    #[test]
    fn hand_recursion_example() {
        let sys = half_system(4);
        assert_eq!(sys.b(0), q(1, 8));
        assert_eq!(sys.interval(0, &[]).unwrap(), (q(0, 1), q(7, 8)));
        assert_eq!(sys.gap_at(0, 0), q(1, 16));
        assert_eq!(sys.len_at(0, 1), q(13, 32));
        assert_eq!(sys.interval(0, &[false]).unwrap(), (q(0, 1), q(13, 32)));
        assert_eq!(sys.interval(0, &[true]).unwrap(), (q(15, 32), q(7, 8)));
    }

    #[test]
    fn lengths_telescope() {
        let sys = half_system(12);
        let b = sys.b(0);
        let mut sum_a = BigRational::zero();
        for p in 0..=12 {
            let lhs = BigRational::from_integer(pow2(p)) * sys.len_at(0, p)
                + &b * (BigRational::one() + &sum_a);
            assert_eq!(lhs, BigRational::one(), "level {p}");
            if p < 12 {
                sum_a += a_seq(p);
            }
        }
    }

    #[test]
    fn children_tile_parent() {
        let sys = half_system(6);
        let s = [true, false, true];
        let (l, r) = sys.interval(0, &s).unwrap();
        let (l0, r0) = sys.interval(0, &[true, false, true, false]).unwrap();
        let (l1, r1) = sys.interval(0, &[true, false, true, true]).unwrap();
        assert_eq!(l, l0);
        assert_eq!(r, r1);
        assert_eq!(&l1 - &r0, sys.gap_at(0, 3));
        assert_eq!(&r0 - &l0, &r1 - &l1);
        assert!(matches!(
            sys.interval(0, &[false; 7]),
            Err(Error::DepthExceeded { .. })
        ));
    }

    #[test]
    fn encode_examples() {
        let sys = half_system(1);
        let one = CodePoint::from_strs(&["1"]).unwrap();
        assert_eq!(sys.encode(&one).unwrap().coords(), &[15.0 / 32.0]);
        let zeros = CodePoint::from_strs(&["0"]).unwrap();
        assert_eq!(sys.encode(&zeros).unwrap().coords(), &[0.0]);
        let deep = CodePoint::from_strs(&["01"]).unwrap();
        assert!(matches!(sys.encode(&deep), Err(Error::DepthExceeded { .. })));
    }

    #[test]
    fn encoded_points_are_located_back() {
        let s = SlowSchedule::new("poly:1,1".parse().unwrap(), 3).unwrap();
        let sys = build_system(q(1, 10), s, 20).unwrap();
        let mut rng = seeded_rng(3);
        for _ in 0..50 {
            let c = sys.random_code(&mut rng);
            let p = sys.encode(&c).unwrap();
            for k in 0..c.len() {
                let got = sys.locate(k, p.coords()[k], || {
                    BigRational::from_float(p.coords()[k]).unwrap()
                });
                assert_eq!(got, Some(c.words()[k]));
            }
        }
    }

    #[test]
    fn gap_points_are_not_located() {
        let sys = half_system(1);
        // root gap is (13/32, 15/32)
        assert_eq!(sys.locate(0, 14.0 / 32.0, || q(14, 32)), None);
        assert_eq!(sys.locate(0, 13.0 / 32.0, || q(13, 32)), Some(0));
        assert_eq!(sys.locate(0, 15.0 / 32.0, || q(15, 32)), Some(1 << 63));
        assert_eq!(sys.locate(0, 0.9, || q(9, 10)), None);
    }

    #[test]
    fn measure_example() {
        let acc = measure_account(&half_system(10));
        let blk = &acc.blocks[0];
        assert_eq!(blk.b, "1/8");
        assert!(blk.omitted_truncated_f64 <= 0.25);
        assert_eq!(blk.lambda_lower, 0.75);
        assert!(blk.omitted_matches_closed_form && blk.gaps_within_b && blk.level_gap_mass_ok);
        assert!((blk.omitted_full_depth - 0.125 * (1.0 + SUM_A)).abs() < 1e-15);
        assert!(blk.omitted_full_depth < 0.25);
        assert!(acc.product_bound_ok && acc.sum_bound_ok);
    }

    #[test]
    fn sum_b_closed_form() {
        let s = SlowSchedule::new("poly:1,1".parse().unwrap(), 2000).unwrap();
        let sys = build_system(q(1, 2), s, 1).unwrap();
        let acc = measure_account(&sys);
        // Σ_{n ≤ N} 1/(n+1)² differs from π²/6 by about 1/N
        assert!((acc.sum_b - acc.sum_b_closed_form).abs() < 0.5 / 4.0 / 2000.0);
        assert!(acc.sum_b < 0.25);
    }

    #[test]
    fn modulus_single_digit_pair() {
        let sys = half_system(1);
        let x = CodePoint::from_strs(&["0"]).unwrap();
        let y = CodePoint::from_strs(&["1"]).unwrap();
        let r = verify_modulus(&sys, &[(x.clone(), y), (x.clone(), x)]).unwrap();
        assert_eq!(r.skipped_equal, 1);
        assert_eq!(r.ratio_skipped, 1);
        assert_eq!(r.violations, 0);
        let d = sys.exact_torus_dist(
            &sys.encode_exact(&CodePoint::from_strs(&["0"]).unwrap()).unwrap(),
            &sys.encode_exact(&CodePoint::from_strs(&["1"]).unwrap()).unwrap(),
        );
        assert_eq!(d, q(15, 32));
    }

    #[test]
    fn shift_zero_captures_supported_measure() {
        let s = SlowSchedule::new("poly:1,1".parse().unwrap(), 2).unwrap();
        let sys = build_system(q(1, 10), s, 8).unwrap();
        let mut rng = seeded_rng(9);
        let atoms = (0..40)
            .map(|_| (sys.encode(&sys.random_code(&mut rng)).unwrap(), 1.0))
            .collect();
        let mu = DiscreteMeasure::new(atoms).unwrap();
        let fit = shift_fit(&sys, &mu, 3).unwrap();
        assert_eq!(fit.captured, 40.0);
        assert!(fit.shift.iter().all(|&t| t == 0.0));
        assert!(matches!(shift_fit(&sys, &mu, 9), Err(Error::DepthExceeded { .. })));
    }

    #[test]
    fn single_atom_is_captured() {
        let sys = half_system(6);
        let mu = DiscreteMeasure::new(vec![(TorusPoint::new(vec![0.93]).unwrap(), 2.5)]).unwrap();
        let fit = shift_fit(&sys, &mu, 3).unwrap();
        assert_eq!(fit.captured, 2.5);
        assert!(fit.codes[0].is_some());
    }

    #[test]
    fn invalid_epsilon() {
        let s = SlowSchedule::new(GSpec::Const(1), 0).unwrap();
        assert!(build_system(q(0, 1), s.clone(), 4).is_err());
        assert!(build_system(q(1, 1), s, 4).is_err());
    }
}
