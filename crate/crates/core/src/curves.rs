//! Space-filling surjections: Hilbert curves and binary digit interleaving.

use rand::Rng;
use serde::Serialize;

use crate::holder::{modulus_fit, ModulusFit};
use crate::{seeded_rng, Error, Result};

pub const MAX_ORDER: u32 = 20;

fn check_hilbert(m: usize, order: u32) -> Result<()> {
    if m < 2 {
        return Err(Error::Domain(format!("Hilbert curves need m ≥ 2, got {m}")));
    }
    if order == 0 || order > MAX_ORDER {
        return Err(Error::Domain(format!("order {order} outside 1..={MAX_ORDER}")));
    }
    if m * order as usize > 127 {
        return Err(Error::Domain(format!("m·order = {} exceeds 127 bits", m * order as usize)));
    }
    Ok(())
}

/// Cell coordinates of the `index`-th vertex of the order-`order` curve in
/// `m` dimensions (Skilling's transpose algorithm).
pub fn hilbert_cell(m: usize, order: u32, index: u128) -> Vec<u32> {
    // transpose: bit h of the index (from the top) goes to axis h mod m
    let mut x = vec![0u32; m];
    let total = m * order as usize;
    for h in 0..total {
        let bit = (index >> (total - 1 - h)) & 1;
        if bit == 1 {
            x[h % m] |= 1 << (order as usize - 1 - h / m);
        }
    }
    // Gray decode
    let t = x[m - 1] >> 1;
    for i in (1..m).rev() {
        x[i] ^= x[i - 1];
    }
    x[0] ^= t;
    // undo excess work
    let top = 1u32 << order;
    let mut q = 2u32;
    while q != top {
        let p = q - 1;
        for i in (0..m).rev() {
            if x[i] & q != 0 {
                x[0] ^= p;
            } else {
                let t = (x[0] ^ x[i]) & p;
                x[0] ^= t;
                x[i] ^= t;
            }
        }
        q <<= 1;
    }
    x
}

/// All `2^{m·order}` vertices in curve order.
pub fn hilbert_cells(m: usize, order: u32) -> Result<Vec<Vec<u32>>> {
    check_hilbert(m, order)?;
    if m * order as usize > 26 {
        return Err(Error::Domain("too many cells to enumerate".into()));
    }
    Ok((0..1u128 << (m * order as usize))
        .map(|i| hilbert_cell(m, order, i))
        .collect())
}

/// The order-`order` Hilbert polygon in `[0,1]^m` at parameter `t`.
///
/// Vertex `i` is the lower corner `c / 2^order` of the `i`-th cell; `t` runs
/// over the polygon at constant parameter speed.
pub fn hilbert_curve(m: usize, order: u32, t: f64) -> Result<Vec<f64>> {
    check_hilbert(m, order)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("t = {t} outside [0,1]")));
    }
    let last = (1u128 << (m * order as usize)) - 1;
    let u = t * last as f64;
    let i = (u.floor() as u128).min(last);
    let frac = u - i as f64;
    let side = (1u64 << order) as f64;
    let a = hilbert_cell(m, order, i);
    if i == last || frac == 0.0 {
        return Ok(a.iter().map(|&c| c as f64 / side).collect());
    }
    let b = hilbert_cell(m, order, i + 1);
    Ok(a.iter()
        .zip(&b)
        .map(|(&ca, &cb)| (ca as f64 + frac * (cb as f64 - ca as f64)) / side)
        .collect())
}

fn check_interleave(n: usize, m: usize, p: usize) -> Result<()> {
    if n == 0 || n > m {
        return Err(Error::Domain(format!("interleaving needs 1 ≤ n ≤ m (n = {n}, m = {m})")));
    }
    if p == 0 || n * p > 52 {
        return Err(Error::Domain(format!("precision {p} outside 1..={}", 52 / n)));
    }
    Ok(())
}

/// First `p` binary digits of `x ∈ [0,1]`, with `1` read as `0.111…`.
fn digits(x: f64, p: usize) -> u64 {
    let scale = (1u64 << p) as f64;
    ((x * scale).floor() as u64).min((1u64 << p) - 1)
}

/// Deal the round-robin stream of the first `p` digits of each input
/// coordinate round-robin onto `m` output coordinates.
///
/// Discontinuous across the dyadic mesh; see [`interleave_modulus`] for
/// what is claimed off it.
pub fn interleave_map(x: &[f64], m: usize, p: usize) -> Result<Vec<f64>> {
    let n = x.len();
    check_interleave(n, m, p)?;
    if let Some(bad) = x.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::Domain(format!("coordinate {bad} outside [0,1]")));
    }
    let words: Vec<u64> = x.iter().map(|&v| digits(v, p)).collect();
    let mut out = vec![0.0; m];
    let mut weight = vec![0.5; m];
    for s in 0..n * p {
        let (j, i) = (s / n, s % n);
        let bit = (words[i] >> (p - 1 - j)) & 1;
        let o = s % m;
        if bit == 1 {
            out[o] += weight[o];
        }
        weight[o] *= 0.5;
    }
    Ok(out)
}

/// Cells of the `2^{-⌊np/m⌋}` output grid hit by the images of all
/// `2^{np}` input grid corners, as a count out of the full grid.
pub fn interleave_cell_coverage(n: usize, m: usize, p: usize) -> Result<(usize, usize)> {
    check_interleave(n, m, p)?;
    if n * p > 24 {
        return Err(Error::Domain("too many inputs to enumerate".into()));
    }
    let res = n * p / m;
    let side = 1usize << res;
    let mut hit = vec![false; side.pow(m as u32)];
    let inputs = 1usize << p;
    for code in 0..inputs.pow(n as u32) {
        let x: Vec<f64> = (0..n)
            .map(|i| ((code / inputs.pow(i as u32)) % inputs) as f64 / inputs as f64)
            .collect();
        let y = interleave_map(&x, m, p)?;
        let cell = y.iter().rev().fold(0, |acc, &v| {
            acc * side + ((v * side as f64).floor() as usize).min(side - 1)
        });
        hit[cell] = true;
    }
    Ok((hit.iter().filter(|&&h| h).count(), hit.len()))
}

/// Cells of the `2^-order` grid holding a curve vertex.
pub fn hilbert_cell_coverage(m: usize, order: u32) -> Result<(usize, usize)> {
    let cells = hilbert_cells(m, order)?;
    let side = 1usize << order;
    let mut hit = vec![false; side.pow(m as u32)];
    for c in &cells {
        let idx = c.iter().rev().fold(0, |acc, &v| acc * side + v as usize);
        hit[idx] = true;
    }
    Ok((hit.iter().filter(|&&h| h).count(), hit.len()))
}

/// Consecutive vertices differ by one in exactly one axis.
pub fn hilbert_adjacent(m: usize, order: u32) -> Result<bool> {
    let cells = hilbert_cells(m, order)?;
    Ok(cells.windows(2).all(|w| {
        let steps: u32 = w[0].iter().zip(&w[1]).map(|(a, b)| a.abs_diff(*b)).sum();
        steps == 1
    }))
}

fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Seeded parameter pairs with log-uniform separation between one polygon
/// edge and 1, and their `(|t − s|, |H(t) − H(s)|_∞)` distances.
pub fn hilbert_pairs(m: usize, order: u32, count: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    check_hilbert(m, order)?;
    let mut rng = seeded_rng(seed);
    let edge = 1.0 / ((1u128 << (m * order as usize)) - 1) as f64;
    let low = edge.log10();
    let mut pairs = Vec::with_capacity(count);
    while pairs.len() < count {
        let gap = 10f64.powf(rng.gen_range(low..0.0));
        if gap >= 1.0 {
            continue;
        }
        let t = rng.gen_range(0.0..1.0 - gap);
        let a = hilbert_curve(m, order, t)?;
        let b = hilbert_curve(m, order, t + gap)?;
        pairs.push((gap, sup_dist(&a, &b)));
    }
    Ok(pairs)
}

pub fn hilbert_modulus(m: usize, order: u32, count: usize, seed: u64) -> Result<ModulusFit> {
    modulus_fit(&hilbert_pairs(m, order, count, seed)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterleaveModulus {
    pub sampled: usize,
    /// Pairs with `d_in ≥ 2^{-(L+1)}`, `L` the common digit prefix.
    pub checked: usize,
    pub violations: usize,
    /// Largest `d_out / d_in^{1/m}` over checked pairs.
    pub max_ratio: f64,
}

/// Check `|F(x) − F(y)|_∞ ≤ 2 |x − y|^{1/m}` for `n = 1` on seeded pairs
/// that do not straddle the dyadic mesh at their own scale.
pub fn interleave_modulus(m: usize, p: usize, count: usize, seed: u64) -> Result<InterleaveModulus> {
    check_interleave(1, m, p)?;
    let mut rng = seeded_rng(seed);
    let mut report = InterleaveModulus {
        sampled: count,
        checked: 0,
        violations: 0,
        max_ratio: 0.0,
    };
    for _ in 0..count {
        let x: f64 = rng.gen();
        let y = (x + rng.gen_range(-1.0..1.0) * 10f64.powf(-rng.gen_range(0.0..(p as f64 * 0.3)))).clamp(0.0, 1.0);
        let (dx, dy) = (digits(x, p), digits(y, p));
        let common = ((dx ^ dy) << (64 - p)).leading_zeros().min(p as u32) as i32;
        let d_in = (x - y).abs();
        if d_in == 0.0 || d_in < 2f64.powi(-(common + 1)) {
            continue;
        }
        report.checked += 1;
        let d_out = sup_dist(&interleave_map(&[x], m, p)?, &interleave_map(&[y], m, p)?);
        let ratio = d_out / d_in.powf(1.0 / m as f64);
        report.max_ratio = report.max_ratio.max(ratio);
        if ratio > 2.0 {
            report.violations += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_one_square() {
        let cells: Vec<Vec<u32>> = (0..4).map(|i| hilbert_cell(2, 1, i)).collect();
        assert_eq!(cells, vec![vec![0, 0], vec![0, 1], vec![1, 1], vec![1, 0]]);
        assert_eq!(hilbert_curve(2, 3, 0.0).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn order_two_square_by_hand() {
        // the order-2 curve: four rotated copies of the order-1 "U"
        let want = [
            (0, 0), (1, 0), (1, 1), (0, 1), (0, 2), (0, 3), (1, 3), (1, 2),
            (2, 2), (2, 3), (3, 3), (3, 2), (3, 1), (2, 1), (2, 0), (3, 0),
        ];
        let got: Vec<(u32, u32)> = (0..16)
            .map(|i| {
                let c = hilbert_cell(2, 2, i);
                (c[0], c[1])
            })
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn cells_and_adjacency() {
        for (m, p) in [(2, 6), (3, 4), (4, 2)] {
            let (hit, total) = hilbert_cell_coverage(m, p).unwrap();
            assert_eq!(hit, total);
            assert!(hilbert_adjacent(m, p).unwrap());
        }
    }

    #[test]
    fn curve_endpoints_and_domain() {
        let end = hilbert_curve(2, 4, 1.0).unwrap();
        assert_eq!(end, vec![15.0 / 16.0, 0.0]);
        assert!(hilbert_curve(1, 4, 0.5).is_err());
        assert!(hilbert_curve(2, 21, 0.5).is_err());
        assert!(hilbert_curve(2, 4, 1.5).is_err());
    }

    #[test]
    fn interleave_hand_example() {
        assert_eq!(interleave_map(&[0.6875], 2, 4).unwrap(), vec![0.75, 0.25]);
        assert_eq!(interleave_map(&[1.0], 2, 4).unwrap(), vec![0.75, 0.75]);
        assert!(interleave_map(&[0.1, 0.2, 0.3], 2, 4).is_err());
        assert!(interleave_map(&[0.1], 2, 53).is_err());
    }

    #[test]
    fn square_interleave_permutes_the_grid() {
        let (hit, total) = interleave_cell_coverage(2, 2, 4).unwrap();
        assert_eq!((hit, total), (256, 256));
        let (hit, total) = interleave_cell_coverage(1, 2, 8).unwrap();
        assert_eq!((hit, total), (256, 256));
    }

    #[test]
    fn interleave_modulus_off_the_mesh() {
        let r = interleave_modulus(2, 40, 5000, 1).unwrap();
        assert!(r.checked > 1000);
        assert_eq!(r.violations, 0);
    }
}
