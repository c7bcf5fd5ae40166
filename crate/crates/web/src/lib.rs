//! Browser bindings for three views: a Hilbert curve, an IFS attractor with
//! its box-counting estimate, and the nested intervals of one Cantor factor.
//!
//! Every export returns flat `f64` arrays so the page can draw them without
//! decoding; errors surface as JS exceptions carrying the library message.

use metrifract::cantor::{build_system, parse_rational};
use metrifract::curves::{hilbert_cells, MAX_ORDER};
use metrifract::schedule::{GSpec, SlowSchedule};
use metrifract::selfsimilar::{attractor_points, box_dimension, dyadic_radii, moran_dimension, Ifs};
use wasm_bindgen::prelude::*;

/// Largest attractor sample the page may request.
pub const MAX_POINTS: usize = 1 << 18;

fn js(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Cell centers of the planar Hilbert curve, `x0, y0, x1, y1, ...` in `[0,1]`.
pub fn hilbert_polyline_inner(order: u32) -> Result<Vec<f64>, String> {
    if order == 0 || order > MAX_ORDER.min(10) {
        return Err(format!("order {order} outside 1..=10"));
    }
    let side = (1u32 << order) as f64;
    let cells = hilbert_cells(2, order).map_err(|e| e.to_string())?;
    Ok(cells
        .iter()
        .flat_map(|c| c.iter().map(move |&v| (v as f64 + 0.5) / side))
        .collect())
}

fn preset(name: &str) -> Result<Ifs, String> {
    match name {
        "cantor" => Ok(Ifs::cantor_ternary()),
        "sierpinski" => Ok(Ifs::sierpinski()),
        "square" => Ifs::cube(2).map_err(|e| e.to_string()),
        other => Err(format!("unknown preset `{other}`")),
    }
}

/// Attractor sample as `x, y` pairs (y = 0 for the line), followed by three
/// numbers: similarity dimension, box-counting slope, point count.
pub fn attractor_inner(name: &str, depth: usize) -> Result<Vec<f64>, String> {
    let ifs = preset(name)?;
    let count = ifs.maps.len().checked_pow(depth as u32).unwrap_or(usize::MAX);
    if count > MAX_POINTS {
        return Err(format!("{count} points exceed the page budget of {MAX_POINTS}"));
    }
    let sample = attractor_points(&ifs, depth).map_err(|e| e.to_string())?;
    let hi = (depth as u32).clamp(3, 9);
    let slope = box_dimension(&sample.points, &dyadic_radii(1, hi))
        .map_err(|e| e.to_string())?
        .slope;
    let mut out = Vec::with_capacity(2 * sample.points.len() + 3);
    for p in &sample.points {
        out.push(p[0]);
        out.push(p.get(1).copied().unwrap_or(0.0));
    }
    out.extend([moran_dimension(&ifs), slope, sample.points.len() as f64]);
    Ok(out)
}

/// Level-by-level intervals of the first coordinate of block `n`:
/// `level, left, right` triples for levels `0..=depth`.
pub fn cantor_intervals_inner(epsilon: &str, g: &str, n: usize, depth: usize) -> Result<Vec<f64>, String> {
    if depth > 10 {
        return Err(format!("depth {depth} outside 0..=10"));
    }
    let eps = parse_rational(epsilon).map_err(|e| e.to_string())?;
    let spec: GSpec = g.parse().map_err(|e: metrifract::Error| e.to_string())?;
    let sched = SlowSchedule::new(spec, n).map_err(|e| e.to_string())?;
    if sched.g(n) == 0 {
        return Err(format!("block {n} has no coordinates"));
    }
    let k = sched.block(n).start;
    let sys = build_system(eps, sched, depth.max(1)).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    for level in 0..=depth {
        for word in 0..1u32 << level {
            let digits: Vec<bool> = (0..level).map(|i| (word >> (level - 1 - i)) & 1 == 1).collect();
            let (lo, hi) = sys.interval(k, &digits).map_err(|e| e.to_string())?;
            out.extend([level as f64, to_f64(&lo), to_f64(&hi)]);
        }
    }
    Ok(out)
}

fn to_f64(r: &num_rational::BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

#[wasm_bindgen]
pub fn hilbert_polyline(order: u32) -> Result<Vec<f64>, JsValue> {
    hilbert_polyline_inner(order).map_err(js)
}

#[wasm_bindgen]
pub fn attractor(name: &str, depth: usize) -> Result<Vec<f64>, JsValue> {
    attractor_inner(name, depth).map_err(js)
}

#[wasm_bindgen]
pub fn cantor_intervals(epsilon: &str, g: &str, n: usize, depth: usize) -> Result<Vec<f64>, JsValue> {
    cantor_intervals_inner(epsilon, g, n, depth).map_err(js)
}
