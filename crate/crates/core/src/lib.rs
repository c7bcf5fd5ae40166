//! Finite-scale metric geometry.
//!
//! The crate realizes, on concrete finite data, the constructions that turn a
//! non-exploding metric space into a bi-Lipschitz copy inside a weighted torus,
//! find large nearly ultrametric Cantor systems there, and push ultrametric
//! structure onto cubes and self-similar sets through gauges, McShane
//! extension and space-filling curves. Every quantitative inequality behind
//! those constructions has a checker that re-proves it on the data at hand.
//!
//! Module map:
//!
//! * [`metric`] – point clouds, circle/torus/code metrics, ultrametric trees
//! * [`schedule`] – slow sequences `G` and their coordinate blocks
//! * [`covering`] – separated nets, greedy covers, the non-exploding profile
//! * [`embedding`] – the scale-by-scale colored embedding into the torus
//! * [`cantor`] – exact-rational Cantor systems, coding map, shift fitting
//! * [`gauge`] – Hausdorff functions, `ord`, the hat transform, remetrization
//! * [`holder`] – modulus fitting and McShane extension
//! * [`curves`] – Hilbert curves and digit interleaving
//! * [`pipeline`] – the end-to-end map of a cloud onto a cube
//! * [`selfsimilar`] – IFS, similarity dimension, attractors, box counting

pub mod cantor;
pub mod covering;
pub mod curves;
pub mod embedding;
pub mod error;
pub mod gauge;
pub mod holder;
pub mod metric;
pub mod pipeline;
pub mod schedule;
pub mod selfsimilar;

mod rng;

pub use error::{Error, Result};
pub use rng::seeded_rng;
