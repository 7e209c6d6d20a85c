//! Exact kneading determinants, zeta functions and entropy estimates for
//! piecewise monotone maps of intervals and graphs.

#![allow(clippy::result_large_err, clippy::needless_range_loop)]

pub mod census;
pub mod chain;
pub mod cli_harness;
pub mod finite_rank;
pub mod graph_topology;
pub mod kneading;
pub mod linalg;
pub mod pm_domain;
pub mod rational;
pub mod roots;
pub mod series_ring;
pub mod spectra;
