//! Modeling and verification toolkit for single-source single-sink
//! cooperative relay networks: amplify-and-forward protocol channel
//! matrices built symbolically, exact piecewise-linear DMT calculus,
//! min-cut/structural-rank network extreme points with a finite-field
//! deterministic lift, and Monte Carlo outage simulation.

#![forbid(unsafe_code)]

pub mod detlift;
pub mod dmt;
pub mod mc;
pub mod net;
pub mod poly;
pub mod proto;
pub mod rat;
