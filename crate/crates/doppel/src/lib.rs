//! Scene-graph disambiguation and geo-verification toolkit for
//! structure-from-motion pipelines.

pub mod geom;
pub mod graph;
pub mod mine;
