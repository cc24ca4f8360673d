//! Curvature measures for networks and the anomaly-detection problems built on them.
//!
//! Two families of curvature are provided: Gromov hyperbolicity (slim triangles
//! and the four-point condition) and geometric curvature counting short cycles.
//! On top of these sit the extremal problem (push curvature past a target by
//! deleting edges from a prescribed set) and the targeted one (match the
//! curvature of a given subgraph), reduction gadgets, and a snapshot scanner.

pub mod cycles;
pub mod eadp;
pub mod error;
pub mod flow;
pub mod gadgets;
pub mod graph;
pub mod gromov;
pub mod lp;
pub mod measure;
pub mod random;
pub mod scan;
pub mod tadp;

pub use cycles::{
    curvature_after_deletion, enumerate_cycles, euler_characteristic, geometric_curvature, CurvatureValue,
    CycleCatalog, DeletionCurvature,
};
pub use eadp::{Direction, EadpInstance, EadpOutcome, OutcomeKind};
pub use error::{Error, Result};
pub use flow::{densest_subgraph, max_flow, Capacity, DensestSubgraph, FlowNetwork};
pub use gadgets::{GadgetInstance, GadgetOutput};
pub use graph::{parse_edge_list, EdgeSet, Graph};
pub use gromov::{
    four_point_hyperbolicity, slim_hyperbolicity, Aggregation, GeodesicChoice, SlimOptions, SlimnessResult,
};
pub use measure::{parse_ratio, ratio_string, Measure};
pub use num_rational::Rational64;
pub use scan::{scan, ScanOptions, ScanReport, SnapshotSeries};
pub use tadp::{TadpInstance, TadpOutcome};
