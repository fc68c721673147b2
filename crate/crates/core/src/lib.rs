//! Gathering trees with a data MULE on unit disk graphs.
//!
//! The pipeline reduces the tree problem to a node-weighted connected
//! dominating set, solves that with two primal-dual phases that also yield
//! a dual lower bound, and turns the result into a rooted gathering tree.
//! Brute-force oracles cover small instances.

pub mod error;
pub mod geom_graph;
pub mod oracles;
pub mod primal_dual;
pub mod sim;
pub mod tour_cost;
pub mod tree_builder;
pub mod verify;

pub use error::{Error, Result};
pub use geom_graph::{generate_random_udg, make_graph, GenParams, Point, UnitDiskGraph};
pub use primal_dual::{build_cds, build_ids, NodeWeights, PdResult};
pub use tour_cost::{solution_cost, GatheringTree};
pub use tree_builder::{build_gathering_tree, build_gathering_tree_with, MuleParams, MulePolicy, MuleSolution};
