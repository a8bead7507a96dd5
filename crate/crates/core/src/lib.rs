//! Cartography for directed labeled graphs.
//!
//! A *region* is a [`LabeledGraph`]. Given a set of distinguished nodes of
//! the region, the *good map* is the graph on those nodes with an edge
//! `x -> y` exactly when the region has a path from `x` to `y` that passes
//! through no other distinguished node. Good maps over one region form a
//! Boolean algebra isomorphic to the powerset of its nodes ([`algebra`]).
//! Regions themselves are cut out of larger graphs with navigational
//! expressions ([`navlang`]).

pub mod algebra;
pub mod cli;
pub mod dot;
mod error;
pub mod graph;
pub mod mapper;
pub mod navlang;
mod reach;

pub use error::{Error, Result};
pub use graph::{
    fingerprint, load_graph, load_graph_files, load_graph_str, reachable_avoiding,
    topological_order, Adjacency, Edge, GraphBuilder, Host, LabeledGraph, NodeId, RegionId,
};
pub use mapper::{
    check, good_map, good_map_dag, good_map_general, is_complete, is_good, is_map,
    is_non_redundant, is_route_complete, k_map, score_nodes, Goodness, Map, ScoreFn, ScoreTable,
    Verdict,
};
