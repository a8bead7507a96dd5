//! The Boolean algebra of good maps over one fixed region.
//!
//! Maps are ordered by inclusion of their node sets. Join and complement are
//! computed from scratch on the region; meet needs only the two maps.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{Host, LabeledGraph, NodeId};
use crate::mapper::{good_map, restricted_pairs, Map};

fn same_region(m1: &Map, m2: &Map) -> Result<()> {
    if m1.region() != m2.region() {
        return Err(Error::RegionMismatch {
            expected: m1.region().clone(),
            found: m2.region().clone(),
        });
    }
    Ok(())
}

fn on_region(m: &Map, g: &LabeledGraph) -> Result<()> {
    if m.region() != g.region_id() {
        return Err(Error::RegionMismatch {
            expected: g.region_id().clone(),
            found: m.region().clone(),
        });
    }
    Ok(())
}

/// `m1 ⊑ m2` iff the node set of `m1` is contained in that of `m2`.
pub fn leq(m1: &Map, m2: &Map) -> Result<bool> {
    same_region(m1, m2)?;
    Ok(m1.nodes().is_subset(m2.nodes()))
}

/// The graph on `S` with an edge `x -> y` whenever the host has a path from
/// `x` to `y` avoiding intermediate members of `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictedClosure {
    pub nodes: BTreeSet<NodeId>,
    pub edges: BTreeSet<(NodeId, NodeId)>,
}

pub fn restricted_closure<H: Host + ?Sized>(
    host: &H,
    s: &BTreeSet<NodeId>,
) -> Result<RestrictedClosure> {
    let adj = host.host_adjacency();
    let mask = adj.mask(s)?;
    let edges = restricted_pairs(&adj, &mask)
        .into_iter()
        .map(|(x, y)| (adj.ids()[x].clone(), adj.ids()[y].clone()))
        .collect();
    Ok(RestrictedClosure {
        nodes: s.clone(),
        edges,
    })
}

/// Good map over the union of the node sets.
pub fn join(m1: &Map, m2: &Map, g: &LabeledGraph) -> Result<Map> {
    on_region(m1, g)?;
    on_region(m2, g)?;
    let union: BTreeSet<NodeId> = m1.nodes().union(m2.nodes()).cloned().collect();
    good_map(g, &union)
}

/// Meet of two good maps, computed from the maps alone: with `S` the shared
/// nodes, the union of the restricted closures of `S` over each map.
///
/// Runs one restricted traversal per node of `S` in each map. Inputs must
/// carry verified goodness flags; see [`Map::verify`].
pub fn meet_from_maps(m1: &Map, m2: &Map) -> Result<Map> {
    same_region(m1, m2)?;
    for m in [m1, m2] {
        if !m.goodness().is_good() {
            return Err(Error::NotGood(m.region().clone()));
        }
    }
    let shared: BTreeSet<NodeId> = m1.nodes().intersection(m2.nodes()).cloned().collect();
    let (c1, c2) = rayon::join(
        || restricted_closure(m1, &shared),
        || restricted_closure(m2, &shared),
    );
    let mut edges = c1?.edges;
    edges.extend(c2?.edges);
    Ok(Map::good_unchecked(m1.region().clone(), shared, edges))
}

/// Good map over the region nodes missing from `m`.
pub fn complement(m: &Map, g: &LabeledGraph) -> Result<Map> {
    on_region(m, g)?;
    let rest: BTreeSet<NodeId> = g
        .nodes()
        .iter()
        .filter(|n| !m.nodes().contains(*n))
        .cloned()
        .collect();
    good_map(g, &rest)
}

/// Greatest element: the good map over every region node.
pub fn top(g: &LabeledGraph) -> Map {
    good_map(g, &g.nodes().iter().cloned().collect()).expect("all nodes belong to the region")
}

pub fn bottom(g: &LabeledGraph) -> Map {
    Map::empty(g.region_id().clone())
}

/// Which part of the join edge bound admitted an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundClause {
    /// Edge of the first map.
    FirstMap,
    /// Edge of the second map.
    SecondMap,
    /// Region edge from a node of the first map to a node of the second.
    RegionEdgeForward,
    /// Region edge from a node of the second map to a node of the first.
    RegionEdgeBackward,
    /// `x ~> y` avoiding all joined nodes, `x` in the first map, `y` in the second.
    CrossPathForward,
    /// Same, with `x` in the second map and `y` in the first.
    CrossPathBackward,
}

/// Outcome of checking the join edge bound. `uncovered` is empty iff the
/// bound holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinBoundReport {
    pub join: Map,
    pub covered: Vec<((NodeId, NodeId), BoundClause)>,
    pub uncovered: Vec<(NodeId, NodeId)>,
}

impl JoinBoundReport {
    pub fn holds(&self) -> bool {
        self.uncovered.is_empty()
    }
}

/// Checks that every edge of `join(m1, m2, g)` lies in the union of both
/// maps' edges, the region edges between the two node sets, and the cross
/// pairs connected by a path avoiding intermediate joined nodes. Records the
/// first clause (in [`BoundClause`] order) covering each edge.
pub fn join_edge_bound(m1: &Map, m2: &Map, g: &LabeledGraph) -> Result<JoinBoundReport> {
    let joined = join(m1, m2, g)?;
    let v1 = m1.nodes();
    let v2 = m2.nodes();
    let region_edges: BTreeSet<(&str, &str)> = g
        .edges()
        .iter()
        .map(|e| (e.src.as_str(), e.dst.as_str()))
        .collect();
    // The join's edges are exactly the pairs connected avoiding its nodes.
    let avoiding = &joined;

    let mut covered = Vec::new();
    let mut uncovered = Vec::new();
    for (x, y) in joined.edges() {
        let pair = (x.clone(), y.clone());
        let direct = region_edges.contains(&(x.as_str(), y.as_str()));
        let connected = avoiding.edges().contains(&pair);
        let clause = if m1.edges().contains(&pair) {
            Some(BoundClause::FirstMap)
        } else if m2.edges().contains(&pair) {
            Some(BoundClause::SecondMap)
        } else if direct && v1.contains(x) && v2.contains(y) {
            Some(BoundClause::RegionEdgeForward)
        } else if direct && v2.contains(x) && v1.contains(y) {
            Some(BoundClause::RegionEdgeBackward)
        } else if connected && v1.contains(x) && v2.contains(y) {
            Some(BoundClause::CrossPathForward)
        } else if connected && v2.contains(x) && v1.contains(y) {
            Some(BoundClause::CrossPathBackward)
        } else {
            None
        };
        match clause {
            Some(c) => covered.push((pair, c)),
            None => uncovered.push(pair),
        }
    }
    Ok(JoinBoundReport {
        join: joined,
        covered,
        uncovered,
    })
}

pub fn join_edge_bound_holds(m1: &Map, m2: &Map, g: &LabeledGraph) -> Result<bool> {
    Ok(join_edge_bound(m1, m2, g)?.holds())
}
