//! Expression evaluation over the product of the region and the automaton.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use super::ast::NavExpression;
use super::automaton::{compile, Automaton, Guard};
use crate::error::{Error, Result};
use crate::graph::{LabeledGraph, NodeId};
use crate::mapper::{good_map, k_map, score_nodes, Map, ScoreFn};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Semantics {
    /// Keep every edge traversed while evaluating.
    Visited,
    /// Keep only edges on some traversal that ends in a selected node.
    Successful,
}

impl FromStr for Semantics {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "visited" => Ok(Semantics::Visited),
            "successful" => Ok(Semantics::Successful),
            other => Err(format!(
                "unknown semantics `{other}` (expected visited or successful)"
            )),
        }
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantics::Visited => "visited",
            Semantics::Successful => "successful",
        })
    }
}

#[derive(Clone, Debug)]
pub struct RegionResult {
    /// Subgraph of the evaluated graph; always contains the seed.
    pub region: LabeledGraph,
    pub selected: BTreeSet<NodeId>,
    pub seed: NodeId,
    pub semantics: Semantics,
}

/// One product transition; `edge` is the consumed graph edge, if any.
struct Move {
    from: usize,
    to: usize,
    edge: Option<usize>,
}

/// Exhaustive forward search over `(graph node, automaton state)` pairs.
struct Product {
    states: Vec<(usize, usize)>,
    moves: Vec<Move>,
}

impl Product {
    fn explore(g: &LabeledGraph, nfa: &Automaton, seed: usize) -> Self {
        let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut states = vec![(seed, nfa.start())];
        ids.insert((seed, nfa.start()), 0);
        let mut moves = Vec::new();
        let mut head = 0;
        while head < states.len() {
            let here = head;
            let (v, q) = states[head];
            head += 1;
            let node = &g.nodes()[v];
            let mut step = |target: (usize, usize), edge: Option<usize>| {
                let next = *ids.entry(target).or_insert_with(|| {
                    states.push(target);
                    states.len() - 1
                });
                moves.push(Move {
                    from: here,
                    to: next,
                    edge,
                });
            };
            for t in nfa.outgoing(q) {
                match &t.guard {
                    Guard::Epsilon => step((v, t.to), None),
                    Guard::NodeCheck(key, value) => {
                        if g.attr(node.as_str(), key) == Some(value.as_str()) {
                            step((v, t.to), None);
                        }
                    }
                    Guard::EdgeLabel(label) => {
                        for &eid in g.out_edge_ids(v) {
                            if g.edges()[eid].label == *label {
                                step((g.edge_ends(eid).1, t.to), Some(eid));
                            }
                        }
                    }
                    Guard::AnyEdge => {
                        for &eid in g.out_edge_ids(v) {
                            step((g.edge_ends(eid).1, t.to), Some(eid));
                        }
                    }
                }
            }
        }
        Product { states, moves }
    }

    /// Product states from which an accepting state is reachable.
    fn co_reachable(&self, nfa: &Automaton) -> Vec<bool> {
        let mut back: Vec<Vec<usize>> = vec![Vec::new(); self.states.len()];
        for m in &self.moves {
            back[m.to].push(m.from);
        }
        let mut live = vec![false; self.states.len()];
        let mut stack: Vec<usize> = (0..self.states.len())
            .filter(|&p| nfa.is_accepting(self.states[p].1))
            .collect();
        for &p in &stack {
            live[p] = true;
        }
        while let Some(p) = stack.pop() {
            for &prev in &back[p] {
                if !live[prev] {
                    live[prev] = true;
                    stack.push(prev);
                }
            }
        }
        live
    }
}

/// Evaluates `e` from `seed`. The selected nodes are those reached in an
/// accepting automaton state, under either semantics.
pub fn evaluate(
    g: &LabeledGraph,
    seed: &NodeId,
    e: &NavExpression,
    semantics: Semantics,
) -> Result<RegionResult> {
    let seed_idx = g
        .adjacency()
        .index_of(seed.as_str())
        .ok_or_else(|| Error::UnknownNode(seed.clone()))?;
    let nfa = compile(e);
    let product = Product::explore(g, &nfa, seed_idx);

    let selected: BTreeSet<NodeId> = product
        .states
        .iter()
        .filter(|&&(_, q)| nfa.is_accepting(q))
        .map(|&(v, _)| g.nodes()[v].clone())
        .collect();

    let edges: BTreeSet<usize> = match semantics {
        Semantics::Visited => product.moves.iter().filter_map(|m| m.edge).collect(),
        Semantics::Successful => {
            // Every explored state is reachable from the start, so a move
            // into a live state lies on some start-to-accepting path.
            let live = product.co_reachable(&nfa);
            product
                .moves
                .iter()
                .filter(|m| live[m.to])
                .filter_map(|m| m.edge)
                .collect()
        }
    };

    Ok(RegionResult {
        region: g.subgraph(edges, [seed]),
        selected,
        seed: seed.clone(),
        semantics,
    })
}

/// Optional k-map zoom for [`region_and_map`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Zoom {
    pub score: ScoreFn,
    pub k: f64,
}

/// Specify, extract, map: evaluates the expression, then draws the good map
/// of the region over the selected nodes plus the seed. With a zoom, draws
/// the region's k-map instead.
pub fn region_and_map(
    g: &LabeledGraph,
    seed: &NodeId,
    e: &NavExpression,
    semantics: Semantics,
    zoom: Option<Zoom>,
) -> Result<(RegionResult, Map)> {
    let result = evaluate(g, seed, e, semantics)?;
    let map = match zoom {
        None => {
            let mut distinguished = result.selected.clone();
            distinguished.insert(seed.clone());
            good_map(&result.region, &distinguished)?
        }
        Some(Zoom { score, k }) => {
            let scores = score_nodes(&result.region, score);
            k_map(&result.region, &scores, k)?
        }
    };
    Ok((result, map))
}
