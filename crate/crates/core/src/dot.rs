//! Graphviz export. Distinguished nodes are double circles, map edges are
//! solid, region edges not covered by the map are gray.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::graph::{LabeledGraph, NodeId};
use crate::mapper::Map;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn to_dot(region: &LabeledGraph, map: Option<&Map>) -> String {
    let mut out = String::from("digraph region {\n");
    let distinguished: BTreeSet<&NodeId> =
        map.map(|m| m.nodes().iter().collect()).unwrap_or_default();
    let mut nodes: BTreeSet<&NodeId> = region.nodes().iter().collect();
    nodes.extend(distinguished.iter().copied());
    for n in nodes {
        if distinguished.contains(n) {
            writeln!(out, "  {} [shape=doublecircle];", quote(n.as_str())).unwrap();
        } else {
            writeln!(out, "  {};", quote(n.as_str())).unwrap();
        }
    }
    let map_edges: BTreeSet<(&str, &str)> = map
        .map(|m| {
            m.edges()
                .iter()
                .map(|(x, y)| (x.as_str(), y.as_str()))
                .collect()
        })
        .unwrap_or_default();
    for e in region.edges() {
        if map_edges.contains(&(e.src.as_str(), e.dst.as_str())) {
            continue;
        }
        let style = if map.is_some() {
            ", color=gray, fontcolor=gray"
        } else {
            ""
        };
        writeln!(
            out,
            "  {} -> {} [label={}{style}];",
            quote(e.src.as_str()),
            quote(e.dst.as_str()),
            quote(&e.label)
        )
        .unwrap();
    }
    for (x, y) in map_edges {
        writeln!(out, "  {} -> {} [style=solid];", quote(x), quote(y)).unwrap();
    }
    out.push_str("}\n");
    out
}
