//! The region model: a directed multigraph with labeled edges and per-node
//! attribute bags, plus the reachability primitives the map constructions
//! are built on.
//!
//! Labels and attributes are carried for the navigational language only.
//! Every reachability question asked here ignores labels, and parallel
//! edges between the same pair of nodes collapse into a single adjacency.

use std::borrow::{Borrow, Cow};
use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::reach::Traversal;

/// Opaque node identifier. Compared by exact string equality.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(String);

impl NodeId {
    /// Validates that `id` is usable in the tab-separated file formats.
    pub fn new(id: impl Into<String>) -> Result<Self, String> {
        let id = id.into();
        if id.is_empty() {
            return Err("node id is empty".to_owned());
        }
        if id.contains(['\t', '\n', '\r']) {
            return Err(format!("node id {id:?} contains a tab or line break"));
        }
        Ok(NodeId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

impl Borrow<str> for NodeId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// SHA-256 digest of a region's canonical serialization, as lowercase hex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RegionId(String);

impl RegionId {
    pub fn of_bytes(bytes: &[u8]) -> Self {
        let digest = Sha256::digest(bytes);
        let mut hex = String::with_capacity(64);
        for byte in digest {
            hex.push_str(&format!("{byte:02x}"));
        }
        RegionId(hex)
    }

    /// Accepts a 64-digit lowercase hex string, as written in map files.
    pub fn parse(hex: &str) -> Option<Self> {
        let ok = hex.len() == 64
            && hex
                .bytes()
                .all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b));
        ok.then(|| RegionId(hex.to_owned()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub src: NodeId,
    pub label: String,
    pub dst: NodeId,
}

impl Edge {
    pub fn new(src: impl Into<NodeId>, label: impl Into<String>, dst: impl Into<NodeId>) -> Self {
        Edge {
            src: src.into(),
            label: label.into(),
            dst: dst.into(),
        }
    }
}

/// Index-based view of a digraph with collapsed, label-free adjacency.
///
/// Node `i` is `ids()[i]`; ids are sorted, so indices follow lexicographic
/// id order. Successor lists are sorted and free of duplicates, and stored
/// back to back in one array.
#[derive(Clone, Debug, Default)]
pub struct Adjacency {
    ids: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Adjacency {
    pub fn from_pairs<'a>(
        nodes: impl IntoIterator<Item = &'a NodeId>,
        pairs: impl IntoIterator<Item = (&'a NodeId, &'a NodeId)>,
    ) -> Self {
        let ids: Vec<NodeId> = nodes
            .into_iter()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: HashMap<NodeId, usize> = ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i))
            .collect();
        let mut succ = vec![Vec::new(); ids.len()];
        for (src, dst) in pairs {
            let (s, d) = (index[src], index[dst]);
            succ[s].push(d);
        }
        for list in &mut succ {
            list.sort_unstable();
            list.dedup();
        }
        Self::from_lists(ids, index, succ)
    }

    fn from_lists(ids: Vec<NodeId>, index: HashMap<NodeId, usize>, succ: Vec<Vec<usize>>) -> Self {
        let mut offsets = Vec::with_capacity(succ.len() + 1);
        offsets.push(0);
        let mut targets = Vec::with_capacity(succ.iter().map(Vec::len).sum());
        for list in succ {
            targets.extend(list);
            offsets.push(targets.len());
        }
        Adjacency {
            ids,
            index,
            offsets,
            targets,
        }
    }

    /// Adjacency over indices `0..succ.len()` named by their decimal index.
    #[cfg(test)]
    pub(crate) fn from_indices(succ: Vec<Vec<usize>>) -> Self {
        let ids: Vec<NodeId> = (0..succ.len())
            .map(|i| NodeId::from(i.to_string()))
            .collect();
        let index = ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i))
            .collect();
        Self::from_lists(ids, index, succ)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    /// Membership mask over this adjacency's indices. Fails on the first id
    /// that is not a node.
    pub fn mask<'a>(&self, members: impl IntoIterator<Item = &'a NodeId>) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.len()];
        for id in members {
            let i = self
                .index_of(id.as_str())
                .ok_or_else(|| Error::UnknownNode(id.clone()))?;
            mask[i] = true;
        }
        Ok(mask)
    }

    /// Topological order of the indices, smallest ready index first, or one
    /// directed cycle as a closed index walk `[v0, v1, ..., v0]`.
    pub(crate) fn topo_order(&self) -> std::result::Result<Vec<usize>, Vec<usize>> {
        self.kahn(true)
    }

    /// Like [`Adjacency::topo_order`] but in linear time, with no
    /// guarantee on which valid order is returned.
    pub(crate) fn any_topo_order(&self) -> std::result::Result<Vec<usize>, Vec<usize>> {
        self.kahn(false)
    }

    fn kahn(&self, smallest_first: bool) -> std::result::Result<Vec<usize>, Vec<usize>> {
        let n = self.len();
        let mut indegree = vec![0usize; n];
        for &w in &self.targets {
            indegree[w] += 1;
        }
        let mut order = Vec::with_capacity(n);
        let roots = (0..n).filter(|&v| indegree[v] == 0);
        if smallest_first {
            let mut ready: BinaryHeap<Reverse<usize>> = roots.map(Reverse).collect();
            while let Some(Reverse(v)) = ready.pop() {
                order.push(v);
                for &w in self.successors(v) {
                    indegree[w] -= 1;
                    if indegree[w] == 0 {
                        ready.push(Reverse(w));
                    }
                }
            }
        } else {
            let mut ready: Vec<usize> = roots.collect();
            while let Some(v) = ready.pop() {
                order.push(v);
                for &w in self.successors(v) {
                    indegree[w] -= 1;
                    if indegree[w] == 0 {
                        ready.push(w);
                    }
                }
            }
        }
        if order.len() == n {
            return Ok(order);
        }
        // Every leftover node has a leftover predecessor, so walking leftover
        // predecessors from any of them must revisit a node.
        let leftover: Vec<bool> = indegree.iter().map(|&d| d > 0).collect();
        let mut pred = vec![usize::MAX; n];
        for u in (0..n).filter(|&u| leftover[u]) {
            for &w in self.successors(u) {
                if leftover[w] && pred[w] == usize::MAX {
                    pred[w] = u;
                }
            }
        }
        let start = (0..n).find(|&v| leftover[v]).expect("cycle exists");
        let mut position = vec![usize::MAX; n];
        let mut walk = Vec::new();
        let mut v = start;
        loop {
            if position[v] != usize::MAX {
                let mut cycle = walk[position[v]..].to_vec();
                cycle.push(v);
                cycle.reverse();
                return Err(cycle);
            }
            position[v] = walk.len();
            walk.push(v);
            v = pred[v];
        }
    }
}

/// The region: an immutable directed labeled multigraph.
#[derive(Clone, Debug)]
pub struct LabeledGraph {
    adjacency: Adjacency,
    edges: Vec<Edge>,
    edge_ends: Vec<(usize, usize)>,
    out_edges: Vec<Vec<usize>>,
    attrs: BTreeMap<NodeId, BTreeMap<String, String>>,
    region: RegionId,
}

impl PartialEq for LabeledGraph {
    fn eq(&self, other: &Self) -> bool {
        self.adjacency.ids == other.adjacency.ids
            && self.edges == other.edges
            && self.attrs == other.attrs
    }
}

impl Eq for LabeledGraph {}

/// Accumulates nodes, edges and attributes; duplicates collapse.
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    nodes: BTreeSet<NodeId>,
    edges: BTreeSet<Edge>,
    attrs: BTreeMap<NodeId, BTreeMap<String, String>>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node(&mut self, id: impl Into<NodeId>) -> &mut Self {
        self.nodes.insert(id.into());
        self
    }

    pub fn edge(
        &mut self,
        src: impl Into<NodeId>,
        label: impl Into<String>,
        dst: impl Into<NodeId>,
    ) -> &mut Self {
        let edge = Edge::new(src, label, dst);
        self.nodes.insert(edge.src.clone());
        self.nodes.insert(edge.dst.clone());
        self.edges.insert(edge);
        self
    }

    /// Sets `key=value` on `node`. A later value for the same key replaces
    /// the earlier one.
    pub fn attr(
        &mut self,
        node: impl Into<NodeId>,
        key: impl Into<String>,
        value: impl Into<String>,
    ) -> &mut Self {
        let node = node.into();
        self.nodes.insert(node.clone());
        self.attrs
            .entry(node)
            .or_default()
            .insert(key.into(), value.into());
        self
    }

    pub fn build(&self) -> LabeledGraph {
        LabeledGraph::from_parts(
            self.nodes.clone(),
            self.edges.iter().cloned().collect(),
            self.attrs.clone(),
        )
    }
}

impl LabeledGraph {
    pub fn empty() -> Self {
        GraphBuilder::new().build()
    }

    pub fn builder() -> GraphBuilder {
        GraphBuilder::new()
    }

    /// `edges` must be sorted and duplicate-free, with endpoints in `nodes`.
    fn from_parts(
        nodes: BTreeSet<NodeId>,
        edges: Vec<Edge>,
        attrs: BTreeMap<NodeId, BTreeMap<String, String>>,
    ) -> Self {
        let adjacency = Adjacency::from_pairs(&nodes, edges.iter().map(|e| (&e.src, &e.dst)));
        let mut out_edges = vec![Vec::new(); adjacency.len()];
        let mut edge_ends = Vec::with_capacity(edges.len());
        for (i, e) in edges.iter().enumerate() {
            let s = adjacency.index[&e.src];
            let d = adjacency.index[&e.dst];
            out_edges[s].push(i);
            edge_ends.push((s, d));
        }
        let region = RegionId::of_bytes(&canonical_bytes(&edges, &attrs));
        LabeledGraph {
            adjacency,
            edges,
            edge_ends,
            out_edges,
            attrs,
            region,
        }
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.adjacency.ids
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.adjacency.index.contains_key(id)
    }

    /// Sorted by `(src, label, dst)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn adjacency(&self) -> &Adjacency {
        &self.adjacency
    }

    pub fn attrs(&self, node: &str) -> Option<&BTreeMap<String, String>> {
        self.attrs.get(node)
    }

    pub fn attr(&self, node: &str, key: &str) -> Option<&str> {
        self.attrs.get(node)?.get(key).map(String::as_str)
    }

    pub fn all_attrs(&self) -> &BTreeMap<NodeId, BTreeMap<String, String>> {
        &self.attrs
    }

    /// Cached at construction; see [`fingerprint`].
    pub fn region_id(&self) -> &RegionId {
        &self.region
    }

    pub(crate) fn out_edge_ids(&self, v: usize) -> &[usize] {
        &self.out_edges[v]
    }

    pub(crate) fn edge_ends(&self, edge: usize) -> (usize, usize) {
        self.edge_ends[edge]
    }

    /// The subgraph holding the given edges, the extra nodes, and the
    /// attributes of every retained node.
    pub fn subgraph<'a>(
        &self,
        edge_ids: impl IntoIterator<Item = usize>,
        extra_nodes: impl IntoIterator<Item = &'a NodeId>,
    ) -> LabeledGraph {
        let edge_ids: BTreeSet<usize> = edge_ids.into_iter().collect();
        let edges: Vec<Edge> = edge_ids.iter().map(|&i| self.edges[i].clone()).collect();
        let mut nodes: BTreeSet<NodeId> = extra_nodes.into_iter().cloned().collect();
        for e in &edges {
            nodes.insert(e.src.clone());
            nodes.insert(e.dst.clone());
        }
        let attrs = self
            .attrs
            .iter()
            .filter(|(n, _)| nodes.contains(*n))
            .map(|(n, a)| (n.clone(), a.clone()))
            .collect();
        LabeledGraph::from_parts(nodes, edges, attrs)
    }

    /// Writes the edge file: one `src<TAB>label<TAB>dst` line per edge, sorted.
    pub fn write_edges(&self, mut out: impl Write) -> io::Result<()> {
        for e in &self.edges {
            writeln!(out, "{}\t{}\t{}", e.src, e.label, e.dst)?;
        }
        Ok(())
    }

    /// Writes the attribute file: one `node<TAB>key<TAB>value` line, sorted.
    pub fn write_attrs(&self, mut out: impl Write) -> io::Result<()> {
        for (node, bag) in &self.attrs {
            for (k, v) in bag {
                writeln!(out, "{node}\t{k}\t{v}")?;
            }
        }
        Ok(())
    }
}

fn canonical_bytes(edges: &[Edge], attrs: &BTreeMap<NodeId, BTreeMap<String, String>>) -> Vec<u8> {
    let mut lines: Vec<String> = edges
        .iter()
        .map(|e| format!("{}\t{}\t{}", e.src, e.label, e.dst))
        .collect();
    for (node, bag) in attrs {
        for (k, v) in bag {
            lines.push(format!("{node}\t{k}\t{v}"));
        }
    }
    lines.join("\n").into_bytes()
}

/// Content hash of the canonical serialization: edges sorted by
/// `(src, label, dst)`, then attributes sorted by `(node, key, value)`, one
/// tab-separated triple per line, joined with `\n`.
pub fn fingerprint(g: &LabeledGraph) -> RegionId {
    g.region.clone()
}

fn split_triple(line: &str, line_no: usize) -> Result<(&str, &str, &str)> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 3 {
        return Err(Error::parse(
            line_no,
            format!("expected 3 tab-separated fields, found {}", fields.len()),
        ));
    }
    Ok((fields[0], fields[1], fields[2]))
}

fn node_field(field: &str, line_no: usize) -> Result<NodeId> {
    NodeId::new(field).map_err(|m| Error::parse(line_no, m))
}

/// Meaningful lines of a TSV stream with their 1-based line numbers.
fn content_lines(reader: impl BufRead) -> impl Iterator<Item = Result<(usize, String)>> {
    reader
        .lines()
        .enumerate()
        .filter_map(|(i, line)| match line {
            Err(e) => Some(Err(Error::Io(e))),
            Ok(line) => {
                let line = line.strip_suffix('\r').map(str::to_owned).unwrap_or(line);
                if line.is_empty() || line.starts_with('#') {
                    None
                } else {
                    Some(Ok((i + 1, line)))
                }
            }
        })
}

/// Reads an edge stream (`src<TAB>label<TAB>dst`) and an optional attribute
/// stream (`node<TAB>key<TAB>value`).
pub fn load_graph<E: BufRead, A: BufRead>(edges: E, attrs: Option<A>) -> Result<LabeledGraph> {
    let mut builder = GraphBuilder::new();
    for line in content_lines(edges) {
        let (line_no, line) = line?;
        let (src, label, dst) = split_triple(&line, line_no)?;
        builder.edge(node_field(src, line_no)?, label, node_field(dst, line_no)?);
    }
    if let Some(attrs) = attrs {
        for line in content_lines(attrs) {
            let (line_no, line) = line?;
            let (node, key, value) = split_triple(&line, line_no)?;
            builder.attr(node_field(node, line_no)?, key, value);
        }
    }
    Ok(builder.build())
}

pub fn load_graph_str(edges: &str, attrs: Option<&str>) -> Result<LabeledGraph> {
    load_graph(edges.as_bytes(), attrs.map(str::as_bytes))
}

pub fn load_graph_files(edges: &Path, attrs: Option<&Path>) -> Result<LabeledGraph> {
    let edge_reader = BufReader::new(File::open(edges)?);
    let attr_reader = match attrs {
        Some(p) => Some(BufReader::new(File::open(p)?)),
        None => None,
    };
    load_graph(edge_reader, attr_reader)
}

/// All `v` reachable from `from` by a path of length at least one whose
/// intermediate nodes avoid `avoid`. Endpoints may belong to `avoid`.
pub fn reachable_avoiding(
    g: &LabeledGraph,
    from: &NodeId,
    avoid: &BTreeSet<NodeId>,
) -> Result<BTreeSet<NodeId>> {
    let adj = g.adjacency();
    let source = adj
        .index_of(from.as_str())
        .ok_or_else(|| Error::UnknownNode(from.clone()))?;
    let mut blocked = vec![false; adj.len()];
    for id in avoid {
        if let Some(i) = adj.index_of(id.as_str()) {
            blocked[i] = true;
        }
    }
    let mut out = BTreeSet::new();
    Traversal::new(adj.len()).run(adj, &blocked, source, |v| {
        out.insert(adj.ids()[v].clone());
    });
    Ok(out)
}

/// Orders the nodes so that every edge points forward, or reports one cycle
/// as `[v0, ..., v0]`.
pub fn topological_order(g: &LabeledGraph) -> Result<Vec<NodeId>> {
    let adj = g.adjacency();
    let to_ids = |idx: Vec<usize>| idx.into_iter().map(|i| adj.ids()[i].clone()).collect();
    adj.topo_order().map(to_ids).map_err(|cycle| Error::Cyclic {
        cycle: to_ids(cycle),
    })
}

/// Anything whose collapsed adjacency can be traversed: regions and maps.
pub trait Host {
    fn host_adjacency(&self) -> Cow<'_, Adjacency>;
}

impl Host for LabeledGraph {
    fn host_adjacency(&self) -> Cow<'_, Adjacency> {
        Cow::Borrowed(&self.adjacency)
    }
}
