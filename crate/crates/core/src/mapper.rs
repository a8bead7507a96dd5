//! Maps of a region: the structural predicates, the unique good map over a
//! distinguished node set, and k-maps driven by a node scoring function.
//!
//! Notation used in comments: `x ~>_N y` means there is a path of length at
//! least one from `x` to `y` whose intermediate nodes all lie outside `N`.
//! A map over `N` is good exactly when its edges are `{(x, y) : x ~>_N y}`.

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Adjacency, Host, LabeledGraph, NodeId, RegionId};
use crate::reach::Traversal;

/// Verified goodness properties of a map. All false until checked.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Goodness {
    pub is_complete: bool,
    pub is_route_complete: bool,
    pub is_non_redundant: bool,
}

impl Goodness {
    pub const GOOD: Goodness = Goodness {
        is_complete: true,
        is_route_complete: true,
        is_non_redundant: true,
    };

    pub fn is_good(&self) -> bool {
        self.is_complete && self.is_route_complete && self.is_non_redundant
    }
}

/// A map: distinguished nodes, unlabeled edges between them, and the region
/// it was drawn from.
///
/// Equality compares nodes, edges and region. Goodness flags are provenance
/// and do not take part.
#[derive(Clone, Debug)]
pub struct Map {
    nodes: BTreeSet<NodeId>,
    edges: BTreeSet<(NodeId, NodeId)>,
    region: RegionId,
    goodness: Goodness,
}

impl PartialEq for Map {
    fn eq(&self, other: &Self) -> bool {
        self.region == other.region && self.nodes == other.nodes && self.edges == other.edges
    }
}

impl Eq for Map {}

impl Map {
    /// Unverified map. Every edge endpoint must be one of `nodes`.
    pub fn new(
        region: RegionId,
        nodes: BTreeSet<NodeId>,
        edges: BTreeSet<(NodeId, NodeId)>,
    ) -> Result<Self> {
        for (x, y) in &edges {
            for end in [x, y] {
                if !nodes.contains(end) {
                    return Err(Error::UnknownNode(end.clone()));
                }
            }
        }
        Ok(Map {
            nodes,
            edges,
            region,
            goodness: Goodness::default(),
        })
    }

    pub fn empty(region: RegionId) -> Self {
        Map {
            nodes: BTreeSet::new(),
            edges: BTreeSet::new(),
            region,
            goodness: Goodness::GOOD,
        }
    }

    pub(crate) fn good_unchecked(
        region: RegionId,
        nodes: BTreeSet<NodeId>,
        edges: BTreeSet<(NodeId, NodeId)>,
    ) -> Self {
        Map {
            nodes,
            edges,
            region,
            goodness: Goodness::GOOD,
        }
    }

    pub fn nodes(&self) -> &BTreeSet<NodeId> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<(NodeId, NodeId)> {
        &self.edges
    }

    pub fn has_edge(&self, x: &str, y: &str) -> bool {
        self.edges.contains(&(NodeId::from(x), NodeId::from(y)))
    }

    pub fn region(&self) -> &RegionId {
        &self.region
    }

    pub fn goodness(&self) -> Goodness {
        self.goodness
    }

    /// Recomputes the goodness flags against `g`.
    pub fn verify(mut self, g: &LabeledGraph) -> Result<Self> {
        let verdict = check(&self, g)?;
        self.goodness = Goodness {
            is_complete: verdict.is_complete,
            is_route_complete: verdict.is_route_complete,
            is_non_redundant: verdict.is_non_redundant,
        };
        Ok(self)
    }

    /// Marks the map good without looking at any region.
    ///
    /// For callers that only hold map files, which carry no goodness flags.
    pub fn assume_good(mut self) -> Self {
        self.goodness = Goodness::GOOD;
        self
    }

    pub fn with_edges(&self, edges: BTreeSet<(NodeId, NodeId)>) -> Result<Self> {
        Map::new(self.region.clone(), self.nodes.clone(), edges)
    }

    /// Map file: `#region <hex>`, one `#node <id>` per node, then
    /// `src<TAB>dst` edge lines. Everything sorted.
    pub fn write(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "#region {}", self.region)?;
        for n in &self.nodes {
            writeln!(out, "#node {n}")?;
        }
        for (x, y) in &self.edges {
            writeln!(out, "{x}\t{y}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ids are UTF-8")
    }

    /// Reads a map file. Goodness flags come back unverified.
    pub fn read(reader: impl BufRead) -> Result<Self> {
        let mut region = None;
        let mut nodes = BTreeSet::new();
        let mut edges = Vec::new();
        for line in reader.lines().enumerate() {
            let (i, line) = line;
            let line = line?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            let line_no = i + 1;
            if let Some(hex) = line.strip_prefix("#region ") {
                if region.is_some() {
                    return Err(Error::parse(line_no, "duplicate #region header"));
                }
                region = Some(
                    RegionId::parse(hex.trim())
                        .ok_or_else(|| Error::parse(line_no, "malformed region digest"))?,
                );
            } else if let Some(id) = line.strip_prefix("#node ") {
                nodes.insert(NodeId::new(id).map_err(|m| Error::parse(line_no, m))?);
            } else if line.is_empty() || line.starts_with('#') {
                continue;
            } else {
                let fields: Vec<&str> = line.split('\t').collect();
                if fields.len() != 2 {
                    return Err(Error::parse(
                        line_no,
                        format!("expected 2 tab-separated fields, found {}", fields.len()),
                    ));
                }
                edges.push((line_no, NodeId::from(fields[0]), NodeId::from(fields[1])));
            }
        }
        let region = region.ok_or_else(|| Error::parse(0, "missing #region header"))?;
        let mut edge_set = BTreeSet::new();
        for (line_no, x, y) in edges {
            for end in [&x, &y] {
                if !nodes.contains(end) {
                    return Err(Error::parse(
                        line_no,
                        format!("edge endpoint `{end}` is not declared with #node"),
                    ));
                }
            }
            edge_set.insert((x, y));
        }
        Map::new(region, nodes, edge_set)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Map::read(text.as_bytes())
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        Map::read(BufReader::new(File::open(path)?))
    }
}

impl Host for Map {
    fn host_adjacency(&self) -> Cow<'_, Adjacency> {
        Cow::Owned(Adjacency::from_pairs(
            &self.nodes,
            self.edges.iter().map(|(x, y)| (x, y)),
        ))
    }
}

fn ensure_region(m: &Map, g: &LabeledGraph) -> Result<()> {
    if m.region() != g.region_id() {
        return Err(Error::RegionMismatch {
            expected: g.region_id().clone(),
            found: m.region().clone(),
        });
    }
    Ok(())
}

/// Index mask of the map's nodes in `g`, or `None` when some node is not in
/// `g` (the structure is then not a map of `g`).
fn node_mask(m: &Map, g: &LabeledGraph) -> Option<Vec<bool>> {
    g.adjacency().mask(m.nodes()).ok()
}

/// `{(x, y) : x, y members, x ~>_members y}` over `adj`, as index pairs.
///
/// One restricted traversal per member; each touches every non-member node
/// and every edge at most once.
pub(crate) fn restricted_pairs(adj: &Adjacency, members: &[bool]) -> Vec<(usize, usize)> {
    let sources: Vec<usize> = (0..adj.len()).filter(|&v| members[v]).collect();
    let visit = |t: &mut Traversal, &x: &usize| {
        let mut out = Vec::new();
        t.run(adj, members, x, |w| {
            if members[w] {
                out.push((x, w));
            }
        });
        out
    };
    let work = sources.len() * (adj.len() + adj.edge_count());
    let mut pairs: Vec<(usize, usize)> = if work > (1 << 18) {
        sources
            .par_iter()
            .map_init(|| Traversal::new(adj.len()), visit)
            .flatten()
            .collect()
    } else {
        let mut t = Traversal::new(adj.len());
        sources.iter().flat_map(|x| visit(&mut t, x)).collect()
    };
    pairs.sort_unstable();
    pairs
}

fn id_pairs(adj: &Adjacency, pairs: &[(usize, usize)]) -> BTreeSet<(NodeId, NodeId)> {
    pairs
        .iter()
        .map(|&(x, y)| (adj.ids()[x].clone(), adj.ids()[y].clone()))
        .collect()
}

/// Map edges as index pairs in `g`. Assumes every node is in `g`.
fn map_pairs(m: &Map, adj: &Adjacency) -> BTreeSet<(usize, usize)> {
    m.edges()
        .iter()
        .map(|(x, y)| {
            (
                adj.index_of(x.as_str()).expect("node in region"),
                adj.index_of(y.as_str()).expect("node in region"),
            )
        })
        .collect()
}

/// The four predicate verdicts for a candidate map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub is_map: bool,
    pub is_complete: bool,
    pub is_route_complete: bool,
    pub is_non_redundant: bool,
}

impl Verdict {
    pub fn is_good(&self) -> bool {
        self.is_map && self.is_complete && self.is_route_complete && self.is_non_redundant
    }
}

pub fn check(m: &Map, g: &LabeledGraph) -> Result<Verdict> {
    Ok(Verdict {
        is_map: is_map(m, g)?,
        is_complete: is_complete(m, g)?,
        is_route_complete: is_route_complete(m, g)?,
        is_non_redundant: is_non_redundant(m, g)?,
    })
}

/// Every map node is a region node and every map edge `(x, y)` has a region
/// path from `x` to `y`.
pub fn is_map(m: &Map, g: &LabeledGraph) -> Result<bool> {
    ensure_region(m, g)?;
    let adj = g.adjacency();
    if node_mask(m, g).is_none() {
        return Ok(false);
    }
    let open = vec![false; adj.len()];
    let mut t = Traversal::new(adj.len());
    let mut by_source: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (x, y) in map_pairs(m, adj) {
        by_source.entry(x).or_default().push(y);
    }
    for (x, targets) in by_source {
        let mut reached = vec![false; adj.len()];
        t.run(adj, &open, x, |w| reached[w] = true);
        if targets.iter().any(|&y| !reached[y]) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Reachability between map nodes in the region is matched by reachability
/// inside the map.
///
/// A structure that is not a map of `g` satisfies none of the map
/// predicates; the same holds for the three below.
pub fn is_complete(m: &Map, g: &LabeledGraph) -> Result<bool> {
    ensure_region(m, g)?;
    let Some(mask) = node_mask(m, g) else {
        return Ok(false);
    };
    let adj = g.adjacency();
    let open = vec![false; adj.len()];
    let mut t = Traversal::new(adj.len());

    let inner = m.host_adjacency();
    let inner_open = vec![false; inner.len()];
    let mut inner_t = Traversal::new(inner.len());

    for x in m.nodes() {
        let mut in_region = Vec::new();
        let xi = adj.index_of(x.as_str()).expect("masked");
        t.run(adj, &open, xi, |w| {
            if mask[w] {
                in_region.push(w);
            }
        });
        let mut in_map = vec![false; inner.len()];
        let xm = inner.index_of(x.as_str()).expect("map node");
        inner_t.run(&inner, &inner_open, xm, |w| in_map[w] = true);
        for w in in_region {
            let wm = inner.index_of(adj.ids()[w].as_str()).expect("map node");
            if !in_map[wm] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Every `x ~>_{V_M} y` in the region is a direct map edge.
pub fn is_route_complete(m: &Map, g: &LabeledGraph) -> Result<bool> {
    ensure_region(m, g)?;
    let Some(mask) = node_mask(m, g) else {
        return Ok(false);
    };
    let adj = g.adjacency();
    let have = map_pairs(m, adj);
    Ok(restricted_pairs(adj, &mask)
        .iter()
        .all(|p| have.contains(p)))
}

/// Every map edge is witnessed by some `x ~>_{V_M} y` in the region.
pub fn is_non_redundant(m: &Map, g: &LabeledGraph) -> Result<bool> {
    ensure_region(m, g)?;
    let Some(mask) = node_mask(m, g) else {
        return Ok(false);
    };
    let adj = g.adjacency();
    let witnessed: BTreeSet<(usize, usize)> = restricted_pairs(adj, &mask).into_iter().collect();
    Ok(map_pairs(m, adj).iter().all(|p| witnessed.contains(p)))
}

/// Edge-set characterization: `x -> y` in the map iff `x ~>_{V_M} y` in the
/// region, for all map nodes.
pub fn is_good(m: &Map, g: &LabeledGraph) -> Result<bool> {
    ensure_region(m, g)?;
    let Some(mask) = node_mask(m, g) else {
        return Ok(false);
    };
    let adj = g.adjacency();
    let expected: BTreeSet<(usize, usize)> = restricted_pairs(adj, &mask).into_iter().collect();
    Ok(expected == map_pairs(m, adj))
}

/// The unique good map over `n`, by one restricted traversal per
/// distinguished node. Works on any region.
pub fn good_map_general(g: &LabeledGraph, n: &BTreeSet<NodeId>) -> Result<Map> {
    let adj = g.adjacency();
    let mask = adj.mask(n)?;
    let pairs = restricted_pairs(adj, &mask);
    Ok(Map::good_unchecked(
        g.region_id().clone(),
        n.clone(),
        id_pairs(adj, &pairs),
    ))
}

/// Fixed-width bitsets over the distinguished nodes, one row per node.
struct BitRows {
    words: usize,
    bits: Vec<u64>,
}

impl BitRows {
    fn new(rows: usize, width: usize) -> Self {
        let words = width.div_ceil(64);
        BitRows {
            words,
            bits: vec![0; rows * words],
        }
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words..(r + 1) * self.words]
    }

    fn set(&mut self, r: usize, bit: usize) {
        self.bits[r * self.words + bit / 64] |= 1 << (bit % 64);
    }

    /// `row(dst) |= row(src)`, for `dst != src`.
    fn union_into(&mut self, dst: usize, src: usize) {
        let w = self.words;
        let (lo, hi, dst_first) = if dst < src {
            (dst, src, true)
        } else {
            (src, dst, false)
        };
        let (a, b) = self.bits.split_at_mut(hi * w);
        let low = &mut a[lo * w..(lo + 1) * w];
        let high = &mut b[..w];
        let (d, s) = if dst_first {
            (low, &*high)
        } else {
            (high, &*low)
        };
        for (d, s) in d.iter_mut().zip(s) {
            *d |= *s;
        }
    }
}

/// The unique good map over `n` for an acyclic region.
///
/// Nodes are processed in reverse topological order. Each node `v` keeps the
/// set `R(v)` of distinguished nodes reachable from `v` through
/// non-distinguished intermediates: a distinguished successor `w` adds `w`,
/// any other successor contributes all of `R(w)`. The map edges out of a
/// distinguished `x` are exactly `R(x)`.
pub fn good_map_dag(g: &LabeledGraph, n: &BTreeSet<NodeId>) -> Result<Map> {
    let adj = g.adjacency();
    let mask = adj.mask(n)?;
    let order = adj.any_topo_order().map_err(|cycle| Error::Cyclic {
        cycle: cycle.into_iter().map(|i| adj.ids()[i].clone()).collect(),
    })?;

    // Bit positions follow index order, which is id order.
    let mut bit_of = vec![usize::MAX; adj.len()];
    let mut distinguished = Vec::with_capacity(n.len());
    for v in 0..adj.len() {
        if mask[v] {
            bit_of[v] = distinguished.len();
            distinguished.push(v);
        }
    }

    let mut reach = BitRows::new(adj.len(), distinguished.len());
    for &v in order.iter().rev() {
        for &w in adj.successors(v) {
            if mask[w] {
                reach.set(v, bit_of[w]);
            } else {
                reach.union_into(v, w);
            }
        }
    }

    let mut edges = BTreeSet::new();
    for &x in &distinguished {
        for (word_idx, &word) in reach.row(x).iter().enumerate() {
            let mut word = word;
            while word != 0 {
                let bit = word_idx * 64 + word.trailing_zeros() as usize;
                word &= word - 1;
                edges.insert((adj.ids()[x].clone(), adj.ids()[distinguished[bit]].clone()));
            }
        }
    }
    Ok(Map::good_unchecked(g.region_id().clone(), n.clone(), edges))
}

/// The unique good map over `n`: the DAG algorithm when the region is
/// acyclic, the general one otherwise.
pub fn good_map(g: &LabeledGraph, n: &BTreeSet<NodeId>) -> Result<Map> {
    g.adjacency().mask(n)?;
    match good_map_dag(g, n) {
        Err(Error::Cyclic { .. }) => good_map_general(g, n),
        other => other,
    }
}

/// Node scoring functions available for k-maps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScoreFn {
    InDegree,
    OutDegree,
    PageRank,
}

impl FromStr for ScoreFn {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "indegree" => Ok(ScoreFn::InDegree),
            "outdegree" => Ok(ScoreFn::OutDegree),
            "pagerank" => Ok(ScoreFn::PageRank),
            other => Err(format!(
                "unknown score function `{other}` (expected indegree, outdegree or pagerank)"
            )),
        }
    }
}

impl fmt::Display for ScoreFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScoreFn::InDegree => "indegree",
            ScoreFn::OutDegree => "outdegree",
            ScoreFn::PageRank => "pagerank",
        })
    }
}

pub const PAGERANK_DAMPING: f64 = 0.85;
pub const PAGERANK_TOLERANCE: f64 = 1e-9;
pub const PAGERANK_MAX_ITERATIONS: usize = 100;

/// A finite score for every node of one region.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreTable {
    scores: BTreeMap<NodeId, f64>,
}

impl ScoreTable {
    pub fn new(g: &LabeledGraph, scores: BTreeMap<NodeId, f64>) -> Result<Self> {
        if scores.len() != g.node_count() || g.nodes().iter().any(|n| !scores.contains_key(n)) {
            return Err(Error::InvalidScores(
                "score table domain differs from the region's node set".to_owned(),
            ));
        }
        if let Some((n, s)) = scores.iter().find(|(_, s)| !s.is_finite()) {
            return Err(Error::InvalidScores(format!("score of `{n}` is {s}")));
        }
        Ok(ScoreTable { scores })
    }

    pub fn get(&self, node: &str) -> Option<f64> {
        self.scores.get(node).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NodeId, f64)> {
        self.scores.iter().map(|(n, &s)| (n, s))
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// Degrees count distinct neighbours, so parallel edges with different
/// labels count once.
pub fn score_nodes(g: &LabeledGraph, f: ScoreFn) -> ScoreTable {
    let adj = g.adjacency();
    let values: Vec<f64> = match f {
        ScoreFn::OutDegree => (0..adj.len())
            .map(|v| adj.successors(v).len() as f64)
            .collect(),
        ScoreFn::InDegree => {
            let mut d = vec![0.0; adj.len()];
            for v in 0..adj.len() {
                for &w in adj.successors(v) {
                    d[w] += 1.0;
                }
            }
            d
        }
        ScoreFn::PageRank => pagerank(adj),
    };
    ScoreTable {
        scores: adj.ids().iter().cloned().zip(values).collect(),
    }
}

/// Power iteration with uniform teleport; the mass of dangling nodes is
/// spread uniformly.
fn pagerank(adj: &Adjacency) -> Vec<f64> {
    let n = adj.len();
    if n == 0 {
        return Vec::new();
    }
    let nf = n as f64;
    let mut rank = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    for _ in 0..PAGERANK_MAX_ITERATIONS {
        let dangling: f64 = (0..n)
            .filter(|&v| adj.successors(v).is_empty())
            .map(|v| rank[v])
            .sum();
        let base = (1.0 - PAGERANK_DAMPING) / nf + PAGERANK_DAMPING * dangling / nf;
        next.iter_mut().for_each(|x| *x = base);
        for (v, &r) in rank.iter().enumerate() {
            let out = adj.successors(v);
            if out.is_empty() {
                continue;
            }
            let share = PAGERANK_DAMPING * r / out.len() as f64;
            for &w in out {
                next[w] += share;
            }
        }
        let delta: f64 = rank.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut rank, &mut next);
        if delta < PAGERANK_TOLERANCE {
            break;
        }
    }
    rank
}

/// Good map over `{v : score(v) >= k}`.
pub fn k_map(g: &LabeledGraph, scores: &ScoreTable, k: f64) -> Result<Map> {
    let table = ScoreTable::new(g, scores.scores.clone())?;
    let chosen: BTreeSet<NodeId> = table
        .iter()
        .filter(|&(_, s)| s >= k)
        .map(|(n, _)| n.clone())
        .collect();
    good_map(g, &chosen)
}
