//! Independent oracles and generators shared by the integration tests.
//!
//! Nothing here calls into the traversal code under test; the oracles work
//! from plain edge lists and the expression tree.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use webmaps::navlang::NavExpression;
use webmaps::{LabeledGraph, NodeId};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn name(i: usize) -> String {
    format!("v{i}")
}

/// A small unlabeled digraph on nodes `0..n`; self-loops allowed.
#[derive(Clone, Debug)]
pub struct Small {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Small {
    /// Decodes bit `i*n + j` of `mask` as the edge `i -> j`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if mask >> (i * n + j) & 1 == 1 {
                    edges.push((i, j));
                }
            }
        }
        Small { n, edges }
    }

    pub fn random(r: &mut StdRng, n: usize, p: f64) -> Self {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if r.gen_bool(p) {
                    edges.push((i, j));
                }
            }
        }
        Small { n, edges }
    }

    /// Random DAG: edges only from lower to higher index.
    pub fn random_dag(r: &mut StdRng, n: usize, p: f64) -> Self {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if r.gen_bool(p) {
                    edges.push((i, j));
                }
            }
        }
        Small { n, edges }
    }

    /// Every node is declared, so isolated nodes exist.
    pub fn to_graph(&self) -> LabeledGraph {
        let mut b = LabeledGraph::builder();
        for i in 0..self.n {
            b.node(name(i));
        }
        for &(i, j) in &self.edges {
            b.edge(name(i), "e", name(j));
        }
        b.build()
    }

    pub fn succ(&self) -> Vec<Vec<usize>> {
        let mut s = vec![Vec::new(); self.n];
        for &(i, j) in &self.edges {
            s[i].push(j);
        }
        s
    }

    pub fn is_acyclic(&self) -> bool {
        // Brute force: a cycle exists iff some node reaches itself.
        !(0..self.n).any(|v| plain_path(self, v, v))
    }
}

fn simple_path_dfs(
    succ: &[Vec<usize>],
    blocked: &dyn Fn(usize) -> bool,
    on_path: &mut Vec<bool>,
    v: usize,
    target: usize,
) -> bool {
    for &w in &succ[v] {
        if w == target {
            return true;
        }
        if blocked(w) || on_path[w] {
            continue;
        }
        on_path[w] = true;
        let found = simple_path_dfs(succ, blocked, on_path, w, target);
        on_path[w] = false;
        if found {
            return true;
        }
    }
    false
}

/// Enumerates simple paths (simple cycles when `x == y`) of length at least
/// one from `x` to `y` whose intermediate nodes avoid `avoid`.
pub fn avoiding_path(g: &Small, x: usize, y: usize, avoid: &[bool]) -> bool {
    let succ = g.succ();
    let mut on_path = vec![false; g.n];
    on_path[x] = true;
    simple_path_dfs(&succ, &|w| avoid[w], &mut on_path, x, y)
}

pub fn plain_path(g: &Small, x: usize, y: usize) -> bool {
    avoiding_path(g, x, y, &vec![false; g.n])
}

/// `{(x, y) in N x N : x ~>_N y}` by path enumeration, as names.
pub fn oracle_good_edges(g: &Small, n: &[bool]) -> BTreeSet<(NodeId, NodeId)> {
    let mut out = BTreeSet::new();
    for x in 0..g.n {
        for y in 0..g.n {
            if n[x] && n[y] && avoiding_path(g, x, y, n) {
                out.insert((NodeId::from(name(x)), NodeId::from(name(y))));
            }
        }
    }
    out
}

pub fn mask_of(n: usize, bits: u32) -> Vec<bool> {
    (0..n).map(|i| bits >> i & 1 == 1).collect()
}

pub fn names_of(mask: &[bool]) -> BTreeSet<NodeId> {
    mask.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| NodeId::from(name(i)))
        .collect()
}

pub fn random_subset(r: &mut StdRng, n: usize) -> Vec<bool> {
    (0..n).map(|_| r.gen_bool(0.5)).collect()
}

// ---------------------------------------------------------------------------
// Navigational language
// ---------------------------------------------------------------------------

pub const LABELS: [&str; 3] = ["x", "y", "z"];

/// Random labeled graph with attribute `t` in {1, 2} on some nodes.
pub fn random_labeled(r: &mut StdRng, n: usize, edges: usize) -> LabeledGraph {
    let mut b = LabeledGraph::builder();
    for i in 0..n {
        b.node(name(i));
        if r.gen_bool(0.6) {
            b.attr(name(i), "t", if r.gen_bool(0.5) { "1" } else { "2" });
        }
    }
    for _ in 0..edges {
        let s = r.gen_range(0..n);
        let d = r.gen_range(0..n);
        b.edge(name(s), LABELS[r.gen_range(0..LABELS.len())], name(d));
    }
    b.build()
}

/// Random expression of depth at most `depth`. Stars only when `stars`.
pub fn random_expr(r: &mut StdRng, depth: usize, stars: bool) -> NavExpression {
    use NavExpression as E;
    if depth <= 1 || r.gen_bool(0.3) {
        return match r.gen_range(0..6) {
            0..=2 => E::label(LABELS[r.gen_range(0..LABELS.len())]),
            3 => E::AnyLabel,
            _ => E::node_test("t", if r.gen_bool(0.5) { "1" } else { "2" }),
        };
    }
    let d = depth - 1;
    let kinds = if stars { 7 } else { 5 };
    match r.gen_range(0..kinds) {
        0 | 1 => E::concat(random_expr(r, d, stars), random_expr(r, d, stars)),
        2 => E::alt(random_expr(r, d, stars), random_expr(r, d, stars)),
        3 => E::optional(random_expr(r, d, stars)),
        4 => {
            let min = r.gen_range(0..3);
            let max = r.gen_range(min..=min + 1);
            E::repeat(random_expr(r, d, stars), min, max)
        }
        5 => E::star(random_expr(r, d, stars)),
        _ => E::plus(random_expr(r, d, stars)),
    }
}

/// Longest walk a star-free expression can consume.
pub fn max_len(e: &NavExpression) -> Option<usize> {
    use NavExpression::*;
    Some(match e {
        Label(_) | AnyLabel => 1,
        NodeTest(..) => 0,
        Concat(a, b) => max_len(a)? + max_len(b)?,
        Alt(a, b) => max_len(a)?.max(max_len(b)?),
        Optional(a) => max_len(a)?,
        Repeat(a, _, n) => max_len(a)? * *n as usize,
        Star(_) | Plus(_) => return None,
    })
}

/// A walk from the seed: node indices `nodes[0..=len]` and consumed edges.
struct Walk<'g> {
    g: &'g LabeledGraph,
    nodes: Vec<NodeId>,
    edges: Vec<usize>,
}

type Key = (usize, usize, usize, usize);

/// Position-based matcher of an expression against one walk, written from
/// the expression semantics directly.
struct Matcher<'w, 'g> {
    walk: &'w Walk<'g>,
    memo: HashMap<Key, bool>,
}

fn key(e: &NavExpression, tag: usize, i: usize, j: usize) -> Key {
    (e as *const NavExpression as usize, tag, i, j)
}

impl Matcher<'_, '_> {
    /// Segment `i..j` of the walk matches `e` completely.
    fn full(&mut self, e: &NavExpression, i: usize, j: usize) -> bool {
        use NavExpression::*;
        if let Some(&v) = self.memo.get(&key(e, 0, i, j)) {
            return v;
        }
        let g = self.walk.g;
        let v = match e {
            Label(l) => j == i + 1 && g.edges()[self.walk.edges[i]].label == *l,
            AnyLabel => j == i + 1,
            NodeTest(k, val) => i == j && g.attr(self.walk.nodes[i].as_str(), k) == Some(val),
            Concat(a, b) => (i..=j).any(|k| self.full(a, i, k) && self.full(b, k, j)),
            Alt(a, b) => self.full(a, i, j) || self.full(b, i, j),
            Optional(a) => i == j || self.full(a, i, j),
            Star(a) => self.star(a, i, j),
            Plus(a) => (i..=j).any(|k| self.full(a, i, k) && self.star(a, k, j)),
            Repeat(a, m, n) => (*m..=*n).any(|c| self.copies(a, c as usize, i, j)),
        };
        self.memo.insert(key(e, 0, i, j), v);
        v
    }

    fn star(&mut self, a: &NavExpression, i: usize, j: usize) -> bool {
        if i == j {
            return true;
        }
        if let Some(&v) = self.memo.get(&key(a, 1, i, j)) {
            return v;
        }
        // Pieces that consume nothing can be dropped.
        let v = (i + 1..=j).any(|k| self.full(a, i, k) && self.star(a, k, j));
        self.memo.insert(key(a, 1, i, j), v);
        v
    }

    fn copies(&mut self, a: &NavExpression, c: usize, i: usize, j: usize) -> bool {
        if c == 0 {
            return i == j;
        }
        if let Some(&v) = self.memo.get(&key(a, 2 + c, i, j)) {
            return v;
        }
        let v = (i..=j).any(|k| self.full(a, i, k) && self.copies(a, c - 1, k, j));
        self.memo.insert(key(a, 2 + c, i, j), v);
        v
    }

    /// Segment `i..j` can be consumed by matching a prefix of `e`, stopping
    /// anywhere inside it.
    fn prefix(&mut self, e: &NavExpression, i: usize, j: usize) -> bool {
        use NavExpression::*;
        if i == j {
            return true;
        }
        match e {
            Label(_) | AnyLabel => self.full(e, i, j),
            NodeTest(..) => false,
            Concat(a, b) => {
                self.prefix(a, i, j) || (i..=j).any(|k| self.full(a, i, k) && self.prefix(b, k, j))
            }
            Alt(a, b) => self.prefix(a, i, j) || self.prefix(b, i, j),
            Optional(a) => self.prefix(a, i, j),
            Star(a) | Plus(a) => (i..=j).any(|k| self.star(a, i, k) && self.prefix(a, k, j)),
            Repeat(a, _, n) => (0..*n as usize)
                .any(|c| (i..=j).any(|k| self.copies(a, c, i, k) && self.prefix(a, k, j))),
        }
    }
}

#[derive(Debug, Default, PartialEq, Eq)]
pub struct WalkOracle {
    pub selected: BTreeSet<NodeId>,
    pub successful: BTreeSet<usize>,
    pub visited: BTreeSet<usize>,
}

/// Enumerates every walk from `seed` of length at most `bound` and matches
/// each one against `e`. Edge results are indices into `g.edges()`.
pub fn walk_oracle(g: &LabeledGraph, seed: &str, e: &NavExpression, bound: usize) -> WalkOracle {
    let mut out = WalkOracle::default();
    let mut stack = vec![(vec![NodeId::from(seed)], Vec::<usize>::new())];
    while let Some((nodes, edges)) = stack.pop() {
        let walk = Walk {
            g,
            nodes: nodes.clone(),
            edges: edges.clone(),
        };
        let len = edges.len();
        let mut m = Matcher {
            walk: &walk,
            memo: HashMap::new(),
        };
        if len > 0 && !m.prefix(e, 0, len) {
            // No run consumes this walk, so none consumes an extension.
            continue;
        }
        if len > 0 {
            out.visited.insert(edges[len - 1]);
        }
        if m.full(e, 0, len) {
            out.selected.insert(nodes[len].clone());
            out.successful.extend(edges.iter().copied());
        }
        if len == bound {
            continue;
        }
        let last = nodes[len].clone();
        for (eid, edge) in g.edges().iter().enumerate() {
            if edge.src == last {
                let mut n2 = nodes.clone();
                n2.push(edge.dst.clone());
                let mut e2 = edges.clone();
                e2.push(eid);
                stack.push((n2, e2));
            }
        }
    }
    out
}

type Rel = Vec<Vec<bool>>;

/// Binary relations over the nodes of one graph.
struct Relations<'g> {
    g: &'g LabeledGraph,
    n: usize,
}

impl Relations<'_> {
    fn idx(&self, id: &NodeId) -> usize {
        self.g.nodes().iter().position(|x| x == id).unwrap()
    }

    fn identity(&self) -> Rel {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| i == j).collect())
            .collect()
    }

    fn compose(&self, a: &Rel, b: &Rel) -> Rel {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| (0..self.n).any(|k| a[i][k] && b[k][j]))
                    .collect()
            })
            .collect()
    }

    fn union(&self, a: &Rel, b: &Rel) -> Rel {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| a[i][j] || b[i][j]).collect())
            .collect()
    }

    /// Reflexive-transitive closure.
    fn closure(&self, a: &Rel) -> Rel {
        let mut r = self.identity();
        loop {
            let next = self.union(&r, &self.compose(&r, a));
            if next == r {
                return r;
            }
            r = next;
        }
    }

    fn of(&self, e: &NavExpression) -> Rel {
        use NavExpression::*;
        match e {
            Label(_) | AnyLabel => {
                let mut r = vec![vec![false; self.n]; self.n];
                for edge in self.g.edges() {
                    if matches!(e, AnyLabel) || matches!(e, Label(l) if *l == edge.label) {
                        r[self.idx(&edge.src)][self.idx(&edge.dst)] = true;
                    }
                }
                r
            }
            NodeTest(k, v) => {
                let mut r = vec![vec![false; self.n]; self.n];
                for (i, id) in self.g.nodes().iter().enumerate() {
                    r[i][i] = self.g.attr(id.as_str(), k) == Some(v.as_str());
                }
                r
            }
            Concat(a, b) => self.compose(&self.of(a), &self.of(b)),
            Alt(a, b) => self.union(&self.of(a), &self.of(b)),
            Optional(a) => self.union(&self.identity(), &self.of(a)),
            Star(a) => self.closure(&self.of(a)),
            Plus(a) => {
                let ra = self.of(a);
                self.compose(&ra, &self.closure(&ra))
            }
            Repeat(a, m, mx) => {
                let ra = self.of(a);
                let mut power = self.identity();
                for _ in 0..*m {
                    power = self.compose(&power, &ra);
                }
                let mut acc = power.clone();
                for _ in *m..*mx {
                    power = self.compose(&power, &ra);
                    acc = self.union(&acc, &power);
                }
                acc
            }
        }
    }
}

/// Exact selected set via relation algebra over node pairs.
pub fn relational_selected(g: &LabeledGraph, seed: &str, e: &NavExpression) -> BTreeSet<NodeId> {
    let rels = Relations {
        g,
        n: g.node_count(),
    };
    let r = rels.of(e);
    let s = rels.idx(&NodeId::from(seed));
    (0..rels.n)
        .filter(|&j| r[s][j])
        .map(|j| g.nodes()[j].clone())
        .collect()
}

// ---------------------------------------------------------------------------
// Fixtures
// ---------------------------------------------------------------------------

pub const DIRECTORS_REGION: &str = include_str!("../fixtures/directors_region.tsv");

pub fn directors() -> BTreeSet<NodeId> {
    ["J.Ford", "S.Kubrick", "W.Allen", "Q.Tarantino"]
        .into_iter()
        .map(NodeId::from)
        .collect()
}
