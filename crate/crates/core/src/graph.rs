//! Dependency graphs on `[n]` and the vertex-set algebra used by every table.
//!
//! Vertices are 0-based internally and 1-based at every I/O boundary
//! (parsing, JSON reports, `Display`). A [`VertexSet`] is a single `u64`
//! bitset, so the canonical encoding of a subset doubles as its index into
//! the `2^n` coefficient tables.

use std::fmt;

use serde::Deserialize;

use crate::error::{Error, Result};

/// Largest supported vertex count (one machine word).
pub const GRAPH_CAP: usize = 64;

/// Subset of `[n]`, stored as a bitset over 0-based vertex indices.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexSet(u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    #[inline]
    pub const fn from_bits(bits: u64) -> Self {
        VertexSet(bits)
    }

    #[inline]
    pub const fn bits(self) -> u64 {
        self.0
    }

    /// Canonical encoding as a table index.
    #[inline]
    pub const fn index(self) -> usize {
        self.0 as usize
    }

    /// `[n]` itself.
    #[inline]
    pub const fn full(n: usize) -> Self {
        if n >= 64 {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << n) - 1)
        }
    }

    #[inline]
    pub const fn singleton(v: usize) -> Self {
        VertexSet(1u64 << v)
    }

    #[inline]
    pub const fn contains(self, v: usize) -> bool {
        v < 64 && (self.0 >> v) & 1 == 1
    }

    #[inline]
    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub const fn with(self, v: usize) -> Self {
        VertexSet(self.0 | (1u64 << v))
    }

    #[inline]
    pub const fn without(self, v: usize) -> Self {
        VertexSet(self.0 & !(1u64 << v))
    }

    #[inline]
    pub const fn union(self, other: Self) -> Self {
        VertexSet(self.0 | other.0)
    }

    #[inline]
    pub const fn intersection(self, other: Self) -> Self {
        VertexSet(self.0 & other.0)
    }

    #[inline]
    pub const fn difference(self, other: Self) -> Self {
        VertexSet(self.0 & !other.0)
    }

    /// `[n] \ self`.
    #[inline]
    pub const fn complement(self, n: usize) -> Self {
        VertexSet(!self.0 & Self::full(n).0)
    }

    #[inline]
    pub const fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub const fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    /// Lowest-index member, if any.
    #[inline]
    pub fn first(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    /// Members in increasing order (0-based).
    pub fn iter(self) -> Members {
        Members(self.0)
    }

    /// All subsets of `self` in increasing canonical encoding, starting at `∅`.
    pub fn subsets(self) -> Subsets {
        Subsets {
            mask: self.0,
            next: Some(0),
        }
    }

    /// Members as 1-based vertex labels.
    pub fn to_one_based(self) -> Vec<usize> {
        self.iter().map(|v| v + 1).collect()
    }

    /// Builds a set from 1-based labels; labels must lie in `1..=n`.
    pub fn from_one_based(labels: &[usize], n: usize) -> Result<Self> {
        let mut s = VertexSet::EMPTY;
        for (k, &l) in labels.iter().enumerate() {
            if l == 0 || l > n {
                return Err(Error::VertexOutOfRange {
                    vertex: l as i64,
                    n,
                    at: format!("entry #{}", k + 1),
                });
            }
            s = s.with(l - 1);
        }
        Ok(s)
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, v) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", v + 1)?;
        }
        f.write_str("}")
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        iter.into_iter().fold(VertexSet::EMPTY, VertexSet::with)
    }
}

pub struct Members(u64);

impl Iterator for Members {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let v = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(v)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let k = self.0.count_ones() as usize;
        (k, Some(k))
    }
}

impl ExactSizeIterator for Members {}

pub struct Subsets {
    mask: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = VertexSet;

    #[inline]
    fn next(&mut self) -> Option<VertexSet> {
        let cur = self.next?;
        let succ = cur.wrapping_sub(self.mask) & self.mask;
        self.next = if succ == 0 { None } else { Some(succ) };
        Some(VertexSet(cur))
    }
}

/// Undirected dependency graph on `n` vertices; symmetric and irreflexive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<VertexSet>,
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 || n > GRAPH_CAP {
            return Err(Error::VertexCount { n, cap: GRAPH_CAP });
        }
        Ok(Graph {
            n,
            adj: vec![VertexSet::EMPTY; n],
        })
    }

    /// Builds a graph from 1-based edge pairs. Duplicate edges collapse.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n)?;
        for (k, &(i, j)) in edges.iter().enumerate() {
            g.add_edge_labeled(i as i64, j as i64, &format!("edge #{}", k + 1))?;
        }
        Ok(g)
    }

    fn add_edge_labeled(&mut self, i: i64, j: i64, at: &str) -> Result<()> {
        for v in [i, j] {
            if v < 1 || v as usize > self.n {
                return Err(Error::VertexOutOfRange {
                    vertex: v,
                    n: self.n,
                    at: at.to_string(),
                });
            }
        }
        if i == j {
            return Err(Error::SelfLoop {
                vertex: i,
                at: at.to_string(),
            });
        }
        self.add_edge((i - 1) as usize, (j - 1) as usize);
        Ok(())
    }

    /// Adds the 0-based edge `{i, j}`. Panics on out-of-range vertices or loops.
    pub fn add_edge(&mut self, i: usize, j: usize) {
        assert!(i < self.n && j < self.n && i != j, "bad edge ({i}, {j})");
        self.adj[i] = self.adj[i].with(j);
        self.adj[j] = self.adj[j].with(i);
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    /// `Γ(i)`.
    #[inline]
    pub fn neighbors(&self, i: usize) -> VertexSet {
        self.adj[i]
    }

    /// `Γ⁺(i) = Γ(i) ∪ {i}`, unchecked.
    #[inline]
    pub fn closed(&self, i: usize) -> VertexSet {
        self.adj[i].with(i)
    }

    /// `Γ⁺(i)` with a range check on `i` (0-based).
    pub fn closed_neighborhood(&self, i: usize) -> Result<VertexSet> {
        if i >= self.n {
            return Err(Error::VertexOutOfRange {
                vertex: i as i64 + 1,
                n: self.n,
                at: "closed_neighborhood".into(),
            });
        }
        Ok(self.closed(i))
    }

    /// Union of closed neighborhoods of the members of `s`.
    pub fn closed_of_set(&self, s: VertexSet) -> VertexSet {
        s.iter().fold(s, |acc, v| acc.union(self.adj[v]))
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].contains(j)
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|i| self.degree(i)).max().unwrap_or(0)
    }

    /// Edges as 0-based pairs `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in self.adj[i].iter().filter(|&j| j > i) {
                out.push((i, j));
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|s| s.len()).sum::<usize>() / 2
    }

    /// True iff no edge of the graph has both endpoints in `s`.
    #[inline]
    pub fn is_independent(&self, s: VertexSet) -> bool {
        s.iter().all(|v| self.adj[v].is_disjoint(s))
    }

    /// Every independent `I ⊆ s`, each once, in increasing canonical encoding.
    pub fn independent_subsets(&self, s: VertexSet) -> Vec<VertexSet> {
        s.subsets().filter(|&i| self.is_independent(i)).collect()
    }

    /// Connected components of the subgraph induced on `s`, ordered by their
    /// lowest member.
    pub fn induced_components(&self, s: VertexSet) -> Vec<VertexSet> {
        let mut parts = Vec::new();
        let mut rest = s;
        while let Some(root) = rest.first() {
            let mut comp = VertexSet::singleton(root);
            let mut frontier = comp;
            while !frontier.is_empty() {
                let mut grown = VertexSet::EMPTY;
                for v in frontier.iter() {
                    grown = grown.union(self.adj[v]);
                }
                frontier = grown.intersection(s).difference(comp);
                comp = comp.union(frontier);
            }
            parts.push(comp);
            rest = rest.difference(comp);
        }
        parts
    }

    /// Whether the set `s` induces a connected subgraph (false for `∅`).
    pub fn is_connected_on(&self, s: VertexSet) -> bool {
        match s.first() {
            None => false,
            Some(_) => self.induced_components(s).len() == 1,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    n: usize,
    edges: Vec<(i64, i64)>,
}

/// Parses either the JSON document `{"n": .., "edges": [[i, j], ..]}` or
/// the edge-list text format (`n <int>` header, one `i j` pair per line,
/// `#` comments). Vertices are 1-based in both.
pub fn parse_graph(document: &str) -> Result<Graph> {
    if document.trim_start().starts_with('{') {
        parse_graph_json(document)
    } else {
        parse_edge_list(document)
    }
}

fn parse_graph_json(document: &str) -> Result<Graph> {
    let doc: GraphDoc = serde_json::from_str(document).map_err(|e| Error::Parse {
        at: format!("line {} column {}", e.line(), e.column()),
        msg: e.to_string(),
    })?;
    let mut g = Graph::empty(doc.n)?;
    for (k, &(i, j)) in doc.edges.iter().enumerate() {
        g.add_edge_labeled(i, j, &format!("edge #{}", k + 1))?;
    }
    Ok(g)
}

fn parse_edge_list(document: &str) -> Result<Graph> {
    let mut graph: Option<Graph> = None;
    for (idx, raw) in document.lines().enumerate() {
        let line_no = idx + 1;
        let at = || format!("line {line_no}");
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match &mut graph {
            None => {
                if toks.len() != 2 || toks[0] != "n" {
                    return Err(Error::Parse {
                        at: at(),
                        msg: format!("expected header `n <int>`, found `{line}`"),
                    });
                }
                let n = toks[1].parse::<usize>().map_err(|e| Error::Parse {
                    at: at(),
                    msg: format!("bad vertex count `{}`: {e}", toks[1]),
                })?;
                graph = Some(Graph::empty(n)?);
            }
            Some(g) => {
                if toks.len() != 2 {
                    return Err(Error::Parse {
                        at: at(),
                        msg: format!("expected `i j`, found `{line}`"),
                    });
                }
                let parse = |t: &str| {
                    t.parse::<i64>().map_err(|e| Error::Parse {
                        at: at(),
                        msg: format!("bad vertex `{t}`: {e}"),
                    })
                };
                let (i, j) = (parse(toks[0])?, parse(toks[1])?);
                g.add_edge_labeled(i, j, &at())?;
            }
        }
    }
    graph.ok_or_else(|| Error::Parse {
        at: "end of input".into(),
        msg: "missing `n <int>` header".into(),
    })
}

/// JSON form of a graph, 1-based.
pub fn graph_to_json(g: &Graph) -> serde_json::Value {
    let edges: Vec<[usize; 2]> = g.edges().into_iter().map(|(i, j)| [i + 1, j + 1]).collect();
    serde_json::json!({ "n": g.n(), "edges": edges })
}
