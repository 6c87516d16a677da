//! The scene-graph layer: images as nodes, matched pairs as scored edges.
//!
//! Per-pair classifier scores arrive as quadruples and are combined by a
//! voting rule into one probability per edge; edges below a threshold are
//! pruned and the surviving graph is split into connected components.
//!
//! Graphs are immutable after construction; [`prune`] returns a new graph.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Errors from graph construction and pruning.
#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("score {0} outside [0, 1]")]
    ScoreOutOfRange(f64),
    #[error("self-edge on node {0:?}")]
    SelfEdge(String),
    #[error("edge endpoint {0:?} is not a node")]
    UnknownEndpoint(String),
    #[error("duplicate pair {0} with conflicting scores {1} and {2}")]
    ConflictingDuplicate(PairKey, f64, f64),
    #[error("prune threshold {0} outside [0, 1]")]
    TauOutOfRange(f64),
}

/// An unordered image pair, stored with the lexicographically smaller id first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairKey {
    a: String,
    b: String,
}

impl PairKey {
    pub fn new(x: impl Into<String>, y: impl Into<String>) -> Result<Self, GraphError> {
        let x = x.into();
        let y = y.into();
        if x == y {
            return Err(GraphError::SelfEdge(x));
        }
        if x < y {
            Ok(Self { a: x, b: y })
        } else {
            Ok(Self { a: y, b: x })
        }
    }

    pub fn first(&self) -> &str {
        &self.a
    }

    pub fn second(&self) -> &str {
        &self.b
    }
}

impl fmt::Display for PairKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// The four classifier scores for one image pair, ordered
/// (pred_pq_1, pred_pq_2, pred_qp_1, pred_qp_2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreQuad(pub [f64; 4]);

impl ScoreQuad {
    pub fn new(scores: [f64; 4]) -> Result<Self, GraphError> {
        for &s in &scores {
            if !s.is_finite() || !(0.0..=1.0).contains(&s) {
                return Err(GraphError::ScoreOutOfRange(s));
            }
        }
        Ok(Self(scores))
    }

    /// The same quad with the roles of the two images exchanged.
    pub fn swapped(&self) -> Self {
        let [a, b, c, d] = self.0;
        Self([c, d, a, b])
    }
}

/// Combines the four scores of a pair into one by majority voting: the max
/// when most heads vote positive, the min when most vote negative, and the
/// mean on a tie. Scores exactly at 0.5 abstain.
pub fn aggregate(quad: &ScoreQuad) -> f64 {
    let positive = quad.0.iter().filter(|&&s| s > 0.5).count();
    let negative = quad.0.iter().filter(|&&s| s < 0.5).count();
    if positive > negative {
        quad.0.iter().copied().fold(f64::MIN, f64::max)
    } else if positive < negative {
        quad.0.iter().copied().fold(f64::MAX, f64::min)
    } else {
        (quad.0[0] + quad.0[1] + quad.0[2] + quad.0[3]) / 4.0
    }
}

/// Edge payload: the final match probability, plus the raw quad and inlier
/// count when known.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeData {
    score: f64,
    pub quad: Option<ScoreQuad>,
    pub num_inliers: Option<u32>,
}

impl EdgeData {
    /// Builds edge data from a final score alone.
    pub fn from_score(score: f64) -> Result<Self, GraphError> {
        if !score.is_finite() || !(0.0..=1.0).contains(&score) {
            return Err(GraphError::ScoreOutOfRange(score));
        }
        Ok(Self {
            score,
            quad: None,
            num_inliers: None,
        })
    }

    /// Builds edge data from a quad; the score is its aggregate, which keeps
    /// the two fields consistent by construction.
    pub fn from_quad(quad: ScoreQuad) -> Self {
        Self {
            score: aggregate(&quad),
            quad: Some(quad),
            num_inliers: None,
        }
    }

    pub fn with_inliers(mut self, n: u32) -> Self {
        self.num_inliers = Some(n);
        self
    }

    pub fn score(&self) -> f64 {
        self.score
    }
}

/// Images as nodes, matched pairs as scored edges.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SceneGraph {
    nodes: BTreeSet<String>,
    edges: BTreeMap<PairKey, EdgeData>,
}

impl SceneGraph {
    pub fn nodes(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(String::as_str)
    }

    pub fn edges(&self) -> impl Iterator<Item = (&PairKey, &EdgeData)> {
        self.edges.iter()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, key: &PairKey) -> Option<&EdgeData> {
        self.edges.get(key)
    }
}

/// Result of pruning: surviving/removed edge counts and the connected
/// components of the pruned graph.
#[derive(Debug, Clone, PartialEq)]
pub struct PruneReport {
    pub kept: usize,
    pub removed: usize,
    pub components: Vec<BTreeSet<String>>,
}

/// Builds a scene graph from a node set and scored pairs.
///
/// Isolated nodes are kept. Duplicate pairs (after unordered normalization)
/// are allowed only when their scores agree exactly.
pub fn build_graph(
    nodes: impl IntoIterator<Item = String>,
    pairs: impl IntoIterator<Item = (PairKey, EdgeData)>,
) -> Result<SceneGraph, GraphError> {
    let nodes: BTreeSet<String> = nodes.into_iter().collect();
    let mut edges: BTreeMap<PairKey, EdgeData> = BTreeMap::new();
    for (key, data) in pairs {
        for endpoint in [key.first(), key.second()] {
            if !nodes.contains(endpoint) {
                return Err(GraphError::UnknownEndpoint(endpoint.to_string()));
            }
        }
        if let Some(existing) = edges.get(&key) {
            if existing.score != data.score {
                return Err(GraphError::ConflictingDuplicate(
                    key,
                    existing.score,
                    data.score,
                ));
            }
            continue;
        }
        edges.insert(key, data);
    }
    Ok(SceneGraph { nodes, edges })
}

/// Removes edges with score strictly below `tau`; edges at exactly `tau`
/// survive. All nodes are retained.
pub fn prune(g: &SceneGraph, tau: f64) -> Result<(SceneGraph, PruneReport), GraphError> {
    if !tau.is_finite() || !(0.0..=1.0).contains(&tau) {
        return Err(GraphError::TauOutOfRange(tau));
    }
    let total = g.edge_count();
    let edges: BTreeMap<PairKey, EdgeData> = g
        .edges
        .iter()
        .filter(|(_, data)| data.score >= tau)
        .map(|(k, d)| (k.clone(), d.clone()))
        .collect();
    let pruned = SceneGraph {
        nodes: g.nodes.clone(),
        edges,
    };
    let report = PruneReport {
        kept: pruned.edge_count(),
        removed: total - pruned.edge_count(),
        components: components(&pruned),
    };
    Ok((pruned, report))
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(len: usize) -> Self {
        Self {
            parent: (0..len).collect(),
            size: vec![1; len],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, x: usize, y: usize) {
        let mut xr = self.find(x);
        let mut yr = self.find(y);
        if xr == yr {
            return;
        }
        if self.size[xr] < self.size[yr] {
            std::mem::swap(&mut xr, &mut yr);
        }
        self.parent[yr] = xr;
        self.size[xr] += self.size[yr];
    }
}

/// Connected components, ordered by descending size and then by the
/// lexicographically smallest member.
pub fn components(g: &SceneGraph) -> Vec<BTreeSet<String>> {
    let index: BTreeMap<&str, usize> = g
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let mut uf = UnionFind::new(g.nodes.len());
    for key in g.edges.keys() {
        uf.union(index[key.first()], index[key.second()]);
    }

    let mut by_root: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    for (node, &i) in &index {
        by_root.entry(uf.find(i)).or_default().insert((*node).to_string());
    }
    let mut out: Vec<BTreeSet<String>> = by_root.into_values().collect();
    out.sort_by(|a, b| {
        b.len()
            .cmp(&a.len())
            .then_with(|| a.iter().next().cmp(&b.iter().next()))
    });
    out
}
