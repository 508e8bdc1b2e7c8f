//! Article dependency graph: construction from environment directives,
//! transitive reduction, longest-path layering, and queries.

mod export;
mod reduce;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::article::{Article, ArticleName, DirectiveKind};

pub use export::{GraphJson, JsonEdge, JsonNode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("cyclic dependency: {}", render_cycle(.0))]
    CyclicDependency(Vec<ArticleName>),
    #[error("graph is not acyclic")]
    NotADag,
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("duplicate article {0}")]
    DuplicateArticle(ArticleName),
    #[error("self-loop on {0}")]
    SelfLoop(ArticleName),
}

fn render_cycle(cycle: &[ArticleName]) -> String {
    cycle.iter().map(ArticleName::as_str).collect::<Vec<_>>().join(" -> ")
}

/// Directed acyclic graph over article names. An edge `(a, b)` means `a`
/// depends on `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepGraph {
    nodes: BTreeSet<ArticleName>,
    edges: BTreeSet<(ArticleName, ArticleName)>,
    layers: Option<BTreeMap<ArticleName, usize>>,
    reduced: bool,
    warnings: Vec<String>,
}

/// Node-indexed adjacency in lexicographic node order.
pub(crate) struct Indexed<'a> {
    pub names: Vec<&'a ArticleName>,
    pub succ: Vec<Vec<usize>>,
}

impl DepGraph {
    /// Builds a graph from explicit nodes and edges, rejecting self-loops,
    /// dangling endpoints and cycles.
    pub fn from_edges(
        nodes: impl IntoIterator<Item = ArticleName>,
        edges: impl IntoIterator<Item = (ArticleName, ArticleName)>,
    ) -> Result<Self, GraphError> {
        let nodes: BTreeSet<_> = nodes.into_iter().collect();
        let mut set = BTreeSet::new();
        for (from, to) in edges {
            if from == to {
                return Err(GraphError::SelfLoop(from));
            }
            for end in [&from, &to] {
                if !nodes.contains(end) {
                    return Err(GraphError::UnknownNode(end.to_string()));
                }
            }
            set.insert((from, to));
        }
        let graph = DepGraph { nodes, edges: set, layers: None, reduced: false, warnings: Vec::new() };
        if let Some(cycle) = graph.find_cycle() {
            return Err(GraphError::CyclicDependency(cycle));
        }
        Ok(graph)
    }

    pub fn nodes(&self) -> &BTreeSet<ArticleName> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<(ArticleName, ArticleName)> {
        &self.edges
    }

    pub fn layers(&self) -> Option<&BTreeMap<ArticleName, usize>> {
        self.layers.as_ref()
    }

    pub fn layer(&self, node: &ArticleName) -> Option<usize> {
        self.layers.as_ref()?.get(node).copied()
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    /// Directive names that did not resolve to a corpus article.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn contains(&self, node: &ArticleName) -> bool {
        self.nodes.contains(node)
    }

    /// Direct dependencies of `node`.
    pub fn dependencies<'a>(&'a self, node: &'a ArticleName) -> impl Iterator<Item = &'a ArticleName> + 'a {
        self.edges
            .range((node.clone(), min_name())..)
            .take_while(move |(from, _)| from == node)
            .map(|(_, to)| to)
    }

    /// Every node reachable from `node` by a path of length at least one.
    pub fn reachable_from(&self, node: &ArticleName) -> BTreeSet<ArticleName> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<&ArticleName> = self.dependencies(node).collect();
        while let Some(n) = stack.pop() {
            if seen.insert(n.clone()) {
                stack.extend(self.dependencies(n));
            }
        }
        seen
    }

    pub(crate) fn indexed(&self) -> Indexed<'_> {
        let names: Vec<&ArticleName> = self.nodes.iter().collect();
        let index: BTreeMap<&ArticleName, usize> = names.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let mut succ = vec![Vec::new(); names.len()];
        for (from, to) in &self.edges {
            succ[index[from]].push(index[to]);
        }
        Indexed { names, succ }
    }

    /// A witness cycle `[a, b, ..., a]`, searching from nodes in
    /// lexicographic order.
    fn find_cycle(&self) -> Option<Vec<ArticleName>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Active,
            Done,
        }
        let g = self.indexed();
        let mut mark = vec![Mark::New; g.names.len()];
        for root in 0..g.names.len() {
            if mark[root] != Mark::New {
                continue;
            }
            // (node, next successor position)
            let mut stack = vec![(root, 0usize)];
            mark[root] = Mark::Active;
            while let Some(&mut (node, ref mut pos)) = stack.last_mut() {
                if let Some(&next) = g.succ[node].get(*pos) {
                    *pos += 1;
                    match mark[next] {
                        Mark::New => {
                            mark[next] = Mark::Active;
                            stack.push((next, 0));
                        }
                        Mark::Active => {
                            let start = stack.iter().position(|(n, _)| *n == next).unwrap_or(0);
                            let mut cycle: Vec<ArticleName> =
                                stack[start..].iter().map(|(n, _)| g.names[*n].clone()).collect();
                            cycle.push(g.names[next].clone());
                            return Some(cycle);
                        }
                        Mark::Done => {}
                    }
                } else {
                    mark[node] = Mark::Done;
                    stack.pop();
                }
            }
        }
        None
    }

    /// Nodes ordered so that every node precedes its dependencies.
    pub(crate) fn topological_order(g: &Indexed<'_>) -> Result<Vec<usize>, GraphError> {
        let n = g.names.len();
        let mut indegree = vec![0usize; n];
        for succ in &g.succ {
            for &v in succ {
                indegree[v] += 1;
            }
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &v in &g.succ[u] {
                indegree[v] -= 1;
                if indegree[v] == 0 {
                    queue.push_back(v);
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            Err(GraphError::NotADag)
        }
    }
}

fn min_name() -> ArticleName {
    // The smallest valid name; used as a range bound only.
    ArticleName::new("A").expect("valid name")
}

/// Builds the dependency graph of a corpus. An edge `(a, b)` exists iff `b`
/// is another corpus article named in a directive of `a` whose kind is in
/// `kinds`.
pub fn build_graph(articles: &[Article], kinds: &BTreeSet<DirectiveKind>) -> Result<DepGraph, GraphError> {
    let mut nodes = BTreeSet::new();
    for a in articles {
        if !nodes.insert(a.name.clone()) {
            return Err(GraphError::DuplicateArticle(a.name.clone()));
        }
    }
    let mut edges = BTreeSet::new();
    let mut warnings = BTreeSet::new();
    for a in articles {
        for (kind, name) in a.env.references() {
            if !kinds.contains(&kind) || name == &a.name {
                continue;
            }
            if nodes.contains(name) {
                edges.insert((a.name.clone(), name.clone()));
            } else {
                warnings.insert(format!("{}: {kind} {name} is not a corpus article", a.name));
            }
        }
    }
    let mut graph = DepGraph::from_edges(nodes, edges)?;
    for w in &warnings {
        log::debug!("{w}");
    }
    graph.warnings = warnings.into_iter().collect();
    Ok(graph)
}

/// Assigns every node the length of its longest path to a sink.
pub fn assign_layers(g: &DepGraph) -> Result<DepGraph, GraphError> {
    let idx = g.indexed();
    let order = DepGraph::topological_order(&idx)?;
    let mut layer = vec![0usize; idx.names.len()];
    for &u in order.iter().rev() {
        layer[u] = idx.succ[u].iter().map(|&v| layer[v] + 1).max().unwrap_or(0);
    }
    let layers = idx.names.iter().zip(layer).map(|(n, l)| ((*n).clone(), l)).collect();
    Ok(DepGraph { layers: Some(layers), ..g.clone() })
}

pub use reduce::transitive_reduction;

/// Induced subgraph on the nodes within undirected distance `radius` of
/// `center`.
pub fn neighborhood(g: &DepGraph, center: &ArticleName, radius: usize) -> Result<DepGraph, GraphError> {
    if !g.contains(center) {
        return Err(GraphError::UnknownNode(center.to_string()));
    }
    let mut adjacent: BTreeMap<&ArticleName, Vec<&ArticleName>> = BTreeMap::new();
    for (from, to) in &g.edges {
        adjacent.entry(from).or_default().push(to);
        adjacent.entry(to).or_default().push(from);
    }
    let mut dist: BTreeMap<&ArticleName, usize> = BTreeMap::from([(center, 0)]);
    let mut queue = VecDeque::from([center]);
    while let Some(u) = queue.pop_front() {
        let d = dist[u];
        if d == radius {
            continue;
        }
        for &v in adjacent.get(u).into_iter().flatten() {
            if !dist.contains_key(v) {
                dist.insert(v, d + 1);
                queue.push_back(v);
            }
        }
    }
    let nodes: BTreeSet<ArticleName> = dist.keys().map(|n| (*n).clone()).collect();
    let edges = g
        .edges
        .iter()
        .filter(|(a, b)| nodes.contains(a) && nodes.contains(b))
        .cloned()
        .collect();
    let layers = g
        .layers
        .as_ref()
        .map(|l| l.iter().filter(|(n, _)| nodes.contains(*n)).map(|(n, v)| (n.clone(), *v)).collect());
    Ok(DepGraph { nodes, edges, layers, reduced: g.reduced, warnings: Vec::new() })
}

/// Case-insensitive node search: exact match, then prefix, then substring
/// matches, each tier in lexicographic order.
pub fn search_nodes(g: &DepGraph, query: &str) -> Vec<ArticleName> {
    let q = query.to_lowercase();
    let mut hits: Vec<(u8, &ArticleName)> = g
        .nodes
        .iter()
        .filter_map(|n| {
            let key = n.as_str().to_lowercase();
            let tier = if key == q {
                0
            } else if key.starts_with(&q) {
                1
            } else if key.contains(&q) {
                2
            } else {
                return None;
            };
            Some((tier, n))
        })
        .collect();
    hits.sort();
    hits.into_iter().map(|(_, n)| n.clone()).collect()
}
