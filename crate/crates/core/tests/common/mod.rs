#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use mmlhub::article::{Anchor, ArticleName, DirectiveKind};
use mmlhub::graph::DepGraph;
use mmlhub::lsi::svd::Svd;
use mmlhub::lsi::SparseMatrix;
use nalgebra::DMatrix;
use mmlhub::platform::{BuildSettings, Platform};
use mmlhub::users::{hash_token, Role, User};
use rand::rngs::StdRng;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/mml").join(name)
}

pub fn name(s: &str) -> ArticleName {
    ArticleName::new(s).unwrap()
}

pub fn anchor(s: &str) -> Anchor {
    s.parse().unwrap()
}

pub type Edges = BTreeSet<(ArticleName, ArticleName)>;

/// Random DAG on `n` nodes with independent edge probability `density`
/// between topologically ordered pairs. Labels are shuffled so name order
/// says nothing about the topological order.
pub fn random_dag(rng: &mut StdRng, n: usize, density: f64) -> (BTreeSet<ArticleName>, Edges) {
    let mut labels: Vec<ArticleName> = (0..n).map(|i| name(&format!("N{i:03}"))).collect();
    labels.shuffle(rng);
    let mut edges = BTreeSet::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random_bool(density) {
                edges.insert((labels[i].clone(), labels[j].clone()));
            }
        }
    }
    (labels.into_iter().collect(), edges)
}

pub fn dag_graph(nodes: &BTreeSet<ArticleName>, edges: &Edges) -> DepGraph {
    DepGraph::from_edges(nodes.clone(), edges.clone()).unwrap()
}

fn adjacency(edges: &Edges) -> BTreeMap<&ArticleName, Vec<&ArticleName>> {
    let mut adj: BTreeMap<&ArticleName, Vec<&ArticleName>> = BTreeMap::new();
    for (a, b) in edges {
        adj.entry(a).or_default().push(b);
    }
    adj
}

/// Nodes reachable from `start` by a path of length at least one.
pub fn reachable(edges: &Edges, start: &ArticleName) -> BTreeSet<ArticleName> {
    let adj = adjacency(edges);
    let mut seen = BTreeSet::new();
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for &v in adj.get(u).into_iter().flatten() {
            if seen.insert(v.clone()) {
                stack.push(v);
            }
        }
    }
    seen
}

pub fn closure(nodes: &BTreeSet<ArticleName>, edges: &Edges) -> Edges {
    nodes
        .iter()
        .flat_map(|u| reachable(edges, u).into_iter().map(move |v| (u.clone(), v)))
        .collect()
}

/// Delete-and-check: an edge is redundant iff its head stays reachable
/// from its tail without it.
pub fn brute_force_reduction(edges: &Edges) -> Edges {
    edges
        .iter()
        .filter(|e| {
            let mut rest = edges.clone();
            rest.remove(*e);
            !reachable(&rest, &e.0).contains(&e.1)
        })
        .cloned()
        .collect()
}

/// Memoized longest path to a sink.
pub fn brute_force_layers(nodes: &BTreeSet<ArticleName>, edges: &Edges) -> BTreeMap<ArticleName, usize> {
    fn depth<'a>(
        u: &'a ArticleName,
        adj: &BTreeMap<&'a ArticleName, Vec<&'a ArticleName>>,
        memo: &mut BTreeMap<&'a ArticleName, usize>,
    ) -> usize {
        if let Some(&d) = memo.get(u) {
            return d;
        }
        let d = adj.get(u).into_iter().flatten().map(|v| depth(v, adj, memo) + 1).max().unwrap_or(0);
        memo.insert(u, d);
        d
    }
    let adj = adjacency(edges);
    let mut memo = BTreeMap::new();
    nodes.iter().map(|n| (n.clone(), depth(n, &adj, &mut memo))).collect()
}

/// A random article in the supported subset. Items always start at column
/// zero and nothing else there begins with an item keyword, so counting
/// such lines is an independent oracle for the item count.
pub fn random_article(rng: &mut StdRng) -> String {
    let mut s = String::new();
    if rng.random_bool(0.5) {
        s.push_str(":: generated article\n\n");
    }
    s.push_str("environ\n\n");
    let pool = ["TARSKI", "XBOOLE_0", "XBOOLE_1", "SUBSET_1", "RELAT_1", "FUNCT_1"];
    for kw in ["vocabularies", "notations", "definitions", "theorems", "schemes"] {
        if rng.random_bool(0.6) {
            let k = rng.random_range(1..=3);
            let names: Vec<&str> = pool.choose_multiple(rng, k).copied().collect();
            s.push_str(&format!(" {kw} {};\n", names.join(", ")));
        }
    }
    s.push_str("\nbegin\n\n");
    if rng.random_bool(0.5) {
        s.push_str("reserve x, y for object, X, Y for set;\n\n");
    }
    let items = rng.random_range(0..12);
    for i in 0..items {
        if rng.random_bool(0.2) {
            s.push_str("  :: theorem mentioned in a comment\n");
        }
        match rng.random_range(0..10) {
            0..=5 => theorem(rng, &mut s, i),
            6..=7 => definition(rng, &mut s),
            8 => scheme(rng, &mut s, i),
            _ => {
                s.push_str("registration\n  cluster empty for set;\n  existence\n  proof\n    thus thesis;\n  end;\nend;\n");
                theorem(rng, &mut s, i);
            }
        }
        s.push('\n');
    }
    if rng.random_bool(0.3) {
        s.pop();
    }
    s
}

fn proof(rng: &mut StdRng, s: &mut String, depth: usize) {
    let pad = "  ".repeat(depth);
    s.push_str(&format!("{pad}proof\n"));
    for _ in 0..rng.random_range(0..3) {
        match rng.random_range(0..4) {
            0 if depth < 3 => {
                s.push_str(&format!("{pad}  now\n{pad}    let z be set;\n{pad}    thus z = z;\n{pad}  end;\n"));
            }
            1 if depth < 3 => {
                s.push_str(&format!("{pad}  A1: x in X\n"));
                proof(rng, s, depth + 1);
            }
            2 => s.push_str(&format!("{pad}  per cases;\n{pad}  suppose x in X;\n{pad}    hence thesis;\n{pad}  end;\n")),
            _ => s.push_str(&format!("{pad}  thus x = x by TARSKI:1;\n")),
        }
    }
    s.push_str(&format!("{pad}end;\n"));
}

fn theorem(rng: &mut StdRng, s: &mut String, i: usize) {
    s.push_str("theorem");
    if rng.random_bool(0.6) {
        s.push_str(&format!(" Th{i}:"));
    }
    let stmt = ["x in X implies x in X \\/ Y", "X c= X", "for x holds x = x", "X /\\ Y c= X"][rng.random_range(0..4)];
    if rng.random_bool(0.5) {
        s.push_str(&format!("\n  {stmt}"));
    } else {
        s.push_str(&format!(" {stmt}"));
    }
    match rng.random_range(0..3) {
        0 => s.push_str(";\n"),
        1 => s.push_str(" by TARSKI:2;\n"),
        _ => {
            s.push('\n');
            proof(rng, s, 0);
        }
    }
}

fn definition(rng: &mut StdRng, s: &mut String) {
    s.push_str("definition\n  let X be set;\n");
    match rng.random_range(0..3) {
        0 => s.push_str("  func f(X) -> set means\n    x in it iff x in X;\n  existence\n"),
        1 => s.push_str("  pred X is_tiny means\n    X c= {};\n"),
        _ => s.push_str("  attr X is small means\n    not ex x st x in X;\n"),
    }
    if rng.random_bool(0.5) {
        proof(rng, s, 1);
    }
    s.push_str("end;\n");
}

fn scheme(rng: &mut StdRng, s: &mut String, i: usize) {
    s.push_str(&format!("scheme Sch{i} {{ P[set] }} :\n  P[{{}}]\nprovided\nA1: P[{{}}]\n"));
    proof(rng, s, 0);
}

/// Lines that begin (at column zero) with an item keyword.
pub fn line_scan_item_count(source: &str) -> usize {
    source
        .lines()
        .filter(|l| {
            ["theorem", "definition", "scheme"].iter().any(|kw| {
                l.strip_prefix(kw).is_some_and(|rest| rest.is_empty() || rest.starts_with([' ', ':', '\n']))
            })
        })
        .count()
}

/// Random `rows × cols` matrix with entries in `[0, 1)` at the given
/// density, in both sparse and dense form.
pub fn random_sparse(rng: &mut StdRng, rows: usize, cols: usize, density: f64) -> (SparseMatrix, DMatrix<f64>) {
    let data: Vec<f64> = (0..rows * cols)
        .map(|_| if rng.random_bool(density) { rng.random_range(0.0..1.0) } else { 0.0 })
        .collect();
    (SparseMatrix::from_dense(rows, cols, &data), DMatrix::from_row_slice(rows, cols, &data))
}

pub fn oracle_singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Largest deviation of `MᵀM` from the identity for a row-major
/// `rows × k` matrix.
pub fn gram_error(rows: usize, k: usize, m: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            let dot: f64 = (0..rows).map(|r| m[r * k + i] * m[r * k + j]).sum();
            let id = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - id).abs());
        }
    }
    worst
}

/// Frobenius norm of `W - U S Vᵀ`.
pub fn reconstruction_error(w: &DMatrix<f64>, svd: &Svd) -> f64 {
    let k = svd.rank();
    let mut err = 0.0;
    for r in 0..svd.rows {
        for c in 0..svd.cols {
            let approx: f64 = (0..k).map(|j| svd.u_at(r, j) * svd.s[j] * svd.v_at(c, j)).sum();
            err += (w[(r, c)] - approx).powi(2);
        }
    }
    err.sqrt()
}

/// Two topical clusters of five statements each: documents 1-5 are about
/// group homomorphisms, 6-10 about topological spaces.
pub fn two_cluster_corpus() -> Vec<(Anchor, String)> {
    let texts = [
        "group homomorphism kernel normal subgroup",
        "group homomorphism image subgroup",
        "group isomorphism homomorphism bijective",
        "group homomorphism composition group",
        "kernel of group homomorphism trivial",
        "topological space open subset closure",
        "topological space closed subset interior",
        "continuous map topological space open",
        "compact topological space open cover",
        "interior closure subset topological space",
    ];
    texts.iter().enumerate().map(|(i, t)| (anchor(&format!("LSI:theorem:{}", i + 1)), t.to_string())).collect()
}

pub const ADMIN_TOKEN: &str = "admin-token";
pub const EDITOR_TOKEN: &str = "editor-token";
pub const BLOCKED_TOKEN: &str = "blocked-token";

pub fn users() -> Vec<User> {
    let user = |id: &str, role, blocked, token: &str| User {
        id: id.into(),
        name: id.to_uppercase(),
        role,
        blocked,
        token_hash: hash_token(token),
    };
    vec![
        user("admin", Role::Admin, false, ADMIN_TOKEN),
        user("editor", Role::Editor, false, EDITOR_TOKEN),
        user("mallory", Role::Editor, true, BLOCKED_TOKEN),
    ]
}

pub fn settings() -> BuildSettings {
    BuildSettings { directive_kinds: DirectiveKind::article_references().into_iter().collect(), lsi_k: None }
}

/// A platform in a fresh data directory, with `corpus` ingested if given.
pub fn platform(corpus: Option<&str>) -> (tempfile::TempDir, Platform) {
    let dir = tempfile::tempdir().unwrap();
    let p = Platform::open_dir(dir.path(), settings(), users()).unwrap();
    if let Some(c) = corpus {
        p.ingest(&fixture(c), c).unwrap();
    }
    (dir, p)
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn bin() -> std::process::Command {
    let mut cmd = std::process::Command::new(env!("CARGO_BIN_EXE_mmlhub"));
    cmd.env_remove("MMLHUB_LISTEN").env_remove("MMLHUB_DATA_DIR").env("RUST_LOG", "error");
    cmd
}

pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the binary with `--config <config>` prepended.
pub fn cli(config: &std::path::Path, args: &[&str]) -> CliOutput {
    let out = bin().arg("--config").arg(config).args(args).output().unwrap();
    CliOutput {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

/// A data directory plus a config file pointing at it, listening on a
/// free local port.
pub struct Deployment {
    pub dir: tempfile::TempDir,
    pub config: PathBuf,
    pub port: u16,
}

pub fn deployment() -> Deployment {
    let dir = tempfile::tempdir().unwrap();
    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let config = dir.path().join("mmlhub.toml");
    let text = format!(
        r#"listen = "127.0.0.1:{port}"
data_dir = "data"

[[users]]
id = "admin"
role = "admin"
token = "{ADMIN_TOKEN}"

[[users]]
id = "editor"
role = "editor"
token = "{EDITOR_TOKEN}"
"#
    );
    std::fs::write(&config, text).unwrap();
    Deployment { dir, config, port }
}

/// A running `serve` process, killed on drop.
pub struct Server {
    child: std::process::Child,
    pub base: String,
}

impl Server {
    pub fn start(d: &Deployment) -> Server {
        let child = bin().arg("--config").arg(&d.config).arg("serve").spawn().unwrap();
        let server = Server { child, base: format!("http://127.0.0.1:{}", d.port) };
        let client = reqwest::blocking::Client::new();
        let deadline = std::time::Instant::now() + std::time::Duration::from_secs(30);
        while std::time::Instant::now() < deadline {
            if client.get(server.url("/api/state")).send().is_ok() {
                return server;
            }
            std::thread::sleep(std::time::Duration::from_millis(50));
        }
        panic!("server did not come up on port {}", d.port);
    }

    pub fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Queries drawn from one cluster of [`two_cluster_corpus`]: every
/// document text, and every term that occurs in that cluster only. Each
/// comes with the anchors of its own cluster.
pub fn within_cluster_queries() -> Vec<(String, Vec<Anchor>)> {
    let docs = two_cluster_corpus();
    let clusters = [&docs[..5], &docs[5..]];
    let terms = |c: &[(Anchor, String)]| -> BTreeSet<String> {
        c.iter().flat_map(|(_, t)| mmlhub::lsi::tokenize(t)).collect()
    };
    let vocab = [terms(clusters[0]), terms(clusters[1])];
    let mut out = Vec::new();
    for (i, cluster) in clusters.iter().enumerate() {
        let own: Vec<Anchor> = cluster.iter().map(|(a, _)| a.clone()).collect();
        for (_, text) in cluster.iter() {
            out.push((text.clone(), own.clone()));
        }
        for term in vocab[i].difference(&vocab[1 - i]) {
            out.push((term.clone(), own.clone()));
        }
    }
    out
}

/// Queries of [`within_cluster_queries`] whose top five results are not
/// exactly their own cluster, at rank `k`.
pub fn separation_failures(k: usize) -> Vec<String> {
    let index = mmlhub::lsi::LsiIndex::build(two_cluster_corpus(), Some(k)).unwrap();
    within_cluster_queries()
        .into_iter()
        .filter(|(query, own)| {
            let hits = index.search(query, 10);
            hits.len() != 10 || hits[..5].iter().any(|h| !own.contains(&h.anchor))
        })
        .map(|(q, _)| q)
        .collect()
}
