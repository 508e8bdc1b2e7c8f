mod common;

use common::{
    gram_error, oracle_singular_values, random_sparse, reconstruction_error, separation_failures, two_cluster_corpus,
    within_cluster_queries,
};
use mmlhub::article::Anchor;
use mmlhub::lsi::svd::truncated_svd;
use mmlhub::lsi::{build_tfidf, quantize, rank, rank_vector, Hit, LsiIndex, LsiModel};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[test]
fn eight_by_six_matches_dense_oracle() {
    let mut rng = StdRng::seed_from_u64(86);
    let (w, dense) = random_sparse(&mut rng, 8, 6, 0.4);
    let oracle = oracle_singular_values(&dense);
    let svd = truncated_svd(&w, 3).unwrap();
    for (j, s) in svd.s.iter().enumerate() {
        assert!((s - oracle[j]).abs() < 1e-8, "σ{j}: {s} vs {}", oracle[j]);
    }
}

#[test]
fn random_small_matrices_against_oracle() {
    let mut rng = StdRng::seed_from_u64(7);
    for case in 0..200 {
        let rows = rng.random_range(1..=10);
        let cols = rng.random_range(1..=10);
        let density = rng.random_range(0.1..0.9);
        let (w, dense) = random_sparse(&mut rng, rows, cols, density);
        let oracle = oracle_singular_values(&dense);
        let k = rng.random_range(1..=rows.min(cols));
        let svd = truncated_svd(&w, k).unwrap();
        let r = svd.rank();
        assert!(r <= k);
        for (j, (s, o)) in svd.s.iter().zip(&oracle).enumerate() {
            assert!((s - o).abs() < 1e-8, "case {case}: σ{j} {s} vs {o}");
        }
        for o in oracle.iter().take(k).skip(r) {
            assert!(*o <= 1e-6 * oracle[0] + 1e-8, "case {case}: dropped σ {o} of {}", oracle[0]);
        }
        assert!(svd.s.windows(2).all(|p| p[0] >= p[1]) && svd.s.iter().all(|&s| s > 0.0));
        assert!(gram_error(rows, r, &svd.u) < 1e-8, "case {case}: U not orthonormal");
        assert!(gram_error(cols, r, &svd.v) < 1e-8, "case {case}: V not orthonormal");
    }
}

#[test]
fn reconstruction_error_non_increasing_in_rank() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..30 {
        let (w, dense) = random_sparse(&mut rng, 9, 7, 0.5);
        let norm = w.frobenius_norm();
        let mut last = norm;
        for k in 1..=7 {
            let e = reconstruction_error(&dense, &truncated_svd(&w, k).unwrap());
            assert!(e <= last + 1e-10, "k={k}: {e} > {last}");
            last = e;
        }
    }
}

#[test]
fn larger_sparse_matrix_converges() {
    let mut rng = StdRng::seed_from_u64(3);
    let (w, dense) = random_sparse(&mut rng, 120, 80, 0.05);
    let oracle = oracle_singular_values(&dense);
    let svd = truncated_svd(&w, 20).unwrap();
    for j in 0..20 {
        assert!((svd.s[j] - oracle[j]).abs() < 1e-8 * oracle[0], "σ{j}");
    }
    assert!(gram_error(120, 20, &svd.u) < 1e-8);
}

fn anchors(n: usize) -> Vec<Anchor> {
    (1..=n).map(|i| format!("T:theorem:{i}").parse().unwrap()).collect()
}

/// Exhaustive cosine ranking in concept space, computed from the dense
/// oracle factors.
fn oracle_ranking(docs: &[(Anchor, String)], k: usize, query: &str) -> Vec<Anchor> {
    let m = build_tfidf(docs).unwrap();
    let (t, d) = (m.terms.len(), m.docs.len());
    let dense = DMatrix::from_row_slice(t, d, &m.weights.to_dense());
    let svd = dense.svd(true, true);
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let order: Vec<usize> = order.into_iter().take(k).collect();
    let u = svd.u.unwrap();
    let vt = svd.v_t.unwrap();
    let q = m.query_vector(query).unwrap();
    let qhat: Vec<f64> = order
        .iter()
        .map(|&j| (0..t).map(|r| u[(r, j)] * q[r]).sum::<f64>() / svd.singular_values[j])
        .collect();
    let mut scored: Vec<(f64, Anchor)> = (0..d)
        .map(|c| {
            let v: Vec<f64> = order.iter().map(|&j| vt[(j, c)]).collect();
            let dot: f64 = v.iter().zip(&qhat).map(|(a, b)| a * b).sum();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt() * qhat.iter().map(|x| x * x).sum::<f64>().sqrt();
            (quantize(dot / n), m.docs[c].clone())
        })
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.to_string().cmp(&b.1.to_string())));
    scored.into_iter().map(|(_, a)| a).collect()
}

#[test]
fn five_doc_exact_query_matches_oracle() {
    let texts = [
        "x c= y implies x /\\ y = x",
        "x \\/ y = y \\/ x",
        "f is one-to-one implies f\" is Function",
        "G is commutative Group",
        "x in y implies not y in x",
    ];
    let docs: Vec<(Anchor, String)> = anchors(5).into_iter().zip(texts.iter().map(|s| s.to_string())).collect();
    let idx = LsiIndex::build(docs.clone(), Some(4)).unwrap();
    for (i, (anchor, text)) in docs.iter().enumerate() {
        let hits = idx.search(text, 5);
        assert_eq!(&hits[0].anchor, anchor, "doc {i}");
        let got: Vec<Anchor> = hits.iter().map(|h| h.anchor.clone()).collect();
        assert_eq!(got, oracle_ranking(&docs, idx.model.k, text));
    }
}

#[test]
fn two_clusters_separate() {
    let docs = two_cluster_corpus();
    let idx = LsiIndex::build(docs.clone(), Some(2)).unwrap();
    let hits = idx.search("group", 10);
    assert_eq!(hits.len(), 10);
    let expected_group: Vec<&Anchor> = docs[..5].iter().map(|(a, _)| a).collect();
    for h in &hits[..5] {
        assert!(expected_group.contains(&&h.anchor), "{} ranked among the top five", h.anchor);
    }
    let got: Vec<Anchor> = hits.iter().map(|h| h.anchor.clone()).collect();
    assert_eq!(got, oracle_ranking(&docs, 2, "group"));
}

fn model_for(docs: &[(Anchor, String)], k: usize) -> (LsiModel, mmlhub::lsi::TermDocMatrix) {
    let m = build_tfidf(docs).unwrap();
    (LsiModel::build(&m, k).unwrap(), m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scaling_query_keeps_ranking(seed in any::<u64>(), c in 0.01f64..100.0) {
        let mut rng = StdRng::seed_from_u64(seed);
        let words = ["set", "subset", "union", "group", "ring", "field", "space", "open", "map"];
        let docs: Vec<(Anchor, String)> = anchors(8)
            .into_iter()
            .map(|a| (a, (0..4).map(|_| words[rng.random_range(0..words.len())]).collect::<Vec<_>>().join(" ")))
            .collect();
        let (model, m) = model_for(&docs, 3.min(m_dim(&docs)));
        let q = m.query_vector("set union group").unwrap_or_else(|| vec![1.0; m.terms.len()]);
        let scaled: Vec<f64> = q.iter().map(|x| x * c).collect();
        let a = rank_vector(&model, &m, &q, 8);
        let b = rank_vector(&model, &m, &scaled, 8);
        prop_assert!(same_up_to_ties(&a, &b));
    }

    #[test]
    fn document_order_does_not_change_results(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let words = ["set", "subset", "union", "group", "ring", "field", "space", "open", "map", "ordinal"];
        let docs: Vec<(Anchor, String)> = anchors(7)
            .into_iter()
            .map(|a| (a, (0..5).map(|_| words[rng.random_range(0..words.len())]).collect::<Vec<_>>().join(" ")))
            .collect();
        let mut shuffled = docs.clone();
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.random_range(0..=i));
        }
        let k = 3.min(m_dim(&docs));
        let (m1, t1) = model_for(&docs, k);
        let (m2, t2) = model_for(&shuffled, k);
        for query in ["set union", "group ring field", "open space map ordinal"] {
            let a = rank(&m1, &t1, query, 10);
            let b = rank(&m2, &t2, query, 10);
            prop_assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x.score - y.score).abs() < 1e-9, "{} vs {}", x.score, y.score);
            }
            // Orders agree up to ties within tolerance.
            let ax: Vec<_> = a.iter().map(|h| (h.anchor.clone(), (h.score * 1e6).round())).collect();
            let mut bx: Vec<_> = b.iter().map(|h| (h.anchor.clone(), (h.score * 1e6).round())).collect();
            let mut ay = ax.clone();
            ay.sort_by_key(|p| p.0.to_string());
            bx.sort_by_key(|p| p.0.to_string());
            prop_assert_eq!(ay, bx);
        }
    }

    #[test]
    fn identical_query_beats_disjoint_documents(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let words = ["alpha", "beta", "gamma", "delta", "eps", "zeta", "eta", "theta"];
        let docs: Vec<(Anchor, String)> = anchors(6)
            .into_iter()
            .map(|a| (a, (0..3).map(|_| words[rng.random_range(0..words.len())]).collect::<Vec<_>>().join(" ")))
            .collect();
        let (model, m) = model_for(&docs, m_dim(&docs));
        for (anchor, text) in &docs {
            let hits = rank(&model, &m, text, 10);
            let own = hits.iter().find(|h| &h.anchor == anchor).map(|h| h.score);
            let mine: std::collections::BTreeSet<String> = mmlhub::lsi::tokenize(text).into_iter().collect();
            for (other, other_text) in &docs {
                let theirs: std::collections::BTreeSet<String> = mmlhub::lsi::tokenize(other_text).into_iter().collect();
                if mine.is_disjoint(&theirs) {
                    if let (Some(own), Some(o)) = (own, hits.iter().find(|h| &h.anchor == other)) {
                        prop_assert!(own >= o.score - 1e-12);
                    }
                }
            }
        }
    }
}

/// Equal scores position by position, and equal anchors wherever the
/// neighbouring scores are distinguishable.
fn same_up_to_ties(a: &[Hit], b: &[Hit]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).enumerate().all(|(i, (x, y))| {
            let tied = |j: usize| j < a.len() && (a[j].score - x.score).abs() < 1e-9;
            (x.score - y.score).abs() < 1e-9 && (x.anchor == y.anchor || (i > 0 && tied(i - 1)) || tied(i + 1))
        })
}

fn m_dim(docs: &[(Anchor, String)]) -> usize {
    let m = build_tfidf(docs).unwrap();
    m.terms.len().min(m.docs.len())
}

#[test]
fn every_within_cluster_query_separates() {
    assert!(within_cluster_queries().len() > 10);
    assert_eq!(separation_failures(2), Vec::<String>::new());
}
