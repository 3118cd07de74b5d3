use std::path::Path;
use std::process::{Command, Output};

use navbeam::graphs::{save_graph, SearchGraph};

fn navbeam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_navbeam"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = navbeam(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn field(text: &str, key: &str) -> f64 {
    let prefix = format!("{key}=");
    text.split_whitespace()
        .find_map(|w| w.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("{key} missing from {text}"))
        .parse()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Small uniform base and query sets plus a navigable graph.
fn fixture(dir: &Path) {
    let data = dir.join("data.fvecs");
    let queries = dir.join("queries.fvecs");
    let graph = dir.join("graph.navg");
    ok(&[
        "generate",
        "--kind",
        "uniform",
        "--n",
        "300",
        "--queries",
        "20",
        "--dim",
        "4",
        "--seed",
        "3",
        "--out",
        s(&data),
        "--query-out",
        s(&queries),
    ]);
    ok(&[
        "build-navigable",
        "--data",
        s(&data),
        "--out",
        s(&graph),
        "--seed",
        "5",
    ]);
}

#[test]
fn counterexample_defeats_wide_beam() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let header = ok(&[
        "counterexample",
        "--n",
        "100",
        "--C",
        "50",
        "--out-dir",
        s(d),
    ]);
    assert!(header.contains("seed=0"));
    let (data, graph, query) = (
        d.join("data.fvecs"),
        d.join("graph.navg"),
        d.join("query.fvecs"),
    );
    let base = [
        "search",
        "--data",
        s(&data),
        "--graph",
        s(&graph),
        "--queries",
        s(&query),
        "--k",
        "1",
    ];
    for start in ["0", "medoid"] {
        let mut args = base.to_vec();
        args.extend(["--rule", "beam", "--b", "97", "--start", start]);
        let out = ok(&args);
        assert!(field(&out, "max_approximation_factor") >= 50.0, "{out}");
    }
    let mut args = base.to_vec();
    args.extend(["--rule", "adaptive", "--gamma", "2", "--start", "0"]);
    let out = ok(&args);
    assert_eq!(field(&out, "max_approximation_factor"), 1.0);
    assert!(out.contains("ids=2 "));

    let check = navbeam(&["check-navigable", "--data", s(&data), "--graph", s(&graph)]);
    assert_eq!(check.status.code(), Some(0));
}

#[test]
fn built_graph_is_navigable_and_prunes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fixture(d);
    let data = d.join("data.fvecs");
    let graph = d.join("graph.navg");
    let out = ok(&["check-navigable", "--data", s(&data), "--graph", s(&graph)]);
    assert_eq!(out.trim(), "navigable");

    let pruned = d.join("pruned.navg");
    let out = ok(&[
        "prune",
        "--data",
        s(&data),
        "--graph",
        s(&graph),
        "--out",
        s(&pruned),
    ]);
    assert!(field(&out, "average_degree_after") <= field(&out, "average_degree_before"));
    ok(&["check-navigable", "--data", s(&data), "--graph", s(&pruned)]);
    // a pruned graph is sparse, so the strengthened check fails for large alpha
    let alpha = navbeam(&[
        "check-alpha",
        "--data",
        s(&data),
        "--graph",
        s(&pruned),
        "--alpha",
        "10",
    ]);
    assert_eq!(alpha.status.code(), Some(1));
}

#[test]
fn broken_graph_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fixture(d);
    let data = d.join("data.fvecs");
    let broken = d.join("broken.navg");
    let lists: Vec<Vec<u32>> = (0..300u32).map(|u| vec![(u + 1) % 300]).collect();
    save_graph(&SearchGraph::from_adjacency(&lists).unwrap(), &broken).unwrap();
    let out = navbeam(&["check-navigable", "--data", s(&data), "--graph", s(&broken)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("witness"));
    let out = navbeam(&[
        "prune",
        "--data",
        s(&data),
        "--graph",
        s(&broken),
        "--out",
        s(&d.join("x.navg")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = navbeam(&[
        "verify-theorem1",
        "--data",
        s(&data),
        "--graph",
        s(&broken),
        "--queries",
        s(&d.join("queries.fvecs")),
        "--gamma",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn adaptive_gamma_zero_prints_like_greedy() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fixture(d);
    let (data, graph, queries) = (
        d.join("data.fvecs"),
        d.join("graph.navg"),
        d.join("queries.fvecs"),
    );
    let common = [
        "search",
        "--data",
        s(&data),
        "--graph",
        s(&graph),
        "--queries",
        s(&queries),
        "--k",
        "5",
    ];
    let mut greedy = common.to_vec();
    greedy.extend(["--rule", "greedy"]);
    let mut adaptive = common.to_vec();
    adaptive.extend(["--rule", "adaptive", "--gamma", "0"]);
    let a = navbeam(&greedy);
    let b = navbeam(&adaptive);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let mut beam = common.to_vec();
    beam.extend(["--rule", "beam", "--b", "5"]);
    assert_eq!(navbeam(&beam).stdout, a.stdout);
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fixture(d);
    let other = d.join("again.navg");
    ok(&[
        "build-navigable",
        "--data",
        s(&d.join("data.fvecs")),
        "--out",
        s(&other),
        "--seed",
        "5",
    ]);
    assert_eq!(
        std::fs::read(d.join("graph.navg")).unwrap(),
        std::fs::read(&other).unwrap()
    );
    ok(&[
        "--threads",
        "1",
        "build-navigable",
        "--data",
        s(&d.join("data.fvecs")),
        "--out",
        s(&other),
        "--seed",
        "5",
    ]);
    assert_eq!(
        std::fs::read(d.join("graph.navg")).unwrap(),
        std::fs::read(&other).unwrap()
    );
}

#[test]
fn benchmark_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fixture(d);
    let data = d.join("data.fvecs");
    let queries = d.join("queries.fvecs");
    let truth = d.join("truth.ivecs");
    ok(&[
        "ground-truth",
        "--data",
        s(&data),
        "--queries",
        s(&queries),
        "--out",
        s(&truth),
    ]);
    let depths = navbeam::io::load_ground_truth(&truth, 300).unwrap();
    assert_eq!((depths.len(), depths.depth()), (20, 100));

    let graph = d.join("graph.navg");
    let curve = d.join("curve.csv");
    let printed = ok(&[
        "sweep",
        "--data",
        s(&data),
        "--graph",
        s(&graph),
        "--queries",
        s(&queries),
        "--truth",
        s(&truth),
        "--rule",
        "beam",
        "--grid",
        "10,20,40",
        "--k",
        "10",
        "--out",
        s(&curve),
    ]);
    let csv = std::fs::read_to_string(&curve).unwrap();
    assert_eq!(csv, printed);
    assert!(csv.starts_with("param,recall,mean_distance_computations,num_queries\n10,"));
    assert_eq!(csv.lines().count(), 4);

    let hist = d.join("hist.csv");
    let out = ok(&[
        "histogram",
        "--data",
        s(&data),
        "--graph",
        s(&graph),
        "--queries",
        s(&queries),
        "--rule",
        "adaptive",
        "--target-recall",
        "1",
        "--bin-width",
        "25",
        "--out",
        s(&hist),
    ]);
    assert!(out.contains("within_tolerance=true"), "{out}");
    let rows = navbeam::bench::read_histogram_csv(&hist).unwrap();
    assert_eq!(rows.iter().map(|r| r.1).sum::<u64>(), 20);

    let out = ok(&[
        "verify-theorem1",
        "--data",
        s(&data),
        "--graph",
        s(&graph),
        "--queries",
        s(&queries),
        "--gamma",
        "0.5",
        "--rule",
        "adaptive-v2",
    ]);
    assert!(out.contains("passed=20 failed=0"), "{out}");
}

#[test]
fn usage_and_io_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fixture(d);
    let data = d.join("data.fvecs");
    let graph = d.join("graph.navg");
    let queries = d.join("queries.fvecs");
    let cases: Vec<Vec<&str>> = vec![
        vec!["search", "--bogus"],
        vec!["no-such-command"],
        vec![
            "search",
            "--data",
            "/nonexistent.fvecs",
            "--graph",
            s(&graph),
            "--queries",
            s(&queries),
            "--rule",
            "greedy",
        ],
        vec![
            "search",
            "--data",
            s(&data),
            "--graph",
            s(&graph),
            "--queries",
            s(&queries),
            "--rule",
            "beam",
        ],
        vec![
            "search",
            "--data",
            s(&data),
            "--graph",
            s(&graph),
            "--queries",
            s(&queries),
            "--rule",
            "beam",
            "--b",
            "3",
        ],
        vec![
            "search",
            "--data",
            s(&data),
            "--graph",
            s(&graph),
            "--queries",
            s(&queries),
            "--rule",
            "greedy",
            "--start",
            "nowhere",
        ],
        vec![
            "check-alpha",
            "--data",
            s(&data),
            "--graph",
            s(&graph),
            "--alpha",
            "0.5",
        ],
        vec![
            "verify-theorem1",
            "--data",
            s(&data),
            "--graph",
            s(&graph),
            "--queries",
            s(&queries),
            "--gamma",
            "3",
        ],
        vec![
            "sweep",
            "--data",
            s(&data),
            "--graph",
            s(&graph),
            "--queries",
            s(&queries),
            "--rule",
            "greedy",
            "--grid",
            "1",
            "--out",
            "x.csv",
        ],
        vec!["check-navigable", "--data", s(&data), "--graph", s(&data)],
    ];
    for args in cases {
        let out = navbeam(&args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(navbeam(&["--help"]).status.code(), Some(0));
}
