use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ggmid::synth::{build_model, Family, ModelSpec};
use ggmid::{identify_degree_bounded, identify_strongly_separable, CachedOracle, ExactOracle, Options};
use serde_json::Value;
use tempfile::TempDir;

fn ggmid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ggmid")).args(args).output().expect("run ggmid")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("bad JSON ({e}): {}\nstderr: {}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
    })
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Writes a model bundle into `dir/name` and returns that directory.
fn bundle(dir: &TempDir, name: &str, family: &str, p: usize, seed: u64, k: usize) -> PathBuf {
    let out = dir.path().join(name);
    let o = ggmid(&[
        "gen", "--family", family, "--p", &p.to_string(), "--seed", &seed.to_string(), "--k", &k.to_string(),
        "--out", s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn cov(b: &Path) -> String {
    b.join("covariance.txt").display().to_string()
}

fn pairs(v: &Value) -> Vec<[u64; 2]> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|p| [p[0].as_u64().unwrap(), p[1].as_u64().unwrap()])
        .collect()
}

fn edge_file(b: &Path) -> Vec<[u64; 2]> {
    fs::read_to_string(b.join("edges.txt"))
        .unwrap()
        .lines()
        .map(|l| {
            let mut it = l.split_whitespace().map(|t| t.parse().unwrap());
            [it.next().unwrap(), it.next().unwrap()]
        })
        .collect()
}

fn meta(b: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(b.join("meta.json")).unwrap()).unwrap()
}

fn validator() -> jsonschema::Validator {
    let text = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/report.schema.json")).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn assert_valid(v: &Value) {
    let errors: Vec<String> = validator().iter_errors(v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

#[test]
fn path_is_degree_two() {
    let dir = TempDir::new().unwrap();
    let b = bundle(&dir, "path", "chain", 5, 1, 2);
    let o = ggmid(&["check-degree", "--k", "2", "--input", &cov(&b)]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["verdict"], true);
    assert_eq!(pairs(&r["edges"]), vec![[1, 2], [2, 3], [3, 4], [4, 5]]);
    assert_valid(&r);
}

#[test]
fn star_exceeds_degree_three() {
    let dir = TempDir::new().unwrap();
    let b = bundle(&dir, "star", "star", 6, 1, 3);
    let o = ggmid(&["check-degree", "--k", "3", "--input", &cov(&b)]);
    assert_eq!(code(&o), 1);
    let r = json(&o);
    assert_eq!(r["unbounded_nodes"], serde_json::json!([1]));
    assert_valid(&r);
}

#[test]
fn truncated_matrix_is_an_error_naming_the_line() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("cov.txt");
    fs::write(&path, "# three variables\n3\n1 0 0\n0 1 0\n").unwrap();
    let o = ggmid(&["check-degree", "--k", "2", "--input", s(&path)]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("cov.txt:5"), "{err}");
    assert!(err.contains("row 3 of 3"), "{err}");
    assert!(o.stdout.is_empty());
}

#[test]
fn tree_is_strongly_one_separable() {
    let dir = TempDir::new().unwrap();
    let b = bundle(&dir, "tree", "tree", 8, 4, 1);
    let truth = b.join("edges.txt");
    let o = ggmid(&["check-strong-sep", "--k", "1", "--input", &cov(&b), "--truth", s(&truth)]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(pairs(&r["edges"]), edge_file(&b));
    assert_eq!(r["truth"]["edges_match"], true);
    assert_eq!(r["unresolved_pairs"], serde_json::json!([]));
    assert_valid(&r);
}

#[test]
fn example1_is_not_strongly_three_separable() {
    let dir = TempDir::new().unwrap();
    let b = bundle(&dir, "ex1", "example1", 6, 0, 3);
    let o = ggmid(&["check-strong-sep", "--k", "3", "--input", &cov(&b)]);
    assert_eq!(code(&o), 1);
    let r = json(&o);
    assert!(pairs(&r["unresolved_pairs"]).contains(&[2, 1]));
    assert_eq!(r["interpretation"]["sample_mode_caveat"], Value::Null);
    assert_valid(&r);
}

#[test]
fn example1_sample_mode_matches_exact_mode() {
    let dir = TempDir::new().unwrap();
    let b = bundle(&dir, "ex1", "example1", 6, 0, 3);
    let beta = meta(&b)["beta"].as_f64().unwrap().to_string();
    let exact = code(&ggmid(&["check-strong-sep", "--k", "3", "--input", &cov(&b)]));
    let samples = dir.path().join("samples.txt");
    let mut agree = 0;
    for seed in 0..50 {
        let o = ggmid(&["sample", "--input", &cov(&b), "--n", "4000", "--seed", &seed.to_string(), "--out", s(&samples)]);
        assert_eq!(code(&o), 0);
        let o = ggmid(&["check-strong-sep", "--k", "3", "--mode", "sample", "--samples", s(&samples), "--beta", &beta]);
        if seed == 0 {
            let r = json(&o);
            assert_eq!(r["config"]["alpha_source"], "beta/2");
            assert_eq!(r["config"]["n"], 4000);
            assert_valid(&r);
        }
        agree += usize::from(code(&o) == exact);
    }
    assert!(agree >= 45, "{agree}/50");
}

#[test]
fn example2_hubs_form_a_generalized_fvs() {
    let dir = TempDir::new().unwrap();
    let b = bundle(&dir, "ex2", "example2", 7, 0, 3);
    assert_eq!(meta(&b)["hubs"], serde_json::json!([6, 7]));
    let o = ggmid(&["find-fvs", "--k", "1", "--ell", "2", "--input", &cov(&b)]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    let hit = r["qualifying"].as_array().unwrap().iter().find(|q| q["fvs"] == serde_json::json!([6, 7])).unwrap();
    assert_eq!(pairs(&hit["residual_edges"]), vec![[1, 2], [2, 3], [3, 4], [4, 5]]);
    assert_valid(&r);
}

#[test]
fn every_tree_node_is_a_generalized_fvs() {
    let dir = TempDir::new().unwrap();
    let b = bundle(&dir, "tree", "tree", 6, 2, 2);
    let o = ggmid(&["find-fvs", "--k", "1", "--ell", "1", "--input", &cov(&b), "--parallel"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    let sets: Vec<Value> = r["qualifying"].as_array().unwrap().iter().map(|q| q["fvs"].clone()).collect();
    assert_eq!(sets, (1..=6).map(|i| serde_json::json!([i])).collect::<Vec<_>>());
    assert_valid(&r);
}

#[test]
fn example1_has_no_empty_fvs_at_k_one() {
    let dir = TempDir::new().unwrap();
    let b = bundle(&dir, "ex1", "example1", 6, 0, 1);
    let o = ggmid(&["find-fvs", "--k", "1", "--ell", "0", "--input", &cov(&b)]);
    assert_eq!(code(&o), 1);
    let r = json(&o);
    assert_eq!(r["qualifying"], serde_json::json!([]));
    assert_eq!(r["rejected"][0]["fvs"], serde_json::json!([]));
    assert_valid(&r);
}

#[test]
fn fvs_size_leaving_no_pair_is_an_error() {
    let dir = TempDir::new().unwrap();
    let b = bundle(&dir, "tree", "tree", 5, 0, 1);
    for ell in ["4", "5"] {
        let o = ggmid(&["find-fvs", "--k", "1", "--ell", ell, "--input", &cov(&b)]);
        assert_eq!(code(&o), 2);
    }
}

#[test]
fn gen_is_byte_identical_per_seed() {
    let dir = TempDir::new().unwrap();
    let a = bundle(&dir, "a", "tree", 8, 7, 1);
    let b = bundle(&dir, "b", "tree", 8, 7, 1);
    let c = bundle(&dir, "c", "tree", 8, 8, 1);
    for f in ["edges.txt", "covariance.txt", "precision.txt", "meta.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    assert_ne!(fs::read(a.join("covariance.txt")).unwrap(), fs::read(c.join("covariance.txt")).unwrap());
    let m = meta(&a);
    for key in ["seed", "beta", "lambda_max", "lambda_min", "hubs", "rng"] {
        assert!(m.get(key).is_some(), "{key}");
    }
}

#[test]
fn example1_bundle_has_nine_edges() {
    let dir = TempDir::new().unwrap();
    let b = bundle(&dir, "ex1", "example1", 6, 3, 1);
    assert_eq!(edge_file(&b).len(), 9);
    assert_eq!(meta(&b)["edge_count"], 9);
}

#[test]
fn gen_rejects_bad_specs() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x");
    assert_eq!(code(&ggmid(&["gen", "--family", "blob", "--p", "5", "--out", s(&out)])), 2);
    assert_eq!(code(&ggmid(&["gen", "--family", "cycle", "--p", "2", "--out", s(&out)])), 2);
    assert_eq!(code(&ggmid(&["gen", "--family", "base_plus_fvs:1:3", "--p", "5", "--out", s(&out)])), 2);
}

#[test]
fn files_round_trip_into_identical_verdicts() {
    let dir = TempDir::new().unwrap();
    for (i, (family, fam, p, k)) in [
        ("tree", Family::Tree, 7, 1),
        ("cycle", Family::Cycle, 6, 2),
        ("example1", Family::Example1, 6, 3),
        ("degree_bounded:3", Family::DegreeBounded { k: 3 }, 8, 3),
    ]
    .into_iter()
    .enumerate()
    {
        let b = bundle(&dir, &format!("m{i}"), family, p, 11, k);
        let m = build_model::<f64>(&ModelSpec::new(fam, p, 11), k).unwrap();
        let text = fs::read_to_string(b.join("covariance.txt")).unwrap();
        let values: Vec<u64> = text.split_whitespace().skip(1).map(|t| t.parse::<f64>().unwrap().to_bits()).collect();
        let expected: Vec<u64> = m.sigma.to_rows().into_iter().flatten().map(f64::to_bits).collect();
        assert_eq!(values, expected, "{family}");

        let o = CachedOracle::new(ExactOracle::with_default_tolerance(m.sigma.clone()).unwrap());
        let sep = identify_strongly_separable(&o, k, Options::default()).unwrap();
        let deg = identify_degree_bounded(&o, k, Options::default()).unwrap();
        for (cmd, r) in [("check-strong-sep", &sep), ("check-degree", &deg)] {
            let out = ggmid(&[cmd, "--k", &k.to_string(), "--input", &cov(&b)]);
            assert_eq!(code(&out), if r.verdict { 0 } else { 1 }, "{cmd} {family}");
            let got = pairs(&json(&out)["edges"]);
            let want: Vec<[u64; 2]> =
                r.recovered_edges.iter().map(|&(u, v)| [u as u64 + 1, v as u64 + 1]).collect();
            assert_eq!(got, want, "{cmd} {family}");
        }
    }
}

#[test]
fn sample_mode_from_samples_and_scatter() {
    let dir = TempDir::new().unwrap();
    let b = bundle(&dir, "tree", "tree", 5, 3, 1);
    let samples = dir.path().join("samples.txt");
    assert_eq!(code(&ggmid(&["sample", "--input", &cov(&b), "--n", "4000", "--seed", "1", "--out", s(&samples)])), 0);
    let header = fs::read_to_string(&samples).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header, "4000 5");

    let o = ggmid(&["check-strong-sep", "--k", "1", "--mode", "sample", "--samples", s(&samples), "--alpha", "0.05"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(pairs(&r["edges"]), edge_file(&b));
    assert_eq!(r["oracle"]["kind"], "empirical");
    assert_valid(&r);

    // Centring and the heuristic threshold are reported.
    let o = ggmid(&["check-degree", "--k", "2", "--mode", "sample", "--samples", s(&samples), "--center"]);
    let r = json(&o);
    assert_eq!(r["config"]["alpha_source"], "default_alpha(delta=0.05,c=1)");
    assert!(r["interpretation"]["sample_mode_caveat"].as_str().unwrap().contains("heuristic"));
    assert_valid(&r);

    // A scatter matrix with its sample count gives the same decisions as the
    // samples it came from.
    let text = fs::read_to_string(&samples).unwrap();
    let rows: Vec<Vec<f64>> =
        text.lines().skip(1).map(|l| l.split_whitespace().map(|t| t.parse().unwrap()).collect()).collect();
    let mut scatter = String::from("5\n");
    for i in 0..5 {
        let line: Vec<String> = (0..5)
            .map(|j| format!("{:?}", rows.iter().fold(0.0, |acc, r| acc + r[i.min(j)] * r[i.max(j)])))
            .collect();
        scatter.push_str(&(line.join(" ") + "\n"));
    }
    let scatter_path = dir.path().join("scatter.txt");
    fs::write(&scatter_path, scatter).unwrap();
    let from_scatter = ggmid(&[
        "check-strong-sep", "--k", "1", "--mode", "sample", "--input", s(&scatter_path), "--n", "4000", "--alpha", "0.05",
    ]);
    assert_eq!(code(&from_scatter), 0);
    let r2 = json(&from_scatter);
    assert_eq!(r2["pairs"], json(&ggmid(&["check-strong-sep", "--k", "1", "--mode", "sample", "--samples", s(&samples), "--alpha", "0.05"]))["pairs"]);
    assert_valid(&r2);
}

#[test]
fn conflicting_flags_are_errors() {
    let dir = TempDir::new().unwrap();
    let b = bundle(&dir, "tree", "tree", 5, 3, 1);
    let c = cov(&b);
    let bad: [&[&str]; 6] = [
        &["check-degree", "--k", "1", "--input", &c, "--alpha", "0.1"],
        &["check-degree", "--k", "1", "--mode", "sample"],
        &["check-degree", "--k", "1", "--mode", "sample", "--input", &c, "--n", "10", "--alpha", "0.1", "--beta", "0.2"],
        &["check-degree", "--k", "1", "--input", &c, "--epsilon-zero", "-1"],
        &["check-degree", "--k", "1"],
        &["check-strong-sep", "--k", "0", "--input", &c],
    ];
    for args in bad {
        assert_eq!(code(&ggmid(args)), 2, "{args:?}");
    }
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn exact_bench_always_succeeds() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("bench.csv");
    let o = ggmid(&[
        "bench", "--algorithm", "strong-sep", "--family", "tree", "--k", "1", "--p-list", "8,6", "--trials", "5",
        "--out", s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&fs::read_to_string(&out).unwrap());
    assert_eq!(
        rows[0].join(","),
        "algorithm,p,k,ell,n,trials,successes,success_rate,mean_queries,wall_ms,alpha,beta"
    );
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1][1], "6");
    assert_eq!(rows[2][1], "8");
    for r in &rows[1..] {
        assert_eq!(r[7], "1");
        assert_eq!(r[4], "");
    }

    let o = ggmid(&["bench", "--algorithm", "fvs", "--family", "base_plus_fvs:1:1", "--k", "1", "--ell", "1", "--p-list", "6", "--trials", "3"]);
    let rows = csv_rows(&String::from_utf8_lossy(&o.stdout));
    assert_eq!(rows[1][7], "1");
}

#[test]
fn single_sample_bench_row_fails_without_crashing() {
    let o = ggmid(&["bench", "--mode", "sample", "--family", "chain", "--p-list", "5", "--n-list", "1", "--trials", "4", "--alpha", "0.1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&String::from_utf8_lossy(&o.stdout));
    assert_eq!(rows[1][4], "1");
    assert_eq!(rows[1][7], "0");
}

#[test]
fn chain_bench_success_is_non_decreasing_in_n() {
    let o = ggmid(&[
        "bench", "--mode", "sample", "--family", "chain", "--k", "1", "--p-list", "10", "--n-list",
        "500,1000,2000,4000", "--trials", "50", "--seed", "3",
    ]);
    assert_eq!(code(&o), 0);
    let rates: Vec<f64> = csv_rows(&String::from_utf8_lossy(&o.stdout))[1..].iter().map(|r| r[7].parse().unwrap()).collect();
    assert_eq!(rates.len(), 4);
    assert!(rates.windows(2).all(|w| w[1] >= w[0] - 0.08), "{rates:?}");
}

#[test]
fn calibrated_bench_sweeps_one_sample_size() {
    let o = ggmid(&[
        "bench", "--mode", "sample", "--family", "chain", "--p-list", "8,16", "--n-list", "1000,4000", "--trials",
        "10", "--alpha", "0.05", "--calibrate-p", "8",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&String::from_utf8_lossy(&o.stdout));
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1][4], rows[2][4]);
}
