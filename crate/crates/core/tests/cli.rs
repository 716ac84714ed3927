use lotto_alliance::cli::{self, AnalysisReport};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("lotto-alliance").chain(args.iter().copied());
    let code = cli::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

const G1: [&str; 8] = ["--phi1", "1", "--phi2", "1.2", "--x1", "0.5", "--x2", "1.5"];

fn with_g1(cmd: &str, extra: &[&str]) -> Vec<String> {
    std::iter::once(cmd)
        .chain(G1.iter().copied())
        .chain(extra.iter().copied())
        .map(String::from)
        .collect()
}

fn run_owned(args: &[String]) -> (i32, String, String) {
    let v: Vec<&str> = args.iter().map(String::as_str).collect();
    run(&v)
}

fn analyze(extra: &[&str]) -> AnalysisReport {
    let (code, out, err) = run_owned(&with_g1("analyze", extra));
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn analyze_reports_mutual_benefit_by_beta() {
    let r = analyze(&["--beta", "1"]);
    assert_eq!(r.schema_version, 1);
    assert!(r.analysis.mb_exists);
    assert!(r.analysis.alliance_tau < 0.0);
    let r = analyze(&["--beta", "0.5"]);
    assert!(!r.analysis.mb_exists);
    assert!((r.analysis.mb_beta_threshold - 0.5099).abs() < 1e-3);
}

#[test]
fn analyze_json_round_trips() {
    let (_, out, _) = run_owned(&with_g1("analyze", &["--beta", "0.8"]));
    let r: AnalysisReport = serde_json::from_str(&out).unwrap();
    let again = cli::to_json(&r).unwrap();
    assert_eq!(again.trim_end(), out.trim_end());
}

#[test]
fn analyze_proportional_game() {
    let (code, out, _) = run(&[
        "analyze", "--phi1", "1", "--phi2", "1", "--x1", "1", "--x2", "1", "--beta", "0.7",
    ]);
    assert_eq!(code, 0);
    let r: AnalysisReport = serde_json::from_str(&out).unwrap();
    assert_eq!(r.analysis.alliance_tau, 0.0);
    assert!(r.analysis.in_g_dagger);
    assert!(!r.analysis.mb_exists);
}

#[test]
fn analyze_text_mode() {
    let (code, out, _) = run_owned(&with_g1("analyze", &["--beta", "1", "--text"]));
    assert_eq!(code, 0);
    assert!(out.contains("mutually beneficial transfer: true"));
    assert!(out.contains("case at tau=0: 2"));
}

#[test]
fn invalid_parameters_exit_two() {
    let (code, out, err) = run(&[
        "analyze", "--phi1", "-1", "--phi2", "1", "--x1", "1", "--x2", "1", "--beta", "1",
    ]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("phi1"), "{err}");
    assert!(err.contains("> 0"), "{err}");

    let (code, _, err) = run_owned(&with_g1("analyze", &["--beta", "1.5"]));
    assert_eq!(code, 2);
    assert!(err.contains("beta"), "{err}");

    let (code, _, err) = run(&["analyze", "--phi1", "1"]);
    assert_eq!(code, 2);
    assert!(err.contains("missing"), "{err}");
}

#[test]
fn unknown_flag_is_usage_error() {
    let (code, _, err) = run(&["analyze", "--bogus", "1"]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn curve_output() {
    let args = with_g1(
        "curve",
        &["--beta", "1", "--tau-min", "-1.4", "--tau-max", "0.4", "--steps", "181"],
    );
    let (code, out, _) = run_owned(&args);
    assert_eq!(code, 0);
    let (header, rows) = parse_csv(&out);
    assert_eq!(header, ["tau", "du1", "du2", "u12"]);
    assert_eq!(rows.len(), 181);
    let both_up = rows.iter().any(|r| {
        let du1: f64 = r[1].parse().unwrap();
        let du2: f64 = r[2].parse().unwrap();
        du1 > 1e-9 && du2 > 1e-9
    });
    assert!(both_up);

    let args = with_g1(
        "curve",
        &["--beta", "0.5", "--tau-min", "-1.4", "--tau-max", "0.4", "--steps", "181"],
    );
    let (_, out, _) = run_owned(&args);
    let (_, rows) = parse_csv(&out);
    assert!(rows.iter().all(|r| {
        let du1: f64 = r[1].parse().unwrap();
        let du2: f64 = r[2].parse().unwrap();
        !(du1 > 1e-9 && du2 > 1e-9)
    }));
}

#[test]
fn curve_range_outside_domain() {
    let args = with_g1(
        "curve",
        &["--beta", "1", "--tau-min", "-2", "--tau-max", "0.4", "--steps", "10"],
    );
    let (code, out, err) = run_owned(&args);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("tau_min"), "{err}");
}

#[test]
fn region_rows_and_layering() {
    let (code, out, _) = run(&[
        "region", "--phi1", "1.2", "--phi2", "1", "--beta-list", "0.25,0.5,1", "--x1-min", "0.05",
        "--x1-max", "2", "--x2-min", "0.05", "--x2-max", "2", "--resolution", "25",
    ]);
    assert_eq!(code, 0);
    let (header, rows) = parse_csv(&out);
    assert_eq!(
        header,
        ["beta", "x1", "x2", "in_frame", "case", "mb_exists", "tau_dagger"]
    );
    assert_eq!(rows.len(), 3 * 25 * 25);
    let per_beta = 25 * 25;
    for (i, r) in rows.iter().enumerate() {
        if r[3] == "0" {
            assert!(r[4].is_empty() && r[5].is_empty() && r[6].is_empty());
            continue;
        }
        let mb = r[5] == "1";
        let tau: f64 = r[6].parse().unwrap();
        if mb {
            assert!(tau < 0.0, "row {i}");
        }
        if i + per_beta < rows.len() {
            let next = &rows[i + per_beta];
            assert_eq!(r[1], next[1]);
            assert_eq!(r[2], next[2]);
            if mb {
                assert_eq!(next[5], "1", "mb region shrank at row {i}");
            }
            if tau < 0.0 {
                let next_tau: f64 = next[6].parse().unwrap();
                assert!(next_tau < 0.0, "alliance region shrank at row {i}");
            }
        }
    }
}

#[test]
fn beta_sweep_switches() {
    let args = with_g1(
        "beta-sweep",
        &["--beta-min", "0.01", "--beta-max", "1", "--steps", "100"],
    );
    let (code, out, _) = run_owned(&args);
    assert_eq!(code, 0);
    let (header, rows) = parse_csv(&out);
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let (b, mb, al, u12) = (
        col("beta"),
        col("mb_exists"),
        col("alliance_nonzero"),
        col("max_u12"),
    );
    let f = |r: &Vec<String>, i: usize| r[i].parse::<f64>().unwrap();
    let first_mb = rows.iter().find(|r| r[mb] == "1").unwrap();
    let first_al = rows.iter().find(|r| r[al] == "1").unwrap();
    assert!(f(first_mb, b) >= 0.5099 && f(first_mb, b) < 0.5099 + 0.011);
    assert!(f(first_al, b) >= 0.0883 && f(first_al, b) < 0.0883 + 0.011);
    for w in rows.windows(2) {
        assert!(f(&w[1], u12) >= f(&w[0], u12) - 1e-9);
    }
}

#[test]
fn verify_single_game_is_reproducible() {
    let args = ["verify", "--trials", "1", "--game", "1,1.2,2,3", "--seed", "11"];
    let (code, out, err) = run(&args);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["schema_version"], 1);
    let (_, again, _) = run(&args);
    assert_eq!(out, again);
}

#[test]
fn verify_rejects_malformed_game() {
    let (code, _, err) = run(&["verify", "--game", "1,1.2,2"]);
    assert_eq!(code, 2);
    assert!(err.contains("--game"), "{err}");
}

#[test]
fn config_file_with_flag_override() {
    let dir = std::env::temp_dir().join(format!("lotto-alliance-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("game.toml");
    std::fs::write(&path, "phi1 = 1\nphi2 = 1.2\nx1 = 0.5\nx2 = 1.5\nbeta = 0.5\n").unwrap();
    let p = path.to_str().unwrap();

    let (code, out, _) = run(&["--config", p, "analyze"]);
    assert_eq!(code, 0);
    let r: AnalysisReport = serde_json::from_str(&out).unwrap();
    assert_eq!(r.beta, 0.5);
    assert!(!r.analysis.mb_exists);

    let (_, out, _) = run(&["analyze", "--config", p, "--beta", "1"]);
    let r: AnalysisReport = serde_json::from_str(&out).unwrap();
    assert_eq!(r.beta, 1.0);
    assert!(r.analysis.mb_exists);

    std::fs::write(&path, "phi1 = \"one\"\n").unwrap();
    let (code, _, err) = run(&["--config", p, "analyze"]);
    assert_eq!(code, 2);
    assert!(err.contains("phi1"), "{err}");
    std::fs::remove_dir_all(&dir).unwrap();
}
