use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn cf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cf")).args(args).output().expect("cf runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn lines(o: &Output) -> Vec<Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn certify_seed_reports_the_margin() {
    let o = cf(&["certify-seed", "--preset", "cassaigne-c0c1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rep: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rep["depth"], 8);
    assert_eq!(rep["balls"].as_array().unwrap().len(), 3);
    assert!(rep["margin"].as_f64().unwrap() > 0.0);
    assert_eq!(rep["exceptional_lattice_points"].as_array().unwrap().len(), 2);
    assert_eq!(rep["verdict"], "certified");
}

#[test]
fn certify_seed_rejects_shrunk_and_inflated_balls() {
    assert_eq!(cf(&["certify-seed", "--scale", "0.5"]).status.code(), Some(2));
    assert_eq!(cf(&["certify-seed", "--scale", "3"]).status.code(), Some(2));
}

#[test]
fn certify_seed_writes_the_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cert.json");
    let o = cf(&["certify-seed", "--out", path_arg(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let cert: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    for key in ["balls", "depth", "margin", "exceptional_lattice_points"] {
        assert!(cert.get(key).is_some(), "{key}");
    }
    assert_eq!(lines(&o)[0]["verdict"], "certified");
}

#[test]
fn exact_orbit_lines() {
    let o = cf(&["orbit", "--algo", "cassaigne", "--x", "1/3,1/4,5/12", "--steps", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let l = lines(&o);
    assert_eq!(l.len(), 3);
    assert_eq!(l[0]["k"], 0);
    assert_eq!(l[0]["substitution"], "c1");
    assert_eq!(l[1]["x"], serde_json::json!(["3/8", "1/2", "1/8"]));
}

#[test]
fn boundary_ties_are_flagged() {
    let o = cf(&["orbit", "--algo", "brun", "--x", "1/3,1/3,1/3", "--steps", "2"]);
    let l = lines(&o);
    assert_eq!(l[0]["tie"], true);
}

#[test]
fn orbit_modes_agree_on_the_directive() {
    let names = |mode: &str| -> (Option<i32>, Vec<Value>) {
        let o = cf(&["orbit", "--preset", "fig-ex-rauzy", "--steps", "30", "--mode", mode]);
        (o.status.code(), lines(&o).into_iter().map(|l| l["substitution"].clone()).collect())
    };
    let (code, exact) = names("exact");
    assert_eq!(code, Some(0));
    assert_eq!(names("float"), (Some(0), exact.clone()));
    // Interval arithmetic loses the comparison before step 30 and says so.
    let (code, interval) = names("interval");
    assert_eq!(code, Some(3));
    assert!(interval.len() > 20);
    assert_eq!(interval[..], exact[..interval.len()]);
}

#[test]
fn exit_codes() {
    assert_eq!(cf(&["orbit", "--algo", "sturmian", "--x", "1/2,1/2", "--mode", "interval"]).status.code(), Some(3));
    assert_eq!(cf(&["orbit", "--algo", "arnoux-rauzy", "--x", "1,1,1"]).status.code(), Some(4));
    assert_eq!(cf(&["orbit", "--algo", "cassaigne", "--x", "1,1"]).status.code(), Some(1));
    assert_eq!(cf(&["orbit", "--algo", "nope"]).status.code(), Some(1));
    assert_eq!(cf(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(cf(&["complexity", "--preset", "no-such-preset"]).status.code(), Some(1));
    assert_eq!(cf(&["--help"]).status.code(), Some(0));
}

#[test]
fn complexity_of_a_random_cassaigne_sequence() {
    let o = cf(&["complexity", "--preset", "cassaigne-random", "--n", "40", "--len", "20000", "--trial", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut rows = text.lines();
    assert_eq!(rows.next(), Some("n,p(n),prefix_length"));
    for row in rows {
        let f: Vec<usize> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(f[1], 2 * f[0] + 1);
        assert_eq!(f[2], 20000);
    }
}

#[test]
fn complexity_from_a_substitution_file() {
    let dir = tempfile::tempdir().unwrap();
    let set = dir.path().join("set.json");
    std::fs::write(&set, stdout(&cf(&["substitutions", "--algo", "sturmian"]))).unwrap();
    let o = cf(&[
        "complexity",
        "--algo",
        "sturmian",
        "--substitutions",
        path_arg(&set),
        "--directive",
        "t0t1",
        "--periodic",
        "--n",
        "20",
        "--len",
        "5000",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).lines().skip(1).all(|r| {
        let f: Vec<usize> = r.split(',').map(|c| c.parse().unwrap()).collect();
        f[1] == f[0] + 1
    }));
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

#[test]
fn rauzy_fractal_matches_the_golden_raster() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("img.png");
    let o = cf(&["fractal", "--preset", "fig-ex-rauzy", "--out", path_arg(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = &lines(&o)[0];
    assert!(summary["points"].as_u64().unwrap() > 1000);
    let img = image::open(&out).unwrap().to_rgb8();
    let path = golden("fig-ex-rauzy.png");
    if std::env::var_os("SADIC_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        img.save(&path).unwrap();
    }
    let want = image::open(&path).unwrap().to_rgb8();
    assert!(sadic::render::pixel_difference(&img, &want) <= 0.005);
}

#[test]
fn fractal_formats() {
    let dir = tempfile::tempdir().unwrap();
    let ppm = dir.path().join("c.ppm");
    let o = cf(&["fractal", "--preset", "cassaigne-c0c1", "--depth", "12", "--tail", "certified", "--out", path_arg(&ppm)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(lines(&o)[0]["tail_kind"], "certified");
    assert!(std::fs::read(&ppm).unwrap().starts_with(b"P6"));
    let csv = dir.path().join("c.csv");
    assert_eq!(cf(&["fractal", "--preset", "brun-fig", "--depth", "9", "--out", path_arg(&csv)]).status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("letter,c1,c2\n"));
    assert!(text.lines().count() > 10);
    let bad = dir.path().join("c.gif");
    assert_eq!(cf(&["fractal", "--preset", "brun-fig", "--depth", "3", "--out", path_arg(&bad)]).status.code(), Some(1));
}

#[test]
fn lyapunov_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let csv = dir.path().join(name);
        let o = cf(&["lyapunov", "--algo", "cassaigne", "--trials", "6", "--steps", "2000", "--seed", "9", "--csv", path_arg(&csv)]);
        assert_eq!(o.status.code(), Some(0));
        (std::fs::read_to_string(&csv).unwrap(), lines(&o)[0].clone())
    };
    let (a, summary) = run("a.csv");
    let (b, _) = run("b.csv");
    assert_eq!(a, b);
    assert!(a.starts_with("seed,theta1,theta2\n"));
    assert_eq!(a.lines().count(), 7);
    assert!(summary["theta1_mean"].as_f64().unwrap() > 0.0);
    assert!(summary["theta2_mean"].as_f64().unwrap() < 0.0);
}

#[test]
fn seed_orbit_coding_is_certain() {
    let o = cf(&["code", "--preset", "cassaigne-c0c1", "--steps", "200"]);
    assert_eq!(o.status.code(), Some(0));
    let l = lines(&o);
    assert_eq!(l.len(), 200);
    assert_eq!(l[0], serde_json::json!({ "n": 0, "letter": 0, "certainty": "certain" }));
    let word: String = l.iter().map(|s| s["letter"].to_string()).collect();
    assert!(word.starts_with("0210"), "{word}");
}

#[test]
fn rational_direction_coding() {
    let o = cf(&["code", "--algo", "cassaigne", "--x", "0.279291082100669,0.1294709739854265,0.5912379439139045", "--steps", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(lines(&o).len(), 50);
}

#[test]
fn renormalization_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let o = cf(&["renormalize", "--steps", "2", "--depth", "20", "--render", path_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let l = lines(&o);
    assert_eq!(l.len(), 2);
    assert_eq!(l[0]["kind"], "top");
    assert_eq!(l[1]["kind"], "bottom");
    assert!(l.iter().all(|s| s["cloud_match"] == true));
    assert!(dir.path().join("renormalization.png").exists());
    let steps: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("steps.json")).unwrap()).unwrap();
    assert_eq!(steps.as_array().unwrap().len(), 2);
}

#[test]
fn automaton_dot_and_worm_csv() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("a.dot");
    assert_eq!(cf(&["automaton", "--algo", "cassaigne", "--out", path_arg(&dot)]).status.code(), Some(0));
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph"));
    assert!(text.contains("->"));
    let o = cf(&["worm", "--word", "01001"]);
    assert_eq!(stdout(&o).lines().next(), Some("h,x0,x1,letter"));
    assert_eq!(stdout(&o).lines().count(), 6);
    let o = cf(&["worm", "--preset", "cassaigne-c0c1", "--len", "10"]);
    assert_eq!(stdout(&o).lines().count(), 11);
}

#[test]
fn presets_are_listed() {
    let l = lines(&cf(&["presets"]));
    assert!(l.iter().any(|p| p["name"] == "cassaigne-c0c1"));
}
