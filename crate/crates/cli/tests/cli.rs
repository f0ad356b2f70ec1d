use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn nsam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsam"))
        .args(args)
        .env_remove("NSAM_PRECISION")
        .output()
        .unwrap()
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn move_slow_args(algorithm: &str, out: &Path) -> Vec<String> {
    let mut v = vec!["learn".to_string(), fixture("farmland.pddl")];
    v.extend((1..=3).map(|i| fixture(&format!("move-slow-{i}.traj"))));
    v.extend(["--algorithm".into(), algorithm.into(), "--out".into(), out.display().to_string()]);
    v
}

fn run(args: &[String]) -> Output {
    nsam(&args.iter().map(String::as_str).collect::<Vec<_>>())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn nsam_reports_move_slow_unsafe() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("learned.pddl");
    let o = run(&move_slow_args("nsam", &out));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = fs::read_to_string(dir.path().join("learned.pddl.unsafe.txt")).unwrap();
    assert!(report.lines().any(|l| l == "move-slow"), "{report}");
    let learned = fs::read_to_string(&out).unwrap();
    assert!(!learned.contains("(:action move-slow"));
}

#[test]
fn nsam_star_learns_four_numeric_preconditions() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("learned.pddl");
    let o = run(&move_slow_args("nsam-star", &out));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let d = nsam_core::pddl::parse_domain(&text).unwrap();
    let a = d.action("move-slow").unwrap();
    assert_eq!(a.num_pre.len(), 4, "{text}");

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("learned.pddl.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "learn");
    assert_eq!(manifest["config"]["algorithm"], "nsam-star");
    assert_eq!(manifest["inputs"].as_array().unwrap().len(), 4);
    assert_eq!(manifest["outputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn learning_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.pddl");
    let b = dir.path().join("b.pddl");
    assert!(run(&move_slow_args("nsam-star", &a)).status.success());
    assert!(run(&move_slow_args("nsam-star", &b)).status.success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn precision_flag_and_env() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("l.pddl");
    let mut args = move_slow_args("nsam-star", &out);
    args.extend(["--precision".into(), "2".into()]);
    assert!(run(&args).status.success());
    assert!(fs::read_to_string(&out).unwrap().contains("(= (x ?f2) 0.00)"));

    let args = move_slow_args("nsam-star", &out);
    let o = Command::new(env!("CARGO_BIN_EXE_nsam"))
        .args(&args)
        .env("NSAM_PRECISION", "6")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(fs::read_to_string(&out).unwrap().contains("(= (x ?f2) 0.000000)"));
}

#[test]
fn config_errors_exit_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("l.pddl");
    let mut args = move_slow_args("nsam-star", &out);
    args.extend(["--degree".into(), "0".into()]);
    let o = run(&args);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("degree"));

    let args = move_slow_args("sam", &out);
    assert_eq!(run(&args).status.code(), Some(1));
    assert_eq!(nsam(&["learn"]).status.code(), Some(1));
    assert_eq!(nsam(&["--help"]).status.code(), Some(0));
}

#[test]
fn parse_errors_exit_with_parse_code() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pddl");
    fs::write(&bad, "(define (domain d)").unwrap();
    let o = nsam(&["learn", s(&bad), &fixture("move-slow-1.traj")]);
    assert_eq!(o.status.code(), Some(2));
    let missing = dir.path().join("nope.pddl");
    let o = nsam(&["learn", s(&missing), &fixture("move-slow-1.traj")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gen_learn_eval_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let o = nsam(&["gen", "farmland", "--n", "5", "--len", "15", "--seed", "1", "--outdir", s(&data)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut names: Vec<String> = fs::read_dir(&data)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.iter().filter(|n| n.ends_with(".traj")).count(), 5);
    assert_eq!(names.iter().filter(|n| n.starts_with("problem-")).count(), 5);
    assert!(names.contains(&"domain.pddl".to_string()) && names.contains(&"manifest.json".to_string()));

    // trajectories replay under the truth
    let truth = nsam_core::pddl::parse_domain(&fs::read_to_string(data.join("domain.pddl")).unwrap()).unwrap();
    let sim = nsam_core::eval::Simulator::strict(&truth);
    for n in names.iter().filter(|n| n.ends_with(".traj")) {
        let t = nsam_core::pddl::parse_trajectory(&fs::read_to_string(data.join(n)).unwrap(), &truth).unwrap();
        for tr in t.transitions() {
            assert_eq!(sim.apply(&tr.pre, &tr.action).unwrap(), tr.post);
        }
    }

    // same seed into a fresh directory gives identical files; reuse is refused
    let again = dir.path().join("again");
    assert!(nsam(&["gen", "farmland", "--n", "5", "--len", "15", "--seed", "1", "--outdir", s(&again)]).status.success());
    for n in names.iter().filter(|n| *n != "manifest.json") {
        assert_eq!(fs::read(data.join(n)).unwrap(), fs::read(again.join(n)).unwrap(), "{n}");
    }
    let o = nsam(&["gen", "farmland", "--n", "5", "--seed", "1", "--outdir", s(&data)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(nsam(&["gen", "farmland", "--n", "5", "--seed", "1", "--outdir", s(&data), "--force"]).status.success());
    assert_eq!(nsam(&["gen", "depot", "--outdir", s(&dir.path().join("x"))]).status.code(), Some(1));

    // learn from the trajectories, evaluate on the problems
    let learned = dir.path().join("learned.pddl");
    let mut args = vec!["learn".to_string(), data.join("domain.pddl").display().to_string()];
    args.extend(names.iter().filter(|n| n.ends_with(".traj")).map(|n| data.join(n).display().to_string()));
    args.extend(["--out".into(), learned.display().to_string()]);
    assert!(run(&args).status.success());

    let problems: Vec<String> =
        names.iter().filter(|n| n.starts_with("problem-")).map(|n| data.join(n).display().to_string()).collect();
    let csv = dir.path().join("m.csv");
    let mut eval = vec!["eval".to_string(), learned.display().to_string(), data.join("domain.pddl").display().to_string()];
    eval.extend(problems.iter().cloned());
    eval.extend(["--seed".into(), "3".into(), "--tolerance".into(), "0".into(), "--out".into(), csv.display().to_string()]);
    let o = run(&eval);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    for line in text.lines().filter(|l| l.contains(",p_sem_pre,") && !l.starts_with('*')) {
        assert!(line.ends_with(",1"), "{line}");
    }
    assert!(run(&eval).status.success());
    assert_eq!(fs::read_to_string(&csv).unwrap(), text);

    // learned = truth gives a perfect report
    let mut perfect = vec!["eval".to_string(), data.join("domain.pddl").display().to_string(), data.join("domain.pddl").display().to_string()];
    perfect.extend(problems.iter().cloned());
    perfect.extend(["--fold".into(), "0/5".into(), "--out".into(), csv.display().to_string()]);
    assert!(run(&perfect).status.success());
    for line in fs::read_to_string(&csv).unwrap().lines().skip(1) {
        let want = if line.contains(",mse,") { ",0" } else { ",1" };
        assert!(line.ends_with(want), "{line}");
    }

    // missing truth file
    let mut missing = eval.clone();
    missing[2] = dir.path().join("none.pddl").display().to_string();
    assert_eq!(run(&missing).status.code(), Some(2));
}
