use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use flipgraph::io::{parse_script, read_scheme, Manifest};
use flipgraph::{standard_scheme, strassen_scheme};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flipgraph")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn verify_fixtures() {
    for f in ["strassen.mms", "standard222.mms"] {
        let o = run(&["verify", p(&fixture(f))]);
        assert_eq!(code(&o), 0, "{f}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains("matrix pairs"));
    }
    assert_eq!(read_scheme(&fixture("strassen.mms")).unwrap(), strassen_scheme());
}

#[test]
fn verify_rejects_broken_files() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("strassen.mms")).unwrap();
    let cases = [
        ("bitflip", text.replacen("1001 1001 1001", "1001 1001 1000", 1)),
        ("zero", text.replacen("1001 1001 1001", "0000 1001 1001", 1)),
        ("header", text.replacen("mms 1", "mms 2", 1)),
        ("short", text.replacen("1001 1001 1001", "1001 1001", 1)),
    ];
    for (name, body) in cases {
        assert_ne!(body, text, "{name}");
        let f = dir.path().join(format!("{name}.mms"));
        std::fs::write(&f, body).unwrap();
        let o = run(&["verify", p(&f)]);
        assert_eq!(code(&o), 1, "{name}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("line"), "{name}");
    }
    assert_eq!(code(&run(&["verify", "/nonexistent/x.mms"])), 1);
}

#[test]
fn rank_of_standard_455() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("s.mms");
    flipgraph::io::write_scheme(&f, &standard_scheme(4, 5, 5).unwrap()).unwrap();
    let o = run(&["rank", p(&f)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "100");
}

#[test]
fn path_to_strassen_replays() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.mss");
    let o = run(&["path", p(&fixture("standard222.mms")), p(&fixture("strassen.mms")), "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let script = parse_script(&std::fs::read_to_string(&out).unwrap(), &standard_scheme(2, 2, 2).unwrap()).unwrap();
    let (end, _) = script.replay().unwrap();
    assert_eq!(end, strassen_scheme());
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("cp.json");
    for args in [
        vec!["search"],
        vec!["search", "--dims", "2x2"],
        vec!["search", "--dims", "2x2x2", "--resume", p(&cp)],
        vec!["search", "--dims", "2x2x2", "--jobs", "2", "--checkpoint", p(&cp)],
        vec!["search", "--dims", "2x2x2", "--jobs", "0"],
        vec!["search", "--dims", "3x3x3", "--init", p(&fixture("strassen.mms"))],
        vec!["search", "--dims", "2x2x2", "--plus", "sometimes"],
        vec!["frobnicate"],
        vec!["path", "strassen", "standard:2x2x3", "--out", p(&dir.path().join("x"))],
    ] {
        assert_eq!(code(&run(&args)), 2, "{args:?}");
    }
}

#[test]
fn search_writes_scheme_trace_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("best.mms");
    let trace = dir.path().join("trace.csv");
    let o = run(&[
        "search", "--dims", "2x2x3", "--iters", "50000", "--seed", "4", "--out", p(&out), "--trace", p(&trace),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let best = read_scheme(&out).unwrap();
    assert!(best.rank() <= 11);

    let csv = std::fs::read_to_string(&trace).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("iteration,current_rank,best_rank"));
    let best_col: Vec<usize> = lines.map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert!(best_col.windows(2).all(|w| w[1] <= w[0]));

    let m = Manifest::parse(&std::fs::read_to_string(dir.path().join("best.mms.manifest")).unwrap()).unwrap();
    assert_eq!(m.get("seed"), Some("4"));
    assert_eq!(m.get("best_rank"), Some(best.rank().to_string().as_str()));
    for key in ["artifact", "rng", "schedule", "started_unix", "finished_unix", "output"] {
        assert!(m.get(key).is_some(), "{key}");
    }
}

#[test]
fn schedule_file_and_strassen_init() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.mms");
    let sched = fixture("growing_333.sched");
    let o = run(&["search", "--dims", "3x3x3", "--schedule", p(&sched), "--seed", "2", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(read_scheme(&out).unwrap().rank() < 27);

    let o = run(&["search", "--dims", "2x2x2", "--init", "strassen", "--iters", "1000", "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    assert_eq!(read_scheme(&out).unwrap().rank(), 7);
}

#[test]
fn identical_runs_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let go = |tag: &str, extra: &[&str]| {
        let out = dir.path().join(format!("{tag}.mms"));
        let trace = dir.path().join(format!("{tag}.csv"));
        let mut args = vec!["search", "--dims", "3x3x3", "--iters", "100000", "--seed", "9", "--out", p(&out), "--trace", p(&trace)];
        args.extend_from_slice(extra);
        assert_eq!(code(&run(&args)), 0);
        (std::fs::read(&out).unwrap(), std::fs::read(&trace).unwrap())
    };
    assert_eq!(go("a", &[]), go("b", &[]));
    assert_eq!(go("c", &["--jobs", "3"]), go("d", &["--jobs", "3"]));
}

#[test]
fn checkpoint_then_resume_matches_uninterrupted() {
    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("cp.json");
    let whole = dir.path().join("whole.mms");
    let resumed = dir.path().join("resumed.mms");
    let base = ["search", "--dims", "4x4x4", "--iters", "60000", "--seed", "1"];
    let mut a = base.to_vec();
    a.extend(["--out", p(&whole), "--checkpoint", p(&cp), "--checkpoint-every", "25000"]);
    assert_eq!(code(&run(&a)), 0);
    assert!(cp.exists());
    let o = run(&["search", "--resume", p(&cp), "--out", p(&resumed)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read(&whole).unwrap(), std::fs::read(&resumed).unwrap());

    let text = std::fs::read_to_string(&cp).unwrap();
    std::fs::write(&cp, text.replacen("\"seed\"", "\"seed \"", 1)).unwrap();
    let o = run(&["search", "--resume", p(&cp)]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("sha256"));
}
