use std::path::{Path, PathBuf};
use std::process::Command;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("graphasm-cli-{}-{tag}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

/// Exit code, stdout, stderr.
fn run(args: &[&str], out: &Path) -> (i32, String, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_graphasm"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap();
    (
        o.status.code().unwrap(),
        String::from_utf8(o.stdout).unwrap(),
        String::from_utf8(o.stderr).unwrap(),
    )
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn empty_rule_grammar_has_a_one_graph_language() {
    let out = scratch("empty");
    let (code, stdout, _) = run(&["explore", data("empty.gas").to_str().unwrap()], &out);
    assert_eq!(code, 0);
    assert!(stdout.contains("language=1"));
    assert_eq!(read(&out, "language.txt").matches("member=").count(), 1);
}

#[test]
fn counter_tiles_have_a_unique_terminal() {
    let out = scratch("counter");
    let (code, stdout, _) = run(&["explore", data("counter.tiles").to_str().unwrap()], &out);
    assert_eq!(code, 0);
    assert!(stdout.contains("unique_terminal=true"));
}

#[test]
fn malformed_scenario_reports_its_line() {
    let out = scratch("bad");
    std::fs::create_dir_all(&out).unwrap();
    let bad = out.join("bad.gas");
    std::fs::write(&bad, "alphabet: a\ngraph g:\n  vertex 0 zz\n").unwrap();
    let (code, _, stderr) = run(&["explore", bad.to_str().unwrap()], &out);
    assert_eq!(code, 2);
    assert!(stderr.contains("line 3"), "{stderr}");
}

#[test]
fn missing_file_is_an_io_error() {
    let out = scratch("missing");
    let (code, _, _) = run(&["explore", "/nonexistent/x.gas"], &out);
    assert_eq!(code, 1);
}

#[test]
fn ld_verdicts_and_counterexamples() {
    let out = scratch("ld-ok");
    let (code, stdout, _) = run(&["check-ld", data("chain.gds").to_str().unwrap()], &out);
    assert_eq!(code, 0);
    assert!(stdout.contains("verdict=holds_on_explored"));

    let out = scratch("ld-race");
    let (code, _, _) = run(&["check-ld", data("race.gds").to_str().unwrap()], &out);
    assert_eq!(code, 4);
    assert!(!read(&out, "counterexample.txt").is_empty());

    let out = scratch("ld-bound");
    let (code, _, _) = run(&["check-ld", data("counter.tiles").to_str().unwrap(), "--max-states", "3"], &out);
    assert_eq!(code, 3);
    assert!(read(&out, "ld.txt").starts_with("verdict=inconclusive"));
}

#[test]
fn ring_passes_on_the_plane_and_k4_is_refused() {
    let out = scratch("ring");
    let (code, _, _) = run(&["compile-sim", data("ring3.procsys").to_str().unwrap(), "--target", "z2"], &out);
    assert_eq!(code, 0);
    assert!(read(&out, "report.txt").contains("verdict=pass"));

    let out = scratch("k4-z2");
    let (code, _, _) = run(&["compile-sim", data("k4.procsys").to_str().unwrap(), "--target", "z2"], &out);
    assert_eq!(code, 5);

    let out = scratch("k4-z3");
    let (code, _, _) = run(&["compile-sim", data("k4.procsys").to_str().unwrap(), "--target", "z3"], &out);
    assert_eq!(code, 0);
    assert!(read(&out, "layout.txt").contains("inbuffer_arity=4"));
}

#[test]
fn star_blockage_witness() {
    let out = scratch("star");
    let (code, _, _) = run(&["blockage", data("star.procsys").to_str().unwrap()], &out);
    assert_eq!(code, 0);
    assert!(read(&out, "blockage.txt").contains("witness layout="));
}

#[test]
fn surface_cost_cases() {
    let out = scratch("halt");
    let (code, stdout, _) = run(&["surface-cost", data("halt.compose").to_str().unwrap(), "--runs", "2"], &out);
    assert_eq!(code, 0);
    // nine wedges of one seed row, two cells wide
    assert!(stdout.contains("run=base min=-1,0,0 max=0,0,16 dims=2x1x17"), "{stdout}");

    let out = scratch("noids");
    let (code, _, stderr) = run(&["surface-cost", data("noids.compose").to_str().unwrap()], &out);
    assert_eq!(code, 6, "{stderr}");
}

#[test]
fn repeated_runs_write_identical_files() {
    for (args, files) in [
        (vec!["compile-sim", "ring3.procsys", "--target", "z2", "--seed", "7"], vec!["report.txt", "trace.txt", "placements.txt"]),
        (vec!["render", "pingpong.procsys", "--target", "z2", "--seed", "3"], vec!["render.txt", "render.svg"]),
        (vec!["render", "counter.tiles", "--seed", "3"], vec!["render.txt", "render.svg"]),
    ] {
        let args: Vec<String> = args
            .iter()
            .map(|a| if a.contains('.') { data(a).to_str().unwrap().to_string() } else { a.to_string() })
            .collect();
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (a, b) = (scratch("det-a"), scratch("det-b"));
        assert_eq!(run(&args, &a).0, 0);
        assert_eq!(run(&args, &b).0, 0);
        for f in files {
            assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
        }
    }
}
