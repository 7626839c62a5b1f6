use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn tmp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("garnet-cli-{}-{name}", std::process::id()))
}

fn garnet(args: &[&str], files: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_garnet"));
    cmd.args(args).env_remove("GARNET_CAP");
    for (flag, path) in files {
        cmd.arg(flag).arg(path);
    }
    cmd.output().expect("binary runs")
}

fn report(args: &[&str], files: &[(&str, &Path)], name: &str) -> (i32, Value) {
    let out = tmp(name);
    let mut files = files.to_vec();
    files.push(("--output", &out));
    let o = garnet(args, &files);
    let text = std::fs::read_to_string(&out).expect("report written");
    let _ = std::fs::remove_file(&out);
    (o.status.code().unwrap(), serde_json::from_str(&text).unwrap())
}

#[test]
fn reports_are_byte_identical_across_runs_and_job_counts() {
    let g = data("walking_cospan.json");
    let (m1, m2) = (data("f_0_to_1.json"), data("f_3_to_2.json"));
    let files = [("--generators", g.as_path()), ("--map", m1.as_path()), ("--map", m2.as_path())];
    let run = |jobs: &str, name: &str| {
        let out = tmp(name);
        let mut f = files.to_vec();
        f.push(("--output", &out));
        assert!(garnet(&["factorize", "--jobs", jobs], &f).status.success());
        let bytes = std::fs::read(&out).unwrap();
        let _ = std::fs::remove_file(&out);
        bytes
    };
    let a = run("1", "det-a.json");
    assert_eq!(a, run("1", "det-b.json"));
    assert_eq!(a, run("2", "det-c.json"));
}

#[test]
fn emitted_trace_verifies_and_a_tampered_one_does_not() {
    let g = data("walking_cospan.json");
    let m = data("f_0_to_1.json");
    let (code, r) = report(&["factorize"], &[("--generators", &g), ("--map", &m)], "rt.json");
    assert_eq!(code, 0);
    let trace = tmp("rt-trace.json");
    std::fs::write(&trace, serde_json::to_string(&r).unwrap()).unwrap();
    let o = garnet(&["trace-verify"], &[("--generators", &g), ("--map", &m), ("--trace", &trace)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));

    let mut bad = r["results"][0]["trace"].clone();
    bad["stages"][1]["sizes"][0] = 7.into();
    std::fs::write(&trace, serde_json::to_string(&bad).unwrap()).unwrap();
    let o = garnet(&["trace-verify"], &[("--generators", &g), ("--map", &m), ("--trace", &trace)]);
    let _ = std::fs::remove_file(&trace);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn lift_counts_structures() {
    let g = data("walking_cospan.json");
    let (code, r) = report(&["lift", "--mode", "count"], &[("--generators", &g), ("--map", &data("f_2_to_1.json"))], "lift2.json");
    assert_eq!(code, 0);
    assert_eq!(r["results"][0]["count"], 2);
    let (code, r) = report(&["lift", "--mode", "count"], &[("--generators", &g), ("--map", &data("f_0_to_1.json"))], "lift0.json");
    assert_eq!(code, 0, "a zero count is an answer, not a failure");
    assert_eq!(r["results"][0]["count"], 0);
}

#[test]
fn empty_generators_leave_the_map_on_the_right() {
    let (code, r) = report(
        &["factorize"],
        &[("--generators", &data("empty.json")), ("--map", &data("f_2_to_1.json"))],
        "empty.json",
    );
    assert_eq!(code, 0);
    let res = &r["results"][0];
    assert_eq!(res["converged_stage"], 0);
    assert_eq!(res["lf"]["table"], serde_json::json!([0, 1]));
    assert_eq!(res["rf"]["table"], serde_json::json!([0, 0]));
}

#[test]
fn subobject_classifier_laws_pass_in_parallel() {
    let m1 = data("f_1_to_2.json");
    let m2 = data("f_2_to_1.json");
    let o = garnet(
        &["laws", "--generators", "subobject_classifier", "--backdrop", "mono", "--jobs", "2"],
        &[("--map", &m1), ("--map", &m2)],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn replay_under_a_product_doubles_the_left_factor() {
    let g = data("walking_cospan.json");
    let m = data("f_0_to_1.json");
    let (_, r) = report(&["factorize"], &[("--generators", &g), ("--map", &m)], "rp.json");
    let trace = tmp("rp-trace.json");
    std::fs::write(&trace, serde_json::to_string(&r["results"][0]["trace"]).unwrap()).unwrap();
    let o = garnet(
        &["replay", "--functor", "product:2"],
        &[("--generators", &g), ("--map", &m), ("--trace", &trace)],
    );
    assert_eq!(o.status.code(), Some(0));
    let o = garnet(&["replay", "--functor", "support"], &[("--generators", &g), ("--map", &m), ("--trace", &trace)]);
    let _ = std::fs::remove_file(&trace);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn failures_map_to_distinct_exit_codes() {
    let g = data("walking_cospan.json");
    let code = |args: &[&str], map: &Path| garnet(args, &[("--generators", &g), ("--map", map)]).status.code();
    assert_eq!(code(&["factorize"], &data("missing.json")), Some(1));
    assert_eq!(code(&["factorize", "--max-steps", "1"], &data("f_0_to_1.json")), Some(2));
    assert_eq!(code(&["lift", "--mode", "first"], &data("f_0_to_1.json")), Some(3));
    assert_eq!(code(&["factorize", "--cap", "1"], &data("f_3_to_2.json")), Some(4));
}

#[test]
fn quillen_stops_after_one_stage_for_points() {
    let (code, r) = report(
        &["quillen"],
        &[("--generators", &data("point.json")), ("--map", &data("f_2_to_1.json"))],
        "quillen.json",
    );
    assert_eq!(code, 0);
    assert_eq!(r["results"][0]["stage_count"], 1);
}
