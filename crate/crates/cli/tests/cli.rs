use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use clap::CommandFactory;
use motivsim_cli::Cli;

fn motivsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_motivsim"))
        .args(args)
        .env_remove("MOTIVSIM_OUT")
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr_line(out: &Output) -> String {
    let text = String::from_utf8_lossy(&out.stderr).into_owned();
    assert_eq!(text.trim_end().lines().count(), 1, "{text}");
    text
}

#[test]
fn run_writes_outputs_and_is_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = motivsim(&["run", "--scenario", "scarce_food", "--seed", "42", "--out", path(out)]);
        assert!(o.status.success(), "{o:?}");
    }
    for name in ["trace.jsonl", "metrics.json", "scenario.json"] {
        let x = fs::read(a.join(name)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, fs::read(b.join(name)).unwrap(), "{name}");
    }
    let trace = fs::read_to_string(a.join("trace.jsonl")).unwrap();
    let ticks = motivsim::harness::builtin("scarce_food").unwrap().ticks;
    assert_eq!(trace.lines().count() as u64, ticks);
    assert!(fs::read_to_string(a.join("scenario.json"))
        .unwrap()
        .contains("\"seed\": 42"));
}

#[test]
fn csv_format_and_env_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_motivsim"))
        .args(["run", "--scenario", "empty", "--format", "csv"])
        .env("MOTIVSIM_OUT", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{o:?}");
    let csv = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "tick,animat,x,y,behavior,alpha_hunger,alpha_thirst,alpha_fatigue,A_hunger,A_thirst,A_fatigue,hunger,thirst,fatigue,strength,lucidity"
    );
}

#[test]
fn seed_range_writes_one_directory_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let o = motivsim(&[
        "run",
        "--scenario",
        "scarce_food",
        "--seeds",
        "3..=5",
        "--out",
        path(dir.path()),
    ]);
    assert!(o.status.success(), "{o:?}");
    for seed in 3..=5 {
        let single = dir.path().join(format!("single-{seed}"));
        let s = seed.to_string();
        assert!(
            motivsim(&["run", "--scenario", "scarce_food", "--seed", &s, "--out", path(&single)])
                .status
                .success()
        );
        let batch = fs::read(dir.path().join(format!("seed-{seed}/trace.jsonl"))).unwrap();
        assert_eq!(batch, fs::read(single.join("trace.jsonl")).unwrap());
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = motivsim(&["run", "--scenario", "nope", "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr_line(&o).contains("nope"));

    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = motivsim(&["run", "--scenario", "empty", "--out", path(&blocker.join("sub"))]);
    assert_eq!(o.status.code(), Some(3));
    stderr_line(&o);

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"animats":[{"internal":{"hunger":1.5}}]}"#).unwrap();
    let o = motivsim(&["run", "--scenario", path(&bad), "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr_line(&o).contains("animats[0].internal.hunger"));

    let broken = dir.path().join("broken.json");
    fs::write(&broken, "{\n \"ticks\": \n").unwrap();
    let o = motivsim(&["run", "--scenario", path(&broken), "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr_line(&o).contains("line"));
}

#[test]
fn replay_detects_a_flipped_byte() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    assert!(
        motivsim(&["run", "--scenario", "abundant_food", "--seed", "7", "--out", path(&run)])
            .status
            .success()
    );
    let trace = run.join("trace.jsonl");
    let o = motivsim(&["replay", "--trace", path(&trace), "--verify"]);
    assert!(o.status.success(), "{o:?}");

    let mut bytes = fs::read(&trace).unwrap();
    let line_start = bytes
        .iter()
        .enumerate()
        .filter(|(_, b)| **b == b'\n')
        .nth(499)
        .unwrap()
        .0
        + 1;
    let digit = line_start + bytes[line_start..].iter().position(|b| b.is_ascii_digit()).unwrap();
    bytes[digit] = if bytes[digit] == b'9' { b'8' } else { bytes[digit] + 1 };
    fs::write(&trace, &bytes).unwrap();
    let o = motivsim(&["replay", "--trace", path(&trace), "--verify"]);
    assert_eq!(o.status.code(), Some(5));
    assert!(stderr_line(&o).contains("line 501"));
    // without --verify the difference is reported but not fatal
    assert!(motivsim(&["replay", "--trace", path(&trace)]).status.success());
}

#[test]
fn replay_of_csv_with_explicit_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let o = motivsim(&[
        "run",
        "--scenario",
        "two_environments",
        "--seed",
        "3",
        "--format",
        "csv",
        "--out",
        path(dir.path()),
    ]);
    assert!(o.status.success());
    let trace = dir.path().join("trace.csv");
    fs::remove_file(dir.path().join("scenario.json")).unwrap();
    let o = motivsim(&["replay", "--trace", path(&trace), "--verify"]);
    assert_eq!(o.status.code(), Some(4));
    let o = motivsim(&[
        "replay",
        "--trace",
        path(&trace),
        "--scenario",
        "two_environments",
        "--seed",
        "3",
        "--verify",
    ]);
    assert!(o.status.success(), "{o:?}");
    let o = motivsim(&[
        "replay",
        "--trace",
        path(&trace),
        "--scenario",
        "two_environments",
        "--seed",
        "4",
        "--verify",
    ]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn metrics_recomputes_the_written_document() {
    let dir = tempfile::tempdir().unwrap();
    assert!(
        motivsim(&["run", "--scenario", "scarce_food", "--out", path(dir.path())])
            .status
            .success()
    );
    let o = motivsim(&["metrics", "--trace", path(&dir.path().join("trace.jsonl"))]);
    assert!(o.status.success());
    assert_eq!(o.stdout, fs::read(dir.path().join("metrics.json")).unwrap());
}

#[test]
fn list_scenarios_names_builtins() {
    let o = motivsim(&["list-scenarios"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let names: Vec<&str> = text.lines().collect();
    assert_eq!(names, motivsim::harness::builtin_names().collect::<Vec<_>>());
}

#[test]
fn help_lists_every_flag() {
    let cli = Cli::command();
    for sub in cli.get_subcommands() {
        let name = sub.get_name();
        let o = motivsim(&[name, "--help"]);
        assert!(o.status.success(), "{name}");
        let help = String::from_utf8(o.stdout).unwrap();
        for arg in sub.get_arguments() {
            if let Some(long) = arg.get_long() {
                assert!(help.contains(&format!("--{long}")), "{name} --help lacks --{long}");
            }
        }
    }
}
