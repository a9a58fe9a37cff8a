//! End-to-end smoke tests driving the compiled binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_hiersel");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "command failed\nstdout:\n{}\nstderr:\n{}",
        stdout(out),
        stderr(out)
    );
}

#[test]
fn help_lists_all_subcommands() {
    let out = run(&["--help"]);
    assert_ok(&out);
    let text = stdout(&out);
    for sub in ["simulate", "fit", "sweep", "anova", "corpus", "gen-corpus"] {
        assert!(text.contains(sub), "--help does not mention {sub}");
    }
}

#[test]
fn simulate_then_fit_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("freq.csv");
    let out = run(&[
        "simulate",
        "--n", "200", "--m", "4",
        "--fm", "uniform", "--fw", "uniform", "--fc", "pow:1.5",
        "--draws", "200000", "--seed", "7",
        "--out", table.to_str().unwrap(),
    ]);
    assert_ok(&out);
    assert!(table.exists());

    let out = run(&["fit", table.to_str().unwrap()]);
    assert_ok(&out);
    let text = stdout(&out);
    assert!(text.contains("exponent"), "fit output missing exponent line:\n{text}");
    assert!(text.contains("adjusted r^2"), "fit output missing adjusted r^2:\n{text}");
}

#[test]
fn simulate_without_out_prints_csv() {
    let out = run(&[
        "simulate",
        "--n", "10", "--m", "2",
        "--fm", "uniform", "--fw", "uniform", "--fc", "uniform",
        "--draws", "1000", "--mode", "expected",
    ]);
    assert_ok(&out);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("object_id,hierarchy,within_rank,count"));
    let total: f64 = lines
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 1000.0).abs() < 1e-9, "expected counts sum to draws, got {total}");
}

fn write_config(path: &Path, replicates: u32) {
    fs::write(
        path,
        format!(
            "m = 2, 3\n\
             n = 40\n\
             draws = 20000\n\
             ratio_m = 1, 2\n\
             ratio_w = 1, 2\n\
             ratio_c = 1, 2\n\
             fm = peaked:{{rm}}\n\
             fw = pow:{{0.8*rw}}\n\
             fc = tri:{{rc}}:desc\n\
             replicates = {replicates}\n\
             master_seed = 99\n"
        ),
    )
    .unwrap();
}

#[test]
fn sweep_config_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.conf");
    write_config(&config, 1);

    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out_dir in [&out_a, &out_b] {
        let out = run(&[
            "sweep",
            "--config", config.to_str().unwrap(),
            "--out-dir", out_dir.to_str().unwrap(),
        ]);
        assert_ok(&out);
        assert!(stdout(&out).contains("cells"));
    }

    let bytes_a = fs::read(out_a.join("sweep.csv")).unwrap();
    let bytes_b = fs::read(out_b.join("sweep.csv")).unwrap();
    assert_eq!(bytes_a, bytes_b, "sweep.csv differs between identical runs");
    assert!(out_a.join("meta.txt").exists());

    let text = String::from_utf8(bytes_a).unwrap();
    assert!(text.starts_with("cell_id,M,N,T,ratio_m,ratio_w,ratio_c,replicate,seed,alpha,adj_r2,n_zero\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 8, "2 M-levels x 8 ratio combinations");
}

#[test]
fn fig5_expected_preset_emits_trend_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "sweep",
        "--preset", "fig5",
        "--mode", "expected",
        "--out-dir", dir.path().to_str().unwrap(),
    ]);
    assert_ok(&out);
    let text = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 25, "5 M-levels x 5 N-levels");
    assert!(dir.path().join("trends.csv").exists());
    assert!(dir.path().join("meta.txt").exists());
}

#[test]
fn anova_writes_three_tables() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.conf");
    write_config(&config, 2);
    let sweep_dir = dir.path().join("sweep");
    assert_ok(&run(&[
        "sweep",
        "--config", config.to_str().unwrap(),
        "--out-dir", sweep_dir.to_str().unwrap(),
    ]));

    let anova_dir = dir.path().join("anova");
    let out = run(&[
        "anova",
        sweep_dir.join("sweep.csv").to_str().unwrap(),
        "--out-dir", anova_dir.to_str().unwrap(),
    ]);
    assert_ok(&out);
    assert!(stdout(&out).contains("one-way ANOVA"));
    for file in ["anova_adj_r2.csv", "anova_alpha.csv", "regression_alpha.csv"] {
        assert!(anova_dir.join(file).exists(), "missing {file}");
    }
}

#[test]
fn gen_corpus_feeds_corpus_analysis() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_dir = dir.path().join("texts");
    let out = run(&[
        "gen-corpus",
        "--n", "60", "--m", "3",
        "--fm", "uniform", "--fw", "uniform", "--fc", "pow:1.0",
        "--topics", "4", "--tokens-per-topic", "2000",
        "--out-dir", corpus_dir.to_str().unwrap(),
    ]);
    assert_ok(&out);
    let mut files: Vec<_> = fs::read_dir(&corpus_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    files.sort();
    assert_eq!(files, ["topic01.txt", "topic02.txt", "topic03.txt", "topic04.txt"]);

    let report_dir = dir.path().join("report");
    let out = run(&[
        "corpus",
        "--dir", corpus_dir.to_str().unwrap(),
        "--out-dir", report_dir.to_str().unwrap(),
    ]);
    assert_ok(&out);
    assert!(stdout(&out).contains("correlation"));
    for file in ["nt_table.csv", "group_stats.csv", "topic_fits.csv"] {
        assert!(report_dir.join(file).exists(), "missing {file}");
    }
}

#[test]
fn bad_inputs_exit_nonzero_with_diagnostics() {
    let out = run(&["fit", "/no/such/file.csv"]);
    assert!(!out.status.success());
    assert!(stderr(&out).to_lowercase().contains("error"));

    let out = run(&["sweep", "--preset", "bogus"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("fig3"), "error should list known presets");

    let out = run(&["sweep", "--preset", "fig3", "--vary-both"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("fig4"));

    let out = run(&[
        "simulate",
        "--n", "3", "--m", "9",
        "--fm", "uniform", "--fw", "uniform", "--fc", "uniform",
        "--draws", "10",
    ]);
    assert!(!out.status.success());
    assert!(stderr(&out).to_lowercase().contains("error"));
}
