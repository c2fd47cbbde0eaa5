use std::process::{Command, Output};

use proptest::prelude::*;
use regime_lab::output::{format_num, round_sig};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_regime-lab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn records(text: &str) -> (csv::StringRecord, Vec<csv::StringRecord>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().clone();
    let rows = r.records().map(Result::unwrap).collect();
    (header, rows)
}

fn col(header: &csv::StringRecord, name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn continuation_json_object() {
    let o = run(&[
        "continuation",
        "--sigma",
        "0.5",
        "--r",
        "0.25",
        "--format",
        "json",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["x_cutoff"], 1.0);
    assert_eq!(v["theta_cutoff"], 0.75);
    assert_eq!(v["solver"], "closed-form");
}

#[test]
fn iterated_solver_matches_closed_form_output() {
    let closed = run(&["continuation", "--sigma", "0.7", "--r", "0,0.3,0.9"]);
    let iter = run(&[
        "continuation",
        "--sigma",
        "0.7",
        "--r",
        "0,0.3,0.9",
        "--solver",
        "iterated",
    ]);
    assert!(iter.status.success());
    assert_eq!(closed.stdout, iter.stdout);
}

#[test]
fn continuation_benchmark_table() {
    let o = run(&[
        "continuation",
        "--sigma",
        "0.5",
        "--r",
        "0.25",
        "--theta",
        "1:2:1",
    ]);
    let (h, rows) = records(&stdout(&o));
    assert_eq!(
        h.iter().collect::<Vec<_>>(),
        [
            "sigma",
            "r",
            "x_cutoff",
            "theta_cutoff",
            "rbar",
            "theta",
            "attack",
            "welfare"
        ]
    );
    assert_eq!(&rows[0][col(&h, "welfare")], "0.49875");
    assert_eq!(&rows[1][col(&h, "welfare")], "1.99875");
}

#[test]
fn negative_sigma_is_a_domain_error() {
    let o = run(&["continuation", "--sigma", "-1", "--r", "0.25"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("sigma must be positive"));
    assert_eq!(e.lines().count(), 1);
    assert!(o.stdout.is_empty());
}

#[test]
fn usage_errors_exit_two_with_one_line() {
    for args in [
        &["continuation", "--sigma", "1"][..],
        &["continuation", "--sigma", "1", "--r", "0.2", "--nope", "1"],
        &["frobnicate"],
        &["simulate", "--sigma", "1", "--theta", "0"],
        &[
            "welfare-sweep",
            "--sigma",
            "1",
            "--rprime",
            "0.5",
            "--theta",
            "0:1",
        ],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert_eq!(stderr(&o).lines().count(), 1, "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn help_exits_zero() {
    let o = run(&["--help"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("welfare-sweep"));
}

#[test]
fn rprime_outside_family_is_rejected() {
    let o = run(&["signaling", "--sigma", "3", "--rprime", "0.2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn welfare_sweep_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig2.csv");
    let o = run(&[
        "welfare-sweep",
        "--sigma",
        "3",
        "--rbar",
        "0.2",
        "--rprime",
        "0.8",
        "--theta",
        "0:7:0.01",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(!text.contains('\r'));
    let (h, rows) = records(&text);
    assert_eq!(rows.len(), 701);
    let (t, u) = (col(&h, "theta"), col(&h, "welfare"));
    for (theta, welfare) in [("0.1", "0"), ("1", "0.82"), ("5", "4.84833333")] {
        let row = rows.iter().find(|r| &r[t] == theta).unwrap();
        assert_eq!(&row[u], welfare, "theta {theta}");
    }
}

#[test]
fn attack_curve_shape() {
    // 1, then falling with slope -1/(2 sigma), then 0
    let o = run(&[
        "welfare-sweep",
        "--sigma",
        "3",
        "--rprime",
        "0.8",
        "--theta",
        "-1:7:0.5",
    ]);
    let (h, rows) = records(&stdout(&o));
    let (t, a) = (col(&h, "theta"), col(&h, "attack"));
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r[t].parse().unwrap(), r[a].parse().unwrap()))
        .collect();
    for &(theta, attack) in &pts {
        let expected = ((5.91 - theta) / 6.0_f64).clamp(0.0, 1.0);
        assert!((attack - expected).abs() < 1e-8, "theta {theta}");
    }
    assert_eq!(pts.first().unwrap().1, 1.0);
    assert_eq!(pts.last().unwrap().1, 0.0);
}

#[test]
fn compare_columns_and_crossing() {
    let o = run(&[
        "compare", "--sigma", "3", "--rprime", "0.8", "--rhi", "0.9", "--theta", "0:7:0.01",
    ]);
    let (h, rows) = records(&stdout(&o));
    assert_eq!(
        h.iter().collect::<Vec<_>>(),
        [
            "sigma",
            "rbar",
            "rprime",
            "theta",
            "region",
            "attack",
            "welfare",
            "rprime_hi",
            "welfare_hi",
            "verdict"
        ]
    );
    let v = col(&h, "verdict");
    assert!(rows.iter().any(|r| &r[v] == "higher"));
    assert!(rows.iter().any(|r| &r[v] == "lower"));

    let o = run(&[
        "compare", "--sigma", "0.5", "--rprime", "0.8", "--rhi", "0.9", "--theta", "0:7:0.01",
    ]);
    let (h, rows) = records(&stdout(&o));
    let v = col(&h, "verdict");
    assert!(rows.iter().all(|r| &r[v] != "higher"));
}

#[test]
fn simulate_schema_and_determinism() {
    let args = [
        "simulate",
        "--sigma",
        "0.5",
        "--r",
        "0.25",
        "--theta",
        "0:2:0.5",
        "--n-agents",
        "2000",
        "--n-reps",
        "4",
        "--seed",
        "11",
    ];
    let a = run(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    let b = bin()
        .args(args)
        .env("REGIME_LAB_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
    let (h, rows) = records(&stdout(&a));
    assert_eq!(
        h.iter().collect::<Vec<_>>(),
        [
            "sigma",
            "rbar",
            "mode",
            "policy",
            "theta",
            "x_cutoff",
            "n_agents",
            "n_reps",
            "seed",
            "alpha_mean",
            "alpha_hw",
            "fall_freq",
            "welfare_mean"
        ]
    );
    assert_eq!(rows.len(), 5);
    let alpha = col(&h, "alpha_mean");
    assert_eq!(&rows[0][alpha], "1");
    assert_eq!(&rows[4][alpha], "0");
}

#[test]
fn simulate_signaling_mode() {
    let o = run(&[
        "simulate",
        "--mode",
        "signaling",
        "--sigma",
        "3",
        "--rprime",
        "0.8",
        "--theta",
        "2",
        "--n-agents",
        "100",
        "--n-reps",
        "2",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = records(&stdout(&o));
    assert_eq!(&rows[0][col(&h, "policy")], "0.8");
    assert_eq!(&rows[0][col(&h, "alpha_mean")], "0");
    assert_eq!(&rows[0][col(&h, "welfare_mean")], "1.82");
}

#[test]
fn bad_thread_cap_is_rejected() {
    let o = bin()
        .args(["signaling", "--sigma", "1", "--rprime", "0.5"])
        .env("REGIME_LAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_default_grid_passes() {
    let o = run(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (h, rows) = records(&stdout(&o));
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| &r[col(&h, "status")] == "pass"));
}

#[test]
fn verify_negative_control_fails() {
    let o = run(&[
        "verify",
        "--sigmas",
        "0.5,3",
        "--perturb-theta-upper",
        "1e-6",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("FAILED signaling.indifference_at_top"));
}

#[test]
fn verify_empty_grid() {
    let o = run(&["verify", "--sigmas", ""]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("0 checks"));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# figure 2\nsigma=3\nrbar=0.2\nrprime=0.8\ntheta=0:7:0.01\nseed=5\n",
    )
    .unwrap();
    let c = cfg.to_str().unwrap();

    let from_cfg = run(&["welfare-sweep", "--config", c]);
    let explicit = run(&[
        "welfare-sweep",
        "--sigma",
        "3",
        "--rbar",
        "0.2",
        "--rprime",
        "0.8",
        "--theta",
        "0:7:0.01",
    ]);
    assert!(from_cfg.status.success(), "{}", stderr(&from_cfg));
    assert_eq!(from_cfg.stdout, explicit.stdout);

    let overridden = run(&["welfare-sweep", "--config", c, "--sigma", "0.5"]);
    let (h, rows) = records(&stdout(&overridden));
    assert!(rows.iter().all(|r| &r[col(&h, "sigma")] == "0.5"));
}

#[test]
fn csv_round_trips_at_nine_digits() {
    let o = run(&[
        "welfare-sweep",
        "--sigma",
        "2.7",
        "--rbar",
        "0.3",
        "--rprime",
        "0.45,0.9",
        "--theta",
        "-1:8:0.03",
    ]);
    let (h, rows) = records(&stdout(&o));
    let p = regime_lab_core::ModelParams::new(2.7, 0.3).unwrap();
    let (rp, t, w) = (col(&h, "rprime"), col(&h, "theta"), col(&h, "welfare"));
    for r in rows {
        let rprime: f64 = r[rp].parse().unwrap();
        let theta: f64 = r[t].parse().unwrap();
        let welfare: f64 = r[w].parse().unwrap();
        let eq = regime_lab_core::solve_signaling(&p, rprime).unwrap();
        assert_eq!(welfare, round_sig(eq.ex_post_welfare(theta)));
    }
}

proptest! {
    #[test]
    fn formatting_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::ZERO) {
        let s = format_num(x);
        let back: f64 = s.parse().unwrap();
        prop_assert_eq!(back, round_sig(x));
        prop_assert_eq!(format_num(back), s);
        if x != 0.0 {
            prop_assert!(((back - x) / x).abs() <= 5e-9);
        }
    }
}
