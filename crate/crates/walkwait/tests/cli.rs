use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use walkwait::{parallel, ScenarioConfig};
use walkwait_core::{simulate_strategy, ArrivalDistribution, RouteSpec, Simulation, Strategy, TravelerProfile};

const UNIFORM: &str = r#"{"route": {"stops": [0, 1.0, 2.0]}, "traveler": {"v_w": 4, "v_b": 20}, "distribution": {"kind": "uniform", "t_b": 0.5}}"#;

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn walkwait(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_walkwait"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn with_uniform(patch: impl Fn(&str) -> String) -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "s.json", &patch(UNIFORM));
    (dir, path)
}

#[test]
fn decide_uniform() {
    let (_dir, cfg) = with_uniform(|s| s.to_string());
    let o = walkwait(&["--config", cfg.to_str().unwrap(), "decide"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "wait at stop 1 until t=0.2000 h; expected 0.5000 h\n");
}

#[test]
fn decide_deterministic_and_deadline() {
    let (_dir, cfg) = with_uniform(|s| {
        s.replace(
            r#""kind": "uniform", "t_b": 0.5"#,
            r#""kind": "deterministic", "t_b": 0.3"#,
        )
    });
    let o = walkwait(&["--config", cfg.to_str().unwrap(), "decide"]);
    assert_eq!(
        stdout(&o),
        "wait (bus arrives 0.3000 h; bus total 0.4000 h < walk 0.5000 h)\n"
    );

    let (_dir, cfg) = with_uniform(|s| s.replace("}}", "}, \"deadline\": 0.6}"));
    let o = walkwait(&["--config", cfg.to_str().unwrap(), "decide"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("t_w*=0.1000"), "{}", stdout(&o));
}

#[test]
fn decide_reads_stdin() {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_walkwait"))
        .arg("decide")
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(UNIFORM.as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(stdout(&o), "wait at stop 1 until t=0.2000 h; expected 0.5000 h\n");
}

#[test]
fn solve_variants() {
    let (_dir, cfg) = with_uniform(|s| s.to_string());
    let o = walkwait(&["--config", cfg.to_str().unwrap(), "solve"]);
    let text = stdout(&o);
    let first = text.lines().next().unwrap();
    assert!(first.starts_with("WaitUntil 0.200000000 residual "), "{first}");
    assert!(text.contains("bracket ["));

    let (_dir, cfg) = with_uniform(|s| s.replace("\"v_b\": 20", "\"v_b\": 4.0001"));
    let o = walkwait(&["--config", cfg.to_str().unwrap(), "solve"]);
    assert!(stdout(&o).starts_with("WalkNow\n"));

    let (_dir, cfg) = with_uniform(|s| s.replace("\"t_b\": 0.5", "\"t_b\": 0.1"));
    let o = walkwait(&["--config", cfg.to_str().unwrap(), "solve"]);
    assert!(stdout(&o).starts_with("WaitForBus\n"));
}

#[test]
fn exit_codes() {
    let (_dir, bad) = with_uniform(|s| s.replace("\"v_b\": 20", "\"v_b\": 2"));
    assert_eq!(
        walkwait(&["--config", bad.to_str().unwrap(), "decide"]).status.code(),
        Some(2)
    );

    let (_dir, unknown) = with_uniform(|s| s.replace("\"t_b\"", "\"t_b\": 0.5, \"oops\""));
    assert_eq!(
        walkwait(&["--config", unknown.to_str().unwrap(), "decide"])
            .status
            .code(),
        Some(2)
    );

    let (_dir, cfg) = with_uniform(|s| s.to_string());
    let c = cfg.to_str().unwrap();
    assert_eq!(
        walkwait(&["--config", c, "simulate", "--strategies", "jog"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        walkwait(&["--config", c, "sweep", "--param", "rate", "--from", "1", "--to", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        walkwait(&["--config", c, "--format", "xml", "decide"]).status.code(),
        Some(2)
    );
    assert_eq!(walkwait(&["--config", c]).status.code(), Some(2));

    let (_dir, glacial) = with_uniform(|s| {
        s.replace(
            r#""kind": "uniform", "t_b": 0.5"#,
            r#""kind": "exponential", "rate": 1e-9"#,
        )
    });
    let o = walkwait(&["--config", glacial.to_str().unwrap(), "solve"]);
    assert_eq!(o.status.code(), Some(3));

    let (_dir, det) = with_uniform(|s| s.replace(r#""kind": "uniform""#, r#""kind": "deterministic""#));
    assert_eq!(
        walkwait(&["--config", det.to_str().unwrap(), "solve"]).status.code(),
        Some(2)
    );

    let (_dir, late) = with_uniform(|s| s.replace("}}", "}, \"deadline\": 0.3}"));
    assert_eq!(
        walkwait(&["--config", late.to_str().unwrap(), "decide"]).status.code(),
        Some(2)
    );
}

#[test]
fn simulate_writes_csv() {
    let (dir, cfg) = with_uniform(|s| s.to_string());
    let out = dir.path().join("sim.csv");
    let o = walkwait(&[
        "--config",
        cfg.to_str().unwrap(),
        "--trials",
        "200000",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
        "simulate",
        "--strategies",
        "walk,waitbus",
        "--no-plan",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "strategy,stop,tau,n_trials,seed,mean_time,stderr");
    assert_eq!(lines.len(), 3);
    let bus: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(bus[0], "wait_for_bus");
    let (mean, se): (f64, f64) = (bus[5].parse().unwrap(), bus[6].parse().unwrap());
    assert!((mean - 0.35).abs() < 4.0 * se);
    assert_eq!(lines[2], "walk_all,,,200000,7,0.5,0");
}

#[test]
fn simulate_adds_recommendation_and_json() {
    let (dir, cfg) = with_uniform(|s| s.to_string());
    let out = dir.path().join("sim.json");
    let o = walkwait(&[
        "--config",
        cfg.to_str().unwrap(),
        "--trials",
        "1000",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
        "simulate",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let kinds: Vec<&str> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["strategy"]["kind"].as_str().unwrap())
        .collect();
    assert_eq!(kinds.len(), 3);
    assert!(kinds.contains(&"wait_then_walk"));
}

#[test]
fn single_trial_stderr_is_zero() {
    let (dir, cfg) = with_uniform(|s| s.to_string());
    let out = dir.path().join("one.csv");
    walkwait(&[
        "--config",
        cfg.to_str().unwrap(),
        "--trials",
        "1",
        "--out",
        out.to_str().unwrap(),
        "simulate",
        "--no-plan",
    ]);
    let csv = std::fs::read_to_string(&out).unwrap();
    for line in csv.lines().skip(1) {
        assert!(line.ends_with(",0"), "{line}");
    }
}

#[test]
fn sweep_t_b_is_affine_where_interior() {
    let (_dir, cfg) = with_uniform(|s| s.to_string());
    let o = walkwait(&[
        "--config",
        cfg.to_str().unwrap(),
        "sweep",
        "--param",
        "t_b",
        "--from",
        "0.1",
        "--to",
        "1.0",
        "--steps",
        "10",
    ]);
    let text = stdout(&o);
    let rows: Vec<Vec<String>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    assert_eq!(rows.len(), 10);
    let interior: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r[2] == "WaitUntil")
        .map(|r| (r[1].parse().unwrap(), r[3].parse().unwrap()))
        .collect();
    assert!(interior.len() >= 3);
    for w in interior.windows(2) {
        let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
        assert!((slope - 2.0).abs() < 1e-8, "slope {slope}");
    }
}

#[test]
fn sweep_d_variant_order_is_monotone() {
    let (_dir, cfg) = with_uniform(|s| s.to_string());
    let o = walkwait(&[
        "--config",
        cfg.to_str().unwrap(),
        "sweep",
        "--param",
        "d",
        "--from",
        "0.1",
        "--to",
        "4",
        "--steps",
        "40",
    ]);
    let rank = |v: &str| match v {
        "WalkNow" => 0,
        "WaitUntil" => 1,
        "WaitForBus" => 2,
        other => panic!("{other}"),
    };
    let ranks: Vec<i32> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| rank(l.split(',').nth(2).unwrap()))
        .collect();
    assert!(ranks.windows(2).all(|w| w[0] <= w[1]), "{ranks:?}");
    assert_eq!(ranks.first(), Some(&0));
    assert_eq!(ranks.last(), Some(&2));
    assert!(ranks.contains(&1));
}

#[test]
fn single_point_sweep_matches_solve() {
    let (_dir, cfg) = with_uniform(|s| s.to_string());
    let c = cfg.to_str().unwrap();
    let sweep = stdout(&walkwait(&[
        "--config", c, "sweep", "--param", "t_b", "--from", "0.5", "--to", "0.5", "--steps", "1",
    ]));
    let row: Vec<&str> = sweep.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[2], "WaitUntil");
    let solve = stdout(&walkwait(&["--config", c, "solve"]));
    let t_w: f64 = row[3].parse().unwrap();
    assert!(solve.starts_with(&format!("WaitUntil {t_w:.9} ")));
}

#[test]
fn dumped_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let configs = [
        UNIFORM.to_string(),
        UNIFORM.replace("}}", "}, \"deadline\": 0.6}"),
        UNIFORM.replace(
            r#""kind": "uniform", "t_b": 0.5"#,
            r#""kind": "exponential", "rate": 2.5"#,
        ),
        UNIFORM.replace(
            r#""kind": "uniform", "t_b": 0.5"#,
            r#""kind": "empirical", "bin_edges": [0, 0.1, 0.30000000000000004], "bin_masses": [0.3, 0.7]"#,
        ),
    ];
    for (i, text) in configs.iter().enumerate() {
        let path = write_config(dir.path(), &format!("c{i}.json"), text);
        let dumped = stdout(&walkwait(&["--config", path.to_str().unwrap(), "--dump-config"]));
        let original = ScenarioConfig::from_json(text).unwrap();
        let reparsed = ScenarioConfig::from_json(&dumped).unwrap();
        assert_eq!(original, reparsed);
        let again = write_config(dir.path(), &format!("d{i}.json"), &dumped);
        assert_eq!(
            stdout(&walkwait(&["--config", again.to_str().unwrap(), "--dump-config"])),
            dumped
        );
    }
}

#[test]
fn parallel_runner_is_bit_identical_to_sequential() {
    let route = RouteSpec::new(vec![0.0, 0.6, 1.5, 3.0]).unwrap();
    let t = TravelerProfile::new(3.0, 18.0).unwrap();
    let dist = ArrivalDistribution::empirical(vec![0.0, 0.2, 0.25, 0.9], vec![0.2, 0.5, 0.3]).unwrap();
    let sim = Simulation::new(&dist, &route, &t, 99).unwrap();
    for s in [
        Strategy::WalkAll,
        Strategy::WaitForBusAt { stop: 2 },
        Strategy::WaitThenWalk { stop: 3, tau: 0.22 },
    ] {
        let par = parallel::run(&sim, s, 123_457).unwrap();
        let seq = simulate_strategy(s, &dist, &route, &t, 123_457, 99).unwrap();
        assert_eq!(par.mean_time.to_bits(), seq.mean_time.to_bits());
        assert_eq!(par.stderr.to_bits(), seq.stderr.to_bits());
    }
}
