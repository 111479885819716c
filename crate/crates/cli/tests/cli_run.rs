mod common;

use std::path::Path;
use std::process::Command;

use tclplan_cli::run::{load_inputs, solve, AGGREGATE_FILE, CONTROLS_FILE, REPORT_FILE, TRAJECTORIES_FILE};
use tclplan_cli::{run_plan, BudgetSpec, PopulationSource, RunConfig, SynthRanges};
use tclplan_core::dynamics::simulate_reflected;
use tclplan_core::feasibility::tau_bounds;
use tclplan_core::{ControlSignal, TclParams};

fn tclplan(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_tclplan")).args(args).output().unwrap()
}

fn plan_args<'a>(price: &'a str, ambient: &'a str, out: &'a str, tau_bar: &'a str) -> Vec<&'a str> {
    vec![
        "plan", "--price", price, "--ambient", ambient, "--synthetic", "20", "--seed", "11", "--tau-bar", tau_bar,
        "--out", out,
    ]
}

fn read_csv(path: &Path) -> Vec<Vec<f64>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|rec| rec.unwrap().iter().map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn plan_writes_consistent_bundle_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (price, ambient) = common::write_inputs(dir.path());
    let (p, a) = (price.to_str().unwrap(), ambient.to_str().unwrap());
    let out1 = dir.path().join("a");
    let out2 = dir.path().join("b");
    for out in [&out1, &out2] {
        let o = tclplan(&plan_args(p, a, out.to_str().unwrap(), "0.3333333333333333"));
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in [AGGREGATE_FILE, CONTROLS_FILE, TRAJECTORIES_FILE, REPORT_FILE, "plan_switches.csv"] {
        let x = std::fs::read(out1.join(f)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, std::fs::read(out2.join(f)).unwrap(), "{f} differs between runs");
    }

    let agg = read_csv(&out1.join(AGGREGATE_FILE));
    let ctl = read_csv(&out1.join(CONTROLS_FILE));
    let traj = read_csv(&out1.join(TRAJECTORIES_FILE));
    assert_eq!(agg.len(), 1441);
    assert_eq!(ctl.len(), 1441);
    assert_eq!(traj.len(), 1441);
    assert_eq!(ctl[0].len(), 21);
    let kw = 14.0 / 2.5;
    for (a, c) in agg.iter().zip(&ctl) {
        assert_eq!(a[0], c[0]);
        assert!(c[1..].iter().all(|&u| u == 0.0 || u == 1.0));
        let on: f64 = c[1..].iter().sum();
        assert_eq!(a[1], kw * on);
    }
    let report = std::fs::read_to_string(out1.join(REPORT_FILE)).unwrap();
    for key in ["threshold_price = ", "on_set = [", "tau_bar_lower = ", "cost_convex = ", "cost_binary = ", "max_window_deviation_c = "] {
        assert!(report.contains(key), "missing {key}");
    }
}

#[test]
fn infeasible_budget_exits_two_with_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let (price, ambient) = common::write_inputs(dir.path());
    let out = dir.path().join("o");
    let o = tclplan(&plan_args(price.to_str().unwrap(), ambient.to_str().unwrap(), out.to_str().unwrap(), "0.05"));
    assert_eq!(o.status.code(), Some(2));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("tau_bar_lower = ") && stdout.contains("below lower bound"), "{stdout}");
    assert!(!out.join(AGGREGATE_FILE).exists());

    let o = tclplan(&[
        "feasibility", "--price", price.to_str().unwrap(), "--ambient", ambient.to_str().unwrap(), "--synthetic", "20",
        "--tau-bar", "0.99",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn input_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let (price, ambient) = common::write_inputs(dir.path());
    let (p, a) = (price.to_str().unwrap(), ambient.to_str().unwrap());
    let out = dir.path().join("o");
    let out = out.to_str().unwrap();

    let mut prices = common::price_day();
    prices[5] = 0.0;
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, common::series_csv("price_per_mwh", &prices)).unwrap();
    let o = tclplan(&plan_args(bad.to_str().unwrap(), a, out, "0.33"));
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not positive"));

    let mut args = plan_args(p, a, out, "0.33");
    args.extend(["--energy", "100"]);
    assert_eq!(tclplan(&args).status.code(), Some(3));

    let missing = dir.path().join("nope.csv");
    assert_eq!(tclplan(&plan_args(missing.to_str().unwrap(), a, out, "0.33")).status.code(), Some(3));

    let mut args = plan_args(p, a, out, "0.33");
    args.extend(["--tm", "0"]);
    assert_eq!(tclplan(&args).status.code(), Some(3));
}

#[test]
fn unwritable_output_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let (price, ambient) = common::write_inputs(dir.path());
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let o = tclplan(&plan_args(
        price.to_str().unwrap(),
        ambient.to_str().unwrap(),
        blocker.to_str().unwrap(),
        "0.3333",
    ));
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn synth_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for f in [&a, &b] {
        let o = tclplan(&["synth", "-n", "30", "--seed", "4", "--delta", "0.5", "0.5", "--out", f.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let pop = tclplan_cli::config::load_population_json(&a).unwrap();
    assert_eq!(pop.len(), 30);
    assert!(pop.loads().iter().all(|p| p.delta == 0.5));
    let r = SynthRanges {
        delta: (0.5, 0.5),
        ..SynthRanges::default()
    };
    assert_eq!(pop, tclplan_cli::synth_population(30, 4, &r).unwrap());
}

#[test]
fn lower_bound_budget_holds_upper_boundary_like_free_sliding() {
    let dir = tempfile::tempdir().unwrap();
    let (price, ambient) = common::write_inputs(dir.path());
    let synth = tclplan_cli::synth_population(6, 2, &SynthRanges::default()).unwrap();
    let loads: Vec<TclParams> = synth
        .loads()
        .iter()
        .map(|p| TclParams { theta0: p.upper(), ..*p })
        .collect();
    let pop_path = dir.path().join("pop.json");
    let pop = tclplan_core::Population::new(loads).unwrap();
    tclplan_cli::config::write_population_json(&pop, &pop_path).unwrap();

    let mut config = RunConfig {
        price,
        ambient,
        population: PopulationSource::File(pop_path),
        horizon: None,
        grid_step: 60.0,
        budget: BudgetSpec::TauBar(0.0),
        tm: 90.0,
        out_dir: dir.path().join("out"),
        seed: 0,
    };
    let inputs = load_inputs(&config).unwrap();
    let bounds = tau_bounds(&inputs.population, &inputs.ambient, inputs.price.horizon());
    config.budget = BudgetSpec::TauBar(bounds.tau_bar_lower);
    let outcome = solve(&config, &inputs).unwrap();
    assert_eq!(outcome.solution.base.tau_per_load, 0.0);
    let off = ControlSignal::off(inputs.price.horizon()).unwrap();
    for (p, st) in inputs.population.loads().iter().zip(&outcome.solution.states) {
        let free = simulate_reflected(p, &inputs.ambient, &off, 60.0).unwrap();
        for (&t, &v) in st.times().iter().zip(st.values()) {
            assert!((free.trajectory.value_at(t) - v).abs() < 1e-9);
            assert!((v - p.upper()).abs() < 1e-9);
        }
    }
    let run = run_plan(&config).unwrap();
    assert_eq!(run.files.len(), 5);
}
