//! Command-line harness: fixture generation, experiment orchestration,
//! deterministic seeding and JSON/CSV reporting.

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use gausstest::bounds::{general_pair_bounds, BoundReport, MomentData};
use gausstest::estimators::{pure_testing_pipeline, Hypothesis, MomentSource};
use gausstest::fock::{total_energy_operator, trace_distance_exact};
use gausstest::hardness::hardness_experiment;
use gausstest::rotations::{acceptance_probability, generator_moments, TestId, Which};
use gausstest::sampling::{test_round_sample, RngStream};
use gausstest::symplectic::{
    gaussian_state_to_fock, moments_of_state, nongaussianity_relative_entropy,
    symplectic_eigenvalues,
};
use gausstest::{Error, GaussianState, MixedFockState, PureFockState};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::io::Write;
use std::process::ExitCode;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "gausstest", version, about = "Gaussianity testing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", deny_unknown_fields)]
enum Command {
    /// Describe a state fixture: moments, spectrum, entropy.
    State(StateArgs),
    /// First/second moments and copy-rotation generator moments.
    Moments(MomentsArgs),
    /// Monte-Carlo rounds of a symmetry test against the exact probability.
    RotationTest(RotationTestArgs),
    /// Heterodyne covariance tester (A_close vs B_far).
    CovarianceTest(CovarianceTestArgs),
    /// Trace-distance bounds for a pair of fixtures.
    Bounds(BoundsArgs),
    /// Mixed-state hardness laboratory over an energy grid.
    Hardness(HardnessArgs),
    /// Run any subcommand from a JSON config file (same schema as flags).
    #[serde(skip)]
    Run(RunArgs),
}

#[derive(Args, Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct StateArgs {
    /// vacuum | fock:m | thermal:nbar | squeezed:r | coherent:re[,im] |
    /// inline JSON | path to a JSON file
    #[arg(long)]
    state: String,
    /// Fock cutoff per mode (0 = per-fixture default)
    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    cutoff: usize,
    #[arg(long)]
    #[serde(default)]
    output: Option<String>,
}

#[derive(Args, Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct MomentsArgs {
    #[arg(long)]
    state: String,
    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    cutoff: usize,
    /// g | gtilde | both
    #[arg(long, default_value = "both")]
    #[serde(default = "default_which")]
    which: String,
    #[arg(long)]
    #[serde(default)]
    output: Option<String>,
}

fn default_which() -> String {
    "both".into()
}

#[derive(Args, Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct RotationTestArgs {
    /// 1 | 2 | 2' | 3 | 4 | 5
    #[arg(long)]
    test: String,
    #[arg(long)]
    state: String,
    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    cutoff: usize,
    #[arg(long, default_value_t = 1000)]
    #[serde(default = "default_rounds")]
    rounds: usize,
    #[arg(long)]
    #[serde(default)]
    seed: Option<u64>,
    #[arg(long)]
    #[serde(default)]
    output: Option<String>,
}

#[derive(Args, Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct CovarianceTestArgs {
    #[arg(long)]
    state: String,
    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    cutoff: usize,
    #[arg(long = "epsA", default_value_t = 0.0)]
    #[serde(default)]
    eps_a: f64,
    #[arg(long = "epsB")]
    eps_b: f64,
    #[arg(long = "E")]
    e: f64,
    #[arg(long, default_value_t = 0.1)]
    #[serde(default = "default_delta")]
    delta: f64,
    /// heterodyne shots; 0 = the analytic (astronomically large) count
    #[arg(long, default_value_t = 20000)]
    #[serde(default = "default_shots")]
    shots: usize,
    #[arg(long)]
    #[serde(default)]
    seed: Option<u64>,
    #[arg(long)]
    #[serde(default)]
    output: Option<String>,
}

fn default_shots() -> usize {
    20000
}

#[derive(Args, Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct BoundsArgs {
    /// two fixture specs
    #[arg(long, num_args = 2)]
    pair: Vec<String>,
    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    cutoff: usize,
    #[arg(long)]
    #[serde(default)]
    output: Option<String>,
}

#[derive(Args, Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct HardnessArgs {
    #[arg(long, default_value_t = 2)]
    #[serde(default = "default_n")]
    n: usize,
    /// comma-separated energy grid
    #[arg(long = "grid", default_value = "2,3,4")]
    #[serde(default = "default_grid")]
    grid: String,
    #[arg(long = "epsB", default_value_t = 1e-6)]
    #[serde(default = "default_eps_b")]
    eps_b: f64,
    /// fixed perturbation strength overriding eps = 8 c_nE^2 epsB
    #[arg(long)]
    #[serde(default)]
    eps: Option<f64>,
    #[arg(long, default_value_t = 20)]
    #[serde(default = "default_trials")]
    trials: usize,
    #[arg(long)]
    #[serde(default)]
    seed: Option<u64>,
    /// json | csv
    #[arg(long, default_value = "json")]
    #[serde(default = "default_format")]
    format: String,
    #[arg(long)]
    #[serde(default)]
    output: Option<String>,
}

fn default_grid() -> String {
    "2,3,4".into()
}

fn default_rounds() -> usize {
    1000
}

fn default_delta() -> f64 {
    0.1
}

fn default_n() -> usize {
    2
}

fn default_eps_b() -> f64 {
    1e-6
}

fn default_trials() -> usize {
    20
}

fn default_format() -> String {
    "json".into()
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file with a "command" tag and the flag fields
    #[arg(long)]
    config: String,
}

/// A fixture resolved into whichever representations apply.
struct ResolvedState {
    spec: String,
    cutoff: usize,
    gaussian: Option<GaussianState>,
    pure_gaussian: bool,
    pure_state: Option<PureFockState>,
    mixed: MixedFockState,
}

fn parse_state_spec(spec: &str, cutoff: usize) -> anyhow::Result<ResolvedState> {
    let text = if std::path::Path::new(spec).is_file() {
        std::fs::read_to_string(spec).with_context(|| format!("reading state file {spec}"))?
    } else {
        spec.to_string()
    };
    if text.trim_start().starts_with('{') {
        return parse_state_json(spec, &text, cutoff);
    }
    let (kind, arg) = match text.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (text.as_str(), None),
    };
    let num = |field: &str| -> anyhow::Result<f64> {
        arg.ok_or_else(|| config_err(format!("state '{kind}' needs a parameter, e.g. {kind}:{field}")))?
            .parse::<f64>()
            .with_context(|| format!("state parameter of '{kind}'"))
    };
    let d_or = |default: usize| if cutoff == 0 { default } else { cutoff };
    match kind {
        "vacuum" => {
            let d = d_or(8);
            let p = PureFockState::vacuum(1, d);
            Ok(ResolvedState {
                spec: spec.into(),
                cutoff: d,
                gaussian: Some(GaussianState::vacuum(1)),
                pure_gaussian: true,
                mixed: p.to_mixed(),
                pure_state: Some(p),
            })
        }
        "fock" => {
            let m = num("m")? as usize;
            let d = d_or(m + 6);
            let p = PureFockState::fock(m, d)?;
            Ok(ResolvedState {
                spec: spec.into(),
                cutoff: d,
                gaussian: None,
                pure_gaussian: false,
                mixed: p.to_mixed(),
                pure_state: Some(p),
            })
        }
        "thermal" => {
            let nbar = num("nbar")?;
            let d = d_or(40);
            Ok(ResolvedState {
                spec: spec.into(),
                cutoff: d,
                gaussian: Some(GaussianState::thermal(&[nbar])?),
                pure_gaussian: false,
                pure_state: None,
                mixed: MixedFockState::thermal(nbar, d)?,
            })
        }
        "squeezed" => {
            let r = num("r")?;
            let d = d_or(16);
            let p = PureFockState::squeezed_vacuum(r, d);
            Ok(ResolvedState {
                spec: spec.into(),
                cutoff: d,
                gaussian: Some(GaussianState::squeezed(r)),
                pure_gaussian: true,
                mixed: p.to_mixed(),
                pure_state: Some(p),
            })
        }
        "coherent" => {
            let raw = arg.ok_or_else(|| config_err("state 'coherent' needs coherent:re[,im]".into()))?;
            let (re, im) = match raw.split_once(',') {
                Some((a, b)) => (a.parse::<f64>()?, b.parse::<f64>()?),
                None => (raw.parse::<f64>()?, 0.0),
            };
            let d = d_or(24);
            let p = PureFockState::coherent(num_complex::Complex::new(re, im), d);
            Ok(ResolvedState {
                spec: spec.into(),
                cutoff: d,
                gaussian: Some(GaussianState::coherent(re, im)),
                pure_gaussian: true,
                mixed: p.to_mixed(),
                pure_state: Some(p),
            })
        }
        other => return Err(config_err(format!("unknown state fixture '{other}'"))),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonState {
    #[serde(default)]
    fock: Option<JsonFock>,
    #[serde(default)]
    gaussian: Option<GaussianState>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonFock {
    n: usize,
    cutoff: usize,
    /// amplitudes as [re, im] pairs, flat row-major
    amplitudes: Vec<[f64; 2]>,
}

fn parse_state_json(spec: &str, text: &str, cutoff: usize) -> anyhow::Result<ResolvedState> {
    let parsed: JsonState = serde_json::from_str(text).context("parsing state JSON")?;
    match (parsed.fock, parsed.gaussian) {
        (Some(f), None) => {
            let amps = gausstest::linalg::CVec::from_iterator(
                f.amplitudes.len(),
                f.amplitudes.iter().map(|a| num_complex::Complex::new(a[0], a[1])),
            );
            let p = PureFockState::from_amplitudes(f.n, f.cutoff, amps, 0.0)?;
            Ok(ResolvedState {
                spec: spec.into(),
                cutoff: f.cutoff,
                gaussian: None,
                pure_gaussian: false,
                mixed: p.to_mixed(),
                pure_state: Some(p),
            })
        }
        (None, Some(g)) => {
            let d = if cutoff == 0 { 24 } else { cutoff };
            let nus = symplectic_eigenvalues(&g.cov_mat())?;
            let pure = nus.iter().all(|&nu| (nu - 1.0).abs() < 1e-9);
            let fock = gaussian_state_to_fock(&g, d, pure)?;
            let (pure_state, mixed) = match fock {
                gausstest::symplectic::GaussianFockResult::Pure(p) => {
                    let m = p.to_mixed();
                    (Some(p), m)
                }
                gausstest::symplectic::GaussianFockResult::Mixed(m) => (None, m),
            };
            Ok(ResolvedState {
                spec: spec.into(),
                cutoff: d,
                gaussian: Some(g),
                pure_gaussian: pure,
                pure_state,
                mixed,
            })
        }
        _ => Err(config_err("state JSON must contain exactly one of 'fock' or 'gaussian'".into())),
    }
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.or_else(|| {
        std::env::var("GAUSSTEST_SEED")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(0)
}

fn envelope(command: &str, config: Value, warnings: Vec<String>, results: Value) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "tool_version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
        "warnings": warnings,
        "results": results,
    })
}

fn emit(output: &Option<String>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {path}"))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

fn vec_json(v: &gausstest::linalg::RVec) -> Value {
    json!(v.iter().cloned().collect::<Vec<f64>>())
}

fn mat_json(m: &gausstest::linalg::RMat) -> Value {
    let rows: Vec<Vec<f64>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect();
    json!(rows)
}

fn bound_report_json(r: &BoundReport) -> Value {
    json!({
        "lemma": r.lemma,
        "lower": r.lower,
        "upper_raw": r.upper_raw,
        "upper_clamped": r.upper_clamped,
        "exact": r.exact,
        "parameters": r.parameters.iter().cloned().collect::<std::collections::BTreeMap<String, f64>>(),
        "sandwich_ok": r.sandwich_ok(),
    })
}

fn moment_data(state: &ResolvedState) -> anyhow::Result<MomentData> {
    let (mean, cov) = moments_of_state(&state.mixed)?;
    let e_op = total_energy_operator(state.mixed.n, state.mixed.d)?;
    let energy = state.mixed.expectation(&e_op)?.re;
    let e2 = state.mixed.expectation(&(&e_op * &e_op))?.re;
    Ok(MomentData {
        mean,
        cov,
        energy,
        energy_sq: Some(e2),
        pure_gaussian: state.pure_gaussian,
    })
}

fn cmd_state(args: &StateArgs) -> anyhow::Result<(Value, Vec<String>, Value)> {
    let st = parse_state_spec(&args.state, args.cutoff)?;
    let mut warnings = Vec::new();
    if st.mixed.leakage > 0.0 {
        warnings.push(format!("truncation leakage {:.3e}", st.mixed.leakage));
    }
    let (mean, cov) = moments_of_state(&st.mixed)?;
    let nus = symplectic_eigenvalues(&cov)?;
    let spectral = gausstest::fock::spectral_functionals(&st.mixed, None)?;
    let e_op = total_energy_operator(st.mixed.n, st.mixed.d)?;
    let energy = st.mixed.expectation(&e_op)?.re;
    let nongauss = nongaussianity_relative_entropy(&st.mixed)?;
    let results = json!({
        "n": st.mixed.n,
        "cutoff": st.cutoff,
        "leakage": st.mixed.leakage,
        "mean": vec_json(&mean),
        "cov": mat_json(&cov),
        "symplectic_eigenvalues": nus,
        "energy": energy,
        "purity": spectral.purity,
        "von_neumann_entropy": spectral.von_neumann_entropy,
        "nongaussianity_relative_entropy": nongauss,
    });
    Ok((serde_json::to_value(args)?, warnings, results))
}

fn cmd_moments(args: &MomentsArgs) -> anyhow::Result<(Value, Vec<String>, Value)> {
    let st = parse_state_spec(&args.state, args.cutoff)?;
    let mut warnings = Vec::new();
    let (mean, cov) = moments_of_state(&st.mixed)?;
    let which: Vec<Which> = match args.which.as_str() {
        "g" => vec![Which::G],
        "gtilde" => vec![Which::Gtilde],
        "both" => vec![Which::G, Which::Gtilde],
        other => return Err(config_err(format!("unknown generator '{other}' (expected g, gtilde or both)"))),
    };
    let mut gens = serde_json::Map::new();
    for w in which {
        let name = match w {
            Which::G => "g",
            Which::Gtilde => "gtilde",
        };
        match generator_moments(&st.mixed, w) {
            Ok(m) => {
                gens.insert(
                    name.into(),
                    json!({
                        "g2": m.g2,
                        "g4": m.g4,
                        "g4_rotation_normalized": m.g4_rotation_normalized,
                        "bound_ok": m.bound_ok,
                        "e2": m.e2,
                    }),
                );
            }
            Err(e) => {
                warnings.push(format!("{name}: {e}"));
                gens.insert(name.into(), Value::Null);
            }
        }
    }
    let results = json!({
        "mean": vec_json(&mean),
        "cov": mat_json(&cov),
        "generators": gens,
    });
    Ok((serde_json::to_value(args)?, warnings, results))
}

fn cmd_rotation_test(args: &RotationTestArgs) -> anyhow::Result<(Value, Vec<String>, Value)> {
    let st = parse_state_spec(&args.state, args.cutoff)?;
    let psi = st
        .pure_state
        .as_ref()
        .ok_or(Error::InvalidParameter("rotation tests need a pure state".into()))?;
    let test = TestId::parse(&args.test)
        .ok_or_else(|| config_err(format!("unknown test '{}' (expected 1, 2, 2', 3, 4 or 5)", args.test)))?;
    let exact = acceptance_probability(test, psi)?;
    let seed = resolve_seed(args.seed);
    let mut rng = RngStream::new(seed, 0).rng();
    let mut accepted = 0usize;
    for _ in 0..args.rounds {
        if test_round_sample(test, psi, &mut rng)? {
            accepted += 1;
        }
    }
    let mut config = serde_json::to_value(args)?;
    config["seed"] = json!(seed);
    let results = json!({
        "test": args.test,
        "copies": test.copies(),
        "exact_probability": exact,
        "rounds": args.rounds,
        "accepted": accepted,
        "accept_fraction": accepted as f64 / args.rounds.max(1) as f64,
    });
    Ok((config, Vec::new(), results))
}

fn cmd_covariance_test(args: &CovarianceTestArgs) -> anyhow::Result<(Value, Vec<String>, Value)> {
    let st = parse_state_spec(&args.state, args.cutoff)?;
    let mut warnings = Vec::new();
    let source = match &st.gaussian {
        Some(g) => MomentSource::from_gaussian(g)?,
        None => {
            warnings.push("non-Gaussian source: Husimi rejection sampling".into());
            MomentSource::from_fock(&st.mixed)?
        }
    };
    let n = st.mixed.n;
    let seed = resolve_seed(args.seed);
    let mut rng = RngStream::new(seed, 0).rng();
    let shots = if args.shots == 0 { None } else { Some(args.shots) };
    let decision = pure_testing_pipeline(
        &source,
        args.eps_a,
        args.eps_b,
        args.e,
        n,
        args.delta,
        shots,
        &mut rng,
    )?;
    let mut config = serde_json::to_value(args)?;
    config["seed"] = json!(seed);
    let results = json!({
        "decision": match decision.hypothesis {
            Hypothesis::AClose => "A_close",
            Hypothesis::BFar => "B_far",
        },
        "nu_max": decision.statistic,
        "nu_threshold": decision.threshold,
        "shots": decision.rounds,
    });
    Ok((config, warnings, results))
}

fn cmd_bounds(args: &BoundsArgs) -> anyhow::Result<(Value, Vec<String>, Value)> {
    if args.pair.len() != 2 {
        return Err(config_err("--pair needs exactly two fixtures".into()));
    }
    // a shared cutoff so the exact Fock-space distance is well defined
    let probe_a = parse_state_spec(&args.pair[0], args.cutoff)?;
    let probe_b = parse_state_spec(&args.pair[1], args.cutoff)?;
    let d = probe_a.cutoff.max(probe_b.cutoff);
    let a = parse_state_spec(&args.pair[0], d)?;
    let b = parse_state_spec(&args.pair[1], d)?;
    if a.mixed.n != b.mixed.n {
        return Err(config_err("fixtures have different mode counts".into()));
    }
    let mut warnings = Vec::new();
    for st in [&a, &b] {
        if st.mixed.leakage > 0.0 {
            warnings.push(format!("{}: leakage {:.3e}", st.spec, st.mixed.leakage));
        }
    }
    let exact = trace_distance_exact(&a.mixed, &b.mixed)?;
    let general = general_pair_bounds(&moment_data(&a)?, &moment_data(&b)?)?.with_exact(exact);
    let gaussian = match (&a.gaussian, &b.gaussian) {
        (Some(ga), Some(gb)) => Some(
            gausstest::bounds::gaussian_pair_bounds(ga, gb)?.with_exact(exact),
        ),
        _ => None,
    };
    let results = json!({
        "pair": [a.spec, b.spec],
        "cutoff": d,
        "exact_trace_distance": exact,
        "general_pair": bound_report_json(&general),
        "gaussian_pair": gaussian.as_ref().map(bound_report_json),
    });
    Ok((serde_json::to_value(args)?, warnings, results))
}

fn cmd_hardness(args: &HardnessArgs) -> anyhow::Result<(Value, Vec<String>, Value, Option<String>)> {
    let grid: Vec<f64> = args
        .grid
        .split(',')
        .map(|s| s.trim().parse::<f64>().context("parsing --grid"))
        .collect::<anyhow::Result<_>>()?;
    let seed = resolve_seed(args.seed);
    let mut rng = RngStream::new(seed, 0).rng();
    let report = hardness_experiment(args.n, &grid, args.eps_b, args.eps, args.trials, seed, &mut rng)?;
    let mut config = serde_json::to_value(args)?;
    config["seed"] = json!(seed);
    let rows: Vec<Value> = report
        .grid
        .iter()
        .map(|p| {
            json!({
                "E": p.e,
                "nu": p.nu,
                "cutoff": p.cutoff,
                "tv_from_base": p.tv_from_base,
                "second_moment": p.second_moment,
                "member_second_moment": p.member_second_moment,
                "energy_budget": p.energy_budget,
                "samples_to_distinguish": p.samples_to_distinguish,
            })
        })
        .collect();
    let results = json!({
        "n": report.n,
        "eps": report.eps,
        "eps_b": report.eps_b,
        "grid": rows,
    });
    let csv = if args.format == "csv" {
        let mut s = String::from(
            "E,nu,cutoff,tv_from_base,second_moment,member_second_moment,energy_budget,samples_to_distinguish\n",
        );
        for p in &report.grid {
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                p.e,
                p.nu,
                p.cutoff,
                p.tv_from_base,
                p.second_moment,
                p.member_second_moment,
                p.energy_budget,
                p.samples_to_distinguish
            ));
        }
        Some(s)
    } else {
        None
    };
    Ok((config, Vec::new(), results, csv))
}

fn dispatch(command: &Command) -> anyhow::Result<()> {
    match command {
        Command::State(a) => {
            let (cfg, warn, res) = cmd_state(a)?;
            emit(&a.output, &serde_json::to_string_pretty(&envelope("state", cfg, warn, res))?)
        }
        Command::Moments(a) => {
            let (cfg, warn, res) = cmd_moments(a)?;
            emit(&a.output, &serde_json::to_string_pretty(&envelope("moments", cfg, warn, res))?)
        }
        Command::RotationTest(a) => {
            let (cfg, warn, res) = cmd_rotation_test(a)?;
            emit(
                &a.output,
                &serde_json::to_string_pretty(&envelope("rotation-test", cfg, warn, res))?,
            )
        }
        Command::CovarianceTest(a) => {
            let (cfg, warn, res) = cmd_covariance_test(a)?;
            emit(
                &a.output,
                &serde_json::to_string_pretty(&envelope("covariance-test", cfg, warn, res))?,
            )
        }
        Command::Bounds(a) => {
            let (cfg, warn, res) = cmd_bounds(a)?;
            emit(&a.output, &serde_json::to_string_pretty(&envelope("bounds", cfg, warn, res))?)
        }
        Command::Hardness(a) => {
            let (cfg, warn, res, csv) = cmd_hardness(a)?;
            match csv {
                Some(text) => emit(&a.output, text.trim_end()),
                None => emit(
                    &a.output,
                    &serde_json::to_string_pretty(&envelope("hardness", cfg, warn, res))?,
                ),
            }
        }
        Command::Run(a) => {
            let text = std::fs::read_to_string(&a.config)
                .with_context(|| format!("reading config {}", a.config))?;
            let inner: Command = serde_json::from_str(&text).context("parsing config file")?;
            dispatch(&inner)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let infeasible = err.downcast_ref::<Error>().is_some_and(|e| {
                matches!(e, Error::Infeasible(_) | Error::InvalidParameter(_))
            });
            if infeasible {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

/// User/config errors exit with code 2, like infeasible parameters.
fn config_err(msg: String) -> anyhow::Error {
    Error::InvalidParameter(msg).into()
}
