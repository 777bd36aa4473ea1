//! The `comblab` command line.
//!
//! Exit codes: 0 pass or verdict reached, 2 fail or inconclusive, 3
//! numerical failure, 4 malformed input or usage error. `--json <path>`
//! writes a [`Report`](crate::report::Report) next to the human summary on
//! stdout.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::comb::{compile, verify_causality_with, Circuit, Comb, Dir};
use crate::constructions::{
    audit, circuit_alice_cz, circuit_bell_teleport, circuit_bob_controls, conditional_scan, dilate, example_bisep_conditional,
    example_bisep_k, example_ghz_comb, example_ppt_conditionals_comb, example_sqrt_swap_comb, example_w_comb,
    round_trip_residual, seesaw, sqrt_swap_circuit, Sampling, ScanOptions, SeesawOptions,
};
use crate::entanglement::{gme_witness, ppt_min_eig, CutSpec, GmeVerdict};
use crate::error::{Error, Result};
use crate::report::{InputDigest, Report, Verdict};
use crate::tensor::Operator;

#[derive(Debug, Parser)]
#[command(name = "comblab", version, about = "Causality checks and entanglement tests for quantum combs")]
pub struct Cli {
    /// Write a machine-readable report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the causality hierarchy of a comb and print per-level residuals.
    Verify {
        file: PathBuf,
        /// Residual tolerance for each level and for positivity.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Leg directions for a file without a "legs" array, e.g. out,in,out.
        #[arg(long, value_delimiter = ',')]
        legs: Option<Vec<DirArg>>,
    },
    /// PPT-mixture witness: a negative value certifies genuine multipartite
    /// entanglement. Accepts any positive operator.
    Gme {
        file: PathBuf,
        /// Report tr(W rho) at unit trace only (otherwise also for rho as given).
        #[arg(long)]
        normalize: bool,
        /// Reference value file: {"value": v, "tolerance": t}, or a file with a
        /// "values" map plus --key.
        #[arg(long, value_name = "REF")]
        fixture: Option<PathBuf>,
        /// Entry of a multi-value fixture.
        #[arg(long)]
        key: Option<String>,
        /// Write the optimal witness as Operator JSON.
        #[arg(short = 'o', long, value_name = "PATH")]
        witness: Option<PathBuf>,
    },
    /// Smallest eigenvalue of the partial transpose across a cut.
    Ppt {
        file: PathBuf,
        /// Cut such as A:BC; the first side is transposed.
        #[arg(long)]
        cut: String,
    },
    /// Write one of the built-in combs as Comb JSON.
    Example {
        #[arg(value_enum)]
        name: ExampleName,
        /// Number of parties for ghz-comb.
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Mixing parameter: default 0.6 for bisep, 0.45 for bisep-cond.
        #[arg(long)]
        p: Option<f64>,
        /// Write the circuit instead of the comb (bob-controls, alice-cz, teleport, sqrt-swap).
        #[arg(long)]
        circuit: bool,
        #[arg(short = 'o', long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Condition each party of a three-qubit comb on sampled pure effects and
    /// report the smallest partial-transpose eigenvalue of the rest.
    Scan {
        file: PathBuf,
        #[arg(long, default_value_t = 500_000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// all, or a single leg label.
        #[arg(long, default_value = "all")]
        party: String,
        #[arg(long, value_enum, default_value_t = SamplingArg::Rectangle)]
        sampling: SamplingArg,
    },
    /// See-saw search for a GME comb with strictly PPT conditionals.
    Seesaw {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 12)]
        iters: usize,
        /// Normalised partial-transpose margin demanded on the effect set.
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        /// Effects per party in the initial constraint set.
        #[arg(long, default_value_t = 150)]
        effects: usize,
        /// Samples of the fresh scan that accepts a candidate.
        #[arg(long, default_value_t = 500_000)]
        scan_samples: usize,
        /// Witness value below which a candidate is checked.
        #[arg(long, default_value_t = -1e-4, allow_negative_numbers = true)]
        target: f64,
        #[arg(short = 'o', long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Write the search state (constraints, per-iteration record).
        #[arg(long, value_name = "PATH")]
        audit: Option<PathBuf>,
    },
    /// Realise a two-step comb as an initial state and one isometry.
    Dilate {
        file: PathBuf,
        #[arg(short = 'o', long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DirArg {
    Out,
    In,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SamplingArg {
    Rectangle,
    Haar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExampleName {
    WComb,
    GhzComb,
    Bisep,
    BisepCond,
    SqrtSwap,
    #[value(alias = "app-g")]
    PptConditionals,
    #[value(alias = "fig4")]
    BobControls,
    #[value(alias = "fig5")]
    AliceCz,
    #[value(alias = "fig6")]
    Teleport,
}

/// Outcome of one subcommand before it is written out.
struct Outcome {
    verdict: Verdict,
    results: Value,
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    report: Report,
}

impl Ctx<'_> {
    fn say(&mut self, line: impl AsRef<str>) {
        let _ = writeln!(self.out, "{}", line.as_ref());
    }

    fn read(&mut self, path: &Path) -> Result<Vec<u8>> {
        let bytes = std::fs::read(path)
            .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
        self.report.inputs.push(InputDigest::new(path, &bytes));
        Ok(bytes)
    }

    fn read_value(&mut self, path: &Path) -> Result<Value> {
        let bytes = self.read(path)?;
        Ok(serde_json::from_slice(&bytes)?)
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))
}

fn classify(e: &Error) -> Verdict {
    match e {
        Error::Numerical(_) | Error::Solver(_) => Verdict::Numerical,
        Error::Hypothesis(_) => Verdict::Fail,
        _ => Verdict::Malformed,
    }
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let shown = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = if shown { write!(out, "{}", e.render()) } else { write!(err, "{}", e.render()) };
            return if shown { 0 } else { Verdict::Malformed.exit_code() };
        }
    };
    let start = Instant::now();
    let mut ctx = Ctx { out, report: Report::new(args) };
    let outcome = match dispatch(&cli.command, &mut ctx) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            Outcome { verdict: classify(&e), results: json!({ "error": e.to_string() }) }
        }
    };
    let mut report = ctx.report;
    report.set_verdict(outcome.verdict);
    report.results = outcome.results;
    report.timing.elapsed_s = start.elapsed().as_secs_f64();
    if let Some(path) = &cli.json {
        if let Err(e) = write_file(path, &report.to_json()) {
            let _ = writeln!(err, "error: {e}");
            return Verdict::Malformed.exit_code();
        }
    }
    report.exit_code
}

fn dispatch(cmd: &Command, ctx: &mut Ctx) -> Result<Outcome> {
    match cmd {
        Command::Verify { file, tol, legs } => verify(ctx, file, *tol, legs.as_deref()),
        Command::Gme { file, normalize, fixture, key, witness } => {
            gme(ctx, file, *normalize, fixture.as_deref(), key.as_deref(), witness.as_deref())
        }
        Command::Ppt { file, cut } => ppt(ctx, file, cut),
        Command::Example { name, n, p, circuit, out } => example(ctx, *name, *n, *p, *circuit, out.as_deref()),
        Command::Scan { file, samples, seed, party, sampling } => scan(ctx, file, *samples, *seed, party, *sampling),
        Command::Seesaw { seed, iters, eps, effects, scan_samples, target, out, audit } => {
            let opts = SeesawOptions {
                iterations: *iters,
                eps_margin: *eps,
                effects_per_party: *effects,
                scan_samples: *scan_samples,
                target: *target,
                ..SeesawOptions::default()
            };
            run_seesaw(ctx, *seed, &opts, out.as_deref(), audit.as_deref())
        }
        Command::Dilate { file, out } => run_dilate(ctx, file, out.as_deref()),
    }
}

fn load_comb(ctx: &mut Ctx, file: &Path, legs: Option<&[DirArg]>) -> Result<Comb> {
    let v = ctx.read_value(file)?;
    if v.get("legs").is_some() {
        return Comb::from_value(&v);
    }
    let dirs = legs.ok_or_else(|| Error::invalid("input has no \"legs\" array; pass --legs"))?;
    let op: Operator = serde_json::from_value(v)?;
    if dirs.len() != op.labels().len() {
        return Err(Error::invalid(format!("--legs lists {} directions for {} subsystems", dirs.len(), op.labels().len())));
    }
    let labels: Vec<&str> = op.labels().iter().map(String::as_str).collect();
    let dirs: Vec<Dir> = dirs.iter().map(|d| if matches!(d, DirArg::Out) { Dir::Out } else { Dir::In }).collect();
    let legs = crate::comb::alternating_legs(&labels, &dirs);
    Comb::new(op, legs)
}

fn verify(ctx: &mut Ctx, file: &Path, tol: f64, legs: Option<&[DirArg]>) -> Result<Outcome> {
    if !(tol > 0.0) {
        return Err(Error::invalid("--tol must be positive"));
    }
    let comb = load_comb(ctx, file, legs)?;
    ctx.report.tolerances.causality = tol;
    let rep = verify_causality_with(&comb, tol)?;
    for (k, level) in rep.levels.iter().enumerate() {
        ctx.say(format!(
            "level {}: trace out [{}], identity on [{}], residual {:.3e}",
            k + 1,
            level.traced.join(","),
            level.inputs.join(","),
            level.residual
        ));
    }
    ctx.say(format!("min eigenvalue {:+.3e}", rep.min_eigenvalue));
    ctx.say(format!(
        "trace {:.12} (proper comb: {}){}",
        rep.trace,
        rep.expected_trace,
        if rep.is_normalized() { "" } else { ", not normalised" }
    ));
    ctx.say(if rep.passed { "PASS" } else { "FAIL" });
    Ok(Outcome {
        verdict: if rep.passed { Verdict::Pass } else { Verdict::Fail },
        results: json!({ "causality": rep, "max_residual": rep.max_residual(), "normalized": rep.is_normalized() }),
    })
}

fn fixture_value(ctx: &mut Ctx, path: &Path, key: Option<&str>) -> Result<(f64, f64)> {
    let v = ctx.read_value(path)?;
    let tol = v.get("tolerance").and_then(Value::as_f64).unwrap_or(1e-5);
    let entry = match (v.get("values"), key) {
        (Some(map), Some(k)) => map.get(k).ok_or_else(|| Error::invalid(format!("fixture has no entry {k}")))?,
        (Some(_), None) => return Err(Error::invalid("fixture holds several values; pass --key")),
        (None, _) => &v,
    };
    let value = entry.get("value").and_then(Value::as_f64).ok_or_else(|| Error::invalid("fixture entry has no numeric \"value\""))?;
    Ok((value, tol))
}

fn gme(
    ctx: &mut Ctx,
    file: &Path,
    normalize: bool,
    fixture: Option<&Path>,
    key: Option<&str>,
    witness_out: Option<&Path>,
) -> Result<Outcome> {
    let bytes = ctx.read(file)?;
    let rho: Operator = serde_json::from_slice(&bytes)?;
    let rep = gme_witness(&rho)?;
    ctx.say(format!("parties {}, trace {:.12}", rho.labels().join(""), rep.scale));
    ctx.say(format!("witness value (unit trace) {:+.9}", rep.value));
    let raw = if normalize { None } else { Some(rep.witness.inner(&rho)?.re) };
    if let Some(r) = raw {
        ctx.say(format!("tr(W rho) as given {:+.9}", r));
    }
    ctx.say(format!("solver {:?} after {} iterations, gap {:.2e}", rep.status, rep.iterations, rep.gap));
    let worst = rep.decompositions.iter().map(|d| d.residual).fold(0.0, f64::max);
    let mut verdict = match rep.verdict {
        GmeVerdict::Gme => {
            ctx.say("verdict: genuinely multipartite entangled");
            Verdict::Pass
        }
        GmeVerdict::PptMixture => {
            ctx.say("verdict: PPT mixture (no GME detected)");
            Verdict::Pass
        }
        GmeVerdict::SolverFailure => {
            ctx.say("verdict: none, the solver did not converge");
            Verdict::Numerical
        }
    };
    let mut fixture_check = Value::Null;
    if let Some(path) = fixture {
        let (want, tol) = fixture_value(ctx, path, key)?;
        let diff = (rep.value - want).abs();
        let ok = diff <= tol;
        ctx.say(format!("fixture {want:+.9}, difference {diff:.2e} (tolerance {tol:.0e}): {}", if ok { "match" } else { "MISMATCH" }));
        if !ok && verdict == Verdict::Pass {
            verdict = Verdict::Fail;
        }
        fixture_check = json!({ "value": want, "tolerance": tol, "difference": diff, "match": ok });
    }
    if let Some(path) = witness_out {
        write_file(path, &rep.witness.to_json())?;
    }
    let decompositions: Vec<Value> = rep
        .decompositions
        .iter()
        .map(|d| json!({ "side": d.side, "residual": d.residual, "min_eig_p": d.min_eig_p, "min_eig_q": d.min_eig_q }))
        .collect();
    Ok(Outcome {
        verdict,
        results: json!({
            "value": rep.value,
            "value_as_given": raw,
            "scale": rep.scale,
            "verdict": rep.verdict,
            "status": rep.status,
            "iterations": rep.iterations,
            "gap": rep.gap,
            "primal_residual": rep.primal_residual,
            "dual_residual": rep.dual_residual,
            "max_decomposition_residual": worst,
            "decompositions": decompositions,
            "fixture": fixture_check,
        }),
    })
}

fn ppt(ctx: &mut Ctx, file: &Path, cut: &str) -> Result<Outcome> {
    let bytes = ctx.read(file)?;
    let rho: Operator = serde_json::from_slice(&bytes)?;
    let spec: CutSpec = cut.parse()?;
    let m = ppt_min_eig(&rho, &spec)?;
    let entangled = m < -ctx.report.tolerances.psd;
    ctx.say(format!("cut {spec}: min eigenvalue of the partial transpose {m:+.12}"));
    ctx.say(if entangled { "NPT: entangled across the cut" } else { "PPT across the cut" });
    Ok(Outcome { verdict: Verdict::Pass, results: json!({ "cut": spec.to_string(), "min_eigenvalue": m, "npt": entangled }) })
}

fn example(ctx: &mut Ctx, name: ExampleName, n: usize, p: Option<f64>, as_circuit: bool, out: Option<&Path>) -> Result<Outcome> {
    let p = p.unwrap_or(if name == ExampleName::BisepCond { 0.45 } else { 0.6 });
    let circuit: Option<Circuit> = match name {
        ExampleName::BobControls => Some(circuit_bob_controls()),
        ExampleName::AliceCz => Some(circuit_alice_cz()),
        ExampleName::Teleport => Some(circuit_bell_teleport()),
        ExampleName::SqrtSwap => Some(sqrt_swap_circuit()),
        _ => None,
    };
    let text = if as_circuit {
        circuit.as_ref().ok_or_else(|| Error::invalid("this example has no circuit form"))?.to_json()
    } else {
        let comb = match name {
            ExampleName::WComb => example_w_comb(),
            ExampleName::GhzComb => example_ghz_comb(n)?,
            ExampleName::Bisep => example_bisep_k(p)?,
            ExampleName::BisepCond => example_bisep_conditional(p)?,
            ExampleName::SqrtSwap => example_sqrt_swap_comb(),
            ExampleName::PptConditionals => example_ppt_conditionals_comb()?,
            _ => compile(circuit.as_ref().expect("circuit examples"))?,
        };
        comb.to_json()
    };
    let label = name.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    match out {
        Some(path) => {
            write_file(path, &text)?;
            ctx.say(format!("wrote {} to {}", label, path.display()));
        }
        None => ctx.say(&text),
    }
    Ok(Outcome {
        verdict: Verdict::Pass,
        results: json!({ "example": label, "n": n, "p": p, "circuit": as_circuit, "sha256": crate::constructions::sha256_hex(text.as_bytes()) }),
    })
}

fn scan(ctx: &mut Ctx, file: &Path, samples: usize, seed: u64, party: &str, sampling: SamplingArg) -> Result<Outcome> {
    let comb = load_comb(ctx, file, None)?;
    let parties = if party == "all" { Vec::new() } else { vec![party.to_string()] };
    let opts = ScanOptions {
        samples,
        seed,
        sampling: match sampling {
            SamplingArg::Rectangle => Sampling::Rectangle,
            SamplingArg::Haar => Sampling::Haar,
        },
        parties,
    };
    ctx.report.seeds.push(seed);
    let rep = conditional_scan(&comb, &opts)?;
    for p in &rep.parties {
        ctx.say(format!(
            "condition {} -> {}: min eigenvalue {:+.6} at theta {:.4}, phi {:.4} (sample {}, {} skipped)",
            p.party, p.pair, p.min_eig, p.theta, p.phi, p.index, p.skipped
        ));
    }
    let ok = rep.all_positive();
    ctx.say(if ok { "all conditionals strictly PPT" } else { "some conditional is not strictly PPT" });
    Ok(Outcome { verdict: if ok { Verdict::Pass } else { Verdict::Fail }, results: serde_json::to_value(&rep)? })
}

fn run_seesaw(ctx: &mut Ctx, seed: u64, opts: &SeesawOptions, out: Option<&Path>, audit_out: Option<&Path>) -> Result<Outcome> {
    ctx.report.seeds.push(seed);
    let res = seesaw(&[2, 2, 2], seed, opts)?;
    for rec in &res.audit.trace {
        ctx.say(format!(
            "iteration {}: witness {:+.6}, effect margin {:+.6}{}",
            rec.iteration,
            rec.witness_value,
            rec.effect_min,
            rec.scan.map(|s| format!(", scan [{:+.6}, {:+.6}, {:+.6}]", s[0], s[1], s[2])).unwrap_or_default()
        ));
    }
    ctx.say(format!("stopped: {}", res.audit.stop));
    if let Some(path) = audit_out {
        write_file(path, &serde_json::to_string_pretty(&res.audit)?)?;
    }
    let found = res.candidate.is_some();
    if let (Some(c), Some(path)) = (&res.candidate, out) {
        write_file(path, &c.to_json())?;
        ctx.say(format!("wrote candidate to {}", path.display()));
    }
    let last = res.audit.trace.last();
    Ok(Outcome {
        verdict: if found { Verdict::Pass } else { Verdict::Fail },
        results: json!({
            "options": opts,
            "candidate_found": found,
            "iteration": res.audit.iteration,
            "witness_value": last.map(|r| r.witness_value),
            "final_scan": res.final_scan,
            "stop": res.audit.stop,
        }),
    })
}

fn run_dilate(ctx: &mut Ctx, file: &Path, out: Option<&Path>) -> Result<Outcome> {
    let comb = load_comb(ctx, file, None)?;
    let d = dilate(&comb)?;
    let residual = round_trip_residual(&comb, &d)?;
    let a = audit(&d)?;
    ctx.say(format!(
        "environment dimension {}, discarded dimension {}, round-trip residual {:.3e}",
        d.environment_dim, d.discarded_dim, residual
    ));
    ctx.say(format!(
        "partial-transpose minima: initial {:+.6}, input fixed {:+.6}, environment fixed {:+.6}, output fixed {:+.6}",
        a.initial, a.fixed_input, a.fixed_environment, a.fixed_output
    ));
    let text = d.circuit.to_json();
    match out {
        Some(path) => write_file(path, &text)?,
        None => ctx.say(&text),
    }
    let ok = residual <= 1e-8;
    Ok(Outcome {
        verdict: if ok { Verdict::Pass } else { Verdict::Numerical },
        results: json!({
            "environment_dim": d.environment_dim,
            "discarded_dim": d.discarded_dim,
            "round_trip_residual": residual,
            "audit": a,
            "all_entangled": a.all_entangled(),
        }),
    })
}
