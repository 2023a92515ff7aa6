//! Command-line front end.
//!
//! Subcommands: `sample` draws from the hard average-case distributions,
//! `reduce` applies one reduction step, `solve` counts solutions (or their
//! parity), `verify` stress-tests a step or chain against brute force, and
//! `chain` runs a plan file with full provenance. All randomness derives
//! from `--seed`, so every invocation is bit-for-bit reproducible. The
//! process exits 0 exactly when every requested check passed.

use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use redcount_core::instances::count_cliques;
use redcount_core::pipeline::{
    find_preset, parse_plan, parse_step, presets, run_chain, sample_distribution, solve_count,
    step_names, verify_chain, DistributionName, ReductionStep, SizeBounds, StepParams,
};
use redcount_core::serial::{
    cnf_from_dimacs, graph_from_edge_list, instance_digest, read_instances, to_json_line,
    Instance,
};
use redcount_core::{rng, Error, Result};

#[derive(Parser)]
#[command(
    name = "redcount",
    about = "Exact counting reductions between k-OV, k-XOR, k-SUM, k-clique, and #SAT",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample an instance from a hard average-case distribution.
    Sample(SampleArgs),
    /// Apply one reduction step to every instance in a file.
    Reduce(ReduceArgs),
    /// Count solutions (or their parity) of instances in a file.
    Solve(SolveArgs),
    /// Stress-test a reduction step or plan file against brute force.
    Verify(VerifyArgs),
    /// Run a plan file on an input instance, recording provenance.
    Chain(ChainArgs),
    /// List the built-in parameter presets.
    Presets,
    /// List the available reduction steps.
    Steps,
}

#[derive(Args)]
struct SampleArgs {
    /// Distribution name: d-ov, d-xor, or d-sum (omit with --preset).
    distribution: Option<String>,
    /// Total instance size N = n * 2^b * g * k.
    #[arg(long = "N")]
    size_n: Option<u64>,
    /// Number of output lists K (g must divide K).
    #[arg(long = "K")]
    size_k: Option<usize>,
    /// Bits per factored position.
    #[arg(long)]
    b: Option<usize>,
    /// Sets per factored vector.
    #[arg(long)]
    g: Option<usize>,
    /// Root seed; equal seeds give identical output.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use a named preset instead of explicit parameters.
    #[arg(long)]
    preset: Option<String>,
    /// Also print the factored pre-image as a second JSON line.
    #[arg(long)]
    with_preimage: bool,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct ReduceArgs {
    /// Step name (see `redcount steps`).
    step: String,
    /// Bits per factored position.
    #[arg(long)]
    b: Option<usize>,
    /// Sets per factored vector.
    #[arg(long)]
    g: Option<usize>,
    /// Clique size.
    #[arg(long)]
    k: Option<usize>,
    /// Variable groups for the CNF split.
    #[arg(long)]
    groups: Option<usize>,
    /// Input file (JSON lines, DIMACS, or edge list); - for stdin.
    #[arg(long, default_value = "-")]
    input: String,
    /// Root seed for the step's random stream.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct SolveArgs {
    /// What to report: count or parity.
    mode: String,
    /// Input file (JSON lines, DIMACS, or edge list); - for stdin.
    file: String,
    /// Clique size, required when the input is a graph.
    #[arg(long)]
    clique_k: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Step name, or path to a plan file for a whole chain.
    target: String,
    /// Number of randomized trials.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Cap on list lengths, node counts, and variable counts.
    #[arg(long, default_value_t = 4)]
    max_n: usize,
    /// Cap on the number of lists.
    #[arg(long, default_value_t = 3)]
    max_k: usize,
    /// Root seed; trial i derives its own stream from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bits per factored position (for steps that need it).
    #[arg(long)]
    b: Option<usize>,
    /// Sets per factored vector (for steps that need it).
    #[arg(long)]
    g: Option<usize>,
    /// Clique size (for steps that need it).
    #[arg(long)]
    k: Option<usize>,
    /// Variable groups for the CNF split (for steps that need it).
    #[arg(long)]
    groups: Option<usize>,
}

#[derive(Args)]
struct ChainArgs {
    /// Plan file: one JSON object per line, {"step": name, ...params}.
    plan: String,
    /// Input file (JSON lines, DIMACS, or edge list); - for stdin.
    #[arg(long, default_value = "-")]
    input: String,
    /// Root seed; step i runs on stream i split from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the final instance here instead of stdout.
    #[arg(long)]
    out: Option<String>,
    /// Write the provenance log (JSON) to this file.
    #[arg(long)]
    provenance: Option<String>,
}

/// Print one line to stdout, exiting quietly if the pipe is closed.
fn out_line(line: &str) -> Result<()> {
    let stdout = io::stdout();
    let mut handle = stdout.lock();
    match writeln!(handle, "{line}") {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => std::process::exit(0),
        other => other?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Sample(args) => sample(args),
        Command::Reduce(args) => reduce(args),
        Command::Solve(args) => solve(args),
        Command::Verify(args) => verify(args),
        Command::Chain(args) => chain(args),
        Command::Presets => {
            for preset in presets() {
                out_line(&format!(
                    "{}: {} N={} K={} b={} g={}",
                    preset.name,
                    preset.distribution,
                    preset.size_n,
                    preset.size_k,
                    preset.b,
                    preset.g
                ))?;
                out_line(&format!("    {}", preset.description))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Steps => {
            let params = StepParams {
                b: Some(1),
                g: Some(1),
                k: Some(3),
                groups: Some(2),
            };
            for name in step_names() {
                let step = parse_step(name, &params)?;
                out_line(&format!(
                    "{name}: {} -> {}",
                    step.input_kind(),
                    step.output_kind()
                ))?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn sample(args: SampleArgs) -> Result<ExitCode> {
    let (distribution, size_n, size_k, b, g) = match &args.preset {
        Some(name) => {
            let preset = find_preset(name)?;
            (
                preset.distribution,
                preset.size_n,
                preset.size_k,
                preset.b,
                preset.g,
            )
        }
        None => {
            let name = args.distribution.as_deref().ok_or_else(|| {
                Error::argument("pass a distribution (d-ov, d-xor, d-sum) or --preset")
            })?;
            let missing =
                || Error::argument("explicit sampling needs --N, --K, --b, and --g");
            (
                DistributionName::parse(name)?,
                args.size_n.ok_or_else(missing)?,
                args.size_k.ok_or_else(missing)?,
                args.b.ok_or_else(missing)?,
                args.g.ok_or_else(missing)?,
            )
        }
    };
    let mut rng = rng::from_seed(args.seed);
    let sample = sample_distribution(distribution, size_n, size_k, b, g, &mut rng)?;
    let mut lines = vec![to_json_line(&sample.instance)];
    if args.with_preimage {
        lines.push(to_json_line(&Instance::Factored(sample.preimage)));
    }
    emit(&args.out, &lines.join("\n"))?;
    Ok(ExitCode::SUCCESS)
}

fn reduce(args: ReduceArgs) -> Result<ExitCode> {
    let params = StepParams {
        b: args.b,
        g: args.g,
        k: args.k,
        groups: args.groups,
    };
    let step = parse_step(&args.step, &params)?;
    let instances = load_instances(&args.input)?;
    let mut lines = Vec::with_capacity(instances.len());
    for (index, instance) in instances.iter().enumerate() {
        let mut stream = rng::split(args.seed, index as u64);
        let output = step.apply(instance, &mut stream)?;
        lines.push(to_json_line(&output));
    }
    emit(&args.out, &lines.join("\n"))?;
    Ok(ExitCode::SUCCESS)
}

fn solve(args: SolveArgs) -> Result<ExitCode> {
    let parity = match args.mode.as_str() {
        "count" => false,
        "parity" => true,
        other => {
            return Err(Error::argument(format!(
                "solve mode must be count or parity, got {other:?}"
            )))
        }
    };
    let instances = load_instances(&args.file)?;
    if instances.is_empty() {
        return Err(Error::argument(format!("no instances in {:?}", args.file)));
    }
    for instance in &instances {
        let count = match (instance, args.clique_k) {
            (Instance::Graph(g), Some(k)) => count_cliques(g, k)?,
            (Instance::Graph(_), None) => {
                return Err(Error::argument(
                    "graph input needs --clique-k to know what to count",
                ))
            }
            _ => solve_count(instance)?,
        };
        if parity {
            out_line(&count.parity().to_string())?;
        } else {
            out_line(&count.to_decimal())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> Result<ExitCode> {
    let steps: Vec<ReductionStep> = if fs::metadata(&args.target).is_ok() {
        parse_plan(&fs::read_to_string(&args.target)?)?
    } else {
        let params = StepParams {
            b: args.b,
            g: args.g,
            k: args.k,
            groups: args.groups,
        };
        vec![parse_step(&args.target, &params)?]
    };
    let bounds = SizeBounds {
        max_n: args.max_n,
        max_k: args.max_k,
    };
    let report = verify_chain(&steps, args.trials, &bounds, args.seed)?;
    for trial in &report.trials {
        if trial.passed {
            out_line(&format!(
                "trial {}: pass ({}) count={}",
                trial.index, trial.detail, trial.actual
            ))?;
        } else {
            out_line(&format!(
                "trial {}: FAIL ({}) expected={} actual={}",
                trial.index, trial.detail, trial.expected, trial.actual
            ))?;
            if let Some(counterexample) = &trial.counterexample {
                out_line(&format!("  counterexample: {counterexample}"))?;
            }
        }
    }
    out_line(&format!(
        "{}: {} trials, {} failures",
        report.target,
        report.trials.len(),
        report.failures
    ))?;
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn chain(args: ChainArgs) -> Result<ExitCode> {
    let steps = parse_plan(&fs::read_to_string(&args.plan)?)?;
    let instances = load_instances(&args.input)?;
    let input = instances
        .first()
        .ok_or_else(|| Error::argument(format!("no instances in {:?}", args.input)))?;
    let (output, provenance) = run_chain(&steps, input, args.seed)?;
    emit(&args.out, &to_json_line(&output))?;
    let log = provenance.to_json().to_string();
    match &args.provenance {
        Some(path) => fs::write(path, log + "\n")?,
        None => eprintln!("{log}"),
    }
    eprintln!(
        "chain ok: {} steps, output {} digest {}",
        steps.len(),
        output.kind(),
        instance_digest(&output)
    );
    Ok(ExitCode::SUCCESS)
}

/// Load instances from a path (`-` for stdin), sniffing the format.
///
/// JSON lines start with `{`; DIMACS starts with `p cnf` or `c` comments;
/// anything else whose first data line is a bare integer is an edge list.
fn load_instances(path: &str) -> Result<Vec<Instance>> {
    let text = if path == "-" {
        let mut buffer = String::new();
        io::stdin().read_to_string(&mut buffer)?;
        buffer
    } else {
        fs::read_to_string(path)?
    };
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'));
    match first {
        None => Ok(Vec::new()),
        Some(l) if l.starts_with('{') => read_instances(text.as_bytes()),
        Some(l) if l.starts_with("p cnf") || l.starts_with("p ") || l.starts_with('c') => {
            Ok(vec![Instance::Cnf(cnf_from_dimacs(&text)?)])
        }
        Some(l) if l.split_whitespace().all(|t| t.parse::<usize>().is_ok()) => {
            Ok(vec![Instance::Graph(graph_from_edge_list(&text)?)])
        }
        Some(l) => Err(Error::structural(format!(
            "unrecognized input format (first line {l:?})"
        ))),
    }
}

fn emit(out: &Option<String>, body: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, format!("{body}\n"))?;
        }
        None => out_line(body)?,
    }
    Ok(())
}
