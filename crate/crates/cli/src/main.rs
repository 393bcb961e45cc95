//! `cffa`: solve, verify, kernelize, generate and bench CFFA instances.
//!
//! Exit codes: 0 = yes / valid, 1 = no / invalid, 2 = error (bad input,
//! inapplicable solver or rule, exhausted budget). Documents go to stdout,
//! diagnostics to stderr.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use cffa_core::bench::SuiteSpec;
use cffa_core::generators::{
    gen_from_3dm_source, gen_from_coloring, gen_from_independent_set, gen_from_partition, gen_random, IsFlavor,
    RandomProfile, ThreeDMFlavor, ThreeDMInstance,
};
use cffa_core::instance::parse_result;
use cffa_core::kernel::{kernelize, KernelRule};
use cffa_core::portfolio::{solve, Algo, SolveOptions};
use cffa_core::{parse_instance, verify_assignment, write_instance, write_result, Budget, Graph};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

const DEFAULT_SEED: u64 = 0;

#[derive(Parser)]
#[command(name = "cffa", version, about = "Exact solvers for conflict-free fair allocation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide an instance and print the result document.
    Solve {
        /// Instance document, or `-` for stdin.
        instance: PathBuf,
        #[arg(long, default_value = "auto")]
        algo: Algo,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Colorings per bundle cap for `colorcode-rand` (default ⌈e^q⌉).
        #[arg(long)]
        repetitions: Option<u64>,
    },
    /// Check an assignment (a result document) against an instance.
    Verify { instance: PathBuf, assignment: PathBuf },
    /// Print the reduced instance; the report goes to a sidecar file.
    Kernelize {
        instance: PathBuf,
        #[arg(long)]
        rule: KernelRule,
        /// Clique size excluded by the `ramsey` rule.
        #[arg(long)]
        r: Option<usize>,
        /// Defaults to `<instance>.kernel-report.json`.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Build an instance from a source problem or a random profile.
    Generate {
        #[arg(long = "from", value_enum)]
        source_kind: SourceKind,
        /// Inline JSON, or `@path` to read it from a file.
        #[arg(long)]
        source: String,
        /// Agents for `partition`.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Colors for `coloring`, set size for `is`.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value = "partial")]
        is_flavor: IsFlavorArg,
        #[arg(long, value_enum, default_value = "edgeless")]
        dm_flavor: DmFlavorArg,
        /// Threshold for the `3dm` gadget (default 2).
        #[arg(long)]
        eta: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Run a differential suite; line-delimited JSON on stdout.
    Bench {
        #[arg(long)]
        suite: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SourceKind {
    Partition,
    Coloring,
    Is,
    #[value(name = "3dm")]
    ThreeDm,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum IsFlavorArg {
    Partial,
    SbComplete,
}

#[derive(Clone, Copy, ValueEnum)]
enum DmFlavorArg {
    Edgeless,
    TwoClique,
}

#[derive(Deserialize)]
struct GraphSource {
    vertices: usize,
    #[serde(default)]
    edges: Vec<(usize, usize)>,
}

impl GraphSource {
    fn build(&self) -> Result<Graph> {
        if let Some(&(u, v)) = self.edges.iter().find(|&&(u, v)| u == v || u.max(v) >= self.vertices) {
            bail!("edge ({u},{v}) is a loop or leaves the {} vertices", self.vertices);
        }
        Ok(Graph::from_edges(self.vertices, &self.edges))
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading stdin")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn emit(doc: &str) -> Result<()> {
    let mut out = io::stdout().lock();
    writeln!(out, "{doc}")?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let budget = Budget::from_env()?;
    match cli.command {
        Command::Solve {
            instance,
            algo,
            seed,
            repetitions,
        } => {
            let inst = parse_instance(&read_input(&instance)?)?;
            let opts = SolveOptions {
                budget,
                seed,
                repetitions,
            };
            let solved = solve(&inst, algo, &opts)?;
            eprintln!("solver: {}; seed: {seed}", solved.algo);
            emit(&write_result(&solved.result))?;
            Ok(if solved.result.is_yes() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Verify { instance, assignment } => {
            let inst = parse_instance(&read_input(&instance)?)?;
            let result = parse_result(&read_input(&assignment)?)?;
            let Some(witness) = result.witness else {
                bail!("{} has no assignment to verify", assignment.display());
            };
            match verify_assignment(&inst, &witness)? {
                Ok(()) => {
                    eprintln!("valid");
                    Ok(ExitCode::SUCCESS)
                }
                Err(v) => {
                    eprintln!("invalid: {v}");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Kernelize {
            instance,
            rule,
            r,
            report,
        } => {
            let rule = match (rule, r) {
                (KernelRule::Ramsey(_), Some(r)) => KernelRule::Ramsey(r),
                (_, Some(_)) => bail!("--r only applies to the ramsey rule"),
                (rule, None) => rule,
            };
            let report_path = match report {
                Some(p) => p,
                None if instance.as_os_str() == "-" => bail!("--report is required when reading stdin"),
                None => {
                    let mut name = instance.clone().into_os_string();
                    name.push(".kernel-report.json");
                    PathBuf::from(name)
                }
            };
            let inst = parse_instance(&read_input(&instance)?)?;
            let k = kernelize(&inst, rule)?;
            let doc = serde_json::to_string_pretty(&k)?;
            fs::write(&report_path, doc + "\n").with_context(|| format!("writing {}", report_path.display()))?;
            eprintln!(
                "{}: {} of {} jobs kept (bound {}); report in {}",
                rule,
                k.surviving_jobs,
                k.original_jobs,
                k.stated_bound,
                report_path.display()
            );
            emit(&write_instance(&k.reduced))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Generate {
            source_kind,
            source,
            n,
            k,
            is_flavor,
            dm_flavor,
            eta,
            seed,
        } => {
            let text = match source.strip_prefix('@') {
                Some(path) => fs::read_to_string(path).with_context(|| format!("reading {path}"))?,
                None => source,
            };
            let need_k = || k.context("--k is required for this source");
            let inst = match source_kind {
                SourceKind::Partition => {
                    let values: Vec<u64> = serde_json::from_str(&text).context("partition source: expected [u64, ...]")?;
                    gen_from_partition(&values, n)?
                }
                SourceKind::Coloring => {
                    let g: GraphSource = serde_json::from_str(&text).context("graph source")?;
                    gen_from_coloring(&g.build()?, need_k()?)?
                }
                SourceKind::Is => {
                    let g: GraphSource = serde_json::from_str(&text).context("graph source")?;
                    let flavor = match is_flavor {
                        IsFlavorArg::Partial => IsFlavor::Partial,
                        IsFlavorArg::SbComplete => IsFlavor::SbComplete,
                    };
                    gen_from_independent_set(&g.build()?, need_k()?, flavor)?
                }
                SourceKind::ThreeDm => {
                    let src: ThreeDMInstance = serde_json::from_str(&text).context("3dm source")?;
                    let flavor = match dm_flavor {
                        DmFlavorArg::Edgeless => ThreeDMFlavor::Edgeless,
                        DmFlavorArg::TwoClique => ThreeDMFlavor::TwoClique,
                    };
                    gen_from_3dm_source(&src, flavor, eta)?
                }
                SourceKind::Random => {
                    let profile: RandomProfile = serde_json::from_str(&text).context("random profile")?;
                    eprintln!("seed: {seed}");
                    gen_random(&profile, seed)?
                }
            };
            emit(&write_instance(&inst))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench { suite } => {
            let spec: SuiteSpec = serde_json::from_str(&read_input(&suite)?).context("suite document")?;
            let report = spec.run(&budget)?;
            for line in report.to_lines() {
                emit(&line)?;
            }
            eprintln!(
                "seed {}: {} instances, {} failures, {} harness bugs, {} excluded",
                report.seed,
                report.instances,
                report.failures.len(),
                report.harness_bugs.len(),
                report.excluded.len()
            );
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
