mod presets;
mod scenario;
mod svg;

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use omegalab::drivers::{check_disjunctive, generate};
use omegalab::io::{read_orbit_csv, read_sequence, read_system_csv, write_sequence};
use omegalab::kaczmarz::{solve, SolveOptions};
use omegalab::omega::{default_burn_in, estimate_omega, POINT_CLUSTER_EPS};
use omegalab::{DriverSpec, Vector};

/// Orbits, omega-limit sets and drivers for nonexpansive iterated function systems.
#[derive(Parser)]
#[command(name = "omegalab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config (TOML, or JSON by extension) and its checks.
    Run {
        config: PathBuf,
        /// Directory for the orbit CSV, omega JSON, report JSON and SVG.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Re-estimate the omega-limit set of an orbit CSV.
    Omega {
        orbit: PathBuf,
        /// Orbit points skipped before clustering [default: 10% of steps].
        #[arg(long)]
        burn_in: Option<usize>,
        #[arg(long, default_value_t = POINT_CLUSTER_EPS)]
        eps: f64,
        /// Write the JSON estimate here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate or audit driving sequences.
    #[command(subcommand)]
    Driver(DriverCommand),
    /// Solve a linear system (CSV rows `a1,...,ad,b`) by row projections.
    Kaczmarz {
        system: PathBuf,
        #[arg(long, value_enum, default_value_t = Kind::Cyclic)]
        driver: Kind,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 100_000)]
        max_iter: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Starting point as comma-separated coordinates [default: origin].
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x0: Option<Vec<f64>>,
    },
    /// List or write the built-in scenarios.
    #[command(subcommand)]
    Presets(PresetsCommand),
}

#[derive(Subcommand)]
enum DriverCommand {
    /// Print `n` symbols, space separated, or write a sequence file.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        /// Alphabet size N [default: length of --perm or --weights, else 2].
        #[arg(long)]
        alphabet: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cyclic order, e.g. `2,1,3`.
        #[arg(long, value_delimiter = ',')]
        perm: Option<Vec<usize>>,
        /// Symbol probabilities for the iid kind, e.g. `0.5,0.25,0.25`.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
        /// Write one symbol per line to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report which words of length m are missing from a sequence file.
    Audit {
        file: PathBuf,
        #[arg(long)]
        m: usize,
        /// Alphabet size N [default: largest symbol in the file].
        #[arg(long)]
        alphabet: Option<usize>,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum PresetsCommand {
    List,
    Write {
        name: String,
        #[arg(long, value_enum, default_value_t = Format::Toml)]
        format: Format,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Cyclic,
    Iid,
    Disjunctive,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Toml,
    Json,
}

/// Requested checks ran and at least one failed.
struct ChecksFailed;

fn driver_spec(
    kind: Kind,
    alphabet: usize,
    seed: u64,
    perm: Option<Vec<usize>>,
    weights: Option<Vec<f64>>,
) -> Result<DriverSpec> {
    let spec = match kind {
        Kind::Cyclic => DriverSpec::Cyclic {
            permutation: perm.unwrap_or_else(|| (1..=alphabet).collect()),
        },
        Kind::Iid => DriverSpec::IidRandom {
            seed,
            weights: weights.unwrap_or_else(|| vec![1.0 / alphabet as f64; alphabet]),
        },
        Kind::Disjunctive => DriverSpec::disjunctive(alphabet),
    };
    spec.validate_for(alphabet)?;
    Ok(spec)
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("opening {}", path.display()))?,
    ))
}

fn run(cmd: Command) -> Result<Result<(), ChecksFailed>> {
    match cmd {
        Command::Run { config, out_dir } => {
            let s = scenario::load(&config)?;
            let v = scenario::validate(s)
                .with_context(|| format!("invalid scenario {}", config.display()))?;
            let outcome = v.run(Some(&out_dir))?;
            let report = &outcome.report;
            println!(
                "{}: {} steps, {} omega representatives",
                report.scenario,
                outcome.orbit.steps(),
                outcome.estimate.len()
            );
            for (i, c) in report.checks.iter().enumerate() {
                println!(
                    "  check {} {:<22} {}",
                    i + 1,
                    c.check,
                    if c.pass { "PASS" } else { "FAIL" }
                );
                if !c.pass {
                    eprintln!("check {} ({}) failed: {}", i + 1, c.check, c.details);
                }
            }
            if let Some(p) = report.files.get("report") {
                println!("report written to {}", p.display());
            }
            Ok(if report.pass {
                Ok(())
            } else {
                Err(ChecksFailed)
            })
        }
        Command::Omega {
            orbit,
            burn_in,
            eps,
            out,
        } => {
            let o = read_orbit_csv(open(&orbit)?)
                .with_context(|| format!("reading {}", orbit.display()))?;
            let burn_in = burn_in.unwrap_or_else(|| default_burn_in(o.steps()));
            let est = estimate_omega(&o, burn_in, eps)?;
            write_out(
                out.as_deref(),
                &(serde_json::to_string_pretty(&est)? + "\n"),
            )?;
            Ok(Ok(()))
        }
        Command::Driver(DriverCommand::Gen {
            kind,
            n,
            alphabet,
            seed,
            perm,
            weights,
            out,
        }) => {
            let alphabet = alphabet
                .or(perm.as_ref().map(Vec::len))
                .or(weights.as_ref().map(Vec::len))
                .unwrap_or(2);
            let spec = driver_spec(kind, alphabet, seed, perm, weights)?;
            let seq = generate(&spec, n)?;
            match out {
                Some(p) => {
                    let f =
                        File::create(&p).with_context(|| format!("creating {}", p.display()))?;
                    let mut w = BufWriter::new(f);
                    write_sequence(&seq, &mut w)?;
                    w.flush()?;
                }
                None => {
                    let line: Vec<String> = seq.iter().map(usize::to_string).collect();
                    println!("{}", line.join(" "));
                }
            }
            Ok(Ok(()))
        }
        Command::Driver(DriverCommand::Audit {
            file,
            m,
            alphabet,
            json,
        }) => {
            let seq = read_sequence(open(&file)?)
                .with_context(|| format!("reading {}", file.display()))?;
            let alphabet = match alphabet.or(seq.iter().copied().max()) {
                Some(a) => a,
                None => bail!("{} contains no symbols; pass --alphabet", file.display()),
            };
            let r = check_disjunctive(&seq, alphabet, m)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&r)?);
            } else {
                println!(
                    "{} of {} words of length {m} over {{1..{alphabet}}} found in {} symbols",
                    r.found, r.total_words, r.prefix_length
                );
                if let Some(w) = &r.warning {
                    println!("warning: {w}");
                }
                if r.missing_count > 0 {
                    println!("missing {}:", r.missing_count);
                    for w in &r.missing {
                        let w: Vec<String> = w.iter().map(usize::to_string).collect();
                        println!("  ({})", w.join(","));
                    }
                    if r.missing_count > r.missing.len() {
                        println!("  ...");
                    }
                }
            }
            Ok(if r.passes() {
                Ok(())
            } else {
                Err(ChecksFailed)
            })
        }
        Command::Kaczmarz {
            system,
            driver,
            tol,
            max_iter,
            seed,
            x0,
        } => {
            let sys = read_system_csv(open(&system)?)
                .with_context(|| format!("reading {}", system.display()))?;
            let spec = driver_spec(driver, sys.len(), seed, None, None)?;
            let mut opts = SolveOptions::new(tol, max_iter);
            if let Some(x) = x0 {
                opts = opts.starting_at(Vector::new(x).context("--x0")?);
            }
            let report = solve(&sys, &spec, &opts)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(Ok(()))
        }
        Command::Presets(PresetsCommand::List) => {
            for (name, about) in presets::NAMES {
                println!("{name:<24} {about}");
            }
            Ok(Ok(()))
        }
        Command::Presets(PresetsCommand::Write { name, format, out }) => {
            let Some(s) = presets::get(&name) else {
                let known: Vec<&str> = presets::NAMES.iter().map(|(n, _)| *n).collect();
                bail!("unknown preset '{name}' (known: {})", known.join(", "));
            };
            let text = match format {
                Format::Toml => scenario::to_toml(&s)?,
                Format::Json => scenario::to_json(&s)? + "\n",
            };
            write_out(out.as_deref(), &text)?;
            Ok(Ok(()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(ChecksFailed)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
