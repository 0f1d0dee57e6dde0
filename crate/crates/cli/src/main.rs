mod cache;
mod table;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nc_core::cumulants::{free_poisson, semicircular};
use nc_core::invariance::{invariance_check, InvarianceCertificate, MomentArray, Outcome};
use nc_core::matrix_models::{build_uniform_rcyclic, constant_matrix, symmetric_semicircular};
use nc_core::verify::{run, Suite, SuiteReport};
use nc_core::weingarten::{gram, haar_integral, QuantumGroup};
use nc_core::{enumerate, Error, PartitionFamily};
use num_traits::Zero;
use serde_json::json;

use table::{csv_rows, Table};

#[derive(Parser)]
#[command(name = "nc", version, about = "Exact noncrossing combinatorics, Weingarten calculus and invariance checks")]
struct Cli {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// List a partition family in canonical order.
    Enumerate {
        #[arg(long, value_parser = parse_family)]
        family: PartitionFamily,
        #[arg(long)]
        k: usize,
        /// Largest k accepted; P(k) and NC(k) grow like Bell and Catalan numbers.
        #[arg(long, default_value_t = 6)]
        bound: usize,
    },
    /// Gram and Weingarten matrices of a group on k points.
    Weingarten {
        #[arg(long, value_parser = parse_group)]
        group: QuantumGroup,
        /// Number of points.
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: u64,
        /// Largest k accepted; at k = 10 the S⁺ table already has 16796² entries.
        #[arg(long, default_value_t = 8)]
        bound: usize,
    },
    /// Haar integral of u_{i₁j₁}⋯u_{i_kj_k}, indices 1-based.
    Integrate {
        #[arg(long, value_parser = parse_group)]
        group: QuantumGroup,
        #[arg(long)]
        n: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        i: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        j: Vec<usize>,
    },
    /// Decide invariance of a moment array under a quantum group.
    Invariance {
        file: PathBuf,
        #[arg(long, value_parser = parse_group)]
        group: QuantumGroup,
    },
    /// Run a built-in verification suite.
    Verify {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<u64>>,
    },
    /// Write the moment array of a model family as JSON.
    Fixture {
        #[arg(value_enum)]
        model: Model,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    /// Symmetric matrix of free semicircular entries, expanded.
    SymmetricSemicircular,
    /// Uniformly R-cyclic semicircular matrix, compressed by kernel.
    UniformSemicircular,
    /// Uniformly R-cyclic free Poisson matrix, compressed by kernel.
    UniformFreePoisson,
    /// The all-ones matrix, expanded.
    Constant,
}

fn parse_family(s: &str) -> Result<PartitionFamily, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_group(s: &str) -> Result<QuantumGroup, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| {
        let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
        format!("{e}; expected one of {}", names.join(", "))
    })
}

/// Exit 1 for mathematical failures, 2 for bad input.
enum Failure {
    Math(String, String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::IncompleteMoments(_) | Error::IndexOutOfRange(_) | Error::Dimension(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Math(String::new(), e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Math(out, msg)) => {
            print!("{out}");
            if !msg.is_empty() {
                eprintln!("nc: {msg}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("nc: {msg}");
            ExitCode::from(2)
        }
    }
}

fn check_bound(k: usize, bound: usize) -> Result<(), Failure> {
    if k > bound {
        return Err(Failure::Usage(format!("k = {k} exceeds the bound {bound}; raise it with --bound")));
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<String, Failure> {
    let format = cli.format;
    match cli.command {
        Command::Enumerate { family, k, bound } => {
            check_bound(k, bound)?;
            Ok(cmd_enumerate(family, k, format.unwrap_or(Format::Text)))
        }
        Command::Weingarten { group, k, n, bound } => {
            check_bound(k, bound)?;
            cmd_weingarten(group, k, n, format.unwrap_or(Format::Text))
        }
        Command::Integrate { group, n, i, j } => {
            let v = haar_integral(group, n, &i, &j)?.to_string();
            Ok(match format.unwrap_or(Format::Text) {
                Format::Text => format!("{v}\n"),
                Format::Json => format!("{}\n", json!({ "group": group, "n": n, "i": i, "j": j, "value": v })),
                Format::Csv => csv_rows(&["value"], [vec![v]]),
            })
        }
        Command::Invariance { file, group } => cmd_invariance(&file, group, format.unwrap_or(Format::Json)),
        Command::Verify { suite, k, n } => {
            let report = run(suite, k, n)?;
            let out = render_report(&report, format.unwrap_or(Format::Text));
            if report.passed() {
                Ok(out)
            } else {
                Err(Failure::Math(out, format!("suite {suite} failed")))
            }
        }
        Command::Fixture { model, n, k } => {
            let m = match model {
                Model::SymmetricSemicircular => MomentArray::from_family(&symmetric_semicircular(n, k), k)?,
                Model::UniformSemicircular => {
                    MomentArray::from_family_by_kernel(&build_uniform_rcyclic(&semicircular(k), n), k)?
                }
                Model::UniformFreePoisson => {
                    MomentArray::from_family_by_kernel(&build_uniform_rcyclic(&free_poisson(k), n), k)?
                }
                Model::Constant => MomentArray::from_family(&constant_matrix(n, k), k)?,
            };
            Ok(format!("{}\n", serde_json::to_string(&m).expect("moment arrays serialize")))
        }
    }
}

fn cmd_enumerate(family: PartitionFamily, k: usize, format: Format) -> String {
    let parts = enumerate(family, k);
    match format {
        Format::Text => parts.iter().map(|p| format!("{p}\n")).collect(),
        Format::Json => format!("{}\n", json!(parts)),
        Format::Csv => csv_rows(
            &["index", "partition", "blocks"],
            parts.iter().enumerate().map(|(i, p)| vec![i.to_string(), p.to_string(), p.block_count().to_string()]),
        ),
    }
}

fn cmd_weingarten(group: QuantumGroup, k: usize, n: u64, format: Format) -> Result<String, Failure> {
    let g = gram(group, k, n);
    let labels: Vec<String> = g.order.items.iter().map(|p| p.to_string()).collect();
    let gram_rows: Vec<Vec<String>> =
        (0..g.dim()).map(|i| (0..g.dim()).map(|j| g.entry(i, j).to_string()).collect()).collect();
    let w_rows = cache::weingarten_rows(group, k, n, &labels)?;
    Ok(match format {
        Format::Text => {
            let mut out = format!("group {group}, k = {k}, n = {n}, dimension {}\n", labels.len());
            for (i, l) in labels.iter().enumerate() {
                let _ = writeln!(out, "  [{i}] {l}");
            }
            out += "gram\n";
            out += &Table::new(&gram_rows).render();
            out += "weingarten\n";
            out += &Table::new(&w_rows).render();
            out
        }
        Format::Json => format!(
            "{}\n",
            json!({ "group": group, "k": k, "n": n, "partitions": labels, "gram": gram_rows, "weingarten": w_rows })
        ),
        Format::Csv => {
            let mut rows = Vec::new();
            for (name, t) in [("gram", &gram_rows), ("weingarten", &w_rows)] {
                for (i, row) in t.iter().enumerate() {
                    for (j, v) in row.iter().enumerate() {
                        rows.push(vec![name.to_string(), labels[i].clone(), labels[j].clone(), v.clone()]);
                    }
                }
            }
            csv_rows(&["table", "pi", "sigma", "value"], rows)
        }
    })
}

fn cmd_invariance(file: &PathBuf, group: QuantumGroup, format: Format) -> Result<String, Failure> {
    let text =
        std::fs::read_to_string(file).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", file.display())))?;
    let m: MomentArray =
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("malformed moment array: {e}")))?;
    let cert = invariance_check(&m, group)?;
    let out = render_certificate(&cert, format);
    match cert.first_failure() {
        None => Ok(out),
        Some(w) => Err(Failure::Math(
            out,
            format!("not {group}-invariant: word {:?} fails at {:?}", w.word, w.witness().unwrap_or_default()),
        )),
    }
}

fn join(xs: &[usize]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn render_certificate(cert: &InvarianceCertificate, format: Format) -> String {
    match format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(cert).expect("certificates serialize")),
        Format::Text => {
            let mut out = format!(
                "group {}, n = {}: {}\n",
                cert.group,
                cert.n,
                if cert.consistent { "consistent" } else { "inconsistent" }
            );
            for w in &cert.warnings {
                let _ = writeln!(out, "warning: {w}");
            }
            for w in &cert.words {
                let _ = match &w.outcome {
                    Outcome::Coefficients(c) => {
                        let support = c.iter().filter(|c| !c.value.is_zero()).count();
                        let dep = if w.dependent { ", dependent" } else { "" };
                        writeln!(out, "  word {}: solved, {support} nonzero of {}{dep}", join(&w.word), c.len())
                    }
                    Outcome::Witness(i) => writeln!(out, "  word {}: witness {}", join(&w.word), join(i)),
                };
            }
            out
        }
        Format::Csv => csv_rows(
            &["word", "outcome", "partition", "value"],
            cert.words.iter().flat_map(|w| {
                let word = join(&w.word);
                match &w.outcome {
                    Outcome::Coefficients(c) => c
                        .iter()
                        .map(|c| vec![word.clone(), "coefficient".into(), c.partition.to_string(), c.value.to_string()])
                        .collect::<Vec<_>>(),
                    Outcome::Witness(i) => vec![vec![word, "witness".into(), String::new(), join(i)]],
                }
            }),
        ),
    }
}

fn render_report(r: &SuiteReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut v = serde_json::to_value(r).expect("reports serialize");
            v["passed"] = json!(r.passed());
            format!("{}\n", serde_json::to_string_pretty(&v).expect("reports serialize"))
        }
        Format::Text => {
            let ns = r.n.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",");
            let mut out = format!("suite {}, k = {}, n = {ns}\n", r.suite, r.k);
            for c in &r.checks {
                let _ = writeln!(out, "{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            let passed = r.checks.iter().filter(|c| c.pass).count();
            let _ = writeln!(out, "{} ({passed}/{})", if r.passed() { "pass" } else { "fail" }, r.checks.len());
            out
        }
        Format::Csv => csv_rows(
            &["check", "pass", "detail"],
            r.checks.iter().map(|c| vec![c.name.clone(), c.pass.to_string(), c.detail.clone()]),
        ),
    }
}
