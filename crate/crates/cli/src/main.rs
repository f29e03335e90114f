//! `pwk` — command-line surface for the two-party Watson-Crick toolkit:
//! run machines from `.pwk` files, certify and derive backward tables,
//! measure and classify communication, compare against the catalog oracles,
//! and export catalog machines.
//!
//! Exit codes: `run` returns 0/1/2 for accepted/rejected/non-halting,
//! check-style commands return 0 on success and 1 on a found witness, and
//! 64 signals a usage, parse, or I/O problem.

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use pwk_core::comm::{classify, count_messages, measure};
use pwk_core::dsl;
use pwk_core::model::{Input, Machine, Trace, Verdict};
use pwk_core::oracle::{enumerate_accepted, equiv_bounded, EquivResult};
use pwk_core::reverse::{
    backward_replay, certify_bounded, derive_reverse, CertVerdict, DeriveOptions,
    InversionFailure, ReversibilityReport,
};
use pwk_core::zoo;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "pwk", version, about = "simulate, reverse and measure two-party Watson-Crick systems")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a machine on a word; exit 0 accepted, 1 rejected, 2 non-halting.
    Run {
        file: PathBuf,
        word: String,
        /// Write the full trace document as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Stop after this many steps (defaults to the loop-detection bound).
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// Certify reversibility for every word up to a length bound.
    VerifyRev {
        file: PathBuf,
        #[arg(long)]
        max_len: usize,
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Derive backward tables from the forward ones and write the result.
    DeriveRev {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Close over all words up to this length when pairing rules.
        #[arg(long, default_value_t = 8)]
        max_word_len: usize,
        /// Extra witness words to cover rules beyond the enumeration bound.
        #[arg(long = "witness")]
        witnesses: Vec<String>,
    },
    /// Measure message counts; prints CSV `n,forward,backward`.
    Comm {
        file: PathBuf,
        /// File with one word per line.
        #[arg(long, conflicts_with = "enumerate")]
        words: Option<PathBuf>,
        /// Measure every accepted word up to this length.
        #[arg(long)]
        enumerate: Option<usize>,
    },
    /// Classify a measurement CSV as constant|log|sqrt|linear|other.
    Classify { csv: PathBuf },
    /// Compare a machine against a catalog predicate up to a length bound.
    Equiv {
        file: PathBuf,
        /// Catalog entry whose predicate serves as the oracle.
        #[arg(long)]
        oracle: String,
        #[arg(long)]
        max_len: usize,
    },
    /// Catalog operations.
    Zoo {
        #[command(subcommand)]
        cmd: ZooCmd,
    },
}

#[derive(Subcommand)]
enum ZooCmd {
    /// List every catalog entry with its documented properties.
    List,
    /// Write a catalog machine as a canonical `.pwk` file.
    Export {
        name: String,
        #[arg(short, long)]
        output: PathBuf,
    },
}

fn main() -> ExitCode {
    // Die quietly when the consumer of a pipe goes away (e.g. `pwk zoo list | head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(64);
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("pwk: {msg}");
            ExitCode::from(64)
        }
    }
}

fn load_machine(path: &Path) -> Result<Machine, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    dsl::load_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn dispatch(cli: Cli) -> Result<ExitCode, String> {
    match cli.cmd {
        Cmd::Run {
            file,
            word,
            trace,
            max_steps,
        } => {
            let m = load_machine(&file)?;
            let input = m.input(&word).map_err(|e| e.to_string())?;
            let t = m.run(&input, max_steps);
            println!("{} after {} steps", t.verdict, t.steps.len());
            if let Some(out) = trace {
                let doc = export_trace(&m, &input, &t);
                let json = serde_json::to_string_pretty(&doc).expect("trace serializes");
                std::fs::write(&out, json)
                    .map_err(|e| format!("cannot write {}: {e}", out.display()))?;
            }
            Ok(match t.verdict {
                Verdict::Accepted => ExitCode::SUCCESS,
                Verdict::Rejected => ExitCode::from(1),
                Verdict::Loop | Verdict::StepLimit => ExitCode::from(2),
            })
        }
        Cmd::VerifyRev { file, max_len, json } => {
            let m = load_machine(&file)?;
            let report = certify_bounded(&m, max_len).map_err(|e| e.to_string())?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report_doc(&m, &report)).expect("report serializes")
                );
            } else {
                print_report(&m, &report);
            }
            Ok(if report.certified() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Cmd::DeriveRev {
            file,
            output,
            max_word_len,
            witnesses,
        } => {
            let text = std::fs::read_to_string(&file)
                .map_err(|e| format!("cannot read {}: {e}", file.display()))?;
            let spec = dsl::parse(&text).map_err(|e| format!("{}: {e}", file.display()))?;
            let report = spec.validate();
            if !report.is_valid() {
                return Err(format!("{}: invalid machine:\n{report}", file.display()));
            }
            let opts = DeriveOptions {
                max_word_len,
                witnesses,
            };
            match derive_reverse(&spec, &opts) {
                Ok(tables) => {
                    let text = dsl::serialize(&tables.apply_to(&spec));
                    std::fs::write(&output, text)
                        .map_err(|e| format!("cannot write {}: {e}", output.display()))?;
                    println!(
                        "derived {} upper and {} lower backward rules -> {}",
                        tables.upper.len(),
                        tables.lower.len(),
                        output.display()
                    );
                    Ok(ExitCode::SUCCESS)
                }
                Err(conflicts) => {
                    println!("derivation conflicts:");
                    print!("{conflicts}");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Cmd::Comm {
            file,
            words,
            enumerate,
        } => {
            let m = load_machine(&file)?;
            let word_list: Vec<String> = match (words, enumerate) {
                (Some(path), None) => std::fs::read_to_string(&path)
                    .map_err(|e| format!("cannot read {}: {e}", path.display()))?
                    .lines()
                    .map(|l| l.trim().to_string())
                    .filter(|l| !l.is_empty())
                    .collect(),
                (None, Some(len)) => enumerate_accepted(&m, &m.spec().input_alphabet, len),
                _ => return Err("pass exactly one of --words or --enumerate".into()),
            };
            let out = measure(&m, &word_list);
            println!("n,forward,backward");
            for (n, stats) in &out.series {
                println!("{n},{},{}", stats.forward_total(), stats.backward_total());
            }
            for w in &out.rejected {
                eprintln!("rejected: {w}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Classify { csv } => {
            let text = std::fs::read_to_string(&csv)
                .map_err(|e| format!("cannot read {}: {e}", csv.display()))?;
            let mut points = Vec::new();
            for line in text.lines() {
                let line = line.trim();
                if line.is_empty() {
                    continue;
                }
                let cols: Vec<&str> = line.split(',').collect();
                if cols.len() < 2 {
                    continue;
                }
                match (cols[0].trim().parse::<usize>(), cols[1].trim().parse::<u64>()) {
                    (Ok(n), Ok(count)) => points.push((n, count)),
                    _ => continue, // header or comment line
                }
            }
            let class = classify(&points).map_err(|e| e.to_string())?;
            println!("{}", class.kind.label());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Equiv {
            file,
            oracle,
            max_len,
        } => {
            let m = load_machine(&file)?;
            let entry = zoo::get(&oracle).map_err(|e| e.to_string())?;
            match equiv_bounded(&m, entry.predicate, max_len) {
                EquivResult::Pass { words_checked } => {
                    println!("pass: {words_checked} words checked");
                    Ok(ExitCode::SUCCESS)
                }
                EquivResult::Counterexample {
                    word,
                    machine_verdict,
                    predicate_verdict,
                } => {
                    println!(
                        "counterexample: {word:?} machine={machine_verdict} oracle={predicate_verdict}"
                    );
                    Ok(ExitCode::from(1))
                }
            }
        }
        Cmd::Zoo { cmd } => match cmd {
            ZooCmd::List => {
                for e in zoo::list() {
                    let class = e
                        .claimed_comm_class
                        .map(|c| c.label())
                        .unwrap_or("-");
                    let machine = if e.spec.is_some() { "machine" } else { "predicate-only" };
                    let rev = if e.reversible { "reversible" } else { "-" };
                    println!("{:<12} {:<14} {:<10} {:<10} {}", e.name, machine, class, rev, e.provenance);
                    if let Some(note) = e.note {
                        println!("{:<12} note: {note}", "");
                    }
                }
                Ok(ExitCode::SUCCESS)
            }
            ZooCmd::Export { name, output } => {
                let entry = zoo::get(&name).map_err(|e| e.to_string())?;
                let spec = entry
                    .spec
                    .ok_or_else(|| format!("'{name}' is predicate-only, there is no machine to export"))?;
                std::fs::write(&output, dsl::serialize(&spec))
                    .map_err(|e| format!("cannot write {}: {e}", output.display()))?;
                Ok(ExitCode::SUCCESS)
            }
        },
    }
}

#[derive(Serialize)]
struct HeadDoc {
    state: String,
    pos: usize,
    symbol: String,
    sent: Option<String>,
}

#[derive(Serialize)]
struct StepDoc {
    index: usize,
    upper: HeadDoc,
    lower: HeadDoc,
}

#[derive(Serialize)]
struct CommDoc {
    forward: u64,
    backward: u64,
}

#[derive(Serialize)]
struct TraceDocument {
    word: String,
    steps: Vec<StepDoc>,
    verdict: String,
    comm: CommDoc,
}

/// Stable trace rendering: endmarkers as LEND/REND, silent sends as null,
/// backward counts filled in when the run inverts.
fn export_trace(m: &Machine, input: &Input, t: &Trace) -> TraceDocument {
    use pwk_core::model::Side;
    let steps = t
        .steps
        .iter()
        .enumerate()
        .map(|(index, rec)| StepDoc {
            index,
            upper: HeadDoc {
                state: m.state_name(Side::Upper, rec.pre.upper_state).to_string(),
                pos: rec.pre.upper_pos as usize,
                symbol: m.sym_token(input.sym_at(rec.pre.upper_pos as usize)),
                sent: m.message_token(rec.sent_upper).map(str::to_string),
            },
            lower: HeadDoc {
                state: m.state_name(Side::Lower, rec.pre.lower_state).to_string(),
                pos: rec.pre.lower_pos as usize,
                symbol: m.sym_token(input.sym_at(rec.pre.lower_pos as usize)),
                sent: m.message_token(rec.sent_lower).map(str::to_string),
            },
        })
        .collect();
    let forward = count_messages(t, None).expect("no replay attached").forward_total();
    let backward = if m.has_reverse() && t.verdict != Verdict::Loop && t.verdict != Verdict::StepLimit {
        backward_replay(m, input)
            .ok()
            .and_then(|r| count_messages(t, Some(&r)).ok())
            .map(|s| s.backward_total())
            .unwrap_or(0)
    } else {
        0
    };
    TraceDocument {
        word: t.word.clone(),
        steps,
        verdict: t.verdict.to_string(),
        comm: CommDoc { forward, backward },
    }
}

#[derive(Serialize)]
struct ReportDoc {
    verdict: String,
    max_len: Option<usize>,
    witness_word: Option<String>,
    witness_failure: Option<String>,
    words_checked: usize,
    configurations_checked: usize,
}

fn describe_failure(m: &Machine, f: &InversionFailure) -> String {
    match f {
        InversionFailure::Ambiguous { at, candidates } => format!(
            "ambiguous predecessors of {}: {}",
            m.fmt_config(at),
            candidates
                .iter()
                .map(|c| m.fmt_config(c))
                .collect::<Vec<_>>()
                .join(", ")
        ),
        InversionFailure::Stuck { at } => {
            format!("no predecessor found for reached configuration {}", m.fmt_config(at))
        }
        InversionFailure::WrongPredecessor { at, expected, got } => format!(
            "backward from {} gives {} instead of {}",
            m.fmt_config(at),
            m.fmt_config(got),
            m.fmt_config(expected)
        ),
        InversionFailure::SpuriousInitialPredecessor { got } => format!(
            "initial configuration has predecessor {}",
            m.fmt_config(got)
        ),
    }
}

fn report_doc(m: &Machine, r: &ReversibilityReport) -> ReportDoc {
    match &r.verdict {
        CertVerdict::CertifiedUpTo(len) => ReportDoc {
            verdict: "certified".into(),
            max_len: Some(*len),
            witness_word: None,
            witness_failure: None,
            words_checked: r.words_checked,
            configurations_checked: r.configurations_checked,
        },
        CertVerdict::Fails(w) => ReportDoc {
            verdict: "fails".into(),
            max_len: None,
            witness_word: Some(w.word.clone()),
            witness_failure: Some(describe_failure(m, &w.failure)),
            words_checked: r.words_checked,
            configurations_checked: r.configurations_checked,
        },
    }
}

fn print_report(m: &Machine, r: &ReversibilityReport) {
    match &r.verdict {
        CertVerdict::CertifiedUpTo(len) => println!(
            "certified up to length {len} ({} words, {} configurations)",
            r.words_checked, r.configurations_checked
        ),
        CertVerdict::Fails(w) => println!(
            "fails on {:?}: {}",
            w.word,
            describe_failure(m, &w.failure)
        ),
    }
}
