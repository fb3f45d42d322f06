//! `huffmax` — exact D-ary Huffman codes on PMF files, Huffman-tree
//! property verification, and point-of-maximum classification.
//!
//! Exit status: 0 on success, 1 on domain errors (the error name goes
//! to standard error), 2 on usage errors (via clap).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use huffmax_core::{
    decimal_approx, dot, format_rational, huffman_tree, is_point_of_maximum, normalize,
    oracle_min_expected_length, parse_pmf_text, sweep_simplex, uniform_length_sequence,
    verify_huffman, CodeTree, Pmf,
};

#[derive(Parser)]
#[command(
    name = "huffmax",
    version,
    about = "Exact D-ary Huffman coding and maximum-classification of PMFs",
    after_help = "PMF files carry one probability per line, as a/b or a decimal \
                  literal; lines starting with # are ignored. All arithmetic is \
                  exact; decimal output is approximate and labeled as such."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Build the Huffman code: lengths, expected length, codewords
    Tree {
        /// PMF file
        pmf: PathBuf,
        /// Alphabet size D
        #[arg(long, default_value_t = 2)]
        arity: usize,
        /// Letters for codeword emission, e.g. 01 or abc (defaults to
        /// digits/letters, arity up to 36)
        #[arg(long)]
        alphabet: Option<String>,
        /// Rescale the input by its exact sum before validation
        #[arg(long)]
        normalize: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Write the output document here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the Huffman-tree properties of a DOT tree against a PMF
    Verify {
        /// PMF file
        pmf: PathBuf,
        /// Tree in the DOT subset written by export-dot
        #[arg(long)]
        tree: PathBuf,
        /// Alphabet size D (defaults to the file's arity attribute, else 2)
        #[arg(long)]
        arity: Option<usize>,
        #[arg(long)]
        normalize: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether the PMF maximizes the minimum expected length
    Classify {
        /// PMF file
        pmf: PathBuf,
        #[arg(long, default_value_t = 2)]
        arity: usize,
        #[arg(long)]
        normalize: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the optimal codeword lengths for the uniform distribution
    Lu {
        /// Number of symbols
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        arity: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force optimum and agreement with the engine
    Oracle {
        /// PMF file
        pmf: PathBuf,
        #[arg(long, default_value_t = 2)]
        arity: usize,
        /// Length cap for the search (default n-1, always feasible)
        #[arg(long)]
        max_len: Option<usize>,
        #[arg(long)]
        normalize: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep a rational grid on the simplex and compare classifier vs values
    Sweep {
        /// Number of symbols
        #[arg(long)]
        n: usize,
        /// Common denominator of the grid (n must divide it)
        #[arg(long)]
        denominator: u64,
        #[arg(long, default_value_t = 2)]
        arity: usize,
        /// Cap on the number of grid points
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Write the per-point CSV here (summary always goes to stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the Huffman tree as DOT
    ExportDot {
        /// PMF file
        pmf: PathBuf,
        #[arg(long, default_value_t = 2)]
        arity: usize,
        #[arg(long)]
        normalize: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("{message}");
            ExitCode::from(1)
        }
    }
}

fn read_file(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("Io: cannot read {}: {e}", path.display()))
}

fn load_pmf(path: &Path, rescale: bool) -> Result<(Pmf, Vec<usize>), String> {
    let text = read_file(path)?;
    let mut values = parse_pmf_text(&text).map_err(|e| e.to_string())?;
    if rescale {
        values = normalize(values).map_err(|e| e.to_string())?;
    }
    Pmf::with_permutation(values).map_err(|e| e.to_string())
}

fn check_arity(arity: usize) -> Result<(), String> {
    if arity < 2 {
        return Err(format!("ArityTooSmall: arity {arity} < 2"));
    }
    Ok(())
}

fn emit(out: &Option<PathBuf>, document: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, document)
            .map_err(|e| format!("Io: cannot write {}: {e}", path.display())),
        None => {
            print!("{document}");
            Ok(())
        }
    }
}

fn default_alphabet(arity: usize) -> Result<Vec<char>, String> {
    const LETTERS: &str = "0123456789abcdefghijklmnopqrstuvwxyz";
    if arity > LETTERS.len() {
        return Err(format!(
            "AlphabetSizeMismatch: no default alphabet for arity {arity}, pass --alphabet"
        ));
    }
    Ok(LETTERS.chars().take(arity).collect())
}

fn run(command: Command) -> Result<(), String> {
    match command {
        Command::Tree {
            pmf,
            arity,
            alphabet,
            normalize,
            format,
            out,
        } => {
            check_arity(arity)?;
            let (p, perm) = load_pmf(&pmf, normalize)?;
            let letters = match alphabet {
                Some(s) => s.chars().collect(),
                None => default_alphabet(arity)?,
            };
            let (tree, _) = huffman_tree(&p, arity);
            let words = tree.emit_code(&letters).map_err(|e| e.to_string())?;
            let value = tree.expected_length().map_err(|e| e.to_string())?;
            let lengths = tree.length_sequence();

            // perm[k] = input position of sorted index k; invert for
            // input-order reporting.
            let mut sorted_of_input = vec![0usize; p.len()];
            for (sorted, &input) in perm.iter().enumerate() {
                sorted_of_input[input] = sorted;
            }

            let document = match format {
                Format::Text => {
                    let mut doc = String::new();
                    doc.push_str(&format!("n: {}\narity: {}\n", p.len(), arity));
                    doc.push_str(&format!("length sequence: {}\n", lengths.display()));
                    doc.push_str(&format!(
                        "expected length: {} (~ {})\n",
                        format_rational(&value),
                        decimal_approx(&value, 6)
                    ));
                    doc.push_str("codewords (input order):\n");
                    for (input, &sorted) in sorted_of_input.iter().enumerate() {
                        doc.push_str(&format!(
                            "  symbol {}: p={} len={} {}\n",
                            input + 1,
                            format_rational(&p[sorted]),
                            words[sorted].len(),
                            words[sorted]
                        ));
                    }
                    doc
                }
                Format::Json => {
                    let symbols: Vec<_> = (0..p.len())
                        .map(|input| {
                            let sorted = sorted_of_input[input];
                            json!({
                                "symbol": input + 1,
                                "probability": format_rational(&p[sorted]),
                                "length": words[sorted].len(),
                                "codeword": words[sorted],
                            })
                        })
                        .collect();
                    let value_json = json!({
                        "n": p.len(),
                        "arity": arity,
                        "length_sequence": lengths.as_slice(),
                        "expected_length": format_rational(&value),
                        "expected_length_approx": decimal_approx(&value, 6),
                        "symbols": symbols,
                    });
                    format!("{:#}\n", value_json)
                }
            };
            emit(&out, &document)
        }

        Command::Verify {
            pmf,
            tree,
            arity,
            normalize,
            format,
            out,
        } => {
            let (p, _) = load_pmf(&pmf, normalize)?;
            let parsed = dot::parse(&read_file(&tree)?).map_err(|e| e.to_string())?;
            let arity = match (arity, parsed.arity) {
                (Some(flag), Some(file)) if flag != file => {
                    return Err(format!(
                        "ArityMismatch: --arity {flag} but the tree file says {file}"
                    ));
                }
                (Some(flag), _) => flag,
                (None, Some(file)) => file,
                (None, None) => 2,
            };
            check_arity(arity)?;
            let code_tree: CodeTree = parsed.into_tree(arity).map_err(|e| e.to_string())?;
            let report = verify_huffman(&code_tree, &p).map_err(|e| e.to_string())?;
            let document = match format {
                Format::Text => report.render_text(),
                Format::Json => format!(
                    "{:#}\n",
                    serde_json::to_value(&report).map_err(|e| e.to_string())?
                ),
            };
            emit(&out, &document)
        }

        Command::Classify {
            pmf,
            arity,
            normalize,
            format,
            out,
        } => {
            check_arity(arity)?;
            let (p, _) = load_pmf(&pmf, normalize)?;
            let verdict = is_point_of_maximum(&p, arity);
            let document = match format {
                Format::Text => {
                    let mut doc = String::new();
                    doc.push_str(&format!("n: {}\narity: {}\n", p.len(), arity));
                    doc.push_str(&format!("branch: {:?}\n", verdict.branch));
                    if let (Some(sum), Some(high), Some(size)) = (
                        &verdict.lowest_d_sum,
                        &verdict.highest,
                        verdict.criterion_size,
                    ) {
                        doc.push_str(&format!(
                            "lowest {} sum: {}\nhighest: {}\n",
                            size,
                            format_rational(sum),
                            format_rational(high)
                        ));
                    }
                    doc.push_str(&format!(
                        "point of maximum: {}\n",
                        if verdict.is_max { "yes" } else { "no" }
                    ));
                    doc.push_str(&format!(
                        "max value: {} (~ {})\n",
                        format_rational(&verdict.max_value),
                        decimal_approx(&verdict.max_value, 6)
                    ));
                    doc
                }
                Format::Json => format!(
                    "{:#}\n",
                    serde_json::to_value(&verdict).map_err(|e| e.to_string())?
                ),
            };
            emit(&out, &document)
        }

        Command::Lu {
            n,
            arity,
            format,
            out,
        } => {
            check_arity(arity)?;
            if n < 2 {
                return Err(format!("TooFewSymbols: need at least 2 symbols, got {n}"));
            }
            let lengths = uniform_length_sequence(n, arity);
            let document = match format {
                Format::Text => format!("{}\n", lengths.display()),
                Format::Json => format!(
                    "{:#}\n",
                    json!({ "n": n, "arity": arity, "lengths": lengths.as_slice() })
                ),
            };
            emit(&out, &document)
        }

        Command::Oracle {
            pmf,
            arity,
            max_len,
            normalize,
            format,
            out,
        } => {
            check_arity(arity)?;
            let (p, _) = load_pmf(&pmf, normalize)?;
            let max_len = max_len.unwrap_or(p.len() - 1);
            let (oracle_value, oracle_lengths) =
                oracle_min_expected_length(&p, arity, max_len).map_err(|e| e.to_string())?;
            let (tree, _) = huffman_tree(&p, arity);
            let engine_value = tree.expected_length().map_err(|e| e.to_string())?;
            let engine_lengths = tree.length_sequence();
            let agree = oracle_value == engine_value && oracle_lengths == engine_lengths;
            let document = match format {
                Format::Text => format!(
                    "oracle value: {} (~ {})\noracle lengths: {}\nengine value: {}\nengine lengths: {}\nagreement: {}\n",
                    format_rational(&oracle_value),
                    decimal_approx(&oracle_value, 6),
                    oracle_lengths.display(),
                    format_rational(&engine_value),
                    engine_lengths.display(),
                    agree
                ),
                Format::Json => format!(
                    "{:#}\n",
                    json!({
                        "oracle_value": format_rational(&oracle_value),
                        "oracle_lengths": oracle_lengths.as_slice(),
                        "engine_value": format_rational(&engine_value),
                        "engine_lengths": engine_lengths.as_slice(),
                        "agreement": agree,
                    })
                ),
            };
            emit(&out, &document)
        }

        Command::Sweep {
            n,
            denominator,
            arity,
            budget,
            format,
            out,
        } => {
            check_arity(arity)?;
            let report = sweep_simplex(n, arity, denominator, budget).map_err(|e| e.to_string())?;
            if let Some(path) = &out {
                fs::write(path, report.to_csv())
                    .map_err(|e| format!("Io: cannot write {}: {e}", path.display()))?;
            }
            match format {
                Format::Text => {
                    println!(
                        "grid: n={} arity={} denominator={}",
                        report.n, report.arity, report.denominator
                    );
                    println!("points: {}", report.point_count);
                    println!(
                        "max value: {} (~ {})",
                        format_rational(&report.max_value),
                        decimal_approx(&report.max_value, 6)
                    );
                    println!("argmax points: {}", report.argmax_count);
                    println!("classifier agreement: {}", report.classifier_agreement);
                    for d in &report.disagreements {
                        println!("  disagreement: {d:?}");
                    }
                    if out.is_none() {
                        println!("(pass --out to write the per-point CSV)");
                    }
                }
                Format::Json => {
                    let value = serde_json::to_value(&report).map_err(|e| e.to_string())?;
                    println!("{value:#}");
                }
            }
            Ok(())
        }

        Command::ExportDot {
            pmf,
            arity,
            normalize,
            out,
        } => {
            check_arity(arity)?;
            let (p, _) = load_pmf(&pmf, normalize)?;
            let (tree, _) = huffman_tree(&p, arity);
            emit(&out, &dot::export(&tree))
        }
    }
}
