use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chaincliq::oracle::{
    max_independent_set_with_cutoff, write_family_report, write_oracle_report,
    write_theorem_report, MIS_CUTOFF,
};
use chaincliq::witness::{alon_bound, greedy_bound};
use chaincliq::{
    alon_witness, append_record, best_witness, build_difference_graph, enumerate_chains,
    find_triangle, greedy_good_witness, load_records, local_search_min_ratio,
    max_cliquepair_free_family, random_chain, read_chain, verify_lemma_123, verify_lemma_abcd,
    verify_theorem_exhaustive, write_chain, write_dgraph, write_record, write_witness, Error,
    GraphChain, SearchConfig, StepDistribution,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

const VERIFY_FORMAT: &str = "chaincliq-verify-v1";

/// Chains of graphs, their difference graphs and independent sets.
#[derive(Parser)]
#[command(name = "chaincliq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random chain.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `single` or `geometric:P` with P in (0, 1].
        #[arg(long = "step-dist", default_value = "single")]
        step_dist: StepDistribution,
        #[command(flatten)]
        out: Output,
    },
    /// Build the difference graph of a chain.
    Derive {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Compute an independent set with a proven size guarantee.
    Witness {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Best)]
        method: MethodArg,
        #[command(flatten)]
        out: Output,
    },
    /// Exact maximum independent set of the difference graph.
    Oracle {
        #[arg(long = "in")]
        input: PathBuf,
        /// Largest chain length the exact solver accepts.
        #[arg(long, default_value_t = MIS_CUTOFF)]
        cutoff: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Check one chain (`--in`), or every chain of a given size (`--n --r`).
    Verify {
        #[arg(long = "in", conflicts_with_all = ["n", "r"], required_unless_present_all = ["n", "r"])]
        input: Option<PathBuf>,
        #[arg(long, requires = "r")]
        n: Option<usize>,
        #[arg(long, requires = "n")]
        r: Option<usize>,
        /// Skip the exact oracle for chains longer than this.
        #[arg(long, default_value_t = MIS_CUTOFF)]
        cutoff: usize,
        #[command(flatten)]
        out: Output,
    },
    /// List every chain of length r on n vertices, one document per line.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Largest family of graphs with no clique pair.
    Conjecture {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Search for chains with few independent indices, or load saved records.
    Search {
        #[command(flatten)]
        params: SearchArgs,
        /// Record file to load instead of searching.
        #[arg(long = "in", conflicts_with_all = ["n", "r", "budget", "seed"])]
        input: Option<PathBuf>,
        /// Re-check stored alpha values when loading.
        #[arg(long, requires = "input")]
        verify: bool,
        /// Record file to append the result to.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        pretty: bool,
    },
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, required_unless_present = "input")]
    n: Option<usize>,
    #[arg(long, required_unless_present = "input")]
    r: Option<usize>,
    #[arg(long, default_value_t = 10_000)]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct Output {
    /// Write the document here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print a human-readable summary to stderr.
    #[arg(long)]
    pretty: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Greedy,
    Alon,
    Best,
}

#[derive(Debug)]
enum Failure {
    Domain(Error),
    /// The command ran but the object under test failed a check.
    Rejected,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Domain(Error::Io(e))
    }
}

fn emit(out: &Output, doc: &str) -> Result<(), Failure> {
    let text = format!("{doc}\n");
    match &out.out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn load_chain(path: &Path) -> Result<GraphChain, Failure> {
    Ok(read_chain(&fs::read_to_string(path)?)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Rejected) => ExitCode::from(1),
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Gen {
            n,
            r,
            seed,
            step_dist,
            out,
        } => {
            let c = random_chain(n, r, step_dist, seed)?;
            if out.pretty {
                eprintln!(
                    "chain on {n} vertices, {r} graphs, final graph has {} edges",
                    c.last().edge_count()
                );
            }
            emit(&out, &write_chain(&c))
        }
        Command::Derive { input, out } => {
            let dg = build_difference_graph(&load_chain(&input)?);
            if out.pretty {
                eprintln!(
                    "difference graph on {} indices with {} edges",
                    dg.r(),
                    dg.edge_count()
                );
            }
            emit(&out, &write_dgraph(&dg))
        }
        Command::Witness { input, method, out } => {
            let dg = build_difference_graph(&load_chain(&input)?);
            let w = match method {
                MethodArg::Greedy => greedy_good_witness(&dg)?,
                MethodArg::Alon => alon_witness(&dg)?,
                MethodArg::Best => best_witness(&dg)?,
            };
            if out.pretty {
                eprintln!(
                    "{} witness of size {} (guarantee {})",
                    w.method().as_str(),
                    w.len(),
                    w.guarantee()
                );
            }
            emit(&out, &write_witness(&w))
        }
        Command::Oracle { input, cutoff, out } => {
            let dg = build_difference_graph(&load_chain(&input)?);
            let rep = max_independent_set_with_cutoff(&dg, cutoff)?;
            if out.pretty {
                eprintln!(
                    "alpha = {} ({} search nodes)",
                    rep.alpha, rep.nodes_explored
                );
            }
            emit(&out, &write_oracle_report(&rep))
        }
        Command::Verify {
            input: Some(path),
            cutoff,
            out,
            ..
        } => verify_chain(&load_chain(&path)?, cutoff, &out),
        Command::Verify { n, r, out, .. } => {
            let (n, r) = (n.expect("clap requires --n"), r.expect("clap requires --r"));
            let rep = verify_theorem_exhaustive(n, r)?;
            if out.pretty {
                eprintln!(
                    "{} chains checked, min alpha {}, bound {}",
                    rep.chains_checked,
                    rep.min_alpha,
                    if rep.bound_ok { "holds" } else { "FAILS" }
                );
            }
            emit(&out, &write_theorem_report(&rep))?;
            if rep.bound_ok {
                Ok(())
            } else {
                Err(Failure::Rejected)
            }
        }
        Command::Enumerate { n, r, out } => {
            let mut text = String::new();
            let mut count = 0u64;
            for c in enumerate_chains(n, r)? {
                text.push_str(&write_chain(&c));
                text.push('\n');
                count += 1;
            }
            if out.pretty {
                eprintln!("{count} chains");
            }
            match &out.out {
                Some(path) => fs::write(path, text)?,
                None => io::stdout().lock().write_all(text.as_bytes())?,
            }
            Ok(())
        }
        Command::Conjecture { n, out } => {
            let rep = max_cliquepair_free_family(n)?;
            if out.pretty {
                match rep.max_free_size {
                    Some(size) => eprintln!(
                        "largest clique-pair-free family on {n} vertices has {size} graphs"
                    ),
                    None => eprintln!("no clique-pair-free family computed"),
                }
            }
            emit(&out, &write_family_report(&rep))
        }
        Command::Search {
            input: Some(path),
            verify,
            pretty,
            ..
        } => {
            let records = load_records(&path, verify)?;
            if pretty {
                eprintln!(
                    "{} records loaded{}",
                    records.len(),
                    if verify { " and verified" } else { "" }
                );
            }
            let mut stdout = io::stdout().lock();
            for rec in &records {
                writeln!(stdout, "{}", write_record(rec))?;
            }
            Ok(())
        }
        Command::Search {
            params,
            out,
            pretty,
            ..
        } => {
            let n = params.n.expect("clap requires --n");
            let r = params.r.expect("clap requires --r");
            let rec = local_search_min_ratio(&SearchConfig::new(n, r, params.budget, params.seed))?;
            if pretty {
                eprintln!(
                    "best alpha {} (ratio {}) after {} moves",
                    rec.alpha, rec.ratio, rec.move_trace_length
                );
            }
            if let Some(path) = &out {
                append_record(path, &rec)?;
            }
            println!("{}", write_record(&rec));
            Ok(())
        }
    }
}

fn verify_chain(c: &GraphChain, cutoff: usize, out: &Output) -> Result<(), Failure> {
    let r = c.r();
    let dg = build_difference_graph(c);
    let abcd = verify_lemma_abcd(&dg)?;
    let l123 = verify_lemma_123(&dg)?;
    let triangle = find_triangle(&dg);
    let greedy = greedy_good_witness(&dg)?;
    let alon = alon_witness(&dg)?;
    let alpha = if r <= cutoff.min(MIS_CUTOFF) {
        Some(max_independent_set_with_cutoff(&dg, cutoff)?.alpha)
    } else {
        None
    };
    let greedy_ok = greedy.len() >= greedy_bound(r);
    let alon_ok = alon.len() >= alon_bound(r);
    let oracle_ok = alpha.is_none_or(|a| a >= greedy.len() && a >= alon.len());
    let pass =
        abcd.is_none() && l123.is_none() && triangle.is_none() && greedy_ok && alon_ok && oracle_ok;

    let verdict = |ok: bool| if ok { "\"pass\"" } else { "\"fail\"" };
    let alpha_text = alpha.map_or_else(|| "null".to_string(), |a| a.to_string());
    let doc = format!(
        "{{\"format\": \"{VERIFY_FORMAT}\", \"n\": {}, \"r\": {r}, \"lemma_abcd\": {}, \"lemma_123\": {}, \
         \"triangle_free\": {}, \"greedy\": {}, \"greedy_bound\": {}, \"alon\": {}, \"alon_bound\": {}, \
         \"alpha\": {alpha_text}, \"oracle\": {}, \"pass\": {pass}}}",
        c.n(),
        verdict(abcd.is_none()),
        verdict(l123.is_none()),
        verdict(triangle.is_none()),
        greedy.len(),
        greedy_bound(r),
        alon.len(),
        alon_bound(r),
        if alpha.is_none() { "\"skipped\"" } else { verdict(oracle_ok) },
    );
    if out.pretty {
        for v in [&abcd, &l123].into_iter().flatten() {
            eprintln!("violation: {v}");
        }
        if let Some(t) = triangle {
            eprintln!("violation: triangle {t:?}");
        }
        eprintln!(
            "greedy {} (bound {}), alon {} (bound {}), alpha {alpha_text}: {}",
            greedy.len(),
            greedy_bound(r),
            alon.len(),
            alon_bound(r),
            if pass { "PASS" } else { "FAIL" }
        );
    }
    emit(out, &doc)?;
    if pass {
        Ok(())
    } else {
        Err(Failure::Rejected)
    }
}
