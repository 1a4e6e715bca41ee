use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sumideal_cli::commands::{self, Outcome};
use sumideal_cli::format::{envelope, render};

#[derive(Parser)]
#[command(name = "sumideal", version, about = "Densities, summable ideals and almost-disjoint families")]
struct Cli {
    /// Truncation N.
    #[arg(long = "N", global = true, default_value_t = 1_000_000)]
    n: u64,
    /// Seed for generated corpora.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Exit 0 when violations are reported and 1 when none are.
    #[arg(long, global = true)]
    expect_violations: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a density of a set expression.
    Density {
        #[arg(long)]
        set: String,
        /// ud | ld | ubd | lbd | uld | lld | sch | rel
        #[arg(long, default_value = "ud")]
        which: String,
        #[arg(long)]
        rel_to: Option<String>,
        /// Largest Banach window; defaults to N.
        #[arg(long = "W")]
        w: Option<u64>,
        /// json | csv
        #[arg(long, default_value = "json")]
        out: String,
    },
    /// Summable-ideal diagnostics; without a subcommand, diagnoses `--set`.
    Ideal(IdealArgs),
    /// Skeletons and almost-disjoint family prefixes.
    #[command(subcommand)]
    Tad(TadCommand),
    /// The witness-family density.
    #[command(subcommand)]
    Delta(DeltaCommand),
    /// Example densities checked against the axioms.
    #[command(subcommand)]
    Gallery(GalleryCommand),
    /// Run acceptance criteria 1–8.
    Selftest,
}

#[derive(Args)]
struct WeightArg {
    /// one | reciprocal | table:<file>
    #[arg(long = "f", default_value = "one")]
    f: String,
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct IdealArgs {
    #[command(subcommand)]
    command: Option<IdealCommand>,
    #[command(flatten)]
    diagnose: DiagnoseArgs,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[command(flatten)]
    weight: WeightArg,
    #[arg(long)]
    set: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    milestone: f64,
}

#[derive(Subcommand)]
enum IdealCommand {
    /// Is the set in the ideal?
    Diagnose(DiagnoseArgs),
    /// Are two sets translation-almost disjoint?
    Tadcheck {
        #[command(flatten)]
        weight: WeightArg,
        #[arg(long = "A", alias = "a")]
        a: String,
        #[arg(long = "B", alias = "b")]
        b: String,
        #[arg(long = "K", default_value_t = 3)]
        k: u64,
    },
    /// Diagonal set for a decreasing chain.
    Dip {
        #[command(flatten)]
        weight: WeightArg,
        /// Chain members, outermost first, or one file listing them.
        #[arg(long, num_args = 1.., required = true)]
        chain: Vec<String>,
        #[arg(long, default_value_t = 3)]
        stages: usize,
        #[arg(long, default_value_t = sumideal::ideals::DIP_SCAN_BOUND)]
        scan_bound: u64,
    },
}

#[derive(Subcommand)]
enum TadCommand {
    Build {
        #[command(flatten)]
        weight: WeightArg,
        #[arg(long, default_value_t = 5)]
        stages: usize,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        /// Tabulate a closed form (fin | rcp) up to the budget instead.
        #[arg(long)]
        closed_form: Option<String>,
        /// Write the skeleton JSON here.
        #[arg(long)]
        out: Option<String>,
    },
    Member {
        /// closed_form_fin | closed_form_rcp | <skeleton.json>
        #[arg(long)]
        skeleton: String,
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        depth: usize,
    },
    Verify {
        #[arg(long)]
        skeleton: String,
        /// File or comma-separated list of branches.
        #[arg(long)]
        sigmas: String,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long = "K", default_value_t = 3)]
        k: u64,
    },
}

#[derive(Subcommand)]
enum DeltaCommand {
    Eval {
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        set: String,
    },
    Rich {
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        r: String,
    },
    Axioms {
        #[arg(long)]
        family: Option<String>,
        /// One expression per line; defaults to a seeded corpus.
        #[arg(long)]
        corpus: Option<String>,
    },
}

#[derive(Subcommand)]
enum GalleryCommand {
    Run {
        /// all | zero_one | prop1ii | atomless_not_rich | rich_not_atomless
        #[arg(long, default_value = "all")]
        which: String,
        /// json
        #[arg(long, default_value = "json")]
        out: String,
    },
}

fn dispatch(cli: &Cli) -> anyhow::Result<(&'static str, Outcome)> {
    let n = cli.n;
    Ok(match &cli.command {
        Command::Density { set, which, rel_to, w, out } => {
            if out != "json" && out != "csv" {
                anyhow::bail!("unknown output format {out:?}; expected json or csv");
            }
            ("density", commands::density(set, which, rel_to.as_deref(), n, *w, out == "csv")?)
        }
        Command::Ideal(IdealArgs { command: None, diagnose: d })
        | Command::Ideal(IdealArgs { command: Some(IdealCommand::Diagnose(d)), .. }) => {
            let Some(set) = &d.set else { anyhow::bail!("ideal needs --set or a subcommand") };
            ("ideal diagnose", commands::diagnose(&d.weight.f, set, n, d.milestone)?)
        }
        Command::Ideal(IdealArgs { command: Some(IdealCommand::Tadcheck { weight, a, b, k }), .. }) => {
            ("ideal tadcheck", commands::tadcheck(&weight.f, a, b, *k, n)?)
        }
        Command::Ideal(IdealArgs { command: Some(IdealCommand::Dip { weight, chain, stages, scan_bound }), .. }) => {
            ("ideal dip", commands::dip(&weight.f, chain, *stages, *scan_bound)?)
        }
        Command::Tad(TadCommand::Build { weight, stages, budget, closed_form, out }) => (
            "tad build",
            commands::tad_build(&weight.f, *stages, *budget, closed_form.as_deref(), out.as_deref())?,
        ),
        Command::Tad(TadCommand::Member { skeleton, sigma, depth }) => {
            ("tad member", commands::tad_member(skeleton, sigma, *depth)?)
        }
        Command::Tad(TadCommand::Verify { skeleton, sigmas, depth, k }) => {
            ("tad verify", commands::tad_verify(skeleton, sigmas, *depth, *k)?)
        }
        Command::Delta(DeltaCommand::Eval { family, set }) => {
            ("delta eval", commands::delta_eval(family.as_deref(), set, n)?)
        }
        Command::Delta(DeltaCommand::Rich { family, r }) => {
            ("delta rich", commands::delta_rich(family.as_deref(), r, n)?)
        }
        Command::Delta(DeltaCommand::Axioms { family, corpus }) => {
            ("delta axioms", commands::delta_axioms(family.as_deref(), corpus.as_deref(), n, cli.seed)?)
        }
        Command::Gallery(GalleryCommand::Run { which, out }) => {
            if out != "json" {
                anyhow::bail!("gallery reports are JSON only");
            }
            ("gallery run", commands::gallery(which, n, cli.seed)?)
        }
        Command::Selftest => ("selftest", commands::selftest(cli.seed)?),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok((name, outcome)) => {
            let text = match outcome.text {
                Some(t) => t,
                None => format!("{}\n", render(&envelope(name, outcome.report))),
            };
            // A closed pipe (e.g. `| head`) is not an error.
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            if outcome.violations == cli.expect_violations {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
