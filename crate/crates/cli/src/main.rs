use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser, Debug)]
#[command(
    name = "torelli-lab",
    version,
    about = "Mod-d invariants of rational homology spheres"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Params {
    /// Genus.
    #[arg(long, default_value_t = 4)]
    g: usize,
    /// Prime.
    #[arg(long, default_value_t = 5)]
    p: u64,
    /// Samples per randomized check.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// First homology of a Heegaard gluing and its admissible levels.
    Homology {
        #[arg(long)]
        file: String,
        #[arg(long, default_value_t = 50)]
        bound: u64,
    },
    /// Evaluate φ (at level d) or 𝔕 (at prime p) on a symplectic matrix.
    Invariant {
        kind: InvariantKind,
        #[arg(long)]
        file: String,
        #[arg(long)]
        d: Option<u64>,
        #[arg(long)]
        p: Option<u64>,
    },
    /// Lens-space gluing for (d, k, l): order and φ; 𝔕 as well with --p.
    Lens {
        #[arg(long)]
        d: i64,
        #[arg(long)]
        k: i64,
        #[arg(long)]
        l: i64,
        #[arg(long)]
        p: Option<u64>,
    },
    /// Coinvariant quotient of one of the built-in modules.
    Coinv {
        #[arg(long)]
        space: String,
        #[arg(long, default_value_t = 4)]
        g: usize,
        #[arg(long, default_value_t = 5)]
        p: u64,
        #[arg(long, value_enum, default_value_t = GroupArg::Gl)]
        group: GroupArg,
    },
    /// Bilinear forms.
    Form {
        #[command(subcommand)]
        action: FormAction,
    },
    /// Run a verification suite (or `all`).
    Verify {
        suite: String,
        #[command(flatten)]
        params: Params,
    },
}

#[derive(Subcommand, Debug)]
enum FormAction {
    /// Evaluate a form on two elements given as files or inline terms.
    Eval {
        #[arg(long)]
        form: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, default_value_t = 4)]
        g: usize,
        #[arg(long, default_value_t = 5)]
        p: u64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum InvariantKind {
    Phi,
    R,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum GroupArg {
    Gl,
    Sl,
}

fn configure_threads() {
    if let Some(n) = std::env::var("TORELLI_LAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // Only fails if a global pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let result = match cli.command {
        Command::Homology { file, bound } => commands::homology(&file, bound),
        Command::Invariant { kind, file, d, p } => match kind {
            InvariantKind::Phi => commands::invariant_phi(&file, d),
            InvariantKind::R => commands::invariant_r(&file, p),
        },
        Command::Lens { d, k, l, p } => commands::lens(d, k, l, p),
        Command::Coinv { space, g, p, group } => {
            commands::coinv(&space, g, p, matches!(group, GroupArg::Sl))
        }
        Command::Form {
            action: FormAction::Eval { form, x, y, g, p },
        } => commands::form_eval(&form, &x, &y, g, p),
        Command::Verify { suite, params } => {
            commands::verify(&suite, params.g, params.p, params.trials, params.seed)
        }
    };
    match result {
        Ok(out) => {
            print!("{}", out.text);
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
