use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cartan_cover::factor::MAX_BLOCK_DEGREE;
use cartan_cover::io::{
    cmd_classify, cmd_cover_build, cmd_factor, cmd_pushforward, cmd_selftest, error_outcome, parse_field_flag,
    read_instance, IoError, Options, Outcome,
};
use cartan_cover::selftest::SelfTestConfig;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Parser)]
#[command(name = "cartan-cover", version, about = "Spectral covers, Cartan bundles and parabolic direct images")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "human", global = true)]
    format: Format,
    /// Field override: Q, GF(p) or a prime p. For selftest, restricts the instance fields.
    #[arg(long, global = true)]
    field: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a matrix subspace as split Cartan, non-split Cartan or neither.
    Classify { instance: String },
    /// Build the spectral cover of a Cartan bundle and verify the round trip.
    CoverBuild { instance: String },
    /// Direct image of a line bundle on a cover, or parabolic pushforward.
    Pushforward { instance: String },
    /// Enumerate block systems and check the matching summands.
    Factor {
        instance: String,
        #[arg(long, default_value_t = MAX_BLOCK_DEGREE)]
        max_degree: usize,
    },
    /// Run the seeded randomized property suites.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: u64,
    },
}

fn instance_command(
    name: &str,
    path: &str,
    opts: &Options,
    f: fn(&cartan_cover::io::InstanceFile, &Options) -> Result<Outcome, IoError>,
) -> Outcome {
    read_instance(path).and_then(|inst| f(&inst, opts)).unwrap_or_else(|e| error_outcome(name, &e))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let field = match cli.field.as_deref().map(parse_field_flag).transpose() {
        Ok(f) => f,
        Err(e) => return finish(error_outcome("cartan-cover", &e), cli.format),
    };
    let mut opts = Options { field, ..Options::default() };
    let outcome = match &cli.command {
        Command::Classify { instance } => instance_command("classify", instance, &opts, cmd_classify),
        Command::CoverBuild { instance } => instance_command("cover-build", instance, &opts, cmd_cover_build),
        Command::Pushforward { instance } => instance_command("pushforward", instance, &opts, cmd_pushforward),
        Command::Factor { instance, max_degree } => {
            opts.max_degree = *max_degree;
            instance_command("factor", instance, &opts, cmd_factor)
        }
        Command::Selftest { seed, count } => {
            let mut cfg = SelfTestConfig::new(*seed, *count);
            if let Some(f) = field {
                cfg.fields = vec![f];
            }
            cmd_selftest(&cfg)
        }
    };
    finish(outcome, cli.format)
}

fn finish(outcome: Outcome, format: Format) -> ExitCode {
    let text = match format {
        Format::Human => outcome.report.to_human(),
        Format::Machine => outcome.report.to_machine(),
    };
    if outcome.exit.code() == 2 && matches!(format, Format::Human) {
        eprint!("{text}");
    } else {
        print!("{text}");
    }
    ExitCode::from(outcome.exit.code())
}
