use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use depthzero::packets::ComponentGroup;
use depthzero::sweep::{
    self, ClassSelector, Mode, OutputFormat, PacketSelector, SSelector, SweepConfig,
};
use depthzero::Error;

#[derive(Parser)]
#[command(
    name = "depthzero",
    version,
    about = "Character identities for depth-zero packets of SL2(Q_p)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the endoscopic (s1) or stable (1) identity on sampled elements.
    Verify(SweepArgs),
    /// Exhibit the contradictions of the published near-identity closed form.
    Falsify(SweepArgs),
    /// Check structural identities (f, transfer factor, psi0, Cayley, Kottwitz).
    Properties(SweepArgs),
    /// Print character tables and per-prime character values.
    Table(SweepArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated odd primes.
    #[arg(long, value_delimiter = ',', default_value = "3,5,7,11,13")]
    primes: Vec<u64>,
    /// Working precision N (elements are known mod p^N).
    #[arg(long, default_value_t = 8)]
    precision: u32,
    /// Samples per class and prime.
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// regular, regular:K or nonregular.
    #[arg(long, default_value = "nonregular")]
    packet: String,
    /// Level of the regular packet; same as --packet regular:K.
    #[arg(long)]
    level: Option<i64>,
    /// 1, s1, s2, s3 or all.
    #[arg(long, default_value = "s1")]
    s: String,
    /// near, far or both.
    #[arg(long, default_value = "both")]
    class: String,
    /// Largest v(b) for near samples; valuations cycle through 1..=MAX.
    #[arg(long, default_value_t = 3)]
    max_valuation: u32,
    /// jsonl, csv or table.
    #[arg(long, default_value = "jsonl")]
    format: String,
    /// Write reports here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SweepArgs {
    fn config(&self, mode: Mode) -> Result<SweepConfig, Error> {
        let packet = match self.level {
            Some(k) => PacketSelector::Regular(k),
            None => self.packet.parse()?,
        };
        let config = SweepConfig {
            mode,
            primes: self.primes.clone(),
            precision: self.precision,
            samples: self.samples,
            near_valuations: (1, self.max_valuation),
            packet,
            s: self.s.parse::<SSelector>()?,
            class: self.class.parse::<ClassSelector>()?,
            seed: self.seed,
            format: self.format.parse::<OutputFormat>()?,
        };
        config.validate()?;
        Ok(config)
    }

    fn sink(&self) -> io::Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

fn structure_tables() -> String {
    let mut text = String::new();
    for (name, group) in [
        ("Klein4", ComponentGroup::Klein4),
        ("Q8", ComponentGroup::Q8),
    ] {
        text.push_str(&format!("{name} character table\n"));
        for row in group.character_table() {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:>3}")).collect();
            text.push_str(&cells.join(""));
            text.push('\n');
        }
        text.push('\n');
    }
    text
}

enum Failure {
    Usage(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn run(command: Command) -> Result<i32, Failure> {
    let (args, mode) = match &command {
        Command::Verify(a) => (a, Mode::Verify),
        Command::Falsify(a) => (a, Mode::Falsify),
        Command::Properties(a) => (a, Mode::Properties),
        Command::Table(a) => (a, Mode::Verify),
    };
    let config = args.config(mode)?;
    let mut out = args.sink()?;

    if let Command::Table(_) = command {
        out.write_all(structure_tables().as_bytes())?;
        for &p in &config.primes {
            let text = sweep::character_value_table(&config, p)?;
            writeln!(out, "{text}")?;
        }
        out.flush()?;
        return Ok(0);
    }

    let outcome = sweep::run(&config)?;
    sweep::write_reports(&mut out, &outcome.reports, config.format)?;
    out.flush()?;
    if outcome.skipped > 0 {
        eprintln!("warning: {} checks skipped", outcome.skipped);
    }
    eprintln!("{}", outcome.summary());
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        // A closed pipe downstream (e.g. `| head`) is not an error.
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: cannot write output: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
