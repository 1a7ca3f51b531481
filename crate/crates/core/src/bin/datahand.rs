use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use datahand::datastore::{generate_fixture, DatasetBuilder};
use datahand::interface::{load_dataset, parse_span, run_repl, serve, AppState};
use datahand::session::Session;
use datahand::timeparse::{DateRange, LocalDate, ReferenceFrame};

#[derive(Parser)]
#[command(
    name = "datahand",
    version,
    about = "Speech and touch exploration of personal health data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the CSV files in a data directory and report record counts.
    Ingest {
        #[arg(long)]
        data_dir: PathBuf,
    },
    /// Write a synthetic dataset as CSV files.
    Generate {
        /// Output directory.
        #[arg(long)]
        data_dir: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// START..END, default 2016-01-01 through the reference date.
        #[arg(long, value_parser = parse_span)]
        span: Option<DateRange>,
        #[arg(long)]
        ref_date: Option<LocalDate>,
    },
    /// Interactive session on stdin and stdout.
    Repl(Source),
    /// JSON-over-HTTP sessions.
    Serve {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
}

#[derive(Args)]
struct Source {
    /// Directory of CSV files; without it a fixture is generated.
    #[arg(long)]
    data_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_parser = parse_span)]
    span: Option<DateRange>,
    /// Anchor for relative time expressions; defaults to today.
    #[arg(long)]
    ref_date: Option<LocalDate>,
}

fn frame(ref_date: Option<LocalDate>) -> ReferenceFrame {
    ref_date.map_or_else(ReferenceFrame::today, ReferenceFrame::new)
}

fn default_span(span: Option<DateRange>, frame: &ReferenceFrame) -> Result<DateRange, String> {
    match span {
        Some(s) => Ok(s),
        None => {
            let start = LocalDate::from_ymd_opt(2016, 1, 1).expect("valid date");
            DateRange::new(start, frame.reference_date)
                .ok_or_else(|| "reference date is before 2016; pass --span".to_string())
        }
    }
}

fn session_source(src: Source) -> Result<(Arc<datahand::datastore::Dataset>, ReferenceFrame), ExitCode> {
    let frame = frame(src.ref_date);
    let span = default_span(src.span, &frame).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(1)
    })?;
    let ds = load_dataset(src.data_dir.as_deref(), src.seed, span).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })?;
    Ok((Arc::new(ds), frame))
}

fn run(cmd: Command) -> Result<(), ExitCode> {
    match cmd {
        Command::Ingest { data_dir } => {
            let (builder, reports) = DatasetBuilder::load_dir(&data_dir).map_err(|e| {
                eprintln!("error: {e}");
                ExitCode::from(2)
            })?;
            let ds = builder.seal();
            for (source, r) in reports {
                let span = ds
                    .coverage(source)
                    .map_or_else(|| "empty".to_string(), |c| c.to_string());
                println!(
                    "{:<19} {:>6} records, {} duplicates, {span}",
                    source.label(),
                    r.loaded,
                    r.duplicates
                );
            }
        }
        Command::Generate {
            data_dir,
            seed,
            span,
            ref_date,
        } => {
            let span = default_span(span, &frame(ref_date)).map_err(|e| {
                eprintln!("error: {e}");
                ExitCode::from(1)
            })?;
            generate_fixture(seed, span).write_dir(&data_dir).map_err(|e| {
                eprintln!("error: {}: {e}", data_dir.display());
                ExitCode::from(2)
            })?;
            println!("wrote {} (seed {seed}, {span})", data_dir.display());
        }
        Command::Repl(src) => {
            let (ds, frame) = session_source(src)?;
            let stdin = io::stdin().lock();
            let stdout = BufWriter::new(io::stdout().lock());
            run_repl(Session::new(ds, frame), stdin, stdout).map_err(|e| {
                eprintln!("error: {e}");
                ExitCode::from(2)
            })?;
        }
        Command::Serve { source, port } => {
            let (ds, frame) = session_source(source)?;
            let rt = tokio::runtime::Runtime::new().map_err(|e| {
                eprintln!("error: {e}");
                ExitCode::from(2)
            })?;
            rt.block_on(async {
                let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
                eprintln!("listening on http://{}", listener.local_addr()?);
                serve(listener, AppState::new(ds, frame)).await
            })
            .map_err(|e| {
                eprintln!("error: {e}");
                ExitCode::from(2)
            })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}
