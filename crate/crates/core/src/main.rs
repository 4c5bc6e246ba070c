use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dualab::report::{run, Bounds, Command};
use dualab::table::Window;

/// Exact homological algebra over presented graded-commutative algebras.
#[derive(Parser, Debug)]
#[command(name = "dualab", version)]
struct Cli {
    /// hilbert, resolve, ext, smallness, localcoh, e2, gorenstein, matlisdual, pd, lct, bartor or liftwitness
    command: String,
    /// Presentation file.
    file: PathBuf,
    /// Internal-degree window as LO:HI.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_window)]
    window: Option<Window>,
    /// Largest homological degree.
    #[arg(long)]
    smax: Option<usize>,
    /// Largest bar weight.
    #[arg(long)]
    wmax: Option<usize>,
    /// Emit JSON (the default).
    #[arg(long, conflicts_with = "table")]
    json: bool,
    /// Emit plain-text tables.
    #[arg(long)]
    table: bool,
    /// Show the homological (negated) grading in text output.
    #[arg(long)]
    paper_grading: bool,
    /// Koszul-dual presentation, for liftwitness.
    #[arg(long)]
    dual: Option<PathBuf>,
}

fn parse_window(s: &str) -> Result<Window, String> {
    let (lo, hi) = s.split_once(':').ok_or("expected LO:HI")?;
    let lo: i32 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: i32 = hi.trim().parse().map_err(|e| format!("{e}"))?;
    if lo > hi {
        return Err(format!("empty window {lo}:{hi}"));
    }
    Ok(Window::new(lo, hi))
}

fn configure_threads() {
    if let Some(n) = std::env::var("DUALAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn read(path: &PathBuf) -> Result<String, ExitCode> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("dualab: {}: {e}", path.display());
        ExitCode::from(1)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let command: Command = match cli.command.parse() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("dualab: {e}");
            return ExitCode::from(2);
        }
    };
    let text = match read(&cli.file) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let dual = match cli.dual.as_ref().map(read).transpose() {
        Ok(d) => d,
        Err(code) => return code,
    };
    let bounds = Bounds {
        window: cli.window,
        s_max: cli.smax,
        w_max: cli.wmax,
    };
    match run(command, &text, dual.as_deref(), &bounds) {
        Ok(report) => {
            if cli.table {
                print!("{}", report.to_text(cli.paper_grading));
            } else {
                print!("{}", report.to_json());
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("dualab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
