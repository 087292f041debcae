use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde::Serialize;

use gr_cayley::analysis::Quantity;
use gr_cayley::cayley::{build_graph, export_edges, family_params, FamilyRow, GraphSpec};
use gr_cayley::report::{verify, Check};
use gr_cayley::ring::{make_ring, ModulusPoly, RingContext, RingDescriptor, RingParams};
use gr_cayley::spectrum::full_spectrum;
use gr_cayley::Error;

/// Family members up to this many vertices also get an observed λ(G).
const FAMILY_OBSERVE_MAX_N: u64 = 1 << 20;

#[derive(Parser)]
#[command(
    version,
    about = "Cayley graphs over Galois rings: spectra and claim checks"
)]
struct Cli {
    /// Caps the worker thread count.
    #[arg(long, global = true, env = "GRCAYLEY_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the ring descriptor (modulus, xi) and basic orders.
    RingInfo(Common),
    /// Write the edge list of the graph.
    GraphExport(Common),
    /// Compute the full spectrum.
    Spectrum(Common),
    /// Check the selected claims and write a JSON report.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Comma-separated checks, or "all".
        #[arg(long, default_value = "all")]
        checks: String,
    },
    /// Tabulate the sparse family for a rational density delta.
    Family {
        #[arg(long, default_value_t = 2)]
        p: u64,
        /// Rational in (0, 1/2], e.g. "1/2".
        #[arg(long)]
        delta: String,
        #[arg(long)]
        r_min: u32,
        #[arg(long)]
        r_max: u32,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    e: u32,
    #[arg(long)]
    r: u32,
    /// Element literal "a0,a1,..."; defaults to 1.
    #[arg(long)]
    gamma: Option<String>,
    /// Coefficients of the monic modulus, constant term first.
    #[arg(long)]
    modulus: Option<String>,
    /// Start offset for the modulus search.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Edgelist,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Edgelist => "edgelist",
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Integrity(_) | Error::Internal(_) => Failure::Runtime(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn pick_format(
    requested: Option<Format>,
    default: Format,
    allowed: &[Format],
) -> Result<Format, Failure> {
    let f = requested.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(Failure::Usage(format!(
            "format {} is not available for this command",
            f.name()
        )))
    }
}

fn open_sink(output: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    let mut sink = open_sink(output)?;
    sink.write_all(text.as_bytes())?;
    if !text.ends_with('\n') {
        sink.write_all(b"\n")?;
    }
    sink.flush()?;
    Ok(())
}

fn ring(common: &Common) -> Result<Arc<RingContext>, Failure> {
    let params = RingParams::new(common.p, common.e, common.r)?.with_seed(common.seed);
    let modulus = match &common.modulus {
        Some(s) => {
            let parsed: ModulusPoly = s.parse()?;
            Some(ModulusPoly::new(
                parsed.coeffs().to_vec(),
                params.char_modulus(),
            )?)
        }
        None => None,
    };
    Ok(Arc::new(make_ring(params, modulus)?))
}

fn graph(common: &Common) -> Result<GraphSpec, Failure> {
    let ctx = ring(common)?;
    let gamma = common
        .gamma
        .as_deref()
        .map(|g| ctx.parse_element(g))
        .transpose()?;
    Ok(build_graph(ctx, gamma)?)
}

#[derive(Serialize)]
struct RingInfo {
    #[serde(flatten)]
    descriptor: RingDescriptor,
    char_modulus: u64,
    order: u64,
    residue_order: u64,
    g1_order: usize,
    trace_table: bool,
}

#[derive(Serialize)]
struct FamilyLine {
    #[serde(flatten)]
    row: FamilyRow,
    observed_lambda: Option<Quantity>,
}

fn family(p: u64, delta: &str, r_min: u32, r_max: u32) -> Result<Vec<FamilyLine>, Failure> {
    let delta: Ratio<u64> = delta
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("cannot parse delta '{delta}'")))?;
    if *delta.numer() == 0 || delta > Ratio::new(1, 2) {
        return Err(Failure::Usage(format!(
            "delta = {delta} is outside (0, 1/2]"
        )));
    }
    let mut lines = Vec::new();
    for r in r_min..=r_max {
        let Ok(row) = family_params(p, delta, r) else {
            continue;
        };
        let observed_lambda = match row.n {
            Some(n) if n <= FAMILY_OBSERVE_MAX_N => {
                let ctx = Arc::new(make_ring(RingParams::new(p, row.e, r)?, None)?);
                let spectrum = full_spectrum(&build_graph(ctx, None)?)?;
                Some(match spectrum.lambda_g_exact() {
                    Some(l) => Quantity::Int(l),
                    None => Quantity::Real(spectrum.lambda_g().0),
                })
            }
            _ => None,
        };
        lines.push(FamilyLine {
            row,
            observed_lambda,
        });
    }
    if lines.is_empty() {
        return Err(Failure::Usage(format!(
            "no r in {r_min}..={r_max} has delta*r an integer >= 2"
        )));
    }
    Ok(lines)
}

fn family_csv(lines: &[FamilyLine]) -> String {
    let opt = |v: Option<u64>| v.map_or(String::new(), |v| v.to_string());
    let mut out = String::from("p,r,e,n_exponent,n,d,lambda_bound,observed_lambda\n");
    for l in lines {
        let row = &l.row;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            row.p,
            row.r,
            row.e,
            row.n_exponent,
            opt(row.n),
            opt(row.d),
            row.lambda_bound,
            l.observed_lambda.map_or(String::new(), |q| q.to_string())
        ));
    }
    out
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

/// Returns whether every asserted claim held.
fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::RingInfo(common) => {
            pick_format(common.format, Format::Json, &[Format::Json])?;
            let ctx = ring(&common)?;
            let info = RingInfo {
                descriptor: ctx.descriptor(),
                char_modulus: ctx.char_modulus(),
                order: ctx.order(),
                residue_order: ctx.params().residue_order(),
                g1_order: ctx.g1().len(),
                trace_table: ctx.has_trace_table(),
            };
            emit(&common.output, &to_json(&info))?;
        }
        Command::GraphExport(common) => {
            pick_format(common.format, Format::Edgelist, &[Format::Edgelist])?;
            let spec = graph(&common)?;
            let mut sink = open_sink(&common.output)?;
            export_edges(&spec, &mut sink)?;
            sink.flush()?;
        }
        Command::Spectrum(common) => {
            let format = pick_format(common.format, Format::Json, &[Format::Json, Format::Csv])?;
            let spectrum = full_spectrum(&graph(&common)?)?;
            let text = match format {
                Format::Csv => spectrum.to_csv(),
                _ => to_json(&spectrum),
            };
            emit(&common.output, &text)?;
        }
        Command::Verify { common, checks } => {
            pick_format(common.format, Format::Json, &[Format::Json])?;
            let checks = Check::parse_list(&checks)?;
            let report = verify(&graph(&common)?, &checks)?;
            emit(&common.output, &report.to_json())?;
            return Ok(report.passed());
        }
        Command::Family {
            p,
            delta,
            r_min,
            r_max,
            output,
            format,
        } => {
            let format = pick_format(format, Format::Json, &[Format::Json, Format::Csv])?;
            let lines = family(p, &delta, r_min, r_max)?;
            let text = match format {
                Format::Csv => family_csv(&lines),
                _ => to_json(&lines),
            };
            emit(&output, &text)?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
