//! `bsglab`: batch front end for bit-search generator analysis.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 domain error,
//! 4 statistical test failure.

mod manifest;

use std::fmt::Write as _;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use bsglab::exact_stats::{self, PmfTable};
use bsglab::generators::{absg_direct, bsg_direct, run_a};
use bsglab::montecarlo::{self, ChiSquare, GeneratorKind, SimConfig};
use bsglab::period_analysis::{full_report_with, ClassReport, ReportOptions, DEFAULT_CLASS_CEILING};
use bsglab::{lfsr, BitSeq, LfsrConfig, Polynomial};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use manifest::{embed, RunManifest, Sink};

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Usage(String),
    Domain(bsglab::Error),
    Statistical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Statistical(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(e) => write!(f, "{e}"),
            CliError::Statistical(m) => write!(f, "statistical test failed: {m}"),
        }
    }
}

impl From<bsglab::Error> for CliError {
    fn from(e: bsglab::Error) -> Self {
        CliError::Domain(e)
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "bsglab", version, about = "Bit-search generator analysis")]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print LFSR output bits.
    Generate(GenerateArgs),
    /// Run BSG or ABSG over an input bit stream.
    Keystream(KeystreamArgs),
    /// Shift-class structure of m-sequences.
    Classify(ClassifyArgs),
    /// Exact distribution of the output length.
    Pmf(PmfArgs),
    /// Monte Carlo estimate of the output-length distribution.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
struct LfsrArgs {
    /// Feedback polynomial, `x^3+x+1` or `3,1,0`.
    #[arg(long)]
    poly: Option<Polynomial>,
    /// Initial register contents `s_0 s_1 ...` (default `10...0`).
    #[arg(long, requires = "poly")]
    state: Option<BitSeq>,
}

impl LfsrArgs {
    fn config(&self) -> CliResult<Option<LfsrConfig>> {
        let Some(poly) = self.poly.clone() else {
            return Ok(None);
        };
        Ok(Some(match &self.state {
            Some(s) => LfsrConfig::new(poly, s.clone())?,
            None => LfsrConfig::canonical(poly)?,
        }))
    }

    fn params(&self) -> serde_json::Value {
        json!({
            "poly": self.poly.as_ref().map(|p| p.tap_list()),
            "state": self.state.as_ref().map(|s| s.to_string()),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BitFormat {
    Bits,
    Csv,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[command(flatten)]
    lfsr: LfsrArgs,
    /// Number of output bits.
    #[arg(short = 'n', long = "length")]
    n: usize,
    #[arg(long, value_enum, default_value_t = BitFormat::Bits)]
    format: BitFormat,
    /// Output file (`-` for stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Gen {
    Bsg,
    Absg,
}

#[derive(Args, Debug)]
struct KeystreamArgs {
    #[arg(long = "gen", value_enum)]
    generator: Gen,
    /// Input bit file, `-` for stdin. Whitespace and commas are ignored.
    #[arg(long, conflicts_with_all = ["bits", "poly"])]
    input: Option<PathBuf>,
    /// Input bits given inline.
    #[arg(long, conflicts_with = "poly")]
    bits: Option<BitSeq>,
    #[command(flatten)]
    lfsr: LfsrArgs,
    /// Input length when the input comes from an LFSR.
    #[arg(short = 'n', long = "length", requires = "poly")]
    n: Option<usize>,
    /// Also print the state sequence, `-` marking the empty state.
    #[arg(long)]
    show_states: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(id = "fmt", multiple = false)]
struct FormatArgs {
    #[arg(long)]
    json: bool,
    #[arg(long)]
    csv: bool,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[command(flatten)]
    lfsr: LfsrArgs,
    /// Sweep every primitive polynomial of `--degree`.
    #[arg(long, requires = "degree", conflicts_with = "poly")]
    all_primitive: bool,
    #[arg(long, requires = "all_primitive")]
    degree: Option<u32>,
    /// Derive the classes from one reference shift instead of simulating all.
    #[arg(long)]
    fast: bool,
    /// Largest degree accepted.
    #[arg(long, default_value_t = DEFAULT_CLASS_CEILING)]
    ceiling: u32,
    #[command(flatten)]
    format: FormatArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PmfArgs {
    /// Input length.
    #[arg(short = 'N')]
    n: usize,
    /// Add the binned normal approximation per row.
    #[arg(long)]
    compare_gaussian: bool,
    /// Add KL divergence and cdf distance to the normal limit (JSON only).
    #[arg(long, conflicts_with = "csv")]
    kl: bool,
    #[command(flatten)]
    format: FormatArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SimGen {
    StateOnly,
    Bsg,
    Absg,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(short = 'N')]
    n: usize,
    #[arg(long)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "gen", value_enum, default_value_t = SimGen::StateOnly)]
    generator: SimGen,
    /// Probability of a one input bit.
    #[arg(long, default_value_t = 0.5)]
    bias: f64,
    /// Run a chi-square test against the exact law.
    #[arg(long)]
    chi2: bool,
    /// Confidence level of the chi-square test.
    #[arg(long, default_value_t = 0.999)]
    level: f64,
    #[command(flatten)]
    format: FormatArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn csv_string<I, R>(header: &[&str], rows: I) -> CliResult<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Io(format!("csv: {e}"));
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn cmd_generate(a: &GenerateArgs) -> CliResult<()> {
    let config = a
        .lfsr
        .config()?
        .ok_or_else(|| CliError::Usage("generate needs --poly".into()))?;
    let bits = lfsr::generate(&config, a.n);
    let body = match a.format {
        BitFormat::Bits => format!("{bits}\n"),
        BitFormat::Csv => csv_string(
            &["i", "bit"],
            bits.iter().enumerate().map(|(i, b)| [i.to_string(), b.to_string()]),
        )?,
    };
    let mut params = a.lfsr.params();
    params["state"] = json!(config.initial_state().to_string());
    params["n"] = json!(a.n);
    params["format"] = json!(format!("{:?}", a.format).to_lowercase());
    let m = RunManifest::new("generate", params, &a.out);
    Sink::from_arg(&a.out).emit(&body, &m, false)
}

fn read_input(path: &PathBuf) -> CliResult<BitSeq> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::Io(format!("stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(text.parse()?)
}

fn cmd_keystream(a: &KeystreamArgs) -> CliResult<()> {
    let (x, source) = if let Some(config) = a.lfsr.config()? {
        let n = a
            .n
            .ok_or_else(|| CliError::Usage("--poly input needs -n".into()))?;
        (lfsr::generate(&config, n), json!({"lfsr": a.lfsr.params(), "n": n}))
    } else if let Some(bits) = &a.bits {
        (bits.clone(), json!({"bits": bits.to_string()}))
    } else {
        let path = a.input.clone().unwrap_or_else(|| PathBuf::from("-"));
        (read_input(&path)?, json!({"input": path.display().to_string()}))
    };
    let z = match a.generator {
        Gen::Bsg => bsg_direct(&x),
        Gen::Absg => absg_direct(&x),
    };
    let mut body = String::new();
    if !z.is_empty() || a.show_states {
        writeln!(body, "{z}").expect("string write");
    }
    if a.show_states {
        writeln!(body, "{}", run_a(&x)).expect("string write");
    }
    let params = json!({
        "gen": format!("{:?}", a.generator).to_lowercase(),
        "source": source,
        "show_states": a.show_states,
    });
    let m = RunManifest::new("keystream", params, &a.out);
    Sink::from_arg(&a.out).emit(&body, &m, false)
}

#[derive(Serialize)]
struct ClassifyOutput<'a> {
    reports: &'a [ClassReport],
}

fn cmd_classify(a: &ClassifyArgs) -> CliResult<()> {
    let opts = ReportOptions {
        ceiling: a.ceiling,
        exhaustive: !a.fast,
    };
    let reports = if a.all_primitive {
        let l = a.degree.expect("required by clap");
        if l > a.ceiling {
            return Err(bsglab::Error::DegreeTooLarge {
                degree: l,
                ceiling: a.ceiling,
            }
            .into());
        }
        lfsr::enumerate_primitive(l)?
            .into_par_iter()
            .map(|p| full_report_with(&LfsrConfig::canonical(p)?, &opts))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        let config = a
            .lfsr
            .config()?
            .ok_or_else(|| CliError::Usage("classify needs --poly or --all-primitive".into()))?;
        vec![full_report_with(&config, &opts)?]
    };
    let mut params = a.lfsr.params();
    params["all_primitive"] = json!(a.all_primitive);
    params["degree"] = json!(a.degree);
    params["fast"] = json!(a.fast);
    params["ceiling"] = json!(a.ceiling);
    params["format"] = json!(if a.format.csv { "csv" } else { "json" });
    let m = RunManifest::new("classify", params, &a.out);
    let sink = Sink::from_arg(&a.out);
    if a.format.csv {
        let body = csv_string(&ClassReport::CSV_HEADER, reports.iter().map(|r| r.csv_record()))?;
        sink.emit(&body, &m, false)
    } else {
        sink.emit(&embed(&m, &ClassifyOutput { reports: &reports }), &m, true)
    }
}

#[derive(Serialize)]
struct PmfRow {
    k: usize,
    probability: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    gaussian: Option<f64>,
}

#[derive(Serialize)]
struct PmfOutput {
    #[serde(rename = "N")]
    n: usize,
    mean: f64,
    var: f64,
    gaussian_mean: f64,
    gaussian_var: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    kl: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cdf_sup_distance: Option<f64>,
    rows: Vec<PmfRow>,
}

fn pmf_rows(pmf: &PmfTable, gaussian: bool) -> Vec<PmfRow> {
    let g = gaussian.then(|| exact_stats::binned_gaussian(pmf.n()));
    pmf.probs_f64()
        .into_iter()
        .enumerate()
        .map(|(k, probability)| PmfRow {
            k,
            probability,
            gaussian: g.as_ref().map(|g| g[k]),
        })
        .collect()
}

fn cmd_pmf(a: &PmfArgs) -> CliResult<()> {
    let pmf = exact_stats::pmf_h(a.n)?;
    let json_out = a.format.json || a.kl;
    let params = json!({
        "N": a.n,
        "compare_gaussian": a.compare_gaussian,
        "kl": a.kl,
        "format": if json_out { "json" } else { "csv" },
    });
    let m = RunManifest::new("pmf", params, &a.out);
    let rows = pmf_rows(&pmf, a.compare_gaussian);
    let sink = Sink::from_arg(&a.out);
    if !json_out {
        let mut header = vec!["k", "probability"];
        if a.compare_gaussian {
            header.push("gaussian");
        }
        let body = csv_string(
            &header,
            rows.iter().map(|r| {
                let mut rec = vec![r.k.to_string(), r.probability.to_string()];
                rec.extend(r.gaussian.map(|g| g.to_string()));
                rec
            }),
        )?;
        return sink.emit(&body, &m, false);
    }
    let (kl, cdf) = if a.kl && a.n >= 2 {
        (
            Some(exact_stats::kl_exact_vs_gaussian(a.n)?),
            Some(exact_stats::cdf_sup_distance(a.n)?),
        )
    } else {
        (None, None)
    };
    let out = PmfOutput {
        n: a.n,
        mean: exact_stats::to_f64(&pmf.mean_exact()),
        var: exact_stats::to_f64(&pmf.variance_exact()),
        gaussian_mean: pmf.gaussian_mean(),
        gaussian_var: pmf.gaussian_var(),
        kl,
        cdf_sup_distance: cdf,
        rows,
    };
    sink.emit(&embed(&m, &out), &m, true)
}

#[derive(Serialize)]
struct ChiSquareOutput {
    statistic: f64,
    dof: usize,
    bins: usize,
    level: f64,
    critical_value: f64,
    p_value: f64,
    verdict: &'static str,
}

#[derive(Serialize)]
struct SimRow {
    k: usize,
    count: u64,
    empirical: f64,
    exact: f64,
}

#[derive(Serialize)]
struct SimulateOutput {
    config: SimConfig,
    mean: f64,
    var: f64,
    mean_rate: f64,
    rate_std_error: f64,
    exact_mean: f64,
    exact_rate: f64,
    rows: Vec<SimRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    chi2: Option<ChiSquareOutput>,
}

fn cmd_simulate(a: &SimulateArgs) -> CliResult<()> {
    if !(a.level > 0.0 && a.level < 1.0) {
        return Err(CliError::Usage(format!("--level must lie in (0, 1), got {}", a.level)));
    }
    let generator = match a.generator {
        SimGen::StateOnly => GeneratorKind::StateOnly,
        SimGen::Bsg => GeneratorKind::Bsg,
        SimGen::Absg => GeneratorKind::Absg,
    };
    let config = SimConfig::new(a.n, a.trials, a.seed)?
        .with_generator(generator)
        .with_bias(a.bias)?;
    let emp = montecarlo::simulate(&config)?;
    let pmf = exact_stats::pmf_h(a.n)?;
    let exact = pmf.probs_f64();
    let chi2 = if a.chi2 {
        let c: ChiSquare = montecarlo::chi_square_gof(&emp, &pmf)?;
        let crit = c.critical_value(a.level)?;
        Some(ChiSquareOutput {
            statistic: c.statistic,
            dof: c.dof,
            bins: c.bins,
            level: a.level,
            critical_value: crit,
            p_value: c.p_value()?,
            verdict: if c.statistic <= crit { "PASS" } else { "FAIL" },
        })
    } else {
        None
    };
    let params = json!({
        "N": a.n,
        "trials": a.trials,
        "gen": generator.as_str(),
        "bias": a.bias,
        "chi2": a.chi2,
        "level": a.level,
        "format": if a.format.csv { "csv" } else { "json" },
    });
    let m = RunManifest::new("simulate", params, &a.out).with_seed(a.seed);
    let rows: Vec<SimRow> = emp
        .counts
        .iter()
        .enumerate()
        .map(|(k, &count)| SimRow {
            k,
            count,
            empirical: emp.prob(k),
            exact: exact[k],
        })
        .collect();
    let verdict = chi2.as_ref().map(|c| (c.verdict, c.statistic, c.critical_value, c.dof));
    let sink = Sink::from_arg(&a.out);
    if a.format.csv {
        let body = csv_string(
            &["k", "count", "empirical", "exact"],
            rows.iter().map(|r| {
                [
                    r.k.to_string(),
                    r.count.to_string(),
                    r.empirical.to_string(),
                    r.exact.to_string(),
                ]
            }),
        )?;
        sink.emit(&body, &m, false)?;
        if let Some((v, s, c, d)) = verdict {
            eprintln!("chi2: statistic={s} dof={d} critical={c} verdict={v}");
        }
    } else {
        let out = SimulateOutput {
            mean: emp.mean(),
            var: emp.variance(),
            mean_rate: emp.mean_rate(),
            rate_std_error: emp.rate_std_error(),
            exact_mean: exact_stats::mean_h_f64(a.n as u64),
            exact_rate: exact_stats::rate_f64(a.n as u64),
            config,
            rows,
            chi2,
        };
        sink.emit(&embed(&m, &out), &m, true)?;
    }
    match verdict {
        Some(("FAIL", s, c, d)) => Err(CliError::Statistical(format!(
            "chi-square statistic {s} exceeds the critical value {c} ({d} dof)"
        ))),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Keystream(a) => cmd_keystream(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Pmf(a) => cmd_pmf(a),
        Command::Simulate(a) => cmd_simulate(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bsglab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
