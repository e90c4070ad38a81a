use std::fmt::Display;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use superloewner::affine::null_conditions;
use superloewner::harness::{
    martingale_test, simulate, trace, trajectory_json, verify_annihilator, verify_virasoro, write_trace_csv,
    write_trajectory_csv, HarnessError, OutputFormat, RunConfig,
};

#[derive(Parser)]
#[command(name = "superloewner", version, about = "osp(1|2) Loewner flows: exact checks and Monte Carlo")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand)]
enum Command {
    /// Berezin projection of the annihilator on the vacuum.
    VerifyAnnihilator,
    /// Central charge, Virasoro relations and current primariness.
    VerifyVirasoro,
    /// Null-vector conditions of the annihilator candidate on a Verma top.
    NullScan,
    /// One sample path of the flow.
    Simulate,
    /// Monte Carlo 3-SE gate on the tracked observables.
    MartingaleTest,
    /// Approximate hull tip from pointwise Loewner evolution.
    Trace,
}

#[derive(Args)]
struct Opts {
    /// Plain `key = value` file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    k: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    kappa: Option<String>,
    /// Defaults to 2/(k+3/2).
    #[arg(long, global = true, allow_hyphen_values = true)]
    tau: Option<String>,
    /// H(0) eigenvalue of the top vector for null-scan.
    #[arg(long, global = true, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Series truncation order N.
    #[arg(long, global = true)]
    order: Option<String>,
    /// Module depth N_rep.
    #[arg(long, global = true)]
    depth: Option<String>,
    #[arg(long, global = true)]
    dt: Option<String>,
    #[arg(long = "t-max", global = true)]
    t_max: Option<String>,
    #[arg(long, global = true)]
    paths: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Comma-separated checkpoint times.
    #[arg(long, global = true)]
    checkpoints: Option<String>,
    /// `printed` or `group-consistent`.
    #[arg(long = "odd-system", global = true)]
    odd_system: Option<String>,
    /// `whole-bracket` or `literal`.
    #[arg(long, global = true)]
    dx12h: Option<String>,
    #[arg(long = "record-every", global = true)]
    record_every: Option<String>,
    #[arg(long = "grid-extent", global = true)]
    grid_extent: Option<String>,
    #[arg(long = "grid-points", global = true)]
    grid_points: Option<String>,
    #[arg(long, global = true)]
    out: Option<String>,
    #[arg(long, global = true, value_parser = ["csv", "json"])]
    format: Option<String>,
}

impl Opts {
    fn overrides(&self) -> Vec<(&'static str, &String)> {
        let pairs = [
            ("k", &self.k),
            ("kappa", &self.kappa),
            ("tau", &self.tau),
            ("lambda", &self.lambda),
            ("order", &self.order),
            ("depth", &self.depth),
            ("dt", &self.dt),
            ("t_max", &self.t_max),
            ("paths", &self.paths),
            ("seed", &self.seed),
            ("checkpoints", &self.checkpoints),
            ("odd_system", &self.odd_system),
            ("dx12h", &self.dx12h),
            ("record_every", &self.record_every),
            ("grid_extent", &self.grid_extent),
            ("grid_points", &self.grid_points),
            ("out", &self.out),
            ("format", &self.format),
        ];
        pairs.into_iter().filter_map(|(k, v)| v.as_ref().map(|v| (k, v))).collect()
    }

    fn config(&self, cmd: &Command) -> Result<RunConfig, String> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_file(p).map_err(|e| e.to_string())?,
            None => RunConfig::default(),
        };
        for (k, v) in self.overrides() {
            cfg.set(k, v).map_err(|e| e.to_string())?;
        }
        cfg.validate().map_err(|e| e.to_string())?;
        if matches!(cmd, Command::MartingaleTest) {
            cfg.check_checkpoints().map_err(|e| e.to_string())?;
        }
        Ok(cfg)
    }
}

enum Kind {
    Report,
    Data,
}

/// Writes to `--out` or stdout. Reports default to text on stdout and JSON in
/// files; data defaults to CSV.
fn emit(
    cfg: &RunConfig,
    kind: Kind,
    text: &dyn Display,
    json: impl FnOnce() -> serde_json::Value,
    csv: impl FnOnce(&mut dyn Write) -> Result<(), HarnessError>,
) -> Result<(), HarnessError> {
    let mut sink: Box<dyn Write> = match &cfg.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let format = cfg.format.or(match (&kind, &cfg.out) {
        (Kind::Data, _) => Some(OutputFormat::Csv),
        (Kind::Report, Some(_)) => Some(OutputFormat::Json),
        (Kind::Report, None) => None,
    });
    match format {
        Some(OutputFormat::Json) => writeln!(sink, "{}", serde_json::to_string_pretty(&json()).expect("json"))?,
        Some(OutputFormat::Csv) => csv(&mut *sink)?,
        None => writeln!(sink, "{text}")?,
    }
    sink.flush()?;
    drop(sink);
    if cfg.out.is_some() && matches!(kind, Kind::Report) {
        println!("{text}");
    }
    Ok(())
}

fn csv_rows<T: Serialize>(rows: &[T], w: &mut dyn Write) -> Result<(), HarnessError> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct LineRow<'a> {
    name: &'a str,
    pass: bool,
}

fn run(cmd: &Command, cfg: &RunConfig) -> Result<bool, HarnessError> {
    match cmd {
        Command::VerifyAnnihilator | Command::VerifyVirasoro => {
            let report = match cmd {
                Command::VerifyAnnihilator => {
                    verify_annihilator(&cfg.k_exact(), &cfg.kappa_exact(), &cfg.tau_value(), cfg.depth)?
                }
                _ => verify_virasoro(&cfg.k_exact())?,
            };
            let rows: Vec<LineRow> = report.lines.iter().map(|l| LineRow { name: &l.name, pass: l.pass }).collect();
            emit(cfg, Kind::Report, &report, || serde_json::to_value(&report).expect("json"), |w| csv_rows(&rows, w))?;
            Ok(report.pass)
        }
        Command::NullScan => {
            let report = null_conditions(&cfg.k_exact(), &cfg.lambda_exact(), &cfg.kappa_exact(), &cfg.tau_value())?;
            let json = report.to_json();
            let mut text = format!(
                "k = {}, lambda = {}, kappa = {}, tau = {}\n",
                report.level, report.lambda, report.kappa, report.tau
            );
            for r in &report.residuals {
                text += &format!("{:>5} {:?}: {}\n", r.symbol.name(), r.kind, r.vector);
            }
            text += &format!("null-scan: {}", if report.is_null() { "null vector" } else { "FAIL (not null)" });
            #[derive(Serialize)]
            struct Row {
                symbol: &'static str,
                kind: String,
                monomial: String,
                coeff: String,
            }
            let rows: Vec<Row> = report
                .residuals
                .iter()
                .flat_map(|r| {
                    r.vector.terms().map(move |(m, c)| Row {
                        symbol: r.symbol.name(),
                        kind: format!("{:?}", r.kind),
                        monomial: m.iter().map(|x| x.to_string()).collect(),
                        coeff: c.to_string(),
                    })
                })
                .collect();
            emit(cfg, Kind::Report, &text, || json, |w| csv_rows(&rows, w))?;
            Ok(report.is_null())
        }
        Command::Simulate => {
            let traj = simulate(cfg)?;
            let summary = format!("{} records of path 0", traj.records.len());
            emit(cfg, Kind::Data, &summary, || trajectory_json(&traj), |w| write_trajectory_csv(&traj, w))?;
            Ok(true)
        }
        Command::MartingaleTest => {
            let report = martingale_test(cfg)?;
            emit(cfg, Kind::Report, &report, || report.to_json(), |w| csv_rows(&report.cells, w))?;
            Ok(report.all_pass())
        }
        Command::Trace => {
            let points = trace(cfg)?;
            let summary = format!("{} trace points", points.len());
            emit(cfg, Kind::Data, &summary, || serde_json::json!(points), |w| write_trace_csv(&points, w))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let cfg = match cli.opts.config(&cli.command) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match run(&cli.command, &cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
