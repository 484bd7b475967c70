//! Command-line front end: train, evaluate, forecast, inspect.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
//! Set `SSAE_LOG={error,info,debug}` for progress logging on stderr.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ssae_core::checkpoint::{load_model, save_model};
use ssae_core::config::RunConfig;
use ssae_core::dataio::{load_csv, synth_generate, write_csv, SynthConfig};
use ssae_core::eval::{
    aggregate_reports, mc_dropout, vip_retrain, MetricReport, UncertaintyBands,
};
use ssae_core::gradcheck::{standard_sweep, DEFAULT_EPS, DEFAULT_TOLERANCE};
use ssae_core::linalg::Mat;
use ssae_core::pipeline::{evaluate_model, test_windows, train_run};
use ssae_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "ssae",
    version,
    about = "Seasonal dual-branch LSTM forecaster for daily precipitation"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model and write a checkpoint plus an epoch history file.
    Train {
        /// Daily series CSV (date, features..., precip).
        #[arg(long)]
        data: PathBuf,
        /// Run configuration JSON.
        #[arg(long)]
        config: PathBuf,
        /// Checkpoint output path; the history lands next to it.
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config's training seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Score a checkpoint on held-out data, or merge per-run reports.
    Evaluate {
        #[arg(long, required_unless_present = "aggregate", conflicts_with = "aggregate")]
        model: Option<PathBuf>,
        #[arg(long, required_unless_present = "aggregate", conflicts_with = "aggregate")]
        data: Option<PathBuf>,
        /// First forecast date of the test slice (YYYY-MM-DD).
        #[arg(long, required_unless_present = "aggregate", conflicts_with = "aggregate")]
        test_start: Option<NaiveDate>,
        /// Merge previously written report files into mean/stddev form.
        #[arg(long, num_args = 1..)]
        aggregate: Option<Vec<PathBuf>>,
        /// Report output path.
        #[arg(long)]
        report: PathBuf,
    },
    /// Forecast the next horizon days from the newest window in the data.
    Forecast {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Clamp negative precipitation forecasts to zero.
        #[arg(long)]
        clamp_nonneg: bool,
        #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
        format: OutFormat,
    },
    /// Permutation importance of one input column (retraining protocol).
    Vip {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Input column to permute.
        #[arg(long)]
        feature: String,
        #[arg(long, default_value_t = 10)]
        repeats: usize,
        #[arg(long)]
        report: PathBuf,
    },
    /// Dropout-resampled forecast bands over every window in the data.
    Uncertainty {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Dropout probability for resampling.
        #[arg(long, default_value_t = 0.25)]
        p: f64,
        #[arg(long, default_value_t = 50)]
        runs: usize,
        /// Central interval levels, comma-separated (e.g. 0.75,0.95).
        #[arg(long, value_delimiter = ',', default_values_t = [0.75, 0.95])]
        levels: Vec<f64>,
        #[arg(long)]
        report: PathBuf,
    },
    /// Generate a deterministic synthetic daily series.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2000)]
        days: usize,
        #[arg(long, default_value_t = 365)]
        period: usize,
        #[arg(long, default_value_t = 3)]
        n_features: usize,
        #[arg(long, default_value_t = 1.0)]
        noise_scale: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Verify analytic gradients against finite differences.
    Gradcheck {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("SSAE_LOG")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Train {
            data,
            config,
            out,
            seed,
        } => cmd_train(&data, &config, &out, seed),
        Command::Evaluate {
            model,
            data,
            test_start,
            aggregate,
            report,
        } => match aggregate {
            Some(files) => cmd_aggregate(&files, &report),
            None => cmd_evaluate(
                &model.expect("clap enforces presence"),
                &data.expect("clap enforces presence"),
                test_start.expect("clap enforces presence"),
                &report,
            ),
        },
        Command::Forecast {
            model,
            data,
            clamp_nonneg,
            format,
        } => cmd_forecast(&model, &data, clamp_nonneg, format),
        Command::Vip {
            config,
            data,
            feature,
            repeats,
            report,
        } => cmd_vip(&config, &data, &feature, repeats, &report),
        Command::Uncertainty {
            model,
            data,
            p,
            runs,
            levels,
            report,
        } => cmd_uncertainty(&model, &data, p, runs, &levels, &report),
        Command::Synth {
            out,
            days,
            period,
            n_features,
            noise_scale,
            seed,
        } => cmd_synth(&out, days, period, n_features, noise_scale, seed),
        Command::Gradcheck { seed, eps } => cmd_gradcheck(seed, eps),
    }
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn read_data(path: &Path) -> Result<ssae_core::dataio::SeriesTable> {
    load_csv(path)
}

fn history_path(out: &Path) -> PathBuf {
    out.with_extension("history.json")
}

fn cmd_train(data: &Path, config: &Path, out: &Path, seed: Option<u64>) -> Result<()> {
    let mut cfg = RunConfig::from_json_file(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let table = read_data(data)?;
    let (model, history) = train_run(&cfg, &table)?;
    save_model(&model, cfg.seed, out)?;
    write_json(&history, &history_path(out))?;

    for e in &history.epochs {
        match e.val_mse {
            Some(v) => println!(
                "epoch {:>3}  train {:.6}  val {:.6}  lr {:.3e}",
                e.epoch, e.train_loss, v, e.lr
            ),
            None => println!("epoch {:>3}  train {:.6}  lr {:.3e}", e.epoch, e.train_loss, e.lr),
        }
    }
    if let Some(best) = history.best_epoch {
        println!("best epoch: {best}");
    }
    println!(
        "saved {} ({} parameters) and {}",
        out.display(),
        model.count_parameters(),
        history_path(out).display()
    );
    Ok(())
}

fn cmd_evaluate(model: &Path, data: &Path, test_start: NaiveDate, report: &Path) -> Result<()> {
    let (model, _) = load_model(model)?;
    let table = read_data(data)?;
    let metrics = evaluate_model(&model, &table, test_start)?;
    write_json(&metrics, report)?;
    println!("n_test: {}", metrics.n_test);
    for h in &metrics.per_horizon {
        match h.corr {
            Some(c) => println!("day {}: rmse {:.4} mm, corr {:.4}", h.step, h.rmse, c),
            None => println!("day {}: rmse {:.4} mm, corr undefined", h.step, h.rmse),
        }
    }
    println!("wrote {}", report.display());
    Ok(())
}

fn cmd_aggregate(files: &[PathBuf], report: &Path) -> Result<()> {
    let mut reports = Vec::with_capacity(files.len());
    for f in files {
        let text = std::fs::read_to_string(f)
            .map_err(|e| Error::data(format!("cannot read report {}: {e}", f.display())))?;
        let r: MetricReport = serde_json::from_str(&text)?;
        reports.push(r);
    }
    let merged = aggregate_reports(&reports)?;
    write_json(&merged, report)?;
    println!("merged {} reports into {}", merged.n_reports, report.display());
    for h in &merged.per_horizon {
        match (h.rmse_std, h.corr_mean) {
            (Some(s), Some(c)) => println!(
                "day {}: rmse {:.4} ± {:.4} mm, corr {:.4} (n={})",
                h.step, h.rmse_mean, s, c, h.corr_n
            ),
            _ => println!("day {}: rmse {:.4} mm", h.step, h.rmse_mean),
        }
    }
    Ok(())
}

fn cmd_forecast(model: &Path, data: &Path, clamp: bool, format: OutFormat) -> Result<()> {
    let (model, _) = load_model(model)?;
    let table = read_data(data)?;
    let t = model.lookback();
    if table.n_rows() < t {
        return Err(Error::data(format!(
            "forecasting needs at least {t} trailing rows, the data has {}",
            table.n_rows()
        )));
    }
    let start = table.n_rows() - t;
    let mut x = Mat::zeros(t, table.input_dim());
    for i in 0..t {
        for j in 0..table.input_dim() {
            *x.at_mut(i, j) = table.input_value(start + i, j);
        }
    }
    let values = model.predict_raw_units(&x, clamp)?;
    let last = *table.dates().last().expect("nonempty table");
    let dates: Vec<NaiveDate> = (1..=values.len() as u64)
        .map(|k| last + chrono::Days::new(k))
        .collect();

    match format {
        OutFormat::Csv => {
            println!("date,precip_mm");
            // `{}` on f64 prints the shortest round-trip form, so the CSV
            // and JSON outputs carry identical numbers.
            for (d, v) in dates.iter().zip(&values) {
                println!("{d},{v}");
            }
        }
        OutFormat::Json => {
            #[derive(Serialize)]
            struct Row {
                date: NaiveDate,
                precip_mm: f64,
            }
            let rows: Vec<Row> = dates
                .iter()
                .zip(&values)
                .map(|(&date, &precip_mm)| Row { date, precip_mm })
                .collect();
            println!("{}", serde_json::to_string_pretty(&rows)?);
        }
    }
    Ok(())
}

fn cmd_vip(config: &Path, data: &Path, feature: &str, repeats: usize, report: &Path) -> Result<()> {
    let cfg = RunConfig::from_json_file(config)?;
    let table = read_data(data)?;
    let vip = vip_retrain(&cfg, &table, feature, repeats)?;
    write_json(&vip, report)?;
    println!(
        "feature {}: baseline rmse {:.4} mm, vip_rmse {:+.4} over {} repeats",
        vip.feature, vip.baseline_rmse, vip.vip_rmse, vip.repetitions
    );
    if let Some(vc) = vip.vip_corr {
        println!("vip_corr {vc:+.4}");
    }
    println!("wrote {}", report.display());
    Ok(())
}

fn cmd_uncertainty(
    model: &Path,
    data: &Path,
    p: f64,
    runs: usize,
    levels: &[f64],
    report: &Path,
) -> Result<()> {
    let (model, seed) = load_model(model)?;
    let table = read_data(data)?;
    let first_forecast = table
        .dates()
        .get(model.lookback())
        .copied()
        .ok_or_else(|| {
            Error::data(format!(
                "uncertainty needs more than {} rows, the data has {}",
                model.lookback(),
                table.n_rows()
            ))
        })?;
    let windows = test_windows(&model, &table, first_forecast)?;
    let bands: UncertaintyBands = mc_dropout(&model, &windows, p, runs, levels, seed)?;
    write_json(&bands, report)?;
    println!(
        "{} windows × {} runs at p={p}; levels {:?}",
        bands.windows.len(),
        bands.n_runs,
        bands.levels
    );
    println!("wrote {}", report.display());
    Ok(())
}

fn cmd_synth(
    out: &Path,
    days: usize,
    period: usize,
    n_features: usize,
    noise_scale: f64,
    seed: u64,
) -> Result<()> {
    let table = synth_generate(&SynthConfig {
        days,
        period,
        n_features,
        seed,
        noise_scale,
    })?;
    write_csv(&table, out)?;
    println!(
        "wrote {} rows × {} features to {}",
        table.n_rows(),
        table.n_features(),
        out.display()
    );
    Ok(())
}

fn cmd_gradcheck(seed: u64, eps: f64) -> Result<()> {
    let reports = standard_sweep(seed, eps, DEFAULT_TOLERANCE)?;
    let mut failures = Vec::new();
    for r in &reports {
        println!("{}: worst relative error {:.3e}", r.label, r.worst());
        for c in r.offenders() {
            failures.push(format!("{}/{} ({:.3e})", r.label, c.name, c.max_rel_err));
        }
    }
    if failures.is_empty() {
        println!("all gradients match finite differences within {DEFAULT_TOLERANCE:.0e}");
        Ok(())
    } else {
        Err(Error::numeric(format!(
            "gradient mismatch in: {}",
            failures.join(", ")
        )))
    }
}
