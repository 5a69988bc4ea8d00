use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;

use regsir_core::fitting::{
    fit, load_incidence, FitOptions, FitProblem, FitResult, FitTarget, LossSpace, SeriesFormat,
};
use regsir_core::Error;

use super::Outputs;
use crate::error::CliError;
use crate::output::{fmt_f64, json_bytes};
use crate::Context;

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV with `date` and `cases` columns.
    #[arg(long)]
    data: PathBuf,
    /// The `cases` column holds running totals.
    #[arg(long)]
    cumulative: bool,
}

#[derive(Debug, Serialize)]
struct FitReport<'a> {
    region: &'a str,
    s_tilde: f64,
    window: (usize, usize),
    first_date: String,
    loss_space: LossSpace,
    target: FitTarget,
    seeds: usize,
    seed: u64,
    result: &'a FitResult,
}

/// `<stem>_curve.csv` next to the result file.
fn curve_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map_or_else(|| "fit".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}_curve.csv"))
}

pub fn run(ctx: &Context, args: &FitArgs) -> Result<Outputs, CliError> {
    let cfg = &ctx.config;
    let fc = &cfg.fit;
    let format = if args.cumulative {
        SeriesFormat::Cumulative
    } else {
        SeriesFormat::Daily
    };
    let mut data = load_incidence(&args.data, format).map_err(|e| match e {
        Error::Io(io) => CliError::Invalid(format!("{}: {io}", args.data.display())),
        other => other.into(),
    })?;
    if let Some(n) = cfg.population {
        data = data.with_population(n);
    }
    data.resmooth(fc.smoothing_window)?;
    let s_tilde = cfg
        .s_tilde
        .or(cfg.population.map(|n| cfg.epsilon() * n))
        .ok_or_else(|| {
            CliError::Invalid("fitting needs `s_tilde` or `population` in --params".into())
        })?;

    let mut problem = FitProblem::new(data, s_tilde)?;
    if let Some([a, b]) = fc.window {
        problem = problem.with_window(a, b)?;
    }
    if let Some(bounds) = fc.bounds {
        problem.bounds = bounds;
    }
    problem.loss_space = fc.loss_space;
    problem.target = fc.target;
    problem.initial_guess = fc.initial_guess;
    problem.validate()?;

    let options = FitOptions {
        seeds: fc.seeds,
        seed: ctx.seed,
        ..FitOptions::default()
    };
    let result = fit(&problem, &options)?;
    let curve = problem.fitted_curve(&result.params, &result.init)?;

    let (start, end) = problem.window;
    let series = &problem.data;
    let report = FitReport {
        region: &series.region,
        s_tilde,
        window: problem.window,
        first_date: series.dates[start].to_string(),
        loss_space: problem.loss_space,
        target: problem.target,
        seeds: options.seeds,
        seed: options.seed,
        result: &result,
    };
    let mut outputs = vec![(ctx.out.clone(), json_bytes(&report)?)];

    if let Some(out) = &ctx.out {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["date", "raw", "smoothed", "fitted"])?;
        for (k, date) in series.dates.iter().enumerate() {
            let smoothed = series.smoothed[k].map(fmt_f64).unwrap_or_default();
            let fitted = if (start..=end).contains(&k) {
                fmt_f64(curve[k - start])
            } else {
                String::new()
            };
            w.write_record([date.to_string(), fmt_f64(series.raw[k]), smoothed, fitted])?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::Invalid(e.to_string()))?;
        outputs.push((Some(curve_path(out)), bytes));
    }
    Ok(outputs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_file_sits_next_to_the_result() {
        assert_eq!(
            curve_path(Path::new("out/ny.json")),
            PathBuf::from("out/ny_curve.csv")
        );
        assert_eq!(curve_path(Path::new("fit")), PathBuf::from("fit_curve.csv"));
    }
}
