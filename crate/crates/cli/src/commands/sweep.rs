use clap::Args;

use regsir_core::analysis::{population_sweep, SweepSettings};

use super::{full_table, Outputs};
use crate::error::CliError;
use crate::output::{json_bytes, Format, Table};
use crate::Context;

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Population sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    populations: Vec<f64>,
}

pub fn run(ctx: &Context, args: &SweepArgs) -> Result<Outputs, CliError> {
    let dir = ctx.out.clone().ok_or_else(|| {
        CliError::Invalid("sweep writes one file per population; give --out <dir>".into())
    })?;
    let cfg = &ctx.config;
    let r = cfg.resolve()?;
    let settings = SweepSettings {
        c_s: r.c_s,
        gamma: r.params.gamma,
        alpha: r.params.alpha,
        u: r.params.u,
        i0: cfg.i0.unwrap_or(1.0),
        beta0: cfg.beta0.unwrap_or(r.k),
        horizon: ctx.horizon,
    };
    let runs = population_sweep(&settings, &r.law, &args.populations, &cfg.integrator())?;

    let ext = match ctx.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let mut outputs = Outputs::new();
    let mut summary = Table::new(&[
        "population",
        "terminal_s",
        "terminal_i",
        "qss",
        "qss_current",
        "deviation",
        "deviation_current",
    ]);
    for (traj, case) in &runs {
        let params = regsir_core::EpidemicParams::new(
            settings.c_s / case.population,
            settings.gamma,
            settings.alpha,
            settings.u,
            r.params.epsilon,
        )?;
        let table = full_table(traj, &params)?;
        let name = format!("population_{:.0}.{ext}", case.population);
        outputs.push((Some(dir.join(name)), table.render(ctx.format)?));
        summary.push(vec![
            case.population,
            case.terminal_s,
            case.terminal_i,
            case.qss,
            case.qss_current,
            case.deviation,
            case.deviation_current,
        ]);
    }
    let summary_bytes = match ctx.format {
        Format::Csv => summary.to_csv()?,
        Format::Json => json_bytes(&runs.iter().map(|(_, c)| c).collect::<Vec<_>>())?,
    };
    outputs.push((Some(dir.join(format!("summary.{ext}"))), summary_bytes));
    Ok(outputs)
}
