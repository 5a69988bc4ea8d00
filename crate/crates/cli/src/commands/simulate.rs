use chrono::{Days, NaiveDate};
use clap::{Args, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use regsir_core::dynamics::{
    a4_holds, endemic_scaled_infectives, monod_closed_form_infectives,
    monod_closed_form_susceptibles, monod_threshold, rhs_fast, rhs_full, rhs_log_fast, rhs_slow,
    ContactRateLaw, FastState, FullState, LogFastState,
};
use regsir_core::fitting::{simulate_normalized, FitInit};
use regsir_core::{integrate, sample_daily, Error};

use super::{full_table, no_endemic, Outputs};
use crate::config::Resolved;
use crate::error::CliError;
use crate::output::Table;
use crate::Context;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Full,
    Fast,
    LogFast,
    Slow,
    ClosedFormMonod,
    Normalized,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    model: Model,
    /// Multiplicative Gaussian noise on the incidence column, `y (1 + σ z)`.
    #[arg(long, value_name = "SIGMA")]
    noise: Option<f64>,
    /// Write `date,cases` rows (rounded incidence) starting at this date.
    #[arg(long, value_name = "DATE")]
    as_incidence: Option<NaiveDate>,
}

fn observable(model: Model) -> Option<&'static str> {
    match model {
        Model::Full | Model::Fast => Some("incidence"),
        Model::Normalized => Some("y"),
        _ => None,
    }
}

pub fn run(ctx: &Context, args: &SimulateArgs) -> Result<Outputs, CliError> {
    let mut table = build(ctx, args.model)?;
    let column = observable(args.model);
    if (args.noise.is_some() || args.as_incidence.is_some()) && column.is_none() {
        return Err(CliError::Invalid(format!(
            "--noise and --as-incidence need a model with an incidence column, not {:?}",
            args.model
        )));
    }
    let column = column.unwrap_or_default();
    if let Some(sigma) = args.noise {
        let normal = Normal::new(0.0, sigma).map_err(|_| {
            CliError::Invalid(format!("--noise must be a nonnegative number, got {sigma}"))
        })?;
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
        for y in table.column_mut(column).expect("observable column exists") {
            *y = (*y * (1.0 + normal.sample(&mut rng))).max(0.0);
        }
    }
    let bytes = match args.as_incidence {
        Some(start) => incidence_csv(&table, column, start)?,
        None => table.render(ctx.format)?,
    };
    Ok(vec![(ctx.out.clone(), bytes)])
}

fn incidence_csv(table: &Table, column: &str, start: NaiveDate) -> Result<Vec<u8>, CliError> {
    let k = table
        .columns
        .iter()
        .position(|c| c == column)
        .expect("observable column exists");
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["date", "cases"])?;
    for row in &table.rows {
        let date = start
            .checked_add_days(Days::new(row[0] as u64))
            .ok_or_else(|| CliError::Invalid("date out of range".into()))?;
        w.write_record([date.to_string(), format!("{}", row[k].round() as u64)])?;
    }
    w.into_inner().map_err(|e| CliError::Invalid(e.to_string()))
}

fn build(ctx: &Context, model: Model) -> Result<Table, CliError> {
    let cfg = &ctx.config;
    if model == Model::Normalized {
        let (params, s_tilde) = cfg.normalized()?;
        let init = FitInit {
            i0: cfg.i0.unwrap_or(1.0),
            beta_hat0: cfg.beta0.unwrap_or(params.k),
        };
        let daily = sample_daily(&simulate_normalized(&params, &init, s_tilde, ctx.horizon)?)?;
        let mut table = Table::new(&["t", "I", "beta_hat", "y"]);
        for (t, &[i, b]) in daily.iter() {
            table.push(vec![t, i, b, s_tilde * b * i]);
        }
        return Ok(table);
    }

    let r = cfg.resolve()?;
    let Resolved {
        params, law, c_s, ..
    } = r;
    let i0 = cfg.i0.unwrap_or(1.0);
    let beta0 = cfg.beta0.unwrap_or(law.k);
    let icfg = cfg.integrator();
    let span = (0.0, ctx.horizon);
    let table = match model {
        Model::Full => {
            let total = r.s_tilde0.unwrap_or(1.0) / params.epsilon;
            let r0 = cfg.r0.unwrap_or(0.0);
            let x0 = [total - i0 - r0, i0, r0, beta0];
            let traj = integrate(
                |_t, x: &[f64; 4]| {
                    Ok(rhs_full(&FullState::from_array(*x), &params, &law)?.to_array())
                },
                x0,
                span,
                &icfg,
            )?;
            full_table(&traj, &params)?
        }
        Model::Fast => {
            let traj = integrate(
                |_t, x: &[f64; 2]| {
                    let d = rhs_fast(
                        &FastState {
                            i: x[0],
                            beta: x[1],
                            c_s,
                        },
                        &params,
                        &law,
                    )?;
                    Ok([d.di, d.dbeta])
                },
                [i0, beta0],
                span,
                &icfg,
            )?;
            let mut table = Table::new(&["t", "I", "beta", "incidence"]);
            for (t, &[i, b]) in sample_daily(&traj)?.iter() {
                table.push(vec![t, i, b, c_s * b * i]);
            }
            table
        }
        Model::LogFast => {
            if !(i0 > 0.0) {
                return Err(CliError::Invalid(format!(
                    "log-fast needs i0 > 0, got {i0}"
                )));
            }
            let traj = integrate(
                |_t, x: &[f64; 2]| {
                    let d = rhs_log_fast(
                        &LogFastState {
                            p: x[0],
                            beta: x[1],
                        },
                        c_s,
                        &params,
                        &law,
                    )?;
                    Ok([d.dp, d.dbeta])
                },
                [i0.ln(), beta0],
                span,
                &icfg.with_floor(None),
            )?;
            let mut table = Table::new(&["t", "p", "beta", "I"]);
            for (t, &[p, b]) in sample_daily(&traj)?.iter() {
                table.push(vec![t, p, b, p.exp()]);
            }
            table
        }
        Model::Slow => {
            let s0 = need_s_tilde(&r)?;
            let traj = integrate(
                |_t, x: &[f64; 1]| Ok([params.epsilon * rhs_slow(x[0], &params, &law)]),
                [s0],
                span,
                &icfg,
            )?;
            let mut table = Table::new(&["t", "S_tilde", "I_qss", "beta_qss"]);
            let disease_free = law.g_inv(law.h(0.0)).unwrap_or(f64::NAN);
            for (t, &[s]) in sample_daily(&traj)?.iter() {
                let cs = params.c_tilde() * s;
                let (i, b) = match endemic_scaled_infectives(&law, params.gamma, cs) {
                    Some(x) => (x / params.u, params.gamma / cs),
                    None => (0.0, disease_free),
                };
                table.push(vec![t, s, i, b]);
            }
            table
        }
        Model::ClosedFormMonod => {
            let s0 = need_s_tilde(&r)?;
            let cs = params.c_tilde() * s0;
            if !a4_holds(&law, params.gamma, cs) || s0 <= monod_threshold(&params, &law) {
                return Err(no_endemic(&law, params.gamma, cs).into());
            }
            let mut table = Table::new(&["t", "S_tilde", "I"]);
            for day in 0..=ctx.horizon.floor() as u64 {
                let t = day as f64;
                table.push(vec![
                    t,
                    monod_closed_form_susceptibles(t, s0, &params, &law)?,
                    monod_closed_form_infectives(t, s0, &params, &law)?,
                ]);
            }
            table
        }
        Model::Normalized => unreachable!("handled above"),
    };
    Ok(table)
}

fn need_s_tilde(r: &Resolved) -> Result<f64, CliError> {
    match r.s_tilde0 {
        Some(s) if s > 0.0 => Ok(s),
        Some(s) => {
            Err(Error::InvalidParameter(format!("s_tilde must be positive, got {s}")).into())
        }
        None => Err(CliError::Invalid(
            "this model needs `s_tilde` or `population`".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::output::fmt_f64;

    #[test]
    fn incidence_rows_are_dated_and_rounded() {
        let mut t = Table::new(&["t", "y"]);
        t.push(vec![0.0, 2.4]);
        t.push(vec![1.0, 2.6]);
        let start = NaiveDate::from_ymd_opt(2020, 2, 28).unwrap();
        let text = String::from_utf8(incidence_csv(&t, "y", start).unwrap()).unwrap();
        assert_eq!(text, "date,cases\n2020-02-28,2\n2020-02-29,3\n");
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
    }
}
