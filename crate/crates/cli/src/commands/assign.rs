use clap::Args;
use serde::Serialize;

use regsir_core::analysis::{assign_u, endemic_state, SteadyStateInfo};

use super::{no_endemic, Outputs};
use crate::error::CliError;
use crate::output::json_bytes;
use crate::Context;

#[derive(Debug, Args)]
pub struct AssignArgs {
    /// Target endemic infectives.
    #[arg(long)]
    istar: f64,
}

#[derive(Debug, Serialize)]
struct Assignment {
    i_star: f64,
    u: f64,
    endemic: SteadyStateInfo,
}

pub fn run(ctx: &Context, args: &AssignArgs) -> Result<Outputs, CliError> {
    // the gain is what we are solving for, so the file need not carry one
    let mut cfg = ctx.config.clone();
    cfg.u.get_or_insert(1.0);
    let r = cfg.resolve()?;
    let u = assign_u(args.istar, &r.law, &r.params, r.c_s)?;
    let params = r.params.with_u(u)?;
    let endemic = endemic_state(&r.law, &params, r.c_s)
        .ok_or_else(|| no_endemic(&r.law, params.gamma, r.c_s))?;
    let out = Assignment {
        i_star: args.istar,
        u,
        endemic,
    };
    Ok(vec![(ctx.out.clone(), json_bytes(&out)?)])
}
