use std::path::PathBuf;

use clap::Args;
use hnlab_core::tower::TowerDoc;
use hnlab_core::{Profile, Rational, Scalar, Tower};
use serde::Serialize;

use super::{io_err, read_json, Outcome};
use crate::error::CliError;
use crate::output::Emitter;

#[derive(Args, Debug)]
pub struct TowerArgs {
    /// Tower file
    pub path: PathBuf,
}

#[derive(Serialize)]
struct LevelSummary {
    level: usize,
    profile: Profile,
    instability: String,
    normalized_slopes: Vec<String>,
    refines_previous: bool,
}

#[derive(Serialize)]
struct TowerSummary {
    p: u64,
    height: usize,
    levels: Vec<LevelSummary>,
    first_refinement_violation: Option<usize>,
    strongly_semistable_at: Option<usize>,
    l_max: Option<String>,
    l_min: Option<String>,
}

pub fn run(args: &TowerArgs, out: &mut Emitter) -> Result<Outcome, CliError> {
    let doc: TowerDoc<Rational> = read_json(&args.path)?;
    let tower = Tower::try_from(doc)?;
    let s = |x: Rational| x.to_fraction_string();
    let levels = (0..=tower.height())
        .map(|k| LevelSummary {
            level: k,
            profile: tower.profile_at(k).into_owned(),
            instability: s(tower.profile_at(k).instability_degree()),
            normalized_slopes: tower.normalized_slopes(k).into_iter().map(s).collect(),
            refines_previous: tower.refines(k),
        })
        .collect();
    let summary = TowerSummary {
        p: tower.p(),
        height: tower.height(),
        levels,
        first_refinement_violation: tower.first_refinement_violation(),
        strongly_semistable_at: tower.strongly_semistable_at(),
        l_max: tower.l_max().map(s),
        l_min: tower.l_min().map(s),
    };
    out.emit(&summary).map_err(io_err)?;
    Ok(Outcome::Ok)
}
