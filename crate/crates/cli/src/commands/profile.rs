use std::path::Path;

use hnlab_core::hn::{slope_gap_check, GapReport};
use hnlab_core::{Profile, Rational, Scalar};
use serde::Serialize;

use super::{io_err, load_profile, Outcome};
use crate::error::CliError;
use crate::output::Emitter;

#[derive(Serialize)]
struct ProfileSummary {
    valid: bool,
    profile: Profile,
    total_rank: u64,
    total_degree: String,
    slopes: Vec<String>,
    mu_max: String,
    mu_min: String,
    instability: String,
    hn_length: usize,
    /// Present for integer-degree profiles.
    slope_gaps: Option<GapReport<Rational>>,
}

pub fn check(path: &Path, out: &mut Emitter) -> Result<Outcome, CliError> {
    let profile = load_profile(path)?;
    let s = |x: Rational| x.to_fraction_string();
    let summary = ProfileSummary {
        valid: true,
        total_rank: profile.total_rank(),
        total_degree: s(profile.total_degree()),
        slopes: profile.slopes().into_iter().map(s).collect(),
        mu_max: s(profile.mu_max()),
        mu_min: s(profile.mu_min()),
        instability: s(profile.instability_degree()),
        hn_length: profile.hn_length(),
        slope_gaps: slope_gap_check(&profile).ok(),
        profile,
    };
    out.emit(&summary).map_err(io_err)?;
    Ok(Outcome::Ok)
}
