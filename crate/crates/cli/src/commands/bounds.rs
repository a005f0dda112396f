use std::path::PathBuf;

use clap::{Args, ValueEnum};
use hnlab_core::bounds::{
    endpoint_rank_check, char_threshold_behrend, refinement_threshold, curve_bound, drift_check_linear, drift_check_power,
    embedding_slope_bound, instability_bound, shepherd_barron_bound, sun_conjecture_bound, BehrendInput, BoundReport,
    EndpointRankReport, CharThreshold, DriftCase, DriftReport, SpreadReport, limit_spread_bound,
};
use hnlab_core::hn::{AlmostDescent, ProfileDoc};
use hnlab_core::tower::TowerDoc;
use hnlab_core::{DescentMarking, FrobeniusData, GeometryContext, Profile, PullbackCase, Rational, Tower};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{io_err, parse_rational, read_json, GeometryArgs, Outcome};
use crate::error::CliError;
use crate::output::Emitter;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundKind {
    Lemma1,
    Sun,
    Sb,
    Curve,
    T5,
    Cc1,
    DriftL5,
    DriftPp8,
    ThresholdT1,
    ThresholdBehrend,
    Embedding,
}

pub const CASE_FIELDS: &str = "\
Case fields read by each bound:
  lemma1, sun, curve   p, fe_profile, optional marking, and base_profile or base_instability
  sb                   p, fe_profile
  t5                   tower, plus l and s (in the case or as --l/--s); not derived here
  cc1                  tower
  drift-l5, drift-pp8  p, base_profile, level_profile, optional iterations (default 1)
                       and descent (default: matched by rank)
  threshold-t1         p and rank (or a profile to take it from)
  threshold-behrend    p, rank_g, dim_adjoint, coxeter_h
  embedding            rank_m1";

#[derive(Args, Debug)]
#[command(after_long_help = CASE_FIELDS)]
pub struct BoundsArgs {
    /// Case file: one case object or an array of them
    pub path: PathBuf,

    #[arg(long, value_enum)]
    pub bound: BoundKind,

    #[command(flatten)]
    pub geometry: GeometryArgs,

    /// t5 only: l as defined for the tower (not derived here)
    #[arg(long, allow_hyphen_values = true)]
    pub l: Option<i64>,
    /// t5 only: s as defined for the tower (not derived here)
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<i64>,
    /// drift-pp8 only: power m >= 1
    #[arg(long)]
    pub m: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseDoc {
    p: Option<u64>,
    fe_profile: Option<ProfileDoc<Rational>>,
    base_profile: Option<ProfileDoc<Rational>>,
    base_instability: Option<String>,
    marking: Option<DescentMarking>,
    tower: Option<TowerDoc<Rational>>,
    l: Option<i64>,
    s: Option<i64>,
    level_profile: Option<ProfileDoc<Rational>>,
    iterations: Option<u32>,
    descent: Option<Vec<usize>>,
    rank: Option<u64>,
    rank_g: Option<u64>,
    dim_adjoint: Option<u64>,
    coxeter_h: Option<u64>,
    rank_m1: Option<u64>,
}

#[derive(Serialize)]
#[serde(untagged)]
enum BoundOutput {
    Report(BoundReport<Rational>),
    Spread(SpreadReport<Rational>),
    EndpointRank(EndpointRankReport<Rational>),
    Drift(DriftReport<Rational>),
}

impl BoundOutput {
    /// Threshold reports are informational and never fail a run.
    fn failed(&self) -> bool {
        match self {
            BoundOutput::Report(r) => !r.holds && !r.name.starts_with("threshold-"),
            BoundOutput::Spread(r) => !r.main.holds || r.pullback.as_ref().is_some_and(|p| !p.holds),
            BoundOutput::EndpointRank(r) => !r.holds(),
            BoundOutput::Drift(r) => !r.holds(),
        }
    }
}

struct Case {
    index: usize,
    doc: CaseDoc,
}

impl Case {
    fn missing(&self, field: &str, kind: BoundKind) -> CliError {
        let name = kind.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
        CliError::Data(format!("case {}: --bound {name} needs field `{field}`", self.index))
    }

    fn need<T: Clone>(&self, v: &Option<T>, field: &str, kind: BoundKind) -> Result<T, CliError> {
        v.clone().ok_or_else(|| self.missing(field, kind))
    }

    fn profile(&self, doc: &Option<ProfileDoc<Rational>>, field: &str, kind: BoundKind) -> Result<Profile, CliError> {
        let doc = self.need(doc, field, kind)?;
        Profile::try_from(doc).map_err(|e| CliError::Invariant(format!("case {}: {field}: {e}", self.index)))
    }

    fn frob(&self, kind: BoundKind) -> Result<FrobeniusData, CliError> {
        let p = self.need(&self.doc.p, "p", kind)?;
        Ok(FrobeniusData::single(p)?)
    }

    fn marking(&self) -> Result<DescentMarking, CliError> {
        match &self.doc.marking {
            Some(m) => Ok(DescentMarking::new(m.iter())?),
            None => Ok(DescentMarking::none()),
        }
    }

    fn base_instability(&self, kind: BoundKind) -> Result<Rational, CliError> {
        if self.doc.base_profile.is_some() {
            return Ok(self.profile(&self.doc.base_profile, "base_profile", kind)?.instability_degree());
        }
        let text = self
            .doc
            .base_instability
            .as_deref()
            .ok_or_else(|| self.missing("base_profile or base_instability", kind))?;
        parse_rational(text).map_err(|e| CliError::Data(format!("case {}: base_instability: {e}", self.index)))
    }

    fn rank(&self, kind: BoundKind) -> Result<u64, CliError> {
        if let Some(r) = self.doc.rank {
            return Ok(r);
        }
        for (doc, field) in [(&self.doc.base_profile, "base_profile"), (&self.doc.fe_profile, "fe_profile")] {
            if doc.is_some() {
                return Ok(self.profile(doc, field, kind)?.total_rank());
            }
        }
        Err(self.missing("rank", kind))
    }

    fn tower(&self, kind: BoundKind) -> Result<Tower, CliError> {
        let doc = self.need(&self.doc.tower, "tower", kind)?;
        Tower::try_from(doc).map_err(|e| CliError::Invariant(format!("case {}: tower: {e}", self.index)))
    }
}

fn load_cases(args: &BoundsArgs) -> Result<Vec<Case>, CliError> {
    let value: Value = read_json(&args.path)?;
    let items = match value {
        Value::Array(items) => items,
        single => vec![single],
    };
    items
        .into_iter()
        .enumerate()
        .map(|(index, v)| {
            let doc = serde_json::from_value(v).map_err(|e| CliError::Data(format!("case {index}: {e}")))?;
            Ok(Case { index, doc })
        })
        .collect()
}

fn evaluate(case: &Case, args: &BoundsArgs, geom: &GeometryContext<Rational>) -> Result<BoundOutput, CliError> {
    let kind = args.bound;
    Ok(match kind {
        BoundKind::Lemma1 | BoundKind::Sun | BoundKind::Curve => {
            let fe = case.profile(&case.doc.fe_profile, "fe_profile", kind)?;
            let marking = case.marking()?;
            let pc = PullbackCase {
                fe_profile: &fe,
                marking: &marking,
                frob: case.frob(kind)?,
                base_instability: case.base_instability(kind)?,
                base_rank: fe.total_rank(),
            };
            BoundOutput::Report(match kind {
                BoundKind::Lemma1 => instability_bound(&pc, geom)?,
                BoundKind::Sun => sun_conjecture_bound(&pc, geom)?,
                _ => {
                    let genus = geom
                        .genus
                        .ok_or_else(|| CliError::Usage("--bound curve needs --genus".into()))?;
                    curve_bound(&pc, genus)?
                }
            })
        }
        BoundKind::Sb => {
            let fe = case.profile(&case.doc.fe_profile, "fe_profile", kind)?;
            let frob = case.frob(kind)?;
            BoundOutput::Report(shepherd_barron_bound(&fe, geom, fe.total_rank(), &frob)?)
        }
        BoundKind::T5 => {
            let tower = case.tower(kind)?;
            let l = case.doc.l.or(args.l).ok_or_else(|| CliError::Usage("--bound t5 needs --l (or `l` in the case)".into()))?;
            let s = case.doc.s.or(args.s).ok_or_else(|| CliError::Usage("--bound t5 needs --s (or `s` in the case)".into()))?;
            BoundOutput::Spread(limit_spread_bound(&tower, geom, l, s)?)
        }
        BoundKind::Cc1 => BoundOutput::EndpointRank(endpoint_rank_check(&case.tower(kind)?, geom)?),
        BoundKind::DriftL5 | BoundKind::DriftPp8 => {
            let base = case.profile(&case.doc.base_profile, "base_profile", kind)?;
            let level = case.profile(&case.doc.level_profile, "level_profile", kind)?;
            let p = case.need(&case.doc.p, "p", kind)?;
            let frob = FrobeniusData::new(p, case.doc.iterations.unwrap_or(1))?;
            let descent = match &case.doc.descent {
                Some(targets) => AlmostDescent::new(targets.clone())?,
                None => AlmostDescent::by_rank(&level, &base)?,
            };
            let dc = DriftCase {
                level: &level,
                descent: &descent,
                base: &base,
                frob,
                rank: base.total_rank(),
            };
            BoundOutput::Drift(if kind == BoundKind::DriftL5 {
                drift_check_linear(&dc, geom)?
            } else {
                let m = args.m.ok_or_else(|| CliError::Usage("--bound drift-pp8 needs --m".into()))?;
                drift_check_power(&dc, geom, m)?
            })
        }
        BoundKind::ThresholdT1 => {
            let p = case.need(&case.doc.p, "p", kind)?;
            let t = refinement_threshold(case.rank(kind)?, geom.dim_n, &geom.mu_max_omega);
            BoundOutput::Report(t.report("threshold-t1", p))
        }
        BoundKind::ThresholdBehrend => {
            let p = case.need(&case.doc.p, "p", kind)?;
            let input = BehrendInput {
                rank_g: case.need(&case.doc.rank_g, "rank_g", kind)?,
                dim_adjoint: case.need(&case.doc.dim_adjoint, "dim_adjoint", kind)?,
                coxeter_h: case.need(&case.doc.coxeter_h, "coxeter_h", kind)?,
                dim_x: geom.dim_n,
                mu_max_omega: geom.mu_max_omega.clone(),
            };
            let t = CharThreshold { value: char_threshold_behrend(&input)? };
            BoundOutput::Report(t.report("threshold-behrend", p))
        }
        BoundKind::Embedding => {
            let rank_m1 = case.need(&case.doc.rank_m1, "rank_m1", kind)?;
            let bound = embedding_slope_bound(geom, rank_m1)?;
            BoundOutput::Report(BoundReport::new("embedding", geom.mu_max_omega.clone(), bound.bound, true))
        }
    })
}

pub fn run(args: &BoundsArgs, out: &mut Emitter) -> Result<Outcome, CliError> {
    let geom = args.geometry.build()?;
    let cases = load_cases(args)?;
    let mut outcome = Outcome::Ok;
    for case in &cases {
        let report = evaluate(case, args, &geom)?;
        if report.failed() {
            outcome = Outcome::BoundFailed;
        }
        out.emit(&report).map_err(io_err)?;
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use hnlab_core::Scalar;

    #[test]
    fn threshold_reports_never_fail_a_run() {
        let t = CharThreshold { value: Rational::from_ratio(81, 2) };
        assert!(!BoundOutput::Report(t.report("threshold-t1", 3)).failed());
        let r = BoundReport::new("lemma1", Rational::from_int(7), Rational::from_int(6), true);
        assert!(BoundOutput::Report(r).failed());
    }
}
