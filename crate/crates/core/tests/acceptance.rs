//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary
//! (`harness = false`) so the lines always appear in test output.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use hnlab_core::bounds::{
    endpoint_rank_check, curve_bound, drift_check_linear, instability_bound, sun_conjecture_bound, DriftCase,
};
use hnlab_core::curves::examples::raynaud_generate;
use hnlab_core::curves::oracle::{compare_with_closed_form, fit_between, HkTable, Polynomial, DEFAULT_BUDGET};
use hnlab_core::curves::trinomial::{prime_search, s1_l1_from_ehk, Inversion, TrinomialInstance, Variant};
use hnlab_core::hn::{slope_gap_check, AlmostDescent, GradedPiece};
use hnlab_core::{DescentMarking, FrobeniusData, GeometryContext, Profile, PullbackCase, Rational, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

const SEED: u64 = 0x5eed_2024;
const PROPERTY_CASES: usize = 1000;

/// Wall-clock ceilings per criterion.
const LIMITS: [Duration; 6] = [
    Duration::from_secs(1),
    Duration::from_secs(300),
    Duration::from_secs(60),
    Duration::from_secs(1),
    Duration::from_secs(1),
    Duration::from_secs(30),
];

/// Colength of `x³y + y³z + z³x` at `p = 11, e = 1`, frozen from the first audited run.
const CYCLIC_D4_P11_E1: u64 = 363;

fn q(n: i64) -> Rational {
    Rational::from_int(n)
}

fn fr(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

struct Verdict {
    pass: bool,
    detail: String,
    report: Value,
}

fn criterion_1() -> Verdict {
    let inst = TrinomialInstance::monsky(4, 5, Variant::Fermat).unwrap();
    let inversion = s1_l1_from_ehk(4, 5, &inst.e_hk).unwrap();
    let line = inst.destabilizing_line();
    let i_fv = inst.pullback_profile().instability_degree();
    let pass = inst.e_hk == fr(76, 25)
        && inst.e_hk == TrinomialInstance::closed_form_ehk(4, 5)
        && inversion == Inversion::Destabilizes { s1: 1, l1: 4 }
        && line.degree == q(-8)
        && i_fv == q(4)
        && i_fv == q(inst.canonical_degree())
        && inst.canonical_degree() == 4;
    Verdict {
        pass,
        detail: format!(
            "e_HK = {}, inversion {:?}, deg L1 = {}, I(F*V) = {}",
            inst.e_hk.to_fraction_string(),
            inversion,
            line.degree.to_fraction_string(),
            i_fv.to_fraction_string()
        ),
        report: json!({
            "instance": inst,
            "inversion": format!("{inversion:?}"),
            "deg_l1": line.degree.to_fraction_string(),
            "instability": i_fv.to_fraction_string(),
        }),
    }
}

fn criterion_2() -> Verdict {
    let mut table = HkTable::new(4, 5, "fermat");
    table.fill(&Polynomial::fermat(4), &[1, 2], DEFAULT_BUDGET).unwrap();
    let fit = fit_between(&table, 1, 2).unwrap();
    let target = fr(76, 25);
    let cmp = compare_with_closed_form(fit, &table, &target).unwrap();
    // Exact match, or a deviation that is the same bounded constant at both points.
    let pass = cmp.exact || cmp.residual_constant;
    Verdict {
        pass,
        detail: format!(
            "HK(5) = {}, HK(25) = {}, fit a = {} (a - 76/25 = {}), residuals HK(q) - 76/25 q^2 = {:?}, constant = {}",
            table.entries[&1],
            table.entries[&2],
            cmp.fit.a.to_fraction_string(),
            cmp.fit_deviation.to_fraction_string(),
            cmp.residuals,
            cmp.residual_constant
        ),
        report: json!({ "table": table, "comparison": cmp }),
    }
}

fn criterion_3() -> Verdict {
    let primes = prime_search(4, Variant::Cyclic, 20).unwrap();
    let inst = TrinomialInstance::monsky(4, 11, Variant::Cyclic).unwrap();
    let mut table = HkTable::new(4, 11, "cyclic");
    table.fill(&Polynomial::cyclic(4), &[1], DEFAULT_BUDGET).unwrap();
    let hk = table.entries[&1];
    let pass = primes == [3, 11, 17] && inst.e_hk == fr(364, 121) && hk == CYCLIC_D4_P11_E1;
    Verdict {
        pass,
        detail: format!(
            "primes {:?}, e_HK = {}, HK(11) = {} (frozen {})",
            primes,
            inst.e_hk.to_fraction_string(),
            hk,
            CYCLIC_D4_P11_E1
        ),
        report: json!({ "primes": primes, "instance": inst, "table": table }),
    }
}

fn criterion_4() -> Verdict {
    let ex = raynaud_generate(3, 1).unwrap();
    let pass = ex.v_profile == Profile::from_ints(&[(1, 4), (2, 6)]).unwrap()
        && ex.fv_profile == Profile::from_ints(&[(2, 24), (1, 6)]).unwrap()
        && !ex.refinement.holds
        && ex.refinement.witness == Some(GradedPiece::int(1, 12))
        && ex.threshold.value == fr(81, 2)
        && !ex.threshold_admits_p
        && ex.pullback_bound.lhs == q(6)
        && ex.pullback_bound.rhs == q(6);
    Verdict {
        pass,
        detail: format!(
            "V = {}, F*V = {}, witness {:?}, threshold {} admits 3: {}, instability bound {} <= {}",
            ex.v_profile,
            ex.fv_profile,
            ex.refinement.witness.as_ref().map(ToString::to_string),
            ex.threshold.value.to_fraction_string(),
            ex.threshold_admits_p,
            ex.pullback_bound.lhs.to_fraction_string(),
            ex.pullback_bound.rhs.to_fraction_string()
        ),
        report: serde_json::to_value(&ex).unwrap(),
    }
}

fn criterion_5() -> Verdict {
    let mut reports = Vec::new();
    for (p, variant) in [(5u64, Variant::Fermat), (11, Variant::Cyclic)] {
        let inst = TrinomialInstance::monsky(4, p, variant).unwrap();
        let fv = inst.pullback_profile();
        let none = DescentMarking::none();
        let case = PullbackCase {
            fe_profile: &fv,
            marking: &none,
            frob: FrobeniusData::single(p).unwrap(),
            base_instability: q(0),
            base_rank: 2,
        };
        reports.push(curve_bound(&case, inst.genus).unwrap());
    }
    let pass = reports.iter().all(|r| r.slack == q(0) && r.lhs == q(4));
    Verdict {
        pass,
        detail: reports
            .iter()
            .map(|r| format!("{} <= {} slack {}", r.lhs.to_fraction_string(), r.rhs.to_fraction_string(), r.slack.to_fraction_string()))
            .collect::<Vec<_>>()
            .join("; "),
        report: serde_json::to_value(&reports).unwrap(),
    }
}

fn criterion_6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut failures = [0usize; 5];

    for _ in 0..PROPERTY_CASES {
        let profile = random_profile(&mut rng, 12);
        if !slope_gap_check(&profile).unwrap().holds() {
            failures[0] += 1;
        }
    }

    for _ in 0..PROPERTY_CASES {
        let fe = random_profile(&mut rng, 12);
        let l = fe.hn_length();
        let s = rng.gen_range(0..=l);
        let marking = DescentMarking::new((1..=s).map(|i| (i, i))).unwrap();
        let p = PRIMES[rng.gen_range(0..PRIMES.len())];
        let case = PullbackCase {
            fe_profile: &fe,
            marking: &marking,
            frob: FrobeniusData::single(p).unwrap(),
            base_instability: q(rng.gen_range(0..50)),
            base_rank: fe.total_rank(),
        };
        let geom = GeometryContext::new(rng.gen_range(1..4), q(rng.gen_range(-20..20)));
        let a = instability_bound(&case, &geom).unwrap();
        let b = sun_conjecture_bound(&case, &geom).unwrap();
        if a.rhs > b.rhs {
            failures[1] += 1;
        }
    }

    for _ in 0..PROPERTY_CASES {
        let profile = random_profile(&mut rng, 12);
        let p = PRIMES[rng.gen_range(0..PRIMES.len())];
        let s = rng.gen_range(0..5);
        let pulled = profile.strong_pullback(&FrobeniusData::new(p, s).unwrap());
        if pulled.instability_degree() != Rational::power_of(p, s) * profile.instability_degree() {
            failures[2] += 1;
        }
    }

    for _ in 0..PROPERTY_CASES {
        let tower = random_refinement_tower(&mut rng, 12);
        let report = endpoint_rank_check(&tower, &GeometryContext::new(1, q(rng.gen_range(-5..5)))).unwrap();
        if !report.rank_one_endpoints || report.equalities.is_empty() || !report.equalities.iter().all(|e| e.holds) {
            failures[3] += 1;
        }
    }

    for _ in 0..PROPERTY_CASES {
        let base = random_profile(&mut rng, 12);
        let p = PRIMES[rng.gen_range(0..PRIMES.len())];
        let frob = FrobeniusData::new(p, rng.gen_range(1..4)).unwrap();
        let level = base.strong_pullback(&frob);
        let descent = AlmostDescent::identity(level.num_pieces());
        let case = DriftCase { level: &level, descent: &descent, base: &base, frob, rank: base.total_rank() };
        let report = drift_check_linear(&case, &GeometryContext::new(1, q(rng.gen_range(-5..5)))).unwrap();
        if report.entries.iter().any(|e| e.c != q(0)) {
            failures[4] += 1;
        }
    }

    let labels = ["gap-chain", "instability<=sun", "pullback-scaling", "endpoint-equality", "drift-zero"];
    let pass = failures.iter().all(|&f| f == 0);
    Verdict {
        pass,
        detail: labels
            .iter()
            .zip(failures)
            .map(|(l, f)| format!("{l}: {f}/{PROPERTY_CASES} failed"))
            .collect::<Vec<_>>()
            .join(", "),
        report: json!({ "seed": SEED, "cases": PROPERTY_CASES, "failures": labels.iter().zip(failures).collect::<Vec<_>>() }),
    }
}

const NAMES: [&str; 7] = [
    "closed-form trinomial data d=4 p=5",
    "oracle cross-check d=4 p=5 at e=1,2",
    "cyclic d=4 prime classes and p=11",
    "low-characteristic refinement failure p=3 k=1",
    "curve bound equality on trinomial examples",
    "randomized property suite",
    "determinism of criteria 1-6",
];

fn run_all() -> Vec<(Verdict, Duration)> {
    let criteria: [fn() -> Verdict; 6] = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6];
    criteria
        .iter()
        .map(|c| {
            let start = Instant::now();
            let v = c();
            (v, start.elapsed())
        })
        .collect()
}

fn canonical(results: &[(Verdict, Duration)]) -> String {
    let reports: Vec<&Value> = results.iter().map(|(v, _)| &v.report).collect();
    serde_json::to_string(&reports).unwrap()
}

fn main() -> ExitCode {
    let first = run_all();
    let second = run_all();
    let (a, b) = (canonical(&first), canonical(&second));

    let mut lines = Vec::new();
    for (i, ((verdict, elapsed), limit)) in first.iter().zip(LIMITS).enumerate() {
        let in_time = *elapsed <= limit;
        let pass = verdict.pass && in_time;
        let timing = format!("{:.3}s of {}s", elapsed.as_secs_f64(), limit.as_secs());
        lines.push((i + 1, pass, format!("{} [{timing}]", verdict.detail)));
    }
    lines.push((
        7,
        a == b,
        format!("{} bytes per run, identical = {}", a.len(), a == b),
    ));

    let mut failed = 0;
    for (id, pass, detail) in &lines {
        let mark = if *pass { "PASS" } else { "FAIL" };
        println!("criterion {id} {mark} {}: {detail}", NAMES[id - 1]);
        failed += usize::from(!pass);
    }
    println!("acceptance: {}/{} passed", lines.len() - failed, lines.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
