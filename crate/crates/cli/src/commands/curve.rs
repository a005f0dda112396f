use clap::Args;
use hnlab_core::curves::oracle::{compare_with_closed_form, estimate_ehk, ClosedFormComparison, EhkFit};
use hnlab_core::curves::trinomial::{monsky_prime_check, CongruenceCheck, DestabilizingLine};
use hnlab_core::curves::{CurveError, HkTable, OracleError, Polynomial, TrinomialInstance, Variant};
use hnlab_core::primes::primes_up_to;
use serde::Serialize;

use super::{io_err, Outcome};
use crate::cache::HkCache;
use crate::error::CliError;
use crate::output::Emitter;
use crate::Cli;

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: CurveError| e.to_string())
}

#[derive(Args, Debug)]
pub struct CurveArgs {
    /// Degree of the trinomial
    #[arg(long)]
    pub d: u64,
    /// Characteristic
    #[arg(long, required_unless_present = "sweep_primes")]
    pub p: Option<u64>,
    /// fermat (x^d + y^d + z^d) or cyclic (x^{d-1}y + y^{d-1}z + z^{d-1}x)
    #[arg(long, value_parser = parse_variant, default_value = "fermat")]
    pub variant: Variant,
    /// Also compute HK(p^e) by linear algebra over F_p
    #[arg(long)]
    pub oracle: bool,
    /// Exponents e for the oracle
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub e_list: Vec<u32>,
    /// Report every prime up to N instead of a single p
    #[arg(long, conflicts_with = "p")]
    pub sweep_primes: Option<u64>,
    /// Skip the congruence precondition
    #[arg(long)]
    pub force: bool,
}

#[derive(Serialize)]
struct OracleReport {
    table: HkTable,
    fit: Option<EhkFit>,
    comparison: Option<ClosedFormComparison>,
    note: Option<String>,
}

#[derive(Serialize)]
struct CurveReport {
    d: u64,
    p: u64,
    variant: Variant,
    congruence: Option<CongruenceCheck>,
    warning: Option<String>,
    instance: Option<TrinomialInstance>,
    destabilizing_line: Option<DestabilizingLine>,
    oracle: Option<OracleReport>,
}

fn congruence_warning(check: &CongruenceCheck) -> String {
    format!(
        "p mod {} = {} is not in {{{}, {}}}; closed form not applicable",
        check.modulus, check.residue, check.targets[0], check.targets[1]
    )
}

struct Context<'a> {
    args: &'a CurveArgs,
    cache: Option<HkCache>,
    budget: u64,
}

impl Context<'_> {
    fn oracle(&self, p: u64, instance: Option<&TrinomialInstance>) -> Result<OracleReport, OracleError> {
        let (d, variant) = (self.args.d, self.args.variant);
        let label = variant.as_str();
        let mut table = HkTable::new(d, p, label);
        if let Some(cache) = &self.cache {
            for &e in &self.args.e_list {
                if let Some(v) = cache.get(label, d, p, e) {
                    table.entries.insert(e, v);
                }
            }
        }
        let cached: Vec<u32> = table.entries.keys().copied().collect();
        table.fill(&Polynomial::for_variant(variant, d as u32), &self.args.e_list, self.budget)?;
        if let Some(cache) = &self.cache {
            for (&e, &v) in table.entries.iter().filter(|(e, _)| !cached.contains(e)) {
                if let Err(err) = cache.put(label, d, p, e, v) {
                    eprintln!("hnlab: cache write failed: {err}");
                }
            }
        }
        let (fit, note) = match estimate_ehk(&table) {
            Ok(fit) => (Some(fit), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let comparison = match (&fit, instance) {
            (Some(fit), Some(inst)) => Some(compare_with_closed_form(fit.clone(), &table, &inst.e_hk)?),
            _ => None,
        };
        Ok(OracleReport { table, fit, comparison, note })
    }

    /// Closed-form data for one prime. In sweep mode a failed congruence
    /// is a warning; otherwise it is an error unless `--force` is given.
    fn report(&self, p: u64, sweep: bool) -> Result<CurveReport, CliError> {
        let (d, variant) = (self.args.d, self.args.variant);
        let soft = sweep || self.args.force;
        let mut warning = None;
        let congruence = match monsky_prime_check(d, p, variant) {
            Ok(c) => Some(c),
            Err(e) if self.args.force => {
                warning = Some(e.to_string());
                None
            }
            Err(e) => return Err(e.into()),
        };
        let instance = match &congruence {
            Some(c) if c.holds => Some(TrinomialInstance::monsky(d, p, variant)?),
            Some(c) if soft => {
                warning = Some(congruence_warning(c));
                None
            }
            Some(_) => return Err(TrinomialInstance::monsky(d, p, variant).unwrap_err().into()),
            None => None,
        };
        let oracle = if self.args.oracle && (instance.is_some() || !sweep) {
            match self.oracle(p, instance.as_ref()) {
                Ok(r) => Some(r),
                Err(e @ OracleError::BudgetExceeded { .. }) if sweep => {
                    warning = Some(e.to_string());
                    None
                }
                Err(e) => return Err(e.into()),
            }
        } else {
            None
        };
        Ok(CurveReport {
            d,
            p,
            variant,
            congruence,
            warning,
            destabilizing_line: instance.as_ref().map(TrinomialInstance::destabilizing_line),
            instance,
            oracle,
        })
    }
}

pub fn run(args: &CurveArgs, cli: &Cli, out: &mut Emitter) -> Result<Outcome, CliError> {
    let cache = match &cli.cache {
        Some(dir) => Some(HkCache::open(dir).map_err(|e| CliError::Usage(format!("cache {}: {e}", dir.display())))?),
        None => None,
    };
    let ctx = Context { args, cache, budget: cli.budget };
    match args.sweep_primes {
        Some(limit) => {
            for p in primes_up_to(limit) {
                out.emit(&ctx.report(p, true)?).map_err(io_err)?;
            }
        }
        None => {
            let p = args.p.expect("clap enforces --p without --sweep-primes");
            out.emit(&ctx.report(p, false)?).map_err(io_err)?;
        }
    }
    Ok(Outcome::Ok)
}
