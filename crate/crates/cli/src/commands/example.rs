use clap::Subcommand;
use hnlab_core::curves::examples::{monsky_w_generate, raynaud_generate};
use hnlab_core::hn::ProfileDoc;
use hnlab_core::{DescentMarking, Rational};
use serde::Serialize;

use super::{io_err, Outcome};
use crate::error::CliError;
use crate::output::Emitter;

#[derive(Subcommand, Debug)]
pub enum ExampleCmd {
    /// V = L + B on a curve of genus pk + 1
    Raynaud {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        k: u64,
        /// Print a case file for `hnlab bounds` instead of the report
        #[arg(long)]
        emit_case: bool,
    },
    /// W = L0 + V on the Fermat curve of degree d
    MonskyW {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        delta: u64,
    },
}

/// Input for `hnlab bounds` built from a generated example.
#[derive(Serialize)]
struct EmittedCase {
    p: u64,
    fe_profile: ProfileDoc<Rational>,
    base_profile: ProfileDoc<Rational>,
    marking: DescentMarking,
}

pub fn run(cmd: &ExampleCmd, out: &mut Emitter) -> Result<Outcome, CliError> {
    match *cmd {
        ExampleCmd::Raynaud { p, k, emit_case } => {
            let ex = raynaud_generate(p, k)?;
            if emit_case {
                let case = EmittedCase {
                    p,
                    fe_profile: ProfileDoc { pieces: ex.fv_profile.pieces().to_vec() },
                    base_profile: ProfileDoc { pieces: ex.v_profile.pieces().to_vec() },
                    marking: DescentMarking::none(),
                };
                out.emit(&case).map_err(io_err)?;
            } else {
                out.emit(&ex).map_err(io_err)?;
            }
        }
        ExampleCmd::MonskyW { d, p, delta } => {
            let ex = monsky_w_generate(d, p, delta)?;
            if let Some(w) = &ex.consistency.warning {
                eprintln!("hnlab: warning: {w}");
            }
            out.emit(&ex).map_err(io_err)?;
        }
    }
    Ok(Outcome::Ok)
}
