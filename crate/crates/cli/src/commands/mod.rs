use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use hnlab_core::hn::ProfileDoc;
use hnlab_core::{GeometryContext, Profile, Rational, Scalar};
use serde::de::DeserializeOwned;

use crate::error::{data_err, CliError};

pub mod bounds;
pub mod curve;
pub mod example;
pub mod profile;
pub mod tower;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    BoundFailed,
}

pub fn parse_rational(s: &str) -> Result<Rational, String> {
    Rational::parse_fraction(s).map_err(|e| e.to_string())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn load_profile(path: &Path) -> Result<Profile, CliError> {
    let doc: ProfileDoc<Rational> = read_json(path)?;
    Ok(Profile::try_from(doc)?)
}

pub fn io_err(e: std::io::Error) -> CliError {
    data_err(format!("output: {e}"))
}

/// Invariants of the ambient variety.
#[derive(Args, Debug, Default)]
pub struct GeometryArgs {
    /// Dimension n of X
    #[arg(long)]
    pub dim: Option<u32>,
    /// mu_max of the cotangent sheaf, as "n/d"
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
    pub mu_max_omega: Option<Rational>,
    /// Genus of a smooth curve; implies --dim 1 and mu_max = 2g - 2
    #[arg(long)]
    pub genus: Option<u64>,
    /// L_max of the cotangent sheaf; mu_max stands in when absent
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
    pub l_max_omega: Option<Rational>,
    /// Slope of the cotangent sheaf (embedding bound)
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
    pub mu_omega: Option<Rational>,
    /// Degree of O_X(2) (embedding bound)
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
    pub deg_o2: Option<Rational>,
    /// HN profile file of the cotangent sheaf
    #[arg(long)]
    pub omega_profile: Option<PathBuf>,
}

impl GeometryArgs {
    pub fn supplied(&self) -> bool {
        self.mu_max_omega.is_some() || self.genus.is_some()
    }

    pub fn build(&self) -> Result<GeometryContext<Rational>, CliError> {
        let mut geom = match self.genus {
            Some(g) => {
                if self.dim.is_some_and(|n| n != 1) {
                    return Err(CliError::Usage("--genus describes a curve; --dim must be 1".into()));
                }
                let mut geom = GeometryContext::curve(g);
                if let Some(mu) = &self.mu_max_omega {
                    geom.mu_max_omega = mu.clone();
                }
                geom
            }
            None => {
                let mu = self
                    .mu_max_omega
                    .clone()
                    .ok_or_else(|| CliError::Usage("--mu-max-omega is required (or --genus for a curve)".into()))?;
                let dim = self
                    .dim
                    .ok_or_else(|| CliError::Usage("--dim is required unless --genus is given".into()))?;
                GeometryContext::new(dim, mu)
            }
        };
        if let Some(v) = &self.l_max_omega {
            geom.l_max_omega = Some(v.clone());
        }
        if let Some(v) = &self.mu_omega {
            geom.mu_omega = Some(v.clone());
        }
        if let Some(v) = &self.deg_o2 {
            geom.deg_o2 = Some(v.clone());
        }
        if let Some(path) = &self.omega_profile {
            geom.omega_profile = Some(load_profile(path)?);
        }
        geom.validate()?;
        Ok(geom)
    }
}
