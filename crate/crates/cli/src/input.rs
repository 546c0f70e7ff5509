//! Turning command-line flags or a `.glv` file into a system.

use std::path::PathBuf;

use clap::Args;
use glv_core::{parse_network, ExponentMatrix, GlvError, GlvSystem, Rates, ReducedSystem};

#[derive(Debug, Clone, Args)]
pub struct SystemArgs {
    /// Network description file (.glv).
    #[arg(value_name = "FILE")]
    pub file: Option<PathBuf>,

    /// Reduced exponents `a1,b1,a3,b3`, or the six exponents of the full scheme.
    #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true, conflicts_with_all = ["file", "alpha"])]
    pub exponents: Option<Vec<f64>>,

    /// Rate constants `k1,k2,k3,k4` (default all 1).
    #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true, conflicts_with = "file")]
    pub rates: Option<Vec<f64>>,

    #[arg(long, allow_hyphen_values = true, requires = "beta", conflicts_with = "file")]
    pub alpha: Option<f64>,

    #[arg(long, allow_hyphen_values = true, requires = "alpha")]
    pub beta: Option<f64>,
}

/// A system as given: full schemes keep their time scale for simulation.
#[derive(Debug, Clone)]
pub enum Input {
    Full(GlvSystem),
    Reduced(ReducedSystem),
}

impl Input {
    pub fn reduced(&self) -> ReducedSystem {
        match self {
            Input::Full(s) => s.reduce(),
            Input::Reduced(s) => *s,
        }
    }
}

pub fn read_to_string(path: &PathBuf) -> Result<String, GlvError> {
    std::fs::read_to_string(path)
        .map_err(|e| GlvError::InvalidParameter(format!("cannot read {}: {e}", path.display())))
}

impl SystemArgs {
    pub fn is_given(&self) -> bool {
        self.file.is_some() || self.exponents.is_some() || self.alpha.is_some()
    }

    fn rates(&self) -> Result<Rates, GlvError> {
        match &self.rates {
            None => Ok(Rates::UNIT),
            Some(k) => {
                let k: [f64; 4] = k.as_slice().try_into().map_err(|_| {
                    GlvError::InvalidParameter(format!("--rates needs 4 values, got {}", k.len()))
                })?;
                Rates::from_array(k)
            }
        }
    }

    pub fn resolve(&self) -> Result<Input, GlvError> {
        if let Some(path) = &self.file {
            return Ok(Input::Full(parse_network(&read_to_string(path)?)?.lower()));
        }
        let rates = self.rates()?;
        if let (Some(a), Some(b)) = (self.alpha, self.beta) {
            return Ok(Input::Full(GlvSystem::alpha_beta(a, b, rates)?));
        }
        match self.exponents.as_deref() {
            Some(&[a1, b1, a3, b3]) => Ok(Input::Reduced(ReducedSystem::new(ExponentMatrix::new(a1, b1, a3, b3)?, rates)?)),
            Some(e) if e.len() == 6 => Ok(Input::Full(GlvSystem::new(e.try_into().expect("length 6"), rates)?)),
            Some(e) => Err(GlvError::InvalidParameter(format!("--exponents needs 4 or 6 values, got {}", e.len()))),
            None => Err(GlvError::InvalidParameter(
                "no system given: pass FILE, --exponents or --alpha/--beta".into(),
            )),
        }
    }
}
