use std::sync::Arc;

use clap::Args;
use serde_json::{json, Value};

use weil_core::cyclotomic::ResidueField;
use weil_core::finsymp::{Lagrangian, SympSpace};
use weil_core::heisenberg::ExtendedCharacter;
use weil_core::Error;

/// Largest model dimension q^m the CLI accepts.
pub const MAX_DIM: u64 = 81;
/// Largest q for which sweeps may enumerate the whole group.
pub const MAX_EXHAUSTIVE_Q: u64 = 27;

pub enum CliError {
    Config(String),
    Invariant(String),
}

impl CliError {
    /// Errors out of the engine after validation are invariant failures,
    /// except the few that can only come from bad input.
    pub fn core(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_) | Error::InvalidIdeal(_) | Error::EnumerationTooLarge { .. } => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Invariant(e.to_string()),
        }
    }
}

#[derive(Args, Clone)]
pub struct SpaceArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long, default_value_t = 1)]
    pub f: u32,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// "A" for Z[1/p, zeta_p], "Fl:<l>" for the residue field F_l(zeta_p).
    #[arg(long, default_value = "A")]
    pub ring: String,
}

#[derive(Clone)]
pub enum Ring {
    Universal,
    Residue(Arc<ResidueField>),
}

pub struct Config {
    pub p: u32,
    pub f: u32,
    pub m: usize,
    pub ring: Ring,
    pub ring_spec: String,
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

impl SpaceArgs {
    pub fn validate(&self) -> Result<Config, CliError> {
        let bad = |s: String| Err(CliError::Config(s));
        if self.p == 2 || !is_prime(self.p as u64) {
            return bad(format!("p = {} must be an odd prime", self.p));
        }
        if self.f == 0 || self.m == 0 {
            return bad("f and m must be positive".into());
        }
        let q = (self.p as u64).checked_pow(self.f).unwrap_or(u64::MAX);
        let dim = q.checked_pow(self.m as u32).unwrap_or(u64::MAX);
        if q > MAX_EXHAUSTIVE_Q {
            return bad(format!("q = {q} exceeds {MAX_EXHAUSTIVE_Q}"));
        }
        if dim > MAX_DIM {
            return bad(format!("model dimension q^m = {dim} exceeds {MAX_DIM}"));
        }
        let ring = if self.ring == "A" {
            Ring::Universal
        } else if let Some(l) = self.ring.strip_prefix("Fl:") {
            let l: u64 = l.parse().map_err(|_| CliError::Config(format!("bad ring {:?}", self.ring)))?;
            if l == self.p as u64 {
                return bad(format!("l = {l} must differ from p"));
            }
            Ring::Residue(ResidueField::new(l, self.p).map_err(|e| CliError::Config(e.to_string()))?)
        } else {
            return bad(format!("ring must be A or Fl:<l>, got {:?}", self.ring));
        };
        Ok(Config {
            p: self.p,
            f: self.f,
            m: self.m,
            ring,
            ring_spec: self.ring.clone(),
        })
    }
}

impl Config {
    pub fn space(&self) -> Result<Arc<SympSpace>, CliError> {
        SympSpace::with_params(self.p, self.f, self.m).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn reference_character(&self, space: &Arc<SympSpace>) -> ExtendedCharacter {
        ExtendedCharacter::untwisted(space, Lagrangian::standard_x(space))
    }

    /// X, Y, the oblique lagrangian, and X twisted by f_1.
    pub fn model_characters(&self, space: &Arc<SympSpace>) -> Vec<(&'static str, ExtendedCharacter)> {
        vec![
            ("X", self.reference_character(space)),
            ("Y", ExtendedCharacter::untwisted(space, Lagrangian::standard_y(space))),
            ("oblique", ExtendedCharacter::untwisted(space, Lagrangian::oblique(space))),
            (
                "X-twisted",
                ExtendedCharacter::new(space, Lagrangian::standard_x(space), space.f(0)).expect("valid twist"),
            ),
        ]
    }

    pub fn to_json(&self) -> Value {
        json!({"p": self.p, "f": self.f, "m": self.m, "ring": self.ring_spec})
    }
}
