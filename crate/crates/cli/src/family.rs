//! Building a code from command-line parameters.

use clap::ValueEnum;
use graphcode::double::DoublePrimeCode;
use graphcode::extreme::exists_extreme;
use graphcode::field::smallest_prime_power_at_least;
use graphcode::{Error, ExtremeCode, Field, GraphCode, SingleParityCode, TripleCode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Single,
    Double,
    Triple,
    Extreme,
}

impl FamilyArg {
    pub fn name(self) -> &'static str {
        match self {
            FamilyArg::Single => "single",
            FamilyArg::Double => "double",
            FamilyArg::Triple => "triple",
            FamilyArg::Extreme => "extreme",
        }
    }

    /// Number of node failures the family is built to correct.
    pub fn default_rho(self, n: usize) -> usize {
        match self {
            FamilyArg::Single => 1,
            FamilyArg::Double => 2,
            FamilyArg::Triple => 3,
            FamilyArg::Extreme => n - 2,
        }
    }

    /// Smallest field the family supports on `n` nodes.
    pub fn default_q(self, n: usize) -> Result<u32, Error> {
        match self {
            FamilyArg::Single | FamilyArg::Double => Ok(2),
            FamilyArg::Triple => smallest_prime_power_at_least(n as u32 + 1).ok_or(Error::FieldTooSmall { n, q: 0 }),
            FamilyArg::Extreme => (2..=1u32 << 16)
                .filter(|&q| graphcode::field::prime_power(q as u64).is_some())
                .find(|&q| exists_extreme(n, q))
                .ok_or(Error::NoSuchCode { n, q: 0 }),
        }
    }

    pub fn field(self, n: usize, q: Option<u32>) -> Result<Field, Error> {
        let q = match q {
            Some(q) => q,
            None => self.default_q(n)?,
        };
        Field::new(q)
    }

    pub fn build(self, n: usize, field: &Field, seed: u64) -> Result<Box<dyn GraphCode>, Error> {
        if !(graphcode::graph::MIN_NODES..=graphcode::graph::MAX_NODES).contains(&n) {
            return Err(Error::NodeCount(n));
        }
        Ok(match self {
            FamilyArg::Single => Box::new(SingleParityCode::new(n, field)?),
            FamilyArg::Double => {
                if field.order() != 2 {
                    return Err(Error::FieldMismatch);
                }
                Box::new(DoublePrimeCode::new(n)?)
            }
            FamilyArg::Triple => Box::new(TripleCode::new(n, field)?),
            FamilyArg::Extreme => Box::new(ExtremeCode::construct(n, field, seed)?),
        })
    }
}
