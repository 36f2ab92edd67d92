//! Resource caps. Exceeding a cap is always a hard error, never a silent
//! truncation.

use crate::error::{Error, Result};
use crate::gf::DEFAULT_FIELD_CAP;

pub const CAPS_ENV: &str = "SUPERCLUSTER_CAPS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest field order q.
    pub field: u32,
    /// Largest enumerated space, q^(n(n-1)/2), for group or dual enumeration.
    pub group: u128,
    /// Largest pair count |Ψ1|·|Ψ2| when counting decompositions.
    pub orbit: u128,
    /// Largest number of templates B(n, q) in a character table.
    pub table: u128,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            field: DEFAULT_FIELD_CAP,
            group: 1 << 20,
            orbit: 1 << 24,
            table: 4096,
        }
    }
}

impl Caps {
    /// Applies `key=value` overrides separated by commas, e.g. `group=4096,orbit=65536`.
    pub fn with_overrides(mut self, spec: &str) -> Result<Caps> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("cap override {item:?} is not key=value")))?;
            let value: u128 = value
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("cap value in {item:?}")))?;
            if value == 0 {
                return Err(Error::Argument(format!("cap {key} must be positive")));
            }
            match key.trim() {
                "field" => self.field = value.min(u32::MAX as u128) as u32,
                "group" => self.group = value,
                "orbit" => self.orbit = value,
                "table" => self.table = value,
                other => return Err(Error::Parse(format!("unknown cap {other:?}"))),
            }
        }
        Ok(self)
    }

    /// Defaults, overridden by the `SUPERCLUSTER_CAPS` environment variable when set.
    pub fn from_env() -> Result<Caps> {
        match std::env::var(CAPS_ENV) {
            Ok(spec) => Caps::default().with_overrides(&spec),
            Err(_) => Ok(Caps::default()),
        }
    }
}
