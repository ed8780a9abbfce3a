use std::fmt;

use gadtparam_core::kernel::Caps;

pub const MAX_REL_ENUM_VAR: &str = "GADTPARAM_MAX_REL_ENUM";

/// Overrides above these are refused.
pub const HARD_LIMITS: Caps = Caps {
    max_carrier: 256,
    max_depth: 6,
    max_rel_enum: 1 << 24,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Everything a command needs besides its own operands, validated before
/// any analysis runs.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub caps: Caps,
    pub format: Format,
    pub witness: bool,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CapOverrides {
    pub max_carrier: Option<usize>,
    pub max_depth: Option<usize>,
    pub max_rel_enum: Option<usize>,
}

fn bounded(name: &str, value: usize, limit: usize) -> Result<usize, ConfigError> {
    if value == 0 {
        return Err(ConfigError(format!("{name} must be positive")));
    }
    if value > limit {
        return Err(ConfigError(format!("{name} = {value} exceeds the hard limit {limit}")));
    }
    Ok(value)
}

impl RunConfig {
    /// Flags take precedence over the environment variable.
    pub fn new(
        overrides: CapOverrides,
        env_rel_enum: Option<&str>,
        format: Format,
        witness: bool,
    ) -> Result<RunConfig, ConfigError> {
        let mut caps = Caps::default();
        if let Some(raw) = env_rel_enum {
            let v = raw
                .trim()
                .parse::<usize>()
                .map_err(|_| ConfigError(format!("{MAX_REL_ENUM_VAR} = `{raw}` is not a number")))?;
            caps.max_rel_enum = bounded(MAX_REL_ENUM_VAR, v, HARD_LIMITS.max_rel_enum)?;
        }
        if let Some(v) = overrides.max_rel_enum {
            caps.max_rel_enum = bounded("--max-rel-enum", v, HARD_LIMITS.max_rel_enum)?;
        }
        if let Some(v) = overrides.max_carrier {
            caps.max_carrier = bounded("--max-carrier", v, HARD_LIMITS.max_carrier)?;
        }
        if let Some(v) = overrides.max_depth {
            caps.max_depth = bounded("--max-depth", v, HARD_LIMITS.max_depth)?;
        }
        Ok(RunConfig { caps, format, witness })
    }
}
