use crate::error::CliError;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Pipeline stages in dependency order; each needs the one before it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Background,
    Jost,
    Scattering,
    Reflection,
    Verification,
}

impl Stage {
    pub const ALL: [Stage; 5] = [Stage::Background, Stage::Jost, Stage::Scattering, Stage::Reflection, Stage::Verification];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Background => "background",
            Stage::Jost => "jost",
            Stage::Scattering => "scattering",
            Stage::Reflection => "reflection",
            Stage::Verification => "verification",
        }
    }

    pub fn needs(self) -> Option<Stage> {
        match self {
            Stage::Background => None,
            Stage::Jost => Some(Stage::Background),
            Stage::Scattering => Some(Stage::Jost),
            Stage::Reflection => Some(Stage::Scattering),
            Stage::Verification => Some(Stage::Reflection),
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s.trim())
            .ok_or_else(|| format!("unknown stage {s:?}; expected one of background, jost, scattering, reflection, verification"))
    }
}

/// Sorts and dedups the requested stages; every stage's prerequisite must be
/// requested too.
pub fn plan(stages: &[Stage]) -> Result<Vec<Stage>, CliError> {
    let mut v = stages.to_vec();
    v.sort();
    v.dedup();
    for &s in &v {
        if let Some(n) = s.needs() {
            if !v.contains(&n) {
                return Err(CliError::Dependency { stage: s, needs: n });
            }
        }
    }
    Ok(v)
}
