//! Run settings shared by the command line and the optional JSON config
//! file. Keys are the long flag names; flags given on the command line win.

use std::path::{Path, PathBuf};

use parsetalk_core::{ChartConfig, Mode, ParseConfig, Preference};
use serde::Deserialize;

use crate::format::{read, LoadError};
use crate::harness::{parse_systems, BenchConfig, System, UnknownSystem};

#[derive(Clone, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Settings {
    pub system: Option<String>,
    pub mode: Option<String>,
    pub seed: Option<u64>,
    pub trace: Option<bool>,
    pub preference: Option<String>,
    pub pruning: Option<bool>,
    pub bounding: Option<bool>,
    pub systems: Option<String>,
    pub out: Option<PathBuf>,
    pub wall_time: Option<bool>,
    pub threads: Option<usize>,
    pub gap_cap: Option<usize>,
    pub edge_ceiling: Option<usize>,
    pub state_ceiling: Option<usize>,
    pub ambiguity_cap: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config file")]
    Load(#[from] LoadError),
    #[error("unknown mode `{0}` (expected restricted or exhaustive)")]
    Mode(String),
    #[error(transparent)]
    System(#[from] UnknownSystem),
    #[error("unknown preference `{0}` (expected one of {list})", list = Preference::IDS.join(", "))]
    Preference(String),
    #[error("missing --{0}")]
    Missing(&'static str),
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($f:ident),*) => {
        Settings { $($f: $top.$f.or($base.$f)),* }
    };
}

impl Settings {
    pub fn load(path: &Path) -> Result<Settings, LoadError> {
        Ok(serde_json::from_str(&read(path)?)?)
    }

    /// `self` with every field that `flags` sets replaced.
    pub fn overridden_by(self, flags: Settings) -> Settings {
        overlay!(
            self,
            flags,
            system,
            mode,
            seed,
            trace,
            preference,
            pruning,
            bounding,
            systems,
            out,
            wall_time,
            threads,
            gap_cap,
            edge_ceiling,
            state_ceiling,
            ambiguity_cap
        )
    }

    pub fn parse_config(&self) -> Result<ParseConfig, ConfigError> {
        let mut c = ParseConfig::default();
        if let Some(m) = &self.mode {
            c.mode = parse_mode(m)?;
        }
        if let Some(p) = &self.preference {
            Preference::from_id(p).map_err(|_| ConfigError::Preference(p.clone()))?;
            c.preference = p.clone();
        }
        c.seed = self.seed.unwrap_or(c.seed);
        c.trace = self.trace.unwrap_or(c.trace);
        c.memoization_pruning = self.pruning.unwrap_or(c.memoization_pruning);
        c.barrier_bounding = self.bounding.unwrap_or(c.barrier_bounding);
        c.state_ceiling = self.state_ceiling.unwrap_or(c.state_ceiling);
        c.ambiguity_cap = self.ambiguity_cap.unwrap_or(c.ambiguity_cap);
        Ok(c)
    }

    pub fn chart_config(&self) -> ChartConfig {
        let d = ChartConfig::default();
        ChartConfig {
            gap_cap: self.gap_cap.unwrap_or(d.gap_cap),
            edge_ceiling: self.edge_ceiling.unwrap_or(d.edge_ceiling),
            ..d
        }
    }

    pub fn bench_config(&self) -> Result<BenchConfig, ConfigError> {
        Ok(BenchConfig {
            parse: self.parse_config()?,
            chart: self.chart_config(),
            wall_time: self.wall_time.unwrap_or(false),
            threads: self.threads.unwrap_or(0),
        })
    }

    /// The system for a single parse: `engine` (the default) follows
    /// `mode`; otherwise one of the benchmark system ids.
    pub fn single_system(&self) -> Result<System, ConfigError> {
        match self.system.as_deref() {
            None | Some("engine") => Ok(match self.parse_config()?.mode {
                Mode::Restricted => System::EngineRestricted,
                Mode::Exhaustive => System::EngineExhaustive,
            }),
            Some(s) => Ok(s.parse()?),
        }
    }

    pub fn bench_systems(&self) -> Result<Vec<System>, ConfigError> {
        let list = self.systems.as_deref().ok_or(ConfigError::Missing("systems"))?;
        Ok(parse_systems(list)?)
    }
}

fn parse_mode(m: &str) -> Result<Mode, ConfigError> {
    match m {
        "restricted" => Ok(Mode::Restricted),
        "exhaustive" => Ok(Mode::Exhaustive),
        other => Err(ConfigError::Mode(other.to_string())),
    }
}
