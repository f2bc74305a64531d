//! Scenario files, seeded function families, campaign execution and report
//! output for the `tsverify` command.

pub mod campaign;
pub mod config;
pub mod fixtures;
pub mod generate;
pub mod report;

pub use campaign::{run_campaign, run_campaign_with, RunOptions};
pub use config::{
    load_config, parse_config, CampaignConfig, Check, ConfigError, FunctionSource, ScenarioConfig, Tolerances,
};
pub use generate::{generate_functions, Family, GeneratorSpec};
pub use report::{Provenance, Row, Summary, VerificationReport};

/// Environment variable that replaces every generator seed.
pub const SEED_ENV: &str = "TSVERIFY_SEED";
