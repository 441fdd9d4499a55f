//! Scenario runner for the cavity energy engine: config loading, figure
//! scenarios, table output and the finite-difference pressure helper.

pub mod config;
pub mod output;
pub mod pressure;
pub mod scenario;
pub mod units;
