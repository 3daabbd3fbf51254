//! Numerical property checks of the discretization, each reported as one
//! CSV row `check,mesh,p,eta1,eta2,observed,threshold,pass`.
//!
//! Rows come in three roles. Checks decide the battery outcome. Controls are
//! built to violate the property under test and pass when the violation is
//! detected; a failed control means the matching check cannot tell good from
//! bad and is printed, but does not change the outcome. Observations record
//! a number without a verdict.

pub mod checks;
pub mod suite;

pub use checks::*;
pub use suite::{run_suite, standard_battery, BatteryMesh, Suite, SuiteOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Check,
    Control,
    Observation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub check: String,
    pub mesh: String,
    pub p: usize,
    pub eta1: f64,
    pub eta2: f64,
    pub observed: f64,
    pub threshold: f64,
    pub pass: bool,
    pub role: Role,
}

pub const CSV_HEADER: &str = "check,mesh,p,eta1,eta2,observed,threshold,pass";

impl CheckReport {
    /// Check name as written to CSV: controls and observations carry a
    /// `:control` / `:observation` suffix.
    pub fn tagged_name(&self) -> String {
        match self.role {
            Role::Check => self.check.clone(),
            Role::Control => format!("{}:control", self.check),
            Role::Observation => format!("{}:observation", self.check),
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:.6e},{:.6e},{}",
            self.tagged_name(),
            self.mesh,
            self.p,
            self.eta1,
            self.eta2,
            self.observed,
            self.threshold,
            self.pass
        )
    }

    /// Whether this row makes the battery fail.
    pub fn is_failure(&self) -> bool {
        !self.pass && self.role == Role::Check
    }
}

pub fn to_csv(reports: &[CheckReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// True iff no check failed.
pub fn battery_passed(reports: &[CheckReport]) -> bool {
    !reports.iter().any(CheckReport::is_failure)
}
