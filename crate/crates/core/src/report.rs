//! Outcome records shared by metric checks, bound verification and the lab.

use serde::{Deserialize, Serialize};

/// Log-margins above this value are tallied as vacuous passes.
pub const VACUOUS_LOG_MARGIN: f64 = 500.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    VacuousPass,
    Fail,
    Skipped,
    Uncertified,
}

impl Status {
    /// Passing in the exit-code sense: vacuous passes count, skips do not fail.
    pub fn is_ok(self) -> bool {
        matches!(self, Status::Pass | Status::VacuousPass | Status::Skipped)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::VacuousPass => "vacuous-pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
            Status::Uncertified => "uncertified",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One verified inequality instance.
///
/// In linear mode `margin = rhs - lhs`; in log mode `lhs`/`rhs` are natural
/// logarithms and `margin = rhs - lhs` is the log-margin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub statement: String,
    pub instance: String,
    pub seed: Option<u64>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub log_space: bool,
    pub tolerance: f64,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    pub fn linear(statement: &str, instance: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = rhs - lhs;
        let status = if margin >= -tolerance || (lhs == rhs) { Status::Pass } else { Status::Fail };
        CheckReport {
            statement: statement.to_owned(),
            instance: instance.into(),
            seed: None,
            lhs,
            rhs,
            margin,
            log_space: false,
            tolerance,
            status,
            note: None,
        }
    }

    /// `log_lhs` may be `-inf` (vanishing left side), which always passes.
    pub fn logarithmic(statement: &str, instance: impl Into<String>, log_lhs: f64, log_rhs: f64, tolerance: f64) -> Self {
        let margin = if log_lhs == f64::NEG_INFINITY { f64::INFINITY } else { log_rhs - log_lhs };
        let status = if margin.is_nan() || margin < -tolerance {
            Status::Fail
        } else if margin > VACUOUS_LOG_MARGIN {
            Status::VacuousPass
        } else {
            Status::Pass
        };
        CheckReport {
            statement: statement.to_owned(),
            instance: instance.into(),
            seed: None,
            lhs: log_lhs,
            rhs: log_rhs,
            margin,
            log_space: true,
            tolerance,
            status,
            note: None,
        }
    }

    pub fn skipped(statement: &str, instance: impl Into<String>, note: impl Into<String>) -> Self {
        CheckReport {
            statement: statement.to_owned(),
            instance: instance.into(),
            seed: None,
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            log_space: false,
            tolerance: 0.0,
            status: Status::Skipped,
            note: Some(note.into()),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Keeps the margins but withholds a pass verdict.
    pub fn uncertified(mut self, note: impl Into<String>) -> Self {
        if self.status != Status::Fail {
            self.status = Status::Uncertified;
        }
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status.is_ok()
    }
}

/// Tally over a batch of reports.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Tally {
    pub total: usize,
    pub pass: usize,
    pub vacuous_pass: usize,
    pub fail: usize,
    pub skipped: usize,
    pub uncertified: usize,
    pub min_margin: Option<f64>,
}

impl Tally {
    pub fn add(&mut self, status: Status, margin: f64) {
        self.total += 1;
        match status {
            Status::Pass => self.pass += 1,
            Status::VacuousPass => self.vacuous_pass += 1,
            Status::Fail => self.fail += 1,
            Status::Skipped => self.skipped += 1,
            Status::Uncertified => self.uncertified += 1,
        }
        if status != Status::Skipped && !margin.is_nan() {
            self.min_margin = Some(self.min_margin.map_or(margin, |m| m.min(margin)));
        }
    }

    pub fn of_reports<'a>(reports: impl IntoIterator<Item = &'a CheckReport>) -> Self {
        let mut t = Tally::default();
        for r in reports {
            t.add(r.status, r.margin);
        }
        t
    }

    pub fn all_ok(&self) -> bool {
        self.fail == 0 && self.uncertified == 0
    }
}
