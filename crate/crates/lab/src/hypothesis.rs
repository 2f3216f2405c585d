//! Sobolev and doubling hypotheses consumed by conditional statements.
//!
//! A conditional statement only reports a pass when its hypothesis comes from
//! an [`SVEstimate`] that covers the required radii and met its targets.
//! Declared constants still produce margins, but the verdict is withheld.

use hklab::geometry::SVEstimate;
use hklab::{CheckReport, Error, Graph, Result};

#[derive(Clone, Copy, Debug)]
pub enum Hypothesis<'e> {
    Certified(&'e SVEstimate),
    /// Unverified constants, e.g. for negative controls.
    Declared {
        c_s: f64,
        c_d: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constants {
    pub c_s: f64,
    pub c_d: f64,
    pub certified: bool,
}

impl Hypothesis<'_> {
    /// Constants for `SV(n, r1, r2)` at `x`.
    pub fn resolve(&self, g: &Graph, x: usize, r1: f64, r2: f64, n: f64) -> Result<Constants> {
        match *self {
            Hypothesis::Declared { c_s, c_d } => {
                if !(c_s > 0.0) || !(c_d > 0.0) {
                    return Err(Error::Precondition("declared constants must be positive".into()));
                }
                Ok(Constants { c_s, c_d, certified: false })
            }
            Hypothesis::Certified(sv) => {
                if sv.center != g.id(x) {
                    return Err(Error::Uncertified(format!("certificate is for center {}, not {}", sv.center, g.id(x))));
                }
                if !(sv.r1 <= r1 && r2 <= sv.r2) {
                    return Err(Error::Uncertified(format!("certificate covers [{}, {}], the statement needs [{r1}, {r2}]", sv.r1, sv.r2)));
                }
                if sv.n != n {
                    return Err(Error::Uncertified(format!("certificate has n = {}, the statement uses n = {n}", sv.n)));
                }
                if !sv.passed() {
                    return Err(Error::Uncertified(format!("certificate at {} missed its targets", sv.center)));
                }
                Ok(Constants { c_s: sv.sobolev_constant(), c_d: sv.doubling_constant(), certified: true })
            }
        }
    }
}

/// Applies the conditional-soundness rule to a finished report.
pub fn gate(report: CheckReport, constants: &Constants) -> CheckReport {
    if constants.certified {
        report
    } else {
        report.uncertified("hypothesis constants were declared, not certified")
    }
}
