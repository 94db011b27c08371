//! Acceptance suite: one self-contained numerical check per criterion, each reporting the
//! quantities it compared and whether they met the pinned tolerances.

mod checks;

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use crate::error::Result;
use crate::precision::PrecisionContext;

pub use checks::BUNDLED_SAMPLE;

/// Number of numerical criteria; the aggregate is one more.
pub const CRITERIA: u32 = 14;
/// Wall-time budget of the aggregate, in seconds.
pub const TOTAL_BUDGET_SECS: f64 = 90.0 * 60.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Mode {
    /// Reduced grids where a criterion lists several sizes.
    Quick,
    /// Exactly the grids of the criteria.
    Full,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Outcome {
    pub passed: bool,
    pub metrics: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { passed: true, ..Default::default() }
    }

    fn metric(&mut self, k: impl Into<String>, v: f64) {
        self.metrics.insert(k.into(), v);
    }

    /// Record a sub-check; the outcome passes only if every sub-check does.
    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.passed = false;
            self.notes.push(format!("failed: {}", what.into()));
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub wall_time: f64,
    pub budget_secs: f64,
    pub metrics: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub mode: Mode,
    pub digits: u32,
    pub criteria: Vec<CriterionReport>,
    pub passed: bool,
    pub wall_time: f64,
}

impl SuiteReport {
    /// One line per criterion plus the aggregate line.
    pub fn lines(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .criteria
            .iter()
            .map(|c| format!("criterion {:>2} {:<44} {} ({:.1} s)", c.id, c.name, verdict(c.passed), c.wall_time))
            .collect();
        out.push(format!(
            "criterion 15 {:<44} {} ({:.1} s of {:.0} s)",
            "aggregate",
            verdict(self.passed),
            self.wall_time,
            TOTAL_BUDGET_SECS
        ));
        out
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Name and budget in seconds of criterion `id`.
pub fn criterion_info(id: u32) -> Option<(&'static str, f64)> {
    Some(match id {
        1 => ("moment coefficient table", 30.0),
        2 => ("a_4 closed form", 10.0),
        3 => ("residue main terms", 300.0),
        4 => ("psi_hat(1) leading term", 120.0),
        5 => ("psi_hat derivative leading constants", 900.0),
        6 => ("h* zero structure", 60.0),
        7 => ("h* derivatives at 1/2", 120.0),
        8 => ("contour-shift invariance", 300.0),
        9 => ("oscillatory suite", 300.0),
        10 => ("decay certificates", 600.0),
        11 => ("Hecke and Kloosterman exactness", 60.0),
        12 => ("Dirichlet identities", 120.0),
        13 => ("Lerch functional equation", 120.0),
        14 => ("moment integral sanity", 1200.0),
        _ => return None,
    })
}

/// Run criterion `id`. Errors from the numerics become a failed outcome with the message.
pub fn run_criterion(id: u32, mode: Mode, ctx: &PrecisionContext) -> Option<CriterionReport> {
    let (name, budget) = criterion_info(id)?;
    let start = Instant::now();
    let res: Result<Outcome> = match id {
        1 => checks::coefficient_table(ctx),
        2 => checks::a4_closed_form(ctx),
        3 => checks::residue_main_terms(ctx),
        4 => checks::psi_hat_leading(ctx),
        5 => checks::psi_hat_derivative_constants(ctx),
        6 => checks::hstar_zeros(ctx),
        7 => checks::hstar_jet(ctx),
        8 => checks::contour_invariance(mode, ctx),
        9 => checks::oscillatory_suite(ctx),
        10 => checks::decay_certificates(mode, ctx),
        11 => checks::hecke_kloosterman(ctx),
        12 => checks::dirichlet_identities(ctx),
        13 => checks::lerch_functional_equation(ctx),
        14 => checks::moment_integral_sanity(ctx),
        _ => unreachable!(),
    };
    let out = res.unwrap_or_else(|e| Outcome { passed: false, metrics: BTreeMap::new(), notes: vec![format!("error: {}", e)] });
    let wall_time = start.elapsed().as_secs_f64();
    let mut notes = out.notes;
    let in_budget = wall_time <= budget;
    if !in_budget {
        notes.push(format!("over budget: {:.1} s > {:.0} s", wall_time, budget));
    }
    Some(CriterionReport {
        id,
        name,
        passed: out.passed && in_budget,
        wall_time,
        budget_secs: budget,
        metrics: out.metrics,
        notes,
    })
}

/// Run the listed criteria (all of them when `ids` is empty), calling `progress` after each.
pub fn run_suite<F: FnMut(&CriterionReport)>(mode: Mode, ids: &[u32], ctx: &PrecisionContext, mut progress: F) -> SuiteReport {
    let start = Instant::now();
    let all: Vec<u32> = if ids.is_empty() { (1..=CRITERIA).collect() } else { ids.to_vec() };
    let mut criteria = Vec::new();
    for id in all {
        if let Some(r) = run_criterion(id, mode, ctx) {
            progress(&r);
            criteria.push(r);
        }
    }
    let wall_time = start.elapsed().as_secs_f64();
    let passed = criteria.iter().all(|c| c.passed) && wall_time <= TOTAL_BUDGET_SECS;
    SuiteReport { mode, digits: ctx.digits, criteria, passed, wall_time }
}
