//! Boundary pair to quarter-plane solution: gates, a(k), residues of h,
//! dressing.

use crate::admissibility::{self, AdmissibilityReport, GateOptions};
use crate::boundary::PeriodicPair;
use crate::dressing::DressedSolution;
use crate::error::Result;
use crate::scalar_rh::{PoleData, ScalarFunctions, ScalarOptions};

#[derive(Debug, Clone, Copy, Default)]
pub struct PipelineOptions {
    pub gates: GateOptions,
    /// Defaults to `ScalarOptions::for_pair`.
    pub scalar: Option<ScalarOptions>,
}

pub struct Build {
    pub report: AdmissibilityReport,
    pub solution: DressedSolution,
    /// None for the zero pair.
    pub scalar: Option<ScalarFunctions>,
}

impl Build {
    pub fn pole_data(&self) -> &PoleData {
        &self.solution.pole_data
    }
}

pub enum Outcome {
    Built(Box<Build>),
    Rejected(AdmissibilityReport),
}

pub fn build(pair: &PeriodicPair, opts: &PipelineOptions) -> Result<Outcome> {
    let report = admissibility::verdict(pair, &opts.gates)?;
    if !report.is_admissible() {
        return Ok(Outcome::Rejected(report));
    }
    let omega = pair.lattice_omega();
    if pair.is_zero() {
        let solution = DressedSolution::new(PoleData::empty(omega))?;
        return Ok(Outcome::Built(Box::new(Build { report, solution, scalar: None })));
    }
    let sopts = opts.scalar.unwrap_or_else(|| ScalarOptions::for_pair(pair));
    let scalar = ScalarFunctions::from_pair(pair, sopts)?;
    let pd = scalar.h_residues(omega, &report.pb_poles())?;
    let solution = DressedSolution::new(pd)?;
    Ok(Outcome::Built(Box::new(Build { report, solution, scalar: Some(scalar) })))
}
