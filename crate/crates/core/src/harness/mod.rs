//! Reproduction experiments and cross-oracle checks. Each experiment takes
//! its parameter record and the tolerance set and returns an
//! [`ExperimentReport`] whose verdicts name the tolerance they were judged by.

mod checks;
mod fig2;
mod fig3;
mod identities;
mod operator_suite;
mod periodic;
mod report;
mod tolerances;

pub use checks::{
    convergence_errors, convergence_study, hirota_check, master_residual, sign_resolution,
    ConvergenceParams, HirotaParams, MasterParams, SignParams,
};
pub use fig2::{fig2_experiment, Fig2Outcome, Fig2Params};
pub use fig3::{fig3_experiment, Fig3Outcome, Fig3Params};
pub use identities::{
    coth_transform_closed, coth_transform_quadrature, identity_suite,
    odd_kernel_transform_quadrature, IdentityParams,
};
pub use operator_suite::{
    eigen_defect, involution_defect, involution_defect_spectral, operator_suite, random_zero_mean,
    OperatorParams,
};
pub use periodic::{
    hyperbolic_limit_experiment, periodic_soliton_experiment, LimitParams, PeriodicParams,
};
pub use report::{
    Comparison, ErrorNorms, ExperimentReport, PoleDiagnostics, Verdict, REPORT_SCHEMA,
};
pub use tolerances::Tolerances;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::par;

/// Parameters of every experiment plus the shared tolerances.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarnessConfig {
    pub tolerances: Tolerances,
    pub master: MasterParams,
    pub fig2: Fig2Params,
    pub fig3: Fig3Params,
    pub operators: OperatorParams,
    pub identities: IdentityParams,
    pub periodic_one: PeriodicParams,
    #[serde(default = "PeriodicParams::two_soliton")]
    pub periodic_two: PeriodicParams,
    pub limit: LimitParams,
    pub hirota: HirotaParams,
    pub sign: SignParams,
    pub convergence: ConvergenceParams,
}

impl HarnessConfig {
    pub fn new() -> Self {
        HarnessConfig {
            periodic_two: PeriodicParams::two_soliton(),
            ..Default::default()
        }
    }
}

/// The experiments, by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Master,
    Fig2,
    Fig3,
    Operators,
    Identities,
    PeriodicOne,
    PeriodicTwo,
    Limit,
    Hirota,
    Sign,
    Convergence,
}

impl Experiment {
    pub const ALL: [Experiment; 11] = [
        Experiment::Master,
        Experiment::Fig2,
        Experiment::Fig3,
        Experiment::Operators,
        Experiment::Identities,
        Experiment::PeriodicOne,
        Experiment::PeriodicTwo,
        Experiment::Limit,
        Experiment::Hirota,
        Experiment::Sign,
        Experiment::Convergence,
    ];

    /// Checks that need no long time integration.
    pub const FAST: [Experiment; 5] = [
        Experiment::Operators,
        Experiment::Identities,
        Experiment::Hirota,
        Experiment::Sign,
        Experiment::Fig3,
    ];

    pub fn run(self, cfg: &HarnessConfig) -> Result<ExperimentReport> {
        let tol = &cfg.tolerances;
        match self {
            Experiment::Master => master_residual(&cfg.master, tol),
            Experiment::Fig2 => Ok(fig2_experiment(&cfg.fig2, tol)?.report),
            Experiment::Fig3 => Ok(fig3_experiment(&cfg.fig3, tol)?.report),
            Experiment::Operators => operator_suite(&cfg.operators, tol),
            Experiment::Identities => Ok(identity_suite(&cfg.identities, tol)),
            Experiment::PeriodicOne => periodic_soliton_experiment(&cfg.periodic_one, tol),
            Experiment::PeriodicTwo => periodic_soliton_experiment(&cfg.periodic_two, tol),
            Experiment::Limit => hyperbolic_limit_experiment(&cfg.limit, tol),
            Experiment::Hirota => hirota_check(&cfg.hirota, tol),
            Experiment::Sign => sign_resolution(&cfg.sign, tol),
            Experiment::Convergence => convergence_study(&cfg.convergence, tol),
        }
    }
}

/// Runs the given experiments as independent parallel jobs.
pub fn run_all(
    cfg: &HarnessConfig,
    which: &[Experiment],
) -> Vec<(Experiment, Result<ExperimentReport>)> {
    par::map_jobs(which, |&e| (e, e.run(cfg)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips_and_fills_defaults() {
        let cfg = HarnessConfig::new();
        let s = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<HarnessConfig>(&s).unwrap(), cfg);
        let partial: HarnessConfig =
            serde_json::from_str(r#"{"tolerances": {"swap": 0.01}}"#).unwrap();
        assert_eq!(partial.tolerances.swap, 0.01);
        assert_eq!(partial.periodic_two.a.len(), 2);
    }
}
