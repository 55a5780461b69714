use serde::Serialize;
use serde_json::{json, Value};

use super::config::PipelineConfig;
use crate::complete_intersections::{
    differentials_at_fixed_point, invariance_check, local_action_check, smoothness_scan_with,
    symmetry_conditions, CatalogEntry, Differentials, ScanOptions,
};
use crate::linalg_paths::{negative_parity, synth_commuting_path, CommutingPair};
use crate::local_flows::{collar_commutator_class, twist_profile};
use crate::parallel::Execution;
use crate::spin_lift::spin_obstruction_of_pair;
use crate::SquareMatrix;

pub const GLOBAL_ISOTOPY_HYPOTHESIS: &str = "global isotopy rel boundary of the standardized involutions on the \
complement of the fixed-point neighbourhood is a topological hypothesis and is not checked numerically";
pub const SAMPLED_SMOOTHNESS_HYPOTHESIS: &str = "smoothness and genericity of the complete intersection are \
probed by Monte Carlo sampling and exact special-point checks, not certified";
const ORIENTATION_NOTE: &str = "c reverses orientation (odd complex dimension); the commuting-path and \
Spin-lift stages need an orientation-preserving pair and were not run";

/// Stages of [`run_verify_family`], in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StageName {
    FamilyCatalog,
    Symmetry,
    Invariance,
    Smoothness,
    LocalAction,
    Differentials,
    NegativeParity,
    Synth,
    TwistProfile,
    CollarClass,
    SpinObstruction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StageStatus {
    Pass,
    Fail,
    Skipped,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Error,
}

impl Verdict {
    /// Process exit code: 0 pass, 1 fail, 2 error.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Error => 2,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StageRecord {
    pub stage: StageName,
    pub status: StageStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub data: Value,
}

/// Headline numbers of a run (absent when the producing stage did not run).
#[derive(Debug, Clone, Default, Serialize)]
pub struct ReportSummary {
    pub system: Option<String>,
    pub complex_dimension: Option<usize>,
    pub min_singular_value: Option<f64>,
    pub chart_residual_a: Option<f64>,
    pub chart_residual_c: Option<f64>,
    pub da: Option<Vec<Vec<f64>>>,
    pub dc: Option<Vec<Vec<f64>>>,
    pub det_dc: Option<f64>,
    pub nu: Option<u8>,
    pub path_endpoint_error: Option<f64>,
    pub path_commutator_residual: Option<f64>,
    pub collar_class: Option<i8>,
    pub spin_sign: Option<i8>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub config: PipelineConfig,
    pub substitutions: Vec<String>,
    pub stages: Vec<StageRecord>,
    pub summary: ReportSummary,
    pub verdict: Verdict,
    pub exit_code: i32,
    pub unverified_hypotheses: Vec<String>,
}

impl VerificationReport {
    pub fn stage(&self, name: StageName) -> Option<&StageRecord> {
        self.stages.iter().find(|s| s.stage == name)
    }
}

fn matrix_rows(m: &SquareMatrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

enum Outcome<T> {
    Pass(Value, T),
    Fail(Value, String),
    /// Not applicable; later stages still run.
    Skip(String),
}

struct Runner {
    stages: Vec<StageRecord>,
    halted: bool,
    errored: bool,
}

impl Runner {
    fn stage<T, E: std::fmt::Display>(&mut self, stage: StageName, f: impl FnOnce() -> Result<Outcome<T>, E>) -> Option<T> {
        if self.halted {
            self.stages.push(StageRecord {
                stage,
                status: StageStatus::Skipped,
                message: Some("an earlier stage did not pass".into()),
                data: Value::Null,
            });
            return None;
        }
        let (status, message, data, value) = match f() {
            Ok(Outcome::Pass(data, v)) => (StageStatus::Pass, None, data, Some(v)),
            Ok(Outcome::Fail(data, msg)) => {
                self.halted = true;
                (StageStatus::Fail, Some(msg), data, None)
            }
            Ok(Outcome::Skip(msg)) => (StageStatus::Skipped, Some(msg), Value::Null, None),
            Err(e) => {
                self.halted = true;
                self.errored = true;
                (StageStatus::Error, Some(e.to_string()), Value::Null, None)
            }
        };
        self.stages.push(StageRecord { stage, status, message, data });
        value
    }
}

fn check<T>(ok: bool, data: Value, value: T, failure: impl FnOnce() -> String) -> Outcome<T> {
    if ok { Outcome::Pass(data, value) } else { Outcome::Fail(data, failure()) }
}

/// Runs the verification chain for one family member.
///
/// Stages run in the order of [`StageName`]; the first failing or erroring
/// stage stops the chain and the rest are recorded as skipped. For odd complex
/// dimension the orientation-dependent stages are skipped without stopping.
pub fn run_verify_family(config: &PipelineConfig) -> VerificationReport {
    let mut r = Runner { stages: Vec::new(), halted: false, errored: false };
    let mut summary = ReportSummary::default();
    let mut substitutions = Vec::new();
    let mut hypotheses = vec![GLOBAL_ISOTOPY_HYPOTHESIS.to_string(), SAMPLED_SMOOTHNESS_HYPOTHESIS.to_string()];
    let tol = &config.tolerances;

    let entry: Option<CatalogEntry> = r.stage(StageName::FamilyCatalog, || {
        config.validate()?;
        let e = config.build_system()?;
        Ok::<_, super::PipelineError>(Outcome::Pass(
            json!({
                "family": e.family.name(),
                "system": e.system.to_string(),
                "factor_dims": e.system.factor_dims(),
                "degree_matrix": e.system.degree_matrix(),
                "complex_dimension": e.system.complex_dimension(),
            }),
            e,
        ))
    });
    if let Some(e) = &entry {
        substitutions = e.substitutions.clone();
        summary.system = Some(e.system.to_string());
        summary.complex_dimension = Some(e.system.complex_dimension());
    }
    let sys = entry.map(|e| e.system);
    let sys = sys.as_ref();

    r.stage(StageName::Symmetry, || {
        let rep = symmetry_conditions(sys.expect("catalog stage passed"));
        let data = serde_json::to_value(&rep).expect("serializable");
        Ok::<_, String>(check(rep.all_hold(), data, (), || "a polynomial violates the symmetry conditions".into()))
    });

    r.stage(StageName::Invariance, || {
        let rep = invariance_check(sys.expect("earlier stage passed"), config.invariance_samples, config.seed);
        let data = serde_json::to_value(&rep).expect("serializable");
        Ok::<_, String>(check(rep.holds() && rep.consistent(), data, (), || {
            "p(a(z)) = p(z) or p(c(z)) = conj p(z) fails".into()
        }))
    });

    r.stage(StageName::Smoothness, || {
        let opts = ScanOptions {
            num_samples: config.n_samples,
            seed: config.seed,
            sigma_threshold: tol.sigma_threshold,
            execution: Execution::Parallel,
            workers: config.workers,
            frame_seed: None,
        };
        let rep = smoothness_scan_with(sys.expect("earlier stage passed"), &opts)?;
        summary.min_singular_value = Some(rep.min_singular_value);
        let data = serde_json::to_value(&rep).expect("serializable");
        Ok::<_, crate::complete_intersections::PolyError>(check(!rep.singular_detected(), data, (), || {
            "singular points detected".into()
        }))
    });

    r.stage(StageName::LocalAction, || {
        let rep = local_action_check(sys.expect("earlier stage passed"), config.chart_samples, tol.chart_radius, config.seed)?;
        summary.chart_residual_a = Some(rep.res_a);
        summary.chart_residual_c = Some(rep.res_c);
        let ok = rep.res_a <= tol.chart_residual && rep.res_c <= tol.chart_residual;
        let data = serde_json::to_value(&rep).expect("serializable");
        Ok::<_, crate::complete_intersections::PolyError>(check(ok, data, (), || {
            format!("chart residuals exceed {:e}", tol.chart_residual)
        }))
    });

    let diffs: Option<Differentials> = r.stage(StageName::Differentials, || {
        let d = differentials_at_fixed_point(sys.expect("earlier stage passed"))?;
        summary.da = Some(matrix_rows(&d.da));
        summary.dc = Some(matrix_rows(&d.dc));
        summary.det_dc = Some(d.det_dc);
        let data = json!({
            "da": matrix_rows(&d.da),
            "dc": matrix_rows(&d.dc),
            "det_da": d.det_da,
            "det_dc": d.det_dc,
            "fd_residual_a": d.fd_residual_a,
            "fd_residual_c": d.fd_residual_c,
            "free_coordinates": d.free_coordinates,
            "c_preserves_orientation": d.c_preserves_orientation(),
        });
        Ok::<_, crate::complete_intersections::PolyError>(Outcome::Pass(data, d))
    });
    let orientation_ok = diffs.as_ref().map(Differentials::c_preserves_orientation).unwrap_or(true);
    if !orientation_ok {
        hypotheses.push(ORIENTATION_NOTE.to_string());
    }

    r.stage(StageName::NegativeParity, || {
        let d = diffs.as_ref().expect("earlier stage passed");
        let pair = CommutingPair::general(d.da.clone(), d.dc.clone(), 1e-12)?;
        let nu = negative_parity(&pair)?;
        summary.nu = Some(nu);
        Ok::<_, crate::linalg_paths::LinalgError>(check(nu == 1, json!({ "nu": nu }), (), || {
            "negative parity is 0: the local model is not (r_k, r_i)".into()
        }))
    });

    r.stage(StageName::Synth, || {
        if !orientation_ok {
            return Ok(Outcome::Skip(ORIENTATION_NOTE.into()));
        }
        let d = diffs.as_ref().expect("earlier stage passed");
        let pair = CommutingPair::new(d.da.clone(), d.dc.clone(), 1e-12)?;
        let paths = synth_commuting_path(&pair, config.grid)?;
        summary.path_endpoint_error = Some(paths.endpoint_error);
        summary.path_commutator_residual = Some(paths.max_commutator);
        let ok = paths.endpoint_error <= tol.path_residual && paths.max_commutator <= tol.path_residual && paths.min_det > 0.0;
        let data = json!({
            "grid": config.grid,
            "nu": paths.nu,
            "endpoint_error": paths.endpoint_error,
            "max_commutator": paths.max_commutator,
            "min_det": paths.min_det,
            "basis": matrix_rows(&paths.basis),
        });
        Ok::<_, crate::linalg_paths::LinalgError>(check(ok, data, (), || {
            format!("path residuals exceed {:e} or det not positive", tol.path_residual)
        }))
    });

    let real_dim = sys.map(|s| 2 * s.complex_dimension()).unwrap_or(0);
    let profile = r.stage(StageName::TwistProfile, || {
        let p = twist_profile(real_dim, config.grid)?;
        let ends = p.ends_at_canonical_pair();
        Ok::<_, crate::local_flows::FlowError>(check(ends, json!({ "n": real_dim, "ends_at_canonical_pair": ends }), p, || {
            "profile does not end at the canonical pair".into()
        }))
    });

    r.stage(StageName::CollarClass, || {
        let class = collar_commutator_class(profile.as_ref().expect("earlier stage passed"), config.loop_grid)?;
        summary.collar_class = Some(class);
        Ok::<_, crate::local_flows::FlowError>(check(class == -1, json!({ "class": class, "loop_grid": config.loop_grid }), (), || {
            "collar commutator loop is null-homotopic".into()
        }))
    });

    r.stage(StageName::SpinObstruction, || {
        if !orientation_ok {
            return Ok(Outcome::Skip(ORIENTATION_NOTE.into()));
        }
        let d = diffs.as_ref().expect("earlier stage passed");
        let pair = CommutingPair::new(d.da.clone(), d.dc.clone(), 1e-12).map_err(crate::spin_lift::SpinError::from)?;
        let (nu, sign) = spin_obstruction_of_pair(&pair)?;
        summary.spin_sign = Some(sign);
        Ok::<_, crate::spin_lift::SpinError>(check(nu == 1 && sign == -1, json!({ "nu": nu, "sign": sign }), (), || {
            "commutator loop lifts to a closed loop in Spin(n)".into()
        }))
    });

    let verdict = if r.errored {
        Verdict::Error
    } else if r.stages.iter().any(|s| s.status == StageStatus::Fail) {
        Verdict::Fail
    } else {
        Verdict::Pass
    };
    VerificationReport {
        config: config.clone(),
        substitutions,
        stages: r.stages,
        summary,
        verdict,
        exit_code: verdict.exit_code(),
        unverified_hypotheses: hypotheses,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complete_intersections::Family;
    use crate::pipeline::FamilySource;

    #[test]
    fn symmetry_failure_short_circuits() {
        let cfg = PipelineConfig {
            family: FamilySource::Catalog(Family::Custom { factor_dims: vec![3], text: "z0*z1 + z2^2".into() }),
            n_samples: 50,
            ..PipelineConfig::default()
        };
        let rep = run_verify_family(&cfg);
        assert_eq!(rep.verdict, Verdict::Fail);
        assert_eq!(rep.exit_code, 1);
        assert_eq!(rep.stages[1].status, StageStatus::Fail);
        assert!(rep.stages[2..].iter().all(|s| s.status == StageStatus::Skipped));
        assert_eq!(rep.stages.len(), 11);
    }

    #[test]
    fn parse_error_is_an_error_verdict() {
        let cfg = PipelineConfig {
            family: FamilySource::Catalog(Family::Custom { factor_dims: vec![3], text: "z0 +".into() }),
            ..PipelineConfig::default()
        };
        let rep = run_verify_family(&cfg);
        assert_eq!(rep.verdict, Verdict::Error);
        assert_eq!(rep.exit_code, 2);
        assert!(rep.unverified_hypotheses.iter().any(|h| h == GLOBAL_ISOTOPY_HYPOTHESIS));
    }
}
