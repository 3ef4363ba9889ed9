use std::f64::consts::PI;

use qslice_core::hardy::*;
use qslice_core::sample::{self, rng_from_seed};
use qslice_core::{Quaternion, UnitImaginary};
use serde_json::{json, Value};

use crate::args::{HardyArgs, SchemeArg, Suite};
use crate::commands::Outcome;
use crate::report::Checks;
use crate::CliError;

fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
    Quaternion::new(w, x, y, z)
}

fn pole(c: Quaternion, a: Quaternion) -> PoleTerm {
    PoleTerm { c, a }
}

/// The basis Gram needs a finer grid than the other suites.
pub const ONB_NODES: usize = 2_000_000;

pub fn quadrature(a: &HardyArgs) -> Result<QuadratureSpec, CliError> {
    let base = match a.suite {
        Suite::Onb => QuadratureSpec::simpson(1e4, ONB_NODES),
        _ => QuadratureSpec::default(),
    };
    let spec = QuadratureSpec {
        cutoff: a.cutoff.unwrap_or(base.cutoff),
        nodes: a.nodes.unwrap_or(base.nodes),
        scheme: match a.scheme {
            Some(SchemeArg::Simpson) => QuadratureScheme::CompositeSimpson,
            Some(SchemeArg::GaussLegendre) => QuadratureScheme::GaussLegendrePanels,
            None => base.scheme,
        },
    };
    spec.validate().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(spec)
}

pub fn run(a: &HardyArgs, seed: u64, mut checks: Checks) -> Outcome {
    let qs = quadrature(a)?;
    let table = run_suite(a.suite, &qs, seed, &mut checks)
        .map_err(|e| CliError::Internal(e.to_string()))?;
    Ok((checks, json!({ "quadrature": qs, "rows": table })))
}

/// Runs one suite and returns its residual table.
pub fn run_suite(suite: Suite, qs: &QuadratureSpec, seed: u64, checks: &mut Checks) -> qslice_core::Result<Value> {
    let mut rows = Vec::new();
    let mut row = |checks: &mut Checks, name: String, residual: f64, threshold: f64| {
        rows.push(json!({ "name": name, "residual": residual }));
        checks.push(name, residual, threshold);
    };
    match suite {
        Suite::Reproducing => {
            let f = HardyFunction::shifted_inverse(Quaternion::ONE)?;
            let norm = hardy_inner(&f, &f, UnitImaginary::i(), qs)?.re();
            row(checks, "lorentzian_norm_relative".into(), (norm - PI).abs() / PI, 1e-3);
            row(checks, "reproduce_shifted_inverse".into(), reproducing_residual(&f, Quaternion::ONE, qs)?, 1e-4);
            let col = HardyFunction::kernel_column(q(1.0, 0.0, 1.0, 0.0))?;
            for (i, p) in [q(0.5, 0.0, -2.0, 0.0), q(2.0, 0.0, 0.3, 0.0)].into_iter().enumerate() {
                row(checks, format!("reproduce_kernel_column[{i}]"), reproducing_residual(&col, p, qs)?, 1e-4);
            }
        }
        Suite::Onb => {
            let fs: Vec<_> = (0..8).map(HardyFunction::onb).collect();
            let g = hardy_gram(&fs, UnitImaginary::k(), qs)?;
            let mut worst = 0.0f64;
            for (i, r) in g.iter().enumerate() {
                for (j, v) in r.iter().enumerate() {
                    let d = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max(v.max_abs_diff(Quaternion::real(d)));
                }
            }
            row(checks, "gram_identity".into(), worst, 1e-6);
        }
        Suite::Isometry => {
            let slices = [UnitImaginary::i(), UnitImaginary::j(), UnitImaginary::normalize(q(0.0, 1.0, 1.0, 1.0))?];
            let pairs = [
                (Quaternion::real(2.0), HardyFunction::shifted_inverse(Quaternion::real(0.7))?),
                (q(1.0, 1.0, 0.0, 0.0), HardyFunction::shifted_inverse(Quaternion::real(2.0))?),
                (q(0.5, 0.0, 0.3, -0.8), HardyFunction::kernel_column(q(1.0, 0.0, 1.0, 0.0))?),
                (q(2.0, 0.0, -1.0, 0.5), HardyFunction::onb(1)),
                (q(0.8, 0.3, 0.3, 0.3), HardyFunction::shifted_inverse(q(1.5, 0.0, 0.0, 1.0))?),
            ];
            for (i, (a, f)) in pairs.iter().enumerate() {
                row(checks, format!("blaschke_isometry[{i}]"), blaschke_isometry_check(*a, f, &slices, qs)?, 1e-4);
            }
        }
        Suite::Norms => {
            let mixed = RationalSlice::new(vec![
                pole(Quaternion::ONE, Quaternion::ONE),
                pole(Quaternion::real(2.0), Quaternion::J),
            ])?
            .to_hardy();
            let mut rng = rng_from_seed(seed);
            let mut worst = 0.0f64;
            for _ in 0..20 {
                let (i, j) = (sample::unit_imaginary(&mut rng), sample::unit_imaginary(&mut rng));
                // ratio in [1/2, 2] iff |log2 ratio| <= 1
                worst = worst.max(norm_equivalence_check(&mixed, i, j, qs)?.log2().abs());
            }
            row(checks, "norm_equivalence_log2_ratio".into(), worst, 1.0);
            let g = RationalSlice::new(vec![pole(q(1.0, 1.0, 0.0, 0.0), Quaternion::ONE)])?;
            let unit = sample::unit_imaginary(&mut rng);
            row(checks, "conjugate_norm".into(), conjugate_norm_check(&g, unit, qs)?, 1e-5);
        }
    }
    Ok(Value::Array(rows))
}
