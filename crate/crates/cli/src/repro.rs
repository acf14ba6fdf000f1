//! Scripted reproduction of the M2 connectivity phenomenon: a tracial
//! quantum graph that is connected, with a choice of state making the same
//! graph disconnected.

use serde::Serialize;

use qg_core::algebra::{Algebra, BlockMat};
use qg_core::linalg::{cx, generated_algebra_dim, matrix_power, CMatrix, CVector, Tolerance, ONE};
use qg_core::transport::common_eigenvectors;

use crate::{CliResult, Cx, MatJson};

#[derive(Debug, Clone, Serialize)]
pub struct ConnectivityReport {
    pub tracial_generated_dim: usize,
    pub tracial_irreducible: bool,
    pub phi_generated_dim: usize,
    pub phi_reducible: bool,
    pub witness: Option<Vec<Cx>>,
    pub witness_residual: f64,
    pub generator_image_residual: f64,
    pub perturbation: f64,
    pub q_inverse_sqrt: MatJson,
    pub pass: bool,
}

fn s_generators() -> Vec<CMatrix> {
    vec![
        CMatrix::from_row_slice(2, 2, &[cx(1., 0.), cx(0., 0.), cx(0., 0.), cx(2., 0.)]),
        CMatrix::from_row_slice(2, 2, &[cx(0., 0.), cx(1., 0.), cx(1., 0.), cx(1., 0.)]),
    ]
}

/// Run the reproduction with the given assertion tolerance; `perturb` adds
/// epsilon to Q, which generically restores connectivity.
pub fn m2_connectivity(tol_value: f64, perturb: f64) -> CliResult<ConnectivityReport> {
    let tol = Tolerance::new(tol_value.min(1e-6), 1e-8);
    let gens = s_generators();
    let tracial_generated_dim = generated_algebra_dim(&gens, &tol)?;
    let tracial_irreducible = tracial_generated_dim == 4;

    let qih = CMatrix::from_row_slice(2, 2, &[cx(1., 0.), cx(1., 0.), cx(1., 0.), cx(3., 0.)]);
    let mut q = matrix_power(&qih, cx(-2.0, 0.0), &tol)?;
    if perturb != 0.0 {
        q += CMatrix::identity(2, 2) * cx(perturb, 0.0);
    }
    let phi = Algebra::new(&[2], BlockMat { blocks: vec![q] }, tol)?;
    let q_quarter = &phi.q_quarter().blocks[0];
    let twisted: Vec<CMatrix> = gens.iter().map(|g| q_quarter * g * q_quarter).collect();
    let phi_generated_dim = generated_algebra_dim(&twisted, &tol)?;
    let phi_reducible = phi_generated_dim < 4;

    // Witness: a common eigenvector with Q^{-1/4} ξ' proportional to (2,4).
    let q_neg_quarter = &phi.q_neg_quarter().blocks[0];
    let target = CVector::from_vec(vec![cx(2.0, 0.0), cx(4.0, 0.0)]);
    let mut witness = None;
    let mut witness_residual = f64::INFINITY;
    for v in common_eigenvectors(&twisted, &tol) {
        let w = q_neg_quarter * &v;
        let coeff = target.dotc(&w) / target.dotc(&target);
        let residual = (&w - &target * coeff).norm() / w.norm();
        if residual < witness_residual {
            witness_residual = residual;
            witness = Some(v.iter().map(|z| Cx(z.re, z.im)).collect());
        }
    }

    // Generator images of (1,1): both equal (1,2) = (2,4)/2.
    let ones = CVector::from_vec(vec![ONE, ONE]);
    let expect = CVector::from_vec(vec![cx(1.0, 0.0), cx(2.0, 0.0)]);
    let generator_image_residual = gens
        .iter()
        .map(|g| (g * &ones - &expect).norm())
        .fold(0.0, f64::max)
        .max((&expect - &target * cx(0.5, 0.0)).norm());

    let pass = if perturb == 0.0 {
        tracial_irreducible
            && phi_reducible
            && witness_residual <= tol_value
            && generator_image_residual <= tol_value
    } else {
        // The perturbed run only reports; it passes when both computations
        // completed and the tracial graph stayed connected.
        tracial_irreducible
    };

    Ok(ConnectivityReport {
        tracial_generated_dim,
        tracial_irreducible,
        phi_generated_dim,
        phi_reducible,
        witness,
        witness_residual,
        generator_image_residual,
        perturbation: perturb,
        q_inverse_sqrt: crate::mat_to_json(&qih),
        pass,
    })
}

/// Message for the first failing assertion of a report, if any.
pub fn first_failure(report: &ConnectivityReport, tol_value: f64) -> Option<String> {
    if report.pass {
        return None;
    }
    Some(if !report.tracial_irreducible {
        format!("tracial graph not irreducible (dim {})", report.tracial_generated_dim)
    } else if !report.phi_reducible {
        "state-twisted graph unexpectedly irreducible".to_string()
    } else {
        format!(
            "witness residual {:.3e} exceeds {:.3e}",
            report.witness_residual, tol_value
        )
    })
}
