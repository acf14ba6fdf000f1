//! Serialization formats, deterministic generation and the command surface
//! behind the `qg` binary.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use qg_core::algebra::{Algebra, BlockMat, TensorElement};
use qg_core::atomic::WeightedRelation;
use qg_core::graph::{bimodule_s, tensor_swap, SuperOperator};
use qg_core::linalg::{cx, fro_norm, CMatrix, Tolerance};
use qg_core::relation::{degree, image_v, HsSubspace};
use qg_core::sample::Sampler;
use qg_core::transport::{
    is_irreducible, property_trio, retag_tensor, tracial_twin, transport_adjacency_inverse,
    TransportReport,
};

pub mod repro;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid spec: {0}")]
    Invalid(String),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(qg_core::Error),
    #[error("assertion failed: {0}")]
    AssertionFailed(String),
}

impl From<qg_core::Error> for CliError {
    fn from(e: qg_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    /// 0 pass, 1 axiom/assertion failure, 2 malformed input, 3 internal
    /// numerical failure.
    pub fn exit_code(&self) -> i32 {
        use qg_core::Error as E;
        match self {
            CliError::Invalid(_) | CliError::Json(_) | CliError::Io(_) => 2,
            CliError::AssertionFailed(_) => 1,
            CliError::Core(e) => match e {
                E::NotProjection { .. }
                | E::NotInvariant { .. }
                | E::NotBimodule { .. }
                | E::ShapeMismatch(_)
                | E::DimensionMismatch(_)
                | E::ParentMismatch
                | E::BadRank { .. } => 2,
                E::AssertionFailed { .. } => 1,
                E::NotHermitian { .. }
                | E::NotPositive { .. }
                | E::NotReal { .. }
                | E::GramNotIdentity { .. } => 3,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

// ---------------------------------------------------------------------------
// JSON schema

/// A complex number serialized as [re, im].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cx(pub f64, pub f64);

pub type MatJson = Vec<Vec<Cx>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub blocks: Vec<usize>,
    #[serde(rename = "Q")]
    pub q: Vec<MatJson>,
    #[serde(default, rename = "normalize_Q_inverse_trace")]
    pub normalize_q_inverse_trace: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompJson {
    pub i: usize,
    pub j: usize,
    pub mat: MatJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Adjacency { matrix: MatJson },
    Projection { comps: Vec<CompJson> },
    Subspace { vectors: Vec<MatJson> },
    Relation { n: usize, weights: Vec<f64>, edges: Vec<(usize, usize)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraSpec>,
    pub representation: Representation,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

// ---------------------------------------------------------------------------
// JSON <-> matrix conversions

pub fn mat_to_json(m: &CMatrix) -> MatJson {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| Cx(m[(r, c)].re, m[(r, c)].im)).collect())
        .collect()
}

pub fn mat_from_json(m: &MatJson) -> CliResult<CMatrix> {
    let rows = m.len();
    if rows == 0 {
        return Err(CliError::Invalid("empty matrix".into()));
    }
    let cols = m[0].len();
    if m.iter().any(|row| row.len() != cols) {
        return Err(CliError::Invalid("ragged matrix rows".into()));
    }
    Ok(CMatrix::from_fn(rows, cols, |r, c| cx(m[r][c].0, m[r][c].1)))
}

fn block_mat_to_json(b: &BlockMat) -> Vec<MatJson> {
    b.blocks.iter().map(mat_to_json).collect()
}

fn block_mat_from_json(blocks: &[usize], mats: &[MatJson]) -> CliResult<BlockMat> {
    if mats.len() != blocks.len() {
        return Err(CliError::Invalid(format!(
            "{} Q blocks for {} algebra blocks",
            mats.len(),
            blocks.len()
        )));
    }
    let mut out = Vec::with_capacity(mats.len());
    for (n, m) in blocks.iter().zip(mats) {
        let mat = mat_from_json(m)?;
        if mat.nrows() != *n || mat.ncols() != *n {
            return Err(CliError::Invalid(format!(
                "Q block is {}x{}, expected {n}x{n}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        out.push(mat);
    }
    Ok(BlockMat { blocks: out })
}

// ---------------------------------------------------------------------------
// Loaded form

#[derive(Debug, Clone)]
pub enum Rep {
    Adjacency(SuperOperator),
    Projection(TensorElement),
    Subspace(HsSubspace),
    Relation(WeightedRelation),
}

#[derive(Debug, Clone)]
pub struct Loaded {
    pub algebra: Algebra,
    pub rep: Rep,
    pub seed: Option<u64>,
}

pub fn load_spec(spec: &GraphSpec, tol: Tolerance) -> CliResult<Loaded> {
    // Relations carry their own atomic algebra; an explicit algebra, when
    // present, must agree with it.
    if let Representation::Relation { n, weights, edges } = &spec.representation {
        let relation = WeightedRelation::new(*n, weights.clone(), edges.iter().copied())?;
        let (alg, _) = relation.embed(tol)?;
        if let Some(a) = &spec.algebra {
            if a.blocks != vec![1; *n] {
                return Err(CliError::Invalid(
                    "relation specs require an atomic algebra (all blocks of size 1)".into(),
                ));
            }
            let q = block_mat_from_json(&a.blocks, &a.q)?;
            for (k, w) in weights.iter().enumerate() {
                if (q.blocks[k][(0, 0)] - cx(*w, 0.0)).norm() > tol.eq_tol * (1.0 + w.abs()) {
                    return Err(CliError::Invalid(
                        "relation weights disagree with the supplied Q".into(),
                    ));
                }
            }
        }
        return Ok(Loaded { algebra: alg, rep: Rep::Relation(relation), seed: spec.seed });
    }

    let aspec = spec
        .algebra
        .as_ref()
        .ok_or_else(|| CliError::Invalid("missing algebra".into()))?;
    let q = block_mat_from_json(&aspec.blocks, &aspec.q)?;
    let algebra = Algebra::with_options(&aspec.blocks, q, tol, aspec.normalize_q_inverse_trace)?;
    let dim = algebra.dim();
    let rep = match &spec.representation {
        Representation::Adjacency { matrix } => {
            let m = mat_from_json(matrix)?;
            if m.nrows() != dim || m.ncols() != dim {
                return Err(CliError::Invalid(format!(
                    "adjacency matrix is {}x{}, expected {dim}x{dim}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            Rep::Adjacency(SuperOperator::new(algebra.clone(), m)?)
        }
        Representation::Projection { comps } => {
            let mut e = TensorElement::zero(&algebra);
            for c in comps {
                if c.i >= aspec.blocks.len() || c.j >= aspec.blocks.len() {
                    return Err(CliError::Invalid(format!(
                        "component ({},{}) out of range",
                        c.i, c.j
                    )));
                }
                e.set_comp(c.i, c.j, mat_from_json(&c.mat)?)?;
            }
            Rep::Projection(e)
        }
        Representation::Subspace { vectors } => {
            let mats: Vec<CMatrix> = vectors
                .iter()
                .map(|v| {
                    let m = mat_from_json(v)?;
                    if m.nrows() != dim || m.ncols() != dim {
                        return Err(CliError::Invalid(format!(
                            "subspace vector is {}x{}, expected {dim}x{dim}",
                            m.nrows(),
                            m.ncols()
                        )));
                    }
                    Ok(m)
                })
                .collect::<CliResult<_>>()?;
            Rep::Subspace(HsSubspace::from_vectors(&algebra, &mats))
        }
        Representation::Relation { .. } => unreachable!("handled above"),
    };
    Ok(Loaded { algebra, rep, seed: spec.seed })
}

fn algebra_spec_of(alg: &Algebra) -> AlgebraSpec {
    AlgebraSpec {
        blocks: alg.blocks().to_vec(),
        q: block_mat_to_json(alg.q()),
        normalize_q_inverse_trace: false,
    }
}

fn projection_to_json(e: &TensorElement) -> Representation {
    let comps = e
        .comps
        .iter()
        .filter(|(_, m)| fro_norm(m) > 0.0)
        .map(|(&(i, j), m)| CompJson { i, j, mat: mat_to_json(m) })
        .collect();
    Representation::Projection { comps }
}

// ---------------------------------------------------------------------------
// convert

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Adjacency,
    Projection,
    Subspace,
}

/// Move any representation to the requested one through the bijection chain.
pub fn cmd_convert(spec: &GraphSpec, target: Target, tol: Tolerance) -> CliResult<GraphSpec> {
    let loaded = load_spec(spec, tol)?;
    let alg = &loaded.algebra;
    // Normalise to a projection first (the hub of the chain).
    let e = match &loaded.rep {
        Rep::Adjacency(a) => a.psi_prime(),
        Rep::Projection(e) => e.clone(),
        Rep::Subspace(v) => v.to_tensor_element()?,
        Rep::Relation(r) => r.embed(tol)?.1,
    };
    let representation = match target {
        Target::Projection => projection_to_json(&e),
        Target::Adjacency => {
            let a = match &loaded.rep {
                Rep::Adjacency(a) => a.clone(),
                _ => SuperOperator::psi_prime_inv(&e),
            };
            Representation::Adjacency { matrix: mat_to_json(&a.matrix) }
        }
        Target::Subspace => {
            let v = match &loaded.rep {
                Rep::Subspace(v) => v.clone(),
                _ => image_v(&e)?,
            };
            Representation::Subspace { vectors: v.basis.iter().map(mat_to_json).collect() }
        }
    };
    Ok(GraphSpec { algebra: Some(algebra_spec_of(alg)), representation, seed: loaded.seed })
}

// ---------------------------------------------------------------------------
// verify

#[derive(Debug, Clone, Serialize)]
pub struct CheckJson {
    pub pass: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub tol: f64,
    pub cp: CheckJson,
    pub cp_min_choi_eigenvalue: f64,
    pub schur_idempotent: CheckJson,
    pub real: CheckJson,
    pub reflexive: CheckJson,
    pub kms_self_adjoint: CheckJson,
    pub undirected: CheckJson,
    pub degree_norm: f64,
    pub degree_element: Vec<MatJson>,
    pub irreducible: bool,
    pub transport: BTreeMap<String, CheckJson>,
    pub transport_pairs_agree: bool,
    pub requested: Vec<String>,
    pub pass: bool,
}

fn check(pass: bool, residual: f64) -> CheckJson {
    CheckJson { pass, residual }
}

fn transport_map(t: &TransportReport) -> BTreeMap<String, CheckJson> {
    let mut m = BTreeMap::new();
    m.insert("reflexive_phi".into(), check(t.reflexive_phi, t.reflexive_phi_residual));
    m.insert("reflexive_tr".into(), check(t.reflexive_tr, t.reflexive_tr_residual));
    m.insert("reflexive_t_phi".into(), check(t.reflexive_t_phi, t.reflexive_t_phi_residual));
    m.insert("selfadj_s_phi".into(), check(t.selfadj_s_phi, t.selfadj_s_phi_residual));
    m.insert(
        "selfadj_s_tr_twisted".into(),
        check(t.selfadj_s_tr_twisted, t.selfadj_s_tr_twisted_residual),
    );
    m.insert("selfadj_t_phi".into(), check(t.selfadj_t_phi, t.selfadj_t_phi_residual));
    m.insert("selfadj_s_tr".into(), check(t.selfadj_s_tr, t.selfadj_s_tr_residual));
    m
}

/// Axioms requested by default: the defining pair of a quantum adjacency
/// operator.
pub fn default_requirements() -> Vec<String> {
    vec!["cp".into(), "schur".into()]
}

pub fn cmd_verify(
    spec: &GraphSpec,
    tol_value: f64,
    requested: &[String],
) -> CliResult<VerifyReport> {
    let tol = Tolerance::new(tol_value, 1e-8_f64.min(tol_value));
    let loaded = load_spec(spec, tol)?;
    let alg = &loaded.algebra;
    let a = match &loaded.rep {
        Rep::Adjacency(a) => a.clone(),
        Rep::Projection(e) => SuperOperator::psi_prime_inv(e),
        Rep::Subspace(v) => SuperOperator::psi_prime_inv(&v.to_tensor_element()?),
        Rep::Relation(r) => SuperOperator::psi_prime_inv(&r.embed(tol)?.1),
    };
    let axioms = a.axioms();
    let e = a.psi_prime();
    let (deg_elem, deg_norm) = degree(&e);

    // Connectivity through the twisted bimodule T = S_{i/4}.
    let t = bimodule_s(&a).twist(cx(0.0, 0.25));
    let irreducible = is_irreducible(&t)?;

    // Transport summary against the tracial twin.
    let twin = tracial_twin(alg);
    let a_tr = transport_adjacency_inverse(&a, &twin)?;
    let s_tr = bimodule_s(&a_tr);
    let trio = property_trio(&s_tr, alg)?;

    let report = VerifyReport {
        tol: tol_value,
        cp: check(axioms.cp, (-axioms.cp_min_eigenvalue).max(0.0)),
        cp_min_choi_eigenvalue: axioms.cp_min_eigenvalue,
        schur_idempotent: check(axioms.schur_idempotent, axioms.schur_residual),
        real: check(axioms.real, axioms.real_residual),
        reflexive: check(axioms.reflexive, axioms.reflexive_residual),
        kms_self_adjoint: check(axioms.kms_self_adjoint, axioms.kms_residual),
        undirected: check(axioms.undirected, axioms.undirected_residual),
        degree_norm: deg_norm,
        degree_element: block_mat_to_json(&deg_elem.mat),
        irreducible,
        transport: transport_map(&trio),
        transport_pairs_agree: trio.pairs_agree(),
        requested: requested.to_vec(),
        pass: false,
    };
    let mut pass = true;
    for req in requested {
        let ok = match req.as_str() {
            "cp" => report.cp.pass,
            "schur" => report.schur_idempotent.pass,
            "real" => report.real.pass,
            "reflexive" => report.reflexive.pass,
            "kms" => report.kms_self_adjoint.pass,
            "undirected" => report.undirected.pass,
            other => {
                return Err(CliError::Invalid(format!("unknown axiom requirement: {other}")))
            }
        };
        pass = pass && ok;
    }
    Ok(VerifyReport { pass, ..report })
}

/// Fixed-order human rendering of the same fields as the JSON report.
pub fn verify_text(r: &VerifyReport) -> String {
    let mut out = String::new();
    let line = |name: &str, c: &CheckJson| {
        format!("{name}: {} (residual {:.3e})\n", if c.pass { "pass" } else { "fail" }, c.residual)
    };
    out.push_str(&format!("tolerance: {:.3e}\n", r.tol));
    out.push_str(&line("cp", &r.cp));
    out.push_str(&format!("cp_min_choi_eigenvalue: {:.3e}\n", r.cp_min_choi_eigenvalue));
    out.push_str(&line("schur_idempotent", &r.schur_idempotent));
    out.push_str(&line("real", &r.real));
    out.push_str(&line("reflexive", &r.reflexive));
    out.push_str(&line("kms_self_adjoint", &r.kms_self_adjoint));
    out.push_str(&line("undirected", &r.undirected));
    out.push_str(&format!("degree_norm: {:.12}\n", r.degree_norm));
    out.push_str(&format!("irreducible: {}\n", r.irreducible));
    for (k, v) in &r.transport {
        out.push_str(&line(&format!("transport.{k}"), v));
    }
    out.push_str(&format!("transport_pairs_agree: {}\n", r.transport_pairs_agree));
    out.push_str(&format!("requested: {}\n", r.requested.join(",")));
    out.push_str(&format!("pass: {}\n", r.pass));
    out
}

// ---------------------------------------------------------------------------
// random

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QMode {
    Random,
    Identity,
    File(String),
}

impl std::str::FromStr for QMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(QMode::Random),
            "identity" => Ok(QMode::Identity),
            other => {
                if let Some(path) = other.strip_prefix("file:") {
                    Ok(QMode::File(path.to_string()))
                } else {
                    Err("expected random, identity, or file:<path>".into())
                }
            }
        }
    }
}

pub fn cmd_random(
    blocks: &[usize],
    q_mode: &QMode,
    rank: usize,
    seed: u64,
    tol: Tolerance,
) -> CliResult<GraphSpec> {
    if blocks.is_empty() {
        return Err(CliError::Invalid("empty block list".into()));
    }
    let mut sampler = Sampler::new(seed);
    let q = match q_mode {
        QMode::Random => sampler.positive_q(blocks),
        QMode::Identity => BlockMat::identity(blocks),
        QMode::File(path) => {
            let text = std::fs::read_to_string(path)?;
            let mats: Vec<MatJson> = serde_json::from_str(&text)?;
            block_mat_from_json(blocks, &mats)?
        }
    };
    let alg = Algebra::new(blocks, q, tol)?;
    let e = sampler.projection_with_rank(&alg, rank)?;
    Ok(GraphSpec {
        algebra: Some(algebra_spec_of(&alg)),
        representation: projection_to_json(&e),
        seed: Some(seed),
    })
}

// ---------------------------------------------------------------------------
// tracial

#[derive(Debug, Clone, Serialize)]
pub struct TracialReport {
    pub a_tr: MatJson,
    pub s_tr_basis: Vec<MatJson>,
    pub t_phi_basis: Vec<MatJson>,
    pub trio: BTreeMap<String, CheckJson>,
    pub trio_pairs_agree: bool,
}

/// Emit the tracial picture of a graph: A_tr, S_tr, T_phi and the property
/// dictionary.
pub fn cmd_tracial(spec: &GraphSpec, tol: Tolerance) -> CliResult<TracialReport> {
    let loaded = load_spec(spec, tol)?;
    let alg = &loaded.algebra;
    let e = match &loaded.rep {
        Rep::Adjacency(a) => a.psi_prime(),
        Rep::Projection(e) => e.clone(),
        Rep::Subspace(v) => v.to_tensor_element()?,
        Rep::Relation(r) => r.embed(tol)?.1,
    };
    let twin = tracial_twin(alg);
    let e_tr = retag_tensor(&e, &twin)?;
    let a_tr = SuperOperator::psi_prime_inv(&e_tr);
    let s_tr = bimodule_s(&a_tr);
    let t_phi =
        qg_core::transport::transport_bimodule(&s_tr, alg, qg_core::transport::BimoduleRoute::T)?;
    let trio = property_trio(&s_tr, alg)?;
    Ok(TracialReport {
        a_tr: mat_to_json(&a_tr.matrix),
        s_tr_basis: s_tr.basis.iter().map(mat_to_json).collect(),
        t_phi_basis: t_phi.basis.iter().map(mat_to_json).collect(),
        trio: transport_map(&trio),
        trio_pairs_agree: trio.pairs_agree(),
    })
}

// ---------------------------------------------------------------------------
// helpers shared with tests

pub fn spec_to_string(spec: &GraphSpec) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(spec)?)
}

pub fn spec_from_str(text: &str) -> CliResult<GraphSpec> {
    Ok(serde_json::from_str(text)?)
}

pub fn swap_is_symmetric(e: &TensorElement, tol: f64) -> bool {
    e.sub(&tensor_swap(e)).map(|d| d.norm() <= tol).unwrap_or(false)
}
