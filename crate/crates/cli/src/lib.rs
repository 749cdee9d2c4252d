//! Command-line front end for the spectral sequence engine: reads system
//! files, runs the computations and renders tables or JSON results.

pub mod render;
pub mod report;
pub mod system;

use pvss_core::abgrp::GroupHom;
use pvss_core::homalg::six_term_solve_bounded;
use pvss_core::intmat::{smith_normal_form, IntMatrix};
use pvss_core::specseq::{crossed_from_pages, group_cohomology, run_pages, RunOptions};
use pvss_core::Error;
use serde::Serialize;

use crate::report::{group_report, invariant_forms, page_report, CohomologyReport, KPair, ResultFile};
use crate::system::{from_matrix, load, sha256_hex, to_matrix, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("insufficient data: {0}")]
    Insufficient(String),
    #[error("internal error (this is a bug): {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Insufficient(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::MissingD2(_) | Error::UnverifiedHigherDifferentials(_) => CliError::Insufficient(msg),
            Error::InvalidSpec(_)
            | Error::PointwiseInner(_)
            | Error::IllDefinedHom(_)
            | Error::DimensionMismatch { .. }
            | Error::MismatchedGroups(_) => CliError::Validation(msg),
            Error::NotASubgroup(_)
            | Error::NotExact(_)
            | Error::DoesNotDescend(_)
            | Error::ChaseFailure(_)
            | Error::Precondition(_) => CliError::Internal(msg),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Table,
    Machine,
}

fn emit(r: &ResultFile, format: Format) -> Result<String, CliError> {
    match format {
        Format::Table => render::result(r),
        Format::Machine => Ok(r.to_json()),
    }
}

fn options(strict: bool) -> RunOptions {
    RunOptions {
        strict,
        ..RunOptions::default()
    }
}

/// All pages E1 through E∞.
pub fn pages_result(input: &[u8], strict: bool) -> Result<ResultFile, CliError> {
    let sys = load(input)?;
    let ss = run_pages(&sys.spec, &options(strict))?;
    let mut r = ResultFile::new("pages", &sys.sha256, sys.spec.n());
    for page in &ss.pages {
        r.pages.push(page_report(&sys.spec, page)?);
    }
    r.warnings = ss.warnings.clone();
    Ok(r)
}

/// K-theory of the crossed product read off from E∞.
pub fn crossed_result(input: &[u8], strict: bool) -> Result<ResultFile, CliError> {
    let sys = load(input)?;
    let opts = options(strict);
    let ss = run_pages(&sys.spec, &opts)?;
    let [k0, k1] = crossed_from_pages(&ss, opts.extension_bound);
    let mut r = ResultFile::new("crossed", &sys.sha256, sys.spec.n());
    r.crossed = Some(KPair {
        k0: group_report(&k0),
        k1: group_report(&k1),
    });
    r.warnings = ss.warnings.clone();
    Ok(r)
}

/// The PV sequence for a single automorphism.
pub fn pv_result(input: &[u8]) -> Result<ResultFile, CliError> {
    let sys = load(input)?;
    let spec = &sys.spec;
    if spec.n() != 1 {
        return Err(CliError::Validation(format!(
            "pv needs a single automorphism (n = 1), found n = {}",
            spec.n()
        )));
    }
    let minus_id = |q: u8| spec.action(q)[0].sub(&GroupHom::identity(spec.k(q)));
    let (k0, k1) = six_term_solve_bounded(&minus_id(0)?, &minus_id(1)?, RunOptions::default().extension_bound)?;
    let mut r = ResultFile::new("pv", &sys.sha256, 1);
    r.crossed = Some(KPair {
        k0: group_report(&k0),
        k1: group_report(&k1),
    });
    Ok(r)
}

/// `H^p(Z^n; K_q)` for both K-groups.
pub fn cohomology_result(input: &[u8]) -> Result<ResultFile, CliError> {
    let sys = load(input)?;
    let spec = &sys.spec;
    let h = |q: u8| group_cohomology(spec.n(), spec.k(q), spec.action(q));
    let mut r = ResultFile::new("cohomology", &sys.sha256, spec.n());
    r.cohomology = Some(CohomologyReport {
        k0: invariant_forms(&h(0)?),
        k1: invariant_forms(&h(1)?),
    });
    Ok(r)
}

pub fn pages(input: &[u8], format: Format, strict: bool) -> Result<String, CliError> {
    emit(&pages_result(input, strict)?, format)
}

pub fn crossed(input: &[u8], format: Format, strict: bool) -> Result<String, CliError> {
    emit(&crossed_result(input, strict)?, format)
}

pub fn pv(input: &[u8], format: Format) -> Result<String, CliError> {
    emit(&pv_result(input)?, format)
}

pub fn cohomology(input: &[u8], format: Format) -> Result<String, CliError> {
    emit(&cohomology_result(input)?, format)
}

pub fn validate(input: &[u8]) -> Result<String, CliError> {
    let sys = load(input)?;
    let spec = &sys.spec;
    let d2 = match &sys.file.d2 {
        None => "none",
        Some(system::D2Spec::Ambient(_)) => "ambient",
        Some(system::D2Spec::Pairs(_)) => "pairwise",
    };
    Ok(format!(
        "valid: n = {}, K0 = {}, K1 = {}, d2 data: {d2}\n",
        spec.n(),
        spec.k(0).invariants(),
        spec.k(1).invariants()
    ))
}

#[derive(Serialize)]
struct SnfResult {
    input_sha256: String,
    rank: usize,
    d: Matrix,
    u: Matrix,
    v: Matrix,
}

/// Smith form `U M V = D` of a bare matrix given as an array of rows.
pub fn snf(input: &[u8], format: Format) -> Result<String, CliError> {
    let rows: Matrix = serde_json::from_slice(input).map_err(|e| CliError::Parse(e.to_string()))?;
    let m: IntMatrix = to_matrix(&rows, "matrix")?;
    let s = smith_normal_form(&m);
    if s.u.mul(&m)?.mul(&s.v)? != s.d {
        return Err(CliError::Internal("Smith form does not factor the input".into()));
    }
    Ok(match format {
        Format::Table => format!("D =\n{}\nU =\n{}\nV =\n{}\n", s.d, s.u, s.v),
        Format::Machine => {
            let out = SnfResult {
                input_sha256: sha256_hex(input),
                rank: s.rank,
                d: from_matrix(&s.d),
                u: from_matrix(&s.u),
                v: from_matrix(&s.v),
            };
            serde_json::to_string_pretty(&out).expect("plain data serializes") + "\n"
        }
    })
}
