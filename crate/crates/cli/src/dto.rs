//! JSON file formats and their conversions.
//!
//! Complex numbers are serialized as `[re, im]` pairs; matrices as row-major
//! nested arrays of pairs. The canonical form of every payload is the
//! compact serialization with keys in the struct order declared here;
//! digests are SHA-256 over that canonical form, so formatting and key
//! permutations of an input file do not change its digest.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use mts_core::{
    Complex64, ComplexMatrix, ExtremalityCertificate, KrausSet, MarginalReport, MarginalState,
    Tolerances, UcptReport,
};

pub const FORMAT_VERSION: &str = "mts/1";

pub type ComplexPair = [f64; 2];

fn matrix_to_rows(m: &ComplexMatrix) -> Vec<Vec<ComplexPair>> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| {
                    let z = m.get(i, j);
                    [z.re, z.im]
                })
                .collect()
        })
        .collect()
}

fn matrix_from_rows(rows: &[Vec<ComplexPair>]) -> Result<ComplexMatrix, String> {
    let height = rows.len();
    if height == 0 {
        return Err("matrix has no rows".into());
    }
    let width = rows[0].len();
    let mut data = Vec::with_capacity(height * width);
    for row in rows {
        if row.len() != width {
            return Err("matrix rows have inconsistent lengths".into());
        }
        for pair in row {
            data.push(Complex64::new(pair[0], pair[1]));
        }
    }
    ComplexMatrix::new(height, width, data).map_err(|e| e.to_string())
}

/// Kraus-set file: a list of `n x n` operators.
#[derive(Debug, Serialize, Deserialize)]
pub struct KrausFile {
    pub version: String,
    pub n: usize,
    pub operators: Vec<Vec<Vec<ComplexPair>>>,
}

impl KrausFile {
    pub fn from_kraus(ks: &KrausSet) -> Self {
        Self {
            version: FORMAT_VERSION.into(),
            n: ks.n(),
            operators: ks.operators().iter().map(matrix_to_rows).collect(),
        }
    }

    pub fn to_kraus(&self) -> Result<KrausSet, String> {
        check_version(&self.version)?;
        let operators: Result<Vec<ComplexMatrix>, String> =
            self.operators.iter().map(|op| matrix_from_rows(op)).collect();
        let operators = operators?;
        for op in &operators {
            if op.rows() != self.n || op.cols() != self.n {
                return Err(format!(
                    "operator is {}x{} but the file declares n = {}",
                    op.rows(),
                    op.cols(),
                    self.n
                ));
            }
        }
        KrausSet::new(operators).map_err(|e| e.to_string())
    }
}

/// Density-matrix file: an `n^2 x n^2` matrix on the doubled system.
#[derive(Debug, Serialize, Deserialize)]
pub struct DensityFile {
    pub version: String,
    pub n: usize,
    pub density: Vec<Vec<ComplexPair>>,
}

impl DensityFile {
    pub fn to_state(&self, tol: &Tolerances) -> Result<MarginalState, String> {
        check_version(&self.version)?;
        let density = matrix_from_rows(&self.density)?;
        MarginalState::new(self.n, density, tol).map_err(|e| e.to_string())
    }
}

fn check_version(version: &str) -> Result<(), String> {
    if version == FORMAT_VERSION {
        Ok(())
    } else {
        Err(format!(
            "unrecognized format version {:?} (expected {:?})",
            version, FORMAT_VERSION
        ))
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ToleranceDto {
    pub rank_rel_tol: f64,
    pub residual_abs_tol: f64,
    pub eig_off_diag_tol: f64,
    pub eig_max_sweeps: usize,
}

impl From<&Tolerances> for ToleranceDto {
    fn from(t: &Tolerances) -> Self {
        Self {
            rank_rel_tol: t.rank_rel_tol,
            residual_abs_tol: t.residual_abs_tol,
            eig_off_diag_tol: t.eig_off_diag_tol,
            eig_max_sweeps: t.eig_max_sweeps,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct UcptReportDto {
    pub unital_residual: f64,
    pub trace_residual: f64,
    pub is_ucpt: bool,
    pub kraus_count_reduced: usize,
}

impl From<&UcptReport> for UcptReportDto {
    fn from(r: &UcptReport) -> Self {
        Self {
            unital_residual: r.unital_residual,
            trace_residual: r.trace_residual,
            is_ucpt: r.is_ucpt,
            kraus_count_reduced: r.kraus_count_reduced,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MarginalReportDto {
    pub pt_first_residual: f64,
    pub pt_second_residual: f64,
    pub psd_defect: f64,
    pub trace_defect: f64,
    pub is_marginal_tracial: bool,
}

impl From<&MarginalReport> for MarginalReportDto {
    fn from(r: &MarginalReport) -> Self {
        Self {
            pt_first_residual: r.pt_first_residual,
            pt_second_residual: r.pt_second_residual,
            psd_defect: r.psd_defect,
            trace_defect: r.trace_defect,
            is_marginal_tracial: r.is_marginal_tracial,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CertificateDto {
    pub method: String,
    pub n: usize,
    pub k_or_r: usize,
    pub stacked_rows: usize,
    pub stacked_cols: usize,
    pub achieved_rank: usize,
    pub required_rank: usize,
    pub is_extremal: bool,
    pub tolerance_used: f64,
}

impl From<&ExtremalityCertificate> for CertificateDto {
    fn from(c: &ExtremalityCertificate) -> Self {
        Self {
            method: c.method.to_string(),
            n: c.n,
            k_or_r: c.k_or_r,
            stacked_rows: c.stacked_rows,
            stacked_cols: c.stacked_cols,
            achieved_rank: c.achieved_rank,
            required_rank: c.required_rank,
            is_extremal: c.is_extremal,
            tolerance_used: c.tolerance_used,
        }
    }
}

/// Certification result for one input file.
#[derive(Debug, Serialize, Deserialize)]
pub struct CertificateFile {
    pub version: String,
    pub input_digest: String,
    pub ucpt_report: Option<UcptReportDto>,
    pub marginal_report: Option<MarginalReportDto>,
    pub ls_certificate: Option<CertificateDto>,
    pub ps_certificate: Option<CertificateDto>,
    pub state_rank: Option<usize>,
    pub rank_bound: Option<usize>,
    pub verdict: String,
    pub tolerances: ToleranceDto,
}

/// Outcome of a randomized search.
#[derive(Debug, Serialize, Deserialize)]
pub struct SearchReport {
    pub version: String,
    pub n: usize,
    pub strategy: String,
    pub trials: usize,
    pub seed: u64,
    pub target_rank: Option<usize>,
    pub target_reached: Option<bool>,
    pub extremal_hits: usize,
    pub max_extremal_rank: usize,
    pub best_certificate: Option<CertificateDto>,
    pub best_channel: Option<KrausFile>,
    pub tolerances: ToleranceDto,
}

/// SHA-256 digest of the canonical serialization of a payload.
pub fn digest<T: Serialize>(payload: &T) -> String {
    let canonical = serde_json::to_string(payload).expect("serializable payload");
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    format!("sha256:{}", hex::encode(hasher.finalize()))
}
