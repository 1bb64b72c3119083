//! JSON state files and the append-only run log.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classify::{FoundVector, SeparabilityCertificate};
use crate::error::{Error, Result};
use crate::hilbert::{rank_vector, SymmetricState, Tolerances};
use crate::horodecki::QubitQuditState;
use crate::linalg::{c, eigvalsh, frobenius, CMatrix};

pub const FORMAT_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisKind {
    DickeOrthonormal,
    Computational,
    /// `C² ⊗ C^d`, index `a·d + i`; `qudit_dim` must be set.
    QubitQudit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
}

/// Checkable claims stored alongside a state.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    /// Ascending spectra of the state and its canonical partial transposes.
    Ppt { spectra: Vec<Vec<f64>> },
    Ranks { ranks: Vec<usize> },
    Extremal { solution_dim: usize, entangled: bool },
    Separable { decomposition: SeparabilityCertificate },
    ProductVector { vector: FoundVector },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Metadata {
    pub three_rank: Option<Vec<usize>>,
    pub provenance: Provenance,
    pub tolerances: Tolerances,
    #[serde(default)]
    pub certificates: Vec<Certificate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub format_version: String,
    pub num_qubits: usize,
    pub basis: BasisKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qudit_dim: Option<usize>,
    pub matrix: Vec<Vec<[f64; 2]>>,
    pub metadata: Metadata,
}

fn to_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

impl StateFile {
    pub fn from_symmetric(state: &SymmetricState, provenance: Provenance, tol: &Tolerances) -> Self {
        StateFile {
            format_version: FORMAT_VERSION.into(),
            num_qubits: state.num_qubits,
            basis: BasisKind::DickeOrthonormal,
            qudit_dim: None,
            matrix: to_rows(&state.dicke_matrix),
            metadata: Metadata {
                three_rank: rank_vector(state, tol).ok(),
                provenance,
                tolerances: *tol,
                certificates: vec![],
                notes: vec![],
            },
        }
    }

    pub fn from_qubit_qudit(state: &QubitQuditState, provenance: Provenance, tol: &Tolerances) -> Self {
        StateFile {
            format_version: FORMAT_VERSION.into(),
            num_qubits: 1,
            basis: BasisKind::QubitQudit,
            qudit_dim: Some(state.d),
            matrix: to_rows(&state.matrix),
            metadata: Metadata {
                three_rank: None,
                provenance,
                tolerances: *tol,
                certificates: vec![],
                notes: vec![],
            },
        }
    }

    fn expected_dim(&self) -> Result<usize> {
        match self.basis {
            BasisKind::DickeOrthonormal => Ok(self.num_qubits + 1),
            BasisKind::Computational => Ok(1usize << self.num_qubits.min(20)),
            BasisKind::QubitQudit => self
                .qudit_dim
                .map(|d| 2 * d)
                .ok_or_else(|| Error::Format("qubit-qudit basis requires qudit_dim".into())),
        }
    }

    /// Raw matrix after shape validation.
    pub fn matrix(&self) -> Result<CMatrix> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported format_version {:?}",
                self.format_version
            )));
        }
        let n = self.expected_dim()?;
        if self.matrix.len() != n || self.matrix.iter().any(|r| r.len() != n) {
            return Err(Error::Format(format!("matrix must be {n}x{n} for this basis")));
        }
        if self.matrix.iter().flatten().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Format("non-finite matrix entry".into()));
        }
        Ok(CMatrix::from_fn(n, n, |i, j| c(self.matrix[i][j][0], self.matrix[i][j][1])))
    }

    /// Symmetric state, converting from the computational basis if needed.
    pub fn to_symmetric(&self, tol: &Tolerances) -> Result<SymmetricState> {
        let m = self.matrix()?;
        match self.basis {
            BasisKind::DickeOrthonormal => SymmetricState::new(self.num_qubits, m, tol),
            BasisKind::Computational => SymmetricState::from_computational(&m, self.num_qubits, tol),
            BasisKind::QubitQudit => Err(Error::Format("file holds a qubit-qudit state".into())),
        }
    }

    pub fn to_qubit_qudit(&self, tol: &Tolerances) -> Result<QubitQuditState> {
        if self.basis != BasisKind::QubitQudit {
            return Err(Error::Format("file does not hold a qubit-qudit state".into()));
        }
        QubitQuditState::new(self.qudit_dim.unwrap_or(0), self.matrix()?, tol)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

/// Re-checks every stored certificate; returns the list of failures.
pub fn verify_certificates(file: &StateFile, tol: &Tolerances) -> Result<Vec<String>> {
    let mut failures = vec![];
    let state = match file.basis {
        BasisKind::QubitQudit => {
            let q = file.to_qubit_qudit(tol)?;
            for cert in &file.metadata.certificates {
                match cert {
                    Certificate::Ppt { spectra } => {
                        let now = vec![eigvalsh(&q.matrix), eigvalsh(&q.partial_transpose_a())];
                        check_spectra(&now, spectra, &q.matrix, tol, &mut failures);
                    }
                    Certificate::Ranks { ranks } => {
                        let (r, rt) = crate::horodecki::ranks(&q, tol)?;
                        if vec![r, rt] != *ranks {
                            failures.push(format!("ranks {ranks:?} recomputed as {:?}", [r, rt]));
                        }
                    }
                    other => failures.push(format!("certificate {other:?} does not apply to qubit-qudit states")),
                }
            }
            return Ok(failures);
        }
        _ => match file.to_symmetric(tol) {
            Ok(s) => s,
            Err(e @ (Error::NotHermitian { .. } | Error::SupportOutsideSymmetric { .. })) => {
                failures.push(e.to_string());
                return Ok(failures);
            }
            Err(e) => return Err(e),
        },
    };
    if let Some(r) = &file.metadata.three_rank {
        let now = rank_vector(&state, tol)?;
        if &now != r {
            failures.push(format!("three_rank {r:?} recomputed as {now:?}"));
        }
    }
    let scale = frobenius(&state.dicke_matrix).max(1.0);
    for cert in &file.metadata.certificates {
        match cert {
            Certificate::Ppt { spectra } => {
                check_spectra(&family_spectra(&state), spectra, &state.dicke_matrix, tol, &mut failures);
            }
            Certificate::Ranks { ranks } => {
                let now = rank_vector(&state, tol)?;
                if &now != ranks {
                    failures.push(format!("ranks {ranks:?} recomputed as {now:?}"));
                }
            }
            Certificate::Extremal {
                solution_dim,
                entangled,
            } => match crate::extremal::extremality_test(&state, tol) {
                Ok(r) => {
                    if r.solution_dim != *solution_dim || r.entangled_certificate != *entangled {
                        failures.push(format!(
                            "extremality: stored dim {solution_dim}, recomputed {}",
                            r.solution_dim
                        ));
                    }
                }
                Err(e) => failures.push(format!("extremality: {e}")),
            },
            Certificate::Separable { decomposition } => {
                let rebuilt = match decomposition {
                    SeparabilityCertificate::Products(m) => m.reconstruct(state.num_qubits),
                    SeparabilityCertificate::Gram(g) => {
                        if !g.is_product_form(1e-8) {
                            failures.push("Gram decomposition has entangled terms".into());
                        }
                        g.reconstruct()
                    }
                };
                let err = frobenius(&(rebuilt - &state.dicke_matrix));
                if err > 1e-6 * scale {
                    failures.push(format!("separable decomposition reconstruction error {err:.3e}"));
                }
            }
            Certificate::ProductVector { vector } => {
                let prof = crate::classify::edge::family_profiles(&state, tol)?;
                let r = crate::classify::edge::product_residuals(&prof, state.num_qubits, vector.alpha);
                if r.iter().any(|&x| x > tol.residual_tol) {
                    failures.push(format!("product vector residuals {r:?}"));
                }
            }
        }
    }
    Ok(failures)
}

fn family_spectra(state: &SymmetricState) -> Vec<Vec<f64>> {
    state.pt_family().iter().map(eigvalsh).collect()
}

fn check_spectra(now: &[Vec<f64>], stored: &[Vec<f64>], m: &CMatrix, tol: &Tolerances, failures: &mut Vec<String>) {
    let scale = frobenius(m).max(1.0);
    if now.len() != stored.len() || now.iter().zip(stored).any(|(a, b)| a.len() != b.len()) {
        failures.push("PPT certificate has the wrong shape".into());
        return;
    }
    for (k, (a, b)) in now.iter().zip(stored).enumerate() {
        if a[0] < -tol.psd_tol * scale {
            failures.push(format!("matrix {k} has negative eigenvalue {:.3e}", a[0]));
        }
        let dev = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        if dev > 1e-9 * scale {
            failures.push(format!("matrix {k}: spectrum differs from the stored one by {dev:.3e}"));
        }
    }
}

/// PPT and rank certificates for a qubit–qudit state.
pub fn qubit_qudit_certificates(state: &QubitQuditState, tol: &Tolerances) -> Result<Vec<Certificate>> {
    let (r, rt) = crate::horodecki::ranks(state, tol)?;
    Ok(vec![
        Certificate::Ppt {
            spectra: vec![eigvalsh(&state.matrix), eigvalsh(&state.partial_transpose_a())],
        },
        Certificate::Ranks { ranks: vec![r, rt] },
    ])
}

/// PPT and rank certificates for a symmetric state.
pub fn basic_certificates(state: &SymmetricState, tol: &Tolerances) -> Result<Vec<Certificate>> {
    Ok(vec![
        Certificate::Ppt {
            spectra: family_spectra(state),
        },
        Certificate::Ranks {
            ranks: rank_vector(state, tol)?,
        },
    ])
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub timestamp_ms: u128,
    pub command: String,
    pub seed: Option<u64>,
    pub stage: String,
    pub three_rank: Option<Vec<usize>>,
    pub residuals: Vec<f64>,
    pub outcome: String,
}

/// Append-only JSON-lines log.
#[derive(Clone, Debug)]
pub struct RunLog {
    path: std::path::PathBuf,
    last: u128,
}

impl RunLog {
    pub fn new(path: impl Into<std::path::PathBuf>) -> Self {
        RunLog {
            path: path.into(),
            last: 0,
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&mut self, mut rec: RunRecord) -> Result<()> {
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_millis())
            .unwrap_or(0);
        self.last = self.last.max(now);
        rec.timestamp_ms = self.last;
        if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let mut f = OpenOptions::new().create(true).append(true).open(&self.path)?;
        writeln!(f, "{}", serde_json::to_string(&rec)?)?;
        Ok(())
    }
}
