//! Rank-based classification, edge tests and separable decompositions.

pub mod edge;
pub mod gram;

pub use edge::{
    edge_test, kernel_schmidt_symmetric, solve_case_579, solve_case_587, solve_case_588,
    EdgeTestReport, FoundVector, SolutionCurve, SymmetricKernelSchmidt,
};
pub use gram::{
    decompose_gram, decompose_products, gram_state, term_vector, separability_certificate, GramDecomposition, GramForm,
    GramOutcome, ProductMixture, SeparabilityCertificate, GRAM_MAX_TERMS,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extremal::{extremality_test, ExtremalityReport};
use crate::hilbert::{three_rank, SymmetricState, ThreeRank, Tolerances};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    SeparableByTheorem,
    GenericallySeparable,
    GenericallyNotEdge,
    NotEdgeProven,
    EdgeCandidate,
    ExtremalEntangled,
    /// An explicit decomposition into product vectors was found.
    SeparableByCertificate,
    /// A product vector in all ranges was found, so the state is not edge.
    NotEdgeByVector,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Classification {
    pub three_rank: ThreeRank,
    pub verdict: Verdict,
    pub justification: String,
}

/// Decision table on the three-rank alone.
pub fn classify_by_ranks(tr: ThreeRank) -> Result<Classification> {
    let [r, ra, rab] = tr.0;
    if r == 0 || r > 5 || ra > 8 || rab > 9 {
        return Err(Error::InvalidParameter(format!("three-rank {tr} out of bounds")));
    }
    let (verdict, why) = if r <= 4 || ra <= 4 || rab <= 3 {
        (Verdict::SeparableByTheorem, "low rank of ρ, ρ^{T_A} or ρ^{T_AB}")
    } else if ra <= 6 || rab <= 6 {
        (Verdict::GenericallySeparable, "PT of rank at most 6 on C²⊗C⁶")
    } else {
        match (ra, rab) {
            (8, 8) => (Verdict::NotEdgeProven, "every (5,8,8) state has a product vector in all ranges"),
            (7, 7) | (7, 8) => (Verdict::EdgeCandidate, "not excluded by the generic edge analysis"),
            _ => (Verdict::GenericallyNotEdge, "generic states of this three-rank have a product vector in all ranges"),
        }
    };
    Ok(Classification {
        three_rank: tr,
        verdict,
        justification: why.to_string(),
    })
}

#[derive(Clone, Debug)]
pub struct Certification {
    pub classification: Classification,
    pub by_ranks: Classification,
    pub extremality: Option<ExtremalityReport>,
    pub edge: Option<EdgeTestReport>,
    pub certificate: Option<SeparabilityCertificate>,
}

/// Rank rules, extremality, edge test and decomposition, strongest verdict first.
pub fn certify(state: &SymmetricState, seed: u64, tol: &Tolerances) -> Result<Certification> {
    if state.num_qubits != 4 {
        return Err(Error::InvalidParameter("certification is four-qubit only".into()));
    }
    state.require_ppt(tol).map_err(Error::at("precondition"))?;
    let tr = three_rank(state, tol)?;
    let by_ranks = classify_by_ranks(tr)?;
    let ext = extremality_test(state, tol).map_err(Error::at("extremality"))?;
    let edge = match edge_test(state, tol) {
        Ok(r) => Some(r),
        Err(Error::Dispatch(_)) => None,
        Err(e) => return Err(Error::at("edge")(e)),
    };
    let mk = |verdict, why: String| Classification {
        three_rank: tr,
        verdict,
        justification: why,
    };
    let mut certificate = None;
    let classification = if ext.is_extremal && tr.0[0] >= 2 {
        mk(
            Verdict::ExtremalEntangled,
            "extremal PPT state of rank ≥ 2 (fixed-point solution space is one-dimensional)".into(),
        )
    } else if ext.is_extremal {
        mk(Verdict::SeparableByTheorem, "extremal state of rank one is a pure product".into())
    } else {
        certificate = separability_certificate(state, seed, tol).map_err(Error::at("decompose"))?;
        if let Some(cert) = &certificate {
            mk(
                Verdict::SeparableByCertificate,
                format!(
                    "{} product terms, reconstruction error {:.2e}",
                    cert.num_terms(),
                    cert.reconstruction_error()
                ),
            )
        } else if by_ranks.verdict == Verdict::SeparableByTheorem {
            by_ranks.clone()
        } else if edge.as_ref().is_some_and(|e| e.is_edge_counterexample) {
            mk(Verdict::NotEdgeByVector, "product vector found in all ranges".into())
        } else if by_ranks.verdict == Verdict::EdgeCandidate {
            mk(Verdict::Inconclusive, "edge candidate without certificate".into())
        } else {
            by_ranks.clone()
        }
    };
    Ok(Certification {
        classification,
        by_ranks,
        extremality: Some(ext),
        edge,
        certificate,
    })
}
