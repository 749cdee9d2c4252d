// Machine-readable results. Field order is fixed by the struct layout, so
// identical inputs serialize to identical bytes.

use pvss_core::abgrp::{FgAbGroup, Invariants};
use pvss_core::homalg::{ExtensionReport, Resolution};
use pvss_core::specseq::{pv_differential, tuples, ActionSpec, BigradedPage};
use serde::{Deserialize, Serialize};

use crate::system::{from_matrix, InvariantForm, Int, Matrix};
use crate::CliError;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CellReport {
    pub p: usize,
    pub q: u8,
    pub rank: usize,
    pub torsion: Vec<Int>,
}

impl CellReport {
    pub fn invariants(&self) -> Result<Invariants, CliError> {
        InvariantForm {
            rank: self.rank,
            torsion: self.torsion.clone(),
        }
        .to_invariants()
    }
}

/// A differential as a matrix from the source generators to the target
/// generators, both listed by label.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct DifferentialReport {
    pub from: [usize; 2],
    pub to: [usize; 2],
    pub source_basis: Vec<String>,
    pub target_basis: Vec<String>,
    pub matrix: Matrix,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PageReport {
    pub page: usize,
    pub infinity: bool,
    pub cells: Vec<CellReport>,
    pub differentials: Vec<DifferentialReport>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum GroupReport {
    Determined(InvariantForm),
    /// `candidates` is empty when the finite part was too large to enumerate.
    Ambiguous {
        rank: usize,
        candidates: Vec<InvariantForm>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct KPair {
    #[serde(rename = "K0")]
    pub k0: GroupReport,
    #[serde(rename = "K1")]
    pub k1: GroupReport,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CohomologyReport {
    #[serde(rename = "K0")]
    pub k0: Vec<InvariantForm>,
    #[serde(rename = "K1")]
    pub k1: Vec<InvariantForm>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ResultFile {
    pub input_sha256: String,
    pub command: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pages: Vec<PageReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crossed: Option<KPair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cohomology: Option<CohomologyReport>,
    pub warnings: Vec<String>,
}

impl ResultFile {
    pub fn new(command: &str, sha256: &str, n: usize) -> Self {
        ResultFile {
            input_sha256: sha256.to_string(),
            command: command.to_string(),
            n,
            pages: Vec::new(),
            crossed: None,
            cohomology: None,
            warnings: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, CliError> {
        serde_json::from_str(s).map_err(|e| CliError::Parse(e.to_string()))
    }
}

pub fn group_report(r: &ExtensionReport) -> GroupReport {
    match &r.resolution {
        Resolution::Determined(g) => GroupReport::Determined(InvariantForm::new(g.invariants())),
        Resolution::Ambiguous { rank, candidates } => GroupReport::Ambiguous {
            rank: *rank,
            candidates: candidates.iter().map(InvariantForm::new).collect(),
        },
    }
}

pub fn invariant_forms(groups: &[FgAbGroup]) -> Vec<InvariantForm> {
    groups.iter().map(|g| InvariantForm::new(g.invariants())).collect()
}

/// Labels of the E1 ambient generators: `name⊗e(λ)`, with `name⊗1` for p = 0.
pub fn e1_labels(spec: &ActionSpec, p: usize, q: u8) -> Vec<String> {
    let mut out = Vec::new();
    for lam in tuples(p, spec.n()) {
        for name in spec.names(q) {
            if lam.is_empty() {
                out.push(format!("{name}⊗1"));
            } else {
                out.push(format!("{name}⊗e{lam}"));
            }
        }
    }
    out
}

fn cell_labels(page: &BigradedPage, p: usize, q: u8) -> Vec<String> {
    (0..page.group(p, q).gens())
        .map(|i| format!("E{}[{p},{q}]#{i}", page.page_number()))
        .collect()
}

/// A page with its cells and differentials. On E1 the differentials are the
/// PV maps on the ambient generators; later pages use the cell generators.
pub fn page_report(spec: &ActionSpec, page: &BigradedPage) -> Result<PageReport, CliError> {
    let cells = page
        .cells()
        .map(|((p, q), sq)| {
            let inv = sq.invariants();
            CellReport {
                p,
                q,
                rank: inv.rank,
                torsion: inv.torsion.iter().cloned().map(Int).collect(),
            }
        })
        .collect();
    let mut differentials = Vec::new();
    for ((p, q), d) in page.differentials() {
        let (tp, tq) = page.target_of(p, q).expect("differentials stay on the page");
        let (source_basis, target_basis, matrix) = match page.page_number() {
            1 => (
                e1_labels(spec, p, q),
                e1_labels(spec, tp, tq),
                from_matrix(pv_differential(spec, p, q)?.matrix()),
            ),
            _ => (
                cell_labels(page, p, q),
                cell_labels(page, tp, tq),
                from_matrix(d.matrix()),
            ),
        };
        differentials.push(DifferentialReport {
            from: [p, q as usize],
            to: [tp, tq as usize],
            source_basis,
            target_basis,
            matrix,
        });
    }
    Ok(PageReport {
        page: page.page_number(),
        infinity: page.is_infinity(),
        cells,
        differentials,
    })
}
