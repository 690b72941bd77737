//! Ground-truth organizations and the F1-based quality indicator Q.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::benchgen::GroundTruth;
use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::intersection_size;
use crate::kernel::Subspace;
use crate::pipeline::Organization;

/// Indices of the planted communities whose subspace contains every
/// `concerned` dimension. An empty `concerned` selects all of them.
pub fn ground_truth_indices(truth: &GroundTruth, concerned: &[usize]) -> Vec<usize> {
    (0..truth.len())
        .filter(|&c| truth.subspaces[c].contains_all(concerned))
        .collect()
}

/// Planted communities whose subspace contains every `concerned` dimension.
pub fn ground_truth_organization(truth: &GroundTruth, concerned: &[usize]) -> Vec<Vec<NodeId>> {
    ground_truth_indices(truth, concerned)
        .into_iter()
        .map(|c| truth.communities[c].clone())
        .collect()
}

/// F1 of detected set `b` against reference set `a`, both sorted.
/// Precision is `|a∩b|/|b|`, recall `|a∩b|/|a|`.
pub fn f1(a: &[NodeId], b: &[NodeId]) -> f64 {
    let common = intersection_size(a, b);
    if common == 0 || b.is_empty() {
        return 0.0;
    }
    let precision = common as f64 / b.len() as f64;
    let recall = common as f64 / a.len() as f64;
    2.0 * precision * recall / (precision + recall)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthMatch {
    pub truth: usize,
    pub best_f1: f64,
    /// `None` when nothing was detected.
    pub detected: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub q: f64,
    pub per_truth_best: Vec<TruthMatch>,
    pub truth_count: usize,
    pub detected_count: usize,
    pub mean_truth_size: f64,
    pub mean_detected_size: f64,
    /// Mean Jaccard between each matched pair's mined and planted
    /// subspaces, when both are known. Reported only; not part of `q`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subspace_jaccard: Option<f64>,
}

fn mean_size(sets: &[Vec<NodeId>]) -> f64 {
    if sets.is_empty() {
        0.0
    } else {
        sets.iter().map(Vec::len).sum::<usize>() as f64 / sets.len() as f64
    }
}

fn sorted(sets: &[Vec<NodeId>]) -> Vec<Vec<NodeId>> {
    sets.iter()
        .map(|s| {
            let mut s = s.clone();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect()
}

/// Q: the mean over reference communities of their best F1 against any
/// detected community. No detected communities gives Q = 0.
pub fn quality_q(truth_org: &[Vec<NodeId>], detected: &[Vec<NodeId>]) -> Result<EvalReport> {
    if truth_org.is_empty() {
        return Err(Error::Precondition("the reference organization is empty".into()));
    }
    let truth_org = sorted(truth_org);
    let detected = sorted(detected);
    if truth_org.iter().any(Vec::is_empty) {
        return Err(Error::Precondition("reference communities must be non-empty".into()));
    }
    let per_truth_best: Vec<TruthMatch> = truth_org
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let mut best = TruthMatch {
                truth: i,
                best_f1: 0.0,
                detected: None,
            };
            for (j, b) in detected.iter().enumerate() {
                let score = f1(a, b);
                if best.detected.is_none() || score > best.best_f1 {
                    best.best_f1 = score;
                    best.detected = Some(j);
                }
            }
            best
        })
        .collect();
    let q = per_truth_best.iter().map(|m| m.best_f1).sum::<f64>() / truth_org.len() as f64;
    Ok(EvalReport {
        q,
        per_truth_best,
        truth_count: truth_org.len(),
        detected_count: detected.len(),
        mean_truth_size: mean_size(&truth_org),
        mean_detected_size: mean_size(&detected),
        subspace_jaccard: None,
    })
}

/// Scores a mined organization against the planted organization for its
/// concerned dimensions, including subspace agreement of matched pairs.
pub fn evaluate_organization(truth: &GroundTruth, organization: &Organization) -> Result<EvalReport> {
    let concerned = organization.provenance.concerned.dims();
    let indices = ground_truth_indices(truth, concerned);
    let reference: Vec<Vec<NodeId>> = indices.iter().map(|&c| truth.communities[c].clone()).collect();
    let mut report = quality_q(&reference, &organization.communities())?;
    let planted: Vec<&Subspace> = indices.iter().map(|&c| &truth.subspaces[c]).collect();
    let mined: Vec<&Subspace> = organization.pairs.iter().map(|p| &p.subspace).collect();
    report.subspace_jaccard = subspace_agreement(&report, &planted, &mined);
    Ok(report)
}

/// Mean subspace Jaccard over matched pairs; `None` without matches.
pub fn subspace_agreement(report: &EvalReport, planted: &[&Subspace], mined: &[&Subspace]) -> Option<f64> {
    let scores: Vec<f64> = report
        .per_truth_best
        .iter()
        .filter_map(|m| m.detected.map(|j| planted[m.truth].jaccard(mined[j])))
        .collect();
    (!scores.is_empty()).then(|| scores.iter().sum::<f64>() / scores.len() as f64)
}

impl EvalReport {
    pub const CSV_HEADER: [&'static str; 6] = [
        "q",
        "truth_count",
        "detected_count",
        "mean_truth_size",
        "mean_detected_size",
        "subspace_jaccard",
    ];

    pub fn csv_record(&self) -> [String; 6] {
        [
            self.q.to_string(),
            self.truth_count.to_string(),
            self.detected_count.to_string(),
            self.mean_truth_size.to_string(),
            self.mean_detected_size.to_string(),
            self.subspace_jaccard.map(|j| j.to_string()).unwrap_or_default(),
        ]
    }

    /// Writes a header and one flat row.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(Self::CSV_HEADER)?;
        writer.write_record(self.csv_record())?;
        writer.flush().map_err(|e| Error::io("csv", e))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
