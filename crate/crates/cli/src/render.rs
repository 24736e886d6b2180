//! JSON and flat CSV renderings of the command documents.

use bootperc::Verdict;
use serde::Serialize;

use crate::commands::{property_name, CertifyDoc, ExactDoc, FamiliesDoc, PcDoc, RunDoc, ScanDoc};
use crate::CliError;

pub fn json<T: Serialize>(doc: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(doc).map_err(|e| CliError::internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_rows<R: Serialize>(rows: impl IntoIterator<Item = R>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)
            .map_err(|e| CliError::internal(e.to_string()))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::internal(e.to_string()))
}

pub fn run_csv(doc: &RunDoc) -> Result<String, CliError> {
    #[derive(Serialize)]
    struct Row {
        trial: Option<u64>,
        initial_size: usize,
        percolated: bool,
        rounds_to_stabilize: u32,
        final_size: usize,
    }
    csv_rows(doc.traces.iter().map(|t| Row {
        trial: t.trial,
        initial_size: t.initial_size,
        percolated: t.percolated,
        rounds_to_stabilize: t.rounds_to_stabilize,
        final_size: t.final_size,
    }))
}

pub fn scan_csv(doc: &ScanDoc) -> Result<String, CliError> {
    #[derive(Serialize)]
    struct Row {
        p: f64,
        phi_hat: f64,
        ci_low: f64,
        ci_high: f64,
        successes: u64,
        trials: u64,
        p_tilde: Option<f64>,
        lower: Option<f64>,
        upper: Option<f64>,
        window_point: Option<f64>,
    }
    let t = doc.theory;
    csv_rows(doc.rows.iter().map(|r| Row {
        p: r.p,
        phi_hat: r.phi_hat,
        ci_low: r.ci_low,
        ci_high: r.ci_high,
        successes: r.successes,
        trials: r.trials,
        p_tilde: t.map(|t| t.p_tilde),
        lower: t.map(|t| t.lower),
        upper: t.map(|t| t.upper),
        window_point: t.map(|t| t.window_point),
    }))
}

pub fn pc_csv(doc: &PcDoc) -> Result<String, CliError> {
    #[derive(Serialize)]
    struct Row {
        trials: u64,
        seed: u64,
        median: f64,
        q05: f64,
        q25: f64,
        q75: f64,
        q95: f64,
        p_tilde: Option<f64>,
        lower: Option<f64>,
        upper: Option<f64>,
        window_point: Option<f64>,
    }
    let (e, t) = (&doc.estimate, doc.theory);
    csv_rows([Row {
        trials: e.trials,
        seed: e.base_seed,
        median: e.median,
        q05: e.q05,
        q25: e.q25,
        q75: e.q75,
        q95: e.q95,
        p_tilde: t.map(|t| t.p_tilde),
        lower: t.map(|t| t.lower),
        upper: t.map(|t| t.upper),
        window_point: t.map(|t| t.window_point),
    }])
}

pub fn certify_csv(doc: &CertifyDoc) -> Result<String, CliError> {
    #[derive(Serialize)]
    struct Row {
        property: String,
        status: &'static str,
        evaluated: u64,
        skipped: u64,
        x: Option<String>,
        ell: Option<u32>,
        measured: Option<f64>,
        bound: Option<f64>,
        detail: Option<String>,
    }
    csv_rows(doc.certificate.properties.iter().map(|r| {
        let mut row = Row {
            property: property_name(r.property),
            status: "pass",
            evaluated: r.evaluated,
            skipped: r.skipped,
            x: None,
            ell: None,
            measured: None,
            bound: None,
            detail: None,
        };
        match &r.verdict {
            Verdict::Pass => {}
            Verdict::Fail { witness } => {
                row.status = "fail";
                row.x = witness.labels.first().cloned();
                row.ell = witness.ell;
                row.measured = Some(witness.measured);
                row.bound = Some(witness.bound);
                row.detail = witness.condition.map(String::from);
            }
            Verdict::NotEvaluated { reason } => {
                row.status = "not_evaluated";
                row.detail = Some(reason.clone());
            }
        }
        row
    }))
}

pub fn exact_csv(doc: &ExactDoc) -> Result<String, CliError> {
    #[derive(Serialize)]
    struct Row {
        p: f64,
        phi: f64,
        pc: f64,
    }
    csv_rows(doc.rows.iter().map(|r| Row {
        p: r.p,
        phi: r.phi,
        pc: doc.pc,
    }))
}

pub fn families_csv(doc: &FamiliesDoc) -> Result<String, CliError> {
    match &doc.graph {
        Some(g) => csv_rows([g]),
        None => csv_rows(doc.kinds.iter()),
    }
}
