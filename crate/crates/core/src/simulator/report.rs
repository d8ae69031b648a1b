use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{Classification, Diagnostics, SimConfig, SolutionReport, Termination};
use crate::hybrid_time::{ArcDocument, ExportError, HybridArc};

pub const REPORT_SCHEMA: &str = "hybridsim.report/1";

/// JSON form of a [`SolutionReport`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema: String,
    pub termination: Termination,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<Classification>,
    pub diagnostics: Diagnostics,
    pub config: SimConfig,
    pub arc: ArcDocument,
}

impl SolutionReport {
    pub fn to_document(&self, classification: Option<Classification>) -> ReportDocument {
        ReportDocument {
            schema: REPORT_SCHEMA.into(),
            termination: self.termination.clone(),
            classification,
            diagnostics: self.diagnostics.clone(),
            config: self.config.clone(),
            arc: self.arc.to_document(),
        }
    }

    pub fn write_json<W: Write>(&self, out: W, classification: Option<Classification>) -> Result<(), ExportError> {
        serde_json::to_writer_pretty(out, &self.to_document(classification))?;
        Ok(())
    }

    /// The arc as CSV, columns `j, t, x_1 … x_n`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), ExportError> {
        self.arc.write_csv(out)
    }

    pub fn read_json<R: Read>(input: R) -> Result<(Self, Option<Classification>), ExportError> {
        let doc: ReportDocument = serde_json::from_reader(input)?;
        if doc.schema != REPORT_SCHEMA {
            return Err(ExportError::Malformed(format!("unsupported schema {:?}", doc.schema)));
        }
        let report = SolutionReport {
            arc: HybridArc::from_document(doc.arc)?,
            termination: doc.termination,
            diagnostics: doc.diagnostics,
            config: doc.config,
        };
        Ok((report, doc.classification))
    }
}
