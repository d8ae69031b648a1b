use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::arc::{ArcError, HybridArc, Interpolation, Sample, Segment};
use super::JumpInterval;

pub const ARC_SCHEMA: &str = "hybridsim.arc/1";

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed arc file: {0}")]
    Malformed(String),
    #[error(transparent)]
    Arc(#[from] ArcError),
}

/// JSON mirror of an arc: schema tag, domain structure and dense output.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArcDocument {
    pub schema: String,
    pub state_dim: usize,
    pub domain: Vec<JumpInterval>,
    pub segments: Vec<Segment>,
}

/// 17 significant digits; parses back to the identical `f64`.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

impl HybridArc {
    pub fn to_document(&self) -> ArcDocument {
        ArcDocument {
            schema: ARC_SCHEMA.to_string(),
            state_dim: self.state_dim(),
            domain: self.domain().intervals().to_vec(),
            segments: self.segments().to_vec(),
        }
    }

    pub fn from_document(doc: ArcDocument) -> Result<Self, ExportError> {
        if doc.schema != ARC_SCHEMA {
            return Err(ExportError::Malformed(format!("unsupported schema {:?}", doc.schema)));
        }
        let arc = HybridArc::from_segments(doc.state_dim, doc.segments)?;
        if arc.domain().intervals() != doc.domain.as_slice() {
            return Err(ExportError::Malformed("domain does not match the segments".into()));
        }
        Ok(arc)
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<(), ExportError> {
        serde_json::to_writer_pretty(out, &self.to_document())?;
        Ok(())
    }

    pub fn read_json<R: Read>(input: R) -> Result<Self, ExportError> {
        let doc: ArcDocument = serde_json::from_reader(input)?;
        Self::from_document(doc)
    }

    /// Columns `j, t, x_1 … x_n`, one row per stored sample.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), ExportError> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["j".to_string(), "t".to_string()];
        header.extend((1..=self.state_dim()).map(|i| format!("x_{i}")));
        w.write_record(&header)?;
        for (j, s) in self.samples() {
            let mut row = vec![j.to_string(), fmt_f64(s.t)];
            row.extend(s.x.iter().map(|v| fmt_f64(*v)));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the CSV layout back. Derivatives are not part of the format, so
    /// the imported segments interpolate linearly.
    pub fn read_csv<R: Read>(input: R) -> Result<Self, ExportError> {
        let mut r = csv::Reader::from_reader(input);
        let headers = r.headers()?.clone();
        if headers.len() < 3 || &headers[0] != "j" || &headers[1] != "t" {
            return Err(ExportError::Malformed("expected header j,t,x_1..x_n".into()));
        }
        let n = headers.len() - 2;
        let mut segments: Vec<Segment> = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let parse = |i: usize| -> Result<f64, ExportError> {
                rec[i].trim().parse::<f64>().map_err(|e| ExportError::Malformed(format!("{}: {e}", &rec[i])))
            };
            let j: usize = rec[0].trim().parse().map_err(|_| ExportError::Malformed(format!("bad j {:?}", &rec[0])))?;
            let t = parse(1)?;
            let x = (0..n).map(|k| parse(k + 2)).collect::<Result<Vec<_>, _>>()?;
            let sample = Sample::new(t, x, Vec::new());
            match segments.last_mut() {
                Some(seg) if seg.j == j => seg.samples.push(sample),
                _ => {
                    let mut seg = Segment::new(j, sample);
                    seg.interpolation = Interpolation::Linear;
                    segments.push(seg);
                }
            }
        }
        if segments.is_empty() {
            return Err(ExportError::Malformed("no rows".into()));
        }
        Ok(HybridArc::from_segments(n, segments)?)
    }
}
