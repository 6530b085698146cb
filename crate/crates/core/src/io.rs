//! File formats: counting functions as JSON or CSV, trace tables, location
//! and failure reports. Floats are always written with 17 significant digits
//! so that output is byte-stable and round-trips exactly.

use std::io;

use serde::{Deserialize, Serialize};

use crate::counting::{model_tail, CountingFunction, Jump, Provenance, SpectralTail, Timbre};
use crate::error::{Error, Result};
use crate::graphs::Failure;
use crate::inversion::LocationReport;
use crate::models::{EigenspaceBlock, ModelGeometry};
use crate::transforms::{HeatTraceResult, WaveTraceSample};

/// `x` with 17 significant digits in scientific notation.
pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        // Keep the sign of negative zero out of the output.
        return "0.0000000000000000e0".to_string();
    }
    format!("{x:.16e}")
}

struct FixedFloats;

impl serde_json::ser::Formatter for FixedFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Compact JSON with fixed float formatting and a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats);
    value.serialize(&mut ser).map_err(|e| Error::Format(e.to_string()))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Format(e.to_string()))
}

#[derive(Serialize, Deserialize)]
struct JumpRecord {
    lambda: f64,
    weight: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CountingRecord {
    model: String,
    point: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    second_point: Option<Vec<f64>>,
    cutoff: f64,
    jumps: Vec<JumpRecord>,
    #[serde(default)]
    suppressed: Vec<f64>,
}

/// Tail implied by a model string: graphs are complete, manifolds follow Weyl.
pub fn tail_for_model(model: &str) -> Result<SpectralTail> {
    if model.starts_with("graph:") {
        return Ok(SpectralTail::Complete);
    }
    let m: ModelGeometry = model.parse()?;
    Ok(model_tail(&m))
}

pub fn counting_to_json(cf: &CountingFunction) -> Result<String> {
    let p = cf.provenance();
    to_json(&CountingRecord {
        model: p.model.clone(),
        point: p.point.clone(),
        second_point: p.second_point.clone(),
        cutoff: cf.cutoff(),
        jumps: cf.jumps().iter().map(|j| JumpRecord { lambda: j.lambda, weight: j.weight }).collect(),
        suppressed: cf.suppressed().to_vec(),
    })
}

pub fn counting_from_json(text: &str) -> Result<CountingFunction> {
    let rec: CountingRecord = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    let tail = tail_for_model(&rec.model)?;
    CountingFunction::from_parts(
        rec.jumps.into_iter().map(|j| Jump { lambda: j.lambda, weight: j.weight }).collect(),
        rec.suppressed,
        rec.cutoff,
        Provenance { model: rec.model, point: rec.point, second_point: rec.second_point },
        tail,
    )
}

/// `lambda,weight` table with a header row.
pub fn counting_to_csv(cf: &CountingFunction) -> Result<String> {
    let rows: Vec<[f64; 2]> = cf.jumps().iter().map(|j| [j.lambda, j.weight]).collect();
    table_to_csv(&["lambda", "weight"], &rows)
}

/// Read a `lambda,weight` table. The CSV carries no metadata, so the model,
/// point and cutoff come from the caller; without a cutoff the largest
/// frequency is used.
pub fn counting_from_csv(text: &str, provenance: Provenance, cutoff: Option<f64>) -> Result<CountingFunction> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::Format(e.to_string()))?;
    if headers.iter().collect::<Vec<_>>() != ["lambda", "weight"] {
        return Err(Error::Format("expected header `lambda,weight`".into()));
    }
    let mut raw = Vec::new();
    for record in reader.deserialize::<(f64, f64)>() {
        raw.push(record.map_err(|e| Error::Format(e.to_string()))?);
    }
    let cutoff = cutoff.unwrap_or_else(|| raw.last().map_or(0.0, |r| r.0));
    let tail = tail_for_model(&provenance.model)?;
    CountingFunction::from_raw(raw, cutoff, provenance, tail)
}

fn table_to_csv<const N: usize>(header: &[&str; N], rows: &[[f64; N]]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| Error::Format(e.to_string()))?;
    for row in rows {
        w.write_record(row.iter().map(|&x| format_f64(x))).map_err(|e| Error::Format(e.to_string()))?;
    }
    String::from_utf8(w.into_inner().map_err(|e| Error::Format(e.to_string()))?).map_err(|e| Error::Format(e.to_string()))
}

pub fn wave_to_csv(samples: &[WaveTraceSample]) -> Result<String> {
    let rows: Vec<[f64; 2]> = samples.iter().map(|s| [s.t, s.value]).collect();
    table_to_csv(&["t", "value"], &rows)
}

pub fn heat_to_csv(rows: &[HeatTraceResult]) -> Result<String> {
    let rows: Vec<[f64; 3]> = rows.iter().map(|h| [h.t, h.value, h.tail_bound]).collect();
    table_to_csv(&["t", "value", "tail_bound"], &rows)
}

pub fn wave_to_json(samples: &[WaveTraceSample], looping_times: &[f64]) -> Result<String> {
    #[derive(Serialize)]
    struct Row {
        t: f64,
        value: f64,
    }
    #[derive(Serialize)]
    struct Out {
        sigma: f64,
        looping_times: Vec<f64>,
        samples: Vec<Row>,
    }
    to_json(&Out {
        sigma: samples.first().map_or(0.0, |s| s.sigma),
        looping_times: looping_times.to_vec(),
        samples: samples.iter().map(|s| Row { t: s.t, value: s.value }).collect(),
    })
}

pub fn heat_to_json(rows: &[HeatTraceResult]) -> Result<String> {
    #[derive(Serialize)]
    struct Row {
        t: f64,
        value: f64,
        tail_bound: f64,
        half_laplacian: bool,
    }
    let out: Vec<Row> = rows
        .iter()
        .map(|h| Row { t: h.t, value: h.value, tail_bound: h.tail_bound, half_laplacian: h.half_laplacian })
        .collect();
    to_json(&out)
}

/// Eigenspace list `[{"frequency", "multiplicity"}]`.
pub fn blocks_to_json(model: &ModelGeometry, cutoff: f64, blocks: &[EigenspaceBlock]) -> Result<String> {
    #[derive(Serialize)]
    struct Row {
        frequency: f64,
        multiplicity: usize,
    }
    #[derive(Serialize)]
    struct Out {
        model: String,
        cutoff: f64,
        blocks: Vec<Row>,
    }
    to_json(&Out {
        model: model.to_string(),
        cutoff,
        blocks: blocks.iter().map(|b| Row { frequency: b.frequency(), multiplicity: b.multiplicity() }).collect(),
    })
}

pub fn blocks_to_csv(blocks: &[EigenspaceBlock]) -> Result<String> {
    let mut out = String::from("frequency,multiplicity\n");
    for b in blocks {
        out.push_str(&format!("{},{}\n", format_f64(b.frequency()), b.multiplicity()));
    }
    Ok(out)
}

/// Timbre amplitudes `{"model", "point", "cutoff", "timbre": [{"lambda", "amplitude"}]}`.
pub fn timbre_to_json(cf: &CountingFunction, t: &Timbre) -> Result<String> {
    #[derive(Serialize)]
    struct Row {
        lambda: f64,
        amplitude: f64,
    }
    #[derive(Serialize)]
    struct Out<'a> {
        model: &'a str,
        point: &'a [f64],
        cutoff: f64,
        timbre: Vec<Row>,
    }
    let p = cf.provenance();
    to_json(&Out {
        model: &p.model,
        point: &p.point,
        cutoff: cf.cutoff(),
        timbre: t.entries.iter().map(|&(lambda, amplitude)| Row { lambda, amplitude }).collect(),
    })
}

pub fn timbre_to_csv(t: &Timbre) -> Result<String> {
    let rows: Vec<[f64; 2]> = t.entries.iter().map(|&(l, a)| [l, a]).collect();
    table_to_csv(&["lambda", "amplitude"], &rows)
}

#[derive(Serialize)]
struct CandidateRecord<'a> {
    point: &'a [f64],
    residual: f64,
}

#[derive(Serialize)]
struct ReportRecord<'a> {
    status: &'a str,
    orbits: Vec<Vec<CandidateRecord<'a>>>,
}

pub fn location_to_json(report: &LocationReport) -> Result<String> {
    to_json(&ReportRecord {
        status: report.status.as_str(),
        orbits: report
            .orbits()
            .into_iter()
            .map(|o| o.into_iter().map(|c| CandidateRecord { point: c.point.coords(), residual: c.residual }).collect())
            .collect(),
    })
}

/// One failure report per line.
pub fn failures_to_json_lines(failures: &[Failure]) -> Result<String> {
    let mut out = String::new();
    for f in failures {
        out.push_str(&to_json(f)?);
    }
    Ok(out)
}
