//! Flat result rows and their CSV / JSON-lines persistence.
//!
//! Floats are written with 10 significant digits. Rows round their values to
//! that precision on construction, so reading a file back reproduces the rows
//! exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde_json::{Map, Value};

use crate::bounds::BoundReport;
use crate::error::{Error, Result};
use crate::harness::config::OutputFormat;
use crate::momentslab::MomentReport;

pub const HEADER: [&str; 24] = [
    "experiment_id",
    "inequality_id",
    "family",
    "m",
    "n",
    "p",
    "q",
    "gamma",
    "beta",
    "L",
    "trials",
    "seed",
    "lhs_mean",
    "lhs_se",
    "term1_name",
    "term1",
    "term2_name",
    "term2",
    "term3_name",
    "term3",
    "rhs_bracket",
    "ratio",
    "reverse_ratio",
    "runtime_ms",
];

/// Prefix marking an error row in the `term1_name` column.
pub const ERROR_PREFIX: &str = "error: ";

/// Rounds to the 10 significant digits used on output.
pub fn round_sig(v: f64) -> f64 {
    if v.is_finite() {
        format_float(v).parse().expect("formatted float parses")
    } else {
        v
    }
}

fn format_float(v: f64) -> String {
    format!("{v:.9e}")
}

/// One output line.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment_id: String,
    pub inequality_id: String,
    pub family: String,
    pub m: usize,
    pub n: usize,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    pub l: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    pub lhs_mean: Option<f64>,
    pub lhs_se: Option<f64>,
    /// At most three named terms.
    pub terms: Vec<(String, f64)>,
    pub rhs_bracket: Option<f64>,
    pub ratio: Option<f64>,
    pub reverse_ratio: Option<f64>,
    pub runtime_ms: Option<u64>,
    /// Reason a grid cell could not be run.
    pub error: Option<String>,
}

impl ResultRow {
    /// Rounds every float to output precision.
    fn rounded(mut self) -> Self {
        let r = |v: &mut Option<f64>| *v = v.map(round_sig);
        r(&mut self.p);
        r(&mut self.q);
        r(&mut self.gamma);
        r(&mut self.beta);
        r(&mut self.l);
        r(&mut self.lhs_mean);
        r(&mut self.lhs_se);
        r(&mut self.rhs_bracket);
        r(&mut self.ratio);
        r(&mut self.reverse_ratio);
        for t in &mut self.terms {
            t.1 = round_sig(t.1);
        }
        self
    }

    pub fn from_bound(experiment_id: &str, report: &BoundReport, runtime: bool) -> Self {
        ResultRow {
            experiment_id: experiment_id.to_string(),
            inequality_id: report.inequality_id.to_string(),
            family: report.family.to_string(),
            m: report.m,
            n: report.n,
            p: Some(report.pq.p),
            q: Some(report.pq.q),
            gamma: report.gamma,
            beta: report.beta,
            l: report.l,
            trials: report.trials,
            seed: report.seed,
            lhs_mean: Some(report.lhs_mean),
            lhs_se: Some(report.lhs_se),
            terms: report
                .terms
                .iter()
                .map(|t| (t.name.clone(), t.value))
                .collect(),
            rhs_bracket: Some(report.rhs_bracket),
            ratio: Some(report.ratio),
            reverse_ratio: report.reverse_ratio,
            runtime_ms: runtime.then_some(report.runtime_ms),
            error: None,
        }
        .rounded()
    }

    /// Moment checks fill `lhs_mean`, `lhs_se`, a single term `rhs` and `ratio`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_moment(
        experiment_id: &str,
        report: &MomentReport,
        family: &str,
        m: usize,
        n: usize,
        p: Option<f64>,
        q: Option<f64>,
        params: (Option<f64>, Option<f64>, Option<f64>),
        runtime_ms: Option<u64>,
    ) -> Self {
        ResultRow {
            experiment_id: experiment_id.to_string(),
            inequality_id: report.check_id.to_string(),
            family: family.to_string(),
            m,
            n,
            p,
            q,
            gamma: params.0,
            beta: params.1,
            l: params.2,
            trials: report.trials,
            seed: report.seed,
            lhs_mean: Some(report.lhs),
            lhs_se: Some(report.lhs_se),
            terms: vec![("rhs".to_string(), report.rhs)],
            rhs_bracket: Some(report.rhs),
            ratio: Some(report.constant),
            reverse_ratio: None,
            runtime_ms,
            error: None,
        }
        .rounded()
    }

    /// Row for a grid cell that failed; numeric result columns stay empty.
    #[allow(clippy::too_many_arguments)]
    pub fn error(
        experiment_id: &str,
        id: &str,
        family: &str,
        m: usize,
        n: usize,
        pq: Option<(f64, f64)>,
        trials: usize,
        seed: u64,
        reason: &str,
    ) -> Self {
        ResultRow {
            experiment_id: experiment_id.to_string(),
            inequality_id: id.to_string(),
            family: family.to_string(),
            m,
            n,
            p: pq.map(|x| x.0),
            q: pq.map(|x| x.1),
            gamma: None,
            beta: None,
            l: None,
            trials,
            seed,
            lhs_mean: None,
            lhs_se: None,
            terms: Vec::new(),
            rhs_bracket: None,
            ratio: None,
            reverse_ratio: None,
            runtime_ms: None,
            error: Some(reason.to_string()),
        }
        .rounded()
    }

    /// The 24 fields in header order, as written to CSV.
    pub fn fields(&self) -> Vec<String> {
        let f = |v: Option<f64>| v.map(format_float).unwrap_or_default();
        let term = |k: usize| -> (String, String) {
            if k == 0 {
                if let Some(reason) = &self.error {
                    return (format!("{ERROR_PREFIX}{reason}"), String::new());
                }
            }
            self.terms
                .get(k)
                .map(|(name, v)| (name.clone(), format_float(*v)))
                .unwrap_or_default()
        };
        let (t1n, t1) = term(0);
        let (t2n, t2) = term(1);
        let (t3n, t3) = term(2);
        vec![
            self.experiment_id.clone(),
            self.inequality_id.clone(),
            self.family.clone(),
            self.m.to_string(),
            self.n.to_string(),
            f(self.p),
            f(self.q),
            f(self.gamma),
            f(self.beta),
            f(self.l),
            self.trials.to_string(),
            self.seed.to_string(),
            f(self.lhs_mean),
            f(self.lhs_se),
            t1n,
            t1,
            t2n,
            t2,
            t3n,
            t3,
            f(self.rhs_bracket),
            f(self.ratio),
            f(self.reverse_ratio),
            self.runtime_ms.map(|v| v.to_string()).unwrap_or_default(),
        ]
    }

    /// Inverse of [`ResultRow::fields`].
    pub fn from_fields(fields: &[String]) -> Result<Self> {
        if fields.len() != HEADER.len() {
            return Err(Error::Config(format!(
                "expected {} columns, found {}",
                HEADER.len(),
                fields.len()
            )));
        }
        let col = |name: &str| {
            &fields[HEADER
                .iter()
                .position(|h| *h == name)
                .expect("known column")]
        };
        let opt = |name: &str| -> Result<Option<f64>> {
            let s = col(name);
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse()
                    .map(Some)
                    .map_err(|e| Error::Config(format!("column {name}: `{s}`: {e}")))
            }
        };
        let int = |name: &str| -> Result<u64> {
            col(name)
                .parse()
                .map_err(|e| Error::Config(format!("column {name}: `{}`: {e}", col(name))))
        };
        let mut terms = Vec::new();
        let mut error = None;
        for k in 1..=3 {
            let name = col(&format!("term{k}_name"));
            if k == 1 {
                if let Some(reason) = name.strip_prefix(ERROR_PREFIX) {
                    error = Some(reason.to_string());
                    continue;
                }
            }
            if let Some(v) = opt(&format!("term{k}"))? {
                terms.push((name.clone(), v));
            }
        }
        Ok(ResultRow {
            experiment_id: col("experiment_id").clone(),
            inequality_id: col("inequality_id").clone(),
            family: col("family").clone(),
            m: int("m")? as usize,
            n: int("n")? as usize,
            p: opt("p")?,
            q: opt("q")?,
            gamma: opt("gamma")?,
            beta: opt("beta")?,
            l: opt("L")?,
            trials: int("trials")? as usize,
            seed: int("seed")?,
            lhs_mean: opt("lhs_mean")?,
            lhs_se: opt("lhs_se")?,
            terms,
            rhs_bracket: opt("rhs_bracket")?,
            ratio: opt("ratio")?,
            reverse_ratio: opt("reverse_ratio")?,
            runtime_ms: if col("runtime_ms").is_empty() {
                None
            } else {
                Some(int("runtime_ms")?)
            },
            error,
        })
    }

    /// JSON object keyed by the CSV header; empty columns become `null`,
    /// numbers stay numbers.
    pub fn to_json(&self) -> Value {
        let fields = self.fields();
        let mut map = Map::new();
        for (name, value) in HEADER.iter().zip(fields) {
            let v = if value.is_empty() {
                Value::Null
            } else if is_text_column(name) {
                Value::String(value)
            } else if let Ok(i) = value.parse::<u64>() {
                Value::from(i)
            } else {
                value
                    .parse::<f64>()
                    .ok()
                    .and_then(serde_json::Number::from_f64)
                    .map_or(Value::String(value), Value::Number)
            };
            map.insert(name.to_string(), v);
        }
        Value::Object(map)
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Config("JSON line is not an object".into()))?;
        let fields: Vec<String> = HEADER
            .iter()
            .map(|name| match obj.get(*name) {
                None | Some(Value::Null) => String::new(),
                Some(Value::String(s)) => s.clone(),
                Some(Value::Number(n)) if is_text_column(name) => n.to_string(),
                Some(Value::Number(n)) => match n.as_u64() {
                    Some(i) if !is_float_column(name) => i.to_string(),
                    _ => n.as_f64().map(format_float).unwrap_or_default(),
                },
                Some(other) => other.to_string(),
            })
            .collect();
        Self::from_fields(&fields)
    }
}

fn is_text_column(name: &str) -> bool {
    matches!(name, "experiment_id" | "inequality_id" | "family") || name.ends_with("_name")
}

fn is_float_column(name: &str) -> bool {
    !matches!(name, "m" | "n" | "trials" | "seed" | "runtime_ms") && !is_text_column(name)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes rows as CSV with the fixed header, to any writer.
pub fn write_csv<W: Write>(rows: &[ResultRow], writer: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(HEADER)?;
    for row in rows {
        w.write_record(row.fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_jsonl<W: Write>(rows: &[ResultRow], mut writer: W) -> std::io::Result<()> {
    for row in rows {
        serde_json::to_writer(&mut writer, &row.to_json())?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}

/// Writes `rows` to `path`.
pub fn emit_results(rows: &[ResultRow], path: &Path, format: OutputFormat) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let writer = BufWriter::new(file);
    match format {
        OutputFormat::Csv => write_csv(rows, writer).map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        }),
        OutputFormat::Jsonl => write_jsonl(rows, writer).map_err(io_err(path)),
    }
}

/// Reads a file written by [`emit_results`].
pub fn read_results(path: &Path, format: OutputFormat) -> Result<Vec<ResultRow>> {
    let file = File::open(path).map_err(io_err(path))?;
    match format {
        OutputFormat::Csv => {
            let mut reader = csv::Reader::from_reader(file);
            let header = reader.headers().map_err(|source| Error::Csv {
                path: path.to_path_buf(),
                source,
            })?;
            if header.iter().ne(HEADER.iter().copied()) {
                return Err(Error::Config(format!(
                    "{}: unexpected CSV header",
                    path.display()
                )));
            }
            reader
                .records()
                .map(|rec| {
                    let rec = rec.map_err(|source| Error::Csv {
                        path: path.to_path_buf(),
                        source,
                    })?;
                    ResultRow::from_fields(&rec.iter().map(str::to_string).collect::<Vec<_>>())
                })
                .collect()
        }
        OutputFormat::Jsonl => BufReader::new(file)
            .lines()
            .filter(|l| l.as_ref().map_or(true, |s| !s.trim().is_empty()))
            .map(|line| {
                let line = line.map_err(io_err(path))?;
                let value: Value = serde_json::from_str(&line)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                ResultRow::from_json(&value)
            })
            .collect(),
    }
}
