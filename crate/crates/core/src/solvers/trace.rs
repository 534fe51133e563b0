use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geometry::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TerminationStatus {
    /// `‖x^{k+1} − x^k‖` fell below the residual tolerance.
    ResidualTolerance,
    /// The iterate satisfies every constraint within the feasibility tolerance.
    Feasible,
    /// The inner-approximation method reached a point of the feasible set.
    FinitelyConvergent,
    /// Iteration budget exhausted.
    Budget,
    /// Not produced by a solver (fixtures, imported CSV).
    Generated,
}

impl TerminationStatus {
    pub fn is_budget(self) -> bool {
        self == TerminationStatus::Budget
    }
}

/// What happened on the step from `x^k` to `x^{k+1}`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct StepRecord {
    pub active_index: Option<usize>,
    pub epsilon: Option<f64>,
    pub residual: f64,
    pub null_step: bool,
}

/// An ordered run of iterates `x^0, x^1, …` with provenance metadata.
/// `annotations[k]` describes the step `k → k + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub algorithm: String,
    pub status: TerminationStatus,
    pub params: BTreeMap<String, Value>,
    pub iterates: Vec<Vector>,
    pub annotations: Vec<StepRecord>,
}

impl Trace {
    pub fn new(algorithm: impl Into<String>, x0: Vector) -> Self {
        Trace {
            algorithm: algorithm.into(),
            status: TerminationStatus::Generated,
            params: BTreeMap::new(),
            iterates: vec![x0],
            annotations: Vec::new(),
        }
    }

    /// A bare trace with empty metadata and no annotations.
    pub fn from_iterates(iterates: Vec<Vector>) -> Result<Self> {
        let t = Trace {
            algorithm: "manual".into(),
            status: TerminationStatus::Generated,
            params: BTreeMap::new(),
            iterates,
            annotations: Vec::new(),
        };
        t.validate()?;
        Ok(t)
    }

    pub fn push(&mut self, x: Vector, record: StepRecord) {
        self.iterates.push(x);
        self.annotations.push(record);
    }

    pub fn with_param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn len(&self) -> usize {
        self.iterates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterates.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.iterates[0].dim()
    }

    pub fn last(&self) -> &Vector {
        self.iterates.last().expect("trace is never empty")
    }

    /// The first `len` iterates (and their annotations).
    pub fn prefix(&self, len: usize) -> Trace {
        let len = len.clamp(1, self.len());
        Trace {
            algorithm: self.algorithm.clone(),
            status: self.status,
            params: self.params.clone(),
            iterates: self.iterates[..len].to_vec(),
            annotations: self.annotations.iter().take(len - 1).cloned().collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let first = self.iterates.first().ok_or(Error::TraceTooShort { needed: 1, found: 0 })?;
        for x in &self.iterates {
            x.ensure_dim(first.dim())?;
        }
        if !self.annotations.is_empty() && self.annotations.len() + 1 != self.iterates.len() {
            return Err(Error::Format(format!(
                "{} annotations for {} iterates",
                self.annotations.len(),
                self.iterates.len()
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let t: Trace = serde_json::from_str(s)?;
        t.validate()?;
        Ok(t)
    }

    /// Metadata lines (`# algorithm: ..`, `# status: ..`, `# params: {json}`)
    /// followed by one row per iterate: `k, x1..xn, active_index, epsilon,
    /// residual, null_step`. Annotation columns on row `k` describe the step
    /// leaving `x^k`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let status = serde_json::to_value(self.status)?;
        let meta = format!(
            "# algorithm: {}\n# status: {}\n# params: {}\n",
            self.algorithm.replace('\n', " "),
            status.as_str().unwrap_or_default(),
            serde_json::to_string(&self.params)?
        );
        out.write_all(meta.as_bytes()).map_err(|e| Error::Format(e.to_string()))?;
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["k".to_string()];
        header.extend((1..=self.dim()).map(|i| format!("x{i}")));
        header.extend(["active_index", "epsilon", "residual", "null_step"].map(String::from));
        w.write_record(&header)?;
        for (k, x) in self.iterates.iter().enumerate() {
            let mut row = vec![k.to_string()];
            row.extend(x.as_slice().iter().map(|v| format!("{v:?}")));
            match self.annotations.get(k) {
                Some(a) => {
                    row.push(a.active_index.map(|i| i.to_string()).unwrap_or_default());
                    row.push(a.epsilon.map(|e| format!("{e:?}")).unwrap_or_default());
                    row.push(format!("{:?}", a.residual));
                    row.push(a.null_step.to_string());
                }
                None => row.extend(std::iter::repeat(String::new()).take(4)),
            }
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| Error::Format(e.to_string()))?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Format(e.to_string()))
    }

    /// Reads iterates, annotations and any `#` metadata lines back. Columns
    /// other than `x1..xn` and the annotation columns are optional.
    pub fn read_csv<R: Read>(mut input: R) -> Result<Self> {
        let mut text = String::new();
        input.read_to_string(&mut text).map_err(|e| Error::Format(e.to_string()))?;
        let mut meta_lines = 0;
        let mut algorithm = "csv".to_string();
        let mut status = TerminationStatus::Generated;
        let mut params = BTreeMap::new();
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            meta_lines += 1;
            let n = meta_lines;
            let Some((key, value)) = line[1..].split_once(':') else { continue };
            let value = value.trim();
            let bad = |e: serde_json::Error| Error::Format(format!("line {n}: {e}"));
            match key.trim() {
                "algorithm" => algorithm = value.to_string(),
                "status" => status = serde_json::from_value(Value::String(value.to_string())).map_err(bad)?,
                "params" => params = serde_json::from_str(value).map_err(bad)?,
                _ => {}
            }
        }
        let body: String = text.lines().skip(meta_lines).map(|l| format!("{l}\n")).collect();
        let mut r = csv::Reader::from_reader(body.as_bytes());
        let headers = r.headers()?.clone();
        let xcols: Vec<usize> = headers
            .iter()
            .enumerate()
            .filter(|(_, h)| h.len() > 1 && h.starts_with('x') && h[1..].chars().all(|c| c.is_ascii_digit()))
            .map(|(i, _)| i)
            .collect();
        if xcols.is_empty() {
            return Err(Error::Format("CSV trace has no x1..xn columns".into()));
        }
        let col = |name: &str| headers.iter().position(|h| h == name);
        let (ai, ei, ri, ni) = (col("active_index"), col("epsilon"), col("residual"), col("null_step"));
        let parse = |s: &str, line: usize| -> Result<f64> {
            s.trim().parse::<f64>().map_err(|e| Error::Format(format!("line {line}: {e}")))
        };
        let mut iterates = Vec::new();
        let mut annotations = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            let line = line + 2 + meta_lines;
            let comps = xcols.iter().map(|&i| parse(&rec[i], line)).collect::<Result<Vec<_>>>()?;
            iterates.push(Vector::new(comps)?);
            let residual = ri.map(|i| rec[i].trim()).filter(|s| !s.is_empty());
            if let Some(res) = residual {
                annotations.push(StepRecord {
                    active_index: ai
                        .map(|i| rec[i].trim())
                        .filter(|s| !s.is_empty())
                        .map(|s| s.parse().map_err(|e| Error::Format(format!("line {line}: {e}"))))
                        .transpose()?,
                    epsilon: ei.map(|i| rec[i].trim()).filter(|s| !s.is_empty()).map(|s| parse(s, line)).transpose()?,
                    residual: parse(res, line)?,
                    null_step: ni.is_some_and(|i| rec[i].trim() == "true"),
                });
            }
        }
        let mut t = Trace::new(algorithm, iterates.first().cloned().ok_or(Error::TraceTooShort { needed: 1, found: 0 })?);
        t.status = status;
        t.params = params;
        t.iterates = iterates;
        t.annotations = if annotations.len() + 1 == t.iterates.len() { annotations } else { Vec::new() };
        t.validate()?;
        Ok(t)
    }
}
