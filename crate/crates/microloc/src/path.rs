//! Uniformly sampled paths and their on-disk formats.

use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::function::ScalarFunctionSpec;
use crate::process::ProcessSpec;

pub const MAGIC: &[u8; 4] = b"MLP1";

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PathMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<ProcessSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<ScalarFunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stream: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frac_order: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frac_window: Option<usize>,
    /// Index of the first sample not affected by the fractional-difference
    /// boundary.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampledPath {
    t_start: f64,
    dt: f64,
    values: Vec<f64>,
    pub meta: PathMeta,
}

impl SampledPath {
    pub fn new(t_start: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return param(format!("dt must be positive and finite, got {dt}"));
        }
        if !t_start.is_finite() {
            return param("t_start must be finite");
        }
        if values.len() < 2 {
            return param(format!("a path needs at least 2 samples, got {}", values.len()));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!("sample {k} is not finite")));
        }
        Ok(Self {
            t_start,
            dt,
            values,
            meta: PathMeta::default(),
        })
    }

    /// Samples a deterministic function on the grid t_start + k·dt.
    pub fn from_function(f: &ScalarFunctionSpec, t_start: f64, dt: f64, n: usize) -> Result<Self> {
        f.validate()?;
        let values = (0..n).map(|k| f.eval(t_start + k as f64 * dt)).collect();
        let mut p = Self::new(t_start, dt, values)?;
        p.meta.function = Some(f.clone());
        Ok(p)
    }

    pub fn with_meta(mut self, meta: PathMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t_start + k as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.len() - 1)
    }

    /// Nearest grid index to `t`, clamped to the path.
    pub fn nearest_index(&self, t: f64) -> usize {
        let k = ((t - self.t_start) / self.dt).round();
        k.clamp(0.0, (self.len() - 1) as f64) as usize
    }

    pub fn contains(&self, t: f64) -> bool {
        let slack = 1e-9 * self.dt;
        t >= self.t_start - slack && t <= self.t_end() + slack
    }

    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.values.len() as u64).to_le_bytes())?;
        w.write_all(&self.t_start.to_le_bytes())?;
        w.write_all(&self.dt.to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("bad magic bytes, expected MLP1".into()));
        }
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let n = u64::from_le_bytes(b8) as usize;
        r.read_exact(&mut b8)?;
        let t_start = f64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        let dt = f64::from_le_bytes(b8);
        let mut values = Vec::with_capacity(n.min(1 << 28));
        for _ in 0..n {
            r.read_exact(&mut b8)?;
            values.push(f64::from_le_bytes(b8));
        }
        let mut rest = Vec::new();
        r.read_to_end(&mut rest)?;
        if !rest.is_empty() {
            return Err(Error::Format(format!("{} trailing bytes after path", rest.len())));
        }
        Self::new(t_start, dt, values)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,value")?;
        for (k, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{}", self.time(k), v)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the CSV form. The grid is rebuilt from the first and last time
    /// stamps and must be uniform to 1e-9 relative.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::Format("empty CSV".into()))??;
        if header.trim() != "t,value" {
            return Err(Error::Format(format!("expected header t,value, got {header:?}")));
        }
        let mut ts = Vec::new();
        let mut vs = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split(',');
            let parse = |s: Option<&str>| -> Result<f64> {
                s.ok_or_else(|| Error::Format(format!("row {}: missing field", i + 2)))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Format(format!("row {}: {e}", i + 2)))
            };
            ts.push(parse(it.next())?);
            vs.push(parse(it.next())?);
        }
        if ts.len() < 2 {
            return param("a path needs at least 2 samples");
        }
        let n = ts.len();
        let dt = (ts[n - 1] - ts[0]) / (n - 1) as f64;
        for (k, t) in ts.iter().enumerate() {
            let expect = ts[0] + k as f64 * dt;
            if (t - expect).abs() > 1e-9 * dt.max(expect.abs()) {
                return Err(Error::Format(format!("row {} is off the uniform grid", k + 2)));
            }
        }
        Self::new(ts[0], dt, vs)
    }

    pub fn write_meta_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, &self.meta)?;
        Ok(())
    }
}
