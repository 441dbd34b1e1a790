//! Series of analyses along the size parameter of an instance spec.
//!
//! Each `N` is generated and analysed independently; rows are merged in `N`
//! order, so output does not depend on the worker count. A failure at one
//! `N` is recorded in its row and does not stop the others.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{generate, InstanceSpec};
use crate::intersection::intersection_number_exact;
use crate::kelley::{mn_min_cover, MnMode};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Analysis {
    Inum,
    Mn { epsilon: Rational, mode: MnMode },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub template: InstanceSpec,
    pub n_min: usize,
    pub n_max: usize,
    pub analysis: Analysis,
}

#[derive(Debug, Clone, Copy)]
pub struct SweepOptions {
    pub jobs: usize,
    /// Node budget for exact cover search.
    pub budget: u64,
    /// Record wall-clock time per row. Off by default so that output is
    /// byte-reproducible.
    pub timings: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    Error,
    Budget,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub status: RowStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<usize>,
    /// Intersection number for inum rows; smallest class threshold for mn
    /// rows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SweepSpec {
    fn validate(&self) -> Result<()> {
        if self.n_min > self.n_max {
            return Err(Error::domain(format!(
                "sweep range {}..={} is empty",
                self.n_min, self.n_max
            )));
        }
        if let Analysis::Mn { epsilon, .. } = &self.analysis {
            if !epsilon.is_positive() || *epsilon >= 1 {
                return Err(Error::domain(format!(
                    "epsilon {epsilon} is outside (0, 1)"
                )));
            }
        }
        Ok(())
    }
}

fn mode_label(a: &Analysis) -> String {
    match a {
        Analysis::Inum => "inum".to_string(),
        Analysis::Mn {
            mode: MnMode::Exact,
            ..
        } => "mn-exact".to_string(),
        Analysis::Mn {
            mode: MnMode::Greedy,
            ..
        } => "mn-greedy".to_string(),
    }
}

fn run_one(spec: &SweepSpec, n: usize, opts: &SweepOptions) -> SweepRow {
    let start = Instant::now();
    let mut row = SweepRow {
        n,
        status: RowStatus::Ok,
        elements: None,
        value: None,
        k: None,
        mode: mode_label(&spec.analysis),
        ms: None,
        error: None,
    };
    let outcome = generate(&spec.template.with_size(n)).and_then(|family| {
        row.elements = Some(family.len());
        match &spec.analysis {
            Analysis::Inum => {
                let cert = intersection_number_exact(&family)?;
                row.value = Some(cert.value);
            }
            Analysis::Mn { epsilon, mode } => {
                let rep = mn_min_cover(&family, epsilon, *mode, opts.budget)?;
                row.k = Some(rep.k);
                row.value = rep
                    .certificate
                    .classes
                    .iter()
                    .map(|c| c.threshold.clone())
                    .min();
            }
        }
        Ok(())
    });
    if let Err(e) = outcome {
        row.status = match e {
            Error::Budget { .. } => RowStatus::Budget,
            _ => RowStatus::Error,
        };
        row.error = Some(e.to_string());
    }
    if opts.timings {
        row.ms = Some(start.elapsed().as_millis() as u64);
    }
    row
}

pub fn run_sweep(spec: &SweepSpec, opts: &SweepOptions) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let sizes: Vec<usize> = (spec.n_min..=spec.n_max).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .map_err(|e| Error::structural(format!("thread pool: {e}")))?;
    Ok(pool.install(|| sizes.par_iter().map(|&n| run_one(spec, n, opts)).collect()))
}

/// CSV with exact numerator/denominator columns; `value_approx` is a
/// rounded decimal for plotting only.
pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::structural(format!("csv: {e}"));
    w.write_record([
        "N",
        "value_num",
        "value_den",
        "value_approx",
        "k",
        "mode",
        "ms",
        "status",
        "error",
    ])
    .map_err(io)?;
    for r in rows {
        let (num, den, approx) = match &r.value {
            Some(v) => (
                v.numer().to_string(),
                v.denom().to_string(),
                format!("{:.6}", v.to_f64()),
            ),
            None => (String::new(), String::new(), String::new()),
        };
        let status = match r.status {
            RowStatus::Ok => "ok",
            RowStatus::Error => "error",
            RowStatus::Budget => "budget",
        };
        w.write_record([
            r.n.to_string(),
            num,
            den,
            approx,
            r.k.map(|k| k.to_string()).unwrap_or_default(),
            r.mode.clone(),
            r.ms.map(|m| m.to_string()).unwrap_or_default(),
            status.to_string(),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io {
        path: "<csv>".into(),
        source: e,
    })?;
    Ok(())
}
