//! Accuracy sweeps on the hypergraph SBM and per-iteration timing on
//! uniform random hypergraphs.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::{Duration, Instant};

use hgricci::flow::{EdgeRicciFlow, NodeRicciFlow};
use hgricci::{
    clustering::cluster_weights, gen_hsbm, gen_uniform, nmi, run_flow_until, Error, HsbmParams, ThresholdCriterion,
};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::options::{FlowOptions, MethodArg, SolverArg, WeightingArg};

fn default_methods() -> Vec<MethodArg> {
    vec![MethodArg::Node, MethodArg::Edge]
}

fn default_repetitions() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub n: usize,
    pub k: usize,
    pub n_in: usize,
    #[serde(default)]
    pub n_in_per_community: bool,
    /// Edge-size cells as `[s_in, s_out]`. When absent, every combination of
    /// `s_in` and `s_out` is used.
    #[serde(default)]
    pub cells: Option<Vec<(usize, usize)>>,
    #[serde(default)]
    pub s_in: Vec<usize>,
    #[serde(default)]
    pub s_out: Vec<usize>,
    pub n_out: Vec<usize>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    /// Repetition `r` uses seed `seed + r`.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_methods")]
    pub methods: Vec<MethodArg>,
    #[serde(default)]
    pub flow: FlowOptions,
    /// Per-run limit; a run that exceeds it is recorded as failed.
    #[serde(default)]
    pub timeout_seconds: Option<f64>,
}

impl SweepSpec {
    pub fn size_cells(&self) -> Vec<(usize, usize)> {
        match &self.cells {
            Some(c) => c.clone(),
            None => self.s_in.iter().flat_map(|&a| self.s_out.iter().map(move |&b| (a, b))).collect(),
        }
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.repetitions == 0 {
            return Err("repetitions must be at least 1".into());
        }
        if self.size_cells().is_empty() || self.n_out.is_empty() {
            return Err("sweep grid is empty".into());
        }
        if self.methods.is_empty() {
            return Err("no methods selected".into());
        }
        Ok(())
    }
}

/// One row of `nmi_sweep.csv`; `nmi` is NaN for a failed run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub s_in: usize,
    pub s_out: usize,
    #[serde(rename = "N_out")]
    pub n_out: usize,
    pub method: MethodArg,
    pub seed: u64,
    pub nmi: f64,
}

fn deadline(timeout: Option<f64>) -> Option<Instant> {
    timeout.map(|t| Instant::now() + Duration::from_secs_f64(t))
}

fn sweep_run(spec: &SweepSpec, params: &HsbmParams, method: MethodArg) -> hgricci::Result<f64> {
    let g = gen_hsbm(params)?;
    let cfg = spec.flow.flow_config(method);
    let stop = deadline(spec.timeout_seconds);
    let abort = move || stop.is_some_and(|d| Instant::now() >= d);
    let flow = run_flow_until(&g.hypergraph, &cfg, &abort)?;
    let report = cluster_weights(&g.hypergraph, flow, ThresholdCriterion::MaxNmi, Some(&g.labels))?;
    nmi(&g.labels, report.clustering().labels())
}

/// Runs every cell, method and repetition; `on_row` sees each row as it is
/// produced. Failed runs are logged and kept with NaN.
pub fn run_nmi_sweep(spec: &SweepSpec, mut on_row: impl FnMut(&SweepRow)) -> Vec<SweepRow> {
    let mut rows = Vec::new();
    for (s_in, s_out) in spec.size_cells() {
        for &n_out in &spec.n_out {
            for method in &spec.methods {
                for r in 0..spec.repetitions {
                    let seed = spec.seed + r as u64;
                    let params = HsbmParams {
                        n: spec.n,
                        k: spec.k,
                        s_in,
                        s_out,
                        n_in: spec.n_in,
                        n_out,
                        seed,
                        n_in_per_community: spec.n_in_per_community,
                    };
                    let nmi = sweep_run(spec, &params, *method).unwrap_or_else(|e| {
                        log::warn!("cell s_in={s_in} s_out={s_out} N_out={n_out} {method} seed={seed} failed: {e}");
                        f64::NAN
                    });
                    let row = SweepRow { s_in, s_out, n_out, method: *method, seed, nmi };
                    on_row(&row);
                    rows.push(row);
                }
            }
        }
    }
    rows
}

/// Mean and sample standard deviation of one cell over its repetitions.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub s_in: usize,
    pub s_out: usize,
    pub n_out: usize,
    pub method: MethodArg,
    pub mean: f64,
    pub std: f64,
    pub failed: usize,
}

pub fn summarize_sweep(rows: &[SweepRow]) -> Vec<CellSummary> {
    let mut cells: Vec<((usize, usize, usize, MethodArg), Vec<f64>)> = Vec::new();
    for r in rows {
        let key = (r.s_in, r.s_out, r.n_out, r.method);
        match cells.iter_mut().find(|c| c.0 == key) {
            Some(c) => c.1.push(r.nmi),
            None => cells.push((key, vec![r.nmi])),
        }
    }
    cells
        .into_iter()
        .map(|((s_in, s_out, n_out, method), values)| {
            let ok: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
            let failed = values.len() - ok.len();
            let (mean, std) = if ok.len() == values.len() { mean_std(&ok) } else { (f64::NAN, f64::NAN) };
            CellSummary { s_in, s_out, n_out, method, mean, std, failed }
        })
        .collect()
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn default_n() -> usize {
    1000
}

fn default_m() -> usize {
    300
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingSpec {
    pub ks: Vec<usize>,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_methods")]
    pub methods: Vec<MethodArg>,
    #[serde(default)]
    pub flow: FlowOptions,
    /// Node-Ricci solver per edge size, overriding `flow.solver`.
    #[serde(default)]
    pub node_solver_by_k: BTreeMap<usize, SolverArg>,
    /// Run and discard one iteration before timing.
    #[serde(default = "default_true")]
    pub warmup: bool,
    /// Limit for one cell (warm-up plus all repetitions).
    #[serde(default)]
    pub timeout_seconds: Option<f64>,
}

impl TimingSpec {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.repetitions == 0 {
            return Err("repetitions must be at least 1".into());
        }
        if self.ks.is_empty() || self.methods.is_empty() {
            return Err("timing grid is empty".into());
        }
        if let Some(&k) = self.ks.iter().find(|&&k| k < 2 || k > self.n) {
            return Err(format!("edge size {k} outside [2, n]"));
        }
        Ok(())
    }
}

/// One row of `timing.csv`: seconds for one flow iteration, `inf` on timeout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    #[serde(rename = "K")]
    pub k: usize,
    pub method: MethodArg,
    pub rep: usize,
    pub seconds: f64,
}

enum Stepper<'h> {
    Node(NodeRicciFlow<'h>),
    Edge(EdgeRicciFlow<'h>),
}

impl Stepper<'_> {
    fn step(&mut self, abort: hgricci::flow::AbortCheck<'_>) -> hgricci::Result<()> {
        match self {
            Stepper::Node(f) => f.step(abort),
            Stepper::Edge(f) => f.step(abort),
        }
    }
}

fn time_cell(spec: &TimingSpec, k: usize, method: MethodArg) -> hgricci::Result<Vec<f64>> {
    let h = gen_uniform(spec.n, spec.m, k, spec.seed)?;
    let mut flow = spec.flow;
    flow.weighting = WeightingArg::Uniform;
    if method == MethodArg::Node {
        if let Some(s) = spec.node_solver_by_k.get(&k) {
            flow.solver = *s;
        }
    }
    let cfg = flow.flow_config(method);
    let stop = deadline(spec.timeout_seconds);
    let abort = move || stop.is_some_and(|d| Instant::now() >= d);
    let mut stepper = match method {
        MethodArg::Node => Stepper::Node(NodeRicciFlow::new(&h, &cfg)?),
        MethodArg::Edge => Stepper::Edge(EdgeRicciFlow::new(&h, &cfg)?),
    };
    if spec.warmup {
        stepper.step(&abort)?;
    }
    let mut times = Vec::with_capacity(spec.repetitions);
    for _ in 0..spec.repetitions {
        let start = Instant::now();
        stepper.step(&abort)?;
        times.push(start.elapsed().as_secs_f64());
    }
    Ok(times)
}

/// Times every `(K, method)` cell. A cell that hits the timeout records
/// `+inf` for every repetition; other failures are logged and recorded as NaN.
pub fn run_timing(spec: &TimingSpec, mut on_row: impl FnMut(&TimingRow)) -> Vec<TimingRow> {
    let mut rows = Vec::new();
    for &k in &spec.ks {
        for &method in &spec.methods {
            let times = time_cell(spec, k, method).unwrap_or_else(|e| {
                let fill = if matches!(e, Error::Aborted) { f64::INFINITY } else { f64::NAN };
                log::warn!("timing K={k} {method}: {e}");
                vec![fill; spec.repetitions]
            });
            for (rep, seconds) in times.into_iter().enumerate() {
                let row = TimingRow { k, method, rep, seconds };
                on_row(&row);
                rows.push(row);
            }
        }
    }
    rows
}

/// Mean seconds per iteration for each `(K, method)`.
pub fn mean_times(rows: &[TimingRow]) -> BTreeMap<(usize, MethodArg), f64> {
    let mut acc: BTreeMap<(usize, MethodArg), (f64, usize)> = BTreeMap::new();
    for r in rows {
        let e = acc.entry((r.k, r.method)).or_insert((0.0, 0));
        e.0 += r.seconds;
        e.1 += 1;
    }
    acc.into_iter().map(|(key, (sum, n))| (key, sum / n as f64)).collect()
}

/// Writes rows as CSV with a header.
pub fn write_csv<T: Serialize>(out: impl Write, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(input: impl std::io::Read) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}
