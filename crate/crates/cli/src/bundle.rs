//! Result bundle written by `cluster`: config echo, flow weights, the
//! threshold curve, chosen labels and scores.

use std::io;
use std::path::Path;

use hgricci::{clique_expansion, graph_modularity, hypergraph_modularity, ClusterReport, Hypergraph, WeightingScheme};
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{CliError, Result};
use crate::options::ClusterOptions;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub tau: f64,
    pub num_communities: usize,
    pub graph_modularity: f64,
    pub hypergraph_modularity: f64,
    pub nmi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub hypergraph_modularity: f64,
    pub graph_modularity: f64,
    pub nmi: Option<f64>,
    pub num_communities: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub flow_seconds: f64,
    pub total_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultBundle {
    pub schema_version: u32,
    pub config: ClusterOptions,
    pub input: Option<String>,
    /// Node tokens; `labels[i]` belongs to `nodes[i]`.
    pub nodes: Vec<String>,
    /// Final flow weight of every hyperedge, in input order.
    pub weights: Vec<f64>,
    pub curve: Vec<CurveRow>,
    pub tau: f64,
    pub labels: Vec<usize>,
    pub scores: Scores,
    /// Largest relative weight change in the last iteration.
    pub last_relative_change: f64,
    pub measure_fallbacks: usize,
    pub timing: Timing,
}

impl ResultBundle {
    pub fn from_report(
        h: &Hypergraph,
        config: ClusterOptions,
        input: Option<String>,
        nodes: Vec<String>,
        report: &ClusterReport,
        timing: Timing,
    ) -> Result<Self> {
        let sel = &report.selection;
        let clique = clique_expansion(h, WeightingScheme::Uniform);
        let scores = Scores {
            hypergraph_modularity: hypergraph_modularity(h, &sel.clustering)?,
            graph_modularity: if clique.num_edges() == 0 { 0.0 } else { graph_modularity(&clique, &sel.clustering)? },
            nmi: report.nmi,
            num_communities: sel.clustering.num_communities(),
        };
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            config,
            input,
            nodes,
            weights: report.flow.hyperedge_weights.clone(),
            curve: sel
                .curve
                .iter()
                .map(|p| CurveRow {
                    tau: p.tau,
                    num_communities: p.num_communities,
                    graph_modularity: p.graph_modularity,
                    hypergraph_modularity: p.hypergraph_modularity,
                    nmi: p.nmi,
                })
                .collect(),
            tau: sel.tau,
            labels: sel.clustering.labels().to_vec(),
            scores,
            last_relative_change: report.flow.last_relative_change,
            measure_fallbacks: report.flow.measure_fallbacks,
            timing,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut buf = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, SignificantDigits::default());
        self.serialize(&mut ser)?;
        buf.push(b'\n');
        Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let bundle: Self = serde_json::from_str(text)?;
        if bundle.schema_version != SCHEMA_VERSION {
            return Err(CliError::Input(format!(
                "unsupported result schema version {} (expected {SCHEMA_VERSION})",
                bundle.schema_version
            )));
        }
        if bundle.labels.len() != bundle.nodes.len() {
            return Err(CliError::Input("result bundle has mismatched nodes and labels".into()));
        }
        Ok(bundle)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path).map_err(CliError::io(path))?)
    }
}

/// Pretty JSON with every float written as 17 significant digits.
#[derive(Default)]
struct SignificantDigits(PrettyFormatter<'static>);

impl Formatter for SignificantDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}
