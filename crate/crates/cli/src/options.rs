//! Run options shared by the `cluster` command, the benchmark specs and the
//! config echo stored in result bundles.

use std::fmt;
use std::str::FromStr;

use clap::ValueEnum;
use hgricci::{
    Aggregation, CurvatureConfig, EdgeAggregation, FlowConfig, MeasureVariant, Method, NeighborDistance, Solver,
    ThresholdCriterion, WeightingScheme,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Node,
    Edge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightingArg {
    Uniform,
    Jaccard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AggArg {
    Max,
    Avg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureArg {
    Standard,
    Reduced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeAggArg {
    Flow,
    Curvature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceArg {
    Direct,
    Geodesic,
}

/// `exact` or `sinkhorn:<eps>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SolverArg(pub Solver);

impl FromStr for SolverArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "exact" {
            return Ok(SolverArg(Solver::Exact));
        }
        let eps = s
            .strip_prefix("sinkhorn:")
            .ok_or_else(|| format!("unknown solver `{s}` (expected exact or sinkhorn:<eps>)"))?;
        let eps: f64 = eps.parse().map_err(|_| format!("bad sinkhorn epsilon `{eps}`"))?;
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(format!("sinkhorn epsilon must be positive, got {eps}"));
        }
        Ok(SolverArg(Solver::Sinkhorn(eps)))
    }
}

impl fmt::Display for SolverArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Solver::Exact => f.write_str("exact"),
            Solver::Sinkhorn(eps) => write!(f, "sinkhorn:{eps}"),
        }
    }
}

impl TryFrom<String> for SolverArg {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<SolverArg> for String {
    fn from(s: SolverArg) -> String {
        s.to_string()
    }
}

/// `auto-h`, `auto-c`, `auto-nmi` or a fixed nonnegative threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct TauArg(pub ThresholdCriterion);

impl FromStr for TauArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let c = match s {
            "auto-h" => ThresholdCriterion::MaxHypergraphModularity,
            "auto-c" => ThresholdCriterion::MaxGraphModularity,
            "auto-nmi" => ThresholdCriterion::MaxNmi,
            _ => {
                let tau: f64 = s
                    .parse()
                    .map_err(|_| format!("bad threshold `{s}` (expected auto-h, auto-c, auto-nmi or a number)"))?;
                if !(tau >= 0.0 && tau.is_finite()) {
                    return Err(format!("threshold must be finite and nonnegative, got {tau}"));
                }
                ThresholdCriterion::Fixed(tau)
            }
        };
        Ok(TauArg(c))
    }
}

impl fmt::Display for TauArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            ThresholdCriterion::MaxHypergraphModularity => f.write_str("auto-h"),
            ThresholdCriterion::MaxGraphModularity => f.write_str("auto-c"),
            ThresholdCriterion::MaxNmi => f.write_str("auto-nmi"),
            ThresholdCriterion::Fixed(tau) => write!(f, "{tau}"),
        }
    }
}

impl TryFrom<String> for TauArg {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<TauArg> for String {
    fn from(t: TauArg) -> String {
        t.to_string()
    }
}

/// Everything that determines the flow weights, apart from the method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowOptions {
    pub weighting: WeightingArg,
    pub agg: AggArg,
    pub alpha: f64,
    pub p: f64,
    pub iters: usize,
    pub solver: SolverArg,
    pub measure: MeasureArg,
    pub edge_agg: EdgeAggArg,
    pub neighbor_distance: DistanceArg,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            weighting: WeightingArg::Jaccard,
            agg: AggArg::Max,
            alpha: 0.5,
            p: 1.0,
            iters: 20,
            solver: SolverArg(Solver::Exact),
            measure: MeasureArg::Standard,
            edge_agg: EdgeAggArg::Flow,
            neighbor_distance: DistanceArg::Direct,
        }
    }
}

impl FlowOptions {
    pub fn flow_config(&self, method: MethodArg) -> FlowConfig {
        let weighting = match self.weighting {
            WeightingArg::Uniform => WeightingScheme::Uniform,
            WeightingArg::Jaccard => WeightingScheme::Jaccard,
        };
        FlowConfig {
            iterations: self.iters,
            curvature: CurvatureConfig {
                alpha: self.alpha,
                p: self.p,
                aggregation: match self.agg {
                    AggArg::Max => Aggregation::Max,
                    AggArg::Avg => Aggregation::Average,
                },
                solver: self.solver.0,
                measure: match self.measure {
                    MeasureArg::Standard => MeasureVariant::Standard,
                    MeasureArg::Reduced => MeasureVariant::Reduced,
                },
                neighbor_distance: match self.neighbor_distance {
                    DistanceArg::Direct => NeighborDistance::Direct,
                    DistanceArg::Geodesic => NeighborDistance::Geodesic,
                },
            },
            clique_weighting: weighting,
            line_weighting: weighting,
            method: match method {
                MethodArg::Node => Method::NodeRicci,
                MethodArg::Edge => Method::EdgeRicci,
            },
            edge_aggregation: match self.edge_agg {
                EdgeAggArg::Flow => EdgeAggregation::Flow,
                EdgeAggArg::Curvature => EdgeAggregation::Curvature,
            },
            keep_history: false,
        }
    }
}

/// Full configuration of one `cluster` run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterOptions {
    pub method: MethodArg,
    pub tau: TauArg,
    #[serde(flatten)]
    pub flow: FlowOptions,
}

impl Default for ClusterOptions {
    fn default() -> Self {
        Self {
            method: MethodArg::Edge,
            tau: TauArg(ThresholdCriterion::MaxHypergraphModularity),
            flow: FlowOptions::default(),
        }
    }
}

impl ClusterOptions {
    pub fn flow_config(&self) -> FlowConfig {
        self.flow.flow_config(self.method)
    }
}

impl fmt::Display for MethodArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MethodArg::Node => "node",
            MethodArg::Edge => "edge",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solver_strings() {
        assert_eq!("exact".parse::<SolverArg>().unwrap().0, Solver::Exact);
        assert_eq!("sinkhorn:0.01".parse::<SolverArg>().unwrap().0, Solver::Sinkhorn(0.01));
        assert!("sinkhorn:-1".parse::<SolverArg>().is_err());
        assert!("sinkhorn".parse::<SolverArg>().is_err());
        let s: SolverArg = "sinkhorn:0.001".parse().unwrap();
        assert_eq!(s.to_string().parse::<SolverArg>().unwrap(), s);
    }

    #[test]
    fn tau_strings() {
        assert_eq!("auto-h".parse::<TauArg>().unwrap().0, ThresholdCriterion::MaxHypergraphModularity);
        assert_eq!("auto-c".parse::<TauArg>().unwrap().0, ThresholdCriterion::MaxGraphModularity);
        assert_eq!("auto-nmi".parse::<TauArg>().unwrap().0, ThresholdCriterion::MaxNmi);
        assert_eq!("1.5".parse::<TauArg>().unwrap().0, ThresholdCriterion::Fixed(1.5));
        assert!("-1".parse::<TauArg>().is_err());
        assert!("auto".parse::<TauArg>().is_err());
    }

    #[test]
    fn options_json_round_trip() {
        let o = ClusterOptions {
            method: MethodArg::Node,
            tau: TauArg(ThresholdCriterion::Fixed(0.25)),
            flow: FlowOptions { solver: SolverArg(Solver::Sinkhorn(0.01)), ..Default::default() },
        };
        let text = serde_json::to_string(&o).unwrap();
        assert_eq!(serde_json::from_str::<ClusterOptions>(&text).unwrap(), o);
        let partial: FlowOptions = serde_json::from_str(r#"{"iters": 3}"#).unwrap();
        assert_eq!(partial, FlowOptions { iters: 3, ..Default::default() });
    }

    #[test]
    fn defaults_mirror_the_library() {
        let cfg = ClusterOptions::default().flow_config();
        assert_eq!(cfg, FlowConfig::default());
    }
}
