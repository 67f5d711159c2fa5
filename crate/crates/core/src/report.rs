//! Machine-readable reports: `key=value` lines, JSON, or one-row CSV.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::error::Error;
use crate::expr::{OpCount, Polynomial};
use crate::horner::Direction;
use crate::search::{
    exhaustive_search, mcts_search, nmcs_search, occurrence_search, Criterion, NmcsConfig, SearchConfig, SearchResult,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::InvalidConfig(format!("unknown format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Strategy {
    #[serde(rename = "occurrence")]
    Occurrence,
    #[serde(rename = "exhaustive")]
    Exhaustive,
    #[serde(rename = "mcts-uct")]
    MctsUct,
    #[serde(rename = "mcts-sa-uct")]
    MctsSaUct,
    #[serde(rename = "nmcs")]
    Nmcs,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Occurrence => "occurrence",
            Strategy::Exhaustive => "exhaustive",
            Strategy::MctsUct => "mcts-uct",
            Strategy::MctsSaUct => "mcts-sa-uct",
            Strategy::Nmcs => "nmcs",
        }
    }

    pub fn criterion(self) -> Option<Criterion> {
        match self {
            Strategy::MctsUct => Some(Criterion::Uct),
            Strategy::MctsSaUct => Some(Criterion::SaUct),
            _ => None,
        }
    }

    pub fn from_criterion(c: Criterion) -> Self {
        match c {
            Criterion::Uct => Strategy::MctsUct,
            Criterion::SaUct => Strategy::MctsSaUct,
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "occurrence" => Ok(Strategy::Occurrence),
            "exhaustive" => Ok(Strategy::Exhaustive),
            "mcts-uct" | "mcts" => Ok(Strategy::MctsUct),
            "mcts-sa-uct" | "sa-uct" => Ok(Strategy::MctsSaUct),
            "nmcs" => Ok(Strategy::Nmcs),
            other => Err(Error::InvalidConfig(format!("unknown strategy '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyParams {
    pub cp: f64,
    pub iterations: u64,
    pub direction: Direction,
    pub seed: u64,
    pub level: u32,
}

impl Default for StrategyParams {
    fn default() -> Self {
        StrategyParams {
            cp: 0.5,
            iterations: 1000,
            direction: Direction::Forward,
            seed: 0,
            level: 1,
        }
    }
}

pub fn run_strategy(p: &Polynomial, strategy: Strategy, params: &StrategyParams) -> Result<SearchResult, Error> {
    match strategy {
        Strategy::Occurrence => occurrence_search(p, params.direction),
        Strategy::Exhaustive => exhaustive_search(p, params.direction),
        Strategy::MctsUct | Strategy::MctsSaUct => {
            let cfg = SearchConfig {
                criterion: strategy.criterion().unwrap(),
                cp: params.cp,
                iterations: params.iterations,
                direction: params.direction,
                seed: params.seed,
                trace: false,
            };
            mcts_search(p, &cfg)
        }
        Strategy::Nmcs => nmcs_search(
            p,
            &NmcsConfig {
                level: params.level,
                direction: params.direction,
                seed: params.seed,
            },
        ),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplifyReport {
    pub strategy: Strategy,
    pub variables: usize,
    pub terms: usize,
    pub original_muls: u64,
    pub original_adds: u64,
    pub original_total: u64,
    pub final_muls: u64,
    pub final_adds: u64,
    pub final_total: u64,
    pub delta: f64,
    pub scheme: String,
    pub direction: Direction,
    pub evaluations: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
}

impl SimplifyReport {
    pub fn new(p: &Polynomial, strategy: Strategy, params: &StrategyParams, result: &SearchResult) -> Self {
        let original = p.expanded_op_count();
        let is_mcts = strategy.criterion().is_some();
        SimplifyReport {
            strategy,
            variables: p.num_vars(),
            terms: p.terms().len(),
            original_muls: original.muls,
            original_adds: original.adds,
            original_total: original.total(),
            final_muls: result.best_ops.muls,
            final_adds: result.best_ops.adds,
            final_total: result.best_ops.total(),
            delta: result.best_delta.value(),
            scheme: result.best_scheme.names(p.vars()),
            direction: result.best_scheme.direction,
            evaluations: result.evaluations,
            seed: params.seed,
            cp: is_mcts.then_some(params.cp),
            iterations: is_mcts.then_some(params.iterations),
            level: (strategy == Strategy::Nmcs).then_some(params.level),
        }
    }

    fn fields(&self) -> Vec<(&'static str, String)> {
        let mut f = vec![
            ("strategy", self.strategy.as_str().to_string()),
            ("variables", self.variables.to_string()),
            ("terms", self.terms.to_string()),
            ("original_muls", self.original_muls.to_string()),
            ("original_adds", self.original_adds.to_string()),
            ("original_total", self.original_total.to_string()),
            ("final_muls", self.final_muls.to_string()),
            ("final_adds", self.final_adds.to_string()),
            ("final_total", self.final_total.to_string()),
            ("delta", format!("{:.6}", self.delta)),
            ("scheme", self.scheme.clone()),
            ("direction", self.direction.to_string()),
            ("evaluations", self.evaluations.to_string()),
            ("seed", self.seed.to_string()),
        ];
        if let Some(cp) = self.cp {
            f.push(("cp", cp.to_string()));
        }
        if let Some(n) = self.iterations {
            f.push(("iterations", n.to_string()));
        }
        if let Some(l) = self.level {
            f.push(("level", l.to_string()));
        }
        f
    }

    pub fn render(&self, format: Format) -> String {
        render_fields(&self.fields(), self, format)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountReport {
    pub variables: usize,
    pub terms: usize,
    pub muls: u64,
    pub adds: u64,
    pub total: u64,
    pub note: &'static str,
}

pub const COUNT_NOTE: &str =
    "x^k costs k-1 muls; a coefficient other than +-1 costs 1 mul; signs fold into adds; adds = terms-1";

impl CountReport {
    pub fn new(p: &Polynomial) -> Self {
        let OpCount { muls, adds } = p.expanded_op_count();
        CountReport {
            variables: p.num_vars(),
            terms: p.terms().len(),
            muls,
            adds,
            total: muls + adds,
            note: COUNT_NOTE,
        }
    }

    pub fn render(&self, format: Format) -> String {
        let fields = vec![
            ("variables", self.variables.to_string()),
            ("terms", self.terms.to_string()),
            ("muls", self.muls.to_string()),
            ("adds", self.adds.to_string()),
            ("total", self.total.to_string()),
            ("note", self.note.to_string()),
        ];
        render_fields(&fields, self, format)
    }
}

fn render_fields<T: Serialize>(fields: &[(&str, String)], value: &T, format: Format) -> String {
    match format {
        Format::Text => {
            let mut out = String::new();
            for (k, v) in fields {
                let _ = writeln!(out, "{k}={v}");
            }
            out
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(fields.iter().map(|(k, _)| *k)).expect("in-memory write");
            w.write_record(fields.iter().map(|(_, v)| v.as_str())).expect("in-memory write");
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
        }
    }
}
