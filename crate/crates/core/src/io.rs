//! JSON file formats. Every reader validates names and reports the field
//! or edge at fault; malformed JSON errors carry line and column.

use std::collections::{BTreeMap, BTreeSet};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::foundations::{EpSet, Rational};
use crate::lts::{LtsError, ModalFormula, OmegaLtsCode, PointedLts};
use crate::nlmp::{NlmpError, PointmassNlmp, SubProbMeasure};
use crate::rel::Rel;
use crate::trees::{ExplicitTree, MultiTree, SymbolicTree};
use crate::uniform::{Row, UniformStructure};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{what}: malformed JSON at line {line}, column {column}: {msg}")]
    Json { what: String, line: usize, column: usize, msg: String },
    #[error("{what}: {msg}")]
    Schema { what: String, msg: String },
    #[error("{what}: {source}")]
    Lts { what: String, source: LtsError },
    #[error("{what}: {source}")]
    Nlmp { what: String, source: NlmpError },
}

fn schema(what: &str, msg: impl Into<String>) -> IoError {
    IoError::Schema { what: what.into(), msg: msg.into() }
}

/// Parses `text` as `T`; `what` names the input in messages.
pub fn from_json<T: DeserializeOwned>(what: &str, text: &str) -> Result<T, IoError> {
    serde_json::from_str(text).map_err(|e| match e.classify() {
        serde_json::error::Category::Data => {
            IoError::Schema { what: what.into(), msg: format!("{e}") }
        }
        _ => IoError::Json { what: what.into(), line: e.line(), column: e.column(), msg: e.to_string() },
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LtsFile {
    labels: Vec<String>,
    states: Vec<String>,
    root: String,
    edges: Vec<(String, String, String)>,
}

pub fn parse_lts(what: &str, text: &str) -> Result<PointedLts, IoError> {
    let file: LtsFile = from_json(what, text)?;
    PointedLts::new(file.labels, file.states, &file.root, &file.edges)
        .map_err(|source| IoError::Lts { what: what.into(), source })
}

pub fn lts_to_json(lts: &PointedLts) -> Value {
    let name = |s: usize| lts.states()[s].clone();
    let file = LtsFile {
        labels: lts.labels().to_vec(),
        states: lts.states().to_vec(),
        root: name(lts.root()),
        edges: lts.edges().map(|(s, a, t)| (name(s), lts.labels()[a].clone(), name(t))).collect(),
    };
    serde_json::to_value(file).expect("plain data")
}

type TransFile = BTreeMap<String, BTreeMap<String, Vec<BTreeMap<String, Rational>>>>;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NlmpFile {
    labels: Vec<String>,
    states: Vec<String>,
    #[serde(default)]
    trans: TransFile,
}

fn index_of(names: &[String], what: &str, field: &str, name: &str) -> Result<usize, IoError> {
    names.iter().position(|n| n == name).ok_or_else(|| schema(what, format!("{field}: {name:?} is not declared")))
}

fn check_distinct(names: &[String], what: &str, field: &str) -> Result<(), IoError> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(schema(what, format!("{field}: duplicate {n:?}")));
        }
    }
    Ok(())
}

pub fn parse_nlmp(what: &str, text: &str) -> Result<PointmassNlmp, IoError> {
    let file: NlmpFile = from_json(what, text)?;
    check_distinct(&file.labels, what, "labels")?;
    check_distinct(&file.states, what, "states")?;
    let mut trans = Vec::new();
    for (s_name, by_label) in &file.trans {
        let s = index_of(&file.states, what, "trans", s_name)?;
        for (a_name, measures) in by_label {
            let a = index_of(&file.labels, what, &format!("trans.{s_name}"), a_name)?;
            for (i, m) in measures.iter().enumerate() {
                let field = format!("trans.{s_name}.{a_name}[{i}]");
                let mut weights = BTreeMap::new();
                for (t_name, w) in m {
                    weights.insert(index_of(&file.states, what, &field, t_name)?, *w);
                }
                let mu = SubProbMeasure::new(weights)
                    .map_err(|e| schema(what, format!("{field}: {e}")))?;
                trans.push((s, a, mu));
            }
        }
    }
    PointmassNlmp::new(file.labels, file.states, trans).map_err(|source| IoError::Nlmp { what: what.into(), source })
}

pub fn nlmp_to_json(n: &PointmassNlmp) -> Value {
    let mut trans: TransFile = BTreeMap::new();
    for s in 0..n.num_states() {
        for (a, label) in n.labels().iter().enumerate() {
            let set = n.transitions(s, a);
            if set.is_empty() {
                continue;
            }
            let measures = set
                .iter()
                .map(|mu| mu.weights().iter().map(|(&t, &w)| (n.states()[t].clone(), w)).collect())
                .collect();
            trans.entry(n.states()[s].clone()).or_default().insert(label.clone(), measures);
        }
    }
    serde_json::to_value(NlmpFile { labels: n.labels().to_vec(), states: n.states().to_vec(), trans })
        .expect("plain data")
}

/// A tree input: explicit node list or a symbolic gadget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeInput {
    Explicit(ExplicitTree<u64>),
    Symbolic(SymbolicTree),
}

pub fn parse_tree(what: &str, text: &str) -> Result<TreeInput, IoError> {
    let mut value: Value = from_json(what, text)?;
    let kind = value.get("kind").and_then(Value::as_str).map(str::to_owned);
    match kind.as_deref() {
        Some("explicit") => {
            value.as_object_mut().expect("has a kind field").remove("kind");
            let tree: ExplicitTree<u64> = serde_json::from_value(value).map_err(|e| schema(what, e.to_string()))?;
            Ok(TreeInput::Explicit(tree))
        }
        Some(_) => serde_json::from_value(value).map(TreeInput::Symbolic).map_err(|e| schema(what, e.to_string())),
        None => Err(schema(what, "missing string field \"kind\"")),
    }
}

pub fn parse_multitree(what: &str, text: &str) -> Result<MultiTree, IoError> {
    from_json(what, text)
}

pub fn parse_code(what: &str, text: &str) -> Result<OmegaLtsCode, IoError> {
    from_json(what, text)
}

pub fn parse_epset(what: &str, text: &str) -> Result<EpSet, IoError> {
    from_json(what, text)
}

pub fn parse_formula(what: &str, text: &str) -> Result<ModalFormula, IoError> {
    from_json(what, text)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CarrierFile {
    carrier: Vec<String>,
}

/// `{"carrier": [...]}` against the states of `n`.
pub fn parse_carrier(what: &str, text: &str, n: &PointmassNlmp) -> Result<BTreeSet<usize>, IoError> {
    let file: CarrierFile = from_json(what, text)?;
    file.carrier.iter().map(|s| index_of(n.states(), what, "carrier", s)).collect()
}

type UniformFile = BTreeMap<String, BTreeMap<String, Vec<Vec<(Rational, String)>>>>;

/// `{"s": {"a": [[["1/2", "t"], ["1/2", "u"]], ...]}}`: rows of `(r, t)`.
pub fn parse_uniform(what: &str, text: &str, n: &PointmassNlmp) -> Result<UniformStructure, IoError> {
    let file: UniformFile = from_json(what, text)?;
    let mut tables = BTreeMap::new();
    for (s_name, by_label) in &file {
        let s = index_of(n.states(), what, "table", s_name)?;
        for (a_name, rows) in by_label {
            let a = index_of(n.labels(), what, s_name, a_name)?;
            let mut parsed: Vec<Row> = Vec::new();
            for (i, row) in rows.iter().enumerate() {
                let field = format!("{s_name}.{a_name}[{i}]");
                let row = row
                    .iter()
                    .map(|(r, t)| Ok((*r, index_of(n.states(), what, &field, t)?)))
                    .collect::<Result<_, IoError>>()?;
                parsed.push(row);
            }
            tables.insert((s, a), parsed);
        }
    }
    Ok(UniformStructure { num_labels: n.labels().len(), tables })
}

pub fn uniform_to_json(u: &UniformStructure, n: &PointmassNlmp) -> Value {
    let mut file: UniformFile = BTreeMap::new();
    for (&(s, a), rows) in &u.tables {
        let rows = rows.iter().map(|row| row.iter().map(|&(r, t)| (r, n.states()[t].clone())).collect()).collect();
        file.entry(n.states()[s].clone()).or_default().insert(n.labels()[a].clone(), rows);
    }
    serde_json::to_value(file).expect("plain data")
}

/// Pairs of names, in sorted index order.
pub fn rel_to_json(r: &Rel, left: &[String], right: &[String]) -> Value {
    Value::Array(
        r.iter().map(|(x, y)| Value::Array(vec![left[x].clone().into(), right[y].clone().into()])).collect(),
    )
}
