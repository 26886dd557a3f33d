//! Dataset loading: the normalized JSONL format and the EVOUNA importer.

use std::collections::HashSet;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::model::EvalItem;

/// On-disk layout of an input dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetFormat {
    /// JSONL with one [`EvalItem`] per line.
    Normalized,
    /// JSONL with one question per line carrying per-system answer and
    /// judgment fields; fans out to one item per (question, system).
    EvounaImport,
}

impl std::str::FromStr for DatasetFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<DatasetFormat> {
        match s.trim().to_lowercase().replace('-', "_").as_str() {
            "normalized" => Ok(DatasetFormat::Normalized),
            "evouna" | "evouna_import" => Ok(DatasetFormat::EvounaImport),
            other => Err(Error::Config(format!("unknown dataset format {other:?}"))),
        }
    }
}

/// Field names for the EVOUNA importer. The source schema is not fixed, so
/// every name is configurable; `{system}` in the per-system templates is
/// replaced with each entry of `systems`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FieldMap {
    pub id: String,
    pub question: String,
    /// Field holding the gold answer(s): a string or an array of strings.
    pub gold: String,
    pub answer: String,
    pub judgment: String,
    /// System names to fan out over. Must be non-empty for an import.
    pub systems: Vec<String>,
    /// Split a string-valued gold field on "/" into alternatives.
    pub split_golds: bool,
}

impl Default for FieldMap {
    fn default() -> Self {
        FieldMap {
            id: "id".to_owned(),
            question: "question".to_owned(),
            gold: "golden_answer".to_owned(),
            answer: "answer_{system}".to_owned(),
            judgment: "judge_{system}".to_owned(),
            systems: Vec::new(),
            split_golds: true,
        }
    }
}

/// A dataset reference as given on the command line or in config.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetFile {
    pub path: PathBuf,
    pub format: DatasetFormat,
    pub field_map: Option<FieldMap>,
}

/// One rejected input line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineError {
    /// 1-based line number in the source file.
    pub line: usize,
    pub message: String,
}

/// Ingestion outcome: validated items plus everything that was rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub items: Vec<EvalItem>,
    pub line_errors: Vec<LineError>,
}

/// Load and validate a dataset.
///
/// Invalid lines are collected rather than fatal, but when more than
/// `max_invalid_fraction` of the lines fail the whole ingest errors out —
/// a partially-readable file should not quietly skew aggregates.
pub fn ingest(dataset: &DatasetFile, max_invalid_fraction: f64) -> Result<Ingested> {
    if !(0.0..=1.0).contains(&max_invalid_fraction) {
        return Err(Error::Config(format!(
            "max_invalid_fraction must be within [0, 1], got {max_invalid_fraction}"
        )));
    }
    let text = std::fs::read_to_string(&dataset.path)?;
    let mut items = Vec::new();
    let mut line_errors = Vec::new();
    let mut seen: HashSet<(String, String)> = HashSet::new();
    let mut total_lines = 0usize;

    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        total_lines += 1;
        let fail = |message: String, errors: &mut Vec<LineError>| {
            errors.push(LineError { line: line_no, message });
        };
        match dataset.format {
            DatasetFormat::Normalized => match parse_normalized(line) {
                Ok(item) => {
                    if seen.insert((item.id.clone(), item.system_name.clone())) {
                        items.push(item);
                    } else {
                        fail(
                            format!(
                                "duplicate item id {:?} for system {:?}",
                                item.id, item.system_name
                            ),
                            &mut line_errors,
                        );
                    }
                }
                Err(e) => fail(e.to_string(), &mut line_errors),
            },
            DatasetFormat::EvounaImport => {
                let map = dataset.field_map.as_ref().ok_or_else(|| {
                    Error::Config("EVOUNA import needs a field map listing the systems".into())
                })?;
                if map.systems.is_empty() {
                    return Err(Error::Config(
                        "EVOUNA field map lists no systems to import".into(),
                    ));
                }
                match import_line(line, map) {
                    Ok(line_items) => {
                        for item in line_items {
                            if seen.insert((item.id.clone(), item.system_name.clone())) {
                                items.push(item);
                            } else {
                                fail(
                                    format!(
                                        "duplicate item id {:?} for system {:?}",
                                        item.id, item.system_name
                                    ),
                                    &mut line_errors,
                                );
                            }
                        }
                    }
                    Err(e) => fail(e.to_string(), &mut line_errors),
                }
            }
        }
    }

    if total_lines == 0 {
        return Err(Error::Dataset(format!("{} contains no items", dataset.path.display())));
    }
    let bad_lines: HashSet<usize> = line_errors.iter().map(|e| e.line).collect();
    let fraction = bad_lines.len() as f64 / total_lines as f64;
    if fraction > max_invalid_fraction {
        return Err(Error::Dataset(format!(
            "{} of {} lines invalid in {} (limit {:.0}%); first: line {}: {}",
            bad_lines.len(),
            total_lines,
            dataset.path.display(),
            max_invalid_fraction * 100.0,
            line_errors[0].line,
            line_errors[0].message
        )));
    }
    Ok(Ingested { items, line_errors })
}

fn parse_normalized(line: &str) -> Result<EvalItem> {
    let item: EvalItem = serde_json::from_str(line)?;
    item.validate()?;
    Ok(item)
}

/// Expand one EVOUNA-style question record into per-system items.
fn import_line(line: &str, map: &FieldMap) -> Result<Vec<EvalItem>> {
    let value: Value = serde_json::from_str(line)?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Dataset("line is not a JSON object".into()))?;

    let id = match obj.get(&map.id) {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Number(n)) => n.to_string(),
        Some(other) => return Err(Error::Dataset(format!("field {:?} has non-scalar value {other}", map.id))),
        None => return Err(Error::Dataset(format!("missing field {:?}", map.id))),
    };
    let question = field_str(obj, &map.question)?;
    let gold_answers = match obj.get(&map.gold) {
        Some(Value::String(s)) if map.split_golds => {
            s.split('/').map(|g| g.trim().to_owned()).filter(|g| !g.is_empty()).collect()
        }
        Some(Value::String(s)) => vec![s.clone()],
        Some(Value::Array(parts)) => parts
            .iter()
            .map(|p| {
                p.as_str()
                    .map(str::to_owned)
                    .ok_or_else(|| Error::Dataset(format!("field {:?} has a non-string entry", map.gold)))
            })
            .collect::<Result<Vec<String>>>()?,
        Some(other) => {
            return Err(Error::Dataset(format!("field {:?} has unsupported value {other}", map.gold)))
        }
        None => return Err(Error::Dataset(format!("missing field {:?}", map.gold))),
    };

    let mut items = Vec::with_capacity(map.systems.len());
    for system in &map.systems {
        let answer_field = map.answer.replacen("{system}", system, 1);
        let judgment_field = map.judgment.replacen("{system}", system, 1);
        let system_answer = field_str(obj, &answer_field)?;
        let human_judgment = match obj.get(&judgment_field) {
            None | Some(Value::Null) => None,
            Some(Value::Bool(b)) => Some(*b),
            Some(Value::String(s)) => match s.trim().to_lowercase().as_str() {
                "true" | "yes" | "correct" => Some(true),
                "false" | "no" | "incorrect" => Some(false),
                other => {
                    return Err(Error::Dataset(format!(
                        "field {judgment_field:?} has unrecognized judgment {other:?}"
                    )))
                }
            },
            Some(other) => {
                return Err(Error::Dataset(format!(
                    "field {judgment_field:?} has unsupported value {other}"
                )))
            }
        };
        let item = EvalItem {
            id: id.clone(),
            question: question.clone(),
            gold_answers: gold_answers.clone(),
            system_name: system.clone(),
            system_answer,
            human_judgment,
        };
        item.validate()?;
        items.push(item);
    }
    Ok(items)
}

fn field_str(obj: &serde_json::Map<String, Value>, field: &str) -> Result<String> {
    match obj.get(field) {
        Some(Value::String(s)) => Ok(s.clone()),
        Some(other) => Err(Error::Dataset(format!("field {field:?} has non-string value {other}"))),
        None => Err(Error::Dataset(format!("missing field {field:?}"))),
    }
}
