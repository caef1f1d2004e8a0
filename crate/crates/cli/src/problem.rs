//! Problem documents.
//!
//! ```json
//! {
//!   "marginals": [[0.5, 0.5], [0.25, 0.75]],
//!   "cost": [[0.0, 1.0], [1.0, 0.0]],
//!   "initial_set": [[0, 0], [0, 1], [1, 1]]
//! }
//! ```
//!
//! `cost` is either a dense nested array with one level per marginal, or a
//! builtin generator: `{"builtin": "quadratic", "points": [...]}` with one
//! list of coordinate vectors per marginal (cost is the sum of pairwise
//! squared distances), or `{"builtin": "counterexample"}` (marginals may then
//! be omitted).

use std::path::Path;

use gencol::counterexample::{build_fixture, POINTS};
use gencol::model::product_size;
use gencol::{ActiveSet, Configuration, CostSpec, DiscreteMarginal, Problem};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};

/// Largest dense cost table accepted from a file.
pub const DENSE_INGEST_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    /// Number of marginals; checked against `marginals` when present.
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marginals: Option<Vec<Vec<f64>>>,
    pub cost: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_set: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "builtin", rename_all = "snake_case", deny_unknown_fields)]
enum Builtin {
    Quadratic { points: Vec<Vec<Vec<f64>>> },
    Counterexample {},
}

#[derive(Debug)]
pub struct LoadedProblem {
    pub problem: Problem<f64>,
    /// Checked to carry a feasible plan.
    pub initial_set: Option<ActiveSet>,
}

/// `(line, column)`, both 1-based, of the first occurrence of `"key"`.
fn locate(text: &str, key: &str) -> (usize, usize) {
    let needle = format!("\"{key}\"");
    match text.find(&needle) {
        Some(at) => {
            let before = &text[..at];
            let line = before.matches('\n').count() + 1;
            let col = at - before.rfind('\n').map_or(0, |p| p + 1) + 1;
            (line, col)
        }
        None => (1, 1),
    }
}

pub fn load(path: &Path) -> Result<LoadedProblem> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse(&text, path)
}

pub fn parse(text: &str, path: &Path) -> Result<LoadedProblem> {
    let file: ProblemFile = serde_json::from_str(text).map_err(|e| CliError::Input {
        file: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string().split(" at line").next().unwrap_or_default().to_string(),
    })?;
    let at = |key: &str, message: String| {
        let (line, column) = locate(text, key);
        CliError::Input {
            file: path.display().to_string(),
            line,
            column,
            message,
        }
    };

    let builtin = if file.cost.is_object() {
        Some(
            serde_json::from_value::<Builtin>(file.cost.clone())
                .map_err(|e| at("cost", format!("bad cost generator: {e}")))?,
        )
    } else {
        None
    };

    let weights = match (&file.marginals, &builtin) {
        (Some(m), _) => m.clone(),
        (None, Some(Builtin::Counterexample {})) => vec![vec![1.0 / POINTS as f64; POINTS]; 3],
        (None, _) => return Err(at("cost", "missing field `marginals`".into())),
    };
    if let Some(n) = file.n {
        if n != weights.len() {
            return Err(at("N", format!("N = {n} but {} marginals given", weights.len())));
        }
    }
    if weights.is_empty() {
        return Err(at("marginals", "at least one marginal is required".into()));
    }
    let marginals: Vec<DiscreteMarginal<f64>> = gencol::model::marginals_from(weights)
        .map_err(|e| at("marginals", e.to_string()))?;
    let sizes: Vec<usize> = marginals.iter().map(DiscreteMarginal::len).collect();

    let cost = match builtin {
        None => dense_cost(&file.cost, &sizes).map_err(|m| at("cost", m))?,
        Some(Builtin::Counterexample {}) => {
            if sizes != [POINTS; 3] {
                return Err(at(
                    "cost",
                    format!("the counterexample cost needs three marginals on {POINTS} points"),
                ));
            }
            build_fixture::<f64>().problem.cost().clone()
        }
        Some(Builtin::Quadratic { points }) => quadratic_cost(points, &sizes).map_err(|m| at("cost", m))?,
    };
    let problem = Problem::new(marginals, cost).map_err(|e| at("cost", e.to_string()))?;

    let initial_set = file
        .initial_set
        .map(|set| {
            set.into_iter()
                .map(|r| {
                    let c = Configuration::from(r);
                    if c.in_range(&sizes) {
                        Ok(c)
                    } else {
                        Err(at("initial_set", format!("configuration {c} out of range for sizes {sizes:?}")))
                    }
                })
                .collect::<Result<Vec<_>>>()
                .and_then(|configs| {
                    ActiveSet::new(configs, problem.marginals()).map_err(|e| at("initial_set", e.to_string()))
                })
        })
        .transpose()?;
    Ok(LoadedProblem { problem, initial_set })
}

fn dense_cost(value: &Value, sizes: &[usize]) -> std::result::Result<CostSpec<f64>, String> {
    let total = product_size(sizes);
    if total > DENSE_INGEST_LIMIT {
        return Err(format!(
            "dense cost with {total} entries exceeds the {DENSE_INGEST_LIMIT} entry limit; use a builtin generator"
        ));
    }
    let mut flat = Vec::with_capacity(total as usize);
    flatten(value, sizes, 0, &mut Vec::new(), &mut flat)?;
    CostSpec::dense(sizes.to_vec(), flat).map_err(|e| e.to_string())
}

fn flatten(
    value: &Value,
    sizes: &[usize],
    depth: usize,
    path: &mut Vec<usize>,
    out: &mut Vec<f64>,
) -> std::result::Result<(), String> {
    if depth == sizes.len() {
        return match value.as_f64() {
            Some(v) => {
                out.push(v);
                Ok(())
            }
            None => Err(format!("cost entry at {path:?} is not a number")),
        };
    }
    let items = value
        .as_array()
        .ok_or_else(|| format!("cost at {path:?} should be an array of length {}", sizes[depth]))?;
    if items.len() != sizes[depth] {
        return Err(format!(
            "cost at {path:?} has length {}, expected {} (marginal {depth})",
            items.len(),
            sizes[depth]
        ));
    }
    for (k, item) in items.iter().enumerate() {
        path.push(k);
        flatten(item, sizes, depth + 1, path, out)?;
        path.pop();
    }
    Ok(())
}

fn quadratic_cost(points: Vec<Vec<Vec<f64>>>, sizes: &[usize]) -> std::result::Result<CostSpec<f64>, String> {
    if points.len() != sizes.len() {
        return Err(format!("{} point lists for {} marginals", points.len(), sizes.len()));
    }
    let dim = points.first().and_then(|p| p.first()).map_or(0, Vec::len);
    for (i, (pts, &l)) in points.iter().zip(sizes).enumerate() {
        if pts.len() != l {
            return Err(format!("marginal {i} has {l} weights but {} points", pts.len()));
        }
        if pts.iter().any(|p| p.len() != dim) {
            return Err(format!("points of marginal {i} are not all {dim}-dimensional"));
        }
    }
    CostSpec::from_fn(sizes.to_vec(), move |idx| {
        let mut s = 0.0;
        for i in 0..idx.len() {
            for j in i + 1..idx.len() {
                let (a, b) = (&points[i][idx[i]], &points[j][idx[j]]);
                s += a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
            }
        }
        s
    })
    .map_err(|e| e.to_string())
}

/// The counterexample as a problem document, starting from `supp(gamma0)`.
pub fn counterexample_document() -> ProblemFile {
    let fixture = build_fixture::<f64>();
    ProblemFile {
        n: Some(3),
        marginals: Some(vec![vec![1.0 / POINTS as f64; POINTS]; 3]),
        cost: serde_json::json!({ "builtin": "counterexample" }),
        initial_set: Some(fixture.gamma0.support().map(|r| r.indices().to_vec()).collect()),
    }
}

/// Dense nested-array form of the counterexample cost.
#[cfg(test)]
fn counterexample_dense_cost() -> Value {
    use gencol::counterexample::cost_value;
    let table: Vec<Vec<Vec<f64>>> = (0..POINTS)
        .map(|a| (0..POINTS).map(|b| (0..POINTS).map(|c| cost_value(&[a, b, c])).collect()).collect())
        .collect();
    serde_json::to_value(table).unwrap_or_default()
}
