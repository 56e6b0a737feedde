//! `--sweep key=values`: independent runs of one subcommand over a
//! parameter grid, each in its own directory with its own manifest.

use std::path::{Path, PathBuf};

use serde_json::{json, Number, Value};
use stwpa::{par, Parallelism};

use crate::commands::Command;
use crate::error::{param, CliError};

/// One point of a sweep: its parameter assignments and the command.
pub type SweepRun = (Vec<(String, Value)>, Command);

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub key: String,
    pub values: Vec<Value>,
}

fn number(v: f64) -> Value {
    if v.fract() == 0.0 && v.abs() < 9.0e15 {
        Value::from(v as i64)
    } else {
        Number::from_f64(v).map_or(Value::Null, Value::Number)
    }
}

fn scalar(token: &str) -> Value {
    match token.parse::<f64>() {
        Ok(v) if v.is_finite() => number(v),
        _ => Value::String(token.to_string()),
    }
}

/// Parses `key=v1,v2,...` or `key=start:stop:count`.
pub fn parse_axis(spec: &str) -> Result<SweepAxis, CliError> {
    let (key, rest) = spec
        .split_once('=')
        .ok_or_else(|| param(format!("sweep `{spec}` is not key=values")))?;
    let key = key.trim().trim_start_matches("--").replace('-', "_");
    let parts: Vec<&str> = rest.split(':').collect();
    let values = match parts.as_slice() {
        [start, stop, count] => {
            let bad = || param(format!("sweep range `{rest}` needs start:stop:count"));
            let (a, b): (f64, f64) = (start.parse().map_err(|_| bad())?, stop.parse().map_err(|_| bad())?);
            let n: usize = count.parse().map_err(|_| bad())?;
            if n == 0 || !a.is_finite() || !b.is_finite() {
                return Err(bad());
            }
            (0..n)
                .map(|i| {
                    number(if n == 1 {
                        a
                    } else {
                        a + (b - a) * i as f64 / (n - 1) as f64
                    })
                })
                .collect()
        }
        [list] => list.split(',').map(|t| scalar(t.trim())).collect(),
        _ => {
            return Err(param(format!(
                "sweep values `{rest}` are neither a list nor start:stop:count"
            )))
        }
    };
    if key.is_empty() {
        return Err(param(format!("sweep `{spec}` has no key")));
    }
    Ok(SweepAxis { key, values })
}

/// Cartesian product of the axes applied to `base`.
pub fn expand(base: &Command, axes: &[SweepAxis]) -> Result<Vec<SweepRun>, CliError> {
    let (name, params) = base.to_parts();
    for axis in axes {
        if params.get(&axis.key).is_none() {
            let known: Vec<&String> = params.as_object().map(|m| m.keys().collect()).unwrap_or_default();
            return Err(param(format!(
                "{name} has no parameter `{}` (known: {known:?})",
                axis.key
            )));
        }
    }
    let mut combos: Vec<Vec<(String, Value)>> = vec![Vec::new()];
    for axis in axes {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                axis.values.iter().map(move |v| {
                    let mut c = c.clone();
                    c.push((axis.key.clone(), v.clone()));
                    c
                })
            })
            .collect();
    }
    combos
        .into_iter()
        .map(|assign| {
            let mut p = params.clone();
            for (k, v) in &assign {
                p[k] = v.clone();
            }
            Ok((assign, Command::from_parts(&name, p)?))
        })
        .collect()
}

/// Runs every point of the sweep; `run_one` executes a single run in the
/// given directory. Writes `sweep.json` under `base_dir`.
pub fn run(
    runs: Vec<SweepRun>,
    base_dir: &Path,
    base_name: &Path,
    run_one: impl Fn(&Command, PathBuf, PathBuf) -> Result<Value, CliError> + Sync,
) -> Result<(Value, u8), CliError> {
    let indexed: Vec<(usize, &SweepRun)> = runs.iter().enumerate().collect();
    let results = par::map(&indexed, Parallelism::default(), |(i, (_, cmd))| {
        let name = format!("run-{i:03}");
        run_one(cmd, base_dir.join(&name), base_name.join(&name))
    });
    let mut worst = 0u8;
    let entries: Vec<Value> = runs
        .iter()
        .zip(&results)
        .enumerate()
        .map(|(i, ((assign, _), res))| {
            let assignments: serde_json::Map<String, Value> = assign.iter().cloned().collect();
            let mut e = json!({ "index": i, "dir": format!("run-{i:03}"), "assignments": assignments });
            match res {
                Ok(summary) => {
                    e["exit_code"] = json!(0);
                    e["summary"] = summary.clone();
                }
                Err(err) => {
                    worst = worst.max(err.exit_code());
                    e["exit_code"] = json!(err.exit_code());
                    e["error"] = json!(err.to_string());
                }
            }
            e
        })
        .collect();
    let index = json!({ "runs": entries });
    std::fs::create_dir_all(base_dir).map_err(|e| CliError::io(base_dir.display(), e))?;
    let path = base_dir.join("sweep.json");
    let text = serde_json::to_string_pretty(&index).expect("sweep index serializes") + "\n";
    std::fs::write(&path, text).map_err(|e| CliError::io(path.display(), e))?;
    Ok((index, worst))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_and_range_axes() {
        let a = parse_axis("amplitude=0.01,0.02").unwrap();
        assert_eq!(a.key, "amplitude");
        assert_eq!(a.values, vec![json!(0.01), json!(0.02)]);
        let b = parse_axis("--flux-max=1:3:3").unwrap();
        assert_eq!(b.key, "flux_max");
        assert_eq!(b.values, vec![json!(1), json!(2), json!(3)]);
        let c = parse_axis("boundary=fixed,periodic").unwrap();
        assert_eq!(c.values, vec![json!("fixed"), json!("periodic")]);
    }

    #[test]
    fn malformed_axes() {
        for s in ["amplitude", "=1,2", "a=1:2", "a=1:2:0", "a=x:2:3", "a=1:2:3:4"] {
            assert!(parse_axis(s).is_err(), "{s}");
        }
    }
}
