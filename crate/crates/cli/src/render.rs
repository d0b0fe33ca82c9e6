use serde_json::{json, Value};

use crate::cli::Format;
use crate::commands::Outcome;
use crate::CliError;

/// Formats a command outcome. JSON and text embed the full effective
/// configuration, including the seed.
pub fn render(out: &Outcome, format: Format, config: Value) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let envelope = json!({
                "command": out.command,
                "config": config,
                "result": out.result,
            });
            let mut s = serde_json::to_string_pretty(&envelope).expect("values serialize");
            s.push('\n');
            Ok(s)
        }
        Format::Text => match (&out.graph, out.command.as_str()) {
            (Some(g), "gen") => Ok(g.to_edge_list()),
            _ => {
                let mut lines = Vec::new();
                flatten("command", &json!(out.command), &mut lines);
                flatten("config", &config, &mut lines);
                flatten("result", &out.result, &mut lines);
                Ok(lines.into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect())
            }
        },
        Format::Csv => match &out.csv {
            Some(csv) => Ok(csv.clone()),
            None => {
                let mut lines = Vec::new();
                flatten("", &out.result, &mut lines);
                let mut s = String::from("key,value\n");
                for (k, v) in lines {
                    s.push_str(&format!("{},{}\n", quote(&k), quote(&v)));
                }
                Ok(s)
            }
        },
        Format::Dot => match &out.graph {
            Some(g) => Ok(g.to_dot()),
            None => Err(CliError::Usage(format!("{} has no graph to render as DOT", out.command))),
        },
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Dotted-path leaves of a JSON value, in document order.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(&join(k), x, out);
            }
        }
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let cells: Vec<String> = items.iter().map(scalar).collect();
            out.push((prefix.to_string(), cells.join(" ")));
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&join(&i.to_string()), x, out);
            }
        }
        other => out.push((prefix.to_string(), scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}
