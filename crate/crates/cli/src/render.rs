//! Output rendering for the three formats.

use clap::ValueEnum;
use linmonad::engine::CohTable;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// Key/value report in the requested format.  JSON keys come out sorted,
/// which keeps byte-identical reruns trivial.
pub fn render_pairs(fmt: Format, pairs: &[(&str, Value)]) -> String {
    match fmt {
        Format::Json => {
            let map: serde_json::Map<String, Value> = pairs
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect();
            let mut out = serde_json::to_string_pretty(&Value::Object(map)).unwrap();
            out.push('\n');
            out
        }
        Format::Text => {
            let mut out = String::new();
            for (k, v) in pairs {
                out.push_str(&format!("{k}: {}\n", plain(v)));
            }
            out
        }
        Format::Csv => {
            let mut out = String::from("key,value\n");
            for (k, v) in pairs {
                out.push_str(&format!("{k},{}\n", csv_cell(&plain(v))));
            }
            out
        }
    }
}

/// Scalar rendering without JSON quoting noise.
fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => items
            .iter()
            .map(plain)
            .collect::<Vec<_>>()
            .join("; "),
        other => other.to_string(),
    }
}

fn csv_cell(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// A cohomology table: grid text, native JSON, or native CSV.
pub fn render_table(fmt: Format, t: &CohTable) -> String {
    match fmt {
        Format::Json => {
            let mut s = t.to_json();
            if !s.ends_with('\n') {
                s.push('\n');
            }
            s
        }
        Format::Csv => t.to_csv(),
        Format::Text => {
            let cells = t.cells();
            let (lo, hi) = t.window;
            let mut out = format!("{} on a {}-fold, twists {}..{}\n", t.sheaf, t.n, lo, hi);
            let width = 7usize;
            out.push_str(&format!("{:>4}", "q\\k"));
            for k in lo..=hi {
                out.push_str(&format!("{k:>width$}"));
            }
            out.push('\n');
            for q in (0..=t.n).rev() {
                out.push_str(&format!("{q:>4}"));
                for k in lo..=hi {
                    let cell = cells
                        .get(&(q, k))
                        .map(|r| r.to_string())
                        .unwrap_or_else(|| "?".into());
                    out.push_str(&format!("{cell:>width$}"));
                }
                out.push('\n');
            }
            for note in &t.notes {
                out.push_str(&format!("note: {note}\n"));
            }
            out
        }
    }
}
