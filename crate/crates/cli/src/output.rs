use crate::{Format, Global};
use serde_json::{json, Map, Value};
use std::io::Write;
use std::path::Path;
use std::time::Duration;

pub const SCHEMA: u64 = 1;

/// What a subcommand hands back: its name, the resolved configuration, the
/// result document, and optionally the rows to use for CSV and a one-line
/// human rendering.
pub struct Output {
    pub command: &'static str,
    pub config: Value,
    pub result: Value,
    pub rows: Option<Vec<Value>>,
    pub headline: Option<String>,
}

impl Output {
    pub fn new(command: &'static str, config: Value, result: Value) -> Self {
        Output { command, config, result, rows: None, headline: None }
    }
}

fn meta(g: &Global, elapsed: Duration) -> Value {
    let ts = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "threads": rayon::current_num_threads(),
        "timestamp_unix": ts,
        "elapsed_ms": elapsed.as_secs_f64() * 1e3,
        "format": g.format(),
    })
}

pub fn render(out: &Output, g: &Global, elapsed: Duration) -> String {
    let mut config = out.config.clone();
    if let Value::Object(m) = &mut config {
        m.insert("format".into(), json!(g.format()));
        m.insert("seed".into(), json!(g.seed));
    }
    match g.format() {
        Format::Json => {
            let mut doc = Map::new();
            doc.insert("schema".into(), json!(SCHEMA));
            doc.insert("command".into(), json!(out.command));
            doc.insert("config".into(), config);
            doc.insert("result".into(), out.result.clone());
            if !g.no_meta {
                doc.insert("meta".into(), meta(g, elapsed));
            }
            let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("JSON values serialize");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = format!("# hbm schema={SCHEMA} command={} config={}\n", out.command, config);
            if !g.no_meta {
                s.push_str(&format!("# meta={}\n", meta(g, elapsed)));
            }
            let rows = out.rows.clone().unwrap_or_else(|| vec![out.result.clone()]);
            s.push_str(&csv(&rows));
            s
        }
        Format::Human => {
            if let Some(h) = &out.headline {
                return format!("{h}\n");
            }
            let mut s = format!("# {} {}\n", out.command, config);
            let mut leaves = Vec::new();
            flatten("", &out.result, &mut leaves);
            for (k, v) in leaves {
                s.push_str(&format!("{k} = {}\n", cell(&v)));
            }
            s
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, v) in m {
                flatten(&key(k), v, out);
            }
        }
        Value::Array(a) => {
            for (i, v) in a.iter().enumerate() {
                flatten(&key(&i.to_string()), v, out);
            }
        }
        _ => out.push((prefix.to_string(), v.clone())),
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => format!("{:.16e}", n.as_f64().unwrap()),
        Value::Number(n) => n.to_string(),
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn csv(rows: &[Value]) -> String {
    let flat: Vec<Vec<(String, Value)>> = rows
        .iter()
        .map(|r| {
            let mut l = Vec::new();
            flatten("", r, &mut l);
            l
        })
        .collect();
    let mut header: Vec<String> = Vec::new();
    for r in &flat {
        for (k, _) in r {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    let mut s = header.join(",");
    s.push('\n');
    for r in &flat {
        let line: Vec<String> =
            header.iter().map(|h| r.iter().find(|(k, _)| k == h).map(|(_, v)| cell(v)).unwrap_or_default()).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}

/// Standard output in one write, or a file replaced by rename.
pub fn write_once(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
            lock.flush()
        }
        Some(p) => {
            let mut tmp = p.as_os_str().to_owned();
            tmp.push(format!(".tmp{}", std::process::id()));
            let tmp = std::path::PathBuf::from(tmp);
            std::fs::write(&tmp, text)?;
            std::fs::rename(&tmp, p)
        }
    }
}
