//! `.mpyds` dataset files.
//!
//! ```text
//! MPYDS v1 <task> <num_classes> <split|-> <num_samples>
//! ### <class-index> <probe>;<probe>;...
//! <program text>
//! <blank line>
//! ```
//!
//! A probe is its inputs joined by `,`; a probe with no inputs is `-`.

use std::fmt::Write as _;
use std::path::Path;

use mixcode_core::corpus::{Dataset, Example, Split, Task};
use mixcode_core::lang::{parse_source, render};

const MAGIC: &str = "MPYDS";
const VERSION: &str = "v1";

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn syntax(line: usize, reason: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        reason: reason.into(),
    }
}

fn write_probes(probes: &[Vec<i64>]) -> String {
    probes
        .iter()
        .map(|p| {
            if p.is_empty() {
                "-".to_string()
            } else {
                p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
            }
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn read_probes(field: &str, line: usize) -> Result<Vec<Vec<i64>>, FormatError> {
    if field.is_empty() {
        return Ok(Vec::new());
    }
    field
        .split(';')
        .map(|p| {
            if p == "-" {
                return Ok(Vec::new());
            }
            p.split(',')
                .map(|v| {
                    v.parse::<i64>()
                        .map_err(|_| syntax(line, format!("bad probe value `{v}`")))
                })
                .collect()
        })
        .collect()
}

pub fn write_dataset(d: &Dataset) -> String {
    let split = d.split.map_or("-", |s| s.name());
    let mut out = format!(
        "{MAGIC} {VERSION} {} {} {split} {}\n",
        d.task,
        d.num_classes,
        d.samples.len()
    );
    for s in &d.samples {
        let _ = writeln!(out, "### {} {}", s.label, write_probes(&s.probes));
        out.push_str(&render(&s.program));
        out.push('\n');
    }
    out
}

pub fn read_dataset(text: &str) -> Result<Dataset, FormatError> {
    let body = text
        .strip_suffix('\n')
        .ok_or_else(|| syntax(0, "file must end with a newline"))?;
    let mut lines = body.split('\n').enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| syntax(1, "empty file"))?;
    let fields: Vec<&str> = header.split(' ').collect();
    let [magic, version, task, classes, split, count] = fields[..] else {
        return Err(syntax(
            1,
            "header must be `MPYDS v1 <task> <num_classes> <split> <num_samples>`",
        ));
    };
    if magic != MAGIC || version != VERSION {
        return Err(syntax(1, format!("unsupported format `{magic} {version}`")));
    }
    let task: Task = task.parse().map_err(|e: String| syntax(1, e))?;
    let num_classes: usize = classes.parse().map_err(|_| syntax(1, "bad class count"))?;
    let split = match split {
        "-" => None,
        s => Some(s.parse::<Split>().map_err(|e| syntax(1, e))?),
    };
    let count: usize = count.parse().map_err(|_| syntax(1, "bad sample count"))?;

    let mut samples = Vec::with_capacity(count);
    while samples.len() < count {
        let (n, head) = lines.next().ok_or_else(|| {
            syntax(
                0,
                format!("truncated: expected {count} samples, found {}", samples.len()),
            )
        })?;
        let rest = head
            .strip_prefix("### ")
            .ok_or_else(|| syntax(n, "expected `### <class> <probes>`"))?;
        let (label, probes) = rest.split_once(' ').unwrap_or((rest, ""));
        let label: usize = label.parse().map_err(|_| syntax(n, "bad class index"))?;
        if label >= num_classes {
            return Err(syntax(n, format!("class {label} out of range")));
        }
        let probes = read_probes(probes, n)?;
        let mut source = String::new();
        let mut terminated = false;
        for (_, l) in lines.by_ref() {
            if l.is_empty() {
                terminated = true;
                break;
            }
            source.push_str(l);
            source.push('\n');
        }
        if !terminated {
            return Err(syntax(n, "truncated: program has no blank-line terminator"));
        }
        if source.is_empty() {
            return Err(syntax(n, "sample has no program text"));
        }
        let program = parse_source(&source).map_err(|e| syntax(n, format!("program does not parse: {e}")))?;
        samples.push(Example { program, label, probes });
    }
    if let Some((n, l)) = lines.find(|(_, l)| !l.is_empty()) {
        return Err(syntax(n, format!("unexpected content after {count} samples: `{l}`")));
    }
    Ok(Dataset {
        task,
        num_classes,
        split,
        samples,
    })
}

pub fn save_dataset(path: &Path, d: &Dataset) -> Result<(), FormatError> {
    std::fs::write(path, write_dataset(d))?;
    Ok(())
}

pub fn load_dataset(path: &Path) -> Result<Dataset, FormatError> {
    read_dataset(&std::fs::read_to_string(path)?)
}
