//! CSV and JSONL writers for trajectories.

use std::io::{self, Write};

use serde_json::{Map, Value};

use super::trajectory::{StateLayout, Trajectory};

/// Column names after `t`: `x1,y1,...,xn,yn,z` or `r1..rn,theta1..thetan,z`.
pub fn columns(traj: &Trajectory) -> Vec<String> {
    let n = traj.n();
    let mut cols = Vec::with_capacity(2 * n + 1);
    match traj.layout {
        StateLayout::Cartesian => {
            for j in 1..=n {
                cols.push(format!("x{j}"));
                cols.push(format!("y{j}"));
            }
        }
        StateLayout::Reduced => {
            cols.extend((1..=n).map(|j| format!("r{j}")));
            cols.extend((1..=n).map(|j| format!("theta{j}")));
        }
    }
    cols.push("z".into());
    cols
}

/// `# config: <json>` header line followed by `t,<columns>` and one row per sample.
pub fn write_csv(traj: &Trajectory, config: Option<&Value>, out: &mut impl Write) -> io::Result<()> {
    if let Some(cfg) = config {
        writeln!(out, "# config: {}", serde_json::to_string(cfg)?)?;
    }
    writeln!(out, "t,{}", columns(traj).join(","))?;
    for s in &traj.samples {
        write!(out, "{}", s.t)?;
        for v in &s.state {
            write!(out, ",{v}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// One JSON object per sample with named keys; a first `{"config": ...}`
/// line when a config is given.
pub fn write_jsonl(traj: &Trajectory, config: Option<&Value>, out: &mut impl Write) -> io::Result<()> {
    if let Some(cfg) = config {
        let mut head = Map::new();
        head.insert("config".into(), cfg.clone());
        writeln!(out, "{}", Value::Object(head))?;
    }
    let cols = columns(traj);
    for s in &traj.samples {
        let mut row = Map::new();
        row.insert("t".into(), s.t.into());
        for (name, v) in cols.iter().zip(&s.state) {
            row.insert(name.clone(), (*v).into());
        }
        writeln!(out, "{}", Value::Object(row))?;
    }
    Ok(())
}

/// Parse the `# config:` header back out of CSV text.
pub fn read_csv_config(text: &str) -> Option<serde_json::Result<Value>> {
    let line = text.lines().next()?;
    let json = line.strip_prefix("# config: ")?;
    Some(serde_json::from_str(json))
}
