//! Machine-readable command reports and their human rendering.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: CommandEcho,
    pub convention: String,
    pub results: Results,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resources: Option<Resources>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommandEcho {
    pub name: String,
    pub args: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub name: String,
    pub value: String,
}

impl Entry {
    pub fn new(name: impl Into<String>, value: impl Into<String>) -> Self {
        Entry {
            name: name.into(),
            value: value.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    pub walker: bool,
    pub kundt: bool,
    pub recurrent: bool,
    pub covariantly_constant: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderEntry {
    pub order: usize,
    pub label: String,
    pub support: Vec<Vec<i32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Entry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub weight: Vec<i32>,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MismatchEntry {
    pub point: usize,
    pub quantity: String,
    pub symbolic: String,
    pub pointwise: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Results {
    Invariants {
        self_norms: Vec<Entry>,
        operator: Vec<Entry>,
    },
    Classify {
        flags: Flags,
        spin_coefficients: Vec<Entry>,
    },
    Vsi {
        summary: String,
        orders: Vec<OrderEntry>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        note: Option<String>,
    },
    Bw {
        tensor: String,
        k: usize,
        /// Counts are per symmetry orbit for curvature tensors.
        representatives: bool,
        cells: Vec<Cell>,
    },
    Builtin {
        family: String,
        files: Vec<String>,
        expected: String,
    },
    Oracle {
        points: usize,
        comparisons: usize,
        mismatches: Vec<MismatchEntry>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        exhausted: Option<String>,
    },
}

/// Everything needed to re-check a verdict independently.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strictness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certified_through: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Entry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refuted_at: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub no_direction: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resources {
    pub order: usize,
    pub dense_components: usize,
    pub stored_components: usize,
    pub cap: usize,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let args: Vec<String> = self.command.args.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(out, "vsi {} {}", self.command.name, args.join(" "));
        match &self.results {
            Results::Invariants { self_norms, operator } => {
                for e in self_norms.iter().chain(operator) {
                    let _ = writeln!(out, "  {} = {}", e.name, e.value);
                }
            }
            Results::Classify {
                flags,
                spin_coefficients,
            } => {
                let _ = writeln!(
                    out,
                    "  walker = {}\n  kundt = {}\n  recurrent = {}\n  covariantly_constant = {}",
                    flags.walker, flags.kundt, flags.recurrent, flags.covariantly_constant
                );
                for e in spin_coefficients {
                    let _ = writeln!(out, "  {} = {}", e.name, e.value);
                }
            }
            Results::Vsi { summary, orders, note } => {
                let _ = writeln!(out, "  verdict: {summary}");
                for o in orders {
                    let support: Vec<String> = o.support.iter().map(|w| weight(w)).collect();
                    let _ = write!(out, "  {}: support {{{}}}", o.label, support.join(", "));
                    if let Some(w) = &o.witness {
                        let _ = write!(out, "; {} = {}", w.name, w.value);
                    }
                    out.push('\n');
                }
                if let Some(n) = note {
                    let _ = writeln!(out, "  note: {n}");
                }
            }
            Results::Bw {
                tensor,
                k,
                representatives,
                cells,
            } => {
                let unit = if *representatives { "orbit representatives" } else { "components" };
                let _ = writeln!(out, "  {tensor}: {} weights, counts are {unit}", cells.len());
                out.push_str(&diagram(*k, cells));
            }
            Results::Builtin {
                family,
                files,
                expected,
            } => {
                let _ = writeln!(out, "  {family}: expected {expected}");
                for f in files {
                    let _ = writeln!(out, "  wrote {f}");
                }
            }
            Results::Oracle {
                points,
                comparisons,
                mismatches,
                exhausted,
            } => {
                let _ = writeln!(
                    out,
                    "  {points} points, {comparisons} comparisons, {} mismatches",
                    mismatches.len()
                );
                for m in mismatches {
                    let _ = writeln!(
                        out,
                        "  point {}: {} symbolic {} pointwise {}",
                        m.point, m.quantity, m.symbolic, m.pointwise
                    );
                }
                if let Some(e) = exhausted {
                    let _ = writeln!(out, "  sampling stopped: {e}");
                }
            }
        }
        if let Some(c) = &self.certificate {
            if let Some(l) = &c.lambda {
                let _ = writeln!(
                    out,
                    "  certificate: lambda = {} ({})",
                    weight(&l.iter().map(|&x| x as i32).collect::<Vec<_>>()),
                    c.strictness.as_deref().unwrap_or("strict")
                );
            }
            if let (Some(j), Some(w)) = (c.refuted_at, &c.witness) {
                let _ = writeln!(out, "  witness at order {j}: {} = {}", w.name, w.value);
            }
            if let Some(n) = &c.no_direction {
                let _ = writeln!(out, "  no strict direction: {n}");
            }
        }
        if let Some(r) = &self.resources {
            let _ = writeln!(
                out,
                "  stack order {}: {} stored of {} dense components (cap {})",
                r.order, r.stored_components, r.dense_components, r.cap
            );
        }
        let _ = writeln!(out, "  convention: {}", self.convention);
        out
    }
}

fn weight(w: &[i32]) -> String {
    let parts: Vec<String> = w.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

/// A grid with `b₁` across and `b₂` down for `k = 2`, a number line for
/// `k = 1`, and a list otherwise.
pub fn diagram(k: usize, cells: &[Cell]) -> String {
    let mut out = String::new();
    if cells.is_empty() {
        out.push_str("  (no nonzero components)\n");
        return out;
    }
    match k {
        1 | 2 => {
            let lo = |i: usize| cells.iter().map(|c| c.weight[i]).min().unwrap_or(0).min(0);
            let hi = |i: usize| cells.iter().map(|c| c.weight[i]).max().unwrap_or(0).max(0);
            let count = |b1: i32, b2: Option<i32>| {
                cells
                    .iter()
                    .find(|c| c.weight[0] == b1 && b2.map_or(true, |b| c.weight[1] == b))
                    .map(|c| c.count)
            };
            let cols: Vec<i32> = (lo(0)..=hi(0)).collect();
            let width = cells.iter().map(|c| c.count.to_string().len()).max().unwrap_or(1).max(3);
            let _ = write!(out, "  {:>6} ", if k == 2 { "b2\\b1" } else { "b1" });
            for c in &cols {
                let _ = write!(out, " {c:>width$}");
            }
            out.push('\n');
            let rows: Vec<Option<i32>> = if k == 2 { (lo(1)..=hi(1)).rev().map(Some).collect() } else { vec![None] };
            for r in rows {
                let _ = write!(out, "  {:>6} ", r.map_or(String::new(), |x| x.to_string()));
                for c in &cols {
                    match count(*c, r) {
                        Some(n) => {
                            let _ = write!(out, " {n:>width$}");
                        }
                        None => {
                            let _ = write!(out, " {:>width$}", ".");
                        }
                    }
                }
                out.push('\n');
            }
        }
        _ => {
            for c in cells {
                let _ = writeln!(out, "  {} : {}", weight(&c.weight), c.count);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_marks_occupied_cells() {
        let cells = vec![
            Cell { weight: vec![2, -2], count: 1 },
            Cell { weight: vec![-1, 0], count: 12 },
        ];
        let d = diagram(2, &cells);
        let lines: Vec<&str> = d.lines().collect();
        // header plus b2 from 0 down to -2
        assert_eq!(lines.len(), 4);
        assert!(lines[1].trim_start().starts_with('0'));
        assert!(lines[1].contains("12"));
        assert!(lines[3].trim_end().ends_with('1'));
        assert!(diagram(3, &cells[..1]).contains("(2,-2) : 1"));
        assert!(diagram(2, &[]).contains("no nonzero"));
    }
}
