//! Curvature scans over a time-ordered series of snapshots.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{parse_edge_list, Graph};
use crate::measure::{ratio_string, Measure};
use crate::tadp::{tadp_exact, tadp_greedy, TadpInstance, TadpOutcome, DEFAULT_TADP_CAP};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone)]
pub struct SnapshotSeries {
    snapshots: Vec<(String, Graph)>,
}

impl SnapshotSeries {
    pub fn new(snapshots: Vec<(String, Graph)>) -> Result<Self> {
        if snapshots.is_empty() {
            return Err(Error::InvalidParameter("a series needs at least one snapshot".into()));
        }
        Ok(SnapshotSeries { snapshots })
    }

    /// Reads every `*.edges` file of `dir`; lexicographic file name order is time order.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let entries = std::fs::read_dir(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
        let mut files: Vec<PathBuf> = Vec::new();
        for entry in entries {
            let path = entry.map_err(|source| Error::Io { path: dir.to_path_buf(), source })?.path();
            if path.extension().is_some_and(|e| e == "edges") && path.is_file() {
                files.push(path);
            }
        }
        files.sort();
        Self::load_files(&files)
    }

    pub fn load_files(files: &[PathBuf]) -> Result<Self> {
        let mut snapshots = Vec::with_capacity(files.len());
        for path in files {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.clone(), source })?;
            let g = parse_edge_list(&text).map_err(|e| Error::InFile { path: path.clone(), source: Box::new(e) })?;
            let id = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
            snapshots.push((id, g));
        }
        Self::new(snapshots)
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn snapshots(&self) -> &[(String, Graph)] {
        &self.snapshots
    }

    /// Errors unless every snapshot has the node set of the first.
    pub fn require_fixed_nodes(&self) -> Result<()> {
        let sorted = |g: &Graph| {
            let mut l: Vec<String> = g.labels().to_vec();
            l.sort();
            l
        };
        let first = sorted(&self.snapshots[0].1);
        for (id, g) in &self.snapshots[1..] {
            if sorted(g) != first {
                return Err(Error::InvalidInstance(format!("snapshot {id} has a different node set")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ScanOptions {
    pub measures: Vec<Measure>,
    pub threshold: Rational64,
    pub explain: bool,
    /// Largest |E₁ ∖ E₂| handed to the exact TADP search; larger sets use the greedy one.
    pub explain_cap: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            measures: vec![Measure::Geometric { d: 3 }],
            threshold: Rational64::from(1),
            explain: false,
            explain_cap: DEFAULT_TADP_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnapshotRow {
    pub id: String,
    pub nodes: usize,
    pub edges: usize,
    /// Measure name to value; `None` when the measure is undefined on the snapshot.
    pub curvature: BTreeMap<String, Option<String>>,
    pub errors: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Explanation {
    pub measure: String,
    /// Snapshot playing the role of G₁ (the one with more edges).
    pub larger: String,
    pub outcome: Option<TadpOutcome>,
    pub omitted: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transition {
    pub from: String,
    pub to: String,
    pub deltas: BTreeMap<String, Option<String>>,
    pub flagged: bool,
    pub explanation: Option<Explanation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub tool_version: String,
    pub parameters: BTreeMap<String, String>,
    pub snapshots: Vec<SnapshotRow>,
    pub transitions: Vec<Transition>,
}

impl ScanReport {
    /// Canonical JSON: sorted keys, two-space indentation, trailing newline.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report serialises");
        let mut s = serde_json::to_string_pretty(&value).expect("value serialises");
        s.push('\n');
        s
    }
}

fn measure_key(m: &Measure) -> String {
    match m {
        Measure::Geometric { d } => format!("geometric_d{d}"),
        other => other.name().to_string(),
    }
}

pub fn scan(series: &SnapshotSeries, opts: &ScanOptions) -> Result<ScanReport> {
    if opts.measures.is_empty() {
        return Err(Error::InvalidParameter("scan needs at least one measure".into()));
    }
    let mut values: Vec<BTreeMap<String, Option<Rational64>>> = Vec::new();
    let mut rows = Vec::new();
    for (id, g) in series.snapshots() {
        let mut vals = BTreeMap::new();
        let mut errors = BTreeMap::new();
        for m in &opts.measures {
            let key = measure_key(m);
            match m.evaluate(g) {
                Ok(v) => {
                    vals.insert(key, Some(v));
                }
                Err(e) if e.is_internal() => return Err(e),
                Err(e) => {
                    errors.insert(key.clone(), e.to_string());
                    vals.insert(key, None);
                }
            }
        }
        rows.push(SnapshotRow {
            id: id.clone(),
            nodes: g.n(),
            edges: g.m(),
            curvature: vals.iter().map(|(k, v)| (k.clone(), v.as_ref().map(ratio_string))).collect(),
            errors,
        });
        values.push(vals);
    }
    let mut transitions = Vec::new();
    let snaps = series.snapshots();
    for i in 1..snaps.len() {
        let mut deltas = BTreeMap::new();
        let mut flagged = false;
        for (key, before) in &values[i - 1] {
            let delta = match (before, &values[i][key]) {
                (Some(a), Some(b)) => Some(b - a),
                _ => None,
            };
            if let Some(dv) = delta {
                if !dv.is_zero() && dv.abs() >= opts.threshold {
                    flagged = true;
                }
            }
            deltas.insert(key.clone(), delta.as_ref().map(ratio_string));
        }
        let explanation = if opts.explain && flagged {
            Some(explain(&snaps[i - 1], &snaps[i], &opts.measures[0], opts.explain_cap)?)
        } else {
            None
        };
        transitions.push(Transition {
            from: snaps[i - 1].0.clone(),
            to: snaps[i].0.clone(),
            deltas,
            flagged,
            explanation,
        });
    }
    let mut parameters = BTreeMap::new();
    parameters.insert("measures".to_string(), opts.measures.iter().map(measure_key).collect::<Vec<_>>().join(","));
    parameters.insert("threshold".to_string(), ratio_string(&opts.threshold));
    parameters.insert("explain".to_string(), opts.explain.to_string());
    Ok(ScanReport { tool_version: TOOL_VERSION.to_string(), parameters, snapshots: rows, transitions })
}

fn explain(a: &(String, Graph), b: &(String, Graph), measure: &Measure, cap: usize) -> Result<Explanation> {
    let omit = |larger: &str, reason: String| Explanation {
        measure: measure_key(measure),
        larger: larger.to_string(),
        outcome: None,
        omitted: Some(reason),
    };
    let (ea, eb) = (a.1.edge_set(), b.1.edge_set());
    let (big, small) = if eb.is_subset(&ea) && eb.len() < ea.len() {
        (a, b)
    } else if ea.is_subset(&eb) && ea.len() < eb.len() {
        (b, a)
    } else {
        return Ok(omit("", "neither snapshot's edge set strictly contains the other's".into()));
    };
    let inst = match TadpInstance::new(big.1.clone(), small.1.clone(), *measure) {
        Ok(i) => i,
        Err(e) if e.is_internal() => return Err(e),
        Err(e) => return Ok(omit(&big.0, e.to_string())),
    };
    let outcome = if inst.removable_ids().len() <= cap { tadp_exact(&inst, cap)? } else { tadp_greedy(&inst)? };
    Ok(Explanation { measure: measure_key(measure), larger: big.0.clone(), outcome: Some(outcome), omitted: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(texts: &[&str]) -> SnapshotSeries {
        SnapshotSeries::new(
            texts.iter().enumerate().map(|(i, t)| (format!("s{i}"), parse_edge_list(t).unwrap())).collect(),
        )
        .unwrap()
    }

    #[test]
    fn constant_series_has_no_flags() {
        let s = series(&["a b\nb c\nc a", "a b\nb c\nc a", "a b\nb c\nc a"]);
        let r = scan(&s, &ScanOptions { threshold: Rational64::from(0), ..Default::default() }).unwrap();
        assert_eq!(r.transitions.len(), 2);
        assert!(r.transitions.iter().all(|t| !t.flagged));
    }

    #[test]
    fn deleting_triangles_is_flagged_and_explained() {
        let k4 = "1 2\n1 3\n1 4\n2 3\n2 4\n3 4";
        let c4 = "1 2\n2 3\n3 4\n1 4";
        let s = series(&[k4, c4]);
        let opts = ScanOptions { explain: true, ..Default::default() };
        let r = scan(&s, &opts).unwrap();
        let t = &r.transitions[0];
        assert!(t.flagged);
        assert_eq!(t.deltas["geometric_d3"].as_deref(), Some("-2"));
        let e = t.explanation.as_ref().unwrap();
        assert_eq!(e.outcome.as_ref().unwrap().size(), Some(2));
        assert_eq!(r.to_json(), r.to_json());
    }

    #[test]
    fn unrelated_edge_sets_are_not_explained() {
        let s = series(&["a b\nb c\nc a\nc d", "a b\nb c\nc d\na d"]);
        let r = scan(&s, &ScanOptions { explain: true, threshold: Rational64::from(0), ..Default::default() }).unwrap();
        let e = r.transitions[0].explanation.as_ref().unwrap();
        assert!(e.outcome.is_none());
        assert!(e.omitted.is_some());
    }
}
