use std::collections::HashSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::LayerSweepReport;

/// Config hash and seed stamped onto every emitted file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ReportKey {
    pub model: String,
    pub protocol: String,
    pub metric: String,
    pub layer: usize,
}

/// A column of a report: every layer of one (model, protocol, metric).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Series {
    model: String,
    protocol: String,
    metric: String,
}

/// Per-layer values keyed by (model, protocol, metric, layer).
///
/// Columns keep insertion order and rows run layer-ascending, so the CSV
/// rendering is canonical for a given config.
#[derive(Debug, Clone)]
pub struct ReportTable {
    pub name: String,
    pub provenance: Provenance,
    entries: Vec<(ReportKey, f64)>,
    keys: HashSet<ReportKey>,
    series: Vec<Series>,
    /// Extra `#` lines emitted under the provenance line.
    pub notes: Vec<String>,
}

pub struct SeriesSummary {
    pub label: String,
    pub report: LayerSweepReport,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl ReportTable {
    pub fn new(name: impl Into<String>, provenance: Provenance) -> Self {
        Self {
            name: name.into(),
            provenance,
            entries: Vec::new(),
            keys: HashSet::new(),
            series: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn insert(&mut self, key: ReportKey, value: f64) -> Result<()> {
        if !self.keys.insert(key.clone()) {
            return Err(Error::Config(format!(
                "duplicate report key {}/{}/{} layer {}",
                key.model, key.protocol, key.metric, key.layer
            )));
        }
        let series = Series {
            model: key.model.clone(),
            protocol: key.protocol.clone(),
            metric: key.metric.clone(),
        };
        if !self.series.contains(&series) {
            self.series.push(series);
        }
        self.entries.push((key, value));
        Ok(())
    }

    /// Inserts `values[l]` as layer `l`.
    pub fn insert_layers(&mut self, model: &str, protocol: &str, metric: &str, values: &[f64]) -> Result<()> {
        for (layer, &v) in values.iter().enumerate() {
            self.insert(
                ReportKey {
                    model: model.to_string(),
                    protocol: protocol.to_string(),
                    metric: metric.to_string(),
                    layer,
                },
                v,
            )?;
        }
        Ok(())
    }

    pub fn get(&self, key: &ReportKey) -> Option<f64> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    /// `(model, protocol, metric)` of every column, in insertion order.
    pub fn columns(&self) -> impl Iterator<Item = (&str, &str, &str)> + '_ {
        self.series
            .iter()
            .map(|s| (s.model.as_str(), s.protocol.as_str(), s.metric.as_str()))
    }

    /// All layers of one column, or `None` if it is absent or has gaps.
    pub fn values(&self, model: &str, protocol: &str, metric: &str) -> Option<Vec<f64>> {
        let series = Series {
            model: model.to_string(),
            protocol: protocol.to_string(),
            metric: metric.to_string(),
        };
        let col = self.column(&series);
        if col.is_empty() {
            return None;
        }
        col.into_iter().collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn column_labels(&self) -> Vec<String> {
        let distinct_metrics = self
            .series
            .iter()
            .map(|s| &s.metric)
            .collect::<HashSet<_>>()
            .len();
        self.series
            .iter()
            .map(|s| {
                let mut parts = vec![s.model.as_str()];
                if !s.protocol.is_empty() {
                    parts.push(&s.protocol);
                }
                if distinct_metrics > 1 {
                    parts.push(&s.metric);
                }
                parts.join(" ")
            })
            .collect()
    }

    fn column(&self, series: &Series) -> Vec<Option<f64>> {
        let mut col = Vec::new();
        for (k, v) in &self.entries {
            if k.model == series.model && k.protocol == series.protocol && k.metric == series.metric {
                if col.len() <= k.layer {
                    col.resize(k.layer + 1, None);
                }
                col[k.layer] = Some(*v);
            }
        }
        col
    }

    fn header_comment(&self, what: &str) -> String {
        let mut s = format!(
            "# geoprobe {what} config_sha256={} seed={}\n",
            self.provenance.config_hash, self.provenance.seed
        );
        for note in &self.notes {
            writeln!(s, "# {}", note.replace('\n', " ")).unwrap();
        }
        s
    }

    /// Layer rows, one column per series, six decimal places. Missing cells
    /// (models with fewer layers) are left empty.
    pub fn to_csv(&self) -> String {
        let columns: Vec<Vec<Option<f64>>> = self.series.iter().map(|s| self.column(s)).collect();
        let layers = columns.iter().map(Vec::len).max().unwrap_or(0);
        let mut out = self.header_comment(&self.name);
        out.push_str("layer");
        for label in self.column_labels() {
            out.push(',');
            out.push_str(&csv_field(&label));
        }
        out.push('\n');
        for layer in 0..layers {
            write!(out, "{layer}").unwrap();
            for col in &columns {
                out.push(',');
                if let Some(Some(v)) = col.get(layer) {
                    write!(out, "{v:.6}").unwrap();
                }
            }
            out.push('\n');
        }
        out
    }

    /// Best layer (first-wins on ties) and top-layer value of every column.
    pub fn summaries(&self) -> Result<Vec<SeriesSummary>> {
        self.series
            .iter()
            .zip(self.column_labels())
            .map(|(s, label)| {
                let values = self
                    .column(s)
                    .into_iter()
                    .enumerate()
                    .map(|(l, v)| {
                        v.ok_or_else(|| Error::Shape(format!("{label}: no value for layer {l}")))
                    })
                    .collect::<Result<Vec<f64>>>()?;
                Ok(SeriesSummary {
                    label,
                    report: LayerSweepReport::from_values(s.metric.clone(), values)?,
                })
            })
            .collect()
    }

    pub fn summary_csv(&self) -> Result<String> {
        let mut out = self.header_comment(&format!("{} summary", self.name));
        out.push_str("series,best_layer,best_value,top_value,summary\n");
        for s in self.summaries()? {
            let r = &s.report;
            writeln!(
                out,
                "{},{},{:.6},{:.6},{}",
                csv_field(&s.label),
                r.best_layer.0,
                r.best_layer.1,
                r.top_layer_value,
                csv_field(&r.summary())
            )
            .unwrap();
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prov() -> Provenance {
        Provenance {
            config_hash: "abc".into(),
            seed: 42,
        }
    }

    #[test]
    fn csv_shape_and_precision() {
        let mut t = ReportTable::new("selfsim", prov());
        t.insert_layers("GPT-2", "", "selfsim", &[0.5, 0.25, 0.125]).unwrap();
        t.insert_layers("CLIP", "", "selfsim", &[0.1, 0.2]).unwrap();
        assert_eq!(
            t.to_csv(),
            "# geoprobe selfsim config_sha256=abc seed=42\n\
             layer,GPT-2,CLIP\n\
             0,0.500000,0.100000\n\
             1,0.250000,0.200000\n\
             2,0.125000,\n"
        );
    }

    #[test]
    fn duplicate_key_rejected() {
        let mut t = ReportTable::new("x", prov());
        t.insert_layers("m", "", "s", &[1.0]).unwrap();
        assert!(t.insert_layers("m", "", "s", &[1.0]).is_err());
    }

    #[test]
    fn metric_in_label_when_mixed() {
        let mut t = ReportTable::new("magnitude", prov());
        t.insert_layers("GPT-2", "", "top5", &[0.9]).unwrap();
        t.insert_layers("GPT-2", "", "top8", &[0.95]).unwrap();
        assert_eq!(t.column_labels(), vec!["GPT-2 top5", "GPT-2 top8"]);
    }

    #[test]
    fn summary_rows() {
        let mut t = ReportTable::new("intrinsic_rg65", prov());
        t.insert_layers("CLIP", "", "rg65", &[0.1, 0.3, 0.2]).unwrap();
        t.insert_layers("GPT-2", "w/ BOS, no EOS", "rg65", &[0.4, 0.4, 0.1]).unwrap();
        let csv = t.summary_csv().unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[1], "series,best_layer,best_value,top_value,summary");
        assert_eq!(lines[2], "CLIP,1,0.300000,0.200000,\"best(1)=0.300000, top=0.200000\"");
        assert!(lines[3].starts_with("\"GPT-2 w/ BOS, no EOS\",0,0.400000"));
    }
}
