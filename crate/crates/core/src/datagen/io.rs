//! Point files: one point per CSV row, optionally a header row and a trailing
//! label column (`OUTLIER` for outliers).

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DiameterMethod, GroundTruth};
use crate::error::{Error, Result};
use crate::types::{Dataset, Label, OUTLIER_LABEL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelColumn {
    /// Labeled iff the header's last column is `label` or the last field of
    /// the first data row is not a number.
    #[default]
    Auto,
    Present,
    Absent,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PointFormat {
    pub labels: LabelColumn,
}

fn parse_err(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), line, message: message.into() }
}

/// Read a point file. The dataset takes the file stem as its name.
///
/// Cluster labels that are all nonnegative integers keep their numeric ids;
/// otherwise ids follow order of first appearance.
pub fn load_points(path: &Path, format: PointFormat) -> Result<Dataset> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(file);

    let mut coords = Vec::new();
    let mut raw_labels: Vec<String> = Vec::new();
    let mut dim = None;
    let mut labeled = None;
    let mut first = true;
    let mut header_label = false;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if first {
            first = false;
            if record.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
                header_label = record.iter().next_back().is_some_and(|f| f.eq_ignore_ascii_case("label"));
                continue;
            }
        }
        let has_label = *labeled.get_or_insert_with(|| match format.labels {
            LabelColumn::Present => true,
            LabelColumn::Absent => false,
            LabelColumn::Auto => header_label || record.iter().next_back().is_some_and(|f| f.parse::<f64>().is_err()),
        });
        let fields = record.len() - usize::from(has_label);
        if fields == 0 {
            return Err(parse_err(path, line, "row has no coordinates"));
        }
        let expected = *dim.get_or_insert(fields);
        if fields != expected {
            return Err(parse_err(path, line, format!("expected {expected} coordinates, found {fields}")));
        }
        for field in record.iter().take(fields) {
            let v: f64 = field.parse().map_err(|_| parse_err(path, line, format!("invalid number {field:?}")))?;
            if !v.is_finite() {
                return Err(parse_err(path, line, format!("non-finite coordinate {field:?}")));
            }
            coords.push(v);
        }
        if has_label {
            raw_labels.push(record.get(fields).unwrap_or_default().to_string());
        }
    }
    let dim = dim.ok_or_else(|| parse_err(path, 0, "file holds no points"))?;
    let name = path.file_stem().map_or_else(|| "points".to_string(), |s| s.to_string_lossy().into_owned());
    let data = Dataset::from_flat(name, dim, coords)?;
    if labeled != Some(true) {
        return Ok(data);
    }
    let (labels, names) = intern_labels(&raw_labels);
    Ok(data.with_labels(labels)?.with_label_names(names))
}

fn intern_labels(raw: &[String]) -> (Vec<Label>, Vec<String>) {
    let numeric: Option<Vec<Option<u32>>> =
        raw.iter().map(|s| if s == OUTLIER_LABEL { Some(None) } else { s.parse::<u32>().ok().map(Some) }).collect();
    if let Some(ids) = numeric {
        let max = ids.iter().flatten().max().map_or(0, |m| *m as usize + 1);
        let labels = ids.into_iter().map(|id| id.map_or(Label::Outlier, Label::Cluster)).collect();
        return (labels, (0..max).map(|i| i.to_string()).collect());
    }
    let mut names = Vec::new();
    let mut ids: HashMap<&str, u32> = HashMap::new();
    let labels = raw
        .iter()
        .map(|s| {
            if s == OUTLIER_LABEL {
                return Label::Outlier;
            }
            let id = *ids.entry(s.as_str()).or_insert_with(|| {
                names.push(s.clone());
                (names.len() - 1) as u32
            });
            Label::Cluster(id)
        })
        .collect();
    (labels, names)
}

/// Write a point file with a header row. Coordinates use the shortest
/// representation that reads back to the same value.
pub fn save_points(data: &Dataset, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let write = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        let mut header: Vec<String> = (0..data.dim()).map(|d| format!("x{d}")).collect();
        if data.labels().is_some() {
            header.push("label".into());
        }
        writeln!(w, "{}", header.join(","))?;
        for (i, p) in data.points().enumerate() {
            for (d, x) in p.iter().enumerate() {
                if d > 0 {
                    w.write_all(b",")?;
                }
                write!(w, "{x:?}")?;
            }
            if let Some(ls) = data.labels() {
                write!(w, ",{}", data.label_name(ls[i]))?;
            }
            w.write_all(b"\n")?;
        }
        w.flush()
    };
    write(&mut w).map_err(|e| Error::io(path, e))
}

/// JSON sidecar describing how a dataset was generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMetadata {
    pub schema_version: u32,
    pub generator: String,
    /// Generator parameters as given.
    pub params: serde_json::Value,
    pub n: usize,
    pub dim: usize,
    pub k: usize,
    pub z: usize,
    pub cluster_sizes: Vec<usize>,
    pub realized_epsilon1: f64,
    pub realized_epsilon2: f64,
    pub r_bound: Vec<f64>,
    pub diameter: f64,
    pub diameter_method: DiameterMethod,
    pub generating_centers: Vec<Vec<f64>>,
}

impl DatasetMetadata {
    pub const SCHEMA_VERSION: u32 = 1;

    pub fn new<P: Serialize>(generator: &str, params: &P, truth: &GroundTruth) -> Result<Self> {
        let (e1, e2) = truth.realized_epsilons();
        Ok(DatasetMetadata {
            schema_version: Self::SCHEMA_VERSION,
            generator: generator.to_string(),
            params: serde_json::to_value(params)?,
            n: truth.labels.len(),
            dim: truth.generating_centers.dim(),
            k: truth.cluster_sizes.len(),
            z: truth.outlier_count(),
            cluster_sizes: truth.cluster_sizes.clone(),
            realized_epsilon1: e1,
            realized_epsilon2: e2,
            r_bound: truth.r_bound.clone(),
            diameter: truth.diameter,
            diameter_method: truth.diameter_method,
            generating_centers: truth.generating_centers.to_rows(),
        })
    }
}

pub fn write_metadata(meta: &DatasetMetadata, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(meta)?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

pub fn read_metadata(path: &Path) -> Result<DatasetMetadata> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{gen_synthetic, SyntheticSpec};

    fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> std::path::PathBuf {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn auto_detects_header_and_labels() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "a.csv", "x,y,class\n1,2,cat\n3,4,OUTLIER\n5,6,dog\n7,8,cat\n");
        let d = load_points(&p, PointFormat::default()).unwrap();
        assert_eq!(d.name(), "a");
        assert_eq!(d.dim(), 2);
        assert_eq!(d.labels().unwrap(), &[Label::Cluster(0), Label::Outlier, Label::Cluster(1), Label::Cluster(0)]);
        assert_eq!(d.label_names(), &["cat".to_string(), "dog".to_string()]);

        let p = write(&dir, "b.csv", "1.5\n-2\n1e3\n");
        let d = load_points(&p, PointFormat::default()).unwrap();
        assert_eq!(d.coords(), &[1.5, -2.0, 1000.0]);
        assert!(d.labels().is_none());

        // numeric labels only when asked for
        let p = write(&dir, "c.csv", "1,0\n2,1\n");
        assert_eq!(load_points(&p, PointFormat::default()).unwrap().dim(), 2);
        let d = load_points(&p, PointFormat { labels: LabelColumn::Present }).unwrap();
        assert_eq!(d.dim(), 1);
        assert_eq!(d.labels().unwrap(), &[Label::Cluster(0), Label::Cluster(1)]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "bad.csv", "1,2\n3,4\n5,abc\n");
        match load_points(&p, PointFormat::default()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let p = write(&dir, "ragged.csv", "1,2\n3\n");
        match load_points(&p, PointFormat::default()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        let p = write(&dir, "empty.csv", "");
        assert!(load_points(&p, PointFormat::default()).is_err());
        let p = write(&dir, "nan.csv", "1\nNaN\n");
        assert!(load_points(&p, PointFormat::default()).is_err());
        assert!(load_points(&dir.path().join("missing.csv"), PointFormat::default()).is_err());
    }

    #[test]
    fn generated_data_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let spec = SyntheticSpec { k: 3, n: 200, z: 4, dim: 3, side: 50.0, sigma: 1.3, min_cluster_frac: 0.2, seed: 3 };
        let (data, truth) = gen_synthetic(&spec).unwrap();
        let p = dir.path().join("syn.csv");
        save_points(&data, &p).unwrap();
        let back = load_points(&p, PointFormat::default()).unwrap();
        assert_eq!(back, data.clone().with_name("syn"));

        let meta = DatasetMetadata::new("synthetic", &spec, &truth).unwrap();
        let mp = dir.path().join("syn.json");
        write_metadata(&meta, &mp).unwrap();
        assert_eq!(read_metadata(&mp).unwrap(), meta);
        assert_eq!(meta.z, 4);
    }
}
