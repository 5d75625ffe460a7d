//! Point containers shared by every module.
//!
//! Both [`Dataset`] and [`CenterSet`] store coordinates row-major in one flat
//! buffer; individual points are handed out as `&[f64]` slices.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single point in R^D with finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::input("a point needs at least one coordinate"));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::input(format!("non-finite coordinate {c}")));
        }
        Ok(Point(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Ground-truth label of a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Cluster(u32),
    Outlier,
}

impl Label {
    pub fn is_outlier(self) -> bool {
        matches!(self, Label::Outlier)
    }
}

/// Reserved label string for outliers in point files.
pub const OUTLIER_LABEL: &str = "OUTLIER";

fn check_flat(dim: usize, coords: &[f64]) -> Result<()> {
    if dim == 0 {
        return Err(Error::input("dimension must be at least 1"));
    }
    if !coords.len().is_multiple_of(dim) {
        return Err(Error::input(format!("{} coordinates do not split into rows of dimension {dim}", coords.len())));
    }
    if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
        return Err(Error::input(format!("non-finite coordinate {c}")));
    }
    Ok(())
}

/// The input point set P, with optional ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    dim: usize,
    coords: Vec<f64>,
    labels: Option<Vec<Label>>,
    /// Display names for `Label::Cluster(i)`, indexed by `i`.
    label_names: Vec<String>,
}

impl Dataset {
    pub fn from_flat(name: impl Into<String>, dim: usize, coords: Vec<f64>) -> Result<Self> {
        check_flat(dim, &coords)?;
        if coords.is_empty() {
            return Err(Error::input("a dataset needs at least one point"));
        }
        Ok(Dataset { name: name.into(), dim, coords, labels: None, label_names: Vec::new() })
    }

    pub fn from_rows<R: AsRef<[f64]>>(name: impl Into<String>, rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or_else(|| Error::input("a dataset needs at least one point"))?;
        let dim = first.as_ref().len();
        let mut coords = Vec::with_capacity(dim * rows.len());
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: row.len() });
            }
            coords.extend_from_slice(row);
        }
        Self::from_flat(name, dim, coords)
    }

    /// Convenience constructor for one-dimensional data.
    pub fn from_scalars(name: impl Into<String>, values: &[f64]) -> Result<Self> {
        Self::from_flat(name, 1, values.to_vec())
    }

    /// Attach ground-truth labels. Cluster names default to the cluster id.
    pub fn with_labels(mut self, labels: Vec<Label>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::input(format!("{} labels for {} points", labels.len(), self.len())));
        }
        let max_id = labels
            .iter()
            .filter_map(|l| match l {
                Label::Cluster(c) => Some(*c as usize + 1),
                Label::Outlier => None,
            })
            .max()
            .unwrap_or(0);
        while self.label_names.len() < max_id {
            self.label_names.push(self.label_names.len().to_string());
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_label_names(mut self, names: Vec<String>) -> Self {
        self.label_names = names;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn labels(&self) -> Option<&[Label]> {
        self.labels.as_deref()
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    pub fn label_name(&self, label: Label) -> String {
        match label {
            Label::Outlier => OUTLIER_LABEL.to_string(),
            Label::Cluster(c) => self.label_names.get(c as usize).cloned().unwrap_or_else(|| c.to_string()),
        }
    }

    /// Indices of points labeled `OUTLIER`; `None` without labels.
    pub fn outlier_indices(&self) -> Option<Vec<usize>> {
        self.labels.as_ref().map(|ls| ls.iter().enumerate().filter(|(_, l)| l.is_outlier()).map(|(i, _)| i).collect())
    }

    /// Gather the rows at `indices` (repeats allowed) into a new dataset.
    pub fn select(&self, indices: &[usize]) -> Result<Dataset> {
        if indices.is_empty() {
            return Err(Error::input("cannot select an empty subset"));
        }
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            if i >= self.len() {
                return Err(Error::input(format!("index {i} out of range")));
            }
            coords.extend_from_slice(self.point(i));
        }
        Ok(Dataset {
            name: self.name.clone(),
            dim: self.dim,
            coords,
            labels: self.labels.as_ref().map(|ls| indices.iter().map(|&i| ls[i]).collect()),
            label_names: self.label_names.clone(),
        })
    }

    pub(crate) fn push_labeled(&mut self, coords: &[f64], label: Label) {
        debug_assert_eq!(coords.len(), self.dim);
        self.coords.extend_from_slice(coords);
        if let Some(ls) = self.labels.as_mut() {
            ls.push(label);
        }
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim != dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: dim });
        }
        Ok(())
    }
}

/// An ordered, nonempty list of cluster centers (the set H).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterSet {
    dim: usize,
    coords: Vec<f64>,
}

impl CenterSet {
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        check_flat(dim, &coords)?;
        if coords.is_empty() {
            return Err(Error::input("a center set needs at least one center"));
        }
        Ok(CenterSet { dim, coords })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let ds = Dataset::from_rows("", rows)?;
        Ok(CenterSet { dim: ds.dim, coords: ds.coords })
    }

    /// Copy the points of `data` at `indices` as centers.
    pub fn from_indices(data: &Dataset, indices: &[usize]) -> Result<Self> {
        let sel = data.select(indices)?;
        Ok(CenterSet { dim: sel.dim, coords: sel.coords })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn center(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub(crate) fn center_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn centers(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn push(&mut self, center: &[f64]) -> Result<()> {
        if center.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: center.len() });
        }
        self.coords.extend_from_slice(center);
        Ok(())
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.centers().map(<[f64]>::to_vec).collect()
    }
}

/// Which outlier-trimmed objective is optimized or evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveKind {
    /// Maximum distance over the retained points.
    Center,
    /// Mean distance over the retained points.
    Median,
    /// Mean squared distance over the retained points.
    Means,
}

impl ObjectiveKind {
    /// Per-point cost from a squared distance.
    #[inline]
    pub fn cost_from_sq(self, sq: f64) -> f64 {
        match self {
            ObjectiveKind::Center | ObjectiveKind::Median => sq.sqrt(),
            ObjectiveKind::Means => sq,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ObjectiveKind::Center => "center",
            ObjectiveKind::Median => "median",
            ObjectiveKind::Means => "means",
        }
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ObjectiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "center" => Ok(ObjectiveKind::Center),
            "median" => Ok(ObjectiveKind::Median),
            "means" => Ok(ObjectiveKind::Means),
            other => Err(Error::input(format!("unknown objective '{other}'"))),
        }
    }
}

/// Per-point outcome of a clustering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Membership {
    Center(u32),
    Outlier,
}

impl Membership {
    pub fn center(self) -> Option<usize> {
        match self {
            Membership::Center(c) => Some(c as usize),
            Membership::Outlier => None,
        }
    }

    pub fn is_outlier(self) -> bool {
        matches!(self, Membership::Outlier)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringResult {
    pub centers: CenterSet,
    pub memberships: Vec<Membership>,
    pub outlier_count: usize,
    pub objective: f64,
    pub kind: ObjectiveKind,
}

impl ClusteringResult {
    pub fn outlier_indices(&self) -> Vec<usize> {
        self.memberships.iter().enumerate().filter(|(_, m)| m.is_outlier()).map(|(i, _)| i).collect()
    }
}
