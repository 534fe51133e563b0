use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vector;

/// A finite sample of the set `M` the monotonicity checks are taken against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AnchorDoc")]
pub struct AnchorSet {
    pub label: String,
    pub points: Vec<Vector>,
}

/// Accepts either `{"label": .., "points": [..]}` or a bare list of points.
#[derive(Deserialize)]
#[serde(untagged)]
enum AnchorDoc {
    Labeled {
        #[serde(default)]
        label: Option<String>,
        points: Vec<Vector>,
    },
    Bare(Vec<Vector>),
}

impl TryFrom<AnchorDoc> for AnchorSet {
    type Error = Error;

    fn try_from(doc: AnchorDoc) -> Result<Self> {
        match doc {
            AnchorDoc::Labeled { label, points } => AnchorSet::new(label.unwrap_or_else(|| "anchors".into()), points),
            AnchorDoc::Bare(points) => AnchorSet::new("anchors", points),
        }
    }
}

impl AnchorSet {
    pub fn new(label: impl Into<String>, points: Vec<Vector>) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyAnchorSet)?;
        let dim = first.dim();
        for p in &points {
            p.ensure_dim(dim)?;
        }
        Ok(AnchorSet { label: label.into(), points })
    }

    pub fn singleton(label: impl Into<String>, point: Vector) -> Self {
        AnchorSet { label: label.into(), points: vec![point] }
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Vector> {
        self.points.iter()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Dimension of the affine hull of the points, decided by the numerical
    /// rank of the differences `p_i − p_0` with relative pivot tolerance `tol`.
    pub fn affine_hull_dim(&self, tol: f64) -> usize {
        let base = &self.points[0];
        let mut rows: Vec<Vec<f64>> = self.points[1..].iter().map(|p| (p - base).into_inner()).collect();
        let scale = rows.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0;
        }
        let cols = self.dim();
        let mut rank = 0;
        for c in 0..cols {
            let Some(piv) = (rank..rows.len())
                .max_by(|&a, &b| rows[a][c].abs().total_cmp(&rows[b][c].abs()))
                .filter(|&r| rows[r][c].abs() > tol * scale)
            else {
                continue;
            };
            rows.swap(rank, piv);
            for r in rank + 1..rows.len() {
                let f = rows[r][c] / rows[rank][c];
                for j in c..cols {
                    rows[r][j] -= f * rows[rank][j];
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }
}

impl<'a> IntoIterator for &'a AnchorSet {
    type Item = &'a Vector;
    type IntoIter = std::slice::Iter<'a, Vector>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}
