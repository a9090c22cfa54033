//! Coordinate charts.
//!
//! A chart is a named, ordered list of coordinate labels. All geometric
//! objects (fields, forms, maps) are expressed pointwise in a chart; chart
//! identity is checked by name and dimension before any two objects are
//! combined.

use crate::error::{Error, Result};
use std::sync::Arc;

/// Pairing between configuration slots and their conjugate-momentum slots in
/// a cotangent-type chart, e.g. `(t, p)` and `(qⁱ, pᵢ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CotangentPairs {
    pairs: Vec<(usize, usize)>,
}

impl CotangentPairs {
    pub fn new(pairs: Vec<(usize, usize)>) -> Self {
        CotangentPairs { pairs }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Extract the configuration part of a point, in pair order.
    pub fn config_point<S: Copy>(&self, x: &[S]) -> Vec<S> {
        self.pairs.iter().map(|&(b, _)| x[b]).collect()
    }
}

#[derive(Debug)]
struct ChartInner {
    name: String,
    coords: Vec<String>,
    cotangent: Option<CotangentPairs>,
}

/// A named coordinate chart. Cheap to clone (shared immutable data).
#[derive(Clone, Debug)]
pub struct Chart {
    inner: Arc<ChartInner>,
}

impl Chart {
    pub fn new(name: &str, coords: &[&str]) -> Result<Chart> {
        Self::build(name, coords, None)
    }

    /// A chart of cotangent type: `pairs` lists `(config_slot, fiber_slot)`
    /// index pairs, e.g. `(t, p)` first, then each `(qⁱ, pᵢ)`.
    pub fn cotangent(name: &str, coords: &[&str], pairs: Vec<(usize, usize)>) -> Result<Chart> {
        Self::build(name, coords, Some(CotangentPairs::new(pairs)))
    }

    fn build(name: &str, coords: &[&str], cotangent: Option<CotangentPairs>) -> Result<Chart> {
        let mut seen = std::collections::BTreeSet::new();
        for c in coords {
            if !seen.insert(*c) {
                return Err(Error::Chart {
                    chart: name.to_string(),
                    msg: format!("duplicate coordinate name '{c}'"),
                });
            }
        }
        if let Some(ct) = &cotangent {
            let mut used = std::collections::BTreeSet::new();
            for &(b, f) in ct.pairs() {
                if b >= coords.len() || f >= coords.len() {
                    return Err(Error::Chart {
                        chart: name.to_string(),
                        msg: format!("cotangent pair ({b},{f}) out of range"),
                    });
                }
                if !used.insert(b) || !used.insert(f) {
                    return Err(Error::Chart {
                        chart: name.to_string(),
                        msg: format!("cotangent pair ({b},{f}) reuses a slot"),
                    });
                }
            }
        }
        Ok(Chart {
            inner: Arc::new(ChartInner {
                name: name.to_string(),
                coords: coords.iter().map(|s| s.to_string()).collect(),
                cotangent,
            }),
        })
    }

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    pub fn dim(&self) -> usize {
        self.inner.coords.len()
    }

    pub fn coords(&self) -> Vec<&str> {
        self.inner.coords.iter().map(|s| s.as_str()).collect()
    }

    pub fn coord(&self, i: usize) -> &str {
        &self.inner.coords[i]
    }

    pub fn index_of(&self, coord: &str) -> Option<usize> {
        self.inner.coords.iter().position(|c| c == coord)
    }

    pub fn cotangent_pairs(&self) -> Option<&CotangentPairs> {
        self.inner.cotangent.as_ref()
    }

    /// Two charts are interchangeable when name and coordinate list agree.
    pub fn same_as(&self, other: &Chart) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.name == other.inner.name && self.inner.coords == other.inner.coords)
    }

    /// Error unless `other` is the same chart.
    pub fn expect_same(&self, other: &Chart, context: &'static str) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::ChartMismatch {
                context,
                left: self.inner.name.clone(),
                right: other.inner.name.clone(),
            })
        }
    }

    /// Error unless a point has this chart's dimension.
    pub fn expect_point<S>(&self, x: &[S], context: &'static str) -> Result<()> {
        if x.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::Dimension {
                context,
                expected: self.dim(),
                got: x.len(),
            })
        }
    }
}
