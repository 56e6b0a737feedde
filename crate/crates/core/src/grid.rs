use serde::{Deserialize, Serialize};

/// Uniformly spaced sample points `start + i * spacing`, `i < len`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    pub start: f64,
    pub spacing: f64,
    pub len: usize,
}

impl UniformGrid {
    pub fn new(start: f64, spacing: f64, len: usize) -> Self {
        Self { start, spacing, len }
    }

    /// `len` points covering `[lo, hi]` with both ends included.
    pub fn spanning(lo: f64, hi: f64, len: usize) -> Self {
        let spacing = if len > 1 { (hi - lo) / (len - 1) as f64 } else { 0.0 };
        Self::new(lo, spacing, len)
    }

    pub fn point(&self, i: usize) -> f64 {
        self.start + self.spacing * i as f64
    }

    pub fn end(&self) -> f64 {
        self.point(self.len.saturating_sub(1))
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(|i| self.point(i))
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.points().map(f).collect()
    }

    /// Same extent, twice the resolution.
    pub fn refined(&self) -> Self {
        Self::new(self.start, 0.5 * self.spacing, 2 * self.len - 1)
    }
}
