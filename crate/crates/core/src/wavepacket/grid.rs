use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform sampling of the time axis, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t_min: f64,
    t_max: f64,
    n_points: usize,
}

impl TimeGrid {
    pub const DEFAULT_HALF_SPAN: f64 = 8.0;
    pub const DEFAULT_POINTS: usize = 4096;

    pub fn new(t_min: f64, t_max: f64, n_points: usize) -> Result<Self> {
        if !t_min.is_finite() || !t_max.is_finite() {
            return Err(Error::InvalidGrid("bounds must be finite".into()));
        }
        if t_min >= t_max {
            return Err(Error::InvalidGrid(format!(
                "t_min ({t_min}) must be below t_max ({t_max})"
            )));
        }
        if n_points < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {n_points}"
            )));
        }
        Ok(TimeGrid {
            t_min,
            t_max,
            n_points,
        })
    }

    /// `[-8, 8]` with 4096 points.
    pub fn canonical() -> Self {
        TimeGrid {
            t_min: -Self::DEFAULT_HALF_SPAN,
            t_max: Self::DEFAULT_HALF_SPAN,
            n_points: Self::DEFAULT_POINTS,
        }
    }

    /// A grid with `n_points` samples at `spacing`, centred on `center`.
    pub fn centered(center: f64, spacing: f64, n_points: usize) -> Result<Self> {
        if !(spacing > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {spacing}")));
        }
        let half = spacing * (n_points.saturating_sub(1)) as f64 / 2.0;
        Self::new(center - half, center + half, n_points)
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.t_max - self.t_min) / (self.n_points - 1) as f64
    }

    pub fn span(&self) -> f64 {
        self.t_max - self.t_min
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        self.t_min + i as f64 * self.spacing()
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        let h = self.spacing();
        (0..self.n_points).map(move |i| self.t_min + i as f64 * h)
    }

    /// Trapezoid weights (spacing times 1, or 1/2 at the ends).
    pub fn trapezoid_weight(&self, i: usize) -> f64 {
        let h = self.spacing();
        if i == 0 || i + 1 == self.n_points {
            0.5 * h
        } else {
            h
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.t_min && t <= self.t_max
    }

    /// Same bounds and point count up to a relative tolerance of 1e-12.
    pub fn compatible_with(&self, other: &TimeGrid) -> bool {
        let tol = 1e-12 * self.span().max(other.span());
        self.n_points == other.n_points
            && (self.t_min - other.t_min).abs() <= tol
            && (self.t_max - other.t_max).abs() <= tol
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self::canonical()
    }
}
