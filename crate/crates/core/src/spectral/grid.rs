use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Uniform periodic grid of `2N` points `x_j = j L / 2N`, `j = -N..N-1`.
///
/// Samples are stored in ascending order starting at `x = -L/2`; spectral
/// coefficients are stored in FFT order (mode `n` at index `n mod 2N`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRecord", into = "GridRecord")]
pub struct Grid {
    length: f64,
    half: usize,
}

#[derive(Serialize, Deserialize)]
struct GridRecord {
    length: f64,
    points: usize,
}

impl TryFrom<GridRecord> for Grid {
    type Error = crate::Error;
    fn try_from(r: GridRecord) -> Result<Self> {
        Grid::new(r.length, r.points)
    }
}

impl From<Grid> for GridRecord {
    fn from(g: Grid) -> Self {
        GridRecord {
            length: g.length,
            points: g.points(),
        }
    }
}

impl Grid {
    /// Grid with `points = 2N` samples over the period `length`.
    pub fn new(length: f64, points: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(invalid(
                "L",
                format!("period must be positive, got {length}"),
            ));
        }
        if points < 2 || !points.is_power_of_two() {
            return Err(invalid(
                "2N",
                format!("point count must be a power of two >= 2, got {points}"),
            ));
        }
        Ok(Grid {
            length,
            half: points / 2,
        })
    }

    pub fn with_half_count(length: f64, half: usize) -> Result<Self> {
        Self::new(length, 2 * half)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// `N`.
    pub fn half_count(&self) -> usize {
        self.half
    }

    /// `2N`.
    pub fn points(&self) -> usize {
        2 * self.half
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.points() as f64
    }

    /// Position of storage index `i` (`j = i - N`).
    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - self.half as f64) * self.spacing()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.points()).map(|i| self.x(i)).collect()
    }

    /// Signed mode number of FFT-ordered index `idx`, in `-N..N-1`.
    pub fn mode(&self, idx: usize) -> i64 {
        let m = self.points() as i64;
        let i = idx as i64;
        if i < self.half as i64 {
            i
        } else {
            i - m
        }
    }

    /// FFT-ordered index of mode `n`.
    pub fn index(&self, n: i64) -> usize {
        n.rem_euclid(self.points() as i64) as usize
    }

    /// Wavenumber `k_n = 2 pi n / L` at FFT-ordered index `idx`.
    pub fn wavenumber(&self, idx: usize) -> f64 {
        2.0 * std::f64::consts::PI * self.mode(idx) as f64 / self.length
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.points()).map(|i| self.wavenumber(i)).collect()
    }

    /// FFT-ordered index of the unpaired mode `n = -N`.
    pub fn nyquist_index(&self) -> usize {
        self.half
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(10.0, 12).is_err());
        assert!(Grid::new(0.0, 16).is_err());
        assert!(Grid::new(-1.0, 16).is_err());
        assert!(Grid::new(f64::NAN, 16).is_err());
    }

    #[test]
    fn nodes_and_modes() {
        let g = Grid::new(8.0, 8).unwrap();
        assert_eq!(g.x(0), -4.0);
        assert_eq!(g.x(7), 3.0);
        assert_eq!(g.mode(3), 3);
        assert_eq!(g.mode(4), -4);
        assert_eq!(g.index(-1), 7);
        assert_eq!(g.index(g.mode(5)), 5);
    }

    #[test]
    fn serde_round_trip() {
        let g = Grid::new(200.0, 1024).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"length":200.0,"points":1024}"#);
        let back: Grid = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<Grid>(r#"{"length":1.0,"points":6}"#).is_err());
    }
}
