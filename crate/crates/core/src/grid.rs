use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Evenly spaced points from `start` to `stop` inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Linspace {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Linspace {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::param("grid", "count must be at least 1"));
        }
        if !start.is_finite() || !stop.is_finite() {
            return Err(Error::param("grid", "bounds must be finite"));
        }
        if count == 1 && start != stop {
            return Err(Error::param(
                "grid",
                "a single-point grid needs start == stop",
            ));
        }
        Ok(Self { start, stop, count })
    }

    pub fn single(value: f64) -> Self {
        Self {
            start: value,
            stop: value,
            count: 1,
        }
    }

    pub fn step(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.stop - self.start) / (self.count - 1) as f64
        }
    }

    pub fn at(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            // land exactly on the endpoint
            self.stop
        } else {
            self.start + i as f64 * self.step()
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.at(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_are_exact() {
        let g = Linspace::new(0.0, std::f64::consts::TAU, 201).unwrap();
        let v = g.values();
        assert_eq!(v.len(), 201);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[200], std::f64::consts::TAU);
        let sym = Linspace::new(-1.0, 1.0, 201).unwrap();
        assert_eq!(sym.at(100), 0.0);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Linspace::new(0.0, 1.0, 0).is_err());
        assert!(Linspace::new(0.0, 1.0, 1).is_err());
        assert!(Linspace::new(0.0, f64::NAN, 3).is_err());
        assert_eq!(Linspace::single(0.3).values(), vec![0.3]);
    }
}
