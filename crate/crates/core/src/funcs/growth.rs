use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

const EXPONENT_TOL: f64 = 1e-12;

/// Asymptotic class of a positive sequence: `term(q) ≍ q^power · (log q)^log_power`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Growth {
    pub power: f64,
    pub log_power: f64,
}

impl Growth {
    pub const ONE: Growth = Growth { power: 0.0, log_power: 0.0 };

    pub const fn new(power: f64, log_power: f64) -> Self {
        Self { power, log_power }
    }

    pub fn q_pow(power: f64) -> Self {
        Self { power, log_power: 0.0 }
    }

    pub fn log_pow(log_power: f64) -> Self {
        Self { power: 0.0, log_power }
    }

    pub fn mul(self, other: Growth) -> Growth {
        Growth::new(self.power + other.power, self.log_power + other.log_power)
    }

    pub fn pow(self, s: f64) -> Growth {
        Growth::new(self.power * s, self.log_power * s)
    }

    /// Compares by power first (ties within 1e-12), then by log power.
    pub fn asymptotic_cmp(&self, other: &Growth) -> Ordering {
        if (self.power - other.power).abs() > EXPONENT_TOL {
            self.power.total_cmp(&other.power)
        } else if (self.log_power - other.log_power).abs() > EXPONENT_TOL {
            self.log_power.total_cmp(&other.log_power)
        } else {
            Ordering::Equal
        }
    }

    pub fn max(self, other: Growth) -> Growth {
        if self.asymptotic_cmp(&other) == Ordering::Less {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Growth) -> Growth {
        if self.asymptotic_cmp(&other) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    /// Bertrand rule: `∑ q^E (log q)^A` converges iff `E < −1`, or `E = −1`
    /// and `A < −1`.
    pub fn series_converges(&self) -> bool {
        if (self.power + 1.0).abs() > EXPONENT_TOL {
            self.power < -1.0
        } else {
            self.log_power < -1.0 - EXPONENT_TOL
        }
    }

    pub fn on_boundary(&self) -> bool {
        (self.power + 1.0).abs() <= EXPONENT_TOL
    }
}
