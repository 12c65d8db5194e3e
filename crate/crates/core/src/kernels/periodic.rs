use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::unit_point::UnitPoint;
use crate::error::{param, Result};

/// Trigonometric polynomial without constant term:
/// `g(y) = sum_j cos[j-1] * cos(2 pi j y) + sin[j-1] * sin(2 pi j y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl TrigPoly {
    pub fn new(cos: Vec<f64>, sin: Vec<f64>) -> Result<Self> {
        if cos.iter().chain(&sin).any(|c| !c.is_finite()) {
            return param("trigonometric coefficients must be finite");
        }
        if cos.is_empty() && sin.is_empty() {
            return param("trigonometric polynomial needs at least one coefficient");
        }
        Ok(Self { cos, sin })
    }

    /// `cos(2 pi * frequency * y)`.
    pub fn cosine(frequency: usize) -> Self {
        assert!(frequency >= 1, "frequency must be positive");
        let mut cos = vec![0.0; frequency];
        cos[frequency - 1] = 1.0;
        Self { cos, sin: Vec::new() }
    }

    /// `sin(2 pi * frequency * y)`.
    pub fn sine(frequency: usize) -> Self {
        assert!(frequency >= 1, "frequency must be positive");
        let mut sin = vec![0.0; frequency];
        sin[frequency - 1] = 1.0;
        Self { cos: Vec::new(), sin }
    }

    /// Highest frequency `d`.
    pub fn degree(&self) -> usize {
        self.cos.len().max(self.sin.len())
    }

    /// Cosine coefficient of frequency `j` (1-based).
    pub fn cos_coeff(&self, j: usize) -> f64 {
        self.cos.get(j - 1).copied().unwrap_or(0.0)
    }

    pub fn sin_coeff(&self, j: usize) -> f64 {
        self.sin.get(j - 1).copied().unwrap_or(0.0)
    }

    /// True when every sine coefficient vanishes.
    pub fn is_even(&self) -> bool {
        self.sin.iter().all(|&b| b == 0.0)
    }

    pub fn eval(&self, y: UnitPoint) -> f64 {
        let mut acc = 0.0;
        for j in 1..=self.degree() {
            let (a, b) = (self.cos_coeff(j), self.sin_coeff(j));
            let z = y.times(j as u64);
            if a != 0.0 {
                acc += a * z.cos_turn();
            }
            if b != 0.0 {
                acc += b * z.sin_turn();
            }
        }
        acc
    }

    /// `2 pi sum_j j (|a_j| + |b_j|)`, an upper bound for the total variation.
    pub fn variation_bound(&self) -> f64 {
        TAU * (1..=self.degree())
            .map(|j| j as f64 * (self.cos_coeff(j).abs() + self.sin_coeff(j).abs()))
            .sum::<f64>()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.cos.iter().chain(&self.sin).map(|c| c * c).sum::<f64>() / 2.0
    }
}

/// `1_[left, right](<y>) - (right - left)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CenteredIndicator {
    left: f64,
    right: f64,
}

impl CenteredIndicator {
    pub fn new(left: f64, right: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&left) || !(right > left && right <= 1.0) {
            return param(format!(
                "indicator interval [{left}, {right}] must satisfy 0 <= left < right <= 1"
            ));
        }
        Ok(Self { left, right })
    }

    /// `[s 2^-level, s 2^-level + width]` with `0 < width <= 2^-level`.
    pub fn dyadic(s: u64, level: u32, width: f64) -> Result<Self> {
        if level == 0 || level > 52 || s >= 1 << level {
            return param(format!("dyadic cell {s} at level {level} out of range"));
        }
        let cell = (level as f64).exp2().recip();
        if !(width > 0.0 && width <= cell) {
            return param(format!("dyadic width {width} must lie in (0, {cell}]"));
        }
        Self::new(s as f64 * cell, s as f64 * cell + width)
    }

    pub fn left(&self) -> f64 {
        self.left
    }

    pub fn right(&self) -> f64 {
        self.right
    }

    pub fn measure(&self) -> f64 {
        self.right - self.left
    }

    pub fn contains(&self, y: UnitPoint) -> bool {
        let bits = y.bits();
        let lo = UnitPoint::from_f64(self.left).bits();
        bits >= lo && (self.right >= 1.0 || bits <= UnitPoint::from_f64(self.right).bits())
    }

    pub fn eval(&self, y: UnitPoint) -> f64 {
        let inside = if self.contains(y) { 1.0 } else { 0.0 };
        inside - self.measure()
    }

    pub fn variation(&self) -> f64 {
        if self.left == 0.0 && self.right >= 1.0 {
            0.0
        } else {
            2.0
        }
    }

    pub fn l2_norm_sq(&self) -> f64 {
        let m = self.measure();
        m * (1.0 - m)
    }
}

/// A 1-periodic, mean-zero function of bounded variation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeriodicFunction {
    Trig(TrigPoly),
    Indicator(CenteredIndicator),
}

impl PeriodicFunction {
    pub fn eval(&self, y: UnitPoint) -> f64 {
        match self {
            Self::Trig(g) => g.eval(y),
            Self::Indicator(i) => i.eval(y),
        }
    }

    /// Total variation on `[0, 1]`: exact for indicators, the coefficient
    /// bound for trigonometric polynomials.
    pub fn variation_bound(&self) -> f64 {
        match self {
            Self::Trig(g) => g.variation_bound(),
            Self::Indicator(i) => i.variation(),
        }
    }

    pub fn l2_norm(&self) -> f64 {
        match self {
            Self::Trig(g) => g.l2_norm_sq(),
            Self::Indicator(i) => i.l2_norm_sq(),
        }
        .sqrt()
    }
}

impl From<TrigPoly> for PeriodicFunction {
    fn from(g: TrigPoly) -> Self {
        Self::Trig(g)
    }
}

impl From<CenteredIndicator> for PeriodicFunction {
    fn from(i: CenteredIndicator) -> Self {
        Self::Indicator(i)
    }
}

impl fmt::Display for PeriodicFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Trig(g) => {
                let mut first = true;
                for j in 1..=g.degree() {
                    for (c, name) in [(g.cos_coeff(j), "cos"), (g.sin_coeff(j), "sin")] {
                        if c != 0.0 {
                            if !first {
                                write!(f, "+")?;
                            }
                            first = false;
                            write!(f, "{c}*{name}(2pi*{j}x)")?;
                        }
                    }
                }
                if first {
                    write!(f, "0")?;
                }
                Ok(())
            }
            Self::Indicator(i) => write!(f, "I[{},{}]", i.left, i.right),
        }
    }
}

/// `f(<y>)`.
pub fn eval_periodic(f: &PeriodicFunction, y: UnitPoint) -> f64 {
    f.eval(y)
}
