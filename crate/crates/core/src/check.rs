//! Recorded statistical and exactness assertions.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    Absolute(f64),
    Relative(f64),
    /// `|observed − expected| ≤ k σ`.
    Sigma { k: f64, sigma: f64 },
}

/// One check with its observed value, expectation and the tolerance kind.
#[derive(Debug, Clone, PartialEq)]
pub struct StatCheck {
    pub name: String,
    pub observed: f64,
    pub expected: f64,
    pub tolerance: Tolerance,
    pub samples: Option<u64>,
}

impl StatCheck {
    pub fn new(name: impl Into<String>, observed: f64, expected: f64, tolerance: Tolerance) -> Self {
        Self {
            name: name.into(),
            observed,
            expected,
            tolerance,
            samples: None,
        }
    }

    pub fn with_samples(mut self, n: u64) -> Self {
        self.samples = Some(n);
        self
    }

    pub fn passed(&self) -> bool {
        let d = (self.observed - self.expected).abs();
        match self.tolerance {
            Tolerance::Absolute(t) => d <= t,
            Tolerance::Relative(t) => d <= t * self.expected.abs(),
            Tolerance::Sigma { k, sigma } => d <= k * sigma,
        }
    }
}

impl fmt::Display for StatCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tol = match self.tolerance {
            Tolerance::Absolute(t) => format!("abs {t:e}"),
            Tolerance::Relative(t) => format!("rel {t:e}"),
            Tolerance::Sigma { k, sigma } => format!("{k} sigma (sigma = {sigma:e})"),
        };
        write!(
            f,
            "{} {}: observed {:.6e}, expected {:.6e}, {}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.observed,
            self.expected,
            tol
        )?;
        if let Some(n) = self.samples {
            write!(f, ", n = {n}")?;
        }
        Ok(())
    }
}
