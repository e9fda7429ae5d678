use crate::error::{invalid_arg, Result};

/// Real sample `X_t` on the centered window `t = −n/2, …, n/2` with `n` even.
///
/// Slot `i` of [`values`](Self::values) holds time `t = i − n/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
}

impl TimeSeries {
    /// Wraps `values` as a centered series. The length must be odd (`n + 1`
    /// with `n` even) and every value finite.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() % 2 == 0 {
            return invalid_arg(format!(
                "series length must be odd (n + 1 with n even), got {}",
                values.len()
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return invalid_arg(format!("non-finite sample at slot {i}"));
        }
        Ok(Self { values })
    }

    /// Builds a series of sample size `n` by evaluating `f(t)` for each `t`.
    pub fn from_fn(n: usize, f: impl Fn(i64) -> f64) -> Result<Self> {
        check_even(n)?;
        let half = (n / 2) as i64;
        Self::new((-half..=half).map(f).collect())
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::from_fn(n, |_| 0.0)
    }

    /// Sample size parameter `n` (the series holds `n + 1` values).
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn half_n(&self) -> i64 {
        (self.n() / 2) as i64
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value at time `t`, if inside the window.
    pub fn get(&self, t: i64) -> Option<f64> {
        let i = t + self.half_n();
        if i < 0 {
            return None;
        }
        self.values.get(i as usize).copied()
    }

    /// `(t, X_t)` pairs in increasing `t`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let half = self.half_n();
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (i as i64 - half, v))
    }
}

pub(crate) fn check_even(n: usize) -> Result<()> {
    if n % 2 != 0 {
        return invalid_arg(format!("sample size n must be even, got {n}"));
    }
    Ok(())
}
