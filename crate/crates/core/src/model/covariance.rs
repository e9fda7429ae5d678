//! Banded covariance of a model restricted to the observation window.

/// `r_{s,t}` for `s, t ∈ [−n/2, n/2]`, stored by diagonal. Entries with
/// `|s − t|` beyond [`lag`](Self::lag) are zero (exactly for MA-type models,
/// below `1e-17` relative for the AR scheme).
#[derive(Debug, Clone, PartialEq)]
pub struct WindowCovariance {
    n: usize,
    diags: Vec<Vec<f64>>,
}

impl WindowCovariance {
    /// `diags[h][i] = r_{t_i + h, t_i}` with `t_i = i − n/2`.
    pub(crate) fn from_diagonals(n: usize, diags: Vec<Vec<f64>>) -> Self {
        debug_assert!(diags.iter().enumerate().all(|(h, d)| d.len() == n + 1 - h));
        Self { n, diags }
    }

    pub(crate) fn from_fn(n: usize, lag: usize, r: impl Fn(i64, i64) -> f64) -> Self {
        let half = (n / 2) as i64;
        let lag = lag.min(n);
        let diags = (0..=lag)
            .map(|h| {
                (0..=n - h)
                    .map(|i| {
                        let t = i as i64 - half;
                        r(t + h as i64, t)
                    })
                    .collect()
            })
            .collect();
        Self::from_diagonals(n, diags)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lag(&self) -> usize {
        self.diags.len() - 1
    }

    /// Diagonal `h`: `r_{t+h, t}` for `t = −n/2, …, n/2 − h`.
    pub fn diagonal(&self, h: usize) -> &[f64] {
        &self.diags[h]
    }

    pub fn get(&self, s: i64, t: i64) -> f64 {
        let half = (self.n / 2) as i64;
        let (s, t) = if s >= t { (s, t) } else { (t, s) };
        let h = (s - t) as usize;
        if h >= self.diags.len() || t < -half || s > half {
            return 0.0;
        }
        self.diags[h][(t + half) as usize]
    }
}
