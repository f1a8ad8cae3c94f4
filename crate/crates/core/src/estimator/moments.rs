use serde::{Deserialize, Serialize};

/// One-pass moments of a level pair `(upper, lower)` and their difference
/// `y = upper - lower`, for a single measure.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PairMoments {
    pub n: u64,
    pub mean_y: f64,
    pub m2_y: f64,
    pub mean_upper: f64,
    pub m2_upper: f64,
    pub mean_lower: f64,
    pub m2_lower: f64,
    /// Sum of co-deviations of upper and lower.
    pub c_ul: f64,
}

impl PairMoments {
    pub fn push(&mut self, upper: f64, lower: f64) {
        self.n += 1;
        let n = self.n as f64;
        let y = upper - lower;

        let dy = y - self.mean_y;
        self.mean_y += dy / n;
        self.m2_y += dy * (y - self.mean_y);

        let du = upper - self.mean_upper;
        self.mean_upper += du / n;
        self.m2_upper += du * (upper - self.mean_upper);

        let dl = lower - self.mean_lower;
        self.mean_lower += dl / n;
        self.m2_lower += dl * (lower - self.mean_lower);
        // du uses the old upper mean, (lower - new mean) the updated lower mean.
        self.c_ul += du * (lower - self.mean_lower);
    }

    pub fn merge(&mut self, other: &PairMoments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let na = self.n as f64;
        let nb = other.n as f64;
        let n = na + nb;
        let w = na * nb / n;

        let dy = other.mean_y - self.mean_y;
        let du = other.mean_upper - self.mean_upper;
        let dl = other.mean_lower - self.mean_lower;

        self.mean_y += dy * nb / n;
        self.m2_y += other.m2_y + dy * dy * w;
        self.mean_upper += du * nb / n;
        self.m2_upper += other.m2_upper + du * du * w;
        self.mean_lower += dl * nb / n;
        self.m2_lower += other.m2_lower + dl * dl * w;
        self.c_ul += other.c_ul + du * dl * w;
        self.n += other.n;
    }

    fn unbiased(&self, m2: f64) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (m2 / (self.n - 1) as f64).max(0.0)
        }
    }

    pub fn var_y(&self) -> f64 {
        self.unbiased(self.m2_y)
    }

    pub fn var_upper(&self) -> f64 {
        self.unbiased(self.m2_upper)
    }

    pub fn var_lower(&self) -> f64 {
        self.unbiased(self.m2_lower)
    }

    pub fn cov(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.c_ul / (self.n - 1) as f64
        }
    }
}

/// Snapshot of one level pair for one measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelStats {
    pub level: usize,
    pub n: u64,
    pub mean_y: f64,
    /// Unbiased; meaningful only for `n >= 2`.
    pub var_y: f64,
    pub mean_x_upper: f64,
    pub mean_x_lower: f64,
    pub var_x_upper: f64,
    pub var_x_lower: f64,
    /// Covariance of the lower and upper outcome within a pair.
    pub cov_pair: f64,
    /// Seconds per pair evaluation.
    pub tau: f64,
}

impl LevelStats {
    pub fn from_moments(level: usize, m: &PairMoments, tau: f64) -> Self {
        Self {
            level,
            n: m.n,
            mean_y: m.mean_y,
            var_y: m.var_y(),
            mean_x_upper: m.mean_upper,
            mean_x_lower: m.mean_lower,
            var_x_upper: m.var_upper(),
            var_x_lower: m.var_lower(),
            cov_pair: m.cov(),
            tau,
        }
    }

    pub fn has_variance(&self) -> bool {
        self.n >= 2
    }

    /// `var_lower + var_upper - 2 cov` minus the directly estimated `var_y`.
    pub fn identity_gap(&self) -> f64 {
        self.var_x_lower + self.var_x_upper - 2.0 * self.cov_pair - self.var_y
    }
}
