//! Run parameters shared by the global partitioner and the oracle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::separator::{Mode, SeparatorConfig};

/// Edge-density constant for planar graphs (`|E| ≤ 3|V|`).
pub const PLANAR_C1: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub epsilon: f64,
    pub d: usize,
    pub c1: f64,
    pub separator: SeparatorConfig,
    /// Number of contraction/breakup rounds.
    pub ell: usize,
    /// `ε / (3ℓ)`.
    pub gamma: f64,
    /// Breakup bound: components above it are split into parts of at most this size.
    pub k: usize,
    /// Bound on final part sizes.
    pub k_final: usize,
    /// Final parts above this size are split again; `k_final / 3` up to rounding.
    pub final_trigger: usize,
    pub seed: u64,
    pub mode: Mode,
}

/// Round count making `c1 · (1 − 1/(8c1))^{ℓ/(16c1−2)} ≤ ε/3`.
pub fn theory_rounds(c1: f64, epsilon: f64) -> usize {
    ((16.0 * c1 - 2.0) * 8.0 * c1 * (3.0 * c1 / epsilon).ln()).ceil().max(1.0) as usize
}

/// Default practical round count, `ceil(12 · log2(2/ε))`. A star-contraction
/// round removes roughly an eighth of the remaining weight on planar inputs.
pub fn practical_rounds(epsilon: f64) -> usize {
    (12.0 * (2.0 / epsilon).log2()).ceil().max(1.0) as usize
}

fn ceil_usize(x: f64) -> usize {
    if x.is_finite() && x >= 1.0 {
        x.ceil() as usize
    } else if x.is_finite() {
        1
    } else {
        usize::MAX
    }
}

/// Builds a [`RunConfig`] from ε, d and the mode, with optional overrides.
#[derive(Debug, Clone)]
pub struct RunConfigBuilder {
    epsilon: f64,
    d: usize,
    mode: Mode,
    seed: u64,
    ell: Option<usize>,
    k_cap: Option<usize>,
    c1: f64,
    separator: Option<SeparatorConfig>,
}

impl RunConfigBuilder {
    pub fn mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn ell(mut self, ell: usize) -> Self {
        self.ell = Some(ell);
        self
    }

    /// Practical-mode cap on the breakup bound `k`; also caps the final part sizes.
    pub fn k_cap(mut self, k_cap: usize) -> Self {
        self.k_cap = Some(k_cap);
        self
    }

    pub fn c1(mut self, c1: f64) -> Self {
        self.c1 = c1;
        self
    }

    pub fn separator(mut self, cfg: SeparatorConfig) -> Self {
        self.separator = Some(cfg);
        self
    }

    pub fn build(self) -> Result<RunConfig> {
        let RunConfigBuilder { epsilon, d, mode, seed, ell, k_cap, c1, separator } = self;
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::Config(format!("epsilon must lie in (0, 1], got {epsilon}")));
        }
        if k_cap == Some(0) {
            return Err(Error::Config("k cap must be at least 1".into()));
        }
        if c1.is_nan() || c1 <= 0.125 {
            return Err(Error::Config(format!("c1 must exceed 1/8, got {c1}")));
        }
        let ell = ell.unwrap_or_else(|| match mode {
            Mode::Theory => theory_rounds(c1, epsilon),
            Mode::Practical => practical_rounds(epsilon),
        });
        if ell == 0 {
            return Err(Error::Config("at least one round is required".into()));
        }
        let mut separator = separator.unwrap_or_else(|| match mode {
            Mode::Theory => SeparatorConfig::theory(5, 1.0),
            Mode::Practical => SeparatorConfig::planar_practical(k_cap),
        });
        separator.mode = mode;
        if mode == Mode::Practical && k_cap.is_some() {
            separator.size_cap = k_cap;
        }
        separator.validate()?;

        let gamma = epsilon / (3.0 * ell as f64);
        let k = separator.part_bound(gamma, d);
        let scale = separator.c2 * (d.max(1) as f64).powi(2) / (epsilon * epsilon);
        let (final_trigger, k_final) = match mode {
            Mode::Theory => (ceil_usize(scale), ceil_usize(3.0 * scale)),
            Mode::Practical => match k_cap {
                Some(cap) => (ceil_usize(scale).min(cap), ceil_usize(3.0 * scale).min(3 * cap)),
                None => (ceil_usize(scale), ceil_usize(3.0 * scale)),
            },
        };
        let cfg = RunConfig { epsilon, d, c1, separator, ell, gamma, k, k_final, final_trigger, seed, mode };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl RunConfig {
    pub fn builder(epsilon: f64, d: usize) -> RunConfigBuilder {
        RunConfigBuilder {
            epsilon,
            d,
            mode: Mode::Practical,
            seed: 0,
            ell: None,
            k_cap: None,
            c1: PLANAR_C1,
            separator: None,
        }
    }

    /// Practical constants with the default round count and no cap.
    pub fn practical(epsilon: f64, d: usize, seed: u64) -> Result<Self> {
        Self::builder(epsilon, d).seed(seed).build()
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        RunConfig { seed, ..self.clone() }
    }

    /// Separator configuration for the final refinement: parts no larger than `final_trigger`.
    pub fn final_separator(&self) -> SeparatorConfig {
        SeparatorConfig { size_cap: Some(self.final_trigger), ..self.separator.clone() }
    }

    /// Checks the derived fields against ε, d and ℓ.
    pub fn validate(&self) -> Result<()> {
        let expected_gamma = self.epsilon / (3.0 * self.ell as f64);
        if self.ell == 0 || (self.gamma - expected_gamma).abs() > 1e-12 * expected_gamma {
            return Err(Error::Config(format!(
                "gamma {} differs from epsilon/(3*ell) = {expected_gamma}",
                self.gamma
            )));
        }
        self.separator.validate()?;
        if self.k == 0 || self.final_trigger == 0 || self.k_final < self.final_trigger {
            return Err(Error::Config(format!(
                "inconsistent size bounds k={} final_trigger={} k_final={}",
                self.k, self.final_trigger, self.k_final
            )));
        }
        if self.separator.part_bound(self.gamma, self.d) != self.k {
            return Err(Error::Config(format!(
                "k={} differs from the separator bound {}",
                self.k,
                self.separator.part_bound(self.gamma, self.d)
            )));
        }
        Ok(())
    }

    /// Threshold below which a round counts as successful: `(1 − 1/(8c1)) · w_before`.
    pub fn success_factor(&self) -> f64 {
        1.0 - 1.0 / (8.0 * self.c1)
    }
}
