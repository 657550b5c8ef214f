//! Derived phase parameters and the tunable constants behind them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerators of the parameter formulas. Every field can be
/// overridden from the CLI with `--constants key=value`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Constants {
    /// Iterations per oracle loop are `iter_coeff · c · ln(1/ε)`.
    pub iter_coeff: f64,
    /// Structure size cap `Δ_h = size_coeff / (h ε)`.
    pub size_coeff: f64,
    /// Phases per scale `phase_coeff / (h ε)`.
    pub phase_coeff: f64,
    /// Pass-bundles per phase `pass_bundle_coeff / (h ε)`.
    pub pass_bundle_coeff: f64,
    /// On-hold threshold `limit_coeff / h + 1`.
    pub limit_coeff: f64,
    /// Label cap `ℓ_max = label_coeff / ε`.
    pub label_coeff: f64,
    /// Extra scales beyond `h = ε²/64` are never run; this shifts the last
    /// scale exponent (`2·log2(1/ε) + scale_shift`).
    pub scale_shift: u32,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            iter_coeff: 22.0,
            size_coeff: 36.0,
            phase_coeff: 144.0,
            pass_bundle_coeff: 72.0,
            limit_coeff: 6.0,
            label_coeff: 3.0,
            scale_shift: 6,
        }
    }
}

impl Constants {
    /// Applies `key=value` overrides separated by commas.
    pub fn apply_overrides(&mut self, spec: &str) -> Result<()> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value, got `{item}`")))?;
            let parse = |v: &str| -> Result<f64> {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad number `{v}` for `{key}`")))
            };
            match key.trim() {
                "iter_coeff" => self.iter_coeff = parse(value)?,
                "size_coeff" => self.size_coeff = parse(value)?,
                "phase_coeff" => self.phase_coeff = parse(value)?,
                "pass_bundle_coeff" => self.pass_bundle_coeff = parse(value)?,
                "limit_coeff" => self.limit_coeff = parse(value)?,
                "label_coeff" => self.label_coeff = parse(value)?,
                "scale_shift" => self.scale_shift = parse(value)? as u32,
                _ => return Err(Error::Config(format!("unknown constant `{key}`"))),
            }
        }
        Ok(())
    }
}

/// ε after normalization to a power of two.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Epsilon {
    /// `1/ε`, a power of two.
    pub inv: u64,
    pub log2_inv: u32,
}

impl Epsilon {
    /// Rejects ε outside `(0, 1/4]` and rounds `1/ε` up to a power of two.
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 0.25) || !epsilon.is_finite() {
            return Err(Error::InvalidEpsilon(epsilon));
        }
        let raw = (1.0 / epsilon).ceil() as u64;
        let inv = raw.next_power_of_two();
        if (inv as f64 - 1.0 / epsilon).abs() > 1e-9 {
            log::warn!("1/epsilon = {} is not a power of two; using epsilon = 1/{inv}", 1.0 / epsilon);
        }
        Ok(Epsilon {
            inv,
            log2_inv: inv.trailing_zeros(),
        })
    }

    pub fn value(self) -> f64 {
        1.0 / self.inv as f64
    }

    /// Scale exponents `j` with `h = 2^-j`, from `h = 1/2` down to `ε²/64`.
    pub fn scale_exponents(self, c: &Constants) -> std::ops::RangeInclusive<u32> {
        1..=(2 * self.log2_inv + c.scale_shift)
    }

    pub fn label_max(self, c: &Constants) -> u32 {
        (c.label_coeff * self.inv as f64).ceil() as u32
    }

    /// `⌈iter_coeff · c · ln(1/ε)⌉`.
    pub fn iterations(self, c: &Constants, approx: f64) -> usize {
        (c.iter_coeff * approx * (self.inv as f64).ln()).ceil().max(1.0) as usize
    }
}

/// Parameters of one phase at scale `h = 2^-scale_exp`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseParams {
    pub epsilon: Epsilon,
    pub scale_exp: u32,
    pub label_max: u32,
    pub limit_h: usize,
    pub tau_max: usize,
    pub delta_h: usize,
    pub phases: usize,
}

impl PhaseParams {
    pub fn new(epsilon: Epsilon, scale_exp: u32, c: &Constants) -> Self {
        let inv_h = (1u64 << scale_exp) as f64;
        let inv_he = inv_h * epsilon.inv as f64;
        PhaseParams {
            epsilon,
            scale_exp,
            label_max: epsilon.label_max(c),
            limit_h: (c.limit_coeff * inv_h + 1.0).ceil() as usize,
            tau_max: (c.pass_bundle_coeff * inv_he).ceil() as usize,
            delta_h: (c.size_coeff * inv_he).ceil() as usize,
            phases: (c.phase_coeff * inv_he).ceil() as usize,
        }
    }

    pub fn h(&self) -> f64 {
        1.0 / (1u64 << self.scale_exp) as f64
    }

    /// Initial label of every matched arc.
    pub fn unvisited_label(&self) -> u32 {
        self.label_max + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_epsilon_parameters() {
        let c = Constants::default();
        let e = Epsilon::new(0.25).unwrap();
        assert_eq!(e.label_max(&c), 12);
        assert_eq!(e.iterations(&c, 2.0), 61);
        let p = PhaseParams::new(e, 1, &c);
        assert_eq!(p.limit_h, 13);
        assert_eq!(p.tau_max, 576);
        assert_eq!(p.phases, 1152);
        assert_eq!(p.delta_h, 288);
        assert_eq!(e.scale_exponents(&c), 1..=10);
    }

    #[test]
    fn epsilon_normalization() {
        assert!(matches!(Epsilon::new(0.3), Err(Error::InvalidEpsilon(_))));
        assert!(matches!(Epsilon::new(0.0), Err(Error::InvalidEpsilon(_))));
        assert_eq!(Epsilon::new(0.2).unwrap().inv, 8);
        assert_eq!(Epsilon::new(0.125).unwrap().inv, 8);
    }

    #[test]
    fn overrides() {
        let mut c = Constants::default();
        c.apply_overrides("iter_coeff=10, size_coeff=40").unwrap();
        assert_eq!(c.iter_coeff, 10.0);
        assert_eq!(c.size_coeff, 40.0);
        assert!(c.apply_overrides("bogus=1").is_err());
    }
}
