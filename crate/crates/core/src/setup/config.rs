use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockSpace, GaussianMeterSpec, SqueezedStateSpec};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PostselectMode {
    /// Single photon in the dark port, |ψ_f⟩ = (|1,0⟩ − i|0,1⟩)/√2.
    #[default]
    Ideal,
    /// Threshold detector on the dark port: at least one photon.
    Threshold,
}

impl PostselectMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            PostselectMode::Ideal => "ideal",
            PostselectMode::Threshold => "threshold",
        }
    }
}

impl std::str::FromStr for PostselectMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(PostselectMode::Ideal),
            "threshold" => Ok(PostselectMode::Threshold),
            other => Err(Error::invalid(format!("unknown postselection mode '{other}'"))),
        }
    }
}

/// Parameters of the biased-interferometer experiment.
///
/// The meter cutoff actually used is `cutoff_d` scaled by the meter's squeeze
/// magnification, see [`SetupConfig::meter_cutoff`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SetupConfig {
    pub alpha_re: f64,
    pub alpha_im: f64,
    /// Beamsplitter bias, 0 < ε < 1.
    pub epsilon: f64,
    pub g: f64,
    pub phi: f64,
    pub meter_dq: f64,
    pub meter_q0: f64,
    pub meter_p0: f64,
    /// Rotation of the meter's squeezing ellipse; nonzero gives q–p covariance.
    pub meter_angle: f64,
    pub postselect: PostselectMode,
    /// Detector efficiency in (0, 1].
    pub eta: f64,
    pub cutoff_s_prime: usize,
    pub cutoff_s: usize,
    pub cutoff_d: usize,
    pub n_readouts: u64,
}

impl Default for SetupConfig {
    fn default() -> Self {
        SetupConfig {
            alpha_re: 0.1,
            alpha_im: 0.0,
            epsilon: 0.01,
            g: 1e-6,
            phi: 0.0,
            meter_dq: FRAC_1_SQRT_2,
            meter_q0: 0.0,
            meter_p0: 0.0,
            meter_angle: 0.0,
            postselect: PostselectMode::Ideal,
            eta: 1.0,
            cutoff_s_prime: 8,
            cutoff_s: 8,
            cutoff_d: 24,
            n_readouts: 1,
        }
    }
}

impl SetupConfig {
    pub fn alpha(&self) -> C64 {
        C64::new(self.alpha_re, self.alpha_im)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("alpha_re", self.alpha_re),
            ("alpha_im", self.alpha_im),
            ("g", self.g),
            ("phi", self.phi),
            ("meter_q0", self.meter_q0),
            ("meter_p0", self.meter_p0),
            ("meter_angle", self.meter_angle),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be finite")));
            }
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::invalid(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if self.g < 0.0 {
            return Err(Error::invalid(format!("g must be non-negative, got {}", self.g)));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::invalid(format!("eta must lie in (0, 1], got {}", self.eta)));
        }
        if self.n_readouts == 0 {
            return Err(Error::invalid("n_readouts must be positive"));
        }
        for (name, n) in [("cutoff_s_prime", self.cutoff_s_prime), ("cutoff_s", self.cutoff_s), ("cutoff_d", self.cutoff_d)] {
            if n < 2 {
                return Err(Error::invalid(format!("{name} must be at least 2, got {n}")));
            }
        }
        self.meter().validate()
    }

    pub fn meter(&self) -> GaussianMeterSpec {
        GaussianMeterSpec { q0: self.meter_q0, p0: self.meter_p0, dq: self.meter_dq }
    }

    pub fn meter_squeezed(&self) -> SqueezedStateSpec {
        SqueezedStateSpec { squeeze_angle: self.meter_angle, ..self.meter().to_squeezed() }
    }

    /// `cutoff_d` × e^{2|r|}, rounded up (ignoring rounding noise in r).
    pub fn meter_cutoff(&self) -> usize {
        (self.cutoff_d as f64 * self.meter_squeezed().squeeze_factor() - 1e-9).ceil() as usize
    }

    pub fn system_modes(&self) -> Result<(FockSpace, FockSpace)> {
        Ok((FockSpace::new(self.cutoff_s_prime)?, FockSpace::new(self.cutoff_s)?))
    }

    pub fn meter_space(&self) -> Result<FockSpace> {
        FockSpace::new(self.meter_cutoff())
    }

    /// Whether the printed closed-form shifts apply: φ = 0 quadratures and an
    /// unrotated meter.
    pub fn closed_form_shifts_apply(&self) -> bool {
        self.phi == 0.0 && self.meter_angle == 0.0
    }
}
