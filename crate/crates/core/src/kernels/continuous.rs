use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContinuousFamily {
    /// Standard Brownian motion on the line.
    Gaussian,
    /// Brownian motion on `[0, ∞)` reflected at the origin.
    ReflectedGaussian,
}

/// Transition density of a diffusion at a fixed horizon, with its CDF and
/// derivatives with respect to the source point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousKernel {
    family: ContinuousFamily,
    horizon: f64,
    sqrt_horizon: f64,
}

impl ContinuousKernel {
    pub fn gaussian(horizon: f64) -> Result<Self> {
        Self::new(ContinuousFamily::Gaussian, horizon)
    }

    pub fn reflected_gaussian(horizon: f64) -> Result<Self> {
        Self::new(ContinuousFamily::ReflectedGaussian, horizon)
    }

    pub fn new(family: ContinuousFamily, horizon: f64) -> Result<Self> {
        if horizon < 0.0 {
            return Err(Error::NegativeTime(horizon));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "continuous kernels need a positive finite horizon, got {horizon}"
            )));
        }
        Ok(Self { family, horizon, sqrt_horizon: horizon.sqrt() })
    }

    pub fn family(&self) -> ContinuousFamily {
        self.family
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Heat kernel `exp(-z^2 / 2T) / sqrt(2 pi T)`.
    fn heat(&self, z: f64) -> f64 {
        let u = z / self.sqrt_horizon;
        INV_SQRT_2PI / self.sqrt_horizon * (-0.5 * u * u).exp()
    }

    fn check(&self, x: f64, y: f64) -> Result<()> {
        if !(x.is_finite() && y.is_finite()) {
            return Err(Error::Domain(format!("non-finite point ({x}, {y})")));
        }
        if self.family == ContinuousFamily::ReflectedGaussian && (x < 0.0 || y < 0.0) {
            return Err(Error::Domain(format!("half-line kernel evaluated at ({x}, {y})")));
        }
        Ok(())
    }

    /// `p_x(y)`.
    pub fn density(&self, x: f64, y: f64) -> Result<f64> {
        self.check(x, y)?;
        Ok(match self.family {
            ContinuousFamily::Gaussian => self.heat(y - x),
            ContinuousFamily::ReflectedGaussian => self.heat(y - x) + self.heat(y + x),
        })
    }

    /// `F_x(y)`.
    pub fn cdf(&self, x: f64, y: f64) -> Result<f64> {
        self.check(x, y)?;
        let s = self.sqrt_horizon;
        Ok(match self.family {
            ContinuousFamily::Gaussian => normal_cdf((y - x) / s),
            // Phi((y-x)/s) + Phi((y+x)/s) - 1 = Phi((x+y)/s) - Phi((x-y)/s)
            ContinuousFamily::ReflectedGaussian => normal_interval((x - y) / s, (x + y) / s),
        })
    }

    /// `1 - F_x(y)`, evaluated without cancellation in the upper tail.
    pub fn survival(&self, x: f64, y: f64) -> Result<f64> {
        self.check(x, y)?;
        let s = self.sqrt_horizon;
        Ok(match self.family {
            ContinuousFamily::Gaussian => normal_cdf((x - y) / s),
            ContinuousFamily::ReflectedGaussian => normal_cdf((x - y) / s) + normal_cdf(-(x + y) / s),
        })
    }

    /// `∂_x p_x(y)`.
    pub fn d_source_density(&self, x: f64, y: f64) -> Result<f64> {
        self.check(x, y)?;
        let t = self.horizon;
        Ok(match self.family {
            ContinuousFamily::Gaussian => self.heat(y - x) * (y - x) / t,
            ContinuousFamily::ReflectedGaussian => {
                self.heat(y - x) * (y - x) / t - self.heat(y + x) * (y + x) / t
            }
        })
    }

    /// `∂_x F_x(y)`.
    pub fn d_source_cdf(&self, x: f64, y: f64) -> Result<f64> {
        self.check(x, y)?;
        Ok(match self.family {
            ContinuousFamily::Gaussian => -self.heat(y - x),
            ContinuousFamily::ReflectedGaussian => -self.heat(y - x) + self.heat(y + x),
        })
    }
}

/// Standard normal density.
pub fn normal_pdf(z: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * z * z).exp()
}

/// Standard normal CDF, accurate in both tails.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * std::f64::consts::FRAC_1_SQRT_2)
}

/// `Phi(b) - Phi(a)` for `a <= b`, choosing the tail that avoids cancellation.
pub fn normal_interval(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        normal_cdf(-a) - normal_cdf(-b)
    } else if b <= 0.0 {
        normal_cdf(b) - normal_cdf(a)
    } else {
        1.0 - normal_cdf(a) - normal_cdf(-b)
    }
}
