//! Turbulence statistics from received intensity.

use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Scintillation index and the matching refractive-index structure constant.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AtmosStats {
    pub sigma_i2: f64,
    /// `C_n^2` in m^(-2/3).
    pub cn2: f64,
    pub wavelength_m: f64,
    pub path_length_m: f64,
}

impl AtmosStats {
    /// Statistics of "light on" intensity samples over a link of the given
    /// wavelength and length.
    pub fn from_intensities(
        intensities: impl IntoIterator<Item = f64>,
        wavelength_m: f64,
        path_length_m: f64,
    ) -> Result<Self> {
        let sigma_i2 = scintillation_index(intensities)?;
        Ok(AtmosStats {
            sigma_i2,
            cn2: cn2_from_rytov(sigma_i2, wavelength_m, path_length_m)?,
            wavelength_m,
            path_length_m,
        })
    }
}

/// `sigma_I^2 = E[I^2] / E[I]^2 - 1`, clamped at zero.
pub fn scintillation_index(intensities: impl IntoIterator<Item = f64>) -> Result<f64> {
    let (mut n, mut s1, mut s2) = (0usize, 0.0, 0.0);
    for i in intensities {
        n += 1;
        s1 += i;
        s2 += i * i;
    }
    if n == 0 {
        return Err(Error::EmptyInput("no intensity samples"));
    }
    let m1 = s1 / n as f64;
    if !(m1 > 0.0) {
        return Err(Error::param(
            "intensities",
            "mean intensity must be positive",
        ));
    }
    let m2 = s2 / n as f64;
    Ok((m2 / (m1 * m1) - 1.0).max(0.0))
}

/// Weak-turbulence spherical-wave Rytov relation
/// `sigma_I^2 = 0.5 C_n^2 k^(7/6) L^(11/6)` with `k = 2 pi / lambda`,
/// solved for `C_n^2`.
pub fn cn2_from_rytov(sigma_i2: f64, wavelength_m: f64, path_length_m: f64) -> Result<f64> {
    if !(sigma_i2 >= 0.0 && sigma_i2.is_finite()) {
        return Err(Error::param("sigma_i2", "must be finite and >= 0"));
    }
    if !(wavelength_m > 0.0 && wavelength_m.is_finite()) {
        return Err(Error::param("wavelength_m", "must be positive"));
    }
    if !(path_length_m > 0.0 && path_length_m.is_finite()) {
        return Err(Error::param("path_length_m", "must be positive"));
    }
    let k = 2.0 * PI / wavelength_m;
    Ok(sigma_i2 / (0.5 * k.powf(7.0 / 6.0) * path_length_m.powf(11.0 / 6.0)))
}
