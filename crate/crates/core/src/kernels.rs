//! Group kernels `m_G`, the convolution operator `K_{G,sigma}` and the
//! Fourier transforms of the 1-level densities.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::piecewise::PiecewiseFunction;

/// Symmetry type of a family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Group {
    SOeven,
    SOodd,
    Sp,
    O,
    U,
}

impl Group {
    /// Every group with a convolution kernel.
    pub const ORTHOSYMPLECTIC: [Group; 4] = [Group::SOeven, Group::SOodd, Group::Sp, Group::O];
    pub const ALL: [Group; 5] = [Group::SOeven, Group::SOodd, Group::Sp, Group::O, Group::U];

    pub fn name(self) -> &'static str {
        match self {
            Group::SOeven => "SOeven",
            Group::SOodd => "SOodd",
            Group::Sp => "Sp",
            Group::O => "O",
            Group::U => "U",
        }
    }

    pub fn kernel(self) -> Result<KernelSpec> {
        KernelSpec::for_group(self)
    }

    pub fn density(self) -> DensityFT {
        DensityFT::for_group(self)
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "soeven" => Ok(Group::SOeven),
            "soodd" => Ok(Group::SOodd),
            "sp" | "usp" => Ok(Group::Sp),
            "o" => Ok(Group::O),
            "u" => Ok(Group::U),
            _ => Err(Error::InvalidArgument(format!(
                "unknown group '{s}' (expected SOeven, SOodd, Sp, O or U)"
            ))),
        }
    }
}

/// `m_G(xi) = offset + indicator_coeff * I_[-1,1](xi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub offset: f64,
    pub indicator_coeff: f64,
}

impl KernelSpec {
    pub fn for_group(group: Group) -> Result<Self> {
        let (offset, indicator_coeff) = match group {
            Group::SOeven => (0.0, 0.5),
            Group::SOodd => (1.0, -0.5),
            Group::Sp => (0.0, -0.5),
            Group::O => (0.5, 0.0),
            Group::U => return Err(Error::UnsupportedGroup(group)),
        };
        Ok(Self { offset, indicator_coeff })
    }

    /// Coefficient of the whole-support integral in the interval equations.
    /// It multiplies `int_{-sigma}^{sigma} g`, which is twice the half-line
    /// integral used when the equations are written for even `g`.
    pub fn alpha1(&self) -> f64 {
        self.offset
    }

    /// Coefficient of the sliding-window integral; drives the delay ODEs.
    pub fn alpha2(&self) -> f64 {
        self.indicator_coeff
    }

    pub fn value(&self, xi: f64) -> f64 {
        self.offset + if xi.abs() <= 1.0 { self.indicator_coeff } else { 0.0 }
    }
}

/// `m_G(xi)`. The indicator is closed: `I(±1) = 1`.
pub fn kernel_value(group: Group, xi: f64) -> Result<f64> {
    Ok(group.kernel()?.value(xi))
}

/// `(K_{G,sigma} g)(x) = int_{-sigma}^{sigma} m_G(x - y) g(y) dy`, exactly.
pub fn apply_k(group: Group, sigma: f64, g: &PiecewiseFunction, x: f64) -> Result<f64> {
    let k = group.kernel()?;
    Ok(apply_k_with(&k, sigma, g, x))
}

pub(crate) fn apply_k_with(k: &KernelSpec, sigma: f64, g: &PiecewiseFunction, x: f64) -> f64 {
    let mut total = 0.0;
    if k.offset != 0.0 {
        total += k.offset * g.integrate(-sigma, sigma);
    }
    if k.indicator_coeff != 0.0 {
        let lo = (x - 1.0).max(-sigma);
        let hi = (x + 1.0).min(sigma);
        if lo < hi {
            total += k.indicator_coeff * g.integrate(lo, hi);
        }
    }
    total
}

/// `eta(u)`: 1 inside (-1, 1), 1/2 at |u| = 1, 0 beyond.
pub fn eta(u: f64) -> f64 {
    let a = u.abs();
    if a < 1.0 {
        1.0
    } else if a == 1.0 {
        0.5
    } else {
        0.0
    }
}

/// `W^_{1,G}(u) = delta_coeff * delta_0(u) + constant + eta_coeff * eta(u)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityFT {
    pub delta_coeff: f64,
    pub constant: f64,
    pub eta_coeff: f64,
}

impl DensityFT {
    pub fn for_group(group: Group) -> Self {
        let (constant, eta_coeff) = match group {
            Group::SOeven => (0.0, 0.5),
            Group::O => (0.5, 0.0),
            Group::SOodd => (1.0, -0.5),
            Group::Sp => (0.0, -0.5),
            Group::U => (0.0, 0.0),
        };
        Self { delta_coeff: 1.0, constant, eta_coeff }
    }

    pub fn regular(&self, u: f64) -> f64 {
        self.constant + self.eta_coeff * eta(u)
    }
}

pub fn density_delta(group: Group) -> f64 {
    group.density().delta_coeff
}

/// Non-distributional part of `W^_{1,G}(u)`.
pub fn density_regular(group: Group, u: f64) -> f64 {
    group.density().regular(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_values() {
        assert_eq!(kernel_value(Group::SOeven, 0.5).unwrap(), 0.5);
        assert_eq!(kernel_value(Group::Sp, 2.0).unwrap(), 0.0);
        assert_eq!(kernel_value(Group::SOodd, 0.5).unwrap(), 0.5);
        assert_eq!(kernel_value(Group::O, 7.3).unwrap(), 0.5);
        assert_eq!(kernel_value(Group::SOeven, 1.0).unwrap(), 0.5);
        assert_eq!(kernel_value(Group::SOodd, -1.0).unwrap(), 0.5);
        assert_eq!(kernel_value(Group::SOodd, 1.5).unwrap(), 1.0);
        assert_eq!(kernel_value(Group::U, 0.0), Err(Error::UnsupportedGroup(Group::U)));
    }

    #[test]
    fn kernels_are_even() {
        for g in Group::ORTHOSYMPLECTIC {
            for xi in [0.0, 0.3, 0.999, 1.0, 1.001, 2.5] {
                assert_eq!(kernel_value(g, xi).unwrap(), kernel_value(g, -xi).unwrap());
            }
        }
    }

    #[test]
    fn alpha_coefficients() {
        assert_eq!(Group::SOeven.kernel().unwrap().alpha2(), 0.5);
        assert_eq!(Group::Sp.kernel().unwrap().alpha2(), -0.5);
        assert_eq!(Group::SOodd.kernel().unwrap().alpha2(), -0.5);
        assert_eq!(Group::SOodd.kernel().unwrap().alpha1(), 1.0);
        assert_eq!(Group::Sp.kernel().unwrap().alpha1(), 0.0);
    }

    #[test]
    fn density_values() {
        assert_eq!(density_regular(Group::SOodd, 0.3), 0.5);
        assert_eq!(density_regular(Group::Sp, 1.0), -0.25);
        assert_eq!(density_regular(Group::U, 0.9), 0.0);
        assert_eq!(density_regular(Group::SOeven, 1.0), 0.25);
        assert_eq!(density_regular(Group::SOeven, 1.5), 0.0);
        assert_eq!(density_regular(Group::O, 40.0), 0.5);
        for g in Group::ALL {
            assert_eq!(density_delta(g), 1.0);
        }
    }

    #[test]
    fn orthogonal_densities_agree_below_one_and_o_is_the_mean() {
        for u in [-0.99, -0.5, 0.0, 0.2, 0.75] {
            let e = density_regular(Group::SOeven, u);
            assert_eq!(e, density_regular(Group::SOodd, u));
            assert_eq!(e, density_regular(Group::O, u));
        }
        for u in [-3.0, -1.0, -0.4, 0.0, 0.9, 1.0, 1.2, 2.0] {
            let mean = 0.5 * (density_regular(Group::SOeven, u) + density_regular(Group::SOodd, u));
            assert_eq!(density_regular(Group::O, u), mean);
        }
    }

    #[test]
    fn apply_k_on_constants() {
        let sigma = 1.2;
        let g = PiecewiseFunction::constant(1.0 / (1.0 + sigma), sigma).unwrap();
        for x in [-1.2, 0.0, 0.37, 1.2] {
            let v = apply_k(Group::O, sigma, &g, x).unwrap();
            assert!((v - 1.2 / 2.2).abs() < 1e-15);
        }
        let zero = PiecewiseFunction::zero(sigma).unwrap();
        for group in Group::ORTHOSYMPLECTIC {
            assert_eq!(apply_k(group, sigma, &zero, 0.4).unwrap(), 0.0);
        }
        // SO(even) window [x-1, x+1] clipped to [-1.2, 1.2] at x = 0.7: [-0.3, 1.2].
        let one = PiecewiseFunction::constant(1.0, sigma).unwrap();
        let v = apply_k(Group::SOeven, sigma, &one, 0.7).unwrap();
        assert!((v - 0.75).abs() < 1e-15);
        assert!(apply_k(Group::U, sigma, &one, 0.0).is_err());
    }

    #[test]
    fn group_names_parse() {
        for g in Group::ALL {
            assert_eq!(g.name().parse::<Group>().unwrap(), g);
        }
        assert_eq!("SO(even)".parse::<Group>().unwrap(), Group::SOeven);
        assert_eq!("so_odd".parse::<Group>().unwrap(), Group::SOodd);
        assert!("GL3".parse::<Group>().is_err());
    }
}
