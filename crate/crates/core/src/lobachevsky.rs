//! The Lobachevsky function `Λ(x) = -∫_0^x log|2 sin t| dt` and the volume
//! formulas built on it.
//!
//! `Λ` is odd and π-periodic. After reduction to `[0, π/2]` it is evaluated
//! from the expansion
//!
//! ```text
//! Λ(x) = x - x log(2x) + Σ_{k≥1} ζ(2k) / (k (2k+1)) · x (x/π)^{2k}
//! ```
//!
//! whose terms shrink at least like `4^{-k}` on the reduced range.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, PI};
use std::sync::OnceLock;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LobachevskyError {
    #[error("ideal tetrahedron angles ({0}, {1}, {2}) must be non-negative and sum to π")]
    BadAngles(f64, f64, f64),
    #[error("cross-ratio {0} is 0, 1 or infinite")]
    Degenerate(Complex64),
    #[error("orthoscheme angles ({0}, {1}, {2}) do not define a hyperbolic orthoscheme")]
    NotHyperbolic(f64, f64, f64),
}

/// An angle in radians.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Angle(f64);

impl Angle {
    pub fn radians(value: f64) -> Self {
        assert!(value.is_finite(), "angle must be finite");
        Angle(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<f64> for Angle {
    fn from(value: f64) -> Self {
        Angle::radians(value)
    }
}

const TERMS: usize = 32;

fn series_coefficients() -> &'static [f64; TERMS] {
    static COEFFS: OnceLock<[f64; TERMS]> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut c = [0.0; TERMS];
        for (i, slot) in c.iter_mut().enumerate() {
            let k = i + 1;
            let s = 2 * k as i32;
            let zeta = match k {
                1 => PI.powi(2) / 6.0,
                2 => PI.powi(4) / 90.0,
                3 => PI.powi(6) / 945.0,
                4 => PI.powi(8) / 9450.0,
                // n^{-10} and beyond: 64 terms leave a tail below 1e-17
                _ => (1..=64).rev().map(|n| (n as f64).powi(-s)).sum(),
            };
            *slot = zeta / (k as f64 * (2 * k + 1) as f64);
        }
        c
    })
}

/// `Λ` on `[0, π/2]`.
fn reduced(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let q = (x / PI) * (x / PI);
    let mut pow = x;
    let mut sum = 0.0;
    for c in series_coefficients() {
        pow *= q;
        sum += c * pow;
    }
    x - x * (2.0 * x).ln() + sum
}

/// Lobachevsky function `Λ(x)`.
pub fn lobachevsky(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    // reduce into [-π/2, π/2]; `round` is symmetric so oddness is exact
    let r = x - PI * (x / PI).round();
    if r < 0.0 {
        -reduced(-r)
    } else {
        reduced(r)
    }
}

/// Volume of the regular ideal octahedron, `8 Λ(π/4)`.
pub fn v8() -> f64 {
    8.0 * lobachevsky(FRAC_PI_4)
}

/// Volume of the regular ideal tetrahedron, `2 Λ(π/6)`.
pub fn v3() -> f64 {
    2.0 * lobachevsky(FRAC_PI_6)
}

/// Volume `Λ(α) + Λ(β) + Λ(γ)` of the ideal tetrahedron with dihedral angles
/// `α, β, γ` (opposite edges share angles).
pub fn ideal_tetrahedron_volume(
    alpha: impl Into<Angle>,
    beta: impl Into<Angle>,
    gamma: impl Into<Angle>,
) -> Result<f64, LobachevskyError> {
    let (a, b, c) = (alpha.into().0, beta.into().0, gamma.into().0);
    if a < 0.0 || b < 0.0 || c < 0.0 || (a + b + c - PI).abs() > 1e-9 {
        return Err(LobachevskyError::BadAngles(a, b, c));
    }
    Ok(lobachevsky(a) + lobachevsky(b) + lobachevsky(c))
}

/// Signed volume of the ideal tetrahedron with shape parameter `z`; the sign
/// is the sign of `Im z`. Real `z` gives a flat tetrahedron of volume 0.
pub fn cross_ratio_volume(z: Complex64) -> Result<f64, LobachevskyError> {
    let one = Complex64::new(1.0, 0.0);
    if !z.is_finite() || z == Complex64::new(0.0, 0.0) || z == one {
        return Err(LobachevskyError::Degenerate(z));
    }
    if z.im == 0.0 {
        return Ok(0.0);
    }
    let a = z.arg();
    let b = (one / (one - z)).arg();
    let c = ((z - one) / z).arg();
    Ok(lobachevsky(a) + lobachevsky(b) + lobachevsky(c))
}

/// Volume of the hyperbolic orthoscheme with essential dihedral angles
/// `α, β, γ` along its orthogonal edge path.
///
/// `α` and `γ` must lie in `[0, π/2]`, `β` in `(0, π)`, and
/// `cos²β ≥ sin²α sin²γ`; equality is the Euclidean boundary, volume 0.
pub fn orthoscheme_volume(
    alpha: impl Into<Angle>,
    beta: impl Into<Angle>,
    gamma: impl Into<Angle>,
) -> Result<f64, LobachevskyError> {
    let (a, b, c) = (alpha.into().0, beta.into().0, gamma.into().0);
    let in_range = (0.0..=FRAC_PI_2).contains(&a) && (0.0..=FRAC_PI_2).contains(&c) && b > 0.0 && b < PI;
    let disc = b.cos().powi(2) - (a.sin() * c.sin()).powi(2);
    if !in_range || disc < -1e-12 {
        return Err(LobachevskyError::NotHyperbolic(a, b, c));
    }
    let root = disc.max(0.0).sqrt();
    let denom = a.cos() * c.cos();
    // δ = π/2 is the limit with an ideal vertex
    let delta = if denom <= 1e-300 { FRAC_PI_2 } else { (root / denom).atan() };
    let l = lobachevsky;
    let v = l(a + delta) - l(a - delta) + l(c + delta) - l(c - delta) - l(FRAC_PI_2 - b + delta)
        + l(FRAC_PI_2 - b - delta)
        + 2.0 * l(FRAC_PI_2 - delta);
    Ok((0.25 * v).max(0.0))
}
