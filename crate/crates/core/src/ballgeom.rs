//! `L_p` balls: norm moments of the p-exponential vector, the isotropic
//! rescaling `z_{p,n}`, uniform sampling, and exact monomial moments of the
//! Euclidean ball and sphere.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::measures::{double_factorial, sample_p_exponential};
use crate::polyalg::MultiIndex;
use crate::special::gamma_ratio;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallScale {
    /// `B_{p,n}` itself.
    Unit,
    /// `z_{p,n}·B_{p,n}`, whose coordinates have unit variance.
    Isotropic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpBallSpec {
    pub n: usize,
    pub p: f64,
    pub scale: BallScale,
}

impl LpBallSpec {
    pub fn new(n: usize, p: f64, scale: BallScale) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("ball dimension must be at least 1".into()));
        }
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidArgument(format!("norm exponent must satisfy p >= 1, got {p}")));
        }
        Ok(LpBallSpec { n, p, scale })
    }

    pub fn radius(&self) -> f64 {
        match self.scale {
            BallScale::Unit => 1.0,
            BallScale::Isotropic => isotropic_scale(self.n, self.p),
        }
    }

    /// `X = r·U^{1/n}·Z/‖Z‖_p` with i.i.d. p-exponential `Z_i`.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, radius: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.n);
        let p = self.p;
        let mut norm_p = 0.0;
        for x in out.iter_mut() {
            *x = sample_p_exponential(p, rng);
            norm_p += x.abs().powf(p);
        }
        let u: f64 = rng.random();
        let factor = radius * u.powf(1.0 / self.n as f64) / norm_p.powf(1.0 / p);
        for x in out.iter_mut() {
            *x *= factor;
        }
    }
}

pub fn sample_ball<R: Rng + ?Sized>(spec: &LpBallSpec, rng: &mut R) -> Vec<f64> {
    let mut out = vec![0.0; spec.n];
    spec.sample_into(rng, spec.radius(), &mut out);
    out
}

/// `E‖Z‖_p^k = Γ((n+k)/p) / Γ(n/p)` for `Z` with i.i.d. coordinates of
/// density `∝ e^{-|x|^p}`. Defined for `k > -n`.
pub fn gamma_ratio_moment(n: usize, p: f64, k: f64) -> Result<f64> {
    let nf = n as f64;
    if k <= -nf {
        return Err(Error::InvalidArgument(format!("moment order {k} must exceed -n = {}", -nf)));
    }
    if k == 0.0 {
        return Ok(1.0);
    }
    Ok(gamma_ratio((nf + k) / p, nf / p))
}

/// Two-sided bound `[(p/n)^{j/p}/20, 25·(p/n)^{j/p}]` on `E‖Z‖_p^{-j}`,
/// available for `k = -j` with `j ≥ 2` and `n > j²`.
pub fn negative_moment_bounds(n: usize, p: f64, k: f64) -> Option<(f64, f64)> {
    let j = -k;
    if j < 2.0 || (n as f64) <= j * j {
        return None;
    }
    let base = (p / n as f64).powf(j / p);
    Some((base / 20.0, 25.0 * base))
}

/// `E[X_1²]` for `X` uniform on the unit ball `B_{p,n}`.
pub fn unit_ball_second_moment(n: usize, p: f64) -> f64 {
    let nf = n as f64;
    nf / (nf + 2.0) * gamma_ratio(3.0 / p, 1.0 / p) * gamma_ratio(nf / p, (nf + 2.0) / p)
}

/// `z_{p,n} = E[X_1²]^{-1/2}` under the unit ball; `√(n+2)` for `p = 2`.
pub fn isotropic_scale(n: usize, p: f64) -> f64 {
    if p == 2.0 {
        return ((n + 2) as f64).sqrt();
    }
    unit_ball_second_moment(n, p).powf(-0.5)
}

/// `z_{p,n}²`, exact for the Euclidean ball.
pub fn isotropic_scale_sq(n: usize, p: f64) -> Coefficient {
    if p == 2.0 {
        Coefficient::from_int(n as i64 + 2)
    } else {
        Coefficient::Float(1.0 / unit_ball_second_moment(n, p))
    }
}

/// `E‖X‖_p^k = r^k·n/(n+k)` for `X` uniform on `r·B_{p,n}`.
pub fn ball_norm_moment(spec: &LpBallSpec, k: f64) -> f64 {
    let nf = spec.n as f64;
    spec.radius().powf(k) * nf / (nf + k)
}

/// `E[Π x_i^{a_i}]` under the uniform probability measure on `S^{n-1}`.
pub fn sphere_monomial_moment(n: usize, a: &MultiIndex) -> Result<BigRational> {
    if a.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a.dim() });
    }
    if a.entries().iter().any(|e| e % 2 == 1) {
        return Ok(BigRational::zero());
    }
    let num = a.entries().iter().fold(BigInt::one(), |acc, &e| acc * double_factorial(e.saturating_sub(1)));
    let half = a.degree() / 2;
    let den = (0..half).fold(BigInt::one(), |acc, j| acc * BigInt::from(n as u64 + 2 * j as u64));
    Ok(BigRational::new(num, den))
}

/// `E[Π x_i^{a_i}]` under the uniform measure on the Euclidean ball of
/// radius `√scale_sq`: `scale^{|a|}·n/(n+|a|)·(sphere moment)`.
pub fn ball_monomial_moment(n: usize, a: &MultiIndex, scale_sq: &Coefficient) -> Result<Coefficient> {
    let sphere = sphere_monomial_moment(n, a)?;
    if sphere.is_zero() {
        return Ok(Coefficient::zero());
    }
    let deg = a.degree();
    let radial = Coefficient::ratio(n as i64, (n + deg as usize) as i64);
    Ok(scale_sq.powi(deg / 2) * radial * Coefficient::Rational(sphere))
}

/// `Var(n^{-1/2}‖X‖_p^p) = z^{2p}p²/((n+2p)(n+p)²)` for `X` uniform on the
/// isotropic `L_p` ball; `4/(n+4)` when `p = 2`.
pub fn norm_power_variance(n: usize, p: u32) -> Result<Coefficient> {
    if p == 0 || p % 2 == 1 {
        return Err(Error::InvalidArgument(format!("norm_power_variance needs an even exponent, got {p}")));
    }
    let nn = n as i64;
    let pp = p as i64;
    let rational = Coefficient::ratio(pp * pp, (nn + 2 * pp) * (nn + pp) * (nn + pp));
    Ok(isotropic_scale_sq(n, p as f64).powi(p) * rational)
}

/// `β_q = E‖X‖_2^{2q} = (n/(n+2q))·(n+2)^q` for the isotropic Euclidean ball.
pub fn ball_beta(n: usize, q: u32) -> BigRational {
    let nn = BigInt::from(n as u64);
    let radial = BigRational::new(nn.clone(), nn.clone() + BigInt::from(2 * q));
    radial * BigRational::from_integer(num_traits::pow(nn + BigInt::from(2), q as usize))
}
