//! One-dimensional reference measures and their finite products.
//!
//! Every measure is stored as an affine image `center + s·Y` of a standard
//! shape `Y` that is symmetric about the origin. The scale enters moments
//! only through `s²`, which is kept as a [`Coefficient`], so isotropizing the
//! uniform, Gaussian and Laplace families keeps every moment rational.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use statrs::function::gamma::gamma_ur;

use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::polyalg::MultiIndex;
use crate::quadrature::{integrate, QuadOptions};
use crate::special::{gamma, gamma_ratio};

/// Mass allowed outside [`Measure1D::effective_window`].
pub const TAIL_MASS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    /// Uniform on `[-1, 1]`.
    Uniform,
    /// Standard normal.
    Gaussian,
    /// Density `p / (2Γ(1/p)) · exp(-|y|^p)`.
    PExponential(f64),
    /// Density `exp(-|y|) / 2`.
    Laplace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Measure1D {
    shape: Shape,
    center: Coefficient,
    scale_sq: Coefficient,
}

fn exact(v: f64) -> Result<Coefficient> {
    Coefficient::from_f64_exact(v).ok_or_else(|| Error::InvalidArgument(format!("parameter {v} is not finite")))
}

impl Measure1D {
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        if !(a <= b) {
            return Err(Error::InvalidArgument(format!("uniform interval [{a}, {b}] is empty")));
        }
        let a = exact(a)?;
        let b = exact(b)?;
        let half = Coefficient::ratio(1, 2);
        let center = (&a + &b) * half.clone();
        let s = (b - a) * half;
        Ok(Measure1D { shape: Shape::Uniform, center, scale_sq: s.powi(2) })
    }

    pub fn standard_uniform() -> Self {
        Measure1D { shape: Shape::Uniform, center: Coefficient::zero(), scale_sq: Coefficient::one() }
    }

    pub fn gaussian(mean: f64, variance: f64) -> Result<Self> {
        if !(variance >= 0.0) {
            return Err(Error::InvalidArgument(format!("negative variance {variance}")));
        }
        Ok(Measure1D { shape: Shape::Gaussian, center: exact(mean)?, scale_sq: exact(variance)? })
    }

    pub fn standard_gaussian() -> Self {
        Measure1D { shape: Shape::Gaussian, center: Coefficient::zero(), scale_sq: Coefficient::one() }
    }

    pub fn p_exponential(p: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidArgument(format!("p-exponential needs p > 0, got {p}")));
        }
        Ok(Measure1D { shape: Shape::PExponential(p), center: Coefficient::zero(), scale_sq: Coefficient::one() })
    }

    pub fn laplace(scale: f64) -> Result<Self> {
        if !(scale >= 0.0) {
            return Err(Error::InvalidArgument(format!("negative Laplace scale {scale}")));
        }
        Ok(Measure1D { shape: Shape::Laplace, center: Coefficient::zero(), scale_sq: exact(scale)?.powi(2) })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn center(&self) -> &Coefficient {
        &self.center
    }

    /// `s²`, the square of the affine scale applied to the standard shape.
    pub fn scale_sq(&self) -> &Coefficient {
        &self.scale_sq
    }

    pub fn scale(&self) -> f64 {
        self.scale_sq.sqrt_f64()
    }

    pub fn is_centered(&self) -> bool {
        self.center.is_zero()
    }

    /// Every shape here is log-concave except p-exponential with `p < 1`.
    pub fn is_log_concave(&self) -> bool {
        !matches!(self.shape, Shape::PExponential(p) if p < 1.0)
    }

    /// `E[Y^k]` for the standard shape. Odd orders vanish by symmetry.
    pub fn standard_moment(&self, k: u32) -> Coefficient {
        if k % 2 == 1 {
            return Coefficient::zero();
        }
        match self.shape {
            Shape::Uniform => Coefficient::ratio(1, k as i64 + 1),
            Shape::Gaussian => Coefficient::from_bigint(double_factorial(k.saturating_sub(1))),
            Shape::Laplace => Coefficient::from_bigint(crate::polyalg::factorial(k)),
            Shape::PExponential(p) => pexp_moment(p, k),
        }
    }

    pub fn mean(&self) -> Coefficient {
        self.center.clone()
    }

    pub fn variance(&self) -> Coefficient {
        &self.scale_sq * &self.standard_moment(2)
    }

    /// Raw moment `E[X^k]`, exact whenever the parameters allow it.
    pub fn moment(&self, k: u32) -> Coefficient {
        if self.center.is_zero() {
            return self.scale_sq.powi(k / 2) * self.standard_moment(k);
        }
        // E[(c + sY)^k] = Σ_j C(k, j) c^(k-j) s^j E[Y^j], j even.
        let mut total = Coefficient::zero();
        let mut binom = BigInt::from(1);
        for j in 0..=k {
            if j % 2 == 0 {
                let term = Coefficient::from_bigint(binom.clone())
                    * self.center.powi(k - j)
                    * self.scale_sq.powi(j / 2)
                    * self.standard_moment(j);
                total = total + term;
            }
            binom = binom * BigInt::from(k - j) / BigInt::from(j + 1);
        }
        total
    }

    pub fn moment_f64(&self, k: u32) -> f64 {
        self.moment(k).to_f64()
    }

    /// Moments `m_0..=m_kmax`.
    pub fn moments(&self, kmax: u32) -> Vec<Coefficient> {
        (0..=kmax).map(|k| self.moment(k)).collect()
    }

    /// `E[X^k]` by adaptive Gauss–Kronrod quadrature of `x^k ρ(x)` over the
    /// effective window. Used as an independent numeric check of [`moment`].
    ///
    /// [`moment`]: Measure1D::moment
    pub fn moment_quadrature(&self, k: u32) -> f64 {
        // The weight x^k inflates the neglected tail, so truncate much further out.
        let w = self.standard_window(1e-40) * self.scale();
        let c = self.center.to_f64();
        let (lo, hi) = (c - w, c + w);
        let opts = QuadOptions { abs_tol: 1e-15, rel_tol: 1e-13, max_subintervals: 4000 };
        // Split at the center so the kink of |y|^p sits on a panel boundary.
        let f = |x: f64| x.powi(k as i32) * self.density(x);
        integrate(f, lo, c, opts).value + integrate(f, c, hi, opts).value
    }

    pub fn density(&self, x: f64) -> f64 {
        let s = self.scale();
        if s == 0.0 {
            return if x == self.center.to_f64() { f64::INFINITY } else { 0.0 };
        }
        let y = (x - self.center.to_f64()) / s;
        let std = match self.shape {
            Shape::Uniform => {
                if y.abs() <= 1.0 {
                    0.5
                } else {
                    0.0
                }
            }
            Shape::Gaussian => (-0.5 * y * y).exp() / (2.0 * PI).sqrt(),
            Shape::Laplace => 0.5 * (-y.abs()).exp(),
            Shape::PExponential(p) => p / (2.0 * gamma(1.0 / p)) * (-y.abs().powf(p)).exp(),
        };
        std / s
    }

    /// Interval outside of which the measure has mass below [`TAIL_MASS`];
    /// the exact support for the uniform.
    pub fn effective_window(&self) -> (f64, f64) {
        let w = self.standard_window(TAIL_MASS) * self.scale();
        let c = self.center.to_f64();
        (c - w, c + w)
    }

    fn standard_window(&self, tail: f64) -> f64 {
        match self.shape {
            Shape::Uniform => 1.0,
            Shape::Laplace => -tail.ln(),
            Shape::Gaussian => solve_tail(tail, |w| gamma_ur(0.5, 0.5 * w * w)),
            Shape::PExponential(p) => solve_tail(tail, |w| gamma_ur(1.0 / p, w.powf(p))),
        }
    }

    /// Affine image with mean 0 and variance 1.
    pub fn isotropize(&self) -> Result<Self> {
        if self.variance().is_zero() {
            return Err(Error::InvalidArgument("cannot isotropize a zero-variance measure".into()));
        }
        let m2 = self.standard_moment(2);
        Ok(Measure1D { shape: self.shape, center: Coefficient::zero(), scale_sq: Coefficient::one() / m2 })
    }

    pub fn is_isotropic(&self) -> bool {
        self.center.is_zero() && self.variance() == Coefficient::one()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let y = match self.shape {
            Shape::Uniform => rng.random_range(-1.0..=1.0),
            Shape::Gaussian => rng.sample(StandardNormal),
            Shape::Laplace => {
                let e: f64 = rng.sample(Exp1);
                if rng.random::<bool>() {
                    e
                } else {
                    -e
                }
            }
            Shape::PExponential(p) => sample_p_exponential(p, rng),
        };
        self.center.to_f64() + self.scale() * y
    }

    /// Canonical text form, readable by [`FromStr`].
    pub fn label(&self) -> String {
        self.to_string()
    }
}

/// A draw with density `p/(2Γ(1/p)) exp(-|y|^p)`: a random sign times
/// `G^(1/p)` with `G ~ Gamma(1/p, 1)`.
pub fn sample_p_exponential<R: Rng + ?Sized>(p: f64, rng: &mut R) -> f64 {
    let g = Gamma::new(1.0 / p, 1.0).expect("shape 1/p is positive");
    let r: f64 = g.sample(rng).powf(1.0 / p);
    if rng.random::<bool>() {
        r
    } else {
        -r
    }
}

fn pexp_moment(p: f64, k: u32) -> Coefficient {
    if p == 1.0 {
        return Coefficient::from_bigint(crate::polyalg::factorial(k));
    }
    if p == 2.0 {
        // Γ((k+1)/2)/Γ(1/2) = (k-1)!!/2^(k/2)
        let num = double_factorial(k.saturating_sub(1));
        let den = BigInt::from(1) << (k / 2) as usize;
        return Coefficient::Rational(num_rational::BigRational::new(num, den));
    }
    Coefficient::Float(gamma_ratio((k as f64 + 1.0) / p, 1.0 / p))
}

pub(crate) fn double_factorial(k: u32) -> BigInt {
    let mut acc = BigInt::from(1);
    let mut m = k;
    while m > 1 {
        acc *= BigInt::from(m);
        m -= 2;
    }
    acc
}

fn solve_tail(mass: f64, tail: impl Fn(f64) -> f64) -> f64 {
    let mut lo = 0.0;
    let mut hi = 1.0;
    while tail(hi) > mass {
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if tail(mid) > mass {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

impl fmt::Display for Measure1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match self.shape {
            Shape::Uniform => "uniform".to_string(),
            Shape::Gaussian => "gaussian".to_string(),
            Shape::Laplace => "laplace".to_string(),
            Shape::PExponential(p) => format!("pexp:{p}"),
        };
        if self.is_centered() && self.scale_sq.is_one() {
            write!(f, "{base}")
        } else if self.is_isotropic() {
            write!(f, "{base}:iso")
        } else {
            write!(f, "{base}(center={}, scale^2={})", self.center, self.scale_sq)
        }
    }
}

impl FromStr for Measure1D {
    type Err = Error;

    /// Parses `uniform`, `gaussian`, `pexp:<p>` or `laplace`, each with an
    /// optional `:iso` suffix.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (body, iso) = match s.strip_suffix(":iso") {
            Some(b) => (b, true),
            None => (s, false),
        };
        let m = match body {
            "uniform" => Measure1D::standard_uniform(),
            "gaussian" => Measure1D::standard_gaussian(),
            "laplace" => Measure1D::laplace(1.0)?,
            other => match other.strip_prefix("pexp:") {
                Some(p) => {
                    let p: f64 =
                        p.parse().map_err(|_| Error::InvalidArgument(format!("bad exponent in measure '{s}'")))?;
                    Measure1D::p_exponential(p)?
                }
                None => return Err(Error::InvalidArgument(format!("unknown measure '{s}'"))),
            },
        };
        if iso {
            m.isotropize()
        } else {
            Ok(m)
        }
    }
}

/// `μ^{⊗n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductMeasure {
    pub base: Measure1D,
    pub n: usize,
}

impl ProductMeasure {
    pub fn new(base: Measure1D, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("product measure needs n >= 1".into()));
        }
        Ok(ProductMeasure { base, n })
    }

    /// Moment table for repeated product-moment evaluation.
    pub fn moment_table(&self, kmax: u32) -> MomentTable {
        MomentTable(self.base.moments(kmax))
    }

    pub fn product_moment(&self, index: &MultiIndex) -> Result<Coefficient> {
        if index.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: index.dim() });
        }
        let kmax = index.entries().iter().copied().max().unwrap_or(0);
        Ok(self.moment_table(kmax).product(index))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        for x in out.iter_mut() {
            *x = self.base.sample(rng);
        }
    }
}

/// Cached `m_0..=m_K` of a one-dimensional measure.
#[derive(Debug, Clone)]
pub struct MomentTable(Vec<Coefficient>);

impl MomentTable {
    pub fn max_order(&self) -> u32 {
        self.0.len() as u32 - 1
    }

    pub fn get(&self, k: u32) -> &Coefficient {
        &self.0[k as usize]
    }

    /// `Π_i m_{I_i}`. Panics if an entry of `index` exceeds the table.
    pub fn product(&self, index: &MultiIndex) -> Coefficient {
        let mut acc = Coefficient::one();
        for &e in index.entries() {
            let m = &self.0[e as usize];
            if m.is_zero() {
                return Coefficient::zero();
            }
            if !m.is_one() {
                acc = &acc * m;
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn r(n: i64, d: i64) -> Coefficient {
        Coefficient::ratio(n, d)
    }

    #[test]
    fn closed_form_moments() {
        let u = Measure1D::uniform(-1.0, 1.0).unwrap();
        assert_eq!(u.moment(2), r(1, 3));
        assert!(u.moment(2).is_exact());
        assert_eq!(Measure1D::standard_gaussian().moment(4), r(3, 1));
        let p2 = Measure1D::p_exponential(2.0).unwrap();
        assert_eq!(p2.moment(2), r(1, 2));
        // Oracle: quadrature of x^2 e^{-x^2}/Z.
        assert!((p2.moment_quadrature(2) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn shifted_uniform_moments() {
        // Uniform(0, 2): E[X^k] = 2^k/(k+1).
        let u = Measure1D::uniform(0.0, 2.0).unwrap();
        for k in 0..6u32 {
            assert_eq!(u.moment(k), r(1 << k, k as i64 + 1));
        }
    }

    #[test]
    fn isotropize_examples() {
        let u = Measure1D::uniform(-1.0, 1.0).unwrap().isotropize().unwrap();
        assert_eq!(u.scale_sq(), &r(3, 1));
        assert_eq!(u.effective_window().1, 3f64.sqrt());
        assert_eq!(Measure1D::standard_gaussian().isotropize().unwrap(), Measure1D::standard_gaussian());
        let l = Measure1D::laplace(1.0).unwrap().isotropize().unwrap();
        assert_eq!(l.scale_sq(), &r(1, 2));
        assert!(Measure1D::gaussian(1.0, 0.0).unwrap().isotropize().is_err());
    }

    #[test]
    fn isotropy_is_exact_or_tight() {
        for spec in ["uniform", "gaussian", "laplace", "pexp:1", "pexp:2", "pexp:1.5", "pexp:3", "pexp:4"] {
            let m: Measure1D = spec.parse().unwrap();
            let iso = m.isotropize().unwrap();
            assert!(iso.moment(1).is_zero());
            let v = iso.moment(2);
            if v.is_exact() {
                assert_eq!(v, Coefficient::one(), "{spec}");
            } else {
                assert!((v.to_f64() - 1.0).abs() < 1e-14, "{spec}");
            }
        }
    }

    #[test]
    fn quadrature_matches_gamma_moments() {
        for p in [1.5, 3.0, 4.0] {
            let m = Measure1D::p_exponential(p).unwrap();
            for k in [0u32, 2, 4, 6, 8] {
                let q = m.moment_quadrature(k);
                let c = m.moment_f64(k);
                assert!(((q - c) / c).abs() < 1e-11, "p={p} k={k} q={q} c={c}");
            }
        }
        let l = Measure1D::laplace(0.7).unwrap();
        assert!(((l.moment_quadrature(4) - l.moment_f64(4)) / l.moment_f64(4)).abs() < 1e-11);
    }

    #[test]
    fn spec_strings_round_trip() {
        for s in ["uniform", "gaussian", "laplace", "pexp:3", "uniform:iso", "laplace:iso", "pexp:1.5:iso"] {
            let m: Measure1D = s.parse().unwrap();
            assert_eq!(m.label(), s);
        }
        assert!("cauchy".parse::<Measure1D>().is_err());
        assert!("pexp:x".parse::<Measure1D>().is_err());
    }

    #[test]
    fn product_moments() {
        let u = ProductMeasure::new(Measure1D::standard_uniform(), 2).unwrap();
        assert_eq!(u.product_moment(&MultiIndex::new(vec![2, 2])).unwrap(), r(1, 9));
        let g = ProductMeasure::new(Measure1D::standard_gaussian(), 3).unwrap();
        assert_eq!(g.product_moment(&MultiIndex::new(vec![2, 4, 0])).unwrap(), r(3, 1));
        assert_eq!(g.product_moment(&MultiIndex::zeros(3)).unwrap(), r(1, 1));
        assert!(g.product_moment(&MultiIndex::zeros(2)).is_err());
    }

    #[test]
    fn sampler_moments_within_four_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 200_000;
        for spec in ["uniform", "gaussian", "laplace:iso", "pexp:4"] {
            let m: Measure1D = spec.parse().unwrap();
            let xs: Vec<f64> = (0..n).map(|_| m.sample(&mut rng)).collect();
            for k in [1u32, 2, 4] {
                let vals: Vec<f64> = xs.iter().map(|x| x.powi(k as i32)).collect();
                let mean = vals.iter().sum::<f64>() / n as f64;
                let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
                let se = (var / n as f64).sqrt();
                let target = m.moment_f64(k);
                assert!((mean - target).abs() < 4.0 * se, "{spec} k={k}: {mean} vs {target} (se {se})");
            }
        }
    }
}
