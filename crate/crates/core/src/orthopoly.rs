//! Orthonormal polynomials of a one-dimensional measure and the variance
//! bounds they induce for product measures.
//!
//! The system is obtained from the LDLᵀ (square-root-free Cholesky)
//! factorization `H = L·diag(δ)·Lᵀ` of the moment Hankel matrix
//! `H_{ij} = m_{i+j}`. The rows of `L⁻¹` are the monic orthogonal polynomials
//! `π_d`, `⟨π_d, π_d⟩ = δ_d`, and `p_d = π_d / √δ_d`. The leading constant is
//! then `c_d = 1/lead(p_d) = √δ_d`, which is the norm of the part of `x^d`
//! orthogonal to lower degrees. With rational moments everything up to
//! `c_d²` is exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::measures::{Measure1D, MomentTable, ProductMeasure};
use crate::polyalg::{factorial, homogeneous_indices, Polynomial};

/// Orthonormality residual that triggers a reorthogonalization pass.
pub const REORTH_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct OrthoSystem {
    measure: Measure1D,
    moments: Vec<Coefficient>,
    /// Row `d` holds the ascending monomial coefficients of `π_d`.
    monic: Vec<Vec<Coefficient>>,
    /// `c_d²` for `d = 0..=maxdeg`.
    c_sq: Vec<Coefficient>,
    residual: f64,
}

impl OrthoSystem {
    pub fn measure(&self) -> &Measure1D {
        &self.measure
    }

    pub fn maxdeg(&self) -> usize {
        self.monic.len() - 1
    }

    pub fn is_exact(&self) -> bool {
        self.c_sq.iter().all(Coefficient::is_exact)
    }

    pub fn monic(&self, d: usize) -> &[Coefficient] {
        &self.monic[d]
    }

    /// Ascending coefficients of the orthonormal `p_d`.
    pub fn orthonormal(&self, d: usize) -> Vec<f64> {
        let c = self.constant(d);
        self.monic[d].iter().map(|a| a.to_f64() / c).collect()
    }

    pub fn constant_sq(&self, d: usize) -> &Coefficient {
        &self.c_sq[d]
    }

    /// `c_{μ,d} = ⟨p_d, x^d⟩`.
    pub fn constant(&self, d: usize) -> f64 {
        self.c_sq[d].sqrt_f64()
    }

    pub fn constants(&self) -> Vec<f64> {
        (0..=self.maxdeg()).map(|d| self.constant(d)).collect()
    }

    /// `max |⟨p_d, p_e⟩ − δ_{de}|` over the system, evaluated through moments.
    pub fn orthonormality_residual(&self) -> f64 {
        self.residual
    }

    /// `⟨a, b⟩_{L²(μ)}` for ascending coefficient vectors.
    pub fn inner_product(&self, a: &[Coefficient], b: &[Coefficient]) -> Coefficient {
        hankel_form(&self.moments, a, b)
    }

    /// `⟨p_k, x^d⟩`, which vanishes for `k > d` and equals `c_d` at `k = d`.
    pub fn against_monomial(&self, k: usize, d: usize) -> f64 {
        let m: f64 = self.monic[k].iter().enumerate().map(|(j, a)| a.to_f64() * self.moments[j + d].to_f64()).sum();
        m / self.constant(k)
    }

    pub fn as_polynomial(&self, d: usize) -> Polynomial {
        let c = self.constant(d);
        let coeffs: Vec<Coefficient> = self.monic[d].iter().map(|a| Coefficient::Float(a.to_f64() / c)).collect();
        Polynomial::from_univariate(&coeffs)
    }
}

fn hankel_form(moments: &[Coefficient], a: &[Coefficient], b: &[Coefficient]) -> Coefficient {
    let mut acc = Coefficient::zero();
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if bj.is_zero() || moments[i + j].is_zero() {
                continue;
            }
            acc = acc + &(ai * bj) * &moments[i + j];
        }
    }
    acc
}

/// Builds `p_0..p_maxdeg` for `mu`.
pub fn gram_schmidt(mu: &Measure1D, maxdeg: usize) -> Result<OrthoSystem> {
    let moments = mu.moments(2 * maxdeg as u32);
    let size = maxdeg + 1;
    let exact = moments.iter().all(Coefficient::is_exact);

    // LDLᵀ of the Hankel matrix.
    let mut l = vec![vec![Coefficient::zero(); size]; size];
    let mut delta: Vec<Coefficient> = Vec::with_capacity(size);
    for i in 0..size {
        for j in 0..=i {
            let mut s = moments[i + j].clone();
            for k in 0..j {
                if !l[i][k].is_zero() && !l[j][k].is_zero() {
                    s = s - &(&l[i][k] * &l[j][k]) * &delta[k];
                }
            }
            if i == j {
                let scale = delta.iter().map(Coefficient::to_f64).fold(moments[0].to_f64(), f64::max);
                let pivot = s.to_f64();
                let positive = if exact { !(s.is_negative() || s.is_zero()) } else { pivot > 1e-14 * scale };
                if !positive {
                    return Err(Error::SingularHankel {
                        degree: i,
                        condition: scale / pivot.abs().max(f64::MIN_POSITIVE),
                    });
                }
                l[i][i] = Coefficient::one();
                delta.push(s);
            } else {
                l[i][j] = s / delta[j].clone();
            }
        }
    }

    // Rows of L⁻¹ by forward substitution.
    let mut monic = vec![vec![Coefficient::zero(); size]; size];
    for (d, row) in monic.iter_mut().enumerate() {
        row[d] = Coefficient::one();
        for j in (0..d).rev() {
            let mut s = Coefficient::zero();
            for k in (j + 1)..=d {
                if !row[k].is_zero() && !l[k][j].is_zero() {
                    s = s - &row[k] * &l[k][j];
                }
            }
            row[j] = s;
        }
    }
    for row in &mut monic {
        let d = row.iter().rposition(|c| !c.is_zero()).unwrap_or(0);
        row.truncate(d + 1);
    }

    let mut sys = OrthoSystem { measure: mu.clone(), moments, monic, c_sq: delta, residual: 0.0 };
    if exact {
        return Ok(sys);
    }
    sys.residual = residual(&sys);
    for _ in 0..3 {
        if sys.residual <= REORTH_THRESHOLD {
            break;
        }
        reorthogonalize(&mut sys);
        sys.residual = residual(&sys);
    }
    Ok(sys)
}

fn residual(sys: &OrthoSystem) -> f64 {
    let size = sys.monic.len();
    let mut worst: f64 = 0.0;
    for d in 0..size {
        for e in 0..=d {
            let g = sys.inner_product(&sys.monic[d], &sys.monic[e]).to_f64() / (sys.constant(d) * sys.constant(e));
            let target = if d == e { 1.0 } else { 0.0 };
            worst = worst.max((g - target).abs());
        }
    }
    worst
}

/// One modified Gram–Schmidt sweep over the monic rows; leading
/// coefficients stay 1.
fn reorthogonalize(sys: &mut OrthoSystem) {
    let size = sys.monic.len();
    for d in 0..size {
        let mut row: Vec<f64> = sys.monic[d].iter().map(Coefficient::to_f64).collect();
        for e in 0..d {
            let basis: Vec<f64> = sys.monic[e].iter().map(Coefficient::to_f64).collect();
            let proj = float_form(&sys.moments, &row, &basis) / sys.c_sq[e].to_f64();
            for (j, b) in basis.iter().enumerate() {
                row[j] -= proj * b;
            }
        }
        sys.c_sq[d] = Coefficient::Float(float_form(&sys.moments, &row, &row));
        sys.monic[d] = row.into_iter().map(Coefficient::Float).collect();
    }
}

fn float_form(moments: &[Coefficient], a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            acc += ai * bj * moments[i + j].to_f64();
        }
    }
    acc
}

/// `c_d²` for the uniform measure on `[-1, 1]`:
/// `(1/(2d+1))·(2^d (d!)² / (2d)!)²`.
pub fn legendre_leading_constant_sq(d: u32) -> BigRational {
    let num = (BigInt::one() << d as usize) * factorial(d) * factorial(d);
    let r = BigRational::new(num, factorial(2 * d));
    &r * &r / BigRational::from_integer(BigInt::from(2 * d + 1))
}

pub fn legendre_leading_constant(d: u32) -> f64 {
    crate::coeff::rational_to_f64(&legendre_leading_constant_sq(d)).sqrt()
}

/// `(1/9)·18^{-d}`, the floor on `c_{μ,d}` for isotropic log-concave `μ`.
pub fn logconcave_constant_floor_exact(d: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(9) * num_traits::pow(BigInt::from(18), d as usize))
}

pub fn logconcave_constant_floor(d: u32) -> f64 {
    crate::coeff::rational_to_f64(&logconcave_constant_floor_exact(d))
}

/// `E[f²] − E[f]²` under `pm`, exact with rational moments.
pub fn variance_exact(f: &Polynomial, pm: &ProductMeasure) -> Result<Coefficient> {
    if f.dim() != pm.n {
        return Err(Error::DimensionMismatch { expected: pm.n, found: f.dim() });
    }
    let deg = match f.degree() {
        None | Some(0) => return Ok(Coefficient::zero()),
        Some(d) => d,
    };
    let table = pm.moment_table(2 * deg);
    Ok(variance_with_table(f, &table))
}

pub(crate) fn variance_with_table(f: &Polynomial, table: &MomentTable) -> Coefficient {
    let terms: Vec<_> = f.terms().collect();
    let mut mean = Coefficient::zero();
    let mut second = Coefficient::zero();
    let two = Coefficient::from_int(2);
    for (a, (ia, ca)) in terms.iter().enumerate() {
        let m = table.product(ia);
        if !m.is_zero() {
            mean = mean + &m * ca;
        }
        let diag = table.product(&ia.add(ia));
        second = second + &(*ca * *ca) * &diag;
        for (ib, cb) in &terms[a + 1..] {
            let m = table.product(&ia.add(ib));
            if !m.is_zero() {
                second = second + &(&two * &(*ca * *cb)) * &m;
            }
        }
    }
    second - &mean * &mean
}

/// `Σ_{|I|=d} α_I² Π_i c²_{μ,I_i}` with `d = deg f`. Constants have no
/// variance, so degree 0 returns 0.
pub fn variance_lower_bound(f: &Polynomial, sys: &OrthoSystem) -> Result<Coefficient> {
    let d = match f.degree() {
        None | Some(0) => return Ok(Coefficient::zero()),
        Some(d) => d,
    };
    if (d as usize) > sys.maxdeg() {
        return Err(Error::InsufficientDegree { required: d as usize, available: sys.maxdeg() });
    }
    let mut acc = Coefficient::zero();
    for (idx, c) in f.terms().filter(|(i, _)| i.degree() == d) {
        let mut w = c * c;
        for &e in idx.entries() {
            if e > 0 {
                w = &w * sys.constant_sq(e as usize);
            }
        }
        acc = acc + w;
    }
    Ok(acc)
}

/// `min_{|I|=d} Π_i c²_{μ,I_i}` over `n` variables: the constant realized by
/// `sys` in `Var(f) ≥ C·coeff_d(f)²`.
pub fn realized_product_constant(sys: &OrthoSystem, n: usize, d: u32) -> Result<Coefficient> {
    if (d as usize) > sys.maxdeg() {
        return Err(Error::InsufficientDegree { required: d as usize, available: sys.maxdeg() });
    }
    let mut best: Option<Coefficient> = None;
    for idx in homogeneous_indices(n, d) {
        let w = idx.entries().iter().fold(Coefficient::one(), |acc, &e| &acc * sys.constant_sq(e as usize));
        best = Some(match best {
            Some(b) if b.cmp_value(&w).is_le() => b,
            _ => w,
        });
    }
    Ok(best.unwrap_or_else(Coefficient::one))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_poly;

    fn r(n: i64, d: i64) -> Coefficient {
        Coefficient::ratio(n, d)
    }

    /// Classical Gram–Schmidt on `1, x, x², …` in rational arithmetic.
    fn iterative_gram_schmidt(moments: &[Coefficient], maxdeg: usize) -> (Vec<Vec<Coefficient>>, Vec<Coefficient>) {
        let mut rows: Vec<Vec<Coefficient>> = Vec::new();
        let mut norms: Vec<Coefficient> = Vec::new();
        for d in 0..=maxdeg {
            let mut v = vec![Coefficient::zero(); d + 1];
            v[d] = Coefficient::one();
            let xd = v.clone();
            for (e, row) in rows.iter().enumerate() {
                let proj = hankel_form(moments, &xd, row) / norms[e].clone();
                for (j, a) in row.iter().enumerate() {
                    v[j] = &v[j] - &(&proj * a);
                }
            }
            norms.push(hankel_form(moments, &v, &v));
            rows.push(v);
        }
        (rows, norms)
    }

    #[test]
    fn uniform_constants_and_polynomials() {
        let sys = gram_schmidt(&Measure1D::standard_uniform(), 2).unwrap();
        assert!(sys.is_exact());
        assert_eq!(sys.constant_sq(1), &r(1, 3));
        assert_eq!(sys.constant_sq(2), &r(4, 45));
        assert_eq!(sys.monic(2), &[r(-1, 3), r(0, 1), r(1, 1)]);
        let p2 = sys.orthonormal(2);
        let s5 = 5f64.sqrt();
        assert!((p2[2] - 1.5 * s5).abs() < 1e-14 && (p2[0] + 0.5 * s5).abs() < 1e-14);
        assert!((sys.orthonormal(1)[1] - 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn matches_iterative_oracle_exactly() {
        for m in [Measure1D::standard_uniform(), Measure1D::standard_gaussian(), "laplace:iso".parse().unwrap()] {
            let sys = gram_schmidt(&m, 8).unwrap();
            let (rows, norms) = iterative_gram_schmidt(&m.moments(16), 8);
            for d in 0..=8 {
                assert_eq!(sys.monic(d), rows[d].as_slice(), "{m} d={d}");
                assert_eq!(sys.constant_sq(d), &norms[d]);
            }
        }
    }

    #[test]
    fn gaussian_hermite_normalization() {
        let sys = gram_schmidt(&Measure1D::standard_gaussian(), 3).unwrap();
        for d in 0..=3u32 {
            assert_eq!(sys.constant_sq(d as usize), &Coefficient::from_bigint(factorial(d)));
        }
    }

    #[test]
    fn isotropic_first_constant_is_one() {
        for spec in ["uniform:iso", "gaussian", "laplace:iso", "pexp:3:iso"] {
            let sys = gram_schmidt(&spec.parse().unwrap(), 4).unwrap();
            assert!((sys.constant(1) - 1.0).abs() < 1e-13, "{spec}");
        }
    }

    #[test]
    fn float_mode_orthonormality() {
        for p in [1.5, 3.0, 4.0] {
            let m = Measure1D::p_exponential(p).unwrap().isotropize().unwrap();
            let sys = gram_schmidt(&m, 8).unwrap();
            assert!(!sys.is_exact());
            assert!(sys.orthonormality_residual() <= 1e-10, "p={p}: {}", sys.orthonormality_residual());
            for d in 0..=8 {
                for k in (d + 1)..=8 {
                    assert!(sys.against_monomial(k, d).abs() < 1e-10);
                }
                assert!((sys.against_monomial(d, d) - sys.constant(d)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn legendre_formula() {
        assert!((legendre_leading_constant(1) - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((legendre_leading_constant(2) - 2.0 / (3.0 * 5f64.sqrt())).abs() < 1e-15);
        assert!((legendre_leading_constant(3) - 2.0 / (5.0 * 7f64.sqrt())).abs() < 1e-15);
        for d in 0..=20 {
            assert!(legendre_leading_constant(d) >= 0.5f64.powi(d as i32));
        }
    }

    #[test]
    fn logconcave_floor_values() {
        assert_eq!(logconcave_constant_floor_exact(0), BigRational::new(1.into(), 9.into()));
        assert_eq!(logconcave_constant_floor_exact(1), BigRational::new(1.into(), 162.into()));
        assert_eq!(logconcave_constant_floor_exact(3), BigRational::new(1.into(), 52488.into()));
    }

    #[test]
    fn variance_examples() {
        let iso_u = ProductMeasure::new("uniform:iso".parse().unwrap(), 2).unwrap();
        let f = parse_poly("x1*x2", 2).unwrap();
        assert_eq!(variance_exact(&f, &iso_u).unwrap(), r(1, 1));
        let sys = gram_schmidt(&iso_u.base, 2).unwrap();
        assert_eq!(variance_lower_bound(&f, &sys).unwrap(), r(1, 1));
        assert_eq!(variance_exact(&parse_poly("5", 2).unwrap(), &iso_u).unwrap(), r(0, 1));

        let u = ProductMeasure::new(Measure1D::standard_uniform(), 1).unwrap();
        let sq = parse_poly("x1^2", 1).unwrap();
        let sys = gram_schmidt(&u.base, 2).unwrap();
        assert_eq!(variance_exact(&sq, &u).unwrap(), r(4, 45));
        assert_eq!(variance_lower_bound(&sq, &sys).unwrap(), r(4, 45));
        assert!(matches!(
            variance_lower_bound(&parse_poly("x1^3", 1).unwrap(), &sys),
            Err(Error::InsufficientDegree { required: 3, available: 2 })
        ));

        let g = ProductMeasure::new(Measure1D::standard_gaussian(), 3).unwrap();
        assert_eq!(variance_exact(&parse_poly("x1", 3).unwrap(), &g).unwrap(), r(1, 1));
    }

    #[test]
    fn realized_constant_is_minimum() {
        let sys = gram_schmidt(&"uniform:iso".parse().unwrap(), 4).unwrap();
        let c = realized_product_constant(&sys, 3, 2).unwrap();
        // min(c_2², c_1⁴) with c_1 = 1 and c_2² = 4/5 for the isotropic uniform.
        assert_eq!(c, r(4, 5));
    }
}
