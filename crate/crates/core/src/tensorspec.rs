//! Covariance of `X^{⊗d}` on the symmetric-tensor basis `{x^I}_{|I|=d}`.
//!
//! For a measure `μ` on `ℝ^n` the matrix `C_{IJ} = E[x^{I+J}] − E[x^I]E[x^J]`
//! represents `f ↦ Var(f(X))` on homogeneous degree-`d` polynomials. The
//! Bombieri weighting `C̃ = D·C`, `D = diag(1/I!)`, is similar to the
//! symmetric `S = D^{1/2} C D^{1/2}`. For rotation-invariant `μ` the spaces
//! `‖x‖^{2i} H_{d−2i}` are eigenspaces of `C̃`, which gives a closed-form
//! spectrum.
//!
//! Matrices are assembled in rational arithmetic whenever the moments are
//! rational. Floats appear only when `S` and `C` are handed to the Jacobi
//! solver.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ballgeom::{ball_beta, ball_monomial_moment};
use crate::coeff::{rational_to_f64, Coefficient};
use crate::error::{Error, Result};
use crate::linalg::{sym_eigen, Eigen, Matrix};
use crate::mc::{run_chunks, Sampler};
use crate::measures::ProductMeasure;
use crate::polyalg::{factorial, homogeneous_indices, MultiIndex, Polynomial};

pub const BASIS_LIMIT: usize = 1_000_000;
/// Largest basis for which dense covariance matrices are formed.
pub const DENSE_LIMIT: usize = 4_000;
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;
pub const INTERLACING_SLACK: f64 = 1e-10;

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, j| acc * (n - j) as u128 / (j + 1) as u128)
}

fn binomial_signed(top: i64, k: i64) -> u128 {
    if top < 0 || k < 0 || k > top {
        0
    } else {
        binomial(top as u64, k as u64)
    }
}

/// All `x^I` with `|I| = d`, in descending graded-lex order.
#[derive(Debug, Clone)]
pub struct SymBasis {
    pub n: usize,
    pub d: u32,
    indices: Vec<MultiIndex>,
    position: HashMap<MultiIndex, usize>,
}

impl SymBasis {
    pub fn new(n: usize, d: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("basis needs n >= 1".into()));
        }
        let size = binomial((n as u64 + d as u64).saturating_sub(1), d as u64);
        if size > BASIS_LIMIT as u128 {
            return Err(Error::SizeGuard { size: size.min(usize::MAX as u128) as usize, limit: BASIS_LIMIT });
        }
        let indices = homogeneous_indices(n, d);
        let position = indices.iter().cloned().enumerate().map(|(k, i)| (i, k)).collect();
        Ok(SymBasis { n, d, indices, position })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn position(&self, index: &MultiIndex) -> Option<usize> {
        self.position.get(index).copied()
    }

    /// Coordinates of a homogeneous degree-`d` polynomial.
    pub fn coordinates(&self, f: &Polynomial) -> Result<Vec<Coefficient>> {
        if f.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: f.dim() });
        }
        if f.terms().any(|(i, _)| i.degree() != self.d) {
            return Err(Error::NotHomogeneous);
        }
        Ok(f.coordinates(&self.indices))
    }
}

pub fn sym_basis(n: usize, d: u32) -> Result<SymBasis> {
    SymBasis::new(n, d)
}

/// Matrices and eigen-decompositions for one `(n, d, μ)` triple.
#[derive(Debug, Clone)]
pub struct CovBundle {
    pub basis: SymBasis,
    pub measure: String,
    /// Exact when every moment is rational.
    pub c: Vec<Vec<Coefficient>>,
    pub ctilde: Vec<Vec<Coefficient>>,
    pub s: Matrix,
    pub c_float: Matrix,
    /// Eigen-decomposition of `S`, i.e. the spectrum of `C̃`.
    pub eig_s: Eigen,
    pub eig_c: Eigen,
    /// Largest entry-wise standard error when `C` was estimated by sampling.
    pub sampling_stderr: Option<f64>,
}

impl CovBundle {
    pub fn is_exact(&self) -> bool {
        self.c.iter().flatten().all(Coefficient::is_exact)
    }

    fn from_covariance(
        basis: SymBasis,
        measure: String,
        c: Vec<Vec<Coefficient>>,
        sampling_stderr: Option<f64>,
    ) -> Result<Self> {
        let dfac: Vec<Coefficient> = basis.indices.iter().map(|i| Coefficient::from_bigint(i.factorial())).collect();
        let ctilde: Vec<Vec<Coefficient>> =
            c.par_iter().zip(dfac.par_iter()).map(|(row, f)| row.iter().map(|v| v / f).collect()).collect();
        let n = basis.len();
        let inv_sqrt: Vec<f64> = dfac.iter().map(|f| 1.0 / f.to_f64().sqrt()).collect();
        let c_float = Matrix::from_fn(n, |i, j| c[i][j].to_f64());
        let s = Matrix::from_fn(n, |i, j| c_float[(i, j)] * inv_sqrt[i] * inv_sqrt[j]);
        let (eig_s, eig_c) = rayon::join(|| sym_eigen(&s), || sym_eigen(&c_float));
        Ok(CovBundle { basis, measure, c, ctilde, s, c_float, eig_s: eig_s?, eig_c: eig_c?, sampling_stderr })
    }

    /// Exact `C̃·v` for a coordinate vector `v`.
    pub fn apply_ctilde(&self, v: &[Coefficient]) -> Vec<Coefficient> {
        self.ctilde
            .par_iter()
            .map(|row| row.iter().zip(v).filter(|(a, b)| !a.is_zero() && !b.is_zero()).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn apply_c(&self, v: &[Coefficient]) -> Vec<Coefficient> {
        self.c
            .par_iter()
            .map(|row| row.iter().zip(v).filter(|(a, b)| !a.is_zero() && !b.is_zero()).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `d!·λ_i(C̃) ≥ λ_i(C) ≥ λ_i(C̃)` for all `i`, with slack
    /// `1e-10·max(1, |λ|)`.
    pub fn interlacing_ok(&self) -> bool {
        let dfact = factorial(self.basis.d).to_f64().unwrap_or(f64::INFINITY);
        self.eig_s.values.iter().zip(&self.eig_c.values).all(|(&mu, &lambda)| {
            let slack = INTERLACING_SLACK * lambda.abs().max(1.0);
            lambda >= mu - slack && lambda <= dfact * mu + slack
        })
    }
}

fn guard(basis: &SymBasis) -> Result<()> {
    if basis.len() > DENSE_LIMIT {
        return Err(Error::SizeGuard { size: basis.len(), limit: DENSE_LIMIT });
    }
    Ok(())
}

fn assemble(
    basis: &SymBasis,
    moment: impl Fn(&MultiIndex) -> Result<Coefficient> + Sync,
) -> Result<Vec<Vec<Coefficient>>> {
    let idx = &basis.indices;
    let first: Vec<Coefficient> = idx.par_iter().map(&moment).collect::<Result<_>>()?;
    let upper: Vec<Vec<Coefficient>> = (0..idx.len())
        .into_par_iter()
        .map(|i| {
            (i..idx.len())
                .map(|j| {
                    let second = moment(&idx[i].add(&idx[j]))?;
                    Ok(second - &first[i] * &first[j])
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let n = idx.len();
    let mut c = vec![vec![Coefficient::zero(); n]; n];
    for (i, row) in upper.into_iter().enumerate() {
        for (k, v) in row.into_iter().enumerate() {
            let j = i + k;
            c[j][i] = v.clone();
            c[i][j] = v;
        }
    }
    Ok(c)
}

/// `Cov(X^{⊗d})` for `X` uniform on the isotropic Euclidean ball
/// `√(n+2)·B_n`, exact in every entry.
pub fn cov_matrix_ball(n: usize, d: u32) -> Result<CovBundle> {
    if d == 0 {
        return Err(Error::InvalidArgument("covariance spectrum needs d >= 1".into()));
    }
    let basis = SymBasis::new(n, d)?;
    guard(&basis)?;
    let r2 = Coefficient::from_int(n as i64 + 2);
    let c = assemble(&basis, |a| ball_monomial_moment(n, a, &r2))?;
    CovBundle::from_covariance(basis, format!("ball2(n={n})"), c, None)
}

/// `Cov(X^{⊗d})` for `X ~ μ^{⊗n}`, exact when the base moments are.
pub fn cov_matrix_product(pm: &ProductMeasure, d: u32) -> Result<CovBundle> {
    if d == 0 {
        return Err(Error::InvalidArgument("covariance spectrum needs d >= 1".into()));
    }
    let basis = SymBasis::new(pm.n, d)?;
    guard(&basis)?;
    let table = pm.moment_table(2 * d);
    let c = assemble(&basis, |a| Ok(table.product(a)))?;
    CovBundle::from_covariance(basis, format!("product:{}", pm.base), c, None)
}

/// Sample covariance of the features `x^I` from `samples` draws.
pub fn cov_matrix_mc(sampler: &dyn Sampler, d: u32, samples: usize, seed: u64) -> Result<CovBundle> {
    if d == 0 {
        return Err(Error::InvalidArgument("covariance spectrum needs d >= 1".into()));
    }
    crate::mc::require_samples(samples, 2)?;
    let basis = SymBasis::new(sampler.dim(), d)?;
    guard(&basis)?;
    let idx = basis.indices.clone();
    let nb = idx.len();
    let tri = nb * (nb + 1) / 2;

    struct Acc {
        first: Vec<f64>,
        second: Vec<f64>,
        second_sq: Vec<f64>,
    }
    let init = || Acc { first: vec![0.0; nb], second: vec![0.0; tri], second_sq: vec![0.0; tri] };
    let acc = run_chunks(
        sampler,
        samples,
        seed,
        init,
        |a, x| {
            let phi: Vec<f64> =
                idx.iter().map(|m| m.entries().iter().zip(x).map(|(&e, &v)| v.powi(e as i32)).product()).collect();
            let mut k = 0;
            for i in 0..nb {
                a.first[i] += phi[i];
                for j in i..nb {
                    let v = phi[i] * phi[j];
                    a.second[k] += v;
                    a.second_sq[k] += v * v;
                    k += 1;
                }
            }
        },
        |mut a, b| {
            for (x, y) in a.first.iter_mut().zip(&b.first) {
                *x += y;
            }
            for (x, y) in a.second.iter_mut().zip(&b.second) {
                *x += y;
            }
            for (x, y) in a.second_sq.iter_mut().zip(&b.second_sq) {
                *x += y;
            }
            a
        },
    );
    let nf = samples as f64;
    let mean: Vec<f64> = acc.first.iter().map(|s| s / nf).collect();
    let mut c = vec![vec![Coefficient::zero(); nb]; nb];
    let mut worst_se: f64 = 0.0;
    let mut k = 0;
    for i in 0..nb {
        for j in i..nb {
            let m2 = acc.second[k] / nf;
            let var_prod = (acc.second_sq[k] / nf - m2 * m2).max(0.0);
            worst_se = worst_se.max((var_prod / nf).sqrt());
            let cov = (m2 - mean[i] * mean[j]) * nf / (nf - 1.0);
            c[i][j] = Coefficient::Float(cov);
            c[j][i] = Coefficient::Float(cov);
            k += 1;
        }
    }
    CovBundle::from_covariance(basis, format!("mc:{}", sampler.label()), c, Some(worst_se))
}

/// One eigenvalue level `η_i` on `‖x‖^{2i}H_{d−2i}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumLevel {
    pub i: u32,
    #[serde(serialize_with = "ser_rational")]
    pub eta: BigRational,
    pub multiplicity: u128,
}

fn ser_rational<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&Coefficient::Rational(r.clone()).to_string())
}

impl SpectrumLevel {
    pub fn eta_f64(&self) -> f64 {
        rational_to_f64(&self.eta)
    }
}

/// `dim H_k(ℝ^n) = C(n+k−1, n−1) − C(n+k−3, n−1)`.
pub fn harmonic_dimension(n: usize, k: u32) -> u128 {
    let (n, k) = (n as i64, k as i64);
    binomial_signed(n + k - 1, n - 1) - binomial_signed(n + k - 3, n - 1)
}

/// `b_i = 2^i i! Π_{j=1}^{i} (n+2d−2j−2i)`, so that
/// `Δ^i(‖x‖^{2i} g) = b_i g` for harmonic `g` of degree `d − 2i`.
pub fn b_coefficient(n: usize, d: u32, i: u32) -> BigInt {
    let mut acc = (BigInt::one() << i as usize) * factorial(i);
    for j in 1..=i as i64 {
        acc *= BigInt::from(n as i64 + 2 * d as i64 - 2 * j - 2 * i as i64);
    }
    acc
}

fn rising_even(n: usize, count: u32) -> BigInt {
    (0..count).fold(BigInt::one(), |acc, j| acc * BigInt::from(n as u64 + 2 * j as u64))
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Closed-form spectrum of `C̃` for the isotropic Euclidean ball, with
/// `R_n² = n + 2`.
pub fn theoretical_spectrum(n: usize, d: u32) -> Result<Vec<SpectrumLevel>> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument("theoretical spectrum needs n >= 1 and d >= 1".into()));
    }
    let nn = n as i64;
    let dd = d as i64;
    let r2d = num_traits::pow(int(nn + 2), d as usize);
    let mut out = Vec::new();
    for i in 0..=d / 2 {
        let eta = if 2 * i < d {
            let den = (BigInt::one() << i as usize) * factorial(i) * rising_even(n, d - i);
            &r2d * BigRational::new(BigInt::from(nn), BigInt::from(nn + 2 * dd)) / BigRational::from_integer(den)
        } else {
            let h = d / 2;
            let prod = (0..h as i64).fold(BigInt::one(), |acc, j| acc * BigInt::from(dd + nn - 2 * j));
            let den = (BigInt::one() << h as usize) * factorial(h) * BigInt::from((nn + 2 * dd) * (nn + dd)) * prod;
            &r2d * int(dd * dd) / BigRational::from_integer(den)
        };
        out.push(SpectrumLevel { i, eta, multiplicity: harmonic_dimension(n, d - 2 * i) });
    }
    Ok(out)
}

/// `β_q = E‖X‖^{2q} = Π_{j<q}(n+2j)` for the standard Gaussian on `ℝ^n`.
pub fn gaussian_beta(n: usize, q: u32) -> BigRational {
    BigRational::from_integer(rising_even(n, q))
}

/// Spectrum of `C̃` for a rotation-invariant measure with radial moments
/// `β_q = E‖X‖^{2q}`, `q = 0..=d`:
/// `η_i = β_d / (2^i i! n(n+2)⋯(n+2d−2i−2))` for `i < d/2` and, for even `d`,
/// `η_{d/2} = (β_d − β_{d/2}²)/b_{d/2}`.
pub fn radial_spectrum(n: usize, d: u32, beta: &[Coefficient]) -> Result<Vec<(u32, Coefficient, u128)>> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument("radial spectrum needs n >= 1 and d >= 1".into()));
    }
    if beta.len() <= d as usize {
        return Err(Error::InvalidArgument(format!("need β_0..β_{d}, got {} values", beta.len())));
    }
    if !beta[0].is_one() {
        return Err(Error::InvalidArgument(format!("β_0 must be 1, got {}", beta[0])));
    }
    if let Some(q) = beta.iter().position(|b| !(b.to_f64() > 0.0 && b.to_f64().is_finite())) {
        return Err(Error::InvalidArgument(format!("β_{q} must be positive and finite")));
    }
    let mut out = Vec::new();
    for i in 0..=d / 2 {
        let eta = if 2 * i < d {
            let den = (BigInt::one() << i as usize) * factorial(i) * rising_even(n, d - i);
            &beta[d as usize] / &Coefficient::from_bigint(den)
        } else {
            let h = (d / 2) as usize;
            let num = &beta[d as usize] - &(&beta[h] * &beta[h]);
            &num / &Coefficient::from_bigint(b_coefficient(n, d, d / 2))
        };
        out.push((i, eta, harmonic_dimension(n, d - 2 * i)));
    }
    Ok(out)
}

/// Radial moments of the isotropic Euclidean ball, `β_q = (n/(n+2q))(n+2)^q`.
pub fn ball_betas(n: usize, d: u32) -> Vec<Coefficient> {
    (0..=d).map(|q| Coefficient::Rational(ball_beta(n, q))).collect()
}

pub fn gaussian_betas(n: usize, d: u32) -> Vec<Coefficient> {
    (0..=d).map(|q| Coefficient::Rational(gaussian_beta(n, q))).collect()
}

/// Harmonic parts `h_0..h_{⌊d/2⌋}` with `f = Σ_i ‖x‖^{2i} h_i`.
///
/// Works from the top: with the higher parts removed, `Δ^q` kills every
/// remaining summand except `‖x‖^{2q}h_q`, and `Δ^q(‖x‖^{2q}h_q) = b_q h_q`.
pub fn harmonic_decompose(f: &Polynomial) -> Result<Vec<Polynomial>> {
    let n = f.dim();
    let d = match f.degree() {
        None => return Ok(vec![Polynomial::zero(n)]),
        Some(d) => d,
    };
    if !f.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    let top = d / 2;
    let norm2 = Polynomial::norm_squared(n);
    let mut rest = f.clone();
    let mut parts = vec![Polynomial::zero(n); top as usize + 1];
    for q in (0..=top).rev() {
        // b_q ≥ 2^q q! n^q > 0.
        let b = Coefficient::from_bigint(b_coefficient(n, d, q));
        let h = rest.laplacian_pow(q).scale(&(Coefficient::one() / b));
        if !h.is_zero() {
            rest = rest.sub(&norm2.pow(q).multiply(&h)?)?;
        }
        parts[q as usize] = h;
    }
    debug_assert!(rest.is_zero(), "harmonic parts must reconstruct f");
    Ok(parts)
}

/// Empirical clusters and their comparison with the closed form.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub n: usize,
    pub d: u32,
    pub theoretical: Vec<SpectrumLevel>,
    pub empirical: Vec<f64>,
    pub eigen_c: Vec<f64>,
    pub clusters: Vec<Cluster>,
    pub max_rel_dev: f64,
    pub harmonic_residual: f64,
    pub interlacing_ok: bool,
    pub cluster_tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Cluster {
    pub mean: f64,
    pub size: usize,
}

/// Groups sorted values whose consecutive gaps are at most `tol`.
pub fn cluster_values(sorted: &[f64], tol: f64) -> Vec<Cluster> {
    let mut clusters: Vec<(f64, usize, f64)> = Vec::new();
    for &v in sorted {
        match clusters.last_mut() {
            Some((sum, size, last)) if v - *last <= tol => {
                *sum += v;
                *size += 1;
                *last = v;
            }
            _ => clusters.push((v, 1, v)),
        }
    }
    clusters.into_iter().map(|(sum, size, _)| Cluster { mean: sum / size as f64, size }).collect()
}

/// Merges levels with identical `η` and drops empty ones, ascending.
fn merged_levels(levels: &[SpectrumLevel]) -> Vec<(BigRational, u128)> {
    let mut v: Vec<(BigRational, u128)> = Vec::new();
    for l in levels.iter().filter(|l| l.multiplicity > 0) {
        match v.iter_mut().find(|(e, _)| *e == l.eta) {
            Some((_, m)) => *m += l.multiplicity,
            None => v.push((l.eta.clone(), l.multiplicity)),
        }
    }
    v.sort_by(|a, b| a.0.cmp(&b.0));
    v
}

/// A harmonic polynomial of degree `k`: the `H_k` part of a fixed
/// pseudo-random rational polynomial.
fn sample_harmonic(n: usize, k: u32, rng: &mut ChaCha8Rng) -> Result<Polynomial> {
    let mut f = Polynomial::zero(n);
    for idx in homogeneous_indices(n, k) {
        let c: i64 = rng.random_range(-3..=3);
        f.add_term(idx, Coefficient::ratio(c, 5));
    }
    if f.is_zero() {
        f = Polynomial::variable(n, 0).pow(k);
    }
    Ok(harmonic_decompose(&f)?.swap_remove(0))
}

/// Clusters the spectrum of `S`, matches clusters to the merged theoretical
/// levels, and checks `C̃(‖x‖^{2i}h) = η_i ‖x‖^{2i}h` exactly for sampled
/// harmonic `h`. Mismatched cluster structure is an error.
pub fn verify_eigenstructure(bundle: &CovBundle, levels: &[SpectrumLevel], tol: f64) -> Result<SpectrumReport> {
    let n = bundle.basis.n;
    let d = bundle.basis.d;
    let merged = merged_levels(levels);
    let max_eta = merged.last().map(|(e, _)| rational_to_f64(e)).unwrap_or(1.0);
    let clusters = cluster_values(&bundle.eig_s.values, tol * max_eta);
    let sizes: Vec<usize> = clusters.iter().map(|c| c.size).collect();
    let expected: Vec<usize> = merged.iter().map(|(_, m)| *m as usize).collect();
    if sizes != expected {
        return Err(Error::Multiplicity(format!(
            "n={n}, d={d}: cluster sizes {sizes:?}, expected multiplicities {expected:?}"
        )));
    }
    let mut max_rel_dev: f64 = 0.0;
    let mut pos = 0;
    for (eta, m) in &merged {
        let e = rational_to_f64(eta);
        for &v in &bundle.eig_s.values[pos..pos + *m as usize] {
            max_rel_dev = max_rel_dev.max(((v - e) / e).abs());
        }
        pos += *m as usize;
    }

    let mut harmonic_residual: f64 = 0.0;
    if bundle.is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ ((n as u64) << 8) ^ d as u64);
        let norm2 = Polynomial::norm_squared(n);
        for level in levels.iter().filter(|l| l.multiplicity > 0) {
            let h = sample_harmonic(n, d - 2 * level.i, &mut rng)?;
            if h.is_zero() {
                continue;
            }
            let g = norm2.pow(level.i).multiply(&h)?;
            let v = bundle.basis.coordinates(&g)?;
            let cv = bundle.apply_ctilde(&v);
            let eta = Coefficient::Rational(level.eta.clone());
            let res: f64 = cv.iter().zip(&v).map(|(a, b)| (a - &(&eta * b)).to_f64().powi(2)).sum::<f64>().sqrt();
            harmonic_residual = harmonic_residual.max(res);
        }
    }

    Ok(SpectrumReport {
        n,
        d,
        theoretical: levels.to_vec(),
        empirical: bundle.eig_s.values.clone(),
        eigen_c: bundle.eig_c.values.clone(),
        clusters,
        max_rel_dev,
        harmonic_residual,
        interlacing_ok: bundle.interlacing_ok(),
        cluster_tol: tol,
    })
}

/// `max ‖C e_I − λ e_I‖` over multilinear `I`, computed exactly.
pub fn multilinear_eigen_residual(bundle: &CovBundle, lambda: &Coefficient) -> f64 {
    let nb = bundle.basis.len();
    bundle
        .basis
        .indices()
        .iter()
        .enumerate()
        .filter(|(_, i)| i.is_multilinear())
        .map(|(k, _)| {
            (0..nb)
                .map(|r| {
                    let target = if r == k { lambda.clone() } else { Coefficient::zero() };
                    (&bundle.c[r][k] - &target).to_f64().powi(2)
                })
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Measure1D;
    use crate::parse_poly;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn basis_examples() {
        let b = sym_basis(2, 2).unwrap();
        let raw: Vec<Vec<u32>> = b.indices().iter().map(|m| m.entries().to_vec()).collect();
        assert_eq!(raw, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(sym_basis(3, 2).unwrap().len(), 6);
        assert_eq!(sym_basis(1, 5).unwrap().len(), 1);
        assert!(matches!(sym_basis(100, 10), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn ball_entries() {
        let b = cov_matrix_ball(3, 1).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(b.c[i][j], Coefficient::from_int((i == j) as i64));
            }
        }
        let b = cov_matrix_ball(3, 2).unwrap();
        let i200 = b.basis.position(&MultiIndex::new(vec![2, 0, 0])).unwrap();
        let i020 = b.basis.position(&MultiIndex::new(vec![0, 2, 0])).unwrap();
        assert_eq!(b.c[i200][i200], Coefficient::ratio(8, 7));
        assert_eq!(b.c[i200][i020], Coefficient::ratio(-2, 7));
    }

    #[test]
    fn product_entries() {
        let g2 = ProductMeasure::new(Measure1D::standard_gaussian(), 2).unwrap();
        let b = cov_matrix_product(&g2, 1).unwrap();
        assert_eq!(b.c[0][0], Coefficient::one());
        assert_eq!(b.c[0][1], Coefficient::zero());
        let g1 = ProductMeasure::new(Measure1D::standard_gaussian(), 1).unwrap();
        assert_eq!(cov_matrix_product(&g1, 2).unwrap().c[0][0], Coefficient::from_int(2));
        let u = ProductMeasure::new("uniform:iso".parse().unwrap(), 2).unwrap();
        let b = cov_matrix_product(&u, 2).unwrap();
        let k = b.basis.position(&MultiIndex::new(vec![1, 1])).unwrap();
        assert_eq!(b.c[k][k], Coefficient::one());
    }

    #[test]
    fn spectrum_examples() {
        let s = theoretical_spectrum(3, 2).unwrap();
        assert_eq!((s[0].eta.clone(), s[0].multiplicity), (q(5, 7), 5));
        assert_eq!((s[1].eta.clone(), s[1].multiplicity), (q(2, 7), 1));
        assert_eq!(theoretical_spectrum(5, 3).unwrap()[0].eta, q(49, 99));
        let big = theoretical_spectrum(10_000, 3).unwrap()[0].eta_f64();
        assert!((big - 1.0).abs() < 1e-3);
    }

    #[test]
    fn eta_d_half_agrees_with_radial_variance_form() {
        // η_{d/2} = (β_d − β_{d/2}²)/b_{d/2} with the ball's radial moments.
        for n in 2..9 {
            for d in [2u32, 4, 6] {
                let th = theoretical_spectrum(n, d).unwrap();
                let rad = radial_spectrum(n, d, &ball_betas(n, d)).unwrap();
                for (t, (_, e, m)) in th.iter().zip(&rad) {
                    assert_eq!(&Coefficient::Rational(t.eta.clone()), e, "n={n} d={d} i={}", t.i);
                    assert_eq!(t.multiplicity, *m);
                }
            }
        }
    }

    #[test]
    fn multiplicities_sum_to_basis_size() {
        for n in 1..9 {
            for d in 1..6u32 {
                let total: u128 = theoretical_spectrum(n, d).unwrap().iter().map(|l| l.multiplicity).sum();
                assert_eq!(total as usize, sym_basis(n, d).unwrap().len(), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn eigen_example_three_two() {
        let bundle = cov_matrix_ball(3, 2).unwrap();
        let v = &bundle.eig_s.values;
        assert!((v[0] - 2.0 / 7.0).abs() < 1e-12);
        assert!(v[1..].iter().all(|x| (x - 5.0 / 7.0).abs() < 1e-12));
        let report = verify_eigenstructure(&bundle, &theoretical_spectrum(3, 2).unwrap(), DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(report.clusters.iter().map(|c| c.size).collect::<Vec<_>>(), vec![1, 5]);
        assert!(report.max_rel_dev < 1e-10);
        assert_eq!(report.harmonic_residual, 0.0);
        assert!(report.interlacing_ok);
        // λ_1(C) = 4/(n+4).
        assert!((bundle.eig_c.values[0] - 4.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_clusters_four_three_and_three_four() {
        let r =
            verify_eigenstructure(&cov_matrix_ball(4, 3).unwrap(), &theoretical_spectrum(4, 3).unwrap(), 1e-8).unwrap();
        let mut sizes: Vec<usize> = r.clusters.iter().map(|c| c.size).collect();
        sizes.sort();
        assert_eq!(sizes, vec![4, 16]);
        let r =
            verify_eigenstructure(&cov_matrix_ball(3, 4).unwrap(), &theoretical_spectrum(3, 4).unwrap(), 1e-8).unwrap();
        assert_eq!(r.clusters.len(), 3);
        assert_eq!(r.clusters.iter().map(|c| c.size).sum::<usize>(), 15);
    }

    #[test]
    fn harmonic_examples() {
        let parts = harmonic_decompose(&parse_poly("x1*x2", 2).unwrap()).unwrap();
        assert_eq!(parts[0], parse_poly("x1*x2", 2).unwrap());
        assert!(parts[1].is_zero());
        let parts = harmonic_decompose(&Polynomial::norm_squared(3)).unwrap();
        assert!(parts[0].is_zero());
        assert_eq!(parts[1], parse_poly("1", 3).unwrap());
        let parts = harmonic_decompose(&parse_poly("x1^2", 3).unwrap()).unwrap();
        assert_eq!(parts[0], parse_poly("2/3*x1^2 - 1/3*x2^2 - 1/3*x3^2", 3).unwrap());
        assert_eq!(parts[1], parse_poly("1/3", 3).unwrap());
        assert!(harmonic_decompose(&parse_poly("x1^2 + x2", 3).unwrap()).is_err());
    }

    #[test]
    fn gaussian_radial_values() {
        let r = radial_spectrum(6, 2, &gaussian_betas(6, 2)).unwrap();
        assert_eq!(r[1].1, Coefficient::one());
        let r = radial_spectrum(4, 2, &gaussian_betas(4, 2)).unwrap();
        assert_eq!(r[0].1, Coefficient::one());
        assert!(radial_spectrum(4, 2, &[Coefficient::from_int(2), Coefficient::one(), Coefficient::one()]).is_err());
        assert!(radial_spectrum(4, 3, &gaussian_betas(4, 2)).is_err());
    }

    #[test]
    fn multilinear_monomials_are_eigenvectors() {
        let bundle = cov_matrix_ball(4, 3).unwrap();
        let eta0 = Coefficient::Rational(theoretical_spectrum(4, 3).unwrap()[0].eta.clone());
        assert_eq!(multilinear_eigen_residual(&bundle, &eta0), 0.0);
    }

    #[test]
    fn mc_covariance_approximates_exact() {
        use crate::ballgeom::{BallScale, LpBallSpec};
        use crate::mc::BallSampler;
        let s = BallSampler::new(LpBallSpec::new(3, 2.0, BallScale::Isotropic).unwrap());
        let mc = cov_matrix_mc(&s, 2, 200_000, 9).unwrap();
        let exact = cov_matrix_ball(3, 2).unwrap();
        let se = mc.sampling_stderr.unwrap();
        for i in 0..6 {
            for j in 0..6 {
                assert!((mc.c[i][j].to_f64() - exact.c[i][j].to_f64()).abs() < 5.0 * se);
            }
        }
    }
}
