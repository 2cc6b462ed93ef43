use std::collections::BTreeMap;
use std::fmt;

use crate::coeff::Coefficient;
use crate::error::{Error, Result};

use super::multi_index::MultiIndex;

/// Sparse real polynomial in `n` variables.
///
/// Terms are kept in a map keyed by graded-lex multi-index; zero
/// coefficients are never stored, so the zero polynomial has no terms and
/// no degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<MultiIndex, Coefficient>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Polynomial { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Coefficient) -> Self {
        Self::monomial(MultiIndex::zeros(n), c)
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Coefficient::one())
    }

    pub fn monomial(index: MultiIndex, c: Coefficient) -> Self {
        let n = index.dim();
        let mut p = Polynomial::zero(n);
        p.add_term(index, c);
        p
    }

    /// The coordinate function `x_{j+1}`.
    pub fn variable(n: usize, j: usize) -> Self {
        Self::monomial(MultiIndex::unit(n, j), Coefficient::one())
    }

    /// `||x||^2 = x_1^2 + ... + x_n^2`
    pub fn norm_squared(n: usize) -> Self {
        let mut p = Polynomial::zero(n);
        for j in 0..n {
            let mut e = vec![0; n];
            e[j] = 2;
            p.add_term(MultiIndex::new(e), Coefficient::one());
        }
        p
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (MultiIndex, Coefficient)>) -> Result<Self> {
        let mut p = Polynomial::zero(n);
        for (idx, c) in terms {
            if idx.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: idx.dim() });
            }
            p.add_term(idx, c);
        }
        Ok(p)
    }

    /// Adds `c * x^index`, merging with an existing term and dropping the
    /// entry if the result cancels.
    pub fn add_term(&mut self, index: MultiIndex, c: Coefficient) {
        debug_assert_eq!(index.dim(), self.n);
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&index) {
            Some(old) => {
                let sum = old + c;
                if !sum.is_zero() {
                    self.terms.insert(index, sum);
                }
            }
            None => {
                self.terms.insert(index, c);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|k| k.degree())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, index: &MultiIndex) -> Option<&Coefficient> {
        self.terms.get(index)
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &Coefficient)> {
        self.terms.iter()
    }

    pub fn is_exact(&self) -> bool {
        self.terms.values().all(Coefficient::is_exact)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(MultiIndex::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// The degree-`d` part.
    pub fn homogeneous_part(&self, d: u32) -> Polynomial {
        Polynomial {
            n: self.n,
            terms: self.terms.iter().filter(|(k, _)| k.degree() == d).map(|(k, v)| (k.clone(), v.clone())).collect(),
        }
    }

    pub fn map_coefficients(&self, f: impl Fn(&Coefficient) -> Coefficient) -> Polynomial {
        let mut p = Polynomial::zero(self.n);
        for (k, v) in &self.terms {
            p.add_term(k.clone(), f(v));
        }
        p
    }

    pub fn scale(&self, c: &Coefficient) -> Polynomial {
        self.map_coefficients(|v| v * c)
    }

    pub fn to_float(&self) -> Polynomial {
        self.map_coefficients(|v| v.clone().into_float())
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: x.len() });
        }
        Ok(self
            .terms
            .iter()
            .map(|(k, c)| c.to_f64() * k.entries().iter().zip(x).map(|(&e, &xi)| xi.powi(e as i32)).product::<f64>())
            .sum())
    }

    /// A flattened float form for repeated evaluation in Monte Carlo loops.
    pub fn compile(&self) -> CompiledPolynomial {
        CompiledPolynomial {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| {
                    let factors =
                        k.entries().iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i, e as i32)).collect();
                    (c.to_f64(), factors)
                })
                .collect(),
        }
    }

    /// `coeff_d(f)^2 = sum_{|I|=d} alpha_I^2`, exact when the coefficients are.
    pub fn coeff_level_sq(&self, d: u32) -> Coefficient {
        self.terms.iter().filter(|(k, _)| k.degree() == d).map(|(_, c)| c * c).sum()
    }

    /// `coeff_d(f)`, the l2 norm of the degree-`d` coefficients.
    pub fn coeff_level(&self, d: u32) -> f64 {
        self.coeff_level_sq(d).to_f64().sqrt()
    }

    /// `M_d(f)`: the largest absolute top-degree coefficient.
    pub fn max_top_coeff(&self) -> Result<f64> {
        let d = self.degree().ok_or(Error::ZeroPolynomial)?;
        Ok(self.terms.iter().filter(|(k, _)| k.degree() == d).map(|(_, c)| c.to_f64().abs()).fold(0.0, f64::max))
    }

    /// `d^I f` with falling-factorial coefficients.
    pub fn partial_derivative(&self, index: &MultiIndex) -> Result<Polynomial> {
        if index.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: index.dim() });
        }
        let mut out = Polynomial::zero(self.n);
        for (k, c) in &self.terms {
            if let Some(rest) = k.checked_sub(index) {
                let factor = Coefficient::from_bigint(k.falling_factorial(index));
                out.add_term(rest, c * &factor);
            }
        }
        Ok(out)
    }

    pub fn laplacian(&self) -> Polynomial {
        let mut out = Polynomial::zero(self.n);
        for j in 0..self.n {
            let mut e = vec![0; self.n];
            e[j] = 2;
            let second = self.partial_derivative(&MultiIndex::new(e)).expect("dimension matches by construction");
            out = out.add(&second).expect("same dimension");
        }
        out
    }

    /// `Delta^{∘i} f`
    pub fn laplacian_pow(&self, i: u32) -> Polynomial {
        (0..i).fold(self.clone(), |p, _| p.laplacian())
    }

    /// The differential operator `D_f = sum_I a_I d^I` applied to `g`.
    pub fn apply_as_operator(&self, g: &Polynomial) -> Result<Polynomial> {
        self.check_dim(g)?;
        let mut out = Polynomial::zero(self.n);
        for (k, c) in &self.terms {
            let dg = g.partial_derivative(k)?;
            out = out.add(&dg.scale(c))?;
        }
        Ok(out)
    }

    /// `<f, g>_B = sum_I I! a_I b_I` for homogeneous `f`, `g` of equal degree.
    pub fn bombieri_inner(&self, other: &Polynomial) -> Result<Coefficient> {
        self.check_dim(other)?;
        self.check_homogeneous_pair(other)?;
        Ok(self
            .terms
            .iter()
            .filter_map(|(k, a)| other.terms.get(k).map(|b| &(a * b) * &Coefficient::from_bigint(k.factorial())))
            .sum())
    }

    fn check_homogeneous_pair(&self, other: &Polynomial) -> Result<()> {
        if !self.is_homogeneous() || !other.is_homogeneous() {
            return Err(Error::NotHomogeneous);
        }
        match (self.degree(), other.degree()) {
            (Some(a), Some(b)) if a != b => Err(Error::DegreeMismatch(format!("degrees {a} and {b} differ"))),
            _ => Ok(()),
        }
    }

    fn check_dim(&self, other: &Polynomial) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        Ok(())
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), -v.clone());
        }
        Ok(out)
    }

    pub fn multiply(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_dim(other)?;
        let mut out = Polynomial::zero(self.n);
        for (ka, a) in &self.terms {
            for (kb, b) in &other.terms {
                out.add_term(ka.add(kb), a * b);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.n);
        for _ in 0..e {
            acc = acc.multiply(self).expect("same dimension");
        }
        acc
    }

    /// Renames variables: `x_i` becomes `x_{perm[i]}`.
    pub fn permute_variables(&self, perm: &[usize]) -> Polynomial {
        let mut out = Polynomial::zero(self.n);
        for (k, v) in &self.terms {
            out.add_term(k.permute(perm), v.clone());
        }
        out
    }

    /// Coefficient vector on `basis`; entries of `self` outside the basis
    /// are ignored.
    pub fn coordinates(&self, basis: &[MultiIndex]) -> Vec<Coefficient> {
        basis.iter().map(|b| self.terms.get(b).cloned().unwrap_or_else(Coefficient::zero)).collect()
    }

    /// Univariate coefficients `[c_0, c_1, ..., c_d]` when `n == 1`.
    pub fn univariate_coefficients(&self) -> Result<Vec<Coefficient>> {
        if self.n != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: self.n });
        }
        let d = self.degree().unwrap_or(0) as usize;
        let mut out = vec![Coefficient::zero(); d + 1];
        for (k, c) in &self.terms {
            out[k.get(0) as usize] = c.clone();
        }
        Ok(out)
    }

    pub fn from_univariate(coeffs: &[Coefficient]) -> Polynomial {
        let mut p = Polynomial::zero(1);
        for (i, c) in coeffs.iter().enumerate() {
            p.add_term(MultiIndex::new(vec![i as u32]), c.clone());
        }
        p
    }
}

/// Float evaluator built by [`Polynomial::compile`].
#[derive(Debug, Clone)]
pub struct CompiledPolynomial {
    n: usize,
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl CompiledPolynomial {
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for (c, factors) in &self.terms {
            let mut m = *c;
            for &(i, e) in factors {
                m *= x[i].powi(e);
            }
            s += m;
        }
        s
    }
}

impl fmt::Display for Polynomial {
    /// Canonical form: graded-lex descending, explicit `*`, rationals as `p/q`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (pos, (k, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (pos, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mag = c.abs();
            let mono = format_monomial(k);
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        Ok(())
    }
}

fn format_monomial(k: &MultiIndex) -> String {
    let mut parts = Vec::new();
    for (i, &e) in k.entries().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(format!("x{}", i + 1)),
            _ => parts.push(format!("x{}^{}", i + 1, e)),
        }
    }
    parts.join("*")
}
