//! Real roots of univariate rational polynomials: Sturm-sequence isolation
//! in exact arithmetic, then bisection in floating point down to adjacent
//! doubles.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::coeff::rational_to_f64;

/// Ascending coefficients with no trailing zeros; the zero polynomial is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct RatPoly(Vec<BigRational>);

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPoly(coeffs)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn lead(&self) -> &BigRational {
        self.0.last().expect("nonzero polynomial")
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + rational_to_f64(c))
    }

    pub fn derivative(&self) -> RatPoly {
        RatPoly::new(
            self.0.iter().enumerate().skip(1).map(|(k, c)| c * BigRational::from_integer(BigInt::from(k))).collect(),
        )
    }

    pub fn add_constant(&self, c: &BigRational) -> RatPoly {
        let mut v = self.0.clone();
        if v.is_empty() {
            v.push(BigRational::zero());
        }
        v[0] = &v[0] + c;
        RatPoly::new(v)
    }

    fn monic(&self) -> RatPoly {
        let l = self.lead().clone();
        RatPoly(self.0.iter().map(|c| c / &l).collect())
    }

    /// Remainder of division by `d`.
    pub fn rem(&self, d: &RatPoly) -> RatPoly {
        let dd = d.degree().expect("division by zero polynomial");
        let mut r = self.0.clone();
        let dl = d.lead().clone();
        while r.len() > dd && !r.is_empty() {
            let shift = r.len() - 1 - dd;
            let q = r.last().unwrap() / &dl;
            for (k, c) in d.0.iter().enumerate() {
                r[k + shift] = &r[k + shift] - &q * c;
            }
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        RatPoly::new(r)
    }

    /// Exact quotient by `d` (remainder discarded).
    pub fn quot(&self, d: &RatPoly) -> RatPoly {
        let dd = d.degree().expect("division by zero polynomial");
        let Some(nd) = self.degree() else { return RatPoly::new(vec![]) };
        if nd < dd {
            return RatPoly::new(vec![]);
        }
        let mut r = self.0.clone();
        let mut q = vec![BigRational::zero(); nd - dd + 1];
        let dl = d.lead().clone();
        for shift in (0..=nd - dd).rev() {
            let c = &r[shift + dd] / &dl;
            for (k, dc) in d.0.iter().enumerate() {
                r[k + shift] = &r[k + shift] - &c * dc;
            }
            q[shift] = c;
        }
        RatPoly::new(q)
    }

    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    /// `p / gcd(p, p')`: same roots, all simple.
    pub fn square_free(&self) -> RatPoly {
        let g = self.gcd(&self.derivative());
        if g.degree().unwrap_or(0) == 0 {
            self.clone()
        } else {
            self.quot(&g)
        }
    }

    /// Cauchy bound: every real root lies in `(-B, B)`.
    pub fn root_bound(&self) -> BigRational {
        let l = self.lead().abs();
        let m = self.0[..self.0.len() - 1].iter().map(|c| c.abs() / &l).fold(BigRational::zero(), |a, b| {
            if b > a {
                b
            } else {
                a
            }
        });
        m + BigRational::one()
    }
}

fn sign(x: &BigRational) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

struct Sturm(Vec<RatPoly>);

impl Sturm {
    fn new(p: &RatPoly) -> Self {
        let mut chain = vec![p.clone(), p.derivative()];
        loop {
            let k = chain.len();
            if chain[k - 1].is_zero() {
                chain.pop();
                break;
            }
            let r = chain[k - 2].rem(&chain[k - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(RatPoly(r.0.iter().map(|c| -c).collect()));
        }
        Sturm(chain)
    }

    fn variations(&self, x: &BigRational) -> usize {
        let signs: Vec<i8> = self.0.iter().map(|q| sign(&q.eval(x))).filter(|&s| s != 0).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Distinct roots in `(a, b]`.
    fn count(&self, a: &BigRational, b: &BigRational) -> usize {
        self.variations(a) - self.variations(b)
    }
}

/// Distinct real roots of `p`, ascending.
pub fn real_roots(p: &RatPoly) -> Vec<f64> {
    match p.degree() {
        None | Some(0) => return Vec::new(),
        _ => {}
    }
    let sf = p.square_free();
    let sturm = Sturm::new(&sf);
    let b = sf.root_bound();
    let mut brackets = Vec::new();
    isolate(&sturm, -b.clone(), b, &mut brackets);
    let mut roots: Vec<f64> = brackets.into_iter().map(|(a, b)| refine(&sf, a, b)).collect();
    roots.sort_by(f64::total_cmp);
    roots
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

fn isolate(sturm: &Sturm, a: BigRational, b: BigRational, out: &mut Vec<(BigRational, BigRational)>) {
    match sturm.count(&a, &b) {
        0 => {}
        1 => out.push((a, b)),
        _ => {
            let m = (&a + &b) * half();
            isolate(sturm, a, m.clone(), out);
            isolate(sturm, m, b, out);
        }
    }
}

/// Root of square-free `p` in `(a, b]`, knowing it is the only one there.
fn refine(p: &RatPoly, mut a: BigRational, mut b: BigRational) -> f64 {
    if p.eval(&b).is_zero() {
        return rational_to_f64(&b);
    }
    // Move the open end `a` off a neighbouring root.
    let sturm = Sturm::new(p);
    while p.eval(&a).is_zero() {
        let m = (&a + &b) * half();
        if p.eval(&m).is_zero() {
            return rational_to_f64(&m);
        }
        if sturm.count(&m, &b) == 1 {
            a = m;
        } else {
            b = m;
        }
    }
    let sa = sign(&p.eval(&a));
    let (mut lo, mut hi) = (rational_to_f64(&a), rational_to_f64(&b));
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = p.eval_f64(mid);
        if v == 0.0 {
            return mid;
        }
        if (v > 0.0) == (sa > 0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> RatPoly {
        RatPoly::new(c.iter().map(|&v| BigRational::from_integer(v.into())).collect())
    }

    #[test]
    fn simple_roots() {
        // (x-1)(x+2)(x-3) = x³ - 2x² - 5x + 6
        let r = real_roots(&poly(&[6, -5, -2, 1]));
        assert_eq!(r.len(), 3);
        for (a, b) in r.iter().zip([-2.0, 1.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn repeated_and_irrational_roots() {
        // (x-1)²(x²-2)
        let p = poly(&[-2, 4, -1, -2, 1]);
        let r = real_roots(&p);
        let s2 = 2f64.sqrt();
        assert_eq!(r.len(), 3);
        assert!((r[0] + s2).abs() < 1e-12 && (r[1] - 1.0).abs() < 1e-12 && (r[2] - s2).abs() < 1e-12);
        assert!(real_roots(&poly(&[1, 0, 1])).is_empty());
    }

    #[test]
    fn root_at_bisection_point() {
        // Roots at 0 and ±1/2 land on exact midpoints of the Cauchy interval.
        let r = real_roots(&RatPoly::new(vec![
            BigRational::zero(),
            BigRational::new((-1).into(), 4.into()),
            BigRational::zero(),
            BigRational::one(),
        ]));
        assert_eq!(r.len(), 3);
        assert!((r[0] + 0.5).abs() < 1e-12 && r[1].abs() < 1e-12 && (r[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn clustered_roots() {
        // (x - 1)(x - 1.001)(x + 7)
        let p = RatPoly::new(vec![
            BigRational::new(7007.into(), 1000.into()),
            BigRational::new((-13006).into(), 1000.into()),
            BigRational::new(4999.into(), 1000.into()),
            BigRational::one(),
        ]);
        let r = real_roots(&p);
        assert_eq!(r.len(), 3);
        assert!((r[1] - 1.0).abs() < 1e-11 && (r[2] - 1.001).abs() < 1e-11);
    }
}
