//! Monte Carlo and quadrature estimators for variance, small-ball
//! probabilities, characteristic functions and one-dimensional restricted
//! oscillatory integrals.

use num_complex::Complex64;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::mc::{chunk_rng, require_samples, run_chunks, PowerSums, Sampler};
use crate::measures::{Measure1D, Shape};
use crate::polyalg::{CompiledPolynomial, MultiIndex, Polynomial};
use crate::quadrature::{gk15, integrate, QuadOptions};
use crate::roots::{real_roots, RatPoly};

pub const MIN_VARIANCE_SAMPLES: usize = 1_000;
pub const MIN_CHF_SAMPLES: usize = 10_000;
/// Points with `|J| ≤ NOISE_FACTOR·stderr` are excluded from decay fits.
pub const NOISE_FACTOR: f64 = 10.0;
pub const MIN_FIT_POINTS: usize = 5;
/// Half-period panels allowed in one restricted oscillatory integral.
pub const PANEL_BUDGET: usize = 2_000_000;
pub const OSCILLATORY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mc,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateReport {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: Option<u64>,
    pub method: Method,
}

impl EstimateReport {
    fn mc(value: f64, stderr: f64, samples: usize, seed: u64) -> Self {
        EstimateReport { value, stderr, samples: samples as u64, seed: Some(seed), method: Method::Mc }
    }

    /// `|value − target| ≤ k·stderr`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.stderr
    }
}

fn compile_for(f: &Polynomial, sampler: &(impl Sampler + ?Sized)) -> Result<CompiledPolynomial> {
    if f.dim() > sampler.dim() {
        return Err(Error::DimensionMismatch { expected: sampler.dim(), found: f.dim() });
    }
    Ok(f.compile())
}

/// Unbiased sample variance of `f(X)`. Values are shifted by a pilot mean
/// taken from the start of the first chunk before the power sums are formed.
pub fn variance_mc(
    f: &Polynomial,
    sampler: &(impl Sampler + ?Sized),
    samples: usize,
    seed: u64,
) -> Result<EstimateReport> {
    require_samples(samples, MIN_VARIANCE_SAMPLES)?;
    let g = compile_for(f, sampler)?;
    let n = g.dim();

    let mut rng = chunk_rng(seed, 0);
    let mut x = vec![0.0; sampler.dim()];
    let pilot_len = samples.min(4096);
    let mut pilot = 0.0;
    for _ in 0..pilot_len {
        sampler.sample_into(&mut rng, &mut x);
        pilot += g.eval(&x[..n]);
    }
    let shift = pilot / pilot_len as f64;

    let sums = run_chunks(
        sampler,
        samples,
        seed,
        PowerSums::default,
        |a, x| a.push(g.eval(&x[..n]) - shift),
        PowerSums::merge,
    );
    Ok(EstimateReport::mc(sums.variance(), sums.variance_stderr(), samples, seed))
}

/// `P(|f(X) − y| ≤ ε)` for every `ε` in `eps`, from one pass over the samples.
pub fn sublevel_mc_grid(
    f: &Polynomial,
    sampler: &(impl Sampler + ?Sized),
    eps: &[f64],
    y: f64,
    samples: usize,
    seed: u64,
) -> Result<Vec<EstimateReport>> {
    if let Some(e) = eps.iter().find(|e| !(**e > 0.0)) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {e}")));
    }
    require_samples(samples, 1)?;
    let g = compile_for(f, sampler)?;
    let n = g.dim();
    let counts = run_chunks(
        sampler,
        samples,
        seed,
        || vec![0u64; eps.len()],
        |c, x| {
            let r = (g.eval(&x[..n]) - y).abs();
            for (cj, e) in c.iter_mut().zip(eps) {
                *cj += (r <= *e) as u64;
            }
        },
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    );
    let total = samples as f64;
    Ok(counts
        .into_iter()
        .map(|c| {
            let p = c as f64 / total;
            EstimateReport::mc(p, (p * (1.0 - p) / total).sqrt(), samples, seed)
        })
        .collect())
}

pub fn sublevel_mc(
    f: &Polynomial,
    sampler: &(impl Sampler + ?Sized),
    eps: f64,
    y: f64,
    samples: usize,
    seed: u64,
) -> Result<EstimateReport> {
    Ok(sublevel_mc_grid(f, sampler, &[eps], y, samples, seed)?[0])
}

#[derive(Debug, Clone, Copy, Default)]
struct TrigSums {
    c: f64,
    s: f64,
    cc: f64,
    ss: f64,
    cs: f64,
}

/// `|E e^{i t f(X)}|` on each `t`. The standard error is the delta-method
/// projection of the complex-mean covariance onto the direction of the mean.
pub fn chf_mc(
    f: &Polynomial,
    sampler: &(impl Sampler + ?Sized),
    ts: &[f64],
    samples: usize,
    seed: u64,
) -> Result<Vec<EstimateReport>> {
    require_samples(samples, MIN_CHF_SAMPLES)?;
    let g = compile_for(f, sampler)?;
    let n = g.dim();
    let sums = run_chunks(
        sampler,
        samples,
        seed,
        || vec![TrigSums::default(); ts.len()],
        |acc, x| {
            let v = g.eval(&x[..n]);
            for (a, t) in acc.iter_mut().zip(ts) {
                let (s, c) = (t * v).sin_cos();
                a.c += c;
                a.s += s;
                a.cc += c * c;
                a.ss += s * s;
                a.cs += c * s;
            }
        },
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                x.c += y.c;
                x.s += y.s;
                x.cc += y.cc;
                x.ss += y.ss;
                x.cs += y.cs;
            }
            a
        },
    );
    let m = samples as f64;
    Ok(sums
        .into_iter()
        .map(|a| {
            let (mc, ms) = (a.c / m, a.s / m);
            let vcc = (a.cc / m - mc * mc).max(0.0);
            let vss = (a.ss / m - ms * ms).max(0.0);
            let vcs = a.cs / m - mc * ms;
            let modulus = mc.hypot(ms);
            let var = if modulus > 1e-300 {
                let (uc, us) = (mc / modulus, ms / modulus);
                (uc * uc * vcc + us * us * vss + 2.0 * uc * us * vcs).max(0.0)
            } else {
                0.5 * (vcc + vss)
            };
            EstimateReport::mc(modulus, (var / m).sqrt(), samples, seed)
        })
        .collect())
}

/// `per_decade` logarithmically spaced points from `t_min` to `t_max`
/// inclusive.
pub fn log_grid(t_min: f64, t_max: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_max >= t_min && per_decade > 0) {
        return Err(Error::InvalidArgument(format!("bad grid [{t_min}, {t_max}] with {per_decade} points per decade")));
    }
    let (a, b) = (t_min.log10(), t_max.log10());
    let steps = ((b - a) * per_decade as f64).round() as usize;
    if steps == 0 {
        return Ok(vec![t_min]);
    }
    Ok((0..=steps).map(|k| 10f64.powf(a + (b - a) * k as f64 / steps as f64)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FitMode {
    /// Every clean point as measured.
    #[default]
    Raw,
    /// Each point replaced by the largest clean value at the same or larger
    /// `t`, which removes the zeros of oscillating transforms.
    Envelope,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Least-squares slope of `log|J|` against `log t` over the points with
/// `t > 0` and `|J| > NOISE_FACTOR·stderr`.
pub fn decay_exponent_fit(ts: &[f64], reports: &[EstimateReport], mode: FitMode) -> Result<DecayFit> {
    if ts.len() != reports.len() {
        return Err(Error::DimensionMismatch { expected: ts.len(), found: reports.len() });
    }
    let mut pts: Vec<(f64, f64)> = ts
        .iter()
        .zip(reports)
        .filter(|(t, r)| **t > 0.0 && r.value > 0.0 && r.value > NOISE_FACTOR * r.stderr)
        .map(|(t, r)| (*t, r.value))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData { required: MIN_FIT_POINTS, found: pts.len() });
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if mode == FitMode::Envelope {
        let mut best = 0.0f64;
        for p in pts.iter_mut().rev() {
            best = best.max(p.1);
            p.1 = best;
        }
    }
    let k = pts.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = pts.iter().map(|(t, v)| (t.ln(), v.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData { required: 2, found: 1 });
    }
    let slope = sxy / sxx;
    Ok(DecayFit { slope, intercept: my - slope * mx, points: pts.len() })
}

/// `P / (d·(ε/coeff_d)^{1/d})`.
pub fn smallball_ratio(p: f64, eps: f64, d: u32, coeff_d: f64) -> f64 {
    p / (d as f64 * (eps / coeff_d).powf(1.0 / d as f64))
}

/// `|J(t)|·(M_d|t|)^{1/d} / d`.
pub fn decay_ratio(j: f64, t: f64, d: u32, m_d: f64) -> f64 {
    j * (m_d * t.abs()).powf(1.0 / d as f64) / d as f64
}

/// Sorted disjoint closed intervals; endpoints may be infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct IntervalUnion {
    pub intervals: Vec<(f64, f64)>,
}

impl IntervalUnion {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= x && x <= b)
    }

    /// Intersection with `[lo, hi]`, dropping pieces of zero length.
    pub fn clip(&self, lo: f64, hi: f64) -> IntervalUnion {
        IntervalUnion {
            intervals: self.intervals.iter().map(|&(a, b)| (a.max(lo), b.min(hi))).filter(|(a, b)| a < b).collect(),
        }
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }
}

fn to_rational(c: &Coefficient) -> BigRational {
    match c.as_rational() {
        Some(r) => r.clone(),
        None => BigRational::from_float(c.to_f64()).expect("finite coefficient"),
    }
}

fn rat_poly(g: &Polynomial) -> Result<RatPoly> {
    Ok(RatPoly::new(g.univariate_coefficients()?.iter().map(to_rational).collect()))
}

/// `{x : |g(x)| ≥ θ}` for a univariate `g`. Endpoints are the real roots of
/// `g ∓ θ`; each gap between consecutive endpoints is classified by the
/// sign of `|g| − θ` at an interior point, and isolated touching points are
/// dropped.
pub fn region_above_threshold(g: &Polynomial, theta: f64) -> Result<IntervalUnion> {
    if g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::InvalidArgument(format!("threshold must be positive, got {theta}")));
    }
    let p = rat_poly(g)?;
    if p.degree() == Some(0) {
        let whole = p.eval_f64(0.0).abs() >= theta;
        return Ok(IntervalUnion { intervals: if whole { vec![(f64::NEG_INFINITY, f64::INFINITY)] } else { vec![] } });
    }
    let th = BigRational::from_float(theta).expect("finite threshold");
    let (upper, lower) = (p.add_constant(&-th.clone()), p.add_constant(&th));
    let mut cuts = real_roots(&upper);
    cuts.extend(real_roots(&lower));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let inside = |x: f64| p.eval_f64(x).abs() >= theta;
    let mut edges = vec![f64::NEG_INFINITY];
    edges.extend(&cuts);
    edges.push(f64::INFINITY);
    let mut out: Vec<(f64, f64)> = Vec::new();
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        let probe = match (a.is_finite(), b.is_finite()) {
            (false, false) => 0.0,
            (false, true) => b - 1.0,
            (true, false) => a + 1.0,
            (true, true) => 0.5 * (a + b),
        };
        if !inside(probe) {
            continue;
        }
        match out.last_mut() {
            Some(last) if last.1 == a => last.1 = b,
            _ => out.push((a, b)),
        }
    }
    Ok(IntervalUnion { intervals: out })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillatoryResult {
    #[serde(skip)]
    pub value: Complex64,
    pub modulus: f64,
    pub error: f64,
    pub panels: usize,
}

impl OscillatoryResult {
    pub fn report(&self) -> EstimateReport {
        EstimateReport {
            value: self.modulus,
            stderr: self.error,
            samples: self.panels as u64,
            seed: None,
            method: Method::Quadrature,
        }
    }
}

/// Inverse of a monotone `f` on `[a, b]` at level `v` by bisection.
fn invert_monotone(f: &impl Fn(f64) -> f64, a: f64, b: f64, v: f64) -> f64 {
    let increasing = f(b) >= f(a);
    let (mut lo, mut hi) = (a, b);
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        if (f(m) < v) == increasing {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}

/// `∫ e^{i t f(x)} dμ(x)` over `{x : |f^{(k)}(x)| ≥ 1}` intersected with the
/// effective window of `μ`.
///
/// Each maximal piece is split at the critical points of `f` and the kink of
/// the density, then into panels across which `t·f` changes by at most `π`.
/// Panels run in parallel and are summed in order.
pub fn restricted_oscillatory_integral(f: &Polynomial, mu: &Measure1D, k: u32, t: f64) -> Result<OscillatoryResult> {
    let deg = f.degree().ok_or(Error::ZeroPolynomial)?;
    if f.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: f.dim() });
    }
    if k == 0 || k > deg {
        return Err(Error::InvalidArgument(format!("derivative order {k} must lie in 1..={deg}")));
    }
    let fk = f.partial_derivative(&MultiIndex::new(vec![k]))?;
    let (lo, hi) = mu.effective_window();
    let region = region_above_threshold(&fk, 1.0)?.clip(lo, hi);

    let rp = rat_poly(f)?;
    let fx = |x: f64| rp.eval_f64(x);
    let mut breaks: Vec<f64> = real_roots(&rp.derivative());
    if !matches!(mu.shape(), Shape::Uniform | Shape::Gaussian) {
        breaks.push(mu.center().to_f64());
    }

    let mut pieces: Vec<(f64, f64)> = Vec::new();
    for &(a, b) in &region.intervals {
        let mut cut = vec![a];
        cut.extend(breaks.iter().copied().filter(|&x| a < x && x < b));
        cut.push(b);
        cut.sort_by(f64::total_cmp);
        pieces.extend(cut.windows(2).map(|w| (w[0], w[1])));
    }

    let counts: Vec<usize> = pieces
        .iter()
        .map(|&(a, b)| {
            let half_periods = (t * (fx(b) - fx(a))).abs() / std::f64::consts::PI;
            (half_periods.ceil() as usize).max(1)
        })
        .collect();
    let needed: usize = counts.iter().sum();
    let over_budget = needed > PANEL_BUDGET;
    let scale = if over_budget { PANEL_BUDGET as f64 / needed as f64 } else { 1.0 };

    let mut panels: Vec<(f64, f64)> = Vec::new();
    for (&(a, b), &m) in pieces.iter().zip(&counts) {
        let m = ((m as f64 * scale).ceil() as usize).max(1);
        let (fa, fb) = (fx(a), fx(b));
        let mut prev = a;
        for j in 1..m {
            let x = invert_monotone(&fx, a, b, fa + (fb - fa) * j as f64 / m as f64);
            panels.push((prev, x));
            prev = x;
        }
        panels.push((prev, b));
    }

    let per_panel_tol = (0.1 * OSCILLATORY_TOL / panels.len().max(1) as f64).max(1e-17);
    let opts = QuadOptions { abs_tol: per_panel_tol, rel_tol: 1e-13, max_subintervals: 64 };
    let integrand = |x: f64| Complex64::from_polar(mu.density(x), t * fx(x));
    let parts: Vec<(Complex64, f64)> = panels
        .par_iter()
        .map(|&(a, b)| {
            if over_budget {
                // Single rule per panel: only the achieved error is wanted.
                gk15(&integrand, a, b)
            } else {
                let r = integrate(integrand, a, b, opts);
                (r.value, r.error)
            }
        })
        .collect();
    let (value, error) = parts.iter().fold((Complex64::new(0.0, 0.0), 0.0), |(v, e), (pv, pe)| (v + pv, e + pe));
    if over_budget || error > OSCILLATORY_TOL {
        return Err(Error::PanelBudget { achieved_error: error });
    }
    Ok(OscillatoryResult { value, modulus: value.norm(), error, panels: panels.len() })
}

/// `|I|·|t|^{1/k} / (d·k)`.
pub fn restricted_ratio(modulus: f64, t: f64, d: u32, k: u32) -> f64 {
    modulus * t.abs().powf(1.0 / k as f64) / (d as f64 * k as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ballgeom::{BallScale, LpBallSpec};
    use crate::mc::BallSampler;
    use crate::measures::ProductMeasure;
    use crate::parse_poly;
    use std::f64::consts::PI;

    fn iso_uniform() -> Measure1D {
        Measure1D::standard_uniform().isotropize().unwrap()
    }

    #[test]
    fn variance_of_coordinate_and_product() {
        let g3 = ProductMeasure::new(Measure1D::standard_gaussian(), 3).unwrap();
        let r = variance_mc(&parse_poly("x1", 3).unwrap(), &g3, 1_000_000, 7).unwrap();
        assert!(r.within(1.0, 4.0), "{r:?}");
        let u2 = ProductMeasure::new(iso_uniform(), 2).unwrap();
        let r = variance_mc(&parse_poly("x1*x2", 2).unwrap(), &u2, 400_000, 8).unwrap();
        assert!(r.within(1.0, 4.0), "{r:?}");
        assert!(variance_mc(&parse_poly("x1", 3).unwrap(), &g3, 999, 1).is_err());
    }

    #[test]
    fn variance_of_ball_norm_direction() {
        let n = 16;
        let s = BallSampler::new(LpBallSpec::new(n, 2.0, BallScale::Isotropic).unwrap());
        let f = Polynomial::norm_squared(n).scale(&Coefficient::Float(1.0 / (n as f64).sqrt()));
        let r = variance_mc(&f, &s, 400_000, 3).unwrap();
        assert!(r.within(0.2, 4.0), "{r:?}");
    }

    #[test]
    fn sublevel_of_coordinate() {
        let u = ProductMeasure::new(iso_uniform(), 1).unwrap();
        let x = parse_poly("x1", 1).unwrap();
        let r = sublevel_mc(&x, &u, 0.1, 0.0, 400_000, 5).unwrap();
        assert!(r.within(0.1 / 3f64.sqrt(), 4.0), "{r:?}");
        assert_eq!(sublevel_mc(&x, &u, 1e6, 0.0, 1000, 5).unwrap().value, 1.0);
        assert!(sublevel_mc(&x, &u, 0.0, 0.0, 1000, 5).is_err());
    }

    #[test]
    fn chf_closed_forms() {
        let u = ProductMeasure::new(iso_uniform(), 1).unwrap();
        let x = parse_poly("x1", 1).unwrap();
        let r = chf_mc(&x, &u, &[0.0, PI], 200_000, 11).unwrap();
        assert_eq!(r[0].value, 1.0);
        let a = 3f64.sqrt() * PI;
        assert!(r[1].within((a.sin() / a).abs(), 4.0), "{:?}", r[1]);

        let g = ProductMeasure::new(Measure1D::standard_gaussian(), 1).unwrap();
        let r = chf_mc(&parse_poly("x1^2", 1).unwrap(), &g, &[1.0], 200_000, 12).unwrap();
        assert!(r[0].within(5f64.powf(-0.25), 4.0), "{:?}", r[0]);
    }

    #[test]
    fn mc_reports_reproduce() {
        let g = ProductMeasure::new(Measure1D::standard_gaussian(), 2).unwrap();
        let f = parse_poly("x1^2*x2 - x2", 2).unwrap();
        let ts = [0.5, 1.0, 2.0];
        assert_eq!(chf_mc(&f, &g, &ts, 50_000, 9).unwrap(), chf_mc(&f, &g, &ts, 50_000, 9).unwrap());
        assert_eq!(variance_mc(&f, &g, 50_000, 9).unwrap(), variance_mc(&f, &g, 50_000, 9).unwrap());
    }

    fn exact_reports(ts: &[f64], f: impl Fn(f64) -> f64) -> Vec<EstimateReport> {
        ts.iter()
            .map(|&t| EstimateReport { value: f(t), stderr: 0.0, samples: 0, seed: None, method: Method::Quadrature })
            .collect()
    }

    #[test]
    fn decay_fits() {
        let ts = log_grid(10.0, 1e3, 8).unwrap();
        let s3 = 3f64.sqrt();
        let sinc = exact_reports(&ts, |t| ((s3 * t).sin() / (s3 * t)).abs());
        let fit = decay_exponent_fit(&ts, &sinc, FitMode::Envelope).unwrap();
        assert!((fit.slope + 1.0).abs() < 0.1, "{fit:?}");

        let gsq = exact_reports(&ts, |t| (1.0 + 4.0 * t * t).powf(-0.25));
        let fit = decay_exponent_fit(&ts, &gsq, FitMode::Raw).unwrap();
        assert!((fit.slope + 0.5).abs() < 0.05, "{fit:?}");

        let flat = exact_reports(&ts, |_| 0.3);
        assert!(decay_exponent_fit(&ts, &flat, FitMode::Raw).unwrap().slope.abs() < 1e-12);

        let noisy: Vec<EstimateReport> = flat.iter().map(|r| EstimateReport { stderr: 0.1, ..*r }).collect();
        assert!(matches!(decay_exponent_fit(&ts, &noisy, FitMode::Raw), Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn log_grid_spacing() {
        let g = log_grid(1.0, 100.0, 8).unwrap();
        assert_eq!(g.len(), 17);
        assert!((g[8] - 10.0).abs() < 1e-12 && (g[16] - 100.0).abs() < 1e-12);
    }

    #[test]
    fn regions() {
        let x = parse_poly("x1", 1).unwrap();
        let r = region_above_threshold(&x, 1.0).unwrap();
        assert_eq!(r.intervals, vec![(f64::NEG_INFINITY, -1.0), (1.0, f64::INFINITY)]);

        let r = region_above_threshold(&parse_poly("x1^2", 1).unwrap(), 4.0).unwrap();
        assert_eq!(r.intervals, vec![(f64::NEG_INFINITY, -2.0), (2.0, f64::INFINITY)]);

        let g = parse_poly("3*x1^2 - 1", 1).unwrap();
        let r = region_above_threshold(&g, 1.0).unwrap();
        let c = (2.0f64 / 3.0).sqrt();
        assert_eq!(r.len(), 2);
        assert!((r.intervals[0].1 + c).abs() < 1e-12 && (r.intervals[1].0 - c).abs() < 1e-12);
        // Independent check: dense sign sampling agrees away from endpoints.
        for i in 0..20001 {
            let x = -3.0 + 6.0 * i as f64 / 20000.0;
            let v = (3.0 * x * x - 1.0f64).abs();
            if (v - 1.0).abs() > 1e-9 {
                assert_eq!(r.contains(x), v >= 1.0, "x = {x}");
            }
        }

        let r = region_above_threshold(&parse_poly("1/2", 1).unwrap(), 1.0).unwrap();
        assert!(r.is_empty());
        let r = region_above_threshold(&parse_poly("2", 1).unwrap(), 1.0).unwrap();
        assert_eq!(r.intervals, vec![(f64::NEG_INFINITY, f64::INFINITY)]);
        let r = region_above_threshold(&parse_poly("-1", 1).unwrap(), 1.0).unwrap();
        assert_eq!(r.intervals, vec![(f64::NEG_INFINITY, f64::INFINITY)]);
        assert!(region_above_threshold(&x, 0.0).is_err());
    }

    #[test]
    fn linear_phase_matches_chf() {
        let x = parse_poly("x1", 1).unwrap();
        let u = iso_uniform();
        let s3 = 3f64.sqrt();
        for t in [0.5, 3.0, 40.0] {
            let r = restricted_oscillatory_integral(&x, &u, 1, t).unwrap();
            assert!((r.value.re - (s3 * t).sin() / (s3 * t)).abs() < 1e-8 && r.value.im.abs() < 1e-8);
        }
        let g = Measure1D::standard_gaussian();
        for t in [0.5, 2.0, 5.0] {
            let r = restricted_oscillatory_integral(&x, &g, 1, t).unwrap();
            assert!((r.value.re - (-0.5 * t * t).exp()).abs() < 1e-8, "{t}: {:?}", r.value);
        }
    }

    /// Composite Simpson rule on a fine uniform grid, used as an oracle.
    fn simpson(f: impl Fn(f64) -> Complex64, a: f64, b: f64, m: usize) -> Complex64 {
        let h = (b - a) / (2 * m) as f64;
        let mut s = f(a) + f(b);
        for j in 1..2 * m {
            s += f(a + j as f64 * h) * if j % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * (h / 3.0)
    }

    #[test]
    fn fresnel_case() {
        let f = parse_poly("1/2*x1^2", 1).unwrap();
        let u = iso_uniform();
        let t = 50.0;
        let r = restricted_oscillatory_integral(&f, &u, 2, t).unwrap();
        let s3 = 3f64.sqrt();
        let oracle = simpson(|x| Complex64::from_polar(1.0 / (2.0 * s3), t * x * x / 2.0), -s3, s3, 1_000_000);
        assert!((r.value - oracle).norm() < 1e-6, "{:?} vs {oracle:?}", r.value);
        assert!(r.error < 1e-8);
    }

    #[test]
    fn zero_frequency_gives_region_mass() {
        // |f''| = |6x| ≥ 1 on |x| ≥ 1/6.
        let f = parse_poly("x1^3", 1).unwrap();
        let u = iso_uniform();
        let r = restricted_oscillatory_integral(&f, &u, 2, 0.0).unwrap();
        let s3 = 3f64.sqrt();
        assert!((r.value.re - (s3 - 1.0 / 6.0) / s3).abs() < 1e-12);
        let g = Measure1D::standard_gaussian();
        let r = restricted_oscillatory_integral(&f, &g, 2, 0.0).unwrap();
        let mass = statrs::function::erf::erfc(1.0 / 6.0 / 2f64.sqrt());
        assert!((r.value.re - mass).abs() < 1e-10);
    }

    #[test]
    fn panel_budget_is_reported() {
        let f = parse_poly("x1^5", 1).unwrap();
        let g = Measure1D::standard_gaussian();
        assert!(matches!(restricted_oscillatory_integral(&f, &g, 1, 1e9), Err(Error::PanelBudget { .. })));
        assert!(restricted_oscillatory_integral(&f, &g, 6, 1.0).is_err());
    }
}
