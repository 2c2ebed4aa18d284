//! Root isolation: exact multiplicities from Yun's decomposition, locations
//! from Aberth–Ehrlich iteration on each squarefree factor, and exact
//! recognition of Gaussian-rational roots.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::GaussianRational;
use crate::error::Error;
use crate::Poly;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Root {
    #[serde(serialize_with = "ser_c64")]
    pub approx: Complex64,
    /// Present when the root lies in Q(i); verified by exact evaluation.
    pub exact: Option<GaussianRational>,
    pub multiplicity: usize,
}

pub(crate) fn ser_c64<S: serde::Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

impl Root {
    /// Exact text form when available, otherwise `re+imi` in decimal.
    pub fn label(&self) -> String {
        match &self.exact {
            Some(g) => g.to_string(),
            None => format_c64(self.approx),
        }
    }
}

pub fn format_c64(z: Complex64) -> String {
    let clean = |x: f64| if x == 0.0 { 0.0 } else { x };
    let (re, im) = (clean(z.re), clean(z.im));
    if im == 0.0 {
        format!("{re}")
    } else if im < 0.0 {
        format!("{re}-{}i", -im)
    } else {
        format!("{re}+{im}i")
    }
}

/// Roots of `p` with exact multiplicities; the multiplicities sum to `deg p`.
///
/// Roots are sorted by real part, then imaginary part.
pub fn roots_with_multiplicity(p: &Poly, tol_root: f64) -> Result<Vec<Root>, Error> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut out = Vec::new();
    for (k, factor) in p.squarefree_decomposition().iter().enumerate() {
        for (approx, exact) in squarefree_roots(factor, tol_root) {
            out.push(Root { approx, exact, multiplicity: k + 1 });
        }
    }
    out.sort_by(|a, b| a.approx.re.total_cmp(&b.approx.re).then(a.approx.im.total_cmp(&b.approx.im)));
    Ok(out)
}

/// Roots of a squarefree polynomial. Exact linear factors are split off
/// first so that the numeric stage only sees the irrational part.
fn squarefree_roots(f: &Poly, tol_root: f64) -> Vec<(Complex64, Option<GaussianRational>)> {
    let mut out = Vec::new();
    let mut rest = f.clone();
    let approx = aberth(&coeffs_c64(f));
    for z in &approx {
        if let Some(g) = recognise(*z, &rest, tol_root) {
            rest = rest.exact_div(&Poly::linear_root(g.clone())).expect("exact root divides");
            out.push((g.to_c64(), Some(g)));
        }
    }
    if rest.degree().unwrap_or(0) > 0 {
        let polished = aberth(&coeffs_c64(&rest));
        out.extend(polished.into_iter().map(|z| (z, None)));
    }
    out
}

fn coeffs_c64(p: &Poly) -> Vec<Complex64> {
    p.coeffs().iter().map(GaussianRational::to_c64).collect()
}

/// Nearest Gaussian rational with a small denominator, kept only if it is an
/// exact root of `f`.
fn recognise(z: Complex64, f: &Poly, tol_root: f64) -> Option<GaussianRational> {
    let tol = tol_root.max(1e-12) * (1.0 + z.norm());
    let re = rationalize(z.re, tol)?;
    let im = rationalize(z.im, tol)?;
    let g = GaussianRational::new(re, im);
    f.eval(&g).is_zero().then_some(g)
}

/// Continued-fraction approximation within `tol`, denominators up to 10⁷.
pub fn rationalize(x: f64, tol: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    const MAX_DEN: i128 = 10_000_000;
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let (h2, k2) = (ai * h1 + h0, ai * k1 + k0);
        if k2 > MAX_DEN {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Some(BigRational::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = r - a;
        if frac == 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// All roots of a polynomial with simple roots, by Aberth–Ehrlich iteration
/// followed by a few Newton steps.
pub fn aberth(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = coeffs[n];
    let c: Vec<Complex64> = coeffs.iter().map(|a| a / lead).collect();
    if n == 1 {
        return vec![-c[0]];
    }
    // Fujiwara bound on root moduli.
    let bound = (0..n)
        .map(|k| {
            let m = c[k].norm();
            if k == 0 { (m / 2.0).powf(1.0 / n as f64) } else { m.powf(1.0 / (n - k) as f64) }
        })
        .fold(0.0, f64::max)
        * 2.0;
    let radius = bound.max(1e-3) * 0.5;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..2000 {
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let (p, dp) = horner(&c, z[k]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[k] -= w;
                worst = worst.max(w.norm() / (1.0 + z[k].norm()));
            }
        }
        if worst < 1e-16 {
            break;
        }
    }
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(&c, *zk);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !step.is_finite() {
                break;
            }
            *zk -= step;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Poly {
        Poly::new(c.iter().map(|&k| GaussianRational::from_integer(k)).collect())
    }

    #[test]
    fn sixth_roots_of_unity() {
        let r = roots_with_multiplicity(&p(&[1, -1, 1]), 1e-8).unwrap();
        assert_eq!(r.len(), 2);
        for root in &r {
            assert!(root.exact.is_none());
            assert_eq!(root.multiplicity, 1);
            assert!((root.approx.re - 0.5).abs() < 1e-12);
            assert!((root.approx.im.abs() - 3f64.sqrt() / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn repeated_and_zero_roots() {
        let r = roots_with_multiplicity(&p(&[-2, 1]).pow(3), 1e-8).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 3);
        assert_eq!(r[0].exact, Some(GaussianRational::from_integer(2)));
        let r = roots_with_multiplicity(&p(&[0, 1]), 1e-8).unwrap();
        assert_eq!(r[0].exact, Some(GaussianRational::zero()));
        assert!(matches!(roots_with_multiplicity(&Poly::zero(), 1e-8), Err(Error::ZeroPolynomial)));
    }

    #[test]
    fn gaussian_rational_roots_are_recognised() {
        let a: GaussianRational = "1/3-2i".parse().unwrap();
        let b: GaussianRational = "-5/2".parse().unwrap();
        let f = &Poly::from_roots(&[a.clone(), b.clone()]) * &p(&[2, 0, 1]);
        let r = roots_with_multiplicity(&f, 1e-8).unwrap();
        let exact: Vec<_> = r.iter().filter_map(|x| x.exact.clone()).collect();
        assert!(exact.contains(&a) && exact.contains(&b));
        assert_eq!(r.iter().map(|x| x.multiplicity).sum::<usize>(), 4);
    }

    #[test]
    fn rationalize_basic() {
        assert_eq!(rationalize(0.75, 1e-12), Some(BigRational::new(3.into(), 4.into())));
        assert_eq!(rationalize(-2.0, 1e-12), Some(BigRational::from_integer((-2).into())));
        assert_eq!(rationalize(std::f64::consts::PI, 1e-15), None);
    }
}
