//! Knot and four-manifold invariants from Seifert matrices.
//!
//! `σ_x` is the Levine–Tristram signature at `ω = e^{2πix}`, with `x` read
//! mod 1. Casson invariants and instanton counts are inputs, never computed.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::covers::{lambda_cohomology, order_ideal, seifert_presentation};
use crate::error::{Error, Result};
use crate::exactalg::{poly_det, roots_with_multiplicity, Matrix};
use crate::json::ratio_str;
use crate::{ExactMatrix, GaussianRational, Poly};

/// Integer Seifert matrix with `det(V − Vᵀ) = ±1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SeifertJson", into = "SeifertJson")]
pub struct SeifertMatrix {
    entries: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct SeifertJson {
    #[serde(rename = "V")]
    v: Vec<Vec<i64>>,
}

impl TryFrom<SeifertJson> for SeifertMatrix {
    type Error = Error;
    fn try_from(j: SeifertJson) -> Result<Self> {
        SeifertMatrix::new(j.v)
    }
}

impl From<SeifertMatrix> for SeifertJson {
    fn from(s: SeifertMatrix) -> Self {
        SeifertJson { v: s.entries }
    }
}

impl SeifertMatrix {
    pub fn new(entries: Vec<Vec<i64>>) -> Result<Self> {
        let n = entries.len();
        if entries.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidSeifert("matrix is not square".into()));
        }
        if !n.is_multiple_of(2) {
            return Err(Error::InvalidSeifert(format!("odd size {n}")));
        }
        let s = SeifertMatrix { entries };
        let v = s.to_exact();
        let det = (&v - &v.transpose()).det();
        if det != GaussianRational::one() && det != -GaussianRational::one() {
            return Err(Error::InvalidSeifert(format!("det(V - V^T) = {det}")));
        }
        Ok(s)
    }

    pub fn unknot() -> Self {
        SeifertMatrix { entries: Vec::new() }
    }

    pub fn trefoil() -> Self {
        SeifertMatrix { entries: vec![vec![-1, 1], vec![0, -1]] }
    }

    pub fn figure_eight() -> Self {
        SeifertMatrix { entries: vec![vec![1, 1], vec![0, -1]] }
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    pub fn to_exact(&self) -> ExactMatrix {
        let n = self.size();
        Matrix::from_fn(n, n, |i, j| GaussianRational::from_integer(self.entries[i][j]))
    }
}

/// `det(V − tVᵀ)` with powers of `t` removed and a positive leading term.
pub fn alexander_poly(v: &SeifertMatrix) -> Poly {
    let n = v.size();
    let e = &v.entries;
    let m = Matrix::from_fn(n, n, |i, j| {
        Poly::new(vec![GaussianRational::from_integer(e[i][j]), GaussianRational::from_integer(-e[j][i])])
    });
    normalize_alexander(&poly_det(&m))
}

fn normalize_alexander(p: &Poly) -> Poly {
    let p = p.shift_down(p.valuation());
    match p.lead() {
        Some(c) if c.re().is_negative() => p.scale(&-GaussianRational::one()),
        _ => p,
    }
}

/// Alexander polynomial read off the Smith form of `tV − Vᵀ`.
pub fn alexander_from_presentation(v: &SeifertMatrix, tol_root: f64) -> Result<Poly> {
    let t = lambda_cohomology(&seifert_presentation(&v.to_exact()), tol_root)?;
    Ok(order_ideal(&t, 1))
}

/// Equality up to multiplication by a nonzero constant and a power of `t`.
pub fn same_up_to_unit(p: &Poly, q: &Poly) -> bool {
    let p = p.shift_down(p.valuation());
    let q = q.shift_down(q.valuation());
    match (p.degree(), q.degree()) {
        (Some(_), Some(_)) => p.monic() == q.monic(),
        (a, b) => a == b,
    }
}

fn reduce_mod_one(x: &BigRational) -> BigRational {
    x - x.floor()
}

pub fn omega_of(x: &BigRational) -> Complex64 {
    let f = reduce_mod_one(x).to_f64().unwrap_or(0.0);
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * f)
}

/// `(1 − ω)V + (1 − ω̄)Vᵀ`.
pub fn hermitian_form(v: &SeifertMatrix, omega: Complex64) -> DMatrix<Complex64> {
    let n = v.size();
    let a = Complex64::new(1.0, 0.0) - omega;
    let b = a.conj();
    DMatrix::from_fn(n, n, |i, j| a * v.entries[i][j] as f64 + b * v.entries[j][i] as f64)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub signature: i64,
    pub nullity: usize,
    /// `ω` is a root of the Alexander polynomial.
    pub jump_point: bool,
}

pub fn levine_tristram(v: &SeifertMatrix, x: &BigRational, cfg: &RunConfig) -> Result<Signature> {
    if x.is_integer() {
        return Err(Error::OmegaOne);
    }
    let omega = omega_of(x);
    if v.size() == 0 {
        return Ok(Signature { signature: 0, nullity: 0, jump_point: false });
    }
    let h = hermitian_form(v, omega);
    let scale = h.iter().map(|c| c.norm()).fold(1.0, f64::max);
    let eig = h.symmetric_eigenvalues();
    let thresh = cfg.tol_rank * scale * v.size().max(1) as f64;
    let pos = eig.iter().filter(|&&l| l > thresh).count() as i64;
    let neg = eig.iter().filter(|&&l| l < -thresh).count() as i64;
    let nullity = v.size() - (pos + neg) as usize;
    let delta = alexander_poly(v);
    let jump_point = delta.degree().unwrap_or(0) > 0
        && roots_with_multiplicity(&delta, cfg.tol_root)?
            .iter()
            .any(|r| (r.approx - omega).norm() <= cfg.tol_root.sqrt());
    Ok(Signature { signature: pos - neg, nullity, jump_point })
}

fn sigma_strict(v: &SeifertMatrix, x: &BigRational, cfg: &RunConfig) -> Result<i64> {
    let s = levine_tristram(v, x, cfg)?;
    if s.jump_point {
        return Err(Error::JumpPoint(format!("e^(2 pi i {x}) is a root of the Alexander polynomial")));
    }
    Ok(s.signature)
}

/// Data of the mapping torus of the `n`-fold branched cover.
#[derive(Clone, Debug, Serialize)]
pub struct MappingTorusSpec {
    pub n: u32,
    #[serde(serialize_with = "ratio_str")]
    pub alpha: BigRational,
    #[serde(serialize_with = "ratio_str")]
    pub casson: BigRational,
    pub seifert: SeifertMatrix,
}

impl MappingTorusSpec {
    pub fn new(n: u32, alpha: BigRational, casson: BigRational, seifert: SeifertMatrix) -> Result<Self> {
        if n == 0 {
            return Err(Error::OutOfRange("n must be positive".into()));
        }
        check_alpha(&alpha)?;
        Ok(MappingTorusSpec { n, alpha, casson, seifert })
    }

    fn ratio(&self, num: BigRational) -> BigRational {
        num / BigRational::from_integer(BigInt::from(self.n))
    }

    /// `j/n` for `j = 1..n−1`.
    pub fn untwisted_points(&self) -> Vec<BigRational> {
        (1..self.n).map(|j| self.ratio(BigRational::from_integer(j.into()))).collect()
    }

    /// `2(α + j)/n` for `j = 0..n−1`.
    pub fn twisted_points(&self) -> Vec<BigRational> {
        let two = BigRational::from_integer(2.into());
        (0..self.n)
            .map(|j| self.ratio(&two * (&self.alpha + BigRational::from_integer(j.into()))))
            .collect()
    }
}

fn check_alpha(alpha: &BigRational) -> Result<()> {
    let half = BigRational::new(1.into(), 2.into());
    if !alpha.is_positive() || alpha >= &half {
        return Err(Error::OutOfRange(format!("alpha = {alpha} is not in (0, 1/2)")));
    }
    Ok(())
}

fn sum_sigma(v: &SeifertMatrix, xs: &[BigRational], cfg: &RunConfig) -> Result<i64> {
    xs.iter().map(|x| sigma_strict(v, x, cfg)).sum()
}

/// `σ_{2α}(X_n) = −Σ_{j=1}^{n−1} σ_{j/n} + Σ_{j=0}^{n−1} σ_{2(α+j)/n}`.
pub fn mapping_torus_signature(s: &MappingTorusSpec, cfg: &RunConfig) -> Result<i64> {
    Ok(sum_sigma(&s.seifert, &s.twisted_points(), cfg)? - sum_sigma(&s.seifert, &s.untwisted_points(), cfg)?)
}

/// `nλ(Y) + (1/8) Σ_{j=1}^{n−1} σ_{j/n}`.
pub fn furuta_ohta_mapping_torus(n: u32, casson: &BigRational, v: &SeifertMatrix, cfg: &RunConfig) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::OutOfRange("n must be positive".into()));
    }
    let xs: Vec<BigRational> = (1..n).map(|j| BigRational::new(j.into(), n.into())).collect();
    let sum = sum_sigma(v, &xs, cfg)?;
    Ok(BigRational::from_integer(n.into()) * casson + BigRational::new(sum.into(), 8.into()))
}

/// `8nλ(Y) + Σ_{j=0}^{n−1} σ_{2(α+j)/n}`.
pub fn singular_fo_mapping_torus(s: &MappingTorusSpec, cfg: &RunConfig) -> Result<BigRational> {
    let sum = sum_sigma(&s.seifert, &s.twisted_points(), cfg)?;
    Ok(BigRational::from_integer((8 * s.n).into()) * &s.casson + BigRational::from_integer(sum.into()))
}

#[derive(Clone, Debug, Serialize)]
pub struct ConsistencyReport {
    #[serde(serialize_with = "ratio_str")]
    pub singular_fo: BigRational,
    #[serde(serialize_with = "ratio_str")]
    pub furuta_ohta: BigRational,
    pub signature: i64,
    #[serde(serialize_with = "ratio_str")]
    pub lhs: BigRational,
    pub pass: bool,
}

/// Compares `λ_FO(X, T, α) − 8 λ_FO(X)` with the mapping-torus signature.
pub fn thm16_consistency(s: &MappingTorusSpec, cfg: &RunConfig) -> Result<ConsistencyReport> {
    let singular_fo = singular_fo_mapping_torus(s, cfg)?;
    let furuta_ohta = furuta_ohta_mapping_torus(s.n, &s.casson, &s.seifert, cfg)?;
    let signature = mapping_torus_signature(s, cfg)?;
    let lhs = &singular_fo - BigRational::from_integer(8.into()) * &furuta_ohta;
    let pass = lhs == BigRational::from_integer(signature.into());
    Ok(ConsistencyReport { singular_fo, furuta_ohta, signature, lhs, pass })
}

pub fn surgery_predict(lambda_x: &BigRational, lambda_x0: &BigRational, q: i64) -> BigRational {
    lambda_x + BigRational::from_integer(q.into()) * lambda_x0
}

pub fn surgery_signature_delta(lambda_x0: &BigRational, d0: &BigRational, q: i64) -> BigRational {
    let q = BigRational::from_integer(q.into());
    &q * lambda_x0 - BigRational::from_integer(4.into()) * q * d0
}

/// Holonomy parameter on the `j`-th sheet of the `n`-fold cover.
pub fn normalize_holonomy(alpha: &BigRational, j: i64, n: i64) -> Result<BigRational> {
    check_alpha(alpha)?;
    if n <= 0 || j < 0 || j >= n {
        return Err(Error::OutOfRange(format!("need 0 <= j < n, got j = {j}, n = {n}")));
    }
    let x = (alpha + BigRational::from_integer(j.into())) / BigRational::from_integer(n.into());
    let half = BigRational::new(1.into(), 2.into());
    match x.cmp(&half) {
        std::cmp::Ordering::Less => Ok(x),
        std::cmp::Ordering::Greater => Ok(BigRational::one() - x),
        std::cmp::Ordering::Equal => Err(Error::OutOfRange(format!("(alpha + {j})/{n} = 1/2"))),
    }
}

/// All sheets at once; fails if two coincide.
pub fn normalize_all(alpha: &BigRational, n: i64) -> Result<Vec<BigRational>> {
    let out = (0..n).map(|j| normalize_holonomy(alpha, j, n)).collect::<Result<Vec<_>>>()?;
    for (i, a) in out.iter().enumerate() {
        if out[i + 1..].contains(a) {
            return Err(Error::Mismatch(format!("normalised holonomy {a} repeats")));
        }
    }
    Ok(out)
}

/// Random Seifert matrix of genus `g`: a hyperbolic block plus a symmetric
/// perturbation, conjugated by a random unimodular matrix.
pub fn random_seifert<R: Rng>(rng: &mut R, genus: usize) -> SeifertMatrix {
    let n = 2 * genus;
    let mut v = vec![vec![0i64; n]; n];
    for i in 0..genus {
        v[i][genus + i] = 1;
    }
    for i in 0..n {
        for j in i..n {
            let a = rng.gen_range(-2..=2);
            v[i][j] += a;
            if i != j {
                v[j][i] += a;
            }
        }
    }
    // Column operation c_dst += k c_src on P, applied as Pᵀ V P.
    for _ in 0..n {
        let (src, dst) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if src == dst {
            continue;
        }
        let k = if rng.gen_bool(0.5) { 1 } else { -1 };
        for row in v.iter_mut() {
            row[dst] += k * row[src];
        }
        for c in 0..n {
            v[dst][c] += k * v[src][c];
        }
    }
    SeifertMatrix::new(v).expect("unimodular congruence preserves det(V - V^T)")
}

/// A rational in `(0, 1/2)` avoiding jump points of every signature the
/// mapping-torus formulas need for the given `n`.
pub fn random_alpha<R: Rng>(rng: &mut R, v: &SeifertMatrix, n: u32, cfg: &RunConfig) -> BigRational {
    loop {
        let den: i64 = rng.gen_range(5..200);
        let num: i64 = rng.gen_range(1..den);
        let alpha = BigRational::new(num.into(), (2 * den).into());
        let Ok(spec) = MappingTorusSpec::new(n, alpha.clone(), BigRational::zero(), v.clone()) else {
            continue;
        };
        let xs = spec.twisted_points().into_iter().chain(spec.untwisted_points());
        let clear = xs.map(|x| levine_tristram(v, &x, cfg)).all(|s| matches!(s, Ok(s) if !s.jump_point));
        if clear {
            return alpha;
        }
    }
}

/// Parses `p/q`, an integer or a decimal.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let g: GaussianRational = s.parse()?;
    if !g.is_real() {
        return Err(Error::Parse(format!("expected a real rational, got {s}")));
    }
    Ok(g.re().clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn cfg() -> RunConfig {
        RunConfig::default()
    }

    #[test]
    fn alexander_examples() {
        assert_eq!(alexander_poly(&SeifertMatrix::trefoil()).pretty("t"), "t^2 - t + 1");
        assert_eq!(alexander_poly(&SeifertMatrix::figure_eight()).pretty("t"), "t^2 - 3t + 1");
        assert_eq!(alexander_poly(&SeifertMatrix::unknot()), Poly::one());
        assert!(matches!(SeifertMatrix::new(vec![vec![1, 0], vec![0, 1]]), Err(Error::InvalidSeifert(_))));
    }

    #[test]
    fn signature_examples() {
        let t = SeifertMatrix::trefoil();
        assert_eq!(levine_tristram(&t, &r(1, 2), &cfg()).unwrap().signature, -2);
        assert_eq!(levine_tristram(&t, &r(1, 4), &cfg()).unwrap().signature, -2);
        assert_eq!(levine_tristram(&t, &r(1, 24), &cfg()).unwrap().signature, 0);
        assert!(levine_tristram(&t, &r(1, 6), &cfg()).unwrap().jump_point);
        assert_eq!(levine_tristram(&t, &r(2, 1), &cfg()), Err(Error::OmegaOne));
        assert_eq!(levine_tristram(&SeifertMatrix::figure_eight(), &r(1, 2), &cfg()).unwrap().signature, 0);
    }

    #[test]
    fn mapping_torus_examples() {
        let s = MappingTorusSpec::new(2, r(1, 4), r(0, 1), SeifertMatrix::trefoil()).unwrap();
        assert_eq!(mapping_torus_signature(&s, &cfg()).unwrap(), -2);
        assert_eq!(furuta_ohta_mapping_torus(2, &r(0, 1), &SeifertMatrix::trefoil(), &cfg()).unwrap(), r(-1, 4));
        assert_eq!(singular_fo_mapping_torus(&s, &cfg()).unwrap(), r(-4, 1));
        let rep = thm16_consistency(&s, &cfg()).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.lhs, r(-2, 1));
        let u = MappingTorusSpec::new(3, r(1, 5), r(7, 2), SeifertMatrix::unknot()).unwrap();
        assert_eq!(mapping_torus_signature(&u, &cfg()).unwrap(), 0);
        assert!(thm16_consistency(&u, &cfg()).unwrap().pass);
        assert_eq!(furuta_ohta_mapping_torus(2, &r(0, 1), &SeifertMatrix::figure_eight(), &cfg()).unwrap(), r(0, 1));
        // x = 2α = 1/6 puts ω on a root of t² − t + 1.
        let j = MappingTorusSpec::new(1, r(1, 12), r(0, 1), SeifertMatrix::trefoil()).unwrap();
        assert!(matches!(mapping_torus_signature(&j, &cfg()), Err(Error::JumpPoint(_))));
    }

    #[test]
    fn surgery_and_holonomy() {
        assert_eq!(surgery_predict(&r(-4, 1), &r(3, 1), 2), r(2, 1));
        assert_eq!(surgery_predict(&r(5, 3), &r(3, 1), 0), r(5, 3));
        assert_eq!(surgery_signature_delta(&r(2, 1), &r(1, 1), 3), r(-6, 1));
        assert_eq!(surgery_signature_delta(&r(2, 1), &r(1, 1), 0), r(0, 1));
        assert_eq!(normalize_holonomy(&r(1, 4), 0, 2).unwrap(), r(1, 8));
        assert_eq!(normalize_holonomy(&r(1, 4), 1, 2).unwrap(), r(3, 8));
        assert_eq!(normalize_holonomy(&r(1, 4), 0, 1).unwrap(), r(1, 4));
        assert!(matches!(normalize_holonomy(&r(1, 2), 0, 1), Err(Error::OutOfRange(_))));
        assert!(matches!(normalize_holonomy(&r(1, 4), 2, 2), Err(Error::OutOfRange(_))));
        assert_eq!(normalize_all(&r(1, 3), 5).unwrap().len(), 5);
    }

    #[test]
    fn random_seifert_is_valid() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for g in 1..=3 {
            let v = random_seifert(&mut rng, g);
            assert_eq!(v.size(), 2 * g);
            let d = alexander_poly(&v);
            assert!(d.eval(&GaussianRational::one()) == GaussianRational::one() || d.eval(&GaussianRational::one()) == -GaussianRational::one());
            assert!(same_up_to_unit(&d, &alexander_from_presentation(&v, 1e-8).unwrap()));
        }
    }
}
