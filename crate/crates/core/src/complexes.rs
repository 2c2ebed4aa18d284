//! Finite cochain complexes, symbol maps and the twisted family `∂_z = ∂ − zσ`.

use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::{poly_det, roots_with_multiplicity, snf_poly, Matrix, Root};
use crate::field::Scalar;
use crate::{ExactFamily, FloatFamily, GaussianRational, Poly};

/// Degrees `0..=n`; `differentials[j]` maps `C^j → C^{j+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CochainComplex<S> {
    dims: Vec<usize>,
    differentials: Vec<Matrix<S>>,
}

fn zero_tol<S: Scalar>(m: &Matrix<S>, scale: f64, tol: f64) -> bool {
    if S::EXACT {
        m.is_zero()
    } else {
        m.entries().all(|x| x.to_c64().norm() <= tol * (1.0 + scale))
    }
}

/// `dims[j] − rank ∂^j − rank ∂^{j−1}` from precomputed ranks.
fn homology_from_ranks(dims: &[usize], ranks: &[usize]) -> Vec<usize> {
    (0..dims.len())
        .map(|j| {
            let out = ranks.get(j).copied().unwrap_or(0);
            let inc = if j > 0 { ranks[j - 1] } else { 0 };
            dims[j] - out - inc
        })
        .collect()
}

impl<S: Scalar> CochainComplex<S> {
    /// Checks shapes only; use [`CochainComplex::check`] for `∂² = 0`.
    pub fn new(dims: Vec<usize>, differentials: Vec<Matrix<S>>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Shape("a complex needs at least one degree".into()));
        }
        if differentials.len() + 1 != dims.len() {
            return Err(Error::Shape(format!(
                "{} degrees need {} differentials, got {}",
                dims.len(),
                dims.len() - 1,
                differentials.len()
            )));
        }
        for (j, d) in differentials.iter().enumerate() {
            if d.shape() != (dims[j + 1], dims[j]) {
                return Err(Error::Shape(format!(
                    "differential {j} is {}x{}, expected {}x{}",
                    d.rows(),
                    d.cols(),
                    dims[j + 1],
                    dims[j]
                )));
            }
        }
        Ok(CochainComplex { dims, differentials })
    }

    /// The complex with all differentials zero.
    pub fn zero(dims: Vec<usize>) -> Self {
        let differentials = dims.windows(2).map(|w| Matrix::zeros(w[1], w[0])).collect();
        CochainComplex { dims, differentials }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Top degree `n`.
    pub fn top(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn differentials(&self) -> &[Matrix<S>] {
        &self.differentials
    }

    /// `∂^j`, with correctly shaped zero maps outside `0..n`.
    pub fn d(&self, j: i64) -> Matrix<S> {
        let dim = |k: i64| if k < 0 || k as usize > self.top() { 0 } else { self.dims[k as usize] };
        if j >= 0 && (j as usize) < self.differentials.len() {
            self.differentials[j as usize].clone()
        } else {
            Matrix::zeros(dim(j + 1), dim(j))
        }
    }

    pub fn dim(&self, j: i64) -> usize {
        if j < 0 || j as usize > self.top() {
            0
        } else {
            self.dims[j as usize]
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> CochainComplex<T> {
        CochainComplex { dims: self.dims.clone(), differentials: self.differentials.iter().map(|d| d.map(&f)).collect() }
    }

    /// Degrees `j` where `∂^{j+1}∂^j ≠ 0`.
    pub fn square_violations(&self, tol: f64) -> Vec<usize> {
        (0..self.differentials.len().saturating_sub(1))
            .filter(|&j| {
                let (a, b) = (&self.differentials[j + 1], &self.differentials[j]);
                !zero_tol(&(a * b), a.norm() * b.norm(), tol)
            })
            .collect()
    }

    pub fn check(&self, tol: f64) -> Result<()> {
        match self.square_violations(tol).first() {
            Some(j) => Err(Error::NotAComplex(format!("d^{} d^{} != 0", j + 1, j))),
            None => Ok(()),
        }
    }

    pub fn ranks(&self, tol_rank: f64) -> Vec<usize> {
        self.differentials.iter().map(|d| d.rank_tol(tol_rank)).collect()
    }

    /// `dim H^j = dim C^j − rank ∂^j − rank ∂^{j−1}`.
    pub fn cohomology_dims(&self, tol_rank: f64) -> Result<Vec<usize>> {
        self.check(tol_rank.max(1e-12))?;
        Ok(homology_from_ranks(&self.dims, &self.ranks(tol_rank)))
    }

    pub fn is_acyclic(&self, tol_rank: f64) -> Result<bool> {
        Ok(self.cohomology_dims(tol_rank)?.iter().all(|&h| h == 0))
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims.iter().enumerate().map(|(j, &d)| if j % 2 == 0 { d as i64 } else { -(d as i64) }).sum()
    }
}

/// Column bases for cocycles `Z^j`, coboundaries `B^j` and a set of cocycle
/// representatives spanning `H^j`.
#[derive(Clone, Debug)]
pub struct CohomologyBasis<S> {
    pub cocycles: Matrix<S>,
    pub coboundaries: Matrix<S>,
    pub representatives: Matrix<S>,
}

impl<S: Scalar> CochainComplex<S> {
    /// Representatives are the cocycle basis columns independent modulo
    /// coboundaries, chosen greedily in column order.
    pub fn cohomology_basis(&self, j: usize, tol_rank: f64) -> CohomologyBasis<S> {
        let n = self.dims[j];
        let cocycles = self.d(j as i64).kernel_tol(tol_rank);
        let incoming = self.d(j as i64 - 1);
        let coboundaries = incoming.select_cols(&incoming.rref_tol(tol_rank).pivots);
        let aug = Matrix::hstack(n, &[&coboundaries, &cocycles]);
        let picks: Vec<usize> = aug
            .rref_tol(tol_rank)
            .pivots
            .into_iter()
            .filter(|&p| p >= coboundaries.cols())
            .map(|p| p - coboundaries.cols())
            .collect();
        let representatives = cocycles.select_cols(&picks);
        CohomologyBasis { cocycles, coboundaries, representatives }
    }

    /// Matrix of the map on cohomology induced by a cochain-level map
    /// `f: C^j → D^k`, with respect to representative bases on both sides.
    pub fn induced_map(
        source: &CohomologyBasis<S>,
        target: &CohomologyBasis<S>,
        f: &Matrix<S>,
        tol_rank: f64,
    ) -> Matrix<S> {
        let h = target.representatives.cols();
        let b = target.coboundaries.cols();
        let basis = Matrix::hstack(target.coboundaries.rows(), &[&target.coboundaries, &target.representatives]);
        let image = f * &source.representatives;
        let coords = basis
            .solve_tol(&image, tol_rank)
            .expect("image of a cocycle is a cocycle");
        coords.submatrix(b, 0, h, image.cols())
    }
}

/// A complex with a symbol map `σ^j: C^j → C^{j+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistedFamily<S> {
    complex: CochainComplex<S>,
    symbols: Vec<Matrix<S>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub relation: String,
    pub degree: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl<S: Scalar> TwistedFamily<S> {
    pub fn new(complex: CochainComplex<S>, symbols: Vec<Matrix<S>>) -> Result<Self> {
        if symbols.len() != complex.differentials.len() {
            return Err(Error::Shape(format!(
                "{} symbol maps for {} differentials",
                symbols.len(),
                complex.differentials.len()
            )));
        }
        for (j, s) in symbols.iter().enumerate() {
            if s.shape() != complex.differentials[j].shape() {
                return Err(Error::Shape(format!("symbol {j} has shape {:?}", s.shape())));
            }
        }
        Ok(TwistedFamily { complex, symbols })
    }

    pub fn complex(&self) -> &CochainComplex<S> {
        &self.complex
    }

    pub fn symbols(&self) -> &[Matrix<S>] {
        &self.symbols
    }

    pub fn dims(&self) -> &[usize] {
        self.complex.dims()
    }

    pub fn top(&self) -> usize {
        self.complex.top()
    }

    /// `σ^j` with zero maps outside the range.
    pub fn sigma(&self, j: i64) -> Matrix<S> {
        if j >= 0 && (j as usize) < self.symbols.len() {
            self.symbols[j as usize].clone()
        } else {
            self.complex.d(j).scale(&S::zero())
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> TwistedFamily<T> {
        TwistedFamily { complex: self.complex.map(&f), symbols: self.symbols.iter().map(|s| s.map(&f)).collect() }
    }

    /// Every failure of `∂∂ = 0`, `∂σ + σ∂ = 0` and `σσ = 0`.
    pub fn validate(&self, tol: f64) -> ValidationReport {
        let mut violations = Vec::new();
        let d = &self.complex.differentials;
        let s = &self.symbols;
        for j in 0..d.len().saturating_sub(1) {
            let checks = [
                ("dd", &d[j + 1] * &d[j], d[j + 1].norm() * d[j].norm()),
                (
                    "d sigma + sigma d",
                    &(&d[j + 1] * &s[j]) + &(&s[j + 1] * &d[j]),
                    d[j + 1].norm() * s[j].norm() + s[j + 1].norm() * d[j].norm(),
                ),
                ("sigma sigma", &s[j + 1] * &s[j], s[j + 1].norm() * s[j].norm()),
            ];
            for (name, m, scale) in checks {
                if !zero_tol(&m, scale, tol) {
                    violations.push(Violation { relation: name.to_string(), degree: j });
                }
            }
        }
        ValidationReport { valid: violations.is_empty(), violations }
    }

    pub fn ensure_valid(&self, tol: f64) -> Result<()> {
        let r = self.validate(tol);
        match r.violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidFamily(format!("{} fails in degree {}", v.relation, v.degree))),
        }
    }

    /// `∂^j_z = ∂^j − zσ^j` without re-validating.
    pub fn evaluate_unchecked(&self, z: &S) -> CochainComplex<S> {
        let differentials = self
            .complex
            .differentials
            .iter()
            .zip(&self.symbols)
            .map(|(d, s)| d - &s.scale(z))
            .collect();
        CochainComplex { dims: self.complex.dims.clone(), differentials }
    }

    pub fn evaluate(&self, z: &S, tol: f64) -> Result<CochainComplex<S>> {
        self.ensure_valid(tol)?;
        Ok(self.evaluate_unchecked(z))
    }
}

impl ExactFamily {
    pub fn to_float(&self) -> FloatFamily {
        self.map(GaussianRational::to_c64)
    }

    /// `∂^j − wσ^j` as a matrix over Q(i)[w].
    pub fn pencil(&self, j: usize) -> Matrix<Poly> {
        let d = self.complex.d(j as i64);
        let s = self.sigma(j as i64);
        Matrix::from_fn(d.rows(), d.cols(), |a, b| Poly::new(vec![d[(a, b)].clone(), -s[(a, b)].clone()]))
    }
}

/// One root of `Δ_E` with the vanishing order of each `D_j` there.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralPoint {
    pub root: Root,
    /// Multiplicity as a root of `Δ_E`.
    pub multiplicity: usize,
    /// `ord_z D_j` for each differential `j`.
    pub orders: Vec<usize>,
}

impl SpectralPoint {
    pub fn z_c64(&self) -> Complex64 {
        self.root.approx
    }

    pub fn label(&self) -> String {
        self.root.label()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralSet {
    /// Monic lcm of the `D_j`.
    pub delta: Poly,
    /// Rank of `∂^j_z` over Q(i)(z).
    pub generic_ranks: Vec<usize>,
    /// `D_j`: monic product of the invariant factors of `∂^j_z` over Q(i)[z].
    pub degree_factors: Vec<Poly>,
    pub points: Vec<SpectralPoint>,
}

impl SpectralSet {
    /// The point whose location matches `z` within `tol`.
    pub fn find(&self, z: Complex64, tol: f64) -> Option<&SpectralPoint> {
        self.points.iter().find(|p| (p.root.approx - z).norm() <= tol * (1.0 + z.norm()))
    }

    /// Points with `a < Re z < b`, or an error if one sits on a wall.
    pub fn in_strip(&self, a: f64, b: f64, tol_root: f64) -> Result<Vec<&SpectralPoint>> {
        let mut out = Vec::new();
        for p in &self.points {
            let re = p.root.approx.re;
            for wall in [a, b] {
                if (re - wall).abs() <= tol_root {
                    return Err(Error::BoundaryHit { z: p.label(), wall });
                }
            }
            if re > a && re < b {
                out.push(p);
            }
        }
        Ok(out)
    }
}

/// `ord_z p` for a point given exactly or numerically.
pub fn order_at(p: &Poly, root: &Root, tol_root: f64) -> Result<usize> {
    if let Some(g) = &root.exact {
        return Ok(p.root_multiplicity(g));
    }
    if p.degree().unwrap_or(0) == 0 {
        return Ok(0);
    }
    let z = root.approx;
    let roots = roots_with_multiplicity(p, tol_root)?;
    let near = roots
        .iter()
        .filter(|r| (r.approx - z).norm() <= tol_root.max(1e-10) * 1e2 * (1.0 + z.norm()))
        .map(|r| r.multiplicity)
        .collect::<Vec<_>>();
    match near.as_slice() {
        [] => Ok(0),
        [m] => Ok(*m),
        _ => Err(Error::Mismatch(format!("several roots of D_j cluster at {z}"))),
    }
}

/// Generic ranks, the defect polynomial and its roots.
///
/// Fails with `DegenerateFamily` unless `r_{j−1} + r_j = dim C^j` in every
/// degree, i.e. unless `E_z` is acyclic for generic `z`.
pub fn spectral_set(f: &ExactFamily, tol_root: f64) -> Result<SpectralSet> {
    let (generic_ranks, degree_factors, delta) = defect_factors(f)?;
    let mut points = Vec::new();
    if delta.degree().unwrap_or(0) > 0 {
        for root in roots_with_multiplicity(&delta, tol_root)? {
            let orders = degree_factors.iter().map(|d| order_at(d, &root, tol_root)).collect::<Result<Vec<_>>>()?;
            points.push(SpectralPoint { multiplicity: root.multiplicity, root, orders });
        }
    }
    Ok(SpectralSet { delta, generic_ranks, degree_factors, points })
}

/// The monic defect polynomial `Δ` alone, without locating its roots.
pub fn defect_polynomial(f: &ExactFamily) -> Result<Poly> {
    Ok(defect_factors(f)?.2)
}

fn defect_factors(f: &ExactFamily) -> Result<(Vec<usize>, Vec<Poly>, Poly)> {
    f.ensure_valid(0.0)?;
    let mut generic_ranks = Vec::new();
    let mut degree_factors = Vec::new();
    for j in 0..f.symbols.len() {
        let pencil = f.pencil(j);
        // A nonsingular square pencil has its determinant as the product of
        // its invariant factors, and interpolation is far cheaper than SNF.
        if pencil.is_square() && pencil.rows() > 0 {
            let det = poly_det(&pencil);
            if !det.is_zero() {
                generic_ranks.push(pencil.rows());
                degree_factors.push(det.monic());
                continue;
            }
        }
        let snf = snf_poly(&pencil);
        let nonzero: Vec<Poly> = snf.diagonal().into_iter().filter(|p| !p.is_zero()).collect();
        generic_ranks.push(nonzero.len());
        degree_factors.push(nonzero.iter().fold(Poly::new(vec![GaussianRational::from_integer(1)]), |acc, p| &acc * p));
    }
    let h = homology_from_ranks(f.dims(), &generic_ranks);
    if let Some(j) = h.iter().position(|&x| x != 0) {
        return Err(Error::DegenerateFamily(format!(
            "E_z has {}-dimensional H^{j} for generic z, so every z is spectral",
            h[j]
        )));
    }
    let delta = degree_factors.iter().fold(Poly::new(vec![GaussianRational::from_integer(1)]), |acc, p| acc.lcm(p)).monic();
    Ok((generic_ranks, degree_factors, delta))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymbolSpot {
    pub degree: usize,
    /// `dim H^j(E_0)`.
    pub cohomology: usize,
    /// Rank of the induced map `σ̄^j: H^j → H^{j+1}`.
    pub sigma_bar_rank: usize,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NondegeneracyReport {
    pub nondegenerate: bool,
    pub spots: Vec<SymbolSpot>,
}

/// Rank of the map `H^j(E) → H^{j+1}(E)` induced by `σ^j`.
///
/// It equals `rank[σZ | B] − rank B`, with `Z` the cocycles in degree `j` and
/// `B` the coboundaries in degree `j+1`.
pub fn induced_symbol_rank<S: Scalar>(c: &CochainComplex<S>, sigma: &Matrix<S>, j: usize, tol_rank: f64) -> usize {
    if j >= c.top() {
        return 0;
    }
    let z = c.d(j as i64).kernel_tol(tol_rank);
    let b = c.d(j as i64);
    let sz = sigma * &z;
    let n = c.dims[j + 1];
    Matrix::hstack(n, &[&sz, &b]).rank_tol(tol_rank) - b.rank_tol(tol_rank)
}

/// Exactness of the induced symbol sequence on `H*(E_0)`.
pub fn nondegeneracy_check<S: Scalar>(f: &TwistedFamily<S>, tol_rank: f64) -> Result<NondegeneracyReport> {
    f.ensure_valid(tol_rank)?;
    let c = &f.complex;
    let h = c.cohomology_dims(tol_rank)?;
    let ranks: Vec<usize> = (0..=c.top()).map(|j| induced_symbol_rank(c, &f.sigma(j as i64), j, tol_rank)).collect();
    let spots: Vec<SymbolSpot> = (0..=c.top())
        .map(|j| {
            let inc = if j > 0 { ranks[j - 1] } else { 0 };
            SymbolSpot { degree: j, cohomology: h[j], sigma_bar_rank: ranks[j], exact: h[j] == ranks[j] + inc }
        })
        .collect();
    Ok(NondegeneracyReport { nondegenerate: spots.iter().all(|s| s.exact), spots })
}

/// `1 − b₁ + b⁺ = 0` and `dim ker(1_V ⌣ ·) = 1`.
pub fn derham_criterion(b1: u64, bplus: u64, cup_kernel_dim: u64) -> bool {
    1 + bplus == b1 && cup_kernel_dim == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ExactMatrix;

    fn g(k: i64) -> GaussianRational {
        GaussianRational::from_integer(k)
    }

    fn m(rows: &[&[i64]]) -> ExactMatrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&k| g(k)).collect()).collect()).unwrap()
    }

    fn circle() -> ExactFamily {
        TwistedFamily::new(CochainComplex::new(vec![1, 1], vec![m(&[&[0]])]).unwrap(), vec![m(&[&[1]])]).unwrap()
    }

    /// Mapping torus of `J₂(3)` acting on a two-dimensional degree-0 Σ.
    fn jordan() -> ExactFamily {
        let d = m(&[&[-2, -1], &[0, -2]]);
        TwistedFamily::new(CochainComplex::new(vec![2, 2], vec![d]).unwrap(), vec![ExactMatrix::identity(2)]).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let c = circle().evaluate(&g(2), 0.0).unwrap();
        assert_eq!(c.differentials()[0], m(&[&[-2]]));
        let j = jordan().evaluate(&g(-2), 0.0).unwrap();
        assert_eq!(j.differentials()[0], m(&[&[0, -1], &[0, 0]]));
        assert_eq!(j.cohomology_dims(0.0).unwrap(), vec![1, 1]);
    }

    #[test]
    fn cohomology_examples() {
        let acyclic = CochainComplex::new(vec![1, 1], vec![m(&[&[1]])]).unwrap();
        assert_eq!(acyclic.cohomology_dims(0.0).unwrap(), vec![0, 0]);
        let zero = CochainComplex::<GaussianRational>::zero(vec![1, 1]);
        assert_eq!(zero.cohomology_dims(0.0).unwrap(), vec![1, 1]);
        let bad = CochainComplex::new(vec![1, 1, 1], vec![m(&[&[1]]), m(&[&[1]])]).unwrap();
        assert!(matches!(bad.cohomology_dims(0.0), Err(Error::NotAComplex(_))));
    }

    #[test]
    fn spectral_set_examples() {
        let s = spectral_set(&jordan(), 1e-8).unwrap();
        assert_eq!(s.delta, Poly::new(vec![g(4), g(4), g(1)]));
        assert_eq!(s.points.len(), 1);
        assert_eq!(s.points[0].root.exact, Some(g(-2)));
        assert_eq!(s.points[0].multiplicity, 2);
        let s = spectral_set(&circle(), 1e-8).unwrap();
        assert_eq!(s.points[0].root.exact, Some(g(0)));
        let flat = TwistedFamily::new(CochainComplex::zero(vec![1, 1]), vec![m(&[&[0]])]).unwrap();
        assert!(matches!(spectral_set(&flat, 1e-8), Err(Error::DegenerateFamily(_))));
    }

    #[test]
    fn nondegeneracy_examples() {
        assert!(nondegeneracy_check(&circle(), 0.0).unwrap().nondegenerate);
        assert!(nondegeneracy_check(&jordan(), 0.0).unwrap().nondegenerate);
        let flat = TwistedFamily::new(CochainComplex::zero(vec![1, 1]), vec![m(&[&[0]])]).unwrap();
        assert!(!nondegeneracy_check(&flat, 0.0).unwrap().nondegenerate);
    }

    #[test]
    fn validation_names_degree() {
        let c = CochainComplex::new(vec![1, 1, 1], vec![m(&[&[1]]), m(&[&[1]])]).unwrap();
        let f = TwistedFamily::new(c, vec![m(&[&[0]]), m(&[&[0]])]).unwrap();
        let r = f.validate(0.0);
        assert!(!r.valid);
        assert_eq!(r.violations, vec![Violation { relation: "dd".into(), degree: 0 }]);
    }

    #[test]
    fn derham_examples() {
        assert!(derham_criterion(1, 0, 1));
        assert!(derham_criterion(2, 1, 1));
        assert!(!derham_criterion(2, 0, 2));
    }
}
