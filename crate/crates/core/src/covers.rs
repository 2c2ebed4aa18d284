//! Mapping-torus models of cyclic covers and Alexander-module decompositions.
//!
//! For a complex `Σ` with a chain automorphism `τ`, the mapping torus has
//! `C^j(V) = C^j(Σ) ⊕ C^{j−1}(Σ)`,
//! `∂(a, b) = (∂a, (1 − τ)a − ∂b)` and `σ(a, b) = (0, a)`.
//! Then `∂_z(a, b) = (∂a, ((1 − z) − τ)a − ∂b)` is the cone of `(1 − z) − τ`,
//! so `z` is spectral exactly when `1 − z` is an eigenvalue of `τ` on `H*(Σ)`.
//! The relations `∂σ + σ∂ = 0` and `σσ = 0` hold by direct expansion:
//! `∂σ(a, b) = (0, −∂a)`, `σ∂(a, b) = (0, ∂a)`, and `σ` lands in the second
//! summand, which `σ` kills.

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::complexes::{order_at, CochainComplex, TwistedFamily};
use crate::config::RunConfig;
use crate::equivariant::Equivariant;
use crate::error::{Error, Result};
use crate::exactalg::{poly_det, roots_with_multiplicity, snf_laurent, Matrix, Root};
use crate::{ExactComplex, ExactFamily, ExactMatrix, GaussianRational, LaurentMatrix, LaurentPoly, Poly};

#[derive(Clone, Debug, PartialEq)]
pub struct MappingTorusModel {
    sigma: ExactComplex,
    deck: Vec<ExactMatrix>,
}

impl MappingTorusModel {
    pub fn new(sigma: ExactComplex, deck: Vec<ExactMatrix>) -> Result<Self> {
        sigma.check(0.0)?;
        if deck.len() != sigma.dims().len() {
            return Err(Error::Shape(format!("{} deck maps for {} degrees", deck.len(), sigma.dims().len())));
        }
        for (j, t) in deck.iter().enumerate() {
            if t.shape() != (sigma.dims()[j], sigma.dims()[j]) {
                return Err(Error::Shape(format!("deck map {j} has shape {:?}", t.shape())));
            }
            if t.inverse().is_none() {
                return Err(Error::NotInvertible(format!("deck map in degree {j}")));
            }
        }
        for j in 0..sigma.top() {
            let d = &sigma.differentials()[j];
            if (d * &deck[j]) != (&deck[j + 1] * d) {
                return Err(Error::NotAChainMap(format!("d tau != tau d in degree {j}")));
            }
        }
        Ok(MappingTorusModel { sigma, deck })
    }

    pub fn sigma(&self) -> &ExactComplex {
        &self.sigma
    }

    pub fn deck(&self) -> &[ExactMatrix] {
        &self.deck
    }
}

pub fn mapping_torus_family(m: &MappingTorusModel) -> ExactFamily {
    let s = &m.sigma;
    let n = s.top() as i64;
    let dims: Vec<usize> = (0..=n + 1).map(|j| s.dim(j) + s.dim(j - 1)).collect();
    let mut diffs = Vec::new();
    let mut syms = Vec::new();
    for j in 0..=n {
        let (a0, b0) = (s.dim(j), s.dim(j - 1));
        let (a1, b1) = (s.dim(j + 1), s.dim(j));
        let mut d = Matrix::zeros(a1 + b1, a0 + b0);
        d.set_block(0, 0, &s.d(j));
        let tau = &m.deck[j as usize];
        d.set_block(a1, 0, &(&ExactMatrix::identity(a0) - tau));
        d.set_block(a1, a0, &(-&s.d(j - 1)));
        let mut sg = Matrix::zeros(a1 + b1, a0 + b0);
        sg.set_block(a1, 0, &ExactMatrix::identity(a0));
        diffs.push(d);
        syms.push(sg);
    }
    let complex = CochainComplex::new(dims, diffs).expect("mapping torus shapes are consistent");
    TwistedFamily::new(complex, syms).expect("mapping torus shapes are consistent")
}

/// One eigenvalue of the induced deck action with its Jordan structure.
#[derive(Clone, Debug, Serialize)]
pub struct EigenData {
    pub lambda: Root,
    /// Generalised eigenspace dimension, the algebraic multiplicity.
    pub generalized_dim: usize,
    /// Jordan block sizes, largest first.
    pub jordan_blocks: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeckAction {
    pub degree: usize,
    /// Induced map on `H^j(Σ)` in the chosen representative basis.
    pub matrix: ExactMatrix,
    pub char_poly: Poly,
    pub eigen: Vec<EigenData>,
}

impl DeckAction {
    /// Algebraic multiplicity of `λ` as an eigenvalue.
    pub fn eigenspace_dim(&self, lambda: &Root, tol_root: f64) -> Result<usize> {
        order_at(&self.char_poly, lambda, tol_root)
    }
}

/// `det(xI − A)`.
pub fn char_poly(a: &ExactMatrix) -> Poly {
    let n = a.rows();
    let pm = Matrix::from_fn(n, n, |i, j| {
        let c = -a[(i, j)].clone();
        if i == j {
            Poly::new(vec![c, GaussianRational::one()])
        } else {
            Poly::constant(c)
        }
    });
    poly_det(&pm)
}

/// Jordan block sizes of `a` at `λ` from the ranks of `(a − λ)^k`.
fn jordan_blocks(a: &ExactMatrix, lambda: &Root, tol_rank: f64) -> Vec<usize> {
    let n = a.rows();
    let ranks: Vec<usize> = match &lambda.exact {
        Some(g) => {
            let b = a - &ExactMatrix::identity(n).scale(g);
            powers_ranks(&b, n, 0.0)
        }
        None => {
            let fa = a.to_c64();
            let b = &fa - &Matrix::<Complex64>::identity(n).scale(&lambda.approx);
            powers_ranks(&b, n, tol_rank.max(1e-7))
        }
    };
    // ranks[k] = rank (A − λ)^k; blocks of size ≥ k number ranks[k−1] − ranks[k].
    let at_least: Vec<usize> = (1..ranks.len()).map(|k| ranks[k - 1] - ranks[k]).collect();
    let mut sizes = Vec::new();
    for k in (1..=at_least.len()).rev() {
        let exactly = at_least[k - 1] - at_least.get(k).copied().unwrap_or(0);
        sizes.extend(std::iter::repeat_n(k, exactly));
    }
    sizes
}

fn powers_ranks<S: crate::field::Scalar>(b: &Matrix<S>, n: usize, tol: f64) -> Vec<usize> {
    let mut ranks = vec![n];
    let mut p = Matrix::identity(n);
    loop {
        p = &p * b;
        let r = p.rank_tol(tol);
        let done = Some(&r) == ranks.last();
        ranks.push(r);
        if done || r == 0 {
            return ranks;
        }
    }
}

pub fn deck_action_on_cohomology(m: &MappingTorusModel, cfg: &RunConfig) -> Result<Vec<DeckAction>> {
    let s = &m.sigma;
    let mut out = Vec::new();
    for j in 0..=s.top() {
        let basis = s.cohomology_basis(j, 0.0);
        let matrix = CochainComplex::induced_map(&basis, &basis, &m.deck[j], 0.0);
        let cp = char_poly(&matrix);
        let mut eigen = Vec::new();
        if cp.degree().unwrap_or(0) > 0 {
            for lambda in roots_with_multiplicity(&cp, cfg.tol_root)? {
                let jordan = jordan_blocks(&matrix, &lambda, cfg.tol_rank);
                eigen.push(EigenData { generalized_dim: lambda.multiplicity, jordan_blocks: jordan, lambda });
            }
        }
        out.push(DeckAction { degree: j, matrix, char_poly: cp, eigen });
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossEntry {
    pub z: String,
    pub lambda: String,
    pub degree: usize,
    pub hhat: usize,
    pub eigenspace: usize,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TotalCheck {
    pub degree: usize,
    pub hhat_sum: usize,
    pub betti: usize,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossCheckReport {
    pub strip: (f64, f64),
    pub entries: Vec<CrossEntry>,
    pub index_jump: i64,
    pub alternating_eigen_sum: i64,
    pub jump_ok: bool,
    /// Whether every spectral point lies in the strip; totals are only
    /// asserted in that case.
    pub covers_all: bool,
    pub totals: Vec<TotalCheck>,
    pub pass: bool,
}

/// Compares `dim Ĥ^j_z` with the generalised `(1 − z)`-eigenspace of `τ` on
/// `H^j(Σ)` for every spectral point in the strip.
pub fn crosscheck_cor214(m: &MappingTorusModel, strip: (f64, f64), cfg: &RunConfig) -> Result<CrossCheckReport> {
    let (a, b) = strip;
    let fam = mapping_torus_family(m);
    let eq = Equivariant::new(&fam, cfg)?;
    let actions = deck_action_on_cohomology(m, cfg)?;
    let top = fam.top();
    let in_strip = eq.spectral().in_strip(a, b, cfg.tol_root)?;
    let covers_all = in_strip.len() == eq.spectral().points.len();

    let mut entries = Vec::new();
    let mut hhat_sums = vec![0usize; top + 1];
    let mut jump = 0i64;
    for p in &in_strip {
        let rep = eq.at_point(p)?;
        jump += rep.euler;
        let lambda = one_minus(&p.root);
        for j in 0..=top {
            let eig = match actions.get(j) {
                Some(act) => act.eigenspace_dim(&lambda, cfg.tol_root)?,
                None => 0,
            };
            hhat_sums[j] += rep.dims[j];
            entries.push(CrossEntry {
                z: p.label(),
                lambda: lambda.label(),
                degree: j,
                hhat: rep.dims[j],
                eigenspace: eig,
                ok: rep.dims[j] == eig,
            });
        }
    }

    // The eigenvalue side is summed over the deck spectrum itself, so an
    // eigenvalue whose point the spectral set missed still shows up.
    let mut alternating = 0i64;
    for act in &actions {
        for e in &act.eigen {
            let z = Complex64::new(1.0, 0.0) - e.lambda.approx;
            if z.re > a && z.re < b {
                let sign = if act.degree % 2 == 0 { 1 } else { -1 };
                alternating += sign * e.generalized_dim as i64;
                if eq.spectral().find(z, cfg.tol_root).is_none() {
                    entries.push(CrossEntry {
                        z: crate::exactalg::roots::format_c64(z),
                        lambda: e.lambda.label(),
                        degree: act.degree,
                        hhat: 0,
                        eigenspace: e.generalized_dim,
                        ok: false,
                    });
                }
            }
        }
    }

    let betti = m.sigma.cohomology_dims(0.0)?;
    let totals: Vec<TotalCheck> = (0..=top)
        .map(|j| {
            let bj = betti.get(j).copied().unwrap_or(0);
            TotalCheck { degree: j, hhat_sum: hhat_sums[j], betti: bj, ok: hhat_sums[j] == bj }
        })
        .collect();
    let jump_ok = jump == alternating;
    let pass = entries.iter().all(|e| e.ok) && jump_ok && (!covers_all || totals.iter().all(|t| t.ok));
    Ok(CrossCheckReport {
        strip,
        entries,
        index_jump: jump,
        alternating_eigen_sum: alternating,
        jump_ok,
        covers_all,
        totals,
        pass,
    })
}

fn one_minus(r: &Root) -> Root {
    Root {
        approx: Complex64::new(1.0, 0.0) - r.approx,
        exact: r.exact.as_ref().map(|g| &GaussianRational::one() - g),
        multiplicity: r.multiplicity,
    }
}

/// Cochain complex of free Q(i)[t, t⁻¹]-modules.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaComplex {
    dims: Vec<usize>,
    differentials: Vec<LaurentMatrix>,
}

impl LambdaComplex {
    pub fn new(dims: Vec<usize>, differentials: Vec<LaurentMatrix>) -> Result<Self> {
        if dims.is_empty() || differentials.len() + 1 != dims.len() {
            return Err(Error::Shape(format!("{} degrees with {} differentials", dims.len(), differentials.len())));
        }
        for (j, d) in differentials.iter().enumerate() {
            if d.shape() != (dims[j + 1], dims[j]) {
                return Err(Error::Shape(format!("differential {j} has shape {:?}", d.shape())));
            }
        }
        for j in 0..differentials.len().saturating_sub(1) {
            if !(&differentials[j + 1] * &differentials[j]).is_zero() {
                return Err(Error::NotAComplex(format!("d^{} d^{j} != 0", j + 1)));
            }
        }
        Ok(LambdaComplex { dims, differentials })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn differentials(&self) -> &[LaurentMatrix] {
        &self.differentials
    }
}

/// Presentation `tV − Vᵀ` of the Alexander module as a two-term complex.
pub fn seifert_presentation(v: &ExactMatrix) -> LambdaComplex {
    let n = v.rows();
    let d = Matrix::from_fn(n, n, |i, j| {
        &LaurentPoly::monomial(v[(i, j)].clone(), 1) - &LaurentPoly::constant(v[(j, i)].clone())
    });
    LambdaComplex::new(vec![n, n], vec![d]).expect("square presentation")
}

#[derive(Clone, Debug, Serialize)]
pub struct ElementarySummand {
    pub lambda: Root,
    /// The exponent `m` in `Λ/(t − λ)^m`.
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeTorsion {
    pub degree: usize,
    /// Non-unit invariant factors, monic with nonzero constant term.
    pub divisors: Vec<Poly>,
    pub summands: Vec<ElementarySummand>,
    pub free_rank: usize,
    pub non_torsion: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TorsionDecomposition {
    pub degrees: Vec<DegreeTorsion>,
    pub torsion: bool,
}

/// Torsion of `H^j` is `coker ∂^{j−1}` modulo its free part, so it is read
/// from the non-unit Smith invariants of the incoming differential.
pub fn lambda_cohomology(l: &LambdaComplex, tol_root: f64) -> Result<TorsionDecomposition> {
    let snfs: Vec<_> = l.differentials.iter().map(snf_laurent).collect();
    let ranks: Vec<usize> = snfs.iter().map(|s| s.diagonal().iter().filter(|d| !d.is_zero()).count()).collect();
    let mut degrees = Vec::new();
    for j in 0..l.dims.len() {
        let out = ranks.get(j).copied().unwrap_or(0);
        let inc = if j > 0 { ranks[j - 1] } else { 0 };
        let free_rank = l.dims[j] - out - inc;
        let mut divisors = Vec::new();
        let mut summands = Vec::new();
        if j > 0 {
            for d in snfs[j - 1].diagonal() {
                if d.is_zero() || d.is_unit() {
                    continue;
                }
                let p = d.body().clone();
                for root in roots_with_multiplicity(&p, tol_root)? {
                    summands.push(ElementarySummand { multiplicity: root.multiplicity, lambda: root });
                }
                divisors.push(p);
            }
        }
        degrees.push(DegreeTorsion { degree: j, divisors, summands, free_rank, non_torsion: free_rank > 0 });
    }
    let torsion = degrees.iter().all(|d| !d.non_torsion);
    Ok(TorsionDecomposition { degrees, torsion })
}

/// Product of all torsion divisors in degree `j`.
pub fn order_ideal(t: &TorsionDecomposition, j: usize) -> Poly {
    t.degrees[j].divisors.iter().fold(Poly::one(), |acc, p| &acc * p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(k: i64) -> GaussianRational {
        GaussianRational::from_integer(k)
    }

    fn m(rows: &[&[i64]]) -> ExactMatrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&k| g(k)).collect()).collect()).unwrap()
    }

    fn jordan_model(lambda: i64) -> MappingTorusModel {
        MappingTorusModel::new(CochainComplex::zero(vec![2]), vec![m(&[&[lambda, 1], &[0, lambda]])]).unwrap()
    }

    fn circle_model(p: i64, q: i64) -> MappingTorusModel {
        MappingTorusModel::new(CochainComplex::zero(vec![1, 1]), vec![m(&[&[p]]), m(&[&[q]])]).unwrap()
    }

    #[test]
    fn jordan_family_is_valid_and_spectral_at_minus_two() {
        let fam = mapping_torus_family(&jordan_model(3));
        assert!(fam.validate(0.0).valid);
        let z = fam.evaluate(&g(-2), 0.0).unwrap();
        assert_eq!(z.differentials()[0], m(&[&[0, -1], &[0, 0]]));
        let s = crate::complexes::spectral_set(&fam, 1e-8).unwrap();
        assert_eq!(s.delta, Poly::from_roots(&[g(-2), g(-2)]));
    }

    #[test]
    fn identity_deck_concentrates_at_zero() {
        let model = MappingTorusModel::new(CochainComplex::zero(vec![1, 2]), vec![m(&[&[1]]), m(&[&[1, 0], &[0, 1]])]).unwrap();
        let s = crate::complexes::spectral_set(&mapping_torus_family(&model), 1e-8).unwrap();
        assert_eq!(s.points.len(), 1);
        assert_eq!(s.points[0].root.exact, Some(g(0)));
        let r = crosscheck_cor214(&model, (-1.0, 1.0), &RunConfig::default()).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.totals.iter().map(|t| t.hhat_sum).collect::<Vec<_>>(), vec![1, 2, 0]);
    }

    #[test]
    fn circle_model_spectral_points() {
        let fam = mapping_torus_family(&circle_model(2, 5));
        let s = crate::complexes::spectral_set(&fam, 1e-8).unwrap();
        let pts: Vec<_> = s.points.iter().map(|p| p.root.exact.clone().unwrap()).collect();
        assert_eq!(pts, vec![g(-4), g(-1)]);
        let eq = Equivariant::new(&fam, &RunConfig::default()).unwrap();
        assert_eq!(eq.at(&crate::equivariant::Point::Exact(g(-4))).unwrap().dims, vec![0, 1, 0]);
    }

    #[test]
    fn deck_action_examples() {
        let acts = deck_action_on_cohomology(&jordan_model(3), &RunConfig::default()).unwrap();
        assert_eq!(acts[0].matrix, m(&[&[3, 1], &[0, 3]]));
        assert_eq!(acts[0].eigen[0].generalized_dim, 2);
        assert_eq!(acts[0].eigen[0].jordan_blocks, vec![2]);
        let acts = deck_action_on_cohomology(&circle_model(2, 7), &RunConfig::default()).unwrap();
        assert_eq!(acts[0].matrix, m(&[&[2]]));
        assert_eq!(acts[1].matrix, m(&[&[7]]));
        // Contractible Σ: C⁰ → C¹ an isomorphism.
        let c = CochainComplex::new(vec![1, 1], vec![m(&[&[1]])]).unwrap();
        let model = MappingTorusModel::new(c, vec![m(&[&[2]]), m(&[&[2]])]).unwrap();
        let acts = deck_action_on_cohomology(&model, &RunConfig::default()).unwrap();
        assert!(acts.iter().all(|a| a.matrix.rows() == 0));
    }

    #[test]
    fn chain_map_is_enforced() {
        let c = CochainComplex::new(vec![1, 1], vec![m(&[&[1]])]).unwrap();
        assert!(matches!(MappingTorusModel::new(c.clone(), vec![m(&[&[1]]), m(&[&[2]])]), Err(Error::NotAChainMap(_))));
        assert!(matches!(MappingTorusModel::new(c, vec![m(&[&[0]]), m(&[&[0]])]), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn crosscheck_jordan() {
        let r = crosscheck_cor214(&jordan_model(3), (-3.0, 0.0), &RunConfig::default()).unwrap();
        assert!(r.pass);
        assert_eq!(r.entries[0].hhat, 2);
        assert_eq!(r.entries[0].eigenspace, 2);
        assert_eq!(r.index_jump, 2);
        let empty = crosscheck_cor214(&jordan_model(3), (1.0, 2.0), &RunConfig::default()).unwrap();
        assert!(empty.entries.is_empty() && empty.pass);
    }

    #[test]
    fn lambda_examples() {
        let lp = |c: &[i64]| LaurentPoly::new(0, c.iter().map(|&k| g(k)).collect());
        let d = Matrix::from_rows(vec![vec![lp(&[-3, 1]), lp(&[1])], vec![lp(&[0]), lp(&[-3, 1])]]).unwrap();
        let l = LambdaComplex::new(vec![2, 2], vec![d]).unwrap();
        let t = lambda_cohomology(&l, 1e-8).unwrap();
        assert_eq!(t.degrees[1].divisors, vec![Poly::from_roots(&[g(3), g(3)])]);
        assert_eq!(t.degrees[1].summands[0].multiplicity, 2);
        assert_eq!(t.degrees[1].summands[0].lambda.exact, Some(g(3)));
        assert!(t.torsion);

        let z = LambdaComplex::new(vec![0, 1], vec![Matrix::zeros(1, 0)]).unwrap();
        let t = lambda_cohomology(&z, 1e-8).unwrap();
        assert_eq!(t.degrees[1].free_rank, 1);
        assert!(t.degrees[1].non_torsion && !t.torsion);

        let trefoil = seifert_presentation(&m(&[&[-1, 1], &[0, -1]]));
        let t = lambda_cohomology(&trefoil, 1e-8).unwrap();
        assert_eq!(t.degrees[1].divisors, vec![Poly::new(vec![g(1), g(-1), g(1)])]);
    }
}
