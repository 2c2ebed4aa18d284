//! Chain homotopies `id ≃ 0` on acyclic complexes and local Laurent
//! expansions of the homotopy resolvent of a twisted family.
//!
//! Maps of degree `−n` are stored as `f[j]: C^j → C^{j−n}` and the Hom
//! differential is `(𝒹_n f)^j = f^{j+1} ∂^j + (−1)^{n+1} ∂^{j−n} f^j`.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::complexes::{spectral_set, CochainComplex};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::exactalg::{Matrix, RationalFunction};
use crate::field::{Field, Scalar};
use crate::{ExactFamily, ExactMatrix, GaussianRational, Poly};

/// Maps `R^j: C^j → C^{j−1}` with `∂R + R∂ = id`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainHomotopy<S> {
    pub maps: Vec<Matrix<S>>,
}

fn shape_of<S: Scalar>(c: &CochainComplex<S>, j: usize, n: i64) -> (usize, usize) {
    (c.dim(j as i64 - n), c.dim(j as i64))
}

/// `𝒹_n f` for a degree `−n` family.
pub fn hom_differential<S: Scalar>(c: &CochainComplex<S>, n: i64, f: &[Matrix<S>]) -> Vec<Matrix<S>> {
    let sign = if (n + 1) % 2 == 0 { S::one() } else { -S::one() };
    (0..c.dims().len())
        .map(|j| {
            let next = f.get(j + 1).cloned().unwrap_or_else(|| Matrix::zeros(c.dim(j as i64 + 1 - n), 0));
            let a = &next * &c.d(j as i64);
            let b = (&c.d(j as i64 - n) * &f[j]).scale(&sign);
            &a + &b
        })
        .collect()
}

fn is_negligible<S: Scalar>(m: &Matrix<S>, tol: f64) -> bool {
    if S::EXACT {
        m.is_zero()
    } else {
        m.norm() <= tol.max(1e-12) * 1e3
    }
}

fn ensure_acyclic<S: Scalar>(c: &CochainComplex<S>, tol_rank: f64) -> Result<()> {
    for (degree, &dim) in c.cohomology_dims(tol_rank)?.iter().enumerate() {
        if dim != 0 {
            return Err(Error::NotAcyclic { degree, dim });
        }
    }
    Ok(())
}

/// Solves `𝒹_{n+1} g = f` degree by degree.
///
/// With `g^0 = 0`, the map `g^{j+1}` is determined on `im ∂^j` by
/// `g^{j+1} ∂^j = f^j − (−1)^n ∂^{j−n−1} g^j` and set to zero on the
/// standard-basis complement of `im ∂^j`.
pub fn solve_homotopy_equation<S: Scalar>(
    c: &CochainComplex<S>,
    n: i64,
    f: &[Matrix<S>],
    tol_rank: f64,
) -> Result<Vec<Matrix<S>>> {
    let len = c.dims().len();
    if f.len() != len {
        return Err(Error::Shape(format!("{} maps for {len} degrees", f.len())));
    }
    for (j, fj) in f.iter().enumerate() {
        if fj.shape() != shape_of(c, j, n) {
            return Err(Error::Shape(format!("f^{j} has shape {:?}, expected {:?}", fj.shape(), shape_of(c, j, n))));
        }
    }
    c.check(tol_rank)?;
    ensure_acyclic(c, tol_rank)?;
    if let Some(j) = hom_differential(c, n, f).iter().position(|m| !is_negligible(m, tol_rank)) {
        return Err(Error::NotACycle(format!("(d f)^{j} != 0")));
    }

    let sign = if n % 2 == 0 { S::one() } else { -S::one() };
    let mut g: Vec<Matrix<S>> = Vec::with_capacity(len);
    g.push(Matrix::zeros(c.dim(-n - 1), c.dim(0)));
    for j in 0..len - 1 {
        let d = c.d(j as i64);
        let t = &f[j] - &(&c.d(j as i64 - n - 1) * &g[j]).scale(&sign);
        let pivots = d.rref_tol(tol_rank).pivots;
        let comp = d.complement_indices_tol(tol_rank);
        let target = c.dim(j as i64 + 1);
        let basis = Matrix::from_fn(target, target, |r, k| {
            if k < pivots.len() {
                d[(r, pivots[k])].clone()
            } else if r == comp[k - pivots.len()] {
                S::one()
            } else {
                S::zero()
            }
        });
        let inv = basis.inverse_tol(tol_rank).expect("pivot columns and complement span");
        let mut rhs = Matrix::zeros(t.rows(), target);
        rhs.set_block(0, 0, &t.select_cols(&pivots));
        g.push(&rhs * &inv);
    }

    let check = hom_differential(c, n + 1, &g);
    for (j, (lhs, fj)) in check.iter().zip(f).enumerate() {
        if !is_negligible(&(lhs - fj), tol_rank) {
            return Err(Error::Mismatch(format!("(d g)^{j} differs from f^{j}")));
        }
    }
    Ok(g)
}

/// Chain homotopy from the identity to zero.
pub fn homotopy_resolvent<S: Scalar>(c: &CochainComplex<S>, tol_rank: f64) -> Result<ChainHomotopy<S>> {
    let id: Vec<Matrix<S>> = c.dims().iter().map(|&d| Matrix::identity(d)).collect();
    let maps = solve_homotopy_equation(c, 0, &id, tol_rank)?;
    Ok(ChainHomotopy { maps })
}

/// `∂R + R∂ − id` in every degree.
pub fn homotopy_residual<S: Scalar>(c: &CochainComplex<S>, r: &ChainHomotopy<S>) -> Vec<Matrix<S>> {
    let lhs = hom_differential(c, 1, &r.maps);
    lhs.iter()
        .zip(c.dims())
        .map(|(m, &d)| m - &Matrix::identity(d))
        .collect()
}

/// Laurent expansion of a homotopy resolvent `R_z` of `E_z` around `z₀`.
#[derive(Clone, Debug, Serialize)]
pub struct LocalResolvent {
    pub center: GaussianRational,
    pub pole_order: usize,
    pub order: usize,
    /// `laurent_coeffs[j][i]` multiplies `(z − z₀)^{i − pole_order}` in
    /// `R^j_z: C^j → C^{j−1}`.
    pub laurent_coeffs: Vec<Vec<ExactMatrix>>,
    #[serde(skip)]
    pub exact: Vec<Matrix<RationalFunction>>,
}

fn rational_differential(f: &ExactFamily, j: usize) -> Matrix<RationalFunction> {
    f.pencil(j).map(|p| RationalFunction::from_poly(p.clone()))
}

fn eval_rational(m: &Matrix<RationalFunction>, z: &GaussianRational) -> Option<ExactMatrix> {
    m.try_map(|e| e.eval(z).ok_or(())).ok()
}

/// Columns spanning `ker ∂^j_z` over the local ring at `z₀`: polynomial
/// entries, and still independent at `z₀`.
fn saturated_kernel(d: &Matrix<RationalFunction>, z0: &GaussianRational) -> Matrix<RationalFunction> {
    let mut b = d.kernel_tol(0.0);
    for k in 0..b.cols() {
        let den = (0..b.rows()).fold(Poly::one(), |acc, i| acc.lcm(b[(i, k)].denom()));
        b.scale_col(k, &RationalFunction::from_poly(den));
    }
    let lin = RationalFunction::from_poly(Poly::linear_root(z0.clone())).inv();
    loop {
        let at = eval_rational(&b, z0).expect("polynomial entries");
        let null = at.kernel_tol(0.0);
        if null.cols() == 0 {
            return b;
        }
        let coeffs = null.col(0);
        let k = coeffs.iter().rposition(|x| !x.is_zero()).expect("nonzero null vector");
        let mut col = vec![RationalFunction::zero(); b.rows()];
        for (i, ci) in coeffs.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            let ci = RationalFunction::constant(ci.clone());
            for (r, slot) in col.iter_mut().enumerate() {
                *slot = slot.clone() + b[(r, i)].clone() * ci.clone();
            }
        }
        for (r, v) in col.into_iter().enumerate() {
            b[(r, k)] = v * lin.clone();
        }
    }
}

/// Local Laurent expansion of `R_z` at a spectral point, through `(z − z₀)^K`.
///
/// `C^j` is split as `ker ∂^j_z ⊕ span E_j` with `E_j` standard basis vectors
/// complementing the kernel at `z₀`. On `span E_j` the differential is an
/// isomorphism onto `ker ∂^{j+1}_z` for `z ≠ z₀`, and `R^{j+1}` inverts it on
/// that summand and vanishes on the complement `E_{j+1}`.
pub fn local_meromorphic_resolvent(f: &ExactFamily, z0: &GaussianRational, k: usize, cfg: &RunConfig) -> Result<LocalResolvent> {
    let spec = spectral_set(f, cfg.tol_root)?;
    if !spec.delta.eval(z0).is_zero() {
        return Err(Error::NotSpectral(z0.to_string()));
    }
    let len = f.dims().len();
    let diffs: Vec<Matrix<RationalFunction>> = (0..len).map(|j| rational_differential(f, j)).collect();
    let mut kernels = Vec::new();
    let mut comps = Vec::new();
    let mut frames = Vec::new();
    for d in &diffs {
        let b = saturated_kernel(d, z0);
        let comp = eval_rational(&b, z0).expect("polynomial entries").complement_indices_tol(0.0);
        let n = b.rows();
        let e = Matrix::from_fn(n, comp.len(), |r, c| {
            if r == comp[c] { RationalFunction::one() } else { RationalFunction::zero() }
        });
        frames.push(Matrix::hstack(n, &[&b, &e]).inverse_tol(0.0).expect("frame is invertible near z0"));
        kernels.push(b);
        comps.push(e);
    }

    let mut exact = vec![Matrix::zeros(0, f.dims()[0])];
    for j in 0..len - 1 {
        let e = &comps[j];
        let r = e.cols();
        let coords = &frames[j + 1] * &(&diffs[j] * e);
        let a = coords.submatrix(0, 0, r, r);
        let a_inv = a.inverse_tol(0.0).ok_or_else(|| Error::DegenerateFamily(format!("degree {j} block is singular")))?;
        let proj = frames[j + 1].submatrix(0, 0, kernels[j + 1].cols(), f.dims()[j + 1]);
        if kernels[j + 1].cols() != r {
            return Err(Error::DegenerateFamily(format!("rank mismatch in degree {}", j + 1)));
        }
        exact.push(&(e * &a_inv) * &proj);
    }

    // The homotopy identity is checked over Q(i)(z) before expanding.
    for j in 0..len {
        let prev = if j == 0 { Matrix::zeros(f.dims()[0], 0) } else { diffs[j - 1].clone() };
        let next = exact.get(j + 1).cloned().unwrap_or_else(|| Matrix::zeros(f.dims()[j], 0));
        let lhs = &(&prev * &exact[j]) + &(&next * &diffs[j]);
        if !lhs.is_identity() {
            return Err(Error::Mismatch(format!("rational resolvent fails in degree {j}")));
        }
    }

    let pole_order = exact
        .iter()
        .flat_map(|m| m.entries())
        .filter(|e| !e.is_zero())
        .map(|e| (-e.order_at(z0)).max(0) as usize)
        .max()
        .unwrap_or(0);
    let lo = -(pole_order as i64);
    let laurent_coeffs = exact
        .iter()
        .map(|m| {
            let series: Vec<Vec<GaussianRational>> = m.entries().map(|e| e.laurent_at(z0, lo, k as i64)).collect();
            (0..series.first().map_or((k as i64 - lo + 1) as usize, Vec::len))
                .map(|i| Matrix::from_fn(m.rows(), m.cols(), |r, c| series[r * m.cols() + c][i].clone()))
                .collect()
        })
        .collect();
    Ok(LocalResolvent { center: z0.clone(), pole_order, order: k, laurent_coeffs, exact })
}

impl LocalResolvent {
    /// The truncated expansion evaluated at `z₀ + h`.
    pub fn truncated_at(&self, h: &GaussianRational) -> Vec<ExactMatrix> {
        self.laurent_coeffs
            .iter()
            .map(|coeffs| {
                let mut acc = coeffs[0].scale(&GaussianRational::zero());
                let hinv = h.inv();
                for (i, c) in coeffs.iter().enumerate() {
                    let p = i as i64 - self.pole_order as i64;
                    let w = if p >= 0 { h.pow(p as u32) } else { hinv.pow((-p) as u32) };
                    acc = &acc + &c.scale(&w);
                }
                acc
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Probe {
    pub h: GaussianRational,
    /// `(∂_z T + T ∂_z − id) / h^{K+1}` for the truncation `T`.
    pub scaled_residual: Vec<ExactMatrix>,
    /// `R_z − R^pt_z` anticommutes with `∂_z`, where `R^pt_z` comes from
    /// the pointwise construction.
    pub pointwise_agrees: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub probes: Vec<Probe>,
    /// The scaled residual is the same matrix at every probe, so the
    /// truncation error is exactly of order `K + 1`.
    pub order_ok: bool,
    pub pass: bool,
}

fn anticommutes(c: &CochainComplex<GaussianRational>, d: &[ExactMatrix]) -> bool {
    hom_differential(c, 1, d).iter().all(|m| m.is_zero())
}

/// Probes `z₀ + h₀/2^i`, skipping spectral values.
pub fn residual_check(f: &ExactFamily, res: &LocalResolvent, probes: usize, cfg: &RunConfig) -> Result<ResidualReport> {
    let spec = spectral_set(f, cfg.tol_root)?;
    let mut h = GaussianRational::from_ratio(1, 2);
    let two = GaussianRational::from_integer(2);
    let mut out = Vec::new();
    let scale_pow = res.order as u32 + 1;
    while out.len() < probes {
        let z = &res.center + &h;
        if !spec.delta.eval(&z).is_zero() {
            let ez = f.evaluate(&z, 0.0)?;
            let t = ChainHomotopy { maps: res.truncated_at(&h) };
            let inv = h.pow(scale_pow).inv();
            let scaled_residual = homotopy_residual(&ez, &t).iter().map(|m| m.scale(&inv)).collect();
            let pt = homotopy_resolvent(&ez, 0.0)?;
            let exact_z: Vec<ExactMatrix> = res
                .exact
                .iter()
                .map(|m| eval_rational(m, &z).expect("no pole away from spectral points"))
                .collect();
            let diff: Vec<ExactMatrix> = exact_z.iter().zip(&pt.maps).map(|(a, b)| a - b).collect();
            let exact_ok = homotopy_residual(&ez, &ChainHomotopy { maps: exact_z }).iter().all(|m| m.is_zero());
            out.push(Probe { h: h.clone(), scaled_residual, pointwise_agrees: exact_ok && anticommutes(&ez, &diff) });
        }
        h = &h / &two;
    }
    let order_ok = out.windows(2).all(|w| w[0].scaled_residual == w[1].scaled_residual);
    let pass = order_ok && out.iter().all(|p| p.pointwise_agrees);
    Ok(ResidualReport { probes: out, order_ok, pass })
}
