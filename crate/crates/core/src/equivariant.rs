//! Equivariant cohomology `Ĥ*_z`, the first page of its u-filtration
//! spectral sequence, index jumps over strips and `h̃`.
//!
//! `Ĉ^j_z` is the space of principal parts `Σ_{l=1}^{m} α_{−l} u^{−l}` with
//! coefficients in `C^j` and differential `∂_z − uσ`. We truncate at depth `m`
//! and read off `Ĥ^j` from the alternating partial sums
//! `F_m^j = Σ_{k≤j} (−1)^{j−k} dim H^k(Ĉ_{(m)})`. These are non-decreasing in
//! `m` and constant from the largest Jordan chain length on, so the first
//! repeat is the stable value.
//!
//! Independently, `dim Ĥ^j_z` equals the vanishing order at `z` of the product
//! `D_j` of the invariant factors of `∂^j − wσ^j` over Q(i)[w]. Every report is
//! checked against that count and a disagreement is an error.

use num_complex::Complex64;
use serde::Serialize;

use crate::complexes::{induced_symbol_rank, spectral_set, SpectralPoint, SpectralSet, TwistedFamily};
use crate::config::{Mode, RunConfig};
use crate::error::{Error, Result};
use crate::exactalg::{roots::format_c64, Matrix};
use crate::field::Scalar;
use crate::{ExactFamily, GaussianRational};

/// A point of the z-plane, exact when possible.
#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    Exact(GaussianRational),
    Approx(Complex64),
}

impl Point {
    pub fn to_c64(&self) -> Complex64 {
        match self {
            Point::Exact(g) => g.to_c64(),
            Point::Approx(c) => *c,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Point::Exact(g) => g.to_string(),
            Point::Approx(c) => format_c64(*c),
        }
    }
}

impl From<&SpectralPoint> for Point {
    fn from(p: &SpectralPoint) -> Self {
        match &p.root.exact {
            Some(g) => Point::Exact(g.clone()),
            None => Point::Approx(p.root.approx),
        }
    }
}

/// Matrix of `∂_z − uσ` from `Ĉ^j_{(m)}` to `Ĉ^{j+1}_{(m)}`.
///
/// Block `l` holds the coefficient of `u^{−l−1}`; the diagonal blocks are
/// `∂^j_z` and the superdiagonal blocks are `−σ^j`.
pub fn hat_differential<S: Scalar>(f: &TwistedFamily<S>, z: &S, m: usize, j: usize) -> Result<Matrix<S>> {
    if m == 0 {
        return Err(Error::OutOfRange("truncation depth must be at least 1".into()));
    }
    let dz = f.complex().d(j as i64);
    let dz = &dz - &f.sigma(j as i64).scale(z);
    let ms = -&f.sigma(j as i64);
    let (r, c) = dz.shape();
    let mut out = Matrix::zeros(m * r, m * c);
    for l in 0..m {
        out.set_block(l * r, l * c, &dz);
        if l + 1 < m {
            out.set_block(l * r, (l + 1) * c, &ms);
        }
    }
    Ok(out)
}

/// `dim H^j` of the depth-`m` truncated tower, `j = 0..=n`.
pub fn truncated_cohomology<S: Scalar>(f: &TwistedFamily<S>, z: &S, m: usize, tol_rank: f64) -> Result<Vec<usize>> {
    let n = f.top();
    let ranks = (0..n)
        .map(|j| hat_differential(f, z, m, j).map(|d| d.rank_tol(tol_rank)))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..=n)
        .map(|j| {
            let out = ranks.get(j).copied().unwrap_or(0);
            let inc = if j > 0 { ranks[j - 1] } else { 0 };
            m * f.dims()[j] - out - inc
        })
        .collect())
}

fn partial_sums(h: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(h.len());
    let mut acc: i64 = 0;
    for &x in h {
        acc = x as i64 - acc;
        // Negative values only arise from inconsistent numeric ranks; they
        // surface as a mismatch against the vanishing orders.
        out.push(usize::try_from(acc).unwrap_or(usize::MAX));
    }
    out
}

/// Stable `Ĥ` dims, the first depth where they are reached, and the partial
/// sums at every depth tried.
pub fn tower_dims<S: Scalar>(
    f: &TwistedFamily<S>,
    z: &S,
    tol_rank: f64,
) -> Result<(Vec<usize>, usize, Vec<Vec<usize>>)> {
    let cap = 1 + f.dims().iter().sum::<usize>();
    let mut history: Vec<Vec<usize>> = Vec::new();
    // An empty complex still needs a second depth to confirm the repeat.
    for m in 1..=cap.max(2) {
        let filt = partial_sums(&truncated_cohomology(f, z, m, tol_rank)?);
        if history.last() == Some(&filt) {
            let stable = filt.clone();
            let first = history.iter().position(|h| *h == stable).expect("present") + 1;
            history.push(filt);
            return Ok((stable, first, history));
        }
        history.push(filt);
    }
    Err(Error::NoStabilization { cap })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivariantReport {
    pub z: String,
    pub dims: Vec<usize>,
    pub euler: i64,
    pub stabilized_at: usize,
    /// Partial sums `F_m` for `m = 1, 2, …` up to the confirming repeat.
    pub history: Vec<Vec<usize>>,
}

fn euler(dims: &[usize]) -> i64 {
    dims.iter().enumerate().map(|(j, &d)| if j % 2 == 0 { d as i64 } else { -(d as i64) }).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct Contribution {
    pub z: String,
    pub dims: Vec<usize>,
    pub euler: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexJumpReport {
    pub strip: (f64, f64),
    pub jump: i64,
    pub contributions: Vec<Contribution>,
}

/// A validated family together with its spectral set.
#[derive(Clone, Debug)]
pub struct Equivariant {
    family: ExactFamily,
    spectral: SpectralSet,
    cfg: RunConfig,
}

impl Equivariant {
    /// Fails with `DegenerateFamily` when every `z` is spectral.
    pub fn new(family: &ExactFamily, cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        let spectral = spectral_set(family, cfg.tol_root)?;
        Ok(Equivariant { family: family.clone(), spectral, cfg: cfg.clone() })
    }

    pub fn family(&self) -> &ExactFamily {
        &self.family
    }

    pub fn spectral(&self) -> &SpectralSet {
        &self.spectral
    }

    /// `ord_z D_j` for each `j`, padded with the top degree.
    fn expected_dims(&self, z: &Point) -> Vec<usize> {
        let mut out = match z {
            Point::Exact(g) => self.spectral.degree_factors.iter().map(|d| d.root_multiplicity(g)).collect(),
            Point::Approx(c) => match self.spectral.find(*c, self.cfg.tol_root) {
                Some(p) => p.orders.clone(),
                None => vec![0; self.spectral.degree_factors.len()],
            },
        };
        out.push(0);
        out
    }

    pub fn at(&self, z: &Point) -> Result<EquivariantReport> {
        let tol = self.cfg.tol_rank;
        let (dims, stabilized_at, history) = match (z, self.cfg.mode) {
            (Point::Exact(g), Mode::Exact) => tower_dims(&self.family, g, tol)?,
            _ => tower_dims(&self.family.to_float(), &z.to_c64(), tol)?,
        };
        let expected = self.expected_dims(z);
        if dims != expected {
            return Err(Error::Mismatch(format!(
                "tower gives {dims:?} at z = {} but vanishing orders give {expected:?}",
                z.label()
            )));
        }
        Ok(EquivariantReport { z: z.label(), euler: euler(&dims), dims, stabilized_at, history })
    }

    pub fn at_point(&self, p: &SpectralPoint) -> Result<EquivariantReport> {
        self.at(&Point::from(p))
    }

    pub fn index_jump_report(&self, a: f64, b: f64) -> Result<IndexJumpReport> {
        if !(a < b) {
            return Err(Error::OutOfRange(format!("strip ({a}, {b}) needs a < b")));
        }
        let mut contributions = Vec::new();
        for p in self.spectral.in_strip(a, b, self.cfg.tol_root)? {
            let r = self.at_point(p)?;
            contributions.push(Contribution { z: r.z, euler: r.euler, dims: r.dims });
        }
        let jump = contributions.iter().map(|c| c.euler).sum();
        Ok(IndexJumpReport { strip: (a, b), jump, contributions })
    }

    /// `Σ χ(Ĥ*_z)` over spectral points with `a < Re z < b`.
    pub fn index_jump(&self, a: f64, b: f64) -> Result<i64> {
        Ok(self.index_jump_report(a, b)?.jump)
    }

    /// `Σ −χ(Ĥ*_z)` over spectral points on the imaginary axis.
    pub fn tilde_h(&self) -> Result<i64> {
        let mut total = 0;
        for p in &self.spectral.points {
            if p.root.approx.re.abs() < self.cfg.tol_root {
                total -= self.at_point(p)?.euler;
            }
        }
        Ok(total)
    }
}

pub fn equivariant_cohomology(f: &ExactFamily, z: &Point, cfg: &RunConfig) -> Result<EquivariantReport> {
    Equivariant::new(f, cfg)?.at(z)
}

pub fn index_jump(f: &ExactFamily, strip: (f64, f64), cfg: &RunConfig) -> Result<i64> {
    Equivariant::new(f, cfg)?.index_jump(strip.0, strip.1)
}

pub fn tilde_h(f: &ExactFamily, cfg: &RunConfig) -> Result<i64> {
    Equivariant::new(f, cfg)?.tilde_h()
}

/// Every column `i ≤ −1` of `E₁` is `H^k(E_z)` in total degree `k`, and
/// `d₁ = −uσ̄` has the rank of `σ̄^k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Page1 {
    pub z: String,
    /// `dim E₁^{i,k−i} = dim H^k(E_z)` for any column `i ≤ −1`.
    pub column_dims: Vec<usize>,
    /// Rank of `d₁` out of total degree `k`.
    pub d1_ranks: Vec<usize>,
    /// `E₂` in column `−1`: `H^k / im σ̄^{k−1}`.
    pub e2_edge: Vec<usize>,
    /// `E₂` in columns `≤ −2`: `ker σ̄^k / im σ̄^{k−1}`.
    pub e2_interior: Vec<usize>,
}

impl Page1 {
    /// `E₁^{i,j}` for `i` in `−depth..=−1` and `j` such that `0 ≤ i + j ≤ n`.
    pub fn table(&self, depth: usize) -> Vec<(i64, i64, usize)> {
        let mut out = Vec::new();
        for i in 1..=depth as i64 {
            for (k, &h) in self.column_dims.iter().enumerate() {
                out.push((-i, k as i64 + i, h));
            }
        }
        out
    }
}

pub fn spectral_sequence_page1<S: Scalar>(f: &TwistedFamily<S>, z: &S, label: String, tol_rank: f64) -> Result<Page1> {
    f.ensure_valid(tol_rank)?;
    let c = f.evaluate_unchecked(z);
    let h = c.cohomology_dims(tol_rank)?;
    let n = f.top();
    let d1: Vec<usize> = (0..=n).map(|k| induced_symbol_rank(&c, &f.sigma(k as i64), k, tol_rank)).collect();
    let e2_edge = (0..=n).map(|k| h[k] - if k > 0 { d1[k - 1] } else { 0 }).collect();
    let e2_interior = (0..=n).map(|k| h[k] - d1[k] - if k > 0 { d1[k - 1] } else { 0 }).collect();
    Ok(Page1 { z: label, column_dims: h, d1_ranks: d1, e2_edge, e2_interior })
}

/// Page 1 at a point given exactly or numerically, following `cfg.mode`.
pub fn page1_at(f: &ExactFamily, z: &Point, cfg: &RunConfig) -> Result<Page1> {
    match (z, cfg.mode) {
        (Point::Exact(g), Mode::Exact) => spectral_sequence_page1(f, g, z.label(), cfg.tol_rank),
        _ => spectral_sequence_page1(&f.to_float(), &z.to_c64(), z.label(), cfg.tol_rank),
    }
}
