//! Periodic spectral flow of families `Q_t(w)` over `t ∈ [0, 1]`, counted with
//! systems of excluded radii, and its comparison with index jumps of a path
//! of twisted families.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::complexes::{defect_polynomial, spectral_set, CochainComplex, TwistedFamily};
use crate::config::RunConfig;
use crate::equivariant::index_jump;
use crate::error::{Error, Result};
use crate::exactalg::roots::ser_c64;
use crate::exactalg::roots::aberth;
use crate::exactalg::{interpolate, poly_det, roots_with_multiplicity, Matrix, Root};
use crate::json::ratio_str;
use crate::{ExactFamily, GaussianRational, Poly};

pub const DEFAULT_EPS1: f64 = 0.3;
const MAX_DEPTH: u32 = 10;

fn ratios<S: Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn f64_of(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Square matrices over Q(i)[w] sampled in `t`, linear in between.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorFamily {
    samples: Vec<(BigRational, Matrix<Poly>)>,
    /// `dets[i][k]` is the `s^k` coefficient of `det Q` on the `i`-th sample
    /// interval, `s` its local coordinate in `[0, 1]`.
    dets: Vec<Vec<Poly>>,
}

/// `det((1 − s)Q₀ + sQ₁)` as a polynomial in `s` with coefficients in Q(i)[w].
fn interval_det(q0: &Matrix<Poly>, q1: &Matrix<Poly>) -> Vec<Poly> {
    let n = q0.rows();
    let xs: Vec<GaussianRational> = (0..=n as i64).map(GaussianRational::from_integer).collect();
    let ys: Vec<Poly> = xs
        .iter()
        .map(|s| poly_det(&Matrix::from_fn(n, n, |r, c| lerp_poly(&q0[(r, c)], &q1[(r, c)], s))))
        .collect();
    let width = ys.iter().map(|p| p.coeffs().len()).max().unwrap_or(0);
    let in_s: Vec<Poly> = (0..width).map(|c| interpolate(&xs, &ys.iter().map(|p| p.coeff(c)).collect::<Vec<_>>())).collect();
    (0..=n).map(|k| Poly::new(in_s.iter().map(|p| p.coeff(k)).collect())).collect()
}

fn lerp_poly(a: &Poly, b: &Poly, s: &GaussianRational) -> Poly {
    let one_minus = &GaussianRational::one() - s;
    &a.scale(&one_minus) + &b.scale(s)
}

impl OperatorFamily {
    pub fn new(samples: Vec<(BigRational, Matrix<Poly>)>) -> Result<Self> {
        let (Some(first), Some(last)) = (samples.first(), samples.last()) else {
            return Err(Error::Shape("operator family without samples".into()));
        };
        if !first.0.is_zero() || !last.0.is_one() || samples.len() < 2 {
            return Err(Error::Shape("samples must run from t = 0 to t = 1".into()));
        }
        if samples.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Shape("sample times must increase strictly".into()));
        }
        let n = first.1.rows();
        for (t, q) in &samples {
            if q.shape() != (n, n) {
                return Err(Error::Shape(format!("Q at t = {t} has shape {:?}", q.shape())));
            }
            if poly_det(q).is_zero() {
                return Err(Error::IdenticallySingular(format!("det Q vanishes identically at t = {t}")));
            }
        }
        Ok(Self::checked(samples))
    }

    fn checked(samples: Vec<(BigRational, Matrix<Poly>)>) -> Self {
        let dets = samples.windows(2).map(|w| interval_det(&w[0].1, &w[1].1)).collect();
        OperatorFamily { samples, dets }
    }

    pub fn constant(q: Matrix<Poly>) -> Result<Self> {
        Self::new(vec![(BigRational::zero(), q.clone()), (BigRational::one(), q)])
    }

    /// Samples `q(t)` at `t = k/steps`.
    pub fn sampled(steps: usize, q: impl Fn(&BigRational) -> Matrix<Poly>) -> Result<Self> {
        Self::new((0..=steps).map(|k| {
            let t = rat(k as i64, steps as i64);
            let m = q(&t);
            (t, m)
        }).collect())
    }

    pub fn samples(&self) -> &[(BigRational, Matrix<Poly>)] {
        &self.samples
    }

    pub fn size(&self) -> usize {
        self.samples[0].1.rows()
    }

    pub fn at(&self, t: &BigRational) -> Matrix<Poly> {
        let i = match self.samples.iter().position(|(s, _)| s >= t) {
            Some(0) | None => return self.samples[0].1.clone(),
            Some(i) => i,
        };
        let (t0, q0) = &self.samples[i - 1];
        let (t1, q1) = &self.samples[i];
        let s = GaussianRational::from_rational((t - t0) / (t1 - t0));
        let n = self.size();
        Matrix::from_fn(n, n, |r, c| lerp_poly(&q0[(r, c)], &q1[(r, c)], &s))
    }

    pub fn det_at(&self, t: &BigRational) -> Result<Poly> {
        let d = match self.samples.iter().position(|(s, _)| s >= t) {
            Some(0) | None => self.dets[0][0].clone(),
            Some(i) => {
                let (t0, t1) = (&self.samples[i - 1].0, &self.samples[i].0);
                let s = GaussianRational::from_rational((t - t0) / (t1 - t0));
                self.dets[i - 1].iter().rev().fold(Poly::zero(), |acc, c| &acc.scale(&s) + c)
            }
        };
        if d.is_zero() {
            return Err(Error::IdenticallySingular(format!("det Q vanishes identically at t = {t}")));
        }
        Ok(d)
    }

    /// The family traversed backwards, `t ↦ 1 − t`.
    pub fn reverse(&self) -> Self {
        let samples = self.samples.iter().rev().map(|(t, q)| (BigRational::one() - t, q.clone())).collect();
        Self::checked(samples)
    }

    /// The part over `[a, b]`, rescaled to `[0, 1]`.
    pub fn restrict(&self, a: &BigRational, b: &BigRational) -> Result<Self> {
        if !(BigRational::zero() <= *a && a < b && *b <= BigRational::one()) {
            return Err(Error::OutOfRange(format!("[{a}, {b}] is not a subinterval of [0, 1]")));
        }
        let width = b - a;
        let mut samples = vec![(BigRational::zero(), self.at(a))];
        for (t, q) in &self.samples {
            if t > a && t < b {
                samples.push(((t - a) / &width, q.clone()));
            }
        }
        samples.push((BigRational::one(), self.at(b)));
        Self::new(samples)
    }
}

/// Roots of `det Q_t` with multiplicity.
pub fn roots_at(f: &OperatorFamily, t: &BigRational, tol_root: f64) -> Result<Vec<Root>> {
    let d = f.det_at(t)?;
    if d.degree() == Some(0) {
        return Ok(Vec::new());
    }
    roots_with_multiplicity(&d, tol_root)
}

/// Roots of `det Q_t` with `r_in ≤ |w| ≤ r_out`.
pub fn spectral_points_at(f: &OperatorFamily, t: &BigRational, annulus: (f64, f64), tol_root: f64) -> Result<Vec<Root>> {
    let (lo, hi) = annulus;
    Ok(roots_at(f, t, tol_root)?
        .into_iter()
        .filter(|r| {
            let m = r.approx.norm();
            m >= lo - tol_root && m <= hi + tol_root
        })
        .collect())
}

#[derive(Clone, Debug)]
struct Slice {
    t: BigRational,
    roots: Vec<Complex64>,
}

impl Slice {
    /// Only approximate roots are needed here, and skipping the exact
    /// squarefree split keeps deep bisection steps cheap.
    fn at(f: &OperatorFamily, t: BigRational) -> Result<Self> {
        let d = f.det_at(&t)?;
        let coeffs: Vec<Complex64> = d.coeffs().iter().map(GaussianRational::to_c64).collect();
        let roots = if d.degree().unwrap_or(0) == 0 { Vec::new() } else { aberth(&coeffs) };
        Ok(Slice { t, roots })
    }

    fn moduli(&self) -> Vec<f64> {
        let mut m: Vec<f64> = self.roots.iter().map(|z| z.norm().min(2.0)).collect();
        m.sort_by(f64::total_cmp);
        m
    }

    fn inside(&self, lambda: f64) -> usize {
        self.roots.iter().filter(|z| z.norm() < lambda).count()
    }

    fn between(&self, lo: f64, hi: f64) -> usize {
        self.roots.iter().filter(|z| (lo..=hi).contains(&z.norm())).count()
    }
}

/// Matching distance of two sorted modulus lists, padding with 2.
fn bottleneck(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| (a.get(i).copied().unwrap_or(2.0) - b.get(i).copied().unwrap_or(2.0)).abs())
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, Serialize)]
pub struct ExcludedValueSystem {
    #[serde(serialize_with = "ratios")]
    pub partition: Vec<BigRational>,
    /// `radii[l]` is excluded over `[partition[l], partition[l + 1]]`.
    pub radii: Vec<f64>,
    pub eps1: f64,
}

struct Builder<'a> {
    f: &'a OperatorFamily,
    eps1: f64,
    tol_root: f64,
    partition: Vec<BigRational>,
    radii: Vec<f64>,
    slices: Vec<Slice>,
}

impl Builder<'_> {
    fn candidates(&self, slices: &[&Slice], forced: bool) -> Vec<f64> {
        if forced {
            return vec![1.0];
        }
        let (lo, hi) = (1.0 - self.eps1, 1.0 + self.eps1);
        let mut pts: Vec<f64> = slices.iter().flat_map(|s| s.moduli()).filter(|m| *m > lo && *m < hi).collect();
        pts.push(lo);
        pts.push(hi);
        pts.sort_by(f64::total_cmp);
        let mut gaps: Vec<(f64, f64)> = pts.windows(2).map(|w| (w[1] - w[0], (w[0] + w[1]) / 2.0)).collect();
        gaps.sort_by(|a, b| b.0.total_cmp(&a.0));
        std::iter::once(1.0).chain(gaps.into_iter().map(|g| g.1)).collect()
    }

    fn accepts(&self, lambda: f64, slices: &[&Slice]) -> bool {
        let clearance = slices
            .iter()
            .flat_map(|s| s.roots.iter().map(move |z| (z.norm() - lambda).abs()))
            .fold(f64::INFINITY, f64::min);
        if clearance <= self.tol_root {
            return false;
        }
        let count = slices[0].inside(lambda);
        if slices.iter().any(|s| s.inside(lambda) != count) {
            return false;
        }
        slices.windows(2).all(|w| bottleneck(&w[0].moduli(), &w[1].moduli()) < clearance)
    }

    fn refine(&mut self, a: Slice, b: Slice, depth: u32, first: bool, last: bool) -> Result<()> {
        let mid = Slice::at(self.f, (&a.t + &b.t) / BigRational::from_integer(2.into()))?;
        let forced = first || last;
        let trio = [&a, &mid, &b];
        if let Some(lambda) = self.candidates(&trio, forced).into_iter().find(|&l| self.accepts(l, &trio)) {
            self.partition.push(b.t.clone());
            self.radii.push(lambda);
            self.slices.push(b);
            return Ok(());
        }
        if depth >= MAX_DEPTH {
            return Err(Error::NoExcludedRadius(format!(
                "no root-free radius near [{}, {}] after {MAX_DEPTH} halvings",
                a.t, b.t
            )));
        }
        self.refine(a, mid.clone(), depth + 1, first, false)?;
        self.refine(mid, b, depth + 1, false, last)
    }
}

/// Partition of `[0, 1]` with a root-free radius on each piece; the first
/// and last radius are 1.
pub fn build_excluded_system(f: &OperatorFamily, eps1: f64, tol_root: f64) -> Result<ExcludedValueSystem> {
    Ok(build(f, eps1, tol_root)?.0)
}

fn build(f: &OperatorFamily, eps1: f64, tol_root: f64) -> Result<(ExcludedValueSystem, Vec<Slice>)> {
    if !(eps1 > 0.0 && eps1 < 1.0) {
        return Err(Error::InvalidConfig(format!("eps1 = {eps1} must lie in (0, 1)")));
    }
    let ends = [BigRational::zero(), BigRational::one()];
    for t in &ends {
        if let Some(r) = spectral_points_at(f, t, (1.0, 1.0), tol_root)?.first() {
            return Err(Error::EndpointSpectral(format!("root {} on |w| = 1 at t = {t}", r.label())));
        }
    }
    let first = Slice::at(f, BigRational::zero())?;
    let mut b = Builder {
        f,
        eps1,
        tol_root,
        partition: vec![BigRational::zero()],
        radii: Vec::new(),
        slices: vec![first.clone()],
    };
    let times: Vec<BigRational> = f.samples.iter().map(|(t, _)| t.clone()).collect();
    let mut left = first;
    for (i, w) in times.windows(2).enumerate() {
        let right = Slice::at(f, w[1].clone())?;
        b.refine(left, right.clone(), 0, i == 0, i + 2 == times.len())?;
        left = right;
    }
    let system = ExcludedValueSystem { partition: b.partition, radii: b.radii, eps1 };
    Ok((system, b.slices))
}

#[derive(Clone, Debug, Serialize)]
pub struct Crossing {
    #[serde(serialize_with = "ratio_str")]
    pub t: BigRational,
    pub t_approx: f64,
    #[serde(serialize_with = "ser_c64")]
    pub w: Complex64,
    pub sign: i64,
    pub multiplicity: usize,
    /// Several roots cross together, so the one-dimensional-kernel
    /// assumption cannot be confirmed here.
    pub flagged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowReport {
    pub flow: i64,
    pub crossings: Vec<Crossing>,
    pub system: ExcludedValueSystem,
}

/// `Σ a_l b_l` over the interior partition points.
pub fn periodic_spectral_flow(f: &OperatorFamily, eps1: f64, tol_root: f64) -> Result<FlowReport> {
    let (system, slices) = build(f, eps1, tol_root)?;
    let mut flow = 0;
    let mut crossings = Vec::new();
    for l in 1..system.radii.len() {
        let (r0, r1) = (system.radii[l - 1], system.radii[l]);
        let a = match r0.total_cmp(&r1) {
            std::cmp::Ordering::Greater => 1,
            std::cmp::Ordering::Less => -1,
            std::cmp::Ordering::Equal => 0,
        };
        let b = slices[l].between(r0.min(r1), r0.max(r1));
        if a * b as i64 == 0 {
            continue;
        }
        flow += a * b as i64;
        let (t, w) = locate_crossing(f, &system.partition[l - 1], &system.partition[l + 1])?;
        crossings.push(Crossing { t_approx: f64_of(&t), t, w, sign: a, multiplicity: b, flagged: b > 1 });
    }
    Ok(FlowReport { flow, crossings, system })
}

/// Bisection on the number of roots inside the unit circle.
fn locate_crossing(f: &OperatorFamily, a: &BigRational, b: &BigRational) -> Result<(BigRational, Complex64)> {
    let count = |t: &BigRational| -> Result<usize> { Ok(Slice::at(f, t.clone())?.inside(1.0)) };
    let (mut lo, mut hi) = (a.clone(), b.clone());
    let c_lo = count(&lo)?;
    if c_lo != count(&hi)? {
        let two = BigRational::from_integer(2.into());
        for _ in 0..48 {
            let mid = (&lo + &hi) / &two;
            if count(&mid)? == c_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let t = (&lo + &hi) / BigRational::from_integer(2.into());
    let s = Slice::at(f, t.clone())?;
    let w = s
        .roots
        .iter()
        .copied()
        .min_by(|x, y| (x.norm() - 1.0).abs().total_cmp(&(y.norm() - 1.0).abs()))
        .unwrap_or_default();
    Ok((t, w))
}

/// `Σ c_k (w − 1)^k (w + 1)^{d − k}`: the polynomial in `w` whose roots are
/// the images of the roots of `Σ c_k z^k` under `z ↦ (1 + z)/(1 − z)`, which
/// takes `Re z < 0` into the unit disk.
pub fn cayley(p: &Poly) -> Poly {
    let Some(d) = p.degree() else { return Poly::zero() };
    let one = GaussianRational::one();
    let wm = Poly::new(vec![-one.clone(), one.clone()]);
    let wp = Poly::new(vec![one.clone(), one]);
    (0..=d).fold(Poly::zero(), |acc, k| {
        &acc + &(&wm.pow(k as u32) * &wp.pow((d - k) as u32)).scale(&p.coeff(k))
    })
}

/// Twisted families sampled in `t`, linear in between.
#[derive(Clone, Debug)]
pub struct FamilyPath {
    samples: Vec<(BigRational, ExactFamily)>,
}

impl FamilyPath {
    pub fn new(samples: Vec<(BigRational, ExactFamily)>) -> Result<Self> {
        if samples.len() < 2 || !samples[0].0.is_zero() || !samples[samples.len() - 1].0.is_one() {
            return Err(Error::Shape("path samples must run from t = 0 to t = 1".into()));
        }
        if samples.windows(2).any(|w| w[0].0 >= w[1].0 || w[0].1.dims() != w[1].1.dims()) {
            return Err(Error::Shape("path samples must increase in t and share dimensions".into()));
        }
        Ok(FamilyPath { samples })
    }

    pub fn linear(start: ExactFamily, end: ExactFamily) -> Result<Self> {
        Self::new(vec![(BigRational::zero(), start), (BigRational::one(), end)])
    }

    pub fn reverse(&self) -> Self {
        let samples = self.samples.iter().rev().map(|(t, f)| (BigRational::one() - t, f.clone())).collect();
        FamilyPath { samples }
    }

    pub fn at(&self, t: &BigRational) -> Result<ExactFamily> {
        let i = match self.samples.iter().position(|(s, _)| s >= t) {
            Some(0) | None => return Ok(self.samples[0].1.clone()),
            Some(i) => i,
        };
        let (t0, f0) = &self.samples[i - 1];
        let (t1, f1) = &self.samples[i];
        let s = GaussianRational::from_rational((t - t0) / (t1 - t0));
        let r = &GaussianRational::one() - &s;
        let mix = |a: &crate::ExactMatrix, b: &crate::ExactMatrix| &a.scale(&r) + &b.scale(&s);
        let d = f0.complex().differentials().iter().zip(f1.complex().differentials()).map(|(a, b)| mix(a, b)).collect();
        let sg = f0.symbols().iter().zip(f1.symbols()).map(|(a, b)| mix(a, b)).collect();
        let fam = TwistedFamily::new(CochainComplex::new(f0.dims().to_vec(), d)?, sg)?;
        fam.ensure_valid(0.0)?;
        Ok(fam)
    }

    fn times(&self) -> Vec<BigRational> {
        self.samples.iter().map(|(t, _)| t.clone()).collect()
    }

    /// `steps` equal subdivisions of every sample interval.
    fn grid(&self, steps: usize) -> Vec<BigRational> {
        let times = self.times();
        let mut out = vec![times[0].clone()];
        for w in times.windows(2) {
            for k in 1..=steps {
                out.push(&w[0] + (&w[1] - &w[0]) * rat(k as i64, steps as i64));
            }
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PathReport {
    pub flow: i64,
    pub crossings: Vec<Crossing>,
    /// Signed count of roots of `Δ_t` moving across `Re z = 0`, from
    /// nearest-neighbour tracking.
    pub tracked_crossings: i64,
    pub index_jump_start: i64,
    pub index_jump_end: i64,
    pub jump_change: i64,
    pub pass: bool,
}

const PATH_STEPS: usize = 64;
const TRACK_STEPS: usize = 128;

/// Spectral flow of the Cayley image of `Δ_{E_t}` against root tracking in
/// the `z`-plane and against the change of the index jump over `(0, R)`.
pub fn specflow_vs_index_jump(path: &FamilyPath, eps1: f64, cfg: &RunConfig) -> Result<PathReport> {
    let fine = path.grid(TRACK_STEPS);
    let deltas = fine.iter().map(|t| defect_polynomial(&path.at(t)?)).collect::<Result<Vec<Poly>>>()?;
    // The flow grid is every `TRACK_STEPS / PATH_STEPS`-th point of the fine one.
    let stride = TRACK_STEPS / PATH_STEPS;
    let samples = fine
        .iter()
        .zip(&deltas)
        .step_by(stride)
        .map(|(t, d)| (t.clone(), Matrix::from_fn(1, 1, |_, _| cayley(d))))
        .collect();
    let op = OperatorFamily::new(samples)?;
    let report = periodic_spectral_flow(&op, eps1, cfg.tol_root)?;

    let tracked = track_crossings(&fine, &deltas, cfg.tol_root)?;

    let start = path.at(&BigRational::zero())?;
    let end = path.at(&BigRational::one())?;
    let reach = [&start, &end]
        .iter()
        .map(|f| spectral_set(f, cfg.tol_root).map(|s| s.points.iter().map(|p| p.z_c64().re.abs()).fold(0.0, f64::max)))
        .collect::<Result<Vec<f64>>>()?;
    let r = 1.0 + reach.iter().copied().fold(0.0, f64::max);
    let j0 = index_jump(&start, (0.0, r), cfg)?;
    let j1 = index_jump(&end, (0.0, r), cfg)?;
    let change = j1 - j0;
    let pass = report.flow == tracked && report.flow == change;
    Ok(PathReport {
        flow: report.flow,
        crossings: report.crossings,
        tracked_crossings: tracked,
        index_jump_start: j0,
        index_jump_end: j1,
        jump_change: change,
        pass,
    })
}

struct Track {
    z: Complex64,
    sign: i8,
    touched: bool,
}

fn sign_of(x: f64, tol: f64) -> i8 {
    if x > tol {
        1
    } else if x < -tol {
        -1
    } else {
        0
    }
}

fn expanded_roots(p: &Poly, tol_root: f64) -> Result<Vec<Complex64>> {
    if p.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    Ok(roots_with_multiplicity(p, tol_root)?
        .into_iter()
        .flat_map(|r| std::iter::repeat_n(r.approx, r.multiplicity))
        .collect())
}

fn track_crossings(ts: &[BigRational], deltas: &[Poly], tol_root: f64) -> Result<i64> {
    let zero_tol = tol_root.sqrt();
    let mut tracks: Vec<Track> = expanded_roots(&deltas[0], tol_root)?
        .into_iter()
        .map(|z| Track { z, sign: sign_of(z.re, zero_tol), touched: false })
        .collect();
    let mut count = 0;
    for k in 1..ts.len() {
        let mut next = expanded_roots(&deltas[k], tol_root)?;
        if next.len() != tracks.len() {
            return Err(Error::Mismatch(format!("root count changes at t = {}", ts[k])));
        }
        let dt = f64_of(&(&ts[k] - &ts[k - 1]));
        for tr in tracks.iter_mut() {
            let (i, _) = next
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - tr.z).norm().total_cmp(&(b.1 - tr.z).norm()))
                .expect("same root count");
            let z = next.swap_remove(i);
            let s = sign_of(z.re, zero_tol);
            if s == 0 {
                tr.touched = true;
            } else if tr.sign != 0 && s != tr.sign {
                let slope = (z.re - tr.z.re).abs() / dt;
                if slope < zero_tol {
                    return Err(Error::TangentialCrossing(format!("slope {slope:.3e} near t = {}", ts[k])));
                }
                count += s as i64;
                tr.touched = false;
            } else if tr.touched && s == tr.sign {
                return Err(Error::TangentialCrossing(format!("root touches Re z = 0 before t = {}", ts[k])));
            }
            if s != 0 {
                tr.sign = s;
            }
            tr.z = z;
        }
    }
    Ok(count)
}
