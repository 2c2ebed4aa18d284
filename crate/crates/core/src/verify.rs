//! Seeded random instances and the verification suites built on them.
//!
//! Instance `k` of a run with seed `s` draws from its own ChaCha stream, so
//! reports are identical whatever the thread count.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::complexes::CochainComplex;
use crate::config::RunConfig;
use crate::covers::{crosscheck_cor214, mapping_torus_family, MappingTorusModel};
use crate::equivariant::{Equivariant, Point};
use crate::error::{Error, Result};
use crate::exactalg::Matrix;
use crate::knotcalc::{
    levine_tristram, mapping_torus_signature, random_alpha, random_seifert, thm16_consistency, MappingTorusSpec,
};
use crate::resolvent::{homotopy_residual, homotopy_resolvent, local_meromorphic_resolvent, residual_check};
use crate::specflow::{specflow_vs_index_jump, FamilyPath, DEFAULT_EPS1};
use crate::{ExactComplex, ExactFamily, ExactMatrix, GaussianRational};

pub fn instance_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    rng
}

fn small_unit<R: Rng>(rng: &mut R) -> GaussianRational {
    [
        GaussianRational::from_integer(1),
        GaussianRational::from_integer(-1),
        GaussianRational::from_integer(2),
        GaussianRational::from_integer(-2),
        GaussianRational::i(),
        GaussianRational::from_ints(1, 1),
    ]
    .choose(rng)
    .expect("nonempty")
    .clone()
}

/// Random product of elementary matrices over Z[i], with its inverse.
pub fn random_invertible<R: Rng>(rng: &mut R, n: usize) -> (ExactMatrix, ExactMatrix) {
    let mut p = ExactMatrix::identity(n);
    if n > 1 {
        for _ in 0..2 * n {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if a != b {
                p.add_row_multiple(a, b, &small_unit(rng));
            }
        }
    }
    let inv = p.inverse().expect("elementary products are invertible");
    (p, inv)
}

/// Random acyclic complex: a sum of `C --1--> C` pieces in a random basis.
pub fn random_acyclic_complex<R: Rng>(rng: &mut R, max_degrees: usize, max_total: usize) -> ExactComplex {
    let len = rng.gen_range(2..=max_degrees.max(2));
    let mut ranks = vec![0usize; len - 1];
    let mut total = 0;
    for r in ranks.iter_mut() {
        let k = rng.gen_range(0..=2);
        if total + 2 * k <= max_total {
            *r = k;
            total += 2 * k;
        }
    }
    let dims: Vec<usize> = (0..len)
        .map(|j| if j > 0 { ranks[j - 1] } else { 0 } + ranks.get(j).copied().unwrap_or(0))
        .collect();
    let bases: Vec<(ExactMatrix, ExactMatrix)> = dims.iter().map(|&d| random_invertible(rng, d)).collect();
    let diffs = (0..len - 1)
        .map(|j| {
            let mut d = ExactMatrix::zeros(dims[j + 1], dims[j]);
            let recv = if j > 0 { ranks[j - 1] } else { 0 };
            for k in 0..ranks[j] {
                d[(k, recv + k)] = GaussianRational::one();
            }
            &(&bases[j + 1].0 * &d) * &bases[j].1
        })
        .collect();
    CochainComplex::new(dims, diffs).expect("consistent shapes")
}

/// Eigenvalue pool for deck transformations; none is zero.
fn eigen_pool() -> Vec<GaussianRational> {
    ["2", "3", "-1", "1/2", "1", "1+i", "2-i", "-1/3", "5/2"]
        .iter()
        .map(|s| GaussianRational::from_str(s).expect("valid literal"))
        .collect()
}

pub fn jordan_matrix(blocks: &[(GaussianRational, usize)]) -> ExactMatrix {
    let n: usize = blocks.iter().map(|b| b.1).sum();
    let mut m = ExactMatrix::zeros(n, n);
    let mut at = 0;
    for (lambda, size) in blocks {
        for k in 0..*size {
            m[(at + k, at + k)] = lambda.clone();
            if k + 1 < *size {
                m[(at + k, at + k + 1)] = GaussianRational::one();
            }
        }
        at += size;
    }
    m
}

/// A mapping-torus model whose deck action on `H^j(Σ)` has prescribed
/// Jordan blocks.
#[derive(Clone, Debug)]
pub struct RandomModel {
    pub model: MappingTorusModel,
    /// Jordan blocks `(λ, size)` of the deck action on `H^j(Σ)`.
    pub jordan: Vec<Vec<(GaussianRational, usize)>>,
}

pub fn random_mapping_torus<R: Rng>(rng: &mut R, max_total: usize) -> RandomModel {
    let pool = eigen_pool();
    let len = rng.gen_range(1..=3);
    let mut budget = max_total;
    let mut jordan = vec![Vec::new(); len];
    let mut ranks = vec![0usize; len.saturating_sub(1)];
    for j in 0..len {
        for _ in 0..rng.gen_range(0..=2) {
            let size = rng.gen_range(1..=2);
            if size <= budget {
                jordan[j].push((pool.choose(rng).expect("nonempty").clone(), size));
                budget -= size;
            }
        }
    }
    for r in ranks.iter_mut() {
        if budget >= 2 && rng.gen_bool(0.5) {
            *r = 1;
            budget -= 2;
        }
    }
    let h: Vec<usize> = jordan.iter().map(|b| b.iter().map(|x| x.1).sum()).collect();
    let recv = |j: usize| if j > 0 { ranks[j - 1] } else { 0 };
    let send = |j: usize| ranks.get(j).copied().unwrap_or(0);
    let dims: Vec<usize> = (0..len).map(|j| h[j] + recv(j) + send(j)).collect();
    let c = pool[..4].choose(rng).expect("nonempty").clone();
    let bases: Vec<(ExactMatrix, ExactMatrix)> = dims.iter().map(|&d| random_invertible(rng, d)).collect();
    let diffs = (0..len.saturating_sub(1))
        .map(|j| {
            let mut d = ExactMatrix::zeros(dims[j + 1], dims[j]);
            for k in 0..send(j) {
                d[(h[j + 1] + k, h[j] + recv(j) + k)] = GaussianRational::one();
            }
            &(&bases[j + 1].0 * &d) * &bases[j].1
        })
        .collect();
    let deck = (0..len)
        .map(|j| {
            let acyclic = ExactMatrix::identity(recv(j) + send(j)).scale(&c);
            let tau = Matrix::direct_sum(&jordan_matrix(&jordan[j]), &acyclic);
            &(&bases[j].0 * &tau) * &bases[j].1
        })
        .collect();
    let sigma = CochainComplex::new(dims, diffs).expect("consistent shapes");
    let model = MappingTorusModel::new(sigma, deck).expect("deck map commutes with d and is invertible");
    RandomModel { model, jordan }
}

/// `λ ↦ Σ sizes` in each degree, from the prescribed Jordan blocks.
pub fn prescribed_eigenspaces(jordan: &[Vec<(GaussianRational, usize)>]) -> Vec<BTreeMap<String, usize>> {
    jordan
        .iter()
        .map(|blocks| {
            let mut m = BTreeMap::new();
            for (l, s) in blocks {
                *m.entry(l.to_string()).or_insert(0) += s;
            }
            m
        })
        .collect()
}

/// Largest Jordan block at `λ` over all degrees.
pub fn prescribed_max_block(jordan: &[Vec<(GaussianRational, usize)>], lambda: &GaussianRational) -> usize {
    jordan.iter().flatten().filter(|(l, _)| l == lambda).map(|b| b.1).max().unwrap_or(0)
}

/// Strip `(−R, R)` containing every spectral point, walls avoided.
pub fn covering_strip(f: &ExactFamily, cfg: &RunConfig) -> Result<(f64, f64)> {
    let s = crate::complexes::spectral_set(f, cfg.tol_root)?;
    let r = s.points.iter().map(|p| p.z_c64().re.abs()).fold(0.0, f64::max) + 1.25;
    Ok((-r, r))
}

/// Path `t ↦ mapping torus of P J(λ(t)) P⁻¹` with each `λ` linear in `t`
/// and `Re λ ≠ 1` at both ends.
pub fn random_jordan_path<R: Rng>(rng: &mut R) -> (FamilyPath, Vec<(GaussianRational, GaussianRational, usize)>) {
    let endpoint = |rng: &mut R| loop {
        let x = GaussianRational::from_ratio(rng.gen_range(1..=16), 4);
        if x != GaussianRational::one() {
            return x;
        }
    };
    let nblocks = rng.gen_range(1..=2);
    let mut blocks = Vec::new();
    for _ in 0..nblocks {
        let im = if rng.gen_bool(0.25) { GaussianRational::from_ints(0, 1) } else { GaussianRational::zero() };
        let a = &endpoint(rng) + &im;
        let b = &endpoint(rng) + &im;
        blocks.push((a, b, rng.gen_range(1..=2)));
    }
    let n: usize = blocks.iter().map(|b| b.2).sum();
    let (p, pinv) = random_invertible(rng, n);
    let fam = |pick: fn(&(GaussianRational, GaussianRational, usize)) -> GaussianRational| {
        let j: Vec<(GaussianRational, usize)> = blocks.iter().map(|b| (pick(b), b.2)).collect();
        let tau = &(&p * &jordan_matrix(&j)) * &pinv;
        let sigma = CochainComplex::zero(vec![n]);
        mapping_torus_family(&MappingTorusModel::new(sigma, vec![tau]).expect("nonzero eigenvalues"))
    };
    let path = FamilyPath::linear(fam(|b| b.0.clone()), fam(|b| b.1.clone())).expect("matching shapes");
    (path, blocks)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Cor214,
    Resolvent,
    SpecflowJump,
    KnotIdentities,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cor214" => Ok(Suite::Cor214),
            "resolvent" => Ok(Suite::Resolvent),
            "specflow-jump" => Ok(Suite::SpecflowJump),
            "knot-identities" => Ok(Suite::KnotIdentities),
            _ => Err(Error::Parse(format!("unknown suite {s}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Instance {
    pub index: usize,
    pub pass: bool,
    pub detail: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub count: usize,
    pub passed: usize,
    pub failed: Vec<usize>,
    pub instances: Vec<Instance>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.failed.is_empty()
    }
}

fn outcome(index: usize, r: Result<(bool, Value)>) -> Instance {
    match r {
        Ok((pass, detail)) => Instance { index, pass, detail },
        Err(e) => Instance { index, pass: false, detail: json!({"error": {"code": e.code(), "message": e.to_string()}}) },
    }
}

pub fn cor214_instance(rng: &mut ChaCha8Rng, cfg: &RunConfig) -> Result<(bool, Value)> {
    let rm = random_mapping_torus(rng, 6);
    let fam = mapping_torus_family(&rm.model);
    let strip = covering_strip(&fam, cfg)?;
    let report = crosscheck_cor214(&rm.model, strip, cfg)?;
    // Independent side: the blocks the model was built from.
    let expected = prescribed_eigenspaces(&rm.jordan);
    let eq = Equivariant::new(&fam, cfg)?;
    let mut oracle_ok = true;
    let mut total = 0i64;
    for (j, m) in expected.iter().enumerate() {
        for (lambda, &dim) in m {
            let lambda: GaussianRational = lambda.parse()?;
            let z = &GaussianRational::one() - &lambda;
            oracle_ok &= eq.at(&Point::Exact(z))?.dims[j] == dim;
            total += if j % 2 == 0 { dim as i64 } else { -(dim as i64) };
        }
    }
    let jump_ok = eq.index_jump(strip.0, strip.1)? == total;
    let pass = report.pass && oracle_ok && jump_ok && report.covers_all;
    let detail = json!({
        "dims": rm.model.sigma().dims(),
        "jordan": rm.jordan.iter().map(|b| b.iter().map(|(l, s)| json!([l, s])).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "entries": report.entries,
        "index_jump": report.index_jump,
        "alternating_eigen_sum": report.alternating_eigen_sum,
        "oracle_ok": oracle_ok,
    });
    Ok((pass, detail))
}

pub fn resolvent_instance(rng: &mut ChaCha8Rng, cfg: &RunConfig) -> Result<(bool, Value)> {
    let c = random_acyclic_complex(rng, 4, 10);
    let r = homotopy_resolvent(&c, 0.0)?;
    let exact_zero = homotopy_residual(&c, &r).iter().all(|m| m.is_zero());

    let (path, blocks) = random_jordan_path(rng);
    let fam = path.at(&BigRational::zero())?;
    let jordan = vec![blocks.iter().map(|b| (b.0.clone(), b.2)).collect::<Vec<_>>()];
    let k = rng.gen_range(0..=2);
    let mut poles = Vec::new();
    let mut local_ok = true;
    for p in crate::complexes::spectral_set(&fam, cfg.tol_root)?.points {
        let z0 = p.root.exact.clone().ok_or_else(|| Error::Mismatch("spectral point not exact".into()))?;
        let res = local_meromorphic_resolvent(&fam, &z0, k, cfg)?;
        let expect = prescribed_max_block(&jordan, &(&GaussianRational::one() - &z0));
        let check = residual_check(&fam, &res, 5, cfg)?;
        local_ok &= res.pole_order == expect && check.pass;
        poles.push(json!({"z0": z0, "pole_order": res.pole_order, "max_block": expect, "residual_ok": check.pass}));
    }
    let detail = json!({"dims": c.dims(), "exact_zero": exact_zero, "order": k, "local": poles});
    Ok((exact_zero && local_ok, detail))
}

pub fn specflow_instance(rng: &mut ChaCha8Rng, cfg: &RunConfig) -> Result<(bool, Value)> {
    let (path, blocks) = random_jordan_path(rng);
    let fwd = specflow_vs_index_jump(&path, DEFAULT_EPS1, cfg)?;
    let back = specflow_vs_index_jump(&path.reverse(), DEFAULT_EPS1, cfg)?;
    let pass = fwd.pass && back.pass && fwd.flow + back.flow == 0;
    let detail = json!({
        "eigenvalue_paths": blocks.iter().map(|(a, b, s)| json!({"from": a, "to": b, "size": s})).collect::<Vec<_>>(),
        "flow": fwd.flow,
        "tracked": fwd.tracked_crossings,
        "jump_change": fwd.jump_change,
        "reverse_flow": back.flow,
    });
    Ok((pass, detail))
}

pub fn knot_instance(rng: &mut ChaCha8Rng, cfg: &RunConfig) -> Result<(bool, Value)> {
    let genus = rng.gen_range(1..=3);
    let v = random_seifert(rng, genus);
    let n = rng.gen_range(1..=3);
    let alpha = random_alpha(rng, &v, n, cfg);
    let casson = BigRational::new(rng.gen_range(-6..=6).into(), rng.gen_range(1..=4).into());
    let spec = MappingTorusSpec::new(n, alpha.clone(), casson, v.clone())?;
    let rep = thm16_consistency(&spec, cfg)?;
    let one = MappingTorusSpec::new(1, alpha.clone(), BigRational::zero(), v.clone())?;
    let two_alpha = &alpha * BigRational::from_integer(2.into());
    let n1_ok = mapping_torus_signature(&one, cfg)? == levine_tristram(&v, &two_alpha, cfg)?.signature;
    let detail = json!({"V": v.entries(), "n": n, "alpha": alpha.to_string(), "report": rep, "n1_reduces": n1_ok});
    Ok((rep.pass && n1_ok, detail))
}

pub fn run_suite(suite: Suite, seed: u64, count: usize, cfg: &RunConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let instances: Vec<Instance> = pool.install(|| {
        (0..count)
            .into_par_iter()
            .map(|i| {
                let mut rng = instance_rng(seed, i);
                let r = match suite {
                    Suite::Cor214 => cor214_instance(&mut rng, cfg),
                    Suite::Resolvent => resolvent_instance(&mut rng, cfg),
                    Suite::SpecflowJump => specflow_instance(&mut rng, cfg),
                    Suite::KnotIdentities => knot_instance(&mut rng, cfg),
                };
                outcome(i, r)
            })
            .collect()
    });
    let failed: Vec<usize> = instances.iter().filter(|i| !i.pass).map(|i| i.index).collect();
    Ok(SuiteReport { suite, seed, count, passed: count - failed.len(), failed, instances })
}
