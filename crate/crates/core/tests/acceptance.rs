//! Acceptance run: one PASS/FAIL line per criterion, each checked against an
//! oracle written here rather than reused from the library.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use perindex::complexes::spectral_set;
use perindex::covers::{crosscheck_cor214, mapping_torus_family, MappingTorusModel};
use perindex::equivariant::{page1_at, Equivariant, Point};
use perindex::knotcalc::{
    alexander_from_presentation, alexander_poly, furuta_ohta_mapping_torus, levine_tristram, mapping_torus_signature,
    random_alpha, random_seifert, same_up_to_unit, singular_fo_mapping_torus, MappingTorusSpec, SeifertMatrix,
};
use perindex::resolvent::{homotopy_resolvent, local_meromorphic_resolvent, residual_check};
use perindex::specflow::{periodic_spectral_flow, specflow_vs_index_jump, OperatorFamily, DEFAULT_EPS1};
use perindex::verify::{
    covering_strip, instance_rng, prescribed_eigenspaces, prescribed_max_block, random_acyclic_complex,
    random_invertible, random_jordan_path, random_mapping_torus,
};
use perindex::field::Field;
use perindex::{ExactComplex, ExactFamily, ExactMatrix, GaussianRational, Matrix, Poly, RunConfig};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn g(n: i64, d: i64) -> GaussianRational {
    GaussianRational::from_ratio(n, d)
}

// ---------------------------------------------------------------- oracles

/// Integer polynomials as coefficient vectors, low degree first.
type IPoly = Vec<i64>;

fn ip_mul(a: &IPoly, b: &IPoly) -> IPoly {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn ip_add(a: &IPoly, b: &IPoly, sign: i64) -> IPoly {
    let mut out = vec![0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] += sign * y;
    }
    out
}

/// Laplace expansion along the first row.
fn cofactor_det(m: &[Vec<IPoly>]) -> IPoly {
    let n = m.len();
    if n == 0 {
        return vec![1];
    }
    let mut acc = vec![0];
    for c in 0..n {
        let minor: Vec<Vec<IPoly>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|(k, _)| *k != c).map(|(_, e)| e.clone()).collect()).collect();
        let term = ip_mul(&m[0][c], &cofactor_det(&minor));
        acc = ip_add(&acc, &term, if c % 2 == 0 { 1 } else { -1 });
    }
    acc
}

/// `det(V − tVᵀ)` with `t`-powers stripped and a positive leading term.
fn alexander_oracle(v: &SeifertMatrix) -> IPoly {
    let e = v.entries();
    let n = e.len();
    let m: Vec<Vec<IPoly>> = (0..n).map(|i| (0..n).map(|j| vec![e[i][j], -e[j][i]]).collect()).collect();
    let mut p = cofactor_det(&m);
    while p.len() > 1 && *p.last().unwrap() == 0 {
        p.pop();
    }
    let lo = p.iter().position(|&c| c != 0).unwrap_or(0);
    p.drain(..lo);
    if p.last().is_some_and(|&c| c < 0) {
        p.iter_mut().for_each(|c| *c = -*c);
    }
    p
}

fn ip_of(p: &Poly) -> IPoly {
    p.coeffs()
        .iter()
        .map(|c| {
            assert!(c.im().is_zero() && c.re().is_integer());
            i64::try_from(c.re().to_integer()).unwrap()
        })
        .collect()
}

/// Signature and nullity of `(1−ω)V + (1−ω̄)Vᵀ`, `ω = e^{2πix}`, from the
/// characteristic polynomial (Faddeev–LeVerrier) and Descartes' rule; all
/// roots of a Hermitian characteristic polynomial are real.
fn signature_oracle(v: &SeifertMatrix, x: f64) -> (i64, usize) {
    let e = v.entries();
    let n = e.len();
    if n == 0 {
        return (0, 0);
    }
    let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * x);
    let one = Complex64::new(1.0, 0.0);
    let a: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| (one - w) * e[i][j] as f64 + (one - w.conj()) * e[j][i] as f64).collect())
        .collect();
    let mul = |x: &Vec<Vec<Complex64>>, y: &Vec<Vec<Complex64>>| -> Vec<Vec<Complex64>> {
        (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| x[i][k] * y[k][j]).sum()).collect()).collect()
    };
    // c[k] multiplies λ^k.
    let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
    c[n] = one;
    let mut m = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for k in 1..=n {
        let mut next = mul(&a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += c[n + 1 - k];
        }
        m = next;
        let am = mul(&a, &m);
        let tr: Complex64 = (0..n).map(|i| am[i][i]).sum();
        c[n - k] = -tr / k as f64;
    }
    let scale = c.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let re: Vec<f64> = c.iter().map(|z| if z.re.abs() < 1e-9 * scale { 0.0 } else { z.re }).collect();
    let nullity = re.iter().position(|&r| r != 0.0).unwrap_or(n);
    let changes = |coeffs: &[f64]| {
        let s: Vec<f64> = coeffs.iter().copied().filter(|&r| r != 0.0).collect();
        s.windows(2).filter(|p| p[0] * p[1] < 0.0).count() as i64
    };
    let pos = changes(&re);
    let neg_coeffs: Vec<f64> = re.iter().enumerate().map(|(k, &r)| if k % 2 == 1 { -r } else { r }).collect();
    let neg = changes(&neg_coeffs);
    (pos - neg, nullity)
}

fn sig_oracle_sum(v: &SeifertMatrix, xs: &[BigRational]) -> i64 {
    xs.iter().map(|x| signature_oracle(v, num_traits::ToPrimitive::to_f64(x).unwrap()).0).sum()
}

/// Cohomology dimensions from ranks alone.
fn cohomology_oracle(c: &ExactComplex) -> Vec<usize> {
    let n = c.dims().len();
    (0..n)
        .map(|j| {
            let out = c.d(j as i64).rank();
            let inc = if j > 0 { c.d(j as i64 - 1).rank() } else { 0 };
            c.dims()[j] - out - inc
        })
        .collect()
}

/// Dimension of the generalised λ-eigenspace of `τ*` on `H^j(Σ)`, computed as
/// the cohomology of the subcomplex `ker (τ − λ)^N`.
fn generalized_eigen_oracle(m: &MappingTorusModel, lambda: &GaussianRational) -> Vec<usize> {
    let sigma = m.sigma();
    let n = sigma.dims().len();
    let spaces: Vec<ExactMatrix> = (0..n)
        .map(|j| {
            let d = sigma.dims()[j];
            let t = &m.deck()[j] - &ExactMatrix::identity(d).scale(lambda);
            let mut p = ExactMatrix::identity(d);
            for _ in 0..d {
                p = &p * &t;
            }
            p.kernel()
        })
        .collect();
    let restricted: Vec<ExactMatrix> = (0..n.saturating_sub(1))
        .map(|j| {
            let img = &sigma.d(j as i64) * &spaces[j];
            spaces[j + 1].solve(&img).expect("deck map commutes with d")
        })
        .collect();
    let sub = ExactComplex::new(spaces.iter().map(|s| s.cols()).collect(), restricted).unwrap();
    cohomology_oracle(&sub)
}

fn alternating(dims: &[usize]) -> i64 {
    dims.iter().enumerate().map(|(j, &d)| if j % 2 == 0 { d as i64 } else { -(d as i64) }).sum()
}

/// `∂R + R∂ − id` by direct multiplication; `r[j]: C^j → C^{j−1}`.
fn homotopy_defect(c: &ExactComplex, r: &[ExactMatrix]) -> Vec<ExactMatrix> {
    let n = c.dims().len();
    (0..n)
        .map(|j| {
            let dj = c.dims()[j];
            let mut acc = ExactMatrix::identity(dj).scale(&-GaussianRational::one());
            if j > 0 {
                acc = &acc + &(&c.d(j as i64 - 1) * &r[j]);
            }
            if j + 1 < n {
                acc = &acc + &(&r[j + 1] * &c.d(j as i64));
            }
            acc
        })
        .collect()
}

// ---------------------------------------------------------------- criteria

type Outcome = Result<(), String>;

fn check(cond: bool, what: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn knot_signatures(cfg: &RunConfig) -> Outcome {
    let tre = SeifertMatrix::trefoil();
    let fig = SeifertMatrix::figure_eight();
    let cases = [(&tre, q(1, 2), -2), (&tre, q(1, 4), -2), (&tre, q(1, 24), 0), (&fig, q(1, 2), 0)];
    for (v, x, expect) in cases {
        let got = levine_tristram(v, &x, cfg).map_err(|e| e.to_string())?.signature;
        let oracle = signature_oracle(v, num_traits::ToPrimitive::to_f64(&x).unwrap()).0;
        check(got == expect && oracle == expect, || format!("sigma at {x}: library {got}, oracle {oracle}, expected {expect}"))?;
    }
    for (v, expect) in [(&tre, vec![1, -1, 1]), (&fig, vec![1, -3, 1])] {
        let lib = ip_of(&alexander_poly(v));
        let oracle = alexander_oracle(v);
        check(lib == expect && oracle == expect, || format!("alexander: library {lib:?}, oracle {oracle:?}"))?;
    }
    Ok(())
}

fn branched_cover_signature(cfg: &RunConfig) -> Outcome {
    let spec = MappingTorusSpec::new(2, q(1, 4), BigRational::zero(), SeifertMatrix::trefoil()).unwrap();
    let s = mapping_torus_signature(&spec, cfg).map_err(|e| e.to_string())?;
    check(s == -2, || format!("trefoil n = 2 alpha = 1/4 gives {s}"))?;
    let mut rng = instance_rng(2, 0);
    for _ in 0..10 {
        let genus = rng.gen_range(1..=3);
        let v = random_seifert(&mut rng, genus);
        let alpha = random_alpha(&mut rng, &v, 1, cfg);
        let spec = MappingTorusSpec::new(1, alpha.clone(), BigRational::zero(), v.clone()).unwrap();
        let lhs = mapping_torus_signature(&spec, cfg).map_err(|e| e.to_string())?;
        let two_alpha = &alpha * q(2, 1);
        let rhs = levine_tristram(&v, &two_alpha, cfg).map_err(|e| e.to_string())?.signature;
        let oracle = signature_oracle(&v, num_traits::ToPrimitive::to_f64(&two_alpha).unwrap()).0;
        check(lhs == rhs && rhs == oracle, || format!("n = 1 at alpha = {alpha}: {lhs} vs {rhs} vs oracle {oracle}"))?;
    }
    Ok(())
}

fn mapping_torus_identity(cfg: &RunConfig) -> Outcome {
    let mut rng = instance_rng(3, 0);
    for i in 0..20 {
        let genus = rng.gen_range(1..=3);
        let v = random_seifert(&mut rng, genus);
        check(v.size() <= 6, || "Seifert matrix too large".into())?;
        for n in 1..=3u32 {
            let alpha = random_alpha(&mut rng, &v, n, cfg);
            let casson = q(rng.gen_range(-5..=5), rng.gen_range(1..=3));
            let spec = MappingTorusSpec::new(n, alpha.clone(), casson.clone(), v.clone()).unwrap();
            let sfo = singular_fo_mapping_torus(&spec, cfg).map_err(|e| e.to_string())?;
            let fo = furuta_ohta_mapping_torus(n, &casson, &v, cfg).map_err(|e| e.to_string())?;
            let sig = mapping_torus_signature(&spec, cfg).map_err(|e| e.to_string())?;
            let oracle = sig_oracle_sum(&v, &spec.twisted_points()) - sig_oracle_sum(&v, &spec.untwisted_points());
            let lhs = &sfo - q(8, 1) * &fo;
            check(lhs == q(sig, 1) && sig == oracle, || {
                format!("instance {i}, n = {n}, alpha = {alpha}: lhs {lhs}, signature {sig}, oracle {oracle}")
            })?;
        }
    }
    Ok(())
}

fn cover_crosscheck(cfg: &RunConfig) -> Outcome {
    for i in 0..50 {
        let mut rng = instance_rng(7, i);
        let rm = random_mapping_torus(&mut rng, 6);
        check(rm.model.sigma().total_dim() <= 6, || "model too large".into())?;
        let fam = mapping_torus_family(&rm.model);
        let strip = covering_strip(&fam, cfg).map_err(|e| e.to_string())?;
        let eq = Equivariant::new(&fam, cfg).map_err(|e| e.to_string())?;
        let betti = cohomology_oracle(rm.model.sigma());
        let len = betti.len();

        let prescribed = prescribed_eigenspaces(&rm.jordan);
        let mut lambdas: Vec<GaussianRational> = Vec::new();
        for m in &prescribed {
            for l in m.keys() {
                let l: GaussianRational = l.parse().unwrap();
                if !lambdas.contains(&l) {
                    lambdas.push(l);
                }
            }
        }
        let mut eigen_total = vec![0usize; len];
        let mut alt = 0i64;
        for l in &lambdas {
            let oracle = generalized_eigen_oracle(&rm.model, l);
            let z = &GaussianRational::one() - l;
            let hhat = eq.at(&Point::Exact(z.clone())).map_err(|e| e.to_string())?.dims;
            for j in 0..len {
                let want = prescribed[j].get(&l.to_string()).copied().unwrap_or(0);
                check(oracle[j] == want && hhat[j] == oracle[j], || {
                    format!("instance {i}, z = {z}, degree {j}: hhat {}, oracle {}, prescribed {want}", hhat[j], oracle[j])
                })?;
                eigen_total[j] += oracle[j];
            }
            alt += alternating(&oracle);
        }
        check(eigen_total == betti, || format!("instance {i}: eigenspaces {eigen_total:?} miss part of {betti:?}"))?;

        // Every spectral point is accounted for by some eigenvalue.
        let spec = eq.spectral();
        let mut hhat_total = vec![0usize; len];
        for p in &spec.points {
            let r = eq.at_point(p).map_err(|e| e.to_string())?;
            for j in 0..len {
                hhat_total[j] += r.dims[j];
            }
        }
        check(hhat_total == betti, || format!("instance {i}: sum of hhat {hhat_total:?} vs betti {betti:?}"))?;

        let jump = eq.index_jump(strip.0, strip.1).map_err(|e| e.to_string())?;
        check(jump == alt, || format!("instance {i}: index jump {jump} vs alternating eigen sum {alt}"))?;
        let report = crosscheck_cor214(&rm.model, strip, cfg).map_err(|e| e.to_string())?;
        check(report.pass, || format!("instance {i}: library cross-check failed"))?;
    }
    Ok(())
}

fn resolvents(cfg: &RunConfig) -> Outcome {
    let mut rng = instance_rng(5, 0);
    for i in 0..30 {
        let c = random_acyclic_complex(&mut rng, 4, 10);
        check(c.dims().len() <= 4 && c.total_dim() <= 10, || "complex too large".into())?;
        let r = homotopy_resolvent(&c, 0.0).map_err(|e| e.to_string())?;
        let defect = homotopy_defect(&c, &r.maps);
        check(defect.iter().all(|m| m.is_zero()), || format!("acyclic instance {i}: nonzero residual"))?;
    }

    let probes = [g(1, 2), g(1, 3), g(-1, 5), g(2, 7), GaussianRational::from_ints(0, 1)];
    for i in 0..12 {
        let mut rng = instance_rng(5, i + 1);
        let (fam, jordan) = if i % 2 == 0 {
            let rm = random_mapping_torus(&mut rng, 6);
            (mapping_torus_family(&rm.model), rm.jordan)
        } else {
            let (path, blocks) = random_jordan_path(&mut rng);
            let fam = path.at(&BigRational::zero()).map_err(|e| e.to_string())?;
            (fam, vec![blocks.iter().map(|b| (b.0.clone(), b.2)).collect()])
        };
        let k = i % 3;
        for p in spectral_set(&fam, cfg.tol_root).map_err(|e| e.to_string())?.points {
            let z0 = p.root.exact.clone().ok_or("spectral point is not exact")?;
            let res = local_meromorphic_resolvent(&fam, &z0, k, cfg).map_err(|e| e.to_string())?;
            let want = prescribed_max_block(&jordan, &(&GaussianRational::one() - &z0));
            check(res.pole_order == want, || format!("model {i}, z0 = {z0}: pole order {} vs block {want}", res.pole_order))?;
            check(residual_check(&fam, &res, 5, cfg).map_err(|e| e.to_string())?.pass, || {
                format!("model {i}, z0 = {z0}: library residual check failed")
            })?;
            let mut first: Option<Vec<ExactMatrix>> = None;
            for h in &probes {
                let z = &z0 + h;
                let ez = fam.evaluate_unchecked(&z);
                let t = res.truncated_at(h);
                let hk = h.pow(k as u32 + 1).inv();
                let scaled: Vec<ExactMatrix> = homotopy_defect(&ez, &t).iter().map(|m| m.scale(&hk)).collect();
                match &first {
                    None => first = Some(scaled),
                    Some(f) => check(*f == scaled, || format!("model {i}, z0 = {z0}: residual is not h^(K+1) M"))?,
                }
                if !spectral_set(&fam, cfg.tol_root).unwrap().delta.eval(&z).is_zero() {
                    // Pointwise homotopy differs from the truncation by an
                    // anticommuting correction carrying the same residual.
                    let r = homotopy_resolvent(&ez, 0.0).map_err(|e| e.to_string())?;
                    check(homotopy_defect(&ez, &r.maps).iter().all(|m| m.is_zero()), || "pointwise resolvent".into())?;
                    let diff: Vec<ExactMatrix> = t.iter().zip(&r.maps).map(|(a, b)| a - b).collect();
                    let lhs = homotopy_defect(&ez, &diff);
                    let rhs = homotopy_defect(&ez, &t);
                    let n = lhs.len();
                    for j in 0..n {
                        let id = ExactMatrix::identity(ez.dims()[j]);
                        check(&lhs[j] + &id == rhs[j], || format!("model {i}: pointwise comparison at h = {h}"))?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn scalar(root: &GaussianRational) -> Matrix<Poly> {
    Matrix::from_rows(vec![vec![Poly::linear_root(root.clone())]]).unwrap()
}

/// `P diag(w − r_k(t)) P⁻¹` with each root linear in `t`; the flow oracle
/// is the net number of roots leaving the unit disk.
fn random_operator_family<R: Rng>(rng: &mut R) -> (OperatorFamily, i64) {
    let pick = |rng: &mut R| loop {
        let (a, b) = (rng.gen_range(-8..=8i64), rng.gen_range(-3..=3i64));
        if a * a + b * b != 16 {
            return GaussianRational::new(q(a, 4), q(b, 4));
        }
    };
    let n = rng.gen_range(1..=3);
    let ends: Vec<(GaussianRational, GaussianRational)> = (0..n).map(|_| (pick(rng), pick(rng))).collect();
    let (p, pinv) = random_invertible(rng, n);
    let lift = |m: &ExactMatrix| m.map(|x| Poly::constant(x.clone()));
    let (pp, ppinv) = (lift(&p), lift(&pinv));
    let inside = |z: &GaussianRational| z.norm_sqr() < BigRational::one();
    let oracle: i64 = ends.iter().map(|(a, b)| inside(a) as i64 - inside(b) as i64).sum();
    let fam = OperatorFamily::sampled(2, |t| {
        let tt = GaussianRational::from_rational(t.clone());
        let roots: Vec<Poly> = ends.iter().map(|(a, b)| Poly::linear_root(a + &(&(b - a) * &tt))).collect();
        &(&pp * &Matrix::diagonal(&roots)) * &ppinv
    })
    .unwrap();
    (fam, oracle)
}

fn spectral_flow(cfg: &RunConfig) -> Outcome {
    let f = OperatorFamily::new(vec![(q(0, 1), scalar(&g(1, 2))), (q(1, 1), scalar(&g(3, 2)))]).unwrap();
    let fwd = periodic_spectral_flow(&f, DEFAULT_EPS1, cfg.tol_root).map_err(|e| e.to_string())?.flow;
    let back = periodic_spectral_flow(&f.reverse(), DEFAULT_EPS1, cfg.tol_root).map_err(|e| e.to_string())?.flow;
    check(fwd == 1 && back == -1, || format!("scalar family: {fwd}, reverse {back}"))?;
    for roots in [vec![g(1, 2)], vec![g(3, 1), g(-1, 3)], vec![GaussianRational::new(q(1, 2), q(1, 2)), g(-5, 4)]] {
        let f = OperatorFamily::constant(Matrix::diagonal(&roots.iter().map(|r| Poly::linear_root(r.clone())).collect::<Vec<_>>()))
            .unwrap();
        let flow = periodic_spectral_flow(&f, DEFAULT_EPS1, cfg.tol_root).map_err(|e| e.to_string())?.flow;
        check(flow == 0, || format!("constant family flows {flow}"))?;
    }
    for i in 0..10 {
        let mut rng = instance_rng(6, i);
        let (f, oracle) = random_operator_family(&mut rng);
        let a = periodic_spectral_flow(&f, DEFAULT_EPS1, cfg.tol_root).map_err(|e| format!("family {i}: {e}"))?;
        let b = periodic_spectral_flow(&f, 0.1, cfg.tol_root).map_err(|e| format!("family {i}: {e}"))?;
        check(a.system.partition != b.system.partition || a.system.radii != b.system.radii || a.crossings.is_empty(), || {
            format!("family {i}: the two excluded-value systems coincide")
        })?;
        check(a.flow == b.flow && a.flow == oracle, || format!("family {i}: flows {} and {}, oracle {oracle}", a.flow, b.flow))?;
    }
    for i in 0..10 {
        let mut rng = instance_rng(16, i);
        let (path, blocks) = random_jordan_path(&mut rng);
        let above = |l: &GaussianRational| (l.re() > &BigRational::one()) as i64;
        let oracle: i64 = blocks.iter().map(|(a, b, s)| *s as i64 * (above(a) - above(b))).sum();
        let fwd = specflow_vs_index_jump(&path, DEFAULT_EPS1, cfg).map_err(|e| format!("path {i}: {e}"))?;
        let back = specflow_vs_index_jump(&path.reverse(), DEFAULT_EPS1, cfg).map_err(|e| format!("path {i}: {e}"))?;
        check(fwd.pass && back.pass, || format!("path {i}: flow and index jump disagree"))?;
        check(fwd.flow == oracle && back.flow == -oracle, || {
            format!("path {i}: flow {} (reverse {}), oracle {oracle}", fwd.flow, back.flow)
        })?;
    }
    Ok(())
}

fn structural_invariants(cfg: &RunConfig) -> Outcome {
    let mut families: Vec<ExactFamily> = Vec::new();
    for i in 0..20 {
        let mut rng = instance_rng(9, i);
        families.push(mapping_torus_family(&random_mapping_torus(&mut rng, 6).model));
        if i % 2 == 0 {
            let (path, _) = random_jordan_path(&mut rng);
            families.push(path.at(&q(1, 3)).map_err(|e| e.to_string())?);
        }
    }
    let off = GaussianRational::new(q(1, 7), q(1, 3));
    for (i, f) in families.iter().enumerate() {
        let c = f.complex();
        let n = f.dims().len() as i64;
        for j in -1..n {
            let dd = &c.d(j + 1) * &c.d(j);
            let rel = &(&c.d(j + 1) * &f.sigma(j)) + &(&f.sigma(j + 1) * &c.d(j));
            let ss = &f.sigma(j + 1) * &f.sigma(j);
            check(dd.is_zero() && rel.is_zero() && ss.is_zero(), || format!("family {i}: relations fail in degree {j}"))?;
        }
        let eq = Equivariant::new(f, cfg).map_err(|e| e.to_string())?;
        for p in &eq.spectral().points {
            let r = eq.at_point(p).map_err(|e| format!("family {i} at {}: {e}", p.label()))?;
            check(*r.dims.last().unwrap() == 0, || format!("family {i}: top degree nonzero at {}", p.label()))?;
            let z = p.root.exact.clone().ok_or("inexact spectral point")?;
            let page = page1_at(f, &Point::Exact(z.clone()), cfg).map_err(|e| e.to_string())?;
            let direct = cohomology_oracle(&f.evaluate_unchecked(&z));
            check(page.column_dims == direct, || format!("family {i}: E1 {:?} vs H(E_z) {direct:?}", page.column_dims))?;
        }
        check(spectral_set(f, cfg.tol_root).unwrap().delta.eval(&off) != GaussianRational::zero(), || "probe is spectral".into())?;
        let r = eq.at(&Point::Exact(off.clone())).map_err(|e| format!("family {i} at {off}: {e}"))?;
        check(r.dims.iter().all(|&d| d == 0), || format!("family {i}: nonzero at a regular point"))?;
    }
    let mut rng = instance_rng(9, 100);
    let mut knots = vec![SeifertMatrix::trefoil(), SeifertMatrix::figure_eight()];
    for _ in 0..10 {
        let genus = rng.gen_range(1..=3);
        knots.push(random_seifert(&mut rng, genus));
    }
    for v in &knots {
        let a = alexander_poly(v);
        let b = alexander_from_presentation(v, cfg.tol_root).map_err(|e| e.to_string())?;
        check(same_up_to_unit(&a, &b), || format!("Alexander mismatch for {:?}", v.entries()))?;
        let delta1 = a.eval(&GaussianRational::one());
        check(delta1.re().abs() == BigRational::one(), || format!("Delta(1) = {delta1}"))?;
    }
    Ok(())
}

fn main() {
    let cfg = RunConfig::default();
    let criteria: [(&str, fn(&RunConfig) -> Outcome, u64); 7] = [
        ("1 knot signatures and Alexander polynomials", knot_signatures, 1),
        ("2 branched-cover signature", branched_cover_signature, 1),
        ("3 mapping-torus identity", mapping_torus_identity, 5),
        ("4 cover cross-check", cover_crosscheck, 30),
        ("5 resolvents", resolvents, 30),
        ("6 periodic spectral flow", spectral_flow, 10),
        ("7 structural invariants", structural_invariants, 10),
    ];
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run(&cfg);
        let took = start.elapsed();
        let outcome = outcome.and_then(|()| {
            check(took < Duration::from_secs(limit), || format!("took {:.2} s, limit {limit} s", took.as_secs_f64()))
        });
        match outcome {
            Ok(()) => println!("PASS criterion {name} ({:.2} s, limit {limit} s)", took.as_secs_f64()),
            Err(e) => {
                failed += 1;
                println!("FAIL criterion {name}: {e}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
