//! Smith normal form over F[x] and over the Laurent ring Q(i)[t, t⁻¹].

use num_traits::{One, Zero};

use super::{GaussianRational, LaurentPoly, Matrix, Polynomial};
use crate::field::Field;

/// `u · m · v = d` with `d` diagonal and `d_i | d_{i+1}`.
#[derive(Clone, Debug)]
pub struct Snf<T> {
    pub u: Matrix<T>,
    pub v: Matrix<T>,
    pub d: Matrix<T>,
}

impl<T: crate::field::Ring> Snf<T> {
    pub fn diagonal(&self) -> Vec<T> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d[(i, i)].clone()).collect()
    }
}

fn degree_key<F: Field>(p: &Polynomial<F>) -> usize {
    p.degree().unwrap_or(usize::MAX)
}

/// Euclidean Smith form; nonzero invariant factors are monic.
pub fn snf_poly<F: Field>(m: &Matrix<Polynomial<F>>) -> Snf<Polynomial<F>> {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut u = Matrix::identity(rows);
    let mut v = Matrix::identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            // Smallest-degree nonzero entry of the trailing block becomes the pivot.
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if a[(i, j)].is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| degree_key(&a[(i, j)]) < degree_key(&a[(bi, bj)])) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(u, v, a);
            };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let (q, r) = a[(i, t)].div_rem(&a[(t, t)]);
                let nq = -q;
                a.add_row_multiple(i, t, &nq);
                u.add_row_multiple(i, t, &nq);
                clean &= r.is_zero();
            }
            for j in t + 1..cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let (q, r) = a[(t, j)].div_rem(&a[(t, t)]);
                let nq = -q;
                a.add_col_multiple(j, t, &nq);
                v.add_col_multiple(j, t, &nq);
                clean &= r.is_zero();
            }
            if !clean {
                continue;
            }
            // Divisibility of the trailing block by the pivot.
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !a[(t, t)].divides(&a[(i, j)])));
            match offender {
                Some(i) => {
                    a.add_row_multiple(t, i, &Polynomial::one());
                    u.add_row_multiple(t, i, &Polynomial::one());
                }
                None => break,
            }
        }
        let inv = Polynomial::constant(a[(t, t)].lead().expect("pivot nonzero").inv());
        a.scale_row(t, &inv);
        u.scale_row(t, &inv);
    }
    finish(u, v, a)
}

fn finish<T>(u: Matrix<T>, v: Matrix<T>, d: Matrix<T>) -> Snf<T> {
    Snf { u, v, d }
}

/// Smith form over Q(i)[t, t⁻¹]: the matrix is cleared into Q(i)[t] by a
/// power of `t`, reduced there, and the units `t^k` are folded back into `u`.
/// Diagonal entries come out monic with nonzero constant term.
pub fn snf_laurent(m: &Matrix<LaurentPoly>) -> Snf<LaurentPoly> {
    let shift = m.entries().filter(|e| !e.is_zero()).map(LaurentPoly::low).min().unwrap_or(0);
    let pm = m.map(|e| e.to_poly_times(-shift).expect("shift clears negative powers"));
    let s = snf_poly(&pm);
    let mut u = s.u.map(|p| LaurentPoly::from_poly(p.clone()));
    let v = s.v.map(|p| LaurentPoly::from_poly(p.clone()));
    let mut d = s.d.map(|p| LaurentPoly::from_poly(p.clone()));
    for i in 0..d.rows().min(d.cols()) {
        if d[(i, i)].is_zero() {
            continue;
        }
        // d_ii = t^low · body; absorb t^{-shift-low}.
        let k = -d[(i, i)].low();
        let unit = LaurentPoly::monomial(GaussianRational::one(), k - shift);
        u.scale_row(i, &unit);
        d[(i, i)] = d[(i, i)].shift(k);
    }
    Snf { u, v, d }
}
