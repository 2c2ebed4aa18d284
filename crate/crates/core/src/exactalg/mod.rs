//! Exact scalars, polynomials and the matrix algorithms built on them.

mod gaussian;
mod laurent;
mod matrix;
mod poly;
mod ratfunc;
pub mod roots;
pub mod snf;

pub use gaussian::GaussianRational;
pub use laurent::LaurentPoly;
pub use matrix::{Matrix, Rref, DEFAULT_TOL_RANK};
pub use poly::Polynomial;
pub use ratfunc::RationalFunction;
pub use roots::{roots_with_multiplicity, Root};
pub use snf::{snf_laurent, snf_poly, Snf};

use crate::{ExactMatrix, Poly};

/// Monic gcd of two polynomials over Q(i).
pub fn poly_gcd(p: &Poly, q: &Poly) -> Poly {
    p.gcd(q)
}

/// Exact rank over Q(i).
pub fn rank_exact(m: &ExactMatrix) -> usize {
    m.rank()
}

/// Determinant of a polynomial matrix, exact: evaluate at `n·d + 1` integer
/// points and interpolate.
pub fn poly_det(m: &Matrix<Poly>) -> Poly {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.rows();
    if n == 0 {
        return Poly::constant(GaussianRational::from_integer(1));
    }
    let max_deg = m.entries().filter_map(Polynomial::degree).max().unwrap_or(0);
    let bound = n * max_deg;
    let xs: Vec<GaussianRational> = (0..=bound as i64).map(GaussianRational::from_integer).collect();
    let ys: Vec<GaussianRational> = xs.iter().map(|x| m.map(|p| p.eval(x)).det()).collect();
    interpolate(&xs, &ys)
}

/// Lagrange interpolation through distinct nodes.
pub fn interpolate(xs: &[GaussianRational], ys: &[GaussianRational]) -> Poly {
    let mut acc = Poly::new(vec![]);
    for (i, (xi, yi)) in xs.iter().zip(ys).enumerate() {
        let mut basis = Poly::constant(yi.clone());
        for (j, xj) in xs.iter().enumerate() {
            if i != j {
                let scale = &GaussianRational::from_integer(1) / &(xi - xj);
                basis = &basis * &Poly::linear_root(xj.clone()).scale(&scale);
            }
        }
        acc = &acc + &basis;
    }
    acc
}
