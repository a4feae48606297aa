//! Hyperbolic toral automorphisms and their power sequences, with
//! exact periodic-point counts from integer linear algebra.

use crate::error::{Error, Result};
use crate::space::Point;
use crate::system::{SeqKind, SystemSequence};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed};
use std::sync::Arc;

type Mat = [[BigInt; 2]; 2];

fn mat_from_i64(a: [[i64; 2]; 2]) -> Mat {
    [
        [BigInt::from(a[0][0]), BigInt::from(a[0][1])],
        [BigInt::from(a[1][0]), BigInt::from(a[1][1])],
    ]
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    [
        [
            &a[0][0] * &b[0][0] + &a[0][1] * &b[1][0],
            &a[0][0] * &b[0][1] + &a[0][1] * &b[1][1],
        ],
        [
            &a[1][0] * &b[0][0] + &a[1][1] * &b[1][0],
            &a[1][0] * &b[0][1] + &a[1][1] * &b[1][1],
        ],
    ]
}

fn mat_pow(a: &Mat, mut n: u64) -> Mat {
    let mut result = [
        [BigInt::one(), BigInt::from(0)],
        [BigInt::from(0), BigInt::one()],
    ];
    let mut base = a.clone();
    while n > 0 {
        if n & 1 == 1 {
            result = mat_mul(&result, &base);
        }
        base = mat_mul(&base, &base);
        n >>= 1;
    }
    result
}

fn det(m: &Mat) -> BigInt {
    &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]
}

/// A hyperbolic unimodular matrix acting on the 2-torus, together with
/// the dyadic power schedule `e_n = 2^n`.
#[derive(Clone, Debug)]
pub struct ToralMapFixture {
    pub matrix: [[i64; 2]; 2],
    /// Leading eigenvalue, > 1.
    pub leading_eigenvalue: f64,
}

impl ToralMapFixture {
    pub fn new(matrix: [[i64; 2]; 2]) -> Result<Self> {
        let trace = matrix[0][0] + matrix[1][1];
        let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
        if det.abs() != 1 {
            return Err(Error::invalid(format!("matrix determinant {det} is not +-1")));
        }
        if trace.abs() <= 2 {
            return Err(Error::invalid(format!("matrix trace {trace} is not hyperbolic (need |trace| > 2)")));
        }
        let t = trace as f64;
        let disc = (t * t - 4.0 * det as f64).sqrt();
        let lambda = (t.abs() + disc) / 2.0;
        Ok(ToralMapFixture { matrix, leading_eigenvalue: lambda })
    }

    /// Exact `|Fix(phi^n)| = |det(A^n - I)|`; equals
    /// `lambda^n + lambda^{-n} - 2` when the trace exceeds 2.
    pub fn fix_count(&self, n: u64) -> BigUint {
        let a = mat_from_i64(self.matrix);
        let mut p = mat_pow(&a, n);
        p[0][0] -= BigInt::one();
        p[1][1] -= BigInt::one();
        det(&p).abs().to_biguint().expect("nonnegative efter abs")
    }

    /// Separated-count lower bound for the power sequence at horizon n:
    /// the fixed points of `phi^{2^n}`.
    pub fn power_sep_lower(&self, n: u32) -> BigUint {
        self.fix_count(1u64 << n)
    }

    /// The power sequence `f_n = phi^{2^n}` on torus coordinates.
    /// Float evaluation is only certified for shallow horizons; counts
    /// come from the exact fixed-point route.
    pub fn power_system(&self) -> SystemSequence {
        let m = self.matrix;
        SystemSequence::from_float(
            SeqKind::Explicit,
            3,
            2,
            Arc::new(move |n, x| {
                let reps = 1u32 << n.min(8);
                let mut p: Point = x.to_vec();
                for _ in 0..reps {
                    let nx = (m[0][0] as f64 * p[0] + m[0][1] as f64 * p[1]).rem_euclid(1.0);
                    let ny = (m[1][0] as f64 * p[0] + m[1][1] as f64 * p[1]).rem_euclid(1.0);
                    p = vec![nx, ny];
                }
                p
            }),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat() -> ToralMapFixture {
        ToralMapFixture::new([[2, 1], [1, 1]]).unwrap()
    }

    #[test]
    fn fixed_point_counts_first_two() {
        let f = cat();
        assert_eq!(f.fix_count(1), BigUint::from(1u32));
        assert_eq!(f.fix_count(2), BigUint::from(5u32));
    }

    #[test]
    fn fixed_point_counts_match_eigenvalue_formula() {
        let f = cat();
        let lambda = f.leading_eigenvalue;
        for n in 1..=10u64 {
            let exact = f.fix_count(n);
            let float = lambda.powi(n as i32) + lambda.powi(-(n as i32)) - 2.0;
            assert_eq!(exact, BigUint::from(float.round() as u64), "n={n}");
        }
    }

    #[test]
    fn fix_counts_satisfy_the_trace_recurrence() {
        // trace(A^n) obeys t_{n+1} = tr * t_n - det * t_{n-1}; with
        // det = 1, trace > 2 the count is trace(A^n) - 2.
        let f = cat();
        let tr = BigInt::from(3);
        let mut t_prev = BigInt::from(2); // trace(A^0)
        let mut t_cur = tr.clone(); // trace(A^1)
        for n in 1..=20u64 {
            let expected = (&t_cur - BigInt::from(2)).to_biguint().unwrap();
            assert_eq!(f.fix_count(n), expected, "n={n}");
            let next = &tr * &t_cur - &t_prev;
            t_prev = std::mem::replace(&mut t_cur, next);
        }
    }

    #[test]
    fn non_hyperbolic_matrices_are_rejected() {
        assert!(ToralMapFixture::new([[1, 1], [0, 1]]).is_err()); // trace 2
        assert!(ToralMapFixture::new([[2, 0], [0, 2]]).is_err()); // det 4
    }

    #[test]
    fn det_minus_one_matrices_are_accepted() {
        let f = ToralMapFixture::new([[3, 1], [1, 0]]).unwrap(); // det -1
        assert!(f.fix_count(2) > BigUint::from(0u32));
    }

    #[test]
    fn power_system_applies_dyadic_iterates() {
        let f = cat();
        let sys = f.power_system();
        // f_1 = phi^2 on a rational point, computed by hand mod 1.
        let x = [0.5, 0.25];
        let phi = |p: [f64; 2]| {
            [
                (2.0 * p[0] + p[1]).rem_euclid(1.0),
                (p[0] + p[1]).rem_euclid(1.0),
            ]
        };
        let expect = phi(phi(x));
        let got = sys.map_at(1, &x);
        assert!((got[0] - expect[0]).abs() < 1e-12);
        assert!((got[1] - expect[1]).abs() < 1e-12);
    }
}
