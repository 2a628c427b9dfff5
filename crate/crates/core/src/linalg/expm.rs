//! Matrix exponentials.
//!
//! [`expm`] is the degree-13 Padé scaling-and-squaring method with a trace
//! shift: `e^A = e^μ · e^{A − μI}` with `μ = tr(A)/n` removes the scalar part
//! before scaling. [`nilpotent_expm`] sums the terminating Taylor series of a
//! strictly triangular matrix.

use num_complex::{Complex, Complex64};
use num_traits::Zero;

use super::matrix::{ComplexMatrix, Matrix};
use super::scalar::RealScalar;
use super::{LinalgError, Tolerances};

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

pub fn expm(m: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    expm_with(m, &Tolerances::default())
}

pub fn expm_with(m: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix, LinalgError> {
    if !m.is_finite() {
        return Err(LinalgError::NonFinite { row: 0, col: 0 });
    }
    let n = m.dim();
    let mu = m.trace() / n as f64;
    let mut a = m.clone();
    for i in 0..n {
        a[(i, i)] -= mu;
    }

    let norm = a.norm_one();
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as u32
    } else {
        0
    };
    if squarings > tol.expm_max_squarings {
        return Err(LinalgError::NormOutOfRange);
    }
    let a = a.scale(Complex64::new(0.5f64.powi(squarings as i32), 0.0));

    let b = &PADE13;
    let id = ComplexMatrix::identity(n);
    let a2 = a.matmul(&a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let lin = |terms: &[(&ComplexMatrix, f64)]| {
        let mut acc = ComplexMatrix::zeros(n);
        for (mat, coef) in terms {
            acc = acc.add(&mat.scale(Complex64::new(*coef, 0.0)));
        }
        acc
    };
    let u_inner = a6
        .matmul(&lin(&[(&a6, b[13]), (&a4, b[11]), (&a2, b[9])]))
        .add(&lin(&[(&a6, b[7]), (&a4, b[5]), (&a2, b[3]), (&id, b[1])]));
    let u = a.matmul(&u_inner);
    let v = a6
        .matmul(&lin(&[(&a6, b[12]), (&a4, b[10]), (&a2, b[8])]))
        .add(&lin(&[(&a6, b[6]), (&a4, b[4]), (&a2, b[2]), (&id, b[0])]));

    let mut r = solve(&v.sub(&u), &v.add(&u))?;
    for _ in 0..squarings {
        r = r.matmul(&r);
    }
    let r = r.scale(mu.exp());
    if !r.is_finite() {
        return Err(LinalgError::NormOutOfRange);
    }
    Ok(r)
}

/// Solves `p · x = rhs` by Gaussian elimination with partial pivoting.
fn solve(p: &ComplexMatrix, rhs: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let n = p.dim();
    let mut a = p.clone();
    let mut x = rhs.clone();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))
            .unwrap_or(col);
        if a[(pivot, col)].norm() == 0.0 {
            return Err(LinalgError::NormOutOfRange);
        }
        if pivot != col {
            for c in 0..n {
                let t = a[(pivot, c)];
                a[(pivot, c)] = a[(col, c)];
                a[(col, c)] = t;
                let t = x[(pivot, c)];
                x[(pivot, c)] = x[(col, c)];
                x[(col, c)] = t;
            }
        }
        let d = a[(col, col)];
        for r in col + 1..n {
            let f = a[(r, col)] / d;
            if f == Complex64::zero() {
                continue;
            }
            for c in col..n {
                let t = a[(col, c)];
                a[(r, c)] -= f * t;
            }
            for c in 0..n {
                let t = x[(col, c)];
                x[(r, c)] -= f * t;
            }
        }
    }
    for col in (0..n).rev() {
        let d = a[(col, col)];
        for c in 0..n {
            let mut s = x[(col, c)];
            for k in col + 1..n {
                s -= a[(col, k)] * x[(k, c)];
            }
            x[(col, c)] = s / d;
        }
    }
    Ok(x)
}

/// `Σ_{k<dim} M^k / k!` for a strictly triangular `M` whose nonzero entries lie
/// within `bandwidth` diagonals of the main diagonal.
pub fn nilpotent_expm<T: RealScalar>(m: &Matrix<T>, bandwidth: usize) -> Result<Matrix<T>, LinalgError> {
    if !(m.is_strictly_lower() || m.is_strictly_upper()) {
        return Err(LinalgError::NotTriangular);
    }
    let n = m.dim();
    for r in 0..n {
        for c in 0..n {
            if r.abs_diff(c) > bandwidth && !m[(r, c)].is_zero() {
                return Err(LinalgError::BandwidthExceeded { bandwidth });
            }
        }
    }
    let mut out = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    for k in 1..n {
        term = term.matmul(m).scale(Complex::new(T::one() / T::from_f64(k as f64), T::zero()));
        if term.as_slice().iter().all(|z| z.is_zero()) {
            break;
        }
        out = out.add(&term);
    }
    Ok(out)
}

/// Convenience: `e^{s·M}` for a strictly triangular band-1 generator `M`.
pub fn ladder_exp<T: RealScalar>(m: &Matrix<T>, s: Complex<T>) -> Result<Matrix<T>, LinalgError> {
    if s.is_zero() {
        return Ok(Matrix::identity(m.dim()));
    }
    nilpotent_expm(&m.scale(s), 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_gives_identity() {
        let e = expm(&ComplexMatrix::zeros(3)).unwrap();
        assert_eq!(e, ComplexMatrix::identity(3));
    }

    #[test]
    fn diagonal_exponentiates_entrywise() {
        let e = expm(&ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(0.0, -2.0)])).unwrap();
        assert!((e[(0, 0)] - c(1.0f64.exp(), 0.0)).norm() < 1e-14 * 1.0f64.exp());
        assert!((e[(1, 1)] - c(0.0, -2.0).exp()).norm() < 1e-14);
        assert!(e[(0, 1)].norm() < 1e-15 && e[(1, 0)].norm() < 1e-15);
    }

    #[test]
    fn strictly_upper_two_by_two() {
        let m = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]])
            .unwrap();
        let e = expm(&m).unwrap();
        let want = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]])
            .unwrap();
        assert!(e.max_abs_diff(&want) < 1e-15);
        assert_eq!(nilpotent_expm(&m, 1).unwrap(), want);
    }

    #[test]
    fn strictly_lower_single_term() {
        let m = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, 0.0)], vec![c(0.5, -1.0), c(0.0, 0.0)]])
            .unwrap();
        let e = nilpotent_expm(&m, 1).unwrap();
        assert_eq!(e[(1, 0)], c(0.5, -1.0));
        assert_eq!(e[(0, 0)], c(1.0, 0.0));
        assert_eq!(e[(0, 1)], c(0.0, 0.0));
    }

    #[test]
    fn nilpotent_rejects_non_triangular() {
        let m = ComplexMatrix::identity(2);
        assert_eq!(nilpotent_expm(&m, 1).unwrap_err(), LinalgError::NotTriangular);
        let mut wide = ComplexMatrix::zeros(3);
        wide[(2, 0)] = c(1.0, 0.0);
        assert_eq!(
            nilpotent_expm(&wide, 1).unwrap_err(),
            LinalgError::BandwidthExceeded { bandwidth: 1 }
        );
    }

    #[test]
    fn huge_norm_is_rejected() {
        let mut m = ComplexMatrix::zeros(2);
        m[(0, 1)] = c(1e30, 0.0);
        assert_eq!(expm(&m).unwrap_err(), LinalgError::NormOutOfRange);
    }

    #[test]
    fn rotation_generator() {
        // exp([[0, -t], [t, 0]]) is a rotation by t.
        let t = 2.5;
        let m = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(-t, 0.0)], vec![c(t, 0.0), c(0.0, 0.0)]])
            .unwrap();
        let e = expm(&m).unwrap();
        assert!((e[(0, 0)].re - t.cos()).abs() < 1e-14);
        assert!((e[(1, 0)].re - t.sin()).abs() < 1e-14);
    }
}
