//! Full eigendecomposition of a general complex matrix.
//!
//! The solver is the classical dense pipeline:
//!
//! 1. balancing: permutations isolate eigenvalues that are already exposed by
//!    zero rows/columns (triangular inputs are solved exactly), then powers of
//!    two equalize row and column norms;
//! 2. Householder reduction to upper Hessenberg form;
//! 3. single-shift complex QR sweeps with Wilkinson shifts (exceptional shifts
//!    after 10 and 20 stagnant sweeps) reducing to Schur form `A = Q T Q†`;
//! 4. eigenvectors of the triangular factor by back substitution, mapped back
//!    through `Q` and the balancing transform.
//!
//! Everything is generic over [`RealScalar`], so the same code runs in double
//! precision and in MPFR arithmetic. Eigenvalues of a defective matrix split
//! like `eps^(1/k)` under rounding, so callers that need accurate spectra at
//! exceptional points run the extended-precision instantiation.

use std::cmp::Ordering;

use num_complex::{Complex, Complex64};
use num_traits::{One, Zero};

use super::matrix::{ComplexMatrix, Matrix};
use super::scalar::{abs1, modulus, to_c64, RealScalar};
use super::{LinalgError, Tolerances, MAX_EIG_DIM};

/// Eigenvalues with matching unit right eigenvectors (stored as columns).
#[derive(Clone, Debug, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<Complex64>,
    pub right_eigenvectors: ComplexMatrix,
    pub converged: bool,
    /// max_k ‖M·v_k − λ_k·v_k‖₂ against the double-precision input.
    pub residual: f64,
}

/// Eigendecomposition with default tolerances.
pub fn eig(m: &ComplexMatrix) -> Result<EigenDecomposition, LinalgError> {
    eig_with(m, &Tolerances::default())
}

/// Eigendecomposition computed in the arithmetic of `T`, reported in double precision.
///
/// Output is sorted lexicographically by (re, im) with ties in the real part
/// resolved within `tol.ordering_tolerance`; each column has unit norm and the
/// phase convention of [`fix_phase`].
pub fn eig_with<T: RealScalar>(
    m: &Matrix<T>,
    tol: &Tolerances,
) -> Result<EigenDecomposition, LinalgError> {
    let n = m.dim();
    if n > MAX_EIG_DIM {
        return Err(LinalgError::TooLarge { dim: n, max: MAX_EIG_DIM });
    }
    let (values, vectors) = schur_eigen(m, tol)?;

    let values64: Vec<Complex64> = values.iter().map(to_c64).collect();
    let order = lexicographic_order(&values64, tol.ordering_tolerance);

    let mut eigenvalues = Vec::with_capacity(n);
    let mut out = ComplexMatrix::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvalues.push(values64[src]);
        let mut col = unit_column(&vectors, src);
        fix_phase(&mut col, tol.phase_threshold);
        out.set_column(dst, &col);
    }

    let m64 = m.to_f64();
    let residual = residual(&m64, &eigenvalues, &out);
    Ok(EigenDecomposition {
        eigenvalues,
        right_eigenvectors: out,
        converged: true,
        residual,
    })
}

/// Eigenvalues only, in the same order [`eig_with`] would report them.
pub fn eigenvalues_with<T: RealScalar>(
    m: &Matrix<T>,
    tol: &Tolerances,
) -> Result<Vec<Complex64>, LinalgError> {
    Ok(eig_with(m, tol)?.eigenvalues)
}

fn unit_column<T: RealScalar>(vectors: &Matrix<T>, c: usize) -> Vec<Complex64> {
    let col = vectors.column(c);
    let mut big = T::zero();
    for z in &col {
        let a = abs1(z);
        if a > big {
            big = a;
        }
    }
    let scaled: Vec<Complex64> = if big > T::zero() {
        col.iter()
            .map(|z| to_c64(&Complex::new(z.re.clone() / big.clone(), z.im.clone() / big.clone())))
            .collect()
    } else {
        col.iter().map(to_c64).collect()
    };
    let norm = scaled.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    scaled.into_iter().map(|z| z / norm).collect()
}

/// Rotates `v` so that its first component with modulus above
/// `threshold · max|v_i|` is real and non-negative.
pub fn fix_phase(v: &mut [Complex64], threshold: f64) {
    let big = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if big == 0.0 {
        return;
    }
    if let Some(lead) = v.iter().find(|z| z.norm() > threshold * big) {
        let rot = lead.conj() / lead.norm();
        for z in v.iter_mut() {
            *z *= rot;
        }
    }
}

/// Index permutation sorting `values` by real part, then imaginary part.
/// Real parts within `rel_tol · max(1, max|λ|)` of the first member of a run
/// count as equal, so rounding noise cannot reorder a vertical column of
/// eigenvalues.
pub fn lexicographic_order(values: &[Complex64], rel_tol: f64) -> Vec<usize> {
    let scale = values.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let tol = rel_tol * scale;
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        values[a]
            .re
            .total_cmp(&values[b].re)
            .then(values[a].im.total_cmp(&values[b].im))
    });
    let mut out = Vec::with_capacity(idx.len());
    let mut start = 0;
    while start < idx.len() {
        let anchor = values[idx[start]].re;
        let mut end = start + 1;
        while end < idx.len() && values[idx[end]].re - anchor <= tol {
            end += 1;
        }
        let mut group = idx[start..end].to_vec();
        group.sort_by(|&a, &b| {
            values[a]
                .im
                .total_cmp(&values[b].im)
                .then(values[a].re.total_cmp(&values[b].re))
                .then(a.cmp(&b))
        });
        out.extend(group);
        start = end;
    }
    out
}

/// Sorts a list of complex numbers with [`lexicographic_order`].
pub fn sort_lexicographic(values: &mut Vec<Complex64>, rel_tol: f64) {
    let order = lexicographic_order(values, rel_tol);
    *values = order.into_iter().map(|i| values[i]).collect();
}

fn residual(m: &ComplexMatrix, values: &[Complex64], vectors: &ComplexMatrix) -> f64 {
    let n = m.dim();
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let mut acc = 0.0;
        for r in 0..n {
            let mut mv = Complex64::zero();
            for c in 0..n {
                mv += m[(r, c)] * vectors[(c, k)];
            }
            acc += (mv - values[k] * vectors[(r, k)]).norm_sqr();
        }
        worst = worst.max(acc.sqrt());
    }
    worst
}

struct Balance<T: RealScalar> {
    swaps: Vec<(usize, usize)>,
    scale: Vec<T>,
}

fn balance<T: RealScalar>(a: &mut Matrix<T>) -> Balance<T> {
    let n = a.dim();
    let mut swaps = Vec::new();
    let mut lo = 0usize;
    let mut hi = n - 1;

    let swap = |a: &mut Matrix<T>, i: usize, j: usize| {
        if i == j {
            return;
        }
        for c in 0..n {
            let t = a[(i, c)].clone();
            a[(i, c)] = a[(j, c)].clone();
            a[(j, c)] = t;
        }
        for r in 0..n {
            let t = a[(r, i)].clone();
            a[(r, i)] = a[(r, j)].clone();
            a[(r, j)] = t;
        }
    };

    // Rows with no off-diagonal entries in the active window go to the bottom.
    'rows: loop {
        if hi == lo {
            break;
        }
        for j in (lo..=hi).rev() {
            if (lo..=hi).all(|c| c == j || a[(j, c)].is_zero()) {
                swap(a, j, hi);
                swaps.push((j, hi));
                if hi == lo {
                    break 'rows;
                }
                hi -= 1;
                continue 'rows;
            }
        }
        break;
    }
    // Columns with no off-diagonal entries in the active window go to the top.
    'cols: loop {
        if hi == lo {
            break;
        }
        for j in lo..=hi {
            if (lo..=hi).all(|r| r == j || a[(r, j)].is_zero()) {
                swap(a, j, lo);
                swaps.push((j, lo));
                lo += 1;
                continue 'cols;
            }
        }
        break;
    }

    let mut scale = vec![T::one(); n];
    if hi > lo {
        let radix = T::from_f64(2.0);
        let radix2 = T::from_f64(4.0);
        let threshold = T::from_f64(0.95);
        loop {
            let mut changed = false;
            for i in lo..=hi {
                let mut col = T::zero();
                let mut row = T::zero();
                for j in lo..=hi {
                    if j != i {
                        col = col + abs1(&a[(j, i)]);
                        row = row + abs1(&a[(i, j)]);
                    }
                }
                if col.is_zero() || row.is_zero() {
                    continue;
                }
                let total = col.clone() + row.clone();
                let mut f = T::one();
                let mut c = col.clone();
                let g = row.clone() / radix.clone();
                while c < g {
                    f = f * radix.clone();
                    c = c * radix2.clone();
                }
                let g = row.clone() * radix.clone();
                while c >= g {
                    f = f / radix.clone();
                    c = c / radix2.clone();
                }
                if (c + row) / f.clone() < threshold.clone() * total {
                    changed = true;
                    let g = T::one() / f.clone();
                    scale[i] = scale[i].clone() * f.clone();
                    for k in 0..n {
                        a[(i, k)] = a[(i, k)].clone().scale(g.clone());
                        a[(k, i)] = a[(k, i)].clone().scale(f.clone());
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }
    Balance { swaps, scale }
}

/// Reduces `a` to upper Hessenberg form in place, returning the accumulated
/// unitary `Q` with `a_in = Q · a_out · Q†`.
fn hessenberg<T: RealScalar>(a: &mut Matrix<T>) -> Matrix<T> {
    let n = a.dim();
    let mut q = Matrix::identity(n);
    if n < 3 {
        return q;
    }
    for j in 0..n - 2 {
        let mut tail = T::zero();
        for r in j + 2..n {
            tail = tail + a[(r, j)].norm_sqr();
        }
        if tail.is_zero() {
            continue;
        }
        let x0 = a[(j + 1, j)].clone();
        let norm = (tail + x0.norm_sqr()).sqrt();
        let x0_abs = modulus(&x0);
        let phase = if x0_abs.is_zero() {
            Complex::one()
        } else {
            x0.unscale(x0_abs)
        };
        // v = x + e^{i arg x0}‖x‖ e1, reflection maps x to −e^{i arg x0}‖x‖ e1.
        let mut v: Vec<Complex<T>> = (j + 1..n).map(|r| a[(r, j)].clone()).collect();
        v[0] = v[0].clone() + phase.scale(norm);
        let vnorm2 = v.iter().fold(T::zero(), |s, z| s + z.norm_sqr());
        let beta = T::from_f64(2.0) / vnorm2;

        // a ← (I − β v v†) a
        for c in 0..n {
            let mut s = Complex::zero();
            for (k, vk) in v.iter().enumerate() {
                s = s + vk.conj() * a[(j + 1 + k, c)].clone();
            }
            let s = s.scale(beta.clone());
            for (k, vk) in v.iter().enumerate() {
                a[(j + 1 + k, c)] = a[(j + 1 + k, c)].clone() - vk.clone() * s.clone();
            }
        }
        // a ← a (I − β v v†), q ← q (I − β v v†)
        for m in [&mut *a, &mut q] {
            for r in 0..n {
                let mut s = Complex::zero();
                for (k, vk) in v.iter().enumerate() {
                    s = s + m[(r, j + 1 + k)].clone() * vk.clone();
                }
                let s = s.scale(beta.clone());
                for (k, vk) in v.iter().enumerate() {
                    m[(r, j + 1 + k)] = m[(r, j + 1 + k)].clone() - s.clone() * vk.conj();
                }
            }
        }
        for r in j + 2..n {
            a[(r, j)] = Complex::zero();
        }
    }
    q
}

/// Givens rotation `[c s; −s̄ c]` with real `c` mapping `(x, y)` to `(r, 0)`.
fn givens<T: RealScalar>(x: &Complex<T>, y: &Complex<T>) -> (T, Complex<T>) {
    if y.is_zero() {
        return (T::one(), Complex::zero());
    }
    let ay = modulus(y);
    if x.is_zero() {
        return (T::zero(), y.conj().unscale(ay));
    }
    let ax = modulus(x);
    let r = (ax.clone() * ax.clone() + ay.clone() * ay).sqrt();
    let c = ax.clone() / r.clone();
    let s = (x.unscale(ax) * y.conj()).unscale(r);
    (c, s)
}

fn rotate_rows<T: RealScalar>(h: &mut Matrix<T>, k: usize, c: &T, s: &Complex<T>, cols: std::ops::Range<usize>) {
    for j in cols {
        let a = h[(k, j)].clone();
        let b = h[(k + 1, j)].clone();
        h[(k, j)] = a.clone().scale(c.clone()) + s.clone() * b.clone();
        h[(k + 1, j)] = b.scale(c.clone()) - s.conj() * a;
    }
}

fn rotate_cols<T: RealScalar>(h: &mut Matrix<T>, k: usize, c: &T, s: &Complex<T>, rows: std::ops::Range<usize>) {
    for i in rows {
        let a = h[(i, k)].clone();
        let b = h[(i, k + 1)].clone();
        h[(i, k)] = a.clone().scale(c.clone()) + b.clone() * s.conj();
        h[(i, k + 1)] = b.scale(c.clone()) - a * s.clone();
    }
}

/// Wilkinson shift: eigenvalue of the trailing 2×2 block closest to its
/// bottom-right entry.
fn wilkinson_shift<T: RealScalar>(h: &Matrix<T>, i: usize) -> Complex<T> {
    let a = h[(i - 1, i - 1)].clone();
    let b = h[(i - 1, i)].clone();
    let c = h[(i, i - 1)].clone();
    let d = h[(i, i)].clone();
    let half = T::from_f64(0.5);
    let mean = (a.clone() + d.clone()).scale(half.clone());
    let diff = (a - d.clone()).scale(half);
    let disc = complex_sqrt(&(diff.clone() * diff + b * c));
    let l1 = mean.clone() + disc.clone();
    let l2 = mean - disc;
    if abs1(&(l1.clone() - d.clone())) <= abs1(&(l2.clone() - d)) {
        l1
    } else {
        l2
    }
}

/// Principal square root using only real field operations.
pub(crate) fn complex_sqrt<T: RealScalar>(z: &Complex<T>) -> Complex<T> {
    if z.is_zero() {
        return Complex::zero();
    }
    let r = modulus(z);
    let half = T::from_f64(0.5);
    let re = ((r.clone() + z.re.clone()) * half.clone()).sqrt();
    let im_abs = ((r - z.re.clone()) * half).sqrt();
    let im = if z.im < T::zero() { -im_abs } else { im_abs };
    Complex::new(re, im)
}

/// Eigenvalues (unsorted) and the matching eigenvector columns (unnormalized)
/// of `m` in the arithmetic of `T`.
pub(crate) fn schur_eigen<T: RealScalar>(
    m: &Matrix<T>,
    tol: &Tolerances,
) -> Result<(Vec<Complex<T>>, Matrix<T>), LinalgError> {
    let n = m.dim();
    let mut h = m.clone();
    let bal = balance(&mut h);
    let mut q = hessenberg(&mut h);
    let eps = T::epsilon();
    let norm = h.max_abs1();
    let small = if norm.is_zero() {
        T::safe_min()
    } else {
        eps.clone() * norm.clone()
    };

    let cap = tol.eig_iterations_per_dim * n.max(10);
    let mut total = 0usize;
    let mut stagnant = 0usize;
    let mut hi = n - 1;
    while hi > 0 {
        let mut lo = hi;
        while lo > 0 {
            let mut s = abs1(&h[(lo - 1, lo - 1)]) + abs1(&h[(lo, lo)]);
            if s.is_zero() {
                s = norm.clone();
            }
            if abs1(&h[(lo, lo - 1)]) <= eps.clone() * s || abs1(&h[(lo, lo - 1)]) < T::safe_min() {
                h[(lo, lo - 1)] = Complex::zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            stagnant = 0;
            continue;
        }
        total += 1;
        stagnant += 1;
        if total > cap {
            return Err(LinalgError::NonConvergence { iterations: total });
        }
        let shift = if stagnant == 10 || stagnant == 20 {
            let bump = h[(hi, hi - 1)].re.abs() * T::from_f64(0.75);
            h[(hi, hi)].clone() + Complex::new(bump, T::zero())
        } else {
            wilkinson_shift(&h, hi)
        };

        for k in lo..hi {
            let (x, y) = if k == lo {
                (h[(lo, lo)].clone() - shift.clone(), h[(lo + 1, lo)].clone())
            } else {
                (h[(k, k - 1)].clone(), h[(k + 1, k - 1)].clone())
            };
            let (c, s) = givens(&x, &y);
            let first = if k == lo { lo } else { k - 1 };
            rotate_rows(&mut h, k, &c, &s, first..n);
            if k > lo {
                h[(k + 1, k - 1)] = Complex::zero();
            }
            rotate_cols(&mut h, k, &c, &s, 0..(k + 3).min(hi + 1));
            rotate_cols(&mut q, k, &c, &s, 0..n);
        }
    }

    let values: Vec<Complex<T>> = (0..n).map(|i| h[(i, i)].clone()).collect();

    // Back substitution on the triangular factor.
    let big = T::from_f64(1e100);
    let mut x_all = Matrix::<T>::zeros(n);
    for k in 0..n {
        let mut x = vec![Complex::<T>::zero(); k + 1];
        x[k] = Complex::one();
        for i in (0..k).rev() {
            let mut s = Complex::<T>::zero();
            for (j, xj) in x.iter().enumerate().take(k + 1).skip(i + 1) {
                s = s + h[(i, j)].clone() * xj.clone();
            }
            let mut d = h[(i, i)].clone() - h[(k, k)].clone();
            if abs1(&d) < small {
                d = Complex::new(small.clone(), T::zero());
            }
            x[i] = -(s / d);
            let mag = abs1(&x[i]);
            if mag > big {
                for xj in x.iter_mut().skip(i) {
                    *xj = xj.clone().unscale(mag.clone());
                }
            }
        }
        for r in 0..n {
            let mut s = Complex::zero();
            for (j, xj) in x.iter().enumerate() {
                s = s + q[(r, j)].clone() * xj.clone();
            }
            x_all[(r, k)] = s;
        }
    }

    for r in 0..n {
        if bal.scale[r] != T::one() {
            for c in 0..n {
                x_all[(r, c)] = x_all[(r, c)].clone().scale(bal.scale[r].clone());
            }
        }
    }
    for &(i, j) in bal.swaps.iter().rev() {
        if i != j {
            for c in 0..n {
                let t = x_all[(i, c)].clone();
                x_all[(i, c)] = x_all[(j, c)].clone();
                x_all[(j, c)] = t;
            }
        }
    }
    Ok((values, x_all))
}

/// Lexicographic comparison used for deterministic tie-breaking elsewhere.
pub fn lexicographic_cmp(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}
