//! Thin helpers over `faer` for the dense kernels used throughout the crate.

use faer::{c64, Mat, Side};

use crate::error::{input, Error, Result};

pub type CMat = Mat<c64>;
pub type RMat = Mat<f64>;

/// Relative cutoff below which singular values count as zero for rank decisions.
pub const RANK_CUTOFF: f64 = 1e-13;

pub fn identity(d: usize) -> CMat {
    CMat::from_fn(d, d, |i, j| if i == j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) })
}

pub fn zeros(r: usize, c: usize) -> CMat {
    CMat::zeros(r, c)
}

pub fn from_real(a: &RMat) -> CMat {
    CMat::from_fn(a.nrows(), a.ncols(), |i, j| c64::new(a[(i, j)], 0.0))
}

pub fn diag_real(v: &[f64]) -> CMat {
    let d = v.len();
    CMat::from_fn(d, d, |i, j| if i == j { c64::new(v[i], 0.0) } else { c64::new(0.0, 0.0) })
}

pub fn all_finite(a: &CMat) -> bool {
    (0..a.ncols()).all(|j| (0..a.nrows()).all(|i| a[(i, j)].re.is_finite() && a[(i, j)].im.is_finite()))
}

fn check_finite(a: &CMat) -> Result<()> {
    if all_finite(a) {
        Ok(())
    } else {
        Err(input("matrix has non-finite entries"))
    }
}

fn sort_desc(v: &mut [f64]) {
    v.sort_by(|a, b| b.total_cmp(a));
}

/// Singular values in non-increasing order.
pub fn singular_values(a: &CMat) -> Result<Vec<f64>> {
    check_finite(a)?;
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(Vec::new());
    }
    let mut s = a
        .singular_values()
        .map_err(|e| Error::Numerical(format!("svd did not converge: {e:?}")))?;
    sort_desc(&mut s);
    Ok(s)
}

pub fn singular_values_real(a: &RMat) -> Result<Vec<f64>> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(Vec::new());
    }
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            if !a[(i, j)].is_finite() {
                return Err(input("matrix has non-finite entries"));
            }
        }
    }
    let mut s = a
        .singular_values()
        .map_err(|e| Error::Numerical(format!("svd did not converge: {e:?}")))?;
    sort_desc(&mut s);
    Ok(s)
}

/// Thin SVD `a = U diag(s) V*` with `s` non-increasing.
pub struct Svd {
    pub u: CMat,
    pub s: Vec<f64>,
    pub v: CMat,
}

pub fn svd(a: &CMat) -> Result<Svd> {
    check_finite(a)?;
    let f = a
        .thin_svd()
        .map_err(|e| Error::Numerical(format!("svd did not converge: {e:?}")))?;
    let k = a.nrows().min(a.ncols());
    let raw: Vec<f64> = (0..k).map(|i| f.S()[i].re).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&x, &y| raw[y].total_cmp(&raw[x]));
    let u = CMat::from_fn(a.nrows(), k, |i, j| f.U()[(i, order[j])]);
    let v = CMat::from_fn(a.ncols(), k, |i, j| f.V()[(i, order[j])]);
    let s = order.iter().map(|&i| raw[i]).collect();
    Ok(Svd { u, s, v })
}

/// Eigen-decomposition of a hermitian matrix, eigenvalues ascending.
pub fn eigh(a: &CMat) -> Result<(Vec<f64>, CMat)> {
    check_finite(a)?;
    let e = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numerical(format!("eigensolver failed: {e:?}")))?;
    let d = a.nrows();
    let raw: Vec<f64> = (0..d).map(|i| e.S()[i].re).collect();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&x, &y| raw[x].total_cmp(&raw[y]));
    let vecs = CMat::from_fn(d, d, |i, j| e.U()[(i, order[j])]);
    Ok((order.iter().map(|&i| raw[i]).collect(), vecs))
}

pub fn eigvalsh(a: &CMat) -> Result<Vec<f64>> {
    check_finite(a)?;
    let mut v: Vec<f64> = a
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numerical(format!("eigensolver failed: {e:?}")))?;
    v.sort_by(|a, b| a.total_cmp(b));
    Ok(v)
}

pub fn op_norm2(a: &CMat) -> Result<f64> {
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

/// `t · a` for real `t`.
pub fn scaled(a: &CMat, t: f64) -> CMat {
    a * faer::Scale(c64::new(t, 0.0))
}

pub fn frobenius(a: &CMat) -> f64 {
    a.norm_l2()
}

pub fn trace(a: &CMat) -> c64 {
    let mut t = c64::new(0.0, 0.0);
    for i in 0..a.nrows().min(a.ncols()) {
        t += a[(i, i)];
    }
    t
}

/// Numerical rank with the crate-wide relative cutoff.
pub fn numerical_rank(s: &[f64]) -> usize {
    match s.first() {
        None => 0,
        Some(&s1) if s1 <= 0.0 => 0,
        Some(&s1) => s.iter().filter(|&&x| x > RANK_CUTOFF * s1).count(),
    }
}

pub fn is_hermitian(a: &CMat, rel_tol: f64) -> bool {
    if a.nrows() != a.ncols() {
        return false;
    }
    let scale = a.norm_max().max(1.0);
    for j in 0..a.ncols() {
        for i in 0..=j {
            if (a[(i, j)] - a[(j, i)].conj()).norm() > rel_tol * scale {
                return false;
            }
        }
    }
    true
}

/// The diagonal of `a` when every off-diagonal entry is exactly zero.
pub fn diagonal_of(a: &CMat) -> Option<Vec<c64>> {
    if a.nrows() != a.ncols() {
        return None;
    }
    let d = a.nrows();
    for j in 0..d {
        for i in 0..d {
            if i != j && a[(i, j)] != c64::new(0.0, 0.0) {
                return None;
            }
        }
    }
    Some((0..d).map(|i| a[(i, i)]).collect())
}

pub fn adjoint(a: &CMat) -> CMat {
    a.adjoint().to_owned()
}

/// Hermitian part `(a + a*)/2`.
pub fn hermitian_part(a: &CMat) -> CMat {
    CMat::from_fn(a.nrows(), a.ncols(), |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5)
}

/// Spectral norm of a real operator given only its action and the action of its transpose.
/// Power iteration on `AᵀA` from a fixed start vector; deterministic.
pub fn power_norm<F, G>(ncols: usize, apply: F, apply_t: G, iters: usize) -> f64
where
    F: Fn(&[f64]) -> Vec<f64>,
    G: Fn(&[f64]) -> Vec<f64>,
{
    if ncols == 0 {
        return 0.0;
    }
    let mut x: Vec<f64> = (0..ncols).map(|i| 1.0 + 0.5 * ((i * 7919 % 101) as f64 / 101.0)).collect();
    let mut est = 0.0;
    for _ in 0..iters {
        let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nx == 0.0 {
            return 0.0;
        }
        x.iter_mut().for_each(|v| *v /= nx);
        let y = apply(&x);
        est = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        x = apply_t(&y);
    }
    est
}

/// Trace norm of a real `rows × cols` matrix supplied column-chunk by column-chunk,
/// via the eigenvalues of the accumulated Gram matrix `A Aᵀ`.
pub fn trace_norm_by_gram<F>(rows: usize, cols: usize, chunk: usize, mut fill: F) -> Result<f64>
where
    F: FnMut(usize, usize) -> RMat,
{
    if rows == 0 || cols == 0 {
        return Ok(0.0);
    }
    let mut g = RMat::zeros(rows, rows);
    let mut c0 = 0;
    while c0 < cols {
        let c1 = (c0 + chunk).min(cols);
        let a = fill(c0, c1);
        g += &a * a.transpose();
        c0 = c1;
    }
    let e: Vec<f64> = g
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numerical(format!("eigensolver failed: {e:?}")))?;
    Ok(e.iter().map(|v| v.max(0.0).sqrt()).sum())
}
