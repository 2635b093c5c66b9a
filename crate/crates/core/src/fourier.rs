//! Fourier coefficients on the torus `[-L, L)^m` with basis `e_α(x) = exp(πi α·x / L)`,
//! absolute-sum convergence diagnostics, and the rank-one factorized trace bound for
//! localized kernel blocks.

use std::io::Write;

use faer::c64;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{input, Error, Result};
use crate::kernels::cutoff::{bump, phi, phi_of_gauge, theta};
use crate::kernels::{Block, KernelSpec};
use crate::linalg::{self, CMat};
use crate::measure_models::GridModel;
use crate::norms::least_squares_slope;

/// Relative increment over the final octave below which partial absolute sums count as converged.
pub const CONVERGENCE_RTOL: f64 = 0.01;
/// Minimum ratio of samples per axis to the frequency cutoff.
pub const ALIAS_MARGIN: usize = 4;

/// Samples of a function on the periodic grid `x_i = −L + 2L i / R`, `i = 0..R`, per axis.
#[derive(Clone, Debug)]
pub struct SampledFunction {
    m: usize,
    half_period: f64,
    resolution: usize,
    values: Vec<c64>,
}

impl SampledFunction {
    pub fn from_fn(m: usize, half_period: f64, resolution: usize, f: impl Fn(&[f64]) -> c64) -> Result<Self> {
        if m == 0 || resolution == 0 || !(half_period > 0.0) {
            return Err(input("sampled function needs m >= 1, resolution >= 1 and L > 0"));
        }
        let total = resolution.checked_pow(m as u32).filter(|&t| t <= 1 << 26).ok_or_else(|| input("sample grid too large"))?;
        let mut x = vec![0.0; m];
        let values = (0..total)
            .map(|lin| {
                let mut r = lin;
                for j in (0..m).rev() {
                    x[j] = -half_period + 2.0 * half_period * (r % resolution) as f64 / resolution as f64;
                    r /= resolution;
                }
                f(&x)
            })
            .collect();
        Ok(SampledFunction { m, half_period, resolution, values })
    }

    pub fn from_real_fn(m: usize, half_period: f64, resolution: usize, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        Self::from_fn(m, half_period, resolution, |x| c64::new(f(x), 0.0))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn half_period(&self) -> f64 {
        self.half_period
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn values(&self) -> &[c64] {
        &self.values
    }

    /// Mean of `|f|²` over the grid (the squared norm for the normalized torus measure).
    pub fn mean_square(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.values.len() as f64
    }
}

/// Coefficients `c_α` for `|α_i| ≤ cutoff`, stored densely in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientArray {
    pub half_period: f64,
    pub cutoff: usize,
    pub m: usize,
    coeffs: Vec<c64>,
}

impl CoefficientArray {
    pub fn from_fn(m: usize, half_period: f64, cutoff: usize, f: impl Fn(&[i64]) -> c64) -> Self {
        let side = 2 * cutoff + 1;
        let total = side.pow(m as u32);
        let mut a = vec![0i64; m];
        let coeffs = (0..total)
            .map(|lin| {
                Self::unflatten(lin, side, cutoff, &mut a);
                f(&a)
            })
            .collect();
        CoefficientArray { half_period, cutoff, m, coeffs }
    }

    pub fn zeros(m: usize, half_period: f64, cutoff: usize) -> Self {
        Self::from_fn(m, half_period, cutoff, |_| c64::new(0.0, 0.0))
    }

    fn unflatten(lin: usize, side: usize, cutoff: usize, out: &mut [i64]) {
        let mut r = lin;
        for j in (0..out.len()).rev() {
            out[j] = (r % side) as i64 - cutoff as i64;
            r /= side;
        }
    }

    fn flat(&self, alpha: &[i64]) -> Option<usize> {
        let side = 2 * self.cutoff + 1;
        let mut lin = 0usize;
        for &a in alpha {
            if a.unsigned_abs() as usize > self.cutoff {
                return None;
            }
            lin = lin * side + (a + self.cutoff as i64) as usize;
        }
        Some(lin)
    }

    /// `c_α`, zero outside the stored range.
    pub fn get(&self, alpha: &[i64]) -> c64 {
        self.flat(alpha).map(|i| self.coeffs[i]).unwrap_or(c64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<i64>, c64)> + '_ {
        let side = 2 * self.cutoff + 1;
        self.coeffs.iter().enumerate().map(move |(lin, &c)| {
            let mut a = vec![0i64; self.m];
            Self::unflatten(lin, side, self.cutoff, &mut a);
            (a, c)
        })
    }

    pub fn abs_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// `Σ |c_α|` over `max_i |α_i| ≤ radius`.
    pub fn abs_sum_within(&self, radius: usize) -> f64 {
        self.iter().filter(|(a, _)| a.iter().all(|v| v.unsigned_abs() as usize <= radius)).map(|(_, c)| c.norm()).sum()
    }

    pub fn square_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `max_α |c_{−α} − conj(c_α)|`.
    pub fn hermitian_defect(&self) -> f64 {
        self.iter()
            .map(|(a, c)| {
                let neg: Vec<i64> = a.iter().map(|v| -v).collect();
                (self.get(&neg) - c.conj()).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Writes `alpha_1,…,alpha_m,real,imag` rows with a header.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let head: Vec<String> = (1..=self.m).map(|j| format!("alpha_{j}")).collect();
        writeln!(w, "{},real,imag", head.join(","))?;
        for (a, c) in self.iter() {
            let idx: Vec<String> = a.iter().map(|v| v.to_string()).collect();
            writeln!(w, "{},{:e},{:e}", idx.join(","), c.re, c.im)?;
        }
        Ok(())
    }
}

/// Discrete coefficients `c_α = R^{−m} Σ_x f(x) e_α(−x)` for `|α_i| ≤ cutoff`.
pub fn torus_coefficients(f: &SampledFunction, cutoff: usize) -> Result<CoefficientArray> {
    let r = f.resolution;
    if r < ALIAS_MARGIN * cutoff.max(1) {
        return Err(Error::Aliasing(format!("resolution {r} is below {ALIAS_MARGIN} x cutoff {cutoff}")));
    }
    let m = f.m;
    let mut data: Vec<Complex64> = f.values.iter().map(|v| Complex64::new(v.re, v.im)).collect();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(r);
    let mut line = vec![Complex64::new(0.0, 0.0); r];
    for axis in 0..m {
        let stride = r.pow((m - 1 - axis) as u32);
        let outer = data.len() / (r * stride);
        for o in 0..outer {
            for s in 0..stride {
                let base = o * r * stride + s;
                for (i, v) in line.iter_mut().enumerate() {
                    *v = data[base + i * stride];
                }
                fft.process(&mut line);
                for (i, v) in line.iter().enumerate() {
                    data[base + i * stride] = *v;
                }
            }
        }
    }
    let norm = (r as f64).powi(m as i32);
    Ok(CoefficientArray::from_fn(m, f.half_period, cutoff, |a| {
        let mut lin = 0usize;
        let mut sign = 1.0;
        for &v in a {
            lin = lin * r + v.rem_euclid(r as i64) as usize;
            if v.rem_euclid(2) == 1 {
                sign = -sign;
            }
        }
        let c = data[lin];
        c64::new(sign * c.re / norm, sign * c.im / norm)
    }))
}

/// `e_α(x) = exp(πi α·x / L)`.
pub fn basis(alpha: &[i64], x: &[f64], half_period: f64) -> c64 {
    let t: f64 = alpha.iter().zip(x).map(|(a, v)| *a as f64 * v).sum::<f64>() * std::f64::consts::PI / half_period;
    c64::new(t.cos(), t.sin())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrendReport {
    /// `(M, Σ_{max|α_i| ≤ M} |c_α|)` for dyadic `M` up to the cutoff.
    pub partial_sums: Vec<(usize, f64)>,
    pub last_increment: f64,
    /// Fitted exponent `a` in `max_{shell M} |c_α| ≈ C·M^{−a}`.
    pub decay_exponent: f64,
    pub convergent: bool,
}

/// Partial absolute sums over the last `octaves` dyadic shells.
pub fn abs_sum_trend(coeffs: &CoefficientArray, octaves: u32) -> Result<TrendReport> {
    if octaves == 0 || coeffs.cutoff >> octaves == 0 {
        return Err(input(format!("cutoff {} too small for {octaves} octaves", coeffs.cutoff)));
    }
    let radii: Vec<usize> = (0..=octaves).map(|k| coeffs.cutoff >> (octaves - k)).collect();
    // shell maxima for the decay exponent
    let mut shell_max = vec![0.0f64; coeffs.cutoff + 1];
    let mut shell_sum = vec![0.0f64; coeffs.cutoff + 1];
    for (a, c) in coeffs.iter() {
        let r = a.iter().map(|v| v.unsigned_abs() as usize).max().unwrap_or(0);
        shell_max[r] = shell_max[r].max(c.norm());
        shell_sum[r] += c.norm();
    }
    let mut acc = 0.0;
    let mut cum = Vec::with_capacity(shell_sum.len());
    for s in &shell_sum {
        acc += s;
        cum.push(acc);
    }
    let partial_sums: Vec<(usize, f64)> = radii.iter().map(|&r| (r, cum[r])).collect();
    let n = partial_sums.len();
    let total = partial_sums[n - 1].1;
    let last_increment = if total > 0.0 { (total - partial_sums[n - 2].1) / total } else { 0.0 };
    let lo = (coeffs.cutoff >> octaves).max(1);
    let pts: Vec<(f64, f64)> = (lo..=coeffs.cutoff)
        .filter(|&r| shell_max[r] > 0.0)
        .map(|r| ((r as f64).ln(), shell_max[r].ln()))
        .collect();
    let decay_exponent = if pts.len() >= 2 { -least_squares_slope(&pts) } else { f64::NAN };
    Ok(TrendReport { partial_sums, last_increment, decay_exponent, convergent: last_increment < CONVERGENCE_RTOL })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceBoundReport {
    pub kernel_abs_sum: f64,
    pub cutoff_abs_sum: f64,
    /// Trace norm of one discretized rank-one block `e_α(x) e_β(y)`.
    pub rank_one_trace: f64,
    pub bound: f64,
    pub direct: f64,
    pub pass: bool,
    pub strict: bool,
}

/// Compares `|S|_1` of a localized kernel block with the factorized bound
/// `(Σ|c_α|)(Σ|d_β|)·B`, where the kernel factor expands in `e_α(x − y)` and the
/// localization factor in `e_β(x)`.
pub fn trace_bound_compare(ck: &CoefficientArray, ctheta: &CoefficientArray, s00: &Block, model: &GridModel) -> Result<TraceBoundReport> {
    let m = model.m();
    if ck.m != m || ctheta.m != m {
        return Err(input("coefficient arity differs from the model arity"));
    }
    if (ck.half_period - ctheta.half_period).abs() > 1e-12 * ck.half_period {
        return Err(input("coefficient arrays use different periods"));
    }
    let l = ck.half_period;
    if model.domain().iter().any(|&(a, b)| a.abs().max(b.abs()) > l / 2.0) {
        return Err(input("model domain does not fit inside half the period box"));
    }
    if s00.rows.iter().chain(&s00.cols).any(|&i| i >= model.dim()) {
        return Err(input("block indices exceed the model dimension"));
    }
    let sw: Vec<f64> = model.weights().iter().map(|w| w.sqrt()).collect();
    let mut alpha = vec![0i64; m];
    alpha[0] = 1;
    let beta: Vec<i64> = (0..m).map(|j| if j == m - 1 { -1 } else { 0 }).collect();
    let u: Vec<c64> = s00.rows.iter().map(|&a| basis(&alpha, model.point(a), l) * sw[a]).collect();
    let v: Vec<c64> = s00.cols.iter().map(|&b| basis(&beta, model.point(b), l) * sw[b]).collect();
    let rank_one_trace = if u.is_empty() || v.is_empty() {
        0.0
    } else {
        // Gram on the row side of u v^T
        let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let g = CMat::from_fn(u.len(), u.len(), |i, j| u[i] * u[j].conj() * vv);
        linalg::eigvalsh(&g)?.iter().map(|e| e.max(0.0).sqrt()).sum()
    };
    let kernel_abs_sum = ck.abs_sum();
    let cutoff_abs_sum = ctheta.abs_sum();
    let bound = kernel_abs_sum * cutoff_abs_sum * rank_one_trace;
    let direct = s00.trace_norm()?;
    Ok(TraceBoundReport {
        kernel_abs_sum,
        cutoff_abs_sum,
        rank_one_trace,
        bound,
        direct,
        pass: direct <= bound,
        strict: direct < bound,
    })
}

/// `(Σ_{α,β} |c_{α+β} d_{−β}|, (Σ|c_α|)(Σ|d_β|))`, the first by explicit enumeration of the
/// pairs `(α, β)` with `−β` in the range of `d` and `α + β` in the range of `c`.
pub fn reindexed_abs_sum(c: &CoefficientArray, d: &CoefficientArray) -> (f64, f64) {
    let mut lhs = 0.0;
    for (nb, _) in d.iter() {
        let b: Vec<i64> = nb.iter().map(|v| -v).collect();
        for (g, _) in c.iter() {
            let a: Vec<i64> = g.iter().zip(&b).map(|(x, y)| x - y).collect();
            let ab: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            lhs += (c.get(&ab) * d.get(&nb)).norm();
        }
    }
    (lhs, c.abs_sum() * d.abs_sum())
}

/// `x_+^ε · bump(x)` in one variable.
pub fn power_bump(eps: f64) -> impl Fn(&[f64]) -> f64 {
    move |x: &[f64]| if x[0] > 0.0 { x[0].powf(eps) * bump(x[0]) } else { 0.0 }
}

/// `sign(x) · bump(x)`, a jump at the origin.
pub fn jump_bump(x: &[f64]) -> f64 {
    x[0].signum() * bump(x[0]) * if x[0] == 0.0 { 0.0 } else { 1.0 }
}

/// `Π_j bump(x_j)`.
pub fn smooth_bump(x: &[f64]) -> f64 {
    x.iter().map(|&v| bump(v)).product()
}

/// Smooth annular cutoff in `|x|²` (support `1/2 ≤ |x| ≤ √2`) times `(Σ_j |x_j|^{p_j})^{−1}`.
pub fn annular_inverse_power(p: Vec<f64>) -> impl Fn(&[f64]) -> f64 {
    move |x: &[f64]| {
        let f = phi_of_gauge(x.iter().map(|v| v * v).sum());
        if f == 0.0 {
            0.0
        } else {
            f / x.iter().zip(&p).map(|(v, q)| v.abs().powf(*q)).sum::<f64>()
        }
    }
}

/// Support radius of [`annular_inverse_power`].
pub const ANNULUS_RADIUS: f64 = std::f64::consts::SQRT_2;

/// Default half-period for a function supported in `[-r, r]^m`.
pub fn default_half_period(support_radius: f64) -> f64 {
    8.0 * support_radius
}

/// Coefficients of the level-0 kernel factor `K(u)φ(u)` and of the localization `θ(x)`,
/// both on the same torus.
pub fn block_factor_coefficients(spec: &KernelSpec, half_period: f64, resolution: usize, cutoff: usize) -> Result<(CoefficientArray, CoefficientArray)> {
    spec.validate()?;
    let m = spec.m();
    let sk = SampledFunction::from_real_fn(m, half_period, resolution, |u| {
        if u.iter().all(|&v| v == 0.0) {
            return 0.0;
        }
        let f = phi(&spec.p, u);
        if f == 0.0 {
            0.0
        } else {
            spec.eval(u) * f
        }
    })?;
    let st = SampledFunction::from_real_fn(m, half_period, resolution, theta)?;
    Ok((torus_coefficients(&sk, cutoff)?, torus_coefficients(&st, cutoff)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_function_has_single_coefficient() {
        let l = 2.0;
        let beta = [3i64, -2];
        let f = SampledFunction::from_fn(2, l, 64, |x| basis(&beta, x, l)).unwrap();
        let c = torus_coefficients(&f, 16).unwrap();
        for (a, v) in c.iter() {
            if a == beta {
                assert!((v - c64::new(1.0, 0.0)).norm() < 1e-12);
            } else {
                assert!(v.norm() < 1e-10, "{a:?}");
            }
        }
    }

    #[test]
    fn aliasing_rejected() {
        let f = SampledFunction::from_real_fn(1, 1.0, 30, |_| 1.0).unwrap();
        assert!(matches!(torus_coefficients(&f, 8), Err(Error::Aliasing(_))));
    }

    #[test]
    fn real_input_is_hermitian_and_parseval_holds() {
        let f = SampledFunction::from_real_fn(2, 4.0, 128, |x| smooth_bump(&[x[0] - 0.3, x[1] * 1.2])).unwrap();
        let c = torus_coefficients(&f, 32).unwrap();
        assert!(c.hermitian_defect() < 1e-12);
        assert!((c.square_sum() / f.mean_square() - 1.0).abs() < 1e-2);
    }

    #[test]
    fn lattice_shift_multiplies_by_character() {
        let l = 4.0;
        let r = 256;
        let step = 2.0 * l / r as f64;
        let a = 7.0 * step;
        let f = SampledFunction::from_real_fn(1, l, r, smooth_bump).unwrap();
        let g = SampledFunction::from_real_fn(1, l, r, |x| smooth_bump(&[x[0] - a])).unwrap();
        let (cf, cg) = (torus_coefficients(&f, 64).unwrap(), torus_coefficients(&g, 64).unwrap());
        for (al, v) in cf.iter() {
            let want = v * basis(&al, &[-a], l);
            assert!((cg.get(&al) - want).norm() < 1e-13);
        }
    }

    #[test]
    fn reindexing_preserves_abs_sum() {
        let c = CoefficientArray::from_fn(2, 1.0, 3, |a| c64::new((a[0] * 3 - a[1]) as f64 * 0.1, (a[1] * a[0]) as f64 * 0.05));
        let d = CoefficientArray::from_fn(2, 1.0, 2, |a| c64::new(1.0 / (1 + a[0].abs() + a[1].abs()) as f64, 0.0));
        let (lhs, rhs) = reindexed_abs_sum(&c, &d);
        assert!((lhs - rhs).abs() <= 1e-12 * rhs);
    }

    #[test]
    fn trend_verdicts_in_one_variable() {
        let l = default_half_period(1.0);
        let r = 1 << 15;
        let smooth = torus_coefficients(&SampledFunction::from_real_fn(1, l, r, smooth_bump).unwrap(), 1 << 12).unwrap();
        assert!(abs_sum_trend(&smooth, 4).unwrap().convergent);
        let jump = torus_coefficients(&SampledFunction::from_real_fn(1, l, r, jump_bump).unwrap(), 1 << 12).unwrap();
        let t = abs_sum_trend(&jump, 4).unwrap();
        assert!(!t.convergent, "{t:?}");
        assert!((t.decay_exponent - 1.0).abs() < 0.2);
    }
}
