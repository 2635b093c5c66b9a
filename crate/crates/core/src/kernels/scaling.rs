//! Trace norms of the lattice-localized dyadic pieces acting on `L²(R^m)`,
//! discretized on an isotropic lattice of spacing `h`.

use serde::Serialize;

use super::cutoff::{phi_of_gauge, theta_axis, BUMP_RADIUS};
use super::{gauge, KernelComponent, KernelSpec};
use crate::error::{input, Result};
use crate::linalg::{self, RMat};

/// Minimum number of lattice cells across the localization bump for a level to count as resolved.
pub const MIN_BUMP_CELLS: f64 = 6.0;
const COLUMN_CHUNK: usize = 4096;

/// Row points and factors (`θ` at the row) for level `n`, lattice index `l = 0`.
fn rows_for(spec: &KernelSpec, n: i32, h: f64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let m = spec.m();
    let sc: Vec<f64> = spec.p.iter().map(|p| 2f64.powf(n as f64 / p)).collect();
    let axes: Vec<Vec<(f64, f64)>> = (0..m)
        .map(|j| {
            let half = BUMP_RADIUS / sc[j];
            let k = (half / h).ceil() as i64 + 1;
            (-k..k)
                .map(|i| (i as f64 + 0.5) * h)
                .map(|x| (x, theta_axis(sc[j] * x)))
                .filter(|&(_, t)| t > 0.0)
                .collect()
        })
        .collect();
    let mut pts = vec![Vec::new()];
    let mut fac = vec![1.0];
    for ax in &axes {
        let mut np = Vec::new();
        let mut nf = Vec::new();
        for (p, f) in pts.iter().zip(&fac) {
            for &(x, t) in ax {
                let mut q = p.clone();
                q.push(x);
                np.push(q);
                nf.push(f * t);
            }
        }
        pts = np;
        fac = nf;
    }
    (pts, fac)
}

/// `|S̃_{n,0}|_1`: trace norm of the operator with kernel `K(x−y)φ(σ(2^n)(x−y))θ(σ(2^n)x)`
/// on `L²(R^m)`, on the lattice `(h(Z + 1/2))^m` with the diagonal excluded.
pub fn localized_trace_norm(spec: &KernelSpec, n: i32, h: f64) -> Result<f64> {
    spec.validate()?;
    if !(h > 0.0) {
        return Err(input(format!("lattice spacing must be positive, got {h}")));
    }
    let m = spec.m();
    let (rows, rfac) = rows_for(spec, n, h);
    if rows.is_empty() {
        return Ok(0.0);
    }
    let two_n = 2f64.powi(n);
    let vol = h.powi(m as i32);
    // column lattice box: row extent widened by the annulus reach
    let mut lo = vec![0i64; m];
    let mut cnt = vec![0usize; m];
    for j in 0..m {
        let reach = 2f64.powf((1 - n) as f64 / spec.p[j]);
        let xmin = rows.iter().map(|r| r[j]).fold(f64::INFINITY, f64::min) - reach;
        let mut xmax = rows.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max) + reach;
        if j == 0 && spec.component == KernelComponent::Plus {
            xmax = rows.iter().map(|r| r[0]).fold(f64::NEG_INFINITY, f64::max);
        }
        lo[j] = (xmin / h - 0.5).floor() as i64;
        let hi = (xmax / h - 0.5).ceil() as i64;
        cnt[j] = (hi - lo[j] + 1).max(0) as usize;
    }
    let total: usize = cnt.iter().product();
    let col_point = |c: usize| -> Vec<f64> {
        let mut r = c;
        let mut y = vec![0.0; m];
        for j in (0..m).rev() {
            y[j] = (lo[j] + (r % cnt[j]) as i64) as f64 * h + 0.5 * h;
            r /= cnt[j];
        }
        y
    };
    linalg::trace_norm_by_gram(rows.len(), total, COLUMN_CHUNK, |c0, c1| {
        let mut a = RMat::zeros(rows.len(), c1 - c0);
        let mut u = vec![0.0; m];
        for c in c0..c1 {
            let y = col_point(c);
            for (r, x) in rows.iter().enumerate() {
                let mut same = true;
                for j in 0..m {
                    u[j] = x[j] - y[j];
                    same &= u[j].abs() < 0.5 * h;
                }
                if same {
                    continue;
                }
                let f = phi_of_gauge(two_n * gauge(&u, &spec.p));
                if f != 0.0 {
                    a[(r, c - c0)] = vol * rfac[r] * spec.eval(&u) * f;
                }
            }
        }
        a
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelTrace {
    pub n: i32,
    pub trace_norm: f64,
    pub resolved: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceScalingReport {
    pub levels: Vec<LevelTrace>,
    /// `(n, |S̃_{n+1,0}|_1 / |S̃_{n,0}|_1, relative deviation from target)` for resolved neighbours.
    pub ratios: Vec<(i32, f64, f64)>,
    pub target: f64,
    pub tolerance: f64,
    /// Longest run of consecutive resolved levels whose ratios all meet the tolerance.
    pub consecutive_ratios: usize,
    pub pass: bool,
}

/// Level-to-level trace-norm ratios against `2^{−1+1/p_1}`.
pub fn trace_norm_scaling(spec: &KernelSpec, levels: &[i32], h: f64, tolerance: f64) -> Result<TraceScalingReport> {
    spec.validate()?;
    let target = 2f64.powf(-1.0 + 1.0 / spec.p[0]);
    let mut out = Vec::new();
    for &n in levels {
        let resolved = spec.p.iter().all(|p| 2.0 * BUMP_RADIUS * 2f64.powf(-n as f64 / p) >= MIN_BUMP_CELLS * h);
        out.push(LevelTrace { n, trace_norm: localized_trace_norm(spec, n, h)?, resolved });
    }
    let mut ratios = Vec::new();
    let mut run = 0usize;
    let mut best = 0usize;
    for w in out.windows(2) {
        if w[1].n == w[0].n + 1 && w[0].resolved && w[1].resolved && w[0].trace_norm > 0.0 {
            let r = w[1].trace_norm / w[0].trace_norm;
            let dev = (r / target - 1.0).abs();
            ratios.push((w[0].n, r, dev));
            run = if dev <= tolerance { run + 1 } else { 0 };
            best = best.max(run);
        } else {
            run = 0;
        }
    }
    Ok(TraceScalingReport { levels: out, ratios, target, tolerance, consecutive_ratios: best, pass: best >= 3 })
}
