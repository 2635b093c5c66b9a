//! Mixed-homogeneity singular integral kernels, their grid discretizations and
//! the dyadic block machinery.

pub mod blocks;
pub mod cutoff;
pub mod scaling;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{input, param, Error, Result};
use crate::linalg::{self, CMat, RMat};
use crate::measure_models::GridModel;
use crate::norms::{decay_diagnostic, DecayFit, SingularValues};

pub use blocks::{
    active_block_counts, block_hypothesis_verify, covering_range, dyadic_decompose, dyadic_decompose_class, geometric_count_bound,
    reassembly_residual, sequence_constants, Block, BlockSet, CutoffParams, HypothesisReport, ReassemblyReport,
};
pub use scaling::{localized_trace_norm, trace_norm_scaling, LevelTrace, TraceScalingReport};

/// `δ(x) = max_j |x_j|^{p_j}`.
pub fn gauge(x: &[f64], p: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), p.len());
    x.iter().zip(p).map(|(v, q)| v.abs().powf(*q)).fold(0.0, f64::max)
}

/// `σ(t)x = (t^{1/p_1} x_1, …, t^{1/p_m} x_m)`.
pub fn dilate(t: f64, x: &[f64], p: &[f64]) -> Result<Vec<f64>> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(input(format!("dilation factor must be positive, got {t}")));
    }
    if x.len() != p.len() {
        return Err(input("point and exponent vector lengths differ"));
    }
    Ok(x.iter().zip(p).map(|(v, q)| v * t.powf(1.0 / q)).collect())
}

/// Validates an exponent vector: every `p_j > 1` and `Σ 1/p_j = 1`.
pub fn check_exponents(p: &[f64]) -> Result<()> {
    if p.is_empty() || p.iter().any(|&q| !(q > 1.0) || !q.is_finite()) {
        return Err(param(format!("exponents must be finite and > 1, got {p:?}")));
    }
    let s: f64 = p.iter().map(|q| 1.0 / q).sum();
    if (s - 1.0).abs() > 1e-12 {
        return Err(param(format!("exponents must satisfy sum 1/p_j = 1, got {s}")));
    }
    Ok(())
}

/// Which kernel of the family is meant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelComponent {
    /// `K_j(u) = sign(u_j)|u_j|^{p_j−1} / Σ_k |u_k|^{p_k}` (zero-based `j`).
    Index(usize),
    /// `K_0(u) = (u_1)_+^{p_1−1} / Σ_k |u_k|^{p_k}`.
    Plus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub p: Vec<f64>,
    pub component: KernelComponent,
}

impl KernelSpec {
    pub fn new(p: Vec<f64>, component: KernelComponent) -> Result<Self> {
        let s = KernelSpec { p, component };
        s.validate()?;
        Ok(s)
    }

    pub fn m(&self) -> usize {
        self.p.len()
    }

    pub fn validate(&self) -> Result<()> {
        check_exponents(&self.p)?;
        if let KernelComponent::Index(j) = self.component {
            if j >= self.p.len() {
                return Err(param(format!("kernel index {j} out of range for arity {}", self.p.len())));
            }
        }
        Ok(())
    }

    /// Kernel value without argument checks; `u` must be nonzero.
    #[inline]
    pub(crate) fn eval(&self, u: &[f64]) -> f64 {
        let den: f64 = u.iter().zip(&self.p).map(|(v, q)| v.abs().powf(*q)).sum();
        match self.component {
            KernelComponent::Index(j) => u[j].signum() * u[j].abs().powf(self.p[j] - 1.0) / den,
            KernelComponent::Plus => {
                if u[0] > 0.0 {
                    u[0].powf(self.p[0] - 1.0) / den
                } else {
                    0.0
                }
            }
        }
    }

    /// `n_0 = −max_j ceil(p_j)`; dyadic pieces below `n_0 − 2` vanish on `[-1,1]^m`.
    pub fn n0(&self) -> i32 {
        -(self.p.iter().map(|q| q.ceil() as i32).max().unwrap_or(1))
    }
}

pub fn kernel_value(spec: &KernelSpec, x: &[f64]) -> Result<f64> {
    spec.validate()?;
    if x.len() != spec.m() {
        return Err(input("point arity differs from kernel arity"));
    }
    if x.iter().all(|&v| v == 0.0) {
        return Err(Error::Singularity("kernel evaluated at the origin".into()));
    }
    Ok(spec.eval(x))
}

/// Largest `|Σ_j (x_j − y_j) K_j(x − y) − 1|` over random off-diagonal pairs in `[-1,1]^m`.
pub fn kernel_identity_check(p: &[f64], samples: usize, seed: u64) -> Result<f64> {
    check_exponents(p)?;
    let m = p.len();
    let specs: Vec<KernelSpec> = (0..m).map(|j| KernelSpec { p: p.to_vec(), component: KernelComponent::Index(j) }).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut done = 0;
    let mut x = vec![0.0; m];
    let mut u = vec![0.0; m];
    while done < samples {
        for j in 0..m {
            x[j] = rng.gen_range(-1.0..=1.0);
            let y: f64 = rng.gen_range(-1.0..=1.0);
            u[j] = x[j] - y;
        }
        if u.iter().all(|&v| v == 0.0) {
            continue;
        }
        let s: f64 = (0..m).map(|j| u[j] * specs[j].eval(&u)).sum();
        worst = worst.max((s - 1.0).abs());
        done += 1;
    }
    Ok(worst)
}

/// Real matrix `w_a^{1/2} K(x_a − x_b) w_b^{1/2}` with zero diagonal.
pub fn build_operator_real(model: &GridModel, spec: &KernelSpec) -> Result<RMat> {
    spec.validate()?;
    if model.m() != spec.m() {
        return Err(input(format!("model arity {} differs from kernel arity {}", model.m(), spec.m())));
    }
    let d = model.dim();
    let sw: Vec<f64> = model.weights().iter().map(|w| w.sqrt()).collect();
    let m = model.m();
    let mut u = vec![0.0; m];
    let mut out = RMat::zeros(d, d);
    for b in 0..d {
        let xb = model.point(b);
        for a in 0..d {
            if a == b {
                continue;
            }
            let xa = model.point(a);
            for j in 0..m {
                u[j] = xa[j] - xb[j];
            }
            out[(a, b)] = sw[a] * spec.eval(&u) * sw[b];
        }
    }
    Ok(out)
}

/// Complex form of [`build_operator_real`].
pub fn build_operator(model: &GridModel, spec: &KernelSpec) -> Result<CMat> {
    Ok(linalg::from_real(&build_operator_real(model, spec)?))
}

/// Outcome of the commutator rank-one structure check.
#[derive(Clone, Debug, PartialEq)]
pub struct RankOneReport {
    /// Frobenius norm (an upper bound for the operator norm) of `Σ_j [D_j, X_j] − (R − diag R)`.
    pub residual: f64,
    /// Numerical rank of `Σ_j [D_j, X_j] + diag R`.
    pub rank: usize,
    /// Second singular value relative to the first, for that same matrix.
    pub rank_gap: f64,
    /// `Tr R = Σ_a w_a`.
    pub trace: f64,
}

/// Assembles `Σ_j [D_j, X_j]` from the discretized operators and compares it with
/// the rank-one matrix `R = (w_a^{1/2} w_b^{1/2})` off the diagonal.
pub fn rank_one_check(model: &GridModel, p: &[f64]) -> Result<RankOneReport> {
    check_exponents(p)?;
    let m = model.m();
    let d = model.dim();
    let sw: Vec<f64> = model.weights().iter().map(|w| w.sqrt()).collect();
    let mut q = RMat::zeros(d, d);
    for j in 0..m {
        let x = build_operator_real(model, &KernelSpec { p: p.to_vec(), component: KernelComponent::Index(j) })?;
        for b in 0..d {
            for a in 0..d {
                q[(a, b)] += (model.coord(a, j) - model.coord(b, j)) * x[(a, b)];
            }
        }
    }
    let mut res2 = 0.0;
    for b in 0..d {
        for a in 0..d {
            let r = if a == b { 0.0 } else { sw[a] * sw[b] };
            res2 += (q[(a, b)] - r).powi(2);
        }
    }
    for a in 0..d {
        q[(a, a)] = sw[a] * sw[a];
    }
    let (rank, rank_gap) = if d <= 1024 {
        let s = linalg::singular_values_real(&q)?;
        (linalg::numerical_rank(&s), s.get(1).copied().unwrap_or(0.0) / s[0])
    } else {
        // σ_1 by power iteration; σ_2 bounded through ‖Q‖_F² − σ_1².
        let s1 = linalg::power_norm(
            d,
            |v| (0..d).map(|a| (0..d).map(|b| q[(a, b)] * v[b]).sum()).collect(),
            |v| (0..d).map(|b| (0..d).map(|a| q[(a, b)] * v[a]).sum()).collect(),
            30,
        );
        let fro2 = q.norm_l2().powi(2);
        let s2 = (fro2 - s1 * s1).max(0.0).sqrt();
        let gap = s2 / s1;
        (if gap <= 1e-6 { 1 } else { 2 }, gap)
    };
    Ok(RankOneReport { residual: res2.sqrt(), rank, rank_gap, trace: model.total_mass() })
}

/// Power-law fit of the singular values of a kernel matrix.
pub fn snumber_decay_check(x: &RMat, q: f64, window: (usize, usize)) -> Result<DecayFit> {
    let s = SingularValues::new(linalg::singular_values_real(x)?)?;
    decay_diagnostic(&s, q, window)
}

/// `q_j = p_j / (p_j − 1)`.
pub fn conjugate_exponents(p: &[f64]) -> Vec<f64> {
    p.iter().map(|&q| q / (q - 1.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure_models::MeasureKind;
    use approx::assert_relative_eq;

    #[test]
    fn gauge_homogeneity() {
        let p = [3.0, 1.5];
        let x = [0.3, -0.7];
        for t in [0.25, 2.0, 7.5] {
            let y = dilate(t, &x, &p).unwrap();
            assert_relative_eq!(gauge(&y, &p), t * gauge(&x, &p), max_relative = 1e-14);
        }
        assert!(dilate(0.0, &x, &p).is_err());
        assert!(dilate(-1.0, &x, &p).is_err());
    }

    #[test]
    fn gauge_ball_volume_by_cell_count() {
        let p = [2.0, 2.0];
        let r = 0.36;
        let n = 2000;
        let h = 4.0 / n as f64;
        let mut count = 0usize;
        for i in 0..n {
            for k in 0..n {
                let x = [-2.0 + (i as f64 + 0.5) * h, -2.0 + (k as f64 + 0.5) * h];
                if gauge(&x, &p) <= r {
                    count += 1;
                }
            }
        }
        assert_relative_eq!(count as f64 * h * h, 4.0 * r, max_relative = 1e-2);
    }

    #[test]
    fn kernel_examples() {
        let k1 = KernelSpec::new(vec![2.0, 2.0], KernelComponent::Index(0)).unwrap();
        assert_relative_eq!(kernel_value(&k1, &[1.0, 0.0]).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(kernel_value(&k1, &[-0.3, 0.2]).unwrap(), -kernel_value(&k1, &[0.3, -0.2]).unwrap(), epsilon = 1e-15);
        assert!(matches!(kernel_value(&k1, &[0.0, 0.0]), Err(Error::Singularity(_))));
        let plus = KernelSpec::new(vec![3.0, 1.5], KernelComponent::Plus).unwrap();
        let x = [0.4, -0.25];
        for t in [0.5, 3.0] {
            let y = dilate(t, &x, &plus.p).unwrap();
            assert_relative_eq!(kernel_value(&plus, &y).unwrap(), t.powf(-1.0 / 3.0) * kernel_value(&plus, &x).unwrap(), max_relative = 1e-13);
        }
        assert_eq!(kernel_value(&plus, &[-0.1, 0.3]).unwrap(), 0.0);
        assert!(KernelSpec::new(vec![2.0, 3.0], KernelComponent::Plus).is_err());
        assert!(KernelSpec::new(vec![2.0, 2.0], KernelComponent::Index(2)).is_err());
    }

    #[test]
    fn identity_residual_small() {
        for p in [vec![2.0, 2.0], vec![3.0, 3.0, 3.0], vec![4.0, 4.0 / 3.0]] {
            assert!(kernel_identity_check(&p, 2000, 3).unwrap() < 1e-12);
        }
    }

    #[test]
    fn operator_antisymmetric_and_rank_one_structure() {
        let model = GridModel::new(MeasureKind::Lebesgue, 2, 8).unwrap();
        let x = build_operator_real(&model, &KernelSpec::new(vec![2.0, 2.0], KernelComponent::Index(1)).unwrap()).unwrap();
        for a in 0..64 {
            assert_eq!(x[(a, a)], 0.0);
            for b in 0..64 {
                assert_eq!(x[(a, b)], -x[(b, a)]);
            }
        }
        let r = rank_one_check(&model, &[3.0, 1.5]).unwrap();
        assert!(r.residual < 1e-12);
        assert_eq!(r.rank, 1);
        assert_relative_eq!(r.trace, 4.0, max_relative = 1e-13);
    }

    #[test]
    fn n0_values() {
        assert_eq!(KernelSpec::new(vec![2.0, 2.0], KernelComponent::Plus).unwrap().n0(), -2);
        assert_eq!(KernelSpec::new(vec![3.0, 1.5], KernelComponent::Plus).unwrap().n0(), -3);
    }
}
