//! Finite n-tuples of operators, hybrid norms and the commutant norm.

use std::sync::Arc;

use faer::c64;
use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::linalg::{self, CMat};
use crate::measure_models::GridModel;
use crate::norms::{op_norm, NormingFunction};

/// An n-tuple of d×d complex matrices.
///
/// Tuples produced by [`crate::measure_models::build_model`] remember the grid model
/// they came from, which lets the estimator build spectral-cube filtrations.
#[derive(Clone, Debug)]
pub struct OperatorTuple {
    mats: Vec<CMat>,
    grid: Option<Arc<GridModel>>,
}

impl OperatorTuple {
    pub fn new(mats: Vec<CMat>) -> Result<Self> {
        let Some(first) = mats.first() else {
            return Err(input("operator tuple needs arity >= 1"));
        };
        let d = first.nrows();
        if mats.iter().any(|m| m.nrows() != d || m.ncols() != d) {
            return Err(input("all tuple components must be square of one common dimension"));
        }
        Ok(OperatorTuple { mats, grid: None })
    }

    pub(crate) fn with_grid(mut self, grid: Arc<GridModel>) -> Self {
        self.grid = Some(grid);
        self
    }

    pub fn zeros(arity: usize, d: usize) -> Result<Self> {
        OperatorTuple::new((0..arity).map(|_| CMat::zeros(d, d)).collect())
    }

    pub fn dim(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn arity(&self) -> usize {
        self.mats.len()
    }

    pub fn mats(&self) -> &[CMat] {
        &self.mats
    }

    pub fn component(&self, j: usize) -> &CMat {
        &self.mats[j]
    }

    pub fn grid(&self) -> Option<&Arc<GridModel>> {
        self.grid.as_ref()
    }

    /// Componentwise adjoint `τ*`.
    pub fn adjoint(&self) -> OperatorTuple {
        OperatorTuple { mats: self.mats.iter().map(linalg::adjoint).collect(), grid: self.grid.clone() }
    }

    /// Componentwise sum `τ + σ`.
    pub fn add(&self, other: &OperatorTuple) -> Result<OperatorTuple> {
        if self.arity() != other.arity() || self.dim() != other.dim() {
            return Err(input("tuple shapes differ"));
        }
        OperatorTuple::new(self.mats.iter().zip(&other.mats).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, t: f64) -> OperatorTuple {
        OperatorTuple { mats: self.mats.iter().map(|a| linalg::scaled(a, t)).collect(), grid: None }
    }

    /// True when every component is a multiple of the identity.
    pub fn is_scalar(&self) -> bool {
        self.mats.iter().all(|a| match linalg::diagonal_of(a) {
            Some(d) => d.iter().all(|&x| x == d[0]),
            None => false,
        })
    }
}

/// An n-tuple of norming functions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HybridProfile {
    pub funcs: Vec<NormingFunction>,
}

impl HybridProfile {
    pub fn new(funcs: Vec<NormingFunction>) -> Result<Self> {
        if funcs.is_empty() {
            return Err(input("hybrid profile needs arity >= 1"));
        }
        for f in &funcs {
            f.validate()?;
        }
        Ok(HybridProfile { funcs })
    }

    pub fn uniform(f: NormingFunction, n: usize) -> Result<Self> {
        HybridProfile::new(vec![f; n])
    }

    pub fn arity(&self) -> usize {
        self.funcs.len()
    }

    /// Componentwise conjugate profile `φ*`.
    pub fn conjugate(&self) -> Result<HybridProfile> {
        Ok(HybridProfile { funcs: self.funcs.iter().map(|f| f.conjugate()).collect::<Result<_>>()? })
    }
}

/// `[τ, A]` with components `τ(j)A − Aτ(j)`.
pub fn commutator(tau: &OperatorTuple, a: &CMat) -> Result<OperatorTuple> {
    let d = tau.dim();
    if a.nrows() != d || a.ncols() != d {
        return Err(input(format!("matrix is {}x{}, tuple dimension is {d}", a.nrows(), a.ncols())));
    }
    let mats = tau.mats.iter().map(|t| commutator_one(t, a)).collect();
    OperatorTuple::new(mats)
}

/// `tA − At`, with an O(d²) path when `t` is diagonal.
pub fn commutator_one(t: &CMat, a: &CMat) -> CMat {
    match linalg::diagonal_of(t) {
        Some(diag) => CMat::from_fn(a.nrows(), a.ncols(), |i, j| (diag[i] - diag[j]) * a[(i, j)]),
        None => t * a - a * t,
    }
}

/// `max_j |τ(j)|_{φ(j)}`.
pub fn hybrid_norm(phi: &HybridProfile, tau: &OperatorTuple) -> Result<f64> {
    if phi.arity() != tau.arity() {
        return Err(input(format!("profile arity {} differs from tuple arity {}", phi.arity(), tau.arity())));
    }
    let mut best = 0.0f64;
    for (f, t) in phi.funcs.iter().zip(&tau.mats) {
        best = best.max(op_norm(f, t)?);
    }
    Ok(best)
}

/// Blockwise direct sum `τ1 ⊕ τ2`.
pub fn direct_sum(t1: &OperatorTuple, t2: &OperatorTuple) -> Result<OperatorTuple> {
    if t1.arity() != t2.arity() {
        return Err(input("direct sum needs equal arities"));
    }
    let (d1, d2) = (t1.dim(), t2.dim());
    let mats = t1
        .mats
        .iter()
        .zip(&t2.mats)
        .map(|(a, b)| {
            CMat::from_fn(d1 + d2, d1 + d2, |i, j| {
                if i < d1 && j < d1 {
                    a[(i, j)]
                } else if i >= d1 && j >= d1 {
                    b[(i - d1, j - d1)]
                } else {
                    c64::new(0.0, 0.0)
                }
            })
        })
        .collect();
    OperatorTuple::new(mats)
}

/// Direct sum of two square matrices.
pub fn block_diag(a: &CMat, b: &CMat) -> CMat {
    let (d1, d2) = (a.nrows(), b.nrows());
    CMat::from_fn(d1 + d2, d1 + d2, |i, j| {
        if i < d1 && j < d1 {
            a[(i, j)]
        } else if i >= d1 && j >= d1 {
            b[(i - d1, j - d1)]
        } else {
            c64::new(0.0, 0.0)
        }
    })
}

/// `τ(j) − c_j I`. A grid tag survives when every `c_j` is real.
pub fn shift(tau: &OperatorTuple, c: &[c64]) -> Result<OperatorTuple> {
    if c.len() != tau.arity() {
        return Err(input("shift needs one scalar per component"));
    }
    let mats = tau
        .mats
        .iter()
        .zip(c)
        .map(|(a, &cj)| {
            let mut b = a.clone();
            for i in 0..b.nrows() {
                b[(i, i)] -= cj;
            }
            b
        })
        .collect();
    let mut out = OperatorTuple::new(mats)?;
    if let Some(g) = &tau.grid {
        if c.iter().all(|z| z.im == 0.0) {
            let re: Vec<f64> = c.iter().map(|z| z.re).collect();
            out.grid = Some(Arc::new(g.translated(&re)));
        }
    }
    Ok(out)
}

/// `‖X‖ + |[X, τ]|_φ`.
pub fn triple_norm(tau: &OperatorTuple, phi: &HybridProfile, x: &CMat) -> Result<f64> {
    let comm = commutator(tau, x)?;
    Ok(linalg::op_norm2(x)? + hybrid_norm(phi, &comm)?)
}

/// Residual sequences for one sample operator.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleResiduals {
    /// `‖|X − A_m X|‖` for each m.
    pub left: Vec<f64>,
    /// `‖|X − X A_m|‖` for each m.
    pub right: Vec<f64>,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproxUnitReport {
    pub samples: Vec<SampleResiduals>,
    /// `sup_m ‖|A_m|‖`.
    pub sup_triple_norm: f64,
    pub tolerance: f64,
    pub rule: &'static str,
    pub verdict: bool,
}

pub const APPROX_UNIT_TOL: f64 = 1e-2;
const APPROX_UNIT_RULE: &str =
    "a residual sequence passes if its last value is below 1e-2 or it is strictly decreasing over its final half";

fn residual_passes(r: &[f64], tol: f64) -> bool {
    let Some(&last) = r.last() else { return false };
    if last < tol {
        return true;
    }
    let start = r.len() / 2;
    r.len() >= 2 && r[start.min(r.len() - 2)..].windows(2).all(|w| w[1] < w[0])
}

/// Checks that `A_m` behaves as an approximate unit for the commutant norm on the given samples.
pub fn verify_approx_unit(
    tau: &OperatorTuple,
    phi: &HybridProfile,
    a_seq: &[CMat],
    x_samples: &[CMat],
) -> Result<ApproxUnitReport> {
    if a_seq.is_empty() {
        return Err(input("approximate-unit sequence is empty"));
    }
    let d = tau.dim();
    if a_seq.iter().chain(x_samples).any(|m| m.nrows() != d || m.ncols() != d) {
        return Err(input("matrix dimensions differ from the tuple dimension"));
    }
    let mut sup = 0.0f64;
    for a in a_seq {
        sup = sup.max(triple_norm(tau, phi, a)?);
    }
    let mut samples = Vec::with_capacity(x_samples.len());
    for x in x_samples {
        let mut left = Vec::with_capacity(a_seq.len());
        let mut right = Vec::with_capacity(a_seq.len());
        for a in a_seq {
            left.push(triple_norm(tau, phi, &(x - a * x))?);
            right.push(triple_norm(tau, phi, &(x - x * a))?);
        }
        let passes = residual_passes(&left, APPROX_UNIT_TOL) && residual_passes(&right, APPROX_UNIT_TOL);
        samples.push(SampleResiduals { left, right, passes });
    }
    let verdict = samples.iter().all(|s| s.passes);
    Ok(ApproxUnitReport { samples, sup_triple_norm: sup, tolerance: APPROX_UNIT_TOL, rule: APPROX_UNIT_RULE, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::diag_real;
    use approx::assert_relative_eq;

    fn e12() -> CMat {
        let mut a = CMat::zeros(2, 2);
        a[(0, 1)] = c64::new(1.0, 0.0);
        a
    }

    #[test]
    fn commutator_with_identity_vanishes() {
        let t = OperatorTuple::new(vec![diag_real(&[1.0, 2.0, 5.0]), CMat::from_fn(3, 3, |i, j| c64::new((i + 2 * j) as f64, 1.0))]).unwrap();
        let c = commutator(&t, &linalg::identity(3)).unwrap();
        assert!(c.mats().iter().all(|m| linalg::frobenius(m) == 0.0));
    }

    #[test]
    fn commutator_elementary() {
        let t = OperatorTuple::new(vec![diag_real(&[3.0, -1.0]), diag_real(&[0.5, 2.0])]).unwrap();
        let c = commutator(&t, &e12()).unwrap();
        for (j, d) in [(0usize, 4.0), (1, -1.5)] {
            let m = c.component(j);
            assert_eq!(m[(0, 1)], c64::new(d, 0.0));
            assert_eq!(m[(0, 0)], c64::new(0.0, 0.0));
            assert_eq!(m[(1, 0)], c64::new(0.0, 0.0));
        }
    }

    #[test]
    fn commutator_dimension_mismatch() {
        let t = OperatorTuple::new(vec![diag_real(&[1.0, 2.0])]).unwrap();
        assert!(commutator(&t, &linalg::identity(3)).is_err());
    }

    #[test]
    fn hybrid_norm_example() {
        let t = OperatorTuple::new(vec![diag_real(&[1.0, 0.0]), diag_real(&[0.0, 1.0])]).unwrap();
        let phi = HybridProfile::new(vec![NormingFunction::Schatten { p: 1.0 }, NormingFunction::Schatten { p: 2.0 }]).unwrap();
        assert_relative_eq!(hybrid_norm(&phi, &t).unwrap(), 1.0, epsilon = 1e-14);
        let bad = HybridProfile::new(vec![NormingFunction::Schatten { p: 1.0 }]).unwrap();
        assert!(hybrid_norm(&bad, &t).is_err());
        assert_eq!(hybrid_norm(&phi, &OperatorTuple::zeros(2, 3).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn direct_sum_with_zero_pads() {
        let t = OperatorTuple::new(vec![diag_real(&[1.0, 2.0])]).unwrap();
        let z = OperatorTuple::zeros(1, 1).unwrap();
        let s = direct_sum(&t, &z).unwrap();
        assert_eq!(s.dim(), 3);
        assert_eq!(s.component(0)[(1, 1)], c64::new(2.0, 0.0));
        assert_eq!(s.component(0)[(2, 2)], c64::new(0.0, 0.0));
        assert!(direct_sum(&t, &OperatorTuple::zeros(2, 1).unwrap()).is_err());
    }

    #[test]
    fn shift_translates_spectrum() {
        let a = CMat::from_fn(4, 4, |i, j| c64::new(((i + 1) * (j + 1)) as f64 / 3.0 + if i == j { i as f64 } else { 0.0 }, 0.0));
        let t = OperatorTuple::new(vec![a.clone()]).unwrap();
        let s = shift(&t, &[c64::new(1.25, 0.0)]).unwrap();
        let e0 = linalg::eigvalsh(&a).unwrap();
        let e1 = linalg::eigvalsh(s.component(0)).unwrap();
        for (x, y) in e0.iter().zip(&e1) {
            assert_relative_eq!(x - 1.25, *y, epsilon = 1e-12);
        }
        let same = shift(&t, &[c64::new(0.0, 0.0)]).unwrap();
        assert_eq!(linalg::frobenius(&(same.component(0) - &a)), 0.0);
        assert!(shift(&t, &[]).is_err());
    }

    #[test]
    fn triple_norm_examples() {
        let t = OperatorTuple::new(vec![diag_real(&[0.0, 1.0])]).unwrap();
        let phi = HybridProfile::new(vec![NormingFunction::Schatten { p: 1.0 }]).unwrap();
        assert_relative_eq!(triple_norm(&t, &phi, &e12()).unwrap(), 2.0, epsilon = 1e-14);
        assert_relative_eq!(triple_norm(&t, &phi, &linalg::identity(2)).unwrap(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(triple_norm(&t, &phi, &diag_real(&[3.0, -4.0])).unwrap(), 4.0, epsilon = 1e-14);
    }

    #[test]
    fn approx_unit_identity_and_fixed_projection() {
        let t = OperatorTuple::new(vec![diag_real(&[0.0, 1.0, 2.0])]).unwrap();
        let phi = HybridProfile::new(vec![NormingFunction::Schatten { p: 1.0 }]).unwrap();
        let id = linalg::identity(3);
        let x = CMat::from_fn(3, 3, |i, j| c64::new((i + j) as f64, 0.0));
        let r = verify_approx_unit(&t, &phi, &[id.clone(), id.clone()], &[x]).unwrap();
        assert!(r.verdict);
        assert!(r.samples[0].left.iter().all(|&v| v == 0.0));
        let mut p = CMat::zeros(3, 3);
        p[(0, 0)] = c64::new(1.0, 0.0);
        let r = verify_approx_unit(&t, &phi, &[p.clone(), p.clone(), p], &[id]).unwrap();
        assert!(!r.verdict);
        assert!(r.samples[0].left.iter().all(|&v| v >= 1.0));
        assert!(verify_approx_unit(&t, &phi, &[], &[]).is_err());
    }
}
