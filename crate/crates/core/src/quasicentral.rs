//! Upper estimates of the modulus of quasicentral approximation, trace-duality lower
//! certificates and the invariance checks built on them.
//!
//! Every value produced here is an upper estimate: a minimum of `|[τ, A]|_φ` over an
//! explicit finite set of positive contractions, optionally improved by local descent.

use faer::c64;

use crate::error::{input, Error, Result};
use crate::linalg::{self, CMat};
use crate::measure_models::{cube_commutator_values, cube_counts, cube_ladder, cube_projection, GridModel, MAX_DENSE_DIM};
use crate::norms::NormingFunction;
use crate::tuples::{commutator, commutator_one, direct_sum, hybrid_norm, shift, HybridProfile, OperatorTuple};

/// Tolerance on hermiticity and on the spectrum of supplied candidates.
pub const CANDIDATE_TOL: f64 = 1e-10;

/// Largest dimension for which descent is attempted.
pub const DESCENT_MAX_DIM: usize = 256;

/// Descent settings. The step is taken along the unit-Frobenius descent direction, so
/// the step length is measured in the (dimensionless) contraction scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KOptions {
    pub refine: bool,
    pub initial_step: f64,
    pub max_steps: usize,
    pub rel_tol: f64,
    pub max_halvings: usize,
}

impl Default for KOptions {
    fn default() -> Self {
        KOptions { refine: false, initial_step: 0.1, max_steps: 200, rel_tol: 1e-6, max_halvings: 40 }
    }
}

/// The matrix achieving an estimate.
#[derive(Clone, Debug)]
pub enum Witness {
    Dense(CMat),
    /// A spectral-cube projection of the tagged grid model, kept symbolic.
    Cubes { m_param: usize, counts: Vec<usize> },
}

#[derive(Clone, Debug)]
pub struct KEstimate {
    /// Upper estimate of the modulus.
    pub value: f64,
    pub witness: Witness,
    /// `(rank, |[τ,A]|_φ)` for each filtration candidate, in candidate order.
    pub filtration_values: Vec<(usize, f64)>,
    pub method: String,
    pub descent_steps: usize,
}

impl KEstimate {
    pub fn witness_matrix(&self, model: Option<&GridModel>, phi: &HybridProfile) -> Result<CMat> {
        match &self.witness {
            Witness::Dense(a) => Ok(a.clone()),
            Witness::Cubes { m_param, .. } => {
                let model = model.ok_or_else(|| input("cube witness needs its grid model"))?;
                cube_projection(model, phi, *m_param, None)?.matrix()
            }
        }
    }
}

fn check_arity(tau: &OperatorTuple, phi: &HybridProfile) -> Result<()> {
    if tau.arity() != phi.arity() {
        return Err(input(format!("profile arity {} differs from tuple arity {}", phi.arity(), tau.arity())));
    }
    Ok(())
}

fn validate_candidate(a: &CMat, d: usize) -> Result<Vec<f64>> {
    if a.nrows() != d || a.ncols() != d {
        return Err(input("candidate dimension differs from the tuple dimension"));
    }
    if !linalg::is_hermitian(a, CANDIDATE_TOL) {
        return Err(input("candidate is not hermitian"));
    }
    let e = linalg::eigvalsh(a)?;
    if e.first().is_some_and(|&v| v < -CANDIDATE_TOL) || e.last().is_some_and(|&v| v > 1.0 + CANDIDATE_TOL) {
        return Err(input("candidate spectrum leaves [0, 1]"));
    }
    Ok(e)
}

fn contraction_rank(e: &[f64]) -> usize {
    e.iter().filter(|&&v| v > CANDIDATE_TOL).count()
}

/// `|[τ, A]|_φ`.
pub fn commutator_value(tau: &OperatorTuple, phi: &HybridProfile, a: &CMat) -> Result<f64> {
    hybrid_norm(phi, &commutator(tau, a)?)
}

/// Projections onto the spans of the leading eigenvectors of `Σ τ(j)*τ(j)`, proper ranks only.
pub fn eigen_filtration(tau: &OperatorTuple) -> Result<Vec<CMat>> {
    let d = tau.dim();
    let mut h = CMat::zeros(d, d);
    for t in tau.mats() {
        h += t.adjoint() * t;
    }
    let h = linalg::hermitian_part(&h);
    let (_, vecs) = linalg::eigh(&h)?;
    let ranks: Vec<usize> = if d <= 64 {
        (1..d).collect()
    } else {
        let mut r: Vec<usize> = (0..24).map(|i| ((d as f64).powf(i as f64 / 24.0)).round() as usize).filter(|&r| r >= 1 && r < d).collect();
        r.dedup();
        r
    };
    Ok(ranks
        .into_iter()
        .map(|r| {
            // eigenvalues ascend, so the leading vectors are the last r columns
            CMat::from_fn(d, d, |i, k| {
                let mut s = c64::new(0.0, 0.0);
                for c in d - r..d {
                    s += vecs[(i, c)] * vecs[(k, c)].conj();
                }
                s
            })
        })
        .collect())
}

/// Dense default filtration: cube projections for grid-tagged tuples, eigenvector projections otherwise.
pub fn default_candidates(tau: &OperatorTuple, phi: &HybridProfile) -> Result<Vec<CMat>> {
    match tau.grid() {
        Some(g) if g.dim() == tau.dim() => cube_ladder(g, phi)
            .into_iter()
            .map(|mp| cube_projection(g, phi, mp, None)?.matrix())
            .collect(),
        _ => eigen_filtration(tau),
    }
}

pub fn estimate_k(tau: &OperatorTuple, phi: &HybridProfile, candidates: &[CMat], refine: bool) -> Result<KEstimate> {
    estimate_k_with(tau, phi, candidates, &KOptions { refine, ..KOptions::default() })
}

pub fn estimate_k_with(tau: &OperatorTuple, phi: &HybridProfile, candidates: &[CMat], opts: &KOptions) -> Result<KEstimate> {
    check_arity(tau, phi)?;
    let d = tau.dim();
    if tau.is_scalar() {
        return Ok(KEstimate {
            value: 0.0,
            witness: Witness::Dense(linalg::scaled(&linalg::identity(d), 1.0 - 1e-9)),
            filtration_values: vec![(d, 0.0)],
            method: "upper estimate: scalar tuple".into(),
            descent_steps: 0,
        });
    }
    if candidates.is_empty() {
        if let Some(g) = tau.grid().filter(|g| g.dim() == d) {
            let base = estimate_k_model(g, phi)?;
            if !opts.refine || d > DESCENT_MAX_DIM {
                return Ok(base);
            }
            let start = base.witness_matrix(Some(g), phi)?;
            return refine_from(tau, phi, start, base, opts);
        }
        let cands = eigen_filtration(tau)?;
        if cands.is_empty() {
            return Err(Error::Config("no candidates supplied and no default filtration available".into()));
        }
        return dense_estimate(tau, phi, &cands, opts, "eigenvector filtration");
    }
    dense_estimate(tau, phi, candidates, opts, "supplied candidates")
}

fn dense_estimate(tau: &OperatorTuple, phi: &HybridProfile, cands: &[CMat], opts: &KOptions, label: &str) -> Result<KEstimate> {
    let d = tau.dim();
    let mut values = Vec::with_capacity(cands.len());
    let mut best = (f64::INFINITY, 0usize);
    for (i, a) in cands.iter().enumerate() {
        let e = validate_candidate(a, d)?;
        let v = commutator_value(tau, phi, a)?;
        values.push((contraction_rank(&e), v));
        if v < best.0 {
            best = (v, i);
        }
    }
    let base = KEstimate {
        value: best.0,
        witness: Witness::Dense(cands[best.1].clone()),
        filtration_values: values,
        method: format!("upper estimate: {label}"),
        descent_steps: 0,
    };
    if opts.refine && d <= DESCENT_MAX_DIM {
        refine_from(tau, phi, cands[best.1].clone(), base, opts)
    } else {
        Ok(base)
    }
}

/// Structured estimate for the coordinate tuple of a grid model over its cube filtration.
pub fn estimate_k_model(model: &GridModel, phi: &HybridProfile) -> Result<KEstimate> {
    if phi.arity() != model.m() {
        return Err(input("profile arity differs from model arity"));
    }
    let ladder = cube_ladder(model, phi);
    if ladder.is_empty() {
        return Err(Error::Config("grid too coarse for any resolved cube filtration".into()));
    }
    let mut values = Vec::with_capacity(ladder.len());
    let mut best: Option<(f64, usize, Vec<usize>)> = None;
    for &mp in &ladder {
        let (counts, _) = cube_counts(phi, mp);
        let cv = cube_commutator_values(model, &counts, None);
        let v = phi
            .funcs
            .iter()
            .zip(&cv.per_component)
            .map(|(f, s)| f.evaluate_sorted(s).value)
            .fold(0.0, f64::max);
        values.push((cv.occupied, v));
        if best.as_ref().is_none_or(|b| v < b.0) {
            best = Some((v, mp, counts));
        }
    }
    let (value, m_param, counts) = best.unwrap();
    Ok(KEstimate {
        value,
        witness: Witness::Cubes { m_param, counts },
        filtration_values: values,
        method: "upper estimate: spectral-cube filtration".into(),
        descent_steps: 0,
    })
}

/// Subgradient of a norming function at a non-increasing sequence `s`.
fn subgradient(f: &NormingFunction, s: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; s.len()];
    if s.is_empty() || s[0] == 0.0 {
        return g;
    }
    match f.weights() {
        None => {
            let NormingFunction::Schatten { p } = *f else { unreachable!() };
            if p.is_infinite() {
                g[0] = 1.0;
            } else if p == 1.0 {
                for (gi, &si) in g.iter_mut().zip(s) {
                    if si > linalg::RANK_CUTOFF * s[0] {
                        *gi = 1.0;
                    }
                }
            } else {
                let v = f.evaluate_sorted(s).value;
                for (gi, &si) in g.iter_mut().zip(s) {
                    *gi = (si / v).powf(p - 1.0);
                }
            }
        }
        Some((seq, false)) => {
            for (i, gi) in g.iter_mut().enumerate() {
                *gi = seq.term(i + 1);
            }
        }
        Some((seq, true)) => {
            let n = f.evaluate_sorted(s).argmax.unwrap_or(1);
            let den: f64 = seq.prefix(n).iter().sum();
            for gi in g.iter_mut().take(n) {
                *gi = 1.0 / den;
            }
        }
    }
    g
}

/// Value and a hermitian descent direction (unit Frobenius norm) of `A ↦ |[τ, A]|_φ`.
fn value_and_direction(tau: &OperatorTuple, phi: &HybridProfile, a: &CMat) -> Result<(f64, Option<CMat>)> {
    let mut best = (-1.0, 0usize);
    let mut svds = Vec::with_capacity(tau.arity());
    for (j, (t, f)) in tau.mats().iter().zip(&phi.funcs).enumerate() {
        let sv = linalg::svd(&commutator_one(t, a))?;
        let v = f.evaluate_sorted(&sv.s).value;
        if v > best.0 {
            best = (v, j);
        }
        svds.push(sv);
    }
    let j = best.1;
    let sv = &svds[j];
    let g = subgradient(&phi.funcs[j], &sv.s);
    let mut ug = sv.u.clone();
    for c in 0..g.len() {
        for r in 0..ug.nrows() {
            ug[(r, c)] *= g[c];
        }
    }
    let gm = &ug * sv.v.adjoint();
    let t = tau.component(j);
    let z = t.adjoint() * &gm - &gm * t.adjoint();
    let dir = linalg::hermitian_part(&z);
    let n = linalg::frobenius(&dir);
    Ok((best.0, if n > 0.0 { Some(linalg::scaled(&dir, 1.0 / n)) } else { None }))
}

/// Nearest matrix (in the eigenvector sense) with the prescribed non-increasing spectrum.
fn with_spectrum(h: &CMat, spectrum_desc: &[f64]) -> Result<CMat> {
    let (_, vecs) = linalg::eigh(&linalg::hermitian_part(h))?;
    let d = h.nrows();
    Ok(CMat::from_fn(d, d, |i, k| {
        let mut s = c64::new(0.0, 0.0);
        for (r, &lam) in spectrum_desc.iter().enumerate() {
            if lam != 0.0 {
                let c = d - 1 - r;
                s += vecs[(i, c)] * vecs[(k, c)].conj() * lam;
            }
        }
        s
    }))
}

/// Projected descent that keeps the (clipped) spectrum of the starting contraction.
fn refine_from(tau: &OperatorTuple, phi: &HybridProfile, start: CMat, mut base: KEstimate, opts: &KOptions) -> Result<KEstimate> {
    let mut spectrum: Vec<f64> = linalg::eigvalsh(&linalg::hermitian_part(&start))?.into_iter().map(|v| v.clamp(0.0, 1.0)).collect();
    spectrum.reverse();
    let mut a = with_spectrum(&start, &spectrum)?;
    let (mut f, mut dir) = value_and_direction(tau, phi, &a)?;
    let mut eta = opts.initial_step;
    let mut steps = 0;
    while steps < opts.max_steps {
        let Some(dvec) = dir.take() else { break };
        let mut accepted = None;
        let mut step = eta;
        for _ in 0..opts.max_halvings {
            let trial = with_spectrum(&(&a - linalg::scaled(&dvec, step)), &spectrum)?;
            let (ft, dt) = value_and_direction(tau, phi, &trial)?;
            if ft < f {
                accepted = Some((trial, ft, dt, step));
                break;
            }
            step *= 0.5;
        }
        let Some((trial, ft, dt, used)) = accepted else { break };
        steps += 1;
        let improvement = (f - ft) / f.max(f64::MIN_POSITIVE);
        a = trial;
        f = ft;
        dir = dt;
        eta = (4.0 * used).min(opts.initial_step);
        if improvement < opts.rel_tol || f == 0.0 {
            break;
        }
    }
    if f < base.value {
        base.value = f;
        base.witness = Witness::Dense(a);
        base.method = format!("{} + projected descent", base.method);
    }
    base.descent_steps = steps;
    Ok(base)
}

/// Trace-duality lower certificate.
#[derive(Clone, Debug)]
pub struct LowerCertificate {
    pub chi: Vec<CMat>,
    /// `Tr Σ_j [τ(j), χ(j)]` in finite dimension.
    pub raw_trace: c64,
    /// `|raw_trace + trace_correction|`.
    pub corrected: f64,
    pub functional_value: f64,
    /// `Σ_j |χ(j)|_{φ*(j)}` (full norm, which only weakens the certificate).
    pub normalizer: f64,
}

pub fn lower_certificate(tau: &OperatorTuple, phi: &HybridProfile, chi: &[CMat], trace_correction: f64) -> Result<LowerCertificate> {
    check_arity(tau, phi)?;
    if chi.len() != tau.arity() {
        return Err(input("one chi component per tuple component is required"));
    }
    let d = tau.dim();
    if chi.iter().any(|c| c.nrows() != d || c.ncols() != d) {
        return Err(input("chi dimensions differ from the tuple dimension"));
    }
    let dual = phi.conjugate()?;
    let mut raw = c64::new(0.0, 0.0);
    let mut normalizer = 0.0;
    for ((t, c), f) in tau.mats().iter().zip(chi).zip(&dual.funcs) {
        for i in 0..d {
            for k in 0..d {
                raw += t[(i, k)] * c[(k, i)] - c[(i, k)] * t[(k, i)];
            }
        }
        normalizer += crate::norms::op_norm(f, c)?;
    }
    if !(normalizer > 0.0) {
        return Err(input("certificate normalizer vanishes"));
    }
    let corrected = (raw + c64::new(trace_correction, 0.0)).norm();
    Ok(LowerCertificate { chi: chi.to_vec(), raw_trace: raw, corrected, functional_value: corrected / normalizer, normalizer })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvarianceReport {
    /// `|k(τ+σ) − k(τ)|` against `2 |σ|_φ`.
    pub lipschitz: CheckOutcome,
    /// `k(τ⊕τ)` against the sandwich `[k(τ), 2 k(τ)]`; `measured` is `k(τ⊕τ)`, `bound` the upper end.
    pub sandwich: CheckOutcome,
    pub sandwich_lower: f64,
    /// Largest change of a filtration value under the shift, against `1e-12`.
    pub shift: CheckOutcome,
}

pub fn invariance_suite(tau: &OperatorTuple, phi: &HybridProfile, sigma: &OperatorTuple, c: &[c64]) -> Result<InvarianceReport> {
    check_arity(tau, phi)?;
    if 2 * tau.dim() > MAX_DENSE_DIM {
        return Err(Error::Config("tuple too large for the dense invariance suite".into()));
    }
    let cands = default_candidates(tau, phi)?;
    if cands.is_empty() {
        return Err(Error::Config("no filtration candidates available".into()));
    }
    let base = estimate_k(tau, phi, &cands, false)?;

    let perturbed = estimate_k(&tau.add(sigma)?, phi, &cands, false)?;
    let lip_bound = 2.0 * hybrid_norm(phi, sigma)?;
    let lip = (perturbed.value - base.value).abs();
    let lipschitz = CheckOutcome { measured: lip, bound: lip_bound, pass: lip <= lip_bound + 1e-12 * base.value.max(1.0) };

    let sum = direct_sum(tau, tau)?;
    let pairs: Vec<CMat> = cands.iter().map(|a| crate::tuples::block_diag(a, a)).collect();
    let joint = estimate_k(&sum, phi, &pairs, false)?;
    let slack = 1e-12 * base.value.max(1.0);
    let sandwich = CheckOutcome {
        measured: joint.value,
        bound: 2.0 * base.value,
        pass: joint.value >= base.value - slack && joint.value <= 2.0 * base.value + slack,
    };

    let shifted = estimate_k(&shift(tau, c)?, phi, &cands, false)?;
    let diff = base
        .filtration_values
        .iter()
        .zip(&shifted.filtration_values)
        .map(|(x, y)| (x.1 - y.1).abs())
        .fold(0.0, f64::max);
    let shift = CheckOutcome { measured: diff, bound: 1e-12, pass: diff < 1e-12 };
    Ok(InvarianceReport { lipschitz, sandwich, sandwich_lower: base.value, shift })
}

/// Ratio of the positive-contraction estimate to `liminf_m |[τ, A_m]|_φ` along a supplied
/// hermitian sequence (the liminf is approximated by the minimum over the final half).
pub fn hermitian_sequence_ratio(tau: &OperatorTuple, phi: &HybridProfile, seq: &[CMat]) -> Result<(f64, f64, f64)> {
    if seq.is_empty() {
        return Err(input("hermitian sequence is empty"));
    }
    let est = estimate_k(tau, phi, &[], false)?.value;
    let mut tail = f64::INFINITY;
    for a in &seq[seq.len() / 2..] {
        if !linalg::is_hermitian(a, CANDIDATE_TOL) {
            return Err(input("sequence element is not hermitian"));
        }
        tail = tail.min(commutator_value(tau, phi, a)?);
    }
    Ok((est, tail, if tail > 0.0 { est / tail } else { f64::INFINITY }))
}
