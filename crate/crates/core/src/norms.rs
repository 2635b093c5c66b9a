//! Symmetric norming functions on finite sequences and the unitarily invariant
//! matrix norms they induce.

use serde::{Deserialize, Serialize};

use crate::error::{input, param, Error, Result};
use crate::linalg::{self, CMat};

/// Truncation used by [`sigma_property_test`] for the supremum over `k`.
pub const SIGMA_TRUNCATION: usize = 10_000;

/// A positive non-increasing weight sequence `π_1 ≥ π_2 ≥ … > 0`, generated on demand.
///
/// All variants have `π_1 = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceGen {
    /// `π_j = j^{-exponent}`, with `0 ≤ exponent ≤ 1`.
    Power { exponent: f64 },
    /// `π_j = j^{-exponent} (1 + ln j)^{-log_exponent}`.
    LogPower { exponent: f64, log_exponent: f64 },
    /// `π_j = 1`. The induced ideal is the trace class; kept because weight sequences
    /// that do not tend to zero are legitimate inputs.
    Constant,
}

impl SequenceGen {
    pub fn power(exponent: f64) -> Result<Self> {
        let s = SequenceGen::Power { exponent };
        s.validate()?;
        Ok(s)
    }

    /// Checks positivity, monotonicity and divergence of `Σ π_j`.
    ///
    /// Divergence is decided from the parameters; on a materialized prefix only
    /// positivity and monotonicity can actually be observed.
    pub fn validate(&self) -> Result<()> {
        match *self {
            SequenceGen::Power { exponent } => {
                if !(0.0..=1.0).contains(&exponent) {
                    return Err(param(format!("power weight exponent {exponent} outside [0, 1]")));
                }
            }
            SequenceGen::LogPower { exponent, log_exponent } => {
                if !(0.0..=1.0).contains(&exponent) || !log_exponent.is_finite() || log_exponent < 0.0 {
                    return Err(param(format!(
                        "log-power weights need exponent in [0, 1] and log exponent >= 0, got ({exponent}, {log_exponent})"
                    )));
                }
                if exponent == 1.0 && log_exponent > 1.0 {
                    return Err(param("log-power weights with exponent 1 and log exponent > 1 are summable"));
                }
            }
            SequenceGen::Constant => {}
        }
        Ok(())
    }

    /// The term `π_j` for `j ≥ 1`.
    pub fn term(&self, j: usize) -> f64 {
        debug_assert!(j >= 1);
        let x = j as f64;
        match *self {
            SequenceGen::Power { exponent } => x.powf(-exponent),
            SequenceGen::LogPower { exponent, log_exponent } => x.powf(-exponent) * (1.0 + x.ln()).powf(-log_exponent),
            SequenceGen::Constant => 1.0,
        }
    }

    /// `(π_1, …, π_n)`.
    pub fn prefix(&self, n: usize) -> Vec<f64> {
        (1..=n).map(|j| self.term(j)).collect()
    }

    /// Checks positivity and monotonicity on the first `n` terms.
    pub fn check_prefix(&self, n: usize) -> Result<()> {
        let p = self.prefix(n);
        if p.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(param("weight sequence has a non-positive term"));
        }
        if p.windows(2).any(|w| w[1] > w[0] * (1.0 + 1e-15)) {
            return Err(param("weight sequence is not non-increasing"));
        }
        Ok(())
    }
}

/// A symmetric norming function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormingFunction {
    /// `(Σ ξ_j^p)^{1/p}`, `1 ≤ p ≤ ∞`.
    Schatten { p: f64 },
    /// `Σ j^{-1+1/p} ξ*_j`, `1 < p ≤ ∞`.
    LorentzMinus { p: f64 },
    /// `sup_n Σ_{j≤n} ξ*_j / Σ_{j≤n} j^{-1/p}`, `1 ≤ p < ∞`.
    LorentzPlus { p: f64 },
    /// `Σ π_j ξ*_j`.
    Pi { seq: SequenceGen },
    /// `sup_n Σ_{j≤n} ξ*_j / Σ_{j≤n} π_j`.
    PiStar { seq: SequenceGen },
}

/// Result of a detailed evaluation: for ratio-supremum kinds, `argmax` is the
/// (1-based) prefix length achieving the supremum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub argmax: Option<usize>,
}

impl NormingFunction {
    pub fn schatten(p: f64) -> Result<Self> {
        let f = NormingFunction::Schatten { p };
        f.validate()?;
        Ok(f)
    }

    pub fn lorentz_minus(p: f64) -> Result<Self> {
        let f = NormingFunction::LorentzMinus { p };
        f.validate()?;
        Ok(f)
    }

    pub fn lorentz_plus(p: f64) -> Result<Self> {
        let f = NormingFunction::LorentzPlus { p };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            NormingFunction::Schatten { p } => {
                if p.is_nan() || *p < 1.0 {
                    return Err(param(format!("Schatten exponent must be >= 1, got {p}")));
                }
            }
            NormingFunction::LorentzMinus { p } => {
                if p.is_nan() || *p <= 1.0 {
                    return Err(param(format!("LorentzMinus exponent must be > 1, got {p}")));
                }
            }
            NormingFunction::LorentzPlus { p } => {
                if !p.is_finite() || *p < 1.0 {
                    return Err(param(format!("LorentzPlus exponent must be finite and >= 1, got {p}")));
                }
            }
            NormingFunction::Pi { seq } | NormingFunction::PiStar { seq } => seq.validate()?,
        }
        Ok(())
    }

    /// The weight sequence of the sum/ratio kinds, expressed uniformly.
    pub(crate) fn weights(&self) -> Option<(SequenceGen, bool)> {
        match self {
            NormingFunction::Schatten { .. } => None,
            NormingFunction::LorentzMinus { p } => Some((SequenceGen::Power { exponent: 1.0 - 1.0 / p }, false)),
            NormingFunction::LorentzPlus { p } => Some((SequenceGen::Power { exponent: 1.0 / p }, true)),
            NormingFunction::Pi { seq } => Some((seq.clone(), false)),
            NormingFunction::PiStar { seq } => Some((seq.clone(), true)),
        }
    }

    pub fn evaluate(&self, xi: &[f64]) -> Result<f64> {
        Ok(self.evaluate_detailed(xi)?.value)
    }

    pub fn evaluate_detailed(&self, xi: &[f64]) -> Result<Evaluation> {
        self.validate()?;
        if xi.iter().any(|v| !v.is_finite()) {
            return Err(input("sequence has non-finite entries"));
        }
        let mut s: Vec<f64> = xi.iter().map(|v| v.abs()).collect();
        s.sort_by(|a, b| b.total_cmp(a));
        Ok(self.evaluate_sorted(&s))
    }

    /// Evaluation on an already non-increasing, non-negative sequence.
    pub fn evaluate_sorted(&self, s: &[f64]) -> Evaluation {
        if s.is_empty() {
            return Evaluation { value: 0.0, argmax: None };
        }
        match self.weights() {
            None => {
                let p = match self {
                    NormingFunction::Schatten { p } => *p,
                    _ => unreachable!(),
                };
                Evaluation { value: schatten_sorted(s, p), argmax: None }
            }
            Some((seq, false)) => {
                let v = s.iter().enumerate().map(|(j, x)| seq.term(j + 1) * x).sum();
                Evaluation { value: v, argmax: None }
            }
            Some((seq, true)) => {
                let mut num = 0.0;
                let mut den = 0.0;
                let mut best = 0.0;
                let mut arg = 1;
                for (j, x) in s.iter().enumerate() {
                    num += x;
                    den += seq.term(j + 1);
                    let r = num / den;
                    if r > best {
                        best = r;
                        arg = j + 1;
                    }
                }
                Evaluation { value: best, argmax: Some(arg) }
            }
        }
    }

    /// The dual norming function for the trace pairing.
    pub fn conjugate(&self) -> Result<Self> {
        self.validate()?;
        Ok(match self {
            NormingFunction::Schatten { p } => NormingFunction::Schatten { p: conjugate_exponent(*p) },
            NormingFunction::LorentzMinus { p } => NormingFunction::LorentzPlus { p: conjugate_exponent(*p) },
            NormingFunction::LorentzPlus { p } => NormingFunction::LorentzMinus { p: conjugate_exponent(*p) },
            NormingFunction::Pi { seq } => NormingFunction::PiStar { seq: seq.clone() },
            NormingFunction::PiStar { seq } => NormingFunction::Pi { seq: seq.clone() },
        })
    }

    /// Short human-readable label, e.g. `LorentzMinus(2)`.
    pub fn label(&self) -> String {
        match self {
            NormingFunction::Schatten { p } => format!("Schatten({p})"),
            NormingFunction::LorentzMinus { p } => format!("LorentzMinus({p})"),
            NormingFunction::LorentzPlus { p } => format!("LorentzPlus({p})"),
            NormingFunction::Pi { seq } => format!("Pi({seq:?})"),
            NormingFunction::PiStar { seq } => format!("PiStar({seq:?})"),
        }
    }

    /// `Φ(1, …, 1)` with `m` ones.
    pub fn on_ones(&self, m: usize) -> f64 {
        self.evaluate_sorted(&vec![1.0; m]).value
    }
}

/// `q` with `1/p + 1/q = 1`, mapping 1 and ∞ to each other.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

fn schatten_sorted(s: &[f64], p: f64) -> f64 {
    let top = s[0];
    if top == 0.0 {
        return 0.0;
    }
    if p.is_infinite() {
        return top;
    }
    if p == 1.0 {
        return s.iter().sum();
    }
    let acc: f64 = s.iter().map(|x| (x / top).powf(p)).sum();
    top * acc.powf(1.0 / p)
}

/// Φ evaluated on the singular values of `t`.
pub fn op_norm(phi: &NormingFunction, t: &CMat) -> Result<f64> {
    phi.validate()?;
    let s = linalg::singular_values(t)?;
    Ok(phi.evaluate_sorted(&s).value)
}

/// A non-increasing, non-negative finite sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularValues(Vec<f64>);

impl SingularValues {
    pub fn new(mut v: Vec<f64>) -> Result<Self> {
        if v.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(input("singular values must be finite and non-negative"));
        }
        v.sort_by(|a, b| b.total_cmp(a));
        Ok(SingularValues(v))
    }

    pub fn of(t: &CMat) -> Result<Self> {
        Ok(SingularValues(linalg::singular_values(t)?))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn rank(&self) -> usize {
        linalg::numerical_rank(&self.0)
    }
}

/// Power-law fit of a singular-value sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayFit {
    pub slope: f64,
    /// `max_{n in window} s_n n^{1/q}`.
    pub constant: f64,
    /// The 1-based inclusive window actually used.
    pub window: (usize, usize),
    pub shrunk: bool,
}

/// Least-squares slope of `ln s_n` against `ln n` over a 1-based inclusive window.
pub fn decay_diagnostic(s: &SingularValues, q: f64, window: (usize, usize)) -> Result<DecayFit> {
    if !(q > 1.0) {
        return Err(param(format!("decay exponent q must exceed 1, got {q}")));
    }
    let (lo, hi) = window;
    if lo < 1 || hi < lo {
        return Err(input(format!("invalid fit window [{lo}, {hi}]")));
    }
    if hi > s.len() {
        return Err(input(format!("fit window end {hi} exceeds sequence length {}", s.len())));
    }
    if hi - lo + 1 < 16 {
        return Err(input("fit window must contain at least 16 entries"));
    }
    let v = s.as_slice();
    let floor = linalg::RANK_CUTOFF * v[0];
    let mut end = hi;
    while end >= lo && v[end - 1] <= floor {
        end -= 1;
    }
    if end < lo + 1 {
        return Err(Error::Degenerate("no positive singular values in the fit window".into()));
    }
    let pts: Vec<(f64, f64)> = (lo..=end).map(|n| ((n as f64).ln(), v[n - 1].ln())).collect();
    let slope = least_squares_slope(&pts);
    let constant = (lo..=end).map(|n| v[n - 1] * (n as f64).powf(1.0 / q)).fold(0.0, f64::max);
    Ok(DecayFit { slope, constant, window: (lo, end), shrunk: end != hi })
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Outcome of [`sigma_property_test`].
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaReport {
    /// The supremum over `k` is taken over `1 ≤ k ≤ truncation`.
    pub truncation: usize,
    /// `(m, sup_k π_k / (m π_{km}))` for `m = 1..=m_max`.
    pub ratios: Vec<(usize, f64)>,
    /// Log-log slope of the ratio sequence in `m`.
    pub slope: f64,
    /// True when the ratios decay: slope at most -0.05 and a final value below the first.
    pub decays: bool,
}

pub fn sigma_property_test(seq: &SequenceGen, m_max: usize) -> Result<SigmaReport> {
    sigma_property_test_with(seq, m_max, SIGMA_TRUNCATION)
}

pub fn sigma_property_test_with(seq: &SequenceGen, m_max: usize, truncation: usize) -> Result<SigmaReport> {
    seq.validate()?;
    if m_max < 2 || truncation < 1 {
        return Err(input("sigma property test needs m_max >= 2 and a positive truncation"));
    }
    let ratios: Vec<(usize, f64)> = (1..=m_max)
        .map(|m| {
            let r = (1..=truncation)
                .map(|k| seq.term(k) / (m as f64 * seq.term(k * m)))
                .fold(0.0, f64::max);
            (m, r)
        })
        .collect();
    let pts: Vec<(f64, f64)> = ratios.iter().map(|&(m, r)| ((m as f64).ln(), r.ln())).collect();
    let slope = least_squares_slope(&pts);
    let decays = slope <= -0.05 && ratios[m_max - 1].1 < ratios[0].1 - 1e-12;
    Ok(SigmaReport { truncation, ratios, slope, decays })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn schatten_two_on_three_four() {
        assert_relative_eq!(NormingFunction::schatten(2.0).unwrap().evaluate(&[3.0, 4.0]).unwrap(), 5.0, epsilon = 1e-15);
    }

    #[test]
    fn lorentz_minus_on_ones_is_partial_sum() {
        for p in [1.5, 2.0, 4.0] {
            let f = NormingFunction::lorentz_minus(p).unwrap();
            for m in [1usize, 2, 7, 40] {
                let oracle: f64 = (1..=m).map(|j| (j as f64).powf(-1.0 + 1.0 / p)).sum();
                assert_relative_eq!(f.on_ones(m), oracle, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn pi_star_on_ones_sits_at_full_length() {
        let seq = SequenceGen::power(0.5).unwrap();
        let f = NormingFunction::PiStar { seq: seq.clone() };
        for m in [1usize, 3, 50] {
            let e = f.evaluate_detailed(&vec![1.0; m]).unwrap();
            let den: f64 = seq.prefix(m).iter().sum();
            assert_relative_eq!(e.value, m as f64 / den, max_relative = 1e-14);
            assert_eq!(e.argmax, Some(m));
        }
    }

    #[test]
    fn empty_sequence_is_zero() {
        for f in [
            NormingFunction::Schatten { p: 3.0 },
            NormingFunction::LorentzMinus { p: 2.0 },
            NormingFunction::LorentzPlus { p: 2.0 },
        ] {
            assert_eq!(f.evaluate(&[]).unwrap(), 0.0);
        }
    }

    #[test]
    fn invalid_exponents_rejected() {
        assert!(matches!(NormingFunction::schatten(0.5), Err(Error::Parameter(_))));
        assert!(matches!(NormingFunction::lorentz_minus(1.0), Err(Error::Parameter(_))));
        assert!(matches!(NormingFunction::lorentz_plus(f64::INFINITY), Err(Error::Parameter(_))));
        assert!(matches!(NormingFunction::Schatten { p: 0.2 }.evaluate(&[1.0]), Err(Error::Parameter(_))));
        assert!(SequenceGen::power(1.5).is_err());
    }

    #[test]
    fn conjugates() {
        assert_eq!(
            NormingFunction::LorentzMinus { p: 3.0 }.conjugate().unwrap(),
            NormingFunction::LorentzPlus { p: 1.5 }
        );
        assert_eq!(NormingFunction::Schatten { p: 2.0 }.conjugate().unwrap(), NormingFunction::Schatten { p: 2.0 });
        assert_eq!(
            NormingFunction::Schatten { p: 1.0 }.conjugate().unwrap(),
            NormingFunction::Schatten { p: f64::INFINITY }
        );
        assert_eq!(
            NormingFunction::LorentzMinus { p: f64::INFINITY }.conjugate().unwrap(),
            NormingFunction::LorentzPlus { p: 1.0 }
        );
    }

    #[test]
    fn op_norm_examples() {
        let id = linalg::identity(3);
        assert_relative_eq!(op_norm(&NormingFunction::Schatten { p: 1.0 }, &id).unwrap(), 3.0, epsilon = 1e-13);
        let mut bad = linalg::identity(2);
        bad[(1, 1)] = faer::c64::new(f64::INFINITY, 0.0);
        assert!(matches!(op_norm(&NormingFunction::Schatten { p: 2.0 }, &bad), Err(Error::Input(_))));
    }

    #[test]
    fn decay_of_exact_power_law() {
        let s = SingularValues::new((1..=64).map(|n| (n as f64).powf(-0.5)).collect()).unwrap();
        let fit = decay_diagnostic(&s, 2.0, (1, 64)).unwrap();
        assert_relative_eq!(fit.slope, -0.5, epsilon = 1e-12);
        assert_relative_eq!(fit.constant, 1.0, epsilon = 1e-12);
        assert!(!fit.shrunk);
    }

    #[test]
    fn decay_window_shrinks_over_zeros() {
        let mut v: Vec<f64> = (1..=40).map(|n| (n as f64).powf(-0.5)).collect();
        v.extend(std::iter::repeat_n(0.0, 20));
        let s = SingularValues::new(v).unwrap();
        let fit = decay_diagnostic(&s, 2.0, (1, 60)).unwrap();
        assert!(fit.shrunk);
        assert_eq!(fit.window, (1, 40));
        assert!(decay_diagnostic(&s, 2.0, (1, 10)).is_err());
    }

    #[test]
    fn sigma_property_examples() {
        let r = sigma_property_test(&SequenceGen::power(0.5).unwrap(), 16).unwrap();
        for &(m, v) in &r.ratios {
            assert_relative_eq!(v, (m as f64).powf(-0.5), max_relative = 1e-12);
        }
        assert!(r.decays);
        let r = sigma_property_test(&SequenceGen::power(1.0).unwrap(), 16).unwrap();
        assert!(r.ratios.iter().all(|&(_, v)| (v - 1.0).abs() < 1e-12));
        assert!(!r.decays);
        let r = sigma_property_test(&SequenceGen::power(0.75).unwrap(), 16).unwrap();
        assert!(r.ratios.iter().all(|&(m, v)| (v - (m as f64).powf(-0.25)).abs() < 1e-12));
        assert!(r.decays);
    }
}
