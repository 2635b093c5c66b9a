//! Smooth cutoff functions: the dyadic annulus profile in the gauge and the
//! periodized lattice partition of unity.

use super::gauge;

/// Pitch of the localization lattice.
pub const THETA_PITCH: f64 = 0.01;
/// Half-width of the localization bump (sup-norm ball).
pub const BUMP_RADIUS: f64 = 0.1;
/// `φ_0 = 1` on `δ ≤ PHI0_INNER`.
pub const PHI0_INNER: f64 = 0.5;
/// `φ_0 = 0` on `δ ≥ PHI0_OUTER`.
pub const PHI0_OUTER: f64 = 2.0;

fn flat(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

/// `C^∞` step from 0 (at `t ≤ 0`) to 1 (at `t ≥ 1`).
pub fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = flat(t);
        a / (a + flat(1.0 - t))
    }
}

/// Radial profile in the gauge: 1 on `D(0, 1/2)`, 0 outside `D(0, 2)`.
pub fn phi0(p: &[f64], u: &[f64]) -> f64 {
    phi0_of_gauge(gauge(u, p))
}

pub fn phi0_of_gauge(g: f64) -> f64 {
    1.0 - smoothstep((g - PHI0_INNER) / (PHI0_OUTER - PHI0_INNER))
}

/// Dyadic annulus cutoff `φ(u) = φ_0(u) − φ_0(σ(2)u)`, supported in `1/4 ≤ δ(u) ≤ 2`.
pub fn phi(p: &[f64], u: &[f64]) -> f64 {
    phi_of_gauge(gauge(u, p))
}

/// `φ` as a function of `δ(u)`, using `δ(σ(2)u) = 2δ(u)`.
pub fn phi_of_gauge(g: f64) -> f64 {
    phi0_of_gauge(g) - phi0_of_gauge(2.0 * g)
}

/// One-dimensional bump `exp(−1/(1−t²))` on `(−1, 1)`.
pub fn bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

/// One axis of the periodized partition: `β(x/r) / Σ_k β((x − k·pitch)/r)`.
pub fn theta_axis(x: f64) -> f64 {
    let b = bump(x / BUMP_RADIUS);
    if b == 0.0 {
        return 0.0;
    }
    let k0 = (x / THETA_PITCH).round() as i64;
    let reach = (BUMP_RADIUS / THETA_PITCH).ceil() as i64 + 1;
    let mut s = 0.0;
    for k in k0 - reach..=k0 + reach {
        s += bump((x - THETA_PITCH * k as f64) / BUMP_RADIUS);
    }
    b / s
}

/// `θ(x) = Π_j θ_axis(x_j)`; `Σ_{l ∈ Z^m} θ(x − pitch·l) = 1`.
pub fn theta(x: &[f64]) -> f64 {
    x.iter().map(|&v| theta_axis(v)).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothstep_limits_and_symmetry() {
        assert_eq!(smoothstep(-0.1), 0.0);
        assert_eq!(smoothstep(1.5), 1.0);
        for t in [0.1, 0.3, 0.5, 0.77] {
            assert!((smoothstep(t) + smoothstep(1.0 - t) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn phi_support() {
        let p = [2.0, 2.0];
        assert_eq!(phi(&p, &[0.4, 0.1]), 0.0); // δ = 0.16 < 1/4
        assert_eq!(phi(&p, &[1.5, 0.0]), 0.0); // δ = 2.25 > 2
        assert!(phi(&p, &[0.8, 0.0]) > 0.0);
        assert_eq!(phi0(&p, &[0.5, 0.5]), 1.0);
    }

    #[test]
    fn theta_partition_of_unity() {
        for x in [-0.0371, 0.0, 0.00499, 0.123456, 3.3] {
            let s: f64 = (-40..=40).map(|l| theta_axis(x - THETA_PITCH * (l as f64 + (x / THETA_PITCH).round()))).sum();
            assert!((s - 1.0).abs() < 1e-14, "{x}: {s}");
        }
        assert_eq!(theta(&[0.1, 0.0]), 0.0);
        assert!(theta(&[0.05, -0.02]) > 0.0);
    }
}
