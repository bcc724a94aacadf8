//! Deformed-oscillator arithmetic.
//!
//! Uses symmetric q-numbers `[n] = (q^n - q^-n) / (q - q^-1)` with `q = e^tau`,
//! the form for which `A A† - q A† A = q^-N` holds on Fock states, i.e.
//! `[n+1] - q [n] = q^-n`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Below this `|tau|` the q-numbers are taken to be ordinary integers.
pub const CLASSICAL_TAU: f64 = 1e-12;

/// Deformation exponent and Fock-space truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformationParams {
    tau: f64,
    q: f64,
    n_max: usize,
}

impl DeformationParams {
    pub fn new(tau: f64, n_max: usize) -> Result<Self> {
        if !tau.is_finite() {
            return Err(Error::invalid("tau", format!("must be finite, got {tau}")));
        }
        Ok(Self {
            tau,
            q: tau.exp(),
            n_max,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Highest Fock level kept; the truncated space has `n_max + 1` levels.
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn levels(&self) -> usize {
        self.n_max + 1
    }

    fn is_classical(&self) -> bool {
        self.tau.abs() < CLASSICAL_TAU
    }
}

/// The q-number `[n]`.
pub fn q_number(n: usize, p: &DeformationParams) -> f64 {
    if p.is_classical() {
        return n as f64;
    }
    // sinh form is the same ratio without the cancellation in q^n - q^-n
    (n as f64 * p.tau).sinh() / p.tau.sinh()
}

/// `[n]! = [1][2]...[n]`, with `[0]! = 1`.
pub fn q_factorial(n: usize, p: &DeformationParams) -> f64 {
    let f = (1..=n).fold(1.0, |acc, k| acc * q_number(k, p));
    assert!(f.is_finite(), "[{n}]! overflowed at tau = {}", p.tau);
    f
}

/// All of `[0]!, [1]!, ..., [n_max]!`.
pub fn q_factorials(p: &DeformationParams) -> Vec<f64> {
    let mut out = Vec::with_capacity(p.levels());
    let mut acc = 1.0;
    out.push(acc);
    for k in 1..=p.n_max {
        acc *= q_number(k, p);
        out.push(acc);
    }
    assert!(acc.is_finite(), "[{}]! overflowed at tau = {}", p.n_max, p.tau);
    out
}

/// `exp_q(x) = sum_{n <= n_max} x^n / [n]!`, truncated at the Fock cutoff.
pub fn q_exponential(x: f64, p: &DeformationParams) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..=p.n_max {
        term *= x / q_number(n, p);
        sum += term;
    }
    sum
}

/// Fock amplitudes of the q-coherent state `|beta>_q` on the truncated space.
///
/// The normalization uses the same truncated `exp_q(|beta|^2)`, so the
/// returned vector has unit norm.
pub fn coherent_amplitudes(beta: C64, p: &DeformationParams) -> Vec<C64> {
    let mut amps = Vec::with_capacity(p.levels());
    let mut term = C64::new(1.0, 0.0);
    amps.push(term);
    for n in 1..=p.n_max {
        term = term * beta / q_number(n, p).sqrt();
        amps.push(term);
    }
    let norm = q_exponential(beta.norm_sqr(), p).sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    amps
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params(tau: f64, n_max: usize) -> DeformationParams {
        DeformationParams::new(tau, n_max).unwrap()
    }

    #[test]
    fn q_number_examples() {
        assert_eq!(q_number(5, &params(0.0, 32)), 5.0);
        assert_eq!(q_number(0, &params(0.004, 32)), 0.0);
        // 2 cosh(0.004), 40-digit reference
        assert_relative_eq!(
            q_number(2, &params(0.004, 32)),
            2.000016000021333344711114361905,
            max_relative = 1e-15
        );
    }

    #[test]
    fn q_factorial_examples() {
        assert_eq!(q_factorial(0, &params(0.37, 32)), 1.0);
        assert_eq!(q_factorial(3, &params(0.0, 32)), 6.0);
        assert_relative_eq!(
            q_factorial(3, &params(0.1, 32)),
            6.110693700480935366002531864519,
            max_relative = 1e-14
        );
    }

    #[test]
    fn q_exponential_examples() {
        assert_eq!(q_exponential(0.0, &params(0.004, 32)), 1.0);
        assert!((q_exponential(1.0, &params(0.0, 32)) - std::f64::consts::E).abs() < 1e-12);
        assert_relative_eq!(
            q_exponential(16.0, &params(0.004, 32)),
            8843690.738735798066803701976466,
            max_relative = 1e-13
        );
    }

    #[test]
    fn coherent_amplitude_examples() {
        let vac = coherent_amplitudes(C64::new(0.0, 0.0), &params(0.004, 32));
        assert_eq!(vac[0], C64::new(1.0, 0.0));
        assert!(vac[1..].iter().all(|c| *c == C64::new(0.0, 0.0)));

        let c = coherent_amplitudes(C64::new(4.0, 0.0), &params(0.0, 32));
        assert_relative_eq!(
            c[0].norm_sqr(),
            1.125498814592461311484353439671e-7,
            max_relative = 1e-12
        );

        let p = params(0.004, 32);
        let plus = coherent_amplitudes(C64::new(4.0, 0.0), &p);
        let minus = coherent_amplitudes(C64::new(-4.0, 0.0), &p);
        for (n, (a, b)) in plus.iter().zip(&minus).enumerate() {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(*b, *a * sign);
        }
    }

    #[test]
    fn classical_factorials_are_integers() {
        let p = params(0.0, 20);
        let mut fact: u64 = 1;
        for (n, f) in q_factorials(&p).into_iter().enumerate() {
            if n > 0 {
                fact *= n as u64;
            }
            assert_eq!(f.round() as u64, fact);
        }
    }

    #[test]
    fn rejects_non_finite_tau() {
        assert!(DeformationParams::new(f64::NAN, 4).is_err());
        assert!(DeformationParams::new(f64::INFINITY, 4).is_err());
    }

    proptest! {
        #[test]
        fn recursion_matches_commutator(tau in -0.2f64..0.2, n in 0usize..32) {
            let p = params(tau, 32);
            let lhs = q_number(n + 1, &p) - p.q() * q_number(n, &p);
            let rhs = p.q().powi(-(n as i32));
            prop_assert!((lhs - rhs).abs() <= 1e-12 * q_number(n + 1, &p), "{lhs} vs {rhs}");
        }

        #[test]
        fn symmetric_in_tau(tau in -0.5f64..0.5, n in 0usize..40) {
            prop_assert_eq!(q_number(n, &params(tau, 40)), q_number(n, &params(-tau, 40)));
        }

        #[test]
        fn strictly_increasing(tau in -0.5f64..0.5, n in 0usize..40) {
            let p = params(tau, 40);
            prop_assert!(q_number(n + 1, &p) > q_number(n, &p));
        }

        #[test]
        fn coherent_state_is_normalized(
            re in -5.0f64..5.0,
            im in -5.0f64..5.0,
            tau in -0.1f64..0.1,
            n_max in 1usize..40,
        ) {
            let c = coherent_amplitudes(C64::new(re, im), &params(tau, n_max));
            let norm: f64 = c.iter().map(|a| a.norm_sqr()).sum();
            prop_assert!((norm - 1.0).abs() <= 1e-12);
        }
    }
}
