//! Ionic and motional reductions of a joint state and the information
//! measures built from them.
//!
//! All logarithms are natural. `0 ln 0` is taken as 0, and a ratio term with
//! a vanishing numerator contributes nothing regardless of its denominator.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::error::{Error, Result};
use crate::model::JointState;

/// Coherences smaller than this are treated as exactly zero in the
/// logarithmic terms.
pub const COHERENCE_FLOOR: f64 = 1e-15;
/// Eigenvalues below this are dropped from `-sum lambda ln lambda`.
pub const EIGENVALUE_FLOOR: f64 = 1e-14;
/// Most negative eigenvalue accepted as rounding noise.
pub const NEGATIVITY_TOLERANCE: f64 = 1e-10;

/// Reduced 2x2 ionic density matrix
/// `[[pg, c_ge], [c_ge*, pe]]` in the `{g, e}` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IonState2x2 {
    pub pg: f64,
    pub pe: f64,
    pub c_ge: C64,
}

impl IonState2x2 {
    pub fn new(pg: f64, pe: f64, c_ge: C64) -> Self {
        Self { pg, pe, c_ge }
    }

    /// Diagonal state with no coherence.
    pub fn populations(pg: f64, pe: f64) -> Self {
        Self::new(pg, pe, C64::new(0.0, 0.0))
    }

    pub fn c_eg(&self) -> C64 {
        self.c_ge.conj()
    }

    pub fn determinant(&self) -> f64 {
        self.pg * self.pe - self.c_ge.norm_sqr()
    }

    /// Eigenvalues `(lambda_-, lambda_+)`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let trace = self.pg + self.pe;
        let split = ((self.pg - self.pe).powi(2) + 4.0 * self.c_ge.norm_sqr()).sqrt();
        (0.5 * (trace - split), 0.5 * (trace + split))
    }
}

fn x_ln_x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Traces out the motion. The result is renormalized to unit trace.
pub fn reduce_ion(psi: &JointState) -> IonState2x2 {
    let pg: f64 = psi.ground().iter().map(|a| a.norm_sqr()).sum();
    let pe: f64 = psi.excited().iter().map(|a| a.norm_sqr()).sum();
    let c_ge: C64 = psi
        .ground()
        .iter()
        .zip(psi.excited())
        .map(|(g, e)| g.conj() * e)
        .sum();
    let trace = pg + pe;
    IonState2x2::new(pg / trace, pe / trace, c_ge / trace)
}

/// Traces out the ion: `rho[m, n] = g_m g_n* + e_m e_n*`.
pub fn reduce_motion(psi: &JointState) -> DMatrix<C64> {
    let (g, e) = (psi.ground(), psi.excited());
    DMatrix::from_fn(psi.levels(), psi.levels(), |m, n| {
        g[m] * g[n].conj() + e[m] * e[n].conj()
    })
}

/// `Pg - Pe`.
pub fn inversion(ion: &IonState2x2) -> f64 {
    ion.pg - ion.pe
}

/// `-[Pg ln Pg + Pe ln Pe + 2 Re(C ln C*)]`.
///
/// This is not the von Neumann entropy once coherences are present (a pure
/// equal superposition gives `2 ln 2`); see [`entropy_vn`] for that.
pub fn entropy_paper(ion: &IonState2x2) -> f64 {
    let coherence = if ion.c_ge.norm() < COHERENCE_FLOOR {
        0.0
    } else {
        2.0 * (ion.c_ge * ion.c_ge.conj().ln()).re
    };
    0.0 - (x_ln_x(ion.pg) + x_ln_x(ion.pe) + coherence)
}

fn entropy_of_spectrum(values: impl IntoIterator<Item = f64>) -> Result<f64> {
    let mut s = 0.0;
    for lambda in values {
        if lambda < -NEGATIVITY_TOLERANCE {
            return Err(Error::InvalidDensity { eigenvalue: lambda });
        }
        if lambda >= EIGENVALUE_FLOOR {
            s -= x_ln_x(lambda);
        }
    }
    Ok(s)
}

/// Von Neumann entropy of the 2x2 ionic density.
pub fn entropy_vn(ion: &IonState2x2) -> Result<f64> {
    let (lo, hi) = ion.eigenvalues();
    entropy_of_spectrum([lo, hi])
}

/// Von Neumann entropy of the motional density, from its full eigendecomposition.
pub fn entropy_vn_motion(rho_cm: &DMatrix<C64>) -> Result<f64> {
    let eig = SymmetricEigen::new(rho_cm.clone());
    entropy_of_spectrum(eig.eigenvalues.iter().copied())
}

/// Which term of a relative entropy has a zero denominator under a nonzero numerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergentTerm {
    Ground,
    Excited,
    Coherence,
}

impl fmt::Display for DivergentTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ground => "ground population",
            Self::Excited => "excited population",
            Self::Coherence => "coherence",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("relative entropy diverges in the {0} term")]
pub struct Divergence(pub DivergentTerm);

fn population_term(p_i: f64, p: f64, which: DivergentTerm) -> std::result::Result<f64, Divergence> {
    if p_i <= 0.0 {
        Ok(0.0)
    } else if p <= 0.0 {
        Err(Divergence(which))
    } else {
        Ok(p_i * (p_i / p).ln())
    }
}

fn coherence_term(c_i: C64, c: C64) -> std::result::Result<f64, Divergence> {
    if c_i.norm() < COHERENCE_FLOOR {
        Ok(0.0)
    } else if c.norm() < COHERENCE_FLOOR {
        Err(Divergence(DivergentTerm::Coherence))
    } else {
        Ok(2.0 * (c_i * (c_i / c).conj().ln()).re)
    }
}

fn population_relative(ion_i: &IonState2x2, ion: &IonState2x2) -> std::result::Result<f64, Divergence> {
    Ok(population_term(ion_i.pg, ion.pg, DivergentTerm::Ground)?
        + population_term(ion_i.pe, ion.pe, DivergentTerm::Excited)?)
}

/// `Pg_i ln(Pg_i/Pg) + Pe_i ln(Pe_i/Pe) + 2 Re[C_i ln(C_i/C)*]`, the relative
/// entropy of a branch reduction against the cat reduction written in
/// populations and coherences.
pub fn relative_entropy_paper(
    ion_i: &IonState2x2,
    ion_cat: &IonState2x2,
) -> std::result::Result<f64, Divergence> {
    Ok(population_relative(ion_i, ion_cat)? + coherence_term(ion_i.c_ge, ion_cat.c_ge)?)
}

/// Quantum mutual entropy with equal weights on the two branches.
pub fn mutual_entropy(
    ion_1: &IonState2x2,
    ion_2: &IonState2x2,
    ion_cat: &IonState2x2,
) -> std::result::Result<f64, Divergence> {
    Ok(0.5 * relative_entropy_paper(ion_1, ion_cat)? + 0.5 * relative_entropy_paper(ion_2, ion_cat)?)
}

/// Population-only part `S(P)` of the mutual entropy.
pub fn population_part(
    ion_1: &IonState2x2,
    ion_2: &IonState2x2,
    ion_cat: &IonState2x2,
) -> std::result::Result<f64, Divergence> {
    Ok(0.5 * population_relative(ion_1, ion_cat)? + 0.5 * population_relative(ion_2, ion_cat)?)
}

/// Coherence part `S(C) = I - S(P)`.
pub fn coherence_part(i_mutual: f64, s_p: f64) -> f64 {
    i_mutual - s_p
}

/// `I`, `S(P)` and `S(C)` at one instant; `None` marks a divergent term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutualEntropy {
    pub i_mutual: Option<f64>,
    pub s_p: Option<f64>,
    pub s_c: Option<f64>,
}

pub fn mutual_decomposition(
    ion_1: &IonState2x2,
    ion_2: &IonState2x2,
    ion_cat: &IonState2x2,
) -> MutualEntropy {
    let i_mutual = mutual_entropy(ion_1, ion_2, ion_cat).ok();
    let s_p = population_part(ion_1, ion_2, ion_cat).ok();
    let s_c = i_mutual.zip(s_p).map(|(i, sp)| coherence_part(i, sp));
    MutualEntropy { i_mutual, s_p, s_c }
}

/// Ion reductions of the ground-product, excited-product and cat evolutions
/// at a common time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchTriple {
    pub ground: IonState2x2,
    pub excited: IonState2x2,
    pub cat: IonState2x2,
}

/// All observables at one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyRecord {
    pub t_rescaled: f64,
    /// Reduction of the state being simulated.
    pub ion: IonState2x2,
    pub inv: f64,
    pub s_paper: f64,
    pub s_vn: f64,
    pub s_vn_motion: f64,
    pub i_mutual: Option<f64>,
    pub s_p: Option<f64>,
    pub s_c: Option<f64>,
    /// Inversions of the ground- and excited-product evolutions, when the
    /// branch triple was supplied.
    pub inv_ground: Option<f64>,
    pub inv_excited: Option<f64>,
}

impl EntropyRecord {
    /// Evaluates every observable of `psi`; the mutual-entropy fields are
    /// filled only when a branch triple is given.
    pub fn evaluate(t_rescaled: f64, psi: &JointState, triple: Option<&BranchTriple>) -> Result<Self> {
        let ion = reduce_ion(psi);
        let mutual = triple.map(|b| mutual_decomposition(&b.ground, &b.excited, &b.cat));
        Ok(Self {
            t_rescaled,
            ion,
            inv: inversion(&ion),
            s_paper: entropy_paper(&ion),
            s_vn: entropy_vn(&ion)?,
            s_vn_motion: entropy_vn_motion(&reduce_motion(psi))?,
            i_mutual: mutual.and_then(|m| m.i_mutual),
            s_p: mutual.and_then(|m| m.s_p),
            s_c: mutual.and_then(|m| m.s_c),
            inv_ground: triple.map(|b| inversion(&b.ground)),
            inv_excited: triple.map(|b| inversion(&b.excited)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{initial_state, InitialKind, SystemParams};
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn binary_kl(p: f64, q: f64) -> f64 {
        let term = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a * (a / b).ln() };
        term(p, q) + term(1.0 - p, 1.0 - q)
    }

    #[test]
    fn reduce_ion_examples() {
        let p = SystemParams::reference(0.004).unwrap();
        let ground = reduce_ion(&initial_state(InitialKind::Ground, &p));
        assert_eq!(ground, IonState2x2::new(1.0, 0.0, c(0.0, 0.0)));

        let cat = reduce_ion(&initial_state(InitialKind::Cat, &p));
        assert!((cat.pg - 0.5).abs() < 1e-15 && (cat.pe - 0.5).abs() < 1e-15);
        assert!((cat.c_ge.re - 2.326851138246043025e-5).abs() < 1e-15);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut g = vec![c(0.0, 0.0); 3];
        let mut e = g.clone();
        g[0] = c(s, 0.0);
        e[0] = c(s, 0.0);
        let ion = reduce_ion(&JointState::from_branches(&g, &e));
        for v in [ion.pg, ion.pe, ion.c_ge.re] {
            assert!((v - 0.5).abs() < 1e-15);
        }

        let excited = reduce_ion(&initial_state(InitialKind::Excited, &p));
        assert_eq!(excited, IonState2x2::new(0.0, 1.0, c(0.0, 0.0)));
    }

    #[test]
    fn motional_reduction() {
        let mut p = SystemParams::reference(0.004).unwrap();
        p.beta = c(0.0, 0.0);
        let rho = reduce_motion(&initial_state(InitialKind::Ground, &p));
        assert_eq!(rho[(0, 0)], c(1.0, 0.0));
        assert_eq!(rho.iter().filter(|x| x.norm() > 0.0).count(), 1);
        assert_eq!(entropy_vn_motion(&rho).unwrap(), 0.0);

        // rank never exceeds the two ion branches
        let p = SystemParams::reference(0.004).unwrap();
        let rho = reduce_motion(&initial_state(InitialKind::Cat, &p));
        assert!((rho.trace().re - 1.0).abs() < 1e-14);
        let eig = SymmetricEigen::new(rho);
        assert!(eig.eigenvalues.iter().filter(|l| l.abs() >= 1e-12).count() <= 2);
    }

    #[test]
    fn mixed_projector_motion_entropy() {
        let mut rho = DMatrix::<C64>::zeros(4, 4);
        rho[(1, 1)] = c(0.5, 0.0);
        rho[(3, 3)] = c(0.5, 0.0);
        assert!((entropy_vn_motion(&rho).unwrap() - LN_2).abs() < 1e-15);
    }

    #[test]
    fn inversion_examples() {
        assert_eq!(inversion(&IonState2x2::populations(1.0, 0.0)), 1.0);
        assert_eq!(inversion(&IonState2x2::populations(0.5, 0.5)), 0.0);
        assert!((inversion(&IonState2x2::populations(0.3, 0.7)) + 0.4).abs() < 1e-15);
    }

    #[test]
    fn closed_form_entropy_examples() {
        assert_eq!(entropy_paper(&IonState2x2::populations(1.0, 0.0)), 0.0);
        assert!((entropy_paper(&IonState2x2::populations(0.5, 0.5)) - LN_2).abs() < 1e-15);
        let pure = IonState2x2::new(0.5, 0.5, c(0.5, 0.0));
        assert!((entropy_paper(&pure) - 2.0 * LN_2).abs() < 1e-15);
    }

    #[test]
    fn von_neumann_examples() {
        assert_eq!(entropy_vn(&IonState2x2::new(0.5, 0.5, c(0.5, 0.0))).unwrap(), 0.0);
        assert!((entropy_vn(&IonState2x2::populations(0.5, 0.5)).unwrap() - LN_2).abs() < 1e-15);
        let s = entropy_vn(&IonState2x2::populations(0.9, 0.1)).unwrap();
        assert!((s - 0.32508297339144823951).abs() < 1e-15);
    }

    #[test]
    fn von_neumann_rejects_negative_spectrum() {
        let bad = IonState2x2::new(0.5, 0.5, c(0.6, 0.0));
        assert!(matches!(entropy_vn(&bad), Err(Error::InvalidDensity { .. })));
        let mut rho = DMatrix::<C64>::zeros(2, 2);
        rho[(0, 0)] = c(1.2, 0.0);
        rho[(1, 1)] = c(-0.2, 0.0);
        assert!(entropy_vn_motion(&rho).is_err());
    }

    #[test]
    fn relative_entropy_examples() {
        let cat = IonState2x2::populations(0.5, 0.5);
        assert_eq!(relative_entropy_paper(&cat, &cat).unwrap(), 0.0);
        let coherent = IonState2x2::new(0.4, 0.6, c(0.1, -0.2));
        assert!(relative_entropy_paper(&coherent, &coherent).unwrap().abs() < 1e-15);
        let g = IonState2x2::populations(1.0, 0.0);
        let e = IonState2x2::populations(0.0, 1.0);
        assert!((relative_entropy_paper(&g, &cat).unwrap() - LN_2).abs() < 1e-15);
        assert!((relative_entropy_paper(&e, &cat).unwrap() - LN_2).abs() < 1e-15);
    }

    #[test]
    fn divergences_are_flagged() {
        let cat = IonState2x2::populations(1.0, 0.0);
        let branch = IonState2x2::populations(0.5, 0.5);
        assert_eq!(
            relative_entropy_paper(&branch, &cat),
            Err(Divergence(DivergentTerm::Excited))
        );
        let coherent = IonState2x2::new(0.5, 0.5, c(0.1, 0.0));
        assert_eq!(
            relative_entropy_paper(&coherent, &IonState2x2::populations(0.5, 0.5)),
            Err(Divergence(DivergentTerm::Coherence))
        );
        // population part stays defined when only the coherence term diverges
        let m = mutual_decomposition(&coherent, &coherent, &IonState2x2::populations(0.5, 0.5));
        assert_eq!(m.i_mutual, None);
        assert_eq!(m.s_p, Some(0.0));
        assert_eq!(m.s_c, None);
    }

    #[test]
    fn mutual_entropy_examples() {
        let g = IonState2x2::populations(1.0, 0.0);
        let e = IonState2x2::populations(0.0, 1.0);
        let cat = IonState2x2::new(0.5, 0.5, c(2.3e-5, 0.0));
        assert!((mutual_entropy(&g, &e, &cat).unwrap() - LN_2).abs() < 1e-15);
        assert!((population_part(&g, &e, &cat).unwrap() - LN_2).abs() < 1e-15);

        let same = IonState2x2::new(0.3, 0.7, c(0.2, 0.1));
        assert!(mutual_entropy(&same, &same, &same).unwrap().abs() < 1e-15);
        assert_eq!(population_part(&same, &same, &same).unwrap(), 0.0);
    }

    #[test]
    fn coherence_part_examples() {
        assert_eq!(coherence_part(LN_2, LN_2), 0.0);
        assert_eq!(coherence_part(0.0, 0.0), 0.0);
    }

    proptest! {
        #[test]
        fn zero_coherence_is_binary_kl(p1 in 0.0f64..=1.0, p2 in 0.0f64..=1.0, pc in 0.01f64..0.99) {
            let a = IonState2x2::populations(p1, 1.0 - p1);
            let b = IonState2x2::populations(p2, 1.0 - p2);
            let cat = IonState2x2::populations(pc, 1.0 - pc);
            let expected = 0.5 * (binary_kl(p1, pc) + binary_kl(p2, pc));
            let i = mutual_entropy(&a, &b, &cat).unwrap();
            prop_assert!((i - expected).abs() <= 1e-12);
            prop_assert_eq!(i, population_part(&a, &b, &cat).unwrap());
        }

        #[test]
        fn population_part_nonnegative(
            p1 in 0.0f64..=1.0, p2 in 0.0f64..=1.0, pc in 0.001f64..0.999,
            re in -0.3f64..0.3, im in -0.3f64..0.3,
        ) {
            let a = IonState2x2::new(p1, 1.0 - p1, c(re, im));
            let b = IonState2x2::new(p2, 1.0 - p2, c(im, re));
            let cat = IonState2x2::new(pc, 1.0 - pc, c(re * 0.5, im));
            prop_assert!(population_part(&a, &b, &cat).unwrap() >= -1e-15);
        }

        #[test]
        fn additivity_is_exact(
            p1 in 0.0f64..=1.0, p2 in 0.0f64..=1.0, pc in 0.001f64..0.999,
            r1 in 0.0f64..0.4, r2 in 0.0f64..0.4, rc in 0.001f64..0.4, ph in -3.0f64..3.0,
        ) {
            let a = IonState2x2::new(p1, 1.0 - p1, C64::from_polar(r1, ph));
            let b = IonState2x2::new(p2, 1.0 - p2, C64::from_polar(r2, -ph));
            let cat = IonState2x2::new(pc, 1.0 - pc, C64::from_polar(rc, 0.3 * ph));
            let m = mutual_decomposition(&a, &b, &cat);
            let (i, sp, sc) = (m.i_mutual.unwrap(), m.s_p.unwrap(), m.s_c.unwrap());
            prop_assert_eq!(i - sp - sc, 0.0);
        }

        #[test]
        fn von_neumann_bounds(pg in 0.0f64..=1.0, r in 0.0f64..=1.0, ph in -3.2f64..3.2) {
            let pe = 1.0 - pg;
            let coh = C64::from_polar(r * (pg * pe).sqrt(), ph);
            let ion = IonState2x2::new(pg, pe, coh);
            let s = entropy_vn(&ion).unwrap();
            prop_assert!((0.0..=LN_2 + 1e-10).contains(&s));
            let det = ion.determinant();
            if det <= 1e-16 {
                prop_assert!(s <= 1e-13);
            }
            if det >= 1e-6 {
                prop_assert!(s >= 1e-6);
            }
        }
    }
}
