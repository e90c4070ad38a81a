//! Sugawara Virasoro generators and the annihilating operator Ξ(κ, τ).

use crate::algebra::{structure_constants, Basis, Frac};
use crate::grassmann::Grassmann;
use crate::scalar::{Coeff, Scalar};

use super::{AffineModule, Mode, Overflow, PbwVector, RepError};

/// Quadratic terms of the osp(1|2) Sugawara tensor,
/// `½:HH: + :EF: + :FE: + ½(:fe: − :ef:)`, as (coefficient, A, B).
pub fn sugawara_terms() -> [(Frac, Basis, Basis); 5] {
    use Basis::*;
    [
        ((1, 2), H, H),
        ((1, 1), E, F),
        ((1, 1), F, E),
        ((1, 2), OddF, OddE),
        ((-1, 2), OddE, OddF),
    ]
}

/// `L_n v` with `L_n = 1/(2(k+h^∨)) Σ_j Σ :A(n−j)B(j):`.
///
/// The j-sum runs over `|j| ≤ N_rep + |n|`; outside that window every term
/// annihilates vectors of depth at most `N_rep`.
pub fn sugawara<S: Scalar, C: Coeff<Base = S>>(
    module: &AffineModule<S>,
    n: i64,
    v: &PbwVector<C>,
) -> Result<PbwVector<C>, RepError> {
    sugawara_with(module, n, v, Overflow::Error)
}

pub(crate) fn sugawara_with<S: Scalar, C: Coeff<Base = S>>(
    module: &AffineModule<S>,
    n: i64,
    v: &PbwVector<C>,
    overflow: Overflow,
) -> Result<PbwVector<C>, RepError> {
    let consts = structure_constants(module.level())?;
    let pref = (S::from_int(2) * (consts.level.clone() + consts.dual_coxeter.clone()))
        .inv()
        .ok_or(crate::algebra::AlgebraError::CriticalLevel)?;
    if v.is_zero() {
        return Ok(PbwVector::zero());
    }
    let bound = module.max_depth() as i64 + n.abs();
    let vdepth = v.max_depth() as i64;
    let mut acc = PbwVector::zero();
    for j in -bound..=bound {
        let (p, q) = (n - j, j);
        for (c, a, b) in sugawara_terms() {
            let (ma, mb) = (Mode::new(a, p), Mode::new(b, q));
            let (first, second, sign) = if p <= q {
                (mb, ma, 1)
            } else {
                (ma, mb, a.parity().sign_with(b.parity()))
            };
            if first.index > vdepth {
                continue;
            }
            let step = module.act_with(first, v, overflow)?;
            if step.is_zero() {
                continue;
            }
            let out = module.act_with(second, &step, overflow)?;
            let coeff = S::from_frac(c.0 * sign, c.1);
            acc.add_assign(&out.scale(&coeff));
        }
    }
    Ok(acc.scale(&pref))
}

/// `Ξ(κ,τ) v = [−2L₋₂ + (κ/2)L₋₁² + (τ/2)(ΣJ_a(−1)² + η₁η₂·½(f(−1)e(−1) − e(−1)f(−1)))] v`
/// with `ΣJ_a(−1)² = ½H(−1)² + E(−1)F(−1) + F(−1)E(−1)`.
pub fn annihilator_apply<S: Scalar>(
    module: &AffineModule<S>,
    kappa: &S,
    tau: &S,
    v: &PbwVector<Grassmann<S>>,
) -> Result<PbwVector<Grassmann<S>>, RepError> {
    use Basis::*;
    let m1 = |b| Mode::new(b, -1);
    let mut out = sugawara(module, -2, v)?.scale(&S::from_int(-2));
    let l1 = sugawara(module, -1, v)?;
    let l1l1 = sugawara(module, -1, &l1)?;
    out.add_assign(&l1l1.scale(&(kappa.clone() * S::from_frac(1, 2))));

    let mut even = module.act_word(&[m1(H), m1(H)], v)?.scale(&S::from_frac(1, 2));
    even.add_assign(&module.act_word(&[m1(E), m1(F)], v)?);
    even.add_assign(&module.act_word(&[m1(F), m1(E)], v)?);
    let odd = module
        .act_word(&[m1(OddF), m1(OddE)], v)?
        .sub(&module.act_word(&[m1(OddE), m1(OddF)], v)?)
        .scale(&S::from_frac(1, 2))
        .left_mul(&Grassmann::eta12());
    let quad = even.add(&odd).scale(&(tau.clone() * S::from_frac(1, 2)));
    out.add_assign(&quad);
    Ok(out)
}

/// `exp(Σ_j v₋ⱼ L₋ⱼ)|0⟩` truncated at the module depth; `coeffs[j−1] = v₋ⱼ`.
pub fn virasoro_exp_vacuum<S: Scalar, C: Coeff<Base = S>>(
    module: &AffineModule<S>,
    coeffs: &[S],
) -> Result<PbwVector<C>, RepError> {
    virasoro_exp(module, coeffs, &PbwVector::top(C::one()))
}

/// `exp(Σ_j v₋ⱼ L₋ⱼ) v`, dropping components beyond the module depth.
///
/// Exact on the retained components: every `L₋ⱼ` with `j ≥ 1` raises depth
/// by at least one after normal ordering, so the series terminates.
pub fn virasoro_exp<S: Scalar, C: Coeff<Base = S>>(
    module: &AffineModule<S>,
    coeffs: &[S],
    v: &PbwVector<C>,
) -> Result<PbwVector<C>, RepError> {
    let mut result = v.clone();
    let mut term = v.clone();
    for m in 1..=module.max_depth() + 1 {
        let mut next = PbwVector::zero();
        for (j, vj) in coeffs.iter().enumerate() {
            if vj.is_zero() || j + 1 > module.max_depth() {
                continue;
            }
            let l = sugawara_with(module, -(j as i64 + 1), &term, Overflow::Truncate)?;
            next.add_assign(&l.scale(vj));
        }
        term = next.scale(&S::from_frac(1, m as i64));
        if term.is_zero() {
            break;
        }
        result.add_assign(&term);
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Basis::*;
    use crate::affine::{expectation, DualWord};
    use crate::grassmann::berezin;
    use crate::scalar::Exact;

    fn q(n: i64, d: i64) -> Exact {
        Exact::from_frac(n, d)
    }

    fn vac() -> PbwVector<Exact> {
        PbwVector::top(Exact::one())
    }

    #[test]
    fn vacuum_is_translation_invariant() {
        let md = AffineModule::vacuum(q(1, 1), 4);
        assert!(sugawara(&md, 0, &vac()).unwrap().is_zero());
        assert!(sugawara(&md, -1, &vac()).unwrap().is_zero());
        let l = sugawara(&md, -1, &vac()).unwrap();
        assert!(sugawara(&md, 1, &l).unwrap().is_zero());
    }

    #[test]
    fn central_charge_from_l2_lminus2() {
        for k in [q(1, 2), q(1, 1), q(3, 1)] {
            let md = AffineModule::vacuum(k.clone(), 4);
            let l = sugawara(&md, -2, &vac()).unwrap();
            let ll = sugawara(&md, 2, &l).unwrap();
            let c = k.clone() * (k + q(3, 2)).inv().unwrap();
            assert_eq!(ll.top_coeff(), c * q(1, 2));
            assert_eq!(ll.len(), 1);
        }
    }

    #[test]
    fn lminus2_vacuum_is_quadratic_in_currents() {
        let k = q(2, 1);
        let md = AffineModule::vacuum(k.clone(), 4);
        let l = sugawara(&md, -2, &vac()).unwrap();
        let pref = (q(2, 1) * (k + q(3, 2))).inv().unwrap();
        let m1 = |b| Mode::new(b, -1);
        let mut expect = md.act_word(&[m1(H), m1(H)], &vac()).unwrap().scale(&q(1, 2));
        expect.add_assign(&md.act_word(&[m1(E), m1(F)], &vac()).unwrap());
        expect.add_assign(&md.act_word(&[m1(F), m1(E)], &vac()).unwrap());
        let odd = md
            .act_word(&[m1(OddF), m1(OddE)], &vac())
            .unwrap()
            .sub(&md.act_word(&[m1(OddE), m1(OddF)], &vac()).unwrap())
            .scale(&q(1, 2));
        expect.add_assign(&odd);
        assert_eq!(l, expect.scale(&pref));
    }

    #[test]
    fn annihilator_kills_vacuum_at_tuned_tau() {
        let k = q(5, 3);
        let md = AffineModule::vacuum(k.clone(), 4);
        let tau = q(2, 1) * (k + q(3, 2)).inv().unwrap();
        let one = Grassmann::scalar(Exact::one());
        let v = PbwVector::top(one + Grassmann::eta12());
        let out = annihilator_apply(&md, &q(7, 2), &tau, &v).unwrap();
        let projected = out.map(|g| berezin(g));
        assert!(projected.is_zero(), "{projected}");
        // the η-free part is −2L₋₂|0⟩ + (τ/2)ΣJ², nonzero
        assert!(!out.map(|g| g.c1.clone()).is_zero());
    }

    #[test]
    fn annihilator_at_zero_parameters_is_minus_two_lminus2() {
        let md = AffineModule::vacuum(q(1, 1), 4);
        let v = PbwVector::top(Grassmann::scalar(Exact::one()));
        let out = annihilator_apply(&md, &Exact::zero(), &Exact::zero(), &v).unwrap();
        let expect = sugawara(&md, -2, &vac()).unwrap().scale(&q(-2, 1));
        assert_eq!(out.map(|g| g.c1.clone()), expect);
        assert!(!expect.is_zero());
        for (_, g) in out.terms() {
            assert!(g.c_eta1.is_zero() && g.c_eta2.is_zero() && g.c_eta12.is_zero());
        }
    }

    #[test]
    fn grassmann_part_of_annihilator_is_top_component_only() {
        let md = AffineModule::vacuum(q(1, 1), 4);
        let v = PbwVector::top(Grassmann::scalar(Exact::one()));
        let out = annihilator_apply(&md, &q(2, 1), &q(4, 5), &v).unwrap();
        for (_, g) in out.terms() {
            assert!(g.c_eta1.is_zero() && g.c_eta2.is_zero());
        }
        assert!(out.terms().any(|(_, g)| !g.c_eta12.is_zero()));
    }

    #[test]
    fn virasoro_exponential_of_translation_is_trivial() {
        let md = AffineModule::vacuum(q(1, 1), 4);
        let v: PbwVector<Exact> = virasoro_exp_vacuum(&md, &[q(3, 1), Exact::zero()]).unwrap();
        assert_eq!(v, vac());
        let v: PbwVector<Exact> = virasoro_exp_vacuum(&md, &[Exact::zero(), q(1, 3)]).unwrap();
        let w = DualWord::new(vec![Mode::new(H, 1), Mode::new(H, 1)]).unwrap();
        let l = sugawara(&md, -2, &vac()).unwrap();
        assert_eq!(
            expectation(&md, &w, &v).unwrap(),
            expectation(&md, &w, &l).unwrap() * q(1, 3)
        );
    }
}
