use crate::affine::{virasoro_exp_vacuum, AffineModule, Mode, Overflow, PbwVector, RepError};
use crate::algebra::Basis;
use crate::grassmann::Grassmann;
use crate::scalar::{Coeff, Scalar};
use crate::series::{AutSeries, Series, TailSeries};

use super::{FlowState, LoopElement};

/// `Σ X(−j) ⊗ g` applied to `v`, with the Grassmann weight multiplying
/// from the left. Components beyond the module depth are dropped.
pub fn loop_operator<S: Scalar>(
    module: &AffineModule<S>,
    a: &LoopElement<S>,
    v: &PbwVector<Grassmann<S>>,
) -> Result<PbwVector<Grassmann<S>>, RepError> {
    let mut out = PbwVector::zero();
    for (x, j, g) in a.terms() {
        if j > module.max_depth() {
            continue;
        }
        let w = module.act_with(Mode::new(x, -(j as i64)), v, Overflow::Truncate)?;
        out.add_assign(&w.left_mul(g));
    }
    Ok(out)
}

/// `exp(A) v`. Terminates because every term raises depth.
pub fn exp_loop_operator<S: Scalar>(
    module: &AffineModule<S>,
    a: &LoopElement<S>,
    v: &PbwVector<Grassmann<S>>,
) -> Result<PbwVector<Grassmann<S>>, RepError> {
    let mut out = v.clone();
    let mut term = v.clone();
    for m in 1..=module.max_depth() {
        term = loop_operator(module, a, &term)?.scale(&S::from_frac(1, m as i64));
        if term.is_zero() {
            break;
        }
        out.add_assign(&term);
    }
    Ok(out)
}

/// `V(z^p) = −Σ_j v_j p z^{p−j}` for `V = Σ_j v_j ℓ₋ⱼ`, `ℓ₋ⱼ = −z^{1−j}∂_z`.
fn apply_field<S: Scalar>(v: &[S], f: &Series<S>) -> Series<S> {
    let order = f.order();
    let mut out = Series::zero(f.top(), order);
    for p in -(order as i64)..=f.top() {
        let c = f.coeff(p);
        if c.is_zero() || p == 0 {
            continue;
        }
        for (idx, vj) in v.iter().enumerate() {
            let j = idx as i64 + 1;
            let q = p - j;
            if q < -(order as i64) {
                break;
            }
            let term = c.clone() * vj.clone() * S::from_int(-p);
            out = out.add(&monomial(q, term, f.top(), order)).expect("same order");
        }
    }
    out
}

fn monomial<S: Scalar>(p: i64, c: S, top: i64, order: usize) -> Series<S> {
    let mut s = Series::zero(top, order);
    if p < 0 {
        s = s.add(&Series::from(&TailSeries::monomial((-p) as usize, c, order))).expect("same order");
    } else if p == 0 {
        s = s.add(&Series::one(order).scale(&c)).expect("same order");
    } else {
        // only z¹ occurs: the identity map
        debug_assert_eq!(p, 1);
        let id = Series::from(&AutSeries::<S>::identity(order));
        s = s.add(&id.scale(&c)).expect("same order");
    }
    s
}

/// `exp(V)·z` truncated at `z^{−N}`.
fn exp_field_on_z<S: Scalar>(v: &[S], order: usize) -> Series<S> {
    let z = Series::from(&AutSeries::<S>::identity(order));
    let mut out = z.clone();
    let mut term = z;
    for m in 1..=order + 2 {
        term = apply_field(v, &term).scale(&S::from_frac(1, m as i64));
        if term.is_zero() {
            break;
        }
        out = out.add(&term).expect("same order");
    }
    out
}

/// Coefficients `v₋₁ … v₋N` with `exp(Σ v₋ⱼ ℓ₋ⱼ)·z = ρ(z)` through `z^{1−N}`.
///
/// The coefficient of `z^{1−j}` on the left is `−v₋ⱼ` plus a polynomial in
/// `v₋₁ … v₋₍ⱼ₋₁₎`, so the system is solved front to back.
pub fn aut_to_virasoro<S: Scalar>(rho: &AutSeries<S>, n: usize) -> Vec<S> {
    let order = rho.order();
    let mut v = vec![S::zero(); n];
    for j in 1..=n {
        if j - 1 > order {
            break;
        }
        let lhs = exp_field_on_z(&v[..j - 1], order);
        let p = lhs.coeff(1 - j as i64);
        v[j - 1] = p - rho.coeff(j - 1);
    }
    v
}

/// The Berezin-projected state `∫dη₂dη₁ 𝒢|0⟩⊗(1+η₁η₂)` with
/// `𝒢 = e^{η₁L¹}e^{η₂L²}e^{η₁η₂L¹²} e^{E⊗x^E}e^{H⊗x^H}e^{F⊗x^F} Q(ρ)`.
pub fn assemble_state_vector<S: Scalar>(
    s: &FlowState<S>,
    k: &S,
    depth: usize,
) -> Result<PbwVector<S>, RepError> {
    let module = AffineModule::vacuum(k.clone(), depth);
    let full = assemble_graded(&module, s)?;
    Ok(full.map(|g| g.c_eta12.clone()))
}

/// The unprojected `𝒢|0⟩⊗(1+η₁η₂)`.
pub(crate) fn assemble_graded<S: Scalar>(
    module: &AffineModule<S>,
    s: &FlowState<S>,
) -> Result<PbwVector<Grassmann<S>>, RepError> {
    let n = module.max_depth();
    let vir = aut_to_virasoro(&s.rho, n);
    let q: PbwVector<S> = virasoro_exp_vacuum(module, &vir)?;
    let lift = Grassmann::scalar(S::one()) + Grassmann::eta12();
    let mut v = q.map(|c| lift.scale(c));

    let one = Grassmann::scalar(S::one());
    let even = |x: Basis, t: &TailSeries<S>| LoopElement::from_series(x, t.coeffs(), &one);
    for (x, t) in [(Basis::F, &s.x_f), (Basis::H, &s.x_h), (Basis::E, &s.x_e)] {
        if !t.is_zero() {
            v = exp_loop_operator(module, &even(x, t), &v)?;
        }
    }

    let weighted = |pairs: &[(Basis, &TailSeries<S>)], g: Grassmann<S>| {
        let mut out = LoopElement::zero(s.order());
        for (x, t) in pairs {
            out = out.add(&LoopElement::from_series(*x, t.coeffs(), &g));
        }
        out
    };
    let l12 = weighted(
        &[(Basis::E, &s.x12e), (Basis::H, &s.x12h), (Basis::F, &s.x12f)],
        Grassmann::eta12(),
    );
    let l2 = weighted(&[(Basis::OddE, &s.x2e), (Basis::OddF, &s.x2f)], Grassmann::eta2());
    let l1 = weighted(&[(Basis::OddE, &s.x1e), (Basis::OddF, &s.x1f)], Grassmann::eta1());
    for l in [l12, l2, l1] {
        if !l.is_zero() {
            v = exp_loop_operator(module, &l, &v)?;
        }
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::{sugawara, virasoro_exp};
    use crate::scalar::Exact;
    use crate::series::substitute;

    fn q(n: i64, d: i64) -> Exact {
        Exact::from_frac(n, d)
    }

    #[test]
    fn virasoro_coefficients_of_simple_maps() {
        let rho = AutSeries::from_coeffs(vec![q(3, 2), q(0, 1), q(0, 1), q(0, 1)]);
        assert_eq!(aut_to_virasoro(&rho, 3), vec![q(-3, 2), q(0, 1), q(0, 1)]);
        assert!(aut_to_virasoro(&AutSeries::<Exact>::identity(3), 3).iter().all(|v| v.is_zero()));
        let rho = AutSeries::from_coeffs(vec![q(0, 1), q(5, 7), q(0, 1), q(0, 1)]);
        assert_eq!(aut_to_virasoro(&rho, 3), vec![q(0, 1), q(-5, 7), q(0, 1)]);
    }

    #[test]
    fn virasoro_coefficients_reproduce_the_map() {
        let rho = AutSeries::from_coeffs(vec![q(1, 3), q(-2, 5), q(3, 4), q(1, 7), q(-1, 2)]);
        let v = aut_to_virasoro(&rho, 5);
        let back = exp_field_on_z(&v, 4);
        for j in 0..=4 {
            assert_eq!(back.coeff(-(j as i64)), rho.coeff(j), "z^-{j}");
        }
        assert_eq!(back.coeff(1), Exact::one());
    }

    #[test]
    fn identity_state_assembles_to_vacuum() {
        let s = FlowState::<Exact>::initial(4);
        let v = assemble_state_vector(&s, &q(1, 1), 4).unwrap();
        assert_eq!(v, PbwVector::top(Exact::one()));
    }

    #[test]
    fn cartan_exponential() {
        let mut s = FlowState::<Exact>::initial(3);
        let c = q(2, 3);
        s.x_h = TailSeries::monomial(1, c.clone(), 3);
        let v = assemble_state_vector(&s, &q(1, 1), 3).unwrap();
        let h = Mode::new(Basis::H, -1);
        let mut expect = PbwVector::top(Exact::one());
        expect.add_term(vec![h], c.clone());
        expect.add_term(vec![h, h], c.clone() * c.clone() * q(1, 2));
        expect.add_term(vec![h, h, h], c.clone() * c.clone() * c * q(1, 6));
        assert_eq!(v, expect);
    }

    #[test]
    fn lone_odd_factor_integrates_out() {
        let mut s = FlowState::<Exact>::initial(3);
        s.x1e = TailSeries::monomial(1, q(5, 1), 3);
        let v = assemble_state_vector(&s, &q(1, 1), 3).unwrap();
        assert_eq!(v, PbwVector::top(Exact::one()));
    }

    #[test]
    fn odd_pair_survives_berezin() {
        let mut s = FlowState::<Exact>::initial(3);
        s.x1e = TailSeries::monomial(1, q(1, 1), 3);
        s.x2f = TailSeries::monomial(1, q(1, 1), 3);
        let v = assemble_state_vector(&s, &q(1, 1), 3).unwrap();
        // η₁e(−1)·η₂f(−1)|0⟩ = η₁η₂ e(−1)f(−1)|0⟩
        let ef = vec![Mode::new(Basis::OddE, -1), Mode::new(Basis::OddF, -1)];
        assert_eq!(v.coeff(&ef), Exact::one());
    }

    /// `Q(ρ) X(−j) Q(ρ)⁻¹ = X ⊗ (ζ^{−j} ∘ ρ)` on vectors of bounded depth.
    #[test]
    fn semidirect_relation() {
        let k = q(1, 1);
        let depth = 3;
        let md = AffineModule::vacuum(k, depth);
        for (pos, val) in [(0usize, q(1, 2)), (1, q(-1, 3)), (2, q(2, 5))] {
            let mut coeffs = vec![q(0, 1); depth + 1];
            coeffs[pos] = val;
            let rho = AutSeries::from_coeffs(coeffs);
            let v = aut_to_virasoro(&rho, depth);
            let minus: Vec<Exact> = v.iter().map(|c| -c.clone()).collect();
            for x in [Basis::E, Basis::H, Basis::OddF] {
                for j in 1..=2usize {
                    let seeds: [PbwVector<Exact>; 2] = [
                        PbwVector::top(Exact::one()),
                        md.act_mode(Mode::new(Basis::F, -1), &PbwVector::top(Exact::one())).unwrap(),
                    ];
                    for w in seeds {
                        let inner = virasoro_exp(&md, &minus, &w).unwrap();
                        let acted = md.act_mode_truncated(Mode::new(x, -(j as i64)), &inner);
                        let lhs = virasoro_exp(&md, &v, &acted).unwrap();
                        let f = substitute(&TailSeries::monomial(j, Exact::one(), depth), &rho).unwrap();
                        let mut rhs = PbwVector::zero();
                        for p in 1..=depth {
                            let c = f.coeff(p);
                            if !c.is_zero() {
                                rhs.add_assign(
                                    &md.act_mode_truncated(Mode::new(x, -(p as i64)), &w).scale(&c),
                                );
                            }
                        }
                        assert_eq!(lhs, rhs, "pos={pos} X={x:?} j={j}");
                    }
                }
            }
        }
    }

    #[test]
    fn translation_part_is_invisible_on_vacuum() {
        let md = AffineModule::vacuum(q(1, 1), 3);
        let v: PbwVector<Exact> = virasoro_exp_vacuum(&md, &[q(7, 1)]).unwrap();
        assert_eq!(v, PbwVector::top(Exact::one()));
        let l = sugawara(&md, -1, &PbwVector::top(Exact::one())).unwrap();
        assert!(l.is_zero());
    }
}
