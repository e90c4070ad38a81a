//! Null-vector conditions for the candidate `ψ` on a highest-weight top.

use serde::Serialize;

use crate::algebra::{
    bracket, casimir_shifted, dual_basis, structure_constants, AlgebraElement, AlgebraError, Basis,
};
use crate::scalar::Scalar;

use super::sugawara::sugawara;
use super::{AffineModule, Mode, PbwVector, RepError};

/// Which Virasoro mode carries the `−2` coefficient in `ψ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiVariant {
    /// `−2L₋₂`, the form that matches the annihilator.
    L2,
    /// `−2L₋₁`, kept for comparison.
    L1Typo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualKind {
    /// `((τk−τh^∨−2)X(−1) + κX(0)L₋₁ + τΣ(−1)^{p_a}[X,X_a](0)X^a(−1))|v⟩`
    Condition1,
    /// `(κ+τh^∨−4)X(0)|v⟩`
    Condition2,
    /// `X(1)ψ`
    RaisingOne,
    /// `X(2)ψ`
    RaisingTwo,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NullResidual<S> {
    pub symbol: Basis,
    pub kind: ResidualKind,
    pub vector: PbwVector<S>,
}

#[derive(Clone, Debug)]
pub struct NullReport<S> {
    pub level: S,
    pub lambda: S,
    pub kappa: S,
    pub tau: S,
    pub variant: PsiVariant,
    pub psi: PbwVector<S>,
    pub residuals: Vec<NullResidual<S>>,
}

#[derive(Serialize)]
struct Record {
    check: &'static str,
    parameters: serde_json::Value,
    residual_terms: Vec<ResidualRecord>,
    pass: bool,
}

#[derive(Serialize)]
struct ResidualRecord {
    symbol: &'static str,
    kind: ResidualKind,
    terms: Vec<(String, String)>,
}

impl<S: Scalar> NullReport<S> {
    pub fn residual(&self, symbol: Basis, kind: ResidualKind) -> Option<&PbwVector<S>> {
        self.residuals.iter().find(|r| r.symbol == symbol && r.kind == kind).map(|r| &r.vector)
    }

    /// True when `X(1)ψ = X(2)ψ = 0` for every basis element.
    pub fn is_null(&self) -> bool {
        self.residuals
            .iter()
            .filter(|r| matches!(r.kind, ResidualKind::RaisingOne | ResidualKind::RaisingTwo))
            .all(|r| r.vector.is_zero())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let residual_terms = self
            .residuals
            .iter()
            .map(|r| ResidualRecord {
                symbol: r.symbol.name(),
                kind: r.kind,
                terms: r
                    .vector
                    .terms()
                    .map(|(m, c)| (monomial_label(m), c.to_string()))
                    .collect(),
            })
            .collect();
        let rec = Record {
            check: "null-scan",
            parameters: serde_json::json!({
                "k": self.level.to_string(),
                "lambda": self.lambda.to_string(),
                "kappa": self.kappa.to_string(),
                "tau": self.tau.to_string(),
                "psi": self.variant,
            }),
            residual_terms,
            pass: self.is_null(),
        };
        serde_json::to_value(rec).expect("report serializes")
    }
}

pub(crate) fn monomial_label(m: &[Mode]) -> String {
    let parts: Vec<String> = m.iter().map(|x| x.to_string()).collect();
    format!("{}|v>", parts.join(""))
}

/// `X(n)` for a general algebra element.
fn act_element<S: Scalar>(
    module: &AffineModule<S>,
    x: &AlgebraElement<S>,
    index: i64,
    v: &PbwVector<S>,
) -> Result<PbwVector<S>, RepError> {
    let mut out = PbwVector::zero();
    for (b, c) in x.terms() {
        out.add_assign(&module.act_mode(Mode::new(b, index), v)?.scale(c));
    }
    Ok(out)
}

/// `Σ_a (−1)^{p(X_a)} X_a(−1) X^a(−1) v`.
fn casimir_minus_one<S: Scalar>(module: &AffineModule<S>, v: &PbwVector<S>) -> Result<PbwVector<S>, RepError> {
    let basis: Vec<AlgebraElement<S>> = Basis::ALL.iter().map(|&b| AlgebraElement::basis(b)).collect();
    let dual = dual_basis(&basis)?;
    let mut out = PbwVector::zero();
    for (&b, xa) in Basis::ALL.iter().zip(&dual) {
        let inner = act_element(module, xa, -1, v)?;
        let term = module.act_mode(Mode::new(b, -1), &inner)?;
        out.add_assign(&term.scale(&S::from_int(b.parity().sign_with(b.parity()))));
    }
    Ok(out)
}

/// The candidate `ψ = (−2L₋₂ + (κ/2)L₋₁² + (τ/2)Σ(−1)^{p_a}X_a(−1)X^a(−1))|v⟩`.
pub fn psi<S: Scalar>(
    module: &AffineModule<S>,
    kappa: &S,
    tau: &S,
    variant: PsiVariant,
) -> Result<PbwVector<S>, RepError> {
    let top = PbwVector::top(S::one());
    let lead = match variant {
        PsiVariant::L2 => sugawara(module, -2, &top)?,
        PsiVariant::L1Typo => sugawara(module, -1, &top)?,
    };
    let mut out = lead.scale(&S::from_int(-2));
    let l1 = sugawara(module, -1, &top)?;
    out.add_assign(&sugawara(module, -1, &l1)?.scale(&(kappa.clone() * S::from_frac(1, 2))));
    out.add_assign(&casimir_minus_one(module, &top)?.scale(&(tau.clone() * S::from_frac(1, 2))));
    Ok(out)
}

/// Both reduced conditions and the direct raising actions on `ψ`, on the
/// supplied module.
pub fn null_conditions_on<S: Scalar>(
    module: &AffineModule<S>,
    lambda: &S,
    kappa: &S,
    tau: &S,
    variant: PsiVariant,
) -> Result<NullReport<S>, RepError> {
    let consts = structure_constants(module.level())?;
    let (k, h) = (consts.level.clone(), consts.dual_coxeter.clone());
    let top = PbwVector::top(S::one());
    let l1 = sugawara(module, -1, &top)?;
    let basis: Vec<AlgebraElement<S>> = Basis::ALL.iter().map(|&b| AlgebraElement::basis(b)).collect();
    let dual = dual_basis(&basis)?;
    let c1 = tau.clone() * k - tau.clone() * h.clone() - S::from_int(2);
    let c2 = kappa.clone() + tau.clone() * h - S::from_int(4);
    let psi_vec = psi(module, kappa, tau, variant)?;

    let mut residuals = Vec::new();
    for &x in Basis::ALL.iter() {
        let mut r = module.act_mode(Mode::new(x, -1), &top)?.scale(&c1);
        r.add_assign(&module.act_mode(Mode::new(x, 0), &l1)?.scale(kappa));
        for (&b, xa) in Basis::ALL.iter().zip(&dual) {
            let br = bracket(&AlgebraElement::basis(x), &AlgebraElement::basis(b));
            if br.is_zero() {
                continue;
            }
            let inner = act_element(module, xa, -1, &top)?;
            let sign = S::from_int(b.parity().sign_with(b.parity()));
            r.add_assign(&act_element(module, &br, 0, &inner)?.scale(&(tau.clone() * sign)));
        }
        residuals.push(NullResidual { symbol: x, kind: ResidualKind::Condition1, vector: r });
        residuals.push(NullResidual {
            symbol: x,
            kind: ResidualKind::Condition2,
            vector: module.act_mode(Mode::new(x, 0), &top)?.scale(&c2),
        });
        residuals.push(NullResidual {
            symbol: x,
            kind: ResidualKind::RaisingOne,
            vector: module.act_mode(Mode::new(x, 1), &psi_vec)?,
        });
        residuals.push(NullResidual {
            symbol: x,
            kind: ResidualKind::RaisingTwo,
            vector: module.act_mode(Mode::new(x, 2), &psi_vec)?,
        });
    }
    Ok(NullReport {
        level: module.level().clone(),
        lambda: lambda.clone(),
        kappa: kappa.clone(),
        tau: tau.clone(),
        variant,
        psi: psi_vec,
        residuals,
    })
}

/// Null-vector scan on the Verma-type top of weight `λ`.
pub fn null_conditions<S: Scalar>(k: &S, lambda: &S, kappa: &S, tau: &S) -> Result<NullReport<S>, RepError> {
    let module = AffineModule::verma(k.clone(), lambda.clone(), 3);
    null_conditions_on(&module, lambda, kappa, tau, PsiVariant::L2)
}

/// The closed form `((τk − τh^∨ − 2 + τ(4+λ))E(−1) + (τ/2)H(−1))|v⟩` claimed
/// for the `X = E` residual.
pub fn claimed_e_residual<S: Scalar>(k: &S, lambda: &S, tau: &S) -> Result<PbwVector<S>, AlgebraError> {
    let consts = structure_constants(k)?;
    let c = tau.clone() * k.clone() - tau.clone() * consts.dual_coxeter - S::from_int(2)
        + tau.clone() * (S::from_int(4) + lambda.clone());
    let mut v = PbwVector::zero();
    v.add_term(vec![Mode::new(Basis::E, -1)], c);
    v.add_term(vec![Mode::new(Basis::H, -1)], tau.clone() * S::from_frac(1, 2));
    Ok(v)
}

/// `h_Λ = (Λ|Λ+2ρ) / (2(k+h^∨))`.
pub fn conformal_weight<S: Scalar>(lambda: &S, k: &S) -> Result<S, AlgebraError> {
    let consts = structure_constants(k)?;
    let denom = (S::from_int(2) * (consts.level + consts.dual_coxeter)).inv().ok_or(AlgebraError::CriticalLevel)?;
    Ok(casimir_shifted(lambda) * denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Coeff;
    use crate::scalar::Exact;
    use Basis::*;

    fn q(n: i64, d: i64) -> Exact {
        Exact::from_frac(n, d)
    }

    #[test]
    fn conformal_weight_examples() {
        assert_eq!(conformal_weight(&q(0, 1), &q(1, 1)).unwrap(), Exact::zero());
        assert_eq!(conformal_weight(&q(1, 1), &q(1, 2)).unwrap(), q(1, 4));
        assert_eq!(conformal_weight(&q(2, 1), &q(3, 2)).unwrap(), q(1, 2));
        assert!(conformal_weight(&q(1, 1), &q(-3, 2)).is_err());
    }

    #[test]
    fn conformal_weight_is_l0_eigenvalue() {
        let (k, lam) = (q(2, 3), q(5, 2));
        let md = AffineModule::verma(k.clone(), lam.clone(), 2);
        let top = PbwVector::top(Exact::one());
        let l0 = sugawara(&md, 0, &top).unwrap();
        assert_eq!(l0, top.scale(&conformal_weight(&lam, &k).unwrap()));
    }

    #[test]
    fn vacuum_conditions_vanish_at_tuned_tau() {
        for (kn, kd) in [(1, 1), (1, 2), (7, 3)] {
            let k = q(kn, kd);
            let tau = q(2, 1) * (k.clone() + q(3, 2)).inv().unwrap();
            let md = AffineModule::vacuum(k.clone(), 3);
            let rep = null_conditions_on(&md, &Exact::zero(), &q(11, 5), &tau, PsiVariant::L2).unwrap();
            for r in &rep.residuals {
                assert!(r.vector.is_zero(), "{:?} {:?}: {}", r.symbol, r.kind, r.vector);
            }
            assert!(rep.is_null());
        }
    }

    #[test]
    fn second_condition_coefficient() {
        let (k, lam, tau) = (q(1, 1), q(2, 1), q(1, 3));
        let kappa = q(4, 1) - q(3, 2) * tau.clone();
        let rep = null_conditions(&k, &lam, &kappa, &tau).unwrap();
        for x in Basis::ALL {
            assert!(rep.residual(x, ResidualKind::Condition2).unwrap().is_zero());
        }
        let rep = null_conditions(&k, &lam, &q(1, 1), &tau).unwrap();
        let h0 = rep.residual(H, ResidualKind::Condition2).unwrap();
        let coeff = q(1, 1) + q(3, 2) * tau - q(4, 1);
        assert_eq!(h0.top_coeff(), coeff * lam);
    }

    #[test]
    fn raising_two_matches_second_condition() {
        let (k, lam, kappa, tau) = (q(3, 4), q(3, 1), q(5, 2), q(2, 7));
        let rep = null_conditions(&k, &lam, &kappa, &tau).unwrap();
        for x in Basis::ALL {
            let direct = rep.residual(x, ResidualKind::RaisingTwo).unwrap();
            let reduced = rep.residual(x, ResidualKind::Condition2).unwrap();
            assert_eq!(direct, reduced, "{x:?}");
        }
    }

    #[test]
    fn raising_one_matches_first_condition() {
        let (k, lam, kappa, tau) = (q(3, 4), q(3, 1), q(5, 2), q(2, 7));
        let rep = null_conditions(&k, &lam, &kappa, &tau).unwrap();
        for x in Basis::ALL {
            let direct = rep.residual(x, ResidualKind::RaisingOne).unwrap();
            let reduced = rep.residual(x, ResidualKind::Condition1).unwrap();
            assert_eq!(direct, reduced, "{x:?}");
        }
    }

    #[test]
    fn e_residual_has_no_cartan_component() {
        let (k, lam, kappa, tau) = (q(1, 1), q(2, 1), q(1, 1), q(1, 3));
        let rep = null_conditions(&k, &lam, &kappa, &tau).unwrap();
        let r = rep.residual(E, ResidualKind::Condition1).unwrap();
        assert!(r.coeff(&[Mode::new(H, -1)]).is_zero());
        let c = tau.clone() * k - tau.clone() * q(3, 2) - q(2, 1) + tau * (q(3, 1) + lam);
        assert_eq!(r.coeff(&[Mode::new(E, -1)]), c);
    }

    #[test]
    fn report_serializes() {
        let rep = null_conditions(&q(1, 1), &q(1, 1), &q(2, 1), &q(1, 2)).unwrap();
        let js = rep.to_json();
        assert_eq!(js["check"], "null-scan");
        assert_eq!(js["pass"], false);
        assert_eq!(js["residual_terms"].as_array().unwrap().len(), 20);
    }
}
