use serde::Serialize;

use crate::affine::{annihilator_apply, monomial_label, sugawara, AffineModule, Mode, PbwVector, RepError};
use crate::algebra::{structure_constants, Basis};
use crate::grassmann::{berezin, Grassmann};
use crate::scalar::{Coeff, Exact, Scalar};

/// One named exact identity and whether it held.
#[derive(Clone, Debug, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub pass: bool,
    /// Nonzero residual terms, empty on success.
    pub residual: Vec<(String, String)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub check: &'static str,
    pub parameters: serde_json::Value,
    pub lines: Vec<CheckLine>,
    pub pass: bool,
}

impl VerifyReport {
    fn new(check: &'static str, parameters: serde_json::Value, lines: Vec<CheckLine>) -> Self {
        let pass = lines.iter().all(|l| l.pass);
        VerifyReport { check, parameters, lines, pass }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckLine> {
        self.lines.iter().filter(|l| !l.pass)
    }
}

impl std::fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let width = self.lines.iter().map(|l| l.name.chars().count()).max().unwrap_or(0);
        for l in &self.lines {
            let pad = width - l.name.chars().count();
            writeln!(f, "{}{}  {}", l.name, " ".repeat(pad), if l.pass { "ok" } else { "FAIL" })?;
            for (m, c) in &l.residual {
                writeln!(f, "    {c} {m}")?;
            }
        }
        write!(f, "{}: {}", self.check, if self.pass { "pass" } else { "FAIL" })
    }
}

fn line(name: String, residual: &PbwVector<Exact>) -> CheckLine {
    CheckLine {
        name,
        pass: residual.is_zero(),
        residual: residual.terms().map(|(m, c)| (monomial_label(m), c.to_string())).collect(),
    }
}

/// `berezin(Ξ(κ,τ)(|0⟩⊗(1+η₁η₂)))` in the depth-`depth` vacuum module.
pub fn verify_annihilator(k: &Exact, kappa: &Exact, tau: &Exact, depth: usize) -> Result<VerifyReport, RepError> {
    let module = AffineModule::vacuum(k.clone(), depth);
    let v = PbwVector::top(Grassmann::scalar(Exact::one()) + Grassmann::eta12());
    let out = annihilator_apply(&module, kappa, tau, &v)?.map(berezin);
    let params = serde_json::json!({
        "k": k.to_string(), "kappa": kappa.to_string(), "tau": tau.to_string(), "depth": depth,
    });
    Ok(VerifyReport::new("verify-annihilator", params, vec![line("berezin(Xi |0>(1+eta1 eta2)) = 0".into(), &out)]))
}

/// Bracket pairs exercised by [`verify_virasoro`].
pub const VIRASORO_PAIRS: [(i64, i64); 8] = [(1, -1), (2, -2), (1, -2), (2, -1), (0, 1), (0, -1), (0, 2), (0, -2)];

/// `|0⟩, H(−1)|0⟩, e(−1)|0⟩, E(−1)F(−1)|0⟩` with labels.
pub fn virasoro_test_vectors() -> Vec<(&'static str, Vec<Mode>)> {
    use Basis::*;
    vec![
        ("|0>", vec![]),
        ("H(-1)|0>", vec![Mode::new(H, -1)]),
        ("e(-1)|0>", vec![Mode::new(OddE, -1)]),
        ("E(-1)F(-1)|0>", vec![Mode::new(E, -1), Mode::new(F, -1)]),
    ]
}

/// Central charge, the Virasoro relations and current primariness at level `k`.
///
/// The module depth is the deepest test vector plus four, enough for every
/// intermediate vector, so all actions are exact.
pub fn verify_virasoro(k: &Exact) -> Result<VerifyReport, RepError> {
    let module = AffineModule::vacuum(k.clone(), 6);
    let consts = structure_constants(k)?;
    let c = consts.central_charge.clone();
    let vac = PbwVector::top(Exact::one());
    let l = |n: i64, v: &PbwVector<Exact>| sugawara(&module, n, v);
    let mut lines = Vec::new();

    let cc = l(2, &l(-2, &vac)?)?.sub(&vac.scale(&(c.clone() * Exact::from_frac(1, 2))));
    lines.push(line(format!("<0|L(2)L(-2)|0> = c/2, c = {c}"), &cc));

    for (label, word) in virasoro_test_vectors() {
        let v = module.act_word(&word, &vac)?;
        for (m, n) in VIRASORO_PAIRS {
            let lhs = l(m, &l(n, &v)?)?.sub(&l(n, &l(m, &v)?)?);
            let mut rhs = l(m + n, &v)?.scale(&Exact::from_int(m - n));
            if m + n == 0 {
                let anomaly = c.clone() * Exact::from_frac(m * m * m - m, 12);
                rhs.add_assign(&v.scale(&anomaly));
            }
            lines.push(line(format!("[L({m}),L({n})] {label}"), &lhs.sub(&rhs)));
        }
        for m in -2..=2 {
            for n in -2..=2 {
                for x in Basis::ALL {
                    let xn = Mode::new(x, n);
                    let lhs = l(m, &module.act_mode(xn, &v)?)?.sub(&module.act_mode(xn, &l(m, &v)?)?);
                    let rhs = module.act_mode(Mode::new(x, m + n), &v)?.scale(&Exact::from_int(-n));
                    lines.push(line(format!("[L({m}),{x}({n})] {label}"), &lhs.sub(&rhs)));
                }
            }
        }
    }
    Ok(VerifyReport::new("verify-virasoro", serde_json::json!({ "k": k.to_string() }), lines))
}
