//! Structure data of the Lie superalgebra osp(1|2).
//!
//! The bracket and the invariant form are stored as tables; everything else
//! (super-antisymmetric completion, bilinear extension, dual bases) is
//! derived from them.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("gram matrix of the supplied basis is singular")]
    SingularGram,
    #[error("critical level k = -h^vee = -3/2")]
    CriticalLevel,
    #[error("element has mixed parity")]
    MixedParity,
}

/// Z₂ degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    /// `(−1)^{p·q}` as ±1.
    pub fn sign_with(self, other: Parity) -> i64 {
        if self.is_odd() && other.is_odd() {
            -1
        } else {
            1
        }
    }

    pub fn sum(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Basis of osp(1|2). The derived ordering `E < H < F < e < f` is the
/// canonical symbol order used for PBW monomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    E,
    H,
    F,
    /// odd raising generator `e`
    OddE,
    /// odd lowering generator `f`
    OddF,
}

impl Basis {
    pub const ALL: [Basis; 5] = [Basis::E, Basis::H, Basis::F, Basis::OddE, Basis::OddF];
    pub const EVEN: [Basis; 3] = [Basis::E, Basis::H, Basis::F];

    pub fn parity(self) -> Parity {
        match self {
            Basis::E | Basis::H | Basis::F => Parity::Even,
            Basis::OddE | Basis::OddF => Parity::Odd,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Basis::E => "E",
            Basis::H => "H",
            Basis::F => "F",
            Basis::OddE => "e",
            Basis::OddF => "f",
        }
    }

    pub fn from_name(s: &str) -> Option<Basis> {
        Basis::ALL.iter().copied().find(|b| b.name() == s)
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A rational structure constant `num/den`.
pub type Frac = (i64, i64);

/// Table-driven structure data for a Lie superalgebra with at most five
/// basis elements. Only the osp(1|2) table ships.
#[derive(Clone, Debug)]
pub struct StructureTable {
    /// `[x, y]` for a canonical subset of ordered pairs; the rest follows by
    /// super-antisymmetry.
    brackets: &'static [(Basis, Basis, &'static [(Basis, Frac)])],
    /// Nonzero `(x|y)`; supersymmetry completes the table.
    form: &'static [(Basis, Basis, Frac)],
    pub dual_coxeter: Frac,
    pub super_dim: i64,
}

const OSP12_BRACKETS: &[(Basis, Basis, &[(Basis, Frac)])] = {
    use Basis::*;
    &[
        (H, E, &[(E, (2, 1))]),
        (H, F, &[(F, (-2, 1))]),
        (E, F, &[(H, (1, 1))]),
        (H, OddE, &[(OddE, (1, 1))]),
        (H, OddF, &[(OddF, (-1, 1))]),
        (E, OddF, &[(OddE, (-1, 1))]),
        (F, OddE, &[(OddF, (-1, 1))]),
        (E, OddE, &[]),
        (F, OddF, &[]),
        (OddE, OddE, &[(E, (2, 1))]),
        (OddF, OddF, &[(F, (-2, 1))]),
        (OddE, OddF, &[(H, (1, 1))]),
        (E, E, &[]),
        (H, H, &[]),
        (F, F, &[]),
    ]
};

const OSP12_FORM: &[(Basis, Basis, Frac)] = {
    use Basis::*;
    &[(E, F, (1, 1)), (H, H, (2, 1)), (OddE, OddF, (2, 1))]
};

impl StructureTable {
    pub fn osp12() -> &'static StructureTable {
        static TABLE: StructureTable = StructureTable {
            brackets: OSP12_BRACKETS,
            form: OSP12_FORM,
            dual_coxeter: (3, 2),
            super_dim: 1,
        };
        &TABLE
    }

    /// Bracket of two basis elements as a list of (symbol, coefficient).
    pub fn basis_bracket(&self, x: Basis, y: Basis) -> Vec<(Basis, Frac)> {
        for &(a, b, terms) in self.brackets {
            if a == x && b == y {
                return terms.to_vec();
            }
        }
        for &(a, b, terms) in self.brackets {
            if a == y && b == x {
                let s = -x.parity().sign_with(y.parity());
                return terms.iter().map(|&(z, (n, d))| (z, (s * n, d))).collect();
            }
        }
        unreachable!("bracket table missing pair ({x}, {y})")
    }

    pub fn basis_form(&self, x: Basis, y: Basis) -> Frac {
        for &(a, b, v) in self.form {
            if a == x && b == y {
                return v;
            }
            if a == y && b == x {
                let s = x.parity().sign_with(y.parity());
                return (s * v.0, v.1);
            }
        }
        (0, 1)
    }
}

pub(crate) fn frac<S: Scalar>(f: Frac) -> S {
    S::from_frac(f.0, f.1)
}

/// Linear combination of basis symbols. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement<S> {
    coeffs: BTreeMap<Basis, S>,
}

impl<S: Scalar> AlgebraElement<S> {
    pub fn zero() -> Self {
        AlgebraElement { coeffs: BTreeMap::new() }
    }

    pub fn basis(b: Basis) -> Self {
        Self::term(b, S::one())
    }

    pub fn term(b: Basis, c: S) -> Self {
        let mut e = Self::zero();
        e.add_term(b, c);
        e
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Basis, S)>) -> Self {
        let mut e = Self::zero();
        for (b, c) in terms {
            e.add_term(b, c);
        }
        e
    }

    pub fn add_term(&mut self, b: Basis, c: S) {
        let entry = self.coeffs.entry(b).or_insert_with(S::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&b);
        }
    }

    pub fn coeff(&self, b: Basis) -> S {
        self.coeffs.get(&b).cloned().unwrap_or_else(S::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Basis, &S)> {
        self.coeffs.iter().map(|(b, c)| (*b, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::from_terms(self.coeffs.iter().map(|(b, c)| (*b, c.clone() * s.clone())))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (b, c) in other.terms() {
            out.add_term(b, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }

    /// Parity if every present symbol shares it. Zero counts as even.
    pub fn parity(&self) -> Result<Parity, AlgebraError> {
        let mut it = self.coeffs.keys().map(|b| b.parity());
        let first = match it.next() {
            Some(p) => p,
            None => return Ok(Parity::Even),
        };
        if it.all(|p| p == first) {
            Ok(first)
        } else {
            Err(AlgebraError::MixedParity)
        }
    }
}

impl<S: Scalar> fmt::Display for AlgebraElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|(b, c)| format!("({c}){b}")).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Super bracket, bilinear extension of the osp(1|2) table.
pub fn bracket<S: Scalar>(x: &AlgebraElement<S>, y: &AlgebraElement<S>) -> AlgebraElement<S> {
    let table = StructureTable::osp12();
    let mut out = AlgebraElement::zero();
    for (a, ca) in x.terms() {
        for (b, cb) in y.terms() {
            for (z, f) in table.basis_bracket(a, b) {
                out.add_term(z, ca.clone() * cb.clone() * frac::<S>(f));
            }
        }
    }
    out
}

/// Invariant supersymmetric form `(x|y)`.
pub fn form<S: Scalar>(x: &AlgebraElement<S>, y: &AlgebraElement<S>) -> S {
    let table = StructureTable::osp12();
    let mut acc = S::zero();
    for (a, ca) in x.terms() {
        for (b, cb) in y.terms() {
            let f = table.basis_form(a, b);
            if f.0 != 0 {
                acc += ca.clone() * cb.clone() * frac::<S>(f);
            }
        }
    }
    acc
}

/// Dual basis within the span of `basis`: returns `{X^b}` with
/// `(X_a|X^b) = δ_ab`.
pub fn dual_basis<S: Scalar>(basis: &[AlgebraElement<S>]) -> Result<Vec<AlgebraElement<S>>, AlgebraError> {
    let n = basis.len();
    // X^b = Σ_c M[b][c] X_c with Σ_c M[b][c] G[a][c] = δ_ab, i.e. M = (Gᵀ)⁻¹.
    let gram_t: Vec<Vec<S>> =
        (0..n).map(|c| (0..n).map(|a| form(&basis[a], &basis[c])).collect()).collect();
    let inv = invert(gram_t)?;
    Ok((0..n)
        .map(|b| {
            let mut e = AlgebraElement::zero();
            for c in 0..n {
                e = e.add(&basis[c].scale(&inv[b][c]));
            }
            e
        })
        .collect())
}

/// Inverse of a square matrix by Gauss-Jordan elimination.
fn invert<S: Scalar>(mut m: Vec<Vec<S>>) -> Result<Vec<Vec<S>>, AlgebraError> {
    let n = m.len();
    let mut inv: Vec<Vec<S>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect()).collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero()).ok_or(AlgebraError::SingularGram)?;
        m.swap(col, pivot);
        inv.swap(col, pivot);
        let p = m[col][col].inv().ok_or(AlgebraError::SingularGram)?;
        for j in 0..n {
            m[col][j] = m[col][j].clone() * p.clone();
            inv[col][j] = inv[col][j].clone() * p.clone();
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in 0..n {
                    let a = m[col][j].clone() * f.clone();
                    m[r][j] -= a;
                    let b = inv[col][j].clone() * f.clone();
                    inv[r][j] -= b;
                }
            }
        }
    }
    Ok(inv)
}

/// Orthonormal basis of the even part: `J₁ = H/√2`, `J₂ = (E+F)/√2`,
/// `J₃ = i(E−F)/√2`.
pub fn orthonormal_even_basis<S: Scalar>() -> [AlgebraElement<S>; 3] {
    let r = S::sqrt2().inv().expect("sqrt2 is invertible");
    let i = S::imag_unit();
    [
        AlgebraElement::term(Basis::H, r.clone()),
        AlgebraElement::from_terms([(Basis::E, r.clone()), (Basis::F, r.clone())]),
        AlgebraElement::from_terms([(Basis::E, i.clone() * r.clone()), (Basis::F, -(i * r))]),
    ]
}

/// Normalized odd root vectors `(E_{α/2}, E_{−α/2}) = (e/√2, f/√2)`.
pub fn odd_root_vectors<S: Scalar>() -> (AlgebraElement<S>, AlgebraElement<S>) {
    let r = S::sqrt2().inv().expect("sqrt2 is invertible");
    (AlgebraElement::term(Basis::OddE, r.clone()), AlgebraElement::term(Basis::OddF, r))
}

/// Level-dependent constants.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelConstants<S> {
    pub level: S,
    pub dual_coxeter: S,
    pub super_dim: i64,
    /// `c_k = k·sdim / (k + h^∨)`
    pub central_charge: S,
    /// `τ = 2 / (k + h^∨)`
    pub tau_default: S,
}

pub fn structure_constants<S: Scalar>(k: &S) -> Result<LevelConstants<S>, AlgebraError> {
    let table = StructureTable::osp12();
    let h: S = frac(table.dual_coxeter);
    let shifted = k.clone() + h.clone();
    let inv = shifted.inv().ok_or(AlgebraError::CriticalLevel)?;
    Ok(LevelConstants {
        level: k.clone(),
        dual_coxeter: h,
        super_dim: table.super_dim,
        central_charge: k.clone() * S::from_int(table.super_dim) * inv.clone(),
        tau_default: S::from_int(2) * inv,
    })
}

/// Weyl-vector shifted Casimir eigenvalue `(Λ|Λ+2ρ)` for the weight with
/// `H(0)`-eigenvalue `λ`, computed from the form table. The weight
/// `Λ` is dual to `λ` via `Λ(H) = λ`; with `(H|H) = 2` this puts
/// `Λ = (λ/2)·α` where `α(H) = 2`, and `ρ = α/4`.
pub fn casimir_shifted<S: Scalar>(lambda: &S) -> S {
    let table = StructureTable::osp12();
    let hh: S = frac(table.basis_form(Basis::H, Basis::H));
    // (α|α) = α(H)² / (H|H) = 4 / (H|H).
    let alpha_sq = S::from_int(4) * hh.inv().expect("(H|H) nonzero");
    let lam_coeff = lambda.clone() * S::from_frac(1, 2);
    let rho_coeff = S::from_frac(1, 4);
    // (Λ|Λ+2ρ) = c(c + 2·1/4)(α|α) with Λ = cα.
    lam_coeff.clone() * (lam_coeff + S::from_int(2) * rho_coeff) * alpha_sq
}
