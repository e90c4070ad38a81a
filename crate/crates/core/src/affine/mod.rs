//! Truncated highest-weight modules of affine osp(1|2).
//!
//! Vectors are stored in the PBW basis: ordered products of creation modes
//! applied to the top vector. Mode actions are computed by commuting the
//! incoming mode through the monomial with the affine super bracket
//! `[X(m), Y(n)] = [X,Y](m+n) + m(X|Y)δ_{m+n,0}K`, with `K` acting as the
//! level `k`.

mod null;
mod sugawara;

pub use null::{
    conformal_weight, null_conditions, null_conditions_on, claimed_e_residual, psi, NullReport, NullResidual,
    PsiVariant, ResidualKind,
};
pub(crate) use null::monomial_label;
pub use sugawara::{annihilator_apply, sugawara, sugawara_terms, virasoro_exp, virasoro_exp_vacuum};

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{frac, AlgebraError, Basis, Parity, StructureTable};
use crate::scalar::{Coeff, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RepError {
    #[error("creation mode would push depth to {depth}, beyond the truncation {max}")]
    DepthOverflow { depth: usize, max: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// The generator `X(n) = X ⊗ ζⁿ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mode {
    // field order fixes the canonical ordering: by index, then symbol
    pub index: i64,
    pub symbol: Basis,
}

impl Mode {
    pub fn new(symbol: Basis, index: i64) -> Self {
        Mode { index, symbol }
    }

    pub fn parity(self) -> Parity {
        self.symbol.parity()
    }

    fn depth(self) -> usize {
        if self.index < 0 {
            (-self.index) as usize
        } else {
            0
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.symbol, self.index)
    }
}

/// Ordered product of creation modes, leftmost applied last.
pub type Monomial = Vec<Mode>;

fn monomial_depth(m: &[Mode]) -> usize {
    m.iter().map(|x| x.depth()).sum()
}

fn render_monomial(m: &[Mode]) -> String {
    if m.is_empty() {
        "|v⟩".to_string()
    } else {
        let parts: Vec<String> = m.iter().map(|x| x.to_string()).collect();
        format!("{}|v⟩", parts.join(""))
    }
}

/// Linear combination of PBW monomials with coefficients in `C`.
#[derive(Clone, Debug, PartialEq)]
pub struct PbwVector<C> {
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> Default for PbwVector<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coeff> PbwVector<C> {
    pub fn zero() -> Self {
        PbwVector { terms: BTreeMap::new() }
    }

    /// The top vector (`|0⟩` or `|v_Λ⟩`) with coefficient `c`.
    pub fn top(c: C) -> Self {
        let mut v = Self::zero();
        v.add_term(Vec::new(), c);
        v
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(slot) => {
                *slot += c;
                if slot.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &[Mode]) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    /// Coefficient of the top vector.
    pub fn top_coeff(&self) -> C {
        self.coeff(&[])
    }

    pub fn max_depth(&self) -> usize {
        self.terms.keys().map(|m| monomial_depth(m)).max().unwrap_or(0)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(o);
        out
    }

    pub fn add_assign(&mut self, o: &Self) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, s: &C::Base) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.scale(s));
        }
        out
    }

    /// Multiply every coefficient on the left by `g`.
    pub fn left_mul(&self, g: &C) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), g.clone() * c.clone());
        }
        out
    }

    /// Components of depth at most `depth`.
    pub fn truncated(&self, depth: usize) -> Self {
        PbwVector {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| monomial_depth(m) <= depth)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> PbwVector<D> {
        let mut out = PbwVector::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Whether every stored monomial is in canonical order.
    pub fn is_canonical(&self) -> bool {
        self.terms.keys().all(|m| {
            m.windows(2).all(|w| w[0] < w[1] || (w[0] == w[1] && w[0].parity() == Parity::Even))
        })
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for PbwVector<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> =
            self.terms.iter().map(|(m, c)| format!("({c}) {}", render_monomial(m))).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// What the zero modes do to the top vector.
#[derive(Clone, Debug, PartialEq)]
pub enum TopSpace<S> {
    /// Vacuum: every nonnegative mode annihilates.
    Vacuum,
    /// Verma-type top: `E(0), e(0)` annihilate, `H(0)` acts by `λ`, and the
    /// lowering zero modes `F(0), f(0)` act freely.
    Verma { lambda: S },
}

/// Overflow handling for creation modes beyond the depth bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Overflow {
    Error,
    Truncate,
}

/// Truncated highest-weight module of affine osp(1|2) at level `k`.
#[derive(Clone, Debug)]
pub struct AffineModule<S> {
    level: S,
    max_depth: usize,
    top: TopSpace<S>,
}

impl<S: Scalar> AffineModule<S> {
    pub fn vacuum(level: S, max_depth: usize) -> Self {
        AffineModule { level, max_depth, top: TopSpace::Vacuum }
    }

    pub fn verma(level: S, lambda: S, max_depth: usize) -> Self {
        AffineModule { level, max_depth, top: TopSpace::Verma { lambda } }
    }

    pub fn level(&self) -> &S {
        &self.level
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn top_space(&self) -> &TopSpace<S> {
        &self.top
    }

    /// Modes that are stored in monomials rather than evaluated.
    fn is_creation(&self, m: Mode) -> bool {
        if m.index < 0 {
            return true;
        }
        m.index == 0
            && matches!(self.top, TopSpace::Verma { .. })
            && matches!(m.symbol, Basis::F | Basis::OddF)
    }

    /// `X(m)` applied to the bare top vector, for non-creation modes.
    fn on_top(&self, m: Mode) -> Option<S> {
        match (&self.top, m.index, m.symbol) {
            (TopSpace::Verma { lambda }, 0, Basis::H) => Some(lambda.clone()),
            _ => None,
        }
    }

    /// `X(m)·v` with hard overflow errors.
    pub fn act_mode<C: Coeff<Base = S>>(&self, m: Mode, v: &PbwVector<C>) -> Result<PbwVector<C>, RepError> {
        self.act_with(m, v, Overflow::Error)
    }

    /// `X(m)·v`, silently dropping components beyond the depth bound. Exact
    /// on the retained components whenever only creation operators follow.
    pub fn act_mode_truncated<C: Coeff<Base = S>>(&self, m: Mode, v: &PbwVector<C>) -> PbwVector<C> {
        self.act_with(m, v, Overflow::Truncate).expect("truncating action cannot fail")
    }

    pub fn act_with<C: Coeff<Base = S>>(
        &self,
        m: Mode,
        v: &PbwVector<C>,
        overflow: Overflow,
    ) -> Result<PbwVector<C>, RepError> {
        let mut out = PbwVector::zero();
        for (mono, c) in v.terms() {
            self.act_monomial(m, mono, c, &mut out, overflow)?;
        }
        Ok(out)
    }

    /// Apply a product of modes, rightmost first.
    pub fn act_word<C: Coeff<Base = S>>(&self, word: &[Mode], v: &PbwVector<C>) -> Result<PbwVector<C>, RepError> {
        let mut cur = v.clone();
        for &m in word.iter().rev() {
            cur = self.act_mode(m, &cur)?;
            if cur.is_zero() {
                break;
            }
        }
        Ok(cur)
    }

    /// Adds `coeff · X(m)·mono|top⟩` into `out`.
    fn act_monomial<C: Coeff<Base = S>>(
        &self,
        m: Mode,
        mono: &[Mode],
        coeff: &C,
        out: &mut PbwVector<C>,
        overflow: Overflow,
    ) -> Result<(), RepError> {
        if coeff.is_zero() {
            return Ok(());
        }
        let creation = self.is_creation(m);
        if creation {
            let depth = monomial_depth(mono) + m.depth();
            if depth > self.max_depth {
                return match overflow {
                    Overflow::Error => Err(RepError::DepthOverflow { depth, max: self.max_depth }),
                    Overflow::Truncate => Ok(()),
                };
            }
        }
        let table = StructureTable::osp12();
        let (first, rest) = match mono.split_first() {
            None => {
                if creation {
                    out.add_term(vec![m], coeff.clone());
                } else if let Some(eig) = self.on_top(m) {
                    out.add_term(Vec::new(), coeff.scale(&eig));
                }
                return Ok(());
            }
            Some((f, r)) => (*f, r),
        };

        if creation {
            if m < first {
                let mut new = Vec::with_capacity(mono.len() + 1);
                new.push(m);
                new.extend_from_slice(mono);
                out.add_term(new, coeff.clone());
                return Ok(());
            }
            if m == first {
                if m.parity() == Parity::Even {
                    let mut new = Vec::with_capacity(mono.len() + 1);
                    new.push(m);
                    new.extend_from_slice(mono);
                    out.add_term(new, coeff.clone());
                } else {
                    // X(m)X(m) = ½[X,X](2m) for odd X; (X|X) = 0 so no central term.
                    for (z, f) in table.basis_bracket(m.symbol, m.symbol) {
                        let c = coeff.scale(&(frac::<S>(f) * S::from_frac(1, 2)));
                        self.act_monomial(Mode::new(z, 2 * m.index), rest, &c, out, overflow)?;
                    }
                }
                return Ok(());
            }
        }

        // X(m)·Y·rest = ±Y·(X(m)·rest) + [X(m), Y]·rest
        let sign = m.parity().sign_with(first.parity());
        let mut inner = PbwVector::zero();
        self.act_monomial(m, rest, coeff, &mut inner, overflow)?;
        for (mono2, c2) in inner.terms() {
            let c2 = if sign < 0 { -c2.clone() } else { c2.clone() };
            self.act_monomial(first, mono2, &c2, out, overflow)?;
        }
        for (z, f) in table.basis_bracket(m.symbol, first.symbol) {
            let c = coeff.scale(&frac::<S>(f));
            self.act_monomial(Mode::new(z, m.index + first.index), rest, &c, out, overflow)?;
        }
        if m.index + first.index == 0 && m.index != 0 {
            let form = table.basis_form(m.symbol, first.symbol);
            if form.0 != 0 {
                let c = coeff.scale(&(frac::<S>(form) * S::from_int(m.index) * self.level.clone()));
                let rest_vec: Monomial = rest.to_vec();
                out.add_term(rest_vec, c);
            }
        }
        Ok(())
    }

    /// Normal-ordered product: modes are stably reordered by index so that
    /// the ones with larger index act first, with a sign for every exchange
    /// of two odd modes. For two modes this is `:A(p)B(q):`.
    pub fn normal_order_product<C: Coeff<Base = S>>(
        &self,
        modes: &[Mode],
        v: &PbwVector<C>,
    ) -> Result<PbwVector<C>, RepError> {
        let (ordered, sign) = normal_order(modes);
        let out = self.act_word(&ordered, v)?;
        Ok(if sign < 0 { out.scale(&S::from_int(-1)) } else { out })
    }
}

/// Stable sort by index with the Koszul sign of the permutation.
pub fn normal_order(modes: &[Mode]) -> (Vec<Mode>, i64) {
    let mut w = modes.to_vec();
    let mut sign = 1;
    for i in 0..w.len() {
        for j in 0..w.len().saturating_sub(1 + i) {
            if w[j].index > w[j + 1].index {
                if w[j].parity().is_odd() && w[j + 1].parity().is_odd() {
                    sign = -sign;
                }
                w.swap(j, j + 1);
            }
        }
    }
    (w, sign)
}

/// A functional `⟨0|X₁(n₁)⋯X_r(n_r)` with positive indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DualWord(pub Vec<Mode>);

impl DualWord {
    pub fn new(modes: Vec<Mode>) -> Option<Self> {
        if modes.iter().all(|m| m.index >= 1) {
            Some(DualWord(modes))
        } else {
            None
        }
    }

    pub fn empty() -> Self {
        DualWord(Vec::new())
    }

    pub fn depth(&self) -> usize {
        self.0.iter().map(|m| m.index as usize).sum()
    }

    pub fn label(&self) -> String {
        if self.0.is_empty() {
            "<0|".to_string()
        } else {
            let parts: Vec<String> = self.0.iter().map(|m| m.to_string()).collect();
            format!("<0|{}", parts.join(""))
        }
    }
}

impl Serialize for Mode {
    fn serialize<Se: serde::Serializer>(&self, s: Se) -> Result<Se::Ok, Se::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `⟨0| w v⟩`: apply the word (rightmost mode first) and read off the top
/// coefficient.
pub fn expectation<S: Scalar, C: Coeff<Base = S>>(
    module: &AffineModule<S>,
    w: &DualWord,
    v: &PbwVector<C>,
) -> Result<C, RepError> {
    let depth = w.depth();
    let v = v.truncated(depth);
    Ok(module.act_word(&w.0, &v)?.top_coeff())
}
