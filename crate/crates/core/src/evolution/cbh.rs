use std::collections::BTreeMap;

use thiserror::Error;

use crate::algebra::{Basis, StructureTable};
use crate::grassmann::Grassmann;
use crate::scalar::{Coeff, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CbhError {
    #[error("exponent has an even Grassmann component, so its exponential does not truncate")]
    NonNilpotent,
    #[error("generator {0} carries a Grassmann coefficient of the wrong parity")]
    ParityMismatch(&'static str),
}

/// An element `Σ X ⊗ ζ^{−j} ⊗ g_{X,j}` of the Grassmann envelope of the
/// loop algebra, truncated at `ζ^{−N}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopElement<S> {
    order: usize,
    terms: BTreeMap<(Basis, usize), Grassmann<S>>,
}

impl<S: Scalar> LoopElement<S> {
    pub fn zero(order: usize) -> Self {
        LoopElement { order, terms: BTreeMap::new() }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Adds `X ⊗ ζ^{−power} ⊗ g`; powers outside `1..=N` are dropped.
    pub fn add_term(&mut self, x: Basis, power: usize, g: Grassmann<S>) {
        if power == 0 || power > self.order || g.is_zero() {
            return;
        }
        let slot = self.terms.entry((x, power)).or_insert_with(Grassmann::zero);
        *slot += g;
        if slot.is_zero() {
            self.terms.remove(&(x, power));
        }
    }

    /// `X ⊗ f(ζ) ⊗ g` for a tail `f` given by its coefficients.
    pub fn from_series(x: Basis, coeffs: &[S], g: &Grassmann<S>) -> Self {
        let mut out = LoopElement::zero(coeffs.len());
        for (j, c) in coeffs.iter().enumerate() {
            out.add_term(x, j + 1, g.scale(c));
        }
        out
    }

    pub fn term(&self, x: Basis, power: usize) -> Grassmann<S> {
        self.terms.get(&(x, power)).cloned().unwrap_or_else(Grassmann::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Basis, usize, &Grassmann<S>)> {
        self.terms.iter().map(|(&(x, j), g)| (x, j, g))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (x, j, g) in o.terms() {
            out.add_term(x, j, g.clone());
        }
        out
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = LoopElement::zero(self.order);
        for (x, j, g) in self.terms() {
            out.add_term(x, j, g.scale(s));
        }
        out
    }

    /// Envelope bracket. With homogeneous terms whose Grassmann parity
    /// matches the generator parity, `[X⊗a, Y⊗b] = [X,Y]⊗ab`.
    pub fn bracket(&self, o: &Self) -> Result<Self, CbhError> {
        self.check_parity()?;
        o.check_parity()?;
        let table = StructureTable::osp12();
        let mut out = LoopElement::zero(self.order.max(o.order));
        for (x, i, a) in self.terms() {
            for (y, j, b) in o.terms() {
                let ab = a.clone() * b.clone();
                if ab.is_zero() {
                    continue;
                }
                for (z, (n, d)) in table.basis_bracket(x, y) {
                    out.add_term(z, i + j, ab.scale(&S::from_frac(n, d)));
                }
            }
        }
        Ok(out)
    }

    fn check_parity(&self) -> Result<(), CbhError> {
        for (x, _, g) in self.terms() {
            let ok = match g.parity() {
                Some(p) => p == x.parity(),
                None => false,
            };
            if !ok {
                return Err(CbhError::ParityMismatch(x.name()));
            }
        }
        Ok(())
    }

    /// Every coefficient lies in the odd part or the `η₁η₂` line, so that
    /// the exponential is a finite polynomial.
    pub fn is_nilpotent(&self) -> bool {
        self.terms().all(|(_, _, g)| g.c1.is_zero())
    }
}

/// Exponent `C` with `e^A e^B = e^C`. For nilpotent `A, B` the series stops at
/// `C = A + B + ½[A,B]`: all higher commutators carry a repeated `η`.
pub fn cbh_product<S: Scalar>(a: &LoopElement<S>, b: &LoopElement<S>) -> Result<LoopElement<S>, CbhError> {
    if !a.is_nilpotent() || !b.is_nilpotent() {
        return Err(CbhError::NonNilpotent);
    }
    let half = a.bracket(b)?.scale(&S::from_frac(1, 2));
    Ok(a.add(b).add(&half))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;
    use Basis::*;

    type G = Grassmann<Exact>;

    fn single(x: Basis, power: usize, g: G) -> LoopElement<Exact> {
        let mut l = LoopElement::zero(4);
        l.add_term(x, power, g);
        l
    }

    #[test]
    fn odd_pair_produces_cartan_term() {
        let a = single(OddE, 1, G::eta1());
        let b = single(OddF, 1, G::eta2());
        let c = cbh_product(&a, &b).unwrap();
        let mut expect = a.add(&b);
        expect.add_term(H, 2, G::eta12().scale(&Exact::from_frac(1, 2)));
        assert_eq!(c, expect);
    }

    #[test]
    fn zero_right_factor() {
        let a = single(OddE, 1, G::eta1());
        assert_eq!(cbh_product(&a, &LoopElement::zero(4)).unwrap(), a);
    }

    #[test]
    fn repeated_odd_generator() {
        let a = single(OddE, 1, G::eta1());
        let b = single(OddE, 2, G::eta2());
        let c = cbh_product(&a, &b).unwrap();
        // [e,e] = 2E, halved
        assert_eq!(c.term(E, 3), G::eta12());
        assert_eq!(c.term(OddE, 1), G::eta1());
        assert_eq!(c.term(OddE, 2), G::eta2());
    }

    #[test]
    fn bracket_term_is_top_degree_only() {
        let a = single(OddE, 1, G::eta1()).add(&single(OddF, 2, G::eta2().scale(&Exact::from_int(3))));
        let b = single(OddF, 1, G::eta2()).add(&single(OddE, 1, G::eta1().scale(&Exact::from_int(-2))));
        let c = cbh_product(&a, &b).unwrap();
        let leak = c.add(&a.add(&b).scale(&Exact::from_int(-1)));
        for (_, _, g) in leak.terms() {
            assert!(g.c1.is_zero() && g.c_eta1.is_zero() && g.c_eta2.is_zero());
        }
        assert!(!leak.is_zero());
    }

    #[test]
    fn rejects_even_weight() {
        let a = single(E, 1, G::scalar(Exact::one()));
        let b = single(OddF, 1, G::eta2());
        assert_eq!(cbh_product(&a, &b), Err(CbhError::NonNilpotent));
    }
}
