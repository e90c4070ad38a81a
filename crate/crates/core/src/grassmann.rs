//! The Grassmann algebra ∧[η₁, η₂] and its Berezin integral.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::algebra::Parity;
use crate::scalar::{Coeff, Scalar};

/// `c1 + cη1·η₁ + cη2·η₂ + cη12·η₁η₂`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grassmann<S> {
    pub c1: S,
    pub c_eta1: S,
    pub c_eta2: S,
    pub c_eta12: S,
}

impl<S: Scalar> Grassmann<S> {
    pub fn new(c1: S, c_eta1: S, c_eta2: S, c_eta12: S) -> Self {
        Grassmann { c1, c_eta1, c_eta2, c_eta12 }
    }

    pub fn scalar(c: S) -> Self {
        Grassmann::new(c, S::zero(), S::zero(), S::zero())
    }

    pub fn eta1() -> Self {
        Grassmann::new(S::zero(), S::one(), S::zero(), S::zero())
    }

    pub fn eta2() -> Self {
        Grassmann::new(S::zero(), S::zero(), S::one(), S::zero())
    }

    pub fn eta12() -> Self {
        Grassmann::new(S::zero(), S::zero(), S::zero(), S::one())
    }

    pub fn components(&self) -> [&S; 4] {
        [&self.c1, &self.c_eta1, &self.c_eta2, &self.c_eta12]
    }

    /// Parity if homogeneous; zero is even.
    pub fn parity(&self) -> Option<Parity> {
        let even = !self.c1.is_zero() || !self.c_eta12.is_zero();
        let odd = !self.c_eta1.is_zero() || !self.c_eta2.is_zero();
        match (even, odd) {
            (true, true) => None,
            (false, true) => Some(Parity::Odd),
            _ => Some(Parity::Even),
        }
    }

    /// True when only the η₁ and η₂ components may be nonzero.
    pub fn is_odd(&self) -> bool {
        self.c1.is_zero() && self.c_eta12.is_zero()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Grassmann<T> {
        Grassmann::new(f(&self.c1), f(&self.c_eta1), f(&self.c_eta2), f(&self.c_eta12))
    }
}

/// Graded product.
pub fn g_mul<S: Scalar>(a: &Grassmann<S>, b: &Grassmann<S>) -> Grassmann<S> {
    a.clone() * b.clone()
}

/// `∫dη₂dη₁ a`, normalized so that `∫dη₂dη₁ η₁η₂ = 1`.
pub fn berezin<S: Scalar>(a: &Grassmann<S>) -> S {
    a.c_eta12.clone()
}

impl<S: Scalar> Add for Grassmann<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Grassmann::new(
            self.c1 + o.c1,
            self.c_eta1 + o.c_eta1,
            self.c_eta2 + o.c_eta2,
            self.c_eta12 + o.c_eta12,
        )
    }
}

impl<S: Scalar> AddAssign for Grassmann<S> {
    fn add_assign(&mut self, o: Self) {
        self.c1 += o.c1;
        self.c_eta1 += o.c_eta1;
        self.c_eta2 += o.c_eta2;
        self.c_eta12 += o.c_eta12;
    }
}

impl<S: Scalar> Sub for Grassmann<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Grassmann::new(
            self.c1 - o.c1,
            self.c_eta1 - o.c_eta1,
            self.c_eta2 - o.c_eta2,
            self.c_eta12 - o.c_eta12,
        )
    }
}

impl<S: Scalar> Neg for Grassmann<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Grassmann::new(-self.c1, -self.c_eta1, -self.c_eta2, -self.c_eta12)
    }
}

impl<S: Scalar> Mul for Grassmann<S> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let Grassmann { c1: a0, c_eta1: a1, c_eta2: a2, c_eta12: a12 } = self;
        let Grassmann { c1: b0, c_eta1: b1, c_eta2: b2, c_eta12: b12 } = o;
        // η₂η₁ = −η₁η₂
        let top = a0.clone() * b12 + a12 * b0.clone() + a1.clone() * b2.clone() - a2.clone() * b1.clone();
        Grassmann::new(
            a0.clone() * b0.clone(),
            a0.clone() * b1 + a1 * b0.clone(),
            a0 * b2 + a2 * b0,
            top,
        )
    }
}

impl<S: Scalar> Coeff for Grassmann<S> {
    type Base = S;

    fn zero() -> Self {
        Grassmann::scalar(S::zero())
    }
    fn is_zero(&self) -> bool {
        self.c1.is_zero() && self.c_eta1.is_zero() && self.c_eta2.is_zero() && self.c_eta12.is_zero()
    }
    fn from_base(b: S) -> Self {
        Grassmann::scalar(b)
    }
    fn scale(&self, b: &S) -> Self {
        Grassmann::new(
            self.c1.clone() * b.clone(),
            self.c_eta1.clone() * b.clone(),
            self.c_eta2.clone() * b.clone(),
            self.c_eta12.clone() * b.clone(),
        )
    }
}

impl<S: Scalar> fmt::Display for Grassmann<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}; {}η₁; {}η₂; {}η₁η₂]", self.c1, self.c_eta1, self.c_eta2, self.c_eta12)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Coeff, Exact};

    type G = Grassmann<Exact>;

    fn basis() -> [G; 4] {
        [G::scalar(Exact::one()), G::eta1(), G::eta2(), G::eta12()]
    }

    /// Product of basis monomials by sign counting on generator index lists.
    fn oracle_product(i: usize, j: usize) -> G {
        let gens = |m: usize| -> Vec<u8> {
            match m {
                0 => vec![],
                1 => vec![1],
                2 => vec![2],
                _ => vec![1, 2],
            }
        };
        let mut word = gens(i);
        word.extend(gens(j));
        // bubble sort counting transpositions; repeated generator kills the term
        let mut sign = 1i64;
        for a in 0..word.len() {
            for b in 0..word.len() - 1 - a {
                if word[b] > word[b + 1] {
                    word.swap(b, b + 1);
                    sign = -sign;
                }
            }
        }
        if word.windows(2).any(|w| w[0] == w[1]) {
            return G::zero();
        }
        let idx = match word.as_slice() {
            [] => 0,
            [1] => 1,
            [2] => 2,
            _ => 3,
        };
        basis()[idx].scale(&Exact::from_int(sign))
    }

    #[test]
    fn multiplication_table_matches_sign_counting() {
        let b = basis();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(g_mul(&b[i], &b[j]), oracle_product(i, j), "({i},{j})");
            }
        }
    }

    #[test]
    fn examples() {
        assert!(g_mul(&G::eta1(), &G::eta1()).is_zero());
        assert_eq!(g_mul(&G::eta2(), &G::eta1()), -G::eta12());
        let one = G::scalar(Exact::one());
        let lhs = g_mul(&(one.clone() + G::eta1()), &(one.clone() + G::eta2()));
        assert_eq!(lhs, one + G::eta1() + G::eta2() + G::eta12());
    }

    #[test]
    fn berezin_examples() {
        let one = G::scalar(Exact::one());
        assert_eq!(berezin(&(one.clone() + G::eta12())), Exact::one());
        assert_eq!(berezin(&one), Exact::zero());
        let odd = G::eta1().scale(&Exact::from_int(5)) + G::eta2().scale(&Exact::from_int(3));
        assert_eq!(berezin(&odd), Exact::zero());
    }

    #[test]
    fn associative_and_unital_on_basis_triples() {
        let b = basis();
        let one = G::scalar(Exact::one());
        for x in &b {
            assert_eq!(g_mul(&one, x), *x);
            assert_eq!(g_mul(x, &one), *x);
            for y in &b {
                for z in &b {
                    assert_eq!(g_mul(&g_mul(x, y), z), g_mul(x, &g_mul(y, z)));
                }
            }
        }
    }

    #[test]
    fn parity_is_additive() {
        let b = basis();
        for x in &b {
            for y in &b {
                let p = g_mul(x, y);
                if p.is_zero() {
                    continue;
                }
                let expect = x.parity().unwrap().sum(y.parity().unwrap());
                assert_eq!(p.parity(), Some(expect));
            }
        }
    }
}
