//! Truncated formal series in ζ⁻¹.
//!
//! Every series carries a truncation order `N`; all statements are modulo
//! ζ^{−N−1}. Binary operations reject mismatched orders instead of
//! silently re-truncating.

use num_complex::Complex64;
use thiserror::Error;

use crate::scalar::{Coeff, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("truncation order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("series has a component at ζ^{power}, not a tail")]
    NotATail { power: i64 },
    #[error("series is not of the form ζ + a₀ + O(ζ⁻¹)")]
    NotAnAut,
}

fn check_order(left: usize, right: usize) -> Result<(), SeriesError> {
    if left == right {
        Ok(())
    } else {
        Err(SeriesError::OrderMismatch { left, right })
    }
}

/// `Σ_{j=1..N} c₋ⱼ ζ^{−j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TailSeries<C> {
    coeffs: Vec<C>,
}

impl<C: Coeff> TailSeries<C> {
    pub fn zero(order: usize) -> Self {
        TailSeries { coeffs: vec![C::zero(); order] }
    }

    /// Coefficients of ζ⁻¹, ζ⁻², … in order; the length is the order.
    pub fn from_coeffs(coeffs: Vec<C>) -> Self {
        TailSeries { coeffs }
    }

    /// `c·ζ^{−power}`.
    pub fn monomial(power: usize, c: C, order: usize) -> Self {
        let mut s = Self::zero(order);
        if (1..=order).contains(&power) {
            s.coeffs[power - 1] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of ζ^{−j}; zero outside `1..=N`.
    pub fn coeff(&self, j: usize) -> C {
        if j >= 1 && j <= self.coeffs.len() {
            self.coeffs[j - 1].clone()
        } else {
            C::zero()
        }
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, j: usize, c: C) {
        self.coeffs[j - 1] = c;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &Self) -> Result<Self, SeriesError> {
        check_order(self.order(), o.order())?;
        Ok(TailSeries {
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.clone() + b.clone()).collect(),
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self, SeriesError> {
        check_order(self.order(), o.order())?;
        Ok(TailSeries {
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.clone() - b.clone()).collect(),
        })
    }

    pub fn scale(&self, s: &C::Base) -> Self {
        TailSeries { coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect() }
    }

    /// Left multiplication of every coefficient by `c`.
    pub fn left_mul(&self, c: &C) -> Self {
        TailSeries { coeffs: self.coeffs.iter().map(|x| c.clone() * x.clone()).collect() }
    }

    pub fn neg(&self) -> Self {
        TailSeries { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }

    /// Cauchy product; the result is again a tail (it starts at ζ⁻²).
    pub fn mul(&self, o: &Self) -> Result<Self, SeriesError> {
        check_order(self.order(), o.order())?;
        let n = self.order();
        let mut out = vec![C::zero(); n];
        for i in 1..=n {
            if self.coeffs[i - 1].is_zero() {
                continue;
            }
            for j in 1..=n - i {
                let k = i + j;
                out[k - 1] += self.coeffs[i - 1].clone() * o.coeffs[j - 1].clone();
            }
        }
        Ok(TailSeries { coeffs: out })
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> TailSeries<D> {
        TailSeries { coeffs: self.coeffs.iter().map(f).collect() }
    }
}

impl<S: Scalar> TailSeries<S> {
    /// Value of the truncated sum at a complex point.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let w = 1.0 / z;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut p = w;
        for c in &self.coeffs {
            acc += c.to_complex() * p;
            p *= w;
        }
        acc
    }
}

/// `ζ + a₀ + a₋₁ζ⁻¹ + … + a₋N ζ^{−N}` (an element of Aut₊O).
#[derive(Clone, Debug, PartialEq)]
pub struct AutSeries<C> {
    /// `a₀, a₋₁, …, a₋N`
    coeffs: Vec<C>,
}

impl<C: Coeff> AutSeries<C> {
    pub fn identity(order: usize) -> Self {
        AutSeries { coeffs: vec![C::zero(); order + 1] }
    }

    /// `coeffs = [a₀, a₋₁, …, a₋N]`.
    pub fn from_coeffs(coeffs: Vec<C>) -> Self {
        assert!(!coeffs.is_empty(), "AutSeries needs at least a₀");
        AutSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of ζ^{−j} (`j = 0` is the constant term).
    pub fn coeff(&self, j: usize) -> C {
        self.coeffs.get(j).cloned().unwrap_or_else(C::zero)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, j: usize, c: C) {
        self.coeffs[j] = c;
    }

    /// The ζ⁻¹… part as a tail.
    pub fn tail(&self) -> TailSeries<C> {
        TailSeries::from_coeffs(self.coeffs[1..].to_vec())
    }

    pub fn is_identity(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> AutSeries<D> {
        AutSeries { coeffs: self.coeffs.iter().map(f).collect() }
    }
}

impl<S: Scalar> AutSeries<S> {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        z + self.coeffs[0].to_complex() + self.tail().eval(z)
    }
}

/// General truncated Laurent series `Σ_{p=top}^{−N} c_p ζ^p`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series<C> {
    top: i64,
    order: usize,
    /// `coeffs[i]` multiplies ζ^{top − i}
    coeffs: Vec<C>,
}

impl<C: Coeff> Series<C> {
    pub fn zero(top: i64, order: usize) -> Self {
        let len = (top + order as i64 + 1).max(0) as usize;
        Series { top, order, coeffs: vec![C::zero(); len] }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(0, order);
        s.coeffs[0] = C::one();
        s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn top(&self) -> i64 {
        self.top
    }

    pub fn coeff(&self, power: i64) -> C {
        let i = self.top - power;
        if i < 0 || i as usize >= self.coeffs.len() {
            C::zero()
        } else {
            self.coeffs[i as usize].clone()
        }
    }

    fn add_at(&mut self, power: i64, c: C) {
        let i = self.top - power;
        if i >= 0 && (i as usize) < self.coeffs.len() {
            self.coeffs[i as usize] += c;
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self, SeriesError> {
        check_order(self.order, o.order)?;
        let top = self.top.max(o.top);
        let mut out = Self::zero(top, self.order);
        for p in -(self.order as i64)..=top {
            out.add_at(p, self.coeff(p) + o.coeff(p));
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self, SeriesError> {
        check_order(self.order, o.order)?;
        let top = self.top.max(o.top);
        let mut out = Self::zero(top, self.order);
        for p in -(self.order as i64)..=top {
            out.add_at(p, self.coeff(p) - o.coeff(p));
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn scale(&self, s: &C::Base) -> Self {
        Series { top: self.top, order: self.order, coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect() }
    }

    /// Strip leading zero coefficients.
    pub fn normalized(&self) -> Self {
        let mut top = self.top;
        while top > -(self.order as i64) && self.coeff(top).is_zero() {
            top -= 1;
        }
        let mut out = Self::zero(top, self.order);
        for p in -(self.order as i64)..=top {
            out.add_at(p, self.coeff(p));
        }
        out
    }

    /// Reinterpret as a tail, failing if any power ≥ 0 is nonzero.
    pub fn into_tail(self) -> Result<TailSeries<C>, SeriesError> {
        for p in 0..=self.top {
            if !self.coeff(p).is_zero() {
                return Err(SeriesError::NotATail { power: p });
            }
        }
        Ok(TailSeries::from_coeffs((1..=self.order as i64).map(|j| self.coeff(-j)).collect()))
    }

    /// Reinterpret as an element of Aut₊O.
    pub fn into_aut(self) -> Result<AutSeries<C>, SeriesError> {
        for p in 2..=self.top {
            if !self.coeff(p).is_zero() {
                return Err(SeriesError::NotAnAut);
            }
        }
        if self.coeff(1) != C::one() {
            return Err(SeriesError::NotAnAut);
        }
        Ok(AutSeries::from_coeffs((0..=self.order as i64).map(|j| self.coeff(-j)).collect()))
    }
}

impl<C: Coeff> From<&TailSeries<C>> for Series<C> {
    fn from(t: &TailSeries<C>) -> Self {
        let mut s = Series::zero(-1, t.order());
        for j in 1..=t.order() {
            s.add_at(-(j as i64), t.coeff(j));
        }
        s
    }
}

impl<C: Coeff> From<&AutSeries<C>> for Series<C> {
    fn from(a: &AutSeries<C>) -> Self {
        let mut s = Series::zero(1, a.order());
        s.add_at(1, C::one());
        for j in 0..=a.order() {
            s.add_at(-(j as i64), a.coeff(j));
        }
        s
    }
}

/// Cauchy product of general series, discarding powers below ζ^{−N}.
pub fn series_mul<C: Coeff>(a: &Series<C>, b: &Series<C>) -> Result<Series<C>, SeriesError> {
    check_order(a.order, b.order)?;
    let n = a.order as i64;
    let mut out = Series::zero(a.top + b.top, a.order);
    for (i, ca) in a.coeffs.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        let pa = a.top - i as i64;
        for (j, cb) in b.coeffs.iter().enumerate() {
            let pb = b.top - j as i64;
            if pa + pb < -n {
                break;
            }
            out.add_at(pa + pb, ca.clone() * cb.clone());
        }
    }
    Ok(out)
}

/// `1/ρ(ζ)` as a tail, via `r₁ = 1`, `r_{m+1} = −a₀r_m − Σ_{j=1}^{m−1} a₋ⱼ r_{m−j}`.
pub fn series_inv_aut<C: Coeff>(rho: &AutSeries<C>) -> TailSeries<C> {
    let n = rho.order();
    let mut r: Vec<C> = Vec::with_capacity(n);
    if n == 0 {
        return TailSeries::from_coeffs(r);
    }
    r.push(C::one());
    for m in 1..n {
        let mut next = -(rho.coeff(0) * r[m - 1].clone());
        for j in 1..m {
            next = next - rho.coeff(j) * r[m - j - 1].clone();
        }
        r.push(next);
    }
    TailSeries::from_coeffs(r)
}

/// `exp(a) = Σ_{m=0..N} a^m/m!` for a tail `a`.
pub fn series_exp<C: Coeff>(a: &TailSeries<C>) -> Series<C> {
    let n = a.order();
    let mut out = Series::one(n);
    let mut power = a.clone();
    let mut fact: i64 = 1;
    for m in 1..=n {
        fact *= m as i64;
        let term = power.scale(&<C::Base as Scalar>::from_frac(1, fact));
        out = out.add(&Series::from(&term)).expect("same order");
        if m < n {
            power = power.mul(a).expect("same order");
            if power.is_zero() {
                break;
            }
        }
    }
    out
}

/// `exp(a)` minus its constant term 1, as a tail. Handy when the exponential
/// only enters through products with other tails.
pub fn series_exp_tail<C: Coeff>(a: &TailSeries<C>) -> TailSeries<C> {
    let mut s = series_exp(a);
    s.coeffs[0] = C::zero();
    s.into_tail().expect("exp of a tail is 1 + tail")
}

/// Term-wise ∂_ζ of a tail, `ζ^{−n} ↦ −n ζ^{−n−1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Derivative<C> {
    pub series: TailSeries<C>,
    /// Coefficient of ζ^{−N−1} that fell outside the truncation window.
    pub dropped: C,
}

impl<C: Coeff> Derivative<C> {
    pub fn lost_precision(&self) -> bool {
        !self.dropped.is_zero()
    }
}

pub fn series_derive<C: Coeff>(a: &TailSeries<C>) -> Derivative<C> {
    let n = a.order();
    let mut out = vec![C::zero(); n];
    for j in 1..n {
        out[j] = a.coeff(j).scale(&<C::Base as Scalar>::from_int(-(j as i64)));
    }
    let dropped =
        if n == 0 { C::zero() } else { a.coeff(n).scale(&<C::Base as Scalar>::from_int(-(n as i64))) };
    Derivative { series: TailSeries::from_coeffs(out), dropped }
}

/// `a(ρ(ζ))`: each ζ^{−j} in `a` replaced by `(1/ρ)^j`.
pub fn substitute<C: Coeff>(a: &TailSeries<C>, rho: &AutSeries<C>) -> Result<TailSeries<C>, SeriesError> {
    check_order(a.order(), rho.order())?;
    let inv = series_inv_aut(rho);
    let mut out = TailSeries::zero(a.order());
    let mut power = inv.clone();
    for j in 1..=a.order() {
        let c = a.coeff(j);
        if !c.is_zero() {
            out = out.add(&power.left_mul(&c))?;
        }
        if j < a.order() {
            power = power.mul(&inv)?;
        }
    }
    Ok(out)
}

/// Group law `(ρ∗μ)(z) = μ(ρ(z))`.
pub fn aut_compose<C: Coeff>(rho: &AutSeries<C>, mu: &AutSeries<C>) -> Result<AutSeries<C>, SeriesError> {
    check_order(rho.order(), mu.order())?;
    let tail = substitute(&mu.tail(), rho)?;
    let mut coeffs = rho.coeffs().to_vec();
    coeffs[0] = coeffs[0].clone() + mu.coeff(0);
    for j in 1..=rho.order() {
        coeffs[j] = coeffs[j].clone() + tail.coeff(j);
    }
    Ok(AutSeries::from_coeffs(coeffs))
}
