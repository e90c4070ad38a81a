use crate::evolution::FlowState;
use crate::scalar::Scalar;
use crate::series::{series_derive, series_exp, series_mul, Series, SeriesError, TailSeries};

/// Berezin-projected `⟨0|E(z)𝒢|0⟩` in closed form:
///
/// `k(1 + x^{1,f}x^{2,e} + 2x^{12,H})∂x^F − k(x^{1,f}x^{2,f} − x^{12,F})(2∂x^H + 2e^{−2x^H}x^E∂x^F)
///  − 2k x^{1,f}∂x^{2,f} + k∂x^{12,F}`.
///
/// Coefficient `j` of the returned tail multiplies `z^{−j}`; the `z^{−n−1}`
/// coefficients for `n = 1 … N−1` are the ones kept by the truncation.
pub fn observable_current<S: Scalar>(s: &FlowState<S>, k: &S) -> Result<TailSeries<S>, SeriesError> {
    let n = s.order();
    let ser = |t: &TailSeries<S>| Series::from(t);
    let d = |t: &TailSeries<S>| Series::from(&series_derive(t).series);
    let mul = series_mul::<S>;

    let (x1f, x2e, x2f) = (ser(&s.x1f), ser(&s.x2e), ser(&s.x2f));
    let (x12h, x12f, x_e) = (ser(&s.x12h), ser(&s.x12f), ser(&s.x_e));
    let dxf = d(&s.x_f);
    let two = S::from_int(2);

    let pre = Series::one(n).add(&mul(&x1f, &x2e)?)?.add(&x12h.scale(&two))?;
    let first = mul(&pre, &dxf)?;

    let em2h = series_exp(&s.x_h.scale(&S::from_int(-2)));
    let inner = d(&s.x_h).scale(&two).add(&mul(&mul(&em2h, &x_e)?, &dxf)?.scale(&two))?;
    let second = mul(&mul(&x1f, &x2f)?.sub(&x12f)?, &inner)?;

    let third = mul(&x1f, &d(&s.x2f))?.scale(&two);
    let total = first.sub(&second)?.sub(&third)?.add(&d(&s.x12f))?;
    total.scale(k).into_tail()
}

/// The same pairing evaluated with the bracket table and ordering used by
/// the assembly route:
///
/// `−k(1 − 2x^{1,f}x^{2,e} − 2x^{12,H})e^{−2x^H}∂x^F + k(x^{1,f}x^{2,f} − x^{12,F})(2∂x^H + 2e^{−2x^H}x^E∂x^F)
///  + 2k x^{1,f}∂x^{2,f} − k∂x^{12,F}`.
pub fn observable_current_paired<S: Scalar>(s: &FlowState<S>, k: &S) -> Result<TailSeries<S>, SeriesError> {
    let n = s.order();
    let ser = |t: &TailSeries<S>| Series::from(t);
    let d = |t: &TailSeries<S>| Series::from(&series_derive(t).series);
    let mul = series_mul::<S>;

    let (x1f, x2e, x2f) = (ser(&s.x1f), ser(&s.x2e), ser(&s.x2f));
    let (x12h, x12f, x_e) = (ser(&s.x12h), ser(&s.x12f), ser(&s.x_e));
    let em2h = series_exp(&s.x_h.scale(&S::from_int(-2)));
    let e_dxf = mul(&em2h, &d(&s.x_f))?;
    let two = S::from_int(2);

    let pre = Series::one(n).sub(&mul(&x1f, &x2e)?.scale(&two))?.sub(&x12h.scale(&two))?;
    let first = mul(&pre, &e_dxf)?;
    let inner = d(&s.x_h).scale(&two).add(&mul(&x_e, &e_dxf)?.scale(&two))?;
    let second = mul(&mul(&x1f, &x2f)?.sub(&x12f)?, &inner)?;
    let third = mul(&x1f, &d(&s.x2f))?.scale(&two);
    let total = second.sub(&first)?.add(&third)?.sub(&d(&s.x12f))?;
    total.scale(k).into_tail()
}
