//! Stochastic dynamics of the flow `𝒢_t = Θ¹_t Θ⁰_t Q(ρ_t)`.
//!
//! The state is kept as truncated series in ζ⁻¹: the uniformizing map
//! `ρ_t` and ten internal processes. One Euler–Maruyama step evaluates all
//! drifts and diffusions at the pre-step state.

mod cbh;
mod drivers;
mod generator;
mod state;

pub use cbh::{cbh_product, CbhError, LoopElement};
pub use drivers::{DriverBundle, Increments};
pub use generator::{ito_drift, GeneratorError};
pub use state::{assemble_state_vector, aut_to_virasoro, exp_loop_operator, loop_operator};

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::series::{series_exp, series_inv_aut, series_mul, AutSeries, Series, SeriesError, TailSeries};

/// How `ρ⁻¹` enters the `x^{12,H}` diffusion.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dx12HReading {
    /// `√2(x^{2,e}e^{−x^H}x^F − x^{2,f}(e^{x^H} + e^{−x^H}x^E x^F))ρ⁻¹`
    #[default]
    WholeBracket,
    /// `√2(x^{2,e}e^{−x^H}x^Fρ⁻¹ − x^{2,f}(e^{x^H} + e^{−x^H}x^E x^Fρ⁻¹))`
    Literal,
}

/// Which SDE system drives the odd and `η₁η₂` processes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OddSystem {
    /// The seven printed displays, as written.
    #[default]
    Printed,
    /// Re-derived from `Θ⁻¹dΘ` with noise `η₁E_{−α/2} + η₂E_{α/2}`,
    /// `E_{−α/2} = f/√2`, `E_{α/2} = e/√2`, and the bracket table in use.
    GroupConsistent,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowParams<S> {
    pub tau: S,
    pub dx12h: Dx12HReading,
    pub odd: OddSystem,
}

impl<S> FlowParams<S> {
    pub fn new(tau: S) -> Self {
        FlowParams { tau, dx12h: Dx12HReading::default(), odd: OddSystem::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowState<S> {
    pub rho: AutSeries<S>,
    pub x_e: TailSeries<S>,
    pub x_h: TailSeries<S>,
    pub x_f: TailSeries<S>,
    pub x1e: TailSeries<S>,
    pub x1f: TailSeries<S>,
    pub x2e: TailSeries<S>,
    pub x2f: TailSeries<S>,
    pub x12e: TailSeries<S>,
    pub x12h: TailSeries<S>,
    pub x12f: TailSeries<S>,
    pub t: f64,
}

/// Process names in the order of [`FlowState::processes`].
pub const PROCESS_NAMES: [&str; 10] =
    ["xE", "xH", "xF", "x1e", "x1f", "x2e", "x2f", "x12E", "x12H", "x12F"];

impl<S: Scalar> FlowState<S> {
    /// `𝒢₀ = id`: `ρ = z`, every internal process zero.
    pub fn initial(order: usize) -> Self {
        let z = TailSeries::zero(order);
        FlowState {
            rho: AutSeries::identity(order),
            x_e: z.clone(),
            x_h: z.clone(),
            x_f: z.clone(),
            x1e: z.clone(),
            x1f: z.clone(),
            x2e: z.clone(),
            x2f: z.clone(),
            x12e: z.clone(),
            x12h: z.clone(),
            x12f: z,
            t: 0.0,
        }
    }

    pub fn order(&self) -> usize {
        self.rho.order()
    }

    pub fn processes(&self) -> [&TailSeries<S>; 10] {
        [
            &self.x_e, &self.x_h, &self.x_f, &self.x1e, &self.x1f, &self.x2e, &self.x2f, &self.x12e,
            &self.x12h, &self.x12f,
        ]
    }

    pub fn processes_mut(&mut self) -> [&mut TailSeries<S>; 10] {
        [
            &mut self.x_e,
            &mut self.x_h,
            &mut self.x_f,
            &mut self.x1e,
            &mut self.x1f,
            &mut self.x2e,
            &mut self.x2f,
            &mut self.x12e,
            &mut self.x12h,
            &mut self.x12f,
        ]
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> FlowState<T> {
        FlowState {
            rho: self.rho.map(f),
            x_e: self.x_e.map(f),
            x_h: self.x_h.map(f),
            x_f: self.x_f.map(f),
            x1e: self.x1e.map(f),
            x1f: self.x1f.map(f),
            x2e: self.x2e.map(f),
            x2f: self.x2f.map(f),
            x12e: self.x12e.map(f),
            x12h: self.x12h.map(f),
            x12f: self.x12f.map(f),
            t: self.t,
        }
    }

    /// True if any coefficient is NaN or infinite.
    pub fn is_degenerate(&self) -> bool {
        let bad = |c: &S| {
            let z = c.to_complex();
            !(z.re.is_finite() && z.im.is_finite())
        };
        self.rho.coeffs().iter().any(bad) || self.processes().iter().any(|p| p.coeffs().iter().any(bad))
    }

    /// One Euler–Maruyama step of the full system.
    pub fn step(&self, dt: &S, inc: &Increments<S>, params: &FlowParams<S>) -> Result<Self, SeriesError> {
        let tau = params.tau.clone();
        let rho = loewner_step(&self.rho, dt, &inc.db0);
        let terms = Terms::new(self)?;
        let [de, dh, df] = even_with(&terms, dt, inc, &tau)?;
        let odd = match params.odd {
            OddSystem::Printed => odd_printed_with(&terms, self, dt, &inc.dbeta, &tau, params.dx12h)?,
            OddSystem::GroupConsistent => odd_consistent_with(&terms, self, dt, &inc.dbeta, &tau)?,
        };
        let mut next = FlowState { rho, ..self.clone() };
        next.x_e = next.x_e.add(&de)?;
        next.x_h = next.x_h.add(&dh)?;
        next.x_f = next.x_f.add(&df)?;
        let targets = [
            &mut next.x1e,
            &mut next.x1f,
            &mut next.x2e,
            &mut next.x2f,
            &mut next.x12e,
            &mut next.x12h,
            &mut next.x12f,
        ];
        for (x, d) in targets.into_iter().zip(odd.iter()) {
            *x = x.add(d)?;
        }
        next.t = self.t + dt.to_complex().re;
        Ok(next)
    }
}

/// `ρ ↦ ρ + 2ρ⁻¹dt − dB⁰`.
pub fn loewner_step<S: Scalar>(rho: &AutSeries<S>, dt: &S, db0: &S) -> AutSeries<S> {
    let inv = series_inv_aut(rho);
    let mut out = rho.clone();
    out.set_coeff(0, rho.coeff(0) - db0.clone());
    let two_dt = S::from_int(2) * dt.clone();
    for j in 1..=rho.order() {
        out.set_coeff(j, rho.coeff(j) + inv.coeff(j) * two_dt.clone());
    }
    out
}

fn tail_mul<S: Scalar>(a: &Series<S>, b: &Series<S>) -> Result<Series<S>, SeriesError> {
    series_mul(a, b)
}

/// Shared subexpressions of the SDE coefficients at one state.
struct Terms<S> {
    order: usize,
    r: Series<S>,
    r2: Series<S>,
    x_e: Series<S>,
    x_f: Series<S>,
    exp_h: Series<S>,
    exp_mh: Series<S>,
    exp_2h: Series<S>,
    exp_m2h: Series<S>,
}

impl<S: Scalar> Terms<S> {
    fn new(s: &FlowState<S>) -> Result<Self, SeriesError> {
        let r = Series::from(&series_inv_aut(&s.rho));
        let r2 = series_mul(&r, &r)?;
        let exp = |c: i64| series_exp(&s.x_h.scale(&S::from_int(c)));
        Ok(Terms {
            order: s.order(),
            r,
            r2,
            x_e: Series::from(&s.x_e),
            x_f: Series::from(&s.x_f),
            exp_h: exp(1),
            exp_mh: exp(-1),
            exp_2h: exp(2),
            exp_m2h: exp(-2),
        })
    }

    fn one(&self) -> Series<S> {
        Series::one(self.order)
    }

    /// `e^{x^H} + e^{−x^H}x^E x^F`
    fn a(&self) -> Result<Series<S>, SeriesError> {
        self.exp_h.add(&tail_mul(&tail_mul(&self.exp_mh, &self.x_e)?, &self.x_f)?)
    }
}

fn rt2<S: Scalar>() -> S {
    S::sqrt2()
}

fn inv_rt2<S: Scalar>() -> S {
    S::sqrt2().inv().expect("√2 invertible")
}

/// Increments `(dx^E, dx^H, dx^F)`. The final `dx^F` diffusion term is
/// driven by `dB³`.
pub fn even_step<S: Scalar>(
    s: &FlowState<S>,
    dt: &S,
    inc: &Increments<S>,
    tau: &S,
) -> Result<[TailSeries<S>; 3], SeriesError> {
    even_with(&Terms::new(s)?, dt, inc, tau)
}

fn even_with<S: Scalar>(
    t: &Terms<S>,
    dt: &S,
    inc: &Increments<S>,
    tau: &S,
) -> Result<[TailSeries<S>; 3], SeriesError> {
    let i = S::imag_unit();
    let c = inv_rt2::<S>();
    // dB² + i dB³
    let db23 = inc.db2.clone() + i.clone() * inc.db3.clone();

    let dxe = tail_mul(&t.exp_2h, &t.r)?.scale(&(-(c.clone() * db23.clone())));

    let mut dxh = t.r2.scale(&(-(tau.clone() * S::from_frac(1, 2) * dt.clone())));
    dxh = dxh.sub(&t.r.scale(&(c.clone() * inc.db1.clone())))?;
    dxh = dxh.add(&tail_mul(&t.x_f, &t.r)?.scale(&(c.clone() * db23)))?;

    let xf2 = tail_mul(&t.x_f, &t.x_f)?;
    let mut dxf = tail_mul(&t.x_f, &t.r)?.scale(&(-(rt2::<S>() * inc.db1.clone())));
    dxf = dxf.sub(&tail_mul(&t.one().sub(&xf2)?, &t.r)?.scale(&(c.clone() * inc.db2.clone())))?;
    dxf = dxf.add(&tail_mul(&t.one().add(&xf2)?, &t.r)?.scale(&(i * c * inc.db3.clone())))?;

    Ok([dxe.into_tail()?, dxh.into_tail()?, dxf.into_tail()?])
}

/// Increments of `(x^{1,e}, x^{1,f}, x^{2,e}, x^{2,f}, x^{12,E}, x^{12,H}, x^{12,F})`.
pub fn odd_step<S: Scalar>(
    s: &FlowState<S>,
    dt: &S,
    dbeta: &S,
    tau: &S,
    reading: Dx12HReading,
) -> Result<[TailSeries<S>; 7], SeriesError> {
    odd_printed_with(&Terms::new(s)?, s, dt, dbeta, tau, reading)
}

fn odd_printed_with<S: Scalar>(
    t: &Terms<S>,
    s: &FlowState<S>,
    dt: &S,
    dbeta: &S,
    tau: &S,
    reading: Dx12HReading,
) -> Result<[TailSeries<S>; 7], SeriesError> {
    let r2b = rt2::<S>() * dbeta.clone();
    let a = t.a()?;
    let ar = tail_mul(&a, &t.r)?;
    let emh_r = tail_mul(&t.exp_mh, &t.r)?;
    let x2e = Series::from(&s.x2e);
    let x2f = Series::from(&s.x2f);
    let exf = tail_mul(&t.x_e, &t.x_f)?;
    let em2h_exf = tail_mul(&t.exp_m2h, &exf)?;

    let d1e = ar.scale(&r2b);
    let d1f = tail_mul(&emh_r, &t.x_f)?.scale(&(-r2b.clone()));
    let d2e = tail_mul(&emh_r, &t.x_e)?.scale(&(-r2b.clone()));
    let d2f = emh_r.scale(&r2b);

    let drift_e = tail_mul(&tail_mul(&t.one().add(&em2h_exf)?, &t.x_e)?, &t.r2)?;
    let d12e = drift_e
        .scale(&(tau.clone() * dt.clone()))
        .sub(&tail_mul(&x2e, &ar)?.scale(&r2b))?;

    let drift_h = tail_mul(&t.one().add(&em2h_exf.scale(&S::from_int(2)))?, &t.r2)?;
    let first = tail_mul(&tail_mul(&x2e, &t.exp_mh)?, &t.x_f)?;
    let diff_h = match reading {
        Dx12HReading::WholeBracket => tail_mul(&first.sub(&tail_mul(&x2f, &a)?)?, &t.r)?,
        Dx12HReading::Literal => {
            let inner = t.exp_h.add(&tail_mul(&tail_mul(&t.exp_mh, &exf)?, &t.r)?)?;
            tail_mul(&first, &t.r)?.sub(&tail_mul(&x2f, &inner)?)?
        }
    };
    let d12h = drift_h
        .scale(&(-(tau.clone() * S::from_frac(1, 2) * dt.clone())))
        .add(&diff_h.scale(&r2b))?;

    let drift_f = tail_mul(&tail_mul(&t.exp_m2h, &t.x_f)?, &t.r2)?;
    let d12f = drift_f
        .scale(&(-(tau.clone() * dt.clone())))
        .sub(&tail_mul(&tail_mul(&x2f, &emh_r)?, &t.x_f)?.scale(&r2b))?;

    Ok([
        d1e.into_tail()?,
        d1f.into_tail()?,
        d2e.into_tail()?,
        d2f.into_tail()?,
        d12e.into_tail()?,
        d12h.into_tail()?,
        d12f.into_tail()?,
    ])
}

/// Odd increments solving `Θ¹⁻¹dΘ¹ = N dβ + (τ/2)N² dt` with
/// `N = η₁A + η₂B`, `A = Ad_{Θ⁰}(f ρ⁻¹)/√2`, `B = Ad_{Θ⁰}(e ρ⁻¹)/√2`:
/// `dL¹ = A dβ`, `dL² = B dβ`, `dL¹² = −(τ/2)[A,B]dt − [A,L²]dβ`.
pub fn odd_step_consistent<S: Scalar>(
    s: &FlowState<S>,
    dt: &S,
    dbeta: &S,
    tau: &S,
) -> Result<[TailSeries<S>; 7], SeriesError> {
    odd_consistent_with(&Terms::new(s)?, s, dt, dbeta, tau)
}

fn odd_consistent_with<S: Scalar>(
    t: &Terms<S>,
    s: &FlowState<S>,
    dt: &S,
    dbeta: &S,
    tau: &S,
) -> Result<[TailSeries<S>; 7], SeriesError> {
    let c = inv_rt2::<S>();
    let emh_r = tail_mul(&t.exp_mh, &t.r)?;
    let a_e = tail_mul(&emh_r, &t.x_e)?.scale(&(-c.clone()));
    let a_f = emh_r.scale(&c);
    let b_e = tail_mul(&t.a()?, &t.r)?.scale(&c);
    let b_f = tail_mul(&emh_r, &t.x_f)?.scale(&(-c));
    let x2e = Series::from(&s.x2e);
    let x2f = Series::from(&s.x2f);

    // [ae·e + af·f, be·e + bf·f] = 2ae·be E + (ae·bf + af·be) H − 2af·bf F
    let ab_e = tail_mul(&a_e, &b_e)?.scale(&S::from_int(2));
    let ab_h = tail_mul(&a_e, &b_f)?.add(&tail_mul(&a_f, &b_e)?)?;
    let ab_f = tail_mul(&a_f, &b_f)?.scale(&S::from_int(-2));
    let al_e = tail_mul(&a_e, &x2e)?.scale(&S::from_int(2));
    let al_h = tail_mul(&a_e, &x2f)?.add(&tail_mul(&a_f, &x2e)?)?;
    let al_f = tail_mul(&a_f, &x2f)?.scale(&S::from_int(-2));

    let drift = -(tau.clone() * S::from_frac(1, 2) * dt.clone());
    let d12 = |ab: &Series<S>, al: &Series<S>| ab.scale(&drift).sub(&al.scale(dbeta));
    Ok([
        a_e.scale(dbeta).into_tail()?,
        a_f.scale(dbeta).into_tail()?,
        b_e.scale(dbeta).into_tail()?,
        b_f.scale(dbeta).into_tail()?,
        d12(&ab_e, &al_e)?.into_tail()?,
        d12(&ab_h, &al_h)?.into_tail()?,
        d12(&ab_f, &al_f)?.into_tail()?,
    ])
}
