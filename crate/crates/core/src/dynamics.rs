//! The Hurwitz Gauss map, digit expansions, convergents and the natural
//! extension `(z, w) -> (1/z - [1/z], 1/([1/z] + w))`.

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::gaussian::{in_closed_domain, nearest_gaussian, recip, to_scalar, GaussianInt};
use crate::scalar::{FloatScalar, Scalar};

/// One application of the Gauss map: the digit `a_{n+1} = [1/z_n]` and the
/// remainder `z_{n+1} = 1/z_n - a_{n+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionStep<T> {
    pub digit: GaussianInt,
    pub remainder: Complex<T>,
}

/// Convergent `p_n / q_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent<I> {
    pub p: Complex<I>,
    pub q: Complex<I>,
}

/// Point of the natural extension: `z` carries the future of the expansion,
/// `w` the reversed past.
#[derive(Clone, Debug, PartialEq)]
pub struct NatExtState<T> {
    pub z: Complex<T>,
    pub w: Complex<T>,
}

impl<T: Scalar> NatExtState<T> {
    pub fn new(z: Complex<T>, w: Complex<T>) -> Self {
        Self { z, w }
    }
}

/// Seed `((log 4 - 1) + (log 7 - 2) i, 0)`; its orbit is believed to
/// equidistribute.
pub fn default_seed() -> NatExtState<f64> {
    NatExtState::new(
        Complex::new(4f64.ln() - 1.0, 7f64.ln() - 2.0),
        Complex::new(0.0, 0.0),
    )
}

fn domain_error<T: Scalar>(z: &Complex<T>) -> Error {
    Error::Domain(format!("{}{:+}i", z.re.approx_f64(), z.im.approx_f64()))
}

/// Gauss map step. `Ok(None)` means the expansion has terminated (`z = 0`).
pub fn gauss_step<T: Scalar>(z: &Complex<T>) -> Result<Option<ExpansionStep<T>>> {
    if z.is_zero() {
        return Ok(None);
    }
    if !in_closed_domain(z) {
        return Err(domain_error(z));
    }
    let inv = recip(z);
    let digit = nearest_gaussian(&inv);
    let remainder = inv - to_scalar::<T>(digit);
    Ok(Some(ExpansionStep { digit, remainder }))
}

/// Iterates [`gauss_step`] until termination or `max_steps` digits.
pub fn expand<T: Scalar>(z: &Complex<T>, max_steps: usize) -> Result<Vec<ExpansionStep<T>>> {
    if !z.is_zero() && !in_closed_domain(z) {
        return Err(domain_error(z));
    }
    let mut steps = Vec::new();
    let mut current = z.clone();
    while steps.len() < max_steps {
        match gauss_step(&current)? {
            Some(step) => {
                current = step.remainder.clone();
                steps.push(step);
            }
            None => break,
        }
    }
    Ok(steps)
}

/// Sign used for the `q_{n-2}` term of the denominator recurrence.
///
/// `Plus` is the recurrence that reproduces the finite continued fraction.
/// `Minus` exists only so validation suites can inject a known fault.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum QRecurrence {
    #[default]
    Plus,
    Minus,
}

/// `p_n = a_n p_{n-1} + p_{n-2}`, `q_n = a_n q_{n-1} + q_{n-2}` with
/// `p_{-1} = q_0 = 1`, `p_0 = q_{-1} = 0`. Returns `p_1/q_1 ..= p_N/q_N`.
pub fn convergents<I>(digits: &[GaussianInt]) -> Result<Vec<Convergent<I>>>
where
    I: Integer + Signed + Clone + From<i64>,
{
    convergents_with(digits, QRecurrence::Plus)
}

pub fn convergents_with<I>(digits: &[GaussianInt], sign: QRecurrence) -> Result<Vec<Convergent<I>>>
where
    I: Integer + Signed + Clone + From<i64>,
{
    if digits.is_empty() {
        return Err(Error::EmptyInput);
    }
    let lift = |g: &GaussianInt| Complex::new(I::from(g.re), I::from(g.im));
    let mut p_prev2: Complex<I> = Complex::one();
    let mut p_prev: Complex<I> = Complex::zero();
    let mut q_prev2: Complex<I> = Complex::zero();
    let mut q_prev: Complex<I> = Complex::one();
    let mut out = Vec::with_capacity(digits.len());
    for a in digits {
        let a = lift(a);
        let p = a.clone() * p_prev.clone() + p_prev2;
        let q = match sign {
            QRecurrence::Plus => a * q_prev.clone() + q_prev2,
            QRecurrence::Minus => a * q_prev.clone() - q_prev2,
        };
        p_prev2 = std::mem::replace(&mut p_prev, p.clone());
        q_prev2 = std::mem::replace(&mut q_prev, q.clone());
        out.push(Convergent { p, q });
    }
    Ok(out)
}

/// `|p_n q_{n-1} - p_{n-1} q_n| = 1` for every `n >= 1` (seeds included).
pub fn determinant_identity_holds<I>(convs: &[Convergent<I>]) -> bool
where
    I: Integer + Signed + Clone + From<i64>,
{
    let mut prev = Convergent {
        p: Complex::<I>::zero(),
        q: Complex::<I>::one(),
    };
    convs.iter().all(|c| {
        let det = c.p.clone() * prev.q.clone() - prev.p.clone() * c.q.clone();
        prev = c.clone();
        det.norm_sqr().is_one()
    })
}

/// Exact value of the finite continued fraction `1/(a_1 + 1/(a_2 + ... + 1/a_N))`.
pub fn continued_fraction_value(digits: &[GaussianInt]) -> Option<Complex<BigRational>> {
    let mut tail: Option<Complex<BigRational>> = None;
    for a in digits.iter().rev() {
        let a = to_scalar::<BigRational>(*a);
        let denom = match tail {
            Some(t) => a + t,
            None => a,
        };
        if denom.is_zero() {
            return None;
        }
        tail = Some(denom.inv());
    }
    tail
}

/// Per-index outcome of [`check_approximation`].
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct ApproximationRow {
    pub n: usize,
    /// `|z - p_n/q_n| < 2 sqrt(2) |z_n| / |q_n|^2` (exact hits count as holding).
    pub error_bound: bool,
    /// `|q_{n+2} / q_n| >= 3/2`; `None` when `q_{n+2}` is not available.
    pub growth: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct ApproximationReport {
    pub rows: Vec<ApproximationRow>,
    pub pass: bool,
}

/// Checks the convergent error bound and the denominator growth bound along
/// an expansion. Exact when `T = BigRational`.
pub fn check_approximation<T: Scalar>(
    z: &Complex<T>,
    steps: &[ExpansionStep<T>],
    convs: &[Convergent<BigInt>],
) -> Result<ApproximationReport> {
    if steps.len() != convs.len() {
        return Err(Error::LengthMismatch {
            left: steps.len(),
            right: convs.len(),
        });
    }
    let eight = T::from_int(8);
    // q_0 = 1 heads the denominator list so growth is also checked from n = 0.
    let q0 = Complex::new(BigInt::one(), BigInt::zero());
    let qs: Vec<&Complex<BigInt>> = std::iter::once(&q0)
        .chain(convs.iter().map(|c| &c.q))
        .collect();
    let mut rows = Vec::with_capacity(convs.len() + 1);
    let nine = BigInt::from(9);
    let four = BigInt::from(4);
    for n in 0..qs.len() {
        let error_bound = if n == 0 {
            true
        } else {
            let c = &convs[n - 1];
            let zn = &steps[n - 1].remainder;
            let p = Complex::new(T::from_bigint(&c.p.re), T::from_bigint(&c.p.im));
            let q = Complex::new(T::from_bigint(&c.q.re), T::from_bigint(&c.q.im));
            // |z - p/q|^2 < 8 |z_n|^2 / |q|^4  <=>  |zq - p|^2 |q|^2 < 8 |z_n|^2
            let lhs = (z.clone() * q.clone() - p).norm_sqr() * q.norm_sqr();
            let rhs = eight.clone() * zn.norm_sqr();
            lhs < rhs || lhs.is_zero()
        };
        let growth = qs
            .get(n + 2)
            .map(|q2| four.clone() * q2.norm_sqr() >= nine.clone() * qs[n].norm_sqr());
        rows.push(ApproximationRow {
            n,
            error_bound,
            growth,
        });
    }
    let pass = rows
        .iter()
        .all(|r| r.error_bound && r.growth.unwrap_or(true));
    Ok(ApproximationReport { rows, pass })
}

/// One step of the natural extension. `z = 0` is a fixed point.
pub fn natext_step<T: Scalar>(s: &NatExtState<T>) -> Result<NatExtState<T>> {
    match gauss_step(&s.z)? {
        None => Ok(s.clone()),
        Some(step) => {
            let denom = to_scalar::<T>(step.digit) + s.w.clone();
            assert!(
                !denom.is_zero(),
                "digit + w vanished; w must stay in the unit disk"
            );
            Ok(NatExtState {
                z: step.remainder,
                w: denom.inv(),
            })
        }
    }
}

/// Relative defect of the pointwise invariance identity of the density
/// `1/|zw+1|^4` under one natural-extension step:
/// `rho(z', w') / (|z|^4 |a+w|^4)` against `rho(z, w)`.
pub fn invariance_residual<T: FloatScalar>(z: Complex<T>, w: Complex<T>) -> Result<T> {
    let step = gauss_step(&z)?.ok_or_else(|| domain_error(&z))?;
    let a = to_scalar::<T>(step.digit);
    let z_next = step.remainder;
    let w_next = (a + w).inv();
    let one = Complex::new(T::one(), T::zero());
    let rho = |u: Complex<T>, v: Complex<T>| (u * v + one).norm_sqr().powi(-2);
    let jacobian = (z.norm_sqr() * (a + w).norm_sqr()).powi(-2);
    let before = rho(z, w);
    let after = rho(z_next, w_next) * jacobian;
    Ok(((after - before) / before).abs())
}

/// Long-running natural-extension orbit with termination detection.
#[derive(Clone, Debug)]
pub struct NatExtOrbit<T> {
    state: NatExtState<T>,
    steps: u64,
}

impl<T: FloatScalar> NatExtOrbit<T> {
    pub fn new(seed: NatExtState<T>) -> Self {
        Self {
            state: seed,
            steps: 0,
        }
    }

    pub fn state(&self) -> &NatExtState<T> {
        &self.state
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Applies one step; aborts if `|z|` collapses below `1e-15`.
    #[inline]
    pub fn advance(&mut self) -> Result<&NatExtState<T>> {
        let z = self.state.z;
        if z.norm_sqr() < T::lit(1e-30) {
            return Err(Error::OrbitTerminated { step: self.steps });
        }
        let inv = recip(&z);
        let digit = nearest_gaussian(&inv);
        let a = to_scalar::<T>(digit);
        self.state.z = inv - a;
        self.state.w = (a + self.state.w).inv();
        self.steps += 1;
        Ok(&self.state)
    }
}

/// Gauss-map orbit of the first coordinate only.
#[derive(Clone, Debug)]
pub struct GaussOrbit<T> {
    z: Complex<T>,
    steps: u64,
}

impl<T: FloatScalar> GaussOrbit<T> {
    pub fn new(z: Complex<T>) -> Self {
        Self { z, steps: 0 }
    }

    #[inline]
    pub fn advance(&mut self) -> Result<Complex<T>> {
        if self.z.norm_sqr() < T::lit(1e-30) {
            return Err(Error::OrbitTerminated { step: self.steps });
        }
        let inv = recip(&self.z);
        self.z = inv - to_scalar::<T>(nearest_gaussian(&inv));
        self.steps += 1;
        Ok(self.z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::exact_rational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn g(re: i64, im: i64) -> GaussianInt {
        Complex::new(re, im)
    }

    #[test]
    fn gauss_step_examples() {
        assert!(gauss_step(&Complex::new(0.0, 0.0)).unwrap().is_none());

        let s = gauss_step(&Complex::new(0.0, 0.5)).unwrap().unwrap();
        assert_eq!(s.digit, g(0, -2));
        assert_eq!(s.remainder, Complex::new(0.0, 0.0));

        let s = gauss_step(&Complex::new(0.4, 0.0)).unwrap().unwrap();
        assert_eq!(s.digit, g(3, 0));
        assert_eq!(s.remainder, Complex::new(-0.5, 0.0));
        // exact route: 1/(2/5) = 5/2 and 5/2 rounds up to 3
        let s = gauss_step(&Complex::new(q(2, 5), q(0, 1))).unwrap().unwrap();
        assert_eq!(s.digit, g(3, 0));
        assert_eq!(s.remainder, Complex::new(q(-1, 2), q(0, 1)));
    }

    #[test]
    fn gauss_step_rejects_points_outside_k() {
        assert!(matches!(
            gauss_step(&Complex::new(0.7, 0.0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn expand_examples() {
        let z = Complex::new(q(2, 5), q(-1, 5));
        let steps = expand(&z, 10).unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].digit, g(2, 1));
        assert!(steps[0].remainder.is_zero());

        assert!(expand(&Complex::new(0.0, 0.0), 5).unwrap().is_empty());

        let seed = default_seed().z;
        let steps = expand(&seed, 1).unwrap();
        assert_eq!(steps[0].digit, g(3, 0));
        let inv = seed.inv();
        assert!((inv.re - 2.539).abs() < 1e-3 && (inv.im - 0.356).abs() < 1e-3);
    }

    #[test]
    fn convergent_examples() {
        let c = convergents::<i64>(&[g(2, 1)]).unwrap();
        assert_eq!(c[0].p, g(1, 0));
        assert_eq!(c[0].q, g(2, 1));

        // p_2 = -2i * p_1 + p_0 with p_0 = 0; a seed of 1 would give 1-2i,
        // which does not reproduce the finite fraction
        let c = convergents::<i64>(&[g(3, 0), g(0, -2)]).unwrap();
        assert_eq!(c[1].p, g(0, -2));
        assert_eq!(c[1].q, g(1, -6));
        let v = continued_fraction_value(&[g(3, 0), g(0, -2)]).unwrap();
        let pq = Complex::new(q(0, 1), q(-2, 1)) / Complex::new(q(1, 1), q(-6, 1));
        assert_eq!(v, pq);
        let wrong = Complex::new(q(1, 1), q(-2, 1)) / Complex::new(q(1, 1), q(-6, 1));
        assert_ne!(v, wrong);

        let c = convergents::<i64>(&[g(2, 0), g(2, 0)]).unwrap();
        assert_eq!((c[1].p, c[1].q), (g(2, 0), g(5, 0)));

        assert!(matches!(convergents::<i64>(&[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn printed_minus_sign_breaks_the_determinant_identity() {
        let digits = [g(3, 0), g(0, -2), g(2, 1), g(-4, 1)];
        let plus = convergents_with::<i64>(&digits, QRecurrence::Plus).unwrap();
        let minus = convergents_with::<i64>(&digits, QRecurrence::Minus).unwrap();
        assert!(determinant_identity_holds(&plus));
        assert!(!determinant_identity_holds(&minus));
    }

    #[test]
    fn approximation_examples() {
        let z = Complex::new(q(2, 5), q(-1, 5));
        let steps = expand(&z, 5).unwrap();
        let digits: Vec<_> = steps.iter().map(|s| s.digit).collect();
        let convs = convergents::<BigInt>(&digits).unwrap();
        let report = check_approximation(&z, &steps, &convs).unwrap();
        assert!(report.pass);
        assert_eq!(report.rows.len(), 2);

        let zero = Complex::new(q(0, 1), q(0, 1));
        let report = check_approximation(&zero, &[], &[]).unwrap();
        assert!(report.pass);

        assert!(matches!(
            check_approximation(&z, &steps, &[]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn natext_examples() {
        let s = natext_step(&NatExtState::new(Complex::new(0.4, 0.0), Complex::new(0.0, 0.0)))
            .unwrap();
        assert_eq!(s.z, Complex::new(-0.5, 0.0));
        assert!((s.w - Complex::new(1.0 / 3.0, 0.0)).norm() < 1e-15);

        let fixed = NatExtState::new(Complex::new(0.0, 0.0), Complex::new(0.2, 0.1));
        assert_eq!(natext_step(&fixed).unwrap(), fixed);

        let s = natext_step(&NatExtState::new(Complex::new(0.0, 0.5), Complex::new(0.0, 0.0)))
            .unwrap();
        assert_eq!(s.z, Complex::new(0.0, 0.0));
        assert_eq!(s.w, Complex::new(0.0, 0.5));
    }

    #[test]
    fn invariance_examples() {
        let r = invariance_residual(Complex::new(0.4, 0.0), Complex::new(0.0, 0.0)).unwrap();
        assert!(r < 1e-12);
        let r = invariance_residual(Complex::new(0.3, 0.2), Complex::new(0.1, -0.4)).unwrap();
        assert!(r < 1e-12);
    }

    #[test]
    fn orbit_aborts_on_zero() {
        let mut orbit = NatExtOrbit::new(NatExtState::new(Complex::new(0.0, 0.5), Complex::new(0.0, 0.0)));
        orbit.advance().unwrap();
        assert!(matches!(orbit.advance(), Err(Error::OrbitTerminated { step: 1 })));
    }

    #[test]
    fn orbit_matches_generic_step() {
        let mut orbit = NatExtOrbit::new(default_seed());
        let mut state = default_seed();
        for _ in 0..50 {
            state = natext_step(&state).unwrap();
            let fast = orbit.advance().unwrap();
            assert_eq!(fast, &state);
        }
    }

    #[test]
    fn exact_round_trip_of_dyadic_points() {
        for &(re, im) in &[(0.375, -0.125), (0.1, 0.2), (-0.4999, 0.3333)] {
            let z = Complex::new(exact_rational(re).unwrap(), exact_rational(im).unwrap());
            let steps = expand(&z, 10_000).unwrap();
            assert!(steps.last().unwrap().remainder.is_zero());
            let digits: Vec<_> = steps.iter().map(|s| s.digit).collect();
            assert_eq!(continued_fraction_value(&digits).unwrap(), z);
        }
    }
}
