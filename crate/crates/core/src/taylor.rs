//! Truncated bivariate Taylor jets and the kernel
//! `H(x, y) = 1 / ((a x - b y + 1)^2 + (a y + b x)^2)^2 = |z w + 1|^{-4}`.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{exact_rational, Scalar};

/// Coefficients `c[m][n]` of `x^m y^n` (offsets from the base point), for
/// `0 <= m, n <= L`. Products drop terms above degree `L` in either variable.
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorJet<T> {
    l: usize,
    coeffs: Vec<T>,
}

impl<T: Scalar> TaylorJet<T> {
    pub fn zero(l: usize) -> Self {
        Self {
            l,
            coeffs: vec![T::zero(); (l + 1) * (l + 1)],
        }
    }

    pub fn constant(value: T, l: usize) -> Self {
        let mut jet = Self::zero(l);
        jet.coeffs[0] = value;
        jet
    }

    /// The coordinate `x` expanded around `base`.
    pub fn var_x(base: T, l: usize) -> Self {
        let mut jet = Self::constant(base, l);
        if l > 0 {
            jet.coeffs[l + 1] = T::one();
        }
        jet
    }

    pub fn var_y(base: T, l: usize) -> Self {
        let mut jet = Self::constant(base, l);
        if l > 0 {
            jet.coeffs[1] = T::one();
        }
        jet
    }

    pub fn from_coeffs(l: usize, coeffs: Vec<T>) -> Self {
        assert_eq!(coeffs.len(), (l + 1) * (l + 1), "coefficient count");
        Self { l, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.l
    }

    #[inline]
    pub fn coeff(&self, m: usize, n: usize) -> &T {
        &self.coeffs[m * (self.l + 1) + n]
    }

    #[inline]
    fn coeff_mut(&mut self, m: usize, n: usize) -> &mut T {
        &mut self.coeffs[m * (self.l + 1) + n]
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    fn check_degree(&self, other: &Self) {
        assert_eq!(self.l, other.l, "jets of different degree");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_degree(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Self { l: self.l, coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-T::one()))
    }

    pub fn scale(&self, factor: &T) -> Self {
        Self {
            l: self.l,
            coeffs: self.coeffs.iter().map(|c| c.clone() * factor.clone()).collect(),
        }
    }

    fn nonzero_terms(&self) -> Vec<(usize, usize, T)> {
        let w = self.l + 1;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(idx, c)| (idx / w, idx % w, c.clone()))
            .collect()
    }

    /// Truncated product. Cost is proportional to the number of nonzero
    /// terms of `self`, which keeps products with low-degree polynomials
    /// cheap.
    pub fn mul(&self, other: &Self) -> Self {
        self.check_degree(other);
        let l = self.l;
        let mut out = Self::zero(l);
        for (i, j, a) in self.nonzero_terms() {
            for m in i..=l {
                for n in j..=l {
                    let b = other.coeff(m - i, n - j);
                    if !b.is_zero() {
                        let c = out.coeff_mut(m, n);
                        *c = c.clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    /// `1 / self`, solving `self * r = 1` degree by degree.
    pub fn recip(&self) -> Result<Self> {
        let c0 = self.coeffs[0].clone();
        if c0.is_zero() || !c0.is_finite_value() {
            return Err(Error::SingularJet);
        }
        let l = self.l;
        let terms: Vec<_> = self
            .nonzero_terms()
            .into_iter()
            .filter(|&(i, j, _)| (i, j) != (0, 0))
            .collect();
        let inv0 = T::one() / c0;
        let mut r = Self::zero(l);
        for m in 0..=l {
            for n in 0..=l {
                let mut acc = if (m, n) == (0, 0) { T::one() } else { T::zero() };
                for (i, j, f) in &terms {
                    if *i <= m && *j <= n {
                        acc = acc - f.clone() * r.coeff(m - i, n - j).clone();
                    }
                }
                *r.coeff_mut(m, n) = acc * inv0.clone();
            }
        }
        Ok(r)
    }

    /// Evaluates the truncated polynomial at offsets `(dx, dy)`.
    pub fn eval(&self, dx: &T, dy: &T) -> T {
        let mut total = T::zero();
        let mut px = T::one();
        for m in 0..=self.l {
            let mut row = T::zero();
            for n in (0..=self.l).rev() {
                row = row * dy.clone() + self.coeff(m, n).clone();
            }
            total = total + px.clone() * row;
            px = px * dx.clone();
        }
        total
    }
}

/// Taylor coefficients of the kernel at one pixel.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelMatrix {
    jet: TaylorJet<f64>,
}

impl KernelMatrix {
    pub fn degree(&self) -> usize {
        self.jet.l
    }

    /// `(1/(m! n!)) d^{m+n} H / dx^m dy^n`.
    pub fn coefficient(&self, m: usize, n: usize) -> f64 {
        *self.jet.coeff(m, n)
    }

    /// `d^{m+n} H / dx^m dy^n`.
    pub fn derivative(&self, m: usize, n: usize) -> f64 {
        self.coefficient(m, n) * factorial(m) * factorial(n)
    }

    /// Row-major coefficients, `m` major.
    pub fn coefficients(&self) -> &[f64] {
        self.jet.coeffs()
    }

    pub fn jet(&self) -> &TaylorJet<f64> {
        &self.jet
    }
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `(a^2+b^2)(x^2+y^2) + 2(a x - b y) + 1` as a jet around `(x0, y0)`.
pub fn kernel_base_jet<T: Scalar>(a: &T, b: &T, x0: &T, y0: &T, l: usize) -> TaylorJet<T> {
    let two = T::from_int(2);
    let r2 = a.clone() * a.clone() + b.clone() * b.clone();
    let mut s = TaylorJet::zero(l);
    *s.coeff_mut(0, 0) = r2.clone() * (x0.clone() * x0.clone() + y0.clone() * y0.clone())
        + two.clone() * (a.clone() * x0.clone() - b.clone() * y0.clone())
        + T::one();
    if l >= 1 {
        *s.coeff_mut(1, 0) = two.clone() * (r2.clone() * x0.clone() + a.clone());
        *s.coeff_mut(0, 1) = two * (r2.clone() * y0.clone() - b.clone());
    }
    if l >= 2 {
        *s.coeff_mut(2, 0) = r2.clone();
        *s.coeff_mut(0, 2) = r2;
    }
    s
}

/// Kernel jet in any scalar type.
pub fn kernel_jet<T: Scalar>(a: &T, b: &T, x0: &T, y0: &T, l: usize) -> Result<TaylorJet<T>> {
    let s = kernel_base_jet(a, b, x0, y0, l);
    if s.coeff(0, 0).is_zero() {
        return Err(Error::SingularKernel {
            a: a.approx_f64(),
            b: b.approx_f64(),
        });
    }
    s.mul(&s).recip().map_err(|_| Error::SingularKernel {
        a: a.approx_f64(),
        b: b.approx_f64(),
    })
}

/// Kernel coefficients for `w = a + b i` at base `z0 = x0 + y0 i`.
pub fn kernel_matrix(a: f64, b: f64, x0: f64, y0: f64, l: usize) -> Result<KernelMatrix> {
    let jet = kernel_jet(&a, &b, &x0, &y0, l)?;
    if !jet.coeffs.iter().all(|c| c.is_finite()) {
        return Err(Error::SingularKernel { a, b });
    }
    Ok(KernelMatrix { jet })
}

fn exact(v: f64) -> BigRational {
    exact_rational(v).expect("finite input")
}

/// Raw kernel evaluated exactly.
fn kernel_exact(a: &BigRational, b: &BigRational, x: &BigRational, y: &BigRational) -> BigRational {
    let one = BigRational::one();
    let u = a * x - b * y + &one;
    let v = a * y + b * x;
    let s = &u * &u + &v * &v;
    one / (&s * &s)
}

/// Compares the jet derivatives with `m + n <= min(4, L)` against central
/// finite differences of the raw kernel with step `1e-4`. Kernel values are
/// computed in exact rational arithmetic, so only the `O(h^2)` truncation
/// error of the stencil remains. Returns the largest deviation, measured
/// relative to `max(|fd|, 1)`.
pub fn kernel_matrix_fd_check(a: f64, b: f64, x0: f64, y0: f64, l: usize) -> Result<f64> {
    let km = kernel_matrix(a, b, x0, y0, l)?;
    let (ea, eb, ex, ey) = (exact(a), exact(b), exact(x0), exact(y0));
    let h = BigRational::new(1.into(), 10_000.into());
    let half_h = &h / BigRational::from_integer(2.into());
    let binom = |n: usize, k: usize| -> i64 {
        (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
    };
    let top = l.min(4);
    let mut worst = 0.0f64;
    for m in 0..=top {
        for n in 0..=(top - m) {
            let mut sum = BigRational::zero();
            for p in 0..=m {
                // offset (m/2 - p) h, written with half steps to stay exact
                let dx = &half_h * BigRational::from_integer((m as i64 - 2 * p as i64).into());
                for q in 0..=n {
                    let dy = &half_h * BigRational::from_integer((n as i64 - 2 * q as i64).into());
                    let w = binom(m, p) * binom(n, q) * if (p + q) % 2 == 0 { 1 } else { -1 };
                    sum += BigRational::from_integer(w.into())
                        * kernel_exact(&ea, &eb, &(&ex + &dx), &(&ey + dy));
                }
            }
            let fd = sum / num_traits::pow(h.clone(), m + n);
            let fd = fd.approx_f64();
            let dev = (km.derivative(m, n) - fd).abs() / fd.abs().max(1.0);
            worst = worst.max(dev);
        }
    }
    Ok(worst)
}
