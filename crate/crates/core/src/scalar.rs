//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar the toolkit is generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`] scalar.
pub type Cplx<T> = Complex<T>;

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Converts an index/count into the working scalar.
#[inline]
pub fn from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Unit complex number `e^{iθ}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Cplx<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// Compensated (Kahan–Babuška) accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum<T> {
    sum: T,
    comp: T,
}

impl<T: Real> KahanSum<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), comp: T::zero() }
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

/// Compensated accumulator for complex values.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSumC<T> {
    re: KahanSum<T>,
    im: KahanSum<T>,
}

impl<T: Real> KahanSumC<T> {
    pub fn new() -> Self {
        Self { re: KahanSum::new(), im: KahanSum::new() }
    }

    #[inline]
    pub fn add(&mut self, z: Cplx<T>) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Cplx<T> {
        Complex::new(self.re.value(), self.im.value())
    }
}

/// `log(exp(a) + exp(b))` without overflow.
pub fn log_add_exp<T: Real>(a: T, b: T) -> T {
    if a == T::neg_infinity() {
        return b;
    }
    if b == T::neg_infinity() {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}
