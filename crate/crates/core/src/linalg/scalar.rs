//! Real scalar abstraction shared by the double-precision kernel and the
//! multiprecision path used near exceptional points.

use std::cell::Cell;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_complex::Complex;
use num_traits::{Num, One, Zero};
use rug::Float;

/// Field operations needed by the dense complex algorithms.
pub trait RealScalar:
    Clone + Debug + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn sqrt(&self) -> Self;
    fn abs(&self) -> Self;
    /// Unit roundoff of the representation.
    fn epsilon() -> Self;
    /// Smallest value treated as a safe nonzero divisor.
    fn safe_min() -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn sinh(&self) -> Self;
    fn cosh(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
}

impl RealScalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn epsilon() -> Self {
        f64::EPSILON * 0.5
    }
    fn safe_min() -> Self {
        f64::MIN_POSITIVE
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn sinh(&self) -> Self {
        f64::sinh(*self)
    }
    fn cosh(&self) -> Self {
        f64::cosh(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
}

/// |re| + |im|, the cheap modulus used in convergence tests.
pub fn abs1<T: RealScalar>(z: &Complex<T>) -> T {
    z.re.abs() + z.im.abs()
}

/// Euclidean modulus.
pub fn modulus<T: RealScalar>(z: &Complex<T>) -> T {
    z.norm_sqr().sqrt()
}

thread_local! {
    static PRECISION: Cell<u32> = const { Cell::new(256) };
}

/// Runs `f` with newly created [`MpFloat`] values carrying `bits` of mantissa.
pub fn with_precision<R>(bits: u32, f: impl FnOnce() -> R) -> R {
    struct Restore(u32);
    impl Drop for Restore {
        fn drop(&mut self) {
            PRECISION.with(|p| p.set(self.0));
        }
    }
    let previous = PRECISION.with(|p| p.replace(bits.max(64)));
    let _restore = Restore(previous);
    f()
}

/// Mantissa bits used for newly created [`MpFloat`] values on this thread.
pub fn current_precision() -> u32 {
    PRECISION.with(Cell::get)
}

/// MPFR-backed real number. Constants take the thread's current precision
/// (see [`with_precision`]); arithmetic keeps the precision of the left operand.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct MpFloat(pub Float);

impl MpFloat {
    pub fn new(x: f64) -> Self {
        MpFloat(Float::with_val(current_precision(), x))
    }

    pub fn from_int(n: i64) -> Self {
        MpFloat(Float::with_val(current_precision(), n))
    }

}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr for MpFloat {
            type Output = MpFloat;
            fn $method(self, rhs: MpFloat) -> MpFloat {
                MpFloat(self.0 $op rhs.0)
            }
        }
    };
}

forward_binop!(Add, add, +);
forward_binop!(Sub, sub, -);
forward_binop!(Mul, mul, *);
forward_binop!(Div, div, /);
forward_binop!(Rem, rem, %);

impl Neg for MpFloat {
    type Output = MpFloat;
    fn neg(self) -> MpFloat {
        MpFloat(-self.0)
    }
}

impl Zero for MpFloat {
    fn zero() -> Self {
        MpFloat::new(0.0)
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for MpFloat {
    fn one() -> Self {
        MpFloat::new(1.0)
    }
}

impl Num for MpFloat {
    type FromStrRadixErr = rug::float::ParseFloatError;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        let parsed = Float::parse_radix(s, radix as i32)?;
        Ok(MpFloat(Float::with_val(current_precision(), parsed)))
    }
}

impl RealScalar for MpFloat {
    fn from_f64(x: f64) -> Self {
        MpFloat::new(x)
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
    fn sqrt(&self) -> Self {
        MpFloat(self.0.clone().sqrt())
    }
    fn abs(&self) -> Self {
        MpFloat(self.0.clone().abs())
    }
    fn epsilon() -> Self {
        let bits = current_precision() as i32;
        MpFloat(Float::with_val(current_precision(), Float::i_exp(1, -bits)))
    }
    fn safe_min() -> Self {
        MpFloat(Float::with_val(current_precision(), Float::i_exp(1, -(1 << 20))))
    }
    fn sin(&self) -> Self {
        MpFloat(self.0.clone().sin())
    }
    fn cos(&self) -> Self {
        MpFloat(self.0.clone().cos())
    }
    fn sinh(&self) -> Self {
        MpFloat(self.0.clone().sinh())
    }
    fn cosh(&self) -> Self {
        MpFloat(self.0.clone().cosh())
    }
    fn exp(&self) -> Self {
        MpFloat(self.0.clone().exp())
    }
    fn ln(&self) -> Self {
        MpFloat(self.0.clone().ln())
    }
}

/// Principal square root of a complex multiprecision number.
pub fn mp_complex_sqrt(z: &Complex<MpFloat>) -> Complex<MpFloat> {
    let prec = current_precision();
    let c = rug::Complex::with_val(prec, (&z.re.0, &z.im.0)).sqrt();
    let (re, im) = c.into_real_imag();
    Complex::new(MpFloat(re), MpFloat(im))
}

/// Sine and cosine of a complex multiprecision number.
pub fn mp_complex_sin_cos(z: &Complex<MpFloat>) -> (Complex<MpFloat>, Complex<MpFloat>) {
    let (sx, cx) = (z.re.sin(), z.re.cos());
    let (shy, chy) = (z.im.sinh(), z.im.cosh());
    let sin = Complex::new(sx.clone() * chy.clone(), cx.clone() * shy.clone());
    let cos = Complex::new(cx * chy, -(sx * shy));
    (sin, cos)
}

pub fn to_c64<T: RealScalar>(z: &Complex<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

pub fn from_c64<T: RealScalar>(z: Complex<f64>) -> Complex<T> {
    Complex::new(T::from_f64(z.re), T::from_f64(z.im))
}
