//! Multiple-precision complex numbers on top of MPFR floats.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Constant;
use rug::Float;

/// A complex number `re + i im` whose parts are MPFR floats of a common precision.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexValue {
    pub re: Float,
    pub im: Float,
}

impl ComplexValue {
    pub fn new(re: Float, im: Float) -> Self {
        ComplexValue { re, im }
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        ComplexValue {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn real(x: Float) -> Self {
        let p = x.prec();
        ComplexValue { re: x, im: Float::new(p) }
    }

    pub fn imag(y: Float) -> Self {
        let p = y.prec();
        ComplexValue { re: Float::new(p), im: y }
    }

    pub fn zero(prec: u32) -> Self {
        ComplexValue { re: Float::new(prec), im: Float::new(prec) }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_f64(prec, 1.0, 0.0)
    }

    pub fn i(prec: u32) -> Self {
        Self::from_f64(prec, 0.0, 1.0)
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    /// Re-round both parts to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> Self {
        ComplexValue {
            re: Float::with_val(prec, &self.re),
            im: Float::with_val(prec, &self.im),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        ComplexValue { re: self.re.clone(), im: Float::with_val(self.im.prec(), -&self.im) }
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }

    pub fn abs(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.hypot_ref(&self.im))
    }

    pub fn arg(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.im.atan2_ref(&self.re))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn mul_real(&self, x: &Float) -> Self {
        let p = self.prec();
        ComplexValue {
            re: Float::with_val(p, &self.re * x),
            im: Float::with_val(p, &self.im * x),
        }
    }

    pub fn div_real(&self, x: &Float) -> Self {
        let p = self.prec();
        ComplexValue {
            re: Float::with_val(p, &self.re / x),
            im: Float::with_val(p, &self.im / x),
        }
    }

    pub fn mul_f64(&self, x: f64) -> Self {
        let p = self.prec();
        ComplexValue {
            re: Float::with_val(p, &self.re * x),
            im: Float::with_val(p, &self.im * x),
        }
    }

    pub fn add_real(&self, x: &Float) -> Self {
        let p = self.prec();
        ComplexValue { re: Float::with_val(p, &self.re + x), im: self.im.clone() }
    }

    pub fn add_f64(&self, x: f64) -> Self {
        let p = self.prec();
        ComplexValue { re: Float::with_val(p, &self.re + x), im: self.im.clone() }
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> Self {
        let p = self.prec();
        ComplexValue { re: Float::with_val(p, -&self.im), im: self.re.clone() }
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn recip(&self) -> Self {
        let p = self.prec();
        let n = self.norm_sqr();
        ComplexValue {
            re: Float::with_val(p, &self.re / &n),
            im: Float::with_val(p, -&self.im) / &n,
        }
    }

    pub fn exp(&self) -> Self {
        let p = self.prec();
        let m = Float::with_val(p, self.re.exp_ref());
        let (s, c) = self.im.clone().sin_cos(Float::new(p));
        ComplexValue { re: c * &m, im: s * &m }
    }

    /// Principal logarithm, imaginary part in (-pi, pi].
    pub fn ln(&self) -> Self {
        ComplexValue { re: self.abs().ln(), im: self.arg() }
    }

    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        if self.is_zero() {
            return Self::zero(p);
        }
        let r = self.abs();
        if !self.re.is_sign_negative() {
            let mut a = Float::with_val(p, &r + &self.re) / 2u32;
            a.sqrt_mut();
            let b = Float::with_val(p, &self.im / &a) / 2u32;
            ComplexValue { re: a, im: b }
        } else {
            let mut b = Float::with_val(p, &r - &self.re) / 2u32;
            b.sqrt_mut();
            if self.im.is_sign_negative() {
                b = -b;
            }
            let a = Float::with_val(p, &self.im / &b) / 2u32;
            ComplexValue { re: a, im: b }
        }
    }

    pub fn sin(&self) -> Self {
        let p = self.prec();
        let (s, c) = self.re.clone().sin_cos(Float::new(p));
        let (sh, ch) = self.im.clone().sinh_cosh(Float::new(p));
        ComplexValue { re: s * ch, im: c * sh }
    }

    pub fn cos(&self) -> Self {
        let p = self.prec();
        let (s, c) = self.re.clone().sin_cos(Float::new(p));
        let (sh, ch) = self.im.clone().sinh_cosh(Float::new(p));
        ComplexValue { re: c * ch, im: -(s * sh) }
    }

    pub fn tan(&self) -> Self {
        &self.sin() / &self.cos()
    }

    /// `self^w` on the principal branch.
    pub fn pow(&self, w: &ComplexValue) -> Self {
        (&self.ln() * w).exp()
    }

    /// `x^self` for a positive real base.
    pub fn real_base_pow(x: &Float, e: &ComplexValue) -> Self {
        let lx = Float::with_val(e.prec(), x.ln_ref());
        e.mul_real(&lx).exp()
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one(self.prec());
        let mut b = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &b;
            }
            b = b.square();
            k >>= 1;
        }
        acc
    }

    /// Value of pi at the given precision.
    pub fn pi(prec: u32) -> Float {
        Float::with_val(prec, Constant::Pi)
    }
}

/// Decimal digits carried by a float of `prec` bits.
pub fn decimal_digits(prec: u32) -> usize {
    (prec as f64 / std::f64::consts::LOG2_10).floor() as usize
}

/// Full-precision decimal string of a float.
pub fn float_string(x: &Float) -> String {
    x.to_string_radix(10, Some(decimal_digits(x.prec())))
}

impl serde::Serialize for ComplexValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ComplexValue", 2)?;
        st.serialize_field("re", &float_string(&self.re))?;
        st.serialize_field("im", &float_string(&self.im))?;
        st.end()
    }
}

impl fmt::Display for ComplexValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = f.precision().unwrap_or(20);
        let re = self.re.to_string_radix(10, Some(d));
        let im = self.im.to_string_radix(10, Some(d));
        if self.im.is_sign_negative() {
            write!(f, "{} - {}i", re, im.trim_start_matches('-'))
        } else {
            write!(f, "{} + {}i", re, im)
        }
    }
}

impl<'a> Add<&'a ComplexValue> for &'a ComplexValue {
    type Output = ComplexValue;
    fn add(self, o: &ComplexValue) -> ComplexValue {
        let p = self.prec().max(o.prec());
        ComplexValue {
            re: Float::with_val(p, &self.re + &o.re),
            im: Float::with_val(p, &self.im + &o.im),
        }
    }
}

impl<'a> Sub<&'a ComplexValue> for &'a ComplexValue {
    type Output = ComplexValue;
    fn sub(self, o: &ComplexValue) -> ComplexValue {
        let p = self.prec().max(o.prec());
        ComplexValue {
            re: Float::with_val(p, &self.re - &o.re),
            im: Float::with_val(p, &self.im - &o.im),
        }
    }
}

impl<'a> Mul<&'a ComplexValue> for &'a ComplexValue {
    type Output = ComplexValue;
    fn mul(self, o: &ComplexValue) -> ComplexValue {
        let p = self.prec().max(o.prec());
        let re = Float::with_val(p, &self.re * &o.re) - Float::with_val(p, &self.im * &o.im);
        let im = Float::with_val(p, &self.re * &o.im) + Float::with_val(p, &self.im * &o.re);
        ComplexValue { re, im }
    }
}

impl<'a> Div<&'a ComplexValue> for &'a ComplexValue {
    type Output = ComplexValue;
    fn div(self, o: &ComplexValue) -> ComplexValue {
        let p = self.prec().max(o.prec());
        let n = o.norm_sqr();
        let re = Float::with_val(p, &self.re * &o.re) + Float::with_val(p, &self.im * &o.im);
        let im = Float::with_val(p, &self.im * &o.re) - Float::with_val(p, &self.re * &o.im);
        ComplexValue { re: re / &n, im: im / &n }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<ComplexValue> for ComplexValue {
            type Output = ComplexValue;
            fn $m(self, o: ComplexValue) -> ComplexValue {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a ComplexValue> for ComplexValue {
            type Output = ComplexValue;
            fn $m(self, o: &ComplexValue) -> ComplexValue {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<ComplexValue> for &'a ComplexValue {
            type Output = ComplexValue;
            fn $m(self, o: ComplexValue) -> ComplexValue {
                self.$m(&o)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for ComplexValue {
    type Output = ComplexValue;
    fn neg(self) -> ComplexValue {
        ComplexValue { re: -self.re, im: -self.im }
    }
}

impl<'a> Neg for &'a ComplexValue {
    type Output = ComplexValue;
    fn neg(self) -> ComplexValue {
        -(self.clone())
    }
}

impl<'a> AddAssign<&'a ComplexValue> for ComplexValue {
    fn add_assign(&mut self, o: &ComplexValue) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl AddAssign<ComplexValue> for ComplexValue {
    fn add_assign(&mut self, o: ComplexValue) {
        self.re += o.re;
        self.im += o.im;
    }
}

impl<'a> SubAssign<&'a ComplexValue> for ComplexValue {
    fn sub_assign(&mut self, o: &ComplexValue) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl<'a> MulAssign<&'a ComplexValue> for ComplexValue {
    fn mul_assign(&mut self, o: &ComplexValue) {
        *self = &*self * o;
    }
}
