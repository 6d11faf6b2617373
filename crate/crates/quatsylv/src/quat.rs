//! Quaternion scalars over a real field `T`.
//!
//! `q = w + x·i + y·j + z·k` with `i² = j² = k² = ijk = −1`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_complex::Complex;

use crate::error::Error;
use crate::Real;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion<T> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Quaternion<T> {
    pub const fn new(w: T, x: T, y: T, z: T) -> Self {
        Quaternion { w, x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn one() -> Self {
        Self::real(T::one())
    }

    pub fn real(w: T) -> Self {
        Self::new(w, T::zero(), T::zero(), T::zero())
    }

    pub fn i() -> Self {
        Self::new(T::zero(), T::one(), T::zero(), T::zero())
    }

    pub fn j() -> Self {
        Self::new(T::zero(), T::zero(), T::one(), T::zero())
    }

    pub fn k() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::one())
    }

    pub fn from_array(c: [T; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }

    pub fn to_array(self) -> [T; 4] {
        [self.w, self.x, self.y, self.z]
    }

    /// Conjugate `w − xi − yj − zk`.
    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    /// η-conjugate `−η · conj(q) · η`.
    ///
    /// Fixes the real part and the two imaginary axes orthogonal to η and
    /// negates the η component.
    pub fn eta_conj(self, eta: EtaAxis) -> Self {
        let e = eta.unit::<T>();
        -(e * self.conj() * e)
    }

    pub fn norm_sqr(self) -> T {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> T {
        // hypot-style scaling keeps the norm finite for large components
        let m = self.w.abs().max(self.x.abs()).max(self.y.abs()).max(self.z.abs());
        if m == T::zero() {
            return T::zero();
        }
        let s = self.scale(m.recip());
        m * s.norm_sqr().sqrt()
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self) -> Option<Self> {
        let n2 = self.norm_sqr();
        if n2 == T::zero() {
            None
        } else {
            Some(self.conj().scale(n2.recip()))
        }
    }

    pub fn scale(self, s: T) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Split `q = c₁ + c₂·j` into complex parts `c₁ = w + x·i`, `c₂ = y + z·i`.
    pub fn to_complex_pair(self) -> (Complex<T>, Complex<T>) {
        (Complex::new(self.w, self.x), Complex::new(self.y, self.z))
    }

    pub fn from_complex_pair(c1: Complex<T>, c2: Complex<T>) -> Self {
        Self::new(c1.re, c1.im, c2.re, c2.im)
    }

    /// Componentwise comparison within `atol + rtol·max(|a|,|b|)`.
    pub fn approx_eq(self, other: Self, atol: T, rtol: T) -> bool {
        let lim = atol + rtol * self.norm().max(other.norm());
        (self - other).norm() <= lim
    }
}

impl<T: Real> Add for Quaternion<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> AddAssign for Quaternion<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Sub for Quaternion<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> SubAssign for Quaternion<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Real> Neg for Quaternion<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Hamilton product.
impl<T: Real> Mul for Quaternion<T> {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let a = self;
        Self::new(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }
}

impl<T: Real> fmt::Display for Quaternion<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.w)?;
        for (c, unit) in [(self.x, 'i'), (self.y, 'j'), (self.z, 'k')] {
            if c < T::zero() {
                write!(f, " - {}{}", -c, unit)?;
            } else {
                write!(f, " + {}{}", c, unit)?;
            }
        }
        Ok(())
    }
}

/// The fixed imaginary unit η ∈ {i, j, k} of the η-involutions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EtaAxis {
    I,
    J,
    K,
}

impl EtaAxis {
    pub const ALL: [EtaAxis; 3] = [EtaAxis::I, EtaAxis::J, EtaAxis::K];

    pub fn unit<T: Real>(self) -> Quaternion<T> {
        match self {
            EtaAxis::I => Quaternion::i(),
            EtaAxis::J => Quaternion::j(),
            EtaAxis::K => Quaternion::k(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EtaAxis::I => "i",
            EtaAxis::J => "j",
            EtaAxis::K => "k",
        }
    }
}

impl fmt::Display for EtaAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EtaAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "i" => Ok(EtaAxis::I),
            "j" => Ok(EtaAxis::J),
            "k" => Ok(EtaAxis::K),
            other => Err(Error::parse("eta axis", format!("expected one of i, j, k, got `{other}`"))),
        }
    }
}
