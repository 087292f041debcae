//! Exact Gaussian integers a + bi, enough arithmetic for character sums with
//! values in {1, i, −1, −i}.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct GaussianInt {
    pub re: i64,
    pub im: i64,
}

impl GaussianInt {
    pub const ZERO: Self = GaussianInt { re: 0, im: 0 };
    pub const ONE: Self = GaussianInt { re: 1, im: 0 };
    pub const I: Self = GaussianInt { re: 0, im: 1 };

    pub const fn new(re: i64, im: i64) -> Self {
        GaussianInt { re, im }
    }

    /// i^k.
    pub fn i_pow(k: u64) -> Self {
        match k % 4 {
            0 => Self::ONE,
            1 => Self::I,
            2 => -Self::ONE,
            _ => -Self::I,
        }
    }

    pub fn conj(self) -> Self {
        GaussianInt {
            re: self.re,
            im: -self.im,
        }
    }

    /// a² + b².
    pub fn norm(self) -> i128 {
        i128::from(self.re) * i128::from(self.re) + i128::from(self.im) * i128::from(self.im)
    }

    pub fn abs(self) -> f64 {
        (self.norm() as f64).sqrt()
    }
}

impl Add for GaussianInt {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        GaussianInt {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl AddAssign for GaussianInt {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for GaussianInt {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        GaussianInt {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl Neg for GaussianInt {
    type Output = Self;
    fn neg(self) -> Self {
        GaussianInt {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Mul for GaussianInt {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        GaussianInt {
            re: self.re * rhs.re - self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}

impl fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im < 0 {
            write!(f, "{} - {}i", self.re, -self.im)
        } else {
            write!(f, "{} + {}i", self.re, self.im)
        }
    }
}
