use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{to_f64, Rational};

/// Element a + b·√d of the real quadratic field Q(√d); `d` is a fixed positive non-square.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticSurd {
    #[serde(with = "crate::json::rational")]
    pub a: Rational,
    #[serde(with = "crate::json::rational")]
    pub b: Rational,
    #[serde(with = "crate::json::rational")]
    pub d: Rational,
}

impl QuadraticSurd {
    pub fn from_rational(a: Rational, d: &Rational) -> Self {
        Self { a, b: Rational::zero(), d: d.clone() }
    }

    /// Exact: a + b√d = 0 forces a = b = 0 when d is not a square.
    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.a) + to_f64(&self.b) * to_f64(&self.d).sqrt()
    }

    fn same_field(&self, o: &Self) {
        debug_assert_eq!(self.d, o.d, "surds over different fields");
    }
}

/// Exact square root of a non-negative rational, if it is rational.
pub fn rational_sqrt(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let isqrt = |n: &BigInt| {
        let r = n.sqrt();
        (&r * &r == *n).then_some(r)
    };
    Some(Rational::new(isqrt(x.numer())?, isqrt(x.denom())?))
}

impl Add for &QuadraticSurd {
    type Output = QuadraticSurd;
    fn add(self, o: &QuadraticSurd) -> QuadraticSurd {
        self.same_field(o);
        QuadraticSurd { a: &self.a + &o.a, b: &self.b + &o.b, d: self.d.clone() }
    }
}

impl Sub for &QuadraticSurd {
    type Output = QuadraticSurd;
    fn sub(self, o: &QuadraticSurd) -> QuadraticSurd {
        self.same_field(o);
        QuadraticSurd { a: &self.a - &o.a, b: &self.b - &o.b, d: self.d.clone() }
    }
}

impl Mul for &QuadraticSurd {
    type Output = QuadraticSurd;
    fn mul(self, o: &QuadraticSurd) -> QuadraticSurd {
        self.same_field(o);
        QuadraticSurd {
            a: &self.a * &o.a + &self.b * &o.b * &self.d,
            b: &self.a * &o.b + &self.b * &o.a,
            d: self.d.clone(),
        }
    }
}

impl Neg for &QuadraticSurd {
    type Output = QuadraticSurd;
    fn neg(self) -> QuadraticSurd {
        QuadraticSurd { a: -&self.a, b: -&self.b, d: self.d.clone() }
    }
}
