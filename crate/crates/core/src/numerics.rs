//! Character values as sums of roots of unity.
//!
//! Values are carried as double-precision complex numbers, optionally paired
//! with an exact multiplicity vector over the exponents of a fixed root of
//! unity. Every quantity the library reports is an integer; `certify_integer`
//! is the single gate through which floating point results become integers.

use std::f64::consts::TAU;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// Default certification tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("value {re} + {im}i is not an integer within tolerance {tol}")]
    NotAnInteger { re: f64, im: f64, tol: f64 },
}

/// Exact element of `Z[zeta_m]` written as `sum_k coeffs[k] * zeta_m^k`.
///
/// The representation is not reduced modulo the cyclotomic polynomial, so two
/// different vectors may denote the same number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootSum {
    pub modulus: u32,
    pub coeffs: Vec<i64>,
}

impl RootSum {
    pub fn zero(modulus: u32) -> Self {
        RootSum { modulus, coeffs: vec![0; modulus as usize] }
    }

    pub fn single(modulus: u32, k: i64) -> Self {
        let mut r = Self::zero(modulus);
        r.coeffs[k.rem_euclid(modulus as i64) as usize] = 1;
        r
    }

    /// Re-expresses the sum over `zeta_{modulus * factor}`.
    fn lift(&self, factor: u32) -> Self {
        let m = self.modulus * factor;
        let mut out = Self::zero(m);
        for (k, &c) in self.coeffs.iter().enumerate() {
            out.coeffs[k * factor as usize] += c;
        }
        out
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        let l = lcm(a.modulus, b.modulus);
        (a.lift(l / a.modulus), b.lift(l / b.modulus))
    }

    pub fn l1_norm(&self) -> i64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    pub fn to_complex(&self) -> Complex64 {
        let m = self.modulus as f64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(k, &c)| Complex64::from_polar(c as f64, TAU * k as f64 / m))
            .sum()
    }

    pub fn conj(&self) -> Self {
        let m = self.modulus as usize;
        let mut out = Self::zero(self.modulus);
        for (k, &c) in self.coeffs.iter().enumerate() {
            out.coeffs[(m - k) % m] += c;
        }
        out
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u32, b: u32) -> u32 {
    a / gcd(a, b) * b
}

/// A character value.
#[derive(Debug, Clone, PartialEq)]
pub struct CharValue {
    pub value: Complex64,
    pub exact: Option<RootSum>,
}

impl CharValue {
    pub fn from_complex(value: Complex64) -> Self {
        CharValue { value, exact: None }
    }

    pub fn from_int(n: i64) -> Self {
        let mut exact = RootSum::zero(1);
        exact.coeffs[0] = n;
        CharValue { value: Complex64::new(n as f64, 0.0), exact: Some(exact) }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn re(&self) -> f64 {
        self.value.re
    }

    pub fn im(&self) -> f64 {
        self.value.im
    }

    pub fn conj(&self) -> Self {
        CharValue { value: self.value.conj(), exact: self.exact.as_ref().map(RootSum::conj) }
    }

    pub fn scale(&self, n: i64) -> Self {
        CharValue {
            value: self.value * n as f64,
            exact: self.exact.as_ref().map(|e| RootSum {
                modulus: e.modulus,
                coeffs: e.coeffs.iter().map(|c| c * n).collect(),
            }),
        }
    }
}

/// `exp(2 pi i k / m)`.
pub fn root_of_unity(m: u32, k: i64) -> CharValue {
    assert!(m >= 1, "root_of_unity requires m >= 1");
    let r = k.rem_euclid(m as i64);
    CharValue {
        value: Complex64::from_polar(1.0, TAU * r as f64 / m as f64),
        exact: Some(RootSum::single(m, r)),
    }
}

/// Rounds a value that must be an integer, failing loudly when it is not.
pub fn certify_integer(v: &CharValue, tol: f64) -> Result<i64, NumericsError> {
    certify_complex(v.value, tol)
}

pub fn certify_complex(z: Complex64, tol: f64) -> Result<i64, NumericsError> {
    let r = z.re.round();
    if (z.re - r).abs() < tol && z.im.abs() < tol && r.is_finite() {
        Ok(r as i64)
    } else {
        Err(NumericsError::NotAnInteger { re: z.re, im: z.im, tol })
    }
}

impl Add for CharValue {
    type Output = CharValue;
    fn add(self, rhs: CharValue) -> CharValue {
        let exact = match (self.exact, rhs.exact) {
            (Some(a), Some(b)) => {
                let (a, b) = RootSum::common(&a, &b);
                Some(RootSum {
                    modulus: a.modulus,
                    coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect(),
                })
            }
            _ => None,
        };
        CharValue { value: self.value + rhs.value, exact }
    }
}

impl AddAssign for CharValue {
    fn add_assign(&mut self, rhs: CharValue) {
        *self = std::mem::replace(self, CharValue::zero()) + rhs;
    }
}

impl Neg for CharValue {
    type Output = CharValue;
    fn neg(self) -> CharValue {
        self.scale(-1)
    }
}

impl Sub for CharValue {
    type Output = CharValue;
    fn sub(self, rhs: CharValue) -> CharValue {
        self + (-rhs)
    }
}

impl Mul for CharValue {
    type Output = CharValue;
    fn mul(self, rhs: CharValue) -> CharValue {
        let exact = match (self.exact, rhs.exact) {
            (Some(a), Some(b)) => {
                let (a, b) = RootSum::common(&a, &b);
                let m = a.modulus as usize;
                let mut out = RootSum::zero(a.modulus);
                for (i, &x) in a.coeffs.iter().enumerate().filter(|(_, &x)| x != 0) {
                    for (j, &y) in b.coeffs.iter().enumerate().filter(|(_, &y)| y != 0) {
                        out.coeffs[(i + j) % m] += x * y;
                    }
                }
                Some(out)
            }
            _ => None,
        };
        CharValue { value: self.value * rhs.value, exact }
    }
}

impl std::iter::Sum for CharValue {
    fn sum<I: Iterator<Item = CharValue>>(iter: I) -> CharValue {
        iter.fold(CharValue::zero(), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_roots() {
        assert_eq!(certify_integer(&root_of_unity(1, 0), DEFAULT_TOL), Ok(1));
        assert_eq!(certify_integer(&root_of_unity(2, 1), DEFAULT_TOL), Ok(-1));
        let i = root_of_unity(4, 1);
        assert!((i.value - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(i.exact.unwrap().coeffs, vec![0, 1, 0, 0]);
    }

    #[test]
    fn certification() {
        let v = CharValue::from_complex(Complex64::new(2.000_000_000_1, 0.0));
        assert_eq!(certify_integer(&v, DEFAULT_TOL), Ok(2));
        let v = CharValue::from_complex(Complex64::new(1.0, 0.5));
        assert!(matches!(certify_integer(&v, DEFAULT_TOL), Err(NumericsError::NotAnInteger { .. })));
        let v = root_of_unity(3, 1) + root_of_unity(3, 2) + CharValue::from_int(1);
        assert_eq!(certify_integer(&v, DEFAULT_TOL), Ok(0));
    }

    #[test]
    fn full_root_sums_vanish() {
        for m in 1..=200u32 {
            let s: CharValue = (0..m as i64).map(|k| root_of_unity(m, k)).sum();
            let expected = if m == 1 { 1 } else { 0 };
            assert_eq!(certify_integer(&s, DEFAULT_TOL), Ok(expected), "m = {m}");
        }
    }

    #[test]
    fn mixed_moduli_multiply() {
        // zeta_4 * zeta_6 = zeta_12^5
        let v = root_of_unity(4, 1) * root_of_unity(6, 1);
        let e = v.exact.clone().unwrap();
        assert_eq!(e.modulus, 12);
        assert_eq!(e.coeffs[5], 1);
        assert!((v.value - e.to_complex()).norm() < 1e-12);
    }

    proptest! {
        #[test]
        fn bounded_by_l1(m in 1u32..60, ks in proptest::collection::vec((-50i64..50, -3i64..4), 1..12)) {
            let v: CharValue = ks.iter().map(|&(k, c)| root_of_unity(m, k).scale(c)).sum();
            let l1 = v.exact.as_ref().unwrap().l1_norm() as f64;
            prop_assert!(v.value.norm() <= l1 + 1e-9);
        }

        #[test]
        fn conjugate_negates_exponents(m in 1u32..60, k in -100i64..100) {
            let v = root_of_unity(m, k).conj();
            let w = root_of_unity(m, -k);
            prop_assert_eq!(v.exact, w.exact);
            prop_assert!((v.value - w.value).norm() < 1e-12);
        }

        #[test]
        fn certify_idempotent(n in -10_000i64..10_000) {
            let v = CharValue::from_int(n);
            let once = certify_integer(&v, DEFAULT_TOL).unwrap();
            let twice = certify_integer(&CharValue::from_int(once), DEFAULT_TOL).unwrap();
            prop_assert_eq!(once, twice);
        }
    }
}
