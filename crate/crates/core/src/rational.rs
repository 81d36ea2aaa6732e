//! Exact rational arithmetic helpers. Lengths are rationals in units of π.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

pub type Rational = BigRational;

/// `n/d` as an exact rational.
pub fn rat(n: i64, d: i64) -> Rational {
    assert!(d != 0, "zero denominator");
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    BigRational::from(BigInt::from(n))
}

/// Canonical `num/den` text form, lowest terms, denominator positive.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `num` or `num/den`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        None => s.parse::<BigInt>().ok().map(BigRational::from),
        Some((n, d)) => {
            let n = n.trim().parse::<BigInt>().ok()?;
            let d = d.trim().parse::<BigInt>().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
    }
}

/// Floor of a rational as a BigInt.
pub fn floor_int(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

/// `r mod 1` in `[0, 1)`.
pub fn mod_one(r: &Rational) -> Rational {
    r - BigRational::from(floor_int(r))
}

/// Representative of `r mod 1` in `(-1/2, 1/2]`.
pub fn signed_mod_one(r: &Rational) -> Rational {
    let c = mod_one(r);
    if c > rat(1, 2) {
        c - BigRational::one()
    } else {
        c
    }
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

pub fn lcm_i64(a: i64, b: i64) -> i64 {
    if a == 0 || b == 0 {
        0
    } else {
        (a / gcd_i64(a, b)).abs() * b.abs()
    }
}

/// Multiplicative inverse of `a` mod `m` (m > 0), if `gcd(a, m) = 1`.
pub fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    assert!(m > 0);
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        None
    } else {
        Some(old_s.rem_euclid(m))
    }
}

pub fn is_positive(r: &Rational) -> bool {
    r.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["1/2", "3", "-7/4", "0"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("x").is_none());
    }

    #[test]
    fn mod_one_ranges() {
        assert_eq!(mod_one(&rat(-1, 44)), rat(43, 44));
        assert_eq!(signed_mod_one(&rat(43, 44)), rat(-1, 44));
        assert_eq!(signed_mod_one(&rat(1, 2)), rat(1, 2));
        assert_eq!(signed_mod_one(&rat(11, 12)), rat(-1, 12));
    }

    #[test]
    fn modular_inverse() {
        assert_eq!(mod_inverse(4, 11), Some(3));
        assert_eq!(mod_inverse(8, 11), Some(7));
        assert_eq!(mod_inverse(6, 9), None);
        assert_eq!(mod_inverse(-1, 44), Some(43));
    }
}
