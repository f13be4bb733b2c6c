//! Big rationals and a few helpers around them.

use alloc::string::String;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Exact rational number. Always stored reduced with a positive denominator.
pub type Rat = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `a`, `-a` or `a/b`.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rat::new(n, d))
}

pub fn is_integer(r: &Rat) -> bool {
    r.denom().is_one()
}

pub fn to_i64(r: &Rat) -> Option<i64> {
    use num_traits::ToPrimitive;
    if is_integer(r) {
        r.numer().to_i64()
    } else {
        None
    }
}

/// `r` as text; negative values are not parenthesised.
pub fn fmt_rat(r: &Rat) -> String {
    use alloc::string::ToString;
    r.to_string()
}

pub fn abs(r: &Rat) -> Rat {
    r.abs()
}

/// Integer power with negative exponents allowed for nonzero `r`.
pub fn pow(r: &Rat, e: i64) -> Rat {
    let mut base = if e < 0 { r.recip() } else { r.clone() };
    let mut e = e.unsigned_abs();
    let mut acc = Rat::one();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_reduce() {
        assert_eq!(parse_rat("6/4"), Some(rat(3, 2)));
        assert_eq!(parse_rat("-2"), Some(int(-2)));
        assert_eq!(parse_rat("1/0"), None);
        assert_eq!(pow(&rat(2, 3), -2), rat(9, 4));
    }
}
