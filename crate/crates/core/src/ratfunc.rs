//! Normalized rational functions: coprime numerator and denominator, the
//! denominator's leading coefficient is one.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::arith::Rat;
use crate::mpoly::{gcd, MPoly};

/// Index of the shift variable `k` in every polynomial ring used here.
pub const K: usize = 0;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFunc {
    num: MPoly,
    den: MPoly,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct DivByZero;

impl fmt::Display for DivByZero {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("division by zero")
    }
}

impl Default for RatFunc {
    fn default() -> Self {
        RatFunc::zero()
    }
}

impl RatFunc {
    pub fn zero() -> RatFunc {
        RatFunc { num: MPoly::zero(), den: MPoly::one() }
    }

    pub fn one() -> RatFunc {
        RatFunc { num: MPoly::one(), den: MPoly::one() }
    }

    pub fn constant(c: Rat) -> RatFunc {
        RatFunc { num: MPoly::constant(c), den: MPoly::one() }
    }

    pub fn from_int(n: i64) -> RatFunc {
        RatFunc::constant(crate::arith::int(n))
    }

    pub fn var(i: usize) -> RatFunc {
        RatFunc { num: MPoly::var(i), den: MPoly::one() }
    }

    pub fn k() -> RatFunc {
        RatFunc::var(K)
    }

    pub fn from_poly(p: MPoly) -> RatFunc {
        RatFunc { num: p, den: MPoly::one() }
    }

    /// Builds `num/den` in canonical form.
    pub fn new(num: MPoly, den: MPoly) -> Result<RatFunc, DivByZero> {
        if den.is_zero() {
            return Err(DivByZero);
        }
        Ok(RatFunc::normalize(num, den))
    }

    fn normalize(num: MPoly, den: MPoly) -> RatFunc {
        if num.is_zero() {
            return RatFunc::zero();
        }
        if let Some(c) = den.const_value() {
            return RatFunc { num: num.scale(&c.recip()), den: MPoly::one() };
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g).unwrap(), den.exact_div(&g).unwrap())
        };
        let lc = den.lc();
        if lc.is_one() {
            RatFunc { num, den }
        } else {
            let inv = lc.recip();
            RatFunc { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn num(&self) -> &MPoly {
        &self.num
    }

    pub fn den(&self) -> &MPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn const_value(&self) -> Option<Rat> {
        if self.den.is_one() {
            self.num.const_value()
        } else {
            None
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// True if `k` does not occur, i.e. the value lies in the constant field.
    pub fn is_free_of_k(&self) -> bool {
        !self.num.uses_var(K) && !self.den.uses_var(K)
    }

    pub fn uses_var(&self, i: usize) -> bool {
        self.num.uses_var(i) || self.den.uses_var(i)
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            if self.den.is_one() {
                return RatFunc { num: &self.num + &o.num, den: MPoly::one() };
            }
            return RatFunc::normalize(&self.num + &o.num, self.den.clone());
        }
        if self.den.is_one() {
            return RatFunc { num: &(&self.num * &o.den) + &o.num, den: o.den.clone() };
        }
        if o.den.is_one() {
            return RatFunc { num: &self.num + &(&o.num * &self.den), den: self.den.clone() };
        }
        let g = gcd(&self.den, &o.den);
        let d1 = self.den.exact_div(&g).unwrap();
        let d2 = o.den.exact_div(&g).unwrap();
        let num = &(&self.num * &d2) + &(&o.num * &d1);
        let den = &(&d1 * &d2) * &g;
        if g.is_one() {
            // coprime denominators: the sum is already reduced
            return RatFunc::normalize_unit(num, den);
        }
        RatFunc::normalize(num, den)
    }

    fn normalize_unit(num: MPoly, den: MPoly) -> RatFunc {
        if num.is_zero() {
            return RatFunc::zero();
        }
        let lc = den.lc();
        if lc.is_one() {
            RatFunc { num, den }
        } else {
            let inv = lc.recip();
            RatFunc { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn sub(&self, o: &RatFunc) -> RatFunc {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return RatFunc::zero();
        }
        if let Some(c) = self.const_value() {
            return RatFunc { num: o.num.scale(&c), den: o.den.clone() };
        }
        if let Some(c) = o.const_value() {
            return RatFunc { num: self.num.scale(&c), den: self.den.clone() };
        }
        let g1 = gcd(&self.num, &o.den);
        let g2 = gcd(&o.num, &self.den);
        let n1 = self.num.exact_div(&g1).unwrap();
        let d2 = o.den.exact_div(&g1).unwrap();
        let n2 = o.num.exact_div(&g2).unwrap();
        let d1 = self.den.exact_div(&g2).unwrap();
        RatFunc::normalize_unit(&n1 * &n2, &d1 * &d2)
    }

    pub fn inv(&self) -> Result<RatFunc, DivByZero> {
        if self.is_zero() {
            return Err(DivByZero);
        }
        Ok(RatFunc::normalize_unit(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, o: &RatFunc) -> Result<RatFunc, DivByZero> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn scale(&self, c: &Rat) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn pow(&self, e: i64) -> Result<RatFunc, DivByZero> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let e = e.unsigned_abs() as u32;
        Ok(RatFunc { num: base.num.pow(e), den: base.den.pow(e) })
    }

    /// `k -> k + c`. Shifts keep numerator and denominator coprime.
    pub fn shift(&self, c: i64) -> RatFunc {
        if c == 0 {
            return self.clone();
        }
        let c = crate::arith::int(c);
        let num = self.num.shift_var(K, &c);
        let den = self.den.shift_var(K, &c);
        RatFunc::normalize_unit(num, den)
    }

    /// Substitutes `x_i -> q` for a polynomial `q`.
    pub fn compose_var(&self, i: usize, q: &MPoly) -> Result<RatFunc, DivByZero> {
        RatFunc::new(self.num.compose_var(i, q), self.den.compose_var(i, q))
    }

    /// Evaluates every variable; `None` at a pole.
    pub fn eval(&self, vals: &[Rat]) -> Option<Rat> {
        let d = self.den.eval(vals);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(vals) / d)
    }

    /// Substitutes a number for `k`, keeping parameters symbolic.
    pub fn eval_k(&self, v: &Rat) -> Option<RatFunc> {
        let d = self.den.eval_var(K, v);
        if d.is_zero() {
            return None;
        }
        Some(RatFunc::normalize(self.num.eval_var(K, v), d))
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        let n = self.num.to_string_with(names);
        if self.den.is_one() {
            return n;
        }
        let d = self.den.to_string_with(names);
        let n = if self.num.nterms() > 1 { alloc::format!("({})", n) } else { n };
        let d = if self.den.nterms() > 1 || d.contains('*') { alloc::format!("({})", d) } else { d };
        alloc::format!("{}/{}", n, d)
    }
}

/// Division of `p` by `q` as univariate polynomials in variable `v` with
/// rational-function coefficients in the other variables. Coefficient
/// vectors are lowest power first.
pub fn poly_divmod(p: &MPoly, q: &MPoly, v: usize) -> Result<(Vec<RatFunc>, Vec<RatFunc>), DivByZero> {
    if q.is_zero() {
        return Err(DivByZero);
    }
    let to_rf = |cs: Vec<MPoly>| cs.into_iter().map(RatFunc::from_poly).collect::<Vec<_>>();
    let mut r = to_rf(p.coeffs_in(v));
    let qc = to_rf(q.coeffs_in(v));
    let dq = qc.len() - 1;
    let lq = qc[dq].clone();
    let mut quot = alloc::vec![RatFunc::zero(); r.len().saturating_sub(dq).max(1)];
    while r.len() > dq && !r.is_empty() {
        let top = r.len() - 1;
        let c = r[top].div(&lq)?;
        let shift = top - dq;
        for (i, qi) in qc.iter().enumerate() {
            r[shift + i] = r[shift + i].sub(&c.mul(qi));
        }
        quot[shift] = c;
        r.pop();
        while r.last().map_or(false, |x| x.is_zero()) {
            r.pop();
        }
    }
    while quot.last().map_or(false, |x| x.is_zero()) {
        quot.pop();
    }
    Ok((quot, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn k() -> RatFunc {
        RatFunc::k()
    }
    fn c(n: i64) -> RatFunc {
        RatFunc::from_int(n)
    }

    #[test]
    fn common_denominator_collapses() {
        let a = k().div(&k().add(&c(1))).unwrap();
        let b = c(1).div(&k().add(&c(1))).unwrap();
        assert!(a.add(&b).is_one());
    }

    #[test]
    fn inverse_of_parameter() {
        let x = RatFunc::var(1);
        assert!(x.mul(&x.inv().unwrap()).is_one());
    }

    #[test]
    fn reduces_difference_of_squares() {
        let num = &(&MPoly::var(0) * &MPoly::var(0)) - &MPoly::one();
        let den = &MPoly::var(0) + &MPoly::one();
        let r = RatFunc::new(num.clone(), den.clone()).unwrap();
        assert_eq!(r, k().sub(&c(1)));
        for v in 2..=5 {
            let direct = num.eval(&[int(v)]) / den.eval(&[int(v)]);
            assert_eq!(r.eval(&[int(v)]), Some(direct));
        }
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(k().div(&RatFunc::zero()), Err(DivByZero));
    }

    #[test]
    fn divmod_textbook() {
        let p = &MPoly::var(0) * &MPoly::var(0);
        let q = &MPoly::var(0) + &MPoly::one();
        let (qu, re) = poly_divmod(&p, &q, 0).unwrap();
        assert_eq!(qu, alloc::vec![c(-1), c(1)]);
        assert_eq!(re, alloc::vec![c(1)]);
        let (qu, re) = poly_divmod(&MPoly::zero(), &q, 0).unwrap();
        assert!(qu.is_empty() && re.is_empty());
    }
}
