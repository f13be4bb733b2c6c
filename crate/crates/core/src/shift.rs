//! Shift structure of polynomials in `k`: integer roots and dispersion.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::Rat;
use crate::mpoly::{content_in, gcd, resultant, MPoly, Mono};
use crate::ratfunc::K;

const SCAN_LIMIT: u64 = 1 << 20;
const TRIAL_LIMIT: u64 = 1_000_000;

fn horner(cs: &[BigInt], x: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in cs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn divisors(n: &BigInt, bound: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if let (Some(b), Some(nn)) = (bound.to_u64(), n.to_u64()) {
        if b <= SCAN_LIMIT || nn <= SCAN_LIMIT {
            let top = b.min(nn);
            return (1..=top).filter(|d| nn % d == 0).map(BigInt::from).collect();
        }
    }
    // trial factorization; a leftover cofactor is treated as prime
    let mut rest = n.clone();
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    let mut p = 2u64;
    while p <= TRIAL_LIMIT {
        let bp = BigInt::from(p);
        if &bp * &bp > rest {
            break;
        }
        let mut e = 0;
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            e += 1;
        }
        if e > 0 {
            primes.push((bp, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > BigInt::one() {
        primes.push((rest, 1));
    }
    let mut ds = alloc::vec![BigInt::one()];
    for (p, e) in primes {
        let mut next = Vec::new();
        for d in &ds {
            let mut pp = BigInt::one();
            for _ in 0..=e {
                let v = d * &pp;
                if &v <= bound {
                    next.push(v);
                }
                pp *= &p;
            }
        }
        ds = next;
    }
    ds
}

/// Integer roots of a univariate polynomial over Q (lowest power first),
/// without multiplicity, ascending.
pub fn integer_roots(p: &[Rat]) -> Vec<BigInt> {
    let mut cs: Vec<Rat> = p.to_vec();
    while cs.last().map_or(false, |c| c.is_zero()) {
        cs.pop();
    }
    if cs.len() <= 1 {
        return Vec::new();
    }
    let l = cs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut ints: Vec<BigInt> = cs.iter().map(|c| (c * Rat::from_integer(l.clone())).to_integer()).collect();
    let mut roots = Vec::new();
    let low = ints.iter().position(|c| !c.is_zero()).unwrap();
    if low > 0 {
        roots.push(BigInt::zero());
        ints.drain(..low);
    }
    if ints.len() > 1 {
        let an = ints.last().unwrap().abs();
        let maxc = ints[..ints.len() - 1].iter().map(|c| c.abs()).max().unwrap();
        let bound = maxc / &an + BigInt::one();
        for d in divisors(&ints[0], &bound) {
            for r in [d.clone(), -d] {
                if horner(&ints, &r).is_zero() {
                    roots.push(r);
                }
            }
        }
    }
    roots.sort();
    roots.dedup();
    roots
}

/// Integer values `h` with `r(h) = 0` identically in the other variables.
fn integer_roots_in(r: &MPoly, h: usize) -> Vec<BigInt> {
    let mut groups: BTreeMap<Mono, Vec<(u32, Rat)>> = BTreeMap::new();
    for (m, c) in r.terms() {
        let mut v = m.exps().to_vec();
        let e = if v.len() > h { core::mem::replace(&mut v[h], 0) } else { 0 };
        groups.entry(Mono::from_vec(v)).or_default().push((e, c.clone()));
    }
    let best = groups.values().min_by_key(|ts| (ts.iter().map(|t| t.0).max(), ts.len()));
    let Some(ts) = best else { return Vec::new() };
    let deg = ts.iter().map(|t| t.0).max().unwrap_or(0) as usize;
    let mut dense = alloc::vec![Rat::zero(); deg + 1];
    for (e, c) in ts {
        dense[*e as usize] = c.clone();
    }
    integer_roots(&dense)
        .into_iter()
        .filter(|j| r.eval_var(h, &Rat::from_integer(j.clone())).is_zero())
        .collect()
}

fn squarefree(p: &MPoly) -> MPoly {
    let cs = p.coeffs_in(K);
    let d: Vec<MPoly> = cs.iter().enumerate().skip(1).map(|(i, c)| c.scale(&Rat::from_integer(BigInt::from(i)))).collect();
    let g = gcd(p, &MPoly::from_coeffs_in(K, &d));
    if g.uses_var(K) {
        p.exact_div(&g).unwrap()
    } else {
        p.clone()
    }
}

/// Largest `j >= 0` with `gcd(p(k), q(k+j))` nonconstant in `k`.
pub fn dispersion(p: &MPoly, q: &MPoly) -> Option<u64> {
    if p.degree_in(K) < 1 || q.degree_in(K) < 1 {
        return None;
    }
    // shifts only see the distinct roots, so squarefree parts suffice
    let p = squarefree(&p.exact_div(&content_in(p, K)).unwrap());
    let q = squarefree(&q.exact_div(&content_in(q, K)).unwrap());
    let h = p.max_var().max(q.max_var()).unwrap_or(0) + 1;
    let shifted = q.compose_var(K, &(&MPoly::var(K) + &MPoly::var(h)));
    let res = resultant(&p, &shifted, K);
    let mut best = None;
    for j in integer_roots_in(&res, h) {
        if j.is_negative() {
            continue;
        }
        let j = j.to_u64()?;
        let g = gcd(&p, &q.shift_var(K, &Rat::from_integer(BigInt::from(j))));
        if g.uses_var(K) {
            best = Some(best.map_or(j, |b: u64| b.max(j)));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn k() -> MPoly {
        MPoly::var(0)
    }

    #[test]
    fn roots_of_factored_polynomial() {
        // (j-3)(j+2) = j^2 - j - 6
        assert_eq!(integer_roots(&[int(-6), int(-1), int(1)]), [BigInt::from(-2), BigInt::from(3)]);
        assert!(integer_roots(&[int(1), int(0), int(1)]).is_empty());
        assert!(integer_roots(&[int(-5), int(2)]).is_empty());
    }

    #[test]
    fn dispersion_examples() {
        let c = |n| MPoly::constant(int(n));
        assert_eq!(dispersion(&k(), &(&k() - &c(3))), Some(3));
        assert_eq!(dispersion(&k(), &(&k() + &c(1))), None);
        assert_eq!(dispersion(&k(), &k()), Some(0));
        let m = MPoly::var(1);
        // k+m against k+m-5 has dispersion 5 for symbolic m
        assert_eq!(dispersion(&(&k() + &m), &(&(&k() + &m) - &c(5))), Some(5));
        // k against k+m: no integer shift works for symbolic m
        assert_eq!(dispersion(&k(), &(&k() + &m)), None);
    }
}
