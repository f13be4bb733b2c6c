//! First-order parameterized equations over the base field `K(k)`:
//! `a1 sigma(g) + a2 g = c_1 f_1 + ... + c_n f_n`.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Signed;

use crate::arith::{int, is_integer, to_i64};
use crate::linalg::{nullspace, Matrix};
use crate::mpoly::{gcd, MPoly};
use crate::ratfunc::{RatFunc, K};
use crate::shift::dispersion;
use crate::tower::{Elem, SolutionBasis};

fn lcm(a: &MPoly, b: &MPoly) -> MPoly {
    let g = gcd(a, b);
    (a * b).exact_div(&g).unwrap()
}

fn shift(p: &MPoly, c: i64) -> MPoly {
    if c == 0 {
        p.clone()
    } else {
        p.shift_var(K, &int(c))
    }
}

fn deg(p: &MPoly) -> i64 {
    p.degree_in(K)
}

/// Leading coefficient in `k`, an element of `K`.
fn lc_k(p: &MPoly) -> RatFunc {
    RatFunc::from_poly(p.coeffs_in(K).pop().unwrap_or_else(MPoly::zero))
}

/// The equation with all denominators cleared: `p1 y(k+1) + p0 y(k) = sum c_i r_i`.
struct Cleared {
    p1: MPoly,
    p0: MPoly,
    r: Vec<MPoly>,
}

fn clear(a1: &RatFunc, a2: &RatFunc, f: &[RatFunc]) -> Cleared {
    let mut d = lcm(a1.den(), a2.den());
    for fi in f {
        d = lcm(&d, fi.den());
    }
    let part = |x: &RatFunc| (x.num() * &d).exact_div(x.den()).unwrap();
    Cleared { p1: part(a1), p0: part(a2), r: f.iter().map(part).collect() }
}

/// A polynomial `u` such that `u g` is a polynomial for every solution `g`.
pub fn universal_denominator(a1: &RatFunc, a2: &RatFunc, f: &[RatFunc]) -> MPoly {
    let c = clear(a1, a2, f);
    abramov(&c.p1, &c.p0)
}

fn abramov(p1: &MPoly, p0: &MPoly) -> MPoly {
    let mut a = shift(p1, -1);
    let mut b = p0.clone();
    let mut u = MPoly::one();
    if a.is_zero() || b.is_zero() {
        return u;
    }
    let Some(h) = dispersion(&a, &b) else {
        return u;
    };
    for h in (0..=h as i64).rev() {
        let d = gcd(&a, &shift(&b, h));
        if d.degree_in(K) <= 0 {
            continue;
        }
        a = a.exact_div(&d).unwrap();
        b = b.exact_div(&shift(&d, -h)).unwrap();
        for i in 0..=h {
            u = &u * &shift(&d, -i);
        }
    }
    u
}

/// Degree bound for polynomial solutions of `p1 y(k+1) + p0 y(k) = r` where
/// `r` has degree at most `deg_r`.
fn poly_degree_bound(p1: &MPoly, p0: &MPoly, deg_r: i64) -> i64 {
    // rewrite as a (y(k+1) - y(k)) + b y(k)
    let a = p1.clone();
    let b = p1 + p0;
    let (da, db) = (deg(&a), deg(&b));
    let mut bound = if b.is_zero() || db < da - 1 {
        deg_r - da + 1
    } else if db >= da {
        deg_r - db
    } else {
        deg_r - da + 1
    };
    if !b.is_zero() && db == da - 1 {
        let n0 = lc_k(&b).neg().div(&lc_k(&a)).unwrap();
        if let Some(v) = n0.const_value() {
            if is_integer(&v) && !v.is_negative() {
                bound = bound.max(to_i64(&v).unwrap());
            }
        }
    }
    bound.max(0)
}

/// Degree bound for `u g` over all solutions `g`, given the universal
/// denominator `u`.
pub fn degree_bound_base(a1: &RatFunc, a2: &RatFunc, f: &[RatFunc], u: &MPoly) -> i64 {
    let c = clear(a1, a2, f);
    let (p1, p0, r) = substitute(&c, u);
    let dr = r.iter().map(deg).max().unwrap_or(-1);
    poly_degree_bound(&p1, &p0, dr)
}

/// With `g = y / u`: `p1 u(k) y(k+1) + p0 u(k+1) y(k) = u(k) u(k+1) r`.
fn substitute(c: &Cleared, u: &MPoly) -> (MPoly, MPoly, Vec<MPoly>) {
    let u1 = shift(u, 1);
    let uu = u * &u1;
    (&c.p1 * u, &c.p0 * &u1, c.r.iter().map(|ri| ri * &uu).collect())
}

fn add_column(m: &mut Matrix, col: usize, p: &MPoly, sign: bool) {
    for (row, cf) in p.coeffs_in(K).into_iter().enumerate() {
        if cf.is_zero() {
            continue;
        }
        let v = RatFunc::from_poly(if sign { -&cf } else { cf });
        m[row][col] = m[row][col].add(&v);
    }
}

/// Complete basis of the solution space over `K(k)`.
pub fn solve_pfde_base(a1: &RatFunc, a2: &RatFunc, f: &[RatFunc]) -> SolutionBasis {
    solve_with_slack(a1, a2, f, 0)
}

/// As [`solve_pfde_base`], searching `slack` degrees past the bound.
pub fn solve_with_slack(a1: &RatFunc, a2: &RatFunc, f: &[RatFunc], slack: i64) -> SolutionBasis {
    let n = f.len();
    let pair = (Elem::Base(a1.clone()), Elem::Base(a2.clone()));
    assert!(!(a1.is_zero() && a2.is_zero()), "equation needs a nonzero coefficient");
    if a1.is_zero() || a2.is_zero() {
        // g or sigma(g) is determined by c alone
        let rows = (0..n)
            .map(|i| {
                let mut c = vec![RatFunc::zero(); n];
                c[i] = RatFunc::one();
                let g = if a1.is_zero() { f[i].div(a2).unwrap() } else { f[i].div(a1).unwrap().shift(-1) };
                (c, Elem::Base(g))
            })
            .collect();
        return SolutionBasis::new(n, rows, pair);
    }
    let c = clear(a1, a2, f);
    let u = abramov(&c.p1, &c.p0);
    let (p1, p0, r) = substitute(&c, &u);
    let dr = r.iter().map(deg).max().unwrap_or(-1);
    let d = poly_degree_bound(&p1, &p0, dr) + slack;

    // columns: c_1..c_n, y_0..y_d
    let ncols = n + d as usize + 1;
    let nrows = (dr.max(deg(&p1).max(deg(&p0)) + d) + 1).max(1) as usize;
    let mut m: Matrix = vec![vec![RatFunc::zero(); ncols]; nrows];
    for (i, ri) in r.iter().enumerate() {
        add_column(&mut m, i, ri, true);
    }
    let mut kj = MPoly::one();
    let kk = MPoly::var(K);
    for j in 0..=d as usize {
        let e = &(&p1 * &shift(&kj, 1)) + &(&p0 * &kj);
        add_column(&mut m, n + j, &e, false);
        kj = &kj * &kk;
    }
    let rf_u = RatFunc::from_poly(u);
    let rows = nullspace(&m, ncols)
        .into_iter()
        .map(|v| {
            let mut y = RatFunc::zero();
            let mut kj = RatFunc::one();
            for coef in &v[n..] {
                y = y.add(&kj.mul(coef));
                kj = kj.mul(&RatFunc::k());
            }
            (v[..n].to_vec(), Elem::Base(y.div(&rf_u).unwrap()))
        })
        .collect();
    SolutionBasis::new(n, rows, pair)
}

/// Smallest `1 <= m <= m_max` with a nonzero rational `g` such that
/// `sigma(g) = a^m g`.
pub fn solve_homogeneous_mult(a: &RatFunc, m_max: u32) -> Option<(u32, RatFunc)> {
    assert!(!a.is_zero());
    for m in 1..=m_max {
        let am = a.pow(m as i64).unwrap();
        let b = solve_pfde_base(&RatFunc::one(), &am.neg(), &[]);
        if let Some((_, g)) = b.rows.into_iter().next() {
            return Some((m, g.base().unwrap().clone()));
        }
    }
    None
}

/// Nonzero `g` with `sigma(g) = a g`, if one exists in `K(k)`.
pub fn hyper_witness(a: &RatFunc) -> Option<RatFunc> {
    let b = solve_pfde_base(&RatFunc::one(), &a.neg(), &[]);
    b.rows.into_iter().next().map(|(_, g)| g.base().unwrap().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn k() -> RatFunc {
        RatFunc::k()
    }
    fn c(n: i64) -> RatFunc {
        RatFunc::from_int(n)
    }
    fn check(a1: &RatFunc, a2: &RatFunc, f: &[RatFunc], b: &SolutionBasis) {
        for (cs, g) in &b.rows {
            let g = g.base().unwrap();
            let lhs = a1.mul(&g.shift(1)).add(&a2.mul(g));
            let rhs = cs.iter().zip(f).fold(RatFunc::zero(), |acc, (x, y)| acc.add(&x.mul(y)));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn telescoping_a_rational_function() {
        let f = [c(1).div(&k().mul(&k().add(&c(1)))).unwrap()];
        let b = solve_pfde_base(&c(1), &c(-1), &f);
        check(&c(1), &c(-1), &f, &b);
        let want = c(-1).div(&k()).unwrap();
        assert!(b.rows.iter().any(|(cs, g)| cs[0].is_one() && g.base().unwrap().sub(&want).is_free_of_k()));
        let u = universal_denominator(&c(1), &c(-1), &f);
        assert!(u.exact_div(&MPoly::var(K)).is_some());
    }

    #[test]
    fn no_rational_telescoper_for_squares() {
        let f = [c(1).div(&k().add(&c(1)).pow(2).unwrap()).unwrap()];
        let b = solve_pfde_base(&c(1), &c(-1), &f);
        assert_eq!(b.rows.len(), 1);
        assert!(b.rows[0].0[0].is_zero());
        assert!(b.rows[0].1.base().unwrap().is_free_of_k());
    }

    #[test]
    fn constants_only() {
        // with f = 0 every c is admissible, so the space is K x K
        let b = solve_pfde_base(&c(1), &c(-1), &[c(0)]);
        assert_eq!(b.rows.len(), 2);
        assert!(b.rows.iter().any(|(cs, g)| cs[0].is_zero() && g.is_one()));
        assert!(b.rows.iter().any(|(cs, g)| cs[0].is_one() && g.is_zero()));
        let b = solve_pfde_base(&c(1), &c(-1), &[]);
        assert_eq!(b.rows.len(), 1);
        assert!(b.rows[0].1.is_one());
    }

    #[test]
    fn degree_bounds() {
        let u = MPoly::one();
        assert!(degree_bound_base(&c(1), &c(-1), &[c(1)], &u) >= 1);
        assert!(degree_bound_base(&c(1), &c(-1), &[k()], &u) >= 2);
        assert_eq!(degree_bound_base(&c(1), &c(-1), &[], &u), 0);
        let b = solve_pfde_base(&c(1), &c(-1), &[k()]);
        let want = k().mul(&k()).sub(&k()).scale(&rat(1, 2));
        assert!(b.rows.iter().any(|(cs, g)| cs[0].is_one() && g.base().unwrap().sub(&want).is_free_of_k()));
        assert_eq!(universal_denominator(&c(1), &c(-1), &[c(1)]), MPoly::one());
    }

    #[test]
    fn homogeneous_with_pole() {
        // (k+1) sigma(g) - k g = 0 has g = 1/k
        let a1 = k().add(&c(1));
        let a2 = k().neg();
        let b = solve_pfde_base(&a1, &a2, &[]);
        assert_eq!(b.rows.len(), 1);
        let g = b.rows[0].1.base().unwrap();
        assert!(g.mul(&k()).is_free_of_k());
    }

    #[test]
    fn multiplicative_homogeneous() {
        let x = RatFunc::var(1);
        assert_eq!(solve_homogeneous_mult(&x, 12), None);
        let (m, g) = solve_homogeneous_mult(&k().add(&c(1)).div(&k()).unwrap(), 12).unwrap();
        assert_eq!(m, 1);
        assert!(g.div(&k()).unwrap().is_free_of_k());
        let mm = RatFunc::var(1);
        let binom = c(1).add(&mm).add(&k()).div(&k().add(&c(1))).unwrap();
        assert_eq!(solve_homogeneous_mult(&binom, 6), None);
    }
}
