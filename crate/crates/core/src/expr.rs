//! Sum expressions: the user-facing language of nested sums and products.
//!
//! The printed form is the input grammar, so every printed expression can
//! be read back: `S[2,4](n)`, `binom(m,k)`, `x^k`, `sum(i,1,n, body)`,
//! `prod(i,1,n, body)`.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::arith::{int, Rat};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SumExpr {
    Num(Rat),
    /// A parameter, the outer variable or a bound index.
    Sym(String),
    Add(Vec<SumExpr>),
    Mul(Vec<SumExpr>),
    Neg(Box<SumExpr>),
    Div(Box<SumExpr>, Box<SumExpr>),
    Pow(Box<SumExpr>, Box<SumExpr>),
    Binom(Box<SumExpr>, Box<SumExpr>),
    Sum { index: String, lower: Box<SumExpr>, upper: Box<SumExpr>, body: Box<SumExpr> },
    Prod { index: String, lower: Box<SumExpr>, upper: Box<SumExpr>, body: Box<SumExpr> },
    /// `S[m1,...,mr](arg)`.
    Harmonic { indices: Vec<i64>, arg: Box<SumExpr> },
}

use SumExpr::*;

impl SumExpr {
    pub fn num(n: i64) -> SumExpr {
        Num(int(n))
    }

    pub fn rat(r: Rat) -> SumExpr {
        Num(r)
    }

    pub fn sym(s: &str) -> SumExpr {
        Sym(s.into())
    }

    pub fn is_num(&self, n: i64) -> bool {
        matches!(self, Num(r) if *r == int(n))
    }

    pub fn as_num(&self) -> Option<&Rat> {
        match self {
            Num(r) => Some(r),
            _ => None,
        }
    }

    /// Sum with flattening, number folding and zero removal.
    pub fn add(items: Vec<SumExpr>) -> SumExpr {
        let mut out = Vec::new();
        let mut c = Rat::zero();
        for it in items {
            match it {
                Add(xs) => {
                    for x in xs {
                        match x {
                            Num(r) => c += r,
                            x => out.push(x),
                        }
                    }
                }
                Num(r) => c += r,
                x => out.push(x),
            }
        }
        if !c.is_zero() {
            out.push(Num(c));
        }
        match out.len() {
            0 => SumExpr::num(0),
            1 => out.pop().unwrap(),
            _ => Add(out),
        }
    }

    /// Product with flattening and number folding; a zero factor wins.
    pub fn mul(items: Vec<SumExpr>) -> SumExpr {
        let mut out = Vec::new();
        let mut c = Rat::one();
        for it in items {
            let xs = match it {
                Mul(xs) => xs,
                x => alloc::vec![x],
            };
            for x in xs {
                match x {
                    Num(r) => c *= r,
                    Neg(inner) => {
                        c = -c;
                        out.push(*inner);
                    }
                    x => out.push(x),
                }
            }
        }
        if c.is_zero() {
            return SumExpr::num(0);
        }
        let body = match out.len() {
            0 => return Num(c),
            1 => out.pop().unwrap(),
            _ => Mul(out),
        };
        if c.is_one() {
            body
        } else if c == -Rat::one() {
            Neg(Box::new(body))
        } else {
            match body {
                Mul(mut xs) => {
                    xs.insert(0, Num(c));
                    Mul(xs)
                }
                b => Mul(alloc::vec![Num(c), b]),
            }
        }
    }

    pub fn neg(e: SumExpr) -> SumExpr {
        match e {
            Num(r) => Num(-r),
            Neg(x) => *x,
            x => SumExpr::mul(alloc::vec![SumExpr::num(-1), x]),
        }
    }

    pub fn sub(a: SumExpr, b: SumExpr) -> SumExpr {
        SumExpr::add(alloc::vec![a, SumExpr::neg(b)])
    }

    pub fn div(a: SumExpr, b: SumExpr) -> SumExpr {
        match (&a, &b) {
            (_, Num(r)) if r.is_one() => a,
            (Num(x), Num(y)) if !y.is_zero() => Num(x / y),
            (_, Num(y)) if !y.is_zero() => SumExpr::mul(alloc::vec![Num(y.recip()), a]),
            (Num(x), _) if x.is_zero() => a,
            _ => Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(a: SumExpr, e: SumExpr) -> SumExpr {
        match (&a, &e) {
            (_, Num(r)) if r.is_one() => a,
            (_, Num(r)) if r.is_zero() => SumExpr::num(1),
            _ => Pow(Box::new(a), Box::new(e)),
        }
    }

    pub fn binom(a: SumExpr, b: SumExpr) -> SumExpr {
        Binom(Box::new(a), Box::new(b))
    }

    pub fn sum(index: &str, lower: SumExpr, upper: SumExpr, body: SumExpr) -> SumExpr {
        Sum { index: index.into(), lower: Box::new(lower), upper: Box::new(upper), body: Box::new(body) }
    }

    pub fn prod(index: &str, lower: SumExpr, upper: SumExpr, body: SumExpr) -> SumExpr {
        Prod { index: index.into(), lower: Box::new(lower), upper: Box::new(upper), body: Box::new(body) }
    }

    pub fn harmonic(indices: Vec<i64>, arg: SumExpr) -> SumExpr {
        Harmonic { indices, arg: Box::new(arg) }
    }

    /// Symbols not bound by a sum or product.
    pub fn free_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Num(_) => {}
            Sym(s) => {
                if !bound.contains(s) {
                    out.insert(s.clone());
                }
            }
            Add(xs) | Mul(xs) => xs.iter().for_each(|x| x.collect_free(bound, out)),
            Neg(x) => x.collect_free(bound, out),
            Div(a, b) | Pow(a, b) | Binom(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Sum { index, lower, upper, body } | Prod { index, lower, upper, body } => {
                lower.collect_free(bound, out);
                upper.collect_free(bound, out);
                bound.push(index.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            Harmonic { arg, .. } => arg.collect_free(bound, out),
        }
    }

    /// Every symbol name used anywhere, bound or free.
    pub fn all_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Num(_) => {}
            Sym(s) => {
                out.insert(s.clone());
            }
            Add(xs) | Mul(xs) => xs.iter().for_each(|x| x.all_names(out)),
            Neg(x) => x.all_names(out),
            Div(a, b) | Pow(a, b) | Binom(a, b) => {
                a.all_names(out);
                b.all_names(out);
            }
            Sum { index, lower, upper, body } | Prod { index, lower, upper, body } => {
                out.insert(index.clone());
                lower.all_names(out);
                upper.all_names(out);
                body.all_names(out);
            }
            Harmonic { arg, .. } => arg.all_names(out),
        }
    }

    /// Replaces free occurrences of `name`. Bound indices that would capture
    /// a symbol of `by` are renamed first.
    pub fn subst(&self, name: &str, by: &SumExpr) -> SumExpr {
        match self {
            Num(_) => self.clone(),
            Sym(s) => {
                if s == name {
                    by.clone()
                } else {
                    self.clone()
                }
            }
            Add(xs) => SumExpr::add(xs.iter().map(|x| x.subst(name, by)).collect()),
            Mul(xs) => SumExpr::mul(xs.iter().map(|x| x.subst(name, by)).collect()),
            Neg(x) => SumExpr::neg(x.subst(name, by)),
            Div(a, b) => SumExpr::div(a.subst(name, by), b.subst(name, by)),
            Pow(a, b) => SumExpr::pow(a.subst(name, by), b.subst(name, by)),
            Binom(a, b) => SumExpr::binom(a.subst(name, by), b.subst(name, by)),
            Sum { index, lower, upper, body } | Prod { index, lower, upper, body } => {
                let lower = lower.subst(name, by);
                let upper = upper.subst(name, by);
                let (index, body) = if index == name {
                    (index.clone(), (**body).clone())
                } else if by.free_symbols().contains(index) {
                    let mut used = BTreeSet::new();
                    self.all_names(&mut used);
                    by.all_names(&mut used);
                    let fresh = fresh_index(&used, index);
                    let b = body.subst(index, &Sym(fresh.clone()));
                    (fresh, b.subst(name, by))
                } else {
                    (index.clone(), body.subst(name, by))
                };
                if matches!(self, Sum { .. }) {
                    SumExpr::sum(&index, lower, upper, body)
                } else {
                    SumExpr::prod(&index, lower, upper, body)
                }
            }
            Harmonic { indices, arg } => SumExpr::harmonic(indices.clone(), arg.subst(name, by)),
        }
    }

    /// Nesting depth of sum and product quantifiers, harmonic sums counting
    /// one level per index.
    pub fn quantifier_depth(&self) -> usize {
        match self {
            Num(_) | Sym(_) => 0,
            Add(xs) | Mul(xs) => xs.iter().map(|x| x.quantifier_depth()).max().unwrap_or(0),
            Neg(x) => x.quantifier_depth(),
            Div(a, b) | Pow(a, b) | Binom(a, b) => a.quantifier_depth().max(b.quantifier_depth()),
            Sum { body, upper, .. } | Prod { body, upper, .. } => (body.quantifier_depth() + 1).max(upper.quantifier_depth()),
            Harmonic { indices, arg } => indices.len().max(arg.quantifier_depth()),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Add(_) => 1,
            Neg(_) => 2,
            Mul(_) | Div(..) => 3,
            Num(r) if !r.denom().is_one() || r.is_negative() => 3,
            Pow(..) => 4,
            _ => 5,
        }
    }
}

/// A polynomial in opaque symbols: monomial (symbol text, exponent) pairs in
/// sorted order mapped to nonzero coefficients. Used to compare identities
/// independently of term order.
pub type SymPoly = BTreeMap<Vec<(String, u32)>, Rat>;

fn poly_add(a: &mut SymPoly, b: &SymPoly, c: &Rat) {
    for (m, x) in b {
        let v = a.remove(m).unwrap_or_else(Rat::zero) + x * c;
        if !v.is_zero() {
            a.insert(m.clone(), v);
        }
    }
}

fn poly_mul(a: &SymPoly, b: &SymPoly) -> SymPoly {
    let mut out = SymPoly::new();
    for (ma, xa) in a {
        for (mb, xb) in b {
            let mut m: BTreeMap<String, u32> = ma.iter().cloned().collect();
            for (s, e) in mb {
                *m.entry(s.clone()).or_insert(0) += e;
            }
            let mut single = SymPoly::new();
            single.insert(m.into_iter().collect(), Rat::one());
            poly_add(&mut out, &single, &(xa * xb));
        }
    }
    out
}

impl SumExpr {
    /// Expands sums, products, negation, division by numbers and natural
    /// powers; every other node becomes an opaque symbol named by its text.
    pub fn to_sympoly(&self) -> Option<SymPoly> {
        let constant = |c: Rat| {
            let mut p = SymPoly::new();
            if !c.is_zero() {
                p.insert(Vec::new(), c);
            }
            p
        };
        Some(match self {
            Num(r) => constant(r.clone()),
            Add(xs) => {
                let mut acc = SymPoly::new();
                for x in xs {
                    poly_add(&mut acc, &x.to_sympoly()?, &Rat::one());
                }
                acc
            }
            Mul(xs) => {
                let mut acc = constant(Rat::one());
                for x in xs {
                    acc = poly_mul(&acc, &x.to_sympoly()?);
                }
                acc
            }
            Neg(x) => {
                let mut acc = SymPoly::new();
                poly_add(&mut acc, &x.to_sympoly()?, &-Rat::one());
                acc
            }
            Div(a, b) => {
                let d = b.as_num().filter(|d| !d.is_zero())?;
                let mut acc = SymPoly::new();
                poly_add(&mut acc, &a.to_sympoly()?, &d.recip());
                acc
            }
            Pow(b, e) if matches!(e.as_num(), Some(r) if r.is_integer() && !r.is_negative()) => {
                let n = crate::arith::to_i64(e.as_num().unwrap())?;
                let base = b.to_sympoly()?;
                let mut acc = constant(Rat::one());
                for _ in 0..n {
                    acc = poly_mul(&acc, &base);
                }
                acc
            }
            other => {
                let mut p = SymPoly::new();
                p.insert(alloc::vec![(other.to_string(), 1)], Rat::one());
                p
            }
        })
    }

    /// Expression for a symbol polynomial, terms in key order.
    pub fn from_sympoly(p: &SymPoly, symbol: &dyn Fn(&str) -> SumExpr) -> SumExpr {
        let terms = p
            .iter()
            .map(|(m, c)| {
                let mut fs = alloc::vec![Num(c.clone())];
                for (s, e) in m {
                    fs.push(SumExpr::pow(symbol(s), SumExpr::num(*e as i64)));
                }
                SumExpr::mul(fs)
            })
            .collect();
        SumExpr::add(terms)
    }
}

/// A name based on `base` not in `used`.
pub fn fresh_index(used: &BTreeSet<String>, base: &str) -> String {
    let stem: String = base.chars().take_while(|c| c.is_alphabetic()).collect();
    let stem = if stem.is_empty() { "j".to_string() } else { stem };
    for i in 1.. {
        let cand = format!("{}{}", stem, i);
        if !used.contains(&cand) {
            return cand;
        }
    }
    unreachable!()
}

fn write_paren(f: &mut fmt::Formatter<'_>, e: &SumExpr, min: u8) -> fmt::Result {
    if e.prec() < min {
        write!(f, "({})", e)
    } else {
        write!(f, "{}", e)
    }
}

impl fmt::Display for SumExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num(r) => write!(f, "{}", r),
            Sym(s) => f.write_str(s),
            Add(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    match (i, x) {
                        (0, _) => write_paren(f, x, 2)?,
                        (_, Neg(inner)) => {
                            f.write_str(" - ")?;
                            write_paren(f, inner, 3)?;
                        }
                        (_, Num(r)) if r.is_negative() => write!(f, " - {}", -r)?,
                        (_, Mul(ys)) if matches!(ys.first(), Some(Num(r)) if r.is_negative()) => {
                            let mut ys = ys.clone();
                            if let Num(r) = &ys[0] {
                                ys[0] = Num(-r);
                            }
                            f.write_str(" - ")?;
                            write!(f, "{}", SumExpr::mul(ys))?;
                        }
                        _ => {
                            f.write_str(" + ")?;
                            write_paren(f, x, 2)?;
                        }
                    }
                }
                Ok(())
            }
            Mul(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str("*")?;
                    }
                    match x {
                        Num(r) if i == 0 && r.denom().is_one() => write!(f, "{}", r)?,
                        Div(..) if i + 1 < xs.len() => write!(f, "({})", x)?,
                        _ => write_paren(f, x, 4)?,
                    }
                }
                Ok(())
            }
            Neg(x) => {
                f.write_str("-")?;
                write_paren(f, x, 3)
            }
            Div(a, b) => {
                write_paren(f, a, 3)?;
                f.write_str("/")?;
                write_paren(f, b, 4)
            }
            Pow(a, b) => {
                write_paren(f, a, 5)?;
                f.write_str("^")?;
                write_paren(f, b, 5)
            }
            Binom(a, b) => write!(f, "binom({},{})", a, b),
            Sum { index, lower, upper, body } => write!(f, "sum({},{},{}, {})", index, lower, upper, body),
            Prod { index, lower, upper, body } => write!(f, "prod({},{},{}, {})", index, lower, upper, body),
            Harmonic { indices, arg } => {
                f.write_str("S[")?;
                for (i, m) in indices.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{}", m)?;
                }
                write!(f, "]({})", arg)
            }
        }
    }
}
