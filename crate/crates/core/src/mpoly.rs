//! Sparse multivariate polynomials over Q.
//!
//! Variable 0 is the shift variable `k`; parameters use indices 1, 2, ...
//! Exponent vectors drop trailing zeros so constants have the empty vector.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::arith::Rat;

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Mono(Vec<u32>);

impl Mono {
    pub fn one() -> Mono {
        Mono(Vec::new())
    }

    pub fn var(i: usize, e: u32) -> Mono {
        let mut v = vec![0; i + 1];
        v[i] = e;
        Mono::from_vec(v)
    }

    pub fn from_vec(mut v: Vec<u32>) -> Mono {
        while v.last() == Some(&0) {
            v.pop();
        }
        Mono(v)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        let n = self.0.len().max(o.0.len());
        Mono((0..n).map(|i| self.exp(i) + o.exp(i)).collect())
    }

    pub fn div(&self, o: &Mono) -> Option<Mono> {
        if o.0.len() > self.0.len() {
            return None;
        }
        let mut v = self.0.clone();
        for (i, e) in o.0.iter().enumerate() {
            if v[i] < *e {
                return None;
            }
            v[i] -= e;
        }
        Some(Mono::from_vec(v))
    }

    fn with_exp(&self, i: usize, e: u32) -> Mono {
        let mut v = self.0.clone();
        if v.len() <= i {
            v.resize(i + 1, 0);
        }
        v[i] = e;
        Mono::from_vec(v)
    }
}

impl Ord for Mono {
    fn cmp(&self, o: &Mono) -> Ordering {
        match self.degree().cmp(&o.degree()) {
            Ordering::Equal => {}
            c => return c,
        }
        let n = self.0.len().max(o.0.len());
        for i in 0..n {
            match self.exp(i).cmp(&o.exp(i)) {
                Ordering::Equal => {}
                c => return c,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, o: &Mono) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Polynomial with terms keyed by graded-lex monomials; the largest key leads.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct MPoly {
    terms: BTreeMap<Mono, Rat>,
}

impl MPoly {
    pub fn zero() -> MPoly {
        MPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> MPoly {
        MPoly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> MPoly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::one(), c);
        }
        MPoly { terms }
    }

    pub fn var(i: usize) -> MPoly {
        MPoly::monomial(Mono::var(i, 1), Rat::one())
    }

    pub fn monomial(m: Mono, c: Rat) -> MPoly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MPoly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Mono, Rat)>>(it: I) -> MPoly {
        let mut p = MPoly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Mono, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &Rat)> {
        self.terms.iter()
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.const_value().map_or(false, |c| c.is_one())
    }

    /// Value of a constant polynomial.
    pub fn const_value(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self.terms.get(&Mono::one()).cloned(),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.const_value().is_some()
    }

    pub fn leading(&self) -> Option<(&Mono, &Rat)> {
        self.terms.iter().next_back()
    }

    pub fn lc(&self) -> Rat {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(Rat::zero)
    }

    pub fn total_degree(&self) -> i64 {
        self.terms.keys().map(|m| m.degree() as i64).max().unwrap_or(-1)
    }

    /// Highest variable index with a nonzero exponent.
    pub fn max_var(&self) -> Option<usize> {
        self.terms.keys().filter_map(|m| m.0.len().checked_sub(1)).max()
    }

    pub fn uses_var(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.exp(i) > 0)
    }

    /// Degree in variable `i`; `-1` for the zero polynomial.
    pub fn degree_in(&self, i: usize) -> i64 {
        self.terms.keys().map(|m| m.exp(i) as i64).max().unwrap_or(-1)
    }

    /// Coefficients with respect to variable `i`, lowest power first.
    pub fn coeffs_in(&self, i: usize) -> Vec<MPoly> {
        let d = self.degree_in(i);
        if d < 0 {
            return Vec::new();
        }
        let mut out = vec![MPoly::zero(); d as usize + 1];
        for (m, c) in &self.terms {
            let e = m.exp(i) as usize;
            out[e].terms.insert(m.with_exp(i, 0), c.clone());
        }
        out
    }

    pub fn from_coeffs_in(i: usize, cs: &[MPoly]) -> MPoly {
        let mut p = MPoly::zero();
        for (e, c) in cs.iter().enumerate() {
            for (m, v) in &c.terms {
                p.add_term(m.with_exp(i, m.exp(i) + e as u32), v.clone());
            }
        }
        p
    }

    pub fn scale(&self, c: &Rat) -> MPoly {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn mul_mono(&self, m: &Mono) -> MPoly {
        MPoly { terms: self.terms.iter().map(|(k, v)| (k.mul(m), v.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut acc = MPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Scaled so the leading coefficient is one (zero stays zero).
    pub fn monic(&self) -> MPoly {
        match self.leading() {
            None => MPoly::zero(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    /// Exact quotient if `d` divides `self`.
    pub fn exact_div(&self, d: &MPoly) -> Option<MPoly> {
        let (dm, dc) = d.leading()?;
        if let Some(c) = d.const_value() {
            return Some(self.scale(&c.recip()));
        }
        let mut r = self.clone();
        let mut q = MPoly::zero();
        while let Some((rm, rc)) = r.leading() {
            let m = rm.div(dm)?;
            let c = rc / dc;
            r = &r - &d.mul_mono(&m).scale(&c);
            q.add_term(m, c);
        }
        Some(q)
    }

    /// Substitutes `x_i -> x_i + c`.
    pub fn shift_var(&self, i: usize, c: &Rat) -> MPoly {
        if c.is_zero() || !self.uses_var(i) {
            return self.clone();
        }
        let lin = &MPoly::var(i) + &MPoly::constant(c.clone());
        self.compose_var(i, &lin)
    }

    /// Substitutes `x_i -> q`.
    pub fn compose_var(&self, i: usize, q: &MPoly) -> MPoly {
        let cs = self.coeffs_in(i);
        let mut acc = MPoly::zero();
        for c in cs.iter().rev() {
            acc = &(&acc * q) + c;
        }
        acc
    }

    pub fn eval_var(&self, i: usize, v: &Rat) -> MPoly {
        self.compose_var(i, &MPoly::constant(v.clone()))
    }

    /// Full evaluation; variables beyond `vals` count as zero.
    pub fn eval(&self, vals: &[Rat]) -> Rat {
        let mut s = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, e) in m.0.iter().enumerate() {
                if *e > 0 {
                    let v = vals.get(i).cloned().unwrap_or_else(Rat::zero);
                    t *= crate::arith::pow(&v, *e as i64);
                }
            }
            s += t;
        }
        s
    }

    /// Renames variables: variable `i` becomes `map[i]`.
    pub fn remap_vars(&self, map: &[usize]) -> MPoly {
        MPoly::from_terms(self.terms.iter().map(|(m, c)| {
            let mut v = Vec::new();
            for (i, e) in m.0.iter().enumerate() {
                if *e > 0 {
                    let j = map[i];
                    if v.len() <= j {
                        v.resize(j + 1, 0);
                    }
                    v[j] += *e;
                }
            }
            (Mono::from_vec(v), c.clone())
        }))
    }

    /// Dense univariate coefficients if only variable `i` occurs.
    pub fn as_univariate(&self, i: usize) -> Option<Vec<Rat>> {
        let d = self.degree_in(i);
        if d < 0 {
            return Some(Vec::new());
        }
        let mut out = vec![Rat::zero(); d as usize + 1];
        for (m, c) in &self.terms {
            if m.0.iter().enumerate().any(|(j, e)| j != i && *e > 0) {
                return None;
            }
            out[m.exp(i) as usize] = c.clone();
        }
        Some(out)
    }

    pub fn from_univariate(i: usize, cs: &[Rat]) -> MPoly {
        MPoly::from_terms(cs.iter().enumerate().map(|(e, c)| (Mono::var(i, e as u32), c.clone())))
    }

    /// Text form with the given variable names, leading term first.
    pub fn to_string_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return String::from("0");
        }
        let mut s = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !a.is_one() || m.is_one() {
                factors.push(alloc::format!("{}", a));
            }
            for (i, e) in m.0.iter().enumerate() {
                if *e == 0 {
                    continue;
                }
                let name = names.get(i).cloned().unwrap_or_else(|| alloc::format!("x{}", i));
                if *e == 1 {
                    factors.push(name);
                } else {
                    factors.push(alloc::format!("{}^{}", name, e));
                }
            }
            s.push_str(&factors.join("*"));
        }
        s
    }
}

impl<'a> Add for &'a MPoly {
    type Output = MPoly;
    fn add(self, o: &MPoly) -> MPoly {
        let (big, small) = if self.terms.len() >= o.terms.len() { (self, o) } else { (o, self) };
        let mut r = big.clone();
        for (m, c) in &small.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }
}

impl<'a> Sub for &'a MPoly {
    type Output = MPoly;
    fn sub(self, o: &MPoly) -> MPoly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), -c.clone());
        }
        r
    }
}

impl<'a> Neg for &'a MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

impl<'a> Mul for &'a MPoly {
    type Output = MPoly;
    fn mul(self, o: &MPoly) -> MPoly {
        if self.is_zero() || o.is_zero() {
            return MPoly::zero();
        }
        if let Some(c) = self.const_value() {
            return o.scale(&c);
        }
        if let Some(c) = o.const_value() {
            return self.scale(&c);
        }
        let mut r = MPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                r.add_term(m1.mul(m2), c1 * c2);
            }
        }
        r
    }
}

// ---- univariate helpers over Q (dense, lowest power first) ----

fn utrim(v: &mut Vec<Rat>) {
    while v.last().map_or(false, |c| c.is_zero()) {
        v.pop();
    }
}

fn urem(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut r = a.to_vec();
    utrim(&mut r);
    let db = b.len() - 1;
    let lb = b[db].clone();
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let q = &r[r.len() - 1] / &lb;
        for (i, c) in b.iter().enumerate() {
            r[k + i] -= &q * c;
        }
        r.pop();
        utrim(&mut r);
    }
    r
}

fn umonic(mut v: Vec<Rat>) -> Vec<Rat> {
    utrim(&mut v);
    if let Some(l) = v.last().cloned() {
        for c in v.iter_mut() {
            *c = &*c / &l;
        }
    }
    v
}

/// Monic gcd of two univariate polynomials over Q.
pub fn ugcd(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut x = umonic(a.to_vec());
    let mut y = umonic(b.to_vec());
    while !y.is_empty() {
        let r = umonic(urem(&x, &y));
        x = y;
        y = r;
    }
    x
}

/// Common variable if both polynomials are univariate in the same variable.
fn common_single_var(a: &MPoly, b: &MPoly) -> Option<usize> {
    let v = a.max_var().or(b.max_var())?;
    if a.as_univariate(v).is_some() && b.as_univariate(v).is_some() {
        Some(v)
    } else {
        None
    }
}

/// Greatest common divisor, normalized to leading coefficient one.
pub fn gcd(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return MPoly::one();
    }
    if a == b {
        return a.monic();
    }
    if let Some(v) = common_single_var(a, b) {
        let g = ugcd(&a.as_univariate(v).unwrap(), &b.as_univariate(v).unwrap());
        return MPoly::from_univariate(v, &g);
    }
    gcd_rec(a, b).monic()
}

fn gcd_rec(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.is_constant() || b.is_constant() {
        return MPoly::one();
    }
    if let Some(v) = common_single_var(a, b) {
        let g = ugcd(&a.as_univariate(v).unwrap(), &b.as_univariate(v).unwrap());
        return MPoly::from_univariate(v, &g);
    }
    // a variable missing from one side cannot occur in the gcd
    let n = a.max_var().max(b.max_var()).unwrap() + 1;
    for v in 0..n {
        match (a.uses_var(v), b.uses_var(v)) {
            (true, false) => return gcd_rec(&content_in(a, v), b),
            (false, true) => return gcd_rec(a, &content_in(b, v)),
            _ => {}
        }
    }
    if a.nterms() == 1 || b.nterms() == 1 {
        return mono_gcd(a, b);
    }
    let v = a.max_var().max(b.max_var()).unwrap();
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let c = gcd_rec(&ca, &cb);
    let pa = a.exact_div(&ca).expect("content divides");
    let pb = b.exact_div(&cb).expect("content divides");
    let (ca, cb) = (pa.coeffs_in(v), pb.coeffs_in(v));
    if images_coprime(&ca, &cb, n) {
        return c;
    }
    let g = prim_prs(ca, cb);
    &c * &MPoly::from_coeffs_in(v, &g)
}

/// Gcd when one side is a single term: the largest monomial dividing both.
fn mono_gcd(a: &MPoly, b: &MPoly) -> MPoly {
    let n = a.max_var().max(b.max_var()).map_or(0, |v| v + 1);
    let mut exps = Vec::with_capacity(n);
    for v in 0..n {
        let lo = a.terms.keys().chain(b.terms.keys()).map(|m| m.exp(v)).min().unwrap_or(0);
        exps.push(lo);
    }
    MPoly::monomial(Mono::from_vec(exps), Rat::one())
}

/// Gcd of the coefficients with respect to variable `v`.
pub fn content_in(p: &MPoly, v: usize) -> MPoly {
    let mut g = MPoly::zero();
    for c in p.coeffs_in(v) {
        if c.is_zero() {
            continue;
        }
        g = gcd_rec(&g, &c).monic();
        if g.is_constant() {
            return MPoly::one();
        }
    }
    g
}

fn content_vec(cs: &[MPoly]) -> MPoly {
    let mut g = MPoly::zero();
    for c in cs {
        if c.is_zero() {
            continue;
        }
        g = gcd_rec(&g, c).monic();
        if g.is_constant() {
            return MPoly::one();
        }
    }
    g
}

fn trim_vec(v: &mut Vec<MPoly>) {
    while v.last().map_or(false, |c| c.is_zero()) {
        v.pop();
    }
}

fn primitive_vec(mut v: Vec<MPoly>) -> Vec<MPoly> {
    trim_vec(&mut v);
    let c = content_vec(&v);
    let mut out: Vec<MPoly> = if c.is_one() || c.is_zero() {
        v
    } else {
        v.iter().map(|x| x.exact_div(&c).expect("content divides")).collect()
    };
    if let Some(l) = out.last().map(|p| p.lc()) {
        if !l.is_one() {
            let inv = l.recip();
            out = out.iter().map(|x| x.scale(&inv)).collect();
        }
    }
    out
}

/// Pseudo-remainder of coefficient vectors.
fn prem(f: &[MPoly], g: &[MPoly]) -> Vec<MPoly> {
    let mut r = f.to_vec();
    trim_vec(&mut r);
    let dg = g.len() - 1;
    let lg = &g[dg];
    while r.len() > dg && !r.is_empty() {
        let k = r.len() - 1 - dg;
        let lr = r[r.len() - 1].clone();
        for c in r.iter_mut() {
            *c = &*c * lg;
        }
        for (i, c) in g.iter().enumerate() {
            let t = c * &lr;
            r[k + i] = &r[k + i] - &t;
        }
        r.pop();
        trim_vec(&mut r);
    }
    r
}

/// Specializes every variable other than the main one at a few integer points. If the
/// leading coefficients survive and the images are coprime, the gcd cannot
/// involve `v` (its degree in `v` is bounded by that of any such image).
fn images_coprime(a: &[MPoly], b: &[MPoly], nvars: usize) -> bool {
    for attempt in 0..2i64 {
        let vals: Vec<Rat> = (0..nvars).map(|j| Rat::from_integer((13 + 29 * j as i64 + 101 * attempt).into())).collect();
        let ia: Vec<Rat> = a.iter().map(|c| c.eval(&vals)).collect();
        let ib: Vec<Rat> = b.iter().map(|c| c.eval(&vals)).collect();
        if ia.last().map_or(true, |x| x.is_zero()) || ib.last().map_or(true, |x| x.is_zero()) {
            continue;
        }
        return ugcd(&ia, &ib).len() <= 1;
    }
    false
}

/// Gcd of two primitive polynomials given as coefficient vectors.
fn prim_prs(a: Vec<MPoly>, b: Vec<MPoly>) -> Vec<MPoly> {
    let (mut f, mut g) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    trim_vec(&mut f);
    trim_vec(&mut g);
    if g.len() <= 1 {
        return vec![MPoly::one()];
    }
    loop {
        let r = prem(&f, &g);
        if r.is_empty() {
            return primitive_vec(g);
        }
        if r.len() == 1 {
            return vec![MPoly::one()];
        }
        f = g;
        g = primitive_vec(r);
    }
}

/// Determinant by fraction-free elimination.
pub fn det_bareiss(mut m: Vec<Vec<MPoly>>) -> MPoly {
    let n = m.len();
    if n == 0 {
        return MPoly::one();
    }
    let mut sign = false;
    let mut prev = MPoly::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = !sign;
                }
                None => return MPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = t.exact_div(&prev).expect("Bareiss division is exact");
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign {
        -&d
    } else {
        d
    }
}

/// Resultant with respect to variable `v`.
pub fn resultant(a: &MPoly, b: &MPoly, v: usize) -> MPoly {
    let ca = a.coeffs_in(v);
    let cb = b.coeffs_in(v);
    if ca.is_empty() || cb.is_empty() {
        return MPoly::zero();
    }
    let m = ca.len() - 1;
    let n = cb.len() - 1;
    if m == 0 {
        return ca[0].pow(n as u32);
    }
    if n == 0 {
        return cb[0].pow(m as u32);
    }
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![MPoly::zero(); size];
        for (j, c) in ca.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![MPoly::zero(); size];
        for (j, c) in cb.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    det_bareiss(rows)
}
