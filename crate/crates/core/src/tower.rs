//! Towers of Pi- and Sigma*-extensions over `K(k)` and their elements.
//!
//! An element is a rational function in the highest generator it mentions,
//! with coefficients that are elements over lower generators. Generators are
//! identified by a rank key; a smaller rank means lower in the tower, so new
//! generators can be slotted between existing ones without touching any
//! element already built.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::arith::Rat;
use crate::ratfunc::{DivByZero, RatFunc};
use num_traits::Zero;

/// Rank key of a generator. Larger ranks sit higher in the tower.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Var(pub u128);

const RANK_STEP: u128 = 1 << 64;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Elem {
    Base(RatFunc),
    Ext(Rc<Ext>),
}

#[derive(PartialEq, Eq, Hash, Debug)]
pub struct Ext {
    pub var: Var,
    /// Numerator coefficients, lowest power first; the last one is nonzero.
    pub num: Vec<Elem>,
    /// Monic denominator, lowest power first.
    pub den: Vec<Elem>,
}

type UPoly = Vec<Elem>;

impl Default for Elem {
    fn default() -> Self {
        Elem::zero()
    }
}

impl From<RatFunc> for Elem {
    fn from(r: RatFunc) -> Elem {
        Elem::Base(r)
    }
}

impl Elem {
    pub fn zero() -> Elem {
        Elem::Base(RatFunc::zero())
    }

    pub fn one() -> Elem {
        Elem::Base(RatFunc::one())
    }

    pub fn int(n: i64) -> Elem {
        Elem::Base(RatFunc::from_int(n))
    }

    pub fn rat(r: Rat) -> Elem {
        Elem::Base(RatFunc::constant(r))
    }

    pub fn k() -> Elem {
        Elem::Base(RatFunc::k())
    }

    /// The generator itself as an element.
    pub fn gen(v: Var) -> Elem {
        Elem::Ext(Rc::new(Ext { var: v, num: vec![Elem::zero(), Elem::one()], den: vec![Elem::one()] }))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Elem::Base(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Elem::Base(r) if r.is_one())
    }

    pub fn base(&self) -> Option<&RatFunc> {
        match self {
            Elem::Base(r) => Some(r),
            Elem::Ext(_) => None,
        }
    }

    /// The value if the element lies in the constant field `K`.
    pub fn as_constant(&self) -> Option<&RatFunc> {
        match self {
            Elem::Base(r) if r.is_free_of_k() => Some(r),
            _ => None,
        }
    }

    pub fn top(&self) -> Option<Var> {
        match self {
            Elem::Base(_) => None,
            Elem::Ext(e) => Some(e.var),
        }
    }

    /// Numerator and denominator as polynomials in `v`; `v` must not be
    /// below the element's top generator.
    pub fn parts(&self, v: Var) -> (UPoly, UPoly) {
        match self {
            Elem::Ext(e) if e.var == v => (e.num.clone(), e.den.clone()),
            _ => {
                debug_assert!(self.top().map_or(true, |t| t < v));
                if self.is_zero() {
                    (Vec::new(), vec![Elem::one()])
                } else {
                    (vec![self.clone()], vec![Elem::one()])
                }
            }
        }
    }

    /// Coefficients if the element is a polynomial in `v`.
    pub fn poly_in(&self, v: Var) -> Option<UPoly> {
        let (n, d) = self.parts(v);
        if d.len() == 1 {
            Some(n)
        } else {
            None
        }
    }

    /// Laurent coefficients in `v`: `(lowest exponent, coefficients)` when the
    /// denominator is a power of `v`.
    pub fn laurent_in(&self, v: Var) -> Option<(i64, UPoly)> {
        let (n, d) = self.parts(v);
        if d[..d.len() - 1].iter().all(|c| c.is_zero()) {
            Some((-(d.len() as i64 - 1), n))
        } else {
            None
        }
    }

    pub fn from_parts(v: Var, num: UPoly, den: UPoly) -> Result<Elem, DivByZero> {
        normalize(v, num, den)
    }

    pub fn from_poly(v: Var, num: UPoly) -> Elem {
        collapse(v, trimmed(num), vec![Elem::one()])
    }

    pub fn from_laurent(v: Var, low: i64, coeffs: UPoly) -> Elem {
        if low >= 0 {
            let mut n = vec![Elem::zero(); low as usize];
            n.extend(coeffs);
            Elem::from_poly(v, n)
        } else {
            let mut d = vec![Elem::zero(); (-low) as usize];
            d.push(Elem::one());
            normalize(v, coeffs, d).expect("monomial denominator")
        }
    }

    pub fn neg(&self) -> Elem {
        match self {
            Elem::Base(r) => Elem::Base(r.neg()),
            Elem::Ext(e) => Elem::Ext(Rc::new(Ext {
                var: e.var,
                num: e.num.iter().map(|c| c.neg()).collect(),
                den: e.den.clone(),
            })),
        }
    }

    pub fn add(&self, o: &Elem) -> Elem {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if let (Elem::Base(a), Elem::Base(b)) = (self, o) {
            return Elem::Base(a.add(b));
        }
        let v = self.top().max(o.top()).unwrap();
        let (an, ad) = self.parts(v);
        let (bn, bd) = o.parts(v);
        if ad.len() == 1 && bd.len() == 1 {
            return collapse(v, trimmed(p_add(&an, &bn)), ad);
        }
        if ad == bd {
            return normalize(v, p_add(&an, &bn), ad).unwrap();
        }
        let g = p_gcd(&ad, &bd);
        let d1 = p_div_exact(&ad, &g);
        let d2 = p_div_exact(&bd, &g);
        let num = p_add(&p_mul(&an, &d2), &p_mul(&bn, &d1));
        let den = p_mul(&p_mul(&d1, &d2), &g);
        normalize(v, num, den).unwrap()
    }

    pub fn sub(&self, o: &Elem) -> Elem {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Elem) -> Elem {
        if self.is_zero() || o.is_zero() {
            return Elem::zero();
        }
        if self.is_one() {
            return o.clone();
        }
        if o.is_one() {
            return self.clone();
        }
        if let (Elem::Base(a), Elem::Base(b)) = (self, o) {
            return Elem::Base(a.mul(b));
        }
        let v = self.top().max(o.top()).unwrap();
        let (an, ad) = self.parts(v);
        let (bn, bd) = o.parts(v);
        if ad.len() == 1 && bd.len() == 1 {
            return collapse(v, p_mul(&an, &bn), ad);
        }
        if an.len() == 1 && ad.len() == 1 {
            // lower-level factor times a fraction: only the numerator scales
            return collapse(v, p_scale(&bn, &an[0]), bd);
        }
        if bn.len() == 1 && bd.len() == 1 {
            return collapse(v, p_scale(&an, &bn[0]), ad);
        }
        normalize(v, p_mul(&an, &bn), p_mul(&ad, &bd)).unwrap()
    }

    pub fn inv(&self) -> Result<Elem, DivByZero> {
        match self {
            Elem::Base(r) => Ok(Elem::Base(r.inv()?)),
            Elem::Ext(e) => normalize(e.var, e.den.clone(), e.num.clone()),
        }
    }

    pub fn div(&self, o: &Elem) -> Result<Elem, DivByZero> {
        if o.is_zero() {
            return Err(DivByZero);
        }
        if let (Elem::Base(a), Elem::Base(b)) = (self, o) {
            return Ok(Elem::Base(a.div(b)?));
        }
        let v = self.top().max(o.top()).unwrap();
        if o.top().map_or(true, |t| t < v) {
            // dividing by a lower element only scales the numerator
            let inv = o.inv()?;
            return Ok(self.mul(&inv));
        }
        Ok(self.mul(&o.inv()?))
    }

    pub fn scale(&self, c: &RatFunc) -> Elem {
        self.mul(&Elem::Base(c.clone()))
    }

    pub fn pow(&self, e: i64) -> Result<Elem, DivByZero> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Elem::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// Generators occurring anywhere in the element.
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        if let Elem::Ext(e) = self {
            out.insert(e.var);
            for c in e.num.iter().chain(e.den.iter()) {
                c.collect_vars(out);
            }
        }
    }

    /// True if the base part of some coefficient involves `k`.
    pub fn uses_k(&self) -> bool {
        match self {
            Elem::Base(r) => !r.is_free_of_k(),
            Elem::Ext(e) => e.num.iter().chain(e.den.iter()).any(|c| c.uses_k()),
        }
    }

    /// True if every denominator is a base element (no generator occurs in
    /// any denominator).
    pub fn is_polynomial(&self) -> bool {
        match self {
            Elem::Base(_) => true,
            Elem::Ext(e) => e.den.len() == 1 && e.num.iter().all(|c| c.is_polynomial()),
        }
    }

    /// Applies `f` to every base coefficient, rebuilding the element.
    pub fn map_base(&self, f: &mut dyn FnMut(&RatFunc) -> Result<RatFunc, DivByZero>) -> Result<Elem, DivByZero> {
        match self {
            Elem::Base(r) => Ok(Elem::Base(f(r)?)),
            Elem::Ext(e) => {
                let num = e.num.iter().map(|c| c.map_base(f)).collect::<Result<Vec<_>, _>>()?;
                let den = e.den.iter().map(|c| c.map_base(f)).collect::<Result<Vec<_>, _>>()?;
                normalize(e.var, num, den)
            }
        }
    }
}

fn trimmed(mut p: UPoly) -> UPoly {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
    p
}

/// Builds an element from a numerator and an already monic denominator that
/// is coprime to it.
fn collapse(v: Var, num: UPoly, den: UPoly) -> Elem {
    if num.is_empty() {
        return Elem::zero();
    }
    if den.len() == 1 && num.len() == 1 {
        return num.into_iter().next().unwrap();
    }
    Elem::Ext(Rc::new(Ext { var: v, num, den }))
}

fn normalize(v: Var, num: UPoly, den: UPoly) -> Result<Elem, DivByZero> {
    let mut num = trimmed(num);
    let mut den = trimmed(den);
    if den.is_empty() {
        return Err(DivByZero);
    }
    if num.is_empty() {
        return Ok(Elem::zero());
    }
    if den.len() > 1 {
        let dz = den.iter().position(|c| !c.is_zero()).unwrap();
        let nz = num.iter().position(|c| !c.is_zero()).unwrap();
        if dz == den.len() - 1 || nz == num.len() - 1 {
            // a monomial on one side: the gcd is a power of v
            let s = dz.min(nz);
            num.drain(..s);
            den.drain(..s);
        } else {
            let g = p_gcd(&num, &den);
            if g.len() > 1 {
                num = p_div_exact(&num, &g);
                den = p_div_exact(&den, &g);
            }
        }
    }
    let lc = den.last().unwrap().clone();
    if !lc.is_one() {
        let inv = lc.inv()?;
        num = p_scale(&num, &inv);
        den = p_scale(&den, &inv);
    }
    Ok(collapse(v, num, den))
}

// ---- dense polynomials over a lower field ----

fn p_add(a: &[Elem], b: &[Elem]) -> UPoly {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        out.push(match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => x.add(y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => unreachable!(),
        });
    }
    trimmed(out)
}

fn p_mul(a: &[Elem], b: &[Elem]) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Elem::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    trimmed(out)
}

fn p_scale(a: &[Elem], c: &Elem) -> UPoly {
    if c.is_one() {
        return a.to_vec();
    }
    trimmed(a.iter().map(|x| x.mul(c)).collect())
}

fn p_divrem(a: &[Elem], b: &[Elem]) -> (UPoly, UPoly) {
    let mut r = trimmed(a.to_vec());
    let db = b.len() - 1;
    let lb_inv = b[db].inv().expect("nonzero leading coefficient");
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![Elem::zero(); r.len() - db];
    while r.len() > db {
        let top = r.len() - 1;
        let c = r[top].mul(&lb_inv);
        let s = top - db;
        for (i, bi) in b.iter().enumerate().take(db) {
            r[s + i] = r[s + i].sub(&c.mul(bi));
        }
        r.pop();
        q[s] = c;
        r = trimmed(r);
    }
    (trimmed(q), r)
}

fn p_div_exact(a: &[Elem], b: &[Elem]) -> UPoly {
    let (q, r) = p_divrem(a, b);
    debug_assert!(r.is_empty());
    q
}

fn p_monic(a: UPoly) -> UPoly {
    match a.last() {
        None => a,
        Some(l) if l.is_one() => a,
        Some(l) => {
            let inv = l.inv().unwrap();
            p_scale(&a, &inv)
        }
    }
}

/// Value at a fixed rational point: base variable `i` at `(1009 + 37 i)/(13 + 2 i)`,
/// each generator at a value derived from its rank. `None` at a pole.
fn spec_value(e: &Elem) -> Option<Rat> {
    match e {
        Elem::Base(r) => {
            let n = r.num().max_var().max(r.den().max_var()).map_or(0, |m| m + 1);
            let vals: Vec<Rat> = (0..n as i64).map(|i| Rat::new((1009 + 37 * i).into(), (13 + 2 * i).into())).collect();
            r.eval(&vals)
        }
        Elem::Ext(x) => {
            let t = Rat::new((7919 + (x.var.0 % 1_000_003) as i64).into(), 101.into());
            let d = spec_poly(&x.den)?;
            let dv = horner(&d, &t);
            if dv.is_zero() {
                return None;
            }
            Some(horner(&spec_poly(&x.num)?, &t) / dv)
        }
    }
}

fn spec_poly(p: &[Elem]) -> Option<Vec<Rat>> {
    p.iter().map(spec_value).collect()
}

fn horner(p: &[Rat], t: &Rat) -> Rat {
    p.iter().rev().fold(Rat::zero(), |acc, c| acc * t + c)
}

/// True when a specialization proves `gcd(a, b) = 1`: with both leading
/// coefficients surviving, the resultant specializes, so a trivial gcd of
/// the images means a nonzero resultant.
fn coprime_by_specialization(a: &[Elem], b: &[Elem]) -> bool {
    let (Some(sa), Some(sb)) = (spec_poly(a), spec_poly(b)) else { return false };
    if sa.last().map_or(true, |c| c.is_zero()) || sb.last().map_or(true, |c| c.is_zero()) {
        return false;
    }
    crate::mpoly::ugcd(&sa, &sb).len() == 1
}

fn p_gcd(a: &[Elem], b: &[Elem]) -> UPoly {
    if coprime_by_specialization(a, b) {
        return vec![Elem::one()];
    }
    let mut x = p_monic(trimmed(a.to_vec()));
    let mut y = p_monic(trimmed(b.to_vec()));
    if x.len() < y.len() {
        core::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        if y.len() == 1 {
            return vec![Elem::one()];
        }
        let (_, r) = p_divrem(&x, &y);
        x = y;
        y = p_monic(r);
    }
    x
}

/// `p(t + s)` by Horner's rule.
fn p_taylor(p: &[Elem], s: &Elem) -> UPoly {
    let mut acc: UPoly = Vec::new();
    for c in p.iter().rev() {
        // acc * (t + s) + c
        let mut next = vec![Elem::zero(); acc.len() + 1];
        for (i, a) in acc.iter().enumerate() {
            next[i + 1] = next[i + 1].add(a);
            next[i] = next[i].add(&a.mul(s));
        }
        next[0] = next[0].add(c);
        acc = trimmed(next);
    }
    acc
}

/// `p(a t)`.
fn p_dilate(p: &[Elem], a: &Elem) -> UPoly {
    let mut out = Vec::with_capacity(p.len());
    let mut pw = Elem::one();
    for c in p {
        out.push(c.mul(&pw));
        pw = pw.mul(a);
    }
    out
}

// ---- generators and towers ----

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Kind {
    Pi,
    Sigma,
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub var: Var,
    pub name: String,
    pub kind: Kind,
    /// `alpha` with `sigma(t) = alpha t`, or `beta` with `sigma(t) = t + beta`.
    pub defining: Elem,
    /// `1/sigma^-1(alpha)` or `-sigma^-1(beta)`, so that
    /// `sigma^-1(t) = inv_step * t` or `t + inv_step`.
    pub inv_step: Elem,
    pub depth: u32,
    pub certified: bool,
    /// Part of the ground field: depth zero by fiat.
    pub ground: bool,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TowerError {
    /// The defining element mentions a generator that is not below the new one.
    NotBelow { name: String },
    ZeroProduct { name: String },
    UnknownGenerator,
    /// Reordering would place a generator before one its definition uses.
    OrderViolation { name: String },
    DivByZero,
}

impl fmt::Display for TowerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TowerError::NotBelow { name } => write!(f, "definition of {} uses a generator that is not below it", name),
            TowerError::ZeroProduct { name } => write!(f, "product generator {} needs a nonzero factor", name),
            TowerError::UnknownGenerator => f.write_str("unknown generator"),
            TowerError::OrderViolation { name } => write!(f, "reordering moves {} below a generator it depends on", name),
            TowerError::DivByZero => f.write_str("division by zero"),
        }
    }
}

impl From<DivByZero> for TowerError {
    fn from(_: DivByZero) -> Self {
        TowerError::DivByZero
    }
}

/// A tower `K(k)(t_1)...(t_e)` with `sigma(k) = k + 1` fixing `K`.
#[derive(Clone, Debug)]
pub struct Tower {
    /// Parameter names; parameter `i` is polynomial variable `i + 1`.
    pub params: Vec<String>,
    /// Name printed for `k`.
    pub kname: String,
    gens: Vec<Generator>,
    /// Depth of `k`: 1 over the constants, 0 when `k` is in the ground field.
    pub k_depth: u32,
}

impl Tower {
    pub fn new(params: Vec<String>) -> Tower {
        Tower { params, kname: String::from("k"), gens: Vec::new(), k_depth: 1 }
    }

    pub fn var_names(&self) -> Vec<String> {
        let mut v = vec![self.kname.clone()];
        v.extend(self.params.iter().cloned());
        v
    }

    pub fn gens(&self) -> &[Generator] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn index_of(&self, v: Var) -> Option<usize> {
        self.gens.binary_search_by(|g| g.var.cmp(&v)).ok()
    }

    pub fn gen(&self, v: Var) -> &Generator {
        &self.gens[self.index_of(v).expect("generator belongs to the tower")]
    }

    pub fn gen_by_name(&self, name: &str) -> Option<&Generator> {
        self.gens.iter().find(|g| g.name == name)
    }

    /// One-based position in the tower (0 is the base field).
    pub fn level(&self, v: Var) -> usize {
        self.index_of(v).map_or(0, |i| i + 1)
    }

    pub fn level_of(&self, e: &Elem) -> usize {
        e.top().map_or(0, |v| self.level(v))
    }

    /// Highest generator strictly below `bound` (all of them for `None`).
    pub fn top_below(&self, bound: Option<Var>) -> Option<&Generator> {
        self.gens.iter().rev().find(|g| bound.map_or(true, |b| g.var < b))
    }

    /// Generators with rank in `[lo, hi)`.
    pub fn gens_between(&self, lo: Option<Var>, hi: Option<Var>) -> impl Iterator<Item = &Generator> {
        self.gens.iter().filter(move |g| lo.map_or(true, |l| g.var >= l) && hi.map_or(true, |h| g.var < h))
    }

    fn rank_between(&self, lo: Option<Var>, hi: Option<Var>) -> Var {
        let l = lo.map_or(0, |v| v.0);
        match hi {
            None => Var(l + RANK_STEP),
            Some(h) => {
                assert!(h.0 - l > 1, "rank space exhausted");
                Var(l + (h.0 - l) / 2)
            }
        }
    }

    /// Depth of an element.
    pub fn depth(&self, e: &Elem) -> u32 {
        let mut d = if e.uses_k() { self.k_depth } else { 0 };
        for v in e.vars() {
            d = d.max(self.gen(v).depth);
        }
        d
    }

    /// Depth of the field of generators below `bound` (including `k`).
    pub fn field_depth(&self, bound: Option<Var>) -> u32 {
        self.gens_between(None, bound).map(|g| g.depth).fold(self.k_depth, u32::max)
    }

    /// True if depths never decrease along the tower.
    pub fn is_ordered(&self) -> bool {
        self.gens.windows(2).all(|w| w[0].depth <= w[1].depth)
    }

    fn check_below(&self, e: &Elem, rank: Var, name: &str) -> Result<(), TowerError> {
        for v in e.vars() {
            if v >= rank || self.index_of(v).is_none() {
                return Err(TowerError::NotBelow { name: name.into() });
            }
        }
        Ok(())
    }

    fn insert_gen(&mut self, var: Var, name: String, kind: Kind, defining: Elem, certified: bool, ground: bool) -> Result<Var, TowerError> {
        self.check_below(&defining, var, &name)?;
        if kind == Kind::Pi && defining.is_zero() {
            return Err(TowerError::ZeroProduct { name });
        }
        let pre = self.sigma_inv(&defining);
        let inv_step = match kind {
            Kind::Pi => pre.inv()?,
            Kind::Sigma => pre.neg(),
        };
        let depth = if ground { 0 } else { self.depth(&defining) + 1 };
        let g = Generator { var, name, kind, defining, inv_step, depth, certified, ground };
        let pos = self.gens.partition_point(|x| x.var < var);
        self.gens.insert(pos, g);
        Ok(var)
    }

    /// Appends a generator on top of the tower.
    pub fn push(&mut self, name: &str, kind: Kind, defining: Elem) -> Result<Var, TowerError> {
        let var = self.rank_between(self.gens.last().map(|g| g.var), None);
        self.insert_gen(var, name.into(), kind, defining, false, false)
    }

    /// Appends a generator that belongs to the ground field (depth 0).
    pub fn push_ground(&mut self, name: &str, kind: Kind, defining: Elem) -> Result<Var, TowerError> {
        let var = self.rank_between(self.gens.last().map(|g| g.var), None);
        self.insert_gen(var, name.into(), kind, defining, false, true)
    }

    /// Inserts a Pi-generator after every generator of no greater depth and
    /// after the generators its factor uses, keeping an ordered tower ordered.
    pub fn insert_product(&mut self, name: &str, alpha: Elem, ground: bool) -> Result<Var, TowerError> {
        let depth = if ground { 0 } else { self.depth(&alpha) + 1 };
        let mut after: Option<Var> = alpha.vars().into_iter().max();
        for g in &self.gens {
            if g.depth <= depth && after.map_or(true, |a| g.var > a) {
                after = Some(g.var);
            }
        }
        let next = self.gens.iter().map(|g| g.var).find(|v| after.map_or(true, |a| *v > a));
        let var = self.rank_between(after, next);
        self.insert_gen(var, name.into(), Kind::Pi, alpha, false, ground)
    }

    /// Inserts a Sigma*-generator below `bound`, as low as its definition and
    /// the depth order allow.
    pub fn insert_sigma_below(&mut self, bound: Option<Var>, name: &str, beta: Elem, certified: bool) -> Result<Var, TowerError> {
        let depth = self.depth(&beta) + 1;
        let mut after: Option<Var> = beta.vars().into_iter().max();
        for g in self.gens_between(None, bound) {
            if g.depth < depth && after.map_or(true, |a| g.var > a) {
                after = Some(g.var);
            }
        }
        if let (Some(a), Some(b)) = (after, bound) {
            if a >= b {
                return Err(TowerError::NotBelow { name: name.into() });
            }
        }
        let next = self
            .gens
            .iter()
            .map(|g| g.var)
            .find(|v| after.map_or(true, |a| *v > a));
        let hi = match (next, bound) {
            (Some(n), Some(b)) => Some(n.min(b)),
            (Some(n), None) => Some(n),
            (None, b) => b,
        };
        let var = self.rank_between(after, hi);
        self.insert_gen(var, name.into(), Kind::Sigma, beta, certified, false)
    }

    pub fn set_certified(&mut self, v: Var, c: bool) {
        let i = self.index_of(v).unwrap();
        self.gens[i].certified = c;
    }

    pub fn rename(&mut self, v: Var, name: &str) {
        let i = self.index_of(v).unwrap();
        self.gens[i].name = name.into();
    }

    // ---- the automorphism ----

    pub fn sigma(&self, e: &Elem) -> Elem {
        match e {
            Elem::Base(r) => Elem::Base(r.shift(1)),
            Elem::Ext(x) => {
                let g = self.gen(x.var);
                let num: UPoly = x.num.iter().map(|c| self.sigma(c)).collect();
                let den: UPoly = x.den.iter().map(|c| self.sigma(c)).collect();
                self.apply_step(x.var, g.kind, &g.defining, num, den)
            }
        }
    }

    pub fn sigma_inv(&self, e: &Elem) -> Elem {
        match e {
            Elem::Base(r) => Elem::Base(r.shift(-1)),
            Elem::Ext(x) => {
                let g = self.gen(x.var);
                let num: UPoly = x.num.iter().map(|c| self.sigma_inv(c)).collect();
                let den: UPoly = x.den.iter().map(|c| self.sigma_inv(c)).collect();
                self.apply_step(x.var, g.kind, &g.inv_step, num, den)
            }
        }
    }

    fn apply_step(&self, v: Var, kind: Kind, step: &Elem, num: UPoly, den: UPoly) -> Elem {
        match kind {
            Kind::Sigma => {
                let num = p_taylor(&num, step);
                let den = if den.len() == 1 { den } else { p_taylor(&den, step) };
                collapse(v, num, den)
            }
            Kind::Pi => {
                let num = p_dilate(&num, step);
                if den.len() == 1 {
                    return collapse(v, num, den);
                }
                let den = p_dilate(&den, step);
                let inv = den.last().unwrap().inv().unwrap();
                collapse(v, p_scale(&num, &inv), p_scale(&den, &inv))
            }
        }
    }

    /// `sigma^p(e)` for any integer `p`.
    pub fn sigma_pow(&self, e: &Elem, p: i64) -> Elem {
        let mut out = e.clone();
        for _ in 0..p.unsigned_abs() {
            out = if p > 0 { self.sigma(&out) } else { self.sigma_inv(&out) };
        }
        out
    }

    // ---- views ----

    /// Monomials in the generators with base coefficients, if no generator
    /// occurs in a denominator.
    pub fn as_polynomial(&self, e: &Elem) -> Option<Vec<(Vec<(Var, u32)>, RatFunc)>> {
        fn walk(e: &Elem, prefix: &mut Vec<(Var, u32)>, out: &mut Vec<(Vec<(Var, u32)>, RatFunc)>) -> bool {
            match e {
                Elem::Base(r) => {
                    if !r.is_zero() {
                        let mut m = prefix.clone();
                        m.sort();
                        out.push((m, r.clone()));
                    }
                    true
                }
                Elem::Ext(x) => {
                    if x.den.len() != 1 {
                        return false;
                    }
                    for (i, c) in x.num.iter().enumerate() {
                        if i > 0 {
                            prefix.push((x.var, i as u32));
                        }
                        let ok = walk(c, prefix, out);
                        if i > 0 {
                            prefix.pop();
                        }
                        if !ok {
                            return false;
                        }
                    }
                    true
                }
            }
        }
        let mut out = Vec::new();
        if walk(e, &mut Vec::new(), &mut out) {
            out.sort_by(|a, b| a.0.cmp(&b.0));
            Some(out)
        } else {
            None
        }
    }

    // ---- reordering ----

    /// Rebuilds the tower with generators in the order `perm` (a list of old
    /// positions). Returns the new tower and a map from old to new ranks.
    pub fn reorder(&self, perm: &[usize]) -> Result<(Tower, BTreeMap<Var, Var>), TowerError> {
        let n = self.gens.len();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&i| i >= n || core::mem::replace(&mut seen[i], true)) {
            return Err(TowerError::UnknownGenerator);
        }
        let mut map = BTreeMap::new();
        let mut out = Tower { params: self.params.clone(), kname: self.kname.clone(), gens: Vec::new(), k_depth: self.k_depth };
        for (pos, &i) in perm.iter().enumerate() {
            let g = &self.gens[i];
            for v in g.defining.vars() {
                if !map.contains_key(&v) {
                    return Err(TowerError::OrderViolation { name: g.name.clone() });
                }
            }
            let var = Var((pos as u128 + 1) * RANK_STEP);
            map.insert(g.var, var);
            let def = self.transport(&g.defining, &map, &out)?;
            out.insert_gen(var, g.name.clone(), g.kind, def, g.certified, g.ground)?;
        }
        Ok((out, map))
    }

    /// Re-expresses `e` through the rank map `map` inside `target`.
    pub fn transport(&self, e: &Elem, map: &BTreeMap<Var, Var>, target: &Tower) -> Result<Elem, TowerError> {
        let _ = target;
        match e {
            Elem::Base(_) => Ok(e.clone()),
            Elem::Ext(x) => {
                let t = Elem::gen(*map.get(&x.var).ok_or(TowerError::UnknownGenerator)?);
                let horner = |cs: &[Elem]| -> Result<Elem, TowerError> {
                    let mut acc = Elem::zero();
                    for c in cs.iter().rev() {
                        acc = acc.mul(&t).add(&self.transport(c, map, target)?);
                    }
                    Ok(acc)
                };
                let n = horner(&x.num)?;
                let d = horner(&x.den)?;
                Ok(n.div(&d)?)
            }
        }
    }

    // ---- printing ----

    pub fn fmt_elem(&self, e: &Elem) -> String {
        match e {
            Elem::Base(r) => r.to_string_with(&self.var_names()),
            Elem::Ext(x) => {
                let name = self.index_of(x.var).map(|i| self.gens[i].name.clone()).unwrap_or_else(|| String::from("?"));
                let n = self.fmt_upoly(&x.num, &name);
                if x.den.len() == 1 {
                    return n;
                }
                let d = self.fmt_upoly(&x.den, &name);
                alloc::format!("({})/({})", n, d)
            }
        }
    }

    fn fmt_upoly(&self, p: &[Elem], name: &str) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (i, c) in p.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let pw = match i {
                0 => String::new(),
                1 => String::from(name),
                _ => alloc::format!("{}^{}", name, i),
            };
            let cs = self.fmt_elem(c);
            let simple = !cs.contains(' ') && !cs.contains('/');
            let term = if pw.is_empty() {
                cs
            } else if c.is_one() {
                pw
            } else if simple {
                alloc::format!("{}*{}", cs, pw)
            } else {
                alloc::format!("({})*{}", cs, pw)
            };
            parts.push(term);
        }
        if parts.is_empty() {
            return String::from("0");
        }
        parts.join(" + ")
    }
}

/// Basis of the solutions `(c, g)` of `a1 sigma(g) + a2 g = c . f`.
#[derive(Clone, Debug)]
pub struct SolutionBasis {
    pub n: usize,
    pub rows: Vec<(Vec<RatFunc>, Elem)>,
    pub a: (Elem, Elem),
}

impl SolutionBasis {
    pub fn new(n: usize, rows: Vec<(Vec<RatFunc>, Elem)>, a: (Elem, Elem)) -> SolutionBasis {
        let mut rows = echelon(rows);
        // a first-order homogeneous equation has at most one independent solution
        if let Some(i) = rows.iter().position(|(c, _)| c.iter().all(|x| x.is_zero())) {
            rows.truncate(i + 1);
        }
        SolutionBasis { n, rows, a }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Rows whose constant vector is nonzero.
    pub fn nontrivial(&self) -> impl Iterator<Item = &(Vec<RatFunc>, Elem)> {
        self.rows.iter().filter(|(c, _)| c.iter().any(|x| !x.is_zero()))
    }

    /// Checks every row against its equation by substitution.
    pub fn verify(&self, tower: &Tower, f: &[Elem]) -> bool {
        self.rows.iter().all(|(c, g)| {
            let lhs = self.a.0.mul(&tower.sigma(g)).add(&self.a.1.mul(g));
            let rhs = c.iter().zip(f).fold(Elem::zero(), |acc, (ci, fi)| acc.add(&fi.scale(ci)));
            lhs == rhs
        })
    }
}

/// Row echelon form on the constant part with pivots one and zeros above and
/// below; the element column follows the same row operations. Rows with a zero
/// constant part are kept after the others.
pub fn echelon(mut rows: Vec<(Vec<RatFunc>, Elem)>) -> Vec<(Vec<RatFunc>, Elem)> {
    let n = rows.first().map_or(0, |r| r.0.len());
    let mut top = 0;
    for col in 0..n {
        let Some(p) = (top..rows.len()).find(|&r| !rows[r].0[col].is_zero()) else {
            continue;
        };
        rows.swap(top, p);
        let inv = rows[top].0[col].inv().unwrap();
        if !inv.is_one() {
            let (c, g) = &mut rows[top];
            for x in c.iter_mut() {
                *x = x.mul(&inv);
            }
            *g = g.scale(&inv);
        }
        let (pc, pg) = rows[top].clone();
        for (r, (c, g)) in rows.iter_mut().enumerate() {
            if r == top || c[col].is_zero() {
                continue;
            }
            let f = c[col].clone();
            for (x, y) in c.iter_mut().zip(pc.iter()) {
                if !y.is_zero() {
                    *x = x.sub(&f.mul(y));
                }
            }
            *g = g.sub(&pg.scale(&f));
        }
        top += 1;
    }
    rows.retain(|(c, g)| !g.is_zero() || c.iter().any(|x| !x.is_zero()));
    rows
}

/// Coefficient of `v^r` in a Laurent polynomial in `v`.
pub fn coeff(e: &Elem, v: Var, r: i64) -> Elem {
    match e.laurent_in(v) {
        Some((low, cs)) => {
            let i = r - low;
            if i < 0 {
                Elem::zero()
            } else {
                cs.get(i as usize).cloned().unwrap_or_else(Elem::zero)
            }
        }
        None => panic!("coeff on a non-Laurent element"),
    }
}
