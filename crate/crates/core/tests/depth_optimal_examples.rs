use pisigma_core::depth_optimal::{find_depth_complete_ext, parameterized_telescope, telescope_depth_optimal, Ctx};
use pisigma_core::reduction::{solve_pt, Options, Policy};
use pisigma_core::{Elem, Kind, RatFunc, SolutionBasis, Tower, Var};

fn k() -> RatFunc {
    RatFunc::k()
}

fn one() -> RatFunc {
    RatFunc::one()
}

fn inv_pow(p: i64) -> RatFunc {
    k().add(&one()).pow(-p).unwrap()
}

/// `Q(m,x)(k)(q)(b)(s)` with `q = x^k`, `b = binom(m+k, k)`, `s = sum q b`.
fn binomial_tower() -> (Tower, [Var; 3]) {
    let mut t = Tower::new(vec!["m".into(), "x".into()]);
    let m = RatFunc::var(1);
    let q = t.push("q", Kind::Pi, Elem::Base(RatFunc::var(2))).unwrap();
    let alpha = one().add(&m).add(&k()).div(&k().add(&one())).unwrap();
    let b = t.push("b", Kind::Pi, Elem::Base(alpha)).unwrap();
    let s = t.push("s", Kind::Sigma, Elem::gen(q).mul(&Elem::gen(b))).unwrap();
    (t, [q, b, s])
}

#[test]
fn double_sum_summand_needs_depth_optimal_extensions() {
    let (mut tw, [q, b, s]) = binomial_tower();
    let m = RatFunc::var(1);
    let den = Elem::Base(one().add(&k()).add(&m));
    let f = Elem::gen(s).add(&Elem::gen(q).mul(&Elem::gen(b))).div(&den).unwrap();
    // naive: no telescoper in the given tower
    let naive = solve_pt(&mut tw.clone(), &[f.clone()], Policy::Naive, &Options::default()).unwrap();
    assert_eq!(naive.nontrivial().count(), 0);
    let r = telescope_depth_optimal(&mut tw, &f, &Options::default()).unwrap();
    assert_eq!(tw.sigma(&r.g).sub(&r.g), f);
    assert_eq!(r.new_gens.len(), 2);
    assert_eq!(r.depth_g, 3);
    assert_eq!(tw.depth(&f), 3);
    assert!(tw.is_ordered());
    let names: Vec<&str> = tw.gens().iter().map(|g| g.name.as_str()).collect();
    assert_eq!(names.len(), 5);
    // h = sum 1/(1+k+m) at depth 2 and H = sum -b q h at depth 3
    let h = tw.gens().iter().find(|g| g.depth == 2 && g.kind == Kind::Sigma).unwrap().var;
    assert_eq!(tw.gen(h).defining, Elem::Base(one().add(&k()).add(&m).inv().unwrap()));
    let hh = tw.gens().iter().find(|g| g.depth == 3 && g.var != s).unwrap().var;
    let expect_beta = Elem::gen(b).mul(&Elem::gen(q)).mul(&Elem::gen(h)).neg();
    assert_eq!(tw.gen(hh).defining, expect_beta);
    // g = s h + H up to a constant
    let g = Elem::gen(s).mul(&Elem::gen(h)).add(&Elem::gen(hh));
    assert!(r.g.sub(&g).as_constant().is_some());
}

#[test]
fn s6_instead_of_s24() {
    let mut tw = Tower::new(Vec::new());
    let s2 = tw.push("s2", Kind::Sigma, Elem::Base(inv_pow(2))).unwrap();
    let s4 = tw.push("s4", Kind::Sigma, Elem::Base(inv_pow(4))).unwrap();
    let s42 = tw.push("s42", Kind::Sigma, tw.sigma(&Elem::gen(s2)).scale(&inv_pow(4))).unwrap();
    let f = tw.sigma(&Elem::gen(s4)).scale(&inv_pow(2));
    let r = telescope_depth_optimal(&mut tw, &f, &Options::default()).unwrap();
    assert_eq!(r.new_gens.len(), 1);
    let s6 = r.new_gens[0];
    assert_eq!(tw.gen(s6).defining, Elem::Base(inv_pow(6)));
    let g = Elem::gen(s6).add(&Elem::gen(s2).mul(&Elem::gen(s4))).sub(&Elem::gen(s42));
    assert!(r.g.sub(&g).as_constant().is_some());
    assert_eq!(r.depth_g, 3);
    assert!(tw.is_ordered());
}

#[test]
fn completion_adjoins_big_h() {
    // F = K(k)(q)(h)(b) with s on top; f = (-b q h, b q) at depth 3
    let mut tw = Tower::new(vec!["m".into(), "x".into()]);
    let m = RatFunc::var(1);
    let q = tw.push("q", Kind::Pi, Elem::Base(RatFunc::var(2))).unwrap();
    let h = tw.push("h", Kind::Sigma, Elem::Base(one().add(&k()).add(&m).inv().unwrap())).unwrap();
    let alpha = one().add(&m).add(&k()).div(&k().add(&one())).unwrap();
    let b = tw.push("b", Kind::Pi, Elem::Base(alpha)).unwrap();
    let bq = Elem::gen(b).mul(&Elem::gen(q));
    let s = tw.push("s", Kind::Sigma, bq.clone()).unwrap();
    let f = vec![bq.mul(&Elem::gen(h)).neg(), bq.clone()];
    let opts = Options::default();
    let mut ctx = Ctx::new(&opts);
    let rows = find_depth_complete_ext(&mut ctx, &mut tw, &f, 3, Some(s), None).unwrap();
    assert_eq!(ctx.report.new_gens.len(), 1);
    let big = ctx.report.new_gens[0];
    assert!(b < big && big < s);
    assert_eq!(tw.gen(big).defining, f[0]);
    assert!(tw.gen(big).certified);
    let basis = SolutionBasis::new(2, rows, (Elem::one(), Elem::int(-1)));
    let z = RatFunc::zero();
    assert_eq!(basis.rows, vec![(vec![one(), z.clone()], Elem::gen(big)), (vec![z.clone(), z], Elem::one())]);
}

#[test]
fn binomial_harmonic_pair() {
    // f = (b s1, (m+1)/(m-k+1) b s1) over Q(m)(k)(b)(s1) with b = binom(m, k)
    let mut tw = Tower::new(vec!["m".into()]);
    tw.k_depth = 0;
    let m = RatFunc::var(1);
    let alpha = m.sub(&k()).div(&k().add(&one())).unwrap();
    let b = tw.push_ground("b", Kind::Pi, Elem::Base(alpha)).unwrap();
    let s1 = tw.push("s1", Kind::Sigma, Elem::Base(inv_pow(1))).unwrap();
    let bs = Elem::gen(b).mul(&Elem::gen(s1));
    let ratio = m.add(&one()).div(&m.sub(&k()).add(&one())).unwrap();
    let f = vec![bs.clone(), bs.scale(&ratio)];
    let (basis, rep) = parameterized_telescope(&mut tw, &f, &Options::default()).unwrap();
    assert!(basis.verify(&tw, &f));
    assert_eq!(rep.new_gens.len(), 1);
    let h = rep.new_gens[0];
    // the adjoined shift is b/(k+1) up to the sign the reduction produced
    let beta = Elem::gen(b).scale(&inv_pow(1));
    let got = &tw.gen(h).defining;
    assert!(*got == beta || *got == beta.neg(), "{}", tw.fmt_elem(got));
    let (c, _) = basis.nontrivial().next().unwrap();
    let two = RatFunc::from_int(2);
    assert_eq!(c[1].mul(&two), c[0].neg());
}
