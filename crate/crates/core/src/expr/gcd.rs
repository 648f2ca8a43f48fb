//! Multivariate polynomial gcd over the rationals.
//!
//! Recursive on a main variable: contents by repeated gcd of coefficients,
//! primitive parts by a primitive pseudo-remainder sequence. Variables that
//! occur in only one argument are eliminated first by taking contents, which
//! keeps the common case (large numerator, small denominator) cheap.

use super::poly::Poly;
use super::Atom;

/// Normalized gcd: coprime integer coefficients, positive leading coefficient.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return if b.is_zero() {
            Poly::one()
        } else {
            b.make_primitive().1
        };
    }
    if b.is_zero() {
        return a.make_primitive().1;
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let mg = ma.gcd(&mb);
    let a1 = a.div_monomial(&ma).expect("monomial content divides");
    let b1 = b.div_monomial(&mb).expect("monomial content divides");
    let g = gcd_no_monomial(&a1, &b1);
    if mg.is_one() {
        g
    } else {
        g.mul(&Poly::term(mg, num_traits::One::one()))
            .make_primitive()
            .1
    }
}

fn gcd_no_monomial(a: &Poly, b: &Poly) -> Poly {
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    let (_, pa) = a.make_primitive();
    let (_, pb) = b.make_primitive();
    if pa == pb {
        return pa;
    }
    let va = pa.atoms();
    let vb = pb.atoms();
    if let Some(x) = va.iter().find(|x| !vb.contains(*x)) {
        return gcd_with_coeffs(&pb, &pa, x);
    }
    if let Some(x) = vb.iter().find(|x| !va.contains(*x)) {
        return gcd_with_coeffs(&pa, &pb, x);
    }
    // cheap divisibility test before running a remainder sequence
    if pb.len() <= pa.len() {
        if try_divide(&pa, &pb).is_some() {
            return pb;
        }
    } else if try_divide(&pb, &pa).is_some() {
        return pa;
    }
    let x = va
        .iter()
        .min_by_key(|x| {
            (
                pa.degree_in(x).max(pb.degree_in(x)),
                pa.degree_in(x) + pb.degree_in(x),
            )
        })
        .expect("non-constant polynomial has atoms")
        .clone();
    let ca = pa.coeffs_in(&x);
    let cb = pb.coeffs_in(&x);
    let conta = content(&ca);
    let contb = content(&cb);
    let c = gcd(&conta, &contb);
    let ua = divide_all(&ca, &conta);
    let ub = divide_all(&cb, &contb);
    let g = prs(ua, ub);
    let gx = Poly::from_coeffs(&x, &g);
    c.mul(&gx).make_primitive().1
}

fn try_divide(a: &Poly, b: &Poly) -> Option<Poly> {
    let (lma, _) = a.leading()?;
    let (lmb, _) = b.leading()?;
    lma.div(lmb)?;
    a.div_exact(b)
}

/// gcd(small, big) where `x` occurs in `big` but not in `small`.
fn gcd_with_coeffs(small: &Poly, big: &Poly, x: &Atom) -> Poly {
    let mut coeffs: Vec<Poly> = big
        .coeffs_in(x)
        .into_iter()
        .filter(|c| !c.is_zero())
        .collect();
    coeffs.sort_by_key(Poly::len);
    let mut g = small.make_primitive().1;
    for c in &coeffs {
        g = gcd(&g, c);
        if g.is_constant() {
            return Poly::one();
        }
    }
    g
}

fn content(coeffs: &[Poly]) -> Poly {
    let mut nz: Vec<&Poly> = coeffs.iter().filter(|c| !c.is_zero()).collect();
    nz.sort_by_key(|c| c.len());
    let mut it = nz.into_iter();
    let Some(first) = it.next() else {
        return Poly::one();
    };
    let mut g = first.make_primitive().1;
    for c in it {
        if g.is_constant() {
            return Poly::one();
        }
        g = gcd(&g, c);
    }
    g
}

fn divide_all(coeffs: &[Poly], d: &Poly) -> Vec<Poly> {
    coeffs
        .iter()
        .map(|c| c.div_exact(d).expect("content divides every coefficient"))
        .collect()
}

fn trim(v: &mut Vec<Poly>) {
    while v.len() > 1 && v.last().map(Poly::is_zero).unwrap_or(false) {
        v.pop();
    }
    if v.len() == 1 && v[0].is_zero() {
        v.clear();
    }
}

fn prem(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let n = b.len() - 1;
    let lcb = &b[n];
    let mut r: Vec<Poly> = a.to_vec();
    trim(&mut r);
    while r.len() > n {
        let m = r.len() - 1;
        let lr = r[m].clone();
        let shift = m - n;
        for c in r.iter_mut() {
            *c = c.mul(lcb);
        }
        for (k, bk) in b.iter().enumerate() {
            r[k + shift] = r[k + shift].sub(&lr.mul(bk));
        }
        debug_assert!(r[m].is_zero());
        trim(&mut r);
    }
    r
}

fn primitive_part(mut v: Vec<Poly>) -> Vec<Poly> {
    let c = content(&v);
    if !c.is_one() {
        v = divide_all(&v, &c);
    }
    // fix rational scale and sign by the leading coefficient
    let lead = v.last().expect("nonempty");
    let (s, _) = lead.make_primitive();
    let inv = s.recip();
    v.iter().map(|p| p.scale(&inv)).collect()
}

fn prs(a: Vec<Poly>, b: Vec<Poly>) -> Vec<Poly> {
    let (mut a, mut b) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    trim(&mut a);
    trim(&mut b);
    loop {
        if b.len() <= 1 {
            return vec![Poly::one()];
        }
        let r = prem(&a, &b);
        if r.is_empty() {
            return primitive_part(b);
        }
        a = b;
        b = primitive_part(r);
    }
}

