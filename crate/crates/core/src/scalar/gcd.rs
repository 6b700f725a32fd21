//! Multivariate polynomial gcd over Q by recursive subresultant remainder sequences.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::Poly;

/// Monic greatest common divisor. `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a == b {
        return a.monic();
    }
    if a.num_terms() == 1 && b.num_terms() == 1 {
        return monomial_gcd(a, b);
    }
    if let Some(g) = heuristic_gcd(&integer_part(a), &integer_part(b), 0) {
        return g.monic();
    }
    let var = a.max_var().max(b.max_var()).expect("nonconstant polynomial has a variable");
    if let (Some(da), Some(db)) = (a.to_dense(var), b.to_dense(var)) {
        return Poly::from_univariate(&dense_gcd(da, db).into_iter().map(Poly::constant).collect::<Vec<_>>(), var);
    }
    // Cheap exits when one side divides the other.
    let (small, big) = if a.num_terms() <= b.num_terms() { (a, b) } else { (b, a) };
    if big.exact_div(small).is_ok() {
        return small.monic();
    }
    let ua = a.to_univariate(var);
    let ub = b.to_univariate(var);
    let ca = content(&ua);
    let cb = content(&ub);
    let g_content = gcd(&ca, &cb);
    if ua.len() == 1 || ub.len() == 1 {
        return g_content;
    }
    let pa = strip_numeric(divide_all(&ua, &ca));
    let pb = strip_numeric(divide_all(&ub, &cb));
    let g = subresultant_prs(pa, pb);
    let g = if g.len() == 1 { vec![Poly::one()] } else { divide_all(&g, &content(&g)) };
    let lifted = Poly::from_univariate(&g, var);
    (&lifted * &g_content).monic()
}

/// `p` scaled to coprime integer coefficients.
fn integer_part(p: &Poly) -> Poly {
    p.scale(&p.rational_content().recip())
}

fn max_norm(p: &Poly) -> BigInt {
    p.terms().map(|(_, c)| c.numer().abs()).max().unwrap_or_default()
}

fn int_content(p: &Poly) -> BigInt {
    p.terms().fold(BigInt::zero(), |g, (_, c)| g.gcd(c.numer()))
}

/// Substitute the integer `x` for variable `var`.
fn eval_var(p: &Poly, var: usize, x: &BigRational) -> Poly {
    let coeffs = p.to_univariate(var);
    let mut acc = Poly::zero();
    for c in coeffs.iter().rev() {
        acc = &acc.scale(x) + c;
    }
    acc
}

/// Symmetric residue of every coefficient modulo `m`.
fn symmetric_mod(p: &Poly, m: &BigInt) -> Poly {
    let half = m / 2;
    Poly::from_terms(p.terms().map(|(mono, c)| {
        let mut r = c.numer().mod_floor(m);
        if r > half {
            r -= m;
        }
        (mono.clone(), BigRational::from_integer(r))
    }))
}

/// Heuristic gcd of integer polynomials: evaluate the main variable at a large
/// integer, recurse, rebuild the candidate from its balanced base-`xi` digits and
/// keep it only if it divides both inputs. `None` means every attempt failed.
fn heuristic_gcd(a: &Poly, b: &Poly, depth: usize) -> Option<Poly> {
    const ATTEMPTS: usize = 6;
    if a.is_zero() || b.is_zero() {
        return Some(if a.is_zero() { b.clone() } else { a.clone() });
    }
    let (ca, cb) = (int_content(a), int_content(b));
    let c = Poly::constant(BigRational::from_integer(ca.gcd(&cb)));
    if a.is_constant() || b.is_constant() {
        return Some(c);
    }
    let a = a.scale(&BigRational::from_integer(ca).recip());
    let b = b.scale(&BigRational::from_integer(cb).recip());
    let var = a.max_var().max(b.max_var()).expect("nonconstant");
    if depth > 8 {
        return None;
    }
    let mut xi = BigInt::from(2) * max_norm(&a).min(max_norm(&b)) + BigInt::from(29);
    for _ in 0..ATTEMPTS {
        let x = BigRational::from_integer(xi.clone());
        let ea = eval_var(&a, var, &x);
        let eb = eval_var(&b, var, &x);
        if let Some(gamma) = heuristic_gcd(&ea, &eb, depth + 1) {
            let mut rest = gamma;
            let mut digits = Vec::new();
            while !rest.is_zero() {
                let d = symmetric_mod(&rest, &xi);
                rest = (&rest - &d).scale(&x.recip());
                digits.push(d);
            }
            let g = Poly::from_univariate(&digits, var);
            if !g.is_zero() {
                let g = g.scale(&BigRational::from_integer(int_content(&g)).recip());
                if a.exact_div(&g).is_ok() && b.exact_div(&g).is_ok() {
                    return Some(&g * &c);
                }
            }
        }
        xi = &xi * BigInt::from(73794) / BigInt::from(27011);
    }
    None
}

/// Monic gcd of dense univariate polynomials over Q (ascending coefficients).
fn dense_gcd(mut f: Vec<BigRational>, mut g: Vec<BigRational>) -> Vec<BigRational> {
    dense_trim(&mut f);
    dense_trim(&mut g);
    while !(g.len() == 1 && g[0].is_zero()) {
        let r = dense_rem(&f, &g);
        f = g;
        g = r;
    }
    let lc = f.last().expect("nonempty").clone();
    if lc.is_zero() {
        return f;
    }
    f.iter().map(|c| c / &lc).collect()
}

fn dense_trim(v: &mut Vec<BigRational>) {
    while v.len() > 1 && v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

fn dense_rem(f: &[BigRational], g: &[BigRational]) -> Vec<BigRational> {
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    let inv = g[dg].recip();
    while r.len() > dg && !(r.len() == 1 && r[0].is_zero()) {
        let dr = r.len() - 1;
        let q = &r[dr] * &inv;
        for (k, gk) in g.iter().enumerate() {
            r[k + dr - dg] -= gk * &q;
        }
        r.pop();
        dense_trim(&mut r);
        if r.is_empty() {
            r.push(BigRational::zero());
        }
    }
    r
}

pub fn lcm(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() || b.is_zero() {
        return Poly::zero();
    }
    let g = gcd(a, b);
    (&a.exact_div(&g).expect("gcd divides") * b).monic()
}

fn monomial_gcd(a: &Poly, b: &Poly) -> Poly {
    let (ma, _) = a.leading().expect("nonzero");
    let (mb, _) = b.leading().expect("nonzero");
    let n = ma.width().min(mb.width());
    let exps = (0..n).map(|i| ma.exponent(i).min(mb.exponent(i))).collect();
    Poly::term(BigRational::one(), super::Monomial::from_exponents(exps))
}

/// Gcd of all coefficients (each free of the main variable).
fn content(coeffs: &[Poly]) -> Poly {
    let mut g = Poly::zero();
    for c in coeffs {
        if c.is_zero() {
            continue;
        }
        g = gcd(&g, c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn divide_all(coeffs: &[Poly], by: &Poly) -> Vec<Poly> {
    if by.is_one() {
        return coeffs.to_vec();
    }
    coeffs.iter().map(|c| c.exact_div(by).expect("content divides coefficient")).collect()
}

/// Divide out the rational content shared by all coefficients, so pseudo-remainder
/// sequences keep integer coefficients of bounded size.
fn strip_numeric(coeffs: Vec<Poly>) -> Vec<Poly> {
    let mut num = num_bigint::BigInt::zero();
    let mut den = num_bigint::BigInt::one();
    for c in coeffs.iter().filter(|c| !c.is_zero()) {
        let q = c.rational_content();
        num = num.gcd(q.numer());
        den = den.lcm(q.denom());
    }
    if num.is_zero() || (num.is_one() && den.is_one()) {
        return coeffs;
    }
    let inv = BigRational::new(den, num);
    coeffs.iter().map(|c| c.scale(&inv)).collect()
}

fn trim(v: &mut Vec<Poly>) {
    while v.len() > 1 && v.last().is_some_and(Poly::is_zero) {
        v.pop();
    }
}

fn is_zero_uni(v: &[Poly]) -> bool {
    v.iter().all(Poly::is_zero)
}

/// Pseudo-remainder `lc(g)^(deg f - deg g + 1) f mod g` in the main variable.
fn pseudo_rem(f: &[Poly], g: &[Poly]) -> Vec<Poly> {
    let mut r = f.to_vec();
    trim(&mut r);
    let dg = g.len() - 1;
    let lg = g[dg].clone();
    let mut steps = (r.len() + 1).saturating_sub(g.len()) as u32;
    while !is_zero_uni(&r) && r.len() > dg {
        steps -= 1;
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - dg;
        let mut next: Vec<Poly> = r.iter().map(|c| c * &lg).collect();
        for (k, gk) in g.iter().enumerate() {
            next[k + shift] = &next[k + shift] - &(gk * &lr);
        }
        debug_assert!(next[dr].is_zero());
        next.pop();
        trim(&mut next);
        r = next;
    }
    if steps > 0 && !is_zero_uni(&r) {
        let f = lg.pow(steps);
        r = r.iter().map(|c| c * &f).collect();
    }
    r
}

/// Last nonzero subresultant of `f` and `g` in the main variable; coefficient
/// growth stays polynomial because each remainder is divided by the predicted factor.
fn subresultant_prs(mut f: Vec<Poly>, mut g: Vec<Poly>) -> Vec<Poly> {
    trim(&mut f);
    trim(&mut g);
    if f.len() < g.len() {
        std::mem::swap(&mut f, &mut g);
    }
    let mut lead = Poly::one();
    let mut h = Poly::one();
    loop {
        let delta = (f.len() - g.len()) as u32;
        let r = pseudo_rem(&f, &g);
        if is_zero_uni(&r) {
            return g;
        }
        if r.len() == 1 {
            return vec![Poly::one()];
        }
        let by = &lead * &h.pow(delta);
        f = g;
        g = divide_all(&r, &by);
        lead = f.last().expect("nonempty").clone();
        h = if delta == 0 {
            h
        } else {
            lead.pow(delta).exact_div(&h.pow(delta - 1)).expect("subresultant division is exact")
        };
    }
}
