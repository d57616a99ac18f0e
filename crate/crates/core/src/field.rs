//! Table-driven arithmetic in GF(p^e).
//!
//! A symbol `s` stands for the polynomial whose base-`p` digits are its
//! coefficients (least significant digit = constant term). The modulus is
//! the monic irreducible of degree `e` whose lower coefficients, read as a
//! base-`p` number, are smallest: x^2+x+1 for GF(4), x^3+x+1 for GF(8),
//! x^2+1 for GF(9), x^4+x+1 for GF(16), x^2+2 for GF(25).

use crate::error::{Error, Result};

/// Returns `(p, e)` when `q = p^e` for a prime `p`.
pub fn prime_power(q: usize) -> Option<(usize, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|&d| q.is_multiple_of(d))?;
    let (mut rest, mut e) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteField {
    p: usize,
    e: u32,
    q: usize,
    /// Lower coefficients of the monic modulus, constant term first.
    modulus: Vec<usize>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

impl FiniteField {
    pub fn new(q: usize) -> Result<Self> {
        let (p, e) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        if q > crate::model::MAX_LEVELS + 1 {
            return Err(Error::InvalidParameters(format!("field order {q} too large")));
        }
        let modulus = if e == 1 { Vec::new() } else { smallest_irreducible(p, e as usize) };
        let digits = |s: usize| -> Vec<usize> {
            let mut d = vec![0; e as usize];
            let mut s = s;
            for slot in d.iter_mut() {
                *slot = s % p;
                s /= p;
            }
            d
        };
        let undigits = |d: &[usize]| -> usize { d.iter().rev().fold(0, |acc, &x| acc * p + x) };

        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let sum: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = undigits(&sum) as u8;
                let prod = if e == 1 { vec![(a * b) % p] } else { poly_mulmod(&da, &db, &modulus, p) };
                mul[a * q + b] = undigits(&prod) as u8;
            }
        }
        let mut neg = vec![0u8; q];
        let mut inv = vec![0u8; q];
        for a in 0..q {
            neg[a] = (0..q).find(|&b| add[a * q + b] == 0).unwrap() as u8;
            if a != 0 {
                inv[a] = (1..q).find(|&b| mul[a * q + b] == 1).unwrap() as u8;
            }
        }
        Ok(FiniteField { p, e, q, modulus, add, mul, neg, inv })
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn characteristic(&self) -> usize {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    /// Lower coefficients of the modulus (constant term first).
    pub fn modulus(&self) -> &[usize] {
        &self.modulus
    }

    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q + b as usize]
    }

    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg[b as usize])
    }

    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q + b as usize]
    }

    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u8) -> Option<u8> {
        (a != 0).then(|| self.inv[a as usize])
    }
}

/// Multiplies two polynomials over GF(p) and reduces by the monic modulus
/// `x^e + modulus[e-1] x^(e-1) + .. + modulus[0]`.
fn poly_mulmod(a: &[usize], b: &[usize], modulus: &[usize], p: usize) -> Vec<usize> {
    let e = modulus.len();
    let mut prod = vec![0usize; 2 * e];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for d in (e..2 * e).rev() {
        let c = prod[d];
        if c == 0 {
            continue;
        }
        prod[d] = 0;
        // x^d = x^(d-e) * x^e and x^e = -sum modulus[i] x^i
        for (i, &m) in modulus.iter().enumerate() {
            prod[d - e + i] = (prod[d - e + i] + (p - m) * c) % p;
        }
    }
    prod.truncate(e);
    prod
}

fn smallest_irreducible(p: usize, e: usize) -> Vec<usize> {
    let count = p.pow(e as u32);
    (0..count)
        .map(|code| {
            let mut c = code;
            (0..e)
                .map(|_| {
                    let d = c % p;
                    c /= p;
                    d
                })
                .collect::<Vec<_>>()
        })
        .find(|lower| is_irreducible(lower, p))
        .expect("an irreducible polynomial of every degree exists")
}

/// Irreducibility of the monic polynomial with the given lower coefficients,
/// by trial division with every monic polynomial of degree up to e/2.
fn is_irreducible(lower: &[usize], p: usize) -> bool {
    let e = lower.len();
    let mut f = lower.to_vec();
    f.push(1);
    for d in 1..=e / 2 {
        for code in 0..p.pow(d as u32) {
            let mut g: Vec<usize> = (0..d).map(|i| (code / p.pow(i as u32)) % p).collect();
            g.push(1);
            if poly_rem(&f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Remainder of `f` by the monic `g` over GF(p); coefficients constant first.
fn poly_rem(f: &[usize], g: &[usize], p: usize) -> Vec<usize> {
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    while r.len() > dg {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dg;
        if lead != 0 {
            for (i, &gc) in g.iter().enumerate() {
                r[shift + i] = (r[shift + i] + (p - gc) * lead) % p;
            }
        }
        r.pop();
    }
    r
}
