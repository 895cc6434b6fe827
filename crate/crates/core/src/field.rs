//! Exact field arithmetic: rationals with big integers, prime fields F_p,
//! and extension fields F_{p^e} given by an explicit irreducible minimal
//! polynomial.
//!
//! All arithmetic is context-passing: a [`Field`] value describes the field
//! and its methods act on [`El`] elements. Elements are kept in canonical
//! form (reduced fractions, residues in `[0, p)`, extension representatives
//! of degree `< e`).

use num::{BigInt, BigRational, One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("minimal polynomial is reducible over F_{0}")]
    ReducibleMinPoly(u64),
    #[error("element does not belong to this field")]
    MixedFields,
    #[error("characteristic 2 is not supported for this construction")]
    CharTwo,
}

/// A field configuration: Q, F_p, or F_{p^e} = F_p[x]/(minpoly).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Field {
    Rationals,
    Prime(u64),
    /// `minpoly` is monic of degree e, stored low-to-high including the
    /// leading 1.
    Ext { p: u64, minpoly: Vec<u64> },
}

/// An exact field element. The representation kind must match the field it
/// is used with: `Q` for rationals, `F` for prime fields, `E` (length-e
/// coefficient vector) for extensions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum El {
    Q(BigRational),
    F(u64),
    E(Vec<u64>),
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = 29u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn addm(a: u64, b: u64, p: u64) -> u64 {
    let s = (a as u128 + b as u128) % p as u128;
    s as u64
}

fn subm(a: u64, b: u64, p: u64) -> u64 {
    (((a as u128 + p as u128) - b as u128) % p as u128) as u64
}

fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powm(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, a, p);
        }
        a = mulm(a, a, p);
        e >>= 1;
    }
    r
}

fn invm(a: u64, p: u64) -> Result<u64, FieldError> {
    if a % p == 0 {
        return Err(FieldError::DivisionByZero);
    }
    Ok(powm(a, p - 2, p))
}

// Dense F_p[x] helpers for extension-field internals; coefficients
// low-to-high with no trailing zeros.
mod fpx {
    use super::{invm, mulm, subm, FieldError};

    pub fn trim(mut v: Vec<u64>) -> Vec<u64> {
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = super::addm(out[i + j], mulm(x, y, p), p);
            }
        }
        trim(out)
    }

    /// Remainder of `a` mod monic `m`.
    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        debug_assert_eq!(*m.last().unwrap(), 1);
        let mut r = a.to_vec();
        let dm = m.len() - 1;
        while r.len() > dm {
            let lead = *r.last().unwrap();
            let shift = r.len() - 1 - dm;
            if lead != 0 {
                for (j, &c) in m.iter().enumerate() {
                    r[shift + j] = subm(r[shift + j], mulm(lead, c, p), p);
                }
            }
            r.pop();
            r = trim(r);
            if r.len() <= dm {
                break;
            }
        }
        trim(r)
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
        while !b.is_empty() {
            let lb = *b.last().unwrap();
            let ib = invm(lb, p).unwrap();
            let bm: Vec<u64> = b.iter().map(|&c| mulm(c, ib, p)).collect();
            let r = rem(&a, &bm, p);
            a = b;
            b = r;
        }
        if let Some(&l) = a.last() {
            let il = invm(l, p).unwrap();
            a.iter().map(|&c| mulm(c, il, p)).collect()
        } else {
            a
        }
    }

    /// x^(p^k) mod monic m, by repeated Frobenius.
    pub fn xq_pow(m: &[u64], p: u64, k: u32) -> Vec<u64> {
        let mut cur = if m.len() > 1 { vec![0, 1] } else { vec![] };
        for _ in 0..k {
            cur = pow_mod(&cur, p, m, p);
        }
        cur
    }

    pub fn pow_mod(a: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut base = rem(a, m, p);
        let mut acc = vec![1u64];
        while e > 0 {
            if e & 1 == 1 {
                acc = rem(&mul(&acc, &base, p), m, p);
            }
            base = rem(&mul(&base, &base, p), m, p);
            e >>= 1;
        }
        acc
    }

    /// Extended gcd returning (g, s) with s*a = g mod m, m monic, for
    /// inversion of a modulo m.
    pub fn inv_mod(a: &[u64], m: &[u64], p: u64) -> Result<Vec<u64>, FieldError> {
        // extended Euclid over F_p[x]
        let mut r0 = trim(m.to_vec());
        let mut r1 = rem(a, m, p);
        if r1.is_empty() {
            return Err(FieldError::DivisionByZero);
        }
        let mut s0: Vec<u64> = vec![];
        let mut s1: Vec<u64> = vec![1];
        while !r1.is_empty() {
            // divide r0 by r1
            let l1 = *r1.last().unwrap();
            let il1 = invm(l1, p)?;
            let mut r = r0.clone();
            let mut q: Vec<u64> = vec![0; r.len().saturating_sub(r1.len()) + 1];
            while r.len() >= r1.len() && !r.is_empty() {
                let lead = mulm(*r.last().unwrap(), il1, p);
                let shift = r.len() - r1.len();
                q[shift] = lead;
                for (j, &c) in r1.iter().enumerate() {
                    r[shift + j] = subm(r[shift + j], mulm(lead, c, p), p);
                }
                r = trim(r);
            }
            let q = trim(q);
            // s2 = s0 - q*s1
            let qs1 = mul(&q, &s1, p);
            let n = s0.len().max(qs1.len());
            let mut s2 = vec![0u64; n];
            for (i, &c) in s0.iter().enumerate() {
                s2[i] = c;
            }
            for (i, &c) in qs1.iter().enumerate() {
                s2[i] = subm(s2[i], c, p);
            }
            let s2 = trim(s2);
            r0 = std::mem::take(&mut r1);
            r1 = r;
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r0 = gcd; must be a nonzero constant for invertibility mod an
        // irreducible m
        if r0.len() != 1 {
            return Err(FieldError::DivisionByZero);
        }
        let ig = invm(r0[0], p)?;
        Ok(trim(s0.iter().map(|&c| mulm(c, ig, p)).collect()))
    }
}

impl Field {
    pub fn rationals() -> Self {
        Field::Rationals
    }

    pub fn prime(p: u64) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Field::Prime(p))
    }

    /// Build F_{p^e} from an explicit monic minimal polynomial
    /// (low-to-high coefficients, length e+1). Irreducibility is verified
    /// by checking `gcd(x^(p^k) - x, minpoly) = 1` for all `k <= e/2`.
    pub fn extension(p: u64, minpoly: Vec<u64>) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        let minpoly: Vec<u64> = minpoly.iter().map(|&c| c % p).collect();
        let e = minpoly.len() - 1;
        assert!(e >= 1, "minpoly must have positive degree");
        assert_eq!(*minpoly.last().unwrap(), 1, "minpoly must be monic");
        for k in 1..=(e / 2) {
            let xq = fpx::xq_pow(&minpoly, p, k as u32);
            // xq - x
            let mut d = xq;
            if d.len() < 2 {
                d.resize(2, 0);
            }
            d[1] = subm(d[1], 1, p);
            let d = fpx::trim(d);
            let g = fpx::gcd(&d, &minpoly, p);
            if g.len() != 1 {
                return Err(FieldError::ReducibleMinPoly(p));
            }
        }
        Ok(Field::Ext { p, minpoly })
    }

    /// Deterministically search for an irreducible monic polynomial of
    /// degree `e` over F_p and build the extension field.
    pub fn extension_of_degree(p: u64, e: usize) -> Result<Self, FieldError> {
        if e == 1 {
            return Field::prime(p);
        }
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(p.wrapping_mul(0x9e3779b9) ^ e as u64);
        loop {
            let mut mp: Vec<u64> = (0..e).map(|_| rng.gen_range(0..p)).collect();
            mp.push(1);
            if mp[0] == 0 {
                continue;
            }
            if let Ok(f) = Field::extension(p, mp) {
                return Ok(f);
            }
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Rationals => 0,
            Field::Prime(p) => *p,
            Field::Ext { p, .. } => *p,
        }
    }

    pub fn ext_degree(&self) -> usize {
        match self {
            Field::Ext { minpoly, .. } => minpoly.len() - 1,
            _ => 1,
        }
    }

    /// Number of elements of a finite field; panics for Q.
    pub fn order(&self) -> u64 {
        match self {
            Field::Rationals => panic!("rationals are infinite"),
            Field::Prime(p) => *p,
            Field::Ext { p, minpoly } => p.pow((minpoly.len() - 1) as u32),
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, Field::Rationals)
    }

    pub fn zero(&self) -> El {
        match self {
            Field::Rationals => El::Q(BigRational::zero()),
            Field::Prime(_) => El::F(0),
            Field::Ext { .. } => El::E(vec![]),
        }
    }

    pub fn one(&self) -> El {
        match self {
            Field::Rationals => El::Q(BigRational::one()),
            Field::Prime(_) => El::F(1),
            Field::Ext { .. } => El::E(vec![1]),
        }
    }

    pub fn from_i64(&self, n: i64) -> El {
        match self {
            Field::Rationals => El::Q(BigRational::from(BigInt::from(n))),
            Field::Prime(p) | Field::Ext { p, .. } => {
                let r = n.rem_euclid(*p as i64) as u64;
                match self {
                    Field::Prime(_) => El::F(r),
                    _ => El::E(fpx::trim(vec![r])),
                }
            }
        }
    }

    pub fn from_ratio(&self, num: i64, den: i64) -> El {
        let n = self.from_i64(num);
        let d = self.from_i64(den);
        self.div(&n, &d).expect("nonzero denominator")
    }

    /// Embed an element of the prime subfield into this field.
    pub fn embed(&self, a: &El) -> El {
        match (self, a) {
            (Field::Ext { .. }, El::F(x)) => El::E(fpx::trim(vec![*x])),
            _ => a.clone(),
        }
    }

    pub fn is_zero(&self, a: &El) -> bool {
        match a {
            El::Q(r) => r.is_zero(),
            El::F(x) => *x == 0,
            El::E(v) => v.is_empty(),
        }
    }

    pub fn is_one(&self, a: &El) -> bool {
        match a {
            El::Q(r) => r.is_one(),
            El::F(x) => *x == 1,
            El::E(v) => v == &[1],
        }
    }

    pub fn add(&self, a: &El, b: &El) -> El {
        match (self, a, b) {
            (Field::Rationals, El::Q(x), El::Q(y)) => El::Q(x + y),
            (Field::Prime(p), El::F(x), El::F(y)) => El::F(addm(*x, *y, *p)),
            (Field::Ext { p, .. }, El::E(x), El::E(y)) => {
                let n = x.len().max(y.len());
                let mut v = vec![0u64; n];
                for (i, &c) in x.iter().enumerate() {
                    v[i] = c;
                }
                for (i, &c) in y.iter().enumerate() {
                    v[i] = addm(v[i], c, *p);
                }
                El::E(fpx::trim(v))
            }
            _ => panic!("mixed-field arithmetic: {a:?} + {b:?} in {self:?}"),
        }
    }

    pub fn neg(&self, a: &El) -> El {
        match (self, a) {
            (Field::Rationals, El::Q(x)) => El::Q(-x),
            (Field::Prime(p), El::F(x)) => El::F(subm(0, *x, *p)),
            (Field::Ext { p, .. }, El::E(x)) => {
                El::E(fpx::trim(x.iter().map(|&c| subm(0, c, *p)).collect()))
            }
            _ => panic!("mixed-field arithmetic"),
        }
    }

    pub fn sub(&self, a: &El, b: &El) -> El {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &El, b: &El) -> El {
        match (self, a, b) {
            (Field::Rationals, El::Q(x), El::Q(y)) => El::Q(x * y),
            (Field::Prime(p), El::F(x), El::F(y)) => El::F(mulm(*x, *y, *p)),
            (Field::Ext { p, minpoly }, El::E(x), El::E(y)) => {
                El::E(fpx::rem(&fpx::mul(x, y, *p), minpoly, *p))
            }
            _ => panic!("mixed-field arithmetic: {a:?} * {b:?} in {self:?}"),
        }
    }

    pub fn inv(&self, a: &El) -> Result<El, FieldError> {
        if self.is_zero(a) {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match (self, a) {
            (Field::Rationals, El::Q(x)) => El::Q(x.recip()),
            (Field::Prime(p), El::F(x)) => El::F(invm(*x, *p)?),
            (Field::Ext { p, minpoly }, El::E(x)) => El::E(fpx::inv_mod(x, minpoly, *p)?),
            _ => panic!("mixed-field arithmetic"),
        })
    }

    pub fn div(&self, a: &El, b: &El) -> Result<El, FieldError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &El, mut e: u64) -> El {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Frobenius x -> x^p (identity on Q and F_p).
    pub fn frobenius(&self, a: &El) -> El {
        match self {
            Field::Rationals | Field::Prime(_) => a.clone(),
            Field::Ext { p, .. } => self.pow(a, *p),
        }
    }

    /// All elements of a finite field in a deterministic order.
    pub fn elements(&self) -> Vec<El> {
        match self {
            Field::Rationals => panic!("rationals are infinite"),
            Field::Prime(p) => (0..*p).map(El::F).collect(),
            Field::Ext { p, minpoly } => {
                let e = minpoly.len() - 1;
                let q = p.pow(e as u32);
                (0..q)
                    .map(|mut n| {
                        let mut v = Vec::with_capacity(e);
                        for _ in 0..e {
                            v.push(n % p);
                            n /= p;
                        }
                        El::E(fpx::trim(v))
                    })
                    .collect()
            }
        }
    }

    /// Coordinates of `a` over the prime field F_p, padded to the extension
    /// degree. Used to flatten extension-valued linear conditions.
    pub fn flatten(&self, a: &El) -> Vec<El> {
        match (self, a) {
            (Field::Rationals, El::Q(_)) | (Field::Prime(_), El::F(_)) => vec![a.clone()],
            (Field::Ext { minpoly, .. }, El::E(v)) => {
                let e = minpoly.len() - 1;
                (0..e).map(|i| El::F(v.get(i).copied().unwrap_or(0))).collect()
            }
            _ => panic!("mixed-field element"),
        }
    }

    /// Square root in a finite field via the precomputed-table-free check:
    /// returns the lexicographically smaller root when one exists.
    pub fn sqrt(&self, a: &El) -> Option<El> {
        if self.is_zero(a) {
            return Some(self.zero());
        }
        match self {
            Field::Rationals => {
                // only used in tests for small rationals
                if let El::Q(r) = a {
                    let (n, d) = (r.numer().clone(), r.denom().clone());
                    if n.is_negative() {
                        return None;
                    }
                    let sn = n.sqrt();
                    let sd = d.sqrt();
                    if &sn * &sn == n && &sd * &sd == d {
                        return Some(El::Q(BigRational::new(sn, sd)));
                    }
                    None
                } else {
                    panic!("mixed-field element")
                }
            }
            _ => {
                let q = self.order();
                if q % 2 == 0 {
                    return None;
                }
                if !self.is_one(&self.pow(a, (q - 1) / 2)) {
                    return None;
                }
                // Tonelli-Shanks, generic over the field context.
                let mut s = 0u32;
                let mut t = q - 1;
                while t % 2 == 0 {
                    t /= 2;
                    s += 1;
                }
                if s == 1 {
                    let r = self.pow(a, (q + 1) / 4);
                    return Some(self.min_root(r));
                }
                // find a non-residue deterministically
                let mut z = self.zero();
                for cand in self.elements() {
                    if self.is_zero(&cand) {
                        continue;
                    }
                    if !self.is_one(&self.pow(&cand, (q - 1) / 2)) {
                        z = cand;
                        break;
                    }
                }
                let mut m = s;
                let mut c = self.pow(&z, t);
                let mut u = self.pow(a, t);
                let mut r = self.pow(a, (t + 1) / 2);
                loop {
                    if self.is_one(&u) {
                        return Some(self.min_root(r));
                    }
                    let mut i = 0u32;
                    let mut tmp = u.clone();
                    while !self.is_one(&tmp) {
                        tmp = self.mul(&tmp, &tmp);
                        i += 1;
                        if i == m {
                            return None;
                        }
                    }
                    let b = self.pow(&c, 1u64 << (m - i - 1));
                    m = i;
                    c = self.mul(&b, &b);
                    u = self.mul(&u, &c);
                    r = self.mul(&r, &b);
                }
            }
        }
    }

    fn min_root(&self, r: El) -> El {
        let nr = self.neg(&r);
        if nr < r {
            nr
        } else {
            r
        }
    }

    pub fn fmt_el(&self, a: &El) -> String {
        match a {
            El::Q(r) => {
                if r.denom().is_one() {
                    format!("{}", r.numer())
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
            El::F(x) => format!("{x}"),
            El::E(v) => {
                if v.is_empty() {
                    "0".into()
                } else if v.len() == 1 {
                    format!("{}", v[0])
                } else {
                    let parts: Vec<String> = v
                        .iter()
                        .enumerate()
                        .filter(|(_, &c)| c != 0)
                        .map(|(i, &c)| match i {
                            0 => format!("{c}"),
                            1 => format!("{c}*w"),
                            _ => format!("{c}*w^{i}"),
                        })
                        .collect();
                    parts.join("+")
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_basics() {
        let f = Field::prime(13).unwrap();
        let a = f.from_i64(7);
        let b = f.from_i64(9);
        assert_eq!(f.mul(&a, &b), f.from_i64(63));
        assert_eq!(f.inv(&a).unwrap(), f.from_i64(2)); // 7*2 = 14 = 1 mod 13
        assert!(is_prime(10007) && is_prime(31013) && !is_prime(10001));
    }

    #[test]
    fn rationals_reduce() {
        let f = Field::rationals();
        let a = f.from_ratio(6, 4);
        assert_eq!(f.fmt_el(&a), "3/2");
        let inv = f.inv(&a).unwrap();
        assert!(f.is_one(&f.mul(&a, &inv)));
    }

    #[test]
    fn extension_field_arithmetic() {
        // F_9 = F_3[w]/(w^2+1)
        let f = Field::extension(3, vec![1, 0, 1]).unwrap();
        let w = El::E(vec![0, 1]);
        assert_eq!(f.mul(&w, &w), f.from_i64(-1));
        let iw = f.inv(&w).unwrap();
        assert!(f.is_one(&f.mul(&w, &iw)));
        assert_eq!(f.elements().len(), 9);
        // w^2+2 is reducible over F_3 ((w+1)(w+2))
        assert!(Field::extension(3, vec![2, 0, 1]).is_err());
    }

    #[test]
    fn extension_of_degree_finds_irreducible() {
        for e in 2..=4 {
            let f = Field::extension_of_degree(11, e).unwrap();
            assert_eq!(f.ext_degree(), e);
            assert_eq!(f.order(), 11u64.pow(e as u32));
        }
    }

    #[test]
    fn sqrt_mod_13() {
        let f = Field::prime(13).unwrap();
        // -1 = 12 is a square mod 13: 5^2 = 25 = 12
        let r = f.sqrt(&f.from_i64(-1)).unwrap();
        assert_eq!(f.mul(&r, &r), f.from_i64(-1));
        assert!(f.sqrt(&f.from_i64(2)).is_none()); // 2 is a non-residue mod 13
    }

    #[test]
    fn frobenius_fixes_prime_subfield() {
        let f = Field::extension_of_degree(5, 3).unwrap();
        let a = f.from_i64(3);
        assert_eq!(f.frobenius(&a), a);
        let w = El::E(vec![0, 1]);
        let mut o = w.clone();
        for _ in 0..3 {
            o = f.frobenius(&o);
        }
        assert_eq!(o, w); // orbit closes after e steps
    }
}
