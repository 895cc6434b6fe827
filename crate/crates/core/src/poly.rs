//! Polynomial arithmetic over a [`Field`] context: dense univariate
//! polynomials, sparse multivariate polynomials, and the bivariate
//! resultant/gcd machinery used by the plane-curve smoothness check.

use crate::field::{El, Field};
use std::collections::BTreeMap;

/// Dense univariate polynomial, coefficients low-to-high, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UPoly {
    pub coeffs: Vec<El>,
}

impl UPoly {
    pub fn new(field: &Field, coeffs: Vec<El>) -> Self {
        let mut p = UPoly { coeffs };
        p.trim(field);
        p
    }

    pub fn zero() -> Self {
        UPoly { coeffs: vec![] }
    }

    pub fn constant(field: &Field, c: El) -> Self {
        Self::new(field, vec![c])
    }

    pub fn x(field: &Field) -> Self {
        UPoly {
            coeffs: vec![field.zero(), field.one()],
        }
    }

    pub fn monomial(field: &Field, deg: usize, c: El) -> Self {
        let mut coeffs = vec![field.zero(); deg];
        coeffs.push(c);
        Self::new(field, coeffs)
    }

    pub fn from_i64(field: &Field, coeffs: &[i64]) -> Self {
        Self::new(field, coeffs.iter().map(|&c| field.from_i64(c)).collect())
    }

    fn trim(&mut self, field: &Field) {
        while matches!(self.coeffs.last(), Some(c) if field.is_zero(c)) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; zero polynomial reports -1.
    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn lead(&self) -> Option<&El> {
        self.coeffs.last()
    }

    pub fn coeff(&self, field: &Field, i: usize) -> El {
        self.coeffs.get(i).cloned().unwrap_or_else(|| field.zero())
    }

    pub fn add(&self, field: &Field, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(field.add(&self.coeff(field, i), &other.coeff(field, i)));
        }
        Self::new(field, out)
    }

    pub fn neg(&self, field: &Field) -> Self {
        UPoly {
            coeffs: self.coeffs.iter().map(|c| field.neg(c)).collect(),
        }
    }

    pub fn sub(&self, field: &Field, other: &Self) -> Self {
        self.add(field, &other.neg(field))
    }

    pub fn scale(&self, field: &Field, c: &El) -> Self {
        if field.is_zero(c) {
            return Self::zero();
        }
        UPoly {
            coeffs: self.coeffs.iter().map(|a| field.mul(a, c)).collect(),
        }
    }

    pub fn mul(&self, field: &Field, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if field.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = field.add(&out[i + j], &field.mul(a, b));
            }
        }
        Self::new(field, out)
    }

    /// Euclidean division; divisor leading coefficient must be invertible.
    pub fn divrem(&self, field: &Field, div: &Self) -> (Self, Self) {
        assert!(!div.is_zero(), "division by zero polynomial");
        let dl = field.inv(div.lead().unwrap()).expect("invertible lead");
        let mut rem = self.clone();
        let dd = div.coeffs.len();
        if rem.coeffs.len() < dd {
            return (Self::zero(), rem);
        }
        let mut q = vec![field.zero(); rem.coeffs.len() - dd + 1];
        while rem.coeffs.len() >= dd && !rem.is_zero() {
            let shift = rem.coeffs.len() - dd;
            let c = field.mul(rem.lead().unwrap(), &dl);
            q[shift] = c.clone();
            for (j, b) in div.coeffs.iter().enumerate() {
                let t = field.mul(&c, b);
                rem.coeffs[shift + j] = field.sub(&rem.coeffs[shift + j], &t);
            }
            rem.trim(field);
        }
        (Self::new(field, q), rem)
    }

    pub fn rem(&self, field: &Field, div: &Self) -> Self {
        self.divrem(field, div).1
    }

    /// Monic gcd.
    pub fn gcd(&self, field: &Field, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(field, &b);
            a = b;
            b = r;
        }
        a.monic(field)
    }

    pub fn monic(&self, field: &Field) -> Self {
        match self.lead() {
            None => Self::zero(),
            Some(l) => {
                let il = field.inv(l).unwrap();
                self.scale(field, &il)
            }
        }
    }

    pub fn derivative(&self, field: &Field) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let out: Vec<El> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| field.mul(&field.from_i64(i as i64), c))
            .collect();
        Self::new(field, out)
    }

    pub fn eval(&self, field: &Field, x: &El) -> El {
        let mut acc = field.zero();
        for c in self.coeffs.iter().rev() {
            acc = field.add(&field.mul(&acc, x), c);
        }
        acc
    }

    pub fn is_squarefree(&self, field: &Field) -> bool {
        let g = self.gcd(field, &self.derivative(field));
        g.degree() == 0
    }

    /// Map coefficients into a larger field (prime subfield embedding).
    pub fn embed(&self, target: &Field) -> Self {
        UPoly {
            coeffs: self.coeffs.iter().map(|c| target.embed(c)).collect(),
        }
    }

    /// a^e mod m.
    pub fn pow_mod(&self, field: &Field, mut e: u64, m: &Self) -> Self {
        let mut base = self.rem(field, m);
        let mut acc = Self::constant(field, field.one());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(field, &base).rem(field, m);
            }
            base = base.mul(field, &base).rem(field, m);
            e >>= 1;
        }
        acc
    }

    /// Roots in a finite field with multiplicities, via gcd with x^q - x and
    /// equal-degree splitting. Deterministic order.
    pub fn roots_with_multiplicity(&self, field: &Field) -> Vec<(El, usize)> {
        assert!(field.is_finite(), "root finding requires a finite field");
        if self.is_zero() {
            panic!("zero polynomial has every root");
        }
        let q = field.order();
        // product of (x - r) over distinct roots
        let xq = UPoly::x(field).pow_mod(field, q, self);
        let lin = xq.sub(field, &UPoly::x(field));
        let mut prod = self.gcd(field, &lin);
        let mut roots: Vec<El> = Vec::new();
        // split `prod` into linear factors
        let mut stack = vec![prod.clone()];
        if q <= 512 {
            // small field: direct scan is simpler and exact
            roots = field
                .elements()
                .into_iter()
                .filter(|a| field.is_zero(&self.eval(field, a)))
                .collect();
            stack.clear();
            prod = UPoly::zero();
        }
        let _ = prod;
        // shift constants for the quadratic-residue split must range over
        // the whole field, not just the prime subfield: for any two
        // distinct roots some shift separates their characters, so the
        // full enumeration always contains a splitting element
        let shifts: Vec<El> = if stack.iter().any(|f| f.degree() > 1) {
            field.elements()
        } else {
            Vec::new()
        };
        while let Some(f) = stack.pop() {
            if f.degree() <= 0 {
                continue;
            }
            if f.degree() == 1 {
                let r = field.div(&field.neg(&f.coeffs[0]), &f.coeffs[1]).unwrap();
                roots.push(r);
                continue;
            }
            // deterministic quadratic-residue split (q odd here)
            let mut split = None;
            for c in &shifts {
                let shift = UPoly::new(field, vec![c.clone(), field.one()]);
                let h = shift.pow_mod(field, (q - 1) / 2, &f);
                let g1 =
                    f.gcd(field, &h.sub(field, &UPoly::constant(field, field.one())));
                if g1.degree() > 0 && g1.degree() < f.degree() {
                    split = Some(g1);
                    break;
                }
            }
            let g1 = split.expect("some shift separates two roots of a split product");
            let (g2, r) = f.divrem(field, &g1);
            debug_assert!(r.is_zero());
            stack.push(g1);
            stack.push(g2);
        }
        roots.sort();
        roots
            .into_iter()
            .map(|r| {
                let mut m = 0usize;
                let lin = UPoly::new(field, vec![field.neg(&r), field.one()]);
                let mut f = self.clone();
                loop {
                    let (qq, rem) = f.divrem(field, &lin);
                    if rem.is_zero() {
                        m += 1;
                        f = qq;
                    } else {
                        break;
                    }
                }
                (r, m)
            })
            .collect()
    }

    /// Rational roots (with multiplicity) of a polynomial over Q with the
    /// rational-root theorem on the primitive integer form.
    pub fn rational_roots(&self, field: &Field) -> Vec<(El, usize)> {
        use num::{BigInt, BigRational, One, Signed, Zero};
        assert_eq!(*field, Field::Rationals);
        if self.is_zero() {
            panic!("zero polynomial has every root");
        }
        // clear denominators
        let mut den = BigInt::one();
        for c in &self.coeffs {
            if let El::Q(r) = c {
                den = num::integer::lcm(den, r.denom().clone());
            }
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| match c {
                El::Q(r) => (r * BigRational::from(den.clone())).to_integer(),
                _ => unreachable!(),
            })
            .collect();
        let a0 = ints.iter().find(|c| !c.is_zero()).unwrap().abs();
        let an = ints.last().unwrap().abs();
        let mut candidates: Vec<BigRational> = vec![BigRational::zero()];
        for pdiv in divisors_upto(&a0, 100_000) {
            for qdiv in divisors_upto(&an, 100_000) {
                let r = BigRational::new(pdiv.clone(), qdiv.clone());
                candidates.push(r.clone());
                candidates.push(-r);
            }
        }
        candidates.sort();
        candidates.dedup();
        let mut out = Vec::new();
        for cand in candidates {
            let r = El::Q(cand);
            if !field.is_zero(&self.eval(field, &r)) {
                continue;
            }
            let lin = UPoly::new(field, vec![field.neg(&r), field.one()]);
            let mut m = 0usize;
            let mut f = self.clone();
            loop {
                let (qq, rem) = f.divrem(field, &lin);
                if rem.is_zero() {
                    m += 1;
                    f = qq;
                } else {
                    break;
                }
            }
            if m > 0 {
                out.push((r, m));
            }
        }
        out
    }

    pub fn fmt(&self, field: &Field, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if field.is_zero(c) {
                continue;
            }
            let cs = field.fmt_el(c);
            let term = match i {
                0 => cs,
                1 if cs == "1" => var.to_string(),
                1 => format!("{cs}*{var}"),
                _ if cs == "1" => format!("{var}^{i}"),
                _ => format!("{cs}*{var}^{i}"),
            };
            parts.push(term);
        }
        parts.join(" + ")
    }
}

fn divisors_upto(n: &num::BigInt, limit: u64) -> Vec<num::BigInt> {
    use num::ToPrimitive;
    let mut out = Vec::new();
    if let Some(n) = n.to_u64() {
        let n = n.max(1);
        let mut d = 1u64;
        while d * d <= n && d <= limit {
            if n % d == 0 {
                out.push(num::BigInt::from(d));
                out.push(num::BigInt::from(n / d));
            }
            d += 1;
        }
    } else {
        // huge leading/trailing coefficient: only try small divisors
        for d in 1..=limit.min(1000) {
            out.push(num::BigInt::from(d));
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Sparse multivariate polynomial: exponent vector -> coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MPoly {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u32>, El>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: &Field, nvars: usize, c: El) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(field, vec![0; nvars], c);
        p
    }

    pub fn var(field: &Field, nvars: usize, i: usize) -> Self {
        let mut e = vec![0u32; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(field, e, field.one());
        p
    }

    pub fn add_term(&mut self, field: &Field, exps: Vec<u32>, c: El) {
        assert_eq!(exps.len(), self.nvars);
        if field.is_zero(&c) {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = field.add(o.get(), &c);
                if field.is_zero(&s) {
                    o.remove();
                } else {
                    o.insert(s);
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, field: &Field, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(field, e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self, field: &Field) -> Self {
        MPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), field.neg(c)))
                .collect(),
        }
    }

    pub fn sub(&self, field: &Field, other: &Self) -> Self {
        self.add(field, &other.neg(field))
    }

    pub fn mul(&self, field: &Field, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(field, e, field.mul(c1, c2));
            }
        }
        out
    }

    pub fn scale(&self, field: &Field, c: &El) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, a) in &self.terms {
            out.add_term(field, e.clone(), field.mul(a, c));
        }
        out
    }

    pub fn total_degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>() as i64)
            .max()
            .unwrap_or(-1)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d0) => degs.all(|d| d == d0),
        }
    }

    pub fn coeff(&self, exps: &[u32]) -> Option<&El> {
        self.terms.get(exps)
    }

    pub fn partial(&self, field: &Field, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            out.add_term(field, e2, field.mul(&field.from_i64(e[var] as i64), c));
        }
        out
    }

    /// Evaluate at a full point.
    pub fn eval(&self, field: &Field, xs: &[El]) -> El {
        let mut acc = field.zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = field.mul(&t, &field.pow(&xs[i], k as u64));
                }
            }
            acc = field.add(&acc, &t);
        }
        acc
    }

    /// Substitute variable `var := 1` and drop it, producing an
    /// (nvars-1)-variate polynomial.
    pub fn dehomogenize(&self, field: &Field, var: usize) -> MPoly {
        let mut out = MPoly::zero(self.nvars - 1);
        for (e, c) in &self.terms {
            let mut e2 = Vec::with_capacity(self.nvars - 1);
            for (i, &k) in e.iter().enumerate() {
                if i != var {
                    e2.push(k);
                }
            }
            out.add_term(field, e2, c.clone());
        }
        out
    }

    /// Substitute each variable by a univariate polynomial in one common
    /// variable; used to restrict a plane curve to a parameterized line.
    pub fn compose_univariate(&self, field: &Field, subs: &[UPoly]) -> UPoly {
        assert_eq!(subs.len(), self.nvars);
        let mut acc = UPoly::zero();
        for (e, c) in &self.terms {
            let mut t = UPoly::constant(field, c.clone());
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t = t.mul(field, &subs[i]);
                }
            }
            acc = acc.add(field, &t);
        }
        acc
    }

    /// Apply an invertible linear change of coordinates given by a matrix
    /// (new vars in terms of old: x_i -> sum_j m[i][j] * x_j).
    pub fn linear_change(&self, field: &Field, m: &[Vec<El>]) -> MPoly {
        let n = self.nvars;
        let vars: Vec<MPoly> = (0..n)
            .map(|i| {
                let mut v = MPoly::zero(n);
                for j in 0..n {
                    let mut e = vec![0u32; n];
                    e[j] = 1;
                    v.add_term(field, e, m[i][j].clone());
                }
                v
            })
            .collect();
        let mut out = MPoly::zero(n);
        for (e, c) in &self.terms {
            let mut t = MPoly::constant(field, n, c.clone());
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t = t.mul(field, &vars[i]);
                }
            }
            out = out.add(field, &t);
        }
        out
    }

    /// Embed coefficients into a bigger field.
    pub fn embed(&self, target: &Field) -> MPoly {
        MPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), target.embed(c)))
                .collect(),
        }
    }

    pub fn fmt(&self, field: &Field, vars: &[&str]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (e, c) in self.terms.iter().rev() {
            let cs = field.fmt_el(c);
            let mut factors = Vec::new();
            if cs != "1" || e.iter().all(|&k| k == 0) {
                factors.push(cs);
            }
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => factors.push(vars[i].to_string()),
                    _ => factors.push(format!("{}^{}", vars[i], k)),
                }
            }
            parts.push(factors.join("*"));
        }
        parts.join(" + ")
    }
}

/// Bivariate polynomial as a polynomial in y with coefficients in k[x].
#[derive(Debug, Clone)]
pub struct BiPoly {
    /// yco[i] is the coefficient of y^i.
    pub yco: Vec<UPoly>,
}

impl BiPoly {
    pub fn from_mpoly(field: &Field, p: &MPoly) -> Self {
        assert_eq!(p.nvars, 2);
        let dy = p.terms.keys().map(|e| e[1]).max().unwrap_or(0) as usize;
        let mut yco = vec![UPoly::zero(); dy + 1];
        for (e, c) in &p.terms {
            let (dx, dyt) = (e[0] as usize, e[1] as usize);
            let add = UPoly::monomial(field, dx, c.clone());
            yco[dyt] = yco[dyt].add(field, &add);
        }
        let mut b = BiPoly { yco };
        b.trim();
        b
    }

    fn trim(&mut self) {
        while matches!(self.yco.last(), Some(c) if c.is_zero()) {
            self.yco.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.yco.is_empty()
    }

    pub fn is_constant(&self, _field: &Field) -> bool {
        match self.yco.len() {
            0 => true,
            1 => self.yco[0].degree() <= 0,
            _ => false,
        }
    }

    pub fn deg_y(&self) -> i64 {
        self.yco.len() as i64 - 1
    }

    pub fn deg_x(&self) -> i64 {
        self.yco.iter().map(|c| c.degree()).max().unwrap_or(-1)
    }

    pub fn to_mpoly(&self, field: &Field) -> MPoly {
        let mut out = MPoly::zero(2);
        for (j, c) in self.yco.iter().enumerate() {
            for (i, a) in c.coeffs.iter().enumerate() {
                out.add_term(field, vec![i as u32, j as u32], a.clone());
            }
        }
        out
    }

    pub fn mul(&self, field: &Field, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return BiPoly { yco: vec![] };
        }
        let mut yco = vec![UPoly::zero(); self.yco.len() + other.yco.len() - 1];
        for (i, a) in self.yco.iter().enumerate() {
            for (j, b) in other.yco.iter().enumerate() {
                yco[i + j] = yco[i + j].add(field, &a.mul(field, b));
            }
        }
        let mut r = BiPoly { yco };
        r.trim();
        r
    }

    /// Evaluate y := series-free scalar, leaving a univariate poly in x.
    pub fn eval_y(&self, field: &Field, y: &El) -> UPoly {
        let mut acc = UPoly::zero();
        for c in self.yco.iter().rev() {
            acc = acc.scale_by_el(field, y).add(field, c);
        }
        acc
    }

    /// Content: gcd of the k[x] coefficients.
    pub fn content(&self, field: &Field) -> UPoly {
        let mut g = UPoly::zero();
        for c in &self.yco {
            g = g.gcd(field, c);
        }
        g
    }

    /// Divide all coefficients exactly by a univariate poly.
    pub fn div_content(&self, field: &Field, d: &UPoly) -> Self {
        let yco = self
            .yco
            .iter()
            .map(|c| {
                if c.is_zero() {
                    UPoly::zero()
                } else {
                    let (q, r) = c.divrem(field, d);
                    assert!(r.is_zero(), "content division must be exact");
                    q
                }
            })
            .collect();
        BiPoly { yco }
    }

    /// Pseudo-remainder with respect to y.
    pub fn prem(&self, field: &Field, other: &Self) -> Self {
        assert!(!other.is_zero());
        let d = other.deg_y();
        let lc = other.yco.last().unwrap().clone();
        let mut r = self.clone();
        while r.deg_y() >= d && !r.is_zero() {
            let rl = r.yco.last().unwrap().clone();
            let shift = (r.deg_y() - d) as usize;
            // r = lc * r - rl * y^shift * other
            let mut yco = vec![UPoly::zero(); r.yco.len()];
            for (i, c) in r.yco.iter().enumerate() {
                yco[i] = c.mul(field, &lc);
            }
            for (j, c) in other.yco.iter().enumerate() {
                let t = c.mul(field, &rl);
                yco[shift + j] = yco[shift + j].sub(field, &t);
            }
            r = BiPoly { yco };
            r.trim();
        }
        r
    }

    /// Primitive-PRS bivariate gcd (up to a unit).
    pub fn gcd(&self, field: &Field, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let cont = self.content(field).gcd(field, &other.content(field));
        let mut a = self.div_content(field, &self.content(field));
        let mut b = other.div_content(field, &other.content(field));
        if a.deg_y() < b.deg_y() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            if b.deg_y() == 0 {
                // primitive poly of y-degree 0 is a unit after pp
                b = BiPoly {
                    yco: vec![UPoly::constant(field, field.one())],
                };
                std::mem::swap(&mut a, &mut b);
                break;
            }
            let mut r = a.prem(field, &b);
            if !r.is_zero() {
                let c = r.content(field);
                r = r.div_content(field, &c);
            }
            a = b;
            b = r;
        }
        let mut g = a;
        let gc = g.content(field);
        g = g.div_content(field, &gc);
        g.mul(
            field,
            &BiPoly {
                yco: vec![cont],
            },
        )
    }

    /// Resultant with respect to y, as a univariate polynomial in x.
    /// Computed as the determinant of the Sylvester matrix by cofactor
    /// expansion with column-subset memoization (matrix sizes here are
    /// small).
    pub fn resultant_y(&self, field: &Field, other: &Self) -> UPoly {
        let m = self.deg_y();
        let n = other.deg_y();
        if m < 0 || n < 0 {
            return UPoly::zero();
        }
        if m == 0 {
            // res(a(x), b) = a(x)^deg_y(b)
            let mut r = UPoly::constant(field, field.one());
            for _ in 0..n {
                r = r.mul(field, &self.yco[0]);
            }
            return r;
        }
        if n == 0 {
            let mut r = UPoly::constant(field, field.one());
            for _ in 0..m {
                r = r.mul(field, &other.yco[0]);
            }
            return r;
        }
        let size = (m + n) as usize;
        // rows: n rows of self coefficients, m rows of other
        let mut mat: Vec<Vec<UPoly>> = vec![vec![UPoly::zero(); size]; size];
        for i in 0..n as usize {
            for (j, c) in self.yco.iter().rev().enumerate() {
                mat[i][i + j] = c.clone();
            }
        }
        for i in 0..m as usize {
            for (j, c) in other.yco.iter().rev().enumerate() {
                mat[n as usize + i][i + j] = c.clone();
            }
        }
        det_poly(field, &mat)
    }
}

impl UPoly {
    fn scale_by_el(&self, field: &Field, c: &El) -> Self {
        self.scale(field, c)
    }
}

/// Determinant of a small matrix of univariate polynomials via expansion
/// along rows with bitmask memoization over column subsets.
fn det_poly(field: &Field, mat: &[Vec<UPoly>]) -> UPoly {
    let n = mat.len();
    assert!(n <= 20, "det_poly is for small matrices");
    use std::collections::HashMap;
    let mut memo: HashMap<u32, UPoly> = HashMap::new();
    memo.insert(0, UPoly::constant(field, field.one()));
    fn go(
        field: &Field,
        mat: &[Vec<UPoly>],
        used: u32,
        row: usize,
        memo: &mut std::collections::HashMap<u32, UPoly>,
    ) -> UPoly {
        if row == mat.len() {
            return UPoly::constant(field, field.one());
        }
        if let Some(v) = memo.get(&used) {
            return v.clone();
        }
        let mut acc = UPoly::zero();
        let mut sign = true;
        for col in 0..mat.len() {
            if used & (1 << col) != 0 {
                continue;
            }
            if !mat[row][col].is_zero() {
                let sub = go(field, mat, used | (1 << col), row + 1, memo);
                let term = mat[row][col].mul(field, &sub);
                acc = if sign {
                    acc.add(field, &term)
                } else {
                    acc.sub(field, &term)
                };
            }
            sign = !sign;
        }
        memo.insert(used, acc.clone());
        acc
    }
    let mut memo2 = std::collections::HashMap::new();
    let r = go(field, mat, 0, 0, &mut memo2);
    let _ = memo;
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::rationals()
    }

    #[test]
    fn divrem_and_gcd() {
        let f = q();
        // x^2 - 1 and x - 1
        let a = UPoly::from_i64(&f, &[-1, 0, 1]);
        let b = UPoly::from_i64(&f, &[-1, 1]);
        let (quo, rem) = a.divrem(&f, &b);
        assert!(rem.is_zero());
        assert_eq!(quo, UPoly::from_i64(&f, &[1, 1]));
        let g = a.gcd(&f, &b);
        assert_eq!(g, b.monic(&f));
    }

    #[test]
    fn squarefree_detection() {
        let f = q();
        assert!(UPoly::from_i64(&f, &[-1, 0, 0, 0, 0, 1]).is_squarefree(&f)); // x^5-1
        assert!(!UPoly::from_i64(&f, &[1, 2, 1]).is_squarefree(&f)); // (x+1)^2
    }

    #[test]
    fn roots_over_f11() {
        let f = Field::prime(11).unwrap();
        // x^2 - 4 = (x-2)(x+2)
        let p = UPoly::from_i64(&f, &[-4, 0, 1]);
        let roots = p.roots_with_multiplicity(&f);
        assert_eq!(roots.len(), 2);
        for (r, m) in roots {
            assert_eq!(m, 1);
            assert!(f.is_zero(&p.eval(&f, &r)));
        }
    }

    #[test]
    fn roots_over_big_field() {
        let f = Field::prime(541).unwrap();
        let p = UPoly::from_i64(&f, &[-1, 0, 0, 0, 0, 1]); // x^5 - 1
        let roots = p.roots_with_multiplicity(&f);
        // 5 | 540 so all fifth roots of unity are rational here, and
        // 541 > 512 exercises the equal-degree-splitting path
        assert_eq!(roots.len(), 5);
        for (r, _) in roots {
            assert!(f.is_zero(&p.eval(&f, &r)));
        }
    }

    #[test]
    fn rational_roots_of_cubic() {
        let f = q();
        // (x-1)(x-2)(2x-3) = 2x^3 - 9x^2 + 13x - 6
        let p = UPoly::from_i64(&f, &[-6, 13, -9, 2]);
        let roots = p.rational_roots(&f);
        assert_eq!(roots.len(), 3);
    }

    #[test]
    fn resultant_detects_common_roots() {
        let f = q();
        // A = y^2 - x, B = y - x  => common zero along y = x, x = y^2
        let mut a = MPoly::zero(2);
        a.add_term(&f, vec![0, 2], f.one());
        a.add_term(&f, vec![1, 0], f.from_i64(-1));
        let mut b = MPoly::zero(2);
        b.add_term(&f, vec![0, 1], f.one());
        b.add_term(&f, vec![1, 0], f.from_i64(-1));
        let ba = BiPoly::from_mpoly(&f, &a);
        let bb = BiPoly::from_mpoly(&f, &b);
        let r = ba.resultant_y(&f, &bb);
        // res = x^2 - x, roots x = 0, 1
        assert_eq!(r.monic(&f), UPoly::from_i64(&f, &[0, -1, 1]).monic(&f));
    }

    #[test]
    fn bivariate_gcd() {
        let f = q();
        // (y - x) * (y + x) and (y - x) * y
        let mut ymx = MPoly::zero(2);
        ymx.add_term(&f, vec![0, 1], f.one());
        ymx.add_term(&f, vec![1, 0], f.from_i64(-1));
        let mut ypx = MPoly::zero(2);
        ypx.add_term(&f, vec![0, 1], f.one());
        ypx.add_term(&f, vec![1, 0], f.one());
        let y = MPoly::var(&f, 2, 1);
        let a = BiPoly::from_mpoly(&f, &ymx.mul(&f, &ypx));
        let b = BiPoly::from_mpoly(&f, &ymx.mul(&f, &y));
        let g = a.gcd(&f, &b);
        assert_eq!(g.deg_y(), 1);
        // g is y - x up to a unit
        let gm = g.to_mpoly(&f);
        assert_eq!(gm.total_degree(), 1);
    }
}
