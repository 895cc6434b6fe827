//! Truncated power series in a local parameter `t`, and Newton/Hensel
//! lifting of a root of a bivariate equation to a series root.

use crate::field::{El, Field};
use crate::poly::{MPoly, UPoly};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("the y-derivative vanishes at the expansion point (singular point or wrong chart)")]
    SingularPoint,
    #[error("the point is not a root of the equation")]
    NotARoot,
    #[error("series inversion needs an invertible constant term")]
    NotInvertible,
}

/// Truncated power series: `coeffs.len() == precision` always.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series {
    pub field: Field,
    pub coeffs: Vec<El>,
}

impl Series {
    pub fn new(field: Field, mut coeffs: Vec<El>, precision: usize) -> Self {
        coeffs.truncate(precision);
        while coeffs.len() < precision {
            coeffs.push(field.zero());
        }
        Series { field, coeffs }
    }

    pub fn zero(field: &Field, precision: usize) -> Self {
        Series::new(field.clone(), vec![], precision)
    }

    pub fn constant(field: &Field, c: El, precision: usize) -> Self {
        Series::new(field.clone(), vec![c], precision)
    }

    /// The local parameter t itself.
    pub fn t(field: &Field, precision: usize) -> Self {
        Series::new(field.clone(), vec![field.zero(), field.one()], precision)
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn truncated(&self, precision: usize) -> Self {
        Series::new(self.field.clone(), self.coeffs.clone(), precision)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| self.field.is_zero(c))
    }

    /// Order of vanishing; `None` if zero to full precision.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !self.field.is_zero(c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let prec = self.precision().min(other.precision());
        let f = &self.field;
        let coeffs = (0..prec)
            .map(|i| f.add(&self.coeffs[i], &other.coeffs[i]))
            .collect();
        Series::new(f.clone(), coeffs, prec)
    }

    pub fn neg(&self) -> Self {
        let f = &self.field;
        Series {
            field: f.clone(),
            coeffs: self.coeffs.iter().map(|c| f.neg(c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = self.precision().min(other.precision());
        let f = &self.field;
        let mut coeffs = vec![f.zero(); prec];
        for (i, a) in self.coeffs.iter().enumerate().take(prec) {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= prec {
                    break;
                }
                coeffs[i + j] = f.add(&coeffs[i + j], &f.mul(a, b));
            }
        }
        Series::new(f.clone(), coeffs, prec)
    }

    pub fn scale(&self, c: &El) -> Self {
        let f = &self.field;
        Series {
            field: f.clone(),
            coeffs: self.coeffs.iter().map(|a| f.mul(a, c)).collect(),
        }
    }

    /// Multiplicative inverse; the constant term must be invertible.
    pub fn inv(&self) -> Result<Self, SeriesError> {
        let f = &self.field;
        let prec = self.precision();
        let c0 = self.coeffs.first().ok_or(SeriesError::NotInvertible)?;
        let i0 = f.inv(c0).map_err(|_| SeriesError::NotInvertible)?;
        let mut out = vec![f.zero(); prec];
        out[0] = i0.clone();
        for n in 1..prec {
            // sum_{k=1..n} a_k * b_{n-k} = -a_0 * b_n
            let mut s = f.zero();
            for k in 1..=n {
                s = f.add(&s, &f.mul(&self.coeffs[k], &out[n - k]));
            }
            out[n] = f.neg(&f.mul(&i0, &s));
        }
        Ok(Series::new(f.clone(), out, prec))
    }

    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let f = &self.field;
        let mut acc = Series::constant(f, f.one(), self.precision());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

/// Evaluate a univariate polynomial at a series.
pub fn eval_upoly_at(field: &Field, p: &UPoly, s: &Series) -> Series {
    let prec = s.precision();
    let mut acc = Series::zero(field, prec);
    for c in p.coeffs.iter().rev() {
        acc = acc.mul(s).add(&Series::constant(field, c.clone(), prec));
    }
    acc
}

/// Evaluate a bivariate polynomial F(t, y) (vars ordered t, y) at
/// (t, s(t)).
pub fn eval_bivar_at(field: &Field, fpoly: &MPoly, s: &Series) -> Series {
    assert_eq!(fpoly.nvars, 2);
    let prec = s.precision();
    let t = Series::t(field, prec);
    // Horner in y with coefficients that are polynomials in t
    let dy = fpoly.terms.keys().map(|e| e[1]).max().unwrap_or(0) as usize;
    let mut yco: Vec<UPoly> = vec![UPoly::zero(); dy + 1];
    for (e, c) in &fpoly.terms {
        let m = UPoly::monomial(field, e[0] as usize, c.clone());
        yco[e[1] as usize] = yco[e[1] as usize].add(field, &m);
    }
    let mut acc = Series::zero(field, prec);
    for c in yco.iter().rev() {
        acc = acc.mul(s).add(&eval_upoly_at(field, c, &t));
    }
    acc
}

/// Newton/Hensel lifting: given F(t, y) with F(0, y0) = 0 and
/// dF/dy(0, y0) != 0, return the unique series s with s(0) = y0 and
/// F(t, s(t)) = 0 mod t^precision.
pub fn hensel_root(
    field: &Field,
    fpoly: &MPoly,
    y0: &El,
    precision: usize,
) -> Result<Series, SeriesError> {
    assert_eq!(fpoly.nvars, 2, "hensel_root expects F(t, y)");
    if precision == 0 {
        return Ok(Series::zero(field, 0));
    }
    let f0 = fpoly.eval(field, &[field.zero(), y0.clone()]);
    if !field.is_zero(&f0) {
        return Err(SeriesError::NotARoot);
    }
    let dfy = fpoly.partial(field, 1);
    let d0 = dfy.eval(field, &[field.zero(), y0.clone()]);
    if field.is_zero(&d0) {
        return Err(SeriesError::SingularPoint);
    }
    let mut prec = 1usize;
    let mut s = Series::constant(field, y0.clone(), 1);
    while prec < precision {
        prec = (prec * 2).min(precision);
        let mut cur = s.truncated(prec);
        // one Newton step at the doubled precision
        let fv = eval_bivar_at(field, fpoly, &cur);
        let dv = eval_bivar_at(field, &dfy, &cur);
        let step = fv.div(&dv).map_err(|_| SeriesError::SingularPoint)?;
        cur = cur.sub(&step);
        s = cur;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::rationals()
    }

    #[test]
    fn binomial_series_sqrt() {
        // F = y^2 - (1 + t), y0 = 1, prec 3 -> 1 + t/2 - t^2/8
        let f = q();
        let mut fp = MPoly::zero(2);
        fp.add_term(&f, vec![0, 2], f.one());
        fp.add_term(&f, vec![0, 0], f.from_i64(-1));
        fp.add_term(&f, vec![1, 0], f.from_i64(-1));
        let s = hensel_root(&f, &fp, &f.one(), 3).unwrap();
        assert_eq!(s.coeffs[0], f.one());
        assert_eq!(s.coeffs[1], f.from_ratio(1, 2));
        assert_eq!(s.coeffs[2], f.from_ratio(-1, 8));
        // and the defining equation vanishes to precision
        assert!(eval_bivar_at(&f, &fp, &s).is_zero());
    }

    #[test]
    fn trivial_linear_root() {
        // F = y - t, y0 = 0, prec 4 -> t
        let f = q();
        let mut fp = MPoly::zero(2);
        fp.add_term(&f, vec![0, 1], f.one());
        fp.add_term(&f, vec![1, 0], f.from_i64(-1));
        let s = hensel_root(&f, &fp, &f.zero(), 4).unwrap();
        assert_eq!(s, Series::t(&f, 4));
    }

    #[test]
    fn sqrt_over_f13() {
        // F = y^2 - f(0 + t) with f = x^5 - 1 over F_13; f(0) = -1 and
        // 5^2 = 25 = -1 mod 13, so y0 = 5.
        let f = Field::prime(13).unwrap();
        let mut fp = MPoly::zero(2);
        fp.add_term(&f, vec![0, 2], f.one());
        fp.add_term(&f, vec![5, 0], f.from_i64(-1));
        fp.add_term(&f, vec![0, 0], f.one());
        let s = hensel_root(&f, &fp, &f.from_i64(5), 2).unwrap();
        assert_eq!(s.coeffs[0], f.from_i64(5));
        // s(t)^2 = t^5 - 1 mod t^2
        let sq = s.mul(&s);
        assert_eq!(sq.coeffs[0], f.from_i64(-1));
        assert_eq!(sq.coeffs[1], f.zero());
    }

    #[test]
    fn singular_point_detected() {
        // F = y^2 - t at y0 = 0: derivative vanishes
        let f = q();
        let mut fp = MPoly::zero(2);
        fp.add_term(&f, vec![0, 2], f.one());
        fp.add_term(&f, vec![1, 0], f.from_i64(-1));
        assert_eq!(
            hensel_root(&f, &fp, &f.zero(), 3).unwrap_err(),
            SeriesError::SingularPoint
        );
    }

    #[test]
    fn series_inverse() {
        let f = q();
        let s = Series::new(f.clone(), vec![f.one(), f.one()], 5); // 1 + t
        let i = s.inv().unwrap();
        let prod = s.mul(&i);
        assert_eq!(prod.coeffs[0], f.one());
        assert!(prod.coeffs[1..].iter().all(|c| f.is_zero(c)));
    }
}
