//! Koszul cohomology dimensions dim K_{p,q}(C,B;L), graded Betti tables,
//! and the Hilbert-series consistency identity.
//!
//! The strand through K_{p,q} is
//!   ∧^{p+1}V ⊗ W_{q−1} → ∧^p V ⊗ W_q → ∧^{p−1}V ⊗ W_{q+1}
//! with V = H^0(L) and W_q = H^0(B ⊗ L^q): the differential lowers wedge
//! degree by one and raises the twist by one, consistent with
//! E_p = ⊕ K_{p,q} ⊗ S(−p−q).

use crate::curve::{CurveError, CurveModel, DivisorSpec};
use crate::field::El;
use crate::matrix::SparseMat;
use crate::rr::{mult_map, rr_space, MultMap, RRSpace};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KoszulError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// Lexicographic enumeration of all p-element subsets of {0, …, n−1}.
pub fn wedge_enum(n: usize, p: usize) -> Vec<Vec<usize>> {
    assert!(p <= n, "wedge degree exceeds dimension");
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..p).collect();
    loop {
        out.push(cur.clone());
        // advance to the next subset in lex order
        let mut i = p;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - (p - i) {
                cur[i] += 1;
                for j in i + 1..p {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

pub fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r = 1usize;
    for i in 0..k.min(n - k) {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// The section data of the pair (B, L): V = H^0(L), the twists
/// W_q = H^0(B + qL), and the multiplication maps V × W_q → W_{q+1}.
/// Spaces are computed lazily and cached.
pub struct GradedSectionData {
    pub model: CurveModel,
    pub b: DivisorSpec,
    pub l: DivisorSpec,
    pub v: RRSpace,
    spaces: BTreeMap<i64, RRSpace>,
    mults: BTreeMap<i64, MultMap>,
    ranks: BTreeMap<(usize, i64), usize>,
}

impl GradedSectionData {
    pub fn new(
        model: &CurveModel,
        b: &DivisorSpec,
        l: &DivisorSpec,
    ) -> Result<Self, KoszulError> {
        if !l.is_normalized() || !b.is_normalized() {
            return Err(KoszulError::Usage(
                "B and L must be in normalized divisor shape".into(),
            ));
        }
        let v = rr_space(model, l)?;
        Ok(GradedSectionData {
            model: model.clone(),
            b: b.clone(),
            l: l.clone(),
            v,
            spaces: BTreeMap::new(),
            mults: BTreeMap::new(),
            ranks: BTreeMap::new(),
        })
    }

    /// W_q = H^0(B + qL). The divisor B + qL must either be in normalized
    /// shape or have negative degree (in which case the space is zero).
    pub fn space(&mut self, q: i64) -> Result<&RRSpace, KoszulError> {
        if !self.spaces.contains_key(&q) {
            let d = self.b.combine(&self.l, q);
            let s = if d.is_normalized() {
                rr_space(&self.model, &d)?
            } else if d.degree(&self.model) < 0 {
                RRSpace {
                    ambient_bound: d.base_mult,
                    divisor: d,
                    basis: vec![],
                }
            } else {
                return Err(KoszulError::Usage(format!(
                    "twist q = {q}: B + qL has nonnegative degree but positive parts \
                     away from the base point; not supported"
                )));
            };
            self.spaces.insert(q, s);
        }
        Ok(&self.spaces[&q])
    }

    pub fn dim_w(&mut self, q: i64) -> Result<usize, KoszulError> {
        Ok(self.space(q)?.dim())
    }

    /// Structure constants of V × W_q → W_{q+1}.
    fn mult(&mut self, q: i64) -> Result<&MultMap, KoszulError> {
        if !self.mults.contains_key(&q) {
            let w = self.space(q)?.clone();
            let t = self.space(q + 1)?.clone();
            let mm = mult_map(&self.model, &self.v, &w, &t)?;
            self.mults.insert(q, mm);
        }
        Ok(&self.mults[&q])
    }

    /// Matrix of d_{p,q} : ∧^p V ⊗ W_q → ∧^{p−1} V ⊗ W_{q+1} in the
    /// wedge_enum × basis ordering. For p = 0 the target is zero and the
    /// matrix has no rows.
    pub fn differential(&mut self, p: usize, q: i64) -> Result<SparseMat, KoszulError> {
        let field = self.model.field.clone();
        let n = self.v.dim();
        let wq = self.dim_w(q)?;
        let wq1 = self.dim_w(q + 1)?;
        let cols = binom(n, p) * wq;
        if p == 0 || p > n {
            return Ok(SparseMat::new(field, 0, cols));
        }
        let sources = wedge_enum(n, p);
        let targets = wedge_enum(n, p - 1);
        let tpos: BTreeMap<Vec<usize>, usize> = targets
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        let rows = targets.len() * wq1;
        let mut m = SparseMat::new(field.clone(), rows, cols);
        if wq == 0 || wq1 == 0 {
            return Ok(m);
        }
        let table = self.mult(q)?.table.clone();
        for (si, s) in sources.iter().enumerate() {
            for wj in 0..wq {
                let col = si * wq + wj;
                for (j, &vi) in s.iter().enumerate() {
                    let mut t = s.clone();
                    t.remove(j);
                    let ti = tpos[&t];
                    let coords: &Vec<El> = &table[vi][wj];
                    for (k, c) in coords.iter().enumerate() {
                        if field.is_zero(c) {
                            continue;
                        }
                        let v = if j % 2 == 0 { c.clone() } else { field.neg(c) };
                        m.add_to(ti * wq1 + k, col, v);
                    }
                }
            }
        }
        Ok(m)
    }

    fn rank(&mut self, p: usize, q: i64) -> Result<usize, KoszulError> {
        if let Some(&r) = self.ranks.get(&(p, q)) {
            return Ok(r);
        }
        let n = self.v.dim();
        let r = if p == 0 || p > n || self.dim_w(q)? == 0 || self.dim_w(q + 1)? == 0 {
            0
        } else {
            self.differential(p, q)?.rank()
        };
        self.ranks.insert((p, q), r);
        Ok(r)
    }

    /// dim K_{p,q} = [dim(∧^p V ⊗ W_q) − rank d_{p,q}] − rank d_{p+1,q−1}.
    pub fn koszul_dim(&mut self, p: usize, q: i64) -> Result<usize, KoszulError> {
        let n = self.v.dim();
        if p > n {
            return Ok(0);
        }
        let a = binom(n, p) * self.dim_w(q)?;
        let r1 = self.rank(p, q)?;
        let r2 = self.rank(p + 1, q - 1)?;
        let k = a as i64 - r1 as i64 - r2 as i64;
        assert!(k >= 0, "negative Koszul dimension: rank bookkeeping bug");
        Ok(k as usize)
    }
}

/// Check that L is globally generated: trivial for genus 0 with
/// deg L ≥ 0, guaranteed for deg L ≥ 2g, and otherwise checked on the
/// rational points in prime-field mode.
pub fn check_globally_generated(
    model: &CurveModel,
    l: &DivisorSpec,
) -> Result<(), KoszulError> {
    let g = model.genus();
    let deg = l.degree(model);
    if g == 0 {
        if deg >= 0 {
            return Ok(());
        }
        return Err(KoszulError::Usage(format!(
            "L has negative degree {deg}; not globally generated"
        )));
    }
    if deg >= 2 * g {
        return Ok(());
    }
    if !matches!(model.field, crate::field::Field::Prime(_)) {
        return Err(KoszulError::Usage(format!(
            "cannot certify global generation of L (degree {deg} < 2g = {}) over this \
             field; use a prime field for the explicit base-point check",
            2 * g
        )));
    }
    let h = rr_space(model, l)?.dim();
    for p in model.enumerate_closed_points(1)? {
        let lp = l.sub(&DivisorSpec {
            base_mult: 0,
            conditions: vec![(p.clone(), -1)],
        });
        let hp = crate::rr::h0(model, &lp)?;
        if hp != h - 1 {
            return Err(KoszulError::Usage(format!(
                "L has a base point at {} (h0 drops to {hp}, expected {})",
                p.fmt(),
                h - 1
            )));
        }
    }
    Ok(())
}

pub fn koszul_dim(
    model: &CurveModel,
    b: &DivisorSpec,
    l: &DivisorSpec,
    p: usize,
    q: i64,
) -> Result<usize, KoszulError> {
    check_globally_generated(model, l)?;
    let mut data = GradedSectionData::new(model, b, l)?;
    data.koszul_dim(p, q)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BettiTable {
    /// dims[p][q] for 0 ≤ p ≤ h0(L)−1, 0 ≤ q ≤ q_max
    pub dims: Vec<Vec<usize>>,
    pub q_max: i64,
    pub g: i64,
    pub deg_l: i64,
    pub deg_b: i64,
    pub h0_l: usize,
    pub gon: Option<usize>,
    pub exceptional: Option<bool>,
}

impl BettiTable {
    pub fn cell(&self, p: usize, q: i64) -> usize {
        if p < self.dims.len() && q >= 0 && (q as usize) < self.dims[p].len() {
            self.dims[p][q as usize]
        } else {
            0
        }
    }
}

pub fn betti_table(
    model: &CurveModel,
    b: &DivisorSpec,
    l: &DivisorSpec,
    q_max: i64,
) -> Result<BettiTable, KoszulError> {
    check_globally_generated(model, l)?;
    let mut data = GradedSectionData::new(model, b, l)?;
    let n = data.v.dim();
    if n == 0 {
        return Err(KoszulError::Usage("h0(L) = 0; no Koszul complex".into()));
    }
    let p_max = n - 1;
    // order cells by the size of the larger differential involved, so
    // failures surface on small matrices first
    let mut cells: Vec<(usize, i64)> = Vec::new();
    for p in 0..=p_max {
        for q in 0..=q_max {
            cells.push((p, q));
        }
    }
    let mut sized: Vec<(usize, (usize, i64))> = Vec::new();
    for &(p, q) in &cells {
        let sz = binom(n, p) * data.dim_w(q)?;
        sized.push((sz, (p, q)));
    }
    sized.sort();
    let mut dims = vec![vec![0usize; (q_max + 1) as usize]; p_max + 1];
    for (_, (p, q)) in sized {
        dims[p][q as usize] = data.koszul_dim(p, q)?;
    }
    Ok(BettiTable {
        dims,
        q_max,
        g: model.genus(),
        deg_l: l.degree(model),
        deg_b: b.degree(model),
        h0_l: n,
        gon: None,
        exceptional: None,
    })
}

/// Euler-characteristic identity of the Koszul complex in each total
/// degree m = p + q up to q_max:
/// Σ_p (−1)^p dim K_{p,m−p} = Σ_p (−1)^p binom(n,p) h0(B + (m−p)L),
/// with p running over the whole complex 0..=n = h0(L). Cells outside the
/// table (negative twists, the top exterior power) are computed from the
/// section data; they matter exactly when H^0(B − L) ≠ 0. Returns the
/// first differing degree on mismatch.
pub fn hilbert_check(
    table: &BettiTable,
    data: &mut GradedSectionData,
) -> Result<Result<(), usize>, KoszulError> {
    let n = table.h0_l;
    let p_max = table.dims.len() - 1;
    for m in 0..=table.q_max {
        let mut lhs = 0i64;
        let mut rhs = 0i64;
        for p in 0..=n {
            let q = m - p as i64;
            let sign = if p % 2 == 0 { 1i64 } else { -1 };
            rhs += sign * (binom(n, p) * data.dim_w(q)?) as i64;
            let k = if p <= p_max && q >= 0 && q <= table.q_max {
                table.cell(p, q)
            } else {
                data.koszul_dim(p, q)?
            };
            lhs += sign * k as i64;
        }
        if lhs != rhs {
            return Ok(Err(m as usize));
        }
    }
    Ok(Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::poly::{MPoly, UPoly};

    fn q() -> Field {
        Field::rationals()
    }

    fn hyp_g2(field: &Field) -> CurveModel {
        CurveModel::hyperelliptic(field.clone(), UPoly::from_i64(field, &[-1, 0, 0, 0, 0, 1]))
            .unwrap()
    }

    fn klein(field: &Field) -> CurveModel {
        let mut f = MPoly::zero(3);
        f.add_term(field, vec![3, 1, 0], field.one());
        f.add_term(field, vec![0, 3, 1], field.one());
        f.add_term(field, vec![1, 0, 3], field.one());
        CurveModel::plane_smooth(field.clone(), f).unwrap()
    }

    #[test]
    fn wedge_enum_examples() {
        assert_eq!(wedge_enum(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(wedge_enum(4, 0), vec![Vec::<usize>::new()]);
        assert_eq!(wedge_enum(6, 3).len(), 20);
    }

    #[test]
    fn d_squared_is_zero_on_p1() {
        let f = q();
        let c = CurveModel::rational(f.clone());
        let b = DivisorSpec::of_base(0);
        let l = DivisorSpec::of_base(3);
        let mut data = GradedSectionData::new(&c, &b, &l).unwrap();
        for p in 1..=4usize {
            for qq in 0..=2i64 {
                let d1 = data.differential(p + 1, qq - 1).unwrap();
                let d2 = data.differential(p, qq).unwrap();
                if d1.ncols == 0 || d2.nrows == 0 {
                    continue;
                }
                let prod = d2.mul(&d1);
                assert!(prod.is_zero(), "d∘d != 0 at p={p} q={qq}");
            }
        }
    }

    #[test]
    fn twisted_cubic_table() {
        let f = q();
        let c = CurveModel::rational(f);
        let b = DivisorSpec::of_base(0);
        let l = DivisorSpec::of_base(3);
        let t = betti_table(&c, &b, &l, 3).unwrap();
        assert_eq!(t.cell(0, 0), 1);
        assert_eq!(t.cell(1, 1), 3);
        assert_eq!(t.cell(2, 1), 2);
        let mut total = 0usize;
        for p in 0..=3usize {
            for qq in 0..=3i64 {
                total += t.cell(p, qq);
            }
        }
        assert_eq!(total, 6, "no other nonzero cells");
        // Hilbert identity
        let mut data = GradedSectionData::new(&c, &b, &l).unwrap();
        assert_eq!(hilbert_check(&t, &mut data).unwrap(), Ok(()));
    }

    #[test]
    fn genus2_bicanonical_k11() {
        let f = q();
        let c = hyp_g2(&f);
        let b = DivisorSpec::of_base(0);
        let l = DivisorSpec::of_base(4); // omega^2
        assert_eq!(koszul_dim(&c, &b, &l, 1, 1).unwrap(), 1);
        assert_eq!(koszul_dim(&c, &b, &l, 2, 1).unwrap(), 0);
    }

    #[test]
    fn genus2_bicanonical_row_q1() {
        let f = q();
        let c = hyp_g2(&f);
        let t = betti_table(&c, &DivisorSpec::of_base(0), &DivisorSpec::of_base(4), 3).unwrap();
        assert_eq!(t.cell(0, 1), 0);
        assert_eq!(t.cell(1, 1), 1);
        assert_eq!(t.cell(2, 1), 0);
        assert_eq!(t.cell(0, 0), 1);
        for p in 1..=2usize {
            assert_eq!(t.cell(p, 0), 0, "generation in degree 0");
        }
        let mut data =
            GradedSectionData::new(&c, &DivisorSpec::of_base(0), &DivisorSpec::of_base(4))
                .unwrap();
        assert_eq!(hilbert_check(&t, &mut data).unwrap(), Ok(()));
    }

    #[test]
    fn klein_bicanonical_k31() {
        let f = q();
        let c = klein(&f);
        let b = DivisorSpec::of_base(0);
        let l = DivisorSpec::of_base(2); // omega^2 = 2H
        assert_eq!(koszul_dim(&c, &b, &l, 3, 1).unwrap(), 3);
    }

    #[test]
    fn rational_one_dimensional_l() {
        let f = q();
        let c = CurveModel::rational(f);
        // B = O(2), L = 0*Pinf: h0(L) = 1, so wedge^2 = 0
        let b = DivisorSpec::of_base(2);
        let l = DivisorSpec::of_base(0);
        assert_eq!(koszul_dim(&c, &b, &l, 2, 1).unwrap(), 0);
    }

    #[test]
    fn global_generation_guard() {
        let f = q();
        let c = hyp_g2(&f);
        // deg L = 3 < 2g = 4 over Q: cannot certify
        let l = DivisorSpec::of_base(3);
        assert!(check_globally_generated(&c, &l).is_err());
        let f11 = Field::prime(11).unwrap();
        let c11 = hyp_g2(&f11);
        // |3 Pinf| = Pinf + |2 Pinf| has a base point at infinity
        assert!(check_globally_generated(&c11, &DivisorSpec::of_base(3)).is_err());
        // the g^1_2 = |2 Pinf| is base point free
        assert!(check_globally_generated(&c11, &DivisorSpec::of_base(2)).is_ok());
    }
}
