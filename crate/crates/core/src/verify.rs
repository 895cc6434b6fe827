//! Geometric predicates (gonality, p-very ampleness, linear equivalence to
//! the bicanonical class) and theorem-pattern verifiers for the syzygy
//! statements the Betti tables are predicted to satisfy.

use crate::curve::{CurveError, CurveModel, CurvePoint, DivisorSpec, Family};
use crate::field::Field;
use crate::koszul::{binom, check_globally_generated, GradedSectionData, KoszulError};
use crate::rr::{h0, h0_effective, is_linearly_equivalent, principal_shift};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("brute-force search requires a prime field")]
    UnsupportedField,
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Koszul(#[from] KoszulError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GonalityMethod {
    FamilyFormula,
    BruteForce,
}

#[derive(Debug, Clone)]
pub struct GonalityCertificate {
    pub value: usize,
    pub method: GonalityMethod,
    /// effective divisor E with deg E = value and h^0(E) >= 2
    pub witness: Option<Vec<(CurvePoint, i64)>>,
    /// when set, no enumerated effective divisor of degree < value moves
    /// in a pencil
    pub exhaustive_up_to: Option<usize>,
}

/// The classical gonality of each family.
pub fn family_gonality(model: &CurveModel) -> usize {
    match &model.family {
        Family::Rational => 1,
        Family::Hyperelliptic { .. } => 2,
        Family::PlaneSmooth { f } => (f.total_degree() - 1) as usize,
    }
}

pub fn gonality(
    model: &CurveModel,
    method: GonalityMethod,
) -> Result<GonalityCertificate, VerifyError> {
    match method {
        GonalityMethod::FamilyFormula => {
            let value = family_gonality(model);
            let witness = family_witness(model)?;
            if witness.is_none() && matches!(model.field, Field::Prime(_)) {
                return gonality(model, GonalityMethod::BruteForce);
            }
            if let Some(w) = &witness {
                let d: i64 = w.iter().map(|(p, k)| k * p.residue_degree() as i64).sum();
                assert_eq!(d, value as i64, "witness degree mismatch");
                assert!(
                    h0_effective(model, w)? >= 2,
                    "witness does not move in a pencil"
                );
            }
            Ok(GonalityCertificate {
                value,
                method: GonalityMethod::FamilyFormula,
                witness,
                exhaustive_up_to: None,
            })
        }
        GonalityMethod::BruteForce => {
            if !matches!(model.field, Field::Prime(_)) {
                return Err(VerifyError::UnsupportedField);
            }
            let bound = family_gonality(model) + 1;
            for k in 1..=bound {
                let pts = model.enumerate_closed_points(k.min(4))?;
                for e in effective_divisors(&pts, k as i64) {
                    if h0_effective(model, &e)? >= 2 {
                        return Ok(GonalityCertificate {
                            value: k,
                            method: GonalityMethod::BruteForce,
                            witness: Some(e),
                            exhaustive_up_to: Some(k),
                        });
                    }
                }
            }
            Err(VerifyError::Usage(
                "no pencil found up to the family bound (model bug)".into(),
            ))
        }
    }
}

/// A witness pencil for the family formula: the base point with h^0 = 2
/// for rational curves, the g^1_2 = |2 Pinf| for hyperelliptic ones, the
/// residual of a line through a rational point on plane curves.
fn family_witness(
    model: &CurveModel,
) -> Result<Option<Vec<(CurvePoint, i64)>>, VerifyError> {
    let field = &model.field;
    match &model.family {
        Family::Rational => Ok(Some(vec![(CurvePoint::rat_inf(field), 1)])),
        Family::Hyperelliptic { .. } => Ok(Some(vec![(CurvePoint::hyp_inf(field), 2)])),
        Family::PlaneSmooth { .. } => {
            let Some(p) = find_rational_plane_point(model)? else {
                return Ok(None);
            };
            let d = DivisorSpec {
                base_mult: 0,
                conditions: vec![(p, -1)],
            };
            match principal_shift(model, &d) {
                Ok((nd, _)) => Ok(Some(nd.conditions)),
                Err(CurveError::ShiftFailure(_)) => Ok(None),
                Err(e) => Err(e.into()),
            }
        }
    }
}

/// A rational point on a plane model: coordinate points and small integer
/// coordinates over Q, full degree-1 enumeration over a prime field.
fn find_rational_plane_point(model: &CurveModel) -> Result<Option<CurvePoint>, VerifyError> {
    let field = &model.field;
    match field {
        Field::Prime(_) => {
            let pts = model.enumerate_closed_points(1)?;
            Ok(pts.into_iter().next())
        }
        Field::Rationals => {
            let vals: Vec<i64> = vec![0, 1, -1, 2, -2, 3, -3];
            for &x in &vals {
                for &y in &vals {
                    for &z in &vals {
                        if x == 0 && y == 0 && z == 0 {
                            continue;
                        }
                        let xyz = [field.from_i64(x), field.from_i64(y), field.from_i64(z)];
                        let p = CurvePoint::plane(field, xyz);
                        if model.contains(&p) {
                            return Ok(Some(p));
                        }
                    }
                }
            }
            Ok(None)
        }
        Field::Ext { .. } => Err(VerifyError::UnsupportedField),
    }
}

/// All effective divisors of exact degree `deg` supported on the given
/// closed points, in deterministic order.
pub fn effective_divisors(
    points: &[CurvePoint],
    deg: i64,
) -> Vec<Vec<(CurvePoint, i64)>> {
    fn rec(
        points: &[CurvePoint],
        idx: usize,
        remaining: i64,
        cur: &mut Vec<(CurvePoint, i64)>,
        out: &mut Vec<Vec<(CurvePoint, i64)>>,
    ) {
        if remaining == 0 {
            out.push(cur.clone());
            return;
        }
        if idx == points.len() {
            return;
        }
        let e = points[idx].residue_degree() as i64;
        let max_mult = remaining / e;
        for m in (0..=max_mult).rev() {
            if m > 0 {
                cur.push((points[idx].clone(), m));
            }
            rec(points, idx + 1, remaining - m * e, cur, out);
            if m > 0 {
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(points, 0, deg, &mut Vec::new(), &mut out);
    out
}

/// Exhaustive p-very-ampleness test over a prime field: B is p-very ample
/// iff every effective ξ of degree p+1 imposes independent conditions,
/// h^0(B − ξ) = h^0(B) − (p+1). Returns a violating ξ on failure.
pub fn is_p_very_ample(
    model: &CurveModel,
    b: &DivisorSpec,
    p: usize,
) -> Result<(bool, Option<Vec<(CurvePoint, i64)>>), VerifyError> {
    if !matches!(model.field, Field::Prime(_)) {
        return Err(VerifyError::UnsupportedField);
    }
    let pts = model.enumerate_closed_points((p + 1).min(4))?;
    is_p_very_ample_on(model, b, p, &pts)
}

/// Partial p-very-ampleness test on a supplied point list (the Q mode).
pub fn is_p_very_ample_on(
    model: &CurveModel,
    b: &DivisorSpec,
    p: usize,
    points: &[CurvePoint],
) -> Result<(bool, Option<Vec<(CurvePoint, i64)>>), VerifyError> {
    let h0b = h0(model, b)? as i64;
    let want = h0b - (p as i64 + 1);
    if want < 0 {
        // fewer than p+1 sections: no divisor of degree p+1 can impose
        // independent conditions
        let first = effective_divisors(points, p as i64 + 1).into_iter().next();
        return Ok((false, first));
    }
    for xi in effective_divisors(points, p as i64 + 1) {
        let mut d = b.clone();
        for (q, k) in &xi {
            d = d.sub(&DivisorSpec {
                base_mult: 0,
                conditions: vec![(q.clone(), -k)],
            });
        }
        let h = h0(model, &d)? as i64;
        if h != want {
            return Ok((false, Some(xi)));
        }
    }
    Ok((true, None))
}

/// The classification branches of p-very ample bundles with small h^0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmallH0Class {
    /// h^0(B) >= p+3: no classification constraint
    H0AtLeastP3,
    /// h^0(B) = p+1, p = 0, B = O_C
    P1Trivial,
    /// h^0(B) = p+1, p >= 1, C = P^1, B = O(p)
    P1RationalNormal,
    /// h^0(B) = p+2, g = 0, B = O(p+1)
    P2CaseI,
    /// h^0(B) = p+2, g = 1, deg B = p+2
    P2CaseII,
    /// h^0(B) = p+2, g >= 2, p = 0, base point free pencil
    P2CaseIiiPencil,
    /// h^0(B) = p+2, g >= 2, p = 1, C in P(H^0(B)) a plane curve
    P2CaseIiiPlane,
}

pub fn classify_small_h0(
    model: &CurveModel,
    b: &DivisorSpec,
    p: usize,
) -> Result<SmallH0Class, VerifyError> {
    let g = model.genus();
    let h = h0(model, b)? as i64;
    let deg = b.degree(model);
    let p = p as i64;
    if h >= p + 3 {
        return Ok(SmallH0Class::H0AtLeastP3);
    }
    if h == p + 1 {
        if p == 0 && deg == 0 && h == 1 {
            return Ok(SmallH0Class::P1Trivial);
        }
        if p >= 1 && g == 0 && deg == p {
            return Ok(SmallH0Class::P1RationalNormal);
        }
        return Err(VerifyError::Usage(format!(
            "h0(B) = p+1 = {h} but neither classification branch applies \
             (g = {g}, deg B = {deg}): would falsify the classification"
        )));
    }
    if h == p + 2 {
        if g == 0 && deg == p + 1 {
            return Ok(SmallH0Class::P2CaseI);
        }
        if g == 1 && deg == p + 2 {
            return Ok(SmallH0Class::P2CaseII);
        }
        if g >= 2 && p == 0 && h == 2 {
            return Ok(SmallH0Class::P2CaseIiiPencil);
        }
        if g >= 2 && p == 1 && h == 3 {
            return Ok(SmallH0Class::P2CaseIiiPlane);
        }
        return Err(VerifyError::Usage(format!(
            "h0(B) = p+2 = {h} but no classification case applies \
             (g = {g}, deg B = {deg}): would falsify the classification"
        )));
    }
    Err(VerifyError::Usage(format!(
        "h0(B) = {h} < p+1 = {}: B cannot be p-very ample",
        p + 1
    )))
}

/// Is the pair (model, L) in the exceptional branch of the gonality
/// theorem: L ≅ ω^2 and (g = 2 or C a plane quartic)?
pub fn is_exceptional(model: &CurveModel, l: &DivisorSpec) -> Result<bool, VerifyError> {
    let g = model.genus();
    if !(g == 2 || model.is_plane_quartic()) {
        return Ok(false);
    }
    let omega2 = model.canonical_divisor().scaled(2);
    Ok(is_linearly_equivalent(model, l, &omega2)?)
}

#[derive(Debug, Clone)]
pub struct PatternReport {
    pub g: i64,
    pub deg_l: i64,
    pub gon: usize,
    pub r: usize,
    pub exceptional: bool,
    /// inclusive p-range where K_{p,1} is expected nonzero
    pub expected_range: (usize, usize),
    /// dims K_{p,1} for 1 <= p <= r, indexed from p = 1
    pub dims: Vec<usize>,
    pub verdict: bool,
}

/// Full gonality-theorem pattern: K_{p,1}(C;L) ≠ 0 ⟺ 1 ≤ p ≤ deg L − g −
/// gon(C), with one extra nonvanishing index in the exceptional cases.
pub fn gonality_pattern_check(
    model: &CurveModel,
    l: &DivisorSpec,
) -> Result<PatternReport, VerifyError> {
    let g = model.genus();
    let deg_l = l.degree(model);
    if g < 2 {
        return Err(VerifyError::Usage(format!("need g >= 2, got g = {g}")));
    }
    if deg_l < 4 * g - 4 {
        return Err(VerifyError::Usage(format!(
            "need deg L >= 4g-4 = {}, got {deg_l}",
            4 * g - 4
        )));
    }
    check_globally_generated(model, l)?;
    let gon = family_gonality(model);
    let exceptional = is_exceptional(model, l)?;
    let b = DivisorSpec::of_base(0);
    let mut data = GradedSectionData::new(model, &b, l)?;
    let r = data.v.dim() - 1;
    let top = (deg_l - g - gon as i64).max(0) as usize + if exceptional { 1 } else { 0 };
    let expected_range = (1usize, top.min(r));
    let mut dims = Vec::with_capacity(r);
    for p in 1..=r {
        dims.push(data.koszul_dim(p, 1)?);
    }
    let verdict = (1..=r).all(|p| {
        let nonzero = dims[p - 1] != 0;
        let expected = p >= expected_range.0 && p <= expected_range.1;
        nonzero == expected
    });
    Ok(PatternReport {
        g,
        deg_l,
        gon,
        r,
        exceptional,
        expected_range,
        dims,
        verdict,
    })
}

#[derive(Debug, Clone)]
pub struct BVanishingReport {
    pub h0_b: usize,
    pub p: usize,
    pub branch: &'static str,
    pub expected: usize,
    pub computed: usize,
    pub verdict: bool,
}

/// The three branches of the B-vanishing theorem for L = B ⊗ ω:
/// h^0(B) ≥ p+3 ⇒ K_{p,1} = 0; h^0(B) = p+2 ⇒ K_{p,1} = S^p H^0(ω);
/// h^0(B) = p+1 ⇒ K_{p,1} = 0.
pub fn bvanishing_check(
    model: &CurveModel,
    b: &DivisorSpec,
    p: usize,
) -> Result<BVanishingReport, VerifyError> {
    let g = model.genus();
    let l = b.add(&model.canonical_divisor());
    check_globally_generated(model, &l)?;
    let h0b = h0(model, b)?;
    let (branch, expected) = if h0b >= p + 3 {
        ("h0(B) >= p+3", 0)
    } else if h0b == p + 2 {
        // dim S^p H^0(omega) with h^0(omega) = g
        ("h0(B) = p+2", binom(p + g as usize - 1, g as usize - 1))
    } else if h0b == p + 1 {
        ("h0(B) = p+1", 0)
    } else {
        return Err(VerifyError::Usage(format!(
            "h0(B) = {h0b} < p+1 = {}: B is not p-very ample",
            p + 1
        )));
    };
    let mut data = GradedSectionData::new(model, b, &l)?;
    let computed = data.koszul_dim(p, 1)?;
    Ok(BVanishingReport {
        h0_b: h0b,
        p,
        branch,
        expected,
        computed,
        verdict: computed == expected,
    })
}

#[derive(Debug, Clone)]
pub struct CorollaryReport {
    pub p: usize,
    pub exceptional: bool,
    pub k_p1: usize,
    /// K_{p−1,1}, checked to vanish in the exceptional cases (None when
    /// p = 0)
    pub k_pm1_1: Option<usize>,
    pub verdict: bool,
}

/// The corollary pattern for deg(L − B) ≥ 2g − 2: K_{p,1}(C,B;L) = 0
/// unless L ≅ B ⊗ ω and the pair is in an exceptional subcase (p = 0 and
/// B a pencil, or p = 1 and C a plane curve in P(H^0(B))), where instead
/// K_{p,1} ≠ 0 but K_{p−1,1} = 0.
pub fn corollary_pattern_check(
    model: &CurveModel,
    b: &DivisorSpec,
    l: &DivisorSpec,
    p: usize,
) -> Result<CorollaryReport, VerifyError> {
    let g = model.genus();
    let diff_deg = l.degree(model) - b.degree(model);
    if diff_deg < 2 * g - 2 {
        return Err(VerifyError::Usage(format!(
            "need deg(L − B) >= 2g−2 = {}, got {diff_deg}",
            2 * g - 2
        )));
    }
    check_globally_generated(model, l)?;
    let b_omega = b.add(&model.canonical_divisor());
    let is_adjoint = is_linearly_equivalent(model, l, &b_omega)?;
    let h0b = h0(model, b)?;
    let exceptional = is_adjoint
        && ((p == 0 && h0b == 2) || (p == 1 && h0b == 3 && g >= 2));
    let mut data = GradedSectionData::new(model, b, l)?;
    let k_p1 = data.koszul_dim(p, 1)?;
    let k_pm1_1 = if p >= 1 {
        Some(data.koszul_dim(p - 1, 1)?)
    } else {
        None
    };
    let verdict = if exceptional {
        k_p1 != 0 && k_pm1_1.map_or(true, |k| k == 0)
    } else {
        k_p1 == 0
    };
    Ok(CorollaryReport {
        p,
        exceptional,
        k_p1,
        k_pm1_1,
        verdict,
    })
}

/// g ≥ gon(C), with equality exactly for g = 2 or plane quartics.
pub fn genus_gonality_check(model: &CurveModel) -> Result<bool, VerifyError> {
    let g = model.genus();
    if g < 2 {
        return Err(VerifyError::Usage(format!("need g >= 2, got g = {g}")));
    }
    let gon = family_gonality(model) as i64;
    let equality_expected = g == 2 || model.is_plane_quartic();
    Ok(gon <= g && ((gon == g) == equality_expected))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{MPoly, UPoly};

    fn q() -> Field {
        Field::rationals()
    }

    fn hyp_g2(field: &Field) -> CurveModel {
        CurveModel::hyperelliptic(field.clone(), UPoly::from_i64(field, &[-1, 0, 0, 0, 0, 1]))
            .unwrap()
    }

    fn hyp_g3(field: &Field) -> CurveModel {
        // y^2 = x^7 - x
        CurveModel::hyperelliptic(
            field.clone(),
            UPoly::from_i64(field, &[0, -1, 0, 0, 0, 0, 0, 1]),
        )
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
    fn family_gonality_values() {
        let f = q();
        assert_eq!(family_gonality(&CurveModel::rational(f.clone())), 1);
        assert_eq!(family_gonality(&hyp_g2(&f)), 2);
        assert_eq!(family_gonality(&klein(&f)), 3);
    }

    #[test]
    fn gonality_witnesses_verify() {
        let f = q();
        for c in [hyp_g2(&f), klein(&f)] {
            let cert = gonality(&c, GonalityMethod::FamilyFormula).unwrap();
            let w = cert.witness.expect("witness");
            assert!(h0_effective(&c, &w).unwrap() >= 2);
        }
    }

    #[test]
    fn brute_force_gonality_over_f11() {
        let f = Field::prime(11).unwrap();
        let cert = gonality(&hyp_g3(&f), GonalityMethod::BruteForce).unwrap();
        assert_eq!(cert.value, 2);
        assert_eq!(cert.exhaustive_up_to, Some(2));
        let cert2 = gonality(&hyp_g2(&f), GonalityMethod::BruteForce).unwrap();
        assert_eq!(cert2.value, 2);
    }

    #[test]
    fn pva_hyperelliptic_omega() {
        let f = Field::prime(11).unwrap();
        let c = hyp_g2(&f);
        let omega = c.canonical_divisor();
        let (ok0, _) = is_p_very_ample(&c, &omega, 0).unwrap();
        assert!(ok0);
        let (ok1, wit) = is_p_very_ample(&c, &omega, 1).unwrap();
        assert!(!ok1);
        let w = wit.unwrap();
        let deg: i64 = w.iter().map(|(p, k)| k * p.residue_degree() as i64).sum();
        assert_eq!(deg, 2);
    }

    #[test]
    fn classification_examples() {
        let f = q();
        let c = hyp_g2(&f);
        assert_eq!(
            classify_small_h0(&c, &c.canonical_divisor(), 0).unwrap(),
            SmallH0Class::P2CaseIiiPencil
        );
        let k = klein(&f);
        assert_eq!(
            classify_small_h0(&k, &k.canonical_divisor(), 1).unwrap(),
            SmallH0Class::P2CaseIiiPlane
        );
        let r = CurveModel::rational(f);
        for p in 1..4usize {
            assert_eq!(
                classify_small_h0(&r, &DivisorSpec::of_base(p as i64), p).unwrap(),
                SmallH0Class::P1RationalNormal
            );
        }
    }

    #[test]
    fn pattern_check_genus2() {
        let f = q();
        let c = hyp_g2(&f);
        let rep = gonality_pattern_check(&c, &DivisorSpec::of_base(4)).unwrap();
        assert!(rep.exceptional);
        assert_eq!(rep.expected_range, (1, 1));
        assert_eq!(rep.dims, vec![1, 0]);
        assert!(rep.verdict);
    }

    #[test]
    fn bvanishing_examples_small() {
        let f = q();
        let c = hyp_g2(&f);
        // B = 2 Pinf, p = 0: h0 = 2 = p+2, expect dim S^0 H^0(omega) = 1
        let rep = bvanishing_check(&c, &DivisorSpec::of_base(2), 0).unwrap();
        assert_eq!(rep.expected, 1);
        assert!(rep.verdict, "computed {}", rep.computed);
        // B = 5 Pinf, p = 1: h0 = 4 = p+3, expect 0
        let rep = bvanishing_check(&c, &DivisorSpec::of_base(5), 1).unwrap();
        assert_eq!(rep.expected, 0);
        assert!(rep.verdict, "computed {}", rep.computed);
    }

    #[test]
    fn corollary_examples() {
        let f = q();
        let c = hyp_g2(&f);
        let b = DivisorSpec::of_base(2);
        // L = 5 Pinf: not adjoint, expect K_{0,1} = 0
        let rep = corollary_pattern_check(&c, &b, &DivisorSpec::of_base(5), 0).unwrap();
        assert!(!rep.exceptional);
        assert!(rep.verdict, "K01 = {}", rep.k_p1);
        // L = 4 Pinf = B + omega: exceptional pencil case
        let rep = corollary_pattern_check(&c, &b, &DivisorSpec::of_base(4), 0).unwrap();
        assert!(rep.exceptional);
        assert!(rep.verdict, "K01 = {}", rep.k_p1);
    }

    #[test]
    fn genus_gonality_branches() {
        let f = q();
        assert!(genus_gonality_check(&hyp_g2(&f)).unwrap());
        assert!(genus_gonality_check(&klein(&f)).unwrap());
        assert!(genus_gonality_check(&hyp_g3(&f)).unwrap());
    }

    #[test]
    fn exceptional_detection_is_class_exact() {
        let f = q();
        let c = hyp_g2(&f);
        assert!(is_exceptional(&c, &DivisorSpec::of_base(4)).unwrap());
        assert!(!is_exceptional(&c, &DivisorSpec::of_base(5)).unwrap());
        // genus-3 hyperelliptic is never exceptional
        let c3 = hyp_g3(&f);
        assert!(!is_exceptional(&c3, &DivisorSpec::of_base(8)).unwrap());
        // a degree-8 class on Klein that is NOT 2H is not exceptional;
        // 2H itself is
        let k = klein(&f);
        assert!(is_exceptional(&k, &DivisorSpec::of_base(2)).unwrap());
    }

    #[test]
    fn effective_divisor_enumeration_counts() {
        let f = Field::prime(5).unwrap();
        let c = CurveModel::rational(f);
        let pts = c.enumerate_closed_points(2).unwrap();
        // degree-2 effective divisors on P^1 over F_5: pairs of rational
        // points with repetition C(6+1,2) = 21, plus 10 degree-2 closed
        // points = 31 = number of F_5-points of P^2 = (5^3-1)/(5-1)
        let divs = effective_divisors(&pts, 2);
        assert_eq!(divs.len(), 31);
    }
}
