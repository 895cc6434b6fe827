//! Riemann–Roch spaces H^0(m·base − E) for the three curve families,
//! multiplication maps between them, principal shifts for divisors with
//! positive parts away from the base point, and linear equivalence of
//! divisor classes.

use crate::curve::{CurveError, CurveModel, CurvePoint, DivisorSpec, Family, PointCoords};
use crate::field::{El, Field};
use crate::matrix::SparseMat;
use crate::poly::{MPoly, UPoly};
use crate::series::{eval_upoly_at, Series};

/// A global section of O(m·base), in the normal form of its family.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionRep {
    /// polynomial in x
    RatPoly(UPoly),
    /// a(x) + b(x)·y with y^2 already reduced via f
    Hyp { a: UPoly, b: UPoly },
    /// homogeneous form in normal form modulo F; degree recorded so the
    /// zero form still knows where it lives
    PlaneForm { form: MPoly, degree: i64 },
}

impl FunctionRep {
    pub fn zero_of(model: &CurveModel, m: i64) -> Self {
        match &model.family {
            Family::Rational => FunctionRep::RatPoly(UPoly::zero()),
            Family::Hyperelliptic { .. } => FunctionRep::Hyp {
                a: UPoly::zero(),
                b: UPoly::zero(),
            },
            Family::PlaneSmooth { .. } => FunctionRep::PlaneForm {
                form: MPoly::zero(3),
                degree: m,
            },
        }
    }

    pub fn one(model: &CurveModel) -> Self {
        let f = &model.field;
        match &model.family {
            Family::Rational => FunctionRep::RatPoly(UPoly::constant(f, f.one())),
            Family::Hyperelliptic { .. } => FunctionRep::Hyp {
                a: UPoly::constant(f, f.one()),
                b: UPoly::zero(),
            },
            Family::PlaneSmooth { .. } => FunctionRep::PlaneForm {
                form: MPoly::constant(f, 3, f.one()),
                degree: 0,
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FunctionRep::RatPoly(p) => p.is_zero(),
            FunctionRep::Hyp { a, b } => a.is_zero() && b.is_zero(),
            FunctionRep::PlaneForm { form, .. } => form.is_zero(),
        }
    }

    pub fn add(&self, field: &Field, other: &Self) -> Self {
        match (self, other) {
            (FunctionRep::RatPoly(p), FunctionRep::RatPoly(q)) => {
                FunctionRep::RatPoly(p.add(field, q))
            }
            (FunctionRep::Hyp { a: a1, b: b1 }, FunctionRep::Hyp { a: a2, b: b2 }) => {
                FunctionRep::Hyp {
                    a: a1.add(field, a2),
                    b: b1.add(field, b2),
                }
            }
            (
                FunctionRep::PlaneForm { form: f1, degree: d1 },
                FunctionRep::PlaneForm { form: f2, degree: d2 },
            ) => {
                assert!(f1.is_zero() || f2.is_zero() || d1 == d2, "degree mismatch");
                FunctionRep::PlaneForm {
                    form: f1.add(field, f2),
                    degree: *d1.max(d2),
                }
            }
            _ => panic!("mixed function representations"),
        }
    }

    pub fn scale(&self, field: &Field, c: &El) -> Self {
        match self {
            FunctionRep::RatPoly(p) => FunctionRep::RatPoly(p.scale(field, c)),
            FunctionRep::Hyp { a, b } => FunctionRep::Hyp {
                a: a.scale(field, c),
                b: b.scale(field, c),
            },
            FunctionRep::PlaneForm { form, degree } => FunctionRep::PlaneForm {
                form: form.scale(field, c),
                degree: *degree,
            },
        }
    }

    /// Product in the coordinate ring, reduced to normal form.
    pub fn mul(&self, model: &CurveModel, other: &Self) -> Self {
        let field = &model.field;
        match (self, other, &model.family) {
            (FunctionRep::RatPoly(p), FunctionRep::RatPoly(q), Family::Rational) => {
                FunctionRep::RatPoly(p.mul(field, q))
            }
            (
                FunctionRep::Hyp { a: a1, b: b1 },
                FunctionRep::Hyp { a: a2, b: b2 },
                Family::Hyperelliptic { f },
            ) => {
                // (a1 + b1 y)(a2 + b2 y) = a1 a2 + b1 b2 f + (a1 b2 + a2 b1) y
                let a = a1
                    .mul(field, a2)
                    .add(field, &b1.mul(field, b2).mul(field, f));
                let b = a1.mul(field, b2).add(field, &a2.mul(field, b1));
                FunctionRep::Hyp { a, b }
            }
            (
                FunctionRep::PlaneForm { form: f1, degree: d1 },
                FunctionRep::PlaneForm { form: f2, degree: d2 },
                Family::PlaneSmooth { .. },
            ) => FunctionRep::PlaneForm {
                form: reduce_plane(model, &f1.mul(field, f2)),
                degree: d1 + d2,
            },
            _ => panic!("function representation does not match the model"),
        }
    }

    /// Expansion of the section in the trivialization carried by the
    /// context (chart coordinate = 1 for plane models).
    pub fn expand(&self, ctx: &crate::curve::ExpansionCtx) -> Series {
        use crate::curve::CtxKind;
        let kf = &ctx.field;
        match (self, &ctx.kind) {
            (FunctionRep::RatPoly(p), CtxKind::Rational { x }) => {
                eval_upoly_at(kf, &p.embed(kf), x)
            }
            (FunctionRep::Hyp { a, b }, CtxKind::Hyp { x, y }) => {
                let sa = eval_upoly_at(kf, &a.embed(kf), x);
                let sb = eval_upoly_at(kf, &b.embed(kf), x);
                sa.add(&sb.mul(y))
            }
            (FunctionRep::PlaneForm { form, .. }, CtxKind::Plane { coords, .. }) => {
                let fe = form.embed(kf);
                let mut acc = Series::zero(kf, ctx.precision);
                for (e, c) in &fe.terms {
                    let mut t = Series::constant(kf, c.clone(), ctx.precision);
                    for (i, &k) in e.iter().enumerate() {
                        if k > 0 {
                            t = t.mul(&coords[i].pow(k as u64));
                        }
                    }
                    acc = acc.add(&t);
                }
                acc
            }
            _ => panic!("function representation does not match the expansion context"),
        }
    }

    pub fn fmt(&self, field: &Field) -> String {
        match self {
            FunctionRep::RatPoly(p) => p.fmt(field, "x"),
            FunctionRep::Hyp { a, b } => {
                if b.is_zero() {
                    a.fmt(field, "x")
                } else if a.is_zero() {
                    format!("({})*y", b.fmt(field, "x"))
                } else {
                    format!("{} + ({})*y", a.fmt(field, "x"), b.fmt(field, "x"))
                }
            }
            FunctionRep::PlaneForm { form, .. } => form.fmt(field, &["x", "y", "z"]),
        }
    }
}

/// Reduce a form modulo F, anchored at F's leading monomial under the
/// graded order with z > y > x. Since (F) is principal, {F} is a Groebner
/// basis for this order and the normal form is unique.
pub fn reduce_plane(model: &CurveModel, form: &MPoly) -> MPoly {
    let Family::PlaneSmooth { f } = &model.family else {
        panic!("reduce_plane on a non-plane model");
    };
    let field = &model.field;
    let (le, lc) = model.plane_lead();
    let mut cur = form.clone();
    loop {
        // largest term divisible by the leading monomial
        let hit = cur
            .terms
            .iter()
            .filter(|(e, _)| e.iter().zip(&le).all(|(a, b)| a >= b))
            .max_by_key(|(e, _)| (e[2], e[1], e[0]))
            .map(|(e, c)| (e.clone(), c.clone()));
        let Some((e, c)) = hit else {
            return cur;
        };
        let ratio = field.div(&c, &lc).unwrap();
        let shift: Vec<u32> = e.iter().zip(&le).map(|(a, b)| a - b).collect();
        // cur -= ratio * x^shift * F
        for (fe, fc) in &f.terms {
            let te: Vec<u32> = fe.iter().zip(&shift).map(|(a, b)| a + b).collect();
            cur.add_term(field, te, field.neg(&field.mul(fc, &ratio)));
        }
    }
}

/// The monomials of degree m in normal form modulo F (not divisible by the
/// leading monomial), in a fixed order.
fn plane_normal_monomials(model: &CurveModel, m: i64) -> Vec<Vec<u32>> {
    let (le, _) = model.plane_lead();
    let mut out = Vec::new();
    if m < 0 {
        return out;
    }
    let m = m as u32;
    for i in 0..=m {
        for j in 0..=(m - i) {
            let k = m - i - j;
            let e = vec![i, j, k];
            if !e.iter().zip(&le).all(|(a, b)| a >= b) {
                out.push(e);
            }
        }
    }
    out
}

/// Closed-form basis of H^0(m·base).
pub fn ambient_basis(model: &CurveModel, m: i64) -> Vec<FunctionRep> {
    let field = &model.field;
    match &model.family {
        Family::Rational => (0..=m)
            .map(|i| FunctionRep::RatPoly(UPoly::monomial(field, i as usize, field.one())))
            .collect(),
        Family::Hyperelliptic { f } => {
            let g = model.genus();
            let mut out = Vec::new();
            let mut i = 0;
            while 2 * i <= m {
                out.push(FunctionRep::Hyp {
                    a: UPoly::monomial(field, i as usize, field.one()),
                    b: UPoly::zero(),
                });
                i += 1;
            }
            let mut j = 0;
            while 2 * j + 2 * g + 1 <= m {
                out.push(FunctionRep::Hyp {
                    a: UPoly::zero(),
                    b: UPoly::monomial(field, j as usize, field.one()),
                });
                j += 1;
            }
            let _ = f;
            out
        }
        Family::PlaneSmooth { .. } => plane_normal_monomials(model, m)
            .into_iter()
            .map(|e| {
                let mut p = MPoly::zero(3);
                p.add_term(field, e, field.one());
                FunctionRep::PlaneForm { form: p, degree: m }
            })
            .collect(),
    }
}

/// Coordinates of a normal-form section in the ambient basis of
/// H^0(m·base). Panics if the section does not lie there.
pub fn ambient_coords(model: &CurveModel, rep: &FunctionRep, m: i64) -> Vec<El> {
    let field = &model.field;
    match (&model.family, rep) {
        (Family::Rational, FunctionRep::RatPoly(p)) => {
            assert!(p.degree() <= m, "section outside the ambient space");
            let mut v = vec![field.zero(); (m.max(-1) + 1) as usize];
            for (i, c) in p.coeffs.iter().enumerate() {
                v[i] = c.clone();
            }
            v
        }
        (Family::Hyperelliptic { .. }, FunctionRep::Hyp { a, b }) => {
            let g = model.genus();
            let nx = if m >= 0 { (m / 2 + 1) as usize } else { 0 };
            let ny = if m >= 2 * g + 1 {
                ((m - 2 * g - 1) / 2 + 1) as usize
            } else {
                0
            };
            assert!(a.coeffs.len() <= nx && b.coeffs.len() <= ny, "section outside ambient");
            let mut v = vec![field.zero(); nx + ny];
            for (i, c) in a.coeffs.iter().enumerate() {
                v[i] = c.clone();
            }
            for (j, c) in b.coeffs.iter().enumerate() {
                v[nx + j] = c.clone();
            }
            v
        }
        (Family::PlaneSmooth { .. }, FunctionRep::PlaneForm { form, degree }) => {
            assert!(form.is_zero() || *degree == m, "degree mismatch");
            let monos = plane_normal_monomials(model, m);
            let mut v = vec![field.zero(); monos.len()];
            for (e, c) in &form.terms {
                let idx = monos
                    .iter()
                    .position(|x| x == e)
                    .expect("section not in normal form");
                v[idx] = c.clone();
            }
            v
        }
        _ => panic!("function representation does not match the model"),
    }
}

fn linear_combo(
    model: &CurveModel,
    basis: &[FunctionRep],
    coeffs: &[El],
    m: i64,
) -> FunctionRep {
    let field = &model.field;
    let mut acc = FunctionRep::zero_of(model, m);
    for (b, c) in basis.iter().zip(coeffs) {
        if !field.is_zero(c) {
            acc = acc.add(field, &b.scale(field, c));
        }
    }
    acc
}

#[derive(Debug, Clone)]
pub struct RRSpace {
    pub divisor: DivisorSpec,
    pub ambient_bound: i64,
    pub basis: Vec<FunctionRep>,
}

impl RRSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// H^0(D) for a normalized divisor D = m·base − E: the subspace of
/// H^0(m·base) cut out by the vanishing conditions of E.
pub fn rr_space(model: &CurveModel, d: &DivisorSpec) -> Result<RRSpace, CurveError> {
    if !d.is_normalized() {
        return Err(CurveError::NormalizationError(
            "rr_space needs a normalized divisor; apply principal_shift first".into(),
        ));
    }
    let field = &model.field;
    let m = d.base_mult;
    let amb = ambient_basis(model, m);
    let n = amb.len();
    if d.conditions.is_empty() || n == 0 {
        return Ok(RRSpace {
            divisor: d.clone(),
            ambient_bound: m,
            basis: amb,
        });
    }
    // build the condition matrix: for each condition (P, k), the first k
    // series coefficients of each ambient section at P, flattened from
    // F_{p^e} to e rows over the base field
    let mut rows: Vec<Vec<El>> = Vec::new();
    for (p, k) in &d.conditions {
        if !model.contains(p) {
            return Err(CurveError::PointNotOnCurve);
        }
        let k = *k as usize;
        let ctx = model.expansion_ctx(p, k)?;
        let pf = &ctx.field;
        let e = pf.ext_degree();
        let mut block: Vec<Vec<El>> = vec![Vec::new(); k * e];
        for b in &amb {
            let s = b.expand(&ctx);
            for (ci, coeff) in s.coeffs.iter().enumerate() {
                for (fi, fc) in pf.flatten(coeff).into_iter().enumerate() {
                    block[ci * e + fi].push(fc);
                }
            }
        }
        rows.extend(block);
    }
    let mut mat = SparseMat::new(field.clone(), rows.len(), n);
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            mat.set(i, j, v.clone());
        }
    }
    let kernel = mat.kernel_basis();
    let basis = (0..kernel.ncols)
        .map(|j| {
            let coeffs: Vec<El> = (0..n).map(|i| kernel.get(i, j)).collect();
            linear_combo(model, &amb, &coeffs, m)
        })
        .collect();
    Ok(RRSpace {
        divisor: d.clone(),
        ambient_bound: m,
        basis,
    })
}

/// h^0 of an arbitrary divisor spec; positive parts away from the base
/// point are first removed by a principal shift.
pub fn h0(model: &CurveModel, d: &DivisorSpec) -> Result<usize, CurveError> {
    let (nd, _) = principal_shift(model, d)?;
    Ok(rr_space(model, &nd)?.dim())
}

/// h^0 of an effective divisor E (as a multiset of points with
/// multiplicities), via Riemann-Roch and Serre duality:
/// h^0(E) = deg E − g + 1 + h^0(K − E).
pub fn h0_effective(
    model: &CurveModel,
    e: &[(CurvePoint, i64)],
) -> Result<usize, CurveError> {
    assert!(e.iter().all(|(_, k)| *k > 0), "E must be effective");
    let mut k_minus_e = model.canonical_divisor();
    let mut deg_e = 0i64;
    let mut base_part = 0i64;
    for (p, k) in e {
        deg_e += k * p.residue_degree() as i64;
        if p.is_base_point() {
            base_part += k;
        } else {
            k_minus_e.conditions.push((p.clone(), *k));
        }
    }
    k_minus_e.base_mult -= base_part;
    let k_minus_e = DivisorSpec::new(k_minus_e.base_mult, k_minus_e.conditions)?;
    let h0k = if k_minus_e.degree(model) < 0 {
        0
    } else {
        rr_space(model, &k_minus_e)?.dim()
    };
    let g = model.genus();
    let v = deg_e - g + 1 + h0k as i64;
    assert!(v >= 0, "Riemann-Roch gave a negative h0");
    Ok(v as usize)
}

/// Normalize a divisor with positive parts away from the base point by
/// subtracting divisors of explicit functions. Returns the normalized
/// divisor and the accumulated multiplier h with
/// D_normalized = D − div(h) (so f ↦ f·h maps H^0(D_norm) into H^0(D)
/// viewed as rational sections).
pub fn principal_shift(
    model: &CurveModel,
    d: &DivisorSpec,
) -> Result<(DivisorSpec, FunctionRep), CurveError> {
    let field = &model.field;
    let mut cur = d.clone();
    cur = DivisorSpec::new(cur.base_mult, cur.conditions)
        .unwrap_or_else(|_| d.clone());
    let mut mult = FunctionRep::one(model);
    let mut guard = 0usize;
    while let Some((p, k)) = cur
        .conditions
        .iter()
        .find(|(_, k)| *k < 0)
        .map(|(p, k)| (p.clone(), *k))
    {
        guard += 1;
        if guard > 10_000 {
            return Err(CurveError::ShiftFailure("shift did not terminate".into()));
        }
        if p.residue_degree() != 1 {
            return Err(CurveError::ShiftFailure(format!(
                "positive part at a point of residue degree {} at {}",
                p.residue_degree(),
                p.fmt()
            )));
        }
        let reps = -k; // number of single-point shifts needed
        match (&model.family, &p.coords) {
            (Family::Rational, PointCoords::RatAff(a)) => {
                // div(x − a) = (a) − Pinf
                let lin = UPoly::new(field, vec![field.neg(a), field.one()]);
                let shift = DivisorSpec {
                    base_mult: -reps,
                    conditions: vec![(p.clone(), -reps)],
                };
                cur = cur.sub(&shift);
                let mut h = UPoly::constant(field, field.one());
                for _ in 0..reps {
                    h = h.mul(field, &lin);
                }
                mult = mult.mul(model, &FunctionRep::RatPoly(h));
            }
            (Family::Hyperelliptic { .. }, PointCoords::HypAff(a, b)) => {
                // div(x − a) = (a,b) + (a,−b) − 2 Pinf  (the two collide at
                // a Weierstrass point, where div(x − a) = 2(a,0) − 2 Pinf)
                let conj = CurvePoint::hyp_aff(&p.field, a.clone(), field.neg(b));
                let shift = if field.is_zero(b) {
                    DivisorSpec {
                        base_mult: -2 * reps,
                        conditions: vec![(p.clone(), -2 * reps)],
                    }
                } else {
                    DivisorSpec {
                        base_mult: -2 * reps,
                        conditions: vec![(p.clone(), -reps), (conj, -reps)],
                    }
                };
                cur = cur.sub(&shift);
                let lin = UPoly::new(field, vec![field.neg(a), field.one()]);
                let mut h = UPoly::constant(field, field.one());
                for _ in 0..reps {
                    h = h.mul(field, &lin);
                }
                mult = mult.mul(
                    model,
                    &FunctionRep::Hyp {
                        a: h,
                        b: UPoly::zero(),
                    },
                );
            }
            (Family::PlaneSmooth { .. }, PointCoords::Plane(xyz)) => {
                // one shift at a time: P ~ 1·H − residual(line through P)
                let (line, residual) = line_residual(model, &p, xyz)?;
                let shift = DivisorSpec {
                    base_mult: -1,
                    conditions: residual
                        .iter()
                        .map(|(q, k)| (q.clone(), -k))
                        .chain(std::iter::once((p.clone(), -1i64)))
                        .collect(),
                };
                cur = cur.sub(&shift);
                mult = mult.mul(
                    model,
                    &FunctionRep::PlaneForm {
                        form: line,
                        degree: 1,
                    },
                );
            }
            _ => {
                return Err(CurveError::ShiftFailure(format!(
                    "unsupported point {} for this family",
                    p.fmt()
                )))
            }
        }
    }
    let nd = DivisorSpec::new(cur.base_mult, cur.conditions)?;
    Ok((nd, mult))
}

/// A line through the rational point P, and the residual intersection
/// divisor line ∩ C − P (d − 1 points counted with multiplicity).
fn line_residual(
    model: &CurveModel,
    p: &CurvePoint,
    xyz: &[El; 3],
) -> Result<(MPoly, Vec<(CurvePoint, i64)>), CurveError> {
    let field = &model.field;
    let Family::PlaneSmooth { f } = &model.family else {
        unreachable!()
    };
    // line coefficients: cross product of P with the first standard basis
    // vector not parallel to it
    let cross = |a: &[El; 3], b: &[El; 3]| -> [El; 3] {
        [
            field.sub(&field.mul(&a[1], &b[2]), &field.mul(&a[2], &b[1])),
            field.sub(&field.mul(&a[2], &b[0]), &field.mul(&a[0], &b[2])),
            field.sub(&field.mul(&a[0], &b[1]), &field.mul(&a[1], &b[0])),
        ]
    };
    let basis_vecs = [
        [field.one(), field.zero(), field.zero()],
        [field.zero(), field.one(), field.zero()],
        [field.zero(), field.zero(), field.one()],
    ];
    let mut line_coeffs = None;
    for e in &basis_vecs {
        let c = cross(xyz, e);
        if c.iter().any(|v| !field.is_zero(v)) {
            line_coeffs = Some(c);
            break;
        }
    }
    let lc = line_coeffs.expect("nonzero point has a line through it");
    let mut line = MPoly::zero(3);
    for (i, c) in lc.iter().enumerate() {
        let mut e = vec![0u32; 3];
        e[i] = 1;
        line.add_term(field, e, c.clone());
    }
    // parameterize the line: points s·P + u·B for a second point B on it
    let b = second_point_on_line(field, &lc, xyz);
    // restrict F: binary form in (s, u) of degree d
    let d = f.total_degree() as usize;
    let subs: Vec<UPoly> = (0..3)
        .map(|i| UPoly::new(field, vec![b[i].clone(), xyz[i].clone()]))
        .collect();
    let restricted = f.compose_univariate(field, &subs); // polynomial in s (u = 1)
    // roots of `restricted` are intersection points s·P + B; the point P
    // itself corresponds to u = 0, i.e. the degree drop of `restricted`
    let mult_at_p = d as i64 - restricted.degree().max(0);
    assert!(mult_at_p >= 1, "P must lie on its own line");
    let mut residual: Vec<(CurvePoint, i64)> = Vec::new();
    if mult_at_p > 1 {
        residual.push((p.clone(), mult_at_p - 1));
    }
    let mut found = mult_at_p;
    if !restricted.is_zero() && restricted.degree() >= 1 {
        match field {
            Field::Rationals => {
                for (r, m) in restricted.rational_roots(field) {
                    let q = line_point(field, xyz, &b, &r);
                    add_residual(model, p, q, m as i64, &mut residual);
                    found += m as i64;
                }
            }
            Field::Prime(prime) => {
                let dr = restricted.degree() as usize;
                for e in 1..=dr.min(4) {
                    if found >= d as i64 {
                        break;
                    }
                    let kf = if e == 1 {
                        field.clone()
                    } else {
                        Field::extension_of_degree(*prime, e).expect("extension")
                    };
                    let re = restricted.embed(&kf);
                    let mut seen: Vec<El> = Vec::new();
                    for (r, m) in re.roots_with_multiplicity(&kf) {
                        // keep one representative per Frobenius orbit of
                        // exact degree e
                        let mut orbit = vec![r.clone()];
                        let mut cur = kf.frobenius(&r);
                        while cur != r {
                            orbit.push(cur.clone());
                            cur = kf.frobenius(&cur);
                        }
                        if orbit.len() != e {
                            continue;
                        }
                        let rep = orbit.iter().min().unwrap().clone();
                        if seen.contains(&rep) {
                            continue;
                        }
                        seen.push(rep.clone());
                        let xyz_e: [El; 3] = [
                            kf.embed(&xyz[0]),
                            kf.embed(&xyz[1]),
                            kf.embed(&xyz[2]),
                        ];
                        let b_e: [El; 3] =
                            [kf.embed(&b[0]), kf.embed(&b[1]), kf.embed(&b[2])];
                        let q = line_point(&kf, &xyz_e, &b_e, &rep);
                        add_residual(model, p, q, m as i64, &mut residual);
                        found += (m * e) as i64;
                    }
                }
            }
            Field::Ext { .. } => {
                return Err(CurveError::ShiftFailure(
                    "plane shifts need a prime base field or Q".into(),
                ))
            }
        }
    }
    if found != d as i64 {
        return Err(CurveError::ShiftFailure(format!(
            "residual intersection of the line through {} has an irrational point \
             (found degree {found} of {d})",
            p.fmt()
        )));
    }
    Ok((line, residual))
}

fn line_point(field: &Field, p: &[El; 3], b: &[El; 3], s: &El) -> CurvePoint {
    let xyz = [
        field.add(&field.mul(s, &p[0]), &b[0]),
        field.add(&field.mul(s, &p[1]), &b[1]),
        field.add(&field.mul(s, &p[2]), &b[2]),
    ];
    CurvePoint::plane(field, xyz)
}

fn add_residual(
    model: &CurveModel,
    p: &CurvePoint,
    q: CurvePoint,
    m: i64,
    residual: &mut Vec<(CurvePoint, i64)>,
) {
    debug_assert!(model.contains(&q));
    // the root at s with q == p cannot happen (P is at u = 0), but guard
    if q.field == p.field && q.coords == p.coords {
        residual.push((q, m));
        return;
    }
    residual.push((q, m));
}

/// Second point on the line with coefficients lc, independent from P.
fn second_point_on_line(field: &Field, lc: &[El; 3], p: &[El; 3]) -> [El; 3] {
    // try cross products of lc with standard basis vectors
    let cross = |a: &[El; 3], b: &[El; 3]| -> [El; 3] {
        [
            field.sub(&field.mul(&a[1], &b[2]), &field.mul(&a[2], &b[1])),
            field.sub(&field.mul(&a[2], &b[0]), &field.mul(&a[0], &b[2])),
            field.sub(&field.mul(&a[0], &b[1]), &field.mul(&a[1], &b[0])),
        ]
    };
    let basis_vecs = [
        [field.one(), field.zero(), field.zero()],
        [field.zero(), field.one(), field.zero()],
        [field.zero(), field.zero(), field.one()],
    ];
    for e in &basis_vecs {
        let c = cross(lc, e);
        if c.iter().any(|v| !field.is_zero(v)) {
            // c is on the line; make sure it is not P itself (projectively)
            let indep = (0..3).any(|i| {
                (0..3).any(|j| {
                    !field.is_zero(&field.sub(
                        &field.mul(&c[i], &p[j]),
                        &field.mul(&c[j], &p[i]),
                    ))
                })
            });
            if indep {
                return c;
            }
        }
    }
    unreachable!("a projective line contains more than one point");
}

/// Structure constants of H^0(D1) x H^0(D2) -> H^0(D1 + D2):
/// out[i][j] = coordinates of v_i · w_j in the target basis.
pub struct MultMap {
    pub target: RRSpace,
    pub table: Vec<Vec<Vec<El>>>,
}

pub fn mult_map(
    model: &CurveModel,
    v: &RRSpace,
    w: &RRSpace,
    target: &RRSpace,
) -> Result<MultMap, CurveError> {
    let field = &model.field;
    let m = target.ambient_bound;
    assert_eq!(
        m,
        v.ambient_bound + w.ambient_bound,
        "target ambient bound must be the sum"
    );
    // matrix whose columns are the target basis in ambient coordinates
    let amb_dim = ambient_basis(model, m).len();
    let mut a = SparseMat::new(field.clone(), amb_dim, target.dim());
    for (j, t) in target.basis.iter().enumerate() {
        for (i, c) in ambient_coords(model, t, m).into_iter().enumerate() {
            if !field.is_zero(&c) {
                a.set(i, j, c);
            }
        }
    }
    let mut table = Vec::with_capacity(v.dim());
    for vi in &v.basis {
        let mut row = Vec::with_capacity(w.dim());
        for wj in &w.basis {
            let prod = vi.mul(model, wj);
            let b = ambient_coords(model, &prod, m);
            let coords = a.solve(&b).ok_or_else(|| {
                CurveError::NormalizationError(
                    "product does not lie in the target space (bookkeeping bug)".into(),
                )
            })?;
            row.push(coords);
        }
        table.push(row);
    }
    Ok(MultMap {
        target: target.clone(),
        table,
    })
}

/// Exact linear equivalence of two divisor classes: D1 ~ D2 iff
/// deg(D1 − D2) = 0 and h^0(D1 − D2) = 1.
pub fn is_linearly_equivalent(
    model: &CurveModel,
    d1: &DivisorSpec,
    d2: &DivisorSpec,
) -> Result<bool, CurveError> {
    if d1.degree(model) != d2.degree(model) {
        return Ok(false);
    }
    let diff = d1.sub(d2);
    Ok(h0(model, &diff)? == 1)
}

#[cfg(test)]
mod tests {
    use super::*;

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
    fn ambient_basis_dims() {
        let f = q();
        let c = hyp_g2(&f);
        assert_eq!(ambient_basis(&c, 4).len(), 3); // 1, x, x^2
        assert_eq!(ambient_basis(&c, 5).len(), 4); // 1, x, x^2, y
        let k = klein(&f);
        assert_eq!(ambient_basis(&k, 2).len(), 6);
        // Riemann-Roch for large m: m deg(base) - g + 1
        assert_eq!(ambient_basis(&c, 9).len(), 8);
        assert_eq!(ambient_basis(&k, 8).len(), 30);
        let r = CurveModel::rational(f);
        assert_eq!(ambient_basis(&r, 7).len(), 8);
    }

    #[test]
    fn rr_space_with_condition() {
        let f = q();
        let c = hyp_g2(&f);
        let p = CurvePoint::hyp_aff(&f, f.one(), f.zero());
        let d = DivisorSpec::new(4, vec![(p, 1)]).unwrap();
        let s = rr_space(&c, &d).unwrap();
        assert_eq!(s.dim(), 2); // deg 3 > 2g-2 => 3 - 2 + 1
    }

    #[test]
    fn rr_space_trivial() {
        let f = q();
        let c = hyp_g2(&f);
        let s = rr_space(&c, &DivisorSpec::of_base(0)).unwrap();
        assert_eq!(s.dim(), 1);
    }

    #[test]
    fn rr_space_klein_lines_through_point() {
        let f = q();
        let k = klein(&f);
        let p = CurvePoint::plane(&f, [f.one(), f.zero(), f.zero()]);
        let d = DivisorSpec::new(1, vec![(p, 1)]).unwrap();
        assert_eq!(rr_space(&k, &d).unwrap().dim(), 2);
    }

    #[test]
    fn h0_of_bicanonical() {
        let f = q();
        assert_eq!(h0(&hyp_g2(&f), &DivisorSpec::of_base(4)).unwrap(), 3);
        assert_eq!(h0(&klein(&f), &DivisorSpec::of_base(2)).unwrap(), 6);
        let r = CurveModel::rational(f);
        for m in 0..5 {
            assert_eq!(h0(&r, &DivisorSpec::of_base(m)).unwrap(), (m + 1) as usize);
        }
    }

    #[test]
    fn canonical_consistency() {
        let f = q();
        for c in [hyp_g2(&f), klein(&f)] {
            let k = c.canonical_divisor();
            assert_eq!(h0(&c, &k).unwrap() as i64, c.genus());
            assert_eq!(k.degree(&c), 2 * c.genus() - 2);
        }
    }

    #[test]
    fn h0_effective_conjugate_pair() {
        let f = q();
        let c = hyp_g2(&f);
        // (0, b) with b^2 = -1 is not rational over Q; use (2, b): 2^5-1=31
        // not square. Use F_13 where f(0) = -1 = 5^2.
        let f13 = Field::prime(13).unwrap();
        let c13 = hyp_g2(&f13);
        let p = CurvePoint::hyp_aff(&f13, f13.zero(), f13.from_i64(5));
        let pc = p.hyperelliptic_conjugate();
        assert_eq!(
            h0_effective(&c13, &[(p.clone(), 1), (pc, 1)]).unwrap(),
            2
        );
        assert_eq!(h0_effective(&c13, &[(p, 1)]).unwrap(), 1);
        // over Q, a Weierstrass point doubled is also the g^1_2
        let w = CurvePoint::hyp_aff(&f, f.one(), f.zero());
        assert_eq!(h0_effective(&c, &[(w, 2)]).unwrap(), 2);
    }

    #[test]
    fn klein_residual_pencil_over_f11() {
        let f = Field::prime(11).unwrap();
        let k = klein(&f);
        let p = CurvePoint::plane(&f, [f.one(), f.zero(), f.zero()]);
        // shift the positive single point: P ~ H - residual
        let d = DivisorSpec {
            base_mult: 0,
            conditions: vec![(p.clone(), -1)],
        };
        let (nd, _h) = principal_shift(&k, &d).unwrap();
        assert_eq!(nd.base_mult, 1);
        assert_eq!(nd.degree(&k), 1);
        assert!(nd.is_normalized());
        // h^0(P) = 1 on a positive-genus curve
        assert_eq!(rr_space(&k, &nd).unwrap().dim(), 1);
        // the residual (3 points) moves in the pencil of lines: h^0 = 2
        let e: Vec<(CurvePoint, i64)> = nd.conditions.clone();
        assert_eq!(h0_effective(&k, &e).unwrap(), 2);
    }

    #[test]
    fn principal_shift_hyperelliptic_examples() {
        let f13 = Field::prime(13).unwrap();
        let c = hyp_g2(&f13);
        let p = CurvePoint::hyp_aff(&f13, f13.zero(), f13.from_i64(5));
        let d = DivisorSpec {
            base_mult: 0,
            conditions: vec![(p.clone(), -1)],
        };
        let (nd, h) = principal_shift(&c, &d).unwrap();
        assert_eq!(nd.base_mult, 2);
        assert_eq!(nd.conditions.len(), 1);
        assert_eq!(nd.conditions[0].0.coords, p.hyperelliptic_conjugate().coords);
        // multiplier is x - 0 = x
        if let FunctionRep::Hyp { a, b } = &h {
            assert_eq!(a.degree(), 1);
            assert!(b.is_zero());
        } else {
            panic!("wrong rep");
        }
        // Weierstrass point: D' = 2 Pinf - (a, 0)
        let w = CurvePoint::hyp_aff(&f13, f13.one(), f13.zero());
        let dw = DivisorSpec {
            base_mult: 0,
            conditions: vec![(w.clone(), -1)],
        };
        let (ndw, _) = principal_shift(&c, &dw).unwrap();
        assert_eq!(ndw.base_mult, 2);
        assert_eq!(ndw.conditions, vec![(w, 1)]);
    }

    #[test]
    fn mult_map_monomials() {
        let f = q();
        let c = hyp_g2(&f);
        let v = rr_space(&c, &DivisorSpec::of_base(2)).unwrap();
        assert_eq!(v.dim(), 2); // {1, x}
        let t = rr_space(&c, &DivisorSpec::of_base(4)).unwrap();
        let mm = mult_map(&c, &v, &v, &t).unwrap();
        // x * x = x^2: third target coordinate 1
        let xx = &mm.table[1][1];
        assert!(f.is_one(&xx[2]));
        assert!(f.is_zero(&xx[0]) && f.is_zero(&xx[1]));
    }

    #[test]
    fn linear_equivalence_bicanonical() {
        let f = q();
        let c = hyp_g2(&f);
        let omega2 = c.canonical_divisor().scaled(2);
        assert!(is_linearly_equivalent(&c, &DivisorSpec::of_base(4), &omega2).unwrap());
        assert!(!is_linearly_equivalent(&c, &DivisorSpec::of_base(3), &omega2).unwrap());
        // 2*(a,0) ~ 2*Pinf for a Weierstrass point but (a,0)+(b,0) for
        // distinct Weierstrass points is NOT 2*Pinf
        let f11 = Field::prime(11).unwrap();
        let c11 = hyp_g2(&f11);
        let w1 = CurvePoint::hyp_aff(&f11, f11.one(), f11.zero());
        let d1 = DivisorSpec {
            base_mult: 0,
            conditions: vec![(w1.clone(), -2)],
        };
        assert!(is_linearly_equivalent(&c11, &d1, &DivisorSpec::of_base(2)).unwrap());
        // 5 | 10, so x^5 - 1 splits over F_11; 3^5 = 243 = 1 mod 11
        let three = f11.from_i64(3);
        let is_root = f11.is_zero(&f11.sub(&f11.pow(&three, 5), &f11.one()));
        assert!(is_root);
        let w2 = CurvePoint::hyp_aff(&f11, three, f11.zero());
        let d2 = DivisorSpec {
            base_mult: 0,
            conditions: vec![(w1, -1), (w2, -1)],
        };
        assert!(!is_linearly_equivalent(&c11, &d2, &DivisorSpec::of_base(2)).unwrap());
    }

    #[test]
    fn rr_dimension_law_spot_checks() {
        // h0(D) = deg D - g + 1 whenever deg D > 2g - 2
        let f = q();
        let c = hyp_g2(&f);
        let w = CurvePoint::hyp_aff(&f, f.one(), f.zero());
        for m in 3..8 {
            for k in 0..3 {
                let d = DivisorSpec::new(m, vec![(w.clone(), k)]).unwrap();
                let deg = d.degree(&c);
                if deg > 2 {
                    assert_eq!(
                        rr_space(&c, &d).unwrap().dim() as i64,
                        deg - 2 + 1,
                        "m={m} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn extension_point_conditions() {
        // conditions at a residue-degree-2 point impose 2 conditions over F_p
        let f = Field::prime(11).unwrap();
        let c = hyp_g2(&f);
        let pts = c.enumerate_closed_points(2).unwrap();
        let p2 = pts
            .iter()
            .find(|p| p.residue_degree() == 2)
            .expect("degree-2 point exists");
        let d = DivisorSpec::new(8, vec![(p2.clone(), 1)]).unwrap();
        // deg = 8 - 2 = 6 > 2g-2 = 2 => h0 = 6 - 2 + 1 = 5
        assert_eq!(rr_space(&c, &d).unwrap().dim(), 5);
    }
}
