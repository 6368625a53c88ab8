use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::KnotVector;
use crate::error::{Error, Result};

/// Weighted control point. Coordinates in metres, weight dimensionless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub w: f64,
}

impl ControlPoint {
    pub fn new(x: f64, y: f64, z: f64, w: f64) -> Self {
        ControlPoint { x, y, z, w }
    }

    pub fn planar(x: f64, y: f64, w: f64) -> Self {
        ControlPoint { x, y, z: 0.0, w }
    }

    pub fn xyz(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub(crate) fn homogeneous(&self) -> [f64; 4] {
        [self.x * self.w, self.y * self.w, self.z * self.w, self.w]
    }

    pub(crate) fn from_homogeneous(h: [f64; 4]) -> Self {
        ControlPoint {
            x: h[0] / h[3],
            y: h[1] / h[3],
            z: h[2] / h[3],
            w: h[3],
        }
    }

    pub fn distance(&self, other: &ControlPoint) -> f64 {
        let d = [self.x - other.x, self.y - other.y, self.z - other.z];
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }
}

impl Serialize for ControlPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.x, self.y, self.z, self.w].serialize(s)
    }
}

impl<'de> Deserialize<'de> for ControlPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [x, y, z, w] = <[f64; 4]>::deserialize(d)?;
        if !(w > 0.0) {
            return Err(serde::de::Error::custom(format!(
                "weight must be positive, got {w}"
            )));
        }
        Ok(ControlPoint { x, y, z, w })
    }
}

/// Rational B-spline curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurveDoc", into = "CurveDoc")]
pub struct NurbsCurve {
    knots: KnotVector,
    points: Vec<ControlPoint>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveDoc {
    degree: usize,
    knots: Vec<f64>,
    points: Vec<ControlPoint>,
}

impl TryFrom<CurveDoc> for NurbsCurve {
    type Error = Error;
    fn try_from(doc: CurveDoc) -> Result<Self> {
        NurbsCurve::new(KnotVector::new(doc.knots, doc.degree)?, doc.points)
    }
}

impl From<NurbsCurve> for CurveDoc {
    fn from(c: NurbsCurve) -> Self {
        CurveDoc {
            degree: c.knots.degree(),
            knots: c.knots.values().to_vec(),
            points: c.points,
        }
    }
}

impl NurbsCurve {
    pub fn new(knots: KnotVector, points: Vec<ControlPoint>) -> Result<Self> {
        if points.len() != knots.num_basis() {
            return Err(Error::Construction(format!(
                "{} control points for {} basis functions",
                points.len(),
                knots.num_basis()
            )));
        }
        if let Some(p) = points.iter().find(|p| !(p.w > 0.0)) {
            return Err(Error::Construction(format!("non-positive weight {}", p.w)));
        }
        Ok(NurbsCurve { knots, points })
    }

    /// Single-span Bezier curve of degree `points.len() - 1` on [0, 1].
    pub fn bezier(points: Vec<ControlPoint>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Construction(
                "Bezier curve needs two or more points".into(),
            ));
        }
        let p = points.len() - 1;
        NurbsCurve::new(KnotVector::open_uniform(p, 1), points)
    }

    pub fn knots(&self) -> &KnotVector {
        &self.knots
    }

    pub fn degree(&self) -> usize {
        self.knots.degree()
    }

    pub fn points(&self) -> &[ControlPoint] {
        &self.points
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knots.first(), self.knots.last())
    }

    /// First and last control points coincide (relative tolerance 1e-12).
    pub fn is_closed(&self) -> bool {
        let a = self.points[0];
        let b = self.points[self.points.len() - 1];
        a.distance(&b) <= 1e-12 * self.extent().max(f64::MIN_POSITIVE)
    }

    /// Diagonal of the control polygon's bounding box.
    pub fn extent(&self) -> f64 {
        bounding_diagonal(self.points.iter())
    }

    pub fn eval(&self, u: f64) -> Result<[f64; 3]> {
        Ok(self.derivatives(u, 0)?[0])
    }

    /// Position and parametric derivatives up to `n` at `u`.
    pub fn derivatives(&self, u: f64, n: usize) -> Result<Vec<[f64; 3]>> {
        let p = self.degree();
        let (span, ders) = self.knots.basis_and_derivatives(u, n)?;
        let mut aders = vec![[0.0; 4]; n + 1];
        for (k, row) in ders.iter().enumerate() {
            for (j, &nb) in row.iter().enumerate() {
                let h = self.points[span - p + j].homogeneous();
                for c in 0..4 {
                    aders[k][c] += nb * h[c];
                }
            }
        }
        Ok(rational_curve_derivatives(&aders))
    }

    /// Inserts `u` once. Geometry is unchanged.
    pub fn insert_knot(&self, u: f64) -> Result<Self> {
        let hom: Vec<[f64; 4]> = self.points.iter().map(|p| p.homogeneous()).collect();
        let (knots, hom) = insert_knot_homogeneous(&self.knots, &hom, u)?;
        NurbsCurve::new(
            knots,
            hom.into_iter()
                .map(ControlPoint::from_homogeneous)
                .collect(),
        )
    }

    /// Raises the degree by one, keeping the geometry and the continuity at every knot.
    pub fn elevate(&self) -> Result<Self> {
        let hom: Vec<[f64; 4]> = self.points.iter().map(|p| p.homogeneous()).collect();
        let (knots, hom) = elevate_homogeneous(&self.knots, &hom)?;
        NurbsCurve::new(
            knots,
            hom.into_iter()
                .map(ControlPoint::from_homogeneous)
                .collect(),
        )
    }

    pub fn elevate_to(&self, degree: usize) -> Result<Self> {
        let mut c = self.clone();
        while c.degree() < degree {
            c = c.elevate()?;
        }
        Ok(c)
    }

    /// Same curve with the parameter domain mapped affinely onto [lo, hi].
    pub fn remapped(&self, lo: f64, hi: f64) -> Self {
        NurbsCurve {
            knots: self.knots.remapped(lo, hi),
            points: self.points.clone(),
        }
    }

    /// Same curve traversed in the opposite direction.
    pub fn reversed(&self) -> Self {
        let (a, b) = self.domain();
        let mut values: Vec<f64> = self.knots.values().iter().map(|&v| a + b - v).collect();
        values.reverse();
        let mut points = self.points.clone();
        points.reverse();
        NurbsCurve {
            knots: KnotVector::new(values, self.degree()).expect("reversal preserves validity"),
            points,
        }
    }
}

pub(crate) fn bounding_diagonal<'a>(points: impl Iterator<Item = &'a ControlPoint>) -> f64 {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in points {
        for (c, v) in p.xyz().into_iter().enumerate() {
            lo[c] = lo[c].min(v);
            hi[c] = hi[c].max(v);
        }
    }
    (0..3).map(|c| (hi[c] - lo[c]).powi(2)).sum::<f64>().sqrt()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Quotient rule on homogeneous derivatives `[wx, wy, wz, w]`.
pub(crate) fn rational_curve_derivatives(aders: &[[f64; 4]]) -> Vec<[f64; 3]> {
    let n = aders.len() - 1;
    let mut ck = vec![[0.0; 3]; n + 1];
    for k in 0..=n {
        let mut v = [aders[k][0], aders[k][1], aders[k][2]];
        for i in 1..=k {
            let b = binomial(k, i) * aders[i][3];
            for c in 0..3 {
                v[c] -= b * ck[k - i][c];
            }
        }
        for c in 0..3 {
            ck[k][c] = v[c] / aders[0][3];
        }
    }
    ck
}

/// Boehm single knot insertion on homogeneous control points.
pub(crate) fn insert_knot_homogeneous(
    knots: &KnotVector,
    hom: &[[f64; 4]],
    u: f64,
) -> Result<(KnotVector, Vec<[f64; 4]>)> {
    let p = knots.degree();
    if !(u > knots.first() && u < knots.last()) {
        return Err(Error::Domain {
            value: u,
            lo: knots.first(),
            hi: knots.last(),
        });
    }
    if knots.multiplicity(u) >= p {
        return Err(Error::KnotVector(format!(
            "knot {u} already has multiplicity {p}"
        )));
    }
    let k = knots.find_span(u)?;
    let t = knots.values();
    let mut out = Vec::with_capacity(hom.len() + 1);
    for i in 0..=hom.len() {
        if i + p <= k {
            out.push(hom[i]);
        } else if i > k {
            out.push(hom[i - 1]);
        } else {
            let alpha = (u - t[i]) / (t[i + p] - t[i]);
            let mut q = [0.0; 4];
            for c in 0..4 {
                q[c] = alpha * hom[i][c] + (1.0 - alpha) * hom[i - 1][c];
            }
            out.push(q);
        }
    }
    Ok((knots.with_inserted(u), out))
}

/// Degree elevation by interpolation at the Greville abscissae of the elevated basis.
///
/// The elevated space contains the original curve, so collocation reproduces it exactly.
pub(crate) fn elevate_homogeneous(
    knots: &KnotVector,
    hom: &[[f64; 4]],
) -> Result<(KnotVector, Vec<[f64; 4]>)> {
    let new_knots = knots.elevated();
    let sites = new_knots.greville();
    let n = new_knots.num_basis();
    let p_old = knots.degree();
    let p_new = new_knots.degree();
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut rhs = DMatrix::<f64>::zeros(n, 4);
    for (r, &s) in sites.iter().enumerate() {
        let (span, vals) = new_knots.basis(s)?;
        for (j, v) in vals.iter().enumerate() {
            a[(r, span - p_new + j)] = *v;
        }
        let (span_o, vals_o) = knots.basis(s)?;
        for (j, v) in vals_o.iter().enumerate() {
            for c in 0..4 {
                rhs[(r, c)] += v * hom[span_o - p_old + j][c];
            }
        }
    }
    let lu = a.lu();
    let mut out = Vec::with_capacity(n);
    let sol: Vec<DVector<f64>> = (0..4)
        .map(|c| {
            lu.solve(&rhs.column(c).into_owned()).ok_or_else(|| {
                Error::Construction("singular collocation in degree elevation".into())
            })
        })
        .collect::<Result<_>>()?;
    for i in 0..n {
        out.push([sol[0][i], sol[1][i], sol[2][i], sol[3][i]]);
    }
    // end points are interpolatory; pin them to remove rounding
    out[0] = hom[0];
    out[n - 1] = hom[hom.len() - 1];
    Ok((new_knots, out))
}

/// Rational quadratic arc of a circle (or, scaled, an ellipse) centred at `center`,
/// spanning angles `[a0, a1]` with `a1 - a0 < pi`.
pub fn conic_arc(center: [f64; 2], rx: f64, ry: f64, a0: f64, a1: f64) -> Result<NurbsCurve> {
    let half = 0.5 * (a1 - a0);
    if !(half > 0.0 && half < std::f64::consts::FRAC_PI_2) {
        return Err(Error::Construction("arc sweep must lie in (0, pi)".into()));
    }
    let mid = 0.5 * (a0 + a1);
    let w = half.cos();
    let pt = |a: f64, scale: f64| {
        [
            center[0] + rx * scale * a.cos(),
            center[1] + ry * scale * a.sin(),
        ]
    };
    let p0 = pt(a0, 1.0);
    let p1 = pt(mid, 1.0 / w);
    let p2 = pt(a1, 1.0);
    NurbsCurve::bezier(vec![
        ControlPoint::planar(p0[0], p0[1], 1.0),
        ControlPoint::planar(p1[0], p1[1], w),
        ControlPoint::planar(p2[0], p2[1], 1.0),
    ])
}

/// Joins curves of equal degree end to end into one C0 curve on [0, 1]; each piece
/// occupies an equal share of the domain.
pub fn join_c0(pieces: &[NurbsCurve]) -> Result<NurbsCurve> {
    let first = pieces
        .first()
        .ok_or_else(|| Error::Construction("nothing to join".into()))?;
    let p = first.degree();
    let n = pieces.len() as f64;
    let mut values = vec![0.0; p + 1];
    let mut points: Vec<ControlPoint> = Vec::new();
    for (i, piece) in pieces.iter().enumerate() {
        if piece.degree() != p {
            return Err(Error::Construction(
                "joined pieces must share a degree".into(),
            ));
        }
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        let r = piece.remapped(lo, hi);
        let inner = &r.knots().values()[p + 1..r.knots().values().len() - p - 1];
        if i > 0 {
            let last = points.last().copied().expect("non-empty");
            let start = piece.points()[0];
            if last.distance(&start) > 1e-9 * piece.extent().max(1.0) {
                return Err(Error::Construction(format!(
                    "piece {i} does not start where piece {} ends",
                    i - 1
                )));
            }
            // weights must agree at the shared point
            let ratio = last.w / start.w;
            let mut scaled: Vec<ControlPoint> = piece
                .points()
                .iter()
                .map(|q| ControlPoint {
                    w: q.w * ratio,
                    ..*q
                })
                .collect();
            scaled.remove(0);
            values.extend(std::iter::repeat_n(lo, p));
            values.extend_from_slice(inner);
            points.extend(scaled);
        } else {
            values.extend_from_slice(inner);
            points.extend_from_slice(piece.points());
        }
    }
    values.extend(std::iter::repeat_n(1.0, p + 1));
    NurbsCurve::new(KnotVector::new(values, p)?, points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn quarter_circle_lies_on_circle() {
        // weight 0.707 as printed is not exactly cos 45; use the exact weight here
        let c = conic_arc([1.0, -2.0], 3.0, 3.0, 0.0, FRAC_PI_2).unwrap();
        for i in 0..=1000 {
            let p = c.eval(i as f64 / 1000.0).unwrap();
            let r = ((p[0] - 1.0).powi(2) + (p[1] + 2.0).powi(2)).sqrt();
            assert!((r - 3.0).abs() < 1e-10);
        }
        assert!((c.points()[1].w - FRAC_PI_4.cos()).abs() < 1e-15);
    }

    #[test]
    fn insertion_and_elevation_preserve_geometry() {
        let arcs: Vec<NurbsCurve> = (0..4)
            .map(|i| {
                let a = FRAC_PI_4 + i as f64 * FRAC_PI_2;
                conic_arc([0.0, 0.0], 2.0, 1.0, a, a + FRAC_PI_2).unwrap()
            })
            .collect();
        let c = join_c0(&arcs).unwrap();
        let refined = c.insert_knot(0.1).unwrap().insert_knot(0.6).unwrap();
        let elevated = refined.elevate().unwrap();
        assert_eq!(elevated.degree(), 3);
        for i in 0..=97 {
            let u = i as f64 / 97.0;
            let a = c.eval(u).unwrap();
            for other in [&refined, &elevated] {
                let b = other.eval(u).unwrap();
                for k in 0..3 {
                    assert!((a[k] - b[k]).abs() < 1e-12, "u={u}");
                }
            }
        }
    }

    #[test]
    fn rational_derivative_matches_finite_difference() {
        let c = conic_arc([0.0, 0.0], 1.5, 0.7, 0.2, 2.0)
            .unwrap()
            .elevate()
            .unwrap();
        let h = 1e-6;
        for i in 1..20 {
            let u = i as f64 / 20.0;
            let d = c.derivatives(u, 2).unwrap();
            let p = c.eval(u + h).unwrap();
            let m = c.eval(u - h).unwrap();
            for k in 0..2 {
                let fd = (p[k] - m[k]) / (2.0 * h);
                assert!((fd - d[1][k]).abs() <= 1e-6 * d[1][k].abs().max(1.0));
                let fd2 = (p[k] - 2.0 * d[0][k] + m[k]) / (h * h);
                assert!((fd2 - d[2][k]).abs() <= 1e-3 * d[2][k].abs().max(1.0));
            }
        }
    }

    #[test]
    fn reversal_traverses_backwards() {
        let c = conic_arc([0.0, 0.0], 1.0, 1.0, 0.0, 1.0).unwrap();
        let r = c.reversed();
        let a = c.eval(0.3).unwrap();
        let b = r.eval(0.7).unwrap();
        assert!((a[0] - b[0]).abs() < 1e-14 && (a[1] - b[1]).abs() < 1e-14);
    }
}
