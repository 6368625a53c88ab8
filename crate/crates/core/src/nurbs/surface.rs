use serde::{Deserialize, Serialize};

use super::curve::{bounding_diagonal, elevate_homogeneous, insert_knot_homogeneous};
use super::{ControlPoint, KnotVector, NurbsCurve};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Parametric coordinates on a surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamPoint {
    pub xi: f64,
    pub eta: f64,
}

impl ParamPoint {
    pub fn new(xi: f64, eta: f64) -> Self {
        ParamPoint { xi, eta }
    }
}

/// Position and mixed parametric derivatives; `d[k][l]` is d^(k+l)S / du^k dv^l.
#[derive(Debug, Clone)]
pub struct SurfaceEval {
    pub d: Vec<Vec<[f64; 3]>>,
}

impl SurfaceEval {
    pub fn point(&self) -> [f64; 3] {
        self.d[0][0]
    }
    pub fn du(&self) -> [f64; 3] {
        self.d[1][0]
    }
    pub fn dv(&self) -> [f64; 3] {
        self.d[0][1]
    }
}

/// Nonzero rational basis functions at a parametric point, local order u-fastest.
#[derive(Debug, Clone)]
pub struct RationalBasis {
    pub span_u: usize,
    pub span_v: usize,
    /// Net index of each local function.
    pub net: Vec<usize>,
    pub values: Vec<f64>,
    pub d_xi: Vec<f64>,
    pub d_eta: Vec<f64>,
}

/// Tensor-product NURBS surface. The net is stored u-fastest: `net[j * n_u + i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SurfaceDoc", into = "SurfaceDoc")]
pub struct NurbsSurface {
    knots_u: KnotVector,
    knots_v: KnotVector,
    net: Vec<ControlPoint>,
    periodic_u: bool,
}

/// JSON form of a surface: control points `[x, y, z, w]` in row-major order (u fastest).
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SurfaceDoc {
    degree_u: usize,
    degree_v: usize,
    knots_u: Vec<f64>,
    knots_v: Vec<f64>,
    n_u: usize,
    n_v: usize,
    #[serde(default)]
    periodic_u: bool,
    points: Vec<ControlPoint>,
}

impl TryFrom<SurfaceDoc> for NurbsSurface {
    type Error = Error;
    fn try_from(doc: SurfaceDoc) -> Result<Self> {
        let ku = KnotVector::new(doc.knots_u, doc.degree_u)?;
        let kv = KnotVector::new(doc.knots_v, doc.degree_v)?;
        if ku.num_basis() != doc.n_u || kv.num_basis() != doc.n_v {
            return Err(Error::Construction(
                "n_u/n_v disagree with the knot vectors".into(),
            ));
        }
        NurbsSurface::new(ku, kv, doc.points, doc.periodic_u)
    }
}

impl From<NurbsSurface> for SurfaceDoc {
    fn from(s: NurbsSurface) -> Self {
        SurfaceDoc {
            degree_u: s.knots_u.degree(),
            degree_v: s.knots_v.degree(),
            n_u: s.knots_u.num_basis(),
            n_v: s.knots_v.num_basis(),
            knots_u: s.knots_u.values().to_vec(),
            knots_v: s.knots_v.values().to_vec(),
            periodic_u: s.periodic_u,
            points: s.net,
        }
    }
}

impl NurbsSurface {
    pub fn new(
        knots_u: KnotVector,
        knots_v: KnotVector,
        net: Vec<ControlPoint>,
        periodic_u: bool,
    ) -> Result<Self> {
        let (nu, nv) = (knots_u.num_basis(), knots_v.num_basis());
        if net.len() != nu * nv {
            return Err(Error::Construction(format!(
                "net has {} points, knot vectors need {nu} x {nv}",
                net.len()
            )));
        }
        if let Some(p) = net.iter().find(|p| !(p.w > 0.0)) {
            return Err(Error::Construction(format!("non-positive weight {}", p.w)));
        }
        let s = NurbsSurface {
            knots_u,
            knots_v,
            net,
            periodic_u,
        };
        if periodic_u {
            let tol = 1e-12 * s.extent();
            for j in 0..nv {
                if s.point(0, j).distance(&s.point(nu - 1, j)) > tol {
                    return Err(Error::Construction(format!(
                        "periodic surface is not closed: seam columns differ in row {j}"
                    )));
                }
            }
        }
        Ok(s)
    }

    /// Bilinear-free rectangle `[x0, x0+a] x [y0, y0+b]` of degree `p` x `q`, one span each.
    pub fn rectangle(origin: [f64; 2], a: f64, b: f64, p: usize, q: usize) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::Construction(
                "rectangle sides must be positive".into(),
            ));
        }
        let ku = KnotVector::open_uniform(p, 1);
        let kv = KnotVector::open_uniform(q, 1);
        let mut net = Vec::with_capacity((p + 1) * (q + 1));
        for j in 0..=q {
            for i in 0..=p {
                let x = origin[0] + a * i as f64 / p.max(1) as f64;
                let y = origin[1] + b * j as f64 / q.max(1) as f64;
                net.push(ControlPoint::planar(x, y, 1.0));
            }
        }
        NurbsSurface::new(ku, kv, net, false)
    }

    pub fn knots_u(&self) -> &KnotVector {
        &self.knots_u
    }
    pub fn knots_v(&self) -> &KnotVector {
        &self.knots_v
    }
    pub fn degree_u(&self) -> usize {
        self.knots_u.degree()
    }
    pub fn degree_v(&self) -> usize {
        self.knots_v.degree()
    }
    pub fn n_u(&self) -> usize {
        self.knots_u.num_basis()
    }
    pub fn n_v(&self) -> usize {
        self.knots_v.num_basis()
    }
    pub fn periodic_u(&self) -> bool {
        self.periodic_u
    }
    pub fn net(&self) -> &[ControlPoint] {
        &self.net
    }
    pub fn point(&self, i: usize, j: usize) -> ControlPoint {
        self.net[j * self.n_u() + i]
    }
    pub fn extent(&self) -> f64 {
        bounding_diagonal(self.net.iter())
    }

    pub fn domain(&self) -> ([f64; 2], [f64; 2]) {
        (
            [self.knots_u.first(), self.knots_u.last()],
            [self.knots_v.first(), self.knots_v.last()],
        )
    }

    /// Number of nonempty knot-span pairs.
    pub fn num_elements(&self) -> usize {
        self.knots_u.nonempty_spans().len() * self.knots_v.nonempty_spans().len()
    }

    /// Position and parametric derivatives up to total order `n_derivs`.
    pub fn eval(&self, p: ParamPoint, n_derivs: usize) -> Result<SurfaceEval> {
        let (pu, pv) = (self.degree_u(), self.degree_v());
        let (su, nu_d) = self.knots_u.basis_and_derivatives(p.xi, n_derivs)?;
        let (sv, nv_d) = self.knots_v.basis_and_derivatives(p.eta, n_derivs)?;
        let d = n_derivs;
        // homogeneous derivatives
        let mut a = vec![vec![[0.0; 4]; d + 1]; d + 1];
        for k in 0..=d {
            for l in 0..=(d - k) {
                let mut acc = [0.0; 4];
                for (b, nvb) in nv_d[l].iter().enumerate() {
                    let mut row = [0.0; 4];
                    for (a_, nua) in nu_d[k].iter().enumerate() {
                        let h = self.point(su - pu + a_, sv - pv + b).homogeneous();
                        for c in 0..4 {
                            row[c] += nua * h[c];
                        }
                    }
                    for c in 0..4 {
                        acc[c] += nvb * row[c];
                    }
                }
                a[k][l] = acc;
            }
        }
        let bin = |n: usize, k: usize| -> f64 {
            (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
        };
        let mut s = vec![vec![[0.0; 3]; d + 1]; d + 1];
        for k in 0..=d {
            for l in 0..=(d - k) {
                let mut v = [a[k][l][0], a[k][l][1], a[k][l][2]];
                for j in 1..=l {
                    let f = bin(l, j) * a[0][j][3];
                    for c in 0..3 {
                        v[c] -= f * s[k][l - j][c];
                    }
                }
                for i in 1..=k {
                    let f = bin(k, i) * a[i][0][3];
                    for c in 0..3 {
                        v[c] -= f * s[k - i][l][c];
                    }
                    let mut v2 = [0.0; 3];
                    for j in 1..=l {
                        let f2 = bin(l, j) * a[i][j][3];
                        for c in 0..3 {
                            v2[c] += f2 * s[k - i][l - j][c];
                        }
                    }
                    let bk = bin(k, i);
                    for c in 0..3 {
                        v[c] -= bk * v2[c];
                    }
                }
                for c in 0..3 {
                    s[k][l][c] = v[c] / a[0][0][3];
                }
            }
        }
        Ok(SurfaceEval { d: s })
    }

    pub fn eval_point(&self, p: ParamPoint) -> Result<[f64; 3]> {
        Ok(self.eval(p, 0)?.point())
    }

    /// Rational basis functions and first parametric derivatives at `p`.
    pub fn rational_basis(&self, p: ParamPoint) -> Result<RationalBasis> {
        let (su, nu_d) = self.knots_u.basis_and_derivatives(p.xi, 1)?;
        let (sv, nv_d) = self.knots_v.basis_and_derivatives(p.eta, 1)?;
        Ok(self.rational_basis_at(su, sv, &nu_d, &nv_d))
    }

    /// Same as [`rational_basis`](Self::rational_basis) but on a prescribed span pair,
    /// so points on an element edge are evaluated with that element's functions.
    pub fn rational_basis_in(&self, span_u: usize, span_v: usize, p: ParamPoint) -> RationalBasis {
        let nu_d = self.knots_u.ders_at_span(span_u, p.xi, 1);
        let nv_d = self.knots_v.ders_at_span(span_v, p.eta, 1);
        self.rational_basis_at(span_u, span_v, &nu_d, &nv_d)
    }

    fn rational_basis_at(
        &self,
        su: usize,
        sv: usize,
        nu_d: &[Vec<f64>],
        nv_d: &[Vec<f64>],
    ) -> RationalBasis {
        let (pu, pv) = (self.degree_u(), self.degree_v());
        let n_loc = (pu + 1) * (pv + 1);
        let mut net = Vec::with_capacity(n_loc);
        let mut wn = Vec::with_capacity(n_loc);
        let mut wdu = Vec::with_capacity(n_loc);
        let mut wdv = Vec::with_capacity(n_loc);
        let (mut w, mut w_u, mut w_v) = (0.0, 0.0, 0.0);
        for b in 0..=pv {
            for a in 0..=pu {
                let gi = (sv - pv + b) * self.n_u() + (su - pu + a);
                let wt = self.net[gi].w;
                let n = nu_d[0][a] * nv_d[0][b] * wt;
                let du = nu_d[1][a] * nv_d[0][b] * wt;
                let dv = nu_d[0][a] * nv_d[1][b] * wt;
                w += n;
                w_u += du;
                w_v += dv;
                net.push(gi);
                wn.push(n);
                wdu.push(du);
                wdv.push(dv);
            }
        }
        let values: Vec<f64> = wn.iter().map(|n| n / w).collect();
        let d_xi = (0..n_loc).map(|i| (wdu[i] - values[i] * w_u) / w).collect();
        let d_eta = (0..n_loc).map(|i| (wdv[i] - values[i] * w_v) / w).collect();
        RationalBasis {
            span_u: su,
            span_v: sv,
            net,
            values,
            d_xi,
            d_eta,
        }
    }

    fn map_rows<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&KnotVector, &[[f64; 4]]) -> Result<(KnotVector, Vec<[f64; 4]>)>,
    {
        let (nu, nv) = (self.n_u(), self.n_v());
        let mut new_knots = None;
        let mut rows = Vec::with_capacity(nv);
        for j in 0..nv {
            let row: Vec<[f64; 4]> = (0..nu).map(|i| self.point(i, j).homogeneous()).collect();
            let (k, r) = f(&self.knots_u, &row)?;
            new_knots = Some(k);
            rows.push(r);
        }
        let knots_u = new_knots.expect("at least one row");
        let net = rows
            .into_iter()
            .flatten()
            .map(ControlPoint::from_homogeneous)
            .collect();
        NurbsSurface::new(knots_u, self.knots_v.clone(), net, self.periodic_u)
    }

    fn transposed(&self) -> Self {
        let (nu, nv) = (self.n_u(), self.n_v());
        let mut net = Vec::with_capacity(nu * nv);
        for i in 0..nu {
            for j in 0..nv {
                net.push(self.point(i, j));
            }
        }
        NurbsSurface {
            knots_u: self.knots_v.clone(),
            knots_v: self.knots_u.clone(),
            net,
            periodic_u: false,
        }
    }

    fn with_periodic(mut self, periodic_u: bool) -> Self {
        self.periodic_u = periodic_u;
        self
    }

    pub fn insert_knot_u(&self, u: f64) -> Result<Self> {
        self.map_rows(|k, row| insert_knot_homogeneous(k, row, u))
    }

    pub fn insert_knot_v(&self, v: f64) -> Result<Self> {
        let periodic = self.periodic_u;
        Ok(self
            .transposed()
            .insert_knot_u(v)?
            .transposed()
            .with_periodic(periodic))
    }

    pub fn elevate_u(&self) -> Result<Self> {
        self.map_rows(elevate_homogeneous)
    }

    pub fn elevate_v(&self) -> Result<Self> {
        let periodic = self.periodic_u;
        Ok(self
            .transposed()
            .elevate_u()?
            .transposed()
            .with_periodic(periodic))
    }

    /// Elevates each direction up to the requested degree (never lowers).
    pub fn elevate_to(&self, p: usize, q: usize) -> Result<Self> {
        let mut s = self.clone();
        while s.degree_u() < p {
            s = s.elevate_u()?;
        }
        while s.degree_v() < q {
            s = s.elevate_v()?;
        }
        Ok(s)
    }

    /// Uniform h-refinement: `n_u` (`n_v`) new knots inserted evenly inside every
    /// nonempty span of the u (v) direction. Geometry is unchanged.
    pub fn refine(&self, n_u: usize, n_v: usize) -> Result<Self> {
        let new_u = subdivision_knots(&self.knots_u, n_u);
        let new_v = subdivision_knots(&self.knots_v, n_v);
        let mut s = self.clone();
        for u in new_u {
            s = s.insert_knot_u(u)?;
        }
        for v in new_v {
            s = s.insert_knot_v(v)?;
        }
        Ok(s)
    }

    /// Element connectivity with seam merging for periodic patches.
    pub fn connectivity(&self) -> ElementConnectivity {
        build_connectivity(self)
    }

    /// Parametric rectangle of each element, in connectivity order.
    pub fn element_bounds(&self) -> Vec<([f64; 2], [f64; 2])> {
        let ku = self.knots_u.values();
        let kv = self.knots_v.values();
        let mut out = Vec::new();
        for sv in self.knots_v.nonempty_spans() {
            for su in self.knots_u.nonempty_spans() {
                out.push(([ku[su], ku[su + 1]], [kv[sv], kv[sv + 1]]));
            }
        }
        out
    }

    /// In-plane Jacobian determinant `x_u y_v - x_v y_u`.
    pub fn planar_jacobian(&self, p: ParamPoint) -> Result<f64> {
        let e = self.eval(p, 1)?;
        let (su, sv) = (e.du(), e.dv());
        Ok(su[0] * sv[1] - sv[0] * su[1])
    }

    /// Sign of the planar Jacobian (+1 or -1), taken at the centre of the first element.
    pub fn orientation(&self) -> f64 {
        let (bu, bv) = self.element_bounds()[0];
        let c = ParamPoint::new(0.5 * (bu[0] + bu[1]), 0.5 * (bv[0] + bv[1]));
        match self.planar_jacobian(c) {
            Ok(d) if d < 0.0 => -1.0,
            _ => 1.0,
        }
    }

    /// Checks that the planar Jacobian keeps one strict sign at every Gauss point of
    /// every element (`(p+1) x (q+1)` rule).
    pub fn check_jacobian(&self) -> Result<()> {
        let gu = GaussLegendre::new(self.degree_u() + 1);
        let gv = GaussLegendre::new(self.degree_v() + 1);
        let sign = self.orientation();
        let scale = self.extent().powi(2);
        for (e, (bu, bv)) in self.element_bounds().into_iter().enumerate() {
            for &(t, _) in gv.on(bv[0], bv[1]).iter() {
                for &(s, _) in gu.on(bu[0], bu[1]).iter() {
                    let det = self.planar_jacobian(ParamPoint::new(s, t))?;
                    // scale-free threshold: the mapping must not be flat
                    if !(det * sign > 1e-12 * scale) {
                        return Err(Error::Jacobian { element: e, det });
                    }
                }
            }
        }
        Ok(())
    }

    /// Parametric point whose image is `target`, by damped Gauss-Newton with
    /// multi-start from element centres. Succeeds when the residual is below 1e-10 m.
    pub fn point_inversion(&self, target: [f64; 3], guess: ParamPoint) -> Result<ParamPoint> {
        const TOL: f64 = 1e-10;
        let mut best = f64::INFINITY;
        match self.newton_inversion(target, guess, TOL) {
            Ok(p) => return Ok(p),
            Err(r) => best = best.min(r),
        }
        let mut starts: Vec<(f64, ParamPoint)> = self
            .element_bounds()
            .into_iter()
            .filter_map(|(bu, bv)| {
                let c = ParamPoint::new(0.5 * (bu[0] + bu[1]), 0.5 * (bv[0] + bv[1]));
                let x = self.eval_point(c).ok()?;
                let d = (0..3).map(|k| (x[k] - target[k]).powi(2)).sum::<f64>();
                Some((d, c))
            })
            .collect();
        starts.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (_, start) in starts {
            match self.newton_inversion(target, start, TOL) {
                Ok(p) => return Ok(p),
                Err(r) => best = best.min(r),
            }
        }
        Err(Error::Inversion {
            x: target[0],
            y: target[1],
            z: target[2],
            residual: best,
        })
    }

    /// Returns the converged point, or the smallest residual seen.
    fn newton_inversion(
        &self,
        target: [f64; 3],
        start: ParamPoint,
        tol: f64,
    ) -> std::result::Result<ParamPoint, f64> {
        let ([u0, u1], [v0, v1]) = self.domain();
        let mut p = ParamPoint::new(start.xi.clamp(u0, u1), start.eta.clamp(v0, v1));
        let mut best = f64::INFINITY;
        for _ in 0..50 {
            let e = self.eval(p, 1).map_err(|_| best)?;
            let x = e.point();
            let r = [x[0] - target[0], x[1] - target[1], x[2] - target[2]];
            let norm = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
            best = best.min(norm);
            if norm <= tol {
                return Ok(p);
            }
            let (su, sv) = (e.du(), e.dv());
            let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
            let (a11, a12, a22) = (dot(su, su), dot(su, sv), dot(sv, sv));
            let (b1, b2) = (-dot(su, r), -dot(sv, r));
            let det = a11 * a22 - a12 * a12;
            if !(det.abs() > 0.0) {
                return Err(best);
            }
            let du = (a22 * b1 - a12 * b2) / det;
            let dv = (a11 * b2 - a12 * b1) / det;
            let mut xi = p.xi + du;
            let eta = (p.eta + dv).clamp(v0, v1);
            if self.periodic_u {
                let period = u1 - u0;
                if xi < u0 {
                    xi += period;
                } else if xi > u1 {
                    xi -= period;
                }
            }
            let next = ParamPoint::new(xi.clamp(u0, u1), eta);
            if (next.xi - p.xi).abs() < 1e-16 && (next.eta - p.eta).abs() < 1e-16 {
                return Err(best);
            }
            p = next;
        }
        Err(best)
    }
}

/// Knots splitting every nonempty span into `n + 1` equal parts.
fn subdivision_knots(k: &KnotVector, n: usize) -> Vec<f64> {
    let v = k.values();
    let mut out = Vec::new();
    for s in k.nonempty_spans() {
        let (a, b) = (v[s], v[s + 1]);
        for i in 1..=n {
            out.push(a + (b - a) * i as f64 / (n + 1) as f64);
        }
    }
    out
}

/// Element-to-control-point incidence.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementConnectivity {
    /// Per element, net indices of its `(p+1)(q+1)` functions, u-fastest, with the
    /// seam column of periodic patches replaced by the first column.
    pub ien: Vec<Vec<usize>>,
    /// Per element, the `(u, v)` knot-span pair.
    pub spans: Vec<(usize, usize)>,
    /// Compressed node number of each net index (seam duplicates share a node).
    pub node_of_net: Vec<usize>,
    pub n_nodes: usize,
}

impl ElementConnectivity {
    /// Node numbers of an element (compressed numbering).
    pub fn element_nodes(&self, e: usize) -> Vec<usize> {
        self.ien[e].iter().map(|&g| self.node_of_net[g]).collect()
    }
}

pub fn build_connectivity(s: &NurbsSurface) -> ElementConnectivity {
    let (nu, nv) = (s.n_u(), s.n_v());
    let (pu, pv) = (s.degree_u(), s.degree_v());
    let seam = |g: usize| -> usize {
        if s.periodic_u && g % nu == nu - 1 {
            g - (nu - 1)
        } else {
            g
        }
    };
    let mut ien = Vec::new();
    let mut spans = Vec::new();
    for sv in s.knots_v.nonempty_spans() {
        for su in s.knots_u.nonempty_spans() {
            let mut nodes = Vec::with_capacity((pu + 1) * (pv + 1));
            for b in 0..=pv {
                for a in 0..=pu {
                    nodes.push(seam((sv - pv + b) * nu + (su - pu + a)));
                }
            }
            ien.push(nodes);
            spans.push((su, sv));
        }
    }
    let mut node_of_net = vec![usize::MAX; nu * nv];
    let mut n_nodes = 0;
    for g in 0..nu * nv {
        let canonical = seam(g);
        if canonical == g {
            node_of_net[g] = n_nodes;
            n_nodes += 1;
        }
    }
    for g in 0..nu * nv {
        node_of_net[g] = node_of_net[seam(g)];
    }
    ElementConnectivity {
        ien,
        spans,
        node_of_net,
        n_nodes,
    }
}

/// Ruled surface between an inner and an outer boundary curve.
///
/// Both curves are mapped to [0, 1], brought to a common degree and merged onto a
/// common knot vector. The result is linear in v with v = 0 on `inner` and v = 1 on
/// `outer`; it is flagged periodic in u when both curves are closed. Fails when the
/// rulings fold (Jacobian changes sign or vanishes at a Gauss point).
pub fn ruled_surface(inner: &NurbsCurve, outer: &NurbsCurve) -> Result<NurbsSurface> {
    let p = inner.degree().max(outer.degree());
    let mut a = inner.remapped(0.0, 1.0).elevate_to(p)?;
    let mut b = outer.remapped(0.0, 1.0).elevate_to(p)?;
    let tol = 1e-12;
    let merge = |from: &NurbsCurve, into: &mut NurbsCurve| -> Result<()> {
        for (u, m) in from.knots().interior_breaks() {
            let existing = into
                .knots()
                .interior_breaks()
                .into_iter()
                .find(|(v, _)| (v - u).abs() <= tol);
            let (value, have) = existing.unwrap_or((u, 0));
            for _ in have..m {
                *into = into.insert_knot(value)?;
            }
        }
        Ok(())
    };
    merge(&a.clone(), &mut b)?;
    merge(&b.clone(), &mut a)?;
    // snap nearly equal knots so the two vectors are identical
    let ka = a.knots().clone();
    if ka.values().len() != b.knots().values().len()
        || ka
            .values()
            .iter()
            .zip(b.knots().values())
            .any(|(x, y)| (x - y).abs() > tol)
    {
        return Err(Error::Construction(
            "knot merging failed to produce a common basis".into(),
        ));
    }
    let periodic = inner.is_closed() && outer.is_closed();
    let mut net = a.points().to_vec();
    net.extend_from_slice(b.points());
    let s = NurbsSurface::new(ka, KnotVector::open_uniform(1, 1), net, periodic)?;
    s.check_jacobian().map_err(|e| match e {
        Error::Jacobian { element, det } => Error::Construction(format!(
            "rulings fold: Jacobian {det:.3e} at a Gauss point of element {element}"
        )),
        other => other,
    })?;
    Ok(s)
}
