use nalgebra::{DMatrix, Matrix5};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::materials::StiffenerRigidity;
use crate::nurbs::{ControlPoint, NurbsCurve, ParamPoint, RationalBasis};
use crate::plate::{ElementMatrices, GlobalSystem, PlateModel, StrainOperator, DOFS_PER_NODE};
use crate::quadrature::GaussLegendre;

/// Stiffener centreline on the plate midplane.
#[derive(Debug, Clone, PartialEq)]
pub struct StiffenerPath {
    curve: NurbsCurve,
    delta_eps: Option<f64>,
    delta_dist: Option<f64>,
}

/// Orientation data of the path at one parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathFrame {
    /// Tangent angle from the x axis.
    pub alpha: f64,
    /// Signed curvature, positive when turning left.
    pub curvature: f64,
    /// dGamma/ds.
    pub arc_jacobian: f64,
}

impl StiffenerPath {
    pub fn new(curve: NurbsCurve) -> Result<Self> {
        let tol = 1e-12 * curve.extent().max(1.0);
        if curve.points().iter().any(|p| p.z.abs() > tol) {
            return Err(Error::Placement(
                "stiffener control points must lie in the plane z = 0".into(),
            ));
        }
        Ok(StiffenerPath {
            curve,
            delta_eps: None,
            delta_dist: None,
        })
    }

    /// Quadratic Bezier path across the panel box `lo..hi`. The ends sit on the top and
    /// right edges, offset from the top-left and bottom-right corners by `delta_eps`
    /// of the panel size; the middle control point is at `lo + delta_dist * (hi - lo)`.
    pub fn from_parameters(
        lo: [f64; 2],
        hi: [f64; 2],
        delta_eps: f64,
        delta_dist: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&delta_eps) || !(0.0..=1.0).contains(&delta_dist) {
            return Err(Error::Placement(format!(
                "delta_eps = {delta_eps} and delta_dist = {delta_dist} must lie in [0, 1]"
            )));
        }
        let (w, h) = (hi[0] - lo[0], hi[1] - lo[1]);
        if !(w > 0.0 && h > 0.0) {
            return Err(Error::Placement("empty panel box".into()));
        }
        let pts = vec![
            ControlPoint::planar(lo[0] + delta_eps * w, hi[1], 1.0),
            ControlPoint::planar(lo[0] + delta_dist * w, lo[1] + delta_dist * h, 1.0),
            ControlPoint::planar(hi[0], lo[1] + delta_eps * h, 1.0),
        ];
        let mut path = Self::new(NurbsCurve::bezier(pts)?)?;
        path.delta_eps = Some(delta_eps);
        path.delta_dist = Some(delta_dist);
        Ok(path)
    }

    pub fn curve(&self) -> &NurbsCurve {
        &self.curve
    }

    pub fn delta_eps(&self) -> Option<f64> {
        self.delta_eps
    }

    pub fn delta_dist(&self) -> Option<f64> {
        self.delta_dist
    }

    pub fn frame(&self, s: f64) -> Result<PathFrame> {
        let d = self.curve.derivatives(s, 2)?;
        let (x1, y1, x2, y2) = (d[1][0], d[1][1], d[2][0], d[2][1]);
        let speed = x1.hypot(y1);
        if !(speed > 1e-12 * self.curve.extent()) {
            return Err(Error::DegenerateCurve(format!("zero tangent at s = {s}")));
        }
        Ok(PathFrame {
            alpha: y1.atan2(x1),
            curvature: (x1 * y2 - y1 * x2) / speed.powi(3),
            arc_jacobian: speed,
        })
    }

    /// Arc length by 24-point Gauss quadrature on each knot span.
    pub fn arc_length(&self) -> Result<f64> {
        let g = GaussLegendre::new(24);
        let mut total = 0.0;
        for (a, b) in self.spans() {
            for (s, w) in g.on(a, b) {
                total += w * self.frame(s)?.arc_jacobian;
            }
        }
        Ok(total)
    }

    fn spans(&self) -> Vec<(f64, f64)> {
        let k = self.curve.knots().values();
        self.curve
            .knots()
            .nonempty_spans()
            .into_iter()
            .map(|i| (k[i], k[i + 1]))
            .collect()
    }
}

/// Frame and plate location of one stiffener Gauss point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StiffenerQuadraturePoint {
    pub s_param: f64,
    pub plate_param: ParamPoint,
    pub alpha: f64,
    pub curvature: f64,
    pub arc_jacobian: f64,
    /// Gauss weight times arc Jacobian.
    pub weight: f64,
}

fn locate(
    model: &PlateModel,
    path: &StiffenerPath,
    s: f64,
    guess: ParamPoint,
) -> Result<ParamPoint> {
    let x = path.curve.eval(s)?;
    model.surface().point_inversion(x, guess).map_err(|e| match e {
        Error::Inversion { residual, .. } => Error::Placement(format!(
            "stiffener point ({:.6}, {:.6}) at s = {s:.6} is off the plate (residual {residual:.3e} m)",
            x[0], x[1]
        )),
        other => other,
    })
}

fn element_key(model: &PlateModel, p: ParamPoint) -> Result<(usize, usize)> {
    let s = model.surface();
    Ok((s.knots_u().find_span(p.xi)?, s.knots_v().find_span(p.eta)?))
}

/// Gauss points along the path, four per piece, with pieces split wherever the path
/// crosses into another plate element.
pub fn quadrature_points(
    model: &PlateModel,
    path: &StiffenerPath,
) -> Result<Vec<StiffenerQuadraturePoint>> {
    let gauss = GaussLegendre::new(4);
    let samples = 32 + 8 * (model.n_elements() as f64).sqrt().ceil() as usize;
    let ([u0, u1], [v0, v1]) = model.surface().domain();
    let mut guess = ParamPoint::new(0.5 * (u0 + u1), 0.5 * (v0 + v1));
    let mut out = Vec::new();
    for (a, b) in path.spans() {
        let mut cuts = vec![a];
        let mut prev = locate(model, path, a, guess)?;
        let mut prev_key = element_key(model, prev)?;
        let mut prev_s = a;
        for i in 1..=samples {
            let s = a + (b - a) * i as f64 / samples as f64;
            let p = locate(model, path, s, prev)?;
            let key = element_key(model, p)?;
            if key != prev_key {
                let (mut lo, mut hi) = (prev_s, s);
                let mut g = prev;
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    let pm = locate(model, path, mid, g)?;
                    if element_key(model, pm)? == prev_key {
                        lo = mid;
                        g = pm;
                    } else {
                        hi = mid;
                    }
                }
                cuts.push(0.5 * (lo + hi));
            }
            prev = p;
            prev_key = key;
            prev_s = s;
        }
        cuts.push(b);
        guess = prev;
        for w in cuts.windows(2) {
            let mut g = locate(model, path, 0.5 * (w[0] + w[1]), guess)?;
            for (s, wt) in gauss.on(w[0], w[1]) {
                let p = locate(model, path, s, g)?;
                g = p;
                let f = path.frame(s)?;
                out.push(StiffenerQuadraturePoint {
                    s_param: s,
                    plate_param: p,
                    alpha: f.alpha,
                    curvature: f.curvature,
                    arc_jacobian: f.arc_jacobian,
                    weight: wt * f.arc_jacobian,
                });
            }
        }
    }
    Ok(out)
}

/// Plate-to-global rotation into the stiffener frame (u_t, v_n, w_b, beta_t, beta_n).
pub fn transformation(alpha: f64) -> Matrix5<f64> {
    let (s, c) = alpha.sin_cos();
    #[rustfmt::skip]
    let t = Matrix5::new(
        c,  s,  0.0, 0.0, 0.0,
        -s, c,  0.0, 0.0, 0.0,
        0.0, 0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, 0.0, c,  s,
        0.0, 0.0, 0.0, -s, c,
    );
    t
}

fn transformation_rate(alpha: f64) -> Matrix5<f64> {
    let (s, c) = alpha.sin_cos();
    #[rustfmt::skip]
    let t = Matrix5::new(
        -s, c,  0.0, 0.0, 0.0,
        -c, -s, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, -s, c,
        0.0, 0.0, 0.0, -c, -s,
    );
    t
}

fn basis_at(model: &PlateModel, qp: &StiffenerQuadraturePoint) -> Result<RationalBasis> {
    model.surface().rational_basis(qp.plate_param)
}

/// Interpolation of the five plate fields at the stiffener point: blocks `R_i I5`.
/// Also returns the net indices of the supporting functions.
pub fn coupling_matrix(
    model: &PlateModel,
    qp: &StiffenerQuadraturePoint,
) -> Result<(Vec<usize>, DMatrix<f64>)> {
    let basis = basis_at(model, qp)?;
    let n = basis.net.len();
    let mut m = DMatrix::zeros(DOFS_PER_NODE, DOFS_PER_NODE * n);
    for (a, r) in basis.values.iter().enumerate() {
        for c in 0..DOFS_PER_NODE {
            m[(c, DOFS_PER_NODE * a + c)] = *r;
        }
    }
    Ok((basis.net, m))
}

/// Stiffener strain operator on the local plate DOFs, together with `T N_ps`.
///
/// The local displacements are `T N d`; their arc derivative picks up the frame
/// rotation rate `kappa dT/dalpha`. The 1/R entries of the operator carry the curvature
/// with the opposite sign, since R is measured to the right of the tangent.
pub fn strain_operator(
    model: &PlateModel,
    qp: &StiffenerQuadraturePoint,
) -> Result<(Vec<usize>, DMatrix<f64>, DMatrix<f64>)> {
    let basis = basis_at(model, qp)?;
    let op = StrainOperator::from_basis(model.surface(), &basis);
    let t = transformation(qp.alpha);
    let kappa = qp.curvature;
    let inv_r = -kappa;
    let mut l0 = Matrix5::<f64>::zeros();
    l0[(0, 1)] = inv_r;
    l0[(1, 0)] = -inv_r;
    l0[(2, 3)] = 1.0;
    l0[(3, 4)] = inv_r;
    l0[(4, 3)] = -inv_r;
    let frame_part = transformation_rate(qp.alpha) * kappa + l0 * t;
    let (c, s) = (qp.alpha.cos(), qp.alpha.sin());
    let n = op.r.len();
    let mut b = DMatrix::zeros(DOFS_PER_NODE, DOFS_PER_NODE * n);
    let mut tn = DMatrix::zeros(DOFS_PER_NODE, DOFS_PER_NODE * n);
    for a in 0..n {
        let dr = op.rx[a] * c + op.ry[a] * s;
        let block = t * dr + frame_part * op.r[a];
        b.view_mut((0, DOFS_PER_NODE * a), (5, 5)).copy_from(&block);
        tn.view_mut((0, DOFS_PER_NODE * a), (5, 5))
            .copy_from(&(t * op.r[a]));
    }
    Ok((op.net, b, tn))
}

fn gram(b: &DMatrix<f64>, d: &Matrix5<f64>, w: f64) -> Vec<f64> {
    let db = d * b * w;
    let n = b.ncols();
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = b.column(i).dot(&db.column(j));
            out[i * n + j] = v;
            out[j * n + i] = v;
        }
    }
    out
}

/// Stiffness and mass of the stiffener at each Gauss point, on plate DOFs.
pub fn point_contributions(
    model: &PlateModel,
    points: &[StiffenerQuadraturePoint],
    rig: &StiffenerRigidity,
    exec: Execution,
) -> Result<Vec<ElementMatrices>> {
    exec.map(points.len(), |i| {
        let qp = &points[i];
        let (net, b, tn) = strain_operator(model, qp)?;
        Ok(ElementMatrices {
            dofs: model.dofs_of_net(&net),
            k: gram(&b, &rig.d_s, qp.weight),
            m: gram(&tn, &rig.m_s, qp.weight),
        })
    })
    .into_iter()
    .collect()
}

/// Summary of an added stiffener.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StiffenerSummary {
    pub n_points: usize,
    pub arc_length: f64,
}

/// Adds the stiffener energy to the plate system.
pub fn add_stiffener(
    sys: &mut GlobalSystem,
    model: &PlateModel,
    path: &StiffenerPath,
    rig: &StiffenerRigidity,
    exec: Execution,
) -> Result<StiffenerSummary> {
    let points = quadrature_points(model, path)?;
    for c in point_contributions(model, &points, rig, exec)? {
        c.scatter(sys);
    }
    Ok(StiffenerSummary {
        n_points: points.len(),
        arc_length: points.iter().map(|q| q.weight).sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::{
        laminate_rigidity, stiffener_rigidity, Lamina, LaminateStack, PlateInertia,
        StiffenerSection, SHEAR_CORRECTION,
    };
    use crate::nurbs::{conic_arc, NurbsSurface};
    use crate::plate::QuadratureRule;
    use std::f64::consts::PI;

    fn unit_plate(n_el: usize) -> PlateModel {
        let s = NurbsSurface::rectangle([0.0, 0.0], 1.0, 1.0, 2, 2).unwrap();
        let s = s.refine(n_el - 1, n_el - 1).unwrap();
        let st = LaminateStack::new(vec![Lamina::isotropic(70e9, 0.3, 2700.0, 0.01)]).unwrap();
        PlateModel::new(
            s,
            laminate_rigidity(&st, SHEAR_CORRECTION).unwrap(),
            PlateInertia::of(&st),
        )
        .unwrap()
    }

    fn segment(p: [f64; 2], q: [f64; 2]) -> StiffenerPath {
        StiffenerPath::new(
            NurbsCurve::bezier(vec![
                ControlPoint::planar(p[0], p[1], 1.0),
                ControlPoint::planar(q[0], q[1], 1.0),
            ])
            .unwrap(),
        )
        .unwrap()
    }

    fn section() -> StiffenerSection {
        StiffenerSection::surface_mounted(0.01, 0.05, 0.01, 70e9, 70e9 / 2.6, 2700.0)
    }

    /// Control values of x -> x^2 and x -> x on a degree-2 knot vector (blossoms).
    fn blossoms(knots: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = knots.len() - 3;
        let sq = (0..n).map(|i| knots[i + 1] * knots[i + 2]).collect();
        let lin = (0..n)
            .map(|i| 0.5 * (knots[i + 1] + knots[i + 2]))
            .collect();
        (sq, lin)
    }

    #[test]
    fn straight_path_frame() {
        let p = segment([0.0, 0.3], [1.0, 0.3]);
        for s in [0.0, 0.4, 1.0] {
            let f = p.frame(s).unwrap();
            assert_eq!((f.alpha, f.curvature, f.arc_jacobian), (0.0, 0.0, 1.0));
        }
        let collinear = StiffenerPath::from_parameters([0.0, 0.0], [1.0, 1.0], 0.0, 0.5).unwrap();
        for s in [0.1, 0.5, 0.9] {
            assert!(collinear.frame(s).unwrap().curvature.abs() < 1e-12);
        }
    }

    #[test]
    fn bezier_midpoint() {
        let c = NurbsCurve::bezier(vec![
            ControlPoint::planar(0.0, 0.0, 1.0),
            ControlPoint::planar(0.5, 0.5, 1.0),
            ControlPoint::planar(1.0, 0.0, 1.0),
        ])
        .unwrap();
        let x = StiffenerPath::new(c).unwrap().curve().eval(0.5).unwrap();
        assert_eq!(x, [0.5, 0.25, 0.0]);
    }

    #[test]
    fn circle_curvature_and_reversal() {
        let r = 0.3;
        let arc = StiffenerPath::new(conic_arc([0.5, 0.5], r, r, 0.2, 1.9).unwrap()).unwrap();
        let rev = StiffenerPath::new(arc.curve().reversed()).unwrap();
        let (a, b) = arc.curve().domain();
        for (s, _) in GaussLegendre::new(4).on(a, b) {
            let f = arc.frame(s).unwrap();
            assert!((f.curvature - 1.0 / r).abs() < 1e-10);
            let g = rev.frame(a + b - s).unwrap();
            assert!((g.curvature + f.curvature).abs() < 1e-10);
            let turn = (g.alpha - f.alpha).rem_euclid(2.0 * PI);
            assert!((turn - PI).abs() < 1e-12);
        }
        assert!((arc.arc_length().unwrap() - r * 1.7).abs() < 1e-12);
    }

    #[test]
    fn degenerate_tangent() {
        let p = StiffenerPath::new(
            NurbsCurve::bezier(vec![
                ControlPoint::planar(0.2, 0.2, 1.0),
                ControlPoint::planar(0.2, 0.2, 1.0),
                ControlPoint::planar(0.8, 0.2, 1.0),
            ])
            .unwrap(),
        )
        .unwrap();
        assert!(matches!(p.frame(0.0), Err(Error::DegenerateCurve(_))));
    }

    #[test]
    fn parameters_place_end_points() {
        let p = StiffenerPath::from_parameters([0.0, 0.0], [2.0, 1.0], 0.25, 0.1).unwrap();
        let pts = p.curve().points();
        assert_eq!(pts[0].xyz(), [0.5, 1.0, 0.0]);
        assert_eq!(pts[1].xyz(), [0.2, 0.1, 0.0]);
        assert_eq!(pts[2].xyz(), [2.0, 0.25, 0.0]);
        assert!(StiffenerPath::from_parameters([0.0, 0.0], [1.0, 1.0], 1.5, 0.1).is_err());
    }

    #[test]
    fn quadrature_points_lie_on_path_and_respect_elements() {
        let m = unit_plate(5);
        let path = StiffenerPath::from_parameters([0.0, 0.0], [1.0, 1.0], 0.1, 0.2).unwrap();
        let pts = quadrature_points(&m, &path).unwrap();
        assert_eq!(pts.len() % 4, 0);
        for q in &pts {
            let x = m.position(q.plate_param).unwrap();
            let y = path.curve().eval(q.s_param).unwrap();
            assert!(((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt() < 1e-10);
        }
        for group in pts.chunks(4) {
            let k0 = element_key(&m, group[0].plate_param).unwrap();
            assert!(group
                .iter()
                .all(|q| element_key(&m, q.plate_param).unwrap() == k0));
        }
        let total: f64 = pts.iter().map(|q| q.weight).sum();
        assert!((total - path.arc_length().unwrap()).abs() < 1e-9 * total);
    }

    #[test]
    fn off_plate_path_is_a_placement_error() {
        let m = unit_plate(2);
        let path = segment([0.5, 0.5], [1.5, 0.5]);
        assert!(matches!(
            quadrature_points(&m, &path),
            Err(Error::Placement(_))
        ));
    }

    #[test]
    fn coupling_partition_and_reproduction() {
        let m = unit_plate(3);
        let path = StiffenerPath::from_parameters([0.0, 0.0], [1.0, 1.0], 0.2, 0.3).unwrap();
        let (sq, lin) = blossoms(m.surface().knots_u().values());
        let nu = m.surface().n_u();
        for q in quadrature_points(&m, &path).unwrap() {
            let (net, n) = coupling_matrix(&m, &q).unwrap();
            for c in 0..5 {
                let row_sum: f64 = n.row(c).iter().sum();
                assert!((row_sum - 1.0).abs() < 1e-12);
            }
            // u0 = x^2, w0 = y
            let mut d = vec![0.0; 5 * net.len()];
            for (a, &g) in net.iter().enumerate() {
                d[5 * a] = sq[g % nu];
                d[5 * a + 2] = lin[g / nu];
            }
            let u = &n * nalgebra::DVector::from_vec(d);
            let x = m.position(q.plate_param).unwrap();
            assert!((u[0] - x[0] * x[0]).abs() < 1e-10);
            assert!((u[2] - x[1]).abs() < 1e-10);
        }
        // a corner of the plate is interpolatory
        let corner = StiffenerQuadraturePoint {
            s_param: 0.0,
            plate_param: ParamPoint::new(0.0, 0.0),
            alpha: 0.0,
            curvature: 0.0,
            arc_jacobian: 1.0,
            weight: 1.0,
        };
        let (net, n) = coupling_matrix(&m, &corner).unwrap();
        let k = net.iter().position(|&g| g == 0).unwrap();
        assert_eq!(n[(3, 5 * k + 3)], 1.0);
        assert_eq!(n.row(3).iter().filter(|v| **v != 0.0).count(), 1);
    }

    #[test]
    fn strain_rows_match_rotated_arc_derivatives() {
        let m = unit_plate(3);
        let arc = StiffenerPath::new(conic_arc([0.5, 0.5], 0.3, 0.3, 0.3, 2.5).unwrap()).unwrap();
        for q in quadrature_points(&m, &arc).unwrap().iter().step_by(3) {
            let (_, b, _) = strain_operator(&m, q).unwrap();
            let basis = m.surface().rational_basis(q.plate_param).unwrap();
            let op = StrainOperator::from_basis(m.surface(), &basis);
            let t = transformation(q.alpha);
            let (c, s) = (q.alpha.cos(), q.alpha.sin());
            for a in 0..op.r.len() {
                let dr = op.rx[a] * c + op.ry[a] * s;
                let mut expect = t * dr;
                expect.row_mut(2).fill(0.0);
                expect[(2, 2)] = dr;
                expect[(2, 3)] = op.r[a] * c;
                expect[(2, 4)] = op.r[a] * s;
                let got = b.view((0, 5 * a), (5, 5));
                assert!((got - expect).abs().max() < 1e-10 * (1.0 + expect.abs().max()));
            }
        }
    }

    #[test]
    fn rigid_plate_motions_leave_only_lateral_rotation() {
        let m = unit_plate(3);
        let arc = StiffenerPath::new(conic_arc([0.5, 0.5], 0.3, 0.2, 0.3, 2.5).unwrap()).unwrap();
        let net = m.surface().net();
        // translation, in-plane rotation u = -y, v = x, and tilt w = x, beta_x = -1
        let fields: [fn(f64, f64) -> [f64; 5]; 3] = [
            |_, _| [0.7, -0.4, 0.2, 0.0, 0.0],
            |x, y| [-y, x, 0.0, 0.0, 0.0],
            |x, _| [0.0, 0.0, x, -1.0, 0.0],
        ];
        for (k, f) in fields.iter().enumerate() {
            for q in quadrature_points(&m, &arc).unwrap() {
                let (local, b, _) = strain_operator(&m, &q).unwrap();
                let d: Vec<f64> = local.iter().flat_map(|&g| f(net[g].x, net[g].y)).collect();
                let eps = b * nalgebra::DVector::from_vec(d);
                let lateral = if k == 1 { 1.0 } else { 0.0 };
                for (r, want) in [0.0, lateral, 0.0, 0.0, 0.0].iter().enumerate() {
                    assert!(
                        (eps[r] - want).abs() < 1e-10,
                        "field {k} row {r}: {}",
                        eps[r]
                    );
                }
            }
        }
    }

    #[test]
    fn eccentric_beam_energy() {
        let m = unit_plate(4);
        let path = segment([0.0, 0.43], [1.0, 0.43]);
        let sec = section();
        let rig = stiffener_rigidity(&sec).unwrap();
        let mut sys = m.empty_system();
        add_stiffener(&mut sys, &m, &path, &rig, Execution::Sequential).unwrap();
        // u0 = x, w0 = x^2, beta_x = -2x: unit axial strain, curvature -2, no shear
        let (sq, lin) = blossoms(m.surface().knots_u().values());
        let nu = m.surface().n_u();
        let mut d = vec![0.0; m.n_dofs()];
        for g in 0..nu * m.surface().n_v() {
            let i = g % nu;
            d[5 * g] = lin[i];
            d[5 * g + 2] = sq[i];
            d[5 * g + 3] = -2.0 * lin[i];
        }
        let kd = sys.k.mul(&d);
        let energy = 0.5 * d.iter().zip(&kd).map(|(a, b)| a * b).sum::<f64>();
        let (ea, e) = (sec.e_s * sec.area(), sec.e);
        let exact = 0.5 * (ea - 4.0 * ea * e + 4.0 * sec.e_s * sec.i_n());
        assert!((energy - exact).abs() < 1e-8 * exact, "{energy} vs {exact}");
    }

    #[test]
    fn mass_additivity_and_symmetry() {
        let m = unit_plate(6);
        let path = StiffenerPath::from_parameters([0.0, 0.0], [1.0, 1.0], 0.15, 0.2).unwrap();
        let sec = section();
        let mut sys = m.empty_system();
        add_stiffener(
            &mut sys,
            &m,
            &path,
            &stiffener_rigidity(&sec).unwrap(),
            Execution::Parallel,
        )
        .unwrap();
        let expect = sec.rho_s * sec.area() * path.arc_length().unwrap();
        for c in [0, 1, 2] {
            assert!((sys.component_mass(c) - expect).abs() < 1e-9 * expect);
        }
        assert_eq!(sys.k.max_asymmetry(), 0.0);
        assert_eq!(sys.m.max_asymmetry(), 0.0);
    }

    #[test]
    fn zero_rigidity_is_a_no_op() {
        let m = unit_plate(3);
        let base = m.assemble(QuadratureRule::full(m.surface())).unwrap();
        let mut sys = base.clone();
        let path = StiffenerPath::from_parameters([0.0, 0.0], [1.0, 1.0], 0.0, 0.25).unwrap();
        add_stiffener(
            &mut sys,
            &m,
            &path,
            &StiffenerRigidity::zero(),
            Execution::Parallel,
        )
        .unwrap();
        assert_eq!(sys, base);
    }

    #[test]
    fn parallel_matches_sequential() {
        let m = unit_plate(4);
        let path = StiffenerPath::from_parameters([0.0, 0.0], [1.0, 1.0], 0.05, 0.3).unwrap();
        let rig = stiffener_rigidity(&section()).unwrap();
        let mut a = m.empty_system();
        let mut b = m.empty_system();
        add_stiffener(&mut a, &m, &path, &rig, Execution::Parallel).unwrap();
        add_stiffener(&mut b, &m, &path, &rig, Execution::Sequential).unwrap();
        assert_eq!(a, b);
    }
}
