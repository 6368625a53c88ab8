//! Plate outlines: rectangles and single-patch plates with a cutout.

use serde::Deserialize;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::error::{Error, Result};
use crate::nurbs::{
    conic_arc, join_c0, ruled_surface, ControlPoint, KnotVector, NurbsCurve, NurbsSurface,
};

/// Raw heart-cutout data shipped with the crate.
pub const HEART_CURVES_JSON: &str = include_str!("../fixtures/heart_curves.json");

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointTable {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub w: Vec<f64>,
}

impl PointTable {
    fn points(&self) -> Result<Vec<ControlPoint>> {
        if self.x.len() != self.y.len() || self.x.len() != self.w.len() {
            return Err(Error::Construction(
                "point table columns differ in length".into(),
            ));
        }
        Ok((0..self.x.len())
            .map(|i| ControlPoint::planar(self.x[i], self.y[i], self.w[i]))
            .collect())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeartCurves {
    pub inner_table: PointTable,
    pub outer_table: PointTable,
    pub inner_knots: Vec<f64>,
    pub outer_knots: Vec<f64>,
    /// Table x and y columns hold homogeneous coordinates `w*x`, `w*y`.
    pub weighted_coordinates: bool,
}

impl HeartCurves {
    pub fn shipped() -> Self {
        serde_json::from_str(HEART_CURVES_JSON).expect("shipped heart data parses")
    }

    fn curve(&self, table: &PointTable, knots: &[f64], weighted: bool) -> Result<NurbsCurve> {
        let mut pts = table.points()?;
        if weighted {
            for p in &mut pts {
                p.x /= p.w;
                p.y /= p.w;
            }
        }
        NurbsCurve::new(KnotVector::new(knots.to_vec(), 2)?, pts)
    }

    /// Inner curve with the table columns read as plain Cartesian coordinates.
    pub fn inner_as_cartesian(&self) -> Result<NurbsCurve> {
        self.curve(&self.inner_table, &self.inner_knots, false)
    }

    pub fn inner(&self) -> Result<NurbsCurve> {
        self.curve(
            &self.inner_table,
            &self.inner_knots,
            self.weighted_coordinates,
        )
    }

    pub fn outer(&self) -> Result<NurbsCurve> {
        self.curve(
            &self.outer_table,
            &self.outer_knots,
            self.weighted_coordinates,
        )
    }
}

/// Rectangle boundary as a closed degree-2 curve: corners at parameters 0, 1/4, 1/2,
/// 3/4 starting from the top-right corner and running counter-clockwise.
pub fn rectangle_outline(origin: [f64; 2], a: f64, b: f64) -> Result<NurbsCurve> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Construction("plate sides must be positive".into()));
    }
    let [x0, y0] = origin;
    let (x1, y1) = (x0 + a, y0 + b);
    let (xm, ym) = (x0 + 0.5 * a, y0 + 0.5 * b);
    let xy = [
        (x1, y1),
        (xm, y1),
        (x0, y1),
        (x0, ym),
        (x0, y0),
        (xm, y0),
        (x1, y0),
        (x1, ym),
        (x1, y1),
    ];
    let knots = vec![
        0.0, 0.0, 0.0, 0.25, 0.25, 0.5, 0.5, 0.75, 0.75, 1.0, 1.0, 1.0,
    ];
    NurbsCurve::new(
        KnotVector::new(knots, 2)?,
        xy.iter()
            .map(|&(x, y)| ControlPoint::planar(x, y, 1.0))
            .collect(),
    )
}

/// Closed ellipse from four quarter arcs starting at 45 degrees, counter-clockwise.
pub fn ellipse(center: [f64; 2], rx: f64, ry: f64) -> Result<NurbsCurve> {
    if !(rx > 0.0 && ry > 0.0) {
        return Err(Error::Construction("hole radii must be positive".into()));
    }
    let arcs = (0..4)
        .map(|i| {
            let a = FRAC_PI_4 + i as f64 * FRAC_PI_2;
            conic_arc(center, rx, ry, a, a + FRAC_PI_2)
        })
        .collect::<Result<Vec<_>>>()?;
    join_c0(&arcs)
}

#[derive(Debug, Clone, PartialEq)]
pub enum HoleShape {
    Circle {
        center: [f64; 2],
        radius: f64,
    },
    Ellipse {
        center: [f64; 2],
        semi_axes: [f64; 2],
    },
    /// Heart outline of the shipped data, scaled from its 10 x 10 frame onto the plate.
    Heart,
    Curve(NurbsCurve),
}

fn scaled(c: &NurbsCurve, origin: [f64; 2], sx: f64, sy: f64) -> Result<NurbsCurve> {
    let pts = c
        .points()
        .iter()
        .map(|p| ControlPoint::planar(origin[0] + sx * p.x, origin[1] + sy * p.y, p.w))
        .collect();
    NurbsCurve::new(c.knots().clone(), pts)
}

pub fn hole_curve(shape: &HoleShape, origin: [f64; 2], a: f64, b: f64) -> Result<NurbsCurve> {
    match shape {
        HoleShape::Circle { center, radius } => ellipse(*center, *radius, *radius),
        HoleShape::Ellipse { center, semi_axes } => ellipse(*center, semi_axes[0], semi_axes[1]),
        HoleShape::Heart => scaled(&HeartCurves::shipped().inner()?, origin, a / 10.0, b / 10.0),
        HoleShape::Curve(c) => Ok(c.clone()),
    }
}

/// Single patch spanning from the hole outline to the rectangle `origin + [0,a] x [0,b]`.
pub fn ruled_cutout(origin: [f64; 2], a: f64, b: f64, hole: &HoleShape) -> Result<NurbsSurface> {
    let inner = hole_curve(hole, origin, a, b)?;
    let outer = rectangle_outline(origin, a, b)?;
    ruled_surface(&inner, &outer)
}

/// Analysis mesh: both directions raised to `degree`, then `divisions` knots inserted
/// evenly inside every span.
pub fn analysis_surface(
    s: &NurbsSurface,
    degree: usize,
    divisions: [usize; 2],
) -> Result<NurbsSurface> {
    if degree < s.degree_u().max(s.degree_v()) {
        return Err(Error::Config(format!(
            "degree {degree} is below the geometry degree {}",
            s.degree_u().max(s.degree_v())
        )));
    }
    s.elevate_to(degree, degree)?
        .refine(divisions[0], divisions[1])
}

/// Divisions per span for refinement level `level`: each span is halved `level` times.
pub fn level_divisions(level: u32) -> usize {
    (1usize << level) - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nurbs::ParamPoint;
    use crate::quadrature::GaussLegendre;
    use std::f64::consts::PI;

    fn area(s: &NurbsSurface) -> f64 {
        let g = GaussLegendre::new(12);
        let mut total = 0.0;
        for (bu, bv) in s.element_bounds() {
            for (v, wv) in g.on(bv[0], bv[1]) {
                for (u, wu) in g.on(bu[0], bu[1]) {
                    total += wu * wv * s.planar_jacobian(ParamPoint::new(u, v)).unwrap().abs();
                }
            }
        }
        total
    }

    #[test]
    fn outline_corners_and_midpoints() {
        let c = rectangle_outline([1.0, 2.0], 4.0, 2.0).unwrap();
        assert_eq!(c.eval(0.0).unwrap(), [5.0, 4.0, 0.0]);
        assert_eq!(c.eval(0.25).unwrap(), [1.0, 4.0, 0.0]);
        assert_eq!(c.eval(0.5).unwrap(), [1.0, 2.0, 0.0]);
        assert_eq!(c.eval(0.75).unwrap(), [5.0, 2.0, 0.0]);
        assert_eq!(c.eval(0.125).unwrap(), [3.0, 4.0, 0.0]);
        assert!(c.is_closed());
    }

    #[test]
    fn ellipse_points_satisfy_equation() {
        let e = ellipse([0.5, 0.5], 0.2, 0.1).unwrap();
        for i in 0..=40 {
            let p = e.eval(i as f64 / 40.0).unwrap();
            let r = ((p[0] - 0.5) / 0.2).powi(2) + ((p[1] - 0.5) / 0.1).powi(2);
            assert!((r - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn circular_cutout_area() {
        let s = ruled_cutout(
            [0.0, 0.0],
            10.0,
            10.0,
            &HoleShape::Circle {
                center: [5.0, 5.0],
                radius: 1.0,
            },
        )
        .unwrap();
        assert!(s.periodic_u());
        assert!((area(&s) - (100.0 - PI)).abs() < 1e-9);
        let r = analysis_surface(&s, 2, [3, 3]).unwrap();
        assert_eq!(r.num_elements(), 16 * 4);
        assert!((area(&r) - (100.0 - PI)).abs() < 1e-9);
    }

    #[test]
    fn heart_read_as_cartesian_folds() {
        let h = HeartCurves::shipped();
        let folded = ruled_surface(&h.inner_as_cartesian().unwrap(), &h.outer().unwrap())
            .and_then(|s| analysis_surface(&s, 2, [7, 7]))
            .and_then(|s| s.check_jacobian());
        assert!(folded.is_err(), "{folded:?}");
    }

    #[test]
    fn heart_is_square_with_two_semicircles() {
        let c = HeartCurves::shipped().inner().unwrap();
        for i in 0..=400 {
            let [x, y, _] = c.eval(i as f64 / 400.0).unwrap();
            let on_square = ((y - 8.0).abs() < 1e-12 && (2.0..=6.0).contains(&x))
                || ((x - 2.0).abs() < 1e-12 && (4.0..=8.0).contains(&y));
            let on_lower = y <= 4.0 + 1e-12
                && (((x - 4.0).powi(2) + (y - 4.0).powi(2)).sqrt() - 2.0).abs() < 5e-3;
            let on_right = x >= 6.0 - 1e-12
                && (((x - 6.0).powi(2) + (y - 6.0).powi(2)).sqrt() - 2.0).abs() < 5e-3;
            assert!(on_square || on_lower || on_right, "({x}, {y})");
        }
        let s = ruled_cutout([0.0, 0.0], 10.0, 10.0, &HoleShape::Heart).unwrap();
        assert_eq!(s.num_elements(), 8);
        analysis_surface(&s, 2, [7, 7])
            .unwrap()
            .check_jacobian()
            .unwrap();
    }
}
