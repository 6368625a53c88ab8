use proptest::prelude::*;

use isoplate::geometry::{analysis_surface, ruled_cutout, HeartCurves, HoleShape};
use isoplate::nurbs::{NurbsSurface, ParamPoint};

const INNER_X: [f64; 17] = [
    6., 5., 4., 3., 2., 2., 2., 2., 2., 1.414, 4., 4.243, 6., 5.657, 8., 5.657, 6.,
];
const INNER_Y: [f64; 17] = [
    8., 8., 8., 8., 8., 7., 6., 5., 4., 1.414, 2., 1.414, 4., 2.828, 6., 5.657, 8.,
];
const INNER_W: [f64; 17] = [
    1., 1., 1., 1., 1., 1., 1., 1., 1., 0.707, 1., 0.707, 1., 0.707, 1., 0.707, 1.,
];
const OUTER_X: [f64; 9] = [10., 5., 0., 0., 0., 5., 10., 10., 10.];
const OUTER_Y: [f64; 9] = [10., 10., 10., 5., 0., 0., 0., 5., 10.];

const CONNECTIVITY: [[usize; 9]; 8] = [
    [1, 2, 3, 18, 19, 20, 35, 36, 37],
    [3, 4, 5, 20, 21, 22, 37, 38, 39],
    [5, 6, 7, 22, 23, 24, 39, 40, 41],
    [7, 8, 9, 24, 25, 26, 41, 42, 43],
    [9, 10, 11, 26, 27, 28, 43, 44, 45],
    [11, 12, 13, 28, 29, 30, 45, 46, 47],
    [13, 14, 15, 30, 31, 32, 47, 48, 49],
    [15, 16, 1, 32, 33, 18, 49, 50, 35],
];

fn heart() -> NurbsSurface {
    ruled_cutout([0.0, 0.0], 10.0, 10.0, &HoleShape::Heart).unwrap()
}

fn at(s: &NurbsSurface, fu: f64, fv: f64) -> ParamPoint {
    let ([u0, u1], [v0, v1]) = s.domain();
    ParamPoint::new(u0 + fu * (u1 - u0), v0 + fv * (v1 - v0))
}

#[test]
fn shipped_tables_are_verbatim() {
    let h = HeartCurves::shipped();
    assert_eq!(h.inner_table.x, INNER_X);
    assert_eq!(h.inner_table.y, INNER_Y);
    assert_eq!(h.inner_table.w, INNER_W);
    assert_eq!(h.outer_table.x, OUTER_X);
    assert_eq!(h.outer_table.y, OUTER_Y);
    assert!(h.outer_table.w.iter().all(|&w| w == 1.0));
}

#[test]
fn coarse_heart_connectivity_matches_reference_table() {
    let s = analysis_surface(&heart(), 2, [0, 0]).unwrap();
    assert_eq!((s.n_u(), s.n_v()), (17, 3));
    let c = s.connectivity();
    assert_eq!(c.ien.len(), 8);
    for (e, row) in CONNECTIVITY.iter().enumerate() {
        let one_based: Vec<usize> = c.ien[e].iter().map(|g| g + 1).collect();
        assert_eq!(one_based, row, "element {}", e + 1);
    }
    assert_eq!(c.n_nodes, 16 * 3);
}

#[test]
fn inner_edge_reproduces_inner_curve() {
    let s = heart();
    let inner = HeartCurves::shipped().inner().unwrap();
    assert_eq!(s.eval_point(at(&s, 0.0, 0.0)).unwrap(), [6.0, 8.0, 0.0]);
    for i in 0..=64 {
        let t = i as f64 / 64.0;
        let a = s.eval_point(at(&s, t, 0.0)).unwrap();
        let b = inner.eval(t).unwrap();
        for k in 0..3 {
            assert!((a[k] - b[k]).abs() < 1e-12, "{t}: {a:?} vs {b:?}");
        }
    }
    // every end point of a table segment (weight 1 rows) is interpolated
    for i in (0..17).step_by(2) {
        let p = s.eval_point(at(&s, i as f64 / 16.0, 0.0)).unwrap();
        assert!(
            (p[0] - INNER_X[i]).abs() < 1e-12 && (p[1] - INNER_Y[i]).abs() < 1e-12,
            "point {i}"
        );
    }
}

#[test]
fn outer_edge_is_the_plate_outline() {
    let s = heart();
    for i in 0..=64 {
        let [x, y, _] = s.eval_point(at(&s, i as f64 / 64.0, 1.0)).unwrap();
        let on_edge = [x, y, 10.0 - x, 10.0 - y].iter().any(|d| d.abs() < 1e-12);
        assert!(
            on_edge && (0.0..=10.0).contains(&x) && (0.0..=10.0).contains(&y),
            "({x}, {y})"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_basis_is_a_nonnegative_partition_of_unity(fu in 0.0..=1.0f64, fv in 0.0..=1.0f64) {
        for s in [heart(), analysis_surface(&heart(), 3, [2, 3]).unwrap()] {
            let b = s.rational_basis(at(&s, fu, fv)).unwrap();
            let sum: f64 = b.values.iter().sum();
            prop_assert!((sum - 1.0).abs() <= 1e-12);
            prop_assert!(b.values.iter().all(|&r| r >= -1e-15));
            let ds: f64 = b.d_xi.iter().chain(&b.d_eta).map(|d| d.abs()).sum::<f64>();
            prop_assert!(b.d_xi.iter().sum::<f64>().abs() <= 1e-10 * ds.max(1.0));
            prop_assert!(b.d_eta.iter().sum::<f64>().abs() <= 1e-10 * ds.max(1.0));
        }
    }

    #[test]
    fn surface_derivatives_match_central_differences(fu in 0.02..0.98f64, fv in 0.02..0.98f64) {
        let s = heart();
        let p = at(&s, fu, fv);
        let e = s.eval(p, 1).unwrap();
        let h = 1e-6;
        let f = |du: f64, dv: f64| s.eval_point(ParamPoint::new(p.xi + du, p.eta + dv)).unwrap();
        for (analytic, (a, b)) in [(e.du(), (f(h, 0.0), f(-h, 0.0))), (e.dv(), (f(0.0, h), f(0.0, -h)))] {
            let scale = analytic.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-3);
            for k in 0..3 {
                let fd = (a[k] - b[k]) / (2.0 * h);
                // the central difference is invalid across a C0 joint; skip those points
                let joint = (fu * 16.0 - (fu * 16.0).round()).abs() < 1e-4;
                prop_assert!(joint || (fd - analytic[k]).abs() <= 1e-6 * scale, "{} vs {}", fd, analytic[k]);
            }
        }
    }

    #[test]
    fn refinement_keeps_geometry(n_u in 0usize..4, n_v in 0usize..4, pts in prop::collection::vec((0.0..=1.0f64, 0.0..=1.0f64), 20)) {
        let s = heart();
        let r = s.refine(n_u, n_v).unwrap();
        prop_assert_eq!(r.num_elements(), 8 * (n_u + 1) * (n_v + 1));
        for (fu, fv) in pts {
            let a = s.eval_point(at(&s, fu, fv)).unwrap();
            let b = r.eval_point(at(&r, fu, fv)).unwrap();
            for k in 0..3 {
                prop_assert!((a[k] - b[k]).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn seam_evaluations_coincide(fv in 0.0..=1.0f64) {
        let s = analysis_surface(&heart(), 2, [3, 3]).unwrap();
        let a = s.eval_point(at(&s, 0.0, fv)).unwrap();
        let b = s.eval_point(at(&s, 1.0, fv)).unwrap();
        for k in 0..3 {
            prop_assert!((a[k] - b[k]).abs() <= 1e-12);
        }
    }

    #[test]
    fn point_inversion_round_trip(fu in 0.0..=1.0f64, fv in 0.0..=1.0f64) {
        let s = analysis_surface(&heart(), 2, [1, 1]).unwrap();
        let p = at(&s, fu, fv);
        let x = s.eval_point(p).unwrap();
        let q = s.point_inversion(x, at(&s, 0.5, 0.5)).unwrap();
        let y = s.eval_point(q).unwrap();
        prop_assert!(((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt() <= 1e-10);
        // parameters agree except across the seam, where u = 0 and u = 1 are the same point
        let du = (p.xi - q.xi).abs();
        prop_assert!(du.min((1.0 - du).abs()) <= 1e-9 && (p.eta - q.eta).abs() <= 1e-9);
    }
}
