//! Built-in model documents for the reference problems.

use crate::eigen::{BoundarySpec, EdgeCondition};
use crate::error::{Error, Result};
use crate::model::{
    AnalysisSpec, Boundary, GeometrySpec, HoleSpec, MaterialSpec, ModelDocument, NormalizationSpec,
    PathSpec, Scheme, SectionSpec, StiffenerMaterial, StiffenerSpec,
};

/// Transverse modulus used for the ratio-defined plies. Normalized results do not
/// depend on it.
const E_T: f64 = 10e9;

/// Four layups of the stiffened elliptical-cutout study.
pub const ELLIPTICAL_LAYUPS: [(&str, [f64; 4]); 4] = [
    ("antisym-crossply", [0.0, 90.0, 0.0, 90.0]),
    ("sym-crossply", [0.0, 90.0, 90.0, 0.0]),
    ("sym-angleply", [45.0, -45.0, -45.0, 45.0]),
    ("antisym-angleply", [45.0, -45.0, 45.0, -45.0]),
];

/// Middle control point offset of the reconstructed stiffener parabola. With
/// Δε = 0.25 the profile must still clear the elliptical hole.
pub const PROFILE_DELTA_DIST: f64 = 0.1;

fn analysis(n_modes: usize, divisions: [usize; 2], degree: usize, scheme: Scheme) -> AnalysisSpec {
    AnalysisSpec {
        n_modes,
        divisions: Some(divisions),
        degree,
        normalization: NormalizationSpec {
            scheme,
            ..NormalizationSpec::default()
        },
        ..AnalysisSpec::default()
    }
}

fn isotropic(e: f64) -> MaterialSpec {
    MaterialSpec::Isotropic {
        e,
        nu: 0.3,
        rho: 8000.0,
    }
}

fn ratios(e_l_ratio: f64, g_lt_ratio: f64, g_tt_ratio: f64, nu_lt: f64) -> MaterialSpec {
    MaterialSpec::Ratios {
        e_t: E_T,
        e_l_ratio,
        g_lt_ratio,
        g_tt_ratio,
        nu_lt,
        rho: 8000.0,
    }
}

fn stiffened_ply() -> MaterialSpec {
    ratios(15.0, 0.5, 0.3356, 0.3)
}

fn stiffener(gamma: f64, delta_eps: f64, delta_dist: f64) -> StiffenerSpec {
    StiffenerSpec {
        path: PathSpec::Parametric {
            delta_eps,
            delta_dist,
        },
        section: SectionSpec::Ratios { gamma, delta: 0.1 },
        material: StiffenerMaterial {
            e: E_T,
            nu: 0.3,
            rho: 8000.0,
        },
    }
}

pub fn circular_hole_clamped() -> ModelDocument {
    ModelDocument {
        name: "circular-hole-clamped".into(),
        geometry: GeometrySpec::RuledCutout {
            origin: [0.0, 0.0],
            width: 10.0,
            height: 10.0,
            hole: HoleSpec::Circle {
                center: [5.0, 5.0],
                radius: 1.0,
            },
        },
        material: isotropic(208e9),
        layup: vec![0.0],
        thickness: 0.1,
        stiffeners: vec![],
        boundary: Boundary(BoundarySpec::cccc()),
        analysis: analysis(8, [15, 15], 3, Scheme::IsotropicQuartic),
    }
}

pub fn heart_isotropic_ssss() -> ModelDocument {
    ModelDocument {
        name: "heart-isotropic-ssss".into(),
        geometry: GeometrySpec::RuledCutout {
            origin: [0.0, 0.0],
            width: 10.0,
            height: 10.0,
            hole: HoleSpec::Heart,
        },
        material: isotropic(200e9),
        layup: vec![0.0],
        thickness: 0.05,
        stiffeners: vec![],
        boundary: Boundary(BoundarySpec::ssss()),
        analysis: analysis(10, [7, 15], 3, Scheme::IsotropicQuartic),
    }
}

pub fn heart_angleply(theta: f64) -> ModelDocument {
    ModelDocument {
        name: format!("heart-angleply-{theta}"),
        geometry: GeometrySpec::RuledCutout {
            origin: [0.0, 0.0],
            width: 10.0,
            height: 10.0,
            hole: HoleSpec::Heart,
        },
        material: ratios(2.45, 0.48, 0.2, 0.23),
        layup: vec![theta, -theta, theta],
        thickness: 0.06,
        stiffeners: vec![],
        boundary: Boundary(BoundarySpec::ssss()),
        analysis: analysis(6, [7, 15], 3, Scheme::LaminateSqrt),
    }
}

pub fn stiffened_circular_hole() -> ModelDocument {
    ModelDocument {
        name: "stiffened-circular-hole".into(),
        geometry: GeometrySpec::RuledCutout {
            origin: [0.0, 0.0],
            width: 1.0,
            height: 1.0,
            hole: HoleSpec::Circle {
                center: [0.5, 0.5],
                radius: 0.1,
            },
        },
        material: stiffened_ply(),
        layup: vec![0.0, 90.0, 90.0, 0.0],
        thickness: 0.01,
        stiffeners: vec![stiffener(5.0, 0.0, PROFILE_DELTA_DIST)],
        boundary: Boundary(BoundarySpec::cccc()),
        analysis: analysis(5, [15, 15], 3, Scheme::LaminateSqrt),
    }
}

pub fn stiffened_elliptical(layup: &str, gamma: f64, delta_eps: f64) -> Result<ModelDocument> {
    let (name, angles) = ELLIPTICAL_LAYUPS
        .iter()
        .find(|(n, _)| *n == layup)
        .ok_or_else(|| Error::Config(format!("unknown layup `{layup}`")))?;
    Ok(ModelDocument {
        name: elliptical_name(name, gamma, delta_eps),
        geometry: GeometrySpec::RuledCutout {
            origin: [0.0, 0.0],
            width: 1.0,
            height: 1.0,
            hole: HoleSpec::Ellipse {
                center: [0.5, 0.5],
                semi_axes: [0.2, 0.1],
            },
        },
        material: stiffened_ply(),
        layup: angles.to_vec(),
        thickness: 0.01,
        stiffeners: vec![stiffener(gamma, delta_eps, PROFILE_DELTA_DIST)],
        boundary: Boundary(BoundarySpec::cccc()),
        analysis: analysis(10, [15, 15], 3, Scheme::LaminateSqrt),
    })
}

fn elliptical_name(layup: &str, gamma: f64, delta_eps: f64) -> String {
    format!("elliptical-{layup}-g{gamma}-de{delta_eps}")
}

/// Thin simply supported square with a closed-form reference.
pub fn navier_square() -> ModelDocument {
    ModelDocument {
        name: "navier-square-ssss".into(),
        geometry: GeometrySpec::Rectangle {
            origin: [0.0, 0.0],
            width: 1.0,
            height: 1.0,
        },
        material: isotropic(200e9),
        layup: vec![0.0],
        thickness: 0.01,
        stiffeners: vec![],
        boundary: Boundary(BoundarySpec::ssss()),
        analysis: analysis(6, [11, 11], 3, Scheme::IsotropicQuartic),
    }
}

pub fn free_square() -> ModelDocument {
    ModelDocument {
        name: "free-square".into(),
        geometry: GeometrySpec::Rectangle {
            origin: [0.0, 0.0],
            width: 1.0,
            height: 1.0,
        },
        material: isotropic(200e9),
        layup: vec![0.0],
        thickness: 0.01,
        stiffeners: vec![],
        boundary: Boundary(BoundarySpec::all(EdgeCondition::Free)),
        analysis: analysis(8, [5, 5], 2, Scheme::None),
    }
}

const GAMMAS: [f64; 2] = [5.0, 10.0];
const DELTA_EPS: [f64; 2] = [0.0, 0.25];

/// Names of all built-in fixtures.
pub fn names() -> Vec<String> {
    let mut out: Vec<String> = ["circular-hole-clamped", "heart-isotropic-ssss"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    out.extend([15, 30, 45].iter().map(|t| format!("heart-angleply-{t}")));
    out.push("stiffened-circular-hole".into());
    for (layup, _) in ELLIPTICAL_LAYUPS {
        for g in GAMMAS {
            for de in DELTA_EPS {
                out.push(elliptical_name(layup, g, de));
            }
        }
    }
    out.push("navier-square-ssss".into());
    out.push("free-square".into());
    out
}

pub fn fixture(name: &str) -> Result<ModelDocument> {
    match name {
        "circular-hole-clamped" => return Ok(circular_hole_clamped()),
        "heart-isotropic-ssss" => return Ok(heart_isotropic_ssss()),
        "heart-angleply-15" => return Ok(heart_angleply(15.0)),
        "heart-angleply-30" => return Ok(heart_angleply(30.0)),
        "heart-angleply-45" => return Ok(heart_angleply(45.0)),
        "stiffened-circular-hole" => return Ok(stiffened_circular_hole()),
        "navier-square-ssss" => return Ok(navier_square()),
        "free-square" => return Ok(free_square()),
        _ => {}
    }
    for (layup, _) in ELLIPTICAL_LAYUPS {
        for g in GAMMAS {
            for de in DELTA_EPS {
                if name == elliptical_name(layup, g, de) {
                    return stiffened_elliptical(layup, g, de);
                }
            }
        }
    }
    Err(Error::Config(format!(
        "unknown fixture `{name}`; run `fixtures list` for the available names"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_listed_fixture_builds_and_validates() {
        let names = names();
        assert_eq!(names.len(), 24);
        for n in &names {
            let d = fixture(n).unwrap();
            assert_eq!(&d.name, n);
            d.validate().unwrap();
            d.normalization().unwrap();
            let back = ModelDocument::from_json(&d.to_json()).unwrap();
            assert_eq!(back, d);
        }
    }

    #[test]
    fn unknown_fixture_is_a_config_error() {
        assert!(fixture("nope").unwrap_err().is_input_error());
    }
}
