//! Model documents: the JSON input format and its validation.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::path::Path;

use crate::eigen::{BoundarySpec, EdgeCondition, Normalization};
use crate::error::{Error, Result};
use crate::geometry::HoleShape;
use crate::materials::{Lamina, SHEAR_CORRECTION};
use crate::nurbs::{NurbsCurve, NurbsSurface};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    #[serde(default)]
    pub name: String,
    pub geometry: GeometrySpec,
    pub material: MaterialSpec,
    /// Ply angles in degrees, bottom to top; plies share the thickness equally.
    #[serde(default = "default_layup")]
    pub layup: Vec<f64>,
    pub thickness: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stiffeners: Vec<StiffenerSpec>,
    pub boundary: Boundary,
    #[serde(default)]
    pub analysis: AnalysisSpec,
}

fn default_layup() -> Vec<f64> {
    vec![0.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeometrySpec {
    Rectangle {
        #[serde(default)]
        origin: [f64; 2],
        width: f64,
        height: f64,
    },
    RuledCutout {
        #[serde(default)]
        origin: [f64; 2],
        width: f64,
        height: f64,
        hole: HoleSpec,
    },
    Nurbs {
        surface: NurbsSurface,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum HoleSpec {
    Circle {
        center: [f64; 2],
        radius: f64,
    },
    Ellipse {
        center: [f64; 2],
        semi_axes: [f64; 2],
    },
    Heart,
    Curve {
        curve: NurbsCurve,
    },
}

impl HoleSpec {
    pub fn shape(&self) -> HoleShape {
        match self {
            HoleSpec::Circle { center, radius } => HoleShape::Circle {
                center: *center,
                radius: *radius,
            },
            HoleSpec::Ellipse { center, semi_axes } => HoleShape::Ellipse {
                center: *center,
                semi_axes: *semi_axes,
            },
            HoleSpec::Heart => HoleShape::Heart,
            HoleSpec::Curve { curve } => HoleShape::Curve(curve.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MaterialSpec {
    Isotropic {
        e: f64,
        nu: f64,
        rho: f64,
    },
    Orthotropic {
        e_l: f64,
        e_t: f64,
        g_lt: f64,
        g_tt: f64,
        nu_lt: f64,
        rho: f64,
    },
    /// Orthotropic ply given by moduli relative to `e_t`.
    Ratios {
        e_t: f64,
        e_l_ratio: f64,
        g_lt_ratio: f64,
        g_tt_ratio: f64,
        nu_lt: f64,
        rho: f64,
    },
}

impl MaterialSpec {
    /// Ply of this material at angle 0 with the given thickness.
    pub fn lamina(&self, thickness: f64) -> Lamina {
        match *self {
            MaterialSpec::Isotropic { e, nu, rho } => Lamina::isotropic(e, nu, rho, thickness),
            MaterialSpec::Orthotropic {
                e_l,
                e_t,
                g_lt,
                g_tt,
                nu_lt,
                rho,
            } => Lamina {
                e_l,
                e_t,
                g_lt,
                g_tt,
                nu_lt,
                rho,
                thickness,
                theta: 0.0,
            },
            MaterialSpec::Ratios {
                e_t,
                e_l_ratio,
                g_lt_ratio,
                g_tt_ratio,
                nu_lt,
                rho,
            } => Lamina {
                e_l: e_l_ratio * e_t,
                e_t,
                g_lt: g_lt_ratio * e_t,
                g_tt: g_tt_ratio * e_t,
                nu_lt,
                rho,
                thickness,
                theta: 0.0,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StiffenerSpec {
    pub path: PathSpec,
    pub section: SectionSpec,
    pub material: StiffenerMaterial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathSpec {
    /// Quadratic Bezier through three control points.
    Points {
        points: [[f64; 2]; 3],
    },
    Curve {
        curve: NurbsCurve,
    },
    /// Three-point parabola across the plate bounding box.
    Parametric {
        delta_eps: f64,
        delta_dist: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SectionSpec {
    Explicit {
        b_s: f64,
        h_s: f64,
        /// Centroid offset from the midplane; defaults to a blade on the top face.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        e: Option<f64>,
    },
    Ratios {
        gamma: f64,
        delta: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StiffenerMaterial {
    pub e: f64,
    pub nu: f64,
    pub rho: f64,
}

/// Edge conditions written as four letters (C, S or F) for the edges
/// x = min, y = min, x = max, y = max, e.g. "SSSS" or "CFFF".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Boundary(pub BoundarySpec);

impl Boundary {
    pub fn parse(code: &str) -> Result<Self> {
        let letters: Vec<char> = code.trim().chars().collect();
        if letters.len() != 4 {
            return Err(Error::Config(format!(
                "boundary code {code:?} must have four letters"
            )));
        }
        let mut edges = [EdgeCondition::Free; 4];
        for (e, c) in edges.iter_mut().zip(&letters) {
            *e = match c.to_ascii_uppercase() {
                'C' => EdgeCondition::Clamped,
                'S' => EdgeCondition::Simple,
                'F' => EdgeCondition::Free,
                _ => {
                    return Err(Error::Config(format!(
                        "boundary code {code:?}: unknown letter {c:?}"
                    )))
                }
            };
        }
        Ok(Boundary(BoundarySpec {
            x_min: edges[0],
            y_min: edges[1],
            x_max: edges[2],
            y_max: edges[3],
        }))
    }

    pub fn code(&self) -> String {
        let s = self.0;
        [s.x_min, s.y_min, s.x_max, s.y_max]
            .iter()
            .map(|e| match e {
                EdgeCondition::Clamped => 'C',
                EdgeCondition::Simple => 'S',
                EdgeCondition::Free => 'F',
            })
            .collect()
    }
}

impl Serialize for Boundary {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.code())
    }
}

impl<'de> Deserialize<'de> for Boundary {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let code = String::deserialize(d)?;
        Boundary::parse(&code).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    None,
    IsotropicQuartic,
    LaminateSqrt,
}

/// Frequency normalization. Parameters left out are taken from the model where it
/// defines them (density, thickness, plate width, moduli).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalizationSpec {
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thickness: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu12: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSpec {
    #[serde(default = "default_modes")]
    pub n_modes: usize,
    /// Each element is halved this many times in both directions.
    #[serde(default = "default_refine")]
    pub refine: u32,
    /// Knots inserted per span in u and v; overrides `refine` when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divisions: Option<[usize; 2]>,
    #[serde(default = "default_degree")]
    pub degree: usize,
    /// Gauss points per direction; degree + 1 when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<usize>,
    #[serde(default = "default_k_shear")]
    pub k_shear: f64,
    #[serde(default = "default_tol")]
    pub eigen_tol: f64,
    #[serde(default)]
    pub normalization: NormalizationSpec,
    /// Mode-shape sampling grid (points per direction).
    #[serde(default = "default_grid")]
    pub grid: usize,
}

fn default_modes() -> usize {
    8
}
fn default_refine() -> u32 {
    3
}
fn default_degree() -> usize {
    2
}
fn default_k_shear() -> f64 {
    SHEAR_CORRECTION
}
fn default_tol() -> f64 {
    1e-9
}
fn default_grid() -> usize {
    64
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        AnalysisSpec {
            n_modes: default_modes(),
            refine: default_refine(),
            divisions: None,
            degree: default_degree(),
            quadrature: None,
            k_shear: default_k_shear(),
            eigen_tol: default_tol(),
            normalization: NormalizationSpec::default(),
            grid: default_grid(),
        }
    }
}

fn schema(path: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn positive(path: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(schema(path, format!("must be positive, got {v}")))
    }
}

fn modulus(path: &str, v: f64) -> Result<()> {
    positive(path, v)?;
    if v < 1e4 {
        return Err(schema(
            path,
            format!("{v} Pa is implausibly small; moduli are in Pa"),
        ));
    }
    Ok(())
}

fn density(path: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0 && v < 1e5) {
        return Err(schema(path, format!("{v} is not a density in kg/m^3")));
    }
    Ok(())
}

fn poisson(path: &str, v: f64) -> Result<()> {
    if !(v > -1.0 && v < 0.5 + 1e-12) {
        return Err(schema(path, format!("{v} is outside (-1, 0.5]")));
    }
    Ok(())
}

impl ModelDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let doc: ModelDocument = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::Schema {
                path: if path.is_empty() || path == "." {
                    "$".into()
                } else {
                    path
                },
                message: e.into_inner().to_string(),
            }
        })?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model documents serialize")
    }

    /// Bounding box of the plate outline.
    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        match &self.geometry {
            GeometrySpec::Rectangle {
                origin,
                width,
                height,
            }
            | GeometrySpec::RuledCutout {
                origin,
                width,
                height,
                ..
            } => (*origin, [origin[0] + width, origin[1] + height]),
            GeometrySpec::Nurbs { surface } => {
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                for p in surface.net() {
                    lo = [lo[0].min(p.x), lo[1].min(p.y)];
                    hi = [hi[0].max(p.x), hi[1].max(p.y)];
                }
                (lo, hi)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.geometry {
            GeometrySpec::Rectangle { width, height, .. }
            | GeometrySpec::RuledCutout { width, height, .. } => {
                positive("geometry.width", *width)?;
                positive("geometry.height", *height)?;
            }
            GeometrySpec::Nurbs { .. } => {}
        }
        if let GeometrySpec::RuledCutout { hole, .. } = &self.geometry {
            match hole {
                HoleSpec::Circle { radius, .. } => positive("geometry.hole.radius", *radius)?,
                HoleSpec::Ellipse { semi_axes, .. } => {
                    positive("geometry.hole.semi_axes[0]", semi_axes[0])?;
                    positive("geometry.hole.semi_axes[1]", semi_axes[1])?;
                }
                HoleSpec::Heart | HoleSpec::Curve { .. } => {}
            }
        }
        match self.material {
            MaterialSpec::Isotropic { e, nu, rho } => {
                modulus("material.e", e)?;
                poisson("material.nu", nu)?;
                density("material.rho", rho)?;
            }
            MaterialSpec::Orthotropic {
                e_l,
                e_t,
                g_lt,
                g_tt,
                nu_lt,
                rho,
            } => {
                modulus("material.e_l", e_l)?;
                modulus("material.e_t", e_t)?;
                modulus("material.g_lt", g_lt)?;
                modulus("material.g_tt", g_tt)?;
                if !nu_lt.is_finite() {
                    return Err(schema("material.nu_lt", "must be finite"));
                }
                density("material.rho", rho)?;
            }
            MaterialSpec::Ratios {
                e_t,
                e_l_ratio,
                g_lt_ratio,
                g_tt_ratio,
                nu_lt,
                rho,
            } => {
                modulus("material.e_t", e_t)?;
                positive("material.e_l_ratio", e_l_ratio)?;
                positive("material.g_lt_ratio", g_lt_ratio)?;
                positive("material.g_tt_ratio", g_tt_ratio)?;
                if !nu_lt.is_finite() {
                    return Err(schema("material.nu_lt", "must be finite"));
                }
                density("material.rho", rho)?;
            }
        }
        if self.layup.is_empty() {
            return Err(schema("layup", "needs at least one ply"));
        }
        if let Some(i) = self.layup.iter().position(|a| !a.is_finite()) {
            return Err(schema(&format!("layup[{i}]"), "angle must be finite"));
        }
        positive("thickness", self.thickness)?;
        let (lo, hi) = self.bounding_box();
        if self.thickness >= (hi[0] - lo[0]).min(hi[1] - lo[1]) {
            return Err(schema(
                "thickness",
                "thickness must be well below the plate size (units are m)",
            ));
        }
        for (i, s) in self.stiffeners.iter().enumerate() {
            let at = |f: &str| format!("stiffeners[{i}].{f}");
            match s.section {
                SectionSpec::Explicit { b_s, h_s, e } => {
                    positive(&at("section.b_s"), b_s)?;
                    positive(&at("section.h_s"), h_s)?;
                    if let Some(e) = e {
                        if !e.is_finite() {
                            return Err(schema(&at("section.e"), "must be finite"));
                        }
                    }
                }
                SectionSpec::Ratios { gamma, delta } => {
                    positive(&at("section.gamma"), gamma)?;
                    positive(&at("section.delta"), delta)?;
                }
            }
            modulus(&at("material.e"), s.material.e)?;
            poisson(&at("material.nu"), s.material.nu)?;
            density(&at("material.rho"), s.material.rho)?;
            if let PathSpec::Parametric {
                delta_eps,
                delta_dist,
            } = s.path
            {
                for (f, v) in [
                    ("path.delta_eps", delta_eps),
                    ("path.delta_dist", delta_dist),
                ] {
                    if !(0.0..=1.0).contains(&v) {
                        return Err(schema(&at(f), format!("{v} is outside [0, 1]")));
                    }
                }
            }
        }
        let a = &self.analysis;
        if !(1..=8).contains(&a.degree) {
            return Err(schema("analysis.degree", "must be between 1 and 8"));
        }
        if a.refine > 8 {
            return Err(schema("analysis.refine", "at most 8 levels"));
        }
        if let Some(q) = a.quadrature {
            if !(1..=16).contains(&q) {
                return Err(schema("analysis.quadrature", "between 1 and 16 points"));
            }
        }
        positive("analysis.k_shear", a.k_shear)?;
        if !(a.eigen_tol > 0.0 && a.eigen_tol < 1e-3) {
            return Err(schema("analysis.eigen_tol", "must lie in (0, 1e-3)"));
        }
        if a.grid < 2 {
            return Err(schema(
                "analysis.grid",
                "needs at least 2 points per direction",
            ));
        }
        Ok(())
    }

    /// Normalization with missing parameters filled from the model.
    pub fn normalization(&self) -> Result<Normalization> {
        let n = &self.analysis.normalization;
        let (lo, hi) = self.bounding_box();
        let length = n.length.unwrap_or(hi[0] - lo[0]);
        let rho = n.rho.or(Some(self.material_density()));
        let h = n.thickness.unwrap_or(self.thickness);
        let missing = |what: &str| {
            Error::Config(format!(
                "normalization parameter `{what}` is required for this scheme"
            ))
        };
        let out = match n.scheme {
            Scheme::None => Normalization::None,
            Scheme::IsotropicQuartic => {
                let (e, nu) = match self.material {
                    MaterialSpec::Isotropic { e, nu, .. } => (Some(e), Some(nu)),
                    _ => (None, None),
                };
                Normalization::IsotropicQuartic {
                    rho: rho.ok_or_else(|| missing("rho"))?,
                    h,
                    a: length,
                    e: n.e.or(e).ok_or_else(|| missing("e"))?,
                    nu: n.nu.or(nu).ok_or_else(|| missing("nu"))?,
                }
            }
            Scheme::LaminateSqrt => {
                let ply = self.material.lamina(h);
                Normalization::LaminateSqrt {
                    rho: rho.ok_or_else(|| missing("rho"))?,
                    h,
                    a: length,
                    e1: n.e1.unwrap_or(ply.e_l),
                    e2: n.e2.unwrap_or(ply.e_t),
                    nu12: n.nu12.unwrap_or(ply.nu_lt),
                }
            }
        };
        out.validate()?;
        Ok(out)
    }

    fn material_density(&self) -> f64 {
        match self.material {
            MaterialSpec::Isotropic { rho, .. }
            | MaterialSpec::Orthotropic { rho, .. }
            | MaterialSpec::Ratios { rho, .. } => rho,
        }
    }
}

pub fn parse_model(path: &Path) -> Result<ModelDocument> {
    let text = std::fs::read_to_string(path)?;
    ModelDocument::from_json(&text)
}
