//! End-to-end modal analysis of a model document.

use serde::Serialize;
use std::time::Instant;

use crate::eigen::{
    apply_boundary_conditions, constrained_dofs, solve_modes, EigenOptions, ModeSet, ReducedSystem,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{analysis_surface, level_divisions, ruled_cutout};
use crate::materials::{
    laminate_rigidity, section_from_ratios, stiffener_rigidity, LaminateStack, PlateInertia,
    StiffenerRatios, StiffenerRigidity, StiffenerSection,
};
use crate::model::{GeometrySpec, ModelDocument, PathSpec, SectionSpec, StiffenerSpec};
use crate::nurbs::{ControlPoint, NurbsCurve, NurbsSurface, ParamPoint};
use crate::plate::{GlobalSystem, PlateModel, QuadratureRule, DOFS_PER_NODE};
use crate::stiffener::{add_stiffener, StiffenerPath};

/// Run-time options that do not change the results.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub exec: Execution,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetadata {
    pub name: String,
    pub boundary: String,
    pub degree: usize,
    pub quadrature: usize,
    pub n_elements: usize,
    pub n_control_points: usize,
    pub n_dofs: usize,
    pub n_free_dofs: usize,
    pub n_stiffener_points: usize,
    pub n_modes: usize,
    pub normalization: String,
    pub eigen_iterations: usize,
    pub eigen_shift: f64,
    pub threads: usize,
    pub wall_time_s: f64,
}

/// w0 of every mode sampled on a structured parametric grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeGrid {
    /// Points per direction.
    pub n: usize,
    /// Physical positions, u fastest.
    pub points: Vec<[f64; 3]>,
    /// One field per mode, same order as `points`.
    pub w: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultBundle {
    pub omega: Vec<f64>,
    pub omega_tilde: Vec<f64>,
    pub grid: ModeGrid,
    pub metadata: RunMetadata,
}

/// Intermediate products of the pipeline, kept for checks and tools.
pub struct Assembled {
    pub model: PlateModel,
    pub system: GlobalSystem,
    pub reduced: ReducedSystem,
    pub n_stiffener_points: usize,
    pub rule: QuadratureRule,
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(Error::at(name))
}

/// Coarse geometry of the document before refinement.
pub fn base_surface(doc: &ModelDocument) -> Result<NurbsSurface> {
    match &doc.geometry {
        GeometrySpec::Rectangle {
            origin,
            width,
            height,
        } => NurbsSurface::rectangle(*origin, *width, *height, 1, 1),
        GeometrySpec::RuledCutout {
            origin,
            width,
            height,
            hole,
        } => ruled_cutout(*origin, *width, *height, &hole.shape()),
        GeometrySpec::Nurbs { surface } => Ok(surface.clone()),
    }
}

pub fn laminate(doc: &ModelDocument) -> Result<LaminateStack> {
    let base = doc.material.lamina(doc.thickness);
    let angles: Vec<f64> = doc.layup.iter().map(|d| d.to_radians()).collect();
    LaminateStack::uniform(base, doc.thickness, &angles)
}

pub fn stiffener_path(doc: &ModelDocument, spec: &StiffenerSpec) -> Result<StiffenerPath> {
    match &spec.path {
        PathSpec::Points { points } => StiffenerPath::new(NurbsCurve::bezier(
            points
                .iter()
                .map(|p| ControlPoint::planar(p[0], p[1], 1.0))
                .collect(),
        )?),
        PathSpec::Curve { curve } => StiffenerPath::new(curve.clone()),
        PathSpec::Parametric {
            delta_eps,
            delta_dist,
        } => {
            let (lo, hi) = doc.bounding_box();
            StiffenerPath::from_parameters(lo, hi, *delta_eps, *delta_dist)
        }
    }
}

pub fn stiffener_section(
    doc: &ModelDocument,
    spec: &StiffenerSpec,
    d11: f64,
) -> Result<StiffenerSection> {
    let m = spec.material;
    let g = m.e / (2.0 * (1.0 + m.nu));
    match spec.section {
        SectionSpec::Explicit { b_s, h_s, e } => {
            let mut s = StiffenerSection::surface_mounted(b_s, h_s, doc.thickness, m.e, g, m.rho);
            if let Some(e) = e {
                s.e = e;
            }
            Ok(s)
        }
        SectionSpec::Ratios { gamma, delta } => {
            let (lo, hi) = doc.bounding_box();
            section_from_ratios(
                StiffenerRatios { gamma, delta },
                hi[0] - lo[0],
                doc.thickness,
                d11,
                m.e,
                g,
                m.rho,
            )
        }
    }
}

/// Rigidity and mass of a stiffener section on the document's laminate.
pub fn stiffener_rigidity_of(
    doc: &ModelDocument,
    spec: &StiffenerSpec,
) -> Result<StiffenerRigidity> {
    let d11 = laminate_rigidity(&laminate(doc)?, doc.analysis.k_shear)?.d[(0, 0)];
    stiffener_rigidity(&stiffener_section(doc, spec, d11)?)
}

/// Geometry, assembly, stiffeners and boundary conditions.
pub fn assemble(doc: &ModelDocument, opts: &RunOptions) -> Result<Assembled> {
    let a = &doc.analysis;
    let surface = stage("geometry", {
        let divisions = a.divisions.unwrap_or([level_divisions(a.refine); 2]);
        base_surface(doc).and_then(|s| analysis_surface(&s, a.degree, divisions))
    })?;
    let stack = stage("materials", laminate(doc))?;
    let rigidity = stage("materials", laminate_rigidity(&stack, a.k_shear))?;
    let model = stage(
        "geometry",
        PlateModel::new(surface, rigidity, PlateInertia::of(&stack)),
    )?;
    let rule = match a.quadrature {
        Some(n) => QuadratureRule::uniform(n),
        None => QuadratureRule::full(model.surface()),
    };
    let mut system = stage("assembly", model.assemble_with(rule, opts.exec))?;
    let mut n_stiffener_points = 0;
    for spec in &doc.stiffeners {
        let added = (|| {
            let path = stiffener_path(doc, spec)?;
            let rig = stiffener_rigidity(&stiffener_section(doc, spec, rigidity.d[(0, 0)])?)?;
            add_stiffener(&mut system, &model, &path, &rig, opts.exec)
        })();
        n_stiffener_points += stage("stiffener", added)?.n_points;
    }
    let fixed = constrained_dofs(&model, &doc.boundary.0);
    let reduced = stage("boundary", apply_boundary_conditions(&system, &fixed))?;
    Ok(Assembled {
        model,
        system,
        reduced,
        n_stiffener_points,
        rule,
    })
}

/// Samples w0 of each mode at `n x n` parametric points.
pub fn sample_modes(
    model: &PlateModel,
    reduced: &ReducedSystem,
    modes: &ModeSet,
    n: usize,
    exec: Execution,
) -> Result<ModeGrid> {
    let ([u0, u1], [v0, v1]) = model.surface().domain();
    let full: Vec<Vec<f64>> = modes.phi.iter().map(|x| reduced.expand(x)).collect();
    let node_of_net = &model.connectivity().node_of_net;
    let samples: Vec<Result<([f64; 3], Vec<f64>)>> = exec.map(n * n, |k| {
        let (i, j) = (k % n, k / n);
        let p = ParamPoint::new(
            u0 + (u1 - u0) * i as f64 / (n - 1) as f64,
            v0 + (v1 - v0) * j as f64 / (n - 1) as f64,
        );
        let basis = model.surface().rational_basis(p)?;
        let x = model.position(p)?;
        let w = full
            .iter()
            .map(|phi| {
                basis
                    .net
                    .iter()
                    .zip(&basis.values)
                    .map(|(&g, r)| r * phi[DOFS_PER_NODE * node_of_net[g] + 2])
                    .sum()
            })
            .collect();
        Ok((x, w))
    });
    let mut points = Vec::with_capacity(n * n);
    let mut w = vec![Vec::with_capacity(n * n); modes.len()];
    for s in samples {
        let (x, vals) = s?;
        points.push(x);
        for (m, v) in vals.into_iter().enumerate() {
            w[m].push(v);
        }
    }
    Ok(ModeGrid { n, points, w })
}

pub fn run_analysis(doc: &ModelDocument, opts: &RunOptions) -> Result<ResultBundle> {
    let start = Instant::now();
    doc.validate()?;
    let normalization = stage("normalization", doc.normalization())?;
    let asm = assemble(doc, opts)?;
    let a = &doc.analysis;
    let eig = EigenOptions {
        tol: a.eigen_tol,
        exec: opts.exec,
        ..EigenOptions::default()
    };
    let modes = stage("eigensolve", solve_modes(&asm.reduced, a.n_modes, &eig))?;
    let omega_tilde = modes
        .omega
        .iter()
        .map(|&w| normalization.normalize(w))
        .collect();
    let grid = stage(
        "sampling",
        sample_modes(&asm.model, &asm.reduced, &modes, a.grid, opts.exec),
    )?;
    let metadata = RunMetadata {
        name: doc.name.clone(),
        boundary: doc.boundary.code(),
        degree: a.degree,
        quadrature: asm.rule.n_u.max(asm.rule.n_v),
        n_elements: asm.model.n_elements(),
        n_control_points: asm.model.surface().net().len(),
        n_dofs: asm.model.n_dofs(),
        n_free_dofs: asm.reduced.free.len(),
        n_stiffener_points: asm.n_stiffener_points,
        n_modes: modes.len(),
        normalization: serde_json::to_value(a.normalization.scheme)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default(),
        eigen_iterations: modes.iterations,
        eigen_shift: modes.shift,
        threads: current_threads(opts.exec),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok(ResultBundle {
        omega: modes.omega,
        omega_tilde,
        grid,
        metadata,
    })
}

fn current_threads(exec: Execution) -> usize {
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => rayon::current_num_threads(),
        _ => 1,
    }
}

/// Convenience for callers that only need the normalized frequencies.
pub fn normalized_frequencies(doc: &ModelDocument, opts: &RunOptions) -> Result<Vec<f64>> {
    let mut d = doc.clone();
    d.analysis.grid = 2;
    Ok(run_analysis(&d, opts)?.omega_tilde)
}
