use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::plate::{GlobalSystem, PlateModel, DOFS_PER_NODE};
use crate::sparse::{CsrMatrix, SkylineCholesky};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeCondition {
    Free,
    /// Hard simple support: u0, v0, w0 and the rotation about the edge normal.
    Simple,
    Clamped,
}

/// Conditions on the four straight outer edges x = xmin, x = xmax, y = ymin, y = ymax.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundarySpec {
    pub x_min: EdgeCondition,
    pub x_max: EdgeCondition,
    pub y_min: EdgeCondition,
    pub y_max: EdgeCondition,
}

impl BoundarySpec {
    pub fn all(c: EdgeCondition) -> Self {
        BoundarySpec {
            x_min: c,
            x_max: c,
            y_min: c,
            y_max: c,
        }
    }
    pub fn ssss() -> Self {
        Self::all(EdgeCondition::Simple)
    }
    pub fn cccc() -> Self {
        Self::all(EdgeCondition::Clamped)
    }
    pub fn free() -> Self {
        Self::all(EdgeCondition::Free)
    }
}

/// Components fixed by an edge condition on an edge of constant x (`x_edge`) or constant y.
fn fixed_components(c: EdgeCondition, x_edge: bool) -> &'static [usize] {
    match (c, x_edge) {
        (EdgeCondition::Free, _) => &[],
        (EdgeCondition::Clamped, _) => &[0, 1, 2, 3, 4],
        (EdgeCondition::Simple, true) => &[0, 1, 2, 4],
        (EdgeCondition::Simple, false) => &[0, 1, 2, 3],
    }
}

/// Constrained global DOFs, ascending and unique.
///
/// Candidates are control points on the outer parametric boundary (the last v row of
/// a closed cutout patch, all four parametric edges otherwise). They are assigned to
/// edges by the bounding-box predicates, with tolerance 1e-9 times the patch size.
pub fn constrained_dofs(model: &PlateModel, spec: &BoundarySpec) -> Vec<usize> {
    let s = model.surface();
    let (nu, nv) = (s.n_u(), s.n_v());
    let mut candidates = Vec::new();
    for j in 0..nv {
        for i in 0..nu {
            let outer = if s.periodic_u() {
                j == nv - 1
            } else {
                i == 0 || i == nu - 1 || j == 0 || j == nv - 1
            };
            if outer {
                candidates.push(j * nu + i);
            }
        }
    }
    let net = s.net();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &g in &candidates {
        x0 = x0.min(net[g].x);
        x1 = x1.max(net[g].x);
        y0 = y0.min(net[g].y);
        y1 = y1.max(net[g].y);
    }
    let tol = 1e-9 * s.extent().max(1.0);
    let mut fixed = Vec::new();
    for &g in &candidates {
        let p = net[g];
        let node = model.connectivity().node_of_net[g];
        let mut comps: Vec<usize> = Vec::new();
        for (on, c, x_edge) in [
            ((p.x - x0).abs() <= tol, spec.x_min, true),
            ((p.x - x1).abs() <= tol, spec.x_max, true),
            ((p.y - y0).abs() <= tol, spec.y_min, false),
            ((p.y - y1).abs() <= tol, spec.y_max, false),
        ] {
            if on {
                comps.extend_from_slice(fixed_components(c, x_edge));
            }
        }
        fixed.extend(comps.into_iter().map(|c| DOFS_PER_NODE * node + c));
    }
    fixed.sort_unstable();
    fixed.dedup();
    fixed
}

/// K and M restricted to the free DOFs.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub k: CsrMatrix,
    pub m: CsrMatrix,
    /// Global DOF of each reduced row.
    pub free: Vec<usize>,
    pub n_full: usize,
}

impl ReducedSystem {
    /// Scatters a reduced vector back to all DOFs (zeros at constrained DOFs).
    pub fn expand(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_full];
        for (k, &g) in self.free.iter().enumerate() {
            out[g] = x[k];
        }
        out
    }
}

pub fn apply_boundary_conditions(
    sys: &GlobalSystem,
    constrained: &[usize],
) -> Result<ReducedSystem> {
    let n = sys.k.n();
    let mut is_fixed = vec![false; n];
    for &c in constrained {
        if c >= n {
            return Err(Error::Config(format!("constrained DOF {c} does not exist")));
        }
        is_fixed[c] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&i| !is_fixed[i]).collect();
    if free.is_empty() {
        return Err(Error::OverConstrained);
    }
    Ok(ReducedSystem {
        k: sys.k.submatrix(&free),
        m: sys.m.submatrix(&free),
        free,
        n_full: n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Relative eigen-residual target.
    pub tol: f64,
    pub seed: u64,
    pub max_iter: usize,
    pub exec: Execution,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            tol: 1e-9,
            seed: 0x5eed_1234_abcd,
            max_iter: 2000,
            exec: Execution::Parallel,
        }
    }
}

/// Lowest eigenpairs of `K phi = omega^2 M phi`, ascending, M-orthonormal.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    pub omega2: Vec<f64>,
    pub omega: Vec<f64>,
    /// Mode vectors over the free DOFs of the reduced system.
    pub phi: Vec<Vec<f64>>,
    /// Shift used for the factorization.
    pub shift: f64,
    pub iterations: usize,
}

impl ModeSet {
    pub fn len(&self) -> usize {
        self.omega.len()
    }
    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }
}

/// Systems up to this size are solved densely.
const DENSE_LIMIT: usize = 60;

pub fn solve_modes(sys: &ReducedSystem, n_modes: usize, opts: &EigenOptions) -> Result<ModeSet> {
    let n = sys.k.n();
    if n_modes == 0 {
        return Ok(ModeSet {
            omega2: vec![],
            omega: vec![],
            phi: vec![],
            shift: 0.0,
            iterations: 0,
        });
    }
    if n_modes > n {
        return Err(Error::Config(format!(
            "{n_modes} modes requested but only {n} free DOFs"
        )));
    }
    let kd = sys.k.diagonal();
    let md = sys.m.diagonal();
    if let Some(i) = md.iter().position(|&m| !(m > 0.0)) {
        return Err(Error::Factorization(format!(
            "mass matrix has non-positive diagonal at DOF {i}"
        )));
    }
    let scale = kd.iter().zip(&md).fold(0.0f64, |a, (k, m)| a.max(k / m));
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Factorization(
            "stiffness matrix has no positive diagonal".into(),
        ));
    }
    let (values, vectors, shift, iterations) = if n <= DENSE_LIMIT {
        let (v, x) = dense_modes(sys, n_modes)?;
        (v, x, 0.0, 0)
    } else {
        subspace_iteration(sys, n_modes, opts, scale)?
    };
    let mut phi = vectors;
    for x in phi.iter_mut() {
        orient(x);
    }
    let omega = values.iter().map(|&l| l.max(0.0).sqrt()).collect();
    Ok(ModeSet {
        omega2: values,
        omega,
        phi,
        shift,
        iterations,
    })
}

/// Makes the largest-magnitude entry positive (first one on ties).
fn orient(x: &mut [f64]) {
    let mut best = 0;
    for (i, v) in x.iter().enumerate() {
        if v.abs() > x[best].abs() {
            best = i;
        }
    }
    if x[best] < 0.0 {
        for v in x.iter_mut() {
            *v = -*v;
        }
    }
}

fn to_dmatrix(a: &CsrMatrix) -> DMatrix<f64> {
    let n = a.n();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        let (c, v) = a.row(i);
        for (&j, &x) in c.iter().zip(v) {
            d[(i, j)] = x;
        }
    }
    d
}

/// Generalized symmetric eigenproblem via Cholesky of M; ascending order.
fn dense_generalized(k: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let chol = m.clone().cholesky().ok_or_else(|| {
        Error::Factorization("projected mass matrix is not positive definite".into())
    })?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Factorization("singular projected mass factor".into()))?;
    let mut c = &linv * k * linv.transpose();
    c = (&c + c.transpose()) * 0.5;
    let eig = c.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let q = linv.transpose() * &eig.eigenvectors;
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = DMatrix::zeros(q.nrows(), order.len());
    for (new, &old) in order.iter().enumerate() {
        vecs.set_column(new, &q.column(old));
    }
    Ok((vals, vecs))
}

fn dense_modes(sys: &ReducedSystem, n_modes: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let (vals, vecs) = dense_generalized(&to_dmatrix(&sys.k), &to_dmatrix(&sys.m))?;
    let x = (0..n_modes)
        .map(|j| vecs.column(j).iter().copied().collect())
        .collect();
    Ok((vals[..n_modes].to_vec(), x))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Factors `K - sigma M`, trying sigma = 0 first and then small negative shifts.
fn shifted_factor(sys: &ReducedSystem, scale: f64) -> Result<(SkylineCholesky, f64)> {
    let mut last = None;
    for sigma in [
        0.0,
        -1e-10 * scale,
        -1e-8 * scale,
        -1e-6 * scale,
        -1e-4 * scale,
    ] {
        let a = if sigma == 0.0 {
            sys.k.clone()
        } else {
            sys.k.add_scaled(-sigma, &sys.m)
        };
        match SkylineCholesky::factor(&a, 1e-12) {
            Ok(f) => return Ok((f, sigma)),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one shift tried"))
}

type Solution = (Vec<f64>, Vec<Vec<f64>>, f64, usize);

/// Block shift-invert subspace iteration with Rayleigh-Ritz projection.
fn subspace_iteration(
    sys: &ReducedSystem,
    nev: usize,
    opts: &EigenOptions,
    scale: f64,
) -> Result<Solution> {
    let n = sys.k.n();
    let p = (2 * nev).max(nev + 8).min(n);
    let (factor, sigma) = shifted_factor(sys, scale)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x: Vec<Vec<f64>> = (0..p)
        .map(|_| (0..n).map(|_| rng.random::<f64>() - 0.5).collect())
        .collect();
    let mut worst = f64::INFINITY;
    for iter in 1..=opts.max_iter {
        let z: Vec<Vec<f64>> = opts.exec.map(p, |j| {
            let mut y = sys.m.mul(&x[j]);
            factor.solve_in_place(&mut y);
            let norm = dot(&y, &y).sqrt();
            y.iter_mut().for_each(|v| *v /= norm);
            y
        });
        let kz: Vec<Vec<f64>> = opts.exec.map(p, |j| sys.k.mul(&z[j]));
        let mz: Vec<Vec<f64>> = opts.exec.map(p, |j| sys.m.mul(&z[j]));
        let mut kr = DMatrix::zeros(p, p);
        let mut mr = DMatrix::zeros(p, p);
        for i in 0..p {
            for j in i..p {
                let (a, b) = (dot(&z[i], &kz[j]), dot(&z[i], &mz[j]));
                kr[(i, j)] = a;
                kr[(j, i)] = a;
                mr[(i, j)] = b;
                mr[(j, i)] = b;
            }
        }
        let (theta, q) = dense_generalized(&kr, &mr)?;
        let combine = |basis: &[Vec<f64>], col: usize| -> Vec<f64> {
            let mut out = vec![0.0; n];
            for (i, b) in basis.iter().enumerate() {
                let c = q[(i, col)];
                for (o, v) in out.iter_mut().zip(b) {
                    *o += c * v;
                }
            }
            out
        };
        x = opts.exec.map(p, |j| combine(&z, j));
        let residuals: Vec<bool> = opts.exec.map(nev, |i| {
            let kx = combine(&kz, i);
            let mx = combine(&mz, i);
            let r: f64 = kx
                .iter()
                .zip(&mx)
                .map(|(a, b)| (a - theta[i] * b).powi(2))
                .sum::<f64>()
                .sqrt();
            let mnorm = dot(&mx, &mx).sqrt();
            let res = r / mnorm;
            // rigid-body modes have no meaningful relative residual
            if theta[i].abs() <= 1e-9 * scale {
                res <= 1e-12 * scale
            } else {
                res <= opts.tol * theta[i].abs()
            }
        });
        if residuals.iter().all(|&ok| ok) {
            let vals = theta[..nev].to_vec();
            return Ok((vals, x[..nev].to_vec(), sigma, iter));
        }
        worst = residuals.iter().filter(|ok| !**ok).count() as f64;
    }
    Err(Error::NonConvergence(format!(
        "{} of {nev} modes above residual tolerance {:.1e} after {} iterations (block size {p}, shift {sigma:.3e})",
        worst, opts.tol, opts.max_iter
    )))
}

/// Per-mode quality measures, for diagnostics and tests.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeCheck {
    /// max |phi_i^T M phi_j - delta_ij|
    pub orthonormality: f64,
    /// max |phi_i^T K phi_j - omega_i^2 delta_ij| / max omega^2
    pub k_orthogonality: f64,
    /// max over modes of ||K phi - omega^2 M phi|| / (omega^2 ||M phi||)
    pub residual: f64,
}

pub fn check_modes(sys: &ReducedSystem, modes: &ModeSet) -> ModeCheck {
    let n = modes.len();
    let kphi: Vec<Vec<f64>> = modes.phi.iter().map(|x| sys.k.mul(x)).collect();
    let mphi: Vec<Vec<f64>> = modes.phi.iter().map(|x| sys.m.mul(x)).collect();
    let lmax = modes
        .omega2
        .iter()
        .fold(0.0f64, |a, b| a.max(b.abs()))
        .max(f64::MIN_POSITIVE);
    let (mut orth, mut korth, mut res) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..n {
        for j in 0..n {
            let d = if i == j { 1.0 } else { 0.0 };
            orth = orth.max((dot(&modes.phi[i], &mphi[j]) - d).abs());
            korth = korth.max((dot(&modes.phi[i], &kphi[j]) - modes.omega2[i] * d).abs() / lmax);
        }
        let r: f64 = kphi[i]
            .iter()
            .zip(&mphi[i])
            .map(|(a, b)| (a - modes.omega2[i] * b).powi(2))
            .sum::<f64>()
            .sqrt();
        res = res.max(r / (modes.omega2[i].abs() * dot(&mphi[i], &mphi[i]).sqrt()));
    }
    ModeCheck {
        orthonormality: orth,
        k_orthogonality: korth,
        residual: res,
    }
}

/// Frequency scaling with all parameters resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalization {
    /// omega_tilde = omega (no scaling).
    None,
    /// omega_tilde = [rho h omega^2 a^4 / (D (1 - nu^2))]^(1/4), D = E h^3 / 12(1 - nu^2).
    IsotropicQuartic {
        rho: f64,
        h: f64,
        a: f64,
        e: f64,
        nu: f64,
    },
    /// omega_tilde = omega a^2 sqrt(rho h / D0), D0 = E1 h^3 / 12(1 - nu12 nu21).
    LaminateSqrt {
        rho: f64,
        h: f64,
        a: f64,
        e1: f64,
        e2: f64,
        nu12: f64,
    },
}

impl Normalization {
    pub fn validate(&self) -> Result<()> {
        let vals: Vec<f64> = match *self {
            Normalization::None => vec![],
            Normalization::IsotropicQuartic { rho, h, a, e, nu } => {
                if !(nu.abs() < 1.0) {
                    return Err(Error::Config("Poisson ratio must lie in (-1, 1)".into()));
                }
                vec![rho, h, a, e]
            }
            Normalization::LaminateSqrt {
                rho,
                h,
                a,
                e1,
                e2,
                nu12,
            } => {
                if !(nu12 * nu12 * e2 / e1 < 1.0) {
                    return Err(Error::Config("nu12 * nu21 must be below 1".into()));
                }
                vec![rho, h, a, e1, e2]
            }
        };
        if vals.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Config(
                "normalization parameters must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Factor c with omega_tilde = (c omega^2)^k, and the exponent k.
    fn factor(&self) -> (f64, f64) {
        match *self {
            Normalization::None => (1.0, 0.5),
            Normalization::IsotropicQuartic { rho, h, a, e, nu } => {
                let d = e * h.powi(3) / (12.0 * (1.0 - nu * nu));
                (rho * h * a.powi(4) / (d * (1.0 - nu * nu)), 0.25)
            }
            Normalization::LaminateSqrt {
                rho,
                h,
                a,
                e1,
                e2,
                nu12,
            } => {
                let nu21 = nu12 * e2 / e1;
                let d0 = e1 * h.powi(3) / (12.0 * (1.0 - nu12 * nu21));
                (rho * h * a.powi(4) / d0, 0.5)
            }
        }
    }

    pub fn normalize(&self, omega: f64) -> f64 {
        let (c, k) = self.factor();
        (c * omega * omega).powf(k)
    }

    pub fn denormalize(&self, omega_tilde: f64) -> f64 {
        let (c, k) = self.factor();
        (omega_tilde.powf(1.0 / k) / c).sqrt()
    }
}
