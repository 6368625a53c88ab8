use nalgebra::{DMatrix, SMatrix};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::materials::{PlateInertia, PlateRigidity};
use crate::nurbs::{ElementConnectivity, NurbsSurface, ParamPoint, RationalBasis};
use crate::quadrature::GaussLegendre;
use crate::sparse::CsrMatrix;

/// Components per control point: u0, v0, w0, beta_x, beta_y.
pub const DOFS_PER_NODE: usize = 5;

/// Elements per parallel batch; bounds the memory held by element matrices.
const BATCH: usize = 512;

/// Gauss points per parametric direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureRule {
    pub n_u: usize,
    pub n_v: usize,
}

impl QuadratureRule {
    /// Full integration, `(p+1) x (q+1)`.
    pub fn full(surface: &NurbsSurface) -> Self {
        QuadratureRule {
            n_u: surface.degree_u() + 1,
            n_v: surface.degree_v() + 1,
        }
    }

    pub fn uniform(n: usize) -> Self {
        QuadratureRule { n_u: n, n_v: n }
    }
}

/// Isogeometric FSDT plate on a single NURBS patch.
#[derive(Debug, Clone)]
pub struct PlateModel {
    surface: NurbsSurface,
    connectivity: ElementConnectivity,
    rigidity: PlateRigidity,
    inertia: PlateInertia,
    orientation: f64,
}

impl PlateModel {
    pub fn new(
        surface: NurbsSurface,
        rigidity: PlateRigidity,
        inertia: PlateInertia,
    ) -> Result<Self> {
        surface.check_jacobian()?;
        let connectivity = surface.connectivity();
        let orientation = surface.orientation();
        Ok(PlateModel {
            surface,
            connectivity,
            rigidity,
            inertia,
            orientation,
        })
    }

    pub fn surface(&self) -> &NurbsSurface {
        &self.surface
    }
    pub fn connectivity(&self) -> &ElementConnectivity {
        &self.connectivity
    }
    pub fn rigidity(&self) -> &PlateRigidity {
        &self.rigidity
    }
    pub fn inertia(&self) -> &PlateInertia {
        &self.inertia
    }
    pub fn n_elements(&self) -> usize {
        self.connectivity.ien.len()
    }
    pub fn n_nodes(&self) -> usize {
        self.connectivity.n_nodes
    }
    pub fn n_dofs(&self) -> usize {
        DOFS_PER_NODE * self.n_nodes()
    }

    pub fn with_rigidity(&self, rigidity: PlateRigidity) -> Self {
        PlateModel {
            rigidity,
            ..self.clone()
        }
    }

    /// Global DOF numbers of a set of net indices, node-major.
    pub fn dofs_of_net(&self, net: &[usize]) -> Vec<usize> {
        net.iter()
            .flat_map(|&g| {
                let node = self.connectivity.node_of_net[g];
                (0..DOFS_PER_NODE).map(move |c| DOFS_PER_NODE * node + c)
            })
            .collect()
    }

    pub fn element_dofs(&self, e: usize) -> Vec<usize> {
        self.dofs_of_net(&self.connectivity.ien[e])
    }

    /// Physical position of a parametric point.
    pub fn position(&self, p: ParamPoint) -> Result<[f64; 3]> {
        self.surface.eval_point(p)
    }

    /// Node adjacency through shared elements (each node lists itself).
    pub fn node_graph(&self) -> Vec<Vec<usize>> {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.n_nodes()];
        for e in 0..self.n_elements() {
            let nodes = self.connectivity.element_nodes(e);
            for &a in &nodes {
                adj[a].extend_from_slice(&nodes);
            }
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
            a.dedup();
        }
        adj
    }

    /// Strain operator at `p` inside element `e`.
    pub fn strain_operator(&self, e: usize, p: ParamPoint) -> Result<StrainOperator> {
        let (su, sv) = self.connectivity.spans[e];
        let basis = self.surface.rational_basis_in(su, sv, p);
        let op = StrainOperator::from_basis(&self.surface, &basis);
        if !(op.det_j * self.orientation > 0.0) {
            return Err(Error::Jacobian {
                element: e,
                det: op.det_j,
            });
        }
        Ok(op)
    }

    /// Gauss points of element `e` as (parametric point, parametric weight).
    pub fn gauss_points(&self, e: usize, rule: QuadratureRule) -> Vec<(ParamPoint, f64)> {
        let (su, sv) = self.connectivity.spans[e];
        let ku = self.surface.knots_u().values();
        let kv = self.surface.knots_v().values();
        let gu = GaussLegendre::new(rule.n_u).on(ku[su], ku[su + 1]);
        let gv = GaussLegendre::new(rule.n_v).on(kv[sv], kv[sv + 1]);
        let mut out = Vec::with_capacity(gu.len() * gv.len());
        for &(v, wv) in &gv {
            for &(u, wu) in &gu {
                out.push((ParamPoint::new(u, v), wu * wv));
            }
        }
        out
    }

    /// Element stiffness and mass, dense and node-major over `element_dofs(e)`.
    pub fn element_matrices(&self, e: usize, rule: QuadratureRule) -> Result<ElementMatrices> {
        let n_en = self.connectivity.ien[e].len();
        let nd = DOFS_PER_NODE * n_en;
        let dp = self.rigidity.dp();
        let mass = self.inertia.diagonal();
        let mut k = vec![0.0; nd * nd];
        let mut m = vec![0.0; nd * nd];
        for (p, w) in self.gauss_points(e, rule) {
            let op = self.strain_operator(e, p)?;
            let wj = w * op.det_j.abs();
            let blocks: Vec<SMatrix<f64, 8, 5>> = (0..n_en).map(|a| op.block(a)).collect();
            let db: Vec<SMatrix<f64, 8, 5>> = blocks.iter().map(|b| dp * b).collect();
            for a in 0..n_en {
                for b in a..n_en {
                    let kab = blocks[a].transpose() * db[b];
                    let rr = op.r[a] * op.r[b] * wj;
                    for i in 0..DOFS_PER_NODE {
                        for j in 0..DOFS_PER_NODE {
                            k[(5 * a + i) * nd + 5 * b + j] += wj * kab[(i, j)];
                        }
                        m[(5 * a + i) * nd + 5 * b + i] += mass[i] * rr;
                    }
                }
            }
        }
        // mirror the computed upper blocks so both matrices are exactly symmetric
        for a in 0..n_en {
            for b in 0..a {
                for i in 0..DOFS_PER_NODE {
                    for j in 0..DOFS_PER_NODE {
                        let (r, c) = (5 * a + i, 5 * b + j);
                        k[r * nd + c] = k[c * nd + r];
                        m[r * nd + c] = m[c * nd + r];
                    }
                }
            }
        }
        Ok(ElementMatrices {
            dofs: self.element_dofs(e),
            k,
            m,
        })
    }

    /// Empty K and M sharing the plate's sparsity pattern.
    pub fn empty_system(&self) -> GlobalSystem {
        let pattern = CsrMatrix::from_node_graph(&self.node_graph(), DOFS_PER_NODE);
        GlobalSystem {
            k: pattern.clone(),
            m: pattern,
        }
    }

    pub fn assemble(&self, rule: QuadratureRule) -> Result<GlobalSystem> {
        self.assemble_with(rule, Execution::Parallel)
    }

    /// Element matrices are computed in batches (in parallel when requested) and
    /// scattered in element order, so the result does not depend on the schedule.
    pub fn assemble_with(&self, rule: QuadratureRule, exec: Execution) -> Result<GlobalSystem> {
        let mut sys = self.empty_system();
        let n = self.n_elements();
        let mut lo = 0;
        while lo < n {
            let hi = (lo + BATCH).min(n);
            let batch = exec.map(hi - lo, |i| self.element_matrices(lo + i, rule));
            for em in batch {
                em?.scatter(&mut sys);
            }
            lo = hi;
        }
        Ok(sys)
    }

    /// Patch area by Gauss quadrature.
    pub fn area(&self, rule: QuadratureRule) -> Result<f64> {
        let mut total = 0.0;
        for e in 0..self.n_elements() {
            for (p, w) in self.gauss_points(e, rule) {
                total += w * self.strain_operator(e, p)?.det_j.abs();
            }
        }
        Ok(total)
    }
}

/// Rational basis values and physical first derivatives at one point.
#[derive(Debug, Clone)]
pub struct StrainOperator {
    pub net: Vec<usize>,
    pub r: Vec<f64>,
    pub rx: Vec<f64>,
    pub ry: Vec<f64>,
    /// Planar Jacobian determinant `x_xi y_eta - x_eta y_xi` (sign follows the patch).
    pub det_j: f64,
}

impl StrainOperator {
    pub fn from_basis(surface: &NurbsSurface, basis: &RationalBasis) -> Self {
        let net = surface.net();
        let (mut x_xi, mut x_eta, mut y_xi, mut y_eta) = (0.0, 0.0, 0.0, 0.0);
        for (k, &g) in basis.net.iter().enumerate() {
            x_xi += basis.d_xi[k] * net[g].x;
            x_eta += basis.d_eta[k] * net[g].x;
            y_xi += basis.d_xi[k] * net[g].y;
            y_eta += basis.d_eta[k] * net[g].y;
        }
        let det = x_xi * y_eta - x_eta * y_xi;
        let n = basis.net.len();
        let mut rx = Vec::with_capacity(n);
        let mut ry = Vec::with_capacity(n);
        for k in 0..n {
            let (a, b) = (basis.d_xi[k], basis.d_eta[k]);
            rx.push((y_eta * a - y_xi * b) / det);
            ry.push((-x_eta * a + x_xi * b) / det);
        }
        StrainOperator {
            net: basis.net.clone(),
            r: basis.values.clone(),
            rx,
            ry,
            det_j: det,
        }
    }

    /// 8x5 block of local function `a`.
    pub fn block(&self, a: usize) -> SMatrix<f64, 8, 5> {
        let (r, x, y) = (self.r[a], self.rx[a], self.ry[a]);
        let mut b = SMatrix::<f64, 8, 5>::zeros();
        b[(0, 0)] = x;
        b[(1, 1)] = y;
        b[(2, 0)] = y;
        b[(2, 1)] = x;
        b[(3, 3)] = x;
        b[(4, 4)] = y;
        b[(5, 3)] = y;
        b[(5, 4)] = x;
        b[(6, 2)] = x;
        b[(6, 3)] = r;
        b[(7, 2)] = y;
        b[(7, 4)] = r;
        b
    }

    /// Full `8 x 5 n_en` operator.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.r.len();
        let mut m = DMatrix::zeros(8, DOFS_PER_NODE * n);
        for a in 0..n {
            m.view_mut((0, DOFS_PER_NODE * a), (8, DOFS_PER_NODE))
                .copy_from(&self.block(a));
        }
        m
    }

    /// Generalized strains of a local node-major displacement vector.
    pub fn strains(&self, d: &[f64]) -> [f64; 8] {
        let mut out = [0.0; 8];
        for a in 0..self.r.len() {
            let e = self.block(a) * nalgebra::Vector5::from_column_slice(&d[5 * a..5 * a + 5]);
            for i in 0..8 {
                out[i] += e[i];
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct ElementMatrices {
    pub dofs: Vec<usize>,
    /// Row-major dense blocks.
    pub k: Vec<f64>,
    pub m: Vec<f64>,
}

impl ElementMatrices {
    pub fn scatter(&self, sys: &mut GlobalSystem) {
        let nd = self.dofs.len();
        for (i, &gi) in self.dofs.iter().enumerate() {
            for (j, &gj) in self.dofs.iter().enumerate() {
                sys.k.add(gi, gj, self.k[i * nd + j]);
                sys.m.add(gi, gj, self.m[i * nd + j]);
            }
        }
    }
}

/// Global stiffness and mass over all plate DOFs.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalSystem {
    pub k: CsrMatrix,
    pub m: CsrMatrix,
}

impl GlobalSystem {
    /// Sum of mass entries coupling component `c` with itself (total translational mass
    /// for c in 0..3).
    pub fn component_mass(&self, c: usize) -> f64 {
        let mut total = 0.0;
        for i in (c..self.m.n()).step_by(DOFS_PER_NODE) {
            let (cols, vals) = self.m.row(i);
            for (&j, v) in cols.iter().zip(vals) {
                if j % DOFS_PER_NODE == c {
                    total += v;
                }
            }
        }
        total
    }
}
