use nalgebra::{Matrix2, Matrix3, SMatrix};

use crate::error::{Error, Result};

pub type Matrix5 = SMatrix<f64, 5, 5>;
pub type Matrix8 = SMatrix<f64, 8, 8>;

/// Shear correction factor used for plates and rectangular stiffener sections.
pub const SHEAR_CORRECTION: f64 = 5.0 / 6.0;

/// One orthotropic ply. Angles in radians, SI units throughout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lamina {
    pub e_l: f64,
    pub e_t: f64,
    pub g_lt: f64,
    pub g_tt: f64,
    pub nu_lt: f64,
    pub rho: f64,
    pub thickness: f64,
    pub theta: f64,
}

impl Lamina {
    pub fn isotropic(e: f64, nu: f64, rho: f64, thickness: f64) -> Self {
        let g = e / (2.0 * (1.0 + nu));
        Lamina {
            e_l: e,
            e_t: e,
            g_lt: g,
            g_tt: g,
            nu_lt: nu,
            rho,
            thickness,
            theta: 0.0,
        }
    }

    pub fn nu_tl(&self) -> f64 {
        self.nu_lt * self.e_t / self.e_l
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [self.e_l, self.e_t, self.g_lt, self.g_tt, self.thickness];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Constitutive(
                "moduli and thickness must be positive".into(),
            ));
        }
        if !(self.rho.is_finite() && self.rho >= 0.0) || !self.theta.is_finite() {
            return Err(Error::Constitutive(
                "density and angle must be finite, density non-negative".into(),
            ));
        }
        if !((self.nu_lt * self.nu_tl()).abs() < 1.0) {
            return Err(Error::Constitutive(format!(
                "nu_LT*nu_TL = {} makes the plane-stress stiffness indefinite",
                self.nu_lt * self.nu_tl()
            )));
        }
        Ok(())
    }
}

/// Transformed ply constants in the plate axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformedStiffness {
    pub q11: f64,
    pub q12: f64,
    pub q22: f64,
    pub q16: f64,
    pub q26: f64,
    pub q66: f64,
    pub q44: f64,
    pub q45: f64,
    pub q55: f64,
}

impl TransformedStiffness {
    /// In-plane block for strains (eps_x, eps_y, gamma_xy).
    pub fn in_plane(&self) -> Matrix3<f64> {
        Matrix3::new(
            self.q11, self.q12, self.q16, //
            self.q12, self.q22, self.q26, //
            self.q16, self.q26, self.q66,
        )
    }

    /// Transverse shear block for strains (gamma_xz, gamma_yz).
    pub fn shear(&self) -> Matrix2<f64> {
        Matrix2::new(self.q55, self.q45, self.q45, self.q44)
    }
}

pub fn transformed_stiffness(ply: &Lamina) -> Result<TransformedStiffness> {
    ply.validate()?;
    let den = 1.0 - ply.nu_lt * ply.nu_tl();
    let q11 = ply.e_l / den;
    let q22 = ply.e_t / den;
    let q12 = ply.nu_lt * q22;
    let q66 = ply.g_lt;
    let q44 = ply.g_tt;
    let q55 = ply.g_lt;
    let (s, c) = ply.theta.sin_cos();
    let (c2, s2) = (c * c, s * s);
    let (c4, s4, c2s2) = (c2 * c2, s2 * s2, c2 * s2);
    let cs = c * s;
    Ok(TransformedStiffness {
        q11: c4 * q11 + 2.0 * c2s2 * q12 + s4 * q22 + 4.0 * c2s2 * q66,
        q12: c2s2 * q11 + (c4 + s4) * q12 + c2s2 * q22 - 4.0 * c2s2 * q66,
        q22: s4 * q11 + 2.0 * c2s2 * q12 + c4 * q22 + 4.0 * c2s2 * q66,
        q16: c2 * cs * q11 + cs * (s2 - c2) * q12 - cs * s2 * q22 + 2.0 * cs * (s2 - c2) * q66,
        q26: cs * s2 * q11 + cs * (c2 - s2) * q12 - c2 * cs * q22 + 2.0 * cs * (c2 - s2) * q66,
        q66: c2s2 * q11 - 2.0 * c2s2 * q12 + c2s2 * q22 + (c2 - s2).powi(2) * q66,
        q44: c2 * q44 + s2 * q55,
        q45: cs * (q55 - q44),
        q55: s2 * q44 + c2 * q55,
    })
}

/// Plies listed bottom to top; the midplane sits at z = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct LaminateStack {
    plies: Vec<Lamina>,
    z: Vec<f64>,
}

impl LaminateStack {
    pub fn new(plies: Vec<Lamina>) -> Result<Self> {
        if plies.is_empty() {
            return Err(Error::Constitutive("laminate has no plies".into()));
        }
        for p in &plies {
            p.validate()?;
        }
        let h: f64 = plies.iter().map(|p| p.thickness).sum();
        let mut z = Vec::with_capacity(plies.len() + 1);
        z.push(-0.5 * h);
        let mut acc = 0.0;
        for p in &plies {
            acc += p.thickness;
            z.push(acc - 0.5 * h);
        }
        Ok(LaminateStack { plies, z })
    }

    /// Equal-thickness plies of one material at the given angles (radians).
    pub fn uniform(base: Lamina, total_thickness: f64, angles: &[f64]) -> Result<Self> {
        let t = total_thickness / angles.len().max(1) as f64;
        LaminateStack::new(
            angles
                .iter()
                .map(|&theta| Lamina {
                    thickness: t,
                    theta,
                    ..base
                })
                .collect(),
        )
    }

    pub fn plies(&self) -> &[Lamina] {
        &self.plies
    }

    pub fn z_interfaces(&self) -> &[f64] {
        &self.z
    }

    pub fn thickness(&self) -> f64 {
        self.plies.iter().map(|p| p.thickness).sum()
    }

    /// Thickness-weighted mean density.
    pub fn mean_density(&self) -> f64 {
        self.plies.iter().map(|p| p.rho * p.thickness).sum::<f64>() / self.thickness()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateRigidity {
    pub a: Matrix3<f64>,
    pub b: Matrix3<f64>,
    pub d: Matrix3<f64>,
    pub a_s: Matrix2<f64>,
}

impl PlateRigidity {
    /// 8x8 generalized rigidity for strains (membrane, curvature, transverse shear).
    pub fn dp(&self) -> Matrix8 {
        let mut m = Matrix8::zeros();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.a);
        m.fixed_view_mut::<3, 3>(0, 3).copy_from(&self.b);
        m.fixed_view_mut::<3, 3>(3, 0).copy_from(&self.b);
        m.fixed_view_mut::<3, 3>(3, 3).copy_from(&self.d);
        m.fixed_view_mut::<2, 2>(6, 6).copy_from(&self.a_s);
        m
    }

    pub fn scaled(&self, s: f64) -> Self {
        PlateRigidity {
            a: self.a * s,
            b: self.b * s,
            d: self.d * s,
            a_s: self.a_s * s,
        }
    }
}

pub fn laminate_rigidity(stack: &LaminateStack, k_shear: f64) -> Result<PlateRigidity> {
    let mut a = Matrix3::zeros();
    let mut b = Matrix3::zeros();
    let mut d = Matrix3::zeros();
    let mut a_s = Matrix2::zeros();
    let z = stack.z_interfaces();
    for (k, ply) in stack.plies().iter().enumerate() {
        let q = transformed_stiffness(ply)?;
        let (z0, z1) = (z[k], z[k + 1]);
        let qm = q.in_plane();
        a += qm * (z1 - z0);
        b += qm * (0.5 * (z1 * z1 - z0 * z0));
        d += qm * ((z1.powi(3) - z0.powi(3)) / 3.0);
        a_s += q.shear() * (k_shear * (z1 - z0));
    }
    Ok(PlateRigidity { a, b, d, a_s })
}

/// Plate inertia per unit area: translational `rho*h` and rotary `rho*h^3/12`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateInertia {
    pub i0: f64,
    pub i2: f64,
}

impl PlateInertia {
    pub fn of(stack: &LaminateStack) -> Self {
        let h = stack.thickness();
        let rho = stack.mean_density();
        PlateInertia {
            i0: rho * h,
            i2: rho * h.powi(3) / 12.0,
        }
    }

    /// Diagonal of the 5x5 mass density for (u0, v0, w0, beta_x, beta_y).
    pub fn diagonal(&self) -> [f64; 5] {
        [self.i0, self.i0, self.i0, self.i2, self.i2]
    }
}

/// Rectangular blade section of an isotropic stiffener.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StiffenerSection {
    pub b_s: f64,
    pub h_s: f64,
    /// Offset of the section centroid from the plate midplane.
    pub e: f64,
    pub e_s: f64,
    pub g_s: f64,
    pub rho_s: f64,
}

impl StiffenerSection {
    /// Section bonded to one face of a plate of thickness `t_p`.
    pub fn surface_mounted(b_s: f64, h_s: f64, t_p: f64, e_s: f64, g_s: f64, rho_s: f64) -> Self {
        StiffenerSection {
            b_s,
            h_s,
            e: 0.5 * (t_p + h_s),
            e_s,
            g_s,
            rho_s,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [self.b_s, self.h_s, self.e_s, self.g_s];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0))
            || !(self.rho_s >= 0.0)
            || !self.e.is_finite()
        {
            return Err(Error::Constitutive(
                "stiffener section needs positive size and moduli".into(),
            ));
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        self.b_s * self.h_s
    }

    pub fn a_n(&self) -> f64 {
        SHEAR_CORRECTION * self.area()
    }

    pub fn a_b(&self) -> f64 {
        SHEAR_CORRECTION * self.area()
    }

    /// Second moment for bending out of the plate plane, about the plate midplane.
    pub fn i_n(&self) -> f64 {
        self.b_s * self.h_s.powi(3) / 12.0 + self.area() * self.e * self.e
    }

    /// Second moment for in-plane bending, about the section's own axis.
    pub fn i_b(&self) -> f64 {
        self.h_s * self.b_s.powi(3) / 12.0
    }

    /// Saint-Venant torsion constant of a solid rectangle.
    pub fn j_t(&self) -> f64 {
        let (long, short) = if self.b_s >= self.h_s {
            (self.b_s, self.h_s)
        } else {
            (self.h_s, self.b_s)
        };
        let r = short / long;
        long * short.powi(3) * (1.0 / 3.0 - 0.21 * r * (1.0 - r.powi(4) / 12.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StiffenerRigidity {
    pub d_s: Matrix5,
    pub m_s: Matrix5,
}

impl StiffenerRigidity {
    pub fn zero() -> Self {
        StiffenerRigidity {
            d_s: Matrix5::zeros(),
            m_s: Matrix5::zeros(),
        }
    }
}

/// Rigidity and mass densities of a stiffener in its local frame
/// (u_t, v_n, w_b, beta_t, beta_n).
pub fn stiffener_rigidity(s: &StiffenerSection) -> Result<StiffenerRigidity> {
    s.validate()?;
    let (a, e) = (s.area(), s.e);
    let mut d = Matrix5::zeros();
    d[(0, 0)] = s.e_s * a;
    d[(1, 1)] = s.g_s * s.a_n();
    d[(2, 2)] = s.g_s * s.a_b();
    d[(3, 3)] = s.e_s * s.i_n();
    // torsion taken about the midplane line, like I_n; keeps D_s semidefinite
    d[(4, 4)] = s.g_s * (s.j_t() + s.a_n() * e * e);
    d[(0, 3)] = s.e_s * a * e;
    d[(3, 0)] = d[(0, 3)];
    d[(1, 4)] = s.g_s * s.a_n() * e;
    d[(4, 1)] = d[(1, 4)];

    let mut m = Matrix5::zeros();
    m[(0, 0)] = s.rho_s * a;
    m[(1, 1)] = s.rho_s * a;
    m[(2, 2)] = s.rho_s * a;
    m[(3, 3)] = s.rho_s * s.i_n();
    m[(4, 4)] = s.rho_s * (s.i_n() + s.i_b());
    m[(0, 3)] = s.rho_s * a * e;
    m[(3, 0)] = m[(0, 3)];
    m[(1, 4)] = s.rho_s * a * e;
    m[(4, 1)] = m[(1, 4)];
    Ok(StiffenerRigidity { d_s: d, m_s: m })
}

/// Stiffness ratio `EI/(bD11)` and area ratio `A/(b t_p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StiffenerRatios {
    pub gamma: f64,
    pub delta: f64,
}

/// Sizes a surface-mounted blade so that `A = delta*b*t_p` and `E_s*I = gamma*b*D11`,
/// with I taken about the plate midplane. The area is fixed by delta, so the height is
/// the single unknown; it is found by bisection.
pub fn section_from_ratios(
    ratios: StiffenerRatios,
    b: f64,
    t_p: f64,
    d11: f64,
    e_s: f64,
    g_s: f64,
    rho_s: f64,
) -> Result<StiffenerSection> {
    let StiffenerRatios { gamma, delta } = ratios;
    if !(gamma > 0.0 && delta > 0.0 && b > 0.0 && t_p > 0.0 && d11 > 0.0 && e_s > 0.0) {
        return Err(Error::InfeasibleRatios(
            "gamma, delta and panel data must be positive".into(),
        ));
    }
    let area = delta * b * t_p;
    let target = gamma * b * d11 / e_s;
    let inertia = |h: f64| area * h * h / 12.0 + area * (0.5 * (t_p + h)).powi(2);
    if target <= inertia(0.0) {
        return Err(Error::InfeasibleRatios(format!(
            "gamma = {gamma} is below what the offset area alone provides"
        )));
    }
    let (mut lo, mut hi) = (0.0, t_p.max(1e-12));
    while inertia(hi) < target {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::InfeasibleRatios("no finite stiffener height".into()));
        }
    }
    while hi - lo > 1e-14 * hi {
        let mid = 0.5 * (lo + hi);
        if inertia(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let h = 0.5 * (lo + hi);
    Ok(StiffenerSection::surface_mounted(
        area / h,
        h,
        t_p,
        e_s,
        g_s,
        rho_s,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn glass(theta: f64) -> Lamina {
        Lamina {
            e_l: 2.45,
            e_t: 1.0,
            g_lt: 0.48,
            g_tt: 0.2,
            nu_lt: 0.23,
            rho: 8000.0,
            thickness: 0.02,
            theta,
        }
    }

    /// Rotates the plane-stress stiffness as a fourth-order tensor.
    fn tensor_rotation(ply: &Lamina) -> [[f64; 3]; 3] {
        let den = 1.0 - ply.nu_lt * ply.nu_tl();
        let (q11, q22) = (ply.e_l / den, ply.e_t / den);
        let q12 = ply.nu_lt * q22;
        let mut c = [[[[0.0; 2]; 2]; 2]; 2];
        c[0][0][0][0] = q11;
        c[1][1][1][1] = q22;
        c[0][0][1][1] = q12;
        c[1][1][0][0] = q12;
        for (i, j) in [(0, 1), (1, 0)] {
            for (k, l) in [(0, 1), (1, 0)] {
                c[i][j][k][l] = ply.g_lt;
            }
        }
        let (s, co) = ply.theta.sin_cos();
        let a = [[co, s], [-s, co]];
        let mut g = [[[[0.0; 2]; 2]; 2]; 2];
        for p in 0..2 {
            for q in 0..2 {
                for r in 0..2 {
                    for t in 0..2 {
                        let mut acc = 0.0;
                        for i in 0..2 {
                            for j in 0..2 {
                                for k in 0..2 {
                                    for l in 0..2 {
                                        acc +=
                                            a[i][p] * a[j][q] * a[k][r] * a[l][t] * c[i][j][k][l];
                                    }
                                }
                            }
                        }
                        g[p][q][r][t] = acc;
                    }
                }
            }
        }
        let idx = [(0, 0), (1, 1), (0, 1)];
        let mut out = [[0.0; 3]; 3];
        for (m, &(i, j)) in idx.iter().enumerate() {
            for (n, &(k, l)) in idx.iter().enumerate() {
                out[m][n] = g[i][j][k][l];
            }
        }
        out
    }

    #[test]
    fn zero_angle_is_identity() {
        let q = transformed_stiffness(&glass(0.0)).unwrap();
        let den = 1.0 - 0.23 * 0.23 / 2.45;
        assert!(rel(q.q11, 2.45 / den) < 1e-15);
        assert!(rel(q.q22, 1.0 / den) < 1e-15);
        assert_eq!((q.q16, q.q26, q.q45), (0.0, 0.0, 0.0));
        assert_eq!((q.q44, q.q55), (0.2, 0.48));
    }

    #[test]
    fn quarter_turn_swaps_axes() {
        let q0 = transformed_stiffness(&glass(0.0)).unwrap();
        let q = transformed_stiffness(&glass(FRAC_PI_2)).unwrap();
        assert!(rel(q.q11, q0.q22) < 1e-12 && rel(q.q22, q0.q11) < 1e-12);
        assert!(q.q16.abs() < 1e-12 * q0.q11 && q.q26.abs() < 1e-12 * q0.q11);
        assert!(rel(q.q44, q0.q55) < 1e-12 && rel(q.q55, q0.q44) < 1e-12);
    }

    #[test]
    fn matches_tensor_rotation_at_45() {
        let ply = glass(FRAC_PI_4);
        let q = transformed_stiffness(&ply).unwrap().in_plane();
        let t = tensor_rotation(&ply);
        for i in 0..3 {
            for j in 0..3 {
                assert!((q[(i, j)] - t[i][j]).abs() <= 1e-10 * q[(0, 0)], "{i}{j}");
            }
        }
    }

    #[test]
    fn rejects_nonphysical_ply() {
        let mut p = glass(0.0);
        p.nu_lt = 2.0;
        assert!(matches!(
            transformed_stiffness(&p),
            Err(Error::Constitutive(_))
        ));
        p = glass(0.0);
        p.e_t = -1.0;
        assert!(transformed_stiffness(&p).is_err());
    }

    #[test]
    fn isotropic_single_ply() {
        let (e, nu, t) = (200e9, 0.3, 0.05);
        let s = LaminateStack::new(vec![Lamina::isotropic(e, nu, 8000.0, t)]).unwrap();
        let r = laminate_rigidity(&s, SHEAR_CORRECTION).unwrap();
        assert!(rel(r.a[(0, 0)], e * t / (1.0 - nu * nu)) < 1e-14);
        assert!(rel(r.d[(0, 0)], e * t.powi(3) / (12.0 * (1.0 - nu * nu))) < 1e-14);
        assert!(r.b.abs().max() <= 1e-12 * r.a.abs().max() * t);
    }

    #[test]
    fn symmetric_crossply_has_no_coupling() {
        let s = LaminateStack::uniform(glass(0.0), 0.06, &[0.0, FRAC_PI_2, 0.0]).unwrap();
        let r = laminate_rigidity(&s, SHEAR_CORRECTION).unwrap();
        assert!(r.b.abs().max() <= 1e-12 * r.a.abs().max() * s.thickness());
    }

    #[test]
    fn antisymmetric_angleply_matches_midpoint_integration() {
        let angles = [FRAC_PI_4, -FRAC_PI_4, FRAC_PI_4, -FRAC_PI_4];
        let s = LaminateStack::uniform(glass(0.0), 0.08, &angles).unwrap();
        let r = laminate_rigidity(&s, SHEAR_CORRECTION).unwrap();
        let h = s.thickness();
        let n = 10_000;
        let dz = h / n as f64;
        let (mut a, mut b, mut d) = (Matrix3::zeros(), Matrix3::zeros(), Matrix3::zeros());
        for i in 0..n {
            let z = -0.5 * h + (i as f64 + 0.5) * dz;
            let k = (((z + 0.5 * h) / (h / 4.0)) as usize).min(3);
            let q = transformed_stiffness(&s.plies()[k]).unwrap().in_plane();
            a += q * dz;
            b += q * (z * dz);
            d += q * (z * z * dz);
        }
        let scale_b = b.abs().max();
        for i in 0..3 {
            for j in 0..3 {
                assert!((r.a[(i, j)] - a[(i, j)]).abs() <= 1e-8 * r.a.abs().max());
                assert!((r.b[(i, j)] - b[(i, j)]).abs() <= 1e-8 * scale_b);
                assert!((r.d[(i, j)] - d[(i, j)]).abs() <= 1e-8 * r.d.abs().max());
            }
        }
        assert!(scale_b > 0.0);
    }

    #[test]
    fn dp_block_layout() {
        let s = LaminateStack::uniform(glass(0.0), 0.06, &[0.3, -0.3, 0.3]).unwrap();
        let r = laminate_rigidity(&s, SHEAR_CORRECTION).unwrap();
        let dp = r.dp();
        assert_eq!(dp, dp.transpose());
        assert_eq!(dp.fixed_view::<3, 2>(0, 6).abs().max(), 0.0);
        assert_eq!(dp[(6, 6)], r.a_s[(0, 0)]);
        assert_eq!(dp[(4, 1)], r.b[(1, 1)]);
    }

    fn blade() -> StiffenerSection {
        StiffenerSection::surface_mounted(0.01, 0.02, 0.01, 70e9, 26e9, 2700.0)
    }

    #[test]
    fn centred_section_is_uncoupled() {
        let mut s = blade();
        s.e = 0.0;
        let r = stiffener_rigidity(&s).unwrap();
        for (i, j) in [(0, 3), (1, 4)] {
            assert_eq!(r.d_s[(i, j)], 0.0);
            assert_eq!(r.m_s[(i, j)], 0.0);
        }
        assert_eq!(r.d_s[(4, 4)], s.g_s * s.j_t());
    }

    #[test]
    fn coupling_terms_and_density_linearity() {
        let s = blade();
        let r = stiffener_rigidity(&s).unwrap();
        assert_eq!(r.d_s[(0, 3)], s.e_s * s.area() * s.e);
        assert_eq!(r.m_s[(1, 4)], s.rho_s * s.area() * s.e);
        assert_eq!(r.d_s[(1, 4)], s.g_s * s.a_n() * s.e);
        assert_eq!(r.d_s, r.d_s.transpose());
        assert_eq!(r.m_s, r.m_s.transpose());
        let mut heavy = s;
        heavy.rho_s *= 2.0;
        assert_eq!(stiffener_rigidity(&heavy).unwrap().m_s, r.m_s * 2.0);
        assert!(r.d_s.symmetric_eigenvalues().min() >= -1e-12 * r.d_s.abs().max());
        assert!(r.m_s.symmetric_eigenvalues().min() >= -1e-12 * r.m_s.abs().max());
    }

    #[test]
    fn torsion_constant_two_to_one() {
        // 2:1 rectangle, series in terms of the long side b and short side h
        let (b, h) = (0.02, 0.01);
        let s = StiffenerSection::surface_mounted(h, b, 0.0, 1.0, 1.0, 1.0);
        let oracle =
            b * h * h * h * (1.0 / 3.0 - 0.21 * (h / b) * (1.0 - h.powi(4) / (12.0 * b.powi(4))));
        assert!(rel(s.j_t(), oracle) < 1e-12);
        assert!(s.j_t() > 0.0 && s.j_t() <= s.i_n() + s.i_b());
    }

    fn section_case(gamma: f64) -> (StiffenerSection, f64) {
        let e_t = 1e9;
        let base = Lamina {
            e_l: 15.0 * e_t,
            e_t,
            g_lt: 0.5 * e_t,
            g_tt: 0.3356 * e_t,
            nu_lt: 0.3,
            rho: 8000.0,
            thickness: 0.0025,
            theta: 0.0,
        };
        let stack = LaminateStack::uniform(base, 0.01, &[0.0, FRAC_PI_2, FRAC_PI_2, 0.0]).unwrap();
        let d11 = laminate_rigidity(&stack, SHEAR_CORRECTION).unwrap().d[(0, 0)];
        let g_s = e_t / 2.6;
        let ratios = StiffenerRatios { gamma, delta: 0.1 };
        (
            section_from_ratios(ratios, 1.0, 0.01, d11, e_t, g_s, 8000.0).unwrap(),
            d11,
        )
    }

    #[test]
    fn ratios_round_trip() {
        let (s, d11) = section_case(5.0);
        assert!(rel(s.area(), 0.1 * 1.0 * 0.01) < 1e-12);
        let gamma = s.e_s * s.i_n() / (1.0 * d11);
        assert!(rel(gamma, 5.0) < 1e-10);
        assert!(rel(s.e, 0.5 * (0.01 + s.h_s)) < 1e-15);
        let (s10, _) = section_case(10.0);
        assert!(rel(s10.e_s * s10.i_n() / d11, 2.0 * gamma) < 1e-10);
    }

    #[test]
    fn ratios_below_offset_floor_fail() {
        let r = section_from_ratios(
            StiffenerRatios {
                gamma: 1e-9,
                delta: 0.1,
            },
            1.0,
            0.01,
            1.0,
            1e9,
            1e9,
            1.0,
        );
        assert!(matches!(r, Err(Error::InfeasibleRatios(_))));
    }

    proptest! {
        #[test]
        fn rotation_invariants(theta in -3.2f64..3.2) {
            let q0 = transformed_stiffness(&glass(0.0)).unwrap();
            let q = transformed_stiffness(&glass(theta)).unwrap();
            let i1 = |q: &TransformedStiffness| q.q11 + q.q22 + 2.0 * q.q12;
            let i2 = |q: &TransformedStiffness| q.q66 - q.q12;
            prop_assert!(rel(i1(&q), i1(&q0)) < 1e-10);
            prop_assert!(rel(i2(&q), i2(&q0)) < 1e-10);
        }

        #[test]
        fn splitting_a_ply_changes_nothing(
            angles in proptest::collection::vec(-1.6f64..1.6, 1..6),
            split in 0usize..6,
        ) {
            let s = LaminateStack::uniform(glass(0.0), 0.05, &angles).unwrap();
            let k = split % angles.len();
            let mut plies = s.plies().to_vec();
            let half = Lamina { thickness: plies[k].thickness / 2.0, ..plies[k] };
            plies.splice(k..=k, [half, half]);
            let r0 = laminate_rigidity(&s, SHEAR_CORRECTION).unwrap();
            let r1 = laminate_rigidity(&LaminateStack::new(plies).unwrap(), SHEAR_CORRECTION).unwrap();
            let scale = r0.a.abs().max();
            prop_assert!((r0.a - r1.a).abs().max() <= 1e-12 * scale);
            prop_assert!((r0.b - r1.b).abs().max() <= 1e-12 * scale * 0.05);
            prop_assert!((r0.d - r1.d).abs().max() <= 1e-12 * r0.d.abs().max());
        }

        #[test]
        fn a_and_d_positive_definite(angles in proptest::collection::vec(-1.6f64..1.6, 1..8)) {
            let s = LaminateStack::uniform(glass(0.0), 0.05, &angles).unwrap();
            let r = laminate_rigidity(&s, SHEAR_CORRECTION).unwrap();
            prop_assert!(r.a.symmetric_eigenvalues().min() > 0.0);
            prop_assert!(r.d.symmetric_eigenvalues().min() > 0.0);
            prop_assert!(r.a_s.symmetric_eigenvalues().min() > 0.0);
        }
    }
}
