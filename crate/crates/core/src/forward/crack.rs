//! Sound-soft straight crack via a single-layer potential and the cosine
//! substitution `s = cos t`, discretized with trigonometric quadrature on the
//! nodes `t_j = j pi / n`, `j = 0..2n`.
//!
//! The substituted density `psi(t) = |sin t| |z'| phi(z(cos t))` is even in
//! `t`, so only `psi_0..=psi_n` are unknown: column `j > n` of the collocation
//! matrix is folded into column `2n - j`.

use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::{DMatrix, Dyn, LU};
use num_complex::Complex64;

use super::{check_unit, check_wavenumber, FarField, Incident};
use crate::error::{Error, Result};
use crate::geometry::{LineCrack, Vec2};
use crate::specfun::{j0_minus_one, low_orders, EULER_GAMMA};

/// Smallest quadrature order accepted by the solver.
pub const MIN_ORDER: usize = 8;

/// Weights `R_j`, `F_j`, `j = 0..2n`, for the logarithmic and the
/// `sin^2`-weighted logarithmic kernels.
#[derive(Debug, Clone, PartialEq)]
pub struct NystromWeights {
    pub n: usize,
    pub r: Vec<f64>,
    pub f: Vec<f64>,
}

fn c(m: i64) -> f64 {
    -1.0 / (m.unsigned_abs().max(1) as f64)
}

pub fn quadrature_weights(n: usize) -> Result<NystromWeights> {
    if n == 0 {
        return Err(Error::Domain("quadrature order must be at least 1".into()));
    }
    let gamma = |m: i64| 0.25 * (2.0 * c(m) - c(m + 1) - c(m - 1));
    let ni = n as i64;
    let mut r = Vec::with_capacity(2 * n);
    let mut f = Vec::with_capacity(2 * n);
    for j in 0..2 * n {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let mut rs = c(0) + sign * c(ni);
        let mut fs = gamma(0) + sign * gamma(ni);
        for m in 1..n {
            let cs = (PI * (m * j) as f64 / n as f64).cos();
            rs += 2.0 * c(m as i64) * cs;
            fs += 2.0 * gamma(m as i64) * cs;
        }
        r.push(rs / (2 * n) as f64);
        f.push(fs / (2 * n) as f64);
    }
    Ok(NystromWeights { n, r, f })
}

/// `J_0(k |z(cos t) - z(cos tau)|) - 1`, zero on the diagonal.
pub fn kernel_h1(crack: &LineCrack, k: f64, t: f64, tau: f64) -> f64 {
    if t == tau {
        return 0.0;
    }
    let dist = (crack.point(t.cos()) - crack.point(tau.cos())).norm();
    j0_minus_one(k * dist)
}

fn h2_diagonal(k: f64, speed: f64) -> Complex64 {
    Complex64::new(
        2.0 * EULER_GAMMA + 2.0 * (k * std::f64::consts::E * speed / 4.0).ln(),
        -PI,
    )
}

/// Smooth remainder of `(pi/i) H_0(k|dz|)` after removing the logarithm of
/// `(4/e^2)(cos t - cos tau)^2`. Coincident chart points share the
/// diagonal value.
pub fn kernel_h2(crack: &LineCrack, k: f64, t: f64, tau: f64) -> Complex64 {
    let speed = crack.half_chord().norm();
    let dc = t.cos() - tau.cos();
    let x = k * speed * dc.abs();
    if t == tau || x == 0.0 {
        return h2_diagonal(k, speed);
    }
    h2_offdiag(x, dc)
}

fn h2_offdiag(x: f64, dc: f64) -> Complex64 {
    let b = low_orders(x);
    // (pi/i)(J0 + i Y0) = pi Y0 - i pi J0
    let log = (4.0 / (std::f64::consts::E * std::f64::consts::E) * dc * dc).ln();
    Complex64::new(PI * b.y0 - b.j0 * log, -PI * b.j0)
}

/// Nodal density on all `2n` nodes together with its discretization.
#[derive(Debug, Clone, PartialEq)]
pub struct CrackDensity {
    pub crack: LineCrack,
    pub k: f64,
    pub n: usize,
    /// `psi_j` for `j = 0..2n`.
    pub psi: Vec<Complex64>,
}

/// Factored collocation system for one crack and wavenumber; solves any
/// number of incident fields.
pub struct CrackSolver {
    crack: LineCrack,
    k: f64,
    n: usize,
    /// `z(cos t_j)` for `j = 0..=n`.
    nodes: Vec<Vec2>,
    lu: LU<Complex64, Dyn, Dyn>,
}

impl CrackSolver {
    pub fn new(crack: &LineCrack, k: f64, weights: &NystromWeights) -> Result<Self> {
        check_wavenumber(k)?;
        let n = weights.n;
        if n < MIN_ORDER {
            return Err(Error::Domain(format!(
                "crack quadrature order {n} below {MIN_ORDER}"
            )));
        }
        let speed = crack.half_chord().norm();
        if !(speed > 0.0) {
            return Err(Error::Degenerate("crack of zero length".into()));
        }
        let two_n = 2 * n;
        let h = PI / n as f64;
        let cosines: Vec<f64> = (0..=n).map(|j| (h * j as f64).cos()).collect();
        let nodes: Vec<Vec2> = cosines.iter().map(|&s| crack.point(s)).collect();

        // Kernel values that depend only on the chart points, i.e. on
        // (min(j, 2n-j), row). Symmetric in the pair.
        let size = n + 1;
        let mut h1 = vec![0.0; size * size];
        let mut h2 = vec![Complex64::new(0.0, 0.0); size * size];
        let diag = h2_diagonal(k, speed);
        for a in 0..size {
            h2[a * size + a] = diag;
            for b in a + 1..size {
                let dc = cosines[a] - cosines[b];
                let x = k * speed * dc.abs();
                let (v1, v2) = if x == 0.0 {
                    (0.0, diag)
                } else {
                    (j0_minus_one(x), h2_offdiag(x, dc))
                };
                h1[a * size + b] = v1;
                h1[b * size + a] = v1;
                h2[a * size + b] = v2;
                h2[b * size + a] = v2;
            }
        }

        let inv_2n = 1.0 / two_n as f64;
        let mut a = DMatrix::<Complex64>::zeros(size, size);
        for row in 0..size {
            let t = h * row as f64;
            let sin_t = t.sin();
            for j in 0..two_n {
                let col = if j <= n { j } else { two_n - j };
                let diff = row.abs_diff(j);
                let k1 = if j == row {
                    -k * k * sin_t * sin_t * speed * speed
                } else {
                    let s = (0.5 * h * (row as f64 - j as f64)).sin();
                    h1[row * size + col] / (s * s)
                };
                let k2 = 0.5 * h2[row * size + col];
                a[(row, col)] += weights.r[diff] + weights.f[diff] * k1 + k2 * inv_2n;
            }
        }

        let lu = a.lu();
        if !lu.is_invertible() {
            return Err(Error::SingularSystem { dim: size });
        }
        Ok(Self {
            crack: *crack,
            k,
            n,
            nodes,
            lu,
        })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    fn solve_columns(&self, rhs: DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
        let dim = self.n + 1;
        let sol = self
            .lu
            .solve(&rhs)
            .ok_or(Error::SingularSystem { dim })?;
        if sol.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::SingularSystem { dim });
        }
        Ok(sol)
    }

    fn expand(&self, half: impl Iterator<Item = Complex64>) -> Vec<Complex64> {
        let half: Vec<Complex64> = half.collect();
        let mut psi = half.clone();
        psi.extend((1..self.n).rev().map(|j| half[j]));
        psi
    }

    /// Density for the given incident field; the right-hand side is
    /// `2 u_in(z(cos t_k))`.
    pub fn solve(&self, incident: &Incident) -> Result<CrackDensity> {
        incident.check()?;
        let rhs = DMatrix::from_fn(self.n + 1, 1, |i, _| {
            incident.value(self.k, self.nodes[i]) * 2.0
        });
        let sol = self.solve_columns(rhs)?;
        Ok(CrackDensity {
            crack: self.crack,
            k: self.k,
            n: self.n,
            psi: self.expand(sol.column(0).iter().copied()),
        })
    }

    /// Far fields for many plane waves at once: entry `(m, p)` is the far
    /// field at `obs[m]` for incidence along `incident[p]`.
    pub fn far_field_matrix(
        &self,
        incident: &[Vec2],
        obs: &[Vec2],
    ) -> Result<DMatrix<Complex64>> {
        let k = self.k;
        let rhs = DMatrix::from_fn(self.n + 1, incident.len(), |i, p| {
            Complex64::cis(k * self.nodes[i].dot(incident[p])) * 2.0
        });
        let sol = self.solve_columns(rhs)?;
        let c = far_field_constant(k, self.n);
        // psi_j = psi_{2n-j}, so nodes 1..n-1 count twice.
        let e = DMatrix::from_fn(obs.len(), self.n + 1, |m, j| {
            let w = if j == 0 || j == self.n { 1.0 } else { 2.0 };
            Complex64::cis(-k * obs[m].dot(self.nodes[j])) * (c * w)
        });
        Ok(e * sol)
    }
}

/// `e^{i pi/4} / sqrt(8 pi k)` times the trapezoidal weight `pi/n` and the
/// Jacobian factor `1/2` of the substitution `s = cos t` over `[0, 2 pi]`.
fn far_field_constant(k: f64, n: usize) -> Complex64 {
    Complex64::from_polar(0.5 * PI / (n as f64 * (8.0 * PI * k).sqrt()), FRAC_PI_4)
}

/// Builds the system for `crack` at order `n` and solves it for `incident`.
pub fn solve_crack(
    crack: &LineCrack,
    incident: &Incident,
    k: f64,
    n: usize,
) -> Result<CrackDensity> {
    let weights = quadrature_weights(n)?;
    CrackSolver::new(crack, k, &weights)?.solve(incident)
}

/// Far field of the single-layer potential with the given density.
pub fn crack_far_field(density: &CrackDensity, dirs: &[Vec2], k: f64) -> Result<FarField> {
    if k != density.k {
        return Err(Error::WavenumberMismatch {
            expected: density.k,
            got: k,
        });
    }
    for &x in dirs {
        check_unit(x, "observation direction")?;
    }
    let n = density.n;
    let c = far_field_constant(k, n);
    let points: Vec<Vec2> = (0..2 * n)
        .map(|j| density.crack.point((PI * j as f64 / n as f64).cos()))
        .collect();
    let values = dirs
        .iter()
        .map(|&x| {
            let sum: Complex64 = points
                .iter()
                .zip(&density.psi)
                .map(|(z, psi)| Complex64::cis(-k * x.dot(*z)) * psi)
                .sum();
            sum * c
        })
        .collect();
    Ok(FarField {
        k,
        dirs: dirs.to_vec(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::uniform_directions;

    fn crack(x1: f64, x2: f64, y1: f64, y2: f64) -> LineCrack {
        LineCrack::new(Vec2::new(x1, x2), Vec2::new(y1, y2)).unwrap()
    }

    #[test]
    fn weights_for_n_one() {
        let w = quadrature_weights(1).unwrap();
        assert!((w.r[0] + 1.0).abs() < 1e-15 && w.r[1].abs() < 1e-15);
        assert!((w.f[0] + 1.0 / 16.0).abs() < 1e-15);
        assert!((w.f[1] - 1.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn weights_are_even() {
        for n in [2, 5, 16] {
            let w = quadrature_weights(n).unwrap();
            for j in 1..n {
                assert!((w.r[j] - w.r[2 * n - j]).abs() < 1e-14);
                assert!((w.f[j] - w.f[2 * n - j]).abs() < 1e-14);
            }
            assert!(w.r.iter().chain(&w.f).all(|v| v.is_finite()));
        }
        assert!(quadrature_weights(0).is_err());
    }

    #[test]
    fn h1_values() {
        let c = crack(0.0, 0.0, 1.0, 0.0);
        assert_eq!(kernel_h1(&c, 1.0, 0.7, 0.7), 0.0);
        assert!(kernel_h1(&c, 1.0, 0.7, 2.0 * PI - 0.7).abs() < 1e-15);
        // J0(1) - 1, 50-digit reference
        let v = kernel_h1(&c, 1.0, 0.0, PI);
        assert!((v + 0.23480231344203344855).abs() < 1e-12 * 0.2348);
    }

    #[test]
    fn h2_diagonal_values() {
        let c = crack(0.0, 0.0, 1.0, 0.0);
        assert_eq!(kernel_h2(&c, 1.0, 0.3, 0.3).im, -PI);
        // |z'| = 4/(k e) makes the logarithm vanish.
        let k = 1.3;
        let half = 4.0 / (k * std::f64::consts::E);
        let c = crack(-half, 0.0, half, 0.0);
        let v = kernel_h2(&c, k, 1.1, 1.1);
        assert!((v.re - 2.0 * EULER_GAMMA).abs() < 1e-14);
    }

    #[test]
    fn h2_is_continuous_at_the_diagonal() {
        let c = crack(0.0, 0.0, 1.0, 0.0);
        for &t in &[0.4, 1.0, 2.5, 4.0] {
            let diff = (kernel_h2(&c, 1.0, t, t + 1e-6) - kernel_h2(&c, 1.0, t, t)).norm();
            assert!(diff <= 1e-4, "t={t}: {diff}");
        }
    }

    #[test]
    fn density_is_even_and_linear() {
        let c = crack(2.0, 3.0, 4.0, 5.0);
        let (d0, d1) = (Vec2::new(0.0, -1.0), Vec2::from_angle(0.8));
        let a = solve_crack(&c, &Incident::Plane(d0), 1.0, 32).unwrap();
        let b = solve_crack(&c, &Incident::Plane(d1), 1.0, 32).unwrap();
        let ab = solve_crack(&c, &Incident::Pair(d0, d1), 1.0, 32).unwrap();
        for j in 1..32 {
            assert_eq!(a.psi[j], a.psi[64 - j]);
        }
        for j in 0..64 {
            assert!((ab.psi[j] - a.psi[j] - b.psi[j]).norm() <= 1e-12 * ab.psi[j].norm().max(1.0));
        }
    }

    #[test]
    fn matrix_path_matches_density_path() {
        let c = crack(-0.5, 0.2, 0.7, -0.4);
        let dirs = uniform_directions(9);
        let inc = [Vec2::from_angle(0.3), Vec2::from_angle(2.0)];
        let w = quadrature_weights(24).unwrap();
        let solver = CrackSolver::new(&c, 2.0, &w).unwrap();
        let mat = solver.far_field_matrix(&inc, &dirs).unwrap();
        for (p, &d) in inc.iter().enumerate() {
            let dens = solver.solve(&Incident::Plane(d)).unwrap();
            let ff = crack_far_field(&dens, &dirs, 2.0).unwrap();
            for m in 0..dirs.len() {
                assert!((mat[(m, p)] - ff.values[m]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn zero_density_and_wavenumber_check() {
        let c = crack(0.0, 0.0, 1.0, 0.0);
        let zero = CrackDensity {
            crack: c,
            k: 1.0,
            n: 8,
            psi: vec![Complex64::new(0.0, 0.0); 16],
        };
        let ff = crack_far_field(&zero, &uniform_directions(5), 1.0).unwrap();
        assert!(ff.values.iter().all(|v| v.norm() == 0.0));
        assert!(matches!(
            crack_far_field(&zero, &uniform_directions(5), 2.0),
            Err(Error::WavenumberMismatch { .. })
        ));
    }

    #[test]
    fn rejects_low_order() {
        let c = crack(0.0, 0.0, 1.0, 0.0);
        assert!(solve_crack(&c, &Incident::Plane(Vec2::new(1.0, 0.0)), 1.0, 4).is_err());
    }
}
