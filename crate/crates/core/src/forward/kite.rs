//! Sound-soft smooth closed curves via the combined double/single-layer
//! potential `u = int (dPhi/dnu(y) - i eta Phi) phi ds(y)` with `eta = k`.
//! The boundary equation `phi + (K - i eta S) phi = -2 u_in` is discretized
//! on `2n` equispaced nodes, with the logarithmic part of each kernel
//! integrated exactly against the trigonometric interpolant.

use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{check_unit, check_wavenumber, FarField, Incident};
use crate::error::{Error, Result};
use crate::geometry::{Kite, Vec2};
use crate::specfun::{low_orders, EULER_GAMMA};

pub const MIN_ORDER: usize = 16;

/// Relative speed below which the chart counts as singular.
const MIN_RELATIVE_SPEED: f64 = 1e-8;

/// Nodes, tangents and second derivatives of a closed chart at
/// `t_j = j pi / n`, oriented counter-clockwise.
#[derive(Debug, Clone)]
pub struct ClosedCurveDiscretization {
    pub n: usize,
    pub points: Vec<Vec2>,
    pub tangents: Vec<Vec2>,
    pub seconds: Vec<Vec2>,
    pub speeds: Vec<f64>,
}

impl ClosedCurveDiscretization {
    pub fn new(kite: &Kite, n: usize) -> Result<Self> {
        if n < MIN_ORDER {
            return Err(Error::Domain(format!("kite quadrature order {n} below {MIN_ORDER}")));
        }
        if kite.z.iter().any(|v| !v.is_finite()) {
            return Err(Error::Degenerate("non-finite kite parameter".into()));
        }
        let mut kite = *kite;
        if kite.signed_area() < 0.0 {
            // Same point set, traversed the other way round.
            kite.z[4] = -kite.z[4];
            kite.z[5] = -kite.z[5];
        }
        let two_n = 2 * n;
        let mut out = Self {
            n,
            points: Vec::with_capacity(two_n),
            tangents: Vec::with_capacity(two_n),
            seconds: Vec::with_capacity(two_n),
            speeds: Vec::with_capacity(two_n),
        };
        let scale = kite.z[2..].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for j in 0..two_n {
            let t = PI * j as f64 / n as f64;
            let p = kite.eval(t);
            let speed = p.tangent.norm();
            if !(speed > MIN_RELATIVE_SPEED * scale) {
                return Err(Error::IrregularCurve { t });
            }
            out.points.push(p.point);
            out.tangents.push(p.tangent);
            out.seconds.push(p.second);
            out.speeds.push(speed);
        }
        Ok(out)
    }

    /// `(x2', -x1')` at node `j`: outward normal times speed.
    fn scaled_normal(&self, j: usize) -> Vec2 {
        let t = self.tangents[j];
        Vec2::new(t.y, -t.x)
    }
}

/// Weights `R_j` integrating `ln(4 sin^2((t - tau)/2))` against the
/// trigonometric interpolant on `2n` nodes.
pub fn log_weights(n: usize) -> Vec<f64> {
    let nf = n as f64;
    (0..2 * n)
        .map(|j| {
            let mut s = 0.0;
            for m in 1..n {
                s += (PI * (m * j) as f64 / nf).cos() / m as f64;
            }
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            -2.0 * PI / nf * s - PI / (nf * nf) * sign
        })
        .collect()
}

/// Factored boundary system for one curve and wavenumber.
pub struct KiteSolver {
    k: f64,
    eta: f64,
    curve: ClosedCurveDiscretization,
    lu: nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl KiteSolver {
    pub fn new(kite: &Kite, k: f64, n: usize) -> Result<Self> {
        check_wavenumber(k)?;
        let curve = ClosedCurveDiscretization::new(kite, n)?;
        let size = 2 * n;
        let eta = k;
        let rw = log_weights(n);
        let h = PI / n as f64;
        // ln(4 sin^2((t_i - t_j)/2)) depends on i - j only.
        let logs: Vec<f64> = (0..size)
            .map(|d| {
                let s = (0.5 * h * d as f64).sin();
                (4.0 * s * s).ln()
            })
            .collect();
        let i_eta = Complex64::new(0.0, eta);
        let half_i = Complex64::new(0.0, 0.5);

        let mut a = DMatrix::<Complex64>::identity(size, size);
        for i in 0..size {
            let xi = curve.points[i];
            for j in 0..size {
                let speed = curve.speeds[j];
                let d = i.abs_diff(j);
                let (a1, a2) = if i == j {
                    let t = curve.tangents[i];
                    let s = curve.seconds[i];
                    let l2 = (s.x * t.y - s.y * t.x) / (2.0 * PI * speed * speed);
                    let m1 = -speed / (2.0 * PI);
                    let m2 = (half_i
                        - EULER_GAMMA / PI
                        - (0.5 * k * speed).ln() / PI)
                        * speed;
                    (-i_eta * m1, l2 - i_eta * m2)
                } else {
                    let delta = xi - curve.points[j];
                    let r = delta.norm();
                    let b = low_orders(k * r);
                    let nd = curve.scaled_normal(j).dot(delta) / r;
                    let l1 = -k / (2.0 * PI) * nd * b.j1;
                    let l = half_i * k * nd * Complex64::new(b.j1, b.y1);
                    let m1 = -speed / (2.0 * PI) * b.j0;
                    let m = half_i * Complex64::new(b.j0, b.y0) * speed;
                    let a1 = l1 - i_eta * m1;
                    let full = l - i_eta * m;
                    (a1, full - a1 * logs[d])
                };
                a[(i, j)] += a1 * rw[d] + a2 * h;
            }
        }
        let lu = a.lu();
        if !lu.is_invertible() {
            return Err(Error::SingularSystem { dim: size });
        }
        Ok(Self { k, eta, curve, lu })
    }

    pub fn discretization(&self) -> &ClosedCurveDiscretization {
        &self.curve
    }

    fn solve_columns(&self, rhs: DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
        let dim = 2 * self.curve.n;
        let sol = self.lu.solve(&rhs).ok_or(Error::SingularSystem { dim })?;
        if sol.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::SingularSystem { dim });
        }
        Ok(sol)
    }

    /// Far-field weights: row `m` maps nodal densities to `u(obs[m])`.
    fn far_field_operator(&self, obs: &[Vec2]) -> DMatrix<Complex64> {
        let k = self.k;
        let n = self.curve.n;
        let c = Complex64::from_polar(PI / (n as f64 * (8.0 * PI * k).sqrt()), -FRAC_PI_4);
        DMatrix::from_fn(obs.len(), 2 * n, |m, j| {
            let x = obs[m];
            let amp = k * self.curve.scaled_normal(j).dot(x) + self.eta * self.curve.speeds[j];
            Complex64::cis(-k * x.dot(self.curve.points[j])) * (c * amp)
        })
    }

    /// Entry `(m, p)` is the far field at `obs[m]` for incidence `incident[p]`.
    pub fn far_field_matrix(
        &self,
        incident: &[Vec2],
        obs: &[Vec2],
    ) -> Result<DMatrix<Complex64>> {
        let k = self.k;
        let rhs = DMatrix::from_fn(2 * self.curve.n, incident.len(), |i, p| {
            Complex64::cis(k * self.curve.points[i].dot(incident[p])) * -2.0
        });
        let sol = self.solve_columns(rhs)?;
        Ok(self.far_field_operator(obs) * sol)
    }

    pub fn far_field(&self, incident: &Incident, obs: &[Vec2]) -> Result<FarField> {
        incident.check()?;
        for &x in obs {
            check_unit(x, "observation direction")?;
        }
        let k = self.k;
        let rhs = DMatrix::from_fn(2 * self.curve.n, 1, |i, _| {
            incident.value(k, self.curve.points[i]) * -2.0
        });
        let sol = self.solve_columns(rhs)?;
        let values = self.far_field_operator(obs) * sol;
        Ok(FarField {
            k,
            dirs: obs.to_vec(),
            values: values.column(0).iter().copied().collect(),
        })
    }
}

pub fn solve_kite_far_field(
    kite: &Kite,
    incident: &Incident,
    k: f64,
    n: usize,
    dirs: &[Vec2],
) -> Result<FarField> {
    KiteSolver::new(kite, k, n)?.far_field(incident, dirs)
}
