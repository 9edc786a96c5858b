//! Analytic far field of a sound-soft disk:
//!
//! `u(x) = -e^{-i pi/4} sqrt(2/(pi k)) sum_n eps_n J_n(kr)/H_n(kr) cos(n theta)`
//!
//! with `eps_0 = 1`, `eps_n = 2`, `theta` the angle between `x` and the
//! incident direction, times the phase `e^{ik c.(d - x)}` for a disk centred
//! at `c`.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use super::{check_unit, check_wavenumber, FarField, IncidentPair};
use crate::error::{Error, Result};
use crate::geometry::{Disk, Vec2};
use crate::specfun::{bessel_table, MAX_ARG, MIN_ARG};

/// Terms below this modulus (past `n = kr`) end the series.
const NEGLIGIBLE: f64 = 1e-18;

/// Series order used when none is given: the fixed 100 terms at small `kr`,
/// and enough terms past the turning point `n = kr` for `J_n(kr)` to decay
/// below 1e-18 at large `kr` (the transition layer is `O((kr)^{1/3})` wide).
pub fn default_truncation(kr: f64) -> usize {
    let wide = kr + 13.0 * kr.cbrt() + 20.0;
    100usize.max(wide.ceil() as usize)
}

fn minimum_truncation(kr: f64) -> usize {
    100usize.max(kr.ceil() as usize + 20)
}

/// Precomputed series coefficients `eps_n J_n(kr)/H_n(kr)` for one `(k, r)`.
#[derive(Debug, Clone)]
pub struct DiskSeries {
    k: f64,
    coeffs: Vec<Complex64>,
    prefactor: Complex64,
}

impl DiskSeries {
    pub fn new(k: f64, r: f64, trunc: Option<usize>) -> Result<Self> {
        check_wavenumber(k)?;
        let kr = k * r;
        if !(MIN_ARG..=MAX_ARG).contains(&kr) {
            return Err(Error::Domain(format!(
                "k r = {kr:e} outside the supported range [{MIN_ARG:e}, {MAX_ARG:e}]"
            )));
        }
        let trunc = match trunc {
            Some(t) if t < minimum_truncation(kr) => {
                return Err(Error::Domain(format!(
                    "series order {t} below the minimum {} for k r = {kr}",
                    minimum_truncation(kr)
                )))
            }
            Some(t) => t,
            None => default_truncation(kr),
        };

        let table = bessel_table(trunc, kr)?;
        let mut coeffs = Vec::new();
        let mut biggest = 0.0_f64;
        let mut last = f64::INFINITY;
        for n in 0..=trunc {
            let (j, y) = (table.j[n], table.y[n]);
            // J/(J + iY) = rho (rho - i) / (1 + rho^2), rho = J/Y, which stays
            // finite when Y_n overflows and J_n underflows.
            let a = if y.is_finite() {
                let rho = j / y;
                let d = 1.0 + rho * rho;
                Complex64::new(rho * rho / d, -rho / d)
            } else {
                Complex64::new(0.0, 0.0)
            };
            last = a.norm();
            biggest = biggest.max(last);
            coeffs.push(if n == 0 { a } else { a * 2.0 });
            if n as f64 > kr && last < NEGLIGIBLE {
                break;
            }
        }
        if last >= NEGLIGIBLE && last >= 1e-16 * biggest {
            return Err(Error::Truncation { order: trunc, last });
        }

        Ok(Self {
            k,
            coeffs,
            prefactor: -Complex64::from_polar((2.0 / (PI * k)).sqrt(), -FRAC_PI_4),
        })
    }

    /// Number of series terms kept.
    pub fn terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Modulus of each retained term `eps_n J_n/H_n`.
    pub fn term_moduli(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.norm()).collect()
    }

    /// Far field of the origin-centred disk at angle `theta` from the incident
    /// direction, given as `e^{i theta}`.
    fn centred(&self, rot: Complex64) -> Complex64 {
        let mut w = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for c in &self.coeffs {
            sum += c * w.re;
            w *= rot;
        }
        self.prefactor * sum
    }

    /// Far field in direction `x` for the disk centred at `center` under the
    /// plane wave along `d`.
    pub fn far_field(&self, center: Vec2, d: Vec2, x: Vec2) -> Complex64 {
        let rot = Complex64::new(d.dot(x), d.cross(x));
        let rot = rot / rot.norm();
        let phase = Complex64::cis(self.k * center.dot(d - x));
        self.centred(rot) * phase
    }
}

/// Far field of `disk` under the plane wave `e^{ik x.d}` at `dirs`.
pub fn disk_far_field_plane(
    disk: &Disk,
    d: Vec2,
    k: f64,
    dirs: &[Vec2],
    trunc: Option<usize>,
) -> Result<FarField> {
    check_unit(d, "incident direction")?;
    for &x in dirs {
        check_unit(x, "observation direction")?;
    }
    let series = DiskSeries::new(k, disk.radius(), trunc)?;
    Ok(FarField {
        k,
        dirs: dirs.to_vec(),
        values: dirs.iter().map(|&x| series.far_field(disk.center, d, x)).collect(),
    })
}

/// Far field of `disk` under the two-wave incident field of `pair`.
pub fn disk_far_field_pair(
    disk: &Disk,
    pair: &IncidentPair,
    dirs: &[Vec2],
    trunc: Option<usize>,
) -> Result<FarField> {
    let a = disk_far_field_plane(disk, pair.d0, pair.k, dirs, trunc)?;
    let b = disk_far_field_plane(disk, pair.dl, pair.k, dirs, trunc)?;
    a.plus(&b)
}
