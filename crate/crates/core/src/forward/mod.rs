//! Forward scattering solvers. Every solver returns far-field patterns of the
//! scattered wave for plane-wave incidence `e^{ik x.d}`; superpositions follow
//! by linearity.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{ScattererParams, Vec2};

pub mod crack;
pub mod disk;
pub mod kite;

const UNIT_TOL: f64 = 1e-12;

pub(crate) fn check_unit(d: Vec2, what: &str) -> Result<()> {
    if !d.is_finite() || (d.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::Domain(format!(
            "{what} ({}, {}) is not a unit vector",
            d.x, d.y
        )));
    }
    Ok(())
}

pub(crate) fn check_wavenumber(k: f64) -> Result<()> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::Domain(format!("wavenumber must be positive, got {k}")));
    }
    Ok(())
}

/// Far-field samples `u(x_m)` at unit directions `x_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct FarField {
    pub k: f64,
    pub dirs: Vec<Vec2>,
    pub values: Vec<Complex64>,
}

impl FarField {
    pub fn moduli(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// Elementwise sum of two far fields on the same directions.
    pub fn plus(&self, other: &FarField) -> Result<FarField> {
        if self.dirs != other.dirs || self.k != other.k {
            return Err(Error::Dimension("far fields on different grids".into()));
        }
        Ok(FarField {
            k: self.k,
            dirs: self.dirs.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }
}

/// Two superposed plane waves `e^{ik x.d0} + e^{ik x.dl}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidentPair {
    pub k: f64,
    pub d0: Vec2,
    pub dl: Vec2,
}

impl IncidentPair {
    pub fn new(k: f64, d0: Vec2, dl: Vec2) -> Result<Self> {
        check_wavenumber(k)?;
        check_unit(d0, "fixed incident direction")?;
        check_unit(dl, "varying incident direction")?;
        Ok(Self { k, d0, dl })
    }
}

/// Incident field shape; the wavenumber is supplied separately.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Incident {
    Plane(Vec2),
    Pair(Vec2, Vec2),
}

impl Incident {
    pub fn directions(&self) -> Vec<Vec2> {
        match *self {
            Incident::Plane(d) => vec![d],
            Incident::Pair(a, b) => vec![a, b],
        }
    }

    pub fn check(&self) -> Result<()> {
        for d in self.directions() {
            check_unit(d, "incident direction")?;
        }
        Ok(())
    }

    pub fn value(&self, k: f64, x: Vec2) -> Complex64 {
        self.directions()
            .into_iter()
            .map(|d| Complex64::cis(k * x.dot(d)))
            .sum()
    }
}

impl From<IncidentPair> for Incident {
    fn from(p: IncidentPair) -> Self {
        Incident::Pair(p.d0, p.dl)
    }
}

/// Discretization choices for the numerical solvers.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Disk series order; `None` picks [`disk::default_truncation`].
    pub disk_trunc: Option<usize>,
    pub crack_n: usize,
    pub kite_n: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            disk_trunc: None,
            crack_n: 64,
            kite_n: 64,
        }
    }
}

/// Far fields for a batch of plane waves: entry `(m, p)` is `u(obs[m])` for
/// incidence along `incident[p]`. Each geometry is discretized and factored
/// once.
pub fn plane_far_fields(
    params: &ScattererParams,
    k: f64,
    incident: &[Vec2],
    obs: &[Vec2],
    opts: &SolverOptions,
) -> Result<DMatrix<Complex64>> {
    check_wavenumber(k)?;
    for &d in incident {
        check_unit(d, "incident direction")?;
    }
    for &x in obs {
        check_unit(x, "observation direction")?;
    }
    match params {
        ScattererParams::Disk(d) => {
            let series = disk::DiskSeries::new(k, d.radius(), opts.disk_trunc)?;
            Ok(DMatrix::from_fn(obs.len(), incident.len(), |m, p| {
                series.far_field(d.center, incident[p], obs[m])
            }))
        }
        ScattererParams::LineCrack(c) => {
            let weights = crack::quadrature_weights(opts.crack_n)?;
            crack::CrackSolver::new(c, k, &weights)?.far_field_matrix(incident, obs)
        }
        ScattererParams::Kite(kt) => {
            kite::KiteSolver::new(kt, k, opts.kite_n)?.far_field_matrix(incident, obs)
        }
    }
}

/// Directions at the given angles.
pub fn directions(angles: impl IntoIterator<Item = f64>) -> Vec<Vec2> {
    angles.into_iter().map(Vec2::from_angle).collect()
}

/// `count` equispaced directions starting at angle 0.
pub fn uniform_directions(count: usize) -> Vec<Vec2> {
    directions((0..count).map(|i| 2.0 * std::f64::consts::PI * i as f64 / count as f64))
}
