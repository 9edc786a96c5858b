//! Phaseless measurements: direction grids, the parameter-to-data map
//! `Z -> |u(x_m; Z, d_0, d_l)|`, multiplicative Gaussian noise and the
//! weighted least-squares misfit.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{plane_far_fields, SolverOptions};
use crate::geometry::{Family, ScattererParams, Vec2};

/// Angle conventions for the incident and observation directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionGrid {
    /// `theta_l = -pi/2 + 2 pi l/(L+1)`, `theta_m = -pi/2 + 2 pi m/M`.
    Disk,
    /// `theta_l = 2 pi l/(L+1)`, `theta_m = -pi + 2 pi (m-1)/M`.
    Kite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementConfig {
    pub k: f64,
    /// Number of varying incident directions `d_1..d_L`.
    pub l: usize,
    /// Number of observation directions.
    pub m: usize,
    pub grid: DirectionGrid,
}

impl MeasurementConfig {
    pub fn new(k: f64, l: usize, m: usize, grid: DirectionGrid) -> Result<Self> {
        let cfg = Self { k, l, m, grid };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::Config(format!("wavenumber must be positive, got {}", self.k)));
        }
        if self.l == 0 || self.m == 0 {
            return Err(Error::Config(format!(
                "need L >= 1 and M >= 1, got L = {}, M = {}",
                self.l, self.m
            )));
        }
        Ok(())
    }

    /// `d_0..=d_L`; index 0 is the fixed direction.
    pub fn incident_dirs(&self) -> Vec<Vec2> {
        let step = 2.0 * PI / (self.l + 1) as f64;
        let offset = match self.grid {
            DirectionGrid::Disk => -0.5 * PI,
            DirectionGrid::Kite => 0.0,
        };
        (0..=self.l)
            .map(|l| Vec2::from_angle(offset + step * l as f64))
            .collect()
    }

    /// `x_1..=x_M`.
    pub fn observation_dirs(&self) -> Vec<Vec2> {
        let step = 2.0 * PI / self.m as f64;
        (1..=self.m)
            .map(|m| {
                let theta = match self.grid {
                    DirectionGrid::Disk => -0.5 * PI + step * m as f64,
                    DirectionGrid::Kite => -PI + step * (m - 1) as f64,
                };
                Vec2::from_angle(theta)
            })
            .collect()
    }
}

/// Forward map with directions and solver settings fixed up front.
#[derive(Debug, Clone)]
pub struct PhaselessModel {
    config: MeasurementConfig,
    incident: Vec<Vec2>,
    obs: Vec<Vec2>,
    opts: SolverOptions,
}

impl PhaselessModel {
    pub fn new(config: MeasurementConfig, opts: SolverOptions) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            incident: config.incident_dirs(),
            obs: config.observation_dirs(),
            config,
            opts,
        })
    }

    pub fn config(&self) -> &MeasurementConfig {
        &self.config
    }

    /// `M x L` matrix of `|u(x_m; d_0) + u(x_m; d_l)|`, `l = 1..=L`.
    pub fn eval(&self, params: &ScattererParams) -> Result<DMatrix<f64>> {
        let ff = plane_far_fields(params, self.config.k, &self.incident, &self.obs, &self.opts)?;
        Ok(DMatrix::from_fn(self.config.m, self.config.l, |m, l| {
            (ff[(m, 0)] + ff[(m, l + 1)]).norm()
        }))
    }
}

pub fn forward_phaseless(
    params: &ScattererParams,
    config: &MeasurementConfig,
    opts: &SolverOptions,
) -> Result<DMatrix<f64>> {
    PhaselessModel::new(*config, *opts)?.eval(params)
}

/// Observed data `y` (`M x L`) with per-entry noise standard deviations.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSet {
    pub config: MeasurementConfig,
    pub sigma_eta: f64,
    pub y: DMatrix<f64>,
    /// `sigma_eta * |truth|` as recorded by the generator.
    pub sigma: DMatrix<f64>,
}

impl ObservationSet {
    pub fn variances(&self) -> DMatrix<f64> {
        self.sigma.map(|s| s * s)
    }

    /// Standard deviations an inverter can build from the data alone:
    /// `max(sigma_eta |y|, 1e-8 max|y|)`.
    pub fn inversion_sigma(&self) -> Result<DMatrix<f64>> {
        let peak = self.y.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let floor = 1e-8 * peak;
        if !(floor > 0.0) {
            return Err(Error::Domain("observations are identically zero".into()));
        }
        Ok(self.y.map(|v| (self.sigma_eta * v.abs()).max(floor)))
    }
}

fn check_sigma_eta(sigma_eta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&sigma_eta) {
        return Err(Error::Domain(format!(
            "noise coefficient must lie in [0, 1), got {sigma_eta}"
        )));
    }
    Ok(())
}

fn check_shape(config: &MeasurementConfig, a: &DMatrix<f64>, what: &str) -> Result<()> {
    if a.shape() != (config.m, config.l) {
        return Err(Error::Dimension(format!(
            "{what} is {}x{}, expected {}x{}",
            a.nrows(),
            a.ncols(),
            config.m,
            config.l
        )));
    }
    Ok(())
}

/// `y = truth (1 + sigma_eta omega)` for a given standard-normal draw `omega`.
pub fn add_noise_with(
    truth: &DMatrix<f64>,
    config: &MeasurementConfig,
    sigma_eta: f64,
    omega: &DMatrix<f64>,
) -> Result<ObservationSet> {
    check_sigma_eta(sigma_eta)?;
    check_shape(config, truth, "truth")?;
    check_shape(config, omega, "noise draw")?;
    Ok(ObservationSet {
        config: *config,
        sigma_eta,
        y: truth.zip_map(omega, |t, w| t * (1.0 + sigma_eta * w)),
        sigma: truth.map(|t| sigma_eta * t.abs()),
    })
}

/// Draws `omega` entrywise from `rng`, column by column (`l` outer, `m`
/// inner), and applies [`add_noise_with`].
pub fn add_noise<R: Rng + ?Sized>(
    truth: &DMatrix<f64>,
    config: &MeasurementConfig,
    sigma_eta: f64,
    rng: &mut R,
) -> Result<ObservationSet> {
    check_sigma_eta(sigma_eta)?;
    let mut omega = DMatrix::zeros(truth.nrows(), truth.ncols());
    for v in omega.iter_mut() {
        *v = rng.sample(StandardNormal);
    }
    add_noise_with(truth, config, sigma_eta, &omega)
}

/// The zero noise draw: `y = truth`, with `sigma_eta` still setting the weights.
pub fn ideal_observations(
    truth: &DMatrix<f64>,
    config: &MeasurementConfig,
    sigma_eta: f64,
) -> Result<ObservationSet> {
    let zero = DMatrix::zeros(truth.nrows(), truth.ncols());
    add_noise_with(truth, config, sigma_eta, &zero)
}

/// `(1/2) sum ((y - g) / sigma)^2`.
pub fn misfit_value(y: &DMatrix<f64>, g: &DMatrix<f64>, sigma: &DMatrix<f64>) -> Result<f64> {
    if y.shape() != g.shape() || y.shape() != sigma.shape() {
        return Err(Error::Dimension("misfit operands differ in shape".into()));
    }
    let mut sum = 0.0;
    for ((yv, gv), s) in y.iter().zip(g.iter()).zip(sigma.iter()) {
        if !(*s > 0.0) {
            return Err(Error::Domain(format!("non-positive noise level {s}")));
        }
        let r = (yv - gv) / s;
        sum += r * r;
    }
    Ok(0.5 * sum)
}

/// Which standard deviations weight the misfit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    /// Built from the observed values ([`ObservationSet::inversion_sigma`]).
    #[default]
    Observed,
    /// The generator's truth-based values.
    Recorded,
}

/// `Phi(Z) = (1/2)|Y - G(Z)|^2_Sigma` over flat parameter vectors.
#[derive(Debug, Clone)]
pub struct DataMisfit {
    family: Family,
    model: PhaselessModel,
    y: DMatrix<f64>,
    sigma: DMatrix<f64>,
}

impl DataMisfit {
    pub fn new(
        family: Family,
        obs: &ObservationSet,
        opts: SolverOptions,
        weighting: Weighting,
    ) -> Result<Self> {
        let sigma = match weighting {
            Weighting::Observed => obs.inversion_sigma()?,
            Weighting::Recorded => obs.sigma.clone(),
        };
        if let Some(s) = sigma.iter().find(|s| !(**s > 0.0)) {
            return Err(Error::Domain(format!("non-positive noise level {s}")));
        }
        Ok(Self {
            family,
            model: PhaselessModel::new(obs.config, opts)?,
            y: obs.y.clone(),
            sigma,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn misfit_params(&self, params: &ScattererParams) -> Result<f64> {
        misfit_value(&self.y, &self.model.eval(params)?, &self.sigma)
    }

    /// Misfit of a flat parameter vector. Geometry the solvers cannot
    /// represent (coincident crack ends, cusped curves, `kr` out of range)
    /// gets `+inf`, so a sampler simply rejects it.
    pub fn misfit_vec(&self, z: &[f64]) -> Result<f64> {
        let outcome = ScattererParams::from_vec(self.family, z).and_then(|p| self.misfit_params(&p));
        match outcome {
            Err(Error::Degenerate(_))
            | Err(Error::IrregularCurve { .. })
            | Err(Error::SingularSystem { .. })
            | Err(Error::Truncation { .. })
            | Err(Error::Domain(_)) => Ok(f64::INFINITY),
            other => other,
        }
    }
}

/// Misfit of `params` against `obs`, weighted by the observed-value
/// standard deviations.
pub fn misfit(params: &ScattererParams, obs: &ObservationSet, opts: &SolverOptions) -> Result<f64> {
    DataMisfit::new(params.family(), obs, *opts, Weighting::Observed)?.misfit_params(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::disk::disk_far_field_plane;
    use crate::geometry::Disk;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn disk_hat() -> ScattererParams {
        ScattererParams::Disk(Disk::new(Vec2::new(1.0, 0.25), 0.12).unwrap())
    }

    #[test]
    fn disk_grid_starts_at_minus_y() {
        let cfg = MeasurementConfig::new(1.0, 32, 64, DirectionGrid::Disk).unwrap();
        let d0 = cfg.incident_dirs()[0];
        assert!((d0 - Vec2::new(0.0, -1.0)).norm() < 1e-15);
        assert_eq!(cfg.incident_dirs().len(), 33);
        // x_M sits at -pi/2 + 2 pi.
        assert!((cfg.observation_dirs()[63] - Vec2::new(0.0, -1.0)).norm() < 1e-15);

        let one = MeasurementConfig::new(1.0, 1, 1, DirectionGrid::Disk).unwrap();
        assert!((one.incident_dirs()[1] - Vec2::new(0.0, 1.0)).norm() < 1e-15);
        assert!((one.observation_dirs()[0] - Vec2::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn kite_grid_conventions() {
        let cfg = MeasurementConfig::new(2.0, 50, 50, DirectionGrid::Kite).unwrap();
        assert_eq!(cfg.incident_dirs()[0], Vec2::new(1.0, 0.0));
        assert!((cfg.observation_dirs()[0] - Vec2::new(-1.0, 0.0)).norm() < 1e-15);
        assert!(MeasurementConfig::new(2.0, 0, 50, DirectionGrid::Kite).is_err());
    }

    #[test]
    fn phaseless_data_is_nonnegative_and_doubles_for_equal_directions() {
        let cfg = MeasurementConfig::new(1.0, 8, 12, DirectionGrid::Disk).unwrap();
        let g = forward_phaseless(&disk_hat(), &cfg, &SolverOptions::default()).unwrap();
        assert!(g.iter().all(|v| *v >= 0.0));

        // With L = M = 1 we can force d_l = d_0 via a custom comparison: the
        // pair modulus equals twice the single-wave modulus.
        let ScattererParams::Disk(d) = disk_hat() else { unreachable!() };
        let obs = cfg.observation_dirs();
        let d0 = cfg.incident_dirs()[0];
        let single = disk_far_field_plane(&d, d0, 1.0, &obs, None).unwrap();
        let both = single.plus(&single).unwrap();
        for (a, b) in single.moduli().iter().zip(both.moduli()) {
            assert!((2.0 * a - b).abs() <= 1e-13);
        }
    }

    #[test]
    fn noise_model_examples() {
        let cfg = MeasurementConfig::new(1.0, 1, 1, DirectionGrid::Disk).unwrap();
        let truth = DMatrix::from_element(1, 1, 2.0);
        let omega = DMatrix::from_element(1, 1, 1.0);
        let obs = add_noise_with(&truth, &cfg, 0.03, &omega).unwrap();
        assert!((obs.y[(0, 0)] - 2.06).abs() < 1e-15);
        assert!((obs.variances()[(0, 0)] - 0.06 * 0.06).abs() < 1e-17);

        let ideal = ideal_observations(&truth, &cfg, 0.03).unwrap();
        assert_eq!(ideal.y, truth);
        assert!(add_noise_with(&truth, &cfg, -0.1, &omega).is_err());
        assert!(add_noise_with(&truth, &cfg, 1.0, &omega).is_err());
    }

    #[test]
    fn seeded_noise_is_reproducible() {
        let cfg = MeasurementConfig::new(1.0, 4, 6, DirectionGrid::Disk).unwrap();
        let truth = DMatrix::from_fn(6, 4, |m, l| 1.0 + (m * 4 + l) as f64);
        let a = add_noise(&truth, &cfg, 0.03, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        let b = add_noise(&truth, &cfg, 0.03, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert_eq!(a, b);
        assert!(a.y.iter().zip(b.y.iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn misfit_examples() {
        let y = DMatrix::from_fn(3, 2, |m, l| (m + l) as f64 + 1.0);
        let sigma = DMatrix::from_element(3, 2, 0.5);
        assert_eq!(misfit_value(&y, &y, &sigma).unwrap(), 0.0);
        let g = &y + &sigma;
        assert!((misfit_value(&y, &g, &sigma).unwrap() - 3.0).abs() < 1e-15);
        let bad = DMatrix::from_element(3, 2, 0.0);
        assert!(misfit_value(&y, &g, &bad).is_err());
    }

    #[test]
    fn misfit_vanishes_at_truth() {
        let cfg = MeasurementConfig::new(1.0, 6, 10, DirectionGrid::Disk).unwrap();
        let opts = SolverOptions::default();
        let truth = forward_phaseless(&disk_hat(), &cfg, &opts).unwrap();
        let obs = ideal_observations(&truth, &cfg, 0.03).unwrap();
        assert!(misfit(&disk_hat(), &obs, &opts).unwrap() <= 1e-20);
        let other = disk_hat().translated(Vec2::new(0.1, 0.0));
        assert!(misfit(&other, &obs, &opts).unwrap() > 1.0);
    }

    #[test]
    fn inadmissible_geometry_costs_infinity() {
        let cfg = MeasurementConfig::new(1.0, 2, 3, DirectionGrid::Disk).unwrap();
        let truth = DMatrix::from_element(3, 2, 1.0);
        let obs = ideal_observations(&truth, &cfg, 0.03).unwrap();
        let f = DataMisfit::new(Family::Crack, &obs, SolverOptions::default(), Weighting::Observed)
            .unwrap();
        assert_eq!(f.misfit_vec(&[1.0, 1.0, 1.0, 1.0]).unwrap(), f64::INFINITY);
        assert!(matches!(f.misfit_vec(&[1.0, 1.0]), Err(Error::Dimension(_))));
    }
}
