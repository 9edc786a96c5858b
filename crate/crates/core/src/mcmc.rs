//! Gaussian prior and the preconditioned Crank-Nicolson sampler, optionally
//! with a randomly walking step size `beta`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Open01, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Family;
use crate::observation::DataMisfit;

/// Independent Gaussian prior `N(mean, sigma^2 I)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub mean: Vec<f64>,
    pub sigma: f64,
}

impl PriorSpec {
    pub fn new(mean: Vec<f64>, sigma: f64) -> Result<Self> {
        let spec = Self { mean, sigma };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::Config(format!("prior sigma must be positive, got {}", self.sigma)));
        }
        if self.mean.is_empty() || self.mean.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("prior mean must be a non-empty finite vector".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Small disk at the origin: `(0, 0, ln 0.05)`, unit spread.
    pub fn disk() -> Self {
        Self {
            mean: vec![0.0, 0.0, 0.05f64.ln()],
            sigma: 1.0,
        }
    }

    /// Segment from `(0, 0)` to `(1, 1)`.
    pub fn crack() -> Self {
        Self {
            mean: vec![0.0, 0.0, 1.0, 1.0],
            sigma: 1.0,
        }
    }

    /// Unit circle at the origin.
    pub fn kite() -> Self {
        Self {
            mean: vec![0.0, 0.0, 1.0, 0.0, 1.0, 0.0],
            sigma: 1.0,
        }
    }

    pub fn for_family(family: Family) -> Self {
        match family {
            Family::Disk => Self::disk(),
            Family::Crack => Self::crack(),
            Family::Kite => Self::kite(),
        }
    }
}

pub fn prior_sample<R: Rng + ?Sized>(spec: &PriorSpec, rng: &mut R) -> Vec<f64> {
    spec.mean
        .iter()
        .map(|m| m + spec.sigma * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

fn check_beta(beta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::Domain(format!("beta must lie in [0, 1], got {beta}")));
    }
    Ok(())
}

/// `m + sqrt(1 - beta^2)(z - m) + beta omega`, `omega ~ N(0, pcn_std^2 I)`.
pub fn pcn_propose<R: Rng + ?Sized>(
    z: &[f64],
    beta: f64,
    mean: &[f64],
    pcn_std: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_beta(beta)?;
    if z.len() != mean.len() {
        return Err(Error::Dimension(format!(
            "state has {} components, prior mean {}",
            z.len(),
            mean.len()
        )));
    }
    let keep = (1.0 - beta * beta).sqrt();
    Ok(z.iter()
        .zip(mean)
        .map(|(zi, mi)| {
            let w: f64 = rng.sample(StandardNormal);
            if beta == 0.0 {
                // m + (z - m) need not round back to z.
                *zi
            } else {
                mi + keep * (zi - mi) + beta * pcn_std * w
            }
        })
        .collect())
}

/// `min(1, exp(phi_old - phi_new))`; an infinite or NaN `phi_new` gives 0.
pub fn hastings_alpha(phi_old: f64, phi_new: f64) -> f64 {
    let a = (phi_old - phi_new).exp().min(1.0);
    if a.is_nan() {
        0.0
    } else {
        a
    }
}

/// Maps a value in `[-1, 2]` back into `[0, 1]` by reflection at 0 and
/// wrap-around at 1.
pub fn fold_beta(beta: f64) -> f64 {
    if beta < 0.0 {
        -beta
    } else if beta > 1.0 {
        beta - 1.0
    } else {
        beta
    }
}

/// `sqrt(1 - gamma^2) beta + gamma (omega - 1/2)`, folded into `[0, 1]`.
pub fn beta_step(beta: f64, gamma: f64, omega: f64) -> f64 {
    fold_beta((1.0 - gamma * gamma).sqrt() * beta + gamma * (omega - 0.5))
}

pub fn beta_update<R: Rng + ?Sized>(beta: f64, gamma: f64, rng: &mut R) -> f64 {
    beta_step(beta, gamma, rng.gen::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BetaMode {
    Fixed,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub beta0: f64,
    pub gamma: f64,
    pub beta_mode: BetaMode,
    /// Proposal standard deviation; `None` uses the prior's.
    #[serde(default)]
    pub pcn_std: Option<f64>,
    pub burn_in: usize,
    pub stride: usize,
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
    /// ChaCha stream, so that replicated chains under one seed stay independent.
    #[serde(default)]
    pub stream: u64,
    #[serde(default)]
    pub keep_trace: bool,
    /// Starting state; the prior mean when absent.
    #[serde(default)]
    pub initial: Option<Vec<f64>>,
}

impl ChainConfig {
    pub fn fixed(beta: f64, burn_in: usize, stride: usize, count: usize) -> Self {
        Self {
            beta0: beta,
            gamma: 0.0,
            beta_mode: BetaMode::Fixed,
            pcn_std: None,
            burn_in,
            stride,
            count,
            seed: 0,
            stream: 0,
            keep_trace: false,
            initial: None,
        }
    }

    pub fn random(beta0: f64, gamma: f64, burn_in: usize, stride: usize, count: usize) -> Self {
        Self {
            beta0,
            gamma,
            beta_mode: BetaMode::Random,
            ..Self::fixed(beta0, burn_in, stride, count)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.beta0) || !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::Config(format!(
                "beta0 = {} and gamma = {} must lie in [0, 1]",
                self.beta0, self.gamma
            )));
        }
        if self.burn_in == 0 || self.stride == 0 || self.count == 0 {
            return Err(Error::Config("burn_in, stride and count must be at least 1".into()));
        }
        if let Some(s) = self.pcn_std {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::Config(format!("proposal std must be positive, got {s}")));
            }
        }
        Ok(())
    }

    /// `J1 + (J3 - 1) J2`: the index of the last selected state.
    pub fn iterations(&self) -> usize {
        self.burn_in + (self.count - 1) * self.stride
    }

    /// Iteration indices whose states are kept.
    pub fn selected_indices(&self) -> Vec<usize> {
        (0..self.count).map(|j| self.burn_in + j * self.stride).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub state: Vec<f64>,
    pub beta: f64,
    pub accepted: bool,
    pub misfit: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainOutput {
    /// `J3` states, one per row.
    pub selected: Vec<Vec<f64>>,
    pub accepted: usize,
    pub iterations: usize,
    pub trace: Option<Vec<TraceRow>>,
}

impl ChainOutput {
    pub fn acceptance_rate(&self) -> f64 {
        self.accepted as f64 / self.iterations as f64
    }
}

/// Anything that scores a flat parameter vector.
pub trait Misfit {
    fn misfit(&self, z: &[f64]) -> Result<f64>;
}

impl<F> Misfit for F
where
    F: Fn(&[f64]) -> Result<f64>,
{
    fn misfit(&self, z: &[f64]) -> Result<f64> {
        self(z)
    }
}

impl Misfit for DataMisfit {
    fn misfit(&self, z: &[f64]) -> Result<f64> {
        self.misfit_vec(z)
    }
}

pub fn chain_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs `J1 + (J3 - 1) J2` pCN steps from the initial state and keeps the
/// states at `J1, J1 + J2, ...`. Each step draws the proposal noise, then the
/// acceptance uniform, then (in random mode) the `beta` uniform.
pub fn run_chain<F: Misfit + ?Sized>(
    prior: &PriorSpec,
    cfg: &ChainConfig,
    misfit: &F,
) -> Result<ChainOutput> {
    prior.validate()?;
    cfg.validate()?;
    let mut z = cfg.initial.clone().unwrap_or_else(|| prior.mean.clone());
    if z.len() != prior.dim() {
        return Err(Error::Dimension(format!(
            "initial state has {} components, prior {}",
            z.len(),
            prior.dim()
        )));
    }
    let pcn_std = cfg.pcn_std.unwrap_or(prior.sigma);
    let mut rng = chain_rng(cfg.seed, cfg.stream);

    let wrap = |iteration: usize, e: Error| Error::Chain {
        iteration,
        source: Box::new(e),
    };
    let mut phi = misfit.misfit(&z).map_err(|e| wrap(0, e))?;
    if !phi.is_finite() {
        return Err(wrap(0, Error::Domain("initial state has infinite misfit".into())));
    }

    let total = cfg.iterations();
    let mut beta = cfg.beta0;
    let mut accepted = 0;
    let mut selected = Vec::with_capacity(cfg.count);
    let mut trace = cfg.keep_trace.then(|| Vec::with_capacity(total + 1));
    if let Some(t) = trace.as_mut() {
        t.push(TraceRow {
            iteration: 0,
            state: z.clone(),
            beta,
            accepted: true,
            misfit: phi,
        });
    }
    let mut next_pick = cfg.burn_in;

    for j in 1..=total {
        let x = pcn_propose(&z, beta, &prior.mean, pcn_std, &mut rng)?;
        let phi_x = misfit.misfit(&x).map_err(|e| wrap(j, e))?;
        let alpha = hastings_alpha(phi, phi_x);
        let u: f64 = rng.sample(Open01);
        let accept = u <= alpha;
        if accept {
            z = x;
            phi = phi_x;
            accepted += 1;
        }
        if let Some(t) = trace.as_mut() {
            t.push(TraceRow {
                iteration: j,
                state: z.clone(),
                beta,
                accepted: accept,
                misfit: phi,
            });
        }
        if cfg.beta_mode == BetaMode::Random {
            beta = beta_update(beta, cfg.gamma, &mut rng);
        }
        if j == next_pick {
            selected.push(z.clone());
            next_pick += cfg.stride;
        }
    }

    Ok(ChainOutput {
        selected,
        accepted,
        iterations: total,
        trace,
    })
}
