//! Summaries of selected chain states.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{hausdorff, sample_boundary, Family, ScattererParams, DEFAULT_BOUNDARY_SAMPLES};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub name: String,
    pub exact: f64,
    pub mean: f64,
    pub sd: f64,
    /// Percent; `None` when the exact value is zero.
    pub rel_error_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub family: Family,
    pub samples: usize,
    pub components: Vec<ComponentSummary>,
    /// Distance between the boundary of the mean state and the exact boundary.
    pub hausdorff: Option<f64>,
}

impl SummaryReport {
    pub fn means(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.mean).collect()
    }

    pub fn sds(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.sd).collect()
    }

    pub fn rel_errors(&self) -> Vec<Option<f64>> {
        self.components.iter().map(|c| c.rel_error_pct).collect()
    }
}

/// Mean and sample standard deviation (divisor `n - 1`) of each column.
pub fn column_moments(samples: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<f64>)> {
    if samples.len() < 2 {
        return Err(Error::Config(format!(
            "need at least 2 samples for a summary, got {}",
            samples.len()
        )));
    }
    let dim = samples[0].len();
    if samples.iter().any(|s| s.len() != dim) {
        return Err(Error::Dimension("ragged sample matrix".into()));
    }
    let n = samples.len() as f64;
    let mean: Vec<f64> = (0..dim)
        .map(|i| samples.iter().map(|s| s[i]).sum::<f64>() / n)
        .collect();
    let sd = (0..dim)
        .map(|i| {
            let ss: f64 = samples.iter().map(|s| (s[i] - mean[i]).powi(2)).sum();
            (ss / (n - 1.0)).sqrt()
        })
        .collect();
    Ok((mean, sd))
}

/// `|mean - exact| / |exact|` in percent.
pub fn relative_error_pct(mean: f64, exact: f64) -> Option<f64> {
    (exact != 0.0).then(|| 100.0 * (mean - exact).abs() / exact.abs())
}

/// Chain coordinates as reported: disks swap `log r` for `r`.
fn reported(family: Family, z: &[f64]) -> Vec<f64> {
    let mut v = z.to_vec();
    if family == Family::Disk {
        v[2] = v[2].exp();
    }
    v
}

pub fn reported_names(family: Family) -> &'static [&'static str] {
    match family {
        Family::Disk => &["x1", "x2", "r"],
        other => other.component_names(),
    }
}

/// Summarize chain-coordinate samples against the exact scatterer.
pub fn summarize(
    samples: &[Vec<f64>],
    exact: &ScattererParams,
    with_hausdorff: bool,
) -> Result<SummaryReport> {
    let family = exact.family();
    let dim = family.dim();
    if let Some(s) = samples.iter().find(|s| s.len() != dim) {
        return Err(Error::Dimension(format!(
            "{family} samples need {dim} components, got {}",
            s.len()
        )));
    }
    let shown: Vec<Vec<f64>> = samples.iter().map(|s| reported(family, s)).collect();
    let (mean, sd) = column_moments(&shown)?;
    let exact_shown = reported(family, &exact.to_vec());
    let components = reported_names(family)
        .iter()
        .enumerate()
        .map(|(i, name)| ComponentSummary {
            name: name.to_string(),
            exact: exact_shown[i],
            mean: mean[i],
            sd: sd[i],
            rel_error_pct: relative_error_pct(mean[i], exact_shown[i]),
        })
        .collect();
    let hausdorff = if with_hausdorff {
        let (chain_mean, _) = column_moments(samples)?;
        let recon = ScattererParams::from_vec(family, &chain_mean)?;
        Some(hausdorff(
            &sample_boundary(&recon, DEFAULT_BOUNDARY_SAMPLES)?,
            &sample_boundary(exact, DEFAULT_BOUNDARY_SAMPLES)?,
        )?)
    } else {
        None
    };
    Ok(SummaryReport {
        family,
        samples: samples.len(),
        components,
        hausdorff,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `bins + 1` increasing edges.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Equal-width bins over `[min, max]`; the last bin is closed.
pub fn histogram(samples: &[f64], bins: usize) -> Result<Histogram> {
    if samples.is_empty() {
        return Err(Error::Empty("histogram samples"));
    }
    if bins == 0 {
        return Err(Error::Config("histogram needs at least one bin".into()));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite histogram sample".into()));
    }
    let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        let mut counts = vec![0; bins];
        counts[0] = samples.len();
        let edges = (0..=bins).map(|i| lo + i as f64).collect();
        return Ok(Histogram { edges, counts });
    }
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins)
        .map(|i| if i == bins { hi } else { lo + width * i as f64 })
        .collect();
    let mut counts = vec![0; bins];
    for &v in samples {
        let idx = (((v - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Ok(Histogram { edges, counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Kite, LineCrack, Vec2};
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    fn crack(z: [f64; 4]) -> ScattererParams {
        ScattererParams::LineCrack(
            LineCrack::new(Vec2::new(z[0], z[1]), Vec2::new(z[2], z[3])).unwrap(),
        )
    }

    #[test]
    fn identical_samples() {
        let exact = crack([2.0, 3.0, 4.0, 5.0]);
        let s = vec![exact.to_vec(); 5];
        let r = summarize(&s, &exact, false).unwrap();
        assert_eq!(r.means(), exact.to_vec());
        assert!(r.sds().iter().all(|&v| v == 0.0));
        assert!(r.rel_errors().iter().all(|v| *v == Some(0.0)));
    }

    #[test]
    fn two_point_moments() {
        let (m, s) = column_moments(&[vec![0.0, 0.0], vec![2.0, 2.0]]).unwrap();
        assert_eq!(m, vec![1.0, 1.0]);
        for v in s {
            assert!((v - 2f64.sqrt()).abs() < 1e-15);
        }
        assert_eq!(relative_error_pct(1.0, 1.0), Some(0.0));
    }

    #[test]
    fn single_sample_rejected() {
        assert!(column_moments(&[vec![1.0]]).is_err());
    }

    #[test]
    fn disk_radius_reported_linearly() {
        let exact = ScattererParams::from_vec(Family::Disk, &[1.0, 0.25, 0.12f64.ln()]).unwrap();
        let s = vec![vec![1.0, 0.25, 0.1f64.ln()], vec![1.0, 0.25, 0.14f64.ln()]];
        let r = summarize(&s, &exact, false).unwrap();
        assert!((r.components[2].mean - 0.12).abs() < 1e-15);
        assert!((r.components[2].exact - 0.12).abs() < 1e-15);
        assert_eq!(r.components[2].name, "r");
    }

    #[test]
    fn kite_zero_component_has_no_relative_error() {
        let exact = ScattererParams::Kite(Kite::new([-0.65, -3.0, 1.0, 0.65, 1.5, 0.0]));
        let s = vec![exact.to_vec(); 3];
        let r = summarize(&s, &exact, true).unwrap();
        assert_eq!(r.components[5].rel_error_pct, None);
        assert!(r.hausdorff.unwrap() < 1e-12);
    }

    #[test]
    fn histogram_examples() {
        let h = histogram(&[0.0, 1.0, 2.0, 3.0], 2).unwrap();
        assert_eq!(h.counts, vec![2, 2]);
        assert_eq!(h.edges, vec![0.0, 1.5, 3.0]);
        let c = histogram(&[4.0; 7], 5).unwrap();
        assert_eq!(c.counts, vec![7, 0, 0, 0, 0]);
        assert!(histogram(&[], 3).is_err());
        assert!(histogram(&[1.0], 0).is_err());
    }

    #[test]
    fn histogram_normal_mass() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let x: Vec<f64> = (0..10_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let h = histogram(&x, 50).unwrap();
        assert_eq!(h.total(), x.len());
        let inside = x.iter().filter(|v| v.abs() < 1.96).count() as f64 / x.len() as f64;
        assert!((inside - 0.95).abs() < 0.02);
    }
}
