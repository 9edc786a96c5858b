//! Scatterer parameterizations, boundary sampling and the Hausdorff distance
//! between sampled boundaries.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector at angle `theta` from the positive x axis.
    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { x: c, y: s }
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, o: Self) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Sound-soft disk stored with its log-radius so that every real vector is a
/// valid disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Vec2,
    pub log_r: f64,
}

impl Disk {
    pub fn new(center: Vec2, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Degenerate(format!("disk radius {radius}")));
        }
        Ok(Self {
            center,
            log_r: radius.ln(),
        })
    }

    pub fn radius(&self) -> f64 {
        self.log_r.exp()
    }
}

/// Straight crack from `start` to `end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCrack")]
pub struct LineCrack {
    start: Vec2,
    end: Vec2,
}

#[derive(Deserialize)]
struct RawCrack {
    start: Vec2,
    end: Vec2,
}

impl TryFrom<RawCrack> for LineCrack {
    type Error = Error;
    fn try_from(raw: RawCrack) -> Result<Self> {
        LineCrack::new(raw.start, raw.end)
    }
}

impl LineCrack {
    pub fn new(start: Vec2, end: Vec2) -> Result<Self> {
        if !(start.is_finite() && end.is_finite()) {
            return Err(Error::Degenerate("non-finite crack endpoint".into()));
        }
        if start == end {
            return Err(Error::Degenerate(format!(
                "crack endpoints coincide at ({}, {})",
                start.x, start.y
            )));
        }
        Ok(Self { start, end })
    }

    pub fn start(&self) -> Vec2 {
        self.start
    }

    pub fn end(&self) -> Vec2 {
        self.end
    }

    pub fn midpoint(&self) -> Vec2 {
        (self.start + self.end) * 0.5
    }

    pub fn half_chord(&self) -> Vec2 {
        (self.end - self.start) * 0.5
    }

    /// Unchecked affine chart `z(s) = mid + s * half_chord`.
    pub fn point(&self, s: f64) -> Vec2 {
        self.midpoint() + self.half_chord() * s
    }
}

/// Two-harmonic trigonometric curve
/// `x(t) = (z1 + z3 cos t + z4 cos 2t, z2 + z5 sin t + z6 sin 2t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kite {
    pub z: [f64; 6],
}

/// Position and first two derivatives of a closed chart at one parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub point: Vec2,
    pub tangent: Vec2,
    pub second: Vec2,
}

impl Kite {
    pub const fn new(z: [f64; 6]) -> Self {
        Self { z }
    }

    pub const UNIT_CIRCLE: Kite = Kite::new([0.0, 0.0, 1.0, 0.0, 1.0, 0.0]);

    /// Unchecked evaluation of the chart and its derivatives.
    pub fn eval(&self, t: f64) -> CurvePoint {
        let [z1, z2, z3, z4, z5, z6] = self.z;
        let (s1, c1) = t.sin_cos();
        let (s2, c2) = (2.0 * t).sin_cos();
        CurvePoint {
            point: Vec2::new(z1 + z3 * c1 + z4 * c2, z2 + z5 * s1 + z6 * s2),
            tangent: Vec2::new(-z3 * s1 - 2.0 * z4 * s2, z5 * c1 + 2.0 * z6 * c2),
            second: Vec2::new(-z3 * c1 - 4.0 * z4 * c2, -z5 * s1 - 4.0 * z6 * s2),
        }
    }

    /// Signed enclosed area; positive for counter-clockwise orientation.
    pub fn signed_area(&self) -> f64 {
        // Green's theorem on the trigonometric chart integrates exactly:
        // only the matching-harmonic products survive.
        let [_, _, z3, z4, z5, z6] = self.z;
        PI * (z3 * z5 + 2.0 * z4 * z6)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Disk,
    Crack,
    Kite,
}

impl Family {
    pub fn dim(self) -> usize {
        match self {
            Family::Disk => 3,
            Family::Crack => 4,
            Family::Kite => 6,
        }
    }

    pub fn component_names(self) -> &'static [&'static str] {
        match self {
            Family::Disk => &["x1", "x2", "log_r"],
            Family::Crack => &["x1", "x2", "y1", "y2"],
            Family::Kite => &["z1", "z2", "z3", "z4", "z5", "z6"],
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::Disk => "disk",
            Family::Crack => "crack",
            Family::Kite => "kite",
        })
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disk" => Ok(Family::Disk),
            "crack" => Ok(Family::Crack),
            "kite" => Ok(Family::Kite),
            other => Err(Error::Config(format!("unknown scatterer family `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ScattererParams {
    Disk(Disk),
    #[serde(rename = "crack")]
    LineCrack(LineCrack),
    Kite(Kite),
}

impl ScattererParams {
    pub fn family(&self) -> Family {
        match self {
            ScattererParams::Disk(_) => Family::Disk,
            ScattererParams::LineCrack(_) => Family::Crack,
            ScattererParams::Kite(_) => Family::Kite,
        }
    }

    /// Builds the scatterer from its flat parameter vector. Disks take
    /// `(x1, x2, log r)`, cracks `(x1, x2, y1, y2)`, kites `(z1, ..., z6)`.
    pub fn from_vec(family: Family, v: &[f64]) -> Result<Self> {
        if v.len() != family.dim() {
            return Err(Error::Dimension(format!(
                "{family} needs {} parameters, got {}",
                family.dim(),
                v.len()
            )));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Degenerate("non-finite parameter".into()));
        }
        Ok(match family {
            Family::Disk => ScattererParams::Disk(Disk {
                center: Vec2::new(v[0], v[1]),
                log_r: v[2],
            }),
            Family::Crack => ScattererParams::LineCrack(LineCrack::new(
                Vec2::new(v[0], v[1]),
                Vec2::new(v[2], v[3]),
            )?),
            Family::Kite => {
                let mut z = [0.0; 6];
                z.copy_from_slice(v);
                ScattererParams::Kite(Kite { z })
            }
        })
    }

    pub fn to_vec(&self) -> Vec<f64> {
        match self {
            ScattererParams::Disk(d) => vec![d.center.x, d.center.y, d.log_r],
            ScattererParams::LineCrack(c) => vec![c.start.x, c.start.y, c.end.x, c.end.y],
            ScattererParams::Kite(k) => k.z.to_vec(),
        }
    }

    /// The same scatterer moved by `shift`.
    pub fn translated(&self, shift: Vec2) -> Self {
        match *self {
            ScattererParams::Disk(d) => ScattererParams::Disk(Disk {
                center: d.center + shift,
                ..d
            }),
            ScattererParams::LineCrack(c) => ScattererParams::LineCrack(LineCrack {
                start: c.start + shift,
                end: c.end + shift,
            }),
            ScattererParams::Kite(k) => {
                let mut z = k.z;
                z[0] += shift.x;
                z[1] += shift.y;
                ScattererParams::Kite(Kite { z })
            }
        }
    }
}

/// Point and (constant) tangent of the crack chart at `s` in `[-1, 1]`.
pub fn crack_chart(crack: &LineCrack, s: f64) -> Result<(Vec2, Vec2)> {
    if !(-1.0..=1.0).contains(&s) {
        return Err(Error::Domain(format!("crack chart parameter {s} outside [-1, 1]")));
    }
    Ok((crack.point(s), crack.half_chord()))
}

/// Point and tangent of the kite chart at `t` in `[0, 2 pi]`.
pub fn kite_chart(kite: &Kite, t: f64) -> Result<(Vec2, Vec2)> {
    if !(0.0..=2.0 * PI).contains(&t) {
        return Err(Error::Domain(format!("kite chart parameter {t} outside [0, 2pi]")));
    }
    let p = kite.eval(t);
    Ok((p.point, p.tangent))
}

/// Ordered boundary samples used for Hausdorff distances.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPolyline {
    points: Vec<Vec2>,
}

impl BoundaryPolyline {
    pub fn new(points: Vec<Vec2>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty("boundary polyline"));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::Degenerate("non-finite boundary point".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Vec2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub const DEFAULT_BOUNDARY_SAMPLES: usize = 1024;

/// Samples the boundary at `count` uniformly spaced chart parameters. Closed
/// curves start at parameter 0 and do not repeat it; cracks include both ends.
pub fn sample_boundary(params: &ScattererParams, count: usize) -> Result<BoundaryPolyline> {
    if count < 2 {
        return Err(Error::Domain(format!("need at least 2 boundary samples, got {count}")));
    }
    let closed = |i: usize| 2.0 * PI * i as f64 / count as f64;
    let points = match params {
        ScattererParams::Disk(d) => {
            let r = d.radius();
            (0..count)
                .map(|i| d.center + Vec2::from_angle(closed(i)) * r)
                .collect()
        }
        ScattererParams::LineCrack(c) => (0..count)
            .map(|i| c.point(-1.0 + 2.0 * i as f64 / (count - 1) as f64))
            .collect(),
        ScattererParams::Kite(k) => (0..count).map(|i| k.eval(closed(i)).point).collect(),
    };
    BoundaryPolyline::new(points)
}

fn directed(a: &[Vec2], b: &[Vec2]) -> f64 {
    a.iter()
        .map(|&p| {
            b.iter()
                .map(|&q| {
                    let d = p - q;
                    d.x * d.x + d.y * d.y
                })
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
        .sqrt()
}

/// Symmetric Hausdorff distance between two point sets.
pub fn hausdorff(a: &BoundaryPolyline, b: &BoundaryPolyline) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("hausdorff input"));
    }
    Ok(directed(&a.points, &b.points).max(directed(&b.points, &a.points)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Vec2, b: Vec2, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    const KITE_HAT: Kite = Kite::new([-0.65, -3.0, 1.0, 0.65, 1.5, 0.0]);

    #[test]
    fn crack_chart_endpoints_and_midpoint() {
        let c = LineCrack::new(Vec2::new(2.0, 3.0), Vec2::new(4.0, 5.0)).unwrap();
        assert_eq!(crack_chart(&c, -1.0).unwrap().0, Vec2::new(2.0, 3.0));
        assert_eq!(crack_chart(&c, 1.0).unwrap().0, Vec2::new(4.0, 5.0));
        let c = LineCrack::new(Vec2::new(0.0, 0.0), Vec2::new(2.0, 0.0)).unwrap();
        let (p, t) = crack_chart(&c, 0.0).unwrap();
        assert_eq!(p, Vec2::new(1.0, 0.0));
        assert_eq!(t, Vec2::new(1.0, 0.0));
        assert!(matches!(crack_chart(&c, 1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn degenerate_crack_rejected() {
        let p = Vec2::new(1.0, 1.0);
        assert!(matches!(LineCrack::new(p, p), Err(Error::Degenerate(_))));
        assert!(ScattererParams::from_vec(Family::Crack, &[1.0, 1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn kite_chart_reference_points() {
        let (p, _) = kite_chart(&KITE_HAT, 0.0).unwrap();
        assert!(close(p, Vec2::new(1.0, -3.0), 1e-15));
        let (p, _) = kite_chart(&KITE_HAT, PI).unwrap();
        assert!(close(p, Vec2::new(-1.0, -3.0), 1e-15));
        for i in 0..7 {
            let t = i as f64 * 0.9;
            let (p, _) = kite_chart(&Kite::UNIT_CIRCLE, t).unwrap();
            assert!(close(p, Vec2::from_angle(t), 1e-15));
        }
        assert!(kite_chart(&KITE_HAT, 7.0).is_err());
    }

    #[test]
    fn kite_derivatives_match_finite_differences() {
        let k = Kite::new([0.3, -0.2, 1.1, 0.4, 0.9, -0.3]);
        let h = 1e-4;
        for i in 1..20 {
            let t = i as f64 * 0.31;
            let p = k.eval(t);
            let fd = (k.eval(t + h).point - k.eval(t - h).point) * (0.5 / h);
            assert!(close(p.tangent, fd, 1e-6));
            let fd2 = (k.eval(t + h).tangent - k.eval(t - h).tangent) * (0.5 / h);
            assert!(close(p.second, fd2, 1e-6));
        }
    }

    #[test]
    fn signed_area_of_reference_shapes() {
        assert!((Kite::UNIT_CIRCLE.signed_area() - PI).abs() < 1e-15);
        assert!((KITE_HAT.signed_area() - 1.5 * PI).abs() < 1e-14);
        let flipped = Kite::new([0.0, 0.0, 1.0, 0.0, -1.0, 0.0]);
        assert!(flipped.signed_area() < 0.0);
    }

    #[test]
    fn sample_boundary_cases() {
        let disk = ScattererParams::Disk(Disk::new(Vec2::default(), 1.0).unwrap());
        let pts = sample_boundary(&disk, 4).unwrap();
        let expected = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
        for (p, &(x, y)) in pts.points().iter().zip(&expected) {
            assert!(close(*p, Vec2::new(x, y), 1e-15));
        }

        let crack = ScattererParams::from_vec(Family::Crack, &[0.0, 0.0, 1.0, 0.0]).unwrap();
        let pts = sample_boundary(&crack, 3).unwrap();
        assert_eq!(
            pts.points(),
            &[Vec2::new(0.0, 0.0), Vec2::new(0.5, 0.0), Vec2::new(1.0, 0.0)]
        );

        let kite = ScattererParams::Kite(KITE_HAT);
        let pts = sample_boundary(&kite, 256).unwrap();
        assert_eq!(pts.len(), 256);
        assert!(close(pts.points()[0], Vec2::new(1.0, -3.0), 1e-15));

        assert!(sample_boundary(&kite, 1).is_err());
    }

    #[test]
    fn disk_samples_lie_on_the_circle() {
        let d = Disk::new(Vec2::new(1.0, 0.25), 0.12).unwrap();
        let pts = sample_boundary(&ScattererParams::Disk(d), 333).unwrap();
        for p in pts.points() {
            assert!(((*p - d.center).norm() - d.radius()).abs() <= 1e-14);
        }
    }

    #[test]
    fn hausdorff_examples() {
        let unit = ScattererParams::Disk(Disk::new(Vec2::default(), 1.0).unwrap());
        let two = ScattererParams::Disk(Disk::new(Vec2::default(), 2.0).unwrap());
        let a = sample_boundary(&unit, 4096).unwrap();
        let b = sample_boundary(&two, 4096).unwrap();
        assert_eq!(hausdorff(&a, &a).unwrap(), 0.0);
        assert!((hausdorff(&a, &b).unwrap() - 1.0).abs() <= 1e-3);

        let seg = sample_boundary(
            &ScattererParams::from_vec(Family::Crack, &[0.0, 0.0, 1.0, 0.0]).unwrap(),
            101,
        )
        .unwrap();
        let origin = BoundaryPolyline::new(vec![Vec2::default()]).unwrap();
        assert!((hausdorff(&seg, &origin).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(BoundaryPolyline::new(vec![]), Err(Error::Empty(_))));
    }

    #[test]
    fn vector_round_trip_and_translation() {
        let v = [-0.65, -3.0, 1.0, 0.65, 1.5, 0.0];
        let p = ScattererParams::from_vec(Family::Kite, &v).unwrap();
        assert_eq!(p.to_vec(), v);
        let moved = p.translated(Vec2::new(1.0, 2.0));
        assert_eq!(moved.to_vec()[..2], [0.35, -1.0]);
        assert!(ScattererParams::from_vec(Family::Disk, &v).is_err());
    }

    #[test]
    fn params_serde_round_trip() {
        let p = ScattererParams::from_vec(Family::Crack, &[2.0, 3.0, 4.0, 5.0]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<ScattererParams>(&s).unwrap(), p);
        let bad = r#"{"family":"crack","start":{"x":1,"y":1},"end":{"x":1,"y":1}}"#;
        assert!(serde_json::from_str::<ScattererParams>(bad).is_err());
    }
}
