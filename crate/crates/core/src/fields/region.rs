//! Region descriptors: axis-aligned boxes and balls.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum Region<T> {
    Box(Vec<(T, T)>),
    Ball { center: Vec<T>, radius: T },
    /// Whole space; no escape checks.
    Unbounded,
}

/// Serialized form: `{"box": [[lo,hi],...]}` or `{"ball": {"center": [...], "radius": r}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionConfig {
    Box(Vec<[f64; 2]>),
    Ball { center: Vec<f64>, radius: f64 },
}

impl<T: Scalar> Region<T> {
    pub fn from_config(c: &RegionConfig) -> Result<Self> {
        match c {
            RegionConfig::Box(b) => {
                if b.is_empty() || b.iter().any(|[lo, hi]| !(lo <= hi) || !lo.is_finite() || !hi.is_finite()) {
                    return Err(Error::InvalidSpec("box bounds must satisfy lo <= hi".into()));
                }
                Ok(Region::Box(b.iter().map(|[lo, hi]| (T::c(*lo), T::c(*hi))).collect()))
            }
            RegionConfig::Ball { center, radius } => {
                if !(*radius > 0.0) || center.is_empty() {
                    return Err(Error::InvalidSpec("ball needs a centre and a positive radius".into()));
                }
                Ok(Region::Ball { center: center.iter().map(|&x| T::c(x)).collect(), radius: T::c(*radius) })
            }
        }
    }

    /// Parses `box:lo1,hi1,lo2,hi2,...` or `ball:c1,...,cn,r`.
    pub fn parse(s: &str) -> Result<Self> {
        let nums = |body: &str| -> Result<Vec<f64>> {
            body.split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| Error::InvalidSpec(format!("bad number `{t}` in region"))))
                .collect()
        };
        if let Some(body) = s.trim().strip_prefix("box:") {
            let v = nums(body)?;
            if v.is_empty() || v.len() % 2 != 0 {
                return Err(Error::InvalidSpec("box needs lo,hi pairs".into()));
            }
            Self::from_config(&RegionConfig::Box(v.chunks(2).map(|c| [c[0], c[1]]).collect()))
        } else if let Some(body) = s.trim().strip_prefix("ball:") {
            let mut v = nums(body)?;
            let r = v.pop().ok_or_else(|| Error::InvalidSpec("ball needs a radius".into()))?;
            Self::from_config(&RegionConfig::Ball { center: v, radius: r })
        } else {
            Err(Error::InvalidSpec(format!("unrecognized region `{s}` (expected box: or ball:)")))
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            Region::Box(b) => Some(b.len()),
            Region::Ball { center, .. } => Some(center.len()),
            Region::Unbounded => None,
        }
    }

    pub fn contains(&self, x: &[T]) -> bool {
        match self {
            Region::Box(b) => b.iter().zip(x).all(|(&(lo, hi), &v)| v >= lo && v <= hi),
            Region::Ball { center, radius } => {
                let d: T = center.iter().zip(x).map(|(&c, &v)| (v - c) * (v - c)).sum();
                d <= *radius * *radius
            }
            Region::Unbounded => x.iter().all(|v| v.is_finite()),
        }
    }

    pub fn to_config(&self) -> Option<RegionConfig> {
        match self {
            Region::Box(b) => Some(RegionConfig::Box(b.iter().map(|&(l, h)| [l.as_f64(), h.as_f64()]).collect())),
            Region::Ball { center, radius } => Some(RegionConfig::Ball {
                center: center.iter().map(|x| x.as_f64()).collect(),
                radius: radius.as_f64(),
            }),
            Region::Unbounded => None,
        }
    }

    /// Uniform sample inside the region (`None` for unbounded regions).
    pub fn sample_uniform<R: Rng>(&self, rng: &mut R) -> Option<Vec<T>> {
        match self {
            Region::Box(b) => Some(b.iter().map(|&(lo, hi)| lo + (hi - lo) * T::c(rng.gen::<f64>())).collect()),
            Region::Ball { center, radius } => {
                let n = center.len();
                loop {
                    let v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
                    if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
                        return Some(center.iter().zip(&v).map(|(&c, &u)| c + *radius * T::c(u)).collect());
                    }
                }
            }
            Region::Unbounded => None,
        }
    }

    /// Sample on the boundary together with the outward unit normal.
    pub fn sample_boundary<R: Rng>(&self, rng: &mut R) -> Option<(Vec<T>, Vec<T>)> {
        match self {
            Region::Box(b) => {
                let n = b.len();
                let axis = rng.gen_range(0..n);
                let upper = rng.gen::<bool>();
                let mut x: Vec<T> = b.iter().map(|&(lo, hi)| lo + (hi - lo) * T::c(rng.gen::<f64>())).collect();
                x[axis] = if upper { b[axis].1 } else { b[axis].0 };
                let mut normal = vec![T::zero(); n];
                normal[axis] = if upper { T::one() } else { -T::one() };
                Some((x, normal))
            }
            Region::Ball { center, radius } => {
                let n = center.len();
                loop {
                    let v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
                    let r2: f64 = v.iter().map(|x| x * x).sum();
                    if r2 > 1e-6 && r2 <= 1.0 {
                        let r = r2.sqrt();
                        let normal: Vec<T> = v.iter().map(|&u| T::c(u / r)).collect();
                        let x = center.iter().zip(&normal).map(|(&c, &u)| c + *radius * u).collect();
                        return Some((x, normal));
                    }
                }
            }
            Region::Unbounded => None,
        }
    }
}
