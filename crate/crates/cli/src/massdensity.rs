//! Volume estimates for the region where some axis-aligned cube of a fixed
//! side captures more than a fraction of the total mass.
//!
//! A sample point x counts when some cube [c, c+s]³ containing x holds mass
//! exceeding α·M. The capturing corner c ranges over [x−s, x]³; the captured
//! mass is piecewise constant there, so it is maximized over the arrangement
//! corners induced by the particle positions.

use serde::{Deserialize, Serialize};

use hlml_core::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Particle {
    pub x: [f64; 3],
    #[serde(default = "default_mass")]
    pub m: f64,
}

fn default_mass() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MassDistribution {
    pub particles: Vec<Particle>,
    /// Fraction of the total mass a cube must exceed, in (0, 1).
    pub alpha: f64,
    /// Cube side in meters.
    #[serde(default = "default_side")]
    pub side: f64,
}

fn default_side() -> f64 {
    1.0
}

impl MassDistribution {
    pub fn from_json(text: &str) -> Result<Self> {
        let dist: MassDistribution =
            serde_json::from_str(text).map_err(|e| Error::Json(format!("particles: {e}")))?;
        dist.validate()?;
        Ok(dist)
    }

    pub fn validate(&self) -> Result<()> {
        if self.particles.is_empty() {
            return Err(Error::MalformedInput("particle list is empty".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::MalformedInput("alpha must lie strictly between 0 and 1".into()));
        }
        if !(self.side > 0.0) || !self.side.is_finite() {
            return Err(Error::MalformedInput("cube side must be positive".into()));
        }
        for p in &self.particles {
            if !(p.m > 0.0) || !p.m.is_finite() || p.x.iter().any(|c| !c.is_finite()) {
                return Err(Error::MalformedInput("particles need finite positions and positive masses".into()));
            }
        }
        Ok(())
    }

    pub fn total_mass(&self) -> f64 {
        self.particles.iter().map(|p| p.m).sum()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionEstimate {
    /// Grid-sampled volume of the region, in m³.
    pub volume: f64,
    /// α⁻¹·4096, the certified cap from the cube-family constant.
    pub bound: f64,
    pub samples: usize,
    pub hits: usize,
    pub resolution: f64,
    pub total_mass: f64,
}

/// Estimate vol{x : some side-s cube containing x captures mass > α·M}.
pub fn mass_density_region(dist: &MassDistribution, resolution: f64) -> Result<RegionEstimate> {
    dist.validate()?;
    if !(resolution > 0.0) || !resolution.is_finite() {
        return Err(Error::MalformedInput("resolution must be positive".into()));
    }
    let s = dist.side;
    let h = resolution;
    let total = dist.total_mass();
    let threshold = dist.alpha * total;

    // Sampling window: the particle bounding box inflated by the cube side.
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in &dist.particles {
        for d in 0..3 {
            lo[d] = lo[d].min(p.x[d]);
            hi[d] = hi[d].max(p.x[d]);
        }
    }
    let k_lo: Vec<i64> = (0..3).map(|d| ((lo[d] - s) / h).floor() as i64).collect();
    let k_hi: Vec<i64> = (0..3).map(|d| ((hi[d] + s) / h).ceil() as i64).collect();
    let counts: Vec<i64> = (0..3).map(|d| k_hi[d] - k_lo[d]).collect();
    let samples = (counts[0] * counts[1] * counts[2]) as usize;
    if samples > (1 << 26) {
        return Err(Error::Range(format!(
            "{samples} sample points; raise the resolution step"
        )));
    }

    let mut hits = 0usize;
    let mut cand = [[0f64; 32]; 3];
    let mut x = [0f64; 3];
    for i in 0..counts[0] {
        x[0] = (k_lo[0] + i) as f64 * h + h / 2.0;
        for j in 0..counts[1] {
            x[1] = (k_lo[1] + j) as f64 * h + h / 2.0;
            for k in 0..counts[2] {
                x[2] = (k_lo[2] + k) as f64 * h + h / 2.0;
                // quick reject: a capture needs a particle in the same cube
                if !dist
                    .particles
                    .iter()
                    .any(|p| (0..3).all(|d| (p.x[d] - x[d]).abs() <= s))
                {
                    continue;
                }
                if best_capture(dist, &x, s, &mut cand) > threshold {
                    hits += 1;
                }
            }
        }
    }
    Ok(RegionEstimate {
        volume: hits as f64 * h * h * h,
        bound: 4096.0 / dist.alpha,
        samples,
        hits,
        resolution: h,
        total_mass: total,
    })
}

/// Max over corners c ∈ [x−s, x]³ of the mass inside the closed cube [c, c+s]³.
fn best_capture(dist: &MassDistribution, x: &[f64; 3], s: f64, cand: &mut [[f64; 32]; 3]) -> f64 {
    let mut len = [0usize; 3];
    for d in 0..3 {
        let lo = x[d] - s;
        let hi = x[d];
        let buf = &mut cand[d];
        let mut n = 0;
        let push = |v: f64, buf: &mut [f64; 32], n: &mut usize| {
            let v = v.clamp(lo, hi);
            if !buf[..*n].iter().any(|&u| u == v) && *n < buf.len() {
                buf[*n] = v;
                *n += 1;
            }
        };
        push(lo, buf, &mut n);
        for p in &dist.particles {
            push(p.x[d] - s, buf, &mut n);
            push(p.x[d], buf, &mut n);
        }
        len[d] = n;
    }
    let mut best = 0.0f64;
    for i in 0..len[0] {
        for j in 0..len[1] {
            for k in 0..len[2] {
                let c = [cand[0][i], cand[1][j], cand[2][k]];
                let mass: f64 = dist
                    .particles
                    .iter()
                    .filter(|p| (0..3).all(|d| c[d] <= p.x[d] && p.x[d] <= c[d] + s))
                    .map(|p| p.m)
                    .sum();
                best = best.max(mass);
            }
        }
    }
    best
}

/// Same estimate with unit masses: α·N particles must fit in a cube.
pub fn particle_count_region(
    positions: &[[f64; 3]],
    alpha: f64,
    side: f64,
    resolution: f64,
) -> Result<RegionEstimate> {
    let dist = MassDistribution {
        particles: positions.iter().map(|&x| Particle { x, m: 1.0 }).collect(),
        alpha,
        side,
    };
    mass_density_region(&dist, resolution)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(mass: f64) -> MassDistribution {
        MassDistribution {
            particles: vec![Particle { x: [0.0, 0.0, 0.0], m: mass }],
            alpha: 0.5,
            side: 1.0,
        }
    }

    #[test]
    fn single_particle_region_is_a_cube_of_volume_eight() {
        // every x with |x - x₁|_∞ ≤ 1 counts: volume 8 exactly
        let est = mass_density_region(&single(3.5), 0.1).unwrap();
        assert!((est.volume - 8.0).abs() / 8.0 < 0.05, "volume {}", est.volume);
        assert!(est.volume <= est.bound);
    }

    #[test]
    fn alpha_near_one_keeps_the_same_region() {
        let mut d = single(1.0);
        d.alpha = 0.999;
        let est = mass_density_region(&d, 0.1).unwrap();
        assert!((est.volume - 8.0).abs() / 8.0 < 0.05);
    }

    #[test]
    fn far_apart_half_masses_capture_nothing() {
        let d = MassDistribution {
            particles: vec![
                Particle { x: [0.0, 0.0, 0.0], m: 0.5 },
                Particle { x: [3.0, 0.0, 0.0], m: 0.5 },
            ],
            alpha: 0.6,
            side: 1.0,
        };
        let est = mass_density_region(&d, 0.1).unwrap();
        assert_eq!(est.volume, 0.0);
    }

    #[test]
    fn colinear_triple_matches_the_interval_oracle() {
        // three unit-mass particles on the x-axis at spacing 0.4; α = 0.6
        // needs ≥ 2 captured. Oracle: union over qualifying subsets S of
        // [max_S − s, min_S + s] on the axis, times [−s, s]² transversally.
        let positions = [[0.0, 0.0, 0.0], [0.4, 0.0, 0.0], [0.8, 0.0, 0.0]];
        let est = particle_count_region(&positions, 0.6, 1.0, 0.05).unwrap();
        // subsets {1,2}: [-0.6, 1]; {2,3}: [-0.2, 1.4]; {1,3}, {1,2,3} ⊂ those
        // union [-0.6, 1.4] length 2.0; volume 2·2·2 = 8.
        let expect = 8.0;
        assert!(
            (est.volume - expect).abs() / expect < 0.05,
            "volume {} vs oracle {expect}",
            est.volume
        );
    }

    #[test]
    fn input_validation() {
        let mut d = single(1.0);
        d.alpha = 1.0;
        assert!(mass_density_region(&d, 0.1).is_err());
        d.alpha = 0.5;
        assert!(mass_density_region(&d, 0.0).is_err());
        let empty = MassDistribution { particles: vec![], alpha: 0.5, side: 1.0 };
        assert!(mass_density_region(&empty, 0.1).is_err());
    }

    #[test]
    fn halving_resolution_is_stable() {
        let a = mass_density_region(&single(1.0), 0.1).unwrap();
        let b = mass_density_region(&single(1.0), 0.05).unwrap();
        assert!((a.volume - b.volume).abs() / b.volume < 0.05);
    }
}
