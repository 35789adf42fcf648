//! Open balls under the Euclidean or max metric (max-metric balls are
//! axis-aligned cubes), with the radius-gauge greedy cover.

use crate::covering::greedy_pick_order;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Euclidean,
    Max,
}

impl Metric {
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            Metric::Max => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
        }
    }
}

/// Open ball; under `Metric::Max` this is the open cube of side 2·radius.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
    pub metric: Metric,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64, metric: Metric) -> Result<Self> {
        if center.is_empty() || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::MalformedInput("ball center must be finite and nonempty".into()));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::MalformedInput("ball radius must be positive and finite".into()));
        }
        Ok(Ball { center, radius, metric })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn contains_point(&self, p: &[f64]) -> bool {
        self.metric.distance(&self.center, p) < self.radius
    }

    pub fn intersects(&self, other: &Ball) -> bool {
        self.metric.distance(&self.center, &other.center) < self.radius + other.radius
    }

    /// self ⊆ other, exact for open norm balls: |c₁−c₂| + r₁ ≤ r₂.
    pub fn contained_in(&self, other: &Ball) -> bool {
        self.metric.distance(&self.center, &other.center) + self.radius <= other.radius
    }

    /// Same center, radius scaled by `factor ≥ 1`.
    pub fn dilate(&self, factor: f64) -> Result<Ball> {
        if !(factor >= 1.0) || !factor.is_finite() {
            return Err(Error::MalformedInput("dilation factor must be ≥ 1".into()));
        }
        Ok(Ball { center: self.center.clone(), radius: self.radius * factor, metric: self.metric })
    }
}

fn check_uniform(balls: &[Ball]) -> Result<()> {
    if let Some(first) = balls.first() {
        for b in balls {
            if b.dim() != first.dim() || b.metric != first.metric {
                return Err(Error::MalformedInput(
                    "ball family must share dimension and metric".into(),
                ));
            }
        }
    }
    Ok(())
}

/// Greedy radius-gauge selection: returns pairwise-disjoint indices such that
/// every input ball is contained in the 5-fold dilation of a chosen one.
pub fn vitali_5b(balls: &[Ball]) -> Result<Vec<usize>> {
    check_uniform(balls)?;
    let radii: Vec<f64> = balls.iter().map(|b| b.radius).collect();
    let (chosen, _, _) =
        greedy_pick_order(balls.len(), &radii, &2.0, |a, b| balls[a].intersects(&balls[b]));
    Ok(chosen)
}

#[derive(Debug, Clone)]
pub struct BallCoverVerdict {
    pub disjoint: bool,
    /// First input ball not algebraically contained in any chosen 5-dilation.
    pub uncovered: Option<usize>,
}

impl BallCoverVerdict {
    pub fn pass(&self) -> bool {
        self.disjoint && self.uncovered.is_none()
    }
}

/// Check a 5B cover: chosen balls pairwise disjoint and every input ball
/// inside some chosen ball's 5-dilation (algebraic test |c−c_D| + r ≤ 5r_D).
pub fn verify_5b(balls: &[Ball], chosen: &[usize]) -> Result<BallCoverVerdict> {
    check_uniform(balls)?;
    let mut disjoint = true;
    'outer: for (i, &a) in chosen.iter().enumerate() {
        for &b in &chosen[i + 1..] {
            if balls[a].intersects(&balls[b]) {
                disjoint = false;
                break 'outer;
            }
        }
    }
    let mut uncovered = None;
    for (i, ball) in balls.iter().enumerate() {
        let covered = chosen
            .iter()
            .any(|&d| ball.contained_in(&balls[d].dilate(5.0).expect("factor 5")));
        if !covered {
            uncovered = Some(i);
            break;
        }
    }
    Ok(BallCoverVerdict { disjoint, uncovered })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn ball(center: &[f64], r: f64) -> Ball {
        Ball::new(center.to_vec(), r, Metric::Euclidean).unwrap()
    }

    #[test]
    fn dilate_examples() {
        let b = ball(&[0.0], 1.0);
        assert_eq!(b.dilate(5.0).unwrap().radius, 5.0);
        assert_eq!(b.dilate(1.0).unwrap(), b);
        let b2 = ball(&[3.0], 0.5).dilate(2.0).unwrap();
        assert_eq!((b2.center[0], b2.radius), (3.0, 1.0));
        assert!(ball(&[0.0], 1.0).dilate(0.5).is_err());
    }

    #[test]
    fn overlapping_pair_picks_larger() {
        // radii 1.0 and 0.9, overlapping: the greedy takes the rad-1 ball and
        // the other sits inside its 5-dilation.
        let balls = vec![ball(&[0.0, 0.0], 1.0), ball(&[1.5, 0.0], 0.9)];
        let chosen = vitali_5b(&balls).unwrap();
        assert_eq!(chosen, vec![0]);
        assert!(verify_5b(&balls, &chosen).unwrap().pass());
    }

    #[test]
    fn disjoint_family_keeps_everything() {
        let balls = vec![
            ball(&[0.0], 1.0),
            ball(&[10.0], 0.5),
            ball(&[-10.0], 0.7),
        ];
        let chosen = vitali_5b(&balls).unwrap();
        assert_eq!(chosen.len(), 3);
        assert!(verify_5b(&balls, &chosen).unwrap().pass());
    }

    #[test]
    fn max_metric_cubes_work_too() {
        let c1 = Ball::new(vec![0.0, 0.0], 1.0, Metric::Max).unwrap();
        let c2 = Ball::new(vec![1.2, 0.3], 0.8, Metric::Max).unwrap();
        assert!(c1.intersects(&c2));
        let chosen = vitali_5b(&[c1.clone(), c2.clone()]).unwrap();
        assert!(verify_5b(&[c1, c2], &chosen).unwrap().pass());
    }

    #[test]
    fn random_families_are_covered() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let n = rng.gen_range(1..=50);
            let balls: Vec<Ball> = (0..n)
                .map(|_| {
                    ball(
                        &[rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)],
                        rng.gen_range(0.1..1.0),
                    )
                })
                .collect();
            let chosen = vitali_5b(&balls).unwrap();
            assert!(verify_5b(&balls, &chosen).unwrap().pass());
        }
    }
}
