//! Whitney decomposition inside a window: disjoint dyadic cubes whose side
//! is comparable to their distance from a closed set.
//!
//! A cube Q of side L qualifies when √n·L ≤ dist(Q, F) ≤ 4√n·L, checked
//! exactly on squares: n·L² ≤ dist²(Q, F) ≤ 16·n·L². Among qualifying cubes
//! contained in the window, the inclusion-maximal ones are returned (the
//! maximal-member selection of a laminar family, here by dyadic ancestor
//! arithmetic).

use std::collections::HashSet;

use num::bigint::BigInt;
use num::{BigRational, ToPrimitive};

use crate::error::{Error, Result};
use crate::numeric::{Rational, Scalar};

use super::closed_set::{ClosedSetSpec, RatBox};
use super::dyadic::DyadicCube;

/// Points of the window at squared distance in
/// (n·4^{scale_min+1}, n·4^{scale_max+2}] from F and at least 2^{scale_max}
/// from the window boundary are covered by exactly one output cube.
#[derive(Debug, Clone)]
pub struct WhitneyCover {
    pub cubes: Vec<DyadicCube>,
    pub scale_min: i32,
    pub scale_max: i32,
}

fn pow2(e: i32) -> Rational {
    if e >= 0 {
        Rational::from_integer(BigInt::from(1) << e as usize)
    } else {
        Rational::new(BigInt::from(1), BigInt::from(1) << (-e) as usize)
    }
}

fn rational_floor_i64(r: &Rational) -> Result<i64> {
    r.floor()
        .to_integer()
        .to_i64()
        .ok_or_else(|| Error::Range("window index out of i64 range".into()))
}

/// Decompose the part of the window away from `spec` into maximal admissible
/// dyadic cubes at scales in [scale_min, scale_max].
///
/// Errors with the required scale cap when the window reaches farther from
/// the set than the top scale can certify.
pub fn whitney_decompose(
    spec: &ClosedSetSpec,
    window: &RatBox,
    scale_min: i32,
    scale_max: i32,
) -> Result<WhitneyCover> {
    let n = spec.dim();
    if window.dim() != n {
        return Err(Error::MalformedInput("window dimension differs from the closed set".into()));
    }
    if scale_min > scale_max {
        return Err(Error::MalformedInput("scale_min must be ≤ scale_max".into()));
    }

    // Every window point must sit within the reach of the top scale:
    // sup_{x ∈ window} dist(x, F)² ≤ n·4^{scale_max+1}. The sup is bounded by
    // min over components of the worst window corner (point-to-box distance
    // is convex, so the corner maximum dominates the box).
    let corner_bound: Rational = spec
        .components()
        .iter()
        .map(|c| {
            window
                .corners()
                .into_iter()
                .map(|v| {
                    let p = RatBox { lo: v.clone(), hi: v };
                    super::closed_set::dist2_boxes(&p, c)
                })
                .max()
                .expect("window has corners")
        })
        .min()
        .expect("nonempty closed set");
    let n_rat = Rational::from_int(n as i64);
    let reach = n_rat.clone() * pow2(2 * (scale_max + 1));
    if corner_bound > reach {
        let mut need = scale_max;
        while n_rat.clone() * pow2(2 * (need + 1)) < corner_bound {
            need += 1;
        }
        return Err(Error::Range(format!(
            "window reaches farther from the set than scale {scale_max} certifies; need scale_max ≥ {need}"
        )));
    }

    // Gather admissible cubes contained in the window.
    let sixteen_n = Rational::from_int(16 * n as i64);
    let mut admissible: HashSet<(i32, Vec<i64>)> = HashSet::new();
    let mut cubes: Vec<DyadicCube> = Vec::new();
    for scale in scale_min..=scale_max {
        let side = pow2(scale);
        let l2 = side.clone() * side.clone();
        let lo_bound = n_rat.clone() * l2.clone();
        let hi_bound = sixteen_n.clone() * l2;
        let mut ranges = Vec::with_capacity(n);
        for d in 0..n {
            let mut m_min = rational_floor_i64(&(window.lo[d].clone() / side.clone()))?;
            if Rational::from_int(m_min) * side.clone() < window.lo[d] {
                m_min += 1;
            }
            let mut m_max = rational_floor_i64(&(window.hi[d].clone() / side.clone()))?;
            while Rational::from_int(m_max + 1) * side.clone() > window.hi[d] {
                m_max -= 1;
            }
            if m_min > m_max {
                ranges.clear();
                break;
            }
            ranges.push((m_min, m_max));
        }
        if ranges.len() != n {
            continue;
        }
        let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        'cells: loop {
            let cube = DyadicCube::new(scale, idx.clone());
            let d2 = spec.dist2_from_cube(&cube);
            if d2 >= lo_bound && d2 <= hi_bound {
                admissible.insert((scale, idx.clone()));
                cubes.push(cube);
            }
            for d in (0..n).rev() {
                idx[d] += 1;
                if idx[d] <= ranges[d].1 {
                    continue 'cells;
                }
                idx[d] = ranges[d].0;
            }
            break;
        }
    }

    // Keep the inclusion-maximal admissible cubes: a cube survives iff no
    // strict ancestor within the scale range is admissible.
    let mut chosen: Vec<DyadicCube> = cubes
        .into_iter()
        .filter(|c| {
            (c.scale + 1..=scale_max).all(|s| {
                let anc = c.ancestor(s);
                !admissible.contains(&(s, anc.index))
            })
        })
        .collect();
    chosen.sort_by(|a, b| (a.scale, &a.index).cmp(&(b.scale, &b.index)));
    Ok(WhitneyCover { cubes: chosen, scale_min, scale_max })
}

/// Exact admissibility check n·L² ≤ dist²(Q,F) ≤ 16·n·L² for one cube.
pub fn whitney_condition(spec: &ClosedSetSpec, cube: &DyadicCube) -> bool {
    let n = Rational::from_int(spec.dim() as i64);
    let l2 = cube.side() * cube.side();
    let d2 = spec.dist2_from_cube(cube);
    d2 >= n.clone() * l2.clone() && d2 <= Rational::from_int(16) * n * l2
}

/// Squared-distance band certified for coverage by [`whitney_decompose`].
pub fn certified_band(n: usize, scale_min: i32, scale_max: i32) -> (BigRational, BigRational) {
    let n_rat = Rational::from_int(n as i64);
    (n_rat.clone() * pow2(2 * (scale_min + 1)), n_rat * pow2(2 * (scale_max + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn rat(v: i64) -> Rational {
        Rational::from_int(v)
    }

    fn ratq(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn origin_in_1d_gives_two_sided_dyadic_bands() {
        let spec = ClosedSetSpec::new(vec![], vec![vec![rat(0)]]).unwrap();
        let window = RatBox::new(vec![rat(-8)], vec![rat(8)]).unwrap();
        let cover = whitney_decompose(&spec, &window, -6, 2).unwrap();
        let mut expect = Vec::new();
        for k in -6..=2 {
            expect.push(DyadicCube::new(k, vec![1]));
            expect.push(DyadicCube::new(k, vec![-2]));
        }
        expect.sort_by(|a, b| (a.scale, &a.index).cmp(&(b.scale, &b.index)));
        assert_eq!(cover.cubes, expect);
    }

    #[test]
    fn halfline_gives_left_bands() {
        // F = [0, 100] filling the right halfline at window scale; window [-8, 0].
        let spec = ClosedSetSpec::new(
            vec![RatBox::new(vec![rat(0)], vec![rat(100)]).unwrap()],
            vec![],
        )
        .unwrap();
        let window = RatBox::new(vec![rat(-8)], vec![rat(0)]).unwrap();
        let cover = whitney_decompose(&spec, &window, -6, 2).unwrap();
        // exactly the bands [-2^{k+1}, -2^k) per scale
        let expect: Vec<DyadicCube> = (-6..=2).map(|k| DyadicCube::new(k, vec![-2])).collect();
        assert_eq!(cover.cubes, expect);
    }

    #[test]
    fn window_inside_the_set_is_empty() {
        let spec = ClosedSetSpec::new(
            vec![RatBox::new(vec![rat(-2), rat(-2)], vec![rat(2), rat(2)]).unwrap()],
            vec![],
        )
        .unwrap();
        let window = RatBox::new(vec![rat(-1), rat(-1)], vec![rat(1), rat(1)]).unwrap();
        let cover = whitney_decompose(&spec, &window, -5, 0).unwrap();
        assert!(cover.cubes.is_empty());
    }

    #[test]
    fn insufficient_scale_cap_errors_with_requirement() {
        let spec = ClosedSetSpec::new(vec![], vec![vec![rat(0)]]).unwrap();
        let window = RatBox::new(vec![rat(-64)], vec![rat(64)]).unwrap();
        let err = whitney_decompose(&spec, &window, -2, 0).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("scale_max"), "{msg}");
        // scale 5 suffices: 4^{6} = 4096 ≥ 64² = 4096
        assert!(msg.contains("≥ 5"), "{msg}");
    }

    #[test]
    fn coverage_of_certified_band_points() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for trial in 0..10 {
            // random closed set in [0,1]²
            let mut boxes = Vec::new();
            for _ in 0..rng.gen_range(1..3) {
                let lx = ratq(rng.gen_range(0..12), 16);
                let ly = ratq(rng.gen_range(0..12), 16);
                let wx = ratq(rng.gen_range(1..4), 16);
                let wy = ratq(rng.gen_range(1..4), 16);
                boxes.push(RatBox::new(
                    vec![lx.clone(), ly.clone()],
                    vec![lx + wx, ly + wy],
                ).unwrap());
            }
            let spec = ClosedSetSpec::new(boxes, vec![]).unwrap();
            let window = RatBox::new(vec![rat(-2), rat(-2)], vec![rat(3), rat(3)]).unwrap();
            let (smin, smax) = (-6, 1);
            let cover = whitney_decompose(&spec, &window, smin, smax).unwrap();
            // pairwise disjoint
            for (i, a) in cover.cubes.iter().enumerate() {
                for b in &cover.cubes[i + 1..] {
                    assert_eq!(
                        super::super::dyadic::dyadic_relate(a, b).unwrap(),
                        super::super::dyadic::DyadicRelation::Disjoint
                    );
                }
            }
            // condition holds per cube
            for c in &cover.cubes {
                assert!(whitney_condition(&spec, c));
            }
            // sampled certified-band points are covered exactly once
            let (band_lo, band_hi) = certified_band(2, smin, smax);
            let margin = ratq(2i64.pow((smax.max(0)) as u32), 1);
            for _ in 0..400 {
                let x = vec![
                    ratq(rng.gen_range(-128..192), 64),
                    ratq(rng.gen_range(-128..192), 64),
                ];
                let inside_window = window.contains_point(&x)
                    && x.iter().zip(&window.lo).all(|(xi, lo)| xi.clone() - lo.clone() >= margin)
                    && x.iter().zip(&window.hi).all(|(xi, hi)| hi.clone() - xi.clone() >= margin);
                if !inside_window {
                    continue;
                }
                let d2 = spec.dist2_from_point(&x);
                if d2 <= band_lo || d2 > band_hi {
                    continue;
                }
                let hits = cover.cubes.iter().filter(|c| c.contains_point(&x)).count();
                assert_eq!(hits, 1, "trial {trial}: point {x:?} covered {hits} times");
            }
        }
    }
}
