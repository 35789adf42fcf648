//! Dyadic cubes 2^ℓ(m + [0,1)^n) with exact integer-arithmetic relations,
//! and the dyadic-window instance generator.

use num::BigInt;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::numeric::{Rational, Scalar};

/// The half-open cube 2^scale·(index + [0,1)^n).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DyadicCube {
    pub scale: i32,
    pub index: Vec<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DyadicRelation {
    Equal,
    /// The left cube strictly contains the right one.
    Contains,
    /// The left cube is strictly contained in the right one.
    Contained,
    Disjoint,
}

/// Arithmetic shift acting as floor division by 2^k for any k.
fn floor_shift(v: i64, k: u32) -> i64 {
    if k >= 63 {
        if v < 0 { -1 } else { 0 }
    } else {
        v >> k
    }
}

impl DyadicCube {
    pub fn new(scale: i32, index: Vec<i64>) -> Self {
        DyadicCube { scale, index }
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    /// Side length 2^scale as an exact rational.
    pub fn side(&self) -> Rational {
        pow2(self.scale)
    }

    /// Lower corner coordinate in dimension d.
    pub fn lower(&self, d: usize) -> Rational {
        Rational::from_int(self.index[d]) * pow2(self.scale)
    }

    pub fn parent(&self) -> DyadicCube {
        DyadicCube {
            scale: self.scale + 1,
            index: self.index.iter().map(|&m| floor_shift(m, 1)).collect(),
        }
    }

    /// The ancestor at the given (coarser) scale.
    pub fn ancestor(&self, scale: i32) -> DyadicCube {
        assert!(scale >= self.scale);
        let k = (scale - self.scale) as u32;
        DyadicCube { scale, index: self.index.iter().map(|&m| floor_shift(m, k)).collect() }
    }

    pub fn contains_point(&self, p: &[Rational]) -> bool {
        debug_assert_eq!(p.len(), self.dim());
        let side = self.side();
        p.iter().enumerate().all(|(d, x)| {
            let lo = self.lower(d);
            let hi = lo.clone() + side.clone();
            &lo <= x && x < &hi
        })
    }
}

fn pow2(e: i32) -> Rational {
    if e >= 0 {
        Rational::from_integer(BigInt::from(1) << e as usize)
    } else {
        Rational::new(BigInt::from(1), BigInt::from(1) << (-e) as usize)
    }
}

/// Classify the intersection of two dyadic cubes: equal, nested one way or
/// the other, or disjoint. Partial overlap cannot occur.
pub fn dyadic_relate(a: &DyadicCube, b: &DyadicCube) -> Result<DyadicRelation> {
    if a.dim() != b.dim() {
        return Err(Error::MalformedInput(format!(
            "dyadic cubes of dimension {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    use std::cmp::Ordering::*;
    Ok(match a.scale.cmp(&b.scale) {
        Equal => {
            if a.index == b.index {
                DyadicRelation::Equal
            } else {
                DyadicRelation::Disjoint
            }
        }
        Less => {
            // a is finer; contained in b iff b is its ancestor.
            if a.ancestor(b.scale).index == b.index {
                DyadicRelation::Contained
            } else {
                DyadicRelation::Disjoint
            }
        }
        Greater => {
            if b.ancestor(a.scale).index == a.index {
                DyadicRelation::Contains
            } else {
                DyadicRelation::Disjoint
            }
        }
    })
}

/// Exact instance over the window [0, 2^max_scale)^n: ground points are the
/// unit cells (weight 1), the family is every dyadic cube of scale
/// 0..=max_scale inside the window, pointing is "all cubes containing x".
pub fn dyadic_grid_instance(n: usize, max_scale: u32) -> Result<Instance<Rational>> {
    if n == 0 || n > 3 {
        return Err(Error::MalformedInput("dyadic window instance supports 1 ≤ n ≤ 3".into()));
    }
    if (n as u32) * max_scale > 24 {
        return Err(Error::Range("dyadic window too large".into()));
    }
    let extent = 1usize << max_scale;
    let n_cells = extent.pow(n as u32);
    let cell_label = |coords: &[usize]| {
        let parts: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
        format!("c{}", parts.join("_"))
    };
    let linear = |coords: &[usize]| -> u32 {
        coords.iter().fold(0usize, |acc, &c| acc * extent + c) as u32
    };

    let mut point_labels = Vec::with_capacity(n_cells);
    let mut coords = vec![0usize; n];
    loop {
        point_labels.push(cell_label(&coords));
        if !advance(&mut coords, extent) {
            break;
        }
    }
    let weights = vec![Rational::from_int(1); n_cells];

    let mut set_labels = Vec::new();
    let mut sets = Vec::new();
    for scale in 0..=max_scale {
        let blocks = 1usize << (max_scale - scale);
        let size = 1usize << scale;
        let mut idx = vec![0usize; n];
        loop {
            let parts: Vec<String> = idx.iter().map(|c| c.to_string()).collect();
            set_labels.push(format!("d{}_{}", scale, parts.join("_")));
            // every cell whose coordinates lie in [idx*size, (idx+1)*size)
            let mut members = Vec::with_capacity(size.pow(n as u32));
            let mut off = vec![0usize; n];
            loop {
                let cell: Vec<usize> =
                    idx.iter().zip(&off).map(|(&i, &o)| i * size + o).collect();
                members.push(linear(&cell));
                if !advance(&mut off, size) {
                    break;
                }
            }
            sets.push(members);
            if !advance(&mut idx, blocks) {
                break;
            }
        }
    }

    Instance::with_containing_pointing(point_labels, weights, set_labels, sets, 0.0)
}

fn advance(coords: &mut [usize], extent: usize) -> bool {
    for c in coords.iter_mut().rev() {
        *c += 1;
        if *c < extent {
            return true;
        }
        *c = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn cube(scale: i32, index: &[i64]) -> DyadicCube {
        DyadicCube::new(scale, index.to_vec())
    }

    #[test]
    fn relate_examples() {
        let unit = cube(0, &[0]);
        assert_eq!(dyadic_relate(&unit, &unit).unwrap(), DyadicRelation::Equal);
        // [0,1) vs [0,0.5)
        let half = cube(-1, &[0]);
        assert_eq!(dyadic_relate(&unit, &half).unwrap(), DyadicRelation::Contains);
        assert_eq!(dyadic_relate(&half, &unit).unwrap(), DyadicRelation::Contained);
        // [0,1) vs [1,2)
        assert_eq!(dyadic_relate(&unit, &cube(0, &[1])).unwrap(), DyadicRelation::Disjoint);
        // negative indices: [-1,0) is inside [-2,0)
        assert_eq!(
            dyadic_relate(&cube(0, &[-1]), &cube(1, &[-1])).unwrap(),
            DyadicRelation::Contained
        );
        assert!(dyadic_relate(&unit, &cube(0, &[0, 0])).is_err());
    }

    #[test]
    fn relation_matches_interval_oracle() {
        // Fuzz against exact rational interval arithmetic.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100_000 {
            let n = rng.gen_range(1..=2usize);
            let a = cube(rng.gen_range(-4..5), &(0..n).map(|_| rng.gen_range(-8..8i64)).collect::<Vec<_>>());
            let b = cube(rng.gen_range(-4..5), &(0..n).map(|_| rng.gen_range(-8..8i64)).collect::<Vec<_>>());
            let rel = dyadic_relate(&a, &b).unwrap();
            // oracle on half-open interval products
            let mut a_in_b = true;
            let mut b_in_a = true;
            let mut disjoint = false;
            for d in 0..n {
                let (alo, ahi) = (a.lower(d), a.lower(d) + a.side());
                let (blo, bhi) = (b.lower(d), b.lower(d) + b.side());
                if !(blo <= alo && ahi <= bhi) {
                    a_in_b = false;
                }
                if !(alo <= blo && bhi <= ahi) {
                    b_in_a = false;
                }
                if ahi <= blo || bhi <= alo {
                    disjoint = true;
                }
            }
            let expected = if a_in_b && b_in_a {
                DyadicRelation::Equal
            } else if disjoint {
                DyadicRelation::Disjoint
            } else if a_in_b {
                DyadicRelation::Contained
            } else if b_in_a {
                DyadicRelation::Contains
            } else {
                panic!("partial overlap of dyadic cubes {a:?} {b:?}");
            };
            assert_eq!(rel, expected, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn window_instance_counts() {
        let inst = dyadic_grid_instance(1, 3).unwrap();
        // 8 cells; 8+4+2+1 = 15 cubes
        assert_eq!(inst.n_points(), 8);
        assert_eq!(inst.n_sets(), 15);
        // every cell points to one cube per scale
        for p in 0..inst.n_points() as u32 {
            assert_eq!(inst.pointing_of(p).len(), 4);
        }
        let inst2 = dyadic_grid_instance(2, 2).unwrap();
        assert_eq!(inst2.n_points(), 16);
        assert_eq!(inst2.n_sets(), 16 + 4 + 1);
        // scale-1 cube measure is 2^n
        let si = inst2.set_id("d1_0_0").unwrap();
        assert_eq!(inst2.set_measure(si), &Rational::from_int(4));
    }
}
