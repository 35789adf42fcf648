//! Calderón–Zygmund sets on the (n+1)-dimensional affine group: products
//! Z = Q × [t−r, t+r) of a cube and a time slab whose side is exponentially
//! matched to (t, r). Admissibility has a small-r and a large-r branch, and
//! every admissible neighbor of comparable measure fits inside a fixed
//! enlarged box Z* of measure at most 4^{n+2}·e^{24n} times the original.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numeric::Scalar;

/// Z = [corner, corner+side)^n × [t−r, t+r).
#[derive(Debug, Clone, PartialEq)]
pub struct CzSet {
    pub corner: Vec<f64>,
    pub side: f64,
    pub center_t: f64,
    pub half_height: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CzBranch {
    /// r < 1: e²·e^t·r ≤ L < e⁸·e^t·r.
    SmallR,
    /// r ≥ 1: e^t·e^{2r} ≤ L < e^t·e^{8r}.
    LargeR,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CzAdmissibility {
    Admissible(CzBranch),
    Inadmissible,
}

impl CzSet {
    pub fn new(corner: Vec<f64>, side: f64, center_t: f64, half_height: f64) -> Result<Self> {
        if corner.is_empty() || corner.iter().any(|c| !c.is_finite()) {
            return Err(Error::MalformedInput("cz corner must be finite and nonempty".into()));
        }
        if !(side > 0.0) || !side.is_finite() {
            return Err(Error::MalformedInput("cz side must be positive".into()));
        }
        if !(half_height > 0.0) || !half_height.is_finite() || !center_t.is_finite() {
            return Err(Error::MalformedInput("cz time slab must be finite with r > 0".into()));
        }
        Ok(CzSet { corner, side, center_t, half_height })
    }

    /// Spatial dimension n (the ambient group lives in n+1 dimensions).
    pub fn dim(&self) -> usize {
        self.corner.len()
    }

    /// m^{n+1}(Z) = L^n·2r.
    pub fn measure(&self) -> f64 {
        self.side.powi(self.dim() as i32) * 2.0 * self.half_height
    }

    /// Which admissibility branch Z falls into, with boundary tolerance.
    pub fn admissibility(&self, tol: f64) -> CzAdmissibility {
        let (t, r, l) = (self.center_t, self.half_height, self.side);
        if r < 1.0 {
            let lo = (2.0 + t).exp() * r;
            let hi = (8.0 + t).exp() * r;
            if lo.le_within(&l, tol) && l.le_within(&hi, tol) && l < hi * (1.0 + tol) {
                return CzAdmissibility::Admissible(CzBranch::SmallR);
            }
        } else {
            let lo = (t + 2.0 * r).exp();
            let hi = (t + 8.0 * r).exp();
            if lo.le_within(&l, tol) && l.le_within(&hi, tol) && l < hi * (1.0 + tol) {
                return CzAdmissibility::Admissible(CzBranch::LargeR);
            }
        }
        CzAdmissibility::Inadmissible
    }

    /// Closed-interval intersection test in time, half-open boxes in space
    /// tested with closed logic (any enlargement only helps the bounds).
    pub fn intersects(&self, other: &CzSet) -> bool {
        debug_assert_eq!(self.dim(), other.dim());
        let (a_lo, a_hi) = (self.center_t - self.half_height, self.center_t + self.half_height);
        let (b_lo, b_hi) = (other.center_t - other.half_height, other.center_t + other.half_height);
        if a_hi < b_lo || b_hi < a_lo {
            return false;
        }
        self.corner.iter().zip(&other.corner).all(|(&a, &b)| {
            a <= b + other.side && b <= a + self.side
        })
    }
}

/// Per-case neighbor constants (λ₁..λ₄, η₁..η₄) and their maxima (λ, η).
pub fn cz_constants(n: usize) -> CzConstants {
    let nf = n as f64;
    let lambda1 = 2f64.powf(1.0 / (nf + 1.0)) * ((8.0 * nf) / (nf + 1.0)).exp();
    let lambda = [lambda1, 2.0 * (8.0 * nf).exp(), 1.0, 9.0];
    let eta = [8f64.exp() * lambda1, 2f64.powf(1.0 / nf), 8f64.exp(), 18f64.powf(1.0 / nf)];
    CzConstants {
        case_lambda: lambda,
        case_eta: eta,
        lambda: lambda.iter().cloned().fold(f64::MIN, f64::max),
        eta: eta.iter().cloned().fold(f64::MIN, f64::max),
        bound: 4f64.powi(n as i32 + 2) * (24.0 * nf).exp(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CzConstants {
    pub case_lambda: [f64; 4],
    pub case_eta: [f64; 4],
    /// max λᵢ = 2e^{8n}.
    pub lambda: f64,
    /// max ηᵢ = e⁸·2^{1/(n+1)}·e^{8n/(n+1)}.
    pub eta: f64,
    /// 4^{n+2}·e^{24n}.
    pub bound: f64,
}

/// The enlarged box Q*×[t−(1+2λ)r, t+(1+2λ)r] absorbing every admissible
/// neighbor of at most twice the measure.
#[derive(Debug, Clone, PartialEq)]
pub struct CzStar {
    pub corner: Vec<f64>,
    pub side: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub constants: CzConstants,
    pub measure: f64,
    /// 4^{n+2}e^{24n}·m(Z), the certified measure cap.
    pub measure_cap: f64,
}

impl CzStar {
    /// Box-in-box plus closed time-interval containment, with relative slack.
    pub fn contains(&self, z: &CzSet, tol: f64) -> bool {
        let space_ok = self.corner.iter().zip(&z.corner).all(|(&c_star, &c)| {
            c_star.le_within(&c, tol) && (c + z.side).le_within(&(c_star + self.side), tol)
        });
        let t_ok = self.t_lo.le_within(&(z.center_t - z.half_height), tol)
            && (z.center_t + z.half_height).le_within(&self.t_hi, tol);
        space_ok && t_ok
    }
}

/// Build Z* for an admissible Z.
pub fn cz_star(z: &CzSet, tol: f64) -> Result<CzStar> {
    if z.admissibility(tol) == CzAdmissibility::Inadmissible {
        return Err(Error::Hypothesis("cz set is not admissible".into()));
    }
    let n = z.dim();
    let constants = cz_constants(n);
    let side = (1.0 + 2.0 * constants.eta) * z.side;
    let center: Vec<f64> = z.corner.iter().map(|c| c + z.side / 2.0).collect();
    let corner: Vec<f64> = center.iter().map(|c| c - side / 2.0).collect();
    let spread = (1.0 + 2.0 * constants.lambda) * z.half_height;
    let measure = side.powi(n as i32) * 2.0 * spread;
    Ok(CzStar {
        corner,
        side,
        t_lo: z.center_t - spread,
        t_hi: z.center_t + spread,
        constants,
        measure,
        measure_cap: constants.bound * z.measure(),
    })
}

/// The four (r, r′) branch combinations of the neighbor analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CzCase {
    /// r < 1, r′ < 1.
    BothSmall,
    /// r < 1, r′ ≥ 1.
    SmallLarge,
    /// r ≥ 1, r′ < 1.
    LargeSmall,
    /// r ≥ 1, r′ ≥ 1.
    BothLarge,
}

impl CzCase {
    pub fn index(&self) -> usize {
        match self {
            CzCase::BothSmall => 0,
            CzCase::SmallLarge => 1,
            CzCase::LargeSmall => 2,
            CzCase::BothLarge => 3,
        }
    }

    fn wants_small_r(&self) -> bool {
        matches!(self, CzCase::BothSmall | CzCase::SmallLarge)
    }

    fn partner_small(&self) -> bool {
        matches!(self, CzCase::BothSmall | CzCase::LargeSmall)
    }
}

const SAMPLE_BUDGET: usize = 20_000;

/// Rejection-sample an admissible partner Z′ in the requested branch
/// combination with Z∩Z′ ≠ ∅ and m(Z′) ≤ 2·m(Z).
pub fn cz_sample_partner(
    z: &CzSet,
    case: CzCase,
    rng: &mut ChaCha8Rng,
    tol: f64,
) -> Result<CzSet> {
    let CzAdmissibility::Admissible(branch) = z.admissibility(tol) else {
        return Err(Error::Hypothesis("cz set is not admissible".into()));
    };
    let z_small = branch == CzBranch::SmallR;
    if z_small != case.wants_small_r() {
        return Err(Error::MalformedInput(format!(
            "case {case:?} needs a {} base set",
            if case.wants_small_r() { "small-r" } else { "large-r" }
        )));
    }
    let n = z.dim();
    let cap = 2.0 * z.measure();
    let (t, r) = (z.center_t, z.half_height);
    for _ in 0..SAMPLE_BUDGET {
        let r2 = if case.partner_small() {
            rng.gen_range(0.05..0.95)
        } else {
            // keep the measure constraint satisfiable
            rng.gen_range(1.0..(1.0 + r).min(3.0))
        };
        let margin = 0.02 * r.min(r2);
        let t2 = rng.gen_range((t - r - r2 + margin)..(t + r + r2 - margin));
        let (adm_lo, adm_hi) = if r2 < 1.0 {
            ((2.0 + t2).exp() * r2, (8.0 + t2).exp() * r2)
        } else {
            ((t2 + 2.0 * r2).exp(), (t2 + 8.0 * r2).exp())
        };
        let l_hi = adm_hi.min((cap / (2.0 * r2)).powf(1.0 / n as f64)) * (1.0 - 1e-9);
        if adm_lo >= l_hi {
            continue;
        }
        let l2 = rng.gen_range(adm_lo..l_hi);
        let corner: Vec<f64> = z
            .corner
            .iter()
            .map(|&c| {
                let m = 0.01 * z.side.min(l2);
                rng.gen_range((c - l2 + m)..(c + z.side - m))
            })
            .collect();
        let candidate = CzSet::new(corner, l2, t2, r2)?;
        let branch_ok = match candidate.admissibility(tol) {
            CzAdmissibility::Admissible(CzBranch::SmallR) => case.partner_small(),
            CzAdmissibility::Admissible(CzBranch::LargeR) => !case.partner_small(),
            CzAdmissibility::Inadmissible => false,
        };
        if branch_ok && candidate.intersects(z) && candidate.measure() <= cap * (1.0 + 1e-12) {
            return Ok(candidate);
        }
    }
    Err(Error::Sampling(format!("no admissible partner found for case {case:?}")))
}
