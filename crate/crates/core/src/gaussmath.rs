//! Exact special functions, Gaussian orthant probabilities, and quadrature
//! oracles for shifted bivariate/trivariate CCDFs of standardized Gaussian
//! vectors. Everything here is the ground truth the first-order expansions
//! are tested against, so no expansion code is allowed in this module.

use crate::error::{Error, Result};
use crate::quad::{integrate_presplit, QuadratureSettings};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub const FRAC_1_SQRT_2PI: f64 = 0.3989422804014326779399460599343818684759;

/// Density of the standard normal distribution.
#[inline]
pub fn std_normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Upper-tail probability Q(x) = P(N(0,1) >= x), evaluated through the
/// complementary error function for uniform relative accuracy.
pub fn q_function(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("q_function requires a finite argument"));
    }
    Ok(0.5 * libm::erfc(x / std::f64::consts::SQRT_2))
}

/// Remainder of the first-order Taylor expansion of Q around zero:
/// Q(x) = 1/2 - x/sqrt(2 pi) + delta(x). Satisfies
/// |delta(x)| <= |x|^3 / (6 sqrt(2 pi)) for |x| <= 1.
pub fn q_remainder(x: f64) -> Result<f64> {
    Ok(q_function(x)? - 0.5 + x * FRAC_1_SQRT_2PI)
}

/// Correlation coefficient of a standardized bivariate Gaussian pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Corr2 {
    rho: f64,
}

impl Corr2 {
    pub fn new(rho: f64) -> Result<Self> {
        if !rho.is_finite() || rho.abs() >= 1.0 {
            return Err(Error::domain(format!(
                "bivariate correlation must satisfy |rho| < 1, got {rho}"
            )));
        }
        Ok(Self { rho })
    }

    #[inline]
    pub fn rho(&self) -> f64 {
        self.rho
    }
}

/// Correlation structure of a standardized trivariate Gaussian vector.
/// Construction rejects matrices that are not strictly positive definite
/// (det <= 1e-12) so the downstream conditioning steps stay well posed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Corr3 {
    rho12: f64,
    rho13: f64,
    rho23: f64,
}

impl Corr3 {
    pub const DET_FLOOR: f64 = 1e-12;

    pub fn new(rho12: f64, rho13: f64, rho23: f64) -> Result<Self> {
        for r in [rho12, rho13, rho23] {
            if !r.is_finite() || r.abs() >= 1.0 {
                return Err(Error::domain(format!(
                    "trivariate correlations must satisfy |rho| < 1, got {r}"
                )));
            }
        }
        let det = Self::det_of(rho12, rho13, rho23);
        if det <= Self::DET_FLOOR {
            return Err(Error::domain(format!(
                "correlation matrix is numerically degenerate (det = {det:.3e})"
            )));
        }
        Ok(Self {
            rho12,
            rho13,
            rho23,
        })
    }

    fn det_of(r12: f64, r13: f64, r23: f64) -> f64 {
        1.0 - r12 * r12 - r13 * r13 - r23 * r23 + 2.0 * r12 * r13 * r23
    }

    #[inline]
    pub fn rho12(&self) -> f64 {
        self.rho12
    }
    #[inline]
    pub fn rho13(&self) -> f64 {
        self.rho13
    }
    #[inline]
    pub fn rho23(&self) -> f64 {
        self.rho23
    }

    pub fn det(&self) -> f64 {
        Self::det_of(self.rho12, self.rho13, self.rho23)
    }

    /// Correlation structure of (s1 X, s2 Y, s3 Z). Sign flips preserve both
    /// the |rho| < 1 bounds and the determinant, so no revalidation is needed.
    pub fn flipped(&self, s: [i8; 3]) -> Corr3 {
        let (s1, s2, s3) = (s[0] as f64, s[1] as f64, s[2] as f64);
        Corr3 {
            rho12: s1 * s2 * self.rho12,
            rho13: s1 * s3 * self.rho13,
            rho23: s2 * s3 * self.rho23,
        }
    }

    /// Partial correlation of coordinates (2,3) given coordinate 1. For a
    /// strictly positive definite matrix the result is strictly inside
    /// (-1, 1): 1 - rho'^2 = det / ((1-rho12^2)(1-rho13^2)).
    pub fn partial_corr_23_given_1(&self) -> f64 {
        (self.rho23 - self.rho12 * self.rho13)
            / ((1.0 - self.rho12 * self.rho12) * (1.0 - self.rho13 * self.rho13)).sqrt()
    }
}

/// Orthant probability of a bivariate standardized Gaussian pair:
/// P(X >= 0, Y >= 0) = 1/4 + arcsin(rho) / (2 pi).
pub fn orthant2(c: Corr2) -> f64 {
    0.25 + c.rho().asin() / (2.0 * std::f64::consts::PI)
}

/// Orthant probability of a trivariate standardized Gaussian vector:
/// P(X >= 0, Y >= 0, Z >= 0) = 1/8 + (sum of pairwise arcsines) / (4 pi).
pub fn orthant3(c: Corr3) -> f64 {
    0.125
        + (c.rho12().asin() + c.rho13().asin() + c.rho23().asin()) / (4.0 * std::f64::consts::PI)
}

// The standard normal carries < 7.7e-24 mass beyond +-10, far below every
// tolerance in use; the clipped mass is added back analytically via Q.
const TRUNC: f64 = 10.0;

/// Shifted bivariate CCDF P(X >= -a, Y >= -b) for a standardized pair with
/// correlation rho, as a one-dimensional adaptive quadrature of
/// phi(x) * (1 - Q((b + rho x) / sqrt(1 - rho^2))) over x in [-a, oo).
pub fn ccdf2_exact(c: Corr2, a: f64, b: f64, q: &QuadratureSettings) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("ccdf2_exact offsets must be finite"));
    }
    let rho = c.rho();
    let s = (1.0 - rho * rho).sqrt();
    let cond_ccdf = move |x: f64| 0.5 * libm::erfc(-(b + rho * x) / (s * std::f64::consts::SQRT_2));

    let lo_raw = -a;
    let lo = lo_raw.max(-TRUNC);
    if lo >= TRUNC {
        // Threshold beyond the truncation point; the whole probability is a
        // tail term of order Q(10) or less.
        return Ok(q_function(lo_raw)? * cond_ccdf(lo_raw));
    }
    let r = integrate_presplit(|x| std_normal_pdf(x) * cond_ccdf(x), lo, TRUNC, q, 3.0)?;
    let mut value = r.value + q_function(TRUNC)? * cond_ccdf(TRUNC);
    if lo_raw < -TRUNC {
        value += (q_function(TRUNC)? - q_function(-lo_raw)?) * cond_ccdf(-TRUNC);
    }
    Ok(value)
}

/// Shifted trivariate CCDF P(X >= -a, Y >= -b, Z >= -g), computed by
/// conditioning on the first coordinate and integrating the bivariate CCDF of
/// the standardized conditional pair.
pub fn ccdf3_exact(c: Corr3, a: f64, b: f64, g: f64, q: &QuadratureSettings) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && g.is_finite()) {
        return Err(Error::domain("ccdf3_exact offsets must be finite"));
    }
    let s12 = (1.0 - c.rho12() * c.rho12()).sqrt();
    let s13 = (1.0 - c.rho13() * c.rho13()).sqrt();
    let pair = Corr2::new(c.partial_corr_23_given_1())?;
    let r12 = c.rho12();
    let r13 = c.rho13();

    // The inner integral at abscissa x is weighted by phi(x) in the outer
    // quadrature, so its tolerance may relax where the Gaussian weight is
    // small: the composed error stays below ~0.2 * abs_tol either way.
    let max_subdivisions = q.max_subdivisions;
    let (abs_tol, rel_tol) = (q.abs_tol, q.rel_tol);
    let cond_pair = move |x: f64| -> Result<f64> {
        let inner_q = QuadratureSettings {
            abs_tol: (0.01 * abs_tol / std_normal_pdf(x).max(1e-6)).min(1e-5),
            rel_tol: 0.1 * rel_tol,
            max_subdivisions,
        };
        ccdf2_exact(pair, (b + r12 * x) / s12, (g + r13 * x) / s13, &inner_q)
    };

    let lo_raw = -a;
    let lo = lo_raw.max(-TRUNC);
    if lo >= TRUNC {
        return Ok(q_function(lo_raw)? * cond_pair(lo_raw)?);
    }

    // The inner quadrature cannot fail for in-range arguments once the pair
    // correlation is valid; map any failure to a numeric error afterwards.
    let inner_failure = std::cell::Cell::new(None);
    let r = integrate_presplit(
        |x| match cond_pair(x) {
            Ok(v) => std_normal_pdf(x) * v,
            Err(_) => {
                inner_failure.set(Some(x));
                f64::NAN
            }
        },
        lo,
        TRUNC,
        q,
        3.0,
    );
    if let Some(x) = inner_failure.get() {
        return Err(Error::Numeric {
            what: format!("inner bivariate CCDF quadrature failed at x = {x}"),
            achieved: f64::NAN,
        });
    }
    let r = r?;
    let mut value = r.value + q_function(TRUNC)? * cond_pair(TRUNC)?;
    if lo_raw < -TRUNC {
        value += (q_function(TRUNC)? - q_function(-lo_raw)?) * cond_pair(-TRUNC)?;
    }
    Ok(value)
}

/// Draw `n` standardized triples from N(0, K) via the Cholesky factor of K.
/// Deterministic for a fixed seed; bitwise reproducible across runs.
pub fn sample_mvn3(c: Corr3, n: usize, seed: u64) -> Result<Vec<[f64; 3]>> {
    if n < 1 {
        return Err(Error::domain("sample_mvn3 requires n >= 1"));
    }
    let chol = TriangularFactor::new(c)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let u1: f64 = normal.sample(&mut rng);
        let u2: f64 = normal.sample(&mut rng);
        let u3: f64 = normal.sample(&mut rng);
        out.push(chol.apply(u1, u2, u3));
    }
    Ok(out)
}

/// Lower-triangular Cholesky factor of a 3x3 correlation matrix.
#[derive(Debug, Clone, Copy)]
pub struct TriangularFactor {
    l21: f64,
    l22: f64,
    l31: f64,
    l32: f64,
    l33: f64,
}

impl TriangularFactor {
    pub fn new(c: Corr3) -> Result<Self> {
        let l22sq = 1.0 - c.rho12() * c.rho12();
        if l22sq <= 0.0 {
            return Err(Error::domain("correlation matrix is not positive definite"));
        }
        let l22 = l22sq.sqrt();
        let l32 = (c.rho23() - c.rho12() * c.rho13()) / l22;
        let l33sq = 1.0 - c.rho13() * c.rho13() - l32 * l32;
        if l33sq <= 0.0 {
            return Err(Error::domain("correlation matrix is not positive definite"));
        }
        Ok(Self {
            l21: c.rho12(),
            l22,
            l31: c.rho13(),
            l32,
            l33: l33sq.sqrt(),
        })
    }

    /// Map iid standard normals to a correlated triple.
    #[inline]
    pub fn apply(&self, u1: f64, u2: f64, u3: f64) -> [f64; 3] {
        [
            u1,
            self.l21 * u1 + self.l22 * u2,
            self.l31 * u1 + self.l32 * u2 + self.l33 * u3,
        ]
    }
}
