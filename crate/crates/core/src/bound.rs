//! Closed-form low-SNR machinery: the joint sign-pattern law at double-rate
//! sampling, posteriors, the mutual-information expansion, the rate-per-unit-
//! cost functional with its scalar optimization, and baseline capacities.

use crate::error::{Error, Result};
use crate::gaussmath::{orthant3, q_function, Corr3};
use crate::waveform::{boundary_point, ChannelParams, Features};
use serde::Serialize;

/// Noise correlation between samples a half slot apart after ideal lowpass
/// filtering: sinc(1/2) = 2/pi. Samples a full slot apart are uncorrelated.
pub const RHO: f64 = 2.0 / std::f64::consts::PI;

/// Correlation structure of the three filtered-noise samples at consecutive
/// quarter-slot times: [[1, rho, 0], [rho, 1, rho], [0, rho, 1]].
pub fn double_rate_corr3() -> Corr3 {
    Corr3::new(RHO, 0.0, RHO).expect("fixed double-rate correlation matrix is valid")
}

/// One of the 8 sign patterns of the output triple (Y at the three
/// consecutive quarter-slot times). Bit 2 is the first sample, bit 0 the
/// last; a set bit means +1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Pattern(u8);

impl Pattern {
    pub fn from_index(idx: u8) -> Pattern {
        assert!(idx < 8, "pattern index out of range");
        Pattern(idx)
    }

    pub fn from_signs(s: [i8; 3]) -> Pattern {
        let mut idx = 0u8;
        for (k, &sk) in s.iter().enumerate() {
            if sk > 0 {
                idx |= 1 << (2 - k);
            }
        }
        Pattern(idx)
    }

    #[inline]
    pub fn index(&self) -> usize {
        self.0 as usize
    }

    pub fn signs(&self) -> [i8; 3] {
        [
            if self.0 & 4 != 0 { 1 } else { -1 },
            if self.0 & 2 != 0 { 1 } else { -1 },
            if self.0 & 1 != 0 { 1 } else { -1 },
        ]
    }

    /// The reflected pattern -s.
    pub fn negated(&self) -> Pattern {
        Pattern(self.0 ^ 0b111)
    }

    pub fn all() -> impl Iterator<Item = Pattern> {
        (0..8).map(Pattern)
    }
}

impl std::fmt::Display for Pattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for s in self.signs() {
            write!(f, "{}", if s > 0 { '+' } else { '-' })?;
        }
        Ok(())
    }
}

/// Probability mass over the 8 sign patterns, conditional on the symbol of
/// interest being +sqrt(P), together with the unconditional law. The law
/// conditional on -sqrt(P) follows by reflection.
#[derive(Debug, Clone, Serialize)]
pub struct TripleLaw {
    cond_plus: [f64; 8],
    unconditional: [f64; 8],
}

impl TripleLaw {
    pub fn from_cond_plus(cond_plus: [f64; 8]) -> TripleLaw {
        let mut unconditional = [0.0; 8];
        for (i, u) in unconditional.iter_mut().enumerate() {
            *u = 0.5 * (cond_plus[i] + cond_plus[7 - i]);
        }
        TripleLaw {
            cond_plus,
            unconditional,
        }
    }

    #[inline]
    pub fn cond_plus(&self, p: Pattern) -> f64 {
        self.cond_plus[p.index()]
    }

    /// Reflection symmetry: mass at s given -sqrt(P) equals mass at -s given
    /// +sqrt(P).
    #[inline]
    pub fn cond_minus(&self, p: Pattern) -> f64 {
        self.cond_plus[p.negated().index()]
    }

    #[inline]
    pub fn unconditional(&self, p: Pattern) -> f64 {
        self.unconditional[p.index()]
    }

    pub fn cond_plus_masses(&self) -> &[f64; 8] {
        &self.cond_plus
    }

    /// Mutual information (nats) between the equiprobable binary input and
    /// the sign triple, computed exactly from this law.
    pub fn mutual_information(&self) -> f64 {
        let mut mi = 0.0;
        for p in Pattern::all() {
            for cond in [self.cond_plus(p), self.cond_minus(p)] {
                let joint = 0.5 * cond;
                let marg = self.unconditional(p);
                if joint > 0.0 && marg > 0.0 {
                    mi += joint * (cond / marg).ln();
                }
            }
        }
        mi
    }

    /// Marginal law of the middle (slot-rate) sample: (P(+1 | +sqrt(P)),
    /// P(-1 | +sqrt(P))).
    pub fn nyquist_marginal_plus(&self) -> [f64; 2] {
        let mut plus = 0.0;
        for p in Pattern::all() {
            if p.signs()[1] > 0 {
                plus += self.cond_plus(p);
            }
        }
        [plus, 1.0 - plus]
    }

    /// Mutual information between the input and the middle sample alone.
    pub fn mutual_information_nyquist(&self) -> f64 {
        binary_channel_mi(self.nyquist_marginal_plus())
    }
}

/// Mutual information of a binary-input channel with conditional law
/// `plus = [P(+|+), P(-|+)]` and the reflected law for the other input.
pub fn binary_channel_mi(plus: [f64; 2]) -> f64 {
    let minus = [plus[1], plus[0]];
    let mut mi = 0.0;
    for y in 0..2 {
        let marg = 0.5 * (plus[y] + minus[y]);
        for cond in [plus[y], minus[y]] {
            let joint = 0.5 * cond;
            if joint > 0.0 && marg > 0.0 {
                mi += joint * (cond / marg).ln();
            }
        }
    }
    mi
}

fn arcsin1() -> f64 {
    (RHO / (1.0 - RHO * RHO).sqrt()).asin()
}

fn arcsin2() -> f64 {
    (RHO * RHO / (1.0 - RHO * RHO)).asin()
}

/// Zero-power mass of a pattern: the orthant probability of the sign-flipped
/// double-rate correlation matrix.
pub fn pattern_base_mass(p: Pattern) -> f64 {
    orthant3(double_rate_corr3().flipped(p.signs()))
}

/// Coefficient of sqrt(P / 2 pi) in the first-order conditional mass of a
/// pattern. Antisymmetric under reflection, so the eight linear terms cancel
/// pairwise and the law stays normalized.
pub fn pattern_linear_coeff(p: Pattern, f: &Features) -> f64 {
    let s = p.signs();
    let (s1, s2, s3) = (s[0] as f64, s[1] as f64, s[2] as f64);
    let odd = s1 * s2 * s3;
    (s1 * f.alpha0 + s2 * f.beta0 + s3 * f.gamma0) / 4.0
        + odd * ((f.alpha0 + f.gamma0) * arcsin1() - f.beta0 * arcsin2())
            / (2.0 * std::f64::consts::PI)
}

const MASS_SLACK: f64 = 1e-9;

/// First-order conditional law of the sign triple given the input +sqrt(P).
/// Raises an error (rather than clamping silently) when a first-order mass
/// leaves [0, 1] by more than 1e-9, which signals that P is outside the
/// expansion's validity.
pub fn cond_triple_law_first_order(p_watts: f64, f: &Features) -> Result<TripleLaw> {
    if !(p_watts >= 0.0) || !p_watts.is_finite() {
        return Err(Error::domain("power must be finite and nonnegative"));
    }
    let amp = (p_watts / (2.0 * std::f64::consts::PI)).sqrt();
    let mut cond = [0.0; 8];
    for pat in Pattern::all() {
        let mass = pattern_base_mass(pat) + amp * pattern_linear_coeff(pat, f);
        if !(-MASS_SLACK..=1.0 + MASS_SLACK).contains(&mass) {
            return Err(Error::domain(format!(
                "first-order mass {mass:.6} for pattern {pat} leaves [0,1]: P too large for the expansion"
            )));
        }
        cond[pat.index()] = mass.clamp(0.0, 1.0);
    }
    Ok(TripleLaw::from_cond_plus(cond))
}

/// First-order posterior P(X = +sqrt(P) | pattern).
pub fn posterior_first_order(p_watts: f64, f: &Features, pattern: Pattern) -> Result<f64> {
    if !(p_watts >= 0.0) || !p_watts.is_finite() {
        return Err(Error::domain("power must be finite and nonnegative"));
    }
    let amp = (p_watts / (2.0 * std::f64::consts::PI)).sqrt();
    let post = 0.5
        + amp * pattern_linear_coeff(pattern, f) / (2.0 * pattern_base_mass(pattern));
    if !(-MASS_SLACK..=1.0 + MASS_SLACK).contains(&post) {
        return Err(Error::domain(format!(
            "first-order posterior {post:.6} leaves [0,1]: P too large for the expansion"
        )));
    }
    Ok(post.clamp(0.0, 1.0))
}

/// The four quadratic terms of the information-rate bracket:
/// [n1^2/(1/4 + asin(rho)/pi), 4 n2^2, n3^2/(1/4 - asin(rho)/pi), 4 n4^2]
/// where n1..n4 are the linear coefficients of the patterns
/// (+++), (++-), (+-+), (-++).
pub fn bracket_terms(f: &Features) -> [f64; 4] {
    let den_p = 0.25 + RHO.asin() / std::f64::consts::PI;
    let den_m = 0.25 - RHO.asin() / std::f64::consts::PI;
    let n1 = pattern_linear_coeff(Pattern::from_signs([1, 1, 1]), f);
    let n2 = pattern_linear_coeff(Pattern::from_signs([1, 1, -1]), f);
    let n3 = pattern_linear_coeff(Pattern::from_signs([1, -1, 1]), f);
    let n4 = pattern_linear_coeff(Pattern::from_signs([-1, 1, 1]), f);
    [
        n1 * n1 / den_p,
        4.0 * n2 * n2,
        n3 * n3 / den_m,
        4.0 * n4 * n4,
    ]
}

/// Merged three-term form of the bracket for symmetric features
/// (alpha0 = gamma0), as used at the boundary parameterization: the two
/// antisymmetric squares coincide and combine into a single 8 (.)^2 term.
pub fn bracket_symmetric(alpha0: f64, beta0: f64) -> f64 {
    let den_p = 0.25 + RHO.asin() / std::f64::consts::PI;
    let den_m = 0.25 - RHO.asin() / std::f64::consts::PI;
    let pi = std::f64::consts::PI;
    let t1 = alpha0 / 2.0 + beta0 / 4.0 + alpha0 / pi * arcsin1()
        - beta0 / (2.0 * pi) * arcsin2();
    let t2 = beta0 / 4.0 - alpha0 / pi * arcsin1() + beta0 / (2.0 * pi) * arcsin2();
    let t3 = alpha0 / 2.0 - beta0 / 4.0 - alpha0 / pi * arcsin1()
        + beta0 / (2.0 * pi) * arcsin2();
    t1 * t1 / den_p + 8.0 * t2 * t2 + t3 * t3 / den_m
}

/// First-order mutual information per symbol between the binary input and
/// the output triple: (P/pi) times the four-term bracket. Exactly linear in P
/// by construction (the o(P) remainder is dropped).
pub fn mi_first_order(p_watts: f64, f: &Features) -> f64 {
    let bracket: f64 = bracket_terms(f).iter().sum();
    p_watts / std::f64::consts::PI * bracket
}

/// Rate slope in nats per second per watt, with its dimensionless
/// normalization by N0.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RateSlope {
    pub value: f64,
    pub normalized: f64,
}

impl RateSlope {
    pub fn from_value(value: f64, n0: f64) -> RateSlope {
        RateSlope {
            value,
            normalized: value * n0,
        }
    }
}

/// The achievable rate-per-unit-cost functional: (2W/pi) times the bracket.
/// Defined for any finite feature triple; the data-processing upper bound
/// 1/N0 applies only to features arising from admissible unit-energy pulses.
pub fn rate_per_unit_cost(f: &Features, ch: &ChannelParams) -> RateSlope {
    let bracket: f64 = bracket_terms(f).iter().sum();
    RateSlope::from_value(2.0 * ch.w / std::f64::consts::PI * bracket, ch.n0)
}

/// Normalized rate slope along the boundary parameterization; W and N0 cancel.
pub fn rdot_of_lambda(lambda: f64) -> f64 {
    let ch = ChannelParams::new(1.0, 1.0, 1.0).expect("unit channel");
    let (alpha0, beta0) = boundary_point(lambda, &ch);
    let f = Features::symmetric(alpha0, beta0).expect("boundary features are finite");
    rate_per_unit_cost(&f, &ch).normalized
}

/// Result of the scalar maximization of `rdot_of_lambda`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OptimizeOutcome {
    pub lambda_star: f64,
    pub value: f64,
    pub iterations: usize,
    /// Set when the maximum sits at a bracket endpoint (no interior rise).
    pub at_boundary: bool,
}

/// Golden-section maximization of the normalized boundary rate slope over
/// `bracket`, seeded by a coarse grid scan so a dip inside the bracket cannot
/// trap the section search on the wrong side.
pub fn optimize_lambda(bracket: (f64, f64), tol: f64) -> Result<OptimizeOutcome> {
    let (lo, hi) = bracket;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::domain("optimization bracket must satisfy lo < hi"));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }

    const GRID: usize = 64;
    let mut iterations = 0usize;
    let mut best_i = 0;
    let mut best_v = f64::NEG_INFINITY;
    let mut grid_vals = [0.0f64; GRID + 1];
    for (i, v) in grid_vals.iter_mut().enumerate() {
        let x = lo + (hi - lo) * i as f64 / GRID as f64;
        *v = rdot_of_lambda(x);
        iterations += 1;
        if *v > best_v {
            best_v = *v;
            best_i = i;
        }
    }
    if best_i == 0 || best_i == GRID {
        let x = lo + (hi - lo) * best_i as f64 / GRID as f64;
        return Ok(OptimizeOutcome {
            lambda_star: x,
            value: best_v,
            iterations,
            at_boundary: true,
        });
    }

    let mut a = lo + (hi - lo) * (best_i - 1) as f64 / GRID as f64;
    let mut b = lo + (hi - lo) * (best_i + 1) as f64 / GRID as f64;
    let inv_phi = 0.618_033_988_749_894_8;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = rdot_of_lambda(c);
    let mut fd = rdot_of_lambda(d);
    iterations += 2;
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = rdot_of_lambda(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = rdot_of_lambda(d);
        }
        iterations += 1;
    }
    let lambda_star = 0.5 * (a + b);
    Ok(OptimizeOutcome {
        lambda_star,
        value: rdot_of_lambda(lambda_star),
        iterations,
        at_boundary: false,
    })
}

/// Unquantized bandlimited AWGN capacity in nats per second:
/// W log(1 + P / (W N0)).
pub fn shannon_capacity(ch: &ChannelParams) -> f64 {
    ch.w * (1.0 + ch.p / (ch.w * ch.n0)).ln()
}

/// Binary entropy in nats, with 0 log 0 = 0.
pub fn binary_entropy(p: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p));
    let mut h = 0.0;
    if p > 0.0 {
        h -= p * p.ln();
    }
    if p < 1.0 {
        h -= (1.0 - p) * (1.0 - p).ln();
    }
    h
}

/// Discrete-time hard-limited AWGN capacity in nats per channel use:
/// log 2 - Hb(Q(sqrt(P / sigma^2))).
pub fn hl_capacity(p_watts: f64, sigma2: f64) -> Result<f64> {
    if !(sigma2 > 0.0) {
        return Err(Error::domain("noise variance must be positive"));
    }
    if !(p_watts >= 0.0) {
        return Err(Error::domain("power must be nonnegative"));
    }
    let q = q_function((p_watts / sigma2).sqrt())?;
    Ok(std::f64::consts::LN_2 - binary_entropy(q))
}

/// Capacity per unit-cost at slot-rate sampling: 2/(pi N0), a factor 2/pi
/// below the unquantized slope 1/N0.
pub fn nyquist_slope(ch: &ChannelParams) -> RateSlope {
    RateSlope::from_value(2.0 / (std::f64::consts::PI * ch.n0), ch.n0)
}
