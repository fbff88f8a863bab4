//! First-order expansions of shifted bivariate/trivariate Gaussian CCDFs
//! around the orthant probability, together with the explicit remainder
//! envelopes |Delta| <= A^2 eta. The envelopes are evaluated exactly as
//! derived, with no tightening, so the soundness sweeps validate the printed
//! algebra verbatim.

use crate::error::{Error, Result};
use crate::gaussmath::{orthant2, orthant3, Corr2, Corr3, FRAC_1_SQRT_2PI};

const SQRT_2PI: f64 = 2.5066282746310005024157652848110452530070;

/// Scaled thresholds of a shifted CCDF: the thresholds are (-alpha A, -beta A)
/// in the bivariate case, with gamma joining for the trivariate case.
#[derive(Debug, Clone, Copy)]
pub struct OffsetSpec {
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: Option<f64>,
}

impl OffsetSpec {
    pub fn bivariate(a: f64, alpha: f64, beta: f64) -> Result<Self> {
        Self::validate(a, alpha, beta, None)
    }

    pub fn trivariate(a: f64, alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        Self::validate(a, alpha, beta, Some(gamma))
    }

    fn validate(a: f64, alpha: f64, beta: f64, gamma: Option<f64>) -> Result<Self> {
        let mut all = vec![a, alpha, beta];
        all.extend(gamma);
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("offset fields must be finite"));
        }
        if a < 0.0 {
            return Err(Error::domain("offset scale A must be nonnegative"));
        }
        Ok(Self {
            a,
            alpha,
            beta,
            gamma,
        })
    }
}

/// Orthant term, first-order term, their sum, and the remainder envelope of a
/// shifted-CCDF expansion.
#[derive(Debug, Clone, Copy)]
pub struct ExpansionResult {
    /// Orthant probability (value at A = 0).
    pub base: f64,
    /// First-order term, already multiplied by A / sqrt(2 pi).
    pub linear: f64,
    /// base + linear.
    pub approx: f64,
    /// A^2 * eta: certified bound on |exact - approx|.
    pub envelope: f64,
}

/// Remainder envelope eta = eta1 + eta2 of the bivariate expansion.
/// Even in each offset and monotonically increasing in (A, |alpha|, |beta|).
pub fn eta2_envelope(c: Corr2, o: &OffsetSpec) -> Result<f64> {
    if o.gamma.is_some() {
        return Err(Error::domain("bivariate envelope takes no gamma offset"));
    }
    Ok(eta_biv(o.a, o.alpha, o.beta, c.rho()))
}

fn eta_biv(a: f64, alpha: f64, beta: f64, rho: f64) -> f64 {
    let (al, be, r) = (alpha.abs(), beta.abs(), rho.abs());
    let v = 1.0 - rho * rho;
    let sv = v.sqrt();
    let eta1 = al * be / (SQRT_2PI * sv)
        + r * al * al / (SQRT_2PI * sv)
        + al * (be + r * al).powi(3) * a * a / (6.0 * SQRT_2PI * v * sv)
        + al.powi(3) * a / (12.0 * SQRT_2PI);
    let eta2 = r * be * be / (SQRT_2PI * sv)
        + r.powi(3) * be.powi(4) * a * a / (6.0 * SQRT_2PI * v * sv)
        + be.powi(3) * a / (12.0 * SQRT_2PI);
    eta1 + eta2
}

/// First-order expansion of P(X >= -alpha A, Y >= -beta A) around the orthant
/// probability:
///   base + (alpha + beta)/2 * A/sqrt(2 pi),  |error| <= A^2 eta.
pub fn expand_ccdf2(c: Corr2, o: &OffsetSpec) -> Result<ExpansionResult> {
    if o.gamma.is_some() {
        return Err(Error::domain("bivariate expansion takes no gamma offset"));
    }
    let base = orthant2(c);
    if o.a == 0.0 {
        return Ok(ExpansionResult {
            base,
            linear: 0.0,
            approx: base,
            envelope: 0.0,
        });
    }
    let linear = 0.5 * (o.alpha + o.beta) * o.a * FRAC_1_SQRT_2PI;
    let envelope = o.a * o.a * eta_biv(o.a, o.alpha, o.beta, c.rho());
    Ok(ExpansionResult {
        base,
        linear,
        approx: base + linear,
        envelope,
    })
}

/// arcsin with the argument clamped to [-1, 1] when it has drifted past the
/// boundary by at most floating-point dust; anything further is an internal
/// consistency failure because valid correlation matrices keep partial
/// correlations strictly inside (-1, 1).
fn arcsin_clamped(x: f64) -> Result<f64> {
    if x.abs() <= 1.0 {
        Ok(x.asin())
    } else if x.abs() - 1.0 <= 1e-12 {
        Ok(x.signum() * std::f64::consts::FRAC_PI_2)
    } else {
        Err(Error::Numeric {
            what: format!("partial correlation argument {x} outside [-1, 1]"),
            achieved: x.abs() - 1.0,
        })
    }
}

struct PartialCorrs {
    // Conditional pair correlations: pc1 = corr(2,3 | 1), etc.
    pc1: f64,
    pc2: f64,
    pc3: f64,
}

fn partial_corrs(c: Corr3) -> PartialCorrs {
    let s12 = (1.0 - c.rho12() * c.rho12()).sqrt();
    let s13 = (1.0 - c.rho13() * c.rho13()).sqrt();
    let s23 = (1.0 - c.rho23() * c.rho23()).sqrt();
    PartialCorrs {
        pc1: (c.rho23() - c.rho12() * c.rho13()) / (s12 * s13),
        pc2: (c.rho13() - c.rho12() * c.rho23()) / (s12 * s23),
        pc3: (c.rho12() - c.rho13() * c.rho23()) / (s13 * s23),
    }
}

/// Remainder envelope eta = eta1 + eta2 + eta3 of the trivariate expansion,
/// including the nested bivariate envelopes evaluated at inflated arguments
/// and at the corresponding conditional pair correlations.
pub fn eta3_envelope(c: Corr3, o: &OffsetSpec) -> Result<f64> {
    let gamma = o
        .gamma
        .ok_or_else(|| Error::domain("trivariate envelope requires a gamma offset"))?;
    let (al, be, ga) = (o.alpha.abs(), o.beta.abs(), gamma.abs());
    let a = o.a;
    let (r12, r13, r23) = (c.rho12().abs(), c.rho13().abs(), c.rho23().abs());
    let s12 = (1.0 - c.rho12() * c.rho12()).sqrt();
    let s13 = (1.0 - c.rho13() * c.rho13()).sqrt();
    let s23 = (1.0 - c.rho23() * c.rho23()).sqrt();
    let pc = partial_corrs(c);

    let eta1 = al.powi(3) * a / (12.0 * SQRT_2PI)
        + al / (2.0 * SQRT_2PI) * ((be + r12 * al) / s12 + (ga + r13 * al) / s13)
        + al * eta_biv(a, (be + r12 * al) / s12, (ga + r13 * al) / s13, pc.pc1) * a;

    let eta2 = be.powi(3) * a / (12.0 * SQRT_2PI)
        + be / (2.0 * SQRT_2PI) * (r12 * be / s12 + (ga + r23 * be) / s23)
        + be * eta_biv(a, r12 * be / s12, (ga + r23 * be) / s23, pc.pc2) * a;

    let eta3 = ga.powi(3) * a / (12.0 * SQRT_2PI)
        + ga * ga / (2.0 * SQRT_2PI) * (r13 / s13 + r23 / s23)
        + ga * eta_biv(a, r13 * ga / s13, r23 * ga / s23, pc.pc3) * a;

    Ok(eta1 + eta2 + eta3)
}

/// First-order expansion of P(X >= -alpha A, Y >= -beta A, Z >= -gamma A).
/// The linear coefficients carry the arcsines of the conditional pair
/// correlations; |error| <= A^2 (eta1 + eta2 + eta3).
pub fn expand_ccdf3(c: Corr3, o: &OffsetSpec) -> Result<ExpansionResult> {
    let gamma = o
        .gamma
        .ok_or_else(|| Error::domain("trivariate expansion requires a gamma offset"))?;
    let base = orthant3(c);
    if o.a == 0.0 {
        return Ok(ExpansionResult {
            base,
            linear: 0.0,
            approx: base,
            envelope: 0.0,
        });
    }
    let pc = partial_corrs(c);
    let two_pi = 2.0 * std::f64::consts::PI;
    let bracket = (o.alpha + o.beta + gamma) / 4.0
        + o.alpha / two_pi * arcsin_clamped(pc.pc1)?
        + o.beta / two_pi * arcsin_clamped(pc.pc2)?
        + gamma / two_pi * arcsin_clamped(pc.pc3)?;
    let linear = o.a * FRAC_1_SQRT_2PI * bracket;
    let envelope = o.a * o.a * eta3_envelope(c, o)?;
    Ok(ExpansionResult {
        base,
        linear,
        approx: base + linear,
        envelope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussmath::{ccdf2_exact, ccdf3_exact};
    use crate::quad::QuadratureSettings;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rho_half() -> f64 {
        2.0 / std::f64::consts::PI
    }

    #[test]
    fn bivariate_zero_scale_short_circuits() {
        let c = Corr2::new(0.37).unwrap();
        let o = OffsetSpec::bivariate(0.0, 3.0, -2.0).unwrap();
        let r = expand_ccdf2(c, &o).unwrap();
        assert_eq!(r.approx, orthant2(c));
        assert_eq!(r.linear, 0.0);
        assert_eq!(r.envelope, 0.0);
    }

    #[test]
    fn bivariate_independent_offsets_example() {
        // rho = 0, A = 0.1, alpha = beta = 1: the exact value factorizes into
        // (1 - Q(0.1))^2 and the expansion error stays inside the envelope.
        let c = Corr2::new(0.0).unwrap();
        let o = OffsetSpec::bivariate(0.1, 1.0, 1.0).unwrap();
        let r = expand_ccdf2(c, &o).unwrap();
        assert!((r.approx - 0.289894228040143268).abs() < 1e-15);
        let exact = 0.291414093899194481;
        let diff = (exact - r.approx).abs();
        assert!((diff - 1.519865859051213e-3).abs() < 1e-12);
        assert!((r.envelope - 4.062562222087923e-3).abs() < 1e-12);
        assert!(diff <= r.envelope);
    }

    #[test]
    fn bivariate_cancelling_offsets() {
        let q = QuadratureSettings::default();
        let c = Corr2::new(0.5).unwrap();
        let o = OffsetSpec::bivariate(0.2, 1.0, -1.0).unwrap();
        let r = expand_ccdf2(c, &o).unwrap();
        assert_eq!(r.linear, 0.0);
        let exact = ccdf2_exact(c, 0.2, -0.2, &q).unwrap();
        assert!((exact - orthant2(c)).abs() <= r.envelope + 1e-9);
    }

    #[test]
    fn bivariate_rejects_gamma() {
        let c = Corr2::new(0.0).unwrap();
        let o = OffsetSpec::trivariate(0.1, 1.0, 1.0, 1.0).unwrap();
        assert!(expand_ccdf2(c, &o).is_err());
        assert!(eta2_envelope(c, &o).is_err());
    }

    #[test]
    fn eta2_zero_offsets_vanish() {
        let c = Corr2::new(0.8).unwrap();
        let o = OffsetSpec::bivariate(0.4, 0.0, 0.0).unwrap();
        assert_eq!(eta2_envelope(c, &o).unwrap(), 0.0);
    }

    #[test]
    fn trivariate_zero_scale_and_paper_matrix() {
        let k = Corr3::new(rho_half(), 0.0, rho_half()).unwrap();
        let o = OffsetSpec::trivariate(0.0, 1.0, 2.0, 3.0).unwrap();
        let r = expand_ccdf3(k, &o).unwrap();
        assert!((r.approx - 0.234833954855028321).abs() < 1e-15);
        assert_eq!(r.envelope, 0.0);
    }

    #[test]
    fn trivariate_linear_matches_specialized_display() {
        // For the double-rate correlation matrix the general partial-corr
        // bracket collapses to
        // (2a+b)/4 + (a/pi) asin(rho/sqrt(1-rho^2)) - (b/2pi) asin(rho^2/(1-rho^2)).
        let rho = rho_half();
        let k = Corr3::new(rho, 0.0, rho).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a_off: f64 = rng.random_range(-2.0..2.0);
            let b_off: f64 = rng.random_range(-2.0..2.0);
            let scale: f64 = rng.random_range(0.0..0.5);
            let o = OffsetSpec::trivariate(scale, a_off, b_off, a_off).unwrap();
            let r = expand_ccdf3(k, &o).unwrap();
            let display = scale * FRAC_1_SQRT_2PI
                * ((2.0 * a_off + b_off) / 4.0
                    + a_off / std::f64::consts::PI * (rho / (1.0 - rho * rho).sqrt()).asin()
                    - b_off / (2.0 * std::f64::consts::PI)
                        * (rho * rho / (1.0 - rho * rho)).asin());
            assert!((r.linear - display).abs() < 1e-15);
        }
    }

    #[test]
    fn trivariate_independent_offsets_example() {
        // All correlations zero, A = 0.1, unit offsets: linear term is
        // 3/4 * A / sqrt(2 pi) and the exact value is (1 - Q(0.1))^3.
        let c = Corr3::new(0.0, 0.0, 0.0).unwrap();
        let o = OffsetSpec::trivariate(0.1, 1.0, 1.0, 1.0).unwrap();
        let r = expand_ccdf3(c, &o).unwrap();
        assert!((r.linear - 0.029920671030107446).abs() < 1e-15);
        assert!((r.approx - 0.154920671030107446).abs() < 1e-15);
        let exact = 0.157313440061647202;
        assert!((r.envelope - 6.493450517333989e-3).abs() < 1e-12);
        assert!((exact - r.approx).abs() <= r.envelope);
    }

    #[test]
    fn eta3_zero_offsets_vanish() {
        let c = Corr3::new(0.5, -0.3, 0.2).unwrap();
        let o = OffsetSpec::trivariate(0.4, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(eta3_envelope(c, &o).unwrap(), 0.0);
    }

    fn random_corr3(rng: &mut ChaCha8Rng, min_det: f64) -> Corr3 {
        loop {
            let r12 = rng.random_range(-0.95..0.95);
            let r13 = rng.random_range(-0.95..0.95);
            let r23 = rng.random_range(-0.95..0.95);
            if let Ok(c) = Corr3::new(r12, r13, r23) {
                if c.det() >= min_det {
                    return c;
                }
            }
        }
    }

    #[test]
    fn bivariate_remainder_soundness_sample() {
        let q = QuadratureSettings::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let c = Corr2::new(rng.random_range(-0.95..0.95)).unwrap();
            let a = rng.random_range(0.0..0.5);
            let alpha = rng.random_range(-2.0..2.0);
            let beta = rng.random_range(-2.0..2.0);
            let o = OffsetSpec::bivariate(a, alpha, beta).unwrap();
            let r = expand_ccdf2(c, &o).unwrap();
            let exact = ccdf2_exact(c, alpha * a, beta * a, &q).unwrap();
            assert!(
                (exact - r.approx).abs() <= r.envelope + 1e-9,
                "violation: rho={}, A={a}, alpha={alpha}, beta={beta}",
                c.rho()
            );
        }
    }

    #[test]
    fn trivariate_remainder_soundness_sample() {
        let q = QuadratureSettings::default();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..150 {
            let c = random_corr3(&mut rng, 1e-3);
            let a = rng.random_range(0.0..0.5);
            let alpha = rng.random_range(-2.0..2.0);
            let beta = rng.random_range(-2.0..2.0);
            let gamma = rng.random_range(-2.0..2.0);
            let o = OffsetSpec::trivariate(a, alpha, beta, gamma).unwrap();
            let r = expand_ccdf3(c, &o).unwrap();
            let exact = ccdf3_exact(c, alpha * a, beta * a, gamma * a, &q).unwrap();
            assert!(
                (exact - r.approx).abs() <= r.envelope + 1e-9,
                "violation at {c:?}, A={a}, ({alpha},{beta},{gamma})"
            );
        }
    }

    #[test]
    fn second_order_convergence() {
        // |exact - approx| / A^2 must stay bounded as A shrinks (the
        // remainder is genuinely second order), and the deviation itself
        // must shrink with A.
        let q = QuadratureSettings::default();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let c = Corr2::new(rng.random_range(-0.9..0.9)).unwrap();
            let alpha = rng.random_range(0.2..2.0);
            let beta = rng.random_range(0.2..2.0);
            let ladder = [0.2, 0.1, 0.05, 0.025];
            let mut ratios = Vec::new();
            for &a in &ladder {
                let o = OffsetSpec::bivariate(a, alpha, beta).unwrap();
                let r = expand_ccdf2(c, &o).unwrap();
                let exact = ccdf2_exact(c, alpha * a, beta * a, &q).unwrap();
                ratios.push((exact - r.approx).abs() / (a * a));
            }
            let big = ratios[0].max(ratios[1]).max(ratios[2]);
            assert!(
                ratios[3] <= 3.0 * big + 1e-6,
                "ratio blow-up for {c:?}: {ratios:?}"
            );
            let dev_big = ratios[0] * ladder[0] * ladder[0];
            let dev_small = ratios[3] * ladder[3] * ladder[3];
            assert!(dev_small <= dev_big + 1e-9, "no shrinkage for {c:?}");
        }
    }

    proptest! {
        #[test]
        fn eta2_even_and_monotone_in_scale(
            rho in -0.95f64..0.95,
            a in 0.0f64..0.5,
            alpha in -2.0f64..2.0,
            beta in -2.0f64..2.0,
        ) {
            let c = Corr2::new(rho).unwrap();
            let o1 = OffsetSpec::bivariate(a, alpha, beta).unwrap();
            let o2 = OffsetSpec::bivariate(a, -alpha, -beta).unwrap();
            let e1 = eta2_envelope(c, &o1).unwrap();
            let e2 = eta2_envelope(c, &o2).unwrap();
            prop_assert!(e1 >= 0.0);
            prop_assert_eq!(e1, e2);
            let o3 = OffsetSpec::bivariate(2.0 * a, alpha, beta).unwrap();
            prop_assert!(eta2_envelope(c, &o3).unwrap() >= e1);
        }

        #[test]
        fn eta3_even_and_monotone_in_scale(
            seed in 0u64..1_000,
            a in 0.0f64..0.5,
            alpha in -2.0f64..2.0,
            beta in -2.0f64..2.0,
            gamma in -2.0f64..2.0,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = random_corr3(&mut rng, 1e-3);
            let o1 = OffsetSpec::trivariate(a, alpha, beta, gamma).unwrap();
            let o2 = OffsetSpec::trivariate(a, -alpha, -beta, -gamma).unwrap();
            let e1 = eta3_envelope(c, &o1).unwrap();
            prop_assert!(e1 >= 0.0);
            prop_assert_eq!(e1, eta3_envelope(c, &o2).unwrap());
            let o3 = OffsetSpec::trivariate(2.0 * a, alpha, beta, gamma).unwrap();
            prop_assert!(eta3_envelope(c, &o3).unwrap() >= e1);
        }
    }
}
