//! Bandlimited unit-energy pulse families, feature extraction at the
//! quarter-slot sampling times, the boundary parameterization of the feasible
//! feature set, and the summability/admissibility checks.
//!
//! All pulses are represented by closed-form evaluators; sampled tap vectors
//! are produced on demand with a configurable truncation half-width.

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_even_tail, QuadratureSettings};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Channel parameters: bandwidth, double-sided noise density level N0/2, and
/// the average-power constraint.
#[derive(Debug, Clone, Copy)]
pub struct ChannelParams {
    pub w: f64,
    pub n0: f64,
    pub p: f64,
}

impl ChannelParams {
    pub fn new(w: f64, n0: f64, p: f64) -> Result<Self> {
        if !(w > 0.0) || !(n0 > 0.0) || !(p >= 0.0) || !p.is_finite() {
            return Err(Error::domain("channel requires W > 0, N0 > 0, P >= 0"));
        }
        Ok(Self { w, n0, p })
    }
}

/// normalized sinc: sin(pi x) / (pi x), equal to 1 at x = 0.
#[inline]
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

/// The pair of half-shifted sincs, (lambda/2)(sinc(u - 1/2) + sinc(u + 1/2)),
/// in the slot variable u = 2W t.
#[inline]
fn half_shift_pair(u: f64, lambda: f64) -> f64 {
    0.5 * lambda * (sinc(u - 0.5) + sinc(u + 0.5))
}

/// Raised-cosine core in the slot variable u = 2W t: bandwidth W, roll-off xi,
/// scaled so its spectrum matches the sinc's flat level at f = 0.
fn rc_core(u: f64, xi: f64) -> f64 {
    let v = u / (1.0 + xi);
    let z = xi * v;
    // cos(pi z) / (1 - 4 z^2) has removable singularities at z = +-1/2; the
    // rewrite via sinc(|z| - 1/2) is exact and well conditioned there.
    let factor = if z.abs() <= 0.25 {
        (std::f64::consts::PI * z).cos() / (1.0 - 4.0 * z * z)
    } else {
        let e = z.abs() - 0.5;
        std::f64::consts::FRAC_PI_4 * sinc(e) / (1.0 + e)
    };
    sinc(v) * factor / (1.0 + xi)
}

/// Normalization constant of the band-edge-emphasis family:
/// lambda^2/2 + 4 lambda/pi + 1.
#[inline]
fn opt_norm_sq(lambda: f64) -> f64 {
    0.5 * lambda * lambda + 4.0 * lambda / std::f64::consts::PI + 1.0
}

/// Time-domain pulse whose spectrum is (1 + lambda cos(pi f / 2W)) inside the
/// band: a sinc plus two half-shifted sincs, normalized to unit energy.
/// The removable singularities at t = +-1/(4W) fall on sinc grid points and
/// are exact in this form.
pub fn g_opt(lambda: f64, t: f64, w: f64) -> f64 {
    let u = 2.0 * w * t;
    (2.0 * w / opt_norm_sq(lambda)).sqrt() * (sinc(u) + half_shift_pair(u, lambda))
}

/// Spectrum of `g_opt`: (1 + lambda cos(pi f / 2W)) / sqrt(2W (lambda^2/2 +
/// 4 lambda/pi + 1)) for |f| <= W, zero outside the band.
pub fn g_hat_opt(lambda: f64, f: f64, w: f64) -> f64 {
    if f.abs() > w {
        0.0
    } else {
        (1.0 + lambda * (std::f64::consts::PI * f / (2.0 * w)).cos())
            / (2.0 * w * opt_norm_sq(lambda)).sqrt()
    }
}

/// Unnormalized raised variant in the slot variable: raised-cosine core plus
/// the half-shifted pair.
fn raised_unnorm(u: f64, lambda: f64, xi: f64) -> f64 {
    rc_core(u, xi) + half_shift_pair(u, lambda)
}

/// Energy normalizer Psi(xi) of the raised family, by adaptive quadrature of
/// the squared unnormalized pulse. Independent of W (the integrand is a
/// function of the slot variable alone); tends to lambda^2/2 + 4 lambda/pi + 1
/// as xi tends to zero.
pub fn psi_norm(lambda: f64, xi: f64, _w: f64, q: &QuadratureSettings) -> Result<f64> {
    check_rolloff(xi)?;
    let r = integrate_even_tail(|u| raised_unnorm(u, lambda, xi).powi(2), 16.0, q)?;
    Ok(r.value)
}

fn check_rolloff(xi: f64) -> Result<()> {
    if !(xi > 0.0 && xi <= 1.0) {
        return Err(Error::domain(format!("roll-off must lie in (0, 1], got {xi}")));
    }
    Ok(())
}

fn psi_settings() -> QuadratureSettings {
    QuadratureSettings {
        abs_tol: 1e-9,
        rel_tol: 1e-9,
        max_subdivisions: 60_000,
    }
}

/// Memoized Psi(xi) for the pulse evaluators; computed once per (lambda, xi).
fn psi_cached(lambda: f64, xi: f64) -> Result<f64> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u64), f64>>> = OnceLock::new();
    let key = (lambda.to_bits(), xi.to_bits());
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&key) {
        return Ok(*v);
    }
    let v = psi_norm(lambda, xi, 1.0, &psi_settings())?;
    cache.lock().unwrap().insert(key, v);
    Ok(v)
}

/// Raised-cosine member of the family: the sinc core replaced by a
/// raised-cosine of bandwidth W and roll-off xi, renormalized to unit energy
/// by sqrt(Psi(xi)). Converges pointwise to `g_opt` as xi tends to zero.
pub fn g_raised(lambda: f64, xi: f64, t: f64, w: f64) -> Result<f64> {
    check_rolloff(xi)?;
    let psi = psi_cached(lambda, xi)?;
    Ok((2.0 * w / psi).sqrt() * raised_unnorm(2.0 * w * t, lambda, xi))
}

/// Pulse family selector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseFamily {
    Sinc,
    Optimal { lambda: f64 },
    Raised { lambda: f64, xi: f64 },
}

/// A bandlimited unit-energy waveform: family plus bandwidth.
#[derive(Debug, Clone, Copy)]
pub struct Pulse {
    family: PulseFamily,
    w: f64,
}

impl Pulse {
    pub fn new(family: PulseFamily, w: f64) -> Result<Self> {
        if !(w > 0.0) {
            return Err(Error::domain("pulse bandwidth must be positive"));
        }
        if let PulseFamily::Raised { xi, .. } = family {
            check_rolloff(xi)?;
        }
        Ok(Self { family, w })
    }

    pub fn sinc(w: f64) -> Result<Self> {
        Self::new(PulseFamily::Sinc, w)
    }

    pub fn optimal(lambda: f64, w: f64) -> Result<Self> {
        Self::new(PulseFamily::Optimal { lambda }, w)
    }

    pub fn raised(lambda: f64, xi: f64, w: f64) -> Result<Self> {
        Self::new(PulseFamily::Raised { lambda, xi }, w)
    }

    #[inline]
    pub fn family(&self) -> PulseFamily {
        self.family
    }

    #[inline]
    pub fn bandwidth(&self) -> f64 {
        self.w
    }

    /// Time-domain amplitude g(t).
    pub fn eval(&self, t: f64) -> Result<f64> {
        match self.family {
            PulseFamily::Sinc => Ok((2.0 * self.w).sqrt() * sinc(2.0 * self.w * t)),
            PulseFamily::Optimal { lambda } => Ok(g_opt(lambda, t, self.w)),
            PulseFamily::Raised { lambda, xi } => g_raised(lambda, xi, t, self.w),
        }
    }

    /// Spectral amplitude; identically zero outside |f| <= W for every family.
    pub fn spectral_amplitude(&self, f: f64) -> Result<f64> {
        let w = self.w;
        if f.abs() > w {
            return Ok(0.0);
        }
        match self.family {
            PulseFamily::Sinc => Ok(1.0 / (2.0 * w).sqrt()),
            PulseFamily::Optimal { lambda } => Ok(g_hat_opt(lambda, f, w)),
            PulseFamily::Raised { lambda, xi } => {
                let psi = psi_cached(lambda, xi)?;
                // Raised-cosine spectrum with band edge at W, flat level 1/(2W).
                let t_sym = (1.0 + xi) / (2.0 * w);
                let f_flat = (1.0 - xi) * w / (1.0 + xi);
                let rc = if f.abs() <= f_flat {
                    t_sym
                } else {
                    t_sym
                        * 0.5
                        * (1.0
                            + (std::f64::consts::PI * t_sym / xi * (f.abs() - f_flat)).cos())
                };
                let pair = 0.5 * lambda / w * (std::f64::consts::PI * f / (2.0 * w)).cos();
                Ok((2.0 * w / psi).sqrt() * (rc / (1.0 + xi) + pair))
            }
        }
    }

    /// Samples on the quarter-slot grid t = m/(4W) for |m| <= 2L, i.e. every
    /// point used by the three lattice sums, with L in half-slot units.
    pub fn taps(&self, half_width: usize) -> Result<Taps> {
        let m_max = 2 * half_width as i64;
        let mut values = Vec::with_capacity((2 * m_max + 1) as usize);
        for m in -m_max..=m_max {
            let t = m as f64 / (4.0 * self.w);
            values.push(self.eval(t)?);
        }
        Ok(Taps {
            half_width,
            w: self.w,
            values,
            tail_bound: self.truncation_tail_bound(half_width)?,
        })
    }

    /// Estimated bound on the discarded |g| lattice sum beyond the truncation
    /// half-width, from a power-law fit of the tail envelope. Infinite when
    /// the fitted decay is too slow for the tail sum to converge.
    fn truncation_tail_bound(&self, half_width: usize) -> Result<f64> {
        let fit = self.tail_envelope_fit(half_width.max(32))?;
        if fit.slope >= -1.0 {
            return Ok(f64::INFINITY);
        }
        // sum_{m > M} c (m/4W)^s ~ c (4W)^{-s} M^{s+1} / (-s-1), both sides.
        let m = 2.0 * half_width as f64;
        let s = fit.slope;
        let c = fit.scale * (4.0 * self.w).powf(s);
        Ok(2.0 * c * m.powf(s + 1.0) / (-s - 1.0))
    }

    /// Least-squares power-law fit |g(t)| ~ scale * t^slope over the last
    /// decade of the quarter-slot grid, using per-bin envelope maxima so the
    /// oscillation nulls do not drag the fit down.
    fn tail_envelope_fit(&self, half_width: usize) -> Result<TailFit> {
        let m_max = 2 * half_width as i64;
        let m_min = (m_max / 10).max(4);
        let bins = 8usize;
        let ratio = (m_max as f64 / m_min as f64).powf(1.0 / bins as f64);
        let mut pts = Vec::with_capacity(bins);
        let mut lo = m_min as f64;
        for _ in 0..bins {
            let hi = lo * ratio;
            let mut best: Option<(f64, f64)> = None;
            let mut m = lo.ceil() as i64;
            while (m as f64) < hi {
                let t = m as f64 / (4.0 * self.w);
                let v = self.eval(t)?.abs();
                if best.map_or(true, |(_, b)| v > b) {
                    best = Some((t, v));
                }
                m += 1;
            }
            if let Some((t, v)) = best {
                if v > 1e-280 {
                    pts.push((t.ln(), v.ln()));
                }
            }
            lo = hi;
        }
        if pts.len() < 3 {
            return Err(Error::Numeric {
                what: "too few envelope points for a tail fit".into(),
                achieved: pts.len() as f64,
            });
        }
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let intercept = (sy - slope * sx) / n;
        Ok(TailFit {
            slope,
            scale: intercept.exp(),
        })
    }
}

struct TailFit {
    slope: f64,
    scale: f64,
}

/// Quarter-slot tap vector with its truncation tail bound.
#[derive(Debug, Clone)]
pub struct Taps {
    half_width: usize,
    w: f64,
    values: Vec<f64>,
    tail_bound: f64,
}

impl Taps {
    /// Amplitude at t = m/(4W); zero outside the truncation window.
    #[inline]
    pub fn at_quarter(&self, m: i64) -> f64 {
        let m_max = 2 * self.half_width as i64;
        if m.abs() > m_max {
            0.0
        } else {
            self.values[(m + m_max) as usize]
        }
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Rows (m, t, g(t)) over the quarter-slot grid, for CSV export.
    pub fn rows(&self) -> impl Iterator<Item = (i64, f64, f64)> + '_ {
        let m_max = 2 * self.half_width as i64;
        (-m_max..=m_max).map(move |m| (m, m as f64 / (4.0 * self.w), self.at_quarter(m)))
    }
}

/// The feature triple (alpha0, beta0, gamma0) of a pulse: its samples at
/// t = -1/(4W), 0, 1/(4W), each scaled by 1/sqrt(2W * W N0).
#[derive(Debug, Clone, Copy)]
pub struct Features {
    pub alpha0: f64,
    pub beta0: f64,
    pub gamma0: f64,
}

impl Features {
    pub fn new(alpha0: f64, beta0: f64, gamma0: f64) -> Result<Self> {
        if ![alpha0, beta0, gamma0].iter().all(|v| v.is_finite()) {
            return Err(Error::domain("features must be finite"));
        }
        Ok(Self {
            alpha0,
            beta0,
            gamma0,
        })
    }

    /// Symmetric triple (alpha0 = gamma0).
    pub fn symmetric(alpha0: f64, beta0: f64) -> Result<Self> {
        Self::new(alpha0, beta0, alpha0)
    }
}

/// Extract (alpha0, beta0, gamma0) from a pulse under the given channel.
pub fn features_from_pulse(p: &Pulse, ch: &ChannelParams) -> Result<Features> {
    let scale = 1.0 / (2.0 * ch.w * ch.w * ch.n0).sqrt();
    let quarter = 1.0 / (4.0 * ch.w);
    Features::new(
        p.eval(-quarter)? * scale,
        p.eval(0.0)? * scale,
        p.eval(quarter)? * scale,
    )
}

/// Boundary of the feasible (alpha0, beta0) set, parameterized by the band
/// emphasis lambda:
///   alpha0 = (2/pi + lambda/2) / sqrt(lambda^2/2 + 4 lambda/pi + 1) / sqrt(W N0)
///   beta0  = (1 + 2 lambda/pi) / sqrt(lambda^2/2 + 4 lambda/pi + 1) / sqrt(W N0)
pub fn boundary_point(lambda: f64, ch: &ChannelParams) -> (f64, f64) {
    let d = opt_norm_sq(lambda).sqrt();
    let scale = 1.0 / (ch.w * ch.n0).sqrt();
    (
        (2.0 / std::f64::consts::PI + 0.5 * lambda) / d * scale,
        (1.0 + 2.0 * lambda / std::f64::consts::PI) / d * scale,
    )
}

/// Outcome of the lattice-summability check.
#[derive(Debug, Clone, Copy)]
pub struct Summability {
    pub admissible: bool,
    /// Partial sums of |g| over the three lattices (l - 1/2, l, l + 1/2)/(2W),
    /// l != 0, |l| <= half_grid_limit.
    pub partial_sums: [f64; 3],
    /// Fitted log-log envelope slope over the last decade of samples.
    pub tail_slope: f64,
}

/// Evaluate the three absolute lattice sums and test the quadratic tail-decay
/// sufficient condition by an envelope fit over the last decade of samples.
/// Admissibility threshold: fitted slope <= -1.9.
pub fn check_summability(p: &Pulse, half_grid_limit: usize) -> Result<Summability> {
    if half_grid_limit < 10 {
        return Err(Error::domain("half_grid_limit must be at least 10"));
    }
    let two_w = 2.0 * p.bandwidth();
    let mut sums = [0.0f64; 3];
    for l in 1..=half_grid_limit as i64 {
        for sign in [-1.0, 1.0] {
            let l = sign * l as f64;
            sums[0] += p.eval((l - 0.5) / two_w)?.abs();
            sums[1] += p.eval(l / two_w)?.abs();
            sums[2] += p.eval((l + 0.5) / two_w)?.abs();
        }
    }
    let fit = p.tail_envelope_fit(half_grid_limit)?;
    Ok(Summability {
        admissible: fit.slope <= -1.9,
        partial_sums: sums,
        tail_slope: fit.slope,
    })
}

/// Unit-energy check through the spectral route (Parseval): integrates the
/// squared spectral amplitude over the band. Serves as an independent oracle
/// against the time-domain normalization.
pub fn spectral_energy(p: &Pulse, q: &QuadratureSettings) -> Result<f64> {
    let w = p.bandwidth();
    let failed = std::cell::Cell::new(false);
    let r = integrate(
        |f| match p.spectral_amplitude(f) {
            Ok(v) => v * v,
            Err(_) => {
                failed.set(true);
                f64::NAN
            }
        },
        -w,
        w,
        q,
    )?;
    if failed.get() {
        return Err(Error::Numeric {
            what: "spectral amplitude evaluation failed".into(),
            achieved: f64::NAN,
        });
    }
    Ok(r.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT_2: f64 = std::f64::consts::SQRT_2;
    // Boundary constants at lambda = 1.4, frozen from 25-digit evaluation of
    // the closed forms.
    const G0_LAMBDA_14: f64 = 0.975018163154204789;
    const G1_LAMBDA_14: f64 = 0.689076733116678996;
    const OPT_NORM_SQ_14: f64 = 3.762535362629227761;

    #[test]
    fn g_opt_reference_points() {
        assert!((g_opt(0.0, 0.0, 1.0) - SQRT_2).abs() < 1e-15);
        assert!((g_opt(1.4, 0.0, 1.0) - SQRT_2 * G0_LAMBDA_14).abs() < 1e-14);
        assert!((g_opt(1.4, 0.25, 1.0) - SQRT_2 * G1_LAMBDA_14).abs() < 1e-14);
        // Symmetric pulse.
        assert_eq!(g_opt(1.4, 0.25, 1.0), g_opt(1.4, -0.25, 1.0));
    }

    #[test]
    fn g_opt_matches_cosine_closed_form_off_peak() {
        // Away from the half-slot peaks the shifted pair has the closed form
        // -(lambda/2) cos(2 pi W t) / (pi ((2Wt)^2 - 1/4)).
        let (lambda, w) = (1.4, 1.0);
        for &t in &[0.1, 0.37, 1.3, 2.25, -0.8] {
            let u = 2.0 * w * t;
            let pair = -0.5 * lambda * (2.0 * std::f64::consts::PI * w * t).cos()
                / (std::f64::consts::PI * (u * u - 0.25));
            let expect = (2.0 * w / OPT_NORM_SQ_14).sqrt() * (sinc(u) + pair);
            assert!((g_opt(lambda, t, w) - expect).abs() < 1e-13, "t = {t}");
        }
    }

    #[test]
    fn g_opt_continuous_at_quarter_peak() {
        let at = g_opt(1.4, 0.25, 1.0);
        let near = g_opt(1.4, 0.25 + 1e-9, 1.0);
        assert!((at - near).abs() < 1e-7);
    }

    #[test]
    fn g_hat_opt_flat_sinc_and_out_of_band() {
        assert!((g_hat_opt(0.0, 0.0, 1.0) - 1.0 / SQRT_2).abs() < 1e-15);
        assert_eq!(g_hat_opt(1.4, 1.5, 1.0), 0.0);
        assert_eq!(g_hat_opt(5.0, -1.01, 1.0), 0.0);
    }

    #[test]
    fn g_hat_opt_unit_energy_by_parseval() {
        let q = QuadratureSettings::default();
        for lambda in [0.0, 0.7, 1.4, 5.0] {
            let r = integrate(|f| g_hat_opt(lambda, f, 1.0).powi(2), -1.0, 1.0, &q).unwrap();
            assert!((r.value - 1.0).abs() < 1e-10, "lambda={lambda}: {}", r.value);
        }
    }

    #[test]
    fn psi_norm_limits() {
        let q = psi_settings();
        // xi -> 0 limit is the family normalizer.
        let psi = psi_norm(0.0, 1e-3, 1.0, &q).unwrap();
        assert!((psi - 1.0).abs() < 1e-2, "psi = {psi}");
        let psi = psi_norm(1.4, 1e-3, 1.0, &q).unwrap();
        assert!((psi - OPT_NORM_SQ_14).abs() < 1e-2, "psi = {psi}");
        for xi in [0.1, 0.25, 0.5, 1.0] {
            assert!(psi_norm(1.4, xi, 1.0, &q).unwrap() > 0.0);
        }
        assert!(psi_norm(1.4, 0.0, 1.0, &q).is_err());
        assert!(psi_norm(1.4, 1.2, 1.0, &q).is_err());
    }

    #[test]
    fn psi_norm_matches_parseval_route() {
        // Frozen from a piecewise high-precision frequency-domain evaluation.
        let psi = psi_norm(1.4, 0.25, 1.0, &psi_settings()).unwrap();
        assert!((psi - 3.409498314620095).abs() < 1e-6, "psi = {psi}");
    }

    #[test]
    fn raised_energy_is_one_by_spectral_route() {
        let q = QuadratureSettings::default();
        for xi in [0.1, 0.5, 1.0] {
            let p = Pulse::raised(1.4, xi, 1.0).unwrap();
            let e = spectral_energy(&p, &q).unwrap();
            assert!((e - 1.0).abs() < 1e-6, "xi={xi}: energy {e}");
        }
        // Also for a different bandwidth.
        let p = Pulse::raised(0.7, 0.3, 4.0).unwrap();
        let e = spectral_energy(&p, &q).unwrap();
        assert!((e - 1.0).abs() < 1e-6);
    }

    #[test]
    fn g_raised_approaches_g_opt_as_rolloff_vanishes() {
        let xi = 1e-3;
        for &t in &[0.0, 0.25, -0.25] {
            let a = g_raised(1.4, xi, t, 1.0).unwrap();
            let b = g_opt(1.4, t, 1.0);
            assert!((a - b).abs() < 1e-2, "t={t}: {a} vs {b}");
        }
    }

    #[test]
    fn g_raised_rolloff_convergence_is_monotone() {
        let grid: Vec<f64> = (-40..=40).map(|k| k as f64 * 0.1).collect();
        let mut prev = f64::INFINITY;
        for xi in [0.4, 0.2, 0.1, 0.05] {
            let mut worst = 0.0f64;
            for &t in &grid {
                let d = (g_raised(1.4, xi, t, 1.0).unwrap() - g_opt(1.4, t, 1.0)).abs();
                worst = worst.max(d);
            }
            assert!(worst < prev, "xi={xi}: {worst} !< {prev}");
            prev = worst;
        }
    }

    #[test]
    fn g_raised_finite_at_taper_singularity() {
        // For xi = 0.25 the raised-cosine factor's removable singularity sits
        // exactly on a quarter-slot grid point (t = 1.25 at W = 1).
        let v = g_raised(1.4, 0.25, 1.25, 1.0).unwrap();
        assert!(v.is_finite());
        let near = g_raised(1.4, 0.25, 1.25 + 1e-9, 1.0).unwrap();
        assert!((v - near).abs() < 1e-6);
        assert!(g_raised(1.4, 0.0, 0.1, 1.0).is_err());
    }

    #[test]
    fn features_reference_values() {
        let ch = ChannelParams::new(1.0, 1.0, 1.0).unwrap();
        let f = features_from_pulse(&Pulse::sinc(1.0).unwrap(), &ch).unwrap();
        let two_over_pi = 2.0 / std::f64::consts::PI;
        assert!((f.alpha0 - two_over_pi).abs() < 1e-15);
        assert!((f.beta0 - 1.0).abs() < 1e-15);
        assert!((f.gamma0 - two_over_pi).abs() < 1e-15);

        let f = features_from_pulse(&Pulse::optimal(1.4, 1.0).unwrap(), &ch).unwrap();
        assert!((f.alpha0 - G1_LAMBDA_14).abs() < 1e-14);
        assert!((f.beta0 - G0_LAMBDA_14).abs() < 1e-14);
        assert_eq!(f.alpha0, f.gamma0);
    }

    #[test]
    fn features_symmetry_for_symmetric_pulses() {
        let ch = ChannelParams::new(2.0, 0.5, 1.0).unwrap();
        for p in [
            Pulse::sinc(2.0).unwrap(),
            Pulse::optimal(-0.8, 2.0).unwrap(),
            Pulse::raised(1.4, 0.25, 2.0).unwrap(),
        ] {
            let f = features_from_pulse(&p, &ch).unwrap();
            assert!((f.alpha0 - f.gamma0).abs() < 1e-14);
        }
    }

    #[test]
    fn boundary_reference_points() {
        let ch = ChannelParams::new(1.0, 1.0, 1.0).unwrap();
        let (a, b) = boundary_point(0.0, &ch);
        assert!((a - 2.0 / std::f64::consts::PI).abs() < 1e-15);
        assert!((b - 1.0).abs() < 1e-15);
        let (a, b) = boundary_point(1.4, &ch);
        assert!((a - G1_LAMBDA_14).abs() < 1e-14);
        assert!((b - G0_LAMBDA_14).abs() < 1e-14);
        // Large-lambda limit (1/sqrt(2), 2 sqrt(2)/pi).
        let (a, b) = boundary_point(1e8, &ch);
        assert!((a - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6);
        assert!((b - 2.0 * SQRT_2 / std::f64::consts::PI).abs() < 1e-6);
    }

    #[test]
    fn boundary_symmetric_support_values() {
        let ch = ChannelParams::new(1.0, 1.0, 1.0).unwrap();
        for lambda in [-2.0, 0.0, 1.4, 3.0] {
            let (a, b) = boundary_point(lambda, &ch);
            let plus = (lambda * a + b).abs();
            let minus = (lambda * -a + -b).abs();
            assert!((plus - minus).abs() < 1e-15);
        }
    }

    #[test]
    fn summability_classifies_the_three_families() {
        let raised = Pulse::raised(1.4, 0.5, 1.0).unwrap();
        let s = check_summability(&raised, 256).unwrap();
        assert!(s.admissible, "raised slope {}", s.tail_slope);

        let sinc_p = Pulse::sinc(1.0).unwrap();
        let s = check_summability(&sinc_p, 256).unwrap();
        assert!(!s.admissible, "sinc slope {}", s.tail_slope);
        // Half-integer lattice sums of the sinc grow like the harmonic series.
        assert!(s.partial_sums[0] > s.partial_sums[1]);

        let opt = Pulse::optimal(1.4, 1.0).unwrap();
        let s = check_summability(&opt, 256).unwrap();
        assert!(!s.admissible, "optimal slope {}", s.tail_slope);

        assert!(check_summability(&raised, 9).is_err());
    }

    #[test]
    fn raised_tail_obeys_quadratic_envelope() {
        // |g(t)| <= K2 / t^2 beyond the taper onset, with K2 fitted from the
        // envelope itself.
        let p = Pulse::raised(1.4, 0.25, 1.0).unwrap();
        let mut k2 = 0.0f64;
        for m in 40..200i64 {
            let t = m as f64 / 4.0;
            k2 = k2.max(p.eval(t).unwrap().abs() * t * t);
        }
        for m in 200..800i64 {
            let t = m as f64 / 4.0;
            assert!(p.eval(t).unwrap().abs() <= 1.0001 * k2 / (t * t), "t = {t}");
        }
    }

    #[test]
    fn taps_window_and_tail_bound() {
        let p = Pulse::raised(1.4, 0.25, 1.0).unwrap();
        let taps = p.taps(64).unwrap();
        assert_eq!(taps.rows().count(), 2 * 128 + 1);
        assert!((taps.at_quarter(0) - p.eval(0.0).unwrap()).abs() < 1e-15);
        assert_eq!(taps.at_quarter(300), 0.0);
        assert!(taps.tail_bound().is_finite());
        assert!(taps.tail_bound() > 0.0);

        let s = Pulse::sinc(1.0).unwrap().taps(64).unwrap();
        assert!(s.tail_bound().is_infinite());
    }
}
