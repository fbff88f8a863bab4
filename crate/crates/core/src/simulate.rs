//! Monte Carlo and exact-enumeration evaluation of the quantized oversampled
//! channel. The exact truncated law enumerates every neighbor sign pattern of
//! the ISI window and averages shifted orthant probabilities; the simulator
//! draws the same model and must converge to it, giving an independent check
//! of every closed-form expansion.

use crate::bound::{double_rate_corr3, Pattern, RateSlope, TripleLaw, RHO};
use crate::error::{Error, Result};
use crate::gaussmath::{ccdf2_exact, ccdf3_exact, q_function, Corr2, TriangularFactor};
use crate::quad::QuadratureSettings;
use crate::waveform::{ChannelParams, Pulse};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

/// Output grouping: one sample per slot (the middle sample only) or the
/// double-rate triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sampling {
    Nyquist,
    Double,
}

/// Monte Carlo configuration.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub ch: ChannelParams,
    pub pulse: Pulse,
    /// ISI half-width: number of neighbor symbols on each side.
    pub isi_half_width: usize,
    pub n: u64,
    pub seed: u64,
    pub sampling: Sampling,
}

/// Empirical joint counts over (input sign, output pattern). Row 0 holds
/// trials with X = +sqrt(P). In Nyquist mode only pattern cells 0 (output -1)
/// and 1 (output +1) are used.
#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalJoint {
    pub counts: [[u64; 8]; 2],
    pub n: u64,
    pub sampling: Sampling,
}

impl EmpiricalJoint {
    pub fn pattern_cells(&self) -> usize {
        match self.sampling {
            Sampling::Nyquist => 2,
            Sampling::Double => 8,
        }
    }

    pub fn frequency(&self, row: usize, cell: usize) -> f64 {
        self.counts[row][cell] as f64 / self.n as f64
    }
}

/// Per-neighbor normalized pulse samples at the three quarter-slot times,
/// plus the conditional-mean triple of the symbol of interest.
struct IsiModel {
    base: [f64; 3],
    neighbors: Vec<[f64; 3]>,
}

impl IsiModel {
    fn build(pulse: &Pulse, ch: &ChannelParams, isi_half_width: usize) -> Result<IsiModel> {
        if isi_half_width > 12 {
            return Err(Error::resource(
                "ISI half-width above 12 would enumerate more than 2^24 patterns",
            ));
        }
        let scale = 1.0 / (2.0 * ch.w * ch.w * ch.n0).sqrt();
        let two_w = 2.0 * ch.w;
        let sample = |l: i64| -> Result<[f64; 3]> {
            Ok([
                pulse.eval((0.5 - l as f64) / two_w)? * scale,
                pulse.eval((1.0 - l as f64) / two_w)? * scale,
                pulse.eval((1.5 - l as f64) / two_w)? * scale,
            ])
        };
        let mut neighbors = Vec::with_capacity(2 * isi_half_width);
        let j = isi_half_width as i64;
        for l in (1 - j..=0).chain(2..=1 + j) {
            neighbors.push(sample(l)?);
        }
        Ok(IsiModel {
            base: sample(1)?,
            neighbors,
        })
    }

    /// Offset triple for a neighbor sign assignment, conditional on the
    /// symbol of interest being +1 (in units of sqrt(P)).
    #[inline]
    fn offsets(&self, eps_bits: u64) -> [f64; 3] {
        let mut offs = self.base;
        for (k, nb) in self.neighbors.iter().enumerate() {
            let s = if eps_bits >> k & 1 == 1 { 1.0 } else { -1.0 };
            offs[0] += s * nb[0];
            offs[1] += s * nb[1];
            offs[2] += s * nb[2];
        }
        offs
    }
}

/// The 8 pattern probabilities for one offset triple, at threshold scale `a`.
/// Two trivariate quadratures plus six bivariate marginals determine all
/// eight masses: a pattern with a -1 component is the difference between a
/// bivariate marginal and the pattern with that component flipped to +1.
fn pattern_probs(offs: [f64; 3], a: f64, q: &QuadratureSettings) -> Result<[f64; 8]> {
    let k = double_rate_corr3();
    let (oa, ob, og) = (offs[0] * a, offs[1] * a, offs[2] * a);

    let rho_p = Corr2::new(RHO)?;
    let rho_m = Corr2::new(-RHO)?;

    let t_ppp = ccdf3_exact(k, oa, ob, og, q)?;
    let t_pmp = ccdf3_exact(k.flipped([1, -1, 1]), oa, -ob, og, q)?;

    // Marginals of (Y1, Y2) and (Y2, Y3); adjacent samples have correlation
    // rho, so sign flips only toggle its sign.
    let m12_pp = ccdf2_exact(rho_p, oa, ob, q)?;
    let m12_pm = ccdf2_exact(rho_m, oa, -ob, q)?;
    let m23_pp = ccdf2_exact(rho_p, ob, og, q)?;
    let m23_mp = ccdf2_exact(rho_m, -ob, og, q)?;
    let m23_pm = ccdf2_exact(rho_m, ob, -og, q)?;
    let m23_mm = ccdf2_exact(rho_p, -ob, -og, q)?;

    let mut p = [0.0f64; 8];
    let set = |p: &mut [f64; 8], s: [i8; 3], v: f64| {
        p[Pattern::from_signs(s).index()] = v.max(0.0);
    };
    set(&mut p, [1, 1, 1], t_ppp);
    set(&mut p, [1, -1, 1], t_pmp);
    set(&mut p, [1, 1, -1], m12_pp - t_ppp);
    set(&mut p, [1, -1, -1], m12_pm - t_pmp);
    set(&mut p, [-1, 1, 1], m23_pp - t_ppp);
    set(&mut p, [-1, -1, 1], m23_mp - t_pmp);
    let p_ppm = p[Pattern::from_signs([1, 1, -1]).index()];
    let p_pmm = p[Pattern::from_signs([1, -1, -1]).index()];
    set(&mut p, [-1, 1, -1], m23_pm - p_ppm);
    set(&mut p, [-1, -1, -1], m23_mm - p_pmm);
    Ok(p)
}

/// Reference implementation of the 8 pattern probabilities: one sign-flipped
/// trivariate quadrature per pattern. Used to validate the marginal-
/// difference evaluation.
#[cfg(test)]
fn pattern_probs_direct(offs: [f64; 3], a: f64, q: &QuadratureSettings) -> Result<[f64; 8]> {
    let k = double_rate_corr3();
    let mut p = [0.0f64; 8];
    for pat in Pattern::all() {
        let s = pat.signs();
        p[pat.index()] = ccdf3_exact(
            k.flipped(s),
            s[0] as f64 * offs[0] * a,
            s[1] as f64 * offs[1] * a,
            s[2] as f64 * offs[2] * a,
            q,
        )?;
    }
    Ok(p)
}

/// Exact law of the sign triple for the ISI-truncated model: enumerate all
/// 2^(2J) neighbor sign patterns, evaluate the shifted orthant probabilities
/// of the correlated noise triple, and average uniformly. Exact (to
/// quadrature tolerance) for the truncated model; the truncation gap is
/// bounded by the pulse taps outside the window.
pub fn exact_truncated_law(
    p_watts: f64,
    pulse: &Pulse,
    ch: &ChannelParams,
    isi_half_width: usize,
    q: &QuadratureSettings,
) -> Result<TripleLaw> {
    if !(p_watts >= 0.0) || !p_watts.is_finite() {
        return Err(Error::domain("power must be finite and nonnegative"));
    }
    let model = IsiModel::build(pulse, ch, isi_half_width)?;
    let a = p_watts.sqrt();
    let n_patterns: u64 = 1 << (2 * isi_half_width);

    // Fixed-size chunks keep the reduction order independent of the worker
    // count: partial sums are collected per chunk index and folded serially.
    const CHUNK: u64 = 1024;
    let n_chunks = n_patterns.div_ceil(CHUNK);
    let partials: Vec<Result<[f64; 8]>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = [0.0f64; 8];
            for eps in c * CHUNK..((c + 1) * CHUNK).min(n_patterns) {
                let p = pattern_probs(model.offsets(eps), a, q)?;
                for (sum, v) in acc.iter_mut().zip(p) {
                    *sum += v;
                }
            }
            Ok(acc)
        })
        .collect();

    let mut cond = [0.0f64; 8];
    for partial in partials {
        let partial = partial?;
        for (sum, v) in cond.iter_mut().zip(partial) {
            *sum += v;
        }
    }
    let inv = 1.0 / n_patterns as f64;
    for v in cond.iter_mut() {
        *v *= inv;
    }
    Ok(TripleLaw::from_cond_plus(cond))
}

/// Exact slot-rate (single-sample) law of the ISI-truncated model: the middle
/// sample's conditional law P(Y = +-1 | X = +sqrt(P)), obtained by averaging
/// 1 - Q(beta(eps) sqrt(P)) over the neighbor patterns. Identical to the
/// middle-sample marginal of `exact_truncated_law`, without the trivariate
/// quadratures.
pub fn exact_nyquist_law(
    p_watts: f64,
    pulse: &Pulse,
    ch: &ChannelParams,
    isi_half_width: usize,
) -> Result<[f64; 2]> {
    if !(p_watts >= 0.0) || !p_watts.is_finite() {
        return Err(Error::domain("power must be finite and nonnegative"));
    }
    let model = IsiModel::build(pulse, ch, isi_half_width)?;
    let a = p_watts.sqrt();
    let n_patterns: u64 = 1 << (2 * isi_half_width);
    let mut plus = 0.0;
    for eps in 0..n_patterns {
        let offs = model.offsets(eps);
        plus += 1.0 - q_function(offs[1] * a)?;
    }
    plus /= n_patterns as f64;
    Ok([plus, 1.0 - plus])
}

#[inline]
fn sign_plus(x: f64) -> bool {
    // Hard-limiter convention: nonnegative inputs map to +1.
    x >= 0.0
}

/// SplitMix64 stream derivation: deterministic, well-spread per-chunk seeds.
fn chunk_seed(base_seed: u64, counter: u64) -> u64 {
    let mut z = base_seed.wrapping_add(counter.wrapping_mul(0x9e3779b97f4a7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

const SIM_CHUNK: u64 = 1 << 15;

/// Draw `cfg.n` independent symbols-plus-ISI trials and tally the quantized
/// output patterns. Trials are partitioned into fixed chunks, each with its
/// own seed derived from (seed, chunk index), so the merged tallies do not
/// depend on the worker count or schedule.
pub fn simulate_triples(cfg: &SimConfig, p_watts: f64) -> Result<EmpiricalJoint> {
    if cfg.n < 1 {
        return Err(Error::domain("simulation requires n >= 1"));
    }
    if !(p_watts >= 0.0) || !p_watts.is_finite() {
        return Err(Error::domain("power must be finite and nonnegative"));
    }
    let model = IsiModel::build(&cfg.pulse, &cfg.ch, cfg.isi_half_width)?;
    let chol = TriangularFactor::new(double_rate_corr3())?;
    let a = p_watts.sqrt();

    let n_chunks = cfg.n.div_ceil(SIM_CHUNK);
    let tallies: Vec<[[u64; 8]; 2]> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(chunk_seed(cfg.seed, c));
            let trials = SIM_CHUNK.min(cfg.n - c * SIM_CHUNK);
            let mut counts = [[0u64; 8]; 2];
            for _ in 0..trials {
                let bits: u32 = rng.random();
                let x_plus = bits & 1 == 1;
                let mut mean = [0.0f64; 3];
                let x_sign = if x_plus { 1.0 } else { -1.0 };
                for i in 0..3 {
                    mean[i] = x_sign * model.base[i];
                }
                for (k, nb) in model.neighbors.iter().enumerate() {
                    let s = if bits >> (k + 1) & 1 == 1 { 1.0 } else { -1.0 };
                    for i in 0..3 {
                        mean[i] += s * nb[i];
                    }
                }
                let u1: f64 = StandardNormal.sample(&mut rng);
                let u2: f64 = StandardNormal.sample(&mut rng);
                let u3: f64 = StandardNormal.sample(&mut rng);
                let z = chol.apply(u1, u2, u3);
                let cell = match cfg.sampling {
                    Sampling::Double => {
                        let s = [
                            if sign_plus(a * mean[0] + z[0]) { 1i8 } else { -1 },
                            if sign_plus(a * mean[1] + z[1]) { 1 } else { -1 },
                            if sign_plus(a * mean[2] + z[2]) { 1 } else { -1 },
                        ];
                        Pattern::from_signs(s).index()
                    }
                    Sampling::Nyquist => usize::from(sign_plus(a * mean[1] + z[1])),
                };
                counts[usize::from(!x_plus)][cell] += 1;
            }
            counts
        })
        .collect();

    let mut counts = [[0u64; 8]; 2];
    for t in tallies {
        for r in 0..2 {
            for c in 0..8 {
                counts[r][c] += t[r][c];
            }
        }
    }
    Ok(EmpiricalJoint {
        counts,
        n: cfg.n,
        sampling: cfg.sampling,
    })
}

/// Plug-in mutual information (nats) of the empirical joint, with 0 log 0 = 0.
pub fn mi_plugin(j: &EmpiricalJoint) -> Result<f64> {
    Ok(mi_plugin_with_se(j)?.0)
}

/// Plug-in mutual information and its delta-method standard error
/// sqrt((E[L^2] - MI^2)/n) for L = log(p(x,s)/(p(x)p(s))).
pub fn mi_plugin_with_se(j: &EmpiricalJoint) -> Result<(f64, f64)> {
    if j.n < 1 {
        return Err(Error::domain("empirical joint is empty"));
    }
    let n = j.n as f64;
    let cells = j.pattern_cells();
    let mut row_marg = [0.0f64; 2];
    let mut col_marg = [0.0f64; 8];
    for r in 0..2 {
        for c in 0..cells {
            let p = j.counts[r][c] as f64 / n;
            row_marg[r] += p;
            col_marg[c] += p;
        }
    }
    let mut mi = 0.0;
    let mut second = 0.0;
    for r in 0..2 {
        for c in 0..cells {
            let p = j.counts[r][c] as f64 / n;
            if p > 0.0 {
                let l = (p / (row_marg[r] * col_marg[c])).ln();
                mi += p * l;
                second += p * l * l;
            }
        }
    }
    let var = (second - mi * mi).max(0.0);
    Ok((mi, (var / n).sqrt()))
}

/// Least-squares slope of a through-the-origin fit mi = s * P, with the
/// regression standard error of s.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SlopeFit {
    pub slope: RateSlope,
    pub std_error: f64,
}

/// Fit (P_i, mi_i) points through the origin. Requires at least two points
/// with distinct positive powers.
pub fn slope_estimate(points: &[(f64, f64)], n0: f64) -> Result<SlopeFit> {
    if points.len() < 2 {
        return Err(Error::domain("slope fit requires at least two points"));
    }
    if points.iter().any(|(p, _)| !(*p > 0.0) || !p.is_finite()) {
        return Err(Error::domain("slope fit requires positive finite powers"));
    }
    let first = points[0].0;
    if points.iter().all(|(p, _)| *p == first) {
        return Err(Error::domain("slope fit requires distinct powers"));
    }
    let spp: f64 = points.iter().map(|(p, _)| p * p).sum();
    let spy: f64 = points.iter().map(|(p, y)| p * y).sum();
    let slope = spy / spp;
    let ss_res: f64 = points
        .iter()
        .map(|(p, y)| {
            let r = y - slope * p;
            r * r
        })
        .sum();
    let std_error = (ss_res / ((points.len() - 1) as f64 * spp)).sqrt();
    Ok(SlopeFit {
        slope: RateSlope::from_value(slope, n0),
        std_error,
    })
}

/// Rate in nats per second carried by a law of the double-rate triple:
/// the symbol rate 2W times the per-symbol mutual information.
pub fn rate_per_second(law: &TripleLaw, ch: &ChannelParams, sampling: Sampling) -> f64 {
    let per_use = match sampling {
        Sampling::Double => law.mutual_information(),
        Sampling::Nyquist => law.mutual_information_nyquist(),
    };
    2.0 * ch.w * per_use
}
