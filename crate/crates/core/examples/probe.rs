use onebit_core::*;
use std::time::Instant;

fn main() {
    let ch = ChannelParams::new(1.0, 1.0, 1.0).unwrap();
    let pulse = Pulse::raised(1.4, 0.25, 1.0).unwrap();
    let tight = QuadratureSettings { abs_tol: 1e-11, rel_tol: 1e-9, max_subdivisions: 400 };
    let loose = QuadratureSettings { abs_tol: 5e-9, rel_tol: 1e-7, max_subdivisions: 400 };

    let t0 = Instant::now();
    let law_t = simulate::exact_truncated_law(1e-4, &pulse, &ch, 6, &tight).unwrap();
    let dt_t = t0.elapsed().as_secs_f64();
    let t0 = Instant::now();
    let law_l = simulate::exact_truncated_law(1e-4, &pulse, &ch, 6, &loose).unwrap();
    let dt_l = t0.elapsed().as_secs_f64();
    let mut worst = 0.0f64;
    for p in Pattern::all() {
        worst = worst.max((law_t.cond_plus(p) - law_l.cond_plus(p)).abs());
    }
    println!("J=6 tight {dt_t:.2}s loose {dt_l:.2}s, max mass diff {worst:.3e}");
    println!("mi tight {:.9e} loose {:.9e}", law_t.mutual_information(), law_l.mutual_information());

    // criterion-4 projection: J=8, full P grid, loose settings
    let t0 = Instant::now();
    let mut pts = Vec::new();
    for p_watts in [1e-5, 2e-5, 5e-5, 1e-4] {
        let law = simulate::exact_truncated_law(p_watts, &pulse, &ch, 8, &loose).unwrap();
        pts.push((p_watts, simulate::rate_per_second(&law, &ch, Sampling::Double)));
    }
    let fit = simulate::slope_estimate(&pts, ch.n0).unwrap();
    println!("criterion4: slope*N0 = {:.6} +- {:.2e}  ({:.1}s)", fit.slope.normalized, fit.std_error, t0.elapsed().as_secs_f64());
}
