use majorana_core::readout::*;
use nalgebra::Matrix2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params(g: f64, dw: f64, dp: f64) -> ReadoutParams {
    ReadoutParams {
        cavity_freq: 7.0,
        qubit_freq: 7.0 + dw,
        coupling: g,
        delta_plus: dp,
        delta_minus: 0.3 * dp,
        offset_charge: 0.0,
        kappa: 0.01,
    }
}

fn brute_force(p: &ReadoutParams, n: u32, parity: i8) -> (f64, f64) {
    let pf = parity as f64;
    let nf = n as f64;
    let up = nf * p.cavity_freq + pf * (p.delta_minus + p.delta_plus) + 0.5 * p.qubit_freq;
    let down = (nf + 1.0) * p.cavity_freq + pf * (p.delta_minus - p.delta_plus) - 0.5 * p.qubit_freq;
    let off = p.coupling * (nf + 1.0).sqrt();
    let m = Matrix2::new(up, off, off, down);
    let ev = m.symmetric_eigen().eigenvalues;
    (ev.max(), ev.min())
}

#[test]
fn jc_formula_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let p = params(rng.random_range(0.0..0.5), rng.random_range(-2.0..2.0), rng.random_range(0.0..0.2));
        let n = rng.random_range(0..20);
        for parity in [1, -1] {
            let (hi, lo) = jc_eigenvalues(&p, n, parity).unwrap();
            let (bh, bl) = brute_force(&p, n, parity);
            let scale = 1.0 + hi.abs();
            assert!((hi - bh).abs() < 1e-12 * scale && (lo - bl).abs() < 1e-12 * scale);
        }
    }
}

#[test]
fn jc_rejects_offset_charge() {
    let p = ReadoutParams { offset_charge: 0.1, ..params(0.1, 1.0, 0.01) };
    assert!(jc_eigenvalues(&p, 0, 1).is_err());
    assert!(jc_eigenvalues(&params(0.1, 1.0, 0.01), 0, 0).is_err());
}

#[test]
fn first_order_levels_match_to_fourth_order() {
    for g in [0.02, 0.04, 0.08] {
        let p = params(g, 1.0, 0.01);
        for n in 0..5 {
            for parity in [1, -1] {
                let (hi, lo) = jc_eigenvalues(&p, n, parity).unwrap();
                let (up, down) = dispersive_levels(&p, n, parity).unwrap();
                let d = p.detuning() + 2.0 * parity as f64 * p.delta_plus;
                let bound = 2.0 * (g * g * (n as f64 + 1.0)).powi(2) / d.abs().powi(3);
                assert!((hi - up).abs() <= bound && (lo - down).abs() <= bound);
            }
        }
    }
}

#[test]
fn dispersive_frequency_tracks_exact_spectrum() {
    let dw = 1.0;
    let p = params(0.1 * dw, dw, 0.02);
    for parity in [1, -1] {
        let w = dispersive_frequency(&p, parity).unwrap();
        assert!(w.dispersive);
        let exact = exact_cavity_frequency(&p, parity).unwrap();
        assert!(((w.frequency - exact) / exact).abs() < 0.02);
    }
    assert!(!dispersive_frequency(&params(0.5, 1.0, 0.0), 1).unwrap().dispersive);
}

#[test]
fn dispersive_error_scales_as_coupling_squared() {
    let dw = 1.0;
    let (mut xs, mut ys) = (vec![], vec![]);
    for k in 0..8 {
        let g = 0.01 * 1.5f64.powi(k);
        let p = params(g, dw, 0.02);
        let exact = exact_cavity_frequency(&p, 1).unwrap() - p.cavity_freq;
        let approx = dispersive_frequency(&p, 1).unwrap().frequency - p.cavity_freq;
        xs.push((g / dw).ln());
        ys.push(((approx - exact) / exact).abs().ln());
    }
    let slope = fit_slope(&xs, &ys);
    assert!((slope - 2.0).abs() < 0.2, "slope {slope}");
}

fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[test]
fn shift_limits() {
    let p = params(0.1, 1.0, 0.0);
    assert_eq!(frequency_shift(&p).unwrap(), 0.0);
    let w = |p: &ReadoutParams, s| dispersive_frequency(p, s).unwrap().frequency;
    assert_eq!(w(&p, 1), w(&p, -1));
    let small = 1e-7;
    let p = params(0.1, 1.0, small);
    let slope = frequency_shift(&p).unwrap() / small;
    assert!((slope - 4.0 * 0.01 / 1.0).abs() < 1e-9);
    let p = params(0.1, 1.0, 0.03);
    assert!((w(&p, 1) - w(&p, -1) - frequency_shift(&p).unwrap()).abs() < 1e-15);
    assert!(frequency_shift(&params(0.1, 1.0, 0.5)).is_err());
}

#[test]
fn shift_exceeds_linewidth_at_device_scale() {
    // g = 100 MHz, Δ_+ = 1 GHz, κ = 10 MHz.
    let window: Vec<f64> = (1..400)
        .map(|k| 0.05 * k as f64)
        .filter(|&dw| {
            let p = ReadoutParams { kappa: 0.01, ..params(0.1, dw, 1.0) };
            p.is_dispersive(0) && frequency_shift(&p).is_ok_and(|s| s.abs() > p.kappa)
        })
        .collect();
    assert!(!window.is_empty());
}

#[test]
fn measurement_error_closed_form() {
    for xb in [1.5, 2.0, 2.5, 3.0] {
        let lm: f64 = 400.0;
        let lp = (lm.sqrt() + xb * 2f64.sqrt()).powi(2);
        let m = PhotonCountModel::from_rates(lp, lm).unwrap();
        assert!((m.separation() - xb).abs() < 1e-12);
        let e = measurement_error(&m).unwrap();
        let numeric = overlap_integral(xb);
        assert!((e.exact - numeric).abs() < 1e-9, "{} vs {numeric}", e.exact);
        let closed = e.asymptotic.unwrap();
        assert!(((numeric - closed) / closed).abs() < 0.15, "x̄ = {xb}: {closed} vs {numeric}");
        if xb == 2.0 {
            let want = (-4.0f64).exp() / (4.0 * std::f64::consts::PI.sqrt());
            assert!((closed - want).abs() < 1e-15);
        }
    }
}

// ∫_x̄^∞ e^{-t²} dt / √π by Simpson's rule.
fn overlap_integral(xb: f64) -> f64 {
    let (a, b, n) = (xb, xb + 12.0, 20_000);
    let h = (b - a) / n as f64;
    let f = |t: f64| (-t * t).exp();
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0 / std::f64::consts::PI.sqrt()
}

#[test]
fn measurement_error_degenerate_and_small_rates() {
    let e = measurement_error(&PhotonCountModel::from_rates(3.0, 3.0).unwrap()).unwrap();
    assert!(e.degenerate && e.exact == 0.5);
    assert!(!measurement_error(&PhotonCountModel::from_rates(8.0, 2.0).unwrap()).unwrap().gaussian_valid);
    assert!(PhotonCountModel::from_rates(1.0, 2.0).is_err());
    assert!(PhotonCountModel::from_rates(-1.0, 0.0).is_err());
}

#[test]
fn poisson_sampling_matches_overlap() {
    let m = PhotonCountModel::from_rates(100.0, 49.0).unwrap();
    let e = measurement_error(&m).unwrap().exact;
    let mut rng = ChaCha8Rng::seed_from_u64(2718);
    let draws = 1_000_000u64;
    let mut wrong = 0u64;
    for k in 0..draws {
        let parity = if k % 2 == 0 { 1 } else { -1 };
        let (outcome, _) = simulate_readout(parity, &m, &mut rng).unwrap();
        wrong += (outcome != parity) as u64;
    }
    let rate = wrong as f64 / draws as f64;
    let sigma = (e * (1.0 - e) / draws as f64).sqrt();
    println!("sampled {rate:.5}, Gaussian overlap {e:.5}, Poisson {:.5}", poisson_misassignment(&m));
    assert!((rate - e).abs() < 3.0 * sigma, "{rate} vs {e} ± {sigma}");
}

#[test]
fn well_separated_rates_rarely_misassign() {
    let m = PhotonCountModel::from_rates(1e4, 10.0).unwrap();
    assert!(poisson_misassignment(&m) < 1e-6);
    assert!(measurement_error(&m).unwrap().exact < 1e-6);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    assert!((0..100_000).all(|k| {
        let parity = if k % 2 == 0 { 1 } else { -1 };
        simulate_readout(parity, &m, &mut rng).unwrap().0 == parity
    }));
}

#[test]
fn sampling_is_seeded_and_unbiased() {
    let m = PhotonCountModel::from_rates(30.0, 5.0).unwrap();
    let counts = |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..50).map(|_| simulate_readout(1, &m, &mut rng).unwrap().1).collect::<Vec<_>>()
    };
    assert_eq!(counts(9), counts(9));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for parity in [1i8, -1] {
        let n = 200_000;
        let mean = (0..n).map(|_| simulate_readout(parity, &m, &mut rng).unwrap().1 as f64).sum::<f64>() / n as f64;
        let lambda = m.rate(parity);
        assert!((mean - lambda).abs() < 4.0 * (lambda / n as f64).sqrt());
    }
}

#[test]
fn error_falls_with_measurement_time() {
    let errs: Vec<f64> = (1..40)
        .map(|k| {
            let m = PhotonCountModel::from_transmissions(0.9, 0.3, 10.0, 0.5 * k as f64).unwrap();
            measurement_error(&m).unwrap().exact
        })
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn storage_tradeoff_has_interior_minimum() {
    let ts: Vec<f64> = (1..400).map(|k| 0.05 * k as f64).collect();
    let cost: Vec<f64> = ts.iter().map(|&t| storage_tradeoff(9.0, 3.0, 1e-3, t).unwrap()).collect();
    let (imin, _) = cost.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    assert!(imin > 0 && imin < ts.len() - 1, "minimum at edge {imin}");
}

#[test]
fn lorentzian_transmissions() {
    let p = params(0.1, 1.0, 0.02);
    let m = PhotonCountModel::lorentzian(&p, 1000.0).unwrap();
    assert_eq!(m.t_plus, 1.0);
    assert!(m.t_minus < 1.0 && m.t_minus > 0.0);
    assert!((m.lambda_plus - p.kappa * 1000.0).abs() < 1e-12);
}
