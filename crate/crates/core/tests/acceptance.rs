//! Acceptance suite. Each test prints one `criterion N: PASS|FAIL` line with
//! the measured values and the pinned tolerance, then asserts.
//!
//! Run with `cargo test -p mla-nearfield --test acceptance -- --nocapture`
//! to see the report lines.

use mla_nearfield::design::{design_num_arrays, peaks_in_beamwidth, DesignInput, PeakCriteria};
use mla_nearfield::experiments::{run_localization_experiment, run_se_sweep, Sweep, TrialConfig, TrialStatus};
use mla_nearfield::field::{
    crossrange_gain, first_null_after_focus, gain_mla_fresnel, gain_ula_fresnel, ripple_metrics,
    ExactGain, FocalSpec, TxPoint, DEFAULT_NULL_THRESHOLD,
};
use mla_nearfield::numerics::{fresnel_integrals, QuadratureRule};
use mla_nearfield::{ApertureConvention, CarrierSpec, MlaSpec};
use std::f64::consts::PI;

const CONVENTIONS: [ApertureConvention; 2] = [ApertureConvention::SubarrayLengths, ApertureConvention::ElementExtent];

const C1_TOL: f64 = 0.03;
const C2_FRACTION: f64 = 0.64;
const C2_TOL: f64 = 0.005;
const C3_MIN_PEAKS: usize = 9;
const C4_N1_TARGET: usize = 62;
const C4_N1_TOL: usize = 2;
const C5_TOL: f64 = 1e-9;
const C6_FOCAL_TOL: f64 = 1e-6;
const C6_ENVELOPE_TOL: f64 = 0.01;
const C6_DEGENERATE_TOL: f64 = 1e-9;
const C7_TRIALS: usize = 500;
const C8_SE_REL_TOL: f64 = 0.05;
const C8_MIN_COST_RATIO: f64 = 100.0;
const C9_TARGET: f64 = 2.74;
const C9_TOL: f64 = 0.05;
const C10_FRESNEL_TOL: f64 = 1e-9;
const C10_DOUBLING_TOL: f64 = 1e-8;

fn wavelength_002() -> CarrierSpec {
    CarrierSpec::from_wavelength(0.02).unwrap()
}

fn report(id: &str, pass: bool, detail: String) {
    println!("criterion {id}: {} {detail}", if pass { "PASS" } else { "FAIL" });
}

fn depth_grid() -> Vec<f64> {
    (0..200).map(|i| 10.0 + 90.0 * i as f64 / 199.0).collect()
}

fn max_exact_vs_fresnel(mla: &MlaSpec, order: usize) -> (f64, Vec<f64>) {
    let carrier = wavelength_002();
    let focal = FocalSpec::new(30.0).unwrap();
    let exact = ExactGain::new(mla, &focal, &carrier, QuadratureRule::gauss_legendre(order).unwrap());
    let mut worst: f64 = 0.0;
    let mut gains = Vec::new();
    for z in depth_grid() {
        let g = exact.gain(&TxPoint::on_axis(z).unwrap());
        worst = worst.max((g - gain_mla_fresnel(mla, &focal, z, &carrier)).abs());
        gains.push(g);
    }
    (worst, gains)
}

#[test]
fn criterion_01_fresnel_fidelity() {
    let mut pass = true;
    let mut detail = Vec::new();
    for conv in CONVENTIONS {
        let mla = MlaSpec::from_aperture(2, 64, 0.01, 2.0, conv).unwrap();
        let (worst, _) = max_exact_vs_fresnel(&mla, 8);
        pass &= worst <= C1_TOL;
        detail.push(format!("{}: max|diff|={worst:.3e}", conv.name()));
    }
    report("1", pass, format!("{} (tol {C1_TOL})", detail.join(", ")));
    assert!(pass);
}

#[test]
fn criterion_02_single_peak() {
    let carrier = wavelength_002();
    let focal = FocalSpec::new(30.0).unwrap();
    let mut pass = true;
    let mut detail = Vec::new();
    for conv in CONVENTIONS {
        let mla = MlaSpec::from_aperture(2, 64, 0.01, 2.0, conv).unwrap();
        let count = peaks_in_beamwidth(&mla, &focal, &carrier, 300, &PeakCriteria::default());
        let r = ripple_metrics(64, 0.01, mla.delta_bar(), 2.0, &carrier);
        pass &= count == 1 && (r.ula_fraction - C2_FRACTION).abs() <= C2_TOL;
        detail.push(format!("{}: peaks={count} ula_fraction={:.4}", conv.name(), r.ula_fraction));
    }
    report("2", pass, format!("{} (target {C2_FRACTION}±{C2_TOL})", detail.join(", ")));
    assert!(pass);
}

#[test]
fn criterion_03_ripple_regime() {
    let carrier = wavelength_002();
    let focal = FocalSpec::new(30.0).unwrap();
    let mut pass = true;
    let mut detail = Vec::new();
    for conv in CONVENTIONS {
        let mla = MlaSpec::from_aperture(2, 16, 0.01, 2.0, conv).unwrap();
        let count = peaks_in_beamwidth(&mla, &focal, &carrier, 300, &PeakCriteria::default());
        let r = ripple_metrics(16, 0.01, mla.delta_bar(), 2.0, &carrier);
        pass &= count >= C3_MIN_PEAKS && count == r.predicted_peak_count;
        detail.push(format!(
            "{}: counted={count} formula={} (lower bound {C3_MIN_PEAKS})",
            conv.name(),
            r.predicted_peak_count
        ));
    }
    report("3", pass, detail.join(", "));
    assert!(pass);
}

#[test]
fn criterion_04_design_endpoints() {
    let ns = [1, 2, 4, 8, 16, 32, 64];
    let mut pass = true;
    let mut detail = Vec::new();
    for conv in CONVENTIONS {
        let ls: Vec<usize> = ns
            .iter()
            .map(|&n| {
                let mut input = DesignInput::new(2.0, 30.0, n, wavelength_002());
                input.convention = conv;
                design_num_arrays(&input).unwrap().subarrays
            })
            .collect();
        let monotone = ls.windows(2).all(|w| w[0] >= w[1]);
        if conv == ApertureConvention::default() {
            pass &= ls[6] == 2 && ls[0].abs_diff(C4_N1_TARGET) <= C4_N1_TOL && monotone;
        } else {
            pass &= ls[6] == 2 && monotone;
        }
        detail.push(format!("{}: L={ls:?}", conv.name()));
    }
    report("4", pass, format!("{} (N=64→2 and non-increasing for both; N=1→{C4_N1_TARGET}±{C4_N1_TOL} for the default)", detail.join(", ")));
    assert!(pass);
}

#[test]
fn criterion_05_fraunhofer_metrics() {
    let carrier = wavelength_002();
    let mla = MlaSpec::from_aperture(4, 36, 0.01, 2.0, ApertureConvention::ElementExtent).unwrap();
    let m = mla.metrics(&carrier);
    let pass = (m.fraunhofer_mla - 400.0).abs() <= C5_TOL && (m.fraunhofer_ula - 12.96).abs() <= C5_TOL;
    let other = MlaSpec::from_aperture(4, 36, 0.01, 2.0, ApertureConvention::SubarrayLengths)
        .unwrap()
        .metrics(&carrier);
    report(
        "5",
        pass,
        format!(
            "element_extent: mla={:.9} ula={:.9}; subarray_lengths layout: mla={:.6} ula={:.6} (tol {C5_TOL:e})",
            m.fraunhofer_mla, m.fraunhofer_ula, other.fraunhofer_mla, other.fraunhofer_ula
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_06_closed_form_sanity() {
    let carrier = wavelength_002();
    let f = 30.0;
    let focal = FocalSpec::new(f).unwrap();

    let mut focal_dev: f64 = 0.0;
    for eps in [1e-4, 1e-6, 1e-8] {
        for z in [f * (1.0 - eps), f * (1.0 + eps)] {
            focal_dev = focal_dev.max((gain_ula_fresnel(64, 0.01, &focal, z, &carrier) - 1.0).abs());
        }
    }

    let n = 64;
    let mla = MlaSpec::from_aperture(2, n, 0.01, 2.0, ApertureConvention::default()).unwrap();
    let x = 0.885 * f / n as f64;
    let env = [
        crossrange_gain(&mla, &focal, x, &carrier).envelope,
        crossrange_gain(&mla, &focal, -x, &carrier).envelope,
    ];
    let env_dev = env.iter().map(|e| (e - 0.5).abs()).fold(0.0, f64::max);

    let mut degenerate: f64 = 0.0;
    for (l, n) in [(2, 16), (4, 16), (3, 9)] {
        let mla = MlaSpec::new(l, n, 0.01, 0.01).unwrap();
        for z in depth_grid() {
            let a = gain_mla_fresnel(&mla, &focal, z, &carrier);
            let b = gain_ula_fresnel(l * n, 0.01, &focal, z, &carrier);
            degenerate = degenerate.max((a - b).abs());
        }
    }

    let pass = focal_dev <= C6_FOCAL_TOL && env_dev <= C6_ENVELOPE_TOL && degenerate <= C6_DEGENERATE_TOL;
    report(
        "6",
        pass,
        format!(
            "|G(z→F)−1|={focal_dev:.2e} (tol {C6_FOCAL_TOL:e}), envelope(±0.885F/N)={:.4}/{:.4} (tol {C6_ENVELOPE_TOL}), \
             Δ=δ identity={degenerate:.2e} (tol {C6_DEGENERATE_TOL:e})",
            env[0], env[1]
        ),
    );
    assert!(pass);
}

fn localization_config() -> TrialConfig {
    TrialConfig {
        trials: C7_TRIALS,
        baseline_trials: Some(0),
        ..TrialConfig::default()
    }
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
}

fn inversions(v: &[f64]) -> usize {
    v.windows(2).filter(|w| w[1] > w[0]).count()
}

#[test]
fn criterion_07a_nmse_vs_antennas() {
    let cfg = TrialConfig {
        sweep: Sweep::Antennas(vec![4, 8, 16, 32]),
        ..localization_config()
    };
    let out = run_localization_experiment(&cfg, None).unwrap();
    let nmse: Vec<f64> = out.summaries.iter().map(|s| s.nmse_proposed).collect();
    let excluded: usize = out.summaries.iter().map(|s| s.excluded).sum();
    let pass = inversions(&nmse) <= 1;
    report(
        "7a",
        pass,
        format!("NMSE over N={{4,8,16,32}}: [{}], inversions={} (max 1), excluded={excluded}", fmt_list(&nmse), inversions(&nmse)),
    );
    assert!(pass);
}

#[test]
fn criterion_07b_nmse_vs_subarrays() {
    let cfg = TrialConfig {
        sweep: Sweep::Subarrays(vec![2, 4, 8]),
        ..localization_config()
    };
    let out = run_localization_experiment(&cfg, None).unwrap();
    let nmse: Vec<f64> = out.summaries.iter().map(|s| s.nmse_proposed).collect();
    let excluded: usize = out.summaries.iter().map(|s| s.excluded).sum();
    let pass = inversions(&nmse) == 0;
    report(
        "7b",
        pass,
        format!("NMSE over L={{2,4,8}} at N=16: [{}], inversions={} (max 0), excluded={excluded}", fmt_list(&nmse), inversions(&nmse)),
    );
    assert!(pass);
}

#[test]
fn criterion_07c_noiseless_floor() {
    let cfg = TrialConfig {
        noise: 0.0,
        ..localization_config()
    };
    let out = run_localization_experiment(&cfg, None).unwrap();
    let s = &out.summaries[0];
    let mla = MlaSpec::from_aperture(cfg.subarrays, cfg.antennas, cfg.delta, cfg.aperture, cfg.convention).unwrap();
    let centers = mla.subarray_centers();
    let baseline = centers[centers.len() - 1] - centers[0];
    let eps = cfg.angle_step;
    let d_max = cfg.distance.1;
    let sin_min = (PI / 2.0 - cfg.angle_deg.1.to_radians()).sin();
    let floor = (2.0 * eps * d_max / (baseline * sin_min)).powi(2) + eps * eps;
    let pass = s.excluded == 0 && s.nmse_proposed <= floor;
    report(
        "7c",
        pass,
        format!("noiseless NMSE={:.3e} <= floor {floor:.3e}, excluded={}", s.nmse_proposed, s.excluded),
    );
    assert!(pass);
}

#[test]
fn criterion_08_spectral_efficiency() {
    let cfg = TrialConfig {
        trials: C7_TRIALS,
        baseline_trials: Some(2),
        sweep: Sweep::PowerDbm(vec![20.0]),
        ..TrialConfig::default()
    };
    let out = run_se_sweep(&cfg, None).unwrap();
    let s = &out.summaries[0];
    let rel = (s.mean_se_perfect - s.mean_se_proposed).abs() / s.mean_se_perfect;
    let ok: Vec<_> = out.records.iter().filter(|r| r.status == TrialStatus::Ok).collect();
    let pointwise = ok.iter().all(|r| r.se_proposed <= r.se_perfect + 1e-12);
    let ratio = s.cost_ratio();
    let pass = rel <= C8_SE_REL_TOL && pointwise && ratio >= C8_MIN_COST_RATIO;
    report(
        "8",
        pass,
        format!(
            "mean SE proposed={:.4} perfect={:.4} rel gap={rel:.2e} (tol {C8_SE_REL_TOL}); pointwise≤ {pointwise}; \
             2D/1D cost={ratio:.1} (min {C8_MIN_COST_RATIO}); 2D mean SE over {} trials={:.4}; excluded={}",
            s.mean_se_proposed, s.mean_se_perfect, s.baseline_trials, s.mean_se_2d, s.excluded
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_09_multi_focus_chain() {
    let carrier = wavelength_002();
    let mla = MlaSpec::from_aperture(4, 16, 0.01, 1.0, ApertureConvention::default()).unwrap();
    let mut foci = vec![2.0];
    while foci.len() < 4 {
        let focal = FocalSpec::new(*foci.last().unwrap()).unwrap();
        foci.push(first_null_after_focus(&mla, &focal, &carrier, DEFAULT_NULL_THRESHOLD).unwrap());
    }
    let pass = (foci[1] - C9_TARGET).abs() <= C9_TOL;
    let alt = MlaSpec::from_aperture(4, 16, 0.01, 1.0, ApertureConvention::ElementExtent).unwrap();
    let alt_second =
        first_null_after_focus(&alt, &FocalSpec::new(2.0).unwrap(), &carrier, DEFAULT_NULL_THRESHOLD).unwrap();
    report(
        "9",
        pass,
        format!(
            "foci={foci:.4?} second={:.4} (target {C9_TARGET}±{C9_TOL}); element_extent second={alt_second:.4}",
            foci[1]
        ),
    );
    assert!(pass);
}

fn simpson_fresnel(u: f64) -> (f64, f64) {
    let m = 200_000;
    let h = u / m as f64;
    let (mut c, mut s) = (0.0, 0.0);
    for i in 0..=m {
        let t = i as f64 * h;
        let w = if i == 0 || i == m {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let arg = PI * t * t / 2.0;
        c += w * arg.cos();
        s += w * arg.sin();
    }
    (c * h / 3.0, s * h / 3.0)
}

#[test]
fn criterion_10_numerics() {
    let f = fresnel_integrals(1.0);
    let (c_ref, s_ref) = simpson_fresnel(1.0);
    let fresnel_dev = (f.c - c_ref).abs().max((f.s - s_ref).abs());
    let pinned_dev = (f.c - 0.7798934).abs().max((f.s - 0.4382591).abs());

    let mla = MlaSpec::from_aperture(2, 64, 0.01, 2.0, ApertureConvention::default()).unwrap();
    let (_, g8) = max_exact_vs_fresnel(&mla, 8);
    let (_, g16) = max_exact_vs_fresnel(&mla, 16);
    let doubling = g8.iter().zip(&g16).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    let pass = fresnel_dev <= C10_FRESNEL_TOL && pinned_dev < 5e-8 && doubling < C10_DOUBLING_TOL;
    report(
        "10",
        pass,
        format!(
            "C(1)={:.10} S(1)={:.10} vs Simpson dev={fresnel_dev:.2e} (tol {C10_FRESNEL_TOL:e}); \
             order 8→16 max gain change={doubling:.2e} (tol {C10_DOUBLING_TOL:e})",
            f.c, f.s
        ),
    );
    assert!(pass);
}
