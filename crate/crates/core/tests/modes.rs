use std::sync::Arc;

use approx::assert_relative_eq;
use pdc_core::decomposition::{schmidt_decompose, DEFAULT_TRUNCATION};
use pdc_core::dispersion::{PolarizationTriple, WaveguideGeometry};
use pdc_core::figures::hg_width_ratio;
use pdc_core::jsa::{build_jsa, FrequencyGrid, PumpSpec};
use pdc_core::material::MaterialModel;
use pdc_core::modes::*;
use pdc_core::phasematching::{sgvm_wavelength, ProcessSpec, DEFAULT_SGVM_BRACKET_UM};
use pdc_core::Error;
use proptest::prelude::*;

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn gaussian_overlap(w: f64, w2: f64) -> f64 {
    (2.0 * w * w2 / (w * w + w2 * w2)).sqrt()
}

fn hg(order: usize, width: f64, center: f64, x: &[f64]) -> ModeProfile {
    hg_profile(&HGParams { order, width, center }, x).unwrap()
}

#[test]
fn gaussian_fwhm_at_401_samples() {
    let sigma = 1.3;
    let x = axis(-8.0, 8.0, 401);
    let amp = x.iter().map(|v| (-v * v / (2.0 * sigma * sigma)).exp()).collect();
    let m = ModeProfile::new(x, amp, 0).unwrap();
    let exact = 2.0 * sigma * (2.0 * 2f64.ln()).sqrt();
    assert!((fwhm(&m).unwrap() / exact - 1.0).abs() < 5e-3);
}

#[test]
fn fwhm_scales_with_axis() {
    let x = axis(-5.0, 7.0, 301);
    let amp: Vec<f64> = x.iter().map(|v| (-(v - 0.3f64).powi(2) / 1.7).exp()).collect();
    let m = ModeProfile::new(x.clone(), amp.clone(), 0).unwrap();
    let doubled = ModeProfile::new(x.iter().map(|v| 2.0 * v).collect(), amp, 0).unwrap();
    assert_eq!(fwhm(&doubled).unwrap(), 2.0 * fwhm(&m).unwrap());
}

#[test]
fn two_lobed_mode_is_not_unimodal() {
    let m = hg(1, 1.0, 0.0, &axis(-10.0, 10.0, 401));
    assert!(matches!(fwhm(&m), Err(Error::NotUnimodal { regions: 2 })));
}

#[test]
fn overlap_basics() {
    let x = axis(-12.0, 12.0, 801);
    let g0 = hg(0, 1.0, 0.0, &x);
    let g1 = hg(1, 1.0, 0.0, &x);
    assert!((overlap(&g0, &g0).unwrap() - 1.0).abs() < 1e-12);
    assert!(overlap(&g0, &g1).unwrap() < 1e-10);
    let g2 = hg(2, 1.0, 0.0, &x);
    assert!(overlap(&g0, &g2).unwrap() < 1e-8);
}

#[test]
fn gaussian_overlap_closed_form() {
    let x = axis(-15.0, 15.0, 1501);
    for (ratio, fixture) in [(0.95, 0.99934), (0.8, 0.98773)] {
        let exact = gaussian_overlap(ratio, 1.0);
        assert!((exact - fixture).abs() < 1e-5);
        let sampled = overlap(&hg(0, ratio, 0.0, &x), &hg(0, 1.0, 0.0, &x)).unwrap();
        assert!((sampled - exact).abs() < 1e-8, "{ratio}: {sampled} vs {exact}");
        assert!((hg_overlap_model(0, ratio, 1.0, 0.0) - exact).abs() < 1e-8);
    }
    // A 25% width mismatch costs about 1.23% of overlap, not under 1%.
    let deficit = 1.0 - gaussian_overlap(0.8, 1.0);
    assert_relative_eq!(deficit, 0.01227, epsilon = 1e-4);
    assert!(deficit > 0.01);
}

#[test]
fn hg_profiles_are_normalised_with_parity() {
    let x = axis(-20.0, 24.0, 2201);
    for n in 0..=6 {
        let m = hg(n, 1.4, 2.0, &x);
        assert!((m.norm_squared() - 1.0).abs() < 1e-8, "{n}");
    }
    let x = axis(-10.0, 10.0, 1001);
    let m = hg(3, 1.0, 0.0, &x);
    for k in 0..500 {
        assert!((m.amplitude[500 + k] + m.amplitude[500 - k]).abs() < 1e-14);
    }
}

#[test]
fn narrow_axis_is_rejected() {
    assert!(matches!(
        hg_profile(&HGParams { order: 4, width: 1.0, center: 0.0 }, &axis(-5.0, 5.0, 101)),
        Err(Error::AxisTooNarrow { .. })
    ));
}

#[test]
fn hg_model_equal_widths_and_trend() {
    for n in 0..=8 {
        assert!((hg_overlap_model(n, 1.3, 1.3, 0.4) - 1.0).abs() < 1e-10);
    }
    let trend: Vec<f64> = (0..=5).map(|n| hg_overlap_model(n, hg_width_ratio(n), 1.0, 0.0)).collect();
    assert!(trend.windows(2).all(|w| w[1] < w[0]), "{trend:?}");
}

proptest! {
    #[test]
    fn quadrature_agrees_with_sampling(n in 0usize..=8, ratio in 0.5f64..2.0, x0 in -3.0f64..3.0) {
        let (w, w2): (f64, f64) = (1.0, ratio);
        let reach = ((2 * n + 1) as f64).sqrt() * w.max(w2) + 12.0 * w.max(w2);
        let x = axis(x0 - reach, x0 + reach, 4001);
        let sampled = overlap(&hg(n, w, x0, &x), &hg(n, w2, x0, &x)).unwrap();
        let model = hg_overlap_model(n, w, w2, x0);
        prop_assert!((sampled - model).abs() < 1e-8, "{} vs {}", sampled, model);
    }

    #[test]
    fn hg_model_is_symmetric(n in 0usize..=8, w in 0.3f64..3.0, w2 in 0.3f64..3.0) {
        prop_assert!((hg_overlap_model(n, w, w2, 0.0) - hg_overlap_model(n, w2, w, 0.0)).abs() < 1e-12);
    }

    #[test]
    fn overlap_is_symmetric_and_scale_invariant(
        a in prop::collection::vec(-1.0f64..1.0, 40),
        b in prop::collection::vec(-1.0f64..1.0, 40),
        c in prop_oneof![-50.0f64..-0.01, 0.01f64..50.0],
    ) {
        prop_assume!(a.iter().any(|v| v.abs() > 1e-3) && b.iter().any(|v| v.abs() > 1e-3));
        let x = axis(0.0, 3.9, 40);
        let pa = ModeProfile::new(x.clone(), a.clone(), 0).unwrap();
        let pb = ModeProfile::new(x.clone(), b, 0).unwrap();
        let ab = overlap(&pa, &pb).unwrap();
        prop_assert_eq!(ab, overlap(&pb, &pa).unwrap());
        prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
        let scaled = ModeProfile::new(x, a.iter().map(|v| c * v).collect(), 0).unwrap();
        prop_assert!((overlap(&scaled, &pb).unwrap() - ab).abs() < 1e-12);
    }
}

#[test]
fn zero_profile_is_rejected() {
    let x = axis(0.0, 1.0, 11);
    let z = ModeProfile::new(x.clone(), vec![0.0; 11], 0).unwrap();
    let o = ModeProfile::new(x, vec![1.0; 11], 0).unwrap();
    assert!(matches!(overlap(&z, &o), Err(Error::ZeroNorm)));
}

#[test]
fn ktp_overlaps_fall_with_mode_order() {
    let m = Arc::new(MaterialModel::ktp());
    let g = WaveguideGeometry::square(9.0, 10.0);
    let pol = PolarizationTriple::ktp_type2();
    let l = sgvm_wavelength(&m, &g, 20.0, pol, DEFAULT_SGVM_BRACKET_UM).unwrap();
    let spec = ProcessSpec::new(m, g, 20.0, pol, 0.5 * l).phasematched().unwrap();
    let pump = PumpSpec::new(spec.pump_wavelength_um, 4.0);
    let grid = FrequencyGrid::auto(&spec, &pump, 401).unwrap();
    let dec = schmidt_decompose(&build_jsa(&spec, &pump, &grid).unwrap(), DEFAULT_TRUNCATION).unwrap();
    assert!(dec.num_retained >= 4);
    let o: Vec<f64> = (0..dec.num_retained)
        .map(|k| overlap(&ModeProfile::signal(&dec, k).unwrap(), &ModeProfile::idler(&dec, k).unwrap()).unwrap())
        .collect();
    assert!(o.windows(2).all(|w| w[1] < w[0]), "{o:?}");
    assert!(o[0] > 0.999);

    let h0 = ModeProfile::signal(&dec, 0).unwrap();
    assert!((h0.norm_squared() - 1.0).abs() < 1e-8);
    let nm = fwhm_nm(&h0).unwrap();
    assert!(nm > 1.0 && nm < 20.0, "{nm}");
}
