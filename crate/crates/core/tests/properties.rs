use cavity_core::constants::{cavity_fundamental, pec_casimir_energy};
use cavity_core::*;

fn lossless_pec(length: f64, g_rel: f64) -> CavityConfig {
    let w0 = cavity_fundamental(length);
    CavityConfig::pec(
        length,
        DielectricModel::Lorentz(LorentzMedium::lossless(w0, g_rel * w0)),
    )
    .unwrap()
}

#[test]
fn screening_bound_on_g_grid() {
    let l = 100e-9;
    let w0 = cavity_fundamental(l);
    let spec = QuadratureSpec::default();
    let u0 = casimir_energy_t0(&lossless_pec(l, 0.0), &spec)
        .unwrap()
        .u_per_area
        .abs();
    let mut prev = u0;
    for k in 0..20 {
        let g = 3.0 * w0 * k as f64 / 19.0;
        let u = casimir_energy_t0(&lossless_pec(l, g / w0), &spec)
            .unwrap()
            .u_per_area
            .abs();
        let ssa = ssa_energy(&SsaInput::new(l, w0, g)).unwrap().abs();
        assert!(u <= prev * (1.0 + 1e-12), "g = {g:e}");
        assert!(
            ssa <= u * (1.0 + 1e-9) && u <= u0 * (1.0 + 1e-12),
            "g = {g:e}"
        );
        prev = u;
    }
}

#[test]
fn matsubara_error_shrinks_as_temperature_falls() {
    // At 100 nm the thermal correction sits below quadrature noise; 10 um
    // resolves it.
    let cfg = CavityConfig::pec(10e-6, DielectricModel::vacuum()).unwrap();
    let spec = QuadratureSpec::default();
    let u0 = casimir_energy_t0(&cfg, &spec).unwrap().u_per_area;
    let errs: Vec<f64> = [10.0, 3.0, 1.0]
        .iter()
        .map(|&t| {
            let f = free_energy_t(&cfg.with_temperature(t), &spec)
                .unwrap()
                .u_per_area;
            ((f - u0) / u0).abs()
        })
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    assert!(errs[2] < 1e-3, "{errs:?}");
}

#[test]
fn bit_identical_across_thread_counts() {
    let cfg = CavityConfig::new(
        1e-6,
        DielectricModel::Lorentz(LorentzMedium::new(2e15, 1e14, 1e15, 1.77).unwrap()),
        MirrorStack::film_on_substrate(
            DielectricModel::Drude(DrudeMetal::gold()),
            30e-9,
            DielectricModel::constant(2.1),
        )
        .unwrap(),
        MirrorStack::pec(),
        300.0,
    )
    .unwrap();
    let spec = QuadratureSpec::default();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let f = free_energy_t(&cfg, &spec).unwrap();
            let u = casimir_energy_t0(&cfg.with_temperature(0.0), &spec).unwrap();
            (
                f.u_per_area.to_bits(),
                f.matsubara_terms_used,
                u.u_per_area.to_bits(),
            )
        })
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(8));
}

#[test]
fn low_frequency_weight_limits() {
    let cfg = CavityConfig::pec(100e-9, DielectricModel::vacuum()).unwrap();
    let spec = QuadratureSpec::default();
    assert_eq!(low_frequency_weight(&cfg, 0.0, &spec).unwrap(), 0.0);
    assert_eq!(
        low_frequency_weight(&cfg, f64::INFINITY, &spec).unwrap(),
        1.0
    );
    let w = low_frequency_weight(&cfg, 1e3 * cavity_fundamental(100e-9), &spec).unwrap();
    assert!((w - 1.0).abs() < 1e-8);
    assert!(low_frequency_weight(&cfg, -1.0, &spec).is_err());
}

fn sign_changes(cfg: &CavityConfig, lo: f64, hi: f64, n: usize, eta: f64) -> Vec<(f64, f64)> {
    (0..=n)
        .map(|k| {
            let w = lo + (hi - lo) * k as f64 / n as f64;
            (w, integrand_omega(cfg, w, eta).unwrap())
        })
        .collect()
}

#[test]
fn omega_integrand_changes_sign_at_cavity_modes() {
    let l = 100e-9;
    let wl = cavity_fundamental(l);
    let cfg = CavityConfig::pec(l, DielectricModel::vacuum()).unwrap();
    let v = sign_changes(&cfg, 0.1 * wl, 3.4 * wl, 660, 0.01 * wl);
    let flips: Vec<f64> = v
        .windows(2)
        .filter(|p| p[0].1.signum() != p[1].1.signum())
        .map(|p| p[1].0 / wl)
        .collect();
    for n in 1..=3 {
        assert!(
            flips.iter().any(|&x| (x - n as f64).abs() < 0.05),
            "no sign change near mode {n}: {flips:?}"
        );
    }
}

#[test]
fn omega_integrand_is_quiet_inside_polariton_gap() {
    let l = 100e-9;
    let w0 = cavity_fundamental(l);
    let g = 0.5 * w0;
    let medium = LorentzMedium::new(w0, 0.005 * w0, g, 1.0).unwrap();
    let cfg = CavityConfig::pec(l, DielectricModel::Lorentz(medium)).unwrap();
    let top = polariton_gap(w0, g) + w0;
    let scan = sign_changes(&cfg, 0.2 * w0, 3.0 * w0, 560, 0.002 * w0);
    let scale = scan.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
    // Inside the gap ε < 0 and the medium is opaque; what is left is at the
    // level of rounding, so only resolvable values count.
    let inside: Vec<f64> = scan
        .iter()
        .filter(|p| p.0 > w0 && p.0 < top && p.1.abs() > 1e-6 * scale)
        .map(|p| p.1)
        .collect();
    assert!(
        inside.windows(2).all(|p| p[0].signum() == p[1].signum()),
        "{inside:?}"
    );
}

#[test]
fn energy_result_json_round_trip() {
    let cfg = CavityConfig::pec(200e-9, DielectricModel::vacuum()).unwrap();
    let spec = QuadratureSpec {
        record_samples: true,
        ..QuadratureSpec::default()
    };
    let r = casimir_energy_t0(&cfg, &spec).unwrap();
    let text = serde_json::to_string(&r).unwrap();
    let back: EnergyResult = serde_json::from_str(&text).unwrap();
    assert_eq!(r, back);
    assert!((r.u_per_area - pec_casimir_energy(200e-9)).abs() < 1e-8 * r.u_per_area.abs());
    let spec_back: QuadratureSpec =
        serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
    assert_eq!(spec, spec_back);
}

#[test]
fn glass_coated_pec_lies_between_bounding_cavities() {
    // 20 nm of glass on each PEC mirror, 100 nm of vacuum between them.
    // Bounds: the bare 100 nm PEC cavity above, and a 140 nm PEC cavity
    // entirely filled with glass, U_PEC(140 nm)/n, below.
    let l = 100e-9;
    let spec = QuadratureSpec::default();
    let eps = 2.1;
    let glass = DielectricModel::constant(eps);
    let coated = MirrorStack::new(vec![
        Layer::film(glass, 20e-9),
        Layer::half_space(DielectricModel::PerfectConductor),
    ])
    .unwrap();
    let cfg = CavityConfig::new(l, DielectricModel::vacuum(), coated.clone(), coated, 0.0).unwrap();
    let u = casimir_energy_t0(&cfg, &spec).unwrap().u_per_area;
    let upper = pec_casimir_energy(l).abs();
    let lower = pec_casimir_energy(l + 40e-9).abs() / f64::sqrt(eps);
    assert!(u < 0.0, "{u:e}");
    assert!(u.abs() < upper && u.abs() > lower, "{lower:e} < {:e} < {upper:e}", u.abs());
}
