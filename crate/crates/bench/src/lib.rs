//! Fixed cavities used by the benchmarks.

use cavity_core::constants::cavity_fundamental;
use cavity_core::{CavityConfig, DielectricModel, DrudeMetal, Layer, LorentzMedium, MirrorStack};

/// Resonant lossless Lorentz gap, g = 0.5ω₀, between PEC mirrors.
pub fn pec_lorentz(length: f64) -> CavityConfig {
    let w0 = cavity_fundamental(length);
    let gap = DielectricModel::Lorentz(LorentzMedium::lossless(w0, 0.5 * w0));
    CavityConfig::pec(length, gap).expect("valid fixture")
}

/// 30 nm gold films on glass around a resonant Lorentz gap.
pub fn gold_on_glass(length: f64, temperature: f64) -> CavityConfig {
    let w0 = cavity_fundamental(length);
    let gap = DielectricModel::Lorentz(LorentzMedium::lossless(w0, w0));
    let mirror = MirrorStack::new(vec![
        Layer::film(DielectricModel::Drude(DrudeMetal::gold()), 30e-9),
        Layer::half_space(DielectricModel::constant(2.1)),
    ])
    .expect("valid fixture");
    CavityConfig::new(length, gap, mirror.clone(), mirror, temperature).expect("valid fixture")
}
