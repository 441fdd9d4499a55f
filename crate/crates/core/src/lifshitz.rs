//! Casimir-Lifshitz energy per unit area of a planar cavity.
//!
//! At fixed imaginary frequency ξ the wave-vector integral is rewritten in
//! u = 2κL with κ the gap decay constant:
//!
//! ```text
//! U_ξ = ħ/(4π²) · 1/(4L²) · ∫_{u₀}^∞ u Σ_λ ln(1 − r_λ⁻ r_λ⁺ e^{−u}) du,   u₀ = 2L√ε(iξ) ξ/c
//! ```
//!
//! which has a pure exponential weight and is cut off at u − u₀ = 50. The
//! zero-temperature energy integrates U_ξ over ξ = ω_ref·t/(1 − t); the
//! finite-temperature free energy sums it over Matsubara frequencies with
//! half weight on ξ = 0. The logarithm is already normalized to the
//! mirror-free limit, so no separate bulk subtraction is needed.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{cavity_fundamental, matsubara_spacing, C, HBAR};
use crate::dielectric::{eps_imag, eps_imag_positive, DielectricModel, LorentzMedium};
use crate::error::{CavityError, Result};
use crate::fresnel::{r_stack_complex, stack_reflection, stack_reflection_static, MirrorStack};
use crate::quadrature::{integrate, QuadOptions};

/// Upper limit of u − u₀; the neglected tail is below (1 + 50)e⁻⁵⁰ relative.
const U_SPAN: f64 = 50.0;
const U_BREAKS: [f64; 4] = [0.5, 2.0, 6.0, 16.0];
/// Matsubara terms evaluated per parallel batch. Fixed so that the summation
/// order, and therefore the result, does not depend on the thread count.
const MATSUBARA_BATCH: usize = 64;
const MATSUBARA_QUIET_TERMS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct CavityConfig {
    /// Gap length, m.
    pub length: f64,
    /// Medium filling the gap.
    pub gap: DielectricModel,
    pub top: MirrorStack,
    pub bottom: MirrorStack,
    /// Temperature, K.
    pub temperature: f64,
}

impl CavityConfig {
    pub fn new(
        length: f64,
        gap: DielectricModel,
        top: MirrorStack,
        bottom: MirrorStack,
        temperature: f64,
    ) -> Result<Self> {
        let cfg = Self {
            length,
            gap,
            top,
            bottom,
            temperature,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Two perfect-conductor mirrors at T = 0.
    pub fn pec(length: f64, gap: DielectricModel) -> Result<Self> {
        Self::new(length, gap, MirrorStack::pec(), MirrorStack::pec(), 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(CavityError::Config(format!(
                "cavity length must be positive, got {}",
                self.length
            )));
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(CavityError::Config(format!(
                "temperature must be non-negative, got {}",
                self.temperature
            )));
        }
        self.gap.validate()?;
        if self.gap.static_eps().is_none() {
            return Err(CavityError::Config(
                "gap medium must be a dielectric (Lorentz or constant)".into(),
            ));
        }
        Ok(())
    }

    pub fn with_temperature(&self, temperature: f64) -> Self {
        Self {
            temperature,
            ..self.clone()
        }
    }

    pub fn with_length(&self, length: f64) -> Self {
        Self {
            length,
            ..self.clone()
        }
    }

    /// The gap Lorentz medium, if the gap carries one.
    pub fn lorentz(&self) -> Option<LorentzMedium> {
        match self.gap {
            DielectricModel::Lorentz(m) => Some(m),
            _ => None,
        }
    }

    /// Same cavity with the gap coupling set to `g`.
    pub fn with_coupling(&self, g: f64) -> Result<Self> {
        match self.gap {
            DielectricModel::Lorentz(m) => {
                let gap = DielectricModel::Lorentz(m.with_coupling(g));
                gap.validate()?;
                Ok(Self {
                    gap,
                    ..self.clone()
                })
            }
            _ => Err(CavityError::Config(
                "coupling can only be changed on a Lorentz gap medium".into(),
            )),
        }
    }

    /// Reference frequency of the ξ map: max(ω₀, πc/L).
    pub fn reference_frequency(&self) -> f64 {
        let cavity = cavity_fundamental(self.length);
        match self.gap {
            DielectricModel::Lorentz(m) => m.omega0.max(cavity),
            _ => cavity,
        }
    }

    fn characteristic_frequencies(&self) -> Vec<f64> {
        let mut out = vec![cavity_fundamental(self.length)];
        let mut add = |m: &DielectricModel| match m {
            DielectricModel::Lorentz(l) => {
                out.push(l.omega0);
                if l.gamma > 0.0 {
                    out.push(l.gamma);
                }
            }
            DielectricModel::Drude(d) => {
                out.push(d.omega_p);
                out.push(d.gamma);
            }
            _ => {}
        };
        add(&self.gap);
        for l in self.top.layers().iter().chain(self.bottom.layers()) {
            add(&l.material);
        }
        out
    }
}

/// Accuracy controls for the energy integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    /// Bisection budget of each adaptive integral.
    pub max_subdivisions: usize,
    /// A Matsubara term counts as negligible below this fraction of the
    /// running sum.
    pub matsubara_rel_cutoff: f64,
    pub max_matsubara_terms: usize,
    /// Keep the (ξ, U_ξ) evaluations in the result.
    #[serde(default)]
    pub record_samples: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            max_subdivisions: 2000,
            matsubara_rel_cutoff: 1e-10,
            max_matsubara_terms: 2_000_000,
            record_samples: false,
        }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        Self { rel_tol, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(CavityError::Config(format!(
                "rel_tol must lie in (0, 1), got {}",
                self.rel_tol
            )));
        }
        if !(self.matsubara_rel_cutoff > 0.0) {
            return Err(CavityError::Config(format!(
                "matsubara_rel_cutoff must be positive, got {}",
                self.matsubara_rel_cutoff
            )));
        }
        if self.max_subdivisions == 0 || self.max_matsubara_terms == 0 {
            return Err(CavityError::Config(
                "subdivision and Matsubara budgets must be positive".into(),
            ));
        }
        Ok(())
    }

    fn inner(&self) -> QuadOptions {
        QuadOptions {
            rel_tol: self.rel_tol / 20.0,
            abs_tol: 0.0,
            max_subdivisions: self.max_subdivisions,
        }
    }

    fn outer(&self) -> QuadOptions {
        QuadOptions {
            rel_tol: self.rel_tol * 0.9,
            abs_tol: 0.0,
            max_subdivisions: self.max_subdivisions,
        }
    }
}

/// Energy (T = 0) or free energy (T > 0) per unit area.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyResult {
    /// J/m².
    pub u_per_area: f64,
    pub rel_tol_achieved: f64,
    pub matsubara_terms_used: Option<usize>,
    pub xi_integrand_samples: Option<Vec<(f64, f64)>>,
}

impl EnergyResult {
    pub fn abs_error(&self) -> f64 {
        self.rel_tol_achieved * self.u_per_area.abs()
    }
}

#[inline]
fn log_term(r: f64, u: f64) -> f64 {
    let e = (-u).exp();
    let x = r * e;
    if x < 0.5 {
        (-x).ln_1p()
    } else {
        ((1.0 - r) - r * (-u).exp_m1()).ln()
    }
}

fn prefactor(length: f64) -> f64 {
    HBAR / (4.0 * PI * PI) / (4.0 * length * length)
}

/// U_ξ with its absolute error; `converged` is false when the inner
/// integral ran out of subdivisions and `value` is the partial result.
#[derive(Debug, Clone, Copy)]
struct Spectral {
    value: f64,
    abs_error: f64,
    converged: bool,
}

fn integrand_with_error(cfg: &CavityConfig, xi: f64, opts: &QuadOptions) -> Result<Spectral> {
    let l = cfg.length;
    let r = if xi == 0.0 {
        let gap_eps = cfg.gap.static_eps().expect("validated gap");
        let f = |u: f64| {
            if u == 0.0 {
                return 0.0;
            }
            let q = u / (2.0 * l);
            let top = stack_reflection_static(&cfg.top, gap_eps, q);
            let bottom = stack_reflection_static(&cfg.bottom, gap_eps, q);
            u * (log_term(top[0] * bottom[0], u) + log_term(top[1] * bottom[1], u))
        };
        integrate(f, 0.0, U_SPAN, &U_BREAKS, opts)
    } else {
        let gap_eps = eps_imag_positive(&cfg.gap, xi);
        let u0 = 2.0 * l * gap_eps.sqrt() * xi / C;
        if u0 > 740.0 {
            return Ok(Spectral {
                value: 0.0,
                abs_error: 0.0,
                converged: true,
            });
        }
        let f = |s: f64| {
            let u = u0 + s;
            let q2 = s * (s + 2.0 * u0) / (4.0 * l * l);
            let top = stack_reflection(&cfg.top, gap_eps, xi, q2);
            let bottom = stack_reflection(&cfg.bottom, gap_eps, xi, q2);
            u * (log_term(top[0] * bottom[0], u) + log_term(top[1] * bottom[1], u))
        };
        integrate(f, 0.0, U_SPAN, &U_BREAKS, opts)
    };
    let pre = prefactor(l);
    match r {
        Ok(r) => Ok(Spectral {
            value: pre * r.value,
            abs_error: pre * r.abs_error,
            converged: true,
        }),
        Err(CavityError::Convergence {
            partial, rel_error, ..
        }) => Ok(Spectral {
            value: pre * partial,
            abs_error: pre * partial.abs() * rel_error,
            converged: false,
        }),
        Err(e) => Err(e),
    }
}

fn not_converged(what: String, partial: f64, abs_error: f64) -> CavityError {
    CavityError::Convergence {
        what,
        partial,
        rel_error: rel(abs_error, partial),
    }
}

/// Spectral density U_ξ (J·s/m²) of the zero-temperature energy at ξ ≥ 0.
pub fn integrand_xi(cfg: &CavityConfig, xi: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(xi >= 0.0) {
        return Err(CavityError::Domain(format!(
            "imaginary frequency must be non-negative, got {xi}"
        )));
    }
    if xi.is_infinite() {
        return Ok(0.0);
    }
    cfg.validate()?;
    let s = integrand_with_error(cfg, xi, &spec.inner())?;
    if s.converged {
        Ok(s.value)
    } else {
        Err(not_converged(
            format!("wave-vector integral at xi = {xi:e} rad/s"),
            s.value,
            s.abs_error,
        ))
    }
}

/// Result of integrating U_ξ over part of the ξ axis.
struct XiIntegral {
    value: f64,
    abs_error: f64,
    samples: Vec<(f64, f64)>,
    inner_failures: usize,
}

fn integrate_xi_axis(cfg: &CavityConfig, t_max: f64, spec: &QuadratureSpec) -> Result<XiIntegral> {
    let w_ref = cfg.reference_frequency();
    let inner = spec.inner();
    let failure: RefCell<Option<CavityError>> = RefCell::new(None);
    let inner_rel = RefCell::new(0.0f64);
    let inner_failures = RefCell::new(0usize);
    let samples = RefCell::new(Vec::new());

    let h = |t: f64| {
        let one_minus = 1.0 - t;
        if one_minus <= 0.0 || failure.borrow().is_some() {
            return 0.0;
        }
        let xi = w_ref * t / one_minus;
        match integrand_with_error(cfg, xi, &inner) {
            Ok(Spectral {
                value: v,
                abs_error: e,
                converged,
            }) => {
                if !converged {
                    *inner_failures.borrow_mut() += 1;
                }
                let jac = w_ref / (one_minus * one_minus);
                if v != 0.0 {
                    let mut worst = inner_rel.borrow_mut();
                    *worst = worst.max(e / v.abs());
                }
                if spec.record_samples {
                    samples.borrow_mut().push((xi, v));
                }
                v * jac
            }
            Err(err) => {
                *failure.borrow_mut() = Some(err);
                0.0
            }
        }
    };

    let mut breaks: Vec<f64> = cfg
        .characteristic_frequencies()
        .into_iter()
        .flat_map(|w| [0.01 * w, 0.1 * w, w, 3.0 * w])
        .map(|xi| xi / (xi + w_ref))
        .filter(|&t| t > 0.0 && t < t_max)
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let outcome = integrate(h, 0.0, t_max, &breaks, &spec.outer());
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    let (value, outer_error) = match outcome {
        Ok(r) => (r.value, r.abs_error),
        Err(CavityError::Convergence {
            partial, rel_error, ..
        }) => {
            return Err(not_converged(
                "imaginary-frequency integral".into(),
                partial,
                partial.abs() * rel_error + inner_rel.into_inner() * partial.abs(),
            ))
        }
        Err(e) => return Err(e),
    };
    let inner_bound = inner_rel.into_inner() * value.abs();
    let mut samples = samples.into_inner();
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(XiIntegral {
        value,
        abs_error: outer_error + inner_bound,
        samples,
        inner_failures: inner_failures.into_inner(),
    })
}

fn rel(abs: f64, value: f64) -> f64 {
    if value == 0.0 {
        if abs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        abs / value.abs()
    }
}

/// Zero-temperature Casimir-Lifshitz energy per unit area.
pub fn casimir_energy_t0(cfg: &CavityConfig, spec: &QuadratureSpec) -> Result<EnergyResult> {
    cfg.validate()?;
    spec.validate()?;
    if cfg.temperature != 0.0 {
        return Err(CavityError::Domain(format!(
            "zero-temperature energy requested for T = {} K",
            cfg.temperature
        )));
    }
    let r = integrate_xi_axis(cfg, 1.0, spec)?;
    if r.inner_failures > 0 {
        return Err(not_converged(
            format!("wave-vector integral at {} frequencies", r.inner_failures),
            r.value,
            r.abs_error,
        ));
    }
    Ok(EnergyResult {
        u_per_area: r.value,
        rel_tol_achieved: rel(r.abs_error, r.value),
        matsubara_terms_used: None,
        xi_integrand_samples: spec.record_samples.then_some(r.samples),
    })
}

/// Fraction of the zero-temperature energy contributed by ξ < `xi_cut`.
pub fn low_frequency_weight(cfg: &CavityConfig, xi_cut: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(xi_cut >= 0.0) {
        return Err(CavityError::Domain(format!(
            "cutoff frequency must be non-negative, got {xi_cut}"
        )));
    }
    if xi_cut == 0.0 {
        return Ok(0.0);
    }
    if xi_cut.is_infinite() {
        return Ok(1.0);
    }
    let total = casimir_energy_t0(cfg, spec)?;
    if total.u_per_area == 0.0 {
        return Err(CavityError::Domain(
            "energy vanishes; spectral weight undefined".into(),
        ));
    }
    let w_ref = cfg.reference_frequency();
    let part = integrate_xi_axis(cfg, xi_cut / (xi_cut + w_ref), spec)?;
    Ok((part.value / total.u_per_area).clamp(0.0, 1.0))
}

/// Finite-temperature free energy per unit area from the Matsubara sum
/// F = Δξ Σ'_j U_ξ(ξ_j), Δξ = 2πk_BT/ħ.
pub fn free_energy_t(cfg: &CavityConfig, spec: &QuadratureSpec) -> Result<EnergyResult> {
    cfg.validate()?;
    spec.validate()?;
    if !(cfg.temperature > 0.0) {
        return Err(CavityError::Domain("Matsubara sum requires T > 0".into()));
    }
    let spacing = matsubara_spacing(cfg.temperature);
    let inner = spec.inner();

    let mut sum = 0.0;
    let mut err_sum = 0.0;
    let mut quiet = 0usize;
    let mut prev_term: Option<f64> = None;
    let mut samples = Vec::new();
    let mut next = 0usize;
    let mut inner_failures = 0usize;

    loop {
        let batch: Vec<usize> = (next..next + MATSUBARA_BATCH).collect();
        let terms: Vec<Result<Spectral>> = batch
            .par_iter()
            .map(|&j| integrand_with_error(cfg, j as f64 * spacing, &inner))
            .collect();

        for (&j, term) in batch.iter().zip(terms) {
            let Spectral {
                mut value,
                abs_error: mut err,
                converged,
            } = term?;
            if !converged {
                inner_failures += 1;
            }
            if spec.record_samples {
                samples.push((j as f64 * spacing, value));
            }
            if j == 0 {
                value *= 0.5;
                err *= 0.5;
            }
            let term = spacing * value;
            sum += term;
            err_sum += spacing * err;

            if term == 0.0 || term.abs() < spec.matsubara_rel_cutoff * sum.abs() {
                quiet += 1;
            } else {
                quiet = 0;
            }
            let tail = match prev_term {
                _ if term == 0.0 => 0.0,
                Some(p) if p != 0.0 && (term / p).abs() < 1.0 => {
                    let ratio = (term / p).abs();
                    term.abs() * ratio / (1.0 - ratio)
                }
                _ => f64::INFINITY,
            };
            prev_term = Some(term);

            let target = 0.5 * spec.rel_tol * sum.abs();
            if j >= 1 && quiet >= MATSUBARA_QUIET_TERMS && (tail <= target || sum == 0.0) {
                let abs_error = err_sum + tail;
                if inner_failures > 0 {
                    return Err(not_converged(
                        format!("wave-vector integral in {inner_failures} Matsubara terms"),
                        sum,
                        abs_error,
                    ));
                }
                return Ok(EnergyResult {
                    u_per_area: sum,
                    rel_tol_achieved: rel(abs_error, sum),
                    matsubara_terms_used: Some(j + 1),
                    xi_integrand_samples: spec.record_samples.then_some(samples),
                });
            }
            if j + 1 >= spec.max_matsubara_terms {
                return Err(CavityError::Convergence {
                    what: format!(
                        "Matsubara sum truncated after {} terms at T = {} K",
                        j + 1,
                        cfg.temperature
                    ),
                    partial: sum,
                    rel_error: rel(err_sum + tail, sum),
                });
            }
        }
        next += MATSUBARA_BATCH;
    }
}

/// Dispatches to the zero-temperature integral or the Matsubara sum.
pub fn energy(cfg: &CavityConfig, spec: &QuadratureSpec) -> Result<EnergyResult> {
    if cfg.temperature == 0.0 {
        casimir_energy_t0(cfg, spec)
    } else {
        free_energy_t(cfg, spec)
    }
}

/// U(g_on) − U(g_off) with its combined absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyShift {
    pub delta_u: f64,
    pub abs_error: f64,
    pub u_on: f64,
    pub u_off: f64,
}

impl EnergyShift {
    /// ΔU/|U(g_off)|; positive when coupling weakens the attraction.
    pub fn relative(&self) -> f64 {
        self.delta_u / self.u_off.abs()
    }
}

pub fn delta_u(
    cfg: &CavityConfig,
    g_on: f64,
    g_off: f64,
    spec: &QuadratureSpec,
) -> Result<EnergyShift> {
    let off_cfg = cfg.with_coupling(g_off)?;
    let off = energy(&off_cfg, spec)?;
    if g_on == g_off {
        return Ok(EnergyShift {
            delta_u: 0.0,
            abs_error: 0.0,
            u_on: off.u_per_area,
            u_off: off.u_per_area,
        });
    }
    let on = energy(&cfg.with_coupling(g_on)?, spec)?;
    Ok(EnergyShift {
        delta_u: on.u_per_area - off.u_per_area,
        abs_error: on.abs_error() + off.abs_error(),
        u_on: on.u_per_area,
        u_off: off.u_per_area,
    })
}

/// Energy per molecule ΔU/(ρL), J, for a molecular density `rho` (m⁻³).
pub fn per_molecule(delta_u: f64, rho: f64, length: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(CavityError::Domain(format!(
            "molecular density must be positive, got {rho}"
        )));
    }
    if !(length > 0.0) {
        return Err(CavityError::Domain(format!(
            "cavity length must be positive, got {length}"
        )));
    }
    Ok(delta_u / (rho * length))
}

/// Real part of U_ξ continued to complex frequency ω + iη (J·s/m²).
///
/// Diagnostic only: for real frequencies the wave-vector integrand shows
/// cavity and polariton resonances. `eta` > 0 keeps the integral finite for
/// lossless materials.
pub fn integrand_omega(cfg: &CavityConfig, omega: f64, eta: f64) -> Result<f64> {
    cfg.validate()?;
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(CavityError::Domain(format!(
            "real-frequency integrand needs a positive loss, got {eta}"
        )));
    }
    if !(omega >= 0.0 && omega.is_finite()) {
        return Err(CavityError::Domain(format!(
            "frequency must be non-negative, got {omega}"
        )));
    }
    let l = cfg.length;
    let w = Complex64::new(omega, eta);
    let gap_eps = crate::dielectric::eps_real(&cfg.gap, w)?;
    let light = (gap_eps.sqrt() * w).re.abs() / C;
    let q_max = light + 60.0 / (2.0 * l);

    let mut breaks = vec![light];
    let n_modes = (2.0 * light * l / PI).ceil() as usize;
    for n in 1..=n_modes.min(4000) {
        let k = n as f64 * PI / l;
        if k < light {
            breaks.push((light * light - k * k).sqrt());
        }
    }
    breaks.sort_by(f64::total_cmp);

    let failure: RefCell<Option<CavityError>> = RefCell::new(None);
    let zeta2 = -(w * w) / (C * C);
    let f = |q: f64| {
        if failure.borrow().is_some() {
            return 0.0;
        }
        let kappa = (q * q + gap_eps * zeta2).sqrt();
        let e = (-2.0 * kappa * l).exp();
        let top = r_stack_complex(&cfg.top, &cfg.gap, w, q);
        let bottom = r_stack_complex(&cfg.bottom, &cfg.gap, w, q);
        match (top, bottom) {
            (Ok(t), Ok(b)) => {
                let s: f64 = (0..2).map(|k| (1.0 - t[k] * b[k] * e).norm().ln()).sum();
                q * s
            }
            (Err(err), _) | (_, Err(err)) => {
                *failure.borrow_mut() = Some(err);
                0.0
            }
        }
    };
    // The value crosses zero between modes, so the relative target gets an
    // absolute floor on the natural 1/L² scale of the q-integral.
    let opts = QuadOptions {
        rel_tol: 1e-6,
        abs_tol: 1e-8 / (l * l),
        max_subdivisions: 50_000,
    };
    let r = integrate(f, 0.0, q_max, &breaks, &opts);
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    Ok(HBAR / (4.0 * PI * PI) * r?.value)
}

/// Evaluates U_ξ on a grid of imaginary frequencies, in parallel, in grid order.
pub fn sample_integrand(
    cfg: &CavityConfig,
    xis: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<(f64, f64)>> {
    xis.par_iter()
        .map(|&xi| integrand_xi(cfg, xi, spec).map(|u| (xi, u)))
        .collect()
}

/// ε(iξ) of the gap, exposed for screening overlays.
pub fn gap_eps_imag(cfg: &CavityConfig, xi: f64) -> Result<f64> {
    eps_imag(&cfg.gap, xi)
}
