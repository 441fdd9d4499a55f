//! Mirror reflection amplitudes and multilayer transmission.
//!
//! On the imaginary axis every layer carries a real decay constant
//! κ = √(q² + ε(iξ)ξ²/c²) and all amplitudes are real. A stack is reduced
//! from its terminal half-space towards the gap with the usual Airy
//! recursion. The ξ = 0 Matsubara term never goes through the generic
//! formulas: there all κ equal q, Drude metals reflect p waves perfectly and
//! are invisible to s waves, and PEC keeps r_p = +1, r_s = −1.

use num_complex::Complex64;

use crate::constants::C;
use crate::dielectric::{eps_imag_positive, eps_real, DielectricModel};
use crate::error::{CavityError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    /// Transverse magnetic.
    P,
    /// Transverse electric.
    S,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::P, Polarization::S];
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Thickness {
    /// Finite film, metres.
    Finite(f64),
    HalfSpace,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layer {
    pub material: DielectricModel,
    pub thickness: Thickness,
}

impl Layer {
    pub fn film(material: DielectricModel, thickness: f64) -> Self {
        Self {
            material,
            thickness: Thickness::Finite(thickness),
        }
    }

    pub fn half_space(material: DielectricModel) -> Self {
        Self {
            material,
            thickness: Thickness::HalfSpace,
        }
    }
}

/// Ordered layers, the first one facing the cavity gap, the last one a
/// half-space.
#[derive(Debug, Clone, PartialEq)]
pub struct MirrorStack {
    layers: Vec<Layer>,
}

impl MirrorStack {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(CavityError::Config("mirror stack has no layers".into()));
        }
        let last = layers.len() - 1;
        for (i, layer) in layers.iter().enumerate() {
            layer.material.validate()?;
            match layer.thickness {
                Thickness::HalfSpace if i != last => {
                    return Err(CavityError::Config(format!(
                        "layer {i} is a half-space but is not the last layer"
                    )))
                }
                Thickness::Finite(_) if i == last => {
                    return Err(CavityError::Config(
                        "the last layer of a mirror stack must be a half-space".into(),
                    ))
                }
                Thickness::Finite(d) if !(d >= 0.0 && d.is_finite()) => {
                    return Err(CavityError::Config(format!(
                        "layer {i} thickness must be non-negative and finite, got {d}"
                    )))
                }
                _ => {}
            }
        }
        Ok(Self { layers })
    }

    pub fn pec() -> Self {
        Self {
            layers: vec![Layer::half_space(DielectricModel::PerfectConductor)],
        }
    }

    pub fn half_space(material: DielectricModel) -> Result<Self> {
        Self::new(vec![Layer::half_space(material)])
    }

    /// Metal film of thickness `d` on a substrate.
    pub fn film_on_substrate(
        film: DielectricModel,
        d: f64,
        substrate: DielectricModel,
    ) -> Result<Self> {
        Self::new(vec![Layer::film(film, d), Layer::half_space(substrate)])
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn is_pec(&self) -> bool {
        self.layers[0].material.is_pec()
    }

    pub fn contains_drude(&self) -> bool {
        self.layers
            .iter()
            .any(|l| matches!(l.material, DielectricModel::Drude(_)))
    }

    /// Layers up to and including the first perfect conductor; nothing behind
    /// a PEC is visible.
    fn optical_layers(&self) -> &[Layer] {
        match self.layers.iter().position(|l| l.material.is_pec()) {
            Some(i) => &self.layers[..=i],
            None => &self.layers,
        }
    }
}

/// κ = √(q² + εξ²/c²).
pub fn kz_imag(eps: f64, xi: f64, q: f64) -> f64 {
    let k = xi / C;
    (q * q + eps * k * k).sqrt()
}

/// Single-interface amplitude from medium `a` (incidence side) into `b`.
pub fn r_interface(eps_a: f64, kz_a: f64, eps_b: f64, kz_b: f64, pol: Polarization) -> Result<f64> {
    let (num, den) = match pol {
        Polarization::P => {
            if eps_b.is_infinite() {
                return Ok(1.0);
            }
            (eps_b * kz_a - eps_a * kz_b, eps_b * kz_a + eps_a * kz_b)
        }
        Polarization::S => (kz_a - kz_b, kz_a + kz_b),
    };
    if den == 0.0 || !den.is_finite() {
        return Err(CavityError::Domain(format!(
            "vanishing interface denominator (eps_a={eps_a}, kz_a={kz_a}, eps_b={eps_b}, kz_b={kz_b})"
        )));
    }
    Ok(num / den)
}

#[inline]
fn interface_p(eps_a: f64, ka: f64, eps_b: f64, kb: f64) -> f64 {
    (eps_b * ka - eps_a * kb) / (eps_b * ka + eps_a * kb)
}

#[inline]
fn interface_s(ka: f64, kb: f64) -> f64 {
    (ka - kb) / (ka + kb)
}

#[inline]
fn airy(r_front: f64, r_back: f64, attenuation: f64) -> f64 {
    let t = r_back * attenuation;
    (r_front + t) / (1.0 + r_front * t)
}

/// Reflection of a stack seen from the gap, both polarizations, at ξ > 0.
///
/// `q2` is the squared in-plane wave number; passing it directly avoids the
/// cancellation in q² = κ_gap² − ε_gap ξ²/c² close to the light line.
pub(crate) fn stack_reflection(stack: &MirrorStack, gap_eps: f64, xi: f64, q2: f64) -> [f64; 2] {
    let layers = stack.optical_layers();
    let k2 = (xi / C) * (xi / C);
    let kappa = |eps: f64| (q2 + eps * k2).sqrt();

    let n = layers.len();
    let last = &layers[n - 1];
    let (mut eps_prev, mut k_prev, mut rp, mut rs);
    if n == 1 {
        eps_prev = gap_eps;
        k_prev = kappa(gap_eps);
    } else {
        let before = &layers[n - 2];
        eps_prev = eps_imag_positive(&before.material, xi);
        k_prev = kappa(eps_prev);
    }
    if last.material.is_pec() {
        rp = 1.0;
        rs = -1.0;
    } else {
        let eps_last = eps_imag_positive(&last.material, xi);
        let k_last = kappa(eps_last);
        rp = interface_p(eps_prev, k_prev, eps_last, k_last);
        rs = interface_s(k_prev, k_last);
    }

    // Walk films n-2 .. 0, each bounded by the previous medium on the gap side.
    for j in (0..n - 1).rev() {
        let d = match layers[j].thickness {
            Thickness::Finite(d) => d,
            Thickness::HalfSpace => unreachable!("validated stack"),
        };
        let (eps_film, k_film) = (eps_prev, k_prev);
        let attenuation = (-2.0 * k_film * d).exp();
        if j == 0 {
            eps_prev = gap_eps;
        } else {
            eps_prev = eps_imag_positive(&layers[j - 1].material, xi);
        }
        k_prev = kappa(eps_prev);
        rp = airy(
            interface_p(eps_prev, k_prev, eps_film, k_film),
            rp,
            attenuation,
        );
        rs = airy(interface_s(k_prev, k_film), rs, attenuation);
    }
    [rp, rs]
}

/// Reflection at ξ = 0 for in-plane wave number `q` > 0.
pub(crate) fn stack_reflection_static(
    stack: &MirrorStack,
    gap_static_eps: f64,
    q: f64,
) -> [f64; 2] {
    let layers = stack.optical_layers();
    // p: first conductor terminates; films in front combine with κ = q.
    let conductor = layers
        .iter()
        .position(|l| l.material.static_eps().is_none())
        .unwrap_or(layers.len());
    let static_eps = |i: usize| {
        if i == 0 {
            gap_static_eps
        } else {
            layers[i - 1].material.static_eps().unwrap_or(f64::INFINITY)
        }
    };
    // media indices: 0 = gap, i = layers[i-1]
    let end = if conductor < layers.len() {
        conductor + 1
    } else {
        layers.len()
    };
    let mut rp = {
        let (ea, eb) = (static_eps(end - 1), static_eps(end));
        if eb.is_infinite() {
            1.0
        } else {
            (eb - ea) / (eb + ea)
        }
    };
    for m in (1..end).rev() {
        let d = match layers[m - 1].thickness {
            Thickness::Finite(d) => d,
            Thickness::HalfSpace => unreachable!("validated stack"),
        };
        let (ea, eb) = (static_eps(m - 1), static_eps(m));
        rp = airy((eb - ea) / (eb + ea), rp, (-2.0 * q * d).exp());
    }

    // s: only a perfect conductor reflects; everything in front of it is
    // index-matched at κ = q and just attenuates.
    let rs = if layers[layers.len() - 1].material.is_pec() {
        let depth: f64 = layers[..layers.len() - 1]
            .iter()
            .map(|l| match l.thickness {
                Thickness::Finite(d) => d,
                Thickness::HalfSpace => 0.0,
            })
            .sum();
        -(-2.0 * q * depth).exp()
    } else {
        0.0
    };
    [rp, rs]
}

/// Reflection amplitude of a mirror stack at imaginary frequency ξ and
/// in-plane wave number q, with the gap medium of permittivity `gap_eps`
/// (ε(iξ) of the gap; at ξ = 0 its static value).
pub fn r_stack(
    stack: &MirrorStack,
    gap_eps: f64,
    xi: f64,
    q: f64,
    pol: Polarization,
) -> Result<f64> {
    if !(xi >= 0.0 && q >= 0.0) {
        return Err(CavityError::Domain(format!(
            "reflection needs xi >= 0 and q >= 0, got xi={xi}, q={q}"
        )));
    }
    if !(gap_eps >= 1.0 && gap_eps.is_finite()) {
        return Err(CavityError::Domain(format!(
            "gap permittivity must be finite and at least 1, got {gap_eps}"
        )));
    }
    let [rp, rs] = if xi == 0.0 {
        if q == 0.0 {
            return Err(CavityError::Domain(
                "reflection at xi = 0 and q = 0 is undefined".into(),
            ));
        }
        stack_reflection_static(stack, gap_eps, q)
    } else {
        stack_reflection(stack, gap_eps, xi, q * q)
    };
    Ok(match pol {
        Polarization::P => rp,
        Polarization::S => rs,
    })
}

/// Reflection amplitudes `[r_p, r_s]` at complex frequency ω (Im ω > 0 or
/// ω real with lossy media), written through ζ = −iω so that ζ = ξ recovers
/// the imaginary-axis values.
pub fn r_stack_complex(
    stack: &MirrorStack,
    gap: &DielectricModel,
    omega: Complex64,
    q: f64,
) -> Result<[Complex64; 2]> {
    let zeta = -Complex64::i() * omega;
    let k2 = zeta * zeta / (C * C);
    let kappa = |eps: Complex64| (q * q + eps * k2).sqrt();
    let layers = stack.optical_layers();

    let gap_eps = eps_real(gap, omega)?;
    let mut media = Vec::with_capacity(layers.len() + 1);
    media.push((gap_eps, kappa(gap_eps)));
    for l in layers {
        if l.material.is_pec() {
            media.push((Complex64::new(f64::INFINITY, 0.0), Complex64::new(0.0, 0.0)));
        } else {
            let e = eps_real(&l.material, omega)?;
            media.push((e, kappa(e)));
        }
    }

    let n = media.len();
    let (ea, ka) = media[n - 2];
    let (eb, kb) = media[n - 1];
    let (mut rp, mut rs) = if eb.re.is_infinite() {
        (Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0))
    } else {
        (
            (eb * ka - ea * kb) / (eb * ka + ea * kb),
            (ka - kb) / (ka + kb),
        )
    };
    for m in (1..n - 1).rev() {
        let d = match layers[m - 1].thickness {
            Thickness::Finite(d) => d,
            Thickness::HalfSpace => unreachable!("validated stack"),
        };
        let (ea, ka) = media[m - 1];
        let (eb, kb) = media[m];
        let att = (-2.0 * kb * d).exp();
        let front_p = (eb * ka - ea * kb) / (eb * ka + ea * kb);
        let front_s = (ka - kb) / (ka + kb);
        rp = (front_p + rp * att) / (1.0 + front_p * rp * att);
        rs = (front_s + rs * att) / (1.0 + front_s * rs * att);
    }
    Ok([rp, rs])
}

/// Planar multilayer probed at normal incidence from `incident` towards `exit`.
#[derive(Debug, Clone, PartialEq)]
pub struct Multilayer {
    pub incident: DielectricModel,
    /// Finite layers in propagation order: material and thickness in metres.
    pub layers: Vec<(DielectricModel, f64)>,
    pub exit: DielectricModel,
}

impl Multilayer {
    /// `substrate | mirror(d) | gap(L) | mirror(d) | substrate`.
    pub fn fabry_perot(
        substrate: DielectricModel,
        mirror: DielectricModel,
        mirror_thickness: f64,
        gap: DielectricModel,
        length: f64,
    ) -> Self {
        Self {
            incident: substrate,
            layers: vec![
                (mirror, mirror_thickness),
                (gap, length),
                (mirror, mirror_thickness),
            ],
            exit: substrate,
        }
    }

    fn validate(&self) -> Result<()> {
        for m in [&self.incident, &self.exit] {
            if !matches!(m, DielectricModel::Constant(_)) {
                return Err(CavityError::Config(
                    "incident and exit media must be lossless constant dielectrics".into(),
                ));
            }
        }
        for (m, d) in &self.layers {
            if m.is_pec() {
                return Err(CavityError::Config(
                    "perfect conductors are opaque; use a Drude film for transmission".into(),
                ));
            }
            m.validate()?;
            if !(*d >= 0.0 && d.is_finite()) {
                return Err(CavityError::Config(format!(
                    "layer thickness must be non-negative, got {d}"
                )));
            }
        }
        Ok(())
    }
}

/// Intensity transmittance at real angular frequency `omega`, normal incidence.
pub fn transmission(stack: &Multilayer, omega: f64) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(CavityError::Domain(format!(
            "transmission needs a positive frequency, got {omega}"
        )));
    }
    stack.validate()?;
    let w = Complex64::new(omega, 0.0);
    let index = |m: &DielectricModel| eps_real(m, w).map(|e| e.sqrt());
    let n0 = index(&stack.incident)?;
    let ns = index(&stack.exit)?;
    let k0 = omega / C;

    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut m = [[one, zero], [zero, one]];
    for (material, d) in &stack.layers {
        let n = index(material)?;
        let delta = n * k0 * *d;
        let (c, s) = (delta.cos(), delta.sin());
        let layer = [[c, -i * s / n], [-i * n * s, c]];
        m = [
            [
                m[0][0] * layer[0][0] + m[0][1] * layer[1][0],
                m[0][0] * layer[0][1] + m[0][1] * layer[1][1],
            ],
            [
                m[1][0] * layer[0][0] + m[1][1] * layer[1][0],
                m[1][0] * layer[0][1] + m[1][1] * layer[1][1],
            ],
        ];
    }
    let denom = n0 * m[0][0] + n0 * ns * m[0][1] + m[1][0] + ns * m[1][1];
    let t = 2.0 * n0 / denom;
    Ok((ns.re / n0.re) * t.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dielectric::{DrudeMetal, LorentzMedium};
    use proptest::prelude::*;

    #[test]
    fn kz_examples() {
        assert_eq!(kz_imag(1.0, 0.0, 5.0), 5.0);
        assert!((kz_imag(4.0, C, 0.0) - 2.0).abs() < 1e-15);
        assert!((kz_imag(2.0, 3.0 * C, 4.0) - 34f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn interface_examples() {
        for pol in Polarization::BOTH {
            assert_eq!(r_interface(2.0, 1.3, 2.0, 1.3, pol).unwrap(), 0.0);
        }
        assert_eq!(
            r_interface(1.0, 1.0, f64::INFINITY, 0.0, Polarization::P).unwrap(),
            1.0
        );
        let big = 1e30;
        let rs = r_interface(1.0, 1.0, big, big.sqrt(), Polarization::S).unwrap();
        assert!((rs + 1.0).abs() < 1e-12);
        let rp = r_interface(1.0, 1.0, 2.0, 1.2, Polarization::P).unwrap();
        assert!((rp - 0.25).abs() < 1e-15);
        assert!(r_interface(1.0, 0.0, 1.0, 0.0, Polarization::S).is_err());
    }

    #[test]
    fn pec_stack_is_ideal() {
        let pec = MirrorStack::pec();
        for (xi, q) in [(0.0, 1e7), (1e15, 0.0), (3e14, 2e6)] {
            let rp = r_stack(&pec, 1.5, xi, q, Polarization::P).unwrap();
            let rs = r_stack(&pec, 1.5, xi, q, Polarization::S).unwrap();
            assert_eq!(rp * rp, 1.0);
            assert_eq!(rs * rs, 1.0);
        }
    }

    #[test]
    fn drude_static_limit() {
        let gold = MirrorStack::half_space(DielectricModel::Drude(DrudeMetal::gold())).unwrap();
        assert_eq!(r_stack(&gold, 1.0, 0.0, 1e7, Polarization::P).unwrap(), 1.0);
        assert_eq!(r_stack(&gold, 1.0, 0.0, 1e7, Polarization::S).unwrap(), 0.0);
        let film = MirrorStack::film_on_substrate(
            DielectricModel::Drude(DrudeMetal::gold()),
            30e-9,
            DielectricModel::constant(2.1),
        )
        .unwrap();
        assert_eq!(
            r_stack(&film, 1.77, 0.0, 1e7, Polarization::P).unwrap(),
            1.0
        );
        assert_eq!(
            r_stack(&film, 1.77, 0.0, 1e7, Polarization::S).unwrap(),
            0.0
        );
    }

    #[test]
    fn static_limit_is_continuous_for_dielectrics() {
        // Dielectric film on a dielectric substrate has a regular ξ → 0 limit.
        let stack = MirrorStack::film_on_substrate(
            DielectricModel::constant(3.0),
            20e-9,
            DielectricModel::constant(6.0),
        )
        .unwrap();
        let q = 2e7;
        for pol in Polarization::BOTH {
            let at0 = r_stack(&stack, 1.2, 0.0, q, pol).unwrap();
            let near = r_stack(&stack, 1.2, 1e8, q, pol).unwrap();
            assert!((at0 - near).abs() < 1e-9, "{pol:?}: {at0} vs {near}");
        }
    }

    #[test]
    fn drude_limit_matches_small_xi() {
        // p tends to +1 and s to 0 as ξ → 0⁺ for a Drude half-space.
        let gold = MirrorStack::half_space(DielectricModel::Drude(DrudeMetal::gold())).unwrap();
        let q = 1e7;
        let rp = r_stack(&gold, 1.0, 1e6, q, Polarization::P).unwrap();
        let rs = r_stack(&gold, 1.0, 1e6, q, Polarization::S).unwrap();
        assert!((rp - 1.0).abs() < 1e-6);
        assert!(rs.abs() < 1e-3);
    }

    #[test]
    fn thick_film_matches_half_space() {
        let gold = DielectricModel::Drude(DrudeMetal::gold());
        let thick =
            MirrorStack::film_on_substrate(gold, 5e-6, DielectricModel::constant(2.1)).unwrap();
        let bulk = MirrorStack::half_space(gold).unwrap();
        for pol in Polarization::BOTH {
            let a = r_stack(&thick, 1.3, 2e15, 3e6, pol).unwrap();
            let b = r_stack(&bulk, 1.3, 2e15, 3e6, pol).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn film_matches_transfer_matrix() {
        // Characteristic matrix [[cosh κd, sinh κd / Y], [Y sinh κd, cosh κd]]
        // carries (E, H) from the substrate to the gap, Y = κ/ε (p) or κ (s).
        let gold = DielectricModel::Drude(DrudeMetal::gold());
        let glass = DielectricModel::constant(2.1);
        let d = 30e-9;
        let stack = MirrorStack::film_on_substrate(gold, d, glass).unwrap();
        let l = 100e-9;
        let xi = 0.1 * DrudeMetal::gold().omega_p;
        let q = 1.0 / l;
        let gap = 1.0;
        let e1 = crate::dielectric::eps_imag(&gold, xi).unwrap();
        let es = 2.1;
        let (ka, k1, ks) = (kz_imag(gap, xi, q), kz_imag(e1, xi, q), kz_imag(es, xi, q));
        for pol in Polarization::BOTH {
            let y = |k: f64, e: f64| match pol {
                Polarization::P => k / e,
                Polarization::S => k,
            };
            let (ya, y1, ys) = (y(ka, gap), y(k1, e1), y(ks, es));
            let (ch, sh) = ((k1 * d).cosh(), (k1 * d).sinh());
            let e0 = ch + sh * ys / y1;
            let h0 = y1 * sh + ch * ys;
            let y_in = h0 / e0;
            let want = (ya - y_in) / (ya + y_in);
            let got = r_stack(&stack, gap, xi, q, pol).unwrap();
            assert!((got - want).abs() < 1e-12, "{pol:?}: {got} vs {want}");
        }
    }

    #[test]
    fn degenerate_stack_reflects_nothing() {
        let m = DielectricModel::Lorentz(LorentzMedium::lossless(1e15, 5e14));
        let stack = MirrorStack::film_on_substrate(m, 40e-9, m).unwrap();
        let gap_eps = crate::dielectric::eps_imag(&m, 7e14).unwrap();
        for pol in Polarization::BOTH {
            assert!(r_stack(&stack, gap_eps, 7e14, 4e6, pol).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn malformed_stacks_rejected() {
        let glass = DielectricModel::constant(2.1);
        assert!(MirrorStack::new(vec![]).is_err());
        assert!(MirrorStack::new(vec![Layer::film(glass, 1e-8)]).is_err());
        assert!(
            MirrorStack::new(vec![Layer::half_space(glass), Layer::half_space(glass)]).is_err()
        );
        assert!(
            MirrorStack::new(vec![Layer::film(glass, -1.0), Layer::half_space(glass)]).is_err()
        );
    }

    #[test]
    fn complex_path_agrees_on_imaginary_axis() {
        let stack = MirrorStack::film_on_substrate(
            DielectricModel::Drude(DrudeMetal::gold()),
            30e-9,
            DielectricModel::constant(2.1),
        )
        .unwrap();
        let gap = DielectricModel::Lorentz(LorentzMedium::new(9e15, 4e14, 4e15, 1.77).unwrap());
        let xi = 2.3e15;
        let q = 1.1e7;
        let gap_eps = crate::dielectric::eps_imag(&gap, xi).unwrap();
        let c = r_stack_complex(&stack, &gap, Complex64::new(0.0, xi), q).unwrap();
        for (k, pol) in Polarization::BOTH.iter().enumerate() {
            let r = r_stack(&stack, gap_eps, xi, q, *pol).unwrap();
            assert!((c[k].re - r).abs() < 1e-13 && c[k].im.abs() < 1e-13);
        }
    }

    /// Single lossless slab in vacuum (Airy formula).
    #[test]
    fn slab_transmission_matches_airy() {
        let n: f64 = 1.7;
        let d = 250e-9;
        let stack = Multilayer {
            incident: DielectricModel::vacuum(),
            layers: vec![(DielectricModel::constant(n * n), d)],
            exit: DielectricModel::vacuum(),
        };
        let r = ((n - 1.0) / (n + 1.0)).powi(2);
        for k in 1..50 {
            let omega = 1e14 * k as f64;
            let delta = n * omega / C * d;
            let airy = (1.0 - r).powi(2) / ((1.0 - r).powi(2) + 4.0 * r * delta.sin().powi(2));
            let t = transmission(&stack, omega).unwrap();
            assert!((t - airy).abs() < 1e-12, "{t} vs {airy}");
        }
    }

    #[test]
    fn fabry_perot_maxima_near_cavity_modes() {
        let length = 1e-6;
        let mirror = DielectricModel::Drude(DrudeMetal {
            omega_p: crate::constants::ev_to_rad_per_s(40.0),
            gamma: 1e11,
        });
        let stack = Multilayer::fabry_perot(
            DielectricModel::vacuum(),
            mirror,
            6e-9,
            DielectricModel::vacuum(),
            length,
        );
        let w_l = crate::constants::cavity_fundamental(length);
        let grid: Vec<f64> = (1..20000).map(|k| w_l * 3.5 * k as f64 / 20000.0).collect();
        let t: Vec<f64> = grid
            .iter()
            .map(|&w| transmission(&stack, w).unwrap())
            .collect();
        let peaks: Vec<f64> = (1..t.len() - 1)
            .filter(|&i| t[i] > t[i - 1] && t[i] >= t[i + 1] && t[i] > 0.1)
            .map(|i| grid[i])
            .collect();
        assert_eq!(peaks.len(), 3, "{peaks:?}");
        for (n, w) in peaks.iter().enumerate() {
            let mode = w_l * (n + 1) as f64;
            assert!(
                (w - mode).abs() / mode < 0.03,
                "peak {w:e} vs mode {mode:e}"
            );
        }
    }

    proptest! {
        #[test]
        fn passive_stacks_bounded(
            wp_ev in 1.0f64..15.0, gm in 1e12f64..1e14, d in 1e-9f64..200e-9,
            sub in 1.0f64..6.0, gap in 1.0f64..5.0, xi in 1e12f64..1e17, q in 0.0f64..1e9,
        ) {
            let metal = DielectricModel::Drude(DrudeMetal {
                omega_p: crate::constants::ev_to_rad_per_s(wp_ev),
                gamma: gm,
            });
            let stack = MirrorStack::film_on_substrate(metal, d, DielectricModel::constant(sub)).unwrap();
            for pol in Polarization::BOTH {
                let r = r_stack(&stack, gap, xi, q, pol).unwrap();
                prop_assert!(r.abs() <= 1.0 + 1e-15);
            }
        }

        #[test]
        fn zero_thickness_film_is_invisible(
            e_film in 1.0f64..20.0, e_sub in 1.0f64..20.0, gap in 1.0f64..5.0,
            xi in 1e13f64..1e16, q in 0.0f64..1e8,
        ) {
            let with = MirrorStack::film_on_substrate(
                DielectricModel::constant(e_film), 0.0, DielectricModel::constant(e_sub)).unwrap();
            let without = MirrorStack::half_space(DielectricModel::constant(e_sub)).unwrap();
            for pol in Polarization::BOTH {
                let a = r_stack(&with, gap, xi, q, pol).unwrap();
                let b = r_stack(&without, gap, xi, q, pol).unwrap();
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn normal_incidence_p_equals_minus_s(
            e_film in 1.0f64..20.0, e_sub in 1.0f64..20.0, gap in 1.0f64..5.0,
            d in 1e-9f64..1e-7, xi in 1e13f64..1e16,
        ) {
            let s = MirrorStack::film_on_substrate(
                DielectricModel::constant(e_film), d, DielectricModel::constant(e_sub)).unwrap();
            let rp = r_stack(&s, gap, xi, 0.0, Polarization::P).unwrap();
            let rs = r_stack(&s, gap, xi, 0.0, Polarization::S).unwrap();
            prop_assert!((rp + rs).abs() < 1e-13);
        }

        #[test]
        fn transmission_is_bounded(
            g in 0.0f64..1.0, gm in 0.01f64..0.2, length in 50e-9f64..500e-9,
            d in 5e-9f64..50e-9, k in 1usize..200,
        ) {
            let w0 = 5e15;
            let gap = DielectricModel::Lorentz(LorentzMedium::new(w0, gm * w0, g * w0, 1.77).unwrap());
            let stack = Multilayer::fabry_perot(
                DielectricModel::constant(2.1),
                DielectricModel::Drude(DrudeMetal::gold()),
                d, gap, length,
            );
            let t = transmission(&stack, w0 * 0.02 * k as f64).unwrap();
            prop_assert!((0.0..=1.0).contains(&t));
        }
    }
}
