//! Speed laws, look-ahead kernels and the cell weights that discretize the
//! nonlocal convolution.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Assumption, Error, Result};
use crate::quadrature::adaptive_simpson;

/// Sample count used when bounding the derivative of a custom speed law.
pub const VPRIME_SAMPLES: usize = 10_000;
/// Bisection cap for inverting custom speed laws.
pub const INVERSE_MAX_ITER: usize = 200;
/// Absolute tolerance for quadrature of custom kernels.
pub const CUSTOM_QUAD_TOL: f64 = 1e-12;
/// Tolerance on the unit-mass condition in [`validate_kernel`].
pub const NORMALIZATION_TOL: f64 = 1e-10;

type ScalarFn = dyn Fn(f64) -> f64 + Send + Sync;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VelocityKind {
    Linear,
    CustomSmooth,
}

#[derive(Clone)]
enum SpeedLaw {
    /// `v(rho) = v_free * (1 - rho / rho_max)`.
    Linear { v_free: f64 },
    Custom {
        name: Arc<str>,
        eval: Arc<ScalarFn>,
        deriv: Arc<ScalarFn>,
    },
}

/// A strictly decreasing speed law on `[0, rho_max]`.
///
/// Immutable once built; clones share any custom callables.
#[derive(Clone)]
pub struct VelocityModel {
    law: SpeedLaw,
    rho_max: f64,
}

impl fmt::Debug for VelocityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.law {
            SpeedLaw::Linear { v_free } => f
                .debug_struct("VelocityModel::Linear")
                .field("v_free", v_free)
                .field("rho_max", &self.rho_max)
                .finish(),
            SpeedLaw::Custom { name, .. } => f
                .debug_struct("VelocityModel::Custom")
                .field("name", name)
                .field("rho_max", &self.rho_max)
                .finish(),
        }
    }
}

impl VelocityModel {
    /// Greenshields-type law `v(rho) = v_free (1 - rho/rho_max)`.
    pub fn linear(v_free: f64, rho_max: f64) -> Result<Self> {
        if !(v_free > 0.0 && v_free.is_finite()) {
            return Err(Error::assumption(
                Assumption::SpeedLaw,
                format!("free-flow speed must be positive, got {v_free}"),
            ));
        }
        if !(rho_max > 0.0 && rho_max.is_finite()) {
            return Err(Error::assumption(
                Assumption::SpeedLaw,
                format!("rho_max must be positive, got {rho_max}"),
            ));
        }
        Ok(Self {
            law: SpeedLaw::Linear { v_free },
            rho_max,
        })
    }

    /// A smooth custom law with an explicit derivative.
    ///
    /// The law is sampled on `[0, rho_max]` to confirm it is strictly
    /// decreasing with `v(rho_max) >= 0`.
    pub fn custom<F, D>(name: &str, rho_max: f64, eval: F, deriv: D) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(rho_max > 0.0 && rho_max.is_finite()) {
            return Err(Error::assumption(
                Assumption::SpeedLaw,
                format!("rho_max must be positive, got {rho_max}"),
            ));
        }
        let model = Self {
            law: SpeedLaw::Custom {
                name: Arc::from(name),
                eval: Arc::new(eval),
                deriv: Arc::new(deriv),
            },
            rho_max,
        };
        let n = 1000;
        let mut prev = model.speed(0.0);
        for i in 1..=n {
            let rho = rho_max * i as f64 / n as f64;
            let v = model.speed(rho);
            if !v.is_finite() || v >= prev {
                return Err(Error::assumption(
                    Assumption::SpeedLaw,
                    format!("speed law `{name}` is not strictly decreasing near rho = {rho}"),
                ));
            }
            prev = v;
        }
        if prev < 0.0 {
            return Err(Error::assumption(
                Assumption::SpeedLaw,
                format!("v(rho_max) = {prev} is negative"),
            ));
        }
        Ok(model)
    }

    pub fn kind(&self) -> VelocityKind {
        match self.law {
            SpeedLaw::Linear { .. } => VelocityKind::Linear,
            SpeedLaw::Custom { .. } => VelocityKind::CustomSmooth,
        }
    }

    pub fn rho_max(&self) -> f64 {
        self.rho_max
    }

    /// Free-flow speed of the linear law, `None` for custom laws.
    pub fn v_free(&self) -> Option<f64> {
        match self.law {
            SpeedLaw::Linear { v_free } => Some(v_free),
            SpeedLaw::Custom { .. } => None,
        }
    }

    /// `v(0)`.
    pub fn v0(&self) -> f64 {
        self.speed(0.0)
    }

    /// Domain-checked evaluation of `v(rho)`.
    pub fn velocity(&self, rho: f64) -> Result<f64> {
        if !(0.0..=self.rho_max).contains(&rho) {
            return Err(Error::Domain {
                what: "density",
                value: rho,
                lo: 0.0,
                hi: self.rho_max,
            });
        }
        Ok(self.speed(rho))
    }

    /// Unchecked evaluation for solver hot loops; callers keep `rho` in range.
    #[inline]
    pub fn speed(&self, rho: f64) -> f64 {
        match &self.law {
            SpeedLaw::Linear { v_free } => v_free * (1.0 - rho / self.rho_max),
            SpeedLaw::Custom { eval, .. } => eval(rho),
        }
    }

    /// `v'(rho)`.
    #[inline]
    pub fn deriv(&self, rho: f64) -> f64 {
        match &self.law {
            SpeedLaw::Linear { v_free } => -v_free / self.rho_max,
            SpeedLaw::Custom { deriv, .. } => deriv(rho),
        }
    }

    /// Equilibrium density `rho_bar = v^{-1}(vbar)`.
    pub fn velocity_inverse(&self, vbar: f64) -> Result<f64> {
        let v0 = self.v0();
        let v_jam = self.speed(self.rho_max);
        if !(vbar < v0) {
            return Err(Error::ControlInfeasible { vbar, v0 });
        }
        if !(vbar >= v_jam) {
            return Err(Error::Domain {
                what: "target speed",
                value: vbar,
                lo: v_jam,
                hi: v0,
            });
        }
        if vbar == v_jam {
            return Ok(self.rho_max);
        }
        match self.law {
            SpeedLaw::Linear { v_free } => Ok(self.rho_max * (1.0 - vbar / v_free)),
            SpeedLaw::Custom { .. } => {
                let (mut lo, mut hi) = (0.0_f64, self.rho_max);
                for _ in 0..INVERSE_MAX_ITER {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.speed(mid) > vbar {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let (dlo, dhi) = ((self.speed(lo) - vbar).abs(), (self.speed(hi) - vbar).abs());
                Ok(if dlo <= dhi { lo } else { hi })
            }
        }
    }

    /// Upper bound `v'_max < 0` of `v'` over `[rho_min, rho_max]`.
    ///
    /// Exact for the linear law. Custom laws are sampled densely; an interior
    /// maximum is refined by golden-section search on its bracketing samples.
    pub fn vprime_max(&self, rho_min: f64) -> Result<f64> {
        if !(0.0..=self.rho_max).contains(&rho_min) {
            return Err(Error::Domain {
                what: "rho_min",
                value: rho_min,
                lo: 0.0,
                hi: self.rho_max,
            });
        }
        let bound = match self.law {
            SpeedLaw::Linear { v_free } => -v_free / self.rho_max,
            SpeedLaw::Custom { .. } => {
                let span = self.rho_max - rho_min;
                let at = |i: usize| rho_min + span * i as f64 / (VPRIME_SAMPLES - 1) as f64;
                let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
                for i in 0..VPRIME_SAMPLES {
                    let d = self.deriv(at(i));
                    if d > best {
                        best = d;
                        best_i = i;
                    }
                }
                if best_i > 0 && best_i < VPRIME_SAMPLES - 1 {
                    let refined = golden_max(|r| self.deriv(r), at(best_i - 1), at(best_i + 1));
                    best = best.max(refined);
                }
                best
            }
        };
        if !(bound < 0.0) {
            return Err(Error::assumption(
                Assumption::SpeedLaw,
                format!(
                    "v' reaches {bound} on [{rho_min}, {}]; need v'_max < 0",
                    self.rho_max
                ),
            ));
        }
        Ok(bound)
    }

    /// `sup |v'|` over `[0, rho_max]`; exact for the linear law, sampled
    /// and refined for custom laws.
    pub fn lipschitz(&self) -> f64 {
        match self.law {
            SpeedLaw::Linear { v_free } => v_free / self.rho_max,
            SpeedLaw::Custom { .. } => {
                let at = |i: usize| self.rho_max * i as f64 / (VPRIME_SAMPLES - 1) as f64;
                let (mut best_i, mut best) = (0, 0.0_f64);
                for i in 0..VPRIME_SAMPLES {
                    let d = self.deriv(at(i)).abs();
                    if d > best {
                        best = d;
                        best_i = i;
                    }
                }
                let lo = at(best_i.saturating_sub(1));
                let hi = at((best_i + 1).min(VPRIME_SAMPLES - 1));
                best.max(golden_max(|r| self.deriv(r).abs(), lo, hi))
            }
        }
    }
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..100 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    Constant,
    Linear,
    Concave,
    Custom,
}

impl KernelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            KernelKind::Constant => "constant",
            KernelKind::Linear => "linear",
            KernelKind::Concave => "concave",
            KernelKind::Custom => "custom",
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "constant" | "const" => Ok(KernelKind::Constant),
            "linear" | "lin" => Ok(KernelKind::Linear),
            "concave" | "conc" => Ok(KernelKind::Concave),
            other => Err(Error::Config(format!(
                "unknown kernel kind `{other}` (expected constant, linear or concave)"
            ))),
        }
    }
}

/// Look-ahead weight density supported on `[0, eta]`.
#[derive(Clone)]
pub struct Kernel {
    kind: KernelKind,
    eta: f64,
    custom: Option<Arc<ScalarFn>>,
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kernel")
            .field("kind", &self.kind)
            .field("eta", &self.eta)
            .finish()
    }
}

impl Kernel {
    /// One of the closed-form kernels; use [`Kernel::custom`] for anything else.
    pub fn new(kind: KernelKind, eta: f64) -> Result<Self> {
        if kind == KernelKind::Custom {
            return Err(Error::Config(
                "custom kernels need a density; use Kernel::custom".into(),
            ));
        }
        check_eta(eta)?;
        Ok(Self {
            kind,
            eta,
            custom: None,
        })
    }

    pub fn constant(eta: f64) -> Result<Self> {
        Self::new(KernelKind::Constant, eta)
    }

    pub fn linear(eta: f64) -> Result<Self> {
        Self::new(KernelKind::Linear, eta)
    }

    pub fn concave(eta: f64) -> Result<Self> {
        Self::new(KernelKind::Concave, eta)
    }

    /// Kernel given by an arbitrary density on `[0, eta]`. Admissibility is
    /// not enforced here; see [`validate_kernel`].
    pub fn custom<F>(eta: f64, density: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_eta(eta)?;
        Ok(Self {
            kind: KernelKind::Custom,
            eta,
            custom: Some(Arc::new(density)),
        })
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `W_eta(x)`, zero outside `[0, eta]`.
    pub fn density(&self, x: f64) -> f64 {
        if !(0.0..=self.eta).contains(&x) {
            return 0.0;
        }
        let eta = self.eta;
        match self.kind {
            KernelKind::Constant => 1.0 / eta,
            KernelKind::Linear => 2.0 * (eta - x) / (eta * eta),
            KernelKind::Concave => 3.0 * (eta * eta - x * x) / (2.0 * eta * eta * eta),
            KernelKind::Custom => (self.custom.as_ref().expect("custom density"))(x),
        }
    }

    /// `int_0^x W_eta`, with `x` clamped to `[0, eta]`.
    pub fn cumulative(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, self.eta);
        let eta = self.eta;
        match self.kind {
            KernelKind::Constant => x / eta,
            KernelKind::Linear => x * (2.0 * eta - x) / (eta * eta),
            KernelKind::Concave => x * (3.0 * eta * eta - x * x) / (2.0 * eta * eta * eta),
            KernelKind::Custom => {
                let w = self.custom.as_ref().expect("custom density");
                adaptive_simpson(&|y| w(y), 0.0, x, CUSTOM_QUAD_TOL)
            }
        }
    }

    /// `int_a^b W_eta` for `0 <= a <= b`.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        match self.kind {
            KernelKind::Custom => {
                let w = self.custom.as_ref().expect("custom density");
                let (a, b) = (a.clamp(0.0, self.eta), b.clamp(0.0, self.eta));
                adaptive_simpson(&|y| w(y), a, b, CUSTOM_QUAD_TOL)
            }
            _ => self.cumulative(b) - self.cumulative(a),
        }
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta.is_finite() {
        Ok(())
    } else {
        Err(Error::assumption(
            Assumption::Kernel,
            format!("nonlocal reach must be positive, got {eta}"),
        ))
    }
}

/// Number of whole cells covered by the look-ahead, `floor(eta/dx)`.
///
/// A relative slack of 1e-9 absorbs representation error, so `1/0.005` gives
/// 200 rather than 199.
pub fn stencil_len(eta: f64, dx: f64) -> usize {
    (eta / dx * (1.0 + 1e-9)).floor() as usize
}

/// Exact integrals of the kernel over consecutive cells of width `dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    pub gamma: Vec<f64>,
    pub dx: f64,
    pub eta: f64,
    /// Kernel mass beyond the truncated stencil, `1 - int_0^{K dx} W`.
    pub tail_mass: f64,
}

impl WeightTable {
    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.gamma.iter().sum()
    }
}

pub fn kernel_weights(kernel: &Kernel, dx: f64) -> Result<WeightTable> {
    let eta = kernel.eta();
    if !(dx > 0.0 && dx.is_finite()) {
        return Err(Error::Config(format!(
            "grid spacing must be positive, got {dx}"
        )));
    }
    let k = stencil_len(eta, dx);
    if k == 0 {
        return Err(Error::Config(format!(
            "grid spacing {dx} exceeds the nonlocal reach {eta}: empty stencil"
        )));
    }
    let edge = |i: usize| (i as f64 * dx).min(eta);
    let gamma: Vec<f64> = (0..k).map(|i| kernel.mass(edge(i), edge(i + 1))).collect();
    let tail_mass = kernel.mass(edge(k), eta);
    Ok(WeightTable {
        gamma,
        dx,
        eta,
        tail_mass,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelValidation {
    pub nonnegative: bool,
    pub non_increasing: bool,
    pub normalized: bool,
    /// Quadrature value of `int_0^eta W`.
    pub integral: f64,
}

impl KernelValidation {
    pub fn passed(&self) -> bool {
        self.nonnegative && self.non_increasing && self.normalized
    }
}

/// Samples the kernel on a uniform grid of `samples` points over `[0, eta]`
/// and integrates it independently of [`Kernel::cumulative`].
pub fn validate_kernel(kernel: &Kernel, samples: usize) -> Result<KernelValidation> {
    if samples < 2 {
        return Err(Error::Config(format!(
            "need at least 2 samples, got {samples}"
        )));
    }
    let eta = kernel.eta();
    let values: Vec<f64> = (0..samples)
        .map(|i| kernel.density(eta * i as f64 / (samples - 1) as f64))
        .collect();
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
    let nonnegative = values.iter().all(|&w| w >= 0.0);
    let non_increasing = values.windows(2).all(|p| p[1] <= p[0] + 1e-14 * scale);
    let integral = adaptive_simpson(&|x| kernel.density(x), 0.0, eta, 1e-13);
    Ok(KernelValidation {
        nonnegative,
        non_increasing,
        normalized: (integral - 1.0).abs() <= NORMALIZATION_TOL,
        integral,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn quadratic_law() -> VelocityModel {
        VelocityModel::custom("1-rho^2", 1.0, |r| 1.0 - r * r, |r| -2.0 * r).unwrap()
    }

    #[test]
    fn linear_speed_values() {
        let m = VelocityModel::linear(1.0, 1.0).unwrap();
        assert_eq!(m.velocity(0.5).unwrap(), 0.5);
        assert_eq!(m.velocity(0.0).unwrap(), 1.0);
        assert!(matches!(m.velocity(1.2), Err(Error::Domain { .. })));
        assert!(matches!(m.velocity(-0.1), Err(Error::Domain { .. })));
    }

    #[test]
    fn custom_speed_values() {
        let m = quadratic_law();
        assert_abs_diff_eq!(m.velocity(0.5).unwrap(), 0.75, epsilon = 1e-15);
        assert_eq!(m.kind(), VelocityKind::CustomSmooth);
    }

    #[test]
    fn inverse_examples() {
        let lin = VelocityModel::linear(1.0, 1.0).unwrap();
        assert_eq!(lin.velocity_inverse(0.5).unwrap(), 0.5);
        assert_eq!(lin.velocity_inverse(0.0).unwrap(), 1.0);

        let quad = quadratic_law();
        let rho = quad.velocity_inverse(0.75).unwrap();
        assert_abs_diff_eq!(rho, 0.5, epsilon = 1e-12);
        assert!((quad.speed(rho) - 0.75).abs() <= 1e-12);
        assert_eq!(quad.velocity_inverse(0.0).unwrap(), 1.0);
    }

    #[test]
    fn inverse_errors() {
        let lin = VelocityModel::linear(1.0, 1.0).unwrap();
        assert!(matches!(
            lin.velocity_inverse(1.0),
            Err(Error::ControlInfeasible { .. })
        ));
        assert!(matches!(
            lin.velocity_inverse(-0.1),
            Err(Error::Domain { .. })
        ));
        let shifted = VelocityModel::custom("shift", 1.0, |r| 1.2 - r, |_| -1.0).unwrap();
        assert!(matches!(
            shifted.velocity_inverse(0.1),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn vprime_max_linear_is_exact() {
        let lin = VelocityModel::linear(1.0, 1.0).unwrap();
        for rho_min in [0.0, 0.01, 0.5, 1.0] {
            assert_eq!(lin.vprime_max(rho_min).unwrap(), -1.0);
        }
    }

    #[test]
    fn vprime_max_custom() {
        // v' = -2 rho is maximal at the left end of the range
        let quad = quadratic_law();
        assert_abs_diff_eq!(quad.vprime_max(0.5).unwrap(), -1.0, epsilon = 1e-12);
        assert!(quad.vprime_max(0.0).is_err());

        // v' = -1 - (rho - 0.3)^2 has an interior maximum of -1 at rho = 0.3
        let bump = VelocityModel::custom(
            "bump",
            1.0,
            |r| 2.0 - r - (r - 0.3).powi(3) / 3.0 - 0.3f64.powi(3) / 3.0,
            |r| -1.0 - (r - 0.3) * (r - 0.3),
        )
        .unwrap();
        assert_abs_diff_eq!(bump.vprime_max(0.0).unwrap(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn lipschitz_constants() {
        assert_eq!(VelocityModel::linear(2.0, 4.0).unwrap().lipschitz(), 0.5);
        // |v'| = 2 rho peaks at rho_max
        assert_abs_diff_eq!(quadratic_law().lipschitz(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_increasing_law() {
        let err = VelocityModel::custom("up", 1.0, |r| r, |_| 1.0).unwrap_err();
        assert!(matches!(
            err,
            Error::Assumption {
                assumption: Assumption::SpeedLaw,
                ..
            }
        ));
    }

    #[test]
    fn kernel_weight_examples() {
        let c = kernel_weights(&Kernel::constant(1.0).unwrap(), 0.25).unwrap();
        assert_eq!(c.gamma, vec![0.25; 4]);

        let l = kernel_weights(&Kernel::linear(1.0).unwrap(), 0.5).unwrap();
        assert_abs_diff_eq!(l.gamma[0], 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(l.gamma[1], 0.25, epsilon = 1e-15);

        let q = kernel_weights(&Kernel::concave(1.0).unwrap(), 1.0).unwrap();
        assert_eq!(q.len(), 1);
        assert_abs_diff_eq!(q.gamma[0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn closed_forms_match_quadrature() {
        // independent route: integrate the densities numerically per cell
        for kind in [
            KernelKind::Constant,
            KernelKind::Linear,
            KernelKind::Concave,
        ] {
            let kernel = Kernel::new(kind, 1.3).unwrap();
            let table = kernel_weights(&kernel, 0.1).unwrap();
            for (k, g) in table.gamma.iter().enumerate() {
                let a = k as f64 * 0.1;
                let q = adaptive_simpson(&|x| kernel.density(x), a, a + 0.1, 1e-14);
                assert_abs_diff_eq!(*g, q, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn custom_kernel_uses_quadrature() {
        let k = Kernel::custom(1.0, |x| 2.0 * (1.0 - x)).unwrap();
        let t = kernel_weights(&k, 0.5).unwrap();
        assert_abs_diff_eq!(t.gamma[0], 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(t.gamma[1], 0.25, epsilon = 1e-12);
    }

    #[test]
    fn empty_stencil_is_rejected() {
        let k = Kernel::constant(1.0).unwrap();
        assert!(matches!(kernel_weights(&k, 1.5), Err(Error::Config(_))));
    }

    #[test]
    fn non_integer_ratio_reports_tail() {
        let k = Kernel::constant(1.0).unwrap();
        let t = kernel_weights(&k, 0.3).unwrap();
        assert_eq!(t.len(), 3);
        assert_abs_diff_eq!(t.tail_mass, 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(t.sum() + t.tail_mass, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn stencil_len_absorbs_representation_error() {
        assert_eq!(stencil_len(1.0, 5e-3), 200);
        assert_eq!(stencil_len(1.0, 2.5e-3), 400);
        assert_eq!(stencil_len(1.0, 0.1), 10);
        assert_eq!(stencil_len(1.0, 0.3), 3);
    }

    #[test]
    fn builtin_kernels_validate() {
        for kind in [
            KernelKind::Constant,
            KernelKind::Linear,
            KernelKind::Concave,
        ] {
            let report = validate_kernel(&Kernel::new(kind, 1.0).unwrap(), 101).unwrap();
            assert!(report.passed(), "{kind}: {report:?}");
        }
    }

    #[test]
    fn increasing_kernel_fails_monotonicity() {
        let k = Kernel::custom(1.0, |x| 2.0 * x).unwrap();
        let report = validate_kernel(&k, 11).unwrap();
        assert!(report.nonnegative);
        assert!(report.normalized);
        assert!(!report.non_increasing);

        let unnormalized = Kernel::custom(1.0, |x| x).unwrap();
        let report = validate_kernel(&unnormalized, 11).unwrap();
        assert!(!report.non_increasing && !report.normalized);
    }

    #[test]
    fn validate_needs_two_samples() {
        assert!(validate_kernel(&Kernel::constant(1.0).unwrap(), 1).is_err());
    }
}
