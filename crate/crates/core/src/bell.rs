//! Berry phase imprinted on one side of a spin singlet and its effect on
//! CHSH correlations.
//!
//! After the echo only the left particle carries the phase, and up to a
//! global phase the pair is `(|↑↓⟩ − e^{−2iγ}|↓↑⟩)/√2` with `γ ≡ γ₊`. The
//! correlation of analyzers `a = (α₁, α₂)`, `b = (β₁, β₂)` is
//!
//! ```text
//! E(a, b) = −cos α₁ cos β₁ − cos(α₂ − β₂ + 2γ) sin α₁ sin β₁
//! ```
//!
//! so the phase acts only through the azimuthal difference and can be
//! undone by rotating one measurement plane by `2γ`.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::optimize::refine_coordinates;
use crate::quantum::{
    observable, pair_expectation, projector, MeasurementDirection, PairState, Sign,
};
use crate::scalar::Real;

/// The imprinted Berry phase γ ≡ γ₊, with `|γ| ≤ 2π`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BerryParameter<T> {
    gamma: T,
}

impl<T: Real> BerryParameter<T> {
    pub fn new(gamma: T) -> Result<Self> {
        if !gamma.is_finite() || gamma.abs() > T::TAU() + T::epsilon() * T::lit(8.0) {
            return Err(invalid("gamma", format!("{gamma} outside [−2π, 2π]")));
        }
        Ok(Self { gamma })
    }

    /// `γ₊(ϑ) = −π(1 − cos ϑ)` for a field tilt ϑ.
    pub fn from_tilt(tilt: T) -> Result<Self> {
        Self::new(-T::PI() * (T::one() - tilt.cos()))
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    /// Field tilt producing `|γ|`: `ϑ = arccos(1 − |γ|/π)`, in `[0, π]`.
    pub fn tilt(&self) -> T {
        let c = (T::one() - self.gamma.abs() / T::PI())
            .max(-T::one())
            .min(T::one());
        c.acos()
    }

    /// Interferometer phase of the path⊗spin state, `γ_B = −2γ`.
    pub fn interferometer_phase(&self) -> T {
        -T::two() * self.gamma
    }

    pub fn from_interferometer_phase(gamma_b: T) -> Result<Self> {
        Self::new(-gamma_b * T::half())
    }
}

/// The four analyzer directions of one CHSH run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BellSetting<T> {
    pub a: MeasurementDirection<T>,
    pub a_prime: MeasurementDirection<T>,
    pub b: MeasurementDirection<T>,
    pub b_prime: MeasurementDirection<T>,
}

impl<T: Real> BellSetting<T> {
    /// α₁ = 0, α′₁ = π/2, β₁ = π/4, β′₁ = 3π/4, all azimuthal angles zero.
    pub fn standard() -> Self {
        let pi = T::PI();
        Self::zero_azimuth(&BellAngles {
            alpha1p: pi / T::two(),
            beta1: pi / T::lit(4.0),
            beta1p: T::lit(3.0) * pi / T::lit(4.0),
        })
    }

    /// `a` along `n`, the other three in the zero-azimuth plane.
    pub fn zero_azimuth(angles: &BellAngles<T>) -> Self {
        Self {
            a: MeasurementDirection::new(T::zero(), T::zero()),
            a_prime: MeasurementDirection::in_plane(angles.alpha1p),
            b: MeasurementDirection::in_plane(angles.beta1),
            b_prime: MeasurementDirection::in_plane(angles.beta1p),
        }
    }
}

/// `(|↑↓⟩ − |↓↑⟩)/√2`.
pub fn singlet<T: Real>() -> PairState<T> {
    let s = T::FRAC_1_SQRT_2();
    let z = Complex::new(T::zero(), T::zero());
    PairState::from_raw([
        z,
        Complex::new(s, T::zero()),
        Complex::new(-s, T::zero()),
        z,
    ])
}

/// `(|↑↓⟩ + |↓↑⟩)/√2`.
pub fn triplet_zero<T: Real>() -> PairState<T> {
    let s = T::FRAC_1_SQRT_2();
    let z = Complex::new(T::zero(), T::zero());
    PairState::from_raw([z, Complex::new(s, T::zero()), Complex::new(s, T::zero()), z])
}

/// Applies the left-side phase `diag(1, e^{−2iγ}) ⊗ 𝟙`.
///
/// On the singlet this is `(|↑↓⟩ − e^{−2iγ}|↓↑⟩)/√2`, the echo output with
/// the global phase `e^{iγ}` dropped. Other inputs get the same left-side
/// unitary, though the closed forms in this module assume the singlet.
pub fn imprint_berry<T: Real>(state: &PairState<T>, gamma: &BerryParameter<T>) -> PairState<T> {
    let p = Complex::from_polar(T::one(), -T::two() * gamma.gamma);
    let a = state.amps();
    PairState::from_raw([a[0], a[1], a[2] * p, a[3] * p])
}

fn azimuthal_factor<T: Real>(
    gamma: &BerryParameter<T>,
    a: &MeasurementDirection<T>,
    b: &MeasurementDirection<T>,
) -> T {
    (a.azimuthal() - b.azimuthal() + T::two() * gamma.gamma).cos()
}

/// Closed-form joint probability of outcomes `signs` on the imprinted singlet.
pub fn joint_probability<T: Real>(
    gamma: &BerryParameter<T>,
    a: &MeasurementDirection<T>,
    b: &MeasurementDirection<T>,
    signs: (Sign, Sign),
) -> T {
    let k = azimuthal_factor(gamma, a, b);
    let corr = a.polar().cos() * b.polar().cos() + k * a.polar().sin() * b.polar().sin();
    let s = signs.0.value::<T>() * signs.1.value::<T>();
    (T::one() - s * corr) / T::lit(4.0)
}

/// Closed-form `E(a, b)`.
pub fn correlation<T: Real>(
    gamma: &BerryParameter<T>,
    a: &MeasurementDirection<T>,
    b: &MeasurementDirection<T>,
) -> T {
    let k = azimuthal_factor(gamma, a, b);
    -a.polar().cos() * b.polar().cos() - k * a.polar().sin() * b.polar().sin()
}

/// `E(a, b)` evaluated on an arbitrary pair state with projector-built observables.
pub fn correlation_on_state<T: Real>(
    state: &PairState<T>,
    a: &MeasurementDirection<T>,
    b: &MeasurementDirection<T>,
) -> Result<T> {
    pair_expectation(state, &observable(a), &observable(b))
}

/// Joint probability evaluated as `⟨ψ|P_s(a) ⊗ P_t(b)|ψ⟩`.
pub fn joint_probability_on_state<T: Real>(
    state: &PairState<T>,
    a: &MeasurementDirection<T>,
    b: &MeasurementDirection<T>,
    signs: (Sign, Sign),
) -> Result<T> {
    pair_expectation(state, &projector(a, signs.0), &projector(b, signs.1))
}

/// `S = |f₁| + |f₂|` with its two inner terms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SValue<T> {
    pub s: T,
    /// `E(a, b) − E(a, b′)`.
    pub f1: T,
    /// `E(a′, b) + E(a′, b′)`.
    pub f2: T,
}

pub fn s_function<T: Real>(gamma: &BerryParameter<T>, setting: &BellSetting<T>) -> SValue<T> {
    let e = |x: &MeasurementDirection<T>, y: &MeasurementDirection<T>| correlation(gamma, x, y);
    let f1 = e(&setting.a, &setting.b) - e(&setting.a, &setting.b_prime);
    let f2 = e(&setting.a_prime, &setting.b) + e(&setting.a_prime, &setting.b_prime);
    SValue {
        s: f1.abs() + f2.abs(),
        f1,
        f2,
    }
}

/// Bell angles with the `b`-side measurement plane rotated by `2γ`:
/// `a = (0, 0)`, `a′ = (π/2, 0)`, `b = (π/4, 2γ)`, `b′ = (3π/4, 2γ)`.
/// Reaches `S = 2√2` for every γ.
pub fn compensated_setting<T: Real>(gamma: &BerryParameter<T>) -> BellSetting<T> {
    let pi = T::PI();
    let shift = T::two() * gamma.gamma;
    BellSetting {
        a: MeasurementDirection::new(T::zero(), T::zero()),
        a_prime: MeasurementDirection::new(pi / T::two(), T::zero()),
        b: MeasurementDirection::new(pi / T::lit(4.0), shift),
        b_prime: MeasurementDirection::new(T::lit(3.0) * pi / T::lit(4.0), shift),
    }
}

/// Sign pattern of the inner S-terms on a stationary branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `f₁ < 0`, `f₂ < 0`; `β₁ = +arctan(cos 2γ)`.
    F1NegF2Neg,
    /// `f₁ < 0`, `f₂ > 0`; `β₁ = −arctan(cos 2γ)`.
    F1NegF2Pos,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::F1NegF2Neg, Branch::F1NegF2Pos];

    /// Signs `(s₁, s₂)` with `S = s₁f₁ + s₂f₂` on this branch.
    fn signs<T: Real>(self) -> (T, T) {
        match self {
            Branch::F1NegF2Neg => (-T::one(), -T::one()),
            Branch::F1NegF2Pos => (-T::one(), T::one()),
        }
    }
}

/// Polar angles `(α′₁, β₁, β′₁)` of a zero-azimuth setting with `α = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BellAngles<T> {
    pub alpha1p: T,
    pub beta1: T,
    pub beta1p: T,
}

/// Stationary Bell angles with all azimuthal angles zero:
/// `β₁ = ±arctan(cos 2γ)`, `β′₁ = π − β₁`, `α′₁ = π/2`.
pub fn bell_angles<T: Real>(gamma: &BerryParameter<T>, branch: Branch) -> BellAngles<T> {
    let b = (T::two() * gamma.gamma).cos().atan();
    let beta1 = match branch {
        Branch::F1NegF2Neg => b,
        Branch::F1NegF2Pos => -b,
    };
    BellAngles {
        alpha1p: T::FRAC_PI_2(),
        beta1,
        beta1p: T::PI() - beta1,
    }
}

/// `S` for `α = 0` and zero azimuthal angles, straight from the polar angles.
pub fn s_zero_azimuth<T: Real>(gamma: &BerryParameter<T>, angles: &BellAngles<T>) -> SValue<T> {
    let (f1, f2) = inner_terms(gamma, angles);
    SValue {
        s: f1.abs() + f2.abs(),
        f1,
        f2,
    }
}

fn inner_terms<T: Real>(gamma: &BerryParameter<T>, x: &BellAngles<T>) -> (T, T) {
    let c = (T::two() * gamma.gamma).cos();
    let (sb, cb) = x.beta1.sin_cos();
    let (sbp, cbp) = x.beta1p.sin_cos();
    let (sa, ca) = x.alpha1p.sin_cos();
    let f1 = -cb + cbp;
    let f2 = -ca * (cb + cbp) - c * sa * (sb + sbp);
    (f1, f2)
}

/// `2·sqrt(1 + cos² 2γ)`: S at the Bell angles of either branch.
pub fn smax_closed_form<T: Real>(gamma: &BerryParameter<T>) -> T {
    let c = (T::two() * gamma.gamma).cos();
    T::two() * (T::one() + c * c).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    /// S evaluated at the Bell angles.
    Analytic,
    /// Exhaustive 0.5° grid plus golden-section refinement.
    Grid,
}

/// Maximal S over `(α′₁, β₁, β′₁)` with `α = 0` and zero azimuthal angles.
pub fn max_s<T: Real>(gamma: &BerryParameter<T>, method: Method) -> T {
    match method {
        Method::Analytic => s_zero_azimuth(gamma, &bell_angles(gamma, Branch::F1NegF2Neg)).s,
        Method::Grid => grid_max_s(gamma, &GridOptions::default()).s,
    }
}

/// Resolution and refinement of the grid oracle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridOptions {
    /// Grid spacing in degrees.
    pub step_deg: f64,
    /// Coordinate-wise golden-section sweeps after the grid pass.
    pub sweeps: usize,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            step_deg: 0.5,
            sweeps: 3,
        }
    }
}

/// Result of a grid search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridMax<T> {
    pub s: T,
    pub angles: BellAngles<T>,
    /// Best value on the raw grid, before refinement.
    pub grid_s: T,
    pub grid_angles: BellAngles<T>,
    pub f1: T,
    pub f2: T,
}

impl<T: Real> GridMax<T> {
    /// Branch whose sign pattern the argmax falls in, if any. The argmax of
    /// the unconstrained search is one representative of a symmetric set, so
    /// it may also land in a pattern with `f₁ > 0`.
    pub fn branch(&self) -> Option<Branch> {
        match (self.f1 <= T::zero(), self.f2 <= T::zero()) {
            (true, true) => Some(Branch::F1NegF2Neg),
            (true, false) => Some(Branch::F1NegF2Pos),
            _ => None,
        }
    }
}

/// Axis of the grid: `count` points `start + i·step`.
struct Axis<T> {
    values: Vec<T>,
    cos: Vec<T>,
    sin: Vec<T>,
}

impl<T: Real> Axis<T> {
    fn new(start_deg: f64, stop_deg: f64, step_deg: f64, inclusive: bool) -> Self {
        let span = (stop_deg - start_deg) / step_deg;
        let n = if inclusive {
            span.round() as usize + 1
        } else {
            span.round() as usize
        };
        let values: Vec<T> = (0..n)
            .map(|i| T::lit(start_deg + step_deg * i as f64).to_radians())
            .collect();
        let cos = values.iter().map(|v| v.cos()).collect();
        let sin = values.iter().map(|v| v.sin()).collect();
        Self { values, cos, sin }
    }
}

/// How the objective is formed from the inner terms.
#[derive(Clone, Copy)]
enum Objective<T> {
    /// `|f₁| + |f₂|`.
    Unconstrained,
    /// `s₁f₁ + s₂f₂` restricted to `s₁f₁ ≥ 0`, `s₂f₂ ≥ 0`.
    Signed(T, T),
}

struct Candidate<T> {
    value: T,
    index: (usize, usize, usize),
}

fn better<T: Real>(a: Candidate<T>, b: Candidate<T>) -> Candidate<T> {
    // Deterministic: larger value wins, ties go to the lower grid index.
    if b.value > a.value || (b.value == a.value && b.index < a.index) {
        b
    } else {
        a
    }
}

fn grid_search<T: Real>(
    gamma: &BerryParameter<T>,
    alpha: &Axis<T>,
    beta: &Axis<T>,
    beta_p: &Axis<T>,
    objective: Objective<T>,
) -> Option<Candidate<T>> {
    let c = (T::two() * gamma.gamma).cos();
    let na = alpha.values.len();
    (0..beta.values.len())
        .into_par_iter()
        .filter_map(|ib| {
            let (cb, sb) = (beta.cos[ib], beta.sin[ib]);
            let mut best: Option<Candidate<T>> = None;
            for ibp in 0..beta_p.values.len() {
                let (cbp, sbp) = (beta_p.cos[ibp], beta_p.sin[ibp]);
                let f1 = cbp - cb;
                // f₂(α′) = p cos α′ + q sin α′
                let p = -(cb + cbp);
                let q = -c * (sb + sbp);
                let (head, s2) = match objective {
                    Objective::Unconstrained => (f1.abs(), T::one()),
                    Objective::Signed(s1, s2) => {
                        if s1 * f1 < T::zero() {
                            continue;
                        }
                        (s1 * f1, s2)
                    }
                };
                let floor = best.as_ref().map(|b| b.value);
                // Fast pass: best achievable tail for this (β, β′).
                let tail = match objective {
                    Objective::Unconstrained => alpha
                        .cos
                        .iter()
                        .zip(&alpha.sin)
                        .map(|(&ca, &sa)| (p * ca + q * sa).abs())
                        .fold(T::neg_infinity(), T::max),
                    Objective::Signed(..) => alpha
                        .cos
                        .iter()
                        .zip(&alpha.sin)
                        .map(|(&ca, &sa)| s2 * (p * ca + q * sa))
                        .fold(T::neg_infinity(), T::max),
                };
                if tail < T::zero() {
                    continue;
                }
                let total = head + tail;
                if floor.is_some_and(|f| total <= f) {
                    continue;
                }
                // Locate the first α′ reaching the tail.
                let ia = (0..na)
                    .find(|&k| {
                        let v = p * alpha.cos[k] + q * alpha.sin[k];
                        let v = match objective {
                            Objective::Unconstrained => v.abs(),
                            Objective::Signed(..) => s2 * v,
                        };
                        v == tail
                    })
                    .expect("tail attained on the grid");
                best = Some(Candidate {
                    value: total,
                    index: (ib, ibp, ia),
                });
            }
            best
        })
        .reduce_with(better)
}

fn finish<T: Real>(
    gamma: &BerryParameter<T>,
    cand: Candidate<T>,
    alpha: &Axis<T>,
    beta: &Axis<T>,
    beta_p: &Axis<T>,
    objective: Objective<T>,
    opts: &GridOptions,
) -> GridMax<T> {
    let (ib, ibp, ia) = cand.index;
    let grid_angles = BellAngles {
        alpha1p: alpha.values[ia],
        beta1: beta.values[ib],
        beta1p: beta_p.values[ibp],
    };
    // Refine in σ = β + β′, δ = β′ − β with α′ maximized in closed form:
    // max over α′ of (p cos α′ + q sin α′) is sqrt(p² + q²). Coordinate
    // steps in (α′, β, β′) crawl along a valley whose curvature vanishes
    // like cos⁴ 2γ near γ = π/4.
    let c = (T::two() * gamma.gamma).cos();
    let (s1, s2) = match objective {
        Objective::Unconstrained => (None, T::one()),
        Objective::Signed(s1, s2) => (Some(s1), s2),
    };
    let parts = |y: &[T; 2]| {
        let (b, bp) = ((y[0] - y[1]) * T::half(), (y[0] + y[1]) * T::half());
        let (sb, cb) = b.sin_cos();
        let (sbp, cbp) = bp.sin_cos();
        (b, bp, cbp - cb, -(cb + cbp), -c * (sb + sbp))
    };
    let profiled = |y: &[T; 2]| -> T {
        let (_, _, f1, p, q) = parts(y);
        let head = match s1 {
            None => f1.abs(),
            Some(s1) => s1 * f1,
        };
        head + p.hypot(q)
    };
    let y0 = [
        grid_angles.beta1 + grid_angles.beta1p,
        grid_angles.beta1p - grid_angles.beta1,
    ];
    let radius = T::two() * T::lit(opts.step_deg).to_radians();
    let (y, _) = refine_coordinates(profiled, y0, radius, opts.sweeps, T::lit(1e-12));
    let (beta1, beta1p, _, p, q) = parts(&y);
    let alpha1p = if p.hypot(q) > T::zero() {
        // s₂(p cos α′ + q sin α′) is largest along s₂(p, q).
        let a = (s2 * q).atan2(s2 * p);
        match objective {
            // |f₂| has period π in α′.
            Objective::Unconstrained => crate::scalar::wrap_two_pi(a) % T::PI(),
            Objective::Signed(..) => a,
        }
    } else {
        grid_angles.alpha1p
    };
    let angles = BellAngles {
        alpha1p,
        beta1,
        beta1p,
    };
    let v = s_zero_azimuth(gamma, &angles);
    GridMax {
        s: v.s,
        angles,
        grid_s: cand.value,
        grid_angles,
        f1: v.f1,
        f2: v.f2,
    }
}

/// Exhaustive search for the maximal S with `α = 0` and zero azimuths.
///
/// S is invariant under `α′ → α′ + π`, under `(β, β′) → (β + π, β′ + π)` and
/// under negating all three angles, so the grid covers one fundamental
/// domain: `α′₁ ∈ [0°, 90°]`, `β₁ ∈ [−90°, 90°]`, `β′₁ ∈ [0°, 360°)`.
pub fn grid_max_s<T: Real>(gamma: &BerryParameter<T>, opts: &GridOptions) -> GridMax<T> {
    let alpha = Axis::new(0.0, 90.0, opts.step_deg, true);
    let beta = Axis::new(-90.0, 90.0, opts.step_deg, true);
    let beta_p = Axis::new(0.0, 360.0, opts.step_deg, false);
    let obj = Objective::Unconstrained;
    let cand = grid_search(gamma, &alpha, &beta, &beta_p, obj).expect("nonempty grid");
    finish(gamma, cand, &alpha, &beta, &beta_p, obj, opts)
}

/// Grid search restricted to one branch's sign pattern.
///
/// Covers `α′₁ ∈ [0°, 180°]`, `β₁ ∈ [−90°, 90°]`, `β′₁ ∈ [0°, 360°)`. The
/// only sign-preserving symmetries of S are `α′ → α′ + π` combined with
/// `β ↔ β′ + π`, and negation of all angles, so `α′₁ ∈ [0°, 180°]` picks one
/// representative; the `β₁` window fixes the `β₁ ↔ β′₁` interchange with
/// `cos β₁ ≥ 0`.
pub fn grid_branch_max<T: Real>(
    gamma: &BerryParameter<T>,
    branch: Branch,
    opts: &GridOptions,
) -> GridMax<T> {
    let alpha = Axis::new(0.0, 180.0, opts.step_deg, true);
    let beta = Axis::new(-90.0, 90.0, opts.step_deg, true);
    let beta_p = Axis::new(0.0, 360.0, opts.step_deg, false);
    let (s1, s2) = branch.signs::<T>();
    let obj = Objective::Signed(s1, s2);
    let cand = grid_search(gamma, &alpha, &beta, &beta_p, obj).expect("branch region nonempty");
    finish(gamma, cand, &alpha, &beta, &beta_p, obj, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::phase_insensitive_distance;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

    fn g(x: f64) -> BerryParameter<f64> {
        BerryParameter::new(x).unwrap()
    }

    fn dir(p: f64, a: f64) -> MeasurementDirection<f64> {
        MeasurementDirection::new(p, a)
    }

    #[test]
    fn singlet_amplitudes() {
        let a = singlet::<f64>().amps();
        let s = 0.5_f64.sqrt();
        assert!((a[1].re - s).abs() < 1e-15 && (a[2].re + s).abs() < 1e-15);
        assert_eq!(a[0].norm(), 0.0);
        assert_eq!(a[3].norm(), 0.0);
    }

    #[test]
    fn singlet_isotropy_without_phase() {
        let z = g(0.0);
        let e1 = correlation(&z, &dir(0.3, 1.0), &dir(1.1, 1.0));
        let e2 = correlation(&z, &dir(1.3, 1.0), &dir(2.1, 1.0));
        assert!((e1 - e2).abs() < 1e-15);
        assert!((e1 + 0.8_f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn imprint_interpolates_bell_states() {
        let s = singlet::<f64>();
        let d = |x: &PairState<f64>, y: &PairState<f64>| phase_insensitive_distance(x, y).unwrap();
        assert!(d(&imprint_berry(&s, &g(0.0)), &s) < 1e-12);
        assert!(d(&imprint_berry(&s, &g(FRAC_PI_2)), &triplet_zero()) < 1e-12);
        assert!(d(&imprint_berry(&s, &g(-FRAC_PI_2)), &triplet_zero()) < 1e-12);
        assert!(d(&imprint_berry(&s, &g(PI)), &s) < 1e-12);
    }

    #[test]
    fn berry_parameter_domain_and_tilt() {
        assert!(BerryParameter::new(7.0).is_err());
        assert!(BerryParameter::new(f64::NAN).is_err());
        assert!((g(-FRAC_PI_2).tilt() - PI / 3.0).abs() < 1e-12);
        assert!((g(-PI).tilt() - FRAC_PI_2).abs() < 1e-12);
        assert!((g(-FRAC_PI_4).tilt().to_degrees() - 41.41).abs() < 5e-3);
        assert!((g(3.0 * PI / 4.0).tilt().to_degrees() - 75.52).abs() < 5e-3);
        let b = BerryParameter::from_tilt(PI / 3.0).unwrap();
        assert!((b.gamma() + FRAC_PI_2).abs() < 1e-12);
        assert!((b.interferometer_phase() - PI).abs() < 1e-12);
    }

    #[test]
    fn joint_probability_cases() {
        let z = g(0.0);
        let a = dir(0.9, 0.4);
        assert!(joint_probability(&z, &a, &a, (Sign::Plus, Sign::Plus)).abs() < 1e-15);
        let gamma = g(0.6);
        let a = dir(1.0, 0.0);
        let b = dir(0.3, 1.2);
        let b_comp = dir(0.3, 1.2 * 0.0 + 2.0 * 0.6);
        let p = joint_probability(&gamma, &a, &b_comp, (Sign::Plus, Sign::Plus));
        assert!((p - 0.25 * (1.0 - (1.0_f64 - 0.3).cos())).abs() < 1e-15);
        let total: f64 = [Sign::Plus, Sign::Minus]
            .iter()
            .flat_map(|&x| [Sign::Plus, Sign::Minus].map(move |y| (x, y)))
            .map(|sg| joint_probability(&gamma, &a, &b, sg))
            .sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn correlation_cases() {
        let gamma = g(0.8);
        let e = correlation(&gamma, &dir(1.0, 0.0), &dir(0.4, 1.6));
        assert!((e + 0.6_f64.cos()).abs() < 1e-15);
        for x in [0.0, 0.5, 2.0] {
            assert!((correlation(&g(x), &dir(0.0, 0.0), &dir(0.0, 1.0)) + 1.0).abs() < 1e-15);
        }
        let q = g(FRAC_PI_4);
        let (a, b) = (dir(FRAC_PI_2, 0.7), dir(FRAC_PI_2, 0.7));
        assert!(correlation(&q, &a, &b).abs() < 1e-15);
        let on_state = correlation_on_state(&imprint_berry(&singlet(), &q), &a, &b).unwrap();
        assert!(on_state.abs() < 1e-12);
    }

    #[test]
    fn s_function_reference_values() {
        let std = BellSetting::standard();
        let s0 = s_function(&g(0.0), &std);
        assert!((s0.s - 2.0 * SQRT_2).abs() < 1e-12);
        assert!((s0.f1.abs() + s0.f2.abs() - s0.s).abs() < 1e-15);
        // At γ = π/4 the azimuthal term vanishes and E = −cos α cos β.
        assert!((s_function(&g(FRAC_PI_4), &std).s - SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn compensated_setting_values() {
        let c0 = compensated_setting(&g(0.0));
        assert_eq!(c0, BellSetting::standard());
        let c = compensated_setting(&g(PI / 3.0));
        assert!((s_function(&g(PI / 3.0), &c).s - 2.0 * SQRT_2).abs() < 1e-12);
        // The b-side plane is rotated by 2γ relative to the a-side plane.
        let diff = crate::scalar::wrap_pi(c.b.azimuthal() - c.a.azimuthal());
        assert!((diff - crate::scalar::wrap_pi(2.0 * PI / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn compensation_holds_modulo_pi() {
        // β₂ = β′₂ and α′₂ − β′₂ = −2γ + π still gives 2√2 at the polar Bell angles.
        for x in [0.0, 0.3, 1.1, 2.5] {
            let gamma = g(x);
            let mut set = compensated_setting(&gamma);
            set.b = dir(FRAC_PI_4, 2.0 * x - PI);
            set.b_prime = dir(3.0 * FRAC_PI_4, 2.0 * x - PI);
            assert!((s_function(&gamma, &set).s - 2.0 * SQRT_2).abs() < 1e-12);
        }
    }

    #[test]
    fn bell_angle_values() {
        let a = bell_angles(&g(0.0), Branch::F1NegF2Neg);
        assert!((a.beta1 - FRAC_PI_4).abs() < 1e-15);
        assert!((a.beta1p - 3.0 * FRAC_PI_4).abs() < 1e-15);
        assert_eq!(a.alpha1p, FRAC_PI_2);
        let a = bell_angles(&g(FRAC_PI_4), Branch::F1NegF2Neg);
        assert!(a.beta1.abs() < 1e-15 && (a.beta1p - PI).abs() < 1e-15);
        let a = bell_angles(&g(FRAC_PI_2), Branch::F1NegF2Neg);
        assert!((a.beta1 + FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn branch_signs_at_bell_angles() {
        for x in [0.1, 0.5, 1.0, 1.4, 2.0] {
            let gamma = g(x);
            let v = s_zero_azimuth(&gamma, &bell_angles(&gamma, Branch::F1NegF2Neg));
            assert!(v.f1 < 0.0 && v.f2 < 0.0, "{x}: {v:?}");
            let v = s_zero_azimuth(&gamma, &bell_angles(&gamma, Branch::F1NegF2Pos));
            assert!(v.f1 < 0.0 && v.f2 > 0.0, "{x}: {v:?}");
        }
    }

    #[test]
    fn zero_azimuth_shortcut_matches_general() {
        let gamma = g(0.7);
        let ang = BellAngles {
            alpha1p: 1.2,
            beta1: -0.4,
            beta1p: 2.9,
        };
        let a = s_zero_azimuth(&gamma, &ang);
        let b = s_function(&gamma, &BellSetting::zero_azimuth(&ang));
        assert!((a.s - b.s).abs() < 1e-14);
        assert!((a.f1 - b.f1).abs() < 1e-14 && (a.f2 - b.f2).abs() < 1e-14);
    }

    #[test]
    fn max_s_reference_values() {
        for (x, want) in [
            (0.0, 2.0 * SQRT_2),
            (FRAC_PI_4, 2.0),
            (FRAC_PI_2, 2.0 * SQRT_2),
        ] {
            let a = max_s(&g(x), Method::Analytic);
            assert!((a - want).abs() < 1e-12);
        }
    }

    #[test]
    fn coarse_grid_matches_closed_form() {
        let opts = GridOptions {
            step_deg: 2.0,
            sweeps: 3,
        };
        for x in [0.0, 0.3, FRAC_PI_4, 1.2] {
            let gamma = g(x);
            let m = grid_max_s(&gamma, &opts);
            assert!((m.s - smax_closed_form(&gamma)).abs() < 1e-9, "{x}: {m:?}");
            for br in Branch::BOTH {
                let b = grid_branch_max(&gamma, br, &opts);
                assert!((b.s - smax_closed_form(&gamma)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn grid_f32() {
        let gamma = BerryParameter::<f32>::new(0.2).unwrap();
        let m = grid_max_s(
            &gamma,
            &GridOptions {
                step_deg: 3.0,
                sweeps: 2,
            },
        );
        assert!((m.s - smax_closed_form(&gamma)).abs() < 1e-4);
    }
}
