//! Spin-½ in a field of fixed magnitude rotating on a cone.
//!
//! `H(t) = ±ω₁ n(ϑ;t)·σ` with `n(ϑ;t) = (sin ϑ cos ω₀t, sin ϑ sin ω₀t, cos ϑ)`.
//! The `Reversed` orientation is the antiparallel field `−n(ϑ;t)`, whose axis
//! makes the polar angle `π − ϑ` with `z`; it swaps the energies of the two
//! eigenstate rays while leaving the rays themselves (and so their Berry
//! phases) unchanged. That swap is what the spin echo exploits.
//!
//! Phases are reported on the continuous branch of the instantaneous
//! eigenbasis gauge
//!
//! ```text
//! |↑_n;t⟩ =  cos(ϑ/2)|↑_z⟩ + sin(ϑ/2) e^{iω₀t}|↓_z⟩
//! |↓_n;t⟩ = −sin(ϑ/2)|↑_z⟩ + cos(ϑ/2) e^{iω₀t}|↓_z⟩
//! ```
//!
//! so one cycle gives `γ₊ = −π(1 − cos ϑ) ∈ [−2π, 0]` and
//! `γ₋ = −π(1 + cos ϑ)`, and a two-period echo gives `2γ±` without folding.

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::quantum::{inner, phase_insensitive_distance, Op2, SpinState};
use crate::scalar::{nearest_branch, wrap_pi, Real};
use crate::tol;

/// Minimum RK4 steps per rotation period accepted by [`evolve`].
pub const STEPS_PER_PERIOD_FLOOR: usize = 1000;

/// Larmor phase advanced per RK4 step by [`FieldConfig::recommended_steps`].
pub const LARMOR_PHASE_PER_STEP: f64 = 0.01;

/// Ratio ω₀/ω₁ used for oracle runs unless told otherwise.
pub const DEFAULT_ADIABATIC_RATIO: f64 = 1.0 / 200.0;

/// Above this ω₀/ω₁ the adiabatic picture is flagged as doubtful.
pub const ADIABATICITY_WARN: f64 = 0.1;

/// Cyclicity threshold of [`extract_phases`].
pub const CYCLIC_TOLERANCE: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// Field along `n(ϑ;t)`.
    Along,
    /// Field along `−n(ϑ;t)`.
    Reversed,
}

impl Orientation {
    fn sign<T: Real>(self) -> T {
        match self {
            Orientation::Along => T::one(),
            Orientation::Reversed => -T::one(),
        }
    }
}

/// One of the two instantaneous eigenstate rays `|↑_n;t⟩`, `|↓_n;t⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ray {
    Up,
    Down,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldConfig<T> {
    tilt: T,
    rotation_frequency: T,
    larmor_frequency: T,
    orientation: Orientation,
}

impl<T: Real> FieldConfig<T> {
    /// `tilt` ϑ ∈ [0, π/2], `rotation_frequency` ω₀ > 0, `larmor_frequency`
    /// ω₁ = μB/2 > 0.
    pub fn new(tilt: T, rotation_frequency: T, larmor_frequency: T) -> Result<Self> {
        if !tilt.is_finite() || tilt < T::zero() || tilt > T::FRAC_PI_2() + T::epsilon() {
            return Err(invalid("tilt", format!("{tilt} outside [0, π/2]")));
        }
        for (name, v) in [
            ("rotation_frequency", rotation_frequency),
            ("larmor_frequency", larmor_frequency),
        ] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(invalid(name, format!("{v} must be finite and > 0")));
            }
        }
        let cfg = Self {
            tilt: tilt.min(T::FRAC_PI_2()),
            rotation_frequency,
            larmor_frequency,
            orientation: Orientation::Along,
        };
        if cfg.adiabaticity() > T::lit(ADIABATICITY_WARN) {
            log::warn!(
                "ω₀/ω₁ = {} exceeds {ADIABATICITY_WARN}; evolution is not adiabatic",
                cfg.adiabaticity()
            );
        }
        Ok(cfg)
    }

    /// Field with ω₁ = 1 (time in units of 1/ω₁) and ω₀ = `ratio`.
    pub fn with_ratio(tilt: T, ratio: T) -> Result<Self> {
        Self::new(tilt, ratio, T::one())
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn reversed(self) -> Self {
        let o = match self.orientation {
            Orientation::Along => Orientation::Reversed,
            Orientation::Reversed => Orientation::Along,
        };
        self.with_orientation(o)
    }

    pub fn tilt(&self) -> T {
        self.tilt
    }

    pub fn rotation_frequency(&self) -> T {
        self.rotation_frequency
    }

    pub fn larmor_frequency(&self) -> T {
        self.larmor_frequency
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// ω₀/ω₁.
    pub fn adiabaticity(&self) -> T {
        self.rotation_frequency / self.larmor_frequency
    }

    pub fn is_adiabatic(&self) -> bool {
        self.adiabaticity() <= T::lit(ADIABATICITY_WARN)
    }

    /// τ = 2π/ω₀.
    pub fn period(&self) -> T {
        T::TAU() / self.rotation_frequency
    }

    /// Unit vector of the field at time `t`, orientation included.
    pub fn axis(&self, t: T) -> [T; 3] {
        let s = self.orientation.sign::<T>();
        let (st, ct) = self.tilt.sin_cos();
        let (sp, cp) = (self.rotation_frequency * t).sin_cos();
        [s * st * cp, s * st * sp, s * ct]
    }

    pub fn hamiltonian(&self, t: T) -> Op2<T> {
        let a = self.axis(t);
        let w = self.larmor_frequency;
        Op2::from_bloch([w * a[0], w * a[1], w * a[2]])
    }

    /// Energy of an eigenstate ray under this field.
    pub fn energy(&self, ray: Ray) -> T {
        let e = self.orientation.sign::<T>() * self.larmor_frequency;
        match ray {
            Ray::Up => e,
            Ray::Down => -e,
        }
    }

    /// `|↑_n;t⟩` or `|↓_n;t⟩`, independent of the orientation.
    pub fn ray_ket(&self, ray: Ray, t: T) -> SpinState<T> {
        let (s, c) = (self.tilt * T::half()).sin_cos();
        let e = Complex::from_polar(T::one(), self.rotation_frequency * t);
        let amps = match ray {
            Ray::Up => [Complex::new(c, T::zero()), e * s],
            Ray::Down => [Complex::new(-s, T::zero()), e * c],
        };
        SpinState::from_raw(amps)
    }

    /// Smallest step count [`evolve`] accepts for `duration`.
    pub fn step_floor(&self, duration: T) -> usize {
        let periods = (duration / self.period()).to_f64_lossy();
        ((STEPS_PER_PERIOD_FLOOR as f64 * periods - 1e-9).ceil() as usize).max(1)
    }

    /// Step count resolving both the rotation and the Larmor precession.
    pub fn recommended_steps(&self, duration: T) -> usize {
        let larmor = (duration * self.larmor_frequency).to_f64_lossy() / LARMOR_PHASE_PER_STEP;
        self.step_floor(duration).max(larmor.ceil() as usize)
    }
}

/// Geometric and dynamical phase of one eigenstate, in radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasePair<T> {
    pub geometric: T,
    pub dynamical: T,
}

impl<T: Real> PhasePair<T> {
    pub fn total(&self) -> T {
        self.geometric + self.dynamical
    }
}

/// Instantaneous eigenstates `(E = +ω₁, E = −ω₁)` of `H(t)`.
///
/// For the `Along` orientation this is `(|↑_n;t⟩, |↓_n;t⟩)`; the reversed
/// field swaps them.
pub fn eigenstates<T: Real>(config: &FieldConfig<T>, t: T) -> (SpinState<T>, SpinState<T>) {
    let (up, down) = (config.ray_ket(Ray::Up, t), config.ray_ket(Ray::Down, t));
    match config.orientation {
        Orientation::Along => (up, down),
        Orientation::Reversed => (down, up),
    }
}

/// Analytic one-period phases `(↑_n, ↓_n)`.
///
/// `γ₊ = −π(1 − cos ϑ)`, `γ₋ = −π(1 + cos ϑ)`, `θ± = −E± τ`.
pub fn analytic_phases<T: Real>(config: &FieldConfig<T>) -> (PhasePair<T>, PhasePair<T>) {
    let cos = config.tilt.cos();
    let tau = config.period();
    let up = PhasePair {
        geometric: -T::PI() * (T::one() - cos),
        dynamical: -config.energy(Ray::Up) * tau,
    };
    let down = PhasePair {
        geometric: -T::PI() * (T::one() + cos),
        dynamical: -config.energy(Ray::Down) * tau,
    };
    (up, down)
}

/// Stored RK4 solution of `i dψ/dt = H(t) ψ`.
#[derive(Clone, Debug)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<SpinState<T>>,
    pub config: FieldConfig<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn initial(&self) -> &SpinState<T> {
        &self.states[0]
    }

    pub fn final_state(&self) -> &SpinState<T> {
        self.states
            .last()
            .expect("trajectory has at least two stamps")
    }

    /// Largest `| ‖ψ‖² − 1 |` along the trajectory.
    pub fn max_norm_drift(&self) -> T {
        use crate::quantum::Ket;
        self.states
            .iter()
            .map(|s| (s.norm_sqr() - T::one()).abs())
            .fold(T::zero(), T::max)
    }

    /// `⟨ψ(t)|H(t)|ψ(t)⟩` at every stamp.
    pub fn energies(&self) -> Vec<T> {
        self.times
            .iter()
            .zip(&self.states)
            .map(|(&t, s)| energy_expectation(&self.config, t, s))
            .collect()
    }
}

fn energy_expectation<T: Real>(config: &FieldConfig<T>, t: T, psi: &SpinState<T>) -> T {
    let h = config.hamiltonian(t);
    inner(&psi.amps(), &h.apply(&psi.amps())).re
}

/// Integrates from `t = 0`. See [`evolve_from`].
pub fn evolve<T: Real>(
    config: &FieldConfig<T>,
    initial: &SpinState<T>,
    duration: T,
    steps: usize,
) -> Result<Trajectory<T>> {
    evolve_from(config, initial, T::zero(), duration, steps)
}

/// Fixed-step classical RK4 over `[start, start + duration]`, storing every
/// step. The state is never renormalized; the drift is left as a diagnostic.
pub fn evolve_from<T: Real>(
    config: &FieldConfig<T>,
    initial: &SpinState<T>,
    start: T,
    duration: T,
    steps: usize,
) -> Result<Trajectory<T>> {
    if !(duration > T::zero()) || !duration.is_finite() {
        return Err(invalid(
            "duration",
            format!("{duration} must be finite and > 0"),
        ));
    }
    let floor = config.step_floor(duration);
    if steps < floor {
        return Err(Error::UnderResolved { steps, floor });
    }

    let h = duration / T::from_usize(steps).expect("step count fits the scalar");
    let half = h * T::half();
    let minus_i = Complex::new(T::zero(), -T::one());
    let rhs = |t: T, y: &[Complex<T>; 2]| -> [Complex<T>; 2] {
        let hy = config.hamiltonian(t).apply(y);
        [hy[0] * minus_i, hy[1] * minus_i]
    };
    let axpy = |y: &[Complex<T>; 2], k: &[Complex<T>; 2], s: T| [y[0] + k[0] * s, y[1] + k[1] * s];

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut y = initial.amps();
    times.push(start);
    states.push(*initial);
    let sixth = h / T::lit(6.0);
    for n in 0..steps {
        let t = start + h * T::from_usize(n).expect("step index fits the scalar");
        let k1 = rhs(t, &y);
        let k2 = rhs(t + half, &axpy(&y, &k1, half));
        let k3 = rhs(t + half, &axpy(&y, &k2, half));
        let k4 = rhs(t + h, &axpy(&y, &k3, h));
        for i in 0..2 {
            y[i] += (k1[i] + (k2[i] + k3[i]) * T::two() + k4[i]) * sixth;
        }
        times.push(start + h * T::from_usize(n + 1).expect("step index fits the scalar"));
        states.push(SpinState::from_raw(y));
    }
    Ok(Trajectory {
        times,
        states,
        config: *config,
    })
}

/// Full output of a phase extraction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseReport<T> {
    /// Geometric and dynamical phase; dynamical is `−∫E(t)dt` of the
    /// followed eigenstate.
    pub phases: PhasePair<T>,
    /// `arg⟨reference|ψ_final⟩`, in `(−π, π]`.
    pub total: T,
    /// `−∫⟨ψ|H|ψ⟩dt`. Differs from the eigenvalue integral at first order
    /// in ω₀/ω₁ over a cycle, which is why it is only a diagnostic.
    pub expectation_dynamical: T,
    /// Which eigenstate ray the state was followed along.
    pub ray: Ray,
    /// Smallest `|⟨ray(t)|ψ(t)⟩|` along the way.
    pub min_overlap: T,
    /// `1 − |⟨reference|ψ_final⟩|`.
    pub cyclic_distance: T,
}

/// Splits the phase of a cyclic trajectory into geometric and dynamical parts.
///
/// See [`extract_phases_chain`].
pub fn extract_phases<T: Real>(
    traj: &Trajectory<T>,
    reference: &SpinState<T>,
) -> Result<PhasePair<T>> {
    extract_phases_chain(std::slice::from_ref(traj), reference).map(|r| r.phases)
}

/// Phase extraction over consecutive trajectory segments (e.g. the two echo
/// stages), each with its own field.
///
/// The state is followed along the eigenstate ray that `reference`
/// overlaps most at the start. The dynamical phase is the trapezoidal
/// integral of `−E(t)` for that ray's energy under each segment's field. The
/// geometric phase is `arg⟨reference|ψ_final⟩ − dynamical`, on the branch
/// selected by tracking `⟨ray(t)|ψ(t)⟩ e^{−i·dynamical(t)}` continuously.
pub fn extract_phases_chain<T: Real>(
    segments: &[Trajectory<T>],
    reference: &SpinState<T>,
) -> Result<PhaseReport<T>> {
    let first = segments
        .first()
        .ok_or_else(|| invalid("segments", "at least one trajectory required"))?;
    let last = segments.last().expect("nonempty");
    let fin = last.final_state();
    let cyclic_distance = phase_insensitive_distance(fin, reference)?;
    if !(cyclic_distance < T::lit(CYCLIC_TOLERANCE)) {
        return Err(Error::NotCyclic {
            distance: cyclic_distance.to_f64_lossy(),
        });
    }

    let t0 = first.times[0];
    let ray = {
        let up = first.config.ray_ket(Ray::Up, t0).inner(reference).norm();
        let down = first.config.ray_ket(Ray::Down, t0).inner(reference).norm();
        if up >= down {
            Ray::Up
        } else {
            Ray::Down
        }
    };

    let mut dynamical = T::zero();
    let mut expectation_dynamical = T::zero();
    let mut min_overlap = T::infinity();
    let mut start_phase: Option<T> = None;
    let mut last_phase = T::zero();
    let mut unwrapped = T::zero();

    for seg in segments {
        let cfg = &seg.config;
        let energy = cfg.energy(ray);
        let mut prev: Option<(T, T)> = None;
        for (&t, psi) in seg.times.iter().zip(&seg.states) {
            let aa = energy_expectation(cfg, t, psi);
            if let Some((tp, aap)) = prev {
                let dt = t - tp;
                dynamical -= energy * dt;
                expectation_dynamical -= (aa + aap) * T::half() * dt;
            }
            prev = Some((t, aa));

            let overlap = cfg.ray_ket(ray, t).inner(psi);
            let mag = overlap.norm();
            if mag < min_overlap {
                min_overlap = mag;
            }
            if mag * mag < T::half() {
                return Err(Error::LostEigenstate {
                    overlap: mag.to_f64_lossy(),
                    time: t.to_f64_lossy(),
                });
            }
            // Strip the dynamical phase so the tracked phase moves slowly.
            let phase = (overlap * Complex::from_polar(T::one(), -dynamical)).arg();
            match start_phase {
                None => {
                    start_phase = Some(phase);
                    unwrapped = phase;
                }
                Some(_) => unwrapped += wrap_pi(phase - last_phase),
            }
            last_phase = phase;
        }
    }

    let tracked = unwrapped - start_phase.unwrap_or_else(T::zero);
    let total = reference.inner(fin).arg();
    let geometric = nearest_branch(total - dynamical, tracked);
    Ok(PhaseReport {
        phases: PhasePair {
            geometric,
            dynamical,
        },
        total,
        expectation_dynamical,
        ray,
        min_overlap,
        cyclic_distance,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EchoMode {
    /// One period along `n`, then one period along `−n`.
    FullTwoPeriods,
    /// Half a period along `n`, then the second half along `−n`.
    TwoHalfPeriods,
}

impl EchoMode {
    fn stage_fraction<T: Real>(self) -> T {
        match self {
            EchoMode::FullTwoPeriods => T::one(),
            EchoMode::TwoHalfPeriods => T::half(),
        }
    }
}

/// Analytic net phases `(↑_n, ↓_n)` of the two-stage echo: `(2γ±, 0)` for two
/// full periods, `(γ±, 0)` for two half periods.
pub fn spin_echo<T: Real>(config: &FieldConfig<T>, mode: EchoMode) -> (PhasePair<T>, PhasePair<T>) {
    let (up, down) = analytic_phases(&config.with_orientation(Orientation::Along));
    let k = match mode {
        EchoMode::FullTwoPeriods => T::two(),
        EchoMode::TwoHalfPeriods => T::one(),
    };
    (
        PhasePair {
            geometric: k * up.geometric,
            dynamical: T::zero(),
        },
        PhasePair {
            geometric: k * down.geometric,
            dynamical: T::zero(),
        },
    )
}

/// Oracle run of the echo for both eigenstates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EchoOracle<T> {
    pub up: PhaseReport<T>,
    pub down: PhaseReport<T>,
    pub analytic: (PhasePair<T>, PhasePair<T>),
}

/// Integrates both echo stages and extracts the net phases.
///
/// Stage 2 picks up the rotation where stage 1 left it, so the two half
/// periods of [`EchoMode::TwoHalfPeriods`] trace one closed cone between them
/// and the extraction applies to that mode too. `steps_per_stage` defaults to
/// [`FieldConfig::recommended_steps`].
pub fn spin_echo_oracle<T: Real>(
    config: &FieldConfig<T>,
    mode: EchoMode,
    steps_per_stage: Option<usize>,
) -> Result<EchoOracle<T>> {
    let along = config.with_orientation(Orientation::Along);
    let reversed = along.with_orientation(Orientation::Reversed);
    let stage = along.period() * mode.stage_fraction::<T>();
    let steps = steps_per_stage.unwrap_or_else(|| along.recommended_steps(stage));

    let run = |ray: Ray| -> Result<PhaseReport<T>> {
        let start = along.ray_ket(ray, T::zero());
        let first = evolve_from(&along, &start, T::zero(), stage, steps)?;
        let second = evolve_from(&reversed, first.final_state(), stage, stage, steps)?;
        extract_phases_chain(&[first, second], &start)
    };
    Ok(EchoOracle {
        up: run(Ray::Up)?,
        down: run(Ray::Down)?,
        analytic: spin_echo(config, mode),
    })
}

/// One-period oracle for the eigenstate `ray`, with default resolution.
pub fn one_period_oracle<T: Real>(config: &FieldConfig<T>, ray: Ray) -> Result<PhaseReport<T>> {
    let tau = config.period();
    let start = config.ray_ket(ray, T::zero());
    let traj = evolve(config, &start, tau, config.recommended_steps(tau))?;
    extract_phases_chain(std::slice::from_ref(&traj), &start)
}

/// Checks that a trajectory's drift stays inside the stored-state budget.
pub fn within_norm_budget<T: Real>(traj: &Trajectory<T>) -> bool {
    traj.max_norm_drift() <= tol::tier(tol::TRAJECTORY_NORM)
}
