//! Single-neutron path⊗spin analogue of the phase-imprinted pair.
//!
//! The beam path (`|I⟩`, `|II⟩`) plays the left particle and the spin plays
//! the right one. After the spinor evolution the state is
//! `(|I⟩|↑_n⟩ − e^{iγ_B}|II⟩|↓_n⟩)/√2`, ordered `[I↑, I↓, II↑, II↓]`.
//!
//! Matching it to the two-spin form takes `γ_B = −2γ` together with the spin
//! relabeling `|↑_n⟩ ↔ |↓_n⟩`, under which a spin analyzer `δ = (δ₁, δ₂)`
//! becomes the right-side analyzer `β = (π − δ₁, −δ₂)`; see
//! [`spin_to_right_analyzer`].

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution, Poisson};

use crate::bell::{self, BerryParameter};
use crate::error::{invalid, Error, Result};
use crate::format::csv;
use crate::quantum::{expectation4, Ket, MeasurementDirection, Op2, Op4, Sign, SpinState};
use crate::scalar::Real;

/// Path⊗spin state of one neutron, ordered `[I↑, I↓, II↑, II↓]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NeutronState<T> {
    amps: [Complex<T>; 4],
}

impl<T: Real> NeutronState<T> {
    pub fn amps(&self) -> [Complex<T>; 4] {
        self.amps
    }
}

impl<T: Real> Ket<T> for NeutronState<T> {
    fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }
}

/// Geometric phase γ_B and the two RF flipper phases with `γ_B = φ₁ − φ₂`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterferometerConfig<T> {
    gamma_b: T,
    rf_phase_1: T,
    rf_phase_2: T,
}

impl<T: Real> InterferometerConfig<T> {
    /// From the flipper phases; `γ_B` is their difference.
    pub fn from_rf_phases(rf_phase_1: T, rf_phase_2: T) -> Result<Self> {
        if !rf_phase_1.is_finite() || !rf_phase_2.is_finite() {
            return Err(invalid("rf_phase", "phases must be finite"));
        }
        Ok(Self {
            gamma_b: rf_phase_1 - rf_phase_2,
            rf_phase_1,
            rf_phase_2,
        })
    }

    /// `φ₁ = γ_B`, `φ₂ = 0`.
    pub fn new(gamma_b: T) -> Result<Self> {
        Self::from_rf_phases(gamma_b, T::zero())
    }

    /// From the two-spin Berry phase, `γ_B = −2γ`.
    pub fn from_berry(gamma: &BerryParameter<T>) -> Result<Self> {
        Self::new(gamma.interferometer_phase())
    }

    pub fn gamma_b(&self) -> T {
        self.gamma_b
    }

    pub fn rf_phases(&self) -> (T, T) {
        (self.rf_phase_1, self.rf_phase_2)
    }

    /// Two-spin Berry phase `γ = −γ_B/2`.
    pub fn berry(&self) -> Result<BerryParameter<T>> {
        BerryParameter::from_interferometer_phase(self.gamma_b)
    }
}

/// `(|I⟩⊗|↑_n⟩ − e^{iγ_B}|II⟩⊗|↓_n⟩)/√2`.
pub fn prepare_state<T: Real>(config: &InterferometerConfig<T>) -> NeutronState<T> {
    let s = T::FRAC_1_SQRT_2();
    let z = Complex::new(T::zero(), T::zero());
    let e = Complex::from_polar(s, config.gamma_b);
    NeutronState {
        amps: [Complex::new(s, T::zero()), z, z, -e],
    }
}

/// `|+p⟩ = cos(χ/2)|I⟩ + sin(χ/2)|II⟩`, `|−p⟩ = −sin(χ/2)|I⟩ + cos(χ/2)|II⟩`.
pub fn path_ket<T: Real>(chi: T, sign: Sign) -> SpinState<T> {
    let (s, c) = (chi * T::half()).sin_cos();
    let amps = match sign {
        Sign::Plus => [Complex::new(c, T::zero()), Complex::new(s, T::zero())],
        Sign::Minus => [Complex::new(-s, T::zero()), Complex::new(c, T::zero())],
    };
    SpinState::new(amps).expect("unit path ket")
}

pub fn path_projector<T: Real>(chi: T, sign: Sign) -> Op2<T> {
    let k = path_ket(chi, sign);
    Op2::outer(&k, &k)
}

/// `P^p_s(χ) ⊗ P^s_t(δ)`.
pub fn setting_projectors<T: Real>(
    chi: T,
    delta: &MeasurementDirection<T>,
    signs: (Sign, Sign),
) -> Op4<T> {
    path_projector(chi, signs.0).kron(&crate::quantum::projector(delta, signs.1))
}

/// `(p₊₊, p₊₋, p₋₊, p₋₋)` for path phase `χ` and spin analyzer `δ`.
///
/// Each entry is the `++` projector pair evaluated at shifted angles:
/// spin minus is `δ₁ → δ₁ + π`, path minus is `χ → χ + π`.
pub fn exact_probabilities<T: Real>(
    config: &InterferometerConfig<T>,
    chi: T,
    delta: &MeasurementDirection<T>,
) -> Result<[T; 4]> {
    let psi = prepare_state(config).amps();
    let flipped = MeasurementDirection::new(delta.polar() + T::PI(), delta.azimuthal());
    let pp = |c: T, d: &MeasurementDirection<T>| {
        expectation4(&psi, &setting_projectors(c, d, (Sign::Plus, Sign::Plus)))
    };
    Ok([
        pp(chi, delta)?,
        pp(chi, &flipped)?,
        pp(chi + T::PI(), delta)?,
        pp(chi + T::PI(), &flipped)?,
    ])
}

/// `p₊₊ − p₊₋ − p₋₊ + p₋₋` on exact probabilities.
pub fn exact_correlation<T: Real>(
    config: &InterferometerConfig<T>,
    chi: T,
    delta: &MeasurementDirection<T>,
) -> Result<T> {
    let p = exact_probabilities(config, chi, delta)?;
    Ok(p[0] - p[1] - p[2] + p[3])
}

/// Right-side analyzer of the two-spin picture equivalent to spin analyzer
/// `δ`: `(π − δ₁, −δ₂)`. The map is its own inverse.
pub fn spin_to_right_analyzer<T: Real>(delta: &MeasurementDirection<T>) -> MeasurementDirection<T> {
    MeasurementDirection::new(T::PI() - delta.polar(), -delta.azimuthal())
}

/// Counts of one joint path/spin setting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Counts {
    pub n_pp: u64,
    pub n_pm: u64,
    pub n_mp: u64,
    pub n_mm: u64,
}

impl Counts {
    pub fn total(&self) -> u64 {
        self.n_pp + self.n_pm + self.n_mp + self.n_mm
    }

    pub fn as_array(&self) -> [u64; 4] {
        [self.n_pp, self.n_pm, self.n_mp, self.n_mm]
    }
}

/// Counts of one setting with the seed that produced them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CountRecord<T> {
    pub counts: Counts,
    pub gamma_b: T,
    pub chi: T,
    pub delta: MeasurementDirection<T>,
    pub seed: u64,
}

impl<T: Real> CountRecord<T> {
    pub const HEADER: [&'static str; 9] = [
        "seed", "gamma_B", "chi", "delta1", "delta2", "n_pp", "n_pm", "n_mp", "n_mm",
    ];

    /// Fields in [`Self::HEADER`] order.
    pub fn fields(&self) -> [String; 9] {
        let c = self.counts;
        [
            self.seed.to_string(),
            csv(self.gamma_b),
            csv(self.chi),
            csv(self.delta.polar()),
            csv(self.delta.azimuthal()),
            c.n_pp.to_string(),
            c.n_pm.to_string(),
            c.n_mp.to_string(),
            c.n_mm.to_string(),
        ]
    }

    /// One CSV row (no trailing newline).
    pub fn to_row(&self, separator: char) -> String {
        self.fields().join(&separator.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum NoiseModel {
    /// `total` events split over the four outcomes.
    #[default]
    Multinomial,
    /// Independent Poisson channels with means `total·p`.
    Poisson,
}

/// Draws `total` events of one setting with a ChaCha20 stream seeded by `seed`.
pub fn simulate_counts<T: Real>(
    config: &InterferometerConfig<T>,
    chi: T,
    delta: &MeasurementDirection<T>,
    total: u64,
    seed: u64,
) -> Result<CountRecord<T>> {
    simulate_counts_with(config, chi, delta, total, seed, NoiseModel::Multinomial)
}

pub fn simulate_counts_with<T: Real>(
    config: &InterferometerConfig<T>,
    chi: T,
    delta: &MeasurementDirection<T>,
    total: u64,
    seed: u64,
    model: NoiseModel,
) -> Result<CountRecord<T>> {
    if total == 0 {
        return Err(invalid("total", "at least one event required"));
    }
    let p = exact_probabilities(config, chi, delta)?.map(|x| x.to_f64_lossy());
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let n = match model {
        NoiseModel::Multinomial => sample_multinomial(&mut rng, total, &p),
        NoiseModel::Poisson => p.map(|pi| {
            let mean = total as f64 * pi.max(0.0);
            if mean > 0.0 {
                Poisson::new(mean).expect("positive mean").sample(&mut rng) as u64
            } else {
                0
            }
        }),
    };
    Ok(CountRecord {
        counts: Counts {
            n_pp: n[0],
            n_pm: n[1],
            n_mp: n[2],
            n_mm: n[3],
        },
        gamma_b: config.gamma_b,
        chi,
        delta: *delta,
        seed,
    })
}

/// Sequential conditional binomials.
pub fn sample_multinomial<R: rand::Rng + ?Sized, const K: usize>(
    rng: &mut R,
    total: u64,
    p: &[f64; K],
) -> [u64; K] {
    let mut out = [0u64; K];
    let mut left = total;
    let mut mass: f64 = p.iter().map(|x| x.max(0.0)).sum();
    for i in 0..K {
        if left == 0 {
            break;
        }
        if i == K - 1 {
            out[i] = left;
            break;
        }
        let pi = p[i].max(0.0);
        let q = if mass > 0.0 {
            (pi / mass).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let k = Binomial::new(left, q)
            .expect("probability in [0, 1]")
            .sample(rng);
        out[i] = k;
        left -= k;
        mass -= pi;
    }
    out
}

/// `(N₊₊ − N₊₋ − N₋₊ + N₋₋) / (N₊₊ + N₊₋ + N₋₊ + N₋₋)`.
pub fn estimate_correlation<T: Real>(counts: &CountRecord<T>) -> Result<T> {
    estimate_from_counts(&counts.counts)
}

pub fn estimate_from_counts<T: Real>(c: &Counts) -> Result<T> {
    let total = c.total();
    if total == 0 {
        return Err(Error::ZeroCounts);
    }
    let num = (c.n_pp + c.n_mm) as f64 - (c.n_pm + c.n_mp) as f64;
    Ok(T::lit(num / total as f64))
}

/// One-sigma error of an estimated correlation, `sqrt((1 − E²)/N)`.
pub fn correlation_sigma<T: Real>(e: T, total: u64) -> T {
    ((T::one() - e * e).max(T::zero()) / T::lit(total as f64)).sqrt()
}

/// Four settings of a CHSH run, ordered `(χ,δ), (χ,δ′), (χ′,δ), (χ′,δ′)`.
pub type ChshSettings<T> = [(T, MeasurementDirection<T>); 4];

/// Path/spin settings reaching `S = 2√2` for interferometer phase `γ_B`:
/// the compensated two-spin setting mapped through [`spin_to_right_analyzer`].
pub fn compensated_settings<T: Real>(config: &InterferometerConfig<T>) -> Result<ChshSettings<T>> {
    let set = bell::compensated_setting(&config.berry()?);
    let d = spin_to_right_analyzer(&set.b);
    let dp = spin_to_right_analyzer(&set.b_prime);
    let (chi, chip) = (set.a.polar(), set.a_prime.polar());
    Ok([(chi, d), (chi, dp), (chip, d), (chip, dp)])
}

/// CHSH value estimated from four count records.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChshEstimate<T> {
    pub s: T,
    /// Propagated one-sigma error.
    pub sigma: T,
    pub correlations: [T; 4],
}

/// `S = |E₁ − E₂| + |E₃ + E₄|` over records ordered as [`ChshSettings`].
pub fn chsh_from_counts<T: Real>(records: &[CountRecord<T>; 4]) -> Result<ChshEstimate<T>> {
    let mut e = [T::zero(); 4];
    let mut var = T::zero();
    for (i, r) in records.iter().enumerate() {
        e[i] = estimate_correlation(r)?;
        let s = correlation_sigma(e[i], r.counts.total());
        var += s * s;
    }
    Ok(ChshEstimate {
        s: (e[0] - e[1]).abs() + (e[2] + e[3]).abs(),
        sigma: var.sqrt(),
        correlations: e,
    })
}

/// `S` from exact probabilities at the given settings.
pub fn chsh_exact<T: Real>(
    config: &InterferometerConfig<T>,
    settings: &ChshSettings<T>,
) -> Result<T> {
    let mut e = [T::zero(); 4];
    for (i, (chi, d)) in settings.iter().enumerate() {
        e[i] = exact_correlation(config, *chi, d)?;
    }
    Ok((e[0] - e[1]).abs() + (e[2] + e[3]).abs())
}

/// Simulates all four settings; setting `i` uses seed `seed + i`.
pub fn simulate_chsh<T: Real>(
    config: &InterferometerConfig<T>,
    settings: &ChshSettings<T>,
    total: u64,
    seed: u64,
) -> Result<[CountRecord<T>; 4]> {
    let mut out = Vec::with_capacity(4);
    for (i, (chi, d)) in settings.iter().enumerate() {
        out.push(simulate_counts(
            config,
            *chi,
            d,
            total,
            seed.wrapping_add(i as u64),
        )?);
    }
    Ok(out.try_into().expect("four records"))
}
