//! State vectors and operators on one qubit (ℂ²) and on a pair (ℂ²⊗ℂ²).
//!
//! Pair amplitudes are always ordered left⊗right as `[↑↑, ↑↓, ↓↑, ↓↓]`, i.e.
//! index `2i + j` for left index `i` and right index `j`. Every module uses
//! this layout.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{wrap_two_pi, Real};
use crate::tol;

/// Read access to the amplitudes of a normalized state vector.
pub trait Ket<T: Real> {
    fn amplitudes(&self) -> &[Complex<T>];

    fn norm_sqr(&self) -> T {
        self.amplitudes().iter().map(|a| a.norm_sqr()).sum()
    }
}

/// `⟨a|b⟩`.
pub fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter()
        .zip(b)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| {
            acc + x.conj() * y
        })
}

fn check_norm<T: Real>(amps: &[Complex<T>]) -> Result<()> {
    let n: T = amps.iter().map(|a| a.norm_sqr()).sum();
    if (n - T::one()).abs() > tol::tier(tol::UNITARY) || !n.is_finite() {
        return Err(Error::NotNormalized {
            norm_sqr: n.to_f64_lossy(),
        });
    }
    Ok(())
}

fn normalize<T: Real, const N: usize>(mut amps: [Complex<T>; N]) -> Result<[Complex<T>; N]> {
    let n: T = amps.iter().map(|a| a.norm_sqr()).sum();
    if !(n > T::zero()) || !n.is_finite() {
        return Err(Error::NotNormalized {
            norm_sqr: n.to_f64_lossy(),
        });
    }
    let s = n.sqrt().recip();
    for a in &mut amps {
        *a *= s;
    }
    Ok(amps)
}

/// One spin-½ (or one path qubit) in the `{|↑⟩, |↓⟩}` basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinState<T> {
    amps: [Complex<T>; 2],
}

impl<T: Real> SpinState<T> {
    /// Wraps amplitudes that must already be normalized.
    pub fn new(amps: [Complex<T>; 2]) -> Result<Self> {
        check_norm(&amps)?;
        Ok(Self { amps })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amps: [Complex<T>; 2]) -> Result<Self> {
        Ok(Self {
            amps: normalize(amps)?,
        })
    }

    /// No norm check. Used by the integrator, whose drift is a diagnostic.
    pub(crate) fn from_raw(amps: [Complex<T>; 2]) -> Self {
        Self { amps }
    }

    pub fn up() -> Self {
        Self::from_raw([
            Complex::new(T::one(), T::zero()),
            Complex::new(T::zero(), T::zero()),
        ])
    }

    pub fn down() -> Self {
        Self::from_raw([
            Complex::new(T::zero(), T::zero()),
            Complex::new(T::one(), T::zero()),
        ])
    }

    pub fn amps(&self) -> [Complex<T>; 2] {
        self.amps
    }

    pub fn inner(&self, other: &Self) -> Complex<T> {
        inner(&self.amps, &other.amps)
    }

    /// Multiplies by the global phase `e^{iφ}`.
    pub fn with_phase(&self, phi: T) -> Self {
        let p = Complex::from_polar(T::one(), phi);
        Self::from_raw([self.amps[0] * p, self.amps[1] * p])
    }

    pub fn apply(&self, op: &Op2<T>) -> Self {
        Self::from_raw(op.apply(&self.amps))
    }
}

impl<T: Real> Ket<T> for SpinState<T> {
    fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }
}

/// Two subsystems, ordered left⊗right as `[↑↑, ↑↓, ↓↑, ↓↓]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairState<T> {
    amps: [Complex<T>; 4],
}

impl<T: Real> PairState<T> {
    pub fn new(amps: [Complex<T>; 4]) -> Result<Self> {
        check_norm(&amps)?;
        Ok(Self { amps })
    }

    pub fn normalized(amps: [Complex<T>; 4]) -> Result<Self> {
        Ok(Self {
            amps: normalize(amps)?,
        })
    }

    pub(crate) fn from_raw(amps: [Complex<T>; 4]) -> Self {
        Self { amps }
    }

    pub fn amps(&self) -> [Complex<T>; 4] {
        self.amps
    }

    pub fn inner(&self, other: &Self) -> Complex<T> {
        inner(&self.amps, &other.amps)
    }

    pub fn with_phase(&self, phi: T) -> Self {
        let p = Complex::from_polar(T::one(), phi);
        Self::from_raw(self.amps.map(|a| a * p))
    }

    pub fn apply(&self, op: &Op4<T>) -> Self {
        Self::from_raw(op.apply(&self.amps))
    }
}

impl<T: Real> Ket<T> for PairState<T> {
    fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }
}

/// `left ⊗ right`, with `amplitudes[2i + j] = left[i]·right[j]`.
pub fn tensor<T: Real>(left: &SpinState<T>, right: &SpinState<T>) -> PairState<T> {
    let (l, r) = (left.amps, right.amps);
    PairState::from_raw([l[0] * r[0], l[0] * r[1], l[1] * r[0], l[1] * r[1]])
}

/// `1 − |⟨a|b⟩|`: zero iff the states agree up to a global phase.
pub fn phase_insensitive_distance<T, A, B>(a: &A, b: &B) -> Result<T>
where
    T: Real,
    A: Ket<T> + ?Sized,
    B: Ket<T> + ?Sized,
{
    let (x, y) = (a.amplitudes(), b.amplitudes());
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let d = T::one() - inner(x, y).norm();
    // Roundoff can push |⟨a|b⟩| a hair above one.
    Ok(d.max(T::zero()).min(T::one()))
}

/// ±1 outcome label of a two-outcome measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value<T: Real>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Analyzer direction: polar angle from the quantization axis `n` and
/// azimuthal angle around it.
///
/// Construction folds any real pair onto `polar ∈ [0, π]`,
/// `azimuthal ∈ [0, 2π)`. A negative polar angle `−p` is the same direction
/// as `(p, azimuthal + π)`, and the analyzer kets only change by a global sign.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementDirection<T> {
    polar: T,
    azimuthal: T,
}

impl<T: Real> MeasurementDirection<T> {
    pub fn new(polar: T, azimuthal: T) -> Self {
        let mut p = wrap_two_pi(polar);
        let mut a = azimuthal;
        if p > T::PI() {
            p = T::TAU() - p;
            a += T::PI();
        }
        Self {
            polar: p,
            azimuthal: wrap_two_pi(a),
        }
    }

    /// Direction in the zero-azimuth plane; negative `polar` is allowed.
    pub fn in_plane(polar: T) -> Self {
        Self::new(polar, T::zero())
    }

    pub fn polar(&self) -> T {
        self.polar
    }

    pub fn azimuthal(&self) -> T {
        self.azimuthal
    }

    /// `|+dir⟩ = cos(p/2)|↑⟩ + sin(p/2)e^{ia}|↓⟩`,
    /// `|−dir⟩ = −sin(p/2)|↑⟩ + cos(p/2)e^{ia}|↓⟩`.
    pub fn ket(&self, sign: Sign) -> SpinState<T> {
        let (s, c) = (self.polar * T::half()).sin_cos();
        let e = Complex::from_polar(T::one(), self.azimuthal);
        let amps = match sign {
            Sign::Plus => [Complex::new(c, T::zero()), e * s],
            Sign::Minus => [Complex::new(-s, T::zero()), e * c],
        };
        SpinState::from_raw(amps)
    }

    /// Unit Bloch vector `(sin p cos a, sin p sin a, cos p)` relative to `n`.
    pub fn unit_vector(&self) -> [T; 3] {
        let (sp, cp) = self.polar.sin_cos();
        let (sa, ca) = self.azimuthal.sin_cos();
        [sp * ca, sp * sa, cp]
    }
}

/// 2×2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Op2<T>(pub [[Complex<T>; 2]; 2]);

fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

impl<T: Real> Op2<T> {
    pub fn zero() -> Self {
        let z = c(T::zero(), T::zero());
        Op2([[z, z], [z, z]])
    }

    pub fn identity() -> Self {
        let (z, o) = (c(T::zero(), T::zero()), c(T::one(), T::zero()));
        Op2([[o, z], [z, o]])
    }

    pub fn pauli_x() -> Self {
        let (z, o) = (c(T::zero(), T::zero()), c(T::one(), T::zero()));
        Op2([[z, o], [o, z]])
    }

    pub fn pauli_y() -> Self {
        let z = c(T::zero(), T::zero());
        Op2([[z, c(T::zero(), -T::one())], [c(T::zero(), T::one()), z]])
    }

    pub fn pauli_z() -> Self {
        let z = c(T::zero(), T::zero());
        Op2([[c(T::one(), T::zero()), z], [z, c(-T::one(), T::zero())]])
    }

    /// `v·σ` for a real 3-vector.
    pub fn from_bloch(v: [T; 3]) -> Self {
        Op2([
            [c(v[2], T::zero()), c(v[0], -v[1])],
            [c(v[0], v[1]), c(-v[2], T::zero())],
        ])
    }

    /// `|a⟩⟨b|`.
    pub fn outer(a: &SpinState<T>, b: &SpinState<T>) -> Self {
        let (x, y) = (a.amps(), b.amps());
        Op2([
            [x[0] * y[0].conj(), x[0] * y[1].conj()],
            [x[1] * y[0].conj(), x[1] * y[1].conj()],
        ])
    }

    pub fn apply(&self, v: &[Complex<T>; 2]) -> [Complex<T>; 2] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Op2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn scale(&self, s: T) -> Self {
        Op2(self.0.map(|row| row.map(|x| x * s)))
    }

    pub fn trace(&self) -> Complex<T> {
        self.0[0][0] + self.0[1][1]
    }

    /// Largest entry of `|A − A†|`.
    pub fn hermitian_defect(&self) -> T {
        let a = self.adjoint();
        let mut d = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.0[i][j] - a.0[i][j]).norm());
            }
        }
        d
    }

    /// Largest entry of `|A − B|`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut d = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        d
    }

    /// Kronecker product `self ⊗ rhs` in the pair ordering.
    pub fn kron(&self, rhs: &Op2<T>) -> Op4<T> {
        let mut out = Op4::zero();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out.0[2 * i + k][2 * j + l] = self.0[i][j] * rhs.0[k][l];
                    }
                }
            }
        }
        out
    }
}

impl<T: Real> Add for Op2<T> {
    type Output = Op2<T>;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = self.0[i][j] + rhs.0[i][j];
            }
        }
        out
    }
}

impl<T: Real> Sub for Op2<T> {
    type Output = Op2<T>;
    fn sub(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = self.0[i][j] - rhs.0[i][j];
            }
        }
        out
    }
}

impl<T: Real> Mul for Op2<T> {
    type Output = Op2<T>;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Op2::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = self.0[i][0] * rhs.0[0][j] + self.0[i][1] * rhs.0[1][j];
            }
        }
        out
    }
}

/// 4×4 complex matrix on the pair space, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Op4<T>(pub [[Complex<T>; 4]; 4]);

impl<T: Real> Op4<T> {
    pub fn zero() -> Self {
        Op4([[c(T::zero(), T::zero()); 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.0[i][i] = c(T::one(), T::zero());
        }
        m
    }

    pub fn apply(&self, v: &[Complex<T>; 4]) -> [Complex<T>; 4] {
        let mut out = [c(T::zero(), T::zero()); 4];
        for (i, row) in self.0.iter().enumerate() {
            out[i] = row
                .iter()
                .zip(v)
                .fold(c(T::zero(), T::zero()), |acc, (m, x)| acc + m * x);
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = self.0[j][i].conj();
            }
        }
        out
    }

    pub fn hermitian_defect(&self) -> T {
        let a = self.adjoint();
        self.max_abs_diff(&a)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut d = T::zero();
        for i in 0..4 {
            for j in 0..4 {
                d = d.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        d
    }

    pub fn trace(&self) -> Complex<T> {
        (0..4).fold(c(T::zero(), T::zero()), |acc, i| acc + self.0[i][i])
    }
}

impl<T: Real> Add for Op4<T> {
    type Output = Op4<T>;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = self.0[i][j] + rhs.0[i][j];
            }
        }
        out
    }
}

impl<T: Real> Mul for Op4<T> {
    type Output = Op4<T>;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Op4::zero();
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = (0..4).fold(c(T::zero(), T::zero()), |acc, k| {
                    acc + self.0[i][k] * rhs.0[k][j]
                });
            }
        }
        out
    }
}

/// `|±dir⟩⟨±dir|`.
pub fn projector<T: Real>(dir: &MeasurementDirection<T>, sign: Sign) -> Op2<T> {
    let k = dir.ket(sign);
    Op2::outer(&k, &k)
}

/// Two-outcome observable `P₊(dir) − P₋(dir)`.
pub fn observable<T: Real>(dir: &MeasurementDirection<T>) -> Op2<T> {
    projector(dir, Sign::Plus) - projector(dir, Sign::Minus)
}

/// `⟨ψ| A ⊗ B |ψ⟩` for Hermitian `A`, `B`.
pub fn pair_expectation<T: Real>(state: &PairState<T>, left: &Op2<T>, right: &Op2<T>) -> Result<T> {
    for op in [left, right] {
        let d = op.hermitian_defect();
        if d > tol::tier(tol::HERMITIAN) {
            return Err(Error::NotHermitian {
                defect: d.to_f64_lossy(),
            });
        }
    }
    let psi = state.amps();
    let mut acc = c(T::zero(), T::zero());
    for i in 0..2 {
        for k in 0..2 {
            for j in 0..2 {
                for l in 0..2 {
                    acc += psi[2 * i + j].conj() * left.0[i][k] * right.0[j][l] * psi[2 * k + l];
                }
            }
        }
    }
    debug_assert!(acc.im.abs() < tol::tier::<T>(tol::UNITARY) * T::lit(10.0));
    Ok(acc.re)
}

/// `⟨ψ| M |ψ⟩` for a Hermitian 4×4 operator.
pub fn expectation4<T: Real>(amps: &[Complex<T>; 4], op: &Op4<T>) -> Result<T> {
    let d = op.hermitian_defect();
    if d > tol::tier(tol::HERMITIAN) {
        return Err(Error::NotHermitian {
            defect: d.to_f64_lossy(),
        });
    }
    Ok(inner(amps, &op.apply(amps)).re)
}
