//! Random vector quantization (RVQ) of channel directions.
//!
//! A user's codebook holds `2^B` independent isotropic unit vectors; the user
//! feeds back the index of the codeword with the largest `|h†w|`. The
//! quantization error `Z = sin²∠(h, ŵ)` is the minimum of `2^B` independent
//! Beta(M−1, 1) variables, so its law is known in closed form:
//! `Pr(Z ≥ z) = (1 − z^{M−1})^{2^B}`.
//!
//! Analytic functions take `bits` as `f64` so that feedback-scaling laws can
//! feed non-integer bit counts straight through.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::Open01;

use crate::error::{domain, Error, Result};
use crate::numerics::{
    angle_sin2, complex_gaussian, harmonic, ln_gamma, sample_isotropic_unit, ComplexVector,
};

/// Largest codebook that [`generate_codebook`] will materialize.
pub const MAX_CODEBOOK_BITS: u32 = 30;

/// `2^B` unit-norm codewords in `C^M`, stored contiguously.
#[derive(Clone, Debug, PartialEq)]
pub struct Codebook {
    antennas: usize,
    bits: u32,
    words: Vec<Complex64>,
}

/// Result of quantizing one channel vector.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantizationOutcome {
    /// Zero-based index of the chosen codeword.
    pub index: usize,
    /// The chosen codeword (unit norm).
    pub direction: ComplexVector,
    /// `sin²∠(h, direction)`.
    pub error: f64,
}

/// A channel direction and its RVQ quantization sampled jointly without a
/// codebook: `h̃ = √(1−Z)·ĥ + √Z·s` with `s ⟂ ĥ`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantizedPair {
    pub channel_direction: ComplexVector,
    pub quantized: ComplexVector,
    /// Unit vector in the nullspace of `quantized`.
    pub residual_direction: ComplexVector,
    pub error: f64,
}

fn check_antennas(antennas: usize) -> Result<()> {
    if antennas < 2 {
        return Err(domain(format!("need at least 2 antennas, got {antennas}")));
    }
    Ok(())
}

fn check_bits(bits: f64) -> Result<()> {
    if !(bits >= 0.0) || !bits.is_finite() {
        return Err(domain(format!("feedback bits must be finite and non-negative, got {bits}")));
    }
    Ok(())
}

fn check_unit_interval(z: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&z) {
        return Err(domain(format!("z must lie in [0, 1], got {z}")));
    }
    Ok(())
}

/// Draws a codebook of `2^bits` independent isotropic unit vectors.
pub fn generate_codebook<R: Rng + ?Sized>(antennas: usize, bits: u32, rng: &mut R) -> Result<Codebook> {
    check_antennas(antennas)?;
    if bits > MAX_CODEBOOK_BITS {
        return Err(Error::Capacity { bits, max: MAX_CODEBOOK_BITS });
    }
    let size = 1usize << bits;
    let mut words = Vec::with_capacity(size * antennas);
    let mut scratch = vec![Complex64::new(0.0, 0.0); antennas];
    let mut filled = 0;
    while filled < size {
        for z in scratch.iter_mut() {
            *z = complex_gaussian(rng);
        }
        let norm = scratch.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let inv = 1.0 / norm;
        words.extend(scratch.iter().map(|z| z * inv));
        filled += 1;
    }
    Ok(Codebook { antennas, bits, words })
}

impl Codebook {
    /// Builds a codebook from explicit words; each is normalized.
    pub fn from_words(words: &[ComplexVector]) -> Result<Self> {
        let antennas = words.first().map(ComplexVector::dim).unwrap_or(0);
        check_antennas(antennas)?;
        if !words.len().is_power_of_two() {
            return Err(domain(format!("codebook size {} is not a power of two", words.len())));
        }
        if words.iter().any(|w| w.dim() != antennas) {
            return Err(domain("codewords have inconsistent dimensions"));
        }
        let mut flat = Vec::with_capacity(words.len() * antennas);
        for w in words {
            flat.extend(w.normalized()?.into_inner());
        }
        Ok(Self { antennas, bits: words.len().trailing_zeros(), words: flat })
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.words.len() / self.antennas
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Codeword `j` as a slice.
    pub fn word(&self, j: usize) -> &[Complex64] {
        &self.words[j * self.antennas..(j + 1) * self.antennas]
    }

    pub fn word_vector(&self, j: usize) -> ComplexVector {
        ComplexVector::from_vec_unchecked(self.word(j).to_vec())
    }

    pub fn iter(&self) -> impl Iterator<Item = &[Complex64]> {
        self.words.chunks_exact(self.antennas)
    }

    /// Picks the codeword maximizing `|h†w|` (lowest index on ties).
    pub fn quantize(&self, h: &ComplexVector) -> Result<QuantizationOutcome> {
        if h.dim() != self.antennas {
            return Err(domain(format!(
                "channel has dimension {}, codebook expects {}",
                h.dim(),
                self.antennas
            )));
        }
        if h.norm_sqr() == 0.0 {
            return Err(domain("cannot quantize the zero vector"));
        }
        let hs = h.as_slice();
        let mut best = 0;
        let mut best_gain = -1.0;
        for (j, w) in self.iter().enumerate() {
            let gain = crate::numerics::inner_slices(hs, w).norm_sqr();
            if gain > best_gain {
                best_gain = gain;
                best = j;
            }
        }
        let direction = self.word_vector(best);
        let error = angle_sin2(h, &direction)?;
        Ok(QuantizationOutcome { index: best, direction, error })
    }
}

/// Free-function form of [`Codebook::quantize`].
pub fn quantize(h: &ComplexVector, codebook: &Codebook) -> Result<QuantizationOutcome> {
    codebook.quantize(h)
}

/// `Pr(Z ≥ z) = (1 − z^{M−1})^{2^B}`.
pub fn error_ccdf(z: f64, antennas: usize, bits: f64) -> Result<f64> {
    check_unit_interval(z)?;
    check_antennas(antennas)?;
    check_bits(bits)?;
    let base = z.powi(antennas as i32 - 1);
    if base >= 1.0 {
        return Ok(0.0);
    }
    Ok((bits.exp2() * (-base).ln_1p()).exp())
}

/// `ln Γ(L + a) − ln Γ(L)`, with an asymptotic expansion for large `L`
/// where the two log-gammas would cancel catastrophically.
fn ln_gamma_ratio(l: f64, a: f64) -> f64 {
    if l >= 1e4 {
        let z = l;
        a * z.ln() + a * (a - 1.0) / (2.0 * z) - a * (a - 1.0) * (2.0 * a - 1.0) / (12.0 * z * z)
            + a * a * (a - 1.0) * (a - 1.0) / (12.0 * z * z * z)
    } else {
        ln_gamma(l + a).expect("positive") - ln_gamma(l).expect("positive")
    }
}

/// `E[Z] = 2^B · B(2^B, M/(M−1))`, evaluated in log space.
pub fn expected_error(antennas: usize, bits: f64) -> Result<f64> {
    check_antennas(antennas)?;
    check_bits(bits)?;
    let l = bits.exp2();
    let a = antennas as f64 / (antennas as f64 - 1.0);
    // 2^B Γ(2^B) Γ(a) / Γ(2^B + a)
    let log_value = l.ln() + ln_gamma(a)? - ln_gamma_ratio(l, a);
    Ok(log_value.exp())
}

/// Strict upper bound `E[Z] < 2^{−B/(M−1)}`.
pub fn error_upper_bound(antennas: usize, bits: f64) -> Result<f64> {
    check_antennas(antennas)?;
    check_bits(bits)?;
    Ok((-bits / (antennas as f64 - 1.0)).exp2())
}

/// `E[−log₂ Z] = (log₂e/(M−1)) · H(2^B)`.
pub fn expected_neg_log2_error(antennas: usize, bits: f64) -> Result<f64> {
    check_antennas(antennas)?;
    check_bits(bits)?;
    Ok(std::f64::consts::LOG2_E / (antennas as f64 - 1.0) * harmonic(bits.exp2()))
}

/// Sandwich `B/(M−1) ≤ E[−log₂ Z] ≤ (B + log₂e)/(M−1)`.
pub fn neg_log2_error_bounds(antennas: usize, bits: f64) -> Result<(f64, f64)> {
    check_antennas(antennas)?;
    check_bits(bits)?;
    let m1 = antennas as f64 - 1.0;
    Ok((bits / m1, (bits + std::f64::consts::LOG2_E) / m1))
}

/// Inverse-CDF draw of the quantization error:
/// `Z = (1 − U^{2^{−B}})^{1/(M−1)}`.
pub fn sample_error<R: Rng + ?Sized>(antennas: usize, bits: f64, rng: &mut R) -> Result<f64> {
    check_antennas(antennas)?;
    check_bits(bits)?;
    let u: f64 = rng.sample(Open01);
    Ok(error_from_uniform(antennas, bits, u))
}

/// Deterministic core of [`sample_error`]: the `z` with `P(Z > z) = u`, for
/// `u` in (0, 1). Decreasing in `u`.
pub fn error_from_uniform(antennas: usize, bits: f64, u: f64) -> f64 {
    // 1 − exp(2^{−B} ln U) without cancellation for large B.
    let one_minus = -((-bits).exp2() * u.ln()).exp_m1();
    one_minus.clamp(0.0, 1.0).powf(1.0 / (antennas as f64 - 1.0))
}

/// Samples `(h̃, ĥ, Z)` with the joint law of a channel direction, its RVQ
/// quantization and the resulting error, without materializing a codebook.
///
/// For `M = 2` the nullspace of `ĥ` is one-dimensional and `s` is its unit
/// vector times a uniform phase; the projection below produces exactly that.
pub fn sample_quantized_pair<R: Rng + ?Sized>(
    antennas: usize,
    bits: f64,
    rng: &mut R,
) -> Result<QuantizedPair> {
    check_antennas(antennas)?;
    check_bits(bits)?;
    let quantized = sample_isotropic_unit(antennas, rng);
    let error = sample_error(antennas, bits, rng)?;
    let residual_direction = orthogonal_unit(&quantized, rng);
    let mut channel_direction = quantized.scaled(Complex64::new((1.0 - error).sqrt(), 0.0));
    channel_direction.axpy(Complex64::new(error.sqrt(), 0.0), &residual_direction);
    Ok(QuantizedPair { channel_direction, quantized, residual_direction, error })
}

/// Quantizes a given unit channel direction without a codebook search:
/// returns `(ĥ, Z)` with `ĥ = √(1−Z)·h̃ + √Z·s`, `Z` drawn from the RVQ error
/// law and `s` isotropic in the complement of `h̃`. The pair `(h̃, ĥ)` has the
/// same joint law as under a random codebook, up to the phase of `ĥ`.
pub fn quantize_direction_fast<R: Rng + ?Sized>(
    direction: &ComplexVector,
    bits: f64,
    rng: &mut R,
) -> Result<(ComplexVector, f64)> {
    let antennas = direction.dim();
    check_antennas(antennas)?;
    check_bits(bits)?;
    let error = sample_error(antennas, bits, rng)?;
    let s = orthogonal_unit(direction, rng);
    let mut estimate = direction.scaled(Complex64::new((1.0 - error).sqrt(), 0.0));
    estimate.axpy(Complex64::new(error.sqrt(), 0.0), &s);
    Ok((estimate, error))
}

/// Isotropic unit vector orthogonal to the unit vector `u`.
fn orthogonal_unit<R: Rng + ?Sized>(u: &ComplexVector, rng: &mut R) -> ComplexVector {
    loop {
        let mut g = crate::numerics::sample_complex_gaussian(u.dim(), rng);
        for _ in 0..2 {
            let c = u.inner(&g);
            g.axpy(-c, u);
        }
        if let Ok(s) = g.normalized() {
            return s;
        }
    }
}

/// Lower bound on the error CDF of any `B`-bit quantizer:
/// `min(2^B z^{M−1}, 1)`.
pub fn optimal_error_cdf(z: f64, antennas: usize, bits: f64) -> Result<f64> {
    check_unit_interval(z)?;
    check_antennas(antennas)?;
    check_bits(bits)?;
    Ok((bits.exp2() * z.powi(antennas as i32 - 1)).min(1.0))
}

/// Mean of the bounding variable: `((M−1)/M) · 2^{−B/(M−1)}`.
pub fn expected_optimal_error(antennas: usize, bits: f64) -> Result<f64> {
    check_antennas(antennas)?;
    check_bits(bits)?;
    let m = antennas as f64;
    Ok((m - 1.0) / m * (-bits / (m - 1.0)).exp2())
}
