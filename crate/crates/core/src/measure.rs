//! Multi-armed beamformer synthesis and noisy, quantized syndrome
//! acquisition.
//!
//! A parity-check row selects which DFT beams a measurement combines. With
//! orthonormal beams the noiseless measurement of an angular channel is the
//! matching row of `H q^a`, so stacking all rows yields the channel syndrome.

use crate::codes::encoded_parity;
use crate::error::{Error, Result};
use crate::gf2::{lift_to_real, BinMatrix};
use crate::linalg::Mat;
use crate::scalar::{Cx, Real};
use crate::util::complex_gaussian;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// A multi-armed beam: the sum of the unit-norm spatial signatures selected
/// by one parity-check row.
#[derive(Clone, Debug)]
pub struct Beamformer<T> {
    weights: Vec<Cx<T>>,
    arms: Vec<usize>,
}

impl<T: Real> Beamformer<T> {
    /// Trivial single-antenna precoder (no beamforming).
    pub fn scalar_one() -> Self {
        Beamformer {
            weights: vec![Cx::new(T::one(), T::zero())],
            arms: vec![0],
        }
    }

    pub fn weights(&self) -> &[Cx<T>] {
        &self.weights
    }

    /// Directions this beam combines.
    pub fn arms(&self) -> &[usize] {
        &self.arms
    }

    pub fn arm_count(&self) -> usize {
        self.arms.len()
    }

    /// Squared l2 norm of the weights; with orthonormal beams this equals the
    /// arm count.
    pub fn norm_sqr(&self) -> T {
        self.weights.iter().fold(T::zero(), |a, w| a + w.norm_sqr())
    }
}

/// Build the combiner (or precoder) for row `row` of a parity-check matrix,
/// summing the columns of the beam basis `u` the row selects.
pub fn combiner_from_row<T: Real>(
    h: &BinMatrix,
    row: usize,
    u: &Mat<Cx<T>>,
) -> Result<Beamformer<T>> {
    if h.cols() != u.cols() {
        return Err(Error::DimensionMismatch(format!(
            "row has {} bins, basis has {} beams",
            h.cols(),
            u.cols()
        )));
    }
    let arms = h.ones_in_row(row);
    if arms.is_empty() {
        return Err(Error::ZeroRow(row));
    }
    let mut weights = vec![Cx::new(T::zero(), T::zero()); u.rows()];
    for &j in &arms {
        for (p, w) in weights.iter_mut().enumerate() {
            *w += u.get(p, j);
        }
    }
    Ok(Beamformer { weights, arms })
}

/// How measurement noise scales with the combiner.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum NoiseScaling {
    /// Per-measurement noise CN(0, N0): the combiner output normalized by
    /// its norm, which is how the evaluation is calibrated.
    #[default]
    Normalized,
    /// Noise CN(0, N0 ||w||^2): i.i.d. per-antenna noise passed through the
    /// raw combiner.
    Combiner,
}

impl NoiseScaling {
    /// Effective per-measurement noise variance for a combiner with squared
    /// norm `w2`.
    pub fn variance<T: Real>(self, n0: T, w2: T) -> T {
        match self {
            NoiseScaling::Normalized => n0,
            NoiseScaling::Combiner => n0 * w2,
        }
    }
}

/// One raw measurement: `u = w^H Q f s + w^H n` with i.i.d. per-antenna noise
/// of variance `n0` (so the noise term has variance `n0 ||w||^2`).
pub fn measure<T: Real, R: Rng + ?Sized>(
    q: &Mat<Cx<T>>,
    w: &Beamformer<T>,
    f: &Beamformer<T>,
    s: Cx<T>,
    n0: T,
    rng: &mut R,
) -> Cx<T> {
    let signal = bilinear(q, w, f) * s;
    if n0.is_zero() {
        return signal;
    }
    signal + complex_gaussian(rng, n0 * w.norm_sqr())
}

/// `w^H Q f`.
fn bilinear<T: Real>(q: &Mat<Cx<T>>, w: &Beamformer<T>, f: &Beamformer<T>) -> Cx<T> {
    assert_eq!(q.rows(), w.weights.len(), "combiner length mismatch");
    assert_eq!(q.cols(), f.weights.len(), "precoder length mismatch");
    let qf: Vec<Cx<T>> = (0..q.rows())
        .map(|i| {
            q.row(i)
                .iter()
                .zip(&f.weights)
                .fold(Cx::new(T::zero(), T::zero()), |a, (x, y)| a + x * y)
        })
        .collect();
    w.weights
        .iter()
        .zip(&qf)
        .fold(Cx::new(T::zero(), T::zero()), |a, (x, y)| a + x.conj() * y)
}

/// Mid-tread ADC pair: 2^b + 1 levels per I/Q rail, reporting reconstructed
/// amplitudes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuantizerSpec<T> {
    b: u32,
    full_scale: T,
    enabled: bool,
}

impl<T: Real> QuantizerSpec<T> {
    /// Infinite-resolution ADC: quantization is the identity.
    pub fn perfect() -> Self {
        QuantizerSpec {
            b: 1,
            full_scale: T::one(),
            enabled: false,
        }
    }

    pub fn new(b: u32, full_scale: T) -> Self {
        assert!(b >= 1, "quantizer needs at least one bit");
        assert!(full_scale > T::zero(), "full scale must be positive");
        QuantizerSpec {
            b,
            full_scale,
            enabled: true,
        }
    }

    pub fn bits(&self) -> u32 {
        self.b
    }

    pub fn full_scale(&self) -> T {
        self.full_scale
    }

    pub fn is_enabled(&self) -> bool {
        self.enabled
    }

    pub fn step(&self) -> T {
        self.full_scale / T::of((1u64 << (self.b - 1)) as f64)
    }
}

/// Quantize each rail to `clamp(round(r / step)) * step`; a disabled spec
/// passes the input through.
pub fn quantize_midtread<T: Real>(u: Cx<T>, spec: &QuantizerSpec<T>) -> Cx<T> {
    if !spec.enabled {
        return u;
    }
    let step = spec.step();
    let max_level = T::of((1u64 << (spec.b - 1)) as f64);
    let rail = |r: T| -> T {
        let level = (r / step).round().max(-max_level).min(max_level);
        level * step
    };
    Cx::new(rail(u.re), rail(u.im))
}

/// Which side of the measurement a syndrome came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SyndromeKind {
    /// Noiseless `H q^a` reference values.
    Ideal,
    /// Acquired over the air: noisy and quantized.
    Observed,
}

/// A channel syndrome: one complex value per measurement row, normalized by
/// the pilot so noiseless values equal `H q^a`.
#[derive(Clone, Debug, PartialEq)]
pub struct Syndrome<T> {
    pub values: Vec<Cx<T>>,
    pub kind: SyndromeKind,
}

impl<T: Real> Syndrome<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Noiseless syndrome of a sparse angular vector under the lifted rows.
pub fn ideal_syndrome<T: Real>(rows: &BinMatrix, q_a: &[Cx<T>]) -> Result<Syndrome<T>> {
    if rows.cols() != q_a.len() {
        return Err(Error::DimensionMismatch(format!(
            "ideal_syndrome: rows have {} bins, channel has {}",
            rows.cols(),
            q_a.len()
        )));
    }
    let lifted: Mat<T> = lift_to_real(rows);
    Ok(Syndrome {
        values: lifted.apply_complex(q_a),
        kind: SyndromeKind::Ideal,
    })
}

/// Acquire the observed syndrome of a physical channel under one precoder:
/// measure each parity row, quantize, then normalize by the pilot amplitude.
#[allow(clippy::too_many_arguments)]
pub fn acquire_syndrome<T: Real, R: Rng + ?Sized>(
    q: &Mat<Cx<T>>,
    rows: &BinMatrix,
    u_rx: &Mat<Cx<T>>,
    f: &Beamformer<T>,
    s: Cx<T>,
    n0: T,
    spec: &QuantizerSpec<T>,
    scaling: NoiseScaling,
    rng: &mut R,
) -> Result<Syndrome<T>> {
    let combiners: Vec<Beamformer<T>> = (0..rows.rows())
        .map(|i| combiner_from_row(rows, i, u_rx))
        .collect::<Result<_>>()?;
    Ok(acquire_with_combiners(q, &combiners, f, s, n0, spec, scaling, rng))
}

/// Acquisition fast path for pre-built combiners.
#[allow(clippy::too_many_arguments)]
pub(crate) fn acquire_with_combiners<T: Real, R: Rng + ?Sized>(
    q: &Mat<Cx<T>>,
    combiners: &[Beamformer<T>],
    f: &Beamformer<T>,
    s: Cx<T>,
    n0: T,
    spec: &QuantizerSpec<T>,
    scaling: NoiseScaling,
    rng: &mut R,
) -> Syndrome<T> {
    // Q f is shared by every row of the sweep.
    let qf: Vec<Cx<T>> = (0..q.rows())
        .map(|i| {
            q.row(i)
                .iter()
                .zip(f.weights())
                .fold(Cx::new(T::zero(), T::zero()), |a, (x, y)| a + x * y)
        })
        .collect();
    let values = combiners
        .iter()
        .map(|w| {
            let mut u = w
                .weights()
                .iter()
                .zip(&qf)
                .fold(Cx::new(T::zero(), T::zero()), |a, (x, y)| a + x.conj() * y)
                * s;
            if !n0.is_zero() {
                u += complex_gaussian(rng, scaling.variance(n0, w.norm_sqr()));
            }
            quantize_midtread(u, spec) / s
        })
        .collect();
    Syndrome {
        values,
        kind: SyndromeKind::Observed,
    }
}

/// Measurement rows for error-corrected acquisition; used exactly like `H`.
pub fn encoded_measurement_rows(h: &BinMatrix, g_c: &BinMatrix) -> Result<BinMatrix> {
    encoded_parity(h, g_c)
}
