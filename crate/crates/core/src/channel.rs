//! Physical and angular channel representations: ULA spatial signatures, DFT
//! beam bases, sparse cluster sampling and per-path SNR.

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::{Cx, Real};
use crate::util::sample_distinct;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Uniform linear array: `n` elements at spacing `delta` (in wavelengths).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArrayGeometry<T> {
    pub n: usize,
    pub delta: T,
}

impl<T: Real> ArrayGeometry<T> {
    /// Half-wavelength array of `n` elements, the default everywhere.
    pub fn half_wavelength(n: usize) -> Self {
        assert!(n >= 1, "array needs at least one element");
        ArrayGeometry {
            n,
            delta: T::of(0.5),
        }
    }

    /// Normalized array length `n * delta`.
    pub fn normalized_length(&self) -> T {
        T::of(self.n as f64) * self.delta
    }
}

/// Unit-norm spatial signature along angular cosine `omega`:
/// entry p is exp(-j 2 pi p delta omega) / sqrt(n).
pub fn spatial_signature<T: Real>(omega: T, geom: &ArrayGeometry<T>) -> Vec<Cx<T>> {
    let scale = T::one() / T::of(geom.n as f64).sqrt();
    let step = -T::TAU() * geom.delta * omega;
    (0..geom.n)
        .map(|p| {
            let phase = step * T::of(p as f64);
            Cx::new(phase.cos() * scale, phase.sin() * scale)
        })
        .collect()
}

/// Unitary DFT beam basis: column i is the signature along `i / (n delta)`.
pub fn dft_matrix<T: Real>(geom: &ArrayGeometry<T>) -> Mat<Cx<T>> {
    let l_norm = geom.normalized_length();
    let mut m = Mat::zeros(geom.n, geom.n);
    for i in 0..geom.n {
        let omega = T::of(i as f64) / l_norm;
        for (p, v) in spatial_signature(omega, geom).into_iter().enumerate() {
            m.set(p, i, v);
        }
    }
    m
}

/// One propagation path occupying a single (TX bin, RX bin) pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathCluster<T> {
    pub tx_bin: usize,
    pub rx_bin: usize,
    /// Composite baseband gain; includes the sqrt(n_t n_r) array factor.
    pub gain: Cx<T>,
}

/// Sparse angular channel: at most a handful of clusters on an n_r x n_t
/// bin grid.
#[derive(Clone, Debug, PartialEq)]
pub struct AngularChannel<T> {
    n_r: usize,
    n_t: usize,
    clusters: Vec<PathCluster<T>>,
}

impl<T: Real> AngularChannel<T> {
    pub fn new(n_r: usize, n_t: usize, clusters: Vec<PathCluster<T>>) -> Result<Self> {
        for c in &clusters {
            if c.rx_bin >= n_r || c.tx_bin >= n_t {
                return Err(Error::InvalidConfig(format!(
                    "cluster bin ({}, {}) outside {}x{} grid",
                    c.rx_bin, c.tx_bin, n_r, n_t
                )));
            }
            if c.gain.norm_sqr().is_zero() {
                return Err(Error::InvalidConfig(
                    "stored clusters must have nonzero gain".into(),
                ));
            }
        }
        for (i, a) in clusters.iter().enumerate() {
            for b in &clusters[i + 1..] {
                if a.rx_bin == b.rx_bin && a.tx_bin == b.tx_bin {
                    return Err(Error::InvalidConfig(format!(
                        "duplicate cluster at bin ({}, {})",
                        a.rx_bin, a.tx_bin
                    )));
                }
            }
        }
        Ok(AngularChannel { n_r, n_t, clusters })
    }

    pub fn zero(n_r: usize, n_t: usize) -> Self {
        AngularChannel {
            n_r,
            n_t,
            clusters: Vec::new(),
        }
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn clusters(&self) -> &[PathCluster<T>] {
        &self.clusters
    }

    /// Dense n_r x n_t matrix form.
    pub fn dense(&self) -> Mat<Cx<T>> {
        let mut q = Mat::zeros(self.n_r, self.n_t);
        for c in &self.clusters {
            q.set(c.rx_bin, c.tx_bin, c.gain);
        }
        q
    }

    /// Occupied (rx_bin, tx_bin) pairs.
    pub fn support(&self) -> Vec<(usize, usize)> {
        self.clusters.iter().map(|c| (c.rx_bin, c.tx_bin)).collect()
    }

    pub fn frobenius_norm_sqr(&self) -> T {
        self.clusters
            .iter()
            .fold(T::zero(), |a, c| a + c.gain.norm_sqr())
    }
}

/// Path-loss window the simulator draws cluster gains from: total loss is
/// uniform in dB over `[mu_db, mu_db + window_db]`, phase uniform.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct PathGainModel {
    pub mu_db: f64,
    pub window_db: f64,
}

impl PathGainModel {
    pub fn new(mu_db: f64, window_db: f64) -> Self {
        assert!(window_db >= 0.0, "loss window must be nonnegative");
        PathGainModel { mu_db, window_db }
    }

    /// Weakest admissible path amplitude before the array factor. SNR and
    /// normalized-energy accounting anchor here.
    pub fn floor_amplitude(&self) -> f64 {
        10f64.powf(-(self.mu_db + self.window_db) / 20.0)
    }

    /// Strongest admissible path amplitude before the array factor.
    pub fn peak_amplitude(&self) -> f64 {
        10f64.powf(-self.mu_db / 20.0)
    }

    /// Amplitude bounds of the stored composite gain, array factor included.
    pub fn composite_bounds(&self, n_t: usize, n_r: usize) -> (f64, f64) {
        let arr = ((n_t * n_r) as f64).sqrt();
        (arr * self.floor_amplitude(), arr * self.peak_amplitude())
    }
}

/// How many of the `l` cluster slots are populated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClusterCount {
    /// Exactly `l` clusters (the evaluation default).
    Exact,
    /// Each slot independently present with this probability.
    UpTo(f64),
}

/// Draw a sparse channel: `l` slots with distinct RX bins and distinct TX
/// bins, composite gain magnitude from the loss window, uniform phase.
pub fn sample_channel<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    n_t: usize,
    n_r: usize,
    l: usize,
    gains: &PathGainModel,
) -> Result<AngularChannel<T>> {
    sample_channel_with(rng, n_t, n_r, l, gains, ClusterCount::Exact)
}

pub fn sample_channel_with<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    n_t: usize,
    n_r: usize,
    l: usize,
    gains: &PathGainModel,
    count: ClusterCount,
) -> Result<AngularChannel<T>> {
    if l > n_r.min(n_t) {
        return Err(Error::InvalidConfig(format!(
            "cannot place {l} clusters on distinct bins of a {n_r}x{n_t} grid"
        )));
    }
    if l == 0 {
        return Ok(AngularChannel::zero(n_r, n_t));
    }
    let rx_bins = sample_distinct(rng, n_r, l);
    let tx_bins = sample_distinct(rng, n_t, l);
    let arr = ((n_t * n_r) as f64).sqrt();
    let mut clusters = Vec::with_capacity(l);
    for i in 0..l {
        let loss_db = gains.mu_db + rng.gen::<f64>() * gains.window_db;
        let amp = arr * 10f64.powf(-loss_db / 20.0);
        let phase = rng.gen::<f64>() * std::f64::consts::TAU;
        clusters.push(PathCluster {
            tx_bin: tx_bins[i],
            rx_bin: rx_bins[i],
            gain: Cx::new(T::of(amp * phase.cos()), T::of(amp * phase.sin())),
        });
    }
    if let ClusterCount::UpTo(p) = count {
        let keep: Vec<bool> = (0..l).map(|_| rng.gen::<f64>() < p).collect();
        clusters = clusters
            .into_iter()
            .zip(keep)
            .filter_map(|(c, k)| k.then_some(c))
            .collect();
    }
    AngularChannel::new(n_r, n_t, clusters)
}

/// Physical channel from its angular form: `Q = U_r Q^a U_t^H`.
pub fn to_physical<T: Real>(
    a: &AngularChannel<T>,
    u_r: &Mat<Cx<T>>,
    u_t: &Mat<Cx<T>>,
) -> Result<Mat<Cx<T>>> {
    if u_r.rows() != a.n_r() || u_t.rows() != a.n_t() {
        return Err(Error::DimensionMismatch(format!(
            "to_physical: channel {}x{} against bases {} and {}",
            a.n_r(),
            a.n_t(),
            u_r.rows(),
            u_t.rows()
        )));
    }
    Ok(u_r.matmul(&a.dense()).matmul(&u_t.hermitian()))
}

/// Angular form of a physical channel: `Q^a = U_r^H Q U_t`.
pub fn to_angular<T: Real>(q: &Mat<Cx<T>>, u_r: &Mat<Cx<T>>, u_t: &Mat<Cx<T>>) -> Mat<Cx<T>> {
    u_r.hermitian().matmul(q).matmul(u_t)
}

/// Per-path SNR: `(P / N0) |gain|^2`.
pub fn snr_per_path<T: Real>(p: T, n0: T, gain: Cx<T>) -> T {
    assert!(p > T::zero() && n0 > T::zero(), "powers must be positive");
    p / n0 * gain.norm_sqr()
}

/// Flat record form of a channel, for replay files and golden tests.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ChannelRecord {
    pub n_r: usize,
    pub n_t: usize,
    /// (rx_bin, tx_bin, re, im) per cluster.
    pub clusters: Vec<(usize, usize, f64, f64)>,
}

impl<T: Real> AngularChannel<T> {
    pub fn to_record(&self) -> ChannelRecord {
        ChannelRecord {
            n_r: self.n_r,
            n_t: self.n_t,
            clusters: self
                .clusters
                .iter()
                .map(|c| (c.rx_bin, c.tx_bin, c.gain.re.as_f64(), c.gain.im.as_f64()))
                .collect(),
        }
    }

    pub fn from_record(rec: &ChannelRecord) -> Result<Self> {
        let clusters = rec
            .clusters
            .iter()
            .map(|&(rx, tx, re, im)| PathCluster {
                rx_bin: rx,
                tx_bin: tx,
                gain: Cx::new(T::of(re), T::of(im)),
            })
            .collect();
        AngularChannel::new(rec.n_r, rec.n_t, clusters)
    }
}
