//! The mapping from observed syndromes back to sparse angular channels.
//!
//! Two routes, as in hard-decision decoding: an exhaustive search over
//! candidate supports using least squares per support, and a look-up table
//! for small discretized gain alphabets. Both pick the candidate closest to
//! the observation in l2 distance.

use crate::error::{Error, Result};
use crate::gf2::{lift_to_real, BinMatrix};
use crate::linalg::Mat;
use crate::scalar::{cvec_dist, cvec_max_abs, cvec_norm2, Cx, Real};
use crate::util::{binomial, for_each_combination};
use std::io::Write;

/// Cap on the number of supports the search decoder will enumerate.
pub const SUPPORT_ENUMERATION_CAP: u128 = 1_000_000;

/// Default cap on look-up-table entries.
pub const LUT_ENTRY_CAP: u128 = 2_000_000;

/// Condition estimate above which the normal-equation solve logs a warning.
const CONDITION_WARN: f64 = 1e8;

/// One candidate support: the selected lifted columns and their left
/// pseudo-inverse.
#[derive(Clone, Debug)]
pub struct SupportCandidate<T> {
    indices: Vec<usize>,
    columns: Mat<T>,
    pinv: Mat<T>,
    /// l2 norm of each pseudo-inverse row: the noise gain of that slot's
    /// least-squares estimate.
    noise_gains: Vec<T>,
}

impl<T: Real> SupportCandidate<T> {
    pub fn new(h: &BinMatrix, indices: &[usize]) -> Result<Self> {
        let sub = h.select_columns(indices);
        let columns: Mat<T> = lift_to_real(&sub);
        let pinv = pseudo_inverse(&columns)?;
        let noise_gains = (0..pinv.rows())
            .map(|i| {
                pinv.row(i)
                    .iter()
                    .fold(T::zero(), |a, v| a + *v * *v)
                    .sqrt()
            })
            .collect();
        Ok(SupportCandidate {
            indices: indices.to_vec(),
            columns,
            pinv,
            noise_gains,
        })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn columns(&self) -> &Mat<T> {
        &self.columns
    }

    pub fn pinv(&self) -> &Mat<T> {
        &self.pinv
    }

    /// Least-squares gains for this support.
    pub fn solve(&self, u: &[Cx<T>]) -> Vec<Cx<T>> {
        self.pinv.apply_complex(u)
    }

    /// Projection of `u` onto the span of the support columns.
    pub fn project(&self, u: &[Cx<T>]) -> Vec<Cx<T>> {
        self.columns.apply_complex(&self.solve(u))
    }
}

/// Left Moore-Penrose inverse `(C^T C)^{-1} C^T` of a full-column-rank real
/// matrix.
pub fn pseudo_inverse<T: Real>(c: &Mat<T>) -> Result<Mat<T>> {
    let ct = c.transpose();
    let gram = ct.matmul(c);
    let (inv, cond) = gram.invert().map_err(|_| Error::RankDeficient)?;
    if cond.as_f64() > CONDITION_WARN {
        log::warn!(
            "normal equations poorly conditioned (pivot ratio {:.3e})",
            cond.as_f64()
        );
    }
    Ok(inv.matmul(&ct))
}

/// Sparse channel estimate: surviving (bin, gain) entries plus the residual
/// distance of the winning candidate.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseEstimate<T> {
    pub entries: Vec<(usize, Cx<T>)>,
    pub residual: T,
}

impl<T: Real> SparseEstimate<T> {
    pub fn empty() -> Self {
        SparseEstimate {
            entries: Vec::new(),
            residual: T::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Dense vector form of length `n`.
    pub fn to_dense(&self, n: usize) -> Vec<Cx<T>> {
        let mut v = vec![Cx::new(T::zero(), T::zero()); n];
        for &(i, g) in &self.entries {
            v[i] = g;
        }
        v
    }
}

/// Exhaustive-search decoder: every size-L support of the lifted measurement
/// rows, with pseudo-inverses precomputed once.
#[derive(Clone, Debug)]
pub struct SearchDecoder<T> {
    n: usize,
    l: usize,
    candidates: Vec<SupportCandidate<T>>,
}

impl<T: Real> SearchDecoder<T> {
    pub fn new(rows: &BinMatrix, l: usize) -> Result<Self> {
        Self::with_cap(rows, l, SUPPORT_ENUMERATION_CAP)
    }

    pub fn with_cap(rows: &BinMatrix, l: usize, cap: u128) -> Result<Self> {
        let n = rows.cols();
        if l > rows.rows() || l > n {
            return Err(Error::CapabilityTooLow {
                e_n: rows.rows().min(n),
                l,
            });
        }
        let count = binomial(n, l);
        if count > cap {
            return Err(Error::CapExceeded { needed: count, cap });
        }
        let mut candidates = Vec::with_capacity(count as usize);
        let mut failure: Option<Error> = None;
        for_each_combination(n, l, |support| {
            if failure.is_some() {
                return;
            }
            match SupportCandidate::new(rows, support) {
                Ok(c) => candidates.push(c),
                Err(e) => failure = Some(e),
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(SearchDecoder { n, l, candidates })
    }

    pub fn bins(&self) -> usize {
        self.n
    }

    pub fn sparsity(&self) -> usize {
        self.l
    }

    pub fn candidates(&self) -> &[SupportCandidate<T>] {
        &self.candidates
    }

    /// Decode an observation: pick the support whose projection is closest
    /// to `u`, solve for its gains, and drop near-zero components.
    ///
    /// Ties go to the lexicographically lowest support (the enumeration
    /// order). `threshold` is the pruning amplitude for a slot with unit
    /// noise gain; each slot's cutoff is scaled by the l2 norm of its
    /// pseudo-inverse row, so slots estimated from many measurements keep a
    /// proportionally lower bar. A numerical-zero floor covers noiseless
    /// input.
    pub fn decode(&self, u: &[Cx<T>], threshold: T) -> SparseEstimate<T> {
        assert_eq!(
            u.len(),
            self.candidates.first().map_or(0, |c| c.columns.rows()),
            "syndrome length does not match the measurement rows"
        );
        if self.l == 0 {
            return SparseEstimate {
                entries: Vec::new(),
                residual: cvec_norm2(u).sqrt(),
            };
        }
        // argmin ||u - beta_j|| = argmax ||beta_j|| for orthogonal projections
        let mut best = 0usize;
        let mut best_energy = T::neg_infinity();
        for (j, cand) in self.candidates.iter().enumerate() {
            let beta = cand.project(u);
            let energy = beta.iter().fold(T::zero(), |a, z| a + z.norm_sqr());
            if energy > best_energy {
                best_energy = energy;
                best = j;
            }
        }
        let cand = &self.candidates[best];
        let gains = cand.solve(u);
        let residual = cvec_dist(&cand.columns.apply_complex(&gains), u);
        // anything at the scale of floating-point dust is a zero component
        let dust = cvec_max_abs(u) * T::epsilon() * T::of(256.0);
        let entries = cand
            .indices
            .iter()
            .zip(gains)
            .zip(&cand.noise_gains)
            .filter(|((_, g), &ng)| g.norm() > (threshold * ng).max(dust))
            .map(|((&i, g), _)| (i, g))
            .collect();
        SparseEstimate { entries, residual }
    }
}

/// One-shot search decode; builds the candidate set and decodes.
pub fn search_decode<T: Real>(
    u_s: &[Cx<T>],
    h: &BinMatrix,
    l: usize,
    threshold: T,
) -> Result<SparseEstimate<T>> {
    Ok(SearchDecoder::new(h, l)?.decode(u_s, threshold))
}

#[derive(Clone, Debug)]
struct LutEntry<T> {
    syndrome: Vec<Cx<T>>,
    channel: Vec<(usize, Cx<T>)>,
}

/// Syndrome-to-channel look-up table over a finite gain alphabet.
#[derive(Clone, Debug)]
pub struct LookupTable<T> {
    n: usize,
    entries: Vec<LutEntry<T>>,
}

/// Build the table of every channel with at most `l` nonzero bins and gains
/// drawn from `alphabet`, keyed by its noiseless syndrome. Construction fails
/// if two distinct channels share a syndrome.
pub fn lut_build<T: Real>(
    h: &BinMatrix,
    alphabet: &[Cx<T>],
    l: usize,
    cap: u128,
) -> Result<LookupTable<T>> {
    if alphabet.is_empty() && l > 0 {
        return Err(Error::InvalidConfig("empty gain alphabet".into()));
    }
    let n = h.cols();
    let mut total: u128 = 0;
    for t in 0..=l.min(n) {
        total += binomial(n, t).saturating_mul((alphabet.len() as u128).pow(t as u32));
    }
    if total > cap {
        return Err(Error::CapExceeded { needed: total, cap });
    }
    let mut entries: Vec<LutEntry<T>> = Vec::with_capacity(total as usize);
    for t in 0..=l.min(n) {
        for_each_combination(n, t, |support| {
            // odometer over gain assignments
            let mut pick = vec![0usize; t];
            loop {
                let channel: Vec<(usize, Cx<T>)> = support
                    .iter()
                    .zip(&pick)
                    .map(|(&i, &a)| (i, alphabet[a]))
                    .collect();
                let mut syndrome = vec![Cx::new(T::zero(), T::zero()); h.rows()];
                for &(i, g) in &channel {
                    for (r, s) in syndrome.iter_mut().enumerate() {
                        if h.get(r, i) {
                            *s += g;
                        }
                    }
                }
                entries.push(LutEntry { syndrome, channel });
                // advance
                let mut pos = t;
                loop {
                    if pos == 0 {
                        return;
                    }
                    pos -= 1;
                    pick[pos] += 1;
                    if pick[pos] < alphabet.len() {
                        break;
                    }
                    pick[pos] = 0;
                    if pos == 0 {
                        return;
                    }
                }
            }
        });
    }
    // sufficient-statistic check: no two distinct channels may collide
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by(|&a, &b| {
        syndrome_key(&entries[a].syndrome)
            .partial_cmp(&syndrome_key(&entries[b].syndrome))
            .unwrap()
    });
    for w in order.windows(2) {
        if entries[w[0]].syndrome == entries[w[1]].syndrome {
            return Err(Error::SyndromeCollision);
        }
    }
    Ok(LookupTable { n, entries })
}

fn syndrome_key<T: Real>(s: &[Cx<T>]) -> Vec<f64> {
    s.iter().flat_map(|z| [z.re.as_f64(), z.im.as_f64()]).collect()
}

impl<T: Real> LookupTable<T> {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn bins(&self) -> usize {
        self.n
    }

    /// (syndrome, channel) pair at insertion position `i`.
    pub fn entry(&self, i: usize) -> (&[Cx<T>], &[(usize, Cx<T>)]) {
        (&self.entries[i].syndrome, &self.entries[i].channel)
    }

    /// Decode by nearest syndrome in l2 distance; ties keep the
    /// first-inserted entry.
    pub fn decode(&self, u_s: &[Cx<T>]) -> SparseEstimate<T> {
        assert!(!self.entries.is_empty(), "look-up table is empty");
        let mut best = 0usize;
        let mut best_dist = T::infinity();
        for (i, e) in self.entries.iter().enumerate() {
            let d = cvec_dist(&e.syndrome, u_s);
            if d < best_dist {
                best_dist = d;
                best = i;
            }
        }
        SparseEstimate {
            entries: self.entries[best].channel.clone(),
            residual: best_dist,
        }
    }

    /// CSV dump: syndrome rails, then support and gains.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        let m = self.entries.first().map_or(0, |e| e.syndrome.len());
        let header: Vec<String> = (0..m)
            .flat_map(|i| [format!("s{i}_re"), format!("s{i}_im")])
            .chain(["support".into(), "gains".into()])
            .collect();
        writeln!(out, "{}", header.join(","))?;
        for e in &self.entries {
            let mut cols: Vec<String> = Vec::with_capacity(2 * m + 2);
            for z in &e.syndrome {
                cols.push(format!("{}", z.re));
                cols.push(format!("{}", z.im));
            }
            cols.push(
                e.channel
                    .iter()
                    .map(|(i, _)| i.to_string())
                    .collect::<Vec<_>>()
                    .join("+"),
            );
            cols.push(
                e.channel
                    .iter()
                    .map(|(_, g)| format!("{}{}{}i", g.re, if g.im < T::zero() { "" } else { "+" }, g.im))
                    .collect::<Vec<_>>()
                    .join("+"),
            );
            writeln!(out, "{}", cols.join(","))?;
        }
        Ok(())
    }
}

/// Convenience wrapper matching the search-decoder call shape.
pub fn lut_decode<T: Real>(u_s: &[Cx<T>], table: &LookupTable<T>) -> SparseEstimate<T> {
    table.decode(u_s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{hamming_code, search_code};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cx(re: f64, im: f64) -> Cx<f64> {
        Cx::new(re, im)
    }

    #[test]
    fn pinv_single_ones_column() {
        let c = Mat::from_fn(4, 1, |_, _| 1.0f64);
        let p = pseudo_inverse(&c).unwrap();
        for j in 0..4 {
            assert!((p.get(0, j) - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn pinv_orthonormal_is_transpose() {
        let c = Mat::from_fn(3, 2, |i, j| ((i == j) as usize) as f64);
        let p = pseudo_inverse(&c).unwrap();
        assert_eq!(p, c.transpose());
    }

    #[test]
    fn pinv_left_inverse_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let c = Mat::from_fn(6, 3, |_, _| rng.gen_range(-1.0..1.0f64));
            let Ok(p) = pseudo_inverse(&c) else { continue };
            let prod = p.matmul(&c);
            let mut defect = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    defect += (prod.get(i, j) - want).powi(2);
                }
            }
            assert!(defect.sqrt() < 1e-9);
        }
    }

    #[test]
    fn pinv_rank_deficient_fails() {
        let c = Mat::from_fn(4, 2, |i, _| i as f64); // duplicate columns
        assert!(matches!(pseudo_inverse(&c), Err(Error::RankDeficient)));
    }

    #[test]
    fn decoder_zero_syndrome_gives_empty_estimate() {
        let h = hamming_code(4).parity_check().clone();
        let dec = SearchDecoder::<f64>::new(&h, 1).unwrap();
        let est = dec.decode(&vec![cx(0.0, 0.0); 4], 0.0);
        assert!(est.is_zero());
        assert!(est.residual < 1e-15);
    }

    #[test]
    fn decoder_recovers_random_sparse_channels() {
        let code = search_code(8, 2).unwrap();
        let h = code.parity_check().clone();
        let dec = SearchDecoder::<f64>::new(&h, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let mut bins = crate::util::sample_distinct(&mut rng, 8, 2);
            bins.sort_unstable();
            let gains: Vec<Cx<f64>> = (0..2)
                .map(|_| {
                    // gains bounded away from zero
                    let mag = rng.gen_range(0.5..2.0);
                    let ph = rng.gen_range(0.0..std::f64::consts::TAU);
                    cx(mag * ph.cos(), mag * ph.sin())
                })
                .collect();
            // oracle: dense product of the lifted columns
            let mut y = vec![cx(0.0, 0.0); 6];
            for (b, g) in bins.iter().zip(&gains) {
                for i in 0..6 {
                    if h.get(i, *b) {
                        y[i] += g;
                    }
                }
            }
            let est = dec.decode(&y, 0.0);
            let got: Vec<usize> = est.entries.iter().map(|e| e.0).collect();
            assert_eq!(got, bins);
            for ((_, g), want) in est.entries.iter().zip(&gains) {
                assert!((g - want).norm() < 1e-8);
            }
            assert!(est.residual < 1e-8);
        }
    }

    #[test]
    fn decoder_matches_syndrome_table_row() {
        // bin 12 has syndrome (1,1,1,1); any complex alpha scales it
        let h = hamming_code(4).parity_check().clone();
        let dec = SearchDecoder::<f64>::new(&h, 1).unwrap();
        let alpha = cx(0.8, -1.3);
        let y: Vec<Cx<f64>> = vec![alpha; 4];
        let est = dec.decode(&y, 0.0);
        assert_eq!(est.entries.len(), 1);
        assert_eq!(est.entries[0].0, 12);
        assert!((est.entries[0].1 - alpha).norm() < 1e-12);
    }

    #[test]
    fn decoder_threshold_drops_small_components() {
        let h = hamming_code(4).parity_check().clone();
        let dec = SearchDecoder::<f64>::new(&h, 1).unwrap();
        let y: Vec<Cx<f64>> = vec![cx(0.05, 0.0); 4]; // bin 12 with tiny gain
        let est = dec.decode(&y, 0.1);
        assert!(est.is_zero());
        let est = dec.decode(&y, 0.01);
        assert_eq!(est.entries.len(), 1);
    }

    #[test]
    fn decoder_tie_breaks_lexicographically() {
        // two identical columns force a tie; lowest support index must win
        let h: BinMatrix = "11\n11".parse().unwrap();
        let dec = SearchDecoder::<f64>::new(&h, 1).unwrap();
        let est = dec.decode(&[cx(1.0, 0.0), cx(1.0, 0.0)], 0.0);
        assert_eq!(est.entries[0].0, 0);
    }

    #[test]
    fn decoder_rejects_blowup() {
        let h = BinMatrix::identity(40);
        assert!(matches!(
            SearchDecoder::<f64>::with_cap(&h, 5, 1000),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn projection_is_orthogonal() {
        let h = hamming_code(4).parity_check().clone();
        let dec = SearchDecoder::<f64>::new(&h, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for cand in dec.candidates().iter().step_by(11) {
            let u: Vec<Cx<f64>> = (0..4)
                .map(|_| cx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let beta = cand.project(&u);
            // <u - beta, beta> = 0
            let inner: Cx<f64> = u
                .iter()
                .zip(&beta)
                .map(|(a, b)| (a - b).conj() * b)
                .sum();
            assert!(inner.norm() < 1e-10);
        }
    }

    #[test]
    fn wrong_support_has_positive_residual() {
        let h = hamming_code(4).parity_check().clone();
        let dec = SearchDecoder::<f64>::new(&h, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let bin = rng.gen_range(0..15usize);
            let gain = cx(rng.gen_range(0.5..1.5), rng.gen_range(0.5..1.5));
            let mut y = vec![cx(0.0, 0.0); 4];
            for i in 0..4 {
                if h.get(i, bin) {
                    y[i] += gain;
                }
            }
            for (j, cand) in dec.candidates().iter().enumerate() {
                if cand.indices() == [bin] {
                    continue;
                }
                let beta = cand.project(&y);
                let d = cvec_dist(&beta, &y);
                assert!(d > 1e-6, "support {j} shadowed bin {bin}");
            }
        }
    }

    #[test]
    fn lut_reproduces_syndrome_table_size() {
        let h = hamming_code(4).parity_check().clone();
        let table = lut_build(&h, &[cx(1.0, 0.0)], 1, LUT_ENTRY_CAP).unwrap();
        assert_eq!(table.len(), 16);
        // first entry is the zero channel
        let (syn, ch) = table.entry(0);
        assert!(ch.is_empty());
        assert!(syn.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn lut_zero_sparsity_single_entry() {
        let h = hamming_code(4).parity_check().clone();
        let table = lut_build(&h, &[cx(1.0, 0.0)], 0, LUT_ENTRY_CAP).unwrap();
        assert_eq!(table.len(), 1);
    }

    #[test]
    fn lut_signed_alphabet_on_hamming7() {
        let h = hamming_code(3).parity_check().clone();
        let table = lut_build(&h, &[cx(1.0, 0.0), cx(-1.0, 0.0)], 1, LUT_ENTRY_CAP).unwrap();
        assert_eq!(table.len(), 15); // 1 + 7 * 2
    }

    #[test]
    fn lut_detects_collisions() {
        // duplicate columns collide at L = 1
        let h: BinMatrix = "11\n11".parse().unwrap();
        assert!(matches!(
            lut_build(&h, &[cx(1.0, 0.0)], 1, LUT_ENTRY_CAP),
            Err(Error::SyndromeCollision)
        ));
    }

    #[test]
    fn lut_cap_guard() {
        let h = BinMatrix::identity(30);
        assert!(matches!(
            lut_build(&h, &[cx(1.0, 0.0), cx(2.0, 0.0)], 3, 100),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn lut_decode_exact_and_noisy() {
        let h = hamming_code(4).parity_check().clone();
        let table = lut_build(&h, &[cx(1.0, 0.0)], 1, LUT_ENTRY_CAP).unwrap();
        // exact: syndrome (1,1,0,0) belongs to bin 4
        let y = vec![cx(1.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0)];
        let est = table.decode(&y);
        assert_eq!(est.entries, vec![(4, cx(1.0, 0.0))]);
        assert!(est.residual < 1e-15);
        // small perturbation still lands on bin 4
        let y = vec![cx(0.9, 0.05), cx(1.1, 0.0), cx(0.05, -0.05), cx(0.0, 0.1)];
        let est = table.decode(&y);
        assert_eq!(est.entries[0].0, 4);
    }

    #[test]
    fn lut_tie_keeps_first_entry() {
        let h = hamming_code(4).parity_check().clone();
        let table = lut_build(&h, &[cx(1.0, 0.0)], 1, LUT_ENTRY_CAP).unwrap();
        // equidistant between zero channel (entry 0) and bin 0 (entry 1)
        let y = vec![cx(0.5, 0.0), cx(0.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0)];
        let est = table.decode(&y);
        assert!(est.is_zero(), "first-inserted entry must win ties");
    }

    #[test]
    fn lut_and_search_agree_on_alphabet_channels() {
        let h = hamming_code(3).parity_check().clone();
        let alphabet = [cx(1.0, 0.0), cx(-1.0, 0.0)];
        let table = lut_build(&h, &alphabet, 1, LUT_ENTRY_CAP).unwrap();
        let dec = SearchDecoder::<f64>::new(&h, 1).unwrap();
        for i in 0..table.len() {
            let (syn, ch) = table.entry(i);
            let lut_est = table.decode(syn);
            let search_est = dec.decode(syn, 0.0);
            assert_eq!(lut_est.entries, ch.to_vec());
            assert_eq!(search_est.entries, ch.to_vec());
        }
    }

    #[test]
    fn lut_csv_has_header_and_rows() {
        let h = hamming_code(3).parity_check().clone();
        let table = lut_build(&h, &[cx(1.0, 0.0)], 1, LUT_ENTRY_CAP).unwrap();
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 9); // header + 8 entries
        assert!(lines[0].starts_with("s0_re,s0_im"));
    }

    #[test]
    fn encoded_rows_decode_like_plain_rows() {
        use crate::codes::encoded_parity;
        let h = hamming_code(4).parity_check().clone();
        let g = hamming_code(3).generator().unwrap().clone();
        let hv = encoded_parity(&h, &g).unwrap();
        let dec = SearchDecoder::<f64>::new(&hv, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let bin = rng.gen_range(0..15usize);
            let gain = cx(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            if gain.norm() < 0.1 {
                continue;
            }
            let mut y = vec![cx(0.0, 0.0); 7];
            for i in 0..7 {
                if hv.get(i, bin) {
                    y[i] += gain;
                }
            }
            let est = dec.decode(&y, 0.0);
            assert_eq!(est.entries.len(), 1);
            assert_eq!(est.entries[0].0, bin);
            assert!((est.entries[0].1 - gain).norm() < 1e-9);
        }
    }

    #[test]
    fn search_decode_one_shot_wrapper() {
        let h = hamming_code(4).parity_check().clone();
        let y: Vec<Cx<f64>> = vec![cx(1.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0)];
        let est = search_decode(&y, &h, 1, 0.0).unwrap();
        assert_eq!(est.entries[0].0, 4);
    }
}
