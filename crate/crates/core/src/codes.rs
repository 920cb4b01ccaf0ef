//! Linear block codes whose parity-check matrices drive the measurement
//! design, plus the brute-force capability oracle and the syndrome-encoding
//! construction used for error-corrected measurements.

use crate::error::{Error, Result};
use crate::gf2::{matmul_gf2, rank_gf2, BinMatrix};
use crate::util::{for_each_combination, patterns_up_to};
use std::collections::HashSet;

/// Default cap on the number of error patterns `verify_correction` will
/// enumerate.
pub const VERIFY_PATTERN_CAP: u128 = 1_000_000;

/// An (n, k) binary linear block code with parity-check matrix `H` and an
/// optional generator `G`.
#[derive(Clone, Debug)]
pub struct LinearCode {
    n: usize,
    k: usize,
    d: Option<usize>,
    e_n: usize,
    h: BinMatrix,
    g: Option<BinMatrix>,
}

impl LinearCode {
    /// Validates shape, full row rank of `H`, `G H^T = 0` when `G` is given,
    /// and `e_n = floor((d-1)/2)` when `d` is known.
    pub fn new(
        n: usize,
        k: usize,
        d: Option<usize>,
        e_n: usize,
        h: BinMatrix,
        g: Option<BinMatrix>,
    ) -> Result<Self> {
        if h.rows() != n - k || h.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "parity check must be {}x{n}, got {}x{}",
                n - k,
                h.rows(),
                h.cols()
            )));
        }
        if rank_gf2(&h) != n - k {
            return Err(Error::RankDeficient);
        }
        if let Some(g) = &g {
            if g.rows() != k || g.cols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "generator must be {k}x{n}, got {}x{}",
                    g.rows(),
                    g.cols()
                )));
            }
            let prod = matmul_gf2(g, &h.transpose())?;
            if prod != BinMatrix::zeros(k, n - k) {
                return Err(Error::InvalidConfig(
                    "generator does not annihilate the parity check".into(),
                ));
            }
        }
        if let Some(d) = d {
            if e_n != (d - 1) / 2 {
                return Err(Error::InvalidConfig(format!(
                    "capability {e_n} inconsistent with minimum distance {d}"
                )));
            }
        }
        Ok(LinearCode { n, k, d, e_n, h, g })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn min_distance(&self) -> Option<usize> {
        self.d
    }

    /// Error-correction capability; equals the recoverable cluster count.
    pub fn capability(&self) -> usize {
        self.e_n
    }

    /// Number of measurements the code induces, `m = n - k`.
    pub fn parity_bits(&self) -> usize {
        self.n - self.k
    }

    pub fn parity_check(&self) -> &BinMatrix {
        &self.h
    }

    pub fn generator(&self) -> Option<&BinMatrix> {
        self.g.as_ref()
    }
}

/// The 4x15 parity-check matrix of the (15,11,3) Hamming code, stored in the
/// exact column order the syndrome look-up table is built against.
const HAMMING_15_11_H: &str = "\
    100010011010111
    010011010111100
    001001101011110
    000100110101111";

/// Columns of all r-bit values with weight >= 2, ascending; the `[A | I]`
/// building block of the systematic Hamming family.
fn hamming_info_columns(r: usize) -> Vec<u64> {
    (1..(1u64 << r)).filter(|v| v.count_ones() >= 2).collect()
}

fn parity_from_columns(rows: usize, cols: &[u64]) -> BinMatrix {
    let mut h = BinMatrix::zeros(rows, cols.len());
    for (j, &v) in cols.iter().enumerate() {
        for i in 0..rows {
            if (v >> i) & 1 == 1 {
                h.set(i, j, true);
            }
        }
    }
    h
}

/// Systematic generator `[I_k | A^T]` for a parity check `[A | I_{n-k}]`.
fn systematic_generator(a: &BinMatrix) -> BinMatrix {
    BinMatrix::identity(a.cols()).hconcat(&a.transpose())
}

/// The (2^r - 1, 2^r - 1 - r, 3) Hamming code.
///
/// For `r = 4` this returns the registry's fixed 4x15 matrix so the syndrome
/// table reproduces column-for-column; other ranks use the systematic
/// `[A | I_r]` layout with `A` columns in ascending numeric order.
pub fn hamming_code(r: usize) -> LinearCode {
    assert!(r >= 2, "hamming_code requires r >= 2");
    let n = (1usize << r) - 1;
    let k = n - r;
    if r == 4 {
        let h: BinMatrix = HAMMING_15_11_H.parse().expect("builtin matrix parses");
        // H = [I_4 | B]  =>  G = [B^T | I_11]
        let b = h.select_columns(&(4..15).collect::<Vec<_>>());
        let g = b.transpose().hconcat(&BinMatrix::identity(k));
        return LinearCode::new(n, k, Some(3), 1, h, Some(g)).expect("valid Hamming code");
    }
    let a = parity_from_columns(r, &hamming_info_columns(r));
    let h = a.hconcat(&BinMatrix::identity(r));
    let g = systematic_generator(&a);
    LinearCode::new(n, k, Some(3), 1, h, Some(g)).expect("valid Hamming code")
}

/// Shorten the systematic (2^r - 1, 2^r - 1 - r, 3) Hamming code by dropping
/// its last `s` information coordinates, giving a (2^r - 1 - s, 2^r - 1 - r - s, 3)
/// code whose generator stays in standard form.
pub fn shortened_hamming(r: usize, s: usize) -> LinearCode {
    let k_full = (1usize << r) - 1 - r;
    assert!(s < k_full, "shortening must leave information bits");
    let cols = hamming_info_columns(r);
    let a = parity_from_columns(r, &cols[..k_full - s]);
    let h = a.hconcat(&BinMatrix::identity(r));
    let g = systematic_generator(&a);
    let n = k_full - s + r;
    LinearCode::new(n, n - r, Some(3), 1, h, Some(g)).expect("valid shortened Hamming code")
}

/// Evaluation matrix of all monomials of degree <= r in m variables over the
/// 2^m points; rows ordered by degree, then lexicographically by variable set.
fn rm_evaluation_matrix(r: usize, m: usize) -> BinMatrix {
    let n = 1usize << m;
    let mut masks: Vec<u32> = Vec::new();
    for deg in 0..=r {
        let mut level: Vec<u32> = (0..1u32 << m)
            .filter(|v| v.count_ones() as usize == deg)
            .collect();
        level.sort_unstable();
        masks.extend(level);
    }
    let mut g = BinMatrix::zeros(masks.len(), n);
    for (row, &mask) in masks.iter().enumerate() {
        for point in 0..n {
            // monomial value: product of selected coordinates
            if (point as u32) & mask == mask {
                g.set(row, point, true);
            }
        }
    }
    g
}

/// The Reed-Muller code RM(r, m): n = 2^m, k = sum of C(m, i) for i <= r,
/// d = 2^(m-r). The parity check is the generator of the dual RM(m-r-1, m).
pub fn reed_muller(r: usize, m: usize) -> LinearCode {
    assert!(r <= m, "reed_muller requires r <= m");
    let n = 1usize << m;
    let g = rm_evaluation_matrix(r, m);
    let k = g.rows();
    let d = 1usize << (m - r);
    let e_n = (d - 1) / 2;
    let h = if r == m {
        BinMatrix::zeros(0, n)
    } else {
        rm_evaluation_matrix(m - r - 1, m)
    };
    LinearCode::new(n, k, Some(d), e_n, h, Some(g)).expect("valid Reed-Muller code")
}

/// True iff the syndromes of all error patterns of weight <= `e_n` are
/// pairwise distinct. This brute-force check is the oracle every registered
/// capability is tested against.
pub fn verify_correction(h: &BinMatrix, e_n: usize) -> Result<bool> {
    verify_correction_with_cap(h, e_n, VERIFY_PATTERN_CAP)
}

/// `verify_correction` with an explicit enumeration cap.
pub fn verify_correction_with_cap(h: &BinMatrix, e_n: usize, cap: u128) -> Result<bool> {
    let n = h.cols();
    let needed = patterns_up_to(n, e_n);
    if needed > cap {
        return Err(Error::CapExceeded { needed, cap });
    }
    let cols: Vec<Vec<u64>> = (0..n).map(|j| h.column_bits(j)).collect();
    let words = cols.first().map_or(1, |c| c.len());
    let mut seen: HashSet<Vec<u64>> = HashSet::with_capacity(needed as usize);
    let mut distinct = true;
    for w in 0..=e_n {
        if !distinct {
            break;
        }
        for_each_combination(n, w, |support| {
            if !distinct {
                return;
            }
            let mut syndrome = vec![0u64; words];
            for &j in support {
                for (acc, bits) in syndrome.iter_mut().zip(&cols[j]) {
                    *acc ^= bits;
                }
            }
            if !seen.insert(syndrome) {
                distinct = false;
            }
        });
    }
    Ok(distinct)
}

/// Greedy column search for an (n-k) x n parity check whose weight <= `e_n`
/// syndromes are all distinct, trying row counts from the sphere-packing
/// bound upward. The candidate order is fixed, so the result is
/// deterministic.
pub fn search_code(n: usize, e_n: usize) -> Result<LinearCode> {
    let min_rows = {
        let mut m = 1;
        while (1u128 << m) < patterns_up_to(n, e_n) {
            m += 1;
        }
        m
    };
    for m in min_rows..=n.min(63) {
        if let Some(cols) = greedy_columns(n, e_n, m) {
            let h = parity_from_columns(m, &cols);
            debug_assert_eq!(rank_gf2(&h), m);
            debug_assert!(matches!(verify_correction(&h, e_n), Ok(true)));
            return LinearCode::new(n, n - m, None, e_n, h, None);
        }
    }
    Err(Error::NoCodeFound { n, e_n })
}

/// Pick `n` columns such that no nonempty subset of at most 2*e_n chosen
/// columns XORs to zero. Candidates are tried with weights closest to
/// (m-1)/2 first: a little lighter than half weight keeps candidate supports
/// well separated while still covering every direction with several
/// measurements. The order is fixed, and backtracking resumes after the last
/// choice when the greedy pass stalls.
fn greedy_columns(n: usize, e_n: usize, m: usize) -> Option<Vec<u64>> {
    let target = m as i64 - 1;
    let mut candidates: Vec<u64> = (1..(1u64 << m)).collect();
    candidates.sort_by_key(|v| ((2 * v.count_ones() as i64 - target).abs(), *v));
    let mut chosen: Vec<u64> = Vec::with_capacity(n);
    let mut next = 0usize;
    // positions in the candidate list we may roll back to
    let mut frames: Vec<usize> = Vec::new();
    let mut budget: u64 = 2_000_000;
    loop {
        if chosen.len() == n {
            return Some(chosen);
        }
        let mut placed = false;
        while next < candidates.len() {
            let pos = next;
            next += 1;
            if is_reachable(&chosen, candidates[pos], (2 * e_n).saturating_sub(1)) {
                continue;
            }
            frames.push(pos);
            chosen.push(candidates[pos]);
            placed = true;
            break;
        }
        if placed {
            continue;
        }
        // backtrack: drop the last chosen column and resume after it
        loop {
            budget = budget.saturating_sub(1);
            if budget == 0 {
                return None;
            }
            let last = frames.pop()?;
            chosen.pop();
            next = last + 1;
            if next < candidates.len() {
                break;
            }
        }
    }
}

/// True iff `v` equals the XOR of some nonempty subset of `chosen` with size
/// at most `depth`.
fn is_reachable(chosen: &[u64], v: u64, depth: usize) -> bool {
    fn rec(chosen: &[u64], target: u64, depth: usize, start: usize) -> bool {
        if depth == 0 {
            return false;
        }
        for i in start..chosen.len() {
            let rest = target ^ chosen[i];
            if rest == 0 || rec(chosen, rest, depth - 1, i + 1) {
                return true;
            }
        }
        false
    }
    if v == 0 {
        return true;
    }
    rec(chosen, v, depth, 0)
}

/// H^nu = G_c^T H over GF(2): the measurement rows after encoding syndromes
/// with the correction code's generator.
pub fn encoded_parity(h: &BinMatrix, g_c: &BinMatrix) -> Result<BinMatrix> {
    if g_c.rows() != h.rows() {
        return Err(Error::DimensionMismatch(format!(
            "encoded_parity: G_c has {} rows, H has {} rows",
            g_c.rows(),
            h.rows()
        )));
    }
    matmul_gf2(&g_c.transpose(), h)
}

/// Degenerate code whose parity check is the n x n identity; its syndromes
/// read the channel bins directly, which reproduces exhaustive scanning.
pub fn identity_code(n: usize) -> LinearCode {
    LinearCode::new(n, 0, None, n, BinMatrix::identity(n), None).expect("identity code")
}

pub mod registry {
    //! String-keyed access to the codes the simulator knows about.

    use super::*;

    /// Keys the registry advertises (resolvable dynamic keys such as
    /// `identity-<n>` and other `hamming-*` sizes are not listed).
    pub fn keys() -> &'static [&'static str] {
        &[
            "hamming-15-11",
            "hamming-7-4",
            "rm-32-16",
            "searched-8-2",
            "short-hamming-21-16",
            "short-hamming-10-6",
        ]
    }

    /// (measurement code, correction code) pairings used by the encoded
    /// scenarios; every correction code's generator is in standard form with
    /// `k` equal to the measurement code's parity-bit count.
    pub fn ec_pairs() -> &'static [(&'static str, &'static str)] {
        &[
            ("hamming-15-11", "hamming-7-4"),
            ("rm-32-16", "short-hamming-21-16"),
            ("searched-8-2", "short-hamming-10-6"),
        ]
    }

    /// Resolve a code by key.
    pub fn get(key: &str) -> Result<LinearCode> {
        if let Some(rest) = key.strip_prefix("identity-") {
            let n: usize = rest
                .parse()
                .map_err(|_| Error::UnknownCode(key.to_string()))?;
            if n == 0 {
                return Err(Error::UnknownCode(key.to_string()));
            }
            return Ok(identity_code(n));
        }
        if let Some(rest) = key.strip_prefix("short-hamming-") {
            let (n, k) = parse_nk(key, rest)?;
            if n <= k {
                return Err(Error::UnknownCode(key.to_string()));
            }
            let r = n - k;
            let full_n = (1usize << r) - 1;
            if r < 2 || n > full_n || full_n - n >= full_n - r {
                return Err(Error::UnknownCode(key.to_string()));
            }
            return Ok(shortened_hamming(r, full_n - n));
        }
        if let Some(rest) = key.strip_prefix("hamming-") {
            let (n, k) = parse_nk(key, rest)?;
            let r = n.checked_sub(k).filter(|&r| r >= 2 && (1usize << r) - 1 == n);
            let Some(r) = r else {
                return Err(Error::UnknownCode(key.to_string()));
            };
            return Ok(hamming_code(r));
        }
        match key {
            "rm-32-16" => Ok(reed_muller(2, 5)),
            "searched-8-2" => search_code(8, 2),
            _ => Err(Error::UnknownCode(key.to_string())),
        }
    }

    fn parse_nk(key: &str, rest: &str) -> Result<(usize, usize)> {
        let mut it = rest.splitn(2, '-');
        let n = it.next().and_then(|s| s.parse().ok());
        let k = it.next().and_then(|s| s.parse().ok());
        match (n, k) {
            (Some(n), Some(k)) if k < n => Ok((n, k)),
            _ => Err(Error::UnknownCode(key.to_string())),
        }
    }
}
