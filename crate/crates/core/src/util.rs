//! Small shared helpers: combination enumeration and random draws.

use crate::scalar::{Cx, Real};
use rand::Rng;

/// Visit every k-subset of `0..n` in lexicographic order.
///
/// The callback receives the current index set; it must not retain the slice.
pub fn for_each_combination<F: FnMut(&[usize])>(n: usize, k: usize, mut f: F) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Binomial coefficient with saturation into `u128`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Number of sparse patterns with weight at most `k` over `n` positions.
pub fn patterns_up_to(n: usize, k: usize) -> u128 {
    (0..=k.min(n)).map(|i| binomial(n, i)).sum()
}

/// Standard normal draw via Box-Muller on the `f64` stream.
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Circularly-symmetric complex Gaussian with total variance `var`.
pub fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R, var: T) -> Cx<T> {
    let s = (var.as_f64() / 2.0).sqrt();
    let re = standard_normal(rng) * s;
    let im = standard_normal(rng) * s;
    Cx::new(T::of(re), T::of(im))
}

/// Sample `k` distinct indices from `0..n`, in draw order.
pub fn sample_distinct<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    assert!(k <= n, "cannot draw {k} distinct values from 0..{n}");
    // partial Fisher-Yates on an index table
    let mut pool: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let j = rng.gen_range(i..n);
        pool.swap(i, j);
        out.push(pool[i]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn combinations_lexicographic() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, |c| seen.push(c.to_vec()));
        assert_eq!(
            seen,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
    }

    #[test]
    fn combinations_edges() {
        let mut count = 0;
        for_each_combination(5, 0, |c| {
            assert!(c.is_empty());
            count += 1;
        });
        assert_eq!(count, 1);
        count = 0;
        for_each_combination(3, 5, |_| count += 1);
        assert_eq!(count, 0);
        count = 0;
        for_each_combination(3, 3, |_| count += 1);
        assert_eq!(count, 1);
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(32, 3), 4960);
        assert_eq!(binomial(15, 1), 15);
        assert_eq!(binomial(8, 2), 28);
        assert_eq!(patterns_up_to(8, 2), 37);
    }

    #[test]
    fn distinct_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let s = sample_distinct(&mut rng, 10, 4);
            let mut d = s.clone();
            d.sort_unstable();
            d.dedup();
            assert_eq!(d.len(), 4);
        }
    }

    #[test]
    fn gaussian_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 200_000;
        let mut sum = 0.0;
        let mut sq = 0.0;
        for _ in 0..n {
            let z: Cx<f64> = complex_gaussian(&mut rng, 4.0);
            sum += z.re + z.im;
            sq += z.norm_sqr();
        }
        assert!((sum / n as f64).abs() < 0.02);
        assert!((sq / n as f64 - 4.0).abs() < 0.05);
    }
}
