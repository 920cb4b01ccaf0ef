//! Cross-module invariants: column independence over the complex field,
//! syndrome uniqueness, decoder exactness, and statistical sanity of the
//! Monte Carlo harness.

use beamcode::channel::{dft_matrix, sample_channel, to_physical, ArrayGeometry, PathGainModel};
use beamcode::codes::{encoded_parity, registry};
use beamcode::discovery::{plan, DiscoveryEngine, MeasurementSetup};
use beamcode::gf2::{lift_to_real, rank_gf2, BinMatrix};
use beamcode::mapping::{lut_build, SearchDecoder, LUT_ENTRY_CAP};
use beamcode::measure::{acquire_syndrome, ideal_syndrome, Beamformer, NoiseScaling, QuantizerSpec};
use beamcode::scalar::{cvec_dist, Cx, Real};
use beamcode::sim::{run_scenario, ScenarioConfig};
use beamcode::util::for_each_combination;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cx(re: f64, im: f64) -> Cx<f64> {
    Cx::new(re, im)
}

/// Any support of size up to e_n selects complex-independent columns of the
/// lifted parity check, for the plain and the encoded rows alike.
#[test]
fn small_supports_stay_independent_over_c() {
    let mut cases: Vec<(String, BinMatrix, usize)> = Vec::new();
    for key in registry::keys() {
        let code = registry::get(key).unwrap();
        cases.push((key.to_string(), code.parity_check().clone(), code.capability()));
    }
    for (meas, corr) in registry::ec_pairs() {
        let code = registry::get(meas).unwrap();
        let cc = registry::get(corr).unwrap();
        let hv = encoded_parity(code.parity_check(), cc.generator().unwrap()).unwrap();
        cases.push((format!("{meas}+{corr}"), hv, code.capability()));
    }
    for (name, rows, e_n) in cases {
        let lifted = lift_to_real::<f64>(&rows);
        for size in 1..=e_n {
            for_each_combination(rows.cols(), size, |support| {
                let sub = rows.select_columns(support);
                let real_rank = lift_to_real::<f64>(&sub).rank(1e-9);
                assert_eq!(real_rank, size, "{name}: support {support:?} degenerate");
            });
        }
        let _ = lifted;
    }
}

/// GF(2)-independent column sets keep their rank after lifting to the reals.
#[test]
fn lifted_rank_matches_gf2_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for key in registry::keys() {
        let h = registry::get(key).unwrap().parity_check().clone();
        for _ in 0..50 {
            let take = rng.gen_range(1..=h.rows());
            let mut cols: Vec<usize> = (0..h.cols()).collect();
            for i in 0..take {
                let j = rng.gen_range(i..cols.len());
                cols.swap(i, j);
            }
            let sub = h.select_columns(&cols[..take]);
            let gf2 = rank_gf2(&sub);
            let real = lift_to_real::<f64>(&sub).rank(1e-9);
            assert!(real >= gf2, "{key}: real rank dropped below GF(2) rank");
        }
    }
}

/// Noiseless, unquantized acquisition equals the lifted-row product for any
/// sparse channel, including encoded measurement rows.
#[test]
fn acquisition_is_linear_in_the_channel() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for (key, ec) in [("hamming-15-11", None), ("searched-8-2", Some("short-hamming-10-6"))] {
        let code = registry::get(key).unwrap();
        let rows = match ec {
            None => code.parity_check().clone(),
            Some(c) => {
                let cc = registry::get(c).unwrap();
                encoded_parity(code.parity_check(), cc.generator().unwrap()).unwrap()
            }
        };
        let n = code.n();
        let u = dft_matrix(&ArrayGeometry::<f64>::half_wavelength(n));
        for _ in 0..30 {
            // random sparse channel vector
            let mut q_a = vec![cx(0.0, 0.0); n];
            for _ in 0..code.capability() {
                let bin = rng.gen_range(0..n);
                q_a[bin] = cx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
            // physical single-TX channel for that angular vector
            let q = beamcode::linalg::Mat::from_fn(n, 1, |i, _| {
                (0..n).map(|b| u.get(i, b) * q_a[b]).sum()
            });
            let got = acquire_syndrome(
                &q,
                &rows,
                &u,
                &Beamformer::scalar_one(),
                cx(3.0, 0.0),
                0.0,
                &QuantizerSpec::perfect(),
                NoiseScaling::Normalized,
                &mut rng,
            )
            .unwrap();
            let want = ideal_syndrome(&rows, &q_a).unwrap();
            let scale: f64 = q_a.iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(
                cvec_dist(&got.values, &want.values) <= 1e-9 * scale.max(1e-30),
                "{key} ec={ec:?}"
            );
        }
    }
}

/// Distinct measurable channels give distinct noiseless syndromes
/// (exhaustive, small code, discretized gains).
#[test]
fn syndromes_separate_measurable_channels() {
    let code = registry::get("hamming-7-4").unwrap();
    let h = code.parity_check();
    let alphabet = [cx(1.0, 0.0), cx(-1.0, 0.0)];
    let mut syndromes: Vec<Vec<Cx<f64>>> = Vec::new();
    // all 0- and 1-sparse channels over the alphabet
    syndromes.push(ideal_syndrome(h, &vec![cx(0.0, 0.0); 7]).unwrap().values);
    for bin in 0..7 {
        for g in alphabet {
            let mut q = vec![cx(0.0, 0.0); 7];
            q[bin] = g;
            syndromes.push(ideal_syndrome(h, &q).unwrap().values);
        }
    }
    for i in 0..syndromes.len() {
        for j in i + 1..syndromes.len() {
            assert!(
                cvec_dist(&syndromes[i], &syndromes[j]) > 1e-9,
                "channels {i} and {j} collide"
            );
        }
    }
}

/// The search decoder inverts every measurable channel exactly when
/// measurements are noiseless, for every registered code.
#[test]
fn search_decoder_exact_on_measurable_channels() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for key in registry::keys() {
        let code = registry::get(key).unwrap();
        let h = code.parity_check();
        let l = code.capability().min(3);
        if l == 0 {
            continue;
        }
        let dec = SearchDecoder::<f64>::new(h, l).unwrap();
        for _ in 0..40 {
            let mut bins: Vec<usize> = (0..h.cols()).collect();
            for i in 0..l {
                let j = rng.gen_range(i..bins.len());
                bins.swap(i, j);
            }
            let mut support: Vec<usize> = bins[..l].to_vec();
            support.sort_unstable();
            let gains: Vec<Cx<f64>> = (0..l)
                .map(|_| {
                    let mag = rng.gen_range(0.3..2.0);
                    let ph = rng.gen_range(0.0..std::f64::consts::TAU);
                    cx(mag * ph.cos(), mag * ph.sin())
                })
                .collect();
            let mut q = vec![cx(0.0, 0.0); h.cols()];
            for (b, g) in support.iter().zip(&gains) {
                q[*b] = *g;
            }
            let y = ideal_syndrome(h, &q).unwrap();
            let est = dec.decode(&y.values, 0.0);
            let got: Vec<usize> = est.entries.iter().map(|e| e.0).collect();
            assert_eq!(got, support, "{key}");
            for (i, (_, g)) in est.entries.iter().enumerate() {
                assert!((g - gains[i]).norm() < 1e-8, "{key} gain {i}");
            }
            assert!(est.residual < 1e-8, "{key}");
        }
    }
}

/// Fitting the wrong support never reproduces the syndrome of a channel with
/// gains bounded away from zero.
#[test]
fn wrong_supports_leave_residual() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let code = registry::get("searched-8-2").unwrap();
    let h = code.parity_check();
    let dec = SearchDecoder::<f64>::new(h, 2).unwrap();
    for _ in 0..60 {
        let b0 = rng.gen_range(0..8);
        let b1 = (b0 + rng.gen_range(1..8)) % 8;
        let mut support = vec![b0, b1];
        support.sort_unstable();
        let mut q = vec![cx(0.0, 0.0); 8];
        for &b in &support {
            let ph = rng.gen_range(0.0..std::f64::consts::TAU);
            q[b] = cx(ph.cos(), ph.sin());
        }
        let y = ideal_syndrome(h, &q).unwrap();
        for cand in dec.candidates() {
            if cand.indices() == support.as_slice() {
                continue;
            }
            let beta = cand.project(&y.values);
            assert!(
                cvec_dist(&beta, &y.values) > 1e-6,
                "support {:?} shadows {:?}",
                cand.indices(),
                support
            );
        }
    }
}

/// When gains come from the table's alphabet and measurements are noiseless,
/// the table decoder and the search decoder agree.
#[test]
fn lut_and_search_agree() {
    let code = registry::get("searched-8-2").unwrap();
    let h = code.parity_check();
    let alphabet = [cx(1.0, 0.0), cx(0.0, 1.0)];
    let table = lut_build(h, &alphabet, 2, LUT_ENTRY_CAP).unwrap();
    let dec = SearchDecoder::<f64>::new(h, 2).unwrap();
    for i in 0..table.len() {
        let (syndrome, channel) = table.entry(i);
        let via_lut = table.decode(syndrome);
        let via_search = dec.decode(syndrome, 0.0);
        assert_eq!(via_lut.entries, channel.to_vec());
        assert_eq!(via_search.entries.len(), channel.len());
        for ((got_bin, got_gain), (want_bin, want_gain)) in
            via_search.entries.iter().zip(channel)
        {
            assert_eq!(got_bin, want_bin);
            assert!((got_gain - want_gain).norm() < 1e-9);
        }
    }
}

/// Whole-pipeline exactness at f32: the generic core decodes correctly at
/// single precision too.
#[test]
fn noiseless_discovery_recovers_support_at_f32() {
    let p = plan(15, 15, 1, "hamming-15-11", "hamming-15-11", None).unwrap();
    let engine = DiscoveryEngine::<f32>::new(p).unwrap();
    let model = PathGainModel::new(136.0, 14.0);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let truth = sample_channel::<f32, _>(&mut rng, 15, 15, 1, &model).unwrap();
        let q = to_physical(&truth, engine.rx_basis(), engine.tx_basis()).unwrap();
        let res = engine
            .discover(&q, &MeasurementSetup::noiseless(1.0), &mut rng)
            .unwrap();
        assert_eq!(res.q_hat.support(), truth.support());
        let truth_gain = truth.clusters()[0].gain;
        let got_gain = res.q_hat.clusters()[0].gain;
        assert!((got_gain - truth_gain).norm() < 1e-4 * truth_gain.norm());
    }
}

/// Perfect-k error probability decays with SNR, within Monte Carlo slack.
#[test]
fn error_probability_monotone_in_snr() {
    let mut cfg = ScenarioConfig::new(15, 15, 1, "hamming-15-11", "hamming-15-11");
    cfg.snr_db = vec![-16.0, -12.0, -8.0, -4.0];
    cfg.runs = 2000;
    cfg.seed = 17;
    let records = run_scenario::<f64>(&cfg).unwrap();
    for w in records.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let p = a.p_err_perfect[0];
        let slack = 3.0 * (p * (1.0 - p) / cfg.runs as f64).sqrt() + 3.0 / cfg.runs as f64;
        assert!(
            b.p_err_perfect[0] <= p + slack,
            "error rose from {} to {} between {} and {} dB",
            p,
            b.p_err_perfect[0],
            a.snr_db,
            b.snr_db
        );
    }
}

/// Perfect-k failure implies all-k failure or a spurious beam; checked on
/// the aggregate records where it shows as p_perfect >= p_all.
#[test]
fn perfect_error_dominates_all_error() {
    let mut cfg = ScenarioConfig::new(8, 8, 2, "searched-8-2", "searched-8-2");
    cfg.snr_db = vec![-12.0, -8.0, -4.0];
    cfg.runs = 2000;
    cfg.seed = 19;
    let records = run_scenario::<f64>(&cfg).unwrap();
    for r in &records {
        for k in 0..2 {
            assert!(r.p_err_perfect[k] >= r.p_err_all[k] - 1e-12);
        }
    }
}
