//! `beamcode`: run coded beam-discovery simulations and inspect the pieces.

use anyhow::{bail, Context, Result};
use beamcode::channel::{
    dft_matrix, sample_channel, spatial_signature, to_physical, ArrayGeometry, PathGainModel,
};
use beamcode::codes::{registry, verify_correction};
use beamcode::discovery::{plan, DiscoveryEngine, MeasurementSetup};
use beamcode::gf2::{lift_to_real, matmul_gf2, rank_gf2, standard_form};
use beamcode::mapping::{lut_build, LUT_ENTRY_CAP};
use beamcode::measure::combiner_from_row;
use beamcode::sim::{emit_csv, emit_json, run_scenario, ScenarioConfig};
use beamcode::{C64, Mat64};
use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "beamcode",
    about = "Sparse mm-wave beam discovery with parity-check measurement designs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario sweep from a key-value config file; writes CSV and JSON.
    Run {
        /// Config file (flat `key = value` lines).
        config: PathBuf,
        /// Output directory for results.csv / results.json.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Inspect the code registry.
    Codes {
        #[command(subcommand)]
        command: CodesCommand,
    },
    /// Export the 16-row syndrome-to-channel table of the 4x15 design.
    Table1 {
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suites; exits nonzero on any failure.
    Verify,
    /// Gain-vs-angle samples for one combiner row, as CSV.
    Beampattern {
        /// Registry key of the code supplying the row.
        code: String,
        /// Row index of the parity-check matrix.
        row: usize,
        /// Number of angle samples over [0, 180) degrees.
        #[arg(long, default_value_t = 721)]
        points: usize,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CodesCommand {
    /// One line per registered code.
    List,
    /// Dump a code's matrices as 0/1 grids.
    Show { key: String },
}

fn main() -> Result<()> {
    env_logger::init();
    match Cli::parse().command {
        Command::Run { config, out_dir } => cmd_run(&config, &out_dir),
        Command::Codes { command } => match command {
            CodesCommand::List => cmd_codes_list(),
            CodesCommand::Show { key } => cmd_codes_show(&key),
        },
        Command::Table1 { out } => cmd_table1(out.as_deref()),
        Command::Verify => cmd_verify(),
        Command::Beampattern {
            code,
            row,
            points,
            out,
        } => cmd_beampattern(&code, row, points, out.as_deref()),
    }
}

fn cmd_run(config: &std::path::Path, out_dir: &std::path::Path) -> Result<()> {
    let text = fs::read_to_string(config)
        .with_context(|| format!("reading config {}", config.display()))?;
    let cfg = ScenarioConfig::parse(&text)?;
    let records = run_scenario::<f64>(&cfg)?;
    fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join("results.csv");
    let json_path = out_dir.join("results.json");
    let mut csv = fs::File::create(&csv_path)?;
    emit_csv(&cfg, &records, &mut csv)?;
    let mut json = fs::File::create(&json_path)?;
    emit_json(&cfg, &records, &mut json)?;
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    for r in &records {
        println!(
            "snr {:>7.2} dB  e_t {:>7.2} dB  m {:>4}  perfect-1 err {:.6}",
            r.snr_db, r.e_t_db, r.measurement_count, r.p_err_perfect.first().unwrap_or(&0.0)
        );
    }
    Ok(())
}

fn cmd_codes_list() -> Result<()> {
    println!("{:<22} {:>3} {:>3} {:>4} {:>4} {:>5}", "key", "n", "k", "d", "e_n", "m");
    for key in registry::keys() {
        let code = registry::get(key)?;
        println!(
            "{:<22} {:>3} {:>3} {:>4} {:>4} {:>5}",
            key,
            code.n(),
            code.k(),
            code.min_distance().map_or("-".into(), |d| d.to_string()),
            code.capability(),
            code.parity_bits()
        );
    }
    Ok(())
}

fn cmd_codes_show(key: &str) -> Result<()> {
    let code = registry::get(key)?;
    println!(
        "{key}: ({}, {}) code, e_n = {}, {} measurements",
        code.n(),
        code.k(),
        code.capability(),
        code.parity_bits()
    );
    println!("H =");
    println!("{}", code.parity_check().to_ascii());
    if let Some(g) = code.generator() {
        println!("G =");
        println!("{}", g.to_ascii());
    }
    Ok(())
}

fn cmd_table1(out: Option<&std::path::Path>) -> Result<()> {
    let h = registry::get("hamming-15-11")?.parity_check().clone();
    let table = lut_build(&h, &[C64::new(1.0, 0.0)], 1, LUT_ENTRY_CAP)?;
    let mut text = String::from("syndrome,channel\n");
    for i in 0..table.len() {
        let (syndrome, channel) = table.entry(i);
        let bits: Vec<String> = syndrome
            .iter()
            .map(|z| format!("{}", z.re.round() as i64))
            .collect();
        let mut chan = vec![0u8; 15];
        for &(bin, _) in channel {
            chan[bin] = 1;
        }
        let chan: Vec<String> = chan.iter().map(|b| b.to_string()).collect();
        text.push_str(&format!("{},{}\n", bits.join(" "), chan.join(" ")));
    }
    write_or_print(out, &text)
}

fn cmd_beampattern(key: &str, row: usize, points: usize, out: Option<&std::path::Path>) -> Result<()> {
    let code = registry::get(key)?;
    let h = code.parity_check();
    if row >= h.rows() {
        bail!("row {row} out of range; {key} has {} rows", h.rows());
    }
    let n = h.cols();
    let geom = ArrayGeometry::<f64>::half_wavelength(n);
    let basis = dft_matrix(&geom);
    let w = combiner_from_row(h, row, &basis)?;
    let mut text = String::from("phi_deg,omega,gain,gain_db\n");
    for i in 0..points {
        let phi = 180.0 * i as f64 / points as f64;
        let omega = phi.to_radians().cos();
        let e = spatial_signature(omega, &geom);
        let dot: C64 = w
            .weights()
            .iter()
            .zip(&e)
            .map(|(a, b)| a.conj() * b)
            .sum();
        let gain = dot.norm_sqr();
        let gain_db = 10.0 * gain.max(1e-300).log10();
        text.push_str(&format!("{phi},{omega},{gain},{gain_db}\n"));
    }
    write_or_print(out, &text)
}

fn write_or_print(out: Option<&std::path::Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            let mut f = fs::File::create(path)?;
            f.write_all(text.as_bytes())?;
            println!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_verify() -> Result<()> {
    let mut failures = 0usize;
    let mut check = |name: &str, ok: bool| {
        println!("{} {}", if ok { "ok  " } else { "FAIL" }, name);
        if !ok {
            failures += 1;
        }
    };

    // registered codes: rank, generator orthogonality, advertised capability
    for key in registry::keys() {
        let code = registry::get(key)?;
        let h = code.parity_check();
        check(
            &format!("{key}: parity check has full row rank"),
            rank_gf2(h) == code.parity_bits(),
        );
        if let Some(g) = code.generator() {
            let prod = matmul_gf2(g, &h.transpose())?;
            check(
                &format!("{key}: G H^T = 0"),
                (0..prod.rows()).all(|i| prod.is_zero_row(i)),
            );
        }
        check(
            &format!("{key}: corrects {} errors (brute force)", code.capability()),
            verify_correction(h, code.capability())?,
        );
    }

    // GF(2)-independent columns stay independent over the reals
    for key in registry::keys() {
        let code = registry::get(key)?;
        let h = code.parity_check();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut ok = true;
        for _ in 0..50 {
            use rand::seq::SliceRandom;
            let mut cols: Vec<usize> = (0..h.cols()).collect();
            cols.shuffle(&mut rng);
            let take = 1 + (code.parity_bits().min(4) - 1).min(cols.len() - 1);
            let sub = h.select_columns(&cols[..take]);
            let gf2_rank = rank_gf2(&sub);
            let real_rank = lift_to_real::<f64>(&sub).rank(1e-9);
            if real_rank < gf2_rank {
                ok = false;
            }
        }
        check(&format!("{key}: lifted columns keep GF(2) rank"), ok);
    }

    // encoded-measurement identity and distance growth
    for (meas, corr) in registry::ec_pairs() {
        let code = registry::get(meas)?;
        let cc = registry::get(corr)?;
        let g = cc.generator().expect("correction codes carry generators");
        let (g_std, _) = standard_form(g)?;
        let h = code.parity_check();
        let hv = beamcode::codes::encoded_parity(h, &g_std)?;
        let p_block = g_std.select_columns(&(g_std.rows()..g_std.cols()).collect::<Vec<_>>());
        let p_m = matmul_gf2(&p_block.transpose(), h)?;
        let lh: Mat64 = lift_to_real(h);
        let lhv: Mat64 = lift_to_real(&hv);
        let lpm: Mat64 = lift_to_real(&p_m);
        let lhs = lhv.transpose().matmul(&lhv);
        let rhs_a = lh.transpose().matmul(&lh);
        let rhs_b = lpm.transpose().matmul(&lpm);
        let mut exact = true;
        for i in 0..lhs.rows() {
            for j in 0..lhs.cols() {
                if (lhs.get(i, j) - rhs_a.get(i, j) - rhs_b.get(i, j)).abs() > 0.0 {
                    exact = false;
                }
            }
        }
        check(
            &format!("{meas} + {corr}: Gram identity of encoded rows"),
            exact,
        );
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut grows = true;
        for _ in 0..1000 {
            use rand::Rng;
            let v: Vec<C64> = (0..h.cols())
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let n_plain: f64 = lh.apply_complex(&v).iter().map(|z| z.norm_sqr()).sum();
            let n_enc: f64 = lhv.apply_complex(&v).iter().map(|z| z.norm_sqr()).sum();
            if n_enc + 1e-12 < n_plain {
                grows = false;
            }
        }
        check(
            &format!("{meas} + {corr}: encoded syndromes never lose norm"),
            grows,
        );
    }

    // noiseless perfection over every scenario shape
    let shapes: [(usize, usize, &str, Option<(&str, &str)>); 6] = [
        (15, 1, "hamming-15-11", None),
        (8, 2, "searched-8-2", None),
        (32, 3, "rm-32-16", None),
        (15, 1, "hamming-15-11", Some(("hamming-7-4", "hamming-7-4"))),
        (8, 2, "searched-8-2", Some(("short-hamming-10-6", "short-hamming-10-6"))),
        (32, 3, "rm-32-16", Some(("short-hamming-21-16", "short-hamming-21-16"))),
    ];
    let model = PathGainModel::new(136.0, 14.0);
    for (n, l, key, ec) in shapes {
        let p = plan(n, n, l, key, key, ec)?;
        let engine = DiscoveryEngine::<f64>::new(p)?;
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut ok = true;
        for _ in 0..25 {
            let truth = sample_channel::<f64, _>(&mut rng, n, n, l, &model)?;
            let q = to_physical(&truth, engine.rx_basis(), engine.tx_basis())?;
            let res = engine.discover(&q, &MeasurementSetup::noiseless(1.0), &mut rng)?;
            let mut got = res.q_hat.support();
            let mut want = truth.support();
            got.sort_unstable();
            want.sort_unstable();
            if got != want {
                ok = false;
            }
        }
        check(
            &format!("{n}x{n} L={l} {key}{}: noiseless discovery is exact",
                if ec.is_some() { " + correction" } else { "" }),
            ok,
        );
    }

    if failures > 0 {
        bail!("{failures} verification check(s) failed");
    }
    println!("all checks passed");
    Ok(())
}
