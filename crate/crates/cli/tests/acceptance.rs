//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any criterion fails.
//!
//! Sector builds, certification and statistics go through the same command
//! functions as the `llspec` binary, writing into a scratch directory.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fs;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Parser;
use ll_spectrum::io::{read_document, read_table_file, SaturationDocument, StatsReport, SymmetryDocument};
use ll_spectrum::stats::{delta3_closed_form, synthetic_poisson_levels, UnfoldedSequence};
use ll_spectrum::{bethe_residual, build_sector, limit_rapidities, solve_state, CouplingLimit, ModelParams64, QuantumNumbers, SolverOptions64};
use ll_spectrum_cli::{run, Cli, Outcome};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

/// Runs `llspec` in-process; `threads` overrides the worker count.
fn llspec(args: &str, threads: Option<usize>) -> Result<Outcome, String> {
    let mut argv: Vec<String> = vec!["llspec".into()];
    if let Some(t) = threads {
        argv.push(format!("--threads={t}"));
    }
    argv.extend(args.split_whitespace().map(String::from));
    let cli = Cli::try_parse_from(&argv).map_err(|e| e.to_string())?;
    let mut sink = std::io::sink();
    run(&cli, &mut sink).map_err(|e| format!("`{args}`: {e}"))
}

fn stats_report(dir: &Path, stem: &str) -> Result<StatsReport, String> {
    let text = fs::read_to_string(dir.join(format!("{stem}.toml"))).map_err(|e| e.to_string())?;
    StatsReport::from_toml(&text).map_err(|e| e.to_string())
}

struct Suite {
    scratch: tempfile::TempDir,
    results: Vec<(u32, &'static str, Verdict)>,
}

impl Suite {
    fn dir(&self, name: &str) -> PathBuf {
        let d = self.scratch.path().join(name);
        fs::create_dir_all(&d).unwrap();
        d
    }

    fn check(&mut self, id: u32, title: &'static str, f: impl FnOnce(&Suite) -> Result<Verdict, String>) {
        let t0 = Instant::now();
        let v = f(self).unwrap_or_else(|e| verdict(false, format!("error: {e}")));
        println!(
            "criterion {id:>2} {} {title}: {} [{:.1?}]",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            t0.elapsed()
        );
        self.results.push((id, title, v));
    }
}

fn params(ratio: f64) -> ModelParams64 {
    ModelParams64::from_density_ratio(5, TAU, ratio).unwrap()
}

fn solver_exactness(_: &Suite) -> Result<Verdict, String> {
    let opts = SolverOptions64::default();
    let mut worst = 0.0f64;
    let mut count = 0;
    for ratio in [1.0, 0.1, 0.01] {
        let p = params(ratio);
        let sector = build_sector(&p, 2, 50, &opts).map_err(|e| e.to_string())?;
        for lvl in sector.levels() {
            // recomputed here rather than trusting the stored norm
            let r = bethe_residual(&lvl.rapidities, &lvl.quantum_numbers, &p).map_err(|e| e.to_string())?;
            worst = r.iter().fold(worst, |a, x| a.max(x.abs()));
        }
        count += sector.len();
    }
    Ok(verdict(worst <= 1e-12, format!("max residual {worst:.2e} over {count} levels (bound 1e-12)")))
}

fn limit_laws(_: &Suite) -> Result<Verdict, String> {
    let m = QuantumNumbers::with_minimal_cutoff(&[-2, -1, 0, 1, 2]).unwrap();
    let opts = SolverOptions64::default();
    let strong: Vec<f64> = [1e4, 2e4, 4e4]
        .iter()
        .map(|&c| {
            let p = ModelParams64::new(5, TAU, c).unwrap();
            let s = solve_state(&m, &p, &opts).unwrap();
            let tg = limit_rapidities(&m, &p, CouplingLimit::Infinite);
            s.rapidities.iter().zip(&tg).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        })
        .collect();
    let ratios = [strong[0] / strong[1], strong[1] / strong[2]];
    let strong_ok = ratios.iter().all(|r| (1.8..=2.2).contains(r));

    let p = ModelParams64::new(5, TAU, 1e-4).unwrap();
    let s = solve_state(&m, &p, &opts).map_err(|e| e.to_string())?;
    let free = ll_spectrum::limit_state(&m, &p, CouplingLimit::Zero);
    let e_dev = (s.energy - free.energy).abs();
    let lambda_dev = s.rapidities.iter().zip(&free.rapidities).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(verdict(
        strong_ok && e_dev <= 1e-3,
        format!(
            "strong-coupling deviation ratios {:.4}, {:.4} (want [1.8, 2.2]); \
             c = 1e-4 energy deviation {e_dev:.3e} (bound 1e-3), rapidity deviation {lambda_dev:.3e}",
            ratios[0], ratios[1]
        ),
    ))
}

fn shift_theorem_run(dir: &Path, threads: Option<usize>) -> Result<SymmetryDocument, String> {
    let out = dir.join("symmetry.toml");
    llspec(
        &format!("symmetry -N 5 --ratio 1 --momenta 0,1,2 -k 1,2 --max-levels 25 -o {}", out.display()),
        threads,
    )?;
    read_document(&out).map_err(|e| e.to_string())
}

fn shift_theorem(s: &Suite) -> Result<Verdict, String> {
    let doc = shift_theorem_run(&s.dir("c3"), None)?;
    let worst = doc.pairs.iter().map(|p| p.max_deviation).fold(0.0, f64::max);
    let list: Vec<String> = doc.pairs.iter().map(|p| format!("{}->{} (nu {})", p.from, p.to, p.nu)).collect();
    Ok(verdict(
        doc.status == "PASSED" && doc.pairs.len() == 6,
        format!("{} pairs [{}], 25 levels each, max deviation {worst:.2e} (bound 1e-9)", doc.pairs.len(), list.join(", ")),
    ))
}

fn reflection(s: &Suite) -> Result<Verdict, String> {
    let mut lines = Vec::new();
    let mut ok = true;
    for ratio in [1.0, 0.037] {
        let out = s.dir("c4").join(format!("symmetry_{ratio}.toml"));
        llspec(
            &format!("symmetry -N 5 --ratio {ratio} --pair 1:4 --pair 2:3 --max-levels 100 -o {}", out.display()),
            None,
        )?;
        let doc: SymmetryDocument = read_document(&out).map_err(|e| e.to_string())?;
        ok &= doc.status == "PASSED";
        for p in &doc.pairs {
            lines.push(format!("n/c={ratio} {}->{} nu={} dev {:.1e}", p.from, p.to, p.nu, p.max_deviation));
        }
    }
    Ok(verdict(ok, format!("100 levels per pair: {}", lines.join("; "))))
}

/// Certified N=5, P=2 sector at `M = cutoff` against `2M`; returns its path.
fn certified_sector(dir: &Path, ratio: f64, cutoff: i64, threads: Option<usize>) -> Result<(PathBuf, SaturationDocument), String> {
    let outcome = llspec(&format!("saturate -N 5 -P 2 -M {cutoff} --ratio {ratio} -o {}", dir.display()), threads)?;
    let doc: SaturationDocument = read_document(dir.join(format!("saturation_P2_M{cutoff}.toml"))).map_err(|e| e.to_string())?;
    if outcome != Outcome::Success {
        return Err(format!("n/c = {ratio}, M = {cutoff} not certified: {} new levels", doc.new_levels_found));
    }
    Ok((dir.join(format!("sector_P2_M{cutoff}.txt")), doc))
}

fn saturation(s: &Suite) -> Result<Verdict, String> {
    let dir = s.dir("ratio_0.01");
    let outcome = llspec(&format!("saturate -N 5 -P 2 -M 50 --ratio 0.01 -o {}", dir.display()), None)?;
    let doc: SaturationDocument = read_document(dir.join("saturation_P2_M50.toml")).map_err(|e| e.to_string())?;
    Ok(verdict(
        outcome == Outcome::Success && doc.new_levels_found == 0 && doc.energy_mismatches == 0,
        format!(
            "M=50 vs M=100: {} new levels, {} mismatches below E_max = {:.3} ({} levels; top of M=50 sector {:.1})",
            doc.new_levels_found, doc.energy_mismatches, doc.e_max, doc.n_levels_small, doc.e_top
        ),
    ))
}

fn poisson_calibration(s: &Suite) -> Result<Verdict, String> {
    let dir = s.dir("c6");
    llspec(
        &format!(
            "stats --synthetic 100000 --seed 7 --degree 1 --bins 20 --s-max 5 --w-grid 1:20:1 --fit-range 1:20 -o {}",
            dir.display()
        ),
        None,
    )?;
    let r = stats_report(&dir, "stats")?;
    let (ratio, lsd, d3) = (r.ratio.unwrap(), r.lsd.unwrap(), r.delta3.unwrap());
    let chi_ok = (ratio.mean - 0.386).abs() <= 0.01;
    let p_value = 1.0 - ChiSquared::new(lsd.degrees_of_freedom as f64).unwrap().cdf(lsd.chi_square);
    let slope = d3.slope_fit.unwrap().value;
    let slope_ok = (slope * 15.0 - 1.0).abs() <= 0.1;
    Ok(verdict(
        chi_ok && p_value > 0.01 && slope_ok,
        format!(
            "<chi> = {:.4} (0.386 ± 0.01); LSD chi2 = {:.2}, {} dof, p = {:.3} (> 0.01); Delta3 slope = {:.5} (1/15 ± 10%)",
            ratio.mean, lsd.chi_square, lsd.degrees_of_freedom, p_value, slope
        ),
    ))
}

/// Δ3 by direct integration: the staircase is constant between levels, so
/// three-point Gauss-Legendre is exact on every piece; the best line comes
/// from the 2x2 normal equations. Coordinates are centred on the window.
fn delta3_oracle(levels: &[f64], start: f64, w: f64) -> f64 {
    let centre = start + w / 2.0;
    let mut cuts = vec![start];
    cuts.extend(levels.iter().copied().filter(|&x| x > start && x < start + w));
    cuts.push(start + w);
    let nodes = [(-(0.6f64).sqrt(), 5.0 / 9.0), (0.0, 8.0 / 9.0), ((0.6f64).sqrt(), 5.0 / 9.0)];
    // (x, η, weight) quadrature points over the window
    let mut pts = Vec::new();
    for (k, seg) in cuts.windows(2).enumerate() {
        let (a, b) = (seg[0], seg[1]);
        for &(z, wt) in &nodes {
            pts.push(((a + b) / 2.0 + z * (b - a) / 2.0 - centre, k as f64, wt * (b - a) / 2.0));
        }
    }
    let (mut s0, mut s1, mut s2, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(x, y, wt) in &pts {
        s0 += wt;
        s1 += wt * x;
        s2 += wt * x * x;
        sy += wt * y;
        sxy += wt * x * y;
    }
    let det = s0 * s2 - s1 * s1;
    let a = (s0 * sxy - s1 * sy) / det;
    let b = (s2 * sy - s1 * sxy) / det;
    pts.iter().map(|&(x, y, wt)| wt * (y - a * x - b).powi(2)).sum::<f64>() / w
}

fn delta3_equivalence(_: &Suite) -> Result<Verdict, String> {
    let levels: Vec<f64> = synthetic_poisson_levels(2000, 11);
    let u = UnfoldedSequence::from_unfolded(levels.clone()).map_err(|e| e.to_string())?;
    let last = *levels.last().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let w = rng.random_range(0.5..60.0);
        let start = rng.random_range(levels[0]..last - w);
        let closed = delta3_closed_form(&u, start, w).map_err(|e| e.to_string())?;
        worst = worst.max((closed - delta3_oracle(&levels, start, w)).abs());
    }
    Ok(verdict(worst <= 1e-9, format!("100 random windows, max |closed form - quadrature| = {worst:.2e} (bound 1e-9)")))
}

/// The stats runs behind the short-range physics checks. Returns the output
/// directory for each run name.
fn physics_runs(root: &Path, sectors: &BTreeMap<&str, PathBuf>, threads: Option<usize>) -> Result<Vec<(String, PathBuf)>, String> {
    let runs = [
        ("ratio_0.1", "0.1", "--window-start 0 --window-count 10000 --statistic ratio"),
        (
            "delta3_0.1",
            "0.1",
            "--window-start 100 --window-count 10000 --statistic delta3 --w-grid 0.25:5:0.25 --fit-range 0:5",
        ),
        ("lsd_1", "1", "--window-start 100 --window-count 10000 --statistic lsd --bins 40 --s-max 4"),
        ("lsd_0.01", "0.01", "--window-start 100 --window-count 10000 --statistic lsd --bins 40 --s-max 4"),
    ];
    let mut dirs = Vec::new();
    for (name, ratio, extra) in runs {
        let out = root.join(name);
        llspec(&format!("stats -i {} {extra} -o {}", sectors[ratio].display(), out.display()), threads)?;
        dirs.push((name.to_string(), out));
    }
    Ok(dirs)
}

fn short_range_physics(s: &Suite) -> Result<Verdict, String> {
    let mut sectors = BTreeMap::new();
    for (key, ratio) in [("0.1", 0.1), ("1", 1.0)] {
        sectors.insert(key, certified_sector(&s.dir(&format!("ratio_{key}")), ratio, 50, None)?.0);
    }
    sectors.insert("0.01", s.dir("ratio_0.01").join("sector_P2_M50.txt"));
    let dirs: BTreeMap<String, PathBuf> = physics_runs(&s.dir("c8"), &sectors, None)?.into_iter().collect();

    // blocks of 500 ratios lying in the central half of the 10^4-level window
    let windows = read_table_file("ratio_windows", dirs["ratio_0.1"].join("stats_ratio_windows.dat")).map_err(|e| e.to_string())?;
    let mid: Vec<f64> = windows
        .rows
        .iter()
        .filter(|r| r[0] - 250.0 >= 2500.0 && r[0] + 250.0 <= 7500.0)
        .map(|r| r[1])
        .collect();
    let (lo, hi) = mid.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let chi_ok = !mid.is_empty() && mid.iter().all(|&x| (x - 0.386).abs() <= 0.03);

    let slope = stats_report(&dirs["delta3_0.1"], "stats")?.delta3.unwrap().slope_fit.unwrap().value;
    let slope_ok = (0.05..=0.09).contains(&slope);

    let mut peaks = Vec::new();
    let mut peak_ok = true;
    for key in ["lsd_1", "lsd_0.01"] {
        let lsd = stats_report(&dirs[key], "stats")?.lsd.unwrap();
        let factor = lsd.first_bin_density / lsd.poisson_first_bin_density;
        peak_ok &= lsd.bin_width == 0.1 && factor >= 2.0;
        peaks.push(format!("{key}: first bin {:.3} = {factor:.2}x Poisson", lsd.first_bin_density));
    }
    Ok(verdict(
        chi_ok && slope_ok && peak_ok,
        format!(
            "n/c=0.1 mid-spectrum block <chi> in [{lo:.4}, {hi:.4}] over {} blocks (want 0.386 ± 0.03) {}; \
             Delta3 slope on (0, 5] = {slope:.5} (want [0.05, 0.09]) {}; {} (want >= 2x) {}",
            mid.len(),
            ok(chi_ok),
            ok(slope_ok),
            peaks.join(", "),
            ok(peak_ok)
        ),
    ))
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "MISSED"
    }
}

fn large_w_rigidity(s: &Suite) -> Result<Verdict, String> {
    // 10^4 window starts around level 10^6, inside the M = 80 certified range
    let (sector, doc) = certified_sector(&s.dir("ratio_0.02"), 0.02, 80, None)?;
    let out = s.dir("c9");
    llspec(
        &format!(
            "stats -i {} --window-start 1000000 --window-count 11500 --statistic delta3 --n-starts 10000 \
             --w-grid 0.5,1,2,5,10,20,50,100,200,300,400,500,600,700,800,900,1000 --fit-range 0.5:5 \
             --exponent-range 200:1000 -o {}",
            sector.display(),
            out.display()
        ),
        None,
    )?;
    let alpha = stats_report(&out, "stats")?.delta3.unwrap().exponent_fit.unwrap().value;
    let table = read_table_file("delta3", out.join("stats_delta3.dat")).map_err(|e| e.to_string())?;
    let worst = table
        .rows
        .iter()
        .filter(|r| r[0] <= 100.0)
        .map(|r| (r[1] / r[2] - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(verdict(
        alpha > 1.0 && worst <= 0.15,
        format!(
            "{} certified levels; alpha on [200, 1000] = {alpha:.3} (want > 1); max |Delta3 / (W/15) - 1| for W <= 100 = {:.3} (bound 0.15)",
            doc.n_levels_small, worst
        ),
    ))
}

/// Length and hash of every file below `dir`, keyed by relative path.
fn fingerprint(dir: &Path, prefix: &Path, out: &mut BTreeMap<PathBuf, (usize, u64)>) {
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let rel = prefix.join(path.file_name().unwrap());
        if path.is_dir() {
            fingerprint(&path, &rel, out);
        } else {
            let bytes = fs::read(&path).unwrap();
            let mut h = DefaultHasher::new();
            bytes.hash(&mut h);
            out.insert(rel, (bytes.len(), h.finish()));
        }
    }
}

fn determinism(s: &Suite) -> Result<Verdict, String> {
    // the criterion 3, 5 and 8 outputs are regenerated in place with a fixed
    // worker count and must come out byte-identical
    let dirs = ["c3", "ratio_0.1", "ratio_1", "ratio_0.01", "c8"];
    let snapshot = || {
        let mut m = BTreeMap::new();
        for d in dirs {
            fingerprint(&s.dir(d), Path::new(d), &mut m);
        }
        m
    };
    let reference = snapshot();
    let mut differing: Vec<String> = Vec::new();
    for threads in [1, 4] {
        shift_theorem_run(&s.dir("c3"), Some(threads))?;
        let mut sectors = BTreeMap::new();
        for (key, ratio) in [("0.1", 0.1), ("1", 1.0), ("0.01", 0.01)] {
            sectors.insert(key, certified_sector(&s.dir(&format!("ratio_{key}")), ratio, 50, Some(threads))?.0);
        }
        physics_runs(&s.dir("c8"), &sectors, Some(threads))?;
        let now = snapshot();
        if now.keys().ne(reference.keys()) {
            differing.push(format!("file set ({threads} threads)"));
        }
        differing.extend(
            reference
                .iter()
                .filter(|(k, v)| now.get(*k) != Some(*v))
                .map(|(k, _)| format!("{} ({threads} threads)", k.display())),
        );
    }
    Ok(verdict(
        differing.is_empty(),
        format!(
            "{} files from the default pool regenerated with 1 and 4 threads; differing: {}",
            reference.len(),
            if differing.is_empty() { "none".into() } else { differing.join(", ") }
        ),
    ))
}

fn main() {
    // `cargo test` passes harness flags; a name filter selects nothing here
    if std::env::args().skip(1).any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let mut suite = Suite {
        scratch: tempfile::tempdir().expect("scratch directory"),
        results: Vec::new(),
    };
    suite.check(1, "solver exactness", solver_exactness);
    suite.check(2, "coupling limits", limit_laws);
    suite.check(3, "momentum shift", shift_theorem);
    suite.check(4, "reflection and redundancy", reflection);
    suite.check(5, "cutoff saturation", saturation);
    suite.check(6, "Poisson calibration", poisson_calibration);
    suite.check(7, "Delta3 closed form vs quadrature", delta3_equivalence);
    suite.check(8, "short-range physics", short_range_physics);
    suite.check(9, "large-W rigidity (extended)", large_w_rigidity);
    suite.check(10, "thread-count determinism", determinism);

    let failed: Vec<u32> = suite.results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!(
        "acceptance: {} passed, {} failed{}",
        suite.results.len() - failed.len(),
        failed.len(),
        if failed.is_empty() { String::new() } else { format!(" (criteria {failed:?})") }
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
