use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use ll_spectrum::io::{
    read_sector_file, write_document, write_sector_file, write_stats_report, Delta3Section, LsdSection, PairResult,
    RatioSection, SaturationDocument, SelectionSection, SourceSection, StatsReport, SymmetryDocument, Table, UnfoldingSection,
};
use ll_spectrum::stats::{
    delta3_curve, fit_exponent, fit_slope, lsd_histogram, ratio_statistic, synthetic_poisson_levels, unfold,
};
use ll_spectrum::{
    build_certified_sector, build_sector_below, canonical_momentum, deduplicate_energies, independent_momenta,
    verify_sector_equivalence, GuessPolicy, ModelParams64, SolverOptions64, SpectrumSector64,
};

use crate::args::{SaturateArgs, SolverArgs, SpectrumArgs, Statistic, StatsArgs, SymmetryArgs};
use crate::{model_params, Failure, Outcome};

fn solver_options(s: &SolverArgs) -> SolverOptions64 {
    SolverOptions64 {
        tolerance: s.tolerance,
        max_iterations: s.max_iterations,
        damping: 1.0,
        guess_policy: GuessPolicy::Auto,
    }
}

fn check_momentum(n: usize, p: i64, allow: bool) -> Result<(), Failure> {
    let independent = independent_momenta(n)?;
    if !allow && !independent.contains(&p) {
        return Err(Failure::Usage(format!(
            "P = {p} duplicates a sector in {independent:?}; pass --allow-redundant-momentum to build it anyway"
        )));
    }
    Ok(())
}

fn print_model(out: &mut (dyn Write + Send), p: &ModelParams64) -> std::io::Result<()> {
    writeln!(
        out,
        "N = {}, L = {}, c = N / (L n/c) = {} (n/c = {})",
        p.n_particles(),
        p.ring_length(),
        p.coupling(),
        p.density_ratio()
    )
}

fn sector_path(dir: &Path, p: i64, m: i64) -> PathBuf {
    dir.join(format!("sector_P{p}_M{m}.txt"))
}

pub(crate) fn spectrum(a: &SpectrumArgs, out: &mut (dyn Write + Send)) -> Result<Outcome, Failure> {
    let params = model_params(&a.model)?;
    check_momentum(params.n_particles(), a.momentum, a.allow_redundant_momentum)?;
    print_model(out, &params)?;
    let t0 = Instant::now();
    let opts = solver_options(&a.solver);
    let sector = match a.energy_ceiling {
        Some(e) => build_sector_below(&params, a.momentum, a.cutoff, &opts, e)?,
        None => ll_spectrum::build_sector(&params, a.momentum, a.cutoff, &opts)?,
    };
    write_sector_file(&sector, &a.output)?;
    writeln!(out, "P = {}, M = {}: {} levels", a.momentum, a.cutoff, sector.len())?;
    if let Some(e) = sector.max_energy() {
        writeln!(out, "E_max = {e}")?;
    }
    writeln!(out, "wrote {} in {:.2?}", a.output.display(), t0.elapsed())?;
    Ok(Outcome::Success)
}

pub(crate) fn saturate(a: &SaturateArgs, out: &mut (dyn Write + Send)) -> Result<Outcome, Failure> {
    let params = model_params(&a.model)?;
    check_momentum(params.n_particles(), a.momentum, a.allow_redundant_momentum)?;
    let large = a.large_cutoff.unwrap_or(2 * a.cutoff);
    if large <= a.cutoff {
        return Err(Failure::Usage("--large-cutoff must exceed -M".into()));
    }
    print_model(out, &params)?;
    let t0 = Instant::now();
    let (small, big, report) = build_certified_sector(&params, a.momentum, a.cutoff, large, &solver_options(&a.solver), a.match_tol)?;
    fs::create_dir_all(&a.output_dir)?;
    write_sector_file(&small, sector_path(&a.output_dir, a.momentum, a.cutoff))?;
    write_sector_file(&big, sector_path(&a.output_dir, a.momentum, large))?;
    let doc = SaturationDocument::new(&params, a.momentum, a.match_tol, &report);
    let doc_path = a.output_dir.join(format!("saturation_P{}_M{}.toml", a.momentum, a.cutoff));
    write_document(&doc, &doc_path)?;

    writeln!(out, "M = {}: {} levels, top energy {}", a.cutoff, small.len(), report.e_top)?;
    writeln!(
        out,
        "below E_max = {}: {} levels at M = {}, {} at M = {large}",
        report.e_max, report.n_levels_small, a.cutoff, report.n_levels_large_below_emax
    )?;
    writeln!(out, "max energy deviation {:e}, mismatches {}", report.max_energy_deviation, report.energy_mismatches)?;
    writeln!(out, "wrote {} in {:.2?}", doc_path.display(), t0.elapsed())?;
    if report.certified {
        writeln!(out, "CERTIFIED: {} levels with E <= {}", small.certified_levels().len(), report.e_max)?;
        Ok(Outcome::Success)
    } else {
        writeln!(out, "NOT CERTIFIED: {} new levels below E_max", report.new_levels_found)?;
        for (m, e) in &report.new_levels {
            writeln!(out, "  new level {m}  E = {e}")?;
        }
        Ok(Outcome::VerificationFailed)
    }
}

pub(crate) fn symmetry(a: &SymmetryArgs, out: &mut (dyn Write + Send)) -> Result<Outcome, Failure> {
    let mut sectors: BTreeMap<i64, SpectrumSector64> = BTreeMap::new();
    let mut pairs: Vec<(i64, i64)> = Vec::new();
    let params = if a.input.is_empty() {
        let params = model_params(&a.model)?;
        let n = params.n_particles() as i64;
        for &p in &a.momenta {
            for &k in &a.shifts {
                pairs.push((p, p + k * n));
            }
        }
        pairs.extend(a.pairs.iter().copied());
        if pairs.is_empty() {
            return Err(Failure::Usage("nothing to compare: give --momenta, --pair or --input".into()));
        }
        let large = a.large_cutoff.unwrap_or(2 * a.cutoff);
        let opts = solver_options(&a.solver);
        for p in pairs.iter().flat_map(|&(x, y)| [x, y]) {
            if let Entry::Vacant(slot) = sectors.entry(p) {
                let (s, _, report) = build_certified_sector(&params, p, a.cutoff, large, &opts, 1e-10)?;
                if !report.certified {
                    return Err(Failure::Usage(format!(
                        "sector P = {p} is not saturated at M = {}; raise -M",
                        a.cutoff
                    )));
                }
                slot.insert(s);
            }
        }
        params
    } else {
        let first = read_sector_file(&a.input[0])?;
        let second = read_sector_file(&a.input[1])?;
        let (Some(p1), Some(p2)) = (first.momentum(), second.momentum()) else {
            return Err(Failure::Usage("symmetry inputs must be fixed-momentum sectors".into()));
        };
        let params = *first.params();
        pairs.push((p1, p2));
        sectors.insert(p1, first);
        sectors.insert(p2, second);
        params
    };
    print_model(out, &params)?;

    let n = params.n_particles();
    let mut results = Vec::new();
    for &(from, to) in &pairs {
        let (rep_a, off_a) = canonical_momentum(from, n)?;
        let (rep_b, off_b) = canonical_momentum(to, n)?;
        if rep_a != rep_b {
            return Err(Failure::Usage(format!("P = {from} and P = {to} are not related by shift or reflection")));
        }
        let nu = off_b - off_a;
        let r = verify_sector_equivalence(&sectors[&from], &sectors[&to], nu, a.max_levels, a.match_tol)?;
        writeln!(
            out,
            "P = {from} -> P = {to}: nu = {nu}, {} levels, max deviation {:e} {}",
            r.n_compared,
            r.max_deviation,
            if r.passed() { "PASS" } else { "FAIL" }
        )?;
        results.push(PairResult::new(from, to, &r));
    }
    let doc = SymmetryDocument::new(&params, results);
    if let Some(path) = &a.output {
        write_document(&doc, path)?;
    }
    Ok(if doc.status == "PASSED" {
        Outcome::Success
    } else {
        Outcome::VerificationFailed
    })
}

struct Selection {
    energies: Vec<f64>,
    certified: bool,
    source: SourceSection,
    section: Option<SelectionSection>,
}

fn select_levels(a: &StatsArgs, out: &mut (dyn Write + Send)) -> Result<Selection, Failure> {
    if let Some(n) = a.synthetic {
        let levels: Vec<f64> = synthetic_poisson_levels(n, a.seed);
        let end = a.window_count.map_or(levels.len(), |c| a.window_start + c);
        if end > levels.len() || a.window_start >= end {
            return Err(Failure::Usage(format!("window [{}, {end}) outside {} synthetic levels", a.window_start, levels.len())));
        }
        return Ok(Selection {
            energies: levels[a.window_start..end].to_vec(),
            certified: true,
            source: SourceSection {
                kind: "synthetic".into(),
                seed: Some(a.seed),
                synthetic_levels: Some(n),
                ..Default::default()
            },
            section: None,
        });
    }
    let path = a.input.as_ref().expect("clap requires --input without --synthetic");
    let sector = read_sector_file(path)?;
    let p = sector.params();
    let all = sector.energies();
    let n_certified = sector.certified_levels().len();
    let (energies, removed, kept_certified) = match a.dedup_tol {
        Some(tol) => {
            let (kept, removed) = deduplicate_energies(&all, tol)?;
            let e_max = sector.e_max_certified();
            let kc = e_max.map_or(0, |e| kept.iter().take_while(|&&x| x <= e).count());
            (kept, removed, kc)
        }
        None => (all, 0, n_certified),
    };
    let end = a.window_count.map_or(kept_certified, |c| a.window_start + c);
    if a.window_start >= end {
        return Err(Failure::Usage(format!("empty window: start {} with end {end}", a.window_start)));
    }
    let certified = end <= kept_certified;
    if !certified {
        if !a.allow_uncertified {
            return Err(Failure::Usage(match sector.e_max_certified() {
                Some(e) => format!(
                    "window [{}, {end}) exceeds the {kept_certified} levels certified below E = {e}; \
                     certify a larger cutoff or pass --allow-uncertified",
                    a.window_start
                ),
                None => "sector carries no saturation certificate; run `saturate` or pass --allow-uncertified".into(),
            }));
        }
        if end > energies.len() {
            return Err(Failure::Usage(format!("window end {end} beyond the {} stored levels", energies.len())));
        }
        writeln!(out, "warning: analysing levels outside the certified range")?;
    }
    let window = energies[a.window_start..end].to_vec();
    Ok(Selection {
        source: SourceSection {
            kind: "sector".into(),
            path: Some(path.display().to_string()),
            n_particles: Some(p.n_particles()),
            ring_length: Some(p.ring_length()),
            coupling: Some(p.coupling()),
            n_over_c: Some(p.density_ratio()),
            coupling_formula: Some("c = N / (L * n_over_c)".into()),
            momentum: sector.momentum(),
            cutoff: Some(sector.cutoff()),
            solver_tolerance: Some(sector.tolerance()),
            e_max_certified: sector.e_max_certified(),
            ..Default::default()
        },
        section: Some(SelectionSection {
            window_start: a.window_start,
            window_count: window.len(),
            dedup_tolerance: a.dedup_tol,
            dedup_removed: removed,
            first_energy: window[0],
            last_energy: *window.last().unwrap(),
        }),
        energies: window,
        certified,
    })
}

pub(crate) fn stats(a: &StatsArgs, out: &mut (dyn Write + Send)) -> Result<Outcome, Failure> {
    let t0 = Instant::now();
    let sel = select_levels(a, out)?;
    let mut report = StatsReport::new(sel.source, sel.certified);
    report.selection = sel.section;
    let mut tables = Vec::new();
    let want = |s: Statistic| a.statistic == s || a.statistic == Statistic::All;
    writeln!(out, "{} levels selected", sel.energies.len())?;

    if want(Statistic::Ratio) {
        let r = ratio_statistic(&sel.energies, a.ratio_window)?;
        writeln!(out, "<chi> = {:.6} over {} ratios ({} zero spacings)", r.mean(), r.chi.len(), r.zero_spacings.len())?;
        report.ratio = Some(RatioSection::from_series(&r));
        tables.push(Table::ratio(&r));
        tables.push(Table::ratio_windows(&r));
    }
    if want(Statistic::Lsd) || want(Statistic::Delta3) {
        let u = unfold(&sel.energies, a.degree)?;
        report.unfolding = UnfoldingSection::from_sequence(&u);
        writeln!(out, "unfolded with degree {}: mean spacing {:.6}", a.degree, u.mean_spacing())?;
        if want(Statistic::Lsd) {
            let h = lsd_histogram(&u, a.bins, a.s_max)?;
            let section = LsdSection::from_histogram(&h);
            writeln!(
                out,
                "LSD: first-bin density {:.4} (Poisson {:.4}), chi2 = {:.2} with {} dof",
                section.first_bin_density, section.poisson_first_bin_density, section.chi_square, section.degrees_of_freedom
            )?;
            report.lsd = Some(section);
            tables.push(Table::lsd(&h));
        }
        if want(Statistic::Delta3) {
            let grid = &a.w_grid.0;
            let w_max = *grid.last().ok_or_else(|| Failure::Usage("empty --w-grid".into()))?;
            let v = u.values();
            let last = *v.last().unwrap();
            let n_starts = a.n_starts.unwrap_or_else(|| v.iter().take_while(|&&x| x + w_max <= last).count());
            let mut curve = delta3_curve(&u, grid, n_starts)?;
            let (lo, hi) = a.fit_range.unwrap_or((grid[0], w_max));
            curve.fit = Some(fit_slope(&curve, lo, hi)?);
            if let Some((lo, hi)) = a.exponent_range {
                curve.exponent = Some(fit_exponent(&curve, lo, hi)?);
            }
            if let Some(f) = curve.fit {
                writeln!(out, "Delta3 slope on [{lo}, {hi}]: {:.5} (Poisson 1/15 = {:.5})", f.gamma0, 1.0 / 15.0)?;
            }
            if let Some(e) = curve.exponent {
                writeln!(out, "Delta3 exponent on [{}, {}]: {:.4}", e.w_min, e.w_max, e.alpha)?;
            }
            report.delta3 = Some(Delta3Section::from_curve(&curve));
            tables.push(Table::delta3(&curve));
        }
    }
    fs::create_dir_all(&a.output_dir)?;
    let path = write_stats_report(&report, &tables, &a.output_dir, &a.stem)?;
    writeln!(out, "status {}; wrote {} in {:.2?}", report.status, path.display(), t0.elapsed())?;
    Ok(Outcome::Success)
}
