//! One function per subcommand. Each writes its CSV files and the manifest.

use std::path::Path;

use anyhow::Result;
use rayon::prelude::*;
use srl_core::cocycle::{
    cohen_gap, cone_check, equivariance_residual, lyapunov_estimates, oseledets_splitting_2d, recurrence_liminf,
    CocyclePath,
};
use srl_core::extend::{extended_radii, verify_alpha_property, AlphaSequence};
use srl_core::jsr::{gripenberg_bounds, scan_subtrees, MatrixSet, Word};
use srl_core::opshift::family_radii;
use srl_core::radii::{RadiiReport, RadiiRow};
use srl_core::words::levels_within_budget;
use srl_core::Error;

use crate::cli::{CocycleCommand, Command, Enumeration, ExtendCommand, JsrCommand, OpCommand, Orbit};
use crate::formats::{self, CocycleSpecFile, MatrixSetFile, OperatorFamilyFile};
use crate::output::{num, opt_num, Run, Status, Table};

pub fn run(command: Command) -> Result<Status> {
    match command {
        Command::Jsr(c) => jsr(c),
        Command::Op(c) => op(c),
        Command::Extend(c) => extend(c),
        Command::Cocycle(c) => cocycle(c),
    }
}

fn validation(msg: impl Into<String>) -> anyhow::Error {
    Error::Validation(msg.into()).into()
}

fn load_set(path: &Path, normalize: bool, run_params: &mut Vec<(String, String)>) -> Result<(MatrixSet, Vec<u8>)> {
    let (file, bytes): (MatrixSetFile, _) = formats::read(path)?;
    let mut set = file.to_set().map_err(|m| formats::invalid(path, m))?;
    if normalize {
        let (scaled, factor) = set.normalized()?;
        run_params.push(("normalization".into(), num(factor)));
        set = scaled;
    }
    Ok((set, bytes))
}

fn start(command: &str, out: &Path, input: &[u8], params: Vec<(String, String)>) -> Result<Run> {
    let mut run = Run::new(command, out, input)?;
    for (k, v) in params {
        run.param(&k, v);
    }
    Ok(run)
}

fn word(w: &Word) -> String {
    w.indices().iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn status(complete: bool) -> Status {
    if complete {
        Status::Complete
    } else {
        Status::Partial
    }
}

/// Exhaustive scan split by first letter across the thread pool.
pub fn parallel_report(set: &MatrixSet, n_max: usize, budget: u64) -> Result<RadiiReport> {
    if n_max == 0 {
        return Err(validation("--max-len must be at least 1"));
    }
    let depth = levels_within_budget(set.len(), n_max, budget);
    let scans =
        (0..set.len()).into_par_iter().map(|i| scan_subtrees(set, depth, i..i + 1)).collect::<Result<Vec<_>, _>>()?;
    let mut it = scans.into_iter();
    let mut total = it.next().expect("sets are nonempty");
    for s in it {
        total.merge(&s);
    }
    total.requested = n_max;
    Ok(total.into_report(set.label()))
}

const REPORT_COLUMNS: [&str; 6] = ["n", "norm_sup", "gelfand_max", "upper", "lower", "gap"];

fn report_cells(r: &RadiiRow) -> Vec<String> {
    vec![r.n.to_string(), num(r.norm_sup), num(r.gelfand_max), num(r.upper), num(r.lower), num(r.gap)]
}

fn print_summary(rep: &RadiiReport) {
    println!("label: {}", rep.label);
    println!("levels: {} of {}", rep.rows.len(), rep.requested_n_max);
    if let Some(last) = rep.rows.last() {
        println!("bracket: [{}, {}]", last.lower, last.upper);
    }
}

fn enumeration_params(e: &Enumeration) -> Vec<(String, String)> {
    vec![("max_len".into(), e.max_len.to_string()), ("budget".into(), e.budget.to_string())]
}

fn jsr(c: JsrCommand) -> Result<Status> {
    match c {
        JsrCommand::Bounds { input, enumeration, normalize, output } => {
            let mut params = enumeration_params(&enumeration);
            let (set, bytes) = load_set(&input.input, normalize, &mut params)?;
            let rep = parallel_report(&set, enumeration.max_len, enumeration.budget)?;
            let mut t = Table::new(&["n", "upper", "lower", "norm_word", "gelfand_word"]);
            for (i, r) in rep.rows.iter().enumerate() {
                t.push(vec![
                    r.n.to_string(),
                    num(r.upper),
                    num(r.lower),
                    word(&rep.norm_words[i]),
                    word(&rep.gelfand_words[i]),
                ]);
            }
            let mut run = start("jsr bounds", &output.out, &bytes, params)?;
            run.write_csv("bounds.csv", &t)?;
            print_summary(&rep);
            run.finish(status(rep.complete))
        }
        JsrCommand::BwReport { input, enumeration, normalize, output } => {
            let mut params = enumeration_params(&enumeration);
            let (set, bytes) = load_set(&input.input, normalize, &mut params)?;
            let rep = parallel_report(&set, enumeration.max_len, enumeration.budget)?;
            let mut t = Table::new(&REPORT_COLUMNS);
            for r in &rep.rows {
                t.push(report_cells(r));
            }
            let mut run = start("jsr bw-report", &output.out, &bytes, params)?;
            run.write_csv("bw_report.csv", &t)?;
            print_summary(&rep);
            run.finish(status(rep.complete))
        }
        JsrCommand::Gripenberg { input, delta, budget, normalize, output } => {
            let mut params = vec![("delta".into(), num(delta)), ("budget".into(), budget.to_string())];
            let (set, bytes) = load_set(&input.input, normalize, &mut params)?;
            let g = gripenberg_bounds(&set, delta, budget)?;
            let mut t = Table::new(&["lower", "upper", "width", "depth", "nodes", "converged", "lower_word"]);
            t.push(vec![
                num(g.lower),
                num(g.upper),
                num(g.width()),
                g.depth.to_string(),
                g.nodes.to_string(),
                g.converged.to_string(),
                word(&g.lower_word),
            ]);
            let mut run = start("jsr gripenberg", &output.out, &bytes, params)?;
            run.write_csv("gripenberg.csv", &t)?;
            println!("bracket: [{}, {}] after {} products", g.lower, g.upper, g.nodes);
            run.finish(status(g.converged))
        }
    }
}

fn op(c: OpCommand) -> Result<Status> {
    let OpCommand::Radii { input, enumeration, tol, output } = c;
    let (file, bytes): (OperatorFamilyFile, _) = formats::read(&input.input)?;
    let fam = file.to_family().map_err(|m| formats::invalid(&input.input, m))?;
    if enumeration.max_len == 0 {
        return Err(validation("--max-len must be at least 1"));
    }
    let fr = family_radii(&fam, enumeration.max_len, enumeration.budget, tol)?;
    let mut cols = REPORT_COLUMNS.to_vec();
    cols.extend(["f_sup", "chi_sup"]);
    let mut t = Table::new(&cols);
    for r in &fr.report.rows {
        let mut cells = report_cells(r);
        cells.extend([num(r.f_sup), num(r.chi_sup)]);
        t.push(cells);
    }
    let mut params = enumeration_params(&enumeration);
    params.push(("tol".into(), num(tol)));
    let mut run = start("op radii", &output.out, &bytes, params)?;
    run.write_csv("op_radii.csv", &t)?;
    print_summary(&fr.report);
    println!("rho_hat {} rho_r {} rho_chi {} rho_f {}", fr.rho_hat, fr.rho_r, fr.rho_chi, fr.rho_f);
    println!("residuals: max(rho_chi, rho_r) {}, rho_chi - rho_f {}", fr.gbwf_residual, fr.he_residual);
    run.finish(status(fr.report.complete))
}

fn extend(c: ExtendCommand) -> Result<Status> {
    match c {
        ExtendCommand::VerifyAlpha { generator, steps, seed, beta, output } => {
            let alpha = AlphaSequence::new(beta)?;
            let rep = verify_alpha_property(&generator.0, steps, &alpha, seed)?;
            let described = format!("{:?}", generator.0);
            let mut t = Table::new(&["n", "direct", "weighted", "difference", "diverges", "passed"]);
            t.push(vec![
                rep.n.to_string(),
                num(rep.direct),
                num(rep.weighted),
                num(rep.difference),
                rep.diverges.to_string(),
                rep.passed.to_string(),
            ]);
            let params = vec![
                ("generator".into(), described.clone()),
                ("steps".into(), steps.to_string()),
                ("beta".into(), num(beta)),
            ];
            let mut run = start("extend verify-alpha", &output.out, described.as_bytes(), params)?;
            run.seed(seed);
            run.write_csv("verify_alpha.csv", &t)?;
            println!("{described}: difference {} ({})", rep.difference, if rep.passed { "pass" } else { "fail" });
            run.finish(Status::Complete)
        }
        ExtendCommand::Radii { input, enumeration, beta, output } => {
            let mut params = enumeration_params(&enumeration);
            params.push(("beta".into(), num(beta)));
            let (set, bytes) = load_set(&input.input, false, &mut params)?;
            if enumeration.max_len == 0 {
                return Err(validation("--max-len must be at least 1"));
            }
            let er = extended_radii(&set, enumeration.max_len, enumeration.budget, AlphaSequence::new(beta)?)?;
            let mut cols: Vec<String> = vec!["n".into()];
            for panel in ["base", "ext"] {
                cols.extend(REPORT_COLUMNS[1..].iter().map(|c| format!("{panel}_{c}")));
            }
            cols.extend(["ext_f_sup".into(), "ext_chi_sup".into()]);
            let mut t = Table::new(&cols);
            for (b, e) in er.base.rows.iter().zip(&er.extended.rows) {
                let mut cells = report_cells(b);
                cells.extend(report_cells(e).into_iter().skip(1));
                cells.extend([num(e.f_sup), num(e.chi_sup)]);
                t.push(cells);
            }
            let mut run = start("extend radii", &output.out, &bytes, params)?;
            run.write_csv("extend_radii.csv", &t)?;
            print_summary(&er.extended);
            println!("spectral columns equal: {}", er.rho_columns_equal());
            run.finish(status(er.base.complete && er.extended.complete))
        }
    }
}

struct Loaded {
    file: CocycleSpecFile,
    bytes: Vec<u8>,
    seeds: Vec<u64>,
}

fn load_orbit(o: &Orbit) -> Result<Loaded> {
    let (file, bytes): (CocycleSpecFile, _) = formats::read(&o.input.input)?;
    let seeds = o.seeds.list().map_err(validation)?;
    // validate once so a bad spec fails before any work is scheduled
    file.build(seeds[0]).map_err(|m| formats::invalid(&o.input.input, m))?;
    if o.steps == 0 {
        return Err(validation("--steps must be at least 1"));
    }
    Ok(Loaded { file, bytes, seeds })
}

fn orbit_run(command: &str, o: &Orbit, l: &Loaded) -> Result<Run> {
    let params = vec![("steps".into(), o.steps.to_string()), ("seeds".into(), l.seeds.len().to_string())];
    let mut run = start(command, &o.output.out, &l.bytes, params)?;
    run.seed(l.seeds[0]);
    Ok(run)
}

fn path_for(l: &Loaded, seed: u64, past: usize, future: usize) -> Result<CocyclePath> {
    let (sys, coc) = l.file.build(seed).map_err(validation)?;
    Ok(CocyclePath::generate(&sys, &coc, past, future)?)
}

fn cocycle(c: CocycleCommand) -> Result<Status> {
    match c {
        CocycleCommand::Lyapunov { orbit } => {
            let l = load_orbit(&orbit)?;
            let n = orbit.steps;
            let results = l
                .seeds
                .par_iter()
                .map(|&s| Ok((s, lyapunov_estimates(&path_for(&l, s, 0, n)?, n)?)))
                .collect::<Result<Vec<_>>>()?;
            let mut run = orbit_run("cocycle lyapunov", &orbit, &l)?;
            let d = l.file.dim;
            let mut cols: Vec<String> = ["seed", "lambda_top_hat", "log_det_rate"].map(String::from).to_vec();
            cols.extend((1..=d).map(|i| format!("exponent_{i}")));
            let mut spectrum = Table::new(&cols);
            for (s, est) in &results {
                let mut t = Table::new(&["n", "lambda_hat"]);
                for (i, v) in est.lambda_track.iter().enumerate() {
                    t.push(vec![(i + 1).to_string(), num(*v)]);
                }
                run.write_csv(&format!("lyapunov_seed{s}.csv"), &t)?;
                let mut row = vec![s.to_string(), num(est.lambda_top_hat), num(est.log_det_rate)];
                row.extend(est.spectrum.iter().map(|&v| num(v)));
                spectrum.push(row);
                println!("seed {s}: lambda {} spectrum {:?}", est.lambda_top_hat, est.spectrum);
            }
            run.write_csv("lyapunov_spectrum.csv", &spectrum)?;
            run.finish(Status::Complete)
        }
        CocycleCommand::Cohen { orbit, horizon, delta_cone } => {
            let l = load_orbit(&orbit)?;
            if !(delta_cone > 0.0 && delta_cone <= 1.0) {
                return Err(validation("--delta-cone must lie in (0, 1]"));
            }
            let n = orbit.steps;
            let two_d = l.file.dim == 2;
            if two_d && horizon == 0 {
                return Err(validation("--horizon must be at least 1"));
            }
            let margin = if two_d { horizon } else { 0 };
            let results = l
                .seeds
                .par_iter()
                .map(|&s| {
                    let path = path_for(&l, s, margin, n + margin)?;
                    let rep = cohen_gap(&path, n)?;
                    let splitting = if two_d {
                        match (cone_check(&path, delta_cone, n, horizon), recurrence_liminf(&path, horizon, n)) {
                            (Ok(c), Ok(r)) => Some((c, r)),
                            (Err(Error::IllConditionedSplitting { .. }), _)
                            | (_, Err(Error::IllConditionedSplitting { .. })) => None,
                            (Err(e), _) | (_, Err(e)) => return Err(e.into()),
                        }
                    } else {
                        None
                    };
                    Ok((s, rep, splitting))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut run = orbit_run("cocycle cohen", &orbit, &l)?;
            run.param("horizon", horizon);
            run.param("delta_cone", num(delta_cone));
            for (s, rep, splitting) in &results {
                let mut t =
                    Table::new(&["n", "lambda_hat", "rho_over_n", "gap", "cone_return_flag", "recurrence_min_so_far"]);
                for i in 0..n {
                    let (flag, rec) = match splitting {
                        Some((c, r)) => (u8::from(c.contained[i]).to_string(), num(r.min_so_far[i])),
                        None => (String::new(), String::new()),
                    };
                    t.push(vec![
                        (i + 1).to_string(),
                        num(rep.lyapunov.lambda_track[i]),
                        num(rep.rho_track[i]),
                        num(rep.gap_track[i]),
                        flag,
                        rec,
                    ]);
                }
                run.write_csv(&format!("cohen_seed{s}.csv"), &t)?;
                let extra = match splitting {
                    Some((c, r)) => format!(" cone returns {} recurrence {}", c.returns, r.value),
                    None if two_d => " splitting refused".into(),
                    None => String::new(),
                };
                println!(
                    "seed {s}: lambda {} rho_limsup {} gap {}{extra}",
                    rep.lambda_top_hat(),
                    rep.rho_limsup_hat,
                    rep.gap
                );
            }
            run.finish(Status::Complete)
        }
        CocycleCommand::Splitting { orbit, horizon } => {
            let l = load_orbit(&orbit)?;
            if l.file.dim != 2 {
                return Err(validation("splitting estimates need a two-dimensional cocycle"));
            }
            if horizon == 0 {
                return Err(validation("--horizon must be at least 1"));
            }
            let n = orbit.steps;
            let results = l
                .seeds
                .par_iter()
                .map(|&s| {
                    let path = path_for(&l, s, horizon, n + horizon + 1)?;
                    let mut t = Table::new(&["t", "v_x", "v_y", "w_x", "w_y", "gap", "equivariance_residual"]);
                    let mut refused = 0usize;
                    for time in 0..n as isize {
                        let row = match oseledets_splitting_2d(&path, time, horizon) {
                            Ok(e) => {
                                let res = equivariance_residual(&path, time, 1, horizon).ok();
                                vec![
                                    time.to_string(),
                                    num(e.v[0]),
                                    num(e.v[1]),
                                    num(e.w[0]),
                                    num(e.w[1]),
                                    num(e.gap),
                                    opt_num(res),
                                ]
                            }
                            Err(Error::IllConditionedSplitting { gap, .. }) => {
                                refused += 1;
                                let mut r = vec![time.to_string()];
                                r.extend((0..4).map(|_| String::new()));
                                r.extend([num(gap), String::new()]);
                                r
                            }
                            Err(e) => return Err(e.into()),
                        };
                        t.push(row);
                    }
                    Ok((s, t, refused))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut run = orbit_run("cocycle splitting", &orbit, &l)?;
            run.param("horizon", horizon);
            for (s, t, refused) in &results {
                run.write_csv(&format!("splitting_seed{s}.csv"), t)?;
                println!("seed {s}: {} of {} times refused", refused, t.len());
            }
            run.finish(Status::Complete)
        }
    }
}
