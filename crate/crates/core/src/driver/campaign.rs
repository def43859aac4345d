//! Verification campaigns: solve, analyse the nodal set, tabulate `d/h`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::driver::config::{domain_label, ExperimentConfig, Mode};
use crate::driver::moving::{hopf_conflict_check, manufactured_field, moving_polarization, trace_csv, HopfVerdict, MovingOutcome};
use crate::error::{Error, Result};
use crate::nodal::NodalDecomposition;
use crate::rearrange::{write_field, GridFunction};
use crate::scalar::Real;
use crate::solver::{energy, nehari_project, second_eigenpair, solve_least_energy_nodal};

/// Columns of `summary.csv`.
pub const SUMMARY_HEADER: &str = "domain,p,q,h,lambda_or_energy,d,d_over_h,domains,verdict";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// The solver did not converge; never counted as a pass.
    Skip,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::Skip => "SKIP",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow<T> {
    pub domain: String,
    pub p: T,
    /// Growth exponent of the source; equals `p` in the resonant case.
    pub q: T,
    pub h: T,
    /// `λ₂` for resonant and eigen entries, the energy otherwise.
    pub lambda_or_energy: Option<T>,
    pub d: Option<T>,
    pub domains: Option<usize>,
    pub verdict: Verdict,
    pub note: Option<String>,
}

impl<T: Real> SummaryRow<T> {
    pub fn d_over_h(&self) -> Option<T> {
        self.d.map(|d| d / self.h)
    }

    pub fn csv_line(&self) -> String {
        let opt = |v: Option<T>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.domain,
            self.p,
            self.q,
            self.h,
            opt(self.lambda_or_energy),
            opt(self.d),
            opt(self.d_over_h()),
            self.domains.map(|n| n.to_string()).unwrap_or_default(),
            self.verdict.name()
        )
    }
}

pub fn summary_csv<T: Real>(rows: &[SummaryRow<T>]) -> String {
    let mut out = format!("{SUMMARY_HEADER}\n");
    for r in rows {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

/// Writes `text` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

struct Artifacts(Vec<(&'static str, String)>);

impl Artifacts {
    fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for (name, text) in &self.0 {
            write_atomic(&dir.join(name), text)?;
        }
        Ok(())
    }
}

/// Runs every entry (refinement levels expanded) in parallel and returns
/// the rows in configuration order. With `out`, each entry's artifacts go
/// to `out/entry-NNN/` and the table to `out/summary.csv`.
pub fn verify_theorem_campaign<T: Real>(
    configs: &[ExperimentConfig<T>],
    out: Option<&Path>,
) -> Result<Vec<SummaryRow<T>>> {
    let entries: Vec<ExperimentConfig<T>> = configs.iter().flat_map(|c| c.refinements()).collect();
    let results: Vec<Result<SummaryRow<T>>> = entries
        .par_iter()
        .enumerate()
        .map(|(k, cfg)| {
            let (row, artifacts) = run_entry(cfg)?;
            if let Some(dir) = out {
                artifacts.write(&dir.join(format!("entry-{k:03}")))?;
            }
            Ok(row)
        })
        .collect();
    let rows = results.into_iter().collect::<Result<Vec<_>>>()?;
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        write_atomic(&dir.join("summary.csv"), &summary_csv(&rows))?;
    }
    Ok(rows)
}

fn row_base<T: Real>(cfg: &ExperimentConfig<T>) -> SummaryRow<T> {
    SummaryRow {
        domain: domain_label(&cfg.domain),
        p: cfg.p,
        q: if cfg.is_resonant() { cfg.p } else { cfg.q },
        h: cfg.h,
        lambda_or_energy: None,
        d: None,
        domains: None,
        verdict: Verdict::Skip,
        note: None,
    }
}

fn run_entry<T: Real>(cfg: &ExperimentConfig<T>) -> Result<(SummaryRow<T>, Artifacts)> {
    let mut files = vec![("config.cfg", cfg.to_text())];
    let row = match cfg.mode {
        Mode::DemonstrateLemmas => lemma_entry(cfg, &mut files)?,
        Mode::VerifyTheorem | Mode::Eigen => theorem_entry(cfg, &mut files)?,
    };
    Ok((row, Artifacts(files)))
}

fn theorem_entry<T: Real>(cfg: &ExperimentConfig<T>, files: &mut Vec<(&'static str, String)>) -> Result<SummaryRow<T>> {
    let mut row = row_base(cfg);
    let grid = cfg.grid()?;
    let solved: Result<(GridFunction<T>, T, bool)> = match cfg.nonlinearity()? {
        None => second_eigenpair(grid, cfg.p, &cfg.solver).map(|r| (r.u, r.lambda, r.converged)),
        Some(nl) => solve_least_energy_nodal(grid, &nl, &cfg.solver).map(|s| {
            files.push(("trace.csv", s.trace_csv()));
            (s.u, s.energy, s.converged)
        }),
    };
    let (u, value, converged) = match solved {
        Ok(s) => s,
        Err(e @ (Error::Solver(_) | Error::NotSignChanging | Error::ZeroMass)) => {
            row.note = Some(e.to_string());
            return Ok(row);
        }
        Err(e) => return Err(e),
    };
    files.push(("field.fld", write_field(&u)?));
    row.lambda_or_energy = Some(value);
    let dec = match NodalDecomposition::new(&u, cfg.tau) {
        Ok(dec) => dec,
        Err(Error::NotSignChanging) => {
            row.verdict = if converged { Verdict::Fail } else { Verdict::Skip };
            row.note = Some("solution is not sign-changing".into());
            return Ok(row);
        }
        Err(e) => return Err(e),
    };
    files.push(("nodal.csv", dec.report_csv()));
    files.push(("crossings.csv", dec.crossings_csv()));
    row.d = Some(dec.d);
    row.domains = Some(dec.domains.count);
    row.verdict = if !converged {
        Verdict::Skip
    } else if dec.d <= T::lit(2.0) * cfg.h && dec.domains.count == 2 {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(row)
}

/// Manufactured field, projected onto the Nehari set, slid by moving
/// polarization. PASS when every step keeps its invariants and the Hopf
/// conflict shows (or the field already touches the boundary).
fn lemma_entry<T: Real>(cfg: &ExperimentConfig<T>, files: &mut Vec<(&'static str, String)>) -> Result<SummaryRow<T>> {
    let mut row = row_base(cfg);
    let grid = cfg.grid()?;
    let nl = cfg.nonlinearity()?;
    let mut u = manufactured_field(grid, cfg.delta)?;
    if let Some(nl) = &nl {
        u = nehari_project(&u, nl)?.1;
        row.lambda_or_energy = Some(energy(&u, nl)?);
    }
    files.push(("field.fld", write_field(&u)?));
    let dec = NodalDecomposition::new(&u, cfg.tau)?;
    files.push(("nodal.csv", dec.report_csv()));
    row.d = Some(dec.d);
    row.domains = Some(dec.domains.count);
    match moving_polarization(&u, cfg.p, nl.as_ref(), &cfg.schedule, cfg.tau) {
        Ok(MovingOutcome::AlreadyExhibited { .. }) => {
            row.verdict = Verdict::Pass;
            row.note = Some("theorem already exhibited".into());
        }
        Ok(MovingOutcome::Slid(run)) => {
            files.push(("polarization.csv", trace_csv(&run.trace)));
            files.push(("polarized.fld", write_field(&run.field)?));
            let report = hopf_conflict_check(&run)?;
            files.push(("hopf.txt", report.to_text()));
            row.verdict = if report.verdict == HopfVerdict::ConflictExhibited { Verdict::Pass } else { Verdict::Fail };
        }
        Err(e @ (Error::SupportEscape { .. } | Error::Invariant(_))) => {
            row.verdict = Verdict::Fail;
            row.note = Some(e.to_string());
        }
        Err(e) => return Err(e),
    }
    Ok(row)
}

/// Parses rows written by [`summary_csv`].
pub fn parse_summary(text: &str) -> Result<Vec<SummaryRow<f64>>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == SUMMARY_HEADER => {}
        other => return Err(Error::Parse(format!("not a summary table, header `{}`", other.unwrap_or("")))),
    }
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 9 {
                return Err(Error::Parse(format!("summary row needs 9 fields: `{line}`")));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse(format!("not a number: `{s}`")));
            let opt = |s: &str| if s.is_empty() { Ok(None) } else { num(s).map(Some) };
            let verdict = match f[8] {
                "PASS" => Verdict::Pass,
                "FAIL" => Verdict::Fail,
                "SKIP" => Verdict::Skip,
                v => return Err(Error::Parse(format!("unknown verdict `{v}`"))),
            };
            Ok(SummaryRow {
                domain: f[0].to_string(),
                p: num(f[1])?,
                q: num(f[2])?,
                h: num(f[3])?,
                lambda_or_energy: opt(f[4])?,
                d: opt(f[5])?,
                domains: if f[7].is_empty() {
                    None
                } else {
                    Some(f[7].parse().map_err(|_| Error::Parse(format!("not a count: `{}`", f[7])))?)
                },
                verdict,
                note: None,
            })
        })
        .collect()
}

/// Plain-text table of several summaries, with an optional bar chart of
/// `d/h` (one `#` per half `h`; the pass threshold is at 4).
pub fn report(tables: &[String], chart: bool) -> Result<String> {
    let mut rows = Vec::new();
    for t in tables {
        rows.extend(parse_summary(t)?);
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<10} {:>5} {:>5} {:>11} {:>16} {:>12} {:>8} {:>7}  verdict",
        "domain", "p", "q", "h", "lambda/energy", "d", "d/h", "domains"
    );
    let cell = |v: Option<f64>, prec: usize| v.map(|x| format!("{x:.prec$}")).unwrap_or_else(|| "-".into());
    for r in &rows {
        let _ = writeln!(
            out,
            "{:<10} {:>5} {:>5} {:>11} {:>16} {:>12} {:>8} {:>7}  {}",
            r.domain,
            r.p,
            r.q,
            format!("{:.3e}", r.h),
            cell(r.lambda_or_energy, 6),
            cell(r.d, 6),
            cell(r.d_over_h(), 3),
            r.domains.map(|n| n.to_string()).unwrap_or_else(|| "-".into()),
            r.verdict.name()
        );
    }
    let count = |v: Verdict| rows.iter().filter(|r| r.verdict == v).count();
    let _ = writeln!(
        out,
        "\n{} rows: {} PASS, {} FAIL, {} SKIP",
        rows.len(),
        count(Verdict::Pass),
        count(Verdict::Fail),
        count(Verdict::Skip)
    );
    if chart {
        let _ = writeln!(out, "\nd/h (one # per h/2, | marks d = 2h)");
        for r in &rows {
            let label = format!("{} p={} h={:.3e}", r.domain, r.p, r.h);
            match r.d_over_h() {
                Some(x) => {
                    let n = (x * 2.0).round().clamp(0.0, 60.0) as usize;
                    let mut bar: String = "#".repeat(n);
                    while bar.chars().count() < 4 {
                        bar.push(' ');
                    }
                    bar.insert(4, '|');
                    let _ = writeln!(out, "{label:<32} {bar} {x:.3}");
                }
                None => {
                    let _ = writeln!(out, "{label:<32} (no nodal set)");
                }
            }
        }
    }
    Ok(out)
}
