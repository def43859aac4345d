//! Experiment configuration: flat `key = value` text, one experiment per
//! block, blocks separated by lines of `---`.
//!
//! ```text
//! # comments start with '#'
//! domain.kind = disk
//! domain.params = 1
//! p = 2
//! q = 4
//! h = 0.03125
//! solver.seed = 7
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{DomainDescriptor, Grid, Shape};
use crate::nonlinearity::Nonlinearity;
use crate::scalar::Real;
use crate::solver::{Initializer, SolverConfig};

const KEYS: &[&str] = &[
    "name",
    "domain.kind",
    "domain.params",
    "nonlinearity",
    "p",
    "q",
    "C",
    "mode",
    "h",
    "refine",
    "tau",
    "output",
    "solver.initial_step",
    "solver.backtrack",
    "solver.eps_res",
    "solver.eps_neh",
    "solver.max_iter",
    "solver.seed",
    "solver.max_restarts",
    "solver.eps_reg",
    "solver.cg_tol",
    "solver.init",
    "schedule.offsets",
    "schedule.steps",
    "manufactured.delta",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Solve, analyse the nodal set, check `d ≤ 2h`.
    VerifyTheorem,
    /// Moving polarization and the Hopf check on a manufactured field.
    DemonstrateLemmas,
    /// Second eigenpair (the resonant problem).
    Eigen,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Self::VerifyTheorem => "verify-theorem",
            Self::DemonstrateLemmas => "demonstrate-lemmas",
            Self::Eigen => "eigen",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "verify-theorem" => Ok(Self::VerifyTheorem),
            "demonstrate-lemmas" => Ok(Self::DemonstrateLemmas),
            "eigen" => Ok(Self::Eigen),
            _ => Err(Error::Parse(format!(
                "mode must be verify-theorem, demonstrate-lemmas or eigen, got `{s}`"
            ))),
        }
    }
}

/// Which polarization offsets a moving-polarization run visits.
#[derive(Clone, Debug, PartialEq)]
pub enum Schedule<T> {
    /// Every lattice-aligned offset in `[0, d₁/2]`.
    All,
    /// Evenly spaced aligned offsets, both ends included.
    Steps(usize),
    /// Explicit offsets, measured from the symmetry axis.
    Offsets(Vec<T>),
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig<T> {
    pub name: Option<String>,
    pub domain: DomainDescriptor<T>,
    pub p: T,
    pub q: T,
    pub c: T,
    /// `f(s) = λ₂|s|^{p−2}s`: solved as the second eigenpair.
    pub resonant: bool,
    pub mode: Mode,
    pub h: T,
    /// Number of refinement levels `h, h/2, …` a campaign runs.
    pub refine: usize,
    /// Zero threshold of the nodal analysis.
    pub tau: T,
    pub solver: SolverConfig<T>,
    pub schedule: Schedule<T>,
    /// Depth of the sign change of manufactured fields, as a fraction of
    /// the inradius.
    pub delta: T,
    pub output: Option<PathBuf>,
}

impl<T: Real> ExperimentConfig<T> {
    pub fn new(domain: DomainDescriptor<T>, h: T) -> Self {
        Self {
            name: None,
            domain,
            p: T::lit(2.0),
            q: T::lit(4.0),
            c: T::one(),
            resonant: false,
            mode: Mode::VerifyTheorem,
            h,
            refine: 1,
            tau: T::zero(),
            solver: SolverConfig::default(),
            schedule: Schedule::All,
            delta: T::lit(0.5),
            output: None,
        }
    }

    /// The source term, `None` in the resonant case (its `λ` is the
    /// unknown).
    pub fn nonlinearity(&self) -> Result<Option<Nonlinearity<T>>> {
        if self.is_resonant() {
            return Ok(None);
        }
        Nonlinearity::power(self.p, self.q, self.c).map(Some)
    }

    pub fn is_resonant(&self) -> bool {
        self.resonant || self.mode == Mode::Eigen
    }

    pub fn grid(&self) -> Result<Arc<Grid<T>>> {
        Grid::build(self.domain.clone(), self.h).map(Arc::new)
    }

    /// Copies of this configuration at `h, h/2, …, h/2^(refine−1)`.
    pub fn refinements(&self) -> Vec<Self> {
        (0..self.refine.max(1))
            .map(|k| {
                let mut c = self.clone();
                c.h = self.h / T::lit(f64::from(1u32 << k.min(30)));
                c.refine = 1;
                c
            })
            .collect()
    }

    /// Serializes back to the text format; parsing the result gives an
    /// equal configuration.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let join = |v: &[T]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        if let Some(n) = &self.name {
            let _ = writeln!(out, "name = {n}");
        }
        let _ = writeln!(out, "domain.kind = {}", self.domain.kind());
        let _ = writeln!(out, "domain.params = {}", join(&self.domain.params()));
        let _ = writeln!(out, "nonlinearity = {}", if self.resonant { "resonant" } else { "power" });
        let _ = writeln!(out, "p = {}\nq = {}\nC = {}", self.p, self.q, self.c);
        let _ = writeln!(out, "mode = {}", self.mode.name());
        let _ = writeln!(out, "h = {}\nrefine = {}\ntau = {}", self.h, self.refine, self.tau);
        let s = &self.solver;
        let _ = writeln!(out, "solver.initial_step = {}", s.initial_step);
        let _ = writeln!(out, "solver.backtrack = {}", s.backtrack);
        if let Some(e) = s.eps_res {
            let _ = writeln!(out, "solver.eps_res = {e}");
        }
        let _ = writeln!(out, "solver.eps_neh = {}", s.eps_neh);
        let _ = writeln!(out, "solver.max_iter = {}", s.max_iter);
        let _ = writeln!(out, "solver.seed = {}", s.seed);
        let _ = writeln!(out, "solver.max_restarts = {}", s.max_restarts);
        let _ = writeln!(out, "solver.eps_reg = {}", s.eps_reg);
        let _ = writeln!(out, "solver.cg_tol = {}", s.cg_tol);
        let init = match s.initializer {
            Initializer::Random => "random",
            _ => "bump",
        };
        let _ = writeln!(out, "solver.init = {init}");
        match &self.schedule {
            Schedule::All => {}
            Schedule::Steps(n) => {
                let _ = writeln!(out, "schedule.steps = {n}");
            }
            Schedule::Offsets(a) => {
                let _ = writeln!(out, "schedule.offsets = {}", join(a));
            }
        }
        let _ = writeln!(out, "manufactured.delta = {}", self.delta);
        if let Some(o) = &self.output {
            let _ = writeln!(out, "output = {}", o.display());
        }
        out
    }
}

/// Parses every block of a configuration file.
pub fn parse_configs<T: Real>(text: &str) -> Result<Vec<ExperimentConfig<T>>> {
    let mut blocks = vec![Vec::new()];
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.chars().all(|c| c == '-') && line.len() >= 3 {
            blocks.push(Vec::new());
            continue;
        }
        blocks.last_mut().expect("nonempty").push((no + 1, line));
    }
    let configs: Vec<_> = blocks.into_iter().filter(|b| !b.is_empty()).map(|b| parse_block(&b)).collect::<Result<_>>()?;
    if configs.is_empty() {
        return Err(Error::Parse("configuration holds no experiment".into()));
    }
    Ok(configs)
}

/// Parses a file that must hold exactly one experiment.
pub fn parse_config<T: Real>(text: &str) -> Result<ExperimentConfig<T>> {
    let mut all = parse_configs(text)?;
    if all.len() != 1 {
        return Err(Error::Parse(format!("expected one experiment, found {}", all.len())));
    }
    Ok(all.remove(0))
}

fn parse_block<T: Real>(lines: &[(usize, &str)]) -> Result<ExperimentConfig<T>> {
    let mut map = BTreeMap::new();
    for &(no, line) in lines {
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {no}: expected `key = value`, got `{line}`")))?;
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(Error::UnknownKey(k.to_string()));
        }
        if map.insert(k, v).is_some() {
            return Err(Error::Parse(format!("line {no}: key `{k}` given twice")));
        }
    }
    let get = |k: &str| map.get(k).copied();
    let need = |k: &str| get(k).ok_or_else(|| Error::MissingKey(k.to_string()));

    let kind = need("domain.kind")?;
    let params = match get("domain.params") {
        Some(s) => number_list::<T>(s, "domain.params")?,
        None => Vec::new(),
    };
    let domain = domain_from(kind, &params)?;
    let h = number::<T>(need("h")?, "h")?;
    let mut cfg = ExperimentConfig::new(domain, h);
    cfg.name = get("name").map(str::to_string);
    if let Some(s) = get("nonlinearity") {
        cfg.resonant = match s {
            "power" => false,
            "resonant" => true,
            _ => return Err(Error::Parse(format!("nonlinearity must be power or resonant, got `{s}`"))),
        };
    }
    if let Some(s) = get("p") {
        cfg.p = number(s, "p")?;
    }
    if let Some(s) = get("q") {
        cfg.q = number(s, "q")?;
    }
    if let Some(s) = get("C") {
        cfg.c = number(s, "C")?;
    }
    if let Some(s) = get("mode") {
        cfg.mode = Mode::parse(s)?;
    }
    if let Some(s) = get("refine") {
        cfg.refine = integer(s, "refine")?;
    }
    if let Some(s) = get("tau") {
        cfg.tau = number(s, "tau")?;
    }
    if let Some(s) = get("output") {
        cfg.output = Some(PathBuf::from(s));
    }
    if let Some(s) = get("manufactured.delta") {
        cfg.delta = number(s, "manufactured.delta")?;
    }
    let sv = &mut cfg.solver;
    if let Some(s) = get("solver.initial_step") {
        sv.initial_step = number(s, "solver.initial_step")?;
    }
    if let Some(s) = get("solver.backtrack") {
        sv.backtrack = number(s, "solver.backtrack")?;
    }
    if let Some(s) = get("solver.eps_res") {
        sv.eps_res = Some(number(s, "solver.eps_res")?);
    }
    if let Some(s) = get("solver.eps_neh") {
        sv.eps_neh = number(s, "solver.eps_neh")?;
    }
    if let Some(s) = get("solver.max_iter") {
        sv.max_iter = integer(s, "solver.max_iter")?;
    }
    if let Some(s) = get("solver.seed") {
        sv.seed = s.parse().map_err(|_| Error::Parse(format!("solver.seed: not an integer: `{s}`")))?;
    }
    if let Some(s) = get("solver.max_restarts") {
        sv.max_restarts = integer(s, "solver.max_restarts")?;
    }
    if let Some(s) = get("solver.eps_reg") {
        sv.eps_reg = number(s, "solver.eps_reg")?;
    }
    if let Some(s) = get("solver.cg_tol") {
        sv.cg_tol = number(s, "solver.cg_tol")?;
    }
    if let Some(s) = get("solver.init") {
        sv.initializer = match s {
            "bump" => Initializer::AntisymmetricBump,
            "random" => Initializer::Random,
            _ => return Err(Error::Parse(format!("solver.init must be bump or random, got `{s}`"))),
        };
    }
    sv.validate()?;
    match (get("schedule.offsets"), get("schedule.steps")) {
        (Some(_), Some(_)) => {
            return Err(Error::Parse("give schedule.offsets or schedule.steps, not both".into()));
        }
        (Some(s), None) => {
            let a = number_list::<T>(s, "schedule.offsets")?;
            if a.iter().any(|&x| x < T::zero()) {
                return Err(Error::Parse("schedule.offsets must be nonnegative".into()));
            }
            cfg.schedule = Schedule::Offsets(a);
        }
        (None, Some(s)) => {
            let n = integer(s, "schedule.steps")?;
            if n < 2 {
                return Err(Error::Parse("schedule.steps must be at least 2".into()));
            }
            cfg.schedule = Schedule::Steps(n);
        }
        (None, None) => {}
    }
    if cfg.refine == 0 {
        return Err(Error::Parse("refine must be at least 1".into()));
    }
    if !(cfg.tau >= T::zero()) {
        return Err(Error::Parse("tau must be nonnegative".into()));
    }
    Ok(cfg)
}

fn number<T: Real>(s: &str, key: &str) -> Result<T> {
    s.parse::<T>().ok().filter(|v| v.is_finite()).ok_or_else(|| Error::Parse(format!("{key}: not a number: `{s}`")))
}

fn integer(s: &str, key: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::Parse(format!("{key}: not a nonnegative integer: `{s}`")))
}

fn number_list<T: Real>(s: &str, key: &str) -> Result<Vec<T>> {
    s.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).map(|t| number(t, key)).collect()
}

/// Builds a descriptor from `domain.kind` and `domain.params`.
///
/// | kind | params |
/// |---|---|
/// | `square` | `a` (default 1): `(−a, a)²` |
/// | `rectangle` | `x0 x1 y0 y1` |
/// | `disk` | `r` (centred) or `cx cy r`; default unit disk |
/// | `stadium` | `half_length radius` |
/// | `polygon` | `x y` vertex pairs |
pub fn domain_from<T: Real>(kind: &str, params: &[T]) -> Result<DomainDescriptor<T>> {
    let bad = |want: &str| {
        Err(Error::InvalidDomain(format!("{kind} takes {want}, got {} parameters", params.len())))
    };
    match (kind, params) {
        ("square", []) => DomainDescriptor::centered_rectangle(T::one(), T::one()),
        ("square", [a]) => DomainDescriptor::centered_rectangle(*a, *a),
        ("square", _) => bad("one half side"),
        ("rectangle", [x0, x1, y0, y1]) => DomainDescriptor::rectangle(*x0, *x1, *y0, *y1),
        ("rectangle", _) => bad("x0 x1 y0 y1"),
        ("disk", []) => Ok(DomainDescriptor::unit_disk()),
        ("disk", [r]) => DomainDescriptor::disk([T::zero(), T::zero()], *r),
        ("disk", [cx, cy, r]) => DomainDescriptor::disk([*cx, *cy], *r),
        ("disk", _) => bad("r or cx cy r"),
        ("stadium", [l, r]) => DomainDescriptor::stadium(*l, *r),
        ("stadium", _) => bad("half_length radius"),
        ("polygon", v) if v.len() >= 6 && v.len() % 2 == 0 => {
            DomainDescriptor::symmetric_polygon(v.chunks(2).map(|c| [c[0], c[1]]).collect())
        }
        ("polygon", _) => bad("at least three x y pairs"),
        _ => Err(Error::InvalidDomain(format!(
            "unknown domain.kind `{kind}` (square, rectangle, disk, stadium, polygon)"
        ))),
    }
}

/// Short label of a domain for tables.
pub fn domain_label<T: Real>(d: &DomainDescriptor<T>) -> String {
    match d.shape() {
        Shape::Rectangle { x, y } if x[1] - x[0] == y[1] - y[0] => "square".into(),
        _ => d.kind().into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DISK: &str = "
        # manufactured disk experiment
        domain.kind = disk
        domain.params = 1
        p = 2
        q = 4
        mode = demonstrate-lemmas
        h = 0.0625
        schedule.steps = 5   # five planes
    ";

    #[test]
    fn parses_one_block() {
        let c: ExperimentConfig<f64> = parse_config(DISK).unwrap();
        assert_eq!(c.domain, DomainDescriptor::unit_disk());
        assert_eq!(c.mode, Mode::DemonstrateLemmas);
        assert_eq!(c.schedule, Schedule::Steps(5));
        assert_eq!(c.h, 0.0625);
        assert!(c.nonlinearity().unwrap().is_some());
    }

    #[test]
    fn blocks_and_round_trip() {
        let text = format!("{DISK}\n---\ndomain.kind = rectangle\ndomain.params = 0, 2, 0, 1\nh = 0.03125\nmode = eigen\nrefine = 3\n");
        let all: Vec<ExperimentConfig<f64>> = parse_configs(&text).unwrap();
        assert_eq!(all.len(), 2);
        assert!(all[1].is_resonant());
        let hs: Vec<f64> = all[1].refinements().iter().map(|c| c.h).collect();
        assert_eq!(hs, vec![0.03125, 0.015625, 0.0078125]);
        for c in &all {
            let back: ExperimentConfig<f64> = parse_config(&c.to_text()).unwrap();
            assert_eq!(back.to_text(), c.to_text());
        }
    }

    #[test]
    fn unknown_key_is_named() {
        let err = parse_config::<f64>("domain.kind = disk\nh = 0.1\nsolver.tolerance = 3\n").unwrap_err();
        assert!(matches!(&err, Error::UnknownKey(k) if k == "solver.tolerance"));
        assert!(err.to_string().contains("solver.tolerance"));
    }

    #[test]
    fn malformed_input() {
        assert!(matches!(parse_config::<f64>("domain.kind = disk\n"), Err(Error::MissingKey(k)) if k == "h"));
        assert!(matches!(parse_config::<f64>("domain.kind = disk\nh = x\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_config::<f64>("domain.kind = blob\nh = 0.1\n"), Err(Error::InvalidDomain(_))));
        assert!(parse_config::<f64>("domain.kind = disk\nh = 0.1\nh = 0.2\n").is_err());
        assert!(parse_config::<f64>("domain.kind = disk\nh 0.1\n").is_err());
        assert!(parse_config::<f64>("domain.kind = disk\nh = 0.1\nsolver.backtrack = 2\n").is_err());
        assert!(parse_configs::<f64>("# nothing\n---\n").is_err());
    }
}
