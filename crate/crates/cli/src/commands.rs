//! Subcommand arguments and their computations. Each command returns a table plus optional
//! summary lines for the diagnostic stream.

use crate::table::{Cell, Table};
use clap::{ArgGroup, Args, ValueEnum};
use motzkin_core::excursion::{self, ExcursionDensity};
use motzkin_core::hamiltonian::{self, EigenOptions, MoveClasses};
use motzkin_core::markov;
use motzkin_core::schmidt;
use motzkin_core::walks::{self, CountTable, Walk};
use motzkin_core::{field, Boundary, ChainSpec, Error, Result};

pub struct Output {
    pub table: Table,
    pub summary: Vec<String>,
}

impl From<Table> for Output {
    fn from(table: Table) -> Self {
        Output { table, summary: Vec::new() }
    }
}

/// Runtime settings shared by all subcommands.
#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub seed: u64,
}

pub fn colors(text: &str) -> std::result::Result<u32, String> {
    match text.parse::<u32>() {
        Ok(0) => Err("number of colors must be at least 1".into()),
        Ok(s) => Ok(s),
        Err(e) => Err(format!("number of colors must be a positive integer: {e}")),
    }
}

fn even_length(text: &str) -> std::result::Result<usize, String> {
    match text.parse::<usize>() {
        Ok(l) if l >= 2 && l % 2 == 0 => Ok(l),
        Ok(l) => Err(format!("chain length {l} must be even and at least 2")),
        Err(e) => Err(format!("chain length must be a positive even integer: {e}")),
    }
}

fn positive(text: &str) -> std::result::Result<usize, String> {
    match text.parse::<usize>() {
        Ok(0) => Err("value must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(format!("expected a positive integer: {e}")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

pub fn grid(text: &str) -> std::result::Result<Grid, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(format!("grid `{text}` must have the form start:end:points"));
    };
    let start: f64 = a.parse().map_err(|e| format!("grid start `{a}`: {e}"))?;
    let end: f64 = b.parse().map_err(|e| format!("grid end `{b}`: {e}"))?;
    let points: usize = n.parse().map_err(|e| format!("grid points `{n}`: {e}"))?;
    if !(start > 0.0 && end > start && points >= 2) {
        return Err(format!("grid `{text}` needs 0 < start < end and at least 2 points"));
    }
    Ok(Grid { start, end, points })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryArg {
    Motzkin,
    Open,
    Periodic,
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Motzkin => Boundary::MotzkinBoundary,
            BoundaryArg::Open => Boundary::Open,
            BoundaryArg::Periodic => Boundary::Periodic,
        }
    }
}

fn chain_spec(two_n: usize, s: u32, boundary: BoundaryArg, eps0: f64) -> Result<ChainSpec> {
    let spec = ChainSpec { field_epsilon0: eps0, ..ChainSpec::new(two_n, s, boundary.into()) };
    spec.validate()?;
    Ok(spec)
}

fn eigen_options(tol: f64, settings: Settings) -> Result<EigenOptions> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::Domain(format!("eigensolver tolerance {tol} must lie in (0, 1)")));
    }
    Ok(EigenOptions { tol, seed: settings.seed, ..EigenOptions::default() })
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    #[arg(long, value_parser = colors)]
    pub s: u32,
    /// Half-chain lengths.
    #[arg(long, value_delimiter = ',', required = true, value_parser = positive)]
    pub n_list: Vec<usize>,
    /// Also write the half-chain count table `M_{n,m,s}` for every n to this file.
    #[arg(long)]
    pub counts: Option<std::path::PathBuf>,
}

fn entropy_rows(table: &mut Table, ns: &[usize], s: u32) -> Result<()> {
    for &n in ns {
        let r = schmidt::entropy_report(n, s)?;
        table.push(vec![r.n.into(), r.s.into(), r.exact_nats.into(), r.asymptotic_nats.into(), r.ratio.into()]);
    }
    Ok(())
}

const ENTROPY_COLUMNS: [&str; 5] = ["n", "s", "S_exact_nats", "S_asym_nats", "ratio"];

pub fn entropy(args: &EntropyArgs) -> Result<Output> {
    let mut table = Table::new(&ENTROPY_COLUMNS);
    entropy_rows(&mut table, &args.n_list, args.s)?;
    Ok(table.into())
}

pub fn count_table(ns: &[usize], s: u32) -> Result<Table> {
    let mut table = Table::new(&["n", "m", "s", "count_log_e", "count_exact_or_empty"]);
    for &n in ns {
        let counts = CountTable::new(n, s)?;
        for m in 0..=n {
            let exact = counts.exact_count(m).map(|c| Cell::Text(c.to_string()));
            table.push(vec![n.into(), m.into(), s.into(), counts.ln_count(m).into(), exact.unwrap_or(Cell::Empty)]);
        }
    }
    Ok(table)
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Chain length 2n.
    #[arg(long, value_parser = even_length)]
    pub two_n: usize,
    #[arg(long, value_parser = colors)]
    pub s: u32,
    #[arg(long, value_enum, default_value = "motzkin")]
    pub boundary: BoundaryArg,
    /// Field strength ε₀ (0 disables the field).
    #[arg(long, default_value_t = 0.0)]
    pub eps0: f64,
    /// Number of lowest eigenvalues.
    #[arg(long, default_value_t = 4, value_parser = positive)]
    pub k: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

pub fn spectrum(args: &SpectrumArgs, settings: Settings) -> Result<Output> {
    let spec = chain_spec(args.two_n, args.s, args.boundary, args.eps0)?;
    let opts = eigen_options(args.tol, settings)?;
    let h = hamiltonian::build_hamiltonian(&spec)?;
    let r = hamiltonian::lowest_spectrum_with(&h, args.k, &opts)?;
    let mut table = Table::new(&["index", "eigenvalue", "residual"]);
    for (i, (e, res)) in r.lowest_eigenvalues.iter().zip(&r.residual_norms).enumerate() {
        table.push(vec![i.into(), (*e).into(), (*res).into()]);
    }
    let summary = vec![format!("ground degeneracy {} (dimension {})", r.ground_degeneracy, spec.dim())];
    Ok(Output { table, summary })
}

#[derive(Debug, Args)]
pub struct GapArgs {
    #[arg(long, value_parser = colors)]
    pub s: u32,
    /// Chain lengths 2n.
    #[arg(long, value_delimiter = ',', required = true, value_parser = even_length)]
    pub sizes: Vec<usize>,
    #[arg(long, value_enum, default_value = "motzkin")]
    pub boundary: BoundaryArg,
    #[arg(long, default_value_t = 0.0)]
    pub eps0: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

pub fn gap(args: &GapArgs, settings: Settings) -> Result<Output> {
    let specs =
        args.sizes.iter().map(|&l| chain_spec(l, args.s, args.boundary, args.eps0)).collect::<Result<Vec<_>>>()?;
    let scan = hamiltonian::gap_scan(&specs, &eigen_options(args.tol, settings)?)?;
    let mut table = Table::new(&["two_n", "s", "lambda1", "lambda2", "gap", "residual_max"]);
    for r in &scan.rows {
        table.push(vec![
            r.two_n.into(),
            r.s.into(),
            r.lambda1.into(),
            r.lambda2.into(),
            r.gap.into(),
            r.residual_max.into(),
        ]);
    }
    let summary = vec![match scan.fit {
        Some(fit) => format!(
            "fitted gap exponent {:.4} ± {:.4} (gap ~ (2n)^-exponent)",
            -fit.slope, fit.slope_stderr
        ),
        None => "fitted gap exponent unavailable (needs two sizes with positive gap)".into(),
    }];
    Ok(Output { table, summary })
}

#[derive(Debug, Args)]
pub struct ClassesArgs {
    #[arg(long, value_parser = even_length)]
    pub two_n: usize,
    #[arg(long, value_parser = colors)]
    pub s: u32,
    /// Close the chain into a ring.
    #[arg(long)]
    pub periodic: bool,
}

pub fn classes(args: &ClassesArgs) -> Result<Output> {
    let MoveClasses { classes, .. } = hamiltonian::local_move_classes(args.two_n, args.s, args.periodic)?;
    let mut table = Table::new(&["id", "size", "representative", "representative_walk", "p", "q"]);
    for c in &classes {
        let walk = walks::encode_walk(&Walk::from_basis_index(c.representative, args.two_n, args.s));
        table.push(vec![
            c.id.into(),
            c.size.into(),
            c.representative.into(),
            walk.into(),
            c.excess.map(|e| e.0).into(),
            c.excess.map(|e| e.1).into(),
        ]);
    }
    let summary = vec![format!("{} classes", classes.len())];
    Ok(Output { table, summary })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MarkovReport {
    Gap,
    EdgeLoad,
}

#[derive(Debug, Args)]
pub struct MarkovArgs {
    #[arg(long, value_parser = even_length)]
    pub two_n: usize,
    #[arg(long, value_parser = colors)]
    pub s: u32,
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["gap", "edge-load"])]
    pub report: Vec<MarkovReport>,
}

pub fn markov(args: &MarkovArgs) -> Result<Output> {
    let heff = markov::build_heff(args.two_n, args.s)?;
    let p = markov::transition_matrix(&heff)?;
    let lambda2 = p.lambda2_nonsymmetric()?;
    let mut table = Table::new(&[
        "two_n",
        "s",
        "dim",
        "lambda2",
        "gap_true",
        "heff_gap",
        "heff_gap_from_p",
        "rho",
        "L",
        "gap_bound",
    ]);
    let (mut heff_gap, mut from_p) = (Cell::Empty, Cell::Empty);
    if args.report.contains(&MarkovReport::Gap) {
        heff_gap = heff.gap()?.into();
        from_p = (heff.scale() * (1.0 - lambda2)).into();
    }
    let (mut rho, mut path_length, mut bound) = (Cell::Empty, Cell::Empty, Cell::Empty);
    if args.report.contains(&MarkovReport::EdgeLoad) {
        let tree = markov::build_canonical_tree(args.two_n / 2, args.s)?;
        let load = markov::edge_load(&tree, &p)?;
        (rho, path_length, bound) = (load.rho.into(), load.path_length.into(), load.gap_bound.into());
    }
    table.push(vec![
        args.two_n.into(),
        args.s.into(),
        heff.basis.len().into(),
        lambda2.into(),
        (1.0 - lambda2).into(),
        heff_gap,
        from_p,
        rho,
        path_length,
        bound,
    ]);
    Ok(table.into())
}

#[derive(Debug, Args)]
#[group(skip)]
#[command(group(ArgGroup::new("mode").required(true).multiple(false)))]
pub struct ExcursionArgs {
    /// Tabulate the area density on --grid.
    #[arg(long, group = "mode", requires = "grid")]
    pub density: bool,
    /// Grid `start:end:points`, inclusive.
    #[arg(long, value_parser = grid)]
    pub grid: Option<Grid>,
    /// Exact energy and overlap of the phase-twisted trial state, plus the variational gap bound.
    #[arg(long, group = "mode", requires = "two_n")]
    pub trial: bool,
    #[arg(long, value_parser = even_length)]
    pub two_n: Option<usize>,
    #[arg(long, value_parser = colors, default_value_t = 1)]
    pub s: u32,
    /// Moments `E[B^k]` for k = 0..=K: exact recursion, quadrature of the density and the
    /// large-order form.
    #[arg(long, group = "mode", value_name = "K")]
    pub moments: Option<usize>,
}

pub fn excursion(args: &ExcursionArgs) -> Result<Output> {
    if args.density {
        let g = args.grid.expect("clap requires --grid with --density");
        let mut table = Table::new(&["x", "f_A"]);
        for (x, f) in ExcursionDensity::standard().tabulate(g.start, g.end, g.points)? {
            table.push(vec![x.into(), f.into()]);
        }
        return Ok(table.into());
    }
    if let Some(k_max) = args.moments {
        let exact = excursion::excursion_moments(k_max)?;
        let density = ExcursionDensity::standard();
        let mut table = Table::new(&["k", "exact", "quadrature", "asymptotic"]);
        for (k, e) in exact.iter().enumerate() {
            let quad = density.moment(k as i32);
            let asym = if k == 0 { Cell::Empty } else { excursion::moment_asymptotic(k).into() };
            table.push(vec![k.into(), (*e).into(), quad.into(), asym]);
        }
        return Ok(table.into());
    }
    let two_n = args.two_n.expect("clap requires --two-n with --trial");
    let t = excursion::trial_energy_exact(two_n, args.s, excursion::trial_twist(two_n))?;
    let mut summary = Vec::new();
    let bound = match excursion::variational_gap_bound(two_n, args.s) {
        Ok(b) => Some(b),
        Err(e @ Error::OverlapTooLarge { .. }) => {
            summary.push(format!("no variational bound: {e}"));
            None
        }
        Err(e) => return Err(e),
    };
    let mut table = Table::new(&[
        "two_n",
        "s",
        "twist",
        "overlap_re",
        "overlap_im",
        "overlap_sq",
        "energy",
        "bound_twist_factor",
        "bound",
        "sharp_bound",
    ]);
    table.push(vec![
        t.two_n.into(),
        t.s.into(),
        t.twist.into(),
        t.overlap.re.into(),
        t.overlap.im.into(),
        t.overlap_sq().into(),
        t.energy.into(),
        bound.map(|b| b.twist_factor).into(),
        bound.map(|b| b.bound).into(),
        bound.map(|b| b.sharp_bound).into(),
    ]);
    Ok(Output { table, summary })
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    /// Half-chain length; the chain has 2n sites.
    #[arg(long, value_parser = positive)]
    pub n: usize,
    #[arg(long, value_parser = colors)]
    pub s: u32,
    #[arg(long)]
    pub eps0: f64,
    /// Highest number of unmatched steps m to tabulate.
    #[arg(long, default_value_t = 10)]
    pub m_max: usize,
}

pub fn field(args: &FieldArgs) -> Result<Output> {
    let report = field::field_energies(args.n, args.s, args.eps0, args.m_max)?;
    let mut table = Table::new(&["m", "exact_expectation", "asymptotic", "delta_E"]);
    for l in &report.levels {
        table.push(vec![l.m.into(), l.exact_expectation.into(), l.asymptotic.into(), l.delta_e.into()]);
    }
    let summary = vec![format!("leading-order ground energy {}", crate::table::format_float(report.ground_energy))];
    Ok(Output { table, summary })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureTag {
    /// Exact and asymptotic entropy for one color.
    #[value(name = "entropy_s1")]
    EntropyS1,
    /// Exact and asymptotic entropy for s = 2..=5.
    #[value(name = "entropy_grid")]
    EntropyGrid,
    /// Exact over asymptotic entropy for s = 1..=5.
    #[value(name = "ratio")]
    Ratio,
    /// Area density on [0.01, 1] in steps of 0.01.
    #[value(name = "fa_density")]
    FaDensity,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(long, value_enum)]
    pub tag: FigureTag,
}

/// Half-chain lengths `round(10^{k/8})`, k = 0..=32, without repeats: 1 to 10⁴ evenly in log n.
pub fn figure_n_grid() -> Vec<usize> {
    let mut ns: Vec<usize> = (0..=32).map(|k| 10f64.powf(f64::from(k) / 8.0).round() as usize).collect();
    ns.dedup();
    ns
}

pub fn reproduce(args: &ReproduceArgs) -> Result<Output> {
    let ns = figure_n_grid();
    let table = match args.tag {
        FigureTag::EntropyS1 => {
            let mut t = Table::new(&ENTROPY_COLUMNS);
            entropy_rows(&mut t, &ns, 1)?;
            t
        }
        FigureTag::EntropyGrid => {
            let mut t = Table::new(&ENTROPY_COLUMNS);
            for s in 2..=5 {
                entropy_rows(&mut t, &ns, s)?;
            }
            t
        }
        FigureTag::Ratio => {
            let mut t = Table::new(&["n", "s", "ratio"]);
            for s in 1..=5 {
                for &n in &ns {
                    let r = schmidt::entropy_report(n, s)?;
                    t.push(vec![n.into(), s.into(), r.ratio.into()]);
                }
            }
            t
        }
        FigureTag::FaDensity => {
            let mut t = Table::new(&["x", "f_A"]);
            for (x, f) in ExcursionDensity::standard().tabulate(0.01, 1.0, 100)? {
                t.push(vec![x.into(), f.into()]);
            }
            t
        }
    };
    Ok(table.into())
}
