use crate::output::{write_table, Table};
use crate::{Cli, CliError, Command};
use clap::{Args, Subcommand, ValueEnum};
use serde::Serialize;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use weyl_core::analysis::{self, SeriesKind};
use weyl_core::expsum;
use weyl_core::geometry;
use weyl_core::lattice;
use weyl_core::oscillatory;
use weyl_core::spectral;
use weyl_core::{BoundaryCondition, LatticeShift, ZeroCache, ZeroKind};

type Out = std::result::Result<Table, CliError>;

// ---------------------------------------------------------------- geometry

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeometryCmd {
    /// g, g', g'' and curvature at abscissae t.
    Profile {
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true, allow_negative_numbers = true)]
        t: Vec<f64>,
    },
    /// Contact point, curvature, support value and Hessian of H for a direction.
    Gauss {
        #[arg(long)]
        xi1: f64,
        #[arg(long)]
        xi2: f64,
    },
    /// The cone function F(t, s).
    Cone {
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long)]
        s: f64,
    },
}

fn geometry(cmd: &GeometryCmd) -> Out {
    match cmd {
        GeometryCmd::Profile { t } => {
            let mut table = Table::new(&["t", "g", "gp", "gpp", "kappa"]);
            for &t in t {
                let p = geometry::profile(t)?;
                table.push(vec![p.t.into(), p.g.into(), p.gp.into(), p.gpp.into(), p.kappa.into()]);
            }
            Ok(table)
        }
        GeometryCmd::Gauss { xi1, xi2 } => {
            let d = geometry::gauss_inverse(*xi1, *xi2)?;
            let (small, big) = match geometry::hessian_h(&d) {
                Ok(h) => (h.lambda_small, h.lambda_big),
                Err(_) => (f64::NAN, f64::NAN),
            };
            let mut table =
                Table::new(&["xi1", "xi2", "t_contact", "x1", "x2", "curvature", "h", "hess_small", "hess_big"]);
            table.push(vec![
                d.xi1.into(),
                d.xi2.into(),
                d.t_contact.into(),
                d.x_contact[0].into(),
                d.x_contact[1].into(),
                d.k.into(),
                d.h.into(),
                small.into(),
                big.into(),
            ]);
            Ok(table)
        }
        GeometryCmd::Cone { t, s } => {
            let p = geometry::cone_point(*t, *s)?;
            let mut table = Table::new(&["t", "s", "f"]);
            table.push(vec![p.t.into(), p.s.into(), p.f.into()]);
            Ok(table)
        }
    }
}

// ---------------------------------------------------------------- bessel

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
pub enum KindArg {
    #[value(name = "J")]
    J,
    #[value(name = "JP")]
    JP,
}

impl From<KindArg> for ZeroKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::J => ZeroKind::J,
            KindArg::JP => ZeroKind::JPrime,
        }
    }
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BesselCmd {
    /// Zero k of order n.
    Zero {
        #[arg(long)]
        n: u32,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        k: Vec<u32>,
        #[arg(long, value_enum, default_value_t = KindArg::J)]
        kind: KindArg,
    },
    /// Number of zeros of order n below mu.
    Count {
        #[arg(long)]
        n: u32,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        mu: Vec<f64>,
        #[arg(long, value_enum, default_value_t = KindArg::J)]
        kind: KindArg,
    },
    /// All zeros below mu, every order.
    Zeros {
        #[arg(long)]
        mu: f64,
        #[arg(long, value_enum, default_value_t = KindArg::J)]
        kind: KindArg,
    },
    /// Residual and interlacing check of the cached zeros.
    Verify,
}

fn bessel(cmd: &BesselCmd, cache: &ZeroCache) -> Out {
    match cmd {
        BesselCmd::Zero { n, k, kind } => {
            let mut table = Table::new(&["n", "k", "kind", "value", "residual"]);
            for &k in k {
                let z = cache.zero(*n, k, (*kind).into())?;
                table.push(vec![z.n.into(), z.k.into(), z.kind.tag().into(), z.value.into(), z.residual.into()]);
            }
            Ok(table)
        }
        BesselCmd::Count { n, mu, kind } => {
            let mut table = Table::new(&["n", "mu", "kind", "count"]);
            let kind: ZeroKind = (*kind).into();
            for &mu in mu {
                let c = cache.count_zeros_below(*n, mu, kind)?;
                table.push(vec![(*n).into(), mu.into(), kind.tag().into(), c.into()]);
            }
            Ok(table)
        }
        BesselCmd::Zeros { mu, kind } => {
            let kind: ZeroKind = (*kind).into();
            if !(*mu > 0.0) || *mu > spectral::MAX_MU {
                return Err(CliError::Usage(format!("--mu must lie in (0, {}]", spectral::MAX_MU)));
            }
            let mut table = Table::new(&["n", "k", "kind", "value"]);
            for n in 0..mu.ceil() as u32 {
                for (i, z) in cache.zeros_below(n, *mu, kind)?.into_iter().enumerate() {
                    table.push(vec![n.into(), (i + 1).into(), kind.tag().into(), z.into()]);
                }
            }
            Ok(table)
        }
        BesselCmd::Verify => {
            let mut table = Table::new(&["kind", "entries", "max_residual", "interlacing_violations"]);
            for kind in [ZeroKind::J, ZeroKind::JPrime] {
                let entries = cache.entries(kind)?;
                let max = entries.iter().map(|z| z.residual).fold(0.0, f64::max);
                let bad = cache.interlacing_violations(kind).len();
                table.push(vec![kind.tag().into(), entries.len().into(), max.into(), bad.into()]);
            }
            Ok(table)
        }
    }
}

// ---------------------------------------------------------------- lattice

#[derive(Debug, Args, Serialize)]
pub struct ShiftArgs {
    /// Horizontal shift a.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub a: f64,
    /// Vertical shift b.
    #[arg(long, default_value_t = -0.25, allow_negative_numbers = true)]
    pub b: f64,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeCmd {
    /// Points of Z^2 + (a, b) in mu * Omega, with the remainders.
    Count {
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        mu: Vec<f64>,
        #[command(flatten)]
        #[serde(flatten)]
        shift: ShiftArgs,
        /// Use the O(mu^2) oracle instead of the column algorithm.
        #[arg(long)]
        bruteforce: bool,
    },
}

fn lattice(cmd: &LatticeCmd) -> Out {
    let LatticeCmd::Count { mu, shift, bruteforce } = cmd;
    let shift = LatticeShift::new(shift.a, shift.b);
    let mut table = Table::new(&["mu", "count", "area_term", "remainder", "Q"]);
    for &mu in mu {
        let count = if *bruteforce { lattice::count_bruteforce(mu, shift)? } else { lattice::count(mu, shift)? };
        let r = weyl_core::CountRecord::new(mu, count);
        table.push(vec![r.mu.into(), r.count.into(), r.area_term.into(), r.remainder.into(), r.q.into()]);
    }
    Ok(table)
}

// ---------------------------------------------------------------- spectral

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BcArg {
    Dirichlet,
    Neumann,
}

impl From<BcArg> for BoundaryCondition {
    fn from(b: BcArg) -> Self {
        match b {
            BcArg::Dirichlet => BoundaryCondition::Dirichlet,
            BcArg::Neumann => BoundaryCondition::Neumann,
        }
    }
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralCmd {
    /// Eigenvalue count with multiplicity and the two-term remainder.
    Count {
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        mu: Vec<f64>,
        #[arg(long, value_enum, default_value_t = BcArg::Dirichlet)]
        bc: BcArg,
    },
    /// j_{n,k} - F(n, k - 1/4) inside the validity cone.
    StaGap {
        #[arg(long)]
        n: u32,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        k: Vec<u32>,
    },
}

fn spectral_cmd(cmd: &SpectralCmd, cache: &ZeroCache) -> Out {
    match cmd {
        SpectralCmd::Count { mu, bc } => {
            let mut table = Table::new(&["mu", "count", "area_term", "boundary_term", "remainder"]);
            for &mu in mu {
                let r = spectral::weyl_remainder_with(cache, mu, (*bc).into())?;
                table.push(vec![r.mu.into(), r.count.into(), r.area_term.into(), r.boundary_term.into(), r.remainder.into()]);
            }
            Ok(table)
        }
        SpectralCmd::StaGap { n, k } => {
            let mut table = Table::new(&["n", "k", "gap"]);
            for &k in k {
                table.push(vec![(*n).into(), k.into(), spectral::sta_gap_with(cache, *n, k)?.into()]);
            }
            Ok(table)
        }
    }
}

// ---------------------------------------------------------------- oscillatory

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OscillatoryCmd {
    /// I(mu, xi) by quadrature against its stationary-phase prediction.
    Eval {
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        mu: Vec<f64>,
        #[arg(long)]
        xi1: f64,
        #[arg(long)]
        xi2: f64,
    },
    /// |I| along a log grid for the direction with contact angle theta.
    Regime {
        #[arg(long, default_value_t = 0.01 * std::f64::consts::PI)]
        theta: f64,
        #[arg(long, default_value_t = 10.0)]
        mu_min: f64,
        #[arg(long, default_value_t = 1e5)]
        mu_max: f64,
        #[arg(long, default_value_t = 40)]
        points: usize,
    },
    /// Truncated mollified Poisson sum.
    Poisson {
        #[arg(long)]
        mu: f64,
        /// Mollifier scale (default mu^{-1/2}).
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "10")]
        cutoff: Vec<f64>,
    },
}

fn log_grid(lo: f64, hi: f64, points: usize) -> std::result::Result<Vec<f64>, CliError> {
    if !(lo > 0.0 && hi >= lo) || points == 0 {
        return Err(CliError::Usage("need 0 < mu-min <= mu-max and points >= 1".into()));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..points).map(|i| lo * (hi / lo).powf(i as f64 / (points - 1) as f64)).collect())
}

fn lin_grid(lo: f64, hi: f64, points: usize) -> std::result::Result<Vec<f64>, CliError> {
    if !(hi >= lo) || points == 0 {
        return Err(CliError::Usage("need mu-min <= mu-max and points >= 1".into()));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect())
}

fn oscillatory_cmd(cmd: &OscillatoryCmd) -> Out {
    match cmd {
        OscillatoryCmd::Eval { mu, xi1, xi2 } => {
            let d = geometry::gauss_inverse(*xi1, *xi2)?;
            let mut table = Table::new(&["mu", "xi1", "xi2", "re", "im", "abs", "pred_abs", "ratio"]);
            for &mu in mu {
                let r = oscillatory::i_eval(mu, [*xi1, *xi2])?;
                let pred = oscillatory::stationary_prediction(mu, &d).map(|p| p.leading.norm()).unwrap_or(f64::NAN);
                let abs = r.value.norm();
                table.push(vec![
                    mu.into(),
                    (*xi1).into(),
                    (*xi2).into(),
                    r.value.re.into(),
                    r.value.im.into(),
                    abs.into(),
                    pred.into(),
                    (abs / pred).into(),
                ]);
            }
            Ok(table)
        }
        OscillatoryCmd::Regime { theta, mu_min, mu_max, points } => {
            let d = oscillatory::direction_at_angle(*theta)?;
            let t = oscillatory::regime_check(&d, &log_grid(*mu_min, *mu_max, *points)?)?;
            let mut table = Table::new(&["mu", "abs", "bound_small", "bound_large", "curvature", "k_cubed"]);
            for r in &t.rows {
                table.push(vec![r.mu.into(), r.abs_i.into(), r.bound_small.into(), r.bound_large.into(), t.k.into(), t.k_cubed.into()]);
            }
            Ok(table)
        }
        OscillatoryCmd::Poisson { mu, eps, cutoff } => {
            let eps = eps.unwrap_or(1.0 / mu.sqrt());
            let mut table = Table::new(&["mu", "eps", "cutoff", "sum"]);
            for &c in cutoff {
                table.push(vec![(*mu).into(), eps.into(), c.into(), oscillatory::poisson_sum_partial(*mu, eps, c)?.into()]);
            }
            Ok(table)
        }
    }
}

// ---------------------------------------------------------------- expsum

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameArg {
    /// Differencing along (1,0), (0,1); h_q in the frame (-xi2, xi1), (xi1, xi2).
    Axis,
    /// Differencing along (1,1), (1,-1); h_q in the integer frame of the basis construction.
    Diagonal,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpsumCmd {
    /// S(T, M) for the reference pair.
    Sum {
        #[arg(long = "t", value_delimiter = ',', num_args = 1.., required = true)]
        t: Vec<f64>,
        #[arg(long = "m")]
        m: f64,
    },
    /// Both sides of the differencing inequality.
    Wvdc {
        #[arg(long, default_value_t = 1)]
        q: usize,
        #[arg(long = "m", default_value_t = 50.0)]
        m: f64,
        #[arg(long = "t", value_delimiter = ',', num_args = 1.., required = true)]
        t: Vec<f64>,
        #[arg(long = "h", default_value_t = 8.0)]
        h: f64,
        #[arg(long, value_enum, default_value_t = FrameArg::Axis)]
        frame: FrameArg,
    },
    /// The determinant h_q at a direction.
    Hq {
        #[arg(long, default_value_t = 1)]
        q: u32,
        #[arg(long)]
        xi1: f64,
        #[arg(long)]
        xi2: f64,
        #[arg(long, value_enum, default_value_t = FrameArg::Axis)]
        frame: FrameArg,
        /// Constant A of the integer frame.
        #[arg(long, default_value_t = 3.0)]
        a: f64,
    },
}

fn expsum_cmd(cmd: &ExpsumCmd) -> Out {
    match cmd {
        ExpsumCmd::Sum { t, m } => {
            let pair = expsum::reference_pair::<f64>();
            let mut table = Table::new(&["T", "M", "re", "im", "abs"]);
            for &t in t {
                let s = expsum::s_eval(t, *m, &pair)?;
                table.push(vec![t.into(), (*m).into(), s.re.into(), s.im.into(), s.norm().into()]);
            }
            Ok(table)
        }
        ExpsumCmd::Wvdc { q, m, t, h, frame } => {
            let rs: Vec<[i32; 2]> = match frame {
                FrameArg::Axis => vec![[1, 0], [0, 1]],
                FrameArg::Diagonal => vec![[1, 1], [1, -1]],
            };
            if !(1..=2).contains(q) {
                return Err(CliError::Usage("--q must be 1 or 2".into()));
            }
            let pair = expsum::reference_pair::<f64>();
            let mut table = Table::new(&["q", "M", "T", "H", "lhs", "rhs_no_const", "ratio", "terms"]);
            for &t in t {
                let r = expsum::wvdc_check(&pair, &rs[..*q], *h, t, *m)?;
                table.push(vec![
                    (*q).into(),
                    (*m).into(),
                    t.into(),
                    (*h).into(),
                    r.lhs.into(),
                    r.rhs_no_const.into(),
                    r.ratio.into(),
                    r.terms.into(),
                ]);
            }
            Ok(table)
        }
        ExpsumCmd::Hq { q, xi1, xi2, frame, a } => {
            let d = geometry::gauss_inverse(*xi1, *xi2)?.unit();
            let (v1, v2, expected) = match frame {
                FrameArg::Axis => {
                    let (v1, v2) = expsum::reference_frame(&d);
                    let fact: f64 = (1..=*q).map(f64::from).product();
                    (v1, v2, -fact * fact / (d.k * d.k))
                }
                FrameArg::Diagonal => {
                    let f = expsum::basis_choice(&d, *q, *a)?;
                    let v = |p: [i64; 2]| [p[0] as f64, p[1] as f64];
                    (v(f.v1), v(f.v2), f64::NAN)
                }
            };
            let r = expsum::hq_det(*q, &d, v1, v2)?;
            let mut table =
                Table::new(&["q", "xi1", "xi2", "v1_1", "v1_2", "v2_1", "v2_2", "curvature", "value", "est_error", "frame_identity"]);
            table.push(vec![
                (*q).into(),
                d.xi1.into(),
                d.xi2.into(),
                v1[0].into(),
                v1[1].into(),
                v2[0].into(),
                v2[1].into(),
                d.k.into(),
                r.value.into(),
                r.est_error.into(),
                expected.into(),
            ]);
            Ok(table)
        }
    }
}

// ---------------------------------------------------------------- experiment

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesArg {
    Lattice,
    Spectral,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    /// Walk every jump (exact suprema).
    Exact,
    /// Random points plus jump brackets (uses --seed).
    Sampled,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentCmd {
    /// Dyadic-sup exponent fit of a remainder series.
    Exponent {
        #[arg(long, value_enum, default_value_t = SeriesArg::Lattice)]
        kind: SeriesArg,
        #[arg(long, default_value_t = 6)]
        j_lo: i32,
        #[arg(long, default_value_t = 14)]
        j_hi: i32,
        #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
        method: MethodArg,
        #[arg(long, default_value_t = 1000)]
        n_random: usize,
        #[arg(long, value_enum, default_value_t = BcArg::Dirichlet)]
        bc: BcArg,
    },
    /// Window average (1/mu) int_mu^{2mu} R of the disk remainder.
    Ept {
        #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "250,500,1000,2000")]
        mu: Vec<f64>,
    },
    /// Disk count against the lattice count with the window bound.
    Compare {
        #[arg(long, default_value_t = 10.0)]
        mu_min: f64,
        #[arg(long, default_value_t = 200.0)]
        mu_max: f64,
        #[arg(long, default_value_t = 60)]
        points: usize,
        #[arg(long, default_value_t = spectral::COMPARE_C)]
        c: f64,
        #[arg(long, default_value_t = spectral::COMPARE_C_PRIME)]
        c_prime: f64,
    },
    /// Q(mu) and Q(mu)/mu^{2/3} on a log grid.
    Theorem12 {
        #[arg(long, default_value_t = 64.0)]
        mu_min: f64,
        #[arg(long, default_value_t = 16384.0)]
        mu_max: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
}

fn experiment(cmd: &ExperimentCmd, cache: &ZeroCache, seed: u64) -> Out {
    match cmd {
        ExperimentCmd::Exponent { kind, j_lo, j_hi, method, n_random, bc } => {
            let bc: BoundaryCondition = (*bc).into();
            let fit = match (method, kind) {
                (MethodArg::Exact, SeriesArg::Lattice) => analysis::lattice_dyadic_exact(*j_lo, *j_hi)?,
                (MethodArg::Exact, SeriesArg::Spectral) => analysis::spectral_dyadic_exact(cache, bc, *j_lo, *j_hi)?,
                (MethodArg::Sampled, _) => {
                    let k = match kind {
                        SeriesArg::Lattice => SeriesKind::LatticeQ,
                        SeriesArg::Spectral => SeriesKind::SpectralR,
                    };
                    let (lo, hi) = (2f64.powi(*j_lo), 2f64.powi(*j_hi));
                    let s = analysis::sample_series_with(cache, k, bc, lo, hi, *n_random, seed)?;
                    analysis::dyadic_fit(&s)?
                }
            };
            let name = match kind {
                SeriesArg::Lattice => SeriesKind::LatticeQ.name(),
                SeriesArg::Spectral => SeriesKind::SpectralR.name(),
            };
            let mut table = Table::new(&["kind", "lo", "hi", "sup_abs", "rms", "slope", "intercept", "r2", "rms_slope"]);
            for w in &fit.windows {
                table.push(vec![
                    name.into(),
                    w.lo.into(),
                    w.hi.into(),
                    w.sup_abs.into(),
                    w.rms.into(),
                    fit.slope.into(),
                    fit.intercept.into(),
                    fit.r2.into(),
                    fit.rms_slope.into(),
                ]);
            }
            Ok(table)
        }
        ExperimentCmd::Ept { mu } => {
            let values: Vec<(f64, f64)> =
                mu.iter().map(|&m| Ok((m, analysis::ept_average_with(cache, m)?))).collect::<std::result::Result<_, CliError>>()?;
            let slope = if values.len() >= 2 { analysis::loglog_slope(&values)? } else { f64::NAN };
            let mut table = Table::new(&["mu", "ept_average", "loglog_slope"]);
            for (m, v) in values {
                table.push(vec![m.into(), v.into(), slope.into()]);
            }
            Ok(table)
        }
        ExperimentCmd::Compare { mu_min, mu_max, points, c, c_prime } => {
            let mut table = Table::new(&["mu", "eig_count", "lattice_count", "diff", "bound", "holds"]);
            for mu in lin_grid(*mu_min, *mu_max, *points)? {
                let r = spectral::compare_counts_with(cache, mu, *c, *c_prime)?;
                table.push(vec![r.mu.into(), r.eig_count.into(), r.lattice_count.into(), r.diff.into(), r.bound.into(), r.holds().into()]);
            }
            Ok(table)
        }
        ExperimentCmd::Theorem12 { mu_min, mu_max, points } => {
            let rows = analysis::theorem12_residual(&log_grid(*mu_min, *mu_max, *points)?)?;
            let mut table = Table::new(&["mu", "Q", "normalized"]);
            for r in rows {
                table.push(vec![r.mu.into(), r.q.into(), r.normalized.into()]);
            }
            Ok(table)
        }
    }
}

// ---------------------------------------------------------------- driver

fn uses_cache(cmd: &Command) -> bool {
    match cmd {
        Command::Bessel(_) | Command::Spectral(_) => true,
        Command::Experiment(e) => !matches!(
            e,
            ExperimentCmd::Theorem12 { .. } | ExperimentCmd::Exponent { kind: SeriesArg::Lattice, .. }
        ),
        _ => false,
    }
}

/// `{"lattice": {"count": {...}}}` (or `{"bessel": "verify"}`) as
/// `("lattice", "count", {...})`.
fn split_command(cmd: &Command) -> (String, String, serde_json::Value) {
    let empty = || serde_json::Value::Object(Default::default());
    let serde_json::Value::Object(outer) = serde_json::to_value(cmd).expect("serializable arguments") else {
        unreachable!("commands serialize as tagged objects")
    };
    let (command, inner) = outer.into_iter().next().expect("one command");
    match inner {
        serde_json::Value::String(sub) => (command, sub, empty()),
        serde_json::Value::Object(m) => {
            let (sub, flags) = m.into_iter().next().expect("one subcommand");
            let flags = if flags.is_null() { empty() } else { flags };
            (command, sub, flags)
        }
        other => (command, String::new(), other),
    }
}

pub fn run(cli: &Cli) -> std::result::Result<(), CliError> {
    let g = &cli.global;
    if let Some(n) = g.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let cache_dir: PathBuf = g.cache_dir.clone().unwrap_or_else(ZeroCache::default_dir);
    let (command, subcommand, flags) = split_command(&cli.command);
    let config = serde_json::json!({
        "command": command,
        "subcommand": subcommand,
        "flags": flags,
        "seed": g.seed,
        "cache_dir": cache_dir.display().to_string(),
        "output": &g.output,
        "format": g.format,
        "threads": g.threads,
        "version": env!("CARGO_PKG_VERSION"),
    });
    let cache = if uses_cache(&cli.command) {
        ZeroCache::open(&cache_dir)?
    } else {
        ZeroCache::in_memory()
    };
    let table = match &cli.command {
        Command::Geometry(c) => geometry(c),
        Command::Bessel(c) => bessel(c, &cache),
        Command::Lattice(c) => lattice(c),
        Command::Spectral(c) => spectral_cmd(c, &cache),
        Command::Oscillatory(c) => oscillatory_cmd(c),
        Command::Expsum(c) => expsum_cmd(c),
        Command::Experiment(c) => experiment(c, &cache, g.seed),
    };
    // keep whatever was computed, even when the command failed later on
    cache.save()?;
    let table = table?;
    if g.output == "-" {
        let stdout = io::stdout();
        let mut w = BufWriter::new(stdout.lock());
        write_table(&mut w, g.format, &config, &table)?;
        w.flush()?;
    } else {
        let mut w = BufWriter::new(fs::File::create(&g.output)?);
        write_table(&mut w, g.format, &config, &table)?;
        w.flush()?;
    }
    Ok(())
}
