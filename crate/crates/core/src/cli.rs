//! The `stein-approx` command-line front end.
//!
//! Every subcommand renders into an [`Outcome`] so the binary only has to
//! print and exit; tests drive [`run`] directly or through the binary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bounds::{
    component_moments, match_parameters, poisson_bound_with, poisson_geometric_bound_with,
    vu_bound, BoundConfig, BoundReport, VuLambda,
};
use crate::error::{Error, Result};
use crate::gcoeff::{g_stream, two_runs_pmf_binomial_sums, DEFAULT_SERIES_TOL};
use crate::pmf::{
    convolve, convolve_n, materialize, tv_distance, ComponentFamily, TruncatedPmf, DEFAULT_TAIL_TOL,
};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Failure = 1,
    Usage = 2,
    Precondition = 3,
    Certification = 4,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// Rendered output of a subcommand and the status to exit with.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub output: String,
    pub status: ExitStatus,
}

impl Outcome {
    fn new(output: String, status: ExitStatus) -> Self {
        Outcome { output, status }
    }
}

/// Exit status for an error escaping a subcommand.
pub fn error_status(e: &Error) -> ExitStatus {
    match e {
        Error::InvalidParameter { .. }
        | Error::ZeroAtOrigin
        | Error::NoClosedForm
        | Error::EmptyComponents => ExitStatus::Usage,
        Error::NegativeProbability { .. }
        | Error::TruncationFailed { .. }
        | Error::Divergent { .. }
        | Error::UnderDispersion { .. }
        | Error::Precondition(_) => ExitStatus::Precondition,
        Error::Io(_) => ExitStatus::Failure,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "stein-approx",
    version,
    about = "Poisson and Poisson-geometric approximation bounds for sums of independent integer random variables"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the Poisson and/or Poisson-geometric bound for a sum.
    Bound(BoundArgs),
    /// Reproduce the comparison table for sums of negative binomials.
    Table1(Table1Args),
    /// Bounds for the shifted 2-run waiting times.
    TwoRuns(TwoRunsArgs),
    /// Compare a bound with the exact total variation distance.
    Certify(CertifyArgs),
    /// Write exact and approximating PMFs for the comparison panels as CSV.
    Figures(FiguresArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Poisson,
    Pg,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CertifyTarget {
    Poisson,
    Pg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VuLambdaArg {
    PerComponent,
    Total,
}

impl From<VuLambdaArg> for VuLambda {
    fn from(v: VuLambdaArg) -> Self {
        match v {
            VuLambdaArg::PerComponent => VuLambda::PerComponent,
            VuLambdaArg::Total => VuLambda::Total,
        }
    }
}

fn parse_component(s: &str) -> std::result::Result<ComponentFamily, String> {
    let family: ComponentFamily = s.parse().map_err(|e: Error| e.to_string())?;
    family.validate().map_err(|e| e.to_string())?;
    Ok(family)
}

fn parse_tail_tol(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} must lie in (0, 1)"))
    }
}

fn parse_open_unit(s: &str) -> std::result::Result<f64, String> {
    parse_tail_tol(s)
}

/// Component list shared by `bound` and `certify`.
#[derive(Debug, Clone, Args)]
pub struct ComponentArgs {
    /// Component spec `family:param[:param]`, e.g. `nb:5:0.9`; repeatable.
    #[arg(long = "comp", required = true, value_parser = parse_component)]
    pub comps: Vec<ComponentFamily>,
    /// Repeat the last component so it appears this many times.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub count: Option<u32>,
    /// Truncation tolerance for materialized PMFs.
    #[arg(long, default_value_t = DEFAULT_TAIL_TOL, value_parser = parse_tail_tol)]
    pub tail_tol: f64,
}

impl ComponentArgs {
    pub fn components(&self) -> Vec<ComponentFamily> {
        let mut out = self.comps.clone();
        if let (Some(k), Some(last)) = (self.count, self.comps.last()) {
            out.extend(std::iter::repeat_n(last.clone(), k as usize - 1));
        }
        out
    }

    fn config(&self) -> BoundConfig {
        BoundConfig {
            tail_tol: self.tail_tol,
            series_tol: DEFAULT_SERIES_TOL,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub components: ComponentArgs,
    #[arg(long, value_enum, default_value_t = Target::Both)]
    pub target: Target,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct Table1Args {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Reading of `λ` in the Vellaisamy–Upadhye bound.
    #[arg(long, value_enum, default_value_t = VuLambdaArg::PerComponent)]
    pub vu_lambda: VuLambdaArg,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TwoRunsArgs {
    /// Success probability of the underlying Bernoulli trials.
    #[arg(long, value_parser = parse_open_unit)]
    pub p: f64,
    /// Number of independent waiting times.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub n: u32,
    /// Also compute the Poisson-geometric bound.
    #[arg(long)]
    pub pg: bool,
    /// Number of series coefficients to print.
    #[arg(long, default_value_t = 6)]
    pub terms: usize,
    #[arg(long, default_value_t = DEFAULT_TAIL_TOL, value_parser = parse_tail_tol)]
    pub tail_tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub components: ComponentArgs,
    #[arg(long, value_enum, default_value_t = CertifyTarget::Poisson)]
    pub target: CertifyTarget,
    /// Maximum number of multiply-adds spent on convolution.
    #[arg(long, default_value_t = 200_000_000)]
    pub budget: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Replace the computed bound (test hook).
    #[arg(long, hide = true)]
    pub inject_bound: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct FiguresArgs {
    #[arg(long, default_value = "figures")]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TAIL_TOL, value_parser = parse_tail_tol)]
    pub tail_tol: f64,
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Bound(a) => cmd_bound(&a),
        Command::Table1(a) => cmd_table1(&a),
        Command::TwoRuns(a) => cmd_two_runs(&a),
        Command::Certify(a) => cmd_certify(&a),
        Command::Figures(a) => cmd_figures(&a),
    }
}

fn deliver(output: String, path: Option<&Path>) -> Result<String> {
    match path {
        Some(path) => {
            fs::write(path, &output)?;
            Ok(format!("wrote {}\n", path.display()))
        }
        None => Ok(output),
    }
}

fn csv_field(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        String::new()
    }
}

fn under_dispersion_note(report: &BoundReport) -> Option<String> {
    let failed = report.failure()?;
    if failed.name != "sigma^2 > mu" {
        return None;
    }
    let mu = report.intermediate("mu")?;
    let sigma2 = report.intermediate("sigma2")?;
    Some(format!(
        "under-dispersion: sigma^2 = {sigma2:.4} <= mu = {mu:.4}; the Poisson-geometric bound needs sigma^2 > mu\n"
    ))
}

pub fn cmd_bound(a: &BoundArgs) -> Result<Outcome> {
    let comps = a.components.components();
    let cfg = a.components.config();
    let mut reports = Vec::new();
    if matches!(a.target, Target::Poisson | Target::Both) {
        reports.push(poisson_bound_with(&comps, &cfg)?);
    }
    if matches!(a.target, Target::Pg | Target::Both) {
        reports.push(poisson_geometric_bound_with(&comps, &cfg)?);
    }
    let status = if reports.iter().all(BoundReport::is_valid) {
        ExitStatus::Success
    } else {
        ExitStatus::Precondition
    };
    let out = match a.format {
        Format::Text => {
            let mut s = String::new();
            for (i, r) in reports.iter().enumerate() {
                if i > 0 {
                    s.push('\n');
                }
                s.push_str(&r.render_text());
                if let Some(note) = under_dispersion_note(r) {
                    s.push_str(&note);
                }
            }
            s
        }
        Format::Json => {
            let mut s = if reports.len() == 1 {
                reports[0].to_json()
            } else {
                serde_json::to_string_pretty(&reports).expect("reports serialize")
            };
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::from("theorem,value,uncertainty,valid\n");
            for r in &reports {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    r.theorem,
                    csv_field(r.value),
                    csv_field(r.uncertainty),
                    r.is_valid()
                );
            }
            s
        }
    };
    Ok(Outcome::new(deliver(out, a.output.as_deref())?, status))
}

/// One row of the negative-binomial comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub n: usize,
    pub q: f64,
    pub poisson: f64,
    pub vellaisamy_upadhye: f64,
}

/// Rows for `n ∈ {10, 30, 50}`, `q ∈ {0.1, 0.2}` and `α = 5`, ordered by
/// `q` then `n`.
pub fn table1_rows(convention: VuLambda) -> Result<Vec<Table1Row>> {
    let alpha = 5.0;
    let mut rows = Vec::new();
    for q in [0.1, 0.2] {
        for n in [10usize, 30, 50] {
            let p = 1.0 - q;
            let comps = vec![ComponentFamily::NegBinomial { alpha, p }; n];
            let poisson = poisson_bound_with(&comps, &BoundConfig::default())?.value;
            let vu = vu_bound(&vec![alpha; n], &vec![p; n], convention)?.value;
            rows.push(Table1Row {
                n,
                q,
                poisson,
                vellaisamy_upadhye: vu,
            });
        }
    }
    Ok(rows)
}

pub fn cmd_table1(a: &Table1Args) -> Result<Outcome> {
    let rows = table1_rows(a.vu_lambda.into())?;
    let out = match a.format {
        Format::Text => {
            let mut s = format!(
                "{:>4} {:>5} {:>10} {:>20}\n",
                "n", "q", "poisson", "vellaisamy_upadhye"
            );
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{:>4} {:>5.1} {:>10.4} {:>20.4}",
                    r.n, r.q, r.poisson, r.vellaisamy_upadhye
                );
            }
            s
        }
        Format::Csv => {
            let mut s = String::from("n,q,poisson,vellaisamy_upadhye\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{:.4},{:.4}",
                    r.n, r.q, r.poisson, r.vellaisamy_upadhye
                );
            }
            s
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&rows).expect("rows serialize");
            s.push('\n');
            s
        }
    };
    Ok(Outcome::new(
        deliver(out, a.output.as_deref())?,
        ExitStatus::Success,
    ))
}

pub fn cmd_two_runs(a: &TwoRunsArgs) -> Result<Outcome> {
    let p = a.p;
    let family = ComponentFamily::TwoRunsV { p };
    family.validate()?;
    let comps = vec![family.clone(); a.n as usize];
    let cfg = BoundConfig {
        tail_tol: a.tail_tol,
        series_tol: DEFAULT_SERIES_TOL,
    };
    let mut s = String::new();
    let _ = writeln!(s, "2-runs: p = {p}, n = {}", a.n);

    let series = two_runs_pmf_binomial_sums(&(p * p), a.terms);
    let g = g_stream(&family, DEFAULT_SERIES_TOL)?;
    let _ = writeln!(s, "{:>4} {:>14} {:>14}", "j", "P(V = j)", "g[j]");
    for (j, pj) in series.iter().enumerate() {
        let gj = g.coeffs().get(j).copied().unwrap_or(0.0);
        let _ = writeln!(s, "{j:>4} {pj:>14.8} {gj:>14.8}");
    }

    let m = component_moments(&comps, &cfg)?;
    let _ = writeln!(s, "mean per component: {:.6}", family.mean());
    let _ = writeln!(s, "mu = {:.6}", m.mu);
    let _ = writeln!(s, "mu2 = {:.6}", m.mu2);
    let _ = writeln!(s, "sigma2 = {:.6}", m.sigma2);

    let mut status = ExitStatus::Success;
    let poisson = match poisson_bound_with(&comps, &cfg) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(s, "bounds unavailable: {e}");
            return Ok(Outcome::new(s, error_status(&e)));
        }
    };
    let _ = writeln!(s, "poisson bound = {:.4}", poisson.value);
    let w = convolve_n(&comps, cfg.tail_tol)?;
    let exact = tv_distance(
        &w,
        &materialize(&ComponentFamily::Poisson { lambda: m.mu }, cfg.tail_tol)?,
    );
    let _ = writeln!(
        s,
        "exact d_TV(W, Po(mu)) = {:.6} (+/- {:.1e}), {}",
        exact.value,
        exact.uncertainty,
        verdict(
            poisson.value,
            poisson.uncertainty,
            exact.value,
            exact.uncertainty
        )
    );

    if a.pg {
        let report = poisson_geometric_bound_with(&comps, &cfg)?;
        if report.is_valid() {
            let _ = writeln!(s, "poisson-geometric bound = {:.4}", report.value);
            let target = pg_law(&report, cfg.tail_tol)?;
            let exact = tv_distance(&w, &target);
            let _ = writeln!(
                s,
                "exact d_TV(W, Po(lambda) * Ge(p)) = {:.6} (+/- {:.1e}), {}",
                exact.value,
                exact.uncertainty,
                verdict(
                    report.value,
                    report.uncertainty,
                    exact.value,
                    exact.uncertainty
                )
            );
        } else {
            let reason = report
                .failure()
                .map_or("value not finite", |f| f.name.as_str());
            let _ = writeln!(
                s,
                "poisson-geometric bound unavailable: precondition failed: {reason}"
            );
            status = ExitStatus::Precondition;
        }
    }
    Ok(Outcome::new(s, status))
}

fn verdict(bound: f64, bound_unc: f64, exact: f64, exact_unc: f64) -> &'static str {
    if bound + bound_unc + exact_unc >= exact {
        "PASS"
    } else {
        "FAIL"
    }
}

/// The moment-matched `Po(λ) * Ge(p)` law recorded in a report.
fn pg_law(report: &BoundReport, tail_tol: f64) -> Result<TruncatedPmf> {
    let missing = || Error::Precondition("report lacks matched parameters".into());
    let lambda = report.intermediate("lambda").ok_or_else(missing)?;
    let p = report.intermediate("p").ok_or_else(missing)?;
    let po = materialize(&ComponentFamily::Poisson { lambda }, tail_tol / 2.0)?;
    let ge = materialize(&ComponentFamily::Geometric { p }, tail_tol / 2.0)?;
    Ok(convolve(&po, &ge))
}

/// Bound and exact distance side by side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub bound: BoundReport,
    pub exact: f64,
    pub exact_uncertainty: f64,
    /// `bound / exact`; absent when the exact distance is zero.
    pub ratio: Option<f64>,
    pub pass: bool,
}

/// Multiply-adds needed to convolve the components in order.
fn convolution_cost(comps: &[ComponentFamily], tail_tol: f64) -> Result<Vec<u64>> {
    let mut cumulative = Vec::with_capacity(comps.len());
    let mut len: u64 = 0;
    let mut cost: u64 = 0;
    let mut last: Option<(&ComponentFamily, u64)> = None;
    for c in comps {
        let l = match last {
            Some((f, l)) if f == c => l,
            _ => materialize(c, tail_tol)?.len() as u64,
        };
        last = Some((c, l));
        cost = cost.saturating_add(len.saturating_mul(l));
        len += l;
        cumulative.push(cost);
    }
    Ok(cumulative)
}

/// Exact-distance certificate for `comps` against the chosen target.
///
/// `inject` replaces the computed bound value before the comparison.
pub fn certify(
    comps: &[ComponentFamily],
    target: CertifyTarget,
    cfg: &BoundConfig,
    budget: u64,
    inject: Option<f64>,
) -> Result<Certificate> {
    let costs = convolution_cost(comps, cfg.tail_tol)?;
    if let Some(&total) = costs.last() {
        if total > budget {
            let fits = costs.iter().take_while(|&&c| c <= budget).count();
            return Err(Error::Precondition(format!(
                "exact convolution needs about {total} multiply-adds, over the budget of {budget}; \
                 try at most {fits} components"
            )));
        }
    }
    let mut bound = match target {
        CertifyTarget::Poisson => poisson_bound_with(comps, cfg)?,
        CertifyTarget::Pg => poisson_geometric_bound_with(comps, cfg)?,
    };
    if !bound.is_valid() {
        let reason = bound
            .failure()
            .map_or("value not finite", |f| f.name.as_str());
        return Err(Error::Precondition(reason.to_string()));
    }
    if let Some(v) = inject {
        bound.value = v;
    }
    let w = convolve_n(comps, cfg.tail_tol)?;
    let law = match target {
        CertifyTarget::Poisson => {
            let mu = bound
                .intermediate("mu")
                .unwrap_or_else(|| comps.iter().map(ComponentFamily::mean).sum());
            materialize(&ComponentFamily::Poisson { lambda: mu }, cfg.tail_tol)?
        }
        CertifyTarget::Pg => pg_law(&bound, cfg.tail_tol)?,
    };
    let exact = tv_distance(&w, &law);
    let pass = bound.value + bound.uncertainty + exact.uncertainty >= exact.value;
    let ratio = (exact.value > 0.0).then(|| bound.value / exact.value);
    Ok(Certificate {
        bound,
        exact: exact.value,
        exact_uncertainty: exact.uncertainty,
        ratio,
        pass,
    })
}

pub fn cmd_certify(a: &CertifyArgs) -> Result<Outcome> {
    let comps = a.components.components();
    let cert = match certify(
        &comps,
        a.target,
        &a.components.config(),
        a.budget,
        a.inject_bound,
    ) {
        Ok(c) => c,
        Err(e) => return Ok(Outcome::new(format!("refused: {e}\n"), error_status(&e))),
    };
    let status = if cert.pass {
        ExitStatus::Success
    } else {
        ExitStatus::Certification
    };
    let verdict = if cert.pass { "PASS" } else { "FAIL" };
    let out = match a.format {
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "bound: {}", cert.bound.theorem);
            let _ = writeln!(
                s,
                "bound value: {:.6} (+/- {:.1e})",
                cert.bound.value, cert.bound.uncertainty
            );
            let _ = writeln!(
                s,
                "exact d_TV: {:.6} (+/- {:.1e})",
                cert.exact, cert.exact_uncertainty
            );
            match cert.ratio {
                Some(r) => {
                    let _ = writeln!(s, "ratio bound/exact: {r:.4}");
                }
                None => {
                    let _ = writeln!(s, "ratio bound/exact: undefined (exact distance is 0)");
                }
            }
            let _ = writeln!(s, "{verdict}");
            s
        }
        Format::Csv => {
            let mut s = String::from(
                "theorem,bound,bound_uncertainty,exact,exact_uncertainty,ratio,verdict\n",
            );
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{verdict}",
                cert.bound.theorem,
                csv_field(cert.bound.value),
                csv_field(cert.bound.uncertainty),
                csv_field(cert.exact),
                csv_field(cert.exact_uncertainty),
                cert.ratio.map(csv_field).unwrap_or_default()
            );
            s
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&cert).expect("certificate serializes");
            s.push('\n');
            s
        }
    };
    Ok(Outcome::new(out, status))
}

/// Exact and approximating PMFs of one comparison panel.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub n: usize,
    pub q: f64,
    pub exact: Vec<f64>,
    pub approx: Vec<f64>,
}

impl Panel {
    pub fn file_name(&self) -> String {
        format!("panel_n{}_q{}.csv", self.n, self.q)
    }

    pub fn sup_gap(&self) -> f64 {
        self.exact
            .iter()
            .zip(&self.approx)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("j,pmf_exact,pmf_approx\n");
        for (j, (a, b)) in self.exact.iter().zip(&self.approx).enumerate() {
            let _ = writeln!(s, "{j},{a},{b}");
        }
        s
    }
}

/// `n` NB(5, 1 - q) components against their moment-matched
/// `Po(λ) * Ge(p)`, for the six `(n, q)` panels.
pub fn figure_panels(tail_tol: f64) -> Result<Vec<Panel>> {
    let cfg = BoundConfig {
        tail_tol,
        series_tol: DEFAULT_SERIES_TOL,
    };
    let mut panels = Vec::new();
    for q in [0.1, 0.2] {
        for n in [10usize, 30, 50] {
            let comps = vec![
                ComponentFamily::NegBinomial {
                    alpha: 5.0,
                    p: 1.0 - q
                };
                n
            ];
            let m = component_moments(&comps, &cfg)?;
            let matched = match_parameters(&m)?;
            if !matched.lambda_positive {
                return Err(Error::Precondition(format!(
                    "matched lambda = {} is not positive",
                    matched.lambda
                )));
            }
            let w = convolve_n(&comps, tail_tol)?;
            let po = materialize(
                &ComponentFamily::Poisson {
                    lambda: matched.lambda,
                },
                tail_tol / 2.0,
            )?;
            let ge = materialize(&ComponentFamily::Geometric { p: matched.p }, tail_tol / 2.0)?;
            let z = convolve(&po, &ge);
            let len = w.len().max(z.len());
            panels.push(Panel {
                n,
                q,
                exact: (0..len).map(|j| w.get(j)).collect(),
                approx: (0..len).map(|j| z.get(j)).collect(),
            });
        }
    }
    Ok(panels)
}

pub fn cmd_figures(a: &FiguresArgs) -> Result<Outcome> {
    let panels = figure_panels(a.tail_tol)?;
    fs::create_dir_all(&a.out_dir)?;
    let mut s = String::new();
    for panel in &panels {
        let path = a.out_dir.join(panel.file_name());
        fs::write(&path, panel.to_csv())?;
        let _ = writeln!(
            s,
            "{} rows={} sup_gap={:.6}",
            path.display(),
            panel.exact.len(),
            panel.sup_gap()
        );
    }
    Ok(Outcome::new(s, ExitStatus::Success))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("stein-approx").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn count_expands_last_component() {
        let cli = parse(&[
            "bound", "--comp", "po:1", "--comp", "ge:0.5", "--count", "3",
        ]);
        let Command::Bound(b) = cli.command else {
            panic!()
        };
        let comps = b.components.components();
        assert_eq!(comps.len(), 4);
        assert_eq!(comps[0], ComponentFamily::Poisson { lambda: 1.0 });
        assert!(comps[1..]
            .iter()
            .all(|c| *c == ComponentFamily::Geometric { p: 0.5 }));
    }

    #[test]
    fn bad_component_is_a_usage_error() {
        let err = Cli::try_parse_from(["stein-approx", "bound", "--comp", "ge:1.5"]).unwrap_err();
        assert!(err.to_string().contains("--comp"));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn table_rows() {
        let rows = table1_rows(VuLambda::PerComponent).unwrap();
        let expected = [
            (0.1111, 0.3370),
            (0.1111, 1.0109),
            (0.1111, 1.6848),
            (0.2500, 1.0722),
            (0.2500, 3.2166),
            (0.2500, 5.3610),
        ];
        for (r, (a, b)) in rows.iter().zip(expected) {
            assert!((r.poisson - a).abs() < 5e-4);
            assert!((r.vellaisamy_upadhye - b).abs() < 5e-4);
        }
    }

    #[test]
    fn pg_under_dispersion_exits_3() {
        let out = run(parse(&[
            "bound", "--target", "pg", "--comp", "ber:0.1", "--count", "10",
        ]))
        .unwrap();
        assert_eq!(out.status, ExitStatus::Precondition);
        assert!(out.output.contains("under-dispersion"));
    }

    #[test]
    fn certify_budget_refusal() {
        let out = run(parse(&[
            "certify", "--comp", "ge:0.5", "--count", "10", "--budget", "100",
        ]))
        .unwrap();
        assert_eq!(out.status, ExitStatus::Precondition);
        assert!(out.output.contains("refused"));
    }
}
