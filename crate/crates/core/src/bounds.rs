//! Total variation bounds for Poisson and Poisson-convoluted-geometric
//! approximation of `W = ξ_1 + … + ξ_n`, and the literature bounds they
//! are compared against.
//!
//! Bounds whose hypotheses fail are returned as reports with an infinite
//! value and the failing precondition's margin, not as errors, so callers
//! can display why a bound is unavailable.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gcoeff::{g_stream, GCoefficients, DEFAULT_SERIES_TOL};
use crate::moments::{moments_of, MomentSummary};
use crate::pmf::{materialize, tv_shift, ComponentFamily, TruncatedPmf, DEFAULT_TAIL_TOL};
use crate::stein::{perturbation_bound, poisson_solution_bound};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// `|μ₂| / max(1, μ)` against `Po(μ)`.
    Poisson,
    /// Second-order bound against `Po(λ) * Ge(p)` with matched mean and variance.
    PoissonGeometric,
    /// Vellaisamy–Upadhye (2009) Poisson bound for negative binomial sums.
    VellaisamyUpadhye,
    /// Hung–Giang (2016) Poisson bound for negative binomial sums.
    HungGiang,
    /// Khintchine / Le Cam bound `Σ p_i²` for Bernoulli sums.
    LeCam,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::Poisson => "poisson",
            BoundKind::PoissonGeometric => "poisson-geometric",
            BoundKind::VellaisamyUpadhye => "vellaisamy-upadhye",
            BoundKind::HungGiang => "hung-giang",
            BoundKind::LeCam => "le-cam",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Precondition {
    pub name: String,
    pub ok: bool,
    pub margin: Option<f64>,
}

/// Infinite values travel as JSON `null`.
mod finite_or_null {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_some(v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem: BoundKind,
    #[serde(with = "finite_or_null")]
    pub value: f64,
    #[serde(with = "finite_or_null")]
    pub uncertainty: f64,
    pub preconditions: Vec<Precondition>,
    pub intermediates: BTreeMap<String, f64>,
}

impl BoundReport {
    fn new(theorem: BoundKind) -> Self {
        BoundReport {
            theorem,
            value: f64::INFINITY,
            uncertainty: 0.0,
            preconditions: Vec::new(),
            intermediates: BTreeMap::new(),
        }
    }

    fn precondition(&mut self, name: &str, ok: bool, margin: Option<f64>) {
        self.preconditions.push(Precondition {
            name: name.to_string(),
            ok,
            margin: margin.filter(|m| m.is_finite()),
        });
    }

    fn record(&mut self, name: &str, value: f64) {
        if value.is_finite() {
            self.intermediates.insert(name.to_string(), value);
        }
    }

    /// All preconditions hold and the value is finite.
    pub fn is_valid(&self) -> bool {
        self.value.is_finite() && self.preconditions.iter().all(|p| p.ok)
    }

    pub fn intermediate(&self, name: &str) -> Option<f64> {
        self.intermediates.get(name).copied()
    }

    /// First failing precondition, if any.
    pub fn failure(&self) -> Option<&Precondition> {
        self.preconditions.iter().find(|p| !p.ok)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// Human-readable rendering at 4 decimals.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "bound: {}", self.theorem);
        if self.is_valid() {
            let _ = writeln!(out, "value: {:.4}", self.value);
            let _ = writeln!(out, "uncertainty: {:.1e}", self.uncertainty);
        } else {
            let reason = self
                .failure()
                .map_or_else(|| "value not finite".to_string(), |p| p.name.clone());
            let _ = writeln!(out, "value: unavailable (precondition failed: {reason})");
        }
        if !self.preconditions.is_empty() {
            let _ = writeln!(out, "preconditions:");
            for p in &self.preconditions {
                let mark = if p.ok { "ok" } else { "FAILED" };
                match p.margin {
                    Some(m) => {
                        let _ = writeln!(out, "  [{mark}] {} (margin {m:.4})", p.name);
                    }
                    None => {
                        let _ = writeln!(out, "  [{mark}] {}", p.name);
                    }
                }
            }
        }
        if !self.intermediates.is_empty() {
            let _ = writeln!(out, "intermediates:");
            for (k, v) in &self.intermediates {
                let _ = writeln!(out, "  {k} = {v:.4}");
            }
        }
        out
    }
}

/// Truncation tolerances used when materializing components and streams.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConfig {
    pub tail_tol: f64,
    pub series_tol: f64,
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig {
            tail_tol: DEFAULT_TAIL_TOL,
            series_tol: DEFAULT_SERIES_TOL,
        }
    }
}

/// Applies `f` to each component, reusing the result for runs of equal
/// neighbours.
fn map_dedup<T: Clone>(
    components: &[ComponentFamily],
    mut f: impl FnMut(&ComponentFamily) -> Result<T>,
) -> Result<Vec<T>> {
    if components.is_empty() {
        return Err(Error::EmptyComponents);
    }
    let mut out: Vec<T> = Vec::with_capacity(components.len());
    for (i, c) in components.iter().enumerate() {
        let item = if i > 0 && components[i - 1] == *c {
            out[i - 1].clone()
        } else {
            f(c)?
        };
        out.push(item);
    }
    Ok(out)
}

fn streams(components: &[ComponentFamily], cfg: &BoundConfig) -> Result<Vec<GCoefficients>> {
    map_dedup(components, |c| g_stream(c, cfg.series_tol))
}

fn materialized(components: &[ComponentFamily], cfg: &BoundConfig) -> Result<Vec<TruncatedPmf>> {
    map_dedup(components, |c| materialize(c, cfg.tail_tol))
}

/// Moments of `W` from the coefficient streams of its components.
pub fn component_moments(
    components: &[ComponentFamily],
    cfg: &BoundConfig,
) -> Result<MomentSummary> {
    moments_of(&streams(components, cfg)?)
}

pub fn poisson_bound(components: &[ComponentFamily]) -> Result<BoundReport> {
    poisson_bound_with(components, &BoundConfig::default())
}

/// `d_TV(W, Po(μ)) <= |μ₂| / max(1, μ)`.
pub fn poisson_bound_with(
    components: &[ComponentFamily],
    cfg: &BoundConfig,
) -> Result<BoundReport> {
    // Materializing rejects parameter choices that do not define a law.
    materialized(components, cfg)?;
    let m = component_moments(components, cfg)?;
    let mut report = BoundReport::new(BoundKind::Poisson);
    report.precondition("coefficient streams converge at w = 1", true, None);
    let denominator = m.mu.max(1.0);
    report.value = m.mu2.abs() / denominator;
    let upper = (m.mu2.abs() + m.uncertainty) / (m.mu - m.uncertainty).max(1.0);
    report.uncertainty = (upper - report.value).max(0.0);
    report.record("mu", m.mu);
    report.record("sigma2", m.sigma2);
    report.record("mu2", m.mu2);
    report.record("mu3", m.mu3);
    report.record("numerator", m.mu2.abs());
    report.record("denominator", denominator);
    report.record("moment_uncertainty", m.uncertainty);
    Ok(report)
}

/// Parameters of `Po(λ) * Ge(p)` matching the mean and variance of `W`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedParameters {
    pub lambda: f64,
    pub p: f64,
    pub q: f64,
    /// `q / p = √(σ² - μ)`.
    pub odds: f64,
    pub lambda_positive: bool,
}

/// `λ = μ - √(σ² - μ)`, `p = 1 / (1 + √(σ² - μ))`; requires `σ² > μ`.
pub fn match_parameters(m: &MomentSummary) -> Result<MatchedParameters> {
    let excess = m.sigma2 - m.mu;
    if !(excess > 0.0) {
        return Err(Error::UnderDispersion {
            mu: m.mu,
            sigma2: m.sigma2,
        });
    }
    let s = excess.sqrt();
    let lambda = m.mu - s;
    Ok(MatchedParameters {
        lambda,
        p: 1.0 / (1.0 + s),
        q: s / (1.0 + s),
        odds: s,
        lambda_positive: lambda > 0.0,
    })
}

/// `√(2/π) (1/4 + Σ_i (1 - d_TV(ξ_i, ξ_i + 1)))^{-1/2}`, an upper bound on
/// `d_TV(W, W + 1)`.
pub fn mattner_roos_term(components: &[ComponentFamily]) -> Result<f64> {
    let (sum, _) = shift_sum(components, &BoundConfig::default())?;
    Ok(smoothness_factor(sum))
}

fn smoothness_factor(shift_sum: f64) -> f64 {
    (2.0 / PI).sqrt() / (0.25 + shift_sum).sqrt()
}

/// `Σ_i (1 - d_TV(ξ_i, ξ_i + 1))` and the total tail bound of the
/// materialized components.
fn shift_sum(components: &[ComponentFamily], cfg: &BoundConfig) -> Result<(f64, f64)> {
    let pmfs = materialized(components, cfg)?;
    let mut sum = 0.0;
    let mut tails = 0.0;
    let mut prev: Option<f64> = None;
    for (i, pmf) in pmfs.iter().enumerate() {
        let shift = match prev {
            Some(s) if components[i - 1] == components[i] => s,
            _ => tv_shift(pmf),
        };
        prev = Some(shift);
        sum += 1.0 - shift;
        tails += pmf.tail_bound();
    }
    Ok((sum, tails))
}

pub fn poisson_geometric_bound(components: &[ComponentFamily]) -> Result<BoundReport> {
    poisson_geometric_bound_with(components, &BoundConfig::default())
}

struct PgParts {
    lambda: f64,
    p: f64,
    odds: f64,
    smoothness: f64,
    numerator: f64,
    denominator: f64,
    value: f64,
}

fn pg_formula(mu: f64, mu2: f64, mu3: f64, shift_sum: f64) -> Option<PgParts> {
    if !(mu2 > 0.0) {
        return None;
    }
    let odds = mu2.sqrt();
    let lambda = mu - odds;
    let gap = lambda - 2.0 * odds * odds;
    if !(gap > 0.0) {
        return None;
    }
    let smoothness = smoothness_factor(shift_sum);
    let numerator = lambda * smoothness * (mu3 - 2.0 * odds.powi(3)).abs();
    let denominator = gap * lambda.max(1.0);
    Some(PgParts {
        lambda,
        p: 1.0 / (1.0 + odds),
        odds,
        smoothness,
        numerator,
        denominator,
        value: numerator / denominator,
    })
}

/// Second-order bound against `Z = Po(λ) * Ge(p)` with `(λ, p)` from
/// [`match_parameters`]:
///
/// ```text
/// d_TV(W, Z) <= λ · s · |μ₃ - 2(q/p)³| / ((λ - 2(q/p)²) max(1, λ))
/// ```
///
/// where `s` is [`mattner_roos_term`] evaluated with the exact
/// `d_TV(ξ_i, ξ_i + 1)` of each materialized component. Requires `σ² > μ`
/// and `λ > 2(q/p)²`.
pub fn poisson_geometric_bound_with(
    components: &[ComponentFamily],
    cfg: &BoundConfig,
) -> Result<BoundReport> {
    let m = component_moments(components, cfg)?;
    let (shift_total, shift_tails) = shift_sum(components, cfg)?;
    let mut report = BoundReport::new(BoundKind::PoissonGeometric);
    report.record("mu", m.mu);
    report.record("sigma2", m.sigma2);
    report.record("mu2", m.mu2);
    report.record("mu3", m.mu3);
    report.record("moment_uncertainty", m.uncertainty);

    let excess = m.sigma2 - m.mu;
    let matched = match match_parameters(&m) {
        Ok(matched) => {
            report.precondition("sigma^2 > mu", true, Some(excess));
            matched
        }
        Err(Error::UnderDispersion { .. }) => {
            report.precondition("sigma^2 > mu", false, Some(excess));
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    let odds2 = matched.odds * matched.odds;
    let gap = matched.lambda - 2.0 * odds2;
    report.record("lambda", matched.lambda);
    report.record("p", matched.p);
    report.record("q", matched.q);
    report.record("q_over_p", matched.odds);
    report.precondition("lambda > 2 (q/p)^2", gap > 0.0, Some(gap));
    let parts = match pg_formula(m.mu, excess, m.mu3, shift_total) {
        Some(parts) if gap > 0.0 => parts,
        _ => return Ok(report),
    };
    report.value = parts.value;
    report.record("cubic_mismatch", (m.mu3 - 2.0 * parts.odds.powi(3)).abs());
    report.record("smoothness", parts.smoothness);
    report.record("shift_sum", shift_total);
    report.record("numerator", parts.numerator);
    report.record("denominator", parts.denominator);
    debug_assert!((parts.lambda - matched.lambda).abs() <= 1e-12 * matched.lambda.abs().max(1.0));
    debug_assert!((parts.p - matched.p).abs() <= 1e-15);

    // Same value through the perturbation combinator with α = λ, w1 = 2
    // (‖f‖ form of the Poisson solution bound), w2 = (q/p)², no mass
    // outside the support.
    let w1 = poisson_solution_bound(1.0, true);
    let eps = parts.smoothness * (m.mu3 - 2.0 * parts.odds.powi(3)).abs();
    if let Ok(v) = perturbation_bound(parts.lambda, w1, odds2, eps, 0.0, 0.0) {
        report.record("perturbation_lemma_value", v);
    }

    // Propagate truncation error by evaluating the formula at the corners
    // of the input box.
    let du = m.uncertainty;
    let mut worst: f64 = 0.0;
    for &a in &[-du, du] {
        for &b in &[-du, du] {
            for &c in &[-du, du] {
                for &d in &[-shift_tails, shift_tails] {
                    worst = match pg_formula(m.mu + a, excess + b, m.mu3 + c, shift_total + d) {
                        Some(corner) => worst.max((corner.value - parts.value).abs()),
                        None => f64::INFINITY,
                    };
                }
            }
        }
    }
    report.uncertainty = worst;
    Ok(report)
}

/// How `λ` is formed in the Vellaisamy–Upadhye bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VuLambda {
    /// `λ = (1/n) Σ α_i q_i`, i.e. `αq` for identical components.
    #[default]
    PerComponent,
    /// `λ = Σ α_i q_i`.
    Total,
}

/// `min(1, 1/√(2λe)) Σ α_i q_i² / p_i` for `ξ_i ~ NB(α_i, p_i)`.
pub fn vu_bound(alphas: &[f64], ps: &[f64], convention: VuLambda) -> Result<BoundReport> {
    check_nb_lists(alphas, ps, false)?;
    let n = alphas.len() as f64;
    let total: f64 = alphas.iter().zip(ps).map(|(a, p)| a * (1.0 - p)).sum();
    let lambda = match convention {
        VuLambda::PerComponent => total / n,
        VuLambda::Total => total,
    };
    let factor = (1.0 / (2.0 * lambda * E).sqrt()).min(1.0);
    let sum: f64 = alphas
        .iter()
        .zip(ps)
        .map(|(a, p)| a * (1.0 - p).powi(2) / p)
        .sum();
    let mut report = BoundReport::new(BoundKind::VellaisamyUpadhye);
    report.value = factor * sum;
    report.record("lambda", lambda);
    report.record("factor", factor);
    report.record("sum", sum);
    Ok(report)
}

fn check_nb_lists(sizes: &[f64], ps: &[f64], allow_zero_size: bool) -> Result<()> {
    let invalid = |reason: String| Error::InvalidParameter {
        family: "NegBinomial list",
        reason,
    };
    if sizes.is_empty() {
        return Err(Error::EmptyComponents);
    }
    if sizes.len() != ps.len() {
        return Err(invalid(format!(
            "{} sizes but {} probabilities",
            sizes.len(),
            ps.len()
        )));
    }
    for (a, p) in sizes.iter().zip(ps) {
        let size_ok = a.is_finite() && (*a > 0.0 || (allow_zero_size && *a == 0.0));
        if !size_ok {
            return Err(invalid(format!("size {a} is not valid")));
        }
        if !(p.is_finite() && *p > 0.0 && *p < 1.0) {
            return Err(invalid(format!("p = {p} must lie in (0, 1)")));
        }
    }
    Ok(())
}

/// Hung–Giang bound for `ξ_i ~ NB(r_i, p_i)` with `λ_n = Σ r_i q_i / p_i`:
///
/// ```text
/// Σ_i min{λ_n^{-1}(1 - e^{-λ_n}) r_i q_i, q_i} q_i / p_i
/// ```
///
/// Also records the simplified value `Σ q_i² / p_i`, which the bound
/// equals when every minimum is attained at `q_i`.
pub fn hung_giang_bound(rs: &[f64], ps: &[f64]) -> Result<BoundReport> {
    check_nb_lists(rs, ps, true)?;
    let lambda: f64 = rs.iter().zip(ps).map(|(r, p)| r * (1.0 - p) / p).sum();
    let factor = if lambda > 0.0 {
        (1.0 - (-lambda).exp()) / lambda
    } else {
        1.0
    };
    let mut value = 0.0;
    let mut simplified = 0.0;
    let mut all_at_q = true;
    for (r, p) in rs.iter().zip(ps) {
        let q = 1.0 - p;
        let first = factor * r * q;
        if first < q {
            all_at_q = false;
        }
        value += first.min(q) * q / p;
        simplified += q * q / p;
    }
    let mut report = BoundReport::new(BoundKind::HungGiang);
    report.value = value;
    report.record("lambda", lambda);
    report.record("factor", factor);
    report.record("simplified_value", simplified);
    report.record("simplified_applies", if all_at_q { 1.0 } else { 0.0 });
    Ok(report)
}

/// `Σ p_i²` for Bernoulli components, with the Poisson bound
/// `Σ p_i² / max(1, μ)` alongside.
pub fn lecam_bound(ps: &[f64]) -> Result<BoundReport> {
    if ps.is_empty() {
        return Err(Error::EmptyComponents);
    }
    if let Some(p) = ps
        .iter()
        .find(|p| !(p.is_finite() && **p > 0.0 && **p < 1.0))
    {
        return Err(Error::InvalidParameter {
            family: "Bernoulli",
            reason: format!("p = {p} must lie in (0, 1)"),
        });
    }
    let mu: f64 = ps.iter().sum();
    let squares: f64 = ps.iter().map(|p| p * p).sum();
    let mut report = BoundReport::new(BoundKind::LeCam);
    report.value = squares;
    report.record("mu", mu);
    report.record("poisson_bound", squares / mu.max(1.0));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nb(alpha: f64, p: f64, n: usize) -> Vec<ComponentFamily> {
        vec![ComponentFamily::NegBinomial { alpha, p }; n]
    }

    #[test]
    fn poisson_bound_table_column() {
        for (p, expected) in [(0.9, 0.1111), (0.8, 0.25)] {
            for n in [10, 30, 50] {
                let r = poisson_bound(&nb(5.0, p, n)).unwrap();
                assert!(
                    (r.value - expected).abs() < 5e-5,
                    "n={n} p={p}: {}",
                    r.value
                );
                assert!((r.value - (1.0 - p) / p).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn poisson_bound_zero_for_poisson_components() {
        let fams = vec![
            ComponentFamily::Poisson { lambda: 2.0 },
            ComponentFamily::Poisson { lambda: 0.3 },
        ];
        assert_eq!(poisson_bound(&fams).unwrap().value, 0.0);
    }

    #[test]
    fn rejects_two_runs_without_a_law() {
        assert!(poisson_bound(&[ComponentFamily::TwoRunsV { p: 0.7 }]).is_err());
    }

    #[test]
    fn matching_examples() {
        let m = MomentSummary {
            mu: 2.0,
            sigma2: 3.0,
            mu2: 1.0,
            mu3: 0.0,
            uncertainty: 0.0,
        };
        let mp = match_parameters(&m).unwrap();
        assert_eq!((mp.lambda, mp.p), (1.0, 0.5));
        let flat = MomentSummary { sigma2: 2.0, ..m };
        assert!(matches!(
            match_parameters(&flat),
            Err(Error::UnderDispersion { .. })
        ));
    }

    #[test]
    fn matching_recovers_poisson_geometric() {
        let fams = [
            ComponentFamily::Poisson { lambda: 1.0 },
            ComponentFamily::Geometric { p: 0.5 },
        ];
        let m = component_moments(&fams, &BoundConfig::default()).unwrap();
        let mp = match_parameters(&m).unwrap();
        assert!((mp.lambda - 1.0).abs() < 1e-12);
        assert!((mp.p - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pg_bound_vanishes_for_exact_target() {
        let fams = [
            ComponentFamily::Poisson { lambda: 3.0 },
            ComponentFamily::Geometric { p: 0.6 },
        ];
        let r = poisson_geometric_bound(&fams).unwrap();
        assert!(r.is_valid());
        assert!(r.value <= 1e-10);
        assert!(r.intermediate("cubic_mismatch").unwrap() <= 1e-10);
    }

    #[test]
    fn pg_bound_negbin_intermediates() {
        let r = poisson_geometric_bound(&nb(5.0, 0.9, 10)).unwrap();
        assert!(r.is_valid());
        let odds = (50.0f64).sqrt() * (0.1 / 0.9);
        assert!((r.intermediate("q_over_p").unwrap() - odds).abs() < 1e-12);
        assert!((r.intermediate("q_over_p").unwrap() - 0.7857).abs() < 5e-5);
        assert!((r.intermediate("lambda").unwrap() - 4.7699).abs() < 5e-5);
        assert!((r.intermediate("mu3").unwrap() - 0.13717).abs() < 5e-6);
        let lemma = r.intermediate("perturbation_lemma_value").unwrap();
        assert!((lemma - r.value).abs() < 1e-12 * r.value.max(1.0));
    }

    #[test]
    fn pg_bound_under_dispersion() {
        let r = poisson_geometric_bound(&vec![ComponentFamily::Bernoulli { p: 0.1 }; 10]).unwrap();
        assert!(!r.is_valid());
        assert_eq!(r.failure().unwrap().name, "sigma^2 > mu");
        assert!(r.value.is_infinite());
    }

    #[test]
    fn pg_bound_lambda_precondition() {
        // A single geometric has λ = μ - q/p = 0.
        let r = poisson_geometric_bound(&[ComponentFamily::Geometric { p: 0.5 }]).unwrap();
        assert!(!r.is_valid());
        assert_eq!(r.failure().unwrap().name, "lambda > 2 (q/p)^2");
    }

    #[test]
    fn smoothness_examples() {
        let points = vec![ComponentFamily::Custom { probs: vec![1.0] }; 4];
        let v = mattner_roos_term(&points).unwrap();
        assert!((v - 2.0 * (2.0 / PI).sqrt()).abs() < 1e-12);
        let v = mattner_roos_term(&vec![ComponentFamily::Geometric { p: 0.5 }; 10]).unwrap();
        assert!((v - (2.0 / PI).sqrt() / 5.25f64.sqrt()).abs() < 1e-12);
        let v = mattner_roos_term(&[ComponentFamily::Poisson { lambda: 1.0 }]).unwrap();
        let oracle = (2.0 / PI).sqrt() / (1.25 - (-1.0f64).exp()).sqrt();
        assert!((v - oracle).abs() < 1e-12);
    }

    #[test]
    fn vu_bound_table_column() {
        let cases = [
            (10, 0.1, 0.3370),
            (30, 0.1, 1.0109),
            (50, 0.1, 1.6848),
            (10, 0.2, 1.0722),
            (30, 0.2, 3.2166),
            (50, 0.2, 5.3610),
        ];
        for (n, q, expected) in cases {
            let r = vu_bound(&vec![5.0; n], &vec![1.0 - q; n], VuLambda::PerComponent).unwrap();
            assert!(
                (r.value - expected).abs() < 5e-5,
                "n={n} q={q}: {}",
                r.value
            );
        }
        // The total-λ reading gives different numbers.
        let r = vu_bound(&[5.0; 10], &[0.9; 10], VuLambda::Total).unwrap();
        assert!((r.value - 0.3370).abs() > 1e-2);
    }

    #[test]
    fn hung_giang_examples() {
        let r = hung_giang_bound(&[0.0, 0.0], &[0.5, 0.7]).unwrap();
        assert_eq!(r.value, 0.0);

        let r = hung_giang_bound(&[5.0], &[0.9]).unwrap();
        let lambda: f64 = 5.0 * 0.1 / 0.9;
        let first = (1.0 - (-lambda).exp()) / lambda * 5.0 * 0.1;
        let oracle = first.min(0.1) * 0.1 / 0.9;
        assert!((r.value - oracle).abs() < 1e-15);

        // Large r_i push the first argument above q_i.
        let r = hung_giang_bound(&[50.0, 80.0], &[0.99, 0.98]).unwrap();
        assert_eq!(r.intermediate("simplified_applies"), Some(1.0));
        assert!((r.value - r.intermediate("simplified_value").unwrap()).abs() < 1e-15);
    }

    #[test]
    fn lecam_examples() {
        let r = lecam_bound(&[0.1; 10]).unwrap();
        assert!((r.value - 0.1).abs() < 1e-15);
        assert!((r.intermediate("poisson_bound").unwrap() - 0.1).abs() < 1e-15);
        let r = lecam_bound(&[0.5, 0.5]).unwrap();
        assert_eq!(
            (r.value, r.intermediate("poisson_bound").unwrap()),
            (0.5, 0.5)
        );
        let r = lecam_bound(&[0.2; 20]).unwrap();
        assert!((r.value - 0.8).abs() < 1e-14);
        assert!((r.intermediate("poisson_bound").unwrap() - 0.2).abs() < 1e-14);
    }

    #[test]
    fn json_round_trip_with_infinite_value() {
        let r = poisson_geometric_bound(&[ComponentFamily::Geometric { p: 0.5 }]).unwrap();
        let json = r.to_json();
        assert!(json.contains("\"value\": null"));
        let back = BoundReport::from_json(&json).unwrap();
        assert_eq!(back.to_json(), json);
        assert!(back.value.is_infinite());
    }
}
