//! Truncated probability mass functions on `{0, 1, 2, …}`.
//!
//! Every law in the crate is represented by a [`TruncatedPmf`]: the first
//! `N` probabilities plus a certified bound on the mass that was cut off.
//! Convolution adds tail bounds, and total variation distances report the
//! uncertainty the tails introduce.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default truncation tolerance for [`materialize`].
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Allowed slack in `sum(probs) + tail_bound = 1`.
pub const NORM_TOL: f64 = 1e-10;

/// Negative round-off above this magnitude is treated as a genuine negative
/// probability.
pub const CLAMP_TOL: f64 = 1e-14;

/// Hard cap on the number of stored probabilities.
pub const MAX_SUPPORT: usize = 10_000_000;

/// One summand `ξ_i` of the sum being approximated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ComponentFamily {
    Poisson {
        lambda: f64,
    },
    /// `P(k) = q^k p`, the number of failures before the first success.
    Geometric {
        p: f64,
    },
    Bernoulli {
        p: f64,
    },
    Binomial {
        n: u32,
        p: f64,
    },
    /// `P(k) = C(k+α-1, k) p^α q^k` for real `α > 0`.
    NegBinomial {
        alpha: f64,
        p: f64,
    },
    /// Shifted 2-run waiting time `V = U - 2`, with PGF `p²/(1 - t + p²t²)`.
    TwoRunsV {
        p: f64,
    },
    /// Explicit probabilities starting at 0.
    Custom {
        probs: Vec<f64>,
    },
}

fn check_open_unit(family: &'static str, p: f64) -> Result<()> {
    if p.is_finite() && p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            family,
            reason: format!("p = {p} must lie in (0, 1)"),
        })
    }
}

impl ComponentFamily {
    pub fn name(&self) -> &'static str {
        match self {
            ComponentFamily::Poisson { .. } => "Poisson",
            ComponentFamily::Geometric { .. } => "Geometric",
            ComponentFamily::Bernoulli { .. } => "Bernoulli",
            ComponentFamily::Binomial { .. } => "Binomial",
            ComponentFamily::NegBinomial { .. } => "NegBinomial",
            ComponentFamily::TwoRunsV { .. } => "TwoRunsV",
            ComponentFamily::Custom { .. } => "CustomPMF",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let family = self.name();
        match self {
            ComponentFamily::Poisson { lambda } => {
                if lambda.is_finite() && *lambda > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter {
                        family,
                        reason: format!("lambda = {lambda} must be positive"),
                    })
                }
            }
            ComponentFamily::Geometric { p }
            | ComponentFamily::Bernoulli { p }
            | ComponentFamily::TwoRunsV { p } => check_open_unit(family, *p),
            ComponentFamily::Binomial { n, p } => {
                if *n == 0 {
                    return Err(Error::InvalidParameter {
                        family,
                        reason: "n must be at least 1".into(),
                    });
                }
                check_open_unit(family, *p)
            }
            ComponentFamily::NegBinomial { alpha, p } => {
                if !(alpha.is_finite() && *alpha > 0.0) {
                    return Err(Error::InvalidParameter {
                        family,
                        reason: format!("alpha = {alpha} must be positive"),
                    });
                }
                check_open_unit(family, *p)
            }
            ComponentFamily::Custom { probs } => {
                if probs.is_empty() {
                    return Err(Error::InvalidParameter {
                        family,
                        reason: "no probabilities given".into(),
                    });
                }
                if let Some((i, v)) = probs
                    .iter()
                    .enumerate()
                    .find(|(_, v)| !v.is_finite() || **v < 0.0)
                {
                    return Err(Error::InvalidParameter {
                        family,
                        reason: format!("entry {i} = {v} is not a probability"),
                    });
                }
                if probs[0] <= 0.0 {
                    return Err(Error::InvalidParameter {
                        family,
                        reason: "P(0) must be positive".into(),
                    });
                }
                let total: f64 = probs.iter().sum();
                if total > 1.0 + NORM_TOL {
                    return Err(Error::InvalidParameter {
                        family,
                        reason: format!("entries sum to {total} > 1"),
                    });
                }
                Ok(())
            }
        }
    }

    /// Analytic mean of the family.
    pub fn mean(&self) -> f64 {
        match self {
            ComponentFamily::Poisson { lambda } => *lambda,
            ComponentFamily::Geometric { p } => (1.0 - p) / p,
            ComponentFamily::Bernoulli { p } => *p,
            ComponentFamily::Binomial { n, p } => f64::from(*n) * p,
            ComponentFamily::NegBinomial { alpha, p } => alpha * (1.0 - p) / p,
            ComponentFamily::TwoRunsV { p } => (1.0 - 2.0 * p * p) / (p * p),
            ComponentFamily::Custom { probs } => {
                probs.iter().enumerate().map(|(k, v)| k as f64 * v).sum()
            }
        }
    }
}

impl fmt::Display for ComponentFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentFamily::Poisson { lambda } => write!(f, "po:{lambda}"),
            ComponentFamily::Geometric { p } => write!(f, "ge:{p}"),
            ComponentFamily::Bernoulli { p } => write!(f, "ber:{p}"),
            ComponentFamily::Binomial { n, p } => write!(f, "bin:{n}:{p}"),
            ComponentFamily::NegBinomial { alpha, p } => write!(f, "nb:{alpha}:{p}"),
            ComponentFamily::TwoRunsV { p } => write!(f, "tr:{p}"),
            ComponentFamily::Custom { probs } => {
                write!(f, "custom:")?;
                for (i, v) in probs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                Ok(())
            }
        }
    }
}

/// Parses the component mini-grammar `family:param[:param]`, e.g. `po:2`,
/// `ge:0.5`, `bin:5:0.3`, `nb:5:0.9`, `tr:0.4` or `custom:0.5,0.3,0.2`.
impl FromStr for ComponentFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: String| Error::InvalidParameter {
            family: "component spec",
            reason,
        };
        let mut parts = s.trim().split(':');
        let tag = parts.next().unwrap_or_default().to_ascii_lowercase();
        let params: Vec<&str> = parts.collect();
        let real = |i: usize| -> Result<f64> {
            let raw = params
                .get(i)
                .ok_or_else(|| bad(format!("`{s}` is missing parameter {}", i + 1)))?;
            raw.trim()
                .parse::<f64>()
                .map_err(|_| bad(format!("`{raw}` in `{s}` is not a number")))
        };
        let arity = |n: usize| -> Result<()> {
            if params.len() == n {
                Ok(())
            } else {
                Err(bad(format!(
                    "`{s}` takes {n} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        let family = match tag.as_str() {
            "po" | "poisson" => {
                arity(1)?;
                ComponentFamily::Poisson { lambda: real(0)? }
            }
            "ge" | "geo" | "geometric" => {
                arity(1)?;
                ComponentFamily::Geometric { p: real(0)? }
            }
            "ber" | "bernoulli" => {
                arity(1)?;
                ComponentFamily::Bernoulli { p: real(0)? }
            }
            "bin" | "binomial" => {
                arity(2)?;
                let n = params[0]
                    .trim()
                    .parse::<u32>()
                    .map_err(|_| bad(format!("`{}` in `{s}` is not a count", params[0])))?;
                ComponentFamily::Binomial { n, p: real(1)? }
            }
            "nb" | "negbin" => {
                arity(2)?;
                ComponentFamily::NegBinomial {
                    alpha: real(0)?,
                    p: real(1)?,
                }
            }
            "tr" | "tworuns" => {
                arity(1)?;
                ComponentFamily::TwoRunsV { p: real(0)? }
            }
            "custom" | "pmf" => {
                arity(1)?;
                let probs = params[0]
                    .split(',')
                    .map(|v| {
                        v.trim()
                            .parse::<f64>()
                            .map_err(|_| bad(format!("`{v}` in `{s}` is not a number")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                ComponentFamily::Custom { probs }
            }
            other => return Err(bad(format!("unknown family `{other}`"))),
        };
        family.validate()?;
        Ok(family)
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// A probability vector on `{0, …, N-1}` with a bound on the missing mass.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedPmf {
    probs: Vec<f64>,
    tail_bound: f64,
    origin: Option<ComponentFamily>,
}

impl TruncatedPmf {
    /// Checks non-negativity and `|sum + tail_bound - 1| <= NORM_TOL`.
    pub fn new(probs: Vec<f64>, tail_bound: f64) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidParameter {
            family: "TruncatedPmf",
            reason,
        };
        if probs.is_empty() {
            return Err(invalid("empty probability vector".into()));
        }
        if !(tail_bound.is_finite() && tail_bound >= 0.0) {
            return Err(invalid(format!("tail bound {tail_bound} is not valid")));
        }
        if let Some((i, v)) = probs
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(invalid(format!("entry {i} = {v} is not a probability")));
        }
        let total = compensated_total(&probs) + tail_bound;
        if (total - 1.0).abs() > NORM_TOL {
            return Err(invalid(format!("mass plus tail bound is {total}, not 1")));
        }
        Ok(TruncatedPmf {
            probs,
            tail_bound,
            origin: None,
        })
    }

    /// Builds a PMF whose tail bound is the mass missing from `probs`.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        let tail = (1.0 - compensated_total(&probs)).max(0.0);
        Self::new(probs, tail)
    }

    pub fn point_mass(k: usize) -> Self {
        let mut probs = vec![0.0; k + 1];
        probs[k] = 1.0;
        TruncatedPmf {
            probs,
            tail_bound: 0.0,
            origin: None,
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn origin(&self) -> Option<&ComponentFamily> {
        self.origin.as_ref()
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// `P(j)`, zero beyond the stored support.
    pub fn get(&self, j: usize) -> f64 {
        self.probs.get(j).copied().unwrap_or(0.0)
    }

    /// Stored mass.
    pub fn mass(&self) -> f64 {
        compensated_total(&self.probs)
    }

    /// Smallest `j` with `P(0) + … + P(j) >= level`, if the stored mass reaches it.
    pub fn quantile_index(&self, level: f64) -> Option<usize> {
        let mut acc = CompensatedSum::default();
        for (j, &v) in self.probs.iter().enumerate() {
            acc.add(v);
            if acc.value() >= level {
                return Some(j);
            }
        }
        None
    }
}

fn compensated_total(values: &[f64]) -> f64 {
    let mut acc = CompensatedSum::default();
    for &v in values {
        acc.add(v);
    }
    acc.value()
}

/// Appends terms produced by `next` until the stored mass reaches
/// `1 - tail_tol`.
fn accumulate_until(
    family: &ComponentFamily,
    tail_tol: f64,
    min_len: usize,
    mut next: impl FnMut(usize) -> Result<f64>,
) -> Result<(Vec<f64>, f64)> {
    let mut probs = Vec::new();
    let mut acc = CompensatedSum::default();
    for k in 0..MAX_SUPPORT {
        let v = next(k)?;
        probs.push(v);
        acc.add(v);
        if acc.value() >= 1.0 - tail_tol && probs.len() >= min_len {
            let tail = (1.0 - acc.value()).max(0.0);
            return Ok((probs, tail));
        }
    }
    Err(Error::TruncationFailed {
        family: family.to_string(),
        tail_tol,
        max_len: MAX_SUPPORT,
    })
}

/// Builds the truncated PMF of `family` with tail mass at most `tail_tol`.
pub fn materialize(family: &ComponentFamily, tail_tol: f64) -> Result<TruncatedPmf> {
    materialize_min_len(family, tail_tol, 0)
}

/// [`materialize`], storing at least `min_len` probabilities for families
/// with unbounded support.
pub fn materialize_min_len(
    family: &ComponentFamily,
    tail_tol: f64,
    min_len: usize,
) -> Result<TruncatedPmf> {
    if !(tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(Error::InvalidParameter {
            family: "materialize",
            reason: format!("tail_tol = {tail_tol} must lie in (0, 1)"),
        });
    }
    family.validate()?;
    let (probs, tail_bound) = match family {
        ComponentFamily::Poisson { lambda } => {
            let ln_lambda = lambda.ln();
            let mut log_p = -lambda;
            accumulate_until(family, tail_tol, min_len, |k| {
                if k > 0 {
                    log_p += ln_lambda - (k as f64).ln();
                }
                Ok(log_p.exp())
            })?
        }
        ComponentFamily::Geometric { p } => {
            let (ln_p, ln_q) = (p.ln(), (1.0 - p).ln());
            accumulate_until(family, tail_tol, min_len, |k| {
                Ok((ln_p + k as f64 * ln_q).exp())
            })?
        }
        ComponentFamily::NegBinomial { alpha, p } => {
            let ln_q = (1.0 - p).ln();
            let mut log_p = alpha * p.ln();
            accumulate_until(family, tail_tol, min_len, |k| {
                if k > 0 {
                    let kf = k as f64;
                    log_p += (kf + alpha - 1.0).ln() - kf.ln() + ln_q;
                }
                Ok(log_p.exp())
            })?
        }
        ComponentFamily::Bernoulli { p } => (vec![1.0 - p, *p], 0.0),
        ComponentFamily::Binomial { n, p } => {
            let q = 1.0 - p;
            let ln_odds = p.ln() - q.ln();
            let nf = f64::from(*n);
            let mut log_p = nf * q.ln();
            let probs = (0..=*n)
                .map(|k| {
                    if k > 0 {
                        let kf = f64::from(k);
                        log_p += (nf - kf + 1.0).ln() - kf.ln() + ln_odds;
                    }
                    log_p.exp()
                })
                .collect();
            (probs, 0.0)
        }
        ComponentFamily::TwoRunsV { p } => {
            // P(V = j) = p² c_j with c_j = c_{j-1} - p² c_{j-2}, c_0 = c_1 = 1.
            let p2 = p * p;
            if *p > 0.5 {
                // Complex roots: the sequence changes sign, but the mass can
                // pass 1 - tail_tol first, so look for the sign change directly.
                let (mut prev, mut cur) = (1.0_f64, 1.0_f64);
                for j in 2..MAX_SUPPORT {
                    let next = cur - p2 * prev;
                    if p2 * next < -CLAMP_TOL {
                        return Err(Error::NegativeProbability {
                            family: family.to_string(),
                            index: j,
                            value: p2 * next,
                        });
                    }
                    prev = cur;
                    cur = next;
                }
            }
            let (mut prev, mut cur) = (0.0_f64, 1.0_f64);
            accumulate_until(family, tail_tol, min_len, |j| {
                if j >= 1 {
                    let next = if j == 1 { 1.0 } else { cur - p2 * prev };
                    prev = cur;
                    cur = next;
                }
                let v = p2 * cur;
                if v >= 0.0 {
                    Ok(v)
                } else if v > -CLAMP_TOL {
                    Ok(0.0)
                } else {
                    Err(Error::NegativeProbability {
                        family: family.to_string(),
                        index: j,
                        value: v,
                    })
                }
            })?
        }
        ComponentFamily::Custom { probs } => {
            let tail = (1.0 - compensated_total(probs)).max(0.0);
            if tail > tail_tol {
                return Err(Error::InvalidParameter {
                    family: "CustomPMF",
                    reason: format!("missing mass {tail:e} exceeds tail_tol {tail_tol:e}"),
                });
            }
            (probs.clone(), tail)
        }
    };
    let mut pmf = TruncatedPmf::new(probs, tail_bound)?;
    pmf.origin = Some(family.clone());
    Ok(pmf)
}

/// Law of the sum of two independent variables (direct summation).
pub fn convolve(a: &TruncatedPmf, b: &TruncatedPmf) -> TruncatedPmf {
    let mut probs = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.probs.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (out, &y) in probs[i..].iter_mut().zip(&b.probs) {
            *out += x * y;
        }
    }
    TruncatedPmf {
        probs,
        tail_bound: a.tail_bound + b.tail_bound,
        origin: None,
    }
}

/// Law of `W = ξ_1 + … + ξ_n` for independent components.
pub fn convolve_n(families: &[ComponentFamily], tail_tol: f64) -> Result<TruncatedPmf> {
    let (first, rest) = families.split_first().ok_or(Error::EmptyComponents)?;
    let mut acc = materialize(first, tail_tol)?;
    // Identical neighbours are common; reuse the previous materialization.
    let mut last: Option<(ComponentFamily, TruncatedPmf)> = Some((first.clone(), acc.clone()));
    for family in rest {
        let component = match &last {
            Some((f, pmf)) if f == family => pmf.clone(),
            _ => materialize(family, tail_tol)?,
        };
        acc = convolve(&acc, &component);
        last = Some((family.clone(), component));
    }
    if families.len() == 1 {
        return Ok(acc);
    }
    acc.origin = None;
    Ok(acc)
}

/// A computed distance together with the error the truncated tails allow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TvEstimate {
    pub value: f64,
    pub uncertainty: f64,
}

/// `½ Σ_j |a_j - b_j|` over the stored supports; the true distance lies
/// within `(a.tail_bound + b.tail_bound) / 2` of the value.
pub fn tv_distance(a: &TruncatedPmf, b: &TruncatedPmf) -> TvEstimate {
    let n = a.len().max(b.len());
    let mut acc = CompensatedSum::default();
    for j in 0..n {
        acc.add((a.get(j) - b.get(j)).abs());
    }
    TvEstimate {
        value: 0.5 * acc.value(),
        uncertainty: 0.5 * (a.tail_bound + b.tail_bound),
    }
}

/// `d_TV(X, X + 1) = ½ Σ_j |P(j) - P(j-1)|`, with `P(-1) = 0`.
///
/// The drop to zero after the stored support is included; the result is
/// within `a.tail_bound()` of the untruncated value.
pub fn tv_shift(a: &TruncatedPmf) -> f64 {
    let mut acc = CompensatedSum::default();
    let mut prev = 0.0;
    for &v in &a.probs {
        acc.add((v - prev).abs());
        prev = v;
    }
    acc.add(prev);
    0.5 * acc.value()
}
