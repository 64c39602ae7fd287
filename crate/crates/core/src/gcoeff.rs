//! Coefficient streams of the PGF quotient
//!
//! ```text
//! ψ'(w) / ψ(w) = Σ_{j≥0} g_{j+1} w^j
//! ```
//!
//! for a single component. All moment and bound formulas consume these
//! coefficients. Closed forms are provided for every parametric family;
//! [`g_from_pmf`] recovers the same stream from a PMF by power-series
//! division and serves as the independent check on the closed forms.

use num_traits::Num;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pmf::{ComponentFamily, TruncatedPmf};

pub const DEFAULT_TRUNC_LEN: usize = 200;

/// Remainder allowed by [`g_stream`].
pub const DEFAULT_SERIES_TOL: f64 = 1e-12;

pub const MAX_TRUNC_LEN: usize = 1 << 20;

const RATIO_WINDOW: usize = 10;

/// Geometric envelope for the coefficients that were not stored:
/// `|g[j]| <= scale · ratio^(j - first)` for every `j >= first`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEnvelope {
    pub first: usize,
    pub scale: f64,
    pub ratio: f64,
}

impl TailEnvelope {
    fn zero(first: usize) -> Self {
        TailEnvelope {
            first,
            scale: 0.0,
            ratio: 0.0,
        }
    }

    /// Upper bound on `Σ_{j >= first} (j + 1)^power · |g[j]|`.
    ///
    /// `power = 0, 1, 2` dominates the weights `1`, `j` or `j + 1`, and
    /// `j (j - 1)` used by the moment sums.
    pub fn weighted_tail(&self, power: i32) -> f64 {
        if self.scale == 0.0 {
            return 0.0;
        }
        if !(self.ratio < 1.0) {
            return f64::INFINITY;
        }
        let mut sum = 0.0;
        let mut j = self.first;
        let mut term = (j as f64 + 1.0).powi(power) * self.scale;
        loop {
            sum += term;
            // The term ratio ((j+2)/(j+1))^power · r decreases in j, so once it
            // drops below 1 the rest is bounded by a geometric series.
            let rho = ((j as f64 + 2.0) / (j as f64 + 1.0)).powi(power) * self.ratio;
            if rho < 1.0 {
                let rest = term * rho / (1.0 - rho);
                if rest <= 1e-17 * sum || j - self.first > 1_000_000 {
                    return sum + rest;
                }
            }
            term *= rho;
            j += 1;
        }
    }
}

/// The stream `g[j] = g_{j+1}` of one component, truncated after
/// `coeffs.len()` terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GCoefficients {
    coeffs: Vec<f64>,
    remainder_bound: f64,
    converges_at_one: bool,
    envelope: TailEnvelope,
}

impl GCoefficients {
    fn from_parts(coeffs: Vec<f64>, envelope: TailEnvelope) -> Self {
        let converges_at_one = envelope.scale == 0.0 || envelope.ratio < 1.0;
        let remainder_bound = envelope.weighted_tail(0);
        GCoefficients {
            coeffs,
            remainder_bound,
            converges_at_one,
            envelope,
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Bound on `Σ_{j >= len} |g[j]|`.
    pub fn remainder_bound(&self) -> f64 {
        self.remainder_bound
    }

    pub fn converges_at_one(&self) -> bool {
        self.converges_at_one
    }

    pub fn envelope(&self) -> TailEnvelope {
        self.envelope
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `Σ_j |g[j]|` over the stored coefficients.
    pub fn abs_sum(&self) -> f64 {
        self.coeffs.iter().map(|v| v.abs()).sum()
    }

    /// `Σ_j g[j]`, which is the mean of the component.
    pub fn sum(&self) -> f64 {
        self.coeffs.iter().sum()
    }
}

/// Reciprocal roots `(a, b)` of `1 - t + p² t²`, so `a + b = 1`, `ab = p²`.
/// Real for `p <= 1/2`, complex conjugate with modulus `p` above.
enum TwoRunsRoots {
    Real(f64, f64),
    Complex { modulus: f64, angle: f64 },
}

fn two_runs_roots(p: f64) -> TwoRunsRoots {
    let p2 = p * p;
    let disc = 1.0 - 4.0 * p2;
    if disc >= 0.0 {
        let a = 0.5 * (1.0 + disc.sqrt());
        TwoRunsRoots::Real(a, p2 / a)
    } else {
        TwoRunsRoots::Complex {
            modulus: p,
            angle: (0.5 / p).acos(),
        }
    }
}

/// Closed-form coefficients for a parametric family.
///
/// | family | `g[j]` |
/// |---|---|
/// | Poisson(λ) | `λ` at `j = 0`, else 0 |
/// | Geometric(p) | `q^(j+1)` |
/// | NegBinomial(α, p) | `α q^(j+1)` |
/// | Binomial(n, p), Bernoulli | `n (-1)^j (p/q)^(j+1)` |
/// | TwoRunsV(p) | `a^(j+1) + b^(j+1)`, `a, b` the reciprocal roots of `1 - t + p²t²` |
///
/// Binomial and Bernoulli with `p >= 1/2` are rejected: the alternating
/// stream does not converge at `w = 1`.
pub fn g_closed_form(family: &ComponentFamily, trunc_len: usize) -> Result<GCoefficients> {
    if trunc_len == 0 {
        return Err(Error::InvalidParameter {
            family: "g_closed_form",
            reason: "trunc_len must be at least 1".into(),
        });
    }
    family.validate()?;
    let len = trunc_len;
    let geometric = |scale: f64, r: f64| -> GCoefficients {
        let coeffs = (0..len).map(|j| scale * r.powi(j as i32 + 1)).collect();
        GCoefficients::from_parts(
            coeffs,
            TailEnvelope {
                first: len,
                scale: scale * r.powi(len as i32 + 1),
                ratio: r,
            },
        )
    };
    let binomial = |n: f64, p: f64| -> Result<GCoefficients> {
        let r = p / (1.0 - p);
        if r >= 1.0 {
            return Err(Error::Divergent { ratio: r });
        }
        let coeffs = (0..len)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * n * r.powi(j as i32 + 1)
            })
            .collect();
        Ok(GCoefficients::from_parts(
            coeffs,
            TailEnvelope {
                first: len,
                scale: n * r.powi(len as i32 + 1),
                ratio: r,
            },
        ))
    };
    match family {
        ComponentFamily::Poisson { lambda } => {
            let mut coeffs = vec![0.0; len];
            coeffs[0] = *lambda;
            Ok(GCoefficients::from_parts(coeffs, TailEnvelope::zero(len)))
        }
        ComponentFamily::Geometric { p } => Ok(geometric(1.0, 1.0 - p)),
        ComponentFamily::NegBinomial { alpha, p } => Ok(geometric(*alpha, 1.0 - p)),
        ComponentFamily::Bernoulli { p } => binomial(1.0, *p),
        ComponentFamily::Binomial { n, p } => binomial(f64::from(*n), *p),
        ComponentFamily::TwoRunsV { p } => {
            let (coeffs, modulus): (Vec<f64>, f64) = match two_runs_roots(*p) {
                TwoRunsRoots::Real(a, b) => (
                    (0..len)
                        .map(|j| a.powi(j as i32 + 1) + b.powi(j as i32 + 1))
                        .collect(),
                    a,
                ),
                TwoRunsRoots::Complex { modulus, angle } => (
                    (0..len)
                        .map(|j| {
                            let k = j as f64 + 1.0;
                            2.0 * modulus.powf(k) * (k * angle).cos()
                        })
                        .collect(),
                    modulus,
                ),
            };
            Ok(GCoefficients::from_parts(
                coeffs,
                TailEnvelope {
                    first: len,
                    scale: 2.0 * modulus.powi(len as i32 + 1),
                    ratio: modulus,
                },
            ))
        }
        ComponentFamily::Custom { .. } => Err(Error::NoClosedForm),
    }
}

/// Power-series division of `ψ'` by `ψ` for the coefficient sequence
/// `probs` (entries beyond the slice are zero):
///
/// ```text
/// g[j] = ((j+1) P(j+1) - Σ_{k<j} g[k] P(j-k)) / P(0)
/// ```
///
/// The tail envelope is estimated from the decay of the last computed
/// coefficients (a ratio test over a window), so it is empirical rather
/// than certified.
pub fn g_from_series(probs: &[f64], trunc_len: usize) -> Result<GCoefficients> {
    let p0 = probs.first().copied().unwrap_or(0.0);
    if !(p0 > 0.0) {
        return Err(Error::ZeroAtOrigin);
    }
    if trunc_len == 0 {
        return Err(Error::InvalidParameter {
            family: "g_from_series",
            reason: "trunc_len must be at least 1".into(),
        });
    }
    let at = |j: usize| probs.get(j).copied().unwrap_or(0.0);
    let mut g: Vec<f64> = Vec::with_capacity(trunc_len);
    for j in 0..trunc_len {
        let mut acc = (j as f64 + 1.0) * at(j + 1);
        for (k, gk) in g.iter().enumerate() {
            let pj = at(j - k);
            if pj != 0.0 {
                acc -= gk * pj;
            }
        }
        g.push(acc / p0);
    }
    let envelope = empirical_envelope(&g);
    Ok(GCoefficients::from_parts(g, envelope))
}

fn empirical_envelope(g: &[f64]) -> TailEnvelope {
    let len = g.len();
    let window = RATIO_WINDOW.min(len / 2);
    if window == 0 {
        // Too short to estimate a ratio.
        return TailEnvelope {
            first: len,
            scale: g.last().map_or(0.0, |v| v.abs()),
            ratio: if g.last().is_none_or(|v| *v == 0.0) {
                0.0
            } else {
                1.0
            },
        };
    }
    let max_abs = |s: &[f64]| s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let overall = max_abs(g);
    let recent = max_abs(&g[len - window..]);
    let earlier = max_abs(&g[len - 2 * window..len - window]);
    if recent <= f64::EPSILON * overall {
        // Numerically terminated stream (e.g. Poisson): what is left is round-off.
        return TailEnvelope {
            first: len,
            scale: recent,
            ratio: 0.0,
        };
    }
    if earlier == 0.0 {
        return TailEnvelope {
            first: len,
            scale: recent,
            ratio: f64::INFINITY,
        };
    }
    let ratio = (recent / earlier).powf(1.0 / window as f64);
    TailEnvelope {
        first: len,
        scale: recent * ratio,
        ratio,
    }
}

/// [`g_from_series`] applied to a materialized law. Coefficients up to
/// index `pmf.len() - 2` use only stored probabilities; later ones see the
/// truncated tail as zeros.
pub fn g_from_pmf(pmf: &TruncatedPmf, trunc_len: usize) -> Result<GCoefficients> {
    g_from_series(pmf.probs(), trunc_len)
}

/// A stream whose remainder is at most `tol`, lengthening the truncation
/// from [`DEFAULT_TRUNC_LEN`] as needed. Custom PMFs go through the
/// division route; a stream that fails the ratio test is rejected.
pub fn g_stream(family: &ComponentFamily, tol: f64) -> Result<GCoefficients> {
    let mut len = DEFAULT_TRUNC_LEN;
    loop {
        let g = match family {
            ComponentFamily::Custom { probs } => {
                family.validate()?;
                g_from_series(probs, len)?
            }
            _ => g_closed_form(family, len)?,
        };
        if !g.converges_at_one() {
            return Err(Error::Divergent {
                ratio: g.envelope().ratio,
            });
        }
        if g.remainder_bound() <= tol {
            return Ok(g);
        }
        if len >= MAX_TRUNC_LEN {
            return Err(Error::Divergent {
                ratio: g.envelope().ratio,
            });
        }
        len *= 2;
    }
}

/// Outcome of comparing `Σ g[j]` with the analytic mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumCheck {
    pub sum: f64,
    pub mean: f64,
    pub abs_error: f64,
    pub tolerance: f64,
    pub ok: bool,
}

pub fn g_sum_check(g: &GCoefficients, family: &ComponentFamily) -> SumCheck {
    let sum = g.sum();
    let mean = family.mean();
    let abs_error = (sum - mean).abs();
    let tolerance = g.remainder_bound() + 1e-10;
    SumCheck {
        sum,
        mean,
        abs_error,
        tolerance,
        ok: abs_error <= tolerance,
    }
}

/// `P(V = j)` for `j < len` from the series expansion of `p²/(1 - t + p²t²)`:
///
/// ```text
/// P(V = j) = Σ_{ℓ=0}^{⌊j/2⌋} C(j-ℓ, ℓ) (-1)^ℓ p^{2(ℓ+1)}
/// ```
///
/// Generic so it can run in exact rational arithmetic. The alternating sum
/// cancels badly in floating point for large `j`; use
/// [`two_runs_pmf_recurrence`] there.
pub fn two_runs_pmf_binomial_sums<T: Num + Clone>(p_sq: &T, len: usize) -> Vec<T> {
    // Pascal's triangle up to row len - 1.
    let mut rows: Vec<Vec<T>> = Vec::with_capacity(len);
    for n in 0..len {
        let mut row = vec![T::one(); n + 1];
        for k in 1..n {
            row[k] = rows[n - 1][k - 1].clone() + rows[n - 1][k].clone();
        }
        rows.push(row);
    }
    (0..len)
        .map(|j| {
            let mut total = T::zero();
            let mut power = p_sq.clone();
            for l in 0..=j / 2 {
                let term = rows[j - l][l].clone() * power.clone();
                total = if l % 2 == 0 {
                    total + term
                } else {
                    total - term
                };
                power = power * p_sq.clone();
            }
            total
        })
        .collect()
}

/// `P(V = j)` for `j < len` from `c_j = c_{j-1} - p² c_{j-2}`, `c_0 = c_1 = 1`,
/// `P(V = j) = p² c_j`.
pub fn two_runs_pmf_recurrence<T: Num + Clone>(p_sq: &T, len: usize) -> Vec<T> {
    let mut c: Vec<T> = Vec::with_capacity(len);
    for j in 0..len {
        let next = if j < 2 {
            T::one()
        } else {
            c[j - 1].clone() - p_sq.clone() * c[j - 2].clone()
        };
        c.push(next);
    }
    c.into_iter().map(|v| p_sq.clone() * v).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmf::{materialize, materialize_min_len};

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        for (j, (x, y)) in a.iter().zip(b).enumerate() {
            assert!((x - y).abs() <= tol, "index {j}: {x} vs {y}");
        }
    }

    #[test]
    fn poisson_stream() {
        let g = g_closed_form(&ComponentFamily::Poisson { lambda: 2.0 }, 5).unwrap();
        assert_eq!(g.coeffs(), &[2.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(g.remainder_bound(), 0.0);
        assert!(g.converges_at_one());
    }

    #[test]
    fn geometric_stream() {
        let g = g_closed_form(&ComponentFamily::Geometric { p: 0.5 }, 3).unwrap();
        assert_eq!(g.coeffs(), &[0.5, 0.25, 0.125]);
        // Σ_{j≥3} 0.5^{j+1} = 0.125
        assert!((g.remainder_bound() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn negbin_stream_matches_division() {
        let f = ComponentFamily::NegBinomial { alpha: 5.0, p: 0.9 };
        let closed = g_closed_form(&f, 40).unwrap();
        for (j, v) in closed.coeffs().iter().enumerate() {
            assert!((v - 5.0 * 0.1f64.powi(j as i32 + 1)).abs() < 1e-15);
        }
        let pmf = materialize_min_len(&f, 1e-12, 41).unwrap();
        let div = g_from_pmf(&pmf, 40).unwrap();
        assert_close(closed.coeffs(), div.coeffs(), 1e-12);
        // With the default truncation only the stored support is exact.
        let short = materialize(&f, 1e-12).unwrap();
        let div = g_from_pmf(&short, 40).unwrap();
        assert_close(closed.coeffs(), div.coeffs(), 1e-10);
    }

    #[test]
    fn division_recovers_poisson_and_geometric() {
        let po = materialize_min_len(&ComponentFamily::Poisson { lambda: 2.0 }, 1e-12, 31).unwrap();
        let g = g_from_pmf(&po, 30).unwrap();
        assert!((g.coeffs()[0] - 2.0).abs() < 1e-10);
        assert!(g.coeffs()[1..].iter().all(|v| v.abs() < 1e-10));

        let ge = materialize(&ComponentFamily::Geometric { p: 0.3 }, 1e-12).unwrap();
        let g = g_from_pmf(&ge, 30).unwrap();
        for (j, v) in g.coeffs().iter().enumerate() {
            assert!((v - 0.7f64.powi(j as i32 + 1)).abs() < 1e-10, "j = {j}");
        }
    }

    #[test]
    fn two_runs_quotient_at_half() {
        // ψ'/ψ = (1 - 2p²t)/(1 - t + p²t²) = 1/(1 - t/2) at p = 1/2.
        let f = ComponentFamily::TwoRunsV { p: 0.5 };
        let div = g_from_pmf(&materialize(&f, 1e-12).unwrap(), 3).unwrap();
        assert_close(div.coeffs(), &[1.0, 0.5, 0.25], 1e-12);
        let closed = g_closed_form(&f, 3).unwrap();
        assert_close(closed.coeffs(), &[1.0, 0.5, 0.25], 1e-15);
    }

    #[test]
    fn two_runs_stream_recurrence() {
        for p in [0.1, 0.3, 0.45, 0.5, 0.6, 0.7] {
            let g = g_closed_form(&ComponentFamily::TwoRunsV { p }, 60).unwrap();
            let c = g.coeffs();
            for j in 2..60 {
                assert!(
                    (c[j] - (c[j - 1] - p * p * c[j - 2])).abs() < 1e-12,
                    "p={p} j={j}"
                );
            }
        }
    }

    #[test]
    fn binomial_at_or_above_half_diverges() {
        for p in [0.5, 0.7] {
            let r = g_closed_form(&ComponentFamily::Binomial { n: 4, p }, 10);
            assert!(matches!(r, Err(Error::Divergent { .. })));
        }
        let r = g_closed_form(&ComponentFamily::Bernoulli { p: 0.6 }, 10);
        assert!(matches!(r, Err(Error::Divergent { .. })));
    }

    #[test]
    fn division_flags_divergent_binomial() {
        let pmf = materialize(&ComponentFamily::Binomial { n: 5, p: 0.6 }, 1e-12).unwrap();
        let g = g_from_pmf(&pmf, 60).unwrap();
        assert!(!g.converges_at_one());
        assert!(g_stream(
            &ComponentFamily::Custom {
                probs: pmf.probs().to_vec()
            },
            1e-12
        )
        .is_err());
    }

    #[test]
    fn division_rejects_zero_at_origin() {
        assert!(matches!(
            g_from_series(&[0.0, 1.0], 5),
            Err(Error::ZeroAtOrigin)
        ));
    }

    #[test]
    fn binomial_signs_alternate() {
        let g = g_closed_form(&ComponentFamily::Binomial { n: 3, p: 0.2 }, 30).unwrap();
        let c = g.coeffs();
        for j in 0..30 {
            assert_eq!(c[j] > 0.0, j % 2 == 0);
            if j > 0 {
                assert!((c[j].abs() / c[j - 1].abs() - 0.25).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sum_checks() {
        let cases = [
            (ComponentFamily::Geometric { p: 0.5 }, 1.0),
            (ComponentFamily::TwoRunsV { p: 0.5 }, 2.0),
            (ComponentFamily::Poisson { lambda: 3.0 }, 3.0),
        ];
        for (f, mean) in cases {
            let g = g_stream(&f, DEFAULT_SERIES_TOL).unwrap();
            let check = g_sum_check(&g, &f);
            assert!(check.ok, "{f}: {check:?}");
            assert!((check.sum - mean).abs() < 1e-10);
        }
    }

    #[test]
    fn weighted_tail_matches_direct_sum() {
        let env = TailEnvelope {
            first: 5,
            scale: 0.3,
            ratio: 0.8,
        };
        for power in 0..=2 {
            let direct: f64 = (5..5000)
                .map(|j| (f64::from(j) + 1.0).powi(power) * 0.3 * 0.8f64.powi(j - 5))
                .sum();
            let bound = env.weighted_tail(power);
            assert!(bound >= direct * (1.0 - 1e-12));
            assert!(bound <= direct * (1.0 + 1e-9));
        }
    }

    #[test]
    fn stream_lengthens_for_slow_decay() {
        let g = g_stream(&ComponentFamily::TwoRunsV { p: 0.1 }, 1e-12).unwrap();
        assert!(g.len() > DEFAULT_TRUNC_LEN);
        assert!(g.remainder_bound() <= 1e-12);
    }
}
