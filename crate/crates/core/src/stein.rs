//! Stein operators for the Poisson law, for a convolution `W` described by
//! its coefficient streams, and for `Z = X + Y` with `X ~ Po(λ)`,
//! `Y ~ Ge(p)`; plus the constants and the perturbation combinator used by
//! the bounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gcoeff::GCoefficients;
use crate::pmf::{CompensatedSum, TruncatedPmf};

/// A finite test function `h(0), …, h(M)`, extended by `h(M)` beyond `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    values: Vec<f64>,
    sup_norm: f64,
    delta_sup_norm: f64,
}

impl TestFunction {
    /// Requires `h(0) = 0` and finite values.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let invalid = |reason: &str| Error::InvalidParameter {
            family: "TestFunction",
            reason: reason.into(),
        };
        match values.first() {
            None => return Err(invalid("no values")),
            Some(&h0) if h0 != 0.0 => return Err(invalid("h(0) must be 0")),
            _ => {}
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("values must be finite"));
        }
        let sup_norm = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let delta_sup_norm = values
            .windows(2)
            .fold(0.0f64, |m, w| m.max((w[1] - w[0]).abs()));
        Ok(TestFunction {
            values,
            sup_norm,
            delta_sup_norm,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest stored index `M`.
    pub fn last_index(&self) -> usize {
        self.values.len() - 1
    }

    pub fn at(&self, j: usize) -> f64 {
        self.values[j.min(self.last_index())]
    }

    /// `Δh(j) = h(j+1) - h(j)`.
    pub fn delta(&self, j: usize) -> f64 {
        self.at(j + 1) - self.at(j)
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn delta_sup_norm(&self) -> f64 {
        self.delta_sup_norm
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SteinOperatorSpec {
    /// `λ h(j+1) - j h(j)`.
    Poisson { lambda: f64 },
    /// `Σ_i Σ_k g_i[k] h(j+k+1) - j h(j)`.
    Convolution(Vec<GCoefficients>),
    /// `λ h(j+1) - j h(j) + Σ_k q^{k+1} h(j+k+1)`.
    PoissonGeometric { lambda: f64, p: f64 },
}

#[derive(Debug, Clone)]
enum Kernel {
    Poisson {
        lambda: f64,
    },
    Convolution {
        /// `Σ_i g_i[k]`.
        combined: Vec<f64>,
        /// `suffix[k] = Σ_{m >= k} combined[m]`.
        suffix: Vec<f64>,
        remainder: f64,
    },
    PoissonGeometric {
        lambda: f64,
        q: f64,
    },
}

/// A validated operator with precomputed coefficient sums.
#[derive(Debug, Clone)]
pub struct SteinOperator {
    spec: SteinOperatorSpec,
    kernel: Kernel,
}

impl SteinOperator {
    pub fn new(spec: SteinOperatorSpec) -> Result<Self> {
        let kernel = match &spec {
            SteinOperatorSpec::Poisson { lambda } => {
                if !(lambda.is_finite() && *lambda > 0.0) {
                    return Err(Error::InvalidParameter {
                        family: "PoissonOp",
                        reason: format!("lambda = {lambda} must be positive"),
                    });
                }
                Kernel::Poisson { lambda: *lambda }
            }
            SteinOperatorSpec::Convolution(streams) => {
                if streams.is_empty() {
                    return Err(Error::EmptyComponents);
                }
                let len = streams.iter().map(GCoefficients::len).max().unwrap_or(0);
                let mut combined = vec![0.0; len];
                let mut remainder = 0.0;
                for g in streams {
                    if !g.converges_at_one() {
                        return Err(Error::Divergent {
                            ratio: g.envelope().ratio,
                        });
                    }
                    for (c, v) in combined.iter_mut().zip(g.coeffs()) {
                        *c += v;
                    }
                    remainder += g.remainder_bound();
                }
                let mut suffix = vec![0.0; len + 1];
                for k in (0..len).rev() {
                    suffix[k] = suffix[k + 1] + combined[k];
                }
                Kernel::Convolution {
                    combined,
                    suffix,
                    remainder,
                }
            }
            SteinOperatorSpec::PoissonGeometric { lambda, p } => {
                if !(lambda.is_finite() && *lambda > 0.0 && *p > 0.0 && *p < 1.0) {
                    return Err(Error::InvalidParameter {
                        family: "PoissonGeometricOp",
                        reason: format!("need lambda > 0 and p in (0, 1), got ({lambda}, {p})"),
                    });
                }
                Kernel::PoissonGeometric {
                    lambda: *lambda,
                    q: 1.0 - p,
                }
            }
        };
        Ok(SteinOperator { spec, kernel })
    }

    pub fn spec(&self) -> &SteinOperatorSpec {
        &self.spec
    }

    /// Bound on `Σ_k |coefficient_k|` beyond the stored terms.
    fn remainder(&self) -> f64 {
        match &self.kernel {
            Kernel::Convolution { remainder, .. } => *remainder,
            _ => 0.0,
        }
    }

    /// `Σ_k |coefficient of h(j+k+1)|`.
    fn coefficient_mass(&self) -> f64 {
        match &self.kernel {
            Kernel::Poisson { lambda } => *lambda,
            Kernel::Convolution {
                combined,
                remainder,
                ..
            } => combined.iter().map(|c| c.abs()).sum::<f64>() + remainder,
            Kernel::PoissonGeometric { lambda, q } => lambda + q / (1.0 - q),
        }
    }
}

/// A value with the truncation error it may carry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub value: f64,
    pub uncertainty: f64,
}

/// `(𝒜h)(j)` in the form `Σ_k c_k h(j+k+1) - j h(j)`.
///
/// Terms with `j + k + 1 >= M` all see `h(M)` and are summed in closed form;
/// for the convolution operator the stream remainder contributes
/// `‖h‖ · remainder` to the uncertainty.
pub fn apply_operator(op: &SteinOperator, h: &TestFunction, j: usize) -> Evaluation {
    let m = h.last_index();
    let h_last = h.at(m);
    // Number of k with j + k + 1 < M.
    let explicit = m.saturating_sub(j + 1);
    let jh = j as f64 * h.at(j);
    match &op.kernel {
        Kernel::Poisson { lambda } => Evaluation {
            value: lambda * h.at(j + 1) - jh,
            uncertainty: 0.0,
        },
        Kernel::Convolution {
            combined, suffix, ..
        } => {
            let cut = explicit.min(combined.len());
            let mut acc = CompensatedSum::default();
            for (k, c) in combined[..cut].iter().enumerate() {
                acc.add(c * h.at(j + k + 1));
            }
            acc.add(h_last * suffix[cut]);
            acc.add(-jh);
            Evaluation {
                value: acc.value(),
                uncertainty: h.sup_norm() * op.remainder(),
            }
        }
        Kernel::PoissonGeometric { lambda, q } => {
            let mut acc = CompensatedSum::default();
            acc.add(lambda * h.at(j + 1));
            let mut qk = *q;
            for k in 0..explicit {
                acc.add(qk * h.at(j + k + 1));
                qk *= q;
            }
            // Σ_{k >= explicit} q^{k+1} = q^{explicit+1} / (1 - q)
            acc.add(h_last * qk / (1.0 - q));
            acc.add(-jh);
            Evaluation {
                value: acc.value(),
                uncertainty: 0.0,
            }
        }
    }
}

/// `(𝒜h)(j)` rewritten through `h(j+k+1) = h(j+1) + Σ_{l=1}^{k} Δh(j+l)`:
///
/// ```text
/// (Σ_k c_k) h(j+1) - j h(j) + Σ_k c_k Σ_{l=1}^{k} Δh(j+l)
/// ```
///
/// Uses the same truncation as [`apply_operator`], so the two agree to
/// round-off.
pub fn apply_operator_delta_form(op: &SteinOperator, h: &TestFunction, j: usize) -> f64 {
    let jh = j as f64 * h.at(j);
    match &op.kernel {
        Kernel::Poisson { lambda } => lambda * h.at(j + 1) - jh,
        Kernel::Convolution { combined, .. } => {
            let mu: f64 = combined.iter().sum();
            let mut acc = CompensatedSum::default();
            acc.add(mu * h.at(j + 1));
            acc.add(-jh);
            let mut diffs = 0.0;
            for (k, c) in combined.iter().enumerate() {
                if k > 0 {
                    diffs += h.delta(j + k);
                }
                acc.add(c * diffs);
            }
            acc.value()
        }
        Kernel::PoissonGeometric { lambda, q } => {
            let m = h.last_index();
            let mut acc = CompensatedSum::default();
            acc.add((lambda + q / (1.0 - q)) * h.at(j + 1));
            acc.add(-jh);
            // Δh(j+l) vanishes once j + l >= M, so the inner sums freeze at
            // k = M - j - 1 and the rest is geometric.
            let frozen = m.saturating_sub(j + 1);
            let mut diffs = 0.0;
            let mut qk = *q;
            for k in 0..frozen {
                if k > 0 {
                    diffs += h.delta(j + k);
                }
                acc.add(qk * diffs);
                qk *= q;
            }
            if frozen > 0 {
                diffs += h.delta(j + frozen);
            }
            acc.add(diffs * qk / (1.0 - q));
            acc.value()
        }
    }
}

/// `E[(𝒜h)(X)] = Σ_j (𝒜h)(j) P(X = j)`, which vanishes when `law` is the
/// law the operator characterises.
///
/// The uncertainty collects the operator's truncation error and an
/// estimate of the unstored tail of `law`, taken as
/// `tail_bound · ‖h‖ · (Σ|c_k| + 2N)` with `N` the stored support length.
pub fn operator_expectation(
    op: &SteinOperator,
    h: &TestFunction,
    law: &TruncatedPmf,
) -> Evaluation {
    let mut acc = CompensatedSum::default();
    let mut uncertainty = 0.0;
    for (j, &p) in law.probs().iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let e = apply_operator(op, h, j);
        acc.add(e.value * p);
        uncertainty += e.uncertainty * p;
    }
    uncertainty +=
        law.tail_bound() * h.sup_norm() * (op.coefficient_mass() + 2.0 * law.len() as f64);
    Evaluation {
        value: acc.value(),
        uncertainty,
    }
}

/// Bound on `‖Δh_f‖` for the Poisson(λ) Stein equation: `1/max(1, λ)`, or
/// the coefficient `2/max(1, λ)` of `‖f‖` when `f_norm_form` is set.
pub fn poisson_solution_bound(lambda: f64, f_norm_form: bool) -> f64 {
    let base = 1.0 / lambda.max(1.0);
    if f_norm_form {
        2.0 * base
    } else {
        base
    }
}

/// Perturbation combinator: if `𝒜₂ = 𝒜₁ + U` with `‖Δh₀‖ <= w1 ‖f‖ min(1, 1/α)`
/// for the solutions of the `𝒜₁` equation, `‖Uh‖ <= w2 ‖Δh‖` and
/// `|E 𝒜₂h(X₃)| <= ε ‖Δh‖`, then
///
/// ```text
/// d_TV(X₂, X₃) <= α / (2(α - w1 w2)) · (ε w1 min(1, 1/α) + 2 P(X₂ ∉ S) + 2 P(X₃ ∉ S))
/// ```
///
/// provided `w1 w2 < α`.
pub fn perturbation_bound(
    alpha: f64,
    w1: f64,
    w2: f64,
    eps: f64,
    p2_out: f64,
    p3_out: f64,
) -> Result<f64> {
    let nonneg = |name: &str, v: f64| -> Result<()> {
        if v.is_finite() && v >= 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter {
                family: "perturbation_bound",
                reason: format!("{name} = {v} must be finite and non-negative"),
            })
        }
    };
    nonneg("alpha", alpha)?;
    nonneg("w1", w1)?;
    nonneg("w2", w2)?;
    nonneg("eps", eps)?;
    nonneg("p2_out", p2_out)?;
    nonneg("p3_out", p3_out)?;
    if alpha == 0.0 || w1 == 0.0 || p2_out > 1.0 || p3_out > 1.0 {
        return Err(Error::InvalidParameter {
            family: "perturbation_bound",
            reason: "alpha and w1 must be positive and the outside probabilities at most 1".into(),
        });
    }
    let slack = alpha - w1 * w2;
    if slack <= 0.0 {
        return Err(Error::Precondition(format!(
            "perturbation hypothesis w1 * w2 < alpha fails: {w1} * {w2} >= {alpha}"
        )));
    }
    Ok(alpha / (2.0 * slack) * (eps * w1 * (1.0 / alpha).min(1.0) + 2.0 * p2_out + 2.0 * p3_out))
}
