//! Mean, variance and factorial cumulants of `W = ξ_1 + … + ξ_n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gcoeff::GCoefficients;
use crate::pmf::{CompensatedSum, TruncatedPmf};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    pub mu: f64,
    pub sigma2: f64,
    /// Second factorial cumulant, `σ² - μ`.
    pub mu2: f64,
    /// Third factorial cumulant.
    pub mu3: f64,
    /// Bound on the error of each of the four values.
    pub uncertainty: f64,
}

/// Moments from the coefficient streams:
///
/// ```text
/// μ  = Σ_i Σ_j g_i[j]          σ² = Σ_i Σ_j (j+1) g_i[j]
/// μ₂ = Σ_i Σ_j j g_i[j]        μ₃ = Σ_i Σ_j j(j-1) g_i[j]
/// ```
///
/// The uncertainty adds each stream's tail envelope weighted by `(j+1)²`,
/// which dominates all four weights, plus a round-off allowance.
pub fn moments_of(components: &[GCoefficients]) -> Result<MomentSummary> {
    if components.is_empty() {
        return Err(Error::EmptyComponents);
    }
    let mut mu = CompensatedSum::default();
    let mut sigma2 = CompensatedSum::default();
    let mut mu2 = CompensatedSum::default();
    let mut mu3 = CompensatedSum::default();
    let mut tail = 0.0;
    let mut magnitude = 0.0;
    for g in components {
        if !g.converges_at_one() {
            return Err(Error::Divergent {
                ratio: g.envelope().ratio,
            });
        }
        for (j, &c) in g.coeffs().iter().enumerate() {
            let jf = j as f64;
            mu.add(c);
            sigma2.add((jf + 1.0) * c);
            mu2.add(jf * c);
            mu3.add(jf * (jf - 1.0) * c);
            magnitude += (jf + 1.0) * (jf + 1.0) * c.abs();
        }
        tail += g.envelope().weighted_tail(2);
    }
    Ok(MomentSummary {
        mu: mu.value(),
        sigma2: sigma2.value(),
        mu2: mu2.value(),
        mu3: mu3.value(),
        uncertainty: tail + 4.0 * f64::EPSILON * magnitude,
    })
}

/// Moments computed directly from a PMF, as an independent check on
/// [`moments_of`].
///
/// Mean and variance are `Σ j P(j)` and `Σ j² P(j) - mean²`; the factorial
/// cumulants come from the factorial moments `m_r = E[X(X-1)…(X-r+1)]`:
/// `μ₂ = m₂ - m₁²`, `μ₃ = m₃ - 3 m₁ m₂ + 2 m₁³`. Only the stored support
/// enters, so the reported uncertainty covers round-off but not the
/// moments of the truncated tail; use a small tail tolerance when
/// comparing.
pub fn moments_from_pmf(pmf: &TruncatedPmf) -> MomentSummary {
    let mut m1 = CompensatedSum::default();
    let mut m2 = CompensatedSum::default();
    let mut m3 = CompensatedSum::default();
    let mut magnitude = 0.0;
    for (j, &p) in pmf.probs().iter().enumerate() {
        let jf = j as f64;
        m1.add(jf * p);
        m2.add(jf * (jf - 1.0) * p);
        m3.add(jf * (jf - 1.0) * (jf - 2.0) * p);
        magnitude += jf * jf * jf * p;
    }
    let (m1, m2, m3) = (m1.value(), m2.value(), m3.value());
    let mu2 = m2 - m1 * m1;
    let mu3 = m3 - 3.0 * m1 * m2 + 2.0 * m1 * m1 * m1;
    MomentSummary {
        mu: m1,
        sigma2: mu2 + m1,
        mu2,
        mu3,
        uncertainty: 16.0 * f64::EPSILON * (magnitude + m1.powi(3)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gcoeff::{g_stream, DEFAULT_SERIES_TOL};
    use crate::pmf::{convolve_n, materialize, ComponentFamily};

    fn streams(fams: &[ComponentFamily]) -> Vec<GCoefficients> {
        fams.iter()
            .map(|f| g_stream(f, DEFAULT_SERIES_TOL).unwrap())
            .collect()
    }

    #[test]
    fn poisson_components() {
        let fams = [
            ComponentFamily::Poisson { lambda: 0.5 },
            ComponentFamily::Poisson { lambda: 1.5 },
            ComponentFamily::Poisson { lambda: 3.0 },
        ];
        let m = moments_of(&streams(&fams)).unwrap();
        assert_eq!(m.mu, 5.0);
        assert_eq!(m.sigma2, 5.0);
        assert_eq!(m.mu2, 0.0);
        assert_eq!(m.mu3, 0.0);
    }

    #[test]
    fn single_geometric() {
        for p in [0.3, 0.5, 0.8] {
            let q = 1.0 - p;
            let r = q / p;
            let m = moments_of(&streams(&[ComponentFamily::Geometric { p }])).unwrap();
            assert!((m.mu - r).abs() < 1e-12);
            assert!((m.mu2 - r * r).abs() < 1e-12);
            assert!((m.mu3 - 2.0 * r.powi(3)).abs() < 1e-12);
            assert!((m.sigma2 - q / (p * p)).abs() < 1e-12);
        }
    }

    #[test]
    fn ten_negbins() {
        let fams = vec![ComponentFamily::NegBinomial { alpha: 5.0, p: 0.9 }; 10];
        let m = moments_of(&streams(&fams)).unwrap();
        let r = 0.1 / 0.9;
        assert!((m.mu - 50.0 * r).abs() < 1e-12);
        assert!((m.mu2 - 50.0 * r * r).abs() < 1e-12);
        assert!((m.mu3 - 100.0 * r.powi(3)).abs() < 1e-12);
        assert!((m.mu - 5.5556).abs() < 5e-5);
        assert!((m.mu2 - 0.61728).abs() < 5e-6);
    }

    #[test]
    fn from_pmf_examples() {
        let po = materialize(&ComponentFamily::Poisson { lambda: 3.0 }, 1e-14).unwrap();
        let m = moments_from_pmf(&po);
        assert!((m.mu - 3.0).abs() < 1e-10);
        assert!((m.sigma2 - 3.0).abs() < 1e-10);
        assert!(m.mu3.abs() < 1e-9);

        let ge = materialize(&ComponentFamily::Geometric { p: 0.5 }, 1e-14).unwrap();
        let m = moments_from_pmf(&ge);
        assert!((m.mu - 1.0).abs() < 1e-10);
        assert!((m.sigma2 - 2.0).abs() < 1e-10);

        let w = convolve_n(&vec![ComponentFamily::Bernoulli { p: 0.1 }; 10], 1e-12).unwrap();
        let m = moments_from_pmf(&w);
        assert!((m.mu - 1.0).abs() < 1e-12);
        assert!((m.sigma2 - 0.9).abs() < 1e-12);
    }

    #[test]
    fn both_routes_agree_on_third_cumulant() {
        let fams = vec![
            ComponentFamily::NegBinomial { alpha: 2.0, p: 0.6 },
            ComponentFamily::Binomial { n: 4, p: 0.2 },
            ComponentFamily::TwoRunsV { p: 0.4 },
        ];
        let a = moments_of(&streams(&fams)).unwrap();
        let b = moments_from_pmf(&convolve_n(&fams, 1e-14).unwrap());
        assert!((a.mu3 - b.mu3).abs() < 1e-7, "{} vs {}", a.mu3, b.mu3);
    }

    #[test]
    fn divergent_stream_is_rejected() {
        let pmf = materialize(&ComponentFamily::Binomial { n: 5, p: 0.6 }, 1e-12).unwrap();
        let g = crate::gcoeff::g_from_pmf(&pmf, 60).unwrap();
        assert!(matches!(moments_of(&[g]), Err(Error::Divergent { .. })));
        assert!(matches!(moments_of(&[]), Err(Error::EmptyComponents)));
    }
}
