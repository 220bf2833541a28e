//! Generalization bounds for distributed minimax learning and a
//! Monte-Carlo estimator of empirical Rademacher complexity.
//!
//! The bound evaluators are plain formulas. The cover size `|𝒴_ε|` and the
//! Rademacher term are inputs; nothing here constructs covers.

mod rademacher;

pub use rademacher::{estimate_rademacher, FiniteHypothesisSample, RademacherEstimate};

use crate::error::{FedError, Result};
use crate::scalar::Scalar;

/// Inputs shared by the bound evaluators.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundInputs<T> {
    /// Number of agents `m`.
    pub m: usize,
    /// Samples per agent `n`.
    pub n: usize,
    /// Per-agent loss bounds `M_i(y)` at the `y` of interest (length `m`).
    pub m_i: Vec<T>,
    /// Further `M_i(y)` profiles at other `y`, used by the worst-case bound
    /// (maximum of `Σ M_i²` over `m_i` and every profile).
    pub m_i_profiles: Vec<Vec<T>>,
    /// `|𝒴_ε| ≥ 1`.
    pub cover_size: T,
    /// Confidence parameter in `(0, 1)`.
    pub delta: T,
    pub epsilon: T,
    /// Lipschitz constant of the loss in `y`.
    pub l_y: T,
    /// Rademacher complexity term, supplied or estimated.
    pub rademacher: T,
}

/// Additive decomposition of a bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundTerms<T> {
    /// Empirical (or worst-case empirical) risk.
    pub empirical: T,
    /// `2ℛ`.
    pub complexity: T,
    /// `√(Σ M_i² / (2m²n) · log(|𝒴_ε|/δ))`.
    pub concentration: T,
    /// `2 L_y ε`.
    pub discretization: T,
    pub total: T,
}

impl<T: Scalar> BoundInputs<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(FedError::InvalidInput(msg));
        if self.m == 0 || self.n == 0 {
            return bad(format!(
                "need m >= 1 and n >= 1 (got m = {}, n = {})",
                self.m, self.n
            ));
        }
        for profile in std::iter::once(&self.m_i).chain(&self.m_i_profiles) {
            if profile.len() != self.m {
                return bad(format!(
                    "M_i needs {} entries, got {}",
                    self.m,
                    profile.len()
                ));
            }
            if profile.iter().any(|v| !(*v >= T::zero()) || !v.is_finite()) {
                return bad("M_i entries must be finite and nonnegative".into());
            }
        }
        if !(self.cover_size >= T::one()) || !self.cover_size.is_finite() {
            return bad(format!("cover_size must be >= 1 (got {})", self.cover_size));
        }
        if !(self.delta > T::zero() && self.delta < T::one()) {
            return bad(format!("delta must lie in (0, 1) (got {})", self.delta));
        }
        if !(self.epsilon > T::zero()) || !self.epsilon.is_finite() {
            return bad(format!("epsilon must be positive (got {})", self.epsilon));
        }
        if !(self.l_y >= T::zero()) || !self.l_y.is_finite() {
            return bad(format!("L_y must be nonnegative (got {})", self.l_y));
        }
        if !(self.rademacher >= T::zero()) || !self.rademacher.is_finite() {
            return bad(format!(
                "rademacher must be nonnegative (got {})",
                self.rademacher
            ));
        }
        Ok(())
    }

    /// `Σ_i M_i²` at the `y` of interest.
    pub fn sum_m2(&self) -> T {
        sum_sq(&self.m_i)
    }

    /// `max_y Σ_i M_i²(y)` over `m_i` and the extra profiles.
    pub fn max_sum_m2(&self) -> T {
        self.m_i_profiles
            .iter()
            .map(|p| sum_sq(p))
            .fold(self.sum_m2(), T::max)
    }

    fn terms(&self, empirical: T, sum_m2: T) -> BoundTerms<T> {
        let two = T::lit(2.0);
        let m = T::from_count(self.m);
        let n = T::from_count(self.n);
        let complexity = two * self.rademacher;
        let concentration =
            (sum_m2 / (two * m * m * n) * (self.cover_size / self.delta).ln()).sqrt();
        let discretization = two * self.l_y * self.epsilon;
        BoundTerms {
            empirical,
            complexity,
            concentration,
            discretization,
            total: empirical + complexity + concentration + discretization,
        }
    }
}

fn sum_sq<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, &x| acc + x * x)
}

/// Population-risk bound at a fixed `(x, y)`:
///
/// `R(x,y) ≤ f(x,y) + 2ℛ(𝒳,y) + √(Σ_i M_i²(y)/(2m²n) · log(|𝒴_ε|/δ)) + 2L_y ε`.
pub fn fixed_y_bound<T: Scalar>(
    inputs: &BoundInputs<T>,
    empirical_risk: T,
) -> Result<BoundTerms<T>> {
    inputs.validate()?;
    Ok(inputs.terms(empirical_risk, inputs.sum_m2()))
}

/// Worst-case population-risk bound:
///
/// `Q(x) ≤ g(x) + 2ℛ(𝒳,𝒴) + √(max_y {Σ_i M_i²(y)/(2m²n)} · log(|𝒴_ε|/δ)) + 2L_y ε`,
///
/// where `g(x) = max_y f(x, y)` and `inputs.rademacher` holds `ℛ(𝒳,𝒴)`.
pub fn worst_case_bound<T: Scalar>(
    inputs: &BoundInputs<T>,
    worst_case_empirical: T,
) -> Result<BoundTerms<T>> {
    inputs.validate()?;
    Ok(inputs.terms(worst_case_empirical, inputs.max_sum_m2()))
}

/// Rademacher bound for a hypothesis class of VC-dimension `d`:
///
/// `√(2d · max_y{Σ_i M_i²(y)} / (m²n) · (1 + log(mn/d)))`, valid for `mn ≥ d`.
pub fn vc_rademacher_bound<T: Scalar>(m: usize, n: usize, d: usize, max_sum_m2: T) -> Result<T> {
    if d == 0 {
        return Err(FedError::InvalidInput("VC-dimension must be >= 1".into()));
    }
    if m.checked_mul(n).is_none_or(|mn| mn < d) {
        return Err(FedError::InvalidInput(format!(
            "need mn >= d (got m = {m}, n = {n}, d = {d})"
        )));
    }
    if !(max_sum_m2 >= T::zero()) || !max_sum_m2.is_finite() {
        return Err(FedError::InvalidInput(format!(
            "max sum of M_i^2 must be finite and nonnegative (got {max_sum_m2})"
        )));
    }
    let (mf, nf, df) = (T::from_count(m), T::from_count(n), T::from_count(d));
    let log_term = T::one() + (mf * nf / df).ln();
    Ok((T::lit(2.0) * df * max_sum_m2 / (mf * mf * nf) * log_term).sqrt())
}
