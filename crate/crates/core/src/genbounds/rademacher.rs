use crate::datagen::StreamRng;
use crate::error::{FedError, Result};
use crate::scalar::Scalar;

const SIGMA_STREAM: u64 = 0x5a;

/// Losses `l(x, y; ξ_{i,j})` of a finite candidate set at a fixed `y`.
///
/// Row `r` belongs to candidate `x_r`; columns run agent-major then
/// sample-minor, `m·n` in total.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteHypothesisSample<T> {
    m: usize,
    n: usize,
    rows: usize,
    table: Vec<T>,
}

impl<T: Scalar> FiniteHypothesisSample<T> {
    pub fn new(m: usize, n: usize, table: Vec<Vec<T>>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(FedError::InvalidInput("need m >= 1 and n >= 1".into()));
        }
        if table.is_empty() {
            return Err(FedError::InvalidInput("empty candidate set".into()));
        }
        let cols = m * n;
        let rows = table.len();
        let mut flat = Vec::with_capacity(rows * cols);
        for row in &table {
            if row.len() != cols {
                return Err(FedError::DimensionMismatch {
                    context: "loss table row",
                    expected: cols,
                    actual: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(FedError::NonFinite("loss table"));
            }
            flat.extend_from_slice(row);
        }
        Ok(Self {
            m,
            n,
            rows,
            table: flat,
        })
    }

    pub fn num_candidates(&self) -> usize {
        self.rows
    }

    pub fn num_samples(&self) -> usize {
        self.m * self.n
    }

    pub fn row(&self, r: usize) -> &[T] {
        let cols = self.num_samples();
        &self.table[r * cols..(r + 1) * cols]
    }

    /// Massart's finite-class cap `r √(2 log N) / (mn)` with `r` the largest
    /// row norm and `N` the number of candidates.
    pub fn massart_cap(&self) -> T {
        let r2 = (0..self.rows)
            .map(|r| self.row(r).iter().fold(T::zero(), |acc, &v| acc + v * v))
            .fold(T::zero(), T::max);
        (r2 * T::lit(2.0) * T::from_count(self.rows).ln()).sqrt()
            / T::from_count(self.num_samples())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RademacherEstimate<T> {
    pub mean: T,
    /// Standard error of `mean`; infinite for a single draw.
    pub std_error: T,
    pub draws: usize,
}

/// Empirical Rademacher complexity of a finite candidate set on one drawn
/// dataset: the average over σ draws of `max_r (1/mn) Σ σ_k l_{r,k}`.
pub fn estimate_rademacher<T: Scalar>(
    sample: &FiniteHypothesisSample<T>,
    num_sigma_draws: usize,
    seed: u64,
) -> Result<RademacherEstimate<T>> {
    if num_sigma_draws == 0 {
        return Err(FedError::InvalidInput(
            "need at least one sigma draw".into(),
        ));
    }
    let cols = sample.num_samples();
    let inv = T::one() / T::from_count(cols);
    let mut rng = StreamRng::new(seed, 0, SIGMA_STREAM);
    let mut sigma = vec![T::zero(); cols];
    // Welford accumulation of the per-draw suprema.
    let mut mean = T::zero();
    let mut m2 = T::zero();
    for draw in 0..num_sigma_draws {
        sigma.iter_mut().for_each(|s| *s = T::lit(rng.rademacher()));
        let sup = (0..sample.num_candidates())
            .map(|r| {
                sample
                    .row(r)
                    .iter()
                    .zip(&sigma)
                    .fold(T::zero(), |acc, (&l, &s)| acc + s * l)
                    * inv
            })
            .fold(T::neg_infinity(), T::max);
        let k = T::from_count(draw + 1);
        let delta = sup - mean;
        mean += delta / k;
        m2 += delta * (sup - mean);
    }
    let std_error = if num_sigma_draws > 1 {
        let var = m2 / T::from_count(num_sigma_draws - 1);
        (var / T::from_count(num_sigma_draws)).sqrt()
    } else {
        T::infinity()
    };
    Ok(RademacherEstimate {
        mean,
        std_error,
        draws: num_sigma_draws,
    })
}
