//! Seeded synthetic problem generation.
//!
//! # Random streams
//!
//! Every tensor is drawn from its own ChaCha20 stream. The key comes from
//! `ChaCha20Rng::seed_from_u64(seed)` and the stream id is
//! `(agent << 8) | tensor`, where `agent` is the one-based agent number
//! (0 for problem-wide draws) and `tensor` a small per-recipe constant.
//! Changing `m` therefore never changes the data of agents that remain.
//!
//! Gaussian draws use `rand_distr::StandardNormal` (ziggurat method),
//! shifted and scaled. Generation happens in `f64` and is converted to the
//! target scalar afterwards. Results are reproducible within this
//! implementation only.

mod dump;

pub use dump::{read_dataset, write_dataset, Dataset, DatasetHeader, DatasetKind, MAGIC};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{FedError, Result};
use crate::linalg::{Cholesky, DenseMatrix};
use crate::problems::{QuadraticAgent, RlrAgent, RobustLinearRegression, UncoupledQuadratic};
use crate::scalar::Scalar;

const QUAD_ALPHA: u64 = 0;
const QUAD_A: u64 = 1;
const QUAD_MEAN: u64 = 2;
const QUAD_THETA: u64 = 3;
const QUAD_NOISE: u64 = 4;

const RLR_MODEL: u64 = 1;
const RLR_CENTER: u64 = 2;
const RLR_MEAN: u64 = 3;
const RLR_FEATURES: u64 = 4;
const RLR_NOISE: u64 = 5;

/// Retries with `seed + 1, seed + 2, …` when `Σ Q_i` is numerically singular.
const MAX_REGENERATIONS: u64 = 3;

/// Seeded Gaussian source bound to one `(agent, tensor)` stream.
#[derive(Debug, Clone)]
pub struct StreamRng {
    rng: ChaCha20Rng,
}

impl StreamRng {
    pub fn new(seed: u64, agent: u64, tensor: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream((agent << 8) | (tensor & 0xff));
        Self { rng }
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn normal(&mut self, mean: f64, std_dev: f64) -> f64 {
        mean + std_dev * self.standard_normal()
    }

    pub fn normals(&mut self, n: usize, mean: f64, std_dev: f64) -> Vec<f64> {
        (0..n).map(|_| self.normal(mean, std_dev)).collect()
    }

    /// Uniform ±1.
    pub fn rademacher(&mut self) -> f64 {
        if self.rng.random::<bool>() {
            1.0
        } else {
            -1.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadraticGenSpec {
    pub m: usize,
    pub d: usize,
    /// Samples per agent (rows of `A_i`).
    pub n: usize,
    pub seed: u64,
}

impl QuadraticGenSpec {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.d == 0 {
            return Err(FedError::InvalidInput(
                "quadratic generation needs m >= 1 and d >= 1".into(),
            ));
        }
        if self.n < self.d {
            return Err(FedError::InvalidInput(format!(
                "quadratic generation needs n >= d (got n = {}, d = {})",
                self.n, self.d
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RlrGenSpec {
    pub m: usize,
    pub d: usize,
    pub n: usize,
    /// Heterogeneity scale of the agents' feature means.
    pub alpha: f64,
    pub seed: u64,
}

impl RlrGenSpec {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.d == 0 || self.n == 0 {
            return Err(FedError::InvalidInput(
                "rlr generation needs m, d, n >= 1".into(),
            ));
        }
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(FedError::InvalidInput(format!(
                "rlr heterogeneity alpha must be finite and >= 0, got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// `Q = AᵀA`, `c = Aᵀb` with `b = Aθ + ε`.
pub fn assemble_quadratic_agent<T: Scalar>(
    a: &DenseMatrix<f64>,
    theta: &[f64],
    noise: &[f64],
) -> Result<QuadraticAgent<T>> {
    let mut b = a.matvec(theta)?;
    crate::error::check_dim("quadratic noise", b.len(), noise.len())?;
    b.iter_mut().zip(noise).for_each(|(bi, &e)| *bi += e);
    let q = a.gram();
    let c = a.t_matvec(&b)?;
    QuadraticAgent::new(convert_matrix(&q), convert_vec(&c))
}

/// Uncoupled quadratic federation:
/// `[A_i]_kl ~ N(0, (0.5 i)⁻²)`, `α ~ N(0, 100)` once,
/// `[μ_i]_k ~ N(α, 1)`, `θ_i ~ N(μ_i, I)`, `ε_i ~ N(0, 0.25 I)`.
pub fn gen_quadratic<T: Scalar>(spec: &QuadraticGenSpec) -> Result<UncoupledQuadratic<T>> {
    spec.validate()?;
    let mut last_err = None;
    for attempt in 0..=MAX_REGENERATIONS {
        let seed = spec.seed.wrapping_add(attempt);
        match gen_quadratic_once(spec, seed).and_then(|p| check_solvable(p)) {
            Ok(p) => return Ok(p),
            Err(e @ FedError::Singular(_)) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or_else(|| FedError::Singular("quadratic generation failed".into())))
}

fn gen_quadratic_once<T: Scalar>(
    spec: &QuadraticGenSpec,
    seed: u64,
) -> Result<UncoupledQuadratic<T>> {
    let (d, n) = (spec.d, spec.n);
    let alpha = StreamRng::new(seed, 0, QUAD_ALPHA).normal(0.0, 10.0);
    let agents = (1..=spec.m as u64)
        .map(|i| {
            let std_a = 1.0 / (0.5 * i as f64);
            let a = StreamRng::new(seed, i, QUAD_A).normals(n * d, 0.0, std_a);
            let a = DenseMatrix::from_row_major(n, d, a)?;
            let mean = StreamRng::new(seed, i, QUAD_MEAN).normals(d, alpha, 1.0);
            let mut theta_rng = StreamRng::new(seed, i, QUAD_THETA);
            let theta: Vec<f64> = mean.iter().map(|&mu| theta_rng.normal(mu, 1.0)).collect();
            let noise = StreamRng::new(seed, i, QUAD_NOISE).normals(n, 0.0, 0.5);
            assemble_quadratic_agent(&a, &theta, &noise)
        })
        .collect::<Result<Vec<_>>>()?;
    UncoupledQuadratic::unconstrained(agents)
}

/// Rejects instances whose `Σ Q_i` solve leaves a relative residual above 1e-6.
fn check_solvable<T: Scalar>(p: UncoupledQuadratic<T>) -> Result<UncoupledQuadratic<T>> {
    let sq = p.sum_q();
    let sc = p.sum_c();
    let v = Cholesky::factor(&sq)?.solve(&sc)?;
    let back = sq.matvec(&v)?;
    let res = back
        .iter()
        .zip(&sc)
        .fold(0.0f64, |acc, (&a, &b)| acc + (a - b).to_f64_lossy().powi(2))
        .sqrt();
    let scale = 1.0 + crate::vector::norm(&sc).to_f64_lossy();
    if res / scale > 1e-6 {
        return Err(FedError::Singular(format!(
            "sum of agent matrices is numerically singular (residual {res:e})"
        )));
    }
    Ok(p)
}

/// Robust linear regression federation:
/// `x_i* ~ N(0, I)`, `[c_i]_k ~ N(0, α²)`, `μ_i ~ N(c_i, I)`,
/// `a_ij ~ N(μ_i, i^-1.3 I)`, `b_ij = x_i*ᵀa_ij + ε_j` with `ε_j ~ N(0, 1)`.
pub fn gen_rlr<T: Scalar>(spec: &RlrGenSpec) -> Result<RobustLinearRegression<T>> {
    gen_rlr_with_models(spec).map(|(p, _)| p)
}

/// As [`gen_rlr`], also returning each agent's ground-truth model `x_i*`.
pub fn gen_rlr_with_models<T: Scalar>(
    spec: &RlrGenSpec,
) -> Result<(RobustLinearRegression<T>, Vec<Vec<f64>>)> {
    spec.validate()?;
    let (d, n, seed) = (spec.d, spec.n, spec.seed);
    let mut models = Vec::with_capacity(spec.m);
    let mut agents = Vec::with_capacity(spec.m);
    for i in 1..=spec.m as u64 {
        let model = StreamRng::new(seed, i, RLR_MODEL).normals(d, 0.0, 1.0);
        let center = StreamRng::new(seed, i, RLR_CENTER).normals(d, 0.0, spec.alpha);
        let mut mean_rng = StreamRng::new(seed, i, RLR_MEAN);
        let mean: Vec<f64> = center.iter().map(|&c| mean_rng.normal(c, 1.0)).collect();
        let spread = (i as f64).powf(-1.3).sqrt();
        let mut feat_rng = StreamRng::new(seed, i, RLR_FEATURES);
        let mut noise_rng = StreamRng::new(seed, i, RLR_NOISE);
        let mut features = Vec::with_capacity(n * d);
        let mut targets = Vec::with_capacity(n);
        for _ in 0..n {
            let row: Vec<f64> = mean.iter().map(|&mu| feat_rng.normal(mu, spread)).collect();
            let b = crate::vector::dot_unchecked(&row, &model) + noise_rng.standard_normal();
            features.extend(row);
            targets.push(b);
        }
        let features = DenseMatrix::from_row_major(n, d, features)?;
        agents.push(RlrAgent::new(
            convert_matrix(&features),
            convert_vec(&targets),
        )?);
        models.push(model);
    }
    Ok((RobustLinearRegression::new(agents)?, models))
}

pub(crate) fn convert_vec<T: Scalar>(v: &[f64]) -> Vec<T> {
    v.iter().map(|&x| T::lit(x)).collect()
}

pub(crate) fn convert_matrix<T: Scalar>(m: &DenseMatrix<f64>) -> DenseMatrix<T> {
    DenseMatrix::from_row_major(m.rows(), m.cols(), convert_vec(m.as_slice())).expect("same shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{global_grad, MinimaxProblem};

    #[test]
    fn scalar_recipe_algebra() {
        let (a, t, e) = (1.7, -0.4, 0.25);
        let am = DenseMatrix::from_row_major(1, 1, vec![a]).unwrap();
        let agent: QuadraticAgent<f64> = assemble_quadratic_agent(&am, &[t], &[e]).unwrap();
        assert_eq!(agent.q().as_slice(), &[a * a]);
        assert!((agent.c()[0] - a * (a * t + e)).abs() < 1e-15);
    }

    #[test]
    fn tiny_spec_generates() {
        let spec = QuadraticGenSpec {
            m: 1,
            d: 1,
            n: 1,
            seed: 4,
        };
        let p: UncoupledQuadratic<f64> = gen_quadratic(&spec).unwrap();
        assert_eq!(p.num_agents(), 1);
        assert!(p.agents()[0].q().as_slice()[0] > 0.0);
    }

    #[test]
    fn quadratic_is_deterministic() {
        let spec = QuadraticGenSpec {
            m: 3,
            d: 4,
            n: 9,
            seed: 77,
        };
        let a: UncoupledQuadratic<f64> = gen_quadratic(&spec).unwrap();
        let b: UncoupledQuadratic<f64> = gen_quadratic(&spec).unwrap();
        for (x, y) in a.agents().iter().zip(b.agents()) {
            assert_eq!(x.q().as_slice(), y.q().as_slice());
            assert_eq!(x.c(), y.c());
        }
        let other: UncoupledQuadratic<f64> =
            gen_quadratic(&QuadraticGenSpec { seed: 78, ..spec }).unwrap();
        assert_ne!(other.agents()[0].c(), a.agents()[0].c());
    }

    #[test]
    fn agent_data_independent_of_federation_size() {
        let small: UncoupledQuadratic<f64> = gen_quadratic(&QuadraticGenSpec {
            m: 2,
            d: 3,
            n: 5,
            seed: 1,
        })
        .unwrap();
        let large: UncoupledQuadratic<f64> = gen_quadratic(&QuadraticGenSpec {
            m: 6,
            d: 3,
            n: 5,
            seed: 1,
        })
        .unwrap();
        assert_eq!(
            small.agents()[0].q().as_slice(),
            large.agents()[0].q().as_slice()
        );
        assert_eq!(small.agents()[1].c(), large.agents()[1].c());
        let r1: RobustLinearRegression<f64> = gen_rlr(&RlrGenSpec {
            m: 1,
            d: 2,
            n: 3,
            alpha: 2.0,
            seed: 5,
        })
        .unwrap();
        let r4: RobustLinearRegression<f64> = gen_rlr(&RlrGenSpec {
            m: 4,
            d: 2,
            n: 3,
            alpha: 2.0,
            seed: 5,
        })
        .unwrap();
        assert_eq!(r1.agents()[0].targets(), r4.agents()[0].targets());
    }

    #[test]
    fn reference_scale_instance_has_closed_form() {
        let spec = QuadraticGenSpec {
            m: 20,
            d: 50,
            n: 500,
            seed: 2024,
        };
        let p: UncoupledQuadratic<f64> = gen_quadratic(&spec).unwrap();
        let z = p.closed_form_minimax().unwrap();
        let (gx, gy) = global_grad(&p, &z).unwrap();
        let res = (crate::vector::norm2(&gx) + crate::vector::norm2(&gy)).sqrt();
        let scale = 1.0 + crate::vector::norm(&p.sum_c());
        assert!(res <= 1e-9 * scale, "residual {res:e}, scale {scale:e}");
    }

    #[test]
    fn spec_validation() {
        assert!(gen_quadratic::<f64>(&QuadraticGenSpec {
            m: 1,
            d: 3,
            n: 2,
            seed: 0
        })
        .is_err());
        assert!(gen_quadratic::<f64>(&QuadraticGenSpec {
            m: 0,
            d: 1,
            n: 2,
            seed: 0
        })
        .is_err());
        assert!(gen_rlr::<f64>(&RlrGenSpec {
            m: 1,
            d: 1,
            n: 1,
            alpha: -1.0,
            seed: 0
        })
        .is_err());
        assert!(gen_rlr::<f64>(&RlrGenSpec {
            m: 1,
            d: 1,
            n: 0,
            alpha: 1.0,
            seed: 0
        })
        .is_err());
    }

    #[test]
    fn rlr_zero_alpha_centers_vanish() {
        // With α = 0 the center draw N(0, 0) is exactly 0, so every mean μ_i
        // is a pure N(0, I) draw: reproduce it from the documented streams.
        let spec = RlrGenSpec {
            m: 3,
            d: 2,
            n: 4,
            alpha: 0.0,
            seed: 9,
        };
        let (p, _) = gen_rlr_with_models::<f64>(&spec).unwrap();
        for i in 1..=3u64 {
            let center = StreamRng::new(9, i, RLR_CENTER).normals(2, 0.0, 0.0);
            assert!(center.iter().all(|&c| c == 0.0));
        }
        assert_eq!(p.num_agents(), 3);
    }

    #[test]
    fn rlr_is_deterministic() {
        let spec = RlrGenSpec {
            m: 2,
            d: 3,
            n: 4,
            alpha: 5.0,
            seed: 31,
        };
        let a: RobustLinearRegression<f64> = gen_rlr(&spec).unwrap();
        let b: RobustLinearRegression<f64> = gen_rlr(&spec).unwrap();
        for (x, y) in a.agents().iter().zip(b.agents()) {
            assert_eq!(x.features().as_slice(), y.features().as_slice());
            assert_eq!(x.targets(), y.targets());
        }
    }

    #[test]
    fn rlr_noise_has_unit_variance() {
        let spec = RlrGenSpec {
            m: 1,
            d: 3,
            n: 100_000,
            alpha: 1.0,
            seed: 12,
        };
        let (p, models) = gen_rlr_with_models::<f64>(&spec).unwrap();
        let agent = &p.agents()[0];
        let resid: Vec<f64> = (0..spec.n)
            .map(|j| {
                agent.targets()[j]
                    - crate::vector::dot_unchecked(agent.features().row(j), &models[0])
            })
            .collect();
        let mean = resid.iter().sum::<f64>() / spec.n as f64;
        let var = resid.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (spec.n - 1) as f64;
        assert!((var - 1.0).abs() < 0.05, "variance {var}");
    }

    #[test]
    fn gaussian_moments_within_four_standard_errors() {
        let n = 100_000usize;
        for (mean, sd) in [(0.0, 1.0), (3.0, 0.5), (-10.0, 10.0)] {
            let draws = StreamRng::new(123, 7, 3).normals(n, mean, sd);
            let m = draws.iter().sum::<f64>() / n as f64;
            let v = draws.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
            let se_mean = sd / (n as f64).sqrt();
            // Var of the sample variance for a Gaussian: 2σ⁴/(n−1).
            let se_var = (2.0 * sd.powi(4) / (n - 1) as f64).sqrt();
            assert!((m - mean).abs() <= 4.0 * se_mean, "mean {m} vs {mean}");
            assert!(
                (v - sd * sd).abs() <= 4.0 * se_var,
                "var {v} vs {}",
                sd * sd
            );
        }
    }

    #[test]
    fn single_precision_generation() {
        let p: UncoupledQuadratic<f32> = gen_quadratic(&QuadraticGenSpec {
            m: 2,
            d: 3,
            n: 6,
            seed: 3,
        })
        .unwrap();
        let (gx, _) = p.agent(0).grad(&[0.0; 3], &[0.0; 3]);
        assert!(gx.iter().all(|g| g.is_finite()));
    }
}
