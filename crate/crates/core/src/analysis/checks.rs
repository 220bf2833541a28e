use crate::datagen::StreamRng;
use crate::error::{FedError, Result};
use crate::iterate::Iterate;
use crate::problems::{monotone_field, MinimaxProblem};
use crate::scalar::Scalar;
use crate::vector::{dist2, dot};

/// Absolute slack for the strong-monotonicity inequality.
const MONOTONE_SLACK: f64 = 1e-9;
/// Relative slack for the contraction inequality.
const CONTRACTION_SLACK: f64 = 1e-9;
/// Standard deviation of the sampled test points.
const SAMPLE_SCALE: f64 = 3.0;

/// `‖x − x*‖² + ‖y − y*‖²`.
pub fn optimality_gap<T: Scalar>(z: &Iterate<T>, z_star: &Iterate<T>) -> Result<T> {
    z.dist2(z_star)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport<T> {
    pub trials: usize,
    pub mu: T,
    /// Smallest `⟨F(z)−F(z′), z−z′⟩ / ‖z−z′‖²` observed.
    pub min_ratio: T,
    pub violations: usize,
    /// First pair that violated the inequality.
    pub witness: Option<(Iterate<T>, Iterate<T>)>,
}

impl<T> MonotonicityReport<T> {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Samples `trials` random pairs and checks
/// `⟨F(z)−F(z′), z−z′⟩ ≥ μ‖z−z′‖² − 1e−9` for `F = (∇_x f, −∇_y f)`.
pub fn check_strong_monotonicity<T: Scalar, P: MinimaxProblem<T> + ?Sized>(
    problem: &P,
    mu: T,
    trials: usize,
    seed: u64,
) -> Result<MonotonicityReport<T>> {
    let mut sampler = PairSampler::new(problem, seed)?;
    let mut report = MonotonicityReport {
        trials,
        mu,
        min_ratio: T::infinity(),
        violations: 0,
        witness: None,
    };
    for _ in 0..trials {
        let (z, w) = sampler.pair();
        let fz = monotone_field(problem, &z)?;
        let fw = monotone_field(problem, &w)?;
        let (cz, cw) = (z.concat(), w.concat());
        let df: Vec<T> = fz.iter().zip(&fw).map(|(&a, &b)| a - b).collect();
        let dz: Vec<T> = cz.iter().zip(&cw).map(|(&a, &b)| a - b).collect();
        let inner = dot(&df, &dz)?;
        let d2 = dot(&dz, &dz)?;
        if d2 > T::zero() {
            report.min_ratio = report.min_ratio.min(inner / d2);
        }
        if inner < mu * d2 - T::lit(MONOTONE_SLACK) {
            report.violations += 1;
            report.witness.get_or_insert((z, w));
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport<T> {
    pub trials: usize,
    pub eta: T,
    /// Claimed factor `1 − η(2μ − ηL²)`.
    pub factor: T,
    /// Largest `‖(u−ηF(u)) − (v−ηF(v))‖² / ‖u−v‖²` observed.
    pub max_ratio: T,
    pub violations: usize,
    pub witness: Option<(Iterate<T>, Iterate<T>)>,
}

impl<T> ContractionReport<T> {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Samples `trials` random pairs and checks that one step of
/// `u ↦ u − ηF(u)` shrinks squared distances by `1 − η(2μ − ηL²)`.
pub fn check_contraction<T: Scalar, P: MinimaxProblem<T> + ?Sized>(
    problem: &P,
    eta: T,
    mu: T,
    lipschitz: T,
    trials: usize,
    seed: u64,
) -> Result<ContractionReport<T>> {
    if !(eta > T::zero()) {
        return Err(FedError::InvalidInput(format!(
            "eta must be positive (got {eta})"
        )));
    }
    let factor = T::one() - eta * (T::lit(2.0) * mu - eta * lipschitz * lipschitz);
    let mut sampler = PairSampler::new(problem, seed)?;
    let mut report = ContractionReport {
        trials,
        eta,
        factor,
        max_ratio: T::zero(),
        violations: 0,
        witness: None,
    };
    let forward = |z: &Iterate<T>| -> Result<Vec<T>> {
        let f = monotone_field(problem, z)?;
        Ok(z.concat()
            .iter()
            .zip(&f)
            .map(|(&u, &g)| u - eta * g)
            .collect())
    };
    for _ in 0..trials {
        let (z, w) = sampler.pair();
        let after = dist2(&forward(&z)?, &forward(&w)?)?;
        let before = z.dist2(&w)?;
        if before > T::zero() {
            report.max_ratio = report.max_ratio.max(after / before);
        }
        if after > factor * before * (T::one() + T::lit(CONTRACTION_SLACK)) {
            report.violations += 1;
            report.witness.get_or_insert((z, w));
        }
    }
    Ok(report)
}

/// Gaussian test points drawn from a dedicated stream.
struct PairSampler {
    rng: StreamRng,
    dims: (usize, usize),
}

impl PairSampler {
    fn new<T: Scalar, P: MinimaxProblem<T> + ?Sized>(problem: &P, seed: u64) -> Result<Self> {
        let dims = problem.dims();
        if dims.0 == 0 || dims.1 == 0 {
            return Err(FedError::InvalidInput("problem has an empty block".into()));
        }
        Ok(Self {
            rng: StreamRng::new(seed, 0, 0xc7),
            dims,
        })
    }

    fn point<T: Scalar>(&mut self) -> Iterate<T> {
        let (p, q) = self.dims;
        let mut draw = |n| {
            self.rng
                .normals(n, 0.0, SAMPLE_SCALE)
                .into_iter()
                .map(T::lit)
                .collect()
        };
        let x = draw(p);
        let y = draw(q);
        Iterate { x, y }
    }

    fn pair<T: Scalar>(&mut self) -> (Iterate<T>, Iterate<T>) {
        (self.point(), self.point())
    }
}
