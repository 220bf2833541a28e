//! Binary dataset container for replaying generated problems.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! offset  size  field
//! 0       6     magic "FEDMM1"
//! 6       1     kind: 1 = uncoupled quadratic, 2 = robust linear regression
//! 7       4     m  (u32, agents)
//! 11      4     d  (u32, dimension)
//! 15      4     n  (u32, samples per agent)
//! 19      8     seed (u64)
//! 27      8     alpha (f64; 0 for quadratic)
//! 35      ...   payload, f64, agent 1 first:
//!                 quadratic: Q_i (d×d, row-major) then c_i (d)
//!                 rlr:       features (n×d, row-major) then targets (n)
//! ```
//!
//! The payload length is fully determined by the header; trailing bytes
//! are rejected.

use std::io::{Read, Write};

use crate::error::{FedError, Result};
use crate::linalg::DenseMatrix;
use crate::problems::{
    ProblemInstance, QuadraticAgent, RlrAgent, RobustLinearRegression, UncoupledQuadratic,
};
use crate::scalar::Scalar;

pub const MAGIC: &[u8; 6] = b"FEDMM1";
const HEADER_LEN: usize = 35;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    Quadratic = 1,
    Rlr = 2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetHeader {
    pub kind: DatasetKind,
    pub m: u32,
    pub d: u32,
    pub n: u32,
    pub seed: u64,
    pub alpha: f64,
}

#[derive(Debug, Clone)]
pub struct Dataset<T: Scalar> {
    pub header: DatasetHeader,
    pub problem: ProblemInstance<T>,
}

fn to_u32(v: usize, what: &str) -> Result<u32> {
    u32::try_from(v).map_err(|_| FedError::InvalidInput(format!("{what} too large for dump")))
}

/// Serializes a generated problem. `n` and `alpha` describe the recipe;
/// for RLR `n` must equal every agent's sample count.
pub fn write_dataset<T: Scalar, W: Write>(
    out: &mut W,
    problem: &ProblemInstance<T>,
    seed: u64,
    n: usize,
    alpha: f64,
) -> Result<()> {
    let (kind, m, d) = match problem {
        ProblemInstance::Quadratic(p) => (DatasetKind::Quadratic, p.agents().len(), p.dim()),
        ProblemInstance::Rlr(p) => {
            if p.agents().iter().any(|a| a.num_samples() != n) {
                return Err(FedError::InvalidInput(
                    "rlr dump requires n samples for every agent".into(),
                ));
            }
            (DatasetKind::Rlr, p.agents().len(), p.dim())
        }
        ProblemInstance::ScalarTwoAgent(_) => {
            return Err(FedError::Unsupported(
                "the scalar two-agent instance has no data to dump".into(),
            ))
        }
    };
    let mut buf = Vec::with_capacity(HEADER_LEN);
    buf.extend_from_slice(MAGIC);
    buf.push(kind as u8);
    buf.extend_from_slice(&to_u32(m, "m")?.to_le_bytes());
    buf.extend_from_slice(&to_u32(d, "d")?.to_le_bytes());
    buf.extend_from_slice(&to_u32(n, "n")?.to_le_bytes());
    buf.extend_from_slice(&seed.to_le_bytes());
    buf.extend_from_slice(&alpha.to_le_bytes());
    out.write_all(&buf)?;

    let mut put = |vals: &[T]| -> Result<()> {
        let mut bytes = Vec::with_capacity(vals.len() * 8);
        for v in vals {
            bytes.extend_from_slice(&v.to_f64_lossy().to_le_bytes());
        }
        out.write_all(&bytes)?;
        Ok(())
    };
    match problem {
        ProblemInstance::Quadratic(p) => {
            for a in p.agents() {
                put(a.q().as_slice())?;
                put(a.c())?;
            }
        }
        ProblemInstance::Rlr(p) => {
            for a in p.agents() {
                put(a.features().as_slice())?;
                put(a.targets())?;
            }
        }
        ProblemInstance::ScalarTwoAgent(_) => unreachable!(),
    }
    Ok(())
}

pub fn read_dataset<T: Scalar, R: Read>(input: &mut R) -> Result<Dataset<T>> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if bytes.len() < HEADER_LEN || &bytes[..6] != MAGIC {
        return Err(FedError::InvalidInput("not a FEDMM1 dataset".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let kind = match bytes[6] {
        1 => DatasetKind::Quadratic,
        2 => DatasetKind::Rlr,
        k => return Err(FedError::InvalidInput(format!("unknown dataset kind {k}"))),
    };
    let header = DatasetHeader {
        kind,
        m: u32_at(7),
        d: u32_at(11),
        n: u32_at(15),
        seed: u64::from_le_bytes(bytes[19..27].try_into().unwrap()),
        alpha: f64::from_le_bytes(bytes[27..35].try_into().unwrap()),
    };
    let (m, d, n) = (header.m as usize, header.d as usize, header.n as usize);
    if m == 0 || d == 0 {
        return Err(FedError::InvalidInput(
            "dataset with empty dimensions".into(),
        ));
    }
    let per_agent = match kind {
        DatasetKind::Quadratic => d * d + d,
        DatasetKind::Rlr => n * d + n,
    };
    let expected = HEADER_LEN + 8 * m * per_agent;
    if bytes.len() != expected {
        return Err(FedError::InvalidInput(format!(
            "dataset payload length mismatch: expected {expected} bytes, found {}",
            bytes.len()
        )));
    }
    let payload: Vec<T> = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| T::lit(f64::from_le_bytes(c.try_into().unwrap())))
        .collect();
    let problem = match kind {
        DatasetKind::Quadratic => {
            let agents = payload
                .chunks_exact(per_agent)
                .map(|chunk| {
                    let q = DenseMatrix::from_row_major(d, d, chunk[..d * d].to_vec())?;
                    QuadraticAgent::new(q, chunk[d * d..].to_vec())
                })
                .collect::<Result<Vec<_>>>()?;
            ProblemInstance::Quadratic(UncoupledQuadratic::unconstrained(agents)?)
        }
        DatasetKind::Rlr => {
            let agents = payload
                .chunks_exact(per_agent)
                .map(|chunk| {
                    let a = DenseMatrix::from_row_major(n, d, chunk[..n * d].to_vec())?;
                    RlrAgent::new(a, chunk[n * d..].to_vec())
                })
                .collect::<Result<Vec<_>>>()?;
            ProblemInstance::Rlr(RobustLinearRegression::new(agents)?)
        }
    };
    Ok(Dataset { header, problem })
}
