//! Check outcomes with witnesses.

use crate::algebra::Element;
use crate::C64;

/// Outcome of a check. `Pass` is reserved for exact (spectral or algebraic)
/// decisions; sampled universal statements report `SampledPass`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    SampledPass,
    Fail,
}

impl Status {
    pub fn passed(self) -> bool {
        !matches!(self, Status::Fail)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::SampledPass => "SAMPLED-PASS",
            Status::Fail => "FAIL",
        }
    }
}

/// Certified counterexample attached to a failed check.
#[derive(Debug, Clone)]
pub enum Witness {
    Element(Element),
    /// Rank-one direction `v v*` embedded in one block.
    Vector { block: usize, v: Vec<C64> },
    /// Eigenvector of a Choi block, indexed by (input block, output block).
    ChoiVector {
        in_block: usize,
        out_block: usize,
        v: Vec<C64>,
    },
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub status: Status,
    /// Most adverse value observed; the checked inequalities require it
    /// above `-tolerance`.
    pub margin: f64,
    pub witness: Option<Witness>,
    pub samples: usize,
    pub seed: u64,
    pub method: String,
}

impl Verdict {
    pub fn sampled_pass(margin: f64, samples: usize, seed: u64, method: impl Into<String>) -> Self {
        Verdict {
            status: Status::SampledPass,
            margin,
            witness: None,
            samples,
            seed,
            method: method.into(),
        }
    }

    pub fn exact_pass(margin: f64, method: impl Into<String>) -> Self {
        Verdict {
            status: Status::Pass,
            margin,
            witness: None,
            samples: 0,
            seed: 0,
            method: method.into(),
        }
    }

    pub fn fail(
        margin: f64,
        witness: Witness,
        samples: usize,
        seed: u64,
        method: impl Into<String>,
    ) -> Self {
        Verdict {
            status: Status::Fail,
            margin,
            witness: Some(witness),
            samples,
            seed,
            method: method.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status.passed()
    }
}
