//! Entropy of linear observations, measured in symbols of the message field.
//!
//! For a uniformly distributed message and linear observations, the joint
//! entropy of a set of symbols is the rank of their coefficient rows. Every
//! quantity here is therefore an exact integer.

use thiserror::Error;

use crate::field::FieldSpec;
use crate::matrix::Matrix;
use crate::pmmsr::{CodeError, Observation, PmMsrCode, Selector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EntropyError {
    #[error("observation sets are over different fields")]
    MixedFields,
    #[error("row of length {got} in a set of width {expected}")]
    LengthMismatch { expected: usize, got: usize },
}

/// A set of observations over one field, all of width B.
#[derive(Debug, Clone, PartialEq)]
pub struct ObsSet {
    field: FieldSpec,
    width: usize,
    obs: Vec<Observation>,
}

impl ObsSet {
    pub fn new(field: FieldSpec, width: usize, obs: Vec<Observation>) -> Result<Self, EntropyError> {
        if let Some(o) = obs.iter().find(|o| o.row.len() != width) {
            return Err(EntropyError::LengthMismatch {
                expected: width,
                got: o.row.len(),
            });
        }
        Ok(ObsSet { field, width, obs })
    }

    pub fn empty(field: FieldSpec, width: usize) -> Self {
        ObsSet {
            field,
            width,
            obs: Vec::new(),
        }
    }

    /// The rows `selector` picks out of `code`.
    pub fn select(code: &PmMsrCode, selector: &Selector) -> Result<Self, CodeError> {
        let obs = code.observation_rows(selector)?;
        Ok(ObsSet {
            field: code.field().clone(),
            width: code.params().b,
            obs,
        })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.obs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.obs.is_empty()
    }

    pub fn observations(&self) -> &[Observation] {
        &self.obs
    }

    fn compatible(&self, other: &Self) -> Result<(), EntropyError> {
        if self.field != other.field {
            return Err(EntropyError::MixedFields);
        }
        if self.width != other.width {
            return Err(EntropyError::LengthMismatch {
                expected: self.width,
                got: other.width,
            });
        }
        Ok(())
    }

    pub fn union(&self, other: &Self) -> Result<Self, EntropyError> {
        self.compatible(other)?;
        let mut obs = self.obs.clone();
        obs.extend(other.obs.iter().cloned());
        Ok(ObsSet {
            field: self.field.clone(),
            width: self.width,
            obs,
        })
    }

    pub fn push(&mut self, o: Observation) -> Result<(), EntropyError> {
        if o.row.len() != self.width {
            return Err(EntropyError::LengthMismatch {
                expected: self.width,
                got: o.row.len(),
            });
        }
        self.obs.push(o);
        Ok(())
    }

    /// Coefficient matrix, one row per observation.
    pub fn matrix(&self) -> Matrix<FieldSpec> {
        let rows: Vec<&[u64]> = self.obs.iter().map(|o| o.row.as_slice()).collect();
        Matrix::from_rows(self.field.clone(), self.width, &rows).expect("uniform width")
    }
}

/// H(A) = rank of A's rows.
pub fn joint_entropy(a: &ObsSet) -> usize {
    a.matrix().rank()
}

/// H(A | G) = H(A, G) - H(G).
pub fn conditional_entropy(a: &ObsSet, given: &ObsSet) -> Result<usize, EntropyError> {
    let joint = joint_entropy(&a.union(given)?);
    Ok(joint - joint_entropy(given))
}

/// I(A; B | G) = H(A | G) - H(A | B, G).
pub fn mutual_information(a: &ObsSet, b: &ObsSet, given: Option<&ObsSet>) -> Result<usize, EntropyError> {
    a.compatible(b)?;
    let empty = ObsSet::empty(a.field.clone(), a.width);
    let given = given.unwrap_or(&empty);
    let h_a = conditional_entropy(a, given)?;
    let h_a_bg = conditional_entropy(a, &b.union(given)?)?;
    Ok(h_a - h_a_bg)
}
