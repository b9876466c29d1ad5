//! The JSON instance document: the on-disk form of a grouping instance,
//! with class and value names attached to the raw counts.

use serde::{Deserialize, Serialize};

use ginisplit_core::impurity::{CountVector, GiniInstance};

use crate::ingest::Dataset;

/// A complete instance as stored in a `.json` file.
///
/// `vectors[i][j]` counts the examples with value `values[i]` and class
/// `classes[j]`; `d`, `n` are redundant with the array lengths and are
/// validated on load.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDocument {
    pub d: usize,
    pub n: usize,
    pub k: usize,
    pub classes: Vec<String>,
    pub values: Vec<String>,
    pub vectors: Vec<Vec<u64>>,
}

impl InstanceDocument {
    /// Builds a document from an ingested dataset and a group budget.
    pub fn from_dataset(dataset: &Dataset, k: usize) -> Self {
        Self {
            d: dataset.classes.len(),
            n: dataset.values.len(),
            k,
            classes: dataset.classes.clone(),
            values: dataset.values.clone(),
            vectors: dataset.vectors.clone(),
        }
    }

    /// Replaces the group budget.
    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    /// Checks the document's internal consistency (shape only; count
    /// semantics are enforced when building the instance).
    pub fn validate(&self) -> Result<(), String> {
        if self.classes.len() != self.d {
            return Err(format!(
                "d is {} but {} classes are listed",
                self.d,
                self.classes.len()
            ));
        }
        if self.values.len() != self.n {
            return Err(format!(
                "n is {} but {} values are listed",
                self.n,
                self.values.len()
            ));
        }
        if self.vectors.len() != self.n {
            return Err(format!(
                "n is {} but {} vectors are listed",
                self.n,
                self.vectors.len()
            ));
        }
        for (i, v) in self.vectors.iter().enumerate() {
            if v.len() != self.d {
                return Err(format!(
                    "vector {} has {} components, expected {}",
                    i,
                    v.len(),
                    self.d
                ));
            }
        }
        Ok(())
    }

    /// Converts to the in-memory instance, enforcing the count-vector
    /// invariants (nonzero vectors, `1 <= k <= n`).
    pub fn to_instance(&self) -> ginisplit_core::Result<GiniInstance> {
        let vectors: ginisplit_core::Result<Vec<CountVector>> = self
            .vectors
            .iter()
            .map(|v| CountVector::new(v.clone()))
            .collect();
        GiniInstance::new(vectors?, self.k)
    }
}
