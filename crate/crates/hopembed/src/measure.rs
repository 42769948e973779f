use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A nonnegative weight per vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Measure(Vec<f64>);

impl Measure {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((v, &x)) = values
            .iter()
            .enumerate()
            .find(|(_, x)| !(x.is_finite() && **x >= 0.0))
        {
            return Err(Error::InvalidParameter(format!(
                "measure of vertex {v} is {x}"
            )));
        }
        Ok(Measure(values))
    }

    pub fn uniform(n: usize) -> Self {
        Measure(vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, v: usize) -> f64 {
        self.0[v]
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn of<'a>(&self, set: impl IntoIterator<Item = &'a usize>) -> f64 {
        set.into_iter().map(|&v| self.0[v]).sum()
    }

    /// Checks the (>= 1) condition required by the embedding constructions.
    pub fn check_at_least_one(&self) -> Result<()> {
        match self.0.iter().enumerate().find(|(_, &x)| x < 1.0) {
            Some((vertex, &value)) => Err(Error::MeasureBelowOne { vertex, value }),
            None => Ok(()),
        }
    }
}
