//! Sparse equality-form linear programs and the per-family model.

mod format;
mod formulation;

pub use format::{export_lp, read_lp};
pub use formulation::{
    build_lp, commodity_sinks, expected_size, scale_rhs, FamilyLp, ModelSize, VariableKey,
    VariableLayout,
};

use crate::graph::NodeId;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum LpError {
    #[error("root node {0} is not a terminal")]
    RootNotTerminal(NodeId),
    #[error("family has {family} commodities but the instance has {instance}")]
    CommodityMismatch { family: usize, instance: usize },
    #[error("scale factor {0} outside (0, 1]")]
    BadScale(f64),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Column with box bounds and an objective coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub cost: f64,
}

impl Column {
    pub fn is_fixed(&self) -> bool {
        self.lower == self.upper
    }
}

/// Equality row `Σ coeff · x = rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

/// A minimization problem `min cᵀx  s.t.  Ax = b,  l ≤ x ≤ u`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LpModel {
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
}

impl LpModel {
    pub fn add_column(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        cost: f64,
    ) -> usize {
        self.columns.push(Column {
            name: name.into(),
            lower,
            upper,
            cost,
        });
        self.columns.len() - 1
    }

    pub fn add_row(
        &mut self,
        name: impl Into<String>,
        coeffs: Vec<(usize, f64)>,
        rhs: f64,
    ) -> usize {
        self.rows.push(Row {
            name: name.into(),
            coeffs,
            rhs,
        });
        self.rows.len() - 1
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// Number of columns with `lower == upper`.
    pub fn fixed_count(&self) -> usize {
        self.columns.iter().filter(|c| c.is_fixed()).count()
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.columns.iter().zip(x).map(|(c, v)| c.cost * v).sum()
    }

    /// `Σ coeff · x − rhs` for each row.
    pub fn residuals(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.coeffs.iter().map(|&(j, a)| a * x[j]).sum::<f64>() - r.rhs)
            .collect()
    }

    /// Largest violation over rows and column bounds.
    pub fn infeasibility(&self, x: &[f64]) -> f64 {
        let rows = self.residuals(x).into_iter().map(f64::abs);
        let bounds = self
            .columns
            .iter()
            .zip(x)
            .map(|(c, &v)| (c.lower - v).max(v - c.upper).max(0.0));
        rows.chain(bounds).fold(0.0, f64::max)
    }
}
