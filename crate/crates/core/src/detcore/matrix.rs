use std::fmt;

use crate::error::{Error, Result};

/// Dense square matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct SquareMatrix {
    order: usize,
    entries: Vec<f64>,
}

impl SquareMatrix {
    pub fn new(order: usize, entries: Vec<f64>) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidInput("matrix order must be at least 1".into()));
        }
        if entries.len() != order * order {
            return Err(Error::InvalidInput(format!(
                "{} entries cannot fill a {order}x{order} matrix",
                entries.len()
            )));
        }
        Ok(Self { order, entries })
    }

    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut entries = Vec::with_capacity(order * order);
        for i in 0..order {
            for j in 0..order {
                entries.push(f(i, j));
            }
        }
        Self::new(order, entries)
    }

    pub fn identity(order: usize) -> Result<Self> {
        Self::from_fn(order, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.order + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.entries[row * self.order + col] = value;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.entries[row * self.order..(row + 1) * self.order]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Replaces row `target` by `row[target] - row[source]`.
    pub fn subtract_row(&mut self, target: usize, source: usize) {
        let n = self.order;
        for j in 0..n {
            self.entries[target * n + j] -= self.entries[source * n + j];
        }
    }

    pub fn determinant(&self) -> Result<f64> {
        determinant(self)
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SquareMatrix({}x{})", self.order, self.order)?;
        for i in 0..self.order {
            let row: Vec<String> = self.row(i).iter().map(|v| format!("{v:>12.5e}")).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Determinant by LU factorisation with partial pivoting.
pub fn determinant(m: &SquareMatrix) -> Result<f64> {
    let n = m.order;
    for (idx, v) in m.entries.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFiniteEntry { row: idx / n, col: idx % n });
        }
    }
    let mut a = m.entries.clone();
    let mut det = 1.0;
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[col * n + col].abs();
        for row in col + 1..n {
            let v = a[row * n + col].abs();
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if best == 0.0 {
            return Ok(0.0);
        }
        if pivot != col {
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det *= p;
        for row in col + 1..n {
            let factor = a[row * n + col] / p;
            if factor != 0.0 {
                for j in col + 1..n {
                    a[row * n + j] -= factor * a[col * n + j];
                }
            }
        }
    }
    Ok(det)
}
