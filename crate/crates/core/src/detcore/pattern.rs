use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer composition `n_1 + … + n_k = n`: the first `n_1` particles merge
/// into survivor 1, the next `n_2` into survivor 2, and so on.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoalescencePattern {
    parts: Vec<usize>,
}

/// Role of a matrix column under a pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColumnRole {
    /// survivor (block) index
    pub block: usize,
    /// first column of its block: a `P` column; otherwise an `F` column
    pub leading: bool,
}

impl CoalescencePattern {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidInput("a coalescence pattern needs at least one part".into()));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidInput(format!("pattern parts must be positive: {parts:?}")));
        }
        Ok(Self { parts })
    }

    /// `1 + 2 + … + 2 + 1` with `walls` walls (`walls + 1` survivors).
    pub fn wall_particle(walls: usize) -> Result<Self> {
        if walls == 0 {
            return Err(Error::InvalidInput("a wall-particle pattern needs at least one wall".into()));
        }
        let mut parts = vec![1];
        parts.extend(std::iter::repeat(2).take(walls - 1));
        parts.push(1);
        Self::new(parts)
    }

    /// `2 + 2 + … + 2 + 1`: the boundary particle joins the first wall's
    /// left flank, as on the reflected half-line.
    pub fn half_line(walls: usize) -> Result<Self> {
        let mut parts = vec![2; walls];
        parts.push(1);
        Self::new(parts)
    }

    /// Every composition of `n`, in lexicographic order of the cut set.
    pub fn all_compositions(n: usize) -> Vec<Self> {
        assert!((1..32).contains(&n));
        (0u32..1 << (n - 1))
            .map(|cuts| {
                let mut parts = Vec::new();
                let mut run = 1;
                for bit in 0..n - 1 {
                    if cuts & (1 << bit) != 0 {
                        parts.push(run);
                        run = 1;
                    } else {
                        run += 1;
                    }
                }
                parts.push(run);
                Self { parts }
            })
            .collect()
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Number of initial particles.
    pub fn particles(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of survivors.
    pub fn survivors(&self) -> usize {
        self.parts.len()
    }

    /// Index of the first particle of each block.
    pub fn block_starts(&self) -> Vec<usize> {
        let mut starts = Vec::with_capacity(self.parts.len());
        let mut acc = 0;
        for &p in &self.parts {
            starts.push(acc);
            acc += p;
        }
        starts
    }

    /// Per-column roles, in column order.
    pub fn column_roles(&self) -> Vec<ColumnRole> {
        let mut roles = Vec::with_capacity(self.particles());
        for (block, &p) in self.parts.iter().enumerate() {
            for offset in 0..p {
                roles.push(ColumnRole { block, leading: offset == 0 });
            }
        }
        roles
    }
}

/// Consecutive wall/survivor pattern `y_0 ↖ x_½ ↗ y_1 ↖ … ↗ y_k`.
///
/// Walls are always real coordinates: half-integers for the simple lattice,
/// odd integers for the even sublattice of the parity walk, arbitrary reals
/// in the continuum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallParticlePattern<S> {
    walls: Vec<f64>,
    survivors: Vec<S>,
}

impl<S: Copy + PartialOrd + std::fmt::Debug> WallParticlePattern<S> {
    pub fn new(walls: Vec<f64>, survivors: Vec<S>) -> Result<Self> {
        if walls.is_empty() {
            return Err(Error::InvalidInput("a pattern needs at least one wall".into()));
        }
        if survivors.len() != walls.len() + 1 {
            return Err(Error::InvalidInput(format!(
                "{} walls need {} survivors, got {}",
                walls.len(),
                walls.len() + 1,
                survivors.len()
            )));
        }
        if walls.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite wall in {walls:?}")));
        }
        if !strictly_increasing(&walls) {
            return Err(Error::InvalidInput(format!("walls must be strictly increasing: {walls:?}")));
        }
        if !strictly_increasing(&survivors) {
            return Err(Error::InvalidInput(format!("survivors must be strictly increasing: {survivors:?}")));
        }
        Ok(Self { walls, survivors })
    }

    pub fn walls(&self) -> &[f64] {
        &self.walls
    }

    pub fn survivors(&self) -> &[S] {
        &self.survivors
    }

    /// Number of walls `k`.
    pub fn k(&self) -> usize {
        self.walls.len()
    }
}

pub(crate) fn strictly_increasing<T: PartialOrd>(xs: &[T]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

pub(crate) fn nondecreasing<T: PartialOrd>(xs: &[T]) -> bool {
    xs.windows(2).all(|w| w[0] <= w[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wall_particle_compositions() {
        assert_eq!(CoalescencePattern::wall_particle(1).unwrap().parts(), &[1, 1]);
        assert_eq!(CoalescencePattern::wall_particle(3).unwrap().parts(), &[1, 2, 2, 1]);
        assert_eq!(CoalescencePattern::half_line(2).unwrap().parts(), &[2, 2, 1]);
    }

    #[test]
    fn composition_count() {
        for n in 1..=6 {
            let all = CoalescencePattern::all_compositions(n);
            assert_eq!(all.len(), 1 << (n - 1));
            assert!(all.iter().all(|p| p.particles() == n));
        }
    }

    #[test]
    fn column_roles_follow_blocks() {
        let p = CoalescencePattern::new(vec![2, 1]).unwrap();
        let roles = p.column_roles();
        assert_eq!(
            roles,
            vec![
                ColumnRole { block: 0, leading: true },
                ColumnRole { block: 0, leading: false },
                ColumnRole { block: 1, leading: true },
            ]
        );
        assert_eq!(p.block_starts(), vec![0, 2]);
    }

    #[test]
    fn rejects_bad_patterns() {
        assert!(CoalescencePattern::new(vec![]).is_err());
        assert!(CoalescencePattern::new(vec![1, 0]).is_err());
        assert!(WallParticlePattern::new(vec![0.5], vec![0i64]).is_err());
        assert!(WallParticlePattern::new(vec![1.5, 0.5], vec![0i64, 1, 2]).is_err());
        assert!(WallParticlePattern::new(vec![0.5], vec![1i64, 1]).is_err());
    }
}
