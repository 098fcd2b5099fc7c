use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::error::{invalid, Result};

use super::{syt_enumerate, Partition, Permutation, StandardTableau};

/// Young's orthogonal form of the irreducible representation of `S_k` labeled by
/// a partition, in the last-letter tableau basis.
///
/// Column `t` of an adjacent transposition: diagonal entry and optional `(partner, off_diagonal)`.
type SparseColumn = (f64, Option<(usize, f64)>);

/// Every adjacent transposition acts with at most two nonzeros per column, so the
/// generators are kept in that sparse form.
#[derive(Clone, Debug)]
pub struct YoungRep {
    shape: Partition,
    tableaux: Vec<StandardTableau>,
    // generators[j][t]
    generators: Vec<Vec<SparseColumn>>,
}

impl YoungRep {
    pub fn new(shape: &Partition) -> Self {
        let tableaux = syt_enumerate(shape);
        let index: HashMap<Vec<Vec<usize>>, usize> = tableaux
            .iter()
            .enumerate()
            .map(|(i, t)| (t.rows().to_vec(), i))
            .collect();
        let k = shape.weight();
        let generators = (1..k)
            .map(|value| {
                tableaux
                    .iter()
                    .map(|t| {
                        let axial = (t.content(value + 1) - t.content(value)) as f64;
                        let diag = 1.0 / axial;
                        let partner = index.get(&t.swapped(value)).map(|&p| (p, (1.0 - diag * diag).sqrt()));
                        (diag, partner)
                    })
                    .collect()
            })
            .collect();
        YoungRep {
            shape: shape.clone(),
            tableaux,
            generators,
        }
    }

    pub fn shape(&self) -> &Partition {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.tableaux.len()
    }

    pub fn tableaux(&self) -> &[StandardTableau] {
        &self.tableaux
    }

    /// Matrix of the adjacent transposition `(i, i+1)`, `1 <= i <= k-1`.
    pub fn generator(&self, i: usize) -> Result<DMatrix<f64>> {
        if i == 0 || i > self.generators.len() {
            return invalid(format!(
                "adjacent transposition index {i} out of range 1..={}",
                self.generators.len()
            ));
        }
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (t, &(diag, partner)) in self.generators[i - 1].iter().enumerate() {
            m[(t, t)] = diag;
            if let Some((p, off)) = partner {
                m[(p, t)] = off;
            }
        }
        Ok(m)
    }

    // m <- m * G_j  (j 0-based)
    fn right_multiply_generator(&self, m: &mut DMatrix<f64>, j: usize) {
        let gen = &self.generators[j];
        let old = m.clone();
        for (c, &(diag, partner)) in gen.iter().enumerate() {
            let mut col = old.column(c) * diag;
            if let Some((p, off)) = partner {
                col += old.column(p) * off;
            }
            m.set_column(c, &col);
        }
    }

    /// Representation matrix of `sigma`.
    pub fn matrix(&self, sigma: &Permutation) -> Result<DMatrix<f64>> {
        if sigma.degree() != self.shape.weight() {
            return invalid(format!(
                "permutation of degree {} does not act on partition {} of weight {}",
                sigma.degree(),
                self.shape,
                self.shape.weight()
            ));
        }
        let mut m = DMatrix::identity(self.dim(), self.dim());
        for j in sigma.adjacent_word() {
            self.right_multiply_generator(&mut m, j);
        }
        Ok(m)
    }
}

/// Matrix of the adjacent transposition `(i, i+1)` in Young's orthogonal form.
pub fn yor_generator(shape: &Partition, i: usize) -> Result<DMatrix<f64>> {
    YoungRep::new(shape).generator(i)
}

/// `R_shape(sigma)` in Young's orthogonal form.
pub fn rep_matrix(shape: &Partition, sigma: &Permutation) -> Result<DMatrix<f64>> {
    YoungRep::new(shape).matrix(sigma)
}

/// Memoized representation matrices for one shape.
#[derive(Debug)]
pub struct RepTable {
    rep: YoungRep,
    cache: HashMap<Permutation, DMatrix<f64>>,
}

impl RepTable {
    pub fn new(shape: &Partition) -> Self {
        RepTable {
            rep: YoungRep::new(shape),
            cache: HashMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    pub fn insert(&mut self, sigma: &Permutation) -> Result<()> {
        if !self.cache.contains_key(sigma) {
            let m = self.rep.matrix(sigma)?;
            self.cache.insert(sigma.clone(), m);
        }
        Ok(())
    }

    /// Looks up a matrix previously added with [`RepTable::insert`].
    pub fn get(&self, sigma: &Permutation) -> Option<&DMatrix<f64>> {
        self.cache.get(sigma)
    }
}
