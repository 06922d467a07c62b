use num_traits::{One, Zero};

use crate::Rational;

#[derive(Debug, Clone)]
struct EchelonRow {
    pivot: usize,
    /// Normalized so that `row[pivot] == 1`.
    row: Vec<Rational>,
    /// `row` expressed in the inserted vectors.
    combo: Vec<Rational>,
}

/// A list of linearly independent vectors, kept in insertion order, with an
/// echelon form alongside for membership tests and coordinates.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    ambient: usize,
    vectors: Vec<Vec<Rational>>,
    echelon: Vec<EchelonRow>,
}

impl SubspaceBasis {
    pub fn new(ambient: usize) -> Self {
        SubspaceBasis {
            ambient,
            vectors: Vec::new(),
            echelon: Vec::new(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.vectors.len() == self.ambient
    }

    pub fn vectors(&self) -> &[Vec<Rational>] {
        &self.vectors
    }

    /// Reduces `v` against the echelon rows; returns the residual and the
    /// combination of basis vectors that was subtracted.
    fn reduce(&self, v: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
        assert_eq!(v.len(), self.ambient, "vector has wrong dimension");
        let mut residual = v.to_vec();
        let mut combo = vec![Rational::zero(); self.vectors.len()];
        for e in &self.echelon {
            if residual[e.pivot].is_zero() {
                continue;
            }
            let factor = residual[e.pivot].clone();
            for (r, x) in residual.iter_mut().zip(&e.row) {
                if !x.is_zero() {
                    *r -= &factor * x;
                }
            }
            for (c, x) in combo.iter_mut().zip(&e.combo) {
                if !x.is_zero() {
                    *c += &factor * x;
                }
            }
        }
        (residual, combo)
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.reduce(v).0.iter().all(Zero::is_zero)
    }

    /// Coefficients `c` with `v = Σ c_i · vectors[i]`, if `v` lies in the span.
    pub fn coordinates(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        let (residual, combo) = self.reduce(v);
        residual.iter().all(Zero::is_zero).then_some(combo)
    }

    /// Adds `v` if it is independent of the current vectors. Returns whether
    /// the span grew.
    pub fn insert(&mut self, v: &[Rational]) -> bool {
        let (residual, combo) = self.reduce(v);
        let Some(pivot) = residual.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = residual[pivot].recip();
        let idx = self.vectors.len();
        // residual = v - Σ combo_i vectors_i
        let mut new_combo: Vec<Rational> = combo.iter().map(|c| -c * &inv).collect();
        new_combo.push(inv.clone());
        let row: Vec<Rational> = residual.iter().map(|x| x * &inv).collect();
        for e in &mut self.echelon {
            e.combo.push(Rational::zero());
            // keep rows reduced with respect to the new pivot
            if !e.row[pivot].is_zero() {
                let factor = e.row[pivot].clone();
                for (a, b) in e.row.iter_mut().zip(&row) {
                    if !b.is_zero() {
                        *a -= &factor * b;
                    }
                }
                for (a, b) in e.combo.iter_mut().zip(&new_combo) {
                    if !b.is_zero() {
                        *a -= &factor * b;
                    }
                }
            }
        }
        debug_assert!(row[pivot].is_one());
        self.echelon.push(EchelonRow {
            pivot,
            row,
            combo: new_combo,
        });
        self.vectors.push(v.to_vec());
        debug_assert_eq!(self.echelon.len(), idx + 1);
        true
    }
}
