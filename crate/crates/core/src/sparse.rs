//! Sparse square operators and polynomials with operator coefficients.
//!
//! Operators are stored by column: column j holds the image of basis ket j
//! as a row-sorted list of nonzero entries. Serialization and witnesses use
//! row-major order.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::Ring;
use crate::state::{Sector, StateVector};

#[derive(Clone, Debug, PartialEq)]
pub struct SparseOp<S> {
    dim: usize,
    cols: Vec<Vec<(u32, S)>>,
}

/// Dense scratch accumulator reused across columns.
struct Accumulator<S> {
    vals: Vec<S>,
    touched: Vec<u32>,
    seen: Vec<bool>,
}

impl<S: Ring> Accumulator<S> {
    fn new(dim: usize) -> Self {
        Accumulator {
            vals: vec![S::zero(); dim],
            touched: Vec::new(),
            seen: vec![false; dim],
        }
    }

    #[inline]
    fn slot(&mut self, i: u32) -> &mut S {
        let iu = i as usize;
        if !self.seen[iu] {
            self.seen[iu] = true;
            self.touched.push(i);
        }
        &mut self.vals[iu]
    }

    fn drain(&mut self) -> Vec<(u32, S)> {
        self.touched.sort_unstable();
        let mut out = Vec::with_capacity(self.touched.len());
        for &i in &self.touched {
            let iu = i as usize;
            self.seen[iu] = false;
            let v = std::mem::replace(&mut self.vals[iu], S::zero());
            if !v.is_zero() {
                out.push((i, v));
            }
        }
        self.touched.clear();
        out
    }
}

impl<S: Ring> SparseOp<S> {
    pub fn zero(dim: usize) -> Self {
        SparseOp {
            dim,
            cols: vec![Vec::new(); dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(dim, |_| S::one())
    }

    pub fn diagonal(dim: usize, f: impl Fn(usize) -> S) -> Self {
        let cols = (0..dim)
            .map(|j| {
                let v = f(j);
                if v.is_zero() {
                    Vec::new()
                } else {
                    vec![(j as u32, v)]
                }
            })
            .collect();
        SparseOp { dim, cols }
    }

    /// Builds an operator from the image of each basis ket.
    ///
    /// Duplicate rows within a column are summed and zeros dropped.
    pub fn from_column_fn(dim: usize, mut image: impl FnMut(usize, &mut dyn FnMut(usize, S))) -> Self {
        let mut acc = Accumulator::<S>::new(dim);
        let mut cols = Vec::with_capacity(dim);
        for j in 0..dim {
            image(j, &mut |i, v| {
                acc.slot(i as u32).add_assign_ref(&v);
            });
            cols.push(acc.drain());
        }
        SparseOp { dim, cols }
    }

    pub fn from_triplets<I: IntoIterator<Item = (usize, usize, S)>>(dim: usize, entries: I) -> Result<Self> {
        let mut by_col: Vec<Vec<(u32, S)>> = vec![Vec::new(); dim];
        for (i, j, v) in entries {
            if i >= dim || j >= dim {
                return Err(Error::OutOfRange {
                    index: i.max(j),
                    limit: dim,
                });
            }
            by_col[j].push((i as u32, v));
        }
        let mut acc = Accumulator::<S>::new(dim);
        let cols = by_col
            .into_iter()
            .map(|col| {
                for (i, v) in col {
                    acc.slot(i).add_assign_ref(&v);
                }
                acc.drain()
            })
            .collect();
        Ok(SparseOp { dim, cols })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    pub fn column(&self, j: usize) -> &[(u32, S)] {
        &self.cols[j]
    }

    pub fn get(&self, row: usize, col: usize) -> S {
        match self.cols[col].binary_search_by_key(&(row as u32), |(i, _)| *i) {
            Ok(k) => self.cols[col][k].1.clone(),
            Err(_) => S::zero(),
        }
    }

    /// All nonzero entries as (row, col, value), row-major.
    pub fn entries_row_major(&self) -> Vec<(usize, usize, S)> {
        let mut out: Vec<(usize, usize, S)> = self
            .cols
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |(i, v)| (*i as usize, j, v.clone())))
            .collect();
        out.sort_by_key(|&(i, j, _)| (i, j));
        out
    }

    /// First row-major position where the two operators differ.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, usize)> {
        let d = self.sub(other);
        d.entries_row_major().first().map(|&(i, j, _)| (i, j))
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&S) -> U) -> SparseOp<U> {
        SparseOp {
            dim: self.dim,
            cols: self
                .cols
                .iter()
                .map(|col| {
                    col.iter()
                        .filter_map(|(i, v)| {
                            let u = f(v);
                            (!u.is_zero()).then_some((*i, u))
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|v| v.mul_ref(c))
    }

    pub fn neg(&self) -> Self {
        self.map(|v| -v.clone())
    }

    fn combine(&self, other: &Self, sign: bool) -> Self {
        assert_eq!(self.dim, other.dim, "operator dimension mismatch");
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| {
                let mut out = Vec::with_capacity(a.len() + b.len());
                let (mut p, mut q) = (0, 0);
                while p < a.len() || q < b.len() {
                    let ia = a.get(p).map(|x| x.0).unwrap_or(u32::MAX);
                    let ib = b.get(q).map(|x| x.0).unwrap_or(u32::MAX);
                    if ia < ib {
                        out.push(a[p].clone());
                        p += 1;
                    } else if ib < ia {
                        let v = if sign { b[q].1.clone() } else { -b[q].1.clone() };
                        out.push((ib, v));
                        q += 1;
                    } else {
                        let mut v = a[p].1.clone();
                        if sign {
                            v.add_assign_ref(&b[q].1);
                        } else {
                            v.sub_assign_ref(&b[q].1);
                        }
                        if !v.is_zero() {
                            out.push((ia, v));
                        }
                        p += 1;
                        q += 1;
                    }
                }
                out
            })
            .collect();
        SparseOp { dim: self.dim, cols }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    /// Operator product `self · other` (other acts first).
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "operator dimension mismatch");
        let mut acc = Accumulator::<S>::new(self.dim);
        let cols = other
            .cols
            .iter()
            .map(|col| {
                for (k, b) in col {
                    for (i, a) in &self.cols[*k as usize] {
                        acc.slot(*i).fma_assign(a, b);
                    }
                }
                acc.drain()
            })
            .collect();
        SparseOp { dim: self.dim, cols }
    }

    /// `[self, other] = self·other − other·self`
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::identity(self.dim), |acc, _| self.mul(&acc))
    }

    pub fn apply(&self, v: &StateVector<S>) -> StateVector<S> {
        let mut acc = Accumulator::<S>::new(self.dim);
        for (k, b) in v.iter() {
            for (i, a) in &self.cols[k] {
                acc.slot(*i).fma_assign(a, b);
            }
        }
        StateVector::from_entries(acc.drain().into_iter().map(|(i, v)| (i as usize, v)))
    }

    /// Dense matrix-vector product.
    pub fn apply_dense(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.dim);
        let mut out = vec![S::zero(); self.dim];
        for (k, b) in v.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            for (i, a) in &self.cols[k] {
                out[*i as usize].fma_assign(a, b);
            }
        }
        out
    }

    /// Restriction to a sector; errors if the operator leaks out of it.
    pub fn restrict(&self, sector: &Sector) -> Result<Self> {
        if self.dim != sector.config.dim() {
            return Err(Error::DimensionMismatch(self.dim, sector.config.dim()));
        }
        let mut cols = Vec::with_capacity(sector.len());
        for &r in sector.basis() {
            let mut col = Vec::with_capacity(self.cols[r].len());
            for (i, v) in &self.cols[r] {
                match sector.position(*i as usize) {
                    Some(p) => col.push((p as u32, v.clone())),
                    None => {
                        return Err(Error::Config(format!(
                            "operator maps sector state {r} outside charge sector {}",
                            sector.charge
                        )))
                    }
                }
            }
            col.sort_by_key(|x| x.0);
            cols.push(col);
        }
        Ok(SparseOp { dim: sector.len(), cols })
    }

    /// Charge shift δ with every entry mapping charge c to c + δ (mod N), if uniform.
    pub fn charge_shift(&self, charge_of: impl Fn(usize) -> usize, modulus: usize) -> Option<Option<usize>> {
        let mut shift = None;
        for (j, col) in self.cols.iter().enumerate() {
            for (i, _) in col {
                let d = (charge_of(*i as usize) + modulus - charge_of(j)) % modulus;
                match shift {
                    None => shift = Some(d),
                    Some(s) if s != d => return None,
                    _ => {}
                }
            }
        }
        Some(shift)
    }
}

/// Polynomial in t with operator coefficients (index = power of t).
#[derive(Clone, Debug, PartialEq)]
pub struct OpPoly<S> {
    dim: usize,
    coeffs: Vec<SparseOp<S>>,
}

impl<S: Ring> OpPoly<S> {
    pub fn zero(dim: usize) -> Self {
        OpPoly { dim, coeffs: Vec::new() }
    }

    pub fn constant(op: SparseOp<S>) -> Self {
        Self::from_coeffs(op.dim(), vec![op])
    }

    pub fn monomial(op: SparseOp<S>, power: usize) -> Self {
        let dim = op.dim();
        let mut coeffs = vec![SparseOp::zero(dim); power];
        coeffs.push(op);
        Self::from_coeffs(dim, coeffs)
    }

    /// `a + b t`
    pub fn linear(a: SparseOp<S>, b: SparseOp<S>) -> Self {
        Self::from_coeffs(a.dim(), vec![a, b])
    }

    pub fn from_coeffs(dim: usize, coeffs: Vec<SparseOp<S>>) -> Self {
        debug_assert!(coeffs.iter().all(|c| c.dim() == dim));
        let mut p = OpPoly { dim, coeffs };
        while p.coeffs.last().is_some_and(SparseOp::is_zero) {
            p.coeffs.pop();
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[SparseOp<S>] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> SparseOp<S> {
        self.coeffs.get(k).cloned().unwrap_or_else(|| SparseOp::zero(self.dim))
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn map_coeffs(&self, f: impl Fn(&SparseOp<S>) -> SparseOp<S>) -> Self {
        Self::from_coeffs(self.dim, self.coeffs.iter().map(f).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs(self.dim, (0..n).map(|k| self.coeff(k).add(&other.coeff(k))).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs(self.dim, (0..n).map(|k| self.coeff(k).sub(&other.coeff(k))).collect())
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map_coeffs(|op| op.scale(c))
    }

    /// Product by a scalar polynomial in t.
    pub fn scale_poly(&self, p: &Poly<S>) -> Self {
        if self.is_zero() || p.is_zero() {
            return Self::zero(self.dim);
        }
        let n = self.coeffs.len() + p.coeffs().len() - 1;
        let mut out = vec![SparseOp::zero(self.dim); n];
        for (i, op) in self.coeffs.iter().enumerate() {
            for (j, c) in p.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    out[i + j] = out[i + j].add(&op.scale(c));
                }
            }
        }
        Self::from_coeffs(self.dim, out)
    }

    /// Convolution product `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.dim);
        }
        let n = self.coeffs.len() + other.coeffs.len() - 1;
        let mut out = vec![SparseOp::zero(self.dim); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::from_coeffs(self.dim, out)
    }

    pub fn mul_op_right(&self, op: &SparseOp<S>) -> Self {
        self.map_coeffs(|c| c.mul(op))
    }

    pub fn mul_op_left(&self, op: &SparseOp<S>) -> Self {
        self.map_coeffs(|c| op.mul(c))
    }

    /// Divides by t; `None` if the constant term is nonzero.
    pub fn shift_down(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(self.clone());
        }
        if !self.coeffs[0].is_zero() {
            return None;
        }
        Some(Self::from_coeffs(self.dim, self.coeffs[1..].to_vec()))
    }

    /// Multiplies by t.
    pub fn shift_up(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![SparseOp::zero(self.dim)];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::from_coeffs(self.dim, coeffs)
    }

    /// Vector-valued polynomial: coefficient k applied to `v`.
    pub fn apply(&self, v: &StateVector<S>) -> Vec<StateVector<S>> {
        let mut out: Vec<StateVector<S>> = self.coeffs.iter().map(|c| c.apply(v)).collect();
        while out.last().is_some_and(StateVector::is_zero) {
            out.pop();
        }
        out
    }

    pub fn restrict(&self, sector: &Sector) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.restrict(sector))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_coeffs(sector.len(), coeffs))
    }

    /// First (power of t, row, col) where the two polynomials differ.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, usize, usize)> {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n).find_map(|k| self.coeff(k).first_difference(&other.coeff(k)).map(|(i, j)| (k, i, j)))
    }

    /// Evaluation at a scalar t.
    pub fn eval(&self, t: &S) -> SparseOp<S> {
        let mut acc = SparseOp::zero(self.dim);
        for c in self.coeffs.iter().rev() {
            acc = acc.scale(t).add(c);
        }
        acc
    }
}

/// Multiplies each entry of a vector-valued polynomial and compares with
/// `p(t)·v`; returns the first differing power.
pub fn vector_poly_matches<S: Ring>(lhs: &[StateVector<S>], p: &Poly<S>, v: &StateVector<S>) -> Option<usize> {
    let n = lhs.len().max(p.coeffs().len());
    (0..n).find(|&k| {
        let l = lhs.get(k).cloned().unwrap_or_else(StateVector::zero);
        let c = p.coeff(k);
        let r = if c.is_zero() { StateVector::zero() } else { v.scale(&c) };
        l != r
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Cyclo;
    use num_traits::One;

    type C = Cyclo<3>;

    fn op(dim: usize, t: &[(usize, usize, i64)]) -> SparseOp<C> {
        SparseOp::from_triplets(dim, t.iter().map(|&(i, j, v)| (i, j, C::from_int(v)))).unwrap()
    }

    #[test]
    fn product_and_commutator() {
        let a = op(2, &[(0, 1, 1)]);
        let b = op(2, &[(1, 0, 1)]);
        let ab = a.mul(&b);
        assert_eq!(ab, op(2, &[(0, 0, 1)]));
        let c = a.commutator(&b);
        assert_eq!(c, op(2, &[(0, 0, 1), (1, 1, -1)]));
        assert!(a.commutator(&a).is_zero());
    }

    #[test]
    fn triplets_sum_duplicates_and_drop_zeros() {
        let a = op(3, &[(0, 0, 2), (0, 0, -2), (2, 1, 1), (2, 1, 1)]);
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.get(2, 1), C::from_int(2));
        assert!(SparseOp::<C>::from_triplets(2, [(2, 0, C::one())]).is_err());
    }

    #[test]
    fn row_major_entries() {
        let a = op(3, &[(2, 0, 1), (0, 2, 1), (0, 1, 1)]);
        let e: Vec<(usize, usize)> = a.entries_row_major().iter().map(|&(i, j, _)| (i, j)).collect();
        assert_eq!(e, vec![(0, 1), (0, 2), (2, 0)]);
    }

    #[test]
    fn op_poly_product_and_shift() {
        let x = op(2, &[(0, 1, 1)]);
        let id = SparseOp::<C>::identity(2);
        // (1 + x t)(1 − x t) = 1 since x² = 0
        let p = OpPoly::linear(id.clone(), x.clone());
        let q = OpPoly::linear(id.clone(), x.neg());
        assert_eq!(p.mul(&q), OpPoly::constant(id.clone()));
        let tp = p.shift_up();
        assert_eq!(tp.shift_down().unwrap(), p);
        assert!(p.shift_down().is_none());
        assert_eq!(p.first_difference(&q), Some((1, 0, 1)));
    }

    #[test]
    fn apply_matches_dense() {
        let a = op(3, &[(0, 1, 2), (2, 1, -1), (1, 2, 5)]);
        let v = StateVector::from_entries([(1, C::from_int(3)), (2, C::omega())]);
        let sparse = a.apply(&v);
        let dense = a.apply_dense(&v.to_dense(3));
        assert_eq!(StateVector::from_dense(&dense), sparse);
    }
}
