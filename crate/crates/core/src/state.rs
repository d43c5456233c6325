//! Edge-variable basis of (ℤ_N)^L, charge sectors and sparse state vectors.
//!
//! Basis states are labelled by the edge variables n_j = σ_j − σ_{j+1} and
//! ranked by the base-N positional code with n₁ most significant.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Ring;

/// Largest edge space the crate will index.
pub const MAX_DIM: usize = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeConfig {
    /// States per spin.
    pub n: usize,
    /// Chain length.
    pub l: usize,
    /// Spin-shift Fourier label.
    pub q: usize,
}

impl LatticeConfig {
    pub fn new(n: usize, l: usize, q: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config(format!("N={n} must be at least 2")));
        }
        if l < 1 {
            return Err(Error::Config("L must be at least 1".into()));
        }
        if q >= n {
            return Err(Error::Config(format!("Q={q} must be below N={n}")));
        }
        let dim = (n as u128).checked_pow(l as u32).unwrap_or(u128::MAX);
        if dim > MAX_DIM as u128 {
            return Err(Error::Config(format!("edge space N^L = {n}^{l} is too large")));
        }
        Ok(LatticeConfig { n, l, q })
    }

    pub fn with_q(self, q: usize) -> Result<Self> {
        Self::new(self.n, self.l, q)
    }

    /// N^L
    pub fn dim(&self) -> usize {
        self.n.pow(self.l as u32)
    }

    pub fn is_superintegrable_size(&self) -> bool {
        self.l % self.n == 0
    }

    pub fn require_multiple(&self) -> Result<()> {
        if self.is_superintegrable_size() {
            Ok(())
        } else {
            Err(Error::NotMultiple { n: self.n, l: self.l })
        }
    }

    /// r = (N − 1)L/N; meaningful when N | L.
    pub fn r(&self) -> usize {
        (self.n - 1) * self.l / self.n
    }

    /// Fails unless the runtime N matches the field's root order.
    pub(crate) fn check_order<const N: usize>(&self) -> Result<()> {
        if self.n == N {
            Ok(())
        } else {
            Err(Error::Config(format!("configuration has N={} but field has order {N}", self.n)))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeState {
    pub n: Vec<usize>,
}

impl EdgeState {
    pub fn new(n: Vec<usize>) -> Self {
        EdgeState { n }
    }

    pub fn charge(&self, modulus: usize) -> usize {
        self.n.iter().sum::<usize>() % modulus
    }
}

pub fn rank(state: &EdgeState, cfg: &LatticeConfig) -> Result<usize> {
    if state.n.len() != cfg.l {
        return Err(Error::Config(format!(
            "state has {} sites, configuration has L={}",
            state.n.len(),
            cfg.l
        )));
    }
    let mut idx = 0;
    for &v in &state.n {
        if v >= cfg.n {
            return Err(Error::OutOfRange { index: v, limit: cfg.n });
        }
        idx = idx * cfg.n + v;
    }
    Ok(idx)
}

pub fn unrank(index: usize, cfg: &LatticeConfig) -> Result<EdgeState> {
    if index >= cfg.dim() {
        return Err(Error::OutOfRange { index, limit: cfg.dim() });
    }
    Ok(EdgeState::new(digits(index, cfg)))
}

/// Edge values of a rank, n₁ first. No range check.
pub(crate) fn digits(mut index: usize, cfg: &LatticeConfig) -> Vec<usize> {
    let mut out = vec![0; cfg.l];
    for slot in out.iter_mut().rev() {
        *slot = index % cfg.n;
        index /= cfg.n;
    }
    out
}

/// Place value of site j (1-based): N^{L−j}.
pub(crate) fn site_stride(cfg: &LatticeConfig, j: usize) -> usize {
    cfg.n.pow((cfg.l - j) as u32)
}

pub fn charge(state: &EdgeState, cfg: &LatticeConfig) -> usize {
    state.charge(cfg.n)
}

pub(crate) fn charge_of_rank(index: usize, cfg: &LatticeConfig) -> usize {
    let mut idx = index;
    let mut s = 0;
    for _ in 0..cfg.l {
        s += idx % cfg.n;
        idx /= cfg.n;
    }
    s % cfg.n
}

/// Ranks with Σ n_j ≡ c (mod N), ascending.
pub fn sector_basis(cfg: &LatticeConfig, c: usize) -> Vec<usize> {
    (0..cfg.dim()).filter(|&i| charge_of_rank(i, cfg) == c).collect()
}

/// A charge sector with a rank ↔ position lookup.
#[derive(Clone, Debug)]
pub struct Sector {
    pub config: LatticeConfig,
    pub charge: usize,
    basis: Vec<usize>,
    position: Vec<u32>,
}

impl Sector {
    pub fn new(cfg: &LatticeConfig, c: usize) -> Self {
        let basis = sector_basis(cfg, c);
        let mut position = vec![u32::MAX; cfg.dim()];
        for (p, &r) in basis.iter().enumerate() {
            position[r] = p as u32;
        }
        Sector {
            config: *cfg,
            charge: c,
            basis,
            position,
        }
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    /// Full-space rank of the p-th sector state.
    pub fn rank_at(&self, p: usize) -> usize {
        self.basis[p]
    }

    /// Sector position of a full-space rank, if it belongs to the sector.
    pub fn position(&self, rank: usize) -> Option<usize> {
        match self.position.get(rank) {
            Some(&p) if p != u32::MAX => Some(p as usize),
            _ => None,
        }
    }
}

/// Sparse vector: basis index → nonzero amplitude.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateVector<S> {
    amps: BTreeMap<usize, S>,
}

impl<S: Ring> StateVector<S> {
    pub fn zero() -> Self {
        StateVector { amps: BTreeMap::new() }
    }

    pub fn basis(index: usize) -> Self {
        let mut amps = BTreeMap::new();
        amps.insert(index, S::one());
        StateVector { amps }
    }

    pub fn from_entries<I: IntoIterator<Item = (usize, S)>>(entries: I) -> Self {
        let mut v = Self::zero();
        for (i, a) in entries {
            v.add_at(i, &a);
        }
        v
    }

    pub fn get(&self, index: usize) -> S {
        self.amps.get(&index).cloned().unwrap_or_else(S::zero)
    }

    pub fn add_at(&mut self, index: usize, a: &S) {
        if a.is_zero() {
            return;
        }
        let slot = self.amps.entry(index).or_insert_with(S::zero);
        slot.add_assign_ref(a);
        if slot.is_zero() {
            self.amps.remove(&index);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &S)> {
        self.amps.iter().map(|(&i, a)| (i, a))
    }

    pub fn nnz(&self) -> usize {
        self.amps.len()
    }

    pub fn is_zero(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::from_entries(self.amps.iter().map(|(&i, a)| (i, a.mul_ref(c))))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, a) in other.iter() {
            out.add_at(i, a);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, a) in other.iter() {
            out.add_at(i, &(-a.clone()));
        }
        out
    }

    pub fn to_dense(&self, dim: usize) -> Vec<S> {
        let mut v = vec![S::zero(); dim];
        for (i, a) in self.iter() {
            v[i] = a.clone();
        }
        v
    }

    pub fn from_dense(v: &[S]) -> Self {
        StateVector {
            amps: v
                .iter()
                .enumerate()
                .filter(|(_, a)| !a.is_zero())
                .map(|(i, a)| (i, a.clone()))
                .collect(),
        }
    }
}

/// Ferromagnetic |0…0⟩ and antiferromagnetic |N−1…N−1⟩ ranks.
pub fn ground_state_ranks(cfg: &LatticeConfig) -> (usize, usize) {
    (0, cfg.dim() - 1)
}

/// (|Ω⟩, |Ω̄⟩) as full-space unit vectors.
pub fn ground_states<S: Ring>(cfg: &LatticeConfig) -> (StateVector<S>, StateVector<S>) {
    let (a, b) = ground_state_ranks(cfg);
    (StateVector::basis(a), StateVector::basis(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, l: usize) -> LatticeConfig {
        LatticeConfig::new(n, l, 0).unwrap()
    }

    #[test]
    fn positional_rank() {
        let c = cfg(3, 3);
        assert_eq!(rank(&EdgeState::new(vec![0, 0, 0]), &c).unwrap(), 0);
        assert_eq!(rank(&EdgeState::new(vec![0, 0, 1]), &c).unwrap(), 1);
        assert_eq!(rank(&EdgeState::new(vec![2, 2, 2]), &c).unwrap(), 26);
        assert!(rank(&EdgeState::new(vec![3, 0, 0]), &c).is_err());
        assert!(unrank(27, &c).is_err());
    }

    #[test]
    fn unrank_inverts_rank_exhaustively() {
        for (n, l) in [(2, 5), (3, 4), (4, 3), (5, 2)] {
            let c = cfg(n, l);
            for i in 0..c.dim() {
                assert_eq!(rank(&unrank(i, &c).unwrap(), &c).unwrap(), i);
            }
        }
    }

    #[test]
    fn charges() {
        let c = cfg(3, 3);
        assert_eq!(charge(&EdgeState::new(vec![0, 0, 0]), &c), 0);
        assert_eq!(charge(&EdgeState::new(vec![1, 2, 0]), &c), 0);
        assert_eq!(charge(&EdgeState::new(vec![1, 1, 0]), &c), 2);
    }

    #[test]
    fn sector_sizes_partition_the_space() {
        for (n, l) in [(3, 3), (2, 4), (4, 3), (3, 1)] {
            let c = cfg(n, l);
            let mut total = 0;
            for q in 0..n {
                let b = sector_basis(&c, q);
                assert_eq!(b.len(), n.pow(l as u32 - 1), "N={n} L={l} c={q}");
                assert!(b.windows(2).all(|w| w[0] < w[1]));
                total += b.len();
            }
            assert_eq!(total, c.dim());
        }
        assert_eq!(sector_basis(&cfg(3, 1), 0), vec![0]);
    }

    #[test]
    fn ground_states_lie_in_charge_zero_sector() {
        let c = cfg(3, 3);
        let (o, ob) = ground_state_ranks(&c);
        assert_eq!((o, ob), (0, 26));
        let s = Sector::new(&c, 0);
        assert!(s.position(o).is_some());
        assert!(s.position(ob).is_some());
        assert_eq!(charge_of_rank(ob, &c), 0);
    }

    #[test]
    fn config_validation() {
        assert!(LatticeConfig::new(1, 3, 0).is_err());
        assert!(LatticeConfig::new(3, 0, 0).is_err());
        assert!(LatticeConfig::new(3, 3, 3).is_err());
        assert!(LatticeConfig::new(3, 40, 0).is_err());
        assert_eq!(cfg(3, 6).r(), 4);
        assert!(cfg(3, 4).require_multiple().is_err());
    }
}
