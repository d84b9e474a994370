use std::collections::HashMap;

use crate::error::{Error, Result};

/// Default cap on the total basis dimension.
pub const DEFAULT_BASIS_CAP: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    /// `phi_0`, energy `e0`.
    Down,
    /// `phi_1`, energy `e1`.
    Up,
}

impl Spin {
    pub fn flip(self) -> Self {
        match self {
            Spin::Down => Spin::Up,
            Spin::Up => Spin::Down,
        }
    }

    pub fn bit(self) -> usize {
        match self {
            Spin::Down => 0,
            Spin::Up => 1,
        }
    }
}

/// A basis state: spin and a non-decreasing list of occupied mode indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockState {
    pub spin: Spin,
    pub modes: Vec<u32>,
}

impl FockState {
    pub fn number(&self) -> usize {
        self.modes.len()
    }

    /// `(spin + n) mod 2`, conserved by `sigma_1 (a + a^*)`.
    pub fn parity(&self) -> usize {
        (self.spin.bit() + self.modes.len()) % 2
    }

    pub fn occupation(&self, j: u32) -> usize {
        self.modes.iter().filter(|&&m| m == j).count()
    }

    /// State with one more boson in mode `j` and flipped spin.
    pub fn raised_flipped(&self, j: u32) -> Self {
        let mut modes = self.modes.clone();
        let pos = modes.partition_point(|&m| m <= j);
        modes.insert(pos, j);
        Self { spin: self.spin.flip(), modes }
    }
}

/// One parity sector of the boson-number-truncated Fock space.
#[derive(Debug, Clone)]
pub struct FockBasis {
    modes: usize,
    n_max: usize,
    parity: usize,
    states: Vec<FockState>,
    index: HashMap<FockState, usize>,
}

/// `C(n + k - 1, k)` multisets of size `k` from `n` modes, saturating.
fn multisets(n: usize, k: usize) -> usize {
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n + i) as u128 / (i + 1) as u128;
        if c > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    c as usize
}

/// Dimension of the full truncated space, `2 sum_{n <= N_max} C(M + n - 1, n)`.
pub fn total_dimension(modes: usize, n_max: usize) -> usize {
    (0..=n_max).fold(0usize, |acc, n| acc.saturating_add(multisets(modes, n))).saturating_mul(2)
}

impl FockBasis {
    /// States of the given parity, ordered by boson number, then spin, then modes.
    pub fn sector(modes: usize, n_max: usize, parity: usize, cap: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::InvalidParameter { name: "n_max", value: 0.0, reason: "must be >= 1" });
        }
        let dim = total_dimension(modes, n_max);
        if dim > cap {
            return Err(Error::DimensionOverflow { dim, cap });
        }
        let mut states = Vec::with_capacity(dim / 2);
        let mut cfg = Vec::new();
        for n in 0..=n_max {
            let spin = if (n + parity) % 2 == 1 { Spin::Up } else { Spin::Down };
            push_multisets(modes as u32, n, 0, &mut cfg, &mut |m| {
                states.push(FockState { spin, modes: m.to_vec() });
            });
        }
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(Self { modes, n_max, parity: parity % 2, states, index })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn parity(&self) -> usize {
        self.parity
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &FockState {
        &self.states[i]
    }

    pub fn index_of(&self, s: &FockState) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Index of the zero-boson state of this sector (`phi_0 Omega` or `phi_1 Omega`).
    pub fn vacuum_index(&self) -> usize {
        0
    }
}

fn push_multisets(modes: u32, left: usize, start: u32, cur: &mut Vec<u32>, out: &mut impl FnMut(&[u32])) {
    if left == 0 {
        out(cur);
        return;
    }
    for j in start..modes {
        cur.push(j);
        push_multisets(modes, left - 1, j, cur, out);
        cur.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        assert_eq!(total_dimension(1, 1), 4);
        assert_eq!(total_dimension(40, 2), 2 * (1 + 40 + 820));
        let a = FockBasis::sector(40, 2, 0, DEFAULT_BASIS_CAP).unwrap();
        let b = FockBasis::sector(40, 2, 1, DEFAULT_BASIS_CAP).unwrap();
        assert_eq!(a.dim(), 861);
        assert_eq!(a.dim() + b.dim(), total_dimension(40, 2));
        assert_eq!(FockBasis::sector(200, 1, 1, DEFAULT_BASIS_CAP).unwrap().dim(), 201);
    }

    #[test]
    fn index_maps_are_bijective() {
        let b = FockBasis::sector(7, 3, 1, DEFAULT_BASIS_CAP).unwrap();
        for (i, s) in b.states().iter().enumerate() {
            assert_eq!(b.index_of(s), Some(i));
            assert_eq!(s.parity(), 1);
            assert!(s.modes.windows(2).all(|w| w[0] <= w[1]));
        }
        assert_eq!(b.index.len(), b.dim());
    }

    #[test]
    fn vacuum_spins() {
        let even = FockBasis::sector(3, 1, 0, DEFAULT_BASIS_CAP).unwrap();
        let odd = FockBasis::sector(3, 1, 1, DEFAULT_BASIS_CAP).unwrap();
        assert_eq!(even.state(even.vacuum_index()), &FockState { spin: Spin::Down, modes: vec![] });
        assert_eq!(odd.state(odd.vacuum_index()), &FockState { spin: Spin::Up, modes: vec![] });
    }

    #[test]
    fn overflow() {
        assert!(matches!(
            FockBasis::sector(1000, 2, 0, DEFAULT_BASIS_CAP),
            Err(Error::DimensionOverflow { .. })
        ));
        assert!(FockBasis::sector(4, 0, 0, DEFAULT_BASIS_CAP).is_err());
    }

    #[test]
    fn raise_keeps_order() {
        let s = FockState { spin: Spin::Up, modes: vec![1, 3] };
        assert_eq!(s.raised_flipped(2).modes, vec![1, 2, 3]);
        assert_eq!(s.raised_flipped(3).modes, vec![1, 3, 3]);
        assert_eq!(s.raised_flipped(3).spin, Spin::Down);
        assert_eq!(s.raised_flipped(3).occupation(3), 2);
    }
}
