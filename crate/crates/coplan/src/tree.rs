//! Balanced tree overlay over the agent population.
//!
//! Agents are placed on the nodes of a complete tree in breadth-first (heap)
//! order: node 0 is the root and node `i`'s children are the nodes
//! `arity * i + 1 ..= arity * i + arity` that exist. Randomizing the placement
//! changes the order in which agents aggregate and decide, which is the main
//! source of run-to-run variation in the protocol.

use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct TreeOverlay {
    positions: Vec<usize>,
    arity: usize,
}

impl TreeOverlay {
    /// Random height-balanced overlay: agent ids `0..n_agents` are shuffled
    /// into heap positions. The same seed always yields the same overlay.
    pub fn build(n_agents: usize, arity: usize, seed: u64) -> Result<Self> {
        let mut positions: Vec<usize> = (0..n_agents).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        positions.shuffle(&mut rng);
        TreeOverlay::from_positions(positions, arity)
    }

    /// Overlay with an explicit placement: `positions[node]` is the agent at
    /// that heap node. Must be a permutation of `0..positions.len()`.
    pub fn from_positions(positions: Vec<usize>, arity: usize) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::Config("overlay needs at least one agent".into()));
        }
        if arity == 0 {
            return Err(Error::Config("overlay arity must be at least 1".into()));
        }
        let n = positions.len();
        let mut seen = vec![false; n];
        for &agent in &positions {
            if agent >= n || seen[agent] {
                return Err(Error::Config(format!(
                    "positions must be a permutation of 0..{n}"
                )));
            }
            seen[agent] = true;
        }
        Ok(TreeOverlay { positions, arity })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    /// Agent placed at a heap node.
    pub fn agent_at(&self, node: usize) -> usize {
        self.positions[node]
    }

    /// Heap nodes of the children of `node` (possibly empty).
    pub fn children(&self, node: usize) -> std::ops::Range<usize> {
        let lo = (self.arity * node + 1).min(self.len());
        let hi = (self.arity * node + self.arity + 1).min(self.len());
        lo..hi
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        if node == 0 {
            None
        } else {
            Some((node - 1) / self.arity)
        }
    }

    pub fn is_leaf(&self, node: usize) -> bool {
        self.children(node).is_empty()
    }
}
