//! Incremental connectivity for `connected` over fixed target masks.
//!
//! Each tracker is a union-find over the cells holding one piece type, with
//! a bitset per root recording which target masks the component touches.
//! Placing a piece onto an empty cell is handled incrementally; any other
//! change to a tracked piece marks the state for a rebuild.

use crate::dsl::ast::Player;
use crate::engine::state::GameState;
use crate::topology::{CellMask, DirSet, Topology};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnionFind {
    parent: Vec<u16>,
    size: Vec<u16>,
    touch: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n as u16).collect(), size: vec![1; n], touch: vec![0; n] }
    }

    pub fn byte_size(&self) -> usize {
        self.parent.len() * 8
    }

    #[inline]
    fn find(&self, mut c: usize) -> usize {
        while self.parent[c] as usize != c {
            c = self.parent[c] as usize;
        }
        c
    }

    #[inline]
    fn find_mut(&mut self, mut c: usize) -> usize {
        while self.parent[c] as usize != c {
            let g = self.parent[self.parent[c] as usize];
            self.parent[c] = g;
            c = g as usize;
        }
        c
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find_mut(a), self.find_mut(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a as u16;
        self.size[a] += self.size[b];
        self.touch[a] |= self.touch[b];
    }
}

/// One (piece, directions) union-find shared by every `connected` call
/// that uses it.
#[derive(Debug, Clone)]
pub struct Tracker {
    pub piece: usize,
    /// Adjacency directions for pieces of each owner.
    pub dirs: [DirSet; 2],
    /// Which target-mask bits each cell belongs to.
    pub cell_bits: Vec<u32>,
    pub masks: Vec<CellMask>,
}

impl Tracker {
    pub fn new(piece: usize, dirs: [DirSet; 2], num_cells: usize) -> Tracker {
        Tracker { piece, dirs, cell_bits: vec![0; num_cells], masks: Vec::new() }
    }

    /// Registers target masks and returns the first bit assigned, or None
    /// if the tracker has no room left.
    pub fn add_masks(&mut self, masks: &[CellMask]) -> Option<u32> {
        let first = self.masks.len();
        if first + masks.len() > 32 {
            return None;
        }
        for (i, m) in masks.iter().enumerate() {
            for c in m.iter() {
                self.cell_bits[c] |= 1 << (first + i);
            }
            self.masks.push(*m);
        }
        Some(first as u32)
    }

    pub fn empty(&self, num_cells: usize) -> UnionFind {
        UnionFind::new(num_cells)
    }

    /// Adds a freshly placed piece at `cell`.
    pub fn add(&self, uf: &mut UnionFind, topo: &Topology, board: &[u8], cell: usize) {
        let code = board[cell];
        let owner = (code as usize - 1) % 2;
        uf.parent[cell] = cell as u16;
        uf.size[cell] = 1;
        uf.touch[cell] = self.cell_bits[cell];
        for d in self.dirs[owner].iter() {
            if let Some(n) = topo.neighbor(cell, d) {
                if board[n] == code {
                    uf.union(cell, n);
                }
            }
        }
    }

    pub fn rebuild(&self, uf: &mut UnionFind, topo: &Topology, state: &GameState) {
        for p in Player::ALL {
            for c in state.pieces_of(self.piece, p).iter() {
                self.add(uf, topo, &state.board, c);
            }
        }
    }

    /// Whether some component of `p`'s pieces touches every mask in
    /// `first_bit..first_bit + count`.
    pub fn query(&self, uf: &UnionFind, state: &GameState, p: Player, first_bit: u32, count: u32) -> bool {
        if count == 0 {
            return !state.pieces_of(self.piece, p).is_empty();
        }
        let need = (((1u64 << count) - 1) as u32) << first_bit;
        let candidates = state.pieces_of(self.piece, p) & self.masks[first_bit as usize];
        candidates.iter().any(|c| uf.touch[uf.find(c)] & need == need)
    }
}

/// Flood-fill fallback: whether some component of `pieces` (adjacent along
/// `dirs`) intersects every mask.
pub fn connected_bfs(topo: &Topology, pieces: CellMask, dirs: DirSet, masks: &[CellMask]) -> bool {
    if masks.is_empty() {
        return !pieces.is_empty();
    }
    let mut seen = CellMask::EMPTY;
    let mut stack = Vec::new();
    for start in (pieces & masks[0]).iter() {
        if seen.contains(start) {
            continue;
        }
        let mut component = CellMask::EMPTY;
        seen.set(start);
        stack.push(start);
        while let Some(c) = stack.pop() {
            component.set(c);
            for d in dirs.iter() {
                if let Some(n) = topo.neighbor(c, d) {
                    if pieces.contains(n) && !seen.contains(n) {
                        seen.set(n);
                        stack.push(n);
                    }
                }
            }
        }
        if masks.iter().all(|m| m.intersects(&component)) {
            return true;
        }
    }
    false
}
