//! Board geometry: cell indexing, adjacency, named cell sets and the
//! precomputed line / ray / pattern tables the compiler bakes into closures.
//!
//! Cells are indexed row-major from the top-left. Every board is embedded in
//! a rectangular *lattice* of `rows x width` positions so that all four
//! shapes share one neighbor rule per direction:
//!
//! * square / rectangle: lattice column is the board column, eight
//!   directions.
//! * hex_rectangle: a parallelogram in axial coordinates. The six
//!   directions are left, right, up, down, up_right `(-1,+1)` and
//!   down_left `(+1,-1)`; `diagonal` means {up_right, down_left}.
//! * hexagon: rows are horizontal; the lattice column is the axial `q`
//!   shifted to be non-negative. The six directions are left, right,
//!   up_left `(-1,0)`, up_right `(-1,+1)`, down_left `(+1,-1)` and
//!   down_right `(+1,0)`; `orthogonal` means {left, right}.

use std::fmt;
use std::ops::{BitAnd, BitAndAssign, BitOr, BitOrAssign, Not};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::ast::{DirectionKw, EdgeKw, Facing, Orientation};

/// Largest supported board.
pub const MAX_CELLS: usize = 512;
const WORDS: usize = MAX_CELLS / 64;
pub const NO_CELL: u16 = u16::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoardShape {
    Square(u64),
    /// rows, columns
    Rectangle(u64, u64),
    /// Diameter (odd).
    Hexagon(u64),
    /// rows, columns
    HexRectangle(u64, u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("invalid board shape parameter: {0}")]
    InvalidShapeParam(String),
    #[error("relative direction `{0}` needs a forward assignment (set_forward)")]
    MissingForwardAssignment(String),
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dir {
    Up,
    Down,
    Left,
    Right,
    UpLeft,
    UpRight,
    DownLeft,
    DownRight,
}

impl Dir {
    pub const ALL: [Dir; 8] =
        [Dir::Up, Dir::Down, Dir::Left, Dir::Right, Dir::UpLeft, Dir::UpRight, Dir::DownLeft, Dir::DownRight];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn opposite(self) -> Dir {
        match self {
            Dir::Up => Dir::Down,
            Dir::Down => Dir::Up,
            Dir::Left => Dir::Right,
            Dir::Right => Dir::Left,
            Dir::UpLeft => Dir::DownRight,
            Dir::UpRight => Dir::DownLeft,
            Dir::DownLeft => Dir::UpRight,
            Dir::DownRight => Dir::UpLeft,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Dir::Up => "up",
            Dir::Down => "down",
            Dir::Left => "left",
            Dir::Right => "right",
            Dir::UpLeft => "up_left",
            Dir::UpRight => "up_right",
            Dir::DownLeft => "down_left",
            Dir::DownRight => "down_right",
        }
    }

    /// Lattice offset (row, column).
    fn delta(self, hexagon: bool) -> (i32, i32) {
        match self {
            Dir::Up => (-1, 0),
            Dir::Down => (1, 0),
            Dir::Left => (0, -1),
            Dir::Right => (0, 1),
            Dir::UpLeft if hexagon => (-1, 0),
            Dir::UpLeft => (-1, -1),
            Dir::UpRight => (-1, 1),
            Dir::DownLeft => (1, -1),
            Dir::DownRight if hexagon => (1, 0),
            Dir::DownRight => (1, 1),
        }
    }
}

/// A set of [`Dir`] as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct DirSet(u8);

impl DirSet {
    pub const EMPTY: DirSet = DirSet(0);

    pub fn of(dirs: &[Dir]) -> DirSet {
        DirSet(dirs.iter().fold(0, |acc, d| acc | 1 << d.index()))
    }

    pub fn contains(self, d: Dir) -> bool {
        self.0 & (1 << d.index()) != 0
    }

    pub fn insert(&mut self, d: Dir) {
        self.0 |= 1 << d.index();
    }

    pub fn union(self, other: DirSet) -> DirSet {
        DirSet(self.0 | other.0)
    }

    pub fn intersect(self, other: DirSet) -> DirSet {
        DirSet(self.0 & other.0)
    }

    pub fn minus(self, other: DirSet) -> DirSet {
        DirSet(self.0 & !other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = Dir> {
        Dir::ALL.into_iter().filter(move |d| self.contains(*d))
    }
}

/// Fixed-size cell bitset (up to [`MAX_CELLS`] cells).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct CellMask([u64; WORDS]);

impl CellMask {
    pub const EMPTY: CellMask = CellMask([0; WORDS]);

    /// Cells `0..n`.
    pub fn first(n: usize) -> CellMask {
        let mut m = CellMask::EMPTY;
        for (w, word) in m.0.iter_mut().enumerate() {
            let lo = w * 64;
            if n >= lo + 64 {
                *word = u64::MAX;
            } else if n > lo {
                *word = (1u64 << (n - lo)) - 1;
            }
        }
        m
    }

    pub fn from_cells(cells: impl IntoIterator<Item = usize>) -> CellMask {
        let mut m = CellMask::EMPTY;
        for c in cells {
            m.set(c);
        }
        m
    }

    #[inline]
    pub fn single(c: usize) -> CellMask {
        let mut m = CellMask::EMPTY;
        m.set(c);
        m
    }

    #[inline]
    pub fn set(&mut self, c: usize) {
        self.0[c >> 6] |= 1 << (c & 63);
    }

    #[inline]
    pub fn clear(&mut self, c: usize) {
        self.0[c >> 6] &= !(1 << (c & 63));
    }

    #[inline]
    pub fn contains(&self, c: usize) -> bool {
        self.0[c >> 6] >> (c & 63) & 1 == 1
    }

    #[inline]
    pub fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }

    #[inline]
    pub fn intersects(&self, other: &CellMask) -> bool {
        self.0.iter().zip(other.0.iter()).any(|(a, b)| a & b != 0)
    }

    #[inline]
    pub fn is_subset(&self, other: &CellMask) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a & !b == 0)
    }

    pub fn andnot(&self, other: &CellMask) -> CellMask {
        let mut out = *self;
        for (a, b) in out.0.iter_mut().zip(other.0.iter()) {
            *a &= !b;
        }
        out
    }

    pub fn first_cell(&self) -> Option<usize> {
        self.0.iter().enumerate().find(|(_, w)| **w != 0).map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn iter(&self) -> CellIter {
        CellIter { words: self.0, word: 0 }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for CellMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct CellIter {
    words: [u64; WORDS],
    word: usize,
}

impl Iterator for CellIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        while self.word < WORDS {
            let w = self.words[self.word];
            if w != 0 {
                self.words[self.word] = w & (w - 1);
                return Some(self.word * 64 + w.trailing_zeros() as usize);
            }
            self.word += 1;
        }
        None
    }
}

macro_rules! bitop {
    ($tr:ident, $f:ident, $tra:ident, $fa:ident, $op:tt) => {
        #[allow(clippy::assign_op_pattern)]
        impl $tr for CellMask {
            type Output = CellMask;
            #[inline]
            fn $f(mut self, rhs: CellMask) -> CellMask {
                for (a, b) in self.0.iter_mut().zip(rhs.0.iter()) {
                    *a = *a $op *b;
                }
                self
            }
        }
        #[allow(clippy::assign_op_pattern)]
        impl $tra for CellMask {
            #[inline]
            fn $fa(&mut self, rhs: CellMask) {
                for (a, b) in self.0.iter_mut().zip(rhs.0.iter()) {
                    *a = *a $op *b;
                }
            }
        }
    };
}

bitop!(BitAnd, bitand, BitAndAssign, bitand_assign, &);
bitop!(BitOr, bitor, BitOrAssign, bitor_assign, |);

/// Complement over all `MAX_CELLS` bits; intersect with [`Topology::all`]
/// to stay on the board.
impl Not for CellMask {
    type Output = CellMask;
    fn not(mut self) -> CellMask {
        for a in self.0.iter_mut() {
            *a = !*a;
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Edge {
    Top,
    Bottom,
    Left,
    Right,
    TopLeft,
    TopRight,
    BottomLeft,
    BottomRight,
}

impl Edge {
    pub const ALL: [Edge; 8] = [
        Edge::Top,
        Edge::Bottom,
        Edge::Left,
        Edge::Right,
        Edge::TopLeft,
        Edge::TopRight,
        Edge::BottomLeft,
        Edge::BottomRight,
    ];

    /// The absolute edge for an edge keyword, if it does not depend on the
    /// player's facing.
    pub fn from_keyword(kw: EdgeKw) -> Option<Edge> {
        Some(match kw {
            EdgeKw::Top => Edge::Top,
            EdgeKw::Bottom => Edge::Bottom,
            EdgeKw::Left => Edge::Left,
            EdgeKw::Right => Edge::Right,
            EdgeKw::TopLeft => Edge::TopLeft,
            EdgeKw::TopRight => Edge::TopRight,
            EdgeKw::BottomLeft => Edge::BottomLeft,
            EdgeKw::BottomRight => Edge::BottomRight,
            EdgeKw::Forward | EdgeKw::Backward => return None,
        })
    }

    pub fn facing(f: Facing) -> Edge {
        match f {
            Facing::Up => Edge::Top,
            Facing::Down => Edge::Bottom,
            Facing::Left => Edge::Left,
            Facing::Right => Edge::Right,
        }
    }

    pub fn opposite(self) -> Edge {
        match self {
            Edge::Top => Edge::Bottom,
            Edge::Bottom => Edge::Top,
            Edge::Left => Edge::Right,
            Edge::Right => Edge::Left,
            Edge::TopLeft => Edge::BottomRight,
            Edge::TopRight => Edge::BottomLeft,
            Edge::BottomLeft => Edge::TopRight,
            Edge::BottomRight => Edge::TopLeft,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Topology {
    pub shape: BoardShape,
    pub num_cells: usize,
    pub rows: usize,
    /// Lattice width (columns of the embedding lattice).
    pub width: usize,
    pub row_of: Vec<u16>,
    /// Lattice column of each cell.
    pub col_of: Vec<u16>,
    /// Board directions in canonical order.
    pub directions: DirSet,
    neighbors: Vec<[u16; 8]>,
    lattice: Vec<u16>,
    edges: [Option<CellMask>; 8],
    pub corners: CellMask,
    pub center: CellMask,
    pub all: CellMask,
    hexagon: bool,
}

/// Lattice description shared by board construction and shape patterns.
fn lattice_cells(shape: BoardShape) -> Result<(usize, usize, Vec<(usize, usize)>), TopologyError> {
    let positive = |v: u64, what: &str| -> Result<usize, TopologyError> {
        if v == 0 {
            Err(TopologyError::InvalidShapeParam(format!("{what} must be positive")))
        } else if v > MAX_CELLS as u64 {
            Err(TopologyError::InvalidShapeParam(format!("{what} {v} is too large")))
        } else {
            Ok(v as usize)
        }
    };
    Ok(match shape {
        BoardShape::Square(n) => {
            let n = positive(n, "square size")?;
            (n, n, (0..n).flat_map(|r| (0..n).map(move |c| (r, c))).collect())
        }
        BoardShape::Rectangle(r, c) | BoardShape::HexRectangle(r, c) => {
            let (r, c) = (positive(r, "row count")?, positive(c, "column count")?);
            (r, c, (0..r).flat_map(|i| (0..c).map(move |j| (i, j))).collect())
        }
        BoardShape::Hexagon(d) => {
            let d = positive(d, "hexagon diameter")?;
            if d % 2 == 0 {
                return Err(TopologyError::InvalidShapeParam(format!("hexagon diameter {d} must be odd")));
            }
            let radius = (d / 2) as i64;
            let mut cells = Vec::new();
            for r in 0..d as i64 {
                let rr = r - radius;
                let lo = (-radius).max(-radius - rr);
                let hi = radius.min(radius - rr);
                for q in lo..=hi {
                    cells.push((r as usize, (q + radius) as usize));
                }
            }
            (d, d, cells)
        }
    })
}

impl Topology {
    pub fn new(shape: BoardShape) -> Result<Topology, TopologyError> {
        let (rows, width, cells) = lattice_cells(shape)?;
        let num_cells = cells.len();
        if num_cells > MAX_CELLS {
            return Err(TopologyError::InvalidShapeParam(format!(
                "board has {num_cells} cells; at most {MAX_CELLS} are supported"
            )));
        }
        let hexagon = matches!(shape, BoardShape::Hexagon(_));
        let directions = match shape {
            BoardShape::Square(_) | BoardShape::Rectangle(..) => DirSet::of(&Dir::ALL),
            BoardShape::Hexagon(_) => {
                DirSet::of(&[Dir::Left, Dir::Right, Dir::UpLeft, Dir::UpRight, Dir::DownLeft, Dir::DownRight])
            }
            BoardShape::HexRectangle(..) => {
                DirSet::of(&[Dir::Up, Dir::Down, Dir::Left, Dir::Right, Dir::UpRight, Dir::DownLeft])
            }
        };

        let mut lattice = vec![NO_CELL; rows * width];
        for (i, &(r, c)) in cells.iter().enumerate() {
            lattice[r * width + c] = i as u16;
        }
        let at = |r: i32, c: i32| -> u16 {
            if r < 0 || c < 0 || r as usize >= rows || c as usize >= width {
                NO_CELL
            } else {
                lattice[r as usize * width + c as usize]
            }
        };
        let neighbors = cells
            .iter()
            .map(|&(r, c)| {
                let mut n = [NO_CELL; 8];
                for d in directions.iter() {
                    let (dr, dc) = d.delta(hexagon);
                    n[d.index()] = at(r as i32 + dr, c as i32 + dc);
                }
                n
            })
            .collect();

        let all = CellMask::first(num_cells);
        let mask_where = |f: &dyn Fn(i64, i64) -> bool| {
            CellMask::from_cells(cells.iter().enumerate().filter(|(_, &(r, c))| f(r as i64, c as i64)).map(|(i, _)| i))
        };
        let (last_r, last_c) = (rows as i64 - 1, width as i64 - 1);
        let mut edges: [Option<CellMask>; 8] = [None; 8];
        let corners;
        if hexagon {
            let radius = (rows / 2) as i64;
            let cube = |r: i64, c: i64| {
                let (q, rr) = (c - radius, r - radius);
                (q, rr, -q - rr)
            };
            let top = mask_where(&|r, c| cube(r, c).1 == -radius);
            let bottom = mask_where(&|r, c| cube(r, c).1 == radius);
            let top_right = mask_where(&|r, c| cube(r, c).0 == radius);
            let bottom_right = mask_where(&|r, c| cube(r, c).2 == -radius);
            let top_left = mask_where(&|r, c| cube(r, c).2 == radius);
            let bottom_left = mask_where(&|r, c| cube(r, c).0 == -radius);
            edges[Edge::Top as usize] = Some(top);
            edges[Edge::Bottom as usize] = Some(bottom);
            edges[Edge::TopRight as usize] = Some(top_right);
            edges[Edge::BottomRight as usize] = Some(bottom_right);
            edges[Edge::TopLeft as usize] = Some(top_left);
            edges[Edge::BottomLeft as usize] = Some(bottom_left);
            edges[Edge::Left as usize] = Some(top_left | bottom_left);
            edges[Edge::Right as usize] = Some(top_right | bottom_right);
            corners = (top & top_left)
                | (top & top_right)
                | (top_right & bottom_right)
                | (bottom_right & bottom)
                | (bottom & bottom_left)
                | (bottom_left & top_left);
        } else {
            let top = mask_where(&|r, _| r == 0);
            let bottom = mask_where(&|r, _| r == last_r);
            let left = mask_where(&|_, c| c == 0);
            let right = mask_where(&|_, c| c == last_c);
            edges[Edge::Top as usize] = Some(top);
            edges[Edge::Bottom as usize] = Some(bottom);
            edges[Edge::Left as usize] = Some(left);
            edges[Edge::Right as usize] = Some(right);
            corners = (top | bottom) & (left | right);
        }

        let center = if hexagon {
            let radius = rows / 2;
            CellMask::single(lattice[radius * width + radius] as usize)
        } else {
            let mid = |n: usize| if n.is_multiple_of(2) { vec![n / 2 - 1, n / 2] } else { vec![n / 2] };
            let (mr, mc) = (mid(rows), mid(width));
            CellMask::from_cells(mr.iter().flat_map(|&r| mc.iter().map(move |&c| r * width + c)))
        };

        Ok(Topology {
            shape,
            num_cells,
            rows,
            width,
            row_of: cells.iter().map(|&(r, _)| r as u16).collect(),
            col_of: cells.iter().map(|&(_, c)| c as u16).collect(),
            directions,
            neighbors,
            lattice,
            edges,
            corners,
            center,
            all,
            hexagon,
        })
    }

    pub fn is_hex(&self) -> bool {
        matches!(self.shape, BoardShape::Hexagon(_) | BoardShape::HexRectangle(..))
    }

    #[inline]
    pub fn neighbor(&self, cell: usize, dir: Dir) -> Option<usize> {
        let n = self.neighbors[cell][dir.index()];
        (n != NO_CELL).then_some(n as usize)
    }

    /// Cell at lattice position, if it is on the board.
    pub fn cell_at(&self, row: i64, col: i64) -> Option<usize> {
        if row < 0 || col < 0 || row as usize >= self.rows || col as usize >= self.width {
            return None;
        }
        let c = self.lattice[row as usize * self.width + col as usize];
        (c != NO_CELL).then_some(c as usize)
    }

    /// Number of cells in each board row.
    pub fn row_lengths(&self) -> Vec<usize> {
        let mut out = vec![0; self.rows];
        for &r in &self.row_of {
            out[r as usize] += 1;
        }
        out
    }

    pub fn edge(&self, e: Edge) -> Option<CellMask> {
        self.edges[e as usize]
    }

    pub fn row_mask(&self, row: usize) -> CellMask {
        CellMask::from_cells((0..self.num_cells).filter(|&c| self.row_of[c] as usize == row))
    }

    pub fn column_mask(&self, col: usize) -> CellMask {
        CellMask::from_cells((0..self.num_cells).filter(|&c| self.col_of[c] as usize == col))
    }

    /// Board edges as separate masks, in the order used by `(edges)`.
    pub fn edge_list(&self) -> Vec<CellMask> {
        let order: &[Edge] = if self.hexagon {
            &[Edge::Top, Edge::TopRight, Edge::BottomRight, Edge::Bottom, Edge::BottomLeft, Edge::TopLeft]
        } else {
            &[Edge::Top, Edge::Bottom, Edge::Left, Edge::Right]
        };
        order.iter().filter_map(|e| self.edge(*e)).collect()
    }

    pub fn corner_list(&self) -> Vec<CellMask> {
        self.corners.iter().map(CellMask::single).collect()
    }

    /// Expands a direction keyword into true directions of this board.
    pub fn resolve_direction(&self, kw: DirectionKw, facing: Option<Facing>) -> Result<DirSet, TopologyError> {
        use DirectionKw as K;
        let set = |dirs: &[Dir]| DirSet::of(dirs).intersect(self.directions);
        let orthogonal = match self.shape {
            BoardShape::Hexagon(_) => DirSet::of(&[Dir::Left, Dir::Right]),
            _ => DirSet::of(&[Dir::Up, Dir::Down, Dir::Left, Dir::Right]).intersect(self.directions),
        };
        if kw.is_relative() {
            let Some(facing) = facing else {
                return Err(TopologyError::MissingForwardAssignment(
                    crate::dsl::keywords::direction_str(kw).to_string(),
                ));
            };
            // (forward, backward, forward_left, forward_right, backward_left, backward_right)
            let table = match facing {
                Facing::Up => [Dir::Up, Dir::Down, Dir::UpLeft, Dir::UpRight, Dir::DownLeft, Dir::DownRight],
                Facing::Down => [Dir::Down, Dir::Up, Dir::DownRight, Dir::DownLeft, Dir::UpRight, Dir::UpLeft],
                Facing::Left => [Dir::Left, Dir::Right, Dir::DownLeft, Dir::UpLeft, Dir::DownRight, Dir::UpRight],
                Facing::Right => [Dir::Right, Dir::Left, Dir::UpRight, Dir::DownRight, Dir::UpLeft, Dir::DownLeft],
            };
            let i = match kw {
                K::Forward => 0,
                K::Backward => 1,
                K::ForwardLeft => 2,
                K::ForwardRight => 3,
                K::BackwardLeft => 4,
                _ => 5,
            };
            return Ok(set(&[table[i]]));
        }
        Ok(match kw {
            K::Up => set(&[Dir::Up]),
            K::Down => set(&[Dir::Down]),
            K::Left => set(&[Dir::Left]),
            K::Right => set(&[Dir::Right]),
            K::UpLeft => set(&[Dir::UpLeft]),
            K::UpRight => set(&[Dir::UpRight]),
            K::DownLeft => set(&[Dir::DownLeft]),
            K::DownRight => set(&[Dir::DownRight]),
            K::Vertical => set(&[Dir::Up, Dir::Down]),
            K::Horizontal => set(&[Dir::Left, Dir::Right]),
            K::Orthogonal => orthogonal,
            K::Diagonal => self.directions.minus(orthogonal),
            K::BackDiagonal => set(&[Dir::UpLeft, Dir::DownRight]),
            K::ForwardDiagonal => set(&[Dir::UpRight, Dir::DownLeft]),
            K::Any => self.directions,
            _ => unreachable!("relative directions handled above"),
        })
    }

    pub fn resolve_directions(&self, kws: &[DirectionKw], facing: Option<Facing>) -> Result<DirSet, TopologyError> {
        kws.iter().try_fold(DirSet::EMPTY, |acc, kw| Ok(acc.union(self.resolve_direction(*kw, facing)?)))
    }

    pub fn orientation_dirs(&self, o: Orientation) -> DirSet {
        let kw = match o {
            Orientation::Vertical => DirectionKw::Vertical,
            Orientation::Horizontal => DirectionKw::Horizontal,
            Orientation::Orthogonal => DirectionKw::Orthogonal,
            Orientation::Diagonal => DirectionKw::Diagonal,
            Orientation::BackDiagonal => DirectionKw::BackDiagonal,
            Orientation::ForwardDiagonal => DirectionKw::ForwardDiagonal,
            Orientation::Any => DirectionKw::Any,
        };
        self.resolve_direction(kw, None).expect("orientations are absolute")
    }

    /// Canonical line axes (one per undirected line through a cell) covered
    /// by `dirs`.
    pub fn axes(&self, dirs: DirSet) -> Vec<Dir> {
        [Dir::Right, Dir::Down, Dir::DownRight, Dir::DownLeft]
            .into_iter()
            .filter(|d| self.directions.contains(*d) && (dirs.contains(*d) || dirs.contains(d.opposite())))
            .collect()
    }

    /// Cells from `cell` outward in `dir`, excluding `cell`.
    pub fn ray(&self, cell: usize, dir: Dir) -> Ray<'_> {
        Ray { topo: self, cur: cell, dir }
    }

    pub fn ray_table(&self) -> RayTable {
        let mut cells = Vec::new();
        let mut offsets = Vec::with_capacity(self.num_cells * 8 + 1);
        for c in 0..self.num_cells {
            for d in Dir::ALL {
                offsets.push(cells.len() as u32);
                if self.directions.contains(d) {
                    cells.extend(self.ray(c, d).map(|x| x as u16));
                }
            }
        }
        offsets.push(cells.len() as u32);
        RayTable { cells, offsets }
    }

    pub fn line_table(&self, length: usize, dirs: DirSet) -> LineTable {
        assert!(length >= 1, "line length must be positive");
        let mut axes = self.axes(dirs);
        if length == 1 {
            axes.truncate(1);
        }
        let mut cells = Vec::new();
        let mut extensions = Vec::new();
        for start in 0..self.num_cells {
            for &axis in &axes {
                let mut tuple = Vec::with_capacity(length);
                tuple.push(start as u16);
                let mut cur = start;
                while tuple.len() < length {
                    match self.neighbor(cur, axis) {
                        Some(n) => {
                            tuple.push(n as u16);
                            cur = n;
                        }
                        None => break,
                    }
                }
                if tuple.len() == length {
                    let before = self.neighbors[start][axis.opposite().index()];
                    let after = self.neighbors[cur][axis.index()];
                    cells.extend(tuple);
                    extensions.push([before, after]);
                }
            }
        }
        LineTable { length, cells, extensions }
    }

    /// All placements of `offsets` (lattice row, column) on the board,
    /// including distinct rotations when `rotate` is set.
    pub fn pattern_table(&self, offsets: &[(i64, i64)], rotate: bool) -> Result<PatternTable, TopologyError> {
        if offsets.is_empty() {
            return Err(TopologyError::InvalidPattern("pattern has no cells".into()));
        }
        let normalize = |v: &[(i64, i64)]| -> Vec<(i64, i64)> {
            let mr = v.iter().map(|p| p.0).min().unwrap();
            let mc = v.iter().map(|p| p.1).min().unwrap();
            let mut out: Vec<_> = v.iter().map(|&(r, c)| (r - mr, c - mc)).collect();
            out.sort_unstable();
            out.dedup();
            out
        };
        let mut variants = vec![normalize(offsets)];
        if rotate {
            let steps = if self.is_hex() { 6 } else { 4 };
            let mut cur = variants[0].clone();
            for _ in 1..steps {
                cur = cur
                    .iter()
                    .map(|&(r, c)| if self.is_hex() { (c + r, -r) } else { (c, -r) })
                    .collect::<Vec<_>>();
                cur = normalize(&cur);
                if !variants.contains(&cur) {
                    variants.push(cur.clone());
                }
            }
        }
        let size = variants[0].len();
        let mut placements: Vec<Vec<u16>> = Vec::new();
        for v in &variants {
            for ar in 0..self.rows as i64 {
                for ac in 0..self.width as i64 {
                    let cells: Option<Vec<u16>> =
                        v.iter().map(|&(r, c)| self.cell_at(ar + r, ac + c).map(|x| x as u16)).collect();
                    if let Some(mut cells) = cells {
                        cells.sort_unstable();
                        placements.push(cells);
                    }
                }
            }
        }
        placements.sort();
        placements.dedup();
        Ok(PatternTable { size, cells: placements.concat() })
    }

    /// Lattice offsets of a shape used as a pattern.
    pub fn shape_offsets(shape: BoardShape) -> Result<Vec<(i64, i64)>, TopologyError> {
        let (_, _, cells) = lattice_cells(shape)?;
        Ok(cells.into_iter().map(|(r, c)| (r as i64, c as i64)).collect())
    }

    /// Offsets of a `(width (indices...))` pattern.
    pub fn index_offsets(width: u64, indices: &[u64]) -> Result<Vec<(i64, i64)>, TopologyError> {
        if width == 0 {
            return Err(TopologyError::InvalidPattern("pattern width must be positive".into()));
        }
        Ok(indices.iter().map(|&i| ((i / width) as i64, (i % width) as i64)).collect())
    }

    /// Human-readable board drawing using one character per cell.
    pub fn render(&self, glyph: impl Fn(usize) -> char) -> String {
        let mut out = String::new();
        for r in 0..self.rows {
            let cells: Vec<usize> = (0..self.width).filter_map(|c| self.cell_at(r as i64, c as i64)).collect();
            let indent = match self.shape {
                BoardShape::Hexagon(_) => self.width - cells.len(),
                BoardShape::HexRectangle(..) => r,
                _ => 0,
            };
            out.extend(std::iter::repeat_n(' ', indent));
            for (i, c) in cells.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                out.push(glyph(*c));
            }
            out.push('\n');
        }
        out
    }
}

pub struct Ray<'a> {
    topo: &'a Topology,
    cur: usize,
    dir: Dir,
}

impl Iterator for Ray<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        let n = self.topo.neighbor(self.cur, self.dir)?;
        self.cur = n;
        Some(n)
    }
}

/// Per (cell, direction) the cells outward to the border.
#[derive(Debug, Clone)]
pub struct RayTable {
    cells: Vec<u16>,
    offsets: Vec<u32>,
}

impl RayTable {
    pub fn ray(&self, cell: usize, dir: Dir) -> &[u16] {
        let i = cell * 8 + dir.index();
        &self.cells[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }
}

/// Every `length`-cell line along the selected axes, flattened, with the
/// cell just beyond each end (or [`NO_CELL`]).
#[derive(Debug, Clone)]
pub struct LineTable {
    pub length: usize,
    pub cells: Vec<u16>,
    pub extensions: Vec<[u16; 2]>,
}

impl LineTable {
    pub fn len(&self) -> usize {
        self.extensions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.extensions.is_empty()
    }

    pub fn tuple(&self, i: usize) -> &[u16] {
        &self.cells[i * self.length..(i + 1) * self.length]
    }

    pub fn tuples(&self) -> impl Iterator<Item = &[u16]> {
        self.cells.chunks_exact(self.length)
    }
}

/// Every on-board placement of a pattern, flattened (`size` cells each).
#[derive(Debug, Clone)]
pub struct PatternTable {
    pub size: usize,
    pub cells: Vec<u16>,
}

impl PatternTable {
    pub fn len(&self) -> usize {
        self.cells.len() / self.size
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn placements(&self) -> impl Iterator<Item = &[u16]> {
        self.cells.chunks_exact(self.size)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn topo(s: BoardShape) -> Topology {
        Topology::new(s).unwrap()
    }

    #[test]
    fn cell_counts() {
        assert_eq!(topo(BoardShape::Square(3)).num_cells, 9);
        assert_eq!(topo(BoardShape::Rectangle(6, 7)).num_cells, 42);
        assert_eq!(topo(BoardShape::HexRectangle(11, 11)).num_cells, 121);
        for d in [1u64, 3, 5, 7, 9, 11] {
            let s = (d as usize).div_ceil(2);
            assert_eq!(topo(BoardShape::Hexagon(d)).num_cells, 3 * s * s - 3 * s + 1);
        }
        assert_eq!(topo(BoardShape::Hexagon(9)).row_lengths(), vec![5, 6, 7, 8, 9, 8, 7, 6, 5]);
    }

    #[test]
    fn invalid_shapes() {
        assert!(Topology::new(BoardShape::Hexagon(8)).is_err());
        assert!(Topology::new(BoardShape::Square(0)).is_err());
        assert!(Topology::new(BoardShape::Square(23)).is_err());
    }

    #[test]
    fn neighbor_symmetry() {
        let shapes = [
            BoardShape::Square(8),
            BoardShape::Rectangle(6, 7),
            BoardShape::Hexagon(9),
            BoardShape::HexRectangle(11, 11),
            BoardShape::HexRectangle(3, 5),
        ];
        for s in shapes {
            let t = topo(s);
            for c in 0..t.num_cells {
                for d in t.directions.iter() {
                    if let Some(n) = t.neighbor(c, d) {
                        assert_eq!(t.neighbor(n, d.opposite()), Some(c), "{s:?} {c} {d:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn hex_rectangle_interior_has_six_neighbors() {
        let t = topo(BoardShape::HexRectangle(11, 11));
        let interior = 5 * 11 + 5;
        assert_eq!(t.directions.iter().filter(|d| t.neighbor(interior, *d).is_some()).count(), 6);
        // Axial parallelogram oracle: (r±1, c), (r, c±1), (r-1, c+1), (r+1, c-1).
        let expect: Vec<usize> = [(-1, 0), (1, 0), (0, -1), (0, 1), (-1, 1), (1, -1)]
            .iter()
            .map(|(dr, dc)| ((5 + dr) * 11 + 5 + dc) as usize)
            .collect();
        let mut got: Vec<usize> = t.directions.iter().filter_map(|d| t.neighbor(interior, d)).collect();
        let mut expect = expect;
        got.sort();
        expect.sort();
        assert_eq!(got, expect);
    }

    #[test]
    fn direction_resolution() {
        let sq = topo(BoardShape::Square(8));
        assert_eq!(
            sq.resolve_direction(DirectionKw::ForwardLeft, Some(Facing::Up)).unwrap(),
            DirSet::of(&[Dir::UpLeft])
        );
        assert_eq!(sq.resolve_direction(DirectionKw::Any, None).unwrap().len(), 8);
        assert!(sq.resolve_direction(DirectionKw::Forward, None).is_err());
        let hr = topo(BoardShape::HexRectangle(5, 5));
        assert_eq!(
            hr.resolve_direction(DirectionKw::Diagonal, None).unwrap(),
            DirSet::of(&[Dir::UpRight, Dir::DownLeft])
        );
        let hx = topo(BoardShape::Hexagon(5));
        assert_eq!(hx.resolve_direction(DirectionKw::Orthogonal, None).unwrap(), DirSet::of(&[Dir::Left, Dir::Right]));
        assert_eq!(hx.resolve_direction(DirectionKw::Diagonal, None).unwrap().len(), 4);
    }

    /// Brute force: every start cell and every direction of the board,
    /// walking lattice offsets directly, deduplicating reversed tuples.
    fn brute_lines(t: &Topology, len: usize) -> usize {
        let mut seen = std::collections::BTreeSet::new();
        for c in 0..t.num_cells {
            for d in t.directions.iter() {
                let (dr, dc) = d.delta(t.hexagon);
                let mut cells = vec![];
                for k in 0..len as i64 {
                    match t.cell_at(t.row_of[c] as i64 + dr as i64 * k, t.col_of[c] as i64 + dc as i64 * k) {
                        Some(x) => cells.push(x),
                        None => break,
                    }
                }
                if cells.len() == len {
                    cells.sort();
                    seen.insert(cells);
                }
            }
        }
        seen.len()
    }

    #[test]
    fn line_counts_match_brute_force() {
        let t = topo(BoardShape::Square(3));
        assert_eq!(t.line_table(3, t.directions).len(), 8);
        let c4 = topo(BoardShape::Rectangle(6, 7));
        assert_eq!(c4.line_table(4, c4.directions).len(), 69);
        for s in [
            BoardShape::Square(19),
            BoardShape::Rectangle(5, 9),
            BoardShape::Hexagon(9),
            BoardShape::HexRectangle(11, 11),
        ] {
            let t = topo(s);
            for len in 2..=6 {
                assert_eq!(t.line_table(len, t.directions).len(), brute_lines(&t, len), "{s:?} {len}");
            }
        }
    }

    #[test]
    fn line_extensions() {
        let t = topo(BoardShape::Square(15));
        let lines = t.line_table(5, DirSet::of(&[Dir::Right]));
        let start = 7 * 15 + 5;
        let i = (0..lines.len()).find(|&i| lines.tuple(i)[0] as usize == start).unwrap();
        assert_eq!(lines.extensions[i], [(start - 1) as u16, (start + 5) as u16]);
        let edge = (0..lines.len()).find(|&i| lines.tuple(i)[0] == 0).unwrap();
        assert_eq!(lines.extensions[edge][0], NO_CELL);
    }

    #[test]
    fn rays() {
        let t = topo(BoardShape::Square(8));
        let rays = t.ray_table();
        assert_eq!(rays.ray(0, Dir::DownRight), &[9, 18, 27, 36, 45, 54, 63]);
        assert!(rays.ray(0, Dir::Up).is_empty());
        let with_origin: Vec<usize> = std::iter::once(0).chain(t.ray(0, Dir::DownRight)).collect();
        assert_eq!(with_origin.len(), 8);
    }

    #[test]
    fn patterns() {
        let t = topo(BoardShape::Square(3));
        let sq = Topology::shape_offsets(BoardShape::Square(2)).unwrap();
        assert_eq!(t.pattern_table(&sq, false).unwrap().len(), 4);
        assert_eq!(t.pattern_table(&sq, true).unwrap().len(), 4);

        // L tromino on 5x5: each of the 4 rotations fits in a 2x2 box, 16 placements each.
        let t5 = topo(BoardShape::Square(5));
        let l = Topology::index_offsets(2, &[0, 2, 3]).unwrap();
        assert_eq!(t5.pattern_table(&l, false).unwrap().len(), 16);
        let rotated = t5.pattern_table(&l, true).unwrap();
        let mut oracle = std::collections::BTreeSet::new();
        for r in 0..4 {
            for c in 0..4 {
                let block = [r * 5 + c, r * 5 + c + 1, (r + 1) * 5 + c, (r + 1) * 5 + c + 1];
                for skip in 0..4 {
                    let mut cells: Vec<usize> = block.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, x)| *x).collect();
                    cells.sort();
                    oracle.insert(cells);
                }
            }
        }
        assert_eq!(rotated.len(), oracle.len());
    }

    #[test]
    fn edges_corners_center() {
        let t = topo(BoardShape::Square(8));
        assert_eq!(t.edge(Edge::Top).unwrap().count(), 8);
        assert_eq!(t.corners.to_vec(), vec![0, 7, 56, 63]);
        assert_eq!(t.center.to_vec(), vec![27, 28, 35, 36]);
        assert!(t.corners.is_subset(&(t.edge(Edge::Top).unwrap() | t.edge(Edge::Bottom).unwrap())));
        assert!(t.edge(Edge::TopLeft).is_none());
        assert_eq!(topo(BoardShape::Square(19)).center.to_vec(), vec![180]);

        let h = topo(BoardShape::Hexagon(9));
        assert_eq!(h.corners.count(), 6);
        assert_eq!(h.edge_list().len(), 6);
        for e in h.edge_list() {
            assert_eq!(e.count(), 5);
        }
        assert_eq!(h.center.to_vec(), vec![30]);
    }

    #[test]
    fn mask_ops() {
        let a = CellMask::from_cells([1, 70, 300]);
        let b = CellMask::from_cells([70, 511]);
        assert_eq!((a & b).to_vec(), vec![70]);
        assert_eq!((a | b).count(), 4);
        assert_eq!(CellMask::first(65).count(), 65);
        assert_eq!((!a & CellMask::first(100)).count(), 98);
        assert_eq!(a.andnot(&b).to_vec(), vec![1, 300]);
    }
}
