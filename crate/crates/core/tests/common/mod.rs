//! Reference implementations used as test oracles. They work on plain
//! arrays and share no code with the engine.
#![allow(dead_code)]

use ldx_core::dsl::ast::Player;
use ldx_core::GameState;

pub mod ttt {
    pub const LINES: [[usize; 3]; 8] =
        [[0, 1, 2], [3, 4, 5], [6, 7, 8], [0, 3, 6], [1, 4, 7], [2, 5, 8], [0, 4, 8], [2, 4, 6]];

    pub fn winner(b: &[u8; 9]) -> u8 {
        for l in LINES {
            if b[l[0]] != 0 && b[l[0]] == b[l[1]] && b[l[1]] == b[l[2]] {
                return b[l[0]];
            }
        }
        0
    }

    /// Every complete game from `b`: (p1 wins, p2 wins, draws) added to `acc`.
    pub fn count_games(b: &mut [u8; 9], mover: u8, acc: &mut [u64; 3]) {
        for c in 0..9 {
            if b[c] != 0 {
                continue;
            }
            b[c] = mover;
            let w = winner(b);
            if w != 0 {
                acc[w as usize - 1] += 1;
            } else if b.iter().all(|&x| x != 0) {
                acc[2] += 1;
            } else {
                count_games(b, 3 - mover, acc);
            }
            b[c] = 0;
        }
    }

    /// Exact outcome probabilities under uniform random play: [p1, p2, draw].
    pub fn random_play(b: &mut [u8; 9], mover: u8) -> [f64; 3] {
        let empty: Vec<usize> = (0..9).filter(|&c| b[c] == 0).collect();
        let mut out = [0.0; 3];
        for &c in &empty {
            b[c] = mover;
            let w = winner(b);
            let sub = if w != 0 {
                let mut r = [0.0; 3];
                r[w as usize - 1] = 1.0;
                r
            } else if b.iter().all(|&x| x != 0) {
                [0.0, 0.0, 1.0]
            } else {
                random_play(b, 3 - mover)
            };
            for k in 0..3 {
                out[k] += sub[k] / empty.len() as f64;
            }
            b[c] = 0;
        }
        out
    }

    /// Negamax value for the side to move.
    pub fn negamax(b: &mut [u8; 9], me: u8) -> i32 {
        let mut best = i32::MIN;
        let mut any = false;
        for c in 0..9 {
            if b[c] != 0 {
                continue;
            }
            any = true;
            b[c] = me;
            let won = LINES.iter().any(|l| l.iter().all(|&x| b[x] == me));
            let v = if won { 1 } else { -negamax(b, 3 - me) };
            b[c] = 0;
            best = best.max(v);
        }
        if any {
            best
        } else {
            0
        }
    }

    pub fn optimal_moves(b: &[u8; 9], me: u8) -> Vec<u32> {
        let mut b = *b;
        let mut vals = Vec::new();
        for c in 0..9 {
            if b[c] != 0 {
                continue;
            }
            b[c] = me;
            let won = LINES.iter().any(|l| l.iter().all(|&x| b[x] == me));
            vals.push((c as u32, if won { 1 } else { -negamax(&mut b, 3 - me) }));
            b[c] = 0;
        }
        let best = vals.iter().map(|v| v.1).max().unwrap();
        vals.into_iter().filter(|v| v.1 == best).map(|v| v.0).collect()
    }
}

pub mod reversi {
    const DIRS: [(i32, i32); 8] = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)];

    /// Discs flipped by `me` (1 or 2) playing on `cell`.
    pub fn flips(b: &[u8; 64], cell: usize, me: u8) -> Vec<usize> {
        if b[cell] != 0 {
            return vec![];
        }
        let (r, c) = ((cell / 8) as i32, (cell % 8) as i32);
        let mut out = Vec::new();
        for (dr, dc) in DIRS {
            let mut run = Vec::new();
            let (mut rr, mut cc) = (r + dr, c + dc);
            while (0..8).contains(&rr) && (0..8).contains(&cc) {
                let v = b[(rr * 8 + cc) as usize];
                if v == 3 - me {
                    run.push((rr * 8 + cc) as usize);
                } else {
                    if v == me && !run.is_empty() {
                        out.extend(&run);
                    }
                    break;
                }
                rr += dr;
                cc += dc;
            }
        }
        out
    }

    pub fn moves(b: &[u8; 64], me: u8) -> Vec<usize> {
        (0..64).filter(|&c| !flips(b, c, me).is_empty()).collect()
    }
}

/// Board as an array of owners: 0 empty, 1 P1, 2 P2.
pub fn owners<const N: usize>(st: &GameState) -> [u8; N] {
    let mut b = [0u8; N];
    for (i, v) in b.iter_mut().enumerate() {
        *v = st.piece_at(i).map_or(0, |(_, p)| p.index() as u8 + 1);
    }
    b
}

pub mod draughts {
    use super::*;

    pub const PAWN: usize = 0;
    pub const KING: usize = 1;

    pub fn mv(source: usize, dest: usize) -> u32 {
        (source * 64 + dest) as u32
    }

    /// English draughts move generation: `(captures, steps)` as encoded
    /// actions, honoring a forced source square.
    pub fn moves(st: &GameState) -> (Vec<u32>, Vec<u32>) {
        let me = st.mover;
        let forward = if me == Player::P1 { -1 } else { 1 };
        let (mut caps, mut steps) = (Vec::new(), Vec::new());
        for cell in 0..64usize {
            let Some((piece, owner)) = st.piece_at(cell) else { continue };
            if owner != me {
                continue;
            }
            if let Some(m) = st.must_move.filter(|&m| m != u16::MAX) {
                if m as usize != cell {
                    continue;
                }
            }
            let (r, c) = ((cell / 8) as i32, (cell % 8) as i32);
            let drs: &[i32] = if piece == KING { &[-1, 1] } else if forward < 0 { &[-1] } else { &[1] };
            for &dr in drs {
                for dc in [-1, 1] {
                    let (r1, c1) = (r + dr, c + dc);
                    if !(0..8).contains(&r1) || !(0..8).contains(&c1) {
                        continue;
                    }
                    let n1 = (r1 * 8 + c1) as usize;
                    match st.piece_at(n1) {
                        None => steps.push(mv(cell, n1)),
                        Some((_, o)) if o != me => {
                            let (r2, c2) = (r1 + dr, c1 + dc);
                            if (0..8).contains(&r2)
                                && (0..8).contains(&c2)
                                && st.piece_at((r2 * 8 + c2) as usize).is_none()
                            {
                                caps.push(mv(cell, (r2 * 8 + c2) as usize));
                            }
                        }
                        _ => {}
                    }
                }
            }
        }
        caps.sort_unstable();
        steps.sort_unstable();
        (caps, steps)
    }
}

pub mod hex {
    use super::*;

    const N: i32 = 11;
    const NEIGHBORS: [(i32, i32); 6] = [(-1, 0), (1, 0), (0, -1), (0, 1), (-1, 1), (1, -1)];

    /// Flood fill from one side; P1 joins top to bottom, P2 left to right.
    pub fn connects(st: &GameState, p: Player) -> bool {
        let mine = |r: i32, c: i32| st.piece_at((r * N + c) as usize).is_some_and(|(_, o)| o == p);
        let mut seen = vec![false; (N * N) as usize];
        let mut stack: Vec<(i32, i32)> = (0..N)
            .map(|k| if p == Player::P1 { (0, k) } else { (k, 0) })
            .filter(|&(r, c)| mine(r, c))
            .collect();
        while let Some((r, c)) = stack.pop() {
            if std::mem::replace(&mut seen[(r * N + c) as usize], true) {
                continue;
            }
            if (p == Player::P1 && r == N - 1) || (p == Player::P2 && c == N - 1) {
                return true;
            }
            for (dr, dc) in NEIGHBORS {
                let (rr, cc) = (r + dr, c + dc);
                if (0..N).contains(&rr) && (0..N).contains(&cc) && mine(rr, cc) {
                    stack.push((rr, cc));
                }
            }
        }
        false
    }
}
