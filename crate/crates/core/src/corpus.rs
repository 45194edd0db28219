//! Bundled example games.

use crate::compiler::{compile_str, CompileError, CompiledGame};

pub const GAMES: &[(&str, &str)] = &[
    ("tic_tac_toe", include_str!("../../../games/tic_tac_toe.ldx")),
    ("connect_four", include_str!("../../../games/connect_four.ldx")),
    ("hex", include_str!("../../../games/hex.ldx")),
    ("reversi", include_str!("../../../games/reversi.ldx")),
    ("gomoku", include_str!("../../../games/gomoku.ldx")),
    ("pente", include_str!("../../../games/pente.ldx")),
    ("yavalath", include_str!("../../../games/yavalath.ldx")),
    ("dai_hasami_shogi", include_str!("../../../games/dai_hasami_shogi.ldx")),
    ("wolf_and_sheep", include_str!("../../../games/wolf_and_sheep.ldx")),
    ("english_draughts", include_str!("../../../games/english_draughts.ldx")),
    ("gridworld", include_str!("../../../games/gridworld.ldx")),
];

/// The two-player board games (everything except the gridworld).
pub const BOARD_GAMES: &[&str] = &[
    "tic_tac_toe",
    "connect_four",
    "hex",
    "reversi",
    "gomoku",
    "pente",
    "yavalath",
    "dai_hasami_shogi",
    "wolf_and_sheep",
    "english_draughts",
];

/// Source text by corpus name; also accepts names with spaces or hyphens
/// and a few short aliases.
pub fn source(name: &str) -> Option<&'static str> {
    let key = name.trim().to_ascii_lowercase().replace([' ', '-'], "_");
    let key = match key.as_str() {
        "ttt" | "tictactoe" => "tic_tac_toe",
        "connect4" | "connectfour" => "connect_four",
        "othello" => "reversi",
        "draughts" | "checkers" => "english_draughts",
        "wolf_sheep" => "wolf_and_sheep",
        other => other,
    }
    .to_string();
    GAMES.iter().find(|(n, _)| *n == key).map(|(_, s)| *s)
}

pub fn load(name: &str) -> Result<CompiledGame, CompileError> {
    let text = source(name).ok_or_else(|| CompileError::Invalid(format!("no bundled game named \"{name}\"")))?;
    compile_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_game_compiles() {
        for (name, text) in GAMES {
            if let Err(e) = compile_str(text) {
                panic!("{name}: {e}");
            }
        }
    }

    #[test]
    fn aliases() {
        assert!(source("Tic-Tac-Toe").is_some());
        assert!(source("draughts").is_some());
        assert!(source("chess").is_none());
    }
}
