//! Command-line tools and the HTTP/WebSocket play server for ldx games.

pub mod commands;
pub mod server;
pub mod session;
