//! Websocket front end for a running simulation. One task owns the
//! simulation; connections enqueue commands and receive snapshots.

pub mod protocol;
mod server;
mod session;

pub use protocol::{parse_command, Command, CommandError, EntityView, ServerMessage};
pub use server::{ServeConfig, ServeError, Server, DEFAULT_TICK_RATE};
pub use session::{Applied, Session, MAX_STEPS};
