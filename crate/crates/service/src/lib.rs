//! Play server: one [`Session`] per human-vs-agent game, exposed over a
//! JSON WebSocket and a few HTTP endpoints.

pub mod protocol;
pub mod server;
pub mod session;

pub use protocol::{ClientMessage, CreateRequest, Envelope, ErrorCode, MazeRef, Phase, ServerMessage, SessionSnapshot};
pub use server::{load_fixtures, router, serve, ServiceConfig};
pub use session::{ClientView, Session, SessionError, SessionSetup};
