//! Networking front door for the motion engine: an OSC 1.0 wire codec and
//! a UDP streaming loop that feeds ring-mode tracks and emits computed
//! features in real time.

pub mod stream;
pub mod wire;

pub use stream::{
    frame_message, ingest_frame, parse_frame, stats_message, FeatureSample, StreamConfig,
    StreamEngine, StreamError, StreamProcessor, StreamStats, StreamTimeModel, FRAME_ADDRESS,
    OUT_PREFIX, STATS_ADDRESS,
};
pub use wire::{decode, encode, OscArg, OscMessage, WireError};
