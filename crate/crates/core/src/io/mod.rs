//! File formats and the simulator wire protocol: scenario documents, trace
//! serialization, and the newline-delimited socket protocol plus its
//! in-process test client.

pub mod protocol;
pub mod scenario;
pub mod trace_io;
