//! Trace file format: line-delimited JSON.
//!
//! Line 1 is the header, then one line per event, then a footer
//! `{"events": N}` that doubles as a truncation check. Writing the same
//! trace twice produces byte-identical documents.

use crate::engine::trace::{SimTrace, TraceEvent, TraceHeader, TRACE_VERSION};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("trace version {found} unsupported (expected {TRACE_VERSION})")]
    VersionMismatch { found: u32 },
    #[error("corrupt trace at line {line}: {reason}")]
    CorruptTrace { line: usize, reason: String },
}

#[derive(serde::Serialize, serde::Deserialize)]
struct Footer {
    events: usize,
}

/// Serializes a trace to its line-delimited document.
pub fn write_trace(trace: &SimTrace) -> String {
    let mut out = String::new();
    out.push_str(&serde_json::to_string(&trace.header).expect("header serializes"));
    out.push('\n');
    for event in &trace.events {
        out.push_str(&serde_json::to_string(event).expect("event serializes"));
        out.push('\n');
    }
    out.push_str(
        &serde_json::to_string(&Footer { events: trace.events.len() }).expect("footer"),
    );
    out.push('\n');
    out
}

/// Parses a trace document; the footer must be present and agree with the
/// event count.
pub fn read_trace(document: &str) -> Result<SimTrace, TraceError> {
    let mut lines = document.lines().enumerate();
    let (_, header_line) = lines.next().ok_or(TraceError::CorruptTrace {
        line: 1,
        reason: "empty document".into(),
    })?;
    let header: TraceHeader =
        serde_json::from_str(header_line).map_err(|e| TraceError::CorruptTrace {
            line: 1,
            reason: e.to_string(),
        })?;
    if header.version != TRACE_VERSION {
        return Err(TraceError::VersionMismatch { found: header.version });
    }

    let mut events: Vec<TraceEvent> = Vec::new();
    let mut footer: Option<Footer> = None;
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        if footer.is_some() {
            return Err(TraceError::CorruptTrace {
                line: idx + 1,
                reason: "content after footer".into(),
            });
        }
        if let Ok(f) = serde_json::from_str::<Footer>(line) {
            footer = Some(f);
            continue;
        }
        let event: TraceEvent =
            serde_json::from_str(line).map_err(|e| TraceError::CorruptTrace {
                line: idx + 1,
                reason: e.to_string(),
            })?;
        events.push(event);
    }
    let footer = footer.ok_or(TraceError::CorruptTrace {
        line: document.lines().count(),
        reason: "missing footer (truncated file?)".into(),
    })?;
    if footer.events != events.len() {
        return Err(TraceError::CorruptTrace {
            line: document.lines().count(),
            reason: format!(
                "footer declares {} events, found {}",
                footer.events,
                events.len()
            ),
        });
    }
    Ok(SimTrace { header, events })
}
