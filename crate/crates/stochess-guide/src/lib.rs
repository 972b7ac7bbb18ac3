//! Placeholder; chapters are attached as doc-tested modules later.
