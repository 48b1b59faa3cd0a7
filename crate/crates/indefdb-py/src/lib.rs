//! Python bindings (placeholder while the core library is built).
