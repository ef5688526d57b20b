//! Acceptance checks for the `fdmap` workspace live in `tests/acceptance.rs`.
