//! Placeholder.

/// Temporary entry point; replaced by the real dispatcher.
pub fn main_entry() -> i32 {
    0
}
