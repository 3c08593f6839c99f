//! Helpers for the acceptance suite, which lives in `tests/acceptance.rs`.
//!
//! The suite drives the `viscwave` binary from the `viscwave-cli` package.
//! Cargo builds it alongside the workspace tests, next to the test
//! executables' `deps` directory.

use std::path::PathBuf;

/// Path of the `viscwave` binary in the same target directory as the
/// running executable.
pub fn viscwave_bin() -> PathBuf {
    let name = format!("viscwave{}", std::env::consts::EXE_SUFFIX);
    let exe = std::env::current_exe().expect("current executable path");
    exe.ancestors()
        .skip(1)
        .take(3)
        .map(|dir| dir.join(&name))
        .find(|p| p.is_file())
        .unwrap_or_else(|| {
            panic!(
                "viscwave binary not found near {}; build it with `cargo build -p viscwave-cli` or run the whole workspace",
                exe.display()
            )
        })
}
