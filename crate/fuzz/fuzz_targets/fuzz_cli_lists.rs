#![no_main]
use libfuzzer_sys::fuzz_target;

// CLI list arguments (ε lists and z windows) parse arbitrary user text.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = bifront::cli::parse_eps_list(text);
    let _ = bifront::cli::parse_z_window(text);
});
