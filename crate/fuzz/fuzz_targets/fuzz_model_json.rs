#![no_main]
use libfuzzer_sys::fuzz_target;

// The model JSON schema is the crate's untrusted-input surface: parsing,
// construction, validation and pointwise evaluation must never panic,
// whatever the bytes say.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(model) = bifront::ModelSpec::from_json_str(text) else { return };
    let _ = model.validate();
    let _ = model.digest();
    for &v in &[0.0, 1e-9, 0.25, 0.5, 0.999, 1.0] {
        let _ = model.evaluate(v);
        let _ = model.evaluate_s(v);
        if v > 0.0 {
            let _ = model.evaluate_s_prime(v);
        }
    }
});
