#![no_main]

use libfuzzer_sys::fuzz_target;
use maslov_core::geometry::ParamPath;

fuzz_target!(|data: &[u8]| {
    let Ok(path) = serde_json::from_slice::<ParamPath>(data) else {
        return;
    };
    if path.validate().is_err() || path.samples > 4096 {
        return;
    }
    let times = path.times();
    assert!(times.windows(2).all(|w| w[0] <= w[1]));
    for t in times {
        assert_eq!(path.eval(t).len(), path.n());
    }
    let back = path.reversed().reversed();
    assert_eq!(back.knots, path.knots);
});
