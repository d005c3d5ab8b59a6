#![no_main]

use libfuzzer_sys::fuzz_target;
use maslov_core::geometry::chart::{ChartSpec, LagrangianChart};
use maslov_core::Tolerances;

fuzz_target!(|data: &[u8]| {
    let Ok(spec) = serde_json::from_slice::<ChartSpec>(data) else {
        return;
    };
    let Ok(chart) = LagrangianChart::new(spec) else {
        return;
    };
    let tol = Tolerances::default();
    for u0 in [0.0, 0.5, -1.25] {
        let u = vec![u0; chart.n()];
        let x = chart.eval(&u).unwrap();
        assert_eq!(x.len(), 2 * chart.n());
        let j = chart.jacobian(&u).unwrap();
        assert_eq!((j.nrows(), j.ncols()), (2 * chart.n(), chart.n()));
        let _ = chart.lagrangian_residual(&u);
        let _ = chart.immersed_jacobian(&u, &tol);
    }
});
