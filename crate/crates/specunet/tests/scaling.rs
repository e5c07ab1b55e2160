use std::time::Instant;

use specunet::bench::{log_log_fit, median};
use specunet::processing::classical_cube;
use specunet::synth_cube::synthetic_cube;
use specunet_core::classical::{ClassicalPipeline, PipelineConfig};
use specunet_core::synth::gen_synthetic_library;

#[test]
fn fit_recovers_power_laws() {
    let pts: Vec<(f64, f64)> = [10.0, 100.0, 1000.0].iter().map(|&x: &f64| (x, 3.0 * x.powf(1.5))).collect();
    let (slope, r2) = log_log_fit(&pts);
    assert!((slope - 1.5).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
}

#[test]
fn classical_time_is_linear_in_pixels() {
    let lib = gen_synthetic_library(5, 240, 2).unwrap();
    let pipeline = ClassicalPipeline::new(PipelineConfig::default()).unwrap();
    let mut pts = Vec::new();
    for rows in [4, 16, 64] {
        let cube = synthetic_cube(&lib, rows, 16, 0.02, 2).unwrap();
        let mut times: Vec<f64> = (0..3)
            .map(|_| {
                let t = Instant::now();
                classical_cube(&cube, &pipeline, 1).unwrap();
                t.elapsed().as_secs_f64()
            })
            .collect();
        pts.push(((rows * 16) as f64, median(&mut times)));
    }
    let (slope, _) = log_log_fit(&pts);
    assert!((0.7..1.3).contains(&slope), "slope {slope} from {pts:?}");
}
