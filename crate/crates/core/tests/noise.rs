use specunet_core::classical::Spectrum;
use specunet_core::rng;
use specunet_core::synth::add_noise;

#[test]
fn noise_has_the_requested_spread() {
    let n = 1_000_000;
    let s = Spectrum::new((0..n).map(|i| i as f64).collect(), vec![0.5; n]).unwrap();
    for sigma in [0.02, 0.1] {
        let noisy = add_noise(&s, sigma, &mut rng::seeded(17)).unwrap();
        let d: Vec<f64> = noisy.values().iter().map(|v| v - 0.5).collect();
        let mean = d.iter().sum::<f64>() / n as f64;
        let sd = (d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        assert!((sd / sigma - 1.0).abs() < 0.01, "sigma {sigma}: sample sd {sd}");
        assert!(mean.abs() < 5.0 * sigma / (n as f64).sqrt());
    }
}

#[test]
fn out_of_range_sigma_is_rejected() {
    let s = Spectrum::new(vec![1.0, 2.0], vec![0.5, 0.5]).unwrap();
    assert!(add_noise(&s, 0.2, &mut rng::seeded(1)).is_err());
    assert!(add_noise(&s, -0.01, &mut rng::seeded(1)).is_err());
}
