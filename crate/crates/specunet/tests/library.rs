use specunet::library_io::{load_library, save_library};
use specunet::spectrum_csv::write_spectrum;
use specunet_core::classical::{linspace, Spectrum};
use specunet_core::synth::gen_synthetic_library;

fn spectrum(n: usize, lo: f64, level: f64) -> Spectrum {
    let wl = linspace(lo, 2.6, n);
    let v = wl.iter().map(|w| level - 0.1 * (w - 1.8).powi(2)).collect();
    Spectrum::new(wl, v).unwrap()
}

#[test]
fn two_files_without_manifest_load_sorted() {
    let dir = tempfile::tempdir().unwrap();
    write_spectrum(&spectrum(20, 1.0, 0.5), &dir.path().join("olivine.csv")).unwrap();
    write_spectrum(&spectrum(20, 1.0, 0.7), &dir.path().join("kaolinite.csv")).unwrap();
    let lib = load_library(dir.path()).unwrap();
    assert_eq!(lib.names(), ["kaolinite", "olivine"]);
    assert_eq!(lib.bands(), 20);
}

#[test]
fn mismatched_grids_name_both_files() {
    let dir = tempfile::tempdir().unwrap();
    write_spectrum(&spectrum(20, 1.0, 0.5), &dir.path().join("a.csv")).unwrap();
    write_spectrum(&spectrum(20, 1.1, 0.5), &dir.path().join("b.csv")).unwrap();
    let err = load_library(dir.path()).unwrap_err().to_string();
    assert!(err.contains("a.csv") && err.contains("b.csv"), "{err}");
}

#[test]
fn empty_directory_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert!(load_library(dir.path()).is_err());
}

#[test]
fn full_library_round_trips_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let lib = gen_synthetic_library(28, 240, 5).unwrap();
    save_library(&lib, dir.path()).unwrap();
    let back = load_library(dir.path()).unwrap();
    assert_eq!(back.names(), lib.names());
    for (a, b) in back.spectra().iter().zip(lib.spectra()) {
        assert_eq!(a.wavelengths(), b.wavelengths());
        for (x, y) in a.values().iter().zip(b.values()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }
}
