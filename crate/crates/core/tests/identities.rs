use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weyl_core::spaces::{detection_spaces, morera_residual, SamplingSpec};
use weyl_core::synth::{direct_sum_hidden, random_triple};
use weyl_core::Extension;
use weyl_numerics::{c64, eig_dense, principal_angles, CMatrix, CVector, Complex64, ContourSpec};

fn rand_mat(rng: &mut ChaCha8Rng, r: usize, c: usize) -> CMatrix {
    CMatrix::from_fn(r, c, |_, _| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn away_from(rng: &mut ChaCha8Rng, spectra: &[Vec<Complex64>]) -> Complex64 {
    loop {
        let z = c64(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        if spectra.iter().flatten().all(|s| (s - z).norm() > 0.25) {
            return z;
        }
    }
}

#[test]
fn adjoint_extension_matches_adjoint_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (m, h, k) in [(8, 2, 3), (16, 3, 1)] {
        let tr = Arc::new(random_triple(&mut rng, m, h, k).unwrap());
        let ext = Extension::new(tr, rand_mat(&mut rng, h, k)).unwrap();
        let a = ext.matrix_form().unwrap();
        let at = ext.adjoint().matrix_form().unwrap();
        assert!((a.adjoint() - at).norm() < 1e-9 * a.norm());
    }
}

#[test]
fn krein_and_hilbert_on_sixteen_dimensions() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let tr = Arc::new(random_triple(&mut rng, 16, 2, 2).unwrap());
    for _ in 0..10 {
        let eb = Extension::new(tr.clone(), rand_mat(&mut rng, 2, 2)).unwrap();
        let ec = eb.with_b(rand_mat(&mut rng, 2, 2)).unwrap();
        let spectra = [eb.spectrum().unwrap(), ec.spectrum().unwrap()];
        let l = away_from(&mut rng, &spectra);
        let l0 = away_from(&mut rng, &spectra);
        let f = CVector::from_fn(2, |_, _| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        assert!(eb.krein_residual(&ec, l).unwrap() < 1e-9);
        assert!(eb.hilbert_identity_residual(l, l0, &f).unwrap() < 1e-9);
    }
}

#[test]
fn hidden_eigenvalue_is_seen_only_by_the_full_resolvent() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let base = random_triple(&mut rng, 8, 2, 2).unwrap();
    let hidden_value = c64(2.75, -0.5);
    let tr = Arc::new(direct_sum_hidden(&base, &CMatrix::from_element(1, 1, hidden_value)).unwrap());
    let ext = Extension::new(tr, rand_mat(&mut rng, 2, 2)).unwrap();
    let spaces = detection_spaces(&ext, &SamplingSpec::default_for(&ext).unwrap()).unwrap();

    let spectrum = ext.spectrum().unwrap();
    let gap = spectrum
        .iter()
        .map(|s| (s - hidden_value).norm())
        .filter(|&d| d > 1e-8)
        .fold(f64::INFINITY, f64::min);
    let contour = ContourSpec::new(hidden_value, 0.45 * gap, 128).unwrap();
    let out = morera_residual(&ext, &contour, &spaces.s_adjoint.basis, &spaces.s.basis).unwrap();

    // Oracle: the Riesz projection v w*/(w* v) from right and left
    // eigenvectors.
    let a = ext.matrix_form().unwrap();
    let right = eig_dense(&a).unwrap();
    let left = eig_dense(&a.adjoint()).unwrap();
    let v = &right.iter().min_by(|p, q| (p.value - hidden_value).norm().total_cmp(&(q.value - hidden_value).norm())).unwrap().vector;
    let w = &left
        .iter()
        .min_by(|p, q| (p.value - hidden_value.conj()).norm().total_cmp(&(q.value - hidden_value.conj()).norm()))
        .unwrap()
        .vector;
    let p = (v * w.adjoint()) / w.dotc(v);
    let expected = 2.0 * PI * weyl_numerics::spectral_norm(&p);
    assert!((out.full - expected).abs() < 1e-8 * expected);
    assert!(out.full > 0.1);
    assert!(out.bordered < 1e-8);

    let angles = principal_angles(&spaces.s.basis, &spaces.t.basis).unwrap();
    assert!(angles.iter().all(|&x| x < 1e-8));
}
