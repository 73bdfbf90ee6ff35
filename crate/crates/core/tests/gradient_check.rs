//! Full-model gradient checks against central finite differences across the
//! supported (qubits, layers) grid. The heavier 20-draw sweep lives in the
//! CLI crate's acceptance suite; this one guards the library directly.

use qforest_core::hqnn::HqnnModel;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn gradient_check(num_qubits: usize, layers: usize, draws: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let in_dim = 5;
    let h = 1e-5;
    for draw in 0..draws {
        let model = HqnnModel::init(in_dim, num_qubits, layers, &mut rng).unwrap();
        let features: Vec<f64> = (0..in_dim).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let label = u8::from(rng.gen_bool(0.5));
        let (_, grad) = model.backward(&features, label).unwrap();
        let analytic = grad.flat();
        let params = model.params_flat();
        for i in 0..params.len() {
            let mut shifted = params.clone();
            shifted[i] += h;
            let mut hi = model.clone();
            hi.set_params_flat(&shifted).unwrap();
            shifted[i] -= 2.0 * h;
            let mut lo = model.clone();
            lo.set_params_flat(&shifted).unwrap();
            let fd = (hi.backward(&features, label).unwrap().0
                - lo.backward(&features, label).unwrap().0)
                / (2.0 * h);
            let denom = analytic[i].abs().max(fd.abs()).max(1.0);
            assert!(
                (analytic[i] - fd).abs() / denom < 1e-5,
                "nq={num_qubits} L={layers} draw={draw} param={i}: analytic {} vs fd {fd}",
                analytic[i]
            );
        }
    }
}

#[test]
fn gradcheck_two_qubits() {
    for layers in 1..=4 {
        gradient_check(2, layers, 2, 1000 + layers as u64);
    }
}

#[test]
fn gradcheck_three_qubits() {
    for layers in 1..=4 {
        gradient_check(3, layers, 2, 2000 + layers as u64);
    }
}

#[test]
fn gradcheck_four_qubits() {
    for layers in 1..=4 {
        gradient_check(4, layers, 2, 3000 + layers as u64);
    }
}
