use num_complex::Complex64;
use qlue_core::qcircuit::{
    distance_oracle, grover_statevector, membership_oracle, DistanceLayout, QuantumState, Register,
    SparseState, StateVector,
};

/// `sin^2((2r+1) asin(sqrt(k/m)))`, the closed-form success probability.
fn success_probability(m: usize, k: usize, r: usize) -> f64 {
    let theta = (k as f64 / m as f64).sqrt().asin();
    ((2 * r + 1) as f64 * theta).sin().powi(2)
}

#[test]
fn amplitude_matches_closed_form() {
    for m in (2..=256).step_by(2) {
        for k in 0..=m {
            let marked: Vec<u64> = (0..k as u64).collect();
            for r in 0..=10 {
                let probs = grover_statevector(m, &marked, r).unwrap();
                let p: f64 = probs[..k].iter().sum();
                let expected = success_probability(m, k, r);
                assert!(
                    (p - expected).abs() < 1e-9,
                    "m={m} k={k} r={r}: {p} vs {expected}"
                );
                let total: f64 = probs.iter().sum();
                assert!((total - 1.0).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn eight_items_one_marked_two_rounds() {
    let p = grover_statevector(8, &[3], 2).unwrap()[3];
    assert!((p - 0.9453).abs() < 1e-4, "{p}");
    // 121/128 exactly
    assert!((p - 121.0 / 128.0).abs() < 1e-12);
}

#[test]
fn marked_position_is_irrelevant() {
    let a = grover_statevector(20, &[0, 1], 3).unwrap();
    let b = grover_statevector(20, &[19, 7], 3).unwrap();
    assert!((a[0] + a[1] - b[19] - b[7]).abs() < 1e-12);
}

fn ancillas_clear(layout: &DistanceLayout, basis: u64) -> bool {
    layout.ancillas().iter().all(|r| r.raw(basis) == 0)
}

#[test]
fn distance_oracle_flips_exactly_the_close_pairs() {
    let layout = DistanceLayout::new(3).unwrap();
    let mut inputs = Vec::new();
    let mut pairs = Vec::new();
    for x1i in 0..8u64 {
        for x2i in 0..8u64 {
            for x1j in 0..8u64 {
                for x2j in 0..8u64 {
                    inputs.push(layout.encode((x1i, x2i), (x1j, x2j)).unwrap());
                    let (dx, dy) = (x1i as i64 - x1j as i64, x2i as i64 - x2j as i64);
                    pairs.push((dx * dx + dy * dy) as u64);
                }
            }
        }
    }
    let start = SparseState::uniform(layout.n_qubits(), &inputs).unwrap();
    let w = start.amplitude(inputs[0]);
    for d_c_sq in 0..=128u64 {
        let mut s = start.clone();
        distance_oracle(&mut s, &layout, d_c_sq).unwrap();
        let support = s.support();
        let leaked: f64 = support
            .iter()
            .filter(|(b, _)| !ancillas_clear(&layout, *b))
            .map(|(_, a)| a.norm())
            .fold(0.0, f64::max);
        assert!(leaked < 1e-12, "ancilla leakage {leaked} at d_c^2={d_c_sq}");
        assert_eq!(support.len(), inputs.len());
        for (&b, &sq) in inputs.iter().zip(&pairs) {
            let expected = if sq < d_c_sq { -w } else { w };
            assert!(
                (s.amplitude(b) - expected).norm() < 1e-12,
                "d^2={sq} d_c^2={d_c_sq}"
            );
        }
    }
}

#[test]
fn distance_oracle_rejects_overflowing_threshold() {
    let layout = DistanceLayout::new(3).unwrap();
    let mut s = SparseState::basis(layout.n_qubits(), 0).unwrap();
    assert!(distance_oracle(&mut s, &layout, 129).is_err());
}

#[test]
fn membership_oracle_flips_exactly_the_members() {
    // index register on qubits 1..5, spectators on 0 and 5
    let reg = Register::unsigned(1, 4);
    let n = 6;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    let w = 1.0 / ((1 << n) as f64).sqrt();
    amps.fill(Complex64::new(w, 0.0));
    let start = StateVector::from_amplitudes(amps).unwrap();
    for subset in 0u32..1 << 16 {
        let members: Vec<u64> = (0..16).filter(|&v| subset >> v & 1 == 1).collect();
        let mut s = start.clone();
        membership_oracle(&mut s, reg, &members).unwrap();
        for b in 0..1u64 << n {
            let inside = subset >> reg.raw(b) & 1 == 1;
            let expected = if inside { -w } else { w };
            assert!(
                (s.amplitude(b).re - expected).abs() < 1e-12,
                "subset {subset:#x} basis {b}"
            );
        }
    }
}

#[test]
fn membership_oracle_rejects_wide_members() {
    let mut s = StateVector::new(4).unwrap();
    assert!(membership_oracle(&mut s, Register::unsigned(0, 4), &[16]).is_err());
}
