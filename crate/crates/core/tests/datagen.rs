use qlue_core::datagen::{
    gaussian_pdf, gen_circles, gen_lattice, gen_moons, gen_noisy_gaussian, gen_two_gaussians,
    DatasetSpec, DEFAULT_AMPLITUDE,
};
use qlue_core::EnergyProfile;

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    (
        m,
        xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0),
    )
}

#[test]
fn gaussian_cluster_moments() {
    let sigma = 32.0;
    let n = 100_000;
    let ds = gen_noisy_gaussian(n, 0, sigma, 3).unwrap();
    let nf = n as f64;
    let cols: Vec<Vec<f64>> = (0..2)
        .map(|a| (0..n).map(|i| ds.coords(i)[a]).collect())
        .collect();
    for xs in &cols {
        let (m, v) = mean_var(xs);
        assert!(m.abs() < 3.0 * (sigma / nf).sqrt(), "mean {m}");
        assert!(
            (v - sigma).abs() < 3.0 * sigma * (2.0 / (nf - 1.0)).sqrt(),
            "variance {v}"
        );
    }
    let cov: f64 = cols[0]
        .iter()
        .zip(&cols[1])
        .map(|(x, y)| x * y)
        .sum::<f64>()
        / (nf - 1.0);
    assert!(cov.abs() < 3.0 * sigma / nf.sqrt(), "covariance {cov}");
}

#[test]
fn gaussian_energy_is_scaled_pdf() {
    let ds = gen_noisy_gaussian(200, 0, 10.0, 1).unwrap();
    for (i, p) in ds.points().iter().enumerate() {
        // energies come from the unquantized position, so allow a hair
        let e = DEFAULT_AMPLITUDE * gaussian_pdf(&ds.coords(i), &[0.0, 0.0], 10.0);
        assert!(
            (p.energy - e).abs() < 1e-3 * e.max(1e-6),
            "{} vs {e}",
            p.energy
        );
    }
}

#[test]
fn noise_is_uniform_in_the_square() {
    let ds = gen_noisy_gaussian(10, 5000, 10.0, 2).unwrap();
    let truth = ds.truth().unwrap();
    let mut quadrants = [0usize; 4];
    for (i, &label) in truth.iter().enumerate() {
        if label != -1 {
            continue;
        }
        let c = ds.coords(i);
        assert!(c.iter().all(|x| (-250.0..=250.0).contains(x)));
        let e = ds.points()[i].energy;
        assert!((0.0..1.0).contains(&e));
        quadrants[(c[0] > 0.0) as usize * 2 + (c[1] > 0.0) as usize] += 1;
    }
    assert_eq!(quadrants.iter().sum::<usize>(), 5000);
    for q in quadrants {
        assert!((1100..1400).contains(&q), "{quadrants:?}");
    }
}

#[test]
fn two_gaussians_are_centered_r_apart() {
    let ds = gen_two_gaussians(4000, 2000, 30.0, 90.0, 4).unwrap();
    let truth = ds.truth().unwrap();
    for (label, center, count) in [(0, 45.0, 4000), (1, -45.0, 2000)] {
        let xs: Vec<f64> = (0..ds.len())
            .filter(|&i| truth[i] == label)
            .map(|i| ds.coords(i)[0])
            .collect();
        assert_eq!(xs.len(), count);
        let (m, _) = mean_var(&xs);
        assert!((m - center).abs() < 0.5, "{m}");
    }
}

#[test]
fn shapes_have_balanced_labels_and_profiles() {
    for ds in [
        gen_moons(500, EnergyProfile::Uniform, 1).unwrap(),
        gen_circles(500, EnergyProfile::Uniform, 1).unwrap(),
    ] {
        let truth = ds.truth().unwrap();
        assert_eq!(ds.len(), 1000);
        assert_eq!(truth.iter().filter(|&&l| l == 0).count(), 500);
        let e0 = ds.points()[0].energy;
        assert!(ds.points().iter().all(|p| p.energy == e0));
    }
    let moons = gen_moons(500, EnergyProfile::Gradient, 1).unwrap();
    let truth = moons.truth().unwrap();
    for (i, p) in moons.points().iter().enumerate() {
        let y = moons.coords(i)[1];
        let expected = if truth[i] == 0 {
            y.max(0.0)
        } else {
            (60.0 - y).max(0.0)
        };
        assert!((p.energy - expected).abs() < 1e-3);
    }
    let circles = gen_circles(500, EnergyProfile::Gradient, 1).unwrap();
    let truth = circles.truth().unwrap();
    let radius = |i: usize| circles.coords(i).iter().map(|x| x * x).sum::<f64>().sqrt();
    let outer: f64 = (0..500).map(radius).sum::<f64>() / 500.0;
    let inner: f64 = (500..1000).map(radius).sum::<f64>() / 500.0;
    assert!(
        (outer - 100.0).abs() < 2.0 && (inner - 50.0).abs() < 2.0,
        "{outer} {inner}"
    );
    assert!(truth[..500].iter().all(|&l| l == 0));
}

#[test]
fn lattice_is_the_integer_grid() {
    let ds = gen_lattice(3, 3).unwrap();
    assert_eq!(ds.len(), 27);
    let mut seen: Vec<Vec<f64>> = (0..27).map(|i| ds.coords(i)).collect();
    seen.sort_by(|a, b| a.partial_cmp(b).unwrap());
    seen.dedup();
    assert_eq!(seen.len(), 27);
    assert!(seen
        .iter()
        .flatten()
        .all(|&c| c == 0.0 || c == 1.0 || c == 2.0));
}

#[test]
fn generation_is_deterministic() {
    let spec = DatasetSpec::NoisyGaussian {
        n_cluster: 100,
        n_noise: 30,
        sigma: 10.0,
        amplitude: 500.0,
        noise_side: 500.0,
    };
    assert_eq!(spec.generate(5).unwrap(), spec.generate(5).unwrap());
    assert_ne!(spec.generate(5).unwrap(), spec.generate(6).unwrap());
}

#[test]
fn invalid_specs_rejected() {
    assert!(gen_noisy_gaussian(10, 0, -1.0, 0).is_err());
    assert!(gen_lattice(0, 2).is_err());
    let bad = DatasetSpec::Circles {
        n_per_cluster: 10,
        profile: EnergyProfile::Uniform,
        jitter: 0.0,
        scale: 100.0,
        factor: 1.5,
        uniform_energy: 1.0,
    };
    assert!(bad.generate(0).is_err());
}

#[test]
fn gradient_profile_has_a_unique_peak_per_cluster() {
    for ds in [
        gen_moons(500, EnergyProfile::Gradient, 11).unwrap(),
        gen_circles(500, EnergyProfile::Gradient, 11).unwrap(),
    ] {
        let truth = ds.truth().unwrap();
        for label in [0, 1] {
            let e: Vec<f64> = (0..ds.len())
                .filter(|&i| truth[i] == label)
                .map(|i| ds.points()[i].energy)
                .collect();
            let max = e.iter().copied().fold(f64::MIN, f64::max);
            assert_eq!(e.iter().filter(|&&x| x == max).count(), 1);
            assert!(e.iter().all(|&x| x >= 0.0));
        }
    }
}

#[test]
fn zero_jitter_points_lie_on_the_arcs() {
    let spec = DatasetSpec::Circles {
        n_per_cluster: 64,
        profile: EnergyProfile::Uniform,
        jitter: 0.0,
        scale: 100.0,
        factor: 0.5,
        uniform_energy: 1.0,
    };
    let ds = spec.generate(0).unwrap();
    for i in 0..ds.len() {
        let r = ds.coords(i).iter().map(|x| x * x).sum::<f64>().sqrt();
        let want = if i < 64 { 100.0 } else { 50.0 };
        assert!((r - want).abs() < 1e-3, "{r}");
    }
    let spec = DatasetSpec::Moons {
        n_per_cluster: 50,
        profile: EnergyProfile::Uniform,
        jitter: 0.0,
        scale: 100.0,
        uniform_energy: 1.0,
    };
    let ds = spec.generate(0).unwrap();
    for i in 0..ds.len() {
        let c = ds.coords(i);
        let center = if i < 50 { [0.0, 0.0] } else { [100.0, 50.0] };
        let r = ((c[0] - center[0]).powi(2) + (c[1] - center[1]).powi(2)).sqrt();
        assert!((r - 100.0).abs() < 1e-3, "{r}");
    }
}

#[test]
fn lattice_neighbors_are_one_unit_apart() {
    let ds = gen_lattice(4, 2).unwrap();
    let mut min = f64::MAX;
    for i in 0..ds.len() {
        for j in 0..i {
            min = min.min(ds.quantizer().distance(ds.sq_dist(i, j)));
        }
    }
    assert_eq!(min, 1.0);
    assert_eq!(gen_lattice(1, 3).unwrap().len(), 1);
}
