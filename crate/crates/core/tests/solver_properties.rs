use predfront_core::{simulate, ModelParams, NumericsConfig, Profile, SimulationResult};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg(t_max: f64) -> NumericsConfig {
    NumericsConfig { t_max, n_y: 64, half_width: Some(20.0), n_x: Some(401), snapshot_every: 0.5, ..Default::default() }
}

fn bumpy_prey(rng: &mut ChaCha8Rng, b: f64) -> Profile {
    // smooth positive bump over a flat far field, even in x
    let amp = rng.random_range(-0.4..0.4) * b;
    let x: Vec<f64> = (0..81).map(|i| -8.0 + 0.2 * i as f64).collect();
    let values = x.iter().map(|&x: &f64| b + amp * (-x * x / 4.0).exp()).collect();
    Profile::Samples { x, values }
}

fn random_case(rng: &mut ChaCha8Rng) -> (ModelParams, Profile, Profile) {
    let a = rng.random_range(0.2..2.0);
    let b = rng.random_range(0.5..3.0);
    let c = rng.random_range(0.1..2.0);
    let d = rng.random_range(0.3..3.0);
    let mu = rng.random_range(0.2..4.0);
    let h0 = rng.random_range(0.3..1.2);
    let p = ModelParams::new(a, b, c, d, mu, h0).unwrap();
    let u0 = if rng.random_bool(0.5) {
        Profile::Cosine { amplitude: rng.random_range(0.2..2.0) }
    } else {
        Profile::Quartic { amplitude: rng.random_range(0.2..2.0) }
    };
    let v0 = bumpy_prey(rng, b);
    (p, u0, v0)
}

fn max_asym(r: &SimulationResult) -> f64 {
    r.series.iter().map(|s| (s.g + s.h).abs() / s.h).fold(0.0, f64::max)
}

#[test]
fn even_data_keep_fronts_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..4 {
        let (p, u0, v0) = random_case(&mut rng);
        let r = simulate(&p, &u0, &v0, &cfg(4.0)).unwrap();
        assert!(max_asym(&r) < 1e-8, "{p:?}: {}", max_asym(&r));
    }
}

#[test]
fn fronts_monotone_and_densities_boxed() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..6 {
        let (p, u0, v0) = random_case(&mut rng);
        let r = simulate(&p, &u0, &v0, &cfg(4.0)).unwrap();
        for w in r.series.windows(2) {
            assert!(w[1].g <= w[0].g && w[1].h >= w[0].h, "{p:?} at t = {}", w[1].t);
        }
        let d = &r.diagnostics;
        assert!(d.max_u_excess <= r.numerics.tol_bounds, "{p:?}: {d:?}");
        assert!(d.max_v_excess <= r.numerics.tol_bounds, "{p:?}: {d:?}");
        assert!(d.min_v > 0.0);
        for s in &r.snapshots {
            assert_eq!(s.w[0], 0.0);
            assert_eq!(*s.w.last().unwrap(), 0.0);
            assert!(s.w.iter().all(|&v| v >= 0.0));
        }
    }
}

#[test]
fn larger_mu_never_lags() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..3 {
        let (p, u0, v0) = random_case(&mut rng);
        let mu2 = p.mu * rng.random_range(1.2..3.0);
        let c = cfg(3.0);
        let r1 = simulate(&p, &u0, &v0, &c).unwrap();
        let r2 = simulate(&p.with_mu(mu2), &u0, &v0, &c).unwrap();
        let eps = 2.0 * r1.numerics.line_grid().dx;
        for s in &r1.snapshots {
            let (g2, h2) = r2.fronts_at(s.t);
            assert!(s.front.h <= h2 + eps && s.front.g >= g2 - eps, "{p:?} vs μ = {mu2} at t = {}", s.t);
        }
    }
}

#[test]
fn decoupled_predator_free_single_species() {
    // prey at capacity with negligible predation loss stays put
    let p = ModelParams::new(0.7, 2.0, 1e-12, 1.0, 2.0, 0.6).unwrap();
    let r = simulate(&p, &Profile::Quartic { amplitude: 0.5 }, &Profile::Constant { value: 2.0 }, &cfg(3.0)).unwrap();
    let z = &r.final_state.z;
    assert!(z.iter().all(|&v| (v - 2.0).abs() < 1e-10));
    assert!(r.last().h > 0.6);
}

#[test]
fn front_position_converges_under_refinement() {
    let p = ModelParams::new(1.0, 3.0, 0.5, 1.0, 1.0, 0.8).unwrap();
    let h_at = |k: u32| {
        let f = 1usize << k;
        let c = NumericsConfig {
            t_max: 3.0,
            dt: 0.02 / f as f64,
            n_y: 33 * f - 1,
            n_x: Some(200 * f + 1),
            half_width: Some(20.0),
            ..Default::default()
        };
        simulate(&p, &Profile::Cosine { amplitude: 1.0 }, &Profile::Constant { value: 3.0 }, &c).unwrap().last().h
    };
    let h: Vec<f64> = (0..3).map(h_at).collect();
    let ratio = (h[1] - h[0]).abs() / (h[2] - h[1]).abs();
    assert!(ratio >= 1.8, "ratio {ratio}, h = {h:?}");
}

#[test]
fn identical_configs_give_identical_runs() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let (p, u0, v0) = random_case(&mut rng);
    let a = simulate(&p, &u0, &v0, &cfg(2.0)).unwrap();
    let b = simulate(&p, &u0, &v0, &cfg(2.0)).unwrap();
    assert_eq!(a, b);
}
