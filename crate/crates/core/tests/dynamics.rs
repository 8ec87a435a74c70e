use frictionlab_core::classical::measure_drag_clamped;
use frictionlab_core::*;

fn grid() -> ModeGrid {
    ModeGrid::new(RadialGrid::uniform(3.0, 150).unwrap(), XiGrid::with_spacing(0.05, 80).unwrap())
}

#[test]
fn particle_slows_down() {
    for mu in [-0.25, 0.0] {
        let lam = 0.2;
        let gamma = gamma_alpha(&FormFactorModel::gaussian(mu, 1.0), &QuadratureGrid::default()).unwrap();
        let m = FormFactorModel::gaussian(mu, (lam / gamma).sqrt());
        let sys = ClassicalSystem::new(&m, &grid()).unwrap();
        let cfg = RunConfig {
            dt: 0.05,
            t_final: 200.0,
            sample_every: 20,
            q0: 0.0,
            p0: 1.0,
            initial: InitialField::Static,
        };
        let r = sys.run(&cfg).unwrap();
        let p: Vec<f64> = r.p.iter().map(|x| x.abs()).collect();
        let late = &p[p.len() / 10..];
        assert!(late.windows(2).all(|w| w[1] < w[0]), "mu={mu}");
        assert!(p[p.len() - 1] < 0.25 * p[0], "mu={mu}: {}", p[p.len() - 1]);
    }
}

#[test]
fn clamped_force_is_quadratic_in_g() {
    let g = ModeGrid::new(RadialGrid::uniform(3.0, 60).unwrap(), XiGrid::with_spacing(0.1, 30).unwrap());
    let a = measure_drag_clamped(0.3, &FormFactorModel::gaussian(0.0, 0.1), &g, 30.0, 0.05, f64::INFINITY).unwrap();
    let b = measure_drag_clamped(0.3, &FormFactorModel::gaussian(0.0, 0.2), &g, 30.0, 0.05, f64::INFINITY).unwrap();
    assert!((b.force / a.force - 4.0).abs() < 1e-6 * 4.0);
}

#[test]
fn symplectic_order_two() {
    let g = ModeGrid::new(RadialGrid::uniform(4.0, 20).unwrap(), XiGrid::uniform(4.0, 10).unwrap());
    let sys = ClassicalSystem::new(&FormFactorModel::gaussian(0.0, 0.5), &g).unwrap();
    let drift = |dt: f64| {
        let cfg = RunConfig {
            dt,
            t_final: 20.0,
            sample_every: (0.1 / dt).round() as usize,
            q0: 0.0,
            p0: 1.0,
            initial: InitialField::Vacuum,
        };
        sys.run(&cfg).unwrap().energy_drift()
    };
    let d: Vec<f64> = [0.04, 0.02, 0.01].iter().map(|&dt| drift(dt)).collect();
    for w in d.windows(2) {
        let r = w[0] / w[1];
        assert!((3.6..=4.4).contains(&r), "{d:?}");
    }
}
