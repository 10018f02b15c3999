use rpifs_core::quant::{error_monte_carlo, Quantizer};
use rpifs_core::{cantor, Cone, Mat2, RpifsSpec, SelfSimilarMeasure};

#[test]
fn empirical_cdf_within_dkw_band() {
    let m = cantor::measure();
    let n = 100_000;
    // consecutive chaos-game points share digits; after 40 steps the old ones move a point by < 3^-40
    let stride = 40;
    let mut xs: Vec<f64> = m.sample_chart(n * stride, 77, 64).unwrap().into_iter().step_by(stride).collect();
    xs.sort_by(f64::total_cmp);
    // P(sup |F_n - F| > eps) <= 2 exp(-2 n eps²) = 0.01
    let eps = ((2.0f64 / 0.01).ln() / (2.0 * n as f64)).sqrt();
    for k in 1..=20 {
        let x = -1.0 + 2.0 * k as f64 / 21.0;
        let mass = m.cone_mass(&Cone::new(-1.0, x).unwrap(), 14).unwrap();
        let empirical = xs.partition_point(|&y| y <= x) as f64 / n as f64;
        assert!(
            mass.lower - eps <= empirical && empirical <= mass.upper + eps,
            "x = {x}: empirical {empirical}, exact in [{}, {}]",
            mass.lower,
            mass.upper
        );
    }
}

#[test]
fn monte_carlo_second_moment_of_skewed_system() {
    let spec =
        RpifsSpec::new(vec![Mat2::affine(0.5, -1.0).unwrap(), Mat2::affine(0.25, 1.5).unwrap()], Some(vec![0.3, 0.7]))
            .unwrap();
    let m = SelfSimilarMeasure::new(spec).unwrap();
    let exact = m.solve_moments().unwrap().second_moment;
    let mc = error_monte_carlo(&m, &Quantizer::new(vec![0.0]).unwrap(), 2.0, 100_000, 3).unwrap();
    assert!((mc.value - exact).abs() <= mc.bound, "{} vs {exact} ± {}", mc.value, mc.bound);
}

#[test]
fn samples_stay_in_the_attractor() {
    let m = cantor::measure();
    for x in m.sample_chart(2000, 5, 64).unwrap() {
        // after burn-in every point is within 3^-60 of a level-8 cylinder
        let level = (0..8).fold(x, |y, _| if y < 0.0 { 3.0 * y + 2.0 } else { 3.0 * y - 2.0 });
        assert!((-1.0 - 1e-9..=1.0 + 1e-9).contains(&level), "{x}");
    }
}
