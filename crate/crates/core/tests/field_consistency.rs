//! Energy, derivative and structural identities of the discrete field model.

use magpl_core::field::{
    diamagnetic_check, gauge_transform, hypothesis_report, magnetic_gradient,
    product_rule_residual, tail_mass, ComplexField, CriticalWeightPreset, ElectricPreset, Grid,
    MagneticPreset, NonlinearitySpec, PotentialSpec, Problem, ProblemParams, VectorSample,
    WeightProfile,
};
use magpl_core::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params(p: f64) -> ProblemParams {
    // N = 4 keeps every p in [1.5, 3] admissible with p* > k > q > p
    let n = 4usize;
    let ps = n as f64 * p / (n as f64 - p);
    let k = p + 0.75 * (ps - p);
    let q = p + 0.5 * (k - p);
    ProblemParams::new(p, n, q, k, q, 1.3).unwrap()
}

fn problem(grid: Grid, p: f64, magnetic: MagneticPreset) -> Problem {
    let pp = params(p);
    let (lo, hi) = magpl_core::field::tau_window(pp.p, pp.n_math);
    let spec = PotentialSpec {
        magnetic,
        electric: ElectricPreset::Harmonic { v0: 1.0, omega: 0.3 },
        critical: CriticalWeightPreset::PowerDip {
            k_sup: 1.0,
            kappa: 0.5,
        },
        tau: 0.5 * (lo + hi),
        delta_k: 1.0,
    };
    let pots = spec.sample(&grid, &pp).unwrap();
    let nl = NonlinearitySpec::PowerWeighted {
        weight: WeightProfile::Gaussian { width: 3.0 },
    }
    .build(&grid, &pp)
    .unwrap();
    Problem::new(pots, nl, pp).unwrap()
}

/// `ρ e^{iφ}` with `ρ` a positive sum of Gaussians and `φ` a random quadratic phase: smooth
/// and zero-free, so every term of the energy is differentiable along it.
fn zero_free_field(grid: Grid, rng: &mut ChaCha8Rng) -> ComplexField {
    let l = grid.half_width();
    let centers: Vec<([f64; 3], f64, f64)> = (0..3)
        .map(|_| {
            let mut c = [0.0; 3];
            for ca in c.iter_mut().take(grid.axes()) {
                *ca = if grid.is_radial() { 0.0 } else { rng.gen_range(-0.2 * l..0.2 * l) };
            }
            (c, rng.gen_range(0.3 * l..0.5 * l), rng.gen_range(0.3..1.5))
        })
        .collect();
    let k: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let curv = rng.gen_range(-0.1..0.1);
    ComplexField::from_fn(grid, move |x| {
        let rho: f64 = centers
            .iter()
            .map(|(c, w, a)| a * (-(0..3).map(|d| (x[d] - c[d]).powi(2)).sum::<f64>() / (w * w)).exp())
            .sum();
        let phase = (0..3).map(|d| k[d] * x[d]).sum::<f64>() + curv * (x[0] * x[0] + x[1] * x[1]);
        Complex64::from_polar(rho, phase)
    })
    .unwrap()
}

/// A sum of three Gaussian bumps with random centers, widths, amplitudes and phase slopes.
fn smooth_field(grid: Grid, rng: &mut ChaCha8Rng) -> ComplexField {
    let l = grid.half_width();
    let bumps: Vec<([f64; 3], f64, Complex64, [f64; 3])> = (0..3)
        .map(|_| {
            let mut c = [0.0; 3];
            let mut k = [0.0; 3];
            for a in 0..grid.axes() {
                c[a] = if grid.is_radial() { 0.0 } else { rng.gen_range(-0.3 * l..0.3 * l) };
                k[a] = rng.gen_range(-1.5..1.5);
            }
            let width = rng.gen_range(0.12 * l..0.25 * l);
            let amp = Complex64::from_polar(rng.gen_range(0.3..1.5), rng.gen_range(0.0..std::f64::consts::TAU));
            (c, width, amp, k)
        })
        .collect();
    ComplexField::from_fn(grid, move |x| {
        bumps
            .iter()
            .map(|(c, w, amp, k)| {
                let d2: f64 = (0..3).map(|a| (x[a] - c[a]).powi(2)).sum();
                let phase: f64 = (0..3).map(|a| k[a] * x[a]).sum();
                amp * Complex64::from_polar((-d2 / (w * w)).exp(), phase)
            })
            .sum()
    })
    .unwrap()
}

fn grids() -> Vec<Grid> {
    vec![
        Grid::cartesian(1, 6.0, 121).unwrap(),
        Grid::cartesian(2, 6.0, 41).unwrap(),
        Grid::radial(4, 6.0, 121).unwrap(),
    ]
}

fn magnetic_for(grid: &Grid, rng: &mut ChaCha8Rng) -> MagneticPreset {
    match grid.axes() {
        _ if grid.is_radial() => MagneticPreset::Zero,
        1 => MagneticPreset::Constant {
            a: vec![rng.gen_range(-1.0..1.0)],
        },
        _ => MagneticPreset::Symmetric {
            b: rng.gen_range(-1.0..1.0),
        },
    }
}

#[test]
fn gateaux_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for trial in 0..50 {
        let grid = grids()[trial % 3];
        let p = [1.5, 2.0, 2.5, 3.0][trial % 4];
        let mag = magnetic_for(&grid, &mut rng);
        let prob = problem(grid, p, mag);
        let u = zero_free_field(grid, &mut rng);
        // for p < 2 the energy is only C¹ where u vanishes; keep v dominated by u there
        let v = if p < 2.0 {
            let m = smooth_field(grid, &mut rng);
            let vals = u.values().iter().zip(m.values()).map(|(a, b)| a * (b + 0.5)).collect();
            ComplexField::new(grid, vals).unwrap()
        } else {
            smooth_field(grid, &mut rng)
        };
        let s = 1e-5;
        let plus = prob.energy(&u.axpy(s, &v).unwrap()).unwrap().total;
        let minus = prob.energy(&u.axpy(-s, &v).unwrap()).unwrap().total;
        let fd = (plus - minus) / (2.0 * s);
        let exact = prob.gateaux(&u, &v).unwrap();
        let rel = (fd - exact).abs() / exact.abs().max(1e-300);
        worst = worst.max(rel);
        assert!(rel < 1e-6, "trial {trial}: fd {fd} vs gateaux {exact}");
    }
    println!("worst gateaux/FD relative gap {worst:e}");
}

#[test]
fn discrete_gradient_reproduces_gateaux() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for grid in grids() {
        for p in [1.5, 2.0, 3.0] {
            let mag = magnetic_for(&grid, &mut rng);
            let prob = problem(grid, p, mag);
            let u = smooth_field(grid, &mut rng);
            let g = prob.gradient(&u).unwrap();
            for _ in 0..20 {
                // rough directions: independent random node values
                let v = ComplexField::from_indexed(grid, |_| Complex64::default()).unwrap();
                let vals: Vec<Complex64> = (0..grid.len())
                    .map(|i| {
                        if grid.is_boundary(i) {
                            Complex64::default()
                        } else {
                            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                        }
                    })
                    .collect();
                let v = ComplexField::new(*v.grid(), vals).unwrap();
                let lhs = g.dot_re(&v).unwrap() * grid.cell_measure();
                let rhs = prob.gateaux(&u, &v).unwrap();
                assert!(
                    (lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1e-12),
                    "{grid:?} p={p}: {lhs} vs {rhs}"
                );
            }
        }
    }
}

#[test]
fn descent_step_lowers_energy() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let grid = Grid::cartesian(1, 6.0, 121).unwrap();
    let prob = problem(grid, 2.0, MagneticPreset::Zero);
    let u = smooth_field(grid, &mut rng).scale(0.3);
    let g = prob.gradient(&u).unwrap();
    let e0 = prob.energy(&u).unwrap().total;
    let e1 = prob.energy(&u.axpy(-1e-4, &g).unwrap()).unwrap().total;
    assert!(e1 < e0);
}

#[test]
fn energy_basic_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for grid in grids() {
        let prob = problem(grid, 2.0, MagneticPreset::Zero);
        let zero = ComplexField::zeros(grid);
        assert_eq!(prob.energy(&zero).unwrap().total, 0.0);
        let u = smooth_field(grid, &mut rng);
        let e = prob.energy(&u).unwrap();
        assert_eq!(
            e.total,
            e.magnetic_kinetic / 2.0 + e.electric / 2.0 - e.critical / prob.pp.p_star() - e.subcritical / 2.0
        );
        // J(tu) -> -∞
        assert!(prob.energy(&u.scale(50.0)).unwrap().total < 0.0);
    }
}

#[test]
fn norm_homogeneity_and_phase_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for grid in grids() {
        let prob = problem(grid, 2.5, MagneticPreset::Zero);
        let u = smooth_field(grid, &mut rng);
        let n = prob.norm(&u).unwrap();
        assert!(n > 0.0);
        let n2 = prob.norm(&u.scale(2.0)).unwrap();
        assert!((n2.powf(2.5) / (2f64.powf(2.5) * n.powf(2.5)) - 1.0).abs() < 1e-13);
        let rot = prob.norm(&u.scale_complex(Complex64::from_polar(1.0, 0.9))).unwrap();
        assert!((rot / n - 1.0).abs() < 1e-14);
    }
}

#[test]
fn plane_wave_and_bump_diamagnetic_strict() {
    let grid = Grid::cartesian(1, 5.0, 201).unwrap();
    let omega = 1.3;
    let u = ComplexField::from_fn(grid, |x| Complex64::from_polar((-x[0] * x[0]).exp(), omega * x[0]))
        .unwrap();
    let a = VectorSample::zeros(&grid);
    let du = magnetic_gradient(&u, &a).unwrap();
    let modulus = u.modulus();
    // strictly larger where |u| is not tiny
    for i in 80..120 {
        let gm = grid.diff(&modulus, i, 0).abs();
        // |∇_A u|² = |∇|u||² + ω²|u|² in the continuum
        assert!(du.norm_at(i).powi(2) > gm * gm + 0.5 * (omega * modulus[i]).powi(2));
    }
    assert!(diamagnetic_check(&u, &a).unwrap() <= 0.0);
}

#[test]
fn diamagnetic_violation_shrinks_under_refinement() {
    // u = e^{-i a x}|u| nearly cancels ∇_A u with A = a: the discrete inequality can fail by O(h²)
    let a0 = 0.8;
    let mut consts = Vec::new();
    for n in [61, 121, 241] {
        let grid = Grid::cartesian(1, 5.0, n).unwrap();
        let u = ComplexField::from_fn(grid, |x| Complex64::from_polar((-x[0] * x[0]).exp(), -a0 * x[0]))
            .unwrap();
        let a = MagneticPreset::Constant { a: vec![a0] }.sample(&grid).unwrap();
        let viol = diamagnetic_check(&u, &a).unwrap();
        consts.push(viol.max(0.0) / grid.spacing());
    }
    assert!(consts.windows(2).all(|w| w[1] <= w[0] * 1.01), "{consts:?}");
}

#[test]
fn product_rule() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let grid = Grid::cartesian(2, 4.0, 41).unwrap();
    let u = smooth_field(grid, &mut rng);
    let a = MagneticPreset::Symmetric { b: 0.7 }.sample(&grid).unwrap();
    let ones = vec![1.0; grid.len()];
    assert_eq!(product_rule_residual(&u, &ones, &a).unwrap(), 0.0);
    // linear η, constant u inside, A = 0
    let lin: Vec<f64> = (0..grid.len()).map(|i| 0.5 + 0.25 * grid.point(i)[0] - grid.point(i)[1]).collect();
    let c = ComplexField::from_fn(grid, |_| Complex64::new(0.4, -1.1)).unwrap();
    let zero_a = VectorSample::zeros(&grid);
    assert!(product_rule_residual(&c, &lin, &zero_a).unwrap() < 1e-14);
    // order-2 convergence for smooth u, η
    let mut res = Vec::new();
    for n in [41, 81, 161] {
        let grid = Grid::cartesian(1, 4.0, n).unwrap();
        let u = ComplexField::from_fn(grid, |x| Complex64::from_polar((-x[0] * x[0]).exp(), 0.7 * x[0])).unwrap();
        let eta: Vec<f64> = (0..grid.len()).map(|i| (0.5 * grid.point(i)[0]).sin()).collect();
        let a = MagneticPreset::Constant { a: vec![0.4] }.sample(&grid).unwrap();
        res.push(product_rule_residual(&u, &eta, &a).unwrap());
    }
    for w in res.windows(2) {
        let ratio = w[0] / w[1];
        assert!(ratio > 3.5 && ratio < 4.5, "{res:?}");
    }
}

#[test]
fn gauge_constant_and_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let grid = Grid::cartesian(2, 6.0, 49).unwrap();
    let prob = problem(grid, 2.0, MagneticPreset::Symmetric { b: 0.5 });
    let u = smooth_field(grid, &mut rng);
    let phi = vec![1.234; grid.len()];
    let out = gauge_transform(&u, &prob, &phi).unwrap();
    let scale = prob.energy(&u).unwrap().magnetic_kinetic.abs().max(1.0);
    assert!(out.energy_residual <= 1e-14 * scale, "{}", out.energy_residual);
    assert!(out.modulus_defect <= 4.0 * f64::EPSILON * u.max_abs());
    assert_eq!(out.problem.pots.a, prob.pots.a);

    let mut residuals = Vec::new();
    let mut spacings = Vec::new();
    for n in [41, 81, 161] {
        let grid = Grid::cartesian(1, 8.0, n).unwrap();
        let prob = problem(grid, 2.0, MagneticPreset::Constant { a: vec![0.6] });
        let u = ComplexField::from_fn(grid, |x| Complex64::new((-x[0] * x[0] / 2.0).exp(), 0.0)).unwrap();
        let phi: Vec<f64> = (0..grid.len()).map(|i| -0.6 * grid.point(i)[0]).collect();
        residuals.push(gauge_transform(&u, &prob, &phi).unwrap().energy_residual);
        spacings.push(grid.spacing());
    }
    let order = (residuals[0] / residuals[2]).ln() / (spacings[0] / spacings[2]).ln();
    assert!(order >= 1.8, "{residuals:?} order {order}");
}

#[test]
fn hypotheses_of_builtin_model() {
    let grid = Grid::cartesian(1, 4.0, 81).unwrap();
    let pp = ProblemParams::new(2.0, 4, 3.0, 3.5, 3.0, 1.0).unwrap();
    let spec = PotentialSpec {
        magnetic: MagneticPreset::Zero,
        electric: ElectricPreset::Constant { v0: 1.0 },
        critical: CriticalWeightPreset::PowerDip {
            k_sup: 1.0,
            kappa: 1.0,
        },
        tau: 3.0,
        delta_k: 1.0,
    };
    let pots = spec.sample(&grid, &pp).unwrap();
    let nl = NonlinearitySpec::default().build(&grid, &pp).unwrap();
    let prob = Problem::new(pots, nl, pp).unwrap();
    let rep = hypothesis_report(&prob, 1, 10.0, 101).unwrap();
    assert!(rep.all_passed(), "{rep:#?}");
    // θ = q: (q/p) F = f t, so (f_2) is tight
    assert!(rep.get("(f_2)").unwrap().worst_slack.abs() < 1e-10);
    // F = λ t^{q/p} with w ≡ 1: (f_3) holds with equality
    assert!(rep.get("(f_3)").unwrap().worst_slack.abs() < 1e-10);

    // K ≡ const: flatness constant 0
    let mut flat = spec.clone();
    flat.critical = CriticalWeightPreset::Flat { k_sup: 2.0 };
    let prob2 = Problem::new(flat.sample(&grid, &pp).unwrap(), prob.nl.clone(), pp).unwrap();
    let rep2 = hypothesis_report(&prob2, 1, 10.0, 11).unwrap();
    assert_eq!(rep2.k_flatness_constant, 0.0);
    assert!(rep2.get("(K)").unwrap().passed);

    // θ > q breaks (f_2) for the power model
    let bad = ProblemParams::new(2.0, 4, 3.2, 3.5, 3.0, 1.0).unwrap();
    let prob3 = Problem::new(prob.pots.clone(), NonlinearitySpec::default().build(&grid, &bad).unwrap(), bad).unwrap();
    assert!(!hypothesis_report(&prob3, 1, 10.0, 11).unwrap().get("(f_2)").unwrap().passed);
}

#[test]
fn tail_mass_of_compact_field() {
    let grid = Grid::cartesian(2, 3.0, 61).unwrap();
    let u = ComplexField::from_fn(grid, |x| {
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        Complex64::new((1.0 - r).max(0.0), 0.0)
    })
    .unwrap();
    let tm = tail_mass(&u, &[0.5, 1.0, 2.0], 4.0).unwrap();
    assert!(tm[0].1 > 0.0);
    assert_eq!(tm[1].1, 0.0);
    assert_eq!(tm[2].1, 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gateaux_is_real_linear(seed in 0u64..1000, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = Grid::cartesian(1, 6.0, 61).unwrap();
        let prob = problem(grid, 2.5, MagneticPreset::Constant { a: vec![0.2] });
        let u = smooth_field(grid, &mut rng);
        let v = smooth_field(grid, &mut rng);
        let w = smooth_field(grid, &mut rng);
        let combo = v.scale(a).axpy(b, &w).unwrap();
        let lhs = prob.gateaux(&u, &combo).unwrap();
        let rhs = a * prob.gateaux(&u, &v).unwrap() + b * prob.gateaux(&u, &w).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
        prop_assert_eq!(prob.gateaux(&u, &ComplexField::zeros(grid)).unwrap(), 0.0);
    }

    #[test]
    fn tail_mass_nonincreasing(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = Grid::cartesian(2, 4.0, 21).unwrap();
        let u = smooth_field(grid, &mut rng);
        let radii: Vec<f64> = (0..10).map(|k| 0.5 * k as f64).collect();
        let tm = tail_mass(&u, &radii, 3.0).unwrap();
        for w in tm.windows(2) {
            prop_assert!(w[1].1 <= w[0].1);
        }
        prop_assert!(tm.iter().all(|&(_, f)| (0.0..=1.0).contains(&f)));
    }
}
