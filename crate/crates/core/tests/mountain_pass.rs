//! Ray fits, thresholds, the ε-sweep certificate, geometry, the mountain-pass solver against
//! a Newton oracle, and Palais–Smale diagnostics.

use magpl_core::field::{
    tau_window, ComplexField, CriticalWeightPreset, ElectricPreset, Grid, MagneticPreset, NonlinearitySpec,
    PotentialSet, PotentialSpec, Problem, ProblemParams, VectorSample,
};
use magpl_core::ineq::tmax_closed_form;
use magpl_core::instanton::{sobolev_constant, Bump, InstantonSpec};
use magpl_core::mountain_pass::*;
use magpl_core::quadrature::QuadLevel;
use magpl_core::{Complex64, Error};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn surrogate() -> Problem {
    let grid = Grid::cartesian(1, 10.0, 201).unwrap();
    let pp = ProblemParams::new(2.0, 4, 3.0, 3.5, 3.0, 1.0).unwrap();
    let spec = PotentialSpec {
        magnetic: MagneticPreset::Zero,
        electric: ElectricPreset::Constant { v0: 1.0 },
        critical: CriticalWeightPreset::PowerDip { k_sup: 1.0, kappa: 1.0 },
        tau: 3.0,
        delta_k: 1.0,
    };
    let pots = spec.sample(&grid, &pp).unwrap();
    let nl = NonlinearitySpec::default().build(&grid, &pp).unwrap();
    Problem::new(pots, nl, pp).unwrap()
}

fn gaussian(grid: Grid) -> ComplexField {
    ComplexField::from_fn(grid, |x| Complex64::new((-x[0] * x[0]).exp(), 0.0)).unwrap()
}

mod newton {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    /// Real residual `G(u) = Re discrete_gradient(u)` on interior nodes.
    fn residual(prob: &Problem, x: &[f64]) -> Vec<f64> {
        let g = prob.grid();
        let u = field_from(prob, x);
        let grad = prob.gradient(&u).unwrap();
        (1..g.len() - 1).map(|i| grad.values()[i].re).collect()
    }

    pub fn field_from(prob: &Problem, x: &[f64]) -> ComplexField {
        let g = *prob.grid();
        let mut v = vec![Complex64::default(); g.len()];
        for (k, &xi) in x.iter().enumerate() {
            v[k + 1] = Complex64::new(xi, 0.0);
        }
        ComplexField::new(g, v).unwrap()
    }

    fn norm(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Damped Newton with a central-difference Jacobian; returns the interior values.
    pub fn solve(prob: &Problem, mut x: Vec<f64>) -> Option<Vec<f64>> {
        let n = x.len();
        let mut r = residual(prob, &x);
        for _ in 0..100 {
            if norm(&r) < 1e-12 {
                return Some(x);
            }
            let mut jac = DMatrix::<f64>::zeros(n, n);
            for j in 0..n {
                let h = 1e-6 * x[j].abs().max(1.0);
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[j] += h;
                xm[j] -= h;
                let (rp, rm) = (residual(prob, &xp), residual(prob, &xm));
                for i in 0..n {
                    jac[(i, j)] = (rp[i] - rm[i]) / (2.0 * h);
                }
            }
            let dx = jac.lu().solve(&DVector::from_vec(r.clone()))?;
            let mut s = 1.0;
            loop {
                let trial: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, d)| a - s * d).collect();
                let rt = residual(prob, &trial);
                if norm(&rt) < (1.0 - 1e-4 * s) * norm(&r) || s < 1e-6 {
                    x = trial;
                    r = rt;
                    break;
                }
                s *= 0.5;
            }
        }
        (norm(&r) < 1e-10).then_some(x)
    }
}


fn pure_critical_problem(grid: Grid, pp: ProblemParams, v0: f64) -> Problem {
    let spec = PotentialSpec {
        magnetic: MagneticPreset::Zero,
        electric: ElectricPreset::Constant { v0 },
        critical: CriticalWeightPreset::Flat { k_sup: 1.0 },
        tau: 0.5 * (tau_window(pp.p, pp.n_math).0 + tau_window(pp.p, pp.n_math).1),
        delta_k: 1.0,
    };
    let pots = spec.sample(&grid, &pp).unwrap();
    let nl = NonlinearitySpec::Zero.build(&grid, &pp).unwrap();
    Problem::new(pots, nl, pp).unwrap()
}

fn bumpy(grid: Grid, seed: u64) -> ComplexField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_direction(&grid, &mut rng, false).unwrap()
}

// ---------------------------------------------------------------- t-fit

#[test]
fn pure_critical_ray_matches_calculus() {
    let grid = Grid::cartesian(1, 6.0, 121).unwrap();
    for (p, n) in [(2.0, 4usize), (1.5, 3), (3.0, 5)] {
        let ps = n as f64 * p / (n as f64 - p);
        let k = 0.5 * (p + ps);
        let pp = ProblemParams::new(p, n, k, k, 0.5 * (p + k), 1.0).unwrap();
        let prob = pure_critical_problem(grid, pp, 1.0);
        for seed in 0..4 {
            let u = bumpy(grid, seed);
            let e = prob.energy(&u).unwrap();
            let (a, b) = (e.norm_pow(), e.critical);
            // single-variable calculus, written out independently of the library
            let t_exact = (a / b).powf(1.0 / (ps - p));
            let v_exact = a.powf(n as f64 / p) / b.powf((n as f64 - p) / p) / n as f64;
            let fit = fit_tmax(&u, &prob).unwrap();
            assert!((fit.t_star / t_exact - 1.0).abs() < 1e-10, "{p} {n}: {} vs {t_exact}", fit.t_star);
            assert!((fit.value_at_max / v_exact - 1.0).abs() < 1e-10);
            let (t_cf, v_cf) = tmax_closed_form(a, b, p, n as f64).unwrap();
            assert!((t_cf / fit.t_star - 1.0).abs() < 1e-10 && (v_cf / fit.value_at_max - 1.0).abs() < 1e-10);
            assert!(fit.bracket.0 <= fit.t_star && fit.t_star <= fit.bracket.1);
            // u -> 2u halves t*
            let fit2 = fit_tmax(&u.scale(2.0), &prob).unwrap();
            assert!((fit2.t_star / fit.t_star - 0.5).abs() < 1e-10);
            assert!((fit2.value_at_max / fit.value_at_max - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn ray_max_is_stationary_and_dominated_by_critical_only_bound() {
    let prob = surrogate();
    let grid = *prob.grid();
    for seed in 0..10 {
        let u = bumpy(grid, 100 + seed);
        let ray = RayProfile::new(&u, &prob).unwrap();
        let fit = fit_ray(&ray, &u, &prob).unwrap();
        assert!(fit.bracket.0 <= fit.t_star && fit.t_star <= fit.bracket.1);
        assert!(fit.stationarity_residual < ROOT_TOL * ray.scale(fit.t_star), "{fit:?}");
        let excess = audit_ray(&ray, &fit, 1000);
        assert!(excess <= 1e-12 * fit.value_at_max.abs().max(1.0), "audit excess {excess}");
        let (_, bound) = tmax_closed_form(ray.norm_pow, ray.critical, 2.0, 4.0).unwrap();
        assert!(fit.value_at_max <= bound);
        assert!(fit.value_at_max > 0.0);
    }
}

#[test]
fn degenerate_rays_are_reported() {
    let prob = surrogate();
    let grid = *prob.grid();
    let zero = ComplexField::zeros(grid);
    assert!(matches!(fit_tmax(&zero, &prob), Err(Error::DegenerateRay(_))));
    // K vanishes and f = 0 on the support of u: φ(t) = t^p a / p never turns down
    let pp = prob.pp;
    let k: Vec<f64> = (0..grid.len()).map(|i| if grid.point(i)[0].abs() < 1.0 { 1.0 } else { 0.0 }).collect();
    let pots = PotentialSet::new(grid, VectorSample::zeros(&grid), vec![1.0; grid.len()], 1.0, k, 1.0, 3.0, 1.0)
        .unwrap();
    let nl = NonlinearitySpec::Zero.build(&grid, &pp).unwrap();
    let flat = Problem::new(pots, nl, pp).unwrap();
    let u = ComplexField::from_fn(grid, |x| {
        Complex64::new((-(x[0] - 5.0).powi(2) * 4.0).exp(), 0.0)
    })
    .unwrap();
    assert!(matches!(fit_tmax(&u, &flat), Err(Error::DegenerateRay(_))));
}

// ---------------------------------------------------------------- thresholds

#[test]
fn threshold_formula_examples() {
    let pp3 = ProblemParams::new(2.0, 3, 4.0, 5.0, 3.0, 1.0).unwrap();
    let pp4 = ProblemParams::new(2.0, 4, 3.0, 3.5, 3.0, 1.0).unwrap();
    assert!((threshold_cp(1.0, 1.0, &pp4).unwrap() - 0.25).abs() < 1e-15);
    assert!((threshold_cp(1.0, 1.0, &pp3).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    // K_sup -> l K_sup scales c_P by l^{-N/p*}
    for l in [0.3, 2.0, 7.5] {
        let ratio = threshold_cp(3.1, l * 1.7, &pp3).unwrap() / threshold_cp(3.1, 1.7, &pp3).unwrap();
        assert!((ratio / l.powf(-3.0 / 6.0) - 1.0).abs() < 1e-14);
    }
    // N = 3: S = 3 (π/2)^{4/3} in closed form
    let s_exact = 3.0 * (std::f64::consts::PI / 2.0).powf(4.0 / 3.0);
    let s = sobolev_constant(2.0, 3, QuadLevel::default()).unwrap();
    let c = threshold_cp(s, 1.0, &pp3).unwrap();
    assert!((c / (s_exact.powf(1.5) / 3.0) - 1.0).abs() < 1e-9);
    assert!(threshold_cp(0.0, 1.0, &pp3).is_err());
    assert!(threshold_cp(1.0, -1.0, &pp3).is_err());
}

#[test]
fn lambda_schedule_follows_the_case_table() {
    // 1 < p <= 2 and N >= p²: any fixed λ > 0
    let pp = ProblemParams::new(2.0, 4, 3.0, 3.5, 3.0, 1.0).unwrap();
    assert_eq!(sigma_window(&pp).unwrap(), None);
    let c = lambda_for(1e-2, &pp, LambdaPolicy::Auto).unwrap();
    assert_eq!((c.lambda, c.sigma), (1.0, None));
    let zero = pp.with_lambda(0.0).unwrap();
    assert!(lambda_for(1e-2, &zero, LambdaPolicy::Auto).unwrap_err().to_string().contains("(f_3)"));

    // p > 2, N > p²: N - 2 - (N-p)q/p < σ < N - (N-p)q/p
    let pp = ProblemParams::new(2.5, 8, 3.0, 3.5, 3.0, 1.0).unwrap();
    let gain: f64 = 8.0 - 5.5 / 2.5 * 3.0;
    let (lo, hi) = sigma_window(&pp).unwrap().unwrap();
    assert!((lo - (gain - 2.0).max(0.0)).abs() < 1e-14 && (hi - gain).abs() < 1e-14);
    let c = lambda_for(1e-2, &pp, LambdaPolicy::Auto).unwrap();
    let sigma = c.sigma.unwrap();
    assert!((c.lambda - 1e-2f64.powf(-sigma)).abs() < 1e-9 * c.lambda);
    // the gain exponent net of σ lies in (0, 2)
    assert!(gain - sigma > 0.0 && gain - sigma < 2.0);

    // N < p², the three q cases
    let (p, n) = (3.0, 4usize);
    let crit = 4.0 * 2.0 / 1.0;
    let ps = 12.0;
    let nu = 2.0;
    let base = nu * (4.0 - p) / (p * (p - 1.0));
    for q in [3.5, crit, 10.0] {
        let k = if q < 9.0 { 9.0 } else { 11.0 };
        let pp = ProblemParams::new(p, n, 0.5 * (p + ps), k, q, 1.0).unwrap();
        let sigma = lambda_for(1e-2, &pp, LambdaPolicy::Auto).unwrap().sigma.unwrap();
        let net = if q < crit {
            (4.0 - p) / (p * (p - 1.0)) * q - sigma
        } else if q == crit {
            4.0 / p - sigma
        } else {
            4.0 - (4.0 - p) / p * q - sigma
        };
        assert!(net > 0.0 && net < base, "q = {q}: net {net}, bound {base}");
    }
    // fixed policy ignores the table
    let pp = ProblemParams::new(2.5, 8, 3.0, 3.5, 3.0, 0.7).unwrap();
    assert_eq!(lambda_for(1e-2, &pp, LambdaPolicy::Fixed).unwrap().lambda, 0.7);
}

fn certify_setup(n_math: usize, points: usize, radius: f64) -> (PotentialSet, ProblemParams) {
    let pp = if n_math == 4 {
        ProblemParams::new(2.0, 4, 3.0, 3.5, 3.0, 1.0).unwrap()
    } else {
        ProblemParams::new(2.0, 5, 3.0, 3.2, 3.0, 1.0).unwrap()
    };
    let grid = Grid::radial(n_math, radius, points).unwrap();
    let spec = PotentialSpec {
        magnetic: MagneticPreset::Zero,
        electric: ElectricPreset::Constant { v0: 1.0 },
        critical: CriticalWeightPreset::PowerDip { k_sup: 1.0, kappa: 1.0 },
        tau: 3.0,
        delta_k: 1.0,
    };
    (spec.sample(&grid, &pp).unwrap(), pp)
}

#[test]
fn certificate_at_n_equal_p_squared() {
    let eps = magpl_core::rates::default_epsilons();
    let (pots, pp) = certify_setup(4, 40_001, 1.0);
    let spec = InstantonSpec::centered(eps[0], 2.0, 4, 0.5).unwrap();
    let report = certify_ca_below_cp(&eps, &pots, &NonlinearitySpec::default(), &pp, &spec, &CertifyOptions::default())
        .unwrap();
    assert!(report.resolution >= 40.0);
    let n = 4.0;
    assert_eq!(report.c_p, report.s_est.powf(n / 2.0) / (n * report.k_sup.powf(n / 4.0)));
    assert!(report.margin_at_smallest > 0.0, "{report:#?}");
    assert!(report.certified());
    for e in &report.epsilon_evidence {
        assert!(report.c_a_est <= e.ray_max);
        assert!(e.ray_max <= e.critical_only_max);
        assert_eq!(e.lambda, 1.0);
    }
    assert_eq!(report.margin, report.c_p - report.c_a_est);
}

#[test]
fn pure_critical_ray_approaches_cp() {
    let pp = ProblemParams::new(2.0, 4, 3.0, 3.5, 3.0, 1.0).unwrap();
    let grid = Grid::radial(4, 1.0, 40_001).unwrap();
    let prob = pure_critical_problem(grid, pp, 1e-8);
    let spec = InstantonSpec::centered(1e-2, 2.0, 4, 0.5).unwrap();
    let r = pure_critical_run(1e-2, &prob, &spec, QuadLevel::default()).unwrap();
    assert!(r.relative_gap < 0.05, "{r:?}");
    assert!((r.ray_max / r.closed_form_max - 1.0).abs() < 1e-10);
}

#[test]
fn deficit_rate_above_p_squared() {
    // N = 5 > p² = 4, q = 3: the deficit c_P - max_t J decays like ε^{N - (N-p)q/p} = ε^{1/2}
    let eps = magpl_core::rates::default_epsilons();
    let (pots, pp) = certify_setup(5, 40_001, 1.0);
    let spec = InstantonSpec::centered(eps[0], 2.0, 5, 0.5).unwrap();
    let report = certify_ca_below_cp(&eps, &pots, &NonlinearitySpec::default(), &pp, &spec, &CertifyOptions::default())
        .unwrap();
    let deficits: Vec<f64> = report.epsilon_evidence.iter().map(|e| e.margin).collect();
    assert!(deficits.iter().all(|&d| d > 0.0), "{deficits:?}");
    let fit = magpl_core::rates::fit_power_law(&eps, &deficits, false).unwrap();
    let predicted = 5.0 - 3.0 / 2.0 * 3.0;
    assert!(fit.exponent > predicted / 2.0 && fit.exponent < 2.0 * predicted, "fit {}", fit.exponent);
}

// ---------------------------------------------------------------- test functions

#[test]
fn test_function_without_field_is_the_bump() {
    let (pots, _) = certify_setup(4, 2001, 1.0);
    let spec = InstantonSpec::centered(0.05, 2.0, 4, 0.5).unwrap();
    let u = build_test_function(0.05, &pots, &spec, QuadLevel::default()).unwrap();
    let bump = Bump::new(&spec, QuadLevel::default()).unwrap();
    for i in 0..pots.grid.len() {
        assert_eq!(u.values()[i], Complex64::new(bump.value(pots.grid.radius(i)), 0.0));
        if pots.grid.radius(i) >= 0.5 {
            assert_eq!(u.values()[i], Complex64::default());
        }
    }
}

fn planar(points: usize, a: Vec<f64>) -> (PotentialSet, ProblemParams) {
    let pp = ProblemParams::new(1.5, 2, 3.0, 4.0, 2.5, 1.0).unwrap();
    let grid = Grid::cartesian(2, 1.0, points).unwrap();
    let spec = PotentialSpec {
        magnetic: MagneticPreset::Constant { a },
        electric: ElectricPreset::Constant { v0: 1.0 },
        critical: CriticalWeightPreset::Flat { k_sup: 1.0 },
        tau: 2.0,
        delta_k: 1.0,
    };
    (spec.sample(&grid, &pp).unwrap(), pp)
}

#[test]
fn constant_field_phase_cancels() {
    let spec = InstantonSpec::centered(0.2, 1.5, 2, 0.8).unwrap();
    let mut gaps = Vec::new();
    for points in [81, 161, 321] {
        let (pots, pp) = planar(points, vec![0.7, -0.4]);
        let (bare, _) = planar(points, vec![0.0, 0.0]);
        let u = build_test_function(0.2, &pots, &spec, QuadLevel::default()).unwrap();
        let w = build_test_function(0.2, &bare, &spec, QuadLevel::default()).unwrap();
        for (z, x) in u.values().iter().zip(w.values()) {
            assert!((z.norm() - x.re).abs() <= 4.0 * f64::EPSILON * x.re);
        }
        let nu = magpl_core::field::energy_norm(&u, &pots, &pp).unwrap();
        let nw = magpl_core::field::energy_norm(&w, &bare, &pp).unwrap();
        gaps.push((nu / nw - 1.0).abs());
    }
    assert!(gaps[0] < 1e-2, "{gaps:?}");
    assert!(gaps[0] / gaps[1] > 3.0 && gaps[1] / gaps[2] > 3.0, "{gaps:?}");
}

#[test]
fn cutoff_preconditions() {
    let grid = Grid::cartesian(2, 1.0, 41).unwrap();
    let pp = ProblemParams::new(1.5, 2, 3.0, 4.0, 2.5, 1.0).unwrap();
    let rough = PotentialSpec {
        magnetic: MagneticPreset::Symmetric { b: 1e4 },
        electric: ElectricPreset::Constant { v0: 1.0 },
        critical: CriticalWeightPreset::Flat { k_sup: 1.0 },
        tau: 2.0,
        delta_k: 1.0,
    };
    let pots = rough.sample(&grid, &pp).unwrap();
    let spec = InstantonSpec::centered(0.1, 1.5, 2, 0.5).unwrap();
    assert!(matches!(
        build_test_function(0.1, &pots, &spec, QuadLevel::default()),
        Err(Error::RoughPotential(_))
    ));
    // moderate field: δ_A is found and must exceed δ_ψ
    let moderate = PotentialSpec { magnetic: MagneticPreset::Symmetric { b: 2.0 }, ..rough.clone() };
    let pots = moderate.sample(&grid, &pp).unwrap();
    let delta_a = magnetic_radius(&pots, &[0.0, 0.0], C_SMALL);
    // |A(x) - A(0)|² = b² r² / 4 reaches 1/4 at r = 1/2
    assert!((delta_a - 0.5).abs() <= grid.spacing(), "{delta_a}");
    let err = build_test_function(0.1, &pots, &InstantonSpec::centered(0.1, 1.5, 2, 0.6).unwrap(), QuadLevel::default())
        .unwrap_err();
    assert!(err.to_string().contains("(A)"));
    let narrow_k = PotentialSpec { delta_k: 0.3, ..rough };
    let pots = PotentialSpec { magnetic: MagneticPreset::Zero, ..narrow_k }.sample(&grid, &pp).unwrap();
    let err = build_test_function(0.1, &pots, &spec, QuadLevel::default()).unwrap_err();
    assert!(err.to_string().contains("(K)"));
}

// ---------------------------------------------------------------- geometry

#[test]
fn geometry_of_the_surrogate() {
    let prob = surrogate();
    let v0 = gaussian(*prob.grid());
    let radii = [1e-3, 1e-2, 0.1, 0.3];
    let ts: Vec<f64> = (0..60).map(|k| 0.1 * 1.2f64.powi(k)).collect();
    let report = verify_geometry(&v0, &radii, &ts, &prob, 8, 7).unwrap();
    assert_eq!(report.energy_at_zero, 0.0);
    assert!(report.spheres[0].alpha > 0.0);
    let r = report.radius.unwrap();
    let esc = report.escape.unwrap();
    assert!(esc.energy < 0.0 && esc.norm > r);
    assert!(report.passed());
}

// ---------------------------------------------------------------- solver

fn parity_guess(prob: &Problem, parity: usize) -> Vec<f64> {
    let g = prob.grid();
    (1..g.len() - 1)
        .map(|i| {
            let keep = parity == 2 || i % 2 == parity;
            if keep {
                2.0 * (-g.point(i)[0].powi(2) / 2.0).exp()
            } else {
                0.0
            }
        })
        .collect()
}

#[test]
fn solver_matches_newton_oracle() {
    let prob = surrogate();
    let grid = *prob.grid();
    let v0 = gaussian(grid);
    let opts = SolverOptions::default();
    let out = mountain_pass_solve(&v0, &prob, &opts).unwrap();
    assert!(out.converged && out.residual < 1e-6, "{} {}", out.converged, out.residual);

    let s = sobolev_constant(2.0, 4, QuadLevel::default()).unwrap();
    let c_p = threshold_cp(s, 1.0, &prob.pp).unwrap();
    assert!(out.level > 0.0 && out.level < c_p);

    // endpoints
    assert_eq!(out.endpoint_drift, 0.0);
    assert!(out.path.nodes[0].is_zero());
    assert_eq!(out.path.energies[0], 0.0);
    assert_eq!(out.path.nodes.last().unwrap(), &v0.scale(out.t0));
    assert!(out.path.energies.last().unwrap() < &0.0);
    let top = out.path.energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(out.path.energies[out.path.max_index], top);
    // monotone max-node energy
    for w in out.log.windows(2) {
        assert!(w[1].level <= w[0].level, "{:?}", w);
    }
    // derivative test against random directions
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 0..20 {
        let v = random_direction(&grid, &mut rng, k % 2 == 0).unwrap();
        let d = prob.gateaux(&out.u, &v).unwrap().abs();
        assert!(d <= opts.tol * prob.norm(&v).unwrap(), "{d}");
    }

    // Newton on the same discrete system. The centered stencil splits the nodes into two
    // sublattices that the energy does not couple, so the oracle starts from a smooth guess on
    // each sublattice and on both and keeps the lowest nontrivial level.
    let mut best: Option<(f64, ComplexField)> = None;
    for parity in 0..3 {
        if let Some(x) = newton::solve(&prob, parity_guess(&prob, parity)) {
            let u = newton::field_from(&prob, &x);
            let level = prob.energy(&u).unwrap().total;
            if level > 1e-8 && best.as_ref().is_none_or(|(l, _)| level < *l) {
                best = Some((level, u));
            }
        }
    }
    let (oracle_level, oracle) = best.expect("Newton converged from at least one guess");
    let dist = out.u.max_distance(&oracle).unwrap();
    assert!(dist < 1e-4, "max-norm distance {dist}");
    assert!((out.level - oracle_level).abs() < 1e-8);
}

#[test]
fn energy_separates_over_sublattices() {
    let prob = surrogate();
    let grid = *prob.grid();
    let u = bumpy(grid, 5);
    let part = |parity: usize| {
        ComplexField::from_indexed(grid, |i| if i % 2 == parity { u.values()[i] } else { Complex64::default() })
            .unwrap()
    };
    let (e, o) = (part(0), part(1));
    let total = prob.energy(&u).unwrap().total;
    let split = prob.energy(&e).unwrap().total + prob.energy(&o).unwrap().total;
    assert!((total - split).abs() < 1e-12 * total.abs().max(1.0));
}

// ---------------------------------------------------------------- Palais–Smale

#[test]
fn ps_bound_along_solver_iterates() {
    let prob = surrogate();
    let v0 = gaussian(*prob.grid());
    let out = mountain_pass_solve(&v0, &prob, &SolverOptions::default()).unwrap();
    let report = ps_diagnostics(&out.history, &prob).unwrap();
    assert!(report.entries.len() > 10);
    assert!(report.passed() && report.min_slack > 0.0);
}

#[test]
fn ps_bound_trivial_and_diverging() {
    let prob = surrogate();
    let grid = *prob.grid();
    let zeros: Vec<(ComplexField, f64)> = (0..5).map(|_| (ComplexField::zeros(grid), 0.0)).collect();
    assert!(ps_diagnostics(&zeros, &prob).unwrap().passed());
    let v = gaussian(grid);
    let diverging: Vec<(ComplexField, f64)> = (0..8).map(|n| (v.scale(4f64.powi(n)), 1.0)).collect();
    let report = ps_diagnostics(&diverging, &prob).unwrap();
    assert!(!report.passed());
    assert!(report.entries.last().unwrap().violated);
}
