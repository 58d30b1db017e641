mod common;

use blockstep::dirk::*;
use blockstep::krylov::{ConvergenceMode, PreconditionerKind, SolveSettings, SolverKind};
use blockstep::problems::*;
use common::*;
use proptest::prelude::*;
use rand::Rng;

fn f_of(p: &dyn ProblemOps, t: f64, y: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; y.len()];
    p.apply_f(t, y, &mut out);
    out
}

#[test]
fn convdiff_flux_balance_matches_boundary_flux() {
    let p = ConvDiff::new(
        12,
        9,
        ConvDiffData {
            diffusion: 0.03,
            velocity: [0.7, -1.3],
            reaction: 0.4,
            inflow: InflowProfile::Pulsating,
        },
    )
    .unwrap();
    let mut r = rng(3);
    let u: Vec<f64> = (0..p.size()).map(|_| r.gen_range(-1.0..1.0)).collect();
    for t in [0.0, 0.3, 1.1] {
        let total: f64 = f_of(&p, t, &u).iter().sum();
        let vol = p.grid.hx() * p.grid.hy();
        let expect = p.boundary_flux(t, &u) + 0.4 * vol * u.iter().sum::<f64>();
        assert!((total - expect).abs() < 1e-12, "{total} vs {expect}");
    }
}

#[test]
fn convdiff_pure_convection_matches_hand_stencil() {
    let n = 4;
    let p = ConvDiff::new(
        n,
        n,
        ConvDiffData {
            diffusion: 0.0,
            velocity: [1.0, -0.5],
            reaction: 0.0,
            inflow: InflowProfile::Zero,
        },
    )
    .unwrap();
    let h = 0.25;
    let k = dense(p.stiffness_matrix());
    for j in 0..n {
        for i in 0..n {
            let c = j * n + i;
            let mut row = vec![0.0; n * n];
            // outflow through east (bx = 1) and south (by = -0.5); inflow from west and north
            row[c] = h + 0.5 * h;
            if i > 0 {
                row[c - 1] = -h;
            }
            if j + 1 < n {
                row[c + n] = -0.5 * h;
            }
            assert!(max_abs_diff(&k[c], &row) < 1e-15, "cell {i},{j}");
        }
    }
}

#[test]
fn convdiff_constant_state_has_zero_interior_flux() {
    let p = ConvDiff::new(
        8,
        8,
        ConvDiffData {
            diffusion: 1.0,
            velocity: [0.0, 0.0],
            reaction: 0.0,
            inflow: InflowProfile::Zero,
        },
    )
    .unwrap();
    let f = f_of(&p, 0.0, &vec![2.5; 64]);
    for j in 0..8 {
        for i in 0..8 {
            if i > 0 && j < 7 {
                assert!(f[j * 8 + i].abs() < 1e-13);
            }
        }
    }
}

#[test]
fn convdiff_inflow_profile() {
    let n = 16;
    let p = ConvDiff::benchmark(n, n).unwrap();
    let t = 0.5;
    let g = (2.0f64 * t).sin().abs();
    let mut b = vec![0.0; n * n];
    p.rhs(t, &mut b);
    let h = 1.0 / n as f64;
    for j in 0..n {
        let y = (j as f64 + 0.5) * h;
        let expect = if y > 0.25 && y < 0.75 + g / 4.0 {
            (1e-10 / (h / 2.0) + 1.0) * h * g
        } else {
            0.0
        };
        assert!((b[j * n] - expect).abs() < 1e-15);
        for i in 1..n {
            assert_eq!(b[j * n + i], 0.0);
        }
    }
    let mut b0 = vec![1.0; n * n];
    p.rhs(0.0, &mut b0);
    assert!(b0.iter().all(|&v| v == 0.0));
    assert_eq!(p.mass().diagonal(), vec![h * h; n * n]);
}

#[test]
fn q1_mass_integrates_constants() {
    let sp = Q1Space::new(StructuredGrid::new(7, 5, 2.0, 3.0).unwrap());
    let m = sp.mass_matrix();
    let ones = vec![1.0; sp.n_dofs()];
    let row_sums = m.spmv(&ones).unwrap();
    let total: f64 = row_sums.iter().sum();
    assert!((total - 6.0).abs() < 1e-12);
    assert!(max_abs_diff(&row_sums, &sp.lumped_mass()) < 1e-14);
    assert!(m.asymmetry() < 1e-15);
    // interior vertex: four elements of area hx·hy, each contributing hx·hy/4
    let (hx, hy) = (2.0 / 7.0, 3.0 / 5.0);
    let v = sp.grid.vertex(3, 2);
    assert!((row_sums[v] - hx * hy).abs() < 1e-14);
    // exact element mass entries: hx·hy·(4, 2, 2, 1)/36
    assert!((m.get(v, v) - 4.0 * 4.0 * hx * hy / 36.0).abs() < 1e-14);
    assert!((m.get(v, v + 1) - 2.0 * 2.0 * hx * hy / 36.0).abs() < 1e-14);
}

#[test]
fn q1_gradients_reproduce_linear_functions() {
    let sp = Q1Space::new(StructuredGrid::new(3, 4, 1.5, 2.0).unwrap());
    let u: Vec<f64> = (0..sp.n_dofs())
        .map(|v| {
            let (i, j) = sp.grid.vertex_ij(v);
            let (x, y) = sp.grid.vertex_coords(i, j);
            2.0 * x - 3.0 * y + 1.0
        })
        .collect();
    let loc = sp.gather(&u, &sp.element_nodes(1, 2));
    for q in 0..4 {
        let (v, g) = sp.eval(&loc, q);
        let (x, y) = sp.point(1, 2, q);
        assert!((v - (2.0 * x - 3.0 * y + 1.0)).abs() < 1e-13);
        assert!((g[0] - 2.0).abs() < 1e-12 && (g[1] + 3.0).abs() < 1e-12);
    }
}

#[test]
fn diffreact_jacobian_matches_finite_differences() {
    let p = DiffReact::benchmark(8, 8).unwrap();
    let mut r = rng(11);
    let u: Vec<f64> = (0..p.size()).map(|_| r.gen_range(0.2..0.8)).collect();
    let t = 0.37;
    let j = dense(&p.stiffness(t, &u));
    let f0 = f_of(&p, t, &u);
    let eps = 1e-7;
    let mut worst: f64 = 0.0;
    let scale = j.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
    for c in 0..p.size() {
        let mut up = u.clone();
        up[c] += eps;
        let mut um = u.clone();
        um[c] -= eps;
        let fp = f_of(&p, t, &up);
        let fm = f_of(&p, t, &um);
        for i in 0..p.size() {
            let fd = (fp[i] - fm[i]) / (2.0 * eps);
            worst = worst.max((fd - j[i][c]).abs());
        }
        let _ = &f0;
    }
    assert!(worst / scale < 1e-5, "relative Jacobian error {}", worst / scale);
}

#[test]
fn diffreact_degenerate_states_leave_only_reaction() {
    let p = DiffReact::benchmark(6, 6).unwrap();
    let m = p.mass();
    for (u, sign) in [(0.0, 1.0), (1.0, -1.0)] {
        let j = p.stiffness(0.0, &vec![u; p.size()]);
        let expect = m.scaled(sign);
        assert!(max_abs_diff(&j.to_dense(), &expect.to_dense()) < 1e-14);
    }
}

#[test]
fn diffreact_jacobian_symmetric_at_constant_state() {
    let p = DiffReact::benchmark(9, 9).unwrap();
    let j = p.stiffness(0.0, &vec![0.3; p.size()]);
    assert!(j.asymmetry() < 1e-14);
    // with a gradient present the diffusion block alone stays symmetric
    let u: Vec<f64> = (0..p.size()).map(|v| 0.2 + 0.5 * (v as f64 / p.size() as f64)).collect();
    let sp = &p.space;
    let diff = sp.assemble_matrix(|ex, ey, local| {
        let loc = sp.gather(&u, &sp.element_nodes(ex, ey));
        for q in 0..4 {
            let (v, _) = sp.eval(&loc, q);
            for a in 0..4 {
                for b in 0..4 {
                    let (ga, gb) = (sp.grad[q][a], sp.grad[q][b]);
                    local[a][b] += sp.weight * p.diffusion(v).0 * (ga[0] * gb[0] + ga[1] * gb[1]);
                }
            }
        }
    });
    assert!(diff.asymmetry() < 1e-14);
}

#[test]
fn diffreact_source_integral() {
    let p = DiffReact::benchmark(64, 64).unwrap();
    let exact = -0.1 * std::f64::consts::PI * 0.01;
    for t in [0.0, 0.4, 1.3] {
        let mut b = vec![0.0; p.size()];
        p.rhs(t, &mut b);
        let total: f64 = b.iter().sum();
        assert!((total - exact).abs() < 2e-3 * exact.abs(), "t={t}: {total} vs {exact}");
    }
    let (cx, cy) = p.source_center(0.0);
    assert_eq!((cx, cy), (0.75, 0.5));
    assert_eq!(p.source(0.0, 0.75, 0.55), -0.1);
    assert_eq!(p.source(0.0, 0.5, 0.5), 0.0);
}

#[test]
fn van_genuchten_reference_values() {
    let soil = VanGenuchten::silt_loam();
    let cases = [
        (-1.0, 0.3754409600807112682605595, 0.02344167707717515603322298),
        (-0.5, 0.3906090390383111390802508, 0.03527676148261165815633556),
        (-2.0, 0.3321599827975178508395704, 0.01010606564018046078782383),
        (-1e6, 0.1310002879553053797254534, 1.087801794635692549646212e-4),
    ];
    for (psi, theta, k) in cases {
        assert!((soil.theta(psi) - theta).abs() < 1e-14 * theta, "theta({psi})");
        assert!((soil.conductivity(psi) - k).abs() < 1e-12 * k, "K({psi})");
    }
    for psi in [0.0, 0.5, 3.0] {
        assert_eq!(soil.theta(psi), 0.396);
        assert!((soil.conductivity(psi) - 4.96e-2).abs() < 1e-17);
    }
    assert!(soil.theta(-1e12) - 0.131 < 1e-9);
}

#[test]
fn van_genuchten_slope_bounded_by_l() {
    let soil = VanGenuchten::silt_loam();
    let l = RichardsData::default().l;
    let peak = soil.max_dtheta();
    assert!((peak - 0.045014504547628).abs() < 1e-12);
    assert!(peak <= l * 1.001);
    assert!(peak > l);
    let mut worst: f64 = 0.0;
    let mut psi = -20.0;
    while psi < 0.0 {
        let d = (soil.theta(psi + 1e-3) - soil.theta(psi)) / 1e-3;
        worst = worst.max(d);
        psi += 1e-3;
    }
    assert!(worst <= l * 1.001);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]
    #[test]
    fn van_genuchten_monotone_and_bounded(a in -50.0f64..2.0, b in -50.0f64..2.0) {
        let soil = VanGenuchten::silt_loam();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(soil.theta(lo) <= soil.theta(hi));
        prop_assert!(soil.conductivity(lo) <= soil.conductivity(hi));
        prop_assert!(soil.theta(lo) >= 0.131 && soil.theta(hi) <= 0.396);
        let d = soil.dtheta(lo);
        prop_assert!(d >= 0.0 && d <= soil.max_dtheta() * (1.0 + 1e-12));
    }
}

#[test]
fn richards_boundary_data() {
    let p = Richards::benchmark(4, 6).unwrap();
    let g = p.space.grid;
    let top_left = g.vertex(0, 6);
    let top_mid = g.vertex(2, 6);
    let top_right = g.vertex(4, 6);
    let right_low = g.vertex(4, 0);
    let right_z1 = g.vertex(4, 2);
    let right_high = g.vertex(4, 3);
    assert_eq!(p.boundary_value(0.0, top_left), Some(-2.0));
    assert!((p.boundary_value(1.0 / 32.0, top_mid).unwrap() + 0.9).abs() < 1e-15);
    assert_eq!(p.boundary_value(1.0, top_left), Some(0.2));
    assert_eq!(p.boundary_value(0.0, top_right), None);
    assert_eq!(p.boundary_value(0.5, right_low), Some(1.0));
    assert_eq!(p.boundary_value(0.5, right_z1), Some(0.0));
    assert_eq!(p.boundary_value(0.5, right_high), None);
    assert_eq!(p.constrained_dofs().len(), 3 + 3);
    for &d in p.constrained_dofs() {
        assert_eq!(p.mass().get(d, d), 0.0);
        let k = p.stiffness(0.0, &p.initial_state());
        let (cols, vals) = k.row(d);
        for (c, v) in cols.iter().zip(vals) {
            assert_eq!(*v, if *c == d { 1.0 } else { 0.0 });
        }
    }
}

#[test]
fn richards_hydrostatic_state_is_steady() {
    let p = Richards::benchmark(10, 15).unwrap();
    let psi0 = p.initial_state();
    let f = f_of(&p, 0.0, &psi0);
    assert!(max_abs(&f) < 1e-13);
    // once the trench head rises the top boundary rows are no longer satisfied
    let f1 = f_of(&p, 0.01, &psi0);
    assert!(max_abs(&f1) > 0.1);
}

#[test]
fn richards_mass_uses_lumped_water_content() {
    let p = Richards::benchmark(5, 5).unwrap();
    let psi: Vec<f64> = (0..p.size()).map(|v| -0.1 * v as f64).collect();
    let mut out = vec![0.0; p.size()];
    p.apply_mass(&psi, &mut out);
    let lumped = p.space.lumped_mass();
    for v in 0..p.size() {
        let expect = if p.constrained_dofs().contains(&v) {
            0.0
        } else {
            lumped[v] * p.data.soil.theta(psi[v])
        };
        assert!((out[v] - expect).abs() < 1e-15);
    }
    let lm = p.linearized_mass(&psi);
    assert!((lm.get(7, 7) - 4.501e-2 * p.mass().get(7, 7)).abs() < 1e-16);
}

#[test]
fn richards_single_step_converges() {
    let p = Richards::benchmark(10, 15).unwrap();
    let settings = EngineSettings {
        solver: SolverKind::Cg,
        preconditioner: PreconditionerKind::Jacobi,
        inner: SolveSettings::new(1e-8, 2000, ConvergenceMode::AllColumns).unwrap(),
        outer: OuterTolerance::combined(1e-7, 1e-7),
        max_outer: 200,
    };
    let tab = ButcherTableau::implicit_euler();
    let out = pipelined_nonlinear_run(&p, &tab, 1.0 / 96.0, 1, 1, &p.initial_state(), &settings, false, None).unwrap();
    let theta = p.water_content(&out.final_state);
    assert!(theta.iter().all(|&t| (0.131..=0.396).contains(&t)));
    assert!(out.stats.nl_iterations() >= 2);
    let trench = p.space.grid.vertex(0, 15);
    assert!((out.final_state[trench] - p.trench_head(1.0 / 96.0)).abs() < 1e-9);
}

#[test]
fn manufactured_rhs_is_consistent() {
    let p = ManufacturedHeat::new(9).unwrap();
    for t in [0.0, 0.4, 2.0] {
        let f = f_of(&p, t, &p.exact(t));
        // y' = -f  with y = cos(t) v
        let dy: Vec<f64> = p.exact(0.0).iter().map(|v| -t.sin() * v).collect();
        let neg: Vec<f64> = f.iter().map(|v| -v).collect();
        assert!(max_abs_diff(&neg, &dy) < 1e-10);
    }
}

#[test]
fn vtk_output_layout() {
    let dir = tempfile::tempdir().unwrap();
    let g = StructuredGrid::unit_square(3, 2).unwrap();
    let path = dir.path().join("u.vtk");
    let cells = vec![1.5; 6];
    write_vtk(&path, &g, FieldLocation::Cells, &[("u", &cells)]).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# vtk DataFile Version 3.0\n"));
    assert!(text.contains("DIMENSIONS 4 3 1"));
    assert!(text.contains("CELL_DATA 6"));
    assert_eq!(text.lines().filter(|l| l.parse::<f64>().is_ok()).count(), 6);
    assert!(write_vtk(&path, &g, FieldLocation::Vertices, &[("u", &cells)]).is_err());
}
