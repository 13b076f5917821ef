use super::*;
use crate::laxrep::EntryName;
use crate::linalg::norm;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn config(z: &[f64]) -> ModelConfig {
    let z = z.iter().map(|&x| c(x, 0.0)).collect();
    ModelConfig::new(c(0.11, 0.0), c(0.0, 0.8), z, c(0.0, 0.0)).unwrap()
}

const QS: [C64; 3] = [C64::new(0.31, 0.05), C64::new(0.47, -0.02), C64::new(0.23, 0.08)];

#[test]
fn single_site_root() {
    let cfg = config(&[0.0]);
    let sol = solve_bethe(&cfg, None, &SolverOptions::default()).unwrap();
    assert!((sol.roots[0] - c(0.61, 0.0)).norm() < 1e-9, "{:?}", sol.roots);
    let qs = [QS[0], QS[1], QS[2], c(0.11, -0.04), c(0.62, 0.03)];
    for u in [c(0.13, 0.02), c(-0.27, 0.04), c(0.38, -0.06)] {
        assert!(eigen_check(u, &sol.roots, &cfg, &qs).unwrap() < 1e-9);
    }
}

#[test]
fn two_site_roots_are_eigenvectors() {
    let cfg = config(&[0.0, 0.3]);
    let sol = solve_bethe(&cfg, None, &SolverOptions::default()).unwrap();
    assert!(sol.residual_norm < 1e-12);
    for u in [c(0.13, 0.02), c(-0.21, 0.05)] {
        let r = eigen_check(u, &sol.roots, &cfg, &QS).unwrap();
        assert!(r < 1e-8, "{r}");
        let lg = lambda_general(&cfg, QS[0], u, &sol.roots).unwrap();
        assert!((lg - lambda_eigenvalue(u, &sol.roots, &cfg).unwrap()).norm() < 1e-8);
    }
}

#[test]
fn known_two_site_solution() {
    let cfg = config(&[0.0, 0.3]);
    let roots = [c(0.03453818, 0.29036506), c(0.48546182, -0.29036506)];
    let sol = solve_bethe(&cfg, Some(&roots), &SolverOptions::default()).unwrap();
    assert_eq!(sol.restart, 0);
    for (a, b) in sol.roots.iter().zip(roots) {
        assert!((a - b).norm() < 1e-7);
    }
}

#[test]
fn literal_forms_fail_on_solutions() {
    let cfg = config(&[0.0, 0.3]);
    let sol = solve_bethe(&cfg, None, &SolverOptions::default()).unwrap();
    let lit = bethe_residuals_with(&sol.roots, &cfg, BetheForm::Literal).unwrap();
    assert!(lit.iter().map(|x| x.norm()).fold(0.0, f64::max) > 1e-3);
    let u = c(0.13, 0.02);
    let l = lambda_eigenvalue_with(u, &sol.roots, &cfg, LambdaForm::Literal).unwrap();
    assert!(eigen_check_against(u, &sol.roots, &cfg, &QS, l).unwrap() > 1e-3);
}

#[test]
fn unsolved_roots_are_not_eigenvectors() {
    let cfg = config(&[0.0, 0.3]);
    let roots = [c(0.2, 0.1), c(0.45, -0.07)];
    assert!(eigen_check(c(0.13, 0.02), &roots, &cfg, &QS).unwrap() > 1e-3);
}

#[test]
fn lowering_operators_annihilate_vacuum() {
    let cfg = config(&[0.0, 0.3]);
    let vac = pseudovacuum(&cfg);
    for name in [EntryName::C1, EntryName::C2, EntryName::C3] {
        let v = cfg.entry(name, c(0.17, 0.03)).apply(&vac, QS[0]).unwrap();
        assert!(norm(&v) < 1e-13);
    }
    let u = c(0.17, 0.03);
    let a1v = cfg.entry(EntryName::A1, u).apply(&vac, QS[0]).unwrap();
    let expect = a1(&cfg, u).unwrap() * gauge_f(&cfg, QS[0] - 2.0 * cfg.eta()).unwrap();
    assert!((a1v[0] - expect).norm() < 1e-12 * expect.norm());
    assert!((a1_literal(&cfg, u).unwrap() - a1(&cfg, u).unwrap()).norm() > 1e-3);
}

#[test]
fn creation_operator_adjacent_swaps() {
    for (z, u) in [
        (vec![0.0, 0.3], vec![c(0.12, 0.03), c(-0.21, 0.05)]),
        (vec![0.0, 0.3, 0.55], vec![c(0.12, 0.03), c(-0.21, 0.05), c(0.33, -0.04)]),
    ] {
        let cfg = config(&z);
        for q in QS {
            let v = bethe_vector(&u, &cfg).unwrap().eval(q).unwrap();
            for i in 0..u.len() - 1 {
                let mut w = u.clone();
                w.swap(i, i + 1);
                let om = cfg.couplings().ratio_omega(u[i + 1] - u[i]).unwrap();
                let vw = bethe_vector(&w, &cfg).unwrap().eval(q).unwrap().mapv(|x| x * om);
                assert!(crate::linalg::rel_vector_diff(&v, &vw) < 1e-9);
            }
        }
    }
}

#[test]
fn bethe_vector_has_zero_weight() {
    let cfg = config(&[0.0, 0.3]);
    let v = bethe_vector(&[c(0.12, 0.03), c(-0.21, 0.05)], &cfg).unwrap().eval(QS[1]).unwrap();
    let space = cfg.rep().space();
    for (i, x) in v.iter().enumerate() {
        if space.weight(i) != 0 {
            assert_eq!(*x, c(0.0, 0.0));
        }
    }
}

#[test]
fn creation_operator_lowers_weight() {
    let cfg = config(&[0.0, 0.3]);
    let u = [c(0.12, 0.03), c(-0.21, 0.05)];
    assert_eq!(creation_phi(2, &u, &cfg).unwrap().weight_change(), Some(-2));
    assert!(matches!(
        creation_phi(2, &[u[0], u[0]], &cfg),
        Err(Error::RootCollision { .. })
    ));
}

#[test]
fn duplicate_guesses_are_rejected() {
    let cfg = config(&[0.0, 0.3]);
    let g = [c(0.1, 0.0), c(0.1, 0.0)];
    assert!(matches!(
        solve_bethe(&cfg, Some(&g), &SolverOptions::default()),
        Err(Error::RootCollision { .. })
    ));
}

#[test]
fn coincident_sites_are_rejected() {
    let z = vec![c(0.1, 0.0), c(0.1, 0.0)];
    assert!(ModelConfig::new(c(0.11, 0.0), c(0.0, 0.8), z, c(0.0, 0.0)).is_err());
}
