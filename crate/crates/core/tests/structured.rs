use qinstr::bounds::{full_report, measurement_data};
use qinstr::entropy::vn_entropy;
use qinstr::scenarios::{
    example_a_ensemble, random_commuting_ensemble, random_ensemble, random_unitary, rank_one_scenario, rng_for,
    two_level_example_a, two_level_example_b, von_neumann_scenario,
};
use qinstr::C64;

#[test]
fn commuting_letters_collapse_the_chain() {
    for seed in 0..20 {
        let e = random_commuting_ensemble(&mut rng_for(seed, 0), 2 + seed as usize % 2, 3);
        let s = von_neumann_scenario(e).unwrap();
        let r = full_report(&s.ensemble, &s.instrument).unwrap();
        let h = r.hall.as_ref().unwrap();
        for v in [r.b_sww, h.b_nub, r.b_hlv, r.b1, h.b2, h.b_nlb] {
            assert!((v - r.i_c).abs() < 1e-9, "seed {seed}: {v} vs {}", r.i_c);
        }
        assert!(h.b_hall >= r.i_c - 1e-9 && h.b_scu <= r.i_c + 1e-9);
    }
}

#[test]
fn rank_one_instrument_collapses_upper_bounds() {
    for seed in 0..10 {
        let mut rng = rng_for(seed, 0);
        let d = 2 + seed as usize % 2;
        let psi = random_unitary(&mut rng, d);
        let target = random_unitary(&mut rng, d);
        // outcome w maps psi(w) to two orthogonal vectors with weights 0.3, 0.7
        let phi: Vec<Vec<Vec<C64>>> = (0..d)
            .map(|w| {
                let a = target.column(w);
                let b = target.column((w + 1) % d);
                vec![a.iter().map(|z| z * 0.3f64.sqrt()).collect(), b.iter().map(|z| z * 0.7f64.sqrt()).collect()]
            })
            .collect();
        let kets: Vec<Vec<C64>> = (0..d).map(|w| psi.column(w)).collect();
        let e = random_ensemble(&mut rng, d, 3);
        let s = rank_one_scenario(&vec![1.0; d], &kets, &phi, e).unwrap();
        let r = full_report(&s.ensemble, &s.instrument).unwrap();
        let h = r.hall.as_ref().unwrap();
        assert!((r.b_sww - r.b_hlv).abs() < 1e-9 && (h.b_nub - r.b_hlv).abs() < 1e-9);
        assert!(r.b_hlv <= h.b_hall + 1e-9);
        assert!((h.b_hall - vn_entropy(&s.ensemble.average())).abs() < 1e-9);
    }
}

#[test]
fn example_b_probabilities() {
    for x in [0.25f64, 1.0, 3.0] {
        let q = (-x).exp();
        let s = two_level_example_b(x).unwrap();
        let m = measurement_data(&s.ensemble, &s.instrument).unwrap().marginals;
        assert!((m.row_given_col[1][0] - 16.0 / 477.0).abs() < 1e-12);
        assert!((m.cols.weights()[0] - (147.0 + 53.0 * q) / 200.0).abs() < 1e-12);
        assert!((m.col_given_row[1][0] - (539.0 + 461.0 * q) / 1000.0).abs() < 1e-12);
    }
}

#[test]
fn example_a_bound_relations_on_grid() {
    for k in 1..=20 {
        let x = 0.25 * k as f64;
        let s = two_level_example_a(x).unwrap();
        let r = full_report(&s.ensemble, &s.instrument).unwrap();
        let h = r.hall.as_ref().unwrap();
        assert!((h.b_nub - h.b_hall).abs() < 1e-9 && (r.b_sww - h.b_hall).abs() < 1e-9);
        assert!((h.b2 - h.b_scu).abs() < 1e-9);
        assert!(r.b1 < 0.0, "x {x}: b1 {}", r.b1);
    }
}

#[test]
fn eigenprojections_of_average_are_uninformative_for_examples() {
    let e = example_a_ensemble();
    let s = von_neumann_scenario(e).unwrap();
    assert!(full_report(&s.ensemble, &s.instrument).unwrap().i_c < 1e-12);
}
