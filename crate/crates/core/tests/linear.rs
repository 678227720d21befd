use deadneuron::linear::{dot, maximize_linear, solve_linear, Constraint, LpOptions, LpResult};
use deadneuron::rng::stream_rng;
use proptest::prelude::*;
use rand::Rng;

fn coeff() -> impl Strategy<Value = f64> {
    -5.0..5.0f64
}

/// Feasible point, rows `(a, offset)` and objective.
type Problem = (Vec<f64>, Vec<(Vec<f64>, f64)>, Vec<f64>);

/// Constraint rows with a known feasible point, so the feasible set is non-empty.
fn feasible_problem(n: usize, k: usize) -> impl Strategy<Value = Problem> {
    (
        prop::collection::vec(coeff(), n),
        prop::collection::vec((prop::collection::vec(coeff(), n), 0.0..3.0f64), k),
        prop::collection::vec(coeff(), n),
    )
        .prop_map(|(x0, rows, objective)| {
            // shift each offset so that x0 satisfies the row with slack s
            let rows = rows
                .into_iter()
                .map(|(a, s)| {
                    let offset = s - dot(&a, &x0);
                    (a, offset)
                })
                .collect();
            (x0, rows, objective)
        })
}

fn with_box(rows: &[(Vec<f64>, f64)], n: usize, half: f64) -> Vec<Constraint<f64>> {
    let mut cs: Vec<Constraint<f64>> = rows
        .iter()
        .map(|(a, b)| Constraint::at_least_zero(a.clone(), *b))
        .collect();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        cs.push(Constraint::at_most_zero(e.clone(), -half));
        cs.push(Constraint::at_least_zero(e, half));
    }
    cs
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bounded_optimum_dominates_feasible_points(
        (x0, rows, objective) in (1usize..=4, 1usize..=8).prop_flat_map(|(n, k)| feasible_problem(n, k)),
        seed in any::<u64>(),
    ) {
        let n = objective.len();
        let half = 20.0;
        prop_assume!(x0.iter().all(|v| v.abs() < half));
        let cs = with_box(&rows, n, half);
        let r = maximize_linear(&objective, &cs, &LpOptions::default()).unwrap();
        let LpResult::Bounded { optimum, argmax } = r else {
            panic!("boxed feasible problem must be bounded: {r:?}");
        };
        prop_assert!(cs.iter().all(|c| c.slack(&argmax) >= -1e-7));
        prop_assert!((dot(&objective, &argmax) - optimum).abs() <= 1e-7 * (1.0 + optimum.abs()));
        prop_assert!(dot(&objective, &x0) <= optimum + 1e-7);
        // random feasible points from rejection sampling in the box
        let mut rng = stream_rng(seed, 0);
        let mut found = 0;
        for _ in 0..20_000 {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-half..half)).collect();
            if cs.iter().all(|c| c.slack(&x) >= 0.0) {
                found += 1;
                prop_assert!(dot(&objective, &x) <= optimum + 1e-7);
                if found == 1000 {
                    break;
                }
            }
        }
    }

    #[test]
    fn unbounded_rays_are_certificates(
        (x0, rows, objective) in (1usize..=4, 1usize..=5).prop_flat_map(|(n, k)| feasible_problem(n, k)),
    ) {
        let cs: Vec<Constraint<f64>> = rows.iter().map(|(a, b)| Constraint::at_least_zero(a.clone(), *b)).collect();
        match maximize_linear(&objective, &cs, &LpOptions::default()).unwrap() {
            LpResult::Unbounded { ray } => {
                prop_assert!(dot(&objective, &ray) > 1e-9);
                prop_assert!(cs.iter().all(|c| c.directional_slack(&ray) >= -1e-9));
            }
            LpResult::Bounded { optimum, .. } => prop_assert!(dot(&objective, &x0) <= optimum + 1e-7),
            LpResult::Infeasible => prop_assert!(false, "x0 is feasible"),
        }
    }

    #[test]
    fn solve_round_trip(n in 1usize..=6, entries in prop::collection::vec(coeff(), 36), rhs in prop::collection::vec(coeff(), 6)) {
        let m: Vec<Vec<f64>> = (0..n).map(|i| entries[i * 6..i * 6 + n].to_vec()).collect();
        let rhs = &rhs[..n];
        if let Ok(x) = solve_linear(&m, rhs, 1e-9) {
            let scale = 1.0 + rhs.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let cond_guard = x.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
            for (row, b) in m.iter().zip(rhs) {
                prop_assert!((dot(row, &x) - b).abs() <= 1e-8 * scale * cond_guard);
            }
        }
    }
}

#[test]
fn triangle_lp_matches_vertex_enumeration() {
    // maximize -x - y over x >= 1, y >= 1, x + y <= 3
    let cs = vec![
        Constraint::at_least_zero(vec![1.0, 0.0], -1.0),
        Constraint::at_least_zero(vec![0.0, 1.0], -1.0),
        Constraint::at_least_zero(vec![-1.0, -1.0], 3.0),
    ];
    let vertices = [[1.0, 1.0], [1.0, 2.0], [2.0, 1.0]];
    let best = vertices
        .iter()
        .map(|v| -v[0] - v[1])
        .fold(f64::NEG_INFINITY, f64::max);
    match maximize_linear(&[-1.0, -1.0], &cs, &LpOptions::default()).unwrap() {
        LpResult::Bounded { optimum, argmax } => {
            assert!((optimum - best).abs() < 1e-12);
            assert!((argmax[0] - 1.0).abs() < 1e-12 && (argmax[1] - 1.0).abs() < 1e-12);
        }
        other => panic!("{other:?}"),
    }
}
