use calmix_core::{
    nonrejection_via_signed, operating_characteristics, ordering_probe, power_table, tsq_critical,
    CdfEval, OrderingFamily, QuadSpec, TsqMixture,
};

fn q() -> QuadSpec {
    QuadSpec::default()
}

fn close(a: f64, b: f64, tol: f64, what: &str) {
    assert!((a - b).abs() <= tol, "{what}: {a} vs {b} (tol {tol})");
}

const DELTAS: [f64; 4] = [0.0, 1.0, 4.0, 9.0];
const LAMBDAS: [f64; 3] = [1.0, 4.0, 9.0];
const REFERENCE: [[f64; 3]; 4] = [
    [0.950, 0.950, 0.950],
    [0.691, 0.863, 0.928],
    [0.485, 0.742, 0.876],
    [0.329, 0.608, 0.799],
];

#[test]
fn critical_value_by_inverting_null_mixture() {
    let c = tsq_critical(10.0, 0.05).unwrap();
    close(c, 4.9646, 5e-5, "reference");
    let inverted = TsqMixture::new(10.0, 0.0, 7.0, q())
        .unwrap()
        .quantile(0.95)
        .unwrap();
    close(inverted, c, 1e-6 * c, "inverted");
}

#[test]
fn nonrejection_grid() {
    let table = power_table(10.0, &DELTAS, &LAMBDAS, 0.05, &q()).unwrap();
    for (row, reference) in table.iter().zip(REFERENCE) {
        for (cell, p) in row.iter().zip(reference) {
            close(cell.nonrejection_prob, p, 5e-3, "cell");
            close(
                cell.nonrejection_prob + cell.rejection_prob,
                1.0,
                1e-15,
                "complement",
            );
        }
    }
}

#[test]
fn squared_and_signed_routes_agree() {
    for &d in &DELTAS {
        for &l in &LAMBDAS {
            let a = operating_characteristics(10.0, d, l, 0.05, &q())
                .unwrap()
                .nonrejection_prob;
            let b = nonrejection_via_signed(10.0, d, l, 0.05, &q()).unwrap();
            close(a, b, 1e-8, "routes");
        }
    }
}

#[test]
fn octane_operating_characteristic() {
    let c = operating_characteristics(10.0, 2.9351, 10.0953, 0.05, &q()).unwrap();
    close(c.nonrejection_prob, 0.90, 5e-3, "octane");
}

#[test]
fn orderings_follow_the_table() {
    let u_grid = [2.0, 4.9646, 10.0, 20.0];
    let r = ordering_probe(
        OrderingFamily::TsqInLambda {
            nu: 10.0,
            delta: 1.0,
        },
        &LAMBDAS,
        &u_grid,
        &q(),
    )
    .unwrap();
    assert!(r.holds_strictly(), "{r:?}");
    let r = ordering_probe(
        OrderingFamily::TsqInDelta {
            nu: 10.0,
            lambda: 4.0,
        },
        &DELTAS,
        &u_grid,
        &q(),
    )
    .unwrap();
    assert!(r.holds_strictly(), "{r:?}");
    let r = ordering_probe(
        OrderingFamily::VarianceInLambda { nu: 10.0 },
        &LAMBDAS,
        &[5.0, 20.0, 60.0],
        &q(),
    )
    .unwrap();
    assert!(r.holds_strictly(), "{r:?}");
    assert!(r.cdf[0][1] > r.cdf[1][1] && r.cdf[1][1] > r.cdf[2][1]);
}

#[test]
fn central_family_is_flat_not_strict() {
    let r = ordering_probe(
        OrderingFamily::TsqInLambda {
            nu: 5.0,
            delta: 0.0,
        },
        &[0.5, 3.0, 8.0],
        &[3.0],
        &q(),
    )
    .unwrap();
    assert!(r.holds(1e-12));
    assert!(!r.holds_strictly());
    assert!(r.max_violation.abs() < 1e-12);
}
