//! Values computed independently (scipy HiGHS for the LPs, an unmemoized
//! branch recursion for the error probabilities) and frozen here.

use qxor_core::{approx_l1, exact_error, BitVector, BooleanFunction, Family, RealFunction};

fn and2() -> BooleanFunction {
    Family::And.build(2).unwrap()
}

fn maj3() -> BooleanFunction {
    BooleanFunction::from_fn(3, |z| if z.weight() >= 2 { -1 } else { 1 }).unwrap()
}

#[test]
fn approximate_l1_norms() {
    let cases: [(BooleanFunction, f64, f64); 7] = [
        (and2(), 0.0, 2.0),
        (and2(), 0.1, 1.8),
        (and2(), 0.25, 1.5),
        (maj3(), 0.0, 2.0),
        (maj3(), 0.1, 1.8),
        (Family::HammingLe(1).build(6).unwrap(), 0.0, 4.9375),
        (Family::HammingLe(1).build(6).unwrap(), 2f64.powi(-11), 4.9344482421875),
    ];
    for (f, eps, want) in cases {
        let got = approx_l1(&f, eps).unwrap().value;
        assert!((got - want).abs() < 1e-7, "eps {eps}: {got} vs {want}");
    }
}

#[test]
fn perturbed_and2_errors() {
    let g = RealFunction::new(2, vec![1.0, 1.0, 1.0, -0.95]).unwrap();
    let want = [
        0.00024279378471381285,
        0.00024279378471370183,
        0.00024279378471370183,
        0.0002448728362876018,
    ];
    for (z, w) in BitVector::all(2).zip(want) {
        let r = exact_error(&and2(), &g, z).unwrap();
        assert!((r.exact_error - w).abs() < 1e-12, "z={z}: {} vs {w}", r.exact_error);
        assert!(r.exact_error <= r.bound);
    }
}

#[test]
fn perturbed_majority_errors() {
    let f = maj3();
    let g = RealFunction::new(
        3,
        f.values()
            .iter()
            .enumerate()
            .map(|(i, &v)| f64::from(v) * (1.0 - 0.01 * ((i * 7) % 5) as f64 / 4.0))
            .collect(),
    )
    .unwrap();
    let want = [
        8.887250733224938e-06,
        8.865442546635016e-06,
        8.86742510908256e-06,
        8.885268170666372e-06,
        8.869407671530105e-06,
        8.88725073333596e-06,
        8.889233295672483e-06,
        8.86742510908256e-06,
    ];
    for (z, w) in BitVector::all(3).zip(want) {
        let r = exact_error(&f, &g, z).unwrap();
        assert!((r.eps - 0.01).abs() < 1e-15);
        assert!((r.exact_error - w).abs() < 1e-12, "z={z}: {} vs {w}", r.exact_error);
    }
}
