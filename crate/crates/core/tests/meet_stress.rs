use rrank::exactlin::Field;
use rrank::meetrank::meet_decompose;
use rrank::partitions::Subset;
use rrank::sample::{add_null_pair, planted_pair, random_family, rng};
use rrank::tensor::Shape;

#[test]
fn random_planted_meets_verify() {
    let mut r = rng(11);
    for (case, field) in [Field::Rational, Field::prime(3).unwrap(), Field::prime(2).unwrap()].into_iter().cycle().take(60).enumerate() {
        let d = 3 + case % 2;
        let g = Subset::full(d);
        let shape = Shape::uniform(g, 2).unwrap();
        let r1 = random_family(g, 3, true, &mut r);
        let r2 = random_family(g, 3, true, &mut r);
        let (t, d1, d2) = planted_pair(&r1, &r2, &shape, field, 3, &mut r);
        let d1 = add_null_pair(&d1, &mut r);
        let (out, trace) = meet_decompose(&t, &d1, &d2).unwrap();
        assert!(out.verify(&t));
        assert!(trace.measure_decreases() && trace.tau_within_bounds() && trace.lengths_within_claims());
    }
}
