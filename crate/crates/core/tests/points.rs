use drbgdisc::drbg::{Generator, Mechanism, Seed};
use drbgdisc::points::{
    bits_required, bits_to_points, generate_points, parse_points, round_to_precision, round_values, write_points,
    PointSet, Precision, WriteOptions,
};
use proptest::prelude::*;

fn arb_points() -> impl Strategy<Value = PointSet> {
    (1usize..5, 1usize..20, 1u32..=52).prop_flat_map(|(d, n, p)| {
        prop::collection::vec(0u64..(1u64 << p), d * n)
            .prop_map(move |num| PointSet::from_numerators(d, Precision::new(p).unwrap(), num).unwrap())
    })
}

proptest! {
    #[test]
    fn file_round_trip(ps in arb_points(), decimal in any::<bool>()) {
        let mut buf = Vec::new();
        write_points(&ps, &mut buf, WriteOptions { decimal }).unwrap();
        let back = parse_points(std::str::from_utf8(&buf).unwrap()).unwrap();
        prop_assert_eq!(back.numerators(), ps.numerators());
        prop_assert_eq!(back.dim(), ps.dim());
        prop_assert_eq!(back.precision(), ps.precision());
    }

    #[test]
    fn rounding_moves_each_coordinate_down_by_less_than_one_step(ps in arb_points(), to in 1u32..=52) {
        let to = to.min(ps.precision().bits());
        let r = round_to_precision(&ps, Precision::new(to).unwrap());
        let step = (-(to as f64)).exp2();
        for (a, b) in ps.to_f64().iter().zip(r.to_f64()) {
            prop_assert!(b <= *a && *a - b < step);
        }
    }

    #[test]
    fn round_values_matches_floor(values in prop::collection::vec(0.0f64..1.0, 1..40), p in 1u32..=52) {
        let ps = round_values(1, &values, Precision::new(p).unwrap()).unwrap();
        let scale = (p as f64).exp2();
        for (x, k) in values.iter().zip(ps.numerators()) {
            prop_assert_eq!(*k, (x * scale).floor() as u64);
        }
    }
}

#[test]
fn coordinates_are_consecutive_stream_fields() {
    let seed = Seed::from_bytes(vec![7; 48]);
    let (d, n, p) = (3, 11, 13);
    let prec = Precision::new(p).unwrap();
    let stream = Generator::instantiate(Mechanism::CtrDrbg256, &seed)
        .unwrap()
        .generate_bits(bits_required(d, n, prec))
        .unwrap();
    let ps = generate_points(&mut Generator::instantiate(Mechanism::CtrDrbg256, &seed).unwrap(), d, n, prec).unwrap();
    for i in 0..n {
        for j in 0..d {
            assert_eq!(ps.numerator(i, j), stream.read_bits((i * d + j) * p as usize, p));
        }
    }
    assert_eq!(bits_to_points(&stream, d, n, prec).unwrap().numerators(), ps.numerators());
    let prov = ps.provenance().unwrap();
    assert_eq!(prov.mechanism, "ctr-drbg-256");
    assert_eq!(prov.seed_bits, 384);
}

#[test]
fn generated_prefix_is_prefix_of_larger_set() {
    let seed = Seed::from_bytes(vec![3; 48]);
    let prec = Precision::DEFAULT;
    let big = generate_points(&mut Generator::instantiate(Mechanism::CtrDrbg256, &seed).unwrap(), 4, 50, prec).unwrap();
    let small = generate_points(&mut Generator::instantiate(Mechanism::CtrDrbg256, &seed).unwrap(), 4, 17, prec).unwrap();
    assert_eq!(big.prefix(17).numerators(), small.numerators());
}

#[test]
fn malformed_files_report_line_numbers() {
    let text = "# d=2 N=2 p=4\n1 2\n3\n";
    let err = parse_points(text).unwrap_err().to_string();
    assert!(err.starts_with("line 3"), "{err}");
    let text = "# d=1 N=1 p=4\n1.0\n";
    assert!(parse_points(text).unwrap_err().to_string().starts_with("line 2"));
}
