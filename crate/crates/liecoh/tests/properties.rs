//! Randomized checks of the invariants the pipeline is built on: the
//! complex squares to zero over every coefficient ring, ranks agree across
//! independent algorithms, the arithmetic kernels satisfy their classical
//! identities, and the numerology of the degree tables hangs together.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

use liecoh::cecohomology::{
    build_ce_complex, coadjoint_matrix, invariant_subalgebra, CochainComplex,
};
use liecoh::chevalley::{build_chevalley, ChevalleyAlgebra};
use liecoh::linalg::{Domain, ExactMatrix};
use liecoh::qarith::{cyclotomic, factor_into_cyclotomics, quantum_integer, LaurentPolynomial};
use liecoh::rootdata::{build_root_system, coxeter_threshold, generator_degrees, LieType};
use liecoh::uct::verify_uct;
use liecoh::weylinv::{basic_invariants, mod_decomposables, weyl_group_generators, Poly};

fn named(names: &[&str]) -> Vec<LieType> {
    names.iter().map(|s| s.parse().unwrap()).collect()
}

/// Types small enough to rebuild inside a randomized test.
fn small_type() -> impl Strategy<Value = LieType> {
    prop::sample::select(named(&["A1", "A2", "B2"]))
}

fn listed_type() -> impl Strategy<Value = LieType> {
    prop::sample::select(named(&[
        "A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "B2", "B3", "B4", "C3", "C4", "D4",
        "D5", "E6", "E7", "E8", "F4", "G2",
    ]))
}

fn small_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7, 11, 13])
}

fn coefficient_domain() -> impl Strategy<Value = Domain> {
    prop::sample::select(vec![
        Domain::Rational,
        Domain::Integer,
        Domain::Prime(2),
        Domain::Prime(3),
        Domain::Prime(7),
    ])
}

fn complex_for(t: LieType, domain: Domain) -> (CochainComplex, ChevalleyAlgebra) {
    let rs = build_root_system(t);
    let alg = build_chevalley(&rs).unwrap();
    let cx = build_ce_complex(&alg, domain);
    (cx, alg)
}

/// Dense random integer matrix as (nrows, ncols, row-major entries).
fn integer_matrix() -> impl Strategy<Value = (usize, usize, Vec<i64>)> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(m, n)| {
        prop::collection::vec(-9i64..=9, m * n).prop_map(move |entries| (m, n, entries))
    })
}

fn matrix_from_dense(m: usize, n: usize, entries: &[i64], domain: Domain) -> ExactMatrix {
    let triples = entries.iter().enumerate().filter_map(|(k, &v)| {
        if v == 0 {
            None
        } else {
            Some((k / n, k % n, v))
        }
    });
    ExactMatrix::from_integer_triples(m, n, domain, triples)
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn totient(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn the_differential_squares_to_zero(t in small_type(), domain in coefficient_domain()) {
        let (cx, _) = complex_for(t, domain);
        for n in 0..cx.dim_g() {
            let square = cx.differential(n + 1).multiply(cx.differential(n)).unwrap();
            prop_assert!(square.is_zero(), "d o d != 0 at degree {} for {}", n, t);
        }
    }

    #[test]
    fn the_differential_commutes_with_the_coadjoint_action(
        t in small_type(),
        domain in coefficient_domain(),
        seed in 0usize..64,
    ) {
        let (cx, alg) = complex_for(t, domain);
        let dim = cx.dim_g();
        let generator = seed % dim;
        let n = (seed / dim) % dim;
        let act_n = coadjoint_matrix(&cx, &alg, generator, n);
        let act_next = coadjoint_matrix(&cx, &alg, generator, n + 1);
        let left = cx.differential(n).multiply(&act_n).unwrap();
        let right = act_next.multiply(cx.differential(n)).unwrap();
        prop_assert_eq!(left.to_text(), right.to_text());
    }

    #[test]
    fn rational_betti_numbers_are_palindromic_and_sum_to_two_to_the_rank(t in small_type()) {
        let (cx, _) = complex_for(t, Domain::Rational);
        let betti = cx.betti_numbers().unwrap();
        let dim = cx.dim_g();
        for n in 0..=dim {
            prop_assert_eq!(betti[n], betti[dim - n], "no Poincare symmetry at {} for {}", n, t);
        }
        let total: usize = betti.iter().sum();
        prop_assert_eq!(total, 1usize << t.rank());
    }

    #[test]
    fn invariant_dimensions_match_the_rational_betti_numbers(t in small_type()) {
        let (cx, alg) = complex_for(t, Domain::Rational);
        let betti = cx.betti_numbers().unwrap();
        let invariants = invariant_subalgebra(&cx, &alg).unwrap();
        let dims: Vec<usize> = invariants.iter().map(|layer| layer.len()).collect();
        prop_assert_eq!(dims, betti);
    }

    #[test]
    fn universal_coefficient_counts_hold_at_every_prime(
        t in small_type(),
        p in small_prime(),
    ) {
        let (cx, _) = complex_for(t, Domain::Integer);
        let verdict = verify_uct(&cx, Domain::Prime(p)).unwrap();
        prop_assert!(verdict.pass, "UCT failed for {} at p={}", t, p);
    }

    #[test]
    fn mod_p_betti_numbers_dominate_the_rational_ones(
        t in small_type(),
        p in small_prime(),
    ) {
        let (rational, _) = complex_for(t, Domain::Rational);
        let (modular, _) = complex_for(t, Domain::Prime(p));
        let over_q = rational.betti_numbers().unwrap();
        let over_p = modular.betti_numbers().unwrap();
        for n in 0..over_q.len() {
            prop_assert!(
                over_p[n] >= over_q[n],
                "semicontinuity violated at degree {} for {} mod {}",
                n, t, p
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smith_form_agrees_with_independent_rank_computations(
        (m, n, entries) in integer_matrix(),
        p in small_prime(),
    ) {
        let over_z = matrix_from_dense(m, n, &entries, Domain::Integer);
        let snf = over_z.smith_normal_form().unwrap();

        let rational_rank = matrix_from_dense(m, n, &entries, Domain::Rational)
            .rank()
            .unwrap();
        prop_assert_eq!(snf.rank, rational_rank);
        prop_assert_eq!(snf.invariant_factors.len(), snf.rank);

        let big_p = BigInt::from(p);
        for window in snf.invariant_factors.windows(2) {
            prop_assert!(
                (&window[1] % &window[0]).is_zero(),
                "invariant factors out of divisibility order"
            );
        }
        let coprime_to_p = snf
            .invariant_factors
            .iter()
            .filter(|f| !(*f % &big_p).is_zero())
            .count();
        let modular_rank = matrix_from_dense(m, n, &entries, Domain::Prime(p))
            .rank()
            .unwrap();
        prop_assert_eq!(coprime_to_p, modular_rank);
    }

    #[test]
    fn kernel_vectors_are_annihilated_and_span_the_nullity(
        (m, n, entries) in integer_matrix(),
        p in small_prime(),
    ) {
        for domain in [Domain::Rational, Domain::Prime(p)] {
            let matrix = matrix_from_dense(m, n, &entries, domain);
            let rank = matrix.rank().unwrap();
            let kernel = matrix.kernel_basis().unwrap();
            prop_assert_eq!(kernel.len(), n - rank);
            for v in &kernel {
                let image = matrix.apply(v).unwrap();
                prop_assert!(image.iter().all(|x| x.is_zero()));
            }
        }
    }

    #[test]
    fn matrix_text_form_round_trips((m, n, entries) in integer_matrix()) {
        let matrix = matrix_from_dense(m, n, &entries, Domain::Integer);
        let text = matrix.to_text();
        let back = ExactMatrix::from_text(&text, Domain::Integer).unwrap();
        prop_assert_eq!(back.to_text(), text);
    }

    #[test]
    fn quantum_integers_satisfy_the_classical_identities(n in -40i64..=40, d in 1i64..=4) {
        let value = quantum_integer(n, d);
        prop_assert!(value.is_symmetric());
        prop_assert_eq!(quantum_integer(-n, d), value.neg());

        // [2][n] = [n+1] + [n-1].
        let two = quantum_integer(2, d);
        let sum = quantum_integer(n + 1, d).add(&quantum_integer(n - 1, d));
        prop_assert_eq!(two.mul(&value), sum);

        // [m+n] = [m] q^{nd} + [n] q^{-md} with m = 3.
        let m = 3i64;
        let lhs = quantum_integer(m + n, d);
        let rhs = quantum_integer(m, d)
            .shifted(n * d)
            .add(&quantum_integer(n, d).shifted(-m * d));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn quantum_factorizations_reassemble_with_the_predicted_indices(
        n in 1i64..=48,
        d in 1i64..=3,
    ) {
        let value = quantum_integer(n, d);
        let factored = factor_into_cyclotomics(&value).unwrap();
        prop_assert_eq!(factored.reassemble(), value);
        prop_assert_eq!(factored.sign, 1);
        prop_assert_eq!(factored.unit_exponent, d * (1 - n));

        // (q^{2nd} - 1)/(q^{2d} - 1) picks out divisors of 2nd not dividing 2d.
        let nd = (2 * n * d) as u64;
        let dd = (2 * d) as u64;
        let expected: std::collections::BTreeSet<u64> =
            (1..=nd).filter(|l| nd % l == 0 && dd % l != 0).collect();
        prop_assert_eq!(factored.indices(), expected);
    }

    #[test]
    fn cyclotomic_polynomials_have_totient_degree_and_product_identity(l in 1u64..=60) {
        let phi = cyclotomic(l);
        let spread = phi.max_exponent().unwrap() - phi.min_exponent().unwrap();
        prop_assert_eq!(spread as u64, totient(l));

        let mut product = LaurentPolynomial::one();
        for divisor in 1..=l {
            if l % divisor == 0 {
                product = product.mul(&cyclotomic(divisor));
            }
        }
        let target = LaurentPolynomial::from_terms([
            (l as i64, BigInt::from(1)),
            (0, BigInt::from(-1)),
        ]);
        prop_assert_eq!(product, target);
    }

    #[test]
    fn degree_tables_and_exponents_agree_with_the_root_count(t in listed_type()) {
        let rs = build_root_system(t);
        let degrees = generator_degrees(t);
        let exponents = &rs.exponents;
        let rank = t.rank();

        let mut from_exponents: Vec<usize> = exponents.iter().map(|e| 2 * e + 1).collect();
        from_exponents.sort_unstable();
        prop_assert_eq!(&degrees, &from_exponents);

        let dim: usize = degrees.iter().sum();
        prop_assert_eq!(dim, rs.lie_algebra_dim());

        let root_sum: usize = exponents.iter().sum();
        prop_assert_eq!(root_sum, rs.num_positive_roots());

        let h = rs.coxeter_number;
        prop_assert_eq!(h, exponents.iter().max().unwrap() + 1);
        for i in 0..rank {
            prop_assert_eq!(exponents[i] + exponents[rank - 1 - i], h);
        }

        let (again_h, safe) = coxeter_threshold(t);
        prop_assert_eq!(again_h, h);
        prop_assert_eq!(safe, 3 * (h - 1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn basic_invariants_are_fixed_by_every_simple_reflection(index in 0usize..16) {
        for t in named(&["A1", "A2", "B2", "G2"]) {
            let basis = basic_invariants(t).unwrap();
            let generators = weyl_group_generators(t).unwrap();
            let reflection = &generators[index % generators.len()];
            let vars = basis[0].poly.vars();
            let images: Vec<Poly> = (0..vars)
                .map(|i| {
                    let mut image = Poly::zero(vars);
                    for (j, c) in reflection[i].iter().enumerate() {
                        image = image.add(&Poly::variable(vars, j).scale(c));
                    }
                    image
                })
                .collect();
            for inv in &basis {
                prop_assert_eq!(inv.poly.substitute(&images), inv.poly.clone());
            }
        }
    }

    #[test]
    fn scaled_basics_decompose_to_the_matching_unit_vector(
        pick in 0usize..16,
        numer in -9i64..=9,
        denom in 1i64..=4,
    ) {
        for t in named(&["A1", "A2", "B2", "G2"]) {
            let basis = basic_invariants(t).unwrap();
            let j = pick % basis.len();
            let c = rat(numer, denom);
            let scaled = basis[j].poly.scale(&c);
            let coefficients = mod_decomposables(&scaled, &basis).unwrap();
            for (k, coeff) in coefficients.iter().enumerate() {
                let expected = if k == j && numer != 0 {
                    c.clone()
                } else {
                    rat(0, 1)
                };
                prop_assert_eq!(coeff, &expected);
            }
        }
    }
}
