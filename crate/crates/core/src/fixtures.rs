//! Ready-made fields, automata and systems used by the demos and tests.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::automaton::Dfao;
use crate::error::Result;
use crate::exactalg::{FieldElem, Matrix, NumberField, Poly, RatFunc};
use crate::series::CoefficientStream;
use crate::system::MahlerSystem;

/// Q(t) with t^2 = t + 1 and t the root near -0.618.
pub fn golden_field() -> Arc<NumberField> {
    let m = [-1, -1, 1].map(|c| BigRational::from_integer(BigInt::from(c))).to_vec();
    NumberField::new(m, (BigRational::new(BigInt::from(-618), BigInt::from(1000)), BigRational::from_integer(0.into())))
        .expect("t^2 - t - 1 has a simple root near -0.618")
}

/// Parity of the number of digits 2 in base 3, output 1 when odd.
pub fn thue3_automaton(field: &Arc<NumberField>) -> Dfao {
    let zero = FieldElem::zero(field);
    let one = FieldElem::one(field);
    Dfao::from_named(
        3,
        field,
        &["A", "B"],
        "A",
        &[("A", vec!["A", "A", "B"]), ("B", vec!["B", "B", "A"])],
        &[("A", zero), ("B", one)],
    )
    .expect("valid automaton")
}

/// The system of (f, 1 - f) for the automaton above.
pub fn thue3(field: &Arc<NumberField>) -> Result<(MahlerSystem, CoefficientStream)> {
    thue3_automaton(field).to_mahler_system()
}

/// Base-3 automaton on the parities of the digits 1 and 2 with outputs
/// omega on the states A (even, even), B (odd, even), C (odd, odd) and
/// D (even, odd).
pub fn four_state_automaton(field: &Arc<NumberField>, omega: [FieldElem; 4]) -> Dfao {
    let [a, b, c, d] = omega;
    Dfao::from_named(
        3,
        field,
        &["A", "B", "C", "D"],
        "A",
        &[
            ("A", vec!["A", "B", "D"]),
            ("B", vec!["B", "A", "C"]),
            ("C", vec!["C", "D", "B"]),
            ("D", vec!["D", "C", "A"]),
        ],
        &[("A", a), ("B", b), ("C", c), ("D", d)],
    )
    .expect("valid automaton")
}

/// The system of the four state indicators, in the order A, B, C, D.
pub fn four_state(field: &Arc<NumberField>) -> Result<(MahlerSystem, CoefficientStream)> {
    let one = FieldElem::one(field);
    let zero = FieldElem::zero(field);
    let e = |i: usize| -> [FieldElem; 4] {
        std::array::from_fn(|j| if i == j { one.clone() } else { zero.clone() })
    };
    let dfao = four_state_automaton(field, e(0));
    let closure = dfao.kernel_closure_with_seeds((0..4).map(|i| e(i).to_vec()).collect())?;
    dfao.compile(&closure)
}

/// The 1x1 system g(z) = (1+z)(z-1/4)/(z^2-1/4) g(z^2), solved by
/// g = (z-1/4)/(1-z). Its matrix has a pole at 1/2.
pub fn pole_system(field: &Arc<NumberField>) -> (MahlerSystem, CoefficientStream) {
    let r = |n: i64, d: i64| FieldElem::from_rational(field, BigRational::new(n.into(), d.into()));
    let num = &Poly::from_ints(field, &[1, 1]) * &Poly::new(field, vec![r(-1, 4), r(1, 1)]);
    let den = Poly::new(field, vec![r(-1, 4), r(0, 1), r(1, 1)]);
    let a = RatFunc::new(num, den).expect("nonzero denominator");
    let s = MahlerSystem::new(2, Matrix::from_rows(vec![vec![a]]).expect("1x1")).expect("invertible");
    let g0 = vec![r(-1, 4)];
    let g = vec![r(3, 4)];
    let f = CoefficientStream::from_generator(
        field,
        1,
        crate::series::Source::Explicit,
        true,
        Box::new(move |i, _| if i == 0 { g0.clone() } else { g.clone() }),
    );
    (s, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_generator() {
        let k = golden_field();
        let t = FieldElem::generator(&k);
        assert_eq!(&t * &t, &t + &FieldElem::one(&k));
        assert!(t.embed_ball(64).unwrap().re.hi < BigRational::from_integer(0.into()));
    }

    #[test]
    fn pole_system_stream_solves_it() {
        let k = NumberField::rationals();
        let (s, f) = pole_system(&k);
        let seed = f.prefix(s.seed_len());
        let g = CoefficientStream::from_recursion(&s, crate::series::normalize_seed(&s, &seed)).unwrap();
        assert_eq!(g.denormalize(&s).prefix(40), f.prefix(40));
    }
}
