use qdm_core::coeff::{Coeff, RatFunc};
use qdm_core::ore::{buchberger, DMono, Mode, Staircase, DEFAULT_STEP_CAP};
use qdm_core::parse::{parse_operator, parse_relation};

const SIGMA2: [&str; 2] = ["h^2*d1^2 - q1*h^2*(d2-2*d1)*(d2-2*d1-1)", "h^2*d2*(d2-2*d1) - q2"];

#[test]
fn sigma2_basis_matches_displayed_elements() {
    let gens: Vec<_> = SIGMA2.iter().map(|s| parse_operator(s, 2).unwrap()).collect();
    let gb = buchberger(&2, 2, &gens, Mode::Ore, DEFAULT_STEP_CAP).unwrap();
    let expected = [
        "2*h^2*d1*d2 - h^2*d2^2 + q2",
        "(4*q1-1)*h^2*d1^2 - q1*h^2*d2^2 + 2*q1*h^2*d1 - q1*h^2*d2 + 2*q1*q2",
        "h^3*d2^3 + 2*q2*(4*q1-1)*h*d1 - q2*(4*q1+1)*h*d2 - h*q2",
    ];
    assert_eq!(gb.elements().len(), 3);
    for e in expected {
        let p = parse_operator(e, 2).unwrap();
        assert!(gb.elements().contains(&p.monic().unwrap()), "missing {e}");
        assert!(gb.elements().iter().any(|g| g.clear_denominators() == p));
    }
    assert_eq!(
        gb.staircase(),
        Staircase::Finite(vec![DMono(vec![0, 0]), DMono(vec![0, 1]), DMono(vec![1, 0]), DMono(vec![0, 2])])
    );
    assert!(gb.verify().unwrap());
    let nf = gb.normal_form(&parse_operator("h^2*d1*d2", 2).unwrap()).unwrap();
    assert_eq!(nf, parse_operator("1/2*h^2*d2^2 - 1/2*q2", 2).unwrap());
}

#[test]
fn naive_sigma2_has_rank_zero() {
    let gens: Vec<_> = ["h^2*d1^2 - q1*h^2*(d2-2*d1)^2", "h^2*d2*(d2-2*d1) - q2"]
        .iter()
        .map(|s| parse_operator(s, 2).unwrap())
        .collect();
    let gb = buchberger(&2, 2, &gens, Mode::Ore, DEFAULT_STEP_CAP).unwrap();
    assert_eq!(gb.staircase(), Staircase::Finite(vec![]));
    assert!(gb.is_trivial());
}

#[test]
fn commutative_sigma2_has_four_standard_monomials() {
    let rels: Vec<_> = ["b1^2 - q1*(b2-2*b1)^2", "b2*(b2-2*b1) - q2"]
        .iter()
        .map(|s| parse_relation(s, 2).unwrap())
        .collect();
    let gb = buchberger(&2, 2, &rels, Mode::Commutative, DEFAULT_STEP_CAP).unwrap();
    assert_eq!(gb.staircase().rank(), Some(4));
    let _ = RatFunc::one(&2);
}
