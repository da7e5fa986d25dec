//! End-to-end checks against values computed by hand.

use num_bigint::BigInt;
use torelli_core::coinv::{coinvariants, coinvariants_for, Group, SpaceId};
use torelli_core::exactalg::{smith_normal_form, IntMatrix};
use torelli_core::homology3::{
    admissible_levels, euler_phi, h1_of_splitting, parse_gluing, sets_coincide, GroupOrder,
    HeegaardGluing,
};

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[test]
fn smith_form_of_textbook_matrix() {
    let a = IntMatrix::from_i64(3, 3, &[2, 4, 4, -6, 6, 12, 10, -4, -16]).unwrap();
    let s = smith_normal_form(&a);
    assert_eq!(s.invariant_factors, big(&[2, 6, 12]));
    assert_eq!(s.u.try_mul(&s.d).unwrap().try_mul(&s.v).unwrap(), a);
    assert_eq!(s.u.det().unwrap().magnitude(), BigInt::from(1).magnitude());
    assert_eq!(s.v.det().unwrap().magnitude(), BigInt::from(1).magnitude());
}

#[test]
fn stabilized_lens_gluing_keeps_its_homology() {
    let hg = parse_gluing("genus 1\n2 5\n1 3\n").unwrap();
    let r = h1_of_splitting(&hg);
    assert_eq!(r.torsion, big(&[3]));
    assert_eq!(r.order, GroupOrder::Finite(BigInt::from(3)));
    let r4 = h1_of_splitting(&hg.stabilize(4));
    assert_eq!(r4, r);
    assert_eq!(admissible_levels(&BigInt::from(3), 10).unwrap(), vec![2, 4]);
}

#[test]
fn product_of_gluings_is_a_gluing() {
    let a = parse_gluing("genus 1\n2 5\n1 3\n").unwrap();
    let b = HeegaardGluing::identity(1);
    assert_eq!(a.try_mul(&b).unwrap(), a);
}

#[test]
fn totient_and_coincidence() {
    let table = [(1, 1), (2, 1), (9, 6), (12, 4), (36, 12), (97, 96)];
    for (n, want) in table {
        assert_eq!(euler_phi(n), want, "phi({n})");
    }
    // The units ±1 exhaust (ℤ/d)^× exactly when φ(d) ≤ 2.
    for d in 2..=60 {
        assert_eq!(
            sets_coincide(d).unwrap(),
            matches!(d, 2 | 3 | 4 | 6),
            "d = {d}"
        );
    }
}

#[test]
fn classical_coinvariants() {
    let want = [
        (SpaceId::Sym, 0),
        (SpaceId::Gl, 1),
        (SpaceId::Sl, 0),
        (SpaceId::Sp, 1),
        // −Id acts by −1 on an odd tensor power.
        (SpaceId::Ext3, 0),
    ];
    for (space, dim) in want {
        let r = coinvariants(space, 4, 5).unwrap();
        assert_eq!(r.dimension, dim, "{space}");
    }
    assert_eq!(
        coinvariants_for(SpaceId::Gl, Group::Sl, 4, 7)
            .unwrap()
            .dimension,
        1
    );
}
