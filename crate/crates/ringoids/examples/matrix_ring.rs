// A finite ringoid as a ring with enough idempotents, its unitalization, and the module
// equivalences between them.

use std::sync::Arc;

use ringoids::abelian::{AbHom, FinAb};
use ringoids::diagram::SmallCat;
use ringoids::matring::{
    equiv_s, equiv_t, equiv_u, lattice_bijection, matrix_ring, non_unitary_witness, round_trip,
    tensor_compat_s, unitalize,
};
use ringoids::module::RMod;
use ringoids::ringoid::linearize;
use ringoids::tensor::left_representable;

pub fn run_example() -> ringoids::Result<()> {
    // F2[0 -> 1] becomes the ring of upper triangular 2×2 matrices over F2
    let c = Arc::new(linearize(&SmallCat::arrow(), 2)?);
    let rc = matrix_ring(&c)?;
    println!(
        "matrix ring: order {}, axioms hold: {}",
        rc.order(),
        rc.validate().all_pass()
    );
    assert_eq!(rc.order(), 8);

    // S(H_1) = ⊕ H_1(c) and back again
    let h1 = Arc::new(RMod::representable(&c, 1)?);
    let s = equiv_s(&h1, &rc)?;
    let rt = round_trip(&h1, &rc)?;
    println!(
        "S(H_1) has order {}; round trip {:?}",
        s.module.cardinality(),
        rt
    );
    assert!(rt.holds());
    let t = equiv_t(&s.module, &rc)?;
    println!(
        "T(S(H_1)) value orders {:?}",
        t.module
            .values()
            .iter()
            .map(|v| v.order())
            .collect::<Vec<_>>()
    );

    // tensor products are preserved: H_1 ⊗ H_1^* ≅ S(H_1) ⊗ S(H_1^*)
    let c_op = Arc::new(c.opposite());
    let dual = Arc::new(left_representable(&c_op, 1)?);
    let tc = tensor_compat_s(&h1, &dual, &rc)?;
    println!(
        "tensor comparison: order {}, bijective {}",
        tc.src.group().order(),
        tc.bijective
    );
    assert!(tc.bijective);

    // the unitalization Z/2 × R_C, and U keeping groups and submodule lattices
    let u = unitalize(&rc.ring)?;
    let um = equiv_u(&s.module, &u)?;
    let lat = lattice_bijection(&s.module, &u, 1024)?;
    println!(
        "unitalization: order {}; |U(M)| = {}; lattices {:?}",
        u.order(),
        um.cardinality(),
        lat
    );
    assert!(lat.holds() && um.cardinality() == s.module.cardinality());

    // a module on which the unit acts as zero is outside the equivalence
    let v = FinAb::cyclic(2);
    let zero_action = RMod::from_fn(rc.ring.clone(), vec![v.clone()], |_, _, _| {
        Ok(AbHom::zero(&v, &v))
    })?;
    let w = non_unitary_witness(&zero_action, &rc.ring).expect("unit acts as zero");
    println!("non-unitary module: the unit moves {w:?}");
    assert!(equiv_t(&Arc::new(zero_action), &rc).is_err());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example runs");
}
