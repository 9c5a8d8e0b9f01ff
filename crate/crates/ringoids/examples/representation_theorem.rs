// Finitely presented skeleta, the Yoneda functor into flat functors, and the round trip
// between modules over a representation and locally flat modules over its skeleton version.

use std::sync::Arc;

use ringoids::diagram::{diag_generated, is_cartesian, DiagModule, Representation};
use ringoids::fpcat::{
    build_rfp, diag_counit, diag_pure_exact, diag_yoneda, fp_skeleton, is_locally_flat,
    reconstruct, yoneda, yoneda_counit, yoneda_exact,
};
use ringoids::module::{cyclic_module, RMod};
use ringoids::ringoid::{ringoid_of_ring, AddFunctor, RingSpec};
use ringoids::tensor::{FlatMethod, SearchOptions};

pub fn run_example() -> ringoids::Result<()> {
    let opts = SearchOptions::default();
    let ring = |n| ringoid_of_ring(&RingSpec::Zn(n)).map(Arc::new);
    let (z4, z2) = (ring(4)?, ring(2)?);

    // modules over Z/4 on at most two generators, up to isomorphism
    let sk = fp_skeleton(&z4, 2, 4096)?;
    let orders: Vec<Vec<i64>> = sk
        .objects()
        .iter()
        .map(|k| k.value(0).factors().to_vec())
        .collect();
    println!(
        "skeleton of Z/4 with two generators: {} objects {orders:?}",
        sk.n()
    );
    assert!(sk.validate().all_pass());

    // Y(M) = Hom(-, M) on the skeleton, and evaluation at the ring recovers M
    let m = Arc::new(cyclic_module(&z4, 2)?);
    let y = yoneda(&m, &sk)?;
    let (_, eps) = yoneda_counit(&y, &sk)?;
    println!(
        "Y(Z/2) is flat: {}; counit is an isomorphism: {}",
        ringoids::tensor::is_flat(&y.functor, FlatMethod::SummandOracle, &opts)?.holds,
        eps.is_iso()
    );
    assert!(eps.is_iso());

    // the same over the representation Z/4 -> Z/2
    let phi = AddFunctor::from_ring_map(&z4, &z2, &[vec![1]])?;
    let rep = Arc::new(Representation::arrow_of("Z/4 -> Z/2", &phi)?);
    let rfp = build_rfp(&rep, 2, 4096)?;
    println!(
        "skeleton representation: sizes {:?}, strict: {}, axioms hold: {}",
        rfp.skeleta.iter().map(|k| k.n()).collect::<Vec<_>>(),
        rfp.rep.is_strict(),
        rfp.rep.validate().all_pass()
    );
    assert!(rfp.rep.validate().all_pass());

    let parts = vec![
        Arc::new(RMod::representable(&z4, 0)?),
        Arc::new(RMod::representable(&z2, 0)?),
    ];
    let regular = Arc::new(DiagModule::from_fn(&rep, parts, |al, _| {
        Ok(rep.functor(al).maps[0][0].clone())
    })?);
    let ym = diag_yoneda(&regular, &rfp)?;
    println!(
        "Y(R) locally flat: {}",
        is_locally_flat(&ym.module, FlatMethod::All, &opts)?.holds
    );
    let recon = reconstruct(&ym.module, &rfp, &opts)?;
    let counit = diag_counit(&recon.module, &ym, &regular, &rfp)?;
    println!(
        "reconstruct(Y(R)) ≅ R: {}; Y(reconstruct(Y(R))) ≅ Y(R): {}",
        counit.is_iso(),
        recon.is_iso()
    );
    assert!(counit.is_iso() && recon.is_iso());
    let (c1, c2) = (
        is_cartesian(&regular)?.holds,
        is_cartesian(&ym.module)?.holds,
    );
    println!("R cartesian: {c1}; Y(R) cartesian: {c2}");
    assert_eq!(c1, c2);

    // purity of 2R_0 ⊂ R matches exactness after applying Y
    let sub = diag_generated(&regular, &[(0, 0, vec![2])])?;
    let (p, ye) = (diag_pure_exact(&sub, &opts)?, yoneda_exact(&sub, &rfp)?);
    println!("2R_0 in R: pure = {}, Y-exact = {ye}", p.holds);
    assert_eq!(p.holds, ye);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example runs");
}
