// Representations of a small category by rings and modules over them: coherence, extension by
// zero, cartesian modules, flatness.

use std::sync::Arc;

use ringoids::abelian::{AbHom, FinAb};
use ringoids::diagram::{
    cartesian_hull, diag_homs, diag_is_flat, ext_adjunction_check, ext_zero, is_cartesian,
    sigma_tau, DiagModule, Representation,
};
use ringoids::module::{cyclic_module, RMod};
use ringoids::ringoid::{ringoid_of_ring, AddFunctor, RingSpec};
use ringoids::tensor::SearchOptions;

pub fn run_example() -> ringoids::Result<()> {
    let opts = SearchOptions::default();
    let ring = |n| ringoid_of_ring(&RingSpec::Zn(n)).map(Arc::new);
    let (z6, z2) = (ring(6)?, ring(2)?);
    let phi = AddFunctor::from_ring_map(&z6, &z2, &[vec![1]])?;
    let rep = Arc::new(Representation::arrow_of("Z/6 -> Z/2", &phi)?);
    println!(
        "{}: axioms hold: {}, flatness {:?}",
        rep.name,
        rep.validate().all_pass(),
        rep.flatness(&opts)?
    );

    // a non-strict twist by the unit 5 still satisfies the coherence axioms and squares
    let twisted = rep.twisted(&[vec![5], vec![1], vec![1]])?;
    let m = Arc::new(RMod::representable(&z6, 0)?);
    let n = Arc::new(cyclic_module(&z2, 2)?);
    let id0 = rep.index.id(0);
    let arrow = (0..rep.index.m())
        .find(|&a| !rep.index.is_identity(a))
        .expect("one non-identity arrow");
    let squares = sigma_tau(&twisted, arrow, id0, &m, &n)?;
    println!(
        "twisted: strict = {}, axioms hold: {}, squares commute: {}",
        twisted.is_strict(),
        twisted.validate().all_pass(),
        squares.holds()
    );
    assert!(!twisted.is_strict() && twisted.validate().all_pass() && squares.holds());

    // extension by zero of Z/3 from object 0: parts Z/3 and Z/2 ⊗ Z/3 = 0
    let z3 = Arc::new(cyclic_module(&z6, 3)?);
    let ext = ext_zero(&rep, 0, &z3)?;
    println!(
        "ext_0(Z/3): part orders {:?}",
        ext.module
            .parts()
            .iter()
            .map(|p| p.value(0).order())
            .collect::<Vec<_>>()
    );

    // Hom(ext_0 N, M) ≅ Hom(N, M_0) for the module M = (Z/6 -> Z/2)
    let parts = vec![
        Arc::new(RMod::representable(&z6, 0)?),
        Arc::new(RMod::representable(&z2, 0)?),
    ];
    let regular = Arc::new(DiagModule::from_fn(&rep, parts, |al, _| {
        Ok(rep.functor(al).maps[0][0].clone())
    })?);
    let adj = ext_adjunction_check(&rep, 0, &z3, &regular)?;
    println!(
        "|Hom(ext_0 Z/3, R)| = {} = |Hom(Z/3, Z/6)| = {}",
        adj.ext_hom_order, adj.part_hom_order
    );
    assert!(adj.holds());
    let h = Arc::new(RMod::representable(&z6, 0)?);
    let k = diag_homs(&ext_zero(&rep, 0, &h)?.module, &regular)?.order();
    assert_eq!(k, regular.part(0).value(0).order());

    // the regular module is cartesian and flat; a zero structural map is neither cartesian
    let cart = is_cartesian(&regular)?;
    let flat = diag_is_flat(&regular, &opts)?;
    println!(
        "regular: cartesian = {}, flat = {:?} (componentwise {})",
        cart.holds, flat.global, flat.componentwise_flat
    );
    let halves = vec![Arc::new(cyclic_module(&z6, 2)?), n.clone()];
    let zero_map = Arc::new(DiagModule::from_fn(&rep, halves, |al, _| {
        let v = FinAb::cyclic(2);
        let image = if rep.index.is_identity(al) {
            vec![1]
        } else {
            vec![0]
        };
        AbHom::from_images(v.clone(), v, &[image])
    })?);
    println!(
        "zero structural map: cartesian = {}",
        is_cartesian(&zero_map)?.holds
    );
    assert!(cart.holds && !is_cartesian(&zero_map)?.holds);

    // smallest cartesian submodule with pure parts containing 3 ∈ R_0
    let hull = cartesian_hull(&regular, 0, 0, &[3], &opts)?;
    println!(
        "cartesian hull of 3: size {}, rounds {}, cartesian {}",
        hull.sub.cardinality(),
        hull.rounds,
        hull.cartesian
    );
    assert!(hull.cartesian && hull.pure_parts.iter().all(|p| *p));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example runs");
}
