// Restriction and extension of scalars along ring maps: the adjunction, composites, flatness.

use std::sync::Arc;

use ringoids::basechange::{adjunction, composition_iso, functor_flatness, BaseChange};
use ringoids::module::{cyclic_module, hom_modules, RMod};
use ringoids::ringoid::{ringoid_of_ring, AddFunctor, RingSpec};
use ringoids::tensor::SearchOptions;

pub fn run_example() -> ringoids::Result<()> {
    let ring = |n| ringoid_of_ring(&RingSpec::Zn(n)).map(Arc::new);
    let (z12, z6, z2) = (ring(12)?, ring(6)?, ring(2)?);
    let phi = AddFunctor::from_ring_map(&z6, &z2, &[vec![1]])?;
    let bc = BaseChange::new(&phi)?;

    // extension Z/2 ⊗_{Z/6} Z/6 = Z/2; restriction keeps the group
    let m = Arc::new(RMod::representable(&z6, 0)?);
    let ext = bc.extend(&m)?;
    let n = Arc::new(cyclic_module(&z2, 2)?);
    let res = bc.restrict(&n)?;
    println!(
        "extension of Z/6: order {}; restriction of Z/2: order {}",
        ext.module.value(0).order(),
        res.value(0).order()
    );

    // triangle identities and |Hom(φ_!M, N)| = |Hom(M, φ*N)|
    let tri = adjunction(&bc, &m, &n)?;
    let (l, r) = (
        hom_modules(&ext.module, &n)?.order(),
        hom_modules(&m, &res)?.order(),
    );
    println!(
        "triangles hold: {}; |Hom(ext M, N)| = {l}, |Hom(M, res N)| = {r}",
        tri.holds()
    );
    assert!(tri.holds() && l == r);

    // extending along Z/12 -> Z/6 -> Z/2 in two steps agrees with the composite
    let psi = AddFunctor::from_ring_map(&z12, &z6, &[vec![1]])?;
    let (b1, comp) = (BaseChange::new(&psi)?, BaseChange::new(&psi.then(&phi))?);
    let m12 = Arc::new(RMod::representable(&z12, 0)?);
    let iso = composition_iso(&b1, &bc, &comp, &m12)?;
    println!(
        "two-step extension vs composite: isomorphic = {}",
        iso.is_iso()
    );
    assert!(iso.is_iso());

    // Z/6 -> Z/2 is flat (a projection onto a factor); Z/4 -> Z/2 is not
    let opts = SearchOptions::default();
    let z4 = ring(4)?;
    let quo = AddFunctor::from_ring_map(&z4, &z2, &[vec![1]])?;
    let (f1, f2) = (
        functor_flatness(&phi, &opts)?,
        functor_flatness(&quo, &opts)?,
    );
    println!(
        "Z/6 -> Z/2 right flat: {}; Z/4 -> Z/2 right flat: {}",
        f1.right.holds, f2.right.holds
    );
    assert!(f1.right.holds && !f2.right.holds);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example runs");
}
