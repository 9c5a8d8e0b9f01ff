// Modules over a ringoid: representables, hom groups, the Yoneda bijection, submodule lattices.

use std::sync::Arc;

use ringoids::diagram::SmallCat;
use ringoids::module::{all_submodules, hom_modules, submodule_generated, yoneda_map, RMod};
use ringoids::ringoid::linearize;

pub fn run_example() -> ringoids::Result<()> {
    // F2[0 -> 1]: right modules are representations of the arrow, read contravariantly
    let r = Arc::new(linearize(&SmallCat::arrow(), 2)?);
    let h0 = Arc::new(RMod::representable(&r, 0)?);
    let h1 = Arc::new(RMod::representable(&r, 1)?);
    println!(
        "H_0 has |H_0(0)|, |H_0(1)| = {}, {}",
        h0.value(0).order(),
        h0.value(1).order()
    );
    println!(
        "H_1 has |H_1(0)|, |H_1(1)| = {}, {}",
        h1.value(0).order(),
        h1.value(1).order()
    );

    // Hom(H_a, M) ≅ M(a) through evaluation at the identity
    for a in 0..r.n() {
        let ha = Arc::new(RMod::representable(&r, a)?);
        let homs = hom_modules(&ha, &h1)?;
        println!("|Hom(H_{a}, H_1)| = {} = |H_1({a})|", homs.order());
        assert_eq!(homs.order(), h1.value(a).order());
        for x in h1.value(a).elements() {
            let f = yoneda_map(&ha, &h1, a, &x)?;
            assert!(f.is_natural());
            assert_eq!(f.apply(a, r.id(a)), x);
        }
    }

    // submodules of H_1: 0, the radical generated by the arrow, and H_1
    let subs = all_submodules(&h1, 64)?;
    println!("H_1 has {} submodules", subs.len());
    assert_eq!(subs.len(), 3);
    let radical = submodule_generated(&h1, &[(0, vec![1])])?;
    let (simple, _) = radical.incl.cokernel()?;
    println!(
        "H_1 / radical has values of orders {:?}",
        simple
            .values()
            .iter()
            .map(|v| v.order())
            .collect::<Vec<_>>()
    );
    assert_eq!((simple.value(0).order(), simple.value(1).order()), (1, 2));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example runs");
}
