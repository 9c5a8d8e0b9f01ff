// Tensor products, three agreeing flatness tests, and purity decided by tensoring and splitting.

use std::sync::Arc;

use ringoids::module::{cyclic_module, submodule_generated};
use ringoids::ringoid::{ringoid_of_ring, RingSpec};
use ringoids::tensor::{
    is_flat, is_pure, left_representable, mod_tensor, retraction, FlatMethod, SearchOptions,
};

pub fn run_example() -> ringoids::Result<()> {
    let opts = SearchOptions::default();
    let z4 = Arc::new(ringoid_of_ring(&RingSpec::Zn(4))?);
    let z4_op = Arc::new(z4.opposite());
    let half = Arc::new(cyclic_module(&z4, 2)?);
    let whole = Arc::new(cyclic_module(&z4, 4)?);

    // Z/2 ⊗ Z/4 = Z/2
    let t = mod_tensor(&half, &Arc::new(left_representable(&z4_op, 0)?))?;
    println!("Z/2 (x) Z/4 over Z/4 = {:?}", t.group().factors());
    assert_eq!(t.group().order(), 2);

    // Z/2 is not flat over Z/4; Z/4 is
    for (name, m) in [("Z/2", &half), ("Z/4", &whole)] {
        let v = is_flat(m, FlatMethod::All, &opts)?;
        let verdicts: Vec<_> = v
            .outcomes
            .iter()
            .map(|o| (o.method.as_str(), o.verdict))
            .collect();
        println!("{name} over Z/4: flat = {}, methods {verdicts:?}", v.holds);
        assert!(v.agree);
    }
    assert!(!is_flat(&half, FlatMethod::Fiber, &opts)?.holds);

    // 2Z/4 ⊂ Z/4 is not pure; 3Z/6 ⊂ Z/6 is pure and split
    let doubled = submodule_generated(&whole, &[(0, vec![2])])?;
    let p = is_pure(&doubled.incl, &opts)?;
    println!(
        "2Z/4 in Z/4: pure = {}, split = {}",
        p.holds,
        retraction(&doubled.incl)?.is_some()
    );
    assert!(!p.holds);

    let z6 = Arc::new(ringoid_of_ring(&RingSpec::Zn(6))?);
    let z6m = Arc::new(cyclic_module(&z6, 6)?);
    let threes = submodule_generated(&z6m, &[(0, vec![3])])?;
    let p = is_pure(&threes.incl, &opts)?;
    let split = retraction(&threes.incl)?.is_some();
    println!("3Z/6 in Z/6: pure = {}, split = {split}", p.holds);
    assert!(p.holds && split);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example runs");
}
