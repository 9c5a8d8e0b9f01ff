// Rings and ringoids: shorthand specs, linearized categories, opposites, additive functors.

use std::sync::Arc;

use ringoids::diagram::SmallCat;
use ringoids::ringoid::{linearize, ringoid_of_ring, AddFunctor, RingSpec};

pub fn run_example() -> ringoids::Result<()> {
    let z6 = Arc::new(ringoid_of_ring(&RingSpec::Zn(6))?);
    let f2f2 = ringoid_of_ring(&RingSpec::Product(vec![RingSpec::Zn(2), RingSpec::Zn(2)]))?;
    let t2 = ringoid_of_ring(&RingSpec::Triangular { field: 2, size: 2 })?;
    for r in [&*z6, &f2f2, &t2] {
        let v = r.validate();
        println!(
            "{}: order {}, axioms hold: {}",
            r.name,
            r.hom(0, 0).order(),
            v.all_pass()
        );
        assert!(v.all_pass());
    }
    // upper triangular matrices do not commute; their opposite is a different table
    let (x, y) = t2.noncommuting_pair().expect("noncommutative");
    println!(
        "T2(F2): {x:?}*{y:?} = {:?} but {y:?}*{x:?} = {:?}",
        t2.mul(&x, &y),
        t2.mul(&y, &x)
    );
    assert!(t2.opposite().same_table(&t2).is_some());

    // the arrow category linearized over F2: hom(0,1) = F2, hom(1,0) = 0
    let arrow = linearize(&SmallCat::arrow(), 2)?;
    println!(
        "F2[arrow]: |hom(0,1)| = {}, |hom(1,0)| = {}",
        arrow.hom(0, 1).order(),
        arrow.hom(1, 0).order()
    );
    assert_eq!((arrow.hom(0, 1).order(), arrow.hom(1, 0).order()), (2, 1));
    assert!(arrow.validate().all_pass());

    // a category with a nontrivial endomorphism e, e∘e = e
    let loop_f2 = linearize(&SmallCat::arrow_with_endo(), 2)?;
    println!(
        "F2[loop]: {} objects, axioms hold: {}",
        loop_f2.n(),
        loop_f2.validate().all_pass()
    );

    // reduction Z/6 -> Z/2 as an additive functor
    let z2 = Arc::new(ringoid_of_ring(&RingSpec::Zn(2))?);
    let phi = AddFunctor::from_ring_map(&z6, &z2, &[vec![1]])?;
    println!("Z/6 -> Z/2: 5 maps to {:?}", phi.apply(0, 0, &[5]));
    assert!(phi.validate().all_pass());
    assert_eq!(phi.apply(0, 0, &[5]), vec![1]);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example runs");
}
