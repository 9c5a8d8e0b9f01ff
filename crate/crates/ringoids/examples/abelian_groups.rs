// Finite abelian groups in invariant-factor form: presentations, maps, kernels, tensors, homs.

use ringoids::abelian::{ab_hom, ab_normal_form, ab_tensor, AbHom, FinAb};

pub fn run_example() -> ringoids::Result<()> {
    // Z/4 ⊕ Z/6 presented on generators x, y normalizes to Z/2 ⊕ Z/12
    let g = FinAb::from_orders(&[4, 6])?;
    println!(
        "Z/4 + Z/6 = {:?}, order {}, exponent {}",
        g.factors(),
        g.order(),
        g.exponent()
    );
    assert_eq!(g.factors(), &[2, 12]);

    // (Z/8 ⊕ Z/4) / <(2, 2)>
    let q = ab_normal_form(&[8, 4], &[vec![2, 2]])?;
    println!("(Z/8 + Z/4)/<(2,2)> = {:?}", q.group.factors());
    assert_eq!(q.group.order(), 8);

    // multiplication by 2 on Z/12: kernel Z/2, cokernel Z/2
    let z12 = FinAb::cyclic(12);
    let two = AbHom::from_images(z12.clone(), z12.clone(), &[vec![2]])?;
    let ker = two.kernel()?;
    let (coker, _) = two.cokernel()?;
    println!(
        "x -> 2x on Z/12: kernel {:?}, cokernel {:?}",
        ker.group.factors(),
        coker.factors()
    );
    assert_eq!((ker.group.order(), coker.order()), (2, 2));

    // Z/4 ⊗ Z/6 = Z/2 and Hom(Z/4, Z/6) = Z/2
    let (z4, z6) = (FinAb::cyclic(4), FinAb::cyclic(6));
    let t = ab_tensor(&z4, &z6)?;
    let h = ab_hom(&z4, &z6)?;
    println!(
        "Z/4 (x) Z/6 = {:?}, Hom(Z/4, Z/6) = {:?}",
        t.group().factors(),
        h.group().factors()
    );
    assert_eq!(t.group().order(), 2);
    assert_eq!(h.elements().count(), 2);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example runs");
}
