//! Restriction and extension of scalars along an additive functor.

use std::sync::Arc;

use serde::Serialize;
use serde_json::json;

use crate::abelian::{AbHom, Elem};
use crate::error::Result;
use crate::module::{all_submodules, direct_sum, ModHom, RMod};
use crate::ringoid::{AddFunctor, Ringoid};
use crate::tensor::{
    is_flat, tensor_bimodule, Bimodule, FlatMethod, MethodOutcome, SearchOptions, TensorExt,
    Verdict,
};

pub fn restrict_scalars(phi: &AddFunctor, n: &Arc<RMod>) -> Result<RMod> {
    let vals = phi.obj.iter().map(|&o| n.value(o).clone()).collect();
    RMod::from_fn(phi.src.clone(), vals, |a, b, r| {
        Ok(n.action(phi.obj[a], phi.obj[b], &phi.apply(a, b, r)))
    })
}

/// Change of base along `φ: R → S`, holding the bimodule `Hom_S(−, φ(−))`.
#[derive(Clone, Debug)]
pub struct BaseChange {
    pub phi: AddFunctor,
    pub src_op: Arc<Ringoid>,
    pub bimodule: Bimodule,
}

impl BaseChange {
    pub fn new(phi: &AddFunctor) -> Result<Self> {
        let src_op = Arc::new(phi.src.opposite());
        let bimodule = Bimodule::hom_along(phi, &src_op)?;
        Ok(BaseChange {
            phi: phi.clone(),
            src_op,
            bimodule,
        })
    }

    pub fn restrict(&self, n: &Arc<RMod>) -> Result<Arc<RMod>> {
        restrict_scalars(&self.phi, n).map(Arc::new)
    }

    pub fn restrict_hom(&self, f: &ModHom, src: &Arc<RMod>, tgt: &Arc<RMod>) -> Result<ModHom> {
        ModHom::new(
            src.clone(),
            tgt.clone(),
            self.phi.obj.iter().map(|&o| f.comp(o).clone()).collect(),
        )
    }

    /// `M ⊗_R Hom_S(−, φ(−))`.
    pub fn extend(&self, m: &Arc<RMod>) -> Result<TensorExt> {
        tensor_bimodule(m, &self.bimodule)
    }

    /// `φ_!(f) = f ⊗ id`.
    pub fn extend_hom(&self, f: &ModHom, src: &TensorExt, tgt: &TensorExt) -> Result<ModHom> {
        let comps = src
            .parts
            .iter()
            .zip(&tgt.parts)
            .map(|(s, t)| {
                s.map_pairs(t.group(), |a, i, j| {
                    t.pair(a, &f.apply(a, &f.src.value(a).gen(i)), &s.n.value(a).gen(j))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        ModHom::new(src.module.clone(), tgt.module.clone(), comps)
    }

    /// `η_M: M → φ*φ_!M`, `m ↦ m ⊗ id_{φ(a)}`.
    pub fn unit(&self, m: &Arc<RMod>, ext: &TensorExt, restricted: &Arc<RMod>) -> Result<ModHom> {
        let s = &self.phi.tgt;
        let comps = (0..m.n())
            .map(|a| {
                let pa = self.phi.obj[a];
                let t = &ext.parts[pa];
                let imgs: Vec<Elem> = m
                    .value(a)
                    .gens()
                    .iter()
                    .map(|x| t.pair(a, x, s.id(pa)))
                    .collect();
                AbHom::from_images(m.value(a).clone(), restricted.value(a).clone(), &imgs)
            })
            .collect::<Result<Vec<_>>>()?;
        ModHom::new(m.clone(), restricted.clone(), comps)
    }

    /// `ε_N: φ_!φ*N → N`, `n ⊗ f ↦ N(f)(n)`.
    pub fn counit(&self, n: &Arc<RMod>, ext: &TensorExt) -> Result<ModHom> {
        let s = &self.phi.tgt;
        let comps = ext
            .parts
            .iter()
            .enumerate()
            .map(|(b, t)| {
                t.map_pairs(n.value(b), |a, i, j| {
                    let pa = self.phi.obj[a];
                    n.act(b, pa, &s.hom(b, pa).gen(j), &n.value(pa).gen(i))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        ModHom::new(ext.module.clone(), n.clone(), comps)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TriangleReport {
    pub unit_natural: bool,
    pub counit_natural: bool,
    /// `ε_{φ_!M} ∘ φ_!(η_M) = id`.
    pub left_triangle: bool,
    /// `φ*(ε_N) ∘ η_{φ*N} = id`.
    pub right_triangle: bool,
}

impl TriangleReport {
    pub fn holds(&self) -> bool {
        self.unit_natural && self.counit_natural && self.left_triangle && self.right_triangle
    }
}

/// Checks both triangle identities at an `R`-module `m` and an `S`-module `n`.
pub fn adjunction(bc: &BaseChange, m: &Arc<RMod>, n: &Arc<RMod>) -> Result<TriangleReport> {
    // left triangle at M
    let ext = bc.extend(m)?;
    let rest = bc.restrict(&ext.module)?;
    let eta = bc.unit(m, &ext, &rest)?;
    let ext_rest = bc.extend(&rest)?;
    let ext_eta = bc.extend_hom(&eta, &ext, &ext_rest)?;
    let eps = bc.counit(&ext.module, &ext_rest)?;
    let left_triangle = eps.compose(&ext_eta).is_identity();
    // right triangle at N
    let rn = bc.restrict(n)?;
    let ext_n = bc.extend(&rn)?;
    let eps_n = bc.counit(n, &ext_n)?;
    let rest_ext_n = bc.restrict(&ext_n.module)?;
    let eta_rn = bc.unit(&rn, &ext_n, &rest_ext_n)?;
    let r_eps = bc.restrict_hom(&eps_n, &rest_ext_n, &rn)?;
    let right_triangle = r_eps.compose(&eta_rn).is_identity();
    Ok(TriangleReport {
        unit_natural: eta.is_natural() && eta_rn.is_natural(),
        counit_natural: eps.is_natural() && eps_n.is_natural(),
        left_triangle,
        right_triangle,
    })
}

/// `ψ_!φ_!M → (ψφ)_!M`, `(m ⊗ g) ⊗ f ↦ m ⊗ (ψ(g) ∘ f)`.
pub fn composition_iso(
    phi: &BaseChange,
    psi: &BaseChange,
    comp: &BaseChange,
    m: &Arc<RMod>,
) -> Result<ModHom> {
    let t = &psi.phi.tgt;
    let inner = phi.extend(m)?;
    let outer = psi.extend(&inner.module)?;
    let direct = comp.extend(m)?;
    let comps = (0..t.n())
        .map(|c| {
            let (src, tgt) = (&outer.parts[c], &direct.parts[c]);
            src.map_pairs(tgt.group(), |b, i, j| {
                let mid = &inner.parts[b];
                let pb = psi.phi.obj[b];
                let f = t.hom(c, pb).gen(j);
                let mut acc = tgt.group().zero();
                for (a, p, q, k) in mid.expand(&mid.group().gen(i)) {
                    let pa = phi.phi.obj[a];
                    let g = phi.phi.tgt.hom(b, pa).gen(q);
                    let psi_g = psi.phi.apply(b, pa, &g);
                    let h = t.compose(c, pb, psi.phi.obj[pa], &psi_g, &f);
                    let v = tgt.pair(a, &m.value(a).gen(p), &h);
                    tgt.group().add_assign(&mut acc, &tgt.group().scale(k, &v));
                }
                acc
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ModHom::new(outer.module.clone(), direct.module.clone(), comps)
}

/// A way to write an element of `φ_!M` as the image of a map out of representables:
/// `(a, m, f, c)` standing for `c · (m ⊗ f)` with `m ∈ M(a)`, `f ∈ hom_S(b, φa)`.
pub fn element_factorization(
    ext: &TensorExt,
    b: usize,
    z: &[i64],
) -> Vec<(usize, Elem, Elem, i64)> {
    let t = &ext.parts[b];
    t.expand(z)
        .into_iter()
        .map(|(a, i, j, c)| (a, t.m.value(a).gen(i), t.n.value(a).gen(j), c))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct FunctorFlatness {
    pub right: Verdict,
    pub left: Verdict,
}

/// Right flatness: `φ_!` keeps monomorphisms into bounded sums of representables, and every
/// column `Hom_S(b, φ(−))` is a flat left module. Left flatness is right flatness of `φ^op`.
pub fn functor_flatness(phi: &AddFunctor, opts: &SearchOptions) -> Result<FunctorFlatness> {
    let right = right_flatness(phi, opts)?;
    let src_op = Arc::new(phi.src.opposite());
    let tgt_op = Arc::new(phi.tgt.opposite());
    let left = right_flatness(&phi.opposite(&src_op, &tgt_op), opts)?;
    Ok(FunctorFlatness { right, left })
}

fn right_flatness(phi: &AddFunctor, opts: &SearchOptions) -> Result<Verdict> {
    let bc = BaseChange::new(phi)?;
    let r = &phi.src;
    // route 1: monomorphisms into sums of at most `generators` representables
    let mut checked = 0usize;
    let mut failure = None;
    let mut combos: Vec<Vec<usize>> = (0..r.n()).map(|a| vec![a]).collect();
    if opts.generators >= 2 {
        for a in 0..r.n() {
            for b in a..r.n() {
                combos.push(vec![a, b]);
            }
        }
    }
    'outer: for c in &combos {
        let reps = c
            .iter()
            .map(|a| RMod::representable(r, *a).map(Arc::new))
            .collect::<Result<Vec<_>>>()?;
        let p = direct_sum(&reps)?.module;
        if p.cardinality() > 256 {
            continue;
        }
        let pe = bc.extend(&p)?;
        for sub in all_submodules(&p, opts.budget)? {
            let se = bc.extend(&sub.module)?;
            let f = bc.extend_hom(&sub.incl, &se, &pe)?;
            checked += 1;
            if !f.is_mono() {
                failure = Some(
                    json!({"middle": c.iter().map(|a| r.objects()[*a].clone()).collect::<Vec<_>>(),
                    "sub_values": sub.module.values().iter().map(|v| v.to_string()).collect::<Vec<_>>()}),
                );
                break 'outer;
            }
        }
    }
    let exact = MethodOutcome {
        method: "preserves-monos".into(),
        verdict: Some(failure.is_none()),
        note: Some(format!("{checked} inclusions tested")),
        evidence: failure,
    };
    // route 2: the columns of the bimodule are flat left modules
    let mut col_fail = None;
    let mut notes = Vec::new();
    for b in 0..phi.tgt.n() {
        let v = is_flat(bc.bimodule.left_slice(b), FlatMethod::Fiber, opts)?;
        if !v.holds {
            col_fail = Some(json!({"column": phi.tgt.objects()[b], "evidence": v.outcomes}));
            break;
        }
        if let Some(n) = v.outcomes.iter().find_map(|o| o.note.clone()) {
            notes.push(n);
        }
    }
    let cols = MethodOutcome {
        method: "columns-flat".into(),
        verdict: Some(col_fail.is_none()),
        note: (!notes.is_empty()).then(|| notes.join("; ")),
        evidence: col_fail,
    };
    Verdict::from_outcomes(vec![exact, cols])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::FinAb;
    use crate::diagram::SmallCat;
    use crate::module::{hom_modules, submodule_generated};
    use crate::ringoid::{linearize, ringoid_of_ring, RingSpec};
    use crate::tensor::{is_pure, pure_closure};

    fn ring(spec: RingSpec) -> Arc<Ringoid> {
        Arc::new(ringoid_of_ring(&spec).unwrap())
    }

    fn cyclic(r: &Arc<Ringoid>, k: i64) -> Arc<RMod> {
        let v = FinAb::cyclic(k);
        Arc::new(
            RMod::from_fn(r.clone(), vec![v.clone()], |_, _, x| {
                AbHom::from_images(
                    v.clone(),
                    v.clone(),
                    &v.gens()
                        .iter()
                        .map(|g| v.scale(x[0], g))
                        .collect::<Vec<_>>(),
                )
            })
            .unwrap(),
        )
    }

    fn quotient(n: i64, k: i64) -> AddFunctor {
        AddFunctor::from_ring_map(&ring(RingSpec::Zn(n)), &ring(RingSpec::Zn(k)), &[vec![1]])
            .unwrap()
    }

    /// `Z/6 → Z/2` picking out the idempotent `3`.
    fn projection6() -> AddFunctor {
        quotient(6, 2)
    }

    #[test]
    fn restriction_examples() {
        let r = ring(RingSpec::Zn(4));
        let n = cyclic(&r, 4);
        let id = AddFunctor::identity(&r);
        let rn = restrict_scalars(&id, &n).unwrap();
        assert_eq!(rn.values(), n.values());
        let q = quotient(4, 2);
        let z2 = cyclic(&q.tgt, 2);
        let rz = restrict_scalars(&q, &z2).unwrap();
        assert!(rz.validate().all_pass());
        assert_eq!(rz.act(0, 0, &[2], &[1]), vec![0]);
        assert_eq!(rz.act(0, 0, &[3], &[1]), vec![1]);
        assert_eq!(rz.cardinality(), 2);
    }

    #[test]
    fn extension_examples() {
        let q = quotient(4, 2);
        let bc = BaseChange::new(&q).unwrap();
        let h = Arc::new(RMod::representable(&q.src, 0).unwrap());
        let e = bc.extend(&h).unwrap();
        assert_eq!(e.module.value(0), q.tgt.hom(0, 0));
        assert!(e.module.validate().all_pass());
        let e2 = bc.extend(&cyclic(&q.src, 2)).unwrap();
        assert_eq!(e2.module.value(0).factors(), &[2]);
        assert!(bc
            .extend(&Arc::new(RMod::zero(&q.src)))
            .unwrap()
            .module
            .is_zero());
        let r = Arc::new(linearize(&SmallCat::arrow(), 2).unwrap());
        let id = BaseChange::new(&AddFunctor::identity(&r)).unwrap();
        for a in 0..2 {
            let h = Arc::new(RMod::representable(&r, a).unwrap());
            assert_eq!(id.extend(&h).unwrap().module.values(), h.values());
        }
    }

    #[test]
    fn triangles_and_adjunction_counts() {
        let cases = [
            (quotient(4, 2), 4),
            (projection6(), 6),
            (AddFunctor::identity(&ring(RingSpec::Zn(4))), 4),
        ];
        for (phi, n) in cases {
            let bc = BaseChange::new(&phi).unwrap();
            let ms = [
                cyclic(&phi.src, n),
                cyclic(&phi.src, 2),
                Arc::new(RMod::zero(&phi.src)),
            ];
            let ns = [
                cyclic(&phi.tgt, phi.tgt.hom(0, 0).exponent()),
                Arc::new(RMod::zero(&phi.tgt)),
            ];
            for m in &ms {
                for nn in &ns {
                    let rep = adjunction(&bc, m, nn).unwrap();
                    assert!(rep.holds(), "{rep:?}");
                    let ext = bc.extend(m).unwrap();
                    let lhs = hom_modules(&ext.module, nn).unwrap().order();
                    let rhs = hom_modules(m, &bc.restrict(nn).unwrap()).unwrap().order();
                    assert_eq!(lhs, rhs);
                }
            }
        }
        let t = ring(RingSpec::Triangular { field: 2, size: 2 });
        let bc = BaseChange::new(&AddFunctor::identity(&t)).unwrap();
        let h = Arc::new(RMod::representable(&t, 0).unwrap());
        assert!(adjunction(&bc, &h, &h).unwrap().holds());
    }

    #[test]
    fn composition_iso_examples() {
        let q = quotient(4, 2);
        let id2 = AddFunctor::identity(&q.tgt);
        let (bq, bid) = (BaseChange::new(&q).unwrap(), BaseChange::new(&id2).unwrap());
        let bcomp = BaseChange::new(&q.then(&id2)).unwrap();
        for m in [cyclic(&q.src, 4), cyclic(&q.src, 2)] {
            let f = composition_iso(&bq, &bid, &bcomp, &m).unwrap();
            assert!(f.is_natural() && f.is_iso());
            assert_eq!(f.tgt.value(0).factors(), &[2]);
        }
        let r = Arc::new(linearize(&SmallCat::toy_p1(), 2).unwrap());
        let id = AddFunctor::identity(&r);
        let b = BaseChange::new(&id).unwrap();
        for a in 0..3 {
            let m = Arc::new(RMod::representable(&r, a).unwrap());
            let f = composition_iso(&b, &b, &b, &m).unwrap();
            assert!(f.is_natural() && f.is_iso());
        }
    }

    #[test]
    fn restriction_composes_on_the_nose() {
        let q = quotient(4, 2);
        let id2 = AddFunctor::identity(&q.tgt);
        let n = cyclic(&q.tgt, 2);
        let a = restrict_scalars(&q, &Arc::new(restrict_scalars(&id2, &n).unwrap())).unwrap();
        let b = restrict_scalars(&q.then(&id2), &n).unwrap();
        assert_eq!(a.values(), b.values());
        for x in q.src.hom(0, 0).elements() {
            assert_eq!(a.action(0, 0, &x), b.action(0, 0, &x));
        }
    }

    #[test]
    fn element_factorizations_recompose() {
        let bc = BaseChange::new(&projection6()).unwrap();
        let m = cyclic(&bc.phi.src, 6);
        let ext = bc.extend(&m).unwrap();
        for z in ext.module.value(0).elements() {
            let t = &ext.parts[0];
            let mut acc = t.group().zero();
            for (a, x, f, c) in element_factorization(&ext, 0, &z) {
                t.group()
                    .add_assign(&mut acc, &t.group().scale(c, &t.pair(a, &x, &f)));
            }
            assert_eq!(acc, z);
        }
    }

    #[test]
    fn functor_flatness_examples() {
        let opts = SearchOptions::default();
        let id = functor_flatness(&AddFunctor::identity(&ring(RingSpec::Zn(4))), &opts).unwrap();
        assert!(id.right.holds && id.left.holds && id.right.agree);
        let q = functor_flatness(&quotient(4, 2), &opts).unwrap();
        assert!(!q.right.holds && q.right.agree, "{:?}", q.right);
        let p = functor_flatness(&projection6(), &opts).unwrap();
        assert!(p.right.holds && p.right.agree && p.left.holds);
    }

    #[test]
    fn flat_extension_keeps_purity() {
        let opts = SearchOptions::default();
        let bc = BaseChange::new(&projection6()).unwrap();
        let m = Arc::new(
            direct_sum(&[cyclic(&bc.phi.src, 6), cyclic(&bc.phi.src, 3)])
                .unwrap()
                .module,
        );
        for x in m.value(0).elements() {
            let n = submodule_generated(&m, &[(0, x)]).unwrap();
            let closure = pure_closure(&n, &opts).unwrap();
            let (se, me) = (bc.extend(&closure.module).unwrap(), bc.extend(&m).unwrap());
            let f = bc.extend_hom(&closure.incl, &se, &me).unwrap();
            assert!(is_pure(&f, &opts).unwrap().holds);
        }
    }
}
