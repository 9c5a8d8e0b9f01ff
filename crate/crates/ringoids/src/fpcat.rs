//! Truncated categories of finitely presented modules, the Yoneda functor into additive
//! functors on them, and the induced representation by such categories.
//!
//! The skeleton keeps one representative per isomorphism class of modules with at most
//! `g` generators. Functors on it are right modules over the skeleton as a ringoid.

use std::sync::{Arc, OnceLock};

use serde::Serialize;
use serde_json::json;

use crate::abelian::{AbHom, Elem, FinAb};
use crate::basechange::{composition_iso, restrict_scalars, BaseChange};
use crate::check::Validation;
use crate::diagram::{
    diag_sub, diag_tensor, diag_tensor_map, ext_zero, DiagModHom, DiagModule, DiagSub,
    Representation,
};
use crate::error::{invalid, AlgError, Result};
use crate::module::{
    all_submodules, direct_sum, find_iso, hom_modules, same_base, yoneda_map, HomSet, ModHom, RMod,
    Submodule,
};
use crate::ringoid::{AddFunctor, Ringoid};
use crate::tensor::{
    bounded_left_modules, is_flat, is_pure, FlatMethod, SearchOptions, TensorExt, Verdict,
};

/// Largest hom group searched when deciding isomorphism.
const ISO_BUDGET: u64 = 1 << 20;

#[derive(Clone, Debug)]
pub struct FpSkeleton {
    pub ring: Arc<Ringoid>,
    pub g: usize,
    objects: Vec<Arc<RMod>>,
    /// `homs[a][b] = Hom(K_a, K_b)`.
    homs: Vec<Vec<HomSet>>,
    ringoid: Arc<Ringoid>,
    /// Index of the representative of `R_R` and an isomorphism `R_R → K_reg`.
    regular: Option<(usize, ModHom)>,
    regular_module: Arc<RMod>,
}

fn check_ring(ring: &Ringoid) -> Result<()> {
    if !ring.is_ring() {
        return invalid(format!("{} has more than one object", ring.name));
    }
    Ok(())
}

/// Quotients of `R^k`, `k ≤ g`, up to isomorphism; representatives are the first found
/// in order of generator count, then cardinality, then additive group.
pub fn fp_skeleton(ring: &Arc<Ringoid>, g: usize, budget: usize) -> Result<FpSkeleton> {
    check_ring(ring)?;
    let regular_module = Arc::new(RMod::representable(ring, 0)?);
    let mut objects: Vec<Arc<RMod>> = vec![Arc::new(RMod::zero(ring))];
    for k in 1..=g {
        let free = direct_sum(&vec![regular_module.clone(); k])?.module;
        let mut layer = all_submodules(&free, budget)?
            .iter()
            .map(|s| s.quotient().map(|(q, _)| q))
            .collect::<Result<Vec<_>>>()?;
        layer.sort_by(|x, y| (x.cardinality(), x.value(0)).cmp(&(y.cardinality(), y.value(0))));
        for q in layer {
            let mut new = true;
            for o in &objects {
                if find_iso(&q, o, ISO_BUDGET)?.is_some() {
                    new = false;
                    break;
                }
            }
            if new {
                objects.push(q);
                if objects.len() > budget {
                    return Err(AlgError::Budget(format!(
                        "more than {budget} skeleton objects"
                    )));
                }
            }
        }
    }
    let n = objects.len();
    let homs = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| hom_modules(&objects[a], &objects[b]))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let groups: Vec<Vec<FinAb>> = homs
        .iter()
        .map(|r| r.iter().map(|h| h.group().clone()).collect())
        .collect();
    let ids = (0..n)
        .map(|a| {
            homs[a][a]
                .from_modhom(&ModHom::identity(&objects[a]))
                .expect("identity is natural")
        })
        .collect();
    let compose = Ringoid::bilinear_from(n, &groups, |a, b, c, i, j| {
        let g = homs[b][c].to_modhom(&groups[b][c].gen(i));
        let f = homs[a][b].to_modhom(&groups[a][b].gen(j));
        homs[a][c]
            .from_modhom(&g.compose(&f))
            .expect("composite is natural")
    });
    let mut names: Vec<String> = Vec::new();
    for o in &objects {
        let base = if o.is_zero() {
            "0".to_string()
        } else {
            o.value(0).to_string()
        };
        let mut name = base.clone();
        let mut k = 2;
        while names.contains(&name) {
            name = format!("{base}#{k}");
            k += 1;
        }
        names.push(name);
    }
    let ringoid = Arc::new(Ringoid::new(
        format!("mod({})<={g}", ring.name),
        names,
        groups,
        ids,
        compose,
    )?);
    let mut sk = FpSkeleton {
        ring: ring.clone(),
        g,
        objects,
        homs,
        ringoid,
        regular: None,
        regular_module,
    };
    if g >= 1 {
        let (idx, iota) = sk.tag(&sk.regular_module.clone())?;
        sk.regular = Some((idx, iota));
    }
    Ok(sk)
}

impl FpSkeleton {
    pub fn n(&self) -> usize {
        self.objects.len()
    }

    pub fn objects(&self) -> &[Arc<RMod>] {
        &self.objects
    }

    pub fn object(&self, a: usize) -> &Arc<RMod> {
        &self.objects[a]
    }

    pub fn ringoid(&self) -> &Arc<Ringoid> {
        &self.ringoid
    }

    pub fn hom_set(&self, a: usize, b: usize) -> &HomSet {
        &self.homs[a][b]
    }

    /// The module map behind `z ∈ hom(a, b)`.
    pub fn to_map(&self, a: usize, b: usize, z: &[i64]) -> ModHom {
        self.homs[a][b].to_modhom(z)
    }

    pub fn from_map(&self, a: usize, b: usize, f: &ModHom) -> Result<Elem> {
        self.homs[a][b].from_modhom(f).ok_or_else(|| {
            AlgError::Invalid(format!("map is not a module homomorphism {a} -> {b}"))
        })
    }

    /// The representative isomorphic to `m`, with an isomorphism `m → K`.
    pub fn tag(&self, m: &Arc<RMod>) -> Result<(usize, ModHom)> {
        if !same_base(m.base(), &self.ring) {
            return Err(AlgError::BaseMismatch(format!(
                "module is not over {}",
                self.ring.name
            )));
        }
        for (a, o) in self.objects.iter().enumerate() {
            if let Some(iso) = find_iso(m, o, ISO_BUDGET)? {
                return Ok((a, iso));
            }
        }
        invalid(format!("module needs more than {} generators", self.g))
    }

    /// Index of the regular module and `ι: R_R → K_reg`.
    pub fn regular(&self) -> Result<(usize, &ModHom)> {
        match &self.regular {
            Some((a, iota)) => Ok((*a, iota)),
            None => invalid("the skeleton with no generators does not contain the ring"),
        }
    }

    pub fn regular_module(&self) -> &Arc<RMod> {
        &self.regular_module
    }

    /// Left multiplication by `r`, transported to the regular representative.
    pub fn left_mult(&self, r: &[i64]) -> Result<Elem> {
        let (reg, iota) = self.regular()?;
        let h = &self.regular_module;
        let add = self.ring.hom(0, 0);
        let imgs: Vec<Elem> = add
            .gens()
            .iter()
            .map(|x| self.ring.compose(0, 0, 0, r, x))
            .collect();
        let lam = ModHom::new(
            h.clone(),
            h.clone(),
            vec![AbHom::from_images(add.clone(), add.clone(), &imgs)?],
        )?;
        let inv = iota.inverse().expect("regular tag is an isomorphism");
        self.from_map(reg, reg, &iota.compose(&lam).compose(&inv))
    }

    pub fn validate(&self) -> Validation {
        let mut v = Validation::new(format!("skeleton {}", self.ringoid.name));
        v.merge("ringoid ", self.ringoid.validate());
        let mut wit = None;
        'p: for a in 0..self.n() {
            for b in a + 1..self.n() {
                if let Ok(Some(_)) = find_iso(&self.objects[a], &self.objects[b], ISO_BUDGET) {
                    wit = Some(
                        json!({"objects": [&self.ringoid.objects()[a], &self.ringoid.objects()[b]]}),
                    );
                    break 'p;
                }
            }
        }
        v.record("pairwise-non-isomorphic", wit);
        v
    }
}

// ---------------------------------------------------------------------------
// Yoneda

/// `Hom(−, M)` restricted to the skeleton, with the hom sets giving its values.
#[derive(Clone, Debug)]
pub struct YonedaImage {
    pub source: Arc<RMod>,
    pub functor: Arc<RMod>,
    pub homs: Vec<HomSet>,
}

pub fn yoneda(m: &Arc<RMod>, sk: &FpSkeleton) -> Result<YonedaImage> {
    let homs = sk
        .objects
        .iter()
        .map(|k| hom_modules(k, m))
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<FinAb> = homs.iter().map(|h| h.group().clone()).collect();
    let functor = RMod::from_fn(sk.ringoid.clone(), values.clone(), |a, b, r| {
        let rm = sk.to_map(a, b, r);
        let imgs = values[b]
            .gens()
            .iter()
            .map(|z| {
                let phi = homs[b].to_modhom(z);
                homs[a]
                    .from_modhom(&phi.compose(&rm))
                    .ok_or_else(|| AlgError::Invalid("precomposition".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        AbHom::from_images(values[b].clone(), values[a].clone(), &imgs)
    })?;
    Ok(YonedaImage {
        source: m.clone(),
        functor: Arc::new(functor),
        homs,
    })
}

/// `Y(f)`: postcomposition with `f`.
pub fn yoneda_hom(f: &ModHom, src: &YonedaImage, tgt: &YonedaImage) -> Result<ModHom> {
    let comps = (0..src.homs.len())
        .map(|a| {
            let g = src.functor.value(a);
            let imgs = g
                .gens()
                .iter()
                .map(|z| {
                    tgt.homs[a]
                        .from_modhom(&f.compose(&src.homs[a].to_modhom(z)))
                        .ok_or_else(|| AlgError::Invalid("postcomposition".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            AbHom::from_images(g.clone(), tgt.functor.value(a).clone(), &imgs)
        })
        .collect::<Result<Vec<_>>>()?;
    ModHom::new(src.functor.clone(), tgt.functor.clone(), comps)
}

/// Evaluation at the ring: `F(R)` with `r` acting as `F(λ_r)`.
pub fn yoneda_inv(f: &Arc<RMod>, sk: &FpSkeleton) -> Result<Arc<RMod>> {
    if !same_base(f.base(), &sk.ringoid) {
        return Err(AlgError::BaseMismatch(format!(
            "functor is not over {}",
            sk.ringoid.name
        )));
    }
    let (reg, _) = sk.regular()?;
    let v = f.value(reg).clone();
    let m = RMod::from_fn(sk.ring.clone(), vec![v], |_, _, r| {
        Ok(f.action(reg, reg, &sk.left_mult(r)?))
    })?;
    Ok(Arc::new(m))
}

/// `Y^{-1}(Φ) = Φ_R`.
pub fn yoneda_inv_hom(
    phi: &ModHom,
    src: &Arc<RMod>,
    tgt: &Arc<RMod>,
    sk: &FpSkeleton,
) -> Result<ModHom> {
    let (reg, _) = sk.regular()?;
    ModHom::new(src.clone(), tgt.clone(), vec![phi.comp(reg).clone()])
}

/// `ε_M: Y^{-1}Y(M) → M`, `φ ↦ φ(1)`; returns the evaluated module too.
pub fn yoneda_counit(y: &YonedaImage, sk: &FpSkeleton) -> Result<(Arc<RMod>, ModHom)> {
    let (reg, iota) = sk.regular()?;
    let inv = yoneda_inv(&y.functor, sk)?;
    let one = iota.apply(0, sk.ring.id(0));
    let g = inv.value(0);
    let imgs: Vec<Elem> = g
        .gens()
        .iter()
        .map(|z| y.homs[reg].to_modhom(z).apply(0, &one))
        .collect();
    let h = AbHom::from_images(g.clone(), y.source.value(0).clone(), &imgs)?;
    let eps = ModHom::new(inv.clone(), y.source.clone(), vec![h])?;
    Ok((inv, eps))
}

/// `η_F: F → Y(Y^{-1}F)` with `(η_F)_K(t)(k) = F(k)(t)`, reading `k ∈ K` as `R → K`.
pub fn yoneda_unit(f: &Arc<RMod>, sk: &FpSkeleton) -> Result<(YonedaImage, ModHom)> {
    let (reg, iota) = sk.regular()?;
    let inv = yoneda_inv(f, sk)?;
    let yy = yoneda(&inv, sk)?;
    let iota_inv = iota.inverse().expect("regular tag is an isomorphism");
    let h = sk.regular_module.clone();
    let comps = (0..sk.n())
        .map(|a| {
            let k = &sk.objects[a];
            // ĸ ∈ hom(reg, a) for each generator of K
            let hats = k
                .value(0)
                .gens()
                .iter()
                .map(|x| sk.from_map(reg, a, &yoneda_map(&h, k, 0, x)?.compose(&iota_inv)))
                .collect::<Result<Vec<_>>>()?;
            let imgs = f
                .value(a)
                .gens()
                .iter()
                .map(|t| {
                    let vals: Vec<Elem> = hats.iter().map(|kh| f.act(reg, a, kh, t)).collect();
                    let map = ModHom::new(
                        k.clone(),
                        inv.clone(),
                        vec![AbHom::from_images(
                            k.value(0).clone(),
                            inv.value(0).clone(),
                            &vals,
                        )?],
                    )?;
                    yy.homs[a]
                        .from_modhom(&map)
                        .ok_or_else(|| AlgError::Invalid("unit is not linear".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            AbHom::from_images(f.value(a).clone(), yy.functor.value(a).clone(), &imgs)
        })
        .collect::<Result<Vec<_>>>()?;
    let eta = ModHom::new(f.clone(), yy.functor.clone(), comps)?;
    Ok((yy, eta))
}

/// Module axioms plus `F(A ⊕ B) ≅ F(A) ⊕ F(B)` whenever `A ⊕ B` lies in the skeleton.
pub fn validate_fp_functor(f: &Arc<RMod>, sk: &FpSkeleton) -> Result<Validation> {
    let mut v = Validation::new("finitely presented functor");
    v.merge("", f.validate());
    let mut wit = None;
    'p: for a in 0..sk.n() {
        for b in a..sk.n() {
            let s = direct_sum(&[sk.objects[a].clone(), sk.objects[b].clone()])?;
            let Ok((c, t)) = sk.tag(&s.module) else {
                continue;
            };
            let ia = sk.from_map(a, c, &t.compose(&s.inj[0]))?;
            let ib = sk.from_map(b, c, &t.compose(&s.inj[1]))?;
            let (fa, fb) = (f.action(a, c, &ia), f.action(b, c, &ib));
            let sum = crate::abelian::DirectSum::new(&[f.value(a).clone(), f.value(b).clone()])?;
            let both = sum.inj[0].compose(&fa).add(&sum.inj[1].compose(&fb));
            if !both.is_iso() {
                wit = Some(
                    json!({"objects": [&sk.ringoid.objects()[a], &sk.ringoid.objects()[b]],
                    "sum": &sk.ringoid.objects()[c]}),
                );
                break 'p;
            }
        }
    }
    v.record("additive-on-sums", wit);
    Ok(v)
}

pub fn is_flat_functor(f: &Arc<RMod>, method: FlatMethod, opts: &SearchOptions) -> Result<Verdict> {
    is_flat(f, method, opts)
}

/// The functor with value `Z/2` at object `a`, zero elsewhere, endomorphisms acting through
/// their first coordinate mod 2. Errors if that is not a module.
pub fn simple_functor(sk: &FpSkeleton, a: usize) -> Result<Arc<RMod>> {
    let r = &sk.ringoid;
    let e = r.hom(a, a);
    if e.rank() != 1 || e.factors()[0] % 2 != 0 || r.id(a)[0] % 2 == 0 {
        return invalid("endomorphisms do not map onto F_2 through the first coordinate");
    }
    let two = FinAb::cyclic(2);
    let values: Vec<FinAb> = (0..r.n())
        .map(|b| {
            if b == a {
                two.clone()
            } else {
                FinAb::trivial()
            }
        })
        .collect();
    let m = RMod::from_fn(r.clone(), values.clone(), |x, y, s| {
        if x == a && y == a {
            Ok(AbHom::identity(&two).scale(s[0]))
        } else {
            Ok(AbHom::zero(&values[y], &values[x]))
        }
    })?;
    if !m.validate().all_pass() {
        return invalid("the simple functor is not a module on this skeleton");
    }
    Ok(Arc::new(m))
}

#[derive(Clone, Debug, Serialize)]
pub struct YonedaPurity {
    /// Every map from a skeleton object into `M/N` lifts to `M`.
    pub yoneda: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub direct: Verdict,
    pub agree: bool,
}

/// Purity of `N ↪ M` through exactness of `0 → Y(N) → Y(M) → Y(M/N) → 0`.
pub fn purity_via_yoneda(
    incl: &ModHom,
    sk: &FpSkeleton,
    opts: &SearchOptions,
) -> Result<YonedaPurity> {
    let (_, p) = incl.cokernel()?;
    let mut witness = None;
    for (a, k) in sk.objects.iter().enumerate() {
        if !lifts_all(k, &p)? {
            witness = Some(sk.ringoid.objects()[a].clone());
            break;
        }
    }
    let direct = is_pure(incl, opts)?;
    let yoneda = witness.is_none();
    Ok(YonedaPurity {
        yoneda,
        witness,
        agree: yoneda == direct.holds,
        direct,
    })
}

/// Surjectivity of `Hom(K, M) → Hom(K, Q)` for `p: M → Q`.
fn lifts_all(k: &Arc<RMod>, p: &ModHom) -> Result<bool> {
    let hm = hom_modules(k, &p.src)?;
    let hq = hom_modules(k, &p.tgt)?;
    let imgs = hm
        .group()
        .gens()
        .iter()
        .map(|z| {
            hq.from_modhom(&p.compose(&hm.to_modhom(z)))
                .ok_or_else(|| AlgError::Invalid("composite".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AbHom::from_images(hm.group().clone(), hq.group().clone(), &imgs)?.is_surjective())
}

// ---------------------------------------------------------------------------
// Induced functors between skeleta

/// `Φ = φ_!` restricted to skeleta, with `t_K: φ_!K → Φ(K)` for each object.
#[derive(Clone, Debug)]
pub struct Induced {
    pub functor: AddFunctor,
    pub change: BaseChange,
    pub exts: Vec<TensorExt>,
    pub tags: Vec<ModHom>,
    pub tag_invs: Vec<ModHom>,
    skeleton_change: OnceLock<BaseChange>,
}

pub fn induced_functor(phi: &AddFunctor, skr: &FpSkeleton, sks: &FpSkeleton) -> Result<Induced> {
    if !same_base(&phi.src, &skr.ring) || !same_base(&phi.tgt, &sks.ring) {
        return Err(AlgError::BaseMismatch(
            "ring map does not match the skeleta".into(),
        ));
    }
    let change = BaseChange::new(phi)?;
    let mut exts = Vec::new();
    let mut obj = Vec::new();
    let mut tags = Vec::new();
    let mut tag_invs = Vec::new();
    for k in &skr.objects {
        let e = change.extend(k)?;
        let (o, t) = sks.tag(&e.module)?;
        tag_invs.push(t.inverse().expect("tag is an isomorphism"));
        exts.push(e);
        obj.push(o);
        tags.push(t);
    }
    let n = skr.n();
    let maps = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let src = skr.ringoid.hom(a, b);
                    let imgs = src
                        .gens()
                        .iter()
                        .map(|z| {
                            let f = skr.to_map(a, b, z);
                            let ef = change.extend_hom(&f, &exts[a], &exts[b])?;
                            sks.from_map(
                                obj[a],
                                obj[b],
                                &tags[b].compose(&ef).compose(&tag_invs[a]),
                            )
                        })
                        .collect::<Result<Vec<_>>>()?;
                    AbHom::from_images(src.clone(), sks.ringoid.hom(obj[a], obj[b]).clone(), &imgs)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let functor = AddFunctor::new(skr.ringoid.clone(), sks.ringoid.clone(), obj, maps)?;
    Ok(Induced {
        functor,
        change,
        exts,
        tags,
        tag_invs,
        skeleton_change: OnceLock::new(),
    })
}

impl Induced {
    /// `Φ*`: restriction along the functor between skeleta.
    pub fn pullback(&self, f: &Arc<RMod>) -> Result<Arc<RMod>> {
        restrict_scalars(&self.functor, f).map(Arc::new)
    }

    /// Change of base along the functor between skeleta.
    pub fn skeleton_change(&self) -> Result<&BaseChange> {
        if let Some(bc) = self.skeleton_change.get() {
            return Ok(bc);
        }
        let bc = BaseChange::new(&self.functor)?;
        Ok(self.skeleton_change.get_or_init(|| bc))
    }

    /// `Φ_!`: extension along the functor between skeleta.
    pub fn pushforward(&self, f: &Arc<RMod>) -> Result<TensorExt> {
        self.skeleton_change()?.extend(f)
    }

    /// For `w: K_a → φ*N` given on elements, the map `Φ(K_a) → N` adjoint to it,
    /// `k ⊗ s ↦ N(s)(w(k))` precomposed with `t_K^{-1}`.
    pub fn transport_adjoint(
        &self,
        a: usize,
        w: impl Fn(&[i64]) -> Elem,
        n: &Arc<RMod>,
        sks: &FpSkeleton,
    ) -> Result<ModHom> {
        let ext = &self.exts[a];
        let k = &ext.parts[0].m;
        let sring = &self.change.phi.tgt;
        let g = ext.parts[0].map_pairs(n.value(0), |_, i, j| {
            n.act(0, 0, &sring.hom(0, 0).gen(j), &w(&k.value(0).gen(i)))
        })?;
        let h = g.compose(self.tag_invs[a].comp(0));
        ModHom::new(sks.objects[self.functor.obj[a]].clone(), n.clone(), vec![h])
    }
}

/// `Φ*Y(N) ≅ Y(φ*N)`.
pub fn pullback_commutes(
    ind: &Induced,
    skr: &FpSkeleton,
    sks: &FpSkeleton,
    n: &Arc<RMod>,
) -> Result<bool> {
    let lhs = ind.pullback(&yoneda(n, sks)?.functor)?;
    let rhs = yoneda(&ind.change.restrict(n)?, skr)?.functor;
    Ok(find_iso(&lhs, &rhs, ISO_BUDGET)?.is_some())
}

/// `Φ_!Y(M) ≅ Y(φ_!M)`.
pub fn pushforward_commutes(
    ind: &Induced,
    sks: &FpSkeleton,
    skr: &FpSkeleton,
    m: &Arc<RMod>,
) -> Result<bool> {
    let lhs = ind.pushforward(&yoneda(m, skr)?.functor)?.module;
    let rhs = yoneda(&ind.change.extend(m)?.module, sks)?.functor;
    Ok(find_iso(&lhs, &rhs, ISO_BUDGET)?.is_some())
}

#[derive(Clone, Debug, Serialize)]
pub struct AdjointInvertibility {
    /// `g: φ_!M → N` adjoint to `f` is an isomorphism.
    pub module_level: bool,
    /// `G: Φ_!Y(M) → Y(N)` adjoint to the induced `Y(M) → Φ*Y(N)` is an isomorphism.
    pub functor_level: bool,
}

impl AdjointInvertibility {
    pub fn agree(&self) -> bool {
        self.module_level == self.functor_level
    }
}

/// Compares invertibility of the adjoints of `f: M → φ*N` on modules and on functors.
pub fn adjoint_invertibility(
    ind: &Induced,
    skr: &FpSkeleton,
    sks: &FpSkeleton,
    f: &ModHom,
    n: &Arc<RMod>,
) -> Result<AdjointInvertibility> {
    let bc = &ind.change;
    let m = &f.src;
    let ext_m = bc.extend(m)?;
    let ext_rn = bc.extend(&f.tgt)?;
    let g = bc
        .counit(n, &ext_rn)?
        .compose(&bc.extend_hom(f, &ext_m, &ext_rn)?);
    // functor level
    let ym = yoneda(m, skr)?;
    let yn = yoneda(n, sks)?;
    let pulled = ind.pullback(&yn.functor)?;
    let comps = (0..skr.n())
        .map(|a| {
            let src = ym.functor.value(a);
            let imgs = src
                .gens()
                .iter()
                .map(|z| {
                    let h = ym.homs[a].to_modhom(z);
                    let adj = ind.transport_adjoint(a, |x| f.apply(0, &h.apply(0, x)), n, sks)?;
                    yn.homs[ind.functor.obj[a]]
                        .from_modhom(&adj)
                        .ok_or_else(|| AlgError::Invalid("adjoint".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            AbHom::from_images(src.clone(), pulled.value(a).clone(), &imgs)
        })
        .collect::<Result<Vec<_>>>()?;
    let big_f = ModHom::new(ym.functor.clone(), pulled.clone(), comps)?;
    let sbc = ind.skeleton_change()?;
    let e_src = sbc.extend(&ym.functor)?;
    let e_tgt = sbc.extend(&pulled)?;
    let big_g = sbc
        .counit(&yn.functor, &e_tgt)?
        .compose(&sbc.extend_hom(&big_f, &e_src, &e_tgt)?);
    Ok(AdjointInvertibility {
        module_level: g.is_iso(),
        functor_level: big_g.is_iso(),
    })
}

// ---------------------------------------------------------------------------
// The induced representation by skeleta

/// A strict representation by rings together with its representation by skeleta.
#[derive(Clone, Debug)]
pub struct Rfp {
    pub base: Arc<Representation>,
    pub g: usize,
    pub skeleta: Vec<Arc<FpSkeleton>>,
    pub induced: Vec<Induced>,
    pub rep: Arc<Representation>,
}

pub fn build_rfp(base: &Arc<Representation>, g: usize, budget: usize) -> Result<Rfp> {
    let ix = &base.index;
    if !base.is_strict() || base.rings().iter().any(|r| !r.is_ring()) {
        return Err(AlgError::Hypothesis(
            "needs a strict representation by rings".into(),
        ));
    }
    let skeleta = (0..ix.n())
        .map(|c| fp_skeleton(base.ring(c), g, budget).map(Arc::new))
        .collect::<Result<Vec<_>>>()?;
    let induced = (0..ix.m())
        .map(|al| induced_functor(base.functor(al), &skeleta[ix.src(al)], &skeleta[ix.tgt(al)]))
        .collect::<Result<Vec<_>>>()?;
    // δ_K = t_K ∘ (k ↦ k ⊗ 1)
    let mut delta = Vec::new();
    for c in 0..ix.n() {
        let (sk, ind) = (&skeleta[c], &induced[ix.id(c)]);
        let one = base.ring(c).id(0);
        let comps = (0..sk.n())
            .map(|a| {
                let k = &sk.objects[a];
                let ext = &ind.exts[a];
                let imgs: Vec<Elem> = k
                    .value(0)
                    .gens()
                    .iter()
                    .map(|x| ext.parts[0].pair(0, x, one))
                    .collect();
                let unit =
                    AbHom::from_images(k.value(0).clone(), ext.module.value(0).clone(), &imgs)?;
                let o = ind.functor.obj[a];
                let d = ModHom::new(
                    k.clone(),
                    sk.objects[o].clone(),
                    vec![ind.tags[a].comp(0).compose(&unit)],
                )?;
                sk.from_map(a, o, &d)
            })
            .collect::<Result<Vec<_>>>()?;
        delta.push(comps);
    }
    // μ_K = t^{βα}_K ∘ (composition) ∘ φ_β!(t^α_K)^{-1} ∘ (t^β_{Φ_α K})^{-1}
    let m = ix.m();
    let mut mu = vec![vec![None; m]; m];
    for (b, a) in ix.composable_pairs() {
        let ba = ix.compose(b, a).expect("composable");
        let (ia, ib, iba) = (&induced[a], &induced[b], &induced[ba]);
        let (skc, ske) = (&skeleta[ix.src(a)], &skeleta[ix.tgt(b)]);
        let comps = (0..skc.n())
            .map(|k| {
                let l = ia.functor.obj[k];
                let outer = ib.change.extend(&ia.exts[k].module)?;
                let back = ib.change.extend_hom(&ia.tag_invs[k], &ib.exts[l], &outer)?;
                let comp = composition_iso(&ia.change, &ib.change, &iba.change, &skc.objects[k])?;
                let total = iba.tags[k]
                    .compose(&comp)
                    .compose(&back)
                    .compose(&ib.tag_invs[l]);
                ske.from_map(ib.functor.obj[l], iba.functor.obj[k], &total)
            })
            .collect::<Result<Vec<_>>>()?;
        mu[b][a] = Some(comps);
    }
    let rings = skeleta.iter().map(|s| s.ringoid.clone()).collect();
    let functors = induced.iter().map(|i| i.functor.clone()).collect();
    let rep = Representation::new(
        format!("{}_fp", base.name),
        ix.clone(),
        rings,
        functors,
        delta,
        mu,
    )?;
    Ok(Rfp {
        base: base.clone(),
        g,
        skeleta,
        induced,
        rep: Arc::new(rep),
    })
}

#[derive(Clone, Debug)]
pub struct DiagYoneda {
    pub module: Arc<DiagModule>,
    pub parts: Vec<YonedaImage>,
}

/// `Y(M)_c = Y_c(M_c)`; the structural map sends `f: K → M_c` to the adjoint of `M_α ∘ f`.
pub fn diag_yoneda(m: &Arc<DiagModule>, rfp: &Rfp) -> Result<DiagYoneda> {
    let ix = &rfp.base.index;
    if !Arc::ptr_eq(&m.rep, &rfp.base) && m.rep.name != rfp.base.name {
        return Err(AlgError::BaseMismatch(
            "module is not over the base representation".into(),
        ));
    }
    let parts = (0..ix.n())
        .map(|c| yoneda(m.part(c), &rfp.skeleta[c]))
        .collect::<Result<Vec<_>>>()?;
    let module = DiagModule::from_fn(
        &rfp.rep,
        parts.iter().map(|y| y.functor.clone()).collect(),
        |al, a| {
            let (c, d) = (ix.src(al), ix.tgt(al));
            let ind = &rfp.induced[al];
            let (yc, yd) = (&parts[c], &parts[d]);
            let src = yc.functor.value(a);
            let imgs = src
                .gens()
                .iter()
                .map(|z| {
                    let f = yc.homs[a].to_modhom(z);
                    let adj = ind.transport_adjoint(
                        a,
                        |x| m.apply_structural(al, 0, &f.apply(0, x)),
                        m.part(d),
                        &rfp.skeleta[d],
                    )?;
                    yd.homs[ind.functor.obj[a]]
                        .from_modhom(&adj)
                        .ok_or_else(|| AlgError::Invalid("adjoint".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            AbHom::from_images(
                src.clone(),
                yd.functor.value(ind.functor.obj[a]).clone(),
                &imgs,
            )
        },
    )?;
    Ok(DiagYoneda {
        module: Arc::new(module),
        parts,
    })
}

/// `Y(f)` objectwise.
pub fn diag_yoneda_hom(f: &DiagModHom, src: &DiagYoneda, tgt: &DiagYoneda) -> Result<DiagModHom> {
    let comps = (0..src.parts.len())
        .map(|c| yoneda_hom(f.comp(c), &src.parts[c], &tgt.parts[c]))
        .collect::<Result<Vec<_>>>()?;
    DiagModHom::new(src.module.clone(), tgt.module.clone(), comps)
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalFlatness {
    pub parts: Vec<Verdict>,
    pub holds: bool,
}

pub fn is_locally_flat(
    m: &Arc<DiagModule>,
    method: FlatMethod,
    opts: &SearchOptions,
) -> Result<LocalFlatness> {
    let parts = m
        .parts()
        .iter()
        .map(|p| is_flat_functor(p, method, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(LocalFlatness {
        holds: parts.iter().all(|v| v.holds),
        parts,
    })
}

#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub module: Arc<DiagModule>,
    /// `Y(reconstruction)` and the unit `𝓜 → Y(reconstruction)`.
    pub image: DiagYoneda,
    pub unit: DiagModHom,
}

impl Reconstruction {
    pub fn is_iso(&self) -> bool {
        self.unit.is_iso() && self.unit.validate().all_pass()
    }
}

/// `M_c = 𝓜_c(R_c)`; `M_α` is `𝓜_α` at the regular object followed by `𝓜_d(u)` for the
/// canonical isomorphism `u: K_reg → Φ_α(K_reg)`.
pub fn reconstruct(
    mm: &Arc<DiagModule>,
    rfp: &Rfp,
    opts: &SearchOptions,
) -> Result<Reconstruction> {
    let ix = &rfp.base.index;
    // the summand test is exact for finite modules and far cheaper than the other criteria
    if !is_locally_flat(mm, FlatMethod::SummandOracle, opts)?.holds {
        return Err(AlgError::Hypothesis("module is not locally flat".into()));
    }
    let parts = (0..ix.n())
        .map(|c| yoneda_inv(mm.part(c), &rfp.skeleta[c]))
        .collect::<Result<Vec<_>>>()?;
    let module = DiagModule::from_fn(&rfp.base, parts.clone(), |al, _| {
        let (c, d) = (ix.src(al), ix.tgt(al));
        let (skc, skd) = (&rfp.skeleta[c], &rfp.skeleta[d]);
        let ind = &rfp.induced[al];
        let (rc, iota_c) = skc.regular()?;
        let (rd, iota_d) = skd.regular()?;
        let bc = &ind.change;
        let hr = skc.regular_module();
        let ext_r = bc.extend(hr)?;
        let one = ext_r.parts[0].pair(0, bc.phi.src.id(0), bc.phi.tgt.id(0));
        let theta = yoneda_map(skd.regular_module(), &ext_r.module, 0, &one)?;
        let ext_iota = bc.extend_hom(iota_c, &ext_r, &ind.exts[rc])?;
        let iota_d_inv = iota_d.inverse().expect("regular tag is an isomorphism");
        let u = ind.tags[rc]
            .compose(&ext_iota)
            .compose(&theta)
            .compose(&iota_d_inv);
        let target = ind.functor.obj[rc];
        let ue = skd.from_map(rd, target, &u)?;
        let md = mm.part(d);
        Ok(md
            .action(rd, target, &ue)
            .compose(mm.structural(al).comp(rc)))
    })?;
    let module = Arc::new(module);
    let image = diag_yoneda(&module, rfp)?;
    let comps = (0..ix.n())
        .map(|c| {
            let (_, eta) = yoneda_unit(mm.part(c), &rfp.skeleta[c])?;
            ModHom::new(
                mm.part(c).clone(),
                image.module.part(c).clone(),
                eta.comps().to_vec(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let unit = DiagModHom::new(mm.clone(), image.module.clone(), comps)?;
    Ok(Reconstruction {
        module,
        image,
        unit,
    })
}

/// The counit `reconstruct(Y(M)) → M`, `φ ↦ φ(1)` objectwise.
pub fn diag_counit(
    recon: &Arc<DiagModule>,
    y: &DiagYoneda,
    m: &Arc<DiagModule>,
    rfp: &Rfp,
) -> Result<DiagModHom> {
    let comps = (0..y.parts.len())
        .map(|c| {
            let (_, eps) = yoneda_counit(&y.parts[c], &rfp.skeleta[c])?;
            ModHom::new(
                recon.part(c).clone(),
                m.part(c).clone(),
                eps.comps().to_vec(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    DiagModHom::new(recon.clone(), m.clone(), comps)
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagPurity {
    pub per_object: Vec<Verdict>,
    pub holds: bool,
    /// Injectivity of `N ⊗ X → M ⊗ X` over extensions by zero of bounded test modules; posets only.
    pub tensor_check: Option<bool>,
    pub agree: Option<bool>,
}

/// Objectwise purity of `N ⊆ M`, cross-checked by tensoring on posets.
pub fn diag_pure_exact(sub: &DiagSub, opts: &SearchOptions) -> Result<DiagPurity> {
    let m = sub.ambient();
    let rep = &m.rep;
    let per_object = sub
        .parts
        .iter()
        .map(|p| is_pure(&p.incl, opts))
        .collect::<Result<Vec<_>>>()?;
    let holds = per_object.iter().all(|v| v.holds);
    let mut tensor_check = None;
    if rep.index.is_poset() {
        let op = Arc::new(rep.opposite()?);
        let incl = &sub.incl;
        let mut ok = true;
        'objs: for c in 0..rep.index.n() {
            for k in bounded_left_modules(op.ring(c), opts.generators.min(1), opts.budget)? {
                let x = ext_zero(&op, c, &k)?;
                let s = diag_tensor(&sub.module, &x.module)?;
                let t = diag_tensor(m, &x.module)?;
                if !diag_tensor_map(&s, &t, incl, &DiagModHom::identity(&x.module)).is_injective() {
                    ok = false;
                    break 'objs;
                }
            }
        }
        tensor_check = Some(ok);
    }
    let agree = tensor_check.map(|t| t == holds);
    Ok(DiagPurity {
        per_object,
        holds,
        tensor_check,
        agree,
    })
}

/// Exactness of `0 → Y(N) → Y(M) → Y(M/N) → 0` objectwise.
pub fn yoneda_exact(sub: &DiagSub, rfp: &Rfp) -> Result<bool> {
    for (c, p) in sub.parts.iter().enumerate() {
        let (_, q) = p.incl.cokernel()?;
        for k in rfp.skeleta[c].objects() {
            if !lifts_all(k, &q)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Builds the submodule with the given parts, for sequences given objectwise.
pub fn sequence_from_parts(m: &Arc<DiagModule>, parts: Vec<Submodule>) -> Result<DiagSub> {
    diag_sub(m, parts)
}
