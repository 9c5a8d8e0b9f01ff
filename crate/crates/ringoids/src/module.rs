//! Right modules over a ringoid: additive contravariant functors into finite abelian groups.
//!
//! An action is stored only on the generators of each hom group; the action of an
//! arbitrary morphism is the corresponding integer combination.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::sync::Arc;

use serde_json::{json, Value};

use crate::abelian::{gcd, solve_congruences, subgroup, AbHom, DirectSum, Elem, FinAb, SubGroup};
use crate::check::Validation;
use crate::error::{invalid, AlgError, Result};
use crate::ringoid::Ringoid;

pub fn same_base(a: &Arc<Ringoid>, b: &Arc<Ringoid>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn require_same(a: &Arc<Ringoid>, b: &Arc<Ringoid>) -> Result<()> {
    if same_base(a, b) {
        Ok(())
    } else {
        Err(AlgError::BaseMismatch(format!("{} vs {}", a.name, b.name)))
    }
}

pub(crate) fn hom_json(h: &AbHom) -> Value {
    json!({"src": h.src.factors(), "tgt": h.tgt.factors(), "matrix": h.matrix()})
}

#[derive(Clone, Debug)]
pub struct RMod {
    base: Arc<Ringoid>,
    values: Vec<FinAb>,
    /// `gen_action[a][b][i]`: `value(b) → value(a)` for generator `i` of `hom(a,b)`.
    gen_action: Vec<Vec<Vec<AbHom>>>,
}

impl RMod {
    pub fn new(
        base: Arc<Ringoid>,
        values: Vec<FinAb>,
        gen_action: Vec<Vec<Vec<AbHom>>>,
    ) -> Result<Self> {
        let n = base.n();
        if values.len() != n || gen_action.len() != n || gen_action.iter().any(|r| r.len() != n) {
            return invalid("module data has wrong object count");
        }
        for a in 0..n {
            for b in 0..n {
                let acts = &gen_action[a][b];
                if acts.len() != base.hom(a, b).rank() {
                    return invalid(format!("action list for hom({a},{b}) has wrong length"));
                }
                if acts
                    .iter()
                    .any(|h| h.src != values[b] || h.tgt != values[a])
                {
                    return invalid(format!(
                        "action for hom({a},{b}) has wrong source or target"
                    ));
                }
            }
        }
        Ok(RMod {
            base,
            values,
            gen_action,
        })
    }

    /// Builds the generator actions from a rule giving the action of any morphism.
    pub fn from_fn(
        base: Arc<Ringoid>,
        values: Vec<FinAb>,
        mut act: impl FnMut(usize, usize, &Elem) -> Result<AbHom>,
    ) -> Result<Self> {
        let n = base.n();
        let mut ga = Vec::with_capacity(n);
        for a in 0..n {
            let mut row = Vec::with_capacity(n);
            for b in 0..n {
                let h = base.hom(a, b);
                row.push(
                    (0..h.rank())
                        .map(|i| act(a, b, &h.gen(i)))
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            ga.push(row);
        }
        RMod::new(base, values, ga)
    }

    pub fn zero(base: &Arc<Ringoid>) -> Self {
        let n = base.n();
        let t = FinAb::trivial();
        RMod::from_fn(base.clone(), vec![t.clone(); n], |_, _, _| {
            Ok(AbHom::zero(&t, &t))
        })
        .expect("zero module")
    }

    /// `hom(−, a)` acting by precomposition.
    pub fn representable(base: &Arc<Ringoid>, a: usize) -> Result<Self> {
        let n = base.n();
        let values: Vec<FinAb> = (0..n).map(|b| base.hom(b, a).clone()).collect();
        RMod::from_fn(base.clone(), values, |c, b, r| {
            let src = base.hom(b, a);
            let imgs: Vec<Elem> = src
                .gens()
                .iter()
                .map(|x| base.compose(c, b, a, x, r))
                .collect();
            AbHom::from_images(src.clone(), base.hom(c, a).clone(), &imgs)
        })
    }

    pub fn base(&self) -> &Arc<Ringoid> {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, a: usize) -> &FinAb {
        &self.values[a]
    }

    pub fn values(&self) -> &[FinAb] {
        &self.values
    }

    pub fn gen_action(&self, a: usize, b: usize, i: usize) -> &AbHom {
        &self.gen_action[a][b][i]
    }

    /// `M(r): M(b) → M(a)` for `r ∈ hom(a,b)`.
    pub fn action(&self, a: usize, b: usize, r: &[i64]) -> AbHom {
        let mut acc = AbHom::zero(&self.values[b], &self.values[a]);
        for (ri, h) in r.iter().zip(&self.gen_action[a][b]) {
            if *ri != 0 {
                acc = acc.add(&h.scale(*ri));
            }
        }
        acc
    }

    pub fn act(&self, a: usize, b: usize, r: &[i64], x: &[i64]) -> Elem {
        let mut acc = self.values[a].zero();
        for (ri, h) in r.iter().zip(&self.gen_action[a][b]) {
            if *ri != 0 {
                self.values[a].add_assign(&mut acc, &self.values[a].scale(*ri, &h.apply(x)));
            }
        }
        acc
    }

    /// `Σ_a |M(a)|`.
    pub fn cardinality(&self) -> u64 {
        self.values.iter().map(|v| v.order()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_trivial())
    }

    /// Every `(object, element)` pair, objects in order.
    pub fn elements(&self) -> Vec<(usize, Elem)> {
        (0..self.n())
            .flat_map(|a| self.values[a].elements().map(move |x| (a, x)))
            .collect()
    }

    pub fn validate(&self) -> Validation {
        let r = &self.base;
        let n = self.n();
        let mut v = Validation::new("right module");
        let mut wit = None;
        'wd: for a in 0..n {
            for b in 0..n {
                for (i, h) in self.gen_action[a][b].iter().enumerate() {
                    let ord = r.hom(a, b).factors()[i];
                    if !h.is_well_defined() || !h.scale(ord).is_zero() {
                        wit =
                            Some(json!({"objects": [a, b], "generator": i, "action": hom_json(h)}));
                        break 'wd;
                    }
                }
            }
        }
        v.record("additive", wit);
        let wit = (0..n).find_map(|a| {
            let h = self.action(a, a, r.id(a));
            (!h.is_identity()).then(|| json!({"object": a, "action": hom_json(&h)}))
        });
        v.record("identity", wit);
        let mut wit = None;
        'comp: for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let (hab, hbc) = (r.hom(a, b), r.hom(b, c));
                    for i in 0..hbc.rank() {
                        for j in 0..hab.rank() {
                            let (g, f) = (hbc.gen(i), hab.gen(j));
                            let gf = r.compose(a, b, c, &g, &f);
                            let lhs = self.action(a, c, &gf);
                            let rhs = self.gen_action[a][b][j].compose(&self.gen_action[b][c][i]);
                            if lhs != rhs {
                                wit = Some(json!({"objects": [a, b, c], "g": g, "f": f,
                                    "action_of_composite": hom_json(&lhs), "composite_of_actions": hom_json(&rhs)}));
                                break 'comp;
                            }
                        }
                    }
                }
            }
        }
        v.record("contravariant", wit);
        v
    }

    /// A small generating family, chosen greedily among group generators of the values.
    pub fn generating_set(&self) -> Result<Vec<(usize, Elem)>> {
        let me = Arc::new(self.clone());
        let mut chosen: Vec<(usize, Elem)> = Vec::new();
        let mut current = Submodule::zero(&me);
        for a in 0..self.n() {
            for g in self.values[a].gens() {
                if !current.contains(a, &g) {
                    chosen.push((a, g));
                    current = submodule_generated(&me, &chosen)?;
                }
            }
        }
        Ok(chosen)
    }
}

/// The map `H_a → M` sending `id_a` to `x`.
pub fn yoneda_map(h_a: &Arc<RMod>, m: &Arc<RMod>, a: usize, x: &[i64]) -> Result<ModHom> {
    let r = m.base().clone();
    let comps = (0..r.n())
        .map(|b| {
            let src = r.hom(b, a);
            let imgs: Vec<Elem> = src.gens().iter().map(|f| m.act(b, a, f, x)).collect();
            AbHom::from_images(src.clone(), m.value(b).clone(), &imgs)
        })
        .collect::<Result<Vec<_>>>()?;
    ModHom::new(h_a.clone(), m.clone(), comps)
}

#[derive(Clone, Debug)]
pub struct ModHom {
    pub src: Arc<RMod>,
    pub tgt: Arc<RMod>,
    comps: Vec<AbHom>,
}

impl ModHom {
    /// Checks shapes only; see [`ModHom::validate`] for naturality.
    pub fn new(src: Arc<RMod>, tgt: Arc<RMod>, comps: Vec<AbHom>) -> Result<Self> {
        require_same(src.base(), tgt.base())?;
        if comps.len() != src.n() {
            return invalid("component count differs from object count");
        }
        for (a, c) in comps.iter().enumerate() {
            if &c.src != src.value(a) || &c.tgt != tgt.value(a) {
                return invalid(format!(
                    "component at object {a} has wrong source or target"
                ));
            }
        }
        Ok(ModHom { src, tgt, comps })
    }

    pub fn identity(m: &Arc<RMod>) -> Self {
        let comps = m.values().iter().map(AbHom::identity).collect();
        ModHom {
            src: m.clone(),
            tgt: m.clone(),
            comps,
        }
    }

    pub fn zero(m: &Arc<RMod>, n: &Arc<RMod>) -> Self {
        let comps = (0..m.n())
            .map(|a| AbHom::zero(m.value(a), n.value(a)))
            .collect();
        ModHom {
            src: m.clone(),
            tgt: n.clone(),
            comps,
        }
    }

    pub fn comp(&self, a: usize) -> &AbHom {
        &self.comps[a]
    }

    pub fn comps(&self) -> &[AbHom] {
        &self.comps
    }

    pub fn apply(&self, a: usize, x: &[i64]) -> Elem {
        self.comps[a].apply(x)
    }

    pub fn validate(&self) -> Validation {
        let r = self.src.base();
        let mut v = Validation::new("module homomorphism");
        let mut wit = None;
        'nat: for a in 0..r.n() {
            for b in 0..r.n() {
                for i in 0..r.hom(a, b).rank() {
                    let lhs = self.comps[a].compose(self.src.gen_action(a, b, i));
                    let rhs = self.tgt.gen_action(a, b, i).compose(&self.comps[b]);
                    if lhs != rhs {
                        wit = Some(json!({"objects": [a, b], "generator": i,
                            "left": hom_json(&lhs), "right": hom_json(&rhs)}));
                        break 'nat;
                    }
                }
            }
        }
        v.record("natural", wit);
        v
    }

    pub fn is_natural(&self) -> bool {
        self.validate().all_pass()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ModHom) -> ModHom {
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(f, g)| f.compose(g))
            .collect();
        ModHom {
            src: other.src.clone(),
            tgt: self.tgt.clone(),
            comps,
        }
    }

    pub fn add(&self, other: &ModHom) -> ModHom {
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(f, g)| f.add(g))
            .collect();
        ModHom {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            comps,
        }
    }

    pub fn sub(&self, other: &ModHom) -> ModHom {
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(f, g)| f.sub(g))
            .collect();
        ModHom {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            comps,
        }
    }

    pub fn neg(&self) -> ModHom {
        ModHom {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            comps: self.comps.iter().map(AbHom::neg).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(AbHom::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.comps.iter().all(AbHom::is_identity)
    }

    pub fn is_mono(&self) -> bool {
        self.comps.iter().all(AbHom::is_injective)
    }

    pub fn is_epi(&self) -> bool {
        self.comps.iter().all(AbHom::is_surjective)
    }

    pub fn is_iso(&self) -> bool {
        self.comps.iter().all(AbHom::is_iso)
    }

    pub fn inverse(&self) -> Option<ModHom> {
        let comps = self
            .comps
            .iter()
            .map(AbHom::inverse)
            .collect::<Option<Vec<_>>>()?;
        Some(ModHom {
            src: self.tgt.clone(),
            tgt: self.src.clone(),
            comps,
        })
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.comps.iter().map(hom_json).collect())
    }

    pub fn kernel(&self) -> Result<Submodule> {
        let subs = self
            .comps
            .iter()
            .map(AbHom::kernel)
            .collect::<Result<Vec<_>>>()?;
        Submodule::from_subgroups(&self.src, subs)
    }

    pub fn image(&self) -> Result<Submodule> {
        let subs = self
            .comps
            .iter()
            .map(AbHom::image)
            .collect::<Result<Vec<_>>>()?;
        Submodule::from_subgroups(&self.tgt, subs)
    }

    /// Cokernel with its projection from the target.
    pub fn cokernel(&self) -> Result<(Arc<RMod>, ModHom)> {
        let parts = self
            .comps
            .iter()
            .map(AbHom::cokernel)
            .collect::<Result<Vec<_>>>()?;
        quotient_by_projections(&self.tgt, parts)
    }
}

/// Builds `M/N` from per-object surjections `M(a) → C_a` whose kernels form a submodule.
fn quotient_by_projections(
    m: &Arc<RMod>,
    parts: Vec<(FinAb, AbHom)>,
) -> Result<(Arc<RMod>, ModHom)> {
    let solvers: Vec<_> = parts.iter().map(|(_, p)| p.solver()).collect();
    let values: Vec<FinAb> = parts.iter().map(|(c, _)| c.clone()).collect();
    let q = RMod::from_fn(m.base().clone(), values.clone(), |a, b, r| {
        let imgs = values[b]
            .gens()
            .iter()
            .map(|g| {
                let x = solvers[b]
                    .solve(g)
                    .ok_or_else(|| AlgError::Invalid("projection is not surjective".into()))?;
                Ok(parts[a].1.apply(&m.act(a, b, r, &x)))
            })
            .collect::<Result<Vec<_>>>()?;
        AbHom::from_images(values[b].clone(), values[a].clone(), &imgs)
            .map_err(|_| AlgError::Invalid("quotient action is not well defined".into()))
    })?;
    let q = Arc::new(q);
    let p = ModHom::new(
        m.clone(),
        q.clone(),
        parts.into_iter().map(|(_, p)| p).collect(),
    )?;
    Ok((q, p))
}

/// A submodule, kept as its own module together with the inclusion.
#[derive(Clone, Debug)]
pub struct Submodule {
    pub module: Arc<RMod>,
    pub incl: ModHom,
}

impl Submodule {
    pub fn zero(m: &Arc<RMod>) -> Self {
        let z = Arc::new(RMod::zero(m.base()));
        Submodule {
            incl: ModHom::zero(&z, m),
            module: z,
        }
    }

    pub fn whole(m: &Arc<RMod>) -> Self {
        Submodule {
            module: m.clone(),
            incl: ModHom::identity(m),
        }
    }

    /// Errors unless the subgroups are closed under the action.
    pub fn from_subgroups(m: &Arc<RMod>, subs: Vec<SubGroup>) -> Result<Self> {
        let solvers: Vec<_> = subs.iter().map(|s| s.incl.solver()).collect();
        let values: Vec<FinAb> = subs.iter().map(|s| s.group.clone()).collect();
        let sm = RMod::from_fn(m.base().clone(), values.clone(), |a, b, r| {
            let imgs = (0..values[b].rank())
                .map(|j| {
                    let y = m.act(a, b, r, &subs[b].incl.image_of_gen(j));
                    solvers[a].solve(&y).ok_or_else(|| {
                        AlgError::Invalid(format!(
                            "subgroups are not closed under the action at object {a}"
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            AbHom::from_images(values[b].clone(), values[a].clone(), &imgs)
        })?;
        let sm = Arc::new(sm);
        let incl = ModHom::new(
            sm.clone(),
            m.clone(),
            subs.into_iter().map(|s| s.incl).collect(),
        )?;
        Ok(Submodule { module: sm, incl })
    }

    pub fn ambient(&self) -> &Arc<RMod> {
        &self.incl.tgt
    }

    pub fn contains(&self, a: usize, x: &[i64]) -> bool {
        self.incl.comp(a).solve(x).is_some()
    }

    pub fn cardinality(&self) -> u64 {
        self.module.cardinality()
    }

    /// Images of the group generators of each value, as ambient elements.
    pub fn generators(&self) -> Vec<(usize, Elem)> {
        (0..self.module.n())
            .flat_map(|a| {
                (0..self.module.value(a).rank())
                    .map(move |j| (a, self.incl.comp(a).image_of_gen(j)))
            })
            .collect()
    }

    /// `self ≤ other` inside the same ambient module.
    pub fn is_contained_in(&self, other: &Submodule) -> bool {
        self.generators().iter().all(|(a, x)| other.contains(*a, x))
    }

    /// Per-object sets of ambient element indices; equal keys mean equal submodules.
    pub fn key(&self) -> Vec<Vec<usize>> {
        let amb = self.ambient();
        (0..self.module.n())
            .map(|a| {
                let s: BTreeSet<usize> = self
                    .module
                    .value(a)
                    .elements()
                    .map(|x| amb.value(a).index_of(&self.incl.apply(a, &x)))
                    .collect();
                s.into_iter().collect()
            })
            .collect()
    }

    pub fn join(&self, other: &Submodule) -> Result<Submodule> {
        let mut g = self.generators();
        g.extend(other.generators());
        submodule_generated(self.ambient(), &g)
    }

    /// `M/N` with its projection.
    pub fn quotient(&self) -> Result<(Arc<RMod>, ModHom)> {
        self.incl.cokernel()
    }
}

/// `Z/k` over a one-object ringoid with cyclic additive group, acting by multiplication.
pub fn cyclic_module(r: &Arc<Ringoid>, k: i64) -> Result<RMod> {
    if r.n() != 1 || r.hom(0, 0).rank() != 1 || r.hom(0, 0).factors()[0] % k != 0 {
        return invalid(format!(
            "Z/{k} is not a module over {} by multiplication",
            r.name
        ));
    }
    let v = FinAb::cyclic(k);
    let m = RMod::from_fn(r.clone(), vec![v.clone()], |_, _, x| {
        let imgs: Vec<Elem> = v.gens().iter().map(|g| v.scale(x[0], g)).collect();
        AbHom::from_images(v.clone(), v.clone(), &imgs)
    })?;
    if !m.validate().all_pass() {
        return invalid(format!(
            "Z/{k} is not a module over {} by multiplication",
            r.name
        ));
    }
    Ok(m)
}

/// The smallest submodule containing the given elements.
pub fn submodule_generated(m: &Arc<RMod>, elems: &[(usize, Elem)]) -> Result<Submodule> {
    let r = m.base();
    for (a, x) in elems {
        if *a >= m.n() || !m.value(*a).contains(x) {
            return invalid(format!(
                "element {x:?} does not lie in the value at object {a}"
            ));
        }
    }
    let subs = (0..m.n())
        .map(|b| {
            let mut gens = Vec::new();
            for (a, x) in elems {
                let h = r.hom(b, *a);
                for i in 0..h.rank() {
                    let y = m.gen_action(b, *a, i).apply(x);
                    if !FinAb::is_zero(&y) {
                        gens.push(y);
                    }
                }
            }
            subgroup(m.value(b), &gens)
        })
        .collect::<Result<Vec<_>>>()?;
    Submodule::from_subgroups(m, subs)
}

/// All submodules of `m`, ordered by cardinality then discovery; errors past `budget`.
pub fn all_submodules(m: &Arc<RMod>, budget: usize) -> Result<Vec<Submodule>> {
    let mut cyclic: Vec<Submodule> = Vec::new();
    let mut seen: HashSet<Vec<Vec<usize>>> = HashSet::new();
    let zero = Submodule::zero(m);
    seen.insert(zero.key());
    for (a, x) in m.elements() {
        if FinAb::is_zero(&x) {
            continue;
        }
        let s = submodule_generated(m, &[(a, x)])?;
        if seen.insert(s.key()) {
            cyclic.push(s);
            if cyclic.len() > budget {
                return Err(AlgError::Budget(format!("more than {budget} submodules")));
            }
        }
    }
    let mut out = vec![zero];
    out.extend(cyclic.iter().cloned());
    let mut queue: VecDeque<usize> = (1..out.len()).collect();
    while let Some(i) = queue.pop_front() {
        for c in &cyclic {
            if c.is_contained_in(&out[i]) {
                continue;
            }
            let j = out[i].join(c)?;
            if seen.insert(j.key()) {
                out.push(j);
                queue.push_back(out.len() - 1);
                if out.len() > budget {
                    return Err(AlgError::Budget(format!("more than {budget} submodules")));
                }
            }
        }
    }
    out.sort_by_key(|s| s.cardinality());
    Ok(out)
}

/// Direct sum with injections and projections.
#[derive(Clone, Debug)]
pub struct ModSum {
    pub module: Arc<RMod>,
    pub inj: Vec<ModHom>,
    pub proj: Vec<ModHom>,
}

pub fn direct_sum(parts: &[Arc<RMod>]) -> Result<ModSum> {
    let Some(first) = parts.first() else {
        return invalid("direct sum of an empty list needs a base");
    };
    let r = first.base().clone();
    for p in parts {
        require_same(&r, p.base())?;
    }
    let sums = (0..r.n())
        .map(|a| DirectSum::new(&parts.iter().map(|p| p.value(a).clone()).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<FinAb> = sums.iter().map(|s| s.group.clone()).collect();
    let module = RMod::from_fn(r.clone(), values, |a, b, rr| {
        let mut acc = AbHom::zero(&sums[b].group, &sums[a].group);
        for (k, p) in parts.iter().enumerate() {
            acc = acc.add(
                &sums[a].inj[k]
                    .compose(&p.action(a, b, rr))
                    .compose(&sums[b].proj[k]),
            );
        }
        Ok(acc)
    })?;
    let module = Arc::new(module);
    let mut inj = Vec::new();
    let mut proj = Vec::new();
    for (k, p) in parts.iter().enumerate() {
        inj.push(ModHom::new(
            p.clone(),
            module.clone(),
            sums.iter().map(|s| s.inj[k].clone()).collect(),
        )?);
        proj.push(ModHom::new(
            module.clone(),
            p.clone(),
            sums.iter().map(|s| s.proj[k].clone()).collect(),
        )?);
    }
    Ok(ModSum { module, inj, proj })
}

/// The group of natural transformations `M → N`, found as the kernel of the naturality map.
#[derive(Clone, Debug)]
pub struct HomSet {
    pub src: Arc<RMod>,
    pub tgt: Arc<RMod>,
    /// `(object, target factor, source factor, step)` for each ambient coordinate.
    slots: Vec<(usize, usize, usize, i64)>,
    sub: SubGroup,
}

impl HomSet {
    pub fn group(&self) -> &FinAb {
        &self.sub.group
    }

    pub fn order(&self) -> u64 {
        self.sub.group.order()
    }

    fn map_at(&self, d: &[i64]) -> ModHom {
        let mut mats: Vec<Vec<Vec<i64>>> = (0..self.src.n())
            .map(|a| vec![vec![0; self.src.value(a).rank()]; self.tgt.value(a).rank()])
            .collect();
        for (&(a, i, j, step), c) in self.slots.iter().zip(d) {
            mats[a][i][j] = c * step;
        }
        let comps = mats
            .into_iter()
            .enumerate()
            .map(|(a, m)| {
                AbHom::from_matrix(self.src.value(a).clone(), self.tgt.value(a).clone(), m)
            })
            .collect();
        ModHom {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            comps,
        }
    }

    pub fn to_modhom(&self, z: &[i64]) -> ModHom {
        self.map_at(&self.sub.incl.apply(z))
    }

    /// Coordinates of a natural transformation; `None` if it is not one.
    pub fn from_modhom(&self, f: &ModHom) -> Option<Elem> {
        let d: Elem = self
            .slots
            .iter()
            .map(|&(a, i, j, step)| f.comp(a).matrix()[i][j] / step)
            .collect();
        self.sub.incl.solve(&d)
    }

    /// Deterministic enumeration in the mixed-radix order of [`HomSet::group`].
    pub fn elements(&self) -> impl Iterator<Item = ModHom> + '_ {
        self.group().elements().map(move |z| self.to_modhom(&z))
    }
}

pub fn hom_modules(m: &Arc<RMod>, n: &Arc<RMod>) -> Result<HomSet> {
    require_same(m.base(), n.base())?;
    let r = m.base();
    let mut slots = Vec::new();
    let mut orders = Vec::new();
    for a in 0..r.n() {
        for (i, di) in n.value(a).factors().iter().enumerate() {
            for (j, dj) in m.value(a).factors().iter().enumerate() {
                let g = gcd(*di, *dj);
                if g > 1 {
                    slots.push((a, i, j, di / g));
                    orders.push(g);
                }
            }
        }
    }
    let ambient = FinAb::raw(&orders);
    let proto = HomSet {
        src: m.clone(),
        tgt: n.clone(),
        slots,
        sub: SubGroup {
            group: ambient.clone(),
            incl: AbHom::identity(&ambient),
        },
    };
    let basis: Vec<ModHom> = (0..orders.len())
        .map(|k| proto.map_at(&ambient.gen(k)))
        .collect();
    let mut rows: Vec<(Vec<i64>, i64)> = Vec::new();
    for a in 0..r.n() {
        for b in 0..r.n() {
            for i in 0..r.hom(a, b).rank() {
                let defects: Vec<AbHom> = basis
                    .iter()
                    .map(|phi| {
                        phi.comp(a)
                            .compose(m.gen_action(a, b, i))
                            .sub(&n.gen_action(a, b, i).compose(phi.comp(b)))
                    })
                    .collect();
                for (p, d) in n.value(a).factors().iter().enumerate() {
                    for q in 0..m.value(b).rank() {
                        let row: Vec<i64> = defects.iter().map(|h| h.matrix()[p][q]).collect();
                        if row.iter().any(|x| *x != 0) {
                            rows.push((row, *d));
                        }
                    }
                }
            }
        }
    }
    let sub = solve_congruences(&ambient, &rows)?;
    Ok(HomSet { sub, ..proto })
}

/// The restriction of `phi` to `n → n2` if `phi` maps `n` into `n2`, else a failing element.
pub fn restriction(
    phi: &ModHom,
    n: &Submodule,
    n2: &Submodule,
) -> std::result::Result<ModHom, (usize, Elem)> {
    let mut comps = Vec::new();
    for a in 0..phi.src.n() {
        let s = n2.incl.comp(a).solver();
        let mut imgs = Vec::new();
        for j in 0..n.module.value(a).rank() {
            let x = n.incl.comp(a).image_of_gen(j);
            match s.solve(&phi.apply(a, &x)) {
                Some(z) => imgs.push(z),
                None => return Err((a, x)),
            }
        }
        let h = AbHom::from_images(n.module.value(a).clone(), n2.module.value(a).clone(), &imgs)
            .expect("restriction of a homomorphism is well defined");
        comps.push(h);
    }
    Ok(ModHom {
        src: n.module.clone(),
        tgt: n2.module.clone(),
        comps,
    })
}

/// Some isomorphism `m → n`, searched through `Hom(m, n)` up to `budget` elements.
pub fn find_iso(m: &Arc<RMod>, n: &Arc<RMod>, budget: u64) -> Result<Option<ModHom>> {
    if m.values() != n.values() {
        return Ok(None);
    }
    let hs = hom_modules(m, n)?;
    if hs.order() > budget {
        return Err(AlgError::Budget(format!(
            "isomorphism search over {} maps",
            hs.order()
        )));
    }
    let found = hs.elements().find(|f| f.is_iso());
    Ok(found)
}
