//! Index categories, representations (pseudofunctors into ringoids) and modules over them.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, OnceLock};

use serde::Serialize;
use serde_json::{json, Value};

use crate::abelian::{solve_congruences, AbHom, DirectSum, Elem, FinAb, SubGroup};
use crate::basechange::{composition_iso, functor_flatness, restrict_scalars, BaseChange};
use crate::check::Validation;
use crate::error::{invalid, AlgError, Result};
use crate::module::{
    all_submodules, direct_sum, hom_json, hom_modules, same_base, submodule_generated, HomSet,
    ModHom, RMod, Submodule,
};
use crate::ringoid::{AddFunctor, Ringoid};
use crate::tensor::{
    bounded_left_modules, is_flat, is_pure, mod_tensor, pure_closure, retraction, FlatMethod,
    SearchOptions, TensorExt, TensorValue, Verdict,
};

/// A finite category given by its composition table.
#[derive(Clone, Debug, PartialEq)]
pub struct SmallCat {
    pub name: String,
    pub objects: Vec<String>,
    /// `(name, source, target)`.
    pub morphisms: Vec<(String, usize, usize)>,
    /// `comp[β][α] = β∘α` when composable.
    comp: Vec<Vec<Option<usize>>>,
    ids: Vec<usize>,
}

impl SmallCat {
    pub fn new(
        name: impl Into<String>,
        objects: Vec<String>,
        morphisms: Vec<(String, usize, usize)>,
        comp: Vec<Vec<Option<usize>>>,
        ids: Vec<usize>,
    ) -> Result<Self> {
        let m = morphisms.len();
        if comp.len() != m || comp.iter().any(|r| r.len() != m) || ids.len() != objects.len() {
            return invalid("category data has inconsistent sizes");
        }
        for (b, row) in comp.iter().enumerate() {
            for (a, c) in row.iter().enumerate() {
                let composable = morphisms[a].2 == morphisms[b].1;
                match c {
                    Some(c)
                        if !composable
                            || morphisms[*c].1 != morphisms[a].1
                            || morphisms[*c].2 != morphisms[b].2 =>
                    {
                        return invalid(format!(
                            "composite {} ∘ {} has wrong endpoints",
                            morphisms[b].0, morphisms[a].0
                        ));
                    }
                    None if composable => {
                        return invalid(format!(
                            "missing composite {} ∘ {}",
                            morphisms[b].0, morphisms[a].0
                        ));
                    }
                    _ => {}
                }
            }
        }
        Ok(SmallCat {
            name: name.into(),
            objects,
            morphisms,
            comp,
            ids,
        })
    }

    /// The preorder generated by the given arrows (reflexive-transitive closure).
    pub fn poset(name: &str, objects: &[&str], arrows: &[(&str, &str)]) -> Result<Self> {
        let n = objects.len();
        let idx = |s: &str| objects.iter().position(|o| *o == s);
        let mut le = vec![vec![false; n]; n];
        for (i, row) in le.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in arrows {
            let (Some(a), Some(b)) = (idx(a), idx(b)) else {
                return invalid(format!("unknown object in arrow {a}->{b}"));
            };
            le[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if le[i][k] && le[k][j] {
                        le[i][j] = true;
                    }
                }
            }
        }
        let mut morphisms = Vec::new();
        let mut ids = vec![0; n];
        let mut at = vec![vec![None; n]; n];
        for i in 0..n {
            for j in 0..n {
                if le[i][j] {
                    if i == j {
                        ids[i] = morphisms.len();
                        morphisms.push((format!("id_{}", objects[i]), i, j));
                    } else {
                        morphisms.push((format!("{}->{}", objects[i], objects[j]), i, j));
                    }
                    at[i][j] = Some(morphisms.len() - 1);
                }
            }
        }
        let m = morphisms.len();
        let mut comp = vec![vec![None; m]; m];
        for (b, &(_, bs, bt)) in morphisms.iter().enumerate() {
            for (a, &(_, as_, at_)) in morphisms.iter().enumerate() {
                if at_ == bs {
                    comp[b][a] = at[as_][bt];
                }
            }
        }
        SmallCat::new(
            name,
            objects.iter().map(|s| s.to_string()).collect(),
            morphisms,
            comp,
            ids,
        )
    }

    /// `0 → 1`.
    pub fn arrow() -> Self {
        Self::poset("arrow", &["0", "1"], &[("0", "1")]).expect("valid poset")
    }

    /// `u → w ← v`.
    pub fn toy_p1() -> Self {
        Self::poset("toy-P1", &["u", "v", "w"], &[("u", "w"), ("v", "w")]).expect("valid poset")
    }

    /// One object with an idempotent endomorphism `e∘e = e`.
    pub fn idempotent() -> Self {
        let morphisms = vec![("id".to_string(), 0, 0), ("e".to_string(), 0, 0)];
        let comp = vec![vec![Some(0), Some(1)], vec![Some(1), Some(1)]];
        SmallCat::new("idempotent", vec!["x".into()], morphisms, comp, vec![0])
            .expect("valid category")
    }

    /// Two objects `a → b` with a non-identity idempotent on `b` absorbing the arrow.
    pub fn arrow_with_endo() -> Self {
        // morphisms: id_a, id_b, f: a→b, e: b→b with e∘e = e, e∘f = f
        let morphisms = vec![
            ("id_a".to_string(), 0, 0),
            ("id_b".to_string(), 1, 1),
            ("f".to_string(), 0, 1),
            ("e".to_string(), 1, 1),
        ];
        let mut comp = vec![vec![None; 4]; 4];
        comp[0][0] = Some(0);
        comp[1][1] = Some(1);
        comp[2][0] = Some(2);
        comp[1][2] = Some(2);
        comp[1][3] = Some(3);
        comp[3][1] = Some(3);
        comp[3][3] = Some(3);
        comp[3][2] = Some(2);
        SmallCat::new(
            "arrow+endo",
            vec!["a".into(), "b".into()],
            morphisms,
            comp,
            vec![0, 1],
        )
        .expect("valid category")
    }

    pub fn n(&self) -> usize {
        self.objects.len()
    }

    pub fn m(&self) -> usize {
        self.morphisms.len()
    }

    pub fn id(&self, c: usize) -> usize {
        self.ids[c]
    }

    pub fn src(&self, a: usize) -> usize {
        self.morphisms[a].1
    }

    pub fn tgt(&self, a: usize) -> usize {
        self.morphisms[a].2
    }

    /// `β ∘ α`.
    pub fn compose(&self, beta: usize, alpha: usize) -> Option<usize> {
        self.comp[beta][alpha]
    }

    /// Morphisms `c → d`, in index order.
    pub fn hom(&self, c: usize, d: usize) -> Vec<usize> {
        (0..self.m())
            .filter(|&a| self.src(a) == c && self.tgt(a) == d)
            .collect()
    }

    pub fn is_poset(&self) -> bool {
        (0..self.n()).all(|c| (0..self.n()).all(|d| self.hom(c, d).len() <= 1))
    }

    pub fn is_identity(&self, a: usize) -> bool {
        self.ids.contains(&a)
    }

    /// All `(β, α)` with `β∘α` defined.
    pub fn composable_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for b in 0..self.m() {
            for a in 0..self.m() {
                if self.comp[b][a].is_some() {
                    out.push((b, a));
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Validation {
        let mut v = Validation::new(format!("category {}", self.name));
        let mut wit = None;
        'outer: for (b, a) in self.composable_pairs() {
            for c in 0..self.m() {
                if let Some(cb) = self.comp[c][b] {
                    let l = self.comp[cb][a];
                    let r = self.comp[b][a].and_then(|ba| self.comp[c][ba]);
                    if l != r {
                        wit = Some(
                            json!({"morphisms": [&self.morphisms[c].0, &self.morphisms[b].0, &self.morphisms[a].0]}),
                        );
                        break 'outer;
                    }
                }
            }
        }
        v.record("associative", wit);
        let wit = (0..self.m()).find_map(|a| {
            let l = self.comp[self.ids[self.tgt(a)]][a];
            let r = self.comp[a][self.ids[self.src(a)]];
            (l != Some(a) || r != Some(a)).then(|| json!({"morphism": &self.morphisms[a].0}))
        });
        v.record("identity", wit);
        v
    }
}

// ---------------------------------------------------------------------------
// Representations

/// A pseudofunctor from a finite category into ringoids.
///
/// `delta[c][a] ∈ hom(a, R_{id_c} a)` and `mu[β][α][a] ∈ hom(R_β R_α a, R_{βα} a)` are the
/// components of the unit and composition isomorphisms.
#[derive(Clone, Debug)]
pub struct Representation {
    pub name: String,
    pub index: SmallCat,
    rings: Vec<Arc<Ringoid>>,
    functors: Vec<AddFunctor>,
    delta: Vec<Vec<Elem>>,
    mu: Vec<Vec<Option<Vec<Elem>>>>,
    changes: Vec<OnceLock<BaseChange>>,
}

impl Representation {
    pub fn new(
        name: impl Into<String>,
        index: SmallCat,
        rings: Vec<Arc<Ringoid>>,
        functors: Vec<AddFunctor>,
        delta: Vec<Vec<Elem>>,
        mu: Vec<Vec<Option<Vec<Elem>>>>,
    ) -> Result<Self> {
        let (n, m) = (index.n(), index.m());
        if rings.len() != n || functors.len() != m || delta.len() != n || mu.len() != m {
            return invalid("representation data has inconsistent sizes");
        }
        for (al, f) in functors.iter().enumerate() {
            if !same_base(&f.src, &rings[index.src(al)])
                || !same_base(&f.tgt, &rings[index.tgt(al)])
            {
                return invalid(format!(
                    "functor for {} has wrong endpoints",
                    index.morphisms[al].0
                ));
            }
        }
        for c in 0..n {
            let f = &functors[index.id(c)];
            if delta[c].len() != rings[c].n() {
                return invalid(format!("delta at {} has wrong length", index.objects[c]));
            }
            for (a, x) in delta[c].iter().enumerate() {
                if !rings[c].hom(a, f.obj[a]).contains(x) {
                    return invalid(format!(
                        "delta at {} object {a} is not a morphism",
                        index.objects[c]
                    ));
                }
            }
        }
        for b in 0..m {
            if mu[b].len() != m {
                return invalid("mu table has wrong size");
            }
            for a in 0..m {
                match (index.compose(b, a), &mu[b][a]) {
                    (None, None) => {}
                    (Some(ba), Some(comps)) => {
                        let (fa, fb, fba) = (&functors[a], &functors[b], &functors[ba]);
                        let e = &rings[index.tgt(b)];
                        if comps.len() != fa.src.n() {
                            return invalid("mu component list has wrong length");
                        }
                        for (x, v) in comps.iter().enumerate() {
                            if !e.hom(fb.obj[fa.obj[x]], fba.obj[x]).contains(v) {
                                return invalid(format!(
                                    "mu({}, {}) at object {x} is not a morphism",
                                    index.morphisms[b].0, index.morphisms[a].0
                                ));
                            }
                        }
                    }
                    _ => return invalid("mu is given exactly for composable pairs"),
                }
            }
        }
        let changes = (0..m).map(|_| OnceLock::new()).collect();
        Ok(Representation {
            name: name.into(),
            index,
            rings,
            functors,
            delta,
            mu,
            changes,
        })
    }

    /// Identity `delta` and `mu`; the functors must compose on the nose at least on objects.
    pub fn strict(
        name: impl Into<String>,
        index: SmallCat,
        rings: Vec<Arc<Ringoid>>,
        functors: Vec<AddFunctor>,
    ) -> Result<Self> {
        if functors.len() != index.m() || rings.len() != index.n() {
            return invalid("representation data has inconsistent sizes");
        }
        let mut delta = Vec::new();
        for c in 0..index.n() {
            let f = &functors[index.id(c)];
            if f.obj.iter().enumerate().any(|(a, &o)| a != o) {
                return invalid("identity functor moves objects");
            }
            delta.push((0..rings[c].n()).map(|a| rings[c].id(a).clone()).collect());
        }
        let m = index.m();
        let mut mu = vec![vec![None; m]; m];
        for (b, a) in index.composable_pairs() {
            let ba = index.compose(b, a).expect("composable");
            let (fa, fb, fba) = (&functors[a], &functors[b], &functors[ba]);
            let e = &rings[index.tgt(b)];
            let mut comps = Vec::new();
            for x in 0..fa.src.n() {
                if fb.obj[fa.obj[x]] != fba.obj[x] {
                    return invalid("functors do not compose strictly on objects");
                }
                comps.push(e.id(fba.obj[x]).clone());
            }
            mu[b][a] = Some(comps);
        }
        Representation::new(name, index, rings, functors, delta, mu)
    }

    /// The arrow category `0 → 1` represented by a single functor.
    pub fn arrow_of(name: impl Into<String>, phi: &AddFunctor) -> Result<Self> {
        let rings = vec![phi.src.clone(), phi.tgt.clone()];
        let index = SmallCat::arrow();
        let functors = (0..index.m())
            .map(|al| match (index.src(al), index.tgt(al)) {
                (0, 0) => AddFunctor::identity(&phi.src),
                (1, 1) => AddFunctor::identity(&phi.tgt),
                _ => phi.clone(),
            })
            .collect();
        Representation::strict(name, index, rings, functors)
    }

    /// `u → w ← v` represented by two functors into the ringoid at `w`.
    pub fn toy_p1_of(
        name: impl Into<String>,
        from_u: &AddFunctor,
        from_v: &AddFunctor,
    ) -> Result<Self> {
        if !same_base(&from_u.tgt, &from_v.tgt) {
            return invalid("both functors must land in the same ringoid");
        }
        let index = SmallCat::toy_p1();
        let rings = vec![from_u.src.clone(), from_v.src.clone(), from_u.tgt.clone()];
        let functors = (0..index.m())
            .map(|al| {
                let (s, t) = (index.src(al), index.tgt(al));
                if s == t {
                    AddFunctor::identity(&rings[s])
                } else if s == 0 {
                    from_u.clone()
                } else {
                    from_v.clone()
                }
            })
            .collect();
        Representation::strict(name, index, rings, functors)
    }

    /// Twists a strict representation of one-object ringoids by units `t(α) ∈ R_{tgt α}`:
    /// `μ_{β,α} = R_β(t(α))·t(β)·t(βα)⁻¹` and `δ_c = t(id_c)⁻¹`.
    pub fn twisted(&self, units: &[Elem]) -> Result<Representation> {
        let ix = &self.index;
        if !self.is_strict() || units.len() != ix.m() || self.rings.iter().any(|r| r.n() != 1) {
            return invalid(
                "twisting needs a strict representation of rings and one unit per morphism",
            );
        }
        let inv = |r: &Ringoid, x: &Elem| {
            r.inverse_of(0, 0, x)
                .ok_or_else(|| AlgError::Invalid(format!("{x:?} is not a unit in {}", r.name)))
        };
        let delta = (0..ix.n())
            .map(|c| Ok(vec![inv(&self.rings[c], &units[ix.id(c)])?]))
            .collect::<Result<Vec<_>>>()?;
        let m = ix.m();
        let mut mu = vec![vec![None; m]; m];
        for (b, a) in ix.composable_pairs() {
            let ba = ix.compose(b, a).expect("composable");
            let e = &self.rings[ix.tgt(b)];
            let v = e.mul(
                &e.mul(&self.functors[b].apply(0, 0, &units[a]), &units[b]),
                &inv(e, &units[ba])?,
            );
            mu[b][a] = Some(vec![v]);
        }
        Representation::new(
            format!("{}~twisted", self.name),
            ix.clone(),
            self.rings.clone(),
            self.functors.clone(),
            delta,
            mu,
        )
    }

    pub fn ring(&self, c: usize) -> &Arc<Ringoid> {
        &self.rings[c]
    }

    pub fn rings(&self) -> &[Arc<Ringoid>] {
        &self.rings
    }

    pub fn functor(&self, alpha: usize) -> &AddFunctor {
        &self.functors[alpha]
    }

    pub fn delta(&self, c: usize, a: usize) -> &Elem {
        &self.delta[c][a]
    }

    /// `(μ_{β,α})_a`; panics unless `β∘α` is defined.
    pub fn mu(&self, beta: usize, alpha: usize, a: usize) -> &Elem {
        &self.mu[beta][alpha].as_ref().expect("composable pair")[a]
    }

    /// Cached change of base along `R_α`.
    pub fn change(&self, alpha: usize) -> Result<&BaseChange> {
        if let Some(bc) = self.changes[alpha].get() {
            return Ok(bc);
        }
        let bc = BaseChange::new(&self.functors[alpha])?;
        Ok(self.changes[alpha].get_or_init(|| bc))
    }

    pub fn is_strict(&self) -> bool {
        let ix = &self.index;
        let deltas = (0..ix.n()).all(|c| {
            self.functors[ix.id(c)].is_identity()
                && self.delta[c]
                    .iter()
                    .enumerate()
                    .all(|(a, x)| x == self.rings[c].id(a))
        });
        deltas
            && ix.composable_pairs().into_iter().all(|(b, a)| {
                let ba = ix.compose(b, a).expect("composable");
                let e = &self.rings[ix.tgt(b)];
                self.functors[a].then(&self.functors[b]) == self.functors[ba]
                    && (0..self.functors[a].src.n())
                        .all(|x| self.mu(b, a, x) == e.id(self.functors[ba].obj[x]))
            })
    }

    fn names(&self, ms: &[usize]) -> Vec<String> {
        ms.iter()
            .map(|&m| self.index.morphisms[m].0.clone())
            .collect()
    }

    /// Functor axioms, naturality and invertibility of `delta`/`mu`, and the two coherence laws.
    pub fn validate(&self) -> Validation {
        let ix = &self.index;
        let mut v = Validation::new(format!("representation {}", self.name));
        v.merge("index ", ix.validate());
        for (al, f) in self.functors.iter().enumerate() {
            v.merge(&format!("functor {} ", ix.morphisms[al].0), f.validate());
        }
        // delta
        let (mut nat, mut inv) = (None, None);
        for c in 0..ix.n() {
            let (r, f) = (&self.rings[c], &self.functors[ix.id(c)]);
            for a in 0..r.n() {
                let d = &self.delta[c][a];
                if inv.is_none() && r.inverse_of(a, f.obj[a], d).is_none() {
                    inv = Some(json!({"object": &ix.objects[c], "component": a, "delta": d}));
                }
                for b in 0..r.n() {
                    for x in r.hom(a, b).gens() {
                        let lhs = r.compose(a, b, f.obj[b], &self.delta[c][b], &x);
                        let rhs = r.compose(a, f.obj[a], f.obj[b], &f.apply(a, b, &x), d);
                        if nat.is_none() && lhs != rhs {
                            nat = Some(json!({"object": &ix.objects[c], "arrow": [a, b], "r": x}));
                        }
                    }
                }
            }
        }
        v.record("delta-natural", nat);
        v.record("delta-invertible", inv);
        // mu
        let (mut nat, mut inv) = (None, None);
        for (b, a) in ix.composable_pairs() {
            let ba = ix.compose(b, a).expect("composable");
            let (fa, fb, fba) = (&self.functors[a], &self.functors[b], &self.functors[ba]);
            let (r, e) = (&fa.src, &self.rings[ix.tgt(b)]);
            let p = |x: usize| fb.obj[fa.obj[x]];
            for x in 0..r.n() {
                let m = self.mu(b, a, x);
                if inv.is_none() && e.inverse_of(p(x), fba.obj[x], m).is_none() {
                    inv = Some(json!({"morphisms": self.names(&[b, a]), "component": x, "mu": m}));
                }
                for y in 0..r.n() {
                    for g in r.hom(x, y).gens() {
                        let pg = fb.apply(fa.obj[x], fa.obj[y], &fa.apply(x, y, &g));
                        let lhs = e.compose(p(x), p(y), fba.obj[y], self.mu(b, a, y), &pg);
                        let rhs = e.compose(p(x), fba.obj[x], fba.obj[y], &fba.apply(x, y, &g), m);
                        if nat.is_none() && lhs != rhs {
                            nat = Some(
                                json!({"morphisms": self.names(&[b, a]), "arrow": [x, y], "r": g}),
                            );
                        }
                    }
                }
            }
        }
        v.record("mu-natural", nat);
        v.record("mu-invertible", inv);
        v.record("associativity-coherence", self.assoc_witness());
        v.record("unit-coherence", self.unit_witness());
        v
    }

    /// `μ_{γ,βα} ∘ R_γ(μ_{β,α}) = μ_{γβ,α} ∘ (μ_{γ,β})_{R_α}` at every object.
    fn assoc_witness(&self) -> Option<Value> {
        let ix = &self.index;
        for (b, a) in ix.composable_pairs() {
            let ba = ix.compose(b, a).expect("composable");
            for g in 0..ix.m() {
                let Some(gb) = ix.compose(g, b) else { continue };
                let gba = ix.compose(g, ba).expect("associative composites");
                let (fa, fb, fg) = (&self.functors[a], &self.functors[b], &self.functors[g]);
                let (fba, fgb, fgba) =
                    (&self.functors[ba], &self.functors[gb], &self.functors[gba]);
                let f = &self.rings[ix.tgt(g)];
                for x in 0..fa.src.n() {
                    let top = fg.obj[fb.obj[fa.obj[x]]];
                    let lhs = f.compose(
                        top,
                        fg.obj[fba.obj[x]],
                        fgba.obj[x],
                        self.mu(g, ba, x),
                        &fg.apply(fb.obj[fa.obj[x]], fba.obj[x], self.mu(b, a, x)),
                    );
                    let rhs = f.compose(
                        top,
                        fgb.obj[fa.obj[x]],
                        fgba.obj[x],
                        self.mu(gb, a, x),
                        self.mu(g, b, fa.obj[x]),
                    );
                    if lhs != rhs {
                        return Some(
                            json!({"morphisms": self.names(&[g, b, a]), "object": x, "lhs": lhs, "rhs": rhs}),
                        );
                    }
                }
            }
        }
        None
    }

    /// `μ_{α,id} ∘ R_α(δ) = id` and `μ_{id,α} ∘ δ_{R_α} = id`.
    fn unit_witness(&self) -> Option<Value> {
        let ix = &self.index;
        for a in 0..ix.m() {
            let (c, d) = (ix.src(a), ix.tgt(a));
            let (ic, id) = (ix.id(c), ix.id(d));
            let fa = &self.functors[a];
            let (fic, fid) = (&self.functors[ic], &self.functors[id]);
            let r = &self.rings[d];
            for x in 0..fa.src.n() {
                let right = r.compose(
                    fa.obj[x],
                    fa.obj[fic.obj[x]],
                    fa.obj[x],
                    self.mu(a, ic, x),
                    &fa.apply(x, fic.obj[x], &self.delta[c][x]),
                );
                let left = r.compose(
                    fa.obj[x],
                    fid.obj[fa.obj[x]],
                    fa.obj[x],
                    self.mu(id, a, x),
                    &self.delta[d][fa.obj[x]],
                );
                let one = r.id(fa.obj[x]);
                if &right != one || &left != one {
                    return Some(json!({"morphism": &ix.morphisms[a].0, "object": x,
                        "mu(a,id)∘R_a(delta)": right, "mu(id,a)∘delta": left}));
                }
            }
        }
        None
    }

    /// Objectwise opposite ringoids, with `delta` and `mu` replaced by their inverses.
    pub fn opposite(&self) -> Result<Representation> {
        let ix = &self.index;
        let rings: Vec<Arc<Ringoid>> = self.rings.iter().map(|r| Arc::new(r.opposite())).collect();
        let functors = self
            .functors
            .iter()
            .enumerate()
            .map(|(al, f)| f.opposite(&rings[ix.src(al)], &rings[ix.tgt(al)]))
            .collect();
        let not_inv =
            || AlgError::Invalid("representation has a non-invertible coherence component".into());
        let mut delta = Vec::new();
        for c in 0..ix.n() {
            let f = &self.functors[ix.id(c)];
            let r = &self.rings[c];
            delta.push(
                (0..r.n())
                    .map(|a| {
                        r.inverse_of(a, f.obj[a], &self.delta[c][a])
                            .ok_or_else(not_inv)
                    })
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        let m = ix.m();
        let mut mu = vec![vec![None; m]; m];
        for (b, a) in ix.composable_pairs() {
            let ba = ix.compose(b, a).expect("composable");
            let (fa, fb, fba) = (&self.functors[a], &self.functors[b], &self.functors[ba]);
            let e = &self.rings[ix.tgt(b)];
            mu[b][a] = Some(
                (0..fa.src.n())
                    .map(|x| {
                        e.inverse_of(fb.obj[fa.obj[x]], fba.obj[x], self.mu(b, a, x))
                            .ok_or_else(not_inv)
                    })
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        let name = match self.name.strip_suffix("^op") {
            Some(s) => s.to_string(),
            None => format!("{}^op", self.name),
        };
        Representation::new(name, ix.clone(), rings, functors, delta, mu)
    }

    /// Right and left flatness of every non-identity functor.
    pub fn flatness(&self, opts: &SearchOptions) -> Result<RepFlatness> {
        let mut per_morphism = Vec::new();
        for (al, f) in self.functors.iter().enumerate() {
            if f.is_identity() {
                continue;
            }
            let ff = functor_flatness(f, opts)?;
            per_morphism.push((
                self.index.morphisms[al].0.clone(),
                ff.right.holds,
                ff.left.holds,
            ));
        }
        let right = per_morphism.iter().all(|t| t.1);
        let left = per_morphism.iter().all(|t| t.2);
        Ok(RepFlatness {
            right,
            left,
            per_morphism,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RepFlatness {
    pub right: bool,
    pub left: bool,
    /// `(morphism, right flat, left flat)`.
    pub per_morphism: Vec<(String, bool, bool)>,
}

// ---------------------------------------------------------------------------
// Modules over a representation

/// Parts `M_c` over `R_c` with structural maps `M_α: M_c → α*M_d`.
#[derive(Clone, Debug)]
pub struct DiagModule {
    pub rep: Arc<Representation>,
    parts: Vec<Arc<RMod>>,
    /// `α*M_d` for each morphism `α: c → d`.
    pulled: Vec<Arc<RMod>>,
    structural: Vec<ModHom>,
}

impl DiagModule {
    /// `comps[α][a]: M_c(a) → M_d(R_α a)`.
    pub fn new(
        rep: &Arc<Representation>,
        parts: Vec<Arc<RMod>>,
        comps: Vec<Vec<AbHom>>,
    ) -> Result<Self> {
        let ix = &rep.index;
        if parts.len() != ix.n() || comps.len() != ix.m() {
            return invalid("diagram module data has inconsistent sizes");
        }
        for (c, p) in parts.iter().enumerate() {
            if !same_base(p.base(), rep.ring(c)) {
                return Err(AlgError::BaseMismatch(format!(
                    "part at {} is not over {}",
                    ix.objects[c],
                    rep.ring(c).name
                )));
            }
        }
        let pulled = (0..ix.m())
            .map(|al| restrict_scalars(rep.functor(al), &parts[ix.tgt(al)]).map(Arc::new))
            .collect::<Result<Vec<_>>>()?;
        let structural = comps
            .into_iter()
            .enumerate()
            .map(|(al, cs)| ModHom::new(parts[ix.src(al)].clone(), pulled[al].clone(), cs))
            .collect::<Result<Vec<_>>>()?;
        Ok(DiagModule {
            rep: rep.clone(),
            parts,
            pulled,
            structural,
        })
    }

    /// Structural components from a rule `(α, a) ↦ (M_α)_a`.
    pub fn from_fn(
        rep: &Arc<Representation>,
        parts: Vec<Arc<RMod>>,
        mut f: impl FnMut(usize, usize) -> Result<AbHom>,
    ) -> Result<Self> {
        let ix = &rep.index;
        if parts.len() != ix.n() {
            return invalid("diagram module needs one part per object");
        }
        let comps = (0..ix.m())
            .map(|al| {
                (0..rep.ring(ix.src(al)).n())
                    .map(|a| f(al, a))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        DiagModule::new(rep, parts, comps)
    }

    pub fn zero(rep: &Arc<Representation>) -> Self {
        let parts = (0..rep.index.n())
            .map(|c| Arc::new(RMod::zero(rep.ring(c))))
            .collect();
        DiagModule::from_fn(rep, parts, |_, _| {
            let t = FinAb::trivial();
            Ok(AbHom::zero(&t, &t))
        })
        .expect("zero module")
    }

    pub fn part(&self, c: usize) -> &Arc<RMod> {
        &self.parts[c]
    }

    pub fn parts(&self) -> &[Arc<RMod>] {
        &self.parts
    }

    pub fn structural(&self, alpha: usize) -> &ModHom {
        &self.structural[alpha]
    }

    pub fn pulled(&self, alpha: usize) -> &Arc<RMod> {
        &self.pulled[alpha]
    }

    /// `(M_α)_a(x) ∈ M_d(R_α a)`.
    pub fn apply_structural(&self, alpha: usize, a: usize, x: &[i64]) -> Elem {
        self.structural[alpha].apply(a, x)
    }

    /// `Σ_c |M_c|`.
    pub fn cardinality(&self) -> u64 {
        self.parts.iter().map(|p| p.cardinality()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(|p| p.is_zero())
    }

    pub fn validate(&self) -> Validation {
        let rep = &self.rep;
        let ix = &rep.index;
        let mut v = Validation::new(format!("module over {}", rep.name));
        for (c, p) in self.parts.iter().enumerate() {
            v.merge(&format!("part {} ", ix.objects[c]), p.validate());
        }
        let wit = (0..ix.m())
            .find(|&al| !self.structural[al].is_natural())
            .map(|al| json!({"morphism": &ix.morphisms[al].0}));
        v.record("structural-natural", wit);
        let mut wit = None;
        'pairs: for (b, a) in ix.composable_pairs() {
            let ba = ix.compose(b, a).expect("composable");
            let (fa, fb, fba) = (rep.functor(a), rep.functor(b), rep.functor(ba));
            let e = self.part(ix.tgt(b));
            for x in 0..fa.src.n() {
                let lhs = self.structural[b]
                    .comp(fa.obj[x])
                    .compose(self.structural[a].comp(x));
                let twist = e.action(fb.obj[fa.obj[x]], fba.obj[x], rep.mu(b, a, x));
                let rhs = twist.compose(self.structural[ba].comp(x));
                if lhs != rhs {
                    wit = Some(
                        json!({"morphisms": [&ix.morphisms[b].0, &ix.morphisms[a].0], "object": x,
                        "lhs": hom_json(&lhs), "rhs": hom_json(&rhs)}),
                    );
                    break 'pairs;
                }
            }
        }
        v.record("composition", wit);
        let mut wit = None;
        'objs: for c in 0..ix.n() {
            let ic = ix.id(c);
            let f = rep.functor(ic);
            for x in 0..f.src.n() {
                let h = self.parts[c]
                    .action(x, f.obj[x], rep.delta(c, x))
                    .compose(self.structural[ic].comp(x));
                if !h.is_identity() {
                    wit = Some(
                        json!({"object": &ix.objects[c], "component": x, "composite": hom_json(&h)}),
                    );
                    break 'objs;
                }
            }
        }
        v.record("identity", wit);
        v
    }
}

/// A morphism of modules over a representation, one module map per object.
#[derive(Clone, Debug)]
pub struct DiagModHom {
    pub src: Arc<DiagModule>,
    pub tgt: Arc<DiagModule>,
    comps: Vec<ModHom>,
}

impl DiagModHom {
    pub fn new(src: Arc<DiagModule>, tgt: Arc<DiagModule>, comps: Vec<ModHom>) -> Result<Self> {
        if comps.len() != src.parts.len() || src.parts.len() != tgt.parts.len() {
            return invalid("morphism needs one component per object");
        }
        for (c, h) in comps.iter().enumerate() {
            if h.src.values() != src.part(c).values() || h.tgt.values() != tgt.part(c).values() {
                return invalid(format!("component {c} has wrong source or target"));
            }
        }
        Ok(DiagModHom { src, tgt, comps })
    }

    pub fn identity(m: &Arc<DiagModule>) -> Self {
        let comps = m.parts.iter().map(ModHom::identity).collect();
        DiagModHom {
            src: m.clone(),
            tgt: m.clone(),
            comps,
        }
    }

    pub fn zero(m: &Arc<DiagModule>, n: &Arc<DiagModule>) -> Self {
        let comps = m
            .parts
            .iter()
            .zip(&n.parts)
            .map(|(a, b)| ModHom::zero(a, b))
            .collect();
        DiagModHom {
            src: m.clone(),
            tgt: n.clone(),
            comps,
        }
    }

    pub fn comp(&self, c: usize) -> &ModHom {
        &self.comps[c]
    }

    pub fn comps(&self) -> &[ModHom] {
        &self.comps
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &DiagModHom) -> DiagModHom {
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(f, g)| f.compose(g))
            .collect();
        DiagModHom {
            src: other.src.clone(),
            tgt: self.tgt.clone(),
            comps,
        }
    }

    pub fn sub(&self, other: &DiagModHom) -> DiagModHom {
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(f, g)| f.sub(g))
            .collect();
        DiagModHom {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            comps,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(ModHom::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.comps.iter().all(ModHom::is_identity)
    }

    pub fn is_mono(&self) -> bool {
        self.comps.iter().all(ModHom::is_mono)
    }

    pub fn is_epi(&self) -> bool {
        self.comps.iter().all(ModHom::is_epi)
    }

    pub fn is_iso(&self) -> bool {
        self.comps.iter().all(ModHom::is_iso)
    }

    /// The first `(α, a)` where `α*(φ_d) ∘ M_α ≠ N_α ∘ φ_c`.
    fn square_witness(&self) -> Option<(usize, usize)> {
        let ix = &self.src.rep.index;
        for al in 0..ix.m() {
            let (c, d) = (ix.src(al), ix.tgt(al));
            let f = self.src.rep.functor(al);
            for a in 0..f.src.n() {
                let lhs = self.comps[d]
                    .comp(f.obj[a])
                    .compose(self.src.structural[al].comp(a));
                let rhs = self.tgt.structural[al]
                    .comp(a)
                    .compose(self.comps[c].comp(a));
                if lhs != rhs {
                    return Some((al, a));
                }
            }
        }
        None
    }

    pub fn validate(&self) -> Validation {
        let ix = &self.src.rep.index;
        let mut v = Validation::new("module morphism");
        let wit = (0..ix.n())
            .find(|&c| !self.comps[c].is_natural())
            .map(|c| json!({"object": &ix.objects[c]}));
        v.record("component-natural", wit);
        let wit = self
            .square_witness()
            .map(|(al, a)| json!({"morphism": &ix.morphisms[al].0, "component": a}));
        v.record("structural-square", wit);
        v
    }

    pub fn is_natural(&self) -> bool {
        self.comps.iter().all(ModHom::is_natural) && self.square_witness().is_none()
    }
}

/// A submodule over a representation: closed parts together with the inclusion.
#[derive(Clone, Debug)]
pub struct DiagSub {
    pub parts: Vec<Submodule>,
    pub module: Arc<DiagModule>,
    pub incl: DiagModHom,
}

impl DiagSub {
    pub fn ambient(&self) -> &Arc<DiagModule> {
        &self.incl.tgt
    }

    pub fn contains(&self, c: usize, a: usize, x: &[i64]) -> bool {
        self.parts[c].contains(a, x)
    }

    pub fn cardinality(&self) -> u64 {
        self.module.cardinality()
    }

    pub fn is_contained_in(&self, other: &DiagSub) -> bool {
        self.parts
            .iter()
            .zip(&other.parts)
            .all(|(s, t)| s.is_contained_in(t))
    }

    pub fn key(&self) -> Vec<Vec<Vec<usize>>> {
        self.parts.iter().map(Submodule::key).collect()
    }
}

/// Wraps closed per-object submodules; errors unless the structural maps preserve them.
pub fn diag_sub(m: &Arc<DiagModule>, parts: Vec<Submodule>) -> Result<DiagSub> {
    let rep = &m.rep;
    let ix = &rep.index;
    if parts.len() != ix.n() {
        return invalid("one submodule per object is needed");
    }
    let solvers: Vec<Vec<_>> = parts
        .iter()
        .map(|s| (0..s.module.n()).map(|a| s.incl.comp(a).solver()).collect())
        .collect();
    let module = DiagModule::from_fn(
        rep,
        parts.iter().map(|s| s.module.clone()).collect(),
        |al, a| {
            let (c, d) = (ix.src(al), ix.tgt(al));
            let fa = rep.functor(al).obj[a];
            let src = parts[c].module.value(a);
            let imgs = (0..src.rank())
                .map(|j| {
                    let y = m.apply_structural(al, a, &parts[c].incl.comp(a).image_of_gen(j));
                    solvers[d][fa].solve(&y).ok_or_else(|| {
                        AlgError::Invalid(format!(
                            "submodule is not closed under {}",
                            ix.morphisms[al].0
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            AbHom::from_images(src.clone(), parts[d].module.value(fa).clone(), &imgs)
        },
    )?;
    let module = Arc::new(module);
    let incl = DiagModHom::new(
        module.clone(),
        m.clone(),
        parts.iter().map(|s| s.incl.clone()).collect(),
    )?;
    Ok(DiagSub {
        parts,
        module,
        incl,
    })
}

/// The smallest closed family of submodules containing the given ones.
pub fn diag_closure(m: &DiagModule, mut parts: Vec<Submodule>) -> Result<Vec<Submodule>> {
    let ix = &m.rep.index;
    loop {
        let mut missing: Vec<Vec<(usize, Elem)>> = vec![Vec::new(); ix.n()];
        for al in 0..ix.m() {
            let (c, d) = (ix.src(al), ix.tgt(al));
            let obj = &m.rep.functor(al).obj;
            for (a, x) in parts[c].generators() {
                let y = m.apply_structural(al, a, &x);
                if !parts[d].contains(obj[a], &y) {
                    missing[d].push((obj[a], y));
                }
            }
        }
        if missing.iter().all(Vec::is_empty) {
            return Ok(parts);
        }
        for (d, extra) in missing.into_iter().enumerate() {
            if !extra.is_empty() {
                let mut g = parts[d].generators();
                g.extend(extra);
                parts[d] = submodule_generated(m.part(d), &g)?;
            }
        }
    }
}

/// The submodule generated by elements `(c, a, x)` with `x ∈ M_c(a)`.
pub fn diag_generated(m: &Arc<DiagModule>, elems: &[(usize, usize, Elem)]) -> Result<DiagSub> {
    let parts = (0..m.rep.index.n())
        .map(|c| {
            let g: Vec<(usize, Elem)> = elems
                .iter()
                .filter(|e| e.0 == c)
                .map(|(_, a, x)| (*a, x.clone()))
                .collect();
            submodule_generated(m.part(c), &g)
        })
        .collect::<Result<Vec<_>>>()?;
    diag_sub(m, diag_closure(m, parts)?)
}

pub fn diag_kernel(phi: &DiagModHom) -> Result<DiagSub> {
    let parts = phi
        .comps
        .iter()
        .map(ModHom::kernel)
        .collect::<Result<Vec<_>>>()?;
    diag_sub(&phi.src, parts)
}

pub fn diag_image(phi: &DiagModHom) -> Result<DiagSub> {
    let parts = phi
        .comps
        .iter()
        .map(ModHom::image)
        .collect::<Result<Vec<_>>>()?;
    diag_sub(&phi.tgt, parts)
}

/// `M/N` with the projection, structural maps induced on representatives.
pub fn diag_quotient(sub: &DiagSub) -> Result<(Arc<DiagModule>, DiagModHom)> {
    let m = sub.ambient();
    let rep = &m.rep;
    let ix = &rep.index;
    let qs = sub
        .parts
        .iter()
        .map(Submodule::quotient)
        .collect::<Result<Vec<_>>>()?;
    let module = DiagModule::from_fn(rep, qs.iter().map(|q| q.0.clone()).collect(), |al, a| {
        let (c, d) = (ix.src(al), ix.tgt(al));
        let fa = rep.functor(al).obj[a];
        let (qc, pc) = &qs[c];
        let (qd, pd) = &qs[d];
        let imgs: Vec<Elem> = qc
            .value(a)
            .gens()
            .iter()
            .map(|g| {
                let x = pc.comp(a).solve(g).expect("projection is onto");
                pd.apply(fa, &m.apply_structural(al, a, &x))
            })
            .collect();
        AbHom::from_images(qc.value(a).clone(), qd.value(fa).clone(), &imgs)
    })?;
    let module = Arc::new(module);
    let proj = DiagModHom::new(
        m.clone(),
        module.clone(),
        qs.into_iter().map(|q| q.1).collect(),
    )?;
    Ok((module, proj))
}

pub fn diag_cokernel(phi: &DiagModHom) -> Result<(Arc<DiagModule>, DiagModHom)> {
    diag_quotient(&diag_image(phi)?)
}

#[derive(Clone, Debug)]
pub struct DiagSum {
    pub module: Arc<DiagModule>,
    pub inj: Vec<DiagModHom>,
    pub proj: Vec<DiagModHom>,
}

pub fn diag_sum(summands: &[Arc<DiagModule>]) -> Result<DiagSum> {
    let Some(first) = summands.first() else {
        return invalid("a direct sum needs at least one summand");
    };
    let rep = &first.rep;
    let ix = &rep.index;
    let sums = (0..ix.n())
        .map(|c| {
            direct_sum(
                &summands
                    .iter()
                    .map(|s| s.part(c).clone())
                    .collect::<Vec<_>>(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let module = DiagModule::from_fn(
        rep,
        sums.iter().map(|s| s.module.clone()).collect(),
        |al, a| {
            let (c, d) = (ix.src(al), ix.tgt(al));
            let fa = rep.functor(al).obj[a];
            let mut acc = AbHom::zero(sums[c].module.value(a), sums[d].module.value(fa));
            for (k, s) in summands.iter().enumerate() {
                let h = sums[d].inj[k]
                    .comp(fa)
                    .compose(s.structural(al).comp(a))
                    .compose(sums[c].proj[k].comp(a));
                acc = acc.add(&h);
            }
            Ok(acc)
        },
    )?;
    let module = Arc::new(module);
    let mut inj = Vec::new();
    let mut proj = Vec::new();
    for (k, s) in summands.iter().enumerate() {
        inj.push(DiagModHom::new(
            s.clone(),
            module.clone(),
            sums.iter().map(|x| x.inj[k].clone()).collect(),
        )?);
        proj.push(DiagModHom::new(
            module.clone(),
            s.clone(),
            sums.iter().map(|x| x.proj[k].clone()).collect(),
        )?);
    }
    Ok(DiagSum { module, inj, proj })
}

/// The group of morphisms `M → N` over a representation.
#[derive(Clone, Debug)]
pub struct DiagHomSet {
    pub src: Arc<DiagModule>,
    pub tgt: Arc<DiagModule>,
    parts: Vec<HomSet>,
    offsets: Vec<usize>,
    sub: SubGroup,
}

impl DiagHomSet {
    pub fn group(&self) -> &FinAb {
        &self.sub.group
    }

    pub fn order(&self) -> u64 {
        self.sub.group.order()
    }

    fn map_at(&self, d: &[i64]) -> DiagModHom {
        let comps = self
            .parts
            .iter()
            .enumerate()
            .map(|(c, h)| h.to_modhom(&d[self.offsets[c]..self.offsets[c + 1]]))
            .collect();
        DiagModHom {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            comps,
        }
    }

    pub fn to_hom(&self, z: &[i64]) -> DiagModHom {
        self.map_at(&self.sub.incl.apply(z))
    }

    pub fn from_hom(&self, f: &DiagModHom) -> Option<Elem> {
        let mut d = Vec::new();
        for (c, h) in self.parts.iter().enumerate() {
            d.extend(h.from_modhom(f.comp(c))?);
        }
        self.sub.incl.solve(&d)
    }

    pub fn elements(&self) -> impl Iterator<Item = DiagModHom> + '_ {
        self.group().elements().map(move |z| self.to_hom(&z))
    }
}

/// Tuples of part homomorphisms cut down by the structural squares.
pub fn diag_homs(m: &Arc<DiagModule>, n: &Arc<DiagModule>) -> Result<DiagHomSet> {
    let ix = &m.rep.index;
    let parts = (0..ix.n())
        .map(|c| hom_modules(m.part(c), n.part(c)))
        .collect::<Result<Vec<_>>>()?;
    let mut offsets = vec![0];
    let mut orders = Vec::new();
    for h in &parts {
        orders.extend_from_slice(h.group().factors());
        offsets.push(orders.len());
    }
    let ambient = FinAb::raw(&orders);
    let proto = DiagHomSet {
        src: m.clone(),
        tgt: n.clone(),
        parts,
        offsets,
        sub: SubGroup {
            group: ambient.clone(),
            incl: AbHom::identity(&ambient),
        },
    };
    let basis: Vec<DiagModHom> = (0..orders.len())
        .map(|k| proto.map_at(&ambient.gen(k)))
        .collect();
    let mut rows: Vec<(Vec<i64>, i64)> = Vec::new();
    for al in 0..ix.m() {
        let (c, d) = (ix.src(al), ix.tgt(al));
        let f = m.rep.functor(al);
        let touched: BTreeSet<usize> = (proto.offsets[c]..proto.offsets[c + 1])
            .chain(proto.offsets[d]..proto.offsets[d + 1])
            .collect();
        for a in 0..f.src.n() {
            let defects: Vec<(usize, AbHom)> = touched
                .iter()
                .map(|&k| {
                    let phi = &basis[k];
                    let h = phi.comps[d]
                        .comp(f.obj[a])
                        .compose(m.structural(al).comp(a))
                        .sub(&n.structural(al).comp(a).compose(phi.comps[c].comp(a)));
                    (k, h)
                })
                .collect();
            for (p, ord) in n.part(d).value(f.obj[a]).factors().iter().enumerate() {
                for q in 0..m.part(c).value(a).rank() {
                    let mut row = vec![0; orders.len()];
                    for (k, h) in &defects {
                        row[*k] += h.matrix()[p][q];
                    }
                    if row.iter().any(|x| *x != 0) {
                        rows.push((row, *ord));
                    }
                }
            }
        }
    }
    let sub = solve_congruences(&ambient, &rows)?;
    Ok(DiagHomSet { sub, ..proto })
}

// ---------------------------------------------------------------------------
// Comparison maps between composite base changes

/// `σ_N: α*β*N → (βα)*N`, with components `N(μ⁻¹)`.
pub fn sigma(rep: &Representation, beta: usize, alpha: usize, n: &Arc<RMod>) -> Result<ModHom> {
    let ix = &rep.index;
    let Some(ga) = ix.compose(beta, alpha) else {
        return invalid("morphisms are not composable");
    };
    let (fa, fb, fg) = (rep.functor(alpha), rep.functor(beta), rep.functor(ga));
    let e = rep.ring(ix.tgt(beta));
    let src = Arc::new(restrict_scalars(fa, &Arc::new(restrict_scalars(fb, n)?))?);
    let tgt = Arc::new(restrict_scalars(fg, n)?);
    let comps = (0..fa.src.n())
        .map(|a| {
            let p = fb.obj[fa.obj[a]];
            let inv = e
                .inverse_of(p, fg.obj[a], rep.mu(beta, alpha, a))
                .ok_or_else(|| AlgError::Invalid("mu component is not invertible".into()))?;
            Ok(n.action(fg.obj[a], p, &inv))
        })
        .collect::<Result<Vec<_>>>()?;
    ModHom::new(src, tgt, comps)
}

/// `τ_M: β_!α_!M → (βα)_!M` together with the three extensions it connects.
#[derive(Clone, Debug)]
pub struct Tau {
    pub inner: TensorExt,
    pub outer: TensorExt,
    pub direct: TensorExt,
    pub map: ModHom,
}

/// `(m ⊗ g) ⊗ f ↦ m ⊗ (μ ∘ R_β(g) ∘ f)`.
pub fn tau(rep: &Representation, beta: usize, alpha: usize, m: &Arc<RMod>) -> Result<Tau> {
    let ix = &rep.index;
    let Some(ga) = ix.compose(beta, alpha) else {
        return invalid("morphisms are not composable");
    };
    let (fa, fb, fg) = (rep.functor(alpha), rep.functor(beta), rep.functor(ga));
    let (rd, re) = (rep.ring(ix.tgt(alpha)), rep.ring(ix.tgt(beta)));
    let inner = rep.change(alpha)?.extend(m)?;
    let outer = rep.change(beta)?.extend(&inner.module)?;
    let direct = rep.change(ga)?.extend(m)?;
    let comps = (0..re.n())
        .map(|x| {
            let (src, tgt) = (&outer.parts[x], &direct.parts[x]);
            src.map_pairs(tgt.group(), |b, i, j| {
                let mid = &inner.parts[b];
                let f = re.hom(x, fb.obj[b]).gen(j);
                let mut acc = tgt.group().zero();
                for (a, p, q, k) in mid.expand(&mid.group().gen(i)) {
                    let pa = fa.obj[a];
                    let g = rd.hom(b, pa).gen(q);
                    let bg = fb.apply(b, pa, &g);
                    let h = re.compose(x, fb.obj[b], fb.obj[pa], &bg, &f);
                    let h = re.compose(x, fb.obj[pa], fg.obj[a], rep.mu(beta, alpha, a), &h);
                    let v = tgt.pair(a, &m.value(a).gen(p), &h);
                    tgt.group().add_assign(&mut acc, &tgt.group().scale(k, &v));
                }
                acc
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let map = ModHom::new(outer.module.clone(), direct.module.clone(), comps)?;
    Ok(Tau {
        inner,
        outer,
        direct,
        map,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaTauReport {
    pub morphisms: (String, String),
    pub sigma_invertible: bool,
    pub tau_invertible: bool,
    pub sigma_identity: bool,
    /// Agreement with the plain composite isomorphism; only defined for strict representations.
    pub tau_matches_composite: Option<bool>,
    /// `ε_{βα} ∘ τ ∘ β_!α_!(σ) = ε_β ∘ β_!(ε_α)` at `N`.
    pub counit_square: bool,
    /// `(βα)*(τ) ∘ σ ∘ α*(η_β) ∘ η_α = η_{βα}` at `M`.
    pub unit_square: bool,
}

impl SigmaTauReport {
    pub fn holds(&self) -> bool {
        self.sigma_invertible
            && self.tau_invertible
            && self.counit_square
            && self.unit_square
            && self.tau_matches_composite != Some(false)
    }
}

fn same_map(f: &ModHom, g: &ModHom) -> bool {
    f.comps().len() == g.comps().len()
        && f.comps()
            .iter()
            .zip(g.comps())
            .all(|(a, b)| a.matrix() == b.matrix())
}

/// Builds `σ` and `τ` for `β∘α` and checks both compatibility squares at `m` (over the source of
/// `α`) and `n` (over the target of `β`).
pub fn sigma_tau(
    rep: &Representation,
    beta: usize,
    alpha: usize,
    m: &Arc<RMod>,
    n: &Arc<RMod>,
) -> Result<SigmaTauReport> {
    let ix = &rep.index;
    let Some(ga) = ix.compose(beta, alpha) else {
        return invalid("morphisms are not composable");
    };
    let (bca, bcb, bcg) = (rep.change(alpha)?, rep.change(beta)?, rep.change(ga)?);

    // counit square at N
    let sig = sigma(rep, beta, alpha, n)?;
    let p = bcb.restrict(n)?;
    let q = bca.restrict(&p)?;
    let gq = bcg.restrict(n)?;
    let aq = bca.extend(&q)?;
    let agq = bca.extend(&gq)?;
    let a_sig = bca.extend_hom(&sig, &aq, &agq)?;
    let baq = bcb.extend(&aq.module)?;
    let bagq = bcb.extend(&agq.module)?;
    let ba_sig = bcb.extend_hom(&a_sig, &baq, &bagq)?;
    let t_n = tau(rep, beta, alpha, &gq)?;
    let eps_g = bcg.counit(n, &t_n.direct)?;
    let lhs = eps_g.compose(&t_n.map).compose(&ba_sig);
    let eps_a = bca.counit(&p, &aq)?;
    let bp = bcb.extend(&p)?;
    let b_eps_a = bcb.extend_hom(&eps_a, &baq, &bp)?;
    let eps_b = bcb.counit(n, &bp)?;
    let rhs = eps_b.compose(&b_eps_a);
    let counit_square = same_map(&lhs, &rhs);

    // unit square at M
    let t_m = tau(rep, beta, alpha, m)?;
    let x = &t_m.inner;
    let eta_a = bca.unit(m, x, &bca.restrict(&x.module)?)?;
    let y = &t_m.outer;
    let by = bcb.restrict(&y.module)?;
    let eta_b = bcb.unit(&x.module, y, &by)?;
    let a_eta_b = bca.restrict_hom(&eta_b, &bca.restrict(&x.module)?, &bca.restrict(&by)?)?;
    let sig_y = sigma(rep, beta, alpha, &y.module)?;
    let g_direct = bcg.restrict(&t_m.direct.module)?;
    let g_tau = bcg.restrict_hom(&t_m.map, &bcg.restrict(&y.module)?, &g_direct)?;
    let eta_g = bcg.unit(m, &t_m.direct, &g_direct)?;
    let unit_square = same_map(
        &g_tau.compose(&sig_y).compose(&a_eta_b).compose(&eta_a),
        &eta_g,
    );

    let tau_matches_composite = if rep.is_strict() {
        let plain = composition_iso(bca, bcb, bcg, m)?;
        Some(same_map(&plain, &t_m.map))
    } else {
        None
    };
    Ok(SigmaTauReport {
        morphisms: (ix.morphisms[beta].0.clone(), ix.morphisms[alpha].0.clone()),
        sigma_invertible: sig.is_iso() && sig_y.is_iso(),
        tau_invertible: t_m.map.is_iso() && t_n.map.is_iso(),
        sigma_identity: sig.is_identity() && sig_y.is_identity(),
        tau_matches_composite,
        counit_square,
        unit_square,
    })
}

// ---------------------------------------------------------------------------
// Extension by zero (poset indices)

/// `ext_c(N)`, keeping `(α_d)_!N` and `α_d` for every object `d` above `c`.
#[derive(Clone, Debug)]
pub struct ExtZero {
    pub c: usize,
    pub source: Arc<RMod>,
    pub module: Arc<DiagModule>,
    pub exts: Vec<Option<(usize, TensorExt)>>,
}

pub fn ext_zero(rep: &Arc<Representation>, c: usize, n: &Arc<RMod>) -> Result<ExtZero> {
    let ix = &rep.index;
    if !ix.is_poset() {
        return Err(AlgError::NotPoset);
    }
    if !same_base(n.base(), rep.ring(c)) {
        return Err(AlgError::BaseMismatch(format!(
            "module is not over {}",
            rep.ring(c).name
        )));
    }
    let exts = (0..ix.n())
        .map(|d| match ix.hom(c, d).first() {
            Some(&al) => Ok(Some((al, rep.change(al)?.extend(n)?))),
            None => Ok(None),
        })
        .collect::<Result<Vec<_>>>()?;
    let parts: Vec<Arc<RMod>> = exts
        .iter()
        .enumerate()
        .map(|(d, e)| match e {
            Some((_, t)) => t.module.clone(),
            None => Arc::new(RMod::zero(rep.ring(d))),
        })
        .collect();
    let module = DiagModule::from_fn(rep, parts.clone(), |be, b| {
        let (d, e) = (ix.src(be), ix.tgt(be));
        let fb = rep.functor(be);
        let (Some((ad, ed)), Some((_, ee))) = (&exts[d], &exts[e]) else {
            return Ok(AbHom::zero(parts[d].value(b), parts[e].value(fb.obj[b])));
        };
        let fad = rep.functor(*ad);
        let (rd, re) = (rep.ring(d), rep.ring(e));
        let tgt = &ee.parts[fb.obj[b]];
        ed.parts[b].map_pairs(tgt.group(), |x, i, j| {
            let f = rd.hom(b, fad.obj[x]).gen(j);
            let bf = fb.apply(b, fad.obj[x], &f);
            let ae = ix.compose(be, *ad).expect("composable in a poset");
            let h = re.compose(
                fb.obj[b],
                fb.obj[fad.obj[x]],
                rep.functor(ae).obj[x],
                rep.mu(be, *ad, x),
                &bf,
            );
            tgt.pair(x, &n.value(x).gen(i), &h)
        })
    })?;
    Ok(ExtZero {
        c,
        source: n.clone(),
        module: Arc::new(module),
        exts,
    })
}

/// `ext_c(f)` for `f: N → N'` over the ringoid at `c`.
pub fn ext_zero_hom(src: &ExtZero, tgt: &ExtZero, f: &ModHom) -> Result<DiagModHom> {
    let rep = &src.module.rep;
    let comps = src
        .exts
        .iter()
        .zip(&tgt.exts)
        .enumerate()
        .map(|(d, pair)| match pair {
            (Some((al, s)), Some((_, t))) => rep.change(*al)?.extend_hom(f, s, t),
            _ => Ok(ModHom::zero(src.module.part(d), tgt.module.part(d))),
        })
        .collect::<Result<Vec<_>>>()?;
    DiagModHom::new(src.module.clone(), tgt.module.clone(), comps)
}

#[derive(Clone, Debug, Serialize)]
pub struct AdjunctionCheck {
    pub ext_hom_order: u64,
    pub part_hom_order: u64,
    /// `φ ↦ φ_c` has trivial kernel.
    pub injective: bool,
    /// `φ ↦ φ_c` hits every generator, via the explicit preimage formula.
    pub surjective: bool,
    /// Every constructed preimage is a morphism of modules.
    pub preimages_natural: bool,
}

impl AdjunctionCheck {
    pub fn holds(&self) -> bool {
        self.ext_hom_order == self.part_hom_order
            && self.injective
            && self.surjective
            && self.preimages_natural
    }
}

/// `Hom(ext_c N, M) → Hom(N, M_c)`, restriction to `c`, checked to be bijective.
pub fn ext_adjunction_check(
    rep: &Arc<Representation>,
    c: usize,
    n: &Arc<RMod>,
    m: &Arc<DiagModule>,
) -> Result<AdjunctionCheck> {
    let ext = ext_zero(rep, c, n)?;
    let lhs = diag_homs(&ext.module, m)?;
    let rhs = hom_modules(n, m.part(c))?;
    let (_, ec) = ext.exts[c].as_ref().expect("c lies above itself");
    let iota_comps = (0..n.n())
        .map(|a| {
            let t = &ec.parts[a];
            let imgs: Vec<Elem> = n
                .value(a)
                .gens()
                .iter()
                .map(|x| t.pair(a, x, rep.delta(c, a)))
                .collect();
            AbHom::from_images(n.value(a).clone(), t.group().clone(), &imgs)
        })
        .collect::<Result<Vec<_>>>()?;
    let iota = ModHom::new(n.clone(), ext.module.part(c).clone(), iota_comps)?;
    let restrict = |phi: &DiagModHom| rhs.from_modhom(&phi.comp(c).compose(&iota));
    let imgs = (0..lhs.group().rank())
        .map(|k| {
            restrict(&lhs.to_hom(&lhs.group().gen(k)))
                .ok_or_else(|| AlgError::Invalid("restriction is not a module map".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let big_phi = AbHom::from_images(lhs.group().clone(), rhs.group().clone(), &imgs)?;
    let mut preimages_natural = true;
    let mut hits = true;
    for k in 0..rhs.group().rank() {
        let z = rhs.group().gen(k);
        let phi = rhs.to_modhom(&z);
        let psi = ext_preimage(&ext, &phi, m)?;
        preimages_natural &= psi.is_natural();
        hits &= restrict(&psi).as_deref() == Some(&z[..]);
    }
    Ok(AdjunctionCheck {
        ext_hom_order: lhs.order(),
        part_hom_order: rhs.order(),
        injective: big_phi.is_injective(),
        surjective: hits && big_phi.is_surjective(),
        preimages_natural,
    })
}

/// `ψ_d = ε ∘ (α_d)_!(M_{α_d} ∘ φ)`: `n ⊗ f ↦ M_d(f)(M_{α_d}(φ(n)))`.
pub fn ext_preimage(ext: &ExtZero, phi: &ModHom, m: &Arc<DiagModule>) -> Result<DiagModHom> {
    let rep = &m.rep;
    let n = &ext.source;
    let comps = ext
        .exts
        .iter()
        .enumerate()
        .map(|(d, e)| {
            let md = m.part(d);
            let Some((ad, t)) = e else {
                return Ok(ModHom::zero(ext.module.part(d), md));
            };
            let fad = rep.functor(*ad);
            let rd = rep.ring(d);
            let comps = (0..rd.n())
                .map(|b| {
                    t.parts[b].map_pairs(md.value(b), |x, i, j| {
                        let u = phi.apply(x, &n.value(x).gen(i));
                        let w = m.apply_structural(*ad, x, &u);
                        md.act(b, fad.obj[x], &rd.hom(b, fad.obj[x]).gen(j), &w)
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            ModHom::new(ext.module.part(d).clone(), md.clone(), comps)
        })
        .collect::<Result<Vec<_>>>()?;
    DiagModHom::new(ext.module.clone(), m.clone(), comps)
}

// ---------------------------------------------------------------------------
// Tensor product and flatness

/// `⊕_c M_c ⊗ N_c` for a right module `M` and a left module `N` (a module over the opposite
/// representation).
#[derive(Clone, Debug)]
pub struct DiagTensor {
    pub parts: Vec<TensorValue>,
    pub sum: DirectSum,
}

impl DiagTensor {
    pub fn group(&self) -> &FinAb {
        &self.sum.group
    }
}

pub fn diag_tensor(m: &DiagModule, n: &DiagModule) -> Result<DiagTensor> {
    if m.parts.len() != n.parts.len() {
        return Err(AlgError::BaseMismatch(
            "modules are indexed by different categories".into(),
        ));
    }
    let parts = m
        .parts
        .iter()
        .zip(&n.parts)
        .map(|(a, b)| mod_tensor(a, b))
        .collect::<Result<Vec<_>>>()?;
    let sum = DirectSum::new(&parts.iter().map(|t| t.group().clone()).collect::<Vec<_>>())?;
    Ok(DiagTensor { parts, sum })
}

/// `φ ⊗ ψ`, assembled block by block on the diagonal.
pub fn diag_tensor_map(
    src: &DiagTensor,
    tgt: &DiagTensor,
    phi: &DiagModHom,
    psi: &DiagModHom,
) -> AbHom {
    let mut acc = AbHom::zero(src.group(), tgt.group());
    for (c, (s, t)) in src.parts.iter().zip(&tgt.parts).enumerate() {
        let block = s.map(t, phi.comp(c), psi.comp(c));
        acc = acc.add(&tgt.sum.inj[c].compose(&block).compose(&src.sum.proj[c]));
    }
    acc
}

/// The `(d, c)` block `tgt_d ← src_c` of a map between diagram tensor products.
pub fn tensor_block(h: &AbHom, src: &DiagTensor, tgt: &DiagTensor, c: usize, d: usize) -> AbHom {
    tgt.sum.proj[d].compose(h).compose(&src.sum.inj[c])
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagFlatness {
    pub componentwise: Vec<Verdict>,
    pub componentwise_flat: bool,
    /// Exactness of `M ⊗ −` on extensions by zero of monomorphisms; posets only.
    pub global: Option<bool>,
    pub sequences_tested: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub global_witness: Option<Value>,
    /// Poset index and left flat representation: the two verdicts must coincide.
    pub converse_applies: bool,
    pub agree: Option<bool>,
    pub holds: Option<bool>,
}

const MAX_FLAT_SEQUENCES: usize = 64;

pub fn diag_is_flat(m: &Arc<DiagModule>, opts: &SearchOptions) -> Result<DiagFlatness> {
    let rep = &m.rep;
    let ix = &rep.index;
    let componentwise = m
        .parts
        .iter()
        .map(|p| is_flat(p, FlatMethod::All, opts))
        .collect::<Result<Vec<_>>>()?;
    let componentwise_flat = componentwise.iter().all(|v| v.holds);
    let (mut global, mut sequences_tested, mut global_witness) = (None, 0, None);
    if ix.is_poset() {
        let op = Arc::new(rep.opposite()?);
        let mut ok = true;
        'objs: for c in 0..ix.n() {
            let family = bounded_left_modules(op.ring(c), opts.generators.min(1), opts.budget)?;
            for k in &family {
                let ext_k = ext_zero(&op, c, k)?;
                let t_k = diag_tensor(m, &ext_k.module)?;
                for s in all_submodules(k, opts.budget)? {
                    if s.module.is_zero() || s.cardinality() == k.cardinality() {
                        continue;
                    }
                    let ext_s = ext_zero(&op, c, &s.module)?;
                    let f = ext_zero_hom(&ext_s, &ext_k, &s.incl)?;
                    if !f.is_mono() {
                        continue;
                    }
                    sequences_tested += 1;
                    let t_s = diag_tensor(m, &ext_s.module)?;
                    let h = diag_tensor_map(&t_s, &t_k, &DiagModHom::identity(m), &f);
                    if !h.is_injective() {
                        ok = false;
                        global_witness = Some(json!({"object": &ix.objects[c],
                            "test_module": k.values().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                            "submodule": s.module.values().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                            "kernel_order": h.kernel()?.group.order()}));
                        break 'objs;
                    }
                    if sequences_tested >= MAX_FLAT_SEQUENCES {
                        break 'objs;
                    }
                }
            }
        }
        global = Some(ok);
    }
    let converse_applies = ix.is_poset() && rep.flatness(opts)?.left;
    let agree = converse_applies.then(|| global == Some(componentwise_flat));
    let holds = if componentwise_flat {
        Some(true)
    } else if global == Some(false) || converse_applies {
        Some(false)
    } else {
        None
    };
    Ok(DiagFlatness {
        componentwise,
        componentwise_flat,
        global,
        sequences_tested,
        global_witness,
        converse_applies,
        agree,
        holds,
    })
}

// ---------------------------------------------------------------------------
// Cartesian modules

/// `(M_α)_!: α_!M_c → M_d`, `m ⊗ f ↦ M_d(f)(M_α(m))`.
pub fn structural_adjoint(m: &DiagModule, alpha: usize) -> Result<(TensorExt, ModHom)> {
    let rep = &m.rep;
    let ix = &rep.index;
    let (c, d) = (ix.src(alpha), ix.tgt(alpha));
    let fa = rep.functor(alpha);
    let rd = rep.ring(d);
    let ext = rep.change(alpha)?.extend(m.part(c))?;
    let md = m.part(d);
    let comps = (0..rd.n())
        .map(|b| {
            ext.parts[b].map_pairs(md.value(b), |x, i, j| {
                let w = m.apply_structural(alpha, x, &m.part(c).value(x).gen(i));
                md.act(b, fa.obj[x], &rd.hom(b, fa.obj[x]).gen(j), &w)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let h = ModHom::new(ext.module.clone(), md.clone(), comps)?;
    Ok((ext, h))
}

#[derive(Clone, Debug, Serialize)]
pub struct ArrowEvidence {
    pub morphism: String,
    pub iso: bool,
    pub kernel_order: u64,
    pub cokernel_order: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CartesianReport {
    pub holds: bool,
    pub arrows: Vec<ArrowEvidence>,
}

pub fn is_cartesian(m: &DiagModule) -> Result<CartesianReport> {
    let ix = &m.rep.index;
    let mut arrows = Vec::new();
    for al in 0..ix.m() {
        let (_, h) = structural_adjoint(m, al)?;
        let mut kernel_order = 1;
        let mut cokernel_order = 1;
        for c in h.comps() {
            kernel_order *= c.kernel()?.group.order();
            cokernel_order *= c.cokernel()?.0.order();
        }
        arrows.push(ArrowEvidence {
            morphism: ix.morphisms[al].0.clone(),
            iso: kernel_order == 1 && cokernel_order == 1,
            kernel_order,
            cokernel_order,
        });
    }
    Ok(CartesianReport {
        holds: arrows.iter().all(|a| a.iso),
        arrows,
    })
}

#[derive(Clone, Debug)]
pub struct CartesianHull {
    pub sub: DiagSub,
    pub rounds: usize,
    pub cartesian: bool,
    pub pure_parts: Vec<bool>,
}

/// A pure submodule of `M_{c1}` containing `y1` whose extension covers `y2`: the smallest one
/// in the submodule lattice, or the pure closure of explicit tensor preimages when the lattice
/// is too large.
fn repair_source(
    m: &DiagModule,
    al: usize,
    ext: &TensorExt,
    inv: &[AbHom],
    y1: &Submodule,
    y2: &Submodule,
    opts: &SearchOptions,
) -> Result<Submodule> {
    let ix = &m.rep.index;
    let (c1, c2) = (ix.src(al), ix.tgt(al));
    let src = m.part(c1);
    let obj = &m.rep.functor(al).obj;
    let covers = |s: &Submodule| -> Result<bool> {
        let imgs: Vec<(usize, Elem)> = s
            .generators()
            .into_iter()
            .map(|(o, v)| (obj[o], m.apply_structural(al, o, &v)))
            .collect();
        Ok(y2.is_contained_in(&submodule_generated(m.part(c2), &imgs)?))
    };
    match all_submodules(src, opts.budget) {
        Ok(lattice) => {
            for s in lattice {
                if y1.is_contained_in(&s) && covers(&s)? && retraction(&s.incl)?.is_some() {
                    return Ok(s);
                }
            }
            unreachable!("the whole part is pure and covers the target")
        }
        Err(AlgError::Budget(_)) => {
            let mut g = y1.generators();
            for (b, y) in y2.generators() {
                let z = inv[b].apply(&y);
                let mut acc: BTreeMap<(usize, usize), Elem> = BTreeMap::new();
                for (o, i, j, k) in ext.parts[b].expand(&z) {
                    let e = acc.entry((o, j)).or_insert_with(|| src.value(o).zero());
                    src.value(o)
                        .add_assign(e, &src.value(o).scale(k, &src.value(o).gen(i)));
                }
                g.extend(
                    acc.into_iter()
                        .filter(|(_, v)| !FinAb::is_zero(v))
                        .map(|((o, _), v)| (o, v)),
                );
            }
            pure_closure(&submodule_generated(src, &g)?, opts)
        }
        Err(e) => Err(e),
    }
}

/// A cartesian submodule with pure parts containing `x ∈ M_c(a)`, grown arrow by arrow until
/// nothing changes.
pub fn cartesian_hull(
    m: &Arc<DiagModule>,
    c: usize,
    a: usize,
    x: &[i64],
    opts: &SearchOptions,
) -> Result<CartesianHull> {
    let rep = &m.rep;
    let ix = &rep.index;
    if !rep.flatness(opts)?.right {
        return Err(AlgError::Hypothesis(
            "representation is not right flat".into(),
        ));
    }
    if !is_cartesian(m)?.holds {
        return Err(AlgError::Hypothesis("module is not cartesian".into()));
    }
    let adjoints: Vec<(TensorExt, Vec<AbHom>)> = (0..ix.m())
        .map(|al| {
            let (ext, h) = structural_adjoint(m, al)?;
            let inv = h
                .comps()
                .iter()
                .map(|g| g.inverse().expect("cartesian"))
                .collect();
            Ok((ext, inv))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut parts = diag_generated(m, &[(c, a, x.to_vec())])?.parts;
    let mut rounds = 0;
    loop {
        rounds += 1;
        let before: Vec<_> = parts.iter().map(Submodule::key).collect();
        for (al, (ext, inv)) in adjoints.iter().enumerate() {
            let (c1, c2) = (ix.src(al), ix.tgt(al));
            let n0 = repair_source(m, al, ext, inv, &parts[c1], &parts[c2], opts)?;
            let obj = &rep.functor(al).obj;
            let mut g2 = parts[c2].generators();
            g2.extend(
                n0.generators()
                    .into_iter()
                    .map(|(o, v)| (obj[o], m.apply_structural(al, o, &v))),
            );
            if c1 == c2 {
                g2.extend(n0.generators());
            } else {
                parts[c1] = n0;
            }
            parts[c2] = submodule_generated(m.part(c2), &g2)?;
            parts = diag_closure(m, parts)?;
        }
        if parts.iter().map(Submodule::key).collect::<Vec<_>>() == before {
            break;
        }
    }
    let sub = diag_sub(m, parts)?;
    let cartesian = is_cartesian(&sub.module)?.holds;
    let pure_parts = sub
        .incl
        .comps()
        .iter()
        .map(|i| is_pure(i, opts).map(|v| v.holds))
        .collect::<Result<Vec<_>>>()?;
    Ok(CartesianHull {
        sub,
        rounds,
        cartesian,
        pure_parts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::cyclic_module;
    use crate::ringoid::{ringoid_of_ring, RingSpec};
    use proptest::prelude::*;

    fn zn(n: i64) -> Arc<Ringoid> {
        Arc::new(ringoid_of_ring(&RingSpec::Zn(n)).unwrap())
    }

    fn quotient(n: i64, k: i64) -> AddFunctor {
        AddFunctor::from_ring_map(&zn(n), &zn(k), &[vec![1]]).unwrap()
    }

    fn arrow_rep(n: i64, k: i64) -> Arc<Representation> {
        Arc::new(Representation::arrow_of(format!("Z/{n}->Z/{k}"), &quotient(n, k)).unwrap())
    }

    fn toy_rep() -> Arc<Representation> {
        Arc::new(Representation::toy_p1_of("toy", &quotient(6, 2), &quotient(6, 2)).unwrap())
    }

    /// Cyclic parts `Z/k_c` with structural maps given by multiplication by `s(α)`.
    fn scalar_module(
        rep: &Arc<Representation>,
        ks: &[i64],
        s: impl Fn(usize) -> i64,
    ) -> Arc<DiagModule> {
        let parts: Vec<Arc<RMod>> = ks
            .iter()
            .enumerate()
            .map(|(c, &k)| Arc::new(cyclic_module(rep.ring(c), k).unwrap()))
            .collect();
        let ix = &rep.index;
        Arc::new(
            DiagModule::from_fn(rep, parts.clone(), |al, _| {
                let (src, tgt) = (parts[ix.src(al)].value(0), parts[ix.tgt(al)].value(0));
                let imgs: Vec<Elem> = src
                    .gens()
                    .iter()
                    .map(|_| {
                        if tgt.rank() == 0 {
                            tgt.zero()
                        } else {
                            tgt.scale(s(al), &tgt.gen(0))
                        }
                    })
                    .collect();
                AbHom::from_images(src.clone(), tgt.clone(), &imgs)
            })
            .unwrap(),
        )
    }

    fn arrow_module(rep: &Arc<Representation>, k0: i64, k1: i64) -> Arc<DiagModule> {
        scalar_module(rep, &[k0, k1], |_| 1)
    }

    /// Brute-force count of morphisms: every tuple of additive maps, filtered by naturality.
    fn brute_diag_hom_count(m: &Arc<DiagModule>, n: &Arc<DiagModule>) -> usize {
        let per_part: Vec<Vec<ModHom>> = (0..m.parts().len())
            .map(|c| {
                let (s, t) = (m.part(c), n.part(c));
                let mut out: Vec<Vec<AbHom>> = vec![vec![]];
                for a in 0..s.n() {
                    let hs = crate::abelian::ab_hom(s.value(a), t.value(a)).unwrap();
                    let all: Vec<AbHom> = hs.elements().collect();
                    out = out
                        .into_iter()
                        .flat_map(|pre| {
                            all.iter().map(move |h| {
                                let mut v = pre.clone();
                                v.push(h.clone());
                                v
                            })
                        })
                        .collect();
                }
                out.into_iter()
                    .map(|cs| ModHom::new(s.clone(), t.clone(), cs).unwrap())
                    .collect()
            })
            .collect();
        let mut tuples: Vec<Vec<ModHom>> = vec![vec![]];
        for opts in &per_part {
            tuples = tuples
                .into_iter()
                .flat_map(|pre| {
                    opts.iter().map(move |h| {
                        let mut v = pre.clone();
                        v.push(h.clone());
                        v
                    })
                })
                .collect();
        }
        tuples
            .into_iter()
            .filter(|cs| {
                DiagModHom::new(m.clone(), n.clone(), cs.clone())
                    .unwrap()
                    .is_natural()
            })
            .count()
    }

    #[test]
    fn small_categories_validate() {
        for cat in [
            SmallCat::arrow(),
            SmallCat::toy_p1(),
            SmallCat::idempotent(),
            SmallCat::arrow_with_endo(),
        ] {
            assert!(cat.validate().all_pass(), "{}", cat.name);
        }
        assert!(SmallCat::toy_p1().is_poset());
        assert!(!SmallCat::idempotent().is_poset());
    }

    #[test]
    fn strict_representations_pass() {
        for rep in [arrow_rep(6, 2), arrow_rep(4, 2), toy_rep()] {
            let v = rep.validate();
            assert!(v.all_pass(), "{:?}", v.failures().collect::<Vec<_>>());
            assert!(rep.is_strict());
        }
    }

    #[test]
    fn twisted_representation_is_coherent_but_not_strict() {
        let rep = arrow_rep(6, 2)
            .twisted(&[vec![5], vec![1], vec![1]])
            .unwrap();
        assert!(!rep.is_strict());
        assert!(rep.validate().all_pass());
        let op = rep.opposite().unwrap();
        assert!(op.validate().all_pass());
    }

    #[test]
    fn corrupted_mu_fails_associativity() {
        let good = arrow_rep(6, 3);
        let ix = good.index.clone();
        let mut mu = vec![vec![None; ix.m()]; ix.m()];
        for (b, a) in ix.composable_pairs() {
            mu[b][a] = Some(vec![good.mu(b, a, 0).clone()]);
        }
        mu[0][0] = Some(vec![vec![5]]);
        let delta = vec![vec![vec![1]], vec![vec![1]]];
        let bad = Representation::new(
            "corrupt",
            ix,
            good.rings().to_vec(),
            (0..3).map(|a| good.functor(a).clone()).collect(),
            delta,
            mu,
        )
        .unwrap();
        let v = bad.validate();
        let w = v
            .first_failure("associativity-coherence")
            .expect("coherence failure");
        assert!(w.witness.is_some());
    }

    #[test]
    fn module_axioms() {
        let rep = arrow_rep(6, 2);
        assert!(DiagModule::zero(&rep).validate().all_pass());
        let m = arrow_module(&rep, 6, 2);
        assert!(m.validate().all_pass());
        assert_eq!(m.cardinality(), 8);
        assert_eq!(DiagModule::zero(&rep).cardinality(), 2);
        // multiplication by 5 on the identity of the source part
        let bad = scalar_module(&rep, &[6, 2], |al| if al == 0 { 5 } else { 1 });
        let v = bad.validate();
        assert!(v.first_failure("composition").is_some());
        assert!(v.first_failure("identity").is_some());
    }

    #[test]
    fn twisted_modules_need_twisted_identity() {
        let rep = Arc::new(
            arrow_rep(6, 2)
                .twisted(&[vec![5], vec![1], vec![1]])
                .unwrap(),
        );
        // δ_0 = 5, so M_{id_0} must be multiplication by 5⁻¹ = 5 and M_f absorbs μ_{f,id_0} = 5
        let m = scalar_module(&rep, &[6, 2], |al| if al == 0 { 5 } else { 1 });
        assert!(
            m.validate().all_pass(),
            "{:?}",
            m.validate().failures().collect::<Vec<_>>()
        );
        assert!(!arrow_module(&rep, 6, 2).validate().all_pass());
    }

    #[test]
    fn sigma_tau_on_strict_and_twisted() {
        let strict = arrow_rep(6, 2);
        let twisted = Arc::new(strict.twisted(&[vec![5], vec![1], vec![1]]).unwrap());
        for rep in [strict, twisted] {
            let ix = &rep.index;
            for (b, a) in ix.composable_pairs() {
                let (c, e) = (ix.src(a), ix.tgt(b));
                let m = Arc::new(RMod::representable(rep.ring(c), 0).unwrap());
                let n = Arc::new(cyclic_module(rep.ring(e), 2).unwrap());
                let r = sigma_tau(&rep, b, a, &m, &n).unwrap();
                assert!(r.holds(), "{r:?}");
                if rep.is_strict() {
                    assert!(r.sigma_identity);
                    assert_eq!(r.tau_matches_composite, Some(true));
                }
            }
        }
        let twisted = arrow_rep(6, 2)
            .twisted(&[vec![5], vec![1], vec![1]])
            .unwrap();
        let m = Arc::new(cyclic_module(twisted.ring(0), 6).unwrap());
        let r = sigma_tau(&twisted, 0, 0, &m, &m).unwrap();
        assert!(!r.sigma_identity);
        assert!(r.holds());
    }

    #[test]
    fn kernels_cokernels_sums() {
        let rep = arrow_rep(6, 2);
        let m = arrow_module(&rep, 6, 2);
        let k = diag_kernel(&DiagModHom::identity(&m)).unwrap();
        assert!(k.module.is_zero());
        // the submodule (2Z/6 ≅ Z/3, 0) is closed; quotient is (Z/2, Z/2)
        let sub = diag_generated(&m, &[(0, 0, vec![2])]).unwrap();
        assert_eq!(sub.parts[0].cardinality(), 3);
        assert_eq!(sub.parts[1].cardinality(), 1);
        let (q, p) = diag_quotient(&sub).unwrap();
        assert!(q.validate().all_pass());
        assert!(p.is_natural() && p.is_epi());
        assert_eq!(q.part(0).value(0).order(), 2);
        assert_eq!(q.part(1).value(0).order(), 2);
        let (q2, _) = diag_cokernel(&sub.incl).unwrap();
        assert_eq!(q2.cardinality(), q.cardinality());
        let s = diag_sum(&[m.clone(), q.clone()]).unwrap();
        assert!(s.module.validate().all_pass());
        for c in 0..2 {
            assert_eq!(
                s.module.part(c).value(0).order(),
                m.part(c).value(0).order() * q.part(c).value(0).order()
            );
        }
        assert!(s.inj.iter().chain(&s.proj).all(DiagModHom::is_natural));
    }

    #[test]
    fn hom_groups_match_brute_force() {
        let rep = arrow_rep(6, 2);
        let m = arrow_module(&rep, 6, 2);
        let n = arrow_module(&rep, 3, 1);
        for (x, y) in [(&m, &m), (&m, &n), (&n, &m)] {
            let hs = diag_homs(x, y).unwrap();
            assert_eq!(hs.order() as usize, brute_diag_hom_count(x, y));
            assert!(hs.elements().all(|h| h.is_natural()));
        }
    }

    #[test]
    fn extension_by_zero() {
        let rep = toy_rep();
        let n = Arc::new(cyclic_module(rep.ring(0), 6).unwrap());
        let e = ext_zero(&rep, 0, &n).unwrap();
        assert!(e.module.validate().all_pass());
        let orders: Vec<u64> = (0..3).map(|c| e.module.part(c).value(0).order()).collect();
        assert_eq!(orders, vec![6, 1, 2]);
        // maximal object: supported there only
        let w = Arc::new(cyclic_module(rep.ring(2), 2).unwrap());
        let e = ext_zero(&rep, 2, &w).unwrap();
        assert_eq!(
            (0..3)
                .map(|c| e.module.part(c).cardinality())
                .collect::<Vec<_>>(),
            vec![1, 1, 2]
        );
        let z = Arc::new(RMod::zero(rep.ring(0)));
        assert!(ext_zero(&rep, 0, &z).unwrap().module.is_zero());
        let idem = Arc::new(
            Representation::strict(
                "idem",
                SmallCat::idempotent(),
                vec![zn(2)],
                vec![AddFunctor::identity(&zn(2)); 2],
            )
            .unwrap(),
        );
        let n2 = Arc::new(cyclic_module(&zn(2), 2).unwrap());
        assert!(matches!(ext_zero(&idem, 0, &n2), Err(AlgError::NotPoset)));
    }

    #[test]
    fn extension_by_zero_on_twisted() {
        let rep = Arc::new(
            arrow_rep(6, 2)
                .twisted(&[vec![5], vec![1], vec![1]])
                .unwrap(),
        );
        let n = Arc::new(cyclic_module(rep.ring(0), 6).unwrap());
        let e = ext_zero(&rep, 0, &n).unwrap();
        assert!(e.module.validate().all_pass());
        assert!(is_cartesian(&e.module).unwrap().holds);
    }

    #[test]
    fn adjunction_bijection() {
        let rep = arrow_rep(6, 2);
        let m = arrow_module(&rep, 6, 2);
        let n = Arc::new(cyclic_module(rep.ring(0), 6).unwrap());
        let chk = ext_adjunction_check(&rep, 0, &n, &m).unwrap();
        assert!(chk.holds(), "{chk:?}");
        let ext = ext_zero(&rep, 0, &n).unwrap();
        assert_eq!(
            chk.ext_hom_order as usize,
            brute_diag_hom_count(&ext.module, &m)
        );
        // representable source: |Hom| = |M_c(a)|
        let h = Arc::new(RMod::representable(rep.ring(0), 0).unwrap());
        let chk = ext_adjunction_check(&rep, 0, &h, &m).unwrap();
        assert!(chk.holds());
        assert_eq!(chk.ext_hom_order, m.part(0).value(0).order());
        let z = Arc::new(RMod::zero(rep.ring(1)));
        let chk = ext_adjunction_check(&rep, 1, &z, &m).unwrap();
        assert_eq!((chk.ext_hom_order, chk.part_hom_order), (1, 1));
        // twisted representation
        let tw = Arc::new(
            arrow_rep(6, 2)
                .twisted(&[vec![5], vec![1], vec![1]])
                .unwrap(),
        );
        let mt = scalar_module(&tw, &[6, 2], |al| if al == 0 { 5 } else { 1 });
        let chk = ext_adjunction_check(&tw, 0, &n, &mt).unwrap();
        assert!(chk.holds(), "{chk:?}");
    }

    #[test]
    fn tensor_is_block_diagonal() {
        let rep = arrow_rep(6, 2);
        let op = Arc::new(rep.opposite().unwrap());
        let m = arrow_module(&rep, 6, 2);
        let n = arrow_module(&op, 6, 2);
        let t = diag_tensor(&m, &n).unwrap();
        assert_eq!(t.group().order(), 12);
        let h = diag_tensor_map(&t, &t, &DiagModHom::identity(&m), &DiagModHom::identity(&n));
        assert!(h.is_identity());
        assert!(
            tensor_block(&h, &t, &t, 0, 1).is_zero() && tensor_block(&h, &t, &t, 1, 0).is_zero()
        );
        let z = DiagModule::zero(&rep);
        assert!(diag_tensor(&z, &n).unwrap().group().is_trivial());
    }

    #[test]
    fn flatness_over_diagrams() {
        let opts = SearchOptions::default();
        let rep = arrow_rep(6, 2);
        let h = Arc::new(RMod::representable(rep.ring(0), 0).unwrap());
        let e = ext_zero(&rep, 0, &h).unwrap();
        let f = diag_is_flat(&e.module, &opts).unwrap();
        assert_eq!(f.holds, Some(true));
        assert_eq!(f.global, Some(true));
        let f0 = diag_is_flat(&Arc::new(DiagModule::zero(&rep)), &opts).unwrap();
        assert_eq!(f0.holds, Some(true));
        let rep4 = arrow_rep(4, 2);
        let m = arrow_module(&rep4, 2, 2);
        let f = diag_is_flat(&m, &opts).unwrap();
        assert!(!f.componentwise[0].holds);
        assert!(!f.componentwise_flat);
    }

    #[test]
    fn flatness_verdicts_agree_when_converse_applies() {
        let opts = SearchOptions::default();
        let rep = arrow_rep(6, 2);
        for (k0, k1) in [(6, 2), (2, 2), (3, 1), (6, 1)] {
            let m = arrow_module(&rep, k0, k1);
            let f = diag_is_flat(&m, &opts).unwrap();
            assert!(f.converse_applies);
            assert_eq!(f.agree, Some(true), "{k0},{k1}: {f:?}");
        }
    }

    #[test]
    fn cartesian_modules() {
        let rep = arrow_rep(6, 2);
        let m = arrow_module(&rep, 6, 2);
        assert!(is_cartesian(&m).unwrap().holds);
        let z = scalar_module(&rep, &[6, 1], |_| 1);
        let r = is_cartesian(&z).unwrap();
        assert!(!r.holds);
        let bad = r.arrows.iter().find(|a| !a.iso).unwrap();
        assert_eq!(bad.morphism, "0->1");
        assert_eq!(bad.kernel_order, 2);
        let n = Arc::new(cyclic_module(rep.ring(0), 3).unwrap());
        assert!(
            is_cartesian(&ext_zero(&rep, 0, &n).unwrap().module)
                .unwrap()
                .holds
        );
        // cokernel of a morphism between cartesian modules
        let e = ext_zero(
            &rep,
            0,
            &Arc::new(RMod::representable(rep.ring(0), 0).unwrap()),
        )
        .unwrap();
        for phi in diag_homs(&e.module, &m).unwrap().elements() {
            let (q, _) = diag_cokernel(&phi).unwrap();
            assert!(is_cartesian(&q).unwrap().holds);
            let k = diag_kernel(&phi).unwrap();
            assert!(is_cartesian(&k.module).unwrap().holds);
        }
    }

    #[test]
    fn cartesian_hull_examples() {
        let opts = SearchOptions::default();
        let rep = toy_rep();
        let m = scalar_module(&rep, &[6, 6, 2], |_| 1);
        assert!(m.validate().all_pass());
        assert!(is_cartesian(&m).unwrap().holds);
        let hull = cartesian_hull(&m, 0, 0, &[1], &opts).unwrap();
        assert!(hull.cartesian);
        assert!(hull.pure_parts.iter().all(|p| *p));
        assert!(hull.sub.contains(0, 0, &[1]));
        let h0 = cartesian_hull(&m, 0, 0, &[0], &opts).unwrap();
        assert!(h0.cartesian && h0.sub.cardinality() <= hull.sub.cardinality());
        let small = cartesian_hull(&m, 0, 0, &[3], &opts).unwrap();
        assert!(small.cartesian);
        assert_eq!(small.sub.parts[0].cardinality(), 2);
        let not_flat = arrow_rep(4, 2);
        let m4 = arrow_module(&not_flat, 4, 2);
        assert!(matches!(
            cartesian_hull(&m4, 0, 0, &[1], &opts),
            Err(AlgError::Hypothesis(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn sums_add_cardinalities(a in prop::sample::select(vec![1i64, 2, 3, 6]), b in prop::sample::select(vec![1i64, 2, 3, 6])) {
            let rep = arrow_rep(6, 2);
            let x = arrow_module(&rep, a, crate::abelian::gcd(a, 2));
            let y = arrow_module(&rep, b, crate::abelian::gcd(b, 2));
            let s = diag_sum(&[x.clone(), y.clone()]).unwrap();
            prop_assert!(s.module.validate().all_pass());
            for c in 0..2 {
                prop_assert_eq!(s.module.part(c).cardinality(), x.part(c).cardinality() * y.part(c).cardinality());
            }
        }
    }
}
