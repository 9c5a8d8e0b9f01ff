//! Tensor products of modules and bimodules, flatness and purity tests.
//!
//! A left module over `R` is an [`RMod`] over `R^op`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::abelian::{ab_normal_form, gcd, AbHom, Elem, FinAb, Quotient};
use crate::check::Validation;
use crate::error::{invalid, AlgError, Result};
use crate::module::{
    all_submodules, direct_sum, hom_json, hom_modules, submodule_generated, yoneda_map, HomSet,
    ModHom, RMod, Submodule,
};
use crate::ringoid::{AddFunctor, Ringoid};

/// Cheap structural test that `s` has the shape of `r^op`.
fn opposite_shape(r: &Ringoid, s: &Ringoid) -> bool {
    r.n() == s.n() && (0..r.n()).all(|a| (0..r.n()).all(|b| r.hom(a, b) == s.hom(b, a)))
}

/// `M ⊗_R N` presented as `⊕_a M(a) ⊗ N(a)` modulo the balancing relators.
///
/// Ambient coordinate `(a, i, j)` is the pair of generators `e_i ∈ M(a)`, `e_j ∈ N(a)`.
#[derive(Clone, Debug)]
pub struct TensorValue {
    pub m: Arc<RMod>,
    pub n: Arc<RMod>,
    offsets: Vec<usize>,
    q: Quotient,
    relator_count: usize,
}

pub fn mod_tensor(m: &Arc<RMod>, n: &Arc<RMod>) -> Result<TensorValue> {
    let r = m.base();
    if !opposite_shape(r, n.base()) {
        return Err(AlgError::BaseMismatch(format!(
            "{} is not the opposite of {}",
            n.base().name,
            r.name
        )));
    }
    let k = r.n();
    let mut offsets = Vec::with_capacity(k + 1);
    let mut orders = Vec::new();
    for a in 0..k {
        offsets.push(orders.len());
        for x in m.value(a).factors() {
            for y in n.value(a).factors() {
                orders.push(gcd(*x, *y));
            }
        }
    }
    offsets.push(orders.len());
    let coord = |a: usize, i: usize, j: usize| offsets[a] + i * n.value(a).rank() + j;
    let mut rels = Vec::new();
    for a in 0..k {
        for b in 0..k {
            for g in 0..r.hom(a, b).rank() {
                let ma = m.gen_action(a, b, g);
                let nb = n.gen_action(b, a, g);
                for i in 0..m.value(b).rank() {
                    let x = ma.image_of_gen(i);
                    for j in 0..n.value(a).rank() {
                        let y = nb.image_of_gen(j);
                        let mut rel = vec![0i64; orders.len()];
                        for (p, xp) in x.iter().enumerate() {
                            if *xp != 0 {
                                rel[coord(a, p, j)] += xp;
                            }
                        }
                        for (q, yq) in y.iter().enumerate() {
                            if *yq != 0 {
                                rel[coord(b, i, q)] -= yq;
                            }
                        }
                        if rel.iter().zip(&orders).any(|(v, o)| v.rem_euclid(*o) != 0) {
                            rels.push(rel);
                        }
                    }
                }
            }
        }
    }
    let relator_count = rels.len();
    let q = ab_normal_form(&orders, &rels)?;
    Ok(TensorValue {
        m: m.clone(),
        n: n.clone(),
        offsets,
        q,
        relator_count,
    })
}

impl TensorValue {
    pub fn group(&self) -> &FinAb {
        &self.q.group
    }

    pub fn ambient_orders(&self) -> &[i64] {
        &self.q.ambient
    }

    pub fn relator_count(&self) -> usize {
        self.relator_count
    }

    fn coord(&self, a: usize, i: usize, j: usize) -> usize {
        self.offsets[a] + i * self.n.value(a).rank() + j
    }

    /// The class of `x ⊗ y` for `x ∈ M(a)`, `y ∈ N(a)`.
    pub fn pair(&self, a: usize, x: &[i64], y: &[i64]) -> Elem {
        let mut z = Vec::new();
        for (i, xi) in x.iter().enumerate() {
            if *xi == 0 {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if *yj != 0 {
                    z.push((self.coord(a, i, j), xi * yj));
                }
            }
        }
        self.q.project_sparse(&z)
    }

    /// Writes `z` as `Σ c · (e_i ⊗ e_j)` at objects `a`, as `(a, i, j, c)`.
    pub fn expand(&self, z: &[i64]) -> Vec<(usize, usize, usize, i64)> {
        let lift = self.q.lift(z);
        let mut out = Vec::new();
        for a in 0..self.offsets.len() - 1 {
            let nb = self.n.value(a).rank();
            for (k, c) in lift[self.offsets[a]..self.offsets[a + 1]]
                .iter()
                .enumerate()
            {
                if *c != 0 {
                    out.push((a, k / nb, k % nb, *c));
                }
            }
        }
        out
    }

    /// The homomorphism out of the tensor determined by its values on generator pairs.
    /// Errors if those values are not compatible with the relators.
    pub fn map_pairs(
        &self,
        tgt: &FinAb,
        mut f: impl FnMut(usize, usize, usize) -> Elem,
    ) -> Result<AbHom> {
        let imgs: Vec<Elem> = (0..self.group().rank())
            .map(|g| {
                let mut acc = tgt.zero();
                for (a, i, j, c) in self.expand(&self.group().gen(g)) {
                    tgt.add_assign(&mut acc, &tgt.scale(c, &f(a, i, j)));
                }
                acc
            })
            .collect();
        let h = AbHom::from_images(self.group().clone(), tgt.clone(), &imgs)?;
        for a in 0..self.offsets.len() - 1 {
            for i in 0..self.m.value(a).rank() {
                for j in 0..self.n.value(a).rank() {
                    let lhs =
                        h.apply(&self.pair(a, &self.m.value(a).gen(i), &self.n.value(a).gen(j)));
                    if lhs != f(a, i, j) {
                        return invalid(format!(
                            "assignment on generator pairs is not balanced at object {a}"
                        ));
                    }
                }
            }
        }
        Ok(h)
    }

    /// `φ ⊗ ψ` into `other`.
    pub fn map(&self, other: &TensorValue, phi: &ModHom, psi: &ModHom) -> AbHom {
        let (mv, nv) = (&self.m, &self.n);
        self.map_pairs(other.group(), |a, i, j| {
            other.pair(
                a,
                &phi.apply(a, &mv.value(a).gen(i)),
                &psi.apply(a, &nv.value(a).gen(j)),
            )
        })
        .expect("tensor of module homomorphisms is well defined")
    }
}

pub fn left_representable(r_op: &Arc<Ringoid>, a: usize) -> Result<RMod> {
    RMod::representable(r_op, a)
}

// ---------------------------------------------------------------------------
// Bimodules

/// A module covariant over `left` and contravariant over `right`: values `V(x, y)` for
/// `x` an object of `right`, `y` an object of `left`.
///
/// Kept as right slices `V(−, y)` over `right` and left slices `V(x, −)` over `left^op`.
#[derive(Clone, Debug)]
pub struct Bimodule {
    pub left: Arc<Ringoid>,
    pub left_op: Arc<Ringoid>,
    pub right: Arc<Ringoid>,
    right_slices: Vec<Arc<RMod>>,
    left_slices: Vec<Arc<RMod>>,
}

impl Bimodule {
    /// `ract(x', x, s, y): V(x,y) → V(x',y)` for `s ∈ hom_right(x',x)`;
    /// `lact(y, y', l, x): V(x,y) → V(x,y')` for `l ∈ hom_left(y,y')`.
    pub fn from_fn(
        left: Arc<Ringoid>,
        left_op: Arc<Ringoid>,
        right: Arc<Ringoid>,
        values: &[Vec<FinAb>],
        mut ract: impl FnMut(usize, usize, &Elem, usize) -> Result<AbHom>,
        mut lact: impl FnMut(usize, usize, &Elem, usize) -> Result<AbHom>,
    ) -> Result<Self> {
        if !opposite_shape(&left, &left_op) {
            return invalid("left_op is not the opposite of left");
        }
        let (nx, ny) = (right.n(), left.n());
        if values.len() != nx || values.iter().any(|r| r.len() != ny) {
            return invalid("bimodule values have wrong shape");
        }
        let right_slices = (0..ny)
            .map(|y| {
                let vals = (0..nx).map(|x| values[x][y].clone()).collect();
                RMod::from_fn(right.clone(), vals, |x2, x, s| ract(x2, x, s, y)).map(Arc::new)
            })
            .collect::<Result<Vec<_>>>()?;
        let left_slices = (0..nx)
            .map(|x| {
                let vals = values[x].clone();
                // over left^op, an element of hom_op(y', y) = hom_left(y, y') acts V(x,y) → V(x,y')
                RMod::from_fn(left_op.clone(), vals, |y2, y, l| lact(y, y2, l, x)).map(Arc::new)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Bimodule {
            left,
            left_op,
            right,
            right_slices,
            left_slices,
        })
    }

    pub fn value(&self, x: usize, y: usize) -> &FinAb {
        self.right_slices[y].value(x)
    }

    pub fn right_slice(&self, y: usize) -> &Arc<RMod> {
        &self.right_slices[y]
    }

    pub fn left_slice(&self, x: usize) -> &Arc<RMod> {
        &self.left_slices[x]
    }

    pub fn zero(left: &Arc<Ringoid>, left_op: &Arc<Ringoid>, right: &Arc<Ringoid>) -> Result<Self> {
        let t = FinAb::trivial();
        let vals = vec![vec![t.clone(); left.n()]; right.n()];
        let z = AbHom::zero(&t, &t);
        Bimodule::from_fn(
            left.clone(),
            left_op.clone(),
            right.clone(),
            &vals,
            |_, _, _, _| Ok(z.clone()),
            |_, _, _, _| Ok(z.clone()),
        )
    }

    /// `Hom_S(−, φ(−))` for `φ: R → S`: left over `R`, right over `S`.
    pub fn hom_along(phi: &AddFunctor, src_op: &Arc<Ringoid>) -> Result<Self> {
        let (r, s) = (&phi.src, &phi.tgt);
        let vals: Vec<Vec<FinAb>> = (0..s.n())
            .map(|b| (0..r.n()).map(|a| s.hom(b, phi.obj[a]).clone()).collect())
            .collect();
        Bimodule::from_fn(
            r.clone(),
            src_op.clone(),
            s.clone(),
            &vals,
            |b2, b, sm, a| {
                let pa = phi.obj[a];
                let src = s.hom(b, pa);
                let imgs: Vec<Elem> = src
                    .gens()
                    .iter()
                    .map(|f| s.compose(b2, b, pa, f, sm))
                    .collect();
                AbHom::from_images(src.clone(), s.hom(b2, pa).clone(), &imgs)
            },
            |a, a2, l, b| {
                let (pa, pa2) = (phi.obj[a], phi.obj[a2]);
                let pl = phi.apply(a, a2, l);
                let src = s.hom(b, pa);
                let imgs: Vec<Elem> = src
                    .gens()
                    .iter()
                    .map(|f| s.compose(b, pa, pa2, &pl, f))
                    .collect();
                AbHom::from_images(src.clone(), s.hom(b, pa2).clone(), &imgs)
            },
        )
    }

    /// `Hom_R(−, −)`.
    pub fn hom_bimodule(r: &Arc<Ringoid>, r_op: &Arc<Ringoid>) -> Result<Self> {
        Self::hom_along(&AddFunctor::identity(r), r_op)
    }

    pub fn validate(&self) -> Validation {
        let mut v = Validation::new("bimodule");
        for (y, m) in self.right_slices.iter().enumerate() {
            v.merge(&format!("right slice {y}: "), m.validate());
        }
        for (x, m) in self.left_slices.iter().enumerate() {
            v.merge(&format!("left slice {x}: "), m.validate());
        }
        let (l, r) = (&self.left, &self.right);
        let mut wit = None;
        'c: for x in 0..r.n() {
            for x2 in 0..r.n() {
                for s in 0..r.hom(x2, x).rank() {
                    for y in 0..l.n() {
                        for y2 in 0..l.n() {
                            for t in 0..l.hom(y, y2).rank() {
                                let a = self.left_slices[x2]
                                    .gen_action(y2, y, t)
                                    .compose(self.right_slices[y].gen_action(x2, x, s));
                                let b = self.right_slices[y2]
                                    .gen_action(x2, x, s)
                                    .compose(self.left_slices[x].gen_action(y2, y, t));
                                if a != b {
                                    wit = Some(json!({"right": [x2, x, s], "left": [y, y2, t],
                                        "right_then_left": hom_json(&a), "left_then_right": hom_json(&b)}));
                                    break 'c;
                                }
                            }
                        }
                    }
                }
            }
        }
        v.record("actions-commute", wit);
        v
    }
}

/// `M ⊗_L B` as a right module over `B.right`, with the tensor value at each object.
#[derive(Clone, Debug)]
pub struct TensorExt {
    pub module: Arc<RMod>,
    pub parts: Vec<TensorValue>,
}

pub fn tensor_bimodule(m: &Arc<RMod>, b: &Bimodule) -> Result<TensorExt> {
    if !crate::module::same_base(m.base(), &b.left) {
        return Err(AlgError::BaseMismatch(format!(
            "{} vs {}",
            m.base().name,
            b.left.name
        )));
    }
    let parts = (0..b.right.n())
        .map(|x| mod_tensor(m, b.left_slice(x)))
        .collect::<Result<Vec<_>>>()?;
    let vals: Vec<FinAb> = parts.iter().map(|t| t.group().clone()).collect();
    let module = RMod::from_fn(b.right.clone(), vals, |x2, x, s| {
        let (src, tgt) = (&parts[x], &parts[x2]);
        src.map_pairs(tgt.group(), |y, i, j| {
            let v = b.right_slice(y).action(x2, x, s).image_of_gen(j);
            tgt.pair(y, &m.value(y).gen(i), &v)
        })
    })?;
    Ok(TensorExt {
        module: Arc::new(module),
        parts,
    })
}

/// `B1 ⊗ B2` over the middle ringoid; `B1` is left over `A`, right over `M`; `B2` left over `M`.
pub fn bimod_tensor(b1: &Bimodule, b2: &Bimodule) -> Result<Bimodule> {
    if !crate::module::same_base(&b1.right, &b2.left) {
        return Err(AlgError::BaseMismatch(format!(
            "{} vs {}",
            b1.right.name, b2.left.name
        )));
    }
    let (na, nc) = (b1.left.n(), b2.right.n());
    let mut parts: Vec<Vec<TensorValue>> = Vec::with_capacity(nc);
    for x in 0..nc {
        parts.push(
            (0..na)
                .map(|y| mod_tensor(b1.right_slice(y), b2.left_slice(x)))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let vals: Vec<Vec<FinAb>> = parts
        .iter()
        .map(|r| r.iter().map(|t| t.group().clone()).collect())
        .collect();
    Bimodule::from_fn(
        b1.left.clone(),
        b1.left_op.clone(),
        b2.right.clone(),
        &vals,
        |x2, x, s, y| {
            let (src, tgt) = (&parts[x][y], &parts[x2][y]);
            src.map_pairs(tgt.group(), |z, i, j| {
                let v = b2.right_slice(z).action(x2, x, s).image_of_gen(j);
                tgt.pair(z, &b1.right_slice(y).value(z).gen(i), &v)
            })
        },
        |y, y2, l, x| {
            let (src, tgt) = (&parts[x][y], &parts[x][y2]);
            src.map_pairs(tgt.group(), |z, i, j| {
                // left action of l ∈ hom_A(y,y') on B1(z, −)
                let u = b1.left_slice(z).action(y2, y, l).image_of_gen(i);
                tgt.pair(z, &u, &b2.left_slice(x).value(z).gen(j))
            })
        },
    )
}

/// `H ⊗_S K` as a left module over `H.left`.
pub fn bimodule_tensor_left(h: &Bimodule, k: &Arc<RMod>) -> Result<(Arc<RMod>, Vec<TensorValue>)> {
    let parts = (0..h.left.n())
        .map(|y| mod_tensor(h.right_slice(y), k))
        .collect::<Result<Vec<_>>>()?;
    let vals: Vec<FinAb> = parts.iter().map(|t| t.group().clone()).collect();
    let module = RMod::from_fn(h.left_op.clone(), vals, |y2, y, l| {
        let (src, tgt) = (&parts[y], &parts[y2]);
        src.map_pairs(tgt.group(), |x, i, j| {
            let u = h.left_slice(x).action(y2, y, l).image_of_gen(i);
            tgt.pair(x, &u, &k.value(x).gen(j))
        })
    })?;
    Ok((Arc::new(module), parts))
}

/// The map `(m ⊗ h) ⊗ k ↦ m ⊗ (h ⊗ k)` from `(M ⊗ H) ⊗ K` to `M ⊗ (H ⊗ K)`.
pub fn tensor_associator(m: &Arc<RMod>, h: &Bimodule, k: &Arc<RMod>) -> Result<AbHom> {
    let mh = tensor_bimodule(m, h)?;
    let lhs = mod_tensor(&mh.module, k)?;
    let (hk, hk_parts) = bimodule_tensor_left(h, k)?;
    let rhs = mod_tensor(m, &hk)?;
    lhs.map_pairs(rhs.group(), |x, i, j| {
        let inner = &mh.parts[x];
        let mut acc = rhs.group().zero();
        for (y, p, q, c) in inner.expand(&inner.group().gen(i)) {
            let hkv = hk_parts[y].pair(x, &h.value(x, y).gen(q), &k.value(x).gen(j));
            let t = rhs.pair(y, &m.value(y).gen(p), &hkv);
            rhs.group().add_assign(&mut acc, &rhs.group().scale(c, &t));
        }
        acc
    })
}

// ---------------------------------------------------------------------------
// Linear solving in hom groups

/// A constraint `F(ψ) = rhs` with `F` additive from `Hom(X, Y)` to another hom set.
pub struct HomEquation<'a> {
    pub target: &'a HomSet,
    pub f: Box<dyn Fn(&ModHom) -> ModHom + 'a>,
    pub rhs: ModHom,
}

/// Some `ψ ∈ unknowns` satisfying every equation simultaneously.
pub fn solve_hom_equations(unknowns: &HomSet, eqs: &[HomEquation<'_>]) -> Result<Option<ModHom>> {
    let orders: Vec<i64> = eqs
        .iter()
        .flat_map(|e| e.target.group().factors().iter().copied())
        .collect();
    let sum = FinAb::raw(&orders);
    let concat = |parts: Vec<Elem>| -> Elem { parts.concat() };
    let imgs = (0..unknowns.group().rank())
        .map(|j| {
            let psi = unknowns.to_modhom(&unknowns.group().gen(j));
            let parts = eqs
                .iter()
                .map(|e| {
                    e.target.from_modhom(&(e.f)(&psi)).ok_or_else(|| {
                        AlgError::Invalid("equation map leaves its target hom set".into())
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(concat(parts))
        })
        .collect::<Result<Vec<_>>>()?;
    let lin = AbHom::from_images(unknowns.group().clone(), sum, &imgs)?;
    let rhs = eqs
        .iter()
        .map(|e| {
            e.target
                .from_modhom(&e.rhs)
                .ok_or_else(|| AlgError::Invalid("right side is not natural".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(lin.solve(&concat(rhs)).map(|z| unknowns.to_modhom(&z)))
}

/// A section `s` with `p ∘ s = id`.
pub fn section(p: &ModHom) -> Result<Option<ModHom>> {
    let hs = hom_modules(&p.tgt, &p.src)?;
    let end = hom_modules(&p.tgt, &p.tgt)?;
    let eq = HomEquation {
        target: &end,
        f: Box::new(|s| p.compose(s)),
        rhs: ModHom::identity(&p.tgt),
    };
    // bound first: the equation borrows `end`, which a tail temporary would outlive
    #[allow(clippy::let_and_return)]
    let out = solve_hom_equations(&hs, &[eq]);
    out
}

/// A retraction `r` with `r ∘ i = id`.
pub fn retraction(i: &ModHom) -> Result<Option<ModHom>> {
    let hs = hom_modules(&i.tgt, &i.src)?;
    let end = hom_modules(&i.src, &i.src)?;
    let eq = HomEquation {
        target: &end,
        f: Box::new(|r| r.compose(i)),
        rhs: ModHom::identity(&i.src),
    };
    // bound first: the equation borrows `end`, which a tail temporary would outlive
    #[allow(clippy::let_and_return)]
    let out = solve_hom_equations(&hs, &[eq]);
    out
}

/// Free cover `⊕ H_{a_i} → M` on a generating set.
#[derive(Clone, Debug)]
pub struct Cover {
    pub free: Arc<RMod>,
    pub epi: ModHom,
    pub generators: Vec<(usize, Elem)>,
}

pub fn free_cover(m: &Arc<RMod>) -> Result<Cover> {
    let generators = m.generating_set()?;
    let r = m.base();
    if generators.is_empty() {
        let z = Arc::new(RMod::zero(r));
        return Ok(Cover {
            epi: ModHom::zero(&z, m),
            free: z,
            generators,
        });
    }
    let reps = generators
        .iter()
        .map(|(a, _)| RMod::representable(r, *a).map(Arc::new))
        .collect::<Result<Vec<_>>>()?;
    let sum = direct_sum(&reps)?;
    let mut epi = ModHom::zero(&sum.module, m);
    for (k, (a, x)) in generators.iter().enumerate() {
        epi = epi.add(&yoneda_map(&reps[k], m, *a, x)?.compose(&sum.proj[k]));
    }
    Ok(Cover {
        free: sum.module,
        epi,
        generators,
    })
}

// ---------------------------------------------------------------------------
// Flatness

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlatMethod {
    Exactness,
    Fiber,
    SummandOracle,
    All,
}

impl std::str::FromStr for FlatMethod {
    type Err = AlgError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exactness" => Ok(FlatMethod::Exactness),
            "fiber" => Ok(FlatMethod::Fiber),
            "summand" | "summand-oracle" => Ok(FlatMethod::SummandOracle),
            "all" => Ok(FlatMethod::All),
            _ => invalid(format!("unknown method {s}")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Largest number of submodules or test objects any single search may visit.
    pub budget: usize,
    pub seed: u64,
    pub random_monos: usize,
    /// Generator bound for the purity test family.
    pub generators: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: 4096,
            seed: 0,
            random_monos: 8,
            generators: 2,
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct MethodOutcome {
    pub method: String,
    /// `None` when the method was skipped.
    pub verdict: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence: Option<Value>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Verdict {
    pub holds: bool,
    pub agree: bool,
    pub outcomes: Vec<MethodOutcome>,
}

impl Verdict {
    pub fn from_outcomes(outcomes: Vec<MethodOutcome>) -> Result<Self> {
        let decided: Vec<bool> = outcomes.iter().filter_map(|o| o.verdict).collect();
        let Some(first) = decided.first().copied() else {
            return Err(AlgError::Budget(
                "every method exceeded the search budget".into(),
            ));
        };
        Ok(Verdict {
            holds: first,
            agree: decided.iter().all(|v| *v == first),
            outcomes,
        })
    }

    pub fn outcome(&self, method: &str) -> Option<&MethodOutcome> {
        self.outcomes.iter().find(|o| o.method == method)
    }
}

fn skipped(method: &str, e: AlgError) -> Result<MethodOutcome> {
    match e {
        AlgError::Budget(_) | AlgError::OrderLimit { .. } => Ok(MethodOutcome {
            method: method.into(),
            verdict: None,
            note: Some(e.to_string()),
            evidence: None,
        }),
        other => Err(other),
    }
}

/// Flatness by a split free cover: a finite flat module is projective.
pub fn flat_by_summand(m: &Arc<RMod>) -> Result<MethodOutcome> {
    let c = free_cover(m)?;
    let s = section(&c.epi)?;
    let evidence = Some(json!({
        "cover_objects": c.generators.iter().map(|(a, _)| m.base().objects()[*a].clone()).collect::<Vec<_>>(),
        "section": s.as_ref().map(|s| s.to_json()),
    }));
    Ok(MethodOutcome {
        method: "summand-oracle".into(),
        verdict: Some(s.is_some()),
        note: None,
        evidence,
    })
}

/// Fiber test over sums of representables: every arrow into `M` that kills some map
/// must be equalized by a map into the generator object `(G, g)`.
pub fn flat_by_fiber(m: &Arc<RMod>, opts: &SearchOptions) -> Result<MethodOutcome> {
    let r = m.base().clone();
    let c = free_cover(m)?;
    let (g_obj, g) = (c.free.clone(), c.epi.clone());
    // condition (1): every rank-one object maps to (G, g)
    let mut cond1 = None;
    'c1: for a in 0..r.n() {
        let s = g.comp(a).solver();
        for x in m.value(a).elements() {
            if s.solve(&x).is_none() {
                cond1 = Some(json!({"object": r.objects()[a], "element": x}));
                break 'c1;
            }
        }
    }
    if let Some(w) = cond1 {
        return Ok(MethodOutcome {
            method: "fiber".into(),
            verdict: Some(false),
            note: Some("no common upper bound".into()),
            evidence: Some(w),
        });
    }
    // condition (2) at (A', f'): ψ: A' → G with g ψ = f' and ψ killing ker f'
    let test = |a_obj: &Arc<RMod>, f: &ModHom| -> Result<bool> {
        let ker = f.kernel()?;
        let unknown = hom_modules(a_obj, &g_obj)?;
        let to_m = hom_modules(a_obj, m)?;
        let from_ker = hom_modules(&ker.module, &g_obj)?;
        let eqs = [
            HomEquation {
                target: &to_m,
                f: Box::new(|psi| g.compose(psi)),
                rhs: f.clone(),
            },
            HomEquation {
                target: &from_ker,
                f: Box::new(|psi| psi.compose(&ker.incl)),
                rhs: ModHom::zero(&ker.module, &g_obj),
            },
        ];
        Ok(solve_hom_equations(&unknown, &eqs)?.is_some())
    };
    if !test(&g_obj, &g)? {
        return Ok(MethodOutcome {
            method: "fiber".into(),
            verdict: Some(false),
            note: Some("parallel arrows into the generator object are not equalized".into()),
            evidence: Some(
                json!({"object": "generator", "kernel_cardinality": g.kernel()?.cardinality()}),
            ),
        });
    }
    let mut note = None;
    if m.cardinality() as usize <= opts.budget {
        for a in 0..r.n() {
            let h = Arc::new(RMod::representable(&r, a)?);
            for x in m.value(a).elements() {
                let f = yoneda_map(&h, m, a, &x)?;
                if !test(&h, &f)? {
                    return Ok(MethodOutcome {
                        method: "fiber".into(),
                        verdict: Some(false),
                        note: Some("parallel arrows are not equalized".into()),
                        evidence: Some(json!({"object": r.objects()[a], "element": x})),
                    });
                }
            }
        }
    } else {
        note = Some("rank-one objects skipped: module exceeds budget".into());
    }
    Ok(MethodOutcome {
        method: "fiber".into(),
        verdict: Some(true),
        note,
        evidence: None,
    })
}

/// Whether `M ⊗ J → M ⊗ L` is injective for the inclusion `J ↪ L` of left modules.
fn tensor_keeps_mono(m: &Arc<RMod>, incl: &ModHom) -> Result<bool> {
    let s = mod_tensor(m, &incl.src)?;
    let t = mod_tensor(m, &incl.tgt)?;
    Ok(s.map(&t, &ModHom::identity(m), incl).is_injective())
}

/// Exactness of `M ⊗ −` on inclusions into left representables and on seeded random monos.
pub fn flat_by_exactness(
    m: &Arc<RMod>,
    r_op: &Arc<Ringoid>,
    opts: &SearchOptions,
) -> Result<MethodOutcome> {
    let r = m.base();
    let mut checked = 0usize;
    for a in 0..r.n() {
        let h = Arc::new(left_representable(r_op, a)?);
        for j in all_submodules(&h, opts.budget)? {
            checked += 1;
            if !tensor_keeps_mono(m, &j.incl)? {
                return Ok(MethodOutcome {
                    method: "exactness".into(),
                    verdict: Some(false),
                    note: Some("tensoring kills part of a subobject of a representable".into()),
                    evidence: Some(json!({"representable": r.objects()[a],
                        "subobject_values": j.module.values().iter().map(|v| v.to_string()).collect::<Vec<_>>()})),
                });
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.random_monos {
        let (a1, a2) = (rng.gen_range(0..r.n()), rng.gen_range(0..r.n()));
        let l = direct_sum(&[
            Arc::new(left_representable(r_op, a1)?),
            Arc::new(left_representable(r_op, a2)?),
        ])?;
        let pick = |rng: &mut ChaCha8Rng| {
            let b = rng.gen_range(0..r.n());
            let v = l.module.value(b);
            let idx = rng.gen_range(0..v.order() as usize);
            (b, v.element_at(idx))
        };
        let k0 = submodule_generated(&l.module, &[pick(&mut rng)])?;
        let j = k0.join(&submodule_generated(
            &l.module,
            &[pick(&mut rng), pick(&mut rng)],
        )?)?;
        let (lq, p) = k0.quotient()?;
        let jq = crate::module::ModHom::new(j.module.clone(), lq.clone(), {
            (0..r.n())
                .map(|b| p.comp(b).compose(j.incl.comp(b)))
                .collect()
        })?;
        let img = jq.image()?;
        checked += 1;
        if !tensor_keeps_mono(m, &img.incl)? {
            return Ok(MethodOutcome {
                method: "exactness".into(),
                verdict: Some(false),
                note: Some("tensoring kills part of a random subobject".into()),
                evidence: Some(json!({"objects": [r.objects()[a1], r.objects()[a2]]})),
            });
        }
    }
    Ok(MethodOutcome {
        method: "exactness".into(),
        verdict: Some(true),
        note: Some(format!("{checked} monomorphisms preserved")),
        evidence: None,
    })
}

pub fn is_flat(m: &Arc<RMod>, method: FlatMethod, opts: &SearchOptions) -> Result<Verdict> {
    let r_op = Arc::new(m.base().opposite());
    let mut out = Vec::new();
    if matches!(method, FlatMethod::SummandOracle | FlatMethod::All) {
        out.push(flat_by_summand(m).or_else(|e| skipped("summand-oracle", e))?);
    }
    if matches!(method, FlatMethod::Fiber | FlatMethod::All) {
        out.push(flat_by_fiber(m, opts).or_else(|e| skipped("fiber", e))?);
    }
    if matches!(method, FlatMethod::Exactness | FlatMethod::All) {
        out.push(flat_by_exactness(m, &r_op, opts).or_else(|e| skipped("exactness", e))?);
    }
    Verdict::from_outcomes(out)
}

// ---------------------------------------------------------------------------
// Purity

/// Left modules with at most `g` generators, as quotients of sums of left representables.
pub fn bounded_left_modules(
    r_op: &Arc<Ringoid>,
    g: usize,
    budget: usize,
) -> Result<Vec<Arc<RMod>>> {
    let n = r_op.n();
    let mut out = Vec::new();
    let mut combos: Vec<Vec<usize>> = vec![vec![]];
    for size in 1..=g {
        let mut next = Vec::new();
        for c in combos.iter().filter(|c| c.len() == size - 1) {
            let start = c.last().copied().unwrap_or(0);
            for a in start..n {
                let mut d = c.clone();
                d.push(a);
                next.push(d);
            }
        }
        combos.extend(next);
    }
    for c in combos.into_iter().filter(|c| !c.is_empty()) {
        let reps = c
            .iter()
            .map(|a| left_representable(r_op, *a).map(Arc::new))
            .collect::<Result<Vec<_>>>()?;
        let l = direct_sum(&reps)?;
        for k in all_submodules(&l.module, budget)? {
            out.push(k.quotient()?.0);
            if out.len() > budget {
                return Err(AlgError::Budget(format!("more than {budget} test modules")));
            }
        }
    }
    Ok(out)
}

/// Purity of a monomorphism, by tensoring with a bounded family and by looking for a retraction.
pub fn is_pure(incl: &ModHom, opts: &SearchOptions) -> Result<Verdict> {
    if !incl.is_mono() {
        return invalid("purity needs a monomorphism");
    }
    let r_op = Arc::new(incl.src.base().opposite());
    let ret = retraction(incl)?;
    let split = MethodOutcome {
        method: "split".into(),
        verdict: Some(ret.is_some()),
        note: None,
        evidence: ret.map(|r| json!({"retraction": r.to_json()})),
    };
    let tensor = (|| -> Result<MethodOutcome> {
        let family = bounded_left_modules(&r_op, opts.generators, opts.budget)?;
        let count = family.len();
        for k in family {
            let s = mod_tensor(&incl.src, &k)?;
            let t = mod_tensor(&incl.tgt, &k)?;
            if !s.map(&t, incl, &ModHom::identity(&k)).is_injective() {
                return Ok(MethodOutcome {
                    method: "tensor-family".into(),
                    verdict: Some(false),
                    note: None,
                    evidence: Some(json!({"test_module_values": k.values().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                        "kernel_order": s.map(&t, incl, &ModHom::identity(&k)).kernel()?.group.order()})),
                });
            }
        }
        Ok(MethodOutcome {
            method: "tensor-family".into(),
            verdict: Some(true),
            note: Some(format!("{count} test modules with at most {} generators", opts.generators)),
            evidence: None,
        })
    })()
    .or_else(|e| skipped("tensor-family", e))?;
    Verdict::from_outcomes(vec![split, tensor])
}

/// A pure submodule containing `n` of least cardinality.
pub fn pure_closure(n: &Submodule, opts: &SearchOptions) -> Result<Submodule> {
    for s in all_submodules(n.ambient(), opts.budget)? {
        if n.is_contained_in(&s) && retraction(&s.incl)?.is_some() {
            return Ok(s);
        }
    }
    unreachable!("the whole module is pure in itself")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::DirectSum;
    use crate::diagram::SmallCat;
    use crate::ringoid::{linearize, ringoid_of_ring, RingSpec};

    fn ring(spec: RingSpec) -> (Arc<Ringoid>, Arc<Ringoid>) {
        let r = Arc::new(ringoid_of_ring(&spec).unwrap());
        let op = Arc::new(r.opposite());
        (r, op)
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

    /// `M ⊗ N` by brute force: the free abelian group on pairs of elements modulo
    /// biadditivity and balancing, counted by coset enumeration.
    fn brute_tensor_order(m: &RMod, n: &RMod) -> u64 {
        let r = m.base();
        let mut orders = Vec::new();
        let mut index = std::collections::HashMap::new();
        for a in 0..r.n() {
            for x in m.value(a).elements() {
                for y in n.value(a).elements() {
                    index.insert((a, x.clone(), y.clone()), orders.len());
                    orders.push(m.value(a).exponent().max(n.value(a).exponent()).max(1));
                }
            }
        }
        let k = orders.len();
        let mut rels: Vec<Elem> = Vec::new();
        let unit = |i: usize, c: i64| {
            let mut v = vec![0i64; k];
            v[i] += c;
            v
        };
        let add = |mut u: Elem, v: Elem| {
            for (a, b) in u.iter_mut().zip(v) {
                *a += b;
            }
            u
        };
        for a in 0..r.n() {
            let (ma, na) = (m.value(a), n.value(a));
            for x in ma.elements() {
                for x2 in ma.elements() {
                    for y in na.elements() {
                        let s = ma.add(&x, &x2);
                        rels.push(add(
                            add(
                                unit(index[&(a, s, y.clone())], 1),
                                unit(index[&(a, x.clone(), y.clone())], -1),
                            ),
                            unit(index[&(a, x2.clone(), y.clone())], -1),
                        ));
                    }
                }
                for y in na.elements() {
                    for y2 in na.elements() {
                        let s = na.add(&y, &y2);
                        rels.push(add(
                            add(
                                unit(index[&(a, x.clone(), s)], 1),
                                unit(index[&(a, x.clone(), y.clone())], -1),
                            ),
                            unit(index[&(a, x.clone(), y2.clone())], -1),
                        ));
                    }
                }
            }
            for b in 0..r.n() {
                for rr in r.hom(a, b).elements() {
                    for x in m.value(b).elements() {
                        for y in na.elements() {
                            let l = index[&(a, m.act(a, b, &rr, &x), y.clone())];
                            let rgt = index[&(b, x.clone(), n.act(b, a, &rr, &y))];
                            rels.push(add(unit(l, 1), unit(rgt, -1)));
                        }
                    }
                }
            }
        }
        ab_normal_form(&orders, &rels).unwrap().group.order()
    }

    #[test]
    fn tensor_with_representables() {
        for spec in [
            RingSpec::Zn(4),
            RingSpec::Zn(6),
            RingSpec::Triangular { field: 2, size: 2 },
        ] {
            let (r, op) = ring(spec);
            let hl = Arc::new(left_representable(&op, 0).unwrap());
            let hr = Arc::new(RMod::representable(&r, 0).unwrap());
            let t = mod_tensor(&hr, &hl).unwrap();
            assert_eq!(t.group(), hl.value(0));
            assert_eq!(t.group().order(), brute_tensor_order(&hr, &hl));
        }
        let r = Arc::new(linearize(&SmallCat::toy_p1(), 2).unwrap());
        let op = Arc::new(r.opposite());
        for a in 0..3 {
            for b in 0..3 {
                let m = Arc::new(RMod::representable(&r, a).unwrap());
                let n = Arc::new(left_representable(&op, b).unwrap());
                assert_eq!(mod_tensor(&m, &n).unwrap().group(), n.value(a));
                assert_eq!(mod_tensor(&m, &n).unwrap().group(), m.value(b));
            }
        }
    }

    #[test]
    fn z2_tensor_z2_over_z4() {
        let (r, op) = ring(RingSpec::Zn(4));
        let t = mod_tensor(&cyclic(&r, 2), &cyclic(&op, 2)).unwrap();
        assert_eq!(t.group().factors(), &[2]);
        assert!(mod_tensor(&cyclic(&r, 2), &cyclic(&r, 2)).is_ok());
        let (r6, _) = ring(RingSpec::Zn(6));
        assert!(matches!(
            mod_tensor(&cyclic(&r, 2), &cyclic(&r6, 2)),
            Err(AlgError::BaseMismatch(_))
        ));
    }

    #[test]
    fn tensor_matches_brute_force_on_small_modules() {
        let (r, op) = ring(RingSpec::Zn(6));
        for (k1, k2) in [(2, 3), (6, 2), (3, 3), (6, 6)] {
            let (m, n) = (cyclic(&r, k1), cyclic(&op, k2));
            assert_eq!(
                mod_tensor(&m, &n).unwrap().group().order(),
                brute_tensor_order(&m, &n)
            );
        }
        let (t, top) = ring(RingSpec::Triangular { field: 2, size: 2 });
        let m = Arc::new(RMod::representable(&t, 0).unwrap());
        let c = free_cover(&m).unwrap();
        let (q, _) = c.epi.kernel().unwrap().quotient().unwrap();
        let n = Arc::new(left_representable(&top, 0).unwrap());
        assert_eq!(
            mod_tensor(&q, &n).unwrap().group().order(),
            brute_tensor_order(&q, &n)
        );
    }

    #[test]
    fn tensor_commutes_with_sums() {
        let (r, op) = ring(RingSpec::Zn(4));
        let (a, b, n) = (cyclic(&r, 2), cyclic(&r, 4), cyclic(&op, 2));
        let s = direct_sum(&[a.clone(), b.clone()]).unwrap();
        let lhs = mod_tensor(&s.module, &n).unwrap();
        let p = DirectSum::new(&[
            mod_tensor(&a, &n).unwrap().group().clone(),
            mod_tensor(&b, &n).unwrap().group().clone(),
        ])
        .unwrap();
        assert_eq!(lhs.group(), &p.group);
    }

    #[test]
    fn balanced_witness() {
        let (r, op) = ring(RingSpec::Triangular { field: 2, size: 2 });
        let m = Arc::new(RMod::representable(&r, 0).unwrap());
        let n = Arc::new(left_representable(&op, 0).unwrap());
        let t = mod_tensor(&m, &n).unwrap();
        for rr in r.hom(0, 0).elements() {
            for x in m.value(0).elements() {
                for y in n.value(0).elements() {
                    assert_eq!(
                        t.pair(0, &m.act(0, 0, &rr, &x), &y),
                        t.pair(0, &x, &n.act(0, 0, &rr, &y))
                    );
                }
            }
        }
    }

    #[test]
    fn hom_bimodule_tensor_collapses() {
        for spec in [RingSpec::Zn(4), RingSpec::Triangular { field: 2, size: 2 }] {
            let (r, op) = ring(spec);
            let h = Bimodule::hom_bimodule(&r, &op).unwrap();
            assert!(h.validate().all_pass());
            let hh = bimod_tensor(&h, &h).unwrap();
            assert!(hh.validate().all_pass());
            assert_eq!(hh.value(0, 0), h.value(0, 0));
            let z = Bimodule::zero(&r, &op, &r).unwrap();
            assert!(bimod_tensor(&h, &z).unwrap().value(0, 0).is_trivial());
        }
        let r = Arc::new(linearize(&SmallCat::arrow(), 2).unwrap());
        let op = Arc::new(r.opposite());
        let h = Bimodule::hom_bimodule(&r, &op).unwrap();
        let hh = bimod_tensor(&h, &h).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(hh.value(x, y), h.value(x, y));
            }
        }
    }

    #[test]
    fn associator_is_iso() {
        let (r, op) = ring(RingSpec::Zn(2));
        let h = Bimodule::hom_bimodule(&r, &op).unwrap();
        let m = Arc::new(RMod::representable(&r, 0).unwrap());
        let k = Arc::new(left_representable(&op, 0).unwrap());
        assert!(tensor_associator(&m, &h, &k).unwrap().is_iso());
        let r = Arc::new(linearize(&SmallCat::toy_p1(), 2).unwrap());
        let op = Arc::new(r.opposite());
        let h = Bimodule::hom_bimodule(&r, &op).unwrap();
        for a in 0..3 {
            let m = Arc::new(RMod::representable(&r, a).unwrap());
            let k = Arc::new(left_representable(&op, 2).unwrap());
            assert!(tensor_associator(&m, &h, &k).unwrap().is_iso());
        }
    }

    #[test]
    fn flatness_examples() {
        let opts = SearchOptions::default();
        let (r4, _) = ring(RingSpec::Zn(4));
        let v = is_flat(&cyclic(&r4, 2), FlatMethod::All, &opts).unwrap();
        assert!(!v.holds && v.agree, "{v:?}");
        let v = is_flat(&cyclic(&r4, 4), FlatMethod::All, &opts).unwrap();
        assert!(v.holds && v.agree, "{v:?}");
        let (r6, _) = ring(RingSpec::Zn(6));
        for k in [2, 3, 6] {
            let v = is_flat(&cyclic(&r6, k), FlatMethod::All, &opts).unwrap();
            assert!(v.holds && v.agree, "{v:?}");
        }
        let (t, _) = ring(RingSpec::Triangular { field: 2, size: 2 });
        let h = Arc::new(RMod::representable(&t, 0).unwrap());
        for s in all_submodules(&h, 100).unwrap() {
            let v = is_flat(&s.module, FlatMethod::All, &opts).unwrap();
            assert!(v.agree, "{v:?}");
            let (q, _) = s.quotient().unwrap();
            let v = is_flat(&q, FlatMethod::All, &opts).unwrap();
            assert!(v.agree, "{v:?}");
        }
    }

    #[test]
    fn purity_examples() {
        let opts = SearchOptions::default();
        let (r4, _) = ring(RingSpec::Zn(4));
        let m = cyclic(&r4, 4);
        let n = submodule_generated(&m, &[(0, vec![2])]).unwrap();
        let v = is_pure(&n.incl, &opts).unwrap();
        assert!(!v.holds && v.agree);
        assert_eq!(pure_closure(&n, &opts).unwrap().cardinality(), 4);
        let z = Submodule::zero(&m);
        assert_eq!(pure_closure(&z, &opts).unwrap().cardinality(), 1);
        let (r6, _) = ring(RingSpec::Zn(6));
        let m = cyclic(&r6, 6);
        let n = submodule_generated(&m, &[(0, vec![2])]).unwrap();
        let v = is_pure(&n.incl, &opts).unwrap();
        assert!(v.holds && v.agree);
        assert_eq!(pure_closure(&n, &opts).unwrap().key(), n.key());
    }

    #[test]
    fn purity_agrees_on_small_lattices() {
        let opts = SearchOptions::default();
        for spec in [RingSpec::Zn(4), RingSpec::Triangular { field: 2, size: 2 }] {
            let (r, _) = ring(spec);
            let h = Arc::new(RMod::representable(&r, 0).unwrap());
            let s = direct_sum(&[h.clone(), cyclic_or_rep(&r)]).unwrap();
            for sub in all_submodules(&s.module, 200).unwrap() {
                let v = is_pure(&sub.incl, &opts).unwrap();
                assert!(v.agree, "{v:?}");
            }
        }
    }

    fn cyclic_or_rep(r: &Arc<Ringoid>) -> Arc<RMod> {
        if r.hom(0, 0).rank() == 1 {
            cyclic(r, 2)
        } else {
            Arc::new(RMod::representable(r, 0).unwrap())
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]

        // Z/a ⊗ Z/b over Z/n is Z/gcd(a, b)
        #[test]
        fn cyclic_tensor_matches_gcd(n in 2i64..13, i in 0usize..6, j in 0usize..6) {
            let divs: Vec<i64> = (1..=n).filter(|d| n % d == 0).collect();
            let (a, b) = (divs[i % divs.len()], divs[j % divs.len()]);
            let (r, r_op) = ring(RingSpec::Zn(n));
            let m = Arc::new(crate::module::cyclic_module(&r, a).unwrap());
            let k = Arc::new(crate::module::cyclic_module(&r_op, b).unwrap());
            let t = mod_tensor(&m, &k).unwrap();
            proptest::prop_assert_eq!(t.group().order() as i64, crate::abelian::gcd(a, b));
        }

        // Z/d is flat over Z/n exactly when it is a ring direct factor: gcd(d, n/d) = 1
        #[test]
        fn cyclic_flatness_matches_coprime_split(n in 2i64..13, i in 0usize..6) {
            let divs: Vec<i64> = (1..=n).filter(|d| n % d == 0).collect();
            let d = divs[i % divs.len()];
            let (r, _) = ring(RingSpec::Zn(n));
            let m = Arc::new(crate::module::cyclic_module(&r, d).unwrap());
            let v = is_flat(&m, FlatMethod::All, &SearchOptions::default()).unwrap();
            proptest::prop_assert!(v.agree);
            proptest::prop_assert_eq!(v.holds, crate::abelian::gcd(d, n / d) == 1);
        }
    }
}
