//! Matrix rings with enough idempotents, their unitalization, and the equivalences
//! `S`, `T`, `U` between module categories, with the comparison maps on tensors.
//!
//! For a finite ringoid `C`, `R_C` holds `|ObC| × |ObC|` matrices with entry `(j,i)` in
//! `hom(i,j)`. It is represented as a one-object [`Ringoid`] whose product `r · s` is the
//! matrix product `(rs)_{ki} = Σ_j r_{kj} ∘ s_{ji}`.

use std::sync::Arc;

use serde::Serialize;
use serde_json::json;

use crate::abelian::{md, AbHom, DirectSum, Elem, FinAb, SubGroup};
use crate::check::Validation;
use crate::error::{invalid, AlgError, Result};
use crate::module::{all_submodules, ModHom, RMod};
use crate::ringoid::Ringoid;
use crate::tensor::{is_pure, mod_tensor, SearchOptions, TensorValue};

#[derive(Clone, Debug)]
pub struct IdemRing {
    pub base: Arc<Ringoid>,
    pub ring: Arc<Ringoid>,
    pub op: Arc<Ringoid>,
    sum: DirectSum,
}

/// `R_C` for a finite ringoid `C`.
pub fn matrix_ring(c: &Arc<Ringoid>) -> Result<IdemRing> {
    let n = c.n();
    if n == 0 {
        return invalid("matrix ring of an empty ringoid");
    }
    let parts: Vec<FinAb> = (0..n * n).map(|k| c.hom(k % n, k / n).clone()).collect();
    let sum = DirectSum::new(&parts)?;
    let product = |r: &[i64], s: &[i64]| -> Elem {
        let mut out = Vec::with_capacity(n * n);
        for k in 0..n {
            for i in 0..n {
                let h = c.hom(i, k);
                let mut acc = h.zero();
                for j in 0..n {
                    let rk = sum.component(k * n + j, r);
                    let sj = sum.component(j * n + i, s);
                    h.add_assign(&mut acc, &c.compose(i, j, k, &rk, &sj));
                }
                out.push(acc);
            }
        }
        sum.combine(&out)
    };
    let gens = sum.group.gens();
    let gen_mul: Vec<Vec<Elem>> = gens
        .iter()
        .map(|x| gens.iter().map(|y| product(x, y)).collect())
        .collect();
    let one = sum.combine(
        &(0..n * n)
            .map(|k| {
                if k / n == k % n {
                    c.id(k % n).clone()
                } else {
                    parts[k].zero()
                }
            })
            .collect::<Vec<_>>(),
    );
    let ring = Arc::new(Ringoid::ring(
        format!("R[{}]", c.name),
        sum.group.clone(),
        gen_mul,
        one,
    )?);
    let op = Arc::new(ring.opposite());
    Ok(IdemRing {
        base: c.clone(),
        ring,
        op,
        sum,
    })
}

impl IdemRing {
    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn group(&self) -> &FinAb {
        &self.sum.group
    }

    pub fn order(&self) -> u64 {
        self.sum.group.order()
    }

    /// Entry `(j,i) ∈ hom(i,j)` of `r`.
    pub fn entry(&self, r: &[i64], j: usize, i: usize) -> Elem {
        self.sum.component(j * self.n() + i, r)
    }

    /// The matrix with `x ∈ hom(i,j)` at `(j,i)` and zeros elsewhere.
    pub fn corner(&self, j: usize, i: usize, x: &[i64]) -> Elem {
        self.sum.embed(j * self.n() + i, x)
    }

    pub fn idempotent(&self, c: usize) -> Elem {
        self.corner(c, c, self.base.id(c))
    }

    pub fn mul(&self, r: &[i64], s: &[i64]) -> Elem {
        self.ring.mul(r, s)
    }

    /// Ring axioms plus the orthogonal idempotent family `{e_c}`.
    pub fn validate(&self) -> Validation {
        let mut v = self.ring.validate();
        let n = self.n();
        let g = self.group();
        let mut wit = None;
        'orth: for c in 0..n {
            for d in 0..n {
                let p = self.mul(&self.idempotent(c), &self.idempotent(d));
                let want = if c == d { self.idempotent(c) } else { g.zero() };
                if p != want {
                    wit = Some(
                        json!({"objects": [&self.base.objects()[c], &self.base.objects()[d]], "product": p}),
                    );
                    break 'orth;
                }
            }
        }
        v.record("orthogonal-idempotents", wit);
        let mut wit = None;
        for r in g.elements() {
            let mut acc = g.zero();
            for c in 0..n {
                for d in 0..n {
                    let piece = self.mul(&self.mul(&self.idempotent(c), &r), &self.idempotent(d));
                    if piece != self.corner(c, d, &self.entry(&r, c, d)) {
                        wit = Some(json!({"element": r, "corner": [c, d]}));
                    }
                    g.add_assign(&mut acc, &piece);
                }
            }
            if acc != r {
                wit = Some(json!({"element": r, "corner_sum": acc}));
            }
            if wit.is_some() {
                break;
            }
        }
        v.record("corner-decomposition", wit);
        v
    }
}

fn require_base(m: &RMod, r: &Arc<Ringoid>, what: &str) -> Result<()> {
    if crate::module::same_base(m.base(), r) {
        Ok(())
    } else {
        Err(AlgError::BaseMismatch(format!(
            "{what}: module over {} where {} was expected",
            m.base().name,
            r.name
        )))
    }
}

/// `S(F) = ⊕_c F(c)` together with its decomposition.
#[derive(Clone, Debug)]
pub struct SImage {
    pub module: Arc<RMod>,
    pub sum: DirectSum,
}

/// `S(F)` for a right `C`-module: `r` acts by `(m·r)_c = Σ_d F(r_{dc})(m_d)`.
pub fn equiv_s(f: &Arc<RMod>, rc: &IdemRing) -> Result<SImage> {
    require_base(f, &rc.base, "S")?;
    build_s(f, rc, rc.ring.clone(), |d, c, x| (d, c, f.action(c, d, x)))
}

/// `S(N)` for a left `C`-module, a right module over `R_C^op`: `(r·n)_d = Σ_c N(r_{dc})(n_c)`.
pub fn equiv_s_left(n: &Arc<RMod>, rc: &IdemRing) -> Result<SImage> {
    let nb = n.base();
    if nb.n() != rc.n()
        || (0..rc.n()).any(|a| (0..rc.n()).any(|b| nb.hom(a, b) != rc.base.hom(b, a)))
    {
        return Err(AlgError::BaseMismatch(format!(
            "{} is not the opposite of {}",
            nb.name, rc.base.name
        )));
    }
    build_s(n, rc, rc.op.clone(), |d, c, x| (c, d, n.action(d, c, x)))
}

/// `entry_action(d, c, x)` gives `(from, to, map)` for the entry `x` at `(d,c)`.
fn build_s(
    f: &Arc<RMod>,
    rc: &IdemRing,
    ring: Arc<Ringoid>,
    entry_action: impl Fn(usize, usize, &[i64]) -> (usize, usize, AbHom),
) -> Result<SImage> {
    let n = rc.n();
    let sum = DirectSum::new(f.values())?;
    let g = sum.group.clone();
    let module = RMod::from_fn(ring, vec![g.clone()], |_, _, r| {
        let mut acc = AbHom::zero(&g, &g);
        for d in 0..n {
            for c in 0..n {
                let x = rc.entry(r, d, c);
                if FinAb::is_zero(&x) {
                    continue;
                }
                let (from, to, h) = entry_action(d, c, &x);
                acc = acc.add(&sum.inj[to].compose(&h).compose(&sum.proj[from]));
            }
        }
        Ok(acc)
    })?;
    Ok(SImage {
        module: Arc::new(module),
        sum,
    })
}

/// `S(φ)`: the diagonal map `⊕_c φ_c`.
pub fn equiv_s_hom(phi: &ModHom, src: &SImage, tgt: &SImage) -> Result<ModHom> {
    let g = &src.sum.group;
    let mut acc = AbHom::zero(g, &tgt.sum.group);
    for (c, h) in phi.comps().iter().enumerate() {
        acc = acc.add(&tgt.sum.inj[c].compose(h).compose(&src.sum.proj[c]));
    }
    ModHom::new(src.module.clone(), tgt.module.clone(), vec![acc])
}

/// An element `m` with `m · 1 ≠ m`, if any. A finite module is unitary exactly when there is none.
pub fn non_unitary_witness(m: &RMod, ring: &Ringoid) -> Option<Elem> {
    let one = m.action(0, 0, ring.id(0));
    m.value(0).elements().find(|x| one.apply(x) != *x)
}

fn require_unitary(m: &RMod, ring: &Ringoid) -> Result<()> {
    match non_unitary_witness(m, ring) {
        None => Ok(()),
        Some(x) => invalid(format!(
            "module is not unitary: element {x:?} is moved by the unit"
        )),
    }
}

/// `T(M)` with `T(M)(c) = M · e_c` as subgroups of `M`.
#[derive(Clone, Debug)]
pub struct TImage {
    pub module: Arc<RMod>,
    pub parts: Vec<SubGroup>,
}

/// `T(M)(c) = M·e_c`, with `f ∈ hom(a,b)` acting by right multiplication by its corner matrix.
pub fn equiv_t(m: &Arc<RMod>, rc: &IdemRing) -> Result<TImage> {
    require_base(m, &rc.ring, "T")?;
    require_unitary(m, &rc.ring)?;
    let n = rc.n();
    let parts: Vec<SubGroup> = (0..n)
        .map(|c| m.action(0, 0, &rc.idempotent(c)).image())
        .collect::<Result<_>>()?;
    let solvers: Vec<_> = parts.iter().map(|p| p.incl.solver()).collect();
    let values: Vec<FinAb> = parts.iter().map(|p| p.group.clone()).collect();
    let module = RMod::from_fn(rc.base.clone(), values.clone(), |a, b, f| {
        let act = m.action(0, 0, &rc.corner(b, a, f));
        let imgs: Vec<Elem> = values[b]
            .gens()
            .iter()
            .map(|x| {
                let y = act.apply(&parts[b].incl.apply(x));
                solvers[a]
                    .solve(&y)
                    .ok_or_else(|| AlgError::Invalid("corner action leaves M·e_c".into()))
            })
            .collect::<Result<_>>()?;
        AbHom::from_images(values[b].clone(), values[a].clone(), &imgs)
    })?;
    Ok(TImage {
        module: Arc::new(module),
        parts,
    })
}

/// The natural isomorphism `F → T(S(F))`, `x ∈ F(c) ↦ inj_c(x)`.
pub fn ts_unit(f: &Arc<RMod>, s: &SImage, t: &TImage) -> Result<ModHom> {
    let comps = (0..f.n())
        .map(|c| {
            let sol = t.parts[c].incl.solver();
            let imgs: Vec<Elem> = f
                .value(c)
                .gens()
                .iter()
                .map(|x| {
                    sol.solve(&s.sum.embed(c, x))
                        .ok_or_else(|| AlgError::Invalid("summand outside M·e_c".into()))
                })
                .collect::<Result<_>>()?;
            AbHom::from_images(f.value(c).clone(), t.parts[c].group.clone(), &imgs)
        })
        .collect::<Result<Vec<_>>>()?;
    ModHom::new(f.clone(), t.module.clone(), comps)
}

/// The natural isomorphism `S(T(M)) → M`, `(x_c) ↦ Σ_c x_c`.
pub fn st_counit(m: &Arc<RMod>, t: &TImage, st: &SImage) -> Result<ModHom> {
    let g = &st.sum.group;
    let mut acc = AbHom::zero(g, m.value(0));
    for (c, p) in t.parts.iter().enumerate() {
        acc = acc.add(&p.incl.compose(&st.sum.proj[c]));
    }
    ModHom::new(st.module.clone(), m.clone(), vec![acc])
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundTrip {
    pub ts_iso: bool,
    pub ts_natural: bool,
    pub st_iso: bool,
    pub st_linear: bool,
}

impl RoundTrip {
    pub fn holds(&self) -> bool {
        self.ts_iso && self.ts_natural && self.st_iso && self.st_linear
    }
}

/// Checks `F ≅ T(S(F))` and `S(T(S(F))) ≅ S(F)` with the explicit witnesses.
pub fn round_trip(f: &Arc<RMod>, rc: &IdemRing) -> Result<RoundTrip> {
    let s = equiv_s(f, rc)?;
    let t = equiv_t(&s.module, rc)?;
    let unit = ts_unit(f, &s, &t)?;
    let st = equiv_s(&t.module, rc)?;
    let counit = st_counit(&s.module, &t, &st)?;
    Ok(RoundTrip {
        ts_iso: unit.is_iso(),
        ts_natural: unit.is_natural(),
        st_iso: counit.is_iso(),
        st_linear: counit.is_natural(),
    })
}

/// `φ_{M,N}: M ⊗_C N → S(M) ⊗_{R_C} S(N)`, `m ⊗ n ↦ inj_c(m) ⊗ inj_c(n)` at each object `c`.
pub fn tensor_compat_s(m: &Arc<RMod>, n: &Arc<RMod>, rc: &IdemRing) -> Result<TensorCompat> {
    let sm = equiv_s(m, rc)?;
    let sn = equiv_s_left(n, rc)?;
    let src = mod_tensor(m, n)?;
    let tgt = mod_tensor(&sm.module, &sn.module)?;
    let map = src.map_pairs(tgt.group(), |c, i, j| {
        tgt.pair(
            0,
            &sm.sum.embed(c, &m.value(c).gen(i)),
            &sn.sum.embed(c, &n.value(c).gen(j)),
        )
    })?;
    Ok(TensorCompat {
        bijective: map.is_iso(),
        map,
        src,
        tgt,
    })
}

#[derive(Clone, Debug)]
pub struct TensorCompat {
    pub map: AbHom,
    pub src: TensorValue,
    pub tgt: TensorValue,
    pub bijective: bool,
}

/// Naturality of `φ` for `α: M → M'`, `β: N → N'`: `φ' ∘ (α ⊗ β) = (Sα ⊗ Sβ) ∘ φ`.
pub fn tensor_compat_s_natural(alpha: &ModHom, beta: &ModHom, rc: &IdemRing) -> Result<bool> {
    let here = tensor_compat_s(&alpha.src, &beta.src, rc)?;
    let there = tensor_compat_s(&alpha.tgt, &beta.tgt, rc)?;
    let sa = equiv_s_hom(alpha, &equiv_s(&alpha.src, rc)?, &equiv_s(&alpha.tgt, rc)?)?;
    let sb = equiv_s_hom(
        beta,
        &equiv_s_left(&beta.src, rc)?,
        &equiv_s_left(&beta.tgt, rc)?,
    )?;
    let top = there.map.compose(&here.src.map(&there.src, alpha, beta));
    let bottom = here.tgt.map(&there.tgt, &sa, &sb).compose(&here.map);
    Ok(top == bottom)
}

// ---------------------------------------------------------------------------
// Unitalization

/// `(Z/N) × R` with `(m,r)(n,s) = (mn, ms + nr + rs)`, `N` the additive exponent of `R`.
#[derive(Clone, Debug)]
pub struct UnitalRing {
    pub modulus: i64,
    pub base: Arc<Ringoid>,
    pub ring: Arc<Ringoid>,
    pub op: Arc<Ringoid>,
    sum: DirectSum,
}

fn zmod(n: i64, x: i64) -> Elem {
    if n == 1 {
        Vec::new()
    } else {
        vec![md(x, n)]
    }
}

pub fn unitalize(r: &Arc<Ringoid>) -> Result<UnitalRing> {
    if !r.is_ring() {
        return invalid("unitalization needs a one-object ringoid");
    }
    let add = r.hom(0, 0).clone();
    let modulus = add.exponent();
    let sum = DirectSum::new(&[FinAb::cyclic(modulus), add.clone()])?;
    let gens = sum.group.gens();
    let product = |x: &[i64], y: &[i64]| -> Elem {
        let (m, rr) = (sum.component(0, x), sum.component(1, x));
        let (n, s) = (sum.component(0, y), sum.component(1, y));
        let (m, n) = (
            m.first().copied().unwrap_or(0),
            n.first().copied().unwrap_or(0),
        );
        let mut t = add.scale(m, &s);
        add.add_assign(&mut t, &add.scale(n, &rr));
        add.add_assign(&mut t, &r.mul(&rr, &s));
        sum.combine(&[zmod(modulus, m * n), t])
    };
    let gen_mul: Vec<Vec<Elem>> = gens
        .iter()
        .map(|x| gens.iter().map(|y| product(x, y)).collect())
        .collect();
    let one = sum.combine(&[zmod(modulus, 1), add.zero()]);
    let ring = Arc::new(Ringoid::ring(
        format!("{}*", r.name),
        sum.group.clone(),
        gen_mul,
        one,
    )?);
    let op = Arc::new(ring.opposite());
    Ok(UnitalRing {
        modulus,
        base: r.clone(),
        ring,
        op,
        sum,
    })
}

impl UnitalRing {
    pub fn order(&self) -> u64 {
        self.sum.group.order()
    }

    /// `r ↦ (0, r)`.
    pub fn embed(&self, r: &[i64]) -> Elem {
        self.sum.embed(1, r)
    }

    pub fn pair(&self, m: i64, r: &[i64]) -> Elem {
        self.sum.combine(&[zmod(self.modulus, m), r.to_vec()])
    }

    /// Ring axioms, the unit `(1,0)`, and multiplicativity of `r ↦ (0,r)`.
    pub fn validate(&self) -> Validation {
        let mut v = self.ring.validate();
        let add = self.base.hom(0, 0);
        let mut wit = None;
        'emb: for x in add.elements() {
            for y in add.elements() {
                let l = self.ring.mul(&self.embed(&x), &self.embed(&y));
                if l != self.embed(&self.base.mul(&x, &y)) {
                    wit = Some(json!({"x": x, "y": y}));
                    break 'emb;
                }
            }
        }
        v.record("embedding-multiplicative", wit);
        v
    }

    fn action_of(&self, m: &RMod, x: &[i64]) -> AbHom {
        let k = self.sum.component(0, x).first().copied().unwrap_or(0);
        let r = self.sum.component(1, x);
        AbHom::identity(m.value(0))
            .scale(k)
            .add(&m.action(0, 0, &r))
    }

    fn build(&self, m: &Arc<RMod>, ring: Arc<Ringoid>) -> Result<Arc<RMod>> {
        let e = m.value(0).exponent();
        if self.modulus % e != 0 {
            return invalid(format!(
                "module exponent {e} does not divide the modulus {}",
                self.modulus
            ));
        }
        let g = m.value(0).clone();
        Ok(Arc::new(RMod::from_fn(ring, vec![g], |_, _, x| {
            Ok(self.action_of(m, x))
        })?))
    }
}

/// `U(M)`: the same group with `m·(n,r) = nm + mr`.
pub fn equiv_u(m: &Arc<RMod>, u: &UnitalRing) -> Result<Arc<RMod>> {
    require_base(m, &u.base, "U")?;
    u.build(m, u.ring.clone())
}

/// `U(N)` for a left module, a right module over `R^op`.
pub fn equiv_u_left(n: &Arc<RMod>, u: &UnitalRing) -> Result<Arc<RMod>> {
    if n.base().n() != 1 || n.base().hom(0, 0) != u.base.hom(0, 0) {
        return Err(AlgError::BaseMismatch(format!(
            "{} is not the opposite of {}",
            n.base().name,
            u.base.name
        )));
    }
    u.build(n, u.op.clone())
}

/// `U(φ)` is `φ` on the same groups.
pub fn equiv_u_hom(phi: &ModHom, src: &Arc<RMod>, tgt: &Arc<RMod>) -> Result<ModHom> {
    ModHom::new(src.clone(), tgt.clone(), phi.comps().to_vec())
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeComparison {
    pub base_count: usize,
    pub unital_count: usize,
    /// The two lattices consist of the same subgroups.
    pub same_subgroups: bool,
    pub same_cardinality: bool,
}

impl LatticeComparison {
    pub fn holds(&self) -> bool {
        self.same_subgroups && self.same_cardinality && self.base_count == self.unital_count
    }
}

/// Exhaustive comparison of the submodule lattices of `M` and `U(M)`.
pub fn lattice_bijection(
    m: &Arc<RMod>,
    u: &UnitalRing,
    budget: usize,
) -> Result<LatticeComparison> {
    let um = equiv_u(m, u)?;
    let mut a: Vec<_> = all_submodules(m, budget)?.iter().map(|s| s.key()).collect();
    let mut b: Vec<_> = all_submodules(&um, budget)?
        .iter()
        .map(|s| s.key())
        .collect();
    a.sort();
    b.sort();
    Ok(LatticeComparison {
        base_count: a.len(),
        unital_count: b.len(),
        same_subgroups: a == b,
        same_cardinality: m.cardinality() == um.cardinality(),
    })
}

/// `M ⊗_R N → U(M) ⊗_{R*} U(N)`, the identity on symbols.
pub fn tensor_compat_u(m: &Arc<RMod>, n: &Arc<RMod>, u: &UnitalRing) -> Result<TensorCompat> {
    let um = equiv_u(m, u)?;
    let un = equiv_u_left(n, u)?;
    let src = mod_tensor(m, n)?;
    let tgt = mod_tensor(&um, &un)?;
    let map = src.map_pairs(tgt.group(), |_, i, j| {
        tgt.pair(0, &m.value(0).gen(i), &n.value(0).gen(j))
    })?;
    Ok(TensorCompat {
        bijective: map.is_iso(),
        map,
        src,
        tgt,
    })
}

/// Naturality of the symbol map for `α: M → M'`, `β: N → N'`.
pub fn tensor_compat_u_natural(alpha: &ModHom, beta: &ModHom, u: &UnitalRing) -> Result<bool> {
    let here = tensor_compat_u(&alpha.src, &beta.src, u)?;
    let there = tensor_compat_u(&alpha.tgt, &beta.tgt, u)?;
    let ua = equiv_u_hom(alpha, &equiv_u(&alpha.src, u)?, &equiv_u(&alpha.tgt, u)?)?;
    let ub = equiv_u_hom(
        beta,
        &equiv_u_left(&beta.src, u)?,
        &equiv_u_left(&beta.tgt, u)?,
    )?;
    let top = there.map.compose(&here.src.map(&there.src, alpha, beta));
    let bottom = here.tgt.map(&there.tgt, &ua, &ub).compose(&here.map);
    Ok(top == bottom)
}

#[derive(Clone, Debug, Serialize)]
pub struct PurityTransfer {
    pub functor: bool,
    pub matrix: bool,
    pub unital: bool,
}

impl PurityTransfer {
    pub fn agree(&self) -> bool {
        self.functor == self.matrix && self.matrix == self.unital
    }
}

/// Purity of `N ⊆ M` over `C`, of `S(N) ⊆ S(M)` over `R_C`, and of `US(N) ⊆ US(M)` over `R_C*`.
pub fn purity_transfer(
    incl: &ModHom,
    rc: &IdemRing,
    u: &UnitalRing,
    opts: &SearchOptions,
) -> Result<PurityTransfer> {
    let functor = is_pure(incl, opts)?.holds;
    let (sn, sm) = (equiv_s(&incl.src, rc)?, equiv_s(&incl.tgt, rc)?);
    let s_incl = equiv_s_hom(incl, &sn, &sm)?;
    let matrix = is_pure(&s_incl, opts)?.holds;
    let (un, um) = (equiv_u(&sn.module, u)?, equiv_u(&sm.module, u)?);
    let unital = is_pure(&equiv_u_hom(&s_incl, &un, &um)?, opts)?.holds;
    Ok(PurityTransfer {
        functor,
        matrix,
        unital,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::SmallCat;
    use crate::ringoid::{linearize, ringoid_of_ring, RingSpec};
    use itertools::Itertools;

    fn arrow() -> Arc<Ringoid> {
        Arc::new(linearize(&SmallCat::arrow(), 2).unwrap())
    }

    /// Brute-force ring isomorphism: every bijection fixing zero, checked on all pairs.
    fn rings_isomorphic(a: &Ringoid, b: &Ringoid) -> bool {
        let (ga, gb) = (a.hom(0, 0), b.hom(0, 0));
        if ga.order() != gb.order() {
            return false;
        }
        let ea: Vec<Elem> = ga.elements().collect();
        let eb: Vec<Elem> = gb.elements().collect();
        let n = ea.len();
        let sum_a: Vec<Vec<usize>> = ea
            .iter()
            .map(|x| ea.iter().map(|y| ga.index_of(&ga.add(x, y))).collect())
            .collect();
        let mul_a: Vec<Vec<usize>> = ea
            .iter()
            .map(|x| ea.iter().map(|y| ga.index_of(&a.mul(x, y))).collect())
            .collect();
        let sum_b: Vec<Vec<usize>> = eb
            .iter()
            .map(|x| eb.iter().map(|y| gb.index_of(&gb.add(x, y))).collect())
            .collect();
        let mul_b: Vec<Vec<usize>> = eb
            .iter()
            .map(|x| eb.iter().map(|y| gb.index_of(&b.mul(x, y))).collect())
            .collect();
        let (one_a, one_b) = (ga.index_of(a.id(0)), gb.index_of(b.id(0)));
        let (za, zb) = (ga.index_of(&ga.zero()), gb.index_of(&gb.zero()));
        let rest_a: Vec<usize> = (0..n).filter(|&i| i != za).collect();
        let rest_b: Vec<usize> = (0..n).filter(|&i| i != zb).collect();
        rest_b
            .iter()
            .copied()
            .permutations(rest_b.len())
            .any(|perm| {
                let mut f = vec![0; n];
                f[za] = zb;
                for (i, j) in rest_a.iter().zip(&perm) {
                    f[*i] = *j;
                }
                f[one_a] == one_b
                    && (0..n).all(|x| {
                        (0..n).all(|y| {
                            f[sum_a[x][y]] == sum_b[f[x]][f[y]]
                                && f[mul_a[x][y]] == mul_b[f[x]][f[y]]
                        })
                    })
            })
    }

    /// Representables and all their quotients.
    fn corpus(c: &Arc<Ringoid>) -> Vec<Arc<RMod>> {
        let mut out = vec![Arc::new(RMod::zero(c))];
        for a in 0..c.n() {
            let h = Arc::new(RMod::representable(c, a).unwrap());
            for s in all_submodules(&h, 4096).unwrap() {
                out.push(s.quotient().unwrap().0);
            }
        }
        out
    }

    fn inclusions(c: &Arc<Ringoid>) -> Vec<ModHom> {
        let mut out = Vec::new();
        for m in corpus(c) {
            for s in all_submodules(&m, 4096).unwrap() {
                out.push(s.incl.clone());
            }
        }
        out
    }

    #[test]
    fn one_object_matrix_ring_is_the_ring() {
        for n in [2, 4, 6] {
            let r = Arc::new(ringoid_of_ring(&RingSpec::Zn(n)).unwrap());
            let rc = matrix_ring(&r).unwrap();
            assert_eq!(rc.order(), n as u64);
            assert!(rings_isomorphic(&rc.ring, &r));
        }
    }

    #[test]
    fn arrow_matrix_ring_is_triangular() {
        let c = arrow();
        let rc = matrix_ring(&c).unwrap();
        let entries: u64 = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| c.hom(i, j).order())
            .product();
        assert_eq!(rc.order(), entries);
        assert_eq!(rc.order(), 8);
        let tri = ringoid_of_ring(&RingSpec::Triangular { field: 2, size: 2 }).unwrap();
        assert!(rings_isomorphic(&rc.ring, &tri));
        // F2 × F2 has the same order but is commutative
        let prod =
            ringoid_of_ring(&RingSpec::Product(vec![RingSpec::Zn(2), RingSpec::Zn(2)])).unwrap();
        assert!(!rings_isomorphic(&rc.ring, &prod));
    }

    #[test]
    fn matrix_rings_validate() {
        for cat in [
            SmallCat::arrow(),
            SmallCat::toy_p1(),
            SmallCat::arrow_with_endo(),
            SmallCat::idempotent(),
        ] {
            let c = Arc::new(linearize(&cat, 2).unwrap());
            let rc = matrix_ring(&c).unwrap();
            let v = rc.validate();
            assert!(
                v.all_pass(),
                "{}: {:?}",
                cat.name,
                v.failures().collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn s_and_t_are_inverse() {
        for cat in [SmallCat::arrow(), SmallCat::arrow_with_endo()] {
            let c = Arc::new(linearize(&cat, 2).unwrap());
            let rc = matrix_ring(&c).unwrap();
            for f in corpus(&c) {
                let s = equiv_s(&f, &rc).unwrap();
                let prod: u64 = f.values().iter().map(|v| v.order()).product();
                assert_eq!(s.module.cardinality(), prod);
                assert!(s.module.validate().all_pass());
                let rt = round_trip(&f, &rc).unwrap();
                assert!(rt.holds(), "{rt:?}");
            }
        }
    }

    #[test]
    fn s_of_representable_is_row_ideal() {
        let c = arrow();
        let rc = matrix_ring(&c).unwrap();
        let reg = Arc::new(RMod::representable(&rc.ring, 0).unwrap());
        for a in 0..c.n() {
            let h = Arc::new(RMod::representable(&c, a).unwrap());
            let s = equiv_s(&h, &rc).unwrap();
            // (x_c) ↦ matrix with x_c at (a, c)
            let mut map = AbHom::zero(&s.sum.group, rc.group());
            for cc in 0..c.n() {
                let imgs: Vec<Elem> = c
                    .hom(cc, a)
                    .gens()
                    .iter()
                    .map(|x| rc.corner(a, cc, x))
                    .collect();
                let emb =
                    AbHom::from_images(c.hom(cc, a).clone(), rc.group().clone(), &imgs).unwrap();
                map = map.add(&emb.compose(&s.sum.proj[cc]));
            }
            let phi = ModHom::new(s.module.clone(), reg.clone(), vec![map.clone()]).unwrap();
            assert!(phi.is_natural() && phi.is_mono());
            let mut image: Vec<Elem> = s.sum.group.elements().map(|x| map.apply(&x)).collect();
            let mut ideal: Vec<Elem> = rc
                .group()
                .elements()
                .map(|r| rc.mul(&rc.idempotent(a), &r))
                .collect();
            image.sort();
            image.dedup();
            ideal.sort();
            ideal.dedup();
            assert_eq!(image, ideal);
        }
    }

    #[test]
    fn non_unitary_module_is_rejected() {
        let rc = matrix_ring(&arrow()).unwrap();
        let g = FinAb::cyclic(2);
        let m = Arc::new(
            RMod::from_fn(rc.ring.clone(), vec![g.clone()], |_, _, _| {
                Ok(AbHom::zero(&g, &g))
            })
            .unwrap(),
        );
        assert_eq!(non_unitary_witness(&m, &rc.ring), Some(vec![1]));
        assert!(matches!(equiv_t(&m, &rc), Err(AlgError::Invalid(_))));
        assert!(!m.validate().all_pass());
    }

    #[test]
    fn tensor_comparison_s() {
        let c = arrow();
        let cop = Arc::new(c.opposite());
        let rc = matrix_ring(&c).unwrap();
        let lefts = corpus(&cop);
        for m in corpus(&c) {
            for n in &lefts {
                let t = tensor_compat_s(&m, n, &rc).unwrap();
                assert!(t.bijective);
                assert_eq!(t.src.group().order(), t.tgt.group().order());
            }
        }
        // naturality on quotient maps of representables
        let q = |r: &Arc<Ringoid>, a| {
            let h = Arc::new(RMod::representable(r, a).unwrap());
            all_submodules(&h, 4096)
                .unwrap()
                .into_iter()
                .map(|s| s.quotient().unwrap().1)
                .collect::<Vec<_>>()
        };
        for alpha in q(&c, 1) {
            for beta in q(&cop, 0) {
                assert!(tensor_compat_s_natural(&alpha, &beta, &rc).unwrap());
            }
        }
    }

    #[test]
    fn tensor_comparison_s_zero_and_one_object() {
        let c = arrow();
        let rc = matrix_ring(&c).unwrap();
        let z = Arc::new(RMod::zero(&c));
        let zl = Arc::new(RMod::zero(&Arc::new(c.opposite())));
        let t = tensor_compat_s(&z, &zl, &rc).unwrap();
        assert!(t.bijective && t.src.group().is_trivial() && t.tgt.group().is_trivial());
        let r = Arc::new(ringoid_of_ring(&RingSpec::Zn(4)).unwrap());
        let rc = matrix_ring(&r).unwrap();
        let m = Arc::new(crate::module::cyclic_module(&r, 2).unwrap());
        let n = Arc::new(crate::module::cyclic_module(&Arc::new(r.opposite()), 4).unwrap());
        let t = tensor_compat_s(&m, &n, &rc).unwrap();
        assert!(t.bijective);
        assert_eq!(t.tgt.group().order(), 2);
    }

    #[test]
    fn unitalization() {
        let rc = matrix_ring(&arrow()).unwrap();
        let u = unitalize(&rc.ring).unwrap();
        assert_eq!(u.modulus, 2);
        assert_eq!(u.order(), 2 * rc.order());
        assert!(u.validate().all_pass());
        assert_eq!(u.ring.id(0), &u.pair(1, &rc.group().zero()));
        let z6 = Arc::new(ringoid_of_ring(&RingSpec::Zn(6)).unwrap());
        let u6 = unitalize(&z6).unwrap();
        assert_eq!(u6.order(), 36);
        assert!(u6.validate().all_pass());
    }

    #[test]
    fn u_preserves_lattices_and_tensors() {
        let c = arrow();
        let rc = matrix_ring(&c).unwrap();
        let u = unitalize(&rc.ring).unwrap();
        let ms: Vec<Arc<RMod>> = corpus(&c)
            .iter()
            .map(|f| equiv_s(f, &rc).unwrap().module)
            .collect();
        for m in &ms {
            let um = equiv_u(m, &u).unwrap();
            assert!(um.validate().all_pass());
            let l = lattice_bijection(m, &u, 4096).unwrap();
            assert!(l.holds(), "{l:?}");
        }
        let cop = Arc::new(c.opposite());
        let ns: Vec<Arc<RMod>> = corpus(&cop)
            .iter()
            .map(|f| equiv_s_left(f, &rc).unwrap().module)
            .collect();
        for m in &ms {
            for n in &ns {
                assert!(tensor_compat_u(m, n, &u).unwrap().bijective);
            }
        }
        let reg = Arc::new(RMod::representable(&rc.ring, 0).unwrap());
        let reg_l = Arc::new(RMod::representable(&rc.op, 0).unwrap());
        let t = tensor_compat_u(&reg, &reg_l, &u).unwrap();
        assert!(t.bijective);
        assert_eq!(t.tgt.group().order(), rc.order());
        let z = Arc::new(RMod::zero(&rc.ring));
        let zl = Arc::new(RMod::zero(&rc.op));
        assert!(tensor_compat_u(&z, &zl, &u)
            .unwrap()
            .tgt
            .group()
            .is_trivial());
        // naturality for quotient maps of the regular modules
        let qs = |m: &Arc<RMod>| {
            all_submodules(m, 4096)
                .unwrap()
                .into_iter()
                .map(|s| s.quotient().unwrap().1)
                .collect::<Vec<_>>()
        };
        for alpha in qs(&reg).iter().take(4) {
            for beta in qs(&reg_l).iter().take(4) {
                assert!(tensor_compat_u_natural(alpha, beta, &u).unwrap());
            }
        }
    }

    #[test]
    fn purity_transfers_through_s_and_u() {
        let c = arrow();
        let rc = matrix_ring(&c).unwrap();
        let u = unitalize(&rc.ring).unwrap();
        let opts = SearchOptions {
            generators: 1,
            ..SearchOptions::default()
        };
        let mut seen = (false, false);
        for incl in inclusions(&c) {
            let p = purity_transfer(&incl, &rc, &u, &opts).unwrap();
            assert!(p.agree(), "{p:?}");
            if p.functor {
                seen.0 = true;
            } else {
                seen.1 = true;
            }
        }
        assert!(seen.0 && seen.1);
    }

    #[test]
    fn s_preserves_kernels_and_cokernels() {
        let c = arrow();
        let rc = matrix_ring(&c).unwrap();
        for m in corpus(&c) {
            for s in all_submodules(&m, 4096).unwrap() {
                let (q, p) = s.quotient().unwrap();
                let sp = equiv_s_hom(&p, &equiv_s(&m, &rc).unwrap(), &equiv_s(&q, &rc).unwrap())
                    .unwrap();
                let size = |m: &RMod| m.values().iter().map(|v| v.order()).product::<u64>();
                assert_eq!(
                    size(&sp.kernel().unwrap().module),
                    size(&p.kernel().unwrap().module)
                );
                assert_eq!(
                    size(&sp.cokernel().unwrap().0),
                    size(&p.cokernel().unwrap().0)
                );
            }
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(16))]

        // cyclic modules over Z/n survive S, T and U, with lattices intact
        #[test]
        fn cyclic_modules_round_trip(n in 2i64..10, i in 0usize..4) {
            let divs: Vec<i64> = (1..=n).filter(|d| n % d == 0).collect();
            let d = divs[i % divs.len()];
            let r = Arc::new(ringoid_of_ring(&RingSpec::Zn(n)).unwrap());
            let m = Arc::new(crate::module::cyclic_module(&r, d).unwrap());
            let rc = matrix_ring(&r).unwrap();
            proptest::prop_assert!(round_trip(&m, &rc).unwrap().holds());
            let s = equiv_s(&m, &rc).unwrap();
            let u = unitalize(&rc.ring).unwrap();
            proptest::prop_assert!(lattice_bijection(&s.module, &u, 256).unwrap().holds());
        }
    }
}
