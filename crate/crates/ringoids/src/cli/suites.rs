//! Check suites run over a resolved document set.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use crate::check::Validation;
use crate::diagram::{cartesian_hull, diag_is_flat, is_cartesian, DiagModule, Representation};
use crate::error::{AlgError, Result};
use crate::fpcat::{
    build_rfp, diag_counit, diag_pure_exact, diag_yoneda, fp_skeleton, purity_via_yoneda,
    reconstruct, yoneda, yoneda_counit, yoneda_exact, FpSkeleton, Rfp,
};
use crate::matring::{
    equiv_s, equiv_s_left, equiv_t, lattice_bijection, matrix_ring, non_unitary_witness,
    purity_transfer, round_trip, st_counit, tensor_compat_s, unitalize, IdemRing, UnitalRing,
};
use crate::module::{hom_modules, same_base, yoneda_map, RMod};
use crate::ringoid::Ringoid;
use crate::tensor::{is_flat, is_pure, left_representable, mod_tensor, FlatMethod, SearchOptions};

use super::doc::{Kind, Sequence, Store};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    NotApplicable,
}

#[derive(Clone, Debug, Serialize)]
pub struct Entry {
    pub id: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<String>,
    pub details: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

pub struct Outcome {
    pub status: Status,
    pub result: Option<String>,
    pub details: Value,
}

impl Outcome {
    fn new(pass: bool, result: Option<String>, details: Value) -> Self {
        Outcome {
            status: if pass { Status::Pass } else { Status::Fail },
            result,
            details,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Validate,
    Flat,
    Pure,
    Cartesian,
    Yoneda,
    RepTheorem,
    MatrixRing,
}

impl Suite {
    pub const CHECKS: [Suite; 6] = [
        Suite::Flat,
        Suite::Pure,
        Suite::Cartesian,
        Suite::Yoneda,
        Suite::RepTheorem,
        Suite::MatrixRing,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Suite::Validate => "validate",
            Suite::Flat => "flat",
            Suite::Pure => "pure",
            Suite::Cartesian => "cartesian",
            Suite::Yoneda => "yoneda",
            Suite::RepTheorem => "rep-theorem",
            Suite::MatrixRing => "appendix-a",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        Suite::CHECKS
            .into_iter()
            .chain([Suite::Validate])
            .find(|x| x.label() == s)
    }
}

pub struct Ctx<'a> {
    pub store: &'a Store,
    pub opts: SearchOptions,
    pub method: FlatMethod,
    pub timings: bool,
    skeleta: BTreeMap<String, std::result::Result<Arc<FpSkeleton>, AlgError>>,
    rfps: BTreeMap<String, std::result::Result<Arc<Rfp>, AlgError>>,
    pub entries: Vec<Entry>,
}

fn validation_outcome(v: &Validation) -> Outcome {
    let failures: Vec<_> = v.failures().collect();
    Outcome::new(
        failures.is_empty(),
        None,
        json!({"subject": v.subject, "checks": v.checks.len(), "failures": failures}),
    )
}

impl<'a> Ctx<'a> {
    pub fn new(store: &'a Store, opts: SearchOptions, method: FlatMethod, timings: bool) -> Self {
        Ctx {
            store,
            opts,
            method,
            timings,
            skeleta: BTreeMap::new(),
            rfps: BTreeMap::new(),
            entries: Vec::new(),
        }
    }

    fn record(&mut self, id: String, f: impl FnOnce(&mut Self) -> Result<Outcome>) {
        let start = std::time::Instant::now();
        let out = f(self);
        let elapsed_ms = self.timings.then(|| start.elapsed().as_millis() as u64);
        let entry = match out {
            Ok(o) => Entry {
                id,
                status: o.status,
                result: o.result,
                details: o.details,
                elapsed_ms,
            },
            Err(e) => {
                let status = match e {
                    AlgError::Budget(_) | AlgError::OrderLimit { .. } => Status::Skipped,
                    AlgError::Hypothesis(_) | AlgError::NotPoset => Status::NotApplicable,
                    _ => Status::Fail,
                };
                Entry {
                    id,
                    status,
                    result: None,
                    details: json!({"error": e.to_string()}),
                    elapsed_ms,
                }
            }
        };
        self.entries.push(entry);
    }

    fn skeleton(&mut self, name: &str, r: &Arc<Ringoid>) -> Result<Arc<FpSkeleton>> {
        let (g, budget) = (self.opts.generators, self.opts.budget);
        self.skeleta
            .entry(name.to_string())
            .or_insert_with(|| fp_skeleton(r, g, budget).map(Arc::new))
            .clone()
    }

    fn rfp(&mut self, name: &str, rep: &Arc<Representation>) -> Result<Arc<Rfp>> {
        let (g, budget) = (self.opts.generators, self.opts.budget);
        self.rfps
            .entry(name.to_string())
            .or_insert_with(|| build_rfp(rep, g, budget).map(Arc::new))
            .clone()
    }

    fn ring_name(&self, r: &Arc<Ringoid>) -> Option<String> {
        self.store
            .ringoids
            .iter()
            .find(|(_, x)| same_base(x, r))
            .map(|(n, _)| n.clone())
    }

    fn rep_name(&self, m: &DiagModule) -> Option<String> {
        self.store
            .reps
            .iter()
            .find(|(_, r)| Arc::ptr_eq(r, &m.rep))
            .map(|(n, _)| n.clone())
    }

    pub fn run(&mut self, suite: Suite) {
        match suite {
            Suite::Validate => self.validate(),
            Suite::Flat => self.flat(),
            Suite::Pure => self.pure(),
            Suite::Cartesian => self.cartesian(),
            Suite::Yoneda => self.yoneda(),
            Suite::RepTheorem => self.rep_theorem(),
            Suite::MatrixRing => self.matrix_ring_checks(),
        }
    }

    fn validate(&mut self) {
        let s = self.store;
        for (kind, name) in &s.order {
            let id = format!("validate/{}/{name}", kind.label());
            self.record(id, |_| {
                Ok(match kind {
                    Kind::Ring | Kind::Ringoid => validation_outcome(&s.ringoids[name].validate()),
                    Kind::Category => validation_outcome(&s.categories[name].validate()),
                    Kind::Functor => validation_outcome(&s.functors[name].validate()),
                    Kind::Module => validation_outcome(&s.modules[name].validate()),
                    Kind::Representation => validation_outcome(&s.reps[name].validate()),
                    Kind::DiagModule => validation_outcome(&s.diags[name].validate()),
                    Kind::Sequence => {
                        let (mut v, mono) = match &s.sequences[name] {
                            Sequence::Module(h) => (h.validate(), h.is_mono()),
                            Sequence::Diag(d) => (d.incl.validate(), d.incl.is_mono()),
                        };
                        v.record(
                            "mono",
                            (!mono).then(|| json!("the map has a nonzero kernel")),
                        );
                        validation_outcome(&v)
                    }
                })
            });
        }
    }

    fn flat(&mut self) {
        let s = self.store;
        for (name, m) in &s.modules {
            let (method, opts) = (self.method, self.opts.clone());
            self.record(format!("flat/module/{name}"), |_| {
                let v = is_flat(m, method, &opts)?;
                let result = if v.holds { "flat" } else { "not-flat" };
                Ok(Outcome::new(
                    v.agree,
                    Some(result.into()),
                    serde_json::to_value(&v).expect("serializable"),
                ))
            });
        }
        for (name, m) in &s.diags {
            let opts = self.opts.clone();
            self.record(format!("flat/diag-module/{name}"), |_| {
                let f = diag_is_flat(m, &opts)?;
                let holds = f.holds.unwrap_or(f.componentwise_flat);
                let result = if holds { "flat" } else { "not-flat" };
                Ok(Outcome::new(
                    f.agree != Some(false),
                    Some(result.into()),
                    serde_json::to_value(&f).expect("serializable"),
                ))
            });
        }
        for (name, rep) in &s.reps {
            let opts = self.opts.clone();
            self.record(format!("flat/representation/{name}"), |_| {
                let f = rep.flatness(&opts)?;
                let result = format!("right-flat={},left-flat={}", f.right, f.left);
                Ok(Outcome::new(
                    true,
                    Some(result),
                    serde_json::to_value(&f).expect("serializable"),
                ))
            });
        }
    }

    fn pure(&mut self) {
        let s = self.store;
        for (name, seq) in &s.sequences {
            let opts = self.opts.clone();
            match seq {
                Sequence::Module(incl) => {
                    let ring = incl.tgt.base().clone();
                    let ring_name = self.ring_name(&ring);
                    self.record(format!("pure/sequence/{name}"), |ctx| {
                        let v = is_pure(incl, &opts)?;
                        let mut details = json!({"direct": v});
                        let mut agree = v.agree;
                        if let (true, Some(rn)) = (ring.is_ring(), ring_name) {
                            if let Ok(sk) = ctx.skeleton(&rn, &ring) {
                                if let Ok(y) = purity_via_yoneda(incl, &sk, &opts) {
                                    agree &= y.agree;
                                    details["yoneda"] = json!({"holds": y.yoneda, "witness": y.witness, "agree": y.agree});
                                }
                            }
                        }
                        let result = if v.holds { "pure" } else { "not-pure" };
                        Ok(Outcome::new(agree, Some(result.into()), details))
                    });
                }
                Sequence::Diag(sub) => {
                    let rep = sub.ambient().rep.clone();
                    let rep_name = self.rep_name(sub.ambient());
                    self.record(format!("pure/sequence/{name}"), |ctx| {
                        let p = diag_pure_exact(sub, &opts)?;
                        let mut agree = p.agree != Some(false);
                        let mut details = serde_json::to_value(&p).expect("serializable");
                        if let Some(rn) = rep_name {
                            if let Ok(rfp) = ctx.rfp(&rn, &rep) {
                                let y = yoneda_exact(sub, &rfp)?;
                                agree &= y == p.holds;
                                details["yoneda_exact"] = json!(y);
                            }
                        }
                        let result = if p.holds { "pure" } else { "not-pure" };
                        Ok(Outcome::new(agree, Some(result.into()), details))
                    });
                }
            }
        }
    }

    fn cartesian(&mut self) {
        let s = self.store;
        for (name, m) in &s.diags {
            let opts = self.opts.clone();
            self.record(format!("cartesian/diag-module/{name}"), |_| {
                let c = is_cartesian(m)?;
                let mut details = json!({"arrows": c.arrows});
                if c.holds && m.rep.flatness(&opts)?.right {
                    // hulls of the generators of every part
                    let mut hulls = Vec::new();
                    let mut ok = true;
                    for cc in 0..m.rep.index.n() {
                        let part = m.part(cc);
                        for a in 0..part.n() {
                            for x in part.value(a).gens() {
                                let h = cartesian_hull(m, cc, a, &x, &opts)?;
                                ok &= h.cartesian && h.pure_parts.iter().all(|p| *p) && h.sub.contains(cc, a, &x);
                                hulls.push(json!({"object": m.rep.index.objects[cc], "component": a, "element": x,
                                    "rounds": h.rounds, "size": h.sub.cardinality(), "cartesian": h.cartesian}));
                            }
                        }
                    }
                    details["hulls"] = json!(hulls);
                    let result = if c.holds { "cartesian" } else { "not-cartesian" };
                    return Ok(Outcome::new(ok, Some(result.into()), details));
                }
                let result = if c.holds { "cartesian" } else { "not-cartesian" };
                Ok(Outcome::new(true, Some(result.into()), details))
            });
        }
    }

    fn yoneda(&mut self) {
        let s = self.store;
        for (name, m) in &s.modules {
            let r = m.base().clone();
            let ring_name = self.ring_name(&r);
            let g = self.opts.generators;
            self.record(format!("yoneda/module/{name}"), |ctx| {
                let r_op = Arc::new(r.opposite());
                let mut objects = Vec::new();
                let mut ok = true;
                for a in 0..r.n() {
                    let h = Arc::new(RMod::representable(&r, a)?);
                    let homs = hom_modules(&h, m)?;
                    let size = m.value(a).order();
                    let mut eval_ok = homs.order() == size;
                    for x in m.value(a).gens() {
                        let f = yoneda_map(&h, m, a, &x)?;
                        eval_ok &= f.is_natural() && f.apply(a, r.id(a)) == x;
                    }
                    let dual = Arc::new(left_representable(&r_op, a)?);
                    let t = mod_tensor(m, &dual)?;
                    let tensor_ok = t.group().order() == size;
                    ok &= eval_ok && tensor_ok;
                    objects.push(json!({"object": r.objects()[a], "value_order": size, "hom_order": homs.order(),
                        "tensor_order": t.group().order()}));
                }
                let mut details = json!({"objects": objects});
                if let (true, Some(rn)) = (r.is_ring(), ring_name) {
                    let gens = m.generating_set()?.len();
                    if gens <= g {
                        let sk = ctx.skeleton(&rn, &r)?;
                        let y = yoneda(m, &sk)?;
                        let (_, eps) = yoneda_counit(&y, &sk)?;
                        ok &= eps.is_iso();
                        details["counit_iso"] = json!(eps.is_iso());
                    }
                }
                Ok(Outcome::new(ok, None, details))
            });
        }
        // left modules: H_a ⊗ N ≅ N(a)
        for (name, n) in &s.modules {
            let r_op = n.base().clone();
            let r = Arc::new(r_op.opposite());
            self.record(format!("yoneda/left/{name}"), |_| {
                let mut ok = true;
                let mut objects = Vec::new();
                for a in 0..r.n() {
                    let h = Arc::new(RMod::representable(&r, a)?);
                    let t = mod_tensor(&h, n)?;
                    ok &= t.group().order() == n.value(a).order();
                    objects
                        .push(json!({"object": r.objects()[a], "tensor_order": t.group().order()}));
                }
                Ok(Outcome::new(ok, None, json!({"objects": objects})))
            });
        }
    }

    fn rep_theorem(&mut self) {
        let s = self.store;
        for (name, rep) in &s.reps {
            self.record(format!("rep-theorem/representation/{name}"), |ctx| {
                let rfp = ctx.rfp(name, rep)?;
                let v = rfp.rep.validate();
                let mut o = validation_outcome(&v);
                o.details["skeleton_sizes"] =
                    json!(rfp.skeleta.iter().map(|k| k.n()).collect::<Vec<_>>());
                Ok(o)
            });
        }
        for (name, m) in &s.diags {
            let rep_name = self.rep_name(m);
            let opts = self.opts.clone();
            self.record(format!("rep-theorem/diag-module/{name}"), |ctx| {
                let rn = rep_name.ok_or_else(|| {
                    AlgError::Invalid("module over an undeclared representation".into())
                })?;
                let rfp = ctx.rfp(&rn, &m.rep)?;
                let y = diag_yoneda(m, &rfp)?;
                let recon = reconstruct(&y.module, &rfp, &opts)?;
                let counit = diag_counit(&recon.module, &y, m, &rfp)?;
                let (cart_m, cart_y) = (is_cartesian(m)?.holds, is_cartesian(&y.module)?.holds);
                let details = json!({
                    "yoneda_valid": y.module.validate().all_pass(),
                    "unit_iso": recon.is_iso(),
                    "counit_iso": counit.is_iso(),
                    "counit_natural": counit.validate().all_pass(),
                    "cartesian": cart_m,
                    "image_cartesian": cart_y,
                });
                let pass = recon.is_iso()
                    && counit.is_iso()
                    && cart_m == cart_y
                    && y.module.validate().all_pass();
                Ok(Outcome::new(
                    pass,
                    Some(if pass { "round-trip" } else { "broken" }.into()),
                    details,
                ))
            });
        }
    }

    fn matrix_ring_checks(&mut self) {
        let s = self.store;
        for (name, c) in &s.ringoids {
            if s.idem.contains_key(name) {
                continue;
            }
            self.record(format!("appendix-a/ringoid/{name}"), |ctx| {
                let rc = matrix_ring(c)?;
                let u = unitalize(&rc.ring)?;
                let (rv, uv) = (rc.validate(), u.validate());
                let modules: Vec<(String, Arc<RMod>)> = s
                    .modules
                    .iter()
                    .filter(|(_, m)| same_base(m.base(), c))
                    .map(|(n, m)| (n.clone(), m.clone()))
                    .collect();
                let modules = if modules.is_empty() {
                    (0..c.n())
                        .map(|a| {
                            Ok((
                                format!("H_{}", c.objects()[a]),
                                Arc::new(RMod::representable(c, a)?),
                            ))
                        })
                        .collect::<Result<Vec<_>>>()?
                } else {
                    modules
                };
                let lefts: Vec<(String, Arc<RMod>)> = s
                    .modules
                    .iter()
                    .filter(|(_, m)| m.base().n() == c.n() && opposite_of(m.base(), c))
                    .map(|(n, m)| (n.clone(), m.clone()))
                    .collect();
                matrix_ring_for(ctx, &rc, &u, &rv, &uv, &modules, &lefts, c)
            });
        }
        for (name, rc) in &s.idem {
            for (mname, m) in &s.modules {
                if !same_base(m.base(), &rc.ring) {
                    continue;
                }
                self.record(format!("appendix-a/matrix-module/{name}/{mname}"), |_| {
                    if let Some(x) = non_unitary_witness(m, &rc.ring) {
                        return Ok(Outcome::new(
                            false,
                            Some("non-unitary".into()),
                            json!({"witness": {"element": x, "moved_to": m.act(0, 0, rc.ring.id(0), &x)}}),
                        ));
                    }
                    let t = equiv_t(m, rc)?;
                    let st = equiv_s(&t.module, rc)?;
                    let counit = st_counit(m, &t, &st)?;
                    let pass = counit.is_iso() && counit.is_natural();
                    Ok(Outcome::new(pass, Some("unitary".into()), json!({"st_iso": pass})))
                });
            }
        }
    }
}

/// Equal to `b^op` up to the name.
fn opposite_of(a: &Ringoid, b: &Ringoid) -> bool {
    let mut op = b.opposite();
    op.name = a.name.clone();
    *a == op
}

#[allow(clippy::too_many_arguments)]
fn matrix_ring_for(
    ctx: &mut Ctx<'_>,
    rc: &IdemRing,
    u: &UnitalRing,
    rv: &Validation,
    uv: &Validation,
    modules: &[(String, Arc<RMod>)],
    lefts: &[(String, Arc<RMod>)],
    c: &Arc<Ringoid>,
) -> Result<Outcome> {
    let mut ok = rv.all_pass() && uv.all_pass();
    let mut per_module = Vec::new();
    for (n, m) in modules {
        let rt = round_trip(m, rc)?;
        let s = equiv_s(m, rc)?;
        let lat = lattice_bijection(&s.module, u, ctx.opts.budget)?;
        ok &= rt.holds() && lat.holds();
        per_module.push(json!({"module": n, "round_trip": rt, "lattice": lat}));
    }
    let mut tensors = Vec::new();
    for (mn, m) in modules {
        for (nn, n) in lefts {
            let t = tensor_compat_s(m, n, rc)?;
            let sl = equiv_s_left(n, rc)?;
            let sm = equiv_s(m, rc)?;
            let tu = crate::matring::tensor_compat_u(&sm.module, &sl.module, u)?;
            ok &= t.bijective && tu.bijective;
            tensors.push(
                json!({"right": mn, "left": nn, "order": t.src.group().order(),
                "s_bijective": t.bijective, "u_bijective": tu.bijective}),
            );
        }
    }
    let mut purity = Vec::new();
    for (sn, seq) in &ctx.store.sequences {
        if let Sequence::Module(incl) = seq {
            if same_base(incl.tgt.base(), c) && incl.is_mono() {
                let opts = SearchOptions {
                    generators: ctx.opts.generators.min(1),
                    ..ctx.opts.clone()
                };
                let p = purity_transfer(incl, rc, u, &opts)?;
                ok &= p.agree();
                purity.push(json!({"sequence": sn, "transfer": p}));
            }
        }
    }
    let details = json!({
        "matrix_ring_order": rc.order(),
        "unital_order": u.order(),
        "modulus": u.modulus,
        "ring_failures": rv.failures().chain(uv.failures()).collect::<Vec<_>>(),
        "modules": per_module,
        "tensors": tensors,
        "purity": purity,
    });
    Ok(Outcome::new(ok, None, details))
}
