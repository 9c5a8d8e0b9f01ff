//! Input documents: parsing and name resolution.

use std::collections::BTreeMap;
use std::sync::Arc;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::abelian::{AbHom, Elem, FinAb};
use crate::basechange::{restrict_scalars, BaseChange};
use crate::diagram::{diag_generated, ext_zero, DiagModule, DiagSub, Representation, SmallCat};
use crate::error::{invalid, AlgError, Result};
use crate::matring::{matrix_ring, unitalize, IdemRing};
use crate::module::{cyclic_module, direct_sum, submodule_generated, ModHom, RMod};
use crate::ringoid::{linearize, ringoid_of_ring, AddFunctor, RingSpec, Ringoid};

pub const SCHEMA: &str = "ringoids/1";

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bundle {
    pub schema: String,
    #[serde(default)]
    pub documents: Vec<Document>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub kind: Kind,
    pub name: String,
    pub body: Value,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Ring,
    Ringoid,
    Functor,
    Module,
    Category,
    Representation,
    DiagModule,
    Sequence,
}

impl Kind {
    pub fn label(self) -> &'static str {
        match self {
            Kind::Ring => "ring",
            Kind::Ringoid => "ringoid",
            Kind::Functor => "functor",
            Kind::Module => "module",
            Kind::Category => "category",
            Kind::Representation => "representation",
            Kind::DiagModule => "diag-module",
            Kind::Sequence => "sequence",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum CategoryBody {
    Builtin(String),
    Poset {
        objects: Vec<String>,
        arrows: Vec<(String, String)>,
    },
    Explicit {
        objects: Vec<String>,
        /// `(name, source, target)`.
        morphisms: Vec<(String, String, String)>,
        identities: Vec<String>,
        /// `(outer, inner, composite)`.
        compose: Vec<(String, String, String)>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum RingoidBody {
    Linearize { category: String, modulus: i64 },
    Opposite(String),
    MatrixRing(String),
    Unitalize(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HomImages {
    from: String,
    to: String,
    images: Vec<Elem>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum FunctorBody {
    Identity(String),
    RingMap {
        from: String,
        to: String,
        images: Vec<Elem>,
    },
    Explicit {
        from: String,
        to: String,
        objects: Vec<String>,
        maps: Vec<HomImages>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Action {
    from: String,
    to: String,
    generator: usize,
    /// Images of the generators of `M(to)` in `M(from)`.
    images: Vec<Elem>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum ModuleBody {
    Zero {
        over: String,
    },
    Cyclic {
        over: String,
        order: i64,
    },
    Representable {
        over: String,
        object: String,
    },
    Explicit {
        over: String,
        values: Vec<Vec<i64>>,
        actions: Vec<Action>,
    },
    Quotient {
        module: String,
        by: Vec<(String, Elem)>,
    },
    Sum(Vec<String>),
    Restrict {
        functor: String,
        module: String,
    },
    Extend {
        functor: String,
        module: String,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MuEntry {
    outer: String,
    inner: String,
    components: Vec<Elem>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RepresentationBody {
    category: String,
    rings: Vec<String>,
    /// Functor document per non-identity morphism; identities default to identity functors.
    functors: BTreeMap<String, String>,
    #[serde(default)]
    twist: Option<BTreeMap<String, Elem>>,
    #[serde(default)]
    delta: Option<BTreeMap<String, Vec<Elem>>>,
    #[serde(default)]
    mu: Option<Vec<MuEntry>>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum DiagBody {
    Zero {
        representation: String,
    },
    /// The ring itself at every object, structural maps given by the functors.
    Regular {
        representation: String,
    },
    ExtZero {
        representation: String,
        object: String,
        module: String,
    },
    Explicit {
        representation: String,
        parts: Vec<String>,
        /// Per morphism, per ringoid object, images of generators of `M_c(a)` in `M_d(R_α a)`.
        maps: BTreeMap<String, Vec<Vec<Elem>>>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum SequenceBody {
    Submodule {
        module: String,
        generators: Vec<(String, Elem)>,
    },
    DiagSubmodule {
        module: String,
        generators: Vec<(String, String, Elem)>,
    },
    Map {
        from: String,
        to: String,
        components: Vec<Vec<Elem>>,
    },
}

#[derive(Clone, Debug)]
pub enum Sequence {
    /// `N → M` over a ringoid.
    Module(ModHom),
    Diag(DiagSub),
}

/// Everything the documents define, by name, in document order.
#[derive(Default)]
pub struct Store {
    pub order: Vec<(Kind, String)>,
    pub ringoids: BTreeMap<String, Arc<Ringoid>>,
    pub categories: BTreeMap<String, SmallCat>,
    pub functors: BTreeMap<String, AddFunctor>,
    pub modules: BTreeMap<String, Arc<RMod>>,
    pub reps: BTreeMap<String, Arc<Representation>>,
    pub diags: BTreeMap<String, Arc<DiagModule>>,
    pub sequences: BTreeMap<String, Sequence>,
    /// Matrix rings declared as ringoid documents.
    pub idem: BTreeMap<String, IdemRing>,
}

fn lookup<'a, T>(map: &'a BTreeMap<String, T>, what: &str, name: &str) -> Result<&'a T> {
    map.get(name)
        .ok_or_else(|| AlgError::Invalid(format!("unresolved {what} reference '{name}'")))
}

fn object(r: &Ringoid, name: &str) -> Result<usize> {
    r.object_index(name)
        .or_else(|| name.parse::<usize>().ok().filter(|&i| i < r.n()))
        .ok_or_else(|| AlgError::Invalid(format!("ringoid {} has no object '{name}'", r.name)))
}

fn cat_object(c: &SmallCat, name: &str) -> Result<usize> {
    c.objects
        .iter()
        .position(|o| o == name)
        .ok_or_else(|| AlgError::Invalid(format!("category {} has no object '{name}'", c.name)))
}

fn cat_morphism(c: &SmallCat, name: &str) -> Result<usize> {
    c.morphisms
        .iter()
        .position(|m| m.0 == name)
        .ok_or_else(|| AlgError::Invalid(format!("category {} has no morphism '{name}'", c.name)))
}

fn check_elem(g: &FinAb, x: &Elem, what: &str) -> Result<()> {
    if g.contains(x) {
        Ok(())
    } else {
        invalid(format!(
            "{what}: {x:?} is not an element of a group with invariant factors {:?}",
            g.factors()
        ))
    }
}

fn hom_from(src: &FinAb, tgt: &FinAb, images: &[Elem], what: &str) -> Result<AbHom> {
    if images.len() != src.rank() {
        return invalid(format!(
            "{what}: expected {} images, got {}",
            src.rank(),
            images.len()
        ));
    }
    for x in images {
        check_elem(tgt, x, what)?;
    }
    AbHom::from_images(src.clone(), tgt.clone(), images)
        .map_err(|_| AlgError::Invalid(format!("{what}: images do not define a homomorphism")))
}

fn body<T: serde::de::DeserializeOwned>(doc: &Document) -> Result<T> {
    serde_json::from_value(doc.body.clone())
        .map_err(|e| AlgError::Invalid(format!("{} '{}': {e}", doc.kind.label(), doc.name)))
}

/// Structural maps `x ↦ u_α·φ_α(x)`; for non-strict representations the units `u_α` are
/// found by search among tuples satisfying the module axioms.
fn regular_module(rep: &Arc<Representation>, parts: Vec<Arc<RMod>>) -> Result<DiagModule> {
    let ix = &rep.index;
    let build = |units: &[Elem]| {
        DiagModule::from_fn(rep, parts.clone(), |al, _| {
            let f = rep.functor(al);
            let e = rep.ring(ix.tgt(al));
            let imgs: Vec<Elem> = f
                .src
                .hom(0, 0)
                .gens()
                .iter()
                .map(|x| e.mul(&units[al], &f.apply(0, 0, x)))
                .collect();
            AbHom::from_images(f.src.hom(0, 0).clone(), e.hom(0, 0).clone(), &imgs)
        })
    };
    if rep.is_strict() {
        let ones: Vec<Elem> = (0..ix.m())
            .map(|al| rep.ring(ix.tgt(al)).id(0).clone())
            .collect();
        return build(&ones);
    }
    let units: Vec<Vec<Elem>> = (0..ix.m())
        .map(|al| {
            let e = rep.ring(ix.tgt(al));
            e.hom(0, 0)
                .elements()
                .filter(|x| e.inverse_of(0, 0, x).is_some())
                .collect()
        })
        .collect();
    let total: u64 = units.iter().map(|u| u.len() as u64).product();
    if total > REGULAR_SEARCH_LIMIT {
        return Err(AlgError::Budget(format!(
            "{total} unit tuples for the regular module"
        )));
    }
    for choice in units.iter().map(|u| u.iter()).multi_cartesian_product() {
        let choice: Vec<Elem> = choice.into_iter().cloned().collect();
        let m = build(&choice)?;
        if m.validate().all_pass() {
            return Ok(m);
        }
    }
    invalid("no choice of units makes the regular module satisfy the module axioms")
}

const REGULAR_SEARCH_LIMIT: u64 = 1 << 16;

pub fn parse_bundle(text: &str) -> Result<Bundle> {
    let b: Bundle = serde_json::from_str(text)
        .map_err(|e| AlgError::Invalid(format!("malformed document: {e}")))?;
    if b.schema != SCHEMA {
        return invalid(format!(
            "unsupported schema '{}', expected '{SCHEMA}'",
            b.schema
        ));
    }
    Ok(b)
}

impl Store {
    pub fn load(docs: &[Document]) -> Result<Store> {
        let mut s = Store::default();
        for d in docs {
            if s.order.iter().any(|(_, n)| n == &d.name) {
                return invalid(format!("duplicate document name '{}'", d.name));
            }
            s.add(d).map_err(|e| match e {
                AlgError::Invalid(m) if m.contains(&d.name) => AlgError::Invalid(m),
                other => AlgError::Invalid(format!("{} '{}': {other}", d.kind.label(), d.name)),
            })?;
            s.order.push((d.kind, d.name.clone()));
        }
        Ok(s)
    }

    pub fn ringoid(&self, name: &str) -> Result<&Arc<Ringoid>> {
        lookup(&self.ringoids, "ring", name)
    }

    pub fn module(&self, name: &str) -> Result<&Arc<RMod>> {
        lookup(&self.modules, "module", name)
    }

    fn add(&mut self, d: &Document) -> Result<()> {
        let name = d.name.clone();
        match d.kind {
            Kind::Ring => {
                let spec: RingSpec = body(d)?;
                let mut r = ringoid_of_ring(&spec)?;
                r.name = name.clone();
                self.ringoids.insert(name, Arc::new(r));
            }
            Kind::Category => {
                let c =
                    match body::<CategoryBody>(d)? {
                        CategoryBody::Builtin(b) => match b.as_str() {
                            "arrow" => SmallCat::arrow(),
                            "toy-p1" => SmallCat::toy_p1(),
                            "idempotent" => SmallCat::idempotent(),
                            "arrow-with-endo" => SmallCat::arrow_with_endo(),
                            other => return invalid(format!("unknown builtin category '{other}'")),
                        },
                        CategoryBody::Poset { objects, arrows } => {
                            let objs: Vec<&str> = objects.iter().map(String::as_str).collect();
                            let arr: Vec<(&str, &str)> = arrows
                                .iter()
                                .map(|(a, b)| (a.as_str(), b.as_str()))
                                .collect();
                            SmallCat::poset(&name, &objs, &arr)?
                        }
                        CategoryBody::Explicit {
                            objects,
                            morphisms,
                            identities,
                            compose,
                        } => {
                            let oi = |s: &str| {
                                objects.iter().position(|o| o == s).ok_or_else(|| {
                                    AlgError::Invalid(format!("unknown object '{s}'"))
                                })
                            };
                            let mi = |s: &str| {
                                morphisms.iter().position(|m| m.0 == s).ok_or_else(|| {
                                    AlgError::Invalid(format!("unknown morphism '{s}'"))
                                })
                            };
                            let ms = morphisms
                                .iter()
                                .map(|(n, a, b)| Ok((n.clone(), oi(a)?, oi(b)?)))
                                .collect::<Result<Vec<_>>>()?;
                            let m = ms.len();
                            let mut comp = vec![vec![None; m]; m];
                            for (b, a, ba) in &compose {
                                comp[mi(b)?][mi(a)?] = Some(mi(ba)?);
                            }
                            let ids = identities
                                .iter()
                                .map(|s| mi(s))
                                .collect::<Result<Vec<_>>>()?;
                            SmallCat::new(name.clone(), objects.clone(), ms, comp, ids)?
                        }
                    };
                self.categories.insert(name, c);
            }
            Kind::Ringoid => {
                if let RingoidBody::MatrixRing(r) = body::<RingoidBody>(d)? {
                    let rc = matrix_ring(self.ringoid(&r)?)?;
                    self.ringoids.insert(name.clone(), rc.ring.clone());
                    self.idem.insert(name, rc);
                    return Ok(());
                }
                let r = match body::<RingoidBody>(d)? {
                    RingoidBody::Linearize { category, modulus } => {
                        linearize(lookup(&self.categories, "category", &category)?, modulus)?
                    }
                    RingoidBody::Opposite(r) => self.ringoid(&r)?.opposite(),
                    RingoidBody::MatrixRing(_) => unreachable!("handled above"),
                    RingoidBody::Unitalize(r) => (*unitalize(self.ringoid(&r)?)?.ring).clone(),
                };
                let mut r = r;
                r.name = name.clone();
                self.ringoids.insert(name, Arc::new(r));
            }
            Kind::Functor => {
                let f = match body::<FunctorBody>(d)? {
                    FunctorBody::Identity(r) => AddFunctor::identity(self.ringoid(&r)?),
                    FunctorBody::RingMap { from, to, images } => {
                        let (s, t) = (self.ringoid(&from)?, self.ringoid(&to)?);
                        if !s.is_ring() || !t.is_ring() {
                            return invalid("ring_map needs one-object ringoids");
                        }
                        let h = hom_from(s.hom(0, 0), t.hom(0, 0), &images, "ring map")?;
                        AddFunctor::new(s.clone(), t.clone(), vec![0], vec![vec![h]])?
                    }
                    FunctorBody::Explicit {
                        from,
                        to,
                        objects,
                        maps,
                    } => {
                        let (s, t) = (self.ringoid(&from)?.clone(), self.ringoid(&to)?.clone());
                        if objects.len() != s.n() {
                            return invalid("functor needs one target object per source object");
                        }
                        let obj = objects
                            .iter()
                            .map(|o| object(&t, o))
                            .collect::<Result<Vec<_>>>()?;
                        let n = s.n();
                        let mut hm: Vec<Vec<Option<AbHom>>> = vec![vec![None; n]; n];
                        for h in &maps {
                            let (a, b) = (object(&s, &h.from)?, object(&s, &h.to)?);
                            hm[a][b] = Some(hom_from(
                                s.hom(a, b),
                                t.hom(obj[a], obj[b]),
                                &h.images,
                                "functor map",
                            )?);
                        }
                        let mut rows = Vec::new();
                        for (a, row) in hm.into_iter().enumerate() {
                            let mut r = Vec::new();
                            for (b, m) in row.into_iter().enumerate() {
                                r.push(match m {
                                    Some(m) => m,
                                    None if s.hom(a, b).is_trivial() => {
                                        AbHom::zero(s.hom(a, b), t.hom(obj[a], obj[b]))
                                    }
                                    None => {
                                        return invalid(format!(
                                            "missing functor map on hom({a},{b})"
                                        ))
                                    }
                                });
                            }
                            rows.push(r);
                        }
                        AddFunctor::new(s, t, obj, rows)?
                    }
                };
                self.functors.insert(name, f);
            }
            Kind::Module => {
                let m = self.build_module(body(d)?)?;
                self.modules.insert(name, Arc::new(m));
            }
            Kind::Representation => {
                let rep = self.build_rep(&name, body(d)?)?;
                self.reps.insert(name, Arc::new(rep));
            }
            Kind::DiagModule => {
                let m = self.build_diag(body(d)?)?;
                self.diags.insert(name, Arc::new(m));
            }
            Kind::Sequence => {
                let s = match body::<SequenceBody>(d)? {
                    SequenceBody::Submodule { module, generators } => {
                        let m = self.module(&module)?;
                        let gens = generators
                            .iter()
                            .map(|(o, x)| {
                                let a = object(m.base(), o)?;
                                check_elem(m.value(a), x, "generator")?;
                                Ok((a, x.clone()))
                            })
                            .collect::<Result<Vec<_>>>()?;
                        Sequence::Module(submodule_generated(m, &gens)?.incl)
                    }
                    SequenceBody::DiagSubmodule { module, generators } => {
                        let m = lookup(&self.diags, "diag-module", &module)?;
                        let ix = &m.rep.index;
                        let gens = generators
                            .iter()
                            .map(|(c, o, x)| {
                                let c = cat_object(ix, c)?;
                                let a = object(m.rep.ring(c), o)?;
                                check_elem(m.part(c).value(a), x, "generator")?;
                                Ok((c, a, x.clone()))
                            })
                            .collect::<Result<Vec<_>>>()?;
                        Sequence::Diag(diag_generated(m, &gens)?)
                    }
                    SequenceBody::Map {
                        from,
                        to,
                        components,
                    } => {
                        let (s, t) = (self.module(&from)?.clone(), self.module(&to)?.clone());
                        if components.len() != s.n() {
                            return invalid("map needs one component per object");
                        }
                        let comps = components
                            .iter()
                            .enumerate()
                            .map(|(a, imgs)| {
                                hom_from(s.value(a), t.value(a), imgs, "map component")
                            })
                            .collect::<Result<Vec<_>>>()?;
                        Sequence::Module(ModHom::new(s, t, comps)?)
                    }
                };
                self.sequences.insert(name, s);
            }
        }
        Ok(())
    }

    fn build_module(&self, b: ModuleBody) -> Result<RMod> {
        Ok(match b {
            ModuleBody::Zero { over } => RMod::zero(self.ringoid(&over)?),
            ModuleBody::Cyclic { over, order } => cyclic_module(self.ringoid(&over)?, order)?,
            ModuleBody::Representable { over, object: o } => {
                let r = self.ringoid(&over)?;
                RMod::representable(r, object(r, &o)?)?
            }
            ModuleBody::Explicit {
                over,
                values,
                actions,
            } => {
                let r = self.ringoid(&over)?.clone();
                if values.len() != r.n() {
                    return invalid("module needs one value per object");
                }
                let vals = values
                    .iter()
                    .map(|f| FinAb::new(f.clone()))
                    .collect::<Result<Vec<_>>>()?;
                let n = r.n();
                let mut ga: Vec<Vec<Vec<Option<AbHom>>>> = (0..n)
                    .map(|a| (0..n).map(|b| vec![None; r.hom(a, b).rank()]).collect())
                    .collect();
                for act in &actions {
                    let (a, b) = (object(&r, &act.from)?, object(&r, &act.to)?);
                    let slot = ga[a][b].get_mut(act.generator).ok_or_else(|| {
                        AlgError::Invalid(format!(
                            "hom({a},{b}) has no generator {}",
                            act.generator
                        ))
                    })?;
                    *slot = Some(hom_from(&vals[b], &vals[a], &act.images, "action")?);
                }
                let mut full = Vec::new();
                for (a, row) in ga.into_iter().enumerate() {
                    let mut r2 = Vec::new();
                    for (b, gens) in row.into_iter().enumerate() {
                        let hs = gens
                            .into_iter()
                            .enumerate()
                            .map(|(i, h)| {
                                h.or_else(|| {
                                    (vals[a].is_trivial() || vals[b].is_trivial())
                                        .then(|| AbHom::zero(&vals[b], &vals[a]))
                                })
                                .ok_or_else(|| {
                                    AlgError::Invalid(format!(
                                        "missing action of generator {i} of hom({a},{b})"
                                    ))
                                })
                            })
                            .collect::<Result<Vec<_>>>()?;
                        r2.push(hs);
                    }
                    full.push(r2);
                }
                RMod::new(r, vals, full)?
            }
            ModuleBody::Quotient { module, by } => {
                let m = self.module(&module)?;
                let gens = by
                    .iter()
                    .map(|(o, x)| {
                        let a = object(m.base(), o)?;
                        check_elem(m.value(a), x, "quotient generator")?;
                        Ok((a, x.clone()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                (*submodule_generated(m, &gens)?.quotient()?.0).clone()
            }
            ModuleBody::Sum(names) => {
                let parts = names
                    .iter()
                    .map(|n| self.module(n).cloned())
                    .collect::<Result<Vec<_>>>()?;
                if parts.is_empty() {
                    return invalid("empty direct sum");
                }
                (*direct_sum(&parts)?.module).clone()
            }
            ModuleBody::Restrict { functor, module } => restrict_scalars(
                lookup(&self.functors, "functor", &functor)?,
                self.module(&module)?,
            )?,
            ModuleBody::Extend { functor, module } => {
                let bc = BaseChange::new(lookup(&self.functors, "functor", &functor)?)?;
                (*bc.extend(self.module(&module)?)?.module).clone()
            }
        })
    }

    fn build_rep(&self, name: &str, b: RepresentationBody) -> Result<Representation> {
        let ix = lookup(&self.categories, "category", &b.category)?.clone();
        if b.rings.len() != ix.n() {
            return invalid("representation needs one ring per object");
        }
        let rings = b
            .rings
            .iter()
            .map(|r| self.ringoid(r).cloned())
            .collect::<Result<Vec<_>>>()?;
        for m in b.functors.keys() {
            cat_morphism(&ix, m)?;
        }
        let functors = (0..ix.m())
            .map(|al| match b.functors.get(&ix.morphisms[al].0) {
                Some(f) => Ok(lookup(&self.functors, "functor", f)?.clone()),
                None if ix.is_identity(al) => Ok(AddFunctor::identity(&rings[ix.src(al)])),
                None => invalid(format!("no functor for morphism '{}'", ix.morphisms[al].0)),
            })
            .collect::<Result<Vec<_>>>()?;
        let strict = Representation::strict(name, ix.clone(), rings.clone(), functors.clone())?;
        let mut rep = strict;
        if let Some(t) = &b.twist {
            let units = (0..ix.m())
                .map(|al| match t.get(&ix.morphisms[al].0) {
                    Some(u) => Ok(u.clone()),
                    None => Ok(rings[ix.tgt(al)].id(0).clone()),
                })
                .collect::<Result<Vec<_>>>()?;
            for k in t.keys() {
                cat_morphism(&ix, k)?;
            }
            rep = rep.twisted(&units)?;
            rep.name = name.to_string();
        }
        if b.delta.is_some() || b.mu.is_some() {
            let mut delta: Vec<Vec<Elem>> = (0..ix.n())
                .map(|c| (0..rings[c].n()).map(|a| rep.delta(c, a).clone()).collect())
                .collect();
            let m = ix.m();
            let mut mu: Vec<Vec<Option<Vec<Elem>>>> = vec![vec![None; m]; m];
            for (bb, a) in ix.composable_pairs() {
                mu[bb][a] = Some(
                    (0..functors[a].src.n())
                        .map(|x| rep.mu(bb, a, x).clone())
                        .collect(),
                );
            }
            for (c, comps) in b.delta.iter().flatten() {
                delta[cat_object(&ix, c)?] = comps.clone();
            }
            for e in b.mu.iter().flatten() {
                let (bb, a) = (cat_morphism(&ix, &e.outer)?, cat_morphism(&ix, &e.inner)?);
                if ix.compose(bb, a).is_none() {
                    return invalid(format!("'{}' and '{}' do not compose", e.outer, e.inner));
                }
                mu[bb][a] = Some(e.components.clone());
            }
            rep = Representation::new(name, ix, rings, functors, delta, mu)?;
        }
        Ok(rep)
    }

    fn build_diag(&self, b: DiagBody) -> Result<DiagModule> {
        Ok(match b {
            DiagBody::Zero { representation } => {
                DiagModule::zero(lookup(&self.reps, "representation", &representation)?)
            }
            DiagBody::Regular { representation } => {
                let rep = lookup(&self.reps, "representation", &representation)?;
                let ix = &rep.index;
                if rep.rings().iter().any(|r| !r.is_ring()) {
                    return invalid("regular module needs a representation by rings");
                }
                let parts = (0..ix.n())
                    .map(|c| RMod::representable(rep.ring(c), 0).map(Arc::new))
                    .collect::<Result<Vec<_>>>()?;
                regular_module(rep, parts)?
            }
            DiagBody::ExtZero {
                representation,
                object: o,
                module,
            } => {
                let rep = lookup(&self.reps, "representation", &representation)?;
                let c = cat_object(&rep.index, &o)?;
                (*ext_zero(rep, c, self.module(&module)?)?.module).clone()
            }
            DiagBody::Explicit {
                representation,
                parts,
                maps,
            } => {
                let rep = lookup(&self.reps, "representation", &representation)?;
                let ix = &rep.index;
                if parts.len() != ix.n() {
                    return invalid("diagram module needs one part per object");
                }
                let parts = parts
                    .iter()
                    .map(|p| self.module(p).cloned())
                    .collect::<Result<Vec<_>>>()?;
                for k in maps.keys() {
                    cat_morphism(ix, k)?;
                }
                let pulled = (0..ix.m())
                    .map(|al| restrict_scalars(rep.functor(al), &parts[ix.tgt(al)]))
                    .collect::<Result<Vec<_>>>()?;
                DiagModule::from_fn(rep, parts.clone(), |al, a| {
                    let src = parts[ix.src(al)].value(a);
                    let tgt = pulled[al].value(a);
                    match maps.get(&ix.morphisms[al].0) {
                        Some(per_obj) => {
                            let imgs = per_obj.get(a).ok_or_else(|| {
                                AlgError::Invalid(format!(
                                    "morphism '{}' lacks a component at object {a}",
                                    ix.morphisms[al].0
                                ))
                            })?;
                            hom_from(src, tgt, imgs, "structural map")
                        }
                        None if ix.is_identity(al) && src == tgt => Ok(AbHom::identity(src)),
                        None => invalid(format!(
                            "no structural map for morphism '{}'",
                            ix.morphisms[al].0
                        )),
                    }
                })?
            }
        })
    }
}
