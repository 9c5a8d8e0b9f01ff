//! One pass/fail line per acceptance criterion, computed over the bundled corpus.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::collections::BTreeSet;
use std::sync::Arc;

use itertools::Itertools;
use ringoids::abelian::{ab_hom, AbHom};
use ringoids::basechange::{adjunction, composition_iso, BaseChange};
use ringoids::cli::doc::Sequence;
use ringoids::cli::{parse_bundle, Ctx, Status, Store, Suite};
use ringoids::diagram::{
    diag_homs, diag_is_flat, ext_adjunction_check, ext_zero, is_cartesian, sigma_tau, DiagModHom,
    DiagModule, Representation,
};
use ringoids::fpcat::{
    build_rfp, diag_counit, diag_pure_exact, diag_yoneda, fp_skeleton, purity_via_yoneda,
    reconstruct, yoneda_exact, Rfp,
};
use ringoids::matring::{
    equiv_s, equiv_s_left, equiv_u, lattice_bijection, matrix_ring, purity_transfer, round_trip,
    tensor_compat_s, tensor_compat_u, unitalize,
};
use ringoids::module::{
    all_submodules, cyclic_module, hom_modules, same_base, yoneda_map, ModHom, RMod,
};
use ringoids::ringoid::{AddFunctor, Ringoid};
use ringoids::tensor::{
    is_flat, left_representable, mod_tensor, retraction, FlatMethod, SearchOptions,
};

const CORPUS: &str = include_str!("../corpus/corpus.json");
const FIXTURES: [(&str, &str); 3] = [
    (
        "corrupted-mu",
        include_str!("../corpus/fixtures/corrupted_mu.json"),
    ),
    (
        "broken-naturality",
        include_str!("../corpus/fixtures/broken_naturality.json"),
    ),
    (
        "non-unitary",
        include_str!("../corpus/fixtures/non_unitary.json"),
    ),
];
/// Largest product of hom-set sizes the brute-force oracles enumerate.
const BRUTE_LIMIT: u64 = 1 << 16;

fn load(text: &str) -> Store {
    Store::load(&parse_bundle(text).expect("bundle parses").documents).expect("bundle loads")
}

fn opts() -> SearchOptions {
    SearchOptions {
        generators: 2,
        ..SearchOptions::default()
    }
}

type Criterion = (&'static str, fn(&Store) -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(failures: &[String], detail: String) -> Outcome {
    match failures.first() {
        None => Outcome { pass: true, detail },
        Some(f) => Outcome {
            pass: false,
            detail: format!("{detail}; {} failures, first: {f}", failures.len()),
        },
    }
}

/// Right modules over `r`: those declared in the corpus plus every representable.
fn modules_over(store: &Store, r: &Arc<Ringoid>) -> Vec<(String, Arc<RMod>)> {
    let mut out: Vec<(String, Arc<RMod>)> = store
        .modules
        .iter()
        .filter(|(_, m)| same_base(m.base(), r))
        .map(|(n, m)| (n.clone(), m.clone()))
        .collect();
    for a in 0..r.n() {
        out.push((
            format!("H_{}", r.objects()[a]),
            Arc::new(RMod::representable(r, a).unwrap()),
        ));
    }
    out
}

/// Ringoids declared in the corpus, matrix rings excluded.
fn base_ringoids(store: &Store) -> Vec<(String, Arc<Ringoid>)> {
    store
        .ringoids
        .iter()
        .filter(|(n, _)| !store.idem.contains_key(*n))
        .map(|(n, r)| (n.clone(), r.clone()))
        .collect()
}

fn rep_name(store: &Store, m: &DiagModule) -> Option<String> {
    store
        .reps
        .iter()
        .find(|(_, r)| Arc::ptr_eq(r, &m.rep))
        .map(|(n, _)| n.clone())
}

/// Counts module maps by enumerating every tuple of group maps and keeping the natural ones.
fn brute_hom_count(m: &Arc<RMod>, n: &Arc<RMod>) -> Option<u64> {
    let homs: Vec<_> = (0..m.n())
        .map(|a| ab_hom(m.value(a), n.value(a)).unwrap())
        .collect();
    let total: u64 = homs.iter().map(|h| h.group().order()).product();
    if total > BRUTE_LIMIT {
        return None;
    }
    let lists: Vec<Vec<AbHom>> = homs.iter().map(|h| h.elements().collect()).collect();
    let count = lists
        .iter()
        .map(|l| l.iter())
        .multi_cartesian_product()
        .filter(|comps| {
            ModHom::new(
                m.clone(),
                n.clone(),
                comps.iter().map(|c| (*c).clone()).collect(),
            )
            .unwrap()
            .is_natural()
        })
        .count();
    Some(count as u64)
}

// Hom(H_a, M) ≅ M(a), H_a ⊗ N ≅ N(a), M ⊗ H_a^* ≅ M(a)
fn yoneda_and_tensor(store: &Store) -> Outcome {
    let mut fails = Vec::new();
    let (mut instances, mut brute) = (0, 0);
    for (rn, r) in base_ringoids(store) {
        let r_op = Arc::new(r.opposite());
        let rights = modules_over(store, &r);
        let mut lefts: Vec<(String, Arc<RMod>)> = (0..r.n())
            .map(|b| {
                (
                    format!("L_{b}"),
                    Arc::new(left_representable(&r_op, b).unwrap()),
                )
            })
            .collect();
        if r.is_ring() {
            let e = r.hom(0, 0).exponent();
            for k in (1..=e).filter(|k| e % k == 0) {
                if let Ok(n) = cyclic_module(&r_op, k) {
                    lefts.push((format!("Z/{k}"), Arc::new(n)));
                }
            }
        }
        for a in 0..r.n() {
            let h = Arc::new(RMod::representable(&r, a).unwrap());
            let dual = Arc::new(left_representable(&r_op, a).unwrap());
            for (mn, m) in &rights {
                instances += 1;
                let homs = hom_modules(&h, m).unwrap();
                let va = m.value(a);
                // evaluation at the identity is a bijection Hom(H_a, M) → M(a)
                let mut seen = BTreeSet::new();
                for x in va.elements() {
                    let f = yoneda_map(&h, m, a, &x).unwrap();
                    if !f.is_natural() || f.apply(a, r.id(a)) != x {
                        fails.push(format!("{rn}/{mn}: yoneda map at {x:?}"));
                    }
                    seen.insert(homs.from_modhom(&f).unwrap());
                }
                if homs.order() != va.order() || seen.len() as u64 != va.order() {
                    fails.push(format!(
                        "{rn}/{mn}: |Hom(H_a,M)| = {} vs |M(a)| = {}",
                        homs.order(),
                        va.order()
                    ));
                }
                if let Some(c) = brute_hom_count(&h, m) {
                    brute += 1;
                    if c != va.order() {
                        fails.push(format!("{rn}/{mn}: brute-force hom count {c}"));
                    }
                }
                // x ↦ x ⊗ id_a
                let t = mod_tensor(m, &dual).unwrap();
                let imgs: Vec<_> = va.gens().iter().map(|x| t.pair(a, x, r.id(a))).collect();
                let iso = AbHom::from_images(va.clone(), t.group().clone(), &imgs).unwrap();
                if !iso.is_iso() {
                    fails.push(format!("{rn}/{mn}: M(a) → M ⊗ H_a^* not bijective"));
                }
            }
            for (nn, n) in &lefts {
                instances += 1;
                // y ↦ id_a ⊗ y
                let t = mod_tensor(&h, n).unwrap();
                let na = n.value(a);
                let imgs: Vec<_> = na.gens().iter().map(|y| t.pair(a, r.id(a), y)).collect();
                let iso = AbHom::from_images(na.clone(), t.group().clone(), &imgs).unwrap();
                if !iso.is_iso() {
                    fails.push(format!("{rn}/{nn}: N(a) → H_a ⊗ N not bijective"));
                }
            }
        }
    }
    outcome(
        &fails,
        format!("{instances} instances, {brute} brute-force hom counts"),
    )
}

// triangle identities, hom-set bijection, composition isomorphism
fn adjunctions(store: &Store) -> Outcome {
    let mut fails = Vec::new();
    let (mut triangles, mut bijections, mut compositions) = (0, 0, 0);
    let functors: Vec<(String, AddFunctor)> = store
        .functors
        .iter()
        .map(|(n, f)| (n.clone(), f.clone()))
        .collect();
    for (fname, phi) in &functors {
        let bc = BaseChange::new(phi).unwrap();
        let ms = modules_over(store, &phi.src);
        let ns = modules_over(store, &phi.tgt);
        for (mn, m) in &ms {
            for (nn, n) in &ns {
                triangles += 1;
                if !adjunction(&bc, m, n).unwrap().holds() {
                    fails.push(format!("{fname}: triangles at {mn}, {nn}"));
                }
                // f ↦ ε_N ∘ φ_!(f), enumerated
                let ext_m = bc.extend(m).unwrap();
                let rn = bc.restrict(n).unwrap();
                let ext_rn = bc.extend(&rn).unwrap();
                let eps = bc.counit(n, &ext_rn).unwrap();
                let right = hom_modules(m, &rn).unwrap();
                let left = hom_modules(&ext_m.module, n).unwrap();
                let mut image = BTreeSet::new();
                for f in right.elements() {
                    let g = eps.compose(&bc.extend_hom(&f, &ext_m, &ext_rn).unwrap());
                    image.insert(left.from_modhom(&g).expect("transpose is a module map"));
                }
                bijections += 1;
                if left.order() != right.order() || image.len() as u64 != left.order() {
                    fails.push(format!(
                        "{fname}: |Hom(φ_!{mn},{nn})| = {}, |Hom({mn},φ*{nn})| = {}, image {}",
                        left.order(),
                        right.order(),
                        image.len()
                    ));
                }
            }
        }
    }
    for ((f1, phi), (f2, psi)) in functors.iter().cartesian_product(functors.iter()) {
        if !same_base(&phi.tgt, &psi.src) {
            continue;
        }
        let (b1, b2) = (BaseChange::new(phi).unwrap(), BaseChange::new(psi).unwrap());
        let comp = BaseChange::new(&phi.then(psi)).unwrap();
        for (mn, m) in modules_over(store, &phi.src) {
            compositions += 1;
            let c = composition_iso(&b1, &b2, &comp, &m).unwrap();
            if !c.is_iso() || !c.is_natural() {
                fails.push(format!("{f2}∘{f1}: composition at {mn}"));
            }
        }
    }
    outcome(&fails, format!("{triangles} triangle pairs, {bijections} hom-set bijections, {compositions} composition maps"))
}

// exactness, fiber and summand verdicts coincide
fn flatness_agreement(store: &Store) -> Outcome {
    let mut fails = Vec::new();
    let (mut total, mut flat) = (0, 0);
    let mut noncommutative = 0;
    for (rn, r) in base_ringoids(store) {
        let mut ms = modules_over(store, &r);
        // quotients of every representable add non-projective test modules
        for a in 0..r.n() {
            let h = Arc::new(RMod::representable(&r, a).unwrap());
            for (i, s) in all_submodules(&h, 4096).unwrap().iter().enumerate() {
                let (q, _) = s.incl.cokernel().unwrap();
                ms.push((format!("H_{a}/#{i}"), q));
            }
        }
        for (mn, m) in &ms {
            let v = is_flat(m, FlatMethod::All, &opts()).unwrap();
            total += 1;
            flat += v.holds as usize;
            if r.noncommuting_pair().is_some() {
                noncommutative += 1;
            }
            let decided = v.outcomes.iter().filter(|o| o.verdict.is_some()).count();
            if !v.agree || decided != 3 {
                fails.push(format!("{rn}/{mn}: methods disagree or undecided"));
            }
        }
    }
    outcome(&fails, format!("{total} modules ({flat} flat), {noncommutative} over noncommutative ringoids, 3 methods each"))
}

// tensor purity equals split-ness; agreement with skeleton-level exactness
fn purity_agreement(store: &Store) -> Outcome {
    let mut fails = Vec::new();
    let (mut inclusions, mut pure, mut yon) = (0, 0, 0);
    for (rn, r) in base_ringoids(store) {
        let sk = r.is_ring().then(|| fp_skeleton(&r, 2, 4096).unwrap());
        for (mn, m) in store
            .modules
            .iter()
            .filter(|(_, m)| same_base(m.base(), &r))
        {
            for s in all_submodules(m, 4096).unwrap() {
                inclusions += 1;
                let v = ringoids::tensor::is_pure(&s.incl, &opts()).unwrap();
                pure += v.holds as usize;
                let split = retraction(&s.incl).unwrap().is_some();
                if v.holds != split || !v.agree {
                    fails.push(format!(
                        "{rn}/{mn}: tensor purity {} vs split {split}",
                        v.holds
                    ));
                }
                if let Some(sk) = &sk {
                    yon += 1;
                    let y = purity_via_yoneda(&s.incl, sk, &opts()).unwrap();
                    if y.yoneda != v.holds {
                        fails.push(format!(
                            "{rn}/{mn}: skeleton exactness {} vs purity {}",
                            y.yoneda, v.holds
                        ));
                    }
                }
            }
        }
    }
    let mut diag = 0;
    for (sn, seq) in &store.sequences {
        if let Sequence::Diag(sub) = seq {
            diag += 1;
            let p = diag_pure_exact(sub, &opts()).unwrap();
            let rfp = build_rfp(&sub.ambient().rep, 2, 4096).unwrap();
            let y = yoneda_exact(sub, &rfp).unwrap();
            if p.agree == Some(false) || y != p.holds {
                fails.push(format!(
                    "{sn}: objectwise purity {} vs skeleton exactness {y}",
                    p.holds
                ));
            }
        }
    }
    outcome(
        &fails,
        format!("{inclusions} inclusions ({pure} pure), {yon} skeleton comparisons, {diag} diagram sequences"),
    )
}

// module and representation axioms; compatibility squares
fn coherence(store: &Store) -> Outcome {
    let mut fails = Vec::new();
    let mut reps: Vec<(String, Arc<Representation>)> = store
        .reps
        .iter()
        .map(|(n, r)| (n.clone(), r.clone()))
        .collect();
    let mut checked = 0;
    for (n, r) in store.reps.iter().filter(|(_, r)| r.is_strict()) {
        let rfp = build_rfp(r, 2, 4096).unwrap();
        for (dn, d) in store.diags.iter().filter(|(_, d)| Arc::ptr_eq(&d.rep, r)) {
            checked += 1;
            if !diag_yoneda(d, &rfp).unwrap().module.validate().all_pass() {
                fails.push(format!("{n}: skeleton image of {dn}"));
            }
        }
        reps.push((format!("{n}_fp"), rfp.rep.clone()));
    }
    for (n, r) in &reps {
        checked += 1;
        if !r.validate().all_pass() {
            fails.push(format!("{n}: representation axioms"));
        }
    }
    for (n, d) in &store.diags {
        checked += 1;
        if !d.validate().all_pass() {
            fails.push(format!("{n}: module axioms"));
        }
    }
    let mut squares = 0;
    for (n, r) in &reps {
        let ix = &r.index;
        for (b, a) in ix.composable_pairs() {
            let ms = modules_over(store, r.ring(ix.src(a)));
            let ns = modules_over(store, r.ring(ix.tgt(b)));
            for ((mn, m), (nn, nmod)) in ms.iter().cartesian_product(ns.iter()) {
                squares += 1;
                if !sigma_tau(r, b, a, m, nmod).unwrap().holds() {
                    fails.push(format!(
                        "{n}: squares at ({}, {}) with {mn}, {nn}",
                        ix.morphisms[b].0, ix.morphisms[a].0
                    ));
                }
            }
        }
    }
    let nonstrict = reps.iter().filter(|(_, r)| !r.is_strict()).count();
    outcome(&fails, format!("{checked} axiom checks, {nonstrict} non-strict representations, {squares} square pairs"))
}

/// Counts morphisms of diagram modules by enumerating tuples of objectwise module maps.
fn brute_diag_hom_count(m: &Arc<DiagModule>, n: &Arc<DiagModule>) -> Option<u64> {
    let sets: Vec<_> = (0..m.parts().len())
        .map(|c| hom_modules(m.part(c), n.part(c)).unwrap())
        .collect();
    let total: u64 = sets.iter().map(|h| h.order()).product();
    if total > BRUTE_LIMIT {
        return None;
    }
    let lists: Vec<Vec<ModHom>> = sets.iter().map(|h| h.elements().collect()).collect();
    let count = lists
        .iter()
        .map(|l| l.iter())
        .multi_cartesian_product()
        .filter(|comps| {
            DiagModHom::new(
                m.clone(),
                n.clone(),
                comps.iter().map(|c| (*c).clone()).collect(),
            )
            .unwrap()
            .is_natural()
        })
        .count();
    Some(count as u64)
}

// Hom(ext_c N, M) ≅ Hom(N, M_c) and |Hom(ext_c H_a, M)| = |M_c(a)|
fn ext_by_zero(store: &Store) -> Outcome {
    let mut fails = Vec::new();
    let (mut instances, mut formula, mut brute) = (0, 0, 0);
    for (rn, rep) in store.reps.iter().filter(|(_, r)| r.index.is_poset()) {
        let ix = &rep.index;
        for c in 0..ix.n() {
            let ns = modules_over(store, rep.ring(c));
            for (dn, m) in store.diags.iter().filter(|(_, d)| Arc::ptr_eq(&d.rep, rep)) {
                for (nn, n) in &ns {
                    instances += 1;
                    let chk = ext_adjunction_check(rep, c, n, m).unwrap();
                    if !chk.holds() {
                        fails.push(format!(
                            "{rn}/{dn}: adjunction at {} with {nn}",
                            ix.objects[c]
                        ));
                    }
                    let ext = ext_zero(rep, c, n).unwrap();
                    if let Some(k) = brute_diag_hom_count(&ext.module, m) {
                        brute += 1;
                        if k != chk.ext_hom_order {
                            fails.push(format!(
                                "{rn}/{dn}: brute-force count {k} vs {}",
                                chk.ext_hom_order
                            ));
                        }
                    }
                }
                let rc = rep.ring(c);
                for a in 0..rc.n() {
                    formula += 1;
                    let h = Arc::new(RMod::representable(rc, a).unwrap());
                    let ext = ext_zero(rep, c, &h).unwrap();
                    let k = diag_homs(&ext.module, m).unwrap().order();
                    if k != m.part(c).value(a).order() {
                        fails.push(format!("{rn}/{dn}: |Hom(ext H_a, M)| = {k}"));
                    }
                }
            }
        }
    }
    outcome(&fails, format!("{instances} adjunction instances, {brute} brute-force counts, {formula} cardinality formulas"))
}

// global flatness equals componentwise flatness on poset, left flat representations
fn diagram_flatness(store: &Store) -> Outcome {
    let mut fails = Vec::new();
    let (mut checked, mut flat, mut not_flat) = (0, 0, 0);
    for (rn, rep) in &store.reps {
        if !rep.index.is_poset() || !rep.flatness(&opts()).unwrap().left {
            continue;
        }
        for (dn, m) in store.diags.iter().filter(|(_, d)| Arc::ptr_eq(&d.rep, rep)) {
            checked += 1;
            let f = diag_is_flat(m, &opts()).unwrap();
            match (f.global, f.agree) {
                (Some(g), Some(true)) => {
                    if g {
                        flat += 1
                    } else {
                        not_flat += 1
                    }
                }
                _ => fails.push(format!(
                    "{rn}/{dn}: global {:?} vs componentwise {}",
                    f.global, f.componentwise_flat
                )),
            }
        }
    }
    if flat == 0 || not_flat == 0 {
        fails.push(format!(
            "only one direction observed ({flat} flat, {not_flat} not flat)"
        ));
    }
    outcome(
        &fails,
        format!("{checked} modules ({flat} flat, {not_flat} not flat)"),
    )
}

// round trip through the skeleton representation; cartesian iff image cartesian
fn representation_theorem(store: &Store) -> Outcome {
    let mut fails = Vec::new();
    let (mut round_trips, mut cartesian) = (0, 0);
    let mut rfps: Vec<(String, Rfp)> = Vec::new();
    for (dn, m) in &store.diags {
        if !m.rep.is_strict() {
            continue;
        }
        let rn = rep_name(store, m).expect("declared representation");
        if !rfps.iter().any(|(n, _)| *n == rn) {
            rfps.push((rn.clone(), build_rfp(&m.rep, 2, 4096).unwrap()));
        }
        let rfp = &rfps.iter().find(|(n, _)| *n == rn).unwrap().1;
        round_trips += 1;
        let y = diag_yoneda(m, rfp).unwrap();
        let recon = reconstruct(&y.module, rfp, &opts()).unwrap();
        let counit = diag_counit(&recon.module, &y, m, rfp).unwrap();
        if !recon.is_iso() || !counit.is_iso() || !counit.is_natural() {
            fails.push(format!("{dn}: round trip"));
        }
        let (cm, cy) = (
            is_cartesian(m).unwrap().holds,
            is_cartesian(&y.module).unwrap().holds,
        );
        cartesian += cm as usize;
        if cm != cy {
            fails.push(format!("{dn}: cartesian {cm} vs image {cy}"));
        }
    }
    outcome(
        &fails,
        format!("{round_trips} round trips, {cartesian} cartesian"),
    )
}

// matrix ring and unitalization equivalences
fn matrix_ring_suite(store: &Store) -> Outcome {
    let mut fails = Vec::new();
    let (mut modules, mut tensors, mut purity) = (0, 0, 0);
    for (rn, c) in base_ringoids(store) {
        let rc = matrix_ring(&c).unwrap();
        let u = unitalize(&rc.ring).unwrap();
        if !rc.validate().all_pass() || !u.validate().all_pass() {
            fails.push(format!("{rn}: ring axioms"));
        }
        let rights = modules_over(store, &c);
        for (mn, m) in &rights {
            modules += 1;
            if !round_trip(m, &rc).unwrap().holds() {
                fails.push(format!("{rn}/{mn}: S/T round trip"));
            }
            let s = equiv_s(m, &rc).unwrap();
            let um = equiv_u(&s.module, &u).unwrap();
            if um.cardinality() != s.module.cardinality() || !um.validate().all_pass() {
                fails.push(format!("{rn}/{mn}: |M| vs |U(M)|"));
            }
            if !lattice_bijection(&s.module, &u, 4096).unwrap().holds() {
                fails.push(format!("{rn}/{mn}: submodule lattices"));
            }
        }
        let c_op = Arc::new(c.opposite());
        let lefts: Vec<Arc<RMod>> = (0..c.n())
            .map(|b| Arc::new(left_representable(&c_op, b).unwrap()))
            .collect();
        for ((mn, m), n) in rights.iter().cartesian_product(lefts.iter()) {
            tensors += 1;
            let ts = tensor_compat_s(m, n, &rc).unwrap();
            let (sm, sn) = (equiv_s(m, &rc).unwrap(), equiv_s_left(n, &rc).unwrap());
            let tu = tensor_compat_u(&sm.module, &sn.module, &u).unwrap();
            if !ts.bijective || !tu.bijective {
                fails.push(format!("{rn}/{mn}: tensor comparisons"));
            }
        }
        let po = SearchOptions {
            generators: 1,
            ..opts()
        };
        for (mn, m) in store
            .modules
            .iter()
            .filter(|(_, m)| same_base(m.base(), &c))
        {
            for s in all_submodules(m, 4096).unwrap() {
                purity += 1;
                if !purity_transfer(&s.incl, &rc, &u, &po).unwrap().agree() {
                    fails.push(format!("{rn}/{mn}: purity transfer"));
                }
            }
        }
    }
    outcome(
        &fails,
        format!("{modules} modules, {tensors} tensor pairs, {purity} purity transfers"),
    )
}

// every corrupted fixture is rejected with a witness
fn negative_controls() -> Outcome {
    let mut fails = Vec::new();
    for (name, text) in FIXTURES {
        let store = load(text);
        let mut ctx = Ctx::new(&store, opts(), FlatMethod::All, false);
        ctx.run(Suite::Validate);
        ctx.run(Suite::MatrixRing);
        let rejected = ctx
            .entries
            .iter()
            .filter(|e| e.status == Status::Fail)
            .collect::<Vec<_>>();
        let witnessed = rejected
            .iter()
            .any(|e| e.details.to_string().contains("witness"));
        if rejected.is_empty() || !witnessed {
            fails.push(format!("{name}: accepted"));
        }
    }
    outcome(&fails, format!("{} fixtures", FIXTURES.len()))
}

#[test]
fn acceptance() {
    let store = load(CORPUS);
    let criteria: [Criterion; 10] = [
        ("yoneda and tensor identities", yoneda_and_tensor),
        ("change-of-base adjunction", adjunctions),
        ("flatness oracle agreement", flatness_agreement),
        ("purity oracle agreement", purity_agreement),
        ("coherence", coherence),
        ("extension by zero", ext_by_zero),
        ("diagram flatness", diagram_flatness),
        ("representation theorem", representation_theorem),
        ("matrix ring and unitalization", matrix_ring_suite),
        ("negative controls", |_| negative_controls()),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f(&store);
        println!(
            "criterion {:>2} {}: {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
