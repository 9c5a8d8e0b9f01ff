//! Finite preadditive categories and additive functors.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::abelian::{ab_normal_form, ab_tensor, AbHom, AbTensor, DirectSum, Elem, FinAb};
use crate::check::Validation;
use crate::diagram::SmallCat;
use crate::error::{invalid, Result};

/// Exhaustive checks run when the number of tuples stays below this bound.
pub const EXHAUSTIVE_BOUND: u64 = 1 << 21;

#[derive(Clone, Debug, PartialEq)]
pub enum Compose {
    /// `tab[(a,b,c)][i][j] = g_i ∘ f_j` for generators `g_i` of `hom(b,c)` and `f_j` of `hom(a,b)`.
    Bilinear(Vec<Vec<Vec<Elem>>>),
    /// `tab[(a,b,c)][idx(g) * |hom(a,b)| + idx(f)] = idx(g ∘ f)`.
    Table(Vec<Vec<u32>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ringoid {
    pub name: String,
    objects: Vec<String>,
    homs: Vec<Vec<FinAb>>,
    ids: Vec<Elem>,
    compose: Compose,
}

impl Ringoid {
    pub fn new(
        name: impl Into<String>,
        objects: Vec<String>,
        homs: Vec<Vec<FinAb>>,
        ids: Vec<Elem>,
        compose: Compose,
    ) -> Result<Self> {
        let n = objects.len();
        if homs.len() != n || homs.iter().any(|r| r.len() != n) || ids.len() != n {
            return invalid("ringoid data has inconsistent object count");
        }
        let want = n * n * n;
        let ok = match &compose {
            Compose::Bilinear(t) => t.len() == want,
            Compose::Table(t) => t.len() == want,
        };
        if !ok {
            return invalid("composition data has wrong size");
        }
        for (a, id) in ids.iter().enumerate() {
            if !homs[a][a].contains(id) {
                return invalid(format!(
                    "identity of {} is not an element of its endomorphism group",
                    objects[a]
                ));
            }
        }
        Ok(Ringoid {
            name: name.into(),
            objects,
            homs,
            ids,
            compose,
        })
    }

    pub fn n(&self) -> usize {
        self.objects.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn hom(&self, a: usize, b: usize) -> &FinAb {
        &self.homs[a][b]
    }

    pub fn id(&self, a: usize) -> &Elem {
        &self.ids[a]
    }

    pub fn compose_data(&self) -> &Compose {
        &self.compose
    }

    fn idx3(&self, a: usize, b: usize, c: usize) -> usize {
        (a * self.n() + b) * self.n() + c
    }

    /// `g ∘ f` for `f ∈ hom(a,b)`, `g ∈ hom(b,c)`.
    pub fn compose(&self, a: usize, b: usize, c: usize, g: &[i64], f: &[i64]) -> Elem {
        let tgt = &self.homs[a][c];
        match &self.compose {
            Compose::Bilinear(t) => {
                let tab = &t[self.idx3(a, b, c)];
                let mut acc = tgt.zero();
                for (i, gi) in g.iter().enumerate() {
                    if *gi == 0 {
                        continue;
                    }
                    for (j, fj) in f.iter().enumerate() {
                        if *fj != 0 {
                            tgt.add_assign(&mut acc, &tgt.scale(gi * fj, &tab[i][j]));
                        }
                    }
                }
                acc
            }
            Compose::Table(t) => {
                let tab = &t[self.idx3(a, b, c)];
                let nf = self.homs[a][b].order() as usize;
                let k = self.homs[b][c].index_of(g) * nf + self.homs[a][b].index_of(f);
                tgt.element_at(tab[k] as usize)
            }
        }
    }

    /// The two-sided inverse of `x ∈ hom(a,b)`, if `x` is invertible.
    pub fn inverse_of(&self, a: usize, b: usize, x: &[i64]) -> Option<Elem> {
        let back = &self.homs[b][a];
        let imgs: Vec<Elem> = back
            .gens()
            .iter()
            .map(|y| self.compose(a, b, a, y, x))
            .collect();
        let left = AbHom::from_images(back.clone(), self.homs[a][a].clone(), &imgs).ok()?;
        let y = left.solve(&self.ids[a])?;
        (self.compose(b, a, b, x, &y) == self.ids[b]).then_some(y)
    }

    /// Builds a bilinear composition from any composition rule on generators.
    pub fn bilinear_from(
        n: usize,
        homs: &[Vec<FinAb>],
        mut rule: impl FnMut(usize, usize, usize, usize, usize) -> Elem,
    ) -> Compose {
        let mut tab = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for (b, from_b) in homs.iter().enumerate().take(n) {
                for (c, hbc) in from_b.iter().enumerate().take(n) {
                    let rows = (0..hbc.rank())
                        .map(|i| {
                            (0..homs[a][b].rank())
                                .map(|j| rule(a, b, c, i, j))
                                .collect()
                        })
                        .collect();
                    tab.push(rows);
                }
            }
        }
        Compose::Bilinear(tab)
    }

    /// Converts to an explicit element table; used for small fixtures.
    pub fn to_table(&self) -> Ringoid {
        let n = self.n();
        let mut tab = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut row = Vec::new();
                    for g in self.homs[b][c].elements() {
                        for f in self.homs[a][b].elements() {
                            row.push(
                                self.homs[a][c].index_of(&self.compose(a, b, c, &g, &f)) as u32
                            );
                        }
                    }
                    tab.push(row);
                }
            }
        }
        Ringoid {
            compose: Compose::Table(tab),
            ..self.clone()
        }
    }

    /// One-object ringoid from an additive group, products of generators and a unit.
    pub fn ring(
        name: impl Into<String>,
        add: FinAb,
        gen_mul: Vec<Vec<Elem>>,
        one: Elem,
    ) -> Result<Self> {
        Ringoid::new(
            name,
            vec!["*".into()],
            vec![vec![add]],
            vec![one],
            Compose::Bilinear(vec![gen_mul]),
        )
    }

    pub fn is_ring(&self) -> bool {
        self.n() == 1
    }

    /// Product in a one-object ringoid.
    pub fn mul(&self, x: &[i64], y: &[i64]) -> Elem {
        self.compose(0, 0, 0, x, y)
    }

    pub fn opposite(&self) -> Ringoid {
        let n = self.n();
        let homs: Vec<Vec<FinAb>> = (0..n)
            .map(|a| (0..n).map(|b| self.homs[b][a].clone()).collect())
            .collect();
        let compose = match &self.compose {
            Compose::Bilinear(t) => {
                let mut tab = Vec::with_capacity(n * n * n);
                for a in 0..n {
                    for b in 0..n {
                        for c in 0..n {
                            // op: g ∈ hom(c,b), f ∈ hom(b,a); g ∘op f = f ∘ g ∈ hom(c,a)
                            let src = &t[self.idx3(c, b, a)];
                            let rows = (0..homs[b][c].rank())
                                .map(|i| {
                                    (0..homs[a][b].rank()).map(|j| src[j][i].clone()).collect()
                                })
                                .collect();
                            tab.push(rows);
                        }
                    }
                }
                Compose::Bilinear(tab)
            }
            Compose::Table(t) => {
                let mut tab = Vec::with_capacity(n * n * n);
                for a in 0..n {
                    for b in 0..n {
                        for c in 0..n {
                            let src = &t[self.idx3(c, b, a)];
                            let ng = homs[b][c].order() as usize;
                            let nf = homs[a][b].order() as usize;
                            let mut row = vec![0u32; ng * nf];
                            for gi in 0..ng {
                                for fi in 0..nf {
                                    row[gi * nf + fi] = src[fi * ng + gi];
                                }
                            }
                            tab.push(row);
                        }
                    }
                }
                Compose::Table(tab)
            }
        };
        let name = match self.name.strip_suffix("^op") {
            Some(base) => base.to_string(),
            None => format!("{}^op", self.name),
        };
        Ringoid {
            name,
            objects: self.objects.clone(),
            homs,
            ids: self.ids.clone(),
            compose,
        }
    }

    /// Whether the two ringoids have identical objects, homs, identities and composition on all elements.
    pub fn same_table(&self, other: &Ringoid) -> Option<(usize, usize, usize, Elem, Elem)> {
        assert!(self.n() == other.n() && self.homs == other.homs);
        let n = self.n();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for g in self.homs[b][c].elements() {
                        for f in self.homs[a][b].elements() {
                            if self.compose(a, b, c, &g, &f) != other.compose(a, b, c, &g, &f) {
                                return Some((a, b, c, g, f));
                            }
                        }
                    }
                }
            }
        }
        None
    }

    /// A pair of elements of a one-object ringoid with `xy ≠ yx`.
    pub fn noncommuting_pair(&self) -> Option<(Elem, Elem)> {
        let r = self.hom(0, 0);
        for x in r.elements() {
            for y in r.elements() {
                if self.mul(&x, &y) != self.mul(&y, &x) {
                    return Some((x, y));
                }
            }
        }
        None
    }

    fn hom_sample(&self, a: usize, b: usize, exhaustive: bool) -> Vec<Elem> {
        if exhaustive {
            self.homs[a][b].elements().collect()
        } else {
            self.homs[a][b].gens()
        }
    }

    fn triples(&self) -> impl Iterator<Item = (usize, usize, usize)> {
        let n = self.n();
        (0..n).flat_map(move |a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c))))
    }

    /// Checks biadditivity, associativity and units; never fails, reports witnesses.
    pub fn validate(&self) -> Validation {
        let mut v = Validation::new(format!("ringoid {}", self.name));
        let n = self.n();
        let size = |a: usize, b: usize| self.homs[a][b].order();
        let bilinear = matches!(self.compose, Compose::Bilinear(_));

        // biadditivity
        let mut wit = None;
        if let Compose::Bilinear(t) = &self.compose {
            'outer: for (a, b, c) in self.triples() {
                let tab = &t[self.idx3(a, b, c)];
                let hc = &self.homs[a][c];
                for (i, gi) in self.homs[b][c].factors().iter().enumerate() {
                    for (j, fj) in self.homs[a][b].factors().iter().enumerate() {
                        if !FinAb::is_zero(&hc.scale(*gi, &tab[i][j]))
                            || !FinAb::is_zero(&hc.scale(*fj, &tab[i][j]))
                        {
                            wit = Some(json!({"objects": [a, b, c], "generators": [i, j]}));
                            break 'outer;
                        }
                    }
                }
            }
        } else {
            'outer2: for (a, b, c) in self.triples() {
                let ex = size(b, c) * size(b, c) * size(a, b) <= EXHAUSTIVE_BOUND
                    && size(a, b) * size(a, b) * size(b, c) <= EXHAUSTIVE_BOUND;
                let gs = self.hom_sample(b, c, ex);
                let fs = self.hom_sample(a, b, ex);
                let (hb, ha) = (&self.homs[b][c], &self.homs[a][b]);
                let hc = &self.homs[a][c];
                for g1 in &gs {
                    for g2 in &gs {
                        for f in &fs {
                            let lhs = self.compose(a, b, c, &hb.add(g1, g2), f);
                            let rhs = hc
                                .add(&self.compose(a, b, c, g1, f), &self.compose(a, b, c, g2, f));
                            if lhs != rhs {
                                wit = Some(
                                    json!({"objects": [a, b, c], "left": [g1, g2], "right": f}),
                                );
                                break 'outer2;
                            }
                        }
                    }
                }
                for f1 in &fs {
                    for f2 in &fs {
                        for g in &gs {
                            let lhs = self.compose(a, b, c, g, &ha.add(f1, f2));
                            let rhs = hc
                                .add(&self.compose(a, b, c, g, f1), &self.compose(a, b, c, g, f2));
                            if lhs != rhs {
                                wit = Some(
                                    json!({"objects": [a, b, c], "left": g, "right": [f1, f2]}),
                                );
                                break 'outer2;
                            }
                        }
                    }
                }
            }
        }
        v.record("biadditive", wit);

        // associativity: generators suffice for a bilinear rule
        let mut wit = None;
        'assoc: for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let total = size(a, b) * size(b, c) * size(c, d);
                        let ex = !bilinear && total <= EXHAUSTIVE_BOUND;
                        let fs = self.hom_sample(a, b, ex);
                        let gs = self.hom_sample(b, c, ex);
                        let hs = self.hom_sample(c, d, ex);
                        for h in &hs {
                            for g in &gs {
                                let hg = self.compose(b, c, d, h, g);
                                for f in &fs {
                                    let gf = self.compose(a, b, c, g, f);
                                    let l = self.compose(a, b, d, &hg, f);
                                    let r = self.compose(a, c, d, h, &gf);
                                    if l != r {
                                        wit = Some(json!({
                                            "objects": [&self.objects[a], &self.objects[b], &self.objects[c], &self.objects[d]],
                                            "h": h, "g": g, "f": f, "(hg)f": l, "h(gf)": r
                                        }));
                                        break 'assoc;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        v.record("associative", wit);

        let mut wit = None;
        'unit: for a in 0..n {
            for b in 0..n {
                let ex = !bilinear && size(a, b) <= EXHAUSTIVE_BOUND;
                for f in self.hom_sample(a, b, ex) {
                    let l = self.compose(a, b, b, &self.ids[b], &f);
                    let r = self.compose(a, a, b, &f, &self.ids[a]);
                    if l != f || r != f {
                        wit = Some(
                            json!({"objects": [&self.objects[a], &self.objects[b]], "f": f, "id∘f": l, "f∘id": r}),
                        );
                        break 'unit;
                    }
                }
            }
        }
        v.record("identity", wit);
        v
    }
}

// ---------------------------------------------------------------------------
// Rings

/// Shorthand ring descriptions accepted by [`ringoid_of_ring`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum RingSpec {
    #[serde(rename = "Zn")]
    Zn(i64),
    #[serde(rename = "product")]
    Product(Vec<RingSpec>),
    #[serde(rename = "quotient")]
    Quotient {
        ring: Box<RingSpec>,
        ideal: Vec<Elem>,
    },
    #[serde(rename = "triangular")]
    Triangular { field: i64, size: usize },
    /// Additive group by invariant factors; `mul[i][j]` is the index of `x_i · x_j`
    /// in mixed-radix element order; `one` is the index of the unit.
    #[serde(rename = "table")]
    Table {
        factors: Vec<i64>,
        mul: Vec<Vec<u32>>,
        one: u32,
    },
}

impl RingSpec {
    pub fn label(&self) -> String {
        match self {
            RingSpec::Zn(n) => format!("Z/{n}"),
            RingSpec::Product(v) => v.iter().map(|s| s.label()).collect::<Vec<_>>().join("x"),
            RingSpec::Quotient { ring, ideal } => format!("{}/({:?})", ring.label(), ideal),
            RingSpec::Triangular { field, size } => format!("T{size}(F{field})"),
            RingSpec::Table { factors, .. } => format!("table{factors:?}"),
        }
    }
}

pub fn ringoid_of_ring(spec: &RingSpec) -> Result<Ringoid> {
    let name = spec.label();
    match spec {
        RingSpec::Zn(n) => {
            if *n < 1 {
                return invalid("Z/n needs n >= 1");
            }
            let g = FinAb::cyclic(*n);
            if g.is_trivial() {
                return Ringoid::ring(name, g, vec![], vec![]);
            }
            Ringoid::ring(name, g, vec![vec![vec![1]]], vec![1])
        }
        RingSpec::Product(parts) => {
            let rings: Vec<Ringoid> = parts.iter().map(ringoid_of_ring).collect::<Result<_>>()?;
            let groups: Vec<FinAb> = rings.iter().map(|r| r.hom(0, 0).clone()).collect();
            let ds = DirectSum::new(&groups)?;
            let k = ds.group.rank();
            let comps =
                |z: &Elem| -> Vec<Elem> { (0..rings.len()).map(|i| ds.component(i, z)).collect() };
            let mut tab = vec![vec![Vec::new(); k]; k];
            for (i, row) in tab.iter_mut().enumerate() {
                for (j, cell) in row.iter_mut().enumerate() {
                    let xs = comps(&ds.group.gen(i));
                    let ys = comps(&ds.group.gen(j));
                    let prod: Vec<Elem> = rings
                        .iter()
                        .zip(xs.iter().zip(&ys))
                        .map(|(r, (x, y))| r.mul(x, y))
                        .collect();
                    *cell = ds.combine(&prod);
                }
            }
            let ones: Vec<Elem> = rings.iter().map(|r| r.id(0).clone()).collect();
            Ringoid::ring(name, ds.group.clone(), tab, ds.combine(&ones))
        }
        RingSpec::Quotient { ring, ideal } => {
            let base = ringoid_of_ring(ring)?;
            let add = base.hom(0, 0).clone();
            for g in ideal {
                if !add.contains(g) {
                    return invalid(format!("ideal generator {g:?} is not a ring element"));
                }
            }
            let mut span = Vec::new();
            for g in ideal {
                for a in add.gens() {
                    for b in add.gens() {
                        span.push(base.mul(&base.mul(&a, g), &b));
                    }
                }
            }
            let q = ab_normal_form(add.factors(), &span)?;
            let k = q.group.rank();
            let tab = (0..k)
                .map(|i| {
                    (0..k)
                        .map(|j| q.project(&base.mul(q.gen_lift(i), q.gen_lift(j))))
                        .collect()
                })
                .collect();
            let one = q.project(base.id(0));
            Ringoid::ring(name, q.group.clone(), tab, one)
        }
        RingSpec::Triangular { field, size } => {
            let p = *field;
            if p < 2 || !(2..p).all(|d| p % d != 0) {
                return invalid("triangular construction needs a prime field");
            }
            let basis: Vec<(usize, usize)> = (0..*size)
                .flat_map(|i| (i..*size).map(move |j| (i, j)))
                .collect();
            let k = basis.len();
            let add = FinAb::new(vec![p; k])?;
            let unit = |i: usize| {
                let mut x = vec![0; k];
                x[i] = 1;
                x
            };
            let tab = basis
                .iter()
                .map(|&(i, j)| {
                    basis
                        .iter()
                        .map(|&(k2, l)| {
                            if j == k2 {
                                unit(basis.iter().position(|&b| b == (i, l)).unwrap())
                            } else {
                                vec![0; k]
                            }
                        })
                        .collect()
                })
                .collect();
            let one: Elem = basis.iter().map(|&(i, j)| i64::from(i == j)).collect();
            Ringoid::ring(name, add, tab, one)
        }
        RingSpec::Table { factors, mul, one } => {
            let add = FinAb::new(factors.clone())?;
            let ord = add.order() as usize;
            if mul.len() != ord
                || mul.iter().any(|r| r.len() != ord)
                || mul.iter().flatten().any(|&x| x as usize >= ord)
            {
                return invalid("multiplication table must be |R| x |R| with entries in range");
            }
            if *one as usize >= ord {
                return invalid("unit index out of range");
            }
            let flat: Vec<u32> = mul.iter().flatten().copied().collect();
            Ringoid::new(
                name,
                vec!["*".into()],
                vec![vec![add.clone()]],
                vec![add.element_at(*one as usize)],
                Compose::Table(vec![flat]),
            )
        }
    }
}

/// Free `Z/n`-linear category on a small category.
pub fn linearize(cat: &SmallCat, n: i64) -> Result<Ringoid> {
    let k = cat.n();
    let homs: Vec<Vec<FinAb>> = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| FinAb::new(vec![n; cat.hom(a, b).len()]))
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    if n < 2 {
        return invalid("linearization needs modulus >= 2");
    }
    let ids = (0..k)
        .map(|a| {
            let hs = cat.hom(a, a);
            hs.iter().map(|&m| i64::from(m == cat.id(a))).collect()
        })
        .collect();
    let compose = Ringoid::bilinear_from(k, &homs, |a, b, c, i, j| {
        let g = cat.hom(b, c)[i];
        let f = cat.hom(a, b)[j];
        let gf = cat.compose(g, f).expect("composable");
        cat.hom(a, c).iter().map(|&m| i64::from(m == gf)).collect()
    });
    Ringoid::new(
        format!("Z/{n}[{}]", cat.name),
        cat.objects.clone(),
        homs,
        ids,
        compose,
    )
}

// ---------------------------------------------------------------------------
// Tensor product of ringoids

/// `R ⊗ S` together with the tensor data of each hom group.
#[derive(Clone, Debug)]
pub struct RingoidTensor {
    pub left: Arc<Ringoid>,
    pub right: Arc<Ringoid>,
    pub ringoid: Arc<Ringoid>,
    tensors: Vec<AbTensor>,
}

impl RingoidTensor {
    pub fn pair_index(&self, r: usize, s: usize) -> usize {
        r * self.right.n() + s
    }

    pub fn unpair(&self, p: usize) -> (usize, usize) {
        (p / self.right.n(), p % self.right.n())
    }

    pub fn hom_tensor(&self, p1: usize, p2: usize) -> &AbTensor {
        &self.tensors[p1 * self.ringoid.n() + p2]
    }

    /// `x ⊗ y ∈ hom((r1,s1),(r2,s2))`.
    pub fn pure(&self, p1: usize, p2: usize, x: &[i64], y: &[i64]) -> Elem {
        self.hom_tensor(p1, p2).pair(x, y)
    }
}

pub fn ringoid_tensor(r: &Arc<Ringoid>, s: &Arc<Ringoid>) -> Result<RingoidTensor> {
    let (nr, ns) = (r.n(), s.n());
    let n = nr * ns;
    let objects: Vec<String> = (0..nr)
        .flat_map(|a| (0..ns).map(move |b| (a, b)))
        .map(|(a, b)| format!("({},{})", r.objects()[a], s.objects()[b]))
        .collect();
    let mut tensors = Vec::with_capacity(n * n);
    for p1 in 0..n {
        for p2 in 0..n {
            let (r1, s1) = (p1 / ns, p1 % ns);
            let (r2, s2) = (p2 / ns, p2 % ns);
            tensors.push(ab_tensor(r.hom(r1, r2), s.hom(s1, s2))?);
        }
    }
    let homs: Vec<Vec<FinAb>> = (0..n)
        .map(|p1| {
            (0..n)
                .map(|p2| tensors[p1 * n + p2].group().clone())
                .collect()
        })
        .collect();
    let ids: Vec<Elem> = (0..n)
        .map(|p| {
            let (a, b) = (p / ns, p % ns);
            tensors[p * n + p].pair(r.id(a), s.id(b))
        })
        .collect();
    let compose = Ringoid::bilinear_from(n, &homs, |p1, p2, p3, i, j| {
        let t23 = &tensors[p2 * n + p3];
        let t12 = &tensors[p1 * n + p2];
        let t13 = &tensors[p1 * n + p3];
        let (r1, s1) = (p1 / ns, p1 % ns);
        let (r2, s2) = (p2 / ns, p2 % ns);
        let (r3, s3) = (p3 / ns, p3 % ns);
        let mut acc = t13.group().zero();
        for (gi, gj, gc) in t23.expand(&t23.group().gen(i)) {
            for (fi, fj, fc) in t12.expand(&t12.group().gen(j)) {
                let x = r.compose(r1, r2, r3, &r.hom(r2, r3).gen(gi), &r.hom(r1, r2).gen(fi));
                let y = s.compose(s1, s2, s3, &s.hom(s2, s3).gen(gj), &s.hom(s1, s2).gen(fj));
                let t = t13.pair(&x, &y);
                t13.group()
                    .add_assign(&mut acc, &t13.group().scale(gc * fc, &t));
            }
        }
        acc
    });
    let ringoid = Ringoid::new(
        format!("{}⊗{}", r.name, s.name),
        objects,
        homs,
        ids,
        compose,
    )?;
    Ok(RingoidTensor {
        left: r.clone(),
        right: s.clone(),
        ringoid: Arc::new(ringoid),
        tensors,
    })
}

/// Builds both bracketings of `R ⊗ S ⊗ T` and the regrouping isomorphisms between them.
pub fn tensor_associator_of(
    r: &Arc<Ringoid>,
    s: &Arc<Ringoid>,
    t: &Arc<Ringoid>,
) -> Result<(RingoidTensor, RingoidTensor, AddFunctor, AddFunctor)> {
    let rs = ringoid_tensor(r, s)?;
    let st = ringoid_tensor(s, t)?;
    let rs_t = ringoid_tensor(&rs.ringoid, t)?;
    let r_st = ringoid_tensor(r, &st.ringoid)?;
    let (fwd, bwd) = associator_with(&rs, &st, &rs_t, &r_st)?;
    Ok((rs_t, r_st, fwd, bwd))
}

fn associator_with(
    rs: &RingoidTensor,
    st: &RingoidTensor,
    rs_t: &RingoidTensor,
    r_st: &RingoidTensor,
) -> Result<(AddFunctor, AddFunctor)> {
    let (nr, ns, nt) = (rs.left.n(), rs.right.n(), st.right.n());
    let n = nr * ns * nt;
    // ((a,b),c) and (a,(b,c)) receive the same index a*ns*nt + b*nt + c on both sides.
    let triple = |p: usize| (p / (ns * nt), (p / nt) % ns, p % nt);
    let obj: Vec<usize> = (0..n).collect();
    let mut fwd_maps = vec![Vec::with_capacity(n); n];
    let mut bwd_maps = vec![Vec::with_capacity(n); n];
    for p1 in 0..n {
        for p2 in 0..n {
            let (a1, b1, c1) = triple(p1);
            let (a2, b2, c2) = triple(p2);
            let lt = rs_t.hom_tensor(p1, p2);
            let inner_l = rs.hom_tensor(a1 * ns + b1, a2 * ns + b2);
            let rt = r_st.hom_tensor(p1, p2);
            let inner_r = st.hom_tensor(b1 * nt + c1, b2 * nt + c2);
            let fwd_imgs: Vec<Elem> = (0..lt.group().rank())
                .map(|k| {
                    let mut acc = rt.group().zero();
                    for (u, z, c) in lt.expand(&lt.group().gen(k)) {
                        for (x, y, c2) in inner_l.expand(&inner_l.group().gen(u)) {
                            let yz = inner_r.pair(&inner_r.a.gen(y), &inner_r.b.gen(z));
                            let t = rt.pair(&rt.a.gen(x), &yz);
                            rt.group()
                                .add_assign(&mut acc, &rt.group().scale(c * c2, &t));
                        }
                    }
                    acc
                })
                .collect();
            let bwd_imgs: Vec<Elem> = (0..rt.group().rank())
                .map(|k| {
                    let mut acc = lt.group().zero();
                    for (x, v, c) in rt.expand(&rt.group().gen(k)) {
                        for (y, z, c2) in inner_r.expand(&inner_r.group().gen(v)) {
                            let xy = inner_l.pair(&inner_l.a.gen(x), &inner_l.b.gen(y));
                            let t = lt.pair(&xy, &lt.b.gen(z));
                            lt.group()
                                .add_assign(&mut acc, &lt.group().scale(c * c2, &t));
                        }
                    }
                    acc
                })
                .collect();
            fwd_maps[p1].push(AbHom::from_images(
                lt.group().clone(),
                rt.group().clone(),
                &fwd_imgs,
            )?);
            bwd_maps[p1].push(AbHom::from_images(
                rt.group().clone(),
                lt.group().clone(),
                &bwd_imgs,
            )?);
        }
    }
    let fwd = AddFunctor::new(
        rs_t.ringoid.clone(),
        r_st.ringoid.clone(),
        obj.clone(),
        fwd_maps,
    )?;
    let bwd = AddFunctor::new(r_st.ringoid.clone(), rs_t.ringoid.clone(), obj, bwd_maps)?;
    Ok((fwd, bwd))
}

// ---------------------------------------------------------------------------
// Additive functors

#[derive(Clone, Debug, PartialEq)]
pub struct AddFunctor {
    pub src: Arc<Ringoid>,
    pub tgt: Arc<Ringoid>,
    pub obj: Vec<usize>,
    /// `maps[a][b]: hom_src(a,b) → hom_tgt(F a, F b)`.
    pub maps: Vec<Vec<AbHom>>,
}

impl AddFunctor {
    pub fn new(
        src: Arc<Ringoid>,
        tgt: Arc<Ringoid>,
        obj: Vec<usize>,
        maps: Vec<Vec<AbHom>>,
    ) -> Result<Self> {
        let n = src.n();
        if obj.len() != n || obj.iter().any(|&o| o >= tgt.n()) {
            return invalid("functor object map has wrong shape");
        }
        for a in 0..n {
            for b in 0..n {
                let m = &maps[a][b];
                if &m.src != src.hom(a, b) || &m.tgt != tgt.hom(obj[a], obj[b]) {
                    return invalid(format!(
                        "functor hom map ({a},{b}) has wrong source or target"
                    ));
                }
            }
        }
        Ok(AddFunctor {
            src,
            tgt,
            obj,
            maps,
        })
    }

    pub fn identity(r: &Arc<Ringoid>) -> Self {
        let n = r.n();
        let maps = (0..n)
            .map(|a| (0..n).map(|b| AbHom::identity(r.hom(a, b))).collect())
            .collect();
        AddFunctor {
            src: r.clone(),
            tgt: r.clone(),
            obj: (0..n).collect(),
            maps,
        }
    }

    /// Functor between one-object ringoids from the images of additive generators.
    pub fn from_ring_map(src: &Arc<Ringoid>, tgt: &Arc<Ringoid>, images: &[Elem]) -> Result<Self> {
        let h = AbHom::from_images(src.hom(0, 0).clone(), tgt.hom(0, 0).clone(), images)?;
        AddFunctor::new(src.clone(), tgt.clone(), vec![0], vec![vec![h]])
    }

    pub fn apply(&self, a: usize, b: usize, r: &[i64]) -> Elem {
        self.maps[a][b].apply(r)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &AddFunctor) -> AddFunctor {
        let n = self.src.n();
        let obj: Vec<usize> = self.obj.iter().map(|&o| other.obj[o]).collect();
        let maps = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| other.maps[self.obj[a]][self.obj[b]].compose(&self.maps[a][b]))
                    .collect()
            })
            .collect();
        AddFunctor {
            src: self.src.clone(),
            tgt: other.tgt.clone(),
            obj,
            maps,
        }
    }

    pub fn opposite(&self, src_op: &Arc<Ringoid>, tgt_op: &Arc<Ringoid>) -> AddFunctor {
        let n = self.src.n();
        let maps = (0..n)
            .map(|a| (0..n).map(|b| self.maps[b][a].clone()).collect())
            .collect();
        AddFunctor {
            src: src_op.clone(),
            tgt: tgt_op.clone(),
            obj: self.obj.clone(),
            maps,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.obj.iter().enumerate().all(|(i, &o)| i == o)
            && self.maps.iter().all(|r| r.iter().all(|m| m.is_identity()))
    }

    pub fn validate(&self) -> Validation {
        let mut v = Validation::new(format!("functor {} -> {}", self.src.name, self.tgt.name));
        let (s, t) = (&self.src, &self.tgt);
        let n = s.n();
        let wit = (0..n).find_map(|a| {
            let img = self.apply(a, a, s.id(a));
            (&img != t.id(self.obj[a])).then(|| json!({"object": &s.objects()[a], "F(id)": img}))
        });
        v.record("preserves-identity", wit);
        let mut wit = None;
        'outer: for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let ex = s.hom(a, b).order() * s.hom(b, c).order() <= EXHAUSTIVE_BOUND
                        && !matches!(s.compose_data(), Compose::Bilinear(_));
                    let fs = s.hom_sample(a, b, ex);
                    let gs = s.hom_sample(b, c, ex);
                    for g in &gs {
                        for f in &fs {
                            let lhs = self.apply(a, c, &s.compose(a, b, c, g, f));
                            let rhs = t.compose(
                                self.obj[a],
                                self.obj[b],
                                self.obj[c],
                                &self.apply(b, c, g),
                                &self.apply(a, b, f),
                            );
                            if lhs != rhs {
                                wit = Some(
                                    json!({"objects": [a, b, c], "g": g, "f": f, "F(gf)": lhs, "F(g)F(f)": rhs}),
                                );
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        v.record("preserves-composition", wit);
        let wit = self
            .maps
            .iter()
            .flatten()
            .find(|m| !m.is_well_defined())
            .map(|m| json!({"hom-map": m.matrix()}));
        v.record("additive", wit);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ring(spec: RingSpec) -> Ringoid {
        ringoid_of_ring(&spec).unwrap()
    }

    #[test]
    fn z4_is_multiplication_mod_4() {
        let r = ring(RingSpec::Zn(4));
        assert_eq!(r.n(), 1);
        assert_eq!(r.hom(0, 0).factors(), &[4]);
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(r.mul(&[x], &[y]), vec![(x * y) % 4]);
            }
        }
        assert!(r.validate().all_pass());
    }

    #[test]
    fn product_z2_z3_is_z6_by_table_comparison() {
        let p = ring(RingSpec::Product(vec![RingSpec::Zn(2), RingSpec::Zn(3)]));
        let z6 = ring(RingSpec::Zn(6));
        assert_eq!(p.hom(0, 0), z6.hom(0, 0));
        // CRT: find the additive automorphism matching units, then compare full tables.
        let g = p.id(0)[0];
        for x in 0..6i64 {
            for y in 0..6i64 {
                let px = [(x * g) % 6];
                let py = [(y * g) % 6];
                let pxy = p.mul(&px, &py);
                assert_eq!(pxy, vec![(x * y * g) % 6]);
            }
        }
        assert!(p.validate().all_pass());
    }

    #[test]
    fn triangular_is_noncommutative_and_opposite_differs() {
        let t = ring(RingSpec::Triangular { field: 2, size: 2 });
        assert_eq!(t.hom(0, 0).order(), 8);
        assert!(t.validate().all_pass());
        let (x, y) = t.noncommuting_pair().expect("witness pair");
        assert_ne!(t.mul(&x, &y), t.mul(&y, &x));
        let op = t.opposite();
        assert!(op.validate().all_pass());
        assert!(op.same_table(&t).is_some());
        assert_eq!(op.opposite(), t);
        let z4 = ring(RingSpec::Zn(4));
        assert!(z4.opposite().same_table(&z4).is_none());
    }

    #[test]
    fn quotient_ring_and_functor() {
        let z4 = Arc::new(ring(RingSpec::Zn(4)));
        let z2q = Arc::new(ring(RingSpec::Quotient {
            ring: Box::new(RingSpec::Zn(4)),
            ideal: vec![vec![2]],
        }));
        assert_eq!(z2q.hom(0, 0).factors(), &[2]);
        let q = AddFunctor::from_ring_map(&z4, &z2q, &[vec![1]]).unwrap();
        assert!(q.validate().all_pass());
        // exhaustive preservation check
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(
                    q.apply(0, 0, &z4.mul(&[x], &[y])),
                    z2q.mul(&q.apply(0, 0, &[x]), &q.apply(0, 0, &[y]))
                );
            }
        }
    }

    #[test]
    fn corrupted_table_fails_associativity() {
        let z4 = ring(RingSpec::Zn(4)).to_table();
        assert!(z4.validate().all_pass());
        let mut bad = z4.clone();
        if let Compose::Table(t) = &mut bad.compose {
            // 2·3 := 1
            t[0][2 * 4 + 3] = 1;
        }
        let rep = bad.validate();
        assert!(!rep.all_pass());
        let w = rep
            .first_failure("associative")
            .expect("associativity witness");
        assert!(w.witness.is_some());
    }

    #[test]
    fn ringoid_tensor_examples() {
        let z2 = Arc::new(ring(RingSpec::Zn(2)));
        let z3 = Arc::new(ring(RingSpec::Zn(3)));
        let t = ringoid_tensor(&z2, &z2).unwrap();
        assert_eq!(t.ringoid.n(), 1);
        assert_eq!(t.ringoid.hom(0, 0).factors(), &[2]);
        let t = ringoid_tensor(&z2, &z3).unwrap();
        assert!(t.ringoid.hom(0, 0).is_trivial());
        assert!(t.ringoid.validate().all_pass());
        let arrow = Arc::new(linearize(&SmallCat::arrow(), 2).unwrap());
        let t = ringoid_tensor(&arrow, &z2).unwrap();
        assert_eq!(t.ringoid.n(), arrow.n() * z2.n());
        assert!(t.ringoid.validate().all_pass());
    }

    #[test]
    fn tensor_is_associative_up_to_regrouping() {
        let arrow = Arc::new(linearize(&SmallCat::arrow(), 2).unwrap());
        let z4 = Arc::new(ring(RingSpec::Zn(4)));
        let z6 = Arc::new(ring(RingSpec::Zn(6)));
        let (_, _, fwd, bwd) = tensor_associator_of(&arrow, &z4, &z6).unwrap();
        assert!(fwd.validate().all_pass());
        assert!(bwd.validate().all_pass());
        assert!(fwd.then(&bwd).is_identity());
        assert!(bwd.then(&fwd).is_identity());
    }

    proptest! {
        #[test]
        fn linearized_posets_validate(n in 2i64..5) {
            for cat in [SmallCat::arrow(), SmallCat::toy_p1(), SmallCat::idempotent()] {
                let r = linearize(&cat, n).unwrap();
                prop_assert!(r.validate().all_pass());
                prop_assert!(r.opposite().validate().all_pass());
            }
        }
    }
}
