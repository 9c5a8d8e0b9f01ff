//! Finite abelian groups in invariant-factor form and homomorphisms between them.
//!
//! Every quotient in the crate goes through [`ab_normal_form`], which reduces a
//! relation lattice modulo the exponent, brings it to Smith form and regroups the
//! cyclic factors into a divisibility chain.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, AlgError, Result};

pub type Elem = Vec<i64>;
type Mat = Vec<Vec<i64>>;

static ORDER_LIMIT: AtomicU64 = AtomicU64::new(1 << 16);

/// Largest group order any construction may produce.
pub fn order_limit() -> u64 {
    ORDER_LIMIT.load(Ordering::Relaxed)
}

pub fn set_order_limit(limit: u64) {
    ORDER_LIMIT.store(limit, Ordering::Relaxed);
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: i64, b: i64) -> i64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// Returns `(g, s, t)` with `g = gcd(a, b) = s*a + t*b`, `g >= 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

#[inline]
pub fn md(x: i64, n: i64) -> i64 {
    x.rem_euclid(n)
}

#[inline]
fn mulmod(a: i64, b: i64, n: i64) -> i64 {
    ((a as i128 * b as i128).rem_euclid(n as i128)) as i64
}

fn prime_powers(mut n: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut q = 1;
            while n % p == 0 {
                n /= p;
                q *= p;
            }
            out.push((p, q));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, n));
    }
    out
}

/// Element `x` with `x ≡ 1 (mod q)` and `x ≡ 0 (mod n/q)`, for `q | n` coprime to `n/q`.
fn crt_unit(q: i64, n: i64) -> i64 {
    let rest = n / q;
    if rest == 1 {
        return 1 % n;
    }
    let (_, s, _) = ext_gcd(rest, q);
    md(mulmod(rest, md(s, q), n), n)
}

// ---------------------------------------------------------------------------
// Smith form modulo an exponent

pub(crate) struct Snf {
    pub diag: Vec<i64>,
    pub u: Mat,
    pub uinv: Mat,
    pub v: Mat,
}

fn ident(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

/// Diagonalizes `a` over `Z/e`: `U a V = diag` with `U`, `V` invertible mod `e`.
/// Diagonal entries are representatives in `[0, e)`; off-diagonal entries vanish mod `e`.
pub(crate) fn snf_mod(mut a: Mat, rows: usize, cols: usize, e: i64) -> Snf {
    for r in a.iter_mut() {
        for x in r.iter_mut() {
            *x = md(*x, e);
        }
    }
    let mut u = ident(rows);
    let mut uinv = ident(rows);
    let mut v = ident(cols);
    let n = rows.min(cols);
    for t in 0..n {
        loop {
            let mut best: Option<(usize, usize, i64)> = None;
            for (i, row) in a.iter().enumerate().skip(t) {
                for (j, &x) in row.iter().enumerate().skip(t) {
                    if x != 0 && best.is_none_or(|b| x < b.2) {
                        best = Some((i, j, x));
                        if x == 1 {
                            break;
                        }
                    }
                }
                if best.is_some_and(|b| b.2 == 1) {
                    break;
                }
            }
            let Some((bi, bj, _)) = best else { break };
            if bi != t {
                a.swap(bi, t);
                u.swap(bi, t);
                for r in uinv.iter_mut() {
                    r.swap(bi, t);
                }
            }
            if bj != t {
                for r in a.iter_mut() {
                    r.swap(bj, t);
                }
                for r in v.iter_mut() {
                    r.swap(bj, t);
                }
            }
            let p = a[t][t];
            let mut clean = true;
            for i in t + 1..rows {
                if a[i][t] != 0 {
                    let q = a[i][t] / p;
                    if q != 0 {
                        let (top, bot) = a.split_at_mut(i);
                        for (x, y) in bot[0].iter_mut().zip(&top[t]) {
                            *x = md(*x - mulmod(q, *y, e), e);
                        }
                        let (top, bot) = u.split_at_mut(i);
                        for (x, y) in bot[0].iter_mut().zip(&top[t]) {
                            *x = md(*x - mulmod(q, *y, e), e);
                        }
                        for r in uinv.iter_mut() {
                            r[t] = md(r[t] + mulmod(q, r[i], e), e);
                        }
                    }
                    if a[i][t] != 0 {
                        clean = false;
                    }
                }
            }
            for j in t + 1..cols {
                if a[t][j] != 0 {
                    let q = a[t][j] / p;
                    if q != 0 {
                        for r in a.iter_mut() {
                            r[j] = md(r[j] - mulmod(q, r[t], e), e);
                        }
                        for r in v.iter_mut() {
                            r[j] = md(r[j] - mulmod(q, r[t], e), e);
                        }
                    }
                    if a[t][j] != 0 {
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
    }
    let diag = (0..n).map(|i| a[i][i]).collect();
    Snf { diag, u, uinv, v }
}

/// Echelon basis of a sublattice of `Z^k` that contains `e Z^k`.
pub(crate) struct RelLattice {
    k: usize,
    e: i64,
    rows: Vec<Option<Vec<i64>>>,
}

impl RelLattice {
    pub fn new(k: usize, e: i64) -> Self {
        RelLattice {
            k,
            e,
            rows: vec![None; k],
        }
    }

    pub fn insert(&mut self, v: Vec<i64>) {
        let e = self.e;
        let mut stack = vec![v];
        while let Some(mut v) = stack.pop() {
            for x in v.iter_mut() {
                *x = md(*x, e);
            }
            let mut p = 0;
            while p < self.k {
                if v[p] == 0 {
                    p += 1;
                    continue;
                }
                match &self.rows[p] {
                    Some(row) => {
                        let h = row[p];
                        if v[p] % h == 0 {
                            let q = v[p] / h;
                            for (x, y) in v.iter_mut().zip(row) {
                                *x = md(*x - mulmod(q, *y, e), e);
                            }
                            p += 1;
                            continue;
                        }
                        let (g, s, t) = ext_gcd(h, v[p]);
                        let new: Vec<i64> = row
                            .iter()
                            .zip(&v)
                            .map(|(a, b)| md(mulmod(s, *a, e) + mulmod(t, *b, e), e))
                            .collect();
                        let old_rem = sub_scaled(row, &new, h / g, e);
                        let v_rem = sub_scaled(&v, &new, v[p] / g, e);
                        let ext = scaled(&new, e / g, e);
                        self.rows[p] = Some(new);
                        stack.push(old_rem);
                        stack.push(v_rem);
                        stack.push(ext);
                        break;
                    }
                    None => {
                        let (g, s, _) = ext_gcd(v[p], e);
                        let mut new = scaled(&v, md(s, e), e);
                        new[p] = g;
                        let v_rem = sub_scaled(&v, &new, v[p] / g, e);
                        let ext = scaled(&new, e / g, e);
                        self.rows[p] = Some(new);
                        stack.push(v_rem);
                        stack.push(ext);
                        break;
                    }
                }
            }
        }
    }

    pub fn matrix(&self) -> Mat {
        self.rows
            .iter()
            .map(|r| r.clone().unwrap_or_else(|| vec![0; self.k]))
            .collect()
    }
}

fn scaled(v: &[i64], c: i64, e: i64) -> Vec<i64> {
    v.iter().map(|x| mulmod(*x, c, e)).collect()
}

fn sub_scaled(a: &[i64], b: &[i64], c: i64, e: i64) -> Vec<i64> {
    a.iter()
        .zip(b)
        .map(|(x, y)| md(*x - mulmod(c, *y, e), e))
        .collect()
}

/// Generators of `{ c in (Z/e)^m : rows · c ≡ 0 (mod e) }`.
pub(crate) fn kernel_mod(rows: &[Vec<i64>], m: usize, e: i64) -> Vec<Vec<i64>> {
    if m == 0 {
        return Vec::new();
    }
    if e == 1 {
        return Vec::new();
    }
    let mut lat = RelLattice::new(m, e);
    for r in rows {
        lat.insert(r.clone());
    }
    let h = lat.matrix();
    let s = snf_mod(h, m, m, e);
    let mut out = Vec::new();
    for j in 0..m {
        let g = gcd(s.diag[j], e);
        let f = e / g;
        let col: Vec<i64> = (0..m).map(|i| mulmod(s.v[i][j], f, e)).collect();
        if col.iter().any(|&x| x != 0) {
            out.push(col);
        }
    }
    out
}

/// Regroups `⊕ Z/c_i` into invariant factors.
/// Returns `(factors, fwd, bwd)`: `fwd` is `s × n` (old coordinates to new), `bwd` is `n × s`
/// (column `j` is the old-coordinate lift of new generator `j`).
fn canon_diag(c: &[i64]) -> (Vec<i64>, Mat, Mat) {
    let n = c.len();
    let mut by_prime: std::collections::BTreeMap<i64, Vec<(i64, usize)>> = Default::default();
    for (i, &ci) in c.iter().enumerate() {
        for (p, q) in prime_powers(ci) {
            by_prime.entry(p).or_default().push((q, i));
        }
    }
    let s = by_prime.values().map(|v| v.len()).max().unwrap_or(0);
    let mut factors = vec![1i64; s];
    let mut assign: Vec<(i64, i64, usize, usize)> = Vec::new();
    for list in by_prime.values_mut() {
        list.sort();
        let off = s - list.len();
        for (l, &(q, i)) in list.iter().enumerate() {
            factors[off + l] *= q;
            assign.push((0, q, i, off + l));
        }
    }
    let mut fwd = vec![vec![0i64; n]; s];
    let mut bwd = vec![vec![0i64; s]; n];
    for &(_, q, i, j) in &assign {
        let dj = factors[j];
        fwd[j][i] = md(fwd[j][i] + crt_unit(q, dj), dj);
        let ci = c[i];
        bwd[i][j] = md(bwd[i][j] + crt_unit(q, ci), ci);
    }
    (factors, fwd, bwd)
}

// ---------------------------------------------------------------------------
// FinAb

/// Finite abelian group `Z/d_1 ⊕ … ⊕ Z/d_k` with `d_1 | … | d_k`, all `d_i >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FinAb {
    factors: Vec<i64>,
}

impl FinAb {
    pub fn new(factors: Vec<i64>) -> Result<Self> {
        if factors.iter().any(|&d| d < 2) {
            return invalid(format!("invariant factors must be >= 2: {factors:?}"));
        }
        if factors.windows(2).any(|w| w[1] % w[0] != 0) {
            return invalid(format!(
                "invariant factors must form a divisibility chain: {factors:?}"
            ));
        }
        let g = FinAb { factors };
        g.check_limit()?;
        Ok(g)
    }

    /// Canonical form of `⊕ Z/n_i` for arbitrary positive orders.
    pub fn from_orders(orders: &[i64]) -> Result<Self> {
        Ok(ab_normal_form(orders, &[])?.group)
    }

    /// `⊕ Z/n_i` kept as given, without canonical form or order limit. Only for
    /// intermediate ambients that are immediately cut down to subgroups.
    pub(crate) fn raw(orders: &[i64]) -> Self {
        FinAb {
            factors: orders.iter().copied().filter(|&n| n > 1).collect(),
        }
    }

    pub fn trivial() -> Self {
        FinAb { factors: vec![] }
    }

    pub fn cyclic(n: i64) -> Self {
        if n <= 1 {
            Self::trivial()
        } else {
            FinAb { factors: vec![n] }
        }
    }

    fn check_limit(&self) -> Result<()> {
        let o = self.order_u128();
        if o > order_limit() as u128 {
            return Err(AlgError::OrderLimit {
                order: o,
                limit: order_limit(),
            });
        }
        Ok(())
    }

    pub fn factors(&self) -> &[i64] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    fn order_u128(&self) -> u128 {
        self.factors.iter().map(|&d| d as u128).product()
    }

    pub fn order(&self) -> u64 {
        self.order_u128() as u64
    }

    pub fn exponent(&self) -> i64 {
        self.factors.iter().fold(1, |a, &d| lcm(a, d))
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn zero(&self) -> Elem {
        vec![0; self.rank()]
    }

    pub fn gen(&self, i: usize) -> Elem {
        let mut x = self.zero();
        x[i] = 1;
        x
    }

    pub fn gens(&self) -> Vec<Elem> {
        (0..self.rank()).map(|i| self.gen(i)).collect()
    }

    pub fn reduce(&self, x: &mut [i64]) {
        for (v, d) in x.iter_mut().zip(&self.factors) {
            *v = md(*v, *d);
        }
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        x.len() == self.rank()
            && x.iter()
                .zip(&self.factors)
                .all(|(v, d)| (0..*d).contains(v))
    }

    pub fn add(&self, x: &[i64], y: &[i64]) -> Elem {
        x.iter()
            .zip(y)
            .zip(&self.factors)
            .map(|((a, b), d)| md(a + b, *d))
            .collect()
    }

    pub fn sub(&self, x: &[i64], y: &[i64]) -> Elem {
        x.iter()
            .zip(y)
            .zip(&self.factors)
            .map(|((a, b), d)| md(a - b, *d))
            .collect()
    }

    pub fn neg(&self, x: &[i64]) -> Elem {
        x.iter()
            .zip(&self.factors)
            .map(|(a, d)| md(-a, *d))
            .collect()
    }

    pub fn scale(&self, k: i64, x: &[i64]) -> Elem {
        x.iter()
            .zip(&self.factors)
            .map(|(a, d)| mulmod(k, *a, *d))
            .collect()
    }

    pub fn add_assign(&self, acc: &mut [i64], x: &[i64]) {
        for ((a, b), d) in acc.iter_mut().zip(x).zip(&self.factors) {
            *a = md(*a + b, *d);
        }
    }

    pub fn is_zero(x: &[i64]) -> bool {
        x.iter().all(|&v| v == 0)
    }

    pub fn order_of(&self, x: &[i64]) -> i64 {
        x.iter()
            .zip(&self.factors)
            .fold(1, |acc, (v, d)| lcm(acc, d / gcd(*v, *d)))
    }

    /// Mixed-radix index, first coordinate fastest.
    pub fn index_of(&self, x: &[i64]) -> usize {
        let mut idx = 0usize;
        for (v, d) in x.iter().zip(&self.factors).rev() {
            idx = idx * (*d as usize) + (*v as usize);
        }
        idx
    }

    pub fn element_at(&self, mut idx: usize) -> Elem {
        self.factors
            .iter()
            .map(|&d| {
                let v = (idx % d as usize) as i64;
                idx /= d as usize;
                v
            })
            .collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.order() as usize).map(move |i| self.element_at(i))
    }

    /// Number of elements of each order, the complete isomorphism invariant.
    pub fn order_histogram(&self) -> std::collections::BTreeMap<i64, u64> {
        let mut h = std::collections::BTreeMap::new();
        for x in self.elements() {
            *h.entry(self.order_of(&x)).or_insert(0) += 1;
        }
        h
    }
}

impl std::fmt::Display for FinAb {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.factors.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

// ---------------------------------------------------------------------------
// Quotients

/// Canonical form of `(⊕ Z/n_j) / ⟨relations⟩` with its projection and generator lifts.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub group: FinAb,
    pub ambient: Vec<i64>,
    proj: Mat,
    lifts: Mat,
}

impl Quotient {
    pub fn project(&self, x: &[i64]) -> Elem {
        self.proj
            .iter()
            .zip(self.group.factors())
            .map(|(row, d)| {
                let mut acc = 0i64;
                for (a, b) in row.iter().zip(x) {
                    if *a != 0 && *b != 0 {
                        acc = md(acc + mulmod(*a, *b, *d), *d);
                    }
                }
                acc
            })
            .collect()
    }

    /// Projection restricted to a sparse vector given as `(coordinate, coefficient)` pairs.
    pub fn project_sparse(&self, x: &[(usize, i64)]) -> Elem {
        self.proj
            .iter()
            .zip(self.group.factors())
            .map(|(row, d)| {
                x.iter()
                    .fold(0, |acc, (j, c)| md(acc + mulmod(row[*j], *c, *d), *d))
            })
            .collect()
    }

    /// Image of the `j`-th ambient generator.
    pub fn image_of_gen(&self, j: usize) -> Elem {
        self.proj.iter().map(|row| row[j]).collect()
    }

    /// A preimage of `y` in ambient coordinates (not a homomorphism in general).
    pub fn lift(&self, y: &[i64]) -> Elem {
        let mut out = vec![0i64; self.ambient.len()];
        for (c, l) in y.iter().zip(&self.lifts) {
            if *c != 0 {
                for ((o, v), n) in out.iter_mut().zip(l).zip(&self.ambient) {
                    *o = md(*o + mulmod(*c, *v, *n), *n);
                }
            }
        }
        out
    }

    pub fn gen_lift(&self, j: usize) -> &[i64] {
        &self.lifts[j]
    }

    /// The projection as a homomorphism, when the ambient is itself a canonical group.
    pub fn proj_hom(&self, ambient: &FinAb) -> AbHom {
        debug_assert_eq!(ambient.factors(), &self.ambient[..]);
        AbHom::from_matrix(ambient.clone(), self.group.clone(), self.proj.clone())
    }
}

/// Canonical form of the group presented by cyclic generators of the given orders
/// modulo the given relation vectors.
pub fn ab_normal_form(orders: &[i64], relations: &[Elem]) -> Result<Quotient> {
    if orders.iter().any(|&n| n <= 0) {
        return Err(AlgError::Infinite);
    }
    let k = orders.len();
    let e = orders.iter().fold(1, |a, &n| lcm(a, n));
    if e >= (1i64 << 40) {
        return invalid("exponent of presentation too large");
    }
    if e == 1 {
        return Ok(Quotient {
            group: FinAb::trivial(),
            ambient: orders.to_vec(),
            proj: vec![],
            lifts: vec![],
        });
    }
    let mut lat = RelLattice::new(k, e);
    for (j, &n) in orders.iter().enumerate() {
        if n != e {
            let mut v = vec![0; k];
            v[j] = n;
            lat.insert(v);
        }
    }
    for r in relations {
        if r.len() != k {
            return invalid("relation length does not match generator count");
        }
        lat.insert(r.clone());
    }
    let h = lat.matrix();
    let ht: Mat = (0..k).map(|i| (0..k).map(|j| h[j][i]).collect()).collect();
    let s = snf_mod(ht, k, k, e);
    let c: Vec<i64> = s.diag.iter().map(|&d| gcd(d, e)).collect();
    let (factors, fwd, bwd) = canon_diag(&c);
    let group = FinAb { factors };
    group.check_limit()?;
    let proj: Mat = fwd
        .iter()
        .zip(group.factors())
        .map(|(frow, &d)| {
            (0..k)
                .map(|l| {
                    let mut acc = 0;
                    for (i, f) in frow.iter().enumerate() {
                        if *f != 0 {
                            acc = md(acc + mulmod(*f, s.u[i][l], d), d);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let lifts: Mat = (0..group.rank())
        .map(|j| {
            (0..k)
                .map(|l| {
                    let n = orders[l];
                    let mut acc = 0;
                    for (i, brow) in bwd.iter().enumerate() {
                        if brow[j] != 0 {
                            acc = md(acc + mulmod(s.uinv[l][i], brow[j], n), n);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    Ok(Quotient {
        group,
        ambient: orders.to_vec(),
        proj,
        lifts,
    })
}

// ---------------------------------------------------------------------------
// Homomorphisms

/// Homomorphism given by an integer matrix: column `j` is the image of source generator `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbHom {
    pub src: FinAb,
    pub tgt: FinAb,
    m: Mat,
}

impl AbHom {
    /// Builds from a matrix, reducing row `i` modulo target factor `i`.
    pub fn from_matrix(src: FinAb, tgt: FinAb, mut m: Mat) -> Self {
        for (row, d) in m.iter_mut().zip(tgt.factors()) {
            for x in row.iter_mut() {
                *x = md(*x, *d);
            }
        }
        AbHom { src, tgt, m }
    }

    /// Builds from the images of the source generators; checks well-definedness.
    pub fn from_images(src: FinAb, tgt: FinAb, images: &[Elem]) -> Result<Self> {
        if images.len() != src.rank() || images.iter().any(|x| x.len() != tgt.rank()) {
            return invalid("image list has wrong shape");
        }
        let m = (0..tgt.rank())
            .map(|i| images.iter().map(|x| x[i]).collect())
            .collect();
        let h = Self::from_matrix(src, tgt, m);
        if !h.is_well_defined() {
            return invalid("generator images violate order relations");
        }
        Ok(h)
    }

    pub fn matrix(&self) -> &Mat {
        &self.m
    }

    pub fn zero(src: &FinAb, tgt: &FinAb) -> Self {
        AbHom {
            src: src.clone(),
            tgt: tgt.clone(),
            m: vec![vec![0; src.rank()]; tgt.rank()],
        }
    }

    pub fn identity(a: &FinAb) -> Self {
        AbHom {
            src: a.clone(),
            tgt: a.clone(),
            m: ident(a.rank()),
        }
    }

    pub fn is_well_defined(&self) -> bool {
        self.m.iter().zip(self.tgt.factors()).all(|(row, di)| {
            row.iter()
                .zip(self.src.factors())
                .all(|(x, dj)| mulmod(*x, *dj, *di) == 0)
        })
    }

    pub fn apply(&self, x: &[i64]) -> Elem {
        self.m
            .iter()
            .zip(self.tgt.factors())
            .map(|(row, d)| {
                let mut acc = 0;
                for (a, b) in row.iter().zip(x) {
                    if *a != 0 && *b != 0 {
                        acc = md(acc + mulmod(*a, *b, *d), *d);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn image_of_gen(&self, j: usize) -> Elem {
        self.m.iter().map(|row| row[j]).collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AbHom) -> AbHom {
        debug_assert_eq!(other.tgt, self.src);
        let cols: Vec<Elem> = (0..other.src.rank())
            .map(|j| self.apply(&other.image_of_gen(j)))
            .collect();
        let m = (0..self.tgt.rank())
            .map(|i| cols.iter().map(|c| c[i]).collect())
            .collect();
        AbHom {
            src: other.src.clone(),
            tgt: self.tgt.clone(),
            m,
        }
    }

    pub fn add(&self, other: &AbHom) -> AbHom {
        let m = self
            .m
            .iter()
            .zip(&other.m)
            .zip(self.tgt.factors())
            .map(|((a, b), d)| a.iter().zip(b).map(|(x, y)| md(x + y, *d)).collect())
            .collect();
        AbHom {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            m,
        }
    }

    pub fn scale(&self, k: i64) -> AbHom {
        let m = self
            .m
            .iter()
            .zip(self.tgt.factors())
            .map(|(a, d)| a.iter().map(|x| mulmod(*x, k, *d)).collect())
            .collect();
        AbHom {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            m,
        }
    }

    pub fn neg(&self) -> AbHom {
        self.scale(-1)
    }

    pub fn sub(&self, other: &AbHom) -> AbHom {
        self.add(&other.neg())
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().all(|r| r.iter().all(|&x| x == 0))
    }

    pub fn is_identity(&self) -> bool {
        self.src == self.tgt && self.m == ident(self.src.rank())
    }

    fn exponent_pair(&self) -> i64 {
        lcm(self.src.exponent(), self.tgt.exponent())
    }

    fn scaled_rows(&self, e: i64) -> Mat {
        self.m
            .iter()
            .zip(self.tgt.factors())
            .map(|(row, d)| row.iter().map(|x| mulmod(*x, e / d, e)).collect())
            .collect()
    }

    pub fn solver(&self) -> Solver {
        let e = self.exponent_pair();
        let rows = self.tgt.rank();
        let cols = self.src.rank();
        let snf = snf_mod(self.scaled_rows(e), rows, cols, e);
        Solver {
            hom: self.clone(),
            e,
            snf,
        }
    }

    /// Some `x` with `self(x) = y`, if one exists.
    pub fn solve(&self, y: &[i64]) -> Option<Elem> {
        self.solver().solve(y)
    }

    pub fn kernel(&self) -> Result<SubGroup> {
        let e = self.exponent_pair();
        let gens: Vec<Elem> = kernel_mod(&self.scaled_rows(e), self.src.rank(), e)
            .into_iter()
            .map(|mut c| {
                self.src.reduce(&mut c);
                c
            })
            .collect();
        subgroup(&self.src, &gens)
    }

    pub fn image(&self) -> Result<SubGroup> {
        let gens: Vec<Elem> = (0..self.src.rank()).map(|j| self.image_of_gen(j)).collect();
        subgroup(&self.tgt, &gens)
    }

    /// Cokernel group with the projection from the target.
    pub fn cokernel(&self) -> Result<(FinAb, AbHom)> {
        let gens: Vec<Elem> = (0..self.src.rank()).map(|j| self.image_of_gen(j)).collect();
        let q = ab_normal_form(self.tgt.factors(), &gens)?;
        let p = q.proj_hom(&self.tgt);
        Ok((q.group, p))
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().map(|k| k.group.is_trivial()).unwrap_or(false)
    }

    pub fn is_surjective(&self) -> bool {
        self.image()
            .map(|i| i.group.order() == self.tgt.order())
            .unwrap_or(false)
    }

    pub fn is_iso(&self) -> bool {
        self.src.order() == self.tgt.order() && self.is_injective()
    }

    pub fn inverse(&self) -> Option<AbHom> {
        if !self.is_iso() {
            return None;
        }
        let s = self.solver();
        let imgs: Option<Vec<Elem>> = self.tgt.gens().iter().map(|g| s.solve(g)).collect();
        AbHom::from_images(self.tgt.clone(), self.src.clone(), &imgs?).ok()
    }
}

/// Precomputed Smith form for repeated preimage queries.
pub struct Solver {
    hom: AbHom,
    e: i64,
    snf: Snf,
}

impl Solver {
    pub fn solve(&self, y: &[i64]) -> Option<Elem> {
        let h = &self.hom;
        let e = self.e;
        let rows = h.tgt.rank();
        let cols = h.src.rank();
        let ys: Vec<i64> = y
            .iter()
            .zip(h.tgt.factors())
            .map(|(v, d)| mulmod(*v, e / d, e))
            .collect();
        let c: Vec<i64> = (0..rows)
            .map(|i| (0..rows).fold(0, |acc, l| md(acc + mulmod(self.snf.u[i][l], ys[l], e), e)))
            .collect();
        let mut z = vec![0i64; cols];
        for i in 0..rows {
            let di = if i < cols { self.snf.diag[i] } else { 0 };
            let g = gcd(di, e);
            if c[i] % g != 0 {
                return None;
            }
            if i < cols && c[i] != 0 {
                let m = e / g;
                let (_, inv, _) = ext_gcd(md(di / g, m), m);
                z[i] = md(mulmod(c[i] / g, md(inv, m), m), m);
            }
        }
        let mut x: Elem = (0..cols)
            .map(|j| (0..cols).fold(0, |acc, l| md(acc + mulmod(self.snf.v[j][l], z[l], e), e)))
            .collect();
        h.src.reduce(&mut x);
        debug_assert_eq!(h.apply(&x), {
            let mut yy = y.to_vec();
            h.tgt.reduce(&mut yy);
            yy
        });
        Some(x)
    }
}

/// Subgroup in canonical form together with its inclusion.
#[derive(Clone, Debug)]
pub struct SubGroup {
    pub group: FinAb,
    pub incl: AbHom,
}

impl SubGroup {
    pub fn contains(&self, x: &[i64]) -> bool {
        self.incl.solve(x).is_some()
    }
}

/// The subgroup of `a` generated by `gens`.
pub fn subgroup(a: &FinAb, gens: &[Elem]) -> Result<SubGroup> {
    let m = gens.len();
    let e = a.exponent();
    if m == 0 || e == 1 {
        return Ok(SubGroup {
            group: FinAb::trivial(),
            incl: AbHom::zero(&FinAb::trivial(), a),
        });
    }
    let rows: Mat = (0..a.rank())
        .map(|i| {
            gens.iter()
                .map(|g| mulmod(g[i], e / a.factors()[i], e))
                .collect()
        })
        .collect();
    let rels = kernel_mod(&rows, m, e);
    let q = ab_normal_form(&vec![e; m], &rels)?;
    let images: Vec<Elem> = (0..q.group.rank())
        .map(|j| {
            let c = q.gen_lift(j);
            let mut acc = a.zero();
            for (ci, g) in c.iter().zip(gens) {
                if *ci != 0 {
                    acc = a.add(&acc, &a.scale(*ci, g));
                }
            }
            acc
        })
        .collect();
    let incl = AbHom::from_images(q.group.clone(), a.clone(), &images)?;
    Ok(SubGroup {
        group: q.group,
        incl,
    })
}

/// Subgroup of `ambient` cut out by linear congruences `Σ c_j x_j ≡ 0 (mod n)`,
/// given as `(coefficients, n)`; the congruences must be well defined on `ambient`.
pub fn solve_congruences(ambient: &FinAb, rows: &[(Vec<i64>, i64)]) -> Result<SubGroup> {
    let e = rows
        .iter()
        .fold(ambient.exponent(), |acc, (_, n)| lcm(acc, *n));
    let scaled: Mat = rows
        .iter()
        .filter(|(_, n)| *n > 1)
        .map(|(r, n)| r.iter().map(|x| mulmod(*x, e / n, e)).collect())
        .collect();
    let gens: Vec<Elem> = if scaled.is_empty() {
        ambient.gens()
    } else {
        kernel_mod(&scaled, ambient.rank(), e)
            .into_iter()
            .map(|mut c| {
                ambient.reduce(&mut c);
                c
            })
            .collect()
    };
    subgroup(ambient, &gens)
}

/// Kernel with inclusion and cokernel with projection.
pub fn ab_kernel_cokernel(h: &AbHom) -> Result<(SubGroup, (FinAb, AbHom))> {
    Ok((h.kernel()?, h.cokernel()?))
}

// ---------------------------------------------------------------------------
// Direct sums, tensor products, hom groups

/// Canonical direct sum with injections and projections.
#[derive(Clone, Debug)]
pub struct DirectSum {
    pub group: FinAb,
    pub parts: Vec<FinAb>,
    pub inj: Vec<AbHom>,
    pub proj: Vec<AbHom>,
}

impl DirectSum {
    pub fn new(parts: &[FinAb]) -> Result<Self> {
        let orders: Vec<i64> = parts
            .iter()
            .flat_map(|p| p.factors().iter().copied())
            .collect();
        let q = ab_normal_form(&orders, &[])?;
        let mut inj = Vec::new();
        let mut proj = Vec::new();
        let mut off = 0;
        for p in parts {
            let imgs: Vec<Elem> = (0..p.rank()).map(|j| q.image_of_gen(off + j)).collect();
            inj.push(AbHom::from_images(p.clone(), q.group.clone(), &imgs)?);
            let pim: Vec<Elem> = (0..q.group.rank())
                .map(|g| q.gen_lift(g)[off..off + p.rank()].to_vec())
                .collect();
            proj.push(AbHom::from_images(q.group.clone(), p.clone(), &pim)?);
            off += p.rank();
        }
        Ok(DirectSum {
            group: q.group,
            parts: parts.to_vec(),
            inj,
            proj,
        })
    }

    pub fn embed(&self, k: usize, x: &[i64]) -> Elem {
        self.inj[k].apply(x)
    }

    pub fn component(&self, k: usize, z: &[i64]) -> Elem {
        self.proj[k].apply(z)
    }

    pub fn combine(&self, xs: &[Elem]) -> Elem {
        let mut acc = self.group.zero();
        for (k, x) in xs.iter().enumerate() {
            self.group.add_assign(&mut acc, &self.embed(k, x));
        }
        acc
    }
}

/// `A ⊗_Z B` with its bilinear witness.
#[derive(Clone, Debug)]
pub struct AbTensor {
    pub a: FinAb,
    pub b: FinAb,
    pub q: Quotient,
}

impl AbTensor {
    pub fn group(&self) -> &FinAb {
        &self.q.group
    }

    pub fn pair(&self, x: &[i64], y: &[i64]) -> Elem {
        let nb = self.b.rank();
        let mut z = Vec::new();
        for (i, xi) in x.iter().enumerate() {
            if *xi == 0 {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if *yj != 0 {
                    z.push((i * nb + j, xi * yj));
                }
            }
        }
        self.q.project_sparse(&z)
    }

    /// Writes `z` as `Σ c · (a_i ⊗ b_j)` over generator pairs.
    pub fn expand(&self, z: &[i64]) -> Vec<(usize, usize, i64)> {
        let nb = self.b.rank();
        self.q
            .lift(z)
            .into_iter()
            .enumerate()
            .filter(|(_, c)| *c != 0)
            .map(|(k, c)| (k / nb, k % nb, c))
            .collect()
    }

    /// `f ⊗ g` from `self` into `other`.
    pub fn map(&self, other: &AbTensor, f: &AbHom, g: &AbHom) -> AbHom {
        let imgs: Vec<Elem> = (0..self.group().rank())
            .map(|k| {
                let mut acc = other.group().zero();
                for (i, j, c) in self.expand(&self.group().gen(k)) {
                    let t = other.pair(&f.image_of_gen(i), &g.image_of_gen(j));
                    other
                        .group()
                        .add_assign(&mut acc, &other.group().scale(c, &t));
                }
                acc
            })
            .collect();
        AbHom::from_images(self.group().clone(), other.group().clone(), &imgs)
            .expect("tensor of homomorphisms is well defined")
    }
}

pub fn ab_tensor(a: &FinAb, b: &FinAb) -> Result<AbTensor> {
    let orders: Vec<i64> = a
        .factors()
        .iter()
        .flat_map(|x| b.factors().iter().map(move |y| gcd(*x, *y)))
        .collect();
    let q = ab_normal_form(&orders, &[])?;
    Ok(AbTensor {
        a: a.clone(),
        b: b.clone(),
        q,
    })
}

/// `Hom(A, B)` as a group, with conversion to and from [`AbHom`].
#[derive(Clone, Debug)]
pub struct HomGroup {
    pub src: FinAb,
    pub tgt: FinAb,
    pub q: Quotient,
}

impl HomGroup {
    pub fn group(&self) -> &FinAb {
        &self.q.group
    }

    fn slot_step(&self, i: usize, j: usize) -> i64 {
        let bi = self.tgt.factors()[i];
        bi / gcd(bi, self.src.factors()[j])
    }

    pub fn to_hom(&self, z: &[i64]) -> AbHom {
        let c = self.q.lift(z);
        let ns = self.src.rank();
        let m = (0..self.tgt.rank())
            .map(|i| {
                (0..ns)
                    .map(|j| c[i * ns + j] * self.slot_step(i, j))
                    .collect()
            })
            .collect();
        AbHom::from_matrix(self.src.clone(), self.tgt.clone(), m)
    }

    pub fn from_hom(&self, h: &AbHom) -> Elem {
        let ns = self.src.rank();
        let mut c = vec![0i64; self.tgt.rank() * ns];
        for i in 0..self.tgt.rank() {
            for j in 0..ns {
                c[i * ns + j] = h.m[i][j] / self.slot_step(i, j);
            }
        }
        self.q.project(&c)
    }

    pub fn elements(&self) -> impl Iterator<Item = AbHom> + '_ {
        self.group().elements().map(move |z| self.to_hom(&z))
    }
}

pub fn ab_hom(a: &FinAb, b: &FinAb) -> Result<HomGroup> {
    let orders: Vec<i64> = b
        .factors()
        .iter()
        .flat_map(|y| a.factors().iter().map(move |x| gcd(*x, *y)))
        .collect();
    let q = ab_normal_form(&orders, &[])?;
    Ok(HomGroup {
        src: a.clone(),
        tgt: b.clone(),
        q,
    })
}
