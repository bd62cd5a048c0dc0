//! Exact arithmetic in U(𝔫) for the negative nilpotent part 𝔫.
//!
//! A PBW monomial is an exponent vector over the positive roots in the
//! fixed height-then-lex order; the vector `k` stands for the ordered
//! product f_{β_N}^{k_N} ⋯ f_{β_1}^{k_1} (largest root leftmost). With this
//! realization, left multiplication by a generator f_γ only has to
//! straighten past factors of strictly larger root index, which keeps the
//! commutator recursion shallow.
//!
//! On top of the product: singular vectors c(w) of Verma modules (built by
//! left multiplication along reduced words), exact right division, and the
//! Bruhat edge maps of the BGG complex.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use num::{One, Zero};

use crate::linalg::{rat, solve_dense, Rat};
use crate::rootsystem::{RootSystem, Weight, WeylGroup};

/// Exponent vector over the positive roots (fixed order).
pub type Mono = Vec<u32>;

/// Exact-rational linear combination of PBW monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PBWElement {
    pub terms: BTreeMap<Mono, Rat>,
}

impl PBWElement {
    pub fn zero() -> Self {
        PBWElement { terms: BTreeMap::new() }
    }

    /// The unit 1 ∈ U(𝔫).
    pub fn one(num_roots: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0; num_roots], Rat::one());
        PBWElement { terms }
    }

    /// f_{β_r}^n as an element.
    pub fn generator_power(num_roots: usize, r: usize, n: u32) -> Self {
        let mut mono = vec![0; num_roots];
        mono[r] = n;
        let mut terms = BTreeMap::new();
        terms.insert(mono, Rat::one());
        PBWElement { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, mono: Mono, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(mono);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
        }
    }

    pub fn add(&self, other: &PBWElement) -> PBWElement {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &PBWElement) -> PBWElement {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> PBWElement {
        if c.is_zero() {
            return PBWElement::zero();
        }
        PBWElement {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v * c))
                .collect(),
        }
    }

    /// Weight −Σ k_r β_r common to all monomials; `None` when inhomogeneous
    /// or zero.
    pub fn weight(&self, rs: &RootSystem) -> Option<Weight> {
        let mut it = self.terms.keys();
        let first = it.next()?;
        let w = mono_drop(rs, first);
        for m in it {
            if mono_drop(rs, m) != w {
                return None;
            }
        }
        Some(Weight(w.iter().map(|c| -c).collect()))
    }

    /// Leading monomial under the natural lexicographic order on exponent
    /// vectors (largest last, used only for normalization).
    pub fn leading(&self) -> Option<(&Mono, &Rat)> {
        self.terms.iter().next_back()
    }

    /// Rescale so the leading coefficient is 1.
    pub fn normalize_leading(&self) -> PBWElement {
        match self.leading() {
            None => PBWElement::zero(),
            Some((_, c)) => {
                let inv = c.recip();
                self.scale(&inv)
            }
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }
}

/// Σ k_r β_r in simple-root coordinates (the negated weight).
pub fn mono_drop(rs: &RootSystem, mono: &Mono) -> Vec<i64> {
    let mut acc = vec![0i64; rs.rank];
    for (r, &k) in mono.iter().enumerate() {
        if k > 0 {
            for (a, b) in acc.iter_mut().zip(&rs.positive_roots[r]) {
                *a += k as i64 * b;
            }
        }
    }
    acc
}

// ==================== multiplication context ====================

/// Shared straightening context: a root system plus a memo table for
/// left-multiplication by single generators. Cheap to create; one per
/// parallel task.
pub struct PbwCtx<'a> {
    pub rs: &'a RootSystem,
    memo: RefCell<HashMap<(usize, Mono), PBWElement>>,
}

impl<'a> PbwCtx<'a> {
    pub fn new(rs: &'a RootSystem) -> Self {
        PbwCtx { rs, memo: RefCell::new(HashMap::new()) }
    }

    fn num_roots(&self) -> usize {
        self.rs.num_positive_roots()
    }

    /// f_γ · elem.
    pub fn lmul_gen(&self, gamma: usize, elem: &PBWElement) -> PBWElement {
        let mut out = PBWElement::zero();
        for (mono, coeff) in &elem.terms {
            let part = self.lmul_gen_mono(gamma, mono);
            for (m, c) in &part.terms {
                out.add_term(m.clone(), c * coeff);
            }
        }
        out
    }

    fn lmul_gen_mono(&self, gamma: usize, mono: &Mono) -> PBWElement {
        let max_idx = mono.iter().rposition(|&k| k > 0);
        match max_idx {
            Some(m) if m > gamma => {}
            _ => {
                // γ is ≥ every factor: prepend directly.
                let mut out_mono = mono.clone();
                out_mono[gamma] += 1;
                let mut terms = BTreeMap::new();
                terms.insert(out_mono, Rat::one());
                return PBWElement { terms };
            }
        }
        let key = (gamma, mono.clone());
        if let Some(hit) = self.memo.borrow().get(&key) {
            return hit.clone();
        }
        let m = max_idx.unwrap();
        // mono = f_m · rest; f_γ f_m = f_m f_γ + [f_γ, f_m].
        let mut rest = mono.clone();
        rest[m] -= 1;
        let inner = self.lmul_gen_mono(gamma, &rest);
        let mut out = self.lmul_gen(m, &inner);
        // [f_γ, f_m] = −N_{γ,m} f_{γ+m} when β_γ + β_m is a root.
        let sum: Vec<i64> = self.rs.positive_roots[gamma]
            .iter()
            .zip(&self.rs.positive_roots[m])
            .map(|(a, b)| a + b)
            .collect();
        if let Some(idx) = self.rs.root_idx(&sum) {
            let c = -self.rs.n_pos(gamma, m);
            debug_assert_ne!(c, 0);
            let part = self.lmul_gen_mono(idx, &rest);
            for (mm, cc) in &part.terms {
                out.add_term(mm.clone(), cc * rat(c));
            }
        }
        self.memo.borrow_mut().insert(key, out.clone());
        out
    }

    /// Full product a · b in normal form.
    pub fn multiply(&self, a: &PBWElement, b: &PBWElement) -> PBWElement {
        let mut out = PBWElement::zero();
        for (mono, coeff) in &a.terms {
            // Apply the factors of `mono` to b from the right end of the
            // product, i.e. smallest root index first.
            let mut acc = b.clone();
            for r in 0..mono.len() {
                for _ in 0..mono[r] {
                    acc = self.lmul_gen(r, &acc);
                }
            }
            for (m, c) in &acc.terms {
                out.add_term(m.clone(), c * coeff);
            }
        }
        out
    }

    // ==================== Kostant partitions ====================

    /// All PBW monomials of drop ν (i.e. Σ k_r β_r = ν), in deterministic
    /// order.
    pub fn kostant_monomials(&self, nu: &[i64]) -> Vec<Mono> {
        let n = self.num_roots();
        let mut out = Vec::new();
        let mut current = vec![0u32; n];
        fn rec(
            rs: &RootSystem,
            r: usize,
            remaining: &mut Vec<i64>,
            current: &mut Mono,
            out: &mut Vec<Mono>,
        ) {
            if remaining.iter().all(|&c| c == 0) {
                out.push(current.clone());
                return;
            }
            if r == 0 {
                return;
            }
            // Try exponents of root r−1 from high to low... low to high for
            // deterministic lexicographic output.
            let beta = &rs.positive_roots[r - 1];
            let max_k = remaining
                .iter()
                .zip(beta)
                .filter(|(_, b)| **b > 0)
                .map(|(rem, b)| rem / b)
                .min()
                .unwrap_or(0)
                .max(0);
            for k in 0..=max_k {
                if k > 0 {
                    for (rem, b) in remaining.iter_mut().zip(beta) {
                        *rem -= b;
                    }
                    if remaining.iter().any(|&c| c < 0) {
                        // Roll back and stop: larger k only gets worse.
                        for (rem, b) in remaining.iter_mut().zip(beta) {
                            *rem += b;
                        }
                        break;
                    }
                }
                current[r - 1] = k as u32;
                rec(rs, r - 1, remaining, current, out);
            }
            // Restore.
            let used = current[r - 1] as i64;
            for (rem, b) in remaining.iter_mut().zip(beta) {
                *rem += used * b;
            }
            current[r - 1] = 0;
        }
        if nu.iter().all(|&c| c >= 0) {
            let mut remaining = nu.to_vec();
            rec(self.rs, n, &mut remaining, &mut current, &mut out);
        }
        out
    }

    // ==================== singular vectors and division ====================

    /// The singular vector c(w): the element of U(𝔫) with c(w)·v_λ spanning
    /// the highest-weight line of M(w·λ) inside the Verma module M(λ).
    /// Normalized so the leading monomial has coefficient 1.
    pub fn singular_vector(&self, wg: &WeylGroup, lambda: &Weight, w: usize) -> PBWElement {
        let rs = self.rs;
        for i in 0..rs.rank {
            assert!(
                rs.pairing_simple(&lambda.0, i) >= 0,
                "singular_vector requires a dominant weight"
            );
        }
        let word = wg.elements[w].reduced_word.clone();
        // Peel from the left: for w = s_{j_1} ⋯ s_{j_k} and suffix
        // u = s_{j_{t+1}} ⋯ s_{j_k}, c(s_{j_t} u) = f_{j_t}^m c(u) with
        // m = ⟨u(λ+ρ), α_{j_t}^∨⟩.
        let two_lam_rho: Vec<i64> = lambda
            .0
            .iter()
            .zip(&rs.two_rho)
            .map(|(l, t)| 2 * l + t)
            .collect();
        let mut c = PBWElement::one(self.num_roots());
        let mut u = 0usize; // identity
        for t in (0..word.len()).rev() {
            let j = word[t];
            let moved = wg.apply(u, &two_lam_rho);
            let two_m = rs.pairing_simple(&moved, j);
            assert!(two_m > 0 && two_m % 2 == 0, "exponent must be a positive integer");
            let m = (two_m / 2) as u32;
            let fj = rs.root_idx(&simple_root(rs.rank, j)).expect("simple root");
            for _ in 0..m {
                c = self.lmul_gen(fj, &c);
            }
            u = wg.mul(wg.simple(j), u);
        }
        debug_assert_eq!(u, w, "reduced word did not rebuild the element");
        c.normalize_leading()
    }

    /// Solve x · q = p exactly. Errors when p is not right-divisible by q.
    pub fn divide_right(&self, p: &PBWElement, q: &PBWElement) -> Result<PBWElement, String> {
        if p.is_zero() {
            return Ok(PBWElement::zero());
        }
        let rs = self.rs;
        let wp = p.weight(rs).ok_or("p is not homogeneous")?;
        let wq = q.weight(rs).ok_or("q is not homogeneous")?;
        let nu_x: Vec<i64> = wq.0.iter().zip(&wp.0).map(|(a, b)| a - b).collect();
        let x_monos = self.kostant_monomials(&nu_x);
        if x_monos.is_empty() {
            return Err("not right-divisible: empty weight space".into());
        }
        let nu_p: Vec<i64> = wp.0.iter().map(|c| -c).collect();
        let p_monos = self.kostant_monomials(&nu_p);
        let index: HashMap<&Mono, usize> =
            p_monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
        // Column for each candidate monomial: m · q.
        let mut cols: Vec<Vec<Rat>> = Vec::with_capacity(x_monos.len());
        for m in &x_monos {
            let mut elem = PBWElement::zero();
            elem.add_term(m.clone(), Rat::one());
            let prod = self.multiply(&elem, q);
            let mut col = vec![Rat::zero(); p_monos.len()];
            for (mm, c) in &prod.terms {
                col[*index.get(mm).expect("product stays in the weight space")] = c.clone();
            }
            cols.push(col);
        }
        let a: Vec<Vec<Rat>> = (0..p_monos.len())
            .map(|i| cols.iter().map(|col| col[i].clone()).collect())
            .collect();
        let b: Vec<Rat> = p_monos
            .iter()
            .map(|m| p.terms.get(m).cloned().unwrap_or_else(Rat::zero))
            .collect();
        let sol = solve_dense(&a, &b).ok_or("not right-divisible")?;
        let mut x = PBWElement::zero();
        for (m, c) in x_monos.into_iter().zip(sol) {
            x.add_term(m, c);
        }
        // Exactness check (the solve can silently use a least-structure
        // solution only when the system is consistent, but verify anyway).
        debug_assert_eq!(self.multiply(&x, q), *p);
        Ok(x)
    }

    /// Bruhat edge map f_{w→w′} with c(w′) = f_{w→w′} · c(w).
    pub fn edge_map(
        &self,
        wg: &WeylGroup,
        lambda: &Weight,
        w: usize,
        w2: usize,
    ) -> Result<PBWElement, String> {
        let cw = self.singular_vector(wg, lambda, w);
        let cw2 = self.singular_vector(wg, lambda, w2);
        self.divide_right(&cw2, &cw)
    }
}

pub fn simple_root(rank: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0i64; rank];
    v[i] = 1;
    v
}
