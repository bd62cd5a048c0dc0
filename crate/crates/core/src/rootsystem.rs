//! Finite root systems of types A–G with Chevalley structure constants,
//! the Weyl group (lengths, dot-action) and the signed Bruhat edge graph.
//!
//! Conventions fixed here and relied on everywhere else:
//!
//! * Weights live in simple-root coordinates: λ = Σ n_i α_i.
//! * Positive roots are ordered by height, then lexicographically by
//!   coordinates. All PBW monomials and structure constants refer to this
//!   order.
//! * The symmetric invariant form is normalized so short roots have
//!   (α, α) = 2.
//! * Structure constants come from the extraspecial-pair scheme with the
//!   global sign chosen so that in type A₂ the elements f₁₂ := [f₁, f₂] and
//!   e₁₂ := [e₂, e₁] are exactly the basis vectors attached to α₁+α₂.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

// ==================== series and Cartan data ====================

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Series {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Series::A => 'A',
            Series::B => 'B',
            Series::C => 'C',
            Series::D => 'D',
            Series::E => 'E',
            Series::F => 'F',
            Series::G => 'G',
        };
        write!(f, "{c}")
    }
}

impl std::str::FromStr for Series {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "A" | "a" => Ok(Series::A),
            "B" | "b" => Ok(Series::B),
            "C" | "c" => Ok(Series::C),
            "D" | "d" => Ok(Series::D),
            "E" | "e" => Ok(Series::E),
            "F" | "f" => Ok(Series::F),
            "G" | "g" => Ok(Series::G),
            _ => Err(format!("unknown series `{s}`")),
        }
    }
}

/// A weight in simple-root coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn zero(rank: usize) -> Self {
        Weight(vec![0; rank])
    }

    pub fn add(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Weight {
        Weight(self.0.iter().map(|a| -a).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L(")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ")")
    }
}

/// Basis element of 𝔤: raising/lowering vectors indexed by positive roots
/// plus the simple coroots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GBasis {
    /// f-vector (negative root space) for positive root index r.
    F(usize),
    /// Simple coroot h_i.
    H(usize),
    /// e-vector (positive root space) for positive root index r.
    E(usize),
}

// ==================== the root system ====================

#[derive(Clone, Debug)]
pub struct RootSystem {
    pub series: Series,
    pub rank: usize,
    /// cartan[i][j] = ⟨α_j, α_i^∨⟩.
    pub cartan: Vec<Vec<i64>>,
    /// d_i = (α_i, α_i)/2 ∈ {1, 2, 3}; short roots have d = 1.
    pub d: Vec<i64>,
    /// Positive roots in simple-root coordinates, height-then-lex order.
    pub positive_roots: Vec<Vec<i64>>,
    /// Coordinates → index into `positive_roots`.
    root_index: HashMap<Vec<i64>, usize>,
    /// (β_r, β_r)/2 per positive root.
    pub d_root: Vec<i64>,
    /// Coroot β_r^∨ expanded over simple coroots.
    pub coroot_coords: Vec<Vec<i64>>,
    /// N_{α,β} for pairs of positive roots with α+β a root, keyed by
    /// (index α, index β) with index α < index β.
    nspecial: HashMap<(usize, usize), i64>,
    /// Sum of all positive roots = 2ρ, in simple-root coordinates.
    pub two_rho: Vec<i64>,
}

fn cartan_matrix(series: Series, rank: usize) -> Result<(Vec<Vec<i64>>, Vec<i64>), String> {
    let n = rank;
    let chain = |n: usize| -> Vec<Vec<i64>> {
        let mut a = vec![vec![0i64; n]; n];
        for i in 0..n {
            a[i][i] = 2;
            if i + 1 < n {
                a[i][i + 1] = -1;
                a[i + 1][i] = -1;
            }
        }
        a
    };
    match series {
        Series::A => {
            if n < 1 {
                return Err("type A needs rank ≥ 1".into());
            }
            Ok((chain(n), vec![1; n]))
        }
        Series::B => {
            if n < 2 {
                return Err("type B needs rank ≥ 2".into());
            }
            let mut a = chain(n);
            // α_n short: ⟨α_n, α_{n-1}^∨⟩ = -1, ⟨α_{n-1}, α_n^∨⟩ = -2.
            a[n - 2][n - 1] = -1;
            a[n - 1][n - 2] = -2;
            let mut d = vec![2; n];
            d[n - 1] = 1;
            Ok((a, d))
        }
        Series::C => {
            if n < 2 {
                return Err("type C needs rank ≥ 2".into());
            }
            let mut a = chain(n);
            // α_n long.
            a[n - 2][n - 1] = -2;
            a[n - 1][n - 2] = -1;
            let mut d = vec![1; n];
            d[n - 1] = 2;
            Ok((a, d))
        }
        Series::D => {
            if n < 3 {
                return Err("type D needs rank ≥ 3".into());
            }
            let mut a = chain(n - 1);
            a.iter_mut().for_each(|row| row.push(0));
            a.push(vec![0; n]);
            a[n - 1][n - 1] = 2;
            a[n - 3][n - 1] = -1;
            a[n - 1][n - 3] = -1;
            Ok((a, vec![1; n]))
        }
        Series::E => {
            if !(6..=8).contains(&n) {
                return Err("type E needs rank 6, 7 or 8".into());
            }
            // Bourbaki: chain 1-3-4-5-…-n with node 2 attached to node 4.
            let mut a = vec![vec![0i64; n]; n];
            for i in 0..n {
                a[i][i] = 2;
            }
            let mut link = |i: usize, j: usize| {
                a[i - 1][j - 1] = -1;
                a[j - 1][i - 1] = -1;
            };
            link(1, 3);
            link(3, 4);
            link(2, 4);
            for i in 4..n {
                link(i, i + 1);
            }
            Ok((a, vec![1; n]))
        }
        Series::F => {
            if n != 4 {
                return Err("type F needs rank 4".into());
            }
            let mut a = chain(4);
            // α_1, α_2 long; α_3, α_4 short.
            a[1][2] = -1;
            a[2][1] = -2;
            Ok((a, vec![2, 2, 1, 1]))
        }
        Series::G => {
            if n != 2 {
                return Err("type G needs rank 2".into());
            }
            // α_1 short, α_2 long.
            let a = vec![vec![2, -3], vec![-1, 2]];
            Ok((a, vec![1, 3]))
        }
    }
}

impl RootSystem {
    pub fn build(series: Series, rank: usize) -> Result<RootSystem, String> {
        let (cartan, d) = cartan_matrix(series, rank)?;
        let mut rs = RootSystem {
            series,
            rank,
            cartan,
            d,
            positive_roots: Vec::new(),
            root_index: HashMap::new(),
            d_root: Vec::new(),
            coroot_coords: Vec::new(),
            nspecial: HashMap::new(),
            two_rho: vec![0; rank],
        };
        rs.generate_positive_roots();
        rs.compute_root_data();
        rs.compute_structure_constants();
        Ok(rs)
    }

    /// ⟨λ, α_i^∨⟩ for λ in simple-root coordinates.
    pub fn pairing_simple(&self, lambda: &[i64], i: usize) -> i64 {
        lambda
            .iter()
            .zip(&self.cartan[i])
            .map(|(n, a)| n * a)
            .sum()
    }

    /// Symmetric form (λ, μ), short roots normalized to length 2.
    pub fn inner(&self, lambda: &[i64], mu: &[i64]) -> i64 {
        let mut s = 0;
        for i in 0..self.rank {
            for j in 0..self.rank {
                s += lambda[i] * mu[j] * self.d[i] * self.cartan[i][j];
            }
        }
        s
    }

    /// ⟨λ, β^∨⟩ = 2(λ, β)/(β, β) for an arbitrary root β.
    pub fn pairing_root(&self, lambda: &[i64], beta: &[i64]) -> i64 {
        let num = 2 * self.inner(lambda, beta);
        let den = self.inner(beta, beta);
        debug_assert_eq!(num % den, 0);
        num / den
    }

    pub fn num_positive_roots(&self) -> usize {
        self.positive_roots.len()
    }

    pub fn root_idx(&self, coords: &[i64]) -> Option<usize> {
        self.root_index.get(coords).copied()
    }

    pub fn is_root(&self, coords: &[i64]) -> bool {
        if self.root_index.contains_key(coords) {
            return true;
        }
        let neg: Vec<i64> = coords.iter().map(|c| -c).collect();
        self.root_index.contains_key(&neg)
    }

    fn generate_positive_roots(&mut self) {
        let mut set: Vec<Vec<i64>> = Vec::new();
        for i in 0..self.rank {
            let mut c = vec![0i64; self.rank];
            c[i] = 1;
            set.push(c);
        }
        let mut changed = true;
        while changed {
            changed = false;
            let snapshot = set.clone();
            for beta in &snapshot {
                for i in 0..self.rank {
                    // Root string through β in direction α_i: q = p − ⟨β, α_i^∨⟩.
                    let mut p = 0i64;
                    loop {
                        let mut down = beta.clone();
                        down[i] -= p + 1;
                        let in_set = snapshot.contains(&down) || {
                            let neg: Vec<i64> = down.iter().map(|c| -c).collect();
                            snapshot.contains(&neg)
                        };
                        if in_set {
                            p += 1;
                        } else {
                            break;
                        }
                    }
                    let q = p - self.pairing_simple(beta, i);
                    if q > 0 {
                        let mut up = beta.clone();
                        up[i] += 1;
                        if !set.contains(&up) {
                            set.push(up);
                            changed = true;
                        }
                    }
                }
            }
        }
        set.sort_by_key(|c| (c.iter().sum::<i64>(), c.clone()));
        for (idx, c) in set.iter().enumerate() {
            self.root_index.insert(c.clone(), idx);
        }
        self.positive_roots = set;
    }

    fn compute_root_data(&mut self) {
        let mut two_rho = vec![0i64; self.rank];
        for beta in &self.positive_roots {
            for (t, c) in two_rho.iter_mut().zip(beta) {
                *t += c;
            }
        }
        self.two_rho = two_rho;
        for beta in &self.positive_roots {
            let len2 = self.inner(beta, beta);
            debug_assert_eq!(len2 % 2, 0);
            let d_beta = len2 / 2;
            self.d_root.push(d_beta);
            // β^∨ = Σ k_i d_i / d_β · α_i^∨.
            let coroot: Vec<i64> = beta
                .iter()
                .zip(&self.d)
                .map(|(k, di)| {
                    let num = k * di;
                    debug_assert_eq!(num % d_beta, 0);
                    num / d_beta
                })
                .collect();
            self.coroot_coords.push(coroot);
        }
    }

    /// Number p of steps down the α-string through β: max k with β − kα a root.
    fn string_down(&self, alpha: &[i64], beta: &[i64]) -> i64 {
        let mut p = 0i64;
        loop {
            let c: Vec<i64> = beta
                .iter()
                .zip(alpha)
                .map(|(b, a)| b - (p + 1) * a)
                .collect();
            if c.iter().all(|&x| x == 0) || !self.is_root(&c) {
                break;
            }
            p += 1;
        }
        p
    }

    fn compute_structure_constants(&mut self) {
        // Process sums γ in increasing height; for each γ fix the
        // extraspecial pair (ξ, η), ξ minimal with ξ + η = γ, and derive the
        // other special pairs from it. The global extraspecial sign is +1;
        // in the root order here the first simple root of A₂ is α₂ = [0,1],
        // so this choice makes [f₁, f₂] = f₁₂ and [e₂, e₁] = e₁₂.
        let n = self.positive_roots.len();
        for g in 0..n {
            let gamma = self.positive_roots[g].clone();
            let mut pairs: Vec<(usize, usize)> = Vec::new();
            for a in 0..n {
                for b in (a + 1)..n {
                    let sum: Vec<i64> = self.positive_roots[a]
                        .iter()
                        .zip(&self.positive_roots[b])
                        .map(|(x, y)| x + y)
                        .collect();
                    if sum == gamma {
                        pairs.push((a, b));
                    }
                }
            }
            if pairs.is_empty() {
                continue;
            }
            pairs.sort();
            let (xi, eta) = pairs[0];
            let p = self.string_down(
                &self.positive_roots[xi].clone(),
                &self.positive_roots[eta].clone(),
            );
            self.nspecial.insert((xi, eta), p + 1);
            let gg = self.inner(&gamma, &gamma);
            let n_xi_eta = p + 1;
            for &(a, b) in &pairs[1..] {
                // Carter's four-root relation applied to (ξ, η, −α, −β):
                //   N_{α,β} = (γ,γ)/N_{ξ,η} · [ N_{η,−α} N_{ξ,−β} / (η−α, η−α)
                //                             + N_{−α,ξ} N_{η,−β} / (ξ−α, ξ−α) ]
                let alpha = self.positive_roots[a].clone();
                let beta = self.positive_roots[b].clone();
                let xi_r = self.positive_roots[xi].clone();
                let eta_r = self.positive_roots[eta].clone();
                let neg = |v: &[i64]| -> Vec<i64> { v.iter().map(|x| -x).collect() };
                let mut num = 0i64;
                let mut den = 1i64;
                let eta_m_alpha: Vec<i64> =
                    eta_r.iter().zip(&alpha).map(|(x, y)| x - y).collect();
                if self.is_root(&eta_m_alpha) {
                    let t = self.n_coords(&eta_r, &neg(&alpha)) * self.n_coords(&xi_r, &neg(&beta));
                    let l = self.inner(&eta_m_alpha, &eta_m_alpha);
                    num = num * l + t * den;
                    den *= l;
                }
                let xi_m_alpha: Vec<i64> = xi_r.iter().zip(&alpha).map(|(x, y)| x - y).collect();
                if self.is_root(&xi_m_alpha) {
                    let t = self.n_coords(&neg(&alpha), &xi_r) * self.n_coords(&eta_r, &neg(&beta));
                    let l = self.inner(&xi_m_alpha, &xi_m_alpha);
                    num = num * l + t * den;
                    den *= l;
                }
                let total_num = gg * num;
                let total_den = den * n_xi_eta;
                assert_eq!(
                    total_num % total_den,
                    0,
                    "non-integral structure constant for pair {a},{b}"
                );
                let val = total_num / total_den;
                assert_ne!(val, 0, "vanishing structure constant for a special pair");
                self.nspecial.insert((a, b), val);
            }
        }
    }

    /// N_{α,β} for arbitrary (signed) roots given by coordinates, with the
    /// convention [x_α, x_β] = N_{α,β} x_{α+β} whenever α+β is a root.
    /// Returns 0 when α+β is not a root (or is zero — the [e, f] = h case is
    /// handled by `bracket`).
    pub fn n_coords(&self, alpha: &[i64], beta: &[i64]) -> i64 {
        let sum: Vec<i64> = alpha.iter().zip(beta).map(|(x, y)| x + y).collect();
        if sum.iter().all(|&x| x == 0) || !self.is_root(&sum) {
            return 0;
        }
        let a_pos = self.root_index.contains_key(alpha);
        let b_pos = self.root_index.contains_key(beta);
        let neg = |v: &[i64]| -> Vec<i64> { v.iter().map(|x| -x).collect() };
        match (a_pos, b_pos) {
            (true, true) => self.n_pos(self.root_index[alpha], self.root_index[beta]),
            (false, false) => -self.n_coords(&neg(alpha), &neg(beta)),
            (false, true) => -self.n_coords(beta, alpha),
            (true, false) => {
                if self.root_index.contains_key(&sum) {
                    // α positive, β negative, α+β positive. Three-root cycle
                    // for α + β + γ = 0: N_{α,β} = (γ,γ)/(α,α) · N_{β,γ},
                    // with β and γ both negative.
                    let gamma = neg(&sum);
                    let gg = self.inner(&gamma, &gamma);
                    let aa = self.inner(alpha, alpha);
                    let n_bg = -self.n_pos(self.root_index[&neg(beta)], self.root_index[&sum]);
                    let num = gg * n_bg;
                    debug_assert_eq!(num % aa, 0);
                    num / aa
                } else {
                    // α+β negative: flip both signs and swap; that lands in
                    // the previous case.
                    -self.n_coords(&neg(alpha), &neg(beta))
                }
            }
        }
    }

    /// N_{β_a, β_b} for positive roots by index (0 if the sum is not a root).
    pub fn n_pos(&self, a: usize, b: usize) -> i64 {
        if a == b {
            return 0;
        }
        if a < b {
            self.nspecial.get(&(a, b)).copied().unwrap_or(0)
        } else {
            -self.nspecial.get(&(b, a)).copied().unwrap_or(0)
        }
    }

    /// Ordered basis of 𝔤: all f's (by root index), the simple coroots,
    /// then all e's.
    pub fn g_basis(&self) -> Vec<GBasis> {
        let n = self.positive_roots.len();
        let mut out = Vec::with_capacity(2 * n + self.rank);
        out.extend((0..n).map(GBasis::F));
        out.extend((0..self.rank).map(GBasis::H));
        out.extend((0..n).map(GBasis::E));
        out
    }

    pub fn dim_g(&self) -> usize {
        2 * self.positive_roots.len() + self.rank
    }

    /// Weight of a 𝔤-basis element.
    pub fn g_weight(&self, x: GBasis) -> Weight {
        match x {
            GBasis::E(r) => Weight(self.positive_roots[r].clone()),
            GBasis::H(_) => Weight::zero(self.rank),
            GBasis::F(r) => Weight(self.positive_roots[r].iter().map(|c| -c).collect()),
        }
    }

    /// Lie bracket of basis elements, expanded over the basis.
    pub fn bracket(&self, x: GBasis, y: GBasis) -> Vec<(GBasis, i64)> {
        use GBasis::*;
        match (x, y) {
            (H(_), H(_)) => Vec::new(),
            (H(i), E(r)) => {
                let c = self.pairing_simple(&self.positive_roots[r], i);
                if c == 0 { Vec::new() } else { vec![(E(r), c)] }
            }
            (H(i), F(r)) => {
                let c = -self.pairing_simple(&self.positive_roots[r], i);
                if c == 0 { Vec::new() } else { vec![(F(r), c)] }
            }
            (E(_), H(_)) | (F(_), H(_)) => self
                .bracket(y, x)
                .into_iter()
                .map(|(b, c)| (b, -c))
                .collect(),
            (E(r), F(s)) if r == s => self.coroot_coords[r]
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0)
                .map(|(i, c)| (H(i), *c))
                .collect(),
            (F(s), E(r)) if r == s => self.coroot_coords[r]
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0)
                .map(|(i, c)| (H(i), -*c))
                .collect(),
            _ => {
                let (ca, cb): (Vec<i64>, Vec<i64>) = (self.signed_coords(x), self.signed_coords(y));
                let n = self.n_coords(&ca, &cb);
                if n == 0 {
                    return Vec::new();
                }
                let sum: Vec<i64> = ca.iter().zip(&cb).map(|(u, v)| u + v).collect();
                if let Some(idx) = self.root_index.get(&sum) {
                    vec![(E(*idx), n)]
                } else {
                    let nsum: Vec<i64> = sum.iter().map(|c| -c).collect();
                    let idx = self.root_index[&nsum];
                    vec![(F(idx), n)]
                }
            }
        }
    }

    fn signed_coords(&self, x: GBasis) -> Vec<i64> {
        match x {
            GBasis::E(r) => self.positive_roots[r].clone(),
            GBasis::F(r) => self.positive_roots[r].iter().map(|c| -c).collect(),
            GBasis::H(_) => unreachable!("coroots have no root coordinates"),
        }
    }

    /// dim L(λ) by the Weyl dimension formula, for dominant λ in
    /// simple-root coordinates.
    pub fn weyl_dim(&self, lambda: &Weight) -> num::BigInt {
        use num::BigInt;
        let mut num_prod = BigInt::from(1);
        let mut den_prod = BigInt::from(1);
        for beta in self.positive_roots.iter() {
            // ⟨λ+ρ, β^∨⟩ = Σ_i coroot_i · (λ_i-pairing…): compute via the
            // doubled weight 2(λ+ρ) to stay integral.
            let two_lam_rho: Vec<i64> = lambda
                .0
                .iter()
                .zip(&self.two_rho)
                .map(|(l, t)| 2 * l + t)
                .collect();
            let n = self.pairing_root(&two_lam_rho, beta);
            let d = self.pairing_root(&self.two_rho, beta);
            num_prod *= BigInt::from(n);
            den_prod *= BigInt::from(d);
        }
        use num::Zero;
        debug_assert!((&num_prod % &den_prod).is_zero());
        num_prod / den_prod
    }
}

// ==================== Weyl group ====================

#[derive(Clone, Debug)]
pub struct WeylElement {
    /// Shortlex-minimal reduced word (indices of simple reflections).
    pub reduced_word: Vec<usize>,
    /// Row-major rank×rank matrix acting on simple-root coordinates.
    pub action_matrix: Vec<i64>,
    pub length: usize,
}

#[derive(Clone, Debug)]
pub struct WeylGroup {
    pub rank: usize,
    pub elements: Vec<WeylElement>,
    index: HashMap<Vec<i64>, usize>,
    /// right_mul[w][i] = index of w·s_i.
    pub right_mul: Vec<Vec<usize>>,
    pub longest: usize,
}

fn mat_mul(rank: usize, a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut c = vec![0i64; rank * rank];
    for i in 0..rank {
        for k in 0..rank {
            let aik = a[i * rank + k];
            if aik == 0 {
                continue;
            }
            for j in 0..rank {
                c[i * rank + j] += aik * b[k * rank + j];
            }
        }
    }
    c
}

fn mat_apply(rank: usize, m: &[i64], v: &[i64]) -> Vec<i64> {
    (0..rank)
        .map(|i| (0..rank).map(|j| m[i * rank + j] * v[j]).sum())
        .collect()
}

impl WeylGroup {
    pub fn build(rs: &RootSystem) -> WeylGroup {
        let rank = rs.rank;
        // Simple reflection matrices: s_i(α_j) = α_j − ⟨α_j, α_i^∨⟩ α_i.
        let mut simple_mats = Vec::with_capacity(rank);
        for i in 0..rank {
            let mut m = vec![0i64; rank * rank];
            for j in 0..rank {
                m[j * rank + j] = 1;
            }
            for j in 0..rank {
                m[i * rank + j] -= rs.cartan[i][j];
            }
            simple_mats.push(m);
        }
        let id: Vec<i64> = {
            let mut m = vec![0i64; rank * rank];
            for j in 0..rank {
                m[j * rank + j] = 1;
            }
            m
        };
        let mut elements = vec![WeylElement {
            reduced_word: Vec::new(),
            action_matrix: id.clone(),
            length: 0,
        }];
        let mut index = HashMap::new();
        index.insert(id, 0usize);
        let mut right_mul: Vec<Vec<usize>> = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(w) = queue.pop_front() {
            let mat = elements[w].action_matrix.clone();
            let word = elements[w].reduced_word.clone();
            let len = elements[w].length;
            let mut row = Vec::with_capacity(rank);
            for (i, smat) in simple_mats.iter().enumerate() {
                let prod = mat_mul(rank, &mat, smat);
                let idx = match index.get(&prod) {
                    Some(&idx) => idx,
                    None => {
                        let mut new_word = word.clone();
                        new_word.push(i);
                        // ℓ(w s_i) = ℓ(w) + 1 iff w(α_i) > 0.
                        let col: Vec<i64> = (0..rank).map(|r| mat[r * rank + i]).collect();
                        let up = col.iter().all(|&c| c >= 0);
                        debug_assert!(up, "BFS discovered an element by a descent");
                        let idx = elements.len();
                        elements.push(WeylElement {
                            reduced_word: new_word,
                            action_matrix: prod.clone(),
                            length: len + 1,
                        });
                        index.insert(prod, idx);
                        queue.push_back(idx);
                        idx
                    }
                };
                row.push(idx);
            }
            right_mul.push(row);
        }
        // BFS order is by length; right_mul rows were pushed in that order.
        let longest = elements
            .iter()
            .enumerate()
            .max_by_key(|(_, e)| e.length)
            .map(|(i, _)| i)
            .unwrap();
        WeylGroup {
            rank,
            elements,
            index,
            right_mul,
            longest,
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn lookup(&self, matrix: &[i64]) -> Option<usize> {
        self.index.get(matrix).copied()
    }

    /// Apply the plain (unshifted) action of element w to λ.
    pub fn apply(&self, w: usize, lambda: &[i64]) -> Vec<i64> {
        mat_apply(self.rank, &self.elements[w].action_matrix, lambda)
    }

    /// Dot-action w·μ = w(μ+ρ) − ρ.
    pub fn dot_action(&self, rs: &RootSystem, w: usize, mu: &Weight) -> Weight {
        let doubled: Vec<i64> = mu
            .0
            .iter()
            .zip(&rs.two_rho)
            .map(|(m, t)| 2 * m + t)
            .collect();
        let moved = self.apply(w, &doubled);
        Weight(
            moved
                .iter()
                .zip(&rs.two_rho)
                .map(|(m, t)| {
                    debug_assert_eq!((m - t) % 2, 0);
                    (m - t) / 2
                })
                .collect(),
        )
    }

    /// Group multiplication (by matrices).
    pub fn mul(&self, a: usize, b: usize) -> usize {
        let m = mat_mul(
            self.rank,
            &self.elements[a].action_matrix,
            &self.elements[b].action_matrix,
        );
        self.index[&m]
    }
}

/// Where a weight sits relative to the dot-action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DotPosition {
    /// μ itself is dominant (and dot-regular).
    Dominant,
    /// The dot-orbit of μ is singular: some w ≠ e fixes μ.
    Singular,
    /// w·μ is dominant for the given Weyl element w ≠ e.
    Conjugate { dominant: Weight, via: usize },
}

impl WeylGroup {
    /// Classify μ: dominant, dot-singular, or conjugate to a dominant
    /// weight (with the conjugating element).
    pub fn is_dot_dominant(&self, rs: &RootSystem, mu: &Weight) -> DotPosition {
        // Work with v = 2(μ+ρ); μ is dot-regular iff v has no zero pairing
        // along the way to the dominant chamber.
        let mut v: Vec<i64> = mu
            .0
            .iter()
            .zip(&rs.two_rho)
            .map(|(m, t)| 2 * m + t)
            .collect();
        let mut word: Vec<usize> = Vec::new();
        loop {
            let mut descent = None;
            for i in 0..self.rank {
                let p = rs.pairing_simple(&v, i);
                if p == 0 {
                    return DotPosition::Singular;
                }
                if p < 0 {
                    descent = Some(i);
                    break;
                }
            }
            match descent {
                None => break,
                Some(i) => {
                    // Reflect: s_i(v) = v − ⟨v, α_i^∨⟩ α_i.
                    let p = rs.pairing_simple(&v, i);
                    v[i] -= p;
                    word.push(i);
                }
            }
        }
        if word.is_empty() {
            return DotPosition::Dominant;
        }
        // v_final = s_{i_k} ⋯ s_{i_1} (2(μ+ρ)), so w = s_{i_k} ⋯ s_{i_1}.
        let mut w = 0usize;
        for &i in word.iter().rev() {
            w = self.mul(w, self.simple(i));
        }
        let dominant = Weight(
            v.iter()
                .zip(&rs.two_rho)
                .map(|(x, t)| (x - t) / 2)
                .collect(),
        );
        debug_assert_eq!(self.dot_action(rs, w, mu), dominant);
        DotPosition::Conjugate { dominant, via: w }
    }

    /// Index of the simple reflection s_i.
    pub fn simple(&self, i: usize) -> usize {
        self.right_mul[0][i]
    }
}

// ==================== Bruhat graph with signs ====================

#[derive(Clone, Debug)]
pub struct BruhatGraph {
    /// Edges (w, w′) with ℓ(w′) = ℓ(w) + 1 and w′ = s_β w for a reflection.
    pub edges: Vec<(usize, usize)>,
    /// ±1 per edge, solving the square-parity conditions.
    pub signs: Vec<i64>,
    /// Element indices grouped by length.
    pub by_length: Vec<Vec<usize>>,
    edge_index: HashMap<(usize, usize), usize>,
}

impl BruhatGraph {
    pub fn build(rs: &RootSystem, wg: &WeylGroup) -> BruhatGraph {
        let rank = rs.rank;
        let max_len = wg.elements[wg.longest].length;
        let mut by_length = vec![Vec::new(); max_len + 1];
        for (i, e) in wg.elements.iter().enumerate() {
            by_length[e.length].push(i);
        }
        // Reflection matrices for every positive root.
        let mut refl = Vec::new();
        for beta in &rs.positive_roots {
            let mut m = vec![0i64; rank * rank];
            for j in 0..rank {
                m[j * rank + j] = 1;
            }
            for j in 0..rank {
                let mut unit = vec![0i64; rank];
                unit[j] = 1;
                let c = rs.pairing_root(&unit, beta);
                for r in 0..rank {
                    m[r * rank + j] -= c * beta[r];
                }
            }
            refl.push(m);
        }
        let mut edges = Vec::new();
        let mut edge_index = HashMap::new();
        for (w, e) in wg.elements.iter().enumerate() {
            for rmat in &refl {
                let prod = mat_mul(rank, rmat, &e.action_matrix);
                let w2 = wg.lookup(&prod).expect("reflection stays in W");
                if wg.elements[w2].length == e.length + 1 {
                    let key = (w, w2);
                    if !edge_index.contains_key(&key) {
                        edge_index.insert(key, edges.len());
                        edges.push(key);
                    }
                }
            }
        }
        let signs = solve_signs(wg, &edges, &edge_index);
        BruhatGraph {
            edges,
            signs,
            by_length,
            edge_index,
        }
    }

    pub fn edge(&self, w: usize, w2: usize) -> Option<usize> {
        self.edge_index.get(&(w, w2)).copied()
    }

    /// Outgoing edges from w.
    pub fn edges_from(&self, w: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, (a, _))| *a == w)
            .map(|(i, (_, b))| (i, *b))
    }
}

/// Assign ±1 to edges so every 4-edge square has sign product −1: solve the
/// parity system over GF(2) with free variables set to +1.
fn solve_signs(
    wg: &WeylGroup,
    edges: &[(usize, usize)],
    edge_index: &HashMap<(usize, usize), usize>,
) -> Vec<i64> {
    let nvars = edges.len();
    // Enumerate squares: pairs (w, w″) with two intermediate elements.
    let mut out: HashMap<usize, Vec<usize>> = HashMap::new();
    for &(a, b) in edges {
        out.entry(a).or_default().push(b);
    }
    let mut constraints: Vec<Vec<usize>> = Vec::new(); // variable index lists
    for (&w, mids) in &out {
        let mut targets: HashMap<usize, Vec<usize>> = HashMap::new();
        for &x in mids {
            if let Some(nexts) = out.get(&x) {
                for &w2 in nexts {
                    targets.entry(w2).or_default().push(x);
                }
            }
        }
        for (w2, xs) in targets {
            assert_eq!(
                xs.len(),
                2,
                "length-2 Bruhat interval must have exactly 2 intermediates"
            );
            let vars = vec![
                edge_index[&(w, xs[0])],
                edge_index[&(xs[0], w2)],
                edge_index[&(w, xs[1])],
                edge_index[&(xs[1], w2)],
            ];
            constraints.push(vars);
        }
    }
    let _ = wg;
    // GF(2) elimination on the constraint system Σ x_e ≡ 1 (mod 2).
    let words = (nvars + 1).div_ceil(64); // last bit = RHS
    let mut rows: Vec<Vec<u64>> = constraints
        .iter()
        .map(|vars| {
            let mut row = vec![0u64; words];
            for &v in vars {
                row[v / 64] ^= 1 << (v % 64);
            }
            row[nvars / 64] ^= 1 << (nvars % 64); // RHS bit: product must be −1
            row
        })
        .collect();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; nvars];
    let mut used_rows: Vec<(usize, Vec<u64>)> = Vec::new();
    for row in rows.iter_mut() {
        let mut r = row.clone();
        loop {
            let lead = (0..nvars).find(|&c| r[c / 64] >> (c % 64) & 1 == 1);
            match lead {
                None => {
                    // All variables eliminated; RHS must be 0 or the system
                    // is infeasible.
                    assert!(
                        r[nvars / 64] >> (nvars % 64) & 1 == 0,
                        "Bruhat sign system infeasible"
                    );
                    break;
                }
                Some(c) => match pivot_of_col[c] {
                    Some(pi) => {
                        let (_, ref prow) = used_rows[pi];
                        for (a, b) in r.iter_mut().zip(prow) {
                            *a ^= b;
                        }
                    }
                    None => {
                        pivot_of_col[c] = Some(used_rows.len());
                        used_rows.push((c, r));
                        break;
                    }
                },
            }
        }
    }
    // Back-substitute with free variables = 0 (sign +1), in decreasing
    // pivot-column order so every referenced variable is already final.
    let mut assign = vec![0u8; nvars];
    let mut order: Vec<usize> = (0..used_rows.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(used_rows[i].0));
    for &(ref c, ref row) in order.iter().map(|&i| &used_rows[i]) {
        let mut v = row[nvars / 64] >> (nvars % 64) & 1;
        for c2 in (c + 1)..nvars {
            if row[c2 / 64] >> (c2 % 64) & 1 == 1 {
                v ^= assign[c2] as u64;
            }
        }
        assign[*c] = v as u8;
    }
    assign
        .into_iter()
        .map(|b| if b == 1 { -1 } else { 1 })
        .collect()
}
