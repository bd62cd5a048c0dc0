//! The BGG cochain complex of a weight-graded module at a dominant weight.
//!
//! For a module E with exact U(𝔫)-action and a dominant λ, the complex has
//! degree-d space ⊕_{ℓ(w)=d} E[w·λ] and differential blocks
//! sign(w→w′) · (action of the edge element f_{w→w′} ∈ U(𝔫)), where
//! c(w′) = f_{w→w′} · c(w) relates the singular vectors of the Verma
//! modules M(w·λ) ⊂ M(λ). The consistent edge signs make d² = 0.

use std::collections::HashMap;

use num::{One, Zero};

use crate::linalg::{Rat, SparseMat};
use crate::modules::WeightedModule;
use crate::pbw::{PBWElement, PbwCtx};
use crate::rootsystem::{
    BruhatGraph, DotPosition, RootSystem, Weight, WeylGroup,
};

#[derive(Clone, Debug)]
pub struct BGGComplex {
    pub lambda: Weight,
    /// Per degree d: the elements w of length d paired with the module
    /// basis indices spanning E[w·λ], in the fixed (length, word) order.
    pub spaces: Vec<Vec<(usize, Vec<usize>)>>,
    /// differentials[d] maps degree d to degree d+1
    /// (rows = dim BGG^{d+1}, cols = dim BGG^d).
    pub differentials: Vec<SparseMat>,
}

impl BGGComplex {
    pub fn dim(&self, d: usize) -> usize {
        self.spaces
            .get(d)
            .map_or(0, |v| v.iter().map(|(_, b)| b.len()).sum())
    }

    pub fn max_degree(&self) -> usize {
        self.spaces.len().saturating_sub(1)
    }

    pub fn euler_characteristic(&self) -> i64 {
        (0..self.spaces.len())
            .map(|d| {
                let s = self.dim(d) as i64;
                if d % 2 == 0 {
                    s
                } else {
                    -s
                }
            })
            .sum()
    }
}

/// Build the complex. λ must be dominant (pass the dominant orbit
/// representative; singular orbits contribute nothing and are the caller's
/// responsibility to skip).
pub fn build_bgg_complex(
    rs: &RootSystem,
    wg: &WeylGroup,
    bg: &BruhatGraph,
    module: &WeightedModule,
    lambda: &Weight,
) -> Result<BGGComplex, String> {
    for i in 0..rs.rank {
        if rs.pairing_simple(&lambda.0, i) < 0 {
            return Err(format!("weight {lambda} is not dominant"));
        }
    }
    let max_len = wg.elements[wg.longest].length;
    // Degree spaces and within-degree offsets.
    let mut spaces: Vec<Vec<(usize, Vec<usize>)>> = vec![Vec::new(); max_len + 1];
    let mut offset: HashMap<usize, usize> = HashMap::new(); // w → offset in its degree
    let mut wlam: Vec<Weight> = Vec::with_capacity(wg.order());
    for d in 0..=max_len {
        let mut ws = bg.by_length[d].clone();
        ws.sort_unstable(); // element indices are in (length, shortlex) order
        let mut off = 0usize;
        for w in ws {
            let mu = wg.dot_action(rs, w, lambda);
            let basis = module.weight_space(&mu);
            offset.insert(w, off);
            off += basis.len();
            spaces[d].push((w, basis));
            if wlam.len() <= w {
                wlam.resize(w + 1, Weight::zero(rs.rank));
            }
            wlam[w] = mu;
        }
    }
    let ctx = PbwCtx::new(rs);
    let mut sv_cache: HashMap<usize, PBWElement> = HashMap::new();
    let mut sv = |w: usize, ctx: &PbwCtx| -> PBWElement {
        sv_cache
            .entry(w)
            .or_insert_with(|| ctx.singular_vector(wg, lambda, w))
            .clone()
    };
    let dims: Vec<usize> = (0..=max_len)
        .map(|d| spaces[d].iter().map(|(_, b)| b.len()).sum())
        .collect();
    let mut differentials: Vec<SparseMat> = Vec::with_capacity(max_len);
    for d in 0..max_len {
        let mut mat = SparseMat::zero(dims[d + 1], dims[d]);
        for (w, src_basis) in &spaces[d] {
            if src_basis.is_empty() {
                continue;
            }
            for (_, w2) in bg.edges_from(*w) {
                let tgt = spaces[d + 1]
                    .iter()
                    .find(|(x, _)| x == &w2)
                    .map(|(_, b)| b)
                    .expect("edge target in next degree");
                if tgt.is_empty() {
                    continue;
                }
                let f = ctx
                    .divide_right(&sv(w2, &ctx), &sv(*w, &ctx))
                    .map_err(|e| format!("edge map {w}→{w2} failed: {e}"))?;
                let sign = bg.signs[bg.edge(*w, w2).expect("edge index")];
                let tgt_index: HashMap<usize, usize> =
                    tgt.iter().enumerate().map(|(t, &b)| (b, t)).collect();
                let src_off = offset[w];
                let tgt_off = offset[&w2];
                for (sc, &sb) in src_basis.iter().enumerate() {
                    let mut v = vec![Rat::zero(); module.dim()];
                    v[sb] = Rat::one();
                    let out = module.act_pbw(&f, &v);
                    for (idx, c) in out.iter().enumerate() {
                        if c.is_zero() {
                            continue;
                        }
                        let t = *tgt_index.get(&idx).unwrap_or_else(|| {
                            panic!("action left the target weight space")
                        });
                        let val = if sign < 0 { -c.clone() } else { c.clone() };
                        mat.add_entry(tgt_off + t, src_off + sc, val);
                    }
                }
            }
        }
        differentials.push(mat);
    }
    let complex = BGGComplex {
        lambda: lambda.clone(),
        spaces,
        differentials,
    };
    // d² = 0: always for small ranks, size-capped otherwise.
    if rs.rank <= 2 || complex.differentials.iter().map(|m| m.nnz()).sum::<usize>() < 20_000 {
        for d in 0..complex.differentials.len().saturating_sub(1) {
            let sq = complex.differentials[d + 1].matmul(&complex.differentials[d]);
            assert!(sq.is_zero(), "d² ≠ 0 at degree {d} for λ = {lambda}");
        }
    }
    Ok(complex)
}

/// Dominant representatives of the non-singular dot-orbits meeting the
/// weight support of E, sorted and deduplicated.
pub fn dominant_spectrum(
    rs: &RootSystem,
    wg: &WeylGroup,
    module: &WeightedModule,
) -> Vec<Weight> {
    let mut out: Vec<Weight> = Vec::new();
    for mu in module.weight_support() {
        match wg.is_dot_dominant(rs, &mu) {
            DotPosition::Dominant => out.push(mu),
            DotPosition::Conjugate { dominant, .. } => out.push(dominant),
            DotPosition::Singular => {}
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out.dedup();
    out
}
