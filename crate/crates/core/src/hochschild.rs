//! Bigraded cohomology tables of a block, assembled from per-(j,k) sheaf
//! cohomology.
//!
//! The degree-s piece decomposes as ⊕_{i+j+k=s} H^i of the bundle family
//! V_{j,k} on G/P; tables are laid out with rows i+j and columns j−i, and
//! each cell is a multiset of dominant weights (irreducible multiplicities).
//! Within one s the τ/sl₂ symmetry mirrors column pairs, so only the half
//! with j ≤ dim G/P needs direct computation.

use std::collections::BTreeMap;

use num::BigInt;
use rayon::prelude::*;

use crate::bgg::dominant_spectrum;
use crate::cohomology::bgg_cohomology_via_varpi;
use crate::modules::{build_parabolic, build_vjk, vjk_dim_formula, ParabolicData};
use crate::rootsystem::{BruhatGraph, RootSystem, Series, Weight, WeylGroup};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSpec {
    pub series: Series,
    pub rank: usize,
    /// Simple indices (0-based) generating the dot-stabilizer of the
    /// block's weight; empty = principal block.
    pub levi: Vec<usize>,
}

impl BlockSpec {
    pub fn parabolic(&self) -> Result<(RootSystem, ParabolicData), String> {
        let rs = RootSystem::build(self.series, self.rank)?;
        let pd = build_parabolic(&rs, &self.levi)?;
        Ok((rs, pd))
    }
}

/// Weight-multiset content of one table cell, keyed by simple-root
/// coordinates of the dominant weight.
pub type CellContents = BTreeMap<Vec<i64>, u64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigradedTable {
    pub s: i64,
    pub dim_gp: usize,
    /// (row = i+j, col = j−i) → weight multiset.
    pub cells: BTreeMap<(i64, i64), CellContents>,
    /// contributing (i, j, k) triples per cell
    pub provenance: BTreeMap<(i64, i64), Vec<(usize, usize, i64)>>,
}

impl BigradedTable {
    pub fn empty(s: i64, dim_gp: usize) -> Self {
        BigradedTable {
            s,
            dim_gp,
            cells: BTreeMap::new(),
            provenance: BTreeMap::new(),
        }
    }

    pub fn cell(&self, row: i64, col: i64) -> Option<&CellContents> {
        self.cells.get(&(row, col))
    }

    fn add(&mut self, row: i64, col: i64, weight: Vec<i64>, mult: u64, prov: (usize, usize, i64)) {
        if mult == 0 {
            return;
        }
        *self
            .cells
            .entry((row, col))
            .or_default()
            .entry(weight)
            .or_insert(0) += mult;
        let p = self.provenance.entry((row, col)).or_default();
        if !p.contains(&prov) {
            p.push(prov);
        }
    }

    /// Total dimension: Σ multiplicity × dim L(λ).
    pub fn total_dim(&self, rs: &RootSystem) -> BigInt {
        let mut total = BigInt::from(0);
        for contents in self.cells.values() {
            for (w, &m) in contents {
                total += rs.weyl_dim(&Weight(w.clone())) * BigInt::from(m);
            }
        }
        total
    }

    /// Multiplicity of the trivial module across all cells.
    pub fn invariant_dim(&self) -> u64 {
        self.cells
            .values()
            .flat_map(|c| c.iter())
            .filter(|(w, _)| w.iter().all(|&x| x == 0))
            .map(|(_, &m)| m)
            .sum()
    }

    /// Sum of all multiplicities (dimension of the multiplicity space).
    pub fn total_multiplicity(&self) -> u64 {
        self.cells.values().flat_map(|c| c.values()).sum()
    }
}

/// All (i, j, k) with i+j+k = s, 0 ≤ i ≤ dim G/P, 0 ≤ j ≤ 2·dim G/P,
/// k even, and V_{j,k} ≠ 0.
pub fn enumerate_cells(pd: &ParabolicData, s: i64) -> Vec<(usize, usize, i64)> {
    let n = pd.dim_gp() as i64;
    let mut out = Vec::new();
    for i in 0..=n {
        for j in 0..=2 * n {
            let k = s - i - j;
            if k % 2 != 0 {
                continue;
            }
            if vjk_dim_formula(pd, j as usize, k) > 0 {
                out.push((i as usize, j as usize, k));
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AssembleMode {
    /// Compute every cell directly.
    Full,
    /// Compute j ≤ dim G/P, fill the rest by the τ mirror.
    HalfTau,
}

/// Version tag covering the engine's internal conventions (positive-root
/// order, structure-constant signs, Bruhat sign solve). Cached results keyed
/// under a different tag must be discarded.
pub const ENGINE_VERSION: &str = "bgg-engine-1 heightlex extraspecial+1";

/// External store of per-(j, k, λ) cohomology records and per-(j, k)
/// dominant spectra, letting callers persist results across runs. A warm
/// store lets [`assemble_with_cache`] skip every rank computation.
pub trait RecordSource: Sync {
    fn get_record(&self, j: usize, k: i64, lam: &Weight) -> Option<crate::CohomologyRecord>;
    fn put_record(&self, j: usize, k: i64, lam: &Weight, rec: &crate::CohomologyRecord);
    fn get_spectrum(&self, j: usize, k: i64) -> Option<Vec<Weight>>;
    fn put_spectrum(&self, j: usize, k: i64, lams: &[Weight]);
}

/// The trivial store: computes everything fresh.
pub struct NoCache;

impl RecordSource for NoCache {
    fn get_record(&self, _: usize, _: i64, _: &Weight) -> Option<crate::CohomologyRecord> {
        None
    }
    fn put_record(&self, _: usize, _: i64, _: &Weight, _: &crate::CohomologyRecord) {}
    fn get_spectrum(&self, _: usize, _: i64) -> Option<Vec<Weight>> {
        None
    }
    fn put_spectrum(&self, _: usize, _: i64, _: &[Weight]) {}
}

/// Assemble the bigraded table of degree s for a block.
pub fn assemble(block: &BlockSpec, s: i64, mode: AssembleMode) -> Result<BigradedTable, String> {
    assemble_with_cache(block, s, mode, &NoCache)
}

/// [`assemble`], consulting and populating an external record store.
pub fn assemble_with_cache(
    block: &BlockSpec,
    s: i64,
    mode: AssembleMode,
    store: &dyn RecordSource,
) -> Result<BigradedTable, String> {
    let (rs, pd) = block.parabolic()?;
    let wg = WeylGroup::build(&rs);
    let bg = BruhatGraph::build(&rs, &wg);
    let n = pd.dim_gp();
    let mut cells = enumerate_cells(&pd, s);
    if mode == AssembleMode::HalfTau {
        cells.retain(|&(_, j, _)| j <= n);
    }
    // Group cohomological degrees by family.
    let mut by_jk: BTreeMap<(usize, i64), Vec<usize>> = BTreeMap::new();
    for (i, j, k) in cells {
        by_jk.entry((j, k)).or_default().push(i);
    }
    type Contribution = ((i64, i64), Vec<i64>, u64, (usize, usize, i64));
    let jobs: Vec<((usize, i64), Vec<usize>)> = by_jk.into_iter().collect();
    let results: Vec<Result<Vec<Contribution>, String>> = jobs
        .par_iter()
        .map(|((j, k), is)| {
            let fam_cell: std::sync::OnceLock<Result<crate::modules::VjkFamily, String>> =
                std::sync::OnceLock::new();
            let get_fam = || -> Result<&crate::modules::VjkFamily, String> {
                fam_cell
                    .get_or_init(|| build_vjk(&pd, *j, *k))
                    .as_ref()
                    .map_err(Clone::clone)
            };
            let lams = match store.get_spectrum(*j, *k) {
                Some(l) => l,
                None => {
                    let fam = get_fam()?;
                    let l = if fam.dim_v() == 0 {
                        Vec::new()
                    } else {
                        dominant_spectrum(&rs, &wg, &fam.v)
                    };
                    store.put_spectrum(*j, *k, &l);
                    l
                }
            };
            let per_lam: Vec<Result<Vec<Contribution>, String>> = lams
                .par_iter()
                .map(|lam| {
                    let rec = match store.get_record(*j, *k, lam) {
                        Some(r) => r,
                        None => {
                            let fam = get_fam()?;
                            let r = bgg_cohomology_via_varpi(&rs, &wg, &bg, fam, lam)?;
                            store.put_record(*j, *k, lam, &r);
                            r
                        }
                    };
                    let mut out = Vec::new();
                    for &i in is {
                        let d = rec.dims.get(i).copied().unwrap_or(0);
                        if d > 0 {
                            out.push((
                                ((i + j) as i64, *j as i64 - i as i64),
                                lam.0.clone(),
                                d as u64,
                                (i, *j, *k),
                            ));
                        }
                    }
                    Ok(out)
                })
                .collect();
            let mut flat = Vec::new();
            for r in per_lam {
                flat.extend(r?);
            }
            Ok(flat)
        })
        .collect();
    let mut table = BigradedTable::empty(s, n);
    for r in results {
        for ((row, col), w, m, prov) in r? {
            table.add(row, col, w, m, prov);
        }
    }
    match mode {
        AssembleMode::Full => Ok(table),
        AssembleMode::HalfTau => half_table_complete(table, n),
    }
}

/// Mirror of a cell under τ: (row, col) ↦ (2n − col, 2n − row), i.e.
/// (i, j) ↦ (i, 2n − j).
pub fn tau_mirror(row: i64, col: i64, n: usize) -> (i64, i64) {
    (2 * n as i64 - col, 2 * n as i64 - row)
}

/// Fill the j > n half of a table from the computed j ≤ n half via τ.
pub fn half_table_complete(t: BigradedTable, n: usize) -> Result<BigradedTable, String> {
    let mut out = t.clone();
    for ((row, col), contents) in &t.cells {
        let j2 = row + col; // 2j
        if j2 >= 2 * n as i64 {
            continue;
        }
        let (mrow, mcol) = tau_mirror(*row, *col, n);
        if let Some(existing) = out.cells.get(&(mrow, mcol)) {
            if existing != contents {
                return Err(format!(
                    "mirror cell ({mrow},{mcol}) already present and differs from ({row},{col})"
                ));
            }
        } else {
            out.cells.insert((mrow, mcol), contents.clone());
            let i = (row - col) / 2;
            let j = 2 * n as i64 - (row + col) / 2;
            let k = t.s - i - j;
            out.provenance
                .insert((mrow, mcol), vec![(i as usize, j as usize, k)]);
        }
    }
    Ok(out)
}

/// τ-symmetry report: descriptions of mirror-cell mismatches (empty = pass).
pub fn check_tau_symmetry(t: &BigradedTable, n: usize) -> Vec<String> {
    let empty = CellContents::new();
    let mut seen: std::collections::BTreeSet<(i64, i64)> = Default::default();
    let mut violations = Vec::new();
    let keys: Vec<(i64, i64)> = t.cells.keys().cloned().collect();
    for (row, col) in keys {
        let (mrow, mcol) = tau_mirror(row, col, n);
        let a = (row, col).min((mrow, mcol));
        if !seen.insert(a) {
            continue;
        }
        let left = t.cells.get(&(row, col)).unwrap_or(&empty);
        let right = t.cells.get(&(mrow, mcol)).unwrap_or(&empty);
        if left != right {
            violations.push(format!(
                "cells ({row},{col}) and ({mrow},{mcol}) differ: {left:?} vs {right:?}"
            ));
        }
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2_block() -> BlockSpec {
        BlockSpec {
            series: Series::A,
            rank: 2,
            levi: vec![0],
        }
    }

    fn principal_a2() -> BlockSpec {
        BlockSpec {
            series: Series::A,
            rank: 2,
            levi: vec![],
        }
    }

    #[test]
    fn cell_enumeration_contains_origin() {
        for block in [p2_block(), principal_a2()] {
            let (_, pd) = block.parabolic().unwrap();
            let cells = enumerate_cells(&pd, 0);
            assert!(cells.contains(&(0, 0, 0)));
            // parity: row = i+j ≡ s (mod 2)
            for (i, j, k) in cells {
                assert_eq!((i + j) % 2, 0);
                assert_eq!(k % 2, 0);
            }
        }
    }

    #[test]
    fn p2_s1_table() {
        // Degree 1 of the ℙ² block: ℂ⊕𝔤 at (1,1) and its mirror (3,3),
        // plus a single ℂ on the self-mirrored cell (3,1).
        let t = assemble(&p2_block(), 1, AssembleMode::Full).unwrap();
        let gprime: CellContents = [(vec![0i64, 0], 1u64), (vec![1, 1], 1)].into_iter().collect();
        let trivial: CellContents = [(vec![0i64, 0], 1u64)].into_iter().collect();
        assert_eq!(t.cell(1, 1), Some(&gprime));
        assert_eq!(t.cell(3, 3), Some(&gprime));
        assert_eq!(t.cell(3, 1), Some(&trivial));
        assert_eq!(t.cells.len(), 3, "unexpected extra cells: {:?}", t.cells);
        assert!(check_tau_symmetry(&t, t.dim_gp).is_empty());
    }

    #[test]
    fn p2_even_s_table() {
        let m = 2i64;
        let t = assemble(&p2_block(), 2 * m, AssembleMode::Full).unwrap();
        let expect00: CellContents = [(vec![m, m], 1u64)].into_iter().collect();
        assert_eq!(t.cell(0, 0), Some(&expect00));
        let expect22: CellContents = [
            (vec![m, m - 1], 1u64),
            (vec![m - 1, m], 1),
            (vec![m, m], 2),
            (vec![m, m + 1], 1),
            (vec![m + 1, m], 1),
        ]
        .into_iter()
        .collect();
        assert_eq!(t.cell(2, 2), Some(&expect22));
        let expect44: CellContents = [(vec![m, m], 1u64)].into_iter().collect();
        assert_eq!(t.cell(4, 4), Some(&expect44));
        assert!(check_tau_symmetry(&t, t.dim_gp).is_empty());
    }

    #[test]
    fn half_mode_matches_full_mode() {
        for s in [1i64, 2] {
            let full = assemble(&p2_block(), s, AssembleMode::Full).unwrap();
            let half = assemble(&p2_block(), s, AssembleMode::HalfTau).unwrap();
            assert_eq!(full.cells, half.cells, "s={s}");
        }
    }

    #[test]
    fn tau_violation_detected() {
        let mut t = assemble(&p2_block(), 1, AssembleMode::Full).unwrap();
        t.cells.remove(&(3, 3));
        assert!(!check_tau_symmetry(&t, t.dim_gp).is_empty());
    }

    #[test]
    fn principal_a2_s0_total_is_sixteen() {
        // Center dimension of the degree-0 part for the principal block of
        // sl₃ at a root of unity: 16 = (3+1)^{3−1}.
        let block = principal_a2();
        let t = assemble(&block, 0, AssembleMode::Full).unwrap();
        let (rs, _) = block.parabolic().unwrap();
        assert_eq!(t.total_dim(&rs), BigInt::from(16));
        assert!(check_tau_symmetry(&t, t.dim_gp).is_empty());
        // Degree 0 of the principal block is 𝔤-invariant.
        assert_eq!(t.invariant_dim(), t.total_multiplicity());
    }
}
