//! Serializable table form and the text / JSON / LaTeX emitters.

use std::collections::BTreeMap;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use bgg_core::{BigradedTable, BlockSpec, RootSystem, Weight};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Latex,
}

#[derive(Serialize, Deserialize)]
pub struct EntryOut {
    pub weight: Vec<i64>,
    pub mult: u64,
}

#[derive(Serialize, Deserialize)]
pub struct CellOut {
    pub row: i64,
    pub col: i64,
    pub entries: Vec<EntryOut>,
    /// Cell dimension (Σ mult × dim L(weight)); render-time convenience,
    /// not part of the wire format.
    #[serde(skip)]
    pub dim: u64,
}

#[derive(Serialize, Deserialize)]
pub struct TableOut {
    #[serde(rename = "type")]
    pub rtype: String,
    pub rank: usize,
    /// 1-based stabilizer indices, as given on the command line.
    pub block: Vec<usize>,
    pub s: i64,
    #[serde(rename = "dim_gP")]
    pub dim_gp: usize,
    pub cells: Vec<CellOut>,
    pub total_dim: u64,
    pub invariant_dim: u64,
}

pub fn table_out(block: &BlockSpec, t: &BigradedTable) -> Result<TableOut, String> {
    let rs = RootSystem::build(block.series, block.rank)?;
    let mut cells = Vec::new();
    for (&(row, col), contents) in &t.cells {
        let mut entries = Vec::new();
        let mut dim = 0u64;
        for (w, &m) in contents {
            let d: u64 = (rs.weyl_dim(&Weight(w.clone())) * num::BigInt::from(m))
                .try_into()
                .map_err(|_| "cell dimension overflows u64".to_string())?;
            dim += d;
            entries.push(EntryOut {
                weight: w.clone(),
                mult: m,
            });
        }
        cells.push(CellOut {
            row,
            col,
            entries,
            dim,
        });
    }
    let total_dim: u64 = t
        .total_dim(&rs)
        .try_into()
        .map_err(|_| "total dimension overflows u64".to_string())?;
    Ok(TableOut {
        rtype: format!("{}{}", block.series, block.rank),
        rank: block.rank,
        block: block.levi.iter().map(|i| i + 1).collect(),
        s: t.s,
        dim_gp: t.dim_gp,
        cells,
        total_dim,
        invariant_dim: t.invariant_dim(),
    })
}

fn weight_label(w: &[i64]) -> String {
    if w.iter().all(|&x| x == 0) {
        "C".to_string()
    } else {
        let parts: Vec<String> = w.iter().map(|x| x.to_string()).collect();
        format!("L({})", parts.join(","))
    }
}

fn cell_text(entries: &[EntryOut]) -> String {
    let parts: Vec<String> = entries
        .iter()
        .map(|e| {
            if e.mult == 1 {
                weight_label(&e.weight)
            } else {
                format!("{}·{}", e.mult, weight_label(&e.weight))
            }
        })
        .collect();
    parts.join(" + ")
}

fn render_text(t: &TableOut, dims_only: bool) -> String {
    let mut out = format!(
        "# type {} block {:?} s={} dim G/P = {}\n",
        t.rtype, t.block, t.s, t.dim_gp
    );
    for c in &t.cells {
        let body = if dims_only {
            c.dim.to_string()
        } else {
            cell_text(&c.entries)
        };
        out.push_str(&format!("i+j={} | j-i={}: {}\n", c.row, c.col, body));
    }
    out.push_str(&format!(
        "total_dim = {}, invariant_dim = {}\n",
        t.total_dim, t.invariant_dim
    ));
    out
}

fn latex_label(w: &[i64], mult: u64) -> String {
    let base = if w.iter().all(|&x| x == 0) {
        "\\mathbb{C}".to_string()
    } else {
        let parts: Vec<String> = w.iter().map(|x| x.to_string()).collect();
        format!("L_{{{}}}", parts.join(","))
    };
    if mult == 1 {
        base
    } else {
        format!("{base}^{{{mult}}}")
    }
}

fn render_latex(t: &TableOut, dims_only: bool) -> String {
    let mut rows: Vec<i64> = t.cells.iter().map(|c| c.row).collect();
    rows.sort_unstable();
    rows.dedup();
    let mut cols: Vec<i64> = t.cells.iter().map(|c| c.col).collect();
    cols.sort_unstable();
    cols.dedup();
    let by_pos: BTreeMap<(i64, i64), &CellOut> =
        t.cells.iter().map(|c| ((c.row, c.col), c)).collect();
    let mut out = String::new();
    out.push_str(&format!(
        "% type {} block {:?} s={}\n",
        t.rtype, t.block, t.s
    ));
    out.push_str(&format!(
        "\\[ \\begin{{array}}{{c|{}}}\n",
        "c".repeat(cols.len())
    ));
    for r in &rows {
        let mut line = format!("{{\\scriptstyle i+j={r}}}");
        for c in &cols {
            line.push_str(" & ");
            if let Some(cell) = by_pos.get(&(*r, *c)) {
                if dims_only {
                    line.push_str(&cell.dim.to_string());
                } else {
                    let parts: Vec<String> = cell
                        .entries
                        .iter()
                        .map(|e| latex_label(&e.weight, e.mult))
                        .collect();
                    line.push_str(&parts.join(" \\oplus "));
                }
            }
        }
        line.push_str(" \\\\\n");
        out.push_str(&line);
    }
    out.push_str("\\hline h^{i,j}");
    for c in &cols {
        out.push_str(&format!(" & {{\\scriptstyle j-i={c}}}"));
    }
    out.push_str("\n\\end{array} \\]\n");
    out
}

pub fn render(tables: &[TableOut], format: Format, dims_only: bool) -> String {
    match format {
        Format::Json => {
            let text = if tables.len() == 1 {
                serde_json::to_string_pretty(&tables[0])
            } else {
                serde_json::to_string_pretty(tables)
            }
            .expect("tables serialize");
            format!("{text}\n")
        }
        Format::Text => tables
            .iter()
            .map(|t| render_text(t, dims_only))
            .collect::<Vec<_>>()
            .join("\n"),
        Format::Latex => tables
            .iter()
            .map(|t| render_latex(t, dims_only))
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

/// Cell-by-cell multiset diff; one line per discrepancy.
pub fn diff_cells(a: &TableOut, b: &TableOut) -> Vec<String> {
    type CellMap = BTreeMap<(i64, i64), BTreeMap<Vec<i64>, u64>>;
    let to_map = |t: &TableOut| -> CellMap {
        t.cells
            .iter()
            .map(|c| {
                (
                    (c.row, c.col),
                    c.entries
                        .iter()
                        .map(|e| (e.weight.clone(), e.mult))
                        .collect(),
                )
            })
            .collect()
    };
    let ma = to_map(a);
    let mb = to_map(b);
    let mut keys: Vec<(i64, i64)> = ma.keys().chain(mb.keys()).cloned().collect();
    keys.sort_unstable();
    keys.dedup();
    let empty = BTreeMap::new();
    let mut out = Vec::new();
    for key in keys {
        let ca = ma.get(&key).unwrap_or(&empty);
        let cb = mb.get(&key).unwrap_or(&empty);
        if ca == cb {
            continue;
        }
        let mut weights: Vec<&Vec<i64>> = ca.keys().chain(cb.keys()).collect();
        weights.sort_unstable();
        weights.dedup();
        for w in weights {
            let xa = ca.get(w).copied().unwrap_or(0);
            let xb = cb.get(w).copied().unwrap_or(0);
            if xa != xb {
                out.push(format!(
                    "s={} cell ({},{}) {}: {} vs {}",
                    a.s,
                    key.0,
                    key.1,
                    weight_label(w),
                    xa,
                    xb
                ));
            }
        }
    }
    out
}
