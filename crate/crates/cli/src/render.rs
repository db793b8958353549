use std::fmt::Write;

use veronese_syzygy::koszul::BettiTable;
use veronese_syzygy::predictions::{Certificate, PredictionTable};
use veronese_syzygy::veronese_model::GeneratorTable;
use veronese_syzygy::weighted_ring::Monomial;

/// Betti table in the usual layout: column headers `0..=pdim`, one line per
/// row `q`, `-` for zero and `?` for cells the oracle skipped.
pub fn betti_m2(t: &BettiTable) -> String {
    let last_col = t
        .incomplete_cells
        .iter()
        .map(|c| c.i)
        .chain([t.pdim()])
        .max()
        .unwrap_or(0);
    let last_row = t
        .incomplete_cells
        .iter()
        .map(|c| c.t - c.i)
        .chain([t.max_row()])
        .max()
        .unwrap_or(0);
    let mut grid: Vec<Vec<String>> = Vec::new();
    grid.push((0..=last_col).map(|i| i.to_string()).collect());
    for q in 0..=last_row {
        grid.push(
            (0..=last_col)
                .map(|i| match t.at(i, q) {
                    0 if t.is_incomplete(i, q) => "?".to_string(),
                    0 => "-".to_string(),
                    b => b.to_string(),
                })
                .collect(),
        );
    }
    let widths: Vec<usize> = (0..=last_col as usize)
        .map(|c| grid.iter().map(|r| r[c].len()).max().unwrap())
        .collect();
    let label_width = last_row.to_string().len();
    let mut out = String::new();
    for (k, row) in grid.iter().enumerate() {
        let label = if k == 0 {
            String::new()
        } else {
            (k - 1).to_string()
        };
        write!(out, "{label:>label_width$}").unwrap();
        for (cell, w) in row.iter().zip(&widths) {
            write!(out, " {cell:>w$}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn betti_csv(t: &BettiTable) -> String {
    let mut out = String::from("i,t,q,beta\n");
    for &(i, tt, b) in &t.entries {
        writeln!(out, "{i},{tt},{},{b}", tt - i).unwrap();
    }
    out
}

pub fn predictions_text(p: &PredictionTable) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "P{}, d = {}: N = {}, pdim = {}, sigma = {}, bottom row {}",
        p.model.weights(),
        p.model.d(),
        p.big_n,
        p.pdim(),
        p.sigma,
        p.bottom_row
    )
    .unwrap();
    writeln!(out, "q\tF_q\tB_q").unwrap();
    for r in &p.rows {
        writeln!(
            out,
            "{}\t{}\t{}{}",
            r.q,
            r.f,
            r.b,
            if r.warning { "\t(warning)" } else { "" }
        )
        .unwrap();
    }
    out
}

pub fn predictions_csv(p: &PredictionTable) -> String {
    let mut out = String::from("q,f,b,warning\n");
    for r in &p.rows {
        writeln!(out, "{},{},{},{}", r.q, r.f, r.b, r.warning).unwrap();
    }
    out
}

fn z_list(zs: &[usize], gens: &GeneratorTable, names: &[String]) -> String {
    let items: Vec<String> = zs
        .iter()
        .map(|&z| format!("z{z} = {}", gens.monomial(z).display_with(names)))
        .collect();
    format!("{{{}}}", items.join(", "))
}

pub fn certificate_text(
    label: &str,
    c: &Certificate,
    gens: &GeneratorTable,
    names: &[String],
) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{label}m = {} (row {})",
        c.monomial.display_with(names),
        c.row
    )
    .unwrap();
    writeln!(
        out,
        "  |D| = {}: {}",
        c.d_size,
        z_list(&c.divisors, gens, names)
    )
    .unwrap();
    writeln!(
        out,
        "  |A| = {}: {}",
        c.a_size,
        z_list(&c.annihilators, gens, names)
    )
    .unwrap();
    match c.block() {
        Some((lo, hi)) => {
            writeln!(out, "  valid: certifies row {} columns [{lo}, {hi}]", c.row).unwrap()
        }
        None => writeln!(out, "  invalid: D is not contained in A").unwrap(),
    }
    out
}

pub fn parse_exponents(s: &str) -> Result<Monomial, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<u32>()
                .map_err(|e| format!("bad exponent {p:?}: {e}"))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Monomial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use veronese_syzygy::koszul::{BettiTable, IncompleteCell, OracleChecks};

    fn table(entries: Vec<(u32, u32, u64)>, incomplete: Vec<IncompleteCell>) -> BettiTable {
        BettiTable {
            weights: vec![1, 1, 2],
            d: 3,
            prime: 32003,
            num_generators: 3,
            complete: incomplete.is_empty(),
            entries,
            incomplete_cells: incomplete,
            checks: OracleChecks::default(),
        }
    }

    #[test]
    fn m2_layout() {
        let t = table(vec![(0, 0, 1), (1, 2, 12), (2, 4, 3)], vec![]);
        assert_eq!(betti_m2(&t), "  0  1 2\n0 1  - -\n1 - 12 -\n2 -  - 3\n");
    }

    #[test]
    fn m2_marks_skipped_cells() {
        let t = table(
            vec![(0, 0, 1)],
            vec![IncompleteCell {
                i: 1,
                t: 2,
                dim: 99,
            }],
        );
        assert_eq!(betti_m2(&t), "  0 1\n0 1 -\n1 - ?\n");
    }

    #[test]
    fn exponent_parsing() {
        assert_eq!(parse_exponents("2, 0,4"), Ok(Monomial(vec![2, 0, 4])));
        assert!(parse_exponents("1,x").is_err());
    }
}
