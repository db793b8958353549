use veronese_syzygy::koszul::{betti_table, BettiTable, OracleOptions, PrimeField};
use veronese_syzygy::{QuotientModule, VeroneseModel, Weights};

fn table(w: &[u32], d: u32, p: u64) -> BettiTable {
    let model = VeroneseModel::new(Weights::new(w.to_vec()).unwrap(), d).unwrap();
    betti_table(
        &QuotientModule::new(model),
        &PrimeField::new(p).unwrap(),
        &OracleOptions::default(),
    )
    .unwrap()
}

/// `(row, first column, entries)` triples, everything else zero.
fn expect(t: &BettiTable, rows: &[(u32, u32, &[u64])]) {
    let mut want: Vec<(u32, u32, u64)> = Vec::new();
    for &(q, start, vals) in rows {
        for (k, &v) in vals.iter().enumerate() {
            let i = start + k as u32;
            want.push((i, i + q, v));
        }
    }
    want.sort();
    assert!(t.complete);
    assert_eq!(t.entries, want);
}

const P112_D5: &[(u32, u32, &[u64])] = &[
    (0, 0, &[1]),
    (1, 1, &[43, 222, 558, 840, 798, 468, 147, 8]),
    (2, 1, &[10, 88, 342, 768, 1092, 1008, 588, 201, 20, 1]),
    (3, 9, &[9, 2]),
];

const P2_D3: &[(u32, u32, &[u64])] = &[
    (0, 0, &[1]),
    (1, 1, &[27, 105, 189, 189, 105, 27]),
    (2, 7, &[1]),
];

const P113_D5: &[(u32, u32, &[u64])] = &[
    (0, 0, &[1]),
    (1, 1, &[21, 70, 105, 84, 35, 6]),
    (2, 1, &[14, 84, 210, 280, 210, 84, 14]),
    (3, 1, &[9, 63, 189, 315, 315, 189, 63, 9]),
    (4, 2, &[14, 84, 210, 280, 210, 84, 14]),
    (5, 3, &[6, 35, 84, 105, 70, 21]),
    (6, 9, &[1]),
];

#[test]
fn p112_d5_table() {
    let t = table(&[1, 1, 2], 5, 32003);
    expect(&t, P112_D5);
    assert_eq!(t.pdim(), 10);
    assert_eq!(t.max_row(), 3);
}

#[test]
fn p2_d3_table() {
    let t = table(&[1, 1, 1], 3, 32003);
    expect(&t, P2_D3);
    assert_eq!(t.pdim(), 7);
}

#[test]
fn p113_d5_table() {
    let t = table(&[1, 1, 3], 5, 32003);
    expect(&t, P113_D5);
    assert_eq!(t.max_row(), 6);
}

#[test]
fn golden_tables_agree_over_a_second_prime() {
    expect(&table(&[1, 1, 2], 5, 101), P112_D5);
    expect(&table(&[1, 1, 1], 3, 101), P2_D3);
    expect(&table(&[1, 1, 3], 5, 101), P113_D5);
}

/// `Σ_i (-1)^i β_{i,t}` is the coefficient of `u^t` in `H_M̄(u) Π (1 - u^{deg z})`,
/// independent of any rank computation. The printed row-5 value 25 in column 4 of
/// the P(1,1,3) table breaks this identity at `t = 9`; 35 satisfies it.
#[test]
fn p113_d5_row5_entry_fixed_by_hilbert_series() {
    use veronese_syzygy::veronese_model::{build_generators, mbar_basis};
    let model = VeroneseModel::new(Weights::new(vec![1, 1, 3]).unwrap(), 5).unwrap();
    let qm = QuotientModule::new(model.clone());
    let gens = build_generators(&model);
    let mut poly: Vec<i64> = (0..=qm.max_mbar_degree())
        .map(|q| mbar_basis(&qm, q).len() as i64)
        .collect();
    for z in qm.sbar_generators() {
        let s = gens.s_degree(z) as usize;
        let mut next = vec![0i64; poly.len() + s];
        for (k, &c) in poly.iter().enumerate() {
            next[k] += c;
            next[k + s] -= c;
        }
        poly = next;
    }
    let alternating = |rows: &[(u32, u32, &[u64])], t: u32| -> i64 {
        let mut sum = 0;
        for &(q, start, vals) in rows {
            for (k, &v) in vals.iter().enumerate() {
                let i = start + k as u32;
                if i + q == t {
                    sum += if i % 2 == 0 { v as i64 } else { -(v as i64) };
                }
            }
        }
        sum
    };
    let printed: &[(u32, u32, &[u64])] = &[
        (0, 0, &[1]),
        (1, 1, &[21, 70, 105, 84, 35, 6]),
        (2, 1, &[14, 84, 210, 280, 210, 84, 14]),
        (3, 1, &[9, 63, 189, 315, 315, 189, 63, 9]),
        (4, 2, &[14, 84, 210, 280, 210, 84, 14]),
        (5, 3, &[6, 25, 84, 105, 70, 21]),
        (6, 9, &[1]),
    ];
    for t in 0..poly.len() as u32 {
        assert_eq!(alternating(P113_D5, t), poly[t as usize], "t={t}");
        if t != 9 {
            assert_eq!(alternating(printed, t), poly[t as usize], "t={t}");
        }
    }
    assert_ne!(alternating(printed, 9), poly[9]);
}
