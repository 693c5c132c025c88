mod common;

use std::fs;

use common::{golden_dir, regenerate, stored, REFERENCE_SETS};
use rabi_aa_cli::Table;

/// Set `UPDATE_GOLDEN=1` to rewrite the stored files.
#[test]
fn reference_sets_match_stored_goldens() {
    for &(name, command) in REFERENCE_SETS {
        let fresh = regenerate(name, command);
        if std::env::var("UPDATE_GOLDEN").is_ok() {
            fs::write(golden_dir().join(format!("{name}.csv")), &fresh).unwrap();
            continue;
        }
        let expected = stored(name).unwrap_or_else(|| panic!("missing golden {name}.csv"));
        assert!(fresh == expected, "{name}.csv differs from regenerated output");
    }
}

#[test]
fn goldens_reparse_under_the_schema() {
    for &(name, command) in REFERENCE_SETS {
        let text = stored(name).unwrap();
        let t = Table::read_csv(text.as_bytes()).unwrap();
        assert_eq!(t.meta_value("command"), Some(command));
        assert!(t.rows.iter().all(|r| r.len() == t.columns.len()));
        assert_eq!(t.to_csv_string(), text, "{name}");
    }
}

#[test]
fn reference_set_contents() {
    let blocks: Vec<Table> = ["block_n2_a_plus", "block_n2_a_zero", "block_n2_a_minus"]
        .iter()
        .map(|n| Table::read_csv(stored(n).unwrap().as_bytes()).unwrap())
        .collect();
    let p1: Vec<Vec<f64>> = blocks.iter().map(|t| t.column("P1").unwrap()).collect();
    assert_eq!(p1[0].len(), 1001);
    assert!(p1.iter().all(|c| (c[0] - 1.0).abs() < 1e-11));
    assert!(p1[0] != p1[1] && p1[1] != p1[2]);

    let weights = Table::read_csv(stored("block_weights").unwrap().as_bytes()).unwrap();
    assert_eq!(weights.rows.len(), 601);
    // N <= 600 holds all of |alpha|^2 = 70 but only 4.5 sigma of 500
    for (col, tol) in [("p_28", 1e-9), ("p_70", 1e-9), ("p_500", 1e-4)] {
        let total: f64 = weights.column(col).unwrap().iter().sum();
        assert!((total - 1.0).abs() < tol, "{col}: {total}");
    }

    let preserved = Table::read_csv(stored("preservation_alpha2_55").unwrap().as_bytes()).unwrap();
    let max_t = preserved.column("T").unwrap().into_iter().fold(0.0, f64::max);
    assert!((0.002..=0.01).contains(&max_t), "{max_t}");
}
