use num_bigint::BigInt;
use num_rational::BigRational;

use naecol_core::ensemble::{
    concentration_experiment, count_solutions, read_instance, sample_instance, sat_sweep,
    spread_non_increasing, write_instance, NaeInstance,
};
use naecol_core::first_moment::{ez_col, ez_nae, oracle::for_each_slot_word};
use naecol_core::Model;

fn template(n: usize, k: usize, d: usize, model: Model) -> NaeInstance {
    sample_instance(n, k, d, 0, model, false, 0).unwrap()
}

#[test]
fn average_count_over_matchings_equals_first_moment() {
    for (n, k, d) in [(3usize, 3usize, 3usize), (3, 3, 2), (4, 2, 2), (6, 3, 1), (4, 4, 2)] {
        let base = template(n, k, d, Model::Coloring);
        let (mut total, mut words) = (0u64, 0u64);
        for_each_slot_word(n as u64, k as u64, d as u64, |w| {
            total += count_solutions(&base.with_slot_word(w).unwrap()).unwrap();
            words += 1;
        })
        .unwrap();
        let avg = BigRational::new(BigInt::from(total), BigInt::from(words));
        assert_eq!(avg, ez_col(n as u64, k as u64, d as u64).unwrap(), "{n} {k} {d}");
    }
}

#[test]
fn average_nae_count_over_matchings_and_literals_equals_first_moment() {
    for (n, k, d) in [(3usize, 3usize, 3usize), (3, 3, 2), (4, 2, 2)] {
        let m = n * d / k;
        let (mut total, mut cases) = (0u64, 0u64);
        for_each_slot_word(n as u64, k as u64, d as u64, |w| {
            for bits in 0u64..1 << (m * k) {
                let lits: Vec<Vec<u8>> = (0..m)
                    .map(|a| (0..k).map(|j| (bits >> (a * k + j) & 1) as u8).collect())
                    .collect();
                let clauses = w.chunks(k).map(|c| c.to_vec()).collect();
                let inst = NaeInstance::from_parts(Model::Nae, n, k, d, clauses, lits).unwrap();
                total += count_solutions(&inst).unwrap();
                cases += 1;
            }
        })
        .unwrap();
        let avg = BigRational::new(BigInt::from(total), BigInt::from(cases));
        assert_eq!(avg, ez_nae(n as u64, k as u64, d as u64).unwrap(), "{n} {k} {d}");
    }
}

#[test]
fn file_round_trip() {
    let dir = std::env::temp_dir().join(format!("naecol-io-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("inst.txt");
    let inst = sample_instance(6, 3, 2, 1, Model::Nae, false, 0).unwrap();
    write_instance(&inst, &path).unwrap();
    assert_eq!(read_instance(&path).unwrap(), inst);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn free_energy_spread_shrinks_with_n() {
    let rows = concentration_experiment(&[12, 18, 24], 3, 4, 2.0, 200, 17, Model::Nae).unwrap();
    assert!(spread_non_increasing(&rows), "{rows:?}");
}

#[test]
fn satisfiable_fraction_drops_with_degree() {
    let rows = sat_sweep(3, 24, &[4, 9], 200, 23, Model::Coloring).unwrap();
    assert!(rows[0].fraction > rows[1].fraction, "{rows:?}");
    assert_eq!(rows, sat_sweep(3, 24, &[4, 9], 200, 23, Model::Coloring).unwrap());
}
