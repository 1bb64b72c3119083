//! Seeded rank-reduction walks from the maximally mixed symmetric state.

use std::collections::BTreeMap;

use symppt::extremal::{extremal_search, SearchConfig};
use symppt::Tolerances;

fn main() -> symppt::Result<()> {
    let tol = Tolerances::default();
    let cfg = SearchConfig::four_qubit_default();
    let mut tally = BTreeMap::new();
    for seed in 0..20 {
        let t = extremal_search(seed, &cfg, &tol)?;
        let path: Vec<_> = t.steps.iter().map(|s| format!("{:?}", s.ranks)).collect();
        println!("seed {seed:>2}: {}", path.join(" -> "));
        *tally.entry(t.terminal.ranks.clone()).or_insert(0) += 1;
    }
    println!("{tally:?}");
    Ok(())
}
