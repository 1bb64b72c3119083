//! Ranks and separability verdicts across the qubit–qudit family.

use symppt::horodecki::{ranks, rho_db, separability_verdict, separable_decomposition_b1, HorodeckiParams, RangeSearchConfig};
use symppt::Tolerances;

fn main() -> symppt::Result<()> {
    let tol = Tolerances::default();
    for d in [2, 3, 4, 6] {
        for b in [0.0, 0.3, 0.7, 1.0] {
            let p = HorodeckiParams::new(d, b)?;
            let (r, rt) = ranks(&rho_db(&p), &tol)?;
            let v = separability_verdict(&p, &RangeSearchConfig::default(), &tol)?;
            println!("d={d} b={b:.1}  rank {r}/{rt}  {v:?}");
        }
    }
    let dec = separable_decomposition_b1(4, 9)?;
    println!("b=1, d=4: {} product terms, error {:.1e}", dec.phis.len(), dec.frobenius_error);
    Ok(())
}
