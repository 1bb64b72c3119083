//! Recover a planted three-term Gram decomposition.

use symppt::classify::{decompose_gram, gram_state, GramForm, GramOutcome};
use symppt::linalg::c;

fn main() -> symppt::Result<()> {
    let alphas = [c(0.3, -0.2), c(-0.7, 0.5), c(1.2, 0.1)];
    let a = [c(0.5, 0.0), c(0.2, 0.3), c(-0.4, 0.1)];
    let b = [c(0.1, 0.1), c(0.0, -0.3), c(0.2, 0.0)];
    let s = gram_state(GramForm::A4, &alphas, &a, &b);
    match decompose_gram(&s, GramForm::A4, 0)? {
        GramOutcome::Decomposed(d) => {
            println!("K = {}, error {:.1e}", d.k, d.reconstruction_error);
            for x in &d.alphas {
                println!("  alpha = {:.6}{:+.6}i", x.re, x.im);
            }
        }
        GramOutcome::Inconclusive { reason } => println!("inconclusive: {reason}"),
    }
    Ok(())
}
