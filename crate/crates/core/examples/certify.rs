//! Full classification of a product mixture, a walk state and the extremal example.

use symppt::classify::certify;
use symppt::construct::{run_pipeline, OmegaScale, PipelineConfig};
use symppt::extremal::{extremal_search, SearchConfig};
use symppt::{Alpha, SymmetricState, Tolerances};

fn main() -> symppt::Result<()> {
    let tol = Tolerances::default();
    let mut mix = SymmetricState::pure_product(4, Alpha::finite(0.2, -0.4))?.dicke_matrix;
    mix += SymmetricState::pure_product(4, Alpha::finite(-1.0, 0.3))?.dicke_matrix;
    let walk = extremal_search(4, &SearchConfig::four_qubit_default(), &tol)?;
    let example = run_pipeline(&PipelineConfig {
        omega_scale: OmegaScale::DoubledUnnormalized,
        ..PipelineConfig::four_qubit_example()
    })?;
    let states = [
        ("mixture", SymmetricState::from_matrix_unchecked(4, mix)),
        ("walk step", walk.steps[0].state.clone()),
        ("example", example.final_state),
    ];
    for (name, s) in states {
        let c = certify(&s, 0, &tol)?;
        println!("{name:>10}: {} {:?}: {}", c.classification.three_rank, c.classification.verdict, c.classification.justification);
    }
    Ok(())
}
