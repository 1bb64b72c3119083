//! Filter, lift and subtract: the four-qubit PPT entangled example.

use symppt::construct::{run_pipeline, OmegaScale, PipelineConfig};

fn main() -> symppt::Result<()> {
    let cfg = PipelineConfig {
        omega_scale: OmegaScale::DoubledUnnormalized,
        ..PipelineConfig::four_qubit_example()
    };
    let res = run_pipeline(&cfg)?;
    println!("lambda* = {:.5} (limited by PT {})", res.lambda.lambda, res.lambda.limiting);
    if let Some(s) = &res.subtraction {
        println!("alpha = {:?}, mu* = {:.5}", s.alpha, s.weight.mu_star);
    }
    for st in &res.stages {
        println!("{:>10}  ranks {:?}", st.stage, st.ranks);
    }
    let ex = res.extremality.as_ref().expect("four qubits");
    println!("solution dim {}, certified entangled: {}", ex.solution_dim, res.certified_entangled());
    Ok(())
}
