//! Write a certified state file, read it back and re-verify.

use symppt::construct::{run_pipeline, PipelineConfig};
use symppt::io::{basic_certificates, verify_certificates, Provenance, StateFile};
use symppt::Tolerances;

fn main() -> symppt::Result<()> {
    let tol = Tolerances::default();
    let res = run_pipeline(&PipelineConfig::four_qubit_example())?;
    let prov = Provenance { command: "example".into(), config: serde_json::Value::Null, seed: Some(0) };
    let mut f = StateFile::from_symmetric(&res.final_state, prov, &tol);
    f.metadata.certificates = basic_certificates(&res.final_state, &tol)?;
    let path = std::env::temp_dir().join("symppt-example.json");
    f.write(&path)?;
    let back = StateFile::read(&path)?;
    println!("{}: ranks {:?}", path.display(), back.metadata.three_rank);
    println!("bit-exact: {}", back.matrix()? == res.final_state.dicke_matrix);
    println!("failures: {:?}", verify_certificates(&back, &tol)?);
    Ok(())
}
