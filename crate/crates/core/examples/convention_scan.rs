//! lambda* under every omega/projector scale pair.

use symppt::construct::{convention_scan, PipelineConfig};

fn main() -> symppt::Result<()> {
    for (o, p, l) in convention_scan(&PipelineConfig::four_qubit_example())? {
        println!("{o:?} + {p:?}: {l:.5}");
    }
    Ok(())
}
