//! Modulation maximizing the tolerable losses of the general bound.

use cvqkd::bounds::Bound;
use cvqkd::protocol::ProtocolParams;
use cvqkd::solvers::optimal_modulation;

fn main() -> cvqkd::error::Result<()> {
    for p in [
        ProtocolParams::coherent(1.0)?,
        ProtocolParams::squeezed(1.0)?,
    ] {
        let opt = optimal_modulation(Bound::General, &p, 0.0)?;
        println!(
            "{:<9} r_A = {:.4}  losses = {:.4} dB{}",
            p.kind().as_str(),
            opt.modulation,
            opt.loss_db,
            if opt.at_boundary {
                "  (at search boundary)"
            } else {
                ""
            }
        );
    }
    // With the ancilla outcome disclosed the losses keep growing with modulation.
    let opt = optimal_modulation(Bound::GeneralW, &ProtocolParams::coherent(1.0)?, 0.0)?;
    println!(
        "general_w r_A = {:.4}  losses = {:.4} dB  boundary={}",
        opt.modulation, opt.loss_db, opt.at_boundary
    );
    Ok(())
}
